//! Canonical symbolic expressions.
//!
//! An [`Expr`] is a normalized sum of monomials with exact Gaussian-rational
//! coefficients. Monomial factors are parameters, space coordinates, unknown
//! functions carrying a derivative order, or opaque power nodes (radicals and
//! rational-function denominators). Exponents are rationals, so `sqrt(x)` is
//! just `x^(1/2)` and cancellations like `V * V'` for radical potentials fall
//! out of ordinary exponent arithmetic.
//!
//! The representation is canonical by construction: semantically equal
//! polynomial-in-derivatives expressions compare equal with `==`.

use super::coeff::Coeff;
use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::{Signed, Zero};
use std::ops::Neg;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::Arc;

/// Rational exponent.
pub type Exp = Ratio<i64>;

pub fn exp_int(n: i64) -> Exp {
    Exp::from_integer(n)
}

/// Space coordinate. 1D work lives entirely on `X`; the 2D composer layer
/// mixes both.
#[derive(
    Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize,
)]
pub enum Coord {
    X,
    Y,
}

impl Coord {
    pub fn name(self) -> &'static str {
        match self {
            Coord::X => "x",
            Coord::Y => "y",
        }
    }
}

/// A single multiplicative factor.
///
/// Ordering gives the canonical collation: parameters first, then space
/// coordinates, then unknown functions (ties by name, coordinate, derivative
/// order), then opaque power nodes.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub enum Atom {
    /// Named scalar parameter (hbar, alpha1, beta, ...). Names starting with
    /// `eps` are involutive signs: even powers normalize away.
    Param(Arc<str>),
    Coord(Coord),
    /// Unknown function of one coordinate with a derivative order.
    Fn {
        id: Arc<str>,
        coord: Coord,
        order: u32,
    },
    /// Opaque `base^e` node where `e` is the rational exponent the atom
    /// carries in its monomial. Used for radicals of non-perfect constants,
    /// radicals of multi-term expressions, and multi-term denominators.
    Pow { base: Box<Expr> },
}

impl Atom {
    pub fn param(name: &str) -> Atom {
        Atom::Param(Arc::from(name))
    }

    pub fn func(id: &str, coord: Coord, order: u32) -> Atom {
        Atom::Fn { id: Arc::from(id), coord, order }
    }
}

/// Sorted factor list with nonzero exponents.
#[derive(
    Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default, Serialize, Deserialize,
)]
pub struct Monomial {
    pub factors: Vec<(Atom, Exp)>,
}

impl Monomial {
    pub fn unit() -> Self {
        Monomial::default()
    }

    pub fn is_unit(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn exponent_of(&self, atom: &Atom) -> Exp {
        self.factors
            .iter()
            .find(|(a, _)| a == atom)
            .map(|(_, e)| *e)
            .unwrap_or_else(|| exp_int(0))
    }
}

/// Canonical multivariate expression: `sum coeff * monomial`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Expr {
    pub(crate) terms: BTreeMap<Monomial, Coeff>,
}

// JSON object keys must be strings, so an expression serializes as a list of
// (monomial, coefficient) pairs in canonical order.
impl Serialize for Expr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.terms.iter())
    }
}

impl<'de> Deserialize<'de> for Expr {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let pairs: Vec<(Monomial, Coeff)> = Vec::deserialize(d)?;
        let mut out = Expr::zero();
        for (m, c) in pairs {
            out = out.add(&normalize_term(c, m.factors));
        }
        Ok(out)
    }
}

impl Expr {
    // ---- constructors ----

    pub fn zero() -> Expr {
        Expr::default()
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn int(n: i64) -> Expr {
        Expr::constant(Coeff::from_int(n))
    }

    pub fn ratio(num: i64, den: i64) -> Expr {
        Expr::constant(Coeff::from_ratio(num, den))
    }

    pub fn imag() -> Expr {
        Expr::constant(Coeff::i())
    }

    pub fn constant(c: Coeff) -> Expr {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::unit(), c);
        }
        Expr { terms }
    }

    pub fn param(name: &str) -> Expr {
        Expr::from_atom(Atom::param(name))
    }

    pub fn coord(c: Coord) -> Expr {
        Expr::from_atom(Atom::Coord(c))
    }

    pub fn x() -> Expr {
        Expr::coord(Coord::X)
    }

    pub fn y() -> Expr {
        Expr::coord(Coord::Y)
    }

    /// `id^(order)` — the `order`-th derivative of unknown function `id`.
    pub fn unknown(id: &str, coord: Coord, order: u32) -> Expr {
        Expr::from_atom(Atom::func(id, coord, order))
    }

    pub fn from_atom(atom: Atom) -> Expr {
        normalize_term(Coeff::one(), vec![(atom, exp_int(1))])
    }

    // ---- predicates / views ----

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Coeff)> {
        self.terms.iter()
    }

    /// `Some(c)` iff the expression is a bare constant (including zero).
    pub fn as_constant(&self) -> Option<Coeff> {
        match self.terms.len() {
            0 => Some(Coeff::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_unit().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn as_single_term(&self) -> Option<(&Monomial, &Coeff)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    /// Largest monomial (canonical order) and its coefficient.
    pub fn leading(&self) -> Option<(&Monomial, &Coeff)> {
        self.terms.iter().next_back()
    }

    pub fn contains_atom(&self, pred: &mut dyn FnMut(&Atom) -> bool) -> bool {
        self.terms.keys().any(|m| {
            m.factors.iter().any(|(a, _)| {
                if pred(a) {
                    return true;
                }
                match a {
                    Atom::Pow { base } => base.contains_atom(pred),
                    _ => false,
                }
            })
        })
    }

    /// Highest derivative order of unknown `id` occurring anywhere, if any.
    pub fn max_fn_order(&self, id: &str, coord: Coord) -> Option<u32> {
        let mut max: Option<u32> = None;
        self.contains_atom(&mut |a| {
            if let Atom::Fn { id: fid, coord: fc, order } = a {
                if fid.as_ref() == id && *fc == coord {
                    max = Some(max.map_or(*order, |m| m.max(*order)));
                }
            }
            false
        });
        max
    }

    /// Rebuild with every atom rewritten by `f` (recursing into opaque power
    /// bases first); the result is renormalized. Used for coordinate swaps
    /// and parameter renamings.
    pub fn map_atoms(&self, f: &mut dyn FnMut(&Atom) -> Atom) -> Expr {
        let mut out = Expr::zero();
        for (m, c) in &self.terms {
            let factors: Vec<(Atom, Exp)> = m
                .factors
                .iter()
                .map(|(a, e)| {
                    let mapped = match a {
                        Atom::Pow { base } => {
                            Atom::Pow { base: Box::new(base.map_atoms(f)) }
                        }
                        other => f(other),
                    };
                    (mapped, *e)
                })
                .collect();
            out = out.add(&normalize_term(c.clone(), factors));
        }
        out
    }

    // ---- arithmetic ----

    pub fn add(&self, rhs: &Expr) -> Expr {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            add_term(&mut out.terms, m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &Expr) -> Expr {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Expr {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (m.clone(), c.clone().neg()))
            .collect();
        Expr { terms }
    }

    pub fn scale(&self, c: &Coeff) -> Expr {
        if c.is_zero() {
            return Expr::zero();
        }
        let terms = self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect();
        Expr { terms }
    }

    pub fn mul(&self, rhs: &Expr) -> Expr {
        let mut out = Expr::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let mut factors = ma.factors.clone();
                factors.extend(mb.factors.iter().cloned());
                let t = normalize_term(ca * cb, factors);
                out = out.add(&t);
            }
        }
        out
    }

    pub fn pow_int(&self, n: i64) -> Expr {
        if n == 0 {
            return Expr::one();
        }
        if n < 0 {
            if let Some((m, c)) = self.as_single_term() {
                let inv_factors: Vec<_> =
                    m.factors.iter().map(|(a, e)| (a.clone(), -e)).collect();
                let base = normalize_term(c.inv(), inv_factors);
                return base.pow_int(-n);
            }
            assert!(!self.is_zero(), "inverse of zero expression");
            // Multi-term denominator: opaque rational-function node.
            return pow_wrap(self.clone(), exp_int(n));
        }
        let mut acc = Expr::one();
        let mut base = self.clone();
        let mut k = n as u64;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// `self^e` for rational `e`. Integer exponents expand; fractional
    /// exponents distribute over single terms and otherwise produce an opaque
    /// power node with a monic base.
    pub fn pow_rat(&self, e: Exp) -> Expr {
        if e.is_integer() {
            return self.pow_int(e.to_integer());
        }
        assert!(!self.is_zero(), "fractional power of zero");
        if let Some((m, c)) = self.as_single_term() {
            let mut factors: Vec<(Atom, Exp)> =
                m.factors.iter().map(|(a, ex)| (a.clone(), ex * e)).collect();
            let coeff = coeff_pow_rat(c, e, &mut factors);
            return normalize_term(coeff, factors);
        }
        // Monic-normalize the base so scalar multiples share one node.
        let (_, clead) = self.leading().unwrap();
        if clead.is_real() && !clead.is_one() {
            let clead = clead.clone();
            let base = self.scale(&clead.inv());
            let mut factors = vec![(Atom::Pow { base: Box::new(base) }, e)];
            let coeff = coeff_pow_rat(&clead, e, &mut factors);
            return normalize_term(coeff, factors);
        }
        pow_wrap(self.clone(), e)
    }

    /// Division by a single-term expression (monomial denominator).
    pub fn div(&self, rhs: &Expr) -> Expr {
        self.mul(&rhs.pow_int(-1))
    }

    pub fn conjugate(&self) -> Expr {
        let mut out = Expr::zero();
        for (m, c) in &self.terms {
            let factors: Vec<(Atom, Exp)> = m
                .factors
                .iter()
                .map(|(a, e)| {
                    let a2 = match a {
                        Atom::Pow { base } => {
                            Atom::Pow { base: Box::new(base.conjugate()) }
                        }
                        other => other.clone(),
                    };
                    (a2, *e)
                })
                .collect();
            out = out.add(&normalize_term(c.conj(), factors));
        }
        out
    }

    // ---- structure queries ----

    /// Split as a polynomial in integer powers of `atom`. Errors (None) if a
    /// fractional power of the atom occurs.
    pub fn as_poly_in(&self, atom: &Atom) -> Option<BTreeMap<i64, Expr>> {
        let mut out: BTreeMap<i64, Expr> = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.exponent_of(atom);
            if !e.is_integer() {
                return None;
            }
            let rest: Vec<(Atom, Exp)> = m
                .factors
                .iter()
                .filter(|(a, _)| a != atom)
                .cloned()
                .collect();
            let part = normalize_term(c.clone(), rest);
            let entry = out.entry(e.to_integer()).or_insert_with(Expr::zero);
            *entry = entry.add(&part);
        }
        out.retain(|_, v| !v.is_zero());
        Some(out)
    }

    /// Group terms by the (integer) power of a named parameter.
    pub fn collect_param(&self, name: &str) -> BTreeMap<Exp, Expr> {
        let atom = Atom::param(name);
        let mut out: BTreeMap<Exp, Expr> = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.exponent_of(&atom);
            let rest: Vec<(Atom, Exp)> = m
                .factors
                .iter()
                .filter(|(a, _)| a != &atom)
                .cloned()
                .collect();
            let part = normalize_term(c.clone(), rest);
            let entry = out.entry(e).or_insert_with(Expr::zero);
            *entry = entry.add(&part);
        }
        out.retain(|_, v| !v.is_zero());
        out
    }

    /// Solve `self == 0` for an atom occurring linearly:
    /// `self = P*atom + Q  =>  atom = -Q/P`. `None` if the atom is absent,
    /// nonlinear, or `P` is not a single term (invertible monomial).
    pub fn solve_linear(&self, atom: &Atom) -> Option<Expr> {
        let poly = self.as_poly_in(atom)?;
        if poly.keys().any(|&k| k < 0 || k > 1) {
            return None;
        }
        let p = poly.get(&1)?;
        let q = poly.get(&0).cloned().unwrap_or_else(Expr::zero);
        if p.as_single_term().is_none() {
            return None;
        }
        Some(q.neg().div(p))
    }

    // ---- numeric evaluation ----

    /// Evaluate with a caller-supplied atom valuation. `Pow` atoms evaluate
    /// their base recursively and apply `powf`/`powc`.
    pub fn eval_complex(
        &self,
        lookup: &mut dyn FnMut(&Atom) -> Option<Complex64>,
    ) -> Option<Complex64> {
        let mut total = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let (re, im) = c.to_f64_pair();
            let mut v = Complex64::new(re, im);
            for (a, e) in &m.factors {
                let ef = (*e.numer() as f64) / (*e.denom() as f64);
                let base = match a {
                    Atom::Pow { base } => base.eval_complex(lookup)?,
                    other => lookup(other)?,
                };
                v *= base.powf(ef);
            }
            total += v;
        }
        Some(total)
    }
}

/// Insert `coeff * mono` into a term map, cancelling zeros.
pub(crate) fn add_term(terms: &mut BTreeMap<Monomial, Coeff>, mono: Monomial, coeff: Coeff) {
    if coeff.is_zero() {
        return;
    }
    match terms.entry(mono) {
        std::collections::btree_map::Entry::Vacant(v) => {
            v.insert(coeff);
        }
        std::collections::btree_map::Entry::Occupied(mut o) => {
            *o.get_mut() += &coeff;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

fn pow_wrap(base: Expr, e: Exp) -> Expr {
    normalize_term(
        Coeff::one(),
        vec![(Atom::Pow { base: Box::new(base) }, e)],
    )
}

/// `c^e` with rational `e`; pushes a constant power node when the root is not
/// exact. Only real coefficients support fractional powers.
fn coeff_pow_rat(c: &Coeff, e: Exp, factors: &mut Vec<(Atom, Exp)>) -> Coeff {
    if c.is_one() {
        return Coeff::one();
    }
    if let Some(r) = c.rational_root(*e.denom()) {
        return r.pow(*e.numer());
    }
    assert!(c.is_real(), "fractional power of a complex coefficient");
    let (mag, neg) = if c.re.is_negative() {
        (Coeff::from_rat(-c.re.clone()), true)
    } else {
        (c.clone(), false)
    };
    let mut out = Coeff::one();
    if neg {
        // (-1)^(a/b): odd b gives a sign, b = 2 gives i^a.
        if e.denom() % 2 == 1 {
            if e.numer() % 2 != 0 {
                out = out.neg();
            }
        } else if *e.denom() == 2 {
            out = &out * &Coeff::i().pow(*e.numer());
        } else {
            panic!("unrepresentable root of a negative constant");
        }
    }
    if !mag.is_one() {
        factors.push((
            Atom::Pow { base: Box::new(Expr::constant(mag)) },
            e,
        ));
    }
    out
}

/// The normalization core: build `coeff * prod factors` in canonical form.
pub fn normalize_term(coeff: Coeff, factors: Vec<(Atom, Exp)>) -> Expr {
    if coeff.is_zero() {
        return Expr::zero();
    }
    // Merge equal atoms.
    let mut merged: BTreeMap<Atom, Exp> = BTreeMap::new();
    for (a, e) in factors {
        let entry = merged.entry(a).or_insert_with(|| exp_int(0));
        *entry += e;
    }
    let mut c = coeff;
    let mut kept: Vec<(Atom, Exp)> = Vec::new();
    let mut pending: Vec<Expr> = Vec::new();
    for (a, mut e) in merged {
        if e.is_zero() {
            continue;
        }
        match &a {
            Atom::Param(name) if name.starts_with("eps") && e.is_integer() => {
                // Involutive sign parameter.
                let k = e.to_integer().rem_euclid(2);
                if k == 1 {
                    kept.push((a.clone(), exp_int(1)));
                }
            }
            Atom::Pow { base } => {
                if e.is_integer() {
                    let n = e.to_integer();
                    if let Some(cc) = base.as_constant() {
                        c *= &cc.pow(n);
                    } else if n > 0 || base.as_single_term().is_some() {
                        pending.push(base.pow_int(n));
                    } else {
                        kept.push((a.clone(), e)); // multi-term denominator
                    }
                } else if let Some(cc) = base.as_constant() {
                    if let Some(r) = cc.rational_root(*e.denom()) {
                        c *= &r.pow(*e.numer());
                    } else {
                        // Canonical range for constant radicals: 0 < e < 1
                        // after folding the integer part into the coefficient.
                        let n = e.floor().to_integer();
                        if n != 0 {
                            c *= &cc.pow(n);
                            e -= exp_int(n);
                        }
                        kept.push((a.clone(), e));
                    }
                } else {
                    kept.push((a.clone(), e));
                }
            }
            _ => kept.push((a.clone(), e)),
        }
        if c.is_zero() {
            return Expr::zero();
    }
    }
    kept.sort();
    let mut out = Expr { terms: BTreeMap::new() };
    out.terms.insert(Monomial { factors: kept }, c);
    for p in pending {
        out = out.mul(&p);
    }
    out
}

impl std::fmt::Debug for Expr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        std::fmt::Display::fmt(self, f)
    }
}
