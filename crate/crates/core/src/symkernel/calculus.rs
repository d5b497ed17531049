//! Differentiation, substitution, and quadrature on canonical expressions.

use num_traits::Zero;
use super::coeff::{Coeff, Rat};
use super::expr::{exp_int, normalize_term, Atom, Coord, Exp, Expr};
use std::collections::HashMap;
use std::sync::Arc;
use thiserror::Error;

impl Expr {
    /// d/d`coord`, with Leibniz and chain rules. Unknown-function derivative
    /// orders increment; functions of the other coordinate are constants.
    pub fn diff(&self, coord: Coord) -> Expr {
        let mut out = Expr::zero();
        for (m, c) in self.terms() {
            for idx in 0..m.factors.len() {
                let (atom, e) = &m.factors[idx];
                let datom = atom_derivative(atom, coord);
                if datom.is_zero() {
                    continue;
                }
                // c * e * atom^(e-1) * datom * (other factors)
                let mut rest: Vec<(Atom, Exp)> = Vec::with_capacity(m.factors.len());
                for (j, f) in m.factors.iter().enumerate() {
                    if j != idx {
                        rest.push(f.clone());
                    }
                }
                let scaled = Coeff::from_rat(Rat::new(
                    (*e.numer()).into(),
                    (*e.denom()).into(),
                ));
                let mut piece = normalize_term(&scaled * c, rest);
                piece = piece.mul(&atom_pow(atom, e - exp_int(1)));
                piece = piece.mul(&datom);
                out = out.add(&piece);
            }
        }
        out
    }

    pub fn diff_n(&self, coord: Coord, n: u32) -> Expr {
        let mut e = self.clone();
        for _ in 0..n {
            e = e.diff(coord);
        }
        e
    }

    /// Simultaneous substitution followed by normalization (normalization is
    /// implicit in the representation).
    pub fn substitute(&self, binds: &Bindings) -> Expr {
        let mut out = Expr::zero();
        for (m, c) in self.terms() {
            let mut term = Expr::constant(c.clone());
            for (a, e) in &m.factors {
                let replaced = substitute_atom(a, binds);
                term = term.mul(&replaced.pow_rat(*e));
            }
            out = out.add(&term);
        }
        out
    }
}

fn atom_derivative(atom: &Atom, coord: Coord) -> Expr {
    match atom {
        Atom::Param(_) => Expr::zero(),
        Atom::Coord(c) => {
            if *c == coord {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Atom::Fn { id, coord: fc, order } => {
            if *fc == coord {
                Expr::unknown(id, *fc, order + 1)
            } else {
                Expr::zero()
            }
        }
        Atom::Pow { base } => base.diff(coord),
    }
}

/// `atom^e` as an expression.
fn atom_pow(atom: &Atom, e: Exp) -> Expr {
    if e.is_zero() {
        return Expr::one();
    }
    match atom {
        Atom::Pow { base } => base.pow_rat(e),
        other => normalize_term(Coeff::one(), vec![(other.clone(), e)]),
    }
}

fn substitute_atom(atom: &Atom, binds: &Bindings) -> Expr {
    match atom {
        Atom::Param(name) => binds
            .params
            .get(name.as_ref())
            .cloned()
            .unwrap_or_else(|| Expr::from_atom(atom.clone())),
        Atom::Coord(_) => Expr::from_atom(atom.clone()),
        Atom::Fn { id, coord, order } => {
            if let Some(repl) = binds.fns.get(&(id.clone(), *coord)) {
                repl.substitute(binds_without_fn(binds, id, *coord).as_ref().unwrap_or(binds))
                    .diff_n(*coord, *order)
            } else {
                Expr::from_atom(atom.clone())
            }
        }
        Atom::Pow { base } => {
            // Exponent 1 here; caller raises to the monomial exponent.
            base.substitute(binds)
        }
    }
}

/// Avoid re-substituting an unknown into its own replacement.
fn binds_without_fn(binds: &Bindings, id: &Arc<str>, coord: Coord) -> Option<Bindings> {
    if binds.fns.len() == 1 && binds.params.is_empty() {
        return Some(Bindings::new());
    }
    let mut b = binds.clone();
    b.fns.remove(&(id.clone(), coord));
    Some(b)
}

/// Substitution map: parameters to expressions and unknown functions to
/// expressions (derivatives of an occurrence become derivatives of the
/// replacement).
#[derive(Clone, Default)]
pub struct Bindings {
    pub params: HashMap<String, Expr>,
    pub fns: HashMap<(Arc<str>, Coord), Expr>,
}

impl Bindings {
    pub fn new() -> Self {
        Bindings::default()
    }

    pub fn param(mut self, name: &str, e: Expr) -> Self {
        self.params.insert(name.to_string(), e);
        self
    }

    pub fn func(mut self, id: &str, coord: Coord, e: Expr) -> Self {
        self.fns.insert((Arc::from(id), coord), e);
        self
    }
}

#[derive(Debug, Error)]
pub enum QuadratureError {
    #[error("no elementary antiderivative in the working language: stuck on {0}")]
    NotClosed(String),
    #[error("quadrature did not terminate")]
    NonTerminating,
}

/// Antiderivative of a differential polynomial in `coord`.
///
/// Handles powers of the coordinate, terms whose highest-order unknown factor
/// appears to the first power (greedy exactness reduction), and the bare
/// unknown `id` itself when an antiderivative symbol is registered for it
/// (the `u = int V dx` convention). Anything else reports `NotClosed`.
pub fn integrate(
    expr: &Expr,
    coord: Coord,
    antiderivatives: &HashMap<String, String>,
) -> Result<Expr, QuadratureError> {
    let mut rem = expr.clone();
    let mut out = Expr::zero();
    let mut steps = 0usize;
    while !rem.is_zero() {
        steps += 1;
        if steps > 20_000 {
            return Err(QuadratureError::NonTerminating);
        }
        let (mono, coeff) = pick_term(&rem, coord);
        let piece = integrate_term(&mono, &coeff, coord, antiderivatives)
            .ok_or_else(|| {
                QuadratureError::NotClosed(format!(
                    "{}",
                    normalize_term(coeff.clone(), mono.factors.clone())
                ))
            })?;
        let check = lower_antiderivatives(&piece.diff(coord), coord, antiderivatives);
        out = out.add(&piece);
        rem = rem.sub(&check);
    }
    Ok(out)
}

/// Rewrite derivatives of antiderivative symbols back to the functions they
/// integrate: for a registered pair `u = int V`, `u^(k)` with `k >= 1` becomes
/// `V^(k-1)`.
fn lower_antiderivatives(
    e: &Expr,
    coord: Coord,
    antiderivatives: &HashMap<String, String>,
) -> Expr {
    let inverse: HashMap<&str, &str> = antiderivatives
        .iter()
        .map(|(orig, anti)| (anti.as_str(), orig.as_str()))
        .collect();
    if inverse.is_empty() {
        return e.clone();
    }
    let mut out = Expr::zero();
    for (m, c) in e.terms() {
        let factors: Vec<(Atom, Exp)> = m
            .factors
            .iter()
            .map(|(a, ex)| {
                if let Atom::Fn { id, coord: fc, order } = a {
                    if *fc == coord && *order >= 1 {
                        if let Some(orig) = inverse.get(id.as_ref()) {
                            return (Atom::func(orig, coord, order - 1), *ex);
                        }
                    }
                }
                (a.clone(), *ex)
            })
            .collect();
        out = out.add(&normalize_term(c.clone(), factors));
    }
    out
}

/// Highest-ranked term: maximal top derivative order, then total unknown
/// degree, then canonical monomial order.
fn pick_term(e: &Expr, coord: Coord) -> (super::expr::Monomial, Coeff) {
    let rank = |m: &super::expr::Monomial| {
        let mut top = -1i64;
        let mut deg = Exp::from_integer(0);
        for (a, ex) in &m.factors {
            if let Atom::Fn { coord: fc, order, .. } = a {
                if *fc == coord {
                    top = top.max(*order as i64);
                    deg += *ex;
                }
            }
        }
        (top, deg, m.clone())
    };
    let (m, c) = e
        .terms()
        .max_by(|(ma, _), (mb, _)| rank(ma).cmp(&rank(mb)))
        .expect("nonempty");
    (m.clone(), c.clone())
}

fn integrate_term(
    mono: &super::expr::Monomial,
    coeff: &Coeff,
    coord: Coord,
    antiderivatives: &HashMap<String, String>,
) -> Option<Expr> {
    // Split the monomial into unknown-function factors (this coordinate) and
    // the rest (x powers, parameters, functions of the other coordinate).
    let mut fns: Vec<(Arc<str>, u32, Exp)> = Vec::new();
    let mut rest: Vec<(Atom, Exp)> = Vec::new();
    let mut x_exp = Exp::from_integer(0);
    for (a, e) in &mono.factors {
        match a {
            Atom::Fn { id, coord: fc, order } if *fc == coord => {
                fns.push((id.clone(), *order, *e));
            }
            Atom::Coord(c) if *c == coord => x_exp = *e,
            other => rest.push((other.clone(), *e)),
        }
    }
    if fns.is_empty() {
        // c * x^a with a != -1.
        if !x_exp.is_integer() && x_exp == Exp::new(-1, 1) {
            return None;
        }
        if x_exp == Exp::new(-1, 1) {
            return None;
        }
        let new_exp = x_exp + exp_int(1);
        let inv = Coeff::from_rat(Rat::new(
            (*new_exp.denom()).into(),
            (*new_exp.numer()).into(),
        ));
        let mut factors = rest;
        factors.push((Atom::Coord(coord), new_exp));
        return Some(normalize_term(coeff * &inv, factors));
    }
    // Highest derivative order present.
    let (id, k, e_top) = fns
        .iter()
        .max_by_key(|(_, order, _)| *order)
        .cloned()
        .unwrap();
    if !e_top.is_integer() {
        return None;
    }
    let p = e_top.to_integer();
    if k == 0 {
        // Bare unknown to the first power, no x factor: u-convention.
        if p == 1 && fns.len() == 1 && x_exp.is_zero() {
            let anti = antiderivatives.get(id.as_ref())?;
            let mut factors = rest;
            factors.push((Atom::func(anti, coord, 0), exp_int(1)));
            return Some(normalize_term(coeff.clone(), factors));
        }
        return None;
    }
    if p != 1 {
        // A top derivative with multiplicity >= 2 cannot head an exact term.
        return None;
    }
    // Candidate primitive: decrement the top derivative by one; scale by the
    // resulting multiplicity of the decremented factor.
    let mut factors: Vec<(Atom, Exp)> = rest;
    if !x_exp.is_zero() {
        factors.push((Atom::Coord(coord), x_exp));
    }
    let mut mult = Exp::from_integer(1);
    for (fid, order, e) in &fns {
        if fid == &id && *order == k {
            continue;
        }
        if fid == &id && *order == k - 1 {
            mult += *e;
        }
        factors.push((Atom::func(fid, coord, *order), *e));
    }
    if !mult.is_integer() {
        return None;
    }
    factors.push((Atom::func(&id, coord, k - 1), exp_int(1)));
    let scale = Coeff::from_rat(Rat::new(
        (*mult.denom()).into(),
        (*mult.numer()).into(),
    ));
    Some(normalize_term(coeff * &scale, factors))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symkernel::Coord::X;

    fn v(order: u32) -> Expr {
        Expr::unknown("V", X, order)
    }

    #[test]
    fn leibniz_on_square() {
        // d(V^2) = 2 V V'
        let got = v(0).pow_int(2).diff(X);
        let want = v(0).mul(&v(1)).scale(&Coeff::from_int(2));
        assert_eq!(got, want);
    }

    #[test]
    fn product_rule_with_x() {
        // d(x*f3) = f3 + x*f3'
        let f3 = Expr::unknown("f3", X, 0);
        let got = Expr::x().mul(&f3).diff(X);
        let want = f3.add(&Expr::x().mul(&Expr::unknown("f3", X, 1)));
        assert_eq!(got, want);
    }

    #[test]
    fn power_rule_negative() {
        // d(beta/x^2) = -2 beta / x^3
        let e = Expr::param("beta").div(&Expr::x().pow_int(2));
        let want = Expr::param("beta")
            .div(&Expr::x().pow_int(3))
            .scale(&Coeff::from_int(-2));
        assert_eq!(e.diff(X), want);
    }

    #[test]
    fn radical_derivative() {
        // d sqrt(x) = 1/2 x^(-1/2); check by squaring relation 2 s s' = 1
        let s = Expr::x().pow_rat(Exp::new(1, 2));
        let sp = s.diff(X);
        assert_eq!(s.mul(&sp).scale(&Coeff::from_int(2)), Expr::one());
    }

    #[test]
    fn substitute_linear_potential() {
        // V -> alpha1*x/(i*hbar) in i*hbar*V'  gives alpha1
        let ih = Expr::imag().mul(&Expr::param("hbar"));
        let e = ih.mul(&v(1));
        let b = Bindings::new().func("V", X, Expr::param("alpha1").mul(&Expr::x()).div(&ih));
        assert_eq!(e.substitute(&b), Expr::param("alpha1"));
    }

    #[test]
    fn substitute_constant_kills_derivatives() {
        // V -> c in 2VV'' - V'^2 - 8V^3  gives -8c^3
        let e = v(0)
            .mul(&v(2))
            .scale(&Coeff::from_int(2))
            .sub(&v(1).pow_int(2))
            .sub(&v(0).pow_int(3).scale(&Coeff::from_int(8)));
        let b = Bindings::new().func("V", X, Expr::param("c"));
        assert_eq!(
            e.substitute(&b),
            Expr::param("c").pow_int(3).scale(&Coeff::from_int(-8))
        );
    }

    #[test]
    fn quadrature_basic() {
        let anti = HashMap::new();
        // int 3x^2 = x^3
        let got = integrate(&Expr::x().pow_int(2).scale(&Coeff::from_int(3)), X, &anti).unwrap();
        assert_eq!(got, Expr::x().pow_int(3));
        // int V'' = V'
        assert_eq!(integrate(&v(2), X, &anti).unwrap(), v(1));
        // int 2 V V' = V^2
        let got = integrate(&v(0).mul(&v(1)).scale(&Coeff::from_int(2)), X, &anti).unwrap();
        assert_eq!(got, v(0).pow_int(2));
        // int x V'' = x V' - V
        let got = integrate(&Expr::x().mul(&v(2)), X, &anti).unwrap();
        assert_eq!(got, Expr::x().mul(&v(1)).sub(&v(0)));
    }

    #[test]
    fn quadrature_u_convention() {
        let mut anti = HashMap::new();
        anti.insert("V".to_string(), "u".to_string());
        // int (x V' + 2V) = x V + u
        let e = Expr::x().mul(&v(1)).add(&v(0).scale(&Coeff::from_int(2)));
        let got = integrate(&e, X, &anti).unwrap();
        let want = Expr::x().mul(&v(0)).add(&Expr::unknown("u", X, 0));
        assert_eq!(got, want);
    }

    #[test]
    fn quadrature_failure() {
        let anti = HashMap::new();
        // int V'^2 has no differential-polynomial antiderivative
        assert!(integrate(&v(1).pow_int(2), X, &anti).is_err());
        // int V without a registered antiderivative fails
        assert!(integrate(&v(0), X, &anti).is_err());
    }
}
