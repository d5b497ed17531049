//! Reduction of expressions modulo defining ODEs.
//!
//! A [`RewriteRule`] either replaces a derivative `f^(r)` of an unknown by a
//! rational expression in strictly lower derivatives (`Derivative`), or
//! replaces an integer power `(f^(r))^p` by a polynomial (`Power`, used for
//! the Weierstrass first-integral relation). Rational replacements are
//! handled fraction-free: the engine tracks a numerator/denominator pair and
//! never needs general rational-function simplification.

use super::expr::{Atom, Coord, Expr};
use std::collections::HashMap;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReduceError {
    #[error("two rules target {0}^({1}) with different replacements")]
    ConflictingRules(String, u32),
    #[error("equation is not linear in the top derivative {0}^({1})")]
    NotSolvable(String, u32),
    #[error("reduction did not terminate")]
    NonTerminating,
    #[error("fractional power of a reducible derivative")]
    FractionalPower,
    #[error("result has a multi-term denominator: {0}")]
    NonMonomialDenominator(String),
}

/// A replacement for derivatives (or powers of derivatives) of one unknown.
#[derive(Clone, Debug)]
pub enum RewriteRule {
    /// `fn^(order) = num / den`; the replacement contains only strictly lower
    /// derivative orders of the target function.
    Derivative {
        id: Arc<str>,
        coord: Coord,
        order: u32,
        num: Expr,
        den: Expr,
    },
    /// `(fn^(order))^power = num`, e.g. `(wp')^2 = 4 wp^3 - g2 wp - g3`.
    Power {
        id: Arc<str>,
        coord: Coord,
        order: u32,
        power: i64,
        num: Expr,
    },
}

impl RewriteRule {
    /// Solve `eq == 0` for the highest derivative of `id` and build the rule.
    pub fn from_equation(eq: &Expr, id: &str, coord: Coord) -> Result<RewriteRule, ReduceError> {
        let top = eq
            .max_fn_order(id, coord)
            .ok_or_else(|| ReduceError::NotSolvable(id.to_string(), 0))?;
        let atom = Atom::func(id, coord, top);
        let poly = eq
            .as_poly_in(&atom)
            .ok_or(ReduceError::FractionalPower)?;
        if poly.keys().any(|&k| k < 0 || k > 1) {
            return Err(ReduceError::NotSolvable(id.to_string(), top));
        }
        let den = poly
            .get(&1)
            .cloned()
            .ok_or_else(|| ReduceError::NotSolvable(id.to_string(), top))?;
        let num = poly.get(&0).cloned().unwrap_or_else(Expr::zero).neg();
        Ok(RewriteRule::Derivative {
            id: Arc::from(id),
            coord,
            order: top,
            num,
            den,
        })
    }

    pub fn simple(id: &str, coord: Coord, order: u32, replacement: Expr) -> RewriteRule {
        RewriteRule::Derivative {
            id: Arc::from(id),
            coord,
            order,
            num: replacement,
            den: Expr::one(),
        }
    }

    pub fn target(&self) -> (&Arc<str>, Coord, u32) {
        match self {
            RewriteRule::Derivative { id, coord, order, .. }
            | RewriteRule::Power { id, coord, order, .. } => (id, *coord, *order),
        }
    }
}

/// Numerator/denominator pair; no cancellation is attempted beyond folding
/// single-term denominators back into the numerator.
#[derive(Clone, Debug)]
pub struct Frac {
    pub num: Expr,
    pub den: Expr,
}

impl Frac {
    pub fn from_expr(e: Expr) -> Frac {
        Frac { num: e, den: Expr::one() }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Fold into a plain expression when the denominator is invertible.
    pub fn into_expr(self) -> Result<Expr, ReduceError> {
        if self.num.is_zero() {
            Ok(Expr::zero())
        } else if self.den.as_single_term().is_some() {
            Ok(self.num.div(&self.den))
        } else {
            Err(ReduceError::NonMonomialDenominator(format!("{}", self.den)))
        }
    }
}

pub struct ReduceEngine {
    rules: Vec<RewriteRule>,
    /// Derived derivative rules, keyed by (id, coord, order).
    derived: HashMap<(Arc<str>, Coord, u32), (Expr, Expr)>,
}

impl ReduceEngine {
    pub fn new(rules: &[RewriteRule]) -> Result<ReduceEngine, ReduceError> {
        for (i, a) in rules.iter().enumerate() {
            for b in &rules[i + 1..] {
                if a.target() == b.target() && !same_rule(a, b) {
                    let (id, _, order) = a.target();
                    return Err(ReduceError::ConflictingRules(id.to_string(), order));
                }
            }
        }
        let mut derived = HashMap::new();
        for r in rules {
            if let RewriteRule::Derivative { id, coord, order, num, den } = r {
                derived.insert((id.clone(), *coord, *order), (num.clone(), den.clone()));
            }
        }
        Ok(ReduceEngine { rules: rules.to_vec(), derived })
    }

    /// Replacement pair for `id^(k)`, deriving and caching rules above the
    /// base order by differentiating (with re-reduction of the derivative).
    fn derivative_rule(&mut self, id: &Arc<str>, coord: Coord, k: u32) -> Option<(Expr, Expr)> {
        if let Some(p) = self.derived.get(&(id.clone(), coord, k)) {
            return Some(p.clone());
        }
        let base = self.rules.iter().find_map(|r| match r {
            RewriteRule::Derivative { id: rid, coord: rc, order, .. }
                if rid == id && *rc == coord && *order <= k =>
            {
                Some(*order)
            }
            _ => None,
        })?;
        if k == base {
            unreachable!("base rule is pre-seeded");
        }
        let (pnum, pden) = self.derivative_rule(id, coord, k - 1)?;
        // (n/d)' = (n'd - nd')/d^2, then reduce the parts again.
        let num = pnum.diff(coord).mul(&pden).sub(&pnum.mul(&pden.diff(coord)));
        let den = pden.mul(&pden);
        let rn = self.reduce_frac_limited(Frac { num, den }, k);
        self.derived
            .insert((id.clone(), coord, k), (rn.num.clone(), rn.den.clone()));
        Some((rn.num, rn.den))
    }

    /// Reduce, but only touch derivatives of order < `limit` for the rule
    /// currently being derived (avoids infinite recursion).
    fn reduce_frac_limited(&mut self, f: Frac, limit: u32) -> Frac {
        self.reduce_frac_inner(f, Some(limit))
    }

    pub fn reduce_frac(&mut self, e: &Expr) -> Frac {
        self.reduce_frac_inner(Frac::from_expr(e.clone()), None)
    }

    fn reduce_frac_inner(&mut self, mut f: Frac, limit: Option<u32>) -> Frac {
        for _ in 0..10_000 {
            let Some(atom) = self.next_target(&f, limit) else {
                return f;
            };
            f = self.apply_one(f, &atom);
            if f.is_zero() {
                return f;
            }
        }
        panic!("reduction did not terminate");
    }

    /// Highest-order reducible occurrence in num or den.
    fn next_target(&self, f: &Frac, limit: Option<u32>) -> Option<Atom> {
        let mut best: Option<(u32, Atom, i64)> = None;
        let mut scan = |e: &Expr| {
            for (m, _) in e.terms() {
                for (a, ex) in &m.factors {
                    if let Atom::Fn { id, coord, order } = a {
                        if let Some(l) = limit {
                            if *order >= l {
                                continue;
                            }
                        }
                        for r in &self.rules {
                            let (rid, rc, ro) = r.target();
                            if rid != id || rc != *coord {
                                continue;
                            }
                            let hit = match r {
                                RewriteRule::Derivative { .. } => *order >= ro,
                                RewriteRule::Power { power, .. } => {
                                    *order == ro
                                        && ex.is_integer()
                                        && ex.to_integer().abs() >= *power
                                        && ex.to_integer() > 0
                                }
                            };
                            if hit {
                                let key = (*order, a.clone(), ex.to_integer());
                                if best.as_ref().map_or(true, |(o, ba, _)| {
                                    (*order, a) > (*o, ba)
                                }) {
                                    best = Some(key);
                                }
                            }
                        }
                    }
                }
            }
        };
        scan(&f.num);
        scan(&f.den);
        best.map(|(_, a, _)| a)
    }

    fn apply_one(&mut self, f: Frac, atom: &Atom) -> Frac {
        let Atom::Fn { id, coord, order } = atom else { unreachable!() };
        // Prefer a derivative rule; otherwise this is a power-rule target.
        if let Some(power_rule) = self.power_rule_for(id, *coord, *order) {
            // Only applies when no derivative rule covers this order.
            if self
                .rules
                .iter()
                .all(|r| !matches!(r, RewriteRule::Derivative { id: rid, coord: rc, order: ro, .. }
                    if rid == id && rc == coord && *ro <= *order))
            {
                let (p, repl) = power_rule;
                return Frac {
                    num: substitute_power(&f.num, atom, p, &repl),
                    den: substitute_power(&f.den, atom, p, &repl),
                };
            }
        }
        let (rn, rd) = self
            .derivative_rule(id, *coord, *order)
            .expect("target had a matching rule");
        let (n1, d1) = substitute_atom_frac(&f.num, atom, &rn, &rd);
        let (n2, d2) = substitute_atom_frac(&f.den, atom, &rn, &rd);
        Frac { num: n1.mul(&d2), den: d1.mul(&n2) }
    }

    fn power_rule_for(&self, id: &Arc<str>, coord: Coord, order: u32) -> Option<(i64, Expr)> {
        self.rules.iter().find_map(|r| match r {
            RewriteRule::Power { id: rid, coord: rc, order: ro, power, num }
                if rid == id && *rc == coord && *ro == order =>
            {
                Some((*power, num.clone()))
            }
            _ => None,
        })
    }
}

fn same_rule(a: &RewriteRule, b: &RewriteRule) -> bool {
    match (a, b) {
        (
            RewriteRule::Derivative { num: n1, den: d1, .. },
            RewriteRule::Derivative { num: n2, den: d2, .. },
        ) => n1.mul(d2) == n2.mul(d1),
        (
            RewriteRule::Power { power: p1, num: n1, .. },
            RewriteRule::Power { power: p2, num: n2, .. },
        ) => p1 == p2 && n1 == n2,
        _ => false,
    }
}

/// Substitute `atom := rn/rd` into a polynomial-in-`atom` expression,
/// returning a cleared (num, den) pair.
fn substitute_atom_frac(e: &Expr, atom: &Atom, rn: &Expr, rd: &Expr) -> (Expr, Expr) {
    let poly = e
        .as_poly_in(atom)
        .expect("fractional power of a reducible derivative");
    if poly.is_empty() {
        return (Expr::zero(), Expr::one());
    }
    let min = *poly.keys().next().unwrap();
    let max = *poly.keys().next_back().unwrap();
    if min == 0 && max == 0 {
        return (e.clone(), Expr::one());
    }
    let lo = min.min(0);
    let hi = max.max(0);
    // e = (1/(rn^-lo * rd^hi)) * sum_j c_j rn^(j-lo) rd^(hi-j)
    let mut num = Expr::zero();
    for (j, c) in &poly {
        let t = c.mul(&rn.pow_int(j - lo)).mul(&rd.pow_int(hi - j));
        num = num.add(&t);
    }
    let den = rn.pow_int(-lo).mul(&rd.pow_int(hi));
    (num, den)
}

/// Replace `(atom)^p` by `repl` wherever the exponent allows, leaving the
/// residual power `e mod p` in place.
fn substitute_power(e: &Expr, atom: &Atom, p: i64, repl: &Expr) -> Expr {
    let poly = e.as_poly_in(atom).expect("fractional power in power rule");
    let mut out = Expr::zero();
    for (j, c) in &poly {
        if *j >= p {
            let q = j.div_euclid(p);
            let s = j.rem_euclid(p);
            let a = if s == 0 {
                Expr::one()
            } else {
                Expr::from_atom(atom.clone()).pow_int(s)
            };
            out = out.add(&c.mul(&repl.pow_int(q)).mul(&a));
        } else {
            let a = if *j == 0 {
                Expr::one()
            } else {
                Expr::from_atom(atom.clone()).pow_int(*j)
            };
            out = out.add(&c.mul(&a));
        }
    }
    out
}

/// Reduce and fold back into an expression; errors if the fully reduced form
/// needs a multi-term denominator.
pub fn reduce_mod(e: &Expr, rules: &[RewriteRule]) -> Result<Expr, ReduceError> {
    let mut engine = ReduceEngine::new(rules)?;
    engine.reduce_frac(e).into_expr()
}

/// Reduce and report whether the result is identically zero. Works for
/// rational replacements without requiring an invertible denominator.
pub fn reduces_to_zero(e: &Expr, rules: &[RewriteRule]) -> Result<bool, ReduceError> {
    let mut engine = ReduceEngine::new(rules)?;
    Ok(engine.reduce_frac(e).is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symkernel::{Coeff, Coord::X};

    fn v(order: u32) -> Expr {
        Expr::unknown("V", X, order)
    }

    fn painleve1_rule() -> RewriteRule {
        // V'' = 6V^2/hbar^2 + 4 i alpha1 x / hbar^3
        let h = Expr::param("hbar");
        let repl = v(0)
            .pow_int(2)
            .scale(&Coeff::from_int(6))
            .div(&h.pow_int(2))
            .add(
                &Expr::imag()
                    .mul(&Expr::param("alpha1"))
                    .mul(&Expr::x())
                    .scale(&Coeff::from_int(4))
                    .div(&h.pow_int(3)),
            );
        RewriteRule::simple("V", X, 2, repl)
    }

    #[test]
    fn reduce_at_base_order() {
        let r = painleve1_rule();
        let RewriteRule::Derivative { num, .. } = &r else { unreachable!() };
        let got = reduce_mod(&v(2), &[r.clone()]).unwrap();
        assert_eq!(&got, num);
    }

    #[test]
    fn reduce_derived_order() {
        // V''' mod (V'' = 6V^2/h^2 + 4 i a x/h^3) = 12 V V'/h^2 + 4 i a/h^3
        let r = painleve1_rule();
        let h = Expr::param("hbar");
        let want = v(0)
            .mul(&v(1))
            .scale(&Coeff::from_int(12))
            .div(&h.pow_int(2))
            .add(
                &Expr::imag()
                    .mul(&Expr::param("alpha1"))
                    .scale(&Coeff::from_int(4))
                    .div(&h.pow_int(3)),
            );
        assert_eq!(reduce_mod(&v(3), &[r]).unwrap(), want);
    }

    #[test]
    fn no_target_is_identity() {
        let r = painleve1_rule();
        assert_eq!(reduce_mod(&v(0), &[r]).unwrap(), v(0));
    }

    #[test]
    fn conflicting_rules_rejected() {
        let a = RewriteRule::simple("V", X, 2, v(0));
        let b = RewriteRule::simple("V", X, 2, v(1));
        assert!(ReduceEngine::new(&[a, b]).is_err());
    }

    #[test]
    fn rational_rule_zero_check() {
        // Rule (3V - a x/2) V' = a V, residual (3V - a x/2) V' - a V reduces to 0.
        let a = Expr::param("alpha1");
        let lhs_coeff = v(0)
            .scale(&Coeff::from_int(3))
            .sub(&a.mul(&Expr::x()).scale(&Coeff::from_ratio(1, 2)));
        let eq = lhs_coeff.mul(&v(1)).sub(&a.mul(&v(0)));
        let rule = RewriteRule::from_equation(&eq, "V", X).unwrap();
        assert!(reduces_to_zero(&eq, &[rule.clone()]).unwrap());
        // And the derivative of the defining equation also reduces to zero.
        assert!(reduces_to_zero(&eq.diff(X), &[rule]).unwrap());
    }

    #[test]
    fn weierstrass_power_rule() {
        // wp'' = 6 wp^2 - g2/2 ; (wp')^2 = 4wp^3 - g2 wp - g3.
        // Check d/dx[(wp')^2] - 2 wp' wp'' reduces to zero.
        let wp = |k| Expr::unknown("wp", X, k);
        let g2 = Expr::param("g2");
        let g3 = Expr::param("g3");
        let d2 = wp(0)
            .pow_int(2)
            .scale(&Coeff::from_int(6))
            .sub(&g2.scale(&Coeff::from_ratio(1, 2)));
        let sq = wp(0)
            .pow_int(3)
            .scale(&Coeff::from_int(4))
            .sub(&g2.mul(&wp(0)))
            .sub(&g3);
        let rules = [
            RewriteRule::simple("wp", X, 2, d2),
            RewriteRule::Power {
                id: "wp".into(),
                coord: X,
                order: 1,
                power: 2,
                num: sq.clone(),
            },
        ];
        let e = sq.diff(X).sub(
            &wp(1).mul(&wp(2)).scale(&Coeff::from_int(2)),
        );
        assert!(reduces_to_zero(&e, &rules).unwrap());
    }
}
