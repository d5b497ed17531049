//! Singularity analysis of single-unknown polynomial ODEs: dominant balance,
//! resonance (indicial) polynomial, and compatibility checks on a truncated
//! Laurent expansion around a movable pole at generic x0.

use crate::symkernel::{Atom, Coeff, Coord, Expr};
use num_traits::Signed;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PainleveError {
    #[error("equation is not polynomial in the unknown and its derivatives: {0}")]
    NotPolynomial(String),
    #[error("no negative-integer leading exponent balances the equation")]
    NoNegativeBalance,
    #[error("cannot solve the leading-coefficient equation: {0}")]
    LeadingCoefficientUnsolved(String),
}

/// A single-unknown ODE `expr = 0`, polynomial in the unknown and its
/// x-derivatives with polynomial-in-x coefficients.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OdePoly {
    pub unknown: String,
    pub order: u32,
    pub expr: Expr,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Verdict {
    Passes,
    PassesWithConstraints,
    Fails,
    Inapplicable,
}

/// One (p, d0) branch of the analysis.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BranchReport {
    /// Leading exponent of the Laurent series.
    pub p: i64,
    /// Leading coefficient.
    pub d0: Expr,
    /// Integer roots of the indicial polynomial, with multiplicity,
    /// including r = -1 when it is a root.
    pub resonances: Vec<i64>,
    /// Degree of the indicial polynomial.
    pub indicial_degree: u32,
    /// All indicial roots are integers.
    pub all_integer: bool,
    /// Nonvanishing compatibility conditions found at resonances (each must
    /// be zero for the expansion to carry arbitrary constants there).
    pub constraints: Vec<Expr>,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BalanceReport {
    pub branches: Vec<BranchReport>,
    pub verdict: Verdict,
}

/// One monomial of the ODE, split into derivative factors of the unknown, the
/// power of x, and the parameter/constant multiplier.
struct TermInfo {
    rest: Expr,
    xexp: i64,
    /// (derivative order, positive integer exponent)
    ufacs: Vec<(u32, i64)>,
}

impl TermInfo {
    /// Leading t-exponent for `u ~ t^p` (x-part contributes x0^n at leading).
    fn level(&self, p: i64) -> i64 {
        self.ufacs.iter().map(|&(j, e)| e * (p - j as i64)).sum()
    }

    fn udeg(&self) -> i64 {
        self.ufacs.iter().map(|&(_, e)| e).sum()
    }
}

impl OdePoly {
    pub fn new(unknown: &str, expr: Expr) -> Result<OdePoly, PainleveError> {
        let order = expr
            .max_fn_order(unknown, Coord::X)
            .ok_or_else(|| PainleveError::NotPolynomial("unknown does not occur".into()))?;
        if order == 0 {
            return Err(PainleveError::NotPolynomial(
                "no derivative of the unknown occurs".into(),
            ));
        }
        let ode = OdePoly { unknown: unknown.to_string(), order, expr };
        ode.split()?; // validate
        Ok(ode)
    }

    fn split(&self) -> Result<Vec<TermInfo>, PainleveError> {
        let mut out = Vec::new();
        for (mono, c) in self.expr.terms() {
            let mut rest_factors = Vec::new();
            let mut xexp = 0i64;
            let mut ufacs = Vec::new();
            for (a, e) in &mono.factors {
                match a {
                    Atom::Param(_) => rest_factors.push((a.clone(), *e)),
                    Atom::Coord(Coord::X) => {
                        if !e.is_integer() {
                            return Err(PainleveError::NotPolynomial(format!(
                                "fractional power of x in {mono:?}"
                            )));
                        }
                        xexp = e.to_integer();
                    }
                    Atom::Fn { id, coord, order } if id.as_ref() == self.unknown => {
                        if *coord != Coord::X || !e.is_integer() || *e < num_rational::Ratio::from_integer(1)
                        {
                            return Err(PainleveError::NotPolynomial(format!(
                                "bad occurrence of {} in {mono:?}",
                                self.unknown
                            )));
                        }
                        ufacs.push((*order, e.to_integer()));
                    }
                    other => {
                        return Err(PainleveError::NotPolynomial(format!(
                            "unsupported factor {other:?}"
                        )))
                    }
                }
            }
            out.push(TermInfo {
                rest: crate::symkernel::normalize_term(c.clone(), rest_factors),
                xexp,
                ufacs,
            });
        }
        Ok(out)
    }

    /// Degree in the highest derivative; > 1 means the solved form is
    /// multivalued and the expansion test does not apply directly.
    fn top_degree(&self) -> i64 {
        let top = Atom::func(&self.unknown, Coord::X, self.order);
        self.expr
            .as_poly_in(&top)
            .and_then(|p| p.keys().max().copied())
            .unwrap_or(0)
    }
}

/// Falling factorial a (a-1) ... (a-j+1) as an exact scalar.
fn ff(a: i64, j: u32) -> Coeff {
    let mut acc = Coeff::one();
    for t in 0..j as i64 {
        acc = &acc * &Coeff::from_int(a - t);
    }
    acc
}

/// Falling factorial of (p + r) with symbolic r.
fn ff_sym(p: i64, j: u32) -> Expr {
    let mut acc = Expr::one();
    for t in 0..j as i64 {
        acc = acc.mul(&Expr::param("r").add(&Expr::int(p - t)));
    }
    acc
}

/// Generalized binomial C(n, k) for integer n (possibly negative).
fn gbinom(n: i64, k: u32) -> Coeff {
    let mut fact = Coeff::one();
    for t in 1..=k as i64 {
        fact = &fact * &Coeff::from_int(t);
    }
    &ff(n, k) * &fact.inv()
}

fn x0() -> Expr {
    Expr::param("x0")
}

/// All negative leading exponents p with a two-or-more-term dominant balance,
/// each with the nonzero leading-coefficient solutions.
pub fn dominant_balance(ode: &OdePoly) -> Result<Vec<(i64, Vec<Expr>)>, PainleveError> {
    let terms = ode.split()?;
    let mut out = Vec::new();
    for p in (-(ode.order as i64) - 2..=-1).rev() {
        let levels: Vec<i64> = terms.iter().map(|t| t.level(p)).collect();
        let lmin = *levels.iter().min().unwrap();
        let dom: Vec<usize> = (0..terms.len()).filter(|&i| levels[i] == lmin).collect();
        if dom.len() < 2 || lmin >= 0 {
            continue;
        }
        // Leading-coefficient equation as a polynomial in d0.
        let mut poly: BTreeMap<i64, Expr> = BTreeMap::new();
        for &i in &dom {
            let t = &terms[i];
            let mut c = t.rest.mul(&x0().pow_int(t.xexp));
            for &(j, e) in &t.ufacs {
                c = c.scale(&ff(p, j).pow(e));
            }
            let entry = poly.entry(t.udeg()).or_insert_with(Expr::zero);
            *entry = entry.add(&c);
        }
        poly.retain(|_, v| !v.is_zero());
        if poly.len() < 2 {
            continue; // cancellation: no equation for d0
        }
        let roots = solve_poly(&poly)?;
        let roots: Vec<Expr> = roots.into_iter().filter(|r| !r.is_zero()).collect();
        if !roots.is_empty() {
            out.push((p, roots));
        }
    }
    if out.is_empty() {
        return Err(PainleveError::NoNegativeBalance);
    }
    Ok(out)
}

/// Indicial polynomial in the symbolic parameter `r` for branch (p, d0),
/// built from the dominant-balance terms only.
fn indicial(terms: &[TermInfo], p: i64, d0: &Expr) -> Expr {
    let levels: Vec<i64> = terms.iter().map(|t| t.level(p)).collect();
    let lmin = *levels.iter().min().unwrap();
    let mut q = Expr::zero();
    for (i, t) in terms.iter().enumerate() {
        if levels[i] != lmin || t.ufacs.is_empty() {
            continue;
        }
        let base = t.rest.mul(&x0().pow_int(t.xexp)).mul(&d0.pow_int(t.udeg() - 1));
        for (which, &(j, e)) in t.ufacs.iter().enumerate() {
            // Replace one factor's falling factorial by the perturbed one.
            let mut c = Expr::int(e).scale(&ff(p, j).pow(e - 1));
            for (other, &(j2, e2)) in t.ufacs.iter().enumerate() {
                if other != which {
                    c = c.scale(&ff(p, j2).pow(e2));
                }
            }
            q = q.add(&base.mul(&c).mul(&ff_sym(p, j)));
        }
    }
    q
}

/// Integer roots (with multiplicity) of the indicial polynomial, plus its
/// degree and whether deflation exhausted it.
pub fn resonances(ode: &OdePoly, p: i64, d0: &Expr) -> Result<(Vec<i64>, u32, bool), PainleveError> {
    let terms = ode.split()?;
    let q = indicial(&terms, p, d0);
    let grouped = q.collect_param("r");
    let degree = grouped
        .keys()
        .max()
        .map(|e| e.to_integer())
        .unwrap_or(0);
    // Descending coefficient list.
    let mut coeffs: Vec<Expr> = (0..=degree)
        .rev()
        .map(|k| {
            grouped
                .get(&num_rational::Ratio::from_integer(k))
                .cloned()
                .unwrap_or_else(Expr::zero)
        })
        .collect();
    let mut roots = Vec::new();
    'outer: while coeffs.len() > 1 {
        let lo = -2 * ode.order as i64 - 4;
        for k in lo..=40 {
            if eval_desc(&coeffs, k).is_zero() {
                roots.push(k);
                coeffs = deflate_desc(&coeffs, k);
                continue 'outer;
            }
        }
        break;
    }
    roots.sort_unstable();
    Ok((roots, degree as u32, coeffs.len() == 1))
}

fn eval_desc(coeffs: &[Expr], k: i64) -> Expr {
    let mut acc = Expr::zero();
    for c in coeffs {
        acc = acc.scale(&Coeff::from_int(k)).add(c);
    }
    acc
}

fn deflate_desc(coeffs: &[Expr], k: i64) -> Vec<Expr> {
    let mut out = Vec::with_capacity(coeffs.len() - 1);
    let mut b = Expr::zero();
    for c in &coeffs[..coeffs.len() - 1] {
        b = b.scale(&Coeff::from_int(k)).add(c);
        out.push(b.clone());
    }
    out
}

/// Roots of a polynomial (exponent -> coefficient) in one abstract variable;
/// the zero root (common power) is stripped first. Degrees one and two are
/// solved in closed form; higher degrees by monomial-candidate trial plus
/// exact deflation.
fn solve_poly(poly: &BTreeMap<i64, Expr>) -> Result<Vec<Expr>, PainleveError> {
    let min = *poly.keys().next().unwrap();
    let max = *poly.keys().next_back().unwrap();
    let mut coeffs: Vec<Expr> = (min..=max)
        .map(|k| poly.get(&k).cloned().unwrap_or_else(Expr::zero))
        .collect(); // ascending, constant term nonzero
    let mut roots = Vec::new();
    loop {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        let deg = coeffs.len().saturating_sub(1);
        match deg {
            0 => return Ok(roots),
            1 => {
                if coeffs[1].as_single_term().is_none() {
                    return Err(PainleveError::LeadingCoefficientUnsolved(format!(
                        "non-monomial linear coefficient {}",
                        coeffs[1]
                    )));
                }
                roots.push(coeffs[0].neg().div(&coeffs[1]));
                return Ok(roots);
            }
            2 => {
                let (c0, c1, c2) = (&coeffs[0], &coeffs[1], &coeffs[2]);
                if c2.as_single_term().is_none() {
                    return Err(PainleveError::LeadingCoefficientUnsolved(format!(
                        "non-monomial quadratic coefficient {c2}"
                    )));
                }
                let disc = c1.mul(c1).sub(&c0.mul(c2).scale(&Coeff::from_int(4)));
                let two_c2 = c2.scale(&Coeff::from_int(2));
                if disc.is_zero() {
                    roots.push(c1.neg().div(&two_c2));
                } else {
                    let sq = disc.pow_rat(num_rational::Ratio::new(1, 2));
                    roots.push(c1.neg().add(&sq).div(&two_c2));
                    roots.push(c1.neg().sub(&sq).div(&two_c2));
                }
                return Ok(roots);
            }
            _ => {
                let Some(root) = find_monomial_root(&coeffs) else {
                    return Err(PainleveError::LeadingCoefficientUnsolved(format!(
                        "degree {deg} with no monomial root"
                    )));
                };
                coeffs = deflate_ascending(&coeffs, &root);
                roots.push(root);
            }
        }
    }
}

fn eval_at(coeffs: &[Expr], r: &Expr) -> Expr {
    let mut acc = Expr::zero();
    for c in coeffs.iter().rev() {
        acc = acc.mul(r).add(c);
    }
    acc
}

fn deflate_ascending(coeffs: &[Expr], r: &Expr) -> Vec<Expr> {
    // Divide by (v - r): descending synthetic division, then flip back.
    let desc: Vec<Expr> = coeffs.iter().rev().cloned().collect();
    let mut out = Vec::with_capacity(desc.len() - 1);
    let mut b = Expr::zero();
    for c in &desc[..desc.len() - 1] {
        b = b.mul(r).add(c);
        out.push(b.clone());
    }
    out.reverse();
    out
}

/// Candidate roots of the form +-(c_i/c_j)^(1/(j-i)) for monomial coefficient
/// ratios, validated by substitution.
fn find_monomial_root(coeffs: &[Expr]) -> Option<Expr> {
    for (i, ci) in coeffs.iter().enumerate() {
        if ci.is_zero() {
            continue;
        }
        for (j, cj) in coeffs.iter().enumerate().skip(i + 1) {
            if cj.is_zero() || cj.as_single_term().is_none() {
                continue;
            }
            let ratio = ci.div(cj);
            if ratio.as_single_term().is_none() {
                continue;
            }
            let k = (j - i) as i64;
            for base in [ratio.neg(), ratio] {
                // Skip bases whose k-th root the kernel cannot represent.
                if k > 1 {
                    let Some((_, c)) = base.as_single_term() else { continue };
                    if !c.is_real() || (k % 2 == 0 && k != 2 && c.re.is_negative()) {
                        continue;
                    }
                }
                let cand = base.pow_rat(num_rational::Ratio::new(1, k));
                for root in [cand.clone(), cand.neg()] {
                    if eval_at(coeffs, &root).is_zero() {
                        return Some(root);
                    }
                }
            }
        }
    }
    None
}

/// Coefficient of t^(lglob + s) when the truncated series
/// `sum_k d_k t^(k+p)` (values `dvals`) is substituted into the shifted
/// equation (x = x0 + t).
fn series_coeff(terms: &[TermInfo], p: i64, dvals: &[Expr], s: i64, lglob: i64) -> Expr {
    let mut total = Expr::zero();
    for t in terms {
        let offset = lglob + s - t.level(p);
        if offset < 0 {
            continue;
        }
        let w = offset as usize;
        // Running truncated product, offsets 0..=w.
        let mut prod: Vec<Expr> = vec![Expr::zero(); w + 1];
        prod[0] = t.rest.clone();
        // x-part (x0 + t)^n.
        if t.xexp != 0 {
            let xs: Vec<Expr> = (0..=w)
                .map(|k| x0().pow_int(t.xexp - k as i64).scale(&gbinom(t.xexp, k as u32)))
                .collect();
            prod = conv(&prod, &xs);
        }
        for &(j, e) in &t.ufacs {
            let us: Vec<Expr> = (0..=w)
                .map(|k| {
                    dvals
                        .get(k)
                        .cloned()
                        .unwrap_or_else(Expr::zero)
                        .scale(&ff(p + k as i64, j))
                })
                .collect();
            for _ in 0..e {
                prod = conv(&prod, &us);
            }
        }
        total = total.add(&prod[w]);
    }
    total
}

fn conv(a: &[Expr], b: &[Expr]) -> Vec<Expr> {
    let w = a.len();
    let mut out = vec![Expr::zero(); w];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (k, bk) in b.iter().take(w - i).enumerate() {
            if !bk.is_zero() {
                out[i + k] = out[i + k].add(&ai.mul(bk));
            }
        }
    }
    out
}

/// Full test: balances, resonances, and compatibility of each branch.
pub fn painleve_verdict(ode: &OdePoly) -> Result<BalanceReport, PainleveError> {
    if ode.top_degree() > 1 {
        // Solving for the top derivative branches into fractional powers.
        return Ok(BalanceReport { branches: Vec::new(), verdict: Verdict::Inapplicable });
    }
    let balances = match dominant_balance(ode) {
        Ok(b) => b,
        Err(PainleveError::NoNegativeBalance) => {
            return Ok(BalanceReport { branches: Vec::new(), verdict: Verdict::Inapplicable })
        }
        Err(e) => return Err(e),
    };
    let terms = ode.split()?;
    let mut branches = Vec::new();
    for (p, d0s) in balances {
        let levels: Vec<i64> = terms.iter().map(|t| t.level(p)).collect();
        let lglob = *levels.iter().min().unwrap();
        for d0 in d0s {
            let (res, degree, all_integer) = resonances(ode, p, &d0)?;
            let mut constraints = Vec::new();
            if all_integer {
                let rmax = res.iter().copied().max().unwrap_or(0);
                let mut dvals = vec![d0.clone()];
                for s in 1..=rmax.max(0) {
                    let name = format!("d{s}");
                    dvals.push(Expr::param(&name));
                    let eq = series_coeff(&terms, p, &dvals, s, lglob);
                    let atom = Atom::param(&name);
                    let poly = eq.as_poly_in(&atom).unwrap_or_default();
                    let lin = poly.get(&1).cloned().unwrap_or_else(Expr::zero);
                    let rest = poly.get(&0).cloned().unwrap_or_else(Expr::zero);
                    if res.contains(&s) {
                        // Resonance: d_s stays arbitrary; the remainder is the
                        // compatibility condition.
                        if !rest.is_zero() {
                            constraints.push(rest);
                        }
                    } else if lin.as_single_term().is_some() {
                        dvals[s as usize] = rest.neg().div(&lin);
                    } else if !lin.is_zero() {
                        // Cannot invert symbolically; leave d_s implicit.
                    } else if !rest.is_zero() {
                        constraints.push(rest);
                    }
                }
            }
            let verdict = if !all_integer {
                Verdict::Fails
            } else if constraints.is_empty() {
                Verdict::Passes
            } else {
                Verdict::PassesWithConstraints
            };
            branches.push(BranchReport {
                p,
                d0,
                resonances: res,
                indicial_degree: degree,
                all_integer,
                constraints,
                verdict,
            });
        }
    }
    // Principal branches (resonance count matching the indicial degree and
    // the equation order) decide the verdict; secondary branches are listed.
    let overall = {
        let principal: Vec<&BranchReport> = branches
            .iter()
            .filter(|b| {
                b.all_integer
                    && b.resonances.len() as u32 == b.indicial_degree
                    && b.resonances.iter().all(|&r| r >= -1)
            })
            .collect();
        if principal.is_empty() {
            Verdict::Fails
        } else if principal.iter().all(|b| b.verdict == Verdict::Passes) {
            Verdict::Passes
        } else if principal.iter().any(|b| b.verdict == Verdict::Fails) {
            Verdict::Fails
        } else {
            Verdict::PassesWithConstraints
        }
    };
    Ok(BalanceReport { branches, verdict: overall })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(order: u32) -> Expr {
        Expr::unknown("u", Coord::X, order)
    }

    fn hb(n: i64) -> Expr {
        Expr::param("hbar").pow_int(n)
    }

    fn a1(n: i64) -> Expr {
        Expr::param("alpha1").pow_int(n)
    }

    fn xp(n: i64) -> Expr {
        Expr::x().pow_int(n)
    }

    fn int(n: i64) -> Expr {
        Expr::int(n)
    }

    #[test]
    fn first_order_riccati_balance_and_resonance() {
        // u' = u^2: exact solution -1/(x - x0).
        let ode = OdePoly::new("u", u(1).sub(&u(0).pow_int(2))).unwrap();
        let balances = dominant_balance(&ode).unwrap();
        assert_eq!(balances.len(), 1);
        let (p, d0s) = &balances[0];
        assert_eq!(*p, -1);
        assert_eq!(d0s.as_slice(), &[int(-1)]);
        let (res, deg, all) = resonances(&ode, -1, &int(-1)).unwrap();
        assert_eq!(res, vec![-1]);
        assert_eq!(deg, 1);
        assert!(all);
        let report = painleve_verdict(&ode).unwrap();
        assert_eq!(report.verdict, Verdict::Passes);
    }

    #[test]
    fn painleve_one_balance_resonances_compatibility() {
        // V'' = 6V^2 + x (normalized form): p = -2, d0 = 1, resonances {-1, 6}.
        let ode = OdePoly::new(
            "u",
            u(2).sub(&u(0).pow_int(2).scale(&Coeff::from_int(6))).sub(&Expr::x()),
        )
        .unwrap();
        let balances = dominant_balance(&ode).unwrap();
        assert_eq!(balances, vec![(-2, vec![int(1)])]);
        let (res, deg, all) = resonances(&ode, -2, &int(1)).unwrap();
        assert_eq!(res, vec![-1, 6]);
        assert_eq!(deg, 2);
        assert!(all);
        let report = painleve_verdict(&ode).unwrap();
        assert_eq!(report.verdict, Verdict::Passes);
        assert!(report.branches[0].constraints.is_empty());
    }

    #[test]
    fn fourth_order_autonomous_two_leading_branches() {
        // U^(4) - 20 U U'' - 10 U'^2 + 40 U^3 = 0: p = -2, d0 in {1, 3}.
        let ode = OdePoly::new(
            "u",
            u(4)
                .sub(&u(0).mul(&u(2)).scale(&Coeff::from_int(20)))
                .sub(&u(1).pow_int(2).scale(&Coeff::from_int(10)))
                .add(&u(0).pow_int(3).scale(&Coeff::from_int(40))),
        )
        .unwrap();
        let balances = dominant_balance(&ode).unwrap();
        assert_eq!(balances.len(), 1);
        let (p, d0s) = &balances[0];
        assert_eq!(*p, -2);
        assert_eq!(d0s.as_slice(), &[int(3), int(1)]);
        let report = painleve_verdict(&ode).unwrap();
        assert_eq!(report.verdict, Verdict::Passes, "report: {report:?}");
    }

    #[test]
    fn quadratic_in_top_derivative_is_inapplicable() {
        // u'^2 = u^3: solving for u' branches into u^(3/2).
        let ode = OdePoly::new("u", u(1).pow_int(2).sub(&u(0).pow_int(3))).unwrap();
        let report = painleve_verdict(&ode).unwrap();
        assert_eq!(report.verdict, Verdict::Inapplicable);
        assert!(report.branches.is_empty());
    }

    /// The sixth-order ladder-case equation for the integrated potential.
    fn sixth_order_ladder_ode() -> OdePoly {
        let e = int(9)
            .mul(&hb(10))
            .mul(&Expr::x().mul(&u(6)).sub(&u(5)))
            .add(
                &int(18).mul(&hb(6)).mul(&Expr::x()).mul(
                    &hb(2)
                        .mul(&u(1))
                        .scale(&Coeff::from_int(-10))
                        .add(&a1(2).mul(&xp(2)))
                        .sub(&a1(1).mul(&hb(2)).scale(&Coeff::from_int(4))),
                )
                .mul(&u(4)),
            )
            .add(
                &hb(6)
                    .mul(
                        &hb(2)
                            .mul(&Expr::x())
                            .mul(&u(2))
                            .scale(&Coeff::from_int(-360))
                            .add(&hb(2).mul(&u(1)).scale(&Coeff::from_int(180)))
                            .add(&a1(2).mul(&xp(2)).scale(&Coeff::from_int(126)))
                            .add(&a1(1).mul(&hb(2)).scale(&Coeff::from_int(72))),
                    )
                    .mul(&u(3)),
            )
            .add(&hb(8).mul(&u(2).pow_int(2)).scale(&Coeff::from_int(90)))
            .add(
                &hb(6)
                    .mul(&Expr::x())
                    .mul(&u(1).pow_int(2))
                    .scale(&Coeff::from_int(1080))
                    .add(&a1(1).mul(&hb(6)).mul(&Expr::x()).mul(&u(1)).scale(&Coeff::from_int(864)))
                    .sub(&a1(2).mul(&hb(4)).mul(&xp(3)).mul(&u(1)).scale(&Coeff::from_int(216)))
                    .sub(&a1(2).mul(&hb(4)).mul(&xp(2)).mul(&u(0)).scale(&Coeff::from_int(144)))
                    .add(&a1(4).mul(&hb(2)).mul(&xp(5)).scale(&Coeff::from_int(6)))
                    .sub(&a1(3).mul(&hb(4)).mul(&xp(3)).scale(&Coeff::from_int(144)))
                    .add(&a1(2).mul(&hb(6)).mul(&Expr::x()).scale(&Coeff::from_int(288)))
                    .mul(&u(2)),
            )
            .sub(&hb(6).mul(&u(1).pow_int(3)).scale(&Coeff::from_int(360)))
            .sub(&a1(1).mul(&hb(6)).mul(&u(1).pow_int(2)).scale(&Coeff::from_int(432)))
            .sub(&a1(2).mul(&hb(4)).mul(&xp(2)).mul(&u(1).pow_int(2)).scale(&Coeff::from_int(468)))
            .sub(&a1(2).mul(&hb(4)).mul(&Expr::x()).mul(&u(0)).mul(&u(1)).scale(&Coeff::from_int(144)))
            .sub(&a1(2).mul(&hb(6)).mul(&u(1)).scale(&Coeff::from_int(288)))
            .sub(&a1(3).mul(&hb(4)).mul(&xp(2)).mul(&u(1)).scale(&Coeff::from_int(432)))
            .add(&a1(4).mul(&hb(2)).mul(&xp(4)).mul(&u(1)).scale(&Coeff::from_int(42)))
            .add(&a1(2).mul(&hb(4)).mul(&u(0).pow_int(2)).scale(&Coeff::from_int(72)))
            .add(&a1(4).mul(&hb(2)).mul(&xp(3)).mul(&u(0)).scale(&Coeff::from_int(48)))
            .sub(&a1(4).mul(&hb(4)).mul(&xp(2)).scale(&Coeff::from_int(90)))
            .add(&a1(5).mul(&hb(2)).mul(&xp(4)).scale(&Coeff::from_int(36)))
            .sub(&a1(6).mul(&xp(6)));
        OdePoly::new("u", e).unwrap()
    }

    #[test]
    fn sixth_order_ladder_leading_coefficients() {
        let ode = sixth_order_ladder_ode();
        assert_eq!(ode.order, 6);
        let balances = dominant_balance(&ode).unwrap();
        assert_eq!(balances.len(), 1);
        let (p, d0s) = &balances[0];
        assert_eq!(*p, -1);
        // d0 (d0 + hbar^2)(d0 + 3 hbar^2): nonzero roots -hbar^2 and -3 hbar^2.
        assert!(d0s.contains(&hb(2).neg()), "roots: {d0s:?}");
        assert!(d0s.contains(&hb(2).scale(&Coeff::from_int(-3))));
    }

    #[test]
    fn sixth_order_ladder_resonances_and_verdict() {
        let ode = sixth_order_ladder_ode();
        let d0 = hb(2).neg();
        let (res, deg, all) = resonances(&ode, -1, &d0).unwrap();
        assert_eq!(res, vec![-1, 1, 2, 5, 6, 8]);
        assert_eq!(deg, 6);
        assert!(all);
        let report = painleve_verdict(&ode).unwrap();
        let main = report
            .branches
            .iter()
            .find(|b| b.d0 == d0)
            .expect("principal branch");
        assert_eq!(main.verdict, Verdict::Passes, "constraints: {:?}", main.constraints);
        assert_eq!(report.verdict, Verdict::Passes);
    }

    #[test]
    fn non_autonomous_compatibility_detects_obstruction() {
        // u'' = 6u^2 + 6/x^2-style obstruction: u'' - 6u^2 - x u has p = -2,
        // d0 = 1, resonances {-1, 6}; the x-dependent term injects a
        // nonvanishing condition at r = 6 (this is not a Painleve equation).
        let ode = OdePoly::new(
            "u",
            u(2)
                .sub(&u(0).pow_int(2).scale(&Coeff::from_int(6)))
                .sub(&Expr::x().mul(&u(0))),
        )
        .unwrap();
        let report = painleve_verdict(&ode).unwrap();
        let b = &report.branches[0];
        assert_eq!(b.resonances, vec![-1, 6]);
        assert_eq!(b.verdict, Verdict::PassesWithConstraints);
        assert!(!b.constraints.is_empty());
        assert_eq!(report.verdict, Verdict::PassesWithConstraints);
    }

    #[test]
    fn report_serializes() {
        let ode = OdePoly::new("u", u(1).sub(&u(0).pow_int(2))).unwrap();
        let report = painleve_verdict(&ode).unwrap();
        let json = serde_json::to_string(&report).unwrap();
        let back: BalanceReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back.verdict, report.verdict);
        assert_eq!(back.branches.len(), report.branches.len());
    }
}
