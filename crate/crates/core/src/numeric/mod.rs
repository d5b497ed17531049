//! Numeric verification for potentials that are only defined by nonlinear
//! ODEs: jet-carrying integration, operator-action residuals on smooth test
//! functions, and conservation checks along integrated solutions.
//!
//! A deliberate design point: when a potential satisfies its defining ODE,
//! the ladder/commutation residual vanishes identically once derivatives are
//! rewritten through the ODE's solved form — evaluating that rewrite on any
//! jet gives exactly zero and measures nothing. The integrators here
//! therefore carry extra derivatives and integrate the *differentiated*
//! defining equation, so the equation itself becomes a monitored conserved
//! quantity of the jet and every derivative a residual needs is an
//! integrated value; operator residuals then measure genuine integration
//! error and shrink proportionally with the tolerance.

mod dp5;
mod testfn;

pub use dp5::advance;
pub use testfn::TestFunction;

use crate::catalog::CatalogEntry;
use crate::detsys::{Mechanics, PotentialSpec};
use crate::opalg::{check_relation_classical, check_relation_quantum, DiffOp, PhasePoly};
use crate::symkernel::{
    normalize_term, reduce_mod, Atom, Coeff, Coord, Expr, ReduceError, RewriteRule,
};
use num_complex::Complex64;
use serde::Serialize;
use std::collections::HashMap;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum NumericError {
    #[error("integration hit a singularity near x = {pole_estimate}")]
    SingularityInWindow { pole_estimate: f64 },
    #[error("cannot evaluate atom {0} numerically")]
    Eval(String),
    #[error("jet does not supply derivative order {needed} of {unknown}")]
    JetOrderInsufficient { unknown: String, needed: usize },
    #[error("reduction: {0}")]
    Reduce(#[from] ReduceError),
    #[error("{0}")]
    BadInput(String),
}

/// An initial-value problem for one unknown `w` with
/// `w^(order) = top(x, w, ..., w^(order-1))`, optional auxiliary quadratures
/// `q' = rhs(x, jet, quads)`, and a numeric parameter point.
#[derive(Clone, Debug)]
pub struct OdeIvp {
    pub unknown: Arc<str>,
    pub order: usize,
    pub top: Expr,
    pub quads: Vec<(Arc<str>, Expr)>,
    pub params: HashMap<String, Complex64>,
}

/// Jets of the unknown (and quadrature values) on a uniform grid.
#[derive(Clone, Debug)]
pub struct JetSolution {
    pub unknown: Arc<str>,
    /// Number of carried derivatives (jet length at each node).
    pub carried: usize,
    pub quad_names: Vec<Arc<str>>,
    pub xs: Vec<f64>,
    pub jets: Vec<Vec<Complex64>>,
    pub quads: Vec<Vec<Complex64>>,
    pub params: HashMap<String, Complex64>,
    pub tol: f64,
}

impl JetSolution {
    /// Evaluate an expression at a node; `extra` wins over the solution's
    /// own jet/quadrature/parameter lookups.
    pub fn eval_with(
        &self,
        node: usize,
        e: &Expr,
        extra: &mut dyn FnMut(&Atom) -> Option<Complex64>,
    ) -> Result<Complex64, NumericError> {
        let x = self.xs[node];
        let mut missing: Option<String> = None;
        let v = e.eval_complex(&mut |a| {
            if let Some(v) = extra(a) {
                return Some(v);
            }
            let v = lookup_atom(
                a,
                x,
                &self.params,
                &self.unknown,
                &self.jets[node],
                &self.quad_names,
                &self.quads[node],
            );
            if v.is_none() && missing.is_none() {
                missing = Some(format!("{a:?}"));
            }
            v
        });
        v.ok_or_else(|| NumericError::Eval(missing.unwrap_or_default()))
    }

    pub fn eval(&self, node: usize, e: &Expr) -> Result<Complex64, NumericError> {
        self.eval_with(node, e, &mut |_| None)
    }
}

fn lookup_atom(
    a: &Atom,
    x: f64,
    params: &HashMap<String, Complex64>,
    unknown: &str,
    jet: &[Complex64],
    quad_names: &[Arc<str>],
    quads: &[Complex64],
) -> Option<Complex64> {
    match a {
        Atom::Coord(Coord::X) => Some(Complex64::new(x, 0.0)),
        Atom::Param(name) => params.get(name.as_ref()).copied(),
        Atom::Fn { id, coord: Coord::X, order } => {
            if id.as_ref() == unknown && (*order as usize) < jet.len() {
                return Some(jet[*order as usize]);
            }
            if *order == 0 {
                if let Some(i) = quad_names.iter().position(|q| q.as_ref() == id.as_ref()) {
                    return Some(quads[i]);
                }
            }
            None
        }
        _ => None,
    }
}

/// Evaluate an expression with an ad-hoc atom valuation, failing loudly on
/// anything unresolved.
pub fn eval_expr(
    e: &Expr,
    lookup: &mut dyn FnMut(&Atom) -> Option<Complex64>,
) -> Result<Complex64, NumericError> {
    let mut missing: Option<String> = None;
    e.eval_complex(&mut |a| {
        let v = lookup(a);
        if v.is_none() && missing.is_none() {
            missing = Some(format!("{a:?}"));
        }
        v
    })
    .ok_or_else(|| NumericError::Eval(missing.unwrap_or_default()))
}

/// Integrate an IVP from `x0` across a uniform grid over `window`,
/// recording the jet and quadrature values at every node. `x0` must lie
/// inside the window; integration runs outward in both directions.
pub fn integrate_jet(
    ivp: &OdeIvp,
    x0: f64,
    init: &[Complex64],
    quad_init: &[Complex64],
    window: (f64, f64),
    nodes: usize,
    tol: f64,
) -> Result<JetSolution, NumericError> {
    let (a, b) = window;
    if !(a < b) || nodes < 2 {
        return Err(NumericError::BadInput("window must be ordered, nodes >= 2".into()));
    }
    if x0 < a || x0 > b {
        return Err(NumericError::BadInput("x0 must lie inside the window".into()));
    }
    if init.len() != ivp.order || quad_init.len() != ivp.quads.len() {
        return Err(NumericError::BadInput("initial data has the wrong length".into()));
    }
    let n = ivp.order;
    let quad_names: Vec<Arc<str>> = ivp.quads.iter().map(|(q, _)| q.clone()).collect();
    let xs: Vec<f64> = (0..nodes)
        .map(|i| a + (b - a) * i as f64 / (nodes - 1) as f64)
        .collect();

    let state0: Vec<Complex64> = init.iter().chain(quad_init.iter()).copied().collect();
    let mut jets = vec![Vec::new(); nodes];
    let mut quadvals = vec![Vec::new(); nodes];

    let mut rhs = |x: f64, y: &[Complex64], dy: &mut [Complex64]| {
        for k in 0..n.saturating_sub(1) {
            dy[k] = y[k + 1];
        }
        let mut look = |atom: &Atom| {
            lookup_atom(atom, x, &ivp.params, &ivp.unknown, &y[..n], &quad_names, &y[n..])
        };
        let nan = Complex64::new(f64::NAN, 0.0);
        if n > 0 {
            dy[n - 1] = ivp.top.eval_complex(&mut look).unwrap_or(nan);
        }
        for (q, (_, rq)) in ivp.quads.iter().enumerate() {
            dy[n + q] = rq.eval_complex(&mut look).unwrap_or(nan);
        }
    };

    for dir in [1i32, -1] {
        let mut y = state0.clone();
        let mut x = x0;
        let order_nodes: Vec<usize> = if dir == 1 {
            (0..nodes).filter(|&i| xs[i] >= x0).collect()
        } else {
            (0..nodes).rev().filter(|&i| xs[i] < x0).collect()
        };
        for i in order_nodes {
            dp5::advance(&mut rhs, x, xs[i], &mut y, tol).map_err(|e| {
                NumericError::SingularityInWindow { pole_estimate: e.pole_estimate }
            })?;
            x = xs[i];
            jets[i] = y[..n].to_vec();
            quadvals[i] = y[n..].to_vec();
        }
    }

    Ok(JetSolution {
        unknown: ivp.unknown.clone(),
        carried: n,
        quad_names,
        xs,
        jets,
        quads: quadvals,
        params: ivp.params.clone(),
        tol,
    })
}

/// Integrate, shrinking the window toward `x0` (15% per attempt) when a
/// movable pole is hit; reports the final window and the pole estimate.
pub fn integrate_jet_shrinking(
    ivp: &OdeIvp,
    x0: f64,
    init: &[Complex64],
    quad_init: &[Complex64],
    window: (f64, f64),
    nodes: usize,
    tol: f64,
) -> Result<(JetSolution, (f64, f64), Option<f64>), NumericError> {
    let (mut a, mut b) = window;
    let mut pole = None;
    for _ in 0..24 {
        match integrate_jet(ivp, x0, init, quad_init, (a, b), nodes, tol) {
            Ok(sol) => return Ok((sol, (a, b), pole)),
            Err(NumericError::SingularityInWindow { pole_estimate }) => {
                pole = Some(pole_estimate);
                a = x0 + (a - x0) * 0.85;
                b = x0 + (b - x0) * 0.85;
            }
            Err(other) => return Err(other),
        }
    }
    Err(NumericError::SingularityInWindow { pole_estimate: pole.unwrap_or(x0) })
}

/// A catalog entry's unknown function realized on a jet solution: the
/// unknown's derivatives up to the carried order come straight from the
/// integrated state; higher ones are rewritten through the carried rules.
pub struct Realization {
    pub sol: JetSolution,
    pub unknown: Arc<str>,
    rules: Vec<RewriteRule>,
}

impl Realization {
    /// Expressions for `unknown^(k)`, `k = 0..=needed`, in terms of the
    /// quantities the jet solution can evaluate.
    pub fn jet_exprs(&self, needed: usize) -> Result<Vec<Expr>, NumericError> {
        let mut out = Vec::with_capacity(needed + 1);
        for k in 0..=needed {
            let raw = Expr::unknown(&self.unknown, Coord::X, k as u32);
            if k < self.sol.carried {
                out.push(raw);
            } else {
                out.push(reduce_mod(&raw, &self.rules)?);
            }
        }
        Ok(out)
    }
}

/// Integrate a catalog entry's own defining ODE. Two extra derivatives are
/// carried (the twice-differentiated equation is integrated), so both the
/// defining equation and its derivative become measured conserved
/// quantities of the jet instead of identities, and every derivative an
/// operator-relation residual needs is an integrated value rather than a
/// value rewritten through the equation. The equation's per-node residual
/// is reported by [`ode_defect`].
pub fn realize_entry(
    entry: &CatalogEntry,
    params: HashMap<String, Complex64>,
    x0: f64,
    init: &[Complex64],
    window: (f64, f64),
    nodes: usize,
    tol: f64,
) -> Result<Realization, NumericError> {
    let PotentialSpec::Ode { unknown, order, equation } = &entry.potential else {
        return Err(NumericError::BadInput(format!(
            "entry {} has a closed-form potential; integrate nothing",
            entry.id
        )));
    };
    let order = *order as usize;
    if init.len() != order {
        return Err(NumericError::BadInput(format!(
            "entry {} needs {order} initial values",
            entry.id
        )));
    }
    let base_rule = RewriteRule::from_equation(equation, unknown, Coord::X)?;
    let prolonged = RewriteRule::from_equation(&equation.diff(Coord::X), unknown, Coord::X)?;
    let prolonged2 = RewriteRule::from_equation(
        &equation.diff(Coord::X).diff(Coord::X),
        unknown,
        Coord::X,
    )?;

    // The two extra initial derivatives come from the original equation and
    // its derivative, making the initial state exactly consistent.
    let mut full_init = init.to_vec();
    for (extra, rule) in [(0u32, &base_rule), (1, &prolonged)] {
        let expr = reduce_mod(
            &Expr::unknown(unknown, Coord::X, order as u32 + extra),
            std::slice::from_ref(rule),
        )?;
        let v = eval_expr(&expr, &mut |a| {
            lookup_atom(a, x0, &params, unknown, &full_init, &[], &[])
        })?;
        full_init.push(v);
    }

    let ivp_top = reduce_mod(
        &Expr::unknown(unknown, Coord::X, order as u32 + 2),
        std::slice::from_ref(&prolonged2),
    )?;
    let ivp = OdeIvp {
        unknown: Arc::from(unknown.as_str()),
        order: order + 2,
        top: ivp_top,
        quads: Vec::new(),
        params,
    };
    let sol = integrate_jet(&ivp, x0, &full_init, &[], window, nodes, tol)?;
    Ok(Realization {
        sol,
        unknown: Arc::from(unknown.as_str()),
        rules: vec![prolonged2],
    })
}

/// Residual of the entry's defining equation at every node — the
/// conserved-consistency diagnostic of a realization.
pub fn ode_defect(entry: &CatalogEntry, real: &Realization) -> Result<Vec<f64>, NumericError> {
    let PotentialSpec::Ode { equation, .. } = &entry.potential else {
        return Ok(vec![0.0; real.sol.xs.len()]);
    };
    let needed = equation.max_fn_order(&real.unknown, Coord::X).unwrap_or(0) as usize;
    let jexprs = real.jet_exprs(needed)?;
    (0..real.sol.xs.len())
        .map(|node| {
            let mut jet_vals = Vec::with_capacity(jexprs.len());
            for je in &jexprs {
                jet_vals.push(real.sol.eval(node, je)?);
            }
            let v = real.sol.eval_with(node, equation, &mut |a| match a {
                Atom::Fn { id, coord: Coord::X, order }
                    if id.as_ref() == real.unknown.as_ref() =>
                {
                    jet_vals.get(*order as usize).copied()
                }
                _ => None,
            })?;
            Ok(v.norm())
        })
        .collect()
}

/// A trivial realization for entries whose operator coefficients are fully
/// closed-form: just a grid and a parameter point, no integrated jet.
pub fn grid_realization(xs: Vec<f64>, params: HashMap<String, Complex64>) -> Realization {
    let n = xs.len();
    Realization {
        sol: JetSolution {
            unknown: Arc::from(""),
            carried: 0,
            quad_names: Vec::new(),
            xs,
            jets: vec![Vec::new(); n],
            quads: vec![Vec::new(); n],
            params,
            tol: 0.0,
        },
        unknown: Arc::from(""),
        rules: Vec::new(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ResidualReport {
    pub max_residual: f64,
    /// Largest operator-coefficient magnitude seen, for scale context.
    pub coefficient_scale: f64,
    pub nodes: usize,
    pub tol: f64,
}

/// Max-abs value of `([H,K] - rhs) psi` over the grid and test functions,
/// with the entry's unknown function supplied by the realization.
pub fn quantum_residual(
    entry: &CatalogEntry,
    real: &Realization,
    psis: &[TestFunction],
) -> Result<ResidualReport, NumericError> {
    if entry.mechanics != Mechanics::Quantum {
        return Err(NumericError::BadInput("quantum_residual needs a quantum entry".into()));
    }
    let (v, binds) = crate::catalog::working_potential(entry);
    let fs: Vec<Expr> = entry.f.iter().map(|f| f.substitute(&binds)).collect();
    let h = DiffOp::hamiltonian(&v);
    let k = DiffOp::from_momentum(&fs);
    let r = check_relation_quantum(&h, &k, &entry.relation);
    residual_on_grid(r.coeffs(), real, psis)
}

fn residual_on_grid(
    coeffs: &[Expr],
    real: &Realization,
    psis: &[TestFunction],
) -> Result<ResidualReport, NumericError> {
    let needed = coeffs
        .iter()
        .filter_map(|c| c.max_fn_order(&real.unknown, Coord::X))
        .max();
    let jexprs = match needed {
        Some(n) => real.jet_exprs(n as usize)?,
        None => Vec::new(),
    };
    let sol = &real.sol;
    let mut max_residual = 0.0f64;
    let mut coefficient_scale = 0.0f64;
    for node in 0..sol.xs.len() {
        let mut jet_vals = Vec::with_capacity(jexprs.len());
        for je in &jexprs {
            let v = sol.eval(node, je)?;
            jet_vals.push(v);
        }
        let mut cvals = Vec::with_capacity(coeffs.len());
        for c in coeffs {
            let v = sol.eval_with(node, c, &mut |a| match a {
                Atom::Fn { id, coord: Coord::X, order }
                    if id.as_ref() == real.unknown.as_ref() =>
                {
                    jet_vals.get(*order as usize).copied()
                }
                _ => None,
            })?;
            coefficient_scale = coefficient_scale.max(v.norm());
            cvals.push(v);
        }
        for psi in psis {
            let d = psi.derivatives(sol.xs[node], coeffs.len().saturating_sub(1));
            let mut s = Complex64::new(0.0, 0.0);
            for (l, c) in cvals.iter().enumerate() {
                s += c * d[l];
            }
            max_residual = max_residual.max(s.norm());
        }
    }
    Ok(ResidualReport {
        max_residual,
        coefficient_scale,
        nodes: sol.xs.len(),
        tol: sol.tol,
    })
}

/// Max-abs value of `({H,K} - rhs)(x, p)` at sampled phase points for a
/// closed-form classical entry.
pub fn classical_residual(
    entry: &CatalogEntry,
    params: &HashMap<String, Complex64>,
    points: &[(f64, f64)],
) -> Result<f64, NumericError> {
    if entry.mechanics != Mechanics::Classical {
        return Err(NumericError::BadInput("classical_residual needs a classical entry".into()));
    }
    let (v, binds) = crate::catalog::working_potential(entry);
    let fs: Vec<Expr> = entry.f.iter().map(|f| f.substitute(&binds)).collect();
    let h = PhasePoly::hamiltonian(&v);
    let k = PhasePoly::from_coeffs(fs);
    let r = check_relation_classical(&h, &k, &entry.relation);
    let mut max = 0.0f64;
    for &(x, p) in points {
        let mut s = Complex64::new(0.0, 0.0);
        let mut pw = Complex64::new(1.0, 0.0);
        for c in r.coeffs() {
            let cv = eval_expr(c, &mut |a| lookup_atom(a, x, params, "", &[], &[], &[]))?;
            s += cv * pw;
            pw *= p;
        }
        max = max.max(s.norm());
    }
    Ok(max)
}

#[derive(Clone, Debug, Serialize)]
pub struct DriftReport {
    /// Max deviation of the conserved quantity from its initial value.
    pub drift_abs: f64,
    /// Largest sum of individual term magnitudes — the cancellation scale.
    pub scale: f64,
    /// `drift_abs / max(1, scale)`.
    pub relative: f64,
}

/// Conservation of `quantity(x, jet)` along an integrated solution.
pub fn first_integral_drift(sol: &JetSolution, quantity: &Expr) -> Result<DriftReport, NumericError> {
    let mut q0 = Complex64::new(0.0, 0.0);
    let mut drift = 0.0f64;
    let mut scale = 0.0f64;
    for node in 0..sol.xs.len() {
        let q = sol.eval(node, quantity)?;
        if node == 0 {
            q0 = q;
        }
        drift = drift.max((q - q0).norm());
        let mut term_sum = 0.0f64;
        for (m, c) in quantity.terms() {
            let one = normalize_term(c.clone(), m.factors.to_vec());
            term_sum += sol.eval(node, &one)?.norm();
        }
        scale = scale.max(term_sum);
    }
    Ok(DriftReport { drift_abs: drift, scale, relative: drift / scale.max(1.0) })
}

// ---------------------------------------------------------------------------
// Named ODE realizations: the classical Painlevé transcendents, the
// Weierstrass elliptic function, and the third-order ladder system's
// classical potential equation with its quartic level set.
// ---------------------------------------------------------------------------

fn w(k: u32) -> Expr {
    Expr::unknown("w", Coord::X, k)
}
fn xe() -> Expr {
    Expr::x()
}
fn p(name: &str) -> Expr {
    Expr::param(name)
}

fn ivp(order: usize, top: Expr, params: &[(&str, f64)]) -> OdeIvp {
    OdeIvp {
        unknown: Arc::from("w"),
        order,
        top,
        quads: Vec::new(),
        params: params
            .iter()
            .map(|(n, v)| (n.to_string(), Complex64::new(*v, 0.0)))
            .collect(),
    }
}

/// `w'' = 6 w^2 + x`.
pub fn painleve_i() -> OdeIvp {
    ivp(2, w(0).pow_int(2).scale(&Coeff::from_int(6)).add(&xe()), &[])
}

/// `w'' = 2 w^3 + x w + a`.
pub fn painleve_ii(a: f64) -> OdeIvp {
    ivp(
        2,
        w(0).pow_int(3).scale(&Coeff::from_int(2)).add(&xe().mul(&w(0))).add(&p("a")),
        &[("a", a)],
    )
}

/// `w'' = w'^2/w - w'/x + (a w^2 + b)/x + g w^3 + d/w`.
pub fn painleve_iii(a: f64, b: f64, g: f64, d: f64) -> OdeIvp {
    let top = w(1)
        .pow_int(2)
        .div(&w(0))
        .sub(&w(1).div(&xe()))
        .add(&p("a").mul(&w(0).pow_int(2)).add(&p("b")).div(&xe()))
        .add(&p("g").mul(&w(0).pow_int(3)))
        .add(&p("d").div(&w(0)));
    ivp(2, top, &[("a", a), ("b", b), ("g", g), ("d", d)])
}

/// `w'' = w'^2/(2w) + (3/2) w^3 + 4 x w^2 + 2 (x^2 - a) w + b/w`.
pub fn painleve_iv(a: f64, b: f64) -> OdeIvp {
    let top = w(1)
        .pow_int(2)
        .div(&w(0).scale(&Coeff::from_int(2)))
        .add(&w(0).pow_int(3).scale(&Coeff::from_ratio(3, 2)))
        .add(&xe().mul(&w(0).pow_int(2)).scale(&Coeff::from_int(4)))
        .add(
            &xe()
                .pow_int(2)
                .sub(&p("a"))
                .mul(&w(0))
                .scale(&Coeff::from_int(2)),
        )
        .add(&p("b").div(&w(0)));
    ivp(2, top, &[("a", a), ("b", b)])
}

/// The fifth transcendent in its standard second-order form.
pub fn painleve_v(a: f64, b: f64, g: f64, d: f64) -> OdeIvp {
    let wm1 = w(0).sub(&Expr::one());
    let half = Expr::constant(Coeff::from_ratio(1, 2));
    let pref = half.div(&w(0)).add(&wm1.pow_int(-1));
    let top = pref
        .mul(&w(1).pow_int(2))
        .sub(&w(1).div(&xe()))
        .add(
            &wm1.pow_int(2)
                .div(&xe().pow_int(2))
                .mul(&p("a").mul(&w(0)).add(&p("b").div(&w(0)))),
        )
        .add(&p("g").mul(&w(0)).div(&xe()))
        .add(&p("d").mul(&w(0)).mul(&w(0).add(&Expr::one())).mul(&wm1.pow_int(-1)));
    ivp(2, top, &[("a", a), ("b", b), ("g", g), ("d", d)])
}

/// Weierstrass elliptic function via `w'' = 6 w^2 - g2/2`.
pub fn weierstrass_p(g2: f64) -> OdeIvp {
    ivp(
        2,
        w(0)
            .pow_int(2)
            .scale(&Coeff::from_int(6))
            .sub(&p("g2").scale(&Coeff::from_ratio(1, 2))),
        &[("g2", g2)],
    )
}

/// Classical third-order-ladder potential equation (left-hand side of
/// `24 x V V' - 4 a^2 x^3 V' - 12 V^2 - 12 a^2 x^2 V + a^4 x^4 + 4 d = 0`)
/// with `a = alpha1` and level constant `d`.
pub fn classical_quartic_equation() -> Expr {
    let a2 = p("alpha1").pow_int(2);
    xe().mul(&w(0))
        .mul(&w(1))
        .scale(&Coeff::from_int(24))
        .sub(&a2.mul(&xe().pow_int(3)).mul(&w(1)).scale(&Coeff::from_int(4)))
        .sub(&w(0).pow_int(2).scale(&Coeff::from_int(12)))
        .sub(&a2.mul(&xe().pow_int(2)).mul(&w(0)).scale(&Coeff::from_int(12)))
        .add(&a2.pow_int(2).mul(&xe().pow_int(4)))
        .add(&p("d").scale(&Coeff::from_int(4)))
}

/// [`classical_quartic_equation`] solved for `V'`. The coefficient of `V'`
/// is `24 x V - 4 a^2 x^3`, so the solved form carries a reciprocal of a
/// multi-term expression; it is evaluated as such.
pub fn classical_quartic_ivp(alpha1: f64, d: f64) -> OdeIvp {
    let rule = RewriteRule::from_equation(&classical_quartic_equation(), "w", Coord::X)
        .expect("potential equation is linear in V'");
    let RewriteRule::Derivative { num, den, .. } = rule else {
        unreachable!("first-derivative rule is always the fraction form");
    };
    ivp(1, num.mul(&den.pow_int(-1)), &[("alpha1", alpha1), ("d", d)])
}

/// The quartic level set conserved along solutions of
/// [`classical_quartic_ivp`]:
/// `9V^4 - 14 a^2 x^2 V^3 + (15/2 a^4 x^4 - 6d) V^2
///  - 2 a^2 x^2 (3/4 a^4 x^4 - d) V + (a^8 x^8/16 + d a^4 x^4/2 + d^2)`.
pub fn classical_quartic_invariant() -> Expr {
    let a2 = p("alpha1").pow_int(2);
    let a4 = a2.pow_int(2);
    let x2 = xe().pow_int(2);
    let x4 = xe().pow_int(4);
    let d = p("d");
    w(0)
        .pow_int(4)
        .scale(&Coeff::from_int(9))
        .sub(&a2.mul(&x2).mul(&w(0).pow_int(3)).scale(&Coeff::from_int(14)))
        .add(
            &a4.mul(&x4)
                .scale(&Coeff::from_ratio(15, 2))
                .sub(&d.scale(&Coeff::from_int(6)))
                .mul(&w(0).pow_int(2)),
        )
        .sub(
            &a2.mul(&x2)
                .mul(&a4.mul(&x4).scale(&Coeff::from_ratio(3, 4)).sub(&d))
                .mul(&w(0))
                .scale(&Coeff::from_int(2)),
        )
        .add(&a4.pow_int(2).mul(&x4.pow_int(2)).scale(&Coeff::from_ratio(1, 16)))
        .add(&d.mul(&a4).mul(&x4).scale(&Coeff::from_ratio(1, 2)))
        .add(&d.pow_int(2))
}

/// A real root `V` of [`classical_quartic_invariant`] at abscissa `x`,
/// searched for in `[lo, hi]` (sign-change scan plus bisection). Solutions
/// of [`classical_quartic_ivp`] launched from such a root stay on the
/// quartic's zero set.
pub fn classical_quartic_initial_value(
    alpha1: f64,
    d: f64,
    x: f64,
    lo: f64,
    hi: f64,
) -> Option<f64> {
    let q = classical_quartic_invariant();
    let params: HashMap<String, Complex64> = [
        ("alpha1".to_string(), Complex64::new(alpha1, 0.0)),
        ("d".to_string(), Complex64::new(d, 0.0)),
    ]
    .into();
    let at = |v: f64| -> Option<f64> {
        let jet = [Complex64::new(v, 0.0)];
        eval_expr(&q, &mut |a| lookup_atom(a, x, &params, "w", &jet, &[], &[]))
            .ok()
            .map(|c| c.re)
    };
    let scan = 256;
    let mut prev = (lo, at(lo)?);
    for i in 1..=scan {
        let v = lo + (hi - lo) * i as f64 / scan as f64;
        let f = at(v)?;
        if prev.1 == 0.0 {
            return Some(prev.0);
        }
        if prev.1.signum() != f.signum() {
            let (mut a, mut b) = (prev.0, v);
            let (mut fa, _) = (prev.1, f);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                let fm = at(m)?;
                if fm == 0.0 {
                    return Some(m);
                }
                if fa.signum() == fm.signum() {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            return Some(0.5 * (a + b));
        }
        prev = (v, f);
    }
    None
}

/// Configuration for realizing the third-order quantum ladder potential
/// from the fourth Painlevé transcendent.
#[derive(Clone, Debug)]
pub struct QuarticOscillatorOptions {
    pub k1: f64,
    pub k2: f64,
    pub eps: f64,
    pub hbar: f64,
    pub alpha1: f64,
    pub x0: f64,
    /// Initial `(P(x0), P'(x0))` of the transcendent.
    pub p_init: (f64, f64),
    pub window: (f64, f64),
    pub nodes: usize,
    pub tol: f64,
}

impl Default for QuarticOscillatorOptions {
    fn default() -> Self {
        // Documented fixture: the source material gives no initial data;
        // this start keeps the transcendent negative, bounded, and pole-free
        // on a window of width > 2.
        QuarticOscillatorOptions {
            k1: 0.0,
            k2: 0.0,
            eps: 1.0,
            hbar: 1.0,
            alpha1: 1.0,
            x0: 0.0,
            p_init: (-0.1, 0.0),
            window: (-1.1, 1.1),
            nodes: 45,
            tol: 1e-10,
        }
    }
}

/// Realize the third-order ladder entry's potential from the fourth
/// Painlevé transcendent `P`:
/// `V = eps a P' + 2 a^2 (P^2 + x P)/hbar^2 + a^2 x^2/(2 hbar^2)
///    + (eps - 1) a/3 - hbar^2 k1/6`,
/// where `P'' = P'^2/(2P) + 6 a^2 P^3/h^4 + 8 a^2 x P^2/h^4
///            + (2 a^2 x^2/h^4 - k1) P + k2/P`.
/// The transcendent supplies the initial jet `(u, u', u'')` at `x0`:
/// `u' = V`, `u'' = V'`, and the antiderivative value `u(x0)` is fixed by
/// the x-derivative of the entry's defining equation (the bare-unknown
/// coefficient of the original vanishes at the origin). The jet is then
/// carried by the entry's own prolonged defining equation via
/// [`realize_entry`], so the equation itself is a monitored conserved
/// quantity rather than an identity of the evaluation data. The stored
/// equation is a first integral whose level constant is normalized
/// differently from the transcendent parameterization, so the initial top
/// derivative comes from the stored equation, keeping the realized
/// potential on its zero level set; it agrees with the transcendent's
/// potential through second derivatives at `x0`.
pub fn realize_quartic_oscillator(
    entry: &CatalogEntry,
    opts: &QuarticOscillatorOptions,
) -> Result<Realization, NumericError> {
    let PotentialSpec::Ode { unknown, .. } = &entry.potential else {
        return Err(NumericError::BadInput("entry is not ODE-defined".into()));
    };
    if unknown != "u" {
        return Err(NumericError::BadInput("expected the antiderivative unknown".into()));
    }
    let pf = |k: u32| Expr::unknown("P", Coord::X, k);
    let a = p("alpha1");
    let hb = p("hbar");
    let a2 = a.pow_int(2);
    let h2 = hb.pow_int(2);
    let h4 = hb.pow_int(4);

    let top = pf(1)
        .pow_int(2)
        .div(&pf(0).scale(&Coeff::from_int(2)))
        .add(&a2.mul(&pf(0).pow_int(3)).div(&h4).scale(&Coeff::from_int(6)))
        .add(&a2.mul(&xe()).mul(&pf(0).pow_int(2)).div(&h4).scale(&Coeff::from_int(8)))
        .add(
            &a2.mul(&xe().pow_int(2))
                .div(&h4)
                .scale(&Coeff::from_int(2))
                .sub(&p("k1"))
                .mul(&pf(0)),
        )
        .add(&p("k2").div(&pf(0)));
    let rule = RewriteRule::from_equation(&pf(2).sub(&top), "P", Coord::X)?;

    let v_expr = p("eps")
        .mul(&a)
        .mul(&pf(1))
        .add(
            &a2.mul(&pf(0).pow_int(2).add(&xe().mul(&pf(0))))
                .div(&h2)
                .scale(&Coeff::from_int(2)),
        )
        .add(&a2.mul(&xe().pow_int(2)).div(&h2).scale(&Coeff::from_ratio(1, 2)))
        .add(&p("eps").sub(&Expr::one()).mul(&a).scale(&Coeff::from_ratio(1, 3)))
        .sub(&h2.mul(&p("k1")).scale(&Coeff::from_ratio(1, 6)));

    let params: HashMap<String, Complex64> = [
        ("hbar", opts.hbar),
        ("alpha1", opts.alpha1),
        ("k1", opts.k1),
        ("k2", opts.k2),
        ("eps", opts.eps),
    ]
    .iter()
    .map(|(n, v)| (n.to_string(), Complex64::new(*v, 0.0)))
    .collect();

    // Fix the antiderivative's constant: differentiate the defining
    // equation once (the bare-unknown coefficient of the original vanishes
    // at the origin) and solve for u at x0.
    let PotentialSpec::Ode { equation, .. } = &entry.potential else {
        unreachable!();
    };
    let du = equation.diff(Coord::X);
    let u_solved = du
        .solve_linear(&Atom::func("u", Coord::X, 0))
        .ok_or_else(|| NumericError::BadInput("equation is not linear in the unknown".into()))?;
    let needed = (u_solved.max_fn_order("u", Coord::X).unwrap_or(1) as usize).max(2);
    let mut chain = vec![Expr::zero(), v_expr.clone()];
    for k in 2..=needed {
        let next = chain[k - 1].diff(Coord::X);
        chain.push(reduce_mod(&next, std::slice::from_ref(&rule))?);
    }
    let p_init = [
        Complex64::new(opts.p_init.0, 0.0),
        Complex64::new(opts.p_init.1, 0.0),
    ];
    let mut jet_vals = vec![Complex64::new(0.0, 0.0)];
    for e in chain.iter().skip(1) {
        let v = eval_expr(e, &mut |at| {
            lookup_atom(at, opts.x0, &params, "P", &p_init, &[], &[])
        })?;
        jet_vals.push(v);
    }
    let u0 = eval_expr(&u_solved, &mut |at| match at {
        Atom::Fn { id, coord: Coord::X, order } if id.as_ref() == "u" => {
            jet_vals.get(*order as usize).copied()
        }
        other => lookup_atom(other, opts.x0, &params, "P", &p_init, &[], &[]),
    })?;

    // Initial jet (u, u', u'') = (u0, V, V') at x0; the top derivative and
    // the continuation are supplied by the entry's own equation.
    let init = [u0, jet_vals[1], jet_vals[2]];
    realize_entry(
        entry,
        params,
        opts.x0,
        &init,
        opts.window,
        opts.nodes,
        opts.tol,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::load;
    use crate::symkernel::reduces_to_zero;

    fn c(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    #[test]
    fn second_derivative_zero_integrates_to_a_line() {
        let ivp = ivp(2, Expr::zero(), &[]);
        let sol = integrate_jet(&ivp, 0.0, &[c(0.0), c(1.0)], &[], (-1.0, 1.0), 11, 1e-12)
            .unwrap();
        for (i, &x) in sol.xs.iter().enumerate() {
            assert!((sol.jets[i][0].re - x).abs() < 1e-12);
            assert!((sol.jets[i][1].re - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn quartic_level_set_is_a_first_integral_symbolically() {
        // Along the potential equation the quartic Q obeys x Q' = 2 Q, so
        // its zero level set is invariant: x dQ/dx - 2 Q must reduce to
        // zero once V' is rewritten through the equation.
        let rule =
            RewriteRule::from_equation(&classical_quartic_equation(), "w", Coord::X).unwrap();
        let q = classical_quartic_invariant();
        let claim = xe().mul(&q.diff(Coord::X)).sub(&q.scale(&Coeff::from_int(2)));
        assert!(reduces_to_zero(&claim, &[rule]).unwrap());
    }

    #[test]
    fn quartic_level_set_drift_stays_small() {
        for d in [0.7, 1.3] {
            let v0 = classical_quartic_initial_value(1.0, d, 1.0, 0.0, 4.0).unwrap();
            let ivp = classical_quartic_ivp(1.0, d);
            let sol =
                integrate_jet(&ivp, 1.0, &[c(v0)], &[], (0.7, 1.6), 31, 1e-12).unwrap();
            let rep = first_integral_drift(&sol, &classical_quartic_invariant()).unwrap();
            assert!(rep.relative < 1e-9, "d={d} v0={v0}: {rep:?}");
        }
    }

    #[test]
    fn adaptive_integration_agrees_with_fixed_step_richardson() {
        // Independent fixed-step fourth-order integrator at two step sizes,
        // Richardson-extrapolated, as an oracle for the adaptive path.
        let f = |x: f64, y: [f64; 2]| [y[1], 6.0 * y[0] * y[0] + x];
        let rk4 = |h: f64| {
            let mut y = [0.5, 0.0];
            let n = (0.5 / h).round() as usize;
            let mut x = 0.0;
            for _ in 0..n {
                let k1 = f(x, y);
                let k2 = f(x + h / 2.0, [y[0] + h / 2.0 * k1[0], y[1] + h / 2.0 * k1[1]]);
                let k3 = f(x + h / 2.0, [y[0] + h / 2.0 * k2[0], y[1] + h / 2.0 * k2[1]]);
                let k4 = f(x + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
                y[0] += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
                y[1] += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
                x += h;
            }
            y[0]
        };
        let coarse = rk4(1e-3);
        let fine = rk4(5e-4);
        let oracle = fine + (fine - coarse) / 15.0;

        let sol = integrate_jet(
            &painleve_i(),
            0.0,
            &[c(0.5), c(0.0)],
            &[],
            (0.0, 0.5),
            6,
            1e-12,
        )
        .unwrap();
        let end = sol.jets[5][0].re;
        assert!((end - oracle).abs() < 1e-8, "{end} vs {oracle}");
    }

    #[test]
    fn closed_form_harmonic_ladder_residual_is_machine_zero() {
        let cat = load().unwrap();
        let entry = cat.entries.iter().find(|e| e.id == "q-d1").unwrap();
        let params: HashMap<String, Complex64> =
            [("hbar".to_string(), c(1.0)), ("alpha1".to_string(), c(1.0))].into();
        let xs: Vec<f64> = (0..11).map(|i| -1.0 + 0.2 * i as f64).collect();
        let real = grid_realization(xs, params);
        let rep = quantum_residual(entry, &real, &TestFunction::gaussian_triple(0.0)).unwrap();
        assert!(rep.max_residual < 1e-12, "{rep:?}");
    }

    #[test]
    fn classical_singular_oscillator_relation_holds_at_phase_points() {
        let cat = load().unwrap();
        let entry = cat.entries.iter().find(|e| e.id == "c-d2").unwrap();
        let params: HashMap<String, Complex64> = [
            ("alpha1".to_string(), c(1.0)),
            ("gamma".to_string(), c(0.3)),
        ]
        .into();
        let pts: Vec<(f64, f64)> = (1..=20)
            .map(|i| (0.3 + 0.1 * i as f64, -1.0 + 0.13 * i as f64))
            .collect();
        let r = classical_residual(entry, &params, &pts).unwrap();
        assert!(r < 1e-10, "{r}");
    }

    #[test]
    fn painleve_iv_realization_stays_pole_free_and_consistent() {
        let cat = load().unwrap();
        let entry = cat.entries.iter().find(|e| e.id == "q-d3").unwrap();
        let opts = QuarticOscillatorOptions::default();
        assert!(opts.window.1 - opts.window.0 >= 2.0);
        let real = realize_quartic_oscillator(entry, &opts).unwrap();
        let defect = ode_defect(entry, &real).unwrap();
        let max = defect.iter().cloned().fold(0.0f64, f64::max);
        assert!(max < 1e-7, "defining-equation defect {max}");
    }

    #[test]
    fn painleve_iv_residual_tracks_tolerance() {
        let cat = load().unwrap();
        let entry = cat.entries.iter().find(|e| e.id == "q-d3").unwrap();
        let psis = TestFunction::gaussian_triple(0.0);
        let run = |tol: f64| {
            let opts = QuarticOscillatorOptions { tol, ..Default::default() };
            let real = realize_quartic_oscillator(entry, &opts).unwrap();
            quantum_residual(entry, &real, &psis).unwrap().max_residual
        };
        let coarse = run(1e-10);
        let fine = run(5e-11);
        assert!(coarse < 1e-6, "residual at reference tolerance {coarse}");
        assert!(coarse > fine, "coarse {coarse} vs fine {fine}");
        let slope = (coarse / fine).ln() / 2.0f64.ln();
        assert!(slope >= 0.9, "slope {slope} (coarse {coarse}, fine {fine})");
    }
}
