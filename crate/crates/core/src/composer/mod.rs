//! Assemble two-dimensional Hamiltonians `H = H1 + H2` on `E_2` from two
//! one-dimensional catalog entries, build the companion integral `K` for the
//! chosen combination case, check superintegrability, and compute the
//! polynomial algebra generated by the second-order integral `A = H1 - H2`
//! and `B = K`.
//!
//! The six polynomial combination cases pair the bracket types of the two
//! entries (`a` Abelian, `b` Heisenberg, `c` conformal, `d` ladder):
//!
//! | case | types  | K |
//! |------|--------|---------------------------------------------|
//! | AA   | (a,a)  | `K1 + K2` |
//! | BB   | (b,b)  | `α2 K1 - α1 K2` |
//! | CB   | (c,b)  | `α2 K1 - α1 H1 K2` |
//! | DD   | (d,d)  | `(K1†)^m (K2-)^n - (K1-)^m (K2†)^n`, `m α1 = n α2` |
//! | CC   | (c,c)  | `α2 H2 K1 - α1 H1 K2` |
//! | AD   | (a,d)  | `K1 - K2- K2†` (trivial: `K2† K2-` is `P(H2)`) |

mod op2;

pub use op2::{DiffOp2, PhasePoly2};

use crate::catalog::{Catalog, CatalogEntry, KindClass, VerifyMode};
use crate::detsys::{ladder_product, ladder_product_classical, DetSysError, Mechanics};
use crate::opalg::{DiffOp, PhasePoly, RelationKind};
use crate::symkernel::{
    reduce_mod, reduces_to_zero, Atom, Coeff, Coord, Expr, ReduceError, RewriteRule,
};
use serde::Serialize;
use std::sync::Arc;
use thiserror::Error;

/// Combination case from the integral table.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum Case {
    AA,
    BB,
    CB,
    DD,
    CC,
    AD,
}

impl Case {
    /// Required relation classes for the (x, y) entries.
    pub fn kinds(self) -> (KindClass, KindClass) {
        match self {
            Case::AA => (KindClass::Abelian, KindClass::Abelian),
            Case::BB => (KindClass::Heisenberg, KindClass::Heisenberg),
            Case::CB => (KindClass::Conformal, KindClass::Heisenberg),
            Case::DD => (KindClass::Ladder, KindClass::Ladder),
            Case::CC => (KindClass::Conformal, KindClass::Conformal),
            Case::AD => (KindClass::Abelian, KindClass::Ladder),
        }
    }

    /// Expected order of K given the entry orders (k1, k2) and, for DD, the
    /// exponents (m, n).
    pub fn expected_order(self, k1: usize, k2: usize, m: u32, n: u32) -> usize {
        match self {
            Case::AA | Case::BB => k1.max(k2),
            Case::CB => k1.max(k2 + 2),
            Case::DD => m as usize * k1 + n as usize * k2 - 1,
            Case::CC => (k1 + 2).max(k2 + 2),
            Case::AD => k1.max(2 * k2),
        }
    }
}

impl std::str::FromStr for Case {
    type Err = String;
    fn from_str(s: &str) -> Result<Case, String> {
        match s.to_ascii_uppercase().as_str() {
            "AA" => Ok(Case::AA),
            "BB" => Ok(Case::BB),
            "CB" => Ok(Case::CB),
            "DD" => Ok(Case::DD),
            "CC" => Ok(Case::CC),
            "AD" => Ok(Case::AD),
            other => Err(format!("unknown combination case {other}")),
        }
    }
}

/// What to compose: the case, the two catalog entry ids, the DD exponents,
/// and the bracket constants for the two axes.
#[derive(Clone, Debug)]
pub struct CompositionSpec {
    pub case: Case,
    pub entry_x: String,
    pub entry_y: String,
    pub m: u32,
    pub n: u32,
    pub alpha1: Expr,
    pub alpha2: Expr,
}

impl CompositionSpec {
    pub fn new(case: Case, entry_x: &str, entry_y: &str) -> CompositionSpec {
        CompositionSpec {
            case,
            entry_x: entry_x.to_string(),
            entry_y: entry_y.to_string(),
            m: 1,
            n: 1,
            alpha1: Expr::param("alpha1"),
            alpha2: Expr::param("alpha2"),
        }
    }

    pub fn with_exponents(mut self, m: u32, n: u32) -> CompositionSpec {
        self.m = m;
        self.n = n;
        self
    }

    pub fn with_alphas(mut self, alpha1: Expr, alpha2: Expr) -> CompositionSpec {
        self.alpha1 = alpha1;
        self.alpha2 = alpha2;
        self
    }
}

#[derive(Debug, Error)]
pub enum ComposeError {
    #[error("no catalog entry named {0}")]
    UnknownEntry(String),
    #[error("entries mix quantum and classical mechanics")]
    MechanicsMismatch,
    #[error("case {case:?} needs a {want:?} entry on the {side} axis, got {got:?}")]
    KindMismatch {
        case: Case,
        side: &'static str,
        want: KindClass,
        got: RelationKind,
    },
    #[error("DD needs m*alpha1 == n*alpha2; got remainder {0}")]
    RationalityViolation(String),
    #[error("DD exponents must be coprime, got ({0}, {1})")]
    NotCoprime(u32, u32),
    #[error("reduction: {0}")]
    Reduce(#[from] ReduceError),
    #[error("ladder product: {0}")]
    Ladder(#[from] DetSysError),
}

/// Shared algebraic interface of the two operator models: composition (or
/// pointwise product), bracket (commutator or Poisson), and the conjugation
/// that swaps raising and lowering members.
pub trait Phase2: Clone + PartialEq + std::fmt::Display {
    const MECHANICS: Mechanics;
    fn zero() -> Self;
    fn hamiltonian2(v: &Expr) -> Self;
    /// Lift momentum-form coefficients `f_l p^l` along one coordinate.
    fn lift_momentum(fs: &[Expr], coord: Coord) -> Self;
    fn from_momentum_grid(g: Vec<Vec<Expr>>) -> Self;
    fn momentum_grid(&self) -> Vec<Vec<Expr>>;
    fn coeff_p(&self, i: usize, j: usize) -> Expr;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn scale(&self, c: &Expr) -> Self;
    fn product(&self, rhs: &Self) -> Self;
    fn bracket(&self, rhs: &Self) -> Self;
    /// Adjoint (quantum) or complex conjugate (classical).
    fn partner(&self) -> Self;
    fn pow(&self, n: u32) -> Self;
    fn is_zero(&self) -> bool;
    fn order(&self) -> Option<usize>;
}

impl Phase2 for DiffOp2 {
    const MECHANICS: Mechanics = Mechanics::Quantum;
    fn zero() -> Self {
        DiffOp2::zero()
    }
    fn hamiltonian2(v: &Expr) -> Self {
        DiffOp2::hamiltonian(v)
    }
    fn lift_momentum(fs: &[Expr], coord: Coord) -> Self {
        let m = Expr::imag().neg().mul(&Expr::param("hbar"));
        let coeffs: Vec<Expr> = fs
            .iter()
            .enumerate()
            .map(|(l, f)| f.mul(&m.pow_int(l as i64)))
            .collect();
        DiffOp2::lift(&coeffs, coord)
    }
    fn from_momentum_grid(g: Vec<Vec<Expr>>) -> Self {
        DiffOp2::from_momentum(g)
    }
    fn momentum_grid(&self) -> Vec<Vec<Expr>> {
        self.momentum_grid()
    }
    fn coeff_p(&self, i: usize, j: usize) -> Expr {
        let m = Expr::imag().neg().mul(&Expr::param("hbar"));
        self.coeff(i, j).mul(&m.pow_int(-((i + j) as i64)))
    }
    fn add(&self, rhs: &Self) -> Self {
        DiffOp2::add(self, rhs)
    }
    fn sub(&self, rhs: &Self) -> Self {
        DiffOp2::sub(self, rhs)
    }
    fn neg(&self) -> Self {
        DiffOp2::neg(self)
    }
    fn scale(&self, c: &Expr) -> Self {
        DiffOp2::scale(self, c)
    }
    fn product(&self, rhs: &Self) -> Self {
        self.compose(rhs)
    }
    fn bracket(&self, rhs: &Self) -> Self {
        self.commutator(rhs)
    }
    fn partner(&self) -> Self {
        self.adjoint()
    }
    fn pow(&self, n: u32) -> Self {
        DiffOp2::pow(self, n)
    }
    fn is_zero(&self) -> bool {
        DiffOp2::is_zero(self)
    }
    fn order(&self) -> Option<usize> {
        DiffOp2::order(self)
    }
}

impl Phase2 for PhasePoly2 {
    const MECHANICS: Mechanics = Mechanics::Classical;
    fn zero() -> Self {
        PhasePoly2::zero()
    }
    fn hamiltonian2(v: &Expr) -> Self {
        PhasePoly2::hamiltonian(v)
    }
    fn lift_momentum(fs: &[Expr], coord: Coord) -> Self {
        PhasePoly2::lift(fs, coord)
    }
    fn from_momentum_grid(g: Vec<Vec<Expr>>) -> Self {
        PhasePoly2::from_grid(g)
    }
    fn momentum_grid(&self) -> Vec<Vec<Expr>> {
        self.entries()
            .iter()
            .fold(Vec::new(), |mut acc, (i, j, c)| {
                if acc.len() <= *i {
                    acc.resize(i + 1, Vec::new());
                }
                if acc[*i].len() <= *j {
                    acc[*i].resize(j + 1, Expr::zero());
                }
                acc[*i][*j] = (*c).clone();
                acc
            })
    }
    fn coeff_p(&self, i: usize, j: usize) -> Expr {
        self.coeff(i, j)
    }
    fn add(&self, rhs: &Self) -> Self {
        PhasePoly2::add(self, rhs)
    }
    fn sub(&self, rhs: &Self) -> Self {
        PhasePoly2::sub(self, rhs)
    }
    fn neg(&self) -> Self {
        PhasePoly2::neg(self)
    }
    fn scale(&self, c: &Expr) -> Self {
        PhasePoly2::scale(self, c)
    }
    fn product(&self, rhs: &Self) -> Self {
        self.mul(rhs)
    }
    fn bracket(&self, rhs: &Self) -> Self {
        self.poisson(rhs)
    }
    fn partner(&self) -> Self {
        self.conjugate()
    }
    fn pow(&self, n: u32) -> Self {
        PhasePoly2::pow(self, n)
    }
    fn is_zero(&self) -> bool {
        PhasePoly2::is_zero(self)
    }
    fn order(&self) -> Option<usize> {
        PhasePoly2::order(self)
    }
}

/// A composed two-dimensional system: Hamiltonian, companion integral, the
/// universal second-order integral, and everything needed to verify and
/// reduce brackets.
#[derive(Clone, Debug)]
pub struct Composition<T: Phase2> {
    pub case: Case,
    pub h: T,
    pub k: T,
    /// `A = H1 - H2`, the separation-of-variables integral.
    pub a: T,
    pub h1: T,
    pub h2: T,
    pub expected_order: usize,
    /// Defining-ODE rewrite rules of both potentials (x- and y-coordinate).
    pub rules: Vec<RewriteRule>,
    /// DD only: `lambda = m alpha1 = n alpha2`.
    pub lambda: Option<Expr>,
    /// `kappa = alpha1^2 alpha2^2`.
    pub kappa: Expr,
    /// AD compositions are flagged trivial; `trivial_poly` is the
    /// polynomial `P` with `K2† K2- = P(H2)`.
    pub trivial: bool,
    pub trivial_poly: Option<Vec<Expr>>,
}

/// Mechanics-dispatched composition result.
pub enum Composed {
    Quantum(Composition<DiffOp2>),
    Classical(Composition<PhasePoly2>),
}

impl Composed {
    pub fn mechanics(&self) -> Mechanics {
        match self {
            Composed::Quantum(_) => Mechanics::Quantum,
            Composed::Classical(_) => Mechanics::Classical,
        }
    }

    pub fn check(&self) -> Result<SuperReport, ComposeError> {
        match self {
            Composed::Quantum(c) => check_superintegrable(c),
            Composed::Classical(c) => check_superintegrable(c),
        }
    }

    pub fn algebra(&self) -> Result<AlgebraStructure, ComposeError> {
        match self {
            Composed::Quantum(c) => algebra_structure(c),
            Composed::Classical(c) => algebra_structure(c),
        }
    }
}

fn find_entry<'a>(catalog: &'a Catalog, id: &str) -> Result<&'a CatalogEntry, ComposeError> {
    catalog
        .entries
        .iter()
        .find(|e| e.id == id)
        .ok_or_else(|| ComposeError::UnknownEntry(id.to_string()))
}

/// Rename a parameter for one axis: `hbar` is shared, the bracket constant
/// maps to `alpha1`/`alpha2`, every other parameter gets the axis suffix.
fn axis_param(name: &str, coord: Coord) -> String {
    if name == "hbar" {
        return name.to_string();
    }
    let side = if coord == Coord::X { "1" } else { "2" };
    if name == "alpha1" {
        return format!("alpha{side}");
    }
    format!("{name}{side}")
}

/// Move a stored (x-coordinate, shared-parameter) expression onto an axis:
/// rename parameters, swap the coordinate for the y axis, and substitute the
/// requested bracket constant.
fn onto_axis(e: &Expr, coord: Coord, alpha: &Expr) -> Expr {
    let renamed = e.map_atoms(&mut |a| match a {
        Atom::Param(name) => Atom::param(&axis_param(name, coord)),
        Atom::Coord(_) if coord == Coord::Y => Atom::Coord(Coord::Y),
        Atom::Fn { id, order, .. } if coord == Coord::Y => Atom::func(id, Coord::Y, *order),
        other => other.clone(),
    });
    let alpha_name = if coord == Coord::X { "alpha1" } else { "alpha2" };
    renamed.substitute(&crate::symkernel::Bindings::new().param(alpha_name, alpha.clone()))
}

/// One lifted entry: its potential term, companion coefficients, relation
/// kind, and axis-local rewrite rules.
struct Lifted {
    v: Expr,
    fs: Vec<Expr>,
    kind: RelationKind,
    rules: Vec<RewriteRule>,
}

fn lift_entry(entry: &CatalogEntry, coord: Coord, alpha: &Expr) -> Result<Lifted, ComposeError> {
    let (v, binds) = crate::catalog::working_potential(entry);
    let fs = entry
        .f
        .iter()
        .map(|f| onto_axis(&f.substitute(&binds), coord, alpha))
        .collect();
    let v = onto_axis(&v, coord, alpha);
    let mut rules = Vec::new();
    if let VerifyMode::SymbolicModOde { rules: ode_rules } = &entry.mode {
        for r in ode_rules {
            let rule = match r.rewrite()? {
                RewriteRule::Derivative { id, order, num, den, .. } => {
                    RewriteRule::Derivative {
                        id: Arc::from(axis_fn_id(&id)),
                        coord,
                        order,
                        num: onto_axis(&num, coord, alpha),
                        den: onto_axis(&den, coord, alpha),
                    }
                }
                RewriteRule::Power { id, order, power, num, .. } => RewriteRule::Power {
                    id: Arc::from(axis_fn_id(&id)),
                    coord,
                    order,
                    power,
                    num: onto_axis(&num, coord, alpha),
                },
            };
            rules.push(rule);
        }
    }
    Ok(Lifted { v, fs, kind: entry.relation.kind, rules })
}

/// Unknown-function names are shared between axes; the coordinate inside the
/// atom already disambiguates them.
fn axis_fn_id(id: &str) -> String {
    id.to_string()
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Compose two catalog entries per the spec. Entries must share mechanics
/// and match the case's relation classes.
pub fn compose(catalog: &Catalog, spec: &CompositionSpec) -> Result<Composed, ComposeError> {
    let ex = find_entry(catalog, &spec.entry_x)?;
    let ey = find_entry(catalog, &spec.entry_y)?;
    if ex.mechanics != ey.mechanics {
        return Err(ComposeError::MechanicsMismatch);
    }
    let (want_x, want_y) = spec.case.kinds();
    if !want_x.matches(ex.relation.kind) {
        return Err(ComposeError::KindMismatch {
            case: spec.case,
            side: "x",
            want: want_x,
            got: ex.relation.kind,
        });
    }
    if !want_y.matches(ey.relation.kind) {
        return Err(ComposeError::KindMismatch {
            case: spec.case,
            side: "y",
            want: want_y,
            got: ey.relation.kind,
        });
    }
    match ex.mechanics {
        Mechanics::Quantum => Ok(Composed::Quantum(compose_typed::<DiffOp2>(ex, ey, spec)?)),
        Mechanics::Classical => {
            Ok(Composed::Classical(compose_typed::<PhasePoly2>(ex, ey, spec)?))
        }
    }
}

fn compose_typed<T: Phase2>(
    ex: &CatalogEntry,
    ey: &CatalogEntry,
    spec: &CompositionSpec,
) -> Result<Composition<T>, ComposeError> {
    let lx = lift_entry(ex, Coord::X, &spec.alpha1)?;
    let ly = lift_entry(ey, Coord::Y, &spec.alpha2)?;
    let half = Expr::constant(Coeff::from_ratio(1, 2));
    let h1 = T::lift_momentum(&[lx.v.clone(), Expr::zero(), half.clone()], Coord::X);
    let h2 = T::lift_momentum(&[ly.v.clone(), Expr::zero(), half], Coord::Y);
    let h = h1.add(&h2);
    let a = h1.sub(&h2);
    let kx = T::lift_momentum(&lx.fs, Coord::X);
    let ky = T::lift_momentum(&ly.fs, Coord::Y);

    let mut lambda = None;
    let mut trivial = false;
    let mut trivial_poly = None;
    let k = match spec.case {
        Case::AA => kx.add(&ky),
        Case::BB => kx.scale(&spec.alpha2).sub(&ky.scale(&spec.alpha1)),
        Case::CB => kx
            .scale(&spec.alpha2)
            .sub(&h1.product(&ky).scale(&spec.alpha1)),
        Case::CC => h2
            .product(&kx)
            .scale(&spec.alpha2)
            .sub(&h1.product(&ky).scale(&spec.alpha1)),
        Case::DD => {
            if gcd(spec.m, spec.n) != 1 {
                return Err(ComposeError::NotCoprime(spec.m, spec.n));
            }
            let residual = spec
                .alpha1
                .scale(&Coeff::from_int(spec.m as i64))
                .sub(&spec.alpha2.scale(&Coeff::from_int(spec.n as i64)));
            if !residual.is_zero() {
                return Err(ComposeError::RationalityViolation(format!("{residual}")));
            }
            lambda = Some(spec.alpha1.scale(&Coeff::from_int(spec.m as i64)));
            let (k1m, k1p) = ladder_pair(&kx, lx.kind);
            let (k2m, k2p) = ladder_pair(&ky, ly.kind);
            k1p.pow(spec.m)
                .product(&k2m.pow(spec.n))
                .sub(&k1m.pow(spec.m).product(&k2p.pow(spec.n)))
        }
        Case::AD => {
            trivial = true;
            let (k2m, k2p) = ladder_pair(&ky, ly.kind);
            trivial_poly = Some(trivial_poly_of(ey, &spec.alpha2)?);
            kx.sub(&k2m.product(&k2p))
        }
    };

    let mut rules = lx.rules;
    rules.extend(ly.rules);
    let kappa = spec.alpha1.pow_int(2).mul(&spec.alpha2.pow_int(2));
    Ok(Composition {
        case: spec.case,
        h,
        k,
        a,
        h1,
        h2,
        expected_order: spec.case.expected_order(ex.m, ey.m, spec.m, spec.n),
        rules,
        lambda,
        kappa,
        trivial,
        trivial_poly,
    })
}

/// Orient a lifted ladder operator as (lowering, raising).
fn ladder_pair<T: Phase2>(k: &T, kind: RelationKind) -> (T, T) {
    match kind {
        RelationKind::LadderRaise => (k.partner(), k.clone()),
        _ => (k.clone(), k.partner()),
    }
}

/// `K2† K2- = P(H2)` computed on the stored one-dimensional entry, then
/// renamed onto the y axis.
fn trivial_poly_of(entry: &CatalogEntry, alpha: &Expr) -> Result<Vec<Expr>, ComposeError> {
    let q = crate::catalog::compute_ladder_poly(entry).map_err(|e| match e {
        crate::catalog::CatalogError::Ladder { source, .. } => ComposeError::Ladder(source),
        crate::catalog::CatalogError::Reduce { source, .. } => ComposeError::Reduce(source),
        other => ComposeError::Ladder(DetSysError::NotReducible(other.to_string())),
    })?;
    Ok(q.iter().map(|c| onto_axis(c, Coord::Y, alpha)).collect())
}

/// Superintegrability report: both brackets vanish (possibly modulo the
/// defining ODEs) and `{H, A, K}` pass the leading-symbol independence test.
#[derive(Clone, Debug, Serialize)]
pub struct SuperReport {
    pub hk_residual_is_zero: bool,
    pub ha_residual_is_zero: bool,
    pub order: Option<usize>,
    pub expected_order: usize,
    pub order_matches: bool,
    pub independent: bool,
}

impl SuperReport {
    pub fn superintegrable(&self) -> bool {
        self.hk_residual_is_zero && self.ha_residual_is_zero && self.independent
    }
}

/// Every momentum coefficient vanishes, by arithmetic or modulo `rules`.
fn reduced_zero<T: Phase2>(op: &T, rules: &[RewriteRule]) -> Result<bool, ReduceError> {
    for row in op.momentum_grid() {
        for c in row {
            let zero = if c.is_zero() {
                true
            } else if rules.is_empty() {
                false
            } else {
                reduces_to_zero(&c, rules)?
            };
            if !zero {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Leading-symbol independence of `K` from polynomials in `H1, H2`: the top
/// homogeneous momentum part must carry an odd power of either momentum or a
/// coordinate-dependent coefficient.
fn leading_symbol_independent<T: Phase2>(k: &T) -> bool {
    let Some(d) = k.order() else {
        return false;
    };
    let grid = k.momentum_grid();
    for (i, row) in grid.iter().enumerate() {
        for (j, c) in row.iter().enumerate() {
            if i + j != d || c.is_zero() {
                continue;
            }
            if i % 2 == 1 || j % 2 == 1 {
                return true;
            }
            if c.contains_atom(&mut |a| !matches!(a, Atom::Param(_))) {
                return true;
            }
        }
    }
    false
}

pub fn check_superintegrable<T: Phase2>(
    comp: &Composition<T>,
) -> Result<SuperReport, ComposeError> {
    let hk = comp.h.bracket(&comp.k);
    let ha = comp.h.bracket(&comp.a);
    let order = comp.k.order();
    Ok(SuperReport {
        hk_residual_is_zero: reduced_zero(&hk, &comp.rules)?,
        ha_residual_is_zero: reduced_zero(&ha, &comp.rules)?,
        order,
        expected_order: comp.expected_order,
        order_matches: order == Some(comp.expected_order),
        independent: leading_symbol_independent(&comp.k) && !comp.trivial,
    })
}

/// How a bracket reduces inside the polynomial algebra generated by
/// `A, B, H`.
#[derive(Clone, Debug, Serialize)]
pub enum BracketFit {
    Zero,
    /// A constant multiple of the identity (central).
    CentralConstant { constant: Expr },
    /// `constant * B`.
    MultipleOfB { constant: Expr },
    /// `sum constant * H1^i H2^j` (equivalently a polynomial in `A, H`).
    HPolynomial { coeffs: Vec<(u32, u32, Expr)> },
    Unresolved { residual: String },
}

impl BracketFit {
    pub fn is_zero(&self) -> bool {
        matches!(self, BracketFit::Zero)
    }
}

/// The polynomial algebra data for a composition: `C = [A, B]` and the
/// reduced forms of `[A, C]` and `[B, C]`.
#[derive(Clone, Debug, Serialize)]
pub struct AlgebraStructure {
    pub c: BracketFit,
    pub ac: BracketFit,
    pub bc: BracketFit,
    pub kappa: Expr,
    pub lambda: Option<Expr>,
}

/// Peel an operator as a polynomial in `H1, H2` with constant coefficients.
/// Returns `None` when a leading slot is odd, non-constant, or fails to
/// reduce.
fn h_polynomial_peel<T: Phase2>(
    op: &T,
    h1: &T,
    h2: &T,
    rules: &[RewriteRule],
) -> Result<Option<Vec<(u32, u32, Expr)>>, ReduceError> {
    let reduce = |e: &Expr| -> Result<Expr, ReduceError> {
        if rules.is_empty() {
            Ok(e.clone())
        } else {
            reduce_mod(e, rules)
        }
    };
    let mut rem = op.clone();
    let mut out: Vec<(u32, u32, Expr)> = Vec::new();
    for _ in 0..200 {
        // Reduce the grid and find the top total degree.
        let grid = rem.momentum_grid();
        let mut reduced: Vec<Vec<Expr>> = Vec::new();
        let mut top: Option<usize> = None;
        for (i, row) in grid.iter().enumerate() {
            let mut rrow = Vec::new();
            for (j, c) in row.iter().enumerate() {
                let rc = reduce(c)?;
                if !rc.is_zero() {
                    top = Some(top.map_or(i + j, |t| t.max(i + j)));
                }
                rrow.push(rc);
            }
            reduced.push(rrow);
        }
        let Some(d) = top else {
            out.sort();
            return Ok(Some(out));
        };
        rem = T::from_momentum_grid(reduced.clone());
        let mut progressed = false;
        for (i, row) in reduced.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                if i + j != d || c.is_zero() {
                    continue;
                }
                if i % 2 == 1 || j % 2 == 1 {
                    return Ok(None);
                }
                if c.contains_atom(&mut |a| !matches!(a, Atom::Param(_))) {
                    return Ok(None);
                }
                // H1^(i/2) H2^(j/2) has leading momentum coefficient 2^-(i+j)/2.
                let q = c.scale(&Coeff::from_int(2).pow(((i + j) / 2) as i64));
                let hp = h1.pow((i / 2) as u32).product(&h2.pow((j / 2) as u32));
                rem = rem.sub(&hp.scale(&q));
                out.push(((i / 2) as u32, (j / 2) as u32, q));
                progressed = true;
            }
        }
        if !progressed {
            return Ok(None);
        }
    }
    Ok(None)
}

/// Classify a bracket inside the algebra: zero, central constant, a constant
/// multiple of `B`, or a polynomial in `H1, H2`.
fn fit_bracket<T: Phase2>(
    op: &T,
    b: &T,
    h1: &T,
    h2: &T,
    rules: &[RewriteRule],
) -> Result<BracketFit, ComposeError> {
    if reduced_zero(op, rules)? {
        return Ok(BracketFit::Zero);
    }
    if op.order() == Some(0) {
        let c = op.coeff_p(0, 0);
        if !c.contains_atom(&mut |a| !matches!(a, Atom::Param(_))) {
            return Ok(BracketFit::CentralConstant { constant: c });
        }
    }
    if let Some(coeffs) = h_polynomial_peel(op, h1, h2, rules)? {
        return Ok(BracketFit::HPolynomial { coeffs });
    }
    // Constant multiple of B: fit from a leading slot, then verify.
    if let (Some(d), Some(db)) = (op.order(), b.order()) {
        if d == db {
            if let Some((i, j, cb)) = leading_slot(b, db) {
                let c = op.coeff_p(i, j).div(&cb);
                if !c.is_zero()
                    && !c.contains_atom(&mut |a| !matches!(a, Atom::Param(_)))
                    && reduced_zero(&op.sub(&b.scale(&c)), rules)?
                {
                    return Ok(BracketFit::MultipleOfB { constant: c });
                }
            }
        }
    }
    Ok(BracketFit::Unresolved { residual: format!("{op}") })
}

/// A top-degree slot of `b` whose momentum coefficient is a single term
/// (safe to divide by).
fn leading_slot<T: Phase2>(b: &T, d: usize) -> Option<(usize, usize, Expr)> {
    let grid = b.momentum_grid();
    for (i, row) in grid.iter().enumerate() {
        for (j, c) in row.iter().enumerate() {
            if i + j == d && !c.is_zero() && c.as_single_term().is_some() {
                return Some((i, j, c.clone()));
            }
        }
    }
    None
}

pub fn algebra_structure<T: Phase2>(
    comp: &Composition<T>,
) -> Result<AlgebraStructure, ComposeError> {
    let b = &comp.k;
    let c = comp.a.bracket(b);
    let ac = comp.a.bracket(&c);
    let bc = b.bracket(&c);
    Ok(AlgebraStructure {
        c: fit_bracket(&c, b, &comp.h1, &comp.h2, &comp.rules)?,
        ac: fit_bracket(&ac, b, &comp.h1, &comp.h2, &comp.rules)?,
        bc: fit_bracket(&bc, b, &comp.h1, &comp.h2, &comp.rules)?,
        kappa: comp.kappa.clone(),
        lambda: comp.lambda.clone(),
    })
}

/// Match a composed integral against a displayed compact form: the top
/// homogeneous momentum parts must agree up to one constant; the remainder,
/// if any, is reported when it is a pure polynomial in `H1, H2`.
#[derive(Clone, Debug, Serialize)]
pub struct CompactMatch {
    pub constant: Expr,
    pub leading_matches: bool,
    /// `Some` when `K - constant * compact` is exactly a polynomial in
    /// `H1, H2` (empty when the match is exact).
    pub residual_h_polynomial: Option<Vec<(u32, u32, Expr)>>,
}

pub fn match_compact<T: Phase2>(
    k: &T,
    compact: &T,
    h1: &T,
    h2: &T,
    rules: &[RewriteRule],
) -> Option<CompactMatch> {
    let d = k.order()?;
    if compact.order()? != d {
        return None;
    }
    let (i, j, cc) = leading_slot(compact, d)?;
    let c = k.coeff_p(i, j).div(&cc);
    if c.is_zero() || c.contains_atom(&mut |a| !matches!(a, Atom::Param(_))) {
        return None;
    }
    // Compare every top slot of both grids.
    let gk = k.momentum_grid();
    let gc = compact.momentum_grid();
    let rows = gk.len().max(gc.len());
    let mut leading_matches = true;
    for i in 0..rows {
        let cols = gk
            .get(i)
            .map_or(0, Vec::len)
            .max(gc.get(i).map_or(0, Vec::len));
        for j in 0..cols {
            if i + j != d {
                continue;
            }
            let am = k.coeff_p(i, j);
            let bm = compact.coeff_p(i, j);
            if !am.sub(&bm.mul(&c)).is_zero() {
                leading_matches = false;
            }
        }
    }
    let residual = k.sub(&compact.scale(&c));
    let residual_h_polynomial = if residual.is_zero() {
        Some(Vec::new())
    } else {
        h_polynomial_peel(&residual, h1, h2, rules).ok().flatten()
    };
    Some(CompactMatch { constant: c, leading_matches, residual_h_polynomial })
}

/// The angular compact form `(x p_y - y p_x) p_x^(m-1) p_y^(n-1)` displayed
/// for the harmonic DD ladder compositions.
pub fn angular_compact<T: Phase2>(m: u32, n: u32) -> T {
    let m = m as usize;
    let n = n as usize;
    let mut grid: Vec<Vec<Expr>> = vec![vec![Expr::zero(); n + 1]; m + 1];
    grid[m - 1][n] = Expr::x();
    grid[m][n - 1] = Expr::y().neg();
    T::from_momentum_grid(grid)
}

/// Dispatch-free helpers when the caller holds the typed composition.
impl Composition<DiffOp2> {
    pub fn mechanics(&self) -> Mechanics {
        Mechanics::Quantum
    }
}

impl Composition<PhasePoly2> {
    pub fn mechanics(&self) -> Mechanics {
        Mechanics::Classical
    }
}


// AD's trivial polynomial needs the 1D ladder product; keep a direct path
// for callers holding raw coefficient data.
pub fn ladder_product_1d(
    mechanics: Mechanics,
    f_lower: &[Expr],
    f_raise: &[Expr],
    v: &Expr,
    rules: &[RewriteRule],
) -> Result<Vec<Expr>, DetSysError> {
    match mechanics {
        Mechanics::Quantum => {
            let lo = DiffOp::from_momentum(f_lower);
            let hi = DiffOp::from_momentum(f_raise);
            ladder_product(&hi.compose(&lo), &DiffOp::hamiltonian(v), rules)
        }
        Mechanics::Classical => {
            let lo = PhasePoly::from_coeffs(f_lower.to_vec());
            let hi = PhasePoly::from_coeffs(f_raise.to_vec());
            ladder_product_classical(&hi.mul(&lo), &PhasePoly::hamiltonian(v), rules)
        }
    }
}
