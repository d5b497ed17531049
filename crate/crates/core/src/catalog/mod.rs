//! The machine-checked inventory of one-dimensional algebraic Hamiltonian
//! pairs, plus the named two-dimensional families assembled from them.
//!
//! Each entry records the mechanics, the bracket relation, the companion
//! operator's momentum coefficients, the potential (closed form or defining
//! ODE), and a verification recipe. Verification rebuilds H and K and checks
//! the bracket relation exactly — either by plain arithmetic (closed forms)
//! or modulo the defining ODE of the potential. Ladder entries additionally
//! express K†K as a polynomial in H.

mod builtin;

pub use builtin::builtin;

use crate::detsys::{
    ladder_product, ladder_product_classical, DetSysError, Mechanics, PotentialSpec,
};
use crate::opalg::{
    check_relation_classical, check_relation_quantum, AlgebraRelation, DiffOp, PhasePoly,
    RelationKind,
};
use crate::symkernel::{
    reduces_to_zero, Bindings, Coord, Expr, ReduceError, RewriteRule,
};
use serde::{Deserialize, Serialize};
use std::sync::Arc;
use thiserror::Error;

/// Catalog format version; bump on structural or content changes.
pub const CATALOG_VERSION: u32 = 1;

/// Environment variable naming an alternative catalog JSON file.
pub const CATALOG_PATH_VAR: &str = "ALGHAM_CATALOG";

const BUNDLED_JSON: &str = include_str!("../../data/catalog.json");

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct Catalog {
    pub version: u32,
    pub entries: Vec<CatalogEntry>,
    pub families: Vec<FamilyEntry>,
}

/// A serializable rewrite rule: the defining ODE (or a power relation) of an
/// ODE-defined potential, used to reduce residuals.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub enum OdeRule {
    /// `equation == 0`, solved for the highest derivative of `unknown`.
    TopDerivative { unknown: String, equation: Expr },
    /// `(unknown^(order))^power == replacement`.
    PowerOfDerivative {
        unknown: String,
        order: u32,
        power: i64,
        replacement: Expr,
    },
}

impl OdeRule {
    pub fn rewrite(&self) -> Result<RewriteRule, ReduceError> {
        match self {
            OdeRule::TopDerivative { unknown, equation } => {
                RewriteRule::from_equation(equation, unknown, Coord::X)
            }
            OdeRule::PowerOfDerivative { unknown, order, power, replacement } => {
                Ok(RewriteRule::Power {
                    id: Arc::from(unknown.as_str()),
                    coord: Coord::X,
                    order: *order,
                    power: *power,
                    num: replacement.clone(),
                })
            }
        }
    }
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub enum VerifyMode {
    /// Residual vanishes by plain arithmetic after substituting the closed
    /// form (or with the potential left fully symbolic).
    SymbolicClosed,
    /// Residual vanishes after reduction modulo the listed rules.
    SymbolicModOde { rules: Vec<OdeRule> },
    /// Residual checked numerically by the jet integrator.
    NumericJet,
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub id: String,
    pub mechanics: Mechanics,
    pub m: usize,
    pub relation: AlgebraRelation,
    pub potential: PotentialSpec,
    /// Momentum-form coefficients f_0..f_M of K. Ladder entries store the
    /// member named by `relation.kind`; the partner is the adjoint
    /// (conjugate, classically).
    pub f: Vec<Expr>,
    pub mode: VerifyMode,
    /// Ladder entries: coefficients q_0..q_n of K† K = sum_j q_j H^j.
    pub ladder_poly: Option<Vec<Expr>>,
    pub annotations: Vec<String>,
}

/// A named two-dimensional potential family and the composition that builds
/// it.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct FamilyEntry {
    pub id: String,
    /// Potential template in x and y.
    pub potential: Expr,
    pub parameters: Vec<String>,
    /// Which composition case generates the family.
    pub construction: String,
}

/// Coarse relation type for filtering ("a" through "d").
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum KindClass {
    Abelian,
    Heisenberg,
    Conformal,
    Ladder,
}

impl KindClass {
    pub fn matches(self, kind: RelationKind) -> bool {
        match self {
            KindClass::Abelian => kind == RelationKind::Abelian,
            KindClass::Heisenberg => kind == RelationKind::Heisenberg,
            KindClass::Conformal => kind == RelationKind::Conformal,
            KindClass::Ladder => {
                matches!(kind, RelationKind::LadderLower | RelationKind::LadderRaise)
            }
        }
    }
}

#[derive(Clone, Copy, Default, Debug)]
pub struct EntryFilter {
    pub mechanics: Option<Mechanics>,
    pub kind: Option<KindClass>,
    pub m: Option<usize>,
}

/// Entries passing the filter, in catalog (deterministic) order.
pub fn list_entries<'a>(catalog: &'a Catalog, filter: &EntryFilter) -> Vec<&'a CatalogEntry> {
    catalog
        .entries
        .iter()
        .filter(|e| {
            filter.mechanics.map_or(true, |m| e.mechanics == m)
                && filter.kind.map_or(true, |k| k.matches(e.relation.kind))
                && filter.m.map_or(true, |m| e.m == m)
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub id: String,
    pub residual_is_zero: bool,
    /// Recomputed K†K polynomial for ladder entries.
    pub ladder_poly: Option<Vec<Expr>>,
}

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("no catalog entry named {0}")]
    UnknownEntry(String),
    #[error("entry {id}: nonzero residual in p^{level}: {residual}")]
    VerificationFailed {
        id: String,
        level: usize,
        residual: String,
    },
    #[error("entry {id}: {source}")]
    Reduce { id: String, source: ReduceError },
    #[error("entry {id}: ladder product: {source}")]
    Ladder { id: String, source: DetSysError },
    #[error("entry {id}: K†K changed: stored {stored:?}, recomputed {got:?}")]
    LadderPolyMismatch {
        id: String,
        stored: Vec<String>,
        got: Vec<String>,
    },
    #[error("reading catalog: {0}")]
    Io(#[from] std::io::Error),
    #[error("parsing catalog: {0}")]
    Json(#[from] serde_json::Error),
    #[error("catalog version {got}, expected {expected}")]
    VersionMismatch { got: u32, expected: u32 },
}

/// Load the bundled catalog, or the file named by `ALGHAM_CATALOG` when set.
pub fn load() -> Result<Catalog, CatalogError> {
    let catalog: Catalog = match std::env::var(CATALOG_PATH_VAR) {
        Ok(path) => serde_json::from_str(&std::fs::read_to_string(path)?)?,
        Err(_) => serde_json::from_str(BUNDLED_JSON)?,
    };
    if catalog.version != CATALOG_VERSION {
        return Err(CatalogError::VersionMismatch {
            got: catalog.version,
            expected: CATALOG_VERSION,
        });
    }
    Ok(catalog)
}

/// Verify one entry by id.
pub fn verify_entry(catalog: &Catalog, id: &str) -> Result<VerifyReport, CatalogError> {
    let entry = catalog
        .entries
        .iter()
        .find(|e| e.id == id)
        .ok_or_else(|| CatalogError::UnknownEntry(id.to_string()))?;
    verify(entry)
}

/// Verify every entry, failing on the first violation.
pub fn verify_all(catalog: &Catalog) -> Result<Vec<VerifyReport>, CatalogError> {
    catalog.entries.iter().map(verify).collect()
}

/// The working potential for an entry and the substitution to apply to the
/// stored coefficient functions (closed forms are written in terms of a
/// symbolic V, which the binding resolves).
pub(crate) fn working_potential(entry: &CatalogEntry) -> (Expr, Bindings) {
    match &entry.potential {
        PotentialSpec::ClosedForm { v } => {
            (v.clone(), Bindings::new().func("V", Coord::X, v.clone()))
        }
        PotentialSpec::Ode { unknown, .. } if unknown == "u" => {
            (Expr::unknown("u", Coord::X, 1), Bindings::new())
        }
        _ => (Expr::unknown("V", Coord::X, 0), Bindings::new()),
    }
}

fn verify(entry: &CatalogEntry) -> Result<VerifyReport, CatalogError> {
    let (v, binds) = working_potential(entry);
    let fs: Vec<Expr> = entry.f.iter().map(|f| f.substitute(&binds)).collect();
    let rules: Vec<RewriteRule> = match &entry.mode {
        VerifyMode::SymbolicModOde { rules } => rules
            .iter()
            .map(|r| r.rewrite())
            .collect::<Result<_, _>>()
            .map_err(|source| CatalogError::Reduce { id: entry.id.clone(), source })?,
        _ => Vec::new(),
    };

    let residual_coeffs: Vec<Expr> = match entry.mechanics {
        Mechanics::Quantum => {
            let h = DiffOp::hamiltonian(&v);
            let k = DiffOp::from_momentum(&fs);
            check_relation_quantum(&h, &k, &entry.relation).momentum_coeffs()
        }
        Mechanics::Classical => {
            let h = PhasePoly::hamiltonian(&v);
            let k = PhasePoly::from_coeffs(fs.clone());
            check_relation_classical(&h, &k, &entry.relation)
                .coeffs()
                .to_vec()
        }
    };
    for (level, c) in residual_coeffs.iter().enumerate() {
        let zero = if rules.is_empty() {
            c.is_zero()
        } else {
            reduces_to_zero(c, &rules)
                .map_err(|source| CatalogError::Reduce { id: entry.id.clone(), source })?
        };
        if !zero {
            return Err(CatalogError::VerificationFailed {
                id: entry.id.clone(),
                level,
                residual: format!("{c}"),
            });
        }
    }

    let ladder_poly = if entry.ladder_poly.is_some() {
        let q = compute_ladder_poly(entry)?;
        if let Some(stored) = &entry.ladder_poly {
            if stored != &q {
                return Err(CatalogError::LadderPolyMismatch {
                    id: entry.id.clone(),
                    stored: stored.iter().map(|e| format!("{e}")).collect(),
                    got: q.iter().map(|e| format!("{e}")).collect(),
                });
            }
        }
        Some(q)
    } else {
        None
    };

    Ok(VerifyReport {
        id: entry.id.clone(),
        residual_is_zero: true,
        ladder_poly,
    })
}

/// K†K as a polynomial in H for a ladder entry, reduced by the entry's rules.
pub(crate) fn compute_ladder_poly(entry: &CatalogEntry) -> Result<Vec<Expr>, CatalogError> {
    let (v, binds) = working_potential(entry);
    let fs: Vec<Expr> = entry.f.iter().map(|f| f.substitute(&binds)).collect();
    let rules: Vec<RewriteRule> = match &entry.mode {
        VerifyMode::SymbolicModOde { rules } => rules
            .iter()
            .map(|r| r.rewrite())
            .collect::<Result<_, _>>()
            .map_err(|source| CatalogError::Reduce { id: entry.id.clone(), source })?,
        _ => Vec::new(),
    };
    match entry.mechanics {
        Mechanics::Quantum => {
            let h = DiffOp::hamiltonian(&v);
            let k = DiffOp::from_momentum(&fs);
            let (lower, upper) = oriented(entry.relation.kind, k.clone(), k.adjoint());
            ladder_product(&upper.compose(&lower), &h, &rules)
        }
        Mechanics::Classical => {
            let h = PhasePoly::hamiltonian(&v);
            let k = PhasePoly::from_coeffs(fs);
            let (lower, upper) = oriented(entry.relation.kind, k.clone(), k.conjugate());
            ladder_product_classical(&upper.mul(&lower), &h, &rules)
        }
    }
    .map_err(|source| CatalogError::Ladder { id: entry.id.clone(), source })
}

/// Order the stored operator and its partner as (lowering, raising).
fn oriented<T>(kind: RelationKind, stored: T, partner: T) -> (T, T) {
    match kind {
        RelationKind::LadderRaise => (partner, stored),
        _ => (stored, partner),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detsys::{generate, solve, SolveOptions};
    use crate::symkernel::Coeff;
    use once_cell::sync::Lazy;

    static CATALOG: Lazy<Catalog> = Lazy::new(builtin);

    #[test]
    fn every_entry_verifies() {
        let reports = verify_all(&CATALOG).unwrap();
        assert_eq!(reports.len(), CATALOG.entries.len());
        assert_eq!(CATALOG.entries.len(), 33);
        assert!(reports.iter().all(|r| r.residual_is_zero));
    }

    #[test]
    fn bundled_json_matches_builtin() {
        let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/catalog.json");
        if std::env::var("UPDATE_CATALOG_JSON").is_ok() {
            let json = serde_json::to_string_pretty(&*CATALOG).unwrap();
            std::fs::write(path, json).unwrap();
        }
        let loaded: Catalog =
            serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
        assert_eq!(loaded, *CATALOG);
    }

    #[test]
    fn load_returns_bundled_catalog() {
        let cat = load().unwrap();
        assert_eq!(cat.version, CATALOG_VERSION);
        assert_eq!(cat, *CATALOG);
    }

    #[test]
    fn filters_select_expected_ids() {
        let ids = |f: &EntryFilter| -> Vec<&str> {
            list_entries(&CATALOG, f).iter().map(|e| e.id.as_str()).collect()
        };
        assert_eq!(
            ids(&EntryFilter {
                mechanics: Some(Mechanics::Classical),
                kind: Some(KindClass::Ladder),
                m: None,
            }),
            vec!["c-d1", "c-d2", "c-d3", "c-d4", "c-d5"]
        );
        assert_eq!(
            ids(&EntryFilter {
                mechanics: Some(Mechanics::Quantum),
                kind: None,
                m: Some(5),
            }),
            vec!["q-a5", "q-b5", "q-c5", "q-d5"]
        );
        assert_eq!(ids(&EntryFilter::default()).len(), 33);
    }

    #[test]
    fn unknown_entry_is_an_error() {
        assert!(matches!(
            verify_entry(&CATALOG, "q-z9"),
            Err(CatalogError::UnknownEntry(_))
        ));
    }

    fn potential_of(id: &str) -> &PotentialSpec {
        &CATALOG.entries.iter().find(|e| e.id == id).unwrap().potential
    }

    /// Expressions equal up to a single-term constant factor.
    fn proportional(a: &Expr, b: &Expr) -> bool {
        let (mb, cb) = b.leading().unwrap();
        let lb = crate::symkernel::normalize_term(cb.clone(), mb.factors.clone());
        a.terms().any(|(m, c)| {
            let t = crate::symkernel::normalize_term(c.clone(), m.factors.clone()).div(&lb);
            &b.mul(&t) == a
        })
    }

    #[test]
    fn paired_hamiltonians_coincide_after_renaming() {
        // alpha1 -> beta alpha1 maps each order-(M+1) potential onto its
        // order-M partner (b1/b2, b3/b4); c3/c4 match after scaling V by
        // 1/beta; the two Weierstrass entries store one potential.
        let beta_alpha = Bindings::new()
            .param("alpha1", Expr::param("beta").mul(&Expr::param("alpha1")));
        for (small, large) in [("c-b1", "c-b2"), ("c-b3", "c-b4")] {
            let PotentialSpec::ClosedForm { v: vs } = potential_of(small) else {
                panic!("expected closed form for {small}");
            };
            let PotentialSpec::ClosedForm { v: vl } = potential_of(large) else {
                panic!("expected closed form for {large}");
            };
            assert_eq!(&vl.substitute(&beta_alpha), vs, "{small} vs {large}");
        }
        assert_eq!(potential_of("q-a3"), potential_of("q-a4"));
        for (small, large) in [("c-c3", "c-c4"), ("q-b3", "q-b4")] {
            let PotentialSpec::Ode { equation: es, .. } = potential_of(small) else {
                panic!("expected ODE for {small}");
            };
            let PotentialSpec::Ode { equation: el, .. } = potential_of(large) else {
                panic!("expected ODE for {large}");
            };
            let renamed = match *small {
                // c4's condition scales V by beta; b4's scales alpha1.
                _ if small.starts_with("c-c") => el.substitute(
                    &Bindings::new().func(
                        "V",
                        Coord::X,
                        Expr::unknown("V", Coord::X, 0).div(&Expr::param("beta")),
                    ),
                ),
                _ => el.substitute(&beta_alpha),
            };
            assert!(
                proportional(&renamed, es),
                "{small} vs {large}: {renamed} vs {es}"
            );
        }
    }

    #[test]
    fn harmonic_ladder_polynomials() {
        let q = |id: &str| {
            CATALOG
                .entries
                .iter()
                .find(|e| e.id == id)
                .unwrap()
                .ladder_poly
                .clone()
                .unwrap()
        };
        // K†K = 2H - alpha1 (quantum) and K+K- = 2H (classical).
        assert_eq!(q("q-d1"), vec![Expr::param("alpha1").neg(), Expr::int(2)]);
        assert_eq!(q("c-d1"), vec![Expr::zero(), Expr::int(2)]);
        // Singular oscillator: 4H^2 - 2 alpha1 H - 2 alpha1^2 gamma/hbar^2.
        let a1 = Expr::param("alpha1");
        let want0 = a1
            .pow_int(2)
            .mul(&Expr::param("gamma"))
            .scale(&Coeff::from_int(-2))
            .div(&Expr::param("hbar").pow_int(2));
        assert_eq!(
            q("q-d2"),
            vec![want0, a1.scale(&Coeff::from_int(-2)), Expr::int(4)]
        );
    }

    #[test]
    fn order_five_ladder_conditions_imply_descent_consistency() {
        // The solver's raw consistency condition (order 7 quantum, order 3
        // classical) reduces to zero modulo the stored lower-order equation.
        for (mech, id) in [(Mechanics::Quantum, "q-d5"), (Mechanics::Classical, "c-d5")] {
            let sys = generate(mech, 5, RelationKind::LadderLower).unwrap();
            let pairs = solve(&sys, &SolveOptions::default()).unwrap();
            let PotentialSpec::Ode { equation: raw, .. } = &pairs[0].potential else {
                panic!("expected ODE");
            };
            let PotentialSpec::Ode { equation: stored, .. } = potential_of(id) else {
                panic!("expected ODE for {id}");
            };
            let rule = RewriteRule::from_equation(stored, "u", Coord::X).unwrap();
            assert!(
                reduces_to_zero(raw, &[rule]).unwrap(),
                "{id}: consistency condition is not implied by the stored equation"
            );
        }
    }

    #[test]
    fn family_list_is_stable() {
        let ids: Vec<&str> = CATALOG.families.iter().map(|f| f.id.as_str()).collect();
        assert_eq!(ids, vec!["jauch-hill", "smorodinsky-winternitz", "caged"]);
        for f in &CATALOG.families {
            assert!(!f.potential.is_zero());
            assert!(f.construction.contains("ladder x ladder"));
        }
    }
}
