//! Construction of the built-in catalog.
//!
//! Entries are produced by rerunning the determining-system solver, so the
//! stored coefficient functions and potential conditions are exactly what the
//! construction yields; the annotations record alternative published forms
//! (including known misprints) and transcendent identifications. Exceptions
//! where a lower-order equivalent replaces the solver's raw condition are
//! annotated on the entry and asserted equivalent by tests.

use super::{
    compute_ladder_poly, Catalog, CatalogEntry, FamilyEntry, OdeRule, VerifyMode,
    CATALOG_VERSION,
};
use crate::detsys::{generate, solve, Mechanics, PotentialSpec, SolveOptions, SolvedPair};
use crate::opalg::{AlgebraRelation, RelationKind};
use crate::symkernel::{Atom, Coeff, Coord, Expr};

fn solved(mech: Mechanics, m: usize, kind: RelationKind) -> Vec<SolvedPair> {
    let sys = generate(mech, m, kind).expect("system generates");
    solve(&sys, &SolveOptions::default()).expect("system solves")
}

fn branch(mech: Mechanics, m: usize, kind: RelationKind, index: usize) -> SolvedPair {
    solved(mech, m, kind).swap_remove(index)
}

fn entry(id: &str, p: SolvedPair, mode: VerifyMode, annotations: &[&str]) -> CatalogEntry {
    CatalogEntry {
        id: id.to_string(),
        mechanics: p.mechanics,
        m: p.m,
        relation: p.relation,
        potential: p.potential,
        f: p.f,
        mode,
        ladder_poly: None,
        annotations: annotations.iter().map(|s| s.to_string()).collect(),
    }
}

/// Verification rules straight from the entry's own ODE condition.
fn mode_from_ode(p: &SolvedPair) -> VerifyMode {
    let PotentialSpec::Ode { unknown, equation, .. } = &p.potential else {
        panic!("expected ODE potential, got {:?}", p.potential);
    };
    VerifyMode::SymbolicModOde {
        rules: vec![OdeRule::TopDerivative {
            unknown: unknown.clone(),
            equation: equation.clone(),
        }],
    }
}

/// Power rule `(w^(order))^2 = ...` from a condition quadratic in that
/// derivative with a constant quadratic coefficient.
fn power_rule_from_quadratic(condition: &Expr, unknown: &str, order: u32) -> OdeRule {
    let atom = Atom::func(unknown, Coord::X, order);
    let poly = condition
        .as_poly_in(&atom)
        .expect("condition polynomial in the derivative");
    let c2 = poly.get(&2).expect("quadratic term present").clone();
    let target = Expr::from_atom(atom).pow_int(2);
    let rest = condition.sub(&target.mul(&c2));
    OdeRule::PowerOfDerivative {
        unknown: unknown.to_string(),
        order,
        power: 2,
        replacement: rest.neg().div(&c2),
    }
}

fn hbar() -> Expr {
    Expr::param("hbar")
}

fn a1(n: i64) -> Expr {
    Expr::param("alpha1").pow_int(n)
}

fn xp(n: i64) -> Expr {
    Expr::x().pow_int(n)
}

fn u(order: u32) -> Expr {
    Expr::unknown("u", Coord::X, order)
}

fn wp(order: u32) -> Expr {
    Expr::unknown("wp", Coord::X, order)
}

/// Rules for the Weierstrass function: wp'' = 6 wp^2 - g2/2 and
/// (wp')^2 = 4 wp^3 - g2 wp - g3.
fn weierstrass_rules() -> Vec<OdeRule> {
    vec![
        OdeRule::TopDerivative {
            unknown: "wp".to_string(),
            equation: wp(2)
                .sub(&wp(0).pow_int(2).scale(&Coeff::from_int(6)))
                .add(&Expr::param("g2").scale(&Coeff::from_ratio(1, 2))),
        },
        OdeRule::PowerOfDerivative {
            unknown: "wp".to_string(),
            order: 1,
            power: 2,
            replacement: wp(0)
                .pow_int(3)
                .scale(&Coeff::from_int(4))
                .sub(&Expr::param("g2").mul(&wp(0)))
                .sub(&Expr::param("g3")),
        },
    ]
}

/// The sixth-order equation for the antiderivative u of the order-5 quantum
/// ladder potential. The solver's descent consistency condition is seventh
/// order and is a differential consequence of this equation (asserted by
/// tests); this is its first integral with the constant fixed by the
/// lowest-order determining equation.
pub(crate) fn sixth_order_quantum_ladder_equation() -> Expr {
    let hb = |n: i64| hbar().pow_int(n);
    let int = |n: i64| Expr::one().scale(&Coeff::from_int(n));
    int(9)
        .mul(&hb(10))
        .mul(&Expr::x().mul(&u(6)).sub(&u(5)))
        .add(
            &int(18)
                .mul(&hb(6))
                .mul(&Expr::x())
                .mul(
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
        .sub(&a1(6).mul(&xp(6)))
}

/// The second-order equation for the antiderivative u of the order-5
/// classical ladder potential; the solver's third-order consistency condition
/// is a differential consequence (asserted by tests).
pub(crate) fn second_order_classical_ladder_equation() -> Expr {
    a1(4)
        .mul(&xp(4))
        .sub(&a1(2).mul(&Expr::x()).mul(&u(0)).scale(&Coeff::from_int(24)))
        .sub(&a1(2).mul(&xp(2)).mul(&u(1)).scale(&Coeff::from_int(36)))
        .add(&u(1).pow_int(2).scale(&Coeff::from_int(180)))
        .mul(&Expr::x())
        .mul(&u(2))
        .sub(&u(1).pow_int(3).scale(&Coeff::from_int(60)))
        .sub(&a1(2).mul(&xp(2)).mul(&u(1).pow_int(2)).scale(&Coeff::from_int(78)))
        .sub(&a1(2).mul(&Expr::x()).mul(&u(0)).mul(&u(1)).scale(&Coeff::from_int(24)))
        .add(&a1(4).mul(&xp(4)).mul(&u(1)).scale(&Coeff::from_int(7)))
        .add(&a1(2).mul(&u(0).pow_int(2)).scale(&Coeff::from_int(12)))
        .add(&a1(4).mul(&xp(3)).mul(&u(0)).scale(&Coeff::from_int(8)))
        .sub(&a1(6).mul(&xp(6)).scale(&Coeff::from_ratio(1, 6)))
}

/// Replace a solved pair's ODE condition by an equivalent (lower-order)
/// equation and the matching verification rules.
fn override_ode(p: &mut SolvedPair, equation: Expr, order: u32) -> VerifyMode {
    p.potential = PotentialSpec::Ode {
        unknown: "u".to_string(),
        order,
        equation: equation.clone(),
    };
    VerifyMode::SymbolicModOde {
        rules: vec![OdeRule::TopDerivative {
            unknown: "u".to_string(),
            equation,
        }],
    }
}

fn quantum_entries(entries: &mut Vec<CatalogEntry>) {
    use Mechanics::Quantum as Q;
    use RelationKind::*;

    entries.push(entry(
        "q-a2",
        branch(Q, 2, Abelian, 1),
        VerifyMode::SymbolicClosed,
        &["beta = 0 branch: K = 2H commutes with any potential; the beta != 0 branch forces V constant"],
    ));

    let wp_potential = PotentialSpec::ClosedForm {
        v: hbar().pow_int(2).mul(&wp(0)),
    };
    let mut a3 = branch(Q, 3, Abelian, 0);
    a3.potential = wp_potential.clone();
    entries.push(entry(
        "q-a3",
        a3,
        VerifyMode::SymbolicModOde { rules: weierstrass_rules() },
        &[
            "V = hbar^2 wp(x; g2, g3), the Weierstrass elliptic function; the solver's condition V'' = 6 V^2/hbar^2 is the g2 = 0 slice and the general invariants enter through the wp rules",
        ],
    ));

    entries.push(CatalogEntry {
        id: "q-a3-special".to_string(),
        mechanics: Q,
        m: 3,
        relation: AlgebraRelation::abelian(),
        potential: PotentialSpec::ClosedForm {
            v: hbar().pow_int(2).div(&xp(2)),
        },
        f: vec![
            Expr::imag()
                .mul(&hbar().pow_int(3))
                .scale(&Coeff::from_int(6))
                .div(&xp(3)),
            hbar().pow_int(2).scale(&Coeff::from_int(6)).div(&xp(2)),
            Expr::zero(),
            Expr::int(2),
        ],
        mode: VerifyMode::SymbolicClosed,
        ladder_poly: None,
        annotations: vec![
            "degenerate Weierstrass case g2 = g3 = 0 (wp = 1/x^2): V = hbar^2/x^2 with K = 2p^3 + {3 hbar^2/x^2, p}".to_string(),
        ],
    });

    let mut a4 = branch(Q, 4, Abelian, 0);
    a4.potential = wp_potential;
    entries.push(entry(
        "q-a4",
        a4,
        VerifyMode::SymbolicModOde { rules: weierstrass_rules() },
        &[
            "same Weierstrass potential as q-a3 (the two Hamiltonians coincide); the condition carries an overall factor beta",
            "published form misprints the f_0 block (duplicated p^2 term); the solver output stored here is authoritative",
        ],
    ));

    let a5 = branch(Q, 5, Abelian, 0);
    let a5_mode = mode_from_ode(&a5);
    entries.push(entry(
        "q-a5",
        a5,
        a5_mode,
        &[
            "potential defined by hbar^4 V'''' - 20 hbar^2 V V'' - 10 hbar^2 V'^2 + 40 V^3 = 0 (up to an overall constant), solvable by inversion of hyperelliptic integrals; the inversion formulas are not mechanized",
        ],
    ));

    entries.push(entry(
        "q-b1",
        branch(Q, 1, Heisenberg, 0),
        VerifyMode::SymbolicClosed,
        &["linear potential V = alpha1 x/(i hbar), K = p"],
    ));
    entries.push(entry(
        "q-b2",
        branch(Q, 2, Heisenberg, 0),
        VerifyMode::SymbolicClosed,
        &["same linear potential as q-b1 up to alpha1 -> beta alpha1"],
    ));
    let b3 = branch(Q, 3, Heisenberg, 0);
    let b3_mode = mode_from_ode(&b3);
    entries.push(entry(
        "q-b3",
        b3,
        b3_mode,
        &["condition V'' = 6 V^2/hbar^2 + 4 i alpha1 x/hbar^3: a scaled first Painleve transcendent"],
    ));
    let b4 = branch(Q, 4, Heisenberg, 0);
    let b4_mode = mode_from_ode(&b4);
    entries.push(entry(
        "q-b4",
        b4,
        b4_mode,
        &["same first-Painleve potential as q-b3 up to constant rescaling (the two Hamiltonians coincide)"],
    ));
    let b5 = branch(Q, 5, Heisenberg, 0);
    let b5_mode = mode_from_ode(&b5);
    entries.push(entry(
        "q-b5",
        b5,
        b5_mode,
        &["fourth-order condition: the order-5 abelian equation driven by a -alpha1 x forcing term"],
    ));

    entries.push(entry(
        "q-c2",
        branch(Q, 2, Conformal, 1),
        VerifyMode::SymbolicClosed,
        &[
            "beta = 0 branch: V = gamma/x^2; the general branch keeps a free constant and a first-order condition",
        ],
    ));
    let c3 = branch(Q, 3, Conformal, 0);
    let c3_mode = mode_from_ode(&c3);
    entries.push(entry(
        "q-c3",
        c3,
        c3_mode,
        &[
            "third-order condition; one integration gives a second-order equation with constant k",
            "k = 0 sub-branch: equation of Ince type XXXIV, solved by the second Painleve transcendent; k != 0 sub-branch also reduces to P2 after scaling — both identifications are annotation-only",
        ],
    ));
    let c4 = branch(Q, 4, Conformal, 0);
    let c4_mode = mode_from_ode(&c4);
    entries.push(entry(
        "q-c4",
        c4,
        c4_mode,
        &[
            "general branch (condition carries a factor beta); the beta = 0 branch reproduces the q-c2 potential gamma/x^2",
        ],
    ));
    let c5 = branch(Q, 5, Conformal, 0);
    let c5_mode = mode_from_ode(&c5);
    entries.push(entry(
        "q-c5",
        c5,
        c5_mode,
        &["fifth-order condition: the order-5 abelian operator driven by the conformal term"],
    ));

    entries.push(entry(
        "q-d1",
        branch(Q, 1, LadderLower, 0),
        VerifyMode::SymbolicClosed,
        &["harmonic oscillator V = alpha1^2 x^2/(2 hbar^2); K is the lowering operator, K† its raising partner"],
    ));
    entries.push(entry(
        "q-d2",
        branch(Q, 2, LadderLower, 0),
        VerifyMode::SymbolicClosed,
        &[
            "singular oscillator V = alpha1^2 x^2/(8 hbar^2) + gamma/x^2 - alpha1/4",
            "a published variant drops a power of alpha1 in the x^2 term; dimensional analysis and the solver agree on alpha1^2",
        ],
    ));
    let d3 = branch(Q, 3, LadderLower, 0);
    let d3_mode = mode_from_ode(&d3);
    entries.push(entry(
        "q-d3",
        d3,
        d3_mode,
        &[
            "third-order condition for the antiderivative u (V = u'); V resolves through the fourth Painleve transcendent: V = eps alpha1 P4' + 2 alpha1^2 (P4^2 + x P4)/hbar^2 + alpha1^2 x^2/(2 hbar^2) + (eps - 1) alpha1/3 - hbar^2 k1/6",
        ],
    ));
    let d4 = branch(Q, 4, LadderLower, 0);
    let d4_mode = mode_from_ode(&d4);
    entries.push(entry(
        "q-d4",
        d4,
        d4_mode,
        &["fourth-order condition for u; equivalent to canonical form SD-I.b of the second-degree second-order Painleve classification"],
    ));
    let mut d5 = branch(Q, 5, LadderLower, 0);
    let d5_mode = override_ode(&mut d5, sixth_order_quantum_ladder_equation(), 6);
    entries.push(entry(
        "q-d5",
        d5,
        d5_mode,
        &[
            "f_0 is solved algebraically from the lowest determining equation and contains u^(6)",
            "the stored sixth-order equation is the first integral of the solver's seventh-order consistency condition, with the constant fixed by the lowest-order determining equation",
        ],
    ));
}

fn classical_entries(entries: &mut Vec<CatalogEntry>) {
    use Mechanics::Classical as C;
    use RelationKind::*;

    entries.push(entry(
        "c-b1",
        branch(C, 1, Heisenberg, 0),
        VerifyMode::SymbolicClosed,
        &["linear potential V = alpha1 x, K = p"],
    ));
    entries.push(entry(
        "c-b2",
        branch(C, 2, Heisenberg, 0),
        VerifyMode::SymbolicClosed,
        &["same linear potential as c-b1 up to alpha1 -> beta alpha1"],
    ));
    entries.push(entry(
        "c-b3",
        branch(C, 3, Heisenberg, 0),
        VerifyMode::SymbolicClosed,
        &["V = eps sqrt(2 alpha1 x/3) with eps^2 = 1; K = p(2H + V) + 2 beta H in operator form"],
    ));
    entries.push(entry(
        "c-b4",
        branch(C, 4, Heisenberg, 0),
        VerifyMode::SymbolicClosed,
        &["same radical potential as c-b3 up to alpha1 -> beta alpha1 (the two Hamiltonians coincide)"],
    ));
    entries.push(entry(
        "c-b5",
        branch(C, 5, Heisenberg, 0),
        VerifyMode::SymbolicClosed,
        &["cube-root potential V = (2 alpha1 x/5)^(1/3)"],
    ));

    entries.push(entry(
        "c-c2",
        branch(C, 2, Conformal, 1),
        VerifyMode::SymbolicClosed,
        &["beta = 0 branch: V = gamma/x^2"],
    ));
    let c3 = branch(C, 3, Conformal, 0);
    let c3_mode = mode_from_ode(&c3);
    entries.push(entry(
        "c-c3",
        c3,
        c3_mode,
        &["first-order condition; its first integral is the algebraic relation (alpha1 x - 2V)^2 V = c"],
    ));
    let c4 = branch(C, 4, Conformal, 0);
    let c4_mode = mode_from_ode(&c4);
    entries.push(entry(
        "c-c4",
        c4,
        c4_mode,
        &[
            "general branch; first integral (2 beta V - alpha1 x)^2 V = c; the beta = 0 branch reproduces the c-c2 potential",
        ],
    ));
    let c5 = branch(C, 5, Conformal, 0);
    let c5_mode = mode_from_ode(&c5);
    entries.push(entry(
        "c-c5",
        c5,
        c5_mode,
        &["first-order condition -(alpha1 x - 15 V^2) V' = 2 alpha1 V"],
    ));

    entries.push(entry(
        "c-d1",
        branch(C, 1, LadderLower, 0),
        VerifyMode::SymbolicClosed,
        &["harmonic oscillator V = alpha1^2 x^2/2"],
    ));
    entries.push(entry(
        "c-d2",
        branch(C, 2, LadderLower, 0),
        VerifyMode::SymbolicClosed,
        &["singular oscillator V = alpha1^2 x^2/8 + gamma/x^2"],
    ));

    let d3 = branch(C, 3, LadderLower, 0);
    let PotentialSpec::Ode { equation: d3_eq, .. } = d3.potential.clone() else {
        panic!("expected ODE for classical order-3 ladder");
    };
    let d3_mode = VerifyMode::SymbolicModOde {
        rules: vec![
            power_rule_from_quadratic(&d3_eq, "u", 1),
            OdeRule::TopDerivative {
                unknown: "u".to_string(),
                equation: d3_eq.diff(Coord::X),
            },
        ],
    };
    entries.push(entry(
        "c-d3",
        d3,
        d3_mode,
        &[
            "first-order condition, quadratic in u': verified through its power rule plus the differentiated (second-order) equation",
            "equivalent published form: 24 x V V' - 4 alpha1^2 x^3 V' - 12 V^2 - 12 alpha1^2 x^2 V + alpha1^4 x^4 + 4d = 0 with a quartic first integral in V",
        ],
    ));
    let d4 = branch(C, 4, LadderLower, 0);
    let d4_mode = mode_from_ode(&d4);
    entries.push(entry(
        "c-d4",
        d4,
        d4_mode,
        &["second-order condition for u; a first integral 3x^2 u'^2 + 2xuu' - alpha1^2 x^4 u'/3 - u^2 - 2 alpha1^2 x^3 u/3 + alpha1^4 x^6/72 + k1 x + k2 = 0 exists"],
    ));
    let mut d5 = branch(C, 5, LadderLower, 0);
    let d5_mode = override_ode(&mut d5, second_order_classical_ladder_equation(), 2);
    entries.push(entry(
        "c-d5",
        d5,
        d5_mode,
        &[
            "f_0 is solved algebraically from the lowest determining equation",
            "the stored second-order equation is the first integral of the solver's third-order consistency condition",
            "K+K- reduces to a polynomial in H on solutions, but its constant term has no denominator-free representative under the stored rules, so no ladder polynomial is mechanized here",
        ],
    ));
}

fn families() -> Vec<FamilyEntry> {
    let y2 = Expr::from_atom(Atom::Coord(Coord::Y)).pow_int(2);
    let a2 = |n: i64| Expr::param("alpha2").pow_int(n);
    let two_h2 = hbar().pow_int(2).scale(&Coeff::from_int(2));
    let eight_h2 = hbar().pow_int(2).scale(&Coeff::from_int(8));
    let inv_sq = Expr::param("gamma1")
        .div(&xp(2))
        .add(&Expr::param("gamma2").div(&y2));
    vec![
        FamilyEntry {
            id: "jauch-hill".to_string(),
            potential: a1(2)
                .mul(&xp(2))
                .div(&two_h2)
                .add(&a2(2).mul(&y2).div(&two_h2)),
            parameters: vec!["alpha1".into(), "alpha2".into()],
            construction:
                "ladder x ladder on (q-d1, q-d1) with alpha1/alpha2 = n/m rational (anisotropic oscillator)"
                    .to_string(),
        },
        FamilyEntry {
            id: "smorodinsky-winternitz".to_string(),
            potential: a1(2)
                .mul(&xp(2).add(&y2))
                .div(&eight_h2)
                .add(&inv_sq.clone()),
            parameters: vec!["alpha1".into(), "gamma1".into(), "gamma2".into()],
            construction:
                "ladder x ladder on (q-d2, q-d2) with m = n = 1 (separable in Cartesian, polar and elliptic coordinates)"
                    .to_string(),
        },
        FamilyEntry {
            id: "caged".to_string(),
            potential: a1(2)
                .mul(&xp(2))
                .div(&eight_h2)
                .add(&a2(2).mul(&y2).div(&eight_h2))
                .add(&inv_sq),
            parameters: vec![
                "alpha1".into(),
                "alpha2".into(),
                "gamma1".into(),
                "gamma2".into(),
            ],
            construction:
                "ladder x ladder on (q-d2, q-d2) with alpha1/alpha2 = n/m rational (caged anisotropic oscillator)"
                    .to_string(),
        },
    ]
}

/// Construct the built-in catalog, including the K†K polynomials of the
/// ladder entries.
pub fn builtin() -> Catalog {
    let mut entries = Vec::new();
    quantum_entries(&mut entries);
    classical_entries(&mut entries);
    for e in &mut entries {
        // c-d5's constant term has no denominator-free representative (see
        // its annotation); every other ladder entry carries its polynomial.
        if super::KindClass::Ladder.matches(e.relation.kind) && e.id != "c-d5" {
            let q = compute_ladder_poly(e)
                .unwrap_or_else(|err| panic!("ladder polynomial for {}: {err}", e.id));
            e.ladder_poly = Some(q);
        }
    }
    Catalog {
        version: CATALOG_VERSION,
        entries,
        families: families(),
    }
}
