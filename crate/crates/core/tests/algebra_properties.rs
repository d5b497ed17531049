//! Randomized structural laws for the operator and phase-space algebras.

use algham::opalg::{DiffOp, PhasePoly};
use algham::symkernel::{Coeff, Coord, Expr};
use proptest::prelude::*;
use proptest::test_runner::RngSeed;

/// Small polynomial-in-x coefficient with integer scalars.
fn expr_strategy() -> impl Strategy<Value = Expr> {
    prop::collection::vec((-3i64..=3, 0u32..=2), 0..3).prop_map(|terms| {
        let mut e = Expr::zero();
        for (c, k) in terms {
            e = e.add(&Expr::x().pow_int(k as i64).scale(&Coeff::from_int(c)));
        }
        e
    })
}

fn diffop_strategy() -> impl Strategy<Value = DiffOp> {
    prop::collection::vec(expr_strategy(), 1..4).prop_map(DiffOp::from_coeffs)
}

fn phasepoly_strategy() -> impl Strategy<Value = PhasePoly> {
    prop::collection::vec(expr_strategy(), 1..4).prop_map(PhasePoly::from_coeffs)
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 200,
        rng_seed: RngSeed::Fixed(0x4a5c_91e2),
        ..ProptestConfig::default()
    })]

    #[test]
    fn compose_is_associative(
        a in diffop_strategy(),
        b in diffop_strategy(),
        c in diffop_strategy(),
    ) {
        let left = a.compose(&b.compose(&c));
        let right = a.compose(&b).compose(&c);
        prop_assert_eq!(&left, &right);
        // Independent oracle: pointwise action on a polynomial test function.
        let f = Expr::x().pow_int(3).add(&Expr::x().scale(&Coeff::from_int(2)));
        let chained = a.apply(&b.apply(&c.apply(&f)));
        prop_assert_eq!(left.apply(&f), chained);
    }

    #[test]
    fn commutator_is_antisymmetric(a in diffop_strategy(), b in diffop_strategy()) {
        prop_assert!(a.commutator(&a).is_zero());
        prop_assert!(a.commutator(&b).add(&b.commutator(&a)).is_zero());
    }

    #[test]
    fn commutator_jacobi(
        a in diffop_strategy(),
        b in diffop_strategy(),
        c in diffop_strategy(),
    ) {
        let s = a
            .commutator(&b.commutator(&c))
            .add(&b.commutator(&c.commutator(&a)))
            .add(&c.commutator(&a.commutator(&b)));
        prop_assert!(s.is_zero());
    }

    #[test]
    fn adjoint_laws(a in diffop_strategy(), b in diffop_strategy()) {
        prop_assert_eq!(a.adjoint().adjoint(), a.clone());
        prop_assert_eq!(a.compose(&b).adjoint(), b.adjoint().compose(&a.adjoint()));
    }

    #[test]
    fn poisson_antisymmetric_and_jacobi(
        a in phasepoly_strategy(),
        b in phasepoly_strategy(),
        c in phasepoly_strategy(),
    ) {
        prop_assert!(a.poisson(&b).add(&b.poisson(&a)).is_zero());
        let s = a
            .poisson(&b.poisson(&c))
            .add(&b.poisson(&c.poisson(&a)))
            .add(&c.poisson(&a.poisson(&b)));
        prop_assert!(s.is_zero());
    }

    #[test]
    fn poisson_leibniz(
        a in phasepoly_strategy(),
        b in phasepoly_strategy(),
        c in phasepoly_strategy(),
    ) {
        let left = a.poisson(&b.mul(&c));
        let right = a.poisson(&b).mul(&c).add(&b.mul(&a.poisson(&c)));
        prop_assert_eq!(left, right);
    }

    #[test]
    fn classical_limit_of_commutator(
        fa in prop::collection::vec(expr_strategy(), 1..4),
        fb in prop::collection::vec(expr_strategy(), 1..4),
    ) {
        // For hbar-free momentum coefficients, [A, B] = i*hbar*{A, B} + O(hbar^2):
        // the hbar^0 part of each momentum coefficient of [A,B]/(i*hbar) is
        // the matching Poisson-bracket coefficient.
        let qa = DiffOp::from_momentum(&fa);
        let qb = DiffOp::from_momentum(&fb);
        let ca = PhasePoly::from_coeffs(fa);
        let cb = PhasePoly::from_coeffs(fb);
        let bracket = qa.commutator(&qb);
        let pb = ca.poisson(&cb);
        let ih_inv = Expr::imag().mul(&Expr::param("hbar")).pow_int(-1);
        for (l, c) in bracket.momentum_coeffs().iter().enumerate() {
            let scaled = c.mul(&ih_inv);
            let mut grouped = scaled.collect_param("hbar");
            // Only non-negative powers of hbar may appear.
            for (k, _) in &grouped {
                prop_assert!(*k >= num_rational::Ratio::from_integer(0));
            }
            let h0 = grouped
                .remove(&num_rational::Ratio::from_integer(0))
                .unwrap_or_else(Expr::zero);
            prop_assert_eq!(h0, pb.coeff(l));
        }
    }

    #[test]
    fn hamiltonian_is_self_adjoint(v in expr_strategy()) {
        let h = DiffOp::hamiltonian(&v);
        prop_assert_eq!(h.adjoint(), h);
    }
}

#[test]
fn bracket_matches_momentum_coefficient_formulas() {
    // Coefficients of {H, K} for K of order 3 with symbolic f's:
    // Z0 = f1 V', Z_l = (l+1) f_{l+1} V' - f'_{l-1}, Z_M = -f'_{M-1},
    // Z_{M+1} = -f'_M for M = 3.
    let f = |j: u32, order: u32| Expr::unknown(&format!("f{j}"), Coord::X, order);
    let v1 = Expr::unknown("V", Coord::X, 1);
    let k = PhasePoly::from_coeffs(vec![f(0, 0), f(1, 0), f(2, 0), f(3, 0)]);
    let h = PhasePoly::hamiltonian(&Expr::unknown("V", Coord::X, 0));
    let got = h.poisson(&k);
    let z = [
        f(1, 0).mul(&v1),
        f(2, 0).mul(&v1).scale(&Coeff::from_int(2)).sub(&f(0, 1)),
        f(3, 0).mul(&v1).scale(&Coeff::from_int(3)).sub(&f(1, 1)),
        f(2, 1).neg(),
        f(3, 1).neg(),
    ];
    for (l, want) in z.iter().enumerate() {
        assert_eq!(&got.coeff(l), want, "coefficient of p^{l}");
    }
}
