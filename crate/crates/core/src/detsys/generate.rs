//! Symbolic determining equations for a generic companion operator.

use super::{DetSysError, DeterminingSystem, Mechanics};
use crate::opalg::{AlgebraRelation, RelationKind};
use crate::symkernel::{Coeff, Coord, Expr};

fn f(j: usize, order: u32) -> Expr {
    Expr::unknown(&format!("f{j}"), Coord::X, order)
}

fn v(order: u32) -> Expr {
    Expr::unknown("V", Coord::X, order)
}

fn neg_i_hbar() -> Expr {
    Expr::imag().neg().mul(&Expr::param("hbar"))
}

fn binom(n: usize, k: usize) -> Coeff {
    let mut acc: u128 = 1;
    for j in 0..k.min(n - k) {
        acc = acc * (n - j) as u128 / (j + 1) as u128;
    }
    Coeff::from_int(acc as i64)
}

/// Bracket coefficients Z_0..Z_{M+1} of H = p^2/2 + V with a generic K of
/// order `m` whose momentum-form coefficients are the unknowns f_0..f_m.
/// Quantum: Z_l is the D^l coefficient of the commutator; classical: the p^l
/// coefficient of the Poisson bracket.
pub fn generic_bracket_coeffs(mechanics: Mechanics, m: usize) -> Vec<Expr> {
    match mechanics {
        Mechanics::Quantum => quantum_z(m),
        Mechanics::Classical => classical_z(m),
    }
}

fn quantum_z(m: usize) -> Vec<Expr> {
    let mih = neg_i_hbar();
    let h2_half = Expr::param("hbar")
        .pow_int(2)
        .scale(&Coeff::from_ratio(1, 2));
    let ih = Expr::imag().mul(&Expr::param("hbar"));
    let mut z = Vec::with_capacity(m + 2);
    // Z_0 = -(hbar^2/2) f_0'' - sum_{j=1}^{M} (-i hbar)^j f_j V^(j)
    let mut z0 = h2_half.neg().mul(&f(0, 2));
    for j in 1..=m {
        z0 = z0.sub(&mih.pow_int(j as i64).mul(&f(j, 0)).mul(&v(j as u32)));
    }
    z.push(z0);
    // Z_l = -(hbar^2/2)(-i hbar)^(l-1) (2 f_{l-1}' - i hbar f_l'')
    //       - sum_{j=l+1}^{M} (-i hbar)^j f_j C(j,l) V^(j-l),   1 <= l <= M-1
    // Z_M is the same expression with an empty sum.
    for l in 1..=m {
        let inner = f(l - 1, 1)
            .scale(&Coeff::from_int(2))
            .sub(&ih.mul(&f(l, 2)));
        let mut zl = h2_half.neg().mul(&mih.pow_int(l as i64 - 1)).mul(&inner);
        for j in (l + 1)..=m {
            let term = mih
                .pow_int(j as i64)
                .mul(&f(j, 0))
                .scale(&binom(j, l))
                .mul(&v((j - l) as u32));
            zl = zl.sub(&term);
        }
        z.push(zl);
    }
    // Z_{M+1} = (-i hbar)^(M+2) f_M'
    z.push(mih.pow_int(m as i64 + 2).mul(&f(m, 1)));
    z
}

fn classical_z(m: usize) -> Vec<Expr> {
    // Z_0 = f_1 V'; Z_l = (l+1) f_{l+1} V' - f_{l-1}' for 1 <= l <= M-1;
    // Z_M = -f_{M-1}'; Z_{M+1} = -f_M'.
    let mut z = Vec::with_capacity(m + 2);
    for l in 0..=(m + 1) {
        let mut zl = Expr::zero();
        if l + 1 <= m {
            zl = zl.add(
                &f(l + 1, 0)
                    .mul(&v(1))
                    .scale(&Coeff::from_int(l as i64 + 1)),
            );
        }
        if l >= 1 {
            zl = zl.sub(&f(l - 1, 1));
        }
        z.push(zl);
    }
    z
}

/// Right-hand side the bracket must equal, per power, for the given relation.
pub fn relation_rhs(mechanics: Mechanics, m: usize, rel: &AlgebraRelation) -> Vec<Expr> {
    let a = &rel.alpha;
    let mut rhs = vec![Expr::zero(); m + 2];
    match rel.kind {
        RelationKind::Abelian => {}
        RelationKind::Heisenberg => rhs[0] = a.clone(),
        RelationKind::Conformal => {
            // alpha * H: p^0 picks alpha V; the kinetic term sits at D^2/p^2.
            rhs[0] = a.mul(&v(0));
            rhs[2] = match mechanics {
                // -(hbar^2/2) D^2 coefficient of alpha H.
                Mechanics::Quantum => a
                    .mul(&Expr::param("hbar").pow_int(2))
                    .scale(&Coeff::from_ratio(-1, 2)),
                Mechanics::Classical => a.scale(&Coeff::from_ratio(1, 2)),
            };
        }
        RelationKind::LadderLower | RelationKind::LadderRaise => {
            let sign = if rel.kind == RelationKind::LadderLower {
                Coeff::from_int(-1)
            } else {
                Coeff::from_int(1)
            };
            for (l, slot) in rhs.iter_mut().enumerate().take(m + 1) {
                let weight = match mechanics {
                    // +-alpha * (D^l coefficient of K) = +-alpha (-i hbar)^l f_l
                    Mechanics::Quantum => neg_i_hbar().pow_int(l as i64),
                    // {H, K+-} = +-i alpha K+-
                    Mechanics::Classical => Expr::imag(),
                };
                *slot = a.mul(&weight).mul(&f(l, 0)).scale(&sign);
            }
        }
    }
    rhs
}

/// Build the full determining system for one (mechanics, order, kind) cell.
pub fn generate(
    mechanics: Mechanics,
    m: usize,
    kind: RelationKind,
) -> Result<DeterminingSystem, DetSysError> {
    if m < 1 {
        return Err(DetSysError::OrderOutOfRange { got: m, max: 5 });
    }
    if kind == RelationKind::Conformal && m < 2 {
        return Err(DetSysError::ConformalOrderTooLow);
    }
    let relation = AlgebraRelation::new(kind, Expr::param("alpha1"));
    let z = generic_bracket_coeffs(mechanics, m);
    let rhs = relation_rhs(mechanics, m, &relation);
    let constraints = z.iter().zip(&rhs).map(|(a, b)| a.sub(b)).collect();
    Ok(DeterminingSystem { mechanics, m, relation, z, rhs, constraints })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opalg::{DiffOp, PhasePoly};

    #[test]
    fn quantum_order_one_coefficients() {
        // Z_2 = (-i hbar)^3 f_1', Z_1 = -(hbar^2/2)(2 f_0' - i hbar f_1''),
        // Z_0 = -(hbar^2/2) f_0'' + i hbar f_1 V'.
        let z = generic_bracket_coeffs(Mechanics::Quantum, 1);
        let ih = Expr::imag().mul(&Expr::param("hbar"));
        let h2_half = Expr::param("hbar").pow_int(2).scale(&Coeff::from_ratio(1, 2));
        assert_eq!(z.len(), 3);
        assert_eq!(z[2], ih.neg().pow_int(3).mul(&f(1, 1)));
        assert_eq!(
            z[1],
            h2_half
                .neg()
                .mul(&f(0, 1).scale(&Coeff::from_int(2)).sub(&ih.mul(&f(1, 2))))
        );
        assert_eq!(
            z[0],
            h2_half.neg().mul(&f(0, 2)).add(&ih.mul(&f(1, 0)).mul(&v(1)))
        );
    }

    #[test]
    fn classical_order_two_coefficients() {
        let z = generic_bracket_coeffs(Mechanics::Classical, 2);
        assert_eq!(z.len(), 4);
        assert_eq!(z[0], f(1, 0).mul(&v(1)));
        assert_eq!(z[1], f(2, 0).mul(&v(1)).scale(&Coeff::from_int(2)).sub(&f(0, 1)));
        assert_eq!(z[2], f(1, 1).neg());
        assert_eq!(z[3], f(2, 1).neg());
    }

    #[test]
    fn quantum_z_matches_commutator() {
        for m in 1..=4 {
            let z = generic_bracket_coeffs(Mechanics::Quantum, m);
            let fs: Vec<Expr> = (0..=m).map(|j| f(j, 0)).collect();
            let k = DiffOp::from_momentum(&fs);
            let h = DiffOp::hamiltonian(&v(0));
            let bracket = h.commutator(&k);
            for (l, zl) in z.iter().enumerate() {
                assert_eq!(&bracket.coeff(l), zl, "quantum M={m}, D^{l}");
            }
            assert!(bracket.order().unwrap_or(0) <= m + 1);
        }
    }

    #[test]
    fn classical_z_matches_poisson_bracket() {
        for m in 1..=5 {
            let z = generic_bracket_coeffs(Mechanics::Classical, m);
            let fs: Vec<Expr> = (0..=m).map(|j| f(j, 0)).collect();
            let k = PhasePoly::from_coeffs(fs);
            let h = PhasePoly::hamiltonian(&v(0));
            let bracket = h.poisson(&k);
            for (l, zl) in z.iter().enumerate() {
                assert_eq!(&bracket.coeff(l), zl, "classical M={m}, p^{l}");
            }
        }
    }

    #[test]
    fn conformal_needs_order_two() {
        assert!(matches!(
            generate(Mechanics::Quantum, 1, RelationKind::Conformal),
            Err(DetSysError::ConformalOrderTooLow)
        ));
        assert!(generate(Mechanics::Quantum, 2, RelationKind::Conformal).is_ok());
    }
}
