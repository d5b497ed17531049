//! Linear ordinary differential operators in D-normal order.

use crate::symkernel::{Coeff, Coord, Expr};
use serde::{Deserialize, Serialize};
use std::fmt;

/// `sum_{l} coeffs[l] * D^l` acting on functions of `x`, with all derivatives
/// to the right of their coefficients. The list carries no trailing zeros, so
/// operator equality is coefficient-list equality.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct DiffOp {
    coeffs: Vec<Expr>,
}

/// `-i*hbar`, the scalar relating `p^l` and `D^l` coefficients.
pub(crate) fn neg_i_hbar() -> Expr {
    Expr::imag().neg().mul(&Expr::param("hbar"))
}

fn binomial(n: u32, k: u32) -> Coeff {
    let mut acc: u128 = 1;
    for j in 0..k.min(n - k) {
        acc = acc * (n - j) as u128 / (j + 1) as u128;
    }
    Coeff::from_int(acc as i64)
}

impl DiffOp {
    pub fn zero() -> DiffOp {
        DiffOp { coeffs: Vec::new() }
    }

    pub fn identity() -> DiffOp {
        DiffOp::multiplication(Expr::one())
    }

    /// The order-zero operator "multiply by `c`".
    pub fn multiplication(c: Expr) -> DiffOp {
        DiffOp::from_coeffs(vec![c])
    }

    /// `D = d/dx`.
    pub fn d() -> DiffOp {
        DiffOp::from_coeffs(vec![Expr::zero(), Expr::one()])
    }

    /// Momentum `p = -i hbar D`.
    pub fn momentum() -> DiffOp {
        DiffOp::from_coeffs(vec![Expr::zero(), neg_i_hbar()])
    }

    /// `H = p^2/2 + V = -(hbar^2/2) D^2 + V`.
    pub fn hamiltonian(v: &Expr) -> DiffOp {
        let lead = Expr::param("hbar")
            .pow_int(2)
            .scale(&Coeff::from_ratio(-1, 2));
        DiffOp::from_coeffs(vec![v.clone(), Expr::zero(), lead])
    }

    pub fn from_coeffs(coeffs: Vec<Expr>) -> DiffOp {
        let mut op = DiffOp { coeffs };
        op.trim();
        op
    }

    /// Build from momentum form `sum f_l p^l`: `c_l = (-i hbar)^l f_l`.
    pub fn from_momentum(fs: &[Expr]) -> DiffOp {
        let m = neg_i_hbar();
        let coeffs = fs
            .iter()
            .enumerate()
            .map(|(l, f)| f.mul(&m.pow_int(l as i64)))
            .collect();
        DiffOp::from_coeffs(coeffs)
    }

    /// Momentum-form view: `f_l = c_l / (-i hbar)^l`.
    pub fn momentum_coeffs(&self) -> Vec<Expr> {
        let m = neg_i_hbar();
        self.coeffs
            .iter()
            .enumerate()
            .map(|(l, c)| c.mul(&m.pow_int(-(l as i64))))
            .collect()
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(Expr::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero operator.
    pub fn order(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, l: usize) -> Expr {
        self.coeffs.get(l).cloned().unwrap_or_else(Expr::zero)
    }

    pub fn coeffs(&self) -> &[Expr] {
        &self.coeffs
    }

    pub fn add(&self, rhs: &DiffOp) -> DiffOp {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|l| self.coeff(l).add(&rhs.coeff(l))).collect();
        DiffOp::from_coeffs(coeffs)
    }

    pub fn sub(&self, rhs: &DiffOp) -> DiffOp {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> DiffOp {
        DiffOp { coeffs: self.coeffs.iter().map(Expr::neg).collect() }
    }

    pub fn scale(&self, c: &Expr) -> DiffOp {
        DiffOp::from_coeffs(self.coeffs.iter().map(|e| e.mul(c)).collect())
    }

    /// Normal-ordered product via `D^l ∘ g = sum_j C(l,j) g^(l-j) D^j`.
    pub fn compose(&self, rhs: &DiffOp) -> DiffOp {
        let mut out = vec![
            Expr::zero();
            (self.coeffs.len() + rhs.coeffs.len()).saturating_sub(1)
        ];
        for (la, ca) in self.coeffs.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            for (lb, cb) in rhs.coeffs.iter().enumerate() {
                if cb.is_zero() {
                    continue;
                }
                for j in 0..=la {
                    let piece = ca
                        .mul(&cb.diff_n(Coord::X, (la - j) as u32))
                        .scale(&binomial(la as u32, j as u32));
                    out[j + lb] = out[j + lb].add(&piece);
                }
            }
        }
        DiffOp::from_coeffs(out)
    }

    pub fn commutator(&self, rhs: &DiffOp) -> DiffOp {
        self.compose(rhs).sub(&rhs.compose(self))
    }

    /// Formal L2 adjoint: `(c D^l)^† = (-1)^l D^l ∘ conj(c)`, re-normal
    /// ordered. Unknown functions are treated as real-valued.
    pub fn adjoint(&self) -> DiffOp {
        let mut out = DiffOp::zero();
        for (l, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut dl = vec![Expr::zero(); l + 1];
            dl[l] = if l % 2 == 0 {
                Expr::one()
            } else {
                Expr::int(-1)
            };
            let term = DiffOp::from_coeffs(dl).compose(&DiffOp::multiplication(c.conjugate()));
            out = out.add(&term);
        }
        out
    }

    /// Integer power by repeated composition.
    pub fn pow(&self, n: u32) -> DiffOp {
        let mut acc = DiffOp::identity();
        for _ in 0..n {
            acc = acc.compose(self);
        }
        acc
    }

    /// Apply to a function of x: `sum c_l f^(l)`.
    pub fn apply(&self, f: &Expr) -> Expr {
        let mut out = Expr::zero();
        for (l, c) in self.coeffs.iter().enumerate() {
            out = out.add(&c.mul(&f.diff_n(Coord::X, l as u32)));
        }
        out
    }

    /// Rewrite every coefficient with a caller-supplied normalizer (e.g.
    /// reduction modulo a defining ODE).
    pub fn map_coeffs(&self, f: &mut dyn FnMut(&Expr) -> Expr) -> DiffOp {
        DiffOp::from_coeffs(self.coeffs.iter().map(|c| f(c)).collect())
    }
}

impl fmt::Display for DiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (l, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match l {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})*D")?,
                _ => write!(f, "({c})*D^{l}")?,
            }
        }
        Ok(())
    }
}
