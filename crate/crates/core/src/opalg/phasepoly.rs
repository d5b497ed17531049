//! Polynomials in the momentum with x-dependent coefficients, under the
//! canonical Poisson bracket.

use crate::symkernel::{Coeff, Coord, Expr, Rat};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use std::fmt;

/// `sum_l coeffs[l] * p^l`; the coefficient expressions depend on `x` and
/// parameters only.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct PhasePoly {
    coeffs: Vec<Expr>,
}

impl PhasePoly {
    pub fn zero() -> PhasePoly {
        PhasePoly { coeffs: Vec::new() }
    }

    pub fn constant(c: Expr) -> PhasePoly {
        PhasePoly::from_coeffs(vec![c])
    }

    pub fn momentum() -> PhasePoly {
        PhasePoly::from_coeffs(vec![Expr::zero(), Expr::one()])
    }

    /// `H = p^2/2 + V`.
    pub fn hamiltonian(v: &Expr) -> PhasePoly {
        PhasePoly::from_coeffs(vec![
            v.clone(),
            Expr::zero(),
            Expr::constant(Coeff::from_ratio(1, 2)),
        ])
    }

    pub fn from_coeffs(coeffs: Vec<Expr>) -> PhasePoly {
        let mut p = PhasePoly { coeffs };
        while p.coeffs.last().is_some_and(Expr::is_zero) {
            p.coeffs.pop();
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn order(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, l: usize) -> Expr {
        self.coeffs.get(l).cloned().unwrap_or_else(Expr::zero)
    }

    pub fn coeffs(&self) -> &[Expr] {
        &self.coeffs
    }

    pub fn add(&self, rhs: &PhasePoly) -> PhasePoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        PhasePoly::from_coeffs((0..n).map(|l| self.coeff(l).add(&rhs.coeff(l))).collect())
    }

    pub fn sub(&self, rhs: &PhasePoly) -> PhasePoly {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> PhasePoly {
        PhasePoly { coeffs: self.coeffs.iter().map(Expr::neg).collect() }
    }

    pub fn scale(&self, c: &Expr) -> PhasePoly {
        PhasePoly::from_coeffs(self.coeffs.iter().map(|e| e.mul(c)).collect())
    }

    /// Commutative pointwise product.
    pub fn mul(&self, rhs: &PhasePoly) -> PhasePoly {
        let mut out = vec![
            Expr::zero();
            (self.coeffs.len() + rhs.coeffs.len()).saturating_sub(1)
        ];
        for (la, ca) in self.coeffs.iter().enumerate() {
            for (lb, cb) in rhs.coeffs.iter().enumerate() {
                out[la + lb] = out[la + lb].add(&ca.mul(cb));
            }
        }
        PhasePoly::from_coeffs(out)
    }

    pub fn pow(&self, n: u32) -> PhasePoly {
        let mut acc = PhasePoly::constant(Expr::one());
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Complex conjugate, treating unknown coefficient functions as real.
    pub fn conjugate(&self) -> PhasePoly {
        PhasePoly { coeffs: self.coeffs.iter().map(Expr::conjugate).collect() }
    }

    /// `{a, b} = (da/dx)(db/dp) - (da/dp)(db/dx)`, collected in powers of p
    /// (canonical orientation: `{x, p} = 1`, so `{H, p} = V'` and the bracket
    /// coefficient formulas below hold with their stated signs).
    pub fn poisson(&self, rhs: &PhasePoly) -> PhasePoly {
        let deg = self.coeffs.len() + rhs.coeffs.len();
        let mut out = vec![Expr::zero(); deg.max(1)];
        for (la, ca) in self.coeffs.iter().enumerate() {
            for (lb, cb) in rhs.coeffs.iter().enumerate() {
                // l_b f' g p^(la+lb-1) - l_a f g' p^(la+lb-1)
                if la + lb == 0 {
                    continue;
                }
                let k = la + lb - 1;
                if lb > 0 {
                    let c = Coeff::from_rat(Rat::from_integer(BigInt::from(lb)));
                    out[k] = out[k].add(&ca.diff(Coord::X).mul(cb).scale(&c));
                }
                if la > 0 {
                    let c = Coeff::from_rat(Rat::from_integer(BigInt::from(la)));
                    out[k] = out[k].sub(&ca.mul(&cb.diff(Coord::X)).scale(&c));
                }
            }
        }
        PhasePoly::from_coeffs(out)
    }

    pub fn map_coeffs(&self, f: &mut dyn FnMut(&Expr) -> Expr) -> PhasePoly {
        PhasePoly::from_coeffs(self.coeffs.iter().map(|c| f(c)).collect())
    }
}

impl fmt::Display for PhasePoly {
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
                1 => write!(f, "({c})*p")?,
                _ => write!(f, "({c})*p^{l}")?,
            }
        }
        Ok(())
    }
}
