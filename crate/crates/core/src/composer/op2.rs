//! Two-dimensional operators: normal-ordered differential operators in
//! `D_x, D_y` and phase-space polynomials in `p_x, p_y`.
//!
//! Both types store a rectangular coefficient grid `coeffs[i][j]` for the
//! basis element `D_x^i D_y^j` (respectively `p_x^i p_y^j`), with coefficient
//! expressions depending on both coordinates. The grid carries no all-zero
//! trailing rows or columns, so equality is grid equality.

use crate::symkernel::{Coeff, Coord, Expr, Rat};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use std::fmt;

fn binomial(n: u32, k: u32) -> Coeff {
    let mut acc: u128 = 1;
    for j in 0..k.min(n - k) {
        acc = acc * (n - j) as u128 / (j + 1) as u128;
    }
    Coeff::from_int(acc as i64)
}

fn neg_i_hbar() -> Expr {
    Expr::imag().neg().mul(&Expr::param("hbar"))
}

fn trim(coeffs: &mut Vec<Vec<Expr>>) {
    for row in coeffs.iter_mut() {
        while row.last().is_some_and(Expr::is_zero) {
            row.pop();
        }
    }
    while coeffs.last().is_some_and(|r| r.is_empty()) {
        coeffs.pop();
    }
}

fn grid_get(coeffs: &[Vec<Expr>], i: usize, j: usize) -> Expr {
    coeffs
        .get(i)
        .and_then(|r| r.get(j))
        .cloned()
        .unwrap_or_else(Expr::zero)
}

fn grid_set_add(coeffs: &mut Vec<Vec<Expr>>, i: usize, j: usize, e: &Expr) {
    if e.is_zero() {
        return;
    }
    if coeffs.len() <= i {
        coeffs.resize(i + 1, Vec::new());
    }
    let row = &mut coeffs[i];
    if row.len() <= j {
        row.resize(j + 1, Expr::zero());
    }
    row[j] = row[j].add(e);
}

fn grid_order(coeffs: &[Vec<Expr>]) -> Option<usize> {
    let mut max: Option<usize> = None;
    for (i, row) in coeffs.iter().enumerate() {
        for (j, c) in row.iter().enumerate() {
            if !c.is_zero() {
                max = Some(max.map_or(i + j, |m| m.max(i + j)));
            }
        }
    }
    max
}

fn grid_entries(coeffs: &[Vec<Expr>]) -> Vec<(usize, usize, &Expr)> {
    let mut out = Vec::new();
    for (i, row) in coeffs.iter().enumerate() {
        for (j, c) in row.iter().enumerate() {
            if !c.is_zero() {
                out.push((i, j, c));
            }
        }
    }
    out
}

/// `sum_{i,j} coeffs[i][j] D_x^i D_y^j`, all derivatives to the right of
/// their coefficients.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct DiffOp2 {
    coeffs: Vec<Vec<Expr>>,
}

impl DiffOp2 {
    pub fn zero() -> DiffOp2 {
        DiffOp2 { coeffs: Vec::new() }
    }

    pub fn identity() -> DiffOp2 {
        DiffOp2::multiplication(Expr::one())
    }

    pub fn multiplication(c: Expr) -> DiffOp2 {
        DiffOp2::from_grid(vec![vec![c]])
    }

    pub fn from_grid(coeffs: Vec<Vec<Expr>>) -> DiffOp2 {
        let mut coeffs = coeffs;
        trim(&mut coeffs);
        DiffOp2 { coeffs }
    }

    /// `H = -(hbar^2/2)(D_x^2 + D_y^2) + v(x, y)`.
    pub fn hamiltonian(v: &Expr) -> DiffOp2 {
        let lead = Expr::param("hbar")
            .pow_int(2)
            .scale(&Coeff::from_ratio(-1, 2));
        DiffOp2::from_grid(vec![
            vec![v.clone(), Expr::zero(), lead.clone()],
            Vec::new(),
            vec![lead],
        ])
    }

    /// Embed a one-coordinate operator: `coeffs[l] D^l` along `coord`. The
    /// coefficient expressions must already be written in that coordinate.
    pub fn lift(coeffs: &[Expr], coord: Coord) -> DiffOp2 {
        let grid = match coord {
            Coord::X => coeffs.iter().map(|c| vec![c.clone()]).collect(),
            Coord::Y => vec![coeffs.to_vec()],
        };
        DiffOp2::from_grid(grid)
    }

    /// Build from momentum form `sum f_ij p_x^i p_y^j`.
    pub fn from_momentum(fs: Vec<Vec<Expr>>) -> DiffOp2 {
        let m = neg_i_hbar();
        let coeffs = fs
            .into_iter()
            .enumerate()
            .map(|(i, row)| {
                row.into_iter()
                    .enumerate()
                    .map(|(j, f)| f.mul(&m.pow_int((i + j) as i64)))
                    .collect()
            })
            .collect();
        DiffOp2::from_grid(coeffs)
    }

    /// Momentum-form view: `f_ij = c_ij / (-i hbar)^(i+j)`.
    pub fn momentum_grid(&self) -> Vec<Vec<Expr>> {
        let m = neg_i_hbar();
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .map(|(j, c)| c.mul(&m.pow_int(-((i + j) as i64))))
                    .collect()
            })
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|r| r.iter().all(Expr::is_zero))
    }

    /// Maximal total derivative order `i + j`; `None` for zero.
    pub fn order(&self) -> Option<usize> {
        grid_order(&self.coeffs)
    }

    pub fn coeff(&self, i: usize, j: usize) -> Expr {
        grid_get(&self.coeffs, i, j)
    }

    pub fn entries(&self) -> Vec<(usize, usize, &Expr)> {
        grid_entries(&self.coeffs)
    }

    pub fn add(&self, rhs: &DiffOp2) -> DiffOp2 {
        let mut out = self.coeffs.clone();
        for (i, j, c) in rhs.entries() {
            grid_set_add(&mut out, i, j, c);
        }
        DiffOp2::from_grid(out)
    }

    pub fn sub(&self, rhs: &DiffOp2) -> DiffOp2 {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> DiffOp2 {
        DiffOp2 {
            coeffs: self
                .coeffs
                .iter()
                .map(|r| r.iter().map(Expr::neg).collect())
                .collect(),
        }
    }

    pub fn scale(&self, c: &Expr) -> DiffOp2 {
        DiffOp2::from_grid(
            self.coeffs
                .iter()
                .map(|r| r.iter().map(|e| e.mul(c)).collect())
                .collect(),
        )
    }

    /// Normal-ordered product by the two-coordinate Leibniz rule:
    /// `D_x^i D_y^j ∘ g = sum_{s,t} C(i,s) C(j,t) (d_x^{i-s} d_y^{j-t} g) D_x^s D_y^t`.
    pub fn compose(&self, rhs: &DiffOp2) -> DiffOp2 {
        let mut out: Vec<Vec<Expr>> = Vec::new();
        for (i, j, ca) in self.entries() {
            for (k, l, cb) in rhs.entries() {
                for s in 0..=i {
                    let dx = cb.diff_n(Coord::X, (i - s) as u32);
                    if dx.is_zero() {
                        continue;
                    }
                    for t in 0..=j {
                        let d = dx.diff_n(Coord::Y, (j - t) as u32);
                        if d.is_zero() {
                            continue;
                        }
                        let piece = ca
                            .mul(&d)
                            .scale(&binomial(i as u32, s as u32))
                            .scale(&binomial(j as u32, t as u32));
                        grid_set_add(&mut out, s + k, t + l, &piece);
                    }
                }
            }
        }
        DiffOp2::from_grid(out)
    }

    pub fn commutator(&self, rhs: &DiffOp2) -> DiffOp2 {
        self.compose(rhs).sub(&rhs.compose(self))
    }

    /// Formal L2 adjoint: `(c D_x^i D_y^j)^† = (-1)^(i+j) D_x^i D_y^j ∘ conj(c)`,
    /// re-normal ordered. Unknown functions are treated as real-valued.
    pub fn adjoint(&self) -> DiffOp2 {
        let mut out = DiffOp2::zero();
        for (i, j, c) in self.entries() {
            let mut basis: Vec<Vec<Expr>> = vec![Vec::new(); i + 1];
            basis[i] = vec![Expr::zero(); j + 1];
            basis[i][j] = if (i + j) % 2 == 0 {
                Expr::one()
            } else {
                Expr::int(-1)
            };
            let term = DiffOp2::from_grid(basis)
                .compose(&DiffOp2::multiplication(c.conjugate()));
            out = out.add(&term);
        }
        out
    }

    pub fn pow(&self, n: u32) -> DiffOp2 {
        let mut acc = DiffOp2::identity();
        for _ in 0..n {
            acc = acc.compose(self);
        }
        acc
    }

    pub fn map_coeffs(&self, f: &mut dyn FnMut(&Expr) -> Expr) -> DiffOp2 {
        DiffOp2::from_grid(
            self.coeffs
                .iter()
                .map(|r| r.iter().map(|c| f(c)).collect())
                .collect(),
        )
    }
}

/// `sum_{i,j} coeffs[i][j] p_x^i p_y^j` on four-dimensional phase space.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct PhasePoly2 {
    coeffs: Vec<Vec<Expr>>,
}

impl PhasePoly2 {
    pub fn zero() -> PhasePoly2 {
        PhasePoly2 { coeffs: Vec::new() }
    }

    pub fn constant(c: Expr) -> PhasePoly2 {
        PhasePoly2::from_grid(vec![vec![c]])
    }

    pub fn from_grid(coeffs: Vec<Vec<Expr>>) -> PhasePoly2 {
        let mut coeffs = coeffs;
        trim(&mut coeffs);
        PhasePoly2 { coeffs }
    }

    /// `H = (p_x^2 + p_y^2)/2 + v(x, y)`.
    pub fn hamiltonian(v: &Expr) -> PhasePoly2 {
        let half = Expr::constant(Coeff::from_ratio(1, 2));
        PhasePoly2::from_grid(vec![
            vec![v.clone(), Expr::zero(), half.clone()],
            Vec::new(),
            vec![half],
        ])
    }

    /// Embed a one-coordinate polynomial `coeffs[l] p^l` along `coord`.
    pub fn lift(coeffs: &[Expr], coord: Coord) -> PhasePoly2 {
        let grid = match coord {
            Coord::X => coeffs.iter().map(|c| vec![c.clone()]).collect(),
            Coord::Y => vec![coeffs.to_vec()],
        };
        PhasePoly2::from_grid(grid)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|r| r.iter().all(Expr::is_zero))
    }

    /// Maximal total momentum degree; `None` for zero.
    pub fn order(&self) -> Option<usize> {
        grid_order(&self.coeffs)
    }

    pub fn coeff(&self, i: usize, j: usize) -> Expr {
        grid_get(&self.coeffs, i, j)
    }

    pub fn entries(&self) -> Vec<(usize, usize, &Expr)> {
        grid_entries(&self.coeffs)
    }

    pub fn add(&self, rhs: &PhasePoly2) -> PhasePoly2 {
        let mut out = self.coeffs.clone();
        for (i, j, c) in rhs.entries() {
            grid_set_add(&mut out, i, j, c);
        }
        PhasePoly2::from_grid(out)
    }

    pub fn sub(&self, rhs: &PhasePoly2) -> PhasePoly2 {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> PhasePoly2 {
        PhasePoly2 {
            coeffs: self
                .coeffs
                .iter()
                .map(|r| r.iter().map(Expr::neg).collect())
                .collect(),
        }
    }

    pub fn scale(&self, c: &Expr) -> PhasePoly2 {
        PhasePoly2::from_grid(
            self.coeffs
                .iter()
                .map(|r| r.iter().map(|e| e.mul(c)).collect())
                .collect(),
        )
    }

    /// Commutative pointwise product.
    pub fn mul(&self, rhs: &PhasePoly2) -> PhasePoly2 {
        let mut out: Vec<Vec<Expr>> = Vec::new();
        for (i, j, ca) in self.entries() {
            for (k, l, cb) in rhs.entries() {
                grid_set_add(&mut out, i + k, j + l, &ca.mul(cb));
            }
        }
        PhasePoly2::from_grid(out)
    }

    pub fn pow(&self, n: u32) -> PhasePoly2 {
        let mut acc = PhasePoly2::constant(Expr::one());
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Complex conjugate, treating unknown coefficient functions as real.
    pub fn conjugate(&self) -> PhasePoly2 {
        PhasePoly2 {
            coeffs: self
                .coeffs
                .iter()
                .map(|r| r.iter().map(Expr::conjugate).collect())
                .collect(),
        }
    }

    /// `{a, b} = sum_c (da/dc)(db/dp_c) - (da/dp_c)(db/dc)` over both
    /// coordinates, matching the one-coordinate orientation (`{x, p_x} = 1`).
    pub fn poisson(&self, rhs: &PhasePoly2) -> PhasePoly2 {
        let mut out: Vec<Vec<Expr>> = Vec::new();
        let int = |n: usize| Coeff::from_rat(Rat::from_integer(BigInt::from(n)));
        for (i, j, ca) in self.entries() {
            for (k, l, cb) in rhs.entries() {
                // x-pair: (da/dx)(db/dp_x) - (da/dp_x)(db/dx)
                if k > 0 {
                    let c = ca.diff(Coord::X).mul(cb).scale(&int(k));
                    grid_set_add(&mut out, i + k - 1, j + l, &c);
                }
                if i > 0 {
                    let c = ca.mul(&cb.diff(Coord::X)).scale(&int(i)).neg();
                    grid_set_add(&mut out, i + k - 1, j + l, &c);
                }
                // y-pair
                if l > 0 {
                    let c = ca.diff(Coord::Y).mul(cb).scale(&int(l));
                    grid_set_add(&mut out, i + k, j + l - 1, &c);
                }
                if j > 0 {
                    let c = ca.mul(&cb.diff(Coord::Y)).scale(&int(j)).neg();
                    grid_set_add(&mut out, i + k, j + l - 1, &c);
                }
            }
        }
        PhasePoly2::from_grid(out)
    }

    pub fn map_coeffs(&self, f: &mut dyn FnMut(&Expr) -> Expr) -> PhasePoly2 {
        PhasePoly2::from_grid(
            self.coeffs
                .iter()
                .map(|r| r.iter().map(|c| f(c)).collect())
                .collect(),
        )
    }
}

impl fmt::Display for DiffOp2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        display_grid(&self.coeffs, "D_x", "D_y", f)
    }
}

impl fmt::Display for PhasePoly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        display_grid(&self.coeffs, "p_x", "p_y", f)
    }
}

fn display_grid(
    coeffs: &[Vec<Expr>],
    bx: &str,
    by: &str,
    f: &mut fmt::Formatter<'_>,
) -> fmt::Result {
    let mut entries = grid_entries(coeffs);
    if entries.is_empty() {
        return f.write_str("0");
    }
    entries.sort_by_key(|(i, j, _)| (std::cmp::Reverse(i + j), std::cmp::Reverse(*i)));
    let mut first = true;
    for (i, j, c) in entries {
        if !first {
            f.write_str(" + ")?;
        }
        first = false;
        write!(f, "({c})")?;
        match i {
            0 => {}
            1 => write!(f, "*{bx}")?,
            _ => write!(f, "*{bx}^{i}")?,
        }
        match j {
            0 => {}
            1 => write!(f, "*{by}")?,
            _ => write!(f, "*{by}^{j}")?,
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hbar() -> Expr {
        Expr::param("hbar")
    }

    #[test]
    fn cross_derivatives_commute() {
        // [D_x, D_y] = 0 and D_x ∘ (x y) = x y D_x + y
        let dx = DiffOp2::from_grid(vec![vec![Expr::zero()], vec![Expr::one()]]);
        let dy = DiffOp2::from_grid(vec![vec![Expr::zero(), Expr::one()]]);
        assert!(dx.commutator(&dy).is_zero());
        let xy = DiffOp2::multiplication(Expr::x().mul(&Expr::y()));
        let got = dx.compose(&xy);
        let want = DiffOp2::from_grid(vec![
            vec![Expr::y()],
            vec![Expr::x().mul(&Expr::y())],
        ]);
        assert_eq!(got, want);
    }

    #[test]
    fn separable_hamiltonian_commutes_with_each_part() {
        // V = x^2 + y^2: [H, H1] = 0 with H1 the x-part.
        let v = Expr::x().pow_int(2).add(&Expr::y().pow_int(2));
        let h = DiffOp2::hamiltonian(&v);
        let lead = hbar().pow_int(2).scale(&Coeff::from_ratio(-1, 2));
        let h1 = DiffOp2::from_grid(vec![
            vec![Expr::x().pow_int(2)],
            Vec::new(),
            vec![lead],
        ]);
        assert!(h.commutator(&h1).is_zero());
    }

    #[test]
    fn momentum_round_trip() {
        let fs = vec![
            vec![Expr::x(), Expr::y()],
            vec![Expr::one(), Expr::x().mul(&Expr::y())],
        ];
        let op = DiffOp2::from_momentum(fs.clone());
        assert_eq!(op.momentum_grid(), fs);
    }

    #[test]
    fn adjoint_antihomomorphic_on_grid_operators() {
        let a = DiffOp2::from_grid(vec![
            vec![Expr::x().mul(&Expr::y())],
            vec![Expr::zero(), Expr::y()],
        ]);
        let b = DiffOp2::from_grid(vec![vec![Expr::y(), Expr::x()], vec![Expr::one()]]);
        assert_eq!(a.adjoint().adjoint(), a);
        assert_eq!(
            a.compose(&b).adjoint(),
            b.adjoint().compose(&a.adjoint())
        );
    }

    #[test]
    fn angular_momentum_commutes_with_radial_hamiltonian() {
        // L = x p_y - y p_x Poisson-commutes with H for V = x^2 + y^2.
        let l = PhasePoly2::from_grid(vec![
            vec![Expr::zero(), Expr::x()],
            vec![Expr::y().neg()],
        ]);
        let h = PhasePoly2::hamiltonian(&Expr::x().pow_int(2).add(&Expr::y().pow_int(2)));
        assert!(h.poisson(&l).is_zero());
        // and fails for an anisotropic potential
        let h2 = PhasePoly2::hamiltonian(
            &Expr::x().pow_int(2).add(&Expr::y().pow_int(2).scale(&Coeff::from_int(4))),
        );
        assert!(!h2.poisson(&l).is_zero());
    }

    #[test]
    fn poisson_orientation_matches_one_coordinate_convention() {
        // {H, p_x} = dV/dx
        let v = Expr::x().pow_int(3).add(&Expr::y());
        let h = PhasePoly2::hamiltonian(&v);
        let px = PhasePoly2::from_grid(vec![vec![Expr::zero()], vec![Expr::one()]]);
        let got = h.poisson(&px);
        assert_eq!(got, PhasePoly2::constant(v.diff(Coord::X)));
    }
}
