//! Smooth compactly-concentrated test functions with exact derivatives:
//! polynomial multiples of a Gaussian. Every derivative is again a
//! polynomial times the same Gaussian, so derivatives of any order are
//! computed exactly from polynomial recurrences.

/// `p(x) * exp(-(x - center)^2)` with real polynomial coefficients
/// (ascending powers of `x - center`).
#[derive(Clone, Debug)]
pub struct TestFunction {
    pub center: f64,
    pub poly: Vec<f64>,
}

impl TestFunction {
    pub fn new(center: f64, poly: Vec<f64>) -> TestFunction {
        TestFunction { center, poly }
    }

    /// The default verification triple `exp(-(x-c)^2) * {1, x, x^2}`
    /// (in powers of `x - c`), which avoids accidental alignment with an
    /// operator kernel.
    pub fn gaussian_triple(center: f64) -> Vec<TestFunction> {
        vec![
            TestFunction::new(center, vec![1.0]),
            TestFunction::new(center, vec![0.0, 1.0]),
            TestFunction::new(center, vec![0.0, 0.0, 1.0]),
        ]
    }

    /// Values of the function and its first `n` derivatives at `x`
    /// (`n + 1` entries).
    pub fn derivatives(&self, x: f64, n: usize) -> Vec<f64> {
        let t = x - self.center;
        let g = (-t * t).exp();
        let mut q = self.poly.clone();
        let mut out = Vec::with_capacity(n + 1);
        for _ in 0..=n {
            out.push(eval_poly(&q, t) * g);
            // (q g)' = (q' - 2 t q) g.
            let mut next = vec![0.0; q.len() + 1];
            for (i, &c) in q.iter().enumerate() {
                if i > 0 {
                    next[i - 1] += i as f64 * c;
                }
                next[i + 1] -= 2.0 * c;
            }
            q = next;
        }
        out
    }
}

fn eval_poly(p: &[f64], t: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, &c| acc * t + c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivatives_match_finite_differences() {
        let f = TestFunction::new(0.3, vec![0.5, -1.0, 2.0]);
        let h = 1e-5;
        for &x in &[-0.7, 0.0, 0.4, 1.2] {
            let d = f.derivatives(x, 3);
            let dp = f.derivatives(x + h, 2);
            let dm = f.derivatives(x - h, 2);
            for k in 0..3 {
                let fd = (dp[k] - dm[k]) / (2.0 * h);
                assert!(
                    (fd - d[k + 1]).abs() < 1e-6 * (1.0 + d[k + 1].abs()),
                    "order {k}: {fd} vs {}",
                    d[k + 1]
                );
            }
        }
    }

    #[test]
    fn gaussian_triple_values_at_center() {
        let fs = TestFunction::gaussian_triple(1.0);
        let v: Vec<f64> = fs.iter().map(|f| f.derivatives(1.0, 0)[0]).collect();
        assert_eq!(v, vec![1.0, 0.0, 0.0]);
    }
}
