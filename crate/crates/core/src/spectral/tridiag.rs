//! Symmetric tridiagonal operators, the Sturm count, and bisection for
//! individual eigenvalues.

use crate::exec::Execution;

#[derive(Debug, Clone)]
pub struct Operator {
    diag: Vec<f64>,
    /// off[i] couples i and i+1
    off: Vec<f64>,
    nodes: Vec<f64>,
    step: f64,
}

impl Operator {
    pub fn new(diag: Vec<f64>, off: Vec<f64>, nodes: Vec<f64>, step: f64) -> Operator {
        debug_assert_eq!(diag.len(), nodes.len());
        debug_assert_eq!(off.len() + 1, diag.len());
        Operator { diag, off, nodes, step }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    pub fn off_diagonal(&self) -> &[f64] {
        &self.off
    }

    /// Number of eigenvalues strictly below `e` (Sturm sequence).
    pub fn count_below(&self, e: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for (i, &d) in self.diag.iter().enumerate() {
            q = if i == 0 { d - e } else { d - e - self.off[i - 1] * self.off[i - 1] / q };
            if q == 0.0 {
                q = -f64::EPSILON * d.abs().max(1.0);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Lower end of the Gershgorin interval.
    pub fn lower_bound(&self) -> f64 {
        let min = self.diag.iter().copied().fold(f64::INFINITY, f64::min);
        let off = self.off.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        min - 2.0 * off - 1.0
    }

    /// The (k+1)-th smallest eigenvalue, known to lie below `upper`.
    pub fn eigenvalue(&self, k: usize, upper: f64) -> f64 {
        let mut lo = self.lower_bound();
        let mut hi = upper;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi || hi - lo <= 1e-14 * hi.abs().max(lo.abs()).max(1.0) {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// All eigenvalues strictly below `threshold`, ascending, bisected in
    /// parallel over the index.
    pub fn eigenvalues_below(&self, threshold: f64, exec: Execution) -> Vec<f64> {
        let n = self.count_below(threshold);
        exec.map_range(n, |k| self.eigenvalue(k, threshold))
    }

    /// Eigenvector for a simple eigenvalue `e` by inverse iteration,
    /// normalized so that Σ u_i² · step = 1.
    pub fn eigenvector(&self, e: f64) -> Vec<f64> {
        let n = self.len();
        let shift = e - 1e-10 * e.abs().max(1.0);
        let mut u = vec![1.0; n];
        for _ in 0..4 {
            u = self.solve_shifted(shift, &u);
            let norm = (u.iter().map(|x| x * x).sum::<f64>() * self.step).sqrt();
            for x in &mut u {
                *x /= norm;
            }
        }
        // fix the sign so that the largest component is positive
        let big = u.iter().copied().fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
        if big < 0.0 {
            for x in &mut u {
                *x = -*x;
            }
        }
        u
    }

    fn solve_shifted(&self, s: f64, rhs: &[f64]) -> Vec<f64> {
        // Thomas algorithm for (T − s) x = rhs
        let n = self.len();
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        let off = |i: usize| if i < n - 1 { self.off[i] } else { 0.0 };
        let mut b = self.diag[0] - s;
        c[0] = off(0) / b;
        d[0] = rhs[0] / b;
        for i in 1..n {
            b = self.diag[i] - s - self.off[i - 1] * c[i - 1];
            if b == 0.0 {
                b = f64::EPSILON;
            }
            c[i] = off(i) / b;
            d[i] = (rhs[i] - self.off[i - 1] * d[i - 1]) / b;
        }
        let mut x = vec![0.0; n];
        x[n - 1] = d[n - 1];
        for i in (0..n - 1).rev() {
            x[i] = d[i] - c[i] * x[i + 1];
        }
        x
    }
}
