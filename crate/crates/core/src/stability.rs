//! Lower bound on the ground-state energy of N electrons and K nuclei
//! (stability of matter) from a kinetic Lieb–Thirring constant K₃, and the
//! two closed-form optimizations inside its proof.

use crate::constants::{classical_k, BoundDirection, ConstantKind, ConstantValue};
use crate::error::{domain, LtError, Result};
use crate::exec::Execution;
use crate::quad::{integrate, QuadOptions};
use serde::Serialize;
use std::f64::consts::PI;

/// Excess factor K₃ ≥ (0.471851)^{1/3} K^cl₃ behind the default constant.
pub const K3_EXCESS_CUBE: f64 = 0.471851;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatterSystem {
    n_electrons: u64,
    n_nuclei: u64,
    max_charge: f64,
    k3: ConstantValue,
}

impl MatterSystem {
    pub fn new(n_electrons: u64, n_nuclei: u64, max_charge: f64, k3: ConstantValue) -> Result<MatterSystem> {
        if n_electrons == 0 || n_nuclei == 0 {
            return domain("need at least one electron and one nucleus");
        }
        if !(max_charge >= 0.0 && max_charge.is_finite()) {
            return domain(format!("nuclear charge must be nonnegative, got {max_charge}"));
        }
        if k3.direction() == BoundDirection::UpperBound {
            return domain("K3 must be a lower bound (or exact value), not an upper bound");
        }
        Ok(MatterSystem { n_electrons, n_nuclei, max_charge, k3 })
    }

    pub fn n_electrons(&self) -> u64 {
        self.n_electrons
    }

    pub fn n_nuclei(&self) -> u64 {
        self.n_nuclei
    }

    pub fn max_charge(&self) -> f64 {
        self.max_charge
    }

    pub fn k3(&self) -> &ConstantValue {
        &self.k3
    }
}

/// Proven lower bound K₃ ≥ 0.471851^{1/3}·K^cl₃.
pub fn default_k3() -> ConstantValue {
    let kcl = classical_k(3).expect("d = 3 is valid").value();
    ConstantValue::new(
        K3_EXCESS_CUBE.cbrt() * kcl,
        ConstantKind::ImprovedBound,
        BoundDirection::LowerBound,
        "K3 >= 0.471851^(1/3) K3^cl",
    )
    .expect("positive")
}

/// The semiclassical value K^cl₃, which K₃ equals if the Lieb–Thirring conjecture holds.
pub fn conjectured_k3() -> ConstantValue {
    let kcl = classical_k(3).expect("d = 3 is valid").value();
    ConstantValue::new(kcl, ConstantKind::Conjectured, BoundDirection::Exact, "K3 = K3^cl (conjectured)").expect("positive")
}

/// −(3π^{4/3}/(2^{2/3}·5))·K₃⁻¹·(2z+1)²·(N+K).
pub fn stability_bound(sys: &MatterSystem) -> f64 {
    let c = 3.0 * PI.powf(4.0 / 3.0) / (2f64.powf(2.0 / 3.0) * 5.0);
    let q = 2.0 * sys.max_charge + 1.0;
    -c / sys.k3.value() * q * q * (sys.n_electrons + sys.n_nuclei) as f64
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct BaxterCheck {
    pub value: f64,
    pub direct: f64,
    pub expected: f64,
    pub rel_error: f64,
}

/// ∫_{ℝ³}(1/|y| − 1)₊^{5/2} dy = 4π∫₀¹(r^{−1}−1)^{5/2} r² dr = 5π²/4.
///
/// The main value uses r = t², which turns the integrand into 2(1−t²)^{5/2};
/// the untransformed integral is reported alongside.
pub fn baxter_integral_check() -> Result<BaxterCheck> {
    let opts = QuadOptions::tol(1e-15, 1e-13);
    let value = 4.0 * PI * integrate(|t: f64| 2.0 * (1.0 - t * t).max(0.0).powf(2.5), 0.0, 1.0, &opts)?.value;
    let direct = 4.0 * PI
        * integrate(
            |r: f64| if r <= 0.0 { 0.0 } else { (1.0 / r - 1.0).max(0.0).powf(2.5) * r * r },
            0.0,
            1.0,
            &QuadOptions::tol(1e-13, 1e-10),
        )?
        .value;
    let expected = 5.0 * PI * PI / 4.0;
    let rel_error = ((value - expected) / expected).abs();
    if rel_error > 1e-9 {
        return Err(LtError::Accuracy { what: "Baxter integral".into(), achieved: rel_error, required: 1e-9 });
    }
    Ok(BaxterCheck { value, direct, expected, rel_error })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ProofChain {
    pub t_star: f64,
    pub t_grid: f64,
    pub t_rel_error: f64,
    pub mu_star: f64,
    pub mu_grid: f64,
    pub mu_rel_error: f64,
    /// Energy bound after both optimizations, closed form and grid.
    pub value_closed: f64,
    pub value_grid: f64,
    /// −(3²π^{4/3}/(2^{4/3}·5))K₃⁻¹(2z+1)²K^{2/3}N^{1/3}
    pub intermediate_bound: f64,
    /// After K^{2/3}N^{1/3} ≤ (2^{2/3}/3)(K+N).
    pub final_bound: f64,
    /// (2^{2/3}/3)(K+N) − K^{2/3}N^{1/3} ≥ 0
    pub mean_slack: f64,
    pub passes: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct ChainInputs {
    pub t_range: Option<(f64, f64)>,
    pub mu_range: Option<(f64, f64)>,
    pub points: usize,
    pub exec: Execution,
}

impl Default for ChainInputs {
    fn default() -> Self {
        ChainInputs { t_range: None, mu_range: None, points: 2001, exec: Execution::Parallel }
    }
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

/// Argmin of f over a log grid on [lo, hi], zoomed once around the best cell.
fn grid_argmin<F: Fn(f64) -> f64 + Sync + Send>(f: F, lo: f64, hi: f64, n: usize, exec: Execution) -> (f64, f64) {
    let pick = |grid: &[f64]| {
        let vals = exec.map(grid, |&x| f(x));
        let i = (0..grid.len()).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).expect("nonempty grid");
        (i, vals[i])
    };
    let coarse = log_grid(lo, hi, n);
    let (i, _) = pick(&coarse);
    let (a, b) = (coarse[i.saturating_sub(2)], coarse[(i + 2).min(n - 1)]);
    let fine = log_grid(a, b, n);
    let (j, v) = pick(&fine);
    (fine[j], v)
}

/// The two optimizations of the proof (over the kinetic energy T, then over
/// the shift μ), each checked against a grid search, with the nuclear
/// integral bounded by (5π²/4)K.
pub fn proof_chain_optimizers(sys: &MatterSystem, inputs: &ChainInputs) -> Result<ProofChain> {
    if inputs.points < 5 {
        return domain("grid search needs at least 5 points");
    }
    let k3 = sys.k3.value();
    let q = 2.0 * sys.max_charge + 1.0;
    let n = sys.n_electrons as f64;
    let kk = sys.n_nuclei as f64;
    let j = 5.0 * PI * PI / 4.0 * kk;
    let c1 = 2.0 * 3f64.powf(1.5) / (5f64.powf(2.5) * k3.powf(1.5));
    let a = c1 * q.powi(3) * j;
    let mu_star = (a / (2.0 * n)).powf(2.0 / 3.0);
    // I(μ) = (2z+1)³ μ^{−1/2} J
    let nuclear = |mu: f64| q.powi(3) * mu.powf(-0.5) * j;
    let t_star = (3.0 / (5.0 * k3)).powf(2.5) * nuclear(mu_star);
    let energy = |t: f64, mu: f64| k3 * t - nuclear(mu).powf(0.4) * t.powf(0.6) - mu * n;

    let (t_lo, t_hi) = inputs.t_range.unwrap_or((t_star / 10.0, t_star * 10.0));
    let (m_lo, m_hi) = inputs.mu_range.unwrap_or((mu_star / 10.0, mu_star * 10.0));
    if !(t_lo > 0.0 && t_hi > t_lo && m_lo > 0.0 && m_hi > m_lo) {
        return domain("T and mu ranges must be positive and increasing");
    }
    let pts = inputs.points;
    let (t_grid, _) = grid_argmin(|t| energy(t, mu_star), t_lo, t_hi, pts, inputs.exec);
    // inner minimum over T on the grid, outer maximum over μ
    let inner = |mu: f64| grid_argmin(|t| energy(t, mu), t_lo, t_hi, pts, Execution::Sequential).1;
    let (mu_grid, neg_best) = grid_argmin(|mu| -inner(mu), m_lo, m_hi, pts, inputs.exec);
    let value_closed = -3.0 * (c1 * q.powi(3) * j / 2.0).powf(2.0 / 3.0) * n.powf(1.0 / 3.0);
    let value_grid = -neg_best;
    let intermediate = -(9.0 * PI.powf(4.0 / 3.0) / (2f64.powf(4.0 / 3.0) * 5.0)) / k3 * q * q * kk.powf(2.0 / 3.0) * n.cbrt();
    let final_bound = stability_bound(sys);
    let mean_slack = 2f64.powf(2.0 / 3.0) / 3.0 * (kk + n) - kk.powf(2.0 / 3.0) * n.cbrt();
    let t_rel_error = ((t_grid - t_star) / t_star).abs();
    let mu_rel_error = ((mu_grid - mu_star) / mu_star).abs();
    let consistent = ((value_closed - intermediate) / intermediate).abs() < 1e-12 && final_bound <= intermediate * (1.0 - 1e-15);
    Ok(ProofChain {
        t_star,
        t_grid,
        t_rel_error,
        mu_star,
        mu_grid,
        mu_rel_error,
        value_closed,
        value_grid,
        intermediate_bound: intermediate,
        final_bound,
        mean_slack,
        passes: t_rel_error < 1e-3 && mu_rel_error < 1e-3 && consistent && mean_slack >= -1e-12,
    })
}
