//! Radial ground state of −ΔQ − Q^{2p−1} = −Q by shooting on Q(0), and the
//! one-particle constants built from it.
//!
//! The integrals m = ∫Q², ∫|∇Q|² and ∫Q^{2p} are carried as extra ODE
//! components, so their accuracy is that of the integrator. A Simpson
//! evaluation on a resampled uniform grid is kept for cross-checks.

use crate::constants::{
    classical_l_value, keller_duality_inverse, max_sobolev_p, one_particle_l_1d, p_from_gamma, sphere_area,
    BoundDirection, ConstantKind, ConstantValue, GammaDim,
};
use crate::error::{domain, LtError, Result};
use crate::exec::Execution;
use crate::ode::{integrate, Flow, OdeOptions};
use crate::sphere::sobolev_one_particle;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootOptions {
    /// Relative tolerance of the Runge–Kutta integrator.
    pub rtol: f64,
    /// Initial (undershooting, overshooting) heights; found automatically when `None`.
    pub bracket: Option<(f64, f64)>,
    /// Distance kept from the point where the bracketing trajectories separate.
    pub tail_margin: f64,
    /// Maximal relative Pohozaev residual accepted.
    pub residual_tol: f64,
}

impl Default for ShootOptions {
    fn default() -> Self {
        ShootOptions { rtol: 1e-12, bracket: None, tail_margin: 4.0, residual_tol: 1e-6 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Outcome {
    /// Q turned back up while still positive: Q(0) too small.
    Under,
    /// Q crossed zero: Q(0) too large.
    Over,
    Undecided,
}

struct Trajectory {
    outcome: Outcome,
    r_stop: f64,
    r: Vec<f64>,
    y: Vec<[f64; 5]>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RadialProfile {
    pub dim: u32,
    pub p: f64,
    pub q0: f64,
    pub r_grid: Vec<f64>,
    pub q_values: Vec<f64>,
    pub dq_values: Vec<f64>,
    pub mass: f64,
    pub kinetic: f64,
    pub norm2p: f64,
    pub pohozaev_residuals: (f64, f64),
    pub shots: usize,
}

/// Integrals of a profile evaluated by composite Simpson on a uniform grid.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GridIntegrals {
    pub step: f64,
    pub mass: f64,
    pub kinetic: f64,
    pub norm2p: f64,
    pub pohozaev_residuals: (f64, f64),
}

fn residuals(d: u32, p: f64, mass: f64, kinetic: f64, norm2p: f64) -> (f64, f64) {
    let df = d as f64;
    let r1 = (kinetic - norm2p + mass) / mass;
    let r2 = ((0.5 * df - 1.0) * kinetic - df / (2.0 * p) * norm2p + 0.5 * df * mass) / mass;
    (r1, r2)
}

fn check_subcritical(d: u32, p: f64) -> Result<()> {
    if d == 0 {
        return domain("dimension must be at least 1");
    }
    if !(p > 1.0 && p.is_finite() && p < max_sobolev_p(d)) {
        return domain(format!("p = {p} is not a subcritical exponent for d = {d}"));
    }
    Ok(())
}

fn shoot(d: u32, p: f64, q0: f64, rtol: f64, record: bool) -> Result<Trajectory> {
    if q0 <= 1.0 {
        return Ok(Trajectory { outcome: Outcome::Under, r_stop: 0.0, r: vec![], y: vec![] });
    }
    let df = d as f64;
    let area = sphere_area(d)?;
    let e = 2.0 * p - 1.0;
    let width = q0.powf(-(p - 1.0)).min(1.0);
    let r0 = 1e-4 * width;
    let c = q0 - q0.powf(e);
    let y0 = [
        q0 + c * r0 * r0 / (2.0 * df),
        c * r0 / df,
        area * q0 * q0 * r0.powf(df) / df,
        area * (c / df).powi(2) * r0.powf(df + 2.0) / (df + 2.0),
        area * q0.powf(2.0 * p) * r0.powf(df) / df,
    ];
    let rhs = |r: f64, y: &[f64; 5]| {
        let q = y[0];
        let dq = y[1];
        let w = area * r.powi(d as i32 - 1);
        let aq = q.abs();
        [
            dq,
            -(df - 1.0) / r * dq + q - q.signum() * aq.powf(e),
            w * q * q,
            w * dq * dq,
            w * aq.powf(2.0 * p),
        ]
    };
    let opts = OdeOptions { rtol, atol: 1e-300, h_init: r0, h_max: 0.25 * width.max(0.2), max_steps: 2_000_000 };
    let r_end = r0 + 200.0 + 50.0 / (p - 1.0).min(1.0);
    let mut rs = Vec::new();
    let mut ys = Vec::new();
    let mut outcome = Outcome::Undecided;
    if record {
        rs.push(r0);
        ys.push(y0);
    }
    let end = integrate(rhs, r0, y0, r_end, &opts, |r, y, _| {
        if y[0] <= 0.0 {
            outcome = Outcome::Over;
            return Flow::Stop;
        }
        if y[1] >= 0.0 {
            outcome = Outcome::Under;
            return Flow::Stop;
        }
        if record {
            rs.push(r);
            ys.push(*y);
        }
        Flow::Continue
    })?;
    Ok(Trajectory { outcome, r_stop: end.t, r: rs, y: ys })
}

/// Decaying positive radial solution of Q'' + ((d−1)/r)Q' = Q − Q^{2p−1}, Q'(0) = 0.
pub fn shoot_ground_state(d: u32, p: f64, options: &ShootOptions) -> Result<RadialProfile> {
    check_subcritical(d, p)?;
    let rtol = options.rtol;
    let mut shots = 0usize;
    let mut classify = |q0: f64| -> Result<Outcome> {
        shots += 1;
        Ok(shoot(d, p, q0, rtol, false)?.outcome)
    };
    let (mut lo, mut hi) = match options.bracket {
        Some((a, b)) => {
            if !(a < b) || classify(a)? != Outcome::Under || classify(b)? != Outcome::Over {
                return Err(LtError::Solver(format!("initial heights ({a}, {b}) do not bracket the ground state")));
            }
            (a, b)
        }
        None => {
            let mut lo = 1.0;
            let mut hi = 1.5;
            let mut n = 0;
            loop {
                match classify(hi)? {
                    Outcome::Over => break,
                    _ => {
                        lo = hi;
                        hi *= 2.0;
                    }
                }
                n += 1;
                if n > 60 {
                    return Err(LtError::Solver(format!("no overshooting height found for d = {d}, p = {p}")));
                }
            }
            (lo, hi)
        }
    };
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        match classify(mid)? {
            Outcome::Under => lo = mid,
            Outcome::Over => hi = mid,
            Outcome::Undecided => {
                lo = mid;
                hi = mid;
            }
        }
    }
    let below = shoot(d, p, lo, rtol, true)?;
    let r_stop = if hi > lo { below.r_stop.min(shoot(d, p, hi, rtol, false)?.r_stop) } else { below.r_stop };
    shots += 2;
    let r_cut = r_stop - options.tail_margin;
    let last = below.r.partition_point(|&r| r <= r_cut);
    if last < 2 {
        return Err(LtError::Solver(format!("shooting for d = {d}, p = {p} left no usable profile")));
    }
    let (rc, yc) = (below.r[last - 1], below.y[last - 1]);
    let area = sphere_area(d)?;
    let wc = area * rc.powi(d as i32 - 1);
    let mass = yc[2] + 0.5 * wc * yc[0] * yc[0];
    let kinetic = yc[3] + 0.5 * wc * yc[1] * yc[1];
    let norm2p = yc[4] + wc * yc[0].powf(2.0 * p) / (2.0 * p);
    let res = residuals(d, p, mass, kinetic, norm2p);
    let worst = res.0.abs().max(res.1.abs());
    if !(worst <= options.residual_tol) {
        return Err(LtError::Accuracy {
            what: format!("Pohozaev residual of the ground state for d = {d}, p = {p}"),
            achieved: worst,
            required: options.residual_tol,
        });
    }
    let mut r_grid = Vec::with_capacity(last + 1);
    let mut q_values = Vec::with_capacity(last + 1);
    let mut dq_values = Vec::with_capacity(last + 1);
    r_grid.push(0.0);
    q_values.push(lo);
    dq_values.push(0.0);
    for (r, y) in below.r[..last].iter().zip(&below.y[..last]) {
        r_grid.push(*r);
        q_values.push(y[0]);
        dq_values.push(y[1]);
    }
    Ok(RadialProfile { dim: d, p, q0: lo, r_grid, q_values, dq_values, mass, kinetic, norm2p, pohozaev_residuals: res, shots })
}

impl RadialProfile {
    pub fn r_max(&self) -> f64 {
        *self.r_grid.last().expect("profile is nonempty")
    }

    /// Cubic Hermite interpolant of (Q, Q') at radius r within the profile.
    pub fn eval(&self, r: f64) -> (f64, f64) {
        let n = self.r_grid.len();
        let i = self.r_grid.partition_point(|&x| x <= r).clamp(1, n - 1);
        let (r0, r1) = (self.r_grid[i - 1], self.r_grid[i]);
        let h = r1 - r0;
        let t = (r - r0) / h;
        let (q0, q1) = (self.q_values[i - 1], self.q_values[i]);
        let (m0, m1) = (self.dq_values[i - 1] * h, self.dq_values[i] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        let q = (2.0 * t3 - 3.0 * t2 + 1.0) * q0 + (t3 - 2.0 * t2 + t) * m0 + (-2.0 * t3 + 3.0 * t2) * q1 + (t3 - t2) * m1;
        let dq = ((6.0 * t2 - 6.0 * t) * q0 + (3.0 * t2 - 4.0 * t + 1.0) * m0 + (-6.0 * t2 + 6.0 * t) * q1 + (3.0 * t2 - 2.0 * t) * m1) / h;
        (q, dq)
    }

    /// Simpson evaluation of the three integrals on a uniform grid of step ≈ h,
    /// plus the same exponential tail correction as the primary path.
    pub fn grid_integrals(&self, h: f64) -> Result<GridIntegrals> {
        if !(h > 0.0) {
            return domain(format!("grid step must be positive, got {h}"));
        }
        let rc = self.r_max();
        let mut n = (rc / h).ceil() as usize;
        n += n % 2;
        let n = n.max(2);
        let step = rc / n as f64;
        let area = sphere_area(self.dim)?;
        let dm1 = self.dim as i32 - 1;
        let (mut m, mut k, mut q2p) = (0.0, 0.0, 0.0);
        for i in 0..=n {
            let r = i as f64 * step;
            let wt = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
            let (q, dq) = if i == 0 { (self.q0, 0.0) } else { self.eval(r) };
            let w = wt * area * r.powi(dm1);
            m += w * q * q;
            k += w * dq * dq;
            q2p += w * q.abs().powf(2.0 * self.p);
        }
        let s = step / 3.0;
        let (qc, dqc) = (*self.q_values.last().unwrap(), *self.dq_values.last().unwrap());
        let wc = area * rc.powi(dm1);
        let mass = m * s + 0.5 * wc * qc * qc;
        let kinetic = k * s + 0.5 * wc * dqc * dqc;
        let norm2p = q2p * s + wc * qc.powf(2.0 * self.p) / (2.0 * self.p);
        Ok(GridIntegrals {
            step,
            mass,
            kinetic,
            norm2p,
            pohozaev_residuals: residuals(self.dim, self.p, mass, kinetic, norm2p),
        })
    }

    /// Two-column CSV (r, Q).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,Q\n");
        for (r, q) in self.r_grid.iter().zip(&self.q_values) {
            out.push_str(&format!("{r:.12e},{q:.12e}\n"));
        }
        out
    }
}

/// L^(1)_{γ,d} = 1/∫Q^{2p} from a shot ground state (any d, γ > 0).
pub fn one_particle_l_by_shooting(gd: GammaDim, options: &ShootOptions) -> Result<ConstantValue> {
    let p = p_from_gamma(gd.gamma(), gd.dim());
    let prof = shoot_ground_state(gd.dim(), p, options)?;
    ConstantValue::new(1.0 / prof.norm2p, ConstantKind::OneParticle, BoundDirection::Exact, format!("shooting ground state, p = {p}"))
}

/// One-particle constant L^(1)_{γ,d}: closed form in d = 1 and at γ = 0,
/// shooting otherwise.
pub fn one_particle_l(gd: GammaDim) -> Result<ConstantValue> {
    if gd.dim() == 1 {
        return one_particle_l_1d(gd.gamma());
    }
    if gd.gamma() == 0.0 {
        return sobolev_one_particle(gd.dim());
    }
    one_particle_l_by_shooting(gd, &ShootOptions::default())
}

/// One-particle interpolation constant K^(1)_{p,d}.
pub fn one_particle_k(p: f64, d: u32) -> Result<ConstantValue> {
    if d == 0 {
        return domain("dimension must be at least 1");
    }
    let df = d as f64;
    let pmax = max_sobolev_p(d);
    if !(p > 1.0 && p <= pmax) {
        return domain(format!("p = {p} outside (1, {pmax}] for d = {d}"));
    }
    let v = if (p - (1.0 + 2.0 / df)).abs() < 1e-14 {
        let prof = shoot_ground_state(d, p, &ShootOptions::default())?;
        df / (df + 2.0) * prof.mass.powf(2.0 / df)
    } else if p == pmax {
        keller_duality_inverse(p, d, sobolev_one_particle(d)?.value())?
    } else {
        let prof = shoot_ground_state(d, p, &ShootOptions::default())?;
        keller_duality_inverse(p, d, 1.0 / prof.norm2p)?
    };
    ConstantValue::new(v, ConstantKind::OneParticle, BoundDirection::Exact, format!("ground state, p = {p}"))
}

/// The kinetic constant at p = 1+2/d through the duality route instead of the mass.
pub fn one_particle_k_via_duality(d: u32) -> Result<f64> {
    let p = 1.0 + 2.0 / d as f64;
    let prof = shoot_ground_state(d, p, &ShootOptions::default())?;
    keller_duality_inverse(p, d, 1.0 / prof.norm2p)
}

fn log_ratio(gamma: f64, d: u32) -> Result<f64> {
    let gd = GammaDim::new(gamma, d)?;
    Ok((one_particle_l(gd)?.value() / classical_l_value(gamma, d)).ln())
}

/// L^(1)_{γ,d}/L^cl_{γ,d} over a grid of γ, evaluated independently per point.
pub fn ratio_scan(d: u32, gammas: &[f64], exec: Execution) -> Result<Vec<f64>> {
    exec.map(gammas, |&g| log_ratio(g, d).map(f64::exp)).into_iter().collect()
}

/// Exponent where the one-particle constant meets the semiclassical one,
/// by bisection on [0.01, 3] (the lower endpoint is evaluated only if needed).
pub fn gamma_crossing(d: u32) -> Result<f64> {
    if !(1..=7).contains(&d) {
        return domain(format!("crossing exponent supported for 1 <= d <= 7, got {d}"));
    }
    let (mut lo, mut hi) = (if d == 1 { 0.5 } else { 0.01 }, 3.0);
    if log_ratio(hi, d)? >= 0.0 {
        return Err(LtError::Solver(format!("no sign change of the one-particle ratio on [{lo}, {hi}]")));
    }
    let lo0 = lo;
    let tol = if d == 1 { 1e-12 } else { 1e-8 };
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if log_ratio(mid, d)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if lo == lo0 && log_ratio(lo0, d)? <= 0.0 {
        return Err(LtError::Solver(format!("no sign change of the one-particle ratio on [{lo0}, 3]")));
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{classical_k, keller_duality};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn soliton_mass_in_1d() {
        let prof = shoot_ground_state(1, 3.0, &ShootOptions::default()).unwrap();
        assert_relative_eq!(prof.mass, 3f64.sqrt() * PI / 2.0, max_relative = 1e-8);
        assert_relative_eq!(prof.q0, 3f64.powf(0.25), max_relative = 1e-10);
        assert_relative_eq!(prof.norm2p, 3.0 * 3f64.sqrt() * PI / 4.0, max_relative = 1e-8);
    }

    #[test]
    fn soliton_profile_matches_sech() {
        let p = 5.0 / 3.0;
        let prof = shoot_ground_state(1, p, &ShootOptions::default()).unwrap();
        for &x in &[0.3, 1.0, 2.5, 5.0] {
            let exact = (p / ((p - 1.0) * x).cosh().powi(2)).powf(1.0 / (2.0 * p - 2.0));
            assert_relative_eq!(prof.eval(x).0, exact, max_relative = 1e-7);
        }
    }

    #[test]
    fn kinetic_constant_one_dimension() {
        let k = one_particle_k(3.0, 1).unwrap().value();
        assert_relative_eq!(k, PI * PI / 4.0, max_relative = 1e-8);
    }

    #[test]
    fn three_dimensional_profile_is_valid() {
        let prof = shoot_ground_state(3, 5.0 / 3.0, &ShootOptions::default()).unwrap();
        assert!(prof.pohozaev_residuals.0.abs() <= 1e-6);
        assert!(prof.pohozaev_residuals.1.abs() <= 1e-6);
        assert!(prof.q_values.windows(2).all(|w| w[1] < w[0]));
        assert!(prof.r_grid.windows(2).all(|w| w[1] > w[0]));
        assert!(*prof.q_values.last().unwrap() < 1e-5 * prof.q0);
    }

    #[test]
    fn two_dimensional_kinetic_paths_agree() {
        let direct = one_particle_k(2.0, 2).unwrap().value();
        let dual = one_particle_k_via_duality(2).unwrap();
        assert_relative_eq!(direct, dual, max_relative = 1e-6);
        // Weinstein's constant: 2 m / (1·4π)... checked only against the classical one here
        assert!(direct < classical_k(2).unwrap().value());
    }

    #[test]
    fn sobolev_exponent_round_trip() {
        let k = one_particle_k(2.0, 3).unwrap().value();
        assert!(k.is_finite() && k > 0.0);
        let l = keller_duality(2.0, 3, k).unwrap();
        let back = keller_duality_inverse(2.0, 3, l).unwrap();
        assert_relative_eq!(back, k, max_relative = 1e-14);
    }

    #[test]
    fn shooting_agrees_with_closed_form_in_1d() {
        for g in [0.75, 1.0, 1.5, 2.0] {
            let gd = GammaDim::new(g, 1).unwrap();
            let a = one_particle_l_by_shooting(gd, &ShootOptions::default()).unwrap().value();
            let b = one_particle_l(gd).unwrap().value();
            assert_relative_eq!(a, b, max_relative = 1e-6);
        }
    }

    #[test]
    fn critical_value_in_3d() {
        let v = one_particle_l(GammaDim::new(0.0, 3).unwrap()).unwrap().value();
        assert_relative_eq!(v, 8.0 / 3f64.sqrt() * classical_l_value(0.0, 3), max_relative = 1e-12);
        assert_relative_eq!(one_particle_l(GammaDim::new(0.5, 1).unwrap()).unwrap().value(), 0.5, max_relative = 1e-14);
    }

    #[test]
    fn q0_does_not_depend_on_bracket() {
        let base = shoot_ground_state(2, 3.0, &ShootOptions::default()).unwrap().q0;
        for br in [(1.01, 10.0), (1.5, 3.0), (1.0, 100.0)] {
            let o = ShootOptions { bracket: Some(br), ..ShootOptions::default() };
            let q0 = shoot_ground_state(2, 3.0, &o).unwrap().q0;
            assert!((q0 - base).abs() <= 1e-8 * base, "{br:?}: {q0} vs {base}");
        }
        let bad = ShootOptions { bracket: Some((3.0, 4.0)), ..ShootOptions::default() };
        assert!(matches!(shoot_ground_state(2, 3.0, &bad), Err(LtError::Solver(_))));
    }

    #[test]
    fn simpson_refinement_shrinks_residuals() {
        let prof = shoot_ground_state(3, 2.0, &ShootOptions::default()).unwrap();
        let mut prev = f64::INFINITY;
        for h in [0.4, 0.2, 0.1] {
            let g = prof.grid_integrals(h).unwrap();
            let r = g.pohozaev_residuals.0.abs().max(g.pohozaev_residuals.1.abs());
            assert!(r * 3.0 <= prev, "h={h}: {r} vs {prev}");
            prev = r;
        }
        let fine = prof.grid_integrals(0.01).unwrap();
        assert_relative_eq!(fine.mass, prof.mass, max_relative = 1e-7);
    }

    #[test]
    fn supercritical_rejected() {
        assert!(shoot_ground_state(3, 3.0, &ShootOptions::default()).is_err());
        assert!(shoot_ground_state(2, 1.0, &ShootOptions::default()).is_err());
    }

    #[test]
    fn crossing_in_1d_is_three_halves() {
        assert_relative_eq!(gamma_crossing(1).unwrap(), 1.5, epsilon = 1e-9);
        assert!(gamma_crossing(8).is_err());
    }

    #[test]
    fn csv_has_header() {
        let prof = shoot_ground_state(1, 2.0, &ShootOptions::default()).unwrap();
        let csv = prof.to_csv();
        assert!(csv.starts_with("r,Q\n"));
        assert_eq!(csv.lines().count(), prof.r_grid.len() + 1);
    }
}
