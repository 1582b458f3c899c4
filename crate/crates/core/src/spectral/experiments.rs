//! Numerical experiments built on the spectral engine.

use super::{discretize_1d, spectrum, spectrum_1d, GridOptions, PotentialSpec};
use crate::constants::{classical_l_value, one_particle_l_1d, sphere_area, GammaDim};
use crate::error::{domain, LtError, Result};
use crate::exec::Execution;
use crate::quad::{integrate_points, integrate_to_infinity, QuadOptions};
use crate::special::beta_fn;
use serde::Serialize;

/// Ground state of −u'' − depth·1_{|x|<a} u from the matching condition
/// k tan(ka) = κ, with k² = depth + E and κ² = −E.
pub fn square_well_ground_state(depth: f64, half_width: f64) -> Result<f64> {
    if !(depth > 0.0 && half_width > 0.0) {
        return domain("square well needs positive depth and width");
    }
    let a = half_width;
    let f = |k: f64| k * (k * a).tan() - (depth - k * k).max(0.0).sqrt();
    let mut lo = 0.0;
    let mut hi = (0.5 * std::f64::consts::PI / a).min(depth.sqrt()) * (1.0 - 1e-15);
    if f(hi) < 0.0 {
        return Err(LtError::Solver("matching condition has no root below the first branch".into()));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let k = 0.5 * (lo + hi);
    Ok(k * k - depth)
}

#[derive(Debug, Clone, Serialize)]
pub struct WeylRow {
    pub coupling: f64,
    pub riesz_mean: f64,
    pub count: u64,
    /// α^{−γ−d/2} Σ|E_n(−Δ+αV)|^γ / (L^cl ∫V₋^{γ+d/2})
    pub ratio: f64,
}

/// Strong-coupling (Weyl) ratios for a list of couplings α.
pub fn weyl_convergence(v: &PotentialSpec, gamma: f64, couplings: &[f64], opts: &GridOptions) -> Result<Vec<WeylRow>> {
    let gd = GammaDim::new(gamma, v.dim)?;
    let norm = v.negative_part_norm(gd.potential_exponent())?;
    let lcl = classical_l_value(gamma, v.dim);
    let vmax = v.sup_abs();
    couplings
        .iter()
        .map(|&alpha| {
            if !(alpha > 0.0) {
                return domain(format!("coupling must be positive, got {alpha}"));
            }
            let resolution = opts.step * (alpha * vmax / opts.kinetic).sqrt();
            if resolution > 0.1 {
                return Err(LtError::Resolution(format!(
                    "step {} too coarse for coupling {alpha}: h*sqrt(alpha*|V|) = {resolution:.3}",
                    opts.step
                )));
            }
            let s = spectrum(&v.scaled(alpha, 1.0)?, opts)?;
            let riesz = s.riesz_mean(gamma);
            Ok(WeylRow {
                coupling: alpha,
                riesz_mean: riesz,
                count: s.count_below(0.0),
                ratio: alpha.powf(-gd.potential_exponent()) * riesz / (lcl * norm),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct MonotonicityRow {
    pub hbar: f64,
    pub value: f64,
    pub increase: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct MonotonicityTable {
    pub dim: u32,
    pub gamma: f64,
    pub rows: Vec<MonotonicityRow>,
    pub increases: usize,
    /// L^cl_{γ,d} ∫(|x|²−1)₋^{γ+d/2} dx, the ħ → 0 limit.
    pub semiclassical_limit: f64,
}

/// ħ^d Σ_n (1 − ħ(2|n|₁+d))₊^γ for −ħ²Δ + |x|² − 1, from the exact
/// oscillator spectrum (levels 2k+d with multiplicity C(k+d−1, d−1)).
pub fn scaled_riesz_mean(d: u32, gamma: f64, hbar: f64) -> f64 {
    let mut total = 0.0;
    let mut mult = 1.0f64;
    let mut k = 0u64;
    loop {
        let gap = 1.0 - hbar * (2 * k + d as u64) as f64;
        if gap <= 0.0 {
            break;
        }
        total += mult * if gamma == 0.0 { 1.0 } else { gap.powf(gamma) };
        // C(k+d, d−1) = C(k+d−1, d−1)·(k+d)/(k+1)
        mult = mult * (k + d as u64) as f64 / (k + 1) as f64;
        k += 1;
    }
    hbar.powi(d as i32) * total
}

/// Scan of [`scaled_riesz_mean`] over an increasing ħ grid, flagging every
/// step where it goes up.
pub fn monotonicity_experiment(d: u32, gamma: f64, hbars: &[f64], exec: Execution) -> Result<MonotonicityTable> {
    if d == 0 || !(gamma >= 0.0) {
        return domain("need d >= 1 and gamma >= 0");
    }
    if hbars.iter().any(|h| !(*h > 0.0)) || hbars.windows(2).any(|w| !(w[1] > w[0])) {
        return domain("hbar grid must be positive and strictly increasing");
    }
    let values = exec.map(hbars, |&h| scaled_riesz_mean(d, gamma, h));
    let mut rows = Vec::with_capacity(values.len());
    for (i, (&h, &v)) in hbars.iter().zip(&values).enumerate() {
        let increase = i > 0 && v > values[i - 1] * (1.0 + 1e-13) + 1e-300;
        rows.push(MonotonicityRow { hbar: h, value: v, increase });
    }
    let df = d as f64;
    let kappa = gamma + 0.5 * df;
    let limit = classical_l_value(gamma, d) * sphere_area(d)? * 0.5 * beta_fn(0.5 * df, kappa + 1.0)?;
    Ok(MonotonicityTable { dim: d, gamma, increases: rows.iter().filter(|r| r.increase).count(), rows, semiclassical_limit: limit })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ReverseCheck {
    pub sum_sqrt: f64,
    pub quarter_integral: f64,
    pub margin: f64,
    pub slack: f64,
    pub holds: bool,
}

/// Σ|E_n|^{1/2} ≥ (1/4)∫V₋ in one dimension for V ≤ 0.
pub fn reverse_bound_check(v: &PotentialSpec, opts: &GridOptions) -> Result<ReverseCheck> {
    if v.dim != 1 {
        return domain("the reverse bound is one-dimensional");
    }
    if !v.is_nonpositive() {
        return domain("the reverse bound needs V <= 0");
    }
    let s = spectrum_1d(v, opts, 0.0)?;
    let sum_sqrt = s.riesz_mean(0.5);
    let quarter = 0.25 * v.negative_part_norm(1.0)?;
    let slack = s
        .eigenvalues
        .iter()
        .zip(&s.error_estimate)
        .map(|(e, err)| err / (2.0 * (-e).sqrt()))
        .sum::<f64>()
        + 1e-9;
    let margin = sum_sqrt - quarter;
    Ok(ReverseCheck { sum_sqrt, quarter_integral: quarter, margin, slack, holds: margin >= -slack })
}

#[derive(Debug, Clone, Serialize)]
pub struct TwoBumpRow {
    pub separation: f64,
    pub e1: f64,
    pub e2: f64,
    pub ratio: f64,
    /// A = ½∫((Q₊²+Q₋²)^p − Q₊^{2p} − Q₋^{2p})
    pub overlap: f64,
    /// L^(1)(1 + (γ/p)A/m)
    pub predicted: f64,
    pub excess: f64,
    /// (ratio − L^(1))/A divided by its first-order prediction (γ/(p m))L^(1).
    pub normalized_slope: f64,
    pub ratio_error: f64,
    pub in_regime: bool,
    /// Excess resolved above ten times its discretization error.
    pub stable: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct TwoBumpTable {
    pub gamma: f64,
    pub p: f64,
    pub mass: f64,
    pub one_particle: f64,
    pub rows: Vec<TwoBumpRow>,
}

fn soliton_integral(p: f64, power: f64) -> Result<f64> {
    let f = |x: f64| super::soliton_sq(p, x).powf(power);
    Ok(2.0 * integrate_to_infinity(f, 0.0, &QuadOptions::tol(1e-16, 1e-13))?.value)
}

/// Overlap A for bumps centred at ±R/2, computed without cancellation.
pub fn bump_overlap(p: f64, separation: f64) -> Result<f64> {
    let f = |x: f64| {
        let a = super::soliton_sq(p, x - 0.5 * separation);
        let b = super::soliton_sq(p, x + 0.5 * separation);
        let (big, small) = if a >= b { (a, b) } else { (b, a) };
        if big == 0.0 {
            return 0.0;
        }
        big.powf(p) * (p * (small / big).ln_1p()).exp_m1() - small.powf(p)
    };
    let opts = QuadOptions::tol(1e-300, 1e-12);
    let mid = if separation > 0.0 { integrate_points(f, &[0.0, 0.5 * separation], &opts)?.value } else { 0.0 };
    let tail = integrate_to_infinity(f, 0.5 * separation, &opts)?.value;
    // integrand is even; ½ · 2 · ∫_0^∞
    Ok(mid + tail)
}

/// Two copies of the one-bound-state optimizer at distance R: the sum of the
/// two lowest eigenvalues beats the one-particle constant.
pub fn two_bump_experiment(gamma: f64, separations: &[f64], opts: &GridOptions) -> Result<TwoBumpTable> {
    if !(gamma > 1.5) {
        return domain(format!("two-bump experiment needs gamma > 3/2, got {gamma}"));
    }
    let p = super::two_bump_exponent(gamma);
    let mass = soliton_integral(p, 1.0)?;
    let l1 = one_particle_l_1d(gamma)?.value();
    let rows = separations
        .iter()
        .map(|&r| {
            let v = PotentialSpec::two_bump(gamma, r)?;
            let s = spectrum_1d(&v, opts, 0.0)?;
            let a = bump_overlap(p, r)?;
            let norm = 2.0 / l1 + 2.0 * a;
            let predicted = l1 * (1.0 + gamma / p * a / mass);
            if s.eigenvalues.len() < 2 {
                return Ok(TwoBumpRow {
                    separation: r,
                    e1: s.eigenvalues.first().copied().unwrap_or(f64::NAN),
                    e2: f64::NAN,
                    ratio: f64::NAN,
                    overlap: a,
                    predicted,
                    excess: f64::NAN,
                    normalized_slope: f64::NAN,
                    ratio_error: f64::NAN,
                    in_regime: false,
                    stable: false,
                });
            }
            let (e1, e2) = (s.eigenvalues[0], s.eigenvalues[1]);
            let ratio = ((-e1).powf(gamma) + (-e2).powf(gamma)) / norm;
            let ratio_error = gamma
                * ((-e1).powf(gamma - 1.0) * s.error_estimate[0] + (-e2).powf(gamma - 1.0) * s.error_estimate[1])
                / norm;
            let excess = ratio - l1;
            let in_regime = e2 < -0.5;
            Ok(TwoBumpRow {
                separation: r,
                e1,
                e2,
                ratio,
                overlap: a,
                predicted,
                excess,
                normalized_slope: excess / a / (gamma / (p * mass) * l1),
                ratio_error,
                in_regime,
                stable: in_regime && excess > 10.0 * ratio_error,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TwoBumpTable { gamma, p, mass, one_particle: l1, rows })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SlaterCheck {
    pub particles: usize,
    pub kinetic_determinant: f64,
    pub kinetic_sum: f64,
    pub kinetic_gap: f64,
    pub density_gap: f64,
    pub holds: bool,
}

/// Dirichlet box modes sampled on the interior grid of [−X, X]; exactly
/// orthonormal for the discrete inner product Σ u v · h.
pub fn box_modes(half_width: f64, points: usize, count: usize) -> (Vec<Vec<f64>>, f64) {
    let len = 2.0 * half_width;
    let h = len / (points + 1) as f64;
    let modes = (1..=count)
        .map(|k| {
            (1..=points)
                .map(|i| (2.0 / len).sqrt() * (k as f64 * std::f64::consts::PI * i as f64 / (points + 1) as f64).sin())
                .collect()
        })
        .collect();
    (modes, h)
}

fn forward_kinetic(u: &[f64], h: f64) -> f64 {
    let n = u.len();
    let mut acc = u[0] * u[0];
    for i in 1..n {
        acc += (u[i] - u[i - 1]).powi(2);
    }
    acc += u[n - 1] * u[n - 1];
    acc / h
}

fn det(m: &[[f64; 3]; 3], n: usize) -> f64 {
    match n {
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        _ => {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        }
    }
}

/// For N ≤ 3 grid-orthonormal functions, checks on the N-fold tensor grid
/// that the Slater determinant has kinetic energy Σ‖u_n'‖² and one-body
/// density Σ|u_n|².
pub fn slater_identity_check(us: &[Vec<f64>], h: f64, exec: Execution) -> Result<SlaterCheck> {
    let n = us.len();
    if !(1..=3).contains(&n) {
        return domain(format!("Slater check supports 1 to 3 functions, got {n}"));
    }
    let m = us[0].len();
    if m < 2 || us.iter().any(|u| u.len() != m) {
        return domain("functions must share one grid of at least two points");
    }
    for i in 0..n {
        for j in 0..n {
            let ip: f64 = us[i].iter().zip(&us[j]).map(|(a, b)| a * b).sum::<f64>() * h;
            let target = if i == j { 1.0 } else { 0.0 };
            if (ip - target).abs() > 1e-10 {
                return domain(format!("functions are not orthonormal on the grid: <u{i},u{j}> = {ip}"));
            }
        }
    }
    let norm = (1..=n).map(|k| k as f64).product::<f64>().sqrt();
    let psi = |idx: &[usize]| -> f64 {
        let mut mat = [[0.0; 3]; 3];
        for (r, &x) in idx.iter().enumerate() {
            for (c, u) in us.iter().enumerate() {
                mat[r][c] = u[x];
            }
        }
        det(&mat, n) / norm
    };
    let total = m.pow(n as u32 - 1);
    let split = |rest: usize| -> Vec<usize> {
        let mut out = Vec::with_capacity(n - 1);
        let mut r = rest;
        for _ in 1..n {
            out.push(r % m);
            r /= m;
        }
        out
    };
    // per first coordinate: (kinetic along every axis of the slice, density)
    let per_first = exec.map_range(m, |i0| {
        let mut kin = 0.0;
        let mut dens = 0.0;
        let mut idx = vec![0usize; n];
        idx[0] = i0;
        for rest in 0..total {
            idx[1..].copy_from_slice(&split(rest));
            let v = psi(&idx);
            dens += v * v;
            for axis in 0..n {
                // forward difference to the right neighbour (zero past the end)
                let mut j = idx.clone();
                let right = if j[axis] + 1 < m {
                    j[axis] += 1;
                    psi(&j)
                } else {
                    0.0
                };
                kin += (right - v).powi(2);
                if idx[axis] == 0 {
                    kin += v * v;
                }
            }
        }
        (kin, dens)
    });
    let hn = h.powi(n as i32);
    let kinetic_determinant = per_first.iter().map(|x| x.0).sum::<f64>() / (h * h) * hn;
    let kinetic_sum: f64 = us.iter().map(|u| forward_kinetic(u, h)).sum();
    let mut density_gap = 0.0f64;
    for (i0, (_, dens)) in per_first.iter().enumerate() {
        let rho_det = n as f64 * dens * h.powi(n as i32 - 1);
        let rho_sum: f64 = us.iter().map(|u| u[i0] * u[i0]).sum();
        density_gap = density_gap.max((rho_det - rho_sum).abs());
    }
    let kinetic_gap = ((kinetic_determinant - kinetic_sum) / kinetic_sum).abs();
    Ok(SlaterCheck {
        particles: n,
        kinetic_determinant,
        kinetic_sum,
        kinetic_gap,
        density_gap,
        holds: kinetic_gap <= 1e-8 && density_gap <= 1e-8,
    })
}

/// Lowest eigenvalue (any sign) of one radial channel, for threshold studies.
pub fn lowest_channel_eigenvalue(v: &PotentialSpec, ell: u32, opts: &GridOptions) -> Result<f64> {
    let op = if v.is_radial() {
        super::discretize_radial(v, v.dim, ell, opts.half_width, opts.step, opts.kinetic)?
    } else {
        discretize_1d(v, opts.half_width, opts.step, opts.kinetic)?
    };
    let upper = op.diagonal().iter().copied().fold(f64::NEG_INFINITY, f64::max) + 4.0 * op.off_diagonal().iter().fold(0.0f64, |m, x| m.max(x.abs())) + 1.0;
    Ok(op.eigenvalue(0, upper))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ground_state::{shoot_ground_state, ShootOptions};
    use approx::assert_relative_eq;

    #[test]
    fn square_well_oracle() {
        let e = square_well_ground_state(1.0, 1.0).unwrap();
        let k = (1.0 + e).sqrt();
        assert_relative_eq!(k * k.tan(), (-e).sqrt(), max_relative = 1e-12);
        let v = PotentialSpec::square_well(1.0, 2.0, 1).unwrap();
        let s = spectrum_1d(&v, &GridOptions::with(12.0, 2e-3), 0.0).unwrap();
        assert!((s.eigenvalues[0] - e).abs() < 1e-6, "{} vs {e}", s.eigenvalues[0]);
    }

    #[test]
    fn translation_invariance() {
        let v = PotentialSpec::square_well(2.0, 2.0, 1).unwrap();
        let t = PotentialSpec::tabulated(vec![-1.0, -0.5, 0.5, 1.0], vec![0.0, -2.0, -2.0, 0.0]).unwrap();
        let shifted = PotentialSpec::tabulated(vec![0.0, 0.5, 1.5, 2.0], vec![0.0, -2.0, -2.0, 0.0]).unwrap();
        let o = GridOptions::with(10.0, 5e-3);
        let a = spectrum_1d(&t, &o, 0.0).unwrap();
        let b = spectrum_1d(&shifted, &o, 0.0).unwrap();
        assert_eq!(a.eigenvalues.len(), b.eigenvalues.len());
        for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
            assert!((x - y).abs() < 1e-7);
        }
        assert!(!spectrum_1d(&v, &o, 0.0).unwrap().eigenvalues.is_empty());
    }

    #[test]
    fn weyl_limit_and_weak_coupling() {
        let v = PotentialSpec::gaussian(1.0, 1.0, 1).unwrap();
        let o = GridOptions::with(8.0, 1e-3);
        let rows = weyl_convergence(&v, 1.0, &[100.0, 1e4], &o).unwrap();
        assert!((rows[1].ratio - 1.0).abs() < 0.02, "{:?}", rows);
        assert!((rows[1].ratio - 1.0).abs() < (rows[0].ratio - 1.0).abs());
        let weak = weyl_convergence(&v, 0.5, &[0.05], &GridOptions::with(400.0, 0.05)).unwrap();
        assert!(weak[0].ratio > 1.0, "{:?}", weak);
        assert!(matches!(weyl_convergence(&v, 1.0, &[1e6], &o), Err(LtError::Resolution(_))));
        let twice = weyl_convergence(&v.scaled(2.0, 1.0).unwrap(), 1.0, &[50.0], &o).unwrap();
        let direct = weyl_convergence(&v, 1.0, &[100.0], &o).unwrap();
        assert_relative_eq!(twice[0].riesz_mean, direct[0].riesz_mean, max_relative = 1e-10);
    }

    #[test]
    fn monotonicity_closed_form() {
        let grid: Vec<f64> = (1..=1000).map(|i| i as f64 / 1000.0).collect();
        let t = monotonicity_experiment(1, 2.0, &grid, Execution::Parallel).unwrap();
        assert_eq!(t.increases, 0);
        let near: Vec<f64> = (0..400).map(|i| 0.10 + 0.03 * i as f64 / 400.0).collect();
        let t1 = monotonicity_experiment(1, 1.0, &near, Execution::Sequential).unwrap();
        assert!(t1.increases >= 1);
        assert!(t1.rows.iter().any(|r| r.increase && r.hbar > 1.0 / 9.0 && r.hbar < 1.0 / 8.0));
        for d in 1..=3 {
            let lim = monotonicity_experiment(d, 1.0, &[1e-4], Execution::Sequential).unwrap();
            assert_relative_eq!(lim.rows[0].value, lim.semiclassical_limit, max_relative = 2e-3);
        }
        assert!(monotonicity_experiment(1, 1.0, &[0.2, 0.1], Execution::Sequential).is_err());
    }

    #[test]
    fn oscillator_sum_matches_fd() {
        let hbar: f64 = 0.11;
        let v = PotentialSpec::parse("shifted_harmonic").unwrap();
        let o = GridOptions { kinetic: hbar * hbar, ..GridOptions::with(3.0, 2e-3) };
        let s = spectrum_1d(&v, &o, 0.0).unwrap();
        assert_relative_eq!(hbar * s.riesz_mean(1.0), scaled_riesz_mean(1, 1.0, hbar), max_relative = 1e-6);
    }

    #[test]
    fn reverse_bound() {
        let o = GridOptions::with(20.0, 2e-3);
        let sw = reverse_bound_check(&PotentialSpec::square_well(1.0, 2.0, 1).unwrap(), &o).unwrap();
        assert!(sw.holds && sw.margin > 0.0);
        let pt = reverse_bound_check(&PotentialSpec::poschl_teller(2.0), &o).unwrap();
        assert!(pt.holds);
        assert!(pt.margin.abs() < 1e-6, "{:?}", pt);
        assert_relative_eq!(pt.sum_sqrt, 3.0, max_relative = 1e-7);
        let flat = reverse_bound_check(&PotentialSpec::square_well(1e-300, 1.0, 1).unwrap(), &o).unwrap();
        assert_eq!(flat.sum_sqrt, 0.0);
        assert!(flat.holds);
        assert!(reverse_bound_check(&PotentialSpec::parse("shifted_harmonic").unwrap(), &o).is_err());
    }

    #[test]
    fn two_bump_soliton_matches_shooting() {
        let p = 5.0 / 3.0;
        let prof = shoot_ground_state(1, p, &ShootOptions::default()).unwrap();
        assert_relative_eq!(soliton_integral(p, 1.0).unwrap(), prof.mass, max_relative = 1e-8);
        assert_relative_eq!(1.0 / soliton_integral(p, p).unwrap(), one_particle_l_1d(2.0).unwrap().value(), max_relative = 1e-10);
        let a = bump_overlap(p, 6.0).unwrap();
        let v = PotentialSpec::two_bump(2.0, 6.0).unwrap();
        let direct = v.negative_part_norm(2.5).unwrap();
        assert_relative_eq!(direct, 2.0 * soliton_integral(p, p).unwrap() + 2.0 * a, max_relative = 1e-10);
    }

    #[test]
    fn two_bump_beats_one_particle() {
        let t = two_bump_experiment(2.0, &[4.0, 6.0, 8.0], &GridOptions::with(25.0, 4e-3)).unwrap();
        for r in &t.rows {
            assert!(r.in_regime);
            assert!(r.ratio > t.one_particle, "{:?}", r);
        }
        assert!(two_bump_experiment(1.0, &[4.0], &GridOptions::default()).is_err());
    }

    #[test]
    fn slater() {
        let (u, h) = box_modes(1.0, 60, 3);
        for k in 1..=3 {
            let c = slater_identity_check(&u[..k], h, Execution::Parallel).unwrap();
            assert!(c.holds, "{:?}", c);
            assert!(c.kinetic_gap < 1e-10);
        }
        let dup = vec![u[0].clone(), u[0].clone()];
        assert!(slater_identity_check(&dup, h, Execution::Sequential).is_err());
    }
}
