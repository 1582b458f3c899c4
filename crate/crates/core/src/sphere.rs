//! Exact counting on the d-sphere behind the conformal (stereographic)
//! construction of critical-case trial potentials.
//!
//! Counts are big integers throughout; only the ratios `a_L` are floating.

use crate::constants::{classical_l_value, n_sphere_area, BoundDirection, ConstantKind, ConstantValue};
use crate::error::{domain, Result};
use crate::special::ln_gamma_unchecked;
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

fn binomial(n: u64, k: u64) -> BigUint {
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Degeneracy of the ℓ-th eigenvalue ℓ(ℓ+d−1) of the Laplace–Beltrami
/// operator on the d-sphere.
pub fn multiplicity(d: u32, ell: u64) -> Result<BigUint> {
    if d < 2 {
        return domain(format!("sphere dimension must be at least 2, got {d}"));
    }
    let d = d as u64;
    let num = BigUint::from(2 * ell + d - 1) * binomial(ell + d - 2, ell);
    Ok(num / (d - 1))
}

/// Σ_{ℓ ≤ L} ν_ℓ by direct summation.
pub fn cumulative_count(d: u32, big_l: u64) -> Result<BigUint> {
    let mut acc = BigUint::zero();
    for ell in 0..=big_l {
        acc += multiplicity(d, ell)?;
    }
    Ok(acc)
}

/// The same count from the closed form (2L+d)·C(L+d−1, L)/d.
pub fn cumulative_count_closed(d: u32, big_l: u64) -> Result<BigUint> {
    if d < 2 {
        return domain(format!("sphere dimension must be at least 2, got {d}"));
    }
    let d = d as u64;
    let num = BigUint::from(2 * big_l + d) * binomial(big_l + d - 1, big_l);
    if !(&num % d).is_zero() {
        return domain("closed-form count is not an integer");
    }
    Ok(num / d)
}

fn check_d3(d: u32) -> Result<()> {
    if d < 3 {
        return domain(format!("critical-case sphere construction needs d >= 3, got {d}"));
    }
    Ok(())
}

/// Number of ℓ-levels (with multiplicity) satisfying
/// ℓ(ℓ+d−1) + d(d−2)/4 + W ≤ 0, for a constant potential W < 0.
pub fn count_constant_potential(d: u32, w: f64) -> Result<BigUint> {
    check_d3(d)?;
    if !(w < 0.0) || !w.is_finite() {
        return domain(format!("constant potential must be negative and finite, got {w}"));
    }
    let shift = (d as u64 * (d as u64 - 2)) as f64;
    let mut acc = BigUint::zero();
    let mut ell = 0u64;
    // everything scaled by 4 so that the level values are exact integers
    while (4 * ell * (ell + d as u64 - 1)) as f64 + shift + 4.0 * w <= 0.0 {
        acc += multiplicity(d, ell)?;
        ell += 1;
    }
    Ok(acc)
}

/// Coupling (L+(d−2)/2)(L+d/2) that puts exactly the levels ℓ ≤ L at or below zero.
pub fn level_coupling(d: u32, big_l: u64) -> f64 {
    let l = big_l as f64;
    let df = d as f64;
    (l + 0.5 * (df - 2.0)) * (l + 0.5 * df)
}

/// Count for the level-L constant potential using only integer arithmetic.
pub fn count_at_level(d: u32, big_l: u64) -> Result<BigUint> {
    check_d3(d)?;
    let d64 = d as u64;
    let four_w = (2 * big_l + d64 - 2) * (2 * big_l + d64);
    let mut acc = BigUint::zero();
    let mut ell = 0u64;
    while 4 * ell * (ell + d64 - 1) + d64 * (d64 - 2) <= four_w {
        acc += multiplicity(d, ell)?;
        ell += 1;
    }
    Ok(acc)
}

/// |W|^{d/2}|𝕊^d|: the critical potential norm of the level-L constant potential.
pub fn level_integral(d: u32, big_l: u64) -> f64 {
    level_coupling(d, big_l).powf(0.5 * d as f64) * n_sphere_area(d)
}

fn ln_a(d: u32, big_l: u64) -> f64 {
    let l = big_l as f64;
    let df = d as f64;
    ln_gamma_unchecked(l + df) + (l + 0.5 * df).ln() - ln_gamma_unchecked(l + 1.0) - 0.5 * df * level_coupling(d, big_l).ln()
}

/// a_L = N_≤(L)/(L^cl_{0,d}·|W_L|^{d/2}|𝕊^d|) up to the factor 2/d!, i.e. the
/// ratio of the exact count to its semiclassical prediction.
pub fn a_value(d: u32, big_l: u64) -> Result<f64> {
    check_d3(d)?;
    Ok(ln_a(d, big_l).exp())
}

pub fn a_sequence(d: u32, l_max: u64) -> Result<Vec<f64>> {
    check_d3(d)?;
    Ok((0..=l_max).map(|l| ln_a(d, l).exp()).collect())
}

/// Location and value of sup_L a_L.
///
/// The scan stops once L > d, the sequence is decreasing and twice the
/// asymptotic size ln a_L ≈ d/(2L) already sits below the running maximum.
pub fn a_supremum(d: u32) -> Result<(u64, f64)> {
    check_d3(d)?;
    let df = d as f64;
    let mut best = (0u64, ln_a(d, 0));
    let mut prev = best.1;
    let mut l = 1u64;
    loop {
        let cur = ln_a(d, l);
        if cur > best.1 {
            best = (l, cur);
        }
        if l > d as u64 && cur < prev && df / (l as f64) < best.1 {
            break;
        }
        if l > 10_000_000 {
            return Err(crate::error::LtError::Solver(format!("supremum scan for d = {d} did not terminate")));
        }
        prev = cur;
        l += 1;
    }
    Ok((best.0, best.1.exp()))
}

/// L^cl_{0,d}·a₀: the one-particle critical constant carried by the Sobolev optimizer.
pub fn sobolev_one_particle(d: u32) -> Result<ConstantValue> {
    check_d3(d)?;
    ConstantValue::new(
        classical_l_value(0.0, d) * a_value(d, 0)?,
        ConstantKind::OneParticle,
        BoundDirection::Exact,
        "Sobolev optimizer (level L = 0 of the sphere construction)",
    )
}

/// Conjectured sharp critical constant L^cl_{0,d}·sup_L a_L.
pub fn ggm_conjectured_constant(d: u32) -> Result<ConstantValue> {
    let (arg, sup) = a_supremum(d)?;
    ConstantValue::new(
        classical_l_value(0.0, d) * sup,
        ConstantKind::Conjectured,
        BoundDirection::Exact,
        format!("sphere construction, supremum at L = {arg}"),
    )
}

/// The level-L constant potential carried to ℝ^d by stereographic projection:
/// V(x) = −(L+(d−2)/2)(L+d/2)(2/(1+|x|²))².
pub fn ggm_potential(d: u32, big_l: u64) -> Result<crate::spectral::PotentialSpec> {
    check_d3(d)?;
    crate::spectral::PotentialSpec::ggm(d, big_l)
}

fn ser_big<S: Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v.to_u64() {
        Some(x) => s.serialize_u64(x),
        None => s.serialize_str(&v.to_string()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SphereRow {
    pub d: u32,
    #[serde(rename = "L")]
    pub level: u64,
    #[serde(serialize_with = "ser_big")]
    pub nu: BigUint,
    #[serde(serialize_with = "ser_big")]
    pub n_leq: BigUint,
    pub a_l: f64,
    pub running_sup: f64,
}

/// Rows for L = 0..=l_max; counts cross-checked against the closed form.
pub fn sphere_table(d: u32, l_max: u64) -> Result<Vec<SphereRow>> {
    check_d3(d)?;
    let mut rows = Vec::with_capacity(l_max as usize + 1);
    let mut n = BigUint::zero();
    let mut sup = 0.0f64;
    for l in 0..=l_max {
        let nu = multiplicity(d, l)?;
        n += &nu;
        if n != cumulative_count_closed(d, l)? {
            return Err(crate::error::LtError::Solver(format!("count mismatch at d = {d}, L = {l}")));
        }
        let a = ln_a(d, l).exp();
        sup = sup.max(a);
        rows.push(SphereRow { d, level: l, nu, n_leq: n.clone(), a_l: a, running_sup: sup });
    }
    Ok(rows)
}

pub fn sphere_table_csv(rows: &[SphereRow]) -> String {
    let mut out = String::from("d,L,nu_L,N_leq,a_L,running_sup\n");
    for r in rows {
        out.push_str(&format!("{},{},{},{},{:.12e},{:.12e}\n", r.d, r.level, r.nu, r.n_leq, r.a_l, r.running_sup));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn big(x: u64) -> BigUint {
        BigUint::from(x)
    }

    #[test]
    fn small_multiplicities() {
        assert_eq!(multiplicity(2, 1).unwrap(), big(3));
        for l in 0..20 {
            assert_eq!(multiplicity(3, l).unwrap(), big((l + 1) * (l + 1)));
            assert_eq!(multiplicity(2, l).unwrap(), big(2 * l + 1));
        }
        assert_eq!(cumulative_count(3, 1).unwrap(), big(5));
        assert!(multiplicity(1, 0).is_err());
    }

    #[test]
    fn closed_form_matches_sum() {
        for d in 3..=10 {
            for l in 0..=50 {
                assert_eq!(cumulative_count(d, l).unwrap(), cumulative_count_closed(d, l).unwrap(), "d={d} L={l}");
            }
        }
    }

    #[test]
    fn big_counts_do_not_overflow() {
        let n = cumulative_count(40, 400).unwrap();
        assert!(n.to_u64().is_none());
        assert_eq!(n, cumulative_count_closed(40, 400).unwrap());
    }

    #[test]
    fn constant_potential_counts() {
        for d in 3..=8 {
            for l in 0..12 {
                let w = -level_coupling(d, l);
                assert_eq!(count_constant_potential(d, w).unwrap(), cumulative_count(d, l).unwrap());
                assert_eq!(count_at_level(d, l).unwrap(), cumulative_count(d, l).unwrap());
            }
        }
        assert_eq!(count_constant_potential(3, -0.75).unwrap(), big(1));
        assert_eq!(count_constant_potential(3, -0.76).unwrap(), big(1));
        assert_eq!(count_constant_potential(3, -0.5).unwrap(), big(0));
        assert_eq!(count_constant_potential(3, -1e-9).unwrap(), big(0));
        assert!(count_constant_potential(3, 0.0).is_err());
    }

    #[test]
    fn a_sequence_values() {
        assert_relative_eq!(a_value(3, 0).unwrap(), 8.0 / 3f64.sqrt(), max_relative = 1e-13);
        assert!(a_value(8, 0).unwrap() < 1.0);
        assert!(a_value(7, 1).unwrap() > a_value(7, 0).unwrap());
        let s = a_sequence(5, 10).unwrap();
        assert_eq!(s.len(), 11);
        assert!(s.iter().all(|a| *a > 0.0));
    }

    #[test]
    fn a_tends_to_one_like_half_d_over_l() {
        for d in [3u32, 5, 8] {
            let df = d as f64;
            let mut worst = 0.0f64;
            for l in (50..=200).step_by(10) {
                let a = a_value(d, l).unwrap();
                let lf = l as f64;
                worst = worst.max(((a - 1.0 - 0.5 * df / lf) * lf * lf).abs());
            }
            // second-order coefficient stays bounded over the fit window
            assert!(worst < 10.0 * df * df, "d={d} worst={worst}");
        }
    }

    #[test]
    fn sobolev_value_matches_area_form() {
        for d in 3..=9 {
            let dd: f64 = (1..=d).map(|k| k as f64).product();
            let lcl0 = 2.0 / (dd * n_sphere_area(d));
            assert_relative_eq!(classical_l_value(0.0, d), lcl0, max_relative = 1e-12);
        }
        let v = sobolev_one_particle(3).unwrap().value();
        assert_relative_eq!(v, classical_l_value(0.0, 3) * 8.0 / 3f64.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn supremum_location() {
        for d in 3..=6 {
            assert_eq!(a_supremum(d).unwrap().0, 0, "d={d}");
        }
        assert!(a_supremum(7).unwrap().0 >= 1);
        let (l20, s20) = a_supremum(20).unwrap();
        assert!(s20 > 1.0);
        let (l30, _) = a_supremum(30).unwrap();
        assert!(l30 >= l20 && l20 > 0);
        assert_eq!(ggm_conjectured_constant(3).unwrap().kind(), ConstantKind::Conjectured);
    }

    #[test]
    fn level_integral_scale() {
        assert_relative_eq!(level_integral(3, 0), 0.75f64.powf(1.5) * 2.0 * std::f64::consts::PI.powi(2), max_relative = 1e-13);
    }

    #[test]
    fn projected_potential() {
        use crate::spectral::{lowest_channel_eigenvalue, radial_channels, GridOptions};
        let v = ggm_potential(3, 0).unwrap();
        assert_relative_eq!(v.value(0.0), -3.0);
        assert_relative_eq!(v.negative_part_norm(1.5).unwrap(), level_integral(3, 0), max_relative = 1e-9);
        // the zero mode is a threshold resonance: no negative state, lowest level → 0
        let mut prev = f64::INFINITY;
        for r in [20.0, 40.0, 80.0] {
            let o = GridOptions::with(r, 0.01);
            assert_eq!(radial_channels(&v, 3, &o).unwrap().count_below(0.0), 0);
            let e = lowest_channel_eigenvalue(&v, 0, &o).unwrap();
            assert!(e.abs() < prev / 2.0);
            prev = e.abs();
        }
        assert!(prev < 1e-3);
        // level 1: genuine bound states never exceed the sphere count
        let v1 = ggm_potential(3, 1).unwrap();
        let s = radial_channels(&v1, 3, &GridOptions::with(40.0, 0.01)).unwrap();
        assert!(BigUint::from(s.count_below(0.0)) <= cumulative_count(3, 1).unwrap());
        assert!(ggm_potential(2, 0).is_err());
    }

    #[test]
    fn table_rows() {
        let rows = sphere_table(3, 4).unwrap();
        assert_eq!(rows[1].n_leq, big(5));
        assert!(rows.windows(2).all(|w| w[1].running_sup >= w[0].running_sup));
        let csv = sphere_table_csv(&rows);
        assert!(csv.starts_with("d,L,nu_L,N_leq,a_L,running_sup\n"));
        assert_eq!(csv.lines().count(), 6);
        let js = serde_json::to_string(&rows[0]).unwrap();
        assert!(js.contains("\"L\":0"));
    }
}
