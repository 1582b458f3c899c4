//! Closed-form constants of Lieb–Thirring type and the algebra connecting them.
//!
//! Conventions: `L` constants bound Riesz means of negative eigenvalues,
//! `Σ|E_n|^γ ≤ L_{γ,d} ∫V₋^{γ+d/2}`; `K` constants are kinetic-energy
//! (Sobolev-type) constants. The two families are dual to each other.

use crate::error::{domain, Result};
use crate::special::{beta_fn, gamma_ratio, gamma_unchecked};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// A validated (γ, d) pair inside the range where a Lieb–Thirring bound holds:
/// γ ≥ 1/2 in d = 1, γ > 0 in d = 2, γ ≥ 0 in d ≥ 3.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaDim {
    gamma: f64,
    dim: u32,
}

impl GammaDim {
    pub fn new(gamma: f64, dim: u32) -> Result<Self> {
        if !gamma.is_finite() {
            return domain(format!("gamma must be finite, got {gamma}"));
        }
        let ok = match dim {
            0 => false,
            1 => gamma >= 0.5,
            2 => gamma > 0.0,
            _ => gamma >= 0.0,
        };
        if !ok {
            return domain(format!("(gamma={gamma}, d={dim}) is outside the admissible region"));
        }
        Ok(GammaDim { gamma, dim })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    /// Exponent γ + d/2 of the potential norm.
    pub fn potential_exponent(&self) -> f64 {
        self.gamma + 0.5 * self.dim as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstantKind {
    Classical,
    OneParticle,
    ImprovedBound,
    Conjectured,
    Literature,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundDirection {
    Exact,
    UpperBound,
    LowerBound,
}

/// A positive constant tagged with what it is and which way it bounds.
///
/// Kind and direction are fixed at construction; there are no setters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantValue {
    value: f64,
    kind: ConstantKind,
    direction: BoundDirection,
    provenance: String,
}

impl ConstantValue {
    pub fn new(value: f64, kind: ConstantKind, direction: BoundDirection, provenance: impl Into<String>) -> Result<Self> {
        if !(value.is_finite() && value > 0.0) {
            return domain(format!("constant must be finite and positive, got {value}"));
        }
        Ok(ConstantValue {
            value,
            kind,
            direction,
            provenance: provenance.into(),
        })
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn kind(&self) -> ConstantKind {
        self.kind
    }

    pub fn direction(&self) -> BoundDirection {
        self.direction
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    /// Coarse origin tag used in reports.
    pub fn tag(&self) -> &'static str {
        match self.kind {
            ConstantKind::Classical | ConstantKind::OneParticle => "derived",
            ConstantKind::ImprovedBound => "derived-bound",
            ConstantKind::Literature => "literature",
            ConstantKind::Conjectured => "conjectured",
        }
    }

    /// Multiply by a positive factor keeping the tags.
    pub fn scaled(&self, factor: f64, provenance: impl Into<String>) -> Result<Self> {
        ConstantValue::new(self.value * factor, self.kind, self.direction, provenance)
    }
}

fn check_dim(d: u32) -> Result<f64> {
    if d < 1 {
        return domain("dimension must be at least 1");
    }
    Ok(d as f64)
}

/// ω_d = π^{d/2}/Γ(d/2+1), volume of the unit ball in ℝ^d.
pub fn unit_ball_volume(d: u32) -> Result<f64> {
    let df = check_dim(d)?;
    Ok(ball_volume(df))
}

fn ball_volume(df: f64) -> f64 {
    if df < 200.0 {
        PI.powf(0.5 * df) / gamma_unchecked(0.5 * df + 1.0)
    } else {
        (0.5 * df * PI.ln() - crate::special::ln_gamma_unchecked(0.5 * df + 1.0)).exp()
    }
}

/// |𝕊^{d−1}| = d·ω_d, the surface area of the unit sphere in ℝ^d.
pub fn sphere_area(d: u32) -> Result<f64> {
    let df = check_dim(d)?;
    Ok(df * ball_volume(df))
}

/// |𝕊^n| for the n-dimensional sphere sitting in ℝ^{n+1}.
pub fn n_sphere_area(n: u32) -> f64 {
    let m = n as f64 + 1.0;
    m * ball_volume(m)
}

/// Raw value of (4π)^{−d/2} Γ(γ+1)/Γ(γ+1+d/2), for any γ ≥ 0 and d ≥ 1.
pub fn classical_l_value(gamma: f64, d: u32) -> f64 {
    let df = d as f64;
    (4.0 * PI).powf(-0.5 * df) * gamma_ratio(gamma + 1.0, gamma + 1.0 + 0.5 * df)
}

/// Semiclassical constant L^cl_{γ,d}.
pub fn classical_l(gd: GammaDim) -> ConstantValue {
    ConstantValue::new(
        classical_l_value(gd.gamma, gd.dim),
        ConstantKind::Classical,
        BoundDirection::Exact,
        "phase-space integral, Weyl asymptotics",
    )
    .expect("classical constant is positive")
}

/// Semiclassical kinetic constant K^cl_d = (d/(d+2))·(2π)²/ω_d^{2/d}.
pub fn classical_k(d: u32) -> Result<ConstantValue> {
    let df = check_dim(d)?;
    let v = df / (df + 2.0) * (2.0 * PI).powi(2) / ball_volume(df).powf(2.0 / df);
    ConstantValue::new(v, ConstantKind::Classical, BoundDirection::Exact, "plane-wave trial states")
}

fn check_positive(x: f64, what: &str) -> Result<()> {
    if !(x > 0.0 && x.is_finite()) {
        return domain(format!("{what} must be positive and finite, got {x}"));
    }
    Ok(())
}

/// K solving ((1+d/2)L)^{1+2/d}·((1+2/d)K)^{1+d/2} = 1.
pub fn duality_k_from_l(l: f64, d: u32) -> Result<f64> {
    let df = check_dim(d)?;
    check_positive(l, "L")?;
    Ok(((1.0 + 0.5 * df) * l).powf(-2.0 / df) / (1.0 + 2.0 / df))
}

/// Inverse of [`duality_k_from_l`].
pub fn duality_l_from_k(k: f64, d: u32) -> Result<f64> {
    let df = check_dim(d)?;
    check_positive(k, "K")?;
    Ok(((1.0 + 2.0 / df) * k).powf(-0.5 * df) / (1.0 + 0.5 * df))
}

/// Largest admissible Sobolev exponent p (the `2p` of the interpolation
/// inequality may reach 2d/(d−2) for d ≥ 3; unbounded for d ≤ 2).
pub fn max_sobolev_p(d: u32) -> f64 {
    if d <= 2 {
        f64::INFINITY
    } else {
        d as f64 / (d as f64 - 2.0)
    }
}

fn keller_rhs(p: f64, d: u32) -> Result<(f64, f64)> {
    let df = check_dim(d)?;
    let pmax = max_sobolev_p(d);
    if !(p > 1.0 && p <= pmax) {
        return domain(format!("p = {p} outside (1, {pmax}] for d = {d}"));
    }
    let pc = p / (p - 1.0);
    let rhs = (df / (2.0 * pc)).powf(0.5 * df) * ((2.0 * pc - df) / (2.0 * pc)).powf(0.5 * (2.0 * pc - df));
    Ok((pc, rhs))
}

/// One-particle L^(1)_{p'−d/2,d} from the interpolation constant K^(1)_{p,d}.
pub fn keller_duality(p: f64, d: u32, k1: f64) -> Result<f64> {
    check_positive(k1, "K1")?;
    let (_, rhs) = keller_rhs(p, d)?;
    Ok(rhs / k1.powf(0.5 * d as f64))
}

/// Inverse of [`keller_duality`]: K^(1)_{p,d} from L^(1)_{p'−d/2,d}.
pub fn keller_duality_inverse(p: f64, d: u32, l1: f64) -> Result<f64> {
    check_positive(l1, "L1")?;
    let (_, rhs) = keller_rhs(p, d)?;
    Ok((rhs / l1).powf(2.0 / d as f64))
}

/// Riesz exponent γ = p' − d/2 dual to the Sobolev exponent p.
pub fn gamma_from_p(p: f64, d: u32) -> f64 {
    p / (p - 1.0) - 0.5 * d as f64
}

/// Sobolev exponent p dual to γ (p' = γ + d/2); infinite when γ + d/2 = 1.
pub fn p_from_gamma(gamma: f64, d: u32) -> f64 {
    let pc = gamma + 0.5 * d as f64;
    if pc <= 1.0 {
        f64::INFINITY
    } else {
        pc / (pc - 1.0)
    }
}

/// Closed-form one-particle constant in one dimension (0⁰ read as 1 at γ = 1/2).
pub fn one_particle_l_1d(gamma: f64) -> Result<ConstantValue> {
    if !(gamma >= 0.5) || !gamma.is_finite() {
        return domain(format!("one-dimensional one-particle constant needs gamma >= 1/2, got {gamma}"));
    }
    let lo = gamma - 0.5;
    let lo_pow = if lo == 0.0 { 1.0 } else { lo.powf(lo) };
    let hi = gamma + 0.5;
    let v = PI.sqrt().recip() * gamma_ratio(gamma + 1.0, gamma + 0.5) * lo_pow / hi.powf(hi);
    ConstantValue::new(v, ConstantKind::OneParticle, BoundDirection::Exact, "Nagy optimizer, Keller duality")
}

/// C_{γ,σ} = 1/B(σ−γ, γ+1), so that E₋^σ = C ∫_0^∞ (E+τ)₋^γ τ^{σ−γ−1} dτ.
pub fn aizenman_lieb_constant(gamma: f64, sigma: f64) -> Result<f64> {
    if !(gamma >= 0.0) {
        return domain(format!("gamma must be nonnegative, got {gamma}"));
    }
    if !(sigma > gamma) {
        return domain(format!("sigma = {sigma} must exceed gamma = {gamma}"));
    }
    Ok(1.0 / beta_fn(sigma - gamma, gamma + 1.0)?)
}

/// Literature bounds on the sharp constant L_{γ,d}, as data.
pub fn best_known_bounds(gd: GammaDim) -> Vec<ConstantValue> {
    let g = gd.gamma;
    let d = gd.dim;
    let cl = classical_l(gd);
    let upper = |factor: f64, why: &str| {
        ConstantValue::new(cl.value * factor, ConstantKind::Literature, BoundDirection::UpperBound, why)
            .expect("positive")
    };
    let mut out = Vec::new();
    if g >= 1.5 {
        out.push(
            ConstantValue::new(
                cl.value,
                ConstantKind::Literature,
                BoundDirection::Exact,
                "sharp for gamma >= 3/2 (Lieb-Thirring, Aizenman-Lieb, Laptev-Weidl)",
            )
            .expect("positive"),
        );
    } else if g >= 1.0 {
        out.push(upper(1.456, "1.456 L^cl for 1 <= gamma < 3/2 (operator-valued one-dimensional bound lifted in dimension)"));
    } else if g >= 0.5 {
        if d == 1 {
            out.push(upper(2.0, "2 L^cl for 1/2 <= gamma < 1 in d = 1 (Hundertmark-Lieb-Thomas)"));
        } else {
            out.push(upper(2.912, "2.912 L^cl for 1/2 <= gamma < 1 in d >= 2 (lifting, Hundertmark-Laptev-Weidl)"));
        }
    } else if d == 3 {
        out.push(upper(6.86924, "6.86924 L^cl in d = 3 (Lieb), carried to gamma < 1/2 by Aizenman-Lieb"));
    }
    if d == 1 && g == 0.5 {
        out.push(
            ConstantValue::new(0.5, ConstantKind::Literature, BoundDirection::Exact, "L_{1/2,1} = L^(1)_{1/2,1} = 1/2 (Hundertmark-Lieb-Thomas)")
                .expect("positive"),
        );
    }
    if d == 3 && g == 0.0 {
        out.push(
            ConstantValue::new(
                cl.value * 8.0 / 3f64.sqrt(),
                ConstantKind::Literature,
                BoundDirection::LowerBound,
                "(8/sqrt 3) L^cl from the Sobolev optimizer",
            )
            .expect("positive"),
        );
    }
    out
}

/// Smallest listed upper (or exact) bound, if the table has one.
pub fn best_upper_bound(gd: GammaDim) -> Option<ConstantValue> {
    best_known_bounds(gd)
        .into_iter()
        .filter(|c| c.direction() != BoundDirection::LowerBound)
        .min_by(|a, b| a.value().total_cmp(&b.value()))
}
