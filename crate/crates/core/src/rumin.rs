//! The trial-function functional behind the improved kinetic-energy
//! constant, and the chain of factors it feeds into.
//!
//! For f, w ≥ 0 on (0, ∞) with ∫f² = 1, ∫w = 1 and g(t) = ∫w(s)f(st) ds,
//!
//! ```text
//! I_d(f, w) = (∫w²)^{d/2} ∫_0^∞ (1 − g(t))² t^{−1−d/2} dt.
//! ```

use crate::constants::{classical_k, classical_l_value, duality_k_from_l, sphere_area, BoundDirection, ConstantKind, ConstantValue};
use crate::error::{domain, LtError, Result};
use crate::exec::Execution;
use crate::quad::{integrate_points, integrate_to_infinity, integrate_to_infinity_with, QuadOptions};
use crate::simplex::nelder_mead;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// JSON form of one trial function: family name plus parameter array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeSpec {
    pub family: String,
    pub params: Vec<f64>,
}

/// JSON form of a trial pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSpec {
    pub f: ShapeSpec,
    pub w: ShapeSpec,
}

#[derive(Debug, Clone, PartialEq)]
enum Shape {
    /// (1 + s^a)^{−b}
    Power { a: f64, b: f64 },
    /// (1 − s^c)^e/(1 + s) on [0, 1]
    Cutoff { c: f64, e: f64 },
    /// piecewise linear through (x_i, y_i), zero outside
    Tabulated { x: Vec<f64>, y: Vec<f64> },
}

impl Shape {
    fn from_spec(spec: &ShapeSpec) -> Result<Shape> {
        let p = &spec.params;
        if p.iter().any(|v| !v.is_finite()) {
            return Err(LtError::Input(format!("non-finite parameter in {}", spec.family)));
        }
        match (spec.family.as_str(), p.len()) {
            ("power", 2) => {
                if !(p[0] > 0.0 && p[1] > 0.0) {
                    return domain(format!("power family needs positive exponents, got {p:?}"));
                }
                Ok(Shape::Power { a: p[0], b: p[1] })
            }
            ("cutoff", 2) => {
                if !(p[0] > 0.0 && p[1] > 0.0) {
                    return domain(format!("cutoff family needs positive exponents, got {p:?}"));
                }
                Ok(Shape::Cutoff { c: p[0], e: p[1] })
            }
            ("tabulated", n) if n >= 4 && n % 2 == 0 => {
                let x: Vec<f64> = p.iter().step_by(2).copied().collect();
                let y: Vec<f64> = p.iter().skip(1).step_by(2).copied().collect();
                if x[0] < 0.0 || x.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(LtError::Input("tabulated abscissae must be nonnegative and strictly increasing".into()));
                }
                if y.iter().any(|v| *v < 0.0) {
                    return domain("tabulated trial function must be nonnegative");
                }
                Ok(Shape::Tabulated { x, y })
            }
            (fam, n) => Err(LtError::Input(format!("unknown trial family '{fam}' with {n} parameters"))),
        }
    }

    fn to_spec(&self) -> ShapeSpec {
        match self {
            Shape::Power { a, b } => ShapeSpec { family: "power".into(), params: vec![*a, *b] },
            Shape::Cutoff { c, e } => ShapeSpec { family: "cutoff".into(), params: vec![*c, *e] },
            Shape::Tabulated { x, y } => ShapeSpec {
                family: "tabulated".into(),
                params: x.iter().zip(y).flat_map(|(a, b)| [*a, *b]).collect(),
            },
        }
    }

    fn params(&self) -> Option<[f64; 2]> {
        match self {
            Shape::Power { a, b } => Some([*a, *b]),
            Shape::Cutoff { c, e } => Some([*c, *e]),
            Shape::Tabulated { .. } => None,
        }
    }

    fn eval(&self, s: f64) -> f64 {
        match self {
            Shape::Power { a, b } => (-b * s.powf(*a).ln_1p()).exp(),
            Shape::Cutoff { c, e } => {
                if (0.0..1.0).contains(&s) {
                    (-s.powf(*c)).ln_1p().mul_add(*e, 0.0).exp() / (1.0 + s)
                } else {
                    0.0
                }
            }
            Shape::Tabulated { x, y } => {
                if s < x[0] || s > x[x.len() - 1] {
                    return 0.0;
                }
                let i = x.partition_point(|&v| v <= s).clamp(1, x.len() - 1);
                let t = (s - x[i - 1]) / (x[i] - x[i - 1]);
                y[i - 1] + t * (y[i] - y[i - 1])
            }
        }
    }

    /// 1 − value, without cancellation for the power family.
    fn one_minus(&self, s: f64) -> f64 {
        match self {
            Shape::Power { a, b } => -(-b * s.powf(*a).ln_1p()).exp_m1(),
            _ => 1.0 - self.eval(s),
        }
    }

    /// Break points of the support (last may be +∞).
    fn breaks(&self) -> Vec<f64> {
        match self {
            Shape::Power { .. } => vec![0.0, f64::INFINITY],
            Shape::Cutoff { .. } => vec![0.0, 1.0],
            Shape::Tabulated { x, .. } => x.clone(),
        }
    }
}

fn inner_opts() -> QuadOptions {
    QuadOptions { abs_tol: 1e-15, rel_tol: 1e-11, max_intervals: 4000 }
}

fn integrate_shape<F: Fn(f64) -> f64>(breaks: &[f64], f: F) -> Result<f64> {
    let last = *breaks.last().expect("nonempty");
    if last.is_infinite() {
        let finite = &breaks[..breaks.len() - 1];
        let head = if finite.len() >= 2 { integrate_points(&f, finite, &inner_opts())?.value } else { 0.0 };
        Ok(head + integrate_to_infinity(&f, finite[finite.len() - 1], &inner_opts())?.value)
    } else {
        Ok(integrate_points(&f, breaks, &inner_opts())?.value)
    }
}

/// A normalized pair (f, w): f(s) = F(λ_f s) with λ_f fixed by ∫f² = 1,
/// w(s) = c·W(λ_w s) with c fixed by ∫w = 1 and λ_w free.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialPair {
    f: Shape,
    w: Shape,
    f_dilation: f64,
    w_dilation: f64,
    w_scale: f64,
    pub f_norm: f64,
    pub w_l1: f64,
    pub w_l2sq: f64,
}

impl TrialPair {
    pub fn from_spec(spec: &TrialSpec) -> Result<TrialPair> {
        Self::build(Shape::from_spec(&spec.f)?, Shape::from_spec(&spec.w)?, 1.0)
    }

    fn build(f: Shape, w: Shape, w_dilation: f64) -> Result<TrialPair> {
        if let Shape::Power { a, b } = f {
            if 2.0 * a * b <= 1.0 {
                return domain(format!("(1+s^{a})^(-{b}) is not square integrable"));
            }
        }
        if !(w_dilation > 0.0 && w_dilation.is_finite()) {
            return domain(format!("dilation must be positive, got {w_dilation}"));
        }
        // ∫F(λs)² ds = (∫F²)/λ, so the dilation equals the raw L² norm squared.
        let f_sq = integrate_shape(&f.breaks(), |s| f.eval(s).powi(2))?;
        let w_raw = integrate_shape(&w.breaks(), |s| w.eval(s))? / w_dilation;
        if !(f_sq > 0.0 && f_sq.is_finite() && w_raw > 0.0 && w_raw.is_finite()) {
            return domain("trial functions must have positive finite norms");
        }
        let w_scale = 1.0 / w_raw;
        let w_sq_raw = integrate_shape(&w.breaks(), |s| w.eval(s).powi(2))? / w_dilation;
        let mut tp = TrialPair {
            f,
            w,
            f_dilation: f_sq,
            w_dilation,
            w_scale,
            f_norm: 0.0,
            w_l1: 0.0,
            w_l2sq: w_scale * w_scale * w_sq_raw,
        };
        let fb: Vec<f64> = tp.f.breaks().iter().map(|b| b / tp.f_dilation).collect();
        tp.f_norm = integrate_shape(&fb, |s| tp.f_at(s).powi(2))?;
        tp.w_l1 = integrate_shape(&tp.w_breaks(), |s| tp.w_at(s))?;
        Ok(tp)
    }

    /// The pair from the literature: f = (1+μ s^{4.5})^{−1/4}, w ∝ (1−s^{0.36})^{2.1}/(1+s) on [0, 1].
    pub fn reference() -> TrialPair {
        Self::parametric([4.5, 0.25, 0.36, 2.1]).expect("reference pair is admissible")
    }

    /// Power/cutoff pair from the four exponents (a, b, c, e).
    pub fn parametric(p: [f64; 4]) -> Result<TrialPair> {
        Self::build(Shape::from_spec(&ShapeSpec { family: "power".into(), params: vec![p[0], p[1]] })?, Shape::from_spec(&ShapeSpec { family: "cutoff".into(), params: vec![p[2], p[3]] })?, 1.0)
    }

    /// Replace w by a tabulated function (x_i, y_i).
    pub fn with_tabulated_w(&self, x: Vec<f64>, y: Vec<f64>) -> Result<TrialPair> {
        let params = x.iter().zip(&y).flat_map(|(a, b)| [*a, *b]).collect();
        let w = Shape::from_spec(&ShapeSpec { family: "tabulated".into(), params })?;
        Self::build(self.f.clone(), w, 1.0)
    }

    /// Same pair with w dilated, w(s) ↦ λ w(λ s).
    pub fn with_w_dilation(&self, lambda: f64) -> Result<TrialPair> {
        Self::build(self.f.clone(), self.w.clone(), self.w_dilation * lambda)
    }

    pub fn to_spec(&self) -> TrialSpec {
        TrialSpec { f: self.f.to_spec(), w: self.w.to_spec() }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_spec()).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<TrialPair> {
        let spec: TrialSpec = serde_json::from_str(text).map_err(|e| LtError::Input(format!("trial pair JSON: {e}")))?;
        Self::from_spec(&spec)
    }

    /// μ in f(s) = (1 + μ s^a)^{−b}, when f is of power type.
    pub fn f_mu(&self) -> Option<f64> {
        match self.f {
            Shape::Power { a, .. } => Some(self.f_dilation.powf(a)),
            _ => None,
        }
    }

    /// c in w = c·W, the normalization of w.
    pub fn w_scale(&self) -> f64 {
        self.w_scale
    }

    pub fn f_at(&self, s: f64) -> f64 {
        self.f.eval(self.f_dilation * s)
    }

    pub fn w_at(&self, s: f64) -> f64 {
        self.w_scale * self.w.eval(self.w_dilation * s)
    }

    fn w_breaks(&self) -> Vec<f64> {
        self.w.breaks().iter().map(|b| b / self.w_dilation).collect()
    }

    fn inner(&self, h: impl Fn(f64) -> f64) -> Result<f64> {
        let b = self.w_breaks();
        integrate_shape(&b, |s| {
            let w = self.w_at(s);
            if w == 0.0 {
                0.0
            } else {
                w * h(s)
            }
        })
    }

    /// g(t) = ∫ w(s) f(st) ds.
    pub fn g(&self, t: f64) -> Result<f64> {
        self.inner(|s| self.f_at(s * t))
    }

    /// 1 − g(t) = ∫ w(s)(1 − f(st)) ds, accurate also when g(t) ≈ 1.
    pub fn one_minus_g(&self, t: f64) -> Result<f64> {
        self.inner(|s| self.f.one_minus(self.f_dilation * s * t))
    }

    fn exponents(&self) -> Option<[f64; 4]> {
        let f = self.f.params()?;
        let w = self.w.params()?;
        Some([f[0], f[1], w[0], w[1]])
    }
}

/// Convolution g(t) = ∫_0^∞ w(s) f(st) ds.
pub fn convolve_g(tp: &TrialPair, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return domain(format!("t must be nonnegative, got {t}"));
    }
    tp.g(t)
}

#[derive(Debug, Clone, Copy)]
pub struct RuminOptions {
    pub rel_tol: f64,
    pub exec: Execution,
}

impl Default for RuminOptions {
    fn default() -> Self {
        RuminOptions { rel_tol: 1e-10, exec: Execution::Parallel }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct RuminValue {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
}

/// I_d(f, w) with default tolerances.
pub fn rumin_functional(tp: &TrialPair, d: u32) -> Result<f64> {
    Ok(rumin_functional_with(tp, d, &RuminOptions::default())?.value)
}

/// I_d(f, w), split at t = 1. Below, t = e^{−u}; above, t = e^{u} and the
/// constant part of (1 − g)² = 1 − 2g + g² is integrated exactly.
pub fn rumin_functional_with(tp: &TrialPair, d: u32, opts: &RuminOptions) -> Result<RuminValue> {
    if d == 0 {
        return domain("dimension must be at least 1");
    }
    let half = 0.5 * d as f64;
    let q = |t: f64| -> Result<f64> { Ok(tp.one_minus_g(t)?.powi(2) * t.powf(-half)) };
    let (q_tiny, q_small) = (q(1e-10)?, q(1e-5)?);
    if tp.one_minus_g(1e-10)?.abs() > 1e-4 || (q_tiny > 1e-12 && q_tiny >= q_small) {
        return domain(format!(
            "(1-g(t))^2/t^(1+d/2) is not integrable at t = 0: 1-g(1e-10) = {:.3e}",
            tp.one_minus_g(1e-10)?
        ));
    }
    let outer = QuadOptions { abs_tol: 1e-14, rel_tol: opts.rel_tol, max_intervals: 2000 };
    let fail = std::sync::Mutex::new(None::<LtError>);
    let record = |e: LtError| {
        fail.lock().expect("unpoisoned").get_or_insert(e);
        0.0
    };
    let small = integrate_to_infinity_with(
        |u| match tp.one_minus_g((-u).exp()) {
            Ok(v) if v > 0.0 => (2.0 * v.ln() + half * u).exp(),
            Ok(_) => 0.0,
            Err(e) => record(e),
        },
        0.0,
        &outer,
        opts.exec,
    )?;
    let large = integrate_to_infinity_with(
        |u| {
            let t = u.exp();
            if t.is_infinite() {
                return 0.0;
            }
            match tp.g(t) {
                Ok(g) => (g * g - 2.0 * g) * (-half * u).exp(),
                Err(e) => record(e),
            }
        },
        0.0,
        &outer,
        opts.exec,
    )?;
    if let Some(e) = fail.into_inner().expect("unpoisoned") {
        return Err(e);
    }
    let scale = tp.w_l2sq.powf(half);
    let integral = small.value + 1.0 / half + large.value;
    let value = scale * integral;
    let abs_error = scale * (small.abs_error + large.abs_error) + value * 2e-11;
    if d == 1 && value < 2.0 / 3.0 - 1e-9 {
        return Err(LtError::Accuracy {
            what: "one-dimensional functional fell below its proven lower bound 2/3".into(),
            achieved: value,
            required: 2.0 / 3.0,
        });
    }
    Ok(RuminValue { value, abs_error, evaluations: small.evaluations + large.evaluations })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct RuminResult {
    pub dim: u32,
    pub i_value: f64,
    pub k_tilde: f64,
    /// K̃_d / K^cl_d
    pub excess_k: f64,
    /// L-side factor (K̃_d/K^cl_d)^{−d/2}
    pub excess_l_dual: f64,
    /// Relative gap between the two written forms of K̃_d.
    pub form_gap: f64,
}

/// K̃_d from a value of I_d, in both written forms.
pub fn k_tilde(d: u32, i_d: f64) -> Result<RuminResult> {
    if !(i_d > 0.0 && i_d.is_finite()) {
        return domain(format!("functional value must be positive, got {i_d}"));
    }
    let kcl = classical_k(d)?.value();
    let df = d as f64;
    let ipow = i_d.powf(-2.0 / df);
    let excess_k = 2f64.powf(6.0 / df) * df.powf(1.0 - 2.0 / df) / (df + 2.0).powf(1.0 + 4.0 / df) * ipow;
    let k_tilde = excess_k * kcl;
    let explicit = 2f64.powf(6.0 / df) * df * df * (2.0 * PI).powi(2) / ((df + 2.0).powf(2.0 + 4.0 / df) * sphere_area(d)?.powf(2.0 / df)) * ipow;
    Ok(RuminResult {
        dim: d,
        i_value: i_d,
        k_tilde,
        excess_k,
        excess_l_dual: excess_k.powf(-0.5 * df),
        form_gap: ((explicit - k_tilde) / k_tilde).abs(),
    })
}

/// Relative gap in L^cl_{1,1}·L^cl_{3/2,d−1} = L^cl_{1,d}.
pub fn lifting_identity_gap(d: u32) -> Result<f64> {
    if d < 2 {
        return domain("the lifting identity needs d >= 2");
    }
    let lhs = classical_l_value(1.0, 1) * classical_l_value(1.5, d - 1);
    let rhs = classical_l_value(1.0, d);
    Ok(((lhs - rhs) / rhs).abs())
}

/// Upper bound L_{1,d} ≤ (K^cl_1/K̃_1)^{1/2} L^cl_{1,d} obtained by lifting
/// the one-dimensional operator-valued bound in dimension.
pub fn lifting_chain(d: u32, i_1: f64) -> Result<ConstantValue> {
    if d >= 2 {
        let gap = lifting_identity_gap(d)?;
        if gap > 1e-12 {
            return Err(LtError::Solver(format!("lifting identity off by {gap:.3e} at d = {d}")));
        }
    }
    let r = k_tilde(1, i_1)?;
    ConstantValue::new(
        r.excess_l_dual * classical_l_value(1.0, d),
        ConstantKind::ImprovedBound,
        BoundDirection::UpperBound,
        format!("operator-valued 1D bound lifted to d = {d}, I_1 = {i_1}"),
    )
}

/// Kinetic constant implied by [`lifting_chain`], as a fraction of K^cl_d.
pub fn lifted_k_fraction(d: u32, i_1: f64) -> Result<f64> {
    let l = lifting_chain(d, i_1)?.value();
    Ok(duality_k_from_l(l, d)? / classical_k(d)?.value())
}

/// Local simplex search over the four exponents of a power/cutoff pair.
/// Returns the best pair found and its value; never worse than the seed.
pub fn optimize_trial(seed: &TrialPair, d: u32, budget: usize) -> Result<(TrialPair, RuminValue)> {
    let x0 = seed
        .exponents()
        .ok_or_else(|| LtError::Input("only power/cutoff pairs can be optimized".into()))?;
    let opts = RuminOptions { rel_tol: 1e-9, exec: Execution::Parallel };
    let start = rumin_functional_with(seed, d, &opts)?;
    let objective = |x: &[f64]| -> f64 {
        TrialPair::parametric([x[0], x[1], x[2], x[3]])
            .and_then(|tp| rumin_functional_with(&tp, d, &opts))
            .map(|r| r.value)
            .unwrap_or(f64::INFINITY)
    };
    let m = nelder_mead(objective, &x0, 0.05, budget, 1e-10);
    if m.value < start.value {
        let tp = TrialPair::parametric([m.x[0], m.x[1], m.x[2], m.x[3]])?;
        let v = rumin_functional_with(&tp, d, &opts)?;
        Ok((tp, v))
    } else {
        Ok((seed.clone(), start))
    }
}

/// Upper bound on K_d from a radial trapezoidal cutoff χ (1 on |y| ≤ 1−ramp,
/// linear down to 0 at |y| = 1) in the semiclassical trial-state argument.
pub fn semiclassical_trial_bound(chi_ramp: f64, mu_l2: f64, d: u32) -> Result<f64> {
    if !(chi_ramp > 0.0 && chi_ramp < 1.0) {
        return domain(format!("ramp must lie in (0, 1), got {chi_ramp}"));
    }
    if !(mu_l2 > 0.0 && mu_l2.is_finite()) {
        return domain(format!("muL2 must be positive, got {mu_l2}"));
    }
    let df = d as f64;
    let area = sphere_area(d)?;
    let inner = 1.0 - chi_ramp;
    let radial = |pow: f64| -> Result<f64> {
        let ramp = integrate_points(
            |r| ((1.0 - r) / chi_ramp).powf(pow) * r.powi(d as i32 - 1),
            &[inner, 1.0],
            &QuadOptions::tol(1e-16, 1e-12),
        )?
        .value;
        Ok(area * (inner.powi(d as i32) / df + ramp))
    };
    let chi2 = radial(2.0)?;
    let chi_top = radial(2.0 + 4.0 / df)?;
    let grad2 = area * (1.0 - inner.powi(d as i32)) / df / (chi_ramp * chi_ramp);
    let omega = area / df;
    let denom = (omega / (2.0 * PI).powf(df)).powf(2.0 / df) * chi_top;
    Ok((df / (df + 2.0) * chi2 + grad2 / mu_l2) / denom)
}
