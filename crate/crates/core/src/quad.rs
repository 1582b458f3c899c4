//! Adaptive Gauss–Kronrod (10/21) quadrature with global subdivision,
//! plus maps for half-line and whole-line integrals.

use crate::error::{LtError, Result};
use crate::exec::Execution;

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            abs_tol: 1e-13,
            rel_tol: 1e-11,
            max_intervals: 4000,
        }
    }
}

impl QuadOptions {
    pub fn tol(abs_tol: f64, rel_tol: f64) -> Self {
        QuadOptions {
            abs_tol,
            rel_tol,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

/// The 21 abscissae of the Kronrod rule mapped to [a, b].
fn nodes(a: f64, b: f64) -> [f64; 21] {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut xs = [c; 21];
    for j in 0..10 {
        xs[2 * j] = c - h * XGK[j];
        xs[2 * j + 1] = c + h * XGK[j];
    }
    xs
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut e = err.abs();
    if res_asc != 0.0 && e != 0.0 {
        e = res_asc * (200.0 * e / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        e = e.max(50.0 * f64::EPSILON * res_abs);
    }
    e
}

fn apply_rule(a: f64, b: f64, fx: &[f64; 21]) -> Segment {
    let h = 0.5 * (b - a);
    let fc = fx[20];
    let mut kron = WGK[10] * fc;
    let mut gauss = 0.0;
    let mut res_abs = WGK[10] * fc.abs();
    for j in 0..10 {
        let (f1, f2) = (fx[2 * j], fx[2 * j + 1]);
        kron += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kron;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fx[2 * j] - mean).abs() + (fx[2 * j + 1] - mean).abs());
    }
    let err = rescale_error((kron - gauss) * h, res_abs * h.abs(), res_asc * h.abs());
    Segment {
        a,
        b,
        value: kron * h,
        error: err,
    }
}

fn adaptive<E>(mut eval: E, breakpoints: &[f64], opts: &QuadOptions) -> Result<QuadResult>
where
    E: FnMut(&[f64]) -> Vec<f64>,
{
    let mut segs: Vec<Segment> = Vec::new();
    let mut evaluations = 0;
    let mut run = |a: f64, b: f64, evaluations: &mut usize| -> Result<Segment> {
        let xs = nodes(a, b);
        let fx = eval(&xs);
        *evaluations += 21;
        let arr: [f64; 21] = fx.try_into().expect("21 values");
        if arr.iter().any(|v| !v.is_finite()) {
            return Err(LtError::Accuracy {
                what: format!("non-finite integrand on [{a}, {b}]"),
                achieved: f64::INFINITY,
                required: opts.abs_tol,
            });
        }
        Ok(apply_rule(a, b, &arr))
    };
    for w in breakpoints.windows(2) {
        if w[1] > w[0] {
            segs.push(run(w[0], w[1], &mut evaluations)?);
        }
    }
    loop {
        let total: f64 = segs.iter().map(|s| s.value).sum();
        let err: f64 = segs.iter().map(|s| s.error).sum();
        let target = opts.abs_tol.max(opts.rel_tol * total.abs());
        if err <= target {
            return Ok(QuadResult {
                value: total,
                abs_error: err,
                evaluations,
            });
        }
        if segs.len() >= opts.max_intervals {
            return Err(LtError::Accuracy {
                what: "adaptive quadrature exhausted its interval budget".into(),
                achieved: err,
                required: target,
            });
        }
        let (idx, worst) = segs
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, s)| (i, *s))
            .expect("nonempty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            return Err(LtError::Accuracy {
                what: "quadrature interval collapsed to machine precision".into(),
                achieved: err,
                required: target,
            });
        }
        let left = run(worst.a, mid, &mut evaluations)?;
        let right = run(mid, worst.b, &mut evaluations)?;
        segs[idx] = left;
        segs.push(right);
    }
}

/// ∫_a^b f.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: &QuadOptions) -> Result<QuadResult> {
    integrate_points(f, &[a, b], opts)
}

/// ∫ f over [p_0, p_last] with forced breaks at every listed point.
pub fn integrate_points<F: Fn(f64) -> f64>(f: F, points: &[f64], opts: &QuadOptions) -> Result<QuadResult> {
    adaptive(|xs| xs.iter().map(|&x| f(x)).collect(), points, opts)
}

/// Same as [`integrate_points`] but evaluates the 21 nodes of each rule
/// through `exec`; worthwhile when a single evaluation is itself expensive.
pub fn integrate_points_with<F>(f: F, points: &[f64], opts: &QuadOptions, exec: Execution) -> Result<QuadResult>
where
    F: Fn(f64) -> f64 + Sync + Send,
{
    adaptive(|xs| exec.map(xs, |&x| f(x)), points, opts)
}

/// ∫_a^∞ f via x = a + (1−t)/t.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, opts: &QuadOptions) -> Result<QuadResult> {
    integrate_points(|t| mapped(&f, a, t), &[0.0, 1.0], opts)
}

/// [`integrate_to_infinity`] with node evaluation through `exec`.
pub fn integrate_to_infinity_with<F>(f: F, a: f64, opts: &QuadOptions, exec: Execution) -> Result<QuadResult>
where
    F: Fn(f64) -> f64 + Sync + Send,
{
    integrate_points_with(|t| mapped(&f, a, t), &[0.0, 1.0], opts, exec)
}

fn mapped<F: Fn(f64) -> f64>(f: &F, a: f64, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let x = a + (1.0 - t) / t;
    let v = f(x) / (t * t);
    if v.is_finite() {
        v
    } else {
        0.0
    }
}

/// ∫_{−∞}^{∞} f, split at `center`.
pub fn integrate_real_line<F: Fn(f64) -> f64>(f: F, center: f64, opts: &QuadOptions) -> Result<QuadResult> {
    let right = integrate_to_infinity(&f, center, opts)?;
    let left = integrate_to_infinity(|x| f(2.0 * center - x), center, opts)?;
    Ok(QuadResult {
        value: left.value + right.value,
        abs_error: left.abs_error + right.abs_error,
        evaluations: left.evaluations + right.evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_exact() {
        let r = integrate(|x| x.powi(5) - 3.0 * x * x + 1.0, -1.0, 2.0, &QuadOptions::default()).unwrap();
        assert_relative_eq!(r.value, 64.0 / 6.0 - 1.0 / 6.0 - 9.0 + 3.0, max_relative = 1e-14);
    }

    #[test]
    fn endpoint_singularity() {
        // ∫_0^1 x^{-1/2} = 2
        let r = integrate(|x| x.powf(-0.5), 0.0, 1.0, &QuadOptions::tol(1e-12, 1e-10)).unwrap();
        assert_relative_eq!(r.value, 2.0, max_relative = 1e-9);
    }

    #[test]
    fn infinite_ranges() {
        let r = integrate_to_infinity(|x| (-x).exp(), 0.0, &QuadOptions::default()).unwrap();
        assert_relative_eq!(r.value, 1.0, max_relative = 1e-12);
        let g = integrate_real_line(|x| (-x * x).exp(), 0.0, &QuadOptions::default()).unwrap();
        assert_relative_eq!(g.value, PI.sqrt(), max_relative = 1e-12);
        let c = integrate_real_line(|x| 1.0 / (1.0 + x * x), 3.0, &QuadOptions::default()).unwrap();
        assert_relative_eq!(c.value, PI, max_relative = 1e-10);
    }

    #[test]
    fn parallel_nodes_match() {
        let f = |x: f64| (3.0 * x).sin() * (-x).exp();
        let a = integrate_points(f, &[0.0, 5.0], &QuadOptions::default()).unwrap();
        let b = integrate_points_with(f, &[0.0, 5.0], &QuadOptions::default(), Execution::Parallel).unwrap();
        assert_eq!(a.value, b.value);
    }

    #[test]
    fn budget_exhaustion_is_an_error() {
        let opts = QuadOptions {
            abs_tol: 0.0,
            rel_tol: 0.0,
            max_intervals: 5,
        };
        assert!(integrate(|x| (1.0 / x).sin(), 1e-3, 1.0, &opts).is_err());
    }
}
