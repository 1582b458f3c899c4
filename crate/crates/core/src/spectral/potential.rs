//! Potentials V(x) (or V(r) for radial ones) and their compact text form.
//!
//! ```text
//! poschl_teller nu=2
//! square_well depth=1 width=2
//! gaussian depth=1 width=1 dim=3
//! two_bump gamma=2 R=6
//! ggm_sphere_image dim=3 L=0
//! tabulated file=path.csv
//! ```
//!
//! Every family also accepts `coupling=α` and `dilation=λ`, giving
//! α·V(λx), and `dim=d`. Potentials with d ≥ 2 are radial.

use crate::constants::{p_from_gamma, sphere_area};
use crate::error::{domain, LtError, Result};
use crate::quad::{integrate_points, integrate_to_infinity, QuadOptions};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// −depth on |x| < width/2
    SquareWell { depth: f64, width: f64 },
    /// −depth·exp(−x²/width²)
    Gaussian { depth: f64, width: f64 },
    /// −ν(ν+1) sech²x
    PoschlTeller { nu: f64 },
    /// x² − 1
    ShiftedHarmonic,
    /// −(L+(d−2)/2)(L+d/2)·(2/(1+r²))²
    GgmSphereImage { level: u64 },
    /// −(Q(x−R/2)² + Q(x+R/2)²)^{p−1} built on the soliton of exponent p(γ)
    TwoBump { gamma: f64, separation: f64 },
    /// piecewise linear through samples, zero outside
    Tabulated { x: Vec<f64>, v: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PotentialSpec {
    #[serde(flatten)]
    pub family: Family,
    pub coupling: f64,
    pub dilation: f64,
    pub dim: u32,
}

/// Exponent p of the soliton behind the two-bump potential, from γ = p' − 1/2.
pub fn two_bump_exponent(gamma: f64) -> f64 {
    p_from_gamma(gamma, 1)
}

/// Q(x)² for the one-dimensional soliton Q = (p sech²((p−1)x))^{1/(2p−2)}.
pub fn soliton_sq(p: f64, x: f64) -> f64 {
    let y = (p - 1.0) * x.abs();
    // sech² y = 4e^{−2y}/(1+e^{−2y})²
    let e = (-2.0 * y).exp();
    let ln_sech2 = 4f64.ln() - 2.0 * y - 2.0 * e.ln_1p();
    ((p.ln() + ln_sech2) / (p - 1.0)).exp()
}

impl PotentialSpec {
    pub fn new(family: Family, dim: u32) -> Result<PotentialSpec> {
        let spec = PotentialSpec { family, coupling: 1.0, dilation: 1.0, dim };
        spec.validate()?;
        Ok(spec)
    }

    pub fn poschl_teller(nu: f64) -> PotentialSpec {
        PotentialSpec::new(Family::PoschlTeller { nu }, 1).expect("valid")
    }

    pub fn square_well(depth: f64, width: f64, dim: u32) -> Result<PotentialSpec> {
        PotentialSpec::new(Family::SquareWell { depth, width }, dim)
    }

    pub fn gaussian(depth: f64, width: f64, dim: u32) -> Result<PotentialSpec> {
        PotentialSpec::new(Family::Gaussian { depth, width }, dim)
    }

    pub fn two_bump(gamma: f64, separation: f64) -> Result<PotentialSpec> {
        PotentialSpec::new(Family::TwoBump { gamma, separation }, 1)
    }

    pub fn tabulated(x: Vec<f64>, v: Vec<f64>) -> Result<PotentialSpec> {
        PotentialSpec::new(Family::Tabulated { x, v }, 1)
    }

    /// Stereographic image of the level-L constant potential on the d-sphere.
    pub fn ggm(d: u32, level: u64) -> Result<PotentialSpec> {
        PotentialSpec::new(Family::GgmSphereImage { level }, d)
    }

    /// α·V(λ·), keeping the family.
    pub fn scaled(&self, coupling: f64, dilation: f64) -> Result<PotentialSpec> {
        let s = PotentialSpec { coupling: self.coupling * coupling, dilation: self.dilation * dilation, ..self.clone() };
        s.validate()?;
        Ok(s)
    }

    pub fn is_radial(&self) -> bool {
        self.dim >= 2
    }

    fn validate(&self) -> Result<()> {
        let pos = |v: f64, what: &str| -> Result<()> {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(LtError::Input(format!("{what} must be positive and finite, got {v}")))
            }
        };
        if self.dim == 0 {
            return Err(LtError::Input("dimension must be at least 1".into()));
        }
        pos(self.dilation, "dilation")?;
        if !self.coupling.is_finite() {
            return Err(LtError::Input("coupling must be finite".into()));
        }
        match &self.family {
            Family::SquareWell { depth, width } | Family::Gaussian { depth, width } => {
                pos(*depth, "depth")?;
                pos(*width, "width")
            }
            Family::PoschlTeller { nu } => pos(*nu, "nu"),
            Family::ShiftedHarmonic => Ok(()),
            Family::GgmSphereImage { .. } => {
                if self.dim < 3 {
                    return Err(LtError::Input("ggm_sphere_image needs dim >= 3".into()));
                }
                Ok(())
            }
            Family::TwoBump { gamma, separation } => {
                if self.dim != 1 {
                    return Err(LtError::Input("two_bump is one-dimensional".into()));
                }
                if !(*gamma > 0.5 && gamma.is_finite()) {
                    return Err(LtError::Input(format!("two_bump needs gamma > 1/2, got {gamma}")));
                }
                if !(separation.is_finite() && *separation >= 0.0) {
                    return Err(LtError::Input(format!("separation must be nonnegative, got {separation}")));
                }
                Ok(())
            }
            Family::Tabulated { x, v } => {
                if x.len() < 2 || x.len() != v.len() {
                    return Err(LtError::Input("tabulated potential needs at least two (x, V) samples".into()));
                }
                if x.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(LtError::Input("tabulated abscissae must be strictly increasing".into()));
                }
                if x.iter().chain(v).any(|t| !t.is_finite()) {
                    return Err(LtError::Input("tabulated samples must be finite".into()));
                }
                if self.dim >= 2 && x[0] < 0.0 {
                    return Err(LtError::Input("radial tabulated potential needs r >= 0".into()));
                }
                Ok(())
            }
        }
    }

    fn base(&self, x: f64) -> f64 {
        match &self.family {
            Family::SquareWell { depth, width } => {
                let a = x.abs();
                let half = 0.5 * width;
                if a < half {
                    -depth
                } else if a == half {
                    -0.5 * depth
                } else {
                    0.0
                }
            }
            Family::Gaussian { depth, width } => -depth * (-(x / width).powi(2)).exp(),
            Family::PoschlTeller { nu } => {
                let c = x.cosh();
                -nu * (nu + 1.0) / (c * c)
            }
            Family::ShiftedHarmonic => x * x - 1.0,
            Family::GgmSphereImage { level } => {
                let c = crate::sphere::level_coupling(self.dim, *level);
                -c * (2.0 / (1.0 + x * x)).powi(2)
            }
            Family::TwoBump { gamma, separation } => {
                let p = two_bump_exponent(*gamma);
                let s = soliton_sq(p, x - 0.5 * separation) + soliton_sq(p, x + 0.5 * separation);
                -s.powf(p - 1.0)
            }
            Family::Tabulated { x: xs, v } => {
                let n = xs.len();
                if x < xs[0] || x > xs[n - 1] {
                    return 0.0;
                }
                let i = xs.partition_point(|&t| t <= x).clamp(1, n - 1);
                let t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
                v[i - 1] + t * (v[i] - v[i - 1])
            }
        }
    }

    /// V at x (one-dimensional) or at radius r (radial).
    pub fn value(&self, x: f64) -> f64 {
        self.coupling * self.base(self.dilation * x)
    }

    /// Points where V has kinks or jumps, plus a centre, in physical units.
    fn breakpoints(&self) -> Vec<f64> {
        let mut pts = match &self.family {
            Family::SquareWell { width, .. } => vec![-0.5 * width, 0.0, 0.5 * width],
            Family::TwoBump { separation, .. } => vec![-0.5 * separation, 0.0, 0.5 * separation],
            Family::Tabulated { x, .. } => x.clone(),
            _ => vec![0.0],
        };
        for p in &mut pts {
            *p /= self.dilation;
        }
        pts.dedup();
        pts
    }

    /// True when V ≤ 0 everywhere.
    pub fn is_nonpositive(&self) -> bool {
        let base_ok = match &self.family {
            Family::ShiftedHarmonic => false,
            Family::Tabulated { v, .. } => v.iter().all(|t| *t <= 0.0),
            _ => true,
        };
        if self.coupling >= 0.0 {
            base_ok
        } else {
            matches!(&self.family, Family::Tabulated { v, .. } if v.iter().all(|t| *t >= 0.0))
        }
    }

    /// Largest |V| (sampled for smooth families, exact for the others).
    pub fn sup_abs(&self) -> f64 {
        let base = match &self.family {
            Family::SquareWell { depth, .. } | Family::Gaussian { depth, .. } => *depth,
            Family::PoschlTeller { nu } => nu * (nu + 1.0),
            Family::Tabulated { v, .. } => v.iter().fold(0.0f64, |m, t| m.max(t.abs())),
            _ => {
                let bp = self.breakpoints();
                let span = bp.iter().fold(0.0f64, |m, t| m.max(t.abs())) * self.dilation + 10.0;
                (0..=4000).map(|i| self.base(-span + 2.0 * span * i as f64 / 4000.0).abs()).fold(0.0, f64::max)
            }
        };
        self.coupling.abs() * base
    }

    /// ∫ V₋^κ dx over ℝ (d = 1) or ℝ^d (radial), by adaptive quadrature.
    pub fn negative_part_norm(&self, kappa: f64) -> Result<f64> {
        if !(kappa > 0.0) {
            return domain(format!("exponent must be positive, got {kappa}"));
        }
        let opts = QuadOptions::tol(1e-15, 1e-12);
        let f = |x: f64| {
            let v = self.value(x);
            if v < 0.0 {
                (-v).powf(kappa)
            } else {
                0.0
            }
        };
        let mut pts = self.breakpoints();
        let val = if self.is_radial() {
            let d = self.dim;
            pts.retain(|p| *p >= 0.0);
            if pts.first() != Some(&0.0) {
                pts.insert(0, 0.0);
            }
            let g = |r: f64| f(r) * r.powi(d as i32 - 1);
            let last = *pts.last().expect("nonempty");
            let head = if pts.len() >= 2 { integrate_points(g, &pts, &opts)?.value } else { 0.0 };
            sphere_area(d)? * (head + integrate_to_infinity(g, last, &opts)?.value)
        } else {
            let (lo, hi) = (pts[0], pts[pts.len() - 1]);
            let mid = if pts.len() >= 2 { integrate_points(f, &pts, &opts)?.value } else { 0.0 };
            mid + integrate_to_infinity(f, hi, &opts)?.value + integrate_to_infinity(|x| f(2.0 * lo - x), lo, &opts)?.value
        };
        if !val.is_finite() {
            return Err(LtError::Accuracy { what: "potential norm is not finite".into(), achieved: val, required: 0.0 });
        }
        Ok(val)
    }

    /// Parse the compact text form; `file=` paths are read relative to the
    /// current directory.
    pub fn parse(text: &str) -> Result<PotentialSpec> {
        let mut words = text.split_whitespace();
        let family = words.next().ok_or_else(|| LtError::Input("empty potential description".into()))?;
        let mut kv: BTreeMap<String, String> = BTreeMap::new();
        for w in words {
            let (k, v) = w
                .split_once('=')
                .ok_or_else(|| LtError::Input(format!("expected key=value, got '{w}'")))?;
            if kv.insert(k.to_string(), v.to_string()).is_some() {
                return Err(LtError::Input(format!("duplicate key '{k}'")));
            }
        }
        let mut take = |key: &str, default: Option<f64>| -> Result<f64> {
            match kv.remove(key) {
                Some(v) => v.parse::<f64>().map_err(|_| LtError::Input(format!("{key}={v} is not a number"))),
                None => default.ok_or_else(|| LtError::Input(format!("{family} needs {key}="))),
            }
        };
        let dim = take("dim", Some(1.0))?;
        let coupling = take("coupling", Some(1.0))?;
        let dilation = take("dilation", Some(1.0))?;
        let fam = match family {
            "square_well" => Family::SquareWell { depth: take("depth", Some(1.0))?, width: take("width", Some(2.0))? },
            "gaussian" => Family::Gaussian { depth: take("depth", Some(1.0))?, width: take("width", Some(1.0))? },
            "poschl_teller" => Family::PoschlTeller { nu: take("nu", None)? },
            "shifted_harmonic" => Family::ShiftedHarmonic,
            "ggm_sphere_image" => {
                let l = take("L", Some(0.0))?;
                if l < 0.0 || l.fract() != 0.0 {
                    return Err(LtError::Input(format!("L must be a nonnegative integer, got {l}")));
                }
                Family::GgmSphereImage { level: l as u64 }
            }
            "two_bump" => Family::TwoBump { gamma: take("gamma", None)?, separation: take("R", None)? },
            "tabulated" => {
                let file = kv.remove("file").ok_or_else(|| LtError::Input("tabulated needs file=".into()))?;
                let (x, v) = read_samples(Path::new(&file))?;
                Family::Tabulated { x, v }
            }
            other => return Err(LtError::Input(format!("unknown potential family '{other}'"))),
        };
        if let Some(k) = kv.keys().next() {
            return Err(LtError::Input(format!("unknown key '{k}' for {family}")));
        }
        if dim < 1.0 || dim.fract() != 0.0 || dim > 64.0 {
            return Err(LtError::Input(format!("dim must be a small positive integer, got {dim}")));
        }
        let spec = PotentialSpec { family: fam, coupling, dilation, dim: dim as u32 };
        spec.validate()?;
        Ok(spec)
    }
}

impl fmt::Display for PotentialSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.family {
            Family::SquareWell { depth, width } => write!(f, "square_well depth={depth} width={width}")?,
            Family::Gaussian { depth, width } => write!(f, "gaussian depth={depth} width={width}")?,
            Family::PoschlTeller { nu } => write!(f, "poschl_teller nu={nu}")?,
            Family::ShiftedHarmonic => write!(f, "shifted_harmonic")?,
            Family::GgmSphereImage { level } => write!(f, "ggm_sphere_image L={level}")?,
            Family::TwoBump { gamma, separation } => write!(f, "two_bump gamma={gamma} R={separation}")?,
            Family::Tabulated { x, .. } => write!(f, "tabulated samples={}", x.len())?,
        }
        if self.dim != 1 {
            write!(f, " dim={}", self.dim)?;
        }
        if self.coupling != 1.0 {
            write!(f, " coupling={}", self.coupling)?;
        }
        if self.dilation != 1.0 {
            write!(f, " dilation={}", self.dilation)?;
        }
        Ok(())
    }
}

/// Read `abscissa,value` rows; a non-numeric first line is taken as a header.
pub fn read_samples(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let text = std::fs::read_to_string(path).map_err(|e| LtError::Input(format!("{}: {e}", path.display())))?;
    parse_samples(&text)
}

pub fn parse_samples(text: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut x = Vec::new();
    let mut v = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut cols = line.split(',').map(str::trim);
        let (a, b) = match (cols.next(), cols.next(), cols.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => return Err(LtError::Input(format!("line {}: expected two columns", i + 1))),
        };
        match (a.parse::<f64>(), b.parse::<f64>()) {
            (Ok(a), Ok(b)) => {
                x.push(a);
                v.push(b);
            }
            _ if x.is_empty() && i == 0 => continue,
            _ => return Err(LtError::Input(format!("line {}: not numeric", i + 1))),
        }
    }
    if x.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(LtError::Input("abscissae must be strictly increasing".into()));
    }
    Ok((x, v))
}
