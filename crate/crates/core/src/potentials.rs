//! Compactly supported smooth potentials: radial profiles (gaussian, bump,
//! sampled table) with couplings and shifted copies.
//!
//! Every profile evaluates to exactly zero beyond its support radius. The
//! gaussian is truncated where its magnitude falls to 1e-12 and blended to
//! zero with a C-infinity taper over the last 5% of the radius, so the
//! truncation error stays below quadrature error while q keeps the two
//! derivatives needed by the Kram-determinant recursion.

use crate::error::{Error, Result};
use crate::geom::{self, Ball, Point3};

/// Relative magnitude at which the gaussian tail is cut.
const GAUSSIAN_TRUNCATION: f64 = 1e-12;
/// Fraction of the support radius over which the taper acts.
const TAPER_FRACTION: f64 = 0.05;

#[derive(Debug, Clone)]
pub enum ProfileShape {
    /// depth * exp(-(r/width)^2), truncated and tapered.
    Gaussian { depth: f64, width: f64 },
    /// depth * exp(1 - 1/(1 - (r/radius)^2)): a C-infinity mollifier.
    Bump { depth: f64, radius: f64 },
    /// Cubic-spline interpolation of sampled (r, value) pairs.
    Table(TableSpline),
}

/// A single radially symmetric profile with a dimensionless coupling.
#[derive(Debug, Clone)]
pub struct RadialProfile {
    pub shape: ProfileShape,
    pub coupling: f64,
    support_radius: f64,
}

impl RadialProfile {
    pub fn gaussian(depth: f64, width: f64) -> Result<Self> {
        if width <= 0.0 || depth == 0.0 || !depth.is_finite() || !width.is_finite() {
            return Err(Error::MalformedInput(format!(
                "gaussian needs finite width > 0 and depth != 0, got depth={depth}, width={width}"
            )));
        }
        // |depth| e^{-(R/width)^2} = 1e-12  =>  R = width sqrt(ln(|depth| 1e12))
        let arg = depth.abs() / GAUSSIAN_TRUNCATION;
        if arg <= std::f64::consts::E {
            return Err(Error::MalformedInput(format!(
                "gaussian depth {depth} too small to truncate at {GAUSSIAN_TRUNCATION}"
            )));
        }
        let support_radius = width * arg.ln().sqrt();
        Ok(RadialProfile {
            shape: ProfileShape::Gaussian { depth, width },
            coupling: 1.0,
            support_radius,
        })
    }

    pub fn bump(depth: f64, radius: f64) -> Result<Self> {
        if radius <= 0.0 || !depth.is_finite() || !radius.is_finite() {
            return Err(Error::MalformedInput(format!(
                "bump needs finite radius > 0, got depth={depth}, radius={radius}"
            )));
        }
        Ok(RadialProfile {
            shape: ProfileShape::Bump { depth, radius },
            coupling: 1.0,
            support_radius: radius,
        })
    }

    pub fn table(samples: &[(f64, f64)]) -> Result<Self> {
        let spline = TableSpline::new(samples)?;
        let support_radius = spline.r_max();
        Ok(RadialProfile {
            shape: ProfileShape::Table(spline),
            coupling: 1.0,
            support_radius,
        })
    }

    pub fn with_coupling(&self, alpha: f64) -> Result<Self> {
        if !(alpha >= 0.0) {
            return Err(Error::MalformedInput(format!(
                "coupling must be >= 0, got {alpha}"
            )));
        }
        let mut p = self.clone();
        p.coupling = self.coupling * alpha;
        Ok(p)
    }

    /// Truncation radius beyond which the profile is exactly zero. For the
    /// gaussian this is recorded from the base depth; rescaling the
    /// coupling leaves it fixed so grids stay comparable across a sweep.
    pub fn support_radius(&self) -> f64 {
        self.support_radius
    }

    /// q(r), including the coupling.
    pub fn value(&self, r: f64) -> f64 {
        self.coupling * self.raw(r.abs()).0
    }

    /// (q, q', q'') at radius r, including the coupling.
    pub fn derivatives(&self, r: f64) -> (f64, f64, f64) {
        let (v, d1, d2) = self.raw(r.abs());
        (self.coupling * v, self.coupling * d1, self.coupling * d2)
    }

    fn raw(&self, r: f64) -> (f64, f64, f64) {
        if r >= self.support_radius {
            return (0.0, 0.0, 0.0);
        }
        match &self.shape {
            ProfileShape::Gaussian { depth, width } => {
                let t = r / width;
                let e = (-t * t).exp();
                let v = depth * e;
                let d1 = v * (-2.0 * t) / width;
                let d2 = v * (4.0 * t * t - 2.0) / (width * width);
                let (w, w1, w2) = taper_window(r, self.support_radius);
                (
                    v * w,
                    d1 * w + v * w1,
                    d2 * w + 2.0 * d1 * w1 + v * w2,
                )
            }
            ProfileShape::Bump { depth, radius } => {
                let t = r / radius;
                if t >= 1.0 - 1e-8 {
                    return (0.0, 0.0, 0.0);
                }
                let s = 1.0 - t * t;
                let f = (1.0 - 1.0 / s).exp();
                let g = -2.0 * t / (s * s);
                let gp = -2.0 * (1.0 + 3.0 * t * t) / (s * s * s);
                let v = depth * f;
                let d1 = v * g / radius;
                let d2 = v * (g * g + gp) / (radius * radius);
                (v, d1, d2)
            }
            ProfileShape::Table(spline) => spline.eval(r),
        }
    }
}

/// C-infinity window: 1 for r <= (1-TAPER_FRACTION) R, 0 at r >= R.
/// Returns (w, w', w'') with respect to r.
fn taper_window(r: f64, support_radius: f64) -> (f64, f64, f64) {
    let r_in = (1.0 - TAPER_FRACTION) * support_radius;
    if r <= r_in {
        return (1.0, 0.0, 0.0);
    }
    if r >= support_radius * (1.0 - 1e-9) {
        return (0.0, 0.0, 0.0);
    }
    let span = TAPER_FRACTION * support_radius;
    let t = (support_radius - r) / span; // 1 at inner edge, 0 at the cut
    let tp = -1.0 / span;
    let (s, s1, s2) = smoothstep_cinf(t);
    (s, s1 * tp, s2 * tp * tp)
}

/// The standard C-infinity partition function s(t) = sig(t)/(sig(t)+sig(1-t))
/// with sig(t) = exp(-1/t); s(0) = 0, s(1) = 1, all derivatives flat at both
/// ends. Returns (s, s', s'').
fn smoothstep_cinf(t: f64) -> (f64, f64, f64) {
    fn sig(t: f64) -> (f64, f64, f64) {
        if t <= 0.0 {
            return (0.0, 0.0, 0.0);
        }
        let s = (-1.0 / t).exp();
        let s1 = s / (t * t);
        let s2 = s * (1.0 - 2.0 * t) / (t * t * t * t);
        (s, s1, s2)
    }
    let (a, a1, a2) = sig(t);
    let (b, bneg1, bneg2) = sig(1.0 - t);
    let b1 = -bneg1;
    let b2 = bneg2;
    let d = a + b;
    let d1 = a1 + b1;
    let d2 = a2 + b2;
    let s = a / d;
    let s1 = (a1 * d - a * d1) / (d * d);
    let s2 = (a2 * d - a * d2) / (d * d) - 2.0 * d1 * s1 / d;
    (s, s1, s2)
}

/// A compactly supported potential: a sum of shifted radial profiles.
#[derive(Debug, Clone)]
pub struct PotentialField {
    components: Vec<(RadialProfile, Point3)>,
}

impl PotentialField {
    pub fn new(components: Vec<(RadialProfile, Point3)>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::MalformedInput(
                "potential needs at least one component".into(),
            ));
        }
        Ok(PotentialField { components })
    }

    pub fn radial(profile: RadialProfile) -> Self {
        PotentialField {
            components: vec![(profile, [0.0; 3])],
        }
    }

    pub fn components(&self) -> &[(RadialProfile, Point3)] {
        &self.components
    }

    /// True when the field is radially symmetric about the origin by
    /// construction: one component with zero offset.
    pub fn is_radial(&self) -> bool {
        self.components.len() == 1 && self.components[0].1 == [0.0; 3]
    }

    pub fn eval(&self, x: Point3) -> f64 {
        let mut acc = 0.0;
        for (profile, center) in &self.components {
            acc += profile.value(geom::dist(x, *center));
        }
        acc
    }

    /// Minimal enclosing ball of the component support balls (exact for
    /// up to two components, near-minimal beyond).
    pub fn support_ball(&self) -> Ball {
        let balls: Vec<Ball> = self
            .components
            .iter()
            .map(|(p, c)| Ball::new(*c, p.support_radius()))
            .collect();
        geom::enclosing_ball(&balls).expect("non-empty by construction")
    }

    pub fn with_coupling(&self, alpha: f64) -> Result<Self> {
        let components = self
            .components
            .iter()
            .map(|(p, c)| Ok((p.with_coupling(alpha)?, *c)))
            .collect::<Result<Vec<_>>>()?;
        Ok(PotentialField { components })
    }

    /// q(r) for radially symmetric fields.
    pub fn value_radial(&self, r: f64) -> f64 {
        debug_assert!(self.is_radial());
        self.components[0].0.value(r)
    }

    /// (q, q', q'') at radius r for radially symmetric fields.
    pub fn derivatives_radial(&self, r: f64) -> (f64, f64, f64) {
        debug_assert!(self.is_radial());
        self.components[0].0.derivatives(r)
    }

    pub fn require_radial(&self) -> Result<()> {
        if self.is_radial() {
            Ok(())
        } else {
            Err(Error::MalformedInput(
                "operation requires a radially symmetric potential (single centered component)"
                    .into(),
            ))
        }
    }

    /// Integral of q(r) dr over the support, by composite Simpson. Used to
    /// size the high-energy end of phase-shift grids.
    pub fn radial_line_integral(&self) -> f64 {
        debug_assert!(self.is_radial());
        let rmax = self.support_ball().radius;
        let n = 4000;
        let h = rmax / n as f64;
        let mut acc = self.value_radial(0.0) + self.value_radial(rmax);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * self.value_radial(i as f64 * h);
        }
        acc * h / 3.0
    }
}

/// Clamped C^2 cubic spline through (r, value) samples. The first sample
/// must be at r = 0 with q'(0) = 0, the last must have value 0 so the
/// profile is compactly supported with a flat landing.
#[derive(Debug, Clone)]
pub struct TableSpline {
    r: Vec<f64>,
    y: Vec<f64>,
    // node derivatives
    m: Vec<f64>,
}

impl TableSpline {
    pub fn new(samples: &[(f64, f64)]) -> Result<Self> {
        if samples.len() < 3 {
            return Err(Error::MalformedInput(
                "table profile needs at least 3 samples".into(),
            ));
        }
        let r: Vec<f64> = samples.iter().map(|s| s.0).collect();
        let y: Vec<f64> = samples.iter().map(|s| s.1).collect();
        for w in r.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::MalformedInput(format!(
                    "table r samples must be strictly increasing, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        if r[0] != 0.0 {
            return Err(Error::MalformedInput(format!(
                "table must start at r = 0, got {}",
                r[0]
            )));
        }
        let last = *y.last().unwrap();
        if last != 0.0 {
            return Err(Error::MalformedInput(format!(
                "table must end with value 0 (compact support), got {last}"
            )));
        }
        let m = clamped_spline_derivatives(&r, &y);
        Ok(TableSpline { r, y, m })
    }

    pub fn r_max(&self) -> f64 {
        *self.r.last().unwrap()
    }

    /// (q, q', q'') at radius r.
    pub fn eval(&self, r: f64) -> (f64, f64, f64) {
        if r >= self.r_max() {
            return (0.0, 0.0, 0.0);
        }
        let i = match self.r.binary_search_by(|v| v.partial_cmp(&r).unwrap()) {
            Ok(i) => i.min(self.r.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.r.len() - 2),
        };
        let h = self.r[i + 1] - self.r[i];
        let t = (r - self.r[i]) / h;
        let (y0, y1) = (self.y[i], self.y[i + 1]);
        let (m0, m1) = (self.m[i] * h, self.m[i + 1] * h);
        // cubic Hermite basis
        let h00 = 2.0 * t * t * t - 3.0 * t * t + 1.0;
        let h10 = t * t * t - 2.0 * t * t + t;
        let h01 = -2.0 * t * t * t + 3.0 * t * t;
        let h11 = t * t * t - t * t;
        let v = h00 * y0 + h10 * m0 + h01 * y1 + h11 * m1;
        let d00 = 6.0 * t * t - 6.0 * t;
        let d10 = 3.0 * t * t - 4.0 * t + 1.0;
        let d01 = -6.0 * t * t + 6.0 * t;
        let d11 = 3.0 * t * t - 2.0 * t;
        let d = (d00 * y0 + d10 * m0 + d01 * y1 + d11 * m1) / h;
        let e00 = 12.0 * t - 6.0;
        let e10 = 6.0 * t - 4.0;
        let e01 = -12.0 * t + 6.0;
        let e11 = 6.0 * t - 2.0;
        let dd = (e00 * y0 + e10 * m0 + e01 * y1 + e11 * m1) / (h * h);
        (v, d, dd)
    }
}

/// Node derivatives of the C^2 cubic spline with clamped ends m_0 = m_n = 0
/// (Thomas tridiagonal solve).
fn clamped_spline_derivatives(r: &[f64], y: &[f64]) -> Vec<f64> {
    let n = r.len();
    let mut m = vec![0.0; n];
    if n <= 2 {
        return m;
    }
    let inner = n - 2;
    let mut diag = vec![0.0; inner];
    let mut sub = vec![0.0; inner];
    let mut sup = vec![0.0; inner];
    let mut rhs = vec![0.0; inner];
    for k in 0..inner {
        let i = k + 1;
        let h0 = r[i] - r[i - 1];
        let h1 = r[i + 1] - r[i];
        sub[k] = 1.0 / h0;
        diag[k] = 2.0 * (1.0 / h0 + 1.0 / h1);
        sup[k] = 1.0 / h1;
        rhs[k] = 3.0 * ((y[i] - y[i - 1]) / (h0 * h0) + (y[i + 1] - y[i]) / (h1 * h1));
    }
    // clamped ends contribute m_0 = m_{n-1} = 0, already absent from rhs
    for k in 1..inner {
        let w = sub[k] / diag[k - 1];
        diag[k] -= w * sup[k - 1];
        rhs[k] -= w * rhs[k - 1];
    }
    let mut sol = vec![0.0; inner];
    sol[inner - 1] = rhs[inner - 1] / diag[inner - 1];
    for k in (0..inner - 1).rev() {
        sol[k] = (rhs[k] - sup[k] * sol[k + 1]) / diag[k];
    }
    m[1..=inner].copy_from_slice(&sol);
    m
}

/// Parse potential components from key=value lines. A `shape = ...` line
/// starts a new component; `depth`, `width`, `radius`, `center`, `coupling`
/// and (for tables) `file`/inline `samples` attach to the current one.
/// Unknown keys are left for the caller (run configuration shares the file).
pub fn parse_potential_config(text: &str, base_dir: Option<&std::path::Path>) -> Result<PotentialField> {
    #[derive(Default)]
    struct Pending {
        shape: Option<String>,
        depth: Option<f64>,
        width: Option<f64>,
        radius: Option<f64>,
        center: Point3,
        coupling: f64,
        file: Option<String>,
        samples: Option<Vec<(f64, f64)>>,
    }

    fn finish(p: Pending, base_dir: Option<&std::path::Path>) -> Result<(RadialProfile, Point3)> {
        let shape = p.shape.expect("caller pushes only started components");
        let profile = match shape.as_str() {
            "gaussian" => RadialProfile::gaussian(
                p.depth
                    .ok_or_else(|| Error::MalformedInput("gaussian needs depth".into()))?,
                p.width
                    .ok_or_else(|| Error::MalformedInput("gaussian needs width".into()))?,
            )?,
            "bump" => RadialProfile::bump(
                p.depth
                    .ok_or_else(|| Error::MalformedInput("bump needs depth".into()))?,
                p.radius
                    .ok_or_else(|| Error::MalformedInput("bump needs radius".into()))?,
            )?,
            "table" => {
                let samples = if let Some(s) = p.samples {
                    s
                } else if let Some(file) = &p.file {
                    let path = match base_dir {
                        Some(dir) => dir.join(file),
                        None => std::path::PathBuf::from(file),
                    };
                    let text = std::fs::read_to_string(&path).map_err(|e| {
                        Error::MalformedInput(format!("cannot read table {}: {e}", path.display()))
                    })?;
                    parse_table_csv(&text)?
                } else {
                    return Err(Error::MalformedInput(
                        "table profile needs file=... or samples=...".into(),
                    ));
                };
                RadialProfile::table(&samples)?
            }
            other => {
                return Err(Error::MalformedInput(format!(
                    "unknown shape '{other}' (expected gaussian, bump, or table)"
                )))
            }
        };
        let profile = profile.with_coupling(p.coupling)?;
        Ok((profile, p.center))
    }

    let mut components = Vec::new();
    let mut pending: Option<Pending> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::MalformedInput(format!(
                "line {}: expected key=value, got '{line}'",
                lineno + 1
            )));
        };
        let key = key.trim();
        let value = value.trim();
        let parse_f64 = |v: &str| -> Result<f64> {
            v.parse::<f64>()
                .map_err(|_| Error::MalformedInput(format!("line {}: bad number '{v}'", lineno + 1)))
        };
        match key {
            "shape" => {
                if let Some(p) = pending.take() {
                    components.push(finish(p, base_dir)?);
                }
                pending = Some(Pending {
                    shape: Some(value.to_string()),
                    coupling: 1.0,
                    ..Default::default()
                });
            }
            "depth" | "width" | "radius" | "coupling" => {
                let p = pending.as_mut().ok_or_else(|| {
                    Error::MalformedInput(format!("line {}: '{key}' before any shape=", lineno + 1))
                })?;
                let v = parse_f64(value)?;
                match key {
                    "depth" => p.depth = Some(v),
                    "width" => p.width = Some(v),
                    "radius" => p.radius = Some(v),
                    _ => p.coupling = v,
                }
            }
            "center" => {
                let p = pending.as_mut().ok_or_else(|| {
                    Error::MalformedInput(format!("line {}: 'center' before any shape=", lineno + 1))
                })?;
                let parts: Vec<&str> = value.split(',').map(str::trim).collect();
                if parts.len() != 3 {
                    return Err(Error::MalformedInput(format!(
                        "line {}: center needs three comma-separated values",
                        lineno + 1
                    )));
                }
                p.center = [
                    parse_f64(parts[0])?,
                    parse_f64(parts[1])?,
                    parse_f64(parts[2])?,
                ];
            }
            "file" => {
                let p = pending.as_mut().ok_or_else(|| {
                    Error::MalformedInput(format!("line {}: 'file' before any shape=", lineno + 1))
                })?;
                p.file = Some(value.to_string());
            }
            "samples" => {
                let p = pending.as_mut().ok_or_else(|| {
                    Error::MalformedInput(format!("line {}: 'samples' before any shape=", lineno + 1))
                })?;
                let mut samples = Vec::new();
                for pair in value.split(';') {
                    let (a, b) = pair.split_once(',').ok_or_else(|| {
                        Error::MalformedInput(format!("line {}: bad sample '{pair}'", lineno + 1))
                    })?;
                    samples.push((parse_f64(a.trim())?, parse_f64(b.trim())?));
                }
                p.samples = Some(samples);
            }
            // run-configuration keys live in the same file; skip here
            _ => {}
        }
    }
    if let Some(p) = pending.take() {
        components.push(finish(p, base_dir)?);
    }
    PotentialField::new(components)
}

/// Two-column (r, value) samples, comma- or whitespace-separated, `#`
/// comments allowed.
pub fn parse_table_csv(text: &str) -> Result<Vec<(f64, f64)>> {
    let mut samples = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .collect();
        if fields.len() != 2 {
            return Err(Error::MalformedInput(format!(
                "table line {}: expected two columns, got '{line}'",
                lineno + 1
            )));
        }
        let r = fields[0].parse::<f64>().map_err(|_| {
            Error::MalformedInput(format!("table line {}: bad r '{}'", lineno + 1, fields[0]))
        })?;
        let v = fields[1].parse::<f64>().map_err(|_| {
            Error::MalformedInput(format!("table line {}: bad value '{}'", lineno + 1, fields[1]))
        })?;
        samples.push((r, v));
    }
    Ok(samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn gaussian_at_origin_is_depth() {
        let p = PotentialField::radial(RadialProfile::gaussian(-4.0, 1.0).unwrap());
        assert_eq!(p.eval([0.0; 3]), -4.0);
    }

    #[test]
    fn zero_outside_support() {
        let prof = RadialProfile::gaussian(-4.0, 1.0).unwrap();
        let r = prof.support_radius();
        let p = PotentialField::radial(prof);
        assert_eq!(p.eval([r + 1e-9, 0.0, 0.0]), 0.0);
        assert_eq!(p.eval([0.0, 0.0, 100.0]), 0.0);
    }

    #[test]
    fn two_shifted_gaussians_at_origin() {
        let g = RadialProfile::gaussian(-2.0, 1.0).unwrap();
        let p = PotentialField::new(vec![
            (g.clone(), [1.0, 0.0, 0.0]),
            (g, [-1.0, 0.0, 0.0]),
        ])
        .unwrap();
        assert_relative_eq!(p.eval([0.0; 3]), -4.0 * (-1.0f64).exp(), max_relative = 1e-12);
        assert!(!p.is_radial());
    }

    #[test]
    fn support_ball_examples() {
        let b = PotentialField::radial(RadialProfile::bump(-1.0, 1.0).unwrap()).support_ball();
        assert_eq!(b.center, [0.0; 3]);
        assert_eq!(b.radius, 1.0);

        let bump = RadialProfile::bump(-1.0, 1.0).unwrap();
        let two = PotentialField::new(vec![
            (bump.clone(), [1.0, 0.0, 0.0]),
            (bump, [-1.0, 0.0, 0.0]),
        ])
        .unwrap()
        .support_ball();
        assert_abs_diff_eq!(two.center[0], 0.0, epsilon = 1e-14);
        assert_relative_eq!(two.radius, 2.0, epsilon = 1e-14);

        // |q| = depth e^{-r^2} falls to 1e-12 at r = sqrt(ln(4e12))
        let g = RadialProfile::gaussian(-4.0, 1.0).unwrap();
        assert_relative_eq!(
            g.support_radius(),
            (4.0e12f64).ln().sqrt(),
            max_relative = 1e-12
        );
        assert_relative_eq!(g.support_radius(), 5.3868, max_relative = 1e-4);
    }

    #[test]
    fn coupling_scales_values() {
        let p = PotentialField::radial(RadialProfile::gaussian(-4.0, 1.0).unwrap());
        let zero = p.with_coupling(0.0).unwrap();
        assert_eq!(zero.eval([0.3, 0.1, 0.0]), 0.0);
        let same = p.with_coupling(1.0).unwrap();
        assert_eq!(same.eval([0.3, 0.1, 0.0]), p.eval([0.3, 0.1, 0.0]));
        let twice = p.with_coupling(2.0).unwrap();
        assert_eq!(twice.eval([0.0; 3]), -8.0);
        assert!(p.with_coupling(-1.0).is_err());
    }

    #[test]
    fn radial_symmetry_of_eval() {
        let p = PotentialField::radial(RadialProfile::gaussian(-4.0, 1.3).unwrap());
        let r = 1.7;
        let a = p.eval([r, 0.0, 0.0]);
        let b = p.eval([0.0, r, 0.0]);
        let c = p.eval([r / 3.0f64.sqrt(), r / 3.0f64.sqrt(), r / 3.0f64.sqrt()]);
        assert_relative_eq!(a, b, max_relative = 1e-14);
        assert_relative_eq!(a, c, max_relative = 1e-12);
    }

    #[test]
    fn taper_keeps_gaussian_smooth() {
        // q' and q'' from `derivatives` must match finite differences of
        // `value` across the taper zone.
        let prof = RadialProfile::gaussian(-8.0, 1.0).unwrap();
        let rs = prof.support_radius();
        for &r in &[0.5, 1.5, 0.94 * rs, 0.96 * rs, 0.99 * rs] {
            let h = 1e-5;
            let (_, d1, d2) = prof.derivatives(r);
            let fd1 = (prof.value(r + h) - prof.value(r - h)) / (2.0 * h);
            let fd2 = (prof.value(r + h) - 2.0 * prof.value(r) + prof.value(r - h)) / (h * h);
            let scale = prof.value(r).abs().max(1e-9);
            assert_abs_diff_eq!(d1, fd1, epsilon = 1e-6 * scale.max(d1.abs()));
            assert_abs_diff_eq!(d2, fd2, epsilon = 1e-3 * scale.max(d2.abs()));
        }
    }

    #[test]
    fn bump_derivatives_match_fd() {
        let prof = RadialProfile::bump(-4.0, 1.0).unwrap();
        for &r in &[0.1, 0.4, 0.7, 0.9] {
            let h = 1e-6;
            let (_, d1, d2) = prof.derivatives(r);
            let fd1 = (prof.value(r + h) - prof.value(r - h)) / (2.0 * h);
            let fd2 = (prof.value(r + h) - 2.0 * prof.value(r) + prof.value(r - h)) / (h * h);
            assert_relative_eq!(d1, fd1, max_relative = 1e-6);
            assert_relative_eq!(d2, fd2, max_relative = 1e-4);
        }
        assert_eq!(prof.value(0.0), -4.0);
        assert_eq!(prof.value(1.0), 0.0);
    }

    #[test]
    fn table_profile_interpolates_and_errors() {
        // smooth samples of -cos(pi r / 2)^2 on [0, 1]
        let mut samples: Vec<(f64, f64)> = (0..=20)
            .map(|i| {
                let r = i as f64 / 20.0;
                let c = (std::f64::consts::FRAC_PI_2 * r).cos();
                (r, -c * c)
            })
            .collect();
        samples.last_mut().unwrap().1 = 0.0;
        let prof = RadialProfile::table(&samples).unwrap();
        assert_relative_eq!(prof.value(0.5), -0.5, max_relative = 1e-3);
        assert_eq!(prof.value(1.2), 0.0);

        let bad = vec![(0.0, -1.0), (0.5, -0.4), (0.4, -0.2), (1.0, 0.0)];
        assert!(matches!(
            RadialProfile::table(&bad),
            Err(Error::MalformedInput(_))
        ));
    }

    #[test]
    fn parse_config_two_components() {
        let text = "\
# a two-bump field
shape = gaussian
depth = -2.0
width = 1.0
center = 1, 0, 0
shape = gaussian
depth = -2.0
width = 1.0
center = -1, 0, 0
n = 16
";
        let p = parse_potential_config(text, None).unwrap();
        assert_eq!(p.components().len(), 2);
        assert_relative_eq!(p.eval([0.0; 3]), -4.0 * (-1.0f64).exp(), max_relative = 1e-12);
    }
}
