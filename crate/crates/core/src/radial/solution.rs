//! Regular solutions of the zero-energy radial equation
//!   -phi'' + l(l+1)/r^2 phi + q(r) phi = 0,   phi ~ r^{l+1} at r = 0.

use crate::error::{Error, Result};
use crate::potentials::PotentialField;

/// Magnitude at which the stored solution is rescaled to dodge overflow;
/// the regular branch is defined up to a constant, so this is never an
/// error.
const RESCALE_LIMIT: f64 = 1e250;

/// A regular radial solution on a uniform r-grid, with its free-tail
/// coefficients (a, b): phi(r) = a r^{l+1} + b r^{-l} for r past the
/// support.
#[derive(Debug, Clone)]
pub struct RadialSolution {
    pub l: usize,
    r0: f64,
    dr: f64,
    phi: Vec<f64>,
    dphi: Vec<f64>,
    /// index of the first grid point at or beyond the support radius
    match_index: usize,
    tail_a: f64,
    tail_b: f64,
    /// product of all rescale factors applied to the stored values
    rescale: f64,
    potential: PotentialField,
}

/// Integrate the regular solution out to `r_max` (at least 3x the support
/// radius) with the default step.
pub fn integrate_regular(p: &PotentialField, l: usize, r_max: f64) -> Result<RadialSolution> {
    let support = p.support_ball().radius;
    let steps = ((r_max / support.max(1e-6)) * 8000.0).ceil() as usize;
    integrate_regular_with_step(p, l, r_max, r_max / steps.clamp(2000, 400_000) as f64)
}

/// Same with an explicit step; the grid is r0 = dr, 2 dr, ..., r_max.
pub fn integrate_regular_with_step(
    p: &PotentialField,
    l: usize,
    r_max: f64,
    dr: f64,
) -> Result<RadialSolution> {
    p.require_radial()?;
    let support = p.support_ball().radius;
    if r_max < 3.0 * support {
        return Err(Error::MalformedInput(format!(
            "r_max = {r_max} must be at least 3x the support radius {support}"
        )));
    }
    if !(dr > 0.0) || dr > support / 16.0 {
        return Err(Error::MalformedInput(format!(
            "step {dr} must be positive and resolve the support {support}"
        )));
    }

    let n = (r_max / dr).round() as usize;
    let q0 = p.value_radial(0.0);
    let w = |r: f64| l as f64 * (l as f64 + 1.0) / (r * r) + p.value_radial(r);
    let raw = integrate_raw(&w, regular_series_start(l, q0, dr), dr, n);

    // free-tail match at the first grid point past the support
    let match_index = (((support - raw.r0) / dr).ceil() as usize).min(n - 1);
    let rm = raw.r0 + match_index as f64 * dr;
    let (tail_a, tail_b) =
        free_tail_coefficients(l, rm, raw.phi[match_index], raw.dphi[match_index]);

    Ok(RadialSolution {
        l,
        r0: raw.r0,
        dr,
        phi: raw.phi,
        dphi: raw.dphi,
        match_index,
        tail_a,
        tail_b,
        rescale: raw.rescale,
        potential: p.clone(),
    })
}

/// Series start for the regular branch at r0 = dr:
/// phi = r^{l+1} (1 + w0 r^2 / (4l+6)) where w0 is the constant part of
/// the effective potential at the origin (q(0), or q(0) - k^2 at positive
/// energy).
pub(crate) fn regular_series_start(l: usize, w0: f64, r0: f64) -> [f64; 2] {
    let lf = l as f64;
    let c = w0 / (4.0 * lf + 6.0);
    [
        r0.powi(l as i32 + 1) * (1.0 + c * r0 * r0),
        (lf + 1.0) * r0.powi(l as i32) + (lf + 3.0) * c * r0.powi(l as i32 + 2),
    ]
}

pub(crate) struct RawIntegration {
    pub r0: f64,
    pub phi: Vec<f64>,
    pub dphi: Vec<f64>,
    pub rescale: f64,
}

/// Fixed-step RK4 on phi'' = w(r) phi from r0 = dr, n points, rescaling on
/// overflow (the solution is defined up to a constant). Near the origin
/// the centrifugal 1/r^2 varies across a whole step, so each stored
/// interval is integrated with substeps no longer than 0.5% of the
/// current radius.
pub(crate) fn integrate_raw(w: &impl Fn(f64) -> f64, start: [f64; 2], dr: f64, n: usize) -> RawIntegration {
    let r0 = dr;
    let mut y = start;
    let mut phi = Vec::with_capacity(n);
    let mut dphi = Vec::with_capacity(n);
    phi.push(y[0]);
    dphi.push(y[1]);
    let mut rescale = 1.0f64;

    for i in 1..n {
        let r = r0 + (i - 1) as f64 * dr;
        let substeps = (dr / (0.005 * r)).ceil().clamp(1.0, 4096.0) as usize;
        let h = dr / substeps as f64;
        for s in 0..substeps {
            y = rk4_step(r + s as f64 * h, y, h, w);
        }
        if y[0].abs() > RESCALE_LIMIT || y[1].abs() > RESCALE_LIMIT {
            let s = 1.0 / y[0].abs().max(y[1].abs());
            y[0] *= s;
            y[1] *= s;
            for v in phi.iter_mut() {
                *v *= s;
            }
            for v in dphi.iter_mut() {
                *v *= s;
            }
            rescale *= s;
        }
        phi.push(y[0]);
        dphi.push(y[1]);
    }
    RawIntegration {
        r0,
        phi,
        dphi,
        rescale,
    }
}

/// Solve phi = a r^{l+1} + b r^{-l} for (a, b) from (phi, phi') at r.
fn free_tail_coefficients(l: usize, r: f64, phi: f64, dphi: f64) -> (f64, f64) {
    let lf = l as f64;
    let p1 = r.powi(l as i32 + 1);
    let p2 = r.powi(-(l as i32));
    let d1 = (lf + 1.0) * r.powi(l as i32);
    let d2 = -lf * r.powi(-(l as i32) - 1);
    let det = p1 * d2 - p2 * d1;
    let a = (phi * d2 - p2 * dphi) / det;
    let b = (p1 * dphi - phi * d1) / det;
    (a, b)
}

fn rk4_step(r: f64, y: [f64; 2], h: f64, w: &impl Fn(f64) -> f64) -> [f64; 2] {
    let f = |r: f64, y: [f64; 2]| [y[1], w(r) * y[0]];
    let k1 = f(r, y);
    let k2 = f(r + 0.5 * h, [y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
    let k3 = f(r + 0.5 * h, [y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
    let k4 = f(r + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
    [
        y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    ]
}

impl RadialSolution {
    pub fn r0(&self) -> f64 {
        self.r0
    }

    pub fn dr(&self) -> f64 {
        self.dr
    }

    pub fn r_max(&self) -> f64 {
        self.r0 + (self.phi.len() - 1) as f64 * self.dr
    }

    pub fn r_match(&self) -> f64 {
        self.r0 + self.match_index as f64 * self.dr
    }

    pub fn phi_values(&self) -> &[f64] {
        &self.phi
    }

    pub fn dphi_values(&self) -> &[f64] {
        &self.dphi
    }

    pub fn potential(&self) -> &PotentialField {
        &self.potential
    }

    /// Free-tail coefficients (a, b) of phi = a r^{l+1} + b r^{-l}, in the
    /// stored (possibly rescaled) normalization.
    pub fn tail(&self) -> (f64, f64) {
        (self.tail_a, self.tail_b)
    }

    /// Tail coefficients in the series normalization phi ~ r^{l+1} at 0.
    pub fn tail_unscaled(&self) -> (f64, f64) {
        (self.tail_a / self.rescale, self.tail_b / self.rescale)
    }

    /// True if the decaying tail dominates: a zero-energy bound or
    /// half-bound state in this channel.
    pub fn is_resonant(&self, tau: f64) -> bool {
        let r = self.r_max();
        let grow = self.tail_a.abs() * r.powi(self.l as i32 + 1);
        let decay = self.tail_b.abs() * r.powi(-(self.l as i32));
        grow <= tau * (grow + decay)
    }

    /// phi and phi' at r, by cubic Hermite interpolation on the stored
    /// grid inside, exact free form beyond the matching radius. Errors
    /// below the series-start radius.
    pub fn eval(&self, r: f64) -> Result<(f64, f64)> {
        if r < self.r0 {
            return Err(Error::Numerical(format!(
                "r = {r} below the series-start radius {}",
                self.r0
            )));
        }
        if r >= self.r_match() {
            let lf = self.l as f64;
            let li = self.l as i32;
            let phi = self.tail_a * r.powi(li + 1) + self.tail_b * r.powi(-li);
            let dphi =
                self.tail_a * (lf + 1.0) * r.powi(li) - self.tail_b * lf * r.powi(-li - 1);
            return Ok((phi, dphi));
        }
        let t_idx = (r - self.r0) / self.dr;
        let i = (t_idx.floor() as usize).min(self.phi.len() - 2);
        let t = t_idx - i as f64;
        let h = self.dr;
        let (y0, y1) = (self.phi[i], self.phi[i + 1]);
        let (m0, m1) = (self.dphi[i] * h, self.dphi[i + 1] * h);
        let h00 = 2.0 * t * t * t - 3.0 * t * t + 1.0;
        let h10 = t * t * t - 2.0 * t * t + t;
        let h01 = -2.0 * t * t * t + 3.0 * t * t;
        let h11 = t * t * t - t * t;
        let phi = h00 * y0 + h10 * m0 + h01 * y1 + h11 * m1;
        // phi' from its own Hermite, with phi'' = w phi as derivative data
        let ra = self.r0 + i as f64 * self.dr;
        let rb = ra + h;
        let lf = self.l as f64;
        let w = |r: f64| lf * (lf + 1.0) / (r * r) + self.potential.value_radial(r);
        let (d0, d1) = (self.dphi[i], self.dphi[i + 1]);
        let (n0, n1) = (w(ra) * y0 * h, w(rb) * y1 * h);
        let dphi = h00 * d0 + h10 * n0 + h01 * d1 + h11 * n1;
        Ok((phi, dphi))
    }

    /// Number of zeros of phi on (0, r_max], including the single analytic
    /// tail zero beyond r_max when the free form crosses there. Sturm
    /// oscillation makes this the bound-state count of the channel.
    pub fn node_count(&self) -> usize {
        let mut count = 0;
        for w in self.phi.windows(2) {
            if w[0] == 0.0 {
                continue;
            }
            if w[0] * w[1] < 0.0 || (w[1] == 0.0 && w[0] != 0.0) {
                count += 1;
            }
        }
        if let Some(rz) = self.tail_zero() {
            if rz > self.r_max() {
                count += 1;
            }
        }
        count
    }

    /// The unique positive zero of the free tail a r^{l+1} + b r^{-l},
    /// present when a and b have opposite signs.
    pub fn tail_zero(&self) -> Option<f64> {
        if self.tail_a == 0.0 || self.tail_a * self.tail_b >= 0.0 {
            return None;
        }
        let ratio = -self.tail_b / self.tail_a;
        Some(ratio.powf(1.0 / (2.0 * self.l as f64 + 1.0)))
    }
}
