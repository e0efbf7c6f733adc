//! Partial-wave phase shifts by log-derivative matching at the support
//! edge, and unwrapped phase curves pinned near zero at high energy.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::potentials::PotentialField;
use crate::radial::solution::{integrate_raw, regular_series_start};
use crate::scattering::bessel::spherical_bessel_with_derivatives;

use std::f64::consts::PI;

/// delta_l(k) mod pi in (-pi/2, pi/2].
pub fn phase_shift(p: &PotentialField, l: usize, k: f64) -> Result<f64> {
    p.require_radial()?;
    if !(k > 0.0) {
        return Err(Error::MalformedInput(format!(
            "phase shift needs k > 0, got {k}"
        )));
    }
    let support = p.support_ball().radius;
    let q = |r: f64| p.value_radial(r);
    phase_shift_raw(&q, support, l, k)
}

/// Same, for a raw radial profile q with support radius r_supp. The
/// integration step resolves both the support and the wavelength.
pub(crate) fn phase_shift_raw(
    q: &impl Fn(f64) -> f64,
    r_supp: f64,
    l: usize,
    k: f64,
) -> Result<f64> {
    let dr = (r_supp / 3000.0).min(2.0 * PI / k / 48.0);
    let lf = l as f64;
    let w = |r: f64| lf * (lf + 1.0) / (r * r) + q(r) - k * k;
    // integrate a few steps past the support so the match can shift
    let n = ((r_supp / dr).ceil() as usize) + 8;
    let raw = integrate_raw(&w, regular_series_start(l, q(0.0) - k * k, dr), dr, n);

    let first_match = ((r_supp - raw.r0) / dr).ceil() as usize;
    let scale = raw.phi[first_match].abs().max(raw.dphi[first_match].abs());
    for attempt in 0..=5 {
        let idx = (first_match + attempt).min(raw.phi.len() - 1);
        let r = raw.r0 + idx as f64 * dr;
        let (phi, dphi) = (raw.phi[idx], raw.dphi[idx]);
        let x = k * r;
        let (j, jp, nn, np) = spherical_bessel_with_derivatives(l, x)?;
        // Riccati forms S = x j, C = -x n and their derivatives in r
        let s = x * j;
        let c = -x * nn;
        let sp = k * (j + x * jp);
        let cp = -k * (nn + x * np);
        // tan(delta) = -(S' phi - S phi') / (C' phi - C phi')
        let num = -(sp * phi - s * dphi);
        let den = cp * phi - c * dphi;
        if num.abs() + den.abs() <= 1e-300 * scale {
            continue; // degenerate match point, shift outward and retry
        }
        let mut delta = num.atan2(den);
        // fold (-pi, pi] onto (-pi/2, pi/2]
        if delta > 0.5 * PI {
            delta -= PI;
        } else if delta <= -0.5 * PI {
            delta += PI;
        }
        return Ok(delta);
    }
    Err(Error::Numerical(format!(
        "log-derivative matching failed after 5 shifts (l = {l}, k = {k})"
    )))
}

/// A continuous phase-shift branch on a geometric k-grid, unwrapped from
/// the high-energy end where the branch is pinned in (-pi/2, pi/2].
#[derive(Debug, Clone, Serialize)]
pub struct PhaseCurve {
    pub l: usize,
    pub k: Vec<f64>,
    pub delta: Vec<f64>,
    /// raw (mod pi) value at k_max; the high-energy pin assumes this is
    /// already the full phase
    pub delta_kmax: f64,
    /// |delta(k_max)| < 0.02, the high-energy asymptotic
    pub high_k_ok: bool,
}

/// Build the curve on n_k geometric points from 1e-3/R_supp up to k_max,
/// inserting midpoints (up to 3 rounds) where the unwrapped branch jumps
/// by more than pi/2.
pub fn phase_curve(p: &PotentialField, l: usize, k_max: f64, n_k: usize) -> Result<PhaseCurve> {
    p.require_radial()?;
    if n_k < 64 {
        return Err(Error::MalformedInput(format!(
            "phase curve needs at least 64 k-points, got {n_k}"
        )));
    }
    let support = p.support_ball().radius;
    let k_min = 1e-3 / support;
    if k_max <= k_min * 10.0 {
        return Err(Error::MalformedInput(format!(
            "k_max = {k_max} too small against k_min = {k_min}"
        )));
    }
    let ratio = k_max / k_min;
    let mut ks: Vec<f64> = (0..n_k)
        .map(|i| k_min * ratio.powf(i as f64 / (n_k - 1) as f64))
        .collect();

    for round in 0..=3 {
        let raw: Vec<f64> = ks
            .par_iter()
            .map(|&k| phase_shift(p, l, k))
            .collect::<Result<Vec<_>>>()?;
        let delta = unwrap_from_top(&raw);
        let mut inserts = Vec::new();
        for i in 0..delta.len() - 1 {
            if (delta[i + 1] - delta[i]).abs() > 0.45 * PI {
                inserts.push(0.5 * (ks[i] + ks[i + 1]));
            }
        }
        if inserts.is_empty() {
            let delta_kmax = *raw.last().unwrap();
            return Ok(PhaseCurve {
                l,
                k: ks,
                delta,
                delta_kmax,
                high_k_ok: delta_kmax.abs() < 0.02,
            });
        }
        if round == 3 {
            return Err(Error::Numerical(format!(
                "phase branch for l = {l} keeps jumping after 3 refinements (resonance too sharp)"
            )));
        }
        ks.extend(inserts);
        ks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    }
    unreachable!()
}

/// Add multiples of pi to each raw (mod pi) value, walking down from
/// k_max, so consecutive points stay within pi/2.
fn unwrap_from_top(raw: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; raw.len()];
    let last = raw.len() - 1;
    out[last] = raw[last];
    for i in (0..last).rev() {
        let shift = ((out[i + 1] - raw[i]) / PI).round();
        out[i] = raw[i] + PI * shift;
    }
    out
}

impl PhaseCurve {
    /// delta(0+), read at the lowest grid point k = 1e-3/R_supp.
    pub fn delta_zero(&self) -> f64 {
        self.delta[0]
    }
}
