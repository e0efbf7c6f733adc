//! Per-channel Levinson checks: delta_l(0+) - delta_l(inf) = pi N_l, and
//! the total S-matrix index as the full multiplicity of the discrete
//! spectrum, sum over channels of (2l+1) N_l.

use serde::Serialize;

use crate::error::Result;
use crate::potentials::PotentialField;
use crate::radial::ChannelCounts;
use crate::scattering::{phase_curve, PhaseCurve};

use std::f64::consts::PI;

pub const DEFECT_TOL: f64 = 0.02 * PI;

#[derive(Debug, Clone, Serialize)]
pub struct ChannelLevinson {
    pub l: usize,
    pub n_l: usize,
    pub delta_zero: f64,
    /// |delta(0+) - pi N_l|
    pub defect: f64,
    pub defect_tol: f64,
    pub pass: bool,
    pub high_k_ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct LevinsonReport {
    pub channels: Vec<ChannelLevinson>,
    /// sum of (2l+1) N_l: the index of the S-matrix
    pub total_index: usize,
    /// the same read off the phase curves, sum of (2l+1) round(delta0/pi)
    pub phase_index: i64,
    pub k_max: f64,
    pub n_k: usize,
}

/// Check Levinson's relation for channels 0..=l_max. When no k_max is
/// given, the high-energy end of the grid is sized from the potential
/// strength so the pinned branch at k_max really is the small full phase.
pub fn levinson_check(p: &PotentialField, l_max: usize) -> Result<LevinsonReport> {
    levinson_check_with_curves(p, l_max, None, 256).map(|(report, _)| report)
}

pub fn levinson_check_with_curves(
    p: &PotentialField,
    l_max: usize,
    k_max: Option<f64>,
    n_k: usize,
) -> Result<(LevinsonReport, Vec<PhaseCurve>)> {
    let k_max = k_max.unwrap_or_else(|| suggested_k_max(p));
    let counts = ChannelCounts::compute(p, l_max)?;
    let mut channels = Vec::with_capacity(l_max + 1);
    let mut curves = Vec::with_capacity(l_max + 1);
    let mut phase_index = 0i64;
    for l in 0..=l_max {
        let curve: PhaseCurve = phase_curve(p, l, k_max, n_k)?;
        let delta_zero = curve.delta_zero();
        let n_l = counts.n_l[l];
        let defect = (delta_zero - PI * n_l as f64).abs();
        phase_index += (2 * l as i64 + 1) * (delta_zero / PI).round() as i64;
        channels.push(ChannelLevinson {
            l,
            n_l,
            delta_zero,
            defect,
            defect_tol: DEFECT_TOL,
            pass: defect <= DEFECT_TOL,
            high_k_ok: curve.high_k_ok,
        });
        curves.push(curve);
    }
    Ok((
        LevinsonReport {
            channels,
            total_index: counts.total_index(),
            phase_index,
            k_max,
            n_k,
        },
        curves,
    ))
}

/// k_max large enough that the Born tail |delta_0| ~ |int q dr| / (2k)
/// is already inside the 0.02 pin window, with the 40/R floor.
pub fn suggested_k_max(p: &PotentialField) -> f64 {
    let support = p.support_ball().radius;
    let strength = p.radial_line_integral().abs();
    (40.0 / support).max(25.0 * strength).max(10.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::RadialProfile;
    use approx::assert_abs_diff_eq;

    #[test]
    fn free_levinson_is_trivial() {
        let p = PotentialField::radial(RadialProfile::gaussian(-4.0, 0.18).unwrap())
            .with_coupling(0.0)
            .unwrap();
        let rep = levinson_check(&p, 2).unwrap();
        assert_eq!(rep.total_index, 0);
        assert_eq!(rep.phase_index, 0);
        for ch in &rep.channels {
            assert_abs_diff_eq!(ch.delta_zero, 0.0, epsilon = 1e-8);
            assert!(ch.defect < DEFECT_TOL);
            assert!(ch.high_k_ok);
        }
    }

    #[test]
    fn single_bound_state_gaussian() {
        let p = PotentialField::radial(RadialProfile::gaussian(-8.0, 1.0).unwrap());
        let rep = levinson_check(&p, 1).unwrap();
        assert_eq!(rep.channels[0].n_l, 1);
        assert!(
            rep.channels[0].defect <= DEFECT_TOL,
            "defect {} vs {}",
            rep.channels[0].defect,
            DEFECT_TOL
        );
        assert_eq!(rep.channels[1].n_l, 0);
        assert!(rep.channels[1].defect <= DEFECT_TOL);
        assert_eq!(rep.total_index, 1);
        assert_eq!(rep.phase_index, 1);
    }
}
