//! s-sphere radii for radially symmetric potentials. Order 1 uses the
//! zeros of Phi; order m >= 2 uses the determinant product d_{2m-2}. The
//! product's squared factors touch zero without changing sign, so the
//! radii are bracketed factor by factor and merged.

use serde::Serialize;

use crate::error::Result;
use crate::potentials::PotentialField;
use crate::radial::kram::RadialChannels;
use crate::radial::{radial_phi, ZeroCount};

/// One sphere radius with the diagnostic that produced it: `factor_m` is
/// the Kram index for m >= 2 detections, None when it came from Phi.
#[derive(Debug, Clone, Serialize)]
pub struct SphereRadius {
    pub radius: f64,
    pub factor_m: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SSphereReport {
    pub order: usize,
    pub radii: Vec<SphereRadius>,
    /// diagnostic curve: (r, Phi(r)) for m = 1, (r, d_{2m-2}(r)) for m >= 2
    pub diagnostic: Vec<(f64, f64)>,
}

pub fn find_s_spheres(p: &PotentialField, m: usize) -> Result<SSphereReport> {
    p.require_radial()?;
    if m == 0 {
        return Err(crate::error::Error::MalformedInput(
            "sphere order must be at least 1".into(),
        ));
    }
    if m == 1 {
        let phi = radial_phi(p)?;
        let radii = phi
            .zeros()
            .into_iter()
            .map(|radius| SphereRadius {
                radius,
                factor_m: None,
            })
            .collect();
        let r_max = phi.solution().r_max();
        let n = 1200;
        let diagnostic = (1..=n)
            .map(|i| {
                let r = r_max * i as f64 / n as f64;
                (r, phi.eval(r))
            })
            .collect();
        return Ok(SSphereReport {
            order: 1,
            radii,
            diagnostic,
        });
    }

    let l = 2 * m - 2;
    let channels = RadialChannels::new(p, l)?;
    for ch in 0..=l {
        channels.bound_states(ch)?; // resonance guard per channel
    }
    let mut radii: Vec<SphereRadius> = Vec::new();
    for factor in 0..=l {
        let zeros: ZeroCount = channels.kram_zeros(factor, l)?;
        for z in zeros.crossings {
            radii.push(SphereRadius {
                radius: z,
                factor_m: Some(factor),
            });
        }
    }
    radii.sort_by(|a, b| a.radius.partial_cmp(&b.radius).unwrap());
    // merge coincident detections from different factors
    radii.dedup_by(|a, b| (a.radius - b.radius).abs() < 1e-6 * b.radius.max(1.0));

    let r_max = channels.solution(l).r_max();
    let n = 1200;
    let r0 = channels.solution(l).r0() * 16.0;
    let diagnostic = (0..=n)
        .map(|i| {
            let r = r0 + (r_max - r0) * i as f64 / n as f64;
            (r, channels.jet_det_product(l, r).expect("inside domain"))
        })
        .collect();

    Ok(SSphereReport {
        order: m,
        radii,
        diagnostic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::RadialProfile;
    use approx::assert_relative_eq;

    #[test]
    fn subcritical_has_no_spheres() {
        let p = PotentialField::radial(RadialProfile::gaussian(-1.0, 1.0).unwrap());
        for m in 1..=2 {
            let rep = find_s_spheres(&p, m).unwrap();
            assert!(rep.radii.is_empty(), "order {m}: {:?}", rep.radii);
        }
    }

    #[test]
    fn depth8_sphere_radii() {
        let p = PotentialField::radial(RadialProfile::gaussian(-8.0, 1.0).unwrap());
        let m1 = find_s_spheres(&p, 1).unwrap();
        assert_eq!(m1.radii.len(), 1);
        assert_relative_eq!(m1.radii[0].radius, 1.39846, max_relative = 1e-3);

        let m2 = find_s_spheres(&p, 2).unwrap();
        assert_eq!(m2.radii.len(), 1);
        assert_relative_eq!(m2.radii[0].radius, 5.0556, max_relative = 2e-3);
        assert_eq!(m2.radii[0].factor_m, Some(0));
    }

    #[test]
    fn radii_sorted_and_positive() {
        let p = PotentialField::radial(RadialProfile::gaussian(-19.0, 1.0).unwrap());
        let rep = find_s_spheres(&p, 1).unwrap();
        assert!(!rep.radii.is_empty());
        for w in rep.radii.windows(2) {
            assert!(w[0].radius < w[1].radius);
        }
        for r in &rep.radii {
            assert!(r.radius > 0.0);
        }
    }
}
