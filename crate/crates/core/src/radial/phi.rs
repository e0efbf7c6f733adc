//! The zero-energy distorted wave for radial potentials:
//! Phi(r) = phi_0(r) / (A r), normalized so Phi -> 1 at infinity. Its
//! zeros are the first-order s-sphere radii.

use crate::error::{Error, Result};
use crate::potentials::PotentialField;
use crate::radial::{integrate_regular, RadialSolution};

const RESONANCE_TAU: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct RadialPhi {
    sol: RadialSolution,
}

/// Build Phi from the regular s-wave solution. A vanishing asymptotic
/// slope A means a zero-energy state and violates the convention.
pub fn radial_phi(p: &PotentialField) -> Result<RadialPhi> {
    let support = p.support_ball().radius;
    let sol = integrate_regular(p, 0, 3.0 * support)?;
    if sol.is_resonant(RESONANCE_TAU) {
        return Err(Error::ConventionViolated(
            "asymptotic slope A of the s-wave solution vanishes (zero-energy state)".into(),
        ));
    }
    Ok(RadialPhi { sol })
}

impl RadialPhi {
    pub fn solution(&self) -> &RadialSolution {
        &self.sol
    }

    /// Asymptotic slope A in the series normalization; the convention
    /// proxy |A| -> 0 exactly at the critical coupling.
    pub fn slope(&self) -> f64 {
        self.sol.tail_unscaled().0
    }

    /// Intercept B of the affine tail A r + B.
    pub fn intercept(&self) -> f64 {
        self.sol.tail_unscaled().1
    }

    pub fn eval(&self, r: f64) -> f64 {
        let a = self.sol.tail().0;
        if r < self.sol.r0() {
            // phi ~ r near the origin, so Phi extends continuously
            let (phi, _) = self.sol.eval(self.sol.r0()).expect("r0 on grid");
            return phi / (a * self.sol.r0());
        }
        let (phi, _) = self.sol.eval(r).expect("above series start");
        phi / (a * r)
    }

    /// Zeros of Phi on (0, infinity): the zeros of phi_0, bisection-refined
    /// to 1e-9, plus the analytic tail zero if it lies past the grid.
    pub fn zeros(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let phi = self.sol.phi_values();
        let r0 = self.sol.r0();
        let dr = self.sol.dr();
        for i in 0..phi.len() - 1 {
            if phi[i] == 0.0 {
                continue;
            }
            if phi[i] * phi[i + 1] < 0.0 || (phi[i + 1] == 0.0 && phi[i] != 0.0) {
                let a = r0 + i as f64 * dr;
                let b = a + dr;
                out.push(bisect_zero(|r| self.sol.eval(r).unwrap().0, a, b));
            }
        }
        if let Some(rz) = self.sol.tail_zero() {
            if rz > self.sol.r_max() {
                out.push(rz);
            }
        }
        out
    }
}

/// Bisection to interval width 1e-9 (scaled by the radius magnitude).
pub(crate) fn bisect_zero(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    if fa == 0.0 {
        return a;
    }
    for _ in 0..200 {
        if (b - a).abs() <= 1e-9 * b.abs().max(1.0) {
            break;
        }
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fa * fm < 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    0.5 * (a + b)
}

/// Critical coupling of `alpha q`: the smallest alpha in (lo, hi) where
/// the s-wave asymptotic slope changes sign. The bracket must straddle
/// exactly one sign change.
pub fn critical_coupling(p: &PotentialField, mut lo: f64, mut hi: f64) -> Result<f64> {
    p.require_radial()?;
    let slope = |alpha: f64| -> Result<f64> {
        let scaled = p.with_coupling(alpha)?;
        let support = scaled.support_ball().radius;
        let sol = integrate_regular(&scaled, 0, 3.0 * support)?;
        Ok(sol.tail_unscaled().0)
    };
    let mut f_lo = slope(lo)?;
    let f_hi = slope(hi)?;
    if f_lo * f_hi >= 0.0 {
        return Err(Error::Numerical(format!(
            "slope has the same sign at alpha = {lo} and {hi}; no critical coupling bracketed"
        )));
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        let f_mid = slope(mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_lo * f_mid < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            f_lo = f_mid;
        }
        if (hi - lo) <= 1e-12 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::RadialProfile;
    use approx::assert_relative_eq;

    #[test]
    fn free_phi_is_one() {
        let p = PotentialField::radial(RadialProfile::gaussian(-4.0, 0.18).unwrap())
            .with_coupling(0.0)
            .unwrap();
        let phi = radial_phi(&p).unwrap();
        for &r in &[0.1, 0.5, 1.0, 2.0, 10.0] {
            assert_relative_eq!(phi.eval(r), 1.0, max_relative = 1e-8);
        }
        assert!(phi.zeros().is_empty());
    }

    #[test]
    fn supercritical_gaussian_has_one_phi_zero() {
        let p = PotentialField::radial(RadialProfile::gaussian(-8.0, 1.0).unwrap());
        let phi = radial_phi(&p).unwrap();
        let zeros = phi.zeros();
        assert_eq!(zeros.len(), 1);
        // slope is negative past critical, and Phi -> 1 at infinity
        assert!(phi.slope() < 0.0);
        // the tail is 1 + beta/r with beta = -1.398, so go far out
        assert_relative_eq!(phi.eval(1000.0), 1.0, max_relative = 2e-3);
        assert!(phi.eval(zeros[0] + 1e-4) * phi.eval(zeros[0] - 1e-4) < 0.0);
    }

    #[test]
    fn critical_coupling_of_unit_gaussian() {
        // depth -1 gaussian: first s-wave threshold near alpha = 2.684
        let p = PotentialField::radial(RadialProfile::gaussian(-1.0, 1.0).unwrap());
        let ac = critical_coupling(&p, 2.0, 3.5).unwrap();
        assert_relative_eq!(ac, 2.684005, max_relative = 1e-4);
        // slope signs straddle the threshold
        let below = radial_phi(&p.with_coupling(0.9 * ac).unwrap()).unwrap();
        let above = radial_phi(&p.with_coupling(1.1 * ac).unwrap()).unwrap();
        assert!(below.slope() > 0.0);
        assert!(above.slope() < 0.0);
    }
}
