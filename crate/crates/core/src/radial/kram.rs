//! Kram determinants: Wronskian-type determinants of regular radial
//! solutions across consecutive channels,
//!   D^m_l(r) = det [ phi_ch^(d)(r) ],  ch = m..l (rows), d = 0..l-m (cols),
//! their zero counts, and the alternating sum rule
//!   z(D^m_l) = sum_{k=0}^{l-m} (-1)^k N_{m+k}.
//!
//! Higher derivatives come from the closed ODE recursion
//! phi'' = (l(l+1)/r^2 + q) phi, never from repeated numerical
//! differentiation; table potentials inherit the interpolant's accuracy
//! in q' and q''.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::potentials::PotentialField;
use crate::radial::phi::bisect_zero;
use crate::radial::{integrate_regular, RadialSolution};

const RESONANCE_TAU: f64 = 1e-8;
/// |derivative| (relative) below which a refined zero counts as
/// tangential/degenerate rather than a transversal crossing.
const TANGENTIAL_TAU: f64 = 1e-8;

/// Regular solutions for a contiguous block of channels, the shared
/// engine behind determinants, sum rules, and sphere detection.
pub struct RadialChannels {
    potential: PotentialField,
    sols: Vec<RadialSolution>,
}

impl RadialChannels {
    pub fn new(p: &PotentialField, l_max: usize) -> Result<Self> {
        p.require_radial()?;
        let support = p.support_ball().radius;
        let sols = (0..=l_max)
            .map(|l| integrate_regular(p, l, 3.0 * support))
            .collect::<Result<Vec<_>>>()?;
        Ok(RadialChannels {
            potential: p.clone(),
            sols,
        })
    }

    pub fn potential(&self) -> &PotentialField {
        &self.potential
    }

    pub fn solution(&self, l: usize) -> &RadialSolution {
        &self.sols[l]
    }

    pub fn l_max(&self) -> usize {
        self.sols.len() - 1
    }

    /// Bound-state count of a channel (with the resonance guard).
    pub fn bound_states(&self, l: usize) -> Result<usize> {
        let sol = &self.sols[l];
        if sol.is_resonant(RESONANCE_TAU) {
            return Err(Error::ConventionViolated(format!(
                "channel l = {l}: vanishing outgoing slope (zero-energy state)"
            )));
        }
        Ok(sol.node_count())
    }

    /// phi_ch and its derivatives at r, orders 0..=d (d <= 4).
    fn phi_derivatives(&self, ch: usize, r: f64, d: usize) -> Result<Vec<f64>> {
        assert!(d <= 4, "derivative order limited to 4 (needs q'')");
        let sol = &self.sols[ch];
        let (phi, dphi) = sol.eval(r)?;
        let mut ders = vec![phi, dphi];
        if d >= 2 {
            let lf = ch as f64;
            let cent = lf * (lf + 1.0);
            let (q, q1, q2) = self.potential.derivatives_radial(r);
            let w = [
                cent / (r * r) + q,
                -2.0 * cent / (r * r * r) + q1,
                6.0 * cent / (r * r * r * r) + q2,
            ];
            // phi^(k+2) = sum_i C(k,i) w^(i) phi^(k-i)
            const BINOM: [[f64; 3]; 3] = [[1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [1.0, 2.0, 1.0]];
            for k in 0..=(d - 2) {
                let mut acc = 0.0;
                for i in 0..=k {
                    acc += BINOM[k][i] * w[i] * ders[k - i];
                }
                ders.push(acc);
            }
        }
        ders.truncate(d + 1);
        Ok(ders)
    }

    /// The Kram determinant D^m_l(r).
    pub fn kram_det(&self, m: usize, l: usize, r: f64) -> Result<f64> {
        if m > l || l > self.l_max() {
            return Err(Error::MalformedInput(format!(
                "kram determinant needs 0 <= m <= l <= {}, got m = {m}, l = {l}",
                self.l_max()
            )));
        }
        if !(r > 0.0) {
            return Err(Error::MalformedInput(format!("radius must be positive, got {r}")));
        }
        let size = l - m + 1;
        let mut mat = vec![0.0; size * size];
        for (row, ch) in (m..=l).enumerate() {
            let ders = self.phi_derivatives(ch, r, l - m)?;
            mat[row * size..(row + 1) * size].copy_from_slice(&ders);
        }
        Ok(small_det(&mut mat, size))
    }

    /// The determinant product d_l = D^0_l (D^1_l)^2 ... (D^l_l)^2 whose
    /// zeros mark the l-jet degeneration radii.
    pub fn jet_det_product(&self, l: usize, r: f64) -> Result<f64> {
        let mut acc = self.kram_det(0, l, r)?;
        for m in 1..=l {
            let f = self.kram_det(m, l, r)?;
            acc *= f * f;
        }
        Ok(acc)
    }

    /// Sampled D^m_l over the solution grid (decimated), for reports.
    pub fn kram_table(&self, m: usize, l: usize, n_samples: usize) -> Result<KramTable> {
        let sol = &self.sols[l];
        let r_lo = sol.r0().max(sol.dr() * 8.0);
        let r_hi = sol.r_max();
        let n = n_samples.max(16);
        let mut r_col = Vec::with_capacity(n);
        let mut v_col = Vec::with_capacity(n);
        for i in 0..n {
            let r = r_lo + (r_hi - r_lo) * i as f64 / (n - 1) as f64;
            r_col.push(r);
            v_col.push(self.kram_det(m, l, r)?);
        }
        Ok(KramTable {
            m,
            l,
            derivative_order: l - m,
            r: r_col,
            value: v_col,
        })
    }

    /// All transversal zeros of D^m_l on (0, infinity): dense sampling over
    /// the integration grid plus a geometric sweep of the analytic free
    /// tail out to 1000x the grid end. Tangential zeros are reported
    /// separately and not counted.
    pub fn kram_zeros(&self, m: usize, l: usize) -> Result<ZeroCount> {
        let sol = &self.sols[l];
        let r_lo = sol.r0().max(sol.dr() * 8.0);
        let r_hi = sol.r_max();
        let f = |r: f64| self.kram_det(m, l, r).expect("r within domain");

        let mut samples = Vec::new();
        let n_inner = 6000;
        for i in 0..=n_inner {
            let r = r_lo + (r_hi - r_lo) * i as f64 / n_inner as f64;
            samples.push((r, f(r)));
        }
        let n_tail = 400;
        let tail_factor: f64 = 1000.0;
        for i in 1..=n_tail {
            let r = r_hi * tail_factor.powf(i as f64 / n_tail as f64);
            samples.push((r, f(r)));
        }
        Ok(count_zeros_refined(&samples, &f))
    }
}

/// Determinant by Gaussian elimination with partial pivoting (matrices
/// here are at most 5x5).
fn small_det(mat: &mut [f64], n: usize) -> f64 {
    let mut det = 1.0;
    for col in 0..n {
        let mut piv = col;
        for row in col + 1..n {
            if mat[row * n + col].abs() > mat[piv * n + col].abs() {
                piv = row;
            }
        }
        if mat[piv * n + col] == 0.0 {
            return 0.0;
        }
        if piv != col {
            for k in 0..n {
                mat.swap(col * n + k, piv * n + k);
            }
            det = -det;
        }
        let d = mat[col * n + col];
        det *= d;
        for row in col + 1..n {
            let factor = mat[row * n + col] / d;
            for k in col..n {
                mat[row * n + k] -= factor * mat[col * n + k];
            }
        }
    }
    det
}

/// Sampled values of one Kram determinant.
#[derive(Debug, Clone, Serialize)]
pub struct KramTable {
    pub m: usize,
    pub l: usize,
    pub derivative_order: usize,
    pub r: Vec<f64>,
    pub value: Vec<f64>,
}

/// Transversal crossings and separately reported tangential touches.
#[derive(Debug, Clone, Default, Serialize)]
pub struct ZeroCount {
    pub crossings: Vec<f64>,
    pub tangential: Vec<f64>,
}

impl ZeroCount {
    pub fn count(&self) -> usize {
        self.crossings.len()
    }
}

/// Count sign changes on a sampled curve; each crossing is located by
/// linear interpolation. Near-zero local extrema that do not change sign
/// are reported as tangential.
pub fn zero_count(samples: &[(f64, f64)]) -> ZeroCount {
    count_zeros_impl(samples, None::<&fn(f64) -> f64>)
}

fn count_zeros_refined(samples: &[(f64, f64)], f: &impl Fn(f64) -> f64) -> ZeroCount {
    count_zeros_impl(samples, Some(f))
}

fn count_zeros_impl(
    samples: &[(f64, f64)],
    refine: Option<&impl Fn(f64) -> f64>,
) -> ZeroCount {
    let mut out = ZeroCount::default();
    if samples.len() < 2 {
        return out;
    }
    // local scale: running maximum of |v| over a window, so crossings in
    // regions where the curve is naturally small are still transversal
    let scale = samples.iter().fold(0.0f64, |m, &(_, v)| m.max(v.abs()));
    if scale == 0.0 {
        return out;
    }
    let char_len = samples.last().unwrap().0 - samples[0].0;
    for i in 0..samples.len() - 1 {
        let (ra, va) = samples[i];
        let (rb, vb) = samples[i + 1];
        if va == 0.0 {
            continue;
        }
        if va * vb < 0.0 || (vb == 0.0 && va != 0.0) {
            let z = match refine {
                Some(f) => bisect_zero(f, ra, rb),
                None => ra + (rb - ra) * va / (va - vb),
            };
            // transversality: slope at the crossing against the local
            // sample magnitudes
            let local = va.abs().max(vb.abs());
            let slope = (vb - va).abs() / (rb - ra);
            if local > 0.0 && slope > TANGENTIAL_TAU * local / char_len {
                out.crossings.push(z);
            } else {
                out.tangential.push(z);
            }
        } else if i > 0 {
            // touch: a near-zero local minimum of |v| without a sign change
            let (_, vp) = samples[i - 1];
            if va.abs() < 1e-12 * scale
                && vp * vb > 0.0
                && va.abs() < vp.abs()
                && va.abs() < vb.abs()
            {
                out.tangential.push(ra);
            }
        }
    }
    out
}

/// Convenience one-shot determinant evaluation.
pub fn kram_det(p: &PotentialField, m: usize, l: usize, r: f64) -> Result<f64> {
    RadialChannels::new(p, l)?.kram_det(m, l, r)
}

/// Convenience one-shot product evaluation.
pub fn jet_det_product(p: &PotentialField, l: usize, r: f64) -> Result<f64> {
    RadialChannels::new(p, l)?.jet_det_product(l, r)
}

/// The sum-rule report: measured zero count of D^m_l against the
/// alternating sum of channel bound-state counts, exact integer equality.
#[derive(Debug, Clone, Serialize)]
pub struct SumRuleReport {
    pub m: usize,
    pub l: usize,
    pub z_measured: usize,
    pub z_predicted: i64,
    pub pass: bool,
    pub counts: Vec<usize>,
    pub crossings: Vec<f64>,
}

pub fn verify_sum_rule(p: &PotentialField, m: usize, l: usize) -> Result<SumRuleReport> {
    let channels = RadialChannels::new(p, l)?;
    verify_sum_rule_with(&channels, m, l)
}

pub(crate) fn verify_sum_rule_with(
    channels: &RadialChannels,
    m: usize,
    l: usize,
) -> Result<SumRuleReport> {
    let zeros = channels.kram_zeros(m, l)?;
    if !zeros.tangential.is_empty() {
        return Err(Error::ConventionViolated(format!(
            "tangential zero of D^{m}_{l} near r = {:.6}; degenerate case outside the sum rule",
            zeros.tangential[0]
        )));
    }
    let counts = (m..=l)
        .map(|ch| channels.bound_states(ch))
        .collect::<Result<Vec<_>>>()?;
    let z_predicted: i64 = counts
        .iter()
        .enumerate()
        .map(|(k, &n)| if k % 2 == 0 { n as i64 } else { -(n as i64) })
        .sum();
    let z_measured = zeros.count();
    Ok(SumRuleReport {
        m,
        l,
        z_measured,
        z_predicted,
        pass: z_measured as i64 == z_predicted,
        counts,
        crossings: zeros.crossings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::RadialProfile;
    use approx::assert_relative_eq;

    fn zero_potential() -> PotentialField {
        PotentialField::radial(RadialProfile::gaussian(-4.0, 0.18).unwrap())
            .with_coupling(0.0)
            .unwrap()
    }

    #[test]
    fn free_kram_0_1_is_r_squared() {
        let ch = RadialChannels::new(&zero_potential(), 1).unwrap();
        for &r in &[0.5, 1.0, 2.0] {
            assert_relative_eq!(ch.kram_det(0, 1, r).unwrap(), r * r, max_relative = 1e-7);
        }
    }

    #[test]
    fn free_kram_0_2_is_two_r_cubed() {
        let ch = RadialChannels::new(&zero_potential(), 2).unwrap();
        for &r in &[0.5, 1.0, 2.0] {
            assert_relative_eq!(
                ch.kram_det(0, 2, r).unwrap(),
                2.0 * r * r * r,
                max_relative = 1e-7
            );
        }
    }

    #[test]
    fn kram_diagonal_is_phi_itself() {
        let p = PotentialField::radial(RadialProfile::gaussian(-8.0, 1.0).unwrap());
        let ch = RadialChannels::new(&p, 4).unwrap();
        for l in 0..=4 {
            let r = 1.3;
            let (phi, _) = ch.solution(l).eval(r).unwrap();
            assert_relative_eq!(ch.kram_det(l, l, r).unwrap(), phi, max_relative = 1e-12);
        }
    }

    #[test]
    fn free_jet_det_product_l2() {
        // symbolic expansion: D^0_2 = 2 r^3, D^1_2 = r^4, D^2_2 = r^3,
        // so the product is 2 r^3 (r^4)^2 (r^3)^2 = 2 r^17, positive on
        // (0, infinity)
        let ch = RadialChannels::new(&zero_potential(), 2).unwrap();
        assert_relative_eq!(ch.kram_det(1, 2, 1.3).unwrap(), 1.3f64.powi(4), max_relative = 1e-7);
        for &r in &[0.7, 1.0, 1.5] {
            let d = ch.jet_det_product(2, r).unwrap();
            assert_relative_eq!(d, 2.0 * r.powi(17), max_relative = 1e-6);
            assert!(d > 0.0);
        }
    }

    #[test]
    fn zero_count_examples() {
        let r2: Vec<(f64, f64)> = (1..=1000)
            .map(|i| {
                let r = 10.0 * i as f64 / 1000.0;
                (r, r * r)
            })
            .collect();
        assert_eq!(zero_count(&r2).count(), 0);

        let sinr: Vec<(f64, f64)> = (1..=1000)
            .map(|i| {
                let r = 10.0 * i as f64 / 1000.0;
                (r, r.sin())
            })
            .collect();
        assert_eq!(zero_count(&sinr).count(), 3);
    }

    #[test]
    fn free_sum_rule_all_zero() {
        let p = zero_potential();
        for l in 0..=2usize {
            for m in 0..=l {
                let rep = verify_sum_rule(&p, m, l).unwrap();
                assert_eq!(rep.z_measured, 0, "D^{m}_{l}");
                assert_eq!(rep.z_predicted, 0);
                assert!(rep.pass);
            }
        }
    }

    #[test]
    fn depth8_kram_zero_location() {
        // one s-state, no p/d states: D^0_2 has a single zero near 5.06
        let p = PotentialField::radial(RadialProfile::gaussian(-8.0, 1.0).unwrap());
        let ch = RadialChannels::new(&p, 2).unwrap();
        let zeros = ch.kram_zeros(0, 2).unwrap();
        assert_eq!(zeros.count(), 1);
        assert_relative_eq!(zeros.crossings[0], 5.0556, max_relative = 2e-3);
        assert!(ch.kram_zeros(1, 2).unwrap().count() == 0);
        assert!(ch.kram_zeros(2, 2).unwrap().count() == 0);
    }
}
