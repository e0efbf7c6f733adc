//! Bound-state counts per angular channel by Sturm oscillation: under the
//! no-zero-energy-state convention, the number of negative eigenvalues of
//! the channel operator equals the number of zeros of the zero-energy
//! regular solution.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::potentials::PotentialField;
use crate::radial::integrate_regular;

const RESONANCE_TAU: f64 = 1e-8;

/// N_l for l = 0..=l_max.
#[derive(Debug, Clone, Serialize)]
pub struct ChannelCounts {
    pub n_l: Vec<usize>,
}

impl ChannelCounts {
    pub fn compute(p: &PotentialField, l_max: usize) -> Result<Self> {
        let n_l = (0..=l_max)
            .map(|l| count_bound_states(p, l))
            .collect::<Result<Vec<_>>>()?;
        Ok(ChannelCounts { n_l })
    }

    /// Total multiplicity counting the (2l+1) degeneracy of each channel.
    pub fn total_index(&self) -> usize {
        self.n_l
            .iter()
            .enumerate()
            .map(|(l, &n)| (2 * l + 1) * n)
            .sum()
    }
}

/// Number of negative eigenvalues of the partial operator
/// -d^2/dr^2 + l(l+1)/r^2 + q on the half line.
pub fn count_bound_states(p: &PotentialField, l: usize) -> Result<usize> {
    let support = p.support_ball().radius;
    let sol = integrate_regular(p, l, 3.0 * support)?;
    if sol.is_resonant(RESONANCE_TAU) {
        return Err(Error::ConventionViolated(format!(
            "channel l = {l}: vanishing outgoing slope (zero-energy state); counts undefined"
        )));
    }
    Ok(sol.node_count())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::RadialProfile;

    #[test]
    fn free_potential_has_no_bound_states() {
        let p = PotentialField::radial(RadialProfile::gaussian(-4.0, 0.18).unwrap())
            .with_coupling(0.0)
            .unwrap();
        for l in 0..3 {
            assert_eq!(count_bound_states(&p, l).unwrap(), 0);
        }
    }

    #[test]
    fn gaussian_depth8_has_single_s_state() {
        let p = PotentialField::radial(RadialProfile::gaussian(-8.0, 1.0).unwrap());
        let counts = ChannelCounts::compute(&p, 2).unwrap();
        assert_eq!(counts.n_l, vec![1, 0, 0]);
        assert_eq!(counts.total_index(), 1);
    }

    #[test]
    fn counts_non_increasing_in_l() {
        let p = PotentialField::radial(RadialProfile::gaussian(-19.0, 1.0).unwrap());
        let counts = ChannelCounts::compute(&p, 3).unwrap();
        for w in counts.n_l.windows(2) {
            assert!(w[0] >= w[1], "counts must not increase with l: {:?}", counts.n_l);
        }
        assert_eq!(counts.n_l[..3], [2, 1, 0]);
        assert_eq!(counts.total_index(), 5);
    }
}
