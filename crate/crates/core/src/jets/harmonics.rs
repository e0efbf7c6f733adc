//! Real solid harmonic polynomials in monomial form, degree-graded.
//!
//! Degrees 0..2 use the canonical nine:
//!   1;  y1, y2, y3;  y1 y2, y2 y3, y1 y3, y1^2 - y2^2, y1^2 + y2^2 - 2 y3^2.
//! Higher degrees come from the integer-coefficient recurrence
//!   Q^m_l = (2l-1) z Q^m_{l-1} - (l+m-1)(l-m-1) r^2 Q^m_{l-2}
//! seeded with the sectoral pair Re/Im (x + i y)^m, so every coefficient
//! stays an exact small integer and the symbolic Laplacian cancels to
//! exactly zero.

use crate::error::{Error, Result};
use crate::poly::Polynomial3;

pub const DEGREE_MAX: usize = 6;

/// (L+1)^2 harmonic polynomials of degree <= L, graded by degree.
#[derive(Debug, Clone)]
pub struct HarmonicBasis {
    pub degree: usize,
    members: Vec<Polynomial3>,
}

impl HarmonicBasis {
    pub fn members(&self) -> &[Polynomial3] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

pub fn solid_harmonics(degree: usize) -> Result<HarmonicBasis> {
    if degree > DEGREE_MAX {
        return Err(Error::MalformedInput(format!(
            "harmonic basis degree {degree} beyond the supported {DEGREE_MAX}"
        )));
    }
    let mut members = Vec::with_capacity((degree + 1) * (degree + 1));
    for l in 0..=degree {
        members.extend(degree_block(l));
    }
    debug_assert_eq!(members.len(), (degree + 1) * (degree + 1));
    Ok(HarmonicBasis { degree, members })
}

fn degree_block(l: usize) -> Vec<Polynomial3> {
    match l {
        0 => vec![Polynomial3::constant(1.0)],
        1 => vec![
            Polynomial3::monomial((1, 0, 0), 1.0),
            Polynomial3::monomial((0, 1, 0), 1.0),
            Polynomial3::monomial((0, 0, 1), 1.0),
        ],
        2 => vec![
            Polynomial3::monomial((1, 1, 0), 1.0),
            Polynomial3::monomial((0, 1, 1), 1.0),
            Polynomial3::monomial((1, 0, 1), 1.0),
            Polynomial3::from_terms(&[((2, 0, 0), 1.0), ((0, 2, 0), -1.0)]),
            Polynomial3::from_terms(&[((2, 0, 0), 1.0), ((0, 2, 0), 1.0), ((0, 0, 2), -2.0)]),
        ],
        _ => {
            let mut block = Vec::with_capacity(2 * l + 1);
            block.push(recurrence(l, 0, Sector::Cos));
            for m in 1..=l {
                block.push(recurrence(l, m, Sector::Cos));
                block.push(recurrence(l, m, Sector::Sin));
            }
            block
        }
    }
}

#[derive(Clone, Copy)]
enum Sector {
    Cos,
    Sin,
}

/// Sectoral seeds: Re (x+iy)^m and Im (x+iy)^m.
fn sectoral(m: usize, sector: Sector) -> Polynomial3 {
    let mut re = Polynomial3::constant(1.0);
    let mut im = Polynomial3::zero();
    let x = Polynomial3::monomial((1, 0, 0), 1.0);
    let y = Polynomial3::monomial((0, 1, 0), 1.0);
    for _ in 0..m {
        // (re + i im)(x + i y)
        let mut new_re = re.mul(&x);
        new_re.add_scaled(&im.mul(&y), -1.0);
        let mut new_im = re.mul(&y);
        new_im.add_scaled(&im.mul(&x), 1.0);
        re = new_re;
        im = new_im;
    }
    match sector {
        Sector::Cos => re,
        Sector::Sin => im,
    }
}

fn recurrence(l: usize, m: usize, sector: Sector) -> Polynomial3 {
    let z = Polynomial3::monomial((0, 0, 1), 1.0);
    let mut prev2 = sectoral(m, sector); // Q^m_m
    if l == m {
        return prev2;
    }
    let mut prev1 = z.mul(&prev2).scaled(2.0 * m as f64 + 1.0); // Q^m_{m+1}
    if l == m + 1 {
        return prev1;
    }
    for ll in (m + 2)..=l {
        let lf = ll as f64;
        let mf = m as f64;
        let mut next = z.mul(&prev1).scaled(2.0 * lf - 1.0);
        next.add_scaled(&prev2.mul_r2(), -(lf + mf - 1.0) * (lf - mf - 1.0));
        prev2 = prev1;
        prev1 = next;
    }
    prev1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match_degree() {
        for degree in 0..=6 {
            let basis = solid_harmonics(degree).unwrap();
            assert_eq!(basis.len(), (degree + 1) * (degree + 1));
        }
        assert!(solid_harmonics(7).is_err());
    }

    #[test]
    fn degree_zero_is_the_constant() {
        let basis = solid_harmonics(0).unwrap();
        assert_eq!(basis.members()[0], Polynomial3::constant(1.0));
    }

    #[test]
    fn degree_two_is_the_canonical_nine() {
        let basis = solid_harmonics(2).unwrap();
        let m = basis.members();
        assert_eq!(m.len(), 9);
        let p = [0.7, -1.3, 0.4];
        let expect = [
            1.0,
            p[0],
            p[1],
            p[2],
            p[0] * p[1],
            p[1] * p[2],
            p[0] * p[2],
            p[0] * p[0] - p[1] * p[1],
            p[0] * p[0] + p[1] * p[1] - 2.0 * p[2] * p[2],
        ];
        for (member, want) in m.iter().zip(expect) {
            assert_eq!(member.eval(p), want);
        }
    }

    #[test]
    fn all_members_exactly_harmonic() {
        for degree in 0..=6 {
            let basis = solid_harmonics(degree).unwrap();
            for (i, member) in basis.members().iter().enumerate() {
                assert!(
                    member.laplacian().is_zero(),
                    "degree {degree}, member {i} not harmonic"
                );
                assert!(!member.is_zero());
            }
        }
    }

    #[test]
    fn members_degree_graded() {
        let basis = solid_harmonics(3).unwrap();
        let degrees: Vec<u32> = basis.members().iter().map(|p| p.degree()).collect();
        assert_eq!(degrees[0], 0);
        assert_eq!(&degrees[1..4], &[1, 1, 1]);
        assert_eq!(&degrees[4..9], &[2; 5]);
        assert_eq!(&degrees[9..16], &[3; 7]);
    }
}
