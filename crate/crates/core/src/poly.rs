//! Trivariate polynomials stored as sparse monomial coefficient tables.
//!
//! Coefficients of the harmonic bases generated here are small integers
//! (or simple rationals), so all algebra below is exact in `f64`; in
//! particular the symbolic Laplacian of a harmonic member cancels to
//! exactly zero.

use std::collections::BTreeMap;

use crate::geom::Point3;

/// Monomial exponents (i, j, k) for x^i y^j z^k.
pub type Exponents = (u8, u8, u8);

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polynomial3 {
    terms: BTreeMap<Exponents, f64>,
}

impl Polynomial3 {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        let mut p = Self::zero();
        p.add_term((0, 0, 0), c);
        p
    }

    pub fn monomial(e: Exponents, c: f64) -> Self {
        let mut p = Self::zero();
        p.add_term(e, c);
        p
    }

    pub fn from_terms(terms: &[(Exponents, f64)]) -> Self {
        let mut p = Self::zero();
        for &(e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn add_term(&mut self, e: Exponents, c: f64) {
        if c == 0.0 {
            return;
        }
        let v = self.terms.entry(e).or_insert(0.0);
        *v += c;
        if *v == 0.0 {
            self.terms.remove(&e);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &f64)> {
        self.terms.iter()
    }

    pub fn degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|&(i, j, k)| i as u32 + j as u32 + k as u32)
            .max()
            .unwrap_or(0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn eval(&self, x: Point3) -> f64 {
        let mut acc = 0.0;
        for (&(i, j, k), &c) in &self.terms {
            acc += c * x[0].powi(i as i32) * x[1].powi(j as i32) * x[2].powi(k as i32);
        }
        acc
    }

    pub fn add_scaled(&mut self, other: &Polynomial3, s: f64) {
        for (&e, &c) in &other.terms {
            self.add_term(e, c * s);
        }
    }

    pub fn scaled(&self, s: f64) -> Polynomial3 {
        let mut p = Polynomial3::zero();
        p.add_scaled(self, s);
        p
    }

    pub fn mul(&self, other: &Polynomial3) -> Polynomial3 {
        let mut p = Polynomial3::zero();
        for (&(i1, j1, k1), &c1) in &self.terms {
            for (&(i2, j2, k2), &c2) in &other.terms {
                p.add_term((i1 + i2, j1 + j2, k1 + k2), c1 * c2);
            }
        }
        p
    }

    /// Partial derivative along `axis` (0 = x, 1 = y, 2 = z).
    pub fn dpartial(&self, axis: usize) -> Polynomial3 {
        let mut p = Polynomial3::zero();
        for (&(i, j, k), &c) in &self.terms {
            let e = [i, j, k];
            if e[axis] == 0 {
                continue;
            }
            let mut d = e;
            d[axis] -= 1;
            p.add_term((d[0], d[1], d[2]), c * e[axis] as f64);
        }
        p
    }

    /// Mixed derivative D^(jx,jy,jz).
    pub fn derivative(&self, jx: u8, jy: u8, jz: u8) -> Polynomial3 {
        let mut p = self.clone();
        for _ in 0..jx {
            p = p.dpartial(0);
        }
        for _ in 0..jy {
            p = p.dpartial(1);
        }
        for _ in 0..jz {
            p = p.dpartial(2);
        }
        p
    }

    pub fn laplacian(&self) -> Polynomial3 {
        let mut p = self.derivative(2, 0, 0);
        p.add_scaled(&self.derivative(0, 2, 0), 1.0);
        p.add_scaled(&self.derivative(0, 0, 2), 1.0);
        p
    }

    /// Multiplication by r^2 = x^2 + y^2 + z^2.
    pub fn mul_r2(&self) -> Polynomial3 {
        let r2 = Polynomial3::from_terms(&[((2, 0, 0), 1.0), ((0, 2, 0), 1.0), ((0, 0, 2), 1.0)]);
        self.mul(&r2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laplacian_of_harmonic_quadratic_is_zero() {
        // x^2 - y^2 and x^2 + y^2 - 2 z^2
        let p = Polynomial3::from_terms(&[((2, 0, 0), 1.0), ((0, 2, 0), -1.0)]);
        assert!(p.laplacian().is_zero());
        let p = Polynomial3::from_terms(&[((2, 0, 0), 1.0), ((0, 2, 0), 1.0), ((0, 0, 2), -2.0)]);
        assert!(p.laplacian().is_zero());
    }

    #[test]
    fn eval_and_derivative() {
        // p = 3 x^2 y
        let p = Polynomial3::monomial((2, 1, 0), 3.0);
        assert_eq!(p.eval([2.0, 5.0, 7.0]), 60.0);
        let px = p.dpartial(0); // 6 x y
        assert_eq!(px.eval([2.0, 5.0, 1.0]), 60.0);
        let pxy = p.derivative(1, 1, 0); // 6 x
        assert_eq!(pxy.eval([2.0, 0.0, 0.0]), 12.0);
    }

    #[test]
    fn cancellation_removes_terms() {
        let mut p = Polynomial3::monomial((1, 0, 0), 1.0);
        p.add_term((1, 0, 0), -1.0);
        assert!(p.is_zero());
    }
}
