//! Spherical Bessel functions j_l and n_l for the free radial solutions.
//!
//! n_l recurses upward stably; j_l recurses upward only where x > l and
//! otherwise downward (Miller's algorithm) normalized against j_0.

use crate::error::{Error, Result};

pub const L_MAX: usize = 8;

/// (j_l(x), n_l(x)) for 0 <= l <= 8, x > 0.
pub fn spherical_bessel(l: usize, x: f64) -> Result<(f64, f64)> {
    if !(x > 0.0) {
        return Err(Error::MalformedInput(format!(
            "spherical Bessel argument must be positive, got {x}"
        )));
    }
    if l > L_MAX {
        return Err(Error::MalformedInput(format!(
            "channel l = {l} beyond the supported maximum {L_MAX}"
        )));
    }
    Ok((bessel_j(l, x), bessel_n(l, x)))
}

/// (j_l, j_l', n_l, n_l') using the recurrence f_l' = f_{l-1} - (l+1)/x f_l.
pub fn spherical_bessel_with_derivatives(l: usize, x: f64) -> Result<(f64, f64, f64, f64)> {
    let (j, n) = spherical_bessel(l, x)?;
    let (jp, np) = if l == 0 {
        let (j1, n1) = spherical_bessel(1, x)?;
        (-j1, -n1)
    } else {
        let (jm, nm) = spherical_bessel(l - 1, x)?;
        let f = (l as f64 + 1.0) / x;
        (jm - f * j, nm - f * n)
    };
    Ok((j, jp, n, np))
}

fn bessel_n(l: usize, x: f64) -> f64 {
    let n0 = -x.cos() / x;
    if l == 0 {
        return n0;
    }
    let n1 = -x.cos() / (x * x) - x.sin() / x;
    if l == 1 {
        return n1;
    }
    let mut prev = n0;
    let mut cur = n1;
    for k in 1..l {
        let next = (2.0 * k as f64 + 1.0) / x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

fn bessel_j(l: usize, x: f64) -> f64 {
    let j0 = x.sin() / x;
    if l == 0 {
        return j0;
    }
    let j1 = x.sin() / (x * x) - x.cos() / x;
    if l == 1 {
        return j1;
    }
    if x > l as f64 {
        // upward is stable here
        let mut prev = j0;
        let mut cur = j1;
        for k in 1..l {
            let next = (2.0 * k as f64 + 1.0) / x * cur - prev;
            prev = cur;
            cur = next;
        }
        cur
    } else {
        // downward from a padded start, normalized by j_0
        let start = l + 16 + x as usize;
        let mut up = 0.0f64;
        let mut cur = 1e-30f64;
        let mut out = 0.0;
        for k in (0..=start).rev() {
            let down = (2.0 * k as f64 + 3.0) / x * cur - up;
            up = cur;
            cur = down;
            if k == l {
                out = cur;
            }
            if cur.abs() > 1e250 {
                up /= 1e250;
                cur /= 1e250;
                out /= 1e250;
            }
        }
        out * (j0 / cur)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn j0_closed_form() {
        let (j, _) = spherical_bessel(0, 1.0).unwrap();
        assert_relative_eq!(j, 1.0f64.sin(), max_relative = 1e-14);
    }

    #[test]
    fn n0_zero_at_half_pi() {
        let (_, n) = spherical_bessel(0, std::f64::consts::FRAC_PI_2).unwrap();
        assert_abs_diff_eq!(n, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn j1_closed_form() {
        let (j, _) = spherical_bessel(1, 1.0).unwrap();
        let expect = 1.0f64.sin() - 1.0f64.cos();
        assert_relative_eq!(j, expect, max_relative = 1e-13);
        assert_relative_eq!(j, 0.301168, max_relative = 1e-5);
    }

    #[test]
    fn small_argument_downward_recursion() {
        // j_l(x) ~ x^l / (2l+1)!! for small x
        let x = 0.01;
        for l in 2..=8usize {
            let (j, _) = spherical_bessel(l, x).unwrap();
            let mut dfact = 1.0;
            for k in 0..=l {
                dfact *= 2.0 * k as f64 + 1.0;
            }
            assert_relative_eq!(j, x.powi(l as i32) / dfact, max_relative = 1e-4);
        }
    }

    #[test]
    fn wronskian_identity() {
        // j_l(x) n_l'(x) - j_l'(x) n_l(x) = 1/x^2
        for l in 0..=8usize {
            for &x in &[0.3, 1.0, 4.5, 20.0] {
                let (j, jp, n, np) = spherical_bessel_with_derivatives(l, x).unwrap();
                assert_relative_eq!(j * np - jp * n, 1.0 / (x * x), max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(spherical_bessel(0, 0.0).is_err());
        assert!(spherical_bessel(0, -1.0).is_err());
        assert!(spherical_bessel(9, 1.0).is_err());
    }
}
