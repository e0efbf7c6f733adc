//! Jet matrices: all derivatives up to order k of each basis member at a
//! probe point, by second-order central differences of the Nyström
//! interpolant on a tensor stencil, with singular values for the rank
//! test.

use crate::error::{Error, Result};
use crate::geom::Point3;
use crate::jets::QHarmonicBasis;
use crate::lse::eval_batch;

/// Number of derivatives of order <= k in three variables:
/// (k+1)(k+2)(k+3)/6.
pub fn d_k(k: usize) -> usize {
    (k + 1) * (k + 2) * (k + 3) / 6
}

/// Multi-indices |j| <= k in graded lexicographic order.
pub fn multi_indices(k: usize) -> Vec<(u8, u8, u8)> {
    let mut out = Vec::with_capacity(d_k(k));
    for total in 0..=k {
        for jx in (0..=total).rev() {
            for jy in (0..=(total - jx)).rev() {
                let jz = total - jx - jy;
                out.push((jx as u8, jy as u8, jz as u8));
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, Default)]
pub struct JetOptions {
    /// stencil step; default h/2 in grid units
    pub h_fd: Option<f64>,
    /// combine steps h and h/2 as (4 D_{h/2} - D_h)/3
    pub richardson: bool,
}

/// Rows = basis members, columns = derivatives D^j (graded lex), plus the
/// singular spectrum of the matrix.
#[derive(Debug, Clone)]
pub struct JetMatrix {
    pub point: Point3,
    pub order: usize,
    pub rows: usize,
    pub cols: usize,
    /// row-major entries
    pub entries: Vec<f64>,
    /// nonincreasing
    pub singular_values: Vec<f64>,
}

impl JetMatrix {
    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.entries[row * self.cols..(row + 1) * self.cols]
    }

    /// sigma_i / sigma_1 (i is 1-based); zero spectrum gives 0.
    pub fn sigma_ratio(&self, i: usize) -> f64 {
        let s1 = self.singular_values[0];
        if s1 == 0.0 {
            0.0
        } else {
            self.singular_values[i - 1] / s1
        }
    }
}

/// 1D second-order central stencils over offsets -2..=2 for derivative
/// orders 0..=4.
const STENCILS: [[f64; 5]; 5] = [
    [0.0, 0.0, 1.0, 0.0, 0.0],
    [0.0, -0.5, 0.0, 0.5, 0.0],
    [0.0, 1.0, -2.0, 1.0, 0.0],
    [-0.5, 1.0, 0.0, -1.0, 0.5],
    [1.0, -4.0, 6.0, -4.0, 1.0],
];

pub fn jet_matrix(
    basis: &QHarmonicBasis,
    a: Point3,
    k: usize,
    opts: JetOptions,
) -> Result<JetMatrix> {
    if k > 4 {
        return Err(Error::MalformedInput(format!(
            "jet order {k} beyond the supported 4 (detection order m <= 3)"
        )));
    }
    if !a.iter().all(|c| c.is_finite()) {
        return Err(Error::MalformedInput("jet point must be finite".into()));
    }
    let op = basis.kernel();
    let h = op.grid().spacing();
    let h_fd = opts.h_fd.unwrap_or(0.5 * h);

    let entries = if opts.richardson {
        let coarse = jet_entries(basis, a, k, 2.0 * h_fd)?;
        let fine = jet_entries(basis, a, k, h_fd)?;
        fine.iter()
            .zip(&coarse)
            .map(|(f, c)| (4.0 * f - c) / 3.0)
            .collect()
    } else {
        jet_entries(basis, a, k, h_fd)?
    };

    let rows = basis.len();
    let cols = d_k(k);
    let singular_values = jet_singular_values(&entries, rows, cols)?;

    Ok(JetMatrix {
        point: a,
        order: k,
        rows,
        cols,
        entries,
        singular_values,
    })
}

/// Singular values of the row-equilibrated jet matrix. Each row is scaled
/// to unit norm first (zero rows stay zero), which makes the rank reading
/// invariant under positive row scaling, as a rank must be: degeneration
/// is linear dependence among the jets, not a statement about their
/// magnitudes.
pub(crate) fn jet_singular_values(entries: &[f64], rows: usize, cols: usize) -> Result<Vec<f64>> {
    let mut norms = vec![0.0f64; rows];
    for (i, norm) in norms.iter_mut().enumerate() {
        *norm = entries[i * cols..(i + 1) * cols]
            .iter()
            .map(|v| v * v)
            .sum::<f64>()
            .sqrt();
    }
    let mat = faer::Mat::<f64>::from_fn(rows, cols, |i, j| {
        if norms[i] == 0.0 {
            0.0
        } else {
            entries[i * cols + j] / norms[i]
        }
    });
    mat.singular_values()
        .map_err(|e| Error::Numerical(format!("jet singular values failed: {e:?}")))
}

/// Row-major derivative table: evaluate every member on the tensor
/// stencil once, then contract with the 1D weights.
fn jet_entries(basis: &QHarmonicBasis, a: Point3, k: usize, h_fd: f64) -> Result<Vec<f64>> {
    let op = basis.kernel();
    let span: i64 = if k <= 2 { 1 } else { 2 };
    let side = (2 * span + 1) as usize;
    let members = basis.len();
    let values_refs: Vec<&[f64]> = basis.fields().iter().map(|f| f.values()).collect();
    let h = op.grid().spacing();

    // values[point][member]
    let mut values = vec![0.0; side * side * side * members];
    for (pi, (n1, n2, n3)) in stencil_points(span).into_iter().enumerate() {
        let x = [
            a[0] + h_fd * n1 as f64,
            a[1] + h_fd * n2 as f64,
            a[2] + h_fd * n3 as f64,
        ];
        let (sums, nearest) = eval_batch(op, &values_refs, x);
        let slot = &mut values[pi * members..(pi + 1) * members];
        if let Some((j, d)) = nearest {
            if d <= h / 10.0 {
                // inside the singular shell: substitute solved node values
                for (m, field) in basis.fields().iter().enumerate() {
                    slot[m] = field.values()[j];
                }
                continue;
            }
        }
        for (m, field) in basis.fields().iter().enumerate() {
            slot[m] = field.incident().eval(x) - sums[m];
        }
    }

    let indices = multi_indices(k);
    let cols = indices.len();
    let mut entries = vec![0.0; members * cols];
    for (col, &(jx, jy, jz)) in indices.iter().enumerate() {
        let wx = &STENCILS[jx as usize];
        let wy = &STENCILS[jy as usize];
        let wz = &STENCILS[jz as usize];
        let scale = h_fd.powi(-((jx + jy + jz) as i32));
        for (pi, (n1, n2, n3)) in stencil_points(span).into_iter().enumerate() {
            let w = wx[(n1 + 2) as usize] * wy[(n2 + 2) as usize] * wz[(n3 + 2) as usize];
            if w == 0.0 {
                continue;
            }
            let slot = &values[pi * members..(pi + 1) * members];
            for m in 0..members {
                entries[m * cols + col] += w * slot[m] * scale;
            }
        }
    }
    Ok(entries)
}

fn stencil_points(span: i64) -> Vec<(i64, i64, i64)> {
    let mut pts = Vec::new();
    for n1 in -span..=span {
        for n2 in -span..=span {
            for n3 in -span..=span {
                pts.push((n1, n2, n3));
            }
        }
    }
    pts
}

/// Count of singular values above tau_rel * sigma_1.
pub fn numerical_rank(jet: &JetMatrix, tau_rel: f64) -> usize {
    let s1 = jet.singular_values.first().copied().unwrap_or(0.0);
    if s1 == 0.0 {
        return 0;
    }
    jet.singular_values
        .iter()
        .filter(|&&s| s > tau_rel * s1)
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Ball;
    use crate::jets::q_harmonic_basis;
    use crate::lse::{assemble_kernel, build_grid};
    use crate::potentials::{PotentialField, RadialProfile};
    use approx::assert_abs_diff_eq;
    use std::sync::Arc;

    fn free_basis(degree: usize) -> QHarmonicBasis {
        let p = PotentialField::radial(RadialProfile::gaussian(-4.0, 0.18).unwrap())
            .with_coupling(0.0)
            .unwrap();
        let grid = Arc::new(build_grid(Ball::new([0.0; 3], 1.0), 8).unwrap());
        let op = Arc::new(assemble_kernel(grid, Arc::new(p)).unwrap());
        q_harmonic_basis(&op, degree).unwrap()
    }

    #[test]
    fn dimension_table() {
        assert_eq!(d_k(0), 1);
        assert_eq!(d_k(1), 4);
        assert_eq!(d_k(2), 10);
        assert_eq!(d_k(4), 35);
        assert_eq!(multi_indices(2).len(), 10);
        assert_eq!(multi_indices(2)[0], (0, 0, 0));
    }

    #[test]
    fn free_jets_have_full_rank_nine() {
        let basis = free_basis(2);
        for &a in &[[0.3, -0.2, 0.1], [0.0, 0.0, 0.0], [0.6, 0.5, -0.4]] {
            let jet = jet_matrix(&basis, a, 2, JetOptions::default()).unwrap();
            assert_eq!(jet.rows, 9);
            assert_eq!(jet.cols, 10);
            assert_eq!(numerical_rank(&jet, 1e-3), 9);
            assert!(jet.sigma_ratio(9) > 1e-3);
        }
    }

    #[test]
    fn constant_member_row_at_order_one() {
        let basis = free_basis(2);
        let jet = jet_matrix(&basis, [0.21, -0.05, 0.4], 1, JetOptions::default()).unwrap();
        // first member is the constant 1: jet row (1, 0, 0, 0)
        assert_abs_diff_eq!(jet.entry(0, 0), 1.0, epsilon = 1e-13);
        for col in 1..4 {
            assert_abs_diff_eq!(jet.entry(0, col), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn free_polynomial_jets_are_exact() {
        // central second-order stencils differentiate degree-2 polynomials
        // exactly; member y1 y2 at a has jet d/dx = a2, d/dy = a1,
        // d2/dxdy = 1
        let basis = free_basis(2);
        let a = [0.3, 0.15, -0.2];
        let jet = jet_matrix(&basis, a, 2, JetOptions::default()).unwrap();
        let idx = multi_indices(2);
        let col_of = |j: (u8, u8, u8)| idx.iter().position(|&x| x == j).unwrap();
        let row = 4; // y1 y2
        assert_abs_diff_eq!(jet.entry(row, col_of((0, 0, 0))), a[0] * a[1], epsilon = 1e-12);
        assert_abs_diff_eq!(jet.entry(row, col_of((1, 0, 0))), a[1], epsilon = 1e-11);
        assert_abs_diff_eq!(jet.entry(row, col_of((0, 1, 0))), a[0], epsilon = 1e-11);
        assert_abs_diff_eq!(jet.entry(row, col_of((1, 1, 0))), 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(jet.entry(row, col_of((0, 0, 2))), 0.0, epsilon = 1e-10);
    }

    #[test]
    fn rank_invariances() {
        let basis = free_basis(2);
        let jet = jet_matrix(&basis, [0.4, 0.1, 0.2], 2, JetOptions::default()).unwrap();
        let rank = numerical_rank(&jet, 1e-3);

        // positive scaling leaves the rank unchanged
        let mut scaled = jet.clone();
        for v in &mut scaled.entries {
            *v *= 7.5;
        }
        for s in &mut scaled.singular_values {
            *s *= 7.5;
        }
        assert_eq!(numerical_rank(&scaled, 1e-3), rank);

        // zeroing a row drops it by one
        let mut dropped = jet.clone();
        for col in 0..dropped.cols {
            dropped.entries[3 * dropped.cols + col] = 0.0;
        }
        dropped.singular_values =
            jet_singular_values(&dropped.entries, dropped.rows, dropped.cols).unwrap();
        assert_eq!(numerical_rank(&dropped, 1e-3), rank - 1);

        // row permutation leaves the spectrum unchanged
        let mut permuted = jet.entries.clone();
        let cols = jet.cols;
        for col in 0..cols {
            permuted.swap(2 * cols + col, 7 * cols + col);
        }
        let sv = jet_singular_values(&permuted, jet.rows, jet.cols).unwrap();
        for (a, b) in sv.iter().zip(&jet.singular_values) {
            approx::assert_relative_eq!(a, b, max_relative = 1e-10);
        }

        // positive row rescaling leaves the equilibrated spectrum unchanged
        let mut rescaled = jet.entries.clone();
        for col in 0..cols {
            rescaled[5 * cols + col] *= 37.5;
        }
        let sv = jet_singular_values(&rescaled, jet.rows, jet.cols).unwrap();
        for (a, b) in sv.iter().zip(&jet.singular_values) {
            approx::assert_relative_eq!(a, b, max_relative = 1e-10);
        }
    }
}
