//! Volume scans for s-point candidates.
//!
//! Order 1 marks sign changes of Phi between adjacent lattice points and
//! refines each bracket by bisection. Orders 2 and 3 evaluate the jet
//! matrix of the degree-(2m-2) basis and flag points where
//! sigma_{(2m-1)^2} / sigma_1 falls under the rank threshold. The raw
//! diagnostic field is kept so thresholds can be re-applied offline.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::Point3;
use crate::jets::{jet_matrix, q_harmonic_basis, JetOptions};
use crate::lse::{solve_field, FieldSolution, Incident, KernelOperator};

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ScanBox {
    pub center: Point3,
    pub half_width: f64,
}

impl ScanBox {
    pub fn centered(half_width: f64) -> Self {
        ScanBox {
            center: [0.0; 3],
            half_width,
        }
    }

    pub fn contains(&self, p: Point3) -> bool {
        (0..3).all(|i| (p[i] - self.center[i]).abs() <= self.half_width * (1.0 + 1e-12))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ScanOptions {
    pub tau_rel: f64,
    pub jet: JetOptions,
    /// bisection-refine order-1 brackets
    pub refine: bool,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            tau_rel: 1e-3,
            jet: JetOptions::default(),
            refine: true,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Candidate {
    /// lattice-level location (edge midpoint for order 1)
    pub point: Point3,
    /// diagnostic at detection: Phi bracket magnitude or sigma ratio
    pub diagnostic: f64,
    /// bisection-refined location, when requested and available
    pub refined: Option<Point3>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanReport {
    pub order: usize,
    pub scan_box: ScanBox,
    pub resolution: usize,
    pub tau_rel: f64,
    /// order-3 detection extends the rank criterion beyond its proved
    /// range; results are conditional
    pub conditional: bool,
    /// diagnostic per lattice point, index (ix * res + iy) * res + iz
    pub diagnostic: Vec<f64>,
    pub candidates: Vec<Candidate>,
}

impl ScanReport {
    pub fn lattice_spacing(&self) -> f64 {
        2.0 * self.scan_box.half_width / (self.resolution - 1) as f64
    }

    pub fn lattice_point(&self, ix: usize, iy: usize, iz: usize) -> Point3 {
        let s = self.lattice_spacing();
        let c = self.scan_box.center;
        let hw = self.scan_box.half_width;
        [
            c[0] - hw + s * ix as f64,
            c[1] - hw + s * iy as f64,
            c[2] - hw + s * iz as f64,
        ]
    }

    /// |candidate| radii (refined where available), sorted.
    pub fn candidate_radii(&self) -> Vec<f64> {
        let mut radii: Vec<f64> = self
            .candidates
            .iter()
            .map(|c| {
                let p = c.refined.unwrap_or(c.point);
                crate::geom::dist(p, self.scan_box.center)
            })
            .collect();
        radii.sort_by(|a, b| a.partial_cmp(b).unwrap());
        radii
    }
}

pub fn scan_spoints(
    op: &Arc<KernelOperator>,
    m: usize,
    scan_box: ScanBox,
    resolution: usize,
    opts: ScanOptions,
) -> Result<ScanReport> {
    if !(1..=3).contains(&m) {
        return Err(Error::MalformedInput(format!(
            "scan order must be 1, 2, or 3; got {m}"
        )));
    }
    if resolution < 2 {
        return Err(Error::MalformedInput(format!(
            "scan resolution must be at least 2, got {resolution}"
        )));
    }
    op.require_convention()?;

    let lattice: Vec<Point3> = {
        let s = 2.0 * scan_box.half_width / (resolution - 1) as f64;
        let c = scan_box.center;
        let hw = scan_box.half_width;
        let mut pts = Vec::with_capacity(resolution.pow(3));
        for ix in 0..resolution {
            for iy in 0..resolution {
                for iz in 0..resolution {
                    pts.push([
                        c[0] - hw + s * ix as f64,
                        c[1] - hw + s * iy as f64,
                        c[2] - hw + s * iz as f64,
                    ]);
                }
            }
        }
        pts
    };

    if m == 1 {
        let phi = solve_field(op, Incident::Constant(1.0))?;
        let diagnostic: Vec<f64> = lattice.par_iter().map(|&x| phi.eval_lenient(x)).collect();
        let idx = |ix: usize, iy: usize, iz: usize| (ix * resolution + iy) * resolution + iz;
        let mut brackets = Vec::new();
        for ix in 0..resolution {
            for iy in 0..resolution {
                for iz in 0..resolution {
                    let a = diagnostic[idx(ix, iy, iz)];
                    if a == 0.0 {
                        continue;
                    }
                    let mut push = |jx: usize, jy: usize, jz: usize| {
                        let b = diagnostic[idx(jx, jy, jz)];
                        if a * b < 0.0 {
                            brackets.push((
                                lattice[idx(ix, iy, iz)],
                                lattice[idx(jx, jy, jz)],
                                a.abs().min(b.abs()),
                            ));
                        }
                    };
                    if ix + 1 < resolution {
                        push(ix + 1, iy, iz);
                    }
                    if iy + 1 < resolution {
                        push(ix, iy + 1, iz);
                    }
                    if iz + 1 < resolution {
                        push(ix, iy, iz + 1);
                    }
                }
            }
        }
        let candidates: Vec<Candidate> = brackets
            .par_iter()
            .map(|&(pa, pb, mag)| {
                let midpoint = [
                    0.5 * (pa[0] + pb[0]),
                    0.5 * (pa[1] + pb[1]),
                    0.5 * (pa[2] + pb[2]),
                ];
                let refined = if opts.refine {
                    refine_phi_zero(&phi, (pa, pb)).ok()
                } else {
                    None
                };
                Candidate {
                    point: midpoint,
                    diagnostic: mag,
                    refined,
                }
            })
            .collect();
        return Ok(ScanReport {
            order: 1,
            scan_box,
            resolution,
            tau_rel: opts.tau_rel,
            conditional: false,
            diagnostic,
            candidates,
        });
    }

    // m >= 2: jet degeneration of the degree-(2m-2) basis
    let degree = 2 * m - 2;
    let expected_rank = (2 * m - 1) * (2 * m - 1);
    let basis = q_harmonic_basis(op, degree)?;
    let diagnostic: Vec<f64> = lattice
        .par_iter()
        .map(|&x| {
            jet_matrix(&basis, x, degree, opts.jet)
                .map(|jet| jet.sigma_ratio(expected_rank))
                .unwrap_or(f64::NAN)
        })
        .collect();
    let candidates: Vec<Candidate> = lattice
        .iter()
        .zip(&diagnostic)
        .filter(|(_, &d)| d.is_finite() && d < opts.tau_rel)
        .map(|(&point, &d)| Candidate {
            point,
            diagnostic: d,
            refined: None,
        })
        .collect();

    Ok(ScanReport {
        order: m,
        scan_box,
        resolution,
        tau_rel: opts.tau_rel,
        conditional: m >= 3,
        diagnostic,
        candidates,
    })
}

/// Bisection along a segment with opposite Phi signs at the ends: runs to
/// |Phi| <= 1e-6 * max(|ends|) (once the bracket itself has collapsed
/// below 1e-9 of its span) or for at most 40 halvings, returning the
/// midpoint.
pub fn refine_phi_zero(phi: &FieldSolution, segment: (Point3, Point3)) -> Result<Point3> {
    let (mut a, mut b) = segment;
    let mut fa = phi.eval_lenient(a);
    let fb = phi.eval_lenient(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa * fb > 0.0 {
        return Err(Error::MalformedInput(format!(
            "refine needs opposite signs at the segment ends, got {fa:.3e} and {fb:.3e}"
        )));
    }
    let tol = 1e-6 * fa.abs().max(fb.abs());
    let span = crate::geom::dist(a, b);
    let mut mid = a;
    for _ in 0..40 {
        mid = [
            0.5 * (a[0] + b[0]),
            0.5 * (a[1] + b[1]),
            0.5 * (a[2] + b[2]),
        ];
        let fm = phi.eval_lenient(mid);
        if fm.abs() <= tol && crate::geom::dist(a, b) <= 1e-9 * span.max(1.0) {
            return Ok(mid);
        }
        if fa * fm < 0.0 {
            b = mid;
        } else {
            a = mid;
            fa = fm;
        }
    }
    Ok(mid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Ball;
    use crate::lse::{assemble_kernel, build_grid};
    use crate::poly::Polynomial3;
    use crate::potentials::{PotentialField, RadialProfile};
    use approx::assert_abs_diff_eq;

    fn free_operator() -> Arc<KernelOperator> {
        let p = PotentialField::radial(RadialProfile::gaussian(-4.0, 0.18).unwrap())
            .with_coupling(0.0)
            .unwrap();
        let grid = Arc::new(build_grid(Ball::new([0.0; 3], 1.0), 8).unwrap());
        Arc::new(assemble_kernel(grid, Arc::new(p)).unwrap())
    }

    #[test]
    fn free_scan_has_no_candidates_any_order() {
        let op = free_operator();
        for m in 1..=3 {
            let rep = scan_spoints(
                &op,
                m,
                ScanBox::centered(0.8),
                6,
                ScanOptions::default(),
            )
            .unwrap();
            assert!(rep.candidates.is_empty(), "order {m}");
            assert_eq!(rep.diagnostic.len(), 216);
            assert_eq!(rep.conditional, m >= 3);
        }
    }

    #[test]
    fn refine_rejects_same_sign_segment() {
        let op = free_operator();
        let phi = solve_field(&op, Incident::Constant(1.0)).unwrap();
        let err = refine_phi_zero(&phi, ([0.0; 3], [0.5, 0.0, 0.0]));
        assert!(matches!(err, Err(Error::MalformedInput(_))));
    }

    #[test]
    fn refine_finds_plane_zero_of_linear_field() {
        // synthetic solution with incident y1 on the free operator: the
        // interpolant is exactly x1, zero on the plane x1 = 0
        let op = free_operator();
        let field = solve_field(
            &op,
            Incident::Polynomial(Polynomial3::monomial((1, 0, 0), 1.0)),
        )
        .unwrap();
        let z = refine_phi_zero(&field, ([-0.4, 0.2, 0.1], [0.6, 0.2, 0.1])).unwrap();
        assert_abs_diff_eq!(z[0], 0.0, epsilon = 1e-9);
    }
}
