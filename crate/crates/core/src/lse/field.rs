//! Solved fields and their natural Nyström interpolant.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{dist, Point3};
use crate::lse::KernelOperator;
use crate::poly::Polynomial3;

const FOUR_PI: f64 = 4.0 * std::f64::consts::PI;

/// Incident term p0 of the integral equation (I + K) u = p0.
#[derive(Debug, Clone)]
pub enum Incident {
    Constant(f64),
    Polynomial(Polynomial3),
    /// Free Green pole 1/(4 pi |x - y|) anchored at y.
    Pole(Point3),
}

impl Incident {
    pub fn eval(&self, x: Point3) -> f64 {
        match self {
            Incident::Constant(c) => *c,
            Incident::Polynomial(p) => p.eval(x),
            Incident::Pole(y) => 1.0 / (FOUR_PI * dist(x, *y)),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Incident::Constant(c) => format!("constant {c}"),
            Incident::Polynomial(p) => format!("polynomial of degree {}", p.degree()),
            Incident::Pole(y) => format!("pole at ({}, {}, {})", y[0], y[1], y[2]),
        }
    }
}

/// Node values of a solved field together with its incident term. The
/// interpolant
///   u(x) = p0(x) - sum_j w q(s_j) u_j / (4 pi |x - s_j|)
/// evaluates the field anywhere off the nodes and extends it exactly
/// outside the support ball.
#[derive(Clone)]
pub struct FieldSolution {
    op: Arc<KernelOperator>,
    incident: Incident,
    values: Vec<f64>,
}

/// Solve (I + K) u = p0 at the nodes. Requires the convention check to
/// pass; a pole incident must keep h/10 clear of every node.
pub fn solve_field(op: &Arc<KernelOperator>, incident: Incident) -> Result<FieldSolution> {
    op.require_convention()?;
    let nodes = op.grid().nodes();
    if let Incident::Pole(y) = incident {
        let h = op.grid().spacing();
        let min = nodes
            .iter()
            .map(|&s| dist(s, y))
            .fold(f64::INFINITY, f64::min);
        if min <= h / 10.0 {
            return Err(Error::Numerical(format!(
                "pole at distance {min:.3e} from a node (needs > h/10 = {:.3e}); offset y",
                h / 10.0
            )));
        }
    }
    let rhs: Vec<f64> = nodes.iter().map(|&s| incident.eval(s)).collect();
    let values = op.solve_linear(&rhs)?;
    Ok(FieldSolution {
        op: op.clone(),
        incident,
        values,
    })
}

/// Green function column G(., y): the solution with pole incident at y.
pub fn green_function(op: &Arc<KernelOperator>, y: Point3) -> Result<FieldSolution> {
    solve_field(op, Incident::Pole(y))
}

impl FieldSolution {
    pub fn kernel(&self) -> &Arc<KernelOperator> {
        &self.op
    }

    pub fn incident(&self) -> &Incident {
        &self.incident
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Interpolant correction sum_j w q_j u_j / (4 pi |x - s_j|) together
    /// with the nearest active node (index, distance).
    fn correction(&self, x: Point3) -> (f64, Option<(usize, f64)>) {
        let (sums, nearest) = eval_batch(&self.op, &[&self.values], x);
        (sums[0], nearest)
    }

    /// Evaluate the interpolant. Errors within h/10 of a node carrying
    /// q != 0, where the quadrature kernel is singular.
    pub fn eval(&self, x: Point3) -> Result<f64> {
        let (corr, nearest) = self.correction(x);
        let h = self.op.grid().spacing();
        if let Some((j, d)) = nearest {
            if d <= h / 10.0 {
                return Err(Error::Numerical(format!(
                    "evaluation point within h/10 of node {j} (d = {d:.3e}); use the node value"
                )));
            }
        }
        Ok(self.incident.eval(x) - corr)
    }

    /// Evaluate, substituting the solved node value when x falls within
    /// h/10 of an active node. Used by scan and jet stencils.
    pub fn eval_lenient(&self, x: Point3) -> f64 {
        let (corr, nearest) = self.correction(x);
        let h = self.op.grid().spacing();
        if let Some((j, d)) = nearest {
            if d <= h / 10.0 {
                return self.values[j];
            }
        }
        self.incident.eval(x) - corr
    }

    /// Euclidean residual |(I+K)u - p0| relative to |p0|.
    pub fn relative_residual(&self) -> f64 {
        let n = self.values.len();
        let a = self.op.matrix();
        let nodes = self.op.grid().nodes();
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..n {
            let mut acc = 0.0;
            for j in 0..n {
                acc += a[(i, j)] * self.values[j];
            }
            let p0 = self.incident.eval(nodes[i]);
            num += (acc - p0) * (acc - p0);
            den += p0 * p0;
        }
        (num / den).sqrt()
    }
}

/// Interpolant correction sums for several fields sharing one operator:
/// for each values slice, sum_j w q_j u_j / (4 pi |x - s_j|). Also reports
/// the nearest active node. One pass over the active nodes regardless of
/// how many fields are evaluated; summation order is fixed by node index.
pub fn eval_batch(
    op: &Arc<KernelOperator>,
    values_list: &[&[f64]],
    x: Point3,
) -> (Vec<f64>, Option<(usize, f64)>) {
    let nodes = op.grid().nodes();
    let q = op.q_at_nodes();
    let w = op.grid().weight();
    let mut sums = vec![0.0; values_list.len()];
    let mut nearest: Option<(usize, f64)> = None;
    for &j in op.active_nodes() {
        let j = j as usize;
        let d = dist(x, nodes[j]);
        if nearest.map_or(true, |(_, best)| d < best) {
            nearest = Some((j, d));
        }
        let c = w * q[j] / (FOUR_PI * d);
        for (m, vals) in values_list.iter().enumerate() {
            sums[m] += c * vals[j];
        }
    }
    (sums, nearest)
}

/// CSV-friendly view of a solution: node coordinates and value.
#[derive(Debug, Serialize)]
pub struct NodeValue {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub value: f64,
}

impl FieldSolution {
    pub fn node_values(&self) -> Vec<NodeValue> {
        self.op
            .grid()
            .nodes()
            .iter()
            .zip(&self.values)
            .map(|(&[x, y, z], &value)| NodeValue { x, y, z, value })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Ball;
    use crate::lse::{assemble_kernel, build_grid};
    use crate::potentials::{PotentialField, RadialProfile};
    use approx::assert_relative_eq;

    fn free_operator(n: usize) -> Arc<KernelOperator> {
        // zero coupling on a profile whose truncation ball fits the grid
        let p = PotentialField::radial(RadialProfile::gaussian(-4.0, 0.18).unwrap())
            .with_coupling(0.0)
            .unwrap();
        let grid = Arc::new(build_grid(Ball::new([0.0; 3], 1.0), n).unwrap());
        Arc::new(assemble_kernel(grid, Arc::new(p)).unwrap())
    }

    #[test]
    fn free_constant_incident_is_identically_one() {
        let op = free_operator(8);
        let sol = solve_field(&op, Incident::Constant(1.0)).unwrap();
        for &v in sol.values() {
            assert_eq!(v, 1.0);
        }
        assert_eq!(sol.eval([0.123, -0.4, 0.9]).unwrap(), 1.0);
        assert_eq!(sol.eval([10.0, 3.0, -5.0]).unwrap(), 1.0);
    }

    #[test]
    fn free_polynomial_incident_reproduces_polynomial() {
        let op = free_operator(8);
        let p = Polynomial3::monomial((1, 1, 0), 1.0); // y1 y2
        let sol = solve_field(&op, Incident::Polynomial(p)).unwrap();
        for (s, &v) in op.grid().nodes().iter().zip(sol.values()) {
            assert_eq!(v, s[0] * s[1]);
        }
    }

    #[test]
    fn free_green_function_is_free_kernel() {
        let op = free_operator(8);
        let y = [1.7, 0.33, -0.21];
        let g = green_function(&op, y).unwrap();
        for (s, &v) in op.grid().nodes().iter().zip(g.values()) {
            assert_relative_eq!(v, 1.0 / (FOUR_PI * dist(*s, y)), max_relative = 1e-14);
        }
    }

    #[test]
    fn solve_is_linear_in_the_incident() {
        let p = PotentialField::radial(RadialProfile::gaussian(-6.0, 0.35).unwrap());
        let r = p.support_ball().radius;
        let grid = Arc::new(build_grid(Ball::new([0.0; 3], r), 8).unwrap());
        let op = Arc::new(assemble_kernel(grid, Arc::new(p)).unwrap());

        let p0 = Polynomial3::constant(1.0);
        let p1 = Polynomial3::monomial((1, 0, 0), 1.0);
        let (a, b) = (2.5, -1.25);
        let mut combo = p0.scaled(a);
        combo.add_scaled(&p1, b);

        let u0 = solve_field(&op, Incident::Polynomial(p0)).unwrap();
        let u1 = solve_field(&op, Incident::Polynomial(p1)).unwrap();
        let uc = solve_field(&op, Incident::Polynomial(combo)).unwrap();
        for i in 0..op.len() {
            assert_relative_eq!(
                uc.values()[i],
                a * u0.values()[i] + b * u1.values()[i],
                epsilon = 1e-9,
                max_relative = 1e-9
            );
        }
    }

    #[test]
    fn residual_contract_holds() {
        let p = PotentialField::radial(RadialProfile::gaussian(-8.0, 0.4).unwrap());
        let r = p.support_ball().radius;
        let grid = Arc::new(build_grid(Ball::new([0.0; 3], r), 10).unwrap());
        let op = Arc::new(assemble_kernel(grid, Arc::new(p)).unwrap());
        let sol = solve_field(&op, Incident::Constant(1.0)).unwrap();
        assert!(sol.relative_residual() <= 1e-10, "{}", sol.relative_residual());
    }

    #[test]
    fn eval_near_active_node_errors_and_lenient_substitutes() {
        let p = PotentialField::radial(RadialProfile::gaussian(-8.0, 0.4).unwrap());
        let r = p.support_ball().radius;
        let grid = Arc::new(build_grid(Ball::new([0.0; 3], r), 8).unwrap());
        let op = Arc::new(assemble_kernel(grid, Arc::new(p)).unwrap());
        let sol = solve_field(&op, Incident::Constant(1.0)).unwrap();
        let node = op.grid().nodes()[42];
        let x = [node[0] + op.grid().spacing() * 0.01, node[1], node[2]];
        assert!(matches!(sol.eval(x), Err(Error::Numerical(_))));
        assert_eq!(sol.eval_lenient(x), sol.values()[42]);
    }

    #[test]
    fn pole_on_node_is_rejected() {
        let op = free_operator(6);
        let node = op.grid().nodes()[3];
        assert!(green_function(&op, node).is_err());
    }
}
