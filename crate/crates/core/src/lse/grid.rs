//! Uniform Cartesian quadrature grid restricted to a ball.

use crate::error::{Error, Result};
use crate::geom::{dist, Ball, Point3};

/// Cell-center quadrature nodes of an n^3 Cartesian grid over the bounding
/// cube of a ball, keeping the centers that fall inside the ball. Every
/// node carries the cell volume h^3 as quadrature weight.
#[derive(Debug, Clone)]
pub struct VolumeGrid {
    nodes: Vec<Point3>,
    weight: f64,
    spacing: f64,
    ball: Ball,
}

/// Build the grid for `ball` with `n` cells per axis, h = 2R/n.
pub fn build_grid(ball: Ball, n: usize) -> Result<VolumeGrid> {
    if n < 2 {
        return Err(Error::MalformedInput(format!(
            "grid resolution must be at least 2, got {n}"
        )));
    }
    if !(ball.radius > 0.0) {
        return Err(Error::MalformedInput(format!(
            "grid ball radius must be positive, got {}",
            ball.radius
        )));
    }
    let h = 2.0 * ball.radius / n as f64;
    let mut nodes = Vec::new();
    for i in 0..n {
        let x = ball.center[0] - ball.radius + (i as f64 + 0.5) * h;
        for j in 0..n {
            let y = ball.center[1] - ball.radius + (j as f64 + 0.5) * h;
            for k in 0..n {
                let z = ball.center[2] - ball.radius + (k as f64 + 0.5) * h;
                let p = [x, y, z];
                if dist(p, ball.center) <= ball.radius {
                    nodes.push(p);
                }
            }
        }
    }
    Ok(VolumeGrid {
        nodes,
        weight: h * h * h,
        spacing: h,
        ball,
    })
}

impl VolumeGrid {
    pub fn nodes(&self) -> &[Point3] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Quadrature weight (cell volume), identical for every node.
    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn ball(&self) -> Ball {
        self.ball
    }

    pub fn weight_sum(&self) -> f64 {
        self.weight * self.nodes.len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn n2_gives_eight_cell_centers() {
        let g = build_grid(Ball::new([0.0; 3], 1.0), 2).unwrap();
        assert_eq!(g.len(), 8);
        assert_eq!(g.weight(), 1.0);
        for node in g.nodes() {
            for c in node {
                assert_abs_diff_eq!(c.abs(), 0.5, epsilon = 1e-15);
            }
            // all inside radius R + h/2
            assert!(crate::geom::norm(*node) <= 1.0 + 0.5);
        }
    }

    #[test]
    fn n16_node_count_near_ball_fraction() {
        let g = build_grid(Ball::new([0.0; 3], 1.0), 16).unwrap();
        let expect = std::f64::consts::PI / 6.0 * 16.0f64.powi(3);
        let got = g.len() as f64;
        // within a boundary layer of the sphere
        assert!(
            (got - expect).abs() < 0.03 * expect,
            "node count {got} too far from {expect}"
        );
    }

    #[test]
    fn weight_sum_approximates_ball_volume_at_n32() {
        let g = build_grid(Ball::new([0.0; 3], 1.0), 32).unwrap();
        let vol = 4.0 * std::f64::consts::PI / 3.0;
        assert!(
            (g.weight_sum() - vol).abs() <= 0.05,
            "sum of weights {} vs ball volume {vol}",
            g.weight_sum()
        );
    }

    #[test]
    fn nodes_are_distinct_and_inside() {
        let g = build_grid(Ball::new([0.5, -0.25, 0.0], 1.5), 9).unwrap();
        let r_lim = 1.5 + 0.5 * g.spacing();
        for (i, a) in g.nodes().iter().enumerate() {
            assert!(dist(*a, [0.5, -0.25, 0.0]) <= r_lim);
            for b in &g.nodes()[i + 1..] {
                assert!(dist(*a, *b) > 0.5 * g.spacing());
            }
        }
    }
}
