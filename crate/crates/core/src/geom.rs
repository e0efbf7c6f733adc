//! Small 3-vector helpers and enclosing balls.

pub type Point3 = [f64; 3];

#[inline]
pub fn sub(a: Point3, b: Point3) -> Point3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn add(a: Point3, b: Point3) -> Point3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn scale(a: Point3, s: f64) -> Point3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

#[inline]
pub fn dot(a: Point3, b: Point3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn norm(a: Point3) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn dist(a: Point3, b: Point3) -> f64 {
    norm(sub(a, b))
}

/// A ball given by center and radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ball {
    pub center: Point3,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Point3, radius: f64) -> Self {
        Ball { center, radius }
    }

    pub fn contains_ball(&self, other: &Ball) -> bool {
        dist(self.center, other.center) + other.radius <= self.radius + 1e-12 * self.radius.max(1.0)
    }

    /// Smallest ball containing `self` and `other` (exact for two balls).
    pub fn merge(&self, other: &Ball) -> Ball {
        let d = dist(self.center, other.center);
        if d + other.radius <= self.radius {
            return *self;
        }
        if d + self.radius <= other.radius {
            return *other;
        }
        let radius = 0.5 * (d + self.radius + other.radius);
        // center sits on the segment, offset from self.center toward other
        let t = if d > 0.0 { (radius - self.radius) / d } else { 0.0 };
        let dir = sub(other.center, self.center);
        Ball::new(add(self.center, scale(dir, t)), radius)
    }
}

/// Enclosing ball of a set of balls: pairwise merges iterated to a fixed
/// point. Exact for one or two balls, near-minimal beyond that.
pub fn enclosing_ball(balls: &[Ball]) -> Option<Ball> {
    let (first, rest) = balls.split_first()?;
    let mut acc = *first;
    for b in rest {
        acc = acc.merge(b);
    }
    // a second sweep tightens order-dependent results
    for b in balls {
        acc = acc.merge(b);
    }
    Some(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn merge_two_unit_balls() {
        let a = Ball::new([1.0, 0.0, 0.0], 1.0);
        let b = Ball::new([-1.0, 0.0, 0.0], 1.0);
        let m = a.merge(&b);
        assert_relative_eq!(m.radius, 2.0, epsilon = 1e-14);
        assert_relative_eq!(m.center[0], 0.0, epsilon = 1e-14);
    }

    #[test]
    fn merge_contained_ball_is_identity() {
        let a = Ball::new([0.0, 0.0, 0.0], 3.0);
        let b = Ball::new([1.0, 0.0, 0.0], 1.0);
        assert_eq!(a.merge(&b), a);
        assert_eq!(b.merge(&a), a);
    }

    #[test]
    fn enclosing_ball_covers_all() {
        let balls = vec![
            Ball::new([0.0, 0.0, 0.0], 1.0),
            Ball::new([2.0, 1.0, 0.0], 0.5),
            Ball::new([-1.0, -2.0, 1.0], 0.25),
        ];
        let e = enclosing_ball(&balls).unwrap();
        for b in &balls {
            assert!(e.contains_ball(b), "{b:?} not inside {e:?}");
        }
    }
}
