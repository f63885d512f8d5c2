//! Small planar-geometry toolkit shared by the mesh and diagnostic modules.
//!
//! Everything here is exact arithmetic on `f64` pairs; no tolerances are
//! hidden in this module.  Orientation conventions: triangles are
//! counter-clockwise, `cross(a, b) > 0` means `b` lies to the left of `a`.

use std::ops::{Add, Mul, Neg, Sub};

/// A point (or vector) in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the cross product, `self.x * other.y - self.y * other.x`.
    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn dist(self, other: Point) -> f64 {
        (self - other).norm()
    }

    /// Rotation by +90°: `(x, y) -> (-y, x)`.
    pub fn perp(self) -> Point {
        Point::new(-self.y, self.x)
    }

    pub fn scale(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }

    pub fn midpoint(self, other: Point) -> Point {
        Point::new(0.5 * (self.x + other.x), 0.5 * (self.y + other.y))
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, rhs: f64) -> Point {
        self.scale(rhs)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

/// Twice the signed area of the triangle `(a, b, c)`; positive when CCW.
pub fn signed_area2(a: Point, b: Point, c: Point) -> f64 {
    (b - a).cross(c - a)
}

/// Area of a triangle given by its vertices (sign follows orientation).
pub fn triangle_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * signed_area2(a, b, c)
}

/// Barycentric coordinates of `q` with respect to triangle `(a, b, c)`.
///
/// Returns `(w_a, w_b, w_c)` summing to 1.  Requires a non-degenerate
/// triangle; the caller is responsible for checking orientation.
pub fn barycentric(q: Point, a: Point, b: Point, c: Point) -> (f64, f64, f64) {
    let area2 = signed_area2(a, b, c);
    let wa = signed_area2(q, b, c) / area2;
    let wb = signed_area2(a, q, c) / area2;
    let wc = 1.0 - wa - wb;
    (wa, wb, wc)
}

/// Distance from `q` to the closed segment `[a, b]`.
pub fn segment_distance(q: Point, a: Point, b: Point) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sq();
    if len2 == 0.0 {
        return q.dist(a);
    }
    let t = ((q - a).dot(ab) / len2).clamp(0.0, 1.0);
    q.dist(a + ab * t)
}

/// Signed area of a simple polygon (positive when CCW), by the shoelace rule.
pub fn polygon_area(vertices: &[Point]) -> f64 {
    let n = vertices.len();
    let mut twice = 0.0;
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        twice += a.cross(b);
    }
    0.5 * twice
}

/// Index of the first reflex (or collinear) vertex of a CCW polygon, if any.
///
/// A polygon is strictly convex exactly when this returns `None`.
pub fn first_nonconvex_vertex(vertices: &[Point]) -> Option<usize> {
    let n = vertices.len();
    if n < 3 {
        return Some(0);
    }
    for i in 0..n {
        let prev = vertices[(i + n - 1) % n];
        let here = vertices[i];
        let next = vertices[(i + 1) % n];
        if signed_area2(prev, here, next) <= 0.0 {
            return Some(i);
        }
    }
    None
}

/// True when `q` lies inside (or on the boundary of) a strictly convex CCW polygon.
pub fn convex_polygon_contains(vertices: &[Point], q: Point) -> bool {
    let n = vertices.len();
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        if signed_area2(a, b, q) < 0.0 {
            return false;
        }
    }
    true
}

/// Distance from an interior or exterior point `q` to the ellipse
/// `x²/a² + y²/b² = 1` (boundary curve, not the filled region).
///
/// Uses the robust root-bracketing formulation of the nearest-point
/// condition: the foot `(a²x/(t+a²), b²y/(t+b²))` lies on the ellipse for the
/// unique root `t > -min(a², b²)` of
/// `F(t) = (a x/(t+a²))² + (b y/(t+b²))² - 1`.
/// Bisection is used throughout; the function is monotone on the bracket.
pub fn ellipse_boundary_distance(q: Point, a: f64, b: f64) -> f64 {
    // Work in the closed first quadrant; the ellipse is symmetric.
    let x = q.x.abs();
    let y = q.y.abs();

    // Degenerate projections onto the axes need explicit handling because the
    // parametric formula loses its bracket when x or y vanishes.
    // On the vertical axis the nearest point is the top vertex (0, b),
    // except inside the evolute of a taller-than-wide ellipse, where the
    // foot moves off-axis: sinθ = by/(b²−a²) gives the critical foot.
    if x == 0.0 {
        if b > a && y < (b * b - a * a) / b {
            let yc = b * b * y / (b * b - a * a); // foot ordinate in [0, b)
            let frac: f64 = 1.0 - (yc / b) * (yc / b);
            let xc = a * frac.max(0.0).sqrt();
            return Point::new(xc, yc).dist(Point::new(0.0, y));
        }
        return (y - b).abs();
    }
    // Mirror case on the horizontal axis.
    if y == 0.0 {
        if a > b && x < (a * a - b * b) / a {
            let xc = a * a * x / (a * a - b * b);
            let frac: f64 = 1.0 - (xc / a) * (xc / a);
            let yc = b * frac.max(0.0).sqrt();
            return Point::new(xc, yc).dist(Point::new(x, 0.0));
        }
        return (x - a).abs();
    }

    let f = |t: f64| {
        let u = a * x / (t + a * a);
        let v = b * y / (t + b * b);
        u * u + v * v - 1.0
    };
    // Bracket the root: F decreases from +∞ at t -> -min(a²,b²)⁺ to -1 at +∞.
    let mut lo = -(a * a).min(b * b) + 1e-300;
    let mut hi = (a * x + b * y).max(1.0);
    while f(hi) > 0.0 {
        hi *= 2.0;
    }
    // lo starts essentially at the pole where F > 0.
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = 0.5 * (lo + hi);
    let foot = Point::new(a * a * x / (t + a * a), b * b * y / (t + b * b));
    foot.dist(Point::new(x, y))
}
