//! Geometric predicates and convex-combination coefficient solvers.
//!
//! Orientation-style predicates compare cross products against a tolerance
//! scaled by the local segment lengths, so they behave uniformly across the
//! nesting depths of a drawing (deeply stacked faces are tiny but not
//! ill-conditioned in their own frame).

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::simplex::{self, LpOutcome, StandardLp};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, other: Point) -> f64 {
        (self - other).norm()
    }

    /// Rotation by `angle` radians about `center`, counter-clockwise.
    pub fn rotated_about(self, center: Point, angle: f64) -> Point {
        let (s, c) = angle.sin_cos();
        let d = self - center;
        Point::new(center.x + c * d.x - s * d.y, center.y + s * d.x + c * d.y)
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
        Point::new(self.x * rhs, self.y * rhs)
    }
}

/// Bounding-box diagonal of a point set; zero for fewer than two points.
pub fn bbox_diagonal(points: &[Point]) -> f64 {
    let mut min = Point::new(f64::INFINITY, f64::INFINITY);
    let mut max = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in points {
        min.x = min.x.min(p.x);
        min.y = min.y.min(p.y);
        max.x = max.x.max(p.x);
        max.y = max.y.max(p.y);
    }
    if points.len() < 2 {
        0.0
    } else {
        (max - min).norm()
    }
}

/// All tolerances used by the pipeline. Strictly positive by construction.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative geometric tolerance for orientation tests and the hull.
    pub eps_geom: f64,
    /// Degenerate-angle threshold in rotation sorting, radians.
    pub eps_angle: f64,
    /// Strict-positivity floor for convex-combination coefficients.
    pub eps_pos: f64,
    /// Log-space tolerance on face ratio products.
    pub eps_cycle: f64,
    /// Barycenter-equation residual tolerance, relative to bbox diagonal.
    pub eps_residual: f64,
    /// Minimum-weight cutoff for LP strict feasibility.
    pub eps_lp: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eps_geom: 1e-9,
            eps_angle: 1e-9,
            eps_pos: 1e-9,
            eps_cycle: 1e-7,
            eps_residual: 1e-9,
            eps_lp: 1e-9,
        }
    }
}

impl Tolerances {
    pub fn with_eps_cycle(mut self, eps: f64) -> Self {
        assert!(eps > 0.0, "tolerances must be strictly positive");
        self.eps_cycle = eps;
        self
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("neighbour positions are collinear")]
    CollinearNeighbours,
    #[error("point is not strictly inside the convex hull of its neighbours")]
    OutsideHull,
    #[error("a convex combination needs at least 3 neighbours, got {0}")]
    TooFewNeighbours(usize),
    #[error("coefficient solve failed: {0}")]
    Numerical(String),
}

/// Sign of the turn a→b→c: +1 left, −1 right, 0 collinear within `eps`
/// relative to the squared lengths involved.
pub fn orient(a: Point, b: Point, c: Point, eps: f64) -> i8 {
    let u = b - a;
    let v = c - a;
    let cr = u.cross(v);
    let scale = u.dot(u).max(v.dot(v));
    if cr.abs() <= eps * scale {
        0
    } else if cr > 0.0 {
        1
    } else {
        -1
    }
}

fn on_segment_bbox(p: Point, q: Point, r: Point, slack: f64) -> bool {
    r.x >= p.x.min(q.x) - slack
        && r.x <= p.x.max(q.x) + slack
        && r.y >= p.y.min(q.y) - slack
        && r.y <= p.y.max(q.y) + slack
}

/// True when the closed segments (a1,a2) and (b1,b2) share at least one
/// point. Endpoint contact counts as an intersection; the caller is expected
/// to filter out segment pairs that legitimately share an endpoint.
pub fn segments_intersect(a1: Point, a2: Point, b1: Point, b2: Point, eps: f64) -> bool {
    let o1 = orient(a1, a2, b1, eps);
    let o2 = orient(a1, a2, b2, eps);
    let o3 = orient(b1, b2, a1, eps);
    let o4 = orient(b1, b2, a2, eps);
    if o1 * o2 < 0 && o3 * o4 < 0 {
        return true;
    }
    let slack = eps * (a1.dist(a2) + b1.dist(b2));
    (o1 == 0 && on_segment_bbox(a1, a2, b1, slack))
        || (o2 == 0 && on_segment_bbox(a1, a2, b2, slack))
        || (o3 == 0 && on_segment_bbox(b1, b2, a1, slack))
        || (o4 == 0 && on_segment_bbox(b1, b2, a2, slack))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Convexity {
    pub convex: bool,
    /// False when some corner is collinear within tolerance (a flat vertex).
    pub strict: bool,
}

/// Convexity of a cyclic point sequence. Convex means every turn has the
/// same sign (flat corners allowed) and the total turning is one full
/// revolution, which rules out star-polygon traversals.
pub fn is_convex_polygon(points: &[Point], eps: f64) -> Convexity {
    let n = points.len();
    if n < 3 {
        return Convexity { convex: false, strict: false };
    }
    let mut pos = false;
    let mut neg = false;
    let mut flat = false;
    let mut turn_sum = 0.0;
    for i in 0..n {
        let a = points[i];
        let b = points[(i + 1) % n];
        let c = points[(i + 2) % n];
        let u = b - a;
        let v = c - b;
        if u.norm() == 0.0 || v.norm() == 0.0 {
            return Convexity { convex: false, strict: false };
        }
        let cr = u.cross(v);
        let dt = u.dot(v);
        if cr.abs() <= eps * u.norm() * v.norm() {
            if dt < 0.0 {
                // 180-degree spike
                return Convexity { convex: false, strict: false };
            }
            flat = true;
        } else if cr > 0.0 {
            pos = true;
        } else {
            neg = true;
        }
        turn_sum += cr.atan2(dt);
    }
    let full_turn = (turn_sum.abs() - std::f64::consts::TAU).abs() <= 1e-6;
    let convex = !(pos && neg) && full_turn;
    Convexity { convex, strict: convex && !flat }
}

/// Indices of the strictly convex hull of `points`, counter-clockwise.
/// Points interior to hull edges (collinear within tolerance) are dropped.
pub fn convex_hull(points: &[Point], eps: f64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&a, &b| {
        points[a]
            .x
            .total_cmp(&points[b].x)
            .then(points[a].y.total_cmp(&points[b].y))
    });
    if idx.len() < 3 {
        return idx;
    }
    let mut hull: Vec<usize> = Vec::with_capacity(idx.len() + 1);
    for pass in 0..2 {
        let start = hull.len() + 1;
        let it: Box<dyn Iterator<Item = &usize>> = if pass == 0 {
            Box::new(idx.iter())
        } else {
            Box::new(idx.iter().rev())
        };
        for &i in it {
            while hull.len() >= start
                && orient(points[hull[hull.len() - 2]], points[hull[hull.len() - 1]], points[i], eps) <= 0
            {
                hull.pop();
            }
            hull.push(i);
        }
        hull.pop();
    }
    hull
}

/// Barycentric coordinates of `p` with respect to the triangle (a, b, c).
/// Requires the triangle non-degenerate and `p` strictly inside it.
pub fn barycentric_deg3(
    p: Point,
    a: Point,
    b: Point,
    c: Point,
    tol: &Tolerances,
) -> Result<[f64; 3], GeometryError> {
    let area2 = (b - a).cross(c - a);
    let scale = (a.dist(b).max(b.dist(c)).max(c.dist(a))).powi(2);
    if area2.abs() <= tol.eps_geom * scale {
        return Err(GeometryError::CollinearNeighbours);
    }
    let za = (b - p).cross(c - p) / area2;
    let zb = (p - a).cross(c - a) / area2;
    let zc = (b - a).cross(p - a) / area2;
    let z = [za, zb, zc];
    if z.iter().any(|&v| v <= tol.eps_pos) {
        return Err(GeometryError::OutsideHull);
    }
    Ok(z)
}

/// One convex-combination solution plus a basis of the homogeneous space.
///
/// `base` reproduces the target point and sums to one with every coefficient
/// strictly positive. Each `nullspace` vector sums to zero and maps the
/// neighbour positions to the zero vector, so `base + t·v` stays a solution
/// for any `t` small enough to preserve positivity.
#[derive(Clone, Debug)]
pub struct ConvexCoords {
    pub base: Vec<f64>,
    pub nullspace: Vec<Vec<f64>>,
}

/// Coefficients expressing `p` as a convex combination of `neighbours`.
///
/// Degree 3 is the unique barycentric solve; higher degrees pick the base
/// solution maximising the minimum coefficient (a small LP over the affine
/// solution set) and attach the nullspace basis of the constraint matrix.
pub fn convex_coords_general(
    p: Point,
    neighbours: &[Point],
    tol: &Tolerances,
) -> Result<ConvexCoords, GeometryError> {
    let d = neighbours.len();
    if d < 3 {
        return Err(GeometryError::TooFewNeighbours(d));
    }
    // Local frame: translate p to the origin and scale to unit radius.
    let radius = neighbours.iter().map(|&q| (q - p).norm()).fold(0.0, f64::max);
    if radius == 0.0 {
        return Err(GeometryError::CollinearNeighbours);
    }
    let q: Vec<Point> = neighbours.iter().map(|&g| (g - p) * (1.0 / radius)).collect();

    let mut base = if d == 3 {
        barycentric_deg3(Point::new(0.0, 0.0), q[0], q[1], q[2], tol)?.to_vec()
    } else {
        max_min_coefficients(&q, tol)?
    };
    project_onto_constraints(&q, &mut base);
    if base.iter().any(|&v| v <= 0.0) {
        return Err(GeometryError::OutsideHull);
    }
    let nullspace = constraint_nullspace(&q);
    Ok(ConvexCoords { base, nullspace })
}

/// max t  s.t.  Σ z_j q_j = 0, Σ z_j = 1, z_j ≥ t, everything nonnegative.
fn max_min_coefficients(q: &[Point], tol: &Tolerances) -> Result<Vec<f64>, GeometryError> {
    let d = q.len();
    // Variables: z (d), t, surplus s (d).
    let vars = 2 * d + 1;
    let mut rows = Vec::with_capacity(3 + d);
    let mut rhs = Vec::with_capacity(3 + d);
    let mut row_x = vec![0.0; vars];
    let mut row_y = vec![0.0; vars];
    let mut row_sum = vec![0.0; vars];
    for (j, qj) in q.iter().enumerate() {
        row_x[j] = qj.x;
        row_y[j] = qj.y;
        row_sum[j] = 1.0;
    }
    rows.push(row_x);
    rhs.push(0.0);
    rows.push(row_y);
    rhs.push(0.0);
    rows.push(row_sum);
    rhs.push(1.0);
    for j in 0..d {
        let mut row = vec![0.0; vars];
        row[j] = 1.0;
        row[d] = -1.0;
        row[d + 1 + j] = -1.0;
        rows.push(row);
        rhs.push(0.0);
    }
    let mut cost = vec![0.0; vars];
    cost[d] = -1.0; // maximise t
    let lp = StandardLp { rows, rhs, cost };
    match simplex::solve(&lp) {
        Ok(LpOutcome::Optimal { x, .. }) => {
            let t = x[d];
            if t <= tol.eps_pos {
                Err(GeometryError::OutsideHull)
            } else {
                Ok(x[..d].to_vec())
            }
        }
        Ok(LpOutcome::Infeasible) => Err(GeometryError::OutsideHull),
        Ok(LpOutcome::Unbounded) => Err(GeometryError::Numerical("unbounded coefficient LP".into())),
        Err(e) => Err(GeometryError::Numerical(e.to_string())),
    }
}

/// Least-squares re-projection of `z` onto Σ z q = 0, Σ z = 1, clearing the
/// pivot roundoff a simplex basic solution carries.
fn project_onto_constraints(q: &[Point], z: &mut [f64]) {
    let d = q.len();
    let rows: [Vec<f64>; 3] = [
        q.iter().map(|p| p.x).collect(),
        q.iter().map(|p| p.y).collect(),
        vec![1.0; d],
    ];
    let target = [0.0, 0.0, 1.0];
    for _ in 0..2 {
        let mut resid = [0.0; 3];
        for r in 0..3 {
            let dot: f64 = rows[r].iter().zip(z.iter()).map(|(a, b)| a * b).sum();
            resid[r] = target[r] - dot;
        }
        // 3x3 normal matrix M Mᵀ
        let mut gram = [[0.0; 3]; 3];
        for r in 0..3 {
            for c in 0..3 {
                gram[r][c] = rows[r].iter().zip(rows[c].iter()).map(|(a, b)| a * b).sum();
            }
        }
        let Some(lambda) = solve3(&gram, &resid) else { return };
        for j in 0..d {
            z[j] += rows[0][j] * lambda[0] + rows[1][j] * lambda[1] + rows[2][j] * lambda[2];
        }
    }
}

fn solve3(a: &[[f64; 3]; 3], b: &[f64; 3]) -> Option<[f64; 3]> {
    let mut m = *a;
    let mut r = *b;
    for k in 0..3 {
        let piv = (k..3).max_by(|&i, &j| m[i][k].abs().total_cmp(&m[j][k].abs()))?;
        if m[piv][k].abs() < 1e-14 {
            return None;
        }
        m.swap(k, piv);
        r.swap(k, piv);
        for i in k + 1..3 {
            let f = m[i][k] / m[k][k];
            for j in k..3 {
                m[i][j] -= f * m[k][j];
            }
            r[i] -= f * r[k];
        }
    }
    let mut x = [0.0; 3];
    for k in (0..3).rev() {
        let mut s = r[k];
        for j in k + 1..3 {
            s -= m[k][j] * x[j];
        }
        x[k] = s / m[k][k];
    }
    Some(x)
}

/// Unit-norm basis of { v : Σ v_j q_j = 0, Σ v_j = 0 } by elimination on the
/// 3×d constraint matrix. Dimension is d − 3 whenever the neighbours span
/// the plane, which holds for any vertex strictly inside their hull.
fn constraint_nullspace(q: &[Point]) -> Vec<Vec<f64>> {
    let d = q.len();
    let mut m: Vec<Vec<f64>> = vec![
        q.iter().map(|p| p.x).collect(),
        q.iter().map(|p| p.y).collect(),
        vec![1.0; d],
    ];
    let mut pivot_cols: Vec<usize> = Vec::new();
    let mut row = 0;
    for col in 0..d {
        if row == 3 {
            break;
        }
        let best = (row..3).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs())).unwrap();
        if m[best][col].abs() < 1e-12 {
            continue;
        }
        m.swap(row, best);
        let p = m[row][col];
        for v in m[row].iter_mut() {
            *v /= p;
        }
        for i in 0..3 {
            if i != row && m[i][col].abs() > 0.0 {
                let f = m[i][col];
                for j in 0..d {
                    let delta = f * m[row][j];
                    m[i][j] -= delta;
                }
                m[i][col] = 0.0;
            }
        }
        pivot_cols.push(col);
        row += 1;
    }
    let mut basis = Vec::new();
    for free in 0..d {
        if pivot_cols.contains(&free) {
            continue;
        }
        let mut v = vec![0.0; d];
        v[free] = 1.0;
        for (r, &pc) in pivot_cols.iter().enumerate() {
            v[pc] = -m[r][free];
        }
        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        for x in v.iter_mut() {
            *x /= norm;
        }
        basis.push(v);
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn convexity_square_and_dart() {
        let square = [
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ];
        let c = is_convex_polygon(&square, 1e-9);
        assert!(c.convex && c.strict);

        let dart = [
            Point::new(0.0, 0.0),
            Point::new(2.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(2.0, 2.0),
        ];
        assert!(!is_convex_polygon(&dart, 1e-9).convex);
    }

    #[test]
    fn convexity_collinear_flag() {
        let tri = [
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(2.0, 0.0),
            Point::new(1.0, 2.0),
        ];
        let c = is_convex_polygon(&tri, 1e-9);
        assert!(c.convex);
        assert!(!c.strict);
    }

    #[test]
    fn star_polygon_is_not_convex() {
        // Pentagram traversal: consistent turn signs but two revolutions.
        let mut pts = Vec::new();
        for i in 0..5 {
            let a = std::f64::consts::TAU * (2.0 * i as f64) / 5.0;
            pts.push(Point::new(a.cos(), a.sin()));
        }
        assert!(!is_convex_polygon(&pts, 1e-9).convex);
    }

    #[test]
    fn segment_intersection_cases() {
        let e = 1e-9;
        // proper crossing
        assert!(segments_intersect(
            Point::new(0.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
            Point::new(1.0, 0.0),
            e
        ));
        // disjoint
        assert!(!segments_intersect(
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.0, 1.0),
            Point::new(1.0, 1.0),
            e
        ));
        // touching at an interior point
        assert!(segments_intersect(
            Point::new(0.0, 0.0),
            Point::new(2.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            e
        ));
        // collinear overlap
        assert!(segments_intersect(
            Point::new(0.0, 0.0),
            Point::new(2.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(3.0, 0.0),
            e
        ));
    }

    #[test]
    fn hull_drops_collinear_points() {
        let pts = [
            Point::new(0.0, 0.0),
            Point::new(2.0, 0.0),
            Point::new(1.0, 0.0), // on the bottom edge
            Point::new(1.0, 1.0),
            Point::new(0.5, 0.25), // interior
        ];
        let mut h = convex_hull(&pts, 1e-9);
        assert_eq!(h.len(), 3);
        h.sort_unstable();
        assert_eq!(h, vec![0, 1, 3]);
    }

    #[test]
    fn barycentric_centroid() {
        let z = barycentric_deg3(
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.0, 1.0),
            Point::new(-1.0, -1.0),
            &tol(),
        )
        .unwrap();
        for v in z {
            assert!((v - 1.0 / 3.0).abs() < 1e-14);
        }
    }

    #[test]
    fn barycentric_asymmetric() {
        let z = barycentric_deg3(
            Point::new(0.5, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.0, 1.0),
            Point::new(0.0, -1.0),
            &tol(),
        )
        .unwrap();
        assert!((z[0] - 0.5).abs() < 1e-14);
        assert!((z[1] - 0.25).abs() < 1e-14);
        assert!((z[2] - 0.25).abs() < 1e-14);
    }

    #[test]
    fn barycentric_errors() {
        let r = barycentric_deg3(
            Point::new(0.1, 0.1),
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(2.0, 0.0),
            &tol(),
        );
        assert_eq!(r, Err(GeometryError::CollinearNeighbours));

        let r = barycentric_deg3(
            Point::new(2.0, 2.0),
            Point::new(1.0, 0.0),
            Point::new(0.0, 1.0),
            Point::new(-1.0, -1.0),
            &tol(),
        );
        assert_eq!(r, Err(GeometryError::OutsideHull));
    }

    #[test]
    fn coords_degree_four_cross() {
        // Hand solve of the 3x4 system: symmetric diamond, base is uniform
        // and the homogeneous space is spanned by (1, 1, -1, -1).
        let nbrs = [
            Point::new(1.0, 0.0),
            Point::new(-1.0, 0.0),
            Point::new(0.0, 1.0),
            Point::new(0.0, -1.0),
        ];
        let cc = convex_coords_general(Point::new(0.0, 0.0), &nbrs, &tol()).unwrap();
        for v in &cc.base {
            assert!((v - 0.25).abs() < 1e-9, "base {:?}", cc.base);
        }
        assert_eq!(cc.nullspace.len(), 1);
        let v = &cc.nullspace[0];
        let expect = [0.5, 0.5, -0.5, -0.5];
        let sign = if v[0] > 0.0 { 1.0 } else { -1.0 };
        for (a, b) in v.iter().zip(expect.iter()) {
            assert!((a * sign - b).abs() < 1e-9, "nullspace {v:?}");
        }
    }

    #[test]
    fn coords_outside_hull() {
        let nbrs = [
            Point::new(1.0, 0.0),
            Point::new(2.0, 0.0),
            Point::new(1.5, 1.0),
            Point::new(1.5, -1.0),
        ];
        let r = convex_coords_general(Point::new(0.0, 0.0), &nbrs, &tol());
        assert_eq!(r.unwrap_err(), GeometryError::OutsideHull);
    }

    #[test]
    fn coords_nullspace_preserves_constraints() {
        let p = Point::new(0.3, -0.2);
        let nbrs = [
            Point::new(2.0, 0.1),
            Point::new(-1.5, 1.0),
            Point::new(-1.0, -2.0),
            Point::new(1.0, 2.2),
            Point::new(0.5, -2.5),
        ];
        let cc = convex_coords_general(p, &nbrs, &tol()).unwrap();
        assert_eq!(cc.nullspace.len(), 2);
        for v in &cc.nullspace {
            let s: f64 = v.iter().sum();
            let px: f64 = v.iter().zip(nbrs.iter()).map(|(c, q)| c * q.x).sum();
            let py: f64 = v.iter().zip(nbrs.iter()).map(|(c, q)| c * q.y).sum();
            assert!(s.abs() < 1e-10 && px.abs() < 1e-10 && py.abs() < 1e-10);
        }
        // base + small nullspace step keeps both constraints
        let mut z = cc.base.clone();
        for (zi, vi) in z.iter_mut().zip(cc.nullspace[0].iter()) {
            *zi += 1e-3 * vi;
        }
        let s: f64 = z.iter().sum();
        let rx: f64 = z.iter().zip(nbrs.iter()).map(|(c, q)| c * q.x).sum::<f64>() - p.x;
        let ry: f64 = z.iter().zip(nbrs.iter()).map(|(c, q)| c * q.y).sum::<f64>() - p.y;
        assert!((s - 1.0).abs() < 1e-12 && rx.abs() < 1e-12 && ry.abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn barycentric_rigid_motion_invariant(
            dx in -10.0f64..10.0,
            dy in -10.0f64..10.0,
            angle in 0.0f64..std::f64::consts::TAU,
            wa in 0.05f64..1.0,
            wb in 0.05f64..1.0,
            wc in 0.05f64..1.0,
        ) {
            let a = Point::new(1.0, 0.0);
            let b = Point::new(-0.4, 1.1);
            let c = Point::new(-0.6, -0.9);
            let s = wa + wb + wc;
            let p = a * (wa / s) + b * (wb / s) + c * (wc / s);
            let z0 = barycentric_deg3(p, a, b, c, &tol()).unwrap();
            let mv = |q: Point| q.rotated_about(Point::new(0.0, 0.0), angle) + Point::new(dx, dy);
            let z1 = barycentric_deg3(mv(p), mv(a), mv(b), mv(c), &tol()).unwrap();
            for (u, v) in z0.iter().zip(z1.iter()) {
                prop_assert!((u - v).abs() < 1e-10);
            }
        }

        #[test]
        fn convex_coords_reproduce_point(seed in 0u64..500) {
            // pseudo-random star of 4..7 neighbours around a point
            let mut state = seed.wrapping_mul(0x9E3779B97F4A7C15).wrapping_add(1);
            let mut next = || {
                state ^= state >> 12;
                state ^= state << 25;
                state ^= state >> 27;
                (state.wrapping_mul(0x2545F4914F6CDD1D) >> 11) as f64 / (1u64 << 53) as f64
            };
            let d = 4 + (next() * 4.0) as usize;
            let mut nbrs = Vec::new();
            for j in 0..d {
                let ang = std::f64::consts::TAU * (j as f64 + 0.2 * next()) / d as f64;
                let r = 0.5 + next();
                nbrs.push(Point::new(r * ang.cos(), r * ang.sin()));
            }
            let p = Point::new(0.0, 0.0);
            if let Ok(cc) = convex_coords_general(p, &nbrs, &tol()) {
                let s: f64 = cc.base.iter().sum();
                let rx: f64 = cc.base.iter().zip(nbrs.iter()).map(|(c, q)| c * q.x).sum();
                let ry: f64 = cc.base.iter().zip(nbrs.iter()).map(|(c, q)| c * q.y).sum();
                prop_assert!((s - 1.0).abs() < 1e-12);
                prop_assert!(rx.abs() < 1e-12 && ry.abs() < 1e-12);
                prop_assert_eq!(cc.nullspace.len(), d - 3);
            }
        }
    }
}
