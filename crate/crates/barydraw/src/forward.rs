//! The forward weighted barycenter algorithm: fix a convex outer polygon,
//! give every internal edge a positive weight, and place each internal
//! vertex at the weighted average of its neighbours. The classic theorem
//! says the output is planar and every face is convex; `verify_tutte_output`
//! re-checks both as a safety net.

use std::collections::BTreeMap;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::geometry::{self, Point, Tolerances};
use crate::graph::{EdgeKey, EmbeddedDrawing, PlanarGraph};
use crate::linalg;

#[derive(Debug, Error)]
pub enum ForwardError {
    #[error("weight for edge ({0}, {1}) must be strictly positive, got {2}")]
    NonPositiveWeight(usize, usize, f64),
    #[error("missing weight for internal edge ({0}, {1})")]
    MissingWeight(usize, usize),
    #[error("outer polygon is not strictly convex")]
    NonConvexOuterPolygon,
    #[error("outer polygon vertex {0} repeated or out of range")]
    BadOuterVertex(usize),
    #[error("outer cycle edge ({0}, {1}) is not an edge of the graph")]
    OuterEdgeMissing(usize, usize),
    #[error("barycenter system is singular: {0}")]
    SingularSystem(String),
    #[error("solved positions violate the residual bound: {residual:.3e} > {bound:.3e}")]
    ResidualTooLarge { residual: f64, bound: f64 },
}

/// Symmetric positive weights on internal edges, keyed canonically.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct WeightFunction {
    weights: BTreeMap<EdgeKey, f64>,
}

impl WeightFunction {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, key: EdgeKey, w: f64) -> Result<(), ForwardError> {
        if !(w > 0.0) || !w.is_finite() {
            return Err(ForwardError::NonPositiveWeight(key.0, key.1, w));
        }
        self.weights.insert(key, w);
        Ok(())
    }

    pub fn from_entries<I: IntoIterator<Item = (EdgeKey, f64)>>(entries: I) -> Result<Self, ForwardError> {
        let mut wf = Self::new();
        for (k, w) in entries {
            wf.insert(k, w)?;
        }
        Ok(wf)
    }

    /// Unit weight on every internal edge of the drawing.
    pub fn unit_for(drawing: &EmbeddedDrawing) -> Self {
        let mut wf = Self::new();
        for key in drawing.internal_edges() {
            wf.weights.insert(key, 1.0);
        }
        wf
    }

    pub fn get(&self, key: EdgeKey) -> Option<f64> {
        self.weights.get(&key).copied()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (EdgeKey, f64)> + '_ {
        self.weights.iter().map(|(&k, &w)| (k, w))
    }

    /// Globally rescale so the largest weight is one. The barycenter
    /// equations are invariant under a global scale, so this is cosmetic.
    pub fn normalized_max_one(mut self) -> Self {
        let max = self.weights.values().fold(0.0f64, |m, &w| m.max(w));
        if max > 0.0 {
            for w in self.weights.values_mut() {
                *w /= max;
            }
        }
        self
    }

    pub fn scaled(mut self, factor: f64) -> Self {
        for w in self.weights.values_mut() {
            *w *= factor;
        }
        self
    }
}

impl Serialize for WeightFunction {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Entry {
            edge: [usize; 2],
            w: f64,
        }
        serializer.collect_seq(self.weights.iter().map(|(k, &w)| Entry { edge: [k.0, k.1], w }))
    }
}

impl<'de> Deserialize<'de> for WeightFunction {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Entry {
            edge: [usize; 2],
            w: f64,
        }
        let entries = Vec::<Entry>::deserialize(deserializer)?;
        WeightFunction::from_entries(
            entries
                .into_iter()
                .map(|e| (EdgeKey::new(e.edge[0], e.edge[1]), e.w)),
        )
        .map_err(D::Error::custom)
    }
}

/// The fixed outer cycle: vertex ids with their positions, counter-clockwise
/// and strictly convex.
#[derive(Clone, Debug)]
pub struct OuterPolygon {
    ids: Vec<usize>,
    points: Vec<Point>,
}

impl OuterPolygon {
    pub fn new(cycle: Vec<(usize, Point)>, tol: &Tolerances) -> Result<Self, ForwardError> {
        let mut ids: Vec<usize> = cycle.iter().map(|&(v, _)| v).collect();
        let mut points: Vec<Point> = cycle.iter().map(|&(_, p)| p).collect();
        let mut sorted = ids.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != ids.len() || ids.len() < 3 {
            return Err(ForwardError::BadOuterVertex(
                ids.first().copied().unwrap_or(0),
            ));
        }
        let conv = geometry::is_convex_polygon(&points, tol.eps_geom);
        if !conv.strict {
            return Err(ForwardError::NonConvexOuterPolygon);
        }
        if crate::graph::signed_area2(&(0..ids.len()).collect::<Vec<_>>(), &points) < 0.0 {
            ids.reverse();
            points.reverse();
        }
        Ok(Self { ids, points })
    }

    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn point_of(&self, v: usize) -> Option<Point> {
        self.ids.iter().position(|&u| u == v).map(|k| self.points[k])
    }
}

/// Solve the barycenter equations: one pair of linear equations per internal
/// vertex, sharing a single matrix for the x and y systems. Dense LU with
/// partial pivoting; the systems are diagonally dominant and tiny.
pub fn solve_barycenter(
    graph: &PlanarGraph,
    weights: &WeightFunction,
    outer: &OuterPolygon,
    tol: &Tolerances,
) -> Result<Vec<Point>, ForwardError> {
    let n = graph.vertex_count();
    for &v in outer.ids() {
        if v >= n {
            return Err(ForwardError::BadOuterVertex(v));
        }
    }
    for k in 0..outer.len() {
        let i = outer.ids()[k];
        let j = outer.ids()[(k + 1) % outer.len()];
        if !graph.contains_edge(i, j) {
            return Err(ForwardError::OuterEdgeMissing(i, j));
        }
    }
    let external: Vec<bool> = {
        let mut ext = vec![false; n];
        for &v in outer.ids() {
            ext[v] = true;
        }
        ext
    };
    let internal: Vec<usize> = (0..n).filter(|&v| !external[v]).collect();
    let index: BTreeMap<usize, usize> = internal.iter().enumerate().map(|(k, &v)| (v, k)).collect();
    let k = internal.len();

    let mut a = vec![0.0; k * k];
    let mut bx = vec![0.0; k];
    let mut by = vec![0.0; k];
    for (row, &v) in internal.iter().enumerate() {
        let mut wsum = 0.0;
        for &u in graph.neighbours(v) {
            let w = weights
                .get(EdgeKey::new(v, u))
                .ok_or(ForwardError::MissingWeight(v.min(u), v.max(u)))?;
            if !(w > 0.0) {
                return Err(ForwardError::NonPositiveWeight(v.min(u), v.max(u), w));
            }
            wsum += w;
            if let Some(&col) = index.get(&u) {
                a[row * k + col] -= w;
            } else {
                let p = outer
                    .point_of(u)
                    .expect("external vertex is on the outer polygon");
                bx[row] += w * p.x;
                by[row] += w * p.y;
            }
        }
        a[row * k + row] += wsum;
    }
    let lu = linalg::lu_factor(a, k).map_err(|e| ForwardError::SingularSystem(e.to_string()))?;
    let xs = lu.solve(&bx);
    let ys = lu.solve(&by);

    let mut positions = vec![Point::new(0.0, 0.0); n];
    for &v in outer.ids() {
        positions[v] = outer.point_of(v).unwrap();
    }
    for (row, &v) in internal.iter().enumerate() {
        positions[v] = Point::new(xs[row], ys[row]);
    }

    let diag = geometry::bbox_diagonal(&positions);
    let residual = equation_residual(graph, weights, &positions, &external);
    let bound = tol.eps_residual * diag.max(f64::MIN_POSITIVE);
    if residual > bound {
        return Err(ForwardError::ResidualTooLarge { residual, bound });
    }
    Ok(positions)
}

fn equation_residual(
    graph: &PlanarGraph,
    weights: &WeightFunction,
    positions: &[Point],
    external: &[bool],
) -> f64 {
    let mut worst = 0.0f64;
    for v in 0..graph.vertex_count() {
        if external[v] {
            continue;
        }
        let mut wsum = 0.0;
        let mut acc = Point::new(0.0, 0.0);
        for &u in graph.neighbours(v) {
            let w = weights.get(EdgeKey::new(v, u)).unwrap_or(0.0);
            wsum += w;
            acc = acc + positions[u] * w;
        }
        if wsum > 0.0 {
            worst = worst.max((positions[v] - acc * (1.0 / wsum)).norm());
        }
    }
    worst
}

/// Largest barycenter-equation residual over internal vertices, relative to
/// the bbox diagonal. Zero-ish for any valid weighted barycenter drawing.
pub fn max_equation_residual(drawing: &EmbeddedDrawing, weights: &WeightFunction) -> f64 {
    let n = drawing.graph.vertex_count();
    let external: Vec<bool> = (0..n).map(|v| !drawing.is_internal(v)).collect();
    let abs = equation_residual(&drawing.graph, weights, &drawing.positions, &external);
    abs / drawing.bbox_diagonal().max(f64::MIN_POSITIVE)
}

/// Post-conditions of the forward solve, re-checked geometrically.
#[derive(Clone, Debug)]
pub struct TutteReport {
    pub crossing_free: bool,
    pub all_faces_convex: bool,
    pub nonconvex_faces: Vec<Vec<usize>>,
    pub nonstrict_faces: Vec<Vec<usize>>,
    /// Relative residual of the barycenter equations, when weights are given.
    pub max_residual: Option<f64>,
    pub residual_ok: bool,
}

impl TutteReport {
    pub fn ok(&self) -> bool {
        self.crossing_free && self.all_faces_convex && self.residual_ok
    }
}

pub fn verify_tutte_output(
    drawing: &EmbeddedDrawing,
    weights: Option<&WeightFunction>,
    tol: &Tolerances,
) -> TutteReport {
    let crossing_free = drawing.crossing_free(tol);
    let mut nonconvex = Vec::new();
    let mut nonstrict = Vec::new();
    let outer_cycle = drawing.outer_face.clone();
    for face in drawing.faces.iter().chain(std::iter::once(&outer_cycle)) {
        let conv = geometry::is_convex_polygon(&drawing.face_points(face), tol.eps_geom);
        if !conv.convex {
            nonconvex.push(face.clone());
        } else if !conv.strict {
            nonstrict.push(face.clone());
        }
    }
    let max_residual = weights.map(|w| max_equation_residual(drawing, w));
    let residual_ok = max_residual.map_or(true, |r| r <= tol.eps_residual);
    TutteReport {
        crossing_free,
        all_faces_convex: nonconvex.is_empty(),
        nonconvex_faces: nonconvex,
        nonstrict_faces: nonstrict,
        max_residual,
        residual_ok,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn unit_weights(edges: &[(usize, usize)]) -> WeightFunction {
        WeightFunction::from_entries(edges.iter().map(|&(i, j)| (EdgeKey::new(i, j), 1.0))).unwrap()
    }

    fn k4_graph() -> PlanarGraph {
        PlanarGraph::new(4, &[(0, 1), (1, 2), (2, 0), (0, 3), (1, 3), (2, 3)]).unwrap()
    }

    fn triangle_outer() -> OuterPolygon {
        OuterPolygon::new(
            vec![
                (0, Point::new(0.0, 0.0)),
                (1, Point::new(4.0, 0.0)),
                (2, Point::new(2.0, 4.0)),
            ],
            &tol(),
        )
        .unwrap()
    }

    #[test]
    fn k4_hub_lands_at_centroid() {
        let g = k4_graph();
        let w = unit_weights(&[(0, 3), (1, 3), (2, 3)]);
        let pos = solve_barycenter(&g, &w, &triangle_outer(), &tol()).unwrap();
        assert!((pos[3].x - 2.0).abs() < 1e-12);
        assert!((pos[3].y - 4.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn prism_inner_triangle_scales_by_quarter() {
        let mut edges = Vec::new();
        for i in 0..3 {
            edges.push((i, (i + 1) % 3));
            edges.push((3 + i, 3 + (i + 1) % 3));
            edges.push((i, 3 + i));
        }
        let g = PlanarGraph::new(6, &edges).unwrap();
        let internal: Vec<(usize, usize)> = edges.iter().copied().filter(|&(i, j)| i >= 3 || j >= 3).collect();
        let w = unit_weights(&internal);
        let outer_pts: Vec<Point> = (0..3)
            .map(|i| {
                let a = std::f64::consts::TAU * (0.25 + i as f64 / 3.0);
                Point::new(a.cos(), a.sin())
            })
            .collect();
        let outer = OuterPolygon::new((0..3).map(|i| (i, outer_pts[i])).collect(), &tol()).unwrap();
        let pos = solve_barycenter(&g, &w, &outer, &tol()).unwrap();
        for i in 0..3 {
            assert!((pos[3 + i] - outer_pts[i] * 0.25).norm() < 1e-12);
        }
    }

    #[test]
    fn doubling_weights_changes_nothing() {
        let g = k4_graph();
        let w = WeightFunction::from_entries([
            (EdgeKey::new(0, 3), 0.7),
            (EdgeKey::new(1, 3), 1.9),
            (EdgeKey::new(2, 3), 3.1),
        ])
        .unwrap();
        let p1 = solve_barycenter(&g, &w, &triangle_outer(), &tol()).unwrap();
        let p2 = solve_barycenter(&g, &w.clone().scaled(2.0), &triangle_outer(), &tol()).unwrap();
        for (a, b) in p1.iter().zip(p2.iter()) {
            assert!(a.dist(*b) < 1e-12);
        }
    }

    #[test]
    fn permuted_vertex_order_gives_same_positions() {
        // relabel the prism: swap ids 3 and 5
        let mut edges = Vec::new();
        for i in 0..3 {
            edges.push((i, (i + 1) % 3));
            edges.push((3 + i, 3 + (i + 1) % 3));
            edges.push((i, 3 + i));
        }
        let perm = |v: usize| match v {
            3 => 5,
            5 => 3,
            other => other,
        };
        let edges_p: Vec<(usize, usize)> = edges.iter().map(|&(i, j)| (perm(i), perm(j))).collect();
        let g1 = PlanarGraph::new(6, &edges).unwrap();
        let g2 = PlanarGraph::new(6, &edges_p).unwrap();
        let internal: Vec<(usize, usize)> = edges.iter().copied().filter(|&(i, j)| i >= 3 || j >= 3).collect();
        let w1 = WeightFunction::from_entries(
            internal
                .iter()
                .enumerate()
                .map(|(k, &(i, j))| (EdgeKey::new(i, j), 0.5 + k as f64)),
        )
        .unwrap();
        let w2 = WeightFunction::from_entries(
            internal
                .iter()
                .enumerate()
                .map(|(k, &(i, j))| (EdgeKey::new(perm(i), perm(j)), 0.5 + k as f64)),
        )
        .unwrap();
        let outer_pts: Vec<Point> = (0..3)
            .map(|i| {
                let a = std::f64::consts::TAU * (0.25 + i as f64 / 3.0);
                Point::new(a.cos(), a.sin())
            })
            .collect();
        let outer = OuterPolygon::new((0..3).map(|i| (i, outer_pts[i])).collect(), &tol()).unwrap();
        let p1 = solve_barycenter(&g1, &w1, &outer, &tol()).unwrap();
        let p2 = solve_barycenter(&g2, &w2, &outer, &tol()).unwrap();
        for v in 0..6 {
            assert!(p1[v].dist(p2[perm(v)]) < 1e-10);
        }
    }

    #[test]
    fn missing_weight_is_reported() {
        let g = k4_graph();
        let w = unit_weights(&[(0, 3), (1, 3)]);
        let err = solve_barycenter(&g, &w, &triangle_outer(), &tol()).unwrap_err();
        assert!(matches!(err, ForwardError::MissingWeight(2, 3)));
    }

    #[test]
    fn nonconvex_outer_rejected() {
        let r = OuterPolygon::new(
            vec![
                (0, Point::new(0.0, 0.0)),
                (1, Point::new(2.0, 0.0)),
                (2, Point::new(1.0, 1.0)),
                (3, Point::new(2.0, 2.0)),
            ],
            &tol(),
        );
        assert!(matches!(r, Err(ForwardError::NonConvexOuterPolygon)));
    }

    #[test]
    fn verify_flags_perturbed_drawing() {
        let g = k4_graph();
        let w = unit_weights(&[(0, 3), (1, 3), (2, 3)]);
        let mut pos = solve_barycenter(&g, &w, &triangle_outer(), &tol()).unwrap();
        let edges = vec![(0, 1), (1, 2), (2, 0), (0, 3), (1, 3), (2, 3)];
        let d = EmbeddedDrawing::from_positions(4, &edges, pos.clone(), None, &tol()).unwrap();
        let report = verify_tutte_output(&d, Some(&w), &tol());
        assert!(report.ok());

        pos[3] = pos[3] + Point::new(0.5, 0.0);
        let d = EmbeddedDrawing::from_positions(4, &edges, pos, None, &tol()).unwrap();
        let report = verify_tutte_output(&d, Some(&w), &tol());
        assert!(report.crossing_free && report.all_faces_convex);
        assert!(!report.residual_ok);
        assert!(!report.ok());
    }
}
