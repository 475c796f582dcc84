//! Recognition of weighted barycenter drawings.
//!
//! Every internal vertex of a valid convex drawing is a convex combination
//! of its neighbours. The combination coefficients are directed (the two
//! endpoints of an edge each have their own), while barycenter weights are
//! symmetric; the recogniser therefore looks for per-vertex scale factors
//! that make the directed coefficients agree. Such factors exist exactly
//! when, around every strictly internal face, the product of the
//! opposite-coefficient ratios is one. Cubic interiors have unique
//! coefficients, so the face products decide outright; higher degrees leave
//! per-vertex solution spaces, and an LP strict-feasibility oracle (or an
//! explicitly heuristic nullspace search) settles those.

use std::collections::BTreeMap;

use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::forward::{max_equation_residual, ForwardError, WeightFunction};
use crate::geometry::{self, GeometryError, Tolerances};
use crate::graph::{EdgeClass, EdgeKey, EmbeddedDrawing, Forest, InvalidReason};
use crate::io::DrawingDocument;
use crate::linalg;
use crate::lp;

#[derive(Debug, Error)]
pub enum RecognizerError {
    #[error("vertex {vertex}: {source}")]
    Coeff { vertex: usize, source: GeometryError },
    #[error("no coefficient ratio for directed edge ({0}, {1}): endpoint is external")]
    MissingDirection(usize, usize),
    #[error("weight asymmetry {residual:.3e} on edge ({i}, {j}) exceeds tolerance")]
    AsymmetryResidual { i: usize, j: usize, residual: f64 },
    #[error("missing weight for edge ({0}, {1})")]
    MissingWeight(usize, usize),
}

/// Per-vertex convex-combination coefficients on directed edges out of
/// internal vertices, plus the homogeneous solution bases for vertices of
/// degree above three.
#[derive(Clone, Debug, Default)]
pub struct BarycentricCoeffs {
    coeff: BTreeMap<(usize, usize), f64>,
    order: BTreeMap<usize, Vec<usize>>,
    nullspace: BTreeMap<usize, Vec<Vec<f64>>>,
}

impl BarycentricCoeffs {
    pub fn get(&self, from: usize, to: usize) -> Option<f64> {
        self.coeff.get(&(from, to)).copied()
    }

    /// Neighbour order the per-vertex coefficient vectors refer to.
    pub fn neighbour_order(&self, v: usize) -> Option<&[usize]> {
        self.order.get(&v).map(|o| o.as_slice())
    }

    pub fn base_vector(&self, v: usize) -> Option<Vec<f64>> {
        let order = self.order.get(&v)?;
        Some(order.iter().map(|&u| self.coeff[&(v, u)]).collect())
    }

    pub fn nullspace(&self, v: usize) -> &[Vec<f64>] {
        self.nullspace.get(&v).map(|b| b.as_slice()).unwrap_or(&[])
    }

    pub fn nullspace_dim(&self, v: usize) -> usize {
        self.nullspace(v).len()
    }

    fn set_vertex(&mut self, v: usize, order: Vec<usize>, base: &[f64], nullspace: Vec<Vec<f64>>) {
        for (&u, &z) in order.iter().zip(base.iter()) {
            self.coeff.insert((v, u), z);
        }
        self.order.insert(v, order);
        if !nullspace.is_empty() {
            self.nullspace.insert(v, nullspace);
        }
    }

    /// Largest violation of the combination constraints, relative to the
    /// drawing diagonal: coefficients must sum to one and reproduce the
    /// vertex position.
    pub fn max_residual(&self, drawing: &EmbeddedDrawing) -> f64 {
        let diag = drawing.bbox_diagonal().max(f64::MIN_POSITIVE);
        let mut worst = 0.0f64;
        for (&v, order) in &self.order {
            let mut sum = 0.0;
            let mut acc = geometry::Point::new(0.0, 0.0);
            for &u in order {
                let z = self.coeff[&(v, u)];
                sum += z;
                acc = acc + drawing.position(u) * z;
            }
            worst = worst.max((sum - 1.0).abs());
            worst = worst.max(acc.dist(drawing.position(v)) / diag);
        }
        worst
    }
}

/// Solve the combination coefficients for every internal vertex. Degree-3
/// vertices get the unique barycentric solution; higher degrees get the
/// max-min-positive base plus a nullspace basis.
pub fn compute_coeffs(
    drawing: &EmbeddedDrawing,
    tol: &Tolerances,
) -> Result<BarycentricCoeffs, RecognizerError> {
    let mut coeffs = BarycentricCoeffs::default();
    for v in drawing.internal_vertices() {
        let order: Vec<usize> = drawing.graph.rotation(v).to_vec();
        let points: Vec<geometry::Point> = order.iter().map(|&u| drawing.position(u)).collect();
        let cc = geometry::convex_coords_general(drawing.position(v), &points, tol)
            .map_err(|source| RecognizerError::Coeff { vertex: v, source })?;
        coeffs.set_vertex(v, order, &cc.base, cc.nullspace);
    }
    Ok(coeffs)
}

/// Coefficients induced by a symmetric weight function: each internal vertex
/// normalises its incident weights. Any valid weight function yields
/// coefficients whose ratio products telescope to one around every cycle.
pub fn coeffs_from_weights(
    drawing: &EmbeddedDrawing,
    weights: &WeightFunction,
) -> Result<BarycentricCoeffs, RecognizerError> {
    let mut coeffs = BarycentricCoeffs::default();
    for v in drawing.internal_vertices() {
        let order: Vec<usize> = drawing.graph.rotation(v).to_vec();
        let mut ws = Vec::with_capacity(order.len());
        for &u in &order {
            let w = weights
                .get(EdgeKey::new(v, u))
                .ok_or(RecognizerError::MissingWeight(v.min(u), v.max(u)))?;
            ws.push(w);
        }
        let total: f64 = ws.iter().sum();
        let base: Vec<f64> = ws.iter().map(|w| w / total).collect();
        coeffs.set_vertex(v, order, &base, Vec::new());
    }
    Ok(coeffs)
}

/// Ratios of opposite coefficients on strictly internal directed edges:
/// `ratio(i, j) = coeff(j, i) / coeff(i, j)`.
#[derive(Clone, Debug, Default)]
pub struct CoeffRatios {
    ratio: BTreeMap<(usize, usize), f64>,
}

impl CoeffRatios {
    pub fn get(&self, from: usize, to: usize) -> Option<f64> {
        self.ratio.get(&(from, to)).copied()
    }

    pub fn try_get(&self, from: usize, to: usize) -> Result<f64, RecognizerError> {
        self.get(from, to)
            .ok_or(RecognizerError::MissingDirection(from, to))
    }
}

pub fn coeff_ratios(coeffs: &BarycentricCoeffs, drawing: &EmbeddedDrawing) -> CoeffRatios {
    let mut ratios = CoeffRatios::default();
    for key in drawing.strictly_internal_edges() {
        let (i, j) = key.endpoints();
        let zij = coeffs.get(i, j).expect("internal vertex has coefficients");
        let zji = coeffs.get(j, i).expect("internal vertex has coefficients");
        ratios.ratio.insert((i, j), zji / zij);
        ratios.ratio.insert((j, i), zij / zji);
    }
    ratios
}

/// Log-space ratio product around one strictly internal face.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FaceResidual {
    /// Index into the drawing's interior face list.
    pub face_index: usize,
    pub log_residual: f64,
}

/// |Σ ln ratio| around each strictly internal facial cycle. Zero (within
/// tolerance) on every face exactly when consistent scale factors exist.
pub fn face_log_products(ratios: &CoeffRatios, drawing: &EmbeddedDrawing) -> Vec<FaceResidual> {
    let mut out = Vec::new();
    for fi in drawing.strictly_internal_faces() {
        let face = &drawing.faces[fi];
        let mut sum = 0.0;
        for k in 0..face.len() {
            let i = face[k];
            let j = face[(k + 1) % face.len()];
            let r = ratios.get(i, j).expect("strictly internal face edge has a ratio");
            sum += r.ln();
        }
        out.push(FaceResidual { face_index: fi, log_residual: sum.abs() });
    }
    out
}

/// Per-vertex scale factors making the directed coefficients symmetric,
/// root-normalised to one per interior component.
#[derive(Clone, Debug, Default)]
pub struct ScaleFactors {
    scale: BTreeMap<usize, f64>,
    pub roots: Vec<usize>,
}

impl ScaleFactors {
    pub fn get(&self, v: usize) -> Option<f64> {
        self.scale.get(&v).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.scale.iter().map(|(&v, &s)| (v, s))
    }

    pub fn all_positive(&self) -> bool {
        self.scale.values().all(|&s| s > 0.0)
    }
}

/// Walk each interior tree from its root, accumulating ratio products along
/// the path. The direction is fixed by the symmetry requirement itself:
/// for a tree edge (parent, child),
///   s_child · coeff(child, parent) = s_parent · coeff(parent, child),
/// so the child picks up the factor ratio(child, parent).
pub fn propagate_scales(forest: &Forest, ratios: &CoeffRatios) -> ScaleFactors {
    let mut scales = ScaleFactors { scale: BTreeMap::new(), roots: forest.roots.clone() };
    for &r in &forest.roots {
        scales.scale.insert(r, 1.0);
    }
    for &v in &forest.preorder {
        if let Some(&p) = forest.parent.get(&v) {
            let sp = scales.scale[&p];
            let r = ratios
                .get(v, p)
                .expect("forest edges are strictly internal and carry ratios");
            scales.scale.insert(v, sp * r);
        }
    }
    scales
}

/// Largest relative violation of the symmetry equations over all strictly
/// internal edges. Tree edges are exact by construction; back edges are the
/// actual check and pass precisely when every face product does.
pub fn verify_scales(scales: &ScaleFactors, ratios: &CoeffRatios, drawing: &EmbeddedDrawing) -> f64 {
    let mut worst = 0.0f64;
    for key in drawing.strictly_internal_edges() {
        let (i, j) = key.endpoints();
        let (si, sj) = (scales.get(i).unwrap_or(1.0), scales.get(j).unwrap_or(1.0));
        let r = ratios.get(i, j).expect("strictly internal edge has a ratio");
        worst = worst.max((si - r * sj).abs() / si.abs().max(f64::MIN_POSITIVE));
    }
    worst
}

/// Combine scales and coefficients into symmetric weights, normalised so the
/// maximum weight is one. Strictly internal edges are stored once with the
/// two sides averaged; edges with a single internal endpoint inherit that
/// endpoint's scale (the other side has no coefficient to reconcile).
pub fn assemble_weights(
    scales: &ScaleFactors,
    coeffs: &BarycentricCoeffs,
    drawing: &EmbeddedDrawing,
    tol: &Tolerances,
) -> Result<WeightFunction, RecognizerError> {
    let mut entries = Vec::new();
    for key in drawing.internal_edges() {
        let (a, b) = key.endpoints();
        let w = match drawing.edge_class(key) {
            Some(EdgeClass::StrictlyInternal) => {
                let wa = scales.get(a).unwrap_or(1.0) * coeffs.get(a, b).unwrap();
                let wb = scales.get(b).unwrap_or(1.0) * coeffs.get(b, a).unwrap();
                let residual = (wa - wb).abs() / wa.abs().max(wb.abs()).max(f64::MIN_POSITIVE);
                if residual > 10.0 * tol.eps_cycle {
                    return Err(RecognizerError::AsymmetryResidual { i: a, j: b, residual });
                }
                0.5 * (wa + wb)
            }
            _ => {
                let (int, ext) = if drawing.is_internal(a) { (a, b) } else { (b, a) };
                scales.get(int).unwrap_or(1.0) * coeffs.get(int, ext).unwrap()
            }
        };
        entries.push((key, w));
    }
    let wf = WeightFunction::from_entries(entries).map_err(|e| match e {
        ForwardError::NonPositiveWeight(i, j, w) => RecognizerError::AsymmetryResidual {
            i,
            j,
            residual: w,
        },
        _ => unreachable!("only positivity can fail here"),
    })?;
    Ok(wf.normalized_max_one())
}

/// Rank of the weighted incidence matrix of the scale equations: rows are
/// internal vertices, columns strictly internal edges, entries the two
/// directed coefficients with opposite signs. Rank n_internal − 1 signals a
/// nontrivial scale solution on a connected interior; full rank means none.
pub fn incidence_rank(coeffs: &BarycentricCoeffs, drawing: &EmbeddedDrawing) -> usize {
    let internal = drawing.internal_vertices();
    let index: BTreeMap<usize, usize> = internal.iter().enumerate().map(|(k, &v)| (v, k)).collect();
    let columns = drawing.strictly_internal_edges();
    if columns.is_empty() {
        return 0;
    }
    let mut rows = vec![vec![0.0; columns.len()]; internal.len()];
    for (c, key) in columns.iter().enumerate() {
        let (a, b) = key.endpoints();
        rows[index[&a]][c] = coeffs.get(a, b).unwrap();
        rows[index[&b]][c] = -coeffs.get(b, a).unwrap();
    }
    linalg::rank(rows, 1e-9)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RecognizeMode {
    /// LP strict-feasibility oracle for general degrees (the default).
    Exact,
    /// Nullspace local search; accepts only with a verified witness.
    Heuristic,
    /// Face-product decision only; errors out on non-cubic interiors.
    CubicOnly,
}

impl Default for RecognizeMode {
    fn default() -> Self {
        RecognizeMode::Exact
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Accepted,
    Rejected,
    Invalid,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FaceCertificate {
    pub face_index: usize,
    pub vertices: Vec<usize>,
    pub log_residual: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    /// Barycenter-equation residual of the recovered weights, relative.
    pub max_barycenter: Option<f64>,
    /// Worst symmetry residual of the propagated scales.
    pub max_scale: Option<f64>,
    /// Worst face log-product residual.
    pub max_face: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RecognitionResult {
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<WeightFunction>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<FaceCertificate>,
    pub residuals: ResidualReport,
    /// False only for a heuristic-mode non-accept, which is one-sided.
    pub conclusive: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl RecognitionResult {
    fn invalid(reason: InvalidReason) -> Self {
        Self {
            verdict: Verdict::Invalid,
            weights: None,
            certificate: None,
            residuals: ResidualReport::default(),
            conclusive: true,
            reason: Some(reason.to_string()),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct HeuristicBudget {
    pub starts: usize,
    pub iters: usize,
}

impl Default for HeuristicBudget {
    fn default() -> Self {
        Self { starts: 100, iters: 500 }
    }
}

#[derive(Clone, Debug)]
pub struct RecognizeOptions {
    pub mode: RecognizeMode,
    pub tol: Tolerances,
    pub budget: HeuristicBudget,
    /// Seed for the heuristic's multi-start generator.
    pub seed: u64,
}

impl Default for RecognizeOptions {
    fn default() -> Self {
        Self {
            mode: RecognizeMode::Exact,
            tol: Tolerances::default(),
            budget: HeuristicBudget::default(),
            seed: 0,
        }
    }
}

/// Decide whether the drawing is a weighted barycenter drawing.
///
/// Dispatch: trivially invalid drawings (crossings, non-convex faces, hull
/// mismatch, vertices on their neighbour hulls) are `Invalid`; interiors
/// without strictly internal cycles are accepted by direct propagation;
/// cubic interiors are decided by the face products; anything else goes to
/// the LP oracle (exact) or the nullspace search (heuristic).
pub fn recognize(drawing: &EmbeddedDrawing, mode: RecognizeMode) -> RecognitionResult {
    recognize_with(drawing, &RecognizeOptions { mode, ..RecognizeOptions::default() })
}

pub fn recognize_with(drawing: &EmbeddedDrawing, opts: &RecognizeOptions) -> RecognitionResult {
    let tol = &opts.tol;
    if let Err(reason) = drawing.validate(tol) {
        return RecognitionResult::invalid(reason);
    }
    let coeffs = match compute_coeffs(drawing, tol) {
        Ok(c) => c,
        Err(RecognizerError::Coeff { vertex, source }) => {
            let reason = match source {
                GeometryError::CollinearNeighbours => InvalidReason::CollinearNeighbours { vertex },
                _ => InvalidReason::VertexOnNeighbourHull { vertex },
            };
            return RecognitionResult::invalid(reason);
        }
        Err(e) => {
            return RecognitionResult::invalid(InvalidReason::BuildFailed { message: e.to_string() })
        }
    };

    let cubic = drawing
        .internal_vertices()
        .iter()
        .all(|&v| drawing.graph.degree(v) == 3);
    if opts.mode == RecognizeMode::CubicOnly && !cubic {
        return RecognitionResult::invalid(InvalidReason::UnsupportedMode {
            message: "cubic-only mode on an interior with a vertex of degree above three".into(),
        });
    }

    // No strictly internal cycle means the scale equations are a forest:
    // propagation always succeeds, whatever the degrees.
    if drawing.strictly_internal_faces().is_empty() {
        return accept_by_propagation(drawing, &coeffs, tol);
    }

    if cubic {
        return cubic_path(drawing, &coeffs, tol);
    }

    match opts.mode {
        RecognizeMode::Exact => exact_path(drawing, &coeffs, tol),
        RecognizeMode::Heuristic => heuristic_path(drawing, &coeffs, opts),
        RecognizeMode::CubicOnly => unreachable!("handled above"),
    }
}

/// Build a drawing from a document and recognize it; document-level failures
/// become `Invalid` results rather than errors.
pub fn recognize_document(doc: &DrawingDocument, opts: &RecognizeOptions) -> RecognitionResult {
    match doc.to_drawing(&opts.tol) {
        Ok((drawing, _)) => recognize_with(&drawing, opts),
        Err(e) => RecognitionResult::invalid(InvalidReason::BuildFailed { message: e.to_string() }),
    }
}

fn worst_face(residuals: &[FaceResidual]) -> Option<&FaceResidual> {
    residuals
        .iter()
        .max_by(|a, b| a.log_residual.total_cmp(&b.log_residual))
}

fn certificate_for(drawing: &EmbeddedDrawing, fr: &FaceResidual) -> FaceCertificate {
    FaceCertificate {
        face_index: fr.face_index,
        vertices: drawing.faces[fr.face_index].clone(),
        log_residual: fr.log_residual,
    }
}

fn accept_by_propagation(
    drawing: &EmbeddedDrawing,
    coeffs: &BarycentricCoeffs,
    tol: &Tolerances,
) -> RecognitionResult {
    let ratios = coeff_ratios(coeffs, drawing);
    let face_residuals = face_log_products(&ratios, drawing);
    let forest = drawing.internal_subgraph_forest();
    let scales = propagate_scales(&forest, &ratios);
    let max_scale = verify_scales(&scales, &ratios, drawing);
    match assemble_weights(&scales, coeffs, drawing, tol) {
        Ok(weights) => {
            let max_barycenter = max_equation_residual(drawing, &weights);
            RecognitionResult {
                verdict: Verdict::Accepted,
                weights: Some(weights),
                certificate: None,
                residuals: ResidualReport {
                    max_barycenter: Some(max_barycenter),
                    max_scale: Some(max_scale),
                    max_face: worst_face(&face_residuals).map(|f| f.log_residual),
                },
                conclusive: true,
                reason: None,
            }
        }
        Err(e) => RecognitionResult::invalid(InvalidReason::BuildFailed {
            message: format!("internal consistency failure: {e}"),
        }),
    }
}

fn cubic_path(
    drawing: &EmbeddedDrawing,
    coeffs: &BarycentricCoeffs,
    tol: &Tolerances,
) -> RecognitionResult {
    let ratios = coeff_ratios(coeffs, drawing);
    let face_residuals = face_log_products(&ratios, drawing);
    let worst = worst_face(&face_residuals).cloned();
    match worst {
        Some(w) if w.log_residual > tol.eps_cycle => RecognitionResult {
            verdict: Verdict::Rejected,
            weights: None,
            certificate: Some(certificate_for(drawing, &w)),
            residuals: ResidualReport {
                max_barycenter: None,
                max_scale: None,
                max_face: Some(w.log_residual),
            },
            conclusive: true,
            reason: None,
        },
        _ => accept_by_propagation(drawing, coeffs, tol),
    }
}

fn exact_path(
    drawing: &EmbeddedDrawing,
    coeffs: &BarycentricCoeffs,
    tol: &Tolerances,
) -> RecognitionResult {
    let problem = lp::build_feasibility(drawing);
    match lp::solve_strict_feasibility(&problem, tol) {
        Ok(lp::OracleResult::Feasible { weights, .. }) => {
            let weights = weights.normalized_max_one();
            // Reconstruct the witness coefficients to report all residuals.
            let (max_scale, max_face) = match coeffs_from_weights(drawing, &weights) {
                Ok(wc) => {
                    let ratios = coeff_ratios(&wc, drawing);
                    let faces = face_log_products(&ratios, drawing);
                    let forest = drawing.internal_subgraph_forest();
                    let scales = propagate_scales(&forest, &ratios);
                    (
                        Some(verify_scales(&scales, &ratios, drawing)),
                        worst_face(&faces).map(|f| f.log_residual),
                    )
                }
                Err(_) => (None, None),
            };
            let max_barycenter = max_equation_residual(drawing, &weights);
            RecognitionResult {
                verdict: Verdict::Accepted,
                weights: Some(weights),
                certificate: None,
                residuals: ResidualReport {
                    max_barycenter: Some(max_barycenter),
                    max_scale,
                    max_face,
                },
                conclusive: true,
                reason: None,
            }
        }
        Ok(lp::OracleResult::Infeasible) => {
            // No valid coefficient choice can pass every face, so the base
            // coefficients' worst face is a sound certificate.
            let ratios = coeff_ratios(coeffs, drawing);
            let faces = face_log_products(&ratios, drawing);
            let worst = worst_face(&faces).cloned();
            RecognitionResult {
                verdict: Verdict::Rejected,
                weights: None,
                certificate: worst.as_ref().map(|w| certificate_for(drawing, w)),
                residuals: ResidualReport {
                    max_barycenter: None,
                    max_scale: None,
                    max_face: worst.map(|w| w.log_residual),
                },
                conclusive: true,
                reason: None,
            }
        }
        Err(e) => RecognitionResult {
            verdict: Verdict::Invalid,
            weights: None,
            certificate: None,
            residuals: ResidualReport::default(),
            conclusive: false,
            reason: Some(format!("feasibility oracle failed: {e}")),
        },
    }
}

fn heuristic_path(
    drawing: &EmbeddedDrawing,
    coeffs: &BarycentricCoeffs,
    opts: &RecognizeOptions,
) -> RecognitionResult {
    match nullspace_search(coeffs, drawing, &opts.budget, &opts.tol, opts.seed) {
        SearchOutcome::Found(witness) => accept_by_propagation(drawing, &witness, &opts.tol),
        SearchOutcome::Exhausted { best, best_residual } => {
            let ratios = coeff_ratios(&best, drawing);
            let faces = face_log_products(&ratios, drawing);
            let worst = worst_face(&faces).cloned();
            RecognitionResult {
                verdict: Verdict::Rejected,
                weights: None,
                certificate: worst.as_ref().map(|w| certificate_for(drawing, w)),
                residuals: ResidualReport {
                    max_barycenter: None,
                    max_scale: None,
                    max_face: Some(best_residual),
                },
                conclusive: false,
                reason: Some("heuristic budget exhausted without a witness".into()),
            }
        }
    }
}

#[derive(Clone, Debug)]
pub enum SearchOutcome {
    Found(BarycentricCoeffs),
    Exhausted { best: Box<BarycentricCoeffs>, best_residual: f64 },
}

/// Multi-start projected gradient descent over the per-vertex nullspaces,
/// minimising the sum of squared face log-products. Positivity is kept by
/// shrinking steps that would push any coefficient to the floor; every
/// iterate stays an exact convex-combination solution, so a returned witness
/// is checked only against the face products.
pub fn nullspace_search(
    base: &BarycentricCoeffs,
    drawing: &EmbeddedDrawing,
    budget: &HeuristicBudget,
    tol: &Tolerances,
    seed: u64,
) -> SearchOutcome {
    let face_idx = drawing.strictly_internal_faces();
    let worst_of = |c: &BarycentricCoeffs| -> f64 {
        let ratios = coeff_ratios(c, drawing);
        face_log_products(&ratios, drawing)
            .iter()
            .map(|f| f.log_residual)
            .fold(0.0, f64::max)
    };
    if face_idx.is_empty() || worst_of(base) <= tol.eps_cycle {
        return SearchOutcome::Found(base.clone());
    }

    // Parameter blocks: internal vertices with free coefficient directions.
    let free: Vec<(usize, usize)> = base
        .order
        .keys()
        .filter_map(|&v| {
            let d = base.nullspace_dim(v);
            (d > 0).then_some((v, d))
        })
        .collect();
    if free.is_empty() {
        return SearchOutcome::Exhausted { best: Box::new(base.clone()), best_residual: worst_of(base) };
    }

    let floor = tol.eps_pos;
    let apply = |params: &BTreeMap<usize, Vec<f64>>| -> Option<BarycentricCoeffs> {
        let mut out = base.clone();
        for (&v, c) in params {
            let order = base.order[&v].clone();
            let mut z = base.base_vector(v).unwrap();
            for (k, basis_vec) in base.nullspace(v).iter().enumerate() {
                for (slot, b) in basis_vec.iter().enumerate() {
                    z[slot] += c[k] * b;
                }
            }
            if z.iter().any(|&zi| zi < floor) {
                return None;
            }
            out.set_vertex(v, order, &z, base.nullspace(v).to_vec());
        }
        Some(out)
    };

    // Objective and its gradient in parameter space.
    let evaluate = |coeffs: &BarycentricCoeffs| -> (f64, BTreeMap<usize, Vec<f64>>) {
        let mut grad_z: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        let mut objective = 0.0;
        for &fi in &face_idx {
            let face = &drawing.faces[fi];
            let mut log_sum = 0.0;
            for k in 0..face.len() {
                let (i, j) = (face[k], face[(k + 1) % face.len()]);
                log_sum += (coeffs.get(j, i).unwrap() / coeffs.get(i, j).unwrap()).ln();
            }
            objective += log_sum * log_sum;
            for k in 0..face.len() {
                let (i, j) = (face[k], face[(k + 1) % face.len()]);
                *grad_z.entry((i, j)).or_insert(0.0) += -2.0 * log_sum / coeffs.get(i, j).unwrap();
                *grad_z.entry((j, i)).or_insert(0.0) += 2.0 * log_sum / coeffs.get(j, i).unwrap();
            }
        }
        let mut grad = BTreeMap::new();
        for &(v, dim) in &free {
            let order = &base.order[&v];
            let mut gv = vec![0.0; dim];
            for (k, basis_vec) in base.nullspace(v).iter().enumerate() {
                for (slot, &u) in order.iter().enumerate() {
                    if let Some(g) = grad_z.get(&(v, u)) {
                        gv[k] += g * basis_vec[slot];
                    }
                }
            }
            grad.insert(v, gv);
        }
        (objective, grad)
    };

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut uniform = move || (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;

    let mut best: Option<(f64, BarycentricCoeffs)> = None;
    for start in 0..budget.starts {
        let mut params: BTreeMap<usize, Vec<f64>> = free
            .iter()
            .map(|&(v, d)| (v, vec![0.0; d]))
            .collect();
        if start > 0 {
            // Random point: walk from the base towards the positivity
            // boundary along a random direction.
            for (&v, c) in params.iter_mut() {
                let dir: Vec<f64> = (0..c.len()).map(|_| 2.0 * uniform() - 1.0).collect();
                let z = base.base_vector(v).unwrap();
                let mut max_step = f64::INFINITY;
                for (slot, &zi) in z.iter().enumerate() {
                    let mut delta = 0.0;
                    for (k, basis_vec) in base.nullspace(v).iter().enumerate() {
                        delta += dir[k] * basis_vec[slot];
                    }
                    if delta < 0.0 {
                        max_step = max_step.min((zi - 2.0 * floor) / -delta);
                    }
                }
                let step = if max_step.is_finite() { max_step * 0.8 * uniform() } else { uniform() };
                for (ck, dk) in c.iter_mut().zip(dir.iter()) {
                    *ck = step * dk;
                }
            }
            if apply(&params).is_none() {
                continue;
            }
        }

        let mut current = apply(&params).expect("start point is feasible");
        let (mut f_cur, mut grad) = evaluate(&current);
        for _ in 0..budget.iters {
            let w = worst_of(&current);
            if w <= tol.eps_cycle {
                return SearchOutcome::Found(current);
            }
            let gnorm2: f64 = grad.values().flat_map(|g| g.iter().map(|x| x * x)).sum();
            if gnorm2 < 1e-24 {
                break;
            }
            let mut step = 0.25 / (1.0 + gnorm2.sqrt());
            let mut advanced = false;
            for _ in 0..30 {
                let mut trial = params.clone();
                for (v, c) in trial.iter_mut() {
                    for (ck, gk) in c.iter_mut().zip(grad[v].iter()) {
                        *ck -= step * gk;
                    }
                }
                if let Some(cand) = apply(&trial) {
                    let (f_new, g_new) = evaluate(&cand);
                    if f_new < f_cur - 1e-4 * step * gnorm2 {
                        params = trial;
                        current = cand;
                        f_cur = f_new;
                        grad = g_new;
                        advanced = true;
                        break;
                    }
                }
                step *= 0.5;
            }
            if !advanced {
                break;
            }
        }
        let w = worst_of(&current);
        if w <= tol.eps_cycle {
            return SearchOutcome::Found(current);
        }
        if best.as_ref().map_or(true, |(bw, _)| w < *bw) {
            best = Some((w, current));
        }
    }
    let (best_residual, best) = best.expect("at least the zero start ran");
    SearchOutcome::Exhausted { best: Box::new(best), best_residual }
}
