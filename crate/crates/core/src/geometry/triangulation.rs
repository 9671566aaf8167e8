use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::linalg;
use super::simplex::check_probability_vector;
use super::{AffineFunctional, SimplexPoint};
use crate::{Error, Result, EPS_GEOM};

/// Barycentric weights at or below this are treated as zero when locating
/// a point, so that points on a shared face are supported on that face.
const WEIGHT_FLOOR: f64 = 1e-13;

/// A finite collection of simplices covering the belief simplex.
///
/// Only the maximal simplices (`n` vertices for `n` outcomes) are stored;
/// their faces are implicit. Lower-dimensional entries passed to
/// [`Triangulation::new`] are kept for validation only.
#[derive(Debug, Clone)]
pub struct Triangulation {
    vertices: Vec<SimplexPoint>,
    simplices: Vec<Vec<usize>>,
    faces: Vec<Vec<usize>>,
    /// Inverse of the vertex matrix (columns are vertex coordinates) per
    /// maximal simplex; `None` for degenerate simplices.
    inverses: Vec<Option<Vec<Vec<f64>>>>,
}

impl Triangulation {
    /// Builds a triangulation without checking the covering conditions;
    /// see [`validate_triangulation`].
    pub fn new(vertices: Vec<SimplexPoint>, simplices: Vec<Vec<usize>>) -> Result<Self> {
        let n = vertices.first().map(SimplexPoint::len).ok_or_else(|| {
            Error::Domain("a triangulation needs at least one vertex".into())
        })?;
        if let Some(v) = vertices.iter().find(|v| v.len() != n) {
            return Err(Error::Domain(format!(
                "vertex {v:?} has {} coordinates, expected {n}",
                v.len()
            )));
        }
        let mut maximal = Vec::new();
        let mut faces = Vec::new();
        for s in simplices {
            if s.is_empty() || s.len() > n {
                return Err(Error::Domain(format!("simplex {s:?} has the wrong size for {n} outcomes")));
            }
            if let Some(i) = s.iter().find(|&&i| i >= vertices.len()) {
                return Err(Error::Domain(format!("simplex {s:?} refers to missing vertex {i}")));
            }
            let mut sorted = s.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != s.len() {
                return Err(Error::Domain(format!("simplex {s:?} repeats a vertex")));
            }
            if s.len() == n {
                maximal.push(s);
            } else {
                faces.push(s);
            }
        }
        let inverses = maximal
            .iter()
            .map(|s| {
                let m: Vec<Vec<f64>> = (0..n)
                    .map(|i| s.iter().map(|&v| vertices[v][i]).collect())
                    .collect();
                linalg::inverse(&m, 1e-12)
            })
            .collect();
        Ok(Triangulation { vertices, simplices: maximal, faces, inverses })
    }

    /// The trivial triangulation: the simplex itself with its corners.
    pub fn single(n: usize) -> Self {
        let vertices = (0..n).map(|i| SimplexPoint::corner(n, i)).collect();
        Triangulation::new(vertices, vec![(0..n).collect()]).expect("corners form a simplex")
    }

    /// Number of outcomes of the underlying simplex.
    pub fn outcomes(&self) -> usize {
        self.vertices[0].len()
    }

    pub fn vertices(&self) -> &[SimplexPoint] {
        &self.vertices
    }

    /// Maximal simplices as vertex-index lists.
    pub fn simplices(&self) -> &[Vec<usize>] {
        &self.simplices
    }

    /// Index of the vertex at `point`, if any.
    pub fn vertex_index(&self, point: &SimplexPoint, tol: f64) -> Option<usize> {
        self.vertices.iter().position(|v| v.approx_eq(point, tol))
    }

    /// Barycentric coordinates of `omega` in maximal simplex `k`.
    pub fn simplex_weights(&self, k: usize, omega: &[f64]) -> Option<Vec<f64>> {
        self.inverses[k].as_ref().map(|inv| inv.iter().map(|row| linalg::dot(row, omega)).collect())
    }

    /// Barycentric coordinates of simplex `k` as affine functionals.
    pub fn weight_functionals(&self, k: usize) -> Option<Vec<AffineFunctional>> {
        self.inverses[k]
            .as_ref()
            .map(|inv| inv.iter().map(|row| AffineFunctional::linear(row.clone())).collect())
    }

    /// Locates `omega`: the vertex indices and positive weights of the
    /// unique convex combination over one containing simplex.
    pub fn locate(&self, omega: &[f64]) -> Result<Vec<(usize, f64)>> {
        if omega.len() != self.outcomes() {
            return Err(Error::Domain(format!(
                "point has {} coordinates, triangulation has {}",
                omega.len(),
                self.outcomes()
            )));
        }
        check_probability_vector(omega, 1e-9)
            .map_err(|e| Error::Domain(format!("point outside the simplex: {e}")))?;
        let mut best: Option<(usize, Vec<f64>, f64)> = None;
        for k in 0..self.simplices.len() {
            let Some(w) = self.simplex_weights(k, omega) else { continue };
            let min = w.iter().copied().fold(f64::INFINITY, f64::min);
            if best.as_ref().map_or(true, |(_, _, m)| min > *m) {
                let done = min >= 0.0;
                best = Some((k, w, min));
                if done {
                    break;
                }
            }
        }
        let (k, w, min) = best.ok_or_else(|| Error::Domain("triangulation has no simplices".into()))?;
        if min < -1e-9 {
            return Err(Error::Domain(format!("point {omega:?} is not covered by the triangulation")));
        }
        let mut atoms: Vec<(usize, f64)> = self.simplices[k]
            .iter()
            .zip(w)
            .filter(|(_, w)| *w > WEIGHT_FLOOR)
            .map(|(&v, w)| (v, w))
            .collect();
        let total: f64 = atoms.iter().map(|(_, w)| w).sum();
        for (_, w) in atoms.iter_mut() {
            *w /= total;
        }
        atoms.sort_by_key(|(v, _)| *v);
        Ok(atoms)
    }

    /// The barycentric measure of `omega`.
    pub fn barycentric(&self, omega: &SimplexPoint) -> Result<SupportMeasure> {
        let atoms = self
            .locate(omega.coords())?
            .into_iter()
            .map(|(v, w)| (self.vertices[v].clone(), w))
            .collect();
        Ok(SupportMeasure { atoms })
    }

    /// Sum of chart volumes of the maximal simplices times `d!`, which is 1
    /// for a cover of the simplex.
    fn normalised_volume(&self, k: usize) -> f64 {
        let s = &self.simplices[k];
        let base = self.vertices[s[0]].chart();
        let rows: Vec<Vec<f64>> = s[1..]
            .iter()
            .map(|&v| linalg::sub(self.vertices[v].chart(), base))
            .collect();
        linalg::determinant(&rows).abs()
    }
}

/// Outcome of [`validate_triangulation`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriangulationReport {
    pub valid: bool,
    pub diagnostics: Vec<String>,
}

/// Checks the three covering conditions: faces are included, pairwise
/// intersections are common faces, and the simplices cover the simplex.
pub fn validate_triangulation(t: &Triangulation) -> TriangulationReport {
    let mut diagnostics = Vec::new();
    let n = t.outcomes();
    let d = n - 1;

    if t.simplices.is_empty() {
        diagnostics.push("no cover: the simplex list is empty".to_string());
        return TriangulationReport { valid: false, diagnostics };
    }
    for (i, v) in t.vertices.iter().enumerate() {
        if let Err(e) = check_probability_vector(v.coords(), EPS_GEOM * n as f64) {
            diagnostics.push(format!("vertex {i} is not in the simplex: {e}"));
        }
    }
    // Condition (1): listed lower-dimensional simplices must be faces.
    for f in &t.faces {
        if !t.simplices.iter().any(|s| f.iter().all(|v| s.contains(v))) {
            diagnostics.push(format!("simplex {f:?} is not a face of any maximal simplex"));
        }
    }
    for (k, inv) in t.inverses.iter().enumerate() {
        if inv.is_none() {
            diagnostics.push(format!("simplex {:?} is degenerate", t.simplices[k]));
        }
    }
    if !diagnostics.is_empty() {
        return TriangulationReport { valid: false, diagnostics };
    }

    // Condition (2): simplices meet face to face. Every ridge is either
    // on the boundary of the simplex and used once, or shared by exactly
    // two simplices lying on opposite sides of it. Together with the volume
    // check below this rules out overlaps.
    if d > 0 {
        let mut ridges: HashMap<Vec<usize>, Vec<(usize, usize)>> = HashMap::new();
        for (k, s) in t.simplices.iter().enumerate() {
            for pos in 0..s.len() {
                let mut ridge: Vec<usize> = s.iter().enumerate().filter(|&(i, _)| i != pos).map(|(_, &v)| v).collect();
                ridge.sort_unstable();
                ridges.entry(ridge).or_default().push((k, s[pos]));
            }
        }
        let mut keys: Vec<&Vec<usize>> = ridges.keys().collect();
        keys.sort();
        for ridge in keys {
            let users = &ridges[ridge];
            let on_boundary = (0..n).any(|i| ridge.iter().all(|&v| t.vertices[v].coords()[i] <= 1e-9));
            match users.as_slice() {
                [_] if on_boundary => {}
                [(k, _)] => diagnostics.push(format!(
                    "simplex {:?} has the interior ridge {ridge:?} with no neighbour",
                    t.simplices[*k]
                )),
                [(a, apex_a), (b, apex_b)] if !on_boundary => {
                    let w = t.simplex_weights(*a, t.vertices[*apex_b].coords()).expect("non-degenerate");
                    let pos = t.simplices[*a].iter().position(|v| v == apex_a).expect("apex in simplex");
                    if w[pos] >= -1e-12 {
                        diagnostics.push(format!(
                            "simplices {:?} and {:?} intersect outside a common face (same side of {ridge:?})",
                            t.simplices[*a], t.simplices[*b]
                        ));
                    }
                }
                _ => diagnostics.push(format!(
                    "ridge {ridge:?} is shared by {} simplices",
                    users.len()
                )),
            }
            if diagnostics.len() >= 8 {
                break;
            }
        }
    }

    // Condition (3): with disjoint interiors, a cover has total volume 1/d!.
    if diagnostics.is_empty() {
        let total: f64 = (0..t.simplices.len()).map(|k| t.normalised_volume(k)).sum();
        if (total - 1.0).abs() > 1e-9 {
            diagnostics.push(format!("no cover: simplices fill {total} of the simplex volume"));
        }
    }
    TriangulationReport { valid: diagnostics.is_empty(), diagnostics }
}

/// A finite-support probability measure on the belief simplex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportMeasure {
    atoms: Vec<(SimplexPoint, f64)>,
}

impl SupportMeasure {
    pub fn new(atoms: Vec<(SimplexPoint, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Domain("a measure needs at least one atom".into()));
        }
        let n = atoms[0].0.len();
        if atoms.iter().any(|(p, w)| p.len() != n || !(*w > 0.0) || !w.is_finite()) {
            return Err(Error::Domain("atoms must share a simplex and carry positive weight".into()));
        }
        let total: f64 = atoms.iter().map(|(_, w)| w).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Domain(format!("weights sum to {total}")));
        }
        Ok(SupportMeasure { atoms })
    }

    pub fn dirac(point: SimplexPoint) -> Self {
        SupportMeasure { atoms: vec![(point, 1.0)] }
    }

    pub fn atoms(&self) -> &[(SimplexPoint, f64)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Centre of mass.
    pub fn mean(&self) -> Vec<f64> {
        let refs: Vec<(&SimplexPoint, f64)> = self.atoms.iter().map(|(p, w)| (p, *w)).collect();
        SimplexPoint::mix(&refs)
    }

    /// `sum_k w_k f(p_k)`.
    pub fn integrate(&self, mut f: impl FnMut(&SimplexPoint) -> f64) -> f64 {
        self.atoms.iter().map(|(p, w)| w * f(p)).sum()
    }

    /// Atom-by-atom comparison up to reordering.
    pub fn approx_eq(&self, other: &SupportMeasure, tol: f64) -> bool {
        self.atoms.len() == other.atoms.len()
            && self.atoms.iter().all(|(p, w)| {
                other.atoms.iter().any(|(q, v)| p.approx_eq(q, tol) && (w - v).abs() <= tol)
            })
    }
}

/// Piecewise-linear interpolation of vertex values over a triangulation.
#[derive(Debug, Clone)]
pub struct VertexInterpolant {
    triangulation: Arc<Triangulation>,
    values: Vec<f64>,
}

impl VertexInterpolant {
    pub fn new(triangulation: Arc<Triangulation>, values: Vec<f64>) -> Result<Self> {
        if values.len() != triangulation.vertices().len() {
            return Err(Error::Domain(format!(
                "{} values for {} vertices",
                values.len(),
                triangulation.vertices().len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("vertex values must be finite".into()));
        }
        Ok(VertexInterpolant { triangulation, values })
    }

    /// The zero function on the one-cell triangulation.
    pub fn zero(n: usize) -> Self {
        VertexInterpolant { triangulation: Arc::new(Triangulation::single(n)), values: vec![0.0; n] }
    }

    pub fn triangulation(&self) -> &Triangulation {
        &self.triangulation
    }

    pub fn shared_triangulation(&self) -> Arc<Triangulation> {
        Arc::clone(&self.triangulation)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Interpolated value at `omega`.
    pub fn interpolate(&self, omega: &SimplexPoint) -> Result<f64> {
        self.eval(omega.coords())
    }

    pub fn eval(&self, omega: &[f64]) -> Result<f64> {
        Ok(self
            .triangulation
            .locate(omega)?
            .into_iter()
            .map(|(v, w)| w * self.values[v])
            .sum())
    }

    /// The affine function agreeing with the interpolant on simplex `k`.
    pub fn piece(&self, k: usize) -> Option<AffineFunctional> {
        let inv = self.triangulation.inverses[k].as_ref()?;
        let s = &self.triangulation.simplices[k];
        let n = self.triangulation.outcomes();
        let weights = (0..n)
            .map(|j| s.iter().enumerate().map(|(r, &v)| self.values[v] * inv[r][j]).sum())
            .collect();
        Some(AffineFunctional::linear(weights))
    }

    /// Lipschitz constant with respect to the max norm in chart
    /// coordinates.
    pub fn chart_lipschitz(&self) -> f64 {
        (0..self.triangulation.simplices.len())
            .filter_map(|k| self.piece(k))
            .map(|f| f.chart_lipschitz())
            .fold(0.0, f64::max)
    }
}
