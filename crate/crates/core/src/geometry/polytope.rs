//! Bounded polytopes in simplex chart coordinates, given by halfspaces.
//!
//! Constraint counts stay small (a cell of the belief simplex carries a
//! handful of facets), so vertices are enumerated by solving every
//! `d`-subset of bounding hyperplanes.

use itertools::Itertools;

use super::linalg::{self, AffineBasis};
use super::AffineFunctional;

/// Feasibility slack, in chart distance units (constraints are stored with
/// unit normals).
pub(crate) const FACE_TOL: f64 = 1e-10;

/// `normal . z <= offset` with `|normal| = 1`.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Halfspace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl Halfspace {
    pub fn slack(&self, z: &[f64]) -> f64 {
        self.offset - linalg::dot(&self.normal, z)
    }
}

#[derive(Debug, Clone)]
pub(crate) struct HPolytope {
    dim: usize,
    halfspaces: Vec<Halfspace>,
    /// Set when a constraint with vanishing normal is violated.
    empty: bool,
}

impl HPolytope {
    /// The standard simplex `z >= 0, sum z <= 1` in `dim` chart coordinates.
    pub fn simplex(dim: usize) -> Self {
        let mut p = HPolytope { dim, halfspaces: Vec::new(), empty: false };
        for i in 0..dim {
            let mut normal = vec![0.0; dim];
            normal[i] = -1.0;
            p.halfspaces.push(Halfspace { normal, offset: 0.0 });
        }
        if dim > 0 {
            p.push_raw(vec![1.0; dim], 1.0);
        }
        p
    }

    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.halfspaces
    }

    /// Adds `a . z <= b`, normalising the row. A row with a negligible
    /// normal is treated as a constant constraint.
    pub fn push_raw(&mut self, a: Vec<f64>, b: f64) {
        let len = linalg::norm(&a);
        if len <= 1e-11 {
            if b < -FACE_TOL {
                self.empty = true;
            }
            return;
        }
        self.halfspaces.push(Halfspace {
            normal: a.into_iter().map(|x| x / len).collect(),
            offset: b / len,
        });
    }

    /// Adds the constraint `f(omega) >= 0`.
    pub fn push_nonnegative(&mut self, f: &AffineFunctional) {
        let (a, b) = f.chart_form();
        self.push_raw(a.into_iter().map(|x| -x).collect(), b);
    }

    pub fn contains(&self, z: &[f64], tol: f64) -> bool {
        !self.empty && self.halfspaces.iter().all(|h| h.slack(z) >= -tol)
    }

    /// All vertices, deduplicated, in enumeration order.
    pub fn vertices(&self) -> Vec<Vec<f64>> {
        if self.empty {
            return Vec::new();
        }
        if self.dim == 0 {
            return vec![Vec::new()];
        }
        let mut out: Vec<Vec<f64>> = Vec::new();
        for subset in (0..self.halfspaces.len()).combinations(self.dim) {
            let a: Vec<Vec<f64>> = subset.iter().map(|&i| self.halfspaces[i].normal.clone()).collect();
            let b: Vec<f64> = subset.iter().map(|&i| self.halfspaces[i].offset).collect();
            let Some(z) = linalg::solve(&a, &b, 1e-10) else {
                continue;
            };
            if !self.contains(&z, FACE_TOL) {
                continue;
            }
            if !out.iter().any(|v| max_dist(v, &z) <= 1e-11) {
                out.push(z);
            }
        }
        out
    }

    /// True when the polytope has non-empty interior.
    pub fn is_full_dimensional(&self, vertices: &[Vec<f64>]) -> bool {
        if self.dim == 0 {
            return !vertices.is_empty();
        }
        if vertices.len() <= self.dim {
            return false;
        }
        let refs: Vec<&[f64]> = vertices.iter().map(Vec::as_slice).collect();
        AffineBasis::of(&refs, 1e-9).rank() == self.dim
    }

    /// Drops constraints that do not support a facet. Requires the
    /// vertices of a full-dimensional polytope.
    pub fn simplify(&mut self, vertices: &[Vec<f64>]) {
        let dim = self.dim;
        let mut kept: Vec<Halfspace> = Vec::new();
        for h in self.halfspaces.drain(..) {
            let tight = vertices.iter().filter(|v| h.slack(v).abs() <= FACE_TOL).count();
            if tight >= dim && !kept.iter().any(|k| same_halfspace(k, &h)) {
                kept.push(h);
            }
        }
        self.halfspaces = kept;
    }
}

fn same_halfspace(a: &Halfspace, b: &Halfspace) -> bool {
    (a.offset - b.offset).abs() <= 1e-12 && max_dist(&a.normal, &b.normal) <= 1e-12
}

pub(crate) fn max_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
