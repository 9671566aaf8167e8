use itertools::Itertools;

use super::linalg;
use super::polytope::HPolytope;
use super::pullback::same_zero_set;
use super::simplex::dedup_points;
use super::{AffineFunctional, SimplexPoint};
use crate::{Error, Result, EPS_GEOM};

/// A finite family of affine functionals whose zero sets contain every
/// locus where a piecewise-linear objective may bend or jump.
#[derive(Debug, Clone)]
pub struct CellArrangement {
    outcomes: usize,
    functionals: Vec<AffineFunctional>,
}

impl CellArrangement {
    /// Functionals that are constant and non-zero on the simplex have empty
    /// zero sets and are dropped; identically zero ones are rejected.
    pub fn new(outcomes: usize, functionals: Vec<AffineFunctional>) -> Result<Self> {
        if outcomes == 0 {
            return Err(Error::Domain("arrangement over an empty outcome set".into()));
        }
        let mut kept: Vec<AffineFunctional> = Vec::new();
        for f in functionals {
            if f.weights.len() != outcomes {
                return Err(Error::Domain(format!(
                    "functional has {} weights, expected {outcomes}",
                    f.weights.len()
                )));
            }
            let c = f.canonical();
            if c.is_constant_on_simplex(1e-14) {
                if c.offset.abs() <= 1e-14 {
                    return Err(Error::Domain("functional vanishes on the whole simplex".into()));
                }
                continue;
            }
            if !kept.iter().any(|k| same_zero_set(k, &c)) {
                kept.push(c);
            }
        }
        Ok(CellArrangement { outcomes, functionals: kept })
    }

    pub fn empty(outcomes: usize) -> Self {
        CellArrangement { outcomes, functionals: Vec::new() }
    }

    pub fn outcomes(&self) -> usize {
        self.outcomes
    }

    /// Ambient dimension of the simplex.
    pub fn dimension(&self) -> usize {
        self.outcomes - 1
    }

    pub fn functionals(&self) -> &[AffineFunctional] {
        &self.functionals
    }

    pub fn push(&mut self, f: AffineFunctional) -> Result<()> {
        let mut all = std::mem::take(&mut self.functionals);
        all.push(f);
        *self = CellArrangement::new(self.outcomes, all)?;
        Ok(())
    }

    /// Every point cut out by `d` of the hyperplanes (functional zero sets
    /// and simplex facets) that lies in the simplex, deduplicated and
    /// sorted lexicographically. Singular subsets are skipped.
    pub fn candidate_vertices(&self) -> Vec<SimplexPoint> {
        let n = self.outcomes;
        let d = n - 1;
        let mut points: Vec<SimplexPoint> = (0..n).map(|i| SimplexPoint::corner(n, i)).collect();
        match d {
            0 => {}
            1 => {
                for f in &self.functionals {
                    // f = (w0 - w1) p + (w1 + b) in p = omega_0.
                    let slope = f.weights[0] - f.weights[1];
                    if slope.abs() <= 1e-300 {
                        continue;
                    }
                    let p = -(f.weights[1] + f.offset) / slope;
                    if (-EPS_GEOM..=1.0 + EPS_GEOM).contains(&p) {
                        let p = p.clamp(0.0, 1.0);
                        points.push(SimplexPoint::projected(vec![p, 1.0 - p]));
                    }
                }
            }
            _ => {
                let mut planes: Vec<(Vec<f64>, f64)> = HPolytope::simplex(d)
                    .halfspaces()
                    .iter()
                    .map(|h| (h.normal.clone(), h.offset))
                    .collect();
                for f in &self.functionals {
                    let (a, b) = f.chart_form();
                    let len = linalg::norm(&a);
                    planes.push((a.iter().map(|x| x / len).collect(), -b / len));
                }
                let simplex = HPolytope::simplex(d);
                for subset in (0..planes.len()).combinations(d) {
                    let a: Vec<Vec<f64>> = subset.iter().map(|&i| planes[i].0.clone()).collect();
                    let b: Vec<f64> = subset.iter().map(|&i| planes[i].1).collect();
                    if let Some(z) = linalg::solve(&a, &b, 1e-12) {
                        if simplex.contains(&z, 10.0 * EPS_GEOM) {
                            points.push(SimplexPoint::from_chart(&z));
                        }
                    }
                }
            }
        }
        dedup_points(points, EPS_GEOM)
    }
}
