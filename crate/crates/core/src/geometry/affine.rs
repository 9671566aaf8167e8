use serde::{Deserialize, Serialize};

use super::SimplexPoint;
use crate::{Error, Result, EPS_GEOM};

/// `omega -> weights . omega + offset` on a probability simplex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineFunctional {
    pub weights: Vec<f64>,
    #[serde(default)]
    pub offset: f64,
}

impl AffineFunctional {
    pub fn new(weights: Vec<f64>, offset: f64) -> Self {
        AffineFunctional { weights, offset }
    }

    pub fn linear(weights: Vec<f64>) -> Self {
        AffineFunctional { weights, offset: 0.0 }
    }

    pub fn constant(n: usize, value: f64) -> Self {
        AffineFunctional { weights: vec![0.0; n], offset: value }
    }

    pub fn eval(&self, omega: &[f64]) -> f64 {
        self.weights.iter().zip(omega).map(|(w, x)| w * x).sum::<f64>() + self.offset
    }

    pub fn at(&self, point: &SimplexPoint) -> f64 {
        self.eval(point.coords())
    }

    /// The same functional in chart coordinates: `z -> a . z + b` where
    /// `z` is the point without its last coordinate.
    pub fn chart_form(&self) -> (Vec<f64>, f64) {
        let n = self.weights.len();
        if n == 0 {
            return (Vec::new(), self.offset);
        }
        let last = self.weights[n - 1];
        let a = self.weights[..n - 1].iter().map(|w| w - last).collect();
        (a, last + self.offset)
    }

    /// Weights normalised so that evaluation is invariant on the simplex
    /// (the mean weight is folded into the offset).
    pub fn canonical(&self) -> AffineFunctional {
        let n = self.weights.len().max(1) as f64;
        let mean = self.weights.iter().sum::<f64>() / n;
        AffineFunctional {
            weights: self.weights.iter().map(|w| w - mean).collect(),
            offset: self.offset + mean,
        }
    }

    /// True when the functional takes a single value on the whole simplex.
    pub fn is_constant_on_simplex(&self, tol: f64) -> bool {
        let (lo, hi) = self
            .weights
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &w| (lo.min(w), hi.max(w)));
        self.weights.is_empty() || hi - lo <= tol
    }

    pub fn sub(&self, other: &AffineFunctional) -> AffineFunctional {
        AffineFunctional {
            weights: self.weights.iter().zip(&other.weights).map(|(a, b)| a - b).collect(),
            offset: self.offset - other.offset,
        }
    }

    pub fn add(&self, other: &AffineFunctional) -> AffineFunctional {
        AffineFunctional {
            weights: self.weights.iter().zip(&other.weights).map(|(a, b)| a + b).collect(),
            offset: self.offset + other.offset,
        }
    }

    /// `omega -> self(map(omega))`.
    pub fn pullback(&self, map: &AffineMap) -> AffineFunctional {
        let weights = (0..map.source_len())
            .map(|j| (0..map.target_len()).map(|i| self.weights[i] * map.matrix[i][j]).sum())
            .collect();
        let offset = self.eval(&map.offset);
        AffineFunctional { weights, offset }
    }

    /// Largest chart-gradient l1 norm, i.e. a Lipschitz constant with
    /// respect to the max norm on chart coordinates.
    pub fn chart_lipschitz(&self) -> f64 {
        self.chart_form().0.iter().map(|a| a.abs()).sum()
    }
}

/// An affine map between probability simplices, `omega -> A omega + b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineMap {
    /// Row `i` gives target coordinate `i` as a function of the source.
    pub matrix: Vec<Vec<f64>>,
    pub offset: Vec<f64>,
}

impl AffineMap {
    pub fn new(matrix: Vec<Vec<f64>>, offset: Vec<f64>) -> Self {
        AffineMap { matrix, offset }
    }

    pub fn identity(n: usize) -> Self {
        let matrix = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        AffineMap { matrix, offset: vec![0.0; n] }
    }

    /// The constant map onto `point` from a simplex with `source_len`
    /// outcomes.
    pub fn constant(source_len: usize, point: &SimplexPoint) -> Self {
        AffineMap {
            matrix: vec![vec![0.0; source_len]; point.len()],
            offset: point.coords().to_vec(),
        }
    }

    /// Linear map given by a row-stochastic kernel `kernel[x][x']`:
    /// `omega -> sum_x omega(x) kernel[x][.]`.
    pub fn from_kernel(kernel: &[Vec<f64>]) -> Self {
        let source = kernel.len();
        let target = kernel.first().map_or(0, Vec::len);
        let matrix = (0..target).map(|i| (0..source).map(|x| kernel[x][i]).collect()).collect();
        AffineMap { matrix, offset: vec![0.0; target] }
    }

    pub fn source_len(&self) -> usize {
        self.matrix.first().map_or(0, Vec::len)
    }

    pub fn target_len(&self) -> usize {
        self.offset.len()
    }

    pub fn apply(&self, omega: &[f64]) -> Vec<f64> {
        self.matrix
            .iter()
            .zip(&self.offset)
            .map(|(row, b)| row.iter().zip(omega).map(|(a, x)| a * x).sum::<f64>() + b)
            .collect()
    }

    /// Applies the map and checks that the image is in the target simplex.
    pub fn apply_point(&self, omega: &SimplexPoint) -> Result<SimplexPoint> {
        let image = self.apply(omega.coords());
        super::simplex::check_probability_vector(&image, 1e-9)
            .map_err(|e| Error::Domain(format!("affine image leaves the target simplex: {e}")))?;
        Ok(SimplexPoint::projected(image))
    }

    /// Checks that the source simplex is mapped into the target simplex
    /// (it suffices to check the images of the corners).
    pub fn check_maps_simplex(&self) -> Result<()> {
        let n = self.source_len();
        for i in 0..n {
            let image = self.apply(SimplexPoint::corner(n, i).coords());
            super::simplex::check_probability_vector(&image, 1e-9).map_err(|e| {
                Error::Domain(format!("image of corner {i} leaves the target simplex: {e}"))
            })?;
        }
        Ok(())
    }

    pub fn is_constant(&self) -> bool {
        self.matrix
            .iter()
            .all(|row| row.iter().all(|a| a.abs() <= EPS_GEOM))
    }
}
