use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result, EPS_GEOM};

/// A point of the probability simplex over `n` labelled outcomes.
///
/// Coordinates are probabilities. The simplex has dimension `n - 1`; the
/// chart used by the polyhedral routines drops the last coordinate.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SimplexPoint(Vec<f64>);

impl SimplexPoint {
    /// Validates `coords` as a probability vector.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        check_probability_vector(&coords, EPS_GEOM * (coords.len().max(1) as f64))
            .map_err(Error::Domain)?;
        Ok(SimplexPoint(coords))
    }

    /// Clamps tiny negative round-off to zero and renormalises.
    ///
    /// Intended for points produced by arithmetic on valid points; it does
    /// not rescue genuinely infeasible input.
    pub fn projected(mut coords: Vec<f64>) -> Self {
        for c in coords.iter_mut() {
            if *c <= 0.0 {
                *c = 0.0;
            }
        }
        let sum: f64 = coords.iter().sum();
        if sum > 0.0 {
            for c in coords.iter_mut() {
                *c /= sum;
            }
        }
        SimplexPoint(coords)
    }

    pub fn corner(n: usize, i: usize) -> Self {
        let mut coords = vec![0.0; n];
        coords[i] = 1.0;
        SimplexPoint(coords)
    }

    pub fn uniform(n: usize) -> Self {
        SimplexPoint(vec![1.0 / n as f64; n])
    }

    /// Builds the point whose first `n - 1` coordinates are `chart`.
    pub fn from_chart(chart: &[f64]) -> Self {
        let last = 1.0 - chart.iter().sum::<f64>();
        let mut coords = chart.to_vec();
        coords.push(last);
        SimplexPoint::projected(coords)
    }

    /// Number of outcomes.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Dimension of the simplex the point lives in.
    pub fn dim(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }

    pub fn chart(&self) -> &[f64] {
        &self.0[..self.dim()]
    }

    /// Max-norm distance.
    pub fn distance(&self, other: &SimplexPoint) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &SimplexPoint, tol: f64) -> bool {
        self.len() == other.len() && self.distance(other) <= tol
    }

    pub fn lex_cmp(&self, other: &SimplexPoint) -> Ordering {
        lex_cmp(&self.0, &other.0)
    }

    /// Convex combination `sum_k w_k p_k`.
    pub fn mix(points: &[(&SimplexPoint, f64)]) -> Vec<f64> {
        let n = points.first().map_or(0, |(p, _)| p.len());
        let mut out = vec![0.0; n];
        for (p, w) in points {
            for (o, c) in out.iter_mut().zip(p.coords()) {
                *o += w * c;
            }
        }
        out
    }
}

impl fmt::Debug for SimplexPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.0).finish()
    }
}

impl std::ops::Index<usize> for SimplexPoint {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

pub(crate) fn check_probability_vector(coords: &[f64], tol: f64) -> std::result::Result<(), String> {
    if coords.is_empty() {
        return Err("empty probability vector".into());
    }
    if let Some((i, c)) = coords
        .iter()
        .enumerate()
        .find(|(_, c)| !c.is_finite() || **c < -tol)
    {
        return Err(format!("coordinate {i} is {c}"));
    }
    let sum: f64 = coords.iter().sum();
    if (sum - 1.0).abs() > tol {
        return Err(format!("coordinates sum to {sum}"));
    }
    Ok(())
}

pub(crate) fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    a.len().cmp(&b.len())
}

/// Sorts points lexicographically and merges points within `eps` (max
/// norm), keeping the lexicographically smallest representative.
pub fn dedup_points(mut points: Vec<SimplexPoint>, eps: f64) -> Vec<SimplexPoint> {
    points.sort_by(|a, b| a.lex_cmp(b));
    let mut kept: Vec<SimplexPoint> = Vec::with_capacity(points.len());
    for p in points {
        let first = p.coords().first().copied().unwrap_or(0.0);
        let duplicate = kept
            .iter()
            .rev()
            .take_while(|k| k.coords().first().copied().unwrap_or(0.0) >= first - eps)
            .any(|k| k.distance(&p) <= eps);
        if !duplicate {
            kept.push(p);
        }
    }
    kept
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_negative_and_unnormalised() {
        assert!(SimplexPoint::new(vec![0.5, 0.5]).is_ok());
        assert!(SimplexPoint::new(vec![1.1, -0.1]).is_err());
        assert!(SimplexPoint::new(vec![0.5, 0.4]).is_err());
        assert!(SimplexPoint::new(vec![]).is_err());
    }

    #[test]
    fn chart_round_trip() {
        let p = SimplexPoint::new(vec![0.2, 0.3, 0.5]).unwrap();
        assert_eq!(p.chart(), &[0.2, 0.3]);
        assert!(SimplexPoint::from_chart(p.chart()).approx_eq(&p, 1e-15));
    }

    #[test]
    fn dedup_keeps_lex_smallest() {
        let a = SimplexPoint::projected(vec![0.5, 0.5]);
        let b = SimplexPoint::projected(vec![0.5 + 1e-13, 0.5 - 1e-13]);
        let c = SimplexPoint::projected(vec![0.0, 1.0]);
        let out = dedup_points(vec![b, c.clone(), a.clone()], EPS_GEOM);
        assert_eq!(out, vec![c, a]);
    }
}
