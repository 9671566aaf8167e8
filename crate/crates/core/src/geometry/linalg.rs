//! Small dense linear algebra on `Vec<f64>` rows.

use nalgebra::{DMatrix, DVector};

/// Solves `a x = b` for square `a`, returning `None` when `a` is singular
/// relative to `rel_tol`.
pub(crate) fn solve(a: &[Vec<f64>], b: &[f64], rel_tol: f64) -> Option<Vec<f64>> {
    let n = b.len();
    if n == 0 {
        return Some(Vec::new());
    }
    let m = DMatrix::from_fn(n, n, |i, j| a[i][j]);
    let scale = m.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    if scale == 0.0 {
        return None;
    }
    let lu = m.lu();
    let u = lu.u();
    let min_pivot = (0..n).map(|i| u[(i, i)].abs()).fold(f64::INFINITY, f64::min);
    if min_pivot <= rel_tol * scale {
        return None;
    }
    lu.solve(&DVector::from_column_slice(b)).map(|x| x.iter().copied().collect())
}

/// Inverse of a square matrix given by rows.
pub(crate) fn inverse(a: &[Vec<f64>], rel_tol: f64) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let m = DMatrix::from_fn(n, n, |i, j| a[i][j]);
    let scale = m.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    if scale == 0.0 {
        return None;
    }
    let lu = m.lu();
    let u = lu.u();
    let min_pivot = (0..n).map(|i| u[(i, i)].abs()).fold(f64::INFINITY, f64::min);
    if min_pivot <= rel_tol * scale {
        return None;
    }
    let inv = lu.try_inverse()?;
    Some((0..n).map(|i| (0..n).map(|j| inv[(i, j)]).collect()).collect())
}

pub(crate) fn determinant(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    if n == 0 {
        return 1.0;
    }
    DMatrix::from_fn(n, n, |i, j| a[i][j]).determinant()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Orthonormal basis of the affine hull of `points`, built by greedy
/// Gram-Schmidt on differences from the first point.
pub(crate) struct AffineBasis {
    pub origin: Vec<f64>,
    pub dirs: Vec<Vec<f64>>,
}

impl AffineBasis {
    pub fn of(points: &[&[f64]], tol: f64) -> AffineBasis {
        let origin = points[0].to_vec();
        let mut residuals: Vec<Vec<f64>> = points.iter().map(|p| sub(p, &origin)).collect();
        let mut dirs: Vec<Vec<f64>> = Vec::new();
        loop {
            let (best, len) = residuals
                .iter()
                .enumerate()
                .map(|(i, r)| (i, norm(r)))
                .fold((usize::MAX, 0.0), |acc, (i, l)| if l > acc.1 { (i, l) } else { acc });
            if best == usize::MAX || len <= tol {
                break;
            }
            let dir: Vec<f64> = residuals[best].iter().map(|x| x / len).collect();
            for r in residuals.iter_mut() {
                let c = dot(r, &dir);
                for (x, d) in r.iter_mut().zip(&dir) {
                    *x -= c * d;
                }
            }
            dirs.push(dir);
        }
        AffineBasis { origin, dirs }
    }

    pub fn rank(&self) -> usize {
        self.dirs.len()
    }

    pub fn coords(&self, p: &[f64]) -> Vec<f64> {
        let rel = sub(p, &self.origin);
        self.dirs.iter().map(|d| dot(&rel, d)).collect()
    }

    /// Unit vector orthogonal to the basis directions and to `extra`,
    /// chosen deterministically among projected coordinate axes.
    pub fn complement(&self, extra: &[&[f64]]) -> Option<Vec<f64>> {
        let k = self.origin.len();
        let mut best: Option<(Vec<f64>, f64)> = None;
        for axis in 0..k {
            let mut v = vec![0.0; k];
            v[axis] = 1.0;
            for d in self.dirs.iter().map(Vec::as_slice).chain(extra.iter().copied()) {
                let c = dot(&v, d);
                for (x, y) in v.iter_mut().zip(d) {
                    *x -= c * y;
                }
            }
            let l = norm(&v);
            if best.as_ref().map_or(true, |(_, bl)| l > *bl + 1e-12) {
                best = Some((v, l));
            }
        }
        best.filter(|(_, l)| *l > 1e-9)
            .map(|(v, l)| v.into_iter().map(|x| x / l).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_and_singular() {
        let a = vec![vec![2.0, 1.0], vec![1.0, 3.0]];
        let x = solve(&a, &[3.0, 5.0], 1e-12).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-14 && (x[1] - 1.4).abs() < 1e-14);
        let s = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        assert!(solve(&s, &[1.0, 2.0], 1e-12).is_none());
    }

    #[test]
    fn basis_rank_of_collinear_points() {
        let pts = [vec![0.0, 0.0, 0.0], vec![1.0, 1.0, 0.0], vec![2.0, 2.0, 0.0]];
        let refs: Vec<&[f64]> = pts.iter().map(Vec::as_slice).collect();
        let b = AffineBasis::of(&refs, 1e-12);
        assert_eq!(b.rank(), 1);
        let c = b.complement(&[]).unwrap();
        assert!(dot(&c, &b.dirs[0]).abs() < 1e-12);
    }
}
