//! Facets of the convex hull of a full-dimensional point set in `R^k`, by
//! gift wrapping. Coplanar points are kept: each facet reports every input
//! point lying on it, which is what the pulling triangulation needs.

use std::collections::{BTreeSet, VecDeque};

use nalgebra::DMatrix;

use super::linalg::{self, AffineBasis};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub(crate) struct Facet {
    /// Outward unit normal.
    pub normal: Vec<f64>,
    /// Sorted indices of the input points on the facet.
    pub members: Vec<usize>,
}

fn tight(points: &[Vec<f64>], normal: &[f64], tol: f64) -> Vec<usize> {
    let offset = points.iter().map(|p| linalg::dot(normal, p)).fold(f64::NEG_INFINITY, f64::max);
    (0..points.len())
        .filter(|&i| offset - linalg::dot(normal, &points[i]) <= tol)
        .collect()
}

fn unit(v: Vec<f64>) -> Vec<f64> {
    let l = linalg::norm(&v);
    v.into_iter().map(|x| x / l).collect()
}

/// Rotates the supporting hyperplane `normal` about a ridge through
/// `anchor`, in the direction `dir` (orthogonal to both the normal and the
/// ridge), until it meets a point outside `skip`. Returns the rotated normal
/// and the direction in which the rotation would continue.
fn wrap(
    points: &[Vec<f64>],
    skip: &[usize],
    normal: &[f64],
    dir: &[f64],
    anchor: &[f64],
    tol: f64,
) -> Option<(Vec<f64>, Vec<f64>)> {
    let offset = points.iter().map(|p| linalg::dot(normal, p)).fold(f64::NEG_INFINITY, f64::max);
    let mut best: Option<f64> = None;
    for (i, p) in points.iter().enumerate() {
        let w = linalg::dot(p, normal) - offset;
        if w >= -tol || skip.binary_search(&i).is_ok() {
            continue;
        }
        let phi = (-w).atan2(linalg::dot(&linalg::sub(p, anchor), dir));
        if best.map_or(true, |b| phi < b) {
            best = Some(phi);
        }
    }
    let (s, c) = best?.sin_cos();
    let rotated = unit(normal.iter().zip(dir).map(|(n, m)| c * n + s * m).collect());
    let onward = unit(normal.iter().zip(dir).map(|(n, m)| c * m - s * n).collect());
    Some((rotated, onward))
}

fn rank_of(points: &[Vec<f64>], members: &[usize], normal: &[f64], tol: f64) -> usize {
    let flat = flatten(points, members, normal);
    AffineBasis::of(&flat.iter().map(Vec::as_slice).collect::<Vec<_>>(), tol).rank()
}

/// Removes from `normal` its components along the directions of `basis`.
fn snap(normal: Vec<f64>, basis: &AffineBasis) -> Vec<f64> {
    unit(basis.dirs.iter().fold(normal, |n, d| {
        let c = linalg::dot(&n, d);
        n.iter().zip(d).map(|(x, y)| x - c * y).collect()
    }))
}

/// The facet across `ridge` (indices into `points`) of `facet`, reached by
/// rotating in direction `dir`. Points met on the ridge's own flat do not
/// determine a facet; they join the axis and the rotation continues.
fn turn(points: &[Vec<f64>], facet: &Facet, ridge: Vec<usize>, dir: &[f64], tol: f64) -> Result<Facet> {
    let k = facet.normal.len();
    let mut skip = facet.members.clone();
    let mut axis = ridge;
    let (mut normal, mut dir) = (facet.normal.clone(), dir.to_vec());
    for _ in 0..points.len() {
        let anchor = points[axis[0]].clone();
        let (rotated, onward) = wrap(points, &skip, &normal, &dir, &anchor, tol)
            .ok_or_else(|| Error::Internal("wrapping found no point".into()))?;
        let mut met = tight(points, &rotated, tol);
        met.extend(axis.iter().copied());
        met.sort_unstable();
        met.dedup();
        let refs: Vec<&[f64]> = met.iter().map(|&i| points[i].as_slice()).collect();
        let basis = AffineBasis::of(&refs, tol);
        if basis.rank() + 1 >= k {
            let snapped = (basis.rank() + 1 == k).then(|| snap(rotated.clone(), &basis));
            for start in snapped.into_iter().chain([rotated.clone()]) {
                let (settled, members) = settle(points, start, tol);
                if rank_of(points, &members, &settled, tol) + 1 == k {
                    return Ok(Facet { normal: settled, members });
                }
            }
            return Err(Error::Internal("wrapping met no facet".into()));
        }
        if basis.rank() + 2 != k {
            return Err(Error::Internal(format!("wrapping met a face of rank {}", basis.rank())));
        }
        // Rotate on about the flat of the points just met.
        normal = snap(rotated, &basis);
        let mut next = basis
            .complement(&[&normal])
            .ok_or_else(|| Error::Internal("no rotation direction".into()))?;
        if linalg::dot(&next, &onward) < 0.0 {
            next.iter_mut().for_each(|x| *x = -*x);
        }
        dir = next;
        skip.extend(met.iter().copied());
        skip.sort_unstable();
        skip.dedup();
        axis = met;
    }
    Err(Error::Internal("wrapping did not reach a facet".into()))
}

/// A hyperplane fitted to a set of points, with the angular uncertainty of
/// its normal.
struct Fit {
    normal: Vec<f64>,
    centroid: Vec<f64>,
    wobble: f64,
}

impl Fit {
    /// Points within `tol` of the supporting hyperplane, widened by the
    /// normal's uncertainty times the distance from the fitted points.
    fn tight(&self, points: &[Vec<f64>], tol: f64) -> Vec<usize> {
        let offset = points.iter().map(|p| linalg::dot(&self.normal, p)).fold(f64::NEG_INFINITY, f64::max);
        (0..points.len())
            .filter(|&i| {
                let p = &points[i];
                let reach = tol + self.wobble * linalg::norm(&linalg::sub(p, &self.centroid));
                offset - linalg::dot(&self.normal, p) <= reach
            })
            .collect()
    }
}

/// Least-squares hyperplane through `members`, oriented like `approx`.
/// Returns `None` when the members do not pin down a hyperplane.
fn fit_normal(points: &[Vec<f64>], members: &[usize], approx: &[f64], tol: f64) -> Option<Fit> {
    let k = approx.len();
    let refs: Vec<&[f64]> = members.iter().map(|&i| points[i].as_slice()).collect();
    if AffineBasis::of(&refs, tol).rank() + 1 != k {
        return None;
    }
    let m = members.len() as f64;
    let centroid: Vec<f64> = (0..k).map(|j| members.iter().map(|&i| points[i][j]).sum::<f64>() / m).collect();
    let rows = DMatrix::from_fn(members.len(), k, |r, j| points[members[r]][j] - centroid[j]);
    let svd = rows.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors were requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
    let (idx, weakest) = (order[0], svd.singular_values[order[1]]);
    let strongest = svd.singular_values[order[order.len() - 1]];
    let mut n: Vec<f64> = v_t.row(idx).iter().copied().collect();
    if linalg::dot(&n, approx) < 0.0 {
        n.iter_mut().for_each(|x| *x = -*x);
    }
    // Rounding in the fit, and points that are only known to within `tol`.
    let wobble = (16.0 * f64::EPSILON * strongest + tol * m.sqrt()) / weakest;
    let wobble = wobble.min(MAX_WOBBLE);
    Some(Fit { normal: unit(n), centroid, wobble })
}

/// Cap on the normal uncertainty credited to a badly shaped facet.
const MAX_WOBBLE: f64 = 1e-6;

/// Alternates fitting the normal to the tight points and recomputing them,
/// so that rounding in the rotation does not accumulate from facet to facet.
fn settle(points: &[Vec<f64>], normal: Vec<f64>, tol: f64) -> (Vec<f64>, Vec<usize>) {
    let mut normal = normal;
    let mut members = tight(points, &normal, tol);
    for _ in 0..4 {
        let Some(fit) = fit_normal(points, &members, &normal, tol) else {
            break;
        };
        let next = fit.tight(points, tol);
        // A fit that drops its own points is worse than what we had.
        if members.iter().any(|i| next.binary_search(i).is_err()) {
            break;
        }
        normal = fit.normal;
        if next == members {
            break;
        }
        members = next;
    }
    (normal, members)
}

/// The points of `members`, moved onto the supporting hyperplane with unit
/// normal `normal`.
fn flatten(points: &[Vec<f64>], members: &[usize], normal: &[f64]) -> Vec<Vec<f64>> {
    let offset = members.iter().map(|&i| linalg::dot(normal, &points[i])).fold(f64::NEG_INFINITY, f64::max);
    members
        .iter()
        .map(|&i| {
            let gap = offset - linalg::dot(normal, &points[i]);
            points[i].iter().zip(normal).map(|(x, n)| x + gap * n).collect()
        })
        .collect()
}

/// Removes from `v` its component along the unit vector `n`.
fn orthogonal_to(mut v: Vec<f64>, n: &[f64]) -> Vec<f64> {
    let c = linalg::dot(&v, n);
    for (x, y) in v.iter_mut().zip(n) {
        *x -= c * y;
    }
    unit(v)
}

fn initial_facet(points: &[Vec<f64>], tol: f64) -> Result<Facet> {
    let k = points[0].len();
    let mut normal = vec![0.0; k];
    normal[0] = -1.0;
    for _ in 0..=k {
        let (fitted, members) = settle(points, normal, tol);
        normal = fitted;
        let flat = flatten(points, &members, &normal);
        let refs: Vec<&[f64]> = flat.iter().map(Vec::as_slice).collect();
        let basis = AffineBasis::of(&refs, tol);
        if basis.rank() + 1 >= k {
            return Ok(Facet { normal, members });
        }
        let dir = basis
            .complement(&[&normal])
            .ok_or_else(|| Error::Internal("no rotation direction for the initial facet".into()))?;
        let (rotated, _) = wrap(points, &members, &normal, &orthogonal_to(dir, &normal), &points[members[0]], tol)
            .ok_or_else(|| Error::Internal("point set is not full-dimensional".into()))?;
        normal = settle(points, rotated, tol).0;
    }
    Err(Error::Internal("initial facet search did not converge".into()))
}

/// All facets of `conv(points)`. Fails unless the points span `R^k`.
pub(crate) fn hull_facets(points: &[Vec<f64>], tol: f64) -> Result<Vec<Facet>> {
    let k = points.first().map_or(0, Vec::len);
    if k == 0 {
        return Err(Error::Internal("hull of zero-dimensional points".into()));
    }
    if k == 1 {
        let lo = points.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
        let hi = points.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
        if hi - lo <= tol {
            return Err(Error::Internal("degenerate segment".into()));
        }
        let near = |x: f64| (0..points.len()).filter(|&i| (points[i][0] - x).abs() <= tol).collect();
        return Ok(vec![
            Facet { normal: vec![-1.0], members: near(lo) },
            Facet { normal: vec![1.0], members: near(hi) },
        ]);
    }
    let refs: Vec<&[f64]> = points.iter().map(Vec::as_slice).collect();
    if AffineBasis::of(&refs, tol).rank() < k {
        return Err(Error::Internal(format!("points do not span R^{k}")));
    }

    let first = initial_facet(points, tol)?;
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    seen.insert(first.members.clone());
    let mut queue = VecDeque::from([first]);
    let mut facets = Vec::new();
    while let Some(facet) = queue.pop_front() {
        let flat = flatten(points, &facet.members, &facet.normal);
        let on: Vec<&[f64]> = flat.iter().map(Vec::as_slice).collect();
        let basis = AffineBasis::of(&on, tol);
        if basis.rank() + 1 != k {
            return Err(Error::Internal(format!("facet {:?} has rank {} in R^{k}", facet.members, basis.rank())));
        }
        let local: Vec<Vec<f64>> = on.iter().map(|p| basis.coords(p)).collect();
        for ridge in hull_facets(&local, tol)? {
            let mut dir = vec![0.0; k];
            for (c, d) in ridge.normal.iter().zip(&basis.dirs) {
                for (x, y) in dir.iter_mut().zip(d) {
                    *x += c * y;
                }
            }
            let axis: Vec<usize> = ridge.members.iter().map(|&i| facet.members[i]).collect();
            let next = turn(points, &facet, axis, &orthogonal_to(dir, &facet.normal), tol)?;
            if seen.insert(next.members.clone()) {
                queue.push_back(next);
            }
        }
        facets.push(facet);
    }
    Ok(facets)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_has_four_edges() {
        let pts = vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![1.0, 1.0],
            vec![0.0, 1.0],
            vec![0.5, 0.0],
            vec![0.5, 0.5],
        ];
        let f = hull_facets(&pts, 1e-12).unwrap();
        assert_eq!(f.len(), 4);
        assert!(f.iter().any(|f| f.members == vec![0, 1, 4]));
        assert!(f.iter().all(|f| !f.members.contains(&5)));
    }

    #[test]
    fn cube_has_six_faces() {
        let mut pts = Vec::new();
        for i in 0..8 {
            pts.push(vec![(i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64]);
        }
        pts.push(vec![0.5, 0.5, 0.5]);
        let f = hull_facets(&pts, 1e-12).unwrap();
        assert_eq!(f.len(), 6);
        assert!(f.iter().all(|f| f.members.len() == 4));
    }

    #[test]
    fn tetrahedron() {
        let pts = vec![vec![0.0, 0.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
        assert_eq!(hull_facets(&pts, 1e-12).unwrap().len(), 4);
    }

    #[test]
    fn flat_set_is_rejected() {
        let pts = vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]];
        assert!(hull_facets(&pts, 1e-12).is_err());
    }

    #[test]
    fn tesseract_has_eight_cells() {
        let pts: Vec<Vec<f64>> = (0..16).map(|i| (0..4).map(|b| ((i >> b) & 1) as f64).collect()).collect();
        let f = hull_facets(&pts, 1e-12).unwrap();
        assert_eq!(f.len(), 8);
        assert!(f.iter().all(|f| f.members.len() == 8));
    }

    #[test]
    fn random_points_give_simplicial_facets() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let pts: Vec<Vec<f64>> = (0..25).map(|_| (0..4).map(|_| rng.random::<f64>()).collect()).collect();
            let f = hull_facets(&pts, 1e-12).unwrap();
            assert!(f.iter().all(|f| f.members.len() == 4));
        }
    }

    #[test]
    fn sliver_facet_keeps_far_coplanar_points() {
        // Two points close together define the top edge; the far end of the
        // same edge must still be recognised as lying on it.
        let pts = vec![
            vec![0.0, 0.0],
            vec![0.5306747491840981, 0.05348382921265773],
            vec![0.5308301737485176, 0.053499493611365564],
            vec![0.8933374928584923, 0.0],
            vec![0.4, -1.0],
        ];
        let f = hull_facets(&pts, 1e-11).unwrap();
        assert_eq!(f.len(), 4, "{f:?}");
        assert!(f.iter().any(|f| f.members == vec![0, 1, 2]));
    }
}
