//! Concave closure of a function sampled at finitely many points, with an
//! explicit triangulation realising it.
//!
//! The sampled graph is lifted to `R^{d+1}`; the upper facets of its hull
//! project to a polyhedral subdivision of the simplex, and every cell is
//! triangulated by pulling its vertices in the global lexicographic order.
//! Because the pulling rule on a face depends only on the face, adjacent
//! cells agree on their common ridges.

use std::cmp::Ordering;
use std::sync::Arc;

use super::hull::hull_facets;
use super::linalg::{self, AffineBasis};
use super::polytope::FACE_TOL;
use super::{CellArrangement, SimplexPoint, Triangulation, VertexInterpolant};
use crate::{Error, Result, EPS_GEOM};

/// Vertical tolerance, relative to the larger of 1 and the largest
/// absolute sample, for a sample to count as lying on an upper facet.
const LIFT_TOL: f64 = 1e-11;

/// Minimum vertical component of a facet normal for the facet to count as
/// an upper facet.
const UPPER_NORMAL: f64 = 1e-9;

/// The concave closure of `psi` restricted to the candidate vertices of
/// `arrangement`. When the arrangement contains every locus where `psi`
/// bends or jumps, this is the concave closure of `psi` itself.
///
/// ```
/// use signal_picking::geometry::{argcav, AffineFunctional, CellArrangement};
///
/// // A step at 1/11 on the binary simplex.
/// let arr = CellArrangement::new(2, vec![AffineFunctional::new(vec![1.0, 0.0], -1.0 / 11.0)]).unwrap();
/// let env = argcav(|w| Ok(if w[0] >= 1.0 / 11.0 - 1e-12 { 1.0 } else { 0.0 }), &arr).unwrap();
/// assert_eq!(env.values(), &[0.0, 1.0, 1.0]);
/// ```
pub fn argcav<F>(mut psi: F, arrangement: &CellArrangement) -> Result<VertexInterpolant>
where
    F: FnMut(&SimplexPoint) -> Result<f64>,
{
    let points = arrangement.candidate_vertices();
    let values = points.iter().map(&mut psi).collect::<Result<Vec<_>>>()?;
    concave_envelope(points, values)
}

/// The smallest concave function on the simplex lying above every sample
/// `(points[i], values[i])`, as an interpolant whose vertices are samples.
/// The samples must include the simplex corners. Samples closer than
/// `EPS_GEOM` are merged, keeping the lexicographically smallest point and
/// the largest value.
pub fn concave_envelope(points: Vec<SimplexPoint>, values: Vec<f64>) -> Result<VertexInterpolant> {
    if points.len() != values.len() {
        return Err(Error::Domain(format!("{} points but {} values", points.len(), values.len())));
    }
    let Some(n) = points.first().map(SimplexPoint::len) else {
        return Err(Error::Domain("no samples".into()));
    };
    if points.iter().any(|p| p.len() != n) {
        return Err(Error::Domain("samples live on different simplices".into()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("sample values must be finite".into()));
    }
    let (points, values) = merge_samples(points, values);
    for i in 0..n {
        let corner = SimplexPoint::corner(n, i);
        if !points.iter().any(|p| p.approx_eq(&corner, EPS_GEOM)) {
            return Err(Error::Internal(format!("samples miss simplex corner {i}")));
        }
    }

    let (keep, simplices) = match n {
        1 => (vec![0], vec![vec![0]]),
        2 => upper_chain(&points, &values),
        _ => upper_cells(&points, &values)?,
    };

    // Reindex onto the used samples, which stay in lexicographic order.
    let mut index = vec![usize::MAX; points.len()];
    for (new, &old) in keep.iter().enumerate() {
        index[old] = new;
    }
    let simplices: Vec<Vec<usize>> = simplices
        .into_iter()
        .map(|s| s.into_iter().map(|v| index[v]).collect())
        .collect();
    let vertices: Vec<SimplexPoint> = keep.iter().map(|&i| points[i].clone()).collect();
    let vals: Vec<f64> = keep.iter().map(|&i| values[i]).collect();
    let triangulation = Triangulation::new(vertices, simplices)?;
    check_volume(&triangulation)?;
    VertexInterpolant::new(Arc::new(triangulation), vals)
}

fn merge_samples(points: Vec<SimplexPoint>, values: Vec<f64>) -> (Vec<SimplexPoint>, Vec<f64>) {
    let mut pairs: Vec<(SimplexPoint, f64)> = points.into_iter().zip(values).collect();
    pairs.sort_by(|a, b| a.0.lex_cmp(&b.0));
    let mut out_p: Vec<SimplexPoint> = Vec::with_capacity(pairs.len());
    let mut out_v: Vec<f64> = Vec::with_capacity(pairs.len());
    for (p, v) in pairs {
        if let Some(j) = out_p.iter().rposition(|q| q.approx_eq(&p, EPS_GEOM)) {
            out_v[j] = out_v[j].max(v);
        } else {
            out_p.push(p);
            out_v.push(v);
        }
    }
    (out_p, out_v)
}

/// Binary simplex: the upper hull of `(omega_0, value)` by a monotone
/// chain. Points are sorted by decreasing `omega_0`, so the chain is built
/// right to left and returned in ascending sample order.
fn upper_chain(points: &[SimplexPoint], values: &[f64]) -> (Vec<usize>, Vec<Vec<usize>>) {
    let scale = values.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    let tol = LIFT_TOL * scale;
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| points[a][0].partial_cmp(&points[b][0]).unwrap_or(Ordering::Equal));
    let mut chain: Vec<usize> = Vec::new();
    for &c in &order {
        while chain.len() >= 2 {
            let (a, b) = (chain[chain.len() - 2], chain[chain.len() - 1]);
            let (za, zb, zc) = (points[a][0], points[b][0], points[c][0]);
            let chord = values[a] + (values[c] - values[a]) * (zb - za) / (zc - za);
            if values[b] <= chord + tol {
                chain.pop();
            } else {
                break;
            }
        }
        chain.push(c);
    }
    let mut keep = chain.clone();
    keep.sort_unstable();
    let simplices = chain.windows(2).map(|w| vec![w[0].min(w[1]), w[0].max(w[1])]).collect();
    (keep, simplices)
}

/// General dimension: upper facets of the lifted samples, each pulled.
fn upper_cells(points: &[SimplexPoint], values: &[f64]) -> Result<(Vec<usize>, Vec<Vec<usize>>)> {
    let n = points[0].len();
    let d = n - 1;
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let scale = values.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    let tol = LIFT_TOL * scale;

    let mut lifted: Vec<Vec<f64>> = points
        .iter()
        .zip(values)
        .map(|(p, &v)| p.chart().iter().copied().chain([v]).collect())
        .collect();
    // A point below the graph makes the set full-dimensional even when the
    // samples are coplanar; its facets all point downwards.
    let bottom = lifted.len();
    lifted.push(
        std::iter::repeat(1.0 / n as f64)
            .take(d)
            .chain([lo - (hi - lo).max(1.0)])
            .collect(),
    );

    let mut simplices: Vec<Vec<usize>> = Vec::new();
    for facet in hull_facets(&lifted, tol)? {
        if facet.normal[d] <= UPPER_NORMAL || facet.members.contains(&bottom) {
            continue;
        }
        let chart: Vec<Vec<f64>> = facet.members.iter().map(|&i| lifted[i][..d].to_vec()).collect();
        let refs: Vec<&[f64]> = chart.iter().map(Vec::as_slice).collect();
        // A nearly vertical facet can project to a sliver thinner than the
        // chart tolerance; it carries no area.
        if AffineBasis::of(&refs, FACE_TOL).rank() < d {
            continue;
        }
        simplices.extend(pull(&facet.members, &chart, FACE_TOL)?);
    }
    for s in simplices.iter_mut() {
        s.sort_unstable();
    }
    simplices.sort();
    simplices.dedup();
    let mut keep: Vec<usize> = simplices.iter().flatten().copied().collect();
    keep.sort_unstable();
    keep.dedup();
    Ok((keep, simplices))
}

/// Pulling triangulation of the convex hull of `coords` (full-dimensional
/// in their own coordinates), whose points carry the global sample indices
/// `members` in ascending order. The smallest index is lexicographically
/// smallest, hence a vertex of the hull.
fn pull(members: &[usize], coords: &[Vec<f64>], tol: f64) -> Result<Vec<Vec<usize>>> {
    let k = coords[0].len();
    if k == 0 {
        return Ok(vec![vec![members[0]]]);
    }
    let mut out = Vec::new();
    for facet in hull_facets(coords, tol)? {
        if facet.members.contains(&0) {
            continue;
        }
        let sub_members: Vec<usize> = facet.members.iter().map(|&i| members[i]).collect();
        let refs: Vec<&[f64]> = facet.members.iter().map(|&i| coords[i].as_slice()).collect();
        let basis = AffineBasis::of(&refs, tol);
        if basis.rank() + 1 != k {
            return Err(Error::Internal("facet of a cell has the wrong rank".into()));
        }
        let local: Vec<Vec<f64>> = refs.iter().map(|p| basis.coords(p)).collect();
        for mut s in pull(&sub_members, &local, tol)? {
            s.push(members[0]);
            out.push(s);
        }
    }
    Ok(out)
}

fn check_volume(t: &Triangulation) -> Result<()> {
    let d = t.outcomes() - 1;
    if d == 0 {
        return Ok(());
    }
    let total: f64 = t
        .simplices()
        .iter()
        .map(|s| {
            let base = t.vertices()[s[0]].chart();
            let rows: Vec<Vec<f64>> = s[1..].iter().map(|&v| linalg::sub(t.vertices()[v].chart(), base)).collect();
            linalg::determinant(&rows).abs()
        })
        .sum();
    if (total - 1.0).abs() > 1e-8 {
        return Err(Error::Internal(format!("envelope cells cover {total} of the simplex")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::validate_triangulation;
    use crate::geometry::AffineFunctional;

    fn grid3(steps: usize) -> Vec<SimplexPoint> {
        let mut out = Vec::new();
        for i in 0..=steps {
            for j in 0..=steps - i {
                let (a, b) = (i as f64 / steps as f64, j as f64 / steps as f64);
                out.push(SimplexPoint::projected(vec![a, b, 1.0 - a - b]));
            }
        }
        out
    }

    #[test]
    fn constant_gives_corners() {
        for n in [1, 2, 3, 4] {
            let arr = CellArrangement::empty(n);
            let env = argcav(|_| Ok(2.5), &arr).unwrap();
            assert_eq!(env.triangulation().vertices().len(), n);
            assert!(env.values().iter().all(|&v| v == 2.5));
        }
    }

    #[test]
    fn step_function_on_interval() {
        let arr = CellArrangement::new(2, vec![AffineFunctional::new(vec![1.0, 0.0], -1.0 / 11.0)]).unwrap();
        let env = argcav(|w| Ok(if w[0] >= 1.0 / 11.0 - 1e-12 { 1.0 } else { 0.0 }), &arr).unwrap();
        let firsts: Vec<f64> = env.triangulation().vertices().iter().map(|v| v[0]).collect();
        assert_eq!(firsts.len(), 3);
        assert!((firsts[1] - 1.0 / 11.0).abs() < 1e-15);
        let at = |x: f64| env.interpolate(&SimplexPoint::projected(vec![x, 1.0 - x])).unwrap();
        assert!((at(1.0 / 22.0) - 0.5).abs() < 1e-12);
        assert!((at(0.5) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cone_over_triangle() {
        // Psi = 1 at the centroid, 0 elsewhere on a grid: a pyramid.
        let mut points = grid3(6);
        points.push(SimplexPoint::uniform(3));
        let values: Vec<f64> = points
            .iter()
            .map(|p| if p.approx_eq(&SimplexPoint::uniform(3), 1e-12) { 1.0 } else { 0.0 })
            .collect();
        let env = concave_envelope(points, values).unwrap();
        assert_eq!(env.triangulation().vertices().len(), 4);
        assert_eq!(env.triangulation().simplices().len(), 3);
        assert!(validate_triangulation(env.triangulation()).valid);
    }

    #[test]
    fn coplanar_square_cells_share_diagonals() {
        // A concave tent with a flat quadrilateral top exercises pulling.
        let points = grid3(4);
        let values: Vec<f64> = points.iter().map(|p| p[0].min(0.5).min(p[1] + 0.25)).collect();
        let env = concave_envelope(points.clone(), values.clone()).unwrap();
        let report = validate_triangulation(env.triangulation());
        assert!(report.valid, "{:?}", report.diagnostics);
        for (p, v) in points.iter().zip(&values) {
            assert!(env.interpolate(p).unwrap() >= v - 1e-12);
        }
    }

    #[test]
    fn piecewise_constant_on_triangle() {
        // Upper semicontinuous with values {0, 1, 2}. Its closure has more
        // than one realising triangulation, so only values are pinned.
        let arr = CellArrangement::new(
            3,
            vec![AffineFunctional::new(vec![1.0, 0.0, 0.0], -0.6), AffineFunctional::new(vec![0.0, 1.0, 0.0], -0.6)],
        )
        .unwrap();
        let f = |w: &SimplexPoint| {
            if w[0] >= 0.6 - 1e-12 {
                2.0
            } else if w[1] >= 0.6 - 1e-12 {
                1.0
            } else {
                0.0
            }
        };
        let env = argcav(|w| Ok(f(w)), &arr).unwrap();
        let report = validate_triangulation(env.triangulation());
        assert!(report.valid, "{:?}", report.diagnostics);
        let at = |c: [f64; 3]| env.interpolate(&SimplexPoint::projected(c.to_vec())).unwrap();
        assert!((at([1.0, 0.0, 0.0]) - 2.0).abs() < 1e-12);
        assert!((at([0.0, 1.0, 0.0]) - 1.0).abs() < 1e-12);
        assert!(at([0.0, 0.0, 1.0]).abs() < 1e-12);
        assert!((at([0.5, 0.5, 0.0]) - 11.0 / 6.0).abs() < 1e-12);
        assert!((at([0.3, 0.0, 0.7]) - 1.0).abs() < 1e-12);
        assert!((at([0.7, 0.1, 0.2]) - 2.0).abs() < 1e-12);
        for p in grid3(20) {
            assert!(at([p[0], p[1], p[2]]) >= f(&p) - 1e-12);
        }
        for (v, value) in env.triangulation().vertices().iter().zip(env.values()) {
            assert_eq!(*value, f(v));
        }
    }

    #[test]
    fn missing_corner_is_an_error() {
        let pts = vec![SimplexPoint::corner(2, 0), SimplexPoint::projected(vec![0.5, 0.5])];
        assert!(concave_envelope(pts, vec![0.0, 1.0]).is_err());
    }
}
