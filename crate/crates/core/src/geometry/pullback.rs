use super::polytope::HPolytope;
use super::{AffineFunctional, AffineMap, SimplexPoint, VertexInterpolant};
use crate::{Error, Result};

/// One linear piece of a pulled-back interpolant: on the region where all
/// `region` functionals are non-negative the function equals `value`.
#[derive(Debug, Clone)]
pub struct PullbackPiece {
    pub region: Vec<AffineFunctional>,
    pub value: AffineFunctional,
}

/// `f ∘ ℓ` for an interpolant `f` on the target simplex and an affine map
/// `ℓ` from the source simplex into it.
#[derive(Debug, Clone)]
pub struct PulledBack {
    map: AffineMap,
    target: VertexInterpolant,
    pieces: Vec<PullbackPiece>,
}

/// Composes an interpolant with an affine map between simplices. The
/// composite is again piecewise linear; its pieces are the preimages of the
/// target triangulation's simplices.
pub fn pullback_affine(f: &VertexInterpolant, map: &AffineMap) -> Result<PulledBack> {
    let target_n = f.triangulation().outcomes();
    if map.target_len() != target_n {
        return Err(Error::Domain(format!(
            "map targets {} outcomes, interpolant lives on {target_n}",
            map.target_len()
        )));
    }
    map.check_maps_simplex()?;
    let source_n = map.source_len();
    let d = source_n.saturating_sub(1);
    let mut pieces = Vec::new();
    for k in 0..f.triangulation().simplices().len() {
        let (Some(weights), Some(value)) = (f.triangulation().weight_functionals(k), f.piece(k)) else {
            continue;
        };
        let mut poly = HPolytope::simplex(d);
        let mut region = Vec::new();
        for w in &weights {
            let g = w.pullback(map);
            poly.push_nonnegative(&g);
            if cuts_simplex(&g) {
                region.push(g.canonical());
            } else if corner_values(&g).iter().all(|v| *v < -1e-12) {
                region.clear();
                poly.push_nonnegative(&AffineFunctional::constant(source_n, -1.0));
                break;
            }
        }
        let vertices = poly.vertices();
        if !poly.is_full_dimensional(&vertices) {
            continue;
        }
        pieces.push(PullbackPiece { region, value: value.pullback(map).canonical() });
    }
    if pieces.is_empty() {
        return Err(Error::Internal("pullback produced no pieces".into()));
    }
    Ok(PulledBack { map: map.clone(), target: f.clone(), pieces })
}

fn corner_values(g: &AffineFunctional) -> Vec<f64> {
    let n = g.weights.len();
    (0..n).map(|i| g.weights[i] + g.offset).collect()
}

/// True when the zero set of `g` passes through the interior of the
/// simplex (it takes both signs at the corners).
fn cuts_simplex(g: &AffineFunctional) -> bool {
    let v = corner_values(g);
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    lo < -1e-12 && hi > 1e-12
}

impl PulledBack {
    pub fn map(&self) -> &AffineMap {
        &self.map
    }

    pub fn target(&self) -> &VertexInterpolant {
        &self.target
    }

    pub fn pieces(&self) -> &[PullbackPiece] {
        &self.pieces
    }

    /// `f(ℓ(omega))`.
    pub fn eval(&self, omega: &SimplexPoint) -> Result<f64> {
        let image = self.map.apply_point(omega)?;
        self.target.interpolate(&image)
    }

    /// Distinct functionals whose zero sets bound the pieces inside the
    /// source simplex.
    pub fn boundary_functionals(&self) -> Vec<AffineFunctional> {
        let mut out: Vec<AffineFunctional> = Vec::new();
        for g in self.pieces.iter().flat_map(|p| p.region.iter()) {
            if !out.iter().any(|h| same_zero_set(h, g)) {
                out.push(g.clone());
            }
        }
        out
    }

    /// The composite as a single affine function, when it has one piece.
    pub fn as_affine(&self) -> Option<&AffineFunctional> {
        match self.pieces.as_slice() {
            [only] => Some(&only.value),
            _ => None,
        }
    }
}

/// Compares zero sets of two functionals on the simplex up to scaling.
pub(crate) fn same_zero_set(a: &AffineFunctional, b: &AffineFunctional) -> bool {
    let (ca, oa) = a.chart_form();
    let (cb, ob) = b.chart_form();
    let na = ca.iter().chain([&oa]).map(|x| x * x).sum::<f64>().sqrt();
    let nb = cb.iter().chain([&ob]).map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return na == nb;
    }
    let close = |sign: f64| {
        ca.iter()
            .chain([&oa])
            .zip(cb.iter().chain([&ob]))
            .all(|(x, y)| (x / na - sign * y / nb).abs() <= 1e-12)
    };
    close(1.0) || close(-1.0)
}
