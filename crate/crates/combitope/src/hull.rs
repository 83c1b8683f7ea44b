//! Exact facet enumeration: from a full-dimensional rational point set,
//! produce the facet hyperplanes and the complete vertex-facet incidence
//! matrix.
//!
//! The algorithm is incremental: starting from a simplex spanned by the
//! first d+1 affinely independent points, each remaining point is inserted
//! in input order. Facets visible from the new point are discarded, facets
//! whose hyperplane contains the point absorb it, and a new facet is built
//! through every horizon ridge. All pivots are exact rationals; a supporting
//! hyperplane either contains a point or it does not.

use crate::error::{Error, Result};
use crate::lattice::{CombPolytope, VertexSet, MAX_VERTICES};
use crate::ratlin::{affine_dim, rank, rat, solve_hyperplane, Hyperplane, RVector, Rational};
use num_traits::Zero;

/// A finite set of distinct rational points in `dim`-space.
#[derive(Clone, Debug)]
pub struct PointSet {
    dim: usize,
    points: Vec<RVector>,
}

impl PointSet {
    pub fn new(dim: usize, points: Vec<RVector>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::BadParameter("ambient dimension must be positive".into()));
        }
        if points.is_empty() {
            return Err(Error::EmptyPointList);
        }
        if points.len() > MAX_VERTICES {
            return Err(Error::TooManyVertices {
                max: MAX_VERTICES,
                got: points.len(),
            });
        }
        for p in &points {
            if p.dim() != dim {
                return Err(Error::BadParameter(format!(
                    "point {p:?} has {} coordinates, expected {dim}",
                    p.dim()
                )));
            }
        }
        for (i, p) in points.iter().enumerate() {
            for q in points.iter().skip(i + 1) {
                if p == q {
                    return Err(Error::BadParameter(format!("duplicate point {p:?}")));
                }
            }
        }
        Ok(PointSet { dim, points })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[RVector] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &RVector {
        &self.points[i]
    }

    fn gather(&self, idx: &VertexSet) -> Vec<RVector> {
        idx.iter().map(|i| self.points[i].clone()).collect()
    }
}

/// Output of facet enumeration: outward-oriented facet hyperplanes in a
/// deterministic order, per-facet incidence sets over the input indexing,
/// and a flag for every input point saying whether it is a vertex.
#[derive(Clone, Debug)]
pub struct HullResult {
    pub facets: Vec<Hyperplane>,
    pub incidence: Vec<VertexSet>,
    pub vertex_flags: Vec<bool>,
}

impl HullResult {
    pub fn nfacets(&self) -> usize {
        self.facets.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_flags.iter().filter(|&&f| f).count()
    }

    /// Incidence data as a combinatorial polytope. Requires every input
    /// point to be a vertex, so indices carry over unchanged.
    pub fn to_comb(&self, dim: usize) -> Result<CombPolytope> {
        if !self.vertex_flags.iter().all(|&f| f) {
            let non: Vec<usize> = self
                .vertex_flags
                .iter()
                .enumerate()
                .filter(|(_, &f)| !f)
                .map(|(i, _)| i)
                .collect();
            return Err(Error::BadParameter(format!(
                "points {non:?} are not vertices of the hull"
            )));
        }
        CombPolytope::new(dim, self.vertex_flags.len(), self.incidence.clone())
    }
}

struct WorkFacet {
    plane: Hyperplane,
    inc: VertexSet,
}

/// Orients `h` so that `h.eval(interior) < 0`, then normalizes to coprime
/// integer entries without flipping the orientation again.
fn orient_outward(h: Hyperplane, interior: &RVector) -> Result<Hyperplane> {
    let side = h.eval(interior);
    if side.is_zero() {
        return Err(Error::Internal(
            "candidate facet hyperplane passes through the interior point".into(),
        ));
    }
    let oriented = if side > Rational::zero() { h.flipped() } else { h };
    Ok(oriented.normalized_keep_sign())
}

/// Complete, duplicate-free facet enumeration of a full-dimensional point
/// set, with exact incidences and deterministic output order.
pub fn facet_enumerate(ps: &PointSet) -> Result<HullResult> {
    let d = ps.dim();
    let n = ps.len();

    // Initial simplex: first d+1 affinely independent points in input order.
    let mut simplex: Vec<usize> = Vec::with_capacity(d + 1);
    let mut chosen: Vec<RVector> = Vec::new();
    for i in 0..n {
        chosen.push(ps.point(i).clone());
        if affine_dim(&chosen)? == chosen.len() - 1 {
            simplex.push(i);
        } else {
            chosen.pop();
        }
        if simplex.len() == d + 1 {
            break;
        }
    }
    if simplex.len() != d + 1 {
        return Err(Error::NotFullDimensional {
            expected: d,
            actual: simplex.len().saturating_sub(1),
        });
    }

    // Fixed interior reference: the simplex centroid stays interior as the
    // hull grows, so it orients every hyperplane for the whole run.
    let centroid_scale = rat(simplex.len() as i64);
    let mut center = RVector::zero(d);
    for &i in &simplex {
        center = center.add(ps.point(i));
    }
    let center = center.scale(&(rat(1) / centroid_scale));

    let mut facets: Vec<WorkFacet> = Vec::with_capacity(d + 1);
    for omit in 0..simplex.len() {
        let on: Vec<usize> = simplex
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != omit)
            .map(|(_, &i)| i)
            .collect();
        let pts: Vec<RVector> = on.iter().map(|&i| ps.point(i).clone()).collect();
        let plane = orient_outward(solve_hyperplane(&pts)?, &center)?;
        facets.push(WorkFacet {
            plane,
            inc: VertexSet::from_indices(on.iter().copied()),
        });
    }

    let mut processed = VertexSet::from_indices(simplex.iter().copied());
    for i in 0..n {
        if processed.contains(i) {
            continue;
        }
        insert_point(ps, i, processed, &mut facets, &center)?;
        processed.insert(i);
    }

    facets.sort_by(|a, b| a.plane.cmp(&b.plane));

    let incidence: Vec<VertexSet> = facets.iter().map(|f| f.inc).collect();
    let planes: Vec<Hyperplane> = facets.into_iter().map(|f| f.plane).collect();

    // A point of the hull is a vertex iff its active facet normals span the
    // whole space.
    let mut vertex_flags = Vec::with_capacity(n);
    for i in 0..n {
        let active: Vec<RVector> = planes
            .iter()
            .zip(&incidence)
            .filter(|(_, inc)| inc.contains(i))
            .map(|(h, _)| h.normal.clone())
            .collect();
        vertex_flags.push(rank(&active) == d);
    }

    let result = HullResult {
        facets: planes,
        incidence,
        vertex_flags,
    };
    validate(ps, &result)?;
    Ok(result)
}

fn insert_point(
    ps: &PointSet,
    i: usize,
    processed: VertexSet,
    facets: &mut Vec<WorkFacet>,
    center: &RVector,
) -> Result<()> {
    let d = ps.dim();
    let p = ps.point(i);
    let zero = Rational::zero();

    let mut visible: Vec<usize> = Vec::new();
    let mut on: Vec<usize> = Vec::new();
    let mut hidden: Vec<usize> = Vec::new();
    for (k, f) in facets.iter().enumerate() {
        let side = f.plane.eval(p);
        if side > zero {
            visible.push(k);
        } else if side.is_zero() {
            on.push(k);
        } else {
            hidden.push(k);
        }
    }

    if visible.is_empty() {
        for &k in &on {
            facets[k].inc.insert(i);
        }
        return Ok(());
    }
    if hidden.is_empty() {
        return Err(Error::Internal(
            "new point sees every facet; the interior reference is wrong".into(),
        ));
    }

    // New facets arise from horizon ridges between a visible facet and a
    // hidden one. Facets whose hyperplane contains the point are kept and
    // absorb it; the plane through any (visible, on) ridge and the point is
    // the on-facet's own plane.
    let mut new_facets: Vec<WorkFacet> = Vec::new();
    for &vk in &visible {
        for &hk in &hidden {
            let ridge = facets[vk].inc.intersect(facets[hk].inc);
            let ridge_pts = ps.gather(&ridge);
            if d >= 2 {
                if ridge.len() < d - 1 || affine_dim(&ridge_pts)? != d - 2 {
                    continue;
                }
            } else if !ridge.is_empty() {
                continue;
            }
            let mut span = ridge_pts;
            span.push(p.clone());
            let plane = orient_outward(solve_hyperplane(&span)?, center)?;
            if new_facets.iter().any(|f| f.plane == plane) {
                continue;
            }
            let mut inc = VertexSet::single(i);
            for j in processed.iter() {
                let side = plane.eval(ps.point(j));
                if side.is_zero() {
                    inc.insert(j);
                } else if side > zero {
                    return Err(Error::Internal(format!(
                        "processed point {j} lies beyond a freshly built facet"
                    )));
                }
            }
            new_facets.push(WorkFacet { plane, inc });
        }
    }
    if new_facets.is_empty() {
        return Err(Error::Internal(
            "visible facets but no horizon ridges found".into(),
        ));
    }

    let keep: Vec<WorkFacet> = {
        let mut kept = Vec::with_capacity(hidden.len() + on.len() + new_facets.len());
        for (k, mut f) in std::mem::take(facets).into_iter().enumerate() {
            if visible.contains(&k) {
                continue;
            }
            if on.contains(&k) {
                f.inc.insert(i);
            }
            kept.push(f);
        }
        // Degenerate inputs can rebuild the plane of a kept facet; merge
        // rather than duplicate.
        for nf in new_facets {
            if !kept.iter().any(|f| f.plane == nf.plane) {
                kept.push(nf);
            }
        }
        kept
    };
    *facets = keep;
    Ok(())
}

/// Internal sanity pass over a finished hull; failures indicate bugs, not
/// bad input, so they surface as internal errors.
fn validate(ps: &PointSet, hr: &HullResult) -> Result<()> {
    let zero = Rational::zero();
    for (k, h) in hr.facets.iter().enumerate() {
        for (j, p) in ps.points().iter().enumerate() {
            let side = h.eval(p);
            if side > zero {
                return Err(Error::Internal(format!(
                    "point {j} violates facet {k} after enumeration"
                )));
            }
            if side.is_zero() != hr.incidence[k].contains(j) {
                return Err(Error::Internal(format!(
                    "incidence of point {j} on facet {k} is inconsistent"
                )));
            }
        }
        let inc_pts = ps.gather(&hr.incidence[k]);
        if affine_dim(&inc_pts)? != ps.dim() - 1 {
            return Err(Error::Internal(format!(
                "facet {k} incidence does not span dimension {}",
                ps.dim() - 1
            )));
        }
    }
    Ok(())
}

/// The centroid of the point set; strictly inside every facet of the hull.
pub fn interior_point(ps: &PointSet) -> RVector {
    let mut sum = RVector::zero(ps.dim());
    for p in ps.points() {
        sum = sum.add(p);
    }
    sum.scale(&(rat(1) / rat(ps.len() as i64)))
}

/// True iff every input point is a vertex of the hull. Guards constructions
/// (truncation depths, apex heights) that would otherwise silently merge or
/// swallow points.
pub fn verify_vertices(ps: &PointSet, hr: &HullResult) -> bool {
    debug_assert_eq!(ps.len(), hr.vertex_flags.len());
    hr.vertex_flags.iter().all(|&f| f)
}
