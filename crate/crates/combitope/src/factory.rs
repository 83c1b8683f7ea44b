//! Constructions of the named polytope families as exact coordinate models,
//! plus the two truncation operations.
//!
//! Every construction goes through the hull: coordinates are chosen, facets
//! are enumerated, and the result is certified (`verify_vertices` plus the
//! expected count deltas) before it is returned. A failed certification is a
//! hard error, never a silently wrong polytope.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::hull::{facet_enumerate, interior_point, verify_vertices, HullResult, PointSet};
use crate::lattice::{
    build_lattice, graph_from_lattice, isomorphic, CombPolytope, FaceLattice, FamilyTag, Graph,
    VertexSet,
};
use crate::ratlin::{format_rational, parse_rational, rat, ratio, RVector, Rational};

/// A polytope with both geometry and its derived combinatorial structure.
/// Immutable after construction; the incidence data is exactly what facet
/// enumeration produced, with every point certified to be a vertex.
#[derive(Clone, Debug)]
pub struct Polytope {
    dim: usize,
    points: PointSet,
    hull: HullResult,
    comb: CombPolytope,
    lattice: FaceLattice,
    graph: Graph,
    provenance: String,
}

impl Polytope {
    pub fn from_points(points: PointSet, provenance: impl Into<String>) -> Result<Self> {
        let provenance = provenance.into();
        let hull = facet_enumerate(&points)?;
        if !verify_vertices(&points, &hull) {
            return Err(Error::BadParameter(format!(
                "construction {provenance}: some input point is not a vertex of its hull"
            )));
        }
        let comb = hull.to_comb(points.dim())?;
        let lattice = build_lattice(&comb)?;
        let graph = graph_from_lattice(&lattice)?;
        Ok(Polytope {
            dim: points.dim(),
            points,
            hull,
            comb,
            lattice,
            graph,
            provenance,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nverts(&self) -> usize {
        self.points.len()
    }

    pub fn nedges(&self) -> usize {
        self.graph.edge_count()
    }

    pub fn nfacets(&self) -> usize {
        self.comb.nfacets()
    }

    /// Total excess degree `2e - dv`.
    pub fn excess(&self) -> usize {
        2 * self.nedges() - self.dim * self.nverts()
    }

    pub fn points(&self) -> &PointSet {
        &self.points
    }

    pub fn hull(&self) -> &HullResult {
        &self.hull
    }

    pub fn comb(&self) -> &CombPolytope {
        &self.comb
    }

    pub fn lattice(&self) -> &FaceLattice {
        &self.lattice
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn f_vector(&self) -> Vec<usize> {
        self.lattice.f_vector()
    }

    pub fn is_simple(&self) -> bool {
        (0..self.nverts()).all(|v| self.graph.degree(v) == self.dim)
    }

    /// Strictly interior reference point (the centroid of the vertices).
    pub fn interior(&self) -> RVector {
        interior_point(&self.points)
    }
}

// ---------------------------------------------------------------------------
// Elementary constructions
// ---------------------------------------------------------------------------

/// The `d`-simplex `conv{0, e_1, ..., e_d}`.
pub fn simplex(d: usize) -> Result<Polytope> {
    if d < 1 {
        return Err(Error::BadParameter("simplex needs d >= 1".into()));
    }
    let mut pts = vec![RVector::zero(d)];
    for i in 0..d {
        pts.push(RVector::unit(d, i));
    }
    Polytope::from_points(PointSet::new(d, pts)?, Recipe::Simplex(d).to_string())
}

/// Prism over an arbitrary polytope: `P x [0,1]`, one dimension up.
pub fn prism_over(base: &Polytope) -> Result<Polytope> {
    let d = base.dim() + 1;
    let mut pts = Vec::with_capacity(2 * base.nverts());
    for height in [Rational::zero(), Rational::one()] {
        for p in base.points().points() {
            pts.push(p.extended(height.clone()));
        }
    }
    Polytope::from_points(
        PointSet::new(d, pts)?,
        format!("prism_over({})", base.provenance()),
    )?
    .checked_counts(2 * base.nverts(), None)
}

/// The simplicial `d`-prism: prism over a `(d-1)`-simplex. The 1-prism is a
/// segment.
pub fn prism(d: usize) -> Result<Polytope> {
    if d < 1 {
        return Err(Error::BadParameter("prism needs d >= 1".into()));
    }
    let p = if d == 1 {
        simplex(1)?
    } else {
        prism_over(&simplex(d - 1)?)?
    };
    p.with_provenance(Recipe::Prism(d).to_string())
}

/// `r`-fold pyramid: apexes are placed in `r` fresh coordinate directions
/// at doubling heights 1, 2, 4, ..., each affinely independent of everything
/// before it.
pub fn pyramid(base: &Polytope, r: usize) -> Result<Polytope> {
    if r < 1 {
        return Err(Error::BadParameter("pyramid needs r >= 1".into()));
    }
    let d0 = base.dim();
    let d = d0 + r;
    let mut pts: Vec<RVector> = base
        .points()
        .points()
        .iter()
        .map(|p| {
            let mut q = p.clone();
            for _ in 0..r {
                q = q.extended(Rational::zero());
            }
            q
        })
        .collect();
    let mut apex = RVector::zero(d);
    let mut height = rat(1);
    for j in 0..r {
        apex = apex.add(&RVector::unit(d, d0 + j).scale(&height));
        height = height * rat(2);
        pts.push(apex.clone());
    }
    let expect = base.nverts() + r;
    Polytope::from_points(
        PointSet::new(d, pts)?,
        format!("pyramid({},{})", base.provenance(), r),
    )?
    .checked_counts(expect, None)
}

/// The `(k, r)`-triplex `M_{k,r}`: the `r`-fold pyramid over the simplicial
/// `k`-prism. `r = 0` is the prism itself; `k = 1` degenerates to a simplex.
pub fn triplex(k: usize, r: usize) -> Result<Polytope> {
    if k < 1 {
        return Err(Error::BadParameter("triplex needs k >= 1".into()));
    }
    let base = prism(k)?;
    let p = if r == 0 { base } else { pyramid(&base, r)? };
    p.with_provenance(Recipe::Triplex(k, r).to_string())
}

/// Minkowski sum of an `m`-simplex and an `n`-simplex in complementary
/// subspaces: `(m+1)(n+1)` vertices, `m+n+2` facets, simple.
pub fn delta(m: usize, n: usize) -> Result<Polytope> {
    if m < 1 || n < 1 {
        return Err(Error::BadParameter("delta needs m, n >= 1".into()));
    }
    let d = m + n;
    let mut left = vec![RVector::zero(d)];
    for i in 0..m {
        left.push(RVector::unit(d, i));
    }
    let mut right = vec![RVector::zero(d)];
    for j in 0..n {
        right.push(RVector::unit(d, m + j));
    }
    let mut pts = Vec::with_capacity(left.len() * right.len());
    for a in &left {
        for b in &right {
            pts.push(a.add(b));
        }
    }
    let p = Polytope::from_points(PointSet::new(d, pts)?, Recipe::Delta(m, n).to_string())?;
    p.checked_counts((m + 1) * (n + 1), Some(m + n + 2))
}

impl Polytope {
    fn with_provenance(mut self, provenance: String) -> Result<Polytope> {
        self.provenance = provenance;
        Ok(self)
    }

    fn checked_counts(self, nverts: usize, nfacets: Option<usize>) -> Result<Polytope> {
        if self.nverts() != nverts {
            return Err(Error::Internal(format!(
                "{}: expected {nverts} vertices, built {}",
                self.provenance,
                self.nverts()
            )));
        }
        if let Some(nf) = nfacets {
            if self.nfacets() != nf {
                return Err(Error::Internal(format!(
                    "{}: expected {nf} facets, built {}",
                    self.provenance,
                    self.nfacets()
                )));
            }
        }
        Ok(self)
    }
}

// ---------------------------------------------------------------------------
// Truncations
// ---------------------------------------------------------------------------

/// A direction that is uniquely maximized over the vertices at `off`.
/// First candidate is the sum of reversed edge directions at the cut set;
/// if that fails strict separation, the sum of the normals of all facets
/// meeting `off` is used, which always separates.
fn separating_direction(p: &Polytope, off: VertexSet) -> Result<RVector> {
    let d = p.dim();
    let mut edge_sum = RVector::zero(d);
    for u in off.iter() {
        for w in p.graph().neighbors(u).minus(off).iter() {
            edge_sum = edge_sum.add(&p.points().point(u).sub(p.points().point(w)));
        }
    }
    if separates(p, off, &edge_sum) {
        return Ok(edge_sum);
    }
    let mut normal_sum = RVector::zero(d);
    for (h, inc) in p.hull().facets.iter().zip(&p.hull().incidence) {
        if off.is_subset_of(*inc) {
            normal_sum = normal_sum.add(&h.normal);
        }
    }
    if separates(p, off, &normal_sum) {
        return Ok(normal_sum);
    }
    Err(Error::CutSearchFailed(format!(
        "no direction separates {off} from the other vertices of {}",
        p.provenance()
    )))
}

/// All vertices in `off` share the maximum of `a`, strictly above the rest.
fn separates(p: &Polytope, off: VertexSet, a: &RVector) -> bool {
    if a.is_zero() {
        return false;
    }
    let peak = a.dot(p.points().point(off.iter().next().unwrap()));
    for v in 0..p.nverts() {
        let val = a.dot(p.points().point(v));
        if off.contains(v) {
            if val != peak {
                return false;
            }
        } else if val >= peak {
            return false;
        }
    }
    true
}

/// Cuts the vertices in `off` from `p` with the hyperplane `a.x = c`,
/// replacing them by the intersection points on the edges leaving `off`.
fn cut_polytope(
    p: &Polytope,
    off: VertexSet,
    a: &RVector,
    c: &Rational,
    provenance: String,
) -> Result<Polytope> {
    let mut pts: Vec<RVector> = Vec::new();
    for v in 0..p.nverts() {
        if !off.contains(v) {
            pts.push(p.points().point(v).clone());
        }
    }
    for u in off.iter() {
        let pu = p.points().point(u);
        let au = a.dot(pu);
        for w in p.graph().neighbors(u).minus(off).iter() {
            let pw = p.points().point(w);
            let aw = a.dot(pw);
            // a.(u + t(w-u)) = c
            let t = (&au - c) / (&au - &aw);
            pts.push(pu.add(&pw.sub(pu).scale(&t)));
        }
    }
    Polytope::from_points(PointSet::new(p.dim(), pts)?, provenance)
}

/// Truncates a vertex: one cut hyperplane strictly separating `u` from every
/// other vertex, meeting each edge at `u`. For a simple vertex this adds
/// `d - 1` vertices, `C(d,2)` edges and preserves the excess degree; those
/// deltas are asserted. Nonsimple vertices are allowed and gain `deg u - 1`
/// vertices.
pub fn truncate_vertex(p: &Polytope, u: usize) -> Result<Polytope> {
    if u >= p.nverts() {
        return Err(Error::BadParameter(format!("no vertex {u}")));
    }
    let off = VertexSet::single(u);
    let provenance = format!("truncate_vertex({},{u})", p.provenance());
    let deg = p.graph().degree(u);
    let simple = deg == p.dim();
    let result = cut_with_retries(p, off, provenance)?;

    let d = p.dim();
    let expect_v = p.nverts() + deg - 1;
    if result.nverts() != expect_v {
        return Err(Error::Internal(format!(
            "{}: expected {expect_v} vertices, built {}",
            result.provenance(),
            result.nverts()
        )));
    }
    if simple {
        let expect_e = p.nedges() + d * (d - 1) / 2;
        if result.nedges() != expect_e || result.excess() != p.excess() {
            return Err(Error::Internal(format!(
                "{}: simple-vertex truncation changed counts unexpectedly (e {} -> {}, excess {} -> {})",
                result.provenance(),
                p.nedges(),
                result.nedges(),
                p.excess(),
                result.excess()
            )));
        }
    }
    Ok(result)
}

/// Truncates a simple edge (both endpoints simple and adjacent): one cut
/// strictly separating `{u, w}` from the rest, adding `2d - 4` vertices and
/// preserving the excess degree; asserted.
pub fn truncate_edge(p: &Polytope, u: usize, w: usize) -> Result<Polytope> {
    let d = p.dim();
    if u >= p.nverts() || w >= p.nverts() || u == w {
        return Err(Error::BadParameter(format!("no edge {{{u},{w}}}")));
    }
    if !p.graph().is_edge(u, w) {
        return Err(Error::BadParameter(format!(
            "{{{u},{w}}} is not an edge of {}",
            p.provenance()
        )));
    }
    if p.graph().degree(u) != d || p.graph().degree(w) != d {
        return Err(Error::BadParameter(format!(
            "edge {{{u},{w}}} of {} is not simple",
            p.provenance()
        )));
    }
    let off = VertexSet::from_indices([u, w]);
    let provenance = format!("truncate_edge({},{u},{w})", p.provenance());
    let result = cut_with_retries(p, off, provenance)?;

    let expect_v = p.nverts() + 2 * d - 4;
    if result.nverts() != expect_v || result.excess() != p.excess() {
        return Err(Error::Internal(format!(
            "{}: expected {expect_v} vertices / excess {}, built {} / {}",
            result.provenance(),
            p.excess(),
            result.nverts(),
            result.excess()
        )));
    }
    Ok(result)
}

/// Places the cut halfway between the cut-off vertices and the nearest
/// remaining vertex in the separating direction, moving closer on failure.
fn cut_with_retries(p: &Polytope, off: VertexSet, provenance: String) -> Result<Polytope> {
    let a = separating_direction(p, off)?;
    let peak = a.dot(p.points().point(off.iter().next().unwrap()));
    let rest_max = (0..p.nverts())
        .filter(|v| !off.contains(*v))
        .map(|v| a.dot(p.points().point(v)))
        .max()
        .expect("polytope has vertices outside the cut");
    let gap = &peak - &rest_max;
    let mut last_err = None;
    for attempt in 0..5 {
        let c = &peak - &gap / rat(1 << (attempt + 1));
        match cut_polytope(p, off, &a, &c, provenance.clone()) {
            Ok(q) => return Ok(q),
            Err(e) => last_err = Some(e),
        }
    }
    Err(Error::CutSearchFailed(format!(
        "{provenance}: every cut depth failed, last error: {}",
        last_err.map(|e| e.to_string()).unwrap_or_default()
    )))
}

// ---------------------------------------------------------------------------
// Named families
// ---------------------------------------------------------------------------

fn first_simple_vertex(p: &Polytope) -> Result<usize> {
    (0..p.nverts())
        .find(|&v| p.graph().degree(v) == p.dim())
        .ok_or_else(|| Error::BadParameter(format!("{} has no simple vertex", p.provenance())))
}

fn first_nonsimple_vertex(p: &Polytope) -> Result<usize> {
    (0..p.nverts())
        .find(|&v| p.graph().degree(v) > p.dim())
        .ok_or_else(|| Error::BadParameter(format!("{} has no nonsimple vertex", p.provenance())))
}

fn first_simple_edge(p: &Polytope) -> Result<(usize, usize)> {
    let d = p.dim();
    for u in 0..p.nverts() {
        if p.graph().degree(u) != d {
            continue;
        }
        for w in u + 1..p.nverts() {
            if p.graph().degree(w) == d && p.graph().is_edge(u, w) {
                return Ok((u, w));
            }
        }
    }
    Err(Error::BadParameter(format!(
        "{} has no simple edge",
        p.provenance()
    )))
}

/// `A_d`: truncate a nonsimple vertex of the `(2, d-2)`-triplex. `A_3` is
/// the cube. Also realisable as a prism over `M_{2,d-3}`; see
/// [`a_polytope_via_prism`].
pub fn a_polytope(d: usize) -> Result<Polytope> {
    if d < 3 {
        return Err(Error::BadParameter("A(d) needs d >= 3".into()));
    }
    let base = triplex(2, d - 2)?;
    let u = first_nonsimple_vertex(&base)?;
    truncate_vertex(&base, u)?
        .with_provenance(Recipe::A(d).to_string())?
        .checked_counts(2 * d + 2, Some(d + 3))
}

/// The second realisation of `A_d`, as a prism over `M_{2,d-3}`.
pub fn a_polytope_via_prism(d: usize) -> Result<Polytope> {
    if d < 3 {
        return Err(Error::BadParameter("A(d) needs d >= 3".into()));
    }
    let base = triplex(2, d - 3)?;
    prism_over(&base)?.checked_counts(2 * d + 2, Some(d + 3))
}

/// `B_d`: truncate a simple vertex of the `(3, d-3)`-triplex. `B_3` is the
/// 5-wedge, built by slicing one vertex of the triangular prism.
pub fn b_polytope(d: usize) -> Result<Polytope> {
    if d < 3 {
        return Err(Error::BadParameter("B(d) needs d >= 3".into()));
    }
    let p = if d == 3 {
        let base = prism(3)?;
        truncate_vertex(&base, first_simple_vertex(&base)?)?
    } else {
        let base = triplex(3, d - 3)?;
        truncate_vertex(&base, first_simple_vertex(&base)?)?
    };
    p.with_provenance(Recipe::B(d).to_string())?
        .checked_counts(2 * d + 2, Some(d + 3))
}

/// `C_d`: truncate a simple edge of the `(2, d-2)`-triplex; `3d - 2`
/// vertices, excess `d - 2`.
pub fn c_polytope(d: usize) -> Result<Polytope> {
    if d < 3 {
        return Err(Error::BadParameter("C(d) needs d >= 3".into()));
    }
    let base = triplex(2, d - 2)?;
    let (u, w) = first_simple_edge(&base)?;
    truncate_edge(&base, u, w)?
        .with_provenance(Recipe::C(d).to_string())?
        .checked_counts(3 * d - 2, None)
}

/// The pentasm: a `(2, d-2)`-triplex with a simple vertex truncated;
/// `2d + 1` vertices and `d^2 + d - 1` edges.
pub fn pentasm(d: usize) -> Result<Polytope> {
    if d < 3 {
        return Err(Error::BadParameter("pentasm needs d >= 3".into()));
    }
    let base = triplex(2, d - 2)?;
    truncate_vertex(&base, first_simple_vertex(&base)?)?
        .with_provenance(Recipe::Pentasm(d).to_string())?
        .checked_counts(2 * d + 1, None)
}

/// `J_d`: the simple polytope obtained by slicing one vertex of the
/// simplicial `d`-prism; `3d - 1` vertices. `J_2` is a pentagon.
pub fn j_polytope(d: usize) -> Result<Polytope> {
    if d < 2 {
        return Err(Error::BadParameter("J(d) needs d >= 2".into()));
    }
    let base = prism(d)?;
    truncate_vertex(&base, first_simple_vertex(&base)?)?
        .with_provenance(Recipe::J(d).to_string())?
        .checked_counts(3 * d - 1, None)
}

/// `N_d`: truncate a simple vertex of the triplex `M_{d-1,1}`; `3d - 2`
/// vertices with exactly one nonsimple vertex.
pub fn n_polytope(d: usize) -> Result<Polytope> {
    if d < 3 {
        return Err(Error::BadParameter("N(d) needs d >= 3".into()));
    }
    let base = triplex(d - 1, 1)?;
    truncate_vertex(&base, first_simple_vertex(&base)?)?
        .with_provenance(Recipe::N(d).to_string())?
        .checked_counts(3 * d - 2, None)
}

/// `Sigma_d`: the hull of `0, e1, e2, e1+e2` together with `e1+ek, e2+ek,
/// e1+e2+2ek` for every `3 <= k <= d`; `3d - 2` vertices, one of excess
/// `d - 2`, the rest simple.
pub fn sigma(d: usize) -> Result<Polytope> {
    if d < 3 {
        return Err(Error::BadParameter("sigma needs d >= 3".into()));
    }
    let e = |i: usize| RVector::unit(d, i - 1);
    let mut pts = vec![
        RVector::zero(d),
        e(1),
        e(2),
        e(1).add(&e(2)),
    ];
    for k in 3..=d {
        pts.push(e(1).add(&e(k)));
        pts.push(e(2).add(&e(k)));
        pts.push(e(1).add(&e(2)).add(&e(k).scale(&rat(2))));
    }
    Polytope::from_points(PointSet::new(d, pts)?, Recipe::Sigma(d).to_string())?
        .checked_counts(3 * d - 2, None)
}

/// The two nonpyramidal 4-polytopes with 8 vertices and 18 edges, from
/// their concrete coordinate models. Model 1 takes a parameter
/// `0 < epsilon < 1` (conventionally 1/2).
pub fn table1(which: u8, epsilon: Option<Rational>) -> Result<Polytope> {
    match which {
        1 => {
            let eps = epsilon.unwrap_or_else(|| ratio(1, 2));
            if eps <= Rational::zero() || eps >= Rational::one() {
                return Err(Error::BadParameter(format!(
                    "table1 model 1 needs 0 < epsilon < 1, got {}",
                    format_rational(&eps)
                )));
            }
            let mut pts = vec![RVector::zero(4); 8];
            pts[0] = RVector::new(vec![
                eps.clone(),
                Rational::zero(),
                Rational::zero(),
                Rational::zero(),
            ]);
            pts[1] = RVector::from_ints(&[1, 0, 0, 0]);
            pts[2] = RVector::from_ints(&[0, 1, 0, 0]);
            pts[3] = RVector::from_ints(&[0, 0, 1, 0]);
            pts[4] = RVector::from_ints(&[0, 0, 0, 1]);
            pts[5] = RVector::from_ints(&[1, 0, 0, 1]);
            pts[6] = RVector::from_ints(&[0, 1, 0, 1]);
            pts[7] = RVector::from_ints(&[0, 0, 1, 1]);
            Polytope::from_points(
                PointSet::new(4, pts)?,
                Recipe::Table1(1, Some(eps)).to_string(),
            )?
            .checked_counts(8, Some(7))
        }
        2 => {
            let pts = vec![
                RVector::from_ints(&[1, 1, 0, 0]),
                RVector::from_ints(&[1, -1, 0, 0]),
                RVector::from_ints(&[-1, 1, 0, 0]),
                RVector::from_ints(&[-1, -1, 0, 0]),
                RVector::from_ints(&[1, 0, 1, 0]),
                RVector::from_ints(&[-1, 0, 1, 0]),
                RVector::from_ints(&[0, 1, 0, 1]),
                RVector::from_ints(&[0, -1, 0, 1]),
            ];
            Polytope::from_points(PointSet::new(4, pts)?, Recipe::Table1(2, None).to_string())?
                .checked_counts(8, Some(7))
        }
        _ => Err(Error::BadParameter("table1 model must be 1 or 2".into())),
    }
}

/// Builds the canonical model of a family tag.
pub fn named(tag: FamilyTag) -> Result<Polytope> {
    match tag {
        FamilyTag::Simplex(d) => simplex(d),
        FamilyTag::Prism(d) => prism(d),
        FamilyTag::Delta(m, n) => delta(m, n),
        FamilyTag::Triplex(k, r) => triplex(k, r),
        FamilyTag::Pentasm(d) => pentasm(d),
        FamilyTag::A(d) => a_polytope(d),
        FamilyTag::B(d) => b_polytope(d),
        FamilyTag::C(d) => c_polytope(d),
        FamilyTag::Sigma(d) => sigma(d),
        FamilyTag::J(d) => j_polytope(d),
        FamilyTag::N(d) => n_polytope(d),
    }
}

// ---------------------------------------------------------------------------
// Reference cache for facet classification
// ---------------------------------------------------------------------------

/// One classification reference: a family member together with its counts.
pub struct ReferenceEntry {
    pub tag: FamilyTag,
    pub comb: CombPolytope,
    pub nverts: usize,
    pub nedges: usize,
}

/// Candidate tags for dimension `k`, in priority order. When two candidates
/// coincide (the 5-wedge shows up as both `B(3)` and `J(3)`), the first one
/// becomes the canonical tag and later duplicates are dropped.
fn candidate_tags(k: usize) -> Vec<FamilyTag> {
    let mut tags = vec![FamilyTag::Simplex(k), FamilyTag::Prism(k)];
    for m in 2..k {
        let n = k - m;
        if n >= 2 && m >= n {
            tags.push(FamilyTag::Delta(m, n));
        }
    }
    for kk in 2..k {
        let r = k - kk;
        if r >= 1 {
            tags.push(FamilyTag::Triplex(kk, r));
        }
    }
    if k >= 3 {
        tags.push(FamilyTag::Pentasm(k));
        tags.push(FamilyTag::A(k));
        tags.push(FamilyTag::B(k));
        tags.push(FamilyTag::J(k));
        tags.push(FamilyTag::C(k));
        tags.push(FamilyTag::Sigma(k));
        tags.push(FamilyTag::N(k));
    }
    tags
}

static REFERENCES: OnceLock<Mutex<HashMap<usize, Arc<Vec<ReferenceEntry>>>>> = OnceLock::new();

/// The read-only reference family cache for one dimension, built on first
/// use.
pub fn reference_families(dim: usize) -> Result<Arc<Vec<ReferenceEntry>>> {
    let cache = REFERENCES.get_or_init(|| Mutex::new(HashMap::new()));
    {
        let guard = cache.lock().expect("reference cache poisoned");
        if let Some(entry) = guard.get(&dim) {
            return Ok(Arc::clone(entry));
        }
    }
    let mut entries: Vec<ReferenceEntry> = Vec::new();
    for tag in candidate_tags(dim) {
        let p = named(tag)?;
        let duplicate = entries.iter().any(|e| {
            e.nverts == p.nverts()
                && e.nedges == p.nedges()
                && isomorphic(&e.comb, p.comb()).is_some()
        });
        if !duplicate {
            entries.push(ReferenceEntry {
                tag,
                nverts: p.nverts(),
                nedges: p.nedges(),
                comb: p.comb().clone(),
            });
        }
    }
    let arc = Arc::new(entries);
    let mut guard = cache.lock().expect("reference cache poisoned");
    Ok(Arc::clone(guard.entry(dim).or_insert(arc)))
}

/// The canonical tag of a family member: what `classify_polytope` answers
/// for its own construction. Coinciding families map to one tag.
pub fn canonical_tag(tag: FamilyTag) -> Result<FamilyTag> {
    let dim = match tag {
        FamilyTag::Simplex(d) | FamilyTag::Prism(d) => d,
        FamilyTag::Delta(m, n) => m + n,
        FamilyTag::Triplex(k, r) => k + r,
        FamilyTag::Pentasm(d)
        | FamilyTag::A(d)
        | FamilyTag::B(d)
        | FamilyTag::C(d)
        | FamilyTag::Sigma(d)
        | FamilyTag::J(d)
        | FamilyTag::N(d) => d,
    };
    if dim == 1 {
        return Ok(FamilyTag::Simplex(1));
    }
    if dim == 2 {
        // Triangle, square, pentagon.
        return crate::lattice::classify_polytope(named_dim2(tag)?.comb())?
            .ok_or_else(|| Error::Internal(format!("{tag} did not classify in dimension 2")));
    }
    crate::lattice::classify_polytope(named(tag)?.comb())?
        .ok_or_else(|| Error::Internal(format!("{tag} did not classify against references")))
}

fn named_dim2(tag: FamilyTag) -> Result<Polytope> {
    match tag {
        FamilyTag::Simplex(2) | FamilyTag::Prism(2) | FamilyTag::J(2) => named(tag),
        FamilyTag::Delta(1, 1) => delta(1, 1),
        FamilyTag::Triplex(k, 0) => prism(k),
        _ => named(tag),
    }
}

// ---------------------------------------------------------------------------
// Recipes
// ---------------------------------------------------------------------------

/// A construction expression. Every buildable polytope has one, and its
/// rendering doubles as provenance in the interchange files.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Recipe {
    Simplex(usize),
    Prism(usize),
    PrismOver(Box<Recipe>),
    Pyramid(Box<Recipe>, usize),
    Delta(usize, usize),
    Triplex(usize, usize),
    Pentasm(usize),
    A(usize),
    B(usize),
    C(usize),
    Sigma(usize),
    J(usize),
    N(usize),
    Table1(u8, Option<Rational>),
    TruncateVertex(Box<Recipe>, usize),
    TruncateEdge(Box<Recipe>, usize, usize),
}

impl Recipe {
    /// Builds the polytope this recipe describes.
    pub fn build(&self) -> Result<Polytope> {
        match self {
            Recipe::Simplex(d) => simplex(*d),
            Recipe::Prism(d) => prism(*d),
            Recipe::PrismOver(r) => prism_over(&r.build()?),
            Recipe::Pyramid(r, k) => pyramid(&r.build()?, *k),
            Recipe::Delta(m, n) => delta(*m, *n),
            Recipe::Triplex(k, r) => triplex(*k, *r),
            Recipe::Pentasm(d) => pentasm(*d),
            Recipe::A(d) => a_polytope(*d),
            Recipe::B(d) => b_polytope(*d),
            Recipe::C(d) => c_polytope(*d),
            Recipe::Sigma(d) => sigma(*d),
            Recipe::J(d) => j_polytope(*d),
            Recipe::N(d) => n_polytope(*d),
            Recipe::Table1(which, eps) => table1(*which, eps.clone()),
            Recipe::TruncateVertex(r, u) => truncate_vertex(&r.build()?, *u),
            Recipe::TruncateEdge(r, u, w) => truncate_edge(&r.build()?, *u, *w),
        }
    }
}

impl fmt::Display for Recipe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Recipe::Simplex(d) => write!(f, "simplex({d})"),
            Recipe::Prism(d) => write!(f, "prism({d})"),
            Recipe::PrismOver(r) => write!(f, "prism_over({r})"),
            Recipe::Pyramid(r, k) => write!(f, "pyramid({r},{k})"),
            Recipe::Delta(m, n) => write!(f, "delta({m},{n})"),
            Recipe::Triplex(k, r) => write!(f, "triplex({k},{r})"),
            Recipe::Pentasm(d) => write!(f, "pentasm({d})"),
            Recipe::A(d) => write!(f, "a({d})"),
            Recipe::B(d) => write!(f, "b({d})"),
            Recipe::C(d) => write!(f, "c({d})"),
            Recipe::Sigma(d) => write!(f, "sigma({d})"),
            Recipe::J(d) => write!(f, "j({d})"),
            Recipe::N(d) => write!(f, "n({d})"),
            Recipe::Table1(w, None) => write!(f, "table1({w})"),
            Recipe::Table1(w, Some(e)) => write!(f, "table1({w},{})", format_rational(e)),
            Recipe::TruncateVertex(r, u) => write!(f, "truncate_vertex({r},{u})"),
            Recipe::TruncateEdge(r, u, w) => write!(f, "truncate_edge({r},{u},{w})"),
        }
    }
}

impl FromStr for Recipe {
    type Err = Error;

    fn from_str(s: &str) -> Result<Recipe> {
        let mut p = RecipeParser {
            chars: s.chars().collect(),
            pos: 0,
        };
        let r = p.recipe()?;
        p.skip_ws();
        if p.pos != p.chars.len() {
            return Err(Error::Parse(format!(
                "trailing input at position {} in recipe {s:?}",
                p.pos
            )));
        }
        Ok(r)
    }
}

struct RecipeParser {
    chars: Vec<char>,
    pos: usize,
}

impl RecipeParser {
    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn expect(&mut self, ch: char) -> Result<()> {
        self.skip_ws();
        if self.chars.get(self.pos) == Some(&ch) {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::Parse(format!(
                "expected {ch:?} at position {}",
                self.pos
            )))
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn ident(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        while self
            .chars
            .get(self.pos)
            .is_some_and(|c| c.is_ascii_alphanumeric() || *c == '_')
        {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(Error::Parse(format!(
                "expected a name at position {start}"
            )));
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    fn number(&mut self) -> Result<Rational> {
        self.skip_ws();
        let start = self.pos;
        while self
            .chars
            .get(self.pos)
            .is_some_and(|c| c.is_ascii_digit() || *c == '-' || *c == '/')
        {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(Error::Parse(format!(
                "expected a number at position {start}"
            )));
        }
        parse_rational(&self.chars[start..self.pos].iter().collect::<String>())
    }

    fn usize_arg(&mut self) -> Result<usize> {
        let n = self.number()?;
        if !n.is_integer() || n < Rational::zero() {
            return Err(Error::Parse(format!(
                "expected a nonnegative integer, got {}",
                format_rational(&n)
            )));
        }
        n.numer()
            .try_into()
            .map_err(|_| Error::Parse("integer too large".into()))
    }

    fn recipe(&mut self) -> Result<Recipe> {
        let name = self.ident()?.to_ascii_lowercase();
        self.expect('(')?;
        let r = match name.as_str() {
            "simplex" => Recipe::Simplex(self.usize_arg()?),
            "prism" => Recipe::Prism(self.usize_arg()?),
            "prism_over" => Recipe::PrismOver(Box::new(self.recipe()?)),
            "pyramid" => {
                let base = self.recipe()?;
                self.expect(',')?;
                Recipe::Pyramid(Box::new(base), self.usize_arg()?)
            }
            "delta" => {
                let m = self.usize_arg()?;
                self.expect(',')?;
                Recipe::Delta(m, self.usize_arg()?)
            }
            "triplex" => {
                let k = self.usize_arg()?;
                self.expect(',')?;
                Recipe::Triplex(k, self.usize_arg()?)
            }
            "pentasm" => Recipe::Pentasm(self.usize_arg()?),
            "a" | "a_d" => Recipe::A(self.usize_arg()?),
            "b" | "b_d" => Recipe::B(self.usize_arg()?),
            "c" | "c_d" => Recipe::C(self.usize_arg()?),
            "sigma" => Recipe::Sigma(self.usize_arg()?),
            "j" | "j_d" => Recipe::J(self.usize_arg()?),
            "n" | "n_d" => Recipe::N(self.usize_arg()?),
            "table1" => {
                let which = self.usize_arg()? as u8;
                let eps = if self.peek() == Some(',') {
                    self.expect(',')?;
                    Some(self.number()?)
                } else {
                    None
                };
                Recipe::Table1(which, eps)
            }
            "truncate_vertex" => {
                let base = self.recipe()?;
                self.expect(',')?;
                Recipe::TruncateVertex(Box::new(base), self.usize_arg()?)
            }
            "truncate_edge" => {
                let base = self.recipe()?;
                self.expect(',')?;
                let u = self.usize_arg()?;
                self.expect(',')?;
                Recipe::TruncateEdge(Box::new(base), u, self.usize_arg()?)
            }
            other => {
                return Err(Error::Parse(format!("unknown construction {other:?}")));
            }
        };
        self.expect(')')?;
        Ok(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{census_counts, facet_census};

    #[test]
    fn triangular_prism_counts() {
        let p = prism(3).unwrap();
        assert_eq!(p.nverts(), 6);
        assert_eq!(p.nedges(), 9);
        assert_eq!(p.nfacets(), 5);
        assert!(p.is_simple());
    }

    #[test]
    fn prism_counts_follow_the_square_law() {
        for d in 2..=6 {
            let p = prism(d).unwrap();
            assert_eq!(p.nverts(), 2 * d, "prism({d}) vertices");
            assert_eq!(p.nedges(), d * d, "prism({d}) edges");
            assert_eq!(p.nfacets(), d + 2, "prism({d}) facets");
        }
    }

    #[test]
    fn quad_pyramid_and_m22() {
        let m21 = triplex(2, 1).unwrap();
        assert_eq!((m21.nverts(), m21.nedges()), (5, 8));
        let m22 = triplex(2, 2).unwrap();
        assert_eq!((m22.nverts(), m22.nedges()), (6, 13));
        assert_eq!(m22.excess(), 2 * 13 - 4 * 6);
    }

    #[test]
    fn pyramid_over_delta24_counts() {
        let p = pyramid(&delta(2, 4).unwrap(), 1).unwrap();
        assert_eq!(p.dim(), 7);
        assert_eq!(p.nverts(), 16);
        assert_eq!(p.nedges(), 60);
        assert_eq!(p.excess(), 8);
    }

    #[test]
    fn delta_family_counts() {
        let d22 = delta(2, 2).unwrap();
        assert_eq!((d22.nverts(), d22.nedges()), (9, 18));
        assert!(d22.is_simple());

        let d23 = delta(2, 3).unwrap();
        assert_eq!((d23.nverts(), d23.nedges()), (12, 30));
        assert_eq!(d23.excess(), 0);
        assert_eq!(d23.nfacets(), 7);

        let square = delta(1, 1).unwrap();
        assert_eq!((square.nverts(), square.nedges()), (4, 4));
    }

    #[test]
    fn truncated_simplex_is_a_prism() {
        let s = simplex(3).unwrap();
        let t = truncate_vertex(&s, 0).unwrap();
        assert_eq!((t.nverts(), t.nedges(), t.nfacets()), (6, 9, 5));
        let pr = prism(3).unwrap();
        assert!(isomorphic(t.comb(), pr.comb()).is_some());
    }

    #[test]
    fn truncating_m32_simple_vertex_gives_b5() {
        let m32 = triplex(3, 2).unwrap();
        let b5 = truncate_vertex(&m32, first_simple_vertex(&m32).unwrap()).unwrap();
        assert_eq!((b5.nverts(), b5.nedges()), (12, 32));
        assert_eq!(b5.excess(), 4);
        assert!(isomorphic(b5.comb(), b_polytope(5).unwrap().comb()).is_some());
    }

    #[test]
    fn truncating_m23_apex_gives_a5() {
        let m23 = triplex(2, 3).unwrap();
        let apex = first_nonsimple_vertex(&m23).unwrap();
        let a5 = truncate_vertex(&m23, apex).unwrap();
        assert_eq!((a5.nverts(), a5.nedges()), (12, 32));
        assert_eq!(a5.excess(), 4);
    }

    #[test]
    fn edge_truncation_of_cube() {
        let cube = a_polytope(3).unwrap();
        let (u, w) = first_simple_edge(&cube).unwrap();
        let t = truncate_edge(&cube, u, w).unwrap();
        assert_eq!(t.nverts(), 10);
        assert_eq!(t.excess(), 0);
        assert_eq!(t.nedges(), 15);
    }

    #[test]
    fn c4_and_c5_counts() {
        let c4 = c_polytope(4).unwrap();
        assert_eq!((c4.nverts(), c4.nedges(), c4.excess()), (10, 21, 2));
        let c5 = c_polytope(5).unwrap();
        assert_eq!((c5.nverts(), c5.excess()), (13, 3));
    }

    #[test]
    fn pentasm_counts() {
        let p5 = pentasm(5).unwrap();
        assert_eq!((p5.nverts(), p5.nedges(), p5.excess()), (11, 29, 3));
    }

    #[test]
    fn sigma_counts_and_excess_spread() {
        let s5 = sigma(5).unwrap();
        assert_eq!(s5.nverts(), 13);
        let nonsimple: Vec<usize> = (0..13)
            .filter(|&v| s5.graph().degree(v) > 5)
            .collect();
        assert_eq!(nonsimple.len(), 1);
        assert_eq!(s5.graph().degree(nonsimple[0]), 5 + 3);
    }

    #[test]
    fn a3_is_the_cube() {
        let a3 = a_polytope(3).unwrap();
        assert_eq!((a3.nverts(), a3.nedges(), a3.nfacets()), (8, 12, 6));
        assert!(a3.is_simple());
        let via_prism = a_polytope_via_prism(3).unwrap();
        assert!(isomorphic(a3.comb(), via_prism.comb()).is_some());
    }

    #[test]
    fn both_a_routes_agree() {
        for d in 4..=6 {
            let t = a_polytope(d).unwrap();
            let p = a_polytope_via_prism(d).unwrap();
            assert!(
                isomorphic(t.comb(), p.comb()).is_some(),
                "A({d}) realisations differ"
            );
        }
    }

    #[test]
    fn j6_census() {
        let j6 = j_polytope(6).unwrap();
        assert_eq!(j6.nverts(), 17);
        assert!(j6.is_simple());
        let census = census_counts(&facet_census(j6.comb()).unwrap());
        let mut expected = std::collections::BTreeMap::new();
        expected.insert(canonical_tag(FamilyTag::J(5)).unwrap().to_string(), 5);
        expected.insert(canonical_tag(FamilyTag::Prism(5)).unwrap().to_string(), 2);
        expected.insert(
            canonical_tag(FamilyTag::Simplex(5)).unwrap().to_string(),
            2,
        );
        assert_eq!(census, expected);
    }

    #[test]
    fn pentasm4_census() {
        let p = pentasm(4).unwrap();
        let census = census_counts(&facet_census(p.comb()).unwrap());
        let mut expected = std::collections::BTreeMap::new();
        expected.insert("pentasm(3)".to_string(), 2);
        expected.insert("prism(3)".to_string(), 2);
        expected.insert("simplex(3)".to_string(), 3);
        assert_eq!(census, expected);
    }

    #[test]
    fn table1_models() {
        let p1 = table1(1, None).unwrap();
        assert_eq!((p1.nverts(), p1.nedges(), p1.nfacets()), (8, 18, 7));
        let nonsimple1 = (0..8).filter(|&v| p1.graph().degree(v) > 4).count();
        assert_eq!(nonsimple1, 3);

        let p2 = table1(2, None).unwrap();
        assert_eq!((p2.nverts(), p2.nedges(), p2.nfacets()), (8, 18, 7));
        let nonsimple2 = (0..8).filter(|&v| p2.graph().degree(v) > 4).count();
        assert_eq!(nonsimple2, 4);

        let census2 = census_counts(&facet_census(p2.comb()).unwrap());
        let mut expected = std::collections::BTreeMap::new();
        expected.insert("prism(3)".to_string(), 2);
        expected.insert("triplex(2,1)".to_string(), 4);
        expected.insert("simplex(3)".to_string(), 1);
        assert_eq!(census2, expected);

        assert!(table1(1, Some(rat(2))).is_err());
        assert!(table1(3, None).is_err());
    }

    #[test]
    fn recipes_round_trip() {
        for s in [
            "simplex(4)",
            "prism(5)",
            "prism_over(triplex(2,1))",
            "pyramid(delta(2,4),1)",
            "a(6)",
            "table1(1,1/2)",
            "truncate_vertex(prism(3),0)",
            "truncate_edge(a(3),0,1)",
        ] {
            let r: Recipe = s.parse().unwrap();
            assert_eq!(r.to_string(), s);
        }
        assert!("frustum(3)".parse::<Recipe>().is_err());
        assert!("a(6) garbage".parse::<Recipe>().is_err());
    }

    #[test]
    fn recipe_build_matches_direct_construction() {
        let via_recipe = "b(4)".parse::<Recipe>().unwrap().build().unwrap();
        let direct = b_polytope(4).unwrap();
        assert_eq!(via_recipe.comb(), direct.comb());
    }

    #[test]
    fn b3_and_j3_coincide() {
        let b3 = b_polytope(3).unwrap();
        let j3 = j_polytope(3).unwrap();
        assert!(isomorphic(b3.comb(), j3.comb()).is_some());
        assert_eq!(canonical_tag(FamilyTag::J(3)).unwrap(), FamilyTag::B(3));
    }

    #[test]
    fn n_family_low_dimension_coincidences() {
        assert_eq!(
            canonical_tag(FamilyTag::N(3)).unwrap(),
            FamilyTag::Pentasm(3)
        );
        assert_eq!(canonical_tag(FamilyTag::N(4)).unwrap(), FamilyTag::B(4));
        // N(5) is its own type.
        assert_eq!(canonical_tag(FamilyTag::N(5)).unwrap(), FamilyTag::N(5));
    }
}
