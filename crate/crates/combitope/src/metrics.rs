//! Scalar invariants and bound formulas: excess degrees, the quadratic
//! lower-bound polynomial phi, the simplicial lower bound, minimum-edge
//! values, missing edges, and the structural checks that hold for every
//! polytope and get asserted across the whole constructed corpus.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::factory::Polytope;
use crate::lattice::{CombPolytope, FamilyTag, Graph, VertexSet};

/// Per-vertex excess degrees (`deg u - d`) with the total and the list of
/// nonsimple vertices. The total is cross-checked against `2e - dv`.
#[derive(Clone, Debug)]
pub struct ExcessProfile {
    pub per_vertex: Vec<usize>,
    pub total: usize,
    pub nonsimple: Vec<usize>,
}

pub fn excess_profile(dim: usize, g: &Graph) -> Result<ExcessProfile> {
    let mut per_vertex = Vec::with_capacity(g.nverts());
    for v in 0..g.nverts() {
        let deg = g.degree(v);
        if deg < dim {
            return Err(Error::Internal(format!(
                "vertex {v} has degree {deg} < {dim}"
            )));
        }
        per_vertex.push(deg - dim);
    }
    let total: usize = per_vertex.iter().sum();
    let identity = 2 * g.edge_count() - dim * g.nverts();
    if total != identity {
        return Err(Error::Internal(format!(
            "excess sum {total} disagrees with 2e - dv = {identity}"
        )));
    }
    let nonsimple = per_vertex
        .iter()
        .enumerate()
        .filter(|(_, &x)| x > 0)
        .map(|(v, _)| v)
        .collect();
    Ok(ExcessProfile {
        per_vertex,
        total,
        nonsimple,
    })
}

fn binom2(n: i64) -> i64 {
    n * (n - 1) / 2
}

/// The quadratic lower-bound polynomial for edge counts of `d`-polytopes
/// with `v` vertices, on its domain `d + 1 <= v <= 2d + 1`:
/// `C(d+1,2) + C(d,2) - C(2d+1-v,2)`.
pub fn phi(v: usize, d: usize) -> Result<u64> {
    if v < d + 1 || v > 2 * d + 1 {
        return Err(Error::OutOfDomain(format!(
            "phi({v},{d}) needs {} <= v <= {}",
            d + 1,
            2 * d + 1
        )));
    }
    let (vi, di) = (v as i64, d as i64);
    let binomial_form = binom2(di + 1) + binom2(di) - binom2(2 * di + 1 - vi);
    // Equivalent closed form in k = v - d; the two must agree exactly, and
    // the halves must be integral.
    let k = vi - di;
    let twice = di * (di + k) + (k - 1) * (di - k);
    if twice % 2 != 0 || twice / 2 != binomial_form {
        return Err(Error::Internal(format!(
            "phi({v},{d}): the two closed forms disagree"
        )));
    }
    Ok(binomial_form as u64)
}

/// Edge lower bound for simplicial `d`-polytopes with `v` vertices:
/// `dv - C(d+1,2)`.
pub fn lbt_bound(v: usize, d: usize) -> i64 {
    d as i64 * v as i64 - binom2(d as i64 + 1)
}

/// Every facet has exactly `d` vertices.
pub fn is_simplicial(cp: &CombPolytope) -> bool {
    cp.facets().iter().all(|f| f.len() == cp.dim())
}

/// Minimum edge count over `d`-polytopes with `2d + 2` vertices. The value
/// is `d^2 + 2d - 3` except in dimension 5, where a single polytope dips
/// below it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinEdges {
    pub value: u64,
    pub special: Option<FamilyTag>,
}

pub fn min_edges_2dplus2(d: usize) -> Result<MinEdges> {
    if d < 3 {
        return Err(Error::OutOfDomain(format!(
            "min_edges_2dplus2({d}) needs d >= 3"
        )));
    }
    if d == 5 {
        return Ok(MinEdges {
            value: 30,
            special: Some(FamilyTag::Delta(2, 3)),
        });
    }
    Ok(MinEdges {
        value: (d * d + 2 * d - 3) as u64,
        special: None,
    })
}

/// Upper bound for the minimum excess of `d`-polytopes with `v` vertices,
/// witnessed by repeated vertex truncation: `(v-2d)(3d-1-v)` on
/// `2d <= v <= 3d-1` and `(v-3d+1)(4d-2-v)` on `3d-1 <= v <= 4d-2`.
/// The two pieces agree (both zero) at `v = 3d - 1`.
pub fn f_upper(v: usize, d: usize) -> Result<u64> {
    let (vi, di) = (v as i64, d as i64);
    if vi >= 2 * di && vi <= 3 * di - 1 {
        Ok(((vi - 2 * di) * (3 * di - 1 - vi)) as u64)
    } else if vi >= 3 * di - 1 && vi <= 4 * di - 2 {
        Ok(((vi - 3 * di + 1) * (4 * di - 2 - vi)) as u64)
    } else {
        Err(Error::OutOfDomain(format!(
            "f_upper({v},{d}) needs {} <= v <= {}",
            2 * d,
            4 * d - 2
        )))
    }
}

/// Number of vertex pairs with no edge: `C(v,2) - e`.
pub fn missing_edges(g: &Graph) -> usize {
    g.nverts() * (g.nverts() - 1) / 2 - g.edge_count()
}

/// All the applicable bound values for a `(v, d)` pair in one struct.
#[derive(Clone, Debug)]
pub struct BoundReport {
    pub v: usize,
    pub d: usize,
    pub phi: Option<u64>,
    pub lbt: i64,
    pub min_edges_2dplus2: Option<MinEdges>,
    pub f_upper: Option<u64>,
}

pub fn bound_report(v: usize, d: usize) -> BoundReport {
    BoundReport {
        v,
        d,
        phi: phi(v, d).ok(),
        lbt: lbt_bound(v, d),
        min_edges_2dplus2: if v == 2 * d + 2 {
            min_edges_2dplus2(d).ok()
        } else {
            None
        },
        f_upper: f_upper(v, d).ok(),
    }
}

/// One structural check instance: which property, on what context, and
/// whether it held. Failures accumulate instead of aborting; on genuine
/// polytope data they all hold, so a failure is a diagnostic, not control
/// flow.
#[derive(Clone, Debug)]
pub struct CheckEntry {
    pub property: &'static str,
    pub context: String,
    pub pass: bool,
}

#[derive(Clone, Debug, Default)]
pub struct StructuralReport {
    pub entries: Vec<CheckEntry>,
}

impl StructuralReport {
    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn failures(&self) -> Vec<&CheckEntry> {
        self.entries.iter().filter(|e| !e.pass).collect()
    }

    fn push(&mut self, property: &'static str, context: String, pass: bool) {
        self.entries.push(CheckEntry {
            property,
            context,
            pass,
        });
    }
}

const SUBSET_SAMPLE_SEED: u64 = 0x706f6c79;
const SUBSET_SAMPLES: usize = 200;
const EXHAUSTIVE_SUBSET_LIMIT: usize = 14;

/// Runs every applicable structural property on one polytope:
///
/// - outside-subgraph connectivity: for every facet, the subgraph induced
///   on the vertices outside it is connected;
/// - subset edge bound: any `n <= d` vertices meet at least
///   `nd - C(n,2)` edges (exhaustive for small vertex counts, sampled
///   deterministically above that);
/// - nonsimple neighbor condition: a nonsimple vertex of a facet that is
///   adjacent to a simple vertex outside the facet has a second neighbor
///   outside;
/// - three-outside ridge property: when exactly three vertices lie outside
///   a facet and all are simple, at least `d - 4` of its ridges have their
///   other facet containing all three;
/// - excess identity and the excess threshold for nonsimple polytopes;
/// - the simplicial edge lower bound, when every facet is a simplex.
pub fn structural_checks(cp: &CombPolytope, g: &Graph) -> Result<StructuralReport> {
    let d = cp.dim();
    let n = cp.nverts();
    let mut report = StructuralReport::default();

    let profile = excess_profile(d, g)?;
    report.push(
        "excess-identity",
        format!("total={}", profile.total),
        2 * g.edge_count() == d * n + profile.total,
    );
    if !profile.nonsimple.is_empty() {
        report.push(
            "nonsimple-excess-threshold",
            format!("excess={} d={d}", profile.total),
            profile.total >= d - 2,
        );
    }

    for (fi, f) in cp.facets().iter().enumerate() {
        let outside = VertexSet::full(n).minus(*f);
        report.push(
            "outside-subgraph-connected",
            format!("facet={fi}"),
            g.is_connected_on(outside),
        );
    }

    subset_edge_bound_checks(cp, g, &mut report);
    nonsimple_neighbor_checks(cp, g, &profile, &mut report);
    three_outside_ridge_checks(cp, &profile, &mut report)?;

    if is_simplicial(cp) {
        report.push(
            "simplicial-edge-lower-bound",
            format!("e={} bound={}", g.edge_count(), lbt_bound(n, d)),
            g.edge_count() as i64 >= lbt_bound(n, d),
        );
    }

    Ok(report)
}

/// Edges meeting at least one vertex of `s`.
fn edges_meeting(g: &Graph, s: VertexSet) -> usize {
    let mut count = 0;
    for (u, w) in g.edges() {
        if s.contains(u) || s.contains(w) {
            count += 1;
        }
    }
    count
}

/// The subset bound produces thousands of instances per polytope, so it is
/// summarised into a single report entry; the first violator, if any, is
/// named in the context.
fn subset_edge_bound_checks(cp: &CombPolytope, g: &Graph, report: &mut StructuralReport) {
    let d = cp.dim();
    let n = cp.nverts();
    let bound = |k: usize| (k * d) as i64 - binom2(k as i64);
    let mut checked = 0usize;
    let mut first_failure: Option<VertexSet> = None;
    let mut check = |s: VertexSet| {
        checked += 1;
        if first_failure.is_none() && (edges_meeting(g, s) as i64) < bound(s.len()) {
            first_failure = Some(s);
        }
    };

    if n <= EXHAUSTIVE_SUBSET_LIMIT {
        for mask in 1u64..(1u64 << n) {
            let s = VertexSet::from_indices((0..n).filter(|&v| mask >> v & 1 == 1));
            if s.len() <= d {
                check(s);
            }
        }
    } else {
        // All subsets of size up to 3, then a deterministic sample of
        // larger ones.
        for a in 0..n {
            check(VertexSet::single(a));
            for b in a + 1..n {
                check(VertexSet::from_indices([a, b]));
                for c in b + 1..n {
                    check(VertexSet::from_indices([a, b, c]));
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(SUBSET_SAMPLE_SEED);
        for i in 0..SUBSET_SAMPLES {
            let k = 4 + i % (d.saturating_sub(3).max(1));
            if k > d || k > n {
                continue;
            }
            let s = VertexSet::from_indices(sample(&mut rng, n, k).into_iter());
            check(s);
        }
    }

    let context = match first_failure {
        Some(s) => format!("violated by S={s}"),
        None => format!("checked {checked} subsets"),
    };
    report.push("subset-edge-bound", context, first_failure.is_none());
}

fn nonsimple_neighbor_checks(
    cp: &CombPolytope,
    g: &Graph,
    profile: &ExcessProfile,
    report: &mut StructuralReport,
) {
    for &u in &profile.nonsimple {
        for (fi, f) in cp.facets().iter().enumerate() {
            if !f.contains(u) {
                continue;
            }
            let outside_neighbors = g.neighbors(u).minus(*f);
            let has_simple_outside = outside_neighbors
                .iter()
                .any(|x| profile.per_vertex[x] == 0);
            if has_simple_outside {
                report.push(
                    "nonsimple-neighbor-condition",
                    format!("vertex={u} facet={fi}"),
                    outside_neighbors.len() >= 2,
                );
            }
        }
    }
}

fn three_outside_ridge_checks(
    cp: &CombPolytope,
    profile: &ExcessProfile,
    report: &mut StructuralReport,
) -> Result<()> {
    let d = cp.dim();
    let n = cp.nverts();
    let mut ridges: Option<Vec<(VertexSet, usize, usize)>> = None;
    for (fi, f) in cp.facets().iter().enumerate() {
        let outside = VertexSet::full(n).minus(*f);
        if outside.len() != 3 || outside.iter().any(|v| profile.per_vertex[v] > 0) {
            continue;
        }
        if ridges.is_none() {
            ridges = Some(crate::lattice::ridges_and_other_facet(cp)?);
        }
        let ridges = ridges.as_ref().unwrap();
        let mut good = 0usize;
        for (r, a, b) in ridges.iter() {
            if !r.is_subset_of(*f) {
                continue;
            }
            let other = if *a == fi { *b } else if *b == fi { *a } else { continue };
            if outside.is_subset_of(cp.facets()[other]) {
                good += 1;
            }
        }
        report.push(
            "three-outside-ridge-property",
            format!("facet={fi} good-ridges={good}"),
            good as i64 >= d as i64 - 4,
        );
    }
    Ok(())
}

/// Convenience wrapper running [`structural_checks`] on a built polytope.
pub fn check_polytope(p: &Polytope) -> Result<StructuralReport> {
    structural_checks(p.comb(), p.graph())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factory;
    use crate::hull::{facet_enumerate, PointSet};
    use crate::lattice::build_lattice;
    use crate::ratlin::RVector;

    #[test]
    fn phi_closed_forms_agree_everywhere() {
        for d in 1..=12usize {
            for k in 1..=d {
                phi(d + k, d).unwrap();
            }
        }
    }

    #[test]
    fn phi_prism_and_simplex_values() {
        for d in 2..=9 {
            assert_eq!(phi(2 * d, d).unwrap(), (d * d) as u64);
            assert_eq!(phi(d + 1, d).unwrap(), (d * (d + 1) / 2) as u64);
        }
        assert_eq!(phi(9, 5).unwrap(), 24);
        assert!(phi(3, 5).is_err());
        assert!(phi(12, 5).is_err());
    }

    #[test]
    fn lbt_on_the_octahedron() {
        let pts = vec![
            RVector::from_ints(&[1, 0, 0]),
            RVector::from_ints(&[-1, 0, 0]),
            RVector::from_ints(&[0, 1, 0]),
            RVector::from_ints(&[0, -1, 0]),
            RVector::from_ints(&[0, 0, 1]),
            RVector::from_ints(&[0, 0, -1]),
        ];
        let ps = PointSet::new(3, pts).unwrap();
        let hr = facet_enumerate(&ps).unwrap();
        let cp = hr.to_comb(3).unwrap();
        assert!(is_simplicial(&cp));
        let g = crate::lattice::graph_from_lattice(&build_lattice(&cp).unwrap()).unwrap();
        assert_eq!(lbt_bound(6, 3), 12);
        assert_eq!(g.edge_count(), 12);
    }

    #[test]
    fn min_edges_values() {
        assert_eq!(
            min_edges_2dplus2(6).unwrap(),
            MinEdges {
                value: 45,
                special: None
            }
        );
        let special = min_edges_2dplus2(5).unwrap();
        assert_eq!(special.value, 30);
        assert_eq!(special.special, Some(FamilyTag::Delta(2, 3)));
        assert!(min_edges_2dplus2(2).is_err());
    }

    #[test]
    fn f_upper_piecewise() {
        for d in 4..=9 {
            assert_eq!(f_upper(3 * d - 1, d).unwrap(), 0);
            assert_eq!(f_upper(2 * d, d).unwrap(), 0);
            assert_eq!(f_upper(2 * d + 2, d).unwrap(), (2 * (d - 3)) as u64);
        }
        assert!(f_upper(1, 4).is_err());
        assert!(f_upper(4 * 4 - 1, 4).is_err());
    }

    #[test]
    fn missing_edges_examples() {
        let simplex = factory::simplex(4).unwrap();
        assert_eq!(missing_edges(simplex.graph()), 0);
        let m22 = factory::triplex(2, 2).unwrap();
        assert_eq!(missing_edges(m22.graph()), 2);
        let cube = factory::a_polytope(3).unwrap();
        assert_eq!(missing_edges(cube.graph()), 16);
    }

    #[test]
    fn excess_profiles() {
        let d23 = factory::delta(2, 3).unwrap();
        let p = excess_profile(5, d23.graph()).unwrap();
        assert_eq!(p.total, 0);
        assert!(p.nonsimple.is_empty());

        let a6 = factory::a_polytope(6).unwrap();
        let p = excess_profile(6, a6.graph()).unwrap();
        assert_eq!(p.total, 6);

        let pyr = factory::triplex(2, 1).unwrap();
        let p = excess_profile(3, pyr.graph()).unwrap();
        assert_eq!(p.total, 1);
        assert_eq!(p.nonsimple, vec![4]);
        assert_eq!(p.per_vertex[4], 1);
    }

    #[test]
    fn triplex_edge_counts_match_phi() {
        for d in 2..=7usize {
            for k in 1..=d {
                let m = factory::triplex(k, d - k).unwrap();
                assert_eq!(
                    m.nedges() as u64,
                    phi(d + k, d).unwrap(),
                    "triplex({k},{}) edges",
                    d - k
                );
                assert_eq!(m.excess(), (k - 1) * (d - k));
            }
        }
    }

    #[test]
    fn structural_checks_pass_on_families() {
        for p in [
            factory::a_polytope(5).unwrap(),
            factory::b_polytope(5).unwrap(),
            factory::delta(2, 3).unwrap(),
            factory::c_polytope(4).unwrap(),
            factory::sigma(4).unwrap(),
            factory::pentasm(5).unwrap(),
        ] {
            let report = check_polytope(&p).unwrap();
            assert!(
                report.all_pass(),
                "{} failed: {:?}",
                p.provenance(),
                report.failures()
            );
        }
    }

    #[test]
    fn cube_outside_subgraph_connected() {
        let cube = factory::a_polytope(3).unwrap();
        for f in cube.comb().facets() {
            let outside = VertexSet::full(8).minus(*f);
            assert!(cube.graph().is_connected_on(outside));
        }
    }

    #[test]
    fn bound_report_fields() {
        let r = bound_report(12, 5);
        assert_eq!(r.phi, None);
        assert_eq!(r.min_edges_2dplus2.unwrap().value, 30);
        assert_eq!(r.f_upper.unwrap(), 4);
        assert_eq!(r.lbt, 45);
    }
}
