//! The on-disk polytope format: one text document per polytope, fixed field
//! order, newline-terminated, diff-friendly. Rationals are spelled `p/q`
//! (just `p` for integers).
//!
//! ```text
//! combitope-polytope v1
//! dim 4
//! provenance a(4)
//! vertices 10
//! 0 0 0 0
//! ...
//! facets 7
//! 0 1 2 3 4 5
//! ...
//! ```
//!
//! The `provenance` line, the coordinate block and the `facets` block are
//! each optional; a file with a vertex count but no coordinate rows carries
//! incidence data only.

use crate::error::{Error, Result};
use crate::factory::Polytope;
use crate::hull::{facet_enumerate, PointSet};
use crate::lattice::{CombPolytope, VertexSet};
use crate::ratlin::{format_rational, parse_rational, RVector};

const MAGIC: &str = "combitope-polytope v1";

/// The parsed form of an interchange document.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolytopeFile {
    pub dim: usize,
    pub nverts: usize,
    pub vertices: Option<Vec<RVector>>,
    pub facets: Option<Vec<VertexSet>>,
    pub provenance: Option<String>,
}

impl PolytopeFile {
    pub fn from_polytope(p: &Polytope) -> Self {
        PolytopeFile {
            dim: p.dim(),
            nverts: p.nverts(),
            vertices: Some(p.points().points().to_vec()),
            facets: Some(p.comb().facets().to_vec()),
            provenance: Some(p.provenance().to_string()),
        }
    }

    /// Deterministic rendering; identical inputs give identical bytes.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(MAGIC);
        out.push('\n');
        out.push_str(&format!("dim {}\n", self.dim));
        if let Some(p) = &self.provenance {
            out.push_str(&format!("provenance {p}\n"));
        }
        out.push_str(&format!("vertices {}\n", self.nverts));
        if let Some(vs) = &self.vertices {
            for v in vs {
                let row: Vec<String> = v.coords().iter().map(format_rational).collect();
                out.push_str(&row.join(" "));
                out.push('\n');
            }
        }
        if let Some(fs) = &self.facets {
            out.push_str(&format!("facets {}\n", fs.len()));
            for f in fs {
                let row: Vec<String> = f.iter().map(|i| i.to_string()).collect();
                out.push_str(&row.join(" "));
                out.push('\n');
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let magic = lines.next().ok_or_else(|| Error::Parse("empty file".into()))?;
        if magic.trim_end() != MAGIC {
            return Err(Error::Parse(format!(
                "bad header {magic:?}, expected {MAGIC:?}"
            )));
        }
        let dim = parse_count_line(lines.next(), "dim")?;

        let mut rest = lines.peekable();
        let provenance = match rest.peek() {
            Some(l) if l.starts_with("provenance ") => {
                let p = rest.next().unwrap()["provenance ".len()..].to_string();
                Some(p)
            }
            _ => None,
        };

        let nverts = parse_count_line(rest.next(), "vertices")?;
        // Coordinate rows follow unless the next line opens the facet block
        // (or the file ends).
        let has_coords = matches!(rest.peek(), Some(l) if !l.starts_with("facets "));
        let vertices = if has_coords {
            let mut vs = Vec::with_capacity(nverts);
            for _ in 0..nverts {
                let line = rest
                    .next()
                    .ok_or_else(|| Error::Parse("missing coordinate row".into()))?;
                let coords: Result<Vec<_>> =
                    line.split_whitespace().map(parse_rational).collect();
                let v = RVector::new(coords?);
                if v.dim() != dim {
                    return Err(Error::Parse(format!(
                        "coordinate row {line:?} has {} entries, expected {dim}",
                        v.dim()
                    )));
                }
                vs.push(v);
            }
            Some(vs)
        } else {
            None
        };

        let facets = match rest.next() {
            None => None,
            Some(header) => {
                let nfacets = parse_count_line(Some(header), "facets")?;
                let mut fs = Vec::with_capacity(nfacets);
                for _ in 0..nfacets {
                    let line = rest
                        .next()
                        .ok_or_else(|| Error::Parse("missing facet row".into()))?;
                    let mut set = VertexSet::EMPTY;
                    for tok in line.split_whitespace() {
                        let idx: usize = tok
                            .parse()
                            .map_err(|_| Error::Parse(format!("bad vertex index {tok:?}")))?;
                        if idx >= nverts {
                            return Err(Error::Parse(format!(
                                "vertex index {idx} out of range 0..{nverts}"
                            )));
                        }
                        set.insert(idx);
                    }
                    fs.push(set);
                }
                Some(fs)
            }
        };
        if let Some(extra) = rest.next() {
            if !extra.trim().is_empty() {
                return Err(Error::Parse(format!("trailing content {extra:?}")));
            }
        }
        if let Some(vs) = &vertices {
            if vs.len() != nverts {
                return Err(Error::Parse("vertex count mismatch".into()));
            }
        }
        Ok(PolytopeFile {
            dim,
            nverts,
            vertices,
            facets,
            provenance,
        })
    }
}

fn parse_count_line(line: Option<&str>, key: &str) -> Result<usize> {
    let line = line.ok_or_else(|| Error::Parse(format!("missing {key} line")))?;
    let rest = line
        .strip_prefix(key)
        .ok_or_else(|| Error::Parse(format!("expected {key:?} line, got {line:?}")))?;
    rest.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad {key} count in {line:?}")))
}

/// What a file loads to: full geometry, or incidence data only.
pub enum Loaded {
    Geometric(Polytope),
    Combinatorial(CombPolytope),
}

impl Loaded {
    pub fn comb(&self) -> &CombPolytope {
        match self {
            Loaded::Geometric(p) => p.comb(),
            Loaded::Combinatorial(c) => c,
        }
    }

    pub fn points(&self) -> Option<&PointSet> {
        match self {
            Loaded::Geometric(p) => Some(p.points()),
            Loaded::Combinatorial(_) => None,
        }
    }
}

/// Validates and loads a parsed file. With coordinates, the hull is
/// recomputed and (when a facet block is present) must reproduce the stored
/// incidences exactly up to facet order.
pub fn load(pf: &PolytopeFile) -> Result<Loaded> {
    match (&pf.vertices, &pf.facets) {
        (Some(vs), stored_facets) => {
            let ps = PointSet::new(pf.dim, vs.clone())?;
            if let Some(stored) = stored_facets {
                let hr = facet_enumerate(&ps)?;
                let mut fresh = hr.incidence.clone();
                let mut given = stored.clone();
                fresh.sort();
                given.sort();
                if fresh != given {
                    return Err(Error::Parse(
                        "stored facets do not match a hull recomputation".into(),
                    ));
                }
            }
            let prov = pf.provenance.clone().unwrap_or_else(|| "file".into());
            Ok(Loaded::Geometric(Polytope::from_points(ps, prov)?))
        }
        (None, Some(fs)) => Ok(Loaded::Combinatorial(CombPolytope::new(
            pf.dim,
            pf.nverts,
            fs.clone(),
        )?)),
        (None, None) => Err(Error::Parse(
            "file has neither coordinates nor facets".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factory;

    #[test]
    fn round_trip_is_identity() {
        let p = factory::b_polytope(4).unwrap();
        let pf = PolytopeFile::from_polytope(&p);
        let text = pf.render();
        let reparsed = PolytopeFile::parse(&text).unwrap();
        assert_eq!(pf, reparsed);
        assert_eq!(reparsed.render(), text);
        assert!(text.ends_with('\n'));
    }

    #[test]
    fn loaded_comb_structure_matches() {
        let p = factory::delta(2, 2).unwrap();
        let pf = PolytopeFile::from_polytope(&p);
        match load(&pf).unwrap() {
            Loaded::Geometric(q) => assert_eq!(q.comb(), p.comb()),
            Loaded::Combinatorial(_) => panic!("expected geometry"),
        }
    }

    #[test]
    fn incidence_only_files_load_combinatorially() {
        let p = factory::simplex(3).unwrap();
        let pf = PolytopeFile {
            dim: 3,
            nverts: 4,
            vertices: None,
            facets: Some(p.comb().facets().to_vec()),
            provenance: None,
        };
        let text = pf.render();
        let loaded = load(&PolytopeFile::parse(&text).unwrap()).unwrap();
        assert_eq!(loaded.comb(), p.comb());
        assert!(loaded.points().is_none());
    }

    #[test]
    fn tampered_facets_are_rejected() {
        let p = factory::simplex(3).unwrap();
        let mut pf = PolytopeFile::from_polytope(&p);
        // Swap one facet for a non-face.
        pf.facets.as_mut().unwrap()[0] = VertexSet::from_indices([0, 1]);
        match load(&pf) {
            Err(Error::Parse(_)) | Err(Error::NotPolytopal(_)) => {}
            other => panic!("expected rejection, got {:?}", other.is_ok()),
        }
    }

    #[test]
    fn parse_errors_are_loud() {
        assert!(PolytopeFile::parse("").is_err());
        assert!(PolytopeFile::parse("wrong magic\ndim 3\nvertices 4\n").is_err());
        let bad_index = "combitope-polytope v1\ndim 3\nvertices 4\nfacets 1\n0 1 9\n";
        assert!(PolytopeFile::parse(bad_index).is_err());
    }
}
