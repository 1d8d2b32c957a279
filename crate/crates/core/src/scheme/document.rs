//! JSON scheme documents, version "pgcache/1".

use base64::engine::general_purpose::STANDARD as B64;
use base64::Engine;
use serde::{Deserialize, Serialize};

use super::{params_from, PlacementMap, SchemeInstance};
use crate::error::{Error, Result};
use crate::gf::FieldElement;
use crate::linegraph::{CachingLineGraph, ConstructionParams, Universe, Vertex};
use crate::projgeom::SubspaceBasis;

pub const DOCUMENT_VERSION: &str = "pgcache/1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldDoc {
    pub p: u32,
    pub n: u32,
    /// Modulus coefficients, constant term first.
    pub modulus: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsDoc {
    #[serde(rename = "K")]
    pub users: u64,
    #[serde(rename = "F")]
    pub subpacketization: u64,
    #[serde(rename = "D")]
    pub uncached_per_user: u64,
    pub c: u64,
    pub d: u64,
    /// M/N as "p/q"
    pub mn: String,
    /// R as "p/q"
    pub rate: String,
}

/// On-disk form of a [`SchemeInstance`]. Matrices are lists of rows of field
/// element values in reduced row echelon form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeDocument {
    pub version: String,
    pub params: ConstructionParams,
    pub field: FieldDoc,
    pub scheme: ParamsDoc,
    pub w: Vec<Vec<u32>>,
    pub users: Vec<Vec<Vec<u32>>>,
    pub subfiles: Vec<Vec<u32>>,
    /// One base64 string per user: the packed uncached-bit row.
    pub placement: Vec<String>,
    /// One array per transmission of [user, subfile] pairs.
    pub delivery: Vec<Vec<[u32; 2]>>,
}

fn ratio_str(r: &num_rational::BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn matrix(b: &SubspaceBasis) -> Vec<Vec<u32>> {
    b.rows().map(|r| r.iter().map(|e| e.value() as u32).collect()).collect()
}

fn parse_u64(x: &num_bigint::BigUint, what: &str) -> Result<u64> {
    num_traits::ToPrimitive::to_u64(x).ok_or_else(|| Error::Schema(format!("{what} does not fit in 64 bits")))
}

impl SchemeDocument {
    pub fn from_instance(s: &SchemeInstance) -> Result<Self> {
        let u = s.graph().universe();
        let f = u.field();
        let p = s.params();
        Ok(SchemeDocument {
            version: DOCUMENT_VERSION.into(),
            params: *s.construction(),
            field: FieldDoc {
                p: f.characteristic(),
                n: f.degree(),
                modulus: f.modulus().to_vec(),
            },
            scheme: ParamsDoc {
                users: parse_u64(&p.users, "K")?,
                subpacketization: parse_u64(&p.subpacketization, "F")?,
                uncached_per_user: parse_u64(&p.uncached_per_user, "D")?,
                c: parse_u64(&p.subfile_clique, "c")?,
                d: p.clique_size,
                mn: ratio_str(&p.cache_fraction),
                rate: ratio_str(&p.rate),
            },
            w: matrix(u.w()),
            users: u.users().iter().map(matrix).collect(),
            subfiles: u.subfiles().to_vec(),
            placement: s.placement().rows().iter().map(|r| B64.encode(r)).collect(),
            delivery: s
                .delivery()
                .cliques()
                .iter()
                .map(|c| c.iter().map(|v| [v.user, v.subfile]).collect())
                .collect(),
        })
    }

    /// Rebuilds and checks the instance: canonical matrices, subfile sums,
    /// placement against containment, delivery cliques, and stored parameters.
    pub fn into_instance(self) -> Result<SchemeInstance> {
        if self.version != DOCUMENT_VERSION {
            return Err(Error::Schema(format!(
                "document version {:?}, expected {DOCUMENT_VERSION:?}",
                self.version
            )));
        }
        let cp = self.params;
        cp.validate()?;
        let field = cp.field()?;
        if field.characteristic() != self.field.p || field.degree() != self.field.n || field.modulus() != self.field.modulus {
            return Err(Error::Schema("field spec does not match q".into()));
        }
        let params = params_from(&cp)?;
        let stored = ParamsDoc {
            users: parse_u64(&params.users, "K")?,
            subpacketization: parse_u64(&params.subpacketization, "F")?,
            uncached_per_user: parse_u64(&params.uncached_per_user, "D")?,
            c: parse_u64(&params.subfile_clique, "c")?,
            d: params.clique_size,
            mn: ratio_str(&params.cache_fraction),
            rate: ratio_str(&params.rate),
        };
        if self.scheme != stored {
            return Err(Error::Schema("stored scheme parameters disagree with (k, m, t, q)".into()));
        }

        let k = cp.k;
        let to_basis = |rows: &[Vec<u32>], what: &str| -> Result<SubspaceBasis> {
            let vecs = rows
                .iter()
                .map(|r| {
                    if r.len() != k {
                        return Err(Error::Schema(format!("{what}: row of length {}, expected {k}", r.len())));
                    }
                    r.iter()
                        .map(|&x| field.element(x).ok_or_else(|| Error::Schema(format!("{what}: {x} is not in GF({})", cp.q))))
                        .collect::<Result<Vec<FieldElement>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            let b = SubspaceBasis::span(&field, k, &vecs)?;
            if b.dim() != rows.len() || matrix(&b) != rows {
                return Err(Error::Schema(format!("{what}: matrix is not in reduced row echelon form")));
            }
            Ok(b)
        };
        let w = to_basis(&self.w, "W")?;
        if w != SubspaceBasis::standard(&field, k, &(0..cp.t - 1).collect::<Vec<_>>())? {
            return Err(Error::Schema("W is not the span of the first t-1 unit vectors".into()));
        }
        let users = self
            .users
            .iter()
            .enumerate()
            .map(|(i, m)| to_basis(m, &format!("user {i}")))
            .collect::<Result<Vec<_>>>()?;
        let universe = Universe::from_parts(cp, field.clone(), w, users, self.subfiles)?;
        if universe.users().len() as u64 != stored.users || universe.subfiles().len() as u64 != stored.subpacketization {
            return Err(Error::Schema("user or subfile count disagrees with the parameters".into()));
        }

        let (n_users, n_sub) = (universe.users().len(), universe.subfiles().len());
        let rows = self
            .placement
            .iter()
            .map(|s| B64.decode(s).map_err(|e| Error::Schema(format!("placement: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        let placement = PlacementMap::from_rows(n_users, n_sub, rows)?;
        let mut vertices = Vec::new();
        for f in 0..n_sub {
            let span = universe.span_of(&universe.subfiles()[f])?;
            for (kk, v) in universe.users().iter().enumerate() {
                if placement.is_uncached(kk, f) == span.contains(v)? {
                    return Err(Error::Schema(format!("placement bit ({kk}, {f}) contradicts the geometry")));
                }
            }
        }
        for kk in 0..n_users {
            vertices.extend(placement.uncached(kk).map(|f| Vertex::new(kk, f)));
        }
        let graph = CachingLineGraph::from_vertices(universe, vertices)?;

        let mut sets = Vec::with_capacity(self.delivery.len());
        let mut cliques = Vec::with_capacity(self.delivery.len());
        for (i, c) in self.delivery.iter().enumerate() {
            let ids = c
                .iter()
                .map(|&[u, f]| {
                    graph
                        .vertex_id(u as usize, f as usize)
                        .ok_or_else(|| Error::Schema(format!("transmission {i} names cached pair ({u}, {f})")))
                })
                .collect::<Result<Vec<u32>>>()?;
            let mut set: Vec<u32> = c.iter().map(|p| p[0]).collect();
            set.sort_unstable();
            sets.push(set);
            cliques.push(ids);
        }
        let graph = graph.with_transmission_cliques(sets, cliques);
        let instance = SchemeInstance::from_graph(graph, params);
        let report = instance.verify();
        if !report.is_ok() {
            return Err(Error::Schema(format!("loaded scheme fails verification: {}", report.violations[0])));
        }
        Ok(instance)
    }
}

pub fn serialize(s: &SchemeInstance) -> Result<String> {
    Ok(serde_json::to_string(&SchemeDocument::from_instance(s)?)?)
}

pub fn deserialize(text: &str) -> Result<SchemeInstance> {
    serde_json::from_str::<SchemeDocument>(text)?.into_instance()
}
