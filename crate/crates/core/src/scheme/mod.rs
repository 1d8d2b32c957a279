//! From a caching line graph to a coded caching scheme.
//!
//! A (c, d)-caching line graph on K users gives subpacketization F = KD/c,
//! cache fraction M/N = 1 - c/K and rate R = c/d: every user-subfile pair that
//! is not cached is delivered by exactly one XOR transmission of d subfiles.

mod delivery;
mod document;

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::linegraph::{
    build_line_graph, build_universe, predicted_counts, verify_all, CachingLineGraph, ConstructionParams, Limits,
    ValidationReport, Vertex,
};

pub use delivery::{
    decode, encode, read_trace, simulate, write_trace, CacheView, CodedPacket, DeliveryOutcome, DemandSampler,
    FileStore, DEFAULT_SUBFILE_LEN,
};
pub use document::{deserialize, serialize, SchemeDocument, DOCUMENT_VERSION};

/// Exact parameters of the scheme.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemeParams {
    /// K
    pub users: BigUint,
    /// F
    pub subpacketization: BigUint,
    /// D, uncached subfiles per user
    pub uncached_per_user: BigUint,
    /// c, users missing each subfile
    pub subfile_clique: BigUint,
    /// d, users served per transmission
    pub clique_size: u64,
    /// M/N
    pub cache_fraction: BigRational,
    /// R
    pub rate: BigRational,
}

fn ratio(n: &BigUint, d: &BigUint) -> BigRational {
    BigRational::new(BigInt::from(n.clone()), BigInt::from(d.clone()))
}

/// Closed-form parameters for `(k, m, t, q)`.
pub fn params_from(cp: &ConstructionParams) -> Result<SchemeParams> {
    cp.validate()?;
    if cp.alpha() == 0 {
        return Err(Error::Degenerate(format!(
            "{cp}: m + t = k gives c = 0, every subfile is cached everywhere"
        )));
    }
    let pc = predicted_counts(cp);
    let d = cp.m as u64 + 2;
    let cache_fraction = BigRational::one() - ratio(&pc.subfile_clique, &pc.users);
    let rate = ratio(&pc.subfile_clique, &BigUint::from(d));
    let p = SchemeParams {
        users: pc.users,
        subpacketization: pc.subfiles,
        uncached_per_user: pc.user_clique,
        subfile_clique: pc.subfile_clique,
        clique_size: d,
        cache_fraction,
        rate,
    };
    debug_assert!(p.identities_hold());
    Ok(p)
}

impl SchemeParams {
    /// 1 - M/N
    pub fn uncached_fraction(&self) -> BigRational {
        BigRational::one() - &self.cache_fraction
    }

    /// Number of transmissions, R F = K D / d.
    pub fn transmissions(&self) -> BigUint {
        &self.users * &self.uncached_per_user / self.clique_size
    }

    /// Global caching gain K (1 - M/N) / R.
    pub fn gain(&self) -> BigRational {
        BigRational::from_integer(BigInt::from(self.users.clone())) * self.uncached_fraction() / &self.rate
    }

    /// F = KD/c, M/N = 1 - c/K = 1 - D/F, R = c/d, R d = K (1 - M/N).
    pub fn identities_hold(&self) -> bool {
        let k = BigRational::from_integer(BigInt::from(self.users.clone()));
        let d = BigRational::from_integer(BigInt::from(self.clique_size));
        &self.subpacketization * &self.subfile_clique == &self.users * &self.uncached_per_user
            && self.cache_fraction == BigRational::one() - ratio(&self.subfile_clique, &self.users)
            && self.cache_fraction == BigRational::one() - ratio(&self.uncached_per_user, &self.subpacketization)
            && self.rate == ratio(&self.subfile_clique, &BigUint::from(self.clique_size))
            && &self.rate * &d == k * self.uncached_fraction()
    }

    pub fn to_u64s(&self) -> Option<(u64, u64, u64, u64)> {
        Some((
            self.users.to_u64()?,
            self.subpacketization.to_u64()?,
            self.uncached_per_user.to_u64()?,
            self.subfile_clique.to_u64()?,
        ))
    }
}

impl fmt::Display for SchemeParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "K={} F={} D={} c={} d={} M/N={} R={} RF={}",
            self.users,
            self.subpacketization,
            self.uncached_per_user,
            self.subfile_clique,
            self.clique_size,
            self.cache_fraction,
            self.rate,
            self.transmissions()
        )
    }
}

/// K×F bit matrix; bit (k, f) set means user k does not cache subfile f.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlacementMap {
    users: usize,
    subfiles: usize,
    /// LSB-first packed rows, ceil(F/8) bytes each.
    rows: Vec<Vec<u8>>,
}

impl PlacementMap {
    pub fn empty(users: usize, subfiles: usize) -> Self {
        PlacementMap {
            users,
            subfiles,
            rows: vec![vec![0; subfiles.div_ceil(8)]; users],
        }
    }

    /// From packed rows; bits past `subfiles` must be clear.
    pub fn from_rows(users: usize, subfiles: usize, rows: Vec<Vec<u8>>) -> Result<Self> {
        let bytes = subfiles.div_ceil(8);
        if rows.len() != users {
            return Err(Error::Schema(format!("placement has {} rows, expected {users}", rows.len())));
        }
        for (k, r) in rows.iter().enumerate() {
            if r.len() != bytes {
                return Err(Error::Schema(format!("placement row {k} has {} bytes, expected {bytes}", r.len())));
            }
            if !subfiles.is_multiple_of(8) && r[bytes - 1] >> (subfiles % 8) != 0 {
                return Err(Error::Schema(format!("placement row {k} sets bits beyond F = {subfiles}")));
            }
        }
        Ok(PlacementMap { users, subfiles, rows })
    }

    pub fn from_graph(g: &CachingLineGraph) -> Self {
        let mut p = Self::empty(g.num_users(), g.num_subfiles());
        for v in g.vertices() {
            p.set(v.user as usize, v.subfile as usize, true);
        }
        p
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn subfiles(&self) -> usize {
        self.subfiles
    }

    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    /// True iff user `k` misses subfile `f`.
    #[inline]
    pub fn is_uncached(&self, k: usize, f: usize) -> bool {
        self.rows[k][f / 8] >> (f % 8) & 1 == 1
    }

    pub fn set(&mut self, k: usize, f: usize, uncached: bool) {
        let bit = 1u8 << (f % 8);
        if uncached {
            self.rows[k][f / 8] |= bit;
        } else {
            self.rows[k][f / 8] &= !bit;
        }
    }

    pub fn row_sums(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.iter().map(|b| b.count_ones() as usize).sum()).collect()
    }

    pub fn column_sums(&self) -> Vec<usize> {
        let mut out = vec![0; self.subfiles];
        for k in 0..self.users {
            for (f, o) in out.iter_mut().enumerate() {
                *o += self.is_uncached(k, f) as usize;
            }
        }
        out
    }

    pub fn ones(&self) -> usize {
        self.row_sums().iter().sum()
    }

    /// Subfiles missing at user `k`.
    pub fn uncached(&self, k: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.subfiles).filter(move |&f| self.is_uncached(k, f))
    }
}

/// Ordered transmission cliques, each an ordered list of (user, subfile).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeliveryPlan {
    users: usize,
    subfiles: usize,
    cliques: Vec<Vec<Vertex>>,
    /// For each user: (subfile, clique index), sorted by subfile.
    by_user: Vec<Vec<(u32, u32)>>,
}

impl DeliveryPlan {
    pub fn new(users: usize, subfiles: usize, cliques: Vec<Vec<Vertex>>) -> Result<Self> {
        let mut by_user = vec![Vec::new(); users];
        for (ci, clique) in cliques.iter().enumerate() {
            for v in clique {
                if v.user as usize >= users || v.subfile as usize >= subfiles {
                    return Err(Error::UnknownVertex {
                        user: v.user as usize,
                        subfile: v.subfile as usize,
                    });
                }
                by_user[v.user as usize].push((v.subfile, ci as u32));
            }
        }
        for (u, list) in by_user.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0].0 == w[1].0) {
                return Err(Error::Schema(format!(
                    "user {u}, subfile {} is delivered by more than one transmission",
                    w[0].0
                )));
            }
        }
        Ok(DeliveryPlan {
            users,
            subfiles,
            cliques,
            by_user,
        })
    }

    pub fn from_graph(g: &CachingLineGraph) -> Self {
        let cliques = g
            .transmission_cliques()
            .iter()
            .map(|c| c.iter().map(|&id| g.vertex(id)).collect())
            .collect();
        Self::new(g.num_users(), g.num_subfiles(), cliques).expect("line graph cliques are well formed")
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn subfiles(&self) -> usize {
        self.subfiles
    }

    pub fn cliques(&self) -> &[Vec<Vertex>] {
        &self.cliques
    }

    /// (subfile, clique index) pairs through which user `k` is served.
    pub fn served(&self, k: usize) -> &[(u32, u32)] {
        &self.by_user[k]
    }

    /// Every uncached pair appears in exactly one clique, and nothing else does.
    pub fn covers(&self, placement: &PlacementMap) -> bool {
        (0..self.users).all(|k| {
            let served: Vec<usize> = self.by_user[k].iter().map(|&(f, _)| f as usize).collect();
            served.iter().copied().eq(placement.uncached(k))
        })
    }
}

/// A constructed scheme: line graph, placement and delivery.
#[derive(Clone, Debug)]
pub struct SchemeInstance {
    graph: CachingLineGraph,
    params: SchemeParams,
    placement: PlacementMap,
    delivery: DeliveryPlan,
}

pub fn construct(cp: &ConstructionParams, limits: &Limits) -> Result<SchemeInstance> {
    let params = params_from(cp)?;
    let universe = build_universe(cp, limits)?;
    let graph = build_line_graph(universe, limits)?;
    Ok(SchemeInstance::from_graph(graph, params))
}

impl SchemeInstance {
    pub fn from_graph(graph: CachingLineGraph, params: SchemeParams) -> Self {
        let placement = PlacementMap::from_graph(&graph);
        let delivery = DeliveryPlan::from_graph(&graph);
        SchemeInstance {
            graph,
            params,
            placement,
            delivery,
        }
    }

    pub fn construction(&self) -> &ConstructionParams {
        self.graph.params()
    }

    pub fn graph(&self) -> &CachingLineGraph {
        &self.graph
    }

    pub fn params(&self) -> &SchemeParams {
        &self.params
    }

    pub fn placement(&self) -> &PlacementMap {
        &self.placement
    }

    pub fn delivery(&self) -> &DeliveryPlan {
        &self.delivery
    }

    pub fn num_users(&self) -> usize {
        self.placement.users
    }

    pub fn subpacketization(&self) -> usize {
        self.placement.subfiles
    }

    /// Structural checks on the graph, plus agreement of the explicit
    /// placement and delivery with the closed-form parameters.
    pub fn verify(&self) -> ValidationReport {
        let mut r = verify_all(&self.graph);
        let mismatch = |what: &str, got: usize, want: &BigUint| {
            (BigUint::from(got) != *want).then(|| format!("{what} = {got}, formula {want}"))
        };
        let p = &self.params;
        let checks = [
            mismatch("K", self.num_users(), &p.users),
            mismatch("F", self.subpacketization(), &p.subpacketization),
            mismatch("packets", self.delivery.cliques.len(), &p.transmissions()),
        ];
        for detail in checks.into_iter().flatten() {
            r.violations.push(crate::linegraph::Violation {
                condition: crate::linegraph::Condition::Regularity,
                detail,
            });
        }
        if !self.delivery.covers(&self.placement) {
            r.violations.push(crate::linegraph::Violation {
                condition: crate::linegraph::Condition::TransmissionPartition,
                detail: "delivery does not cover the uncached pairs exactly once".into(),
            });
        }
        r
    }
}
