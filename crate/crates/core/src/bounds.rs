//! Lower bounds on R*F for a placement described by (K, F, D).
//!
//! Three closed forms are provided: the nested-ceiling bound for bi-regular
//! placements, the PDA bound with D nested terms, and the cut-set value
//! F K (1 - M/N) / (1 + K M/N). The ordering bound is evaluated directly on a
//! placement, for one ordering or maximised over orderings.

use std::fmt;

use itertools::Itertools;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scheme::{PlacementMap, SchemeParams};

/// Orderings are searched exhaustively up to this many candidate users.
pub const EXHAUSTIVE_USERS: usize = 8;

/// K users, F subfiles per file, D uncached subfiles per user.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SystemTriple {
    #[serde(rename = "K")]
    pub k: u64,
    #[serde(rename = "F")]
    pub f: u64,
    #[serde(rename = "D")]
    pub d: u64,
}

impl SystemTriple {
    pub fn new(k: u64, f: u64, d: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidTriple("K must be positive".into()));
        }
        if d == 0 || d > f {
            return Err(Error::InvalidTriple(format!("need 0 < D <= F, got D = {d}, F = {f}")));
        }
        Ok(SystemTriple { k, f, d })
    }

    pub fn from_params(p: &SchemeParams) -> Result<Self> {
        let (k, f, d, _) = p
            .to_u64s()
            .ok_or_else(|| Error::InvalidTriple("parameters exceed 64 bits".into()))?;
        Self::new(k, f, d)
    }

    /// M/N = 1 - D/F
    pub fn cache_fraction(&self) -> BigRational {
        BigRational::one() - BigRational::new(BigInt::from(self.d), BigInt::from(self.f))
    }

    /// K (1 - M/N) = K D / F when it is an integer.
    pub fn ku(&self) -> Option<u64> {
        let num = self.k as u128 * self.d as u128;
        num.is_multiple_of(self.f as u128).then(|| (num / self.f as u128) as u64)
    }
}

impl fmt::Display for SystemTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(K={}, F={}, D={})", self.k, self.f, self.d)
    }
}

fn ceil_ratio(num: BigUint, den: u64) -> BigUint {
    Integer::div_ceil(&num, &BigUint::from(den))
}

/// Nested-ceiling bound for bi-regular placements:
/// T_1 = D, T_{j+1} = ceil(T_j (KU - j) / (K - j)), summed over j = 1..KU.
pub fn bound_theorem2(st: &SystemTriple) -> Result<BigUint> {
    let ku = st.ku().ok_or_else(|| {
        Error::NotApplicable(format!("{st}: K D / F is not an integer, the placement cannot be bi-regular"))
    })?;
    let mut t = BigUint::from(st.d);
    let mut sum = BigUint::zero();
    for j in 1..=ku {
        sum += &t;
        if j < ku {
            t = ceil_ratio(t * (ku - j), st.k - j);
        }
    }
    Ok(sum)
}

/// The same recursion with every ceiling removed.
pub fn theorem2_unceiled(st: &SystemTriple) -> Result<BigRational> {
    let ku = st
        .ku()
        .ok_or_else(|| Error::NotApplicable(format!("{st}: K D / F is not an integer")))?;
    let mut t = BigRational::from_integer(BigInt::from(st.d));
    let mut sum = BigRational::zero();
    for j in 1..=ku {
        sum += &t;
        t = t * BigInt::from(ku - j) / BigInt::from((st.k - j).max(1));
    }
    Ok(sum)
}

/// PDA bound: T_1 = ceil(DK/F), T_{j+1} = ceil(T_j (D - j) / (F - j)), D terms.
pub fn bound_cited_pda(st: &SystemTriple) -> BigUint {
    let mut t = ceil_ratio(BigUint::from(st.d) * st.k, st.f);
    let mut sum = BigUint::zero();
    for j in 1..=st.d {
        sum += &t;
        if j < st.d {
            t = ceil_ratio(t * (st.d - j), st.f - j);
        }
    }
    sum
}

/// Cut-set value under uncoded placement, exact and rounded up.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutSet {
    pub exact: BigRational,
    pub ceil: BigUint,
}

/// F K (1 - M/N) / (1 + K M/N) = K D F / (F + K (F - D)).
pub fn bound_cutset_an(st: &SystemTriple) -> CutSet {
    let num = BigInt::from(st.k) * st.d * st.f;
    let den = BigInt::from(st.f) + BigInt::from(st.k) * (st.f - st.d);
    let exact = BigRational::new(num, den);
    let ceil = exact.ceil().to_integer().to_biguint().expect("non-negative");
    CutSet { exact, ceil }
}

/// How ρ_j is counted along an ordering k_1, ..., k_{N'}.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NeighborhoodReading {
    /// Subfiles missing at every one of k_1..k_j.
    #[default]
    Common,
    /// Subfiles missing at some of k_1..k_j.
    Cumulative,
    /// Subfiles missing at k_j and at none of k_1..k_{j-1}.
    Incremental,
}

/// Induced subgraph on K' ∪ F'; `None` keeps everything.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Restriction {
    pub users: Option<Vec<usize>>,
    pub subfiles: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrderingTrace {
    pub users: Vec<usize>,
    pub rho: Vec<u64>,
    /// min(|K'|, floor(K (1 - M/N)))
    pub n_prime: usize,
    pub total: u64,
}

/// Packed neighbourhoods restricted to F'.
struct Neighborhoods {
    words: usize,
    rows: Vec<Vec<u64>>,
    candidates: Vec<usize>,
    n_prime: usize,
}

impl Neighborhoods {
    fn new(pl: &PlacementMap, restriction: &Restriction) -> Result<Self> {
        let f = pl.subfiles();
        let words = f.div_ceil(64);
        let mut mask = vec![0u64; words];
        match &restriction.subfiles {
            Some(list) => {
                for &s in list {
                    if s >= f {
                        return Err(Error::InvalidOrdering(format!("subfile {s} out of range")));
                    }
                    mask[s / 64] |= 1 << (s % 64);
                }
            }
            None => (0..f).for_each(|s| mask[s / 64] |= 1 << (s % 64)),
        }
        let rows = (0..pl.users())
            .map(|k| {
                let mut r = vec![0u64; words];
                for s in pl.uncached(k) {
                    r[s / 64] |= 1 << (s % 64);
                }
                r.iter_mut().zip(&mask).for_each(|(a, m)| *a &= m);
                r
            })
            .collect();
        let candidates = match &restriction.users {
            Some(list) => {
                let mut c = list.clone();
                c.sort_unstable();
                if c.windows(2).any(|w| w[0] == w[1]) || c.last().is_some_and(|&u| u >= pl.users()) {
                    return Err(Error::InvalidOrdering("restricted user set has duplicates or unknown users".into()));
                }
                c
            }
            None => (0..pl.users()).collect(),
        };
        // K (1 - M/N) = (number of uncached pairs) / F
        let ku = pl.ones().checked_div(f).unwrap_or(0);
        Ok(Neighborhoods {
            words,
            rows,
            candidates: candidates.clone(),
            n_prime: candidates.len().min(ku),
        })
    }

    fn start(&self, reading: NeighborhoodReading) -> Vec<u64> {
        match reading {
            NeighborhoodReading::Common => vec![u64::MAX; self.words],
            _ => vec![0; self.words],
        }
    }

    /// ρ contributed by `row` after the users folded into `acc`.
    fn value(acc: &[u64], row: &[u64], reading: NeighborhoodReading) -> u64 {
        let it = acc.iter().zip(row);
        match reading {
            NeighborhoodReading::Common => it.map(|(a, b)| (a & b).count_ones() as u64).sum(),
            NeighborhoodReading::Cumulative => it.map(|(a, b)| (a | b).count_ones() as u64).sum(),
            NeighborhoodReading::Incremental => it.map(|(a, b)| (b & !a).count_ones() as u64).sum(),
        }
    }

    fn fold(acc: &mut [u64], row: &[u64], reading: NeighborhoodReading) {
        let it = acc.iter_mut().zip(row);
        match reading {
            NeighborhoodReading::Common => it.for_each(|(a, b)| *a &= b),
            _ => it.for_each(|(a, b)| *a |= b),
        }
    }

    fn trace(&self, ordering: &[usize], reading: NeighborhoodReading) -> OrderingTrace {
        let mut acc = self.start(reading);
        let mut rho = Vec::with_capacity(ordering.len());
        for &k in ordering.iter().take(self.n_prime) {
            rho.push(Self::value(&acc, &self.rows[k], reading));
            Self::fold(&mut acc, &self.rows[k], reading);
        }
        OrderingTrace {
            users: ordering.iter().copied().take(self.n_prime).collect(),
            total: rho.iter().sum(),
            rho,
            n_prime: self.n_prime,
        }
    }
}

/// Ordering bound Σ ρ_j for one ordering of users from K'. Only the first N'
/// users of the ordering contribute.
pub fn bound_generic(
    pl: &PlacementMap,
    ordering: &[usize],
    restriction: &Restriction,
    reading: NeighborhoodReading,
) -> Result<OrderingTrace> {
    let nb = Neighborhoods::new(pl, restriction)?;
    let mut seen = vec![false; pl.users()];
    for &k in ordering {
        if nb.candidates.binary_search(&k).is_err() {
            return Err(Error::InvalidOrdering(format!("user {k} is not among the candidate users")));
        }
        if std::mem::replace(&mut seen[k], true) {
            return Err(Error::InvalidOrdering(format!("user {k} appears twice")));
        }
    }
    Ok(nb.trace(ordering, reading))
}

/// Best ordering found and whether the search was exhaustive.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrderingSearch {
    pub best: OrderingTrace,
    pub exhaustive: bool,
}

/// Maximises the ordering bound. Up to [`EXHAUSTIVE_USERS`] candidates every
/// ordering of length N' is tried and the lexicographically least maximiser is
/// kept; beyond that a greedy walk adds the user with the largest next ρ
/// (least index on ties) and the result is only a heuristic.
pub fn max_over_orderings(pl: &PlacementMap, restriction: &Restriction, reading: NeighborhoodReading) -> Result<OrderingSearch> {
    let nb = Neighborhoods::new(pl, restriction)?;
    if nb.candidates.len() <= EXHAUSTIVE_USERS {
        let mut best: Option<OrderingTrace> = None;
        for perm in nb.candidates.iter().copied().permutations(nb.n_prime) {
            let t = nb.trace(&perm, reading);
            if best.as_ref().is_none_or(|b| t.total > b.total) {
                best = Some(t);
            }
        }
        return Ok(OrderingSearch {
            best: best.unwrap_or_else(|| nb.trace(&[], reading)),
            exhaustive: true,
        });
    }
    let mut order: Vec<usize> = Vec::with_capacity(nb.n_prime);
    let mut used = vec![false; pl.users()];
    let mut acc = nb.start(reading);
    for _ in 0..nb.n_prime {
        let mut pick: Option<(u64, usize)> = None;
        for &k in nb.candidates.iter().filter(|&&k| !used[k]) {
            let v = Neighborhoods::value(&acc, &nb.rows[k], reading);
            if pick.is_none_or(|(best, _)| v > best) {
                pick = Some((v, k));
            }
        }
        let (_, k) = pick.expect("n_prime <= candidates");
        used[k] = true;
        order.push(k);
        Neighborhoods::fold(&mut acc, &nb.rows[k], reading);
    }
    Ok(OrderingSearch {
        best: nb.trace(&order, reading),
        exhaustive: false,
    })
}

/// All closed-form bounds for a triple, plus the ordering bound when a
/// placement is supplied.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundsReport {
    pub triple: SystemTriple,
    /// `None` when K D / F is not an integer.
    pub theorem2: Option<BigUint>,
    pub cited_pda: BigUint,
    pub cutset: CutSet,
    pub ordering: Option<OrderingSearch>,
}

pub fn bounds_report(st: &SystemTriple, placement: Option<&PlacementMap>) -> Result<BoundsReport> {
    let ordering = placement
        .map(|pl| max_over_orderings(pl, &Restriction::default(), NeighborhoodReading::Common))
        .transpose()?;
    Ok(BoundsReport {
        triple: *st,
        theorem2: bound_theorem2(st).ok(),
        cited_pda: bound_cited_pda(st),
        cutset: bound_cutset_an(st),
        ordering,
    })
}

impl BoundsReport {
    /// (nested-ceiling bound, PDA bound, rounded cut-set value)
    pub fn triple_row(&self) -> (Option<&BigUint>, &BigUint, &BigUint) {
        (self.theorem2.as_ref(), &self.cited_pda, &self.cutset.ceil)
    }
}
