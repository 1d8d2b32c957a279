//! Subspaces of F_q^k in canonical (reduced row-echelon) form.
//!
//! A [`SubspaceBasis`] is identified by its RREF matrix, so equality of values
//! is equality of subspaces and the flattened matrix gives a total order used
//! for reproducible indexing. Enumeration of superspaces works in the quotient
//! by the fixed subspace, which keeps the cost proportional to the output.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use itertools::Itertools;
use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::gf::{FieldElement, FieldSpec};

/// Gaussian binomial coefficient `[a choose b]_q`, the number of b-dim
/// subspaces of F_q^a. Zero when `b > a`.
pub fn q_binomial(a: u64, b: u64, q: u64) -> BigUint {
    if b > a {
        return BigUint::zero();
    }
    let q = BigUint::from(q);
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..b {
        num *= q.pow((a - i) as u32) - 1u32;
        den *= q.pow((i + 1) as u32) - 1u32;
    }
    num / den
}

/// Number of r-dim subspaces of F_q^k meeting a fixed s-dim subspace in a
/// fixed l-dim subspace: `q^{(r-l)(s-l)} [k-s choose r-l]_q`.
///
/// `l = 0` is accepted (the meet is the zero subspace).
pub fn count_intersecting(k: u64, r: u64, s: u64, l: u64, q: u64) -> Result<BigUint> {
    if r == 0 || s == 0 || r > k || s > k || l > r.min(s) {
        return Err(Error::InvalidDimension(format!(
            "need 1 <= r, s <= k and l <= min(r, s); got k={k}, r={r}, s={s}, l={l}"
        )));
    }
    let power = BigUint::from(q).pow(((r - l) * (s - l)) as u32);
    Ok(power * q_binomial(k - s, r - l, q))
}

/// Number of unordered (m+1)-sets of 1-dim subspaces `{A_i}` with
/// `W ⊕ A_1 ⊕ ... ⊕ A_{m+1} = P` for `dim W = t - 1`, `dim P = m + t`.
pub fn generating_set_count(m: u64, t: u64, q: u64) -> BigUint {
    let qb = BigUint::from(q);
    let mut num = BigUint::one();
    for i in 0..=m {
        num *= qb.pow((m + t) as u32) - qb.pow((t - 1 + i) as u32);
    }
    let mut den = BigUint::from(q - 1).pow((m + 1) as u32);
    for i in 1..=m + 1 {
        den *= i;
    }
    num / den
}

/// Number of (m+1)-sets of t-dim superspaces of W whose sum is a fixed
/// (m+t)-dim superspace of W. Independent of t.
pub fn sets_per_flat(m: u64, q: u64) -> BigUint {
    generating_set_count(m, 1, q)
}

/// Result of [`count_generating_sets`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratingSetCount {
    /// Sets of 1-dim subspaces completing W to P.
    pub g_prime: BigUint,
    /// Sets of superspaces `W ⊕ A` summing to P.
    pub g: BigUint,
}

pub fn count_generating_sets(
    p: &SubspaceBasis,
    w: &SubspaceBasis,
    m: usize,
) -> Result<GeneratingSetCount> {
    if !p.contains(w)? || p.dim() != w.dim() + m + 1 {
        return Err(Error::InvalidDimension(format!(
            "need W ⊂ P with dim P = dim W + m + 1; got dim W = {}, dim P = {}, m = {m}",
            w.dim(),
            p.dim()
        )));
    }
    let q = p.field().order() as u64;
    let t = w.dim() as u64 + 1;
    let m = m as u64;
    let g_prime = generating_set_count(m, t, q);
    let g = &g_prime / BigUint::from(q).pow(((t - 1) * (m + 1)) as u32);
    Ok(GeneratingSetCount { g_prime, g })
}

/// Reduces `rows` (flattened, `k` columns) to RREF in place, dropping zero
/// rows. Returns the pivot columns.
fn rref(field: &FieldSpec, k: usize, rows: &mut Vec<FieldElement>) -> Vec<usize> {
    let nrows = rows.len().checked_div(k).unwrap_or(0);
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..k {
        if r == nrows {
            break;
        }
        let Some(sel) = (r..nrows).find(|&i| !rows[i * k + col].is_zero()) else {
            continue;
        };
        if sel != r {
            for j in 0..k {
                rows.swap(sel * k + j, r * k + j);
            }
        }
        let inv = field.inv(rows[r * k + col]).expect("pivot is nonzero");
        for j in col..k {
            rows[r * k + j] = field.mul(rows[r * k + j], inv);
        }
        for i in 0..nrows {
            if i == r {
                continue;
            }
            let factor = rows[i * k + col];
            if factor.is_zero() {
                continue;
            }
            for j in col..k {
                let sub = field.mul(factor, rows[r * k + j]);
                rows[i * k + j] = field.sub(rows[i * k + j], sub);
            }
        }
        pivots.push(col);
        r += 1;
    }
    rows.truncate(r * k);
    pivots
}

/// A subspace of F_q^k stored as its reduced row-echelon basis.
#[derive(Clone)]
pub struct SubspaceBasis {
    field: Arc<FieldSpec>,
    ambient_dim: usize,
    rows: Vec<FieldElement>,
    pivots: Vec<usize>,
}

impl SubspaceBasis {
    /// Canonical basis of the span of `vectors`.
    pub fn span(field: &Arc<FieldSpec>, ambient_dim: usize, vectors: &[Vec<FieldElement>]) -> Result<Self> {
        let mut rows = Vec::with_capacity(vectors.len() * ambient_dim);
        for v in vectors {
            if v.len() != ambient_dim {
                return Err(Error::AmbientMismatch {
                    left: ambient_dim,
                    right: v.len(),
                });
            }
            if let Some(bad) = v.iter().find(|e| e.value() as u32 >= field.order()) {
                return Err(Error::InvalidDimension(format!(
                    "entry {bad} is not an element of GF({})",
                    field.order()
                )));
            }
            rows.extend_from_slice(v);
        }
        Ok(Self::from_flat(field.clone(), ambient_dim, rows))
    }

    fn from_flat(field: Arc<FieldSpec>, ambient_dim: usize, mut rows: Vec<FieldElement>) -> Self {
        let pivots = rref(&field, ambient_dim, &mut rows);
        SubspaceBasis {
            field,
            ambient_dim,
            rows,
            pivots,
        }
    }

    pub fn zero(field: &Arc<FieldSpec>, ambient_dim: usize) -> Self {
        SubspaceBasis {
            field: field.clone(),
            ambient_dim,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    /// Span of the standard basis vectors `e_i` for `i` in `indices` (0-based).
    pub fn standard(field: &Arc<FieldSpec>, ambient_dim: usize, indices: &[usize]) -> Result<Self> {
        let vectors: Vec<Vec<FieldElement>> = indices
            .iter()
            .map(|&i| {
                let mut v = vec![FieldElement::ZERO; ambient_dim];
                *v.get_mut(i).ok_or_else(|| {
                    Error::InvalidDimension(format!("e_{i} outside F_q^{ambient_dim}"))
                })? = FieldElement::ONE;
                Ok(v)
            })
            .collect::<Result<_>>()?;
        Self::span(field, ambient_dim, &vectors)
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn rows(&self) -> impl Iterator<Item = &[FieldElement]> {
        self.rows.chunks(self.ambient_dim.max(1)).take(self.dim())
    }

    /// Flattened RREF matrix, row-major.
    pub fn matrix(&self) -> &[FieldElement] {
        &self.rows
    }

    pub fn to_rows(&self) -> Vec<Vec<FieldElement>> {
        self.rows().map(<[FieldElement]>::to_vec).collect()
    }

    fn check_compatible(&self, other: &SubspaceBasis) -> Result<()> {
        if self.ambient_dim != other.ambient_dim {
            return Err(Error::AmbientMismatch {
                left: self.ambient_dim,
                right: other.ambient_dim,
            });
        }
        if self.field != other.field {
            return Err(Error::InvalidDimension("subspaces over different fields".into()));
        }
        Ok(())
    }

    /// `v` minus its component along this subspace (zero iff `v` lies in it).
    pub fn reduce(&self, v: &[FieldElement]) -> Vec<FieldElement> {
        let mut out = v.to_vec();
        for (row, &col) in self.rows().zip(&self.pivots) {
            let c = out[col];
            if c.is_zero() {
                continue;
            }
            for (o, &x) in out.iter_mut().zip(row) {
                *o = self.field.sub(*o, self.field.mul(c, x));
            }
        }
        out
    }

    pub fn contains_vector(&self, v: &[FieldElement]) -> bool {
        self.reduce(v).iter().all(|e| e.is_zero())
    }

    pub fn sum(&self, other: &SubspaceBasis) -> Result<SubspaceBasis> {
        self.check_compatible(other)?;
        let mut rows = self.rows.clone();
        rows.extend_from_slice(&other.rows);
        Ok(Self::from_flat(self.field.clone(), self.ambient_dim, rows))
    }

    /// True iff `other ⊆ self`.
    pub fn contains(&self, other: &SubspaceBasis) -> Result<bool> {
        self.check_compatible(other)?;
        if other.dim() > self.dim() {
            return Ok(false);
        }
        Ok(other.rows().all(|r| self.contains_vector(r)))
    }

    pub fn intersection_dim(&self, other: &SubspaceBasis) -> Result<usize> {
        Ok(self.dim() + other.dim() - self.sum(other)?.dim())
    }

    /// Coordinates of `v` modulo this subspace: the entries of `reduce(v)` at
    /// the non-pivot columns. Two vectors have equal coordinates iff they
    /// agree modulo the subspace.
    pub fn quotient_coords(&self, v: &[FieldElement]) -> Vec<FieldElement> {
        let reduced = self.reduce(v);
        let mut is_pivot = vec![false; self.ambient_dim];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        reduced
            .into_iter()
            .zip(is_pivot)
            .filter_map(|(e, p)| (!p).then_some(e))
            .collect()
    }

    /// All `d`-dim subspaces containing `self`, sorted by canonical matrix.
    pub fn enumerate_superspaces(&self, d: usize) -> Result<Vec<SubspaceBasis>> {
        let k = self.ambient_dim;
        let w = self.dim();
        if d < w || d > k {
            return Err(Error::InvalidDimension(format!(
                "superspace dimension {d} outside [{w}, {k}]"
            )));
        }
        let free_cols: Vec<usize> = (0..k).filter(|c| !self.pivots.contains(c)).collect();
        let mut out: Vec<SubspaceBasis> = rref_matrices(&self.field, k - w, d - w)
            .into_iter()
            .map(|quot| {
                let mut rows = self.rows.clone();
                for qrow in quot.chunks(k - w) {
                    let mut v = vec![FieldElement::ZERO; k];
                    for (&col, &x) in free_cols.iter().zip(qrow) {
                        v[col] = x;
                    }
                    rows.extend(v);
                }
                Self::from_flat(self.field.clone(), k, rows)
            })
            .collect();
        out.sort();
        debug_assert!(out.windows(2).all(|p| p[0] != p[1]));
        Ok(out)
    }

    /// The vectors of this subspace in the canonical order of their coefficient tuples.
    pub fn vectors(&self) -> Vec<Vec<FieldElement>> {
        let q = self.field.order() as usize;
        let dim = self.dim();
        let total = q.pow(dim as u32);
        (0..total)
            .map(|mut code| {
                let mut v = vec![FieldElement::ZERO; self.ambient_dim];
                for row in self.rows() {
                    let c = FieldElement::from_index(code % q);
                    code /= q;
                    for (o, &x) in v.iter_mut().zip(row) {
                        *o = self.field.add(*o, self.field.mul(c, x));
                    }
                }
                v
            })
            .collect()
    }
}

/// Every `d`-dim subspace of F_q^n as a flattened RREF matrix, in
/// pivot-set then odometer order.
pub fn rref_matrices(field: &FieldSpec, n: usize, d: usize) -> Vec<Vec<FieldElement>> {
    if d > n {
        return Vec::new();
    }
    if d == 0 {
        return vec![Vec::new()];
    }
    let q = field.order() as usize;
    let mut out = Vec::new();
    for pivots in (0..n).combinations(d) {
        let free: Vec<(usize, usize)> = pivots
            .iter()
            .enumerate()
            .flat_map(|(i, &p)| {
                let pivots = &pivots;
                (p + 1..n)
                    .filter(move |c| !pivots.contains(c))
                    .map(move |c| (i, c))
            })
            .collect();
        let mut counter = vec![0usize; free.len()];
        loop {
            let mut m = vec![FieldElement::ZERO; d * n];
            for (i, &p) in pivots.iter().enumerate() {
                m[i * n + p] = FieldElement::ONE;
            }
            for (&(i, c), &x) in free.iter().zip(&counter) {
                m[i * n + c] = FieldElement::from_index(x);
            }
            out.push(m);
            // odometer, last cell fastest
            let mut done = true;
            let mut pos = free.len();
            while pos > 0 {
                pos -= 1;
                counter[pos] += 1;
                if counter[pos] < q {
                    done = false;
                    break;
                }
                counter[pos] = 0;
            }
            if done {
                break;
            }
        }
    }
    out
}

/// All `d`-dim subspaces of F_q^k, sorted.
pub fn enumerate_subspaces(field: &Arc<FieldSpec>, k: usize, d: usize) -> Result<Vec<SubspaceBasis>> {
    SubspaceBasis::zero(field, k).enumerate_superspaces(d)
}

/// Echelon basis grown one vector at a time; used to walk independent sets.
#[derive(Clone)]
pub struct IncrementalBasis<'a> {
    field: &'a FieldSpec,
    rows: Vec<(usize, Vec<FieldElement>)>,
}

impl<'a> IncrementalBasis<'a> {
    pub fn new(field: &'a FieldSpec) -> Self {
        IncrementalBasis {
            field,
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Adds `v` if it is independent of the current rows; returns whether it was added.
    pub fn push(&mut self, v: &[FieldElement]) -> bool {
        let f = self.field;
        let mut r = v.to_vec();
        for (piv, row) in &self.rows {
            let c = r[*piv];
            if c.is_zero() {
                continue;
            }
            for (o, &x) in r.iter_mut().zip(row) {
                *o = f.sub(*o, f.mul(c, x));
            }
        }
        let Some(piv) = r.iter().position(|e| !e.is_zero()) else {
            return false;
        };
        let inv = f.inv(r[piv]).expect("nonzero");
        for o in r.iter_mut() {
            *o = f.mul(*o, inv);
        }
        self.rows.push((piv, r));
        true
    }

    pub fn pop(&mut self) {
        self.rows.pop();
    }
}

/// Index sets (ascending, lexicographic order) of `size` linearly independent vectors from `vectors`.
pub fn independent_subsets(field: &FieldSpec, vectors: &[Vec<FieldElement>], size: usize) -> Vec<Vec<usize>> {
    fn walk(
        vectors: &[Vec<FieldElement>],
        size: usize,
        start: usize,
        basis: &mut IncrementalBasis<'_>,
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if current.len() == size {
            out.push(current.clone());
            return;
        }
        let needed = size - current.len();
        for i in start..vectors.len() {
            if vectors.len() - i < needed {
                break;
            }
            if basis.push(&vectors[i]) {
                current.push(i);
                walk(vectors, size, i + 1, basis, current, out);
                current.pop();
                basis.pop();
            }
        }
    }
    let mut out = Vec::new();
    let mut basis = IncrementalBasis::new(field);
    walk(vectors, size, 0, &mut basis, &mut Vec::new(), &mut out);
    out
}

impl PartialEq for SubspaceBasis {
    fn eq(&self, other: &Self) -> bool {
        self.ambient_dim == other.ambient_dim && self.rows == other.rows && self.field == other.field
    }
}

impl Eq for SubspaceBasis {}

impl Hash for SubspaceBasis {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.ambient_dim.hash(state);
        self.rows.hash(state);
    }
}

impl PartialOrd for SubspaceBasis {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SubspaceBasis {
    fn cmp(&self, other: &Self) -> Ordering {
        self.ambient_dim
            .cmp(&other.ambient_dim)
            .then(self.dim().cmp(&other.dim()))
            .then_with(|| self.rows.cmp(&other.rows))
    }
}

impl fmt::Debug for SubspaceBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<u16>> = self.rows().map(|r| r.iter().map(|e| e.value()).collect()).collect();
        write!(f, "Subspace(k={}, {:?})", self.ambient_dim, rows)
    }
}
