//! The caching line graph built from superspaces of a fixed subspace.
//!
//! Users are the t-dim superspaces V of W = span(e_1, ..., e_{t-1}) in F_q^k.
//! Subfiles are (m+1)-sets of users whose sum is an (m+t)-dim space (a
//! "flat"). A user misses a subfile exactly when it is not contained in that
//! sum, and every (m+2)-set of users with an (m+t+1)-dim sum yields one
//! transmission clique.
//!
//! All cliques store vertex indices; vertices are ordered by (user, subfile).

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::gf::{FieldElement, FieldSpec};
use crate::projgeom::{independent_subsets, q_binomial, sets_per_flat, SubspaceBasis};

/// Default cap on line-graph vertices (and on subfiles) for explicit construction.
pub const DEFAULT_MAX_VERTICES: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct ConstructionParams {
    pub k: usize,
    pub m: usize,
    pub t: usize,
    pub q: u64,
}

impl ConstructionParams {
    pub fn new(k: usize, m: usize, t: usize, q: u64) -> Result<Self> {
        let p = ConstructionParams { k, m, t, q };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.t == 0 {
            return Err(Error::InvalidParams("t must be at least 1".into()));
        }
        if self.m + self.t > self.k {
            return Err(Error::InvalidParams(format!(
                "need m + t <= k, got m = {}, t = {}, k = {}",
                self.m, self.t, self.k
            )));
        }
        if crate::gf::prime_power(self.q).is_none() {
            return Err(Error::NotPrimePower(self.q));
        }
        Ok(())
    }

    /// `k - m - t`.
    pub fn alpha(&self) -> usize {
        self.k - self.m - self.t
    }

    /// `m = 0` gives transmission cliques of size 2.
    pub fn is_degenerate(&self) -> bool {
        self.m == 0
    }

    pub fn field(&self) -> Result<Arc<FieldSpec>> {
        Ok(Arc::new(FieldSpec::from_order(self.q)?))
    }
}

impl fmt::Display for ConstructionParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(k={}, m={}, t={}, q={})", self.k, self.m, self.t, self.q)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_vertices: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_vertices: DEFAULT_MAX_VERTICES,
        }
    }
}

/// Closed-form sizes of the construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredictedCounts {
    /// K = [k-t+1 choose 1]_q
    pub users: BigUint,
    /// |ℙ| = [k-t+1 choose m+1]_q
    pub flats: BigUint,
    /// g, subfiles per flat
    pub sets_per_flat: BigUint,
    /// F = |ℙ| g
    pub subfiles: BigUint,
    /// c = q^{m+1} [k-m-t choose 1]_q
    pub subfile_clique: BigUint,
    /// D = q^{m+1} [k-t choose m+1]_q g
    pub user_clique: BigUint,
    /// K D
    pub vertices: BigUint,
    /// |𝕐| = K D / (m+2)
    pub transmissions: BigUint,
}

pub fn predicted_counts(p: &ConstructionParams) -> PredictedCounts {
    let (k, m, t, q) = (p.k as u64, p.m as u64, p.t as u64, p.q);
    let qm1 = BigUint::from(q).pow((m + 1) as u32);
    let users = q_binomial(k - t + 1, 1, q);
    let flats = q_binomial(k - t + 1, m + 1, q);
    let g = sets_per_flat(m, q);
    let subfiles = &flats * &g;
    let subfile_clique = &qm1 * q_binomial(k - m - t, 1, q);
    let user_clique = &qm1 * q_binomial(k - t, m + 1, q) * &g;
    let vertices = &users * &user_clique;
    let transmissions = &vertices / (m + 2);
    PredictedCounts {
        users,
        flats,
        sets_per_flat: g,
        subfiles,
        subfile_clique,
        user_clique,
        vertices,
        transmissions,
    }
}

fn check_cap(what: &'static str, estimate: &BigUint, cap: u64, predicted_f: &BigUint) -> Result<()> {
    if *estimate > BigUint::from(cap) {
        return Err(Error::CapExceeded {
            what,
            estimate: estimate.to_string(),
            cap,
            predicted_f: predicted_f.to_string(),
        });
    }
    Ok(())
}

/// Normalized quotient coordinates of a t-dim superspace of W: the single
/// projective point V/W, scaled to have leading entry 1.
fn quotient_point(field: &FieldSpec, w: &SubspaceBasis, v: &SubspaceBasis) -> Vec<FieldElement> {
    let coords = v
        .rows()
        .map(|r| w.quotient_coords(r))
        .find(|c| c.iter().any(|e| !e.is_zero()))
        .expect("V strictly contains W");
    let lead = *coords.iter().find(|e| !e.is_zero()).unwrap();
    let inv = field.inv(lead).unwrap();
    coords.into_iter().map(|e| field.mul(e, inv)).collect()
}

/// The sets 𝕍, ℙ and 𝕏.
#[derive(Clone, Debug)]
pub struct Universe {
    params: ConstructionParams,
    field: Arc<FieldSpec>,
    w: SubspaceBasis,
    users: Vec<SubspaceBasis>,
    flats: Vec<SubspaceBasis>,
    subfiles: Vec<Vec<u32>>,
    subfile_flat: Vec<u32>,
    flat_members: Vec<Vec<u32>>,
    user_points: Vec<Vec<FieldElement>>,
}

pub fn build_universe(params: &ConstructionParams, limits: &Limits) -> Result<Universe> {
    params.validate()?;
    let predicted = predicted_counts(params);
    check_cap("subfiles", &predicted.subfiles, limits.max_vertices, &predicted.subfiles)?;

    let field = params.field()?;
    let k = params.k;
    let w = SubspaceBasis::standard(&field, k, &(0..params.t - 1).collect::<Vec<_>>())?;
    let users = w.enumerate_superspaces(params.t)?;
    let flats = w.enumerate_superspaces(params.m + params.t)?;
    let user_points: Vec<_> = users.iter().map(|v| quotient_point(&field, &w, v)).collect();
    let flat_members = members_of(&users, &flats)?;

    let mut tagged: Vec<(Vec<u32>, u32)> = Vec::new();
    for (pi, members) in flat_members.iter().enumerate() {
        let pts: Vec<Vec<FieldElement>> = members.iter().map(|&u| user_points[u as usize].clone()).collect();
        for set in independent_subsets(&field, &pts, params.m + 1) {
            tagged.push((set.into_iter().map(|i| members[i]).collect(), pi as u32));
        }
    }
    tagged.sort();
    let (subfiles, subfile_flat) = tagged.into_iter().unzip();
    Ok(Universe {
        params: *params,
        field,
        w,
        users,
        flats,
        subfiles,
        subfile_flat,
        flat_members,
        user_points,
    })
}

fn members_of(users: &[SubspaceBasis], spaces: &[SubspaceBasis]) -> Result<Vec<Vec<u32>>> {
    spaces
        .iter()
        .map(|s| {
            let mut out = Vec::new();
            for (i, v) in users.iter().enumerate() {
                if s.contains(v)? {
                    out.push(i as u32);
                }
            }
            Ok(out)
        })
        .collect()
}

impl Universe {
    /// Rebuilds a universe from stored users and subfile tuples; flats are
    /// recomputed as the sums of the subfile members.
    pub fn from_parts(
        params: ConstructionParams,
        field: Arc<FieldSpec>,
        w: SubspaceBasis,
        users: Vec<SubspaceBasis>,
        subfiles: Vec<Vec<u32>>,
    ) -> Result<Universe> {
        params.validate()?;
        let k = params.k;
        let schema = |msg: String| Err(Error::Schema(msg));
        if w.ambient_dim() != k || w.dim() + 1 != params.t {
            return schema(format!("W must be a {}-dim subspace of F_q^{k}", params.t - 1));
        }
        for (i, v) in users.iter().enumerate() {
            if v.ambient_dim() != k || v.dim() != params.t || !v.contains(&w)? {
                return schema(format!("user {i} is not a {}-dim superspace of W", params.t));
            }
        }
        if users.windows(2).any(|p| p[0] >= p[1]) {
            return schema("users must be strictly increasing".into());
        }
        if subfiles.windows(2).any(|p| p[0] >= p[1]) {
            return schema("subfiles must be strictly increasing".into());
        }
        let mut flats: Vec<SubspaceBasis> = Vec::new();
        let mut sums = Vec::with_capacity(subfiles.len());
        for (i, x) in subfiles.iter().enumerate() {
            if x.len() != params.m + 1 || x.windows(2).any(|p| p[0] >= p[1]) {
                return schema(format!("subfile {i} is not a sorted (m+1)-tuple"));
            }
            let mut s = w.clone();
            for &u in x {
                let v = users
                    .get(u as usize)
                    .ok_or_else(|| Error::Schema(format!("subfile {i} names unknown user {u}")))?;
                s = s.sum(v)?;
            }
            if s.dim() != params.m + params.t {
                return schema(format!("subfile {i} does not span an (m+t)-dim space"));
            }
            sums.push(s);
        }
        flats.extend(sums.iter().cloned());
        flats.sort();
        flats.dedup();
        let subfile_flat = sums
            .iter()
            .map(|s| flats.binary_search(s).unwrap() as u32)
            .collect();
        let user_points = users.iter().map(|v| quotient_point(&field, &w, v)).collect();
        let flat_members = members_of(&users, &flats)?;
        Ok(Universe {
            params,
            field,
            w,
            users,
            flats,
            subfiles,
            subfile_flat,
            flat_members,
            user_points,
        })
    }

    pub fn params(&self) -> &ConstructionParams {
        &self.params
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    pub fn w(&self) -> &SubspaceBasis {
        &self.w
    }

    pub fn users(&self) -> &[SubspaceBasis] {
        &self.users
    }

    pub fn flats(&self) -> &[SubspaceBasis] {
        &self.flats
    }

    /// 𝕏 as sorted user-index tuples, in lexicographic order.
    pub fn subfiles(&self) -> &[Vec<u32>] {
        &self.subfiles
    }

    /// Index into [`flats`](Self::flats) of each subfile's sum.
    pub fn subfile_flat(&self) -> &[u32] {
        &self.subfile_flat
    }

    /// Users contained in each flat.
    pub fn flat_members(&self) -> &[Vec<u32>] {
        &self.flat_members
    }

    pub fn user_points(&self) -> &[Vec<FieldElement>] {
        &self.user_points
    }

    pub fn subfile_index(&self, set: &[u32]) -> Option<usize> {
        self.subfiles.binary_search_by(|x| x.as_slice().cmp(set)).ok()
    }

    /// Number of subfiles whose sum is each flat.
    pub fn subfiles_per_flat(&self) -> Vec<usize> {
        let mut counts = vec![0; self.flats.len()];
        for &f in &self.subfile_flat {
            counts[f as usize] += 1;
        }
        counts
    }

    /// Sum of the users in `x`.
    pub fn span_of(&self, x: &[u32]) -> Result<SubspaceBasis> {
        x.iter()
            .try_fold(self.w.clone(), |acc, &u| acc.sum(&self.users[u as usize]))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Vertex {
    pub user: u32,
    pub subfile: u32,
}

impl Vertex {
    pub fn new(user: usize, subfile: usize) -> Self {
        Vertex {
            user: user as u32,
            subfile: subfile as u32,
        }
    }

    /// Adjacency in the line graph: shared user or shared subfile, not both.
    pub fn adjacent(self, other: Vertex) -> bool {
        (self.user == other.user) != (self.subfile == other.subfile)
    }
}

/// Line graph of the placement bipartite graph with its three clique families.
#[derive(Clone, Debug)]
pub struct CachingLineGraph {
    universe: Universe,
    vertices: Vec<Vertex>,
    user_cliques: Vec<Vec<u32>>,
    subfile_cliques: Vec<Vec<u32>>,
    transmission_sets: Vec<Vec<u32>>,
    transmission_cliques: Vec<Vec<u32>>,
}

pub fn build_line_graph(universe: Universe, limits: &Limits) -> Result<CachingLineGraph> {
    let params = universe.params;
    if params.alpha() == 0 {
        return Err(Error::Degenerate(
            "m + t = k leaves every subfile cached at every user (c = 0); the line graph is empty".into(),
        ));
    }
    let predicted = predicted_counts(&params);
    check_cap("line-graph vertices", &predicted.vertices, limits.max_vertices, &predicted.subfiles)?;

    let n_users = universe.users.len();
    let mut in_flat = vec![vec![false; universe.flats.len()]; n_users];
    for (pi, members) in universe.flat_members.iter().enumerate() {
        for &u in members {
            in_flat[u as usize][pi] = true;
        }
    }
    let mut vertices = Vec::new();
    for (u, row) in in_flat.iter().enumerate() {
        for (f, &pi) in universe.subfile_flat.iter().enumerate() {
            if !row[pi as usize] {
                vertices.push(Vertex::new(u, f));
            }
        }
    }
    let mut graph = CachingLineGraph::from_vertices(universe, vertices)?;
    let (sets, cliques) = enumerate_transmission_cliques(&graph)?;
    graph.transmission_sets = sets;
    graph.transmission_cliques = cliques;
    Ok(graph)
}

/// Transmission sets and their cliques, index-aligned.
pub type TransmissionFamily = (Vec<Vec<u32>>, Vec<Vec<u32>>);

/// 𝕐 and the transmission clique of each member.
///
/// Every (m+2)-set Y of users with an (m+t+1)-dim sum contributes
/// `{(V, Y \ {V}) : V ∈ Y}`. Sets come out in lexicographic order and each
/// clique lists its vertices by user.
pub fn enumerate_transmission_cliques(graph: &CachingLineGraph) -> Result<TransmissionFamily> {
    let u = &graph.universe;
    let p = u.params;
    let dim = p.m + p.t + 1;
    if dim > p.k {
        return Ok((Vec::new(), Vec::new()));
    }
    let spaces = u.w.enumerate_superspaces(dim)?;
    let members = members_of(&u.users, &spaces)?;
    let mut sets: Vec<Vec<u32>> = Vec::new();
    for m in &members {
        let pts: Vec<Vec<FieldElement>> = m.iter().map(|&i| u.user_points[i as usize].clone()).collect();
        for set in independent_subsets(&u.field, &pts, p.m + 2) {
            sets.push(set.into_iter().map(|i| m[i]).collect());
        }
    }
    sets.sort();
    let mut cliques = Vec::with_capacity(sets.len());
    for y in &sets {
        let mut clique = Vec::with_capacity(y.len());
        for (i, &user) in y.iter().enumerate() {
            let rest: Vec<u32> = y.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &x)| x).collect();
            let f = u
                .subfile_index(&rest)
                .ok_or_else(|| Error::Degenerate(format!("transmission set {y:?} has no subfile {rest:?}")))?;
            let v = graph
                .vertex_id(user as usize, f)
                .ok_or_else(|| Error::Degenerate(format!("user {user} caches subfile {f} inside {y:?}")))?;
            clique.push(v);
        }
        cliques.push(clique);
    }
    Ok((sets, cliques))
}

impl CachingLineGraph {
    /// Assembles user and subfile cliques from a vertex list sorted by (user, subfile).
    pub fn from_vertices(universe: Universe, vertices: Vec<Vertex>) -> Result<Self> {
        if vertices.windows(2).any(|p| p[0] >= p[1]) {
            return Err(Error::Schema("vertices must be strictly increasing".into()));
        }
        let n_users = universe.users.len();
        let n_subfiles = universe.subfiles.len();
        let mut user_cliques = vec![Vec::new(); n_users];
        let mut subfile_cliques = vec![Vec::new(); n_subfiles];
        for (id, v) in vertices.iter().enumerate() {
            let (u, f) = (v.user as usize, v.subfile as usize);
            if u >= n_users || f >= n_subfiles {
                return Err(Error::UnknownVertex { user: u, subfile: f });
            }
            user_cliques[u].push(id as u32);
            subfile_cliques[f].push(id as u32);
        }
        Ok(CachingLineGraph {
            universe,
            vertices,
            user_cliques,
            subfile_cliques,
            transmission_sets: Vec::new(),
            transmission_cliques: Vec::new(),
        })
    }

    /// Attaches transmission cliques (vertex ids), e.g. when loading a stored scheme.
    pub fn with_transmission_cliques(mut self, sets: Vec<Vec<u32>>, cliques: Vec<Vec<u32>>) -> Self {
        self.transmission_sets = sets;
        self.transmission_cliques = cliques;
        self
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn params(&self) -> &ConstructionParams {
        &self.universe.params
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex(&self, id: u32) -> Vertex {
        self.vertices[id as usize]
    }

    pub fn num_users(&self) -> usize {
        self.user_cliques.len()
    }

    pub fn num_subfiles(&self) -> usize {
        self.subfile_cliques.len()
    }

    pub fn user_cliques(&self) -> &[Vec<u32>] {
        &self.user_cliques
    }

    pub fn subfile_cliques(&self) -> &[Vec<u32>] {
        &self.subfile_cliques
    }

    /// 𝕐, one sorted user tuple per transmission clique.
    pub fn transmission_sets(&self) -> &[Vec<u32>] {
        &self.transmission_sets
    }

    pub fn transmission_cliques(&self) -> &[Vec<u32>] {
        &self.transmission_cliques
    }

    pub fn vertex_id(&self, user: usize, subfile: usize) -> Option<u32> {
        let clique = self.user_cliques.get(user)?;
        clique
            .binary_search_by(|&id| (self.vertices[id as usize].subfile as usize).cmp(&subfile))
            .ok()
            .map(|i| clique[i])
    }

    pub fn contains_vertex(&self, v: Vertex) -> bool {
        self.vertex_id(v.user as usize, v.subfile as usize).is_some()
    }

    /// Edge test in the complement of the square of the line graph:
    /// distinct users, distinct subfiles, and neither cross pair is a vertex.
    pub fn is_compl_square_edge(&self, a: Vertex, b: Vertex) -> Result<bool> {
        for v in [a, b] {
            if !self.contains_vertex(v) {
                return Err(Error::UnknownVertex {
                    user: v.user as usize,
                    subfile: v.subfile as usize,
                });
            }
        }
        Ok(a.user != b.user
            && a.subfile != b.subfile
            && !self.contains_vertex(Vertex { user: a.user, subfile: b.subfile })
            && !self.contains_vertex(Vertex { user: b.user, subfile: a.subfile }))
    }

    /// Checks the four line-graph conditions on the stored cliques.
    pub fn verify(&self) -> ValidationReport {
        verify_line_graph(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Condition {
    /// User cliques partition the vertices into K cliques of equal size D.
    UserCliques,
    /// A vertex has at most one neighbour in any other user clique.
    CrossNeighbors,
    /// Each vertex with its neighbours outside its user clique forms the listed subfile clique.
    SubfileCliques,
    /// The number of subfile cliques is F.
    SubfileCount,
    /// Every subfile clique has the same size c; every user clique the same size D.
    Regularity,
    /// Transmission cliques have size m+2 and are cliques of the complement square.
    TransmissionCliques,
    /// Transmission cliques partition the vertices.
    TransmissionPartition,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub condition: Condition,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}: {}", self.condition, self.detail)
    }
}

#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub checked: Vec<Condition>,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn passes(&self, c: Condition) -> bool {
        self.checked.contains(&c) && !self.violations.iter().any(|v| v.condition == c)
    }

    fn fail(&mut self, condition: Condition, detail: String) {
        // a handful of examples per condition is enough to diagnose
        if self.violations.iter().filter(|v| v.condition == condition).count() < 8 {
            self.violations.push(Violation { condition, detail });
        }
    }

    pub fn merge(&mut self, other: ValidationReport) {
        self.checked.extend(other.checked);
        self.violations.extend(other.violations);
    }
}

/// A set of line-graph vertices is a clique iff its members pairwise share
/// exactly one endpoint; since the underlying graph is bipartite, cliques
/// with three or more members are stars around one user or one subfile.
fn is_clique(vs: &[Vertex]) -> bool {
    if vs.len() <= 3 {
        return vs
            .iter()
            .enumerate()
            .all(|(i, a)| vs[i + 1..].iter().all(|b| a.adjacent(*b)));
    }
    let star = |key: fn(&Vertex) -> u32, other: fn(&Vertex) -> u32| {
        let mut others: Vec<u32> = vs.iter().map(other).collect();
        others.sort_unstable();
        vs.iter().all(|v| key(v) == key(&vs[0])) && others.windows(2).all(|p| p[0] != p[1])
    };
    star(|v| v.user, |v| v.subfile) || star(|v| v.subfile, |v| v.user)
}

pub fn verify_line_graph(g: &CachingLineGraph) -> ValidationReport {
    use Condition::*;
    let mut r = ValidationReport {
        checked: vec![UserCliques, CrossNeighbors, SubfileCliques, SubfileCount],
        violations: Vec::new(),
    };
    let n = g.vertices.len();
    let lab = |id: u32| g.vertices[id as usize];

    // (i)
    let mut owner = vec![u32::MAX; n];
    for (k, clique) in g.user_cliques.iter().enumerate() {
        for &id in clique {
            if id as usize >= n {
                r.fail(UserCliques, format!("user clique {k} names missing vertex {id}"));
                continue;
            }
            if owner[id as usize] != u32::MAX {
                r.fail(UserCliques, format!("vertex {id} lies in user cliques {} and {k}", owner[id as usize]));
            }
            owner[id as usize] = k as u32;
        }
        let members: Vec<Vertex> = clique.iter().filter(|&&id| (id as usize) < n).map(|&id| lab(id)).collect();
        if !is_clique(&members) {
            r.fail(UserCliques, format!("user clique {k} is not a clique"));
        }
    }
    if let Some(id) = owner.iter().position(|&o| o == u32::MAX) {
        r.fail(UserCliques, format!("vertex {id} is in no user clique"));
    }
    if let Some(first) = g.user_cliques.first() {
        if let Some((k, c)) = g.user_cliques.iter().enumerate().find(|(_, c)| c.len() != first.len()) {
            r.fail(UserCliques, format!("user clique {k} has {} vertices, clique 0 has {}", c.len(), first.len()));
        }
    }

    // (ii): a vertex outside clique U is adjacent to (#members sharing its user)
    // + (#members sharing its subfile) vertices of U, labels being unique.
    let n_users = g.num_users();
    let n_sub = g.num_subfiles();
    let mut cnt_user = vec![0u32; n_users];
    let mut cnt_sub = vec![0u32; n_sub];
    'cliques: for (k, clique) in g.user_cliques.iter().enumerate() {
        for &id in clique.iter().filter(|&&id| (id as usize) < n) {
            cnt_user[lab(id).user as usize] += 1;
            cnt_sub[lab(id).subfile as usize] += 1;
        }
        for (id, v) in g.vertices.iter().enumerate() {
            if owner[id] == k as u32 {
                continue;
            }
            let hits = cnt_user[v.user as usize] + cnt_sub[v.subfile as usize];
            if hits > 1 {
                r.fail(CrossNeighbors, format!("vertex {id} has {hits} neighbours in user clique {k}"));
                for &id in clique.iter().filter(|&&id| (id as usize) < n) {
                    cnt_user[lab(id).user as usize] = 0;
                    cnt_sub[lab(id).subfile as usize] = 0;
                }
                continue 'cliques;
            }
        }
        for &id in clique.iter().filter(|&&id| (id as usize) < n) {
            cnt_user[lab(id).user as usize] = 0;
            cnt_sub[lab(id).subfile as usize] = 0;
        }
    }

    // (iii): {v} ∪ N(v) \ U_k, computed from labels, must be a clique and must
    // be exactly the listed subfile clique containing v.
    let mut by_user = vec![Vec::new(); n_users];
    let mut by_sub = vec![Vec::new(); n_sub];
    for (id, v) in g.vertices.iter().enumerate() {
        by_user[v.user as usize].push(id as u32);
        by_sub[v.subfile as usize].push(id as u32);
    }
    let mut listed_in = vec![u32::MAX; n];
    for (s, clique) in g.subfile_cliques.iter().enumerate() {
        for &id in clique {
            if (id as usize) < n {
                if listed_in[id as usize] != u32::MAX {
                    r.fail(SubfileCliques, format!("vertex {id} listed in subfile cliques {} and {s}", listed_in[id as usize]));
                }
                listed_in[id as usize] = s as u32;
            } else {
                r.fail(SubfileCliques, format!("subfile clique {s} names missing vertex {id}"));
            }
        }
    }
    // when every vertex labelled with user u sits in one user clique, the
    // same-label part of the neighbourhood outside that clique is empty
    let single_owner: Vec<Option<u32>> = by_user
        .iter()
        .map(|ids| {
            let first = owner[*ids.first()? as usize];
            ids.iter().all(|&w| owner[w as usize] == first).then_some(first)
        })
        .collect();
    let mut distinct_sets = std::collections::BTreeSet::new();
    for (id, v) in g.vertices.iter().enumerate() {
        let mut set: Vec<u32> = by_sub[v.subfile as usize].clone();
        if single_owner[v.user as usize] != Some(owner[id]) {
            set.extend(by_user[v.user as usize].iter().filter(|&&w| owner[w as usize] != owner[id] && w != id as u32));
        }
        set.sort_unstable();
        set.dedup();
        let members: Vec<Vertex> = set.iter().map(|&w| lab(w)).collect();
        if !is_clique(&members) {
            r.fail(SubfileCliques, format!("neighbourhood of vertex {id} outside its user clique is not a clique"));
        }
        match g.subfile_cliques.get(listed_in[id] as usize) {
            Some(listed) => {
                let mut listed = listed.clone();
                listed.sort_unstable();
                if listed != set {
                    r.fail(
                        SubfileCliques,
                        format!("vertex {id} sits in subfile clique {} but its subfile clique is {:?}", listed_in[id], set),
                    );
                }
            }
            None => r.fail(SubfileCliques, format!("vertex {id} is in no subfile clique")),
        }
        distinct_sets.insert(set);
    }

    // (iv)
    let expected = g.universe.subfiles.len();
    if distinct_sets.len() != g.subfile_cliques.len() || g.subfile_cliques.len() != expected {
        r.fail(
            SubfileCount,
            format!(
                "{} listed subfile cliques, {} distinct neighbourhood cliques, |𝕏| = {expected}",
                g.subfile_cliques.len(),
                distinct_sets.len()
            ),
        );
    }
    r
}

/// Equal clique sizes and agreement with the closed forms for c, D and g.
pub fn verify_regularity(g: &CachingLineGraph) -> ValidationReport {
    let mut r = ValidationReport {
        checked: vec![Condition::Regularity],
        violations: Vec::new(),
    };
    let pc = predicted_counts(g.params());
    let want_c = pc.subfile_clique.to_usize();
    let want_d = pc.user_clique.to_usize();
    for (f, c) in g.subfile_cliques.iter().enumerate() {
        if Some(c.len()) != want_c {
            r.fail(Condition::Regularity, format!("|C_X| = {} for subfile {f}, formula {}", c.len(), pc.subfile_clique));
        }
    }
    for (u, c) in g.user_cliques.iter().enumerate() {
        if Some(c.len()) != want_d {
            r.fail(Condition::Regularity, format!("|C_V| = {} for user {u}, formula {}", c.len(), pc.user_clique));
        }
    }
    let want_g = pc.sets_per_flat.to_usize();
    for (pi, n) in g.universe.subfiles_per_flat().into_iter().enumerate() {
        if Some(n) != want_g {
            r.fail(Condition::Regularity, format!("{n} subfiles sum to flat {pi}, formula g = {}", pc.sets_per_flat));
        }
    }
    if BigUint::from(g.num_users()) != pc.users {
        r.fail(Condition::Regularity, format!("K = {}, formula {}", g.num_users(), pc.users));
    }
    r
}

/// Transmission cliques are complement-square cliques of size m+2 that
/// partition the vertex set.
pub fn verify_transmission_cliques(g: &CachingLineGraph) -> ValidationReport {
    use Condition::*;
    let mut r = ValidationReport {
        checked: vec![TransmissionCliques, TransmissionPartition],
        violations: Vec::new(),
    };
    let d = g.params().m + 2;
    let mut seen = vec![0u32; g.vertices.len()];
    for (i, clique) in g.transmission_cliques.iter().enumerate() {
        if clique.len() != d {
            r.fail(TransmissionCliques, format!("clique {i} has {} vertices, expected {d}", clique.len()));
        }
        for (a, &x) in clique.iter().enumerate() {
            let Some(slot) = seen.get_mut(x as usize) else {
                r.fail(TransmissionCliques, format!("clique {i} names missing vertex {x}"));
                continue;
            };
            *slot += 1;
            for &y in &clique[a + 1..] {
                if (y as usize) < g.vertices.len() && !g.is_compl_square_edge(g.vertex(x), g.vertex(y)).unwrap_or(false) {
                    r.fail(TransmissionCliques, format!("clique {i}: vertices {x} and {y} interfere"));
                }
            }
        }
    }
    for (id, &n) in seen.iter().enumerate() {
        if n != 1 {
            r.fail(TransmissionPartition, format!("vertex {id} covered {n} times"));
        }
    }
    if !g.vertices.is_empty() && BigUint::from(g.transmission_cliques.len()) * BigUint::from(d) != BigUint::from(g.vertices.len()) {
        r.fail(
            TransmissionPartition,
            format!("{} cliques of size {d} for {} vertices", g.transmission_cliques.len(), g.vertices.len()),
        );
    }
    r
}

/// All structural checks.
pub fn verify_all(g: &CachingLineGraph) -> ValidationReport {
    let mut r = verify_line_graph(g);
    r.merge(verify_regularity(g));
    r.merge(verify_transmission_cliques(g));
    r
}

impl PredictedCounts {
    pub fn is_empty(&self) -> bool {
        self.subfile_clique.is_zero()
    }
}
