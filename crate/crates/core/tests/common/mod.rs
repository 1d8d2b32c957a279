//! Brute-force oracles over prime fields. Subspaces are sorted lists of
//! vector codes (base-p digits, coordinate i is digit i), built by closure,
//! so nothing here shares code with the library's echelon-form machinery.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;

#[derive(Clone, Copy, Debug)]
pub struct Space {
    pub p: u32,
    pub k: usize,
}

pub type Sub = Vec<u32>;

impl Space {
    pub fn new(p: u32, k: usize) -> Self {
        Space { p, k }
    }

    pub fn size(&self) -> u32 {
        self.p.pow(self.k as u32)
    }

    pub fn add(&self, mut a: u32, mut b: u32) -> u32 {
        let (mut out, mut place) = (0, 1);
        for _ in 0..self.k {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out
    }

    pub fn scale(&self, c: u32, mut a: u32) -> u32 {
        let (mut out, mut place) = (0, 1);
        for _ in 0..self.k {
            out += (c * (a % self.p) % self.p) * place;
            a /= self.p;
            place *= self.p;
        }
        out
    }

    pub fn unit(&self, i: usize) -> u32 {
        self.p.pow(i as u32)
    }

    pub fn span(&self, gens: &[u32]) -> Sub {
        let mut set: BTreeSet<u32> = BTreeSet::from([0]);
        for &g in gens {
            if set.contains(&g) {
                continue;
            }
            let cur: Vec<u32> = set.iter().copied().collect();
            for x in cur {
                for c in 1..self.p {
                    set.insert(self.add(x, self.scale(c, g)));
                }
            }
        }
        set.into_iter().collect()
    }

    pub fn dim(&self, s: &Sub) -> usize {
        let mut n = s.len() as u32;
        let mut d = 0;
        while n > 1 {
            n /= self.p;
            d += 1;
        }
        d
    }

    /// All d-dim subspaces containing `base`, grown one vector at a time.
    pub fn superspaces(&self, base: &Sub, d: usize) -> Vec<Sub> {
        let mut level: BTreeSet<Sub> = BTreeSet::from([base.clone()]);
        for _ in self.dim(base)..d {
            let mut next = BTreeSet::new();
            for s in &level {
                for v in 0..self.size() {
                    if s.binary_search(&v).is_err() {
                        let mut gens = s.clone();
                        gens.push(v);
                        next.insert(self.span(&gens));
                    }
                }
            }
            level = next;
        }
        level.into_iter().collect()
    }

    pub fn subspaces(&self, d: usize) -> Vec<Sub> {
        self.superspaces(&vec![0], d)
    }
}

pub fn intersect(a: &Sub, b: &Sub) -> Sub {
    a.iter().filter(|x| b.binary_search(x).is_ok()).copied().collect()
}

pub fn contains(big: &Sub, small: &Sub) -> bool {
    small.iter().all(|x| big.binary_search(x).is_ok())
}

/// Exhaustive counts for the construction with parameters (k, m, t, p).
#[derive(Debug)]
pub struct ConstructionCounts {
    pub users: usize,
    pub subfiles: usize,
    /// users missing each subfile, as a set of observed values
    pub c: BTreeSet<usize>,
    /// subfiles missed by each user
    pub d: BTreeSet<usize>,
    /// subfiles per flat
    pub g: BTreeSet<usize>,
    pub flats: usize,
}

pub fn candidate_sets(users: usize, size: usize) -> u128 {
    (0..size as u128).fold(1u128, |acc, i| acc * (users as u128 - i) / (i + 1))
}

/// `None` when the number of candidate (m+1)-sets exceeds `limit`.
pub fn construction_counts(k: usize, m: usize, t: usize, p: u32, limit: u128) -> Option<ConstructionCounts> {
    let sp = Space::new(p, k);
    let w_gens: Vec<u32> = (0..t - 1).map(|i| sp.unit(i)).collect();
    let w = sp.span(&w_gens);
    let users = sp.superspaces(&w, t);
    if candidate_sets(users.len(), m + 1) > limit {
        return None;
    }
    // one representative outside W per user
    let reps: Vec<u32> = users
        .iter()
        .map(|v| *v.iter().find(|x| w.binary_search(x).is_err()).unwrap())
        .collect();
    let mut per_flat: BTreeMap<Sub, usize> = BTreeMap::new();
    let mut missing_per_user = vec![0usize; users.len()];
    let mut c = BTreeSet::new();
    let mut subfiles = 0;
    for set in (0..users.len()).combinations(m + 1) {
        let mut gens = w_gens.clone();
        gens.extend(set.iter().map(|&i| reps[i]));
        let sum = sp.span(&gens);
        if sp.dim(&sum) != m + t {
            continue;
        }
        subfiles += 1;
        let mut missing = 0;
        for (u, &r) in reps.iter().enumerate() {
            if sum.binary_search(&r).is_err() {
                missing += 1;
                missing_per_user[u] += 1;
            }
        }
        c.insert(missing);
        *per_flat.entry(sum).or_default() += 1;
    }
    Some(ConstructionCounts {
        users: users.len(),
        subfiles,
        c,
        d: missing_per_user.into_iter().collect(),
        g: per_flat.values().copied().collect(),
        flats: per_flat.len(),
    })
}
