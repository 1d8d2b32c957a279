//! Closed-form counts against exhaustive enumeration.

mod common;

use std::sync::Arc;

use num_bigint::BigUint;
use pgcache::gf::{FieldElement, FieldSpec};
use pgcache::linegraph::{build_universe, predicted_counts, ConstructionParams, Limits};
use pgcache::projgeom::{
    count_generating_sets, count_intersecting, enumerate_subspaces, independent_subsets, q_binomial, SubspaceBasis,
};
use proptest::prelude::*;

use common::{construction_counts, intersect, Space};

fn big(x: usize) -> BigUint {
    BigUint::from(x)
}

#[test]
fn subspace_counts_match_gaussian_binomials() {
    for p in [2u32, 3] {
        for k in 1..=4 {
            let sp = Space::new(p, k);
            let field = Arc::new(FieldSpec::from_order(p as u64).unwrap());
            for d in 0..=k {
                let n = sp.subspaces(d).len();
                assert_eq!(big(n), q_binomial(k as u64, d as u64, p as u64), "q={p} k={k} d={d}");
                assert_eq!(enumerate_subspaces(&field, k, d).unwrap().len(), n);
            }
        }
    }
}

#[test]
fn intersection_counts_match_enumeration() {
    for p in [2u32, 3] {
        for k in 1..=4usize {
            let sp = Space::new(p, k);
            let by_dim: Vec<_> = (0..=k).map(|d| sp.subspaces(d)).collect();
            for s in 1..=k {
                let s_space = sp.span(&(0..s).map(|i| sp.unit(i)).collect::<Vec<_>>());
                for l in 0..=s {
                    let l_space = sp.span(&(0..l).map(|i| sp.unit(i)).collect::<Vec<_>>());
                    for (r, subs) in by_dim.iter().enumerate().skip(l.max(1)) {
                        let n = subs.iter().filter(|x| intersect(x, &s_space) == l_space).count();
                        let f = count_intersecting(k as u64, r as u64, s as u64, l as u64, p as u64).unwrap();
                        assert_eq!(big(n), f, "q={p} k={k} r={r} s={s} l={l}");
                    }
                }
            }
        }
    }
}

#[test]
fn superspace_counts() {
    let field = Arc::new(FieldSpec::from_order(3).unwrap());
    for k in 2..=4 {
        for w in 0..k {
            let base = SubspaceBasis::standard(&field, k, &(0..w).collect::<Vec<_>>()).unwrap();
            for d in w..=k {
                let got = base.enumerate_superspaces(d).unwrap();
                assert_eq!(big(got.len()), q_binomial((k - w) as u64, (d - w) as u64, 3));
                assert!(got.iter().all(|s| s.dim() == d && s.contains(&base).unwrap()));
            }
        }
    }
}

/// For every construction with k ≤ 5, q ∈ {2, 3} and at most 10^5 candidate
/// (m+1)-sets: K, c, D, g and F against exhaustive counts and against the
/// library's own enumeration.
#[test]
fn construction_counts_match_formulas() {
    let mut checked = 0;
    for p in [2u32, 3] {
        for k in 1..=5 {
            for t in 1..=k {
                for m in 0..=k - t {
                    let Some(o) = construction_counts(k, m, t, p, 100_000) else {
                        continue;
                    };
                    let cp = ConstructionParams::new(k, m, t, p as u64).unwrap();
                    let pc = predicted_counts(&cp);
                    let tag = format!("{cp}");
                    assert_eq!(big(o.users), pc.users, "{tag} K");
                    assert_eq!(big(o.subfiles), pc.subfiles, "{tag} F");
                    assert_eq!(big(o.flats), pc.flats, "{tag} flats");
                    assert_eq!(o.c.iter().map(|&x| big(x)).collect::<Vec<_>>(), vec![pc.subfile_clique.clone()], "{tag} c");
                    assert_eq!(o.d.iter().map(|&x| big(x)).collect::<Vec<_>>(), vec![pc.user_clique.clone()], "{tag} D");
                    assert_eq!(o.g.iter().map(|&x| big(x)).collect::<Vec<_>>(), vec![pc.sets_per_flat.clone()], "{tag} g");
                    let u = build_universe(&cp, &Limits::default()).unwrap();
                    assert_eq!(u.users().len(), o.users, "{tag}");
                    assert_eq!(u.subfiles().len(), o.subfiles, "{tag}");
                    assert!(u.subfiles_per_flat().iter().all(|&n| big(n) == pc.sets_per_flat), "{tag}");
                    checked += 1;
                }
            }
        }
    }
    assert!(checked >= 30, "only {checked} instances checked");
}

#[test]
fn generating_sets_match_enumeration() {
    // g': unordered (m+1)-sets of points A_i with W ⊕ ΣA_i = P, counted directly
    for p in [2u32, 3] {
        for (k, t, m) in [(3, 1, 1), (3, 2, 0), (4, 2, 1), (4, 1, 2), (4, 3, 0), (5, 2, 2)] {
            let sp = Space::new(p, k);
            let w_gens: Vec<u32> = (0..t - 1).map(|i| sp.unit(i)).collect();
            let w = sp.span(&w_gens);
            let big_p = sp.span(&(0..m + t).map(|i| sp.unit(i)).collect::<Vec<_>>());
            let points: Vec<_> = sp.subspaces(1).into_iter().filter(|a| common::contains(&big_p, a)).collect();
            let mut n = 0usize;
            for set in itertools::Itertools::combinations(0..points.len(), m + 1) {
                let mut gens = w_gens.clone();
                gens.extend(set.iter().map(|&i| points[i][1]));
                if sp.dim(&sp.span(&gens)) == m + t {
                    n += 1;
                }
            }
            let field = Arc::new(FieldSpec::from_order(p as u64).unwrap());
            let pb = SubspaceBasis::standard(&field, k, &(0..m + t).collect::<Vec<_>>()).unwrap();
            let wb = SubspaceBasis::standard(&field, k, &(0..t - 1).collect::<Vec<_>>()).unwrap();
            let g = count_generating_sets(&pb, &wb, m).unwrap();
            assert_eq!(big(n), g.g_prime, "q={p} k={k} t={t} m={m}");
            assert_eq!(&g.g * BigUint::from(p).pow(((t - 1) * (m + 1)) as u32), g.g_prime);
            assert_eq!(w.len(), (p as usize).pow(t as u32 - 1));
        }
    }
}

#[test]
fn independent_subsets_match_rank_filter() {
    let field = FieldSpec::from_order(3).unwrap();
    let pts: Vec<Vec<FieldElement>> = (1..27u32)
        .map(|c| (0..3).map(|i| field.element(c / 3u32.pow(i) % 3).unwrap()).collect())
        .filter(|v: &Vec<FieldElement>| v.iter().find(|e| !e.is_zero()).unwrap().value() == 1)
        .collect();
    assert_eq!(pts.len(), 13);
    let arc = Arc::new(field.clone());
    for size in 1..=4 {
        let got = independent_subsets(&field, &pts, size);
        let want: Vec<Vec<usize>> = itertools::Itertools::combinations(0..pts.len(), size)
            .filter(|s| {
                let rows: Vec<_> = s.iter().map(|&i| pts[i].clone()).collect();
                SubspaceBasis::span(&arc, 3, &rows).unwrap().dim() == size
            })
            .collect();
        assert_eq!(got, want, "size {size}");
    }
}

proptest! {
    #[test]
    fn q_binomial_sandwich(a in 1u64..12, b in 0u64..12, q in prop::sample::select(vec![2u64, 3, 4, 5, 7, 8, 9])) {
        prop_assume!(b <= a);
        let v = q_binomial(a, b, q);
        let qb = BigUint::from(q);
        prop_assert!(qb.pow(((a - b) * b) as u32) <= v);
        prop_assert!(v <= qb.pow(((a - b + 1) * b) as u32));
    }

    #[test]
    fn q_binomial_symmetry_and_pascal(a in 1u64..14, b in 1u64..14, q in 2u64..6) {
        prop_assume!(b < a);
        prop_assert_eq!(q_binomial(a, b, q), q_binomial(a, a - b, q));
        // [a, b] = [a-1, b-1] + q^b [a-1, b]
        let rhs = q_binomial(a - 1, b - 1, q) + BigUint::from(q).pow(b as u32) * q_binomial(a - 1, b, q);
        prop_assert_eq!(q_binomial(a, b, q), rhs);
    }

    #[test]
    fn canonical_form_ignores_generators(
        q in prop::sample::select(vec![2u64, 3, 4, 5]),
        k in 1usize..6,
        raw in prop::collection::vec(prop::collection::vec(0u32..64, 6), 1..5),
        scale in 1u32..64,
    ) {
        let field = Arc::new(FieldSpec::from_order(q).unwrap());
        let qn = q as u32;
        let rows: Vec<Vec<FieldElement>> = raw
            .iter()
            .map(|r| r[..k].iter().map(|&x| field.element(x % qn).unwrap()).collect())
            .collect();
        let a = SubspaceBasis::span(&field, k, &rows).unwrap();

        // reversed, first row scaled by a nonzero constant, plus a redundant sum
        let c = field.element(1 + scale % (qn - 1)).unwrap();
        let mut other: Vec<Vec<FieldElement>> = rows.iter().rev().cloned().collect();
        other[0] = other[0].iter().map(|&x| field.mul(c, x)).collect();
        let extra: Vec<FieldElement> = rows[0].iter().zip(rows.last().unwrap()).map(|(&x, &y)| field.add(x, y)).collect();
        other.push(extra);
        let b = SubspaceBasis::span(&field, k, &other).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert!(rows.iter().all(|r| a.contains_vector(r)));
        prop_assert_eq!(a.vectors().len(), (q as usize).pow(a.dim() as u32));
        // RREF: pivots strictly increase and pivot columns are unit columns
        let piv = a.pivots().to_vec();
        prop_assert!(piv.windows(2).all(|w| w[0] < w[1]));
        for (i, row) in a.rows().enumerate() {
            prop_assert_eq!(row[piv[i]], FieldElement::ONE);
            for (j, other) in a.rows().enumerate() {
                if i != j {
                    prop_assert!(other[piv[i]].is_zero());
                }
            }
        }
    }

    #[test]
    fn sum_and_intersection_dimensions(
        k in 2usize..6,
        ra in prop::collection::vec(prop::collection::vec(0u32..2, 6), 1..4),
        rb in prop::collection::vec(prop::collection::vec(0u32..2, 6), 1..4),
    ) {
        let field = Arc::new(FieldSpec::from_order(2).unwrap());
        let conv = |r: &Vec<Vec<u32>>| -> Vec<Vec<FieldElement>> {
            r.iter().map(|v| v[..k].iter().map(|&x| field.element(x).unwrap()).collect()).collect()
        };
        let a = SubspaceBasis::span(&field, k, &conv(&ra)).unwrap();
        let b = SubspaceBasis::span(&field, k, &conv(&rb)).unwrap();
        let s = a.sum(&b).unwrap();
        prop_assert_eq!(s.dim() + a.intersection_dim(&b).unwrap(), a.dim() + b.dim());
        prop_assert!(s.contains(&a).unwrap() && s.contains(&b).unwrap());

        // the same via vector sets
        let sp = Space::new(2, k);
        let code = |v: &[FieldElement]| v.iter().enumerate().map(|(i, x)| x.value() as u32 * sp.unit(i)).sum::<u32>();
        let va = sp.span(&conv(&ra).iter().map(|v| code(v)).collect::<Vec<_>>());
        let vb = sp.span(&conv(&rb).iter().map(|v| code(v)).collect::<Vec<_>>());
        prop_assert_eq!(sp.dim(&intersect(&va, &vb)), a.intersection_dim(&b).unwrap());
    }
}
