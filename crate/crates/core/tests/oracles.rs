//! Fast paths against naive enumeration.

use std::collections::HashMap;

use ffcomb::incidence::{
    q_fn, quad_count_geometric, quad_count_q, t_fn, triple_count, triple_support,
};
use ffcomb::setops::{
    additive_energy, diffset, dilate, energy4, productset, ratioset, rep_fn, sumset, translate,
    RepOp,
};
use ffcomb::{FpSet, PrimeField};
use proptest::prelude::*;

const PRIMES: [u64; 8] = [5, 7, 11, 13, 17, 19, 23, 31];

fn set_in(p: u64, max: usize) -> impl Strategy<Value = FpSet> {
    proptest::collection::btree_set(0..p, 0..=max)
        .prop_map(move |xs| FpSet::from_elements(PrimeField::new(p).unwrap(), xs).unwrap())
}

fn sets(n: usize, max: usize) -> impl Strategy<Value = Vec<FpSet>> {
    proptest::sample::select(PRIMES.to_vec())
        .prop_flat_map(move |p| proptest::collection::vec(set_in(p, max), n))
}

fn det(a: (i64, i64), b: (i64, i64), c: (i64, i64), p: i64) -> i64 {
    ((b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)).rem_euclid(p)
}

fn points(s: &FpSet) -> Vec<(i64, i64)> {
    let v: Vec<i64> = s.iter().map(i64::from).collect();
    v.iter()
        .flat_map(|&x| v.iter().map(move |&y| (x, y)))
        .collect()
}

/// Direct count of collinear `(P_a, P_b, P_c)` via the determinant.
fn naive_triples(a: &FpSet, b: &FpSet, c: &FpSet) -> u128 {
    let p = a.modulus() as i64;
    let (pa, pb, pc) = (points(a), points(b), points(c));
    let mut n = 0;
    for &x in &pa {
        for &y in &pb {
            for &z in &pc {
                n += (det(x, y, z, p) == 0) as u128;
            }
        }
    }
    n
}

/// Four points are collinear iff every triple among them is.
fn naive_quads(a: &FpSet, b: &FpSet, c: &FpSet, d: &FpSet) -> u128 {
    let p = a.modulus() as i64;
    let (pa, pb, pc, pd) = (points(a), points(b), points(c), points(d));
    let mut n = 0;
    for &w in &pa {
        for &x in &pb {
            for &y in &pc {
                if det(w, x, y, p) != 0 {
                    // w, x, y distinct-and-not-collinear: no line through all of them
                    continue;
                }
                for &z in &pd {
                    let ok = det(w, x, z, p) == 0 && det(w, y, z, p) == 0 && det(x, y, z, p) == 0;
                    n += ok as u128;
                }
            }
        }
    }
    n
}

fn naive_energy(a: &FpSet, b: &FpSet, c: &FpSet, d: &FpSet) -> u128 {
    let p = a.modulus();
    let mut n = 0;
    for x in a.iter() {
        for y in b.iter() {
            for z in c.iter() {
                for w in d.iter() {
                    n += ((x + y) % p == (z + w) % p) as u128;
                }
            }
        }
    }
    n
}

fn naive_q(a: &FpSet, b: &FpSet, c: &FpSet, d: &FpSet) -> (HashMap<(u32, u32), u64>, u64) {
    let f = a.field();
    let mut m = HashMap::new();
    let mut inf = 0;
    for x in a.iter() {
        for z in c.iter() {
            for y in b.iter() {
                for w in d.iter() {
                    if z == x {
                        inf += 1;
                        continue;
                    }
                    let r = f.div(f.sub(y, x), f.sub(z, x)).unwrap();
                    let s = f.div(f.sub(w, x), f.sub(z, x)).unwrap();
                    *m.entry((r, s)).or_insert(0) += 1;
                }
            }
        }
    }
    (m, inf)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn triples_match_determinant_count(v in sets(3, 5)) {
        let t = triple_count(&v[0], &v[1], &v[2]).unwrap();
        prop_assert_eq!(t.total, naive_triples(&v[0], &v[1], &v[2]));
        let tf = t_fn(&v[0], &v[1], &v[2]).unwrap();
        prop_assert_eq!(tf.total_mass() as usize, v[0].len() * v[1].len() * v[2].len());
    }

    #[test]
    fn quadruples_match_two_oracles(v in sets(4, 4)) {
        let q = quad_count_q(&v[0], &v[1], &v[2], &v[3]).unwrap().total;
        prop_assert_eq!(q, quad_count_geometric(&v[0], &v[1], &v[2], &v[3]).unwrap());
        prop_assert_eq!(q, naive_quads(&v[0], &v[1], &v[2], &v[3]));
    }

    #[test]
    fn q_table_matches_naive_loop(v in sets(4, 5)) {
        let q = q_fn(&v[0], &v[1], &v[2], &v[3]).unwrap();
        let (m, inf) = naive_q(&v[0], &v[1], &v[2], &v[3]);
        prop_assert_eq!(q.infinity_mass(), inf);
        prop_assert_eq!(q.support_size(), m.len());
        for ((x, y), c) in m {
            prop_assert_eq!(q.get(x, y), c);
        }
        // marginal over y is t_{A,B,C} scaled by |D|
        let t = t_fn(&v[0], &v[1], &v[2]).unwrap();
        let marg = q.marginal_x();
        for x in 0..v[0].modulus() {
            prop_assert_eq!(marg.get(x), t.get(x) * v[3].len() as u64);
        }
    }

    #[test]
    fn energies_match_enumeration(v in sets(4, 7)) {
        prop_assert_eq!(energy4(&v[0], &v[1], &v[2], &v[3]).unwrap(), naive_energy(&v[0], &v[1], &v[2], &v[3]));
        prop_assert_eq!(additive_energy(&v[0]), naive_energy(&v[0], &v[0], &v[0], &v[0]));
        prop_assert_eq!(energy4(&v[0], &v[0], &v[0], &v[0]).unwrap(), additive_energy(&v[0]));
    }

    #[test]
    fn rep_functions_conserve_mass(v in sets(2, 9)) {
        for op in [RepOp::Sum, RepOp::Diff, RepOp::Product, RepOp::Ratio] {
            let r = rep_fn(&v[0], &v[1], op).unwrap();
            prop_assert_eq!(r.total_mass() as usize, v[0].len() * v[1].len());
        }
        prop_assert_eq!(rep_fn(&v[0], &v[1], RepOp::Sum).unwrap().support(), sumset(&v[0], &v[1]).unwrap());
        prop_assert_eq!(rep_fn(&v[0], &v[1], RepOp::Product).unwrap().support(), productset(&v[0], &v[1]).unwrap());
    }

    #[test]
    fn cauchy_davenport(v in sets(2, 9)) {
        prop_assume!(!v[0].is_empty() && !v[1].is_empty());
        let p = v[0].modulus() as usize;
        prop_assert!(sumset(&v[0], &v[1]).unwrap().len() >= p.min(v[0].len() + v[1].len() - 1));
    }

    #[test]
    fn ratio_set_is_dilation_invariant(v in sets(1, 8), xi in 1u32..31) {
        let a = &v[0];
        let xi = xi % a.modulus();
        prop_assume!(xi != 0 && a.iter().any(|x| x != 0));
        let d = dilate(a, xi).unwrap();
        prop_assert_eq!(ratioset(&d, &d, true).unwrap(), ratioset(a, a, true).unwrap());
        prop_assert_eq!(ratioset(&d, &d, false).unwrap(), ratioset(a, a, false).unwrap());
    }

    #[test]
    fn difference_set_is_translation_invariant(v in sets(1, 8), t in 0u32..31) {
        let a = &v[0];
        prop_assert_eq!(diffset(&translate(a, t), &translate(a, t)).unwrap(), diffset(a, a).unwrap());
    }

    #[test]
    fn support_of_t_is_symmetric_under_one_minus(v in sets(2, 6)) {
        let s = triple_support(&v[0], &v[1], &v[0]).unwrap();
        let f = s.field();
        let flipped = FpSet::from_elements(f, s.iter().map(|x| f.sub(1, x) as u64)).unwrap();
        prop_assert_eq!(flipped, s);
    }
}

#[test]
fn subgroups_are_closed_and_partition_cosets() {
    for p in PRIMES {
        let f = PrimeField::new(p).unwrap();
        for d in f.subgroup_orders() {
            let g = f.subgroup(d as u64).unwrap();
            assert_eq!(
                productset(g.elements(), g.elements()).unwrap(),
                *g.elements()
            );
            let mut seen = FpSet::empty(f);
            for xi in 1..p as u32 {
                let c = g.coset(xi).unwrap();
                assert_eq!(c.len(), d as usize);
                seen = seen.union(&c).unwrap();
            }
            assert_eq!(seen.len(), p as usize - 1);
            assert_eq!(g.contains(p as u32 - 1), d % 2 == 0);
        }
    }
}
