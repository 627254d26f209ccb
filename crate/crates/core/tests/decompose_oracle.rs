use std::collections::{BTreeSet, HashMap};

use ffcomb::decompose::{
    max_ratio_closed_set, ratio_decompositions, shifted_coset, small_subgroup_dilate_check,
    sumset_decomposable_bruteforce, sumset_decompositions, DilateMode, SearchBudget,
};
use ffcomb::setops::{diffset, dilate, ratioset, sumset, translate};
use ffcomb::{FpSet, PrimeField};
use proptest::prelude::*;

fn witness_set(r: &ffcomb::decompose::DecompositionResult) -> Vec<(Vec<u32>, Vec<u32>)> {
    r.witnesses
        .iter()
        .map(|w| (w.b.to_vec(), w.c.to_vec()))
        .collect()
}

fn subsets(f: PrimeField, max: usize) -> impl Iterator<Item = FpSet> {
    let p = f.modulus();
    (0u32..1 << p)
        .filter(move |m| m.count_ones() as usize <= max)
        .map(move |m| {
            FpSet::from_elements(f, (0..p).filter(|i| m >> i & 1 == 1).map(u64::from)).unwrap()
        })
}

#[test]
fn all_small_subsets_of_f7_agree() {
    let f = PrimeField::new(7).unwrap();
    for a in subsets(f, 7) {
        let fast = sumset_decompositions(&a, true, SearchBudget::default());
        let slow = sumset_decomposable_bruteforce(&a).unwrap();
        assert!(fast.exhaustive);
        assert_eq!(witness_set(&fast), witness_set(&slow), "{a}");
    }
}

fn random_set() -> impl Strategy<Value = FpSet> {
    proptest::sample::select(vec![5u64, 7, 11, 13, 17, 19, 23, 29, 31]).prop_flat_map(|p| {
        proptest::collection::btree_set(0..p, 0..=12)
            .prop_map(move |xs| FpSet::from_elements(PrimeField::new(p).unwrap(), xs).unwrap())
    })
}

/// An `A` built as a sumset, so the reducible branch is exercised often.
fn planted_set() -> impl Strategy<Value = FpSet> {
    proptest::sample::select(vec![11u64, 13, 17, 19, 23, 29, 31]).prop_flat_map(|p| {
        (
            proptest::collection::btree_set(0..p, 2..=4),
            proptest::collection::btree_set(0..p, 2..=3),
        )
            .prop_filter_map("small enough", move |(b, c)| {
                let f = PrimeField::new(p).unwrap();
                let s = sumset(
                    &FpSet::from_elements(f, b).unwrap(),
                    &FpSet::from_elements(f, c).unwrap(),
                )
                .unwrap();
                (s.len() <= 12).then_some(s)
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn search_matches_oracle(a in random_set()) {
        let fast = sumset_decompositions(&a, true, SearchBudget::default());
        let slow = sumset_decomposable_bruteforce(&a).unwrap();
        prop_assert_eq!(witness_set(&fast), witness_set(&slow));
    }

    #[test]
    fn planted_sumsets_are_found(a in planted_set()) {
        let fast = sumset_decompositions(&a, true, SearchBudget::default());
        prop_assert!(fast.is_decomposable());
        prop_assert_eq!(witness_set(&fast), witness_set(&sumset_decomposable_bruteforce(&a).unwrap()));
        let first = sumset_decompositions(&a, false, SearchBudget::default());
        prop_assert_eq!(first.witnesses.len(), 1);
    }

    #[test]
    fn status_is_affine_invariant(a in planted_set(), t in 0u32..31, xi in 1u32..31) {
        let p = a.modulus();
        prop_assume!(xi % p != 0);
        let base = sumset_decompositions(&a, false, SearchBudget::default()).is_decomposable();
        let moved = dilate(&translate(&a, t), xi).unwrap();
        prop_assert_eq!(sumset_decompositions(&moved, false, SearchBudget::default()).is_decomposable(), base);
    }
}

/// `B/B ↦ {canonical B}` over every `B ⊆ F_p` with `1 ∈ B` and `|B \ {0}| > 1`.
fn ratio_oracle(f: PrimeField) -> HashMap<FpSet, BTreeSet<Vec<u32>>> {
    let p = f.modulus();
    let mut out: HashMap<FpSet, BTreeSet<Vec<u32>>> = HashMap::new();
    for m in 0u32..1 << p {
        let b = FpSet::from_elements(f, (0..p).filter(|i| m >> i & 1 == 1).map(u64::from)).unwrap();
        if b.without(0).len() < 2 || !b.contains(1) {
            continue;
        }
        let nz: Vec<u32> = b.without(0).to_vec();
        let canon = nz
            .iter()
            .map(|&k| {
                let ik = f.inv(k).unwrap();
                let mut v: Vec<u32> = nz.iter().map(|&x| f.mul(x, ik)).collect();
                v.sort_unstable();
                v
            })
            .min()
            .unwrap();
        let mut v = canon;
        if b.contains(0) {
            v.insert(0, 0);
        }
        out.entry(ratioset(&b, &b, true).unwrap())
            .or_default()
            .insert(v);
    }
    out
}

#[test]
fn ratio_search_matches_subset_oracle() {
    for p in [5u64, 7, 11, 13] {
        let f = PrimeField::new(p).unwrap();
        let mut targets = BTreeSet::new();
        for d in f.subgroup_orders() {
            let g = f.subgroup(d as u64).unwrap();
            for xi in 1..p as u32 {
                targets.insert(shifted_coset(&g, xi).unwrap());
            }
        }
        let oracle = ratio_oracle(f);
        targets.extend(oracle.keys().cloned());
        for s in targets {
            let r = ratio_decompositions(&s, true, SearchBudget::default());
            assert!(r.exhaustive);
            let got: BTreeSet<Vec<u32>> = r.witnesses.iter().map(|w| w.b.to_vec()).collect();
            assert_eq!(got, oracle.get(&s).cloned().unwrap_or_default(), "S = {s}");
        }
    }
}

#[test]
fn maxset_matches_subset_oracle() {
    for p in [5u64, 7, 11, 13] {
        let f = PrimeField::new(p).unwrap();
        for d in f.subgroup_orders() {
            let g = f.subgroup(d as u64).unwrap();
            for xi in 1..p as u32 {
                let s = shifted_coset(&g, xi).unwrap();
                let mut best: Option<FpSet> = None;
                for m in 0u32..1 << (p - 1) {
                    let a = FpSet::from_elements(
                        f,
                        (0..p as u32 - 1)
                            .filter(|i| m >> i & 1 == 1)
                            .map(|i| i as u64 + 1),
                    )
                    .unwrap();
                    if a.is_empty() {
                        continue;
                    }
                    let ok = a
                        .iter()
                        .all(|x| a.iter().all(|y| x == y || s.contains(f.div(x, y).unwrap())));
                    let better = match &best {
                        None => true,
                        Some(b) => a.len() > b.len() || (a.len() == b.len() && a < *b),
                    };
                    if ok && better {
                        best = Some(a);
                    }
                }
                let r = max_ratio_closed_set(&g, xi, SearchBudget::default()).unwrap();
                assert!(r.exhaustive);
                assert_eq!(Some(r.set), best, "p={p} d={d} xi={xi}");
            }
        }
    }
}

#[test]
fn dilate_witnesses_are_sound() {
    for p in [7u64, 13, 19, 31, 37, 43] {
        let f = PrimeField::new(p).unwrap();
        for d in f.subgroup_orders() {
            let g = f.subgroup(d as u64).unwrap();
            let mut target = g.elements().clone();
            target = target.union(&FpSet::singleton(f, 0).unwrap()).unwrap();
            let cosets = small_subgroup_dilate_check(&g, DilateMode::SubgroupCosets);
            let any = small_subgroup_dilate_check(&g, DilateMode::AnySmall);
            for w in cosets.iter().chain(&any) {
                assert_eq!(dilate(&diffset(&w.a, &w.a).unwrap(), w.xi).unwrap(), target);
            }
            // a coset witness translated to contain 0 shows up among the arbitrary sets
            for w in &cosets {
                let m = w.a.min_element().unwrap();
                let shifted = translate(&w.a, f.neg(m));
                assert!(any.iter().any(|x| x.a == shifted && x.xi == w.xi));
            }
        }
    }
}
