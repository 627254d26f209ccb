//! Exact searches for `A = B + C`, `S = B/B`, sets with `A/A ⊆ ξΓ + 1`, and
//! dilated difference sets of tiny subgroups.
//!
//! Additive witnesses are *maximal* pairs: `C = {c : B + c ⊆ A}` and
//! `B = {b : b + C ⊆ A}`. Every decomposition `B₀ + C₀ = A` sits inside exactly
//! such a pair, so `A` is reducible iff a maximal witness exists. Pairs are
//! normalized so that `0 ∈ C` (hence `B ⊆ A`) and, among the translates
//! `(B + c, C − c)` with `c ∈ C`, the one with the lexicographically smallest
//! `B` is kept.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{PrimeField, Subgroup};
use crate::fpset::FpSet;
use crate::setops::{diffset, dilate, ratioset, sumset};

/// Default node cap for the backtracking searches.
pub const DEFAULT_NODE_BUDGET: u64 = 100_000_000;

/// Largest target accepted by [`sumset_decomposable_bruteforce`].
pub const BRUTEFORCE_LIMIT: usize = 12;

/// Largest modulus accepted by [`max_ratio_closed_set`].
pub const MAXSET_MODULUS_LIMIT: u32 = 512;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_nodes: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            max_nodes: DEFAULT_NODE_BUDGET,
        }
    }
}

impl SearchBudget {
    pub fn nodes(max_nodes: u64) -> Self {
        Self { max_nodes }
    }
}

/// A witness pair. Ratio witnesses store `C = B`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Witness {
    #[serde(rename = "B")]
    pub b: FpSet,
    #[serde(rename = "C")]
    pub c: FpSet,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompositionResult {
    pub target: FpSet,
    pub witnesses: Vec<Witness>,
    /// False iff the node budget cut the search short.
    pub exhaustive: bool,
    pub nodes_explored: u64,
    /// Whole milliseconds, so the JSON form round-trips.
    pub wall_time: Duration,
}

#[derive(Serialize, Deserialize)]
struct ResultRepr {
    target: FpSet,
    p: u32,
    witnesses: Vec<Witness>,
    exhaustive: bool,
    nodes: u64,
    ms: u64,
}

impl Serialize for DecompositionResult {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ResultRepr {
            target: self.target.clone(),
            p: self.target.modulus(),
            witnesses: self.witnesses.clone(),
            exhaustive: self.exhaustive,
            nodes: self.nodes_explored,
            ms: self.wall_time.as_millis() as u64,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DecompositionResult {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = ResultRepr::deserialize(d)?;
        if r.p != r.target.modulus() {
            return Err(serde::de::Error::custom(
                "p does not match the target modulus",
            ));
        }
        Ok(Self {
            target: r.target,
            witnesses: r.witnesses,
            exhaustive: r.exhaustive,
            nodes_explored: r.nodes,
            wall_time: Duration::from_millis(r.ms),
        })
    }
}

impl DecompositionResult {
    pub fn is_decomposable(&self) -> bool {
        !self.witnesses.is_empty()
    }

    fn finish(
        target: &FpSet,
        witnesses: Vec<Witness>,
        exhaustive: bool,
        nodes: u64,
        start: Instant,
    ) -> Self {
        let mut witnesses = witnesses;
        witnesses.sort();
        witnesses.dedup();
        Self {
            target: target.clone(),
            witnesses,
            exhaustive,
            nodes_explored: nodes,
            wall_time: Duration::from_millis(start.elapsed().as_millis() as u64),
        }
    }
}

/// Growable bitset over small index ranges.
#[derive(Clone, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn zeros(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }

    fn ones(n: usize) -> Self {
        let mut b = Self::zeros(n);
        for i in 0..n {
            b.set(i);
        }
        b
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    fn and(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }

    fn is_subset(&self, o: &Bits) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a & !b == 0)
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + b)
            })
        })
    }

    /// Agreement on the indices `< j`.
    fn prefix_eq(&self, o: &Bits, j: usize) -> bool {
        let full = j / 64;
        if self.0[..full] != o.0[..full] {
            return false;
        }
        let rem = j % 64;
        rem == 0 || (self.0[full] ^ o.0[full]) & ((1u64 << rem) - 1) == 0
    }
}

/// Whether some `|B|, |C| ≥ 2` is compatible with `|A|` under Cauchy–Davenport.
pub fn cauchy_davenport_allows(n: usize, p: u32) -> bool {
    (2..=n).any(|b| (2..=n).any(|c| (b + c - 1).min(p as usize) <= n && n <= b * c))
}

fn translate_vec(f: PrimeField, xs: &[u32], t: u32) -> Vec<u32> {
    let mut v: Vec<u32> = xs.iter().map(|&x| f.add(x, t)).collect();
    v.sort_unstable();
    v
}

/// `(B, C)` with `0 ∈ C` is canonical when no translate `(B + c, C − c)`, `c ∈ C`, has a smaller `B`.
fn is_canonical_translate(f: PrimeField, b: &[u32], c: &[u32]) -> bool {
    c.iter().all(|&t| translate_vec(f, b, t).as_slice() >= b)
}

/// Canonical representative of the translate class of a witness with `0 ∈ C`.
pub fn canonical_sum_pair(b: &FpSet, c: &FpSet) -> Witness {
    let f = b.field();
    let bv = b.to_vec();
    let cv = c.to_vec();
    let t = cv
        .iter()
        .copied()
        .min_by_key(|&t| translate_vec(f, &bv, t))
        .expect("nonempty co-factor");
    Witness {
        b: FpSet::from_iter_unchecked(f, bv.iter().map(|&x| f.add(x, t))),
        c: FpSet::from_iter_unchecked(f, cv.iter().map(|&x| f.sub(x, t))),
    }
}

fn verify_sum_witness(target: &FpSet, w: &Witness) {
    assert!(
        w.b.len() > 1 && w.c.len() > 1,
        "witness factors must have two elements"
    );
    assert_eq!(
        &sumset(&w.b, &w.c).expect("same field"),
        target,
        "witness must sum to the target"
    );
    assert!(w.c.contains(0), "witness must be normalized with 0 ∈ C");
    assert!(w.b.len() * w.c.len() >= target.len(), "|B||C| ≥ |B + C|");
}

/// All maximal decompositions `A = B + C` with `|B|, |C| > 1`, one per translate class.
///
/// Closed-set enumeration over `B ⊆ A`: `C(B) = ∩_{b∈B} (A − b)` and the closure
/// of `B` is `{a ∈ A : a + C(B) ⊆ A}`. Each closed `B` is visited once by the
/// prefix-canonicity rule. Subtrees are cut when `C(B)` drops below two
/// elements or when every reachable `B'` together with `C(B)` cannot cover `A`.
pub fn sumset_decompositions(
    a: &FpSet,
    find_all: bool,
    budget: SearchBudget,
) -> DecompositionResult {
    let start = Instant::now();
    let f = a.field();
    let n = a.len();
    if !cauchy_davenport_allows(n, f.modulus()) {
        return DecompositionResult::finish(a, Vec::new(), true, 0, start);
    }
    let elems = a.to_vec();
    let universe = diffset(a, a).expect("same field").to_vec();
    let shifted: Vec<Bits> = elems
        .iter()
        .map(|&ai| {
            let mut b = Bits::zeros(universe.len());
            for (k, &u) in universe.iter().enumerate() {
                if a.contains(f.add(u, ai)) {
                    b.set(k);
                }
            }
            b
        })
        .collect();
    let index_of = |x: u32| elems.binary_search(&x).ok();

    struct Search<'s> {
        f: PrimeField,
        n: usize,
        elems: &'s [u32],
        universe: &'s [u32],
        shifted: &'s [Bits],
        index_of: &'s dyn Fn(u32) -> Option<usize>,
        find_all: bool,
        max_nodes: u64,
        nodes: u64,
        exhausted: bool,
        witnesses: Vec<Witness>,
    }

    impl Search<'_> {
        fn closure(&self, c: &Bits) -> Bits {
            let mut d = Bits::zeros(self.n);
            for (i, s) in self.shifted.iter().enumerate() {
                if c.is_subset(s) {
                    d.set(i);
                }
            }
            d
        }

        /// Whether `{b ∈ B'} + C` can reach every element of `A` for some `B' ⊆ pot`.
        fn covers(&self, pot: impl Iterator<Item = usize>, c: &Bits) -> bool {
            let mut hit = Bits::zeros(self.n);
            let cv: Vec<u32> = c.iter().map(|k| self.universe[k]).collect();
            for i in pot {
                for &t in &cv {
                    if let Some(j) = (self.index_of)(self.f.add(self.elems[i], t)) {
                        hit.set(j);
                    }
                }
            }
            hit.count() == self.n
        }

        fn done(&self) -> bool {
            self.exhausted || (!self.find_all && !self.witnesses.is_empty())
        }

        fn visit(&mut self, b: &Bits, c: &Bits, y: usize) {
            self.nodes += 1;
            if self.nodes > self.max_nodes {
                self.exhausted = true;
                return;
            }
            let (nb, nc) = (b.count(), c.count());
            if nb >= 2 && nc >= 2 && self.covers(b.iter(), c) {
                let bv: Vec<u32> = b.iter().map(|i| self.elems[i]).collect();
                let cv: Vec<u32> = c.iter().map(|k| self.universe[k]).collect();
                if is_canonical_translate(self.f, &bv, &cv) {
                    self.witnesses.push(Witness {
                        b: FpSet::from_iter_unchecked(self.f, bv),
                        c: FpSet::from_iter_unchecked(self.f, cv),
                    });
                    if !self.find_all {
                        return;
                    }
                }
            }
            for j in y..self.n {
                if self.done() {
                    return;
                }
                if b.get(j) {
                    continue;
                }
                let c2 = c.and(&self.shifted[j]);
                if c2.count() < 2 {
                    continue;
                }
                let d = self.closure(&c2);
                if !d.prefix_eq(b, j) {
                    continue;
                }
                let pot = d.iter().filter(|&i| i <= j).chain(j + 1..self.n);
                if !self.covers(pot, &c2) {
                    continue;
                }
                self.visit(&d, &c2, j + 1);
            }
        }
    }

    let mut search = Search {
        f,
        n,
        elems: &elems,
        universe: &universe,
        shifted: &shifted,
        index_of: &index_of,
        find_all,
        max_nodes: budget.max_nodes,
        nodes: 0,
        exhausted: false,
        witnesses: Vec::new(),
    };
    let all = Bits::ones(universe.len());
    let root = search.closure(&all);
    search.visit(&root, &all, 0);

    for w in &search.witnesses {
        verify_sum_witness(a, w);
    }
    DecompositionResult::finish(a, search.witnesses, !search.exhausted, search.nodes, start)
}

/// Subset-pair oracle: every `B ⊆ A` with its full co-factor `C = {c ∈ F_p : B + c ⊆ A}`
/// found by scanning all of `F_p`.
pub fn sumset_decomposable_bruteforce(a: &FpSet) -> Result<DecompositionResult> {
    let start = Instant::now();
    if a.len() > BRUTEFORCE_LIMIT {
        return Err(Error::OracleLimit(format!(
            "subset-pair enumeration needs |A| <= {BRUTEFORCE_LIMIT}, got {}",
            a.len()
        )));
    }
    let f = a.field();
    let p = f.modulus();
    let elems = a.to_vec();
    let fits = |xs: &[u32], t: u32| xs.iter().all(|&x| a.contains(f.add(x, t)));
    let mut found = BTreeSet::new();
    let mut nodes = 0u64;
    for mask in 0u32..(1 << elems.len()) {
        if mask.count_ones() < 2 {
            continue;
        }
        nodes += 1;
        let bv: Vec<u32> = (0..elems.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| elems[i])
            .collect();
        let cv: Vec<u32> = (0..p).filter(|&t| fits(&bv, t)).collect();
        if cv.len() < 2 {
            continue;
        }
        let b = FpSet::from_iter_unchecked(f, bv.iter().copied());
        let c = FpSet::from_iter_unchecked(f, cv.iter().copied());
        if &sumset(&b, &c)? != a {
            continue;
        }
        let maximal: Vec<u32> = (0..p)
            .filter(|&x| cv.iter().all(|&t| a.contains(f.add(x, t))))
            .collect();
        if maximal != bv {
            continue;
        }
        found.insert(canonical_sum_pair(&b, &c));
    }
    let witnesses: Vec<Witness> = found.into_iter().collect();
    for w in &witnesses {
        verify_sum_witness(a, w);
    }
    Ok(DecompositionResult::finish(
        a, witnesses, true, nodes, start,
    ))
}

fn verify_ratio_witness(target: &FpSet, w: &Witness) {
    assert_eq!(w.b, w.c);
    assert!(w.b.without(0).len() > 1, "|B \\ {{0}}| > 1");
    assert!(w.b.contains(1), "ratio witnesses are normalized with 1 ∈ B");
    assert_eq!(
        &ratioset(&w.b, &w.b, true).expect("nonzero element"),
        target,
        "B/B must equal S"
    );
}

/// Lexicographically least dilate `K·k⁻¹`, `k ∈ K`, of a set of nonzero residues.
fn canonical_dilate(f: PrimeField, k: &[u32]) -> Vec<u32> {
    k.iter()
        .map(|&x| {
            let ix = f.inv(x).expect("nonzero");
            let mut v: Vec<u32> = k.iter().map(|&y| f.mul(y, ix)).collect();
            v.sort_unstable();
            v
        })
        .min()
        .unwrap_or_default()
}

/// All `B` with `B/B = S` under the distinct-pair convention, one per dilation class.
///
/// `B \ {0}` is a clique containing `1` in the graph on `S \ {0}` with
/// `u ~ v ⇔ u/v ∈ S`; `0 ∈ B` exactly when `0 ∈ S`.
pub fn ratio_decompositions(
    s: &FpSet,
    find_all: bool,
    budget: SearchBudget,
) -> DecompositionResult {
    let start = Instant::now();
    let f = s.field();
    let star = s.without(0);
    let symmetric = star
        .iter()
        .all(|x| star.contains(f.inv(x).expect("nonzero")));
    if star.is_empty() || star.contains(1) || !symmetric {
        return DecompositionResult::finish(s, Vec::new(), true, 0, start);
    }
    let zero_in_b = s.contains(0);
    let cand = star.to_vec();
    let m = cand.len();
    let adj: Vec<Bits> = cand
        .iter()
        .map(|&u| {
            let mut row = Bits::zeros(m);
            for (j, &v) in cand.iter().enumerate() {
                if u != v && star.contains(f.div(u, v).expect("nonzero")) {
                    row.set(j);
                }
            }
            row
        })
        .collect();

    struct Search<'s> {
        f: PrimeField,
        star: &'s FpSet,
        cand: &'s [u32],
        adj: &'s [Bits],
        find_all: bool,
        max_nodes: u64,
        nodes: u64,
        exhausted: bool,
        found: Vec<Vec<u32>>,
    }

    impl Search<'_> {
        fn realized_covers(&self, pts: &[u32]) -> bool {
            let mut hit = FpSet::empty(self.f);
            for &u in pts {
                for &v in pts {
                    if u != v {
                        hit.insert(self.f.div(u, v).expect("nonzero"));
                    }
                }
            }
            self.star.is_subset(&hit).expect("same field")
        }

        fn visit(&mut self, clique: &mut Vec<u32>, p_set: &Bits) {
            self.nodes += 1;
            if self.nodes > self.max_nodes {
                self.exhausted = true;
                return;
            }
            if clique.len() >= 2 && self.realized_covers(clique) {
                let canon = canonical_dilate(self.f, clique);
                let mut sorted = clique.clone();
                sorted.sort_unstable();
                if canon == sorted {
                    self.found.push(sorted);
                    if !self.find_all {
                        return;
                    }
                }
            }
            let mut pot = clique.clone();
            pot.extend(p_set.iter().map(|j| self.cand[j]));
            let need = self.star.len();
            if pot.len() * (pot.len() - 1) < need || !self.realized_covers(&pot) {
                return;
            }
            for j in p_set.iter() {
                if self.exhausted || (!self.find_all && !self.found.is_empty()) {
                    return;
                }
                let mut next = p_set.and(&self.adj[j]);
                for i in 0..=j {
                    if next.get(i) {
                        next.0[i / 64] &= !(1 << (i % 64));
                    }
                }
                clique.push(self.cand[j]);
                self.visit(clique, &next);
                clique.pop();
            }
        }
    }

    let mut roots = Bits::zeros(m);
    for (j, &v) in cand.iter().enumerate() {
        // neighbours of 1: v ∈ S and 1/v ∈ S, the latter implied by symmetry
        if v != 1 && star.contains(v) {
            roots.set(j);
        }
    }
    let mut search = Search {
        f,
        star: &star,
        cand: &cand,
        adj: &adj,
        find_all,
        max_nodes: budget.max_nodes,
        nodes: 0,
        exhausted: false,
        found: Vec::new(),
    };
    search.visit(&mut vec![1], &roots);

    let witnesses: Vec<Witness> = search
        .found
        .into_iter()
        .map(|k| {
            let mut b = FpSet::from_iter_unchecked(f, k);
            if zero_in_b {
                b.insert(0);
            }
            Witness { b: b.clone(), c: b }
        })
        .collect();
    for w in &witnesses {
        verify_ratio_witness(s, w);
    }
    DecompositionResult::finish(s, witnesses, !search.exhausted, search.nodes, start)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaxSetResult {
    pub set: FpSet,
    pub xi: u32,
    pub gamma_order: u32,
    pub exhaustive: bool,
    pub nodes: u64,
}

/// The shifted coset `ξΓ + 1`.
pub fn shifted_coset(gamma: &Subgroup, xi: u32) -> Result<FpSet> {
    let f = gamma.field();
    let c = gamma.coset(xi)?;
    Ok(FpSet::from_iter_unchecked(f, c.iter().map(|x| f.add(x, 1))))
}

/// Lexicographically least maximum `A ⊆ F_p*` with `a/a' ∈ ξΓ + 1` for all distinct `a, a'`.
///
/// The compatibility graph is a Cayley graph on `F_p*`, so some maximum clique
/// has minimum `1`; the lexicographically least one always does.
pub fn max_ratio_closed_set(
    gamma: &Subgroup,
    xi: u32,
    budget: SearchBudget,
) -> Result<MaxSetResult> {
    let f = gamma.field();
    if f.modulus() > MAXSET_MODULUS_LIMIT {
        return Err(Error::Precondition(format!(
            "clique search needs p <= {MAXSET_MODULUS_LIMIT}, got {}",
            f.modulus()
        )));
    }
    let xi = xi % f.modulus();
    let s = shifted_coset(gamma, xi)?;
    let star = s.without(0);
    let cand: Vec<u32> = star
        .iter()
        .filter(|&x| x != 1 && star.contains(f.inv(x).expect("nonzero")))
        .collect();
    let m = cand.len();
    let adj: Vec<Bits> = cand
        .iter()
        .map(|&u| {
            let mut row = Bits::zeros(m);
            for (j, &v) in cand.iter().enumerate() {
                let (r, r2) = (f.div(u, v).unwrap(), f.div(v, u).unwrap());
                if u != v && star.contains(r) && star.contains(r2) {
                    row.set(j);
                }
            }
            row
        })
        .collect();

    let mut mc = MaxClique {
        adj: &adj,
        best: Vec::new(),
        nodes: 0,
        max_nodes: budget.max_nodes,
        exhausted: false,
    };
    mc.expand(&mut Vec::new(), Bits::ones(m));
    let omega = mc.best.len();
    let mut exhaustive = !mc.exhausted;
    let mut best = mc.best.clone();
    if exhaustive && omega > 0 {
        let mut lex = LexClique {
            adj: &adj,
            target: omega,
            nodes: mc.nodes,
            max_nodes: budget.max_nodes,
            found: None,
        };
        lex.search(&mut Vec::new(), &Bits::ones(m), 0);
        match lex.found {
            Some(v) => best = v,
            None => exhaustive = false,
        }
    }
    let nodes = mc.nodes;
    let mut set = FpSet::from_iter_unchecked(f, best.iter().map(|&j| cand[j]));
    set.insert(1);
    for x in set.iter() {
        for y in set.iter() {
            if x != y {
                assert!(
                    s.contains(f.div(x, y).unwrap()),
                    "maxset witness must have ratios in ξΓ + 1"
                );
            }
        }
    }
    Ok(MaxSetResult {
        set,
        xi,
        gamma_order: gamma.order(),
        exhaustive,
        nodes,
    })
}

/// Branch and bound with a greedy colouring bound.
struct MaxClique<'a> {
    adj: &'a [Bits],
    best: Vec<usize>,
    nodes: u64,
    max_nodes: u64,
    exhausted: bool,
}

impl MaxClique<'_> {
    fn colour_order(&self, p_set: &Bits) -> Vec<(usize, usize)> {
        let mut uncoloured: Vec<usize> = p_set.iter().collect();
        let mut out = Vec::with_capacity(uncoloured.len());
        let mut colour = 0;
        while !uncoloured.is_empty() {
            colour += 1;
            let mut rest = Vec::new();
            let mut class: Vec<usize> = Vec::new();
            for v in uncoloured {
                if class.iter().all(|&u| !self.adj[u].get(v)) {
                    class.push(v);
                    out.push((v, colour));
                } else {
                    rest.push(v);
                }
            }
            uncoloured = rest;
        }
        out
    }

    fn expand(&mut self, clique: &mut Vec<usize>, mut p_set: Bits) {
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            self.exhausted = true;
            return;
        }
        if clique.len() > self.best.len() {
            self.best = clique.clone();
        }
        let order = self.colour_order(&p_set);
        for &(v, colour) in order.iter().rev() {
            if self.exhausted || clique.len() + colour <= self.best.len() {
                return;
            }
            clique.push(v);
            self.expand(clique, p_set.and(&self.adj[v]));
            clique.pop();
            p_set.0[v / 64] &= !(1 << (v % 64));
        }
    }
}

/// First clique of a given size in ascending index order, which is the lexicographically least.
struct LexClique<'a> {
    adj: &'a [Bits],
    target: usize,
    nodes: u64,
    max_nodes: u64,
    found: Option<Vec<usize>>,
}

impl LexClique<'_> {
    fn search(&mut self, clique: &mut Vec<usize>, p_set: &Bits, from: usize) {
        if self.found.is_some() || self.nodes > self.max_nodes {
            return;
        }
        self.nodes += 1;
        if clique.len() == self.target {
            self.found = Some(clique.clone());
            return;
        }
        let avail: Vec<usize> = p_set.iter().filter(|&v| v >= from).collect();
        if clique.len() + avail.len() < self.target {
            return;
        }
        for v in avail {
            clique.push(v);
            self.search(clique, &p_set.and(&self.adj[v]), v + 1);
            clique.pop();
            if self.found.is_some() {
                return;
            }
        }
    }
}

/// Which sets `A` the dilate check ranges over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DilateMode {
    /// Multiplicative cosets `ηH` of subgroups `H` of order 2 or 3.
    SubgroupCosets,
    /// Every `A` of size 2 or 3 containing `0` (differences are translation invariant).
    AnySmall,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DilateWitness {
    #[serde(rename = "A")]
    pub a: FpSet,
    pub xi: u32,
}

/// Every `(A, ξ)` with `ξ(A − A) = Γ ⊔ {0}`, sorted.
pub fn small_subgroup_dilate_check(gamma: &Subgroup, mode: DilateMode) -> Vec<DilateWitness> {
    let f = gamma.field();
    let p = f.modulus();
    let mut target = gamma.elements().clone();
    if target.contains(0) {
        return Vec::new();
    }
    target.insert(0);
    let candidates: Vec<FpSet> = match mode {
        DilateMode::SubgroupCosets => [2u64, 3]
            .into_iter()
            .filter(|d| (p as u64 - 1).is_multiple_of(*d))
            .flat_map(|d| {
                let h = f.subgroup(d).expect("divisor");
                let mut seen = BTreeSet::new();
                (1..p).filter_map(move |eta| {
                    let c = h.coset(eta).expect("nonzero");
                    seen.insert(c.clone()).then_some(c)
                })
            })
            .collect(),
        DilateMode::AnySmall => {
            let mut v = Vec::new();
            for x in 1..p {
                v.push(FpSet::from_iter_unchecked(f, [0, x]));
                for y in x + 1..p {
                    v.push(FpSet::from_iter_unchecked(f, [0, x, y]));
                }
            }
            v
        }
    };
    let mut out = Vec::new();
    for a in candidates {
        let diff = diffset(&a, &a).expect("same field");
        if diff.len() != target.len() {
            continue;
        }
        for xi in 1..p {
            if dilate(&diff, xi).expect("nonzero") == target {
                out.push(DilateWitness { a: a.clone(), xi });
            }
        }
    }
    out.sort_by(|x, y| x.a.cmp(&y.a).then(x.xi.cmp(&y.xi)));
    out
}
