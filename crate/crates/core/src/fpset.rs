//! Dense subsets of `F_p` and exact count tables indexed by `F_p ∪ {∞}`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::PrimeField;

const WORD: usize = 64;

/// A subset of `F_p` stored as a bit-vector of length `p` with a cached cardinality.
///
/// The textual form is the modulus followed by the sorted element list,
/// e.g. `13:{1,3,4,9,10,12}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FpSet {
    field: PrimeField,
    words: Vec<u64>,
    len: usize,
}

impl FpSet {
    pub fn empty(field: PrimeField) -> Self {
        let n = (field.modulus() as usize).div_ceil(WORD);
        Self {
            field,
            words: vec![0; n],
            len: 0,
        }
    }

    /// All of `F_p`.
    pub fn full(field: PrimeField) -> Self {
        Self::from_iter_unchecked(field, 0..field.modulus())
    }

    pub fn singleton(field: PrimeField, x: u32) -> Result<Self> {
        Self::from_elements(field, [x as u64])
    }

    /// Builds a set from residues, rejecting anything outside `[0, p)`.
    pub fn from_elements<I: IntoIterator<Item = u64>>(field: PrimeField, xs: I) -> Result<Self> {
        let mut s = Self::empty(field);
        for x in xs {
            if x >= field.modulus() as u64 {
                return Err(Error::ElementOutOfRange {
                    x,
                    p: field.modulus(),
                });
            }
            s.insert(x as u32);
        }
        Ok(s)
    }

    /// Builds a set from values already known to be reduced.
    pub(crate) fn from_iter_unchecked<I: IntoIterator<Item = u32>>(
        field: PrimeField,
        xs: I,
    ) -> Self {
        let mut s = Self::empty(field);
        for x in xs {
            s.insert(x);
        }
        s
    }

    /// Builds a set from arbitrary integers, reducing each modulo `p`.
    pub fn from_reduced<I: IntoIterator<Item = u64>>(field: PrimeField, xs: I) -> Self {
        Self::from_iter_unchecked(field, xs.into_iter().map(|x| field.reduce(x)))
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    #[inline]
    pub fn modulus(&self) -> u32 {
        self.field.modulus()
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn contains(&self, x: u32) -> bool {
        let x = x as usize;
        x < self.field.modulus() as usize && self.words[x / WORD] >> (x % WORD) & 1 == 1
    }

    pub(crate) fn insert(&mut self, x: u32) -> bool {
        debug_assert!(x < self.field.modulus());
        let (w, b) = (x as usize / WORD, x as usize % WORD);
        let fresh = self.words[w] >> b & 1 == 0;
        if fresh {
            self.words[w] |= 1 << b;
            self.len += 1;
        }
        fresh
    }

    pub(crate) fn remove(&mut self, x: u32) -> bool {
        let (w, b) = (x as usize / WORD, x as usize % WORD);
        let present = self.words[w] >> b & 1 == 1;
        if present {
            self.words[w] &= !(1 << b);
            self.len -= 1;
        }
        present
    }

    /// Elements in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros();
                w &= w - 1;
                Some((wi * WORD) as u32 + b)
            })
        })
    }

    pub fn to_vec(&self) -> Vec<u32> {
        self.iter().collect()
    }

    pub fn min_element(&self) -> Option<u32> {
        self.iter().next()
    }

    pub(crate) fn from_words(field: PrimeField, words: Vec<u64>) -> Self {
        let len = words.iter().map(|w| w.count_ones() as usize).sum();
        Self { field, words, len }
    }

    pub fn same_field(&self, other: &FpSet) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch {
                left: self.modulus(),
                right: other.modulus(),
            });
        }
        Ok(())
    }

    fn zip_words(&self, other: &FpSet, op: impl Fn(u64, u64) -> u64) -> Result<FpSet> {
        self.same_field(other)?;
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(&a, &b)| op(a, b))
            .collect();
        Ok(Self::from_words(self.field, words))
    }

    pub fn union(&self, other: &FpSet) -> Result<FpSet> {
        self.zip_words(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &FpSet) -> Result<FpSet> {
        self.zip_words(other, |a, b| a & b)
    }

    /// Set difference `self \ other`.
    pub fn difference(&self, other: &FpSet) -> Result<FpSet> {
        self.zip_words(other, |a, b| a & !b)
    }

    pub fn is_subset(&self, other: &FpSet) -> Result<bool> {
        self.same_field(other)?;
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .all(|(&a, &b)| a & !b == 0))
    }

    pub fn complement(&self) -> FpSet {
        let full = FpSet::full(self.field);
        full.difference(self).expect("same field")
    }

    pub fn without(&self, x: u32) -> FpSet {
        let mut s = self.clone();
        s.remove(x);
        s
    }
}

impl PartialOrd for FpSet {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FpSet {
    /// Modulus first, then the sorted element lists lexicographically.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.modulus()
            .cmp(&other.modulus())
            .then_with(|| self.iter().cmp(other.iter()))
    }
}

impl fmt::Display for FpSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{{", self.modulus())?;
        for (i, x) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for FpSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parses a comma-separated residue list such as `1,5,8,12` (empty string is the empty set).
pub fn parse_residues(s: &str) -> Result<Vec<u64>> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<u64>()
                .map_err(|e| Error::Parse(format!("bad residue {t:?}: {e}")))
        })
        .collect()
}

impl FromStr for FpSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (p, body) = s
            .trim()
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("expected `p:{{...}}`, got {s:?}")))?;
        let p: u64 = p
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("bad modulus {p:?}: {e}")))?;
        let body = body
            .trim()
            .strip_prefix('{')
            .and_then(|b| b.strip_suffix('}'))
            .ok_or_else(|| Error::Parse(format!("expected braces in {s:?}")))?;
        let field = PrimeField::with_limit(p, crate::field::MAX_MODULUS_LIMIT)?;
        FpSet::from_elements(field, parse_residues(body)?)
    }
}

impl Serialize for FpSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FpSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Exact nonnegative counts indexed by `F_p`, plus a slot for the point at infinity.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CountTable {
    field: PrimeField,
    counts: Vec<u64>,
    infinity: u64,
}

impl CountTable {
    pub fn zeros(field: PrimeField) -> Self {
        Self {
            field,
            counts: vec![0; field.modulus() as usize],
            infinity: 0,
        }
    }

    pub(crate) fn from_parts(field: PrimeField, counts: Vec<u64>, infinity: u64) -> Self {
        debug_assert_eq!(counts.len(), field.modulus() as usize);
        Self {
            field,
            counts,
            infinity,
        }
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    #[inline]
    pub fn get(&self, x: u32) -> u64 {
        self.counts[x as usize]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    #[inline]
    pub fn infinity_count(&self) -> u64 {
        self.infinity
    }

    /// Sum over finite slots only.
    pub fn finite_mass(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Finite mass plus the infinity slot.
    pub fn total_mass(&self) -> u64 {
        self.finite_mass() + self.infinity
    }

    /// `Σ_x count(x)^2` over finite `x`.
    pub fn sum_of_squares(&self) -> u128 {
        self.counts.iter().fold(0u128, |acc, &c| {
            let sq = (c as u128).checked_mul(c as u128).expect("count overflow");
            acc.checked_add(sq).expect("count overflow")
        })
    }

    /// Finite points with a positive count.
    pub fn support(&self) -> FpSet {
        FpSet::from_iter_unchecked(
            self.field,
            self.counts
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(x, _)| x as u32),
        )
    }
}
