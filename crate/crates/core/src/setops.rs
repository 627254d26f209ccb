//! Arithmetic set operations, representation functions and energies.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fpset::{CountTable, FpSet};

/// The binary operation a representation function counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RepOp {
    Sum,
    Diff,
    Product,
    Ratio,
}

impl std::str::FromStr for RepOp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sum" => Ok(Self::Sum),
            "diff" => Ok(Self::Diff),
            "product" => Ok(Self::Product),
            "ratio" => Ok(Self::Ratio),
            _ => Err(Error::Parse(format!("unknown operation {s:?}"))),
        }
    }
}

fn pairwise(a: &FpSet, b: &FpSet, op: impl Fn(u32, u32) -> u32) -> Result<FpSet> {
    a.same_field(b)?;
    let bs = b.to_vec();
    Ok(FpSet::from_iter_unchecked(
        a.field(),
        a.iter()
            .flat_map(|x| bs.iter().map(move |&y| (x, y)))
            .map(|(x, y)| op(x, y)),
    ))
}

/// `A + B`.
pub fn sumset(a: &FpSet, b: &FpSet) -> Result<FpSet> {
    let f = a.field();
    pairwise(a, b, |x, y| f.add(x, y))
}

/// `A - B`.
pub fn diffset(a: &FpSet, b: &FpSet) -> Result<FpSet> {
    let f = a.field();
    pairwise(a, b, |x, y| f.sub(x, y))
}

/// `AB`.
pub fn productset(a: &FpSet, b: &FpSet) -> Result<FpSet> {
    let f = a.field();
    pairwise(a, b, |x, y| f.mul(x, y))
}

/// `A/B = {a/b : b != 0}`. With `exclude_diagonal`, pairs with `a = b` are skipped,
/// so `1` only appears when it is realized by two distinct elements (which never happens).
pub fn ratioset(a: &FpSet, b: &FpSet, exclude_diagonal: bool) -> Result<FpSet> {
    a.same_field(b)?;
    let f = a.field();
    if b.iter().all(|x| x == 0) {
        return Err(Error::ZeroElement("every denominator"));
    }
    let inv: Vec<(u32, u32)> = b
        .iter()
        .filter(|&y| y != 0)
        .map(|y| (y, f.inv(y).unwrap()))
        .collect();
    let mut out = FpSet::empty(f);
    for x in a.iter() {
        for &(y, iy) in &inv {
            if exclude_diagonal && x == y {
                continue;
            }
            out.insert(f.mul(x, iy));
        }
    }
    Ok(out)
}

/// `ξA`.
pub fn dilate(a: &FpSet, xi: u32) -> Result<FpSet> {
    let f = a.field();
    let xi = xi % f.modulus();
    if xi == 0 {
        return Err(Error::ZeroElement("dilation factor"));
    }
    Ok(FpSet::from_iter_unchecked(
        f,
        a.iter().map(|x| f.mul(x, xi)),
    ))
}

/// `A + x`.
pub fn translate(a: &FpSet, x: u32) -> FpSet {
    let f = a.field();
    let x = x % f.modulus();
    FpSet::from_iter_unchecked(f, a.iter().map(|y| f.add(y, x)))
}

/// `-A`.
pub fn negate(a: &FpSet) -> FpSet {
    let f = a.field();
    FpSet::from_iter_unchecked(f, a.iter().map(|y| f.neg(y)))
}

/// `A^{-1}`. Zero is an error unless `drop_zero` is set, in which case it is skipped.
pub fn inverse_set(a: &FpSet, drop_zero: bool) -> Result<FpSet> {
    if a.contains(0) && !drop_zero {
        return Err(Error::ZeroElement("element of an inverted set"));
    }
    let f = a.field();
    Ok(FpSet::from_iter_unchecked(
        f,
        a.iter().filter_map(|x| f.inv(x)),
    ))
}

/// Representation function `r_{A∘B}`. For `Ratio`, pairs with `b = 0` land in the infinity slot.
pub fn rep_fn(a: &FpSet, b: &FpSet, op: RepOp) -> Result<CountTable> {
    a.same_field(b)?;
    let f = a.field();
    let mut counts = vec![0u64; f.modulus() as usize];
    let mut infinity = 0u64;
    let bs = b.to_vec();
    match op {
        RepOp::Ratio => {
            let inv: Vec<Option<u32>> = bs.iter().map(|&y| f.inv(y)).collect();
            for x in a.iter() {
                for iy in &inv {
                    match iy {
                        Some(iy) => counts[f.mul(x, *iy) as usize] += 1,
                        None => infinity += 1,
                    }
                }
            }
        }
        _ => {
            for x in a.iter() {
                for &y in &bs {
                    let z = match op {
                        RepOp::Sum => f.add(x, y),
                        RepOp::Diff => f.sub(x, y),
                        RepOp::Product => f.mul(x, y),
                        RepOp::Ratio => unreachable!(),
                    };
                    counts[z as usize] += 1;
                }
            }
        }
    }
    let table = CountTable::from_parts(f, counts, infinity);
    assert_eq!(
        table.total_mass(),
        (a.len() * b.len()) as u64,
        "mass conservation"
    );
    Ok(table)
}

/// Additive energy `E⁺(A) = Σ r²_{A+A} = Σ r²_{A−A}`; both sums are computed and must agree.
pub fn additive_energy(a: &FpSet) -> u128 {
    let plus = rep_fn(a, a, RepOp::Sum)
        .expect("same field")
        .sum_of_squares();
    let minus = rep_fn(a, a, RepOp::Diff)
        .expect("same field")
        .sum_of_squares();
    assert_eq!(plus, minus, "Σ r²(A+A) must equal Σ r²(A−A)");
    plus
}

/// `E⁺(A,B,C,D) = #{(a,b,c,d) : a + b = c + d}`.
pub fn energy4(a: &FpSet, b: &FpSet, c: &FpSet, d: &FpSet) -> Result<u128> {
    a.same_field(c)?;
    let left = rep_fn(a, b, RepOp::Sum)?;
    let right = rep_fn(c, d, RepOp::Sum)?;
    Ok(left
        .counts()
        .iter()
        .zip(right.counts())
        .map(|(&x, &y)| x as u128 * y as u128)
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeField;

    fn set(p: u64, xs: &[u64]) -> FpSet {
        FpSet::from_elements(PrimeField::new(p).unwrap(), xs.iter().copied()).unwrap()
    }

    #[test]
    fn sumset_examples() {
        assert_eq!(
            sumset(&set(7, &[1, 2]), &set(7, &[3, 5])).unwrap().to_vec(),
            vec![0, 4, 5, 6]
        );
        assert_eq!(
            sumset(&set(13, &[0, 4]), &set(13, &[1, 8]))
                .unwrap()
                .to_vec(),
            vec![1, 5, 8, 12]
        );
        let a = set(11, &[2, 3, 7]);
        assert_eq!(sumset(&a, &set(11, &[0])).unwrap(), a);
        assert!(sumset(&a, &set(13, &[0])).is_err());
    }

    #[test]
    fn diff_and_product_examples() {
        let a = set(13, &[2, 5, 6]);
        assert_eq!(
            diffset(&a, &a).unwrap().to_vec(),
            vec![0, 1, 3, 4, 9, 10, 12]
        );
        assert_eq!(diffset(&a, &set(13, &[0])).unwrap(), a);
        let b = set(13, &[2, 3]);
        assert_eq!(productset(&b, &b).unwrap().to_vec(), vec![4, 6, 9]);
    }

    #[test]
    fn ratioset_examples() {
        let a = set(7, &[1, 2]);
        assert_eq!(ratioset(&a, &a, true).unwrap().to_vec(), vec![2, 4]);
        assert!(ratioset(&a, &a, false).unwrap().contains(1));
        assert!(ratioset(&a, &set(7, &[0]), false).is_err());
        assert!(ratioset(&a, &set(7, &[]), false).is_err());
        // direct enumeration of the 9 pairs of {2,5,6} mod 13
        let g = set(13, &[2, 5, 6]);
        let f = g.field();
        let mut expect = std::collections::BTreeSet::new();
        for x in [2u32, 5, 6] {
            for y in [2u32, 5, 6] {
                expect.insert(f.div(x, y).unwrap());
            }
        }
        assert_eq!(
            ratioset(&g, &g, false).unwrap().to_vec(),
            expect.into_iter().collect::<Vec<_>>()
        );
    }

    #[test]
    fn dilate_translate_inverse() {
        assert_eq!(dilate(&set(7, &[1, 2]), 3).unwrap().to_vec(), vec![3, 6]);
        assert!(dilate(&set(7, &[1]), 0).is_err());
        let g6 = set(13, &[1, 3, 4, 9, 10, 12]);
        assert_eq!(translate(&g6, 1).to_vec(), vec![0, 2, 4, 5, 10, 11]);
        assert_eq!(
            inverse_set(&set(13, &[3, 4]), false).unwrap().to_vec(),
            vec![9, 10]
        );
        assert!(inverse_set(&set(13, &[0, 3]), false).is_err());
        assert_eq!(
            inverse_set(&set(13, &[0, 3]), true).unwrap().to_vec(),
            vec![9]
        );
    }

    #[test]
    fn rep_fn_examples() {
        let a = set(7, &[0, 1]);
        let r = rep_fn(&a, &a, RepOp::Sum).unwrap();
        assert_eq!(&r.counts()[..3], &[1, 2, 1]);
        let r = rep_fn(&set(7, &[1, 2]), &set(7, &[0, 2]), RepOp::Ratio).unwrap();
        assert_eq!(r.infinity_count(), 2);
        assert_eq!(r.total_mass(), 4);
        let g = set(31, &[1, 4, 9, 17, 30]);
        assert_eq!(rep_fn(&g, &g, RepOp::Diff).unwrap().get(0), 5);
    }

    #[test]
    fn energy_examples() {
        assert_eq!(additive_energy(&set(7, &[0, 1])), 6);
        assert_eq!(additive_energy(&set(7, &[3])), 1);
        assert_eq!(additive_energy(&set(7, &[])), 0);
        let z = set(7, &[0]);
        assert_eq!(energy4(&z, &z, &z, &z).unwrap(), 1);
    }
}
