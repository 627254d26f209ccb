//! Collinear triples and quadruples in product sets `A×A ⊂ F_p²`.
//!
//! For `P_a = (a, a')` with `a, a' ∈ A` (and likewise for the other sets), a
//! quadruple `(P_a, P_b, P_c, P_d)` is collinear when all four points lie on a
//! common line of `F_p²`, vertical lines included.
//!
//! The counts are split by the position of `P_c − P_a`:
//!
//! * both coordinates nonzero: the slope ratios `x = (b−a)/(c−a)` and
//!   `y = (d−a)/(c−a)` agree in both coordinates, which is exactly
//!   `Σ_{x,y} q(x,y)²`;
//! * one coordinate zero: the line is vertical or horizontal and the other
//!   three points are forced onto it;
//! * `P_c = P_a`: the quadruple degenerates to a collinear triple.
//!
//! The degenerate parts are counted in closed form, so [`quad_count_q`] is exact
//! and must agree with the line-enumeration oracle [`quad_count_geometric`].

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{PrimeField, Subgroup};
use crate::fpset::{CountTable, FpSet};
use crate::setops::{additive_energy, dilate, energy4, negate};

/// Largest modulus for which dense `p × p` scratch tables are allocated.
pub const DENSE_TABLE_LIMIT: u32 = 2048;

/// Default per-set point budget for [`quad_count_geometric`] (`|A|² ≤ 256`).
pub const GEOMETRIC_ORACLE_POINTS: usize = 256;

fn check_fields(sets: &[&FpSet]) -> Result<PrimeField> {
    let first = sets[0];
    for s in &sets[1..] {
        first.same_field(s)?;
    }
    Ok(first.field())
}

fn add_u128(a: u128, b: u128) -> u128 {
    a.checked_add(b).expect("count overflow")
}

fn mul_u128(a: u128, b: u128) -> u128 {
    a.checked_mul(b).expect("count overflow")
}

/// `t_{A,B,C}(x) = #{(a,b,c) : c ≠ a, b − a = x(c − a)}`; tuples with `c = a` go to infinity.
pub fn t_fn(a: &FpSet, b: &FpSet, c: &FpSet) -> Result<CountTable> {
    let f = check_fields(&[a, b, c])?;
    let inv = f.inverse_table();
    let bs = b.to_vec();
    let mut counts = vec![0u64; f.modulus() as usize];
    let mut infinity = 0u64;
    for x in a.iter() {
        for z in c.iter() {
            if z == x {
                infinity += bs.len() as u64;
                continue;
            }
            let iz = inv[f.sub(z, x) as usize];
            for &y in &bs {
                counts[f.mul(f.sub(y, x), iz) as usize] += 1;
            }
        }
    }
    let table = CountTable::from_parts(f, counts, infinity);
    assert_eq!(
        table.total_mass(),
        (a.len() * b.len() * c.len()) as u64,
        "t-function mass conservation"
    );
    assert_eq!(
        infinity,
        (a.intersection(c)?.len() * b.len()) as u64,
        "t-function infinity mass"
    );
    Ok(table)
}

/// Collinear triple counts: the finite-slope part `Σ_x t²(x)` and the full geometric count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripleCount {
    /// `Σ_x t²_{A,B,C}(x)` over finite `x`.
    pub finite: u128,
    /// Triples where `P_c − P_a` has a zero coordinate.
    pub degenerate: u128,
    /// All collinear triples `(P_a, P_b, P_c)`, vertical lines included.
    pub total: u128,
}

/// `T(A,B,C)`.
pub fn triple_count(a: &FpSet, b: &FpSet, c: &FpSet) -> Result<TripleCount> {
    let finite = t_fn(a, b, c)?.sum_of_squares();
    let degenerate = triple_degenerate(a, b, c)?;
    Ok(TripleCount {
        finite,
        degenerate,
        total: add_u128(finite, degenerate),
    })
}

fn triple_degenerate(a: &FpSet, b: &FpSet, c: &FpSet) -> Result<u128> {
    let ac = a.intersection(c)?;
    let abc = ac.intersection(b)?.len() as u128;
    let (na, nb, nc, nac) = (
        a.len() as u128,
        b.len() as u128,
        c.len() as u128,
        ac.len() as u128,
    );
    // c = a in exactly one coordinate forces b onto the same vertical/horizontal line
    let one_axis = mul_u128(2, mul_u128(abc, mul_u128(na * nc - nac, nb)));
    // P_c = P_a leaves P_b free
    let coincident = mul_u128(nac * nac, nb * nb);
    Ok(add_u128(one_axis, coincident))
}

/// `T[A,B,C]`, the support of `t_{A,B,C}` (finite points only).
pub fn triple_support(a: &FpSet, b: &FpSet, c: &FpSet) -> Result<FpSet> {
    Ok(t_fn(a, b, c)?.support())
}

/// Sparse table of `q_{A,B,C,D}(x, y)` over `F_p²`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QTable {
    field: PrimeField,
    entries: HashMap<u64, u64>,
    infinity_mass: u64,
}

#[derive(Serialize, Deserialize)]
struct QTableRepr {
    p: u32,
    entries: Vec<[u64; 3]>,
    infinity_mass: u64,
}

impl Serialize for QTable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        QTableRepr {
            p: self.field.modulus(),
            entries: self
                .sorted_entries()
                .into_iter()
                .map(|(x, y, c)| [x as u64, y as u64, c])
                .collect(),
            infinity_mass: self.infinity_mass,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for QTable {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = QTableRepr::deserialize(d)?;
        let field = PrimeField::with_limit(repr.p as u64, crate::field::MAX_MODULUS_LIMIT)
            .map_err(D::Error::custom)?;
        let p = field.modulus() as u64;
        let mut entries = HashMap::new();
        for [x, y, c] in repr.entries {
            if x >= p || y >= p || c == 0 {
                return Err(D::Error::custom(format!("invalid q entry [{x}, {y}, {c}]")));
            }
            entries.insert(x * p + y, c);
        }
        Ok(QTable {
            field,
            entries,
            infinity_mass: repr.infinity_mass,
        })
    }
}

impl QTable {
    fn key(&self, x: u32, y: u32) -> u64 {
        x as u64 * self.field.modulus() as u64 + y as u64
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn get(&self, x: u32, y: u32) -> u64 {
        self.entries.get(&self.key(x, y)).copied().unwrap_or(0)
    }

    /// `σ = |supp q|`.
    pub fn support_size(&self) -> usize {
        self.entries.len()
    }

    /// Mass of tuples with `c = a`.
    pub fn infinity_mass(&self) -> u64 {
        self.infinity_mass
    }

    pub fn finite_mass(&self) -> u64 {
        self.entries.values().sum()
    }

    pub fn total_mass(&self) -> u64 {
        self.finite_mass() + self.infinity_mass
    }

    pub fn sum_of_squares(&self) -> u128 {
        self.entries.values().fold(0u128, |acc, &c| {
            add_u128(acc, mul_u128(c as u128, c as u128))
        })
    }

    /// Entries `(x, y, q(x,y))` sorted by `(x, y)`.
    pub fn sorted_entries(&self) -> Vec<(u32, u32, u64)> {
        let p = self.field.modulus() as u64;
        let mut v: Vec<_> = self
            .entries
            .iter()
            .map(|(&k, &c)| ((k / p) as u32, (k % p) as u32, c))
            .collect();
        v.sort_unstable();
        v
    }

    /// `Σ_y q(x, y)` as a table over `x`.
    pub fn marginal_x(&self) -> CountTable {
        let p = self.field.modulus() as u64;
        let mut counts = vec![0u64; p as usize];
        for (&k, &c) in &self.entries {
            counts[(k / p) as usize] += c;
        }
        CountTable::from_parts(self.field, counts, 0)
    }
}

/// Visits every `(a, c)` with `c ≠ a` together with the slope lists
/// `{(b−a)/(c−a)}` and `{(d−a)/(c−a)}`.
fn for_each_fiber(
    f: PrimeField,
    a: &FpSet,
    b: &[u32],
    c: &FpSet,
    d: &[u32],
    mut visit: impl FnMut(&[u32], &[u32]),
) {
    let inv = f.inverse_table();
    let mut xs = vec![0u32; b.len()];
    let mut ys = vec![0u32; d.len()];
    for u in a.iter() {
        for w in c.iter() {
            if w == u {
                continue;
            }
            let iw = inv[f.sub(w, u) as usize];
            for (slot, &v) in xs.iter_mut().zip(b) {
                *slot = f.mul(f.sub(v, u), iw);
            }
            for (slot, &v) in ys.iter_mut().zip(d) {
                *slot = f.mul(f.sub(v, u), iw);
            }
            visit(&xs, &ys);
        }
    }
}

/// `q_{A,B,C,D}(x,y) = #{(a,b,c,d) : c ≠ a, b−a = x(c−a), d−a = y(c−a)}`.
pub fn q_fn(a: &FpSet, b: &FpSet, c: &FpSet, d: &FpSet) -> Result<QTable> {
    let f = check_fields(&[a, b, c, d])?;
    let p = f.modulus() as u64;
    let (bs, ds) = (b.to_vec(), d.to_vec());
    let mut entries: HashMap<u64, u64> = HashMap::new();
    for_each_fiber(f, a, &bs, c, &ds, |xs, ys| {
        for &x in xs {
            for &y in ys {
                *entries.entry(x as u64 * p + y as u64).or_insert(0) += 1;
            }
        }
    });
    let infinity_mass = (a.intersection(c)?.len() * b.len() * d.len()) as u64;
    let table = QTable {
        field: f,
        entries,
        infinity_mass,
    };
    assert_eq!(
        table.total_mass(),
        (a.len() * b.len() * c.len() * d.len()) as u64,
        "q-function mass conservation"
    );
    Ok(table)
}

/// `Σ_{x,y} q²(x,y)` without materializing the sparse table when `p` is small.
fn q_square_sum(a: &FpSet, b: &FpSet, c: &FpSet, d: &FpSet) -> Result<u128> {
    let f = check_fields(&[a, b, c, d])?;
    if f.modulus() > DENSE_TABLE_LIMIT {
        return Ok(q_fn(a, b, c, d)?.sum_of_squares());
    }
    let p = f.modulus() as usize;
    let (bs, ds) = (b.to_vec(), d.to_vec());
    let mut dense = vec![0u32; p * p];
    for_each_fiber(f, a, &bs, c, &ds, |xs, ys| {
        for &x in xs {
            let row = &mut dense[x as usize * p..(x as usize + 1) * p];
            for &y in ys {
                row[y as usize] += 1;
            }
        }
    });
    Ok(dense
        .iter()
        .filter(|&&v| v > 0)
        .fold(0u128, |acc, &v| add_u128(acc, v as u128 * v as u128)))
}

/// Collinear quadruple counts `Q(A,B,C,D)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadCount {
    /// `Σ_{x,y} q²(x,y)` over finite slopes.
    pub finite: u128,
    /// Quadruples where `P_c − P_a` has a zero coordinate (the point at infinity).
    pub degenerate: u128,
    pub total: u128,
}

/// `Q(A,B,C,D)` via the `q`-function plus the closed-form degenerate mass.
pub fn quad_count_q(a: &FpSet, b: &FpSet, c: &FpSet, d: &FpSet) -> Result<QuadCount> {
    let finite = q_square_sum(a, b, c, d)?;
    let ac = a.intersection(c)?;
    let abcd = ac.intersection(b)?.intersection(d)?.len() as u128;
    let (na, nb, nc, nd, nac) = (
        a.len() as u128,
        b.len() as u128,
        c.len() as u128,
        d.len() as u128,
        ac.len() as u128,
    );
    // c = a in one coordinate: vertical or horizontal line, b and d forced onto it
    let one_axis = mul_u128(2, mul_u128(abcd, mul_u128(na * nc - nac, nb * nd)));
    // P_c = P_a: a collinear triple (P_a, P_b, P_d) with P_a ∈ (A∩C)²
    let coincident = triple_count(&ac, b, d)?.total;
    let degenerate = add_u128(one_axis, coincident);
    Ok(QuadCount {
        finite,
        degenerate,
        total: add_u128(finite, degenerate),
    })
}

/// `Q(A) = Q(A,A,A,A)`.
pub fn quad_count_single(a: &FpSet) -> Result<QuadCount> {
    quad_count_q(a, a, a, a)
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
enum Line {
    /// `y = slope·x + intercept`
    Graph { slope: u32, intercept: u32 },
    /// `x = abscissa`
    Vertical { abscissa: u32 },
}

impl Line {
    fn through(f: PrimeField, (x0, y0): (u32, u32), (x1, y1): (u32, u32)) -> Line {
        if x0 == x1 {
            Line::Vertical { abscissa: x0 }
        } else {
            let slope = f
                .div(f.sub(y1, y0), f.sub(x1, x0))
                .expect("distinct abscissas");
            Line::Graph {
                slope,
                intercept: f.sub(y0, f.mul(slope, x0)),
            }
        }
    }

    fn contains(&self, f: PrimeField, (x, y): (u32, u32)) -> bool {
        match *self {
            Line::Vertical { abscissa } => x == abscissa,
            Line::Graph { slope, intercept } => y == f.add(f.mul(slope, x), intercept),
        }
    }
}

fn grid(s: &FpSet) -> Vec<(u32, u32)> {
    let v = s.to_vec();
    v.iter()
        .flat_map(|&x| v.iter().map(move |&y| (x, y)))
        .collect()
}

/// Oracle for `Q(A,B,C,D)`: enumerates the lines through pairs of distinct points
/// and sums `n_A n_B n_C n_D` per line, correcting quadruples of one repeated point
/// (which lie on `p + 1` lines but count once).
pub fn quad_count_geometric(a: &FpSet, b: &FpSet, c: &FpSet, d: &FpSet) -> Result<u128> {
    quad_count_geometric_with_limit(a, b, c, d, GEOMETRIC_ORACLE_POINTS)
}

pub fn quad_count_geometric_with_limit(
    a: &FpSet,
    b: &FpSet,
    c: &FpSet,
    d: &FpSet,
    max_points: usize,
) -> Result<u128> {
    let f = check_fields(&[a, b, c, d])?;
    for s in [a, b, c, d] {
        if s.len() * s.len() > max_points {
            return Err(Error::OracleLimit(format!(
                "|A|² = {} exceeds {max_points}",
                s.len() * s.len()
            )));
        }
    }
    let pts: Vec<Vec<(u32, u32)>> = [a, b, c, d].iter().map(|s| grid(s)).collect();
    let all: Vec<(u32, u32)> = pts
        .iter()
        .flatten()
        .copied()
        .collect::<HashSet<_>>()
        .into_iter()
        .collect();
    let mut lines = HashSet::new();
    for (i, &u) in all.iter().enumerate() {
        for &v in &all[i + 1..] {
            lines.insert(Line::through(f, u, v));
        }
    }
    let common = a.intersection(b)?.intersection(c)?.intersection(d)?;
    let common_pts = grid(&common);
    let mut total = common_pts.len() as u128;
    for line in &lines {
        let n = pts
            .iter()
            .map(|ps| ps.iter().filter(|&&q| line.contains(f, q)).count() as u128)
            .fold(1u128, mul_u128);
        let repeated = common_pts.iter().filter(|&&q| line.contains(f, q)).count() as u128;
        total = add_u128(total, n - repeated);
    }
    Ok(total)
}

/// Lines bucketed by the dyadic sizes of their intersections with `A×A` and `B×B`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineHistogram {
    /// `(i, j, |L_{i,j}|)` for nonempty buckets, sorted.
    pub buckets: Vec<(u32, u32, u64)>,
    /// `Σ_ℓ |ℓ∩A²|² |ℓ∩B²|²` over lines meeting both point sets.
    pub upper_sum: u128,
    /// `Σ_{i,j} |L_{i,j}| 2^{2i} 2^{2j}`.
    pub dyadic_sum: u128,
    /// `p·|A∩B|²`: each quadruple of a single repeated point sits on `p + 1` lines.
    pub coincidence_excess: u128,
}

impl LineHistogram {
    pub fn bucket(&self, i: u32, j: u32) -> u64 {
        self.buckets
            .iter()
            .find(|&&(bi, bj, _)| bi == i && bj == j)
            .map_or(0, |&(_, _, n)| n)
    }

    pub fn line_count(&self) -> u64 {
        self.buckets.iter().map(|&(_, _, n)| n).sum()
    }
}

fn floor_log2(n: u64) -> u32 {
    63 - n.leading_zeros()
}

fn intercept_counts(f: PrimeField, s: &[u32], slope: u32, out: &mut [u64]) {
    out.iter_mut().for_each(|c| *c = 0);
    for &x in s {
        let mx = f.mul(slope, x);
        for &y in s {
            out[f.sub(y, mx) as usize] += 1;
        }
    }
}

/// Dyadic histogram of all lines of `F_p²` meeting both `A×A` and `B×B`.
pub fn line_histogram(a: &FpSet, b: &FpSet) -> Result<LineHistogram> {
    let f = check_fields(&[a, b])?;
    if a.is_empty() || b.is_empty() {
        return Err(Error::Precondition(
            "line histogram needs nonempty sets".into(),
        ));
    }
    let p = f.modulus() as usize;
    let (av, bv) = (a.to_vec(), b.to_vec());
    let mut buckets: BTreeMap<(u32, u32), u64> = BTreeMap::new();
    let mut upper = 0u128;
    let mut record = |na: u64, nb: u64| {
        *buckets.entry((floor_log2(na), floor_log2(nb))).or_insert(0) += 1;
        let w = mul_u128((na * na) as u128, (nb * nb) as u128);
        upper = add_u128(upper, w);
    };
    let (mut ca, mut cb) = (vec![0u64; p], vec![0u64; p]);
    for slope in 0..f.modulus() {
        intercept_counts(f, &av, slope, &mut ca);
        intercept_counts(f, &bv, slope, &mut cb);
        for k in 0..p {
            if ca[k] > 0 && cb[k] > 0 {
                record(ca[k], cb[k]);
            }
        }
    }
    // vertical lines x = k with k ∈ A ∩ B
    for _ in 0..a.intersection(b)?.len() {
        record(av.len() as u64, bv.len() as u64);
    }
    let dyadic_sum = buckets
        .iter()
        .map(|(&(i, j), &n)| mul_u128(n as u128, 1u128 << (2 * (i + j))))
        .fold(0u128, add_u128);
    let common = a.intersection(b)?.len() as u128;
    Ok(LineHistogram {
        buckets: buckets.into_iter().map(|((i, j), n)| (i, j, n)).collect(),
        upper_sum: upper,
        dyadic_sum,
        coincidence_excess: mul_u128(f.modulus() as u128, common * common),
    })
}

/// Outcome of checking one support inclusion `T[X,Y,Y] ⊆ ηΓ ∪ Ω`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InclusionCheck {
    pub name: String,
    pub holds: bool,
    /// Elements of the support outside the allowed set.
    pub violations: Vec<u32>,
}

/// Support sizes of `q_{A,B,A,B}` and the pieces bounding them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigmaReport {
    pub hypotheses: Vec<InclusionCheck>,
    /// `σ = |supp q_{A,B,A,B}|`.
    pub sigma: u64,
    /// Support points with `x, y, x/y` all outside `(1−Ω₁)^{-1} ∪ Ω₂ ∪ {0}`.
    pub sigma_prime: u64,
    /// `σ − σ'`.
    pub sigma_double_prime: u64,
    /// `#{(γ₁,γ₂,γ) : (1−η₁γ₁)/(1−η₁γ₂) = η₂γ}` with nonzero denominators.
    pub coset_count: u64,
    /// Same equation in product form `1−η₁γ₁ = η₂γ(1−η₁γ₂)`.
    pub coset_count_product: u64,
    /// `E⁺(Γ, −η₁Γ, η₂Γ, −η₁η₂Γ)`.
    pub coset_energy: u128,
    /// `E⁺(Γ)`.
    pub subgroup_energy: u128,
    pub gamma_order: u32,
    /// `ω = max(|Ω₁|, |Ω₂|)`.
    pub omega: u32,
    /// `Σ q`, which equals `|A|²|B|² − m`.
    pub q_mass: u64,
    /// `m`, the `c = a` mass excluded from `supp q`.
    pub infinity_mass: u64,
    /// `Σ q²`.
    pub q_square_sum: u128,
    /// `Q(A,B,A,B)` including degenerate quadruples.
    pub quad_total: u128,
}

impl SigmaReport {
    pub fn hypotheses_hold(&self) -> bool {
        self.hypotheses.iter().all(|h| h.holds)
    }

    /// `σ' ≤ E⁺(Γ)/|Γ|`, compared as `σ'·|Γ| ≤ E⁺(Γ)`.
    pub fn sigma_prime_bound_holds(&self) -> bool {
        self.sigma_prime as u128 * self.gamma_order as u128 <= self.subgroup_energy
    }

    /// `σ'' ≤ 12ω|Γ| + 6|Γ|`.
    pub fn sigma_double_prime_bound(&self) -> u64 {
        12 * self.omega as u64 * self.gamma_order as u64 + 6 * self.gamma_order as u64
    }

    /// `(Σ q)² ≤ σ·Σq² ≤ σ·Q(A,B,A,B)`.
    pub fn cauchy_schwarz_holds(&self) -> bool {
        let lhs = mul_u128(self.q_mass as u128, self.q_mass as u128);
        let mid = mul_u128(self.sigma as u128, self.q_square_sum);
        let rhs = mul_u128(self.sigma as u128, self.quad_total);
        lhs <= mid && mid <= rhs
    }
}

fn inclusion(name: &str, support: &FpSet, allowed: &FpSet) -> Result<InclusionCheck> {
    let bad = support.difference(allowed)?;
    Ok(InclusionCheck {
        name: name.to_string(),
        holds: bad.is_empty(),
        violations: bad.to_vec(),
    })
}

/// σ-quantities of `q_{A,B,A,B}` under the inclusions
/// `T[B,A,A] ⊆ η₁Γ ∪ Ω₁` and `T[A,B,B] ⊆ η₂Γ ∪ Ω₂`.
///
/// Hypothesis failures are reported in [`SigmaReport::hypotheses`], not as errors.
pub fn sigma_quantities(
    a: &FpSet,
    b: &FpSet,
    gamma: &Subgroup,
    eta1: u32,
    eta2: u32,
    omega1: &FpSet,
    omega2: &FpSet,
) -> Result<SigmaReport> {
    let f = check_fields(&[a, b, gamma.elements(), omega1, omega2])?;
    let (eta1, eta2) = (eta1 % f.modulus(), eta2 % f.modulus());
    if eta1 == 0 || eta2 == 0 {
        return Err(Error::ZeroElement("η"));
    }
    let allowed1 = gamma.coset(eta1)?.union(omega1)?;
    let allowed2 = gamma.coset(eta2)?.union(omega2)?;
    let hypotheses = vec![
        inclusion("T[B,A,A] ⊆ η₁Γ ∪ Ω₁", &triple_support(b, a, a)?, &allowed1)?,
        inclusion("T[A,B,B] ⊆ η₂Γ ∪ Ω₂", &triple_support(a, b, b)?, &allowed2)?,
    ];

    let q = q_fn(a, b, a, b)?;
    // exceptional values (1−Ω₁)^{-1} ∪ Ω₂ ∪ {0}
    let mut exceptional = omega2.clone();
    exceptional.insert(0);
    for w in omega1.iter() {
        if let Some(v) = f.inv(f.sub(1, w)) {
            exceptional.insert(v);
        }
    }
    let sigma = q.support_size() as u64;
    let sigma_prime = q
        .sorted_entries()
        .into_iter()
        .filter(|&(x, y, _)| {
            !exceptional.contains(x)
                && !exceptional.contains(y)
                && !exceptional.contains(f.div(x, y).expect("y ∉ exceptional, so y ≠ 0"))
        })
        .count() as u64;

    let els = gamma.elements().to_vec();
    let mut coset_count = 0u64;
    let mut coset_count_product = 0u64;
    for &g1 in &els {
        let num = f.sub(1, f.mul(eta1, g1));
        for &g2 in &els {
            let den = f.sub(1, f.mul(eta1, g2));
            if den == 0 {
                if num == 0 {
                    coset_count_product += els.len() as u64;
                }
                continue;
            }
            // γ = num / (den·η₂) must lie in Γ
            let g = f.div(num, f.mul(den, eta2)).expect("den, η₂ ≠ 0");
            if gamma.contains(g) {
                coset_count += 1;
                coset_count_product += 1;
            }
        }
    }
    let e = gamma.elements();
    let coset_energy = energy4(
        e,
        &negate(&dilate(e, eta1)?),
        &dilate(e, eta2)?,
        &negate(&dilate(e, f.mul(eta1, eta2))?),
    )?;
    let quad_total = quad_count_q(a, b, a, b)?.total;
    Ok(SigmaReport {
        hypotheses,
        sigma,
        sigma_prime,
        sigma_double_prime: sigma - sigma_prime,
        coset_count,
        coset_count_product,
        coset_energy,
        subgroup_energy: additive_energy(e),
        gamma_order: gamma.order(),
        omega: omega1.len().max(omega2.len()) as u32,
        q_mass: q.finite_mass(),
        infinity_mass: q.infinity_mass(),
        q_square_sum: q.sum_of_squares(),
        quad_total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(p: u64, xs: &[u64]) -> FpSet {
        FpSet::from_elements(PrimeField::new(p).unwrap(), xs.iter().copied()).unwrap()
    }

    #[test]
    fn t_fn_single_triple() {
        let t = t_fn(&set(5, &[0]), &set(5, &[1]), &set(5, &[2])).unwrap();
        assert_eq!(t.get(3), 1);
        assert_eq!(t.total_mass(), 1);
    }

    #[test]
    fn t_fn_forced_coincidences() {
        let a = set(11, &[0, 2, 3, 7]);
        let t = t_fn(&a, &a, &a).unwrap();
        assert!(t.get(1) >= 4 * 3);
        assert_eq!(t.infinity_count(), 16);
    }

    #[test]
    fn triple_count_distinct_singletons() {
        let c = triple_count(&set(7, &[1]), &set(7, &[2]), &set(7, &[4])).unwrap();
        assert_eq!(c.finite, 1);
        assert_eq!(c.total, 1);
    }

    #[test]
    fn q_fn_singletons_all_at_infinity() {
        let s = set(7, &[3]);
        let q = q_fn(&s, &s, &s, &s).unwrap();
        assert_eq!(q.infinity_mass(), 1);
        assert_eq!(q.support_size(), 0);
        assert_eq!(quad_count_q(&s, &s, &s, &s).unwrap().total, 1);
    }

    #[test]
    fn q_fn_two_point_set() {
        let a = set(7, &[0, 1]);
        let q = q_fn(&a, &a, &a, &a).unwrap();
        assert_eq!(q.total_mass(), 16);
        assert_eq!(q.infinity_mass(), 8);
        assert_eq!(
            q.sorted_entries(),
            vec![(0, 0, 2), (0, 1, 2), (1, 0, 2), (1, 1, 2)]
        );
    }

    #[test]
    fn quad_two_by_two_grid() {
        for p in [5, 7, 11, 13] {
            let a = set(p, &[0, 1]);
            assert_eq!(quad_count_single(&a).unwrap().total, 88);
            assert_eq!(quad_count_geometric(&a, &a, &a, &a).unwrap(), 88);
        }
    }

    #[test]
    fn geometric_oracle_limit() {
        let big = FpSet::from_reduced(PrimeField::new(31).unwrap(), 0..17);
        assert!(matches!(
            quad_count_geometric(&big, &big, &big, &big),
            Err(Error::OracleLimit(_))
        ));
    }

    #[test]
    fn histogram_two_by_two_grid() {
        let a = set(5, &[0, 1]);
        let h = line_histogram(&a, &a).unwrap();
        assert_eq!(h.bucket(1, 1), 6);
        assert_eq!(h.bucket(0, 0), 4 * (5 + 1 - 3));
        assert_eq!(h.buckets.len(), 2);
        let q = quad_count_single(&a).unwrap().total;
        assert_eq!(h.upper_sum, q + h.coincidence_excess);
    }

    #[test]
    fn histogram_singleton_all_i_zero() {
        let h = line_histogram(&set(13, &[4]), &set(13, &[1, 3, 9])).unwrap();
        assert!(h.buckets.iter().all(|&(i, _, _)| i == 0));
        assert!(line_histogram(&set(13, &[]), &set(13, &[1])).is_err());
    }

    #[test]
    fn sigma_for_thirteen_difference_set() {
        let f = PrimeField::new(13).unwrap();
        let gamma = f.subgroup(6).unwrap();
        let a = set(13, &[2, 5, 6]);
        let zero = set(13, &[0]);
        let r = sigma_quantities(&a, &a, &gamma, 1, 1, &zero, &zero).unwrap();
        assert!(r.hypotheses_hold(), "{:?}", r.hypotheses);
        assert!(r.sigma_prime_bound_holds());
        assert!(r.sigma_double_prime <= r.sigma_double_prime_bound());
        assert!(r.cauchy_schwarz_holds());
        assert_eq!(r.coset_count_product as u128 * 6, r.coset_energy);
        assert!(r.coset_energy <= r.subgroup_energy);
        assert!(r.sigma_prime <= r.coset_count);
    }

    #[test]
    fn sigma_empty_sets() {
        let f = PrimeField::new(13).unwrap();
        let gamma = f.subgroup(6).unwrap();
        let zero = set(13, &[0]);
        let r =
            sigma_quantities(&set(13, &[]), &set(13, &[1, 2]), &gamma, 1, 1, &zero, &zero).unwrap();
        assert_eq!(r.sigma, 0);
    }
}
