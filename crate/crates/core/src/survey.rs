//! Grid runner over `(p, |Γ|)` instances with JSONL persistence.
//!
//! Records are produced per instance by a rayon pool and written by a single
//! writer in `(p, d, check)` order, so the output does not depend on the
//! schedule. Every sampled object comes from a ChaCha stream seeded by
//! `(seed, p, d, check)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{
    check_aa_in_shift_bounds, check_energy_bounds, check_intersection_bounds, check_lemma_qabab,
    check_prop_main, check_t_support_bounds, check_theorem_q, BoundKind, BoundReport,
};
use crate::decompose::{
    max_ratio_closed_set, ratio_decompositions, shifted_coset, small_subgroup_dilate_check,
    sumset_decompositions, DecompositionResult, DilateMode, DilateWitness, MaxSetResult,
    SearchBudget, DEFAULT_NODE_BUDGET, MAXSET_MODULUS_LIMIT,
};
use crate::error::{Error, Result};
use crate::field::{divisors, is_prime, PrimeField, Subgroup};
use crate::fpset::FpSet;
use crate::setops::{additive_energy, negate};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckName {
    Energy,
    ThetaBound,
    TheoremQ,
    LemmaQabab,
    TSupport,
    Irreducibility,
    RatioDecomp,
    Maxset,
    Dilate,
}

impl CheckName {
    pub const ALL: [CheckName; 9] = [
        CheckName::Energy,
        CheckName::ThetaBound,
        CheckName::TheoremQ,
        CheckName::LemmaQabab,
        CheckName::TSupport,
        CheckName::Irreducibility,
        CheckName::RatioDecomp,
        CheckName::Maxset,
        CheckName::Dilate,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckName::Energy => "energy",
            CheckName::ThetaBound => "theta_bound",
            CheckName::TheoremQ => "theorem_q",
            CheckName::LemmaQabab => "lemma_qabab",
            CheckName::TSupport => "t_support",
            CheckName::Irreducibility => "irreducibility",
            CheckName::RatioDecomp => "ratio_decomp",
            CheckName::Maxset => "maxset",
            CheckName::Dilate => "dilate",
        }
    }
}

impl std::str::FromStr for CheckName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CheckName::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown check {s:?}")))
    }
}

fn default_exponent() -> Option<f64> {
    None
}
fn default_seed() -> u64 {
    0
}
fn default_budget() -> u64 {
    DEFAULT_NODE_BUDGET
}
fn default_shifts() -> usize {
    50
}
fn default_max_k() -> usize {
    2
}
fn default_large() -> u32 {
    16
}
fn default_xi_samples() -> usize {
    3
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurveyConfig {
    pub prime_range: [u32; 2],
    pub subgroup_size_range: [u32; 2],
    /// Keep only `|Γ| ≤ p^e`.
    #[serde(default = "default_exponent")]
    pub max_subgroup_vs_p_exponent: Option<f64>,
    #[serde(default)]
    pub checks: Vec<CheckName>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_budget")]
    pub node_budget: u64,
    /// Shift tuples sampled per `k` for `theta_bound`.
    #[serde(default = "default_shifts")]
    pub shifts_per_instance: usize,
    #[serde(default = "default_max_k")]
    pub max_k: usize,
    /// Reducible subgroups of at least this order are flagged.
    #[serde(default = "default_large")]
    pub large_threshold: u32,
    /// Cosets `ξΓ` sampled for `ratio_decomp` and `maxset`.
    #[serde(default = "default_xi_samples")]
    pub xi_samples: usize,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
    #[serde(default)]
    pub csv_path: Option<PathBuf>,
}

impl SurveyConfig {
    pub fn new(
        prime_range: [u32; 2],
        subgroup_size_range: [u32; 2],
        checks: Vec<CheckName>,
    ) -> Self {
        Self {
            prime_range,
            subgroup_size_range,
            max_subgroup_vs_p_exponent: None,
            checks,
            seed: default_seed(),
            node_budget: default_budget(),
            shifts_per_instance: default_shifts(),
            max_k: default_max_k(),
            large_threshold: default_large(),
            xi_samples: default_xi_samples(),
            output_path: None,
            csv_path: None,
        }
    }

    /// Parses the `key = value` config format.
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    fn validate(&self) -> Result<()> {
        let [plo, phi] = self.prime_range;
        let [dlo, dhi] = self.subgroup_size_range;
        if plo > phi || dlo > dhi || phi < 2 || dhi < 1 {
            return Err(Error::Config(format!(
                "empty range: primes [{plo}, {phi}], subgroup sizes [{dlo}, {dhi}]"
            )));
        }
        if let Some(e) = self.max_subgroup_vs_p_exponent {
            if !(e.is_finite() && e > 0.0) {
                return Err(Error::Config(format!("exponent must be positive, got {e}")));
            }
        }
        Ok(())
    }
}

/// Every prime in range and every divisor `d` of `p − 1` in range, ascending in `(p, d)`.
pub fn enumerate_instances(cfg: &SurveyConfig) -> Result<Vec<Subgroup>> {
    cfg.validate()?;
    let [plo, phi] = cfg.prime_range;
    let [dlo, dhi] = cfg.subgroup_size_range;
    let mut out = Vec::new();
    for p in plo.max(2)..=phi {
        if !is_prime(p as u64)? {
            continue;
        }
        let field = PrimeField::new(p as u64)?;
        for d in divisors(p as u64 - 1)? {
            let d32 = d as u32;
            if d32 < dlo || d32 > dhi {
                continue;
            }
            if let Some(e) = cfg.max_subgroup_vs_p_exponent {
                if d as f64 > (p as f64).powf(e) {
                    continue;
                }
            }
            out.push(field.subgroup(d)?);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioProbe {
    pub xi: u32,
    pub result: DecompositionResult,
}

/// One `(instance, check)` result.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurveyRecord {
    pub p: u32,
    pub d: u32,
    pub check: CheckName,
    /// Seed of the ChaCha stream used by this record.
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub reports: Vec<BoundReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy: Option<u128>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<DecompositionResult>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ratio_probes: Vec<RatioProbe>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub maxsets: Vec<MaxSetResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dilate: Option<Vec<DilateWitness>>,
    pub hard_failures: usize,
    /// A search hit its node budget.
    pub incomplete: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

impl SurveyRecord {
    fn new(g: &Subgroup, check: CheckName, seed: u64) -> Self {
        Self {
            p: g.field().modulus(),
            d: g.order(),
            check,
            seed,
            reports: Vec::new(),
            energy: None,
            decomposition: None,
            ratio_probes: Vec::new(),
            maxsets: Vec::new(),
            dilate: None,
            hard_failures: 0,
            incomplete: false,
            skipped: None,
        }
    }

    fn key(&self) -> (u32, u32, CheckName) {
        (self.p, self.d, self.check)
    }

    fn skip(mut self, why: &str) -> Self {
        self.skipped = Some(why.to_string());
        self
    }
}

fn record_seed(seed: u64, p: u32, d: u32, check: CheckName) -> u64 {
    // splitmix64 over the key
    let mut z = seed
        ^ (p as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ (d as u64).wrapping_mul(0xBF58_476D_1CE4_E5B9)
        ^ (check as u64).wrapping_mul(0x94D0_49BB_1331_11EB);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Distinct coset representatives `g^i`, `0 ≤ i < (p−1)/|Γ|`.
fn sample_xis(g: &Subgroup, count: usize, rng: &mut ChaCha8Rng) -> Vec<u32> {
    let f = g.field();
    let cosets = (f.group_order() / g.order()) as usize;
    let mut idx: Vec<usize> = sample(rng, cosets, count.min(cosets)).into_vec();
    idx.sort_unstable();
    idx.into_iter()
        .map(|i| f.pow(f.generator(), i as u64))
        .collect()
}

fn strip_timing(mut r: DecompositionResult) -> DecompositionResult {
    r.wall_time = std::time::Duration::ZERO;
    r
}

/// Proposition-style reports on a witness `Γ = B + C`: the larger factor is
/// `A`, the smaller one negated is `B`, with `η₁ = η₂ = 1` and `Ω₁ = Ω₂ = {0}`.
pub fn harvest_prop_main(gamma: &Subgroup, b: &FpSet, c: &FpSet) -> Result<Vec<BoundReport>> {
    let (big, small) = if b.len() >= c.len() { (b, c) } else { (c, b) };
    let zero = FpSet::singleton(gamma.field(), 0)?;
    let (reports, _) = check_prop_main(big, &negate(small), gamma, 1, 1, &zero, &zero)?;
    Ok(reports)
}

fn witness_reports(gamma: &Subgroup, b: &FpSet, c: &FpSet) -> Vec<BoundReport> {
    let p = gamma.field().modulus();
    let d = gamma.order();
    let prod = (b.len() * c.len()) as u128;
    let mut size = BoundReport::soft(
        "witness_min_size",
        p,
        b.len().min(c.len()) as u128,
        (d as f64).sqrt(),
    );
    size.kind = BoundKind::Info;
    size.note = "min(|B|,|C|) against |Γ|^(1/2)".into();
    vec![
        BoundReport::hard("witness_product", p, prod, d as f64, prod >= d as u128)
            .with_d(d)
            .with_instance(format!("B={b};C={c}")),
        size.with_d(d).with_instance(format!("B={b};C={c}")),
    ]
}

fn run_check(cfg: &SurveyConfig, g: &Subgroup, check: CheckName) -> Result<SurveyRecord> {
    let f = g.field();
    let (p, d) = (f.modulus(), g.order());
    let seed = record_seed(cfg.seed, p, d, check);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rec = SurveyRecord::new(g, check, seed);
    let budget = SearchBudget::nodes(cfg.node_budget);
    let set = g.elements();
    match check {
        CheckName::Energy => {
            rec.energy = Some(additive_energy(set));
            rec.reports = check_energy_bounds(g)?;
        }
        CheckName::ThetaBound => {
            for k in 1..=cfg.max_k {
                if k > (p - 1) as usize {
                    break;
                }
                for _ in 0..cfg.shifts_per_instance {
                    let shifts: Vec<u32> = sample(&mut rng, (p - 1) as usize, k)
                        .into_iter()
                        .map(|x| x as u32 + 1)
                        .collect();
                    rec.reports.extend(check_intersection_bounds(g, &shifts)?);
                }
            }
        }
        CheckName::TheoremQ | CheckName::TSupport | CheckName::LemmaQabab if d < 2 => {
            return Ok(rec.skip("|Γ| < 2"));
        }
        CheckName::TheoremQ => rec.reports = check_theorem_q(set)?,
        CheckName::TSupport => rec.reports = check_t_support_bounds(set)?,
        CheckName::LemmaQabab => {
            rec.reports = check_lemma_qabab(set, set)?;
            rec.reports
                .extend(check_lemma_qabab(set, &FpSet::singleton(f, 0)?)?);
        }
        CheckName::Irreducibility => {
            let r = sumset_decompositions(set, true, budget);
            rec.incomplete = !r.exhaustive;
            for w in &r.witnesses {
                rec.reports.extend(witness_reports(g, &w.b, &w.c));
                rec.reports.extend(harvest_prop_main(g, &w.b, &w.c)?);
            }
            rec.decomposition = Some(strip_timing(r));
        }
        CheckName::RatioDecomp => {
            for xi in sample_xis(g, cfg.xi_samples, &mut rng) {
                let r = ratio_decompositions(&shifted_coset(g, xi)?, false, budget);
                rec.incomplete |= !r.exhaustive;
                rec.ratio_probes.push(RatioProbe {
                    xi,
                    result: strip_timing(r),
                });
            }
        }
        CheckName::Maxset if p > MAXSET_MODULUS_LIMIT => {
            return Ok(rec.skip("p above the clique-search limit"))
        }
        CheckName::Maxset => {
            for xi in sample_xis(g, cfg.xi_samples, &mut rng) {
                let m = max_ratio_closed_set(g, xi, budget)?;
                rec.incomplete |= !m.exhaustive;
                rec.reports.extend(check_aa_in_shift_bounds(&m.set, g, xi)?);
                rec.maxsets.push(m);
            }
        }
        CheckName::Dilate => {
            rec.dilate = Some(small_subgroup_dilate_check(g, DilateMode::SubgroupCosets))
        }
    }
    for r in &mut rec.reports {
        if r.d.is_none() {
            r.d = Some(d);
        }
    }
    rec.hard_failures = rec.reports.iter().filter(|r| r.is_hard_failure()).count();
    Ok(rec)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SurveySummary {
    pub records: usize,
    pub hard_failures: usize,
    /// Largest ratio per report name over reports whose preconditions held.
    pub max_ratios: BTreeMap<String, f64>,
    /// `(p, d)` of every subgroup found to be a nontrivial sumset.
    pub reducible: Vec<(u32, u32)>,
    /// The subset of `reducible` at or above the large threshold.
    pub large_reducible: Vec<(u32, u32)>,
    /// Records with a search cut short by the node budget.
    pub incomplete: usize,
    pub resumed: usize,
}

impl SurveySummary {
    pub fn from_records<'a>(
        records: impl IntoIterator<Item = &'a SurveyRecord>,
        large_threshold: u32,
    ) -> Self {
        let mut s = SurveySummary::default();
        let mut reducible = BTreeSet::new();
        for rec in records {
            s.records += 1;
            s.hard_failures += rec.hard_failures;
            s.incomplete += rec.incomplete as usize;
            for r in &rec.reports {
                if let (Some(x), true) = (r.ratio, r.preconditions_met) {
                    let e = s.max_ratios.entry(r.name.clone()).or_insert(x);
                    if x > *e {
                        *e = x;
                    }
                }
            }
            if rec
                .decomposition
                .as_ref()
                .is_some_and(|r| r.is_decomposable())
            {
                reducible.insert((rec.p, rec.d));
            }
        }
        s.reducible = reducible.into_iter().collect();
        s.large_reducible = s
            .reducible
            .iter()
            .copied()
            .filter(|&(_, d)| d >= large_threshold)
            .collect();
        s
    }

    /// Exit status: 0 clean, 2 hard failure or large reducible subgroup, 3 incomplete search.
    pub fn exit_code(&self) -> i32 {
        if self.hard_failures > 0 || !self.large_reducible.is_empty() {
            2
        } else if self.incomplete > 0 {
            3
        } else {
            0
        }
    }
}

#[derive(Serialize, Deserialize)]
struct Header {
    header: HeaderBody,
}

#[derive(Serialize, Deserialize)]
struct HeaderBody {
    started_unix_ms: u64,
    config: SurveyConfig,
}

/// Reads complete records from an existing JSONL file, dropping a torn final line.
fn read_existing(path: &Path) -> Result<Vec<SurveyRecord>> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let mut records = Vec::new();
    let mut good_lines = Vec::new();
    let mut torn = false;
    for line in BufReader::new(File::open(path)?).lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        if serde_json::from_str::<Header>(&line).is_ok() {
            good_lines.push(line);
            continue;
        }
        match serde_json::from_str::<SurveyRecord>(&line) {
            Ok(r) => {
                records.push(r);
                good_lines.push(line);
            }
            Err(_) => torn = true,
        }
    }
    if torn {
        let mut f = File::create(path)?;
        for l in good_lines {
            writeln!(f, "{l}")?;
        }
    }
    Ok(records)
}

/// Runs every configured check on every instance; returns the records in `(p, d, check)` order
/// along with the summary. Existing records in `output_path` are kept and not recomputed.
pub fn run_survey(cfg: &SurveyConfig) -> Result<(SurveySummary, Vec<SurveyRecord>)> {
    let instances = enumerate_instances(cfg)?;
    let mut records = match &cfg.output_path {
        Some(path) => read_existing(path)?,
        None => Vec::new(),
    };
    let resumed = records.len();
    let done: BTreeSet<_> = records.iter().map(SurveyRecord::key).collect();

    let mut out = match &cfg.output_path {
        Some(path) => {
            let fresh = !path.exists() || std::fs::metadata(path)?.len() == 0;
            let mut f = OpenOptions::new().create(true).append(true).open(path)?;
            if fresh {
                let started_unix_ms = std::time::SystemTime::now()
                    .duration_since(std::time::UNIX_EPOCH)
                    .map(|d| d.as_millis() as u64)
                    .unwrap_or(0);
                let h = Header {
                    header: HeaderBody {
                        started_unix_ms,
                        config: cfg.clone(),
                    },
                };
                writeln!(f, "{}", serde_json::to_string(&h)?)?;
            }
            Some(f)
        }
        None => None,
    };

    let mut checks = cfg.checks.clone();
    checks.sort();
    checks.dedup();
    let chunk = rayon::current_num_threads().max(1) * 4;
    for batch in instances.chunks(chunk) {
        let produced: Vec<Vec<SurveyRecord>> = batch
            .par_iter()
            .map(|g| {
                checks
                    .iter()
                    .filter(|&&c| !done.contains(&(g.field().modulus(), g.order(), c)))
                    .map(|&c| run_check(cfg, g, c))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        for rec in produced.into_iter().flatten() {
            if let Some(f) = out.as_mut() {
                writeln!(f, "{}", serde_json::to_string(&rec)?)?;
            }
            records.push(rec);
        }
        if let Some(f) = out.as_mut() {
            f.flush()?;
        }
    }
    records.sort_by_key(SurveyRecord::key);

    if let Some(csv) = &cfg.csv_path {
        write_csv(csv, &records)?;
    }
    let mut summary = SurveySummary::from_records(&records, cfg.large_threshold);
    summary.resumed = resumed;
    Ok((summary, records))
}

pub fn write_csv(path: &Path, records: &[SurveyRecord]) -> Result<()> {
    let mut f = File::create(path)?;
    writeln!(f, "{}", BoundReport::CSV_HEADER)?;
    for r in records.iter().flat_map(|r| &r.reports) {
        writeln!(f, "{}", r.csv_row())?;
    }
    Ok(())
}

/// Least-squares slope of `log₂ y` against `log₂ x`.
pub fn empirical_exponent(points: &[(f64, f64)]) -> Result<f64> {
    if points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0)) {
        return Err(Error::Degenerate("regression needs positive values".into()));
    }
    let distinct: BTreeSet<u64> = points.iter().map(|&(x, _)| x.to_bits()).collect();
    if distinct.len() < 2 {
        return Err(Error::Degenerate(
            "regression needs two distinct sizes".into(),
        ));
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|&(x, _)| x.log2()).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, y)| y.log2()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}

/// `(|Γ|, E⁺(Γ))` pairs from `energy` records.
pub fn energy_points(records: &[SurveyRecord]) -> Vec<(f64, f64)> {
    records
        .iter()
        .filter_map(|r| r.energy.map(|e| (r.d as f64, e as f64)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instance_enumeration() {
        let cfg = SurveyConfig::new([13, 13], [2, 6], vec![]);
        let v: Vec<_> = enumerate_instances(&cfg)
            .unwrap()
            .iter()
            .map(|g| g.order())
            .collect();
        assert_eq!(v, vec![2, 3, 4, 6]);
        let cfg = SurveyConfig::new([5, 7], [2, 4], vec![]);
        let v: Vec<_> = enumerate_instances(&cfg)
            .unwrap()
            .iter()
            .map(|g| (g.field().modulus(), g.order()))
            .collect();
        assert_eq!(v, vec![(5, 2), (5, 4), (7, 2), (7, 3)]);
        assert!(enumerate_instances(&SurveyConfig::new([9, 5], [1, 2], vec![])).is_err());
    }

    #[test]
    fn exponent_regression() {
        let p = 1009.0;
        let pts: Vec<_> = [2.0, 3.0, 4.0, 6.0, 8.0]
            .iter()
            .map(|&n: &f64| (n, n.powi(4) / p))
            .collect();
        assert!((empirical_exponent(&pts).unwrap() - 4.0).abs() < 1e-12);
        assert!(empirical_exponent(&[(4.0, 16.0)]).is_err());
    }

    #[test]
    fn empty_checks_give_no_records() {
        let (s, r) = run_survey(&SurveyConfig::new([5, 50], [1, 10], vec![])).unwrap();
        assert_eq!(s.records, 0);
        assert!(r.is_empty());
    }

    #[test]
    fn toml_config() {
        let cfg = SurveyConfig::from_toml(
            "prime_range = [5, 50]\nsubgroup_size_range = [2, 10]\nchecks = [\"theta_bound\", \"energy\"]\nseed = 7\n",
        )
        .unwrap();
        assert_eq!(cfg.checks, vec![CheckName::ThetaBound, CheckName::Energy]);
        assert_eq!(cfg.node_budget, DEFAULT_NODE_BUDGET);
        assert!(SurveyConfig::from_toml("prime_range = [5, 50]\nbogus = 1\n").is_err());
    }
}
