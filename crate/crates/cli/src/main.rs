//! `ffcomb` command-line frontend.
//!
//! Exit codes: 0 success, 1 usage or precondition error, 2 hard-assertion
//! failure, 3 search budget exhausted.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ffcomb::bounds::{self, BoundReport};
use ffcomb::decompose::{self, DecompositionResult, DilateMode, SearchBudget};
use ffcomb::fpset::parse_residues;
use ffcomb::incidence;
use ffcomb::setops::{self, RepOp};
use ffcomb::survey::{self, CheckName, SurveyConfig};
use ffcomb::{Error, FpSet, PrimeField, Subgroup};
use serde_json::json;

const BUDGET_ENV: &str = "FFCOMB_BUDGET";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Json,
    Csv,
}

#[derive(Parser, Debug)]
#[command(
    name = "ffcomb",
    version,
    about = "Exact additive combinatorics over prime fields"
)]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Human, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug)]
struct SetArgs {
    /// Prime modulus.
    #[arg(short)]
    p: u64,
    /// Comma-separated residues.
    #[arg(long, allow_hyphen_values = true)]
    set: String,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SetOp {
    Sum,
    Diff,
    Product,
    Ratio,
    Dilate,
    Translate,
    Negate,
    Inverse,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Theorem {
    TheoremQ,
    LemmaQabab,
    TSupport,
    Energy,
    PropMain,
    AaShift,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// The subgroup of order d (or its coset ξΓ).
    Subgroup {
        #[arg(short)]
        p: u64,
        #[arg(short)]
        d: u64,
        #[arg(long)]
        coset: Option<u32>,
    },
    /// A set operation, or with --rep the representation function.
    Setop {
        #[command(flatten)]
        s: SetArgs,
        #[arg(long, value_enum)]
        op: SetOp,
        /// Second operand for binary operations (defaults to --set).
        #[arg(long)]
        other: Option<String>,
        /// Scalar for dilate and translate.
        #[arg(long)]
        scalar: Option<u32>,
        #[arg(long)]
        exclude_diagonal: bool,
        /// Print the representation function instead of the set.
        #[arg(long)]
        rep: bool,
    },
    /// Additive energy E⁺(A), or E⁺(A,B,C,D) with --b/--c/--d.
    Energy {
        #[command(flatten)]
        s: SetArgs,
        #[arg(long)]
        b: Option<String>,
        #[arg(long)]
        c: Option<String>,
        #[arg(long)]
        d: Option<String>,
    },
    /// Collinear triples T(A,B,C) and the support T[A,B,C].
    Triples {
        #[command(flatten)]
        s: SetArgs,
        #[arg(long)]
        b: Option<String>,
        #[arg(long)]
        c: Option<String>,
    },
    /// Collinear quadruples Q(A,B,C,D).
    Quadruples {
        #[command(flatten)]
        s: SetArgs,
        #[arg(long)]
        b: Option<String>,
        #[arg(long)]
        c: Option<String>,
        #[arg(long)]
        d: Option<String>,
        /// Also run the line-enumeration oracle.
        #[arg(long)]
        oracle: bool,
    },
    /// Dyadic line histogram for A×A and B×B.
    Histogram {
        #[command(flatten)]
        s: SetArgs,
        #[arg(long)]
        b: Option<String>,
    },
    /// Evaluate a bound on an instance.
    Check {
        #[command(flatten)]
        s: SetArgs,
        #[arg(long, value_enum)]
        theorem: Theorem,
        #[arg(long)]
        b: Option<String>,
        /// Subgroup order, for energy, prop-main and aa-shift.
        #[arg(short)]
        d: Option<u64>,
        #[arg(long, default_value_t = 1)]
        xi: u32,
        #[arg(long, default_value_t = 1)]
        eta1: u32,
        #[arg(long, default_value_t = 1)]
        eta2: u32,
        #[arg(long, default_value = "")]
        omega1: String,
        #[arg(long, default_value = "")]
        omega2: String,
    },
    /// Intersections of Γ with its shifts.
    Intersect {
        #[arg(short)]
        p: u64,
        #[arg(short)]
        d: u64,
        #[arg(long)]
        shifts: String,
    },
    /// Decompositions A = B + C.
    Decompose {
        #[command(flatten)]
        s: SetArgs,
        /// Enumerate every canonical witness instead of stopping at the first.
        #[arg(long)]
        all: bool,
        /// Use the subset-pair oracle (|A| ≤ 12).
        #[arg(long)]
        bruteforce: bool,
    },
    /// Sets B with B/B = S (distinct pairs).
    RatioDecompose {
        #[command(flatten)]
        s: SetArgs,
        #[arg(long)]
        all: bool,
    },
    /// Largest A with A/A ⊆ ξΓ + 1, or with --dilate the sets A with ξ(A − A) = Γ ⊔ {0}.
    Maxset {
        #[arg(short)]
        p: u64,
        #[arg(short)]
        d: u64,
        #[arg(long, default_value_t = 1)]
        xi: u32,
        #[arg(long)]
        dilate: bool,
        /// With --dilate, range over all 2- and 3-element sets containing 0.
        #[arg(long)]
        any_small: bool,
    },
    /// Run a grid survey.
    Survey {
        /// TOML config; flags below override it.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
        primes: Option<Vec<u32>>,
        #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
        sizes: Option<Vec<u32>>,
        #[arg(long)]
        exponent: Option<f64>,
        /// Comma-separated check names.
        #[arg(long)]
        checks: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: 1,
            message: e.to_string(),
        }
    }
}

type Outcome = Result<u8, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure {
        code: 1,
        message: msg.into(),
    }
}

fn field(p: u64) -> Result<PrimeField, Error> {
    PrimeField::new(p)
}

fn parse_set(f: PrimeField, s: &str) -> Result<FpSet, Error> {
    FpSet::from_elements(f, parse_residues(s)?)
}

fn opt_set(f: PrimeField, s: &Option<String>, default: &FpSet) -> Result<FpSet, Error> {
    s.as_deref()
        .map_or_else(|| Ok(default.clone()), |s| parse_set(f, s))
}

fn budget() -> Result<SearchBudget, Failure> {
    match std::env::var(BUDGET_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(SearchBudget::nodes)
            .map_err(|_| usage(format!("{BUDGET_ENV} must be a node count, got {v:?}"))),
        Err(_) => Ok(SearchBudget::default()),
    }
}

fn print_json<T: serde::Serialize>(x: &T) -> Result<(), Failure> {
    println!("{}", serde_json::to_string(x).map_err(Error::from)?);
    Ok(())
}

fn emit_reports(reports: &[BoundReport], fmt: Format) -> Outcome {
    match fmt {
        Format::Json => {
            for r in reports {
                print_json(r)?;
            }
        }
        Format::Csv => {
            println!("{}", BoundReport::CSV_HEADER);
            for r in reports {
                println!("{}", r.csv_row());
            }
        }
        Format::Human => {
            for r in reports {
                let verdict = match r.passed {
                    Some(true) => "pass",
                    Some(false) => "FAIL",
                    None => "-",
                };
                let ratio = r.ratio.map_or("-".to_string(), |x| format!("{x:.6}"));
                println!(
                    "{:<26} lhs={} rhs={:.6} ratio={} {} pre={} {}",
                    r.name, r.lhs, r.rhs, ratio, verdict, r.preconditions_met, r.note
                );
            }
        }
    }
    Ok(if reports.iter().any(BoundReport::is_hard_failure) {
        2
    } else {
        0
    })
}

fn emit_value(fmt: Format, human: String, value: serde_json::Value) -> Outcome {
    match fmt {
        Format::Json => print_json(&value)?,
        Format::Human => println!("{human}"),
        Format::Csv => match value {
            serde_json::Value::Object(m) => {
                println!("{}", m.keys().cloned().collect::<Vec<_>>().join(","));
                let row: Vec<String> = m
                    .values()
                    .map(|v| match v {
                        serde_json::Value::String(s) => format!("\"{s}\""),
                        other => other.to_string(),
                    })
                    .collect();
                println!("{}", row.join(","));
            }
            other => println!("{other}"),
        },
    }
    Ok(0)
}

fn emit_decomposition(r: &DecompositionResult, fmt: Format, sep: &str) -> Outcome {
    match fmt {
        Format::Json => print_json(r)?,
        Format::Csv => {
            println!("B,C");
            for w in &r.witnesses {
                println!("\"{}\",\"{}\"", w.b, w.c);
            }
        }
        Format::Human => {
            if r.witnesses.is_empty() {
                println!("{} is not decomposable", r.target);
            }
            for w in &r.witnesses {
                if sep == "/" {
                    println!("{} = B/B with B = {}", r.target, w.b);
                } else {
                    println!("{} = {} {sep} {}", r.target, w.b, w.c);
                }
            }
            println!("exhaustive={} nodes={}", r.exhaustive, r.nodes_explored);
        }
    }
    Ok(if r.exhaustive { 0 } else { 3 })
}

fn run(cli: Cli) -> Outcome {
    let fmt = cli.format;
    match cli.command {
        Command::Subgroup { p, d, coset } => {
            let g = Subgroup::new(field(p)?, d)?;
            let set = match coset {
                Some(xi) => g.coset(xi)?,
                None => g.elements().clone(),
            };
            emit_value(
                fmt,
                set.to_string(),
                json!({"p": p, "d": d, "generator": g.generator(), "set": set}),
            )
        }
        Command::Setop {
            s,
            op,
            other,
            scalar,
            exclude_diagonal,
            rep,
        } => {
            let f = field(s.p)?;
            let a = parse_set(f, &s.set)?;
            let b = opt_set(f, &other, &a)?;
            if rep {
                let rop = match op {
                    SetOp::Sum => RepOp::Sum,
                    SetOp::Diff => RepOp::Diff,
                    SetOp::Product => RepOp::Product,
                    SetOp::Ratio => RepOp::Ratio,
                    _ => return Err(usage("--rep needs sum, diff, product or ratio")),
                };
                let t = setops::rep_fn(&a, &b, rop)?;
                let nonzero: Vec<(u32, u64)> = t
                    .counts()
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| c > 0)
                    .map(|(x, &c)| (x as u32, c))
                    .collect();
                let human = nonzero
                    .iter()
                    .map(|(x, c)| format!("{x}:{c}"))
                    .collect::<Vec<_>>()
                    .join(" ")
                    + &format!(" inf:{}", t.infinity_count());
                return emit_value(
                    fmt,
                    human,
                    json!({"counts": nonzero, "infinity": t.infinity_count()}),
                );
            }
            let need_scalar = || scalar.ok_or_else(|| usage("--scalar is required"));
            let out = match op {
                SetOp::Sum => setops::sumset(&a, &b)?,
                SetOp::Diff => setops::diffset(&a, &b)?,
                SetOp::Product => setops::productset(&a, &b)?,
                SetOp::Ratio => setops::ratioset(&a, &b, exclude_diagonal)?,
                SetOp::Dilate => setops::dilate(&a, need_scalar()?)?,
                SetOp::Translate => setops::translate(&a, need_scalar()?),
                SetOp::Negate => setops::negate(&a),
                SetOp::Inverse => setops::inverse_set(&a, false)?,
            };
            emit_value(fmt, out.to_string(), json!({"set": out}))
        }
        Command::Energy { s, b, c, d } => {
            let f = field(s.p)?;
            let a = parse_set(f, &s.set)?;
            let e = if b.is_none() && c.is_none() && d.is_none() {
                setops::additive_energy(&a)
            } else {
                setops::energy4(
                    &a,
                    &opt_set(f, &b, &a)?,
                    &opt_set(f, &c, &a)?,
                    &opt_set(f, &d, &a)?,
                )?
            };
            emit_value(fmt, e.to_string(), json!({"energy": e}))
        }
        Command::Triples { s, b, c } => {
            let f = field(s.p)?;
            let a = parse_set(f, &s.set)?;
            let (b, c) = (opt_set(f, &b, &a)?, opt_set(f, &c, &a)?);
            let t = incidence::triple_count(&a, &b, &c)?;
            let support = incidence::triple_support(&a, &b, &c)?;
            emit_value(
                fmt,
                format!("{}\nsupport {}", t.total, support),
                json!({"finite": t.finite, "degenerate": t.degenerate, "total": t.total, "support": support}),
            )
        }
        Command::Quadruples { s, b, c, d, oracle } => {
            let f = field(s.p)?;
            let a = parse_set(f, &s.set)?;
            let (b, c, d) = (
                opt_set(f, &b, &a)?,
                opt_set(f, &c, &a)?,
                opt_set(f, &d, &a)?,
            );
            let q = incidence::quad_count_q(&a, &b, &c, &d)?;
            let geometric = if oracle {
                Some(incidence::quad_count_geometric(&a, &b, &c, &d)?)
            } else {
                None
            };
            if let Some(g) = geometric {
                if g != q.total {
                    return Err(Failure {
                        code: 2,
                        message: format!("oracle mismatch: {} vs {g}", q.total),
                    });
                }
            }
            emit_value(
                fmt,
                q.total.to_string(),
                json!({"finite": q.finite, "degenerate": q.degenerate, "total": q.total, "geometric": geometric}),
            )
        }
        Command::Histogram { s, b } => {
            let f = field(s.p)?;
            let a = parse_set(f, &s.set)?;
            let h = incidence::line_histogram(&a, &opt_set(f, &b, &a)?)?;
            match fmt {
                Format::Json => print_json(&h)?,
                Format::Csv => {
                    println!("i,j,lines");
                    for (i, j, n) in &h.buckets {
                        println!("{i},{j},{n}");
                    }
                }
                Format::Human => {
                    for (i, j, n) in &h.buckets {
                        println!("L[{i},{j}] = {n}");
                    }
                    println!("upper_sum={} dyadic_sum={}", h.upper_sum, h.dyadic_sum);
                }
            }
            Ok(0)
        }
        Command::Check {
            s,
            theorem,
            b,
            d,
            xi,
            eta1,
            eta2,
            omega1,
            omega2,
        } => {
            let f = field(s.p)?;
            let a = parse_set(f, &s.set)?;
            let gamma = || -> Result<Subgroup, Failure> {
                let d = d.ok_or_else(|| usage("-d is required for this check"))?;
                Ok(Subgroup::new(f, d)?)
            };
            let reports = match theorem {
                Theorem::TheoremQ => bounds::check_theorem_q(&a)?,
                Theorem::LemmaQabab => bounds::check_lemma_qabab(&a, &opt_set(f, &b, &a)?)?,
                Theorem::TSupport => bounds::check_t_support_bounds(&a)?,
                Theorem::Energy => bounds::check_energy_bounds(&gamma()?)?,
                Theorem::PropMain => {
                    let b = opt_set(f, &b, &a)?;
                    let (o1, o2) = (parse_set(f, &omega1)?, parse_set(f, &omega2)?);
                    bounds::check_prop_main(&a, &b, &gamma()?, eta1, eta2, &o1, &o2)?.0
                }
                Theorem::AaShift => bounds::check_aa_in_shift_bounds(&a, &gamma()?, xi)?,
            };
            emit_reports(&reports, fmt)
        }
        Command::Intersect { p, d, shifts } => {
            let g = Subgroup::new(field(p)?, d)?;
            let shifts: Vec<u32> = parse_residues(&shifts)?
                .into_iter()
                .map(|x| u32::try_from(x).map_err(|_| Error::OutOfRange(x)))
                .collect::<Result<_, _>>()?;
            emit_reports(&bounds::check_intersection_bounds(&g, &shifts)?, fmt)
        }
        Command::Decompose { s, all, bruteforce } => {
            let a = parse_set(field(s.p)?, &s.set)?;
            let r = if bruteforce {
                decompose::sumset_decomposable_bruteforce(&a)?
            } else {
                decompose::sumset_decompositions(&a, all, budget()?)
            };
            emit_decomposition(&r, fmt, "+")
        }
        Command::RatioDecompose { s, all } => {
            let a = parse_set(field(s.p)?, &s.set)?;
            emit_decomposition(
                &decompose::ratio_decompositions(&a, all, budget()?),
                fmt,
                "/",
            )
        }
        Command::Maxset {
            p,
            d,
            xi,
            dilate,
            any_small,
        } => {
            let g = Subgroup::new(field(p)?, d)?;
            if dilate {
                let mode = if any_small {
                    DilateMode::AnySmall
                } else {
                    DilateMode::SubgroupCosets
                };
                let w = decompose::small_subgroup_dilate_check(&g, mode);
                match fmt {
                    Format::Json => print_json(&w)?,
                    _ => {
                        if w.is_empty() {
                            println!("none");
                        }
                        for x in &w {
                            println!("A={} xi={}", x.a, x.xi);
                        }
                    }
                }
                return Ok(0);
            }
            let m = decompose::max_ratio_closed_set(&g, xi, budget()?)?;
            match fmt {
                Format::Json => print_json(&m)?,
                _ => println!(
                    "{} (|A| = {}, exhaustive={})",
                    m.set,
                    m.set.len(),
                    m.exhaustive
                ),
            }
            Ok(if m.exhaustive { 0 } else { 3 })
        }
        Command::Survey {
            config,
            primes,
            sizes,
            exponent,
            checks,
            seed,
            output,
            csv,
        } => {
            let mut cfg = match &config {
                Some(path) => SurveyConfig::load(path)?,
                None => {
                    if primes.is_none() || sizes.is_none() {
                        return Err(usage("survey needs --config or both --primes and --sizes"));
                    }
                    SurveyConfig::new([0, 0], [0, 0], Vec::new())
                }
            };
            if let Some(v) = primes {
                cfg.prime_range = [v[0], v[1]];
            }
            if let Some(v) = sizes {
                cfg.subgroup_size_range = [v[0], v[1]];
            }
            if exponent.is_some() {
                cfg.max_subgroup_vs_p_exponent = exponent;
            }
            if let Some(c) = checks {
                cfg.checks = c
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(|s| s.trim().parse::<CheckName>())
                    .collect::<Result<_, _>>()?;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if output.is_some() {
                cfg.output_path = output;
            }
            if csv.is_some() {
                cfg.csv_path = csv;
            }
            if std::env::var(BUDGET_ENV).is_ok() {
                cfg.node_budget = budget()?.max_nodes;
            }
            let (summary, _) = survey::run_survey(&cfg)?;
            match fmt {
                Format::Json => print_json(&summary)?,
                _ => {
                    println!("records: {} (resumed {})", summary.records, summary.resumed);
                    println!("hard failures: {}", summary.hard_failures);
                    println!("incomplete searches: {}", summary.incomplete);
                    println!("reducible subgroups (p, d): {:?}", summary.reducible);
                    println!("large reducible subgroups: {:?}", summary.large_reducible);
                    for (name, r) in &summary.max_ratios {
                        println!("max ratio {name}: {r:.6}");
                    }
                }
            }
            Ok(summary.exit_code() as u8)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
