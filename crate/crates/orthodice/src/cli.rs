//! Command-line surface: every library operation behind a subcommand, with
//! `json`, `csv`, and aligned-`table` output.
//!
//! Conventions shared by all subcommands:
//!
//! - stdout carries the payload, stderr carries diagnostics;
//! - exit code 0 on success, 1 on a domain error (the error name is printed
//!   to stderr), 2 on a usage error;
//! - `--seed` defaults to the `ORTHODICE_SEED` environment variable, then 0;
//! - `--threads` sizes the worker pool; every stochastic command produces
//!   bit-identical output regardless of the value;
//! - exact rationals are printed both as `p/q` strings and as decimals, and
//!   are accepted on the command line as `p/q`, integers, or decimals (a
//!   decimal is converted to the exact rational it spells, with a note on
//!   stderr);
//! - integers too large for a JSON number are emitted as decimal strings.
//!
//! JSON output is wrapped in an envelope `{schema_version, command, payload}`
//! described by `schemas/cli-output.schema.json`; figure-data columns are
//! documented in `docs/figures.md`.

use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use num_traits::{Signed, ToPrimitive};
use serde_json::{json, Value};

use crate::apps::{cards, goe, gravity, shotnoise};
use crate::dice::{self, DiceClassKind, SupportPair};
use crate::error::{Error, Result};
use crate::law::{self, ThinningParam};
use crate::orthopoly;
use crate::sim::{self, samplers, CountLaw, Functional, MeasureModel};
use crate::{big_to_rat, rat_to_f64, Rat};

const SCHEMA_VERSION: &str = "1.0";

/// Parse `std::env::args`, execute, and return the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    if let Some(threads) = cli.threads {
        // The pool can only be installed once per process; a second attempt
        // (harmless) is ignored. Results do not depend on the pool size.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    let seed = cli
        .seed
        .or_else(|| std::env::var("ORTHODICE_SEED").ok().and_then(|s| s.parse().ok()))
        .unwrap_or(0);
    match dispatch(cli.command, seed) {
        Ok(output) => {
            print!("{}", render(&output, cli.format));
            0
        }
        Err(e) => {
            // Display already carries the `Name: detail` form.
            eprintln!("{e}");
            1
        }
    }
}

#[derive(Parser)]
#[command(
    name = "orthodice",
    version,
    about = "Orthogonal dice: exact mean-equals-variance counting laws, their \
             Poisson-limit diagnostics, and seeded Monte Carlo studies"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Seed for stochastic subcommands (default: $ORTHODICE_SEED, then 0).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; output is bit-identical for any value.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate, construct, and classify mean-equals-variance dice.
    #[command(subcommand)]
    Dice(DiceCmd),
    /// Count side values available to the family.
    #[command(subcommand)]
    Count(CountCmd),
    /// Exact pmf, moment, and Poisson-distance computations.
    #[command(subcommand)]
    Law(LawCmd),
    /// Seeded Monte Carlo over the closed model registry.
    #[command(subcommand)]
    Sim(SimCmd),
    /// Application studies: cards, GOE gaps, shot noise, gravity.
    #[command(subcommand)]
    App(AppCmd),
    /// Discrete orthogonal polynomials and Charlier convergence.
    #[command(subcommand)]
    Poly(PolyCmd),
}

#[derive(Subcommand)]
enum DiceCmd {
    /// First members of the family in increasing side count.
    List {
        /// How many dice to list.
        #[arg(long)]
        count: usize,
    },
    /// The die with family index K (positive, not divisible by 3).
    FromIndex { k: String },
    /// The die whose side count is the prime P (>= 5).
    FromPrime { p: String },
    /// Classify the support {M..N} by the sign of variance - mean.
    Classify { m: String, n: String },
    /// The family member whose mean is closest to C (rational allowed).
    Nearest { c: String },
    /// The first family member with mean at least C.
    FirstAtLeast { c: String },
    /// Center/halfwidth form of the die with family index K.
    Decompose { k: String },
}

#[derive(Subcommand)]
enum CountCmd {
    /// How many integers in [5, N] are coprime to both 2 and 3.
    #[command(name = "coprime23")]
    Coprime23 {
        n: String,
        /// Cross-check the closed form against a gcd scan (N <= 10^8).
        #[arg(long)]
        oracle: bool,
    },
}

#[derive(Subcommand)]
enum LawCmd {
    /// Exact pmf of the a-thinned die {M..N}.
    Pmf {
        #[arg(long)]
        m: u64,
        #[arg(long)]
        n: u64,
        /// Retention probability in (0, 1], e.g. 57/114.
        #[arg(long)]
        a: String,
    },
    /// Exact factorial and raw moments of the a-thinned die {M..N}.
    Moments {
        #[arg(long)]
        m: u64,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        a: String,
        /// Highest moment order (<= 60).
        #[arg(long)]
        max_order: u32,
    },
    /// Distances from matched-mean thinned dice to the Poisson law of the
    /// base die K0.
    Converge {
        #[arg(long)]
        k0: u64,
        /// Family indices to thin, e.g. 17,19,22,25,31,47,97.
        #[arg(long)]
        indices: String,
        /// Grid size for the pgf sup distance.
        #[arg(long, default_value_t = 1001)]
        grid: usize,
        /// Poisson tail truncation tolerance.
        #[arg(long, default_value_t = 1e-12)]
        tail_tol: f64,
    },
}

#[derive(Subcommand)]
enum SimCmd {
    /// Mean of a functional under seeded replicates of a registry model.
    ///
    /// Model grammar: segments joined by '|':
    ///   die:M,N                   counting law (required, first)
    ///   uniform:LO,HI             scalar points on [LO, HI)
    ///   gauss:M1,S1[;M2,S2...]    vector points, one Gaussian per coordinate
    ///   atoms:W1,W2,...           atom index points with the given weights
    ///   lognormal:MU,SIGMA        optional i.i.d. marks (default mark 1)
    ///
    /// Functional grammar (by point type):
    ///   count                     number of points (any type)
    ///   mass                      sum of marks (any type)
    ///   window:A,B                scalar: points with A <= x <= B
    ///   exp:A,B                   scalar: sum of mark * A * e^(-B x)
    ///   ball:R                    vector: points with |x| <= R
    ///   atom:I                    atoms: points equal to atom I
    Estimate {
        #[arg(long)]
        model: String,
        #[arg(long)]
        functional: String,
        #[arg(long)]
        reps: u64,
    },
}

#[derive(Subcommand)]
enum AppCmd {
    #[command(subcommand)]
    Cards(CardsCmd),
    #[command(subcommand)]
    Goe(GoeCmd),
    /// Shot noise driven by a die: exponential pulses at uniform times.
    Shotnoise {
        /// Observation horizon.
        #[arg(long = "T")]
        horizon: f64,
        /// Pulse amplitude.
        #[arg(long)]
        ap: f64,
        /// Pulse decay rate.
        #[arg(long)]
        bp: f64,
        /// Family index of the driving die.
        #[arg(long)]
        die_index: u64,
        /// Number of evaluation times (uniform grid on (0, T]).
        #[arg(long, default_value_t = 20)]
        grid: usize,
        #[arg(long)]
        reps: u64,
    },
    /// Gravitational potential of a random star field.
    Gravity {
        /// Named configuration; `milkyway` is the 2.5e11-star disk.
        #[arg(long)]
        preset: Option<String>,
        /// Custom counting die as M,N.
        #[arg(long)]
        die: Option<String>,
        /// Spatial density: blob:SIGMA or disk:RADIUS,HEIGHT.
        #[arg(long)]
        density: Option<String>,
        #[arg(long, default_value_t = 1.0)]
        mass_mean: f64,
        #[arg(long, default_value_t = 0.0)]
        mass_sd: f64,
        /// Coupling constant.
        #[arg(long, default_value_t = 1.0)]
        g: f64,
        /// Softening length, or `none` for the bare 1/r kernel.
        #[arg(long)]
        softening: Option<String>,
        /// Evaluation point as X,Y,Z.
        #[arg(long, allow_hyphen_values = true)]
        z: Option<String>,
        /// Second evaluation point as X,Y,Z.
        #[arg(long, allow_hyphen_values = true)]
        w: Option<String>,
        /// Monte Carlo replicates; omit for quadrature references only.
        #[arg(long)]
        reps: Option<u64>,
    },
}

#[derive(Subcommand)]
enum CardsCmd {
    /// Exact suit-score moments when hand size follows the die {M..N}.
    Table {
        #[arg(long)]
        m: String,
        #[arg(long)]
        n: String,
    },
    /// Exact suit-partition probability of a fixed-size hand.
    Partition {
        #[arg(long)]
        hand: u64,
        /// Suit counts, e.g. 2,2,2,1.
        #[arg(long)]
        counts: String,
    },
    /// Simulate the suit guessing game.
    Game {
        #[arg(long)]
        m: String,
        #[arg(long)]
        n: String,
        #[arg(long)]
        rounds: u64,
        /// Emit per-round counts and scores instead of the summary.
        #[arg(long)]
        scatter: bool,
    },
}

#[derive(Subcommand)]
enum GoeCmd {
    /// Window probabilities, restricted gap moments, and restriction-
    /// variance ratios by deterministic quadrature.
    Summary {
        /// Comma-separated window offsets; omit for the default grid.
        #[arg(long, allow_hyphen_values = true)]
        r_grid: Option<String>,
    },
    /// Monte Carlo check of the spectral-gap law (mean, second moment, KS).
    Wigner {
        #[arg(long)]
        n: u64,
    },
    /// Monte Carlo check of one window's restricted moments.
    Window {
        #[arg(long, allow_hyphen_values = true)]
        r: f64,
        #[arg(long)]
        proposals: u64,
    },
}

#[derive(Subcommand)]
enum PolyCmd {
    /// Distances from thinned-die orthogonal polynomials to the Charlier
    /// system, plus Poisson-weighted curve data.
    Report {
        #[arg(long)]
        k0: u64,
        /// Family indices to thin, e.g. 17,19,22,25,31.
        #[arg(long)]
        indices: String,
        #[arg(long, default_value_t = 3)]
        degree: usize,
        /// L^p exponents, e.g. 1,2.
        #[arg(long, default_value = "1,2")]
        p: String,
        #[arg(long, default_value_t = 1e-12)]
        tail_tol: f64,
        /// Emit the weighted curve grid instead of the distance table.
        #[arg(long)]
        curve: bool,
    },
}

fn dispatch(command: Command, seed: u64) -> Result<CommandOutput> {
    match command {
        Command::Dice(cmd) => match cmd {
            DiceCmd::List { count } => dice_list(count),
            DiceCmd::FromIndex { k } => dice_from_index(&k),
            DiceCmd::FromPrime { p } => dice_from_prime(&p),
            DiceCmd::Classify { m, n } => dice_classify(&m, &n),
            DiceCmd::Nearest { c } => dice_nearest(&c),
            DiceCmd::FirstAtLeast { c } => dice_first_at_least(&c),
            DiceCmd::Decompose { k } => dice_decompose(&k),
        },
        Command::Count(CountCmd::Coprime23 { n, oracle }) => count_coprime23(&n, oracle),
        Command::Law(cmd) => match cmd {
            LawCmd::Pmf { m, n, a } => law_pmf(m, n, &a),
            LawCmd::Moments { m, n, a, max_order } => law_moments(m, n, &a, max_order),
            LawCmd::Converge {
                k0,
                indices,
                grid,
                tail_tol,
            } => law_converge(k0, &indices, grid, tail_tol),
        },
        Command::Sim(SimCmd::Estimate {
            model,
            functional,
            reps,
        }) => sim_estimate(&model, &functional, reps, seed),
        Command::App(cmd) => match cmd {
            AppCmd::Cards(c) => match c {
                CardsCmd::Table { m, n } => cards_table(&m, &n),
                CardsCmd::Partition { hand, counts } => cards_partition(hand, &counts),
                CardsCmd::Game {
                    m,
                    n,
                    rounds,
                    scatter,
                } => cards_game(&m, &n, rounds, seed, scatter),
            },
            AppCmd::Goe(g) => match g {
                GoeCmd::Summary { r_grid } => goe_summary(r_grid.as_deref()),
                GoeCmd::Wigner { n } => goe_wigner(n, seed),
                GoeCmd::Window { r, proposals } => goe_window(r, proposals, seed),
            },
            AppCmd::Shotnoise {
                horizon,
                ap,
                bp,
                die_index,
                grid,
                reps,
            } => shotnoise_cmd(horizon, ap, bp, die_index, grid, reps, seed),
            AppCmd::Gravity {
                preset,
                die,
                density,
                mass_mean,
                mass_sd,
                g,
                softening,
                z,
                w,
                reps,
            } => gravity_cmd(GravityArgs {
                preset,
                die,
                density,
                mass_mean,
                mass_sd,
                g,
                softening,
                z,
                w,
                reps,
                seed,
            }),
        },
        Command::Poly(PolyCmd::Report {
            k0,
            indices,
            degree,
            p,
            tail_tol,
            curve,
        }) => poly_report(k0, &indices, degree, &p, tail_tol, curve),
    }
}

// ---------------------------------------------------------------------------
// Output plumbing
// ---------------------------------------------------------------------------

struct CommandOutput {
    command: &'static str,
    payload: Value,
    headers: Vec<String>,
    rows: Vec<Vec<String>>,
}

fn render(out: &CommandOutput, format: Format) -> String {
    match format {
        Format::Json => {
            let envelope = json!({
                "schema_version": SCHEMA_VERSION,
                "command": out.command,
                "payload": out.payload,
            });
            let mut s = serde_json::to_string_pretty(&envelope).expect("serializable by construction");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut s = String::new();
            push_csv_row(&mut s, &out.headers);
            for row in &out.rows {
                push_csv_row(&mut s, row);
            }
            s
        }
        Format::Table => {
            let mut widths: Vec<usize> = out.headers.iter().map(|h| h.chars().count()).collect();
            for row in &out.rows {
                for (w, cell) in widths.iter_mut().zip(row) {
                    *w = (*w).max(cell.chars().count());
                }
            }
            let mut s = String::new();
            let fmt_row = |cells: &[String]| -> String {
                cells
                    .iter()
                    .zip(&widths)
                    .map(|(c, w)| format!("{c:<w$}"))
                    .collect::<Vec<_>>()
                    .join("  ")
                    .trim_end()
                    .to_string()
            };
            s.push_str(&fmt_row(&out.headers));
            s.push('\n');
            s.push_str(&widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("  "));
            s.push('\n');
            for row in &out.rows {
                s.push_str(&fmt_row(row));
                s.push('\n');
            }
            s
        }
    }
}

fn push_csv_row(buf: &mut String, cells: &[String]) {
    let escaped: Vec<String> = cells
        .iter()
        .map(|c| {
            if c.contains([',', '"', '\n']) {
                format!("\"{}\"", c.replace('"', "\"\""))
            } else {
                c.clone()
            }
        })
        .collect();
    buf.push_str(&escaped.join(","));
    buf.push('\n');
}

fn rat_json(r: &Rat) -> Value {
    json!({"exact": r.to_string(), "decimal": rat_to_f64(r)})
}

fn fnum(x: f64) -> String {
    format!("{x}")
}

// ---------------------------------------------------------------------------
// Argument parsing helpers
// ---------------------------------------------------------------------------

fn parse_biguint(s: &str) -> Result<BigUint> {
    s.trim()
        .parse::<BigUint>()
        .map_err(|_| Error::InvalidParameter(format!("expected a non-negative integer, got {s:?}")))
}

/// Accepts `P/Q`, plain integers, and decimals; a decimal is converted to
/// the exact rational its digits spell, with a note on stderr.
fn parse_rational(s: &str) -> Result<Rat> {
    let t = s.trim();
    if let Some((p, q)) = t.split_once('/') {
        let num: num_bigint::BigInt = p
            .trim()
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("bad rational numerator in {s:?}")))?;
        let den: num_bigint::BigInt = q
            .trim()
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("bad rational denominator in {s:?}")))?;
        if den == num_bigint::BigInt::from(0) {
            return Err(Error::InvalidParameter(format!("zero denominator in {s:?}")));
        }
        return Ok(Rat::new(num, den));
    }
    if let Some((int, frac)) = t.split_once('.') {
        let digits = format!("{}{}", int.trim_start_matches(['+', '-']), frac);
        if digits.chars().all(|c| c.is_ascii_digit()) && !frac.is_empty() {
            let num: num_bigint::BigInt = digits
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("bad decimal {s:?}")))?;
            let num = if t.starts_with('-') { -num } else { num };
            let den = num_bigint::BigInt::from(10u32).pow(frac.len() as u32);
            let r = Rat::new(num, den);
            eprintln!("note: decimal {t} read as the exact rational {r}");
            return Ok(r);
        }
        return Err(Error::InvalidParameter(format!("bad decimal {s:?}")));
    }
    let num: num_bigint::BigInt = t
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("expected P/Q, integer, or decimal, got {s:?}")))?;
    Ok(Rat::from_integer(num))
}

fn parse_u64_list(s: &str) -> Result<Vec<u64>> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<u64>()
                .map_err(|_| Error::InvalidParameter(format!("bad integer {p:?} in list {s:?}")))
        })
        .collect()
}

fn parse_f64_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidParameter(format!("bad number {p:?} in list {s:?}")))
        })
        .collect()
}

fn parse_point3(s: &str) -> Result<[f64; 3]> {
    let v = parse_f64_list(s)?;
    if v.len() != 3 {
        return Err(Error::InvalidParameter(format!(
            "expected X,Y,Z, got {} coordinates in {s:?}",
            v.len()
        )));
    }
    Ok([v[0], v[1], v[2]])
}

// ---------------------------------------------------------------------------
// dice
// ---------------------------------------------------------------------------

fn die_value(die: &dice::OrthogonalDie) -> Value {
    let (m, n) = (die.support().lower(), die.support().upper());
    json!({
        "index": die.index().to_string(),
        "position": die.position().to_string(),
        "m": m.to_string(),
        "n": n.to_string(),
        "c": die.mean().to_string(),
        "sides": die.sides().to_string(),
    })
}

fn die_rows(die: &dice::OrthogonalDie) -> Vec<String> {
    vec![
        die.position().to_string(),
        die.index().to_string(),
        die.support().lower().to_string(),
        die.support().upper().to_string(),
        die.mean().to_string(),
        die.sides().to_string(),
    ]
}

fn die_headers() -> Vec<String> {
    ["position", "index", "m", "n", "c", "sides"]
        .map(String::from)
        .to_vec()
}

fn die_output(command: &'static str, die: &dice::OrthogonalDie) -> CommandOutput {
    CommandOutput {
        command,
        payload: die_value(die),
        headers: die_headers(),
        rows: vec![die_rows(die)],
    }
}

fn dice_list(count: usize) -> Result<CommandOutput> {
    let dice = dice::enumerate_orthogonal(count);
    Ok(CommandOutput {
        command: "dice.list",
        payload: Value::Array(dice.iter().map(die_value).collect()),
        headers: die_headers(),
        rows: dice.iter().map(die_rows).collect(),
    })
}

fn dice_from_index(k: &str) -> Result<CommandOutput> {
    let die = dice::die_from_index(parse_biguint(k)?)?;
    Ok(die_output("dice.from-index", &die))
}

fn dice_from_prime(p: &str) -> Result<CommandOutput> {
    let die = dice::die_from_prime_product(parse_biguint(p)?)?;
    Ok(die_output("dice.from-prime", &die))
}

fn dice_classify(m: &str, n: &str) -> Result<CommandOutput> {
    let support = SupportPair::new(parse_biguint(m)?, parse_biguint(n)?)?;
    let class = dice::classify(&support);
    let variant = match class.variant {
        DiceClassKind::Orthogonal => "orthogonal",
        DiceClassKind::PositiveDie => "positive",
        DiceClassKind::NegativeDie => "negative",
    };
    let (mean, variance) = (support.mean(), support.variance());
    Ok(CommandOutput {
        command: "dice.classify",
        payload: json!({
            "m": support.lower().to_string(),
            "n": support.upper().to_string(),
            "class": variant,
            "degenerate": class.degenerate,
            "mean": rat_json(&mean),
            "variance": rat_json(&variance),
        }),
        headers: ["m", "n", "class", "degenerate", "mean", "variance"]
            .map(String::from)
            .to_vec(),
        rows: vec![vec![
            support.lower().to_string(),
            support.upper().to_string(),
            variant.to_string(),
            class.degenerate.to_string(),
            mean.to_string(),
            variance.to_string(),
        ]],
    })
}

fn dice_nearest(c: &str) -> Result<CommandOutput> {
    let target = parse_rational(c)?;
    let die = dice::nearest_die(&target)?;
    let distance = (big_to_rat(die.mean()) - &target).abs();
    let mut payload = die_value(&die);
    payload["target"] = rat_json(&target);
    payload["distance"] = rat_json(&distance);
    let mut headers = die_headers();
    headers.push("distance".into());
    let mut row = die_rows(&die);
    row.push(distance.to_string());
    Ok(CommandOutput {
        command: "dice.nearest",
        payload,
        headers,
        rows: vec![row],
    })
}

fn dice_first_at_least(c: &str) -> Result<CommandOutput> {
    let die = dice::first_die_with_mean_at_least(parse_biguint(c)?)?;
    Ok(die_output("dice.first-at-least", &die))
}

fn dice_decompose(k: &str) -> Result<CommandOutput> {
    let die = dice::die_from_index(parse_biguint(k)?)?;
    let (center, halfwidth) = die.decompose();
    Ok(CommandOutput {
        command: "dice.decompose",
        payload: json!({
            "index": die.index().to_string(),
            "center": center.to_string(),
            "halfwidth": halfwidth.to_string(),
            "support": format!("{{{} .. {}}}", die.support().lower(), die.support().upper()),
        }),
        headers: ["index", "center", "halfwidth", "support"]
            .map(String::from)
            .to_vec(),
        rows: vec![vec![
            die.index().to_string(),
            center.to_string(),
            halfwidth.to_string(),
            format!("{{{} .. {}}}", die.support().lower(), die.support().upper()),
        ]],
    })
}

// ---------------------------------------------------------------------------
// count
// ---------------------------------------------------------------------------

fn count_coprime23(n: &str, oracle: bool) -> Result<CommandOutput> {
    let n_big = parse_biguint(n)?;
    let closed = dice::count_coprime23(&n_big)?;
    let mut payload = json!({
        "n": n_big.to_string(),
        "count": closed.to_string(),
    });
    let mut headers = vec!["n".to_string(), "count".to_string()];
    let mut row = vec![n_big.to_string(), closed.to_string()];
    if oracle {
        let n_small = n_big.to_u64().filter(|&v| v <= 100_000_000).ok_or_else(|| {
            Error::InvalidParameter(format!("the gcd scan is capped at 1e8, got n = {n_big}"))
        })?;
        let scanned = dice::count_coprime23_oracle(n_small);
        payload["oracle"] = json!(scanned.to_string());
        payload["agreement"] = json!(BigUint::from(scanned) == closed);
        headers.extend(["oracle".to_string(), "agreement".to_string()]);
        row.push(scanned.to_string());
        row.push((BigUint::from(scanned) == closed).to_string());
    }
    Ok(CommandOutput {
        command: "count.coprime23",
        payload,
        headers,
        rows: vec![row],
    })
}

// ---------------------------------------------------------------------------
// law
// ---------------------------------------------------------------------------

fn thinning_from_flag(a: &str) -> Result<ThinningParam> {
    ThinningParam::new(parse_rational(a)?)
}

fn law_pmf(m: u64, n: u64, a: &str) -> Result<CommandOutput> {
    let support = SupportPair::new(m, n)?;
    let a = thinning_from_flag(a)?;
    let pmf = law::thinned_pmf(&support, &a)?;
    let mean = pmf.mean();
    let variance = pmf.variance();
    let entries: Vec<Value> = pmf
        .probs()
        .iter()
        .enumerate()
        .map(|(j, p)| {
            json!({
                "j": pmf.offset() + j as u64,
                "prob": rat_json(p),
            })
        })
        .collect();
    Ok(CommandOutput {
        command: "law.pmf",
        payload: json!({
            "m": m,
            "n": n,
            "a": rat_json(a.value()),
            "mean": rat_json(&mean),
            "variance": rat_json(&variance),
            "pmf": entries,
        }),
        headers: ["j", "prob_exact", "prob"].map(String::from).to_vec(),
        rows: pmf
            .probs()
            .iter()
            .enumerate()
            .map(|(j, p)| {
                vec![
                    (pmf.offset() + j as u64).to_string(),
                    p.to_string(),
                    fnum(rat_to_f64(p)),
                ]
            })
            .collect(),
    })
}

fn law_moments(m: u64, n: u64, a: &str, max_order: u32) -> Result<CommandOutput> {
    if max_order > 60 {
        return Err(Error::InvalidParameter(format!(
            "moment order is capped at 60, got {max_order}"
        )));
    }
    let support = SupportPair::new(m, n)?;
    let a = thinning_from_flag(a)?;
    let summary = law::MomentSummary::from_support(&support).thinned(&a);
    let mut rows = Vec::new();
    let mut entries = Vec::new();
    for r in 0..=max_order {
        let fact = law::factorial_moment(&support, &a, r);
        let raw = law::raw_moment(&support, &a, r);
        entries.push(json!({
            "order": r,
            "factorial": rat_json(&fact),
            "raw": rat_json(&raw),
        }));
        rows.push(vec![
            r.to_string(),
            fact.to_string(),
            fnum(rat_to_f64(&fact)),
            raw.to_string(),
            fnum(rat_to_f64(&raw)),
        ]);
    }
    Ok(CommandOutput {
        command: "law.moments",
        payload: json!({
            "m": m,
            "n": n,
            "a": rat_json(a.value()),
            "mean": rat_json(summary.c()),
            "variance": rat_json(summary.delta_sq()),
            "moments": entries,
        }),
        headers: ["order", "factorial_exact", "factorial", "raw_exact", "raw"]
            .map(String::from)
            .to_vec(),
        rows,
    })
}

fn law_converge(k0: u64, indices: &str, grid: usize, tail_tol: f64) -> Result<CommandOutput> {
    let indices = parse_u64_list(indices)?;
    let rows = law::convergence_sequence(k0, &indices, grid, tail_tol)?;
    Ok(CommandOutput {
        command: "law.converge",
        payload: json!({
            "k0": k0,
            "grid": grid,
            "tail_tol": tail_tol,
            "rows": rows
                .iter()
                .map(|r| {
                    json!({
                        "index": r.index,
                        "a": rat_json(&r.a),
                        "tv_distance": r.tv,
                        "pgf_sup_distance": r.sup,
                    })
                })
                .collect::<Vec<_>>(),
        }),
        headers: ["index", "a_exact", "a", "tv_distance", "pgf_sup_distance"]
            .map(String::from)
            .to_vec(),
        rows: rows
            .iter()
            .map(|r| {
                vec![
                    r.index.to_string(),
                    r.a.to_string(),
                    fnum(rat_to_f64(&r.a)),
                    fnum(r.tv),
                    fnum(r.sup),
                ]
            })
            .collect(),
    })
}

// ---------------------------------------------------------------------------
// sim
// ---------------------------------------------------------------------------

enum PointSpec {
    Uniform { lo: f64, hi: f64 },
    Gauss { coords: Vec<(f64, f64)> },
    Atoms { weights: Vec<f64> },
}

struct ModelSpec {
    count: CountLaw,
    points: PointSpec,
    marks: Option<(f64, f64)>,
}

fn parse_model(spec: &str) -> Result<ModelSpec> {
    let mut count = None;
    let mut points = None;
    let mut marks = None;
    for segment in spec.split('|') {
        let (kind, args) = segment
            .split_once(':')
            .ok_or_else(|| Error::InvalidParameter(format!("model segment {segment:?} needs KIND:ARGS")))?;
        match kind.trim() {
            "die" => {
                let v = parse_u64_list(args)?;
                if v.len() != 2 {
                    return Err(Error::InvalidParameter(format!("die needs M,N, got {args:?}")));
                }
                count = Some(CountLaw::uniform(v[0], v[1])?);
            }
            "uniform" => {
                let v = parse_f64_list(args)?;
                if v.len() != 2 {
                    return Err(Error::InvalidParameter(format!("uniform needs LO,HI, got {args:?}")));
                }
                points = Some(PointSpec::Uniform { lo: v[0], hi: v[1] });
            }
            "gauss" => {
                let coords: Vec<(f64, f64)> = args
                    .split(';')
                    .map(|pair| {
                        let v = parse_f64_list(pair)?;
                        if v.len() != 2 {
                            return Err(Error::InvalidParameter(format!(
                                "each gauss coordinate needs MEAN,SD, got {pair:?}"
                            )));
                        }
                        Ok((v[0], v[1]))
                    })
                    .collect::<Result<_>>()?;
                points = Some(PointSpec::Gauss { coords });
            }
            "atoms" => {
                points = Some(PointSpec::Atoms {
                    weights: parse_f64_list(args)?,
                });
            }
            "lognormal" => {
                let v = parse_f64_list(args)?;
                if v.len() != 2 {
                    return Err(Error::InvalidParameter(format!(
                        "lognormal needs MU,SIGMA, got {args:?}"
                    )));
                }
                marks = Some((v[0], v[1]));
            }
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown model segment kind {other:?} (expected die, uniform, gauss, atoms, or lognormal)"
                )))
            }
        }
    }
    Ok(ModelSpec {
        count: count.ok_or_else(|| Error::InvalidParameter("model needs a die:M,N segment".into()))?,
        points: points
            .ok_or_else(|| Error::InvalidParameter("model needs a point segment (uniform, gauss, or atoms)".into()))?,
        marks,
    })
}

fn functional_args(spec: &str) -> Result<Vec<f64>> {
    match spec.split_once(':') {
        None => Ok(Vec::new()),
        Some((_, args)) => parse_f64_list(args),
    }
}

fn scalar_functional(spec: &str) -> Result<Functional<f64>> {
    let kind = spec.split(':').next().unwrap_or("").trim();
    let args = functional_args(spec)?;
    match (kind, args.as_slice()) {
        ("count", []) => Ok(Functional::counting(spec.to_string(), Arc::new(|_| true))),
        ("mass", []) => Ok(Functional::new(spec.to_string(), |_: &f64, y| y)),
        ("window", [a, b]) => {
            let (a, b) = (*a, *b);
            Ok(Functional::counting(
                spec.to_string(),
                Arc::new(move |x: &f64| (a..=b).contains(x)),
            ))
        }
        ("exp", [a, b]) => {
            let (a, b) = (*a, *b);
            Ok(Functional::new(spec.to_string(), move |x: &f64, y| {
                y * a * (-b * x).exp()
            }))
        }
        _ => Err(Error::InvalidParameter(format!(
            "functional {spec:?} is not valid for scalar points (expected count, mass, window:A,B, or exp:A,B)"
        ))),
    }
}

fn vector_functional(spec: &str) -> Result<Functional<Vec<f64>>> {
    let kind = spec.split(':').next().unwrap_or("").trim();
    let args = functional_args(spec)?;
    match (kind, args.as_slice()) {
        ("count", []) => Ok(Functional::counting(spec.to_string(), Arc::new(|_| true))),
        ("mass", []) => Ok(Functional::new(spec.to_string(), |_: &Vec<f64>, y| y)),
        ("ball", [r]) => {
            let r2 = r * r;
            Ok(Functional::counting(
                spec.to_string(),
                Arc::new(move |x: &Vec<f64>| x.iter().map(|v| v * v).sum::<f64>() <= r2),
            ))
        }
        _ => Err(Error::InvalidParameter(format!(
            "functional {spec:?} is not valid for vector points (expected count, mass, or ball:R)"
        ))),
    }
}

fn atom_functional(spec: &str) -> Result<Functional<usize>> {
    let kind = spec.split(':').next().unwrap_or("").trim();
    let args = functional_args(spec)?;
    match (kind, args.as_slice()) {
        ("count", []) => Ok(Functional::counting(spec.to_string(), Arc::new(|_| true))),
        ("mass", []) => Ok(Functional::new(spec.to_string(), |_: &usize, y| y)),
        ("atom", [i]) => {
            let target = *i as usize;
            Ok(Functional::counting(
                spec.to_string(),
                Arc::new(move |x: &usize| *x == target),
            ))
        }
        _ => Err(Error::InvalidParameter(format!(
            "functional {spec:?} is not valid for atom points (expected count, mass, or atom:I)"
        ))),
    }
}

fn sim_estimate(model: &str, functional: &str, reps: u64, seed: u64) -> Result<CommandOutput> {
    let spec = parse_model(model)?;
    let report = match spec.points {
        PointSpec::Uniform { lo, hi } => {
            let mut m = MeasureModel::new(spec.count, samplers::uniform_interval(lo, hi)?);
            if let Some((mu, sigma)) = spec.marks {
                m = m.with_marks(samplers::lognormal_mark(mu, sigma)?);
            }
            sim::estimate_functional(&m, &scalar_functional(functional)?, reps, seed)?
        }
        PointSpec::Gauss { coords } => {
            let mut m = MeasureModel::new(spec.count, samplers::gaussian_product(&coords)?);
            if let Some((mu, sigma)) = spec.marks {
                m = m.with_marks(samplers::lognormal_mark(mu, sigma)?);
            }
            sim::estimate_functional(&m, &vector_functional(functional)?, reps, seed)?
        }
        PointSpec::Atoms { weights } => {
            let mut m = MeasureModel::new(spec.count, samplers::finite_atoms(&weights)?);
            if let Some((mu, sigma)) = spec.marks {
                m = m.with_marks(samplers::lognormal_mark(mu, sigma)?);
            }
            sim::estimate_functional(&m, &atom_functional(functional)?, reps, seed)?
        }
    };
    Ok(CommandOutput {
        command: "sim.estimate",
        payload: serde_json::to_value(&report).expect("report serializes"),
        headers: ["quantity", "estimate", "std_error", "reps", "seed"]
            .map(String::from)
            .to_vec(),
        rows: vec![vec![
            report.quantity.clone(),
            fnum(report.point_estimate),
            fnum(report.std_error),
            report.n_replicates.to_string(),
            report.seed.to_string(),
        ]],
    })
}

// ---------------------------------------------------------------------------
// app cards
// ---------------------------------------------------------------------------

fn cards_table(m: &str, n: &str) -> Result<CommandOutput> {
    let support = SupportPair::new(parse_biguint(m)?, parse_biguint(n)?)?;
    let t = cards::cards_covariance_table(&support);
    Ok(CommandOutput {
        command: "app.cards.table",
        payload: json!({
            "m": support.lower().to_string(),
            "n": support.upper().to_string(),
            "c": rat_json(&t.c),
            "delta_sq": rat_json(&t.delta_sq),
            "score_mean": rat_json(&t.mean),
            "score_variance": rat_json(&t.variance),
            "score_covariance": rat_json(&t.covariance),
            "score_correlation": t.correlation,
        }),
        headers: [
            "m",
            "n",
            "c",
            "delta_sq",
            "score_mean",
            "score_variance",
            "score_covariance",
            "score_correlation",
        ]
        .map(String::from)
        .to_vec(),
        rows: vec![vec![
            support.lower().to_string(),
            support.upper().to_string(),
            t.c.to_string(),
            t.delta_sq.to_string(),
            t.mean.to_string(),
            t.variance.to_string(),
            t.covariance.to_string(),
            fnum(t.correlation),
        ]],
    })
}

fn cards_partition(hand: u64, counts: &str) -> Result<CommandOutput> {
    let counts = parse_u64_list(counts)?;
    let (hyper, multi) = cards::cards_partition_pmf(hand, &counts)?;
    Ok(CommandOutput {
        command: "app.cards.partition",
        payload: json!({
            "hand": hand,
            "counts": counts,
            "hypergeometric": rat_json(&hyper),
            "multinomial": rat_json(&multi),
        }),
        headers: [
            "hand",
            "counts",
            "hypergeometric_exact",
            "hypergeometric",
            "multinomial_exact",
            "multinomial",
        ]
        .map(String::from)
        .to_vec(),
        rows: vec![vec![
            hand.to_string(),
            counts
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join("+"),
            hyper.to_string(),
            fnum(rat_to_f64(&hyper)),
            multi.to_string(),
            fnum(rat_to_f64(&multi)),
        ]],
    })
}

fn cards_game(m: &str, n: &str, rounds: u64, seed: u64, scatter: bool) -> Result<CommandOutput> {
    let support = SupportPair::new(parse_biguint(m)?, parse_biguint(n)?)?;
    let report = cards::cards_game_simulation(&support, rounds, seed)?;
    let class = match report.class {
        DiceClassKind::Orthogonal => "orthogonal",
        DiceClassKind::PositiveDie => "positive",
        DiceClassKind::NegativeDie => "negative",
    };
    let strategy = |s: cards::Strategy| format!("{s:?}").to_lowercase();
    let mut payload = json!({
        "m": support.lower().to_string(),
        "n": support.upper().to_string(),
        "class": class,
        "recommended": strategy(report.recommended),
        "copy": {"accuracy": report.copy.accuracy, "std_error": report.copy.std_error},
        "anticopy": {"accuracy": report.anticopy.accuracy, "std_error": report.anticopy.std_error},
        "coin": {"accuracy": report.coin.accuracy, "std_error": report.coin.std_error},
        "n_rounds": report.n_rounds,
        "seed": report.seed,
    });
    if scatter {
        payload["scatter"] = Value::Array(
            report
                .scatter_counts
                .iter()
                .zip(&report.scatter_scores)
                .enumerate()
                .map(|(i, (&(ks, kd), &(ss, sd)))| {
                    json!({
                        "round": i,
                        "count_spade": ks,
                        "count_diamond": kd,
                        "score_spade": ss,
                        "score_diamond": sd,
                    })
                })
                .collect(),
        );
        let rows = report
            .scatter_counts
            .iter()
            .zip(&report.scatter_scores)
            .enumerate()
            .map(|(i, (&(ks, kd), &(ss, sd)))| {
                vec![
                    i.to_string(),
                    ks.to_string(),
                    kd.to_string(),
                    ss.to_string(),
                    sd.to_string(),
                ]
            })
            .collect();
        return Ok(CommandOutput {
            command: "app.cards.game",
            payload,
            headers: [
                "round",
                "count_spade",
                "count_diamond",
                "score_spade",
                "score_diamond",
            ]
            .map(String::from)
            .to_vec(),
            rows,
        });
    }
    let rows = vec![
        ("copy", &report.copy),
        ("anticopy", &report.anticopy),
        ("coin", &report.coin),
    ]
    .into_iter()
    .map(|(name, acc)| {
        vec![
            name.to_string(),
            fnum(acc.accuracy),
            fnum(acc.std_error),
            class.to_string(),
            strategy(report.recommended),
        ]
    })
    .collect();
    Ok(CommandOutput {
        command: "app.cards.game",
        payload,
        headers: ["strategy", "accuracy", "std_error", "class", "recommended"]
            .map(String::from)
            .to_vec(),
        rows,
    })
}

// ---------------------------------------------------------------------------
// app goe
// ---------------------------------------------------------------------------

fn goe_summary(r_grid: Option<&str>) -> Result<CommandOutput> {
    let grid = match r_grid {
        Some(s) => parse_f64_list(s)?,
        None => goe::default_r_grid(),
    };
    if grid.is_empty() {
        return Err(Error::InvalidParameter("the r grid must be nonempty".into()));
    }
    let rows = goe::goe_summary(&grid);
    Ok(CommandOutput {
        command: "app.goe.summary",
        payload: serde_json::to_value(&rows).expect("rows serialize"),
        headers: [
            "r",
            "a_r",
            "nu_f",
            "nu_f2",
            "var_ratio_orthogonal",
            "var_ratio_dirac",
            "dirac_cross_covariance",
        ]
        .map(String::from)
        .to_vec(),
        rows: rows
            .iter()
            .map(|row| {
                vec![
                    fnum(row.r),
                    fnum(row.a_r),
                    fnum(row.nu_f),
                    fnum(row.nu_f2),
                    fnum(row.var_ratio_orthogonal),
                    fnum(row.var_ratio_dirac),
                    fnum(row.dirac_cross_covariance),
                ]
            })
            .collect(),
    })
}

fn goe_wigner(n: u64, seed: u64) -> Result<CommandOutput> {
    let mc = goe::wigner_gap_mc(n, seed)?;
    let ks = goe::gap_ks_test(n, seed);
    Ok(CommandOutput {
        command: "app.goe.wigner",
        payload: json!({
            "mc": serde_json::to_value(&mc).expect("serializes"),
            "ks": serde_json::to_value(ks).expect("serializes"),
        }),
        headers: [
            "n_samples",
            "seed",
            "mean",
            "mean_se",
            "second_moment",
            "second_moment_se",
            "ks_statistic",
            "ks_passes_1pct",
        ]
        .map(String::from)
        .to_vec(),
        rows: vec![vec![
            mc.n_samples.to_string(),
            mc.seed.to_string(),
            fnum(mc.mean),
            fnum(mc.mean_se),
            fnum(mc.second_moment),
            fnum(mc.second_moment_se),
            fnum(ks.statistic),
            ks.passes_1pct.to_string(),
        ]],
    })
}

fn goe_window(r: f64, proposals: u64, seed: u64) -> Result<CommandOutput> {
    let mc = goe::window_mc(r, proposals, seed)?;
    let reference = goe::window_moments(r);
    Ok(CommandOutput {
        command: "app.goe.window",
        payload: json!({
            "mc": serde_json::to_value(&mc).expect("serializes"),
            "reference": serde_json::to_value(reference).expect("serializes"),
        }),
        headers: [
            "r",
            "hit_rate",
            "hit_rate_se",
            "a_r",
            "nu_f",
            "nu_f_se",
            "nu_f_ref",
            "nu_f2",
            "nu_f2_se",
            "nu_f2_ref",
        ]
        .map(String::from)
        .to_vec(),
        rows: vec![vec![
            fnum(r),
            fnum(mc.hit_rate),
            fnum(mc.hit_rate_se),
            fnum(reference.a_r),
            fnum(mc.nu_f),
            fnum(mc.nu_f_se),
            fnum(reference.nu_f),
            fnum(mc.nu_f2),
            fnum(mc.nu_f2_se),
            fnum(reference.nu_f2),
        ]],
    })
}

// ---------------------------------------------------------------------------
// app shotnoise
// ---------------------------------------------------------------------------

fn shotnoise_cmd(
    horizon: f64,
    ap: f64,
    bp: f64,
    die_index: u64,
    grid: usize,
    reps: u64,
    seed: u64,
) -> Result<CommandOutput> {
    let die = dice::die_from_index(die_index)?;
    let (m, n) = die.support().as_u64_pair().ok_or_else(|| {
        Error::SupportTooLarge(format!("die {die_index} does not fit the simulator"))
    })?;
    let model = shotnoise::ShotNoiseModel::new(CountLaw::uniform(m, n)?, ap, bp, horizon)?;
    if grid == 0 {
        return Err(Error::InvalidParameter("the time grid must be nonempty".into()));
    }
    let times = shotnoise::default_time_grid(horizon, grid);
    let report = shotnoise::shotnoise_simulate(&model, &times, reps, seed)?;
    Ok(CommandOutput {
        command: "app.shotnoise",
        payload: serde_json::to_value(&report).expect("serializes"),
        headers: [
            "t",
            "closed_mean",
            "closed_variance",
            "closed_covariance_with_end",
            "mean",
            "mean_se",
            "variance",
            "variance_se",
            "covariance_with_end",
            "covariance_with_end_se",
        ]
        .map(String::from)
        .to_vec(),
        rows: report
            .points
            .iter()
            .map(|p| {
                vec![
                    fnum(p.t),
                    fnum(p.closed_mean),
                    fnum(p.closed_variance),
                    fnum(p.closed_covariance_with_end),
                    fnum(p.mean),
                    fnum(p.mean_se),
                    fnum(p.variance),
                    fnum(p.variance_se),
                    fnum(p.covariance_with_end),
                    fnum(p.covariance_with_end_se),
                ]
            })
            .collect(),
    })
}

// ---------------------------------------------------------------------------
// app gravity
// ---------------------------------------------------------------------------

struct GravityArgs {
    preset: Option<String>,
    die: Option<String>,
    density: Option<String>,
    mass_mean: f64,
    mass_sd: f64,
    g: f64,
    softening: Option<String>,
    z: Option<String>,
    w: Option<String>,
    reps: Option<u64>,
    seed: u64,
}

fn parse_density(spec: &str) -> Result<gravity::SpatialDensity> {
    let (kind, args) = spec
        .split_once(':')
        .ok_or_else(|| Error::InvalidParameter(format!("density {spec:?} needs KIND:ARGS")))?;
    let v = parse_f64_list(args)?;
    match (kind.trim(), v.as_slice()) {
        ("blob", [sigma]) => gravity::SpatialDensity::gaussian_blob(*sigma),
        ("disk", [rd, hz]) => gravity::SpatialDensity::exponential_disk(*rd, *hz),
        _ => Err(Error::InvalidParameter(format!(
            "density {spec:?} not recognized (expected blob:SIGMA or disk:RADIUS,HEIGHT)"
        ))),
    }
}

fn gravity_cmd(args: GravityArgs) -> Result<CommandOutput> {
    let (model, facts) = match args.preset.as_deref() {
        Some("milkyway") => {
            let preset = gravity::milkyway_preset()?;
            (preset.model, Some(preset.facts))
        }
        Some(other) => {
            return Err(Error::InvalidParameter(format!(
                "unknown preset {other:?} (available: milkyway)"
            )))
        }
        None => {
            let die = args.die.as_deref().ok_or_else(|| {
                Error::InvalidParameter("custom gravity runs need --die M,N".into())
            })?;
            let density = args.density.as_deref().ok_or_else(|| {
                Error::InvalidParameter(
                    "custom gravity runs need --density blob:SIGMA or disk:RADIUS,HEIGHT".into(),
                )
            })?;
            let v = parse_u64_list(die)?;
            if v.len() != 2 {
                return Err(Error::InvalidParameter(format!("--die needs M,N, got {die:?}")));
            }
            let model = gravity::GravityModel::new(
                CountLaw::uniform(v[0], v[1])?,
                parse_density(density)?,
                args.mass_mean,
                args.mass_sd,
                args.g,
            )?;
            (model, None)
        }
    };
    let model = match args.softening.as_deref() {
        None => model,
        Some("none") => model.with_softening(None)?,
        Some(s) => {
            let eps = s.parse::<f64>().map_err(|_| {
                Error::InvalidParameter(format!("--softening needs a number or `none`, got {s:?}"))
            })?;
            model.with_softening(Some(eps))?
        }
    };
    let third = model.density().diameter() / 3.0;
    let z = match &args.z {
        Some(s) => parse_point3(s)?,
        None => [third, 0.0, 0.0],
    };
    let w = match &args.w {
        Some(s) => parse_point3(s)?,
        None => [0.0, 0.0, third],
    };
    let mut payload = json!({
        "model": serde_json::to_value(&model).expect("serializes"),
        "z": z.to_vec(),
        "w": w.to_vec(),
    });
    if let Some(f) = &facts {
        payload["facts"] = serde_json::to_value(f).expect("serializes");
    }
    let mut rows: Vec<Vec<String>> = Vec::new();
    if let Some(f) = &facts {
        for (k, v) in [
            ("lower", f.lower.clone()),
            ("upper", f.upper.clone()),
            ("mean_count", f.mean_count.clone()),
            ("sides", f.sides.to_string()),
            (
                "sides_prime_rank",
                f.sides_prime_rank.map_or("not prime".into(), |r| r.to_string()),
            ),
            ("family_index", f.family_index.clone()),
            ("mass_mean_times_count", f.mass_mean_times_count.clone()),
        ] {
            rows.push(vec![k.to_string(), v, String::new(), String::new()]);
        }
    }
    match args.reps {
        None => {
            let reference = gravity::potential_reference(&model, z, w)?;
            for (k, v) in [
                ("mean_z", reference.mean_z),
                ("var_z", reference.var_z),
                ("mean_w", reference.mean_w),
                ("var_w", reference.var_w),
                ("cov_wz", reference.cov_wz),
                ("mass_captured", reference.mass_captured),
            ] {
                rows.push(vec![k.to_string(), fnum(v), String::new(), String::new()]);
            }
            payload["reference"] = serde_json::to_value(&reference).expect("serializes");
        }
        Some(reps) => {
            let study = gravity::gravity_estimate(&model, z, w, reps, args.seed)?;
            for (k, est, se, reference) in [
                ("mean_z", study.mean_z, study.mean_z_se, study.reference.mean_z),
                ("var_z", study.var_z, study.var_z_se, study.reference.var_z),
                ("mean_w", study.mean_w, study.mean_w_se, study.reference.mean_w),
                ("var_w", study.var_w, study.var_w_se, study.reference.var_w),
                ("cov_wz", study.cov_wz, study.cov_wz_se, study.reference.cov_wz),
            ] {
                rows.push(vec![k.to_string(), fnum(est), fnum(se), fnum(reference)]);
            }
            payload["study"] = serde_json::to_value(&study).expect("serializes");
        }
    }
    Ok(CommandOutput {
        command: "app.gravity",
        payload,
        headers: ["quantity", "value", "std_error", "reference"]
            .map(String::from)
            .to_vec(),
        rows,
    })
}

// ---------------------------------------------------------------------------
// poly
// ---------------------------------------------------------------------------

fn poly_report(
    k0: u64,
    indices: &str,
    degree: usize,
    p: &str,
    tail_tol: f64,
    curve: bool,
) -> Result<CommandOutput> {
    let indices = parse_u64_list(indices)?;
    let p_list: Vec<u32> = parse_u64_list(p)?
        .into_iter()
        .map(|v| {
            u32::try_from(v)
                .map_err(|_| Error::InvalidParameter(format!("L^p exponent {v} is too large")))
        })
        .collect::<Result<_>>()?;
    let report = orthopoly::convergence_report(k0, &indices, degree, &p_list, tail_tol)?;
    let payload = json!({
        "k0": k0,
        "theta": rat_json(&report.theta),
        "degree": report.degree,
        "p_list": report.p_list,
        "entries": report
            .entries
            .iter()
            .map(|e| {
                json!({
                    "index": e.index,
                    "a": rat_json(&e.a),
                    "distances": e
                        .distances
                        .iter()
                        .zip(&report.p_list)
                        .map(|(d, p)| {
                            json!({
                                "p": p,
                                "value": d.value,
                                "truncation_point": d.truncation_point,
                            })
                        })
                        .collect::<Vec<_>>(),
                })
            })
            .collect::<Vec<_>>(),
        "curve": {
            "degree": report.curve.degree,
            "xs": report.curve.xs,
            "weight": report.curve.weight,
            "charlier": report.curve.charlier,
            "dice": report
                .curve
                .dice
                .iter()
                .map(|(l, ys)| json!({"index": l, "values": ys}))
                .collect::<Vec<_>>(),
        },
    });
    if curve {
        let mut headers = vec!["x".to_string(), "weight".to_string(), "charlier".to_string()];
        for (l, _) in &report.curve.dice {
            headers.push(format!("die_{l}"));
        }
        let rows = report
            .curve
            .xs
            .iter()
            .enumerate()
            .map(|(i, x)| {
                let mut row = vec![
                    x.to_string(),
                    fnum(report.curve.weight[i]),
                    fnum(report.curve.charlier[i]),
                ];
                for (_, ys) in &report.curve.dice {
                    row.push(fnum(ys[i]));
                }
                row
            })
            .collect();
        return Ok(CommandOutput {
            command: "poly.report",
            payload,
            headers,
            rows,
        });
    }
    let mut headers = vec!["index".to_string(), "a_exact".to_string(), "a".to_string()];
    for p in &report.p_list {
        headers.push(format!("distance_p{p}"));
        headers.push(format!("truncation_p{p}"));
    }
    let rows = report
        .entries
        .iter()
        .map(|e| {
            let mut row = vec![
                e.index.to_string(),
                e.a.to_string(),
                fnum(rat_to_f64(&e.a)),
            ];
            for d in &e.distances {
                row.push(fnum(d.value));
                row.push(d.truncation_point.to_string());
            }
            row
        })
        .collect();
    Ok(CommandOutput {
        command: "poly.report",
        payload,
        headers,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_flag_accepts_all_three_spellings() {
        assert_eq!(parse_rational("7/4").unwrap(), Rat::new(7.into(), 4.into()));
        assert_eq!(parse_rational("3").unwrap(), Rat::from_integer(3.into()));
        // Decimals convert to the exact rational they spell.
        assert_eq!(parse_rational("0.25").unwrap(), Rat::new(1.into(), 4.into()));
        assert_eq!(
            parse_rational("-1.5").unwrap(),
            Rat::new((-3).into(), 2.into())
        );
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn model_grammar_round_trips() {
        let m = parse_model("die:96,132|uniform:0,1").unwrap();
        assert!(matches!(m.points, PointSpec::Uniform { lo, hi } if lo == 0.0 && hi == 1.0));
        assert!(m.marks.is_none());
        let m = parse_model("die:1,6|gauss:0,1;2,0.5|lognormal:0,1").unwrap();
        assert!(matches!(&m.points, PointSpec::Gauss { coords } if coords.len() == 2));
        assert_eq!(m.marks, Some((0.0, 1.0)));
        assert!(parse_model("uniform:0,1").is_err());
        assert!(parse_model("die:96,132").is_err());
        assert!(parse_model("die:96,132|wedge:1").is_err());
    }

    #[test]
    fn functional_grammar_rejects_mismatches() {
        assert!(scalar_functional("count").is_ok());
        assert!(scalar_functional("window:0.2,0.7").is_ok());
        assert!(scalar_functional("exp:1.5,0.9").is_ok());
        assert!(scalar_functional("ball:1").is_err());
        assert!(vector_functional("ball:1").is_ok());
        assert!(vector_functional("window:0,1").is_err());
        assert!(atom_functional("atom:2").is_ok());
        assert!(atom_functional("exp:1,1").is_err());
    }

    #[test]
    fn csv_cells_are_escaped() {
        let mut s = String::new();
        push_csv_row(
            &mut s,
            &["plain".to_string(), "with,comma".to_string(), "with\"quote".to_string()],
        );
        assert_eq!(s, "plain,\"with,comma\",\"with\"\"quote\"\n");
    }

    #[test]
    fn json_envelope_has_schema_fields() {
        let out = dice_list(3).unwrap();
        let rendered = render(&out, Format::Json);
        let v: Value = serde_json::from_str(&rendered).unwrap();
        assert_eq!(v["schema_version"], SCHEMA_VERSION);
        assert_eq!(v["command"], "dice.list");
        assert!(v["payload"].is_array());
        let csv = render(&out, Format::Csv);
        assert!(csv.starts_with("position,index,m,n,c,sides\n"));
        assert_eq!(csv.lines().count(), 4);
    }

    #[test]
    fn table_lists_first_dice_in_order() {
        let out = dice_list(2).unwrap();
        assert_eq!(out.rows[0][2], "0"); // k = 1: support {0..4}
        assert_eq!(out.rows[0][3], "4");
        assert_eq!(out.rows[1][2], "1"); // k = 2: support {1..7}
        assert_eq!(out.rows[1][3], "7");
    }

    #[test]
    fn gravity_args_reject_incomplete_custom_models() {
        let base = GravityArgs {
            preset: None,
            die: None,
            density: None,
            mass_mean: 1.0,
            mass_sd: 0.0,
            g: 1.0,
            softening: None,
            z: None,
            w: None,
            reps: None,
            seed: 0,
        };
        assert!(gravity_cmd(base).is_err());
    }
}
