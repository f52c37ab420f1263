//! Subcommands and their exit codes.
//!
//! Exit codes: 0 success (solve: found), 1 no solution or a bound failed,
//! 2 inconclusive, 64 usage or parse error, 65 capacity, 70 precision,
//! 74 I/O.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use expcong::census::{
    census_with, count_all_b_with, count_brute, count_via_charsum, min_r, weil_check, ConvolutionMethod, DeltaPolicy,
    EquationInstance, SearchRegion,
};
use expcong::ff::FieldElement;
use expcong::fmt::sig12;
use expcong::qmodel::{
    cost_report_with, grover_closed_form, log_spaced_primes, quantum_solve_simulated_with, ratio_scan, CostReport,
    GroverMode, GroverSearch, MSource, OrderPolicy,
};
use expcong::solver::{solve_classical_with, SolveCase, SolveStatus};
use expcong::Error;
use serde::Serialize;

use crate::config::{ConfigError, LimitsConfig, RunConfig, TermList};

pub const EXIT_USAGE: u8 = 64;
pub const EXIT_CAPACITY: u8 = 65;
pub const EXIT_PRECISION: u8 = 70;
pub const EXIT_IO: u8 = 74;

#[derive(Parser, Debug)]
#[command(name = "expcong", version, about = "Exponential congruences over finite fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Find a solution or decide there is none.
    Solve(SolveArgs),
    /// Exact counts for every target, deviations and their mean square.
    Census(CensusArgs),
    /// Number of solutions for one target or all of them.
    Count(CountArgs),
    /// Complete subgroup character sums against the square-root bound.
    Weil(WeilArgs),
    /// Simulated quantum search over a synthetic marked set.
    Grover(GroverArgs),
    /// Classical work and quantum query counts for an instance.
    Costs(CostsArgs),
    /// Growth exponents of the costs across prime fields.
    Scan(ScanArgs),
}

#[derive(Args, Debug, Clone)]
struct InstanceArgs {
    /// TOML run configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// `p`, `p^nu` or `p^nu/c0,...,cnu`.
    #[arg(long)]
    field: Option<String>,
    /// Comma-separated `a:g` pairs of element encodings.
    #[arg(long)]
    terms: Option<String>,
    #[arg(long)]
    b: Option<u64>,
    /// `sqrt-log`, `log^<eps>` or a positive number.
    #[arg(long)]
    delta: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the resolved configuration as TOML and exit.
    #[arg(long)]
    emit_config: bool,
    /// Emit one JSON document instead of text or CSV.
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    inst: InstanceArgs,
    /// Scan the whole grid instead of the truncated region.
    #[arg(long)]
    full_scan: bool,
    /// Simulated quantum search instead of the classical scan.
    #[arg(long)]
    quantum: bool,
}

#[derive(Args, Debug)]
struct CensusArgs {
    #[command(flatten)]
    inst: InstanceArgs,
    /// Truncation length: an integer or `auto`; the full last period when absent.
    #[arg(long)]
    r: Option<String>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CountMethod {
    Auto,
    Direct,
    Fft,
    Brute,
    Charsum,
}

#[derive(Args, Debug)]
struct CountArgs {
    #[command(flatten)]
    inst: InstanceArgs,
    #[arg(long)]
    r: Option<String>,
    /// Every target as CSV `b,N`.
    #[arg(long)]
    all: bool,
    #[arg(long, value_enum, default_value = "auto")]
    method: CountMethod,
}

#[derive(Args, Debug)]
struct WeilArgs {
    #[arg(long)]
    field: String,
    #[arg(long, default_value_t = 1)]
    a: u64,
    #[arg(long)]
    g: u64,
    /// A single nonzero character index; all of them when absent.
    #[arg(long)]
    mu: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Known,
    Bbht,
}

#[derive(Args, Debug)]
struct GroverArgs {
    /// Search space size.
    #[arg(long)]
    t: u64,
    /// Marked indices, comma-separated.
    #[arg(long, conflicts_with = "m")]
    marked: Option<String>,
    /// Mark the first `m` indices.
    #[arg(long)]
    m: Option<u64>,
    #[arg(long, value_enum, default_value = "bbht")]
    mode: ModeArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Repeat with split seeds and report aggregates.
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MSourceArg {
    Census,
    MainTerm,
}

#[derive(Args, Debug)]
struct CostsArgs {
    #[command(flatten)]
    inst: InstanceArgs,
    #[arg(long, value_enum, default_value = "census")]
    m_source: MSourceArg,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PolicyArg {
    MaxOrder,
    WorstCase,
}

#[derive(Args, Debug)]
struct ScanArgs {
    /// Explicit primes, comma-separated.
    #[arg(long)]
    primes: Option<String>,
    #[arg(long, default_value_t = 1000)]
    lo: u64,
    #[arg(long, default_value_t = 100_000)]
    hi: u64,
    #[arg(long, default_value_t = 9)]
    count: usize,
    #[arg(long, value_enum, default_value = "max-order")]
    policy: PolicyArg,
    /// Number of terms, 2 or 3.
    #[arg(long, default_value_t = 3)]
    vars: usize,
    #[arg(long, default_value = "sqrt-log")]
    delta: String,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

enum Failure {
    Usage(String),
    Lib(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::Lib(e) => Failure::Lib(e),
            ConfigError::Io(..) => Failure::Io(e.to_string()),
            ConfigError::Toml(_) => Failure::Usage(e.to_string()),
        }
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Io(_) => EXIT_IO,
            Failure::Lib(Error::Capacity { .. }) => EXIT_CAPACITY,
            Failure::Lib(Error::Precision(_)) => EXIT_PRECISION,
            Failure::Lib(_) => EXIT_USAGE,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) | Failure::Io(m) => m.clone(),
            Failure::Lib(e) => e.to_string(),
        }
    }
}

type Outcome = Result<u8, Failure>;

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Io<'_> {
    fn io(e: io::Error) -> Failure {
        Failure::Io(e.to_string())
    }

    fn line(&mut self, s: &str) -> Result<(), Failure> {
        writeln!(self.out, "{s}").map_err(Self::io)
    }

    fn warn(&mut self, s: &str) -> Result<(), Failure> {
        writeln!(self.err, "warning: {s}").map_err(Self::io)
    }

    /// The main payload to `path` or standard output; the summary follows it
    /// on standard output when the payload went to a file, otherwise on
    /// standard error so the payload stays machine-readable.
    fn emit(&mut self, payload: &[u8], summary: &[String], path: Option<&Path>) -> Result<(), Failure> {
        match path {
            Some(p) => {
                let mut f = File::create(p).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?;
                f.write_all(payload).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?;
                for s in summary {
                    self.line(s)?;
                }
            }
            None => {
                self.out.write_all(payload).map_err(Self::io)?;
                for s in summary {
                    writeln!(self.err, "{s}").map_err(Self::io)?;
                }
            }
        }
        Ok(())
    }

    fn json<T: Serialize>(&mut self, value: &T, path: Option<&Path>) -> Result<(), Failure> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::Io(e.to_string()))?;
        text.push('\n');
        self.emit(text.as_bytes(), &[], path)
    }
}

fn resolve(args: &InstanceArgs) -> Result<RunConfig, Failure> {
    let mut cfg = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig {
            field: String::new(),
            terms: TermList(Vec::new()),
            b: 0,
            delta: DeltaPolicy::SqrtLog,
            seed: 0,
            out: None,
            limits: LimitsConfig::default(),
        },
    };
    if let Some(f) = &args.field {
        cfg.field = f.clone();
    }
    if let Some(t) = &args.terms {
        cfg.terms = t.parse()?;
    }
    if let Some(b) = args.b {
        cfg.b = b;
    }
    if let Some(d) = &args.delta {
        cfg.delta = d.parse()?;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(o) = &args.out {
        cfg.out = Some(o.clone());
    }
    if cfg.field.is_empty() {
        return Err(Failure::Usage("missing --field (or a config file)".into()));
    }
    if cfg.terms.0.is_empty() {
        return Err(Failure::Usage("missing --terms (or a config file)".into()));
    }
    Ok(cfg)
}

fn parse_region(inst: &EquationInstance, r: Option<&str>, delta: f64) -> Result<SearchRegion, Failure> {
    match r {
        None => Ok(inst.full_region()),
        Some("auto") => Ok(min_r(inst, delta).region),
        Some(text) => {
            let r: u64 = text
                .parse()
                .map_err(|_| Error::Parse { token: text.to_string(), reason: "expected an integer or auto".into() })?;
            Ok(inst.region(r)?)
        }
    }
}

fn tuple(xs: &[u64]) -> String {
    let parts: Vec<String> = xs.iter().map(u64::to_string).collect();
    format!("({})", parts.join(","))
}

fn case_name(c: SolveCase) -> &'static str {
    match c {
        SolveCase::RLeS3 => "R_LE_S3",
        SolveCase::RGtS3 => "R_GT_S3",
    }
}

fn status_code(s: &SolveStatus) -> u8 {
    match s {
        SolveStatus::Found(_) => 0,
        SolveStatus::NoSolution => 1,
        SolveStatus::Inconclusive => 2,
    }
}

fn status_line(s: &SolveStatus) -> String {
    match s {
        SolveStatus::Found(xs) => format!("status=found solution={}", tuple(xs)),
        SolveStatus::NoSolution => "status=no-solution".into(),
        SolveStatus::Inconclusive => "status=inconclusive".into(),
    }
}

fn cmd_solve(a: &SolveArgs, io: &mut Io) -> Outcome {
    let cfg = resolve(&a.inst)?;
    if a.inst.emit_config {
        io.line(cfg.to_toml().trim_end())?;
        return Ok(0);
    }
    let inst = cfg.instance()?;
    let q = inst.field().q();
    let delta = cfg.delta_value(q);
    let limits = cfg.limits();
    let costs = cost_report_with(&inst, delta, MSource::MainTerm, &limits)?;
    let out = cfg.out.as_deref();

    if a.quantum {
        let mode = GroverMode::Bbht;
        let res = quantum_solve_simulated_with(&inst, delta, mode, cfg.seed, a.full_scan, &limits)?;
        let code = status_code(&res.status);
        if a.inst.json {
            #[derive(Serialize)]
            struct Doc<'a> {
                config: &'a RunConfig,
                quantum: &'a expcong::qmodel::QuantumSolve,
                costs: &'a CostReport,
            }
            io.json(&Doc { config: &cfg, quantum: &res, costs: &costs }, out)?;
            return Ok(code);
        }
        let p = &res.plan;
        let lines = [
            format!("field={} terms={} b={} orders={}", inst.field().spec_string(), cfg.terms, cfg.b, tuple(&inst.orders())),
            format!("r={} raw_r={} case={} grid_size={}", p.r, p.raw_r, case_name(p.case), res.grid_size),
            status_line(&res.status),
            format!(
                "oracle_queries={} rounds={} iterations={} fallback_evaluations={} seed={}",
                res.oracle_queries, res.run.rounds, res.run.iterations, res.run.fallback_evaluations, cfg.seed
            ),
            format!(
                "budget={} t2_queries={} t2_bound={}",
                ((4.5 * (res.grid_size as f64).sqrt()).ceil() as u64).min(res.grid_size),
                costs.t2_queries,
                sig12(costs.t2_bound)
            ),
        ];
        io.emit((lines.join("\n") + "\n").as_bytes(), &[], out)?;
        return Ok(code);
    }

    let res = solve_classical_with(&inst, delta, a.full_scan, &limits)?;
    let code = status_code(&res.status);
    if a.inst.json {
        #[derive(Serialize)]
        struct Doc<'a> {
            config: &'a RunConfig,
            classical: &'a expcong::solver::SolveOutcome,
            costs: &'a CostReport,
        }
        io.json(&Doc { config: &cfg, classical: &res, costs: &costs }, out)?;
        return Ok(code);
    }
    let p = &res.plan;
    let lines = [
        format!("field={} terms={} b={} orders={}", inst.field().spec_string(), cfg.terms, cfg.b, tuple(&inst.orders())),
        format!("r={} raw_r={} case={} search_set_size={}", p.r, p.raw_r, case_name(p.case), p.search_set_size),
        status_line(&res.status),
        format!(
            "dlog_queries={} giant_steps={} max_giant_steps={} baby_steps={} pairs_scanned={}",
            res.dlog_queries, res.giant_steps, res.max_giant_steps, res.baby_steps, res.pairs_scanned
        ),
        format!("classical_cost={} classical_bound={}", costs.classical_cost, sig12(costs.classical_bound)),
    ];
    io.emit((lines.join("\n") + "\n").as_bytes(), &[], out)?;
    Ok(code)
}

fn cmd_census(a: &CensusArgs, io: &mut Io) -> Outcome {
    let cfg = resolve(&a.inst)?;
    if a.inst.emit_config {
        io.line(cfg.to_toml().trim_end())?;
        return Ok(0);
    }
    let inst = cfg.instance()?;
    let delta = cfg.delta_value(inst.field().q());
    let region = parse_region(&inst, a.r.as_deref(), delta)?;
    let rep = census_with(&inst, delta, &region, ConvolutionMethod::Auto, &cfg.limits())?;
    let code = if rep.bounds_hold() { 0 } else { 1 };
    let out = cfg.out.as_deref();
    if a.inst.json {
        io.json(&rep, out)?;
        return Ok(code);
    }
    let mut csv = Vec::new();
    rep.write_csv(&mut csv)?;
    let mut summary = vec![rep.summary_line()];
    if let Some(rem) = &rep.existence_remark {
        let variant = rem.rhs_offset_variant.map(sig12).unwrap_or_else(|| "-".into());
        summary.push(format!(
            "existence lhs={} rhs={} rhs_offset={} holds={}",
            sig12(rem.lhs),
            sig12(rem.rhs),
            variant,
            rem.holds
        ));
    }
    io.emit(&csv, &summary, out)?;
    Ok(code)
}

fn cmd_count(a: &CountArgs, io: &mut Io) -> Outcome {
    let cfg = resolve(&a.inst)?;
    if a.inst.emit_config {
        io.line(cfg.to_toml().trim_end())?;
        return Ok(0);
    }
    let inst = cfg.instance()?;
    let delta = cfg.delta_value(inst.field().q());
    let region = parse_region(&inst, a.r.as_deref(), delta)?;
    let limits = cfg.limits();
    let out = cfg.out.as_deref();
    let counts: Vec<f64> = match a.method {
        CountMethod::Auto | CountMethod::Direct | CountMethod::Fft => {
            let method = match a.method {
                CountMethod::Direct => ConvolutionMethod::Direct,
                CountMethod::Fft => ConvolutionMethod::Fft,
                _ => ConvolutionMethod::Auto,
            };
            count_all_b_with(&inst, &region, method, &limits)?.into_iter().map(|n| n as f64).collect()
        }
        CountMethod::Brute => count_brute(&inst, &region, &limits)?.into_iter().map(|n| n as f64).collect(),
        CountMethod::Charsum if a.all => {
            let c = expcong::CharSumCounter::new(&inst, &region)?;
            c.count_all()
        }
        CountMethod::Charsum => {
            let mut v = vec![0.0; inst.field().q() as usize];
            v[cfg.b as usize] = count_via_charsum::<f64>(&inst, inst.b(), &region)?;
            v
        }
    };
    let show = |n: f64| match a.method {
        CountMethod::Charsum => sig12(n),
        _ => format!("{}", n as u64),
    };
    if a.inst.json {
        #[derive(Serialize)]
        struct Doc {
            r: u64,
            counts: Vec<(u64, String)>,
        }
        let rows: Vec<(u64, String)> = if a.all {
            counts.iter().enumerate().map(|(b, &n)| (b as u64, show(n))).collect()
        } else {
            vec![(cfg.b, show(counts[cfg.b as usize]))]
        };
        io.json(&Doc { r: region.r, counts: rows }, out)?;
        return Ok(0);
    }
    let mut text = String::new();
    if a.all {
        text.push_str("b,N\n");
        for (b, &n) in counts.iter().enumerate() {
            text.push_str(&format!("{b},{}\n", show(n)));
        }
    } else {
        text.push_str(&format!("b={} r={} N={}\n", cfg.b, region.r, show(counts[cfg.b as usize])));
    }
    io.emit(text.as_bytes(), &[], out)?;
    Ok(0)
}

fn cmd_weil(a: &WeilArgs, io: &mut Io) -> Outcome {
    let field = expcong::ff::Field::from_spec(&a.field)?;
    let g = field.element(a.g)?;
    let av = field.element(a.a)?;
    if g.is_zero() || av.is_zero() {
        return Err(Error::Parameter("a and g must be nonzero".into()).into());
    }
    let s = field.order(g)?.order;
    let mus: Vec<FieldElement> = match a.mu {
        Some(mu) => vec![field.element(mu)?],
        None => field.elements().skip(1).collect(),
    };
    #[derive(Serialize)]
    struct Row {
        mu: u64,
        magnitude: f64,
        bound: f64,
        holds: bool,
    }
    let rows = mus
        .iter()
        .map(|&mu| {
            let w = weil_check::<f64>(&field, av, g, s, mu)?;
            Ok(Row { mu: mu.enc(), magnitude: w.magnitude, bound: w.bound, holds: w.holds(1e-9) })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let violations = rows.iter().filter(|r| !r.holds).count();
    let code = u8::from(violations > 0);
    if a.json {
        io.json(&rows, a.out.as_deref())?;
        return Ok(code);
    }
    let mut text = String::from("mu,magnitude,bound,holds\n");
    for r in &rows {
        text.push_str(&format!("{},{},{},{}\n", r.mu, sig12(r.magnitude), sig12(r.bound), r.holds));
    }
    let max = rows.iter().map(|r| r.magnitude).fold(0.0, f64::max);
    let summary = vec![format!("order={s} violations={violations}/{} max={}", rows.len(), sig12(max))];
    io.emit(text.as_bytes(), &summary, a.out.as_deref())?;
    Ok(code)
}

fn cmd_grover(a: &GroverArgs, io: &mut Io) -> Outcome {
    let marked: Vec<u64> = match (&a.marked, a.m) {
        (Some(list), _) => list
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| {
                s.trim()
                    .parse()
                    .map_err(|_| Failure::Lib(Error::Parse { token: s.to_string(), reason: "expected an index".into() }))
            })
            .collect::<Result<_, _>>()?,
        (None, Some(m)) => (0..m.min(a.t)).collect(),
        (None, None) => vec![0],
    };
    let search = GroverSearch::with_marked(a.t, marked, &expcong::Limits::default())?;
    let mode = match a.mode {
        ModeArg::Known => GroverMode::KnownM(search.marked_count()),
        ModeArg::Bbht => GroverMode::Bbht,
    };
    let closed = match mode {
        GroverMode::KnownM(m) => {
            Some(grover_closed_form::<f64>(a.t, m, expcong::qmodel::optimal_iterations(a.t, m))?)
        }
        GroverMode::Bbht => None,
    };
    if let Some(trials) = a.trials {
        let stats = search.monte_carlo(mode, a.seed, trials)?;
        if a.json {
            io.json(&stats, None)?;
            return Ok(0);
        }
        let mut line = format!(
            "trials={} successes={} success_rate={} mean_queries={} max_queries={} timeouts={}",
            stats.trials,
            stats.successes,
            sig12(stats.success_rate()),
            sig12(stats.mean_queries()),
            stats.max_queries,
            stats.timeouts
        );
        if let Some(p) = closed {
            line.push_str(&format!(" closed_form={}", sig12(p)));
        }
        io.line(&line)?;
        return Ok(0);
    }
    let run = search.run(mode, a.seed)?;
    if a.json {
        io.json(&run, None)?;
        return Ok(u8::from(run.found.is_none()));
    }
    let found = run.found.map_or_else(|| "none".to_string(), |x| x.to_string());
    let mut line = format!(
        "found={found} oracle_queries={} iterations={} rounds={} timed_out={} fallback_evaluations={}",
        run.oracle_queries, run.iterations, run.rounds, run.timed_out, run.fallback_evaluations
    );
    if let Some(p) = run.success_prob {
        line.push_str(&format!(" success_prob={}", sig12(p)));
    }
    io.line(&line)?;
    Ok(u8::from(run.found.is_none()))
}

fn cmd_costs(a: &CostsArgs, io: &mut Io) -> Outcome {
    let cfg = resolve(&a.inst)?;
    if a.inst.emit_config {
        io.line(cfg.to_toml().trim_end())?;
        return Ok(0);
    }
    let inst = cfg.instance()?;
    let delta = cfg.delta_value(inst.field().q());
    let source = match a.m_source {
        MSourceArg::Census => MSource::Census,
        MSourceArg::MainTerm => MSource::MainTerm,
    };
    let rep = cost_report_with(&inst, delta, source, &cfg.limits())?;
    let out = cfg.out.as_deref();
    if a.inst.json {
        io.json(&rep, out)?;
        return Ok(0);
    }
    let mut lines = vec![
        format!("q={} orders={} r={} case={}", rep.q, tuple(&rep.orders), rep.r, case_name(rep.case)),
        format!("search_set_size={}", rep.search_set_size),
        format!("classical_cost={} classical_bound={}", rep.classical_cost, sig12(rep.classical_bound)),
        format!("t2_queries={} t2_bound={}", rep.t2_queries, sig12(rep.t2_bound)),
    ];
    if let Some(c) = rep.chain {
        lines.push(format!("chain lhs={} rhs={} holds={}", sig12(c.lhs), sig12(c.rhs), c.holds));
    }
    lines.push(format!("t3_applicable={}", rep.t3_applicable));
    if let Some(t3) = &rep.t3 {
        let m = t3.m_exact.map_or_else(|| sig12(t3.m_estimate), |m| m.to_string());
        let q3 = t3.t3_queries.map_or_else(|| "none".to_string(), |v| v.to_string());
        lines.push(format!(
            "r_floor={} r_floor_le_s3={} M={m} M_estimate={} t3_queries={q3} t3_bound={} t3_bound_stated={}",
            t3.r_floor,
            t3.r_floor_le_s3,
            sig12(t3.m_estimate),
            sig12(t3.t3_bound),
            sig12(t3.t3_bound_stated)
        ));
    }
    lines.push(format!(
        "shor order_findings={} dlogs_per_query={} unit_cost={} log_q={}",
        rep.shor.order_findings,
        rep.shor.dlogs_per_query,
        rep.shor.unit_cost,
        sig12(rep.log_q)
    ));
    io.emit((lines.join("\n") + "\n").as_bytes(), &[], out)?;
    Ok(0)
}

fn cmd_scan(a: &ScanArgs, io: &mut Io) -> Outcome {
    let primes = match &a.primes {
        Some(list) => list
            .split(',')
            .map(|s| {
                s.trim().parse::<u64>().map_err(|_| Error::Parse { token: s.to_string(), reason: "expected a prime".into() })
            })
            .collect::<Result<Vec<_>, Error>>()?,
        None => log_spaced_primes(a.lo, a.hi, a.count)?,
    };
    let policy = match a.policy {
        PolicyArg::MaxOrder => OrderPolicy::MaxOrder,
        PolicyArg::WorstCase => OrderPolicy::WorstCase,
    };
    let delta: DeltaPolicy = a.delta.parse()?;
    let scan = ratio_scan(&primes, policy, delta, a.vars)?;
    for w in &scan.warnings {
        io.warn(w)?;
    }
    if a.json {
        io.json(&scan, a.out.as_deref())?;
        return Ok(0);
    }
    let mut csv = Vec::new();
    scan.write_csv(&mut csv)?;
    io.emit(&csv, &[scan.summary_line()], a.out.as_deref())?;
    Ok(0)
}

/// Runs one invocation and returns its exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let mut io = Io { out, err };
    let result = match &cli.command {
        Command::Solve(a) => cmd_solve(a, &mut io),
        Command::Census(a) => cmd_census(a, &mut io),
        Command::Count(a) => cmd_count(a, &mut io),
        Command::Weil(a) => cmd_weil(a, &mut io),
        Command::Grover(a) => cmd_grover(a, &mut io),
        Command::Costs(a) => cmd_costs(a, &mut io),
        Command::Scan(a) => cmd_scan(a, &mut io),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(io.err, "error: {}", f.message());
            f.code()
        }
    }
}
