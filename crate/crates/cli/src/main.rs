//! `bbcode`: construct, inspect, search, and simulate BB and coprime-BB codes.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use bbcode::codes::{build_checks, dimension, is_connected, CodeParams, CodeSpec};
use bbcode::decoder::{BpOsdDecoder, DecoderConfig, OsdMode, Scaling};
use bbcode::distance::{
    distance_upperbound, exact_report, LogicalTestContext, ProbeConfig, DEFAULT_EXACT_BUDGET,
};
use bbcode::fixtures::{self, verify_row, VerifyOptions};
use bbcode::matrix_io::{read_matrix, write_check_pair, MatrixFormat};
use bbcode::polyring::{divisors, factorize_circulant, UniPoly};
use bbcode::search::{search_bb, search_coprime, GRestriction, SearchConfig, SearchOutcome};
use bbcode::sim::{parse_p_list, sweep, write_csv, CapacityRun, Channel};
use bbcode::{Error, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "bbcode",
    version,
    about = "Bivariate-bicycle quantum LDPC code toolkit"
)]
struct Cli {
    /// Master seed for randomized commands; drawn from the clock and printed when omitted.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Args)]
struct SpecArgs {
    /// Code spec: a JSON file path or inline JSON.
    #[arg(long, required_unless_present = "fixture", conflicts_with = "fixture")]
    spec: Option<String>,
    /// A bundled table row, e.g. `I:1` or `II:5`.
    #[arg(long)]
    fixture: Option<String>,
}

impl SpecArgs {
    fn load(&self) -> Result<CodeSpec> {
        if let Some(id) = &self.fixture {
            return fixtures::find(id)?.spec();
        }
        let text = self.spec.as_deref().unwrap_or_default();
        let json = if text.trim_start().starts_with('{') {
            text.to_string()
        } else {
            fs::read_to_string(text)?
        };
        CodeSpec::from_json(&json)
    }
}

#[derive(Args)]
struct DecoderArgs {
    /// Maximum min-sum iterations.
    #[arg(long, default_value_t = 1000)]
    iters: usize,
    /// `variable` (1 − 2^−t) or a fixed factor such as `0.625`.
    #[arg(long, default_value = "variable")]
    scaling: String,
    /// `none`, `osd0`, or `csN` (combination sweep of order N).
    #[arg(long, default_value = "cs7")]
    osd: OsdMode,
}

impl DecoderArgs {
    fn config(&self, prior_p: f64) -> Result<DecoderConfig> {
        let scaling = match self.scaling.as_str() {
            "variable" => Scaling::Variable,
            s => Scaling::Fixed(s.parse().map_err(|_| {
                Error::InvalidArgument(format!("scaling {s:?} is neither `variable` nor a number"))
            })?),
        };
        let cfg = DecoderConfig {
            max_iterations: self.iters,
            scaling,
            osd: self.osd,
            prior_p,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build the check matrices of a code and write them out.
    Construct {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, default_value = "dense")]
        matrix_format: MatrixFormat,
    },
    /// Print `n` and `k`.
    Params {
        #[command(flatten)]
        spec: SpecArgs,
    },
    /// Factor `π^N + 1` over GF(2).
    Factor {
        #[arg(long)]
        n: usize,
        /// Also list the divisors with degree in [min-deg, max-deg].
        #[arg(long)]
        divisors: bool,
        #[arg(long, default_value_t = 1)]
        min_deg: usize,
        #[arg(long)]
        max_deg: Option<usize>,
    },
    /// Search codes with `a = x^i + y^j + y^k`, `b = y^i + x^j + x^k`.
    Search {
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Search coprime-BB codes with a prescribed `gcd(a, b, π^N + 1)`.
    SearchCoprime {
        #[command(flatten)]
        search: SearchArgs,
        /// Only this divisor `g`, e.g. `1+p+p2`.
        #[arg(long)]
        g: Option<String>,
        /// Only irreducible factors of `π^N + 1` as `g`.
        #[arg(long, conflicts_with = "g")]
        irreducible_only: bool,
        #[arg(long, conflicts_with = "g")]
        min_deg: Option<usize>,
        #[arg(long, conflicts_with = "g")]
        max_deg: Option<usize>,
    },
    /// Exact minimum distance or a decoder-probe upper bound.
    Distance {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, conflicts_with = "probe")]
        exact: bool,
        #[arg(long)]
        probe: bool,
        /// Largest weight tried by the exhaustive search.
        #[arg(long, default_value_t = 10)]
        wmax: usize,
        /// Cap on exhaustive enumeration steps.
        #[arg(long, default_value_t = DEFAULT_EXACT_BUDGET)]
        budget: u64,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        /// Stop the probe once a logical lighter than this is found.
        #[arg(long, default_value_t = 1)]
        tau_d: usize,
    },
    /// Decode one syndrome with BP-OSD.
    Decode {
        /// Parity-check matrix file (dense or alist).
        #[arg(long = "H")]
        h: PathBuf,
        /// Syndrome as a 0/1 string.
        #[arg(long)]
        syndrome: String,
        #[arg(long, default_value_t = 0.01)]
        prior: f64,
        #[command(flatten)]
        decoder: DecoderArgs,
    },
    /// Code-capacity logical error rates over a range of `p`.
    Simulate {
        #[command(flatten)]
        spec: SpecArgs,
        /// `start:stop:step` or a comma-separated list.
        #[arg(long)]
        p: String,
        #[arg(long, default_value_t = 100)]
        stop_errors: usize,
        #[arg(long, default_value_t = 10_000_000)]
        max_shots: usize,
        /// Sample X errors only.
        #[arg(long)]
        x_only: bool,
        #[command(flatten)]
        decoder: DecoderArgs,
    },
    /// Check the bundled code tables.
    VerifyTables {
        /// Restrict to one table (I, II, III, IV) or one row (e.g. II:1).
        #[arg(long)]
        only: Option<String>,
        /// Probe trials for rows beyond the exhaustive range.
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
        /// Largest length checked exhaustively.
        #[arg(long, default_value_t = 56)]
        exact_max_n: usize,
        #[arg(long, default_value_t = DEFAULT_EXACT_BUDGET)]
        budget: u64,
        /// Stop probing a row once its printed distance is reached.
        #[arg(long)]
        stop_at_target: bool,
    },
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long)]
    l: usize,
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = 2)]
    tau_k: usize,
    #[arg(long, default_value_t = 1)]
    tau_d: usize,
    /// Distance-probe trials per candidate.
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
    #[arg(long, default_value_t = 3)]
    term_weight: usize,
    /// Keep disconnected codes.
    #[arg(long)]
    no_connectivity_filter: bool,
    /// Evaluate every candidate, not one per equivalence class.
    #[arg(long)]
    no_dedup: bool,
    /// First candidate index to evaluate (for resuming).
    #[arg(long, default_value_t = 0)]
    offset: usize,
    /// Number of candidates to evaluate.
    #[arg(long)]
    limit: Option<usize>,
}

impl SearchArgs {
    fn config(&self, seed: u64) -> SearchConfig {
        let mut cfg = SearchConfig::new(self.l, self.m, self.tau_k, self.tau_d);
        cfg.probe_trials = self.trials;
        cfg.term_weight = self.term_weight;
        cfg.seed = seed;
        cfg.connectivity_filter = !self.no_connectivity_filter;
        cfg.deduplicate = !self.no_dedup;
        cfg.offset = self.offset;
        cfg.limit = self.limit;
        cfg
    }
}

/// A failure with its process exit code.
struct Failure {
    code: u8,
    message: String,
    partial: Option<Value>,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. }
            | Error::InvalidSpec(_)
            | Error::NotCoprime { .. }
            | Error::ZeroPolynomial
            | Error::Json(_) => 2,
            Error::BudgetExceeded(_) => 3,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
            partial: None,
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Error::from(e).into()
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: cannot start {threads} threads: {e}");
            return ExitCode::from(1);
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if let Some(partial) = f.partial {
                let _ = emit(&cli, &partial, None);
            }
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn master_seed(cli: &Cli) -> u64 {
    cli.seed.unwrap_or_else(|| {
        let seed = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_nanos() as u64)
            .unwrap_or(0);
        eprintln!("seed: {seed}");
        seed
    })
}

/// Writes `value` as JSON, or `text` when the text format is selected.
fn emit(cli: &Cli, value: &Value, text: Option<String>) -> io::Result<()> {
    let body = match (cli.format, text) {
        (Some(Format::Text), Some(t)) => t,
        _ => serde_json::to_string_pretty(value).map_err(io::Error::other)? + "\n",
    };
    write_out(cli.out.as_deref(), body.as_bytes())
}

fn write_out(path: Option<&Path>, bytes: &[u8]) -> io::Result<()> {
    match path {
        Some(p) => fs::write(p, bytes),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()
        }
    }
}

fn run(cli: &Cli) -> std::result::Result<(), Failure> {
    match &cli.command {
        Command::Construct {
            spec,
            matrix_format,
        } => {
            let spec = spec.load()?;
            let pc = build_checks(&spec)?;
            let k = dimension(&pc)?;
            eprintln!(
                "[[{}, {}]] with H_X and H_Z of size {}x{}",
                pc.n(),
                k,
                pc.h_x.rows(),
                pc.n()
            );
            if k == 0 {
                eprintln!("warning: this code encodes no logical qubits");
            }
            write_out(
                cli.out.as_deref(),
                write_check_pair(&pc.h_x, &pc.h_z, *matrix_format).as_bytes(),
            )?;
        }
        Command::Params { spec } => {
            let spec = spec.load()?;
            let pc = build_checks(&spec)?;
            let params = CodeParams {
                n: pc.n(),
                k: dimension(&pc)?,
                d_upper: None,
                d_exact: None,
            };
            if params.k == 0 {
                eprintln!("warning: this code encodes no logical qubits");
            }
            eprintln!("connected Tanner graph: {}", is_connected(&spec)?);
            let text = format!("[[{}, {}]]\n", params.n, params.k);
            emit(cli, &json!(params), Some(text))?;
        }
        Command::Factor {
            n,
            divisors: list,
            min_deg,
            max_deg,
        } => {
            if *n == 0 {
                return Err(Error::InvalidArgument("n must be positive".into()).into());
            }
            let f = factorize_circulant(*n);
            let factors: Vec<Value> = f
                .factors
                .iter()
                .map(|(p, mult)| json!({"factor": p.to_text('p'), "degree": p.degree(), "multiplicity": mult}))
                .collect();
            let mut value = json!({"n": n, "factors": factors});
            let mut text: String = f
                .factors
                .iter()
                .map(|(p, mult)| {
                    format!(
                        "({}){}\n",
                        p.to_text('p'),
                        if *mult > 1 {
                            format!("^{mult}")
                        } else {
                            String::new()
                        }
                    )
                })
                .collect();
            if *list {
                let ds = divisors(&f, *min_deg, max_deg.unwrap_or(*n));
                text.push_str(&format!("{} divisors\n", ds.len()));
                value["divisors"] = ds.iter().map(|d| d.to_text('p')).collect();
            }
            eprintln!("{} irreducible factors", f.factors.len());
            emit(cli, &value, Some(text))?;
        }
        Command::Search { search } => {
            let outcome = search_bb(&search.config(master_seed(cli)))?;
            emit_search(cli, &outcome)?;
        }
        Command::SearchCoprime {
            search,
            g,
            irreducible_only,
            min_deg,
            max_deg,
        } => {
            let mut cfg = search.config(master_seed(cli));
            cfg.g_restriction = if let Some(g) = g {
                GRestriction::Exactly(UniPoly::parse(g)?)
            } else if *irreducible_only {
                GRestriction::Irreducible
            } else if min_deg.is_some() || max_deg.is_some() {
                GRestriction::Degrees {
                    min: min_deg.unwrap_or(0),
                    max: max_deg.unwrap_or(usize::MAX),
                }
            } else {
                GRestriction::AllDivisors
            };
            emit_search(cli, &search_coprime(&cfg)?)?;
        }
        Command::Distance {
            spec,
            exact,
            probe: _,
            wmax,
            budget,
            trials,
            tau_d,
        } => {
            let spec = spec.load()?;
            let pc = build_checks(&spec)?;
            let ctx = LogicalTestContext::from_checks(&pc);
            if ctx.k() == 0 {
                return Err(Error::NoLogicals.into());
            }
            let base = json!({"n": ctx.n(), "k": ctx.k()});
            let report = if *exact {
                exact_report(&ctx, *wmax, *budget).map_err(|e| {
                    let mut f = Failure::from(e);
                    let mut partial = base.clone();
                    partial["status"] = json!("budget-exceeded");
                    f.partial = Some(partial);
                    f
                })?
            } else {
                let cfg = ProbeConfig {
                    trials: *trials,
                    tau_d: *tau_d,
                    seed: master_seed(cli),
                    ..ProbeConfig::default()
                };
                distance_upperbound(&ctx, &cfg)
            };
            report.verify(&ctx)?;
            let mut value = base;
            value["d_upper"] = json!(report.d_upper);
            value["d_exact"] = json!(report.d_exact);
            value["witness_kind"] = json!(report.witness_kind);
            value["witness_support"] = json!(report.witness.as_ref().map(|w| w
                .iter()
                .enumerate()
                .filter(|(_, &b)| b == 1)
                .map(|(i, _)| i)
                .collect::<Vec<_>>()));
            value["trials_used"] = json!(report.trials_used);
            value["method"] = json!(report.method);
            value["status"] = json!(report.status);
            if *exact && report.d_exact.is_none() {
                eprintln!("no logical operator of weight <= {wmax}");
                value["d_lower"] = json!(wmax + 1);
            }
            let text = match (report.d_exact, report.d_upper) {
                (Some(d), _) => format!("d = {d}\n"),
                (None, Some(d)) => format!("d <= {d}\n"),
                (None, None) if *exact => format!("d > {wmax}\n"),
                (None, None) => "no logical found\n".into(),
            };
            emit(cli, &value, Some(text))?;
        }
        Command::Decode {
            h,
            syndrome,
            prior,
            decoder,
        } => {
            let matrix = read_matrix(&fs::read_to_string(h)?)?;
            let bits: Vec<u8> = syndrome
                .trim()
                .chars()
                .map(|c| match c {
                    '0' => Ok(0),
                    '1' => Ok(1),
                    _ => Err(Error::InvalidArgument(format!(
                        "syndrome character {c:?} is not 0 or 1"
                    ))),
                })
                .collect::<Result<_>>()?;
            if bits.len() != matrix.rows() {
                return Err(Error::DimensionMismatch(format!(
                    "syndrome has {} bits, matrix has {} rows",
                    bits.len(),
                    matrix.rows()
                ))
                .into());
            }
            let out = BpOsdDecoder::new(&matrix, decoder.config(*prior)?).decode(&bits);
            let consistent = matrix.mul_bits(&out.estimate)? == bits;
            let estimate: String = out
                .estimate
                .iter()
                .map(|b| if *b == 1 { '1' } else { '0' })
                .collect();
            let value = json!({
                "estimate": estimate,
                "weight": out.estimate.iter().filter(|&&b| b == 1).count(),
                "bp_converged": out.bp_converged,
                "iterations_run": out.iterations_run,
                "syndrome_satisfied": consistent,
            });
            emit(cli, &value, Some(format!("{estimate}\n")))?;
        }
        Command::Simulate {
            spec,
            p,
            stop_errors,
            max_shots,
            x_only,
            decoder,
        } => {
            let spec = spec.load()?;
            let ps = parse_p_list(p)?;
            let mut base = CapacityRun::new(spec, ps[0], master_seed(cli));
            base.decoder = decoder.config(ps[0])?;
            base.stop_at_logical_errors = *stop_errors;
            base.max_shots = *max_shots;
            if *x_only {
                base.channel = Channel::BitOnly;
            }
            let results = sweep(&base, &ps)?;
            for r in &results {
                eprintln!(
                    "p = {:.4}: {} / {} shots, ler = {:.3e}",
                    r.p, r.logical_errors, r.shots, r.ler
                );
            }
            match cli.format {
                Some(Format::Json) => emit(cli, &json!(results), None)?,
                _ => {
                    let mut buf = Vec::new();
                    write_csv(&results, &mut buf)?;
                    write_out(cli.out.as_deref(), &buf)?;
                }
            }
        }
        Command::VerifyTables {
            only,
            trials,
            exact_max_n,
            budget,
            stop_at_target,
        } => {
            let rows = match only.as_deref() {
                None => fixtures::all_rows(),
                Some(id) if id.contains(':') => vec![fixtures::find(id)?],
                Some(table) => fixtures::rows_of(table),
            };
            if rows.is_empty() {
                return Err(Error::InvalidArgument(format!(
                    "no table {:?}",
                    only.as_deref().unwrap_or("")
                ))
                .into());
            }
            let opts = VerifyOptions {
                exact_max_n: *exact_max_n,
                exact_budget: *budget,
                probe: ProbeConfig {
                    trials: *trials,
                    seed: master_seed(cli),
                    ..ProbeConfig::default()
                },
                stop_at_target: *stop_at_target,
            };
            let mut reports = Vec::new();
            for row in &rows {
                let r = verify_row(row, &opts)?;
                eprintln!(
                    "{:<6} {:<16} k {:>2} ({}) d {:?} {:?}",
                    r.id,
                    r.label,
                    r.k_computed,
                    if r.k_ok { "ok" } else { "MISMATCH" },
                    r.d_status,
                    r.d_exact.or(r.d_upper)
                );
                reports.push(r);
            }
            let k_failures = reports.iter().filter(|r| !r.k_ok).count();
            let value = json!({
                "rows": reports,
                "passed": reports.iter().filter(|r| r.passed()).count(),
                "total": reports.len(),
            });
            emit(cli, &value, None)?;
            if k_failures > 0 {
                return Err(Failure {
                    code: 1,
                    message: format!("{k_failures} rows have a dimension different from the table"),
                    partial: None,
                });
            }
        }
    }
    Ok(())
}

fn emit_search(cli: &Cli, outcome: &SearchOutcome) -> io::Result<()> {
    eprintln!(
        "{} candidates, evaluated {}..{}, {} hits",
        outcome.candidates,
        outcome.evaluated.start,
        outcome.evaluated.end,
        outcome.hits.len()
    );
    if let Some(next) = outcome.next_offset {
        eprintln!("resume with --offset {next}");
    }
    let records: Vec<_> = outcome.hits.iter().map(|h| h.record()).collect();
    let text: String = outcome
        .hits
        .iter()
        .map(|h| {
            let doc = h.spec.to_document();
            format!(
                "[[{},{},{}]] a = {} b = {}\n",
                h.params.n,
                h.params.k,
                h.params.d_upper.map_or("?".into(), |d| d.to_string()),
                doc.a,
                doc.b
            )
        })
        .collect();
    emit(cli, &json!(records), Some(text))
}
