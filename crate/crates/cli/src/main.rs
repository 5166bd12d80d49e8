use std::fs;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use clocknet::constructions::{
    check_circuit_matrix, check_universal, family_13, full_clock_matrix, gim, named_matrix, CircuitMatrix,
    MatrixCheck, NamedMatrix,
};
use clocknet::factorization::{identity_factorization, verify_factorization, Verification};
use clocknet::network::{
    bounds_report, build_clock_digraph, identify_network_digraph, multiplier_map, verify_digraph_isomorphism,
};
use clocknet::search::{self, decide, min_n0_estimate, solvability_table, witness_matrix};
use clocknet::{ClockSpec, IntMatrix, MethodChoice, Modulus, Network, SearchBudget, Support, Verdict};

#[derive(Parser, Debug)]
#[command(name = "clocknet", version, about = "Solvability of clock networks N_n(R) over Z_s")]
struct Cli {
    /// Output format; not every command supports every format.
    #[arg(long, value_enum, default_value_t = Format::Plain, global = true)]
    format: Format,

    /// Write the main output to this file instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    /// Largest admissible matrix state space s^(r²) for linear searches.
    #[arg(long, global = true)]
    max_states: Option<u64>,

    /// Largest admissible layer for sparse linear searches.
    #[arg(long, global = true)]
    max_layer_states: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Plain,
    Json,
    Csv,
    Dot,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Linear,
    Exhaustive,
    Auto,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// The matrix J_{a,b}.
    Gim { a: usize, b: usize },
    /// The (n+r) x r circuit matrix of N_n([r]).
    FullClock { n: usize, r: usize },
    /// A hardcoded circuit matrix for R = {1,3}: A7, B8, M10 or M14.
    Matrix { name: String },
    /// The universal circuit matrix of N_n({1,3}) for n >= 12.
    Family13 { n: usize },
    /// Checks a circuit matrix file (one row per line).
    Validate {
        file: PathBuf,
        support: Support,
        modulus: Option<u64>,
        /// Check over the integers, hence for every modulus.
        #[arg(long)]
        universal: bool,
    },
    /// Decides whether N_n(R) is s-solvable.
    Solve {
        n: usize,
        support: Support,
        modulus: u64,
        #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
        method: MethodArg,
        /// Write the circuit matrix of a linear solution here.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Linear solvability grid over moduli and lengths, e.g. `table 1,3 2,3 4..12`.
    Table {
        support: Support,
        moduli: String,
        range: String,
    },
    /// Writes I_r as a product of exactly n R-atomic matrices.
    Factorize { n: usize, support: Support },
    /// The clock digraph G_clock(n, R) in DOT.
    Digraph {
        n: usize,
        support: Support,
        /// Build it by identifying inputs with outputs in N_n(R).
        #[arg(long)]
        identify: bool,
    },
    /// The network N_n(R) in DOT.
    Network { n: usize, support: Support },
    /// Checks that i -> m·i mod n maps G_clock(n, R1) onto G_clock(n, R2).
    Iso {
        n: usize,
        first: Support,
        second: Support,
        m: i64,
    },
    /// Bounds on the guessing number and information defect.
    Bounds { n: usize, support: Support, modulus: u64 },
    /// Per-modulus n0(R) with an upper bound valid for every modulus.
    N0 { support: Support, moduli: String },
}

/// What a command produced: the main body and a short status for stdout.
struct Report {
    body: String,
    status: Option<String>,
}

impl Report {
    fn body(body: String) -> Self {
        Report { body, status: None }
    }
}

fn modulus(s: u64) -> Result<Modulus> {
    Modulus::new(s).with_context(|| format!("invalid modulus {s}"))
}

fn parse_moduli(text: &str) -> Result<Vec<Modulus>> {
    text.split(',')
        .map(|t| {
            let s: u64 = t.trim().parse().with_context(|| format!("`{t}` is not a modulus"))?;
            modulus(s)
        })
        .collect()
}

/// `a..b` (inclusive), `a..=b`, or a single `a`.
fn parse_range(text: &str) -> Result<RangeInclusive<usize>> {
    let num = |t: &str| -> Result<usize> { t.trim().parse().with_context(|| format!("`{t}` is not a length")) };
    if let Some((a, b)) = text.split_once("..") {
        let b = b.strip_prefix('=').unwrap_or(b);
        Ok(num(a)?..=num(b)?)
    } else {
        let a = num(text)?;
        Ok(a..=a)
    }
}

fn spec(n: usize, support: &Support) -> Result<ClockSpec> {
    ClockSpec::new(n, support.clone()).map_err(Into::into)
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn ensure_format(format: Format, allowed: &[Format], command: &str) -> Result<()> {
    if !allowed.contains(&format) {
        bail!("--format {format:?} is not supported by `{command}`");
    }
    Ok(())
}

fn matrix_report(format: Format, command: &str, m: &CircuitMatrix) -> Result<Report> {
    ensure_format(format, &[Format::Plain, Format::Json], command)?;
    Ok(Report::body(match format {
        Format::Json => pretty(&json!({ "command": command, "matrix": m.to_json() })),
        _ => m.to_string(),
    }))
}

fn run(cli: &Cli) -> Result<Report> {
    let mut budget = SearchBudget::default();
    if let Some(x) = cli.max_states {
        budget.max_state_space = u128::from(x);
    }
    if let Some(x) = cli.max_layer_states {
        budget.max_layer_states = x;
    }
    let format = cli.format;

    match &cli.command {
        Command::Gim { a, b } => {
            ensure_format(format, &[Format::Plain, Format::Json], "gim")?;
            let m = gim(*a, *b)?;
            Ok(Report::body(match format {
                Format::Json => pretty(&json!({
                    "command": "gim",
                    "params": {"a": a, "b": b},
                    "rows": m.row_iter().collect::<Vec<_>>(),
                })),
                _ => m.to_string(),
            }))
        }
        Command::FullClock { n, r } => matrix_report(format, "full-clock", &full_clock_matrix(*n, *r)?),
        Command::Matrix { name } => {
            let which: NamedMatrix = name.parse()?;
            matrix_report(format, "matrix", &named_matrix(which))
        }
        Command::Family13 { n } => matrix_report(format, "family13", &family_13(*n)?),
        Command::Validate {
            file,
            support,
            modulus: s,
            universal,
        } => cmd_validate(format, file, support, *s, *universal),
        Command::Solve {
            n,
            support,
            modulus: s,
            method,
            witness,
        } => cmd_solve(format, &budget, *n, support, *s, *method, witness.as_deref()),
        Command::Table {
            support,
            moduli,
            range,
        } => {
            ensure_format(format, &[Format::Plain, Format::Csv, Format::Json], "table")?;
            let table = solvability_table(support, &parse_moduli(moduli)?, parse_range(range)?, &budget)?;
            Ok(Report::body(match format {
                Format::Json => pretty(&json!({ "command": "table", "table": table.to_json() })),
                _ => table.to_csv(),
            }))
        }
        Command::Factorize { n, support } => {
            ensure_format(format, &[Format::Plain, Format::Json], "factorize")?;
            let f = identity_factorization(*n, support)?;
            let ok = verify_factorization(&f, Verification::Integer)?;
            let status = if ok { "VERIFIED-INTEGER" } else { "NOT-VERIFIED" };
            Ok(match format {
                Format::Json => Report::body(pretty(&json!({
                    "command": "factorize",
                    "params": {"n": n, "R": support.as_slice()},
                    "verdict": status,
                    "factors": f.factors().iter().map(|a| a.coefficients().to_vec()).collect::<Vec<_>>(),
                }))),
                _ => Report {
                    body: f.to_string(),
                    status: Some(format!("{status} ({} atomic factors)", f.n())),
                },
            })
        }
        Command::Digraph { n, support, identify } => {
            ensure_format(format, &[Format::Plain, Format::Dot], "digraph")?;
            let g = if *identify {
                identify_network_digraph(&Network::clock(&spec(*n, support)?))
            } else {
                build_clock_digraph(*n, support)?
            };
            Ok(Report::body(g.to_dot(&format!("G_clock({n},{support})"))))
        }
        Command::Network { n, support } => {
            ensure_format(format, &[Format::Plain, Format::Dot], "network")?;
            Ok(Report::body(Network::clock(&spec(*n, support)?).to_dot()))
        }
        Command::Iso { n, first, second, m } => {
            ensure_format(format, &[Format::Plain, Format::Json], "iso")?;
            let map = multiplier_map(*n, *m)?;
            let ok = verify_digraph_isomorphism(
                &build_clock_digraph(*n, first)?,
                &build_clock_digraph(*n, second)?,
                map.images(),
            )?;
            let verdict = if ok { "ISOMORPHIC" } else { "NOT-ISOMORPHIC-UNDER-MAP" };
            Ok(Report::body(match format {
                Format::Json => pretty(&json!({
                    "command": "iso",
                    "params": {"n": n, "R1": first.as_slice(), "R2": second.as_slice(), "m": m},
                    "verdict": verdict,
                    "map": map.images(),
                })),
                _ => format!("{verdict}\nmap {map}\n"),
            }))
        }
        Command::Bounds { n, support, modulus: s } => {
            ensure_format(format, &[Format::Plain, Format::Json], "bounds")?;
            let spec = spec(*n, support)?;
            let s = modulus(*s)?;
            let (solvable, linearly) = match decide(&spec, s, MethodChoice::Auto, &budget, false) {
                Ok(d) => match (d.verdict, d.method) {
                    (Verdict::Solvable, search::Method::Linear) => (Some(true), Some(true)),
                    (Verdict::Solvable, _) => (Some(true), Some(false)),
                    (Verdict::Unsolvable, _) => (Some(false), Some(false)),
                    (Verdict::LinearlyUnsolvable, _) => (None, Some(false)),
                },
                Err(clocknet::Error::BudgetExceeded(_)) => (None, None),
                Err(e) => return Err(e.into()),
            };
            let rep = bounds_report(&spec, Some(s), solvable, linearly);
            Ok(Report::body(match format {
                Format::Json => pretty(&json!({
                    "command": "bounds",
                    "params": {"n": n, "R": support.as_slice(), "s": s.get()},
                    "report": rep,
                })),
                _ => rep.to_string(),
            }))
        }
        Command::N0 { support, moduli } => {
            ensure_format(format, &[Format::Plain, Format::Json], "n0")?;
            let rep = min_n0_estimate(support, &parse_moduli(moduli)?, &budget)?;
            Ok(Report::body(match format {
                Format::Json => pretty(&json!({
                    "command": "n0",
                    "params": {"R": support.as_slice()},
                    "per_modulus": rep.per_modulus.iter().map(|(s, v)| json!({"s": s.get(), "n0": v})).collect::<Vec<_>>(),
                    "max": rep.max,
                    "upper_bound": rep.universal_upper_bound.map(|(u, name)| json!({"n": u, "from": name})),
                    "decided": rep.is_decided(),
                })),
                _ => rep.to_string(),
            }))
        }
    }
}

fn cmd_validate(
    format: Format,
    file: &Path,
    support: &Support,
    s: Option<u64>,
    universal: bool,
) -> Result<Report> {
    ensure_format(format, &[Format::Plain, Format::Json], "validate")?;
    let text = fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let matrix: IntMatrix = text.parse()?;
    let m = CircuitMatrix::new(matrix)?;
    let r = support.max();
    let table: MatrixCheck<Vec<Vec<i64>>> = match (universal, s) {
        (true, _) => check_universal(&m, support)?,
        (false, Some(s)) => match check_circuit_matrix(&m, support, modulus(s)?)? {
            MatrixCheck::Valid(c) => {
                MatrixCheck::Valid(c.rows().iter().map(|row| row.iter().map(|&x| x as i64).collect()).collect())
            }
            MatrixCheck::BadHead => MatrixCheck::BadHead,
            MatrixCheck::RowUnreachable(k) => MatrixCheck::RowUnreachable(k),
        },
        (false, None) => bail!("give a modulus or --universal"),
    };
    let verdict = match &table {
        MatrixCheck::Valid(_) => "VALID".to_string(),
        MatrixCheck::BadHead => "INVALID head".to_string(),
        MatrixCheck::RowUnreachable(k) => format!("INVALID row {k}"),
    };
    let tail_identity = match s {
        Some(s) if !universal => m.tail_is_identity_mod(modulus(s)?),
        _ => m.tail_is_identity(),
    };
    if format == Format::Json {
        return Ok(Report::body(pretty(&json!({
            "command": "validate",
            "params": {"file": file.display().to_string(), "R": support.as_slice(), "s": s, "universal": universal},
            "verdict": verdict,
            "solves": matches!(table, MatrixCheck::Valid(_)) && tail_identity,
            "lambda": match &table { MatrixCheck::Valid(t) => json!(t), _ => Value::Null },
        }))));
    }
    let mut out = format!("{verdict}\n");
    if let MatrixCheck::Valid(t) = &table {
        for (idx, row) in t.iter().enumerate() {
            let k = r + 1 + idx;
            let cells: Vec<String> = support
                .iter()
                .zip(row)
                .map(|(j, v)| format!("lambda_{k},{j}={v}"))
                .collect();
            out.push_str(&format!("k={k}: {}\n", cells.join(" ")));
        }
        out.push_str(if tail_identity {
            "last r rows form I_r: the circuit solves the network\n"
        } else {
            "last r rows do not form I_r\n"
        });
    }
    Ok(Report::body(out))
}

fn cmd_solve(
    format: Format,
    budget: &SearchBudget,
    n: usize,
    support: &Support,
    s: u64,
    method: MethodArg,
    witness: Option<&Path>,
) -> Result<Report> {
    ensure_format(format, &[Format::Plain, Format::Json], "solve")?;
    let spec = spec(n, support)?;
    let s = modulus(s)?;
    let choice = match method {
        MethodArg::Linear => MethodChoice::Linear,
        MethodArg::Exhaustive => MethodChoice::Exhaustive,
        MethodArg::Auto => MethodChoice::Auto,
    };
    let d = decide(&spec, s, choice, budget, true)?;
    let mut witness_path = None;
    if let (Some(path), Some(m)) = (witness, witness_matrix(&d)?) {
        fs::write(path, m.to_string()).with_context(|| format!("writing {}", path.display()))?;
        witness_path = Some(path.display().to_string());
    }
    if format == Format::Json {
        let mut record = d.to_json();
        record["command"] = json!("solve");
        record["params"] = json!({"n": n, "R": support.as_slice(), "s": s.get(), "method": format!("{method:?}").to_lowercase()});
        record["witness_path"] = json!(witness_path);
        return Ok(Report::body(pretty(&record)));
    }
    let mut out = format!("{} ({} over Z_{}, decided by {})\n", d.verdict, spec, s, d.method);
    if let Some(red) = &d.reduced {
        out.push_str(&format!("reduced to {red} by the gcd lemma\n"));
    }
    if let Some(p) = witness_path {
        out.push_str(&format!("witness: {p}\n"));
    } else if let Some(m) = witness_matrix(&d)? {
        out.push_str("witness circuit matrix:\n");
        out.push_str(&m.to_string());
    }
    Ok(Report::body(out))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            match &cli.output {
                Some(path) => {
                    if let Err(e) = fs::write(path, &report.body) {
                        eprintln!("error: writing {}: {e}", path.display());
                        return ExitCode::from(2);
                    }
                }
                None => print!("{}", report.body),
            }
            if let Some(status) = report.status {
                println!("{status}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
