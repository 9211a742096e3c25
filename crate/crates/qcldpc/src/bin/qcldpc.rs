//! Command-line front end: construct, lift, analyze, bound and simulate
//! QC-LDPC codes built from difference families, with JSON-first reports.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use qcldpc::catalog;
use qcldpc::cycles::{
    accurate_lifting_degrees, count_simple_cycles, count_simple_cycles_matrix, expected_cycles,
    girth, CycleSpectrum, DEFAULT_BUDGET,
};
use qcldpc::distance::{exact_min_distance, tree_lower_bound, upper_bound_min_distance};
use qcldpc::error::{Error, Result};
use qcldpc::exponent::{standard_plan, DispersionPlan, ExponentMatrix, PlanKind};
use qcldpc::family::DifferenceFamily;
use qcldpc::lifting::{lift, LiftedCode, SparseBinaryMatrix};
use qcldpc::report::RunManifest;
use qcldpc::sim::{run_monte_carlo, SimConfig};
use qcldpc::tables::{reproduce_table, ReproduceBudget, TableId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

#[derive(Parser)]
#[command(
    name = "qcldpc",
    version,
    about = "Quasi-cyclic LDPC codes from difference families: construction, girth and cycle analysis, distance bounds, decoding simulation"
)]
struct Cli {
    /// Size of the worker thread pool (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Report format; csv is available for tabular reports.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a difference family from JSON and report its difference coverage.
    VerifyDf {
        /// Family file: {"v":..,"k":..,"blocks":[[..],..]}
        #[arg(long)]
        file: PathBuf,
    },
    /// Print a built-in catalog row (both rows when two families exist).
    Catalog {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        t: usize,
    },
    /// Build an exponent matrix from a catalog family, optionally dispersing
    /// it over several levels and masking cells.
    Construct {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        t: usize,
        /// Which catalog entry when (k, t) has several (0-based).
        #[arg(long, default_value_t = 0)]
        entry: usize,
        /// Number of levels to disperse over.
        #[arg(long)]
        disperse: Option<usize>,
        /// Built-in plan kind: one-per-level | split-low-high.
        #[arg(long)]
        plan: Option<String>,
        /// Explicit dispersion plan JSON file (alternative to --plan).
        #[arg(long)]
        plan_file: Option<PathBuf>,
        /// 0/1 mask matrix JSON file applied after dispersion.
        #[arg(long)]
        mask: Option<PathBuf>,
    },
    /// Expand an exponent matrix into a parity-check matrix in alist form.
    Lift {
        #[arg(long)]
        exponent: PathBuf,
        /// Lifting degree; must exceed every shift value.
        #[arg(long)]
        n: u32,
    },
    /// Girth and simple-cycle spectrum of a code.
    Analyze {
        /// Parity-check matrix in alist form.
        #[arg(long, conflicts_with_all = ["exponent", "n"])]
        code: Option<PathBuf>,
        /// Exponent matrix JSON (with --n); enables the block-structure
        /// counting path and inevitable-cycle sub-counts.
        #[arg(long, requires = "n")]
        exponent: Option<PathBuf>,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long, default_value_t = 10)]
        max_len: u32,
        /// Node-expansion budget.
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Find lifting degrees reaching a girth target.
    SearchLifting {
        #[arg(long)]
        exponent: PathBuf,
        #[arg(long, default_value_t = 6)]
        girth: u32,
        #[arg(long)]
        from: u32,
        #[arg(long)]
        to: u32,
    },
    /// Expected simple-cycle counts of a random regular ensemble.
    ExpectedCycles {
        #[arg(long)]
        dv: u32,
        #[arg(long)]
        dc: u32,
        /// Code length (number of variable nodes).
        #[arg(long)]
        len: u64,
        #[arg(long, default_value_t = 10)]
        max_len: u32,
    },
    /// Minimum-distance bounds: exact search up to a cap, then randomized
    /// information-set rounds.
    Distance {
        #[arg(long, conflicts_with_all = ["exponent", "n"])]
        code: Option<PathBuf>,
        #[arg(long, requires = "n")]
        exponent: Option<PathBuf>,
        #[arg(long)]
        n: Option<u32>,
        /// Run the exact search up to this distance.
        #[arg(long)]
        exact_cap: Option<u32>,
        /// Codeword-enumeration budget for the exact search.
        #[arg(long, default_value_t = 1_000_000_000)]
        budget: u64,
        /// Randomized information-set rounds when the exact search does not
        /// finish.
        #[arg(long, default_value_t = 1000)]
        iters: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Monte-Carlo BER/FER under BPSK/AWGN and sum-product decoding.
    Simulate {
        #[arg(long, conflicts_with_all = ["exponent", "n"])]
        code: Option<PathBuf>,
        #[arg(long, requires = "n")]
        exponent: Option<PathBuf>,
        #[arg(long)]
        n: Option<u32>,
        /// Comma-separated E_b/N_0 points in dB.
        #[arg(long)]
        snr: String,
        #[arg(long, default_value_t = 150)]
        max_iter: u32,
        /// Stop a point after this many block errors.
        #[arg(long, default_value_t = 50)]
        stop_errors: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 10_000_000)]
        max_frames: u64,
    },
    /// Rebuild a reference table row by row and report pass/fail.
    ReproduceTable {
        /// t1 | t2 | t3-construct | t4
        #[arg(long)]
        table: String,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[arg(long, default_value_t = 20_240_901)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .is_err()
        {
            eprintln!("warning: thread pool already initialized");
        }
    }
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn emit(cli: &Cli, text: &str) -> Result<()> {
    match &cli.out {
        Some(path) => std::fs::write(path, text)?,
        None => println!("{text}"),
    }
    Ok(())
}

fn emit_json<T: Serialize>(cli: &Cli, value: &T) -> Result<()> {
    emit(cli, &serde_json::to_string_pretty(value)?)
}

fn require_json(cli: &Cli, command: &str) -> Result<()> {
    if cli.format == OutputFormat::Csv {
        return Err(Error::Domain(format!(
            "{command} has no csv form; use --format json"
        )));
    }
    Ok(())
}

fn load_code(
    command: &str,
    code: &Option<PathBuf>,
    exponent: &Option<PathBuf>,
    n: Option<u32>,
) -> Result<(RunManifest, Option<LiftedCode>, SparseBinaryMatrix)> {
    match (code, exponent, n) {
        (Some(path), None, None) => {
            let manifest = RunManifest::new(command).input(path)?;
            let matrix = SparseBinaryMatrix::from_alist(&std::fs::read_to_string(path)?)?;
            Ok((manifest, None, matrix))
        }
        (None, Some(path), Some(n)) => {
            let manifest = RunManifest::new(command).input(path)?.param("n", n);
            let p = ExponentMatrix::from_json(&std::fs::read_to_string(path)?)?;
            let lifted = lift(&p, n)?;
            let matrix = lifted.matrix().clone();
            Ok((manifest, Some(lifted), matrix))
        }
        _ => Err(Error::Domain(
            "provide either --code FILE or --exponent FILE --n N".into(),
        )),
    }
}

/// Wraps a bare parity-check matrix as a degree-1 lifted code so the distance
/// and simulation APIs can run on imported alist files.
fn lift_from_matrix(matrix: &SparseBinaryMatrix) -> Result<LiftedCode> {
    let rows = (0..matrix.rows())
        .map(|i| {
            let mut cells = vec![None; matrix.cols()];
            for &j in matrix.row(i) {
                cells[j as usize] = Some(vec![0u32]);
            }
            cells
        })
        .collect::<Vec<_>>();
    let p = ExponentMatrix::from_rows(rows)?;
    lift(&p, 1)
}

fn spectrum_json(
    manifest: &RunManifest,
    g: &serde_json::Value,
    s: &CycleSpectrum,
    secs: f64,
) -> serde_json::Value {
    json!({
        "manifest": manifest,
        "girth": g,
        "counts": s.counts,
        "inevitable_counts": s.inevitable_counts,
        "expansions": s.expansions,
        "elapsed_secs": secs,
    })
}

fn run(cli: &Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::VerifyDf { file } => {
            require_json(cli, "verify-df")?;
            let manifest = RunManifest::new("verify-df").input(file)?;
            let family = DifferenceFamily::from_json(&std::fs::read_to_string(file)?)?;
            let counts = family.difference_counts();
            let missing: Vec<usize> = (1..counts.len()).filter(|&d| counts[d] == 0).collect();
            let repeated: Vec<usize> = (1..counts.len()).filter(|&d| counts[d] > 1).collect();
            emit_json(
                cli,
                &json!({
                    "manifest": manifest,
                    "v": family.v(),
                    "k": family.k(),
                    "t": family.t(),
                    "class": family.classify().to_string(),
                    "positive_differences": family.positive_differences(),
                    "coverage": {
                        "missing_residues": missing,
                        "repeated_residues": repeated,
                    },
                }),
            )?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Catalog { k, t } => {
            require_json(cli, "catalog")?;
            let entries = catalog::lookup_all(*k, *t);
            if entries.is_empty() {
                return Err(Error::NotInCatalog { k: *k, t: *t });
            }
            let manifest = RunManifest::new("catalog").param("k", k).param("t", t);
            let rows: Vec<_> = entries
                .iter()
                .map(|e| {
                    json!({
                        "v": e.family.v(),
                        "k": e.k(),
                        "t": e.t(),
                        "class": e.class.to_string(),
                        "blocks": e.family.blocks(),
                        "accurate_lifting_degrees": {
                            "exceptional": e.lifting.exceptional,
                            "all_from": e.lifting.all_from,
                            "display": e.lifting.to_string(),
                        },
                        "dim": e.dim,
                        "dmin": e.dmin.to_string(),
                    })
                })
                .collect();
            emit_json(cli, &json!({ "manifest": manifest, "entries": rows }))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Construct {
            k,
            t,
            entry,
            disperse,
            plan,
            plan_file,
            mask,
        } => {
            require_json(cli, "construct")?;
            let entries = catalog::lookup_all(*k, *t);
            let e = entries
                .get(*entry)
                .ok_or(Error::NotInCatalog { k: *k, t: *t })?;
            let mut p = ExponentMatrix::construction1(&e.family);
            if let Some(m) = disperse {
                let plan = match (plan, plan_file) {
                    (Some(kind), None) => standard_plan(&p, *m, PlanKind::parse(kind)?)?,
                    (None, Some(path)) => {
                        let parsed: DispersionPlan =
                            serde_json::from_str(&std::fs::read_to_string(path)?)?;
                        if parsed.m != *m {
                            return Err(Error::PlanMismatch(format!(
                                "plan file has m={}, --disperse says {m}",
                                parsed.m
                            )));
                        }
                        parsed
                    }
                    _ => {
                        return Err(Error::Domain(
                            "--disperse needs exactly one of --plan or --plan-file".into(),
                        ))
                    }
                };
                p = p.column_disperse(&plan)?;
            }
            if let Some(path) = mask {
                let pattern: Vec<Vec<u8>> = serde_json::from_str(&std::fs::read_to_string(path)?)?;
                p = p.mask(&pattern)?;
            }
            emit(cli, &p.to_json())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Lift { exponent, n } => {
            let p = ExponentMatrix::from_json(&std::fs::read_to_string(exponent)?)?;
            let code = lift(&p, *n)?;
            emit(cli, &code.matrix().to_alist())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Analyze {
            code,
            exponent,
            n,
            max_len,
            budget,
        } => {
            require_json(cli, "analyze")?;
            let start = std::time::Instant::now();
            let (manifest, lifted, matrix) = load_code("analyze", code, exponent, *n)?;
            let manifest = manifest.param("max-len", max_len).param("budget", budget);
            let g = girth(&matrix, *max_len);
            let spectrum = match &lifted {
                Some(code) => count_simple_cycles(code, *max_len, *budget)?,
                None => count_simple_cycles_matrix(&matrix, *max_len, *budget)?,
            };
            let g_json = serde_json::to_value(g)?;
            emit_json(
                cli,
                &spectrum_json(&manifest, &g_json, &spectrum, start.elapsed().as_secs_f64()),
            )?;
            Ok(ExitCode::SUCCESS)
        }
        Command::SearchLifting {
            exponent,
            girth: girth_target,
            from,
            to,
        } => {
            let manifest = RunManifest::new("search-lifting")
                .input(exponent)?
                .param("girth", girth_target)
                .param("from", from)
                .param("to", to);
            let p = ExponentMatrix::from_json(&std::fs::read_to_string(exponent)?)?;
            let search = accurate_lifting_degrees(&p, *girth_target, *from, *to)?;
            match cli.format {
                OutputFormat::Json => emit_json(
                    cli,
                    &json!({
                        "manifest": manifest,
                        "girth_target": search.girth_target,
                        "accurate": search.accurate,
                        "all_from": search.all_from,
                    }),
                )?,
                OutputFormat::Csv => {
                    let mut text = String::from("n\n");
                    for n in &search.accurate {
                        text.push_str(&format!("{n}\n"));
                    }
                    emit(cli, &text)?;
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::ExpectedCycles {
            dv,
            dc,
            len,
            max_len,
        } => {
            let manifest = RunManifest::new("expected-cycles")
                .param("dv", dv)
                .param("dc", dc)
                .param("len", len)
                .param("max-len", max_len);
            let mut rows = Vec::new();
            for k_half in 2..=(*max_len / 2) {
                rows.push((2 * k_half, expected_cycles(*dv, *dc, *len, k_half)?));
            }
            match cli.format {
                OutputFormat::Json => {
                    let values: serde_json::Map<String, serde_json::Value> = rows
                        .iter()
                        .map(|(l, v)| (l.to_string(), json!(v)))
                        .collect();
                    emit_json(cli, &json!({ "manifest": manifest, "expected": values }))?;
                }
                OutputFormat::Csv => {
                    let mut text = String::from("cycle_length,expected\n");
                    for (l, v) in rows {
                        text.push_str(&format!("{l},{v}\n"));
                    }
                    emit(cli, &text)?;
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Distance {
            code,
            exponent,
            n,
            exact_cap,
            budget,
            iters,
            seed,
        } => {
            require_json(cli, "distance")?;
            let (manifest, lifted, matrix) = load_code("distance", code, exponent, *n)?;
            let mut manifest = manifest
                .param("budget", budget)
                .param("iters", iters)
                .seed(*seed);
            if let Some(cap) = exact_cap {
                manifest = manifest.param("exact-cap", cap);
            }
            let lifted = match lifted {
                Some(l) => l,
                None => lift_from_matrix(&matrix)?,
            };
            let cap = exact_cap.unwrap_or_else(|| tree_lower_bound(&lifted).max(2));
            let mut report = exact_min_distance(&lifted, cap, *budget)?;
            if !report.exact && *iters > 0 {
                let isd = upper_bound_min_distance(&lifted, *iters, *seed, None)?;
                let improves = match (isd.upper_bound, report.upper_bound) {
                    (Some(a), Some(b)) => a < b,
                    (Some(_), None) => true,
                    _ => false,
                };
                if improves {
                    report.upper_bound = isd.upper_bound;
                    report.witness = isd.witness;
                }
                report.seed = Some(*seed);
                report.rounds += isd.rounds;
            }
            emit_json(cli, &json!({ "manifest": manifest, "report": report }))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Simulate {
            code,
            exponent,
            n,
            snr,
            max_iter,
            stop_errors,
            seed,
            max_frames,
        } => {
            let (manifest, lifted, matrix) = load_code("simulate", code, exponent, *n)?;
            let manifest = manifest
                .param("snr", snr)
                .param("max-iter", max_iter)
                .param("stop-errors", stop_errors)
                .param("max-frames", max_frames)
                .seed(*seed);
            let snr_db_points = snr
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Domain(format!("bad SNR point: {s}")))
                })
                .collect::<Result<Vec<f64>>>()?;
            let lifted = match lifted {
                Some(l) => l,
                None => lift_from_matrix(&matrix)?,
            };
            let config = SimConfig {
                snr_db_points,
                max_iterations: *max_iter,
                stop_block_errors: *stop_errors,
                max_frames: *max_frames,
                seed: *seed,
            };
            let report = run_monte_carlo(&lifted, &config)?;
            match cli.format {
                OutputFormat::Json => {
                    emit_json(cli, &json!({ "manifest": manifest, "report": report }))?
                }
                OutputFormat::Csv => {
                    let mut text = String::from(
                        "snr_db,frames,bit_errors,block_errors,ber,fer,avg_iterations,converged_frames\n",
                    );
                    for p in &report.points {
                        text.push_str(&format!(
                            "{},{},{},{},{},{},{},{}\n",
                            p.snr_db,
                            p.frames,
                            p.bit_errors,
                            p.block_errors,
                            p.ber.map(|x| x.to_string()).unwrap_or_default(),
                            p.fer.map(|x| x.to_string()).unwrap_or_default(),
                            p.avg_iterations,
                            p.converged_frames
                        ));
                    }
                    emit(cli, &text)?;
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::ReproduceTable {
            table,
            budget,
            seed,
        } => {
            let id = TableId::parse(table)
                .ok_or_else(|| Error::Domain(format!("unknown table: {table}")))?;
            let manifest = RunManifest::new("reproduce-table")
                .param("table", table)
                .param("budget", budget)
                .seed(*seed);
            let rows = reproduce_table(
                id,
                &ReproduceBudget {
                    cycle_expansions: *budget,
                    seed: *seed,
                    ..Default::default()
                },
            )?;
            let mut failures = 0;
            for row in &rows {
                let status = match (&row.skipped, row.passed()) {
                    (Some(reason), _) => format!("SKIP ({reason})"),
                    (None, true) => "PASS".to_string(),
                    (None, false) => {
                        failures += 1;
                        let bad: Vec<String> = row
                            .checks
                            .iter()
                            .filter(|c| !c.pass)
                            .map(|c| {
                                format!("{}: expected {}, got {}", c.name, c.expected, c.actual)
                            })
                            .collect();
                        format!("FAIL ({})", bad.join("; "))
                    }
                };
                eprintln!("[{status}] {}", row.row);
            }
            match cli.format {
                OutputFormat::Json => {
                    emit_json(cli, &json!({ "manifest": manifest, "rows": rows }))?
                }
                OutputFormat::Csv => {
                    let mut text = String::from("row,status\n");
                    for row in &rows {
                        let status = match (&row.skipped, row.passed()) {
                            (Some(_), _) => "skip",
                            (None, true) => "pass",
                            (None, false) => "fail",
                        };
                        text.push_str(&format!("\"{}\",{}\n", row.row, status));
                    }
                    emit(cli, &text)?;
                }
            }
            Ok(if failures == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}
