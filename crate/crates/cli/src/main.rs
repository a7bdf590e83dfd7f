use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};

use qtest_cli::config::ExperimentConfig;
use qtest_cli::{experiment, report};
use qtest_core::benchsuite;
use qtest_core::mutator::{self, MutKind};
use qtest_core::qir::{serialize_program, Callee, Statement, Subroutine};
use qtest_core::rng::SplitRng;
use qtest_core::testkit;

/// Unit- and integration-testing toolkit for multi-subroutine quantum
/// programs: benchmark catalog, suite runner, mutant corpora, and
/// trigger-rate experiment campaigns.
#[derive(Parser)]
#[command(name = "qtest", version, max_term_width = 100)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the benchmark catalog.
    List,
    /// Test-suite operations.
    #[command(subcommand)]
    Suite(SuiteCommand),
    /// Generate a seeded mutant corpus for a benchmark.
    Mutate {
        benchmark: String,
        /// Scale parameter of the benchmark (defaults to its minimum).
        #[arg(long)]
        n: Option<usize>,
        /// Comma-separated mutation kinds (GM,SM,CM,MM).
        #[arg(long, default_value = "GM,SM,CM,MM")]
        kinds: String,
        /// Mutants per kind.
        #[arg(long, default_value_t = 12)]
        limit: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output corpus file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a trigger-rate campaign from a config file.
    Experiment {
        config: PathBuf,
        /// Output base path; writes BASE.csv and BASE.json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the IR of a benchmark and its callees.
    Dump { benchmark: String },
    /// Re-emit a raw report in the chosen format.
    Report {
        raw: PathBuf,
        #[arg(long, value_parser = ["csv", "json"])]
        format: String,
    },
}

#[derive(Subcommand)]
enum SuiteCommand {
    /// Run a suite file against the benchmark catalog.
    Run {
        file: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the per-case report as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Write the per-case report as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Export default suites (a benchmark name or `all`).
    Export {
        benchmark: String,
        /// Directory for .suite files (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

// Exit codes: 0 all pass, 1 failures, 2 usage/config errors.
fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(failures) if failures == 0 => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<u32> {
    match cli.command {
        Command::List => {
            for entry in benchsuite::catalog() {
                println!(
                    "{:<12} {:<17} {}",
                    entry.name,
                    entry.io_type.name(),
                    entry.mark_text
                );
            }
            Ok(0)
        }
        Command::Suite(SuiteCommand::Run { file, seed, csv, json }) => {
            run_suite(&file, seed, csv.as_deref(), json.as_deref())
        }
        Command::Suite(SuiteCommand::Export { benchmark, out }) => {
            export_suites(&benchmark, out.as_deref())?;
            Ok(0)
        }
        Command::Mutate {
            benchmark,
            n,
            kinds,
            limit,
            seed,
            out,
        } => {
            mutate(&benchmark, n, &kinds, limit, seed, out.as_deref())?;
            Ok(0)
        }
        Command::Experiment { config, out } => {
            run_experiment_cmd(&config, out.as_deref())?;
            Ok(0)
        }
        Command::Dump { benchmark } => {
            print!("{}", dump_benchmark(&benchmark)?);
            Ok(0)
        }
        Command::Report { raw, format } => {
            let src = std::fs::read_to_string(&raw)
                .with_context(|| format!("reading {}", raw.display()))?;
            let parsed = report::parse_csv(&src)?;
            match format.as_str() {
                "csv" => print!("{}", report::render_csv(&parsed)),
                _ => print!("{}", report::render_json(&parsed, None)),
            }
            Ok(0)
        }
    }
}

fn run_suite(file: &Path, seed: u64, csv: Option<&Path>, json: Option<&Path>) -> Result<u32> {
    let src =
        std::fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let docs = testkit::parse_suite(&src).map_err(|e| anyhow!("{e}"))?;
    let mut verdicts = Vec::new();
    for (d_idx, doc) in docs.iter().enumerate() {
        if benchsuite::entry(&doc.subroutine).is_none() {
            bail!("unknown benchmark `{}`", doc.subroutine);
        }
        let mut prog = benchsuite::build_program();
        for (c_idx, case) in doc.cases.iter().enumerate() {
            let mut rng = SplitRng::derive(seed, &[d_idx as u64, c_idx as u64]);
            let verdict =
                benchsuite::run_suite_case(&mut prog, &doc.subroutine, case, &mut rng)
                    .map_err(|e| anyhow!("{}/{}: {e}", doc.subroutine, case.name))?;
            let status = if verdict.passed { "pass" } else { "FAIL" };
            print!("{status} {}/{} ({} shots)", doc.subroutine, case.name, verdict.shots);
            match verdict.witness() {
                Some(w) => println!("  [{} -> {}]", w.input, w.observed),
                None => println!(),
            }
            verdicts.push((doc.subroutine.clone(), case.name.clone(), verdict));
        }
    }
    let summary = testkit::suite_report(&verdicts);
    if summary.total == 0 {
        println!("no cases");
        return Ok(1);
    }
    println!("{} cases: {} passed, {} failed", summary.total, summary.passed, summary.failed);
    if let Some(path) = csv {
        std::fs::write(path, testkit::render_csv(&verdicts))?;
    }
    if let Some(path) = json {
        std::fs::write(path, testkit::render_json(&verdicts))?;
    }
    Ok(summary.failed as u32)
}

fn export_suites(benchmark: &str, out: Option<&Path>) -> Result<()> {
    let names: Vec<&str> = if benchmark == "all" {
        benchsuite::catalog().iter().map(|e| e.name).collect()
    } else {
        benchsuite::entry(benchmark)
            .map(|e| vec![e.name])
            .ok_or_else(|| anyhow!("unknown benchmark `{benchmark}`"))?
    };
    for name in names {
        let text = benchsuite::default_suite_text(name)
            .ok_or_else(|| anyhow!("no default suite for `{name}`"))?;
        match out {
            Some(dir) => {
                std::fs::create_dir_all(dir)?;
                let path = dir.join(format!("{}.suite", name.to_lowercase()));
                std::fs::write(&path, text)?;
                println!("wrote {}", path.display());
            }
            None => print!("{text}"),
        }
    }
    Ok(())
}

fn mutate(
    benchmark: &str,
    n: Option<usize>,
    kinds: &str,
    limit: usize,
    seed: u64,
    out: Option<&Path>,
) -> Result<()> {
    let entry =
        benchsuite::entry(benchmark).ok_or_else(|| anyhow!("unknown benchmark `{benchmark}`"))?;
    let n = n.unwrap_or(entry.min_n);
    let kinds: Vec<MutKind> = kinds
        .split(',')
        .map(|k| MutKind::from_name(k.trim()).ok_or_else(|| anyhow!("bad kind `{k}`")))
        .collect::<Result<_>>()?;
    // The scale only matters for campaign trials, but validate it here so
    // corpora advertise a usable configuration.
    if n < entry.min_n || n > entry.max_n {
        bail!("`{benchmark}` takes scales {}..={}", entry.min_n, entry.max_n);
    }
    let prog = benchsuite::build_program();
    let mut rng = SplitRng::derive(seed, &[0]);
    let mutants = mutator::enumerate_mutants(&prog, benchmark, &kinds, limit, &mut rng);
    let text = mutator::render_corpus(&mutants, seed);
    match out {
        Some(path) => {
            std::fs::write(path, &text)?;
            println!("wrote {} mutants to {}", mutants.len(), path.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn run_experiment_cmd(config_path: &Path, out: Option<&Path>) -> Result<()> {
    let src = std::fs::read_to_string(config_path)
        .with_context(|| format!("reading {}", config_path.display()))?;
    let cfg = ExperimentConfig::parse(&src)?;
    let result = experiment::run_experiment(&cfg)?;
    let base: PathBuf = match out {
        Some(p) => p.to_path_buf(),
        None => config_path.with_extension("report"),
    };
    let csv_path = base.with_extension("csv");
    let json_path = base.with_extension("json");
    std::fs::write(&csv_path, report::render_csv(&result))?;
    std::fs::write(&json_path, report::render_json(&result, Some(&cfg)))?;
    print!("{}", report::render_csv(&result));
    eprintln!("wrote {} and {}", csv_path.display(), json_path.display());
    Ok(())
}

fn dump_benchmark(benchmark: &str) -> Result<String> {
    let entry =
        benchsuite::entry(benchmark).ok_or_else(|| anyhow!("unknown benchmark `{benchmark}`"))?;
    let prog = benchsuite::build_program();
    // The benchmark plus its transitive named callees, in call order.
    let mut names: Vec<String> = vec![entry.name.to_string()];
    let mut i = 0;
    while i < names.len() {
        let sub = prog.get(&names[i]).expect("catalog subs exist");
        collect_callees(&sub.body, &mut names);
        i += 1;
    }
    let subs: Vec<&Subroutine> = names.iter().map(|n| prog.get(n).unwrap()).collect();
    Ok(serialize_program(&subs))
}

fn collect_callees(body: &[Statement], names: &mut Vec<String>) {
    for stmt in body {
        match stmt {
            Statement::Call {
                callee: Callee::Named(f),
                ..
            } => {
                if !names.contains(f) {
                    names.push(f.clone());
                }
            }
            Statement::Controlled { inner, .. } => {
                collect_callees(std::slice::from_ref(inner), names)
            }
            Statement::If {
                then_body,
                else_body,
                ..
            } => {
                collect_callees(then_body, names);
                collect_callees(else_body, names);
            }
            Statement::For { body, .. } | Statement::RepeatUntil { body, .. } => {
                collect_callees(body, names)
            }
            Statement::WithinApply { outer, inner } => {
                collect_callees(outer, names);
                collect_callees(inner, names);
            }
            _ => {}
        }
    }
}
