//! Command-line surface tying the library together: single-series SCI
//! reports, two-sample tests, DGP simulation and Monte Carlo tables.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use sci::dgp::{simulate, DgpModel, DgpSpec, DEFAULT_BURN_IN, DEFAULT_THETA};
use sci::entropy::{shannon, ProbVector};
use sci::error::SciError;
use sci::io::{read_series, write_series};
use sci::montecarlo::{
    run_experiment, DgpTemplate, ExperimentPlan, ResultTable, SeedManifest, TableCell,
};
use sci::patterns::{apply_jitter, OrdinalPattern};
use sci::rng::CounterRng;
use sci::sci::{renyi2_from_sci, sci_u_statistic};
use sci::testing::{
    jp_spectral_test, ks_two_sample, sci_two_sample_test_with_parts, JpTestConfig, SciTestConfig,
    TestMethod, TestResult,
};
use sci::variance::{default_bandwidth, long_run_variance, KernelSpec};

#[derive(Parser)]
#[command(
    name = "sci",
    about = "Symbolic correlation integral and Renyi-2 permutation entropy toolkit",
    version
)]
struct Cli {
    /// Cap the rayon thread pool (does not affect results).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the SCI and Renyi-2 entropy of one series.
    Sci(SciArgs),
    /// Two-sample equality-of-DGP test.
    Test(TestArgs),
    /// Simulate one of the four DGPs to a one-column text file.
    Simulate(SimulateArgs),
    /// Monte Carlo size/power tables.
    Mc(McArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum KernelArg {
    Bartlett,
}

impl KernelArg {
    fn spec(self) -> KernelSpec {
        KernelSpec::Bartlett
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Sci,
    Ks,
    Jp,
}

#[derive(Args)]
struct SciArgs {
    /// Input series file (one value per line, or CSV with --column).
    input: PathBuf,
    /// CSV column selector (header name or zero-based index).
    #[arg(long)]
    column: Option<String>,
    /// Pattern order.
    #[arg(long, default_value_t = 3)]
    d: usize,
    /// HAC bandwidth override (default: ln N).
    #[arg(long)]
    bandwidth: Option<f64>,
    #[arg(long, value_enum, default_value_t = KernelArg::Bartlett)]
    kernel: KernelArg,
    /// Add uniform jitter of this magnitude before analysis.
    #[arg(long)]
    jitter: Option<f64>,
    /// Seed for the jitter stream.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Emit a JSON report instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct TestArgs {
    /// First series file.
    #[arg(short = 'x', long)]
    x: PathBuf,
    /// Second series file.
    #[arg(short = 'y', long)]
    y: PathBuf,
    #[arg(long, value_enum)]
    method: MethodArg,
    #[arg(long)]
    column: Option<String>,
    #[arg(long, default_value_t = 3)]
    d: usize,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Bandwidth override (HAC for sci, spectral for jp).
    #[arg(long)]
    bandwidth: Option<f64>,
    #[arg(long, value_enum, default_value_t = KernelArg::Bartlett)]
    kernel: KernelArg,
    /// Randomization replicates for jp.
    #[arg(long, default_value_t = 499)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    jitter: Option<f64>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SimulateArgs {
    /// Model: ma1|ar1|nlar|arch1 or 1..4.
    #[arg(long)]
    model: String,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = DEFAULT_THETA)]
    theta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_BURN_IN)]
    burn_in: usize,
    /// Output path (one value per line).
    #[arg(long, short = 'o')]
    output: PathBuf,
}

#[derive(Args)]
struct McArgs {
    #[arg(long, value_enum)]
    test: MethodArg,
    /// size: DGP i vs itself; power: DGP i vs DGP j grid with the
    /// coefficient switched 0.5 -> 0.8 on the diagonal.
    #[arg(long, default_value = "size")]
    mode: String,
    /// Comma-separated DGP list.
    #[arg(long, default_value = "1,2,3,4", value_delimiter = ',')]
    dgp: Vec<usize>,
    /// Comma-separated series lengths.
    #[arg(long, default_value = "2000,5000,10000", value_delimiter = ',')]
    n: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    d: usize,
    #[arg(long, default_value_t = 1000)]
    reps: usize,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Randomization replicates per jp call.
    #[arg(long, default_value_t = 199)]
    jp_reps: usize,
    /// Output directory for TSV/text/JSON tables and the seed manifest.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

fn exit_code_for(err: &SciError) -> u8 {
    match err {
        SciError::Parse { .. } | SciError::Io(_) => 2,
        SciError::InvalidInput(_) | SciError::InsufficientData(_) | SciError::Domain(_) => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        // ignore failure when a pool already exists
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    let outcome = std::panic::catch_unwind(|| match cli.command {
        Command::Sci(args) => cmd_sci(args),
        Command::Test(args) => cmd_test(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Mc(args) => cmd_mc(args),
    });
    match outcome {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(err)) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
        Err(_) => {
            eprintln!("error: internal panic");
            ExitCode::from(4)
        }
    }
}

// JSON-safe float: infinities and NaN become strings.
fn jf(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        json!(v.to_string())
    }
}

fn load_series(
    path: &PathBuf,
    column: Option<&str>,
    jitter: Option<f64>,
    seed: u64,
    stream: u64,
) -> Result<Vec<f64>, SciError> {
    let mut series = read_series(path, column)?;
    if let Some(mag) = jitter {
        let mut rng = CounterRng::derive(seed, stream);
        apply_jitter(&mut series, mag, &mut rng);
    }
    Ok(series)
}

fn cmd_sci(args: SciArgs) -> Result<(), SciError> {
    let series = load_series(&args.input, args.column.as_deref(), args.jitter, args.seed, 0)?;
    let est = sci_u_statistic(&series, args.d)?;
    let n = est.window_count();
    let bandwidth = match args.bandwidth {
        Some(b) => b,
        None => default_bandwidth(n)?,
    };
    let lrv = long_run_variance(est.h1_series(), est.s_value(), &args.kernel.spec(), bandwidth)?;
    let half_width = 1.96 * 2.0 * lrv.sigma() / (n as f64).sqrt();
    let renyi2 = renyi2_from_sci(est.s_value()).ok();
    let shannon_pe = est
        .pattern_counts()
        .to_probabilities()
        .ok()
        .map(|p| shannon(&ProbVector::new(p).expect("counts normalize to 1")));

    let frequencies: Vec<Value> = est
        .pattern_counts()
        .nonzero()
        .iter()
        .map(|&(code, count)| {
            let ranks = OrdinalPattern::decode(code, args.d)
                .map(|p| p.ranks().to_vec())
                .unwrap_or_default();
            json!({
                "code": code,
                "ranks": ranks,
                "count": count,
                "frequency": count as f64 / n as f64,
            })
        })
        .collect();

    let report = json!({
        "input": args.input.display().to_string(),
        "d": args.d,
        "series_length": series.len(),
        "window_count": n,
        "sci": jf(est.s_value()),
        "renyi2": renyi2.map(jf).unwrap_or(Value::Null),
        "shannon_pe": shannon_pe.map(jf).unwrap_or(Value::Null),
        "sigma2_hat": jf(lrv.sigma2_hat),
        "sigma2_raw": jf(lrv.raw_value),
        "bandwidth": jf(lrv.bandwidth),
        "kernel": lrv.kernel,
        "degenerate": lrv.degenerate,
        "ci95_low": jf(est.s_value() - half_width),
        "ci95_high": jf(est.s_value() + half_width),
        "pattern_frequencies": frequencies,
    });

    if args.json {
        println!("{}", serde_json::to_string_pretty(&report).unwrap());
    } else {
        println!("series: {} ({} values)", args.input.display(), series.len());
        println!("d = {}, windows N = {}", args.d, n);
        println!("S_n^d           = {:.6}", est.s_value());
        match renyi2 {
            Some(r2) => println!("Renyi-2 PE      = {r2:.6}"),
            None => println!("Renyi-2 PE      = undefined (S_n^d <= 0)"),
        }
        println!(
            "sigma^2 (HAC)   = {:.6e}  (kernel {}, bandwidth {:.3})",
            lrv.sigma2_hat, lrv.kernel, lrv.bandwidth
        );
        if lrv.degenerate {
            println!(
                "warning: long-run variance is degenerate (near zero); the \
                 pattern distribution is close to uniform and normal-theory \
                 intervals collapse"
            );
        }
        println!(
            "95% CI for S^d  = [{:.6}, {:.6}]",
            est.s_value() - half_width,
            est.s_value() + half_width
        );
        println!("patterns observed: {}", est.pattern_counts().nonzero().len());
    }
    Ok(())
}

fn test_result_json(result: &TestResult, alpha: f64) -> Value {
    json!({
        "method": result.method,
        "statistic": jf(result.statistic),
        "p_value": jf(result.p_value),
        "alpha": alpha,
        "reject_at_0.05": result.p_value <= 0.05,
        "reject_at_alpha": result.p_value <= alpha,
        "diagnostics": serde_json::to_value(&result.diagnostics).unwrap(),
    })
}

fn cmd_test(args: TestArgs) -> Result<(), SciError> {
    let x = load_series(&args.x, args.column.as_deref(), args.jitter, args.seed, 0)?;
    let y = load_series(&args.y, args.column.as_deref(), args.jitter, args.seed, 1)?;

    let result = match args.method {
        MethodArg::Sci => {
            let config = SciTestConfig {
                kernel: args.kernel.spec(),
                bandwidth: args.bandwidth,
            };
            sci_two_sample_test_with_parts(&x, &y, args.d, &config)?.0
        }
        MethodArg::Ks => ks_two_sample(&x, &y)?,
        MethodArg::Jp => {
            let config = JpTestConfig {
                kernel: args.kernel.spec(),
                bandwidth: args.bandwidth,
                reps: args.reps,
                seed: args.seed,
            };
            jp_spectral_test(&x, &y, &config)?
        }
    };

    if args.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&test_result_json(&result, args.alpha)).unwrap()
        );
    } else {
        println!("method    = {:?}", result.method);
        println!("statistic = {:.6}", result.statistic);
        println!("p-value   = {:.6}", result.p_value);
        println!(
            "decision  = {} H0 at level {}",
            if result.p_value <= args.alpha {
                "reject"
            } else {
                "do not reject"
            },
            args.alpha
        );
        if result.diagnostics.degenerate_warning == Some(true) {
            println!(
                "warning: both variance estimates are degenerate while the SCI \
                 values differ; the statistic is reported as infinite"
            );
        }
    }
    Ok(())
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), SciError> {
    let model: DgpModel = args.model.parse()?;
    let spec = DgpSpec {
        model,
        theta: args.theta,
        n: args.n,
        seed: args.seed,
        burn_in: args.burn_in,
    };
    let series = simulate(&spec)?;
    write_series(&args.output, &series)?;
    let manifest = json!({
        "model": model.name(),
        "theta": spec.theta,
        "n": spec.n,
        "seed": spec.seed,
        "burn_in": spec.burn_in,
        "rng": "splitmix64-counter",
        "output": args.output.display().to_string(),
    });
    println!("{}", serde_json::to_string_pretty(&manifest).unwrap());
    Ok(())
}

const POWER_THETA: f64 = 0.8;

fn cmd_mc(args: McArgs) -> Result<(), SciError> {
    let method = match args.test {
        MethodArg::Sci => TestMethod::Sci,
        MethodArg::Ks => TestMethod::Ks,
        MethodArg::Jp => TestMethod::Jp,
    };
    for &i in &args.dgp {
        DgpModel::from_index(i)?;
    }
    std::fs::create_dir_all(&args.out_dir)?;

    let make_plan = |x: DgpTemplate, y: DgpTemplate, n: usize, cell: u64| {
        let mut plan = ExperimentPlan::new(x, y, method, n);
        plan.d = args.d;
        plan.reps = args.reps;
        plan.alpha = args.alpha;
        plan.jp_reps = args.jp_reps;
        plan.root_seed = CounterRng::derive(args.seed, cell).key();
        plan
    };

    let (table, mode) = match args.mode.as_str() {
        "size" => {
            let row_labels: Vec<String> = args.n.iter().map(|n| format!("n={n}")).collect();
            let col_labels: Vec<String> = args.dgp.iter().map(|i| format!("DGP{i}")).collect();
            let mut table = ResultTable::new(
                &format!("Size of the {} test (alpha={})", method_name(method), args.alpha),
                row_labels,
                col_labels,
            );
            let mut cell_id = 0u64;
            for (row, &n) in args.n.iter().enumerate() {
                for (col, &i) in args.dgp.iter().enumerate() {
                    let model = DgpModel::from_index(i)?;
                    let template = DgpTemplate::new(model, DEFAULT_THETA);
                    let plan = make_plan(template, template, n, cell_id);
                    cell_id += 1;
                    eprintln!("running size cell DGP{i}, n={n} ...");
                    table.set(row, col, TableCell::Value(run_experiment(&plan)?));
                }
            }
            (table, "size")
        }
        "power" => {
            let mut row_labels = Vec::new();
            for &i in &args.dgp {
                for &n in &args.n {
                    row_labels.push(format!("DGP{i} n={n}"));
                }
            }
            let col_labels: Vec<String> = args.dgp.iter().map(|j| format!("DGP{j}")).collect();
            let mut table = ResultTable::new(
                &format!(
                    "Power of the {} test (alpha={}; diagonal switches theta {} -> {})",
                    method_name(method),
                    args.alpha,
                    DEFAULT_THETA,
                    POWER_THETA
                ),
                row_labels,
                col_labels,
            );
            let mut cell_id = 1_000_000u64;
            for (bi, &i) in args.dgp.iter().enumerate() {
                for (ni, &n) in args.n.iter().enumerate() {
                    let row = bi * args.n.len() + ni;
                    for (col, &j) in args.dgp.iter().enumerate() {
                        if j < i {
                            table.set(row, col, TableCell::Omitted);
                            continue;
                        }
                        let model_x = DgpModel::from_index(i)?;
                        let model_y = DgpModel::from_index(j)?;
                        let theta_y = if i == j { POWER_THETA } else { DEFAULT_THETA };
                        let plan = make_plan(
                            DgpTemplate::new(model_x, DEFAULT_THETA),
                            DgpTemplate::new(model_y, theta_y),
                            n,
                            cell_id,
                        );
                        cell_id += 1;
                        eprintln!("running power cell DGP{i} vs DGP{j}, n={n} ...");
                        table.set(row, col, TableCell::Value(run_experiment(&plan)?));
                    }
                }
            }
            (table, "power")
        }
        other => {
            return Err(SciError::InvalidInput(format!(
                "unknown mode '{other}' (expected size|power)"
            )))
        }
    };

    let stem = format!("{}_{mode}", method_name(method));
    let tsv_path = args.out_dir.join(format!("{stem}.tsv"));
    let txt_path = args.out_dir.join(format!("{stem}.txt"));
    let json_path = args.out_dir.join(format!("{stem}.json"));
    let manifest_path = args.out_dir.join("seed_manifest.json");
    std::fs::write(&tsv_path, table.to_tsv()?)?;
    std::fs::write(&txt_path, table.to_text()?)?;
    std::fs::write(&json_path, serde_json::to_string_pretty(&table).unwrap())?;
    std::fs::write(
        &manifest_path,
        serde_json::to_string_pretty(&json!({
            "root_seed": args.seed,
            "manifest": SeedManifest::new(args.seed),
            "cell_seed_rule": "cell c uses root CounterRng::derive(seed, c).key(); size cells number 0.., power cells 1000000..",
        }))
        .unwrap(),
    )?;

    print!("{}", table.to_text()?);
    eprintln!(
        "wrote {}, {}, {}, {}",
        tsv_path.display(),
        txt_path.display(),
        json_path.display(),
        manifest_path.display()
    );
    Ok(())
}

fn method_name(method: TestMethod) -> &'static str {
    match method {
        TestMethod::Sci => "sci",
        TestMethod::Ks => "ks",
        TestMethod::Jp => "jp",
    }
}
