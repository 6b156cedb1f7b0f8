use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use kdds::brkga::{self, BrkgaConfig, Budget, GuidanceMode};
use kdds::gateway::{estimate_tokens, replay, ExchangeLog, LlmClient, MockTransport, ModelConfig, Provider};
use kdds::graph::{generate_erdos_renyi, load_edge_list, write_edge_list, LoadedGraph};
use kdds::guidance::{probabilities_checked, validate_params, ParamsFile, ParamsSource, ProbabilityVector};
use kdds::harness::{compare_experiment, metric_pairs_export, tune_params, CorrelationReport, ExperimentPlan};
use kdds::influence::{CoverageEvaluator, SeedSet};
use kdds::metrics::{compute_metrics, ClosenessMode, MetricsConfig};
use kdds::prompting::{build_pinned_example_fixture, build_prompt, parse_llm_answer, ExampleFixture, Notation, PromptOptions};
use log::info;

#[derive(Parser)]
#[command(name = "kdds", version, about = "Guided BRKGA for the k-d dominating set problem")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a seeded Erdos-Renyi digraph as an edge list.
    Generate {
        #[arg(long)]
        nodes: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute the five node metrics and write them as CSV.
    Metrics {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "harmonic-out")]
        closeness: String,
        /// Also write the dense-to-original node id map.
        #[arg(long)]
        id_map: Option<PathBuf>,
    },
    /// Objective value of a seed list (original node ids, one per line).
    Evaluate {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        seeds: PathBuf,
        #[arg(long)]
        d: u32,
    },
    /// Render the prompt for a graph and report its token estimate.
    Prompt {
        #[command(flatten)]
        prompt: PromptArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Send the prompt to a model and store the parsed parameters.
    Ask {
        #[command(flatten)]
        prompt: PromptArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the BRKGA.
    Solve(SolveArgs),
    /// Random-search alpha/beta tuning.
    Tune {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        d: u32,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        runs_per_trial: usize,
        #[command(flatten)]
        ga: GaArgs,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// CSV with every trial's parameters and score.
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Run an experiment plan (JSON or TOML).
    Compare {
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        results: PathBuf,
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Metric values in long form plus their correlation matrix.
    ExportMetrics {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        long: PathBuf,
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Pearson correlation between two parameter files, alpha and beta separately.
    Correlate {
        a: PathBuf,
        b: PathBuf,
    },
    /// Regenerate the example fixture embedded in every prompt.
    Fixture {
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct PromptArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    d: u32,
    #[arg(long)]
    omit_problem: bool,
    #[arg(long)]
    omit_example: bool,
    /// Refused: the answer format is mandatory.
    #[arg(long)]
    omit_rules: bool,
    #[arg(long)]
    decimal: bool,
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long, default_value = "openrouter")]
    provider: String,
    #[arg(long, default_value = "anthropic/claude-3-opus")]
    model: String,
    #[arg(long, default_value_t = 0.0)]
    temperature: f64,
    #[arg(long, default_value_t = 1000)]
    max_tokens: usize,
    #[arg(long, default_value_t = 200_000)]
    context_window: usize,
    #[arg(long, default_value_t = 0.95)]
    window_margin: f64,
    #[arg(long)]
    base_url: Option<String>,
    /// Environment variable holding the API key.
    #[arg(long)]
    api_key_env: Option<String>,
    #[arg(long, default_value_t = 3)]
    retries: u32,
    #[arg(long, default_value_t = 300)]
    timeout: u64,
    /// Answer from a recorded exchange log instead of the network.
    #[arg(long)]
    replay: Option<PathBuf>,
    /// Append the exchange to this JSON-lines log.
    #[arg(long)]
    exchange_log: Option<PathBuf>,
    /// Response text returned by the mock provider.
    #[arg(long)]
    mock_response: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct GaArgs {
    #[arg(long, default_value_t = 100)]
    pop_size: usize,
    #[arg(long, default_value_t = 0.15)]
    elite_frac: f64,
    #[arg(long, default_value_t = 0.15)]
    mutant_frac: f64,
    #[arg(long, default_value_t = 0.7)]
    prob_elite: f64,
    #[arg(long, default_value_t = 1)]
    seed_flag: u8,
    #[arg(long, default_value_t = 1)]
    rng_seed: u64,
    /// Seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    #[arg(long)]
    max_generations: Option<u64>,
    #[arg(long)]
    max_evaluations: Option<u64>,
}

impl GaArgs {
    fn config(&self) -> Result<BrkgaConfig> {
        if self.seed_flag > 1 {
            bail!("--seed-flag must be 0 or 1");
        }
        let mut budget = Budget {
            time_limit: self.time_limit.map(Duration::from_secs_f64),
            max_generations: self.max_generations,
            max_evaluations: self.max_evaluations,
        };
        if budget == Budget::default() {
            budget = Budget::generations(100);
        }
        let config = BrkgaConfig {
            pop_size: self.pop_size,
            elite_frac: self.elite_frac,
            mutant_frac: self.mutant_frac,
            prob_elite: self.prob_elite,
            seed_flag: self.seed_flag == 1,
            rng_seed: self.rng_seed,
            budget,
        };
        config.validate()?;
        Ok(config)
    }
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    d: u32,
    /// uniform | file:<params.json> | probfile:<probs.csv> | static-random | dynamic-random
    #[arg(long, default_value = "uniform")]
    guidance: GuidanceArg,
    /// Seed for the random guidance modes; defaults to --rng-seed.
    #[arg(long)]
    guidance_seed: Option<u64>,
    #[command(flatten)]
    ga: GaArgs,
    #[arg(long, default_value_t = 1)]
    runs: usize,
    /// Directory for per-run trajectory and solution files.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Include wall-clock seconds in trajectory files.
    #[arg(long)]
    timing: bool,
}

#[derive(Clone, Debug)]
enum GuidanceArg {
    Uniform,
    Params(PathBuf),
    Probabilities(PathBuf),
    StaticRandom,
    DynamicRandom,
}

impl FromStr for GuidanceArg {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if let Some(path) = s.strip_prefix("file:") {
            return Ok(Self::Params(path.into()));
        }
        if let Some(path) = s.strip_prefix("probfile:") {
            return Ok(Self::Probabilities(path.into()));
        }
        match s {
            "uniform" => Ok(Self::Uniform),
            "static-random" => Ok(Self::StaticRandom),
            "dynamic-random" => Ok(Self::DynamicRandom),
            _ => Err(format!(
                "unknown guidance {s:?}; expected uniform, file:<path>, probfile:<path>, static-random or dynamic-random"
            )),
        }
    }
}

fn read_graph(path: &Path) -> Result<LoadedGraph> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let loaded = load_edge_list(BufReader::new(file)).with_context(|| format!("reading {}", path.display()))?;
    info!(
        "{}: {} nodes, {} arcs",
        path.display(),
        loaded.graph.node_count(),
        loaded.graph.arc_count()
    );
    Ok(loaded)
}

fn render(args: &PromptArgs) -> Result<kdds::PromptDocument> {
    let loaded = read_graph(&args.graph)?;
    let metrics = compute_metrics(&loaded.graph, &MetricsConfig::default())?;
    let options = PromptOptions {
        omit_problem: args.omit_problem,
        omit_example: args.omit_example,
        omit_rules: args.omit_rules,
        notation: if args.decimal { Notation::Decimal } else { Notation::Scientific },
    };
    Ok(build_prompt(ExampleFixture::golden(), &metrics, args.k, args.d, &options)?)
}

fn model_config(args: &ModelArgs) -> Result<ModelConfig> {
    let provider: Provider = args.provider.parse()?;
    let mut cfg = match provider {
        Provider::OpenrouterCompatible => ModelConfig::openrouter(&args.model, args.context_window),
        Provider::AnthropicCompatible => ModelConfig::anthropic(&args.model, args.context_window),
        Provider::Mock => ModelConfig::mock(args.context_window),
    };
    cfg.temperature = args.temperature;
    cfg.max_output_tokens = args.max_tokens;
    cfg.window_margin = args.window_margin;
    cfg.retries = args.retries;
    cfg.timeout_secs = args.timeout;
    if let Some(url) = &args.base_url {
        cfg.base_url = url.clone();
    }
    if let Some(var) = &args.api_key_env {
        cfg.api_key_env = var.clone();
    }
    Ok(cfg)
}

fn ask(prompt: &kdds::PromptDocument, args: &ModelArgs) -> Result<(String, String)> {
    if let Some(log) = &args.replay {
        return Ok((replay(log, prompt)?, "replay".into()));
    }
    let cfg = model_config(args)?;
    let model = cfg.model_name.clone();
    let log = args.exchange_log.as_ref().map(ExchangeLog::new);
    let text = if cfg.provider == Provider::Mock {
        let path = args
            .mock_response
            .as_ref()
            .context("the mock provider needs --mock-response")?;
        let canned = fs::read_to_string(path)?;
        let mut client = LlmClient::new(cfg, MockTransport::canned(&canned))?;
        if let Some(log) = log {
            client = client.with_log(log);
        }
        client.execute(prompt)?
    } else {
        let mut client = LlmClient::http(cfg)?;
        if let Some(log) = log {
            client = client.with_log(log);
        }
        client.execute(prompt)?
    };
    Ok((text, model))
}

fn solve(args: &SolveArgs) -> Result<()> {
    let loaded = read_graph(&args.graph)?;
    let graph = &loaded.graph;
    let base = args.ga.config()?;
    if args.runs == 0 {
        bail!("--runs must be at least 1");
    }
    let fixed = match &args.guidance {
        GuidanceArg::Params(path) => {
            let params = ParamsFile::read(path)?.params()?;
            let metrics = compute_metrics(graph, &MetricsConfig::default())?;
            Some(probabilities_checked(graph, &metrics, &params)?)
        }
        GuidanceArg::Probabilities(path) => {
            let text = fs::read_to_string(path)?;
            Some(ProbabilityVector::from_csv(&text, graph.node_count())?)
        }
        _ => None,
    };
    if let Some(dir) = &args.out_dir {
        fs::create_dir_all(dir)?;
    }
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    for run in 0..args.runs {
        let config = BrkgaConfig {
            rng_seed: base.rng_seed.wrapping_add(run as u64),
            ..base
        };
        let guidance_seed = args.guidance_seed.unwrap_or(config.rng_seed).wrapping_add(run as u64);
        let mode = match &args.guidance {
            GuidanceArg::Uniform => GuidanceMode::Uniform,
            GuidanceArg::StaticRandom => GuidanceMode::StaticRandom { seed: guidance_seed },
            GuidanceArg::DynamicRandom => GuidanceMode::DynamicRandom { seed: guidance_seed },
            _ => GuidanceMode::Fixed(fixed.clone().expect("loaded above")),
        };
        let outcome = brkga::run(graph, args.k, args.d, mode, config)?;
        let ids: Vec<String> = outcome
            .best
            .seed_set
            .nodes()
            .iter()
            .map(|&v| loaded.id_map.original(v).expect("dense id").to_string())
            .collect();
        writeln!(
            out,
            "run {run}: objective {} after {} generations, {} evaluations",
            outcome.best.objective_value, outcome.generations, outcome.evaluations
        )?;
        writeln!(out, "seeds: {}", ids.join(" "))?;
        if let Some(dir) = &args.out_dir {
            fs::write(dir.join(format!("trajectory_run{run}.csv")), outcome.trajectory_csv(args.timing))?;
            fs::write(
                dir.join(format!("solution_run{run}.txt")),
                format!("{}\n", ids.join("\n")),
            )?;
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Generate { nodes, p, seed, out } => {
            let g = generate_erdos_renyi(nodes, p, seed)?;
            write_edge_list(&g, BufWriter::new(File::create(&out)?))?;
            println!("{} nodes, {} arcs -> {}", g.node_count(), g.arc_count(), out.display());
        }
        Command::Metrics { graph, out, closeness, id_map } => {
            let loaded = read_graph(&graph)?;
            let config = MetricsConfig {
                closeness: ClosenessMode::from_str(&closeness)?,
                ..MetricsConfig::default()
            };
            let table = compute_metrics(&loaded.graph, &config)?;
            fs::write(&out, table.to_csv())?;
            if let Some(path) = id_map {
                fs::write(path, loaded.id_map.to_csv())?;
            }
        }
        Command::Evaluate { graph, seeds, d } => {
            let loaded = read_graph(&graph)?;
            let n = loaded.graph.node_count();
            let mut nodes = Vec::new();
            for line in fs::read_to_string(&seeds)?.lines() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let original: u64 = line.parse().with_context(|| format!("bad node id {line:?}"))?;
                let dense = loaded
                    .id_map
                    .dense(original)
                    .with_context(|| format!("node {original} is not in the graph"))?;
                nodes.push(dense);
            }
            let k = nodes.len().max(1);
            let set = SeedSet::new(nodes, k, n)?;
            let covered = CoverageEvaluator::new(n).covered(&loaded.graph, set.nodes(), d);
            println!("objective {}", covered.len());
            println!("covered {} of {} nodes with {} seeds", covered.len(), n, set.len());
        }
        Command::Prompt { prompt, out } => {
            let doc = render(&prompt)?;
            fs::write(&out, &doc.rendered)?;
            println!(
                "{} bytes, about {} tokens -> {}",
                doc.rendered.len(),
                estimate_tokens(&doc.rendered),
                out.display()
            );
        }
        Command::Ask { prompt, model, out } => {
            let doc = render(&prompt)?;
            let (text, model_name) = ask(&doc, &model)?;
            let raw = parse_llm_answer(&text)?;
            let params = validate_params(raw.alpha, raw.beta)?;
            ParamsFile::new(&params, ParamsSource::Llm, Some(model_name)).write(&out)?;
            println!("alpha {:?}", params.alpha());
            println!("beta  {:?}", params.beta());
        }
        Command::Solve(args) => solve(&args)?,
        Command::Tune { graph, k, d, trials, runs_per_trial, ga, seed, out, log } => {
            let loaded = read_graph(&graph)?;
            let metrics = compute_metrics(&loaded.graph, &MetricsConfig::default())?;
            let outcome = tune_params(&loaded.graph, &metrics, k, d, trials, runs_per_trial, ga.config()?, seed)?;
            ParamsFile::new(&outcome.best, ParamsSource::Tuner, None).write(&out)?;
            if let Some(path) = log {
                fs::write(path, outcome.log_csv())?;
            }
            println!("best score {} over {} trials", outcome.best_score, outcome.log.len());
        }
        Command::Compare { plan, results, summary } => {
            let plan = ExperimentPlan::read(&plan)?;
            let report = compare_experiment(&plan, &results)?;
            match summary {
                Some(path) => fs::write(path, &report.summary_csv)?,
                None => print!("{}", report.summary_csv),
            }
            for name in &report.skipped_instances {
                eprintln!("skipped missing instance {name}");
            }
            eprintln!("{} runs executed, {} recorded", report.executed, report.records.len());
            return Ok(ExitCode::from(report.exit_code() as u8));
        }
        Command::ExportMetrics { graph, long, matrix } => {
            let loaded = read_graph(&graph)?;
            let table = compute_metrics(&loaded.graph, &MetricsConfig::default())?;
            let export = metric_pairs_export(&table);
            fs::write(long, export.long_csv)?;
            fs::write(matrix, export.matrix_csv)?;
            for note in export.notes {
                eprintln!("note: {note}");
            }
        }
        Command::Correlate { a, b } => {
            let (pa, pb) = (ParamsFile::read(&a)?, ParamsFile::read(&b)?);
            for (label, x, y) in [("alpha", pa.alpha, pb.alpha), ("beta", pa.beta, pb.beta)] {
                let report = CorrelationReport::compute(&format!("{}:{label}", a.display()), &x, &format!("{}:{label}", b.display()), &y)?;
                println!("{label} rho {:.4} (n = {})", report.rho, report.n_points);
            }
        }
        Command::Fixture { out } => {
            let json = build_pinned_example_fixture()?.to_json()?;
            fs::write(&out, &json)?;
            if json != ExampleFixture::golden_json() {
                eprintln!("warning: regenerated fixture differs from the embedded one");
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
