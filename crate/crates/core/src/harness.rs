//! Experiment orchestration: direct top-k baselines, correlation analysis,
//! a random-search parameter tuner and resumable multi-run experiment plans.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs::{File, OpenOptions};
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::mpsc;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use log::{info, warn};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::brkga::{self, top_k_indices, Brkga, BrkgaConfig, Budget, GuidanceMode};
use crate::error::{Error, Result};
use crate::graph::{load_edge_list, DirectedGraph};
use crate::guidance::{probabilities_checked, random_params, GuidanceParams, ParamsFile};
use crate::influence::{objective, SeedSet, Solution};
use crate::metrics::{compute_metrics, Metric, MetricsConfig, MetricsTable, METRIC_COUNT};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AlgorithmLabel {
    #[serde(rename = "brkga")]
    Brkga,
    #[serde(rename = "brkga+llm")]
    BrkgaLlm,
    #[serde(rename = "brkga+static")]
    BrkgaStatic,
    #[serde(rename = "brkga+dynamic")]
    BrkgaDynamic,
    #[serde(rename = "brkga+tuned")]
    BrkgaTuned,
    /// Top-k nodes by LLM-derived probability, no search.
    #[serde(rename = "direct-topk")]
    DirectTopk,
    /// Top-k nodes by out-degree, no search.
    #[serde(rename = "out-degree")]
    OutDegree,
}

impl AlgorithmLabel {
    pub const ALL: [AlgorithmLabel; 7] = [
        Self::Brkga,
        Self::BrkgaLlm,
        Self::BrkgaStatic,
        Self::BrkgaDynamic,
        Self::BrkgaTuned,
        Self::DirectTopk,
        Self::OutDegree,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Brkga => "brkga",
            Self::BrkgaLlm => "brkga+llm",
            Self::BrkgaStatic => "brkga+static",
            Self::BrkgaDynamic => "brkga+dynamic",
            Self::BrkgaTuned => "brkga+tuned",
            Self::DirectTopk => "direct-topk",
            Self::OutDegree => "out-degree",
        }
    }

    fn guidance_source(self) -> &'static str {
        match self {
            Self::Brkga => "uniform",
            Self::BrkgaLlm | Self::DirectTopk => "llm",
            Self::BrkgaStatic => "static-random",
            Self::BrkgaDynamic => "dynamic-random",
            Self::BrkgaTuned => "tuner",
            Self::OutDegree => "out-degree",
        }
    }
}

impl fmt::Display for AlgorithmLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AlgorithmLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown algorithm label {s:?}")))
    }
}

/// One row of an experiment result file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance: String,
    pub n: usize,
    pub arcs: usize,
    pub k: usize,
    pub d: u32,
    pub algorithm: AlgorithmLabel,
    pub guidance_source: String,
    pub run: usize,
    pub rng_seed: u64,
    pub best_objective: usize,
    /// Seed node ids separated by spaces.
    pub seeds: String,
    pub wall_seconds: f64,
    pub generations: u64,
    pub evaluations: u64,
    pub timestamp: u64,
}

impl RunRecord {
    pub fn seed_nodes(&self) -> Result<Vec<usize>> {
        self.seeds
            .split_whitespace()
            .map(|t| {
                t.parse()
                    .map_err(|_| Error::Config(format!("bad seed id {t:?} in record")))
            })
            .collect()
    }

    /// Re-evaluates the stored seed set and checks it against the stored
    /// objective and the record's invariants.
    pub fn revalidate(&self, graph: &DirectedGraph) -> Result<()> {
        if graph.node_count() != self.n || graph.arc_count() != self.arcs {
            return Err(Error::Config(format!(
                "record for {} does not match the supplied graph",
                self.instance
            )));
        }
        let seeds = SeedSet::new(self.seed_nodes()?, self.k, self.n)?;
        let value = objective(graph, &seeds, self.d);
        if value != self.best_objective {
            return Err(Error::Config(format!(
                "stored objective {} but seed set evaluates to {value}",
                self.best_objective
            )));
        }
        let k_effective = self.k.min(self.n);
        if !(k_effective..=self.n).contains(&value) {
            return Err(Error::Config(format!(
                "objective {value} outside [{k_effective}, {}]",
                self.n
            )));
        }
        Ok(())
    }

    fn key(&self) -> RunKey {
        (
            self.instance.clone(),
            self.k,
            self.d,
            self.algorithm,
            self.run,
        )
    }
}

type RunKey = (String, usize, u32, AlgorithmLabel, usize);

fn join_seeds(seeds: &SeedSet) -> String {
    seeds
        .nodes()
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn write_records(records: &[RunRecord], path: &Path) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    for r in records {
        writer.serialize(r)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_records(path: &Path) -> Result<Vec<RunRecord>> {
    let mut reader = csv::Reader::from_path(path)?;
    reader
        .deserialize()
        .map(|r| r.map_err(Error::from))
        .collect()
}

/// The `k` nodes with the largest values (smaller id on ties), evaluated.
pub fn direct_topk_solution(
    values: &[f64],
    k: usize,
    graph: &DirectedGraph,
    d: u32,
) -> Result<Solution> {
    let n = graph.node_count();
    if values.len() != n {
        return Err(Error::Shape {
            expected: n,
            found: values.len(),
        });
    }
    if k == 0 || k > n {
        return Err(Error::Config(format!("k = {k} must lie in 1..={n}")));
    }
    let chosen = top_k_indices(values, k, &mut Vec::with_capacity(n));
    Ok(Solution::evaluate(graph, SeedSet::new(chosen, k, n)?, d))
}

pub fn out_degree_values(graph: &DirectedGraph) -> Vec<f64> {
    graph.nodes().map(|v| graph.out_degree(v) as f64).collect()
}

/// Sample Pearson correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Shape {
            expected: x.len(),
            found: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::UndefinedCorrelation(format!(
            "need at least 2 points, got {}",
            x.len()
        )));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::UndefinedCorrelation("constant series".into()));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub series_a: String,
    pub series_b: String,
    pub rho: f64,
    pub n_points: usize,
}

impl CorrelationReport {
    pub fn compute(series_a: &str, x: &[f64], series_b: &str, y: &[f64]) -> Result<Self> {
        Ok(Self {
            series_a: series_a.to_string(),
            series_b: series_b.to_string(),
            rho: pearson(x, y)?,
            n_points: x.len(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TuningTrial {
    pub trial: usize,
    pub params: GuidanceParams,
    /// Mean best objective over the inner runs.
    pub score: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TuningOutcome {
    pub best: GuidanceParams,
    pub best_score: f64,
    pub log: Vec<TuningTrial>,
}

impl TuningOutcome {
    pub fn log_csv(&self) -> String {
        let mut out = String::from("trial,score");
        for name in ["alpha", "beta"] {
            for i in 1..=METRIC_COUNT {
                out.push_str(&format!(",{name}_{i}"));
            }
        }
        out.push('\n');
        for t in &self.log {
            out.push_str(&format!("{},{}", t.trial, t.score));
            for v in t.params.alpha().iter().chain(t.params.beta()) {
                out.push_str(&format!(",{v}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Random search over the alpha/beta space. Every candidate is scored by
/// `runs_per_trial` BRKGA runs seeded `inner.rng_seed + r`, so all
/// candidates face the same random streams. Ties keep the earlier trial.
pub fn tune_params(
    graph: &DirectedGraph,
    metrics: &MetricsTable,
    k: usize,
    d: u32,
    trial_budget: usize,
    runs_per_trial: usize,
    inner: BrkgaConfig,
    seed: u64,
) -> Result<TuningOutcome> {
    if trial_budget == 0 || runs_per_trial == 0 {
        return Err(Error::Config(
            "tuning needs at least one trial and one run per trial".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut log = Vec::with_capacity(trial_budget);
    for trial in 0..trial_budget {
        let params = random_params(&mut rng);
        let probabilities = probabilities_checked(graph, metrics, &params)?;
        let mut total = 0usize;
        for r in 0..runs_per_trial {
            let config = BrkgaConfig {
                rng_seed: inner.rng_seed.wrapping_add(r as u64),
                ..inner
            };
            let outcome = brkga::run(
                graph,
                k,
                d,
                GuidanceMode::Fixed(probabilities.clone()),
                config,
            )?;
            total += outcome.best.objective_value;
        }
        let score = total as f64 / runs_per_trial as f64;
        info!("tuning trial {trial}: score {score}");
        log.push(TuningTrial {
            trial,
            params,
            score,
        });
    }
    let best = log
        .iter()
        .fold(&log[0], |acc, t| if t.score > acc.score { t } else { acc });
    Ok(TuningOutcome {
        best: best.params,
        best_score: best.score,
        log,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub name: String,
    pub path: PathBuf,
    #[serde(default)]
    pub llm_params: Option<PathBuf>,
    #[serde(default)]
    pub tuned_params: Option<PathBuf>,
}

/// Declarative experiment description, read from JSON or TOML. Relative
/// paths resolve against the plan file's directory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPlan {
    pub instances: Vec<InstanceSpec>,
    pub k: Vec<usize>,
    pub d: Vec<u32>,
    pub algorithms: Vec<AlgorithmLabel>,
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default)]
    pub seed: u64,
    /// Worker threads; all cores when absent.
    #[serde(default)]
    pub workers: Option<usize>,
    /// Solver settings shared by every BRKGA cell. `rng_seed` is replaced
    /// per run.
    #[serde(default)]
    pub brkga: BrkgaConfig,
}

fn default_runs() -> usize {
    10
}

impl ExperimentPlan {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut plan: Self = match path.extension().and_then(|e| e.to_str()) {
            Some("toml") => toml::from_str(&text)?,
            _ => serde_json::from_str(&text)?,
        };
        if let Some(dir) = path.parent() {
            plan.resolve_paths(dir);
        }
        plan.validate()?;
        Ok(plan)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        for inst in &mut self.instances {
            fix(&mut inst.path);
            if let Some(p) = inst.llm_params.as_mut() {
                fix(p);
            }
            if let Some(p) = inst.tuned_params.as_mut() {
                fix(p);
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.instances.is_empty() || self.k.is_empty() || self.d.is_empty() {
            return Err(Error::Config(
                "plan needs at least one instance, k and d".into(),
            ));
        }
        if self.algorithms.is_empty() || self.runs == 0 {
            return Err(Error::Config(
                "plan needs at least one algorithm and one run".into(),
            ));
        }
        let mut names = HashSet::new();
        for inst in &self.instances {
            if !names.insert(&inst.name) {
                return Err(Error::Config(format!("duplicate instance {:?}", inst.name)));
            }
            for label in &self.algorithms {
                let missing = match label {
                    AlgorithmLabel::BrkgaLlm | AlgorithmLabel::DirectTopk => {
                        inst.llm_params.is_none()
                    }
                    AlgorithmLabel::BrkgaTuned => inst.tuned_params.is_none(),
                    _ => false,
                };
                if missing {
                    return Err(Error::Config(format!(
                        "instance {:?} has no parameter file for {label}",
                        inst.name
                    )));
                }
            }
        }
        self.brkga.validate()
    }
}

/// Stable per-run seed derived from the plan seed and the run's cell.
pub fn run_seed(plan_seed: u64, instance: &str, k: usize, d: u32, label: AlgorithmLabel, run: usize) -> u64 {
    let mut h = Sha256::new();
    h.update(plan_seed.to_le_bytes());
    h.update((instance.len() as u64).to_le_bytes());
    h.update(instance.as_bytes());
    h.update((k as u64).to_le_bytes());
    h.update(d.to_le_bytes());
    h.update(label.as_str().as_bytes());
    h.update((run as u64).to_le_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"))
}

struct PreparedInstance {
    name: String,
    graph: DirectedGraph,
    metrics: MetricsTable,
    llm: Option<GuidanceParams>,
    tuned: Option<GuidanceParams>,
}

fn prepare(spec: &InstanceSpec) -> Result<PreparedInstance> {
    let loaded = load_edge_list(BufReader::new(File::open(&spec.path)?))?;
    let metrics = compute_metrics(&loaded.graph, &MetricsConfig::default())?;
    let read = |p: &Option<PathBuf>| -> Result<Option<GuidanceParams>> {
        p.as_ref()
            .map(|path| ParamsFile::read(path)?.params())
            .transpose()
    };
    Ok(PreparedInstance {
        name: spec.name.clone(),
        graph: loaded.graph,
        metrics,
        llm: read(&spec.llm_params)?,
        tuned: read(&spec.tuned_params)?,
    })
}

struct Task {
    instance: usize,
    k: usize,
    d: u32,
    label: AlgorithmLabel,
    run: usize,
}

fn execute_task(plan: &ExperimentPlan, inst: &PreparedInstance, task: &Task) -> Result<RunRecord> {
    let graph = &inst.graph;
    let rng_seed = run_seed(plan.seed, &inst.name, task.k, task.d, task.label, task.run);
    let started = Instant::now();
    let fixed = |params: Option<GuidanceParams>| -> Result<GuidanceMode> {
        let params = params.ok_or_else(|| Error::Config("missing parameters".into()))?;
        Ok(GuidanceMode::Fixed(probabilities_checked(
            graph,
            &inst.metrics,
            &params,
        )?))
    };
    let (solution, generations, evaluations) = match task.label {
        AlgorithmLabel::OutDegree => (
            direct_topk_solution(&out_degree_values(graph), task.k, graph, task.d)?,
            0,
            1,
        ),
        AlgorithmLabel::DirectTopk => {
            let GuidanceMode::Fixed(p) = fixed(inst.llm)? else {
                unreachable!()
            };
            (direct_topk_solution(p.values(), task.k, graph, task.d)?, 0, 1)
        }
        label => {
            let mode = match label {
                AlgorithmLabel::Brkga => GuidanceMode::Uniform,
                AlgorithmLabel::BrkgaLlm => fixed(inst.llm)?,
                AlgorithmLabel::BrkgaTuned => fixed(inst.tuned)?,
                AlgorithmLabel::BrkgaStatic => GuidanceMode::StaticRandom { seed: rng_seed },
                _ => GuidanceMode::DynamicRandom { seed: rng_seed },
            };
            let config = BrkgaConfig {
                rng_seed,
                ..plan.brkga
            };
            let outcome =
                Brkga::with_metrics(graph, task.k, task.d, mode, config, inst.metrics.clone())?
                    .run()?;
            (outcome.best, outcome.generations, outcome.evaluations)
        }
    };
    Ok(RunRecord {
        instance: inst.name.clone(),
        n: graph.node_count(),
        arcs: graph.arc_count(),
        k: task.k,
        d: task.d,
        algorithm: task.label,
        guidance_source: task.label.guidance_source().to_string(),
        run: task.run,
        rng_seed,
        best_objective: solution.objective_value,
        seeds: join_seeds(&solution.seed_set),
        wall_seconds: started.elapsed().as_secs_f64(),
        generations,
        evaluations,
        timestamp: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or_default(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentReport {
    /// Every record in the results file, earlier sessions included.
    pub records: Vec<RunRecord>,
    /// Runs executed by this call.
    pub executed: usize,
    pub skipped_instances: Vec<String>,
    pub summary_csv: String,
}

impl ExperimentReport {
    /// 0 when every instance was available, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.skipped_instances.is_empty() {
            0
        } else {
            2
        }
    }
}

/// Runs every cell of the plan, appending records to `results`. Records
/// already present in `results` are not recomputed.
pub fn compare_experiment(plan: &ExperimentPlan, results: &Path) -> Result<ExperimentReport> {
    plan.validate()?;
    let existing = if results.exists() {
        read_records(results)?
    } else {
        Vec::new()
    };
    let done: HashSet<RunKey> = existing.iter().map(RunRecord::key).collect();

    let mut skipped = Vec::new();
    let mut prepared = Vec::new();
    for spec in &plan.instances {
        if !spec.path.exists() {
            warn!("instance {} not found at {}", spec.name, spec.path.display());
            skipped.push(spec.name.clone());
            continue;
        }
        prepared.push(prepare(spec)?);
    }

    let mut tasks = Vec::new();
    for (i, inst) in prepared.iter().enumerate() {
        for &d in &plan.d {
            for &k in &plan.k {
                for &label in &plan.algorithms {
                    for run in 0..plan.runs {
                        let key = (inst.name.clone(), k, d, label, run);
                        if !done.contains(&key) {
                            tasks.push(Task {
                                instance: i,
                                k,
                                d,
                                label,
                                run,
                            });
                        }
                    }
                }
            }
        }
    }
    info!(
        "{} runs to execute, {} already recorded",
        tasks.len(),
        done.len()
    );

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = plan.workers {
        builder = builder.num_threads(w.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;

    let file = OpenOptions::new().create(true).append(true).open(results)?;
    let write_header = existing.is_empty() && file.metadata()?.len() == 0;
    let (sender, receiver) = mpsc::channel::<RunRecord>();
    let executed = std::thread::scope(|scope| -> Result<usize> {
        let collector = scope.spawn(move || -> Result<Vec<RunRecord>> {
            let mut writer = csv::WriterBuilder::new()
                .has_headers(write_header)
                .from_writer(file);
            let mut fresh = Vec::new();
            for record in receiver {
                writer.serialize(&record)?;
                writer.flush()?;
                fresh.push(record);
            }
            Ok(fresh)
        });
        let outcome: Result<()> = pool.install(|| {
            tasks.par_iter().try_for_each_with(sender, |tx, task| {
                let record = execute_task(plan, &prepared[task.instance], task)?;
                tx.send(record)
                    .map_err(|_| Error::Config("result collector stopped".into()))
            })
        });
        let fresh = collector.join().expect("collector thread panicked")?;
        outcome?;
        Ok(fresh.len())
    })?;

    let records = read_records(results)?;
    let summary_csv = summary_table(plan, &records);
    Ok(ExperimentReport {
        records,
        executed,
        skipped_instances: skipped,
        summary_csv,
    })
}

/// Mean best objective per cell: one row per (instance, d), one column per
/// (k, algorithm). Cells without records are left empty.
pub fn summary_table(plan: &ExperimentPlan, records: &[RunRecord]) -> String {
    let mut sums: BTreeMap<(&str, u32, usize, AlgorithmLabel), (usize, usize)> = BTreeMap::new();
    for r in records {
        let e = sums
            .entry((r.instance.as_str(), r.d, r.k, r.algorithm))
            .or_default();
        e.0 += r.best_objective;
        e.1 += 1;
    }
    let mut out = String::from("instance,d");
    for &k in &plan.k {
        for label in &plan.algorithms {
            out.push_str(&format!(",k{k}:{label}"));
        }
    }
    out.push('\n');
    for inst in &plan.instances {
        let present = records.iter().any(|r| r.instance == inst.name);
        if !present {
            continue;
        }
        for &d in &plan.d {
            out.push_str(&format!("{},{d}", inst.name));
            for &k in &plan.k {
                for &label in &plan.algorithms {
                    out.push(',');
                    if let Some(&(sum, count)) = sums.get(&(inst.name.as_str(), d, k, label)) {
                        out.push_str(&format!("{:.2}", sum as f64 / count as f64));
                    }
                }
            }
            out.push('\n');
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetricPairsExport {
    /// `node_id,metric,value` rows of normalized values.
    pub long_csv: String,
    /// 5x5 Pearson matrix; cells involving a constant column are empty.
    pub matrix_csv: String,
    pub matrix: [[Option<f64>; METRIC_COUNT]; METRIC_COUNT],
    pub notes: Vec<String>,
}

pub fn metric_pairs_export(metrics: &MetricsTable) -> MetricPairsExport {
    let mut long_csv = String::from("node_id,metric,value\n");
    for (v, row) in metrics.rows().iter().enumerate() {
        for (m, value) in Metric::ALL.iter().zip(row) {
            long_csv.push_str(&format!("{v},{},{value}\n", m.name()));
        }
    }
    let columns: Vec<Vec<f64>> = Metric::ALL.iter().map(|&m| metrics.column(m)).collect();
    let mut matrix = [[None; METRIC_COUNT]; METRIC_COUNT];
    let mut notes = Vec::new();
    for (i, m) in Metric::ALL.iter().enumerate() {
        if pearson(&columns[i], &columns[i]).is_err() {
            notes.push(format!(
                "{} is constant; its correlations are undefined",
                m.name()
            ));
        }
        for j in 0..METRIC_COUNT {
            matrix[i][j] = pearson(&columns[i], &columns[j]).ok();
        }
    }
    let mut matrix_csv = String::from("metric");
    for m in Metric::ALL {
        matrix_csv.push(',');
        matrix_csv.push_str(m.name());
    }
    matrix_csv.push('\n');
    for (i, m) in Metric::ALL.iter().enumerate() {
        matrix_csv.push_str(m.name());
        for cell in &matrix[i] {
            matrix_csv.push(',');
            if let Some(rho) = cell {
                matrix_csv.push_str(&format!("{rho:.6}"));
            }
        }
        matrix_csv.push('\n');
    }
    MetricPairsExport {
        long_csv,
        matrix_csv,
        matrix,
        notes,
    }
}

/// Small generation-budgeted plan with default seeds, for tests and demos.
pub fn quick_plan(instances: Vec<InstanceSpec>, k: Vec<usize>, d: Vec<u32>, algorithms: Vec<AlgorithmLabel>, runs: usize, generations: u64) -> ExperimentPlan {
    ExperimentPlan {
        instances,
        k,
        d,
        algorithms,
        runs,
        seed: 0,
        workers: None,
        brkga: BrkgaConfig {
            pop_size: 30,
            budget: Budget::generations(generations),
            ..BrkgaConfig::default()
        },
    }
}
