//! Biased random-key genetic algorithm for the k-d dominating set problem.
//!
//! An individual is a vector of `|V|` keys in `[0, 1]`. The decoder scores
//! every node as `out_degree * key * guidance` and keeps the `k` best (ties
//! go to the smaller id). Each generation keeps the elite unchanged, adds
//! fresh random mutants and fills the rest with biased uniform crossover
//! between an elite and a non-elite parent.
//!
//! All randomness comes from streams derived from `(rng_seed, generation,
//! index)`, so serial and parallel evaluation produce the same population.

use std::cmp::Ordering;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, NodeId};
use crate::guidance::{
    probabilities_checked, random_params, uniform_guidance, GuidanceParams, ProbabilityVector,
};
use crate::influence::{CoverageEvaluator, SeedSet, Solution};
use crate::metrics::{compute_metrics, MetricsConfig, MetricsTable};

/// Stopping rule. Whichever configured limit is reached first ends the run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Budget {
    #[serde(default, with = "opt_secs")]
    pub time_limit: Option<Duration>,
    #[serde(default)]
    pub max_generations: Option<u64>,
    /// A generation only starts if all of its evaluations fit.
    #[serde(default)]
    pub max_evaluations: Option<u64>,
}

impl Budget {
    pub fn generations(n: u64) -> Self {
        Self {
            max_generations: Some(n),
            ..Self::default()
        }
    }

    pub fn evaluations(n: u64) -> Self {
        Self {
            max_evaluations: Some(n),
            ..Self::default()
        }
    }

    pub fn seconds(secs: f64) -> Self {
        Self {
            time_limit: Some(Duration::from_secs_f64(secs)),
            ..Self::default()
        }
    }

    fn is_unbounded(&self) -> bool {
        self.time_limit.is_none() && self.max_generations.is_none() && self.max_evaluations.is_none()
    }
}

mod opt_secs {
    use std::time::Duration;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Duration>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(d) => s.serialize_some(&d.as_secs_f64()),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Duration>, D::Error> {
        let secs = Option::<f64>::deserialize(d)?;
        secs.map(|s| Duration::try_from_secs_f64(s).map_err(serde::de::Error::custom))
            .transpose()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BrkgaConfig {
    pub pop_size: usize,
    pub elite_frac: f64,
    pub mutant_frac: f64,
    pub prob_elite: f64,
    /// Seed the initial population with one all-0.5 individual.
    pub seed_flag: bool,
    pub rng_seed: u64,
    pub budget: Budget,
}

impl Default for BrkgaConfig {
    fn default() -> Self {
        Self {
            pop_size: 100,
            elite_frac: 0.15,
            mutant_frac: 0.15,
            prob_elite: 0.7,
            seed_flag: true,
            rng_seed: 1,
            budget: Budget::generations(100),
        }
    }
}

impl BrkgaConfig {
    pub fn elite_count(&self) -> usize {
        ((self.elite_frac * self.pop_size as f64).floor() as usize).max(1)
    }

    pub fn mutant_count(&self) -> usize {
        ((self.mutant_frac * self.pop_size as f64).floor() as usize).max(1)
    }

    pub fn crossover_count(&self) -> usize {
        self.pop_size - self.elite_count() - self.mutant_count()
    }

    /// Objective evaluations spent per generation after the first.
    pub fn evaluations_per_generation(&self) -> usize {
        self.pop_size - self.elite_count()
    }

    pub fn validate(&self) -> Result<()> {
        let frac_ok = |x: f64| x > 0.0 && x < 1.0;
        if !frac_ok(self.elite_frac) || !frac_ok(self.mutant_frac) {
            return Err(Error::Config(format!(
                "elite ({}) and mutant ({}) fractions must lie in (0, 1)",
                self.elite_frac, self.mutant_frac
            )));
        }
        if self.elite_frac + self.mutant_frac >= 1.0 {
            return Err(Error::Config("elite + mutant fractions must be < 1".into()));
        }
        if !(self.prob_elite > 0.5 && self.prob_elite <= 1.0) {
            return Err(Error::Config(format!(
                "prob_elite {} not in (0.5, 1]",
                self.prob_elite
            )));
        }
        if self.elite_count() + self.mutant_count() >= self.pop_size {
            return Err(Error::Config(format!(
                "population of {} leaves no room for crossover children",
                self.pop_size
            )));
        }
        if self.budget.is_unbounded() {
            return Err(Error::Config("budget needs at least one limit".into()));
        }
        Ok(())
    }
}

/// Where the decoder's per-node multipliers come from.
#[derive(Clone, Debug, PartialEq)]
pub enum GuidanceMode {
    Uniform,
    Fixed(ProbabilityVector),
    /// One random alpha/beta draw for the whole run.
    StaticRandom { seed: u64 },
    /// A fresh alpha/beta draw at every generation.
    DynamicRandom { seed: u64 },
}

impl GuidanceMode {
    fn needs_metrics(&self) -> bool {
        matches!(self, Self::StaticRandom { .. } | Self::DynamicRandom { .. })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Individual {
    keys: Vec<f64>,
    fitness: Option<usize>,
    solution: Option<SeedSet>,
}

impl Individual {
    pub fn new(keys: Vec<f64>) -> Result<Self> {
        if let Some(&bad) = keys.iter().find(|k| !(0.0..=1.0).contains(*k)) {
            return Err(Error::Config(format!("random key {bad} outside [0, 1]")));
        }
        Ok(Self::from_keys(keys))
    }

    fn from_keys(keys: Vec<f64>) -> Self {
        Self {
            keys,
            fitness: None,
            solution: None,
        }
    }

    pub fn keys(&self) -> &[f64] {
        &self.keys
    }

    pub fn fitness(&self) -> Option<usize> {
        self.fitness
    }

    pub fn solution(&self) -> Option<&SeedSet> {
        self.solution.as_ref()
    }

    fn random(n: usize, rng: &mut impl Rng) -> Self {
        Self::from_keys((0..n).map(|_| rng.random::<f64>()).collect())
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Population {
    pub individuals: Vec<Individual>,
}

impl Population {
    pub fn len(&self) -> usize {
        self.individuals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.individuals.is_empty()
    }

    /// Best evaluated individual; ties go to the lower index.
    pub fn best(&self) -> Option<&Individual> {
        self.ranking().first().map(|&i| &self.individuals[i])
    }

    /// Indices ordered by fitness descending, then index ascending.
    /// Unevaluated individuals sort last.
    fn ranking(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.individuals.len()).collect();
        idx.sort_by(|&a, &b| {
            let fa = self.individuals[a].fitness;
            let fb = self.individuals[b].fitness;
            fb.cmp(&fa).then(a.cmp(&b))
        });
        idx
    }
}

const STREAM_INIT: u64 = 1;
const STREAM_MUTANT: u64 = 2;
const STREAM_CHILD: u64 = 3;
const STREAM_GUIDANCE: u64 = 4;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent RNG for one (seed, generation, index, purpose) tuple.
pub fn derived_rng(seed: u64, generation: u64, index: u64, purpose: u64) -> ChaCha8Rng {
    let mut h = splitmix64(seed);
    for part in [generation, index, purpose] {
        h = splitmix64(h ^ part);
    }
    ChaCha8Rng::seed_from_u64(h)
}

/// Random initial population. With `seed_flag`, the last individual has
/// every key equal to 0.5.
pub fn init_population(config: &BrkgaConfig, n: usize) -> Population {
    let mut individuals: Vec<Individual> = (0..config.pop_size)
        .map(|i| Individual::random(n, &mut derived_rng(config.rng_seed, 0, i as u64, STREAM_INIT)))
        .collect();
    if config.seed_flag {
        if let Some(last) = individuals.last_mut() {
            *last = Individual::from_keys(vec![0.5; n]);
        }
    }
    Population { individuals }
}

/// Per-gene biased uniform crossover.
pub fn crossover(
    elite_parent: &Individual,
    other_parent: &Individual,
    prob_elite: f64,
    rng: &mut impl Rng,
) -> Result<Individual> {
    if elite_parent.keys.len() != other_parent.keys.len() {
        return Err(Error::Shape {
            expected: elite_parent.keys.len(),
            found: other_parent.keys.len(),
        });
    }
    let keys = elite_parent
        .keys
        .iter()
        .zip(&other_parent.keys)
        .map(|(&e, &o)| if rng.random::<f64>() < prob_elite { e } else { o })
        .collect();
    Ok(Individual::from_keys(keys))
}

/// Scratch buffers for repeated decoding on one graph.
#[derive(Clone, Debug, Default)]
pub struct DecodeScratch {
    score: Vec<f64>,
    order: Vec<NodeId>,
    coverage: CoverageEvaluator,
}

impl DecodeScratch {
    pub fn new(n: usize) -> Self {
        Self {
            score: Vec::with_capacity(n),
            order: Vec::with_capacity(n),
            coverage: CoverageEvaluator::new(n),
        }
    }
}

/// Indices of the `k` largest values, larger value first and smaller id on
/// ties, returned in ascending id order.
pub(crate) fn top_k_indices(values: &[f64], k: usize, order: &mut Vec<NodeId>) -> Vec<NodeId> {
    order.clear();
    order.extend(0..values.len());
    let cmp = |a: &NodeId, b: &NodeId| -> Ordering {
        values[*b].total_cmp(&values[*a]).then(a.cmp(b))
    };
    if k < order.len() && k > 0 {
        order.select_nth_unstable_by(k - 1, cmp);
    }
    let mut chosen = order[..k.min(order.len())].to_vec();
    chosen.sort_unstable();
    chosen
}

/// Greedy decoder: top-`k` nodes by `out_degree * key * probability`.
pub fn decode(
    keys: &[f64],
    graph: &DirectedGraph,
    k: usize,
    d: u32,
    probabilities: &ProbabilityVector,
    scratch: &mut DecodeScratch,
) -> Result<Solution> {
    let n = graph.node_count();
    if k == 0 || k > n {
        return Err(Error::Config(format!("k = {k} must lie in 1..={n}")));
    }
    if keys.len() != n {
        return Err(Error::Shape {
            expected: n,
            found: keys.len(),
        });
    }
    if probabilities.len() != n {
        return Err(Error::Shape {
            expected: n,
            found: probabilities.len(),
        });
    }
    Ok(decode_unchecked(keys, graph, k, d, probabilities.values(), scratch))
}

fn decode_unchecked(
    keys: &[f64],
    graph: &DirectedGraph,
    k: usize,
    d: u32,
    probabilities: &[f64],
    scratch: &mut DecodeScratch,
) -> Solution {
    scratch.score.clear();
    scratch.score.extend(
        graph
            .nodes()
            .map(|v| graph.out_degree(v) as f64 * keys[v] * probabilities[v]),
    );
    let chosen = top_k_indices(&scratch.score, k, &mut scratch.order);
    let objective_value = scratch.coverage.coverage(graph, &chosen, d);
    Solution {
        seed_set: SeedSet::new(chosen, k, graph.node_count()).expect("top-k is a valid seed set"),
        objective_value,
        d,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrajectoryRecord {
    pub generation: u64,
    pub evaluations: u64,
    pub best_fitness: usize,
    pub elapsed_secs: f64,
    /// Alpha/beta in force this generation (random guidance modes only).
    pub params: Option<GuidanceParams>,
}

/// Sizes of the three groups produced by one generation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenerationStats {
    pub elites: usize,
    pub mutants: usize,
    pub children: usize,
    pub evaluations: usize,
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub best: Solution,
    pub trajectory: Vec<TrajectoryRecord>,
    pub generations: u64,
    pub evaluations: u64,
    pub elapsed: Duration,
}

impl RunOutcome {
    /// Trajectory as CSV. Wall-clock is only included on request so that
    /// identical runs produce identical files.
    pub fn trajectory_csv(&self, with_timing: bool) -> String {
        use std::fmt::Write as _;
        let mut out = String::from("generation,evaluations,best_fitness");
        if with_timing {
            out.push_str(",elapsed_secs");
        }
        let has_params = self.trajectory.iter().any(|r| r.params.is_some());
        if has_params {
            for p in ["alpha", "beta"] {
                for i in 1..=5 {
                    let _ = write!(out, ",{p}_{i}");
                }
            }
        }
        out.push('\n');
        for r in &self.trajectory {
            let _ = write!(out, "{},{},{}", r.generation, r.evaluations, r.best_fitness);
            if with_timing {
                let _ = write!(out, ",{:.6}", r.elapsed_secs);
            }
            if has_params {
                if let Some(p) = &r.params {
                    for v in p.alpha().iter().chain(p.beta()) {
                        let _ = write!(out, ",{v}");
                    }
                } else {
                    out.push_str(",,,,,,,,,,");
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Solver state for one run on one instance.
pub struct Brkga<'g> {
    graph: &'g DirectedGraph,
    k: usize,
    d: u32,
    config: BrkgaConfig,
    mode: GuidanceMode,
    metrics: Option<MetricsTable>,
    probabilities: ProbabilityVector,
    params: Option<GuidanceParams>,
    generation: u64,
    evaluations: u64,
}

impl<'g> Brkga<'g> {
    pub fn new(
        graph: &'g DirectedGraph,
        k: usize,
        d: u32,
        mode: GuidanceMode,
        config: BrkgaConfig,
    ) -> Result<Self> {
        let metrics = if mode.needs_metrics() {
            Some(compute_metrics(graph, &MetricsConfig::default())?)
        } else {
            None
        };
        Self::build(graph, k, d, mode, config, metrics)
    }

    /// Like [`Self::new`], reusing an already computed metrics table for
    /// the random guidance modes.
    pub fn with_metrics(
        graph: &'g DirectedGraph,
        k: usize,
        d: u32,
        mode: GuidanceMode,
        config: BrkgaConfig,
        metrics: MetricsTable,
    ) -> Result<Self> {
        Self::build(graph, k, d, mode, config, Some(metrics))
    }

    fn build(
        graph: &'g DirectedGraph,
        k: usize,
        d: u32,
        mode: GuidanceMode,
        config: BrkgaConfig,
        metrics: Option<MetricsTable>,
    ) -> Result<Self> {
        config.validate()?;
        let n = graph.node_count();
        if k == 0 || k > n {
            return Err(Error::Config(format!("k = {k} must lie in 1..={n}")));
        }
        if let Some(m) = &metrics {
            if m.len() != n {
                return Err(Error::Shape {
                    expected: n,
                    found: m.len(),
                });
            }
        }
        let probabilities = match &mode {
            GuidanceMode::Fixed(p) => {
                p.check_graph(graph)?;
                p.clone()
            }
            _ => uniform_guidance(n),
        };
        let mut solver = Self {
            graph,
            k,
            d,
            config,
            mode,
            metrics,
            probabilities,
            params: None,
            generation: 0,
            evaluations: 0,
        };
        if let GuidanceMode::StaticRandom { seed } = solver.mode {
            solver.redraw_guidance(seed, 0)?;
        }
        Ok(solver)
    }

    fn redraw_guidance(&mut self, seed: u64, generation: u64) -> Result<()> {
        let params = random_params(&mut derived_rng(seed, generation, 0, STREAM_GUIDANCE));
        let metrics = self
            .metrics
            .as_ref()
            .ok_or_else(|| Error::Config("random guidance needs a metrics table".into()))?;
        self.probabilities = probabilities_checked(self.graph, metrics, &params)?;
        self.params = Some(params);
        Ok(())
    }

    pub fn config(&self) -> &BrkgaConfig {
        &self.config
    }

    pub fn probabilities(&self) -> &ProbabilityVector {
        &self.probabilities
    }

    /// Alpha/beta currently in force, for the random guidance modes.
    pub fn current_params(&self) -> Option<&GuidanceParams> {
        self.params.as_ref()
    }

    pub fn generation(&self) -> u64 {
        self.generation
    }

    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }

    /// Decodes every individual without a cached fitness. Returns how many
    /// were evaluated.
    pub fn evaluate(&mut self, population: &mut Population) -> usize {
        let graph = self.graph;
        let (k, d) = (self.k, self.d);
        let probs = self.probabilities.values();
        let n = graph.node_count();
        let pending: Vec<&mut Individual> = population
            .individuals
            .iter_mut()
            .filter(|ind| ind.fitness.is_none())
            .collect();
        let count = pending.len();
        let work = |scratch: &mut DecodeScratch, ind: &mut Individual| {
            let sol = decode_unchecked(&ind.keys, graph, k, d, probs, scratch);
            ind.fitness = Some(sol.objective_value);
            ind.solution = Some(sol.seed_set);
        };
        // Tiny instances are faster serially; results are identical either way.
        if n * count >= 50_000 {
            pending
                .into_par_iter()
                .for_each_init(|| DecodeScratch::new(n), work);
        } else {
            let mut scratch = DecodeScratch::new(n);
            for ind in pending {
                work(&mut scratch, ind);
            }
        }
        self.evaluations += count as u64;
        count
    }

    /// Builds and evaluates the initial population.
    pub fn init_population(&mut self) -> Result<Population> {
        self.generation = 0;
        self.evaluations = 0;
        if let GuidanceMode::DynamicRandom { seed } = self.mode {
            self.redraw_guidance(seed, 0)?;
        }
        let mut population = init_population(&self.config, self.graph.node_count());
        self.evaluate(&mut population);
        Ok(population)
    }

    /// One generation: keep elites, add mutants, breed the rest, evaluate
    /// the newcomers.
    pub fn evolve_generation(&mut self, population: &mut Population) -> Result<GenerationStats> {
        let cfg = self.config;
        if population.len() != cfg.pop_size {
            return Err(Error::Shape {
                expected: cfg.pop_size,
                found: population.len(),
            });
        }
        if population.individuals.iter().any(|i| i.fitness.is_none()) {
            return Err(Error::Config("population must be evaluated first".into()));
        }
        self.generation += 1;
        let generation = self.generation;
        if let GuidanceMode::DynamicRandom { seed } = self.mode {
            self.redraw_guidance(seed, generation)?;
        }

        let n = self.graph.node_count();
        let n_elite = cfg.elite_count();
        let n_mutant = cfg.mutant_count();
        let n_child = cfg.crossover_count();
        let ranking = population.ranking();
        let old = std::mem::take(&mut population.individuals);
        let mut slots: Vec<Option<Individual>> = old.into_iter().map(Some).collect();
        let ranked: Vec<Individual> = ranking
            .iter()
            .map(|&i| slots[i].take().expect("ranking is a permutation"))
            .collect();

        let mut next: Vec<Individual> = Vec::with_capacity(cfg.pop_size);
        next.extend(ranked[..n_elite].iter().cloned());
        next.extend((0..n_mutant).map(|i| {
            Individual::random(
                n,
                &mut derived_rng(cfg.rng_seed, generation, i as u64, STREAM_MUTANT),
            )
        }));
        for i in 0..n_child {
            let mut rng = derived_rng(cfg.rng_seed, generation, i as u64, STREAM_CHILD);
            let elite = &ranked[rng.random_range(0..n_elite)];
            let other = &ranked[rng.random_range(n_elite..cfg.pop_size)];
            next.push(crossover(elite, other, cfg.prob_elite, &mut rng)?);
        }
        population.individuals = next;
        let evaluations = self.evaluate(population);
        Ok(GenerationStats {
            elites: n_elite,
            mutants: n_mutant,
            children: n_child,
            evaluations,
        })
    }

    /// Runs until the budget is exhausted.
    pub fn run(mut self) -> Result<RunOutcome> {
        let start = Instant::now();
        let mut population = self.init_population()?;
        let mut best = self.best_of(&population);
        let mut trajectory = vec![self.record(&best, start)];
        let budget = self.config.budget;
        let per_generation = self.config.evaluations_per_generation() as u64;
        loop {
            if budget.max_generations.is_some_and(|g| self.generation >= g) {
                break;
            }
            if budget
                .max_evaluations
                .is_some_and(|e| self.evaluations + per_generation > e)
            {
                break;
            }
            if budget.time_limit.is_some_and(|t| start.elapsed() >= t) {
                break;
            }
            self.evolve_generation(&mut population)?;
            let candidate = self.best_of(&population);
            if candidate.objective_value > best.objective_value {
                best = candidate;
            }
            trajectory.push(self.record(&best, start));
        }
        Ok(RunOutcome {
            best,
            trajectory,
            generations: self.generation,
            evaluations: self.evaluations,
            elapsed: start.elapsed(),
        })
    }

    fn best_of(&self, population: &Population) -> Solution {
        let ind = population.best().expect("population is never empty");
        Solution {
            seed_set: ind.solution.clone().expect("evaluated"),
            objective_value: ind.fitness.expect("evaluated"),
            d: self.d,
        }
    }

    fn record(&self, best: &Solution, start: Instant) -> TrajectoryRecord {
        TrajectoryRecord {
            generation: self.generation,
            evaluations: self.evaluations,
            best_fitness: best.objective_value,
            elapsed_secs: start.elapsed().as_secs_f64(),
            params: self.params,
        }
    }
}

/// Convenience wrapper: build a solver and run it to completion.
pub fn run(
    graph: &DirectedGraph,
    k: usize,
    d: u32,
    mode: GuidanceMode,
    config: BrkgaConfig,
) -> Result<RunOutcome> {
    Brkga::new(graph, k, d, mode, config)?.run()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate_erdos_renyi;
    use crate::influence::objective;

    fn cfg(pop: usize, gens: u64, seed: u64) -> BrkgaConfig {
        BrkgaConfig {
            pop_size: pop,
            rng_seed: seed,
            budget: Budget::generations(gens),
            ..BrkgaConfig::default()
        }
    }

    #[test]
    fn seed_flag_adds_one_half_individual() {
        let pop = init_population(&cfg(20, 1, 3), 10);
        let halves = pop
            .individuals
            .iter()
            .filter(|i| i.keys.iter().all(|&k| k == 0.5))
            .count();
        assert_eq!(halves, 1);
        let pop = init_population(
            &BrkgaConfig {
                seed_flag: false,
                ..cfg(20, 1, 3)
            },
            10,
        );
        assert!(pop
            .individuals
            .iter()
            .all(|i| !i.keys.iter().all(|&k| k == 0.5)));
    }

    #[test]
    fn init_population_is_reproducible_and_in_range() {
        let c = BrkgaConfig {
            seed_flag: false,
            ..cfg(30, 1, 77)
        };
        assert_eq!(init_population(&c, 12), init_population(&c, 12));
        for seed in 0..1000 {
            let pop = init_population(&cfg(5, 1, seed), 8);
            assert!(pop
                .individuals
                .iter()
                .flat_map(|i| &i.keys)
                .all(|k| (0.0..=1.0).contains(k)));
        }
    }

    #[test]
    fn path_decode_hand_trace() {
        let g = DirectedGraph::from_arcs(6, (0..5).map(|i| (i, i + 1))).unwrap().0;
        let mut scratch = DecodeScratch::new(6);
        let sol = decode(&[1.0; 6], &g, 2, 1, &uniform_guidance(6), &mut scratch).unwrap();
        assert_eq!(sol.seed_set.nodes(), &[0, 1]);
        assert_eq!(sol.objective_value, 3);
    }

    #[test]
    fn equal_keys_reduce_to_degree_heuristic() {
        let g = DirectedGraph::from_arcs(5, [(3, 0), (3, 1), (3, 2), (1, 0), (1, 2), (4, 0)])
            .unwrap()
            .0;
        let mut scratch = DecodeScratch::new(5);
        let sol = decode(&[0.3; 5], &g, 2, 1, &uniform_guidance(5), &mut scratch).unwrap();
        assert_eq!(sol.seed_set.nodes(), &[1, 3]);
        let sol = decode(&[0.3; 5], &g, 3, 1, &uniform_guidance(5), &mut scratch).unwrap();
        assert_eq!(sol.seed_set.nodes(), &[1, 3, 4]);
    }

    #[test]
    fn decode_errors() {
        let g = generate_erdos_renyi(5, 0.5, 1).unwrap();
        let mut s = DecodeScratch::new(5);
        let u = uniform_guidance(5);
        assert!(matches!(
            decode(&[0.5; 5], &g, 6, 1, &u, &mut s),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            decode(&[0.5; 4], &g, 2, 1, &u, &mut s),
            Err(Error::Shape { .. })
        ));
    }

    #[test]
    fn crossover_edge_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = Individual::new(vec![0.1, 0.2, 0.3]).unwrap();
        let b = Individual::new(vec![0.9, 0.8, 0.7]).unwrap();
        assert_eq!(crossover(&a, &b, 1.0, &mut rng).unwrap().keys, a.keys);
        assert_eq!(crossover(&a, &a, 0.7, &mut rng).unwrap().keys, a.keys);
        let short = Individual::new(vec![0.5]).unwrap();
        assert!(crossover(&a, &short, 0.7, &mut rng).is_err());
        assert!(Individual::new(vec![1.5]).is_err());
    }

    #[test]
    fn crossover_inherits_at_prob_elite_rate() {
        let n = 100_000;
        let elite = Individual::from_keys(vec![1.0; n]);
        let other = Individual::from_keys(vec![0.0; n]);
        let child = crossover(&elite, &other, 0.7, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        let frac = child.keys.iter().sum::<f64>() / n as f64;
        assert!((frac - 0.7).abs() < 0.01, "{frac}");
    }

    #[test]
    fn config_validation() {
        assert!(BrkgaConfig::default().validate().is_ok());
        let bad = [
            BrkgaConfig { elite_frac: 0.6, mutant_frac: 0.5, ..Default::default() },
            BrkgaConfig { prob_elite: 0.5, ..Default::default() },
            BrkgaConfig { pop_size: 2, ..Default::default() },
            BrkgaConfig { budget: Budget::default(), ..Default::default() },
            BrkgaConfig { elite_frac: 0.0, ..Default::default() },
        ];
        for c in bad {
            assert!(c.validate().is_err(), "{c:?}");
        }
    }

    #[test]
    fn generation_sizes_and_economy() {
        let g = generate_erdos_renyi(30, 0.1, 2).unwrap();
        let c = cfg(40, 5, 9);
        let mut solver = Brkga::new(&g, 3, 1, GuidanceMode::Uniform, c).unwrap();
        let mut pop = solver.init_population().unwrap();
        assert_eq!(solver.evaluations(), 40);
        for _ in 0..5 {
            let before = pop.best().unwrap().fitness().unwrap();
            let stats = solver.evolve_generation(&mut pop).unwrap();
            assert_eq!(stats.elites + stats.mutants + stats.children, 40);
            assert_eq!(stats.evaluations, stats.mutants + stats.children);
            assert_eq!(pop.len(), 40);
            assert!(pop.best().unwrap().fitness().unwrap() >= before);
        }
        assert_eq!(solver.evaluations(), 40 + 5 * 34);
    }

    #[test]
    fn zero_generation_budget_returns_initial_best() {
        let g = generate_erdos_renyi(25, 0.1, 4).unwrap();
        let c = cfg(20, 0, 5);
        let out = run(&g, 3, 2, GuidanceMode::Uniform, c).unwrap();
        assert_eq!(out.generations, 0);
        assert_eq!(out.evaluations, 20);
        assert_eq!(out.trajectory.len(), 1);
        let mut solver = Brkga::new(&g, 3, 2, GuidanceMode::Uniform, c).unwrap();
        let pop = solver.init_population().unwrap();
        assert_eq!(out.best.objective_value, pop.best().unwrap().fitness().unwrap());
    }

    #[test]
    fn evaluation_budget_is_never_exceeded() {
        let g = generate_erdos_renyi(25, 0.1, 4).unwrap();
        let c = BrkgaConfig {
            pop_size: 20,
            budget: Budget::evaluations(100),
            ..Default::default()
        };
        let out = run(&g, 3, 1, GuidanceMode::Uniform, c).unwrap();
        // 20 initial + 4 * 17
        assert_eq!(out.evaluations, 88);
        assert_eq!(out.generations, 4);
    }

    #[test]
    fn returned_solution_re_evaluates() {
        let g = generate_erdos_renyi(60, 0.05, 8).unwrap();
        let out = run(&g, 4, 2, GuidanceMode::DynamicRandom { seed: 3 }, cfg(30, 10, 1)).unwrap();
        assert!(out.best.seed_set.len() <= 4);
        assert_eq!(out.best.objective_value, objective(&g, &out.best.seed_set, 2));
        assert!(out.trajectory.windows(2).all(|w| w[0].best_fitness <= w[1].best_fitness));
        assert!(out.trajectory.iter().all(|r| r.params.is_some()));
    }

    #[test]
    fn static_random_keeps_one_draw() {
        let g = generate_erdos_renyi(40, 0.1, 8).unwrap();
        let out = run(&g, 3, 1, GuidanceMode::StaticRandom { seed: 3 }, cfg(20, 4, 1)).unwrap();
        let first = out.trajectory[0].params.unwrap();
        assert!(out.trajectory.iter().all(|r| r.params == Some(first)));
    }

    #[test]
    fn fixed_guidance_for_other_graph_is_rejected() {
        let g = generate_erdos_renyi(20, 0.1, 1).unwrap();
        let p = ProbabilityVector::new(vec![1.0; 19]).unwrap();
        assert!(Brkga::new(&g, 2, 1, GuidanceMode::Fixed(p), cfg(10, 1, 1)).is_err());
    }

    #[test]
    fn serial_and_parallel_evaluation_agree() {
        // large enough to take the parallel branch
        let g = generate_erdos_renyi(600, 0.01, 1).unwrap();
        let c = cfg(100, 3, 4);
        let in_pool = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| run(&g, 10, 2, GuidanceMode::Uniform, c).unwrap())
        };
        let a = in_pool(1);
        let b = in_pool(4);
        assert_eq!(a.best, b.best);
        assert_eq!(a.trajectory_csv(false), b.trajectory_csv(false));
    }

    #[test]
    fn budget_serde() {
        let b: Budget = serde_json::from_str(r#"{"time_limit": 2.5, "max_generations": 10}"#).unwrap();
        assert_eq!(b.time_limit, Some(Duration::from_millis(2500)));
        assert_eq!(b.max_generations, Some(10));
        assert_eq!(b.max_evaluations, None);
    }
}
