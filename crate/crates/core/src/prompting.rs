//! Prompt construction and answer parsing.
//!
//! A prompt has four top-level sections, each wrapped in an opening and a
//! closing tag:
//!
//! ```text
//! [PROBLEM] ... [/PROBLEM]
//! [EXAMPLE GRAPH] [DATA] ... [/DATA] [ANSWER] ... [/ANSWER] [/EXAMPLE GRAPH]
//! [EVALUATION GRAPH] [DATA] ... [/DATA] [/EVALUATION GRAPH]
//! [RULES ANSWERING] ... [/RULES ANSWERING]
//! ```
//!
//! Data rows are `id,in_degree,out_degree,closeness,betweenness,pagerank`
//! with normalized values in scientific notation (`4.561e-01`).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::brkga::{self, Budget, BrkgaConfig, GuidanceMode};
use crate::error::{Error, Result};
use crate::graph::{generate_erdos_renyi, DirectedGraph, NodeId};
use crate::guidance::GuidanceParams;
use crate::influence::SeedSet;
use crate::metrics::{compute_metrics, MetricRow, MetricsConfig, MetricsTable, METRIC_COUNT};

pub const TAG_PROBLEM: &str = "PROBLEM";
pub const TAG_EXAMPLE: &str = "EXAMPLE GRAPH";
pub const TAG_EVALUATION: &str = "EVALUATION GRAPH";
pub const TAG_RULES: &str = "RULES ANSWERING";
pub const TAG_DATA: &str = "DATA";
pub const TAG_ANSWER: &str = "ANSWER";

const ALL_TAGS: [&str; 6] = [
    TAG_PROBLEM,
    TAG_EXAMPLE,
    TAG_EVALUATION,
    TAG_RULES,
    TAG_DATA,
    TAG_ANSWER,
];

/// Parameters of the committed example graph.
pub const EXAMPLE_NODES: usize = 100;
pub const EXAMPLE_ARC_PROBABILITY: f64 = 0.05;
pub const EXAMPLE_GRAPH_SEED: u64 = 20_240_301;
pub const EXAMPLE_K: usize = 32;
pub const EXAMPLE_D: u32 = 1;
pub const EXAMPLE_BRKGA_SEED: u64 = 7;
pub const EXAMPLE_BRKGA_GENERATIONS: u64 = 300;

const GOLDEN_FIXTURE: &str = include_str!("../fixtures/example_fixture.json");

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Notation {
    /// `4.561e-01`
    #[default]
    Scientific,
    /// `0.456100`
    Decimal,
}

/// Prompt variations used in ablation runs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptOptions {
    pub omit_problem: bool,
    pub omit_example: bool,
    /// Always refused; present so callers get an explicit error.
    pub omit_rules: bool,
    pub notation: Notation,
}

/// Example graph, its metrics and a high-quality solution, embedded in every
/// prompt.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExampleFixture {
    pub node_count: usize,
    pub arc_probability: f64,
    pub graph_seed: u64,
    pub arcs: Vec<(NodeId, NodeId)>,
    pub metrics: Vec<MetricRow>,
    pub k: usize,
    pub d: u32,
    pub solution: Vec<NodeId>,
    pub objective: usize,
}

impl ExampleFixture {
    /// The committed fixture shipped with the crate.
    pub fn golden() -> &'static ExampleFixture {
        static FIXTURE: OnceLock<ExampleFixture> = OnceLock::new();
        FIXTURE.get_or_init(|| {
            serde_json::from_str(GOLDEN_FIXTURE).expect("committed fixture is valid JSON")
        })
    }

    pub fn golden_json() -> &'static str {
        GOLDEN_FIXTURE
    }

    pub fn graph(&self) -> Result<DirectedGraph> {
        Ok(DirectedGraph::from_arcs(self.node_count, self.arcs.iter().copied())?.0)
    }

    /// Canonical serialization; the golden file holds exactly these bytes.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}

/// Generates the example graph, computes its metrics and solves it with the
/// unguided BRKGA (k = 32, d = 1).
pub fn build_example_fixture(budget: Budget, rng_seed: u64) -> Result<ExampleFixture> {
    let graph = generate_erdos_renyi(EXAMPLE_NODES, EXAMPLE_ARC_PROBABILITY, EXAMPLE_GRAPH_SEED)?;
    let metrics = compute_metrics(&graph, &MetricsConfig::default())?;
    let config = BrkgaConfig {
        rng_seed,
        budget,
        ..BrkgaConfig::default()
    };
    let outcome = brkga::run(&graph, EXAMPLE_K, EXAMPLE_D, GuidanceMode::Uniform, config)?;
    Ok(ExampleFixture {
        node_count: EXAMPLE_NODES,
        arc_probability: EXAMPLE_ARC_PROBABILITY,
        graph_seed: EXAMPLE_GRAPH_SEED,
        arcs: graph.arcs().collect(),
        metrics: metrics.rows().to_vec(),
        k: EXAMPLE_K,
        d: EXAMPLE_D,
        solution: outcome.best.seed_set.nodes().to_vec(),
        objective: outcome.best.objective_value,
    })
}

/// The fixture exactly as committed: pinned seed and generation budget.
pub fn build_pinned_example_fixture() -> Result<ExampleFixture> {
    build_example_fixture(
        Budget::generations(EXAMPLE_BRKGA_GENERATIONS),
        EXAMPLE_BRKGA_SEED,
    )
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PromptDocument {
    pub problem_text: Option<String>,
    pub example_block: Option<ExampleBlock>,
    pub evaluation_block: Vec<String>,
    pub rules_text: String,
    pub rendered: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExampleBlock {
    pub data_lines: Vec<String>,
    pub solution: Vec<NodeId>,
    pub k: usize,
}

/// Formats a value as `d.ddde±XX` (three decimals, ties to even).
pub fn format_scientific(value: f64) -> String {
    let s = format!("{value:.3e}");
    let (mantissa, exponent) = s.split_once('e').expect("exponent present");
    let exp: i32 = exponent.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

fn format_value(value: f64, notation: Notation) -> String {
    match notation {
        Notation::Scientific => format_scientific(value),
        Notation::Decimal => format!("{value:.6}"),
    }
}

fn format_row(node_id: usize, values: &MetricRow, notation: Notation) -> String {
    let mut line = node_id.to_string();
    for &v in values {
        line.push(',');
        line.push_str(&format_value(v, notation));
    }
    line
}

/// `id,v1,...,v5` in scientific notation.
pub fn format_metric_row(node_id: usize, values: &MetricRow) -> String {
    format_row(node_id, values, Notation::Scientific)
}

fn problem_text(k: usize, d: u32) -> String {
    format!(
        "Consider the k-d-Dominating Set Problem (k-dDSP) on a directed graph $G=(V,A)$. \
For nodes $u,v \\in V$, $dist(u,v)$ is the number of arcs on a shortest directed path from $u$ to $v$. \
The influence of a node is $I_d(u) := \\{{v \\in V \\mid dist(u,v) \\leq d\\}}$, and for a set of nodes \
$I_d(U) := \\bigcup_{{u \\in U}} I_d(u)$. A node always influences itself.\n\
The goal is to find $U^* = \\arg\\max_{{U \\subseteq V}} |I_d(U)|$ subject to $|U| \\leq k$.\n\
For the evaluation graph below, k = {k} and d = {d}.\n"
    )
}

const METRIC_HEADER: &str =
    "Each line is: node_id,in_degree,out_degree,closeness,betweenness,pagerank. \
All metric values are normalized to [0,1].\n";

fn rules_text(k: usize, d: u32, with_example: bool) -> String {
    let guide = if with_example {
        "Use the example graph and its high-quality solution to learn which metric values characterize \
nodes that belong to good solutions, then apply that knowledge to the evaluation graph."
    } else {
        "Use your knowledge of influence spreading in social networks to judge which metric values \
characterize nodes that belong to good solutions of the evaluation graph."
    };
    format!(
        "{guide}\n\
The probability that node $v_j$ of the evaluation graph belongs to an optimal solution (k = {k}, d = {d}) is\n\
$p(v_j) = \\sigma\\left(\\sum_{{i=1}}^{{5}} \\alpha_i \\cdot (1 - (\\beta_i - m_{{j,i}}))\\right)$\n\
where $\\sigma$ is the sigmoid function and $m_{{j,1}},\\dots,m_{{j,5}}$ are the normalized in_degree, \
out_degree, closeness, betweenness and pagerank of $v_j$.\n\
- alpha_1..alpha_5 are weights giving the relative importance of each metric. Each lies strictly \
between 0 and 1 and together they must sum to 1.\n\
- beta_1..beta_5 are correction parameters. Each lies strictly between 0 and 1, they are independent \
of each other, and beta_i is the best possible value of metric i for a node in a good solution.\n\
Answer with the ten values in exactly this format, one per line:\n\
alpha_1 = <value>\nalpha_2 = <value>\nalpha_3 = <value>\nalpha_4 = <value>\nalpha_5 = <value>\n\
beta_1 = <value>\nbeta_2 = <value>\nbeta_3 = <value>\nbeta_4 = <value>\nbeta_5 = <value>\n"
    )
}

fn open(out: &mut String, tag: &str) {
    let _ = writeln!(out, "[{tag}]");
}

fn close(out: &mut String, tag: &str) {
    let _ = writeln!(out, "[/{tag}]");
}

/// Renders the full prompt for an evaluation graph.
pub fn build_prompt(
    example: &ExampleFixture,
    eval_metrics: &MetricsTable,
    k: usize,
    d: u32,
    options: &PromptOptions,
) -> Result<PromptDocument> {
    if options.omit_rules {
        return Err(Error::PromptRefused);
    }
    if eval_metrics.is_empty() {
        return Err(Error::Config("evaluation graph has no nodes".into()));
    }
    if k == 0 || d == 0 {
        return Err(Error::Config("k and d must be at least 1".into()));
    }
    let notation = options.notation;
    let mut out = String::new();

    let problem = (!options.omit_problem).then(|| problem_text(k, d));
    if let Some(text) = &problem {
        open(&mut out, TAG_PROBLEM);
        out.push_str(text);
        close(&mut out, TAG_PROBLEM);
    }

    let example_block = (!options.omit_example).then(|| ExampleBlock {
        data_lines: example
            .metrics
            .iter()
            .enumerate()
            .map(|(i, row)| format_row(i, row, notation))
            .collect(),
        solution: example.solution.clone(),
        k: example.k,
    });
    if let Some(block) = &example_block {
        open(&mut out, TAG_EXAMPLE);
        let _ = writeln!(
            out,
            "A directed Erdos-Renyi random graph with {} nodes and arc probability {}.",
            example.node_count, example.arc_probability
        );
        out.push_str(METRIC_HEADER);
        open(&mut out, TAG_DATA);
        for line in &block.data_lines {
            out.push_str(line);
            out.push('\n');
        }
        close(&mut out, TAG_DATA);
        let _ = writeln!(
            out,
            "A high-quality solution for k = {} and d = {} (node ids):",
            block.k, example.d
        );
        open(&mut out, TAG_ANSWER);
        let ids: Vec<String> = block.solution.iter().map(|v| v.to_string()).collect();
        out.push_str(&ids.join(","));
        out.push('\n');
        close(&mut out, TAG_ANSWER);
        close(&mut out, TAG_EXAMPLE);
    }

    let evaluation_block: Vec<String> = eval_metrics
        .rows()
        .iter()
        .enumerate()
        .map(|(i, row)| format_row(i, row, notation))
        .collect();
    open(&mut out, TAG_EVALUATION);
    let _ = writeln!(
        out,
        "The graph in which the k-dDSP must be solved, with {} nodes.",
        eval_metrics.len()
    );
    out.push_str(METRIC_HEADER);
    open(&mut out, TAG_DATA);
    for line in &evaluation_block {
        out.push_str(line);
        out.push('\n');
    }
    close(&mut out, TAG_DATA);
    close(&mut out, TAG_EVALUATION);

    let rules = rules_text(k, d, example_block.is_some());
    open(&mut out, TAG_RULES);
    out.push_str(&rules);
    close(&mut out, TAG_RULES);

    Ok(PromptDocument {
        problem_text: problem,
        example_block,
        evaluation_block,
        rules_text: rules,
        rendered: out,
    })
}

/// Structural problems found by [`lint_tags`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TagIssue {
    Unclosed(String),
    UnexpectedClose(String),
    /// Closing tag that does not match the innermost open one.
    Mismatched { expected: String, found: String },
    Duplicate(String),
    Misplaced { tag: String, parent: Option<String> },
}

/// Checks tag balance, nesting and uniqueness. Returns every issue found.
pub fn lint_tags(rendered: &str) -> Vec<TagIssue> {
    static TAG_RE: OnceLock<Regex> = OnceLock::new();
    let re = TAG_RE.get_or_init(|| {
        let alternatives = ALL_TAGS.map(regex::escape).join("|");
        Regex::new(&format!(r"\[(/?)({alternatives})\]")).unwrap()
    });
    let mut issues = Vec::new();
    let mut stack: Vec<String> = Vec::new();
    let mut seen: BTreeMap<(Option<String>, String), usize> = BTreeMap::new();
    for cap in re.captures_iter(rendered) {
        let closing = !cap[1].is_empty();
        let tag = cap[2].to_string();
        if closing {
            match stack.pop() {
                Some(top) if top == tag => {}
                Some(top) => {
                    issues.push(TagIssue::Mismatched {
                        expected: top,
                        found: tag,
                    });
                }
                None => issues.push(TagIssue::UnexpectedClose(tag)),
            }
            continue;
        }
        let parent = stack.last().cloned();
        let allowed = match tag.as_str() {
            TAG_DATA => matches!(parent.as_deref(), Some(TAG_EXAMPLE | TAG_EVALUATION)),
            TAG_ANSWER => parent.as_deref() == Some(TAG_EXAMPLE),
            _ => parent.is_none(),
        };
        if !allowed {
            issues.push(TagIssue::Misplaced {
                tag: tag.clone(),
                parent: parent.clone(),
            });
        }
        let count = seen.entry((parent, tag.clone())).or_default();
        *count += 1;
        if *count > 1 {
            issues.push(TagIssue::Duplicate(tag.clone()));
        }
        stack.push(tag);
    }
    issues.extend(stack.into_iter().map(TagIssue::Unclosed));
    issues
}

/// Ten raw numbers pulled from a model response, not yet validated.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RawAnswer {
    pub alpha: [f64; METRIC_COUNT],
    pub beta: [f64; METRIC_COUNT],
}

fn labelled_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(
            r"(?i)(alpha|beta|α|β)\s*(?:_|\\_)?\s*[{(\[]?\s*([1-5])\s*[})\]]?[\s$*`]*(?:=|:|is)\s*[$*`]*\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:e[-+]?\d+)?)",
        )
        .unwrap()
    })
}

/// Extracts alpha_1..alpha_5 and beta_1..beta_5 from free text.
///
/// Labelled assignments (`alpha_1 = 0.15`, `Beta 3: 0.9`, `$\alpha_{2}$ = 0.3`)
/// win; otherwise the first JSON object with five-element `alpha` and `beta`
/// arrays is used.
pub fn parse_llm_answer(text: &str) -> Result<RawAnswer> {
    let mut alpha: [Option<f64>; METRIC_COUNT] = [None; METRIC_COUNT];
    let mut beta: [Option<f64>; METRIC_COUNT] = [None; METRIC_COUNT];
    for cap in labelled_regex().captures_iter(text) {
        let family = cap[1].to_lowercase();
        let index: usize = cap[2].parse::<usize>().expect("digit") - 1;
        let Ok(value) = cap[3].parse::<f64>() else {
            continue;
        };
        let (slots, name) = if family == "alpha" || family == "α" {
            (&mut alpha, "alpha")
        } else {
            (&mut beta, "beta")
        };
        match slots[index] {
            Some(prev) if prev != value => {
                return Err(Error::AmbiguousAnswer {
                    label: format!("{name}_{}", index + 1),
                    first: prev,
                    second: value,
                });
            }
            _ => slots[index] = Some(value),
        }
    }
    let found = alpha.iter().chain(&beta).filter(|v| v.is_some()).count();
    if found == 2 * METRIC_COUNT {
        return Ok(RawAnswer {
            alpha: alpha.map(Option::unwrap),
            beta: beta.map(Option::unwrap),
        });
    }
    if let Some(answer) = find_json_answer(text) {
        return Ok(answer);
    }
    Err(Error::AnswerParse {
        found,
        raw: text.to_string(),
    })
}

fn find_json_answer(text: &str) -> Option<RawAnswer> {
    #[derive(Deserialize)]
    struct Arrays {
        #[serde(alias = "Alpha", alias = "alphas")]
        alpha: [f64; METRIC_COUNT],
        #[serde(alias = "Beta", alias = "betas")]
        beta: [f64; METRIC_COUNT],
    }
    text.match_indices('{').find_map(|(start, _)| {
        let mut stream =
            serde_json::Deserializer::from_str(&text[start..]).into_iter::<serde_json::Value>();
        let value = stream.next()?.ok()?;
        let arrays: Arrays = serde_json::from_value(value).ok()?;
        Some(RawAnswer {
            alpha: arrays.alpha,
            beta: arrays.beta,
        })
    })
}

/// Labelled-prose form of a parameter set, as a model would answer.
pub fn render_params_as_prose(params: &GuidanceParams) -> String {
    let mut out = String::from("Based on the metrics, here are the parameter values.\n");
    for (i, a) in params.alpha().iter().enumerate() {
        let _ = writeln!(out, "alpha_{} = {a}", i + 1);
    }
    for (i, b) in params.beta().iter().enumerate() {
        let _ = writeln!(out, "beta_{} = {b}", i + 1);
    }
    out
}

/// Checks that the fixture solution is feasible for its own graph.
pub fn validate_fixture(fixture: &ExampleFixture) -> Result<SeedSet> {
    SeedSet::new(fixture.solution.clone(), fixture.k, fixture.node_count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate_erdos_renyi;
    use crate::guidance::validate_params;

    #[test]
    fn metric_row_examples() {
        assert_eq!(
            format_metric_row(7, &[0.0; 5]),
            "7,0.000e+00,0.000e+00,0.000e+00,0.000e+00,0.000e+00"
        );
        assert_eq!(
            format_metric_row(3, &[1.0, 0.5, 0.25, 0.125, 0.0625]),
            "3,1.000e+00,5.000e-01,2.500e-01,1.250e-01,6.250e-02"
        );
    }

    #[test]
    fn scientific_rounds_half_to_even() {
        // 0.0078125 and 0.0078135 sit exactly or nearly on a tie at 3 decimals
        assert_eq!(format_scientific(0.0078125), "7.812e-03");
        assert_eq!(format_scientific(0.4561), "4.561e-01");
        assert_eq!(format_scientific(1e-12), "1.000e-12");
        assert_eq!(format_scientific(0.99996), "1.000e+00");
    }

    #[test]
    fn decimal_notation() {
        assert_eq!(
            format_row(1, &[0.5, 0.0, 1.0, 0.25, 0.125], Notation::Decimal),
            "1,0.500000,0.000000,1.000000,0.250000,0.125000"
        );
    }

    fn eval_table(n: usize) -> MetricsTable {
        let g = generate_erdos_renyi(n, 0.1, 5).unwrap();
        compute_metrics(&g, &MetricsConfig::default()).unwrap()
    }

    #[test]
    fn default_prompt_structure() {
        let doc = build_prompt(
            ExampleFixture::golden(),
            &eval_table(30),
            32,
            2,
            &PromptOptions::default(),
        )
        .unwrap();
        assert!(lint_tags(&doc.rendered).is_empty());
        for tag in [TAG_PROBLEM, TAG_EXAMPLE, TAG_EVALUATION, TAG_RULES] {
            assert_eq!(doc.rendered.matches(&format!("[{tag}]")).count(), 1);
            assert_eq!(doc.rendered.matches(&format!("[/{tag}]")).count(), 1);
        }
        let answer = doc
            .rendered
            .split("[ANSWER]\n")
            .nth(1)
            .unwrap()
            .split("\n[/ANSWER]")
            .next()
            .unwrap();
        assert_eq!(answer.split(',').count(), 32);
        assert!(doc.rendered.contains("k = 32 and d = 2"));
    }

    #[test]
    fn example_ablation_removes_answer() {
        let options = PromptOptions {
            omit_example: true,
            ..Default::default()
        };
        let doc = build_prompt(ExampleFixture::golden(), &eval_table(20), 8, 1, &options).unwrap();
        assert!(!doc.rendered.contains("[EXAMPLE GRAPH]"));
        assert!(!doc.rendered.contains("[ANSWER]"));
        assert!(lint_tags(&doc.rendered).is_empty());
    }

    #[test]
    fn rules_cannot_be_omitted() {
        let options = PromptOptions {
            omit_rules: true,
            ..Default::default()
        };
        assert!(matches!(
            build_prompt(ExampleFixture::golden(), &eval_table(10), 4, 1, &options),
            Err(Error::PromptRefused)
        ));
    }

    #[test]
    fn linter_catches_defects() {
        assert!(lint_tags("[PROBLEM]x[/PROBLEM]").is_empty());
        assert_eq!(
            lint_tags("[PROBLEM]x"),
            vec![TagIssue::Unclosed("PROBLEM".into())]
        );
        assert!(matches!(
            lint_tags("[PROBLEM][/RULES ANSWERING]")[0],
            TagIssue::Mismatched { .. }
        ));
        assert!(lint_tags("[EVALUATION GRAPH][ANSWER][/ANSWER][/EVALUATION GRAPH]")
            .contains(&TagIssue::Misplaced {
                tag: "ANSWER".into(),
                parent: Some("EVALUATION GRAPH".into())
            }));
        assert!(lint_tags("[PROBLEM][/PROBLEM][PROBLEM][/PROBLEM]")
            .contains(&TagIssue::Duplicate("PROBLEM".into())));
        assert_eq!(
            lint_tags("[/DATA]"),
            vec![TagIssue::UnexpectedClose("DATA".into())]
        );
    }

    #[test]
    fn parses_labelled_prose() {
        let text = "After analysing the example graph I propose:\n\
            alpha_1 = 0.15\nalpha_2 = 0.25\nAlpha_3: 0.20\n**alpha_4** = 0.30\nalpha_5 = 0.10\n\
            The beta values are: beta_1 = 0.70, beta_2 = 0.60, BETA_3 = 0.80, beta_4 = 0.05 and beta_5 = 0.10.\n\
            These weights emphasise betweenness.";
        let raw = parse_llm_answer(text).unwrap();
        assert_eq!(raw.alpha, [0.15, 0.25, 0.20, 0.30, 0.10]);
        assert_eq!(raw.beta, [0.70, 0.60, 0.80, 0.05, 0.10]);
    }

    #[test]
    fn parses_latex_labels() {
        let text = r"$\alpha_{1}$ = 0.1, $\alpha_{2}$ = 0.3, $\alpha_{3}$ = 0.2, $\alpha_{4}$ = 0.1, $\alpha_{5}$ = 0.3;
            $\beta_1 = 0.6$, $\beta_2 = 0.6$, $\beta_3 = 0.9$, $\beta_4 = 0.6$, $\beta_5 = 0.6$";
        let raw = parse_llm_answer(text).unwrap();
        assert_eq!(raw.alpha, [0.1, 0.3, 0.2, 0.1, 0.3]);
        assert_eq!(raw.beta, [0.6, 0.6, 0.9, 0.6, 0.6]);
    }

    #[test]
    fn parses_json() {
        let raw = parse_llm_answer(
            r#"{"alpha":[0.2,0.2,0.2,0.2,0.2],"beta":[0.5,0.5,0.5,0.5,0.5]}"#,
        )
        .unwrap();
        assert_eq!(raw.alpha, [0.2; 5]);
        assert_eq!(raw.beta, [0.5; 5]);
        let wrapped = "Here you go: {\"note\": 1} then {\"alpha\": [0.1,0.2,0.3,0.2,0.2], \"beta\": [0.9,0.8,0.7,0.6,0.5]} done";
        assert_eq!(parse_llm_answer(wrapped).unwrap().beta[0], 0.9);
    }

    #[test]
    fn labelled_form_takes_precedence() {
        let text = "{\"alpha\":[0.2,0.2,0.2,0.2,0.2],\"beta\":[0.5,0.5,0.5,0.5,0.5]}\n\
            alpha_1=0.1 alpha_2=0.2 alpha_3=0.3 alpha_4=0.2 alpha_5=0.2 \
            beta_1=0.1 beta_2=0.1 beta_3=0.1 beta_4=0.1 beta_5=0.1";
        assert_eq!(parse_llm_answer(text).unwrap().alpha[0], 0.1);
    }

    #[test]
    fn parse_failures() {
        let text = "I cannot determine the values.";
        match parse_llm_answer(text) {
            Err(Error::AnswerParse { found: 0, raw }) => assert_eq!(raw, text),
            other => panic!("{other:?}"),
        }
        let partial = "alpha_1 = 0.2, alpha_2 = 0.2";
        assert!(matches!(
            parse_llm_answer(partial),
            Err(Error::AnswerParse { found: 2, .. })
        ));
        let conflict = "alpha_1 = 0.2 and later alpha_1 = 0.3";
        assert!(matches!(
            parse_llm_answer(conflict),
            Err(Error::AmbiguousAnswer { ref label, .. }) if label == "alpha_1"
        ));
    }

    #[test]
    fn repeated_identical_label_is_fine() {
        let mut text = String::from("alpha_1 = 0.2\n");
        for i in 1..=5 {
            text.push_str(&format!("alpha_{i} = 0.2\nbeta_{i} = 0.5\n"));
        }
        assert!(parse_llm_answer(&text).is_ok());
    }

    #[test]
    fn prose_round_trip() {
        let p = validate_params([0.15, 0.25, 0.35, 0.15, 0.10], [0.6, 0.7, 0.9, 0.6, 0.7]).unwrap();
        let raw = parse_llm_answer(&render_params_as_prose(&p)).unwrap();
        assert_eq!(&raw.alpha, p.alpha());
        assert_eq!(&raw.beta, p.beta());
    }

    #[test]
    fn golden_fixture_is_valid() {
        let fx = ExampleFixture::golden();
        assert_eq!(fx.k, EXAMPLE_K);
        assert!(fx.solution.len() <= 32);
        assert!(fx.solution.iter().all(|&v| v < 100));
        validate_fixture(fx).unwrap();
        assert_eq!(fx.metrics.len(), 100);
    }
}
