//! Alpha/beta parameter sets and the per-node guidance probabilities they
//! induce over a metrics table.
//!
//! For a node with normalized metrics `m`, the probability is
//! `sigmoid(sum_i alpha_i * (1 - (beta_i - m_i)))`. With valid parameters
//! every term lies in `(0, 2 * alpha_i)`, so probabilities fall strictly
//! inside `(0.5, sigmoid(2))`.

use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, GraphFingerprint};
use crate::metrics::{Metric, MetricRow, MetricsTable, METRIC_COUNT};

/// Accepted distance of the alpha sum from 1 before renormalization.
pub const ALPHA_SUM_TOLERANCE: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GuidanceParams {
    alpha: [f64; METRIC_COUNT],
    beta: [f64; METRIC_COUNT],
}

impl GuidanceParams {
    pub fn alpha(&self) -> &[f64; METRIC_COUNT] {
        &self.alpha
    }

    pub fn beta(&self) -> &[f64; METRIC_COUNT] {
        &self.beta
    }
}

/// Checks ranges and renormalizes alphas to sum to exactly 1.
pub fn validate_params(
    raw_alpha: [f64; METRIC_COUNT],
    raw_beta: [f64; METRIC_COUNT],
) -> Result<GuidanceParams> {
    let labelled = raw_alpha
        .iter()
        .enumerate()
        .map(|(i, &v)| (format!("alpha_{}", i + 1), v))
        .chain(
            raw_beta
                .iter()
                .enumerate()
                .map(|(i, &v)| (format!("beta_{}", i + 1), v)),
        );
    for (name, value) in labelled {
        if !(value > 0.0 && value < 1.0) {
            return Err(Error::ParamRange { name, value });
        }
    }
    let sum: f64 = raw_alpha.iter().sum();
    // 1e-12 absorbs binary rounding of sums like 5 * 0.21
    if (sum - 1.0).abs() > ALPHA_SUM_TOLERANCE + 1e-12 {
        return Err(Error::AlphaSum { sum });
    }
    Ok(GuidanceParams {
        alpha: raw_alpha.map(|a| a / sum),
        beta: raw_beta,
    })
}

#[inline]
pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

pub fn node_probability(metric_row: &MetricRow, params: &GuidanceParams) -> f64 {
    let inner: f64 = (0..METRIC_COUNT)
        .map(|i| params.alpha[i] * (1.0 - (params.beta[i] - metric_row[i])))
        .sum();
    sigmoid(inner)
}

/// Betas uniform in (0, 1); alphas uniform then normalized to sum 1.
pub fn random_params<R: Rng + ?Sized>(rng: &mut R) -> GuidanceParams {
    let mut open_unit = || loop {
        let x: f64 = rng.random();
        if x > 0.0 {
            return x;
        }
    };
    let raw_alpha: [f64; METRIC_COUNT] = std::array::from_fn(|_| open_unit());
    let beta: [f64; METRIC_COUNT] = std::array::from_fn(|_| open_unit());
    let sum: f64 = raw_alpha.iter().sum();
    GuidanceParams {
        alpha: raw_alpha.map(|a| a / sum),
        beta,
    }
}

/// Per-node multipliers for the decoder, tied to the graph they describe.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityVector {
    values: Vec<f64>,
    fingerprint: Option<GraphFingerprint>,
}

impl ProbabilityVector {
    /// Vector with no graph checksum; only its length is checked against a
    /// graph.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some((row, &value)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(Error::Numeric {
                row,
                column: 0,
                value,
            });
        }
        Ok(Self {
            values,
            fingerprint: None,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn fingerprint(&self) -> Option<GraphFingerprint> {
        self.fingerprint
    }

    /// Fails if this vector was computed for a different graph.
    pub fn check_graph(&self, graph: &DirectedGraph) -> Result<()> {
        if self.values.len() != graph.node_count() {
            return Err(Error::Shape {
                expected: graph.node_count(),
                found: self.values.len(),
            });
        }
        match self.fingerprint {
            Some(fp) if fp != graph.fingerprint() => Err(Error::Fingerprint(format!(
                "probabilities were computed for graph {:016x}, not {:016x}",
                fp.checksum,
                graph.fingerprint().checksum
            ))),
            _ => Ok(()),
        }
    }

    /// Reads `node_id,probability` rows (header optional).
    pub fn from_csv(text: &str, node_count: usize) -> Result<Self> {
        let mut values = vec![None; node_count];
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        for (idx, record) in reader.records().enumerate() {
            let record = record?;
            let line = idx + 1;
            if record.len() < 2 {
                return Err(Error::Parse {
                    line,
                    message: "expected node_id,probability".into(),
                });
            }
            let Ok(node) = record[0].parse::<usize>() else {
                if idx == 0 {
                    continue;
                }
                return Err(Error::Parse {
                    line,
                    message: format!("invalid node id {:?}", &record[0]),
                });
            };
            let value: f64 = record[1].parse().map_err(|_| Error::Parse {
                line,
                message: format!("invalid probability {:?}", &record[1]),
            })?;
            let slot = values.get_mut(node).ok_or(Error::NodeOutOfBounds {
                node,
                node_count,
            })?;
            *slot = Some(value);
        }
        let found = values.iter().filter(|v| v.is_some()).count();
        if found != node_count {
            return Err(Error::Shape {
                expected: node_count,
                found,
            });
        }
        Self::new(values.into_iter().map(Option::unwrap).collect())
    }
}

pub fn probabilities_for_graph(
    metrics: &MetricsTable,
    params: &GuidanceParams,
) -> ProbabilityVector {
    ProbabilityVector {
        values: metrics
            .rows()
            .iter()
            .map(|row| node_probability(row, params))
            .collect(),
        fingerprint: metrics.graph_fingerprint(),
    }
}

/// Same as [`probabilities_for_graph`], but first checks that `metrics`
/// belongs to `graph`.
pub fn probabilities_checked(
    graph: &DirectedGraph,
    metrics: &MetricsTable,
    params: &GuidanceParams,
) -> Result<ProbabilityVector> {
    if metrics.len() != graph.node_count() {
        return Err(Error::Shape {
            expected: graph.node_count(),
            found: metrics.len(),
        });
    }
    let probs = probabilities_for_graph(metrics, params);
    probs.check_graph(graph)?;
    Ok(probs)
}

/// All ones: the decoder falls back to plain out-degree times key.
pub fn uniform_guidance(n: usize) -> ProbabilityVector {
    ProbabilityVector {
        values: vec![1.0; n],
        fingerprint: None,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParamsSource {
    Llm,
    Tuner,
    Random,
    File,
}

/// On-disk form shared by the `ask`, `tune` and `solve` commands.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamsFile {
    pub alpha: [f64; METRIC_COUNT],
    pub beta: [f64; METRIC_COUNT],
    pub source: ParamsSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
}

impl ParamsFile {
    pub fn new(params: &GuidanceParams, source: ParamsSource, model: Option<String>) -> Self {
        Self {
            alpha: params.alpha,
            beta: params.beta,
            source,
            model,
        }
    }

    pub fn params(&self) -> Result<GuidanceParams> {
        validate_params(self.alpha, self.beta)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }
}

/// Metric names in parameter order, for labelling output.
pub fn parameter_names() -> [&'static str; METRIC_COUNT] {
    Metric::ALL.map(Metric::name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const HALF: [f64; 5] = [0.5; 5];
    const FIFTH: [f64; 5] = [0.2; 5];

    #[test]
    fn beta_equal_to_metrics_gives_sigmoid_one() {
        let beta = [0.3, 0.6, 0.9, 0.1, 0.45];
        let p = validate_params([0.1, 0.3, 0.2, 0.1, 0.3], beta).unwrap();
        assert!((node_probability(&beta, &p) - 0.731_058_578_630_004_9).abs() < 1e-12);
    }

    #[test]
    fn lower_boundary_limit() {
        let p = validate_params(FIFTH, [1.0 - 1e-9; 5]).unwrap();
        let prob = node_probability(&[0.0; 5], &p);
        assert!(prob > 0.5 && prob - 0.5 < 1e-8, "{prob}");
    }

    #[test]
    fn hamsterster_answer_on_all_ones() {
        let p = validate_params(
            [0.10, 0.30, 0.20, 0.10, 0.30],
            [0.60, 0.60, 0.90, 0.60, 0.60],
        )
        .unwrap();
        // inner sum 1.34 by hand
        let expected = 1.0 / (1.0 + (-1.34f64).exp());
        let got = node_probability(&[1.0; 5], &p);
        assert!((got - expected).abs() < 1e-12);
        assert!((got - 0.79249).abs() < 5e-6);
    }

    #[test]
    fn validation_accepts_and_renormalizes() {
        let p = validate_params(FIFTH, HALF).unwrap();
        assert_eq!(p.alpha(), &FIFTH);
        let p = validate_params([0.21; 5], HALF).unwrap();
        assert!((p.alpha().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(p.alpha().iter().all(|&a| (a - 0.2).abs() < 1e-12));
    }

    #[test]
    fn validation_rejects() {
        let err = validate_params([1.2, 0.2, 0.2, 0.2, 0.2], HALF).unwrap_err();
        assert!(matches!(err, Error::ParamRange { ref name, .. } if name == "alpha_1"));
        let err = validate_params(FIFTH, [0.5, 0.5, 0.5, 0.0, 0.5]).unwrap_err();
        assert!(matches!(err, Error::ParamRange { ref name, .. } if name == "beta_4"));
        let err = validate_params([0.25; 5], HALF).unwrap_err();
        assert!(matches!(err, Error::AlphaSum { sum } if (sum - 1.25).abs() < 1e-12));
        assert!(validate_params([f64::NAN, 0.2, 0.2, 0.2, 0.2], HALF).is_err());
    }

    #[test]
    fn random_params_deterministic_and_valid() {
        let a = random_params(&mut ChaCha8Rng::seed_from_u64(4));
        let b = random_params(&mut ChaCha8Rng::seed_from_u64(4));
        assert_eq!(a, b);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let p = random_params(&mut rng);
            validate_params(*p.alpha(), *p.beta()).unwrap();
        }
    }

    #[test]
    fn random_alpha_means_are_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut sums = [0.0; 5];
        for _ in 0..10_000 {
            let p = random_params(&mut rng);
            for (s, a) in sums.iter_mut().zip(p.alpha()) {
                *s += a;
            }
        }
        for s in sums {
            assert!((s / 10_000.0 - 0.2).abs() < 0.01, "{s}");
        }
    }

    #[test]
    fn uniform_is_all_ones() {
        assert_eq!(uniform_guidance(3).values(), &[1.0, 1.0, 1.0]);
    }

    #[test]
    fn identical_rows_identical_probabilities() {
        let raw = [[1.0, 2.0, 3.0, 4.0, 5.0]; 3];
        let table = crate::metrics::normalize_metrics(&raw).unwrap();
        let p = validate_params(FIFTH, HALF).unwrap();
        let v = probabilities_for_graph(&table, &p);
        assert!(v.values().windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn stale_fingerprint_is_rejected() {
        use crate::graph::generate_erdos_renyi;
        use crate::metrics::{compute_metrics, MetricsConfig};
        let g1 = generate_erdos_renyi(20, 0.2, 1).unwrap();
        let g2 = generate_erdos_renyi(20, 0.2, 2).unwrap();
        let m1 = compute_metrics(&g1, &MetricsConfig::default()).unwrap();
        let p = validate_params(FIFTH, HALF).unwrap();
        assert!(probabilities_checked(&g1, &m1, &p).is_ok());
        assert!(matches!(
            probabilities_checked(&g2, &m1, &p),
            Err(Error::Fingerprint(_))
        ));
        let g3 = generate_erdos_renyi(21, 0.2, 1).unwrap();
        assert!(matches!(
            probabilities_checked(&g3, &m1, &p),
            Err(Error::Shape { .. })
        ));
    }

    #[test]
    fn probability_csv() {
        let v = ProbabilityVector::from_csv("node_id,p\n1,0.5\n0,0.25\n", 2).unwrap();
        assert_eq!(v.values(), &[0.25, 0.5]);
        assert!(ProbabilityVector::from_csv("0,0.5\n", 2).is_err());
        assert!(ProbabilityVector::from_csv("0,0.5\n5,0.1\n", 2).is_err());
        assert!(ProbabilityVector::from_csv("0,-1\n1,0.1\n", 2).is_err());
    }

    #[test]
    fn params_file_json_shape() {
        let p = validate_params(FIFTH, HALF).unwrap();
        let file = ParamsFile::new(&p, ParamsSource::Llm, Some("gpt-4o".into()));
        let json = serde_json::to_value(&file).unwrap();
        assert_eq!(json["source"], "llm");
        assert_eq!(json["model"], "gpt-4o");
        assert_eq!(json["alpha"].as_array().unwrap().len(), 5);
        let back: ParamsFile = serde_json::from_value(json).unwrap();
        assert_eq!(back.params().unwrap(), p);
        let bare: ParamsFile = serde_json::from_str(
            r#"{"alpha":[0.2,0.2,0.2,0.2,0.2],"beta":[0.5,0.5,0.5,0.5,0.5],"source":"file"}"#,
        )
        .unwrap();
        assert_eq!(bare.model, None);
    }
}
