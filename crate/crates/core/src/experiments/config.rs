//! JSON experiment configs, overrides, dispatch, and output files.
//!
//! A config is a flat JSON object whose `kind` selects the experiment:
//!
//! ```json
//! { "kind": "honest-abort", "alpha": 0.25, "delta": 0.2,
//!   "target_p_noise": 0.2133, "p_noise_factor": 0.8,
//!   "trials": 1000, "seed": 7 }
//! ```
//!
//! Unknown keys are rejected. Outputs never depend on `workers` or on
//! wall-clock time.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::curve::curve_rows;
use super::runs::regime_warnings;
use super::{
    adversary_experiment, curve_svg, decile_sizes, honest_abort_experiment, lemma_validation,
    log_grid, q_from_alpha, tail_bound_validation, threshold_curve, with_workers, CurveRow,
    LemmaPoint, Row, TailGrid,
};
use crate::bounds::{
    alpha_from_q, lemma_min_rounds, min_rounds, threshold_report, ThresholdInputs, ThresholdReport,
};
use crate::error::{invalid, Error, Result};
use crate::game::AdversaryStrategy;
use crate::rng::DEFAULT_SEED;

pub const DEFAULT_TRIALS: u64 = 1000;

/// Multiplier applied to the noise threshold when `p_noise` is not given.
const DEFAULT_P_NOISE_FACTOR: f64 = 0.8;

fn default_trials() -> u64 {
    DEFAULT_TRIALS
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(flatten)]
    pub spec: ExperimentSpec,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Thread count; `None` uses the global pool. Never affects results.
    #[serde(default)]
    pub workers: Option<usize>,
    /// Run points that violate the claim's preconditions instead of failing.
    #[serde(default)]
    pub allow_out_of_regime: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ExperimentSpec {
    HonestAbort(PointSpec),
    AdversarySuccess(AdversarySpec),
    LemmaValidation(LemmaSpec),
    TailBounds(TailSpec),
    ThresholdCurve(CurveSpec),
}

impl ExperimentSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::HonestAbort(_) => "honest-abort",
            Self::AdversarySuccess(_) => "adversary-success",
            Self::LemmaValidation(_) => "lemma-validation",
            Self::TailBounds(_) => "tail-bounds",
            Self::ThresholdCurve(_) => "threshold-curve",
        }
    }
}

/// A protocol parameter point.
///
/// Exactly one of `alpha` and `q`, and exactly one of `n` and
/// `target_p_noise` (which selects the smallest sufficient `N`). The noise
/// is `p_noise` if given, else `p_noise_factor` (default 0.8) times the
/// noise threshold.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PointSpec {
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub q: Option<f64>,
    pub delta: f64,
    #[serde(default)]
    pub epsilon: f64,
    #[serde(default)]
    pub n: Option<u64>,
    #[serde(default)]
    pub target_p_noise: Option<f64>,
    #[serde(default)]
    pub p_noise: Option<f64>,
    #[serde(default)]
    pub p_noise_factor: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InstanceChoice {
    /// `p_zero = 1 - q`.
    #[default]
    Yes,
    /// `p_zero = q`.
    No,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdversarySpec {
    #[serde(flatten)]
    pub point: PointSpec,
    /// Attack sizes; defaults to the deciles of `N`.
    #[serde(default)]
    pub sizes: Option<Vec<usize>>,
    #[serde(default)]
    pub instance: InstanceChoice,
    /// Overrides the zero-outcome probability implied by `instance`.
    #[serde(default)]
    pub p_zero: Option<f64>,
}

/// One lemma grid point. `n` defaults to the least `N` with `A >= a_target`
/// (default 100) and `w` to the largest admissible value.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct LemmaPointSpec {
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub q: Option<f64>,
    pub delta: f64,
    #[serde(default)]
    pub epsilon: f64,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub a_target: Option<f64>,
    #[serde(default)]
    pub w: Option<f64>,
}

fn default_exact_n() -> Vec<usize> {
    vec![12, 18, 24]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaSpec {
    pub points: Vec<LemmaPointSpec>,
    /// Defaults to uniform subsets at the deciles of each `N`.
    #[serde(default)]
    pub strategies: Option<Vec<AdversaryStrategy>>,
    /// Sizes for the informational exact-enumeration rows.
    #[serde(default = "default_exact_n")]
    pub exact_n: Vec<usize>,
}

pub type TailSpec = TailGrid;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSpec {
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub q: Option<f64>,
    pub delta: f64,
    #[serde(default)]
    pub epsilon: f64,
    /// Defaults to four points per decade over `[1e5, 1e8]`.
    #[serde(default)]
    pub n_values: Option<Vec<u64>>,
}

fn resolve_alpha(alpha: Option<f64>, q: Option<f64>) -> Result<(f64, f64)> {
    match (alpha, q) {
        (Some(a), None) => Ok((a, q_from_alpha(a)?)),
        (None, Some(q)) => Ok((alpha_from_q(q)?, q)),
        _ => Err(Error::Config("give exactly one of `alpha` and `q`".into())),
    }
}

struct ResolvedPoint {
    report: ThresholdReport,
    q: f64,
    p_noise: f64,
}

impl PointSpec {
    fn resolve(&self) -> Result<ResolvedPoint> {
        let (alpha, q) = resolve_alpha(self.alpha, self.q)?;
        let n = match (self.n, self.target_p_noise) {
            (Some(n), None) => n,
            (None, Some(t)) => min_rounds(alpha, self.delta, self.epsilon, t)?,
            _ => {
                return Err(Error::Config(
                    "give exactly one of `n` and `target_p_noise`".into(),
                ))
            }
        };
        let report = threshold_report(ThresholdInputs::new(n, alpha, self.delta, self.epsilon)?)?;
        let p_noise = match (self.p_noise, self.p_noise_factor) {
            (Some(p), None) => p,
            (None, factor) => {
                let factor = factor.unwrap_or(DEFAULT_P_NOISE_FACTOR);
                if !(factor >= 0.0) {
                    return Err(invalid("p_noise_factor", "must be nonnegative"));
                }
                (factor * report.noise_threshold).max(0.0)
            }
            (Some(_), Some(_)) => {
                return Err(Error::Config(
                    "give at most one of `p_noise` and `p_noise_factor`".into(),
                ))
            }
        };
        Ok(ResolvedPoint { report, q, p_noise })
    }
}

fn guard(warnings: &[String], allow: bool) -> Result<()> {
    if warnings.is_empty() || allow {
        return Ok(());
    }
    Err(Error::Precondition(format!(
        "out of regime ({}); pass allow_out_of_regime to run anyway",
        warnings.join("; ")
    )))
}

/// Everything an experiment produced, in output order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub kind: String,
    pub version: String,
    pub seed: u64,
    /// The config as run, with `workers` cleared.
    pub config: ExperimentConfig,
    /// Fully resolved parameters and per-point results.
    pub resolved: Value,
    pub rows: Vec<Row>,
    pub warnings: Vec<String>,
    pub passed: bool,
    pub curve: Option<Vec<CurveRow>>,
}

/// Validates and runs `config` on its requested worker count.
pub fn run_config(config: &ExperimentConfig) -> Result<ExperimentReport> {
    if config.trials == 0 {
        return Err(invalid("trials", "must be at least 1"));
    }
    with_workers(config.workers, || run_on_current_pool(config))?
}

fn run_on_current_pool(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let (trials, seed, allow) = (config.trials, config.seed, config.allow_out_of_regime);
    let mut curve = None;
    let (resolved, rows, warnings) = match &config.spec {
        ExperimentSpec::HonestAbort(spec) => {
            let p = spec.resolve()?;
            guard(&regime_warnings(&p.report, p.p_noise), allow)?;
            let r = honest_abort_experiment(p.report.inputs, p.q, p.p_noise, trials, seed)?;
            (serde_json::to_value(&r)?, vec![r.row()], r.warnings)
        }
        ExperimentSpec::AdversarySuccess(spec) => {
            let p = spec.point.resolve()?;
            guard(&regime_warnings(&p.report, p.p_noise), allow)?;
            let p_zero = spec.p_zero.unwrap_or(match spec.instance {
                InstanceChoice::Yes => 1.0 - p.q,
                InstanceChoice::No => p.q,
            });
            let sizes = match &spec.sizes {
                Some(s) => s.clone(),
                None => decile_sizes(p.report.inputs.n as usize),
            };
            let r = adversary_experiment(
                p.report.inputs,
                p.q,
                p.p_noise,
                p_zero,
                &sizes,
                trials,
                seed,
            )?;
            (serde_json::to_value(&r)?, r.rows(), r.warnings)
        }
        ExperimentSpec::LemmaValidation(spec) => {
            if spec.points.is_empty() {
                return Err(Error::Config("`points` must not be empty".into()));
            }
            let points = spec
                .points
                .iter()
                .map(|p| {
                    let (alpha, _) = resolve_alpha(p.alpha, p.q)?;
                    let n = match p.n {
                        Some(n) => n,
                        None => {
                            let a = p.a_target.unwrap_or(crate::bounds::MIN_A);
                            lemma_min_rounds(alpha, p.delta, p.epsilon, a)? as usize
                        }
                    };
                    LemmaPoint::new(n, alpha, p.delta, p.epsilon, p.w)
                })
                .collect::<Result<Vec<_>>>()?;
            let warnings = points
                .iter()
                .filter(|p| !p.in_regime())
                .map(|p| {
                    format!(
                        "N = {}, w = {} violates the lemma preconditions",
                        p.params.n, p.params.w
                    )
                })
                .collect();
            let r = lemma_validation(
                &points,
                spec.strategies.as_deref(),
                &spec.exact_n,
                trials,
                seed,
                allow,
            )?;
            (
                serde_json::to_value(&r)?,
                r.rows.iter().map(|row| row.row()).collect(),
                warnings,
            )
        }
        ExperimentSpec::TailBounds(grid) => {
            let r = tail_bound_validation(grid)?;
            (
                serde_json::to_value(&r)?,
                r.families.iter().map(|f| f.row()).collect(),
                Vec::new(),
            )
        }
        ExperimentSpec::ThresholdCurve(spec) => {
            let (alpha, _) = resolve_alpha(spec.alpha, spec.q)?;
            let ns = match &spec.n_values {
                Some(ns) => ns.clone(),
                None => log_grid(100_000, 100_000_000, 4)?,
            };
            let table = threshold_curve(alpha, spec.delta, spec.epsilon, &ns)?;
            let rows = curve_rows(&table, alpha, spec.delta, spec.epsilon);
            let warnings = table
                .iter()
                .filter(|r| !r.feasible)
                .map(|r| format!("N = {} is outside the feasible regime", r.n))
                .collect();
            let value = serde_json::to_value(&table)?;
            curve = Some(table);
            (value, rows, warnings)
        }
    };
    let passed = rows.iter().all(|r| r.pass != Some(false));
    Ok(ExperimentReport {
        kind: config.spec.kind().into(),
        version: env!("CARGO_PKG_VERSION").into(),
        seed,
        config: ExperimentConfig {
            workers: None,
            ..config.clone()
        },
        resolved,
        rows,
        warnings,
        passed,
        curve,
    })
}

/// Applies `path=value` to a JSON object; `path` may be dotted (`points.0.epsilon`)
/// and `value` is parsed as JSON, falling back to a plain string.
pub fn apply_override(config: &mut Value, assignment: &str) -> Result<()> {
    let (path, raw) = assignment.split_once('=').ok_or_else(|| {
        Error::Config(format!(
            "override `{assignment}` is not of the form key=value"
        ))
    })?;
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut slot = config;
    for part in path.split('.') {
        slot = match slot {
            Value::Object(map) => map.entry(part.to_string()).or_insert(Value::Null),
            Value::Array(items) => {
                let i: usize = part.parse().map_err(|_| {
                    Error::Config(format!("`{part}` in `{path}` is not an array index"))
                })?;
                let len = items.len();
                items.get_mut(i).ok_or_else(|| {
                    Error::Config(format!("index {i} in `{path}` is past the end ({len})"))
                })?
            }
            _ => return Err(Error::Config(format!("`{path}` does not name a field"))),
        };
    }
    *slot = value;
    Ok(())
}

// Every key in `given` must survive a parse/serialize round trip.
fn find_unknown_key(given: &Value, parsed: &Value, prefix: &str) -> Option<String> {
    match (given, parsed) {
        (Value::Object(g), Value::Object(p)) => g.iter().find_map(|(k, v)| {
            let path = if prefix.is_empty() {
                k.clone()
            } else {
                format!("{prefix}.{k}")
            };
            match p.get(k) {
                None => Some(path),
                Some(pv) => find_unknown_key(v, pv, &path),
            }
        }),
        (Value::Array(g), Value::Array(p)) if g.len() == p.len() => g
            .iter()
            .zip(p)
            .enumerate()
            .find_map(|(i, (gv, pv))| find_unknown_key(gv, pv, &format!("{prefix}.{i}"))),
        _ => None,
    }
}

/// Parses a config from JSON text, applying `overrides` first.
pub fn parse_config(text: &str, overrides: &[String]) -> Result<ExperimentConfig> {
    let mut value: Value = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    if !value.is_object() {
        return Err(Error::Config("top level must be a JSON object".into()));
    }
    for o in overrides {
        apply_override(&mut value, o)?;
    }
    let config: ExperimentConfig =
        serde_json::from_value(value.clone()).map_err(|e| Error::Config(e.to_string()))?;
    if let Some(key) = find_unknown_key(&value, &serde_json::to_value(&config)?, "") {
        return Err(Error::Config(format!("unknown key `{key}`")));
    }
    Ok(config)
}

pub fn load_config(path: &Path, overrides: &[String]) -> Result<ExperimentConfig> {
    parse_config(&fs::read_to_string(path)?, overrides)
}

/// Writes `<kind>.csv`, `<kind>.json`, and for the threshold curve also
/// `<kind>.svg` into `dir`, returning the paths written.
pub fn write_outputs(report: &ExperimentReport, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let csv_path = dir.join(format!("{}.csv", report.kind));
    let mut writer = csv::Writer::from_path(&csv_path)?;
    for row in &report.rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    let json_path = dir.join(format!("{}.json", report.kind));
    let mut json = serde_json::to_string_pretty(report)?;
    json.push('\n');
    fs::write(&json_path, json)?;
    let mut paths = vec![csv_path, json_path];
    if let (Some(curve), Some(alpha)) = (&report.curve, report.rows.first().and_then(|r| r.alpha)) {
        let svg_path = dir.join(format!("{}.svg", report.kind));
        fs::write(&svg_path, curve_svg(curve, alpha))?;
        paths.push(svg_path);
    }
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<ExperimentConfig> {
        parse_config(text, &[])
    }

    #[test]
    fn minimal_configs_parse() {
        let c = parse(r#"{"kind":"tail-bounds"}"#).unwrap();
        assert_eq!(c.spec, ExperimentSpec::TailBounds(TailGrid::default()));
        assert_eq!(
            (c.trials, c.seed, c.workers),
            (DEFAULT_TRIALS, DEFAULT_SEED, None)
        );
        let c = parse(
            r#"{"kind":"adversary-success","q":0.3,"delta":0.2,"n":5000,"instance":"no","seed":3}"#,
        )
        .unwrap();
        match c.spec {
            ExperimentSpec::AdversarySuccess(s) => {
                assert_eq!(
                    (s.point.q, s.point.n, s.instance),
                    (Some(0.3), Some(5000), InstanceChoice::No)
                );
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(c.seed, 3);
    }

    #[test]
    fn schema_errors() {
        for bad in [
            r#"{"kind":"nope"}"#,
            r#"{"kind":"tail-bounds","bogus":1}"#,
            r#"{"kind":"honest-abort","alpha":0.25}"#,
            r#"{"kind":"adversary-success","alpha":0.25,"delta":0.2,"n":10,"sizez":[1]}"#,
            r#"{"kind":"lemma-validation","points":[{"alpha":0.25,"delta":0.2,"eps":0.5}]}"#,
            r#"[1,2]"#,
            "not json",
        ] {
            assert!(matches!(parse(bad), Err(Error::Config(_))), "{bad}");
        }
    }

    #[test]
    fn overrides() {
        let base = r#"{"kind":"lemma-validation","points":[{"alpha":0.25,"delta":0.2}]}"#;
        let c = parse_config(
            base,
            &[
                "points.0.epsilon=0.5".into(),
                "trials=7".into(),
                "seed=99".into(),
            ],
        )
        .unwrap();
        assert_eq!((c.trials, c.seed), (7, 99));
        match c.spec {
            ExperimentSpec::LemmaValidation(s) => assert_eq!(s.points[0].epsilon, 0.5),
            other => panic!("{other:?}"),
        }
        assert!(parse_config(base, &["points.3.epsilon=0.5".into()]).is_err());
        assert!(parse_config(base, &["no-equals".into()]).is_err());
        let mut v = serde_json::json!({"a": 1});
        apply_override(&mut v, "b=hello").unwrap();
        assert_eq!(v["b"], "hello");
    }

    #[test]
    fn point_resolution() {
        let spec = PointSpec {
            alpha: Some(0.25),
            delta: 0.2,
            target_p_noise: Some(0.2133),
            ..PointSpec::default()
        };
        let p = spec.resolve().unwrap();
        assert_eq!(
            p.report.inputs.n,
            min_rounds(0.25, 0.2, 0.0, 0.2133).unwrap()
        );
        assert!((p.q - 1.0 / 3.0).abs() < 1e-15);
        assert!((p.p_noise - 0.8 * p.report.noise_threshold).abs() < 1e-15);
        let both = PointSpec {
            q: Some(0.3),
            ..spec.clone()
        };
        assert!(both.resolve().is_err());
        let neither = PointSpec {
            target_p_noise: None,
            ..spec
        };
        assert!(neither.resolve().is_err());
    }

    #[test]
    fn out_of_regime_guard() {
        let c = parse(r#"{"kind":"honest-abort","alpha":0.25,"delta":0.2,"n":5000,"trials":5}"#)
            .unwrap();
        assert!(matches!(run_config(&c), Err(Error::Precondition(_))));
        let allowed = ExperimentConfig {
            allow_out_of_regime: true,
            ..c
        };
        let r = run_config(&allowed).unwrap();
        assert!(!r.warnings.is_empty());
    }

    #[test]
    fn outputs_are_deterministic_across_workers() {
        let text = r#"{"kind":"adversary-success","alpha":0.25,"delta":0.2,"n":3000,"p_noise":0.02,
                       "sizes":[0,300,3000],"trials":40,"seed":5,"allow_out_of_regime":true}"#;
        let dir = tempfile::tempdir().unwrap();
        let mut outputs = Vec::new();
        for workers in [1, 3] {
            let c = parse_config(text, &[format!("workers={workers}")]).unwrap();
            let out = dir.path().join(workers.to_string());
            let paths = write_outputs(&run_config(&c).unwrap(), &out).unwrap();
            outputs.push(
                paths
                    .iter()
                    .map(|p| fs::read(p).unwrap())
                    .collect::<Vec<_>>(),
            );
        }
        assert_eq!(outputs[0], outputs[1]);
    }

    #[test]
    fn curve_outputs() {
        let c = parse(r#"{"kind":"threshold-curve","q":0.3333333333333333,"delta":0.05}"#).unwrap();
        let r = run_config(&c).unwrap();
        assert!(r.passed);
        assert_eq!(r.rows.len(), 13);
        let dir = tempfile::tempdir().unwrap();
        let paths = write_outputs(&r, dir.path()).unwrap();
        assert_eq!(paths.len(), 3);
        let csv = fs::read_to_string(&paths[0]).unwrap();
        assert!(csv.starts_with(
            "experiment,n_rounds,alpha,delta,epsilon,w,p_noise,strategy,trials,successes,estimate,ci_low,ci_high,pass\n"
        ));
    }
}
