//! Commands behind the `nffs` binary: `encode`, `mi-hist`, `select`, `evaluate`.
//!
//! Every command reads one JSON run config, writes its artifacts into an
//! output directory and returns a small summary for the caller to print.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use log::info;
use nffs::classifier::HyperParamGroup;
use nffs::data::{encode, fit_schema, load_csv, FeatureKind, FeatureSchema, LabelRule, LoadOptions, RawDataset};
use nffs::metrics::{evaluate_pipeline, IndicatorReport, Indicators};
use nffs::{mi_histogram, run_nffs, score_all, EncodedDataset, FeatureMask, MiHistogram, NffsConfig, NffsReport};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const SCHEMA_FILE: &str = "schema.json";
pub const ENCODE_SUMMARY_FILE: &str = "encode_summary.json";
pub const HISTOGRAM_JSON_FILE: &str = "mi_histogram.json";
pub const HISTOGRAM_CSV_FILE: &str = "mi_histogram.csv";
pub const MI_SCORES_FILE: &str = "mi_scores.csv";
pub const REPORT_FILE: &str = "report.json";
pub const BEST_FEATURES_FILE: &str = "best_features.txt";
pub const EVALUATION_FILE: &str = "evaluation.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum EncoderFit {
    /// Vocabularies from the training file only; unseen test categories encode as zeros.
    #[default]
    Train,
    /// Vocabularies from training and test files together.
    Union,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportOptions {
    #[serde(default = "default_final_seeds")]
    pub n_final_seeds: usize,
    #[serde(default = "default_seed_start")]
    pub seed_start: u64,
}

fn default_final_seeds() -> usize {
    30
}

fn default_seed_start() -> u64 {
    7
}

fn default_true() -> bool {
    true
}

fn default_histogram_bins() -> usize {
    20
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            n_final_seeds: default_final_seeds(),
            seed_start: default_seed_start(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub train: PathBuf,
    pub test: PathBuf,
    /// Existing schema to load instead of fitting one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<PathBuf>,
    #[serde(default = "default_true")]
    pub has_header: bool,
    pub label_column: usize,
    #[serde(default)]
    pub ignore_columns: Vec<usize>,
    #[serde(default)]
    pub kind_overrides: BTreeMap<String, FeatureKind>,
    #[serde(default)]
    pub positive_labels: Vec<String>,
    #[serde(default)]
    pub negative_labels: Vec<String>,
    #[serde(default)]
    pub fit_encoder_on: EncoderFit,
    #[serde(default = "default_histogram_bins")]
    pub histogram_bins: usize,
    pub nffs: NffsConfig,
    #[serde(default)]
    pub report: ReportOptions,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    /// Reads a config; relative paths resolve against the config file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let mut cfg: RunConfig =
            serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        resolve(&mut cfg.train);
        resolve(&mut cfg.test);
        if let Some(s) = cfg.schema.as_mut() {
            resolve(s);
        }
        if let Some(o) = cfg.out.as_mut() {
            resolve(o);
        }
        Ok(cfg)
    }

    pub fn label_rule(&self) -> Result<LabelRule> {
        match (self.positive_labels.is_empty(), self.negative_labels.is_empty()) {
            (false, true) => Ok(LabelRule::positive(self.positive_labels.iter().cloned())),
            (true, false) => Ok(LabelRule::negative(self.negative_labels.iter().cloned())),
            (false, false) => bail!("set only one of positive_labels and negative_labels"),
            (true, true) => bail!("one of positive_labels or negative_labels is required"),
        }
    }

    fn load_options(&self) -> LoadOptions {
        LoadOptions {
            has_header: self.has_header,
            label_column: self.label_column,
            ignore_columns: self.ignore_columns.clone(),
        }
    }

    pub fn out_dir(&self, flag: Option<&Path>) -> Result<PathBuf> {
        let dir = flag
            .map(Path::to_path_buf)
            .or_else(|| self.out.clone())
            .context("no output directory: pass --out or set \"out\" in the config")?;
        fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(dir)
    }
}

/// Raw and encoded train/test data under one schema.
pub struct Prepared {
    pub raw_train: RawDataset,
    pub schema: FeatureSchema,
    pub train: EncodedDataset<f64>,
    pub test: EncodedDataset<f64>,
}

pub fn prepare(cfg: &RunConfig) -> Result<Prepared> {
    let opts = cfg.load_options();
    let raw_train =
        load_csv(&cfg.train, &opts).with_context(|| format!("loading training data {}", cfg.train.display()))?;
    let raw_test = load_csv(&cfg.test, &opts).with_context(|| format!("loading test data {}", cfg.test.display()))?;
    let schema = match &cfg.schema {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading schema {}", path.display()))?;
            FeatureSchema::from_json(&text).with_context(|| format!("parsing schema {}", path.display()))?
        }
        None => {
            let mut schema = fit_schema(&raw_train, &cfg.kind_overrides, &cfg.label_rule()?)?;
            if cfg.fit_encoder_on == EncoderFit::Union {
                schema.extend_vocabulary(&raw_test)?;
            }
            schema
        }
    };
    let train = encode(&raw_train, &schema).context("encoding training data")?;
    let test = encode(&raw_test, &schema).context("encoding test data")?;
    Ok(Prepared {
        raw_train,
        schema,
        train,
        test,
    })
}

fn write_json<S: Serialize>(path: &Path, value: &S) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodeSummary {
    pub raw_features: usize,
    pub encoded_width: usize,
    pub categorical: Vec<String>,
    pub train_rows: usize,
    pub test_rows: usize,
    pub train_positive: usize,
    pub test_positive: usize,
}

pub fn cmd_encode(cfg: &RunConfig, out: &Path) -> Result<EncodeSummary> {
    let p = prepare(cfg)?;
    let summary = EncodeSummary {
        raw_features: p.raw_train.n_features(),
        encoded_width: p.schema.encoded_width(),
        categorical: p
            .schema
            .features
            .iter()
            .filter(|f| f.kind == FeatureKind::Categorical)
            .map(|f| f.name.clone())
            .collect(),
        train_rows: p.train.n_rows(),
        test_rows: p.test.n_rows(),
        train_positive: p.train.y.iter().filter(|&&v| v == 1).count(),
        test_positive: p.test.y.iter().filter(|&&v| v == 1).count(),
    };
    write_json(&out.join(SCHEMA_FILE), &p.schema)?;
    write_json(&out.join(ENCODE_SUMMARY_FILE), &summary)?;
    Ok(summary)
}

pub fn cmd_mi_hist(cfg: &RunConfig, out: &Path) -> Result<MiHistogram<f64>> {
    let p = prepare(cfg)?;
    let scores = score_all(&p.train, cfg.nffs.mi_bins)?;
    let hist = mi_histogram(&scores, cfg.histogram_bins, Some(cfg.nffs.threshold));
    write_json(&out.join(HISTOGRAM_JSON_FILE), &hist)?;
    fs::write(out.join(HISTOGRAM_CSV_FILE), hist.to_csv())?;
    let mut csv = String::from("feature,mi\n");
    for (name, v) in p.train.names.iter().zip(&scores.values) {
        csv.push_str(&format!("{name},{v}\n"));
    }
    fs::write(out.join(MI_SCORES_FILE), csv)?;
    Ok(hist)
}

#[derive(Serialize)]
struct SelectReport<'a> {
    run_config: &'a RunConfig,
    #[serde(flatten)]
    run: &'a NffsReport<f64>,
}

pub fn cmd_select(cfg: &RunConfig, out: &Path) -> Result<NffsReport<f64>> {
    let p = prepare(cfg)?;
    let run = run_nffs(&p.train, &p.test, &cfg.nffs)?;
    info!("{} classifier evaluations", run.report.evaluations);
    write_json(
        &out.join(REPORT_FILE),
        &SelectReport {
            run_config: cfg,
            run: &run.report,
        },
    )?;
    let mut names = format!(
        "# best subset: {} features, fitness {}\n",
        run.report.best.feature_names.len(),
        run.report.best.fitness
    );
    for n in &run.report.best.feature_names {
        names.push_str(n);
        names.push('\n');
    }
    fs::write(out.join(BEST_FEATURES_FILE), names)?;
    Ok(run.report)
}

/// Newline-separated names; `#` starts a comment.
pub fn parse_mask_file(text: &str) -> Vec<String> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(str::to_owned)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupEvaluation {
    pub params: HyperParamGroup,
    pub report: IndicatorReport<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub run_config: RunConfig,
    pub features: Vec<String>,
    /// Encoded columns selected.
    pub n_features: usize,
    /// Raw features touched by the selection.
    pub n_raw_features: usize,
    pub seeds: Vec<u64>,
    /// Index into `groups` of the group with the highest mean F-score.
    pub best_group: usize,
    pub report: IndicatorReport<f64>,
    pub groups: Vec<GroupEvaluation>,
}

/// Evaluates a named subset over `n_final_seeds` seeds for every parameter group;
/// the headline report is the group with the best mean F-score.
pub fn cmd_evaluate(cfg: &RunConfig, mask_file: &Path, out: &Path) -> Result<EvaluationReport> {
    if cfg.report.n_final_seeds == 0 {
        bail!("report.n_final_seeds must be at least 1");
    }
    if cfg.nffs.param_groups.is_empty() {
        bail!("at least one parameter group is required");
    }
    let text = fs::read_to_string(mask_file).with_context(|| format!("reading mask file {}", mask_file.display()))?;
    let names = parse_mask_file(&text);
    if names.is_empty() {
        bail!("mask file {} lists no features", mask_file.display());
    }
    let p = prepare(cfg)?;
    let mask = p.schema.mask_from_names(&names)?;
    if mask.count() == 0 {
        bail!("mask selects no features");
    }
    let seeds: Vec<u64> = (0..cfg.report.n_final_seeds as u64)
        .map(|i| cfg.report.seed_start + i)
        .collect();
    let pca_ratio = cfg.nffs.pca_ratio;

    let groups = cfg
        .nffs
        .param_groups
        .iter()
        .map(|g| {
            let runs = seeds
                .par_iter()
                .map(|&s| evaluate_pipeline(&mask, &p.train, &p.test, g, pca_ratio, s.wrapping_add(g.seed_offset)))
                .collect::<nffs::Result<Vec<Indicators<f64>>>>()?;
            Ok(GroupEvaluation {
                params: g.clone(),
                report: IndicatorReport::aggregate(&runs),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let best_group = groups
        .iter()
        .enumerate()
        .fold(0, |best, (i, g)| {
            if g.report.f_score.mean > groups[best].report.f_score.mean {
                i
            } else {
                best
            }
        });
    let ranges = p.schema.column_ranges();
    let n_raw_features = ranges.iter().filter(|r| (*r).clone().any(|i| mask.get(i))).count();
    let report = EvaluationReport {
        run_config: cfg.clone(),
        features: selected_names(&mask, &p.train.names),
        n_features: mask.count(),
        n_raw_features,
        seeds,
        best_group,
        report: groups[best_group].report.clone(),
        groups,
    };
    write_json(&out.join(EVALUATION_FILE), &report)?;
    Ok(report)
}

fn selected_names(mask: &FeatureMask, names: &[String]) -> Vec<String> {
    mask.selected().map(|i| names[i].clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mask_file_comments_and_blanks() {
        let names = parse_mask_file("# from table\nf2_icmp\n\n  f3  # service\n#f4\n");
        assert_eq!(names, ["f2_icmp", "f3"]);
    }

    #[test]
    fn label_rule_requires_exactly_one_list() {
        let mut cfg: RunConfig = serde_json::from_str(
            r#"{"train": "a.csv", "test": "b.csv", "label_column": 3,
                "nffs": {"L": 10, "M": 2, "N": 2, "O": 3, "threshold": 0.0}}"#,
        )
        .unwrap();
        assert!(cfg.label_rule().is_err());
        cfg.positive_labels = vec!["attack".into()];
        assert!(matches!(cfg.label_rule().unwrap(), LabelRule::Positive(_)));
        cfg.negative_labels = vec!["normal".into()];
        assert!(cfg.label_rule().is_err());
        assert_eq!(cfg.report, ReportOptions::default());
        assert_eq!(cfg.fit_encoder_on, EncoderFit::Train);
        assert!(cfg.has_header);
    }
}
