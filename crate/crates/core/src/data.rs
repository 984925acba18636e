//! Raw CSV loading, feature-kind schema, one-hot encoding and label binarization.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fs::File;
use std::path::Path;

use ndarray::{Array2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mask::FeatureMask;
use crate::scalar::Scalar;

/// Separator between a categorical base name and its category in encoded column names.
pub const ONE_HOT_SEPARATOR: char = '_';

/// String-valued records as read from disk, with the label split off.
#[derive(Debug, Clone, PartialEq)]
pub struct RawDataset {
    feature_names: Vec<String>,
    rows: Vec<Vec<String>>,
    labels: Vec<String>,
}

impl RawDataset {
    pub fn new(feature_names: Vec<String>, rows: Vec<Vec<String>>, labels: Vec<String>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if rows.len() != labels.len() {
            return Err(Error::LengthMismatch {
                expected: rows.len(),
                found: labels.len(),
            });
        }
        let mut seen = HashSet::new();
        for name in &feature_names {
            if !seen.insert(name.as_str()) {
                return Err(Error::DuplicateFeature(name.clone()));
            }
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != feature_names.len() {
                return Err(Error::RaggedRow {
                    row: i + 1,
                    expected: feature_names.len() + 1,
                    found: row.len() + 1,
                });
            }
        }
        Ok(Self {
            feature_names,
            rows,
            labels,
        })
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn rows(&self) -> &[Vec<String>] {
        &self.rows
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    /// Writes a headered CSV with the label as the last column.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut writer = csv::Writer::from_writer(file);
        writer.write_record(self.feature_names.iter().map(String::as_str).chain(["label"]))?;
        for (row, label) in self.rows.iter().zip(&self.labels) {
            writer.write_record(row.iter().map(String::as_str).chain([label.as_str()]))?;
        }
        writer.flush().map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Ok(())
    }

    fn column(&self, j: usize) -> impl Iterator<Item = &str> + '_ {
        self.rows.iter().map(move |r| r[j].as_str())
    }
}

#[derive(Debug, Clone, Default)]
pub struct LoadOptions {
    pub has_header: bool,
    /// Zero-based index of the label column in the file.
    pub label_column: usize,
    /// File columns dropped on load (e.g. the NSL-KDD difficulty score).
    pub ignore_columns: Vec<usize>,
}

/// Reads an RFC-4180 CSV file. Cells stay strings; typing happens in [`fit_schema`].
///
/// Without a header, features are named `f1, f2, ...` by their 1-based file column.
pub fn load_csv(path: impl AsRef<Path>, opts: &LoadOptions) -> Result<RawDataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);

    let mut records = reader.records();
    let mut header: Option<Vec<String>> = None;
    if opts.has_header {
        match records.next() {
            Some(rec) => header = Some(rec?.iter().map(str::to_owned).collect()),
            None => return Err(Error::EmptyDataset),
        }
    }

    let mut width = header.as_ref().map(Vec::len);
    let mut feature_rows = Vec::new();
    let mut labels = Vec::new();
    let mut names: Option<Vec<String>> = None;
    let mut keep: Vec<usize> = Vec::new();

    for (i, rec) in records.enumerate() {
        let row_no = i + 1;
        let rec = rec?;
        let expected = *width.get_or_insert(rec.len());
        if rec.len() != expected {
            return Err(Error::RaggedRow {
                row: row_no,
                expected,
                found: rec.len(),
            });
        }
        if names.is_none() {
            if opts.label_column >= expected {
                return Err(Error::LabelColumnOutOfRange {
                    index: opts.label_column,
                    width: expected,
                });
            }
            keep = (0..expected)
                .filter(|c| *c != opts.label_column && !opts.ignore_columns.contains(c))
                .collect();
            names = Some(
                keep.iter()
                    .map(|&c| match &header {
                        Some(h) => h[c].clone(),
                        None => format!("f{}", c + 1),
                    })
                    .collect(),
            );
        }
        let column_name = |c: usize| match &header {
            Some(h) => h[c].clone(),
            None => format!("f{}", c + 1),
        };
        for &c in keep.iter().chain(std::iter::once(&opts.label_column)) {
            if rec[c].is_empty() {
                return Err(Error::MissingValue {
                    row: row_no,
                    column: column_name(c),
                });
            }
        }
        feature_rows.push(keep.iter().map(|&c| rec[c].to_owned()).collect());
        labels.push(rec[opts.label_column].to_owned());
    }

    match names {
        Some(names) => RawDataset::new(names, feature_rows, labels),
        None => Err(Error::EmptyDataset),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureKind {
    Numeric,
    Binary,
    Categorical,
}

impl std::fmt::Display for FeatureKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            FeatureKind::Numeric => "numeric",
            FeatureKind::Binary => "binary",
            FeatureKind::Categorical => "categorical",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSpec {
    pub name: String,
    pub kind: FeatureKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub categories: Option<Vec<String>>,
}

impl FeatureSpec {
    pub fn encoded_width(&self) -> usize {
        self.categories.as_ref().map_or(1, Vec::len)
    }

    pub fn encoded_names(&self) -> Vec<String> {
        match &self.categories {
            Some(cats) => cats
                .iter()
                .map(|c| format!("{}{}{}", self.name, ONE_HOT_SEPARATOR, c))
                .collect(),
            None => vec![self.name.clone()],
        }
    }
}

/// How raw label strings map to the binary target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelRule {
    /// Listed labels are 1 (attack), everything else 0.
    Positive(BTreeSet<String>),
    /// Listed labels are 0 (normal), everything else 1.
    Negative(BTreeSet<String>),
}

impl LabelRule {
    pub fn positive<I, S>(labels: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        LabelRule::Positive(labels.into_iter().map(Into::into).collect())
    }

    pub fn negative<I, S>(labels: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        LabelRule::Negative(labels.into_iter().map(Into::into).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSchema {
    pub features: Vec<FeatureSpec>,
    /// Training labels mapped to the positive class.
    pub positive_labels: BTreeSet<String>,
    /// Present when the schema was fit with a negative label list; unseen labels then map to 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub negative_labels: Option<BTreeSet<String>>,
}

fn parse_number(cell: &str) -> Option<f64> {
    cell.parse::<f64>().ok().filter(|v| v.is_finite())
}

fn infer_kind<'a>(mut cells: impl Iterator<Item = &'a str>) -> FeatureKind {
    let mut binary = true;
    for cell in cells.by_ref() {
        match parse_number(cell) {
            Some(v) => binary &= v == 0.0 || v == 1.0,
            None => return FeatureKind::Categorical,
        }
    }
    if binary {
        FeatureKind::Binary
    } else {
        FeatureKind::Numeric
    }
}

fn vocabulary<'a>(cells: impl Iterator<Item = &'a str>) -> Vec<String> {
    let set: BTreeSet<&str> = cells.collect();
    set.into_iter().map(str::to_owned).collect()
}

/// Infers feature kinds and learns categorical vocabularies from training data.
pub fn fit_schema(
    train: &RawDataset,
    kind_overrides: &BTreeMap<String, FeatureKind>,
    labels: &LabelRule,
) -> Result<FeatureSchema> {
    let unknown: Vec<String> = kind_overrides
        .keys()
        .filter(|k| !train.feature_names.contains(k))
        .cloned()
        .collect();
    if !unknown.is_empty() {
        return Err(Error::UnknownFeatures(unknown));
    }

    let mut features = Vec::with_capacity(train.n_features());
    for (j, name) in train.feature_names.iter().enumerate() {
        let kind = match kind_overrides.get(name) {
            Some(&k) => {
                check_override(train, j, name, k)?;
                k
            }
            None => infer_kind(train.column(j)),
        };
        let categories = (kind == FeatureKind::Categorical).then(|| vocabulary(train.column(j)));
        features.push(FeatureSpec {
            name: name.clone(),
            kind,
            categories,
        });
    }

    let observed: BTreeSet<&str> = train.labels.iter().map(String::as_str).collect();
    let (positive_labels, negative_labels) = match labels {
        // the configured set is kept whole, including labels only seen at test time
        LabelRule::Positive(pos) => {
            if !pos.iter().any(|l| observed.contains(l.as_str())) {
                return Err(Error::NoPositiveLabel);
            }
            (pos.clone(), None)
        }
        LabelRule::Negative(neg) => {
            let pos: BTreeSet<String> = observed
                .iter()
                .filter(|l| !neg.contains(**l))
                .map(|l| (*l).to_owned())
                .collect();
            if pos.is_empty() {
                return Err(Error::NoPositiveLabel);
            }
            (pos, Some(neg.clone()))
        }
    };

    Ok(FeatureSchema {
        features,
        positive_labels,
        negative_labels,
    })
}

fn check_override(train: &RawDataset, j: usize, name: &str, kind: FeatureKind) -> Result<()> {
    let invalid = |reason: String| Error::InvalidKind {
        feature: name.to_owned(),
        kind: kind.to_string(),
        reason,
    };
    match kind {
        FeatureKind::Categorical => Ok(()),
        FeatureKind::Numeric => match train.column(j).find(|c| parse_number(c).is_none()) {
            Some(bad) => Err(invalid(format!("value '{bad}' is not numeric"))),
            None => Ok(()),
        },
        FeatureKind::Binary => match train
            .column(j)
            .find(|c| !matches!(parse_number(c), Some(v) if v == 0.0 || v == 1.0))
        {
            Some(bad) => Err(invalid(format!("value '{bad}' is not 0 or 1"))),
            None => Ok(()),
        },
    }
}

impl FeatureSchema {
    pub fn encoded_width(&self) -> usize {
        self.features.iter().map(FeatureSpec::encoded_width).sum()
    }

    pub fn encoded_names(&self) -> Vec<String> {
        self.features.iter().flat_map(FeatureSpec::encoded_names).collect()
    }

    pub fn n_categorical(&self) -> usize {
        self.features
            .iter()
            .filter(|f| f.kind == FeatureKind::Categorical)
            .count()
    }

    /// Adds categories present in `other` to each categorical vocabulary, keeping sort order.
    pub fn extend_vocabulary(&mut self, other: &RawDataset) -> Result<()> {
        self.check_columns(other)?;
        for (j, spec) in self.features.iter_mut().enumerate() {
            if let Some(cats) = spec.categories.as_mut() {
                let mut set: BTreeSet<String> = cats.drain(..).collect();
                set.extend(other.column(j).map(str::to_owned));
                *cats = set.into_iter().collect();
            }
        }
        Ok(())
    }

    pub fn label_of(&self, raw: &str) -> u8 {
        let positive = match &self.negative_labels {
            Some(neg) => !neg.contains(raw),
            None => self.positive_labels.contains(raw),
        };
        u8::from(positive)
    }

    /// Encoded column range of each raw feature, in encoded order.
    pub fn column_ranges(&self) -> Vec<std::ops::Range<usize>> {
        let mut start = 0;
        self.features
            .iter()
            .map(|f| {
                let r = start..start + f.encoded_width();
                start = r.end;
                r
            })
            .collect()
    }

    /// Resolves encoded or raw feature names to a mask. Raw names of categorical
    /// features select their whole one-hot block.
    pub fn mask_from_names<S: AsRef<str>>(&self, names: &[S]) -> Result<FeatureMask> {
        let encoded = self.encoded_names();
        let encoded_index: HashMap<&str, usize> =
            encoded.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
        let ranges = self.column_ranges();
        let raw_index: HashMap<&str, usize> = self
            .features
            .iter()
            .enumerate()
            .map(|(i, f)| (f.name.as_str(), i))
            .collect();

        let mut mask = FeatureMask::zeros(encoded.len());
        let mut unknown = Vec::new();
        for name in names {
            let name = name.as_ref();
            if let Some(&i) = encoded_index.get(name) {
                mask.set(i, true);
            } else if let Some(&f) = raw_index.get(name) {
                for i in ranges[f].clone() {
                    mask.set(i, true);
                }
            } else {
                unknown.push(name.to_owned());
            }
        }
        if !unknown.is_empty() {
            return Err(Error::UnknownFeatures(unknown));
        }
        Ok(mask)
    }

    fn check_columns(&self, data: &RawDataset) -> Result<()> {
        if data.n_features() != self.features.len() {
            return Err(Error::SchemaMismatch(format!(
                "schema has {} features, data has {}",
                self.features.len(),
                data.n_features()
            )));
        }
        for (spec, name) in self.features.iter().zip(&data.feature_names) {
            if &spec.name != name {
                return Err(Error::SchemaMismatch(format!(
                    "expected feature '{}', found '{}'",
                    spec.name, name
                )));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Numeric design matrix in the one-hot expanded feature space.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedDataset<T> {
    pub x: Array2<T>,
    /// 0 = normal, 1 = attack.
    pub y: Vec<u8>,
    pub names: Vec<String>,
}

impl<T: Scalar> EncodedDataset<T> {
    pub fn new(x: Array2<T>, y: Vec<u8>, names: Vec<String>) -> Result<Self> {
        if x.nrows() != y.len() {
            return Err(Error::LengthMismatch {
                expected: x.nrows(),
                found: y.len(),
            });
        }
        if x.ncols() != names.len() {
            return Err(Error::DimensionMismatch {
                expected: names.len(),
                found: x.ncols(),
            });
        }
        if y.iter().any(|&v| v > 1) {
            return Err(Error::InvalidConfig("labels must be 0 or 1".into()));
        }
        Ok(Self { x, y, names })
    }

    pub fn n_rows(&self) -> usize {
        self.x.nrows()
    }

    pub fn width(&self) -> usize {
        self.x.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.x.nrows() == 0
    }

    /// Keeps the selected columns, in original order.
    pub fn apply_mask(&self, mask: &FeatureMask) -> Result<Self> {
        if mask.len() != self.width() {
            return Err(Error::DimensionMismatch {
                expected: self.width(),
                found: mask.len(),
            });
        }
        let cols: Vec<usize> = mask.selected().collect();
        if cols.is_empty() {
            return Err(Error::EmptySubset);
        }
        Ok(Self {
            x: self.x.select(Axis(1), &cols),
            y: self.y.clone(),
            names: cols.iter().map(|&i| self.names[i].clone()).collect(),
        })
    }
}

/// Expands categorical features into one-hot blocks and binarizes labels.
///
/// Categories absent from the vocabulary encode as an all-zero block.
pub fn encode<T: Scalar>(data: &RawDataset, schema: &FeatureSchema) -> Result<EncodedDataset<T>> {
    schema.check_columns(data)?;
    let width = schema.encoded_width();
    let ranges = schema.column_ranges();
    let lookups: Vec<Option<HashMap<&str, usize>>> = schema
        .features
        .iter()
        .map(|f| {
            f.categories
                .as_ref()
                .map(|cats| cats.iter().enumerate().map(|(i, c)| (c.as_str(), i)).collect())
        })
        .collect();

    let mut x = Array2::<T>::zeros((data.n_rows(), width));
    for (r, row) in data.rows.iter().enumerate() {
        let mut out = x.row_mut(r);
        for (j, cell) in row.iter().enumerate() {
            let start = ranges[j].start;
            match &lookups[j] {
                Some(lookup) => {
                    if let Some(&k) = lookup.get(cell.as_str()) {
                        out[start + k] = T::one();
                    }
                }
                None => {
                    let v = parse_number(cell).ok_or_else(|| Error::ParseNumber {
                        row: r + 1,
                        column: schema.features[j].name.clone(),
                        value: cell.clone(),
                    })?;
                    out[start] = T::of(v);
                }
            }
        }
    }
    let y = data.labels.iter().map(|l| schema.label_of(l)).collect();
    EncodedDataset::new(x, y, schema.encoded_names())
}

#[cfg(test)]
mod tests {
    use std::io::Write;

    use super::*;

    fn write_tmp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    const HOUSEHOLD: &str = "\
Length,Width,Color,Label
1.2,0.5,A,yes
3.4,1.5,B,no
2.2,0.9,C,yes
0.7,0.2,D,no
1.9,1.1,B,yes
2.8,1.4,A,no
1.0,0.6,C,yes
";

    fn household() -> RawDataset {
        let f = write_tmp(HOUSEHOLD);
        load_csv(
            f.path(),
            &LoadOptions {
                has_header: true,
                label_column: 3,
                ignore_columns: vec![],
            },
        )
        .unwrap()
    }

    #[test]
    fn loads_household_items() {
        let raw = household();
        assert_eq!(raw.n_features(), 3);
        assert_eq!(raw.n_rows(), 7);
        assert_eq!(raw.feature_names(), ["Length", "Width", "Color"]);
        assert_eq!(raw.labels()[1], "no");
    }

    #[test]
    fn empty_file_is_an_error() {
        let f = write_tmp("a,b,label\n");
        let opts = LoadOptions {
            has_header: true,
            label_column: 2,
            ..Default::default()
        };
        let err = load_csv(f.path(), &opts).unwrap_err();
        assert_eq!(err.to_string(), "empty dataset");
        let f = write_tmp("");
        assert!(matches!(load_csv(f.path(), &opts), Err(Error::EmptyDataset)));
    }

    #[test]
    fn ragged_row_is_reported() {
        let f = write_tmp("a,b,c,label\n1,2,3,x\n1,2,3,x\n1,2,3,x\n1,2,3,x\n1,2,x\n");
        let opts = LoadOptions {
            has_header: true,
            label_column: 3,
            ..Default::default()
        };
        let err = load_csv(f.path(), &opts).unwrap_err();
        assert!(matches!(err, Error::RaggedRow { row: 5, expected: 4, found: 3 }));
        assert!(err.to_string().contains("row 5"));
    }

    #[test]
    fn missing_cell_is_an_error() {
        let f = write_tmp("a,b,label\n1,,x\n");
        let opts = LoadOptions {
            has_header: true,
            label_column: 2,
            ..Default::default()
        };
        assert!(matches!(load_csv(f.path(), &opts), Err(Error::MissingValue { row: 1, .. })));
    }

    #[test]
    fn headerless_names_and_ignored_columns() {
        let f = write_tmp("0,tcp,normal,20\n1,udp,smurf,21\n");
        let opts = LoadOptions {
            has_header: false,
            label_column: 2,
            ignore_columns: vec![3],
        };
        let raw = load_csv(f.path(), &opts).unwrap();
        assert_eq!(raw.feature_names(), ["f1", "f2"]);
        assert_eq!(raw.labels(), ["normal", "smurf"]);
    }

    #[test]
    fn kinds_are_inferred() {
        let raw = RawDataset::new(
            vec!["flag".into(), "proto".into(), "bytes".into()],
            vec![
                vec!["0".into(), "tcp".into(), "10".into()],
                vec!["1".into(), "udp".into(), "2.5".into()],
                vec!["1".into(), "icmp".into(), "0".into()],
            ],
            vec!["a".into(), "n".into(), "a".into()],
        )
        .unwrap();
        let schema = fit_schema(&raw, &BTreeMap::new(), &LabelRule::positive(["a"])).unwrap();
        assert_eq!(schema.features[0].kind, FeatureKind::Binary);
        assert_eq!(schema.features[1].kind, FeatureKind::Categorical);
        assert_eq!(
            schema.features[1].categories.as_deref().unwrap(),
            ["icmp", "tcp", "udp"]
        );
        assert_eq!(schema.features[2].kind, FeatureKind::Numeric);
        assert_eq!(schema.encoded_width(), 5);
    }

    #[test]
    fn override_errors() {
        let raw = household();
        let mut overrides = BTreeMap::new();
        overrides.insert("Depth".to_string(), FeatureKind::Categorical);
        assert!(matches!(
            fit_schema(&raw, &overrides, &LabelRule::positive(["yes"])),
            Err(Error::UnknownFeatures(v)) if v == ["Depth"]
        ));
        let mut overrides = BTreeMap::new();
        overrides.insert("Length".to_string(), FeatureKind::Binary);
        assert!(matches!(
            fit_schema(&raw, &overrides, &LabelRule::positive(["yes"])),
            Err(Error::InvalidKind { .. })
        ));
        assert!(matches!(
            fit_schema(&raw, &BTreeMap::new(), &LabelRule::positive(["maybe"])),
            Err(Error::NoPositiveLabel)
        ));
    }

    #[test]
    fn numeric_override_to_categorical() {
        let raw = household();
        let mut overrides = BTreeMap::new();
        overrides.insert("Width".to_string(), FeatureKind::Categorical);
        let schema = fit_schema(&raw, &overrides, &LabelRule::positive(["yes"])).unwrap();
        assert_eq!(schema.n_categorical(), 2);
        assert_eq!(schema.encoded_width(), 1 + 7 + 4);
    }

    #[test]
    fn one_hot_matches_figure_layout() {
        let raw = household();
        let schema = fit_schema(&raw, &BTreeMap::new(), &LabelRule::positive(["yes"])).unwrap();
        let enc: EncodedDataset<f64> = encode(&raw, &schema).unwrap();
        assert_eq!(
            enc.names,
            ["Length", "Width", "Color_A", "Color_B", "Color_C", "Color_D"]
        );
        // row 2 has Color = B
        assert_eq!(enc.x.row(1).to_vec(), vec![3.4, 1.5, 0.0, 1.0, 0.0, 0.0]);
        assert_eq!(enc.y, vec![1, 0, 1, 0, 1, 0, 1]);
    }

    #[test]
    fn unseen_category_is_all_zero_block() {
        let raw = household();
        let schema = fit_schema(&raw, &BTreeMap::new(), &LabelRule::positive(["yes"])).unwrap();
        let test = RawDataset::new(
            raw.feature_names().to_vec(),
            vec![vec!["1".into(), "1".into(), "Z".into()]],
            vec!["no".into()],
        )
        .unwrap();
        let enc: EncodedDataset<f32> = encode(&test, &schema).unwrap();
        assert_eq!(enc.x.row(0).to_vec(), vec![1.0, 1.0, 0.0, 0.0, 0.0, 0.0]);

        let mut union = schema.clone();
        union.extend_vocabulary(&test).unwrap();
        assert_eq!(union.features[2].categories.as_deref().unwrap(), ["A", "B", "C", "D", "Z"]);
        let enc: EncodedDataset<f32> = encode(&test, &union).unwrap();
        assert_eq!(enc.x.row(0).to_vec(), vec![1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn parse_failure_names_row_and_column() {
        let raw = household();
        let schema = fit_schema(&raw, &BTreeMap::new(), &LabelRule::positive(["yes"])).unwrap();
        let bad = RawDataset::new(
            raw.feature_names().to_vec(),
            vec![
                vec!["1".into(), "1".into(), "A".into()],
                vec!["1".into(), "wide".into(), "A".into()],
            ],
            vec!["no".into(), "no".into()],
        )
        .unwrap();
        let err = encode::<f64>(&bad, &schema).unwrap_err();
        assert!(matches!(err, Error::ParseNumber { row: 2, ref column, .. } if column == "Width"));
    }

    #[test]
    fn negative_rule_maps_unseen_attacks_to_one() {
        let raw = household();
        let schema = fit_schema(&raw, &BTreeMap::new(), &LabelRule::negative(["no"])).unwrap();
        assert_eq!(schema.label_of("no"), 0);
        assert_eq!(schema.label_of("yes"), 1);
        assert_eq!(schema.label_of("neptune"), 1);
    }

    #[test]
    fn mask_application() {
        let raw = household();
        let schema = fit_schema(&raw, &BTreeMap::new(), &LabelRule::positive(["yes"])).unwrap();
        let enc: EncodedDataset<f64> = encode(&raw, &schema).unwrap();
        assert_eq!(enc.apply_mask(&FeatureMask::ones(6)).unwrap(), enc);
        let sub = enc.apply_mask(&FeatureMask::from_indices(6, [4, 0])).unwrap();
        assert_eq!(sub.names, ["Length", "Color_C"]);
        assert_eq!(sub.y, enc.y);
        let err = enc.apply_mask(&FeatureMask::zeros(6)).unwrap_err();
        assert_eq!(err.to_string(), "empty feature subset");
    }

    #[test]
    fn mask_from_raw_and_encoded_names() {
        let raw = household();
        let schema = fit_schema(&raw, &BTreeMap::new(), &LabelRule::positive(["yes"])).unwrap();
        let m = schema.mask_from_names(&["Color", "Width"]).unwrap();
        assert_eq!(m.to_u8(), vec![0, 1, 1, 1, 1, 1]);
        let m = schema.mask_from_names(&["Color_D"]).unwrap();
        assert_eq!(m.to_u8(), vec![0, 0, 0, 0, 0, 1]);
        assert!(matches!(
            schema.mask_from_names(&["Height", "Color_Q"]),
            Err(Error::UnknownFeatures(v)) if v == ["Height", "Color_Q"]
        ));
    }

    #[test]
    fn schema_json_roundtrip() {
        let raw = household();
        let schema = fit_schema(&raw, &BTreeMap::new(), &LabelRule::positive(["yes"])).unwrap();
        let json = schema.to_json().unwrap();
        assert!(json.contains("\"kind\": \"categorical\""));
        assert!(!json.contains("negative_labels"));
        assert_eq!(FeatureSchema::from_json(&json).unwrap(), schema);
    }
}
