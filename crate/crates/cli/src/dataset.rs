//! CSV ingestion and grouping.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use extropy::SampleBatch;
use serde::Serialize;

use crate::error::{CliError, Result};

pub const MIN_GROUP_SIZE: usize = 5;
pub const DEFAULT_CUTS: [f64; 4] = [0.2, 0.4, 0.6, 0.8];

/// Groups formed by cutting a numeric column at empirical quantiles.
///
/// Quantiles interpolate linearly between order statistics. Intervals are
/// `[min, q1], (q1, q2], …, (qk, max]`, so a value equal to a cut point goes
/// to the lower interval.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantileGroupSpec {
    pub column: String,
    pub probabilities: Vec<f64>,
}

impl QuantileGroupSpec {
    pub fn new(column: impl Into<String>, probabilities: Vec<f64>) -> Result<Self> {
        if probabilities.is_empty() {
            return Err(CliError::Input("at least one cut probability is needed".into()));
        }
        if probabilities.iter().any(|p| !(*p > 0.0 && *p < 1.0)) || probabilities.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CliError::Input(format!(
                "cut probabilities must be strictly increasing in (0, 1), got {probabilities:?}"
            )));
        }
        Ok(Self {
            column: column.into(),
            probabilities,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Grouping {
    /// One group per distinct value of the column, ordered by label.
    Column {
        column: String,
    },
    Quantiles(QuantileGroupSpec),
}

/// Keep only rows whose `column` equals `value` (as text).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Filter {
    pub column: String,
    pub value: String,
}

impl FromStr for Filter {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self> {
        match s.split_once('=') {
            Some((c, v)) if !c.trim().is_empty() => Ok(Self {
                column: c.trim().to_string(),
                value: v.trim().to_string(),
            }),
            _ => Err(CliError::Input(format!(
                "filter must look like column=value, got {s:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Group {
    pub label: String,
    pub values: SampleBatch,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub source: String,
    pub value_column: String,
    pub grouping: Grouping,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub filter: Option<Filter>,
    pub rows_read: usize,
    pub rows_filtered_out: usize,
    pub rows_missing: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cut_points: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupedDataset {
    pub groups: Vec<Group>,
    pub provenance: Provenance,
}

fn is_missing(s: &str) -> bool {
    let s = s.trim();
    s.is_empty() || s.eq_ignore_ascii_case("na") || s.eq_ignore_ascii_case("nan")
}

fn parse_number(s: &str, row: usize, column: &str) -> Result<f64> {
    match s.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(CliError::ParseError {
            row,
            column: column.to_string(),
            value: s.to_string(),
        }),
    }
}

/// Compact decimal rendering for interval labels: `37.8`, `54`, `0.125`.
pub fn format_edge(v: f64) -> String {
    let s = format!("{v:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

fn quantile_type7(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn load_csv(
    path: &Path,
    value_column: &str,
    grouping: &Grouping,
    filter: Option<&Filter>,
) -> Result<GroupedDataset> {
    if !path.exists() {
        return Err(CliError::FileNotFound(path.to_path_buf()));
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let headers = reader.headers()?.clone();
    let index = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::MissingColumn(name.to_string()))
    };
    let value_idx = index(value_column)?;
    let group_column = match grouping {
        Grouping::Column { column } => column.as_str(),
        Grouping::Quantiles(spec) => spec.column.as_str(),
    };
    let group_idx = index(group_column)?;
    let filter_idx = filter.map(|f| index(&f.column)).transpose()?;

    let (mut rows_read, mut rows_filtered_out, mut rows_missing) = (0, 0, 0);
    let mut rows: Vec<(String, f64)> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        // Data rows are numbered from 1, after the header.
        let row = i + 1;
        rows_read += 1;
        if let (Some(f), Some(idx)) = (filter, filter_idx) {
            if record.get(idx).unwrap_or("") != f.value {
                rows_filtered_out += 1;
                continue;
            }
        }
        let (raw_value, raw_group) = (record.get(value_idx).unwrap_or(""), record.get(group_idx).unwrap_or(""));
        if is_missing(raw_value) || is_missing(raw_group) {
            rows_missing += 1;
            continue;
        }
        let value = parse_number(raw_value, row, value_column)?;
        if let Grouping::Quantiles(_) = grouping {
            parse_number(raw_group, row, group_column)?;
        }
        rows.push((raw_group.to_string(), value));
    }

    let (groups, cut_points) = match grouping {
        Grouping::Column { .. } => {
            let mut by_label: BTreeMap<String, Vec<f64>> = BTreeMap::new();
            for (label, v) in rows {
                by_label.entry(label).or_default().push(v);
            }
            (by_label.into_iter().collect::<Vec<_>>(), None)
        }
        Grouping::Quantiles(spec) => {
            let keys: Vec<f64> = rows
                .iter()
                .map(|(g, _)| g.trim().parse::<f64>().expect("validated above"))
                .collect();
            if keys.is_empty() {
                return Err(CliError::Input("no rows left after dropping missing values".into()));
            }
            let mut sorted = keys.clone();
            sorted.sort_by(f64::total_cmp);
            let cuts: Vec<f64> = spec.probabilities.iter().map(|&p| quantile_type7(&sorted, p)).collect();
            let mut edges = vec![sorted[0]];
            edges.extend(&cuts);
            edges.push(sorted[sorted.len() - 1]);
            let mut buckets: Vec<Vec<f64>> = vec![Vec::new(); cuts.len() + 1];
            for (k, (_, v)) in keys.iter().zip(&rows) {
                buckets[cuts.partition_point(|c| c < k)].push(*v);
            }
            let labelled = buckets
                .into_iter()
                .enumerate()
                .map(|(i, b)| {
                    let open = if i == 0 { '[' } else { '(' };
                    (
                        format!("{open}{},{}]", format_edge(edges[i]), format_edge(edges[i + 1])),
                        b,
                    )
                })
                .collect();
            (labelled, Some(cuts))
        }
    };

    if groups.len() < 2 {
        return Err(CliError::Input(format!(
            "need at least 2 groups, found {}",
            groups.len()
        )));
    }
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::with_capacity(groups.len());
    for (label, values) in groups {
        if !seen.insert(label.clone()) {
            return Err(CliError::Input(format!("duplicate group label {label:?}")));
        }
        if values.len() < MIN_GROUP_SIZE {
            return Err(CliError::TooFewObservations {
                group: label,
                n: values.len(),
                required: MIN_GROUP_SIZE,
            });
        }
        out.push(Group {
            label,
            values: SampleBatch::from_draws(values)?,
        });
    }
    Ok(GroupedDataset {
        groups: out,
        provenance: Provenance {
            source: path.display().to_string(),
            value_column: value_column.to_string(),
            grouping: grouping.clone(),
            filter: filter.cloned(),
            rows_read,
            rows_filtered_out,
            rows_missing,
            cut_points,
        },
    })
}
