use extropy::estimation::{relative_extropy_of_kdes, EstimatorOptions, KdeModel};
use rayon::prelude::*;
use serde::Serialize;

use crate::dataset::GroupedDataset;
use crate::error::{CliError, Result};

/// Largest tolerated asymmetry or diagonal entry.
pub const INVARIANT_TOLERANCE: f64 = 1e-9;

/// Pairwise estimated relative extropy between groups.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivergenceMatrix {
    pub labels: Vec<String>,
    pub sizes: Vec<usize>,
    /// Sheather–Jones bandwidth of each group; entry `(i, j)` uses
    /// bandwidths `i` and `j`.
    pub bandwidths: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

impl DivergenceMatrix {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.values.iter().flatten().copied().fold(0.0, f64::max)
    }

    /// Symmetric, zero diagonal, nonnegative off the diagonal.
    pub fn check_invariants(&self) -> Result<()> {
        let k = self.len();
        for i in 0..k {
            if self.values[i][i].abs() > INVARIANT_TOLERANCE {
                return Err(CliError::Input(format!(
                    "matrix diagonal ({i},{i}) is {}",
                    self.values[i][i]
                )));
            }
            for j in 0..k {
                let (a, b) = (self.values[i][j], self.values[j][i]);
                if (a - b).abs() > INVARIANT_TOLERANCE || a < -INVARIANT_TOLERANCE {
                    return Err(CliError::Input(format!(
                        "matrix entries ({i},{j}) = {a} and ({j},{i}) = {b} break symmetry or sign"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Entry `(i, j)` is `d̂` between groups `i` and `j`. Each group's density
/// estimate is fitted once; the `k(k−1)/2` pairs run concurrently.
pub fn pairwise_matrix(ds: &GroupedDataset, opts: &EstimatorOptions) -> Result<DivergenceMatrix> {
    let kdes: Vec<KdeModel> = ds
        .groups
        .par_iter()
        .map(|g| {
            KdeModel::with_sheather_jones(g.values.clone()).map_err(|source| CliError::Pair {
                a: g.label.clone(),
                b: g.label.clone(),
                source,
            })
        })
        .collect::<Result<_>>()?;
    let k = kdes.len();
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect();
    let entries: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| {
            relative_extropy_of_kdes(&kdes[i], &kdes[j], opts)
                .map(|e| e.value)
                .map_err(|source| CliError::Pair {
                    a: ds.groups[i].label.clone(),
                    b: ds.groups[j].label.clone(),
                    source,
                })
        })
        .collect::<Result<_>>()?;
    let mut values = vec![vec![0.0; k]; k];
    for (&(i, j), v) in pairs.iter().zip(entries) {
        values[i][j] = v;
        values[j][i] = v;
    }
    let m = DivergenceMatrix {
        labels: ds.groups.iter().map(|g| g.label.clone()).collect(),
        sizes: ds.groups.iter().map(|g| g.values.len()).collect(),
        bandwidths: kdes.iter().map(|k| k.bandwidth()).collect(),
        values,
    };
    m.check_invariants()?;
    Ok(m)
}
