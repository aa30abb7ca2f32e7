//! Rank statistics.

use serde::{Deserialize, Serialize};

use super::{NumericsError, RandomStream, Result};

/// Result of a Spearman rank-correlation computation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpearmanResult {
    /// Rank correlation in `[-1, 1]`.
    pub rho: f64,
    /// Two-sided permutation p-value, when requested.
    pub p_value: Option<f64>,
}

/// Spearman rank correlation between `x` and `y`, with ties assigned average
/// (mid) ranks.
///
/// When `permutations > 0`, also estimates a two-sided p-value by permuting
/// one rank vector `permutations` times with the given seed and counting
/// `|rho_perm| >= |rho|`, using the add-one smoothing `(1 + count) / (1 + N)`
/// so the estimate is never exactly zero.
///
/// Errors with `DegenerateRanks` if either input is constant, since rank
/// correlation is undefined there.
pub fn spearman_rho(
    x: &[f64],
    y: &[f64],
    permutations: usize,
    seed: u64,
) -> Result<SpearmanResult> {
    let n = x.len();
    if y.len() != n {
        return Err(NumericsError::ShapeMismatch {
            context: format!("rank inputs have lengths {n} and {}", y.len()),
        });
    }
    if n < 2 {
        return Err(NumericsError::TooFewPoints {
            context: "spearman",
            required: 2,
            actual: n,
        });
    }

    let rx = midranks(x);
    let ry = midranks(y);
    let rho = pearson(&rx, &ry)?;

    let p_value = if permutations > 0 {
        let mut stream = RandomStream::substream(seed, "spearman-permutation");
        let mut permuted = ry.clone();
        let mut hits = 0usize;
        for _ in 0..permutations {
            stream.shuffle(&mut permuted);
            let r = pearson(&rx, &permuted)?;
            if r.abs() >= rho.abs() - 1e-12 {
                hits += 1;
            }
        }
        Some((1 + hits) as f64 / (1 + permutations) as f64)
    } else {
        None
    };

    Ok(SpearmanResult { rho, p_value })
}

/// Average ranks, 1-based; ties share the mean of the ranks they span.
fn midranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite values"));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // Positions i..=j (0-based) hold ties; their 1-based ranks average to
        // (i + j) / 2 + 1.
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for k in i..=j {
            ranks[order[k]] = avg;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(a: &[f64], b: &[f64]) -> Result<f64> {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (&ai, &bi) in a.iter().zip(b) {
        cov += (ai - ma) * (bi - mb);
        va += (ai - ma) * (ai - ma);
        vb += (bi - mb) * (bi - mb);
    }
    if va == 0.0 {
        return Err(NumericsError::DegenerateRanks { side: "first" });
    }
    if vb == 0.0 {
        return Err(NumericsError::DegenerateRanks { side: "second" });
    }
    Ok(cov / (va * vb).sqrt())
}
