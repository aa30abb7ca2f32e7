//! Observational-equivalence measurements and the two-point testing bound.

use serde::{Deserialize, Serialize};

use super::DiagnosticsError;
use crate::dgp::{DgpSpec, Interval};
use crate::numerics::RandomStream;

/// Supremum gaps between two scalar processes over an evaluation grid.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct AgreementGap {
    pub sup_abs: f64,
    /// `sup_abs` relative to the largest magnitude either process attains
    /// on the window. Pointwise ratios are useless at zero crossings.
    pub sup_rel: f64,
}

/// Grid supremum of |f1 - f2|, absolute and relative to the window's
/// amplitude.
pub fn agreement_gap_fn(
    f1: impl Fn(f64) -> f64,
    f2: impl Fn(f64) -> f64,
    region: Interval,
    grid_n: usize,
) -> Result<AgreementGap, DiagnosticsError> {
    const TINY: f64 = 1e-12;
    if grid_n < 2 {
        return Err(DiagnosticsError::DomainViolation {
            context: format!("agreement gap needs a grid of at least 2 points, got {grid_n}"),
        });
    }
    let mut sup_abs: f64 = 0.0;
    let mut amplitude: f64 = 0.0;
    for i in 0..grid_n {
        let t = i as f64 / (grid_n - 1) as f64;
        let x = region.lo + t * (region.hi - region.lo);
        let (a, b) = (f1(x), f2(x));
        if !a.is_finite() || !b.is_finite() {
            return Err(DiagnosticsError::DomainViolation {
                context: format!("process value not finite at x = {x}"),
            });
        }
        sup_abs = sup_abs.max((a - b).abs());
        amplitude = amplitude.max(a.abs()).max(b.abs());
    }
    Ok(AgreementGap {
        sup_abs,
        sup_rel: sup_abs / amplitude.max(TINY),
    })
}

/// `agreement_gap_fn` over two scalar 1-d processes.
pub fn agreement_gap(
    p1: &DgpSpec,
    p2: &DgpSpec,
    region: Interval,
    grid_n: usize,
) -> Result<AgreementGap, DiagnosticsError> {
    for (name, spec) in [("first", p1), ("second", p2)] {
        if spec.input_dim() != 1 || spec.output_dim() != 1 {
            return Err(DiagnosticsError::DomainViolation {
                context: format!("{name} process {spec} is not scalar 1-d"),
            });
        }
    }
    agreement_gap_fn(|x| p1.eval(&[x])[0], |x| p2.eval(&[x])[0], region, grid_n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundRegime {
    /// The bound is strictly below 1 and constrains every window-supported test.
    Informative,
    /// eps * sqrt(n) >= 2 sigma: the bound clamps to 1 and says nothing.
    Vacuous,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LecamBound {
    /// Worst-case correct-decision probability bound, clamped to 1.
    pub probability: f64,
    pub regime: BoundRegime,
    /// eps * sqrt(n) / sigma, the effective signal-to-noise ratio.
    pub threshold_ratio: f64,
}

/// Two-point bound min(1, 1/2 + eps sqrt(n) / (4 sigma)) on the worst-case
/// correct-decision probability of any test supported on the window.
pub fn lecam_bound(epsilon: f64, n: usize, sigma: f64) -> LecamBound {
    assert!(epsilon >= 0.0, "epsilon must be nonnegative");
    assert!(sigma > 0.0, "sigma must be positive");
    let ratio = epsilon * (n as f64).sqrt() / sigma;
    let raw = 0.5 + ratio / 4.0;
    LecamBound {
        probability: raw.min(1.0),
        regime: if raw >= 1.0 {
            BoundRegime::Vacuous
        } else {
            BoundRegime::Informative
        },
        threshold_ratio: ratio,
    }
}

/// Monte-Carlo estimate of how well the optimal test tells two processes
/// apart from `n` noisy samples on the window.
///
/// Each trial draws a dataset from one hypothesis (alternating) and applies
/// the exact likelihood-ratio test between the two known mean functions
/// under Gaussian noise, flipping a fair coin on exact likelihood ties.
/// Returns the worst per-class correct-decision rate, the quantity the
/// two-point bound constrains.
pub fn empirical_distinguishability(
    p1: &DgpSpec,
    p2: &DgpSpec,
    region: Interval,
    n: usize,
    sigma: f64,
    trials: usize,
    stream: &mut RandomStream,
) -> Result<f64, DiagnosticsError> {
    if trials < 100 {
        return Err(DiagnosticsError::DomainViolation {
            context: format!("need at least 100 trials for a stable estimate, got {trials}"),
        });
    }
    for (name, spec) in [("first", p1), ("second", p2)] {
        if spec.input_dim() != 1 || spec.output_dim() != 1 {
            return Err(DiagnosticsError::DomainViolation {
                context: format!("{name} process {spec} is not scalar 1-d"),
            });
        }
    }
    assert!(sigma > 0.0, "sigma must be positive");
    assert!(n >= 1, "need at least one sample per trial");

    let mut correct = [0usize; 2];
    let mut totals = [0usize; 2];
    for trial in 0..trials {
        let truth = trial % 2;
        // Log-likelihood ratio of hypothesis 1 over 2 reduces to comparing
        // squared residuals against the two mean functions.
        let mut score = 0.0;
        for _ in 0..n {
            let x = stream.uniform(region.lo, region.hi);
            let m1 = p1.eval(&[x])[0];
            let m2 = p2.eval(&[x])[0];
            let mean = if truth == 0 { m1 } else { m2 };
            let y = mean + sigma * stream.normal();
            score += (y - m2) * (y - m2) - (y - m1) * (y - m1);
        }
        let decided = if score == 0.0 {
            stream.index(2)
        } else if score > 0.0 {
            0
        } else {
            1
        };
        totals[truth] += 1;
        if decided == truth {
            correct[truth] += 1;
        }
    }
    let acc0 = correct[0] as f64 / totals[0] as f64;
    let acc1 = correct[1] as f64 / totals[1] as f64;
    Ok(acc0.min(acc1))
}
