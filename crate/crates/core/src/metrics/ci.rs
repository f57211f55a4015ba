use rand::Rng;
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::FidelityRecord;
use crate::rng::{self, tag};
use crate::{Error, Result};

/// Student-t interval on the mean of per-trial values.
pub fn trial_ci(values: &[f64], level: f64) -> Result<(f64, f64)> {
    if values.len() < 2 {
        return Err(Error::UndefinedCi(format!("need at least 2 trials, got {}", values.len())));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::config("level", format!("must lie in (0, 1), got {level}")));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    if var == 0.0 {
        return Ok((mean, mean));
    }
    let t = StudentsT::new(0.0, 1.0, n - 1.0)
        .map_err(|e| Error::UndefinedCi(e.to_string()))?
        .inverse_cdf(0.5 + level / 2.0);
    let half = t * (var / n).sqrt();
    Ok((mean - half, mean + half))
}

/// Percentile bootstrap interval for the trial-averaged `statistic`.
///
/// Each resample redraws instances with replacement inside every
/// (trial, group) stratum, so group sizes are preserved, then averages the
/// per-trial statistic.
pub fn bootstrap_ci<F>(
    trials: &[Vec<FidelityRecord>],
    statistic: F,
    resamples: usize,
    level: f64,
    seed: u64,
) -> Result<(f64, f64)>
where
    F: Fn(&[FidelityRecord]) -> Result<f64>,
{
    if resamples < 2 || trials.is_empty() {
        return Err(Error::UndefinedCi(
            "need at least one trial and 2 bootstrap resamples".into(),
        ));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::config("level", format!("must lie in (0, 1), got {level}")));
    }
    let strata: Vec<Vec<Vec<&FidelityRecord>>> = trials
        .iter()
        .map(|records| {
            let n_groups = records.iter().map(|r| r.group + 1).max().unwrap_or(0);
            (0..n_groups)
                .map(|g| records.iter().filter(|r| r.group == g).collect())
                .collect()
        })
        .collect();
    let mut rng = rng::stream(seed, tag::BOOTSTRAP);
    let mut stats = Vec::with_capacity(resamples);
    let mut sample = Vec::new();
    for _ in 0..resamples {
        let mut acc = 0.0;
        for by_group in &strata {
            sample.clear();
            for members in by_group {
                for _ in 0..members.len() {
                    sample.push(*members[rng.random_range(0..members.len())]);
                }
            }
            acc += statistic(&sample)?;
        }
        stats.push(acc / strata.len() as f64);
    }
    let alpha = (1.0 - level) / 2.0;
    let lo = crate::dgp::empirical_quantile(&stats, alpha).expect("non-empty");
    let hi = crate::dgp::empirical_quantile(&stats, 1.0 - alpha).expect("non-empty");
    Ok((lo, hi))
}
