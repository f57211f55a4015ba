use std::fmt;
use std::str::FromStr;

use crate::lime::{agreement, LocalExplanation};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum QKind {
    /// Hard-label agreement between surrogate and black box.
    Accuracy,
    /// `|blackbox_prob − surrogate_prob|`.
    ResidualError,
}

impl QKind {
    pub fn as_str(self) -> &'static str {
        match self {
            QKind::Accuracy => "accuracy",
            QKind::ResidualError => "residual_error",
        }
    }
}

impl fmt::Display for QKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for QKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "accuracy" => Ok(QKind::Accuracy),
            "residual_error" => Ok(QKind::ResidualError),
            other => Err(Error::config("q_kind", format!("unknown q_kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelityRecord {
    pub instance_id: usize,
    pub group: usize,
    pub q_value: f64,
}

pub fn fidelity_from_explanations(expls: &[LocalExplanation], q_kind: QKind) -> Vec<FidelityRecord> {
    expls
        .iter()
        .map(|e| FidelityRecord {
            instance_id: e.instance_id,
            group: usize::from(e.group),
            q_value: match q_kind {
                QKind::Accuracy => f64::from(agreement(e)),
                QKind::ResidualError => (e.blackbox_prob - e.surrogate_prob_at_instance).abs(),
            },
        })
        .collect()
}

/// Group means, group sizes and the pooled mean.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupSummary {
    pub means: Vec<f64>,
    pub sizes: Vec<usize>,
    pub overall: f64,
}

/// Validates that groups are `0..G` with `G ≥ 2` and none empty.
pub fn group_summary(records: &[FidelityRecord]) -> Result<GroupSummary> {
    let g = records.iter().map(|r| r.group + 1).max().unwrap_or(0);
    let mut sums = vec![0.0; g];
    let mut sizes = vec![0usize; g];
    let mut total = 0.0;
    for r in records {
        if !r.q_value.is_finite() {
            return Err(Error::config("q_value", format!("non-finite value for instance {}", r.instance_id)));
        }
        sums[r.group] += r.q_value;
        sizes[r.group] += 1;
        total += r.q_value;
    }
    if g < 2 || sizes.contains(&0) {
        return Err(Error::EmptyGroup { sizes });
    }
    Ok(GroupSummary {
        means: sums.iter().zip(&sizes).map(|(s, &n)| s / n as f64).collect(),
        overall: total / records.len() as f64,
        sizes,
    })
}

/// `Δ_Q` and the group attaining it (lowest id on ties).
pub fn max_fidelity_gap(records: &[FidelityRecord]) -> Result<(f64, usize)> {
    let s = group_summary(records)?;
    let mut best = (f64::NEG_INFINITY, 0);
    for (j, q) in s.means.iter().enumerate() {
        let gap = s.overall - q;
        if gap > best.0 {
            best = (gap, j);
        }
    }
    Ok(best)
}

/// `Δ_Q^group`; for two groups this is `|Q_0 − Q_1|`.
pub fn mean_fidelity_gap(records: &[FidelityRecord]) -> Result<f64> {
    let s = group_summary(records)?;
    let g = s.means.len();
    let mut acc = 0.0;
    for p in 0..g {
        for j in p + 1..g {
            acc += (s.means[p] - s.means[j]).abs();
        }
    }
    Ok(2.0 * acc / (g * (g - 1)) as f64)
}


#[cfg(test)]
mod properties {
    use super::*;
    use crate::metrics::oracle::brute_force_gap_oracle;
    use proptest::prelude::*;

    /// Record sets with `g` groups, every group nonempty.
    fn record_sets() -> impl Strategy<Value = Vec<FidelityRecord>> {
        (2usize..6).prop_flat_map(|g| {
            prop::collection::vec(prop::collection::vec(0.0f64..=1.0, 1..30), g).prop_map(|groups| {
                let mut out = Vec::new();
                for (j, qs) in groups.iter().enumerate() {
                    for &q in qs {
                        out.push(FidelityRecord {
                            instance_id: out.len(),
                            group: j,
                            q_value: q,
                        });
                    }
                }
                out
            })
        })
    }

    proptest! {
        #[test]
        fn gaps_are_nonnegative(r in record_sets()) {
            prop_assert!(max_fidelity_gap(&r).unwrap().0 >= -1e-15);
            prop_assert!(mean_fidelity_gap(&r).unwrap() >= 0.0);
        }

        #[test]
        fn matches_oracle(r in record_sets()) {
            let (omax, omean) = brute_force_gap_oracle(&r).unwrap();
            prop_assert!((max_fidelity_gap(&r).unwrap().0 - omax).abs() <= 1e-12);
            prop_assert!((mean_fidelity_gap(&r).unwrap() - omean).abs() <= 1e-12);
        }

        #[test]
        fn label_permutation_invariant(r in record_sets(), shift in 1usize..5) {
            let g = r.iter().map(|x| x.group + 1).max().unwrap();
            let permuted: Vec<_> = r
                .iter()
                .map(|x| FidelityRecord { group: (x.group + shift) % g, ..*x })
                .collect();
            prop_assert!((max_fidelity_gap(&r).unwrap().0 - max_fidelity_gap(&permuted).unwrap().0).abs() <= 1e-12);
            prop_assert!((mean_fidelity_gap(&r).unwrap() - mean_fidelity_gap(&permuted).unwrap()).abs() <= 1e-12);
        }

        #[test]
        fn two_group_identity(
            a in prop::collection::vec(0.0f64..=1.0, 1..40),
            b in prop::collection::vec(0.0f64..=1.0, 1..40),
        ) {
            let r = tests::records(&[&a, &b]);
            let q0 = a.iter().sum::<f64>() / a.len() as f64;
            let q1 = b.iter().sum::<f64>() / b.len() as f64;
            let overall = (a.iter().sum::<f64>() + b.iter().sum::<f64>()) / (a.len() + b.len()) as f64;
            prop_assert!((mean_fidelity_gap(&r).unwrap() - (q0 - q1).abs()).abs() <= 1e-12);
            let expected = (overall - q0).max(overall - q1);
            prop_assert!((max_fidelity_gap(&r).unwrap().0 - expected).abs() <= 1e-12);
        }

        #[test]
        fn constant_records_give_zero(q in 0.0f64..=1.0, sizes in prop::collection::vec(1usize..10, 2..5)) {
            let groups: Vec<Vec<f64>> = sizes.iter().map(|&n| vec![q; n]).collect();
            let refs: Vec<&[f64]> = groups.iter().map(|v| v.as_slice()).collect();
            let r = tests::records(&refs);
            prop_assert!(max_fidelity_gap(&r).unwrap().0.abs() <= 1e-15);
            prop_assert!(mean_fidelity_gap(&r).unwrap().abs() <= 1e-15);
        }
    }
}
