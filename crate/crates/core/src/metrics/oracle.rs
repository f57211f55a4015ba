//! Brute-force reference for the fidelity gaps.
//!
//! Deliberately shares no code with the main implementation: every group mean
//! is a fresh scan over all records, and pairs are enumerated explicitly.

use super::FidelityRecord;

/// `(Δ_Q, Δ_Q^group)` by naive enumeration. `None` if fewer than two groups
/// or any group in `0..G` is empty.
pub fn brute_force_gap_oracle(records: &[FidelityRecord]) -> Option<(f64, f64)> {
    let mut n_groups = 0;
    for r in records {
        if r.group + 1 > n_groups {
            n_groups = r.group + 1;
        }
    }
    if n_groups < 2 {
        return None;
    }
    let mut means = Vec::new();
    for j in 0..n_groups {
        let mut sum = 0.0;
        let mut count = 0usize;
        for r in records {
            if r.group == j {
                sum += r.q_value;
                count += 1;
            }
        }
        if count == 0 {
            return None;
        }
        means.push(sum / count as f64);
    }
    let mut total = 0.0;
    for r in records {
        total += r.q_value;
    }
    let overall = total / records.len() as f64;

    let mut max_gap = f64::NEG_INFINITY;
    for m in &means {
        let d = overall - m;
        if d > max_gap {
            max_gap = d;
        }
    }
    let mut pair_sum = 0.0;
    let mut pairs = 0usize;
    for p in 0..n_groups {
        for j in 0..n_groups {
            if p < j {
                pair_sum += (means[p] - means[j]).abs();
                pairs += 1;
            }
        }
    }
    Some((max_gap, pair_sum / pairs as f64))
}
