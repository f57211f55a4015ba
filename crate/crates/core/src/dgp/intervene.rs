use rand::seq::SliceRandom;

use super::{TabularDataset, ADVANTAGED, DISADVANTAGED};
use crate::rng::{self, tag};
use crate::{Error, Result};

/// Uniform random split into `(train, test)`; each part keeps dataset order.
pub fn split_train_test(
    ds: &TabularDataset,
    train_fraction: f64,
    seed: u64,
) -> Result<(TabularDataset, TabularDataset)> {
    let (train, test) = split_indices(ds.n_rows(), train_fraction, seed)?;
    Ok((ds.select_rows(&train), ds.select_rows(&test)))
}

/// Row indices of the split made by [`split_train_test`], each part sorted.
pub fn split_indices(n: usize, train_fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::config(
            "train_fraction",
            format!("must lie in (0, 1), got {train_fraction}"),
        ));
    }
    let n_train = (train_fraction * n as f64).round() as usize;
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut rng::stream(seed, tag::SPLIT));
    let mut test = idx.split_off(n_train);
    idx.sort_unstable();
    test.sort_unstable();
    Ok((idx, test))
}

/// Restrict the disadvantaged group to a fraction `p_disadv` of the rows,
/// keeping the result as large as the group counts permit.
pub fn apply_proportion_filter(
    ds: &TabularDataset,
    p_disadv: f64,
    seed: u64,
) -> Result<TabularDataset> {
    if !(p_disadv > 0.0 && p_disadv <= 0.5) {
        return Err(Error::config(
            "p_disadv",
            format!("must lie in (0, 0.5], got {p_disadv}"),
        ));
    }
    restrict_group_share(ds, DISADVANTAGED, p_disadv, seed)
}

/// Subsample so that `group` makes up `share` of the rows (to within one row).
///
/// Rows are drawn uniformly without replacement inside each group and the
/// largest feasible total is kept.
pub fn restrict_group_share(
    ds: &TabularDataset,
    group: u8,
    share: f64,
    seed: u64,
) -> Result<TabularDataset> {
    if !(share > 0.0 && share < 1.0) {
        return Err(Error::config("share", format!("must lie in (0, 1), got {share}")));
    }
    let target = ds.group_indices(group);
    let other = ds.group_indices(1 - group);
    let (nt, no) = (target.len(), other.len());
    if nt == 0 || no == 0 {
        return Err(Error::Sampling(format!(
            "both groups must be present: group {group} has {nt} rows, the other {no}"
        )));
    }
    let total = (nt as f64 / share).min(no as f64 / (1.0 - share)).floor() as usize;
    let keep_t = ((share * total as f64).round() as usize).min(nt);
    let keep_o = (total - keep_t).min(no);
    if keep_t == 0 || keep_o == 0 {
        return Err(Error::Sampling(format!(
            "share {share} infeasible with {nt} rows in group {group} and {no} in the other"
        )));
    }
    let mut rng = rng::stream(seed, tag::PROPORTION);
    let mut chosen = pick(&target, keep_t, &mut rng);
    chosen.extend(pick(&other, keep_o, &mut rng));
    chosen.sort_unstable();
    Ok(ds.select_rows(&chosen))
}

/// Keep a uniform fraction `fraction` of `group`'s rows; the other group is untouched.
pub fn subsample_group(
    ds: &TabularDataset,
    group: u8,
    fraction: f64,
    seed: u64,
) -> Result<TabularDataset> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::config("fraction", format!("must lie in (0, 1], got {fraction}")));
    }
    let target = ds.group_indices(group);
    let keep = (fraction * target.len() as f64).round() as usize;
    if keep == 0 {
        return Err(Error::Sampling(format!(
            "fraction {fraction} of {} rows leaves group {group} empty",
            target.len()
        )));
    }
    let mut chosen = pick(&target, keep, &mut rng::stream(seed, tag::PROPORTION));
    chosen.extend(ds.group_indices(1 - group));
    chosen.sort_unstable();
    Ok(ds.select_rows(&chosen))
}

fn pick(pool: &[usize], k: usize, rng: &mut impl rand::Rng) -> Vec<usize> {
    let mut v = pool.to_vec();
    v.shuffle(rng);
    v.truncate(k);
    v
}

/// Linear-interpolation quantile (numpy's default) of unsorted values.
pub fn empirical_quantile(values: &[f64], q: f64) -> Option<f64> {
    if values.is_empty() || !(0.0..=1.0).contains(&q) {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = q * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    Some(v[lo] + (pos - lo as f64) * (v[hi] - v[lo]))
}

/// Result of truncating the disadvantaged group's `L` range.
#[derive(Debug, Clone)]
pub struct CovariateShift {
    pub dataset: TabularDataset,
    /// Rows of the disadvantaged group with `L` below this were removed;
    /// `-inf` when nothing was removed.
    pub threshold: f64,
}

/// Remove disadvantaged rows whose `L` lies below the `(1 - overlap)`-quantile
/// of `L` in that group, so that only the top `overlap` share of its range stays.
pub fn apply_covariate_shift(ds: &TabularDataset, overlap: f64) -> Result<CovariateShift> {
    if !(overlap > 0.0 && overlap <= 1.0) {
        return Err(Error::config("overlap", format!("must lie in (0, 1], got {overlap}")));
    }
    let l = ds.column("L")?;
    let disadv = ds.group_indices(DISADVANTAGED);
    if disadv.is_empty() {
        return Err(Error::Sampling("disadvantaged group is empty".into()));
    }
    if overlap == 1.0 {
        return Ok(CovariateShift {
            dataset: ds.clone(),
            threshold: f64::NEG_INFINITY,
        });
    }
    let values: Vec<f64> = disadv.iter().map(|&i| l[i]).collect();
    let t = empirical_quantile(&values, 1.0 - overlap).expect("non-empty");
    let keep: Vec<usize> = (0..ds.n_rows())
        .filter(|&i| ds.sensitive()[i] == ADVANTAGED || l[i] >= t)
        .collect();
    Ok(CovariateShift {
        dataset: ds.select_rows(&keep),
        threshold: t,
    })
}
