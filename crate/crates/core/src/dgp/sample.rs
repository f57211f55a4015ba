use ndarray::Array2;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{Column, DataGenSpec, Provenance, TabularDataset};
use crate::rng::{self, tag};
use crate::Result;

/// Outcome probability from the step function: `prob_low` below zero,
/// `prob_high` at or above it.
pub fn step_outcome_prob(i: f64, spec: &DataGenSpec) -> f64 {
    if i < 0.0 {
        spec.prob_low
    } else {
        spec.prob_high
    }
}

/// Draw a population of `spec.n` individuals with columns `[A, C, L]`.
///
/// Each variable has its own random stream, so e.g. changing `beta` leaves the
/// draws of `A`, `C` and `L` untouched.
pub fn sample_population(spec: &DataGenSpec) -> Result<TabularDataset> {
    spec.validate()?;
    let n = spec.n;
    let mut rng_a = rng::stream(spec.seed, tag::SENSITIVE);
    let mut rng_c = rng::stream(spec.seed, tag::COVARIATE_C);
    let mut rng_l = rng::stream(spec.seed, tag::NOISE_L);
    let mut rng_y = rng::stream(spec.seed, tag::OUTCOME);

    let mut x = Array2::<f64>::zeros((n, 3));
    let mut y = Vec::with_capacity(n);
    let mut sensitive = Vec::with_capacity(n);
    for mut row in x.rows_mut() {
        let a = u8::from(rng_a.random_bool(0.5));
        let c: f64 = rng_c.sample(StandardNormal);
        let z: f64 = rng_l.sample(StandardNormal);
        let af = f64::from(a);
        let l = spec.noise_sd_l * z + spec.coef_l_on_a * af + spec.coef_l_on_c * c;
        let p = step_outcome_prob(spec.outcome_index(af, c, l), spec);
        let u: f64 = rng_y.random();
        row[0] = af;
        row[1] = c;
        row[2] = l;
        y.push(u8::from(u < p));
        sensitive.push(a);
    }
    TabularDataset::new(
        vec![
            Column::binary("A"),
            Column::continuous("C"),
            Column::continuous("L"),
        ],
        x,
        y,
        sensitive,
        Provenance::Synthetic(spec.clone()),
    )
}
