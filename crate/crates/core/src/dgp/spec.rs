use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Objective {
    SampleSize,
    CovariateShift,
    ConceptShift,
    OmittedVariable,
}

impl Objective {
    pub const ALL: [Objective; 4] = [
        Objective::SampleSize,
        Objective::CovariateShift,
        Objective::ConceptShift,
        Objective::OmittedVariable,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Objective::SampleSize => "sample-size",
            Objective::CovariateShift => "covariate-shift",
            Objective::ConceptShift => "concept-shift",
            Objective::OmittedVariable => "omitted-variable",
        }
    }

    /// 1-based objective number.
    pub fn number(self) -> u8 {
        match self {
            Objective::SampleSize => 1,
            Objective::CovariateShift => 2,
            Objective::ConceptShift => 3,
            Objective::OmittedVariable => 4,
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "1" | "sample-size" | "samplesize" | "proportion" => Ok(Objective::SampleSize),
            "2" | "covariate-shift" | "covariateshift" | "overlap" => Ok(Objective::CovariateShift),
            "3" | "concept-shift" | "conceptshift" | "concept" => Ok(Objective::ConceptShift),
            "4" | "omitted-variable" | "omittedvariable" | "omitted" => {
                Ok(Objective::OmittedVariable)
            }
            other => Err(Error::config("objective", format!("unknown objective `{other}`"))),
        }
    }
}

/// Full parameterization of one synthetic data-generating process.
///
/// `outcome_coeffs` layout depends on the objective:
///
/// | objective        | layout                              | default              |
/// |------------------|-------------------------------------|----------------------|
/// | sample size / covariate shift | `[c_C, c_L, intercept]` | `[0.5, -1.5, 0.5]`   |
/// | concept shift    | `[c_C, c_L, c_AL, intercept]`       | `[0.5, -1.0, 1.5, -0.2]` |
/// | omitted variable | `[c_L, intercept]` (`alpha` is `c_C`) | `[1.0, -0.2]`      |
#[derive(Debug, Clone, PartialEq)]
pub struct DataGenSpec {
    pub objective: Objective,
    pub n: usize,
    pub coef_l_on_a: f64,
    pub coef_l_on_c: f64,
    pub noise_sd_l: f64,
    pub outcome_coeffs: Vec<f64>,
    /// Concept-shift strength, concept-shift objective only.
    pub beta: Option<f64>,
    /// Direct effect of `C`, omitted-variable objective only.
    pub alpha: Option<f64>,
    pub prob_low: f64,
    pub prob_high: f64,
    pub seed: u64,
}

impl DataGenSpec {
    /// Defaults for `objective` at population size 20000.
    pub fn new(objective: Objective, seed: u64) -> Self {
        let (coef_l_on_a, noise_sd_l, outcome_coeffs, beta, alpha) = match objective {
            Objective::SampleSize | Objective::CovariateShift => {
                (0.7, 0.5, vec![0.5, -1.5, 0.5], None, None)
            }
            Objective::ConceptShift => (0.7, 0.1, vec![0.5, -1.0, 1.5, -0.2], Some(-0.5), None),
            Objective::OmittedVariable => (0.3, 0.5, vec![1.0, -0.2], None, Some(1.0)),
        };
        DataGenSpec {
            objective,
            n: 20_000,
            coef_l_on_a,
            coef_l_on_c: 0.3,
            noise_sd_l,
            outcome_coeffs,
            beta,
            alpha,
            prob_low: 0.1,
            prob_high: 0.9,
            seed,
        }
    }

    pub fn with_n(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = Some(beta);
        self
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = Some(alpha);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn expected_coeff_len(&self) -> usize {
        match self.objective {
            Objective::SampleSize | Objective::CovariateShift => 3,
            Objective::ConceptShift => 4,
            Objective::OmittedVariable => 2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 10 {
            return Err(Error::config("n", format!("must be at least 10, got {}", self.n)));
        }
        for (name, p) in [("prob_low", self.prob_low), ("prob_high", self.prob_high)] {
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::config(name, format!("must lie in (0, 1), got {p}")));
            }
        }
        if self.prob_low >= self.prob_high {
            return Err(Error::config("prob_low", "must be below prob_high"));
        }
        if !(self.noise_sd_l >= 0.0 && self.noise_sd_l.is_finite()) {
            return Err(Error::config("noise_sd_l", "must be finite and non-negative"));
        }
        for (name, v) in [("coef_l_on_a", self.coef_l_on_a), ("coef_l_on_c", self.coef_l_on_c)] {
            if !v.is_finite() {
                return Err(Error::config(name, "must be finite"));
            }
        }
        if self.outcome_coeffs.len() != self.expected_coeff_len() {
            return Err(Error::config(
                "outcome_coeffs",
                format!(
                    "{} expects {} coefficients, got {}",
                    self.objective,
                    self.expected_coeff_len(),
                    self.outcome_coeffs.len()
                ),
            ));
        }
        if self.outcome_coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::config("outcome_coeffs", "must be finite"));
        }
        match (self.objective, self.beta) {
            (Objective::ConceptShift, None) => {
                return Err(Error::config("beta", "required for the concept-shift objective"))
            }
            (Objective::ConceptShift, Some(b)) if !b.is_finite() => {
                return Err(Error::config("beta", "must be finite"))
            }
            (Objective::ConceptShift, _) => {}
            (_, Some(_)) => {
                return Err(Error::config("beta", "only valid for the concept-shift objective"))
            }
            (_, None) => {}
        }
        match (self.objective, self.alpha) {
            (Objective::OmittedVariable, None) => {
                return Err(Error::config("alpha", "required for the omitted-variable objective"))
            }
            (Objective::OmittedVariable, Some(a)) if !a.is_finite() => {
                return Err(Error::config("alpha", "must be finite"))
            }
            (Objective::OmittedVariable, _) => {}
            (_, Some(_)) => {
                return Err(Error::config("alpha", "only valid for the omitted-variable objective"))
            }
            (_, None) => {}
        }
        Ok(())
    }

    /// Outcome index `i` for one individual.
    pub fn outcome_index(&self, a: f64, c: f64, l: f64) -> f64 {
        let k = &self.outcome_coeffs;
        match self.objective {
            Objective::SampleSize | Objective::CovariateShift => k[0] * c + k[1] * l + k[2],
            Objective::ConceptShift => {
                let beta = self.beta.unwrap_or(0.0);
                k[0] * c + k[1] * l + k[2] * a * l + beta * (1.0 - a) * l + k[3]
            }
            Objective::OmittedVariable => self.alpha.unwrap_or(0.0) * c + k[0] * l + k[1],
        }
    }

    /// Override one field from its textual `key=value` form.
    pub fn set_param(&mut self, key: &str, value: &str) -> Result<()> {
        let num = || -> Result<f64> {
            value
                .trim()
                .parse::<f64>()
                .map_err(|_| Error::config(key, format!("not a number: `{value}`")))
        };
        match key.trim() {
            "objective" => self.objective = value.parse()?,
            "n" => {
                self.n = value
                    .trim()
                    .parse()
                    .map_err(|_| Error::config("n", format!("not an integer: `{value}`")))?
            }
            "seed" => {
                self.seed = value
                    .trim()
                    .parse()
                    .map_err(|_| Error::config("seed", format!("not an integer: `{value}`")))?
            }
            "coef_l_on_a" => self.coef_l_on_a = num()?,
            "coef_l_on_c" => self.coef_l_on_c = num()?,
            "noise_sd_l" => self.noise_sd_l = num()?,
            "prob_low" => self.prob_low = num()?,
            "prob_high" => self.prob_high = num()?,
            "beta" => self.beta = parse_optional(key, value)?,
            "alpha" => self.alpha = parse_optional(key, value)?,
            "outcome_coeffs" => {
                self.outcome_coeffs = value
                    .split(',')
                    .map(|s| {
                        s.trim().parse::<f64>().map_err(|_| {
                            Error::config("outcome_coeffs", format!("not a number: `{s}`"))
                        })
                    })
                    .collect::<Result<_>>()?
            }
            other => return Err(Error::config(other, "unknown data-generation parameter")),
        }
        Ok(())
    }

    /// `key=value` form, one entry per field, in a stable order.
    pub fn to_params(&self) -> BTreeMap<&'static str, String> {
        let opt = |v: Option<f64>| v.map_or_else(|| "none".to_string(), |v| v.to_string());
        let coeffs = self
            .outcome_coeffs
            .iter()
            .map(f64::to_string)
            .collect::<Vec<_>>()
            .join(",");
        BTreeMap::from([
            ("objective", self.objective.to_string()),
            ("n", self.n.to_string()),
            ("coef_l_on_a", self.coef_l_on_a.to_string()),
            ("coef_l_on_c", self.coef_l_on_c.to_string()),
            ("noise_sd_l", self.noise_sd_l.to_string()),
            ("outcome_coeffs", coeffs),
            ("beta", opt(self.beta)),
            ("alpha", opt(self.alpha)),
            ("prob_low", self.prob_low.to_string()),
            ("prob_high", self.prob_high.to_string()),
            ("seed", self.seed.to_string()),
        ])
    }

    /// Rebuild a spec from [`DataGenSpec::to_params`] output.
    pub fn from_params<'a>(params: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<Self> {
        let params: Vec<_> = params.into_iter().collect();
        let objective = params
            .iter()
            .find(|(k, _)| *k == "objective")
            .ok_or_else(|| Error::config("objective", "missing"))?
            .1
            .parse()?;
        let mut spec = DataGenSpec::new(objective, 0);
        spec.beta = None;
        spec.alpha = None;
        for (k, v) in params {
            if k != "objective" {
                spec.set_param(k, v)?;
            }
        }
        spec.validate()?;
        Ok(spec)
    }
}

fn parse_optional(key: &str, value: &str) -> Result<Option<f64>> {
    match value.trim() {
        "none" | "" => Ok(None),
        v => v
            .parse()
            .map(Some)
            .map_err(|_| Error::config(key, format!("not a number: `{v}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        for obj in Objective::ALL {
            DataGenSpec::new(obj, 1).validate().unwrap();
        }
    }

    #[test]
    fn rejects_bad_fields_by_name() {
        let mut s = DataGenSpec::new(Objective::SampleSize, 1);
        s.prob_low = 0.95;
        match s.validate() {
            Err(Error::Config { field, .. }) => assert_eq!(field, "prob_low"),
            other => panic!("unexpected {other:?}"),
        }
        let s = DataGenSpec::new(Objective::SampleSize, 1).with_n(5);
        assert!(matches!(s.validate(), Err(Error::Config { field, .. }) if field == "n"));
        let s = DataGenSpec::new(Objective::SampleSize, 1).with_beta(0.5);
        assert!(matches!(s.validate(), Err(Error::Config { field, .. }) if field == "beta"));
        let mut s = DataGenSpec::new(Objective::OmittedVariable, 1);
        s.alpha = None;
        assert!(matches!(s.validate(), Err(Error::Config { field, .. }) if field == "alpha"));
    }

    #[test]
    fn params_round_trip() {
        let spec = DataGenSpec::new(Objective::ConceptShift, 99).with_beta(1.5).with_n(123);
        let params = spec.to_params();
        let back =
            DataGenSpec::from_params(params.iter().map(|(k, v)| (*k, v.as_str()))).unwrap();
        assert_eq!(spec, back);
    }

    #[test]
    fn objective_parses_from_number_and_name() {
        assert_eq!("2".parse::<Objective>().unwrap(), Objective::CovariateShift);
        assert_eq!("concept-shift".parse::<Objective>().unwrap(), Objective::ConceptShift);
        assert!("5".parse::<Objective>().is_err());
    }
}
