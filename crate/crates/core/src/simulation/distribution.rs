use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::pruning::stream_rng;
use crate::simulation::stats::{mean, population_variance};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MixtureComponent {
    pub mean: f64,
    pub std_dev: f64,
    pub weight: f64,
}

/// Source of synthetic training-WER populations.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SyntheticDistribution {
    Uniform {
        low: f64,
        high: f64,
    },
    GaussianMixture {
        components: Vec<MixtureComponent>,
    },
    /// A fixed population; `n` is ignored when drawing from it.
    Empirical {
        scores: Vec<f64>,
    },
}

impl SyntheticDistribution {
    pub fn uniform(low: f64, high: f64) -> Result<Self> {
        if !(low.is_finite() && high.is_finite() && low < high) {
            return Err(Error::InvalidConfig(format!(
                "uniform needs low < high, got [{low}, {high}]"
            )));
        }
        Ok(SyntheticDistribution::Uniform { low, high })
    }

    pub fn mixture(components: Vec<MixtureComponent>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidConfig(
                "mixture needs at least one component".into(),
            ));
        }
        if components
            .iter()
            .any(|c| !(c.std_dev >= 0.0 && c.weight > 0.0 && c.mean.is_finite()))
        {
            return Err(Error::InvalidConfig(
                "mixture components need finite means, sd >= 0 and positive weights".into(),
            ));
        }
        let total: f64 = components.iter().map(|c| c.weight).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidConfig(format!(
                "mixture weights sum to {total}, not 1"
            )));
        }
        Ok(SyntheticDistribution::GaussianMixture { components })
    }

    /// Equal-weight mixture of `(mean, sd)` pairs.
    pub fn equal_mixture(params: &[(f64, f64)]) -> Result<Self> {
        let w = 1.0 / params.len().max(1) as f64;
        Self::mixture(
            params
                .iter()
                .map(|&(mean, std_dev)| MixtureComponent {
                    mean,
                    std_dev,
                    weight: w,
                })
                .collect(),
        )
    }

    pub fn empirical(scores: Vec<f64>) -> Result<Self> {
        if scores.is_empty() || scores.iter().any(|s| !s.is_finite()) {
            return Err(Error::InvalidConfig(
                "empirical population must be non-empty and finite".into(),
            ));
        }
        Ok(SyntheticDistribution::Empirical { scores })
    }

    /// `count` copies of `low` plus one `high` value.
    pub fn single_outlier(count: usize, low: f64, high: f64) -> Self {
        let mut scores = vec![low; count];
        scores.push(high);
        SyntheticDistribution::Empirical { scores }
    }

    /// Distribution mean.
    pub fn mean(&self) -> f64 {
        match self {
            SyntheticDistribution::Uniform { low, high } => (low + high) / 2.0,
            SyntheticDistribution::GaussianMixture { components } => {
                components.iter().map(|c| c.weight * c.mean).sum()
            }
            SyntheticDistribution::Empirical { scores } => mean(scores),
        }
    }

    /// Distribution standard deviation.
    pub fn std_dev(&self) -> f64 {
        match self {
            SyntheticDistribution::Uniform { low, high } => (high - low) / 12f64.sqrt(),
            SyntheticDistribution::GaussianMixture { components } => {
                let mu = self.mean();
                components
                    .iter()
                    .map(|c| c.weight * (c.std_dev * c.std_dev + (c.mean - mu).powi(2)))
                    .sum::<f64>()
                    .sqrt()
            }
            SyntheticDistribution::Empirical { scores } => population_variance(scores).sqrt(),
        }
    }

    /// A finite population of `n` scores. Mixture components receive
    /// `weight * n` members each (largest remainder), so strata sizes are
    /// fixed rather than random.
    pub fn population(&self, n: usize, seed: u64) -> Result<Vec<f64>> {
        let mut rng = stream_rng(seed, u64::MAX);
        match self {
            SyntheticDistribution::Empirical { scores } => Ok(scores.clone()),
            SyntheticDistribution::Uniform { low, high } => {
                Ok((0..n).map(|_| rng.random_range(*low..*high)).collect())
            }
            SyntheticDistribution::GaussianMixture { components } => {
                let sizes = component_sizes(components, n);
                let mut out = Vec::with_capacity(n);
                for (c, size) in components.iter().zip(sizes) {
                    let normal = Normal::new(c.mean, c.std_dev)
                        .map_err(|e| Error::InvalidConfig(e.to_string()))?;
                    out.extend((0..size).map(|_| normal.sample(&mut rng)));
                }
                Ok(out)
            }
        }
    }
}

fn component_sizes(components: &[MixtureComponent], n: usize) -> Vec<usize> {
    let exact: Vec<f64> = components.iter().map(|c| c.weight * n as f64).collect();
    let mut sizes: Vec<usize> = exact.iter().map(|x| x.floor() as usize).collect();
    let mut left = n - sizes.iter().sum::<usize>();
    let mut order: Vec<usize> = (0..components.len()).collect();
    order.sort_by(|&a, &b| {
        (exact[b] - exact[b].floor())
            .total_cmp(&(exact[a] - exact[a].floor()))
            .then(a.cmp(&b))
    });
    for i in order.into_iter().cycle() {
        if left == 0 {
            break;
        }
        sizes[i] += 1;
        left -= 1;
    }
    sizes
}

impl FromStr for SyntheticDistribution {
    type Err = Error;

    /// `uniform:LOW,HIGH`, `mixture:MEAN/SD/WEIGHT;MEAN/SD/WEIGHT;...`,
    /// `values:V1,V2,...`, `outlier` (ninety-nine zeros and one ten) or
    /// `bimodal` (equal mixture of N(0.2, 0.04) and N(0.8, 0.04)).
    fn from_str(text: &str) -> Result<Self> {
        let bad = |what: &str| Error::InvalidConfig(format!("bad distribution `{text}`: {what}"));
        let num = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| bad("expected a number"))
        };
        let (kind, args) = text.split_once(':').unwrap_or((text, ""));
        match kind.trim() {
            "outlier" => Ok(Self::single_outlier(99, 0.0, 10.0)),
            "bimodal" => Self::equal_mixture(&[(0.2, 0.04), (0.8, 0.04)]),
            "uniform" => {
                let (lo, hi) = args
                    .split_once(',')
                    .ok_or_else(|| bad("uniform:LOW,HIGH"))?;
                Self::uniform(num(lo)?, num(hi)?)
            }
            "mixture" => {
                let components = args
                    .split(';')
                    .map(|c| {
                        let parts: Vec<&str> = c.split('/').collect();
                        match parts.as_slice() {
                            [m, s, w] => Ok(MixtureComponent {
                                mean: num(m)?,
                                std_dev: num(s)?,
                                weight: num(w)?,
                            }),
                            _ => Err(bad("component is MEAN/SD/WEIGHT")),
                        }
                    })
                    .collect::<Result<Vec<_>>>()?;
                Self::mixture(components)
            }
            "values" => Self::empirical(args.split(',').map(num).collect::<Result<Vec<_>>>()?),
            _ => Err(bad("unknown kind")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixture_moments() {
        let d = SyntheticDistribution::equal_mixture(&[(0.0, 0.0), (1.0, 0.0)]).unwrap();
        assert_eq!(d.mean(), 0.5);
        assert_eq!(d.std_dev(), 0.5);
        let pop = d.population(10, 1).unwrap();
        assert_eq!(pop.iter().filter(|&&x| x == 0.0).count(), 5);
        assert_eq!(pop.iter().filter(|&&x| x == 1.0).count(), 5);
    }

    #[test]
    fn weights_must_sum_to_one() {
        let c = |w| MixtureComponent {
            mean: 0.0,
            std_dev: 1.0,
            weight: w,
        };
        assert!(SyntheticDistribution::mixture(vec![c(0.5), c(0.4)]).is_err());
        assert!(SyntheticDistribution::mixture(vec![c(0.5), c(0.5)]).is_ok());
    }

    #[test]
    fn component_sizes_use_largest_remainder() {
        let c = |w| MixtureComponent {
            mean: 0.0,
            std_dev: 1.0,
            weight: w,
        };
        assert_eq!(
            component_sizes(&[c(1.0 / 3.0), c(1.0 / 3.0), c(1.0 / 3.0)], 10),
            [4, 3, 3]
        );
        assert_eq!(component_sizes(&[c(0.25), c(0.75)], 7), [2, 5]);
    }

    #[test]
    fn parsing() {
        assert_eq!(
            "uniform:0,1".parse::<SyntheticDistribution>().unwrap(),
            SyntheticDistribution::Uniform {
                low: 0.0,
                high: 1.0
            }
        );
        let m: SyntheticDistribution = "mixture:0/0.1/0.25;1/0.2/0.75".parse().unwrap();
        assert!(
            matches!(m, SyntheticDistribution::GaussianMixture { ref components } if components.len() == 2)
        );
        let o: SyntheticDistribution = "outlier".parse().unwrap();
        assert!(
            matches!(o, SyntheticDistribution::Empirical { ref scores } if scores.len() == 100)
        );
        assert!("uniform:1,0".parse::<SyntheticDistribution>().is_err());
        assert!("what".parse::<SyntheticDistribution>().is_err());
    }

    #[test]
    fn population_is_deterministic() {
        let d = SyntheticDistribution::uniform(0.0, 1.0).unwrap();
        assert_eq!(d.population(50, 3).unwrap(), d.population(50, 3).unwrap());
        assert_ne!(d.population(50, 3).unwrap(), d.population(50, 4).unwrap());
    }
}
