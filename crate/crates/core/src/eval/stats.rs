use statrs::distribution::{ChiSquared, ContinuousCDF, StudentsT};

use crate::datagen::Distribution;
use crate::error::{Error, Result};
use crate::summary::Item;

/// Mean of repeated runs with the half width of its two-sided 95% Student t
/// confidence interval.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CiSummary {
    pub mean: f64,
    pub half_width: f64,
    pub runs: usize,
}

impl CiSummary {
    pub fn lower(&self) -> f64 {
        self.mean - self.half_width
    }

    pub fn upper(&self) -> f64 {
        self.mean + self.half_width
    }
}

/// Quantile of Student's t distribution with `dof` degrees of freedom.
pub fn t_quantile(p: f64, dof: f64) -> f64 {
    StudentsT::new(0.0, 1.0, dof)
        .expect("positive degrees of freedom")
        .inverse_cdf(p)
}

pub fn confidence_interval(samples: &[f64]) -> Result<CiSummary> {
    let m = samples.len();
    if m < 2 {
        return Err(Error::TooFewSamples(m));
    }
    let mean = samples.iter().sum::<f64>() / m as f64;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1) as f64;
    let half_width = if var == 0.0 {
        0.0
    } else {
        t_quantile(0.975, (m - 1) as f64) * (var / m as f64).sqrt()
    };
    Ok(CiSummary {
        mean,
        half_width,
        runs: m,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GofResult {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson chi-squared test of observed counts against expected counts.
pub fn chi_squared_gof(observed: &[u64], expected: &[f64]) -> GofResult {
    assert_eq!(observed.len(), expected.len());
    assert!(observed.len() >= 2, "need at least two bins");
    let statistic = observed
        .iter()
        .zip(expected)
        .map(|(&o, &e)| (o as f64 - e).powi(2) / e)
        .sum::<f64>();
    let dof = observed.len() - 1;
    let p_value = 1.0 - ChiSquared::new(dof as f64).expect("dof >= 1").cdf(statistic);
    GofResult {
        statistic,
        dof,
        p_value,
    }
}

/// Chi-squared fit of a stream's rank counts to `dist` over ranks `1..=top`,
/// with every rank beyond `top` pooled into one tail bin. Trailing ranks whose
/// expected count is below 5 are folded into the tail as well.
pub fn rank_goodness_of_fit(dist: &Distribution, stream: &[Item], top: usize) -> Result<GofResult> {
    let n = stream.len() as f64;
    let top = top.min(dist.spec().universe as usize);
    let mut observed = vec![0u64; top + 1];
    for item in stream {
        let rank = item.0 as usize;
        observed[if rank <= top { rank - 1 } else { top }] += 1;
    }
    let mut expected = Vec::with_capacity(top + 1);
    for x in 1..=top as u64 {
        expected.push(n * dist.probability(x)?);
    }
    let head: f64 = expected.iter().sum();
    expected.push((n - head).max(0.0));

    while observed.len() > 2 && expected[expected.len() - 2] < 5.0 {
        let last = observed.len() - 1;
        observed[last - 1] += observed[last];
        expected[last - 1] += expected[last];
        observed.pop();
        expected.pop();
    }
    if expected.last().copied().unwrap_or(0.0) < 5.0 && observed.len() > 2 {
        let last = observed.len() - 1;
        observed[last - 1] += observed[last];
        expected[last - 1] += expected[last];
        observed.pop();
        expected.pop();
    }
    Ok(chi_squared_gof(&observed, &expected))
}
