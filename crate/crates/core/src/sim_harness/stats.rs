//! Proportions with normal-approximation bands, and chi-square tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Width of the reported confidence band, in standard deviations.
pub const CI_SIGMAS: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Proportion {
    pub successes: u64,
    pub trials: u64,
}

impl Proportion {
    pub fn new(successes: u64, trials: u64) -> Self {
        assert!(successes <= trials, "{successes} successes in {trials} trials");
        Self { successes, trials }
    }

    pub fn record(&mut self, success: bool) {
        self.trials += 1;
        self.successes += u64::from(success);
    }

    pub fn merge(self, other: Self) -> Self {
        Self::new(self.successes + other.successes, self.trials + other.trials)
    }

    pub fn rate(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.successes as f64 / self.trials as f64
        }
    }

    /// `rate ± 3·sqrt(rate(1-rate)/n)`, clipped to `[0, 1]`.
    pub fn ci(&self) -> (f64, f64) {
        let p = self.rate();
        if self.trials == 0 {
            return (0.0, 1.0);
        }
        let half = CI_SIGMAS * (p * (1.0 - p) / self.trials as f64).sqrt();
        ((p - half).max(0.0), (p + half).min(1.0))
    }

    /// Standard deviation of the sample rate if the true rate were `p`.
    pub fn sigma_under(&self, p: f64) -> f64 {
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }

    /// `|rate - p| <= k·σ(p)`. For `p ∈ {0, 1}` this is exact equality.
    pub fn within(&self, p: f64, k: f64) -> bool {
        (self.rate() - p).abs() <= k * self.sigma_under(p) + 1e-12
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: u64,
    pub p_value: f64,
}

fn upper_tail(statistic: f64, dof: u64) -> f64 {
    if dof == 0 {
        return 1.0;
    }
    let dist = ChiSquared::new(dof as f64).expect("positive degrees of freedom");
    1.0 - dist.cdf(statistic)
}

/// Two-sample homogeneity test on histograms over the same bins. Bins empty
/// in both samples are dropped.
pub fn chi_square_homogeneity(a: &[u64], b: &[u64]) -> ChiSquare {
    assert_eq!(a.len(), b.len(), "histograms over different bins");
    let na: u64 = a.iter().sum();
    let nb: u64 = b.iter().sum();
    let n = (na + nb) as f64;
    let mut statistic = 0.0;
    let mut bins = 0u64;
    for (&x, &y) in a.iter().zip(b) {
        let col = (x + y) as f64;
        if col == 0.0 {
            continue;
        }
        bins += 1;
        for (obs, total) in [(x, na), (y, nb)] {
            let expected = total as f64 * col / n;
            statistic += (obs as f64 - expected).powi(2) / expected;
        }
    }
    let dof = bins.saturating_sub(1);
    ChiSquare {
        statistic,
        dof,
        p_value: upper_tail(statistic, dof),
    }
}

/// Goodness of fit against the uniform distribution over all bins.
pub fn chi_square_uniform(observed: &[u64]) -> ChiSquare {
    let n: u64 = observed.iter().sum();
    let expected = n as f64 / observed.len() as f64;
    let statistic = observed
        .iter()
        .map(|&o| (o as f64 - expected).powi(2) / expected)
        .sum();
    let dof = observed.len() as u64 - 1;
    ChiSquare {
        statistic,
        dof,
        p_value: upper_tail(statistic, dof),
    }
}

/// Draws `n` Bernoulli(`p`) samples from a seeded stream and checks that the
/// observed rate lies within the 3σ band around `p`.
pub fn bernoulli_self_test(p: f64, n: u64, seed: u64) -> (Proportion, bool) {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut prop = Proportion::default();
    for _ in 0..n {
        prop.record(rng.random_bool(p));
    }
    (prop, prop.within(p, CI_SIGMAS))
}
