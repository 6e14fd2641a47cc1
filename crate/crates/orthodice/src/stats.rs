//! Statistical helpers shared by the Monte Carlo engine, the application
//! studies, and the test suite: sample moments with standard errors, a
//! chi-square goodness-of-fit test, and a Kolmogorov-Smirnov test.

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// First four central sample moments of a batch of replicates, with the
/// standard errors needed to judge Monte Carlo agreement.
#[derive(Debug, Clone, Copy)]
pub struct SampleMoments {
    n: usize,
    mean: f64,
    m2: f64,
    m4: f64,
}

impl SampleMoments {
    /// Two-pass computation (exactness over speed; replicate counts are
    /// modest and the second pass avoids catastrophic cancellation).
    pub fn from_slice(values: &[f64]) -> Self {
        let n = values.len();
        assert!(n >= 2, "need at least two replicates");
        let mean = values.iter().sum::<f64>() / n as f64;
        let (mut m2, mut m4) = (0.0, 0.0);
        for v in values {
            let d = v - mean;
            let d2 = d * d;
            m2 += d2;
            m4 += d2 * d2;
        }
        SampleMoments {
            n,
            mean,
            m2: m2 / n as f64,
            m4: m4 / n as f64,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        self.m2 * self.n as f64 / (self.n as f64 - 1.0)
    }

    /// Standard error of the mean.
    pub fn mean_se(&self) -> f64 {
        (self.variance() / self.n as f64).sqrt()
    }

    /// Standard error of the sample variance, from
    /// `Var(s^2) = (mu4 - sigma^4 (n-3)/(n-1)) / n` with empirical central
    /// moments plugged in.
    pub fn variance_se(&self) -> f64 {
        let n = self.n as f64;
        let s2 = self.variance();
        ((self.m4 - s2 * s2 * (n - 3.0) / (n - 1.0)) / n).max(0.0).sqrt()
    }
}

/// Sample covariance of paired replicates with its standard error
/// (`Var(s_xy) ~ (m22 - s_xy^2)/n`, `m22` the empirical `E[(X-mx)^2(Y-my)^2]`).
pub fn sample_covariance(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    assert_eq!(xs.len(), ys.len(), "paired samples must align");
    let n = xs.len();
    assert!(n >= 2, "need at least two replicates");
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let (mut sxy, mut m22) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        m22 += dx * dx * dy * dy;
    }
    let cov = sxy / (n as f64 - 1.0);
    m22 /= n as f64;
    let se = ((m22 - cov * cov).max(0.0) / n as f64).sqrt();
    (cov, se)
}

/// Standardized deviation `(estimate - reference) / se`.
pub fn z_score(estimate: f64, reference: f64, se: f64) -> f64 {
    (estimate - reference) / se
}

/// Result of a chi-square goodness-of-fit test.
#[derive(Debug, Clone, Copy)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub df: u64,
    pub p_value: f64,
}

/// Pearson chi-square test of observed counts against expected cell
/// probabilities. `total` is the number of draws; any draws outside the
/// listed cells (`total - sum(observed)`, with probability
/// `1 - sum(expected_probs)`) form an implicit leftover cell. Cells are
/// accumulated left to right and pooled so every pooled cell has expected
/// count `>= min_expected`; a trailing remainder merges into the last cell.
pub fn chi_square_gof(
    observed: &[u64],
    expected_probs: &[f64],
    total: u64,
    min_expected: f64,
) -> ChiSquareTest {
    assert_eq!(observed.len(), expected_probs.len());
    let listed: u64 = observed.iter().sum();
    assert!(listed <= total, "observed counts exceed total draws");
    let nf = total as f64;
    let leftover_prob = (1.0 - expected_probs.iter().sum::<f64>()).max(0.0);
    // Pool adjacent cells until each pooled expectation clears the floor.
    let mut cells: Vec<(f64, f64)> = Vec::new(); // (observed, expected)
    let (mut obs_acc, mut exp_acc) = (0.0, 0.0);
    for (&o, &p) in observed.iter().zip(expected_probs) {
        obs_acc += o as f64;
        exp_acc += p * nf;
        if exp_acc >= min_expected {
            cells.push((obs_acc, exp_acc));
            obs_acc = 0.0;
            exp_acc = 0.0;
        }
    }
    obs_acc += (total - listed) as f64;
    exp_acc += leftover_prob * nf;
    if exp_acc > 0.0 || obs_acc > 0.0 {
        if let Some(last) = cells.last_mut() {
            last.0 += obs_acc;
            last.1 += exp_acc;
        } else {
            cells.push((obs_acc, exp_acc));
        }
    }
    assert!(cells.len() >= 2, "chi-square needs at least two pooled cells");
    let statistic: f64 = cells
        .iter()
        .map(|(o, e)| {
            let d = o - e;
            d * d / e
        })
        .sum();
    let df = cells.len() as u64 - 1;
    let dist = ChiSquared::new(df as f64).expect("df >= 1");
    ChiSquareTest {
        statistic,
        df,
        p_value: 1.0 - dist.cdf(statistic),
    }
}

/// Result of a one-sample Kolmogorov-Smirnov test.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct KsTest {
    pub statistic: f64,
    pub n: usize,
    /// 1% critical value `1.628 / sqrt(n)` (asymptotic).
    pub critical_1pct: f64,
    pub passes_1pct: bool,
}

/// One-sample KS test of `samples` against the continuous CDF `cdf`.
pub fn ks_test(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> KsTest {
    let n = samples.len();
    assert!(n >= 1, "KS test needs samples");
    samples.sort_by(|a, b| a.partial_cmp(b).expect("no NaN samples"));
    let nf = n as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in samples.iter().enumerate() {
        let f = cdf(x);
        d = d.max((f - i as f64 / nf).abs());
        d = d.max((f - (i as f64 + 1.0) / nf).abs());
    }
    let critical = 1.628 / nf.sqrt();
    KsTest {
        statistic: d,
        n,
        critical_1pct: critical,
        passes_1pct: d < critical,
    }
}
