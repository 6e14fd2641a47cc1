//! Exponential shot noise driven by a dice-counted batch of pulses.
//!
//! `K` pulses arrive at independent uniform times on `[0, T]`, and each
//! contributes a decaying exponential after its arrival. The superposition
//! at observation time `t` is the random-measure functional `Z_t = N(f_t)`
//! with pulse shape `f_t(x) = a·e^{−b(t−x)}·1{x ≤ t}`, so the
//! counting-measure moment formulas give, with `c = E K` and `ν` the
//! uniform law on `[0, T]`:
//!
//! ```text
//! E Z_t         = c·ν f_t
//! Var Z_t       = c·ν f_t²    + (Var K − c)·(ν f_t)²
//! Cov(Z_s, Z_t) = c·ν(f_s f_t) + (Var K − c)·(ν f_s)(ν f_t)
//! ```
//!
//! For an orthogonal count law `Var K = c`, only the first terms survive
//! and the covariance collapses to `c·a²(e^{−b|t−s|} − e^{−b(s+t)})/(2bT)`.
//! Every realization also satisfies the relaxation identity
//! `Z_t + b·∫₀ᵗ Z_s ds = a·N([0, t])` exactly, which
//! [`relaxation_residual`] verifies numerically on one seeded draw.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sim::{
    collect_values, sample_realization, samplers, CountLaw, Functional, MeasureModel,
};
use crate::stats::{sample_covariance, SampleMoments};

/// Pulse process parameters: count law, pulse amplitude `a`, decay rate `b`,
/// and time horizon `T`.
#[derive(Clone, Debug)]
pub struct ShotNoiseModel {
    count: CountLaw,
    amplitude: f64,
    decay: f64,
    horizon: f64,
}

impl ShotNoiseModel {
    pub fn new(count: CountLaw, amplitude: f64, decay: f64, horizon: f64) -> Result<Self> {
        for (name, v) in [
            ("amplitude", amplitude),
            ("decay", decay),
            ("horizon", horizon),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "pulse {name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(ShotNoiseModel {
            count,
            amplitude,
            decay,
            horizon,
        })
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn decay(&self) -> f64 {
        self.decay
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn count_law(&self) -> &CountLaw {
        &self.count
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if !t.is_finite() || t < 0.0 || t > self.horizon {
            return Err(Error::TimeOutOfRange(format!(
                "observation time {t} outside [0, {}]",
                self.horizon
            )));
        }
        Ok(())
    }

    /// Response at time `t` to a single pulse arrived at `x`.
    pub fn pulse(&self, t: f64, x: f64) -> f64 {
        if x <= t {
            self.amplitude * (-self.decay * (t - x)).exp()
        } else {
            0.0
        }
    }

    /// `ν f_t = a(1 − e^{−bt})/(bT)`.
    pub fn pulse_mean(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        let (a, b, tt) = (self.amplitude, self.decay, self.horizon);
        Ok(a * (1.0 - (-b * t).exp()) / (b * tt))
    }

    /// `ν f_t² = a²(1 − e^{−2bt})/(2bT)`.
    pub fn pulse_second_moment(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        let (a, b, tt) = (self.amplitude, self.decay, self.horizon);
        Ok(a * a * (1.0 - (-2.0 * b * t).exp()) / (2.0 * b * tt))
    }

    /// `ν(f_s f_t) = a²(e^{−b|t−s|} − e^{−b(s+t)})/(2bT)`.
    pub fn pulse_cross_moment(&self, s: f64, t: f64) -> Result<f64> {
        self.check_time(s)?;
        self.check_time(t)?;
        let (a, b, tt) = (self.amplitude, self.decay, self.horizon);
        Ok(a * a * ((-b * (t - s).abs()).exp() - (-b * (s + t)).exp()) / (2.0 * b * tt))
    }

    /// `E Z_t`.
    pub fn closed_mean(&self, t: f64) -> Result<f64> {
        Ok(self.count.mean() * self.pulse_mean(t)?)
    }

    /// `Var Z_t` for the model's count law.
    pub fn closed_variance(&self, t: f64) -> Result<f64> {
        let c = self.count.mean();
        let excess = self.count.variance() - c;
        let nu_f = self.pulse_mean(t)?;
        Ok(c * self.pulse_second_moment(t)? + excess * nu_f * nu_f)
    }

    /// `Cov(Z_s, Z_t)` for the model's count law.
    pub fn closed_covariance(&self, s: f64, t: f64) -> Result<f64> {
        let c = self.count.mean();
        let excess = self.count.variance() - c;
        Ok(c * self.pulse_cross_moment(s, t)? + excess * self.pulse_mean(s)? * self.pulse_mean(t)?)
    }

    /// The underlying random measure: `K` uniform arrival times on `[0, T]`.
    pub fn measure_model(&self) -> MeasureModel<f64> {
        let sampler = samplers::uniform_interval(0.0, self.horizon)
            .expect("horizon validated at construction");
        MeasureModel::new(self.count.clone(), sampler)
    }

    /// `Z_t` as a functional of arrival times, usable with any point model
    /// (e.g. a frozen single arrival for the exact-decay check).
    pub fn pulse_functional(&self, t: f64) -> Result<Functional<f64>> {
        self.check_time(t)?;
        let (a, b) = (self.amplitude, self.decay);
        Ok(Functional::new(format!("Z[{t}]"), move |&x: &f64, _| {
            if x <= t {
                a * (-b * (t - x)).exp()
            } else {
                0.0
            }
        }))
    }

    /// `N([0, t])`: the number of pulses arrived by `t`.
    pub fn arrival_counter(&self, t: f64) -> Result<Functional<f64>> {
        self.check_time(t)?;
        Ok(Functional::counting(
            format!("N[0,{t}]"),
            Arc::new(move |&x: &f64| x <= t),
        ))
    }
}

/// Evenly spaced observation times `i·T/n` for `i = 1..=n` (zero excluded:
/// `Z_0` is almost surely 0 and degenerate for variance estimates).
pub fn default_time_grid(horizon: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|i| horizon * i as f64 / n as f64).collect()
}

/// Closed-form and estimated moments at one observation time.
#[derive(Debug, Clone, Serialize)]
pub struct ShotNoisePoint {
    pub t: f64,
    pub closed_mean: f64,
    pub closed_variance: f64,
    /// `Cov(Z_t, Z_T_end)` against the last grid time, closed form.
    pub closed_covariance_with_end: f64,
    pub mean: f64,
    pub mean_se: f64,
    pub variance: f64,
    pub variance_se: f64,
    pub covariance_with_end: f64,
    pub covariance_with_end_se: f64,
}

/// Seeded replication study of the shot-noise curve on a time grid.
#[derive(Debug, Clone, Serialize)]
pub struct ShotNoiseSimReport {
    pub amplitude: f64,
    pub decay: f64,
    pub horizon: f64,
    pub mean_count: f64,
    pub count_variance: f64,
    pub n_replicates: u64,
    pub seed: u64,
    pub points: Vec<ShotNoisePoint>,
}

/// Estimate mean, variance, and covariance-with-endpoint of `Z_t` on `grid`
/// from `n_replicates` seeded realizations, next to their closed forms.
pub fn shotnoise_simulate(
    model: &ShotNoiseModel,
    grid: &[f64],
    n_replicates: u64,
    seed: u64,
) -> Result<ShotNoiseSimReport> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter(
            "observation grid must not be empty".into(),
        ));
    }
    if n_replicates < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 replicates, got {n_replicates}"
        )));
    }
    let functionals: Vec<Functional<f64>> = grid
        .iter()
        .map(|&t| model.pulse_functional(t))
        .collect::<Result<_>>()?;
    let cols = collect_values(&model.measure_model(), &functionals, n_replicates, seed);
    let end = cols.last().expect("grid is non-empty");
    let t_end = *grid.last().expect("grid is non-empty");
    let points = grid
        .iter()
        .zip(&cols)
        .map(|(&t, col)| {
            let m = SampleMoments::from_slice(col);
            let (cov, cov_se) = sample_covariance(col, end);
            Ok(ShotNoisePoint {
                t,
                closed_mean: model.closed_mean(t)?,
                closed_variance: model.closed_variance(t)?,
                closed_covariance_with_end: model.closed_covariance(t, t_end)?,
                mean: m.mean(),
                mean_se: m.mean_se(),
                variance: m.variance(),
                variance_se: m.variance_se(),
                covariance_with_end: cov,
                covariance_with_end_se: cov_se,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ShotNoiseSimReport {
        amplitude: model.amplitude,
        decay: model.decay,
        horizon: model.horizon,
        mean_count: model.count.mean(),
        count_variance: model.count.variance(),
        n_replicates,
        seed,
        points,
    })
}

/// Discretisation check of the relaxation identity on one realization.
#[derive(Debug, Clone, Serialize)]
pub struct RelaxationResidual {
    pub n_steps: usize,
    pub n_pulses: u64,
    pub seed: u64,
    /// `max_j |Z(t_j) + b·∫₀^{t_j} Z − a·N([0, t_j])|` with the integral by
    /// the trapezoid rule.
    pub max_abs_residual: f64,
}

/// Verify `Z_t + b·∫₀ᵗ Z_s ds = a·N([0, t])` on a seeded realization using
/// `n_steps` trapezoid panels. `Z` jumps at each arrival, so the residual
/// decays like O(1/n_steps).
pub fn relaxation_residual(
    model: &ShotNoiseModel,
    n_steps: usize,
    seed: u64,
) -> Result<RelaxationResidual> {
    if n_steps < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 trapezoid steps, got {n_steps}"
        )));
    }
    let (n_pulses, points) = sample_realization(&model.measure_model(), seed);
    let arrivals: Vec<f64> = points.iter().map(|(x, _)| *x).collect();
    let h = model.horizon / n_steps as f64;
    let (a, b) = (model.amplitude, model.decay);
    let mut integral = 0.0;
    let mut prev_z = 0.0;
    let mut worst = 0.0f64;
    for j in 0..=n_steps {
        let t = j as f64 * h;
        let z: f64 = arrivals.iter().map(|&x| model.pulse(t, x)).sum();
        if j > 0 {
            integral += 0.5 * h * (prev_z + z);
        }
        prev_z = z;
        let arrived = arrivals.iter().filter(|&&x| x <= t).count() as f64;
        worst = worst.max((z + b * integral - a * arrived).abs());
    }
    Ok(RelaxationResidual {
        n_steps,
        n_pulses,
        seed,
        max_abs_residual: worst,
    })
}
