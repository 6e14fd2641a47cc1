//! Eigenvalue gaps of 2×2 matrices from the Gaussian orthogonal ensemble.
//!
//! A matrix `[[x11, x12], [x12, x22]]` with `x11, x22 ~ N(0,2)` and
//! `x12 ~ N(0,1)` has eigenvalue gap `f = √((x11−x22)² + 4·x12²)`, which
//! follows a Rayleigh law with scale 2 (the Wigner surmise in this
//! normalisation): density `(y/4)·e^{−y²/8}`, mean `√(2π)`, second moment 8.
//!
//! When matrices are thrown as atoms of a random counting measure, the
//! natural restriction is the *window event* `{x11 > r, x22 < −r}`: for
//! `r ≥ 0` the unperturbed diagonal levels straddle the closed window
//! `[−r, r]`. Its probability is `(erfc(r/2)/2)²` exactly, and the gap
//! moments conditioned on it reduce to a two-dimensional integral computed
//! here by composite Simpson quadrature.
//!
//! The per-unit-mean-count variance of the restricted gap sum
//! `Σᵢ f(Xᵢ)·1{window}` depends on the count law only through `Var K − c`:
//! it is `a_r·ν_w f²` for an orthogonal die (`Var K = c`) and picks up the
//! negative cross-atom covariance `−(a_r·ν_w f)²` for a constant hand size.
//! Scanning the window radius separates the two regimes: the orthogonal
//! curve decreases monotonically while the constant-count curve has an
//! interior maximum near `r ≈ −0.85`.

use std::f64::consts::{PI, SQRT_2};

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;
use statrs::function::erf::{erf, erfc};

use crate::error::{Error, Result};
use crate::sim::replicate_rng;
use crate::stats::{ks_test, KsTest, SampleMoments};

/// Mean gap `√(2π)` of the unrestricted 2×2 ensemble.
pub const MEAN_GAP: f64 = 2.506_628_274_631_000_2;

/// Second moment of the unrestricted gap, exactly 8.
pub const GAP_SECOND_MOMENT: f64 = 8.0;

/// Draw the three free entries `(x11, x22, x12)` of a 2×2 GOE matrix:
/// diagonal entries `N(0,2)`, off-diagonal `N(0,1)`.
pub fn sample_entries<R: Rng + ?Sized>(rng: &mut R) -> (f64, f64, f64) {
    let z1: f64 = rng.sample(StandardNormal);
    let z2: f64 = rng.sample(StandardNormal);
    let z3: f64 = rng.sample(StandardNormal);
    (SQRT_2 * z1, SQRT_2 * z2, z3)
}

/// Eigenvalue gap `λ₂ − λ₁ = √((x11−x22)² + 4·x12²)`.
pub fn gap(x11: f64, x22: f64, x12: f64) -> f64 {
    let d = x11 - x22;
    (d * d + 4.0 * x12 * x12).sqrt()
}

/// Window event: `x11 > r` and `x22 < −r`.
pub fn straddles_window(x11: f64, x22: f64, r: f64) -> bool {
    x11 > r && x22 < -r
}

/// Exact window probability `P(x11 > r, x22 < −r) = (erfc(r/2)/2)²`.
pub fn window_probability(r: f64) -> f64 {
    let half_tail = 0.5 * erfc(0.5 * r);
    half_tail * half_tail
}

/// Quantile of the gap law: inverse of `F(y) = 1 − e^{−y²/8}`.
///
/// Requires `u ∈ [0, 1)`; `wigner_quantile(1 − e^{−1/2}) = 2` exactly.
pub fn wigner_quantile(u: f64) -> f64 {
    assert!((0.0..1.0).contains(&u), "quantile needs u in [0, 1)");
    2.0 * (-2.0 * (1.0 - u).ln()).sqrt()
}

const OUTER_PANELS: usize = 1200;
const INNER_PANELS: usize = 600;

/// Angular factor `H(ρ) = 2·∫₀^{φmax} erf((ρ·cosφ − 2r)/(2√2)) dφ` with
/// `φmax = acos(2r/ρ)` clamped to `[0, π]`.
///
/// Derivation: with `d = x11−x22`, `w = 2·x12` and `s = x11+x22`, all
/// `N(0,4)` and `s` independent of `(d, w)`, the window event reads
/// `|s| < d − 2r`, and conditioning on `(d, w) = (ρ·cosφ, ρ·sinφ)` gives
/// `P(|s| < t) = erf(t/(2√2))`.
fn straddle_arc(rho: f64, r: f64) -> f64 {
    let t = 2.0 * r / rho;
    if t >= 1.0 {
        return 0.0;
    }
    let phimax = if t <= -1.0 { PI } else { t.acos() };
    let g = |phi: f64| erf((rho * phi.cos() - 2.0 * r) / (2.0 * SQRT_2));
    let h = phimax / INNER_PANELS as f64;
    let mut acc = g(0.0) + g(phimax);
    for i in 1..INNER_PANELS {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * g(i as f64 * h);
    }
    2.0 * acc * h / 3.0
}

fn accumulate(acc: &mut [f64; 3], weight: f64, rho: f64, r: f64) {
    let mut term = weight * rho * (-rho * rho / 8.0).exp() * straddle_arc(rho, r);
    acc[0] += term;
    term *= rho;
    acc[1] += term;
    term *= rho;
    acc[2] += term;
}

fn simpson_weight(i: usize, panels: usize) -> f64 {
    if i == 0 || i == panels {
        1.0
    } else if i % 2 == 1 {
        4.0
    } else {
        2.0
    }
}

/// Plain composite Simpson on a segment where the integrand is smooth.
fn smooth_segment(a: f64, b: f64, r: f64) -> [f64; 3] {
    let h = (b - a) / OUTER_PANELS as f64;
    let mut acc = [0.0f64; 3];
    for i in 0..=OUTER_PANELS {
        let rho = a + i as f64 * h;
        if rho <= 0.0 {
            continue; // integrand vanishes like ρ^{j+1}
        }
        accumulate(&mut acc, simpson_weight(i, OUTER_PANELS), rho, r);
    }
    acc.map(|v| v * h / 3.0)
}

/// Segment whose left endpoint is the critical radius `ρ₀ = |2r|`, where the
/// angular factor behaves like `(ρ − ρ₀)^{3/2}`. The substitution
/// `ρ = ρ₀ + u²` turns that into a smooth `u⁴`-type integrand.
fn sqrt_segment(rho0: f64, b: f64, r: f64) -> [f64; 3] {
    let umax = (b - rho0).sqrt();
    let h = umax / OUTER_PANELS as f64;
    let mut acc = [0.0f64; 3];
    for i in 0..=OUTER_PANELS {
        let u = i as f64 * h;
        let rho = rho0 + u * u;
        if rho <= 0.0 {
            continue;
        }
        accumulate(&mut acc, simpson_weight(i, OUTER_PANELS) * 2.0 * u, rho, r);
    }
    acc.map(|v| v * h / 3.0)
}

/// Raw integrals `E[f^j·1{window}]` for `j = 0, 1, 2` via the polar
/// representation `(1/(8π))·∫ ρ^{j+1} e^{−ρ²/8} H(ρ) dρ`. The angular factor
/// has a fractional-power point at `ρ = |2r|` (the radius where `φmax`
/// leaves `{0, π}`), so the range splits there with a desingularising
/// substitution on the critical side.
fn window_raw_integrals(r: f64) -> [f64; 3] {
    let hi = 30.0 + (2.0 * r).max(0.0);
    let crit = 2.0 * r.abs();
    let mut total = [0.0f64; 3];
    let mut add = |part: [f64; 3]| {
        for j in 0..3 {
            total[j] += part[j] / (8.0 * PI);
        }
    };
    if r > 0.0 {
        add(sqrt_segment(crit, hi, r));
    } else if r == 0.0 {
        add(smooth_segment(0.0, hi, r));
    } else if crit < hi {
        add(smooth_segment(0.0, crit, r)); // φmax ≡ π below the critical radius
        add(sqrt_segment(crit, hi, r));
    } else {
        add(smooth_segment(0.0, hi, r));
    }
    total
}

/// Gap moments conditioned on the window event, by quadrature.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct WindowMoments {
    pub r: f64,
    /// Window probability, exact closed form.
    pub a_r: f64,
    /// Conditional mean gap `ν_w f`.
    pub nu_f: f64,
    /// Conditional second moment `ν_w f²`.
    pub nu_f2: f64,
}

/// Conditional gap moments for window radius `r`.
///
/// Accurate to roughly 1e-9 relative for `|r| ≲ 20`; beyond that the window
/// probability underflows and the ratios degrade.
pub fn window_moments(r: f64) -> WindowMoments {
    let i = window_raw_integrals(r);
    WindowMoments {
        r,
        a_r: window_probability(r),
        nu_f: i[1] / i[0],
        nu_f2: i[2] / i[0],
    }
}

/// One row of the restriction-variance scan.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GoeSummaryRow {
    pub r: f64,
    pub a_r: f64,
    pub nu_f: f64,
    pub nu_f2: f64,
    /// `Var[Σ f·1{window}] / c` for an orthogonal count law: `a_r·ν_w f²`.
    pub var_ratio_orthogonal: f64,
    /// Same ratio for a constant count law `K ≡ c`.
    pub var_ratio_dirac: f64,
    /// Covariance per unit mean count, under the constant count law, between
    /// the gap sums restricted to the window event and to its mirror image
    /// `{x11 < −r, x22 > r}`: the two events are disjoint with equal
    /// restricted means, so only the count-coupling term `−(a_r·ν_w f)²`
    /// survives.
    pub dirac_cross_covariance: f64,
}

/// Default window radii: the ascending branch, the interior maximum of the
/// constant-count curve near `r ≈ −0.85`, and the decaying tail.
pub fn default_r_grid() -> Vec<f64> {
    vec![
        -3.0, -2.5, -2.0, -1.5, -1.0, -0.85, -0.75, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75, 1.0, 1.5,
        2.0,
    ]
}

/// Restriction-variance scan over window radii (quadrature, deterministic).
pub fn goe_summary(r_grid: &[f64]) -> Vec<GoeSummaryRow> {
    r_grid
        .par_iter()
        .map(|&r| {
            let m = window_moments(r);
            let restricted_mean = m.a_r * m.nu_f;
            let var_ratio_orthogonal = m.a_r * m.nu_f2;
            let cross = -restricted_mean * restricted_mean;
            GoeSummaryRow {
                r,
                a_r: m.a_r,
                nu_f: m.nu_f,
                nu_f2: m.nu_f2,
                var_ratio_orthogonal,
                var_ratio_dirac: var_ratio_orthogonal + cross,
                dirac_cross_covariance: cross,
            }
        })
        .collect()
}

const BATCH: u64 = 1 << 16;

/// Sampled gaps from full matrix draws, batched so that replicate streams do
/// not depend on the number of worker threads.
fn gap_samples(n_samples: u64, seed: u64) -> Vec<f64> {
    let n_batches = n_samples.div_ceil(BATCH);
    let batches: Vec<Vec<f64>> = (0..n_batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = replicate_rng(seed, b);
            let take = BATCH.min(n_samples - b * BATCH) as usize;
            (0..take)
                .map(|_| {
                    let (x11, x22, x12) = sample_entries(&mut rng);
                    gap(x11, x22, x12)
                })
                .collect()
        })
        .collect();
    batches.concat()
}

/// Inverse-CDF samples of the gap law: `wigner_quantile` applied to batched
/// uniform draws, thread-count invariant.
pub fn wigner_sample(n_samples: u64, seed: u64) -> Vec<f64> {
    let n_batches = n_samples.div_ceil(BATCH);
    let batches: Vec<Vec<f64>> = (0..n_batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = replicate_rng(seed, b);
            let take = BATCH.min(n_samples - b * BATCH) as usize;
            (0..take).map(|_| wigner_quantile(rng.random::<f64>())).collect()
        })
        .collect();
    batches.concat()
}

/// Monte Carlo moments of the unrestricted gap.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GapMcReport {
    pub n_samples: u64,
    pub seed: u64,
    pub mean: f64,
    pub mean_se: f64,
    pub second_moment: f64,
    pub second_moment_se: f64,
}

/// Estimate mean and second moment of the gap from `n_samples` matrix draws.
pub fn wigner_gap_mc(n_samples: u64, seed: u64) -> Result<GapMcReport> {
    if n_samples < 2 {
        return Err(Error::InvalidParameter(
            "gap Monte Carlo needs at least 2 samples".into(),
        ));
    }
    let values = gap_samples(n_samples, seed);
    let squares: Vec<f64> = values.iter().map(|v| v * v).collect();
    let m1 = SampleMoments::from_slice(&values);
    let m2 = SampleMoments::from_slice(&squares);
    Ok(GapMcReport {
        n_samples,
        seed,
        mean: m1.mean(),
        mean_se: m1.mean_se(),
        second_moment: m2.mean(),
        second_moment_se: m2.mean_se(),
    })
}

/// Kolmogorov-Smirnov test of sampled gaps against `F(y) = 1 − e^{−y²/8}`.
pub fn gap_ks_test(n_samples: u64, seed: u64) -> KsTest {
    let mut values = gap_samples(n_samples, seed);
    ks_test(&mut values, |y| 1.0 - (-y * y / 8.0).exp())
}

/// Monte Carlo check of the window event and the conditional gap moments.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct WindowMcReport {
    pub r: f64,
    pub n_proposals: u64,
    pub n_accepted: u64,
    pub seed: u64,
    pub hit_rate: f64,
    pub hit_rate_se: f64,
    pub nu_f: f64,
    pub nu_f_se: f64,
    pub nu_f2: f64,
    pub nu_f2_se: f64,
}

/// Rejection estimate of the conditional moments: draw `n_proposals`
/// matrices, keep those whose diagonal straddles the window.
pub fn window_mc(r: f64, n_proposals: u64, seed: u64) -> Result<WindowMcReport> {
    if n_proposals == 0 {
        return Err(Error::InvalidParameter(
            "window Monte Carlo needs at least 1 proposal".into(),
        ));
    }
    let n_batches = n_proposals.div_ceil(BATCH);
    let partials: Vec<(u64, [f64; 4])> = (0..n_batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = replicate_rng(seed, b);
            let take = BATCH.min(n_proposals - b * BATCH);
            let mut hits = 0u64;
            let mut sums = [0.0f64; 4];
            for _ in 0..take {
                let (x11, x22, x12) = sample_entries(&mut rng);
                if straddles_window(x11, x22, r) {
                    hits += 1;
                    let f = gap(x11, x22, x12);
                    let f2 = f * f;
                    sums[0] += f;
                    sums[1] += f2;
                    sums[2] += f2 * f;
                    sums[3] += f2 * f2;
                }
            }
            (hits, sums)
        })
        .collect();
    let mut accepted = 0u64;
    let mut s = [0.0f64; 4];
    for (hits, sums) in partials {
        accepted += hits;
        for j in 0..4 {
            s[j] += sums[j];
        }
    }
    if accepted < 2 {
        return Err(Error::InvalidParameter(format!(
            "window r = {r} accepted {accepted} of {n_proposals} proposals; \
             need at least 2 for moment estimates"
        )));
    }
    let n = accepted as f64;
    let p_hat = n / n_proposals as f64;
    let nu_f = s[0] / n;
    let nu_f2 = s[1] / n;
    let var_f = (s[1] / n - nu_f * nu_f).max(0.0);
    let var_f2 = (s[3] / n - nu_f2 * nu_f2).max(0.0);
    Ok(WindowMcReport {
        r,
        n_proposals,
        n_accepted: accepted,
        seed,
        hit_rate: p_hat,
        hit_rate_se: (p_hat * (1.0 - p_hat) / n_proposals as f64).sqrt(),
        nu_f: nu_f,
        nu_f_se: (var_f / n).sqrt(),
        nu_f2,
        nu_f2_se: (var_f2 / n).sqrt(),
    })
}
