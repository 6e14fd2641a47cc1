//! Seeded Monte Carlo engine for random counting measures.
//!
//! A realization is built by throwing stones: draw a count `K` from a count
//! law, then throw `K` independent points from a point sampler, optionally
//! attaching a real-valued mark to each point. Linear functionals
//! `Nf = Σᵢ f(Xᵢ, Yᵢ)` are estimated over many replicates.
//!
//! Reproducibility contract: replicate `i` of a run with master seed `s`
//! uses a ChaCha8 generator seeded by `s` on stream `i`. Replicates are
//! fanned out with rayon and collected positionally, so every estimate is
//! bit-identical regardless of thread count or scheduling.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dice::SupportPair;
use crate::error::{Error, Result};
use crate::law::DiscreteLaw;
use crate::stats::{sample_covariance, SampleMoments};

/// Draws one point of type `P` from the replicate generator.
pub type PointSampler<P> = Arc<dyn Fn(&mut ChaCha8Rng) -> P + Send + Sync>;
/// Draws a mark for a point.
pub type MarkKernel<P> = Arc<dyn Fn(&P, &mut ChaCha8Rng) -> f64 + Send + Sync>;
/// Membership test for a restriction set.
pub type PointIndicator<P> = Arc<dyn Fn(&P) -> bool + Send + Sync>;

/// Law of the stone count `K`.
#[derive(Clone, Debug, Serialize)]
pub enum CountLaw {
    /// Uniform on the integer range `m..=n` (a die).
    Uniform { m: u64, n: u64 },
    /// Explicit pmf starting at `offset`; `cdf` holds cumulative sums.
    Explicit { offset: u64, cdf: Vec<f64> },
}

impl CountLaw {
    pub fn uniform(m: u64, n: u64) -> Result<Self> {
        if m > n {
            return Err(Error::InvalidSupport(format!("m={m} exceeds n={n}")));
        }
        Ok(CountLaw::Uniform { m, n })
    }

    pub fn from_support(support: &SupportPair) -> Result<Self> {
        let (m, n) = support.as_u64_pair().ok_or_else(|| {
            Error::SupportTooLarge(format!("support {support} does not fit in u64"))
        })?;
        CountLaw::uniform(m, n)
    }

    pub fn from_law(law: &DiscreteLaw) -> Self {
        let real = law.to_real();
        let mut acc = 0.0;
        let cdf = real
            .probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        CountLaw::Explicit {
            offset: real.offset,
            cdf,
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            CountLaw::Uniform { m, n } => (*m as f64 + *n as f64) / 2.0,
            CountLaw::Explicit { offset, cdf } => {
                let mut mean = 0.0;
                let mut prev = 0.0;
                for (j, &c) in cdf.iter().enumerate() {
                    mean += (*offset + j as u64) as f64 * (c - prev);
                    prev = c;
                }
                mean
            }
        }
    }

    pub fn variance(&self) -> f64 {
        match self {
            CountLaw::Uniform { m, n } => {
                let width = (*n - *m + 1) as f64;
                (width * width - 1.0) / 12.0
            }
            CountLaw::Explicit { offset, cdf } => {
                let mean = self.mean();
                let mut var = 0.0;
                let mut prev = 0.0;
                for (j, &c) in cdf.iter().enumerate() {
                    let d = (*offset + j as u64) as f64 - mean;
                    var += d * d * (c - prev);
                    prev = c;
                }
                var
            }
        }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> u64 {
        match self {
            CountLaw::Uniform { m, n } => rng.random_range(*m..=*n),
            CountLaw::Explicit { offset, cdf } => {
                let u: f64 = rng.random();
                let j = cdf.partition_point(|&c| c < u);
                offset + j.min(cdf.len() - 1) as u64
            }
        }
    }
}

struct Restriction<P> {
    indicator: PointIndicator<P>,
    mass: f64,
}

impl<P> Clone for Restriction<P> {
    fn clone(&self) -> Self {
        Restriction {
            indicator: self.indicator.clone(),
            mass: self.mass,
        }
    }
}

/// A random counting measure: count law, point law, optional marks, and an
/// optional restriction that silently discards points outside a set.
pub struct MeasureModel<P> {
    count: CountLaw,
    point_sampler: PointSampler<P>,
    mark_kernel: Option<MarkKernel<P>>,
    restriction: Option<Restriction<P>>,
}

impl<P> Clone for MeasureModel<P> {
    fn clone(&self) -> Self {
        MeasureModel {
            count: self.count.clone(),
            point_sampler: self.point_sampler.clone(),
            mark_kernel: self.mark_kernel.clone(),
            restriction: self.restriction.clone(),
        }
    }
}

impl<P> MeasureModel<P> {
    pub fn new(count: CountLaw, point_sampler: PointSampler<P>) -> Self {
        MeasureModel {
            count,
            point_sampler,
            mark_kernel: None,
            restriction: None,
        }
    }

    /// Attach a mark kernel; unmarked models carry mark 1 on every point,
    /// so `f(x, y) = y` recovers pure counting either way.
    pub fn with_marks(mut self, kernel: MarkKernel<P>) -> Self {
        self.mark_kernel = Some(kernel);
        self
    }

    pub fn count_law(&self) -> &CountLaw {
        &self.count
    }

    /// Mass of the current restriction set (1 when unrestricted).
    pub fn restriction_mass(&self) -> f64 {
        self.restriction.as_ref().map_or(1.0, |r| r.mass)
    }

    /// Restrict realizations to the set recognized by `indicator`, which
    /// has point-law mass `mass`. Restricting an already restricted model
    /// intersects the sets; `mass` is then the conditional mass of the new
    /// set inside the current one.
    pub fn restrict(&self, indicator: PointIndicator<P>, mass: f64) -> Result<MeasureModel<P>>
    where
        P: 'static,
    {
        if !(mass > 0.0 && mass <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "restriction mass must lie in (0, 1], got {mass}"
            )));
        }
        let (indicator, mass) = match &self.restriction {
            None => (indicator, mass),
            Some(prev) => {
                let old = prev.indicator.clone();
                let combined: PointIndicator<P> =
                    Arc::new(move |p: &P| old(p) && indicator(p));
                (combined, prev.mass * mass)
            }
        };
        let mut out = self.clone();
        out.restriction = Some(Restriction { indicator, mass });
        Ok(out)
    }

    fn realize(&self, rng: &mut ChaCha8Rng) -> (u64, Vec<(P, f64)>) {
        let k = self.count.sample(rng);
        let mut points = Vec::with_capacity(k as usize);
        for _ in 0..k {
            let p = (self.point_sampler)(rng);
            let mark = match &self.mark_kernel {
                Some(q) => q(&p, rng),
                None => 1.0,
            };
            if let Some(r) = &self.restriction {
                if !(r.indicator)(&p) {
                    continue;
                }
            }
            points.push((p, mark));
        }
        (points.len() as u64, points)
    }
}

/// A named linear statistic `Nf = Σᵢ 1_A(Xᵢ) · f(Xᵢ, Yᵢ)` of a realization.
pub struct Functional<P> {
    name: String,
    indicator: Option<PointIndicator<P>>,
    f: Arc<dyn Fn(&P, f64) -> f64 + Send + Sync>,
}

impl<P> Clone for Functional<P> {
    fn clone(&self) -> Self {
        Functional {
            name: self.name.clone(),
            indicator: self.indicator.clone(),
            f: self.f.clone(),
        }
    }
}

impl<P> std::fmt::Debug for Functional<P> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Functional")
            .field("name", &self.name)
            .field("restricted", &self.indicator.is_some())
            .finish_non_exhaustive()
    }
}

impl<P> Functional<P> {
    /// `f` must be non-negative on the point space.
    pub fn new(
        name: impl Into<String>,
        f: impl Fn(&P, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Functional {
            name: name.into(),
            indicator: None,
            f: Arc::new(f),
        }
    }

    /// Same, but only points inside the indicator set contribute.
    pub fn restricted(
        name: impl Into<String>,
        indicator: PointIndicator<P>,
        f: impl Fn(&P, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Functional {
            name: name.into(),
            indicator: Some(indicator),
            f: Arc::new(f),
        }
    }

    /// The number of points in the indicator set (`f ≡ 1`).
    pub fn counting(name: impl Into<String>, indicator: PointIndicator<P>) -> Self {
        Functional::restricted(name, indicator, |_, _| 1.0)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// `Nf` of one realization.
    pub fn eval_sum(&self, points: &[(P, f64)]) -> f64 {
        points
            .iter()
            .filter(|(p, _)| self.indicator.as_ref().map_or(true, |ind| ind(p)))
            .map(|(p, y)| (self.f)(p, *y))
            .sum()
    }
}

/// A Monte Carlo estimate with its normal-approximation standard error.
/// Reproducible from `(model, functional, seed, n_replicates)`.
#[derive(Debug, Clone, Serialize)]
pub struct EstimateReport {
    pub quantity: String,
    pub point_estimate: f64,
    pub std_error: f64,
    pub n_replicates: u64,
    pub seed: u64,
}

/// The generator for replicate `index` of a run with master seed `seed`.
pub fn replicate_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// One seeded realization: the retained point count and the retained
/// `(point, mark)` pairs (all thrown points when the model is unrestricted).
pub fn sample_realization<P>(model: &MeasureModel<P>, seed: u64) -> (u64, Vec<(P, f64)>) {
    model.realize(&mut replicate_rng(seed, 0))
}

/// Evaluate every functional on each of `n_replicates` independent seeded
/// realizations. Returns one column of values per functional. This is the
/// single parallel code path every estimator goes through.
pub fn collect_values<P: Send + Sync>(
    model: &MeasureModel<P>,
    functionals: &[Functional<P>],
    n_replicates: u64,
    seed: u64,
) -> Vec<Vec<f64>> {
    let rows: Vec<Vec<f64>> = (0..n_replicates)
        .into_par_iter()
        .map(|i| {
            let mut rng = replicate_rng(seed, i);
            let (_, points) = model.realize(&mut rng);
            functionals.iter().map(|f| f.eval_sum(&points)).collect()
        })
        .collect();
    let mut cols = vec![Vec::with_capacity(n_replicates as usize); functionals.len()];
    for row in rows {
        for (col, v) in cols.iter_mut().zip(row) {
            col.push(v);
        }
    }
    cols
}

fn require_replicates(n_replicates: u64) -> Result<()> {
    if n_replicates < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 replicates, got {n_replicates}"
        )));
    }
    Ok(())
}

/// Sample mean of `Nf` across replicates.
pub fn estimate_functional<P: Send + Sync>(
    model: &MeasureModel<P>,
    functional: &Functional<P>,
    n_replicates: u64,
    seed: u64,
) -> Result<EstimateReport> {
    require_replicates(n_replicates)?;
    let values = collect_values(model, std::slice::from_ref(functional), n_replicates, seed);
    let m = SampleMoments::from_slice(&values[0]);
    Ok(EstimateReport {
        quantity: format!("mean[N{}]", functional.name),
        point_estimate: m.mean(),
        std_error: m.mean_se(),
        n_replicates,
        seed,
    })
}

/// Sample variance of `Nf` across replicates.
pub fn estimate_variance<P: Send + Sync>(
    model: &MeasureModel<P>,
    functional: &Functional<P>,
    n_replicates: u64,
    seed: u64,
) -> Result<EstimateReport> {
    require_replicates(n_replicates)?;
    let values = collect_values(model, std::slice::from_ref(functional), n_replicates, seed);
    let m = SampleMoments::from_slice(&values[0]);
    Ok(EstimateReport {
        quantity: format!("var[N{}]", functional.name),
        point_estimate: m.variance(),
        std_error: m.variance_se(),
        n_replicates,
        seed,
    })
}

/// Sample covariance of `(Nf, Ng)` over shared realizations.
pub fn estimate_covariance<P: Send + Sync>(
    model: &MeasureModel<P>,
    f: &Functional<P>,
    g: &Functional<P>,
    n_replicates: u64,
    seed: u64,
) -> Result<EstimateReport> {
    require_replicates(n_replicates)?;
    let values = collect_values(model, &[f.clone(), g.clone()], n_replicates, seed);
    let (cov, se) = sample_covariance(&values[0], &values[1]);
    Ok(EstimateReport {
        quantity: format!("cov[N{}, N{}]", f.name, g.name),
        point_estimate: cov,
        std_error: se,
        n_replicates,
        seed,
    })
}

/// Frequencies of the retained count across replicates.
pub fn count_histogram<P: Send + Sync>(
    model: &MeasureModel<P>,
    n_replicates: u64,
    seed: u64,
) -> BTreeMap<u64, u64> {
    let counts: Vec<u64> = (0..n_replicates)
        .into_par_iter()
        .map(|i| model.realize(&mut replicate_rng(seed, i)).0)
        .collect();
    let mut hist = BTreeMap::new();
    for k in counts {
        *hist.entry(k).or_insert(0u64) += 1;
    }
    hist
}

/// Closed registry of point samplers and mark kernels used by the CLI;
/// library callers may also supply their own closures.
pub mod samplers {
    use super::*;
    use rand_distr::{Distribution, LogNormal, Normal};

    /// Uniform law on the real interval `[lo, hi)`.
    pub fn uniform_interval(lo: f64, hi: f64) -> Result<PointSampler<f64>> {
        if !(lo < hi) {
            return Err(Error::InvalidParameter(format!(
                "interval [{lo}, {hi}) is empty"
            )));
        }
        Ok(Arc::new(move |rng| lo + (hi - lo) * rng.random::<f64>()))
    }

    /// Product of independent Gaussians, one coordinate per `(mean, sd)`.
    pub fn gaussian_product(coords: &[(f64, f64)]) -> Result<PointSampler<Vec<f64>>> {
        let normals: Vec<Normal<f64>> = coords
            .iter()
            .map(|&(mean, sd)| {
                Normal::new(mean, sd).map_err(|e| {
                    Error::InvalidParameter(format!("bad Gaussian ({mean}, {sd}): {e}"))
                })
            })
            .collect::<Result<_>>()?;
        Ok(Arc::new(move |rng| {
            normals.iter().map(|n| n.sample(rng)).collect()
        }))
    }

    /// Finite atomic law: emits atom indices `0..weights.len()` with
    /// probability proportional to the weights.
    pub fn finite_atoms(weights: &[f64]) -> Result<PointSampler<usize>> {
        if weights.is_empty() || weights.iter().any(|&w| !(w >= 0.0)) {
            return Err(Error::InvalidParameter(
                "atom weights must be non-negative and nonempty".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidParameter("atom weights sum to zero".into()));
        }
        let mut acc = 0.0;
        let cdf: Vec<f64> = weights
            .iter()
            .map(|w| {
                acc += w / total;
                acc
            })
            .collect();
        let last = cdf.len() - 1;
        Ok(Arc::new(move |rng| {
            let u: f64 = rng.random();
            cdf.partition_point(|&c| c < u).min(last)
        }))
    }

    /// Lognormal mark kernel, identical for every point.
    pub fn lognormal_mark<P: 'static>(mu: f64, sigma: f64) -> Result<MarkKernel<P>> {
        let dist = LogNormal::new(mu, sigma).map_err(|e| {
            Error::InvalidParameter(format!("bad lognormal ({mu}, {sigma}): {e}"))
        })?;
        Ok(Arc::new(move |_p, rng| dist.sample(rng)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::law::{thinned_pmf, ThinningParam};
    use crate::stats::chi_square_gof;
    use num_bigint::BigUint;

    fn die_model(m: u64, n: u64) -> MeasureModel<f64> {
        MeasureModel::new(
            CountLaw::uniform(m, n).unwrap(),
            samplers::uniform_interval(0.0, 1.0).unwrap(),
        )
    }

    #[test]
    fn count_law_moments_are_exact() {
        let u = CountLaw::uniform(0, 4).unwrap();
        assert_eq!(u.mean(), 2.0);
        assert_eq!(u.variance(), 2.0);
        // Explicit encoding of the die (3, 9): c = 6, δ² = (7² − 1)/12 = 4.
        let support = SupportPair::new(BigUint::from(3u32), BigUint::from(9u32)).unwrap();
        let e = CountLaw::from_law(&DiscreteLaw::uniform(&support).unwrap());
        assert!((e.mean() - 6.0).abs() < 1e-12);
        assert!((e.variance() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_count_is_constant() {
        let model = die_model(5, 5);
        for seed in 0..100 {
            let (k, pts) = sample_realization(&model, seed);
            assert_eq!(k, 5);
            assert_eq!(pts.len(), 5);
        }
    }

    #[test]
    fn empirical_count_mean_matches_die() {
        // Die (0,4): c = 2, which Nf with f ≡ 1 estimates directly.
        let model = die_model(0, 4);
        let f = Functional::new("count", |_: &f64, _| 1.0);
        let rep = estimate_functional(&model, &f, 100_000, 7).unwrap();
        assert!((rep.point_estimate - 2.0).abs() < 3.0 * rep.std_error);
        // Mark-blind check: f(x, y) = y on an unmarked model is also K.
        let g = Functional::new("mark-sum", |_: &f64, y: f64| y);
        let rep2 = estimate_functional(&model, &g, 100_000, 7).unwrap();
        assert_eq!(rep.point_estimate, rep2.point_estimate);
    }

    #[test]
    fn campbell_mean_and_variance_orthogonal_die() {
        // Die (0,4): c = δ² = 2. f(x) = x on Uniform(0,1): νf = 1/2,
        // νf² = 1/3, so E Nf = 1 and Var Nf = c·νf² + (δ²−c)(νf)² = 2/3.
        let model = die_model(0, 4);
        let f = Functional::new("f", |x: &f64, _| *x);
        let mean = estimate_functional(&model, &f, 200_000, 11).unwrap();
        assert!((mean.point_estimate - 1.0).abs() < 4.0 * mean.std_error);
        let var = estimate_variance(&model, &f, 200_000, 11).unwrap();
        assert!((var.point_estimate - 2.0 / 3.0).abs() < 4.0 * var.std_error);
    }

    #[test]
    fn dirac_variance_is_count_times_point_variance() {
        // Degenerate die K ≡ 6: Var Nf = c · Var_ν f = 6·(1/3 − 1/4) = 1/2.
        let model = die_model(6, 6);
        let f = Functional::new("f", |x: &f64, _| *x);
        let var = estimate_variance(&model, &f, 200_000, 13).unwrap();
        assert!((var.point_estimate - 0.5).abs() < 4.0 * var.std_error);
    }

    #[test]
    fn disjoint_functionals_on_orthogonal_die_are_uncorrelated() {
        for (idx, seed) in [(1u32, 21u64), (2, 22)] {
            let die = crate::dice::die_from_index(idx).unwrap();
            let model = MeasureModel::new(
                CountLaw::from_support(die.support()).unwrap(),
                samplers::uniform_interval(0.0, 1.0).unwrap(),
            );
            let left: PointIndicator<f64> = Arc::new(|x: &f64| *x < 0.5);
            let right: PointIndicator<f64> = Arc::new(|x: &f64| *x >= 0.5);
            let f = Functional::restricted("f", left, |x: &f64, _| *x);
            let g = Functional::restricted("g", right, |x: &f64, _| 1.0 - *x);
            let rep = estimate_covariance(&model, &f, &g, 150_000, seed).unwrap();
            assert!(
                rep.point_estimate.abs() < 4.0 * rep.std_error,
                "die {idx}: cov {} ± {}",
                rep.point_estimate,
                rep.std_error
            );
        }
    }

    #[test]
    fn marked_model_mean_includes_mark_expectation() {
        // Lognormal(0, 0.5) marks: E Y = e^{1/8}; f(x,y) = y ⇒ E Nf = c·E Y.
        let model = die_model(0, 4)
            .with_marks(samplers::lognormal_mark(0.0, 0.5).unwrap());
        let f = Functional::new("mark", |_: &f64, y: f64| y);
        let rep = estimate_functional(&model, &f, 200_000, 17).unwrap();
        let target = 2.0 * (0.125f64).exp();
        assert!((rep.point_estimate - target).abs() < 4.0 * rep.std_error);
    }

    #[test]
    fn estimates_are_identical_across_thread_counts() {
        let model = die_model(0, 36);
        let f = Functional::new("f", |x: &f64, _| *x);
        let g = Functional::new("g", |x: &f64, _| 1.0 - *x);
        let run = || {
            (
                estimate_functional(&model, &f, 20_000, 42).unwrap(),
                estimate_variance(&model, &f, 20_000, 42).unwrap(),
                estimate_covariance(&model, &f, &g, 20_000, 42).unwrap(),
            )
        };
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(run);
        let quad = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(run);
        assert_eq!(single.0.point_estimate.to_bits(), quad.0.point_estimate.to_bits());
        assert_eq!(single.0.std_error.to_bits(), quad.0.std_error.to_bits());
        assert_eq!(single.1.point_estimate.to_bits(), quad.1.point_estimate.to_bits());
        assert_eq!(single.2.point_estimate.to_bits(), quad.2.point_estimate.to_bits());
        assert_eq!(single.2.std_error.to_bits(), quad.2.std_error.to_bits());
    }

    #[test]
    fn restriction_by_full_space_is_identity() {
        let base = die_model(0, 9);
        let half: PointIndicator<f64> = Arc::new(|x: &f64| *x < 0.5);
        let all: PointIndicator<f64> = Arc::new(|_: &f64| true);
        let restricted = base.restrict(half.clone(), 0.5).unwrap();
        let twice = restricted.restrict(all, 1.0).unwrap();
        assert_eq!(twice.restriction_mass(), 0.5);
        for seed in [3u64, 5, 8] {
            let (k1, p1) = sample_realization(&restricted, seed);
            let (k2, p2) = sample_realization(&twice, seed);
            assert_eq!(k1, k2);
            assert_eq!(p1, p2);
        }
        // Retained points actually lie in the set.
        let (_, pts) = sample_realization(&restricted, 99);
        assert!(pts.iter().all(|(x, _)| *x < 0.5));
    }

    #[test]
    fn restricted_counts_match_exact_thinned_pmf() {
        // Die (0,4) thinned by a = 1/2: the retained-count histogram over
        // 10⁶ replicates must fit the exact thinned pmf (chi-square, 1%),
        // and must *not* fit a uniform law on the same support.
        let model = die_model(0, 4)
            .restrict(Arc::new(|x: &f64| *x < 0.5), 0.5)
            .unwrap();
        let reps = 1_000_000u64;
        let hist = count_histogram(&model, reps, 2024);
        let a = ThinningParam::from_ratio(1, 2).unwrap();
        let exact = thinned_pmf(
            &SupportPair::new(BigUint::from(0u32), BigUint::from(4u32)).unwrap(),
            &a,
        )
        .unwrap();
        let probs: Vec<f64> = (0..=4u64)
            .map(|j| crate::rat_to_f64(&exact.prob(j)))
            .collect();
        let observed: Vec<u64> = (0..=4u64).map(|j| *hist.get(&j).unwrap_or(&0)).collect();
        let fit = chi_square_gof(&observed, &probs, reps, 5.0);
        assert!(fit.p_value > 0.01, "thinned fit rejected: {fit:?}");
        let uniform = vec![0.2f64; 5];
        let misfit = chi_square_gof(&observed, &uniform, reps, 5.0);
        assert!(misfit.p_value < 1e-12, "uniformity not rejected: {misfit:?}");
    }

    #[test]
    fn explicit_count_law_reproduces_die() {
        // CountLaw::Explicit built from the exact uniform law behaves like
        // the die itself (same mean, support respected).
        let support = SupportPair::new(BigUint::from(3u32), BigUint::from(9u32)).unwrap();
        let exact = DiscreteLaw::uniform(&support).unwrap();
        let law = CountLaw::from_law(&exact);
        assert!((law.mean() - 6.0).abs() < 1e-12);
        let model = MeasureModel::new(law, samplers::uniform_interval(0.0, 1.0).unwrap());
        let hist = count_histogram(&model, 60_000, 5);
        assert!(hist.keys().all(|&k| (3..=9).contains(&k)));
        let probs = vec![1.0 / 7.0; 7];
        let observed: Vec<u64> = (3..=9u64).map(|j| *hist.get(&j).unwrap_or(&0)).collect();
        let fit = chi_square_gof(&observed, &probs, 60_000, 5.0);
        assert!(fit.p_value > 0.001, "uniform fit rejected: {fit:?}");
    }

    #[test]
    fn finite_atom_sampler_hits_all_atoms_with_right_rates() {
        let sampler = samplers::finite_atoms(&[1.0, 2.0, 1.0]).unwrap();
        let mut rng = replicate_rng(1, 0);
        let mut counts = [0u64; 3];
        let n = 40_000;
        for _ in 0..n {
            counts[sampler(&mut rng)] += 1;
        }
        let fit = chi_square_gof(&counts, &[0.25, 0.5, 0.25], n, 5.0);
        assert!(fit.p_value > 0.001, "atom rates off: {fit:?}");
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(CountLaw::uniform(5, 2).is_err());
        assert!(samplers::uniform_interval(1.0, 1.0).is_err());
        assert!(samplers::finite_atoms(&[]).is_err());
        assert!(samplers::finite_atoms(&[0.0, 0.0]).is_err());
        let model = die_model(0, 4);
        assert!(model.restrict(Arc::new(|_: &f64| true), 0.0).is_err());
        assert!(model.restrict(Arc::new(|_: &f64| true), 1.5).is_err());
        let f = Functional::new("f", |x: &f64, _| *x);
        assert!(estimate_functional(&model, &f, 1, 0).is_err());
    }
}
