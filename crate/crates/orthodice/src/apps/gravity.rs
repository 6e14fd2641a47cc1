//! Gravitational potential of a random star field.
//!
//! Stars are thrown at i.i.d. positions from a spatial density, the number of
//! stars follows a counting law `K`, and each star carries an independent
//! lognormal mass. The potential at an evaluation point `z` is the random sum
//!
//! ```text
//! Z_z = G · Σ_i  Y_i / sqrt(‖X_i − z‖² + ε²)
//! ```
//!
//! with softening length `ε` (set `ε = 0` to use the bare `1/r` kernel, which
//! then refuses evaluation points inside the mass distribution). Because the
//! positions and masses are i.i.d. given the count, the first two moments of
//! `Z` split into a Campbell part proportional to `E K` and an excess part
//! proportional to `Var K − E K`:
//!
//! ```text
//! E Z_z       = c·G·b_m·∫ρ k_z
//! Var Z_z     = c·G²·(b_m² + d_m²)·∫ρ k_z²  +  (δ² − c)·G²·b_m²·(∫ρ k_z)²
//! Cov(Z_w,Z_z)= c·G²·(b_m² + d_m²)·∫ρ k_w k_z + (δ² − c)·G²·b_m²·(∫ρ k_w)(∫ρ k_z)
//! ```
//!
//! where `c = E K`, `δ² = Var K`, `b_m = E Y`, `d_m² = Var Y`, and
//! `k_z(x) = 1/sqrt(‖x − z‖² + ε²)`. A mean-equals-variance counting law
//! kills the excess terms, so distinct evaluation points decorrelate down to
//! the shared-star Campbell term — that collapse is the exact analogue of
//! score decorrelation in the card study, here at astronomical counts.
//!
//! [`potential_reference`] evaluates the three moment formulas by
//! deterministic tensor-product quadrature; [`gravity_estimate`] checks them
//! by seeded Monte Carlo; [`milkyway_preset`] packages a 5·10¹¹-star
//! counting law whose side count is prime.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use num_bigint::BigUint;
use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::Serialize;

use crate::dice::first_die_with_mean_at_least;
use crate::error::{Error, Result};
use crate::primes::prime_rank;
use crate::sim::{collect_values, samplers, CountLaw, Functional, MeasureModel, PointSampler};
use crate::stats::{sample_covariance, SampleMoments};

/// Spatial densities a star field can be drawn from. Both are normalized
/// probability densities on ℝ³ with a known exact sampler.
#[derive(Debug, Clone, Serialize)]
pub enum SpatialDensity {
    /// Isotropic Gaussian blob centered at the origin, standard deviation
    /// `sigma` per coordinate.
    GaussianBlob { sigma: f64 },
    /// Axisymmetric exponential disk: surface density `∝ e^{-R/scale_radius}`
    /// in cylindrical radius, vertical profile `∝ e^{-|z|/scale_height}`.
    ExponentialDisk { scale_radius: f64, scale_height: f64 },
}

impl SpatialDensity {
    pub fn gaussian_blob(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "blob sigma must be positive and finite, got {sigma}"
            )));
        }
        Ok(SpatialDensity::GaussianBlob { sigma })
    }

    pub fn exponential_disk(scale_radius: f64, scale_height: f64) -> Result<Self> {
        if !(scale_radius > 0.0 && scale_radius.is_finite())
            || !(scale_height > 0.0 && scale_height.is_finite())
        {
            return Err(Error::InvalidParameter(format!(
                "disk scales must be positive and finite, got ({scale_radius}, {scale_height})"
            )));
        }
        Ok(SpatialDensity::ExponentialDisk {
            scale_radius,
            scale_height,
        })
    }

    /// Probability density at `x`.
    pub fn pdf(&self, x: &[f64; 3]) -> f64 {
        match self {
            SpatialDensity::GaussianBlob { sigma } => {
                let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
                let norm = (TAU).powf(1.5) * sigma.powi(3);
                (-r2 / (2.0 * sigma * sigma)).exp() / norm
            }
            SpatialDensity::ExponentialDisk {
                scale_radius,
                scale_height,
            } => {
                let r = x[0].hypot(x[1]);
                let norm = 4.0 * PI * scale_radius * scale_radius * scale_height;
                ((-r / scale_radius).exp() * (-x[2].abs() / scale_height).exp()) / norm
            }
        }
    }

    /// A length scale bounding essentially all of the mass; softening
    /// defaults and unsoftened floors are expressed relative to it.
    pub fn diameter(&self) -> f64 {
        match self {
            SpatialDensity::GaussianBlob { sigma } => 10.0 * sigma,
            SpatialDensity::ExponentialDisk {
                scale_radius,
                scale_height,
            } => 2.0 * (5.0 * scale_radius).hypot(5.0 * scale_height),
        }
    }

    /// Distance from `x` to the core region holding ~all of the mass
    /// (a ball of radius `5σ`, or a cylinder of radius `5·scale_radius` and
    /// half-height `5·scale_height`). Zero inside the core.
    pub fn core_distance(&self, x: &[f64; 3]) -> f64 {
        match self {
            SpatialDensity::GaussianBlob { sigma } => {
                let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
                (r - 5.0 * sigma).max(0.0)
            }
            SpatialDensity::ExponentialDisk {
                scale_radius,
                scale_height,
            } => {
                let dr = (x[0].hypot(x[1]) - 5.0 * scale_radius).max(0.0);
                let dz = (x[2].abs() - 5.0 * scale_height).max(0.0);
                dr.hypot(dz)
            }
        }
    }

    /// Exact sampler for this density.
    pub fn sampler(&self) -> PointSampler<[f64; 3]> {
        match self {
            SpatialDensity::GaussianBlob { sigma } => {
                let s = *sigma;
                Arc::new(move |rng| {
                    let g = |rng: &mut rand_chacha::ChaCha8Rng| -> f64 {
                        StandardNormal.sample(rng)
                    };
                    [s * g(rng), s * g(rng), s * g(rng)]
                })
            }
            SpatialDensity::ExponentialDisk {
                scale_radius,
                scale_height,
            } => {
                let rd = *scale_radius;
                let hz = *scale_height;
                Arc::new(move |rng| {
                    // R has density ∝ R e^{-R/rd}: a Gamma(2) scaled by rd,
                    // i.e. the sum of two unit exponentials.
                    let e1: f64 = Exp1.sample(rng);
                    let e2: f64 = Exp1.sample(rng);
                    let r = rd * (e1 + e2);
                    let phi = rng.random_range(0.0..TAU);
                    let ez: f64 = Exp1.sample(rng);
                    let z = if rng.random::<bool>() { hz * ez } else { -hz * ez };
                    [r * phi.cos(), r * phi.sin(), z]
                })
            }
        }
    }
}

/// Interaction kernel `d ↦ 1/sqrt(d² + ε²)`, with a hard floor standing in
/// for `ε = 0` so the unsoftened kernel never divides by zero outright.
#[derive(Debug, Clone, Copy)]
struct Kernel {
    eps_sq: f64,
    min_distance: f64,
}

impl Kernel {
    fn eval(&self, d: f64) -> f64 {
        1.0 / (d * d + self.eps_sq).sqrt().max(self.min_distance)
    }
}

/// A star-field model: counting law, spatial density, lognormal mass law,
/// coupling constant, and softening.
#[derive(Debug, Clone, Serialize)]
pub struct GravityModel {
    count: CountLaw,
    density: SpatialDensity,
    mass_mean: f64,
    mass_sd: f64,
    gravitational_constant: f64,
    /// `None` means the bare `1/r` kernel.
    softening: Option<f64>,
    /// Minimum allowed distance from an evaluation point to the core region
    /// when unsoftened.
    exclusion_radius: f64,
}

impl GravityModel {
    /// A model with softening defaulted to `10⁻³ ×` the density's diameter.
    /// `mass_mean` is the mean star mass `b_m`, `mass_sd` its standard
    /// deviation `d_m`; masses are lognormal (`mass_sd = 0` makes them
    /// deterministic).
    pub fn new(
        count: CountLaw,
        density: SpatialDensity,
        mass_mean: f64,
        mass_sd: f64,
        gravitational_constant: f64,
    ) -> Result<Self> {
        if !(mass_mean > 0.0 && mass_mean.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "mass mean must be positive and finite, got {mass_mean}"
            )));
        }
        if !(mass_sd >= 0.0 && mass_sd.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "mass sd must be non-negative and finite, got {mass_sd}"
            )));
        }
        if !(gravitational_constant > 0.0 && gravitational_constant.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "coupling constant must be positive and finite, got {gravitational_constant}"
            )));
        }
        let softening = Some(1e-3 * density.diameter());
        Ok(GravityModel {
            count,
            density,
            mass_mean,
            mass_sd,
            gravitational_constant,
            softening,
            exclusion_radius: 0.0,
        })
    }

    /// Override the softening length; `None` selects the bare `1/r` kernel,
    /// which is only evaluated at points kept away from the mass by
    /// [`with_exclusion_radius`](Self::with_exclusion_radius).
    pub fn with_softening(mut self, softening: Option<f64>) -> Result<Self> {
        if let Some(eps) = softening {
            if !(eps > 0.0 && eps.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "softening must be positive and finite, got {eps}"
                )));
            }
        }
        self.softening = softening;
        Ok(self)
    }

    pub fn with_exclusion_radius(mut self, radius: f64) -> Result<Self> {
        if !(radius >= 0.0 && radius.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "exclusion radius must be non-negative and finite, got {radius}"
            )));
        }
        self.exclusion_radius = radius;
        Ok(self)
    }

    pub fn count(&self) -> &CountLaw {
        &self.count
    }

    pub fn density(&self) -> &SpatialDensity {
        &self.density
    }

    pub fn mass_mean(&self) -> f64 {
        self.mass_mean
    }

    pub fn mass_sd(&self) -> f64 {
        self.mass_sd
    }

    pub fn gravitational_constant(&self) -> f64 {
        self.gravitational_constant
    }

    pub fn softening(&self) -> Option<f64> {
        self.softening
    }

    fn kernel(&self) -> Kernel {
        match self.softening {
            Some(eps) => Kernel {
                eps_sq: eps * eps,
                min_distance: 0.0,
            },
            None => Kernel {
                eps_sq: 0.0,
                min_distance: 1e-12 * self.density.diameter(),
            },
        }
    }

    /// Unsoftened kernels blow up inside the mass distribution: refuse
    /// evaluation points on or inside the core unless a softening length is
    /// set, and honor the configured exclusion radius outside it.
    fn check_evaluation_point(&self, x: &[f64; 3]) -> Result<()> {
        if self.softening.is_some() {
            return Ok(());
        }
        let d = self.density.core_distance(x);
        if d <= self.exclusion_radius {
            return Err(Error::SingularEvaluationPoint(format!(
                "unsoftened evaluation point ({}, {}, {}) is {d:.3e} from the mass \
                 core, within the exclusion radius {:.3e}; enable softening or move \
                 the point outside",
                x[0], x[1], x[2], self.exclusion_radius
            )));
        }
        Ok(())
    }

    /// The potential at `point` as a functional of the marked star field.
    pub fn potential_functional(
        &self,
        point: [f64; 3],
        name: impl Into<String>,
    ) -> Result<Functional<[f64; 3]>> {
        self.check_evaluation_point(&point)?;
        let kern = self.kernel();
        let g = self.gravitational_constant;
        Ok(Functional::new(name, move |x: &[f64; 3], mass| {
            g * mass * kern.eval(distance(x, &point))
        }))
    }

    /// The full random-measure model: counted positions with lognormal
    /// mass marks matching `(mass_mean, mass_sd)`.
    pub fn measure_model(&self) -> MeasureModel<[f64; 3]> {
        let base = MeasureModel::new(self.count.clone(), self.density.sampler());
        if self.mass_sd == 0.0 {
            let m = self.mass_mean;
            base.with_marks(Arc::new(move |_, _| m))
        } else {
            let ratio = self.mass_sd / self.mass_mean;
            let sigma_sq = (1.0 + ratio * ratio).ln();
            let mu = self.mass_mean.ln() - sigma_sq / 2.0;
            let kernel = samplers::lognormal_mark(mu, sigma_sq.sqrt())
                .expect("parameters validated at construction");
            base.with_marks(kernel)
        }
    }
}

fn distance(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    (dx * dx + dy * dy + dz * dz).sqrt()
}

fn simpson_weight(i: usize, n: usize) -> f64 {
    if i == 0 || i == n {
        1.0
    } else if i % 2 == 1 {
        4.0
    } else {
        2.0
    }
}

/// Composite-Simpson nodes and weights on `[a, b]` with `n` (even) panels.
fn simpson_nodes(a: f64, b: f64, n: usize) -> Vec<(f64, f64)> {
    let h = (b - a) / n as f64;
    (0..=n)
        .map(|i| (a + i as f64 * h, simpson_weight(i, n) * h / 3.0))
        .collect()
}

/// Smooth extraction window `e^{-(d/a)^4}`: ≈1 within `a` of an evaluation
/// point, 0 beyond `3a`.
fn window4(d: f64, a: f64) -> f64 {
    if d >= 3.0 * a {
        return 0.0;
    }
    let q = (d / a) * (d / a);
    (-(q * q)).exp()
}

/// Characteristic step of the tensor grid, which sizes the extraction
/// windows: features narrower than this are handed to the spherical patches.
fn grid_step(density: &SpatialDensity) -> f64 {
    match density {
        SpatialDensity::GaussianBlob { sigma } => 16.0 * sigma / BLOB_PANELS as f64,
        SpatialDensity::ExponentialDisk {
            scale_radius,
            scale_height,
        } => {
            let hr = 15.0 * scale_radius / DISK_RADIAL_PANELS as f64;
            let hz = 10.0 * scale_height / DISK_VERTICAL_PANELS as f64;
            let arc = 2.0 * scale_radius * TAU / DISK_ANGULAR_NODES as f64;
            hr.max(hz).max(arc)
        }
    }
}

const BLOB_PANELS: usize = 80;
const DISK_RADIAL_PANELS: usize = 144;
const DISK_ANGULAR_NODES: usize = 64;
const DISK_VERTICAL_PANELS: usize = 28;

/// Near-field integrals over the window around `center`:
/// `[∫ρWk, ∫ρWk², ∫ρWk·k_other]` with `W(d) = e^{-(d/a)^4}` in the distance
/// to `center` (last entry 0 without `other`). Spherical coordinates around
/// the evaluation point make the kernel a 1-D radial factor, so a graded
/// radial grid resolves any softening length; the polar integral splits at
/// the disk's `|z|` kink when it crosses the patch.
fn patch_integrals(
    density: &SpatialDensity,
    kern: Kernel,
    center: &[f64; 3],
    a: f64,
    other: Option<&[f64; 3]>,
) -> [f64; 3] {
    let rcut = 2.5 * a;
    let eps = kern.eps_sq.sqrt();
    let seg1 = (3.0 * eps).min(rcut);
    let mut radial = Vec::new();
    if seg1 > 0.0 && seg1 < rcut {
        radial.extend(simpson_nodes(0.0, seg1, 64));
        radial.extend(simpson_nodes(seg1, rcut, 192));
    } else {
        radial.extend(simpson_nodes(0.0, rcut, 192));
    }
    let nphi = 32usize;
    let dphi = TAU / nphi as f64;
    let phis: Vec<(f64, f64)> = (0..nphi)
        .map(|k| {
            let p = (k as f64 + 0.5) * dphi;
            (p.cos(), p.sin())
        })
        .collect();
    let mut out = [0.0f64; 3];
    for (r, wr) in radial {
        if r == 0.0 {
            continue; // r² kills the origin node
        }
        let k1 = kern.eval(r);
        let geom = wr * r * r * window4(r, a);
        let mut segments = vec![(0.0, PI)];
        if matches!(density, SpatialDensity::ExponentialDisk { .. }) {
            let cz = -center[2] / r;
            if cz.abs() < 1.0 {
                let th = cz.acos();
                if th > 1e-12 && th < PI - 1e-12 {
                    segments = vec![(0.0, th), (th, PI)];
                }
            }
        }
        let (mut s_rho, mut s_rho_other) = (0.0, 0.0);
        for (t0, t1) in segments {
            for (theta, wt) in simpson_nodes(t0, t1, 48) {
                let (st, ct) = theta.sin_cos();
                let w_theta = wt * st;
                for (cp, sp) in &phis {
                    let x = [
                        center[0] + r * st * cp,
                        center[1] + r * st * sp,
                        center[2] + r * ct,
                    ];
                    let contribution = w_theta * dphi * density.pdf(&x);
                    s_rho += contribution;
                    if let Some(o) = other {
                        s_rho_other += contribution * kern.eval(distance(&x, o));
                    }
                }
            }
        }
        out[0] += geom * k1 * s_rho;
        out[1] += geom * k1 * k1 * s_rho;
        out[2] += geom * k1 * s_rho_other;
    }
    out
}

/// The six density-weighted kernel integrals:
/// `[∫ρ, ∫ρk_z, ∫ρk_z², ∫ρk_w, ∫ρk_w², ∫ρk_zk_w]`, unnormalized (divide by
/// the first entry to correct for envelope truncation).
///
/// Each is split into a windowed far part on the density's tensor grid plus
/// the near-field patch around each evaluation point, so kernels stay
/// accurate even when the softening length is far below the grid step. The
/// cross term uses smaller windows sized to keep the two patches disjoint;
/// evaluation points closer together than the grid scale share one window.
fn kernel_integrals(
    density: &SpatialDensity,
    kern: Kernel,
    z: &[f64; 3],
    w: &[f64; 3],
) -> [f64; 6] {
    let h = grid_step(density);
    let a = 4.0 * h;
    let dzw = distance(z, w);
    let separated = dzw >= 6.0 * h;
    let ap = if separated { (dzw / 6.0).min(a) } else { a };
    let mut sums = [0.0f64; 6];
    let mut add = |x: [f64; 3], weight: f64| {
        let dz = distance(&x, z);
        let dw = distance(&x, w);
        let kz = kern.eval(dz);
        let kw = kern.eval(dw);
        let wz = window4(dz, a);
        let ww = window4(dw, a);
        let cross_keep = if separated {
            1.0 - window4(dz, ap) - window4(dw, ap)
        } else {
            1.0 - wz
        };
        sums[0] += weight;
        sums[1] += weight * kz * (1.0 - wz);
        sums[2] += weight * kz * kz * (1.0 - wz);
        sums[3] += weight * kw * (1.0 - ww);
        sums[4] += weight * kw * kw * (1.0 - ww);
        sums[5] += weight * kz * kw * cross_keep;
    };
    match density {
        SpatialDensity::GaussianBlob { sigma } => {
            // Cartesian Simpson on [-8σ, 8σ]³ with the separable Gaussian
            // weight precomputed per axis.
            let n = BLOB_PANELS;
            let half = 8.0 * sigma;
            let h = 2.0 * half / n as f64;
            let scale = (h / 3.0).powi(3) / ((TAU).powf(1.5) * sigma.powi(3));
            let axis: Vec<(f64, f64)> = (0..=n)
                .map(|i| {
                    let x = -half + i as f64 * h;
                    let g = (-x * x / (2.0 * sigma * sigma)).exp();
                    (x, simpson_weight(i, n) * g)
                })
                .collect();
            for (xi, wi) in &axis {
                for (xj, wj) in &axis {
                    let wij = wi * wj;
                    for (xl, wl) in &axis {
                        add([*xi, *xj, *xl], scale * wij * wl);
                    }
                }
            }
        }
        SpatialDensity::ExponentialDisk {
            scale_radius,
            scale_height,
        } => {
            // Cylindrical grid: Simpson in R on [0, 15·Rd] (the R·e^{-R/Rd}
            // element vanishes at both ends), midpoint in the periodic φ,
            // Simpson in z split at the |z| kink.
            let rd = *scale_radius;
            let hz = *scale_height;
            let nr = DISK_RADIAL_PANELS;
            let hr = 15.0 * rd / nr as f64;
            let radial: Vec<(f64, f64)> = (0..=nr)
                .map(|i| {
                    let r = i as f64 * hr;
                    (r, simpson_weight(i, nr) * (hr / 3.0) * r * (-r / rd).exp())
                })
                .collect();
            let nphi = DISK_ANGULAR_NODES;
            let dphi = TAU / nphi as f64;
            let angles: Vec<(f64, f64)> = (0..nphi)
                .map(|k| {
                    let phi = (k as f64 + 0.5) * dphi;
                    (phi.cos(), phi.sin())
                })
                .collect();
            let nz = DISK_VERTICAL_PANELS;
            let hzs = 10.0 * hz / nz as f64;
            let mut vertical: Vec<(f64, f64)> = Vec::with_capacity(2 * nz + 2);
            for sign in [-1.0, 1.0] {
                for j in 0..=nz {
                    let zv = sign * j as f64 * hzs;
                    let wz = simpson_weight(j, nz) * (hzs / 3.0) * (-zv.abs() / hz).exp();
                    vertical.push((zv, wz));
                }
            }
            let norm = 4.0 * PI * rd * rd * hz;
            for (r, wr) in &radial {
                for (c, s) in &angles {
                    let x0 = r * c;
                    let x1 = r * s;
                    let wrp = wr * dphi / norm;
                    for (zv, wz) in &vertical {
                        add([x0, x1, *zv], wrp * wz);
                    }
                }
            }
        }
    }
    drop(add);
    let pz = patch_integrals(density, kern, z, a, None);
    let pw = patch_integrals(density, kern, w, a, None);
    sums[1] += pz[0];
    sums[2] += pz[1];
    sums[3] += pw[0];
    sums[4] += pw[1];
    if separated {
        sums[5] += patch_integrals(density, kern, z, ap, Some(w))[2];
        sums[5] += patch_integrals(density, kern, w, ap, Some(z))[2];
    } else {
        sums[5] += patch_integrals(density, kern, z, a, Some(w))[2];
    }
    sums
}

/// Closed-form moment references for the potential at two evaluation points,
/// computed by deterministic quadrature of the density-weighted kernel
/// integrals.
///
/// Accuracy: ~1e-8 relative for evaluation points outside the mass core,
/// ~1e-4 relative for points inside it (the near-field patches resolve any
/// softening length, down to none at all; what remains is the smooth
/// far-field error of the fixed tensor grid).
#[derive(Debug, Clone, Serialize)]
pub struct GravityReference {
    pub mean_z: f64,
    pub var_z: f64,
    pub mean_w: f64,
    pub var_w: f64,
    pub cov_wz: f64,
    /// Fraction of the probability mass captured by the quadrature envelope
    /// before self-normalization; should be ≈ 1.
    pub mass_captured: f64,
}

/// Evaluate the mean/variance/covariance formulas for the potential at `z`
/// and `w` under `model`.
pub fn potential_reference(
    model: &GravityModel,
    z: [f64; 3],
    w: [f64; 3],
) -> Result<GravityReference> {
    model.check_evaluation_point(&z)?;
    model.check_evaluation_point(&w)?;
    let sums = kernel_integrals(&model.density, model.kernel(), &z, &w);
    let m0 = sums[0];
    let (ikz, ikz2) = (sums[1] / m0, sums[2] / m0);
    let (ikw, ikw2) = (sums[3] / m0, sums[4] / m0);
    let ikzw = sums[5] / m0;
    let c = model.count.mean();
    let excess = model.count.variance() - c;
    let g = model.gravitational_constant;
    let b = model.mass_mean;
    let second = b * b + model.mass_sd * model.mass_sd;
    let mean = |ik: f64| c * g * b * ik;
    let var = |ik: f64, ik2: f64| c * g * g * second * ik2 + excess * (g * b * ik).powi(2);
    Ok(GravityReference {
        mean_z: mean(ikz),
        var_z: var(ikz, ikz2),
        mean_w: mean(ikw),
        var_w: var(ikw, ikw2),
        cov_wz: c * g * g * second * ikzw + excess * (g * b * ikw) * (g * b * ikz),
        mass_captured: m0,
    })
}

/// Monte Carlo study of the potential at two evaluation points, with the
/// quadrature references attached.
#[derive(Debug, Clone, Serialize)]
pub struct GravityStudy {
    pub n_replicates: u64,
    pub seed: u64,
    pub mean_z: f64,
    pub mean_z_se: f64,
    pub var_z: f64,
    pub var_z_se: f64,
    pub mean_w: f64,
    pub mean_w_se: f64,
    pub var_w: f64,
    pub var_w_se: f64,
    pub cov_wz: f64,
    pub cov_wz_se: f64,
    pub reference: GravityReference,
}

/// Estimate the potential moments at `z` and `w` from `n_replicates` seeded
/// realizations of the star field, one shared set of realizations for both
/// points.
///
/// Refuses runs whose expected work `n_replicates × E K` exceeds ~10⁹ star
/// draws — for astronomical counting laws use [`potential_reference`], which
/// is exact in the count.
pub fn gravity_estimate(
    model: &GravityModel,
    z: [f64; 3],
    w: [f64; 3],
    n_replicates: u64,
    seed: u64,
) -> Result<GravityStudy> {
    if n_replicates < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 replicates, got {n_replicates}"
        )));
    }
    let c = model.count.mean();
    let work = n_replicates as f64 * c;
    if work > 1e9 {
        return Err(Error::InvalidParameter(format!(
            "{n_replicates} replicates of a mean count {c:.3e} is ~{work:.2e} star \
             draws; beyond 1e9, use potential_reference, which handles any count \
             exactly"
        )));
    }
    let reference = potential_reference(model, z, w)?;
    let phi_z = model.potential_functional(z, "Phi[z]")?;
    let phi_w = model.potential_functional(w, "Phi[w]")?;
    let cols = collect_values(&model.measure_model(), &[phi_z, phi_w], n_replicates, seed);
    let mz = SampleMoments::from_slice(&cols[0]);
    let mw = SampleMoments::from_slice(&cols[1]);
    let (cov, cov_se) = sample_covariance(&cols[1], &cols[0]);
    Ok(GravityStudy {
        n_replicates,
        seed,
        mean_z: mz.mean(),
        mean_z_se: mz.mean_se(),
        var_z: mz.variance(),
        var_z_se: mz.variance_se(),
        mean_w: mw.mean(),
        mean_w_se: mw.mean_se(),
        var_w: mw.variance(),
        var_w_se: mw.variance_se(),
        cov_wz: cov,
        cov_wz_se: cov_se,
        reference,
    })
}

/// Exact integer facts about the Milky Way preset's counting law, as decimal
/// strings where the values exceed what a JSON number holds losslessly.
#[derive(Debug, Clone, Serialize)]
pub struct MilkyWayFacts {
    /// Smallest star count the die can roll.
    pub lower: String,
    /// Largest star count the die can roll.
    pub upper: String,
    /// Mean star count `c` (equals the variance).
    pub mean_count: String,
    /// Number of sides.
    pub sides: u64,
    /// 1-based rank of the side count among the primes, when prime.
    pub sides_prime_rank: Option<u64>,
    /// Family index `k` of the die.
    pub family_index: String,
    /// Exact product of the mean star mass and the mean count.
    pub mass_mean_times_count: String,
}

/// The Milky Way preset: the mean-equals-variance counting law together with
/// an illustrative exponential-disk geometry and lognormal mass law.
#[derive(Debug, Clone, Serialize)]
pub struct MilkyWayPreset {
    pub model: GravityModel,
    pub facts: MilkyWayFacts,
}

/// Star-count model for a Milky Way-like galaxy: the first mean-equals-
/// variance die whose mean reaches 2.5·10¹¹ stars. Its side count turns out
/// to be prime, so the law also arises from the two-prime product
/// construction. The disk geometry (scale radius 3, scale height 0.3, in
/// kiloparsec-like units) and the lognormal mass law (mean 4, sd 2, solar
/// masses) are illustrative stand-ins; the counting-law facts are exact.
pub fn milkyway_preset() -> Result<MilkyWayPreset> {
    let die = first_die_with_mean_at_least(250_000_000_000u64)?;
    let support = die.support();
    let (m, n) = support
        .as_u64_pair()
        .expect("milky way support fits in u64");
    let sides = n - m + 1;
    let mass_mean = 4.0;
    let facts = MilkyWayFacts {
        lower: m.to_string(),
        upper: n.to_string(),
        mean_count: die.mean().to_string(),
        sides,
        sides_prime_rank: prime_rank(sides),
        family_index: die.index().to_string(),
        mass_mean_times_count: (die.mean() * BigUint::from(4u32)).to_string(),
    };
    let model = GravityModel::new(
        CountLaw::uniform(m, n)?,
        SpatialDensity::exponential_disk(3.0, 0.3)?,
        mass_mean,
        2.0,
        1.0,
    )?;
    Ok(MilkyWayPreset { model, facts })
}
