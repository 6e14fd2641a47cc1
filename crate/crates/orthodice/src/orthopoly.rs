//! Monic orthogonal polynomial systems of discrete measures: Gram-Schmidt
//! systems of (thinned) dice, Charlier systems of Poisson laws, and weighted
//! `L^p` distances between the two. Along a matched-mean thinned-die sequence
//! the die polynomials converge to the Charlier polynomials, and
//! [`convergence_report`] tabulates that collapse together with the
//! Poisson-weighted curve data used to plot it.
//!
//! Everything measure-side is exact rational arithmetic; floating point
//! enters only in the `L^p` sums, which carry an explicit truncation bound.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::dice::{die_from_index, SupportPair};
use crate::error::{Error, Result};
use crate::law::{raw_moment, ThinningParam};
use crate::{big_to_rat, rat_to_f64, Rat};

/// A monic polynomial with exact rational coefficients, ascending degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    coeffs: Vec<Rat>,
}

impl Polynomial {
    fn monic(coeffs: Vec<Rat>) -> Self {
        debug_assert!(coeffs.last().map(|c| c.is_one()).unwrap_or(false));
        Polynomial { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficients in ascending degree; the last entry is 1.
    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn coeffs_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(rat_to_f64).collect()
    }

    /// Exact evaluation by Horner's rule.
    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        horner(&self.coeffs_f64(), x)
    }

    /// Coefficientwise difference `self - other` (not monic in general).
    pub fn diff_coeffs(&self, other: &Polynomial) -> Vec<Rat> {
        let len = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![Rat::zero(); len];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            out[i] -= c;
        }
        out
    }
}

impl std::fmt::Display for Polynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for (pow, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() && self.degree() > 0 {
                continue;
            }
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let a = c.abs();
            if !a.is_one() || pow == 0 {
                write!(f, "{a}")?;
            }
            match pow {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{pow}")?,
            }
        }
        Ok(())
    }
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

/// What measure a polynomial system is orthogonal against.
#[derive(Debug, Clone)]
pub enum MeasureDescriptor {
    /// A die on `support` thinned by retention probability `a`.
    ThinnedDie { support: SupportPair, a: Rat },
    /// Poisson with mean `theta`; weighted sums truncate at `tail_tol`.
    Poisson { theta: Rat, tail_tol: f64 },
    /// Built from a caller-supplied moment list.
    RawMoments,
}

/// Monic orthogonal polynomials of one measure, degrees `0..=d_max`.
#[derive(Debug, Clone)]
pub struct PolySystem {
    measure: MeasureDescriptor,
    polys: Vec<Polynomial>,
}

impl PolySystem {
    pub fn measure(&self) -> &MeasureDescriptor {
        &self.measure
    }

    pub fn d_max(&self) -> usize {
        self.polys.len() - 1
    }

    pub fn polys(&self) -> &[Polynomial] {
        &self.polys
    }

    /// The degree-`d` member; `d ≤ d_max`.
    pub fn poly(&self, d: usize) -> &Polynomial {
        &self.polys[d]
    }
}

/// `⟨A, B⟩ = Σ_{i,j} a_i b_j μ_{i+j}` against a raw moment list.
pub fn moment_inner_product(moments: &[Rat], a: &Polynomial, b: &Polynomial) -> Rat {
    inner(moments, a.coeffs(), b.coeffs())
}

fn inner(mu: &[Rat], a: &[Rat], b: &[Rat]) -> Rat {
    let mut s = Rat::zero();
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            if bj.is_zero() {
                continue;
            }
            s += ai * bj * &mu[i + j];
        }
    }
    s
}

/// Exact determinant of the `(k+1) × (k+1)` Hankel matrix `(μ_{i+j})`.
fn hankel_det(mu: &[Rat], k: usize) -> Rat {
    let n = k + 1;
    let mut m: Vec<Vec<Rat>> = (0..n)
        .map(|i| (0..n).map(|j| mu[i + j].clone()).collect())
        .collect();
    let mut det = Rat::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return Rat::zero();
        };
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        det *= m[col][col].clone();
        let pivot = m[col][col].clone();
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = &m[r][col] / &pivot;
            for c in col..n {
                let sub = &factor * &m[col][c];
                m[r][c] -= sub;
            }
        }
    }
    det
}

/// Monic Gram-Schmidt orthogonalization of `1, x, x², …` against the moment
/// functional given by `moments = [μ₀, …, μ_{2·d_max}]` with `μ₀ = 1`.
///
/// Fails with `DegenerateMomentMatrix` when a leading principal minor of the
/// Hankel moment matrix vanishes, i.e. the measure sits on fewer than
/// `d_max + 1` points and cannot carry a degree-`d_max` orthogonal system.
pub fn gram_schmidt_system(moments: &[Rat], d_max: usize) -> Result<PolySystem> {
    if moments.len() < 2 * d_max + 1 {
        return Err(Error::InvalidParameter(format!(
            "need {} moments for degree {}, got {}",
            2 * d_max + 1,
            d_max,
            moments.len()
        )));
    }
    if !moments[0].is_one() {
        return Err(Error::InvalidParameter(format!(
            "moment list must start with μ₀ = 1, got {}",
            moments[0]
        )));
    }
    for k in 0..=d_max {
        if hankel_det(moments, k) <= Rat::zero() {
            return Err(Error::DegenerateMomentMatrix(format!(
                "Hankel minor of order {k} is not positive; the measure has \
                 fewer than {} support points",
                k + 1
            )));
        }
    }
    Ok(PolySystem {
        measure: MeasureDescriptor::RawMoments,
        polys: monic_gram_schmidt(moments, d_max),
    })
}

fn monic_gram_schmidt(mu: &[Rat], d_max: usize) -> Vec<Polynomial> {
    let mut polys: Vec<Vec<Rat>> = vec![vec![Rat::one()]];
    for k in 1..=d_max {
        let mut xk = vec![Rat::zero(); k + 1];
        xk[k] = Rat::one();
        let mut p = xk.clone();
        for q in &polys {
            let coef = inner(mu, &xk, q) / inner(mu, q, q);
            for (i, qi) in q.iter().enumerate() {
                p[i] -= &coef * qi;
            }
        }
        polys.push(p);
    }
    polys.into_iter().map(Polynomial::monic).collect()
}

/// Monic Charlier system of Poisson(`theta`) by the three-term recurrence
/// `C₀ = 1`, `C₁ = x − θ`, `C_{n+1} = (x − n − θ)·C_n − nθ·C_{n−1}`.
pub fn charlier_system(theta: &Rat, d_max: usize) -> Result<PolySystem> {
    if *theta <= Rat::zero() {
        return Err(Error::InvalidParameter(format!(
            "Charlier mean must be positive, got {theta}"
        )));
    }
    let mut polys: Vec<Vec<Rat>> = vec![vec![Rat::one()]];
    if d_max >= 1 {
        polys.push(vec![-theta.clone(), Rat::one()]);
    }
    for n in 1..d_max {
        let nr = Rat::from_integer(BigInt::from(n));
        let shift = &nr + theta;
        let cross = &nr * theta;
        let (cn, cm) = (polys[n].clone(), polys[n - 1].clone());
        let mut nxt = vec![Rat::zero(); n + 2];
        for (i, ci) in cn.iter().enumerate() {
            nxt[i + 1] += ci;
            nxt[i] -= &shift * ci;
        }
        for (i, ci) in cm.iter().enumerate() {
            nxt[i] -= &cross * ci;
        }
        polys.push(nxt);
    }
    Ok(PolySystem {
        measure: MeasureDescriptor::Poisson {
            theta: theta.clone(),
            tail_tol: DEFAULT_TAIL_TOL,
        },
        polys: polys.into_iter().map(Polynomial::monic).collect(),
    })
}

/// Default truncation tolerance for Poisson-weighted sums.
pub const DEFAULT_TAIL_TOL: f64 = 1e-12;

/// Exact raw moments `μ₀..μ_{r_max}` of a die on `support` thinned by `a`.
pub fn thinned_raw_moments(support: &SupportPair, a: &ThinningParam, r_max: u32) -> Vec<Rat> {
    (0..=r_max).map(|r| raw_moment(support, a, r)).collect()
}

/// Monic orthogonal system of the `a`-thinned die on `support`.
pub fn thinned_die_system(
    support: &SupportPair,
    a: &ThinningParam,
    d_max: usize,
) -> Result<PolySystem> {
    let moments = thinned_raw_moments(support, a, 2 * d_max as u32);
    let system = gram_schmidt_system(&moments, d_max)?;
    Ok(PolySystem {
        measure: MeasureDescriptor::ThinnedDie {
            support: support.clone(),
            a: a.value().clone(),
        },
        polys: system.polys,
    })
}

/// A Poisson-weighted `L^p` distance together with the point where the
/// certified tail bound allowed the sum to stop.
#[derive(Debug, Clone, Copy)]
pub struct LpDistance {
    pub value: f64,
    pub truncation_point: u64,
}

/// `‖P − Q‖_{L^p(κ_θ)} = (Σ_x κ_θ{x} |P(x) − Q(x)|^p)^{1/p}`.
///
/// The sum stops at the first `x ≥ max(2θ, 2p·deg)` where five times the
/// enveloped term `κ{x}·(Σ_i |d_i| x^i)^p` drops below `tail_tol`: past that
/// point consecutive terms shrink by at least `e^{1/2}/2 < 0.83`, so the
/// discarded tail is under `5×` the enveloped term, hence under `tail_tol`.
pub fn lp_distance(
    p_poly: &Polynomial,
    q_poly: &Polynomial,
    theta: &Rat,
    p: u32,
    tail_tol: f64,
) -> Result<LpDistance> {
    if p < 1 {
        return Err(Error::InvalidParameter(format!("L^p needs p ≥ 1, got {p}")));
    }
    if !(tail_tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tail tolerance must be positive, got {tail_tol}"
        )));
    }
    if *theta <= Rat::zero() {
        return Err(Error::InvalidParameter(format!(
            "Poisson weight needs θ > 0, got {theta}"
        )));
    }
    let diff = p_poly.diff_coeffs(q_poly);
    if diff.iter().all(|c| c.is_zero()) {
        return Ok(LpDistance {
            value: 0.0,
            truncation_point: 0,
        });
    }
    let coeffs: Vec<f64> = diff.iter().map(rat_to_f64).collect();
    let envelope: Vec<f64> = coeffs.iter().map(|c| c.abs()).collect();
    let deg = diff.iter().rposition(|c| !c.is_zero()).unwrap_or(0);
    let theta_f = rat_to_f64(theta);
    let ln_theta = theta_f.ln();
    let pf = p as f64;
    let x_min = (2.0 * theta_f).max(2.0 * pf * deg as f64).max(8.0);
    let mut log_w = -theta_f;
    let mut sum = 0.0;
    let mut x = 0u64;
    loop {
        let xf = x as f64;
        let dx = horner(&coeffs, xf).abs();
        if dx > 0.0 {
            sum += (log_w + pf * dx.ln()).exp();
        }
        let env = horner(&envelope, xf).max(f64::MIN_POSITIVE);
        if xf >= x_min && 5.0 * (log_w + pf * env.ln()).exp() < tail_tol {
            break;
        }
        x += 1;
        log_w += ln_theta - (x as f64).ln();
    }
    Ok(LpDistance {
        value: sum.powf(1.0 / pf),
        truncation_point: x,
    })
}

/// One row of a convergence table: die index, thinning value, and the
/// distance to the Charlier polynomial for each requested `p`.
#[derive(Debug, Clone)]
pub struct ConvergenceEntry {
    pub index: u64,
    pub a: Rat,
    pub distances: Vec<LpDistance>,
}

/// Poisson-weighted plot data: for each grid point `x`, the weight
/// `κ_θ{x}`, the Charlier curve `C_d(x)·κ_θ{x}`, and one die curve
/// `P_d^{(l)}(x)·κ_θ{x}` per index `l`.
#[derive(Debug, Clone)]
pub struct WeightedCurve {
    pub degree: usize,
    pub xs: Vec<u64>,
    pub weight: Vec<f64>,
    pub charlier: Vec<f64>,
    pub dice: Vec<(u64, Vec<f64>)>,
}

/// Distances from matched-mean thinned-die polynomials to the Charlier
/// system of `θ = c(k0)`, plus the weighted curve data for plotting.
#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub theta: Rat,
    pub degree: usize,
    pub p_list: Vec<u32>,
    pub entries: Vec<ConvergenceEntry>,
    pub curve: WeightedCurve,
}

/// For each index `l` in `indices`, thin die `l` by `a(l) = c(k0)/c(l)` so
/// its mean stays `c(k0)`, build its degree-`degree` orthogonal polynomial,
/// and measure the `L^p` distance to the matching Charlier polynomial for
/// every `p` in `p_list`.
pub fn convergence_report(
    k0: u64,
    indices: &[u64],
    degree: usize,
    p_list: &[u32],
    tail_tol: f64,
) -> Result<ConvergenceReport> {
    let base = die_from_index(k0)?;
    let theta = big_to_rat(base.mean());
    let charlier = charlier_system(&theta, degree)?;
    let mut entries = Vec::with_capacity(indices.len());
    let mut systems = Vec::with_capacity(indices.len());
    for &l in indices {
        let die = die_from_index(l)?;
        let a_val = &theta / big_to_rat(die.mean());
        let a = ThinningParam::new(a_val)?;
        let system = thinned_die_system(die.support(), &a, degree)?;
        let distances = p_list
            .iter()
            .map(|&p| lp_distance(system.poly(degree), charlier.poly(degree), &theta, p, tail_tol))
            .collect::<Result<Vec<_>>>()?;
        entries.push(ConvergenceEntry {
            index: l,
            a: a.value().clone(),
            distances,
        });
        systems.push(system);
    }
    let curve = weighted_curves(&theta, degree, &charlier, indices, &systems);
    Ok(ConvergenceReport {
        theta,
        degree,
        p_list: p_list.to_vec(),
        entries,
        curve,
    })
}

/// Curves over the window `θ ± 4.5√θ` where essentially all Poisson mass
/// lives.
fn weighted_curves(
    theta: &Rat,
    degree: usize,
    charlier: &PolySystem,
    indices: &[u64],
    systems: &[PolySystem],
) -> WeightedCurve {
    let theta_f = rat_to_f64(theta);
    let half_width = 4.5 * theta_f.sqrt();
    let lo = (theta_f - half_width).floor().max(0.0) as u64;
    let hi = (theta_f + half_width).ceil() as u64;
    let xs: Vec<u64> = (lo..=hi).collect();
    let ln_theta = theta_f.ln();
    let mut weight = Vec::with_capacity(xs.len());
    let mut log_w = -theta_f; // ln κ{0}
    for x in 0..=hi {
        if x >= lo {
            weight.push(log_w.exp());
        }
        log_w += ln_theta - ((x + 1) as f64).ln();
    }
    let cpoly = charlier.poly(degree);
    let charlier_col = xs
        .iter()
        .zip(&weight)
        .map(|(&x, &w)| cpoly.eval_f64(x as f64) * w)
        .collect();
    let dice = indices
        .iter()
        .zip(systems)
        .map(|(&l, sys)| {
            let pl = sys.poly(degree);
            let col = xs
                .iter()
                .zip(&weight)
                .map(|(&x, &w)| pl.eval_f64(x as f64) * w)
                .collect();
            (l, col)
        })
        .collect();
    WeightedCurve {
        degree,
        xs,
        weight,
        charlier: charlier_col,
        dice,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use num_bigint::BigUint;

    fn rat(n: i64) -> Rat {
        Rat::from_integer(BigInt::from(n))
    }

    fn rat_frac(n: i64, d: i64) -> Rat {
        Rat::new(BigInt::from(n), BigInt::from(d))
    }

    fn support(m: u64, n: u64) -> SupportPair {
        SupportPair::new(BigUint::from(m), BigUint::from(n)).unwrap()
    }

    /// Independent oracle: exact Gram-Schmidt against the *truncated*
    /// Poisson(θ) measure with rational weights `θ^x / x!` renormalized
    /// over `x = 0..=cutoff`. For cutoffs far beyond θ the truncated
    /// moments agree with the true ones to far better than 1e-10.
    fn truncated_poisson_gs(theta: &Rat, d_max: usize) -> Vec<Polynomial> {
        let theta_f = rat_to_f64(theta);
        let cutoff = (theta_f + 40.0 * theta_f.sqrt() + 25.0).ceil() as u64;
        let r_max = 2 * d_max;
        let mut mu = vec![Rat::zero(); r_max + 1];
        let mut total = Rat::zero();
        let mut v = Rat::one();
        for x in 0..=cutoff {
            let xr = rat(x as i64);
            total += &v;
            let mut xp = Rat::one();
            for slot in mu.iter_mut() {
                *slot += &v * &xp;
                xp *= &xr;
            }
            v = v * theta / rat(x as i64 + 1);
        }
        for slot in mu.iter_mut() {
            *slot /= &total;
        }
        monic_gram_schmidt(&mu, d_max)
    }

    #[test]
    fn gram_schmidt_first_steps() {
        // Die (0,4): P0 = 1, P1 = x - 2, P2 = x^2 - 4x + 2.
        let sys = thinned_die_system(&support(0, 4), &ThinningParam::full(), 2).unwrap();
        assert_eq!(sys.poly(0).coeffs(), &[rat(1)]);
        assert_eq!(sys.poly(1).coeffs(), &[rat(-2), rat(1)]);
        assert_eq!(sys.poly(2).coeffs(), &[rat(2), rat(-4), rat(1)]);
    }

    #[test]
    fn dirac_die_supports_only_degree_zero() {
        let dirac = support(5, 5);
        let ok = thinned_die_system(&dirac, &ThinningParam::full(), 0).unwrap();
        assert_eq!(ok.d_max(), 0);
        let err = thinned_die_system(&dirac, &ThinningParam::full(), 1).unwrap_err();
        assert_eq!(err.name(), "DegenerateMomentMatrix");
    }

    #[test]
    fn five_atom_die_caps_at_degree_four() {
        let s = support(0, 4);
        assert!(thinned_die_system(&s, &ThinningParam::full(), 4).is_ok());
        let err = thinned_die_system(&s, &ThinningParam::full(), 5).unwrap_err();
        assert_eq!(err.name(), "DegenerateMomentMatrix");
    }

    #[test]
    fn moment_list_validation() {
        let short = [Rat::one(), rat(2)];
        assert_eq!(
            gram_schmidt_system(&short, 1).unwrap_err().name(),
            "InvalidParameter"
        );
        let not_prob = [rat(2), rat(2), rat(6)];
        assert_eq!(
            gram_schmidt_system(&not_prob, 1).unwrap_err().name(),
            "InvalidParameter"
        );
    }

    #[test]
    fn charlier_small_cases_exact() {
        let sys = charlier_system(&rat_frac(7, 2), 1).unwrap();
        assert_eq!(sys.poly(1).coeffs(), &[rat_frac(-7, 2), rat(1)]);
        // θ = 114: C2 = x^2 - 229x + 12996, C3 = x^3 - 345x^2 + 39332x - 1481544.
        let sys = charlier_system(&rat(114), 3).unwrap();
        assert_eq!(sys.poly(2).coeffs(), &[rat(12996), rat(-229), rat(1)]);
        assert_eq!(
            sys.poly(3).coeffs(),
            &[rat(-1481544), rat(39332), rat(-345), rat(1)]
        );
        assert_eq!(sys.poly(3).to_string(), "x^3 - 345x^2 + 39332x - 1481544");
        assert!(charlier_system(&rat(0), 2).is_err());
    }

    #[test]
    fn charlier_matches_truncated_moment_gram_schmidt() {
        for theta in [rat(1), rat(2), rat(114)] {
            let rec = charlier_system(&theta, 5).unwrap();
            let oracle = truncated_poisson_gs(&theta, 5);
            for d in 0..=5 {
                let diff = rec.poly(d).diff_coeffs(&oracle[d]);
                for c in diff {
                    assert!(
                        rat_to_f64(&c).abs() < 1e-10,
                        "θ={theta}, degree {d}: coefficient gap {c}"
                    );
                }
            }
        }
    }

    #[test]
    fn charlier_norms_match_factorial_formula() {
        // ⟨C_n, C_n⟩ over Poisson(θ) = n!·θⁿ; direct weighted f64 sums.
        for theta in [1.0f64, 114.0] {
            let sys = charlier_system(&rat(theta as i64), 5).unwrap();
            for n in 0..=5usize {
                let pn = sys.poly(n);
                let mut log_w = -theta;
                let mut acc = 0.0;
                let cutoff = (theta + 40.0 * theta.sqrt() + 30.0) as u64;
                for x in 0..=cutoff {
                    let v = pn.eval_f64(x as f64);
                    acc += log_w.exp() * v * v;
                    log_w += theta.ln() - ((x + 1) as f64).ln();
                }
                let expected = (1..=n).product::<usize>() as f64 * theta.powi(n as i32);
                assert_abs_diff_eq!(acc / expected, 1.0, epsilon = 1e-10);
            }
        }
        // Spot value: ⟨C2, C2⟩ at θ = 1 equals 2.
        let sys = charlier_system(&rat(1), 2).unwrap();
        let c2 = sys.poly(2);
        let mut log_w = -1.0f64;
        let mut acc = 0.0;
        for x in 0..=60u64 {
            let v = c2.eval_f64(x as f64);
            acc += log_w.exp() * v * v;
            log_w -= ((x + 1) as f64).ln(); // ln θ = 0 at θ = 1
        }
        assert_abs_diff_eq!(acc, 2.0, epsilon = 1e-10);
    }

    #[test]
    fn thinned_die_first_degree_tracks_thinned_mean() {
        let s = support(96, 132);
        let full = thinned_die_system(&s, &ThinningParam::full(), 1).unwrap();
        assert_eq!(full.poly(1).coeffs(), &[rat(-114), rat(1)]);
        let half = ThinningParam::from_ratio(1, 2).unwrap();
        let thinned = thinned_die_system(&s, &half, 1).unwrap();
        assert_eq!(thinned.poly(1).coeffs(), &[rat(-57), rat(1)]);
    }

    #[test]
    fn matched_mean_systems_share_p0_and_p1_exactly() {
        // Thinned die with mean a·c = 114 vs Poisson(114): identical first
        // two raw moments force identical P0 and P1, coefficient for
        // coefficient as exact rationals.
        let die = die_from_index(19u32).unwrap();
        let a = ThinningParam::new(rat_frac(114, 140)).unwrap();
        let die_sys = thinned_die_system(die.support(), &a, 1).unwrap();
        let charlier = charlier_system(&rat(114), 1).unwrap();
        assert_eq!(die_sys.poly(0), charlier.poly(0));
        assert_eq!(die_sys.poly(1), charlier.poly(1));
    }

    #[test]
    fn degree_two_members_differ_across_families() {
        // Same mean and variance, but the third moments differ, so degree 2
        // separates the families: die (0,4) has μ₃ = 20, Poisson(2) has 22.
        let die_sys = thinned_die_system(&support(0, 4), &ThinningParam::full(), 2).unwrap();
        let charlier = charlier_system(&rat(2), 2).unwrap();
        assert_eq!(die_sys.poly(2).coeffs(), &[rat(2), rat(-4), rat(1)]);
        assert_eq!(charlier.poly(2).coeffs(), &[rat(4), rat(-5), rat(1)]);
        assert_ne!(die_sys.poly(2), charlier.poly(2));
        // Larger die, same story: (96,132) vs Poisson(114).
        let big = thinned_die_system(&support(96, 132), &ThinningParam::full(), 2).unwrap();
        assert_eq!(big.poly(2).coeffs(), &[rat(12882), rat(-228), rat(1)]);
        let c114 = charlier_system(&rat(114), 2).unwrap();
        assert_eq!(c114.poly(2).coeffs(), &[rat(12996), rat(-229), rat(1)]);
    }

    #[test]
    fn exact_pairwise_orthogonality_first_ten_dice() {
        let half = ThinningParam::from_ratio(1, 2).unwrap();
        for die in crate::dice::enumerate_orthogonal(10) {
            for a in [ThinningParam::full(), half.clone()] {
                let (m, n) = die.support().as_u64_pair().unwrap();
                // Thinning spreads the support down to 0; either way the
                // polynomial degree is capped by (number of atoms) - 1.
                let atoms = if a.is_full() { n - m + 1 } else { n + 1 };
                let d_max = 5.min(atoms as usize - 1);
                let sys = thinned_die_system(die.support(), &a, d_max).unwrap();
                let mu = thinned_raw_moments(die.support(), &a, 2 * d_max as u32);
                for i in 0..=d_max {
                    for j in 0..i {
                        let ip = moment_inner_product(&mu, sys.poly(i), sys.poly(j));
                        assert!(
                            ip.is_zero(),
                            "die {}, a={}: ⟨P{i}, P{j}⟩ = {ip}",
                            die.index(),
                            a.value()
                        );
                    }
                    let norm = moment_inner_product(&mu, sys.poly(i), sys.poly(i));
                    assert!(norm > Rat::zero());
                }
            }
        }
    }

    #[test]
    fn lp_distance_zero_iff_equal_and_pinned_baseline() {
        let c = charlier_system(&rat(114), 3).unwrap();
        let same = lp_distance(c.poly(3), c.poly(3), &rat(114), 2, 1e-12).unwrap();
        assert_eq!(same.value, 0.0);
        // Die 17 unthinned P3 = x^3 - 342x^2 + 38783x - 1458174 against
        // Charlier(114) C3; both columns pinned from a direct weighted sum.
        let die = die_from_index(17u32).unwrap();
        let sys = thinned_die_system(die.support(), &ThinningParam::full(), 3).unwrap();
        assert_eq!(
            sys.poly(3).coeffs(),
            &[rat(-1458174), rat(38783), rat(-342), rat(1)]
        );
        let d2 = lp_distance(sys.poly(3), c.poly(3), &rat(114), 2, 1e-12).unwrap();
        assert_abs_diff_eq!(d2.value, 1554.972669, epsilon = 1e-3);
        let d1 = lp_distance(sys.poly(3), c.poly(3), &rat(114), 1, 1e-12).unwrap();
        assert_abs_diff_eq!(d1.value, 1175.763290, epsilon = 1e-3);
        assert!(d2.truncation_point > 228);
    }

    #[test]
    fn lp_sums_terminate_for_all_small_p_and_degrees() {
        let die = die_from_index(17u32).unwrap();
        let sys = thinned_die_system(die.support(), &ThinningParam::full(), 5).unwrap();
        let c = charlier_system(&rat(114), 5).unwrap();
        for p in 1..=4u32 {
            for d in 0..=5usize {
                let out = lp_distance(sys.poly(d), c.poly(d), &rat(114), p, 1e-12).unwrap();
                assert!(out.value.is_finite());
                if d >= 2 {
                    assert!(out.value > 0.0);
                    assert!(out.truncation_point > 114);
                }
            }
        }
    }

    #[test]
    fn convergence_is_strictly_decreasing_along_the_family() {
        let report =
            convergence_report(17, &[17, 19, 22, 25, 31], 3, &[1, 2], 1e-12).unwrap();
        assert_eq!(report.theta, rat(114));
        let a_expected = [
            Rat::one(),
            rat_frac(114, 140),
            rat_frac(114, 184),
            rat_frac(114, 234),
            rat_frac(114, 352),
        ];
        for (entry, a) in report.entries.iter().zip(&a_expected) {
            assert_eq!(&entry.a, a);
        }
        for p_col in 0..2 {
            let col: Vec<f64> = report
                .entries
                .iter()
                .map(|e| e.distances[p_col].value)
                .collect();
            for w in col.windows(2) {
                assert!(w[1] < w[0], "not strictly decreasing: {col:?}");
            }
        }
        // Frozen endpoints of the p=2 column.
        assert_abs_diff_eq!(report.entries[0].distances[1].value, 1554.972669, epsilon = 1e-3);
        assert_abs_diff_eq!(report.entries[4].distances[1].value, 177.649541, epsilon = 1e-3);
    }

    #[test]
    fn low_degrees_collapse_to_zero_distance() {
        for degree in [0usize, 1] {
            let report =
                convergence_report(17, &[19, 22, 31], degree, &[1, 2], 1e-12).unwrap();
            for entry in &report.entries {
                for d in &entry.distances {
                    assert_eq!(d.value, 0.0, "degree {degree} should coincide");
                }
            }
        }
    }

    #[test]
    fn curve_data_is_consistent() {
        let report = convergence_report(17, &[17, 31], 3, &[2], 1e-12).unwrap();
        let curve = &report.curve;
        assert_eq!(curve.xs.len(), curve.weight.len());
        assert_eq!(curve.xs.len(), curve.charlier.len());
        assert_eq!(curve.dice.len(), 2);
        // Window covers θ ± 4.5√θ and captures essentially all mass.
        assert!(*curve.xs.first().unwrap() <= 66);
        assert!(*curve.xs.last().unwrap() >= 162);
        let mass: f64 = curve.weight.iter().sum();
        assert!(mass > 0.9999, "window mass {mass}");
        // Spot-check one weighted value against the pmf (x = 114).
        let i = curve.xs.iter().position(|&x| x == 114).unwrap();
        let w = crate::law::poisson_pmf(114.0, 1e-12).prob(114);
        assert_abs_diff_eq!(curve.weight[i], w, epsilon = 1e-15);
        let c3 = charlier_system(&rat(114), 3).unwrap();
        assert_abs_diff_eq!(
            curve.charlier[i],
            c3.poly(3).eval_f64(114.0) * w,
            epsilon = 1e-12
        );
    }

    #[test]
    fn convergence_rejects_bad_indices() {
        assert_eq!(
            convergence_report(3, &[17], 3, &[2], 1e-12).unwrap_err().name(),
            "IndexNotInI"
        );
        assert_eq!(
            convergence_report(17, &[18], 3, &[2], 1e-12).unwrap_err().name(),
            "IndexNotInI"
        );
        // l with c(l) < c(k0) would need a > 1: rejected.
        assert_eq!(
            convergence_report(17, &[16], 3, &[2], 1e-12).unwrap_err().name(),
            "InvalidParameter"
        );
    }
}
