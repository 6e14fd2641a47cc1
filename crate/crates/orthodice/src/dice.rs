//! Enumeration, construction and classification of orthogonal dice.
//!
//! An *orthogonal die* is a discrete uniform law `Uniform{m..n}` whose mean
//! equals its variance. Writing `s = n - m + 1` for the side count, the mean
//! is `(m + n)/2` and the variance is `(s^2 - 1)/12`; equality has integer
//! solutions exactly for the one-parameter family
//!
//! ```text
//! k in I = { k >= 1 : 3 does not divide k },
//! m = (k^2 - 1)/3,   n = m + 2k + 2,   sides = 2k + 3,
//! mean = variance = c(k) = (k + 1)(k + 2)/3.
//! ```
//!
//! Side counts `2k + 3` with `k in I` are precisely the integers `>= 5`
//! coprime to both 2 and 3, so every admissible side count `p` yields one die
//! via `k = (p - 3)/2`. All arithmetic here is arbitrary precision: the
//! largest currently known prime gives a perfectly good (if impractical) die.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::{big_to_rat, Rat};

/// Inclusive integer support `{m, m+1, ..., n}` of a discrete uniform law.
///
/// Invariant: `m <= n` and `n >= 1` (a one-point support at 0 is excluded so
/// that every supported law has at least one positive outcome).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SupportPair {
    m: BigUint,
    n: BigUint,
}

impl SupportPair {
    /// Validates `m <= n`, `n >= 1` and builds the support.
    pub fn new(m: impl Into<BigUint>, n: impl Into<BigUint>) -> Result<Self> {
        let (m, n) = (m.into(), n.into());
        if m > n {
            return Err(Error::InvalidSupport(format!(
                "lower endpoint {m} exceeds upper endpoint {n}"
            )));
        }
        if n.is_zero() {
            return Err(Error::InvalidSupport(
                "support {0..0} carries no positive outcome".into(),
            ));
        }
        Ok(SupportPair { m, n })
    }

    /// Lower endpoint `m`.
    pub fn lower(&self) -> &BigUint {
        &self.m
    }

    /// Upper endpoint `n`.
    pub fn upper(&self) -> &BigUint {
        &self.n
    }

    /// Number of sides `n - m + 1`.
    pub fn sides(&self) -> BigUint {
        &self.n - &self.m + 1u32
    }

    /// Exact mean `(m + n)/2` of `Uniform{m..n}`.
    pub fn mean(&self) -> Rat {
        big_to_rat(&(&self.m + &self.n)) / Rat::from_integer(BigInt::from(2))
    }

    /// Exact variance `(s^2 - 1)/12` of `Uniform{m..n}`, `s` the side count.
    pub fn variance(&self) -> Rat {
        let s = big_to_rat(&self.sides());
        (&s * &s - Rat::one()) / Rat::from_integer(BigInt::from(12))
    }

    /// Both endpoints as `u64`, if they fit.
    pub fn as_u64_pair(&self) -> Option<(u64, u64)> {
        Some((self.m.to_u64()?, self.n.to_u64()?))
    }
}

impl std::fmt::Display for SupportPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{{}..{}}}", self.m, self.n)
    }
}

/// Sign of `variance - mean` for a discrete uniform law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DiceClassKind {
    /// Variance equals mean.
    Orthogonal,
    /// Variance strictly exceeds mean.
    PositiveDie,
    /// Variance strictly below mean.
    NegativeDie,
}

/// Classification of a support, with a flag for the one-point (Dirac) case.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiceClass {
    pub variant: DiceClassKind,
    /// True iff `m = n`.
    pub degenerate: bool,
}

/// One member of the orthogonal family, with its canonical parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrthogonalDie {
    index: BigUint,
    support: SupportPair,
    mean: BigUint,
    sides: BigUint,
    position: BigUint,
}

impl OrthogonalDie {
    /// Family index `k`.
    pub fn index(&self) -> &BigUint {
        &self.index
    }

    /// Support `{m..n}`.
    pub fn support(&self) -> &SupportPair {
        &self.support
    }

    /// Mean (= variance) `c(k) = (k+1)(k+2)/3`, always a positive integer.
    pub fn mean(&self) -> &BigUint {
        &self.mean
    }

    /// Side count `2k + 3`.
    pub fn sides(&self) -> &BigUint {
        &self.sides
    }

    /// 1-based rank of this die in the family, `ceil(2k/3)`.
    pub fn position(&self) -> &BigUint {
        &self.position
    }

    /// Center/halfwidth form: the support is `{c - h .. c + h}` with
    /// `c = mean` and `h = k + 1`. Sampling `c + Uniform{-h..h}` reproduces
    /// the die exactly.
    pub fn decompose(&self) -> (BigUint, BigUint) {
        (self.mean.clone(), &self.index + 1u32)
    }
}

/// True iff `k` lies in the index set `I` (positive, not divisible by 3).
pub fn index_in_family(k: &BigUint) -> bool {
    !k.is_zero() && !(k % 3u32).is_zero()
}

/// Builds the orthogonal die with index `k in I`.
///
/// Costs one big-integer squaring; the remaining parameters are linear-time
/// derivations from `k^2`, so even indices with tens of millions of bits are
/// practical.
pub fn die_from_index(k: impl Into<BigUint>) -> Result<OrthogonalDie> {
    let k = k.into();
    if !index_in_family(&k) {
        return Err(Error::IndexNotInI(format!(
            "index {k} must be >= 1 and not divisible by 3"
        )));
    }
    let k2 = &k * &k;
    let m = (&k2 - 1u32) / 3u32;
    let n = &m + ((&k) << 1) + 2u32;
    // (k+1)(k+2)/3 expanded so the squaring above is reused.
    let mean = (&k2 + 3u32 * &k + 2u32) / 3u32;
    let sides = ((&k) << 1) + 3u32;
    let position = (((&k) << 1) + 2u32) / 3u32;
    Ok(OrthogonalDie {
        support: SupportPair { m, n },
        index: k,
        mean,
        sides,
        position,
    })
}

/// Iterator over the index set `I = 1, 2, 4, 5, 7, 8, ...` starting at the
/// smallest index `>= start`.
pub fn family_indices(start: u64) -> impl Iterator<Item = u64> {
    (start.max(1)..).filter(|k| k % 3 != 0)
}

/// The index occupying 1-based `position` in `I`: `floor((3*position - 1)/2)`.
pub fn index_at_position(position: u64) -> u64 {
    (3 * position - 1) / 2
}

/// The first `count` orthogonal dice in index order.
pub fn enumerate_orthogonal(count: usize) -> Vec<OrthogonalDie> {
    family_indices(1)
        .take(count)
        .map(|k| die_from_index(k).expect("family index is valid by construction"))
        .collect()
}

/// Builds the orthogonal die whose side count is `p`.
///
/// Valid side counts are exactly the integers `>= 5` coprime to 2 and 3
/// (products of primes `>= 5`); primality itself is deliberately not
/// required. The parameters come out as
/// `m = (p-5)(p-1)/12`, `n = (p+7)(p-1)/12`, `mean = (p^2-1)/12`,
/// equivalently the index form with `k = (p-3)/2`.
pub fn die_from_prime_product(p: impl Into<BigUint>) -> Result<OrthogonalDie> {
    let p = p.into();
    if p < BigUint::from(5u32) {
        return Err(Error::InvalidSideCount(format!("side count {p} is below 5")));
    }
    if (&p % 2u32).is_zero() || (&p % 3u32).is_zero() {
        return Err(Error::InvalidSideCount(format!(
            "side count {p} shares a factor with 6"
        )));
    }
    let k = (&p - 3u32) >> 1;
    die_from_index(k)
}

/// Classifies `Uniform{m..n}` by the sign of `variance - mean`.
///
/// Uses the exact integer identity
/// `12*(variance - mean) = (n - m - 2)^2 - 4*(3m + 1)`,
/// so boundary cases are decided without floating point or square roots.
pub fn classify(support: &SupportPair) -> DiceClass {
    let (m, n) = (&support.m, &support.n);
    // |n - m - 2| in unsigned arithmetic; the sign is irrelevant once squared.
    let d = if *n >= m + 2u32 {
        n - m - 2u32
    } else {
        (m + 2u32) - n
    };
    let lhs = &d * &d;
    let rhs = 4u32 * (3u32 * m + 1u32);
    let variant = match lhs.cmp(&rhs) {
        std::cmp::Ordering::Equal => DiceClassKind::Orthogonal,
        std::cmp::Ordering::Greater => DiceClassKind::PositiveDie,
        std::cmp::Ordering::Less => DiceClassKind::NegativeDie,
    };
    DiceClass {
        variant,
        degenerate: m == n,
    }
}

/// Floor of `sqrt(1 + 12*c)` for rational `c = p/q > 0`, as a lower bound on
/// the real root; used to seed candidate windows below.
fn sqrt_disc_floor(c: &Rat) -> BigUint {
    let p = c.numer().magnitude().clone();
    let q = c.denom().magnitude().clone();
    // sqrt(1 + 12 p/q) = sqrt(q(q + 12p)) / q, floor via integer sqrt.
    let inner = &q * (&q + 12u32 * &p);
    inner.sqrt() / q
}

/// The family die whose mean `c(k)` is closest to `c_star`; ties (exactly
/// between two neighbours) resolve to the smaller index.
pub fn nearest_die(c_star: &Rat) -> Result<OrthogonalDie> {
    if *c_star <= Rat::zero() {
        return Err(Error::InvalidParameter(format!(
            "target mean {c_star} must be positive"
        )));
    }
    // Real solution of c(k) = c*: k* = (-3 + sqrt(1 + 12 c*)) / 2.
    let s = sqrt_disc_floor(c_star);
    let k_approx = if s > BigUint::from(3u32) {
        ((&s - 3u32) >> 1u32).max(BigUint::one())
    } else {
        BigUint::one()
    };
    // Scan a window of indices guaranteed to bracket k*; c(k) is strictly
    // increasing on I so the window's best is the global best.
    let lo = if k_approx > BigUint::from(3u32) {
        &k_approx - 3u32
    } else {
        BigUint::one()
    };
    let mut best: Option<(Rat, OrthogonalDie)> = None;
    let mut k = lo;
    for _ in 0..10u32 {
        if index_in_family(&k) {
            let die = die_from_index(k.clone())?;
            let gap = (big_to_rat(die.mean()) - c_star).abs();
            let better = match &best {
                None => true,
                Some((g, _)) => gap < *g,
            };
            if better {
                best = Some((gap, die));
            }
        }
        k += 1u32;
    }
    Ok(best.expect("candidate window always contains family indices").1)
}

/// The smallest-index family die with mean `c(k) >= c_min`.
pub fn first_die_with_mean_at_least(c_min: impl Into<BigUint>) -> Result<OrthogonalDie> {
    let c_min = c_min.into();
    if c_min.is_zero() {
        return Err(Error::InvalidParameter(
            "mean threshold must be >= 1".into(),
        ));
    }
    let s = sqrt_disc_floor(&big_to_rat(&c_min));
    let mut k = if s > BigUint::from(7u32) {
        (&s - 7u32) >> 1
    } else {
        BigUint::one()
    };
    if k.is_zero() {
        k = BigUint::one();
    }
    loop {
        if index_in_family(&k) {
            let die = die_from_index(k.clone())?;
            if *die.mean() >= c_min {
                return Ok(die);
            }
        }
        k += 1u32;
    }
}

/// Closed-form count of integers in `[1, n]` coprime to both 2 and 3:
/// `ceil(n/3) - 1` if `n ≡ 4 (mod 6)`, else `ceil(n/3)`. Requires `n >= 5`.
pub fn count_coprime23(n: &BigUint) -> Result<BigUint> {
    if *n < BigUint::from(5u32) {
        return Err(Error::DomainTooSmall(format!(
            "closed form requires n >= 5, got {n}"
        )));
    }
    let ceil = (n + 2u32) / 3u32;
    if n % 6u32 == BigUint::from(4u32) {
        Ok(ceil - 1u32)
    } else {
        Ok(ceil)
    }
}

/// Direct scan `#{ j in [1, n] : gcd(j, 6) = 1 }`, the oracle for
/// [`count_coprime23`]; agrees with `n - n/2 - n/3 + n/6` by inclusion-
/// exclusion. Accepts any `n >= 1` (and returns 0 for `n = 0`).
pub fn count_coprime23_oracle(n: u64) -> u64 {
    (1..=n).filter(|j| j.gcd(&6) == 1).count() as u64
}
