//! Orthogonal dice: discrete uniform laws whose mean equals their variance,
//! the random measures they drive, and Poisson-limit diagnostics.
//!
//! A fair die with sides `{m..n}` has mean `(m+n)/2` and variance
//! `((n-m+1)^2 - 1)/12`. Demanding the two be *equal* singles out a rigid
//! one-parameter family — the orthogonal dice — indexed by the positive
//! integers not divisible by 3, with side counts exactly the integers `>= 5`
//! coprime to 2 and 3. Orthogonality buys the same variance bookkeeping that
//! makes the Poisson process tractable: when such a die supplies the number
//! of points thrown down i.i.d., disjoint regions receive uncorrelated
//! counts, and suitably thinned dice converge to Poisson laws.
//!
//! The crate is organized around that story:
//!
//! - [`dice`]: exact enumeration, construction and classification of the
//!   family, at arbitrary precision (the largest known prime yields a valid,
//!   if unwieldy, die).
//! - [`law`]: exact probability-generating-function, pmf and moment machinery
//!   for uniform counting laws and their binomial thinnings, with total
//!   variation and pgf distances to the Poisson limit.
//! - [`sim`]: a seeded, thread-count-independent Monte Carlo engine for the
//!   associated random measures (counts plus i.i.d. point positions and
//!   marks).
//! - [`orthopoly`]: discrete orthogonal polynomials — Gram-Schmidt from exact
//!   moments, and the Poisson-weight (Charlier) family they converge to.
//! - [`apps`]: worked studies (card game, Milky Way star count, GOE spectral
//!   gaps, shot noise) exercising the machinery end to end.
//! - [`stats`]: small statistical helpers (chi-square and KS tests, moment
//!   summaries) shared by simulations and tests.
//!
//! Exactness is a design rule, not an aspiration: integer work is
//! arbitrary-precision, probabilities and moments are `BigRational`s, and
//! floating point enters only where a quantity is genuinely transcendental
//! (Poisson tails, error functions) or where Monte Carlo output is already
//! noisy.
//!
//! ```
//! use orthodice::dice;
//!
//! // The 37-sided orthogonal die: support {96..132}, mean = variance = 114.
//! let die = dice::die_from_prime_product(37u64).unwrap();
//! assert_eq!(die.support().as_u64_pair(), Some((96, 132)));
//! assert_eq!(die.support().mean(), die.support().variance());
//! ```

pub mod apps;
pub mod cli;
pub mod dice;
pub mod error;
pub mod law;
pub mod orthopoly;
pub mod primes;
pub mod sim;
pub mod stats;

pub use error::{Error, Result};

use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;

/// Exact rational number used for all probability and moment arithmetic.
pub type Rat = num_rational::BigRational;

/// Embeds an unsigned big integer into the rationals.
pub fn big_to_rat(x: &BigUint) -> Rat {
    Rat::from_integer(BigInt::from(x.clone()))
}

/// Rounds an exact rational to the nearest `f64`.
///
/// `num-rational` converts with correct rounding even when numerator and
/// denominator individually overflow `f64`; infinities only appear when the
/// true value is beyond `f64` range.
pub fn rat_to_f64(x: &Rat) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn rational_to_float_handles_huge_components() {
        // Both parts far beyond f64 range, quotient moderate.
        let big = BigInt::from(10u32).pow(400u32);
        let x = Rat::new(BigInt::from(3) * &big, &big * BigInt::from(4));
        assert_eq!(rat_to_f64(&x), 0.75);
        // Tiny and huge magnitudes saturate sensibly.
        let tiny = Rat::new(BigInt::one(), BigInt::from(10u32).pow(400u32));
        assert_eq!(rat_to_f64(&tiny), 0.0);
        let huge = Rat::from_integer(BigInt::from(10u32).pow(400u32));
        assert_eq!(rat_to_f64(&huge), f64::INFINITY);
    }
}
