//! Card drawing with a random hand size: throw `K ~ die` cards from a
//! 52-card deck (with replacement) and score each suit by summed rank.
//! Because every suit carries the same rank profile, the suit scores are
//! exchangeable, and their covariance is controlled entirely by the die's
//! variance-minus-mean — zero exactly when the die is orthogonal. The
//! guessing game below turns that covariance into win rates.

use std::sync::Arc;

use num_bigint::BigUint;
use num_integer::binomial;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::dice::{classify, DiceClassKind, SupportPair};
use crate::error::{Error, Result};
use crate::law::{mixed_binomial_stats, FunctionalStats, MixedStats};
use crate::sim::replicate_rng;
use crate::stats::SampleMoments;
use crate::{rat_to_f64, Rat};
use rand::Rng;

/// The four suits, in the fixed order used throughout this module.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suit {
    Spades,
    Hearts,
    Diamonds,
    Clubs,
}

pub const SUITS: [Suit; 4] = [Suit::Spades, Suit::Hearts, Suit::Diamonds, Suit::Clubs];

/// A 52-atom uniform deck: 13 ranks (scored 1..=13) in each of 4 suits.
#[derive(Debug, Clone)]
pub struct DeckModel {
    atoms: Vec<(Suit, u8)>,
}

impl DeckModel {
    pub fn new() -> Self {
        let mut atoms = Vec::with_capacity(52);
        for suit in SUITS {
            for rank in 1..=13u8 {
                atoms.push((suit, rank));
            }
        }
        DeckModel { atoms }
    }

    pub fn atoms(&self) -> &[(Suit, u8)] {
        &self.atoms
    }

    /// Exact `Σ_x ν{x} h(x)`; equals 7.
    pub fn nu_h(&self) -> Rat {
        let total: u64 = self.atoms.iter().map(|&(_, r)| r as u64).sum();
        Rat::new(total.into(), 52.into())
    }

    /// Exact `Σ_x ν{x} h(x)²`; equals 63.
    pub fn nu_h_squared(&self) -> Rat {
        let total: u64 = self.atoms.iter().map(|&(_, r)| (r as u64) * (r as u64)).sum();
        Rat::new(total.into(), 52.into())
    }

    /// Exact mass of one suit: 1/4.
    pub fn suit_mass(&self, suit: Suit) -> Rat {
        let hits = self.atoms.iter().filter(|&&(s, _)| s == suit).count() as u64;
        Rat::new(hits.into(), 52.into())
    }
}

impl Default for DeckModel {
    fn default() -> Self {
        DeckModel::new()
    }
}

/// Analytic suit-score statistics for one die: per-suit mean and variance
/// of `Mf_suit`, the covariance of two distinct suit scores, and their
/// correlation.
#[derive(Debug, Clone)]
pub struct CardCovarianceTable {
    pub c: Rat,
    pub delta_sq: Rat,
    pub mean: Rat,
    pub variance: Rat,
    pub covariance: Rat,
    pub correlation: f64,
}

/// The suit functional is `f_A(x) = h(x)·1_A(x)` with `ν f_A = 7/4`,
/// `ν f_A² = 63/4`, and `ν(f_A f_B) = 0` for distinct suits, so everything
/// reduces to the mixed binomial moment formulas.
pub fn cards_covariance_table(die: &SupportPair) -> CardCovarianceTable {
    let c = die.mean();
    let delta_sq = die.variance();
    let quarter_h = Rat::new(7.into(), 4.into());
    let quarter_h2 = Rat::new(63.into(), 4.into());
    let fs = FunctionalStats {
        nu_f: quarter_h.clone(),
        nu_g: quarter_h,
        nu_fg: Rat::zero(),
        nu_f2: quarter_h2,
    };
    let MixedStats {
        mean,
        variance,
        covariance,
    } = mixed_binomial_stats(&c, &delta_sq, &fs);
    let correlation = if variance.is_zero() {
        0.0
    } else {
        rat_to_f64(&(covariance.clone() / variance.clone()))
    };
    CardCovarianceTable {
        c,
        delta_sq,
        mean,
        variance,
        covariance,
        correlation,
    }
}

/// Probability of seeing exactly the suit counts `partition` in a
/// `hand_size`-card hand: drawn without replacement from one deck
/// (multivariate hypergeometric) and with replacement (multinomial).
/// Both values are exact rationals.
pub fn cards_partition_pmf(hand_size: u64, partition: &[u64]) -> Result<(Rat, Rat)> {
    if partition.len() != 4 {
        return Err(Error::InvalidPartition(format!(
            "need counts for exactly 4 suits, got {}",
            partition.len()
        )));
    }
    if partition.iter().sum::<u64>() != hand_size {
        return Err(Error::InvalidPartition(format!(
            "counts {partition:?} do not sum to the hand size {hand_size}"
        )));
    }
    if let Some(bad) = partition.iter().find(|&&i| i > 13) {
        return Err(Error::InvalidPartition(format!(
            "a suit holds only 13 cards, requested {bad}"
        )));
    }
    let hypergeometric = {
        let mut numerator = BigUint::one();
        for &i in partition {
            numerator *= binomial(BigUint::from(13u32), BigUint::from(i));
        }
        let denominator = binomial(BigUint::from(52u32), BigUint::from(hand_size));
        Rat::new(numerator.into(), denominator.into())
    };
    let multinomial = {
        let mut coeff = factorial(hand_size);
        for &i in partition {
            coeff /= factorial(i);
        }
        Rat::new(coeff.into(), BigUint::from(4u32).pow(hand_size as u32).into())
    };
    Ok((hypergeometric, multinomial))
}

fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * BigUint::from(i))
}

/// Guessing strategies: copy your own indicator, negate it, or flip a coin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Copy,
    Anticopy,
    Coin,
}

/// The strategy that exploits the die's class: positive correlation → copy,
/// negative → anticopy, orthogonal → nothing beats a coin.
///
/// The mapping reflects the sign of the *score* covariance and is reliable
/// for large mean hand sizes. For tiny dice the shared hand size couples
/// the win indicators positively regardless of class — with `K ~ U{1..6}`
/// the copier still wins ≈ 51% of guesses — so treat the recommendation as
/// asymptotic in `c`.
pub fn recommended_strategy(class: DiceClassKind) -> Strategy {
    match class {
        DiceClassKind::PositiveDie => Strategy::Copy,
        DiceClassKind::NegativeDie => Strategy::Anticopy,
        DiceClassKind::Orthogonal => Strategy::Coin,
    }
}

/// Per-strategy empirical accuracy with a replicate-level standard error.
#[derive(Debug, Clone, Copy)]
pub struct StrategyAccuracy {
    pub accuracy: f64,
    pub std_error: f64,
}

/// Outcome of the suit guessing game plus the scatter data behind it.
#[derive(Debug, Clone)]
pub struct CardGameReport {
    pub class: DiceClassKind,
    pub recommended: Strategy,
    pub copy: StrategyAccuracy,
    pub anticopy: StrategyAccuracy,
    pub coin: StrategyAccuracy,
    /// Per-round `(K_♠, K_♦)` suit card counts.
    pub scatter_counts: Vec<(u64, u64)>,
    /// Per-round `(Mf_♠, Mf_♦)` suit scores.
    pub scatter_scores: Vec<(u64, u64)>,
    pub n_rounds: u64,
    pub seed: u64,
}

/// Play `n_rounds` rounds: throw `K ~ die` cards, score all four suits,
/// and let every player guess every other player's indicator
/// `1{Mf ≥ (7/4)c}` with each strategy. Ties at the threshold count as
/// "≥". Accuracy is averaged over the 12 ordered suit pairs per round.
pub fn cards_game_simulation(
    die: &SupportPair,
    n_rounds: u64,
    seed: u64,
) -> Result<CardGameReport> {
    if n_rounds < 1 {
        return Err(Error::InvalidParameter(
            "the game needs at least one round".into(),
        ));
    }
    let (m, n) = die.as_u64_pair().ok_or_else(|| {
        Error::SupportTooLarge(format!("die {die} is too large to simulate"))
    })?;
    // Indicator threshold Mf ≥ (7/4)c = 7(m+n)/8, compared exactly as
    // 8·Mf ≥ 7(m+n) in integers.
    let threshold = 7u128 * (m as u128 + n as u128);
    let class = classify(die).variant;
    struct Round {
        k_spades: u64,
        k_diamonds: u64,
        score_spades: u64,
        score_diamonds: u64,
        copy_frac: f64,
        anti_frac: f64,
        coin_frac: f64,
    }
    let rounds: Vec<Round> = (0..n_rounds)
        .into_par_iter()
        .map(|i| {
            let mut rng = replicate_rng(seed, i);
            let k = rng.random_range(m..=n);
            let mut counts = [0u64; 4];
            let mut scores = [0u64; 4];
            for _ in 0..k {
                let card = rng.random_range(0..52u32);
                let suit = (card / 13) as usize;
                let rank = (card % 13) as u64 + 1;
                counts[suit] += 1;
                scores[suit] += rank;
            }
            let indicator: Vec<bool> = scores
                .iter()
                .map(|&s| 8u128 * s as u128 >= threshold)
                .collect();
            let (mut copy_hits, mut anti_hits, mut coin_hits) = (0u32, 0u32, 0u32);
            for a in 0..4 {
                for b in 0..4 {
                    if a == b {
                        continue;
                    }
                    if indicator[a] == indicator[b] {
                        copy_hits += 1;
                    } else {
                        anti_hits += 1;
                    }
                    if rng.random_bool(0.5) == indicator[b] {
                        coin_hits += 1;
                    }
                }
            }
            Round {
                k_spades: counts[0],
                k_diamonds: counts[2],
                score_spades: scores[0],
                score_diamonds: scores[2],
                copy_frac: copy_hits as f64 / 12.0,
                anti_frac: anti_hits as f64 / 12.0,
                coin_frac: coin_hits as f64 / 12.0,
            }
        })
        .collect();
    let accuracy = |extract: fn(&Round) -> f64| -> StrategyAccuracy {
        let values: Vec<f64> = rounds.iter().map(extract).collect();
        if values.len() < 2 {
            return StrategyAccuracy {
                accuracy: values[0],
                std_error: f64::NAN,
            };
        }
        let m = SampleMoments::from_slice(&values);
        StrategyAccuracy {
            accuracy: m.mean(),
            std_error: m.mean_se(),
        }
    };
    Ok(CardGameReport {
        class,
        recommended: recommended_strategy(class),
        copy: accuracy(|r| r.copy_frac),
        anticopy: accuracy(|r| r.anti_frac),
        coin: accuracy(|r| r.coin_frac),
        scatter_counts: rounds.iter().map(|r| (r.k_spades, r.k_diamonds)).collect(),
        scatter_scores: rounds
            .iter()
            .map(|r| (r.score_spades, r.score_diamonds))
            .collect(),
        n_rounds,
        seed,
    })
}

/// A deck realization as a measure model over atom indices, for callers who
/// want direct access to the engine (uniform over the 52 atoms).
pub fn deck_point_sampler() -> crate::sim::PointSampler<usize> {
    Arc::new(|rng| rng.random_range(0..52usize))
}

/// Rank score of atom `index` (1..=13 within each suit).
pub fn atom_rank(index: usize) -> u64 {
    (index % 13) as u64 + 1
}

/// Suit of atom `index`.
pub fn atom_suit(index: usize) -> Suit {
    SUITS[index / 13]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use num_bigint::BigUint;

    fn support(m: u64, n: u64) -> SupportPair {
        SupportPair::new(BigUint::from(m), BigUint::from(n)).unwrap()
    }

    fn rat(n: i64, d: i64) -> Rat {
        Rat::new(n.into(), d.into())
    }

    #[test]
    fn deck_rank_moments_are_exact() {
        let deck = DeckModel::new();
        assert_eq!(deck.atoms().len(), 52);
        assert_eq!(deck.nu_h(), rat(7, 1));
        assert_eq!(deck.nu_h_squared(), rat(63, 1));
        for suit in SUITS {
            assert_eq!(deck.suit_mass(suit), rat(1, 4));
        }
    }

    #[test]
    fn covariance_table_known_dice() {
        // (1,6): negative die, Cov = -343/192.
        let t = cards_covariance_table(&support(1, 6));
        assert_eq!(t.covariance, rat(-343, 192));
        assert!(t.correlation < 0.0);
        // (1,7): orthogonal, Cov = 0.
        let t = cards_covariance_table(&support(1, 7));
        assert!(t.covariance.is_zero());
        assert_eq!(t.correlation, 0.0);
        // (1,8): positive die, Cov = +147/64.
        let t = cards_covariance_table(&support(1, 8));
        assert_eq!(t.covariance, rat(147, 64));
        assert!(t.correlation > 0.0);
        // (0,36): Var = 1155/2, Cov = 294, corr ≈ 0.509.
        let t = cards_covariance_table(&support(0, 36));
        assert_eq!(t.mean, rat(63, 2)); // (7/4)·18
        assert_eq!(t.variance, rat(1155, 2));
        assert_eq!(t.covariance, rat(294, 1));
        assert_abs_diff_eq!(t.correlation, 0.50909, epsilon = 1e-5);
    }

    #[test]
    fn partition_pmf_seven_card_hand() {
        let (hyper, multi) = cards_partition_pmf(7, &[2, 2, 2, 1]).unwrap();
        // C(13,2)^3·C(13,1)/C(52,7) and 7!/(2!2!2!1!)/4^7.
        assert_eq!(hyper, rat(6_169_176, 133_784_560));
        assert_eq!(multi, rat(630, 16384));
        assert_abs_diff_eq!(rat_to_f64(&hyper), 0.0461128, epsilon = 5e-7);
        assert_abs_diff_eq!(rat_to_f64(&multi), 0.0384521, epsilon = 5e-7);
        // Single card: the two sampling schemes coincide.
        let (h1, m1) = cards_partition_pmf(1, &[1, 0, 0, 0]).unwrap();
        assert_eq!(h1, rat(1, 4));
        assert_eq!(m1, rat(1, 4));
        // Empty hand.
        let (h0, m0) = cards_partition_pmf(0, &[0, 0, 0, 0]).unwrap();
        assert!(h0.is_one() && m0.is_one());
    }

    #[test]
    fn partition_pmf_sums_to_one() {
        for k in 0..=7u64 {
            let mut hyper_total = Rat::zero();
            let mut multi_total = Rat::zero();
            for i in 0..=k {
                for j in 0..=k - i {
                    for l in 0..=k - i - j {
                        let part = [i, j, l, k - i - j - l];
                        if part.iter().any(|&x| x > 13) {
                            continue;
                        }
                        let (h, m) = cards_partition_pmf(k, &part).unwrap();
                        hyper_total += h;
                        multi_total += m;
                    }
                }
            }
            assert!(hyper_total.is_one(), "hypergeometric sum at k={k}");
            assert!(multi_total.is_one(), "multinomial sum at k={k}");
        }
    }

    #[test]
    fn partition_pmf_rejects_bad_input() {
        assert_eq!(
            cards_partition_pmf(7, &[2, 2, 2]).unwrap_err().name(),
            "InvalidPartition"
        );
        assert_eq!(
            cards_partition_pmf(7, &[2, 2, 2, 2]).unwrap_err().name(),
            "InvalidPartition"
        );
        assert_eq!(
            cards_partition_pmf(20, &[14, 2, 2, 2]).unwrap_err().name(),
            "InvalidPartition"
        );
    }

    #[test]
    fn orthogonal_die_plays_near_fair() {
        let report = cards_game_simulation(&support(96, 132), 40_000, 31).unwrap();
        assert_eq!(report.class, DiceClassKind::Orthogonal);
        assert_eq!(report.recommended, Strategy::Coin);
        // Score covariance vanishes exactly, but the indicator agreement keeps
        // a small residue from the shared hand size (≈ +0.005 at c = 114), an
        // order of magnitude below the positive die's edge.
        assert!(
            (report.copy.accuracy - 0.5).abs() < 0.01,
            "copy accuracy {} ± {}",
            report.copy.accuracy,
            report.copy.std_error
        );
        assert_eq!(report.scatter_counts.len(), 40_000);
        assert_eq!(report.scatter_scores.len(), 40_000);
    }

    #[test]
    fn positive_die_rewards_copying() {
        let report = cards_game_simulation(&support(0, 36), 30_000, 32).unwrap();
        assert_eq!(report.class, DiceClassKind::PositiveDie);
        assert_eq!(report.recommended, Strategy::Copy);
        assert!(
            report.copy.accuracy > 0.5 + 6.0 * report.copy.std_error,
            "copy accuracy {} ± {}",
            report.copy.accuracy,
            report.copy.std_error
        );
        // The coin never helps anyone.
        assert!((report.coin.accuracy - 0.5).abs() < 4.0 * report.coin.std_error);
    }

    #[test]
    fn narrow_negative_die_rewards_contrarians() {
        // Var K = 20/3 far below the mean 114: close to fixed-hand-size
        // multinomial competition, so the anticopy edge is unmistakable.
        let report = cards_game_simulation(&support(110, 118), 30_000, 33).unwrap();
        assert_eq!(report.class, DiceClassKind::NegativeDie);
        assert_eq!(report.recommended, Strategy::Anticopy);
        assert!(
            report.anticopy.accuracy > 0.5 + 6.0 * report.anticopy.std_error,
            "anticopy accuracy {} ± {}",
            report.anticopy.accuracy,
            report.anticopy.std_error
        );
    }

    #[test]
    fn tiny_negative_die_still_rewards_copying() {
        // (1,6) has negative score covariance, yet at c = 3.5 the shared hand
        // size couples the win indicators positively and the copier keeps an
        // edge: the strategy recommendation is asymptotic in the hand size.
        let report = cards_game_simulation(&support(1, 6), 100_000, 35).unwrap();
        assert_eq!(report.class, DiceClassKind::NegativeDie);
        assert_eq!(report.recommended, Strategy::Anticopy);
        assert!(
            report.copy.accuracy > 0.5 + 4.0 * report.copy.std_error,
            "copy accuracy {} ± {}",
            report.copy.accuracy,
            report.copy.std_error
        );
    }

    #[test]
    fn scatter_count_means_track_quarter_c() {
        let report = cards_game_simulation(&support(0, 36), 40_000, 34).unwrap();
        let spades: Vec<f64> = report.scatter_counts.iter().map(|&(a, _)| a as f64).collect();
        let m = SampleMoments::from_slice(&spades);
        assert!((m.mean() - 4.5).abs() < 4.0 * m.mean_se()); // c/4 = 18/4
    }

    #[test]
    fn game_is_deterministic_per_seed() {
        let a = cards_game_simulation(&support(1, 6), 5_000, 77).unwrap();
        let b = cards_game_simulation(&support(1, 6), 5_000, 77).unwrap();
        assert_eq!(a.copy.accuracy.to_bits(), b.copy.accuracy.to_bits());
        assert_eq!(a.scatter_scores, b.scatter_scores);
    }
}
