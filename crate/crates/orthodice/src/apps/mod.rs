//! Application studies built on the counting-law and Monte Carlo machinery:
//! suit scores in card drawing ([`cards`]), the 2×2 Gaussian-ensemble
//! spectral gap ([`goe`]), exponentially decaying shot noise ([`shotnoise`]),
//! and gravitational potential of a random star field ([`gravity`]).

pub mod cards;
pub mod goe;
pub mod gravity;
pub mod shotnoise;
