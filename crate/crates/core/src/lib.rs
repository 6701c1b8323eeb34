//! # z2z4-stego
//!
//! Matrix embedding for ±1 steganography driven by perfect Z2Z4-linear codes.
//! A block of `2^(m-1)` grayscale symbols carries `m` bits as the syndrome of
//! the block's Gray-digit vector; at most two symbols change, each by one unit,
//! even when symbols sit at 0 or `2^B - 1`.
//!
//! - [`algebra`]: Z2^a × Z4^b vectors, the Gray map, syndromes.
//! - [`code`]: parity-check matrices and lookup tables.
//! - [`codec`]: block embedding/extraction and message framing.
//! - [`rate`]: closed-form CI-rates, bound, direct-sum frontiers.
//! - [`simulate`]: Monte Carlo distortion, ternary Hamming baseline.
//! - [`media`]: PGM and raw sample streams.
//! - [`cli`]: the `z2z4steg` command.

pub mod algebra;
pub mod cli;
pub mod code;
pub mod codec;
mod error;
pub mod media;
pub mod rate;
pub mod simulate;

pub use algebra::{
    gray_inverse, gray_map, mixed_add, scalar_mul, syndrome, BitPair, MixedVector, Z4,
};
pub use code::{
    build_code, canonical_rep, derive_parameters, CodeParameters, CodeSpec, Sign, SymbolRole,
};
pub use codec::{ChangePlan, Depth, SaturationPolicy, StegoCodec};
pub use error::{Error, Result};
pub use media::MediaDocument;
pub use rate::{Exact, Frontier, RatePoint, Real, Scheme};

pub type RatePoint64 = rate::RatePoint<f64>;
pub type RatePoint32 = rate::RatePoint<f32>;
pub type Frontier64 = rate::Frontier<f64>;
pub type Frontier32 = rate::Frontier<f32>;
pub type TheoremCheck64 = rate::TheoremCheck<f64>;
