//! Spreading-sequence toolkit for spectrum-constrained CDMA.
//!
//! The crate builds sequence families whose pairwise periodic
//! cross-correlations vanish inside a zone around the in-phase position while
//! every sequence keeps an exactly-zero spectrum on a set of blocked
//! subcarriers. The pieces:
//!
//! * [`seqcore`] — correlations, unitary DFT, cyclic shifts, Kronecker
//!   products, PAPR, spectral nulling.
//! * [`seeds`] — zero-correlation-zone seed families, Zadoff-Chu generators,
//!   masked frequency-domain waveforms, zone verification and bounds.
//! * [`construct`] — Kronecker time-frequency synthesis of quasi-ZCZ sets and
//!   verification of the zone/factorization/leakage properties.
//! * [`optimize`] — mini-max power-spectrum selection plus alternating phase
//!   updates trading PAPR against aperiodic autocorrelation under the mask.
//! * [`simulate`] — quasi-synchronous multi-user CDMA link simulator over
//!   multipath Rayleigh channels, with MC-CDMA and NC-OFDM baselines.
//! * [`io`] — JSON/CSV serialization for every artifact the CLI exchanges.

pub mod construct;
pub mod error;
pub mod io;
pub mod optimize;
pub mod seeds;
pub mod seqcore;
pub mod simulate;

pub use error::{Error, Result};
pub use seqcore::{Complex, ComplexSeq, SpectrumMask};

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Independent deterministic RNG stream for `(seed, index)`. Every
/// randomized component derives its streams this way, so results never
/// depend on scheduling or worker count.
pub(crate) fn derive_rng(seed: u64, index: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Tolerance conventions used across the crate.
pub mod tol {
    /// Identities that hold exactly in f64 arithmetic.
    pub const EXACT: f64 = 1e-12;
    /// Identities routed through an FFT.
    pub const FFT_PATH: f64 = 1e-10;
    /// "Zero correlation" relative to the zero-shift value.
    pub const ZERO_CORR_REL: f64 = 1e-9;
}
