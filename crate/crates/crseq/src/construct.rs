//! Kronecker time-frequency synthesis: spreading a zero-correlation-zone
//! seed family across masked frequency-domain waveforms.
//!
//! For a verified (K, L, Z) seed and K length-N waveforms sharing one mask,
//! the composite `c_i = a_i (x) idft(B_i)` is a (K, N*L, N*Z - N) family:
//! pairwise periodic cross-correlations vanish for every shift inside the
//! zone, the in-zone autocorrelation factorizes through the waveform's
//! aperiodic autocorrelation, and every length-N block of `c_i` keeps the
//! exact spectral zeros of `B_i`.

use crate::error::{Error, Result};
use crate::seeds::{FreqWaveform, ZCZSeedSet};
use crate::seqcore::{
    accf_extended, fft_forward, kronecker, pccf_all, Complex, ComplexSeq, SpectrumMask,
};
use crate::tol;

/// A synthesized spreading family with its provenance.
#[derive(Debug, Clone)]
pub struct QuasiZCZSet {
    sequences: Vec<ComplexSeq>,
    seed: ZCZSeedSet,
    waveforms: Vec<FreqWaveform>,
    mask: SpectrumMask,
    zccz_width: usize,
}

impl QuasiZCZSet {
    /// Number of sequences K.
    pub fn set_size(&self) -> usize {
        self.sequences.len()
    }

    /// Composite length N*L.
    pub fn seq_len(&self) -> usize {
        self.sequences[0].len()
    }

    /// Cross-correlation zone width N*Z - N.
    pub fn zccz_width(&self) -> usize {
        self.zccz_width
    }

    pub fn sequences(&self) -> &[ComplexSeq] {
        &self.sequences
    }

    pub fn seed(&self) -> &ZCZSeedSet {
        &self.seed
    }

    pub fn waveforms(&self) -> &[FreqWaveform] {
        &self.waveforms
    }

    pub fn mask(&self) -> &SpectrumMask {
        &self.mask
    }

    /// Subcarrier count N of the constituent waveforms.
    pub fn waveform_len(&self) -> usize {
        self.mask.len()
    }

    /// Reassemble from parts, revalidating the synthesis.
    pub fn from_parts(seed: ZCZSeedSet, waveforms: Vec<FreqWaveform>) -> Result<Self> {
        synthesize(&seed, &waveforms)
    }
}

/// Build the composite family `c_i = a_i (x) idft(B_i)`.
///
/// Passing a single waveform broadcasts it to every seed sequence; the zone
/// properties inside |t| < N*Z - N are unchanged, though out-of-zone
/// correlations then repeat the single waveform's structure.
pub fn synthesize(seed: &ZCZSeedSet, waveforms: &[FreqWaveform]) -> Result<QuasiZCZSet> {
    if !seed.is_verified() {
        return Err(Error::VerificationFailed(
            "seed set must be verified at its declared zone before synthesis".into(),
        ));
    }
    let k = seed.set_size();
    let waveforms: Vec<FreqWaveform> = match waveforms.len() {
        n if n == k => waveforms.to_vec(),
        1 => vec![waveforms[0].clone(); k],
        n => {
            return Err(Error::InvalidParameter(format!(
                "expected {k} waveforms (or one to broadcast), got {n}"
            )))
        }
    };
    let mask = waveforms[0].mask().clone();
    for w in &waveforms {
        if w.mask() != &mask {
            return Err(Error::InvalidParameter(
                "waveforms must share a common spectrum mask".into(),
            ));
        }
    }

    let n = mask.len();
    let zccz_width = n * seed.zone() - n;
    let sequences = seed
        .sequences()
        .iter()
        .zip(&waveforms)
        .map(|(a, w)| kronecker(a, w.time_domain()))
        .collect();

    Ok(QuasiZCZSet {
        sequences,
        seed: seed.clone(),
        waveforms,
        mask,
        zccz_width,
    })
}

/// Per-check outcome of [`verify_theorem1`].
#[derive(Debug, Clone)]
pub struct Theorem1Report {
    /// Max |PCCF| over distinct pairs inside the zone, relative to the
    /// geometric mean of the zero-shift autocorrelations.
    pub cross_max_rel: f64,
    /// Max deviation of R_c(t) from R_a(0) * C_b(t) for |t| < N, relative.
    pub auto_inner_max_rel: f64,
    /// Max |R_c(t)| for N <= |t| < zone, relative.
    pub auto_outer_max_rel: f64,
    /// Max spectral magnitude on a hole over every length-N block of every
    /// sequence, relative to the block norm scale.
    pub leakage_max_rel: f64,
    pub cross_ok: bool,
    pub auto_ok: bool,
    pub leakage_ok: bool,
}

impl Theorem1Report {
    pub fn passes(&self) -> bool {
        self.cross_ok && self.auto_ok && self.leakage_ok
    }
}

/// Verify the three synthesized-family properties directly on the composite
/// sequences: (a) pairwise cross-correlations vanish inside the zone, (b) the
/// autocorrelation equals `R_a(0) * C_b(t)` for |t| < N and vanishes for
/// N <= |t| < zone, (c) every length-N block of every sequence has zero
/// spectrum on the mask's holes.
pub fn verify_theorem1(set: &QuasiZCZSet) -> Result<Theorem1Report> {
    let k = set.set_size();
    let total = set.seq_len();
    let n = set.waveform_len();
    let zone = set.zccz_width();

    // (a) cross-correlations inside the zone
    let mut cross_max_rel = 0.0f64;
    for i in 0..k {
        for j in (i + 1)..k {
            let ci = &set.sequences()[i];
            let cj = &set.sequences()[j];
            let reference = (ci.energy() * cj.energy()).sqrt();
            let corr = pccf_all(ci, cj)?;
            for t in 0..zone.min(total) {
                let mag = if t == 0 {
                    corr[0].norm()
                } else {
                    corr[t].norm().max(corr[total - t].norm())
                };
                cross_max_rel = cross_max_rel.max(mag / reference);
            }
        }
    }

    // (b) autocorrelation factorization inside the zone
    let mut auto_inner_max_rel = 0.0f64;
    let mut auto_outer_max_rel = 0.0f64;
    for (i, ci) in set.sequences().iter().enumerate() {
        let seed_energy = set.seed().sequences()[i].energy();
        let b = set.waveforms()[i].time_domain();
        let reference = ci.energy();
        let corr = pccf_all(ci, ci)?;
        for t in 0..zone.min(total) {
            let got = corr[t];
            if t < n {
                let want = accf_extended(b, b, t as i64) * seed_energy;
                auto_inner_max_rel = auto_inner_max_rel.max((got - want).norm() / reference);
            } else {
                auto_outer_max_rel = auto_outer_max_rel.max(got.norm() / reference);
            }
        }
    }

    // (c) block-wise spectral zeros on the holes
    let holes = set.mask().holes();
    let mut leakage_max_rel = 0.0f64;
    for ci in set.sequences() {
        let block_scale = (ci.energy() / set.seed().seq_len() as f64).sqrt();
        for block in ci.samples().chunks(n) {
            let mut buf = block.to_vec();
            fft_forward(&mut buf);
            let scale = 1.0 / (n as f64).sqrt();
            for &h in &holes {
                leakage_max_rel =
                    leakage_max_rel.max(buf[h].norm() * scale / block_scale.max(1e-300));
            }
        }
    }

    Ok(Theorem1Report {
        cross_max_rel,
        auto_inner_max_rel,
        auto_outer_max_rel,
        leakage_max_rel,
        cross_ok: cross_max_rel <= tol::ZERO_CORR_REL,
        auto_ok: auto_inner_max_rel <= tol::ZERO_CORR_REL
            && auto_outer_max_rel <= tol::ZERO_CORR_REL,
        leakage_ok: leakage_max_rel <= tol::ZERO_CORR_REL,
    })
}

/// The L-by-N time-frequency lattice of sequence `index`: entry (l, m) is
/// `a_i[l] * B_i[m]`, so columns indexed by holes are identically zero.
pub fn tf_lattice(set: &QuasiZCZSet, index: usize) -> Result<Vec<Vec<Complex>>> {
    if index >= set.set_size() {
        return Err(Error::InvalidParameter(format!(
            "sequence index {index} out of range for set of {}",
            set.set_size()
        )));
    }
    let a = &set.seed().sequences()[index];
    let spectrum = set.waveforms()[index].spectrum();
    Ok(a.iter()
        .map(|al| spectrum.iter().map(|bm| al * bm).collect())
        .collect())
}
