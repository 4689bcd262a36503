//! Building blocks for the synthesis: binary zero-correlation-zone seed
//! families, Zadoff-Chu sequences, masked frequency-domain waveforms, zone
//! verification, and the classical set-size bounds.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::seqcore::{idft, pccf_all, Complex, ComplexSeq, SpectrumMask};
use crate::tol;

/// A family of K equal-length sequences together with a declared
/// zero-correlation zone. The `verified` flag is only set once
/// [`verify_zcz`] has passed at the declared zone.
#[derive(Debug, Clone)]
pub struct ZCZSeedSet {
    sequences: Vec<ComplexSeq>,
    zone: usize,
    verified: bool,
}

impl ZCZSeedSet {
    pub fn new(sequences: Vec<ComplexSeq>, zone: usize) -> Result<Self> {
        if sequences.is_empty() {
            return Err(Error::EmptySequence);
        }
        let len = sequences[0].len();
        for s in &sequences {
            if s.len() != len {
                return Err(Error::LengthMismatch {
                    left: len,
                    right: s.len(),
                });
            }
        }
        if zone == 0 || zone > len {
            return Err(Error::InvalidParameter(format!(
                "zone {zone} outside 1..={len}"
            )));
        }
        Ok(Self {
            sequences,
            zone,
            verified: false,
        })
    }

    /// Construct and verify in one step; fails if the zone does not hold.
    pub fn new_verified(sequences: Vec<ComplexSeq>, zone: usize) -> Result<Self> {
        let mut set = Self::new(sequences, zone)?;
        let report = set.verify()?;
        if !report.passes {
            return Err(Error::VerificationFailed(format!(
                "declared zone {zone} not achieved: max in-zone |PACF|={:.3e}, |PCCF|={:.3e} (relative)",
                report.max_pacf / report.reference,
                report.max_pccf / report.reference
            )));
        }
        Ok(set)
    }

    /// Number of sequences K.
    pub fn set_size(&self) -> usize {
        self.sequences.len()
    }

    /// Common sequence length L.
    pub fn seq_len(&self) -> usize {
        self.sequences[0].len()
    }

    /// Declared zone Z.
    pub fn zone(&self) -> usize {
        self.zone
    }

    pub fn sequences(&self) -> &[ComplexSeq] {
        &self.sequences
    }

    pub fn is_verified(&self) -> bool {
        self.verified
    }

    /// Run [`verify_zcz`] at the declared zone, latching the verified flag on
    /// success.
    pub fn verify(&mut self) -> Result<ZczReport> {
        let report = verify_zcz(&self.sequences, self.zone)?;
        if report.passes {
            self.verified = true;
        }
        Ok(report)
    }
}

/// A frequency-domain waveform bound to the spectrum mask it satisfies,
/// with its time-domain image cached.
#[derive(Debug, Clone)]
pub struct FreqWaveform {
    spectrum: ComplexSeq,
    time: ComplexSeq,
    mask: SpectrumMask,
}

impl FreqWaveform {
    /// Wrap an existing spectrum, verifying it is zero on every hole.
    /// Residues below `1e-9` of the RMS bin magnitude are snapped to exact
    /// zeros; anything larger is rejected.
    pub fn from_spectrum(spectrum: ComplexSeq, mask: SpectrumMask) -> Result<Self> {
        if spectrum.len() != mask.len() {
            return Err(Error::LengthMismatch {
                left: spectrum.len(),
                right: mask.len(),
            });
        }
        let rms = (spectrum.energy() / spectrum.len() as f64).sqrt();
        let mut bins = spectrum.samples().to_vec();
        for (k, v) in bins.iter_mut().enumerate() {
            if mask.is_hole(k) {
                if v.norm() > tol::ZERO_CORR_REL * rms.max(1.0) {
                    return Err(Error::Schema(format!(
                        "spectrum bin {k} is a hole but carries magnitude {:.3e}",
                        v.norm()
                    )));
                }
                *v = Complex::new(0.0, 0.0);
            }
        }
        let spectrum = ComplexSeq::new(bins)?;
        let time = idft(&spectrum);
        Ok(Self {
            spectrum,
            time,
            mask,
        })
    }

    /// Number of subcarriers N.
    pub fn n(&self) -> usize {
        self.spectrum.len()
    }

    pub fn spectrum(&self) -> &ComplexSeq {
        &self.spectrum
    }

    /// Cached time-domain image (unitary inverse DFT of the spectrum).
    pub fn time_domain(&self) -> &ComplexSeq {
        &self.time
    }

    pub fn mask(&self) -> &SpectrumMask {
        &self.mask
    }

    pub fn energy(&self) -> f64 {
        self.spectrum.energy()
    }

    /// Rescale so that the spectrum energy equals N.
    pub fn normalized_energy(&self) -> Result<Self> {
        let e = self.energy();
        if e == 0.0 {
            return Err(Error::ZeroSequence);
        }
        let factor = Complex::new((self.n() as f64 / e).sqrt(), 0.0);
        Ok(Self {
            spectrum: self.spectrum.scaled(factor),
            time: self.time.scaled(factor),
            mask: self.mask.clone(),
        })
    }
}

/// Zadoff-Chu sequence `B_k = exp(-j pi u k^2 / n)`, `k = 0..n-1`. Unimodular
/// for any root; perfect periodic autocorrelation when `gcd(u, n) = 1` and
/// `n` is even (or `u` even).
pub fn zadoff_chu(n: usize, u: u64) -> Result<ComplexSeq> {
    if n == 0 {
        return Err(Error::EmptySequence);
    }
    if u == 0 {
        return Err(Error::InvalidParameter(
            "Zadoff-Chu root must be >= 1".into(),
        ));
    }
    let nf = n as f64;
    let samples = (0..n)
        .map(|k| {
            // reduce k^2 mod 2n before the float divide to keep the phase
            // argument small for large n
            let k2 = ((k as u128 * k as u128) % (2 * n as u128)) as f64;
            let phase = -std::f64::consts::PI * (u as f64) * k2 / nf;
            Complex64::from_polar(1.0, phase)
        })
        .collect();
    ComplexSeq::new(samples)
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Zero a generator spectrum on the mask's holes and cache the time-domain
/// waveform.
pub fn masked_waveform(generator: &ComplexSeq, mask: &SpectrumMask) -> Result<FreqWaveform> {
    if generator.len() != mask.len() {
        return Err(Error::LengthMismatch {
            left: generator.len(),
            right: mask.len(),
        });
    }
    let bins = generator
        .samples()
        .iter()
        .enumerate()
        .map(|(k, v)| {
            if mask.is_hole(k) {
                Complex::new(0.0, 0.0)
            } else {
                *v
            }
        })
        .collect();
    let spectrum = ComplexSeq::new(bins)?;
    let time = idft(&spectrum);
    Ok(FreqWaveform {
        spectrum,
        time,
        mask: mask.clone(),
    })
}

const EXAMPLE1_SET: [[f64; 16]; 2] = [
    [
        1.0, 1.0, 1.0, 1.0, 1.0, -1.0, 1.0, -1.0, 1.0, 1.0, -1.0, -1.0, 1.0, -1.0, -1.0, 1.0,
    ],
    [
        1.0, -1.0, 1.0, -1.0, 1.0, 1.0, 1.0, 1.0, 1.0, -1.0, -1.0, 1.0, 1.0, 1.0, -1.0, -1.0,
    ],
];

const EXAMPLE2_SET: [[f64; 16]; 4] = [
    [
        1.0, 1.0, -1.0, 1.0, 1.0, 1.0, -1.0, 1.0, -1.0, -1.0, -1.0, 1.0, -1.0, -1.0, -1.0, 1.0,
    ],
    [
        -1.0, -1.0, 1.0, -1.0, 1.0, 1.0, -1.0, 1.0, 1.0, 1.0, 1.0, -1.0, -1.0, -1.0, -1.0, 1.0,
    ],
    [
        1.0, -1.0, -1.0, -1.0, 1.0, -1.0, -1.0, -1.0, -1.0, 1.0, -1.0, -1.0, -1.0, 1.0, -1.0, -1.0,
    ],
    [
        -1.0, 1.0, 1.0, 1.0, 1.0, -1.0, -1.0, -1.0, 1.0, -1.0, 1.0, 1.0, -1.0, 1.0, -1.0, -1.0,
    ],
];

/// Built-in binary seed sets: `example1` is a (2,16,3) family, `example2` a
/// bound-achieving (4,16,3) family. Both are verified on construction.
pub fn builtin_zcz(name: &str) -> Result<ZCZSeedSet> {
    let rows: &[[f64; 16]] = match name {
        "example1" => &EXAMPLE1_SET,
        "example2" => &EXAMPLE2_SET,
        other => return Err(Error::UnknownSeedSet(other.to_string())),
    };
    let sequences = rows
        .iter()
        .map(|r| ComplexSeq::from_reals(r))
        .collect::<Result<Vec<_>>>()?;
    ZCZSeedSet::new_verified(sequences, 3)
}

/// Polyphase seed family from frequency-shift modulation of a perfect
/// Zadoff-Chu sequence: sequence `i` has samples `s[m] * w_k^(i*m)`. The
/// returned set is verified and carries the zone actually achieved, which is
/// at least `n / k`; construction fails otherwise.
pub fn freq_shift_zcz(n: usize, k: usize, u: u64) -> Result<ZCZSeedSet> {
    if k == 0 || n == 0 || n % k != 0 {
        return Err(Error::InvalidParameter(format!(
            "set size {k} must divide sequence length {n}"
        )));
    }
    if gcd(u, n as u64) != 1 {
        return Err(Error::InvalidParameter(format!(
            "root {u} shares a factor with {n}; the base sequence would not be perfect"
        )));
    }
    let base = zadoff_chu(n, u)?;
    let step = 2.0 * std::f64::consts::PI / k as f64;
    let sequences: Vec<ComplexSeq> = (0..k)
        .map(|i| {
            ComplexSeq::new(
                base.samples()
                    .iter()
                    .enumerate()
                    .map(|(m, s)| s * Complex::from_polar(1.0, step * (i * m) as f64))
                    .collect(),
            )
        })
        .collect::<Result<Vec<_>>>()?;

    let min_zone = n / k;
    let report = verify_zcz(&sequences, min_zone)?;
    if report.achieved_zcz < min_zone {
        return Err(Error::VerificationFailed(format!(
            "frequency-shift family achieved zone {} < {}",
            report.achieved_zcz, min_zone
        )));
    }
    let mut set = ZCZSeedSet::new(sequences, report.achieved_zcz)?;
    set.verify()?;
    Ok(set)
}

/// Outcome of checking a sequence family against a zone.
#[derive(Debug, Clone)]
pub struct ZczReport {
    /// Zone the check ran at.
    pub zone: usize,
    /// Max |PACF| over `1 <= |t| < zone`, absolute.
    pub max_pacf: f64,
    /// Max |PCCF| over distinct pairs and `0 <= |t| < zone`, absolute.
    pub max_pccf: f64,
    /// Largest zone at which both conditions hold.
    pub achieved_zcz: usize,
    /// Largest zone at which the cross condition alone holds.
    pub achieved_zccz: usize,
    /// Both conditions hold at the requested zone.
    pub passes: bool,
    /// Cross condition holds at the requested zone but the auto condition
    /// does not: the family is quasi-ZCZ only.
    pub quasi_zcz_only: bool,
    /// Zero-shift reference value the relative tolerance is taken against.
    pub reference: f64,
}

/// Check the two zone conditions — vanishing out-of-phase autocorrelation
/// and vanishing pairwise cross-correlation — at the given zone, and find
/// the largest zones at which each holds. "Zero" means below `1e-9` relative
/// to the zero-shift autocorrelation.
pub fn verify_zcz(sequences: &[ComplexSeq], zone: usize) -> Result<ZczReport> {
    if sequences.is_empty() {
        return Err(Error::EmptySequence);
    }
    let len = sequences[0].len();
    for s in sequences {
        if s.len() != len {
            return Err(Error::LengthMismatch {
                left: len,
                right: s.len(),
            });
        }
    }
    if zone == 0 || zone > len {
        return Err(Error::InvalidParameter(format!(
            "zone {zone} outside 1..={len}"
        )));
    }
    let k = sequences.len();

    let reference = sequences.iter().map(|s| s.energy()).fold(0.0f64, f64::max);
    let threshold = tol::ZERO_CORR_REL * reference;

    // first out-of-phase shift with nonzero PACF, over the whole set
    let mut first_auto = len;
    let mut max_pacf = 0.0f64;
    for s in sequences {
        let corr = pccf_all(s, s)?;
        for t in 1..len {
            let mag = corr[t].norm().max(corr[len - t].norm());
            if t < zone {
                max_pacf = max_pacf.max(mag);
            }
            if mag > threshold && t < first_auto {
                first_auto = t;
            }
        }
    }

    // first shift (from zero) with nonzero PCCF over distinct pairs
    let mut first_cross = len;
    let mut max_pccf = 0.0f64;
    for i in 0..k {
        for j in (i + 1)..k {
            let corr = pccf_all(&sequences[i], &sequences[j])?;
            for t in 0..len {
                let mag = if t == 0 {
                    corr[0].norm()
                } else {
                    corr[t].norm().max(corr[len - t].norm())
                };
                if t < zone {
                    max_pccf = max_pccf.max(mag);
                }
                if mag > threshold && t < first_cross {
                    first_cross = t;
                }
            }
        }
    }

    let achieved_zccz = first_cross;
    let achieved_zcz = first_cross.min(first_auto);
    let auto_ok = max_pacf <= threshold;
    let cross_ok = max_pccf <= threshold;
    Ok(ZczReport {
        zone,
        max_pacf,
        max_pccf,
        achieved_zcz,
        achieved_zccz,
        passes: auto_ok && cross_ok,
        quasi_zcz_only: cross_ok && !auto_ok,
        reference,
    })
}

/// Sequence alphabet the set-size bound applies to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Alphabet {
    Binary,
    Polyphase,
}

/// Set-size upper bounds for (K, L, Z) families: `K <= floor(L/Z)` for
/// polyphase alphabets, `K <= floor(L / (2(Z-1)))` for binary ones (the
/// binary form needs `Z >= 3`).
pub fn zcz_bounds(k: usize, l: usize, z: usize, alphabet: Alphabet) -> Result<bool> {
    if z == 0 {
        return Err(Error::InvalidParameter("zone must be >= 1".into()));
    }
    match alphabet {
        Alphabet::Polyphase => Ok(k <= l / z),
        Alphabet::Binary => {
            if z < 3 {
                return Err(Error::InvalidParameter(
                    "binary bound is stated for zones >= 3".into(),
                ));
            }
            Ok(k <= l / (2 * (z - 1)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqcore::{
        accf_extended, dft, max_sidelobe, papr_db, spectral_null, CorrelationKind,
    };

    fn example2_mask() -> SpectrumMask {
        let holes: Vec<usize> = (14..20).chain(40..48).collect();
        SpectrumMask::with_holes(64, &holes).unwrap()
    }

    #[test]
    fn zadoff_chu_matches_formula() {
        let b = zadoff_chu(64, 3).unwrap();
        for (k, v) in b.iter().enumerate().take(8) {
            let phase = -std::f64::consts::PI * 3.0 * (k * k) as f64 / 64.0;
            let want = Complex::from_polar(1.0, phase);
            assert!((v - want).norm() < 1e-12, "k={k}");
        }
        for v in b.iter() {
            assert!((v.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn zadoff_chu_perfect_autocorrelation() {
        let b = zadoff_chu(64, 3).unwrap();
        let corr = pccf_all(&b, &b).unwrap();
        for (t, v) in corr.iter().enumerate().skip(1) {
            assert!(v.norm() <= 1e-10 * 64.0, "t={t} -> {}", v.norm());
        }
    }

    #[test]
    fn zadoff_chu_rejects_zero_root() {
        assert!(zadoff_chu(64, 0).is_err());
    }

    #[test]
    fn masked_waveform_empty_hole_set_keeps_papr_zero() {
        let zc = zadoff_chu(64, 3).unwrap();
        let mask = SpectrumMask::all_available(64).unwrap();
        let w = masked_waveform(&zc, &mask).unwrap();
        assert!(papr_db(w.time_domain()).unwrap().abs() < 1e-9);
    }

    #[test]
    fn masked_zc_root9_matches_reported_metrics() {
        // the (4,16,3)-seed scenario's fourth root: 4.1 dB and 0.2131
        let mask = example2_mask();
        let w = masked_waveform(&zadoff_chu(64, 9).unwrap(), &mask).unwrap();
        let papr = papr_db(w.time_domain()).unwrap();
        assert!((papr - 4.1).abs() < 0.1, "papr={papr}");
        let side = max_sidelobe(w.time_domain(), CorrelationKind::Aperiodic).unwrap();
        assert!((side - 0.2131).abs() < 0.005, "side={side}");
    }

    #[test]
    fn masked_waveform_spectrum_exactly_zero_on_holes() {
        let mask = example2_mask();
        let w = masked_waveform(&zadoff_chu(64, 5).unwrap(), &mask).unwrap();
        let spec = dft(w.time_domain());
        for &h in &mask.holes() {
            assert!(spec[h].norm() < 1e-12 * 64.0);
        }
    }

    #[test]
    fn builtin_sets_verify_at_declared_zone() {
        for name in ["example1", "example2"] {
            let set = builtin_zcz(name).unwrap();
            assert!(set.is_verified());
            assert_eq!(set.zone(), 3);
            assert_eq!(set.seq_len(), 16);
            let report = verify_zcz(set.sequences(), 3).unwrap();
            assert!(report.passes);
            assert_eq!(report.max_pacf, 0.0);
            assert_eq!(report.max_pccf, 0.0);
        }
        assert_eq!(builtin_zcz("example1").unwrap().set_size(), 2);
        assert_eq!(builtin_zcz("example2").unwrap().set_size(), 4);
        assert!(matches!(builtin_zcz("nope"), Err(Error::UnknownSeedSet(_))));
    }

    #[test]
    fn builtin_sets_start_as_printed() {
        let s1 = builtin_zcz("example1").unwrap();
        let z1 = &s1.sequences()[0];
        let signs: Vec<f64> = z1.iter().take(6).map(|v| v.re).collect();
        assert_eq!(signs, vec![1.0, 1.0, 1.0, 1.0, 1.0, -1.0]);

        let s2 = builtin_zcz("example2").unwrap();
        let a1 = &s2.sequences()[0];
        let signs: Vec<f64> = a1.iter().take(4).map(|v| v.re).collect();
        assert_eq!(signs, vec![1.0, 1.0, -1.0, 1.0]);
    }

    #[test]
    fn nulling_destroys_the_zone() {
        let set = builtin_zcz("example1").unwrap();
        let mask = SpectrumMask::with_holes(16, &[4, 5, 9, 10, 11, 12]).unwrap();
        let nulled: Vec<ComplexSeq> = set
            .sequences()
            .iter()
            .map(|z| spectral_null(z, &mask).unwrap())
            .collect();
        let report = verify_zcz(&nulled, 3).unwrap();
        assert!(!report.passes);
        assert!(report.max_pacf > 1e-3 || report.max_pccf > 1e-3);

        // PAPR grows past 5.5 dB for the first nulled sequence
        let papr = papr_db(&nulled[0]).unwrap();
        assert!((papr - 5.53).abs() < 0.05, "papr={papr}");
    }

    #[test]
    fn freq_shift_family_reaches_the_polyphase_bound() {
        let set = freq_shift_zcz(64, 16, 3).unwrap();
        assert_eq!(set.set_size(), 16);
        assert!(set.is_verified());
        assert!(set.zone() >= 4);
        // bound K <= floor(L/Z) met with equality at the minimum zone
        assert!(zcz_bounds(16, 64, 64 / 16, Alphabet::Polyphase).unwrap());
        assert!(!zcz_bounds(17, 64, 64 / 16, Alphabet::Polyphase).unwrap());
        for s in set.sequences() {
            for v in s.iter() {
                assert!((v.norm() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn freq_shift_with_k1_is_the_perfect_base() {
        let set = freq_shift_zcz(64, 1, 3).unwrap();
        assert_eq!(set.set_size(), 1);
        assert_eq!(set.zone(), 64);
    }

    #[test]
    fn freq_shift_rejects_bad_parameters() {
        assert!(freq_shift_zcz(64, 5, 3).is_err()); // 5 does not divide 64
        assert!(freq_shift_zcz(64, 16, 4).is_err()); // gcd(4, 64) != 1
    }

    #[test]
    fn verify_zcz_orthogonal_pair_at_zone_one() {
        let a = ComplexSeq::from_reals(&[1.0, 1.0, 1.0, 1.0]).unwrap();
        let b = ComplexSeq::from_reals(&[1.0, -1.0, 1.0, -1.0]).unwrap();
        let report = verify_zcz(&[a, b], 1).unwrap();
        assert!(report.passes); // only PCCF(0)=0 is required at zone 1
        assert_eq!(report.max_pacf, 0.0); // no shifts inside zone 1
    }

    #[test]
    fn verify_zcz_detects_quasi_only_families() {
        // two orthogonal Fourier tones: cross-correlation vanishes at every
        // shift, autocorrelation never does
        let n = 8;
        let tone = |f: usize| {
            ComplexSeq::new(
                (0..n)
                    .map(|m| {
                        Complex::from_polar(
                            1.0,
                            2.0 * std::f64::consts::PI * (f * m) as f64 / n as f64,
                        )
                    })
                    .collect(),
            )
            .unwrap()
        };
        let report = verify_zcz(&[tone(1), tone(5)], 3).unwrap();
        assert!(!report.passes);
        assert!(report.quasi_zcz_only);
        assert!(report.achieved_zccz >= 3);
        assert_eq!(report.achieved_zcz, 1);
    }

    #[test]
    fn binary_bound_cases() {
        assert!(zcz_bounds(4, 16, 3, Alphabet::Binary).unwrap()); // equality
        assert!(zcz_bounds(2, 16, 3, Alphabet::Binary).unwrap());
        assert!(!zcz_bounds(5, 16, 3, Alphabet::Binary).unwrap());
        assert!(zcz_bounds(4, 16, 2, Alphabet::Binary).is_err());
    }

    #[test]
    fn waveform_energy_normalization() {
        let mask = example2_mask();
        let w = masked_waveform(&zadoff_chu(64, 3).unwrap(), &mask).unwrap();
        assert!((w.energy() - 50.0).abs() < 1e-9); // 64 - 14 unimodular bins
        let normed = w.normalized_energy().unwrap();
        assert!((normed.energy() - 64.0).abs() < 1e-9);
        // zeros on holes survive the scaling
        for &h in &mask.holes() {
            assert_eq!(normed.spectrum()[h].norm(), 0.0);
        }
    }

    #[test]
    fn accf_extension_used_by_kronecker_identity_is_zero_at_len() {
        let b = zadoff_chu(8, 3).unwrap();
        assert_eq!(accf_extended(&b, &b, 8).norm(), 0.0);
        assert_eq!(accf_extended(&b, &b, -8).norm(), 0.0);
    }
}
