//! Core sequence math: correlations, unitary transforms, cyclic shifts,
//! Kronecker products, PAPR, and spectral nulling.
//!
//! All correlation conventions follow the column-vector definitions used
//! throughout the crate: the aperiodic cross-correlation of `a` against `b`
//! at non-negative shift `t` is `sum_n a[n] * conj(b[n+t])`, and the periodic
//! one reduces the index modulo the common length. Negative aperiodic shifts
//! are defined by the conjugate-symmetric extension
//! `C_ab(-t) = conj(C_ba(t))`.

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

pub type Complex = Complex64;

/// Direct-sum correlation is used below this length; FFT above.
const FFT_THRESHOLD: usize = 48;

/// A finite complex-valued sample vector. Samples are validated to be finite
/// on construction; the empty sequence is rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSeq {
    samples: Vec<Complex>,
}

impl ComplexSeq {
    pub fn new(samples: Vec<Complex>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptySequence);
        }
        for (i, s) in samples.iter().enumerate() {
            if !s.re.is_finite() || !s.im.is_finite() {
                return Err(Error::NonFiniteSample(i));
            }
        }
        Ok(Self { samples })
    }

    /// Build from real parts only (imaginary parts zero).
    pub fn from_reals(reals: &[f64]) -> Result<Self> {
        Self::new(reals.iter().map(|&r| Complex::new(r, 0.0)).collect())
    }

    /// Build from magnitude and phase vectors of equal length.
    pub fn from_polar(mag: &[f64], phase: &[f64]) -> Result<Self> {
        if mag.len() != phase.len() {
            return Err(Error::LengthMismatch {
                left: mag.len(),
                right: phase.len(),
            });
        }
        Self::new(
            mag.iter()
                .zip(phase)
                .map(|(&m, &p)| Complex::from_polar(m, p))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction rejects empty vectors
    }

    pub fn samples(&self) -> &[Complex] {
        &self.samples
    }

    /// Total energy `sum |x_n|^2`.
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_sqr()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.samples.iter().all(|s| s.norm_sqr() == 0.0)
    }

    /// Scale every sample by a complex factor.
    pub fn scaled(&self, factor: Complex) -> ComplexSeq {
        ComplexSeq {
            samples: self.samples.iter().map(|s| s * factor).collect(),
        }
    }
}

impl std::ops::Index<usize> for ComplexSeq {
    type Output = Complex;
    fn index(&self, i: usize) -> &Complex {
        &self.samples[i]
    }
}

impl std::ops::Deref for ComplexSeq {
    type Target = [Complex];
    fn deref(&self) -> &[Complex] {
        &self.samples
    }
}

/// Subcarrier marking vector: `true` marks an available subcarrier, `false`
/// a spectrum hole. The hole set is always derived from the marking, never
/// stored separately.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectrumMask {
    marking: Vec<bool>,
}

impl SpectrumMask {
    pub fn new(marking: Vec<bool>) -> Result<Self> {
        if marking.is_empty() {
            return Err(Error::EmptySequence);
        }
        Ok(Self { marking })
    }

    /// Build from a 0/1 integer vector; any other value is rejected.
    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        let mut marking = Vec::with_capacity(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            match b {
                0 => marking.push(false),
                1 => marking.push(true),
                other => {
                    return Err(Error::Schema(format!(
                        "mask entry {i} is {other}, expected 0 or 1"
                    )))
                }
            }
        }
        Self::new(marking)
    }

    /// A mask of length `n` with every subcarrier available.
    pub fn all_available(n: usize) -> Result<Self> {
        Self::new(vec![true; n])
    }

    /// Mask with the given hole indices blocked out of `n` subcarriers.
    pub fn with_holes(n: usize, holes: &[usize]) -> Result<Self> {
        let mut marking = vec![true; n];
        for &h in holes {
            if h >= n {
                return Err(Error::InvalidParameter(format!(
                    "hole index {h} out of range for mask length {n}"
                )));
            }
            marking[h] = false;
        }
        Self::new(marking)
    }

    pub fn len(&self) -> usize {
        self.marking.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_available(&self, k: usize) -> bool {
        self.marking[k]
    }

    pub fn is_hole(&self, k: usize) -> bool {
        !self.marking[k]
    }

    pub fn marking(&self) -> &[bool] {
        &self.marking
    }

    /// Hole set: indices of blocked subcarriers, ascending.
    pub fn holes(&self) -> Vec<usize> {
        self.marking
            .iter()
            .enumerate()
            .filter(|(_, &m)| !m)
            .map(|(k, _)| k)
            .collect()
    }

    pub fn available_count(&self) -> usize {
        self.marking.iter().filter(|&&m| m).count()
    }

    pub fn hole_count(&self) -> usize {
        self.len() - self.available_count()
    }

    pub fn is_fully_blocked(&self) -> bool {
        self.available_count() == 0
    }

    /// Expand each subcarrier into `factor` consecutive subcarriers.
    pub fn expanded(&self, factor: usize) -> Result<Self> {
        if factor == 0 {
            return Err(Error::InvalidParameter("expansion factor 0".into()));
        }
        let mut marking = Vec::with_capacity(self.len() * factor);
        for &m in &self.marking {
            marking.extend(std::iter::repeat(m).take(factor));
        }
        Self::new(marking)
    }
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan_forward(len: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(len))
}

fn plan_inverse(len: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(len))
}

/// In-place unscaled forward FFT.
pub(crate) fn fft_forward(buf: &mut [Complex]) {
    plan_forward(buf.len()).process(buf);
}

/// In-place unscaled inverse FFT (no 1/N factor).
pub(crate) fn fft_inverse(buf: &mut [Complex]) {
    plan_inverse(buf.len()).process(buf);
}

/// Unitary discrete Fourier transform (1/sqrt(N) scaling).
pub fn dft(x: &ComplexSeq) -> ComplexSeq {
    let mut buf = x.samples.to_vec();
    fft_forward(&mut buf);
    let scale = 1.0 / (buf.len() as f64).sqrt();
    for v in &mut buf {
        *v *= scale;
    }
    ComplexSeq { samples: buf }
}

/// Unitary inverse discrete Fourier transform (1/sqrt(N) scaling).
pub fn idft(x: &ComplexSeq) -> ComplexSeq {
    let mut buf = x.samples.to_vec();
    fft_inverse(&mut buf);
    let scale = 1.0 / (buf.len() as f64).sqrt();
    for v in &mut buf {
        *v *= scale;
    }
    ComplexSeq { samples: buf }
}

/// Left-cyclic shift by `shift` positions (any sign, reduced mod the length).
pub fn cyclic_shift(x: &ComplexSeq, shift: i64) -> ComplexSeq {
    let len = x.len();
    let s = shift.rem_euclid(len as i64) as usize;
    let mut samples = Vec::with_capacity(len);
    samples.extend_from_slice(&x.samples[s..]);
    samples.extend_from_slice(&x.samples[..s]);
    ComplexSeq { samples }
}

/// Kronecker product: `u[l*N + n] = d[l] * x[n]` for `d` of length L and `x`
/// of length N.
pub fn kronecker(d: &ComplexSeq, x: &ComplexSeq) -> ComplexSeq {
    let mut samples = Vec::with_capacity(d.len() * x.len());
    for dl in d.samples.iter() {
        for xn in x.samples.iter() {
            samples.push(dl * xn);
        }
    }
    ComplexSeq { samples }
}

fn check_same_len(a: &ComplexSeq, b: &ComplexSeq) -> Result<usize> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(a.len())
}

/// Aperiodic cross-correlation at a single shift.
///
/// Defined for |shift| <= L-1; negative shifts use the conjugate-symmetric
/// extension `C_ab(-t) = conj(C_ba(t))`.
pub fn accf(a: &ComplexSeq, b: &ComplexSeq, shift: i64) -> Result<Complex> {
    let len = check_same_len(a, b)?;
    if shift.unsigned_abs() as usize >= len {
        return Err(Error::ShiftOutOfRange { shift, len });
    }
    Ok(accf_extended(a, b, shift))
}

/// Aperiodic cross-correlation with zero extension outside |shift| < L.
///
/// The zero extension is the natural completion used by the Kronecker
/// correlation identity, where shifts down to -N appear.
pub fn accf_extended(a: &ComplexSeq, b: &ComplexSeq, shift: i64) -> Complex {
    let len = a.len().min(b.len());
    if shift < 0 {
        return accf_extended(b, a, -shift).conj();
    }
    let t = shift as usize;
    if t >= len {
        return Complex::new(0.0, 0.0);
    }
    let mut acc = Complex::new(0.0, 0.0);
    for n in 0..len - t {
        acc += a.samples[n] * b.samples[n + t].conj();
    }
    acc
}

/// Periodic cross-correlation at a single shift (any integer, reduced mod L):
/// `R_ab(t) = sum_n a[n] * conj(b[(n+t) mod L]) = <a, T^t(b)>`.
pub fn pccf(a: &ComplexSeq, b: &ComplexSeq, shift: i64) -> Result<Complex> {
    let len = check_same_len(a, b)?;
    let t = shift.rem_euclid(len as i64) as usize;
    let mut acc = Complex::new(0.0, 0.0);
    for n in 0..len {
        let m = if n + t >= len { n + t - len } else { n + t };
        acc += a.samples[n] * b.samples[m].conj();
    }
    Ok(acc)
}

/// Periodic cross-correlations at every shift `t = 0..L-1`.
pub fn pccf_all(a: &ComplexSeq, b: &ComplexSeq) -> Result<Vec<Complex>> {
    let len = check_same_len(a, b)?;
    if len <= FFT_THRESHOLD {
        return (0..len as i64).map(|t| pccf(a, b, t)).collect();
    }
    let mut fa = a.samples.to_vec();
    let mut fb = b.samples.to_vec();
    fft_forward(&mut fa);
    fft_forward(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y.conj();
    }
    // r(t) = (1/L) * forward-FFT of A .* conj(B), evaluated at index t
    fft_forward(&mut fa);
    let scale = 1.0 / len as f64;
    Ok(fa.into_iter().map(|v| v * scale).collect())
}

/// Aperiodic cross-correlations at shifts `t = 0..L-1`. Negative shifts
/// follow from `C_ab(-t) = conj(C_ba(t))`.
pub fn accf_all(a: &ComplexSeq, b: &ComplexSeq) -> Result<Vec<Complex>> {
    let len = check_same_len(a, b)?;
    if len <= FFT_THRESHOLD {
        return Ok((0..len as i64).map(|t| accf_extended(a, b, t)).collect());
    }
    // Zero-pad both to 2L; the periodic correlation of the padded pair holds
    // the aperiodic values in its first L slots.
    let mut fa = vec![Complex::new(0.0, 0.0); 2 * len];
    let mut fb = vec![Complex::new(0.0, 0.0); 2 * len];
    fa[..len].copy_from_slice(&a.samples);
    fb[..len].copy_from_slice(&b.samples);
    fft_forward(&mut fa);
    fft_forward(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y.conj();
    }
    fft_forward(&mut fa);
    let scale = 1.0 / (2 * len) as f64;
    fa.truncate(len);
    Ok(fa.into_iter().map(|v| v * scale).collect())
}

/// Peak-to-average power ratio of the samples, in dB. Zero for unimodular
/// sequences; rejects the all-zero input.
pub fn papr_db(b: &ComplexSeq) -> Result<f64> {
    let mut peak = 0.0f64;
    let mut sum = 0.0f64;
    for s in b.samples.iter() {
        let p = s.norm_sqr();
        peak = peak.max(p);
        sum += p;
    }
    if sum == 0.0 {
        return Err(Error::ZeroSequence);
    }
    let mean = sum / b.len() as f64;
    Ok(10.0 * (peak / mean).log10())
}

/// Project a time-domain sequence onto the mask: `F^H * Diag[S] * F * z`.
/// The output's spectrum is exactly zero on every hole.
pub fn spectral_null(z: &ComplexSeq, mask: &SpectrumMask) -> Result<ComplexSeq> {
    if z.len() != mask.len() {
        return Err(Error::LengthMismatch {
            left: z.len(),
            right: mask.len(),
        });
    }
    let mut buf = z.samples.to_vec();
    fft_forward(&mut buf);
    for (k, v) in buf.iter_mut().enumerate() {
        if mask.is_hole(k) {
            *v = Complex::new(0.0, 0.0);
        }
    }
    fft_inverse(&mut buf);
    let scale = 1.0 / z.len() as f64;
    for v in &mut buf {
        *v *= scale;
    }
    ComplexSeq::new(buf)
}

/// Which correlation a sidelobe measurement refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrelationKind {
    Periodic,
    Aperiodic,
}

/// Maximum out-of-phase autocorrelation magnitude, normalized by the
/// zero-shift value.
pub fn max_sidelobe(b: &ComplexSeq, kind: CorrelationKind) -> Result<f64> {
    if b.is_zero() {
        return Err(Error::ZeroSequence);
    }
    let corr = match kind {
        CorrelationKind::Periodic => pccf_all(b, b)?,
        CorrelationKind::Aperiodic => accf_all(b, b)?,
    };
    let zero_shift = corr[0].re;
    let peak = corr
        .iter()
        .skip(1)
        .map(|v| v.norm())
        .fold(0.0f64, f64::max);
    Ok(peak / zero_shift)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn rand_seq(rng: &mut StdRng, len: usize) -> ComplexSeq {
        ComplexSeq::new(
            (0..len)
                .map(|_| Complex::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn accf_zero_shift_is_energy() {
        let a = ComplexSeq::from_reals(&[1.0, 1.0, 1.0, 1.0]).unwrap();
        let v = accf(&a, &a, 0).unwrap();
        assert!((v.re - 4.0).abs() < 1e-12 && v.im.abs() < 1e-12);
    }

    #[test]
    fn accf_matches_double_loop_oracle() {
        let mut rng = StdRng::seed_from_u64(7);
        let a = rand_seq(&mut rng, 8);
        let b = rand_seq(&mut rng, 8);
        for t in -7i64..=7 {
            // independent oracle: literal double loop over the definition
            let mut want = Complex::new(0.0, 0.0);
            for n in 0..8i64 {
                let m = n + t;
                if (0..8).contains(&m) {
                    want += a[n as usize] * b[m as usize].conj();
                }
            }
            let got = accf(&a, &b, t).unwrap();
            assert!((got - want).norm() < 1e-12, "t={t}");
        }
    }

    #[test]
    fn accf_rejects_out_of_range_shift() {
        let a = ComplexSeq::from_reals(&[1.0, 2.0]).unwrap();
        assert!(matches!(
            accf(&a, &a, 2),
            Err(Error::ShiftOutOfRange { .. })
        ));
        assert!(accf_extended(&a, &a, 2).norm() == 0.0);
    }

    #[test]
    fn pccf_conjugate_symmetry() {
        // R_aa(t) = conj(R_aa(-t)); for distinct sequences the arguments swap:
        // R_ab(t) = conj(R_ba(-t)).
        let mut rng = StdRng::seed_from_u64(11);
        let a = rand_seq(&mut rng, 8);
        let b = rand_seq(&mut rng, 8);
        for t in 0..8 {
            let auto_fwd = pccf(&a, &a, t).unwrap();
            let auto_bwd = pccf(&a, &a, -t).unwrap();
            assert!((auto_fwd - auto_bwd.conj()).norm() < 1e-12);

            let cross_fwd = pccf(&a, &b, t).unwrap();
            let cross_bwd = pccf(&b, &a, -t).unwrap();
            assert!((cross_fwd - cross_bwd.conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn pccf_zero_shift_is_energy() {
        let mut rng = StdRng::seed_from_u64(3);
        let a = rand_seq(&mut rng, 16);
        let v = pccf(&a, &a, 0).unwrap();
        assert!((v.re - a.energy()).abs() < 1e-12 && v.im.abs() < 1e-12);
    }

    #[test]
    fn fft_paths_agree_with_direct() {
        let mut rng = StdRng::seed_from_u64(19);
        for len in [49usize, 64, 100, 128] {
            let a = rand_seq(&mut rng, len);
            let b = rand_seq(&mut rng, len);
            let per = pccf_all(&a, &b).unwrap();
            let aper = accf_all(&a, &b).unwrap();
            for t in 0..len {
                let dp = pccf(&a, &b, t as i64).unwrap();
                let da = accf_extended(&a, &b, t as i64);
                assert!((per[t] - dp).norm() < 1e-10, "pccf len={len} t={t}");
                assert!((aper[t] - da).norm() < 1e-10, "accf len={len} t={t}");
            }
        }
    }

    #[test]
    fn dft_impulse_is_flat() {
        let x = ComplexSeq::from_reals(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        let spec = dft(&x);
        for v in spec.iter() {
            assert!((v - Complex::new(0.5, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn dft_is_unitary() {
        let mut rng = StdRng::seed_from_u64(23);
        let x = rand_seq(&mut rng, 64);
        let spec = dft(&x);
        assert!((spec.energy() - x.energy()).abs() < 1e-12 * x.energy().max(1.0));
        let back = idft(&spec);
        for (u, v) in back.iter().zip(x.iter()) {
            assert!((u - v).norm() < 1e-12);
        }
    }

    #[test]
    fn dft_matrix_times_adjoint_is_identity() {
        // apply dft then idft to each basis vector of C^8
        for i in 0..8 {
            let mut e = vec![Complex::new(0.0, 0.0); 8];
            e[i] = Complex::new(1.0, 0.0);
            let x = ComplexSeq::new(e).unwrap();
            let round = idft(&dft(&x));
            for (k, v) in round.iter().enumerate() {
                let want = if k == i { 1.0 } else { 0.0 };
                assert!((v - Complex::new(want, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn cyclic_shift_basics() {
        let x = ComplexSeq::from_reals(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(cyclic_shift(&x, 0), x);
        assert_eq!(cyclic_shift(&x, 3), x);
        let shifted = cyclic_shift(&x, 1);
        assert_eq!(
            shifted.samples(),
            &[
                Complex::new(2.0, 0.0),
                Complex::new(3.0, 0.0),
                Complex::new(1.0, 0.0)
            ]
        );
        assert_eq!(cyclic_shift(&x, -2), shifted);
    }

    #[test]
    fn kronecker_definition() {
        let d = ComplexSeq::from_reals(&[1.0, -1.0]).unwrap();
        let x = ComplexSeq::new(vec![Complex::new(1.0, 0.0), Complex::new(0.0, 1.0)]).unwrap();
        let u = kronecker(&d, &x);
        let want = [
            Complex::new(1.0, 0.0),
            Complex::new(0.0, 1.0),
            Complex::new(-1.0, 0.0),
            Complex::new(0.0, -1.0),
        ];
        assert_eq!(u.samples(), &want);

        let single = ComplexSeq::from_reals(&[1.0]).unwrap();
        assert_eq!(kronecker(&single, &x), x);
    }

    #[test]
    fn kronecker_correlation_identity() {
        // R_uv(l*N + n) = R_de(l) C_xy(n) + R_de(l+1) C_xy(n - N), all shifts
        let mut rng = StdRng::seed_from_u64(31);
        let d = rand_seq(&mut rng, 4);
        let e = rand_seq(&mut rng, 4);
        let x = rand_seq(&mut rng, 5);
        let y = rand_seq(&mut rng, 5);
        let u = kronecker(&d, &x);
        let v = kronecker(&e, &y);
        let n_len = 5i64;
        for tau in 0..20i64 {
            let l = tau.div_euclid(n_len);
            let n = tau.rem_euclid(n_len);
            let want = pccf(&d, &e, l).unwrap() * accf_extended(&x, &y, n)
                + pccf(&d, &e, l + 1).unwrap() * accf_extended(&x, &y, n - n_len);
            let got = pccf(&u, &v, tau).unwrap();
            assert!((got - want).norm() < 1e-10, "tau={tau}");
        }
    }

    #[test]
    fn papr_of_unimodular_is_zero() {
        let b = ComplexSeq::new(
            (0..16)
                .map(|k| Complex::from_polar(1.0, 0.37 * k as f64))
                .collect(),
        )
        .unwrap();
        assert!(papr_db(&b).unwrap().abs() < 1e-12);
    }

    #[test]
    fn papr_scale_invariant() {
        let mut rng = StdRng::seed_from_u64(5);
        let b = rand_seq(&mut rng, 32);
        let base = papr_db(&b).unwrap();
        let scaled = papr_db(&b.scaled(Complex::new(-2.5, 1.25))).unwrap();
        assert!((base - scaled).abs() < 1e-12);
    }

    #[test]
    fn papr_rejects_all_zero() {
        let z = ComplexSeq::new(vec![Complex::new(0.0, 0.0); 4]).unwrap();
        assert!(matches!(papr_db(&z), Err(Error::ZeroSequence)));
    }

    #[test]
    fn spectral_null_identity_for_all_available() {
        let mut rng = StdRng::seed_from_u64(41);
        let z = rand_seq(&mut rng, 16);
        let mask = SpectrumMask::all_available(16).unwrap();
        let out = spectral_null(&z, &mask).unwrap();
        for (u, v) in out.iter().zip(z.iter()) {
            assert!((u - v).norm() < 1e-12);
        }
    }

    #[test]
    fn spectral_null_projects_and_is_idempotent() {
        let mut rng = StdRng::seed_from_u64(43);
        let z = rand_seq(&mut rng, 32);
        let mask = SpectrumMask::with_holes(32, &[0, 3, 4, 17, 30]).unwrap();
        let once = spectral_null(&z, &mask).unwrap();
        let spec = dft(&once);
        for &h in &mask.holes() {
            assert!(spec[h].norm() < 1e-12 * z.energy().sqrt());
        }
        let twice = spectral_null(&once, &mask).unwrap();
        for (u, v) in twice.iter().zip(once.iter()) {
            assert!((u - v).norm() < 1e-12);
        }
    }

    #[test]
    fn spectral_null_length_mismatch() {
        let z = ComplexSeq::from_reals(&[1.0, 2.0]).unwrap();
        let mask = SpectrumMask::all_available(4).unwrap();
        assert!(matches!(
            spectral_null(&z, &mask),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn mask_holes_derived_from_marking() {
        let mask = SpectrumMask::from_bits(&[1, 1, 0, 1, 0]).unwrap();
        assert_eq!(mask.holes(), vec![2, 4]);
        assert_eq!(mask.available_count() + mask.hole_count(), mask.len());
        assert!(SpectrumMask::from_bits(&[1, 2]).is_err());
    }

    #[test]
    fn rejects_non_finite_samples() {
        let err = ComplexSeq::new(vec![Complex::new(f64::NAN, 0.0)]);
        assert!(matches!(err, Err(Error::NonFiniteSample(0))));
        assert!(matches!(
            ComplexSeq::new(vec![]),
            Err(Error::EmptySequence)
        ));
    }
}
