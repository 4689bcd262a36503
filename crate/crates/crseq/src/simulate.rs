//! Quasi-synchronous multi-user CDMA link simulator over multipath Rayleigh
//! channels, plus MC-CDMA (MMSE frequency-domain equalizer) and NC-OFDM
//! baselines and spectrum-sensing-mismatch experiments.
//!
//! The channel model works on one spread data block at a time: a cyclic
//! prefix at least as long as the maximum delay turns linear path delays
//! into cyclic shifts, so the received block for the user of interest is
//!
//! `r = sum_j amp_j * d_j * sum_p h_p^j * T^(delay_p + offset_j)(c_j) + n`
//!
//! with per-user integer offsets drawn uniformly from `[0, cp_len - t_max]`
//! (zero for the user being decoded) and `T` the left-cyclic shift. The RAKE
//! despreads at each known tap delay of the desired user and combines with
//! conjugate tap weights.
//!
//! Every Monte-Carlo trial derives its RNG streams from
//! `(rng_seed, draw index, purpose)`, so a result is a pure function of the
//! configuration and seed, independent of worker scheduling.

use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::derive_rng;
use crate::error::{Error, Result};
use crate::seqcore::{Complex, ComplexSeq, SpectrumMask};

/// One resolvable path: integer sample delay and average linear power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelTap {
    pub delay: usize,
    pub power: f64,
}

/// A named multipath power-delay profile. Delays are strictly increasing
/// starting at zero and the average powers sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelProfile {
    name: String,
    taps: Vec<ChannelTap>,
}

impl ChannelProfile {
    pub fn new(name: impl Into<String>, taps: Vec<ChannelTap>) -> Result<Self> {
        if taps.is_empty() {
            return Err(Error::InvalidParameter("channel needs at least one tap".into()));
        }
        if taps[0].delay != 0 {
            return Err(Error::InvalidParameter("first tap delay must be 0".into()));
        }
        for pair in taps.windows(2) {
            if pair[1].delay <= pair[0].delay {
                return Err(Error::InvalidParameter(
                    "tap delays must be strictly increasing".into(),
                ));
            }
        }
        let total: f64 = taps.iter().map(|t| t.power).sum();
        if taps.iter().any(|t| t.power <= 0.0) || !total.is_finite() || total <= 0.0 {
            return Err(Error::InvalidParameter("tap powers must be positive".into()));
        }
        if (total - 1.0).abs() > 1e-6 {
            return Err(Error::InvalidParameter(format!(
                "tap powers must sum to 1 (got {total})"
            )));
        }
        // snap the tiny residual so the sum is exactly one
        let taps = taps
            .iter()
            .map(|t| ChannelTap {
                delay: t.delay,
                power: t.power / total,
            })
            .collect();
        Ok(Self {
            name: name.into(),
            taps,
        })
    }

    /// Built-in profiles: `flat1` (single tap) and `cost207ra6-approx`
    /// (six sample-spaced taps with exponentially decaying powers, a stand-in
    /// for the rural-area reference profile; real measurements can be loaded
    /// from a scenario file instead).
    pub fn named(name: &str) -> Result<Self> {
        match name {
            "flat1" => Self::new("flat1", vec![ChannelTap { delay: 0, power: 1.0 }]),
            "cost207ra6-approx" => {
                let raw: Vec<f64> = (0..6).map(|d| (-(d as f64)).exp()).collect();
                let total: f64 = raw.iter().sum();
                Self::new(
                    "cost207ra6-approx",
                    raw.iter()
                        .enumerate()
                        .map(|(d, &p)| ChannelTap {
                            delay: d,
                            power: p / total,
                        })
                        .collect(),
                )
            }
            other => Err(Error::InvalidParameter(format!(
                "unknown channel profile `{other}`"
            ))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn taps(&self) -> &[ChannelTap] {
        &self.taps
    }

    /// Maximum path delay in samples.
    pub fn t_max(&self) -> usize {
        self.taps.last().map(|t| t.delay).unwrap_or(0)
    }
}

/// Measured error statistics with a binomial 95% half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BERResult {
    pub ber: f64,
    pub bit_errors: u64,
    pub bits: u64,
    pub ci95: f64,
}

impl BERResult {
    fn from_counts(bit_errors: u64, bits: u64) -> Self {
        let ber = if bits == 0 {
            0.0
        } else {
            bit_errors as f64 / bits as f64
        };
        let ci95 = if bits == 0 {
            0.0
        } else {
            1.96 * (ber * (1.0 - ber) / bits as f64).sqrt()
        };
        Self {
            ber,
            bit_errors,
            bits,
            ci95,
        }
    }
}

/// Scenario parameters shared by every system variant.
#[derive(Debug, Clone)]
pub struct LinkConfig {
    pub users: usize,
    /// Per-bit SNR at the receiver, averaged over fading.
    pub ebn0_db: f64,
    /// Near-far factor: every interferer arrives with `nf_db` more energy
    /// than the user being decoded.
    pub nf_db: f64,
    /// Cyclic-prefix length in samples; must cover the maximum path delay.
    pub cp_len: usize,
    pub channel: ChannelProfile,
    pub n_bits: u64,
    pub rng_seed: u64,
    /// Data symbols sent per independent channel draw (quasi-static blocks).
    pub symbols_per_draw: usize,
    /// Disable noise injection entirely (interference-only runs).
    pub noiseless: bool,
}

impl LinkConfig {
    pub fn new(users: usize, ebn0_db: f64, channel: ChannelProfile) -> Self {
        Self {
            users,
            ebn0_db,
            nf_db: 0.0,
            cp_len: channel.t_max(),
            channel,
            n_bits: 10_000,
            rng_seed: 0,
            symbols_per_draw: 1,
            noiseless: false,
        }
    }

    fn validate(&self, code_len: usize, code_count: usize) -> Result<()> {
        if self.users == 0 {
            return Err(Error::InvalidParameter("need at least one user".into()));
        }
        if self.users > code_count {
            return Err(Error::InvalidParameter(format!(
                "{} users but only {} spreading sequences",
                self.users, code_count
            )));
        }
        if self.cp_len < self.channel.t_max() {
            return Err(Error::InvalidParameter(format!(
                "cyclic prefix {} shorter than the channel spread {}",
                self.cp_len,
                self.channel.t_max()
            )));
        }
        if self.channel.t_max() >= code_len {
            return Err(Error::InvalidParameter(
                "channel delay spread reaches the spreading length".into(),
            ));
        }
        if !self.ebn0_db.is_finite() || !self.nf_db.is_finite() {
            return Err(Error::InvalidParameter("non-finite SNR parameter".into()));
        }
        Ok(())
    }
}

/// Draw one realization of complex Gaussian tap coefficients for a profile;
/// tap `p` has variance `power_p` (Rayleigh magnitudes).
pub fn draw_channel<R: Rng>(profile: &ChannelProfile, rng: &mut R) -> Vec<Complex> {
    profile
        .taps()
        .iter()
        .map(|t| {
            let sigma = (t.power / 2.0).sqrt();
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex::new(re * sigma, im * sigma)
        })
        .collect()
}

/// Spread data symbols by a signature sequence, inserting a cyclic prefix —
/// a repetition of the block's last `cp_len` samples — ahead of each block.
pub fn transmit(data: &[Complex], code: &ComplexSeq, cp_len: usize) -> Result<ComplexSeq> {
    if data.is_empty() {
        return Err(Error::EmptySequence);
    }
    let m = code.len();
    if cp_len > m {
        return Err(Error::InvalidParameter(format!(
            "cyclic prefix {cp_len} longer than the block {m}"
        )));
    }
    let mut out = Vec::with_capacity(data.len() * (m + cp_len));
    for &d in data {
        let block: Vec<Complex> = code.iter().map(|c| c * d).collect();
        out.extend_from_slice(&block[m - cp_len..]);
        out.extend_from_slice(&block);
    }
    ComplexSeq::new(out)
}

/// Correlate the received block against a local reference:
/// `<r, c> = sum_n r[n] * conj(c[n])`.
pub fn despread(received: &ComplexSeq, code: &ComplexSeq) -> Result<Complex> {
    if received.len() != code.len() {
        return Err(Error::LengthMismatch {
            left: received.len(),
            right: code.len(),
        });
    }
    Ok(inner(received.samples(), code.samples()))
}

fn inner(r: &[Complex], c: &[Complex]) -> Complex {
    let mut acc = Complex::new(0.0, 0.0);
    for (a, b) in r.iter().zip(c) {
        acc += a * b.conj();
    }
    acc
}

/// `<r, T^shift(c)>` without materializing the shifted reference.
fn despread_shifted(r: &[Complex], c: &[Complex], shift: usize) -> Complex {
    let m = c.len();
    let s = shift % m;
    let mut acc = Complex::new(0.0, 0.0);
    // c shifted left by s: reference index n holds c[(n + s) mod m]
    for n in 0..m - s {
        acc += r[n] * c[n + s].conj();
    }
    for n in m - s..m {
        acc += r[n] * c[n + s - m].conj();
    }
    acc
}

/// Maximal-ratio RAKE: despread at every tap delay, weight by the conjugate
/// coefficient, and normalize by the collected energy so a clean single-path
/// block returns the data symbol exactly. Perfect channel knowledge.
pub fn mrc_rake(
    received: &ComplexSeq,
    code: &ComplexSeq,
    taps: &[(usize, Complex)],
) -> Result<Complex> {
    if received.len() != code.len() {
        return Err(Error::LengthMismatch {
            left: received.len(),
            right: code.len(),
        });
    }
    if taps.is_empty() {
        return Err(Error::InvalidParameter("RAKE needs at least one tap".into()));
    }
    let energy: f64 = code.energy();
    let mut acc = Complex::new(0.0, 0.0);
    let mut weight = 0.0f64;
    for &(delay, coeff) in taps {
        if delay >= received.len() {
            return Err(Error::InvalidParameter(format!(
                "tap delay {delay} out of range"
            )));
        }
        acc += coeff.conj() * despread_shifted(received.samples(), code.samples(), delay);
        weight += coeff.norm_sqr();
    }
    if weight == 0.0 || energy == 0.0 {
        return Err(Error::ZeroSequence);
    }
    Ok(acc / (weight * energy))
}

// RNG sub-stream purposes; keeping them separate makes the desired user's
// channel, data, and noise identical across runs that differ only in the
// interferer population.
const STREAM_CHANNEL: u64 = 0;
const STREAM_DATA: u64 = 1;
const STREAM_NOISE: u64 = 2;
const STREAM_INTERF: u64 = 3;

fn draw_rngs(seed: u64, draw: u64) -> (ChaCha12Rng, ChaCha12Rng, ChaCha12Rng, ChaCha12Rng) {
    (
        derive_rng(seed, draw * 4 + STREAM_CHANNEL),
        derive_rng(seed, draw * 4 + STREAM_DATA),
        derive_rng(seed, draw * 4 + STREAM_NOISE),
        derive_rng(seed, draw * 4 + STREAM_INTERF),
    )
}

fn qpsk_symbol(bits: (bool, bool)) -> Complex {
    let half = 0.5f64.sqrt();
    Complex::new(
        if bits.0 { -half } else { half },
        if bits.1 { -half } else { half },
    )
}

fn qpsk_decide(z: Complex) -> (bool, bool) {
    (z.re < 0.0, z.im < 0.0)
}

fn add_awgn<R: Rng>(buf: &mut [Complex], sigma: f64, rng: &mut R) {
    for v in buf.iter_mut() {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        *v += Complex::new(re * sigma, im * sigma);
    }
}

/// Composite per-draw state for the spread-spectrum systems: effective
/// spread waveforms with channel and offsets folded in.
struct DrawState {
    /// `sum_p h_p T^(p + offset)(c_j)` per user.
    effective: Vec<Vec<Complex>>,
    /// Desired user's taps for the RAKE.
    taps: Vec<(usize, Complex)>,
}

fn prepare_draw(
    cfg: &LinkConfig,
    tx_codes: &[ComplexSeq],
    rng_ch: &mut ChaCha12Rng,
    rng_int: &mut ChaCha12Rng,
) -> DrawState {
    let m = tx_codes[0].len();
    let max_offset = cfg.cp_len - cfg.channel.t_max();
    let mut effective = Vec::with_capacity(cfg.users);
    let mut taps = Vec::new();
    for j in 0..cfg.users {
        let (coeffs, offset) = if j == 0 {
            (draw_channel(&cfg.channel, rng_ch), 0usize)
        } else {
            let coeffs = draw_channel(&cfg.channel, rng_int);
            let offset = rng_int.random_range(0..=max_offset as u64) as usize;
            (coeffs, offset)
        };
        let mut wave = vec![Complex::new(0.0, 0.0); m];
        for (tap, &h) in cfg.channel.taps().iter().zip(&coeffs) {
            let shift = (tap.delay + offset) % m;
            let code = tx_codes[j].samples();
            // accumulate h * T^shift(code)
            for n in 0..m {
                let idx = if n + shift >= m {
                    n + shift - m
                } else {
                    n + shift
                };
                wave[n] += h * code[idx];
            }
        }
        if j == 0 {
            taps = cfg
                .channel
                .taps()
                .iter()
                .zip(&coeffs)
                .map(|(t, &h)| (t.delay, h))
                .collect();
        }
        effective.push(wave);
    }
    DrawState { effective, taps }
}

fn spread_spectrum_run<F>(
    cfg: &LinkConfig,
    tx_codes: &[ComplexSeq],
    rx_code: &ComplexSeq,
    mut per_symbol: F,
) -> Result<()>
where
    F: FnMut(Complex, (bool, bool)) + Send,
{
    // serial closure driver used by the statistic probes
    run_draws(cfg, tx_codes, rx_code, 0..n_draws(cfg), &mut per_symbol)
}

fn n_draws(cfg: &LinkConfig) -> u64 {
    let n_symbols = cfg.n_bits.div_ceil(2);
    n_symbols.div_ceil(cfg.symbols_per_draw.max(1) as u64)
}

fn run_draws<F>(
    cfg: &LinkConfig,
    tx_codes: &[ComplexSeq],
    rx_code: &ComplexSeq,
    draws: std::ops::Range<u64>,
    per_symbol: &mut F,
) -> Result<()>
where
    F: FnMut(Complex, (bool, bool)),
{
    let m = tx_codes[0].len();
    let n_symbols = cfg.n_bits.div_ceil(2);
    let spd = cfg.symbols_per_draw.max(1) as u64;
    let r0 = rx_code.energy();
    let desired_energy = tx_codes[0].energy();
    let n0 = if cfg.noiseless {
        0.0
    } else {
        // Eb = symbol energy / 2 at unit average channel gain
        desired_energy / 2.0 / 10f64.powf(cfg.ebn0_db / 10.0)
    };
    let sigma = (n0 / 2.0).sqrt();
    let nf_amp = 10f64.powf(cfg.nf_db / 20.0);

    let mut received = vec![Complex::new(0.0, 0.0); m];
    for draw in draws {
        let (mut rng_ch, mut rng_data, mut rng_noise, mut rng_int) =
            draw_rngs(cfg.rng_seed, draw);
        let state = prepare_draw(cfg, tx_codes, &mut rng_ch, &mut rng_int);
        let rake_weight: f64 = state.taps.iter().map(|(_, h)| h.norm_sqr()).sum();
        let symbols_here = (n_symbols - (draw * spd).min(n_symbols)).min(spd);
        for _ in 0..symbols_here {
            let bits = (rng_data.random::<bool>(), rng_data.random::<bool>());
            let d0 = qpsk_symbol(bits);
            for (n, v) in received.iter_mut().enumerate() {
                *v = d0 * state.effective[0][n];
            }
            for j in 1..cfg.users {
                let db = (rng_int.random::<bool>(), rng_int.random::<bool>());
                let dj = qpsk_symbol(db) * nf_amp;
                for (n, v) in received.iter_mut().enumerate() {
                    *v += dj * state.effective[j][n];
                }
            }
            if sigma > 0.0 {
                add_awgn(&mut received, sigma, &mut rng_noise);
            }
            // RAKE on the (possibly different) receive reference
            let mut acc = Complex::new(0.0, 0.0);
            for &(delay, h) in &state.taps {
                acc += h.conj() * despread_shifted(&received, rx_code.samples(), delay);
            }
            let z = acc / (rake_weight * r0);
            per_symbol(z, bits);
        }
    }
    Ok(())
}

/// Monte-Carlo BER of the spread-spectrum link: user 0 is decoded with an
/// MRC RAKE while `users - 1` interferers arrive through independent
/// channels with random quasi-synchronous offsets and `nf_db` extra energy.
pub fn run_ber(cfg: &LinkConfig, codes: &[ComplexSeq]) -> Result<BERResult> {
    run_ber_mismatched(cfg, codes, None)
}

/// Like [`run_ber`] but despreading with a different reference family
/// (spectrum-sensing mismatch between transmitter and receiver).
pub fn run_ber_mismatched(
    cfg: &LinkConfig,
    tx_codes: &[ComplexSeq],
    rx_code: Option<&ComplexSeq>,
) -> Result<BERResult> {
    if tx_codes.is_empty() {
        return Err(Error::EmptySequence);
    }
    let code_len = tx_codes[0].len();
    for c in tx_codes {
        if c.len() != code_len {
            return Err(Error::LengthMismatch {
                left: code_len,
                right: c.len(),
            });
        }
    }
    let rx_code = rx_code.unwrap_or(&tx_codes[0]);
    if rx_code.len() != code_len {
        return Err(Error::LengthMismatch {
            left: rx_code.len(),
            right: code_len,
        });
    }
    cfg.validate(code_len, tx_codes.len())?;

    let total_draws = n_draws(cfg);
    // chunk draws so rayon can spread them without touching determinism
    let chunk: u64 = 64;
    let n_chunks = total_draws.div_ceil(chunk);
    let (errors, bits) = (0..n_chunks)
        .into_par_iter()
        .map(|ci| -> Result<(u64, u64)> {
            let lo = ci * chunk;
            let hi = ((ci + 1) * chunk).min(total_draws);
            let mut errors = 0u64;
            let mut bits = 0u64;
            let mut count = |z: Complex, tx: (bool, bool)| {
                let rx = qpsk_decide(z);
                errors += (rx.0 != tx.0) as u64 + (rx.1 != tx.1) as u64;
                bits += 2;
            };
            run_draws(cfg, tx_codes, rx_code, lo..hi, &mut count)?;
            Ok((errors, bits))
        })
        .try_reduce(|| (0, 0), |a, b| Ok((a.0 + b.0, a.1 + b.1)))?;
    // the final symbol may carry a padding bit when n_bits is odd
    let bits = bits.min(cfg.n_bits);
    Ok(BERResult::from_counts(errors.min(bits), bits))
}

/// Normalized decision statistics of the first `n` symbols, for invariance
/// checks: values are exactly the statistics [`run_ber`] slices.
pub fn decision_statistics(
    cfg: &LinkConfig,
    tx_codes: &[ComplexSeq],
    n: usize,
) -> Result<Vec<Complex>> {
    let mut cfg = cfg.clone();
    cfg.n_bits = 2 * n as u64;
    cfg.validate(tx_codes[0].len(), tx_codes.len())?;
    let mut out = Vec::with_capacity(n);
    spread_spectrum_run(&cfg, tx_codes, &tx_codes[0], |z, _| out.push(z))?;
    out.truncate(n);
    Ok(out)
}

/// Mean received desired-signal energy per symbol and mean injected noise
/// energy per sample, for SNR calibration against the configured point.
pub fn calibration_probe(cfg: &LinkConfig, codes: &[ComplexSeq]) -> Result<(f64, f64)> {
    cfg.validate(codes[0].len(), codes.len())?;
    let desired_energy = codes[0].energy();
    let n0 = desired_energy / 2.0 / 10f64.powf(cfg.ebn0_db / 10.0);
    let sigma = (n0 / 2.0).sqrt();
    let draws = n_draws(cfg);
    let m = codes[0].len();
    let mut signal_acc = 0.0f64;
    let mut noise_acc = 0.0f64;
    let mut noise_samples = 0u64;
    for draw in 0..draws {
        let (mut rng_ch, _, mut rng_noise, mut rng_int) = draw_rngs(cfg.rng_seed, draw);
        let state = prepare_draw(cfg, codes, &mut rng_ch, &mut rng_int);
        // received desired energy for a unit symbol
        signal_acc += state.effective[0].iter().map(|v| v.norm_sqr()).sum::<f64>();
        let mut buf = vec![Complex::new(0.0, 0.0); m];
        add_awgn(&mut buf, sigma, &mut rng_noise);
        noise_acc += buf.iter().map(|v| v.norm_sqr()).sum::<f64>();
        noise_samples += m as u64;
    }
    Ok((
        signal_acc / draws as f64,
        noise_acc / noise_samples as f64,
    ))
}

/// MC-CDMA baseline: symbols are spread across all subcarriers by a
/// frequency-domain code, every user rides its own multipath channel, and
/// the receiver applies a one-tap MMSE equalizer matched to the desired
/// user before despreading. Multi-user interference is not cancelled.
pub fn mc_cdma_baseline(cfg: &LinkConfig, freq_codes: &[ComplexSeq]) -> Result<BERResult> {
    if freq_codes.is_empty() {
        return Err(Error::EmptySequence);
    }
    let m = freq_codes[0].len();
    for c in freq_codes {
        if c.len() != m {
            return Err(Error::LengthMismatch {
                left: m,
                right: c.len(),
            });
        }
    }
    cfg.validate(m, freq_codes.len())?;

    let ec = freq_codes[0].energy();
    let n0 = if cfg.noiseless {
        0.0
    } else {
        ec / 2.0 / 10f64.powf(cfg.ebn0_db / 10.0)
    };
    let sigma = (n0 / 2.0).sqrt();
    let nf_amp = 10f64.powf(cfg.nf_db / 20.0);
    // per-subcarrier signal-to-noise for the MMSE regularizer
    let mmse_reg = if n0 > 0.0 { n0 / (ec / m as f64) } else { 0.0 };
    let max_offset = (cfg.cp_len - cfg.channel.t_max()) as u64;

    let n_symbols = cfg.n_bits.div_ceil(2);
    let spd = cfg.symbols_per_draw.max(1) as u64;
    let total_draws = n_symbols.div_ceil(spd);
    let chunk: u64 = 64;
    let n_chunks = total_draws.div_ceil(chunk);

    let (errors, bits) = (0..n_chunks)
        .into_par_iter()
        .map(|ci| -> Result<(u64, u64)> {
            let lo = ci * chunk;
            let hi = ((ci + 1) * chunk).min(total_draws);
            let mut errors = 0u64;
            let mut bits = 0u64;
            let mut rx_spec = vec![Complex::new(0.0, 0.0); m];
            for draw in lo..hi {
                let (mut rng_ch, mut rng_data, mut rng_noise, mut rng_int) =
                    draw_rngs(cfg.rng_seed, draw);
                // per-user subcarrier gains with offsets as linear phase
                let mut gains: Vec<Vec<Complex>> = Vec::with_capacity(cfg.users);
                for j in 0..cfg.users {
                    let (coeffs, offset) = if j == 0 {
                        (draw_channel(&cfg.channel, &mut rng_ch), 0u64)
                    } else {
                        let c = draw_channel(&cfg.channel, &mut rng_int);
                        let o = rng_int.random_range(0..=max_offset);
                        (c, o)
                    };
                    let mut h = vec![Complex::new(0.0, 0.0); m];
                    for (k, hk) in h.iter_mut().enumerate() {
                        for (tap, &c) in cfg.channel.taps().iter().zip(&coeffs) {
                            let ang = -2.0 * std::f64::consts::PI * (k as f64)
                                * ((tap.delay as u64 + offset) as f64)
                                / m as f64;
                            *hk += c * Complex::from_polar(1.0, ang);
                        }
                    }
                    gains.push(h);
                }
                let symbols_here = (n_symbols - (draw * spd).min(n_symbols)).min(spd);
                for _ in 0..symbols_here {
                    let tx = (rng_data.random::<bool>(), rng_data.random::<bool>());
                    let d0 = qpsk_symbol(tx);
                    for (k, v) in rx_spec.iter_mut().enumerate() {
                        *v = d0 * freq_codes[0][k] * gains[0][k];
                    }
                    for j in 1..cfg.users {
                        let db = (rng_int.random::<bool>(), rng_int.random::<bool>());
                        let dj = qpsk_symbol(db) * nf_amp;
                        for (k, v) in rx_spec.iter_mut().enumerate() {
                            *v += dj * freq_codes[j][k] * gains[j][k];
                        }
                    }
                    if sigma > 0.0 {
                        add_awgn(&mut rx_spec, sigma, &mut rng_noise);
                    }
                    let mut z = Complex::new(0.0, 0.0);
                    for k in 0..m {
                        let h0 = gains[0][k];
                        let w = h0.conj() / (h0.norm_sqr() + mmse_reg);
                        z += w * rx_spec[k] * freq_codes[0][k].conj();
                    }
                    let rx = qpsk_decide(z);
                    errors += (rx.0 != tx.0) as u64 + (rx.1 != tx.1) as u64;
                    bits += 2;
                }
            }
            Ok((errors, bits))
        })
        .try_reduce(|| (0, 0), |a: (u64, u64), b| Ok((a.0 + b.0, a.1 + b.1)))?;
    let bits = bits.min(cfg.n_bits);
    Ok(BERResult::from_counts(errors.min(bits), bits))
}

/// Non-contiguous OFDM baseline under sensing mismatch: the transmitter
/// loads QPSK on the bins its mask says are free; the receiver only
/// demodulates bins its own mask says are free. Bits on bins the receiver
/// does not watch are lost outright, producing the error floor.
pub fn ncofdm_baseline(
    cfg: &LinkConfig,
    tx_mask: &SpectrumMask,
    rx_mask: &SpectrumMask,
) -> Result<BERResult> {
    if tx_mask.len() != rx_mask.len() {
        return Err(Error::LengthMismatch {
            left: tx_mask.len(),
            right: rx_mask.len(),
        });
    }
    let n = tx_mask.len();
    if tx_mask.is_fully_blocked() {
        return Err(Error::FullyBlockedMask);
    }
    if cfg.channel.t_max() >= n {
        return Err(Error::InvalidParameter(
            "channel delay spread reaches the symbol length".into(),
        ));
    }
    let data_bins: Vec<usize> = (0..n).filter(|&k| tx_mask.is_available(k)).collect();
    let bins_per_symbol = data_bins.len() as u64;

    // unit energy per data bin; Eb = 1/2
    let n0 = if cfg.noiseless {
        0.0
    } else {
        0.5 / 10f64.powf(cfg.ebn0_db / 10.0)
    };
    let sigma = (n0 / 2.0).sqrt();

    let n_symbols = cfg.n_bits.div_ceil(2 * bins_per_symbol);
    let chunk: u64 = 256;
    let n_chunks = n_symbols.div_ceil(chunk);
    let (errors, bits) = (0..n_chunks)
        .into_par_iter()
        .map(|ci| -> Result<(u64, u64)> {
            let lo = ci * chunk;
            let hi = ((ci + 1) * chunk).min(n_symbols);
            let mut errors = 0u64;
            let mut bits = 0u64;
            for draw in lo..hi {
                let (mut rng_ch, mut rng_data, mut rng_noise, _) =
                    draw_rngs(cfg.rng_seed, draw);
                let coeffs = draw_channel(&cfg.channel, &mut rng_ch);
                for &k in &data_bins {
                    let tx = (rng_data.random::<bool>(), rng_data.random::<bool>());
                    let d = qpsk_symbol(tx);
                    let mut h = Complex::new(0.0, 0.0);
                    for (tap, &c) in cfg.channel.taps().iter().zip(&coeffs) {
                        let ang = -2.0 * std::f64::consts::PI * (k as f64)
                            * (tap.delay as f64)
                            / n as f64;
                        h += c * Complex::from_polar(1.0, ang);
                    }
                    let z = if rx_mask.is_available(k) {
                        let re: f64 = StandardNormal.sample(&mut rng_noise);
                        let im: f64 = StandardNormal.sample(&mut rng_noise);
                        let y = h * d + Complex::new(re * sigma, im * sigma);
                        h.conj() * y
                    } else {
                        // bin not demodulated: the bit is lost
                        Complex::new(0.0, 0.0)
                    };
                    let rx = qpsk_decide(z);
                    errors += (rx.0 != tx.0) as u64 + (rx.1 != tx.1) as u64;
                    bits += 2;
                }
            }
            Ok((errors, bits))
        })
        .try_reduce(|| (0, 0), |a: (u64, u64), b| Ok((a.0 + b.0, a.1 + b.1)))?;
    let bits = bits.min(cfg.n_bits.max(1));
    Ok(BERResult::from_counts(errors.min(bits), bits))
}

/// Sensing agreement between two marking vectors:
/// `eta = (S_T . S_R) / (|S_T| |S_R|)`; 1 exactly for identical masks.
pub fn eta(tx_mask: &SpectrumMask, rx_mask: &SpectrumMask) -> Result<f64> {
    if tx_mask.len() != rx_mask.len() {
        return Err(Error::LengthMismatch {
            left: tx_mask.len(),
            right: rx_mask.len(),
        });
    }
    let nt = tx_mask.available_count();
    let nr = rx_mask.available_count();
    if nt == 0 || nr == 0 {
        return Err(Error::FullyBlockedMask);
    }
    let common = (0..tx_mask.len())
        .filter(|&k| tx_mask.is_available(k) && rx_mask.is_available(k))
        .count();
    Ok(common as f64 / ((nt * nr) as f64).sqrt())
}

/// Construct a receiver-side mask whose sensing agreement with `tx_mask` is
/// as close as possible to `target`: search over counts of available bins to
/// drop and holes to open, then apply that many flips at seeded-random
/// positions. Returns the mask and the agreement actually achieved.
pub fn mask_with_eta(
    tx_mask: &SpectrumMask,
    target: f64,
    seed: u64,
) -> Result<(SpectrumMask, f64)> {
    if !(0.0..=1.0).contains(&target) {
        return Err(Error::InvalidParameter(format!(
            "target agreement {target} outside [0, 1]"
        )));
    }
    let nt = tx_mask.available_count();
    let holes = tx_mask.hole_count();
    if nt == 0 {
        return Err(Error::FullyBlockedMask);
    }
    let mut best = (0usize, 0usize, f64::INFINITY);
    for drop in 0..nt {
        for open in 0..=holes {
            if nt - drop + open == 0 {
                continue;
            }
            let e = (nt - drop) as f64 / ((nt * (nt - drop + open)) as f64).sqrt();
            let err = (e - target).abs();
            let better = err < best.2 - 1e-12
                || (err < best.2 + 1e-12 && drop + open < best.0 + best.1);
            if better {
                best = (drop, open, err);
            }
        }
    }
    let (drop, open, _) = best;
    let mut rng = derive_rng(seed, 0);
    let mut marking = tx_mask.marking().to_vec();
    let mut avail_idx: Vec<usize> = (0..marking.len()).filter(|&k| marking[k]).collect();
    let mut hole_idx: Vec<usize> = (0..marking.len()).filter(|&k| !marking[k]).collect();
    for _ in 0..drop {
        let pick = rng.random_range(0..avail_idx.len() as u64) as usize;
        marking[avail_idx.swap_remove(pick)] = false;
    }
    for _ in 0..open {
        let pick = rng.random_range(0..hole_idx.len() as u64) as usize;
        marking[hole_idx.swap_remove(pick)] = true;
    }
    let rx = SpectrumMask::new(marking)?;
    let achieved = eta(tx_mask, &rx)?;
    Ok((rx, achieved))
}
