//! Joint PAPR / aperiodic-autocorrelation shaping of a single masked
//! waveform.
//!
//! Two stages. First the waveform's power spectrum is chosen by minimizing
//! the worst out-of-phase periodic autocorrelation — for a power spectrum
//! `beta` the PACF at shift t is the DFT of `beta` at bin t, so the stage-1
//! problem is a mini-max over DFT bins subject to hole zeros, nonnegativity,
//! and total power N. A projected subgradient handles it self-contained.
//!
//! Second, with magnitudes frozen at `sqrt(beta)`, alternating phase updates
//! descend the penalized objective
//!
//! `J = lambda * |F_2N [b; 0] - P|^2 + (1 - lambda) * |b - p|^2`
//!
//! over the free phases of B, the half-magnitude auxiliary P (|P_k| = 1/√2)
//! and the unimodular auxiliary p. Each half-step is an exact block
//! minimization, so J never increases across a cycle. Spectral zeros on the
//! holes are structural: beta is zero there, so every iterate satisfies the
//! mask exactly.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::derive_rng;
use crate::error::{Error, Result};
use crate::seeds::FreqWaveform;
use crate::seqcore::{
    fft_forward, fft_inverse, max_sidelobe, papr_db, Complex, ComplexSeq, CorrelationKind,
    SpectrumMask,
};

/// Stage-1 spectrum selection method.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BetaMethod {
    /// Projected-subgradient mini-max over PACF bins.
    Minimax,
    /// Uniform power on every available subcarrier.
    Flat,
}

/// Knobs for [`optimize_waveform`].
#[derive(Debug, Clone)]
pub struct OptimizerConfig {
    /// Penalty factor in [0, 1]: larger favors low autocorrelation, smaller
    /// favors low PAPR.
    pub lambda: f64,
    /// Termination threshold on the Frobenius norm of successive spectra.
    pub epsilon: f64,
    /// Phase-update iteration cap per restart.
    pub max_iter: usize,
    /// Base seed; restart `i` derives its stream from `(rng_seed, i)`.
    pub rng_seed: u64,
    pub beta_method: BetaMethod,
    /// Independent random restarts; the best is selected by the
    /// lambda-weighted rule described at [`optimize_waveform`].
    pub restarts: usize,
}

impl OptimizerConfig {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidParameter(format!(
                "lambda {lambda} outside [0, 1]"
            )));
        }
        Ok(Self {
            lambda,
            epsilon: 1e-5,
            max_iter: 10_000,
            rng_seed: 0,
            beta_method: BetaMethod::Minimax,
            restarts: 1,
        })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts.max(1);
        self
    }

    pub fn with_beta_method(mut self, method: BetaMethod) -> Self {
        self.beta_method = method;
        self
    }
}

/// Nonnegative per-bin power `beta_k = |B_k|^2`, zero on every hole, summing
/// to N, bound to the mask it satisfies.
#[derive(Debug, Clone)]
pub struct PowerSpectrum {
    beta: Vec<f64>,
    mask: SpectrumMask,
}

impl PowerSpectrum {
    pub fn values(&self) -> &[f64] {
        &self.beta
    }

    pub fn mask(&self) -> &SpectrumMask {
        &self.mask
    }

    pub fn len(&self) -> usize {
        self.beta.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Worst out-of-phase |PACF| a waveform with this power spectrum will
    /// have: `max_{1<=t<N} |DFT(beta)_t|`.
    pub fn minimax_objective(&self) -> f64 {
        pacf_from_beta(&self.beta)
            .iter()
            .skip(1)
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }
}

/// |DFT(beta)| evaluated at every bin; bin t is the PACF of any waveform
/// with power spectrum `beta` at shift t.
fn pacf_from_beta(beta: &[f64]) -> Vec<Complex> {
    let mut buf: Vec<Complex> = beta.iter().map(|&v| Complex::new(v, 0.0)).collect();
    fft_forward(&mut buf);
    buf
}

const SUBGRADIENT_BUDGET: usize = 5000;

/// Choose the power spectrum for a mask.
///
/// `Minimax` runs a projected subgradient (projection: clip negatives, zero
/// the holes, rescale to total power N) from the flat spectrum for a fixed
/// budget with best-so-far retention; the step size decays as `c/sqrt(t)`.
/// `Flat` spreads the power uniformly over the available bins. The `rng`
/// only perturbs the subgradient start slightly, keeping the flat point as
/// a retained fallback.
pub fn solve_beta<R: Rng>(
    mask: &SpectrumMask,
    method: BetaMethod,
    rng: &mut R,
) -> Result<PowerSpectrum> {
    let n = mask.len();
    let available = mask.available_count();
    if available == 0 {
        return Err(Error::FullyBlockedMask);
    }
    let flat: Vec<f64> = (0..n)
        .map(|k| {
            if mask.is_available(k) {
                n as f64 / available as f64
            } else {
                0.0
            }
        })
        .collect();
    if method == BetaMethod::Flat {
        return Ok(PowerSpectrum {
            beta: flat,
            mask: mask.clone(),
        });
    }

    let project = |beta: &mut [f64]| {
        let mut sum = 0.0;
        for (k, v) in beta.iter_mut().enumerate() {
            if mask.is_hole(k) || *v < 0.0 {
                *v = 0.0;
            }
            sum += *v;
        }
        if sum <= 0.0 {
            beta.copy_from_slice(&flat);
        } else {
            let scale = n as f64 / sum;
            for v in beta.iter_mut() {
                *v *= scale;
            }
        }
    };

    let objective = |beta: &[f64]| -> (usize, f64) {
        let spec = pacf_from_beta(beta);
        let mut worst_bin = 1;
        let mut worst = 0.0;
        for (t, v) in spec.iter().enumerate().skip(1) {
            let m = v.norm();
            if m > worst {
                worst = m;
                worst_bin = t;
            }
        }
        (worst_bin, worst)
    };

    let mut beta = flat.clone();
    for v in beta.iter_mut() {
        *v *= 1.0 + 0.01 * (rng.random::<f64>() - 0.5);
    }
    project(&mut beta);

    let mut best = flat.clone();
    let mut best_obj = objective(&best).1;
    let step_base = (n as f64 / 32.0).max(0.5);
    for t in 1..=SUBGRADIENT_BUDGET {
        let spec = pacf_from_beta(&beta);
        let (worst_bin, worst) = {
            let mut wb = 1;
            let mut w = 0.0;
            for (i, v) in spec.iter().enumerate().skip(1) {
                let m = v.norm();
                if m > w {
                    w = m;
                    wb = i;
                }
            }
            (wb, w)
        };
        if worst < best_obj {
            best_obj = worst;
            best.copy_from_slice(&beta);
        }
        if worst == 0.0 {
            break;
        }
        // subgradient of |g_t(beta)| in beta_k: Re(conj(g_t)/|g_t| * w^(-kt))
        let g = spec[worst_bin] / worst;
        let step = step_base / (t as f64).sqrt();
        let ang = -2.0 * std::f64::consts::PI * worst_bin as f64 / n as f64;
        for (k, v) in beta.iter_mut().enumerate() {
            let sub = (g.conj() * Complex::from_polar(1.0, ang * k as f64)).re;
            *v -= step * sub;
        }
        project(&mut beta);
    }

    Ok(PowerSpectrum {
        beta: best,
        mask: mask.clone(),
    })
}

/// Auxiliary-phase step: with B fixed, the J-minimizing auxiliaries take the
/// phases of `F_2N [b; 0]` and of `b` respectively. Returns `(psi_P, psi_p)`.
pub fn gs_step_aux(wave: &FreqWaveform) -> (Vec<f64>, Vec<f64>) {
    let b = wave.time_domain();
    let n = b.len();
    let mut padded = vec![Complex::new(0.0, 0.0); 2 * n];
    padded[..n].copy_from_slice(b.samples());
    fft_forward(&mut padded);
    let psi_big = padded.iter().map(|v| v.arg()).collect();
    let psi_small = b.iter().map(|v| v.arg()).collect();
    (psi_big, psi_small)
}

/// Spectrum-phase step: with the auxiliaries fixed, the J-minimizing phases
/// of B are `arg(lambda * F_N(p_hat) + (1 - lambda) * F_N(p))`, where
/// `p_hat` is the first N entries of the 2N-point inverse transform of P.
/// The magnitudes come from `beta`, so holes stay exactly zero.
pub fn gs_step_b(
    aux_big: &[Complex],
    aux_small: &[Complex],
    beta: &PowerSpectrum,
    lambda: f64,
) -> Result<FreqWaveform> {
    let n = beta.len();
    if aux_big.len() != 2 * n {
        return Err(Error::LengthMismatch {
            left: aux_big.len(),
            right: 2 * n,
        });
    }
    if aux_small.len() != n {
        return Err(Error::LengthMismatch {
            left: aux_small.len(),
            right: n,
        });
    }

    // p_hat: first N entries of the unitary 2N-point inverse transform of P
    let mut inv = aux_big.to_vec();
    fft_inverse(&mut inv);
    let scale = 1.0 / ((2 * n) as f64).sqrt();
    let mut p_hat: Vec<Complex> = inv[..n].iter().map(|v| v * scale).collect();
    fft_forward(&mut p_hat);
    let fscale = 1.0 / (n as f64).sqrt();

    let mut fp: Vec<Complex> = aux_small.to_vec();
    fft_forward(&mut fp);

    let bins: Vec<Complex> = (0..n)
        .map(|k| {
            let q = lambda * p_hat[k] * fscale + (1.0 - lambda) * fp[k] * fscale;
            Complex::from_polar(beta.values()[k].sqrt(), q.arg())
        })
        .collect();
    FreqWaveform::from_spectrum(ComplexSeq::new(bins)?, beta.mask().clone())
}

/// One optimized waveform plus the metrics and trace of the run it came from.
#[derive(Debug, Clone)]
pub struct OptResult {
    pub waveform: FreqWaveform,
    pub papr_db: f64,
    pub max_aacf: f64,
    pub iterations: usize,
    /// Penalized objective J after each full phase-update cycle.
    pub objective_trace: Vec<f64>,
    pub converged: bool,
}

fn aux_vectors(psi_big: &[f64], psi_small: &[f64]) -> (Vec<Complex>, Vec<Complex>) {
    let half = 0.5f64.sqrt();
    let big = psi_big
        .iter()
        .map(|&a| Complex::from_polar(half, a))
        .collect();
    let small = psi_small
        .iter()
        .map(|&a| Complex::from_polar(1.0, a))
        .collect();
    (big, small)
}

fn objective_j(b: &ComplexSeq, aux_big: &[Complex], aux_small: &[Complex], lambda: f64) -> f64 {
    let n = b.len();
    let mut padded = vec![Complex64::new(0.0, 0.0); 2 * n];
    padded[..n].copy_from_slice(b.samples());
    fft_forward(&mut padded);
    let scale = 1.0 / ((2 * n) as f64).sqrt();
    let j1: f64 = padded
        .iter()
        .zip(aux_big)
        .map(|(x, p)| (x * scale - p).norm_sqr())
        .sum();
    let j2: f64 = b
        .iter()
        .zip(aux_small)
        .map(|(x, p)| (x - p).norm_sqr())
        .sum();
    lambda * j1 + (1.0 - lambda) * j2
}

fn single_run(
    beta: &PowerSpectrum,
    cfg: &OptimizerConfig,
    rng: &mut ChaCha12Rng,
) -> Result<OptResult> {
    let n = beta.len();
    let bins: Vec<Complex> = (0..n)
        .map(|k| {
            let phase = rng.random::<f64>() * 2.0 * std::f64::consts::PI;
            Complex::from_polar(beta.values()[k].sqrt(), phase)
        })
        .collect();
    let mut wave = FreqWaveform::from_spectrum(ComplexSeq::new(bins)?, beta.mask().clone())?;

    let mut trace = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    for _ in 0..cfg.max_iter {
        iterations += 1;
        let (psi_big, psi_small) = gs_step_aux(&wave);
        let (aux_big, aux_small) = aux_vectors(&psi_big, &psi_small);
        let next = gs_step_b(&aux_big, &aux_small, beta, cfg.lambda)?;

        let delta: f64 = next
            .spectrum()
            .iter()
            .zip(wave.spectrum().iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        trace.push(objective_j(
            next.time_domain(),
            &aux_big,
            &aux_small,
            cfg.lambda,
        ));
        wave = next;
        if delta < cfg.epsilon {
            converged = true;
            break;
        }
    }

    let papr = papr_db(wave.time_domain())?;
    let aacf = max_sidelobe(wave.time_domain(), CorrelationKind::Aperiodic)?;
    Ok(OptResult {
        waveform: wave,
        papr_db: papr,
        max_aacf: aacf,
        iterations,
        objective_trace: trace,
        converged,
    })
}

/// Restart selection: the priority metric (autocorrelation when
/// `lambda >= 0.5`, PAPR otherwise) is held within a tolerance band of the
/// pool's best — the band widens as the weighting gets more even — and the
/// other metric is minimized inside the band.
fn select_best(results: Vec<OptResult>, lambda: f64) -> OptResult {
    let band = 1.0 + lambda.min(1.0 - lambda);
    let papr_dev = |r: &OptResult| 10f64.powf(r.papr_db / 10.0) - 1.0;
    let (primary, secondary): (Box<dyn Fn(&OptResult) -> f64>, Box<dyn Fn(&OptResult) -> f64>) =
        if lambda >= 0.5 {
            (Box::new(|r: &OptResult| r.max_aacf), Box::new(papr_dev))
        } else {
            (Box::new(papr_dev), Box::new(|r: &OptResult| r.max_aacf))
        };
    let best_primary = results
        .iter()
        .map(|r| primary(r))
        .fold(f64::INFINITY, f64::min);
    let mut chosen: Option<OptResult> = None;
    let mut chosen_secondary = f64::INFINITY;
    for r in results {
        if primary(&r) <= band * best_primary && secondary(&r) < chosen_secondary {
            chosen_secondary = secondary(&r);
            chosen = Some(r);
        }
    }
    chosen.expect("restart pool is non-empty")
}

/// Full pipeline: stage-1 spectrum selection, then `restarts` independent
/// phase-update runs from random phases over [0, 2pi), each terminating when
/// the spectrum change drops below `epsilon` or `max_iter` is hit
/// (`converged` reports which). Restart `i` draws from an RNG stream derived
/// from `(rng_seed, i)`, so results are reproducible and independent of how
/// the restarts are scheduled across threads.
pub fn optimize_waveform(mask: &SpectrumMask, cfg: &OptimizerConfig) -> Result<OptResult> {
    if !(0.0..=1.0).contains(&cfg.lambda) {
        return Err(Error::InvalidParameter(format!(
            "lambda {} outside [0, 1]",
            cfg.lambda
        )));
    }
    if cfg.epsilon <= 0.0 {
        return Err(Error::InvalidParameter("epsilon must be positive".into()));
    }
    let mut beta_rng = derive_rng(cfg.rng_seed, u64::MAX);
    let beta = solve_beta(mask, cfg.beta_method, &mut beta_rng)?;

    let restarts = cfg.restarts.max(1);
    let results: Vec<OptResult> = (0..restarts)
        .into_par_iter()
        .map(|i| {
            let mut rng = derive_rng(cfg.rng_seed, i as u64);
            single_run(&beta, cfg, &mut rng)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(select_best(results, cfg.lambda))
}

/// One sweep row per penalty factor.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub lambda: f64,
    pub papr_db: f64,
    pub max_aacf: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Run [`optimize_waveform`] across a grid of penalty factors. Grid points
/// run concurrently; each derives its RNG from `(rng_seed, point index)`, so
/// the sweep is reproducible regardless of thread count.
pub fn pareto_sweep(
    mask: &SpectrumMask,
    lambdas: &[f64],
    cfg: &OptimizerConfig,
) -> Result<Vec<(SweepRow, OptResult)>> {
    if lambdas.is_empty() {
        return Err(Error::InvalidParameter("empty lambda grid".into()));
    }
    lambdas
        .par_iter()
        .enumerate()
        .map(|(i, &lambda)| {
            let mut point_cfg = cfg.clone();
            point_cfg.lambda = lambda;
            // offset keeps grid-point streams disjoint from restart streams
            point_cfg.rng_seed = cfg.rng_seed.wrapping_add((i as u64).wrapping_mul(0x9e37));
            let res = optimize_waveform(mask, &point_cfg)?;
            Ok((
                SweepRow {
                    lambda,
                    papr_db: res.papr_db,
                    max_aacf: res.max_aacf,
                    iterations: res.iterations,
                    converged: res.converged,
                },
                res,
            ))
        })
        .collect()
}
