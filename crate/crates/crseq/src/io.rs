//! Serialization for everything the command-line tools exchange: sequences
//! and masks as JSON/CSV, seed sets, synthesized families with provenance,
//! optimizer results, magnitude/phase imports, and simulation scenarios.
//!
//! All parsers take untrusted text and return errors instead of panicking;
//! semantic violations surface as [`Error::Schema`].

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::construct::{synthesize, QuasiZCZSet};
use crate::error::{Error, Result};
use crate::optimize::{OptResult, OptimizerConfig, SweepRow};
use crate::seeds::{masked_waveform, zadoff_chu, FreqWaveform, ZCZSeedSet};
use crate::seqcore::{Complex, ComplexSeq, SpectrumMask};
use crate::simulate::{BERResult, ChannelProfile, ChannelTap, LinkConfig};

// ---------------------------------------------------------------------------
// sequences and masks

#[derive(Serialize, Deserialize)]
struct SeqDto {
    n: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl Serialize for ComplexSeq {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SeqDto {
            n: self.len(),
            re: self.iter().map(|v| v.re).collect(),
            im: self.iter().map(|v| v.im).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexSeq {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let dto = SeqDto::deserialize(d)?;
        if dto.re.len() != dto.n || dto.im.len() != dto.n {
            return Err(serde::de::Error::custom(format!(
                "sequence declares n={} but carries {} re / {} im entries",
                dto.n,
                dto.re.len(),
                dto.im.len()
            )));
        }
        ComplexSeq::new(
            dto.re
                .iter()
                .zip(&dto.im)
                .map(|(&re, &im)| Complex::new(re, im))
                .collect(),
        )
        .map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct MaskDto {
    #[serde(rename = "S")]
    s: Vec<u8>,
}

impl Serialize for SpectrumMask {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MaskDto {
            s: self.marking().iter().map(|&m| m as u8).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SpectrumMask {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let dto = MaskDto::deserialize(d)?;
        SpectrumMask::from_bits(&dto.s).map_err(serde::de::Error::custom)
    }
}

pub fn seq_to_json(seq: &ComplexSeq) -> String {
    serde_json::to_string_pretty(seq).expect("sequence serialization cannot fail")
}

pub fn seq_from_json(text: &str) -> Result<ComplexSeq> {
    Ok(serde_json::from_str(text)?)
}

pub fn mask_to_json(mask: &SpectrumMask) -> String {
    serde_json::to_string_pretty(mask).expect("mask serialization cannot fail")
}

pub fn mask_from_json(text: &str) -> Result<SpectrumMask> {
    Ok(serde_json::from_str(text)?)
}

/// `index,re,im` rows with a header line.
pub fn seq_to_csv(seq: &ComplexSeq) -> String {
    let mut out = String::from("index,re,im\n");
    for (i, v) in seq.iter().enumerate() {
        out.push_str(&format!("{i},{},{}\n", v.re, v.im));
    }
    out
}

pub fn seq_from_csv(text: &str) -> Result<ComplexSeq> {
    let mut samples = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (lineno == 0 && line.starts_with("index")) {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(Error::Schema(format!(
                "line {}: expected index,re,im",
                lineno + 1
            )));
        }
        let re: f64 = fields[1]
            .trim()
            .parse()
            .map_err(|_| Error::Schema(format!("line {}: bad re value", lineno + 1)))?;
        let im: f64 = fields[2]
            .trim()
            .parse()
            .map_err(|_| Error::Schema(format!("line {}: bad im value", lineno + 1)))?;
        samples.push(Complex::new(re, im));
    }
    ComplexSeq::new(samples)
}

/// Magnitude/phase import: two matrices (nested rows or flat vectors) read
/// row by row into column vectors of equal length.
#[derive(Deserialize)]
struct MagPhaseDto {
    mag: RowsOrFlat,
    phase: RowsOrFlat,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RowsOrFlat {
    Flat(Vec<f64>),
    Rows(Vec<Vec<f64>>),
}

impl RowsOrFlat {
    fn flatten(self) -> Vec<f64> {
        match self {
            RowsOrFlat::Flat(v) => v,
            RowsOrFlat::Rows(rows) => rows.into_iter().flatten().collect(),
        }
    }
}

pub fn seq_from_mag_phase_json(text: &str) -> Result<ComplexSeq> {
    let dto: MagPhaseDto = serde_json::from_str(text)?;
    let mag = dto.mag.flatten();
    let phase = dto.phase.flatten();
    if mag.len() != phase.len() {
        return Err(Error::Schema(format!(
            "magnitude has {} entries, phase has {}",
            mag.len(),
            phase.len()
        )));
    }
    ComplexSeq::from_polar(&mag, &phase)
}

// ---------------------------------------------------------------------------
// seed sets

#[derive(Serialize, Deserialize)]
struct SeedSetDto {
    #[serde(rename = "K")]
    k: usize,
    #[serde(rename = "L")]
    l: usize,
    #[serde(rename = "Z")]
    z: usize,
    #[serde(default)]
    name: Option<String>,
    sequences: Vec<ComplexSeq>,
}

pub fn seed_set_to_json(set: &ZCZSeedSet, name: Option<&str>) -> String {
    serde_json::to_string_pretty(&SeedSetDto {
        k: set.set_size(),
        l: set.seq_len(),
        z: set.zone(),
        name: name.map(str::to_string),
        sequences: set.sequences().to_vec(),
    })
    .expect("seed set serialization cannot fail")
}

/// Load a seed set; the result is unverified until [`ZCZSeedSet::verify`]
/// passes. Returns the optional embedded name alongside.
pub fn seed_set_from_json(text: &str) -> Result<(ZCZSeedSet, Option<String>)> {
    let dto: SeedSetDto = serde_json::from_str(text)?;
    if dto.sequences.len() != dto.k {
        return Err(Error::Schema(format!(
            "seed set declares K={} but carries {} sequences",
            dto.k,
            dto.sequences.len()
        )));
    }
    for s in &dto.sequences {
        if s.len() != dto.l {
            return Err(Error::Schema(format!(
                "seed set declares L={} but a sequence has length {}",
                dto.l,
                s.len()
            )));
        }
    }
    Ok((ZCZSeedSet::new(dto.sequences, dto.z)?, dto.name))
}

/// Stable content hash of a seed set (FNV-1a over the sample bit patterns).
pub fn seed_hash(set: &ZCZSeedSet) -> String {
    let mut h: u64 = 0xcbf29ce484222325;
    let mut eat = |x: u64| {
        for b in x.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
    };
    eat(set.set_size() as u64);
    eat(set.zone() as u64);
    for s in set.sequences() {
        for v in s.iter() {
            eat(v.re.to_bits());
            eat(v.im.to_bits());
        }
    }
    format!("{h:016x}")
}

// ---------------------------------------------------------------------------
// waveforms and synthesized families

/// How a frequency-domain waveform was produced.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum WaveformParams {
    ZadoffChu { u: u64 },
    Optimized { lambda: f64, rng_seed: u64 },
    Imported,
}

#[derive(Serialize, Deserialize)]
struct WaveformDto {
    params: WaveformParams,
    mask: SpectrumMask,
    spectrum: ComplexSeq,
}

pub fn waveform_to_json(wave: &FreqWaveform, params: &WaveformParams) -> String {
    serde_json::to_string_pretty(&WaveformDto {
        params: params.clone(),
        mask: wave.mask().clone(),
        spectrum: wave.spectrum().clone(),
    })
    .expect("waveform serialization cannot fail")
}

pub fn waveform_from_json(text: &str) -> Result<(FreqWaveform, WaveformParams)> {
    let dto: WaveformDto = serde_json::from_str(text)?;
    let wave = FreqWaveform::from_spectrum(dto.spectrum, dto.mask)
        .map_err(|e| Error::Schema(format!("waveform violates its mask: {e}")))?;
    Ok((wave, dto.params))
}

#[derive(Serialize, Deserialize)]
struct QuasiSetDto {
    #[serde(rename = "K")]
    k: usize,
    length: usize,
    zccz_width: usize,
    mask: SpectrumMask,
    seed_name: Option<String>,
    seed_hash: String,
    seed: SeedSetDto,
    waveform_params: Vec<WaveformParams>,
    waveforms: Vec<ComplexSeq>,
}

pub fn quasi_set_to_json(
    set: &QuasiZCZSet,
    seed_name: Option<&str>,
    params: &[WaveformParams],
) -> String {
    let seed = set.seed();
    serde_json::to_string_pretty(&QuasiSetDto {
        k: set.set_size(),
        length: set.seq_len(),
        zccz_width: set.zccz_width(),
        mask: set.mask().clone(),
        seed_name: seed_name.map(str::to_string),
        seed_hash: seed_hash(seed),
        seed: SeedSetDto {
            k: seed.set_size(),
            l: seed.seq_len(),
            z: seed.zone(),
            name: seed_name.map(str::to_string),
            sequences: seed.sequences().to_vec(),
        },
        waveform_params: params.to_vec(),
        waveforms: set.waveforms().iter().map(|w| w.spectrum().clone()).collect(),
    })
    .expect("set serialization cannot fail")
}

/// Load and re-synthesize a family; the seed is re-verified and the composite
/// parameters are checked against the declared ones.
pub fn quasi_set_from_json(text: &str) -> Result<(QuasiZCZSet, Vec<WaveformParams>)> {
    let dto: QuasiSetDto = serde_json::from_str(text)?;
    if dto.seed.sequences.len() != dto.seed.k {
        return Err(Error::Schema("seed K does not match its sequences".into()));
    }
    let seed = ZCZSeedSet::new_verified(dto.seed.sequences, dto.seed.z)
        .map_err(|e| Error::Schema(format!("embedded seed failed verification: {e}")))?;
    if seed_hash(&seed) != dto.seed_hash {
        return Err(Error::Schema("seed hash does not match content".into()));
    }
    let waveforms = dto
        .waveforms
        .into_iter()
        .map(|spec| FreqWaveform::from_spectrum(spec, dto.mask.clone()))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| Error::Schema(format!("waveform violates the mask: {e}")))?;
    let set = synthesize(&seed, &waveforms)?;
    if set.set_size() != dto.k || set.seq_len() != dto.length || set.zccz_width() != dto.zccz_width
    {
        return Err(Error::Schema(
            "declared family parameters do not match the synthesis".into(),
        ));
    }
    if dto.waveform_params.len() != set.waveforms().len() {
        return Err(Error::Schema("waveform parameter list length mismatch".into()));
    }
    Ok((set, dto.waveform_params))
}

/// Lattice CSV: L rows by N columns, entries formatted `re+imj`.
pub fn lattice_to_csv(lattice: &[Vec<Complex>]) -> String {
    let mut out = String::new();
    for row in lattice {
        let cells: Vec<String> = row.iter().map(|v| format_complex(*v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn format_complex(v: Complex) -> String {
    if v.im < 0.0 {
        format!("{}{}j", v.re, v.im)
    } else {
        format!("{}+{}j", v.re, v.im)
    }
}

// ---------------------------------------------------------------------------
// optimizer results

#[derive(Serialize, Deserialize)]
struct OptResultDto {
    lambda: f64,
    epsilon: f64,
    max_iter: usize,
    rng_seed: u64,
    restarts: usize,
    papr_db: f64,
    max_aacf: f64,
    iterations: usize,
    converged: bool,
    mask: SpectrumMask,
    spectrum: ComplexSeq,
}

pub fn opt_result_to_json(res: &OptResult, cfg: &OptimizerConfig) -> String {
    serde_json::to_string_pretty(&OptResultDto {
        lambda: cfg.lambda,
        epsilon: cfg.epsilon,
        max_iter: cfg.max_iter,
        rng_seed: cfg.rng_seed,
        restarts: cfg.restarts,
        papr_db: res.papr_db,
        max_aacf: res.max_aacf,
        iterations: res.iterations,
        converged: res.converged,
        mask: res.waveform.mask().clone(),
        spectrum: res.waveform.spectrum().clone(),
    })
    .expect("optimizer result serialization cannot fail")
}

/// Sweep CSV: `lambda,papr_db,max_aacf,iterations,converged`.
pub fn sweep_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("lambda,papr_db,max_aacf,iterations,converged\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.lambda, r.papr_db, r.max_aacf, r.iterations, r.converged
        ));
    }
    out
}

// ---------------------------------------------------------------------------
// simulation scenarios

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemKind {
    CrCdma,
    McCdma,
    NcOfdm,
}

/// Channel selection: a built-in name, inline taps, or a JSON file holding
/// `{"name": ..., "taps": [{"delay":..,"power":..}, ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChannelSpec {
    Named { name: String },
    Inline { taps: Vec<TapDto> },
    File { file: String },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TapDto {
    pub delay: usize,
    pub power: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ProfileFileDto {
    name: String,
    taps: Vec<TapDto>,
}

/// Seed selection for the spread systems.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SeedSpec {
    Builtin(String),
    FreqShift {
        freq_shift: FreqShiftDto,
    },
    File {
        file: String,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FreqShiftDto {
    pub n: usize,
    pub k: usize,
    pub u: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpreadingSpec {
    pub seed_set: SeedSpec,
    /// Zadoff-Chu roots for the per-user waveforms; cycled if fewer than K.
    #[serde(default)]
    pub zc_roots: Vec<u64>,
    /// Waveform JSON broadcast to every user instead of `zc_roots`.
    #[serde(default)]
    pub waveform_file: Option<String>,
}

/// Receiver-side mask for sensing-mismatch runs: either spelled out or
/// derived from the transmit mask by targeting an agreement value.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RxMaskSpec {
    Explicit { mask: SpectrumMask },
    Target { eta_target: f64, flip_seed: u64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum McCodeKind {
    ZadoffChu,
    RandomPolyphase,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub scenario_id: String,
    pub system: SystemKind,
    pub users: usize,
    pub ebn0_db: f64,
    #[serde(default)]
    pub nf_db: f64,
    pub cp_len: usize,
    pub n_bits: u64,
    #[serde(default)]
    pub rng_seed: u64,
    #[serde(default = "default_spd")]
    pub symbols_per_draw: usize,
    #[serde(default)]
    pub noiseless: bool,
    pub channel: ChannelSpec,
    pub mask: SpectrumMask,
    #[serde(default)]
    pub spreading: Option<SpreadingSpec>,
    #[serde(default)]
    pub mc_codes: Option<McCodeKind>,
    #[serde(default = "default_expand")]
    pub mc_expand: usize,
    #[serde(default)]
    pub rx_mask: Option<RxMaskSpec>,
}

fn default_spd() -> usize {
    1
}

fn default_expand() -> usize {
    16
}

pub fn scenario_from_json(text: &str) -> Result<ScenarioSpec> {
    Ok(serde_json::from_str(text)?)
}

pub fn scenario_to_json(spec: &ScenarioSpec) -> String {
    serde_json::to_string_pretty(spec).expect("scenario serialization cannot fail")
}

/// A fully-assembled scenario ready to run.
pub struct Scenario {
    pub id: String,
    pub cfg: LinkConfig,
    pub eta: f64,
    pub kind: ScenarioKind,
}

pub enum ScenarioKind {
    CrCdma {
        tx_codes: Vec<ComplexSeq>,
        rx_code: Option<ComplexSeq>,
    },
    McCdma {
        freq_codes: Vec<ComplexSeq>,
    },
    NcOfdm {
        tx_mask: SpectrumMask,
        rx_mask: SpectrumMask,
    },
}

fn resolve_channel(spec: &ChannelSpec, base: &Path) -> Result<ChannelProfile> {
    match spec {
        ChannelSpec::Named { name } => ChannelProfile::named(name),
        ChannelSpec::Inline { taps } => ChannelProfile::new(
            "inline",
            taps.iter()
                .map(|t| ChannelTap {
                    delay: t.delay,
                    power: t.power,
                })
                .collect(),
        ),
        ChannelSpec::File { file } => {
            let text = std::fs::read_to_string(base.join(file))?;
            let dto: ProfileFileDto = serde_json::from_str(&text)?;
            ChannelProfile::new(
                dto.name,
                dto.taps
                    .iter()
                    .map(|t| ChannelTap {
                        delay: t.delay,
                        power: t.power,
                    })
                    .collect(),
            )
        }
    }
}

fn resolve_seed(spec: &SeedSpec, base: &Path) -> Result<ZCZSeedSet> {
    match spec {
        SeedSpec::Builtin(name) => crate::seeds::builtin_zcz(name),
        SeedSpec::FreqShift { freq_shift } => {
            crate::seeds::freq_shift_zcz(freq_shift.n, freq_shift.k, freq_shift.u)
        }
        SeedSpec::File { file } => {
            let text = std::fs::read_to_string(base.join(file))?;
            let (mut set, _) = seed_set_from_json(&text)?;
            let report = set.verify()?;
            if !report.passes {
                return Err(Error::VerificationFailed(
                    "seed file does not satisfy its declared zone".into(),
                ));
            }
            Ok(set)
        }
    }
}

/// Build the spreading family for a mask from a spreading spec.
pub fn build_cr_codes(
    spreading: &SpreadingSpec,
    mask: &SpectrumMask,
    base: &Path,
) -> Result<QuasiZCZSet> {
    let seed = resolve_seed(&spreading.seed_set, base)?;
    let waveforms: Vec<FreqWaveform> = if let Some(file) = &spreading.waveform_file {
        let text = std::fs::read_to_string(base.join(file))?;
        let (wave, _) = waveform_from_json(&text)?;
        if wave.mask() != mask {
            return Err(Error::Schema(
                "waveform file mask differs from the scenario mask".into(),
            ));
        }
        vec![wave]
    } else {
        let roots: Vec<u64> = if spreading.zc_roots.is_empty() {
            (0..seed.set_size() as u64).map(|i| 2 * i + 1).collect()
        } else {
            spreading.zc_roots.clone()
        };
        (0..seed.set_size())
            .map(|i| {
                let u = roots[i % roots.len()];
                masked_waveform(&zadoff_chu(mask.len(), u)?, mask)
            })
            .collect::<Result<Vec<_>>>()?
    };
    synthesize(&seed, &waveforms)
}

fn mc_codes(
    kind: &McCodeKind,
    mask: &SpectrumMask,
    expand: usize,
    users: usize,
    rng_seed: u64,
) -> Result<Vec<ComplexSeq>> {
    let big = mask.expanded(expand)?;
    let m = big.len();
    (0..users)
        .map(|j| match kind {
            McCodeKind::ZadoffChu => {
                let mut u = 2 * j as u64 + 3;
                while crate::seeds::gcd(u, m as u64) != 1 {
                    u += 2;
                }
                Ok(masked_waveform(&zadoff_chu(m, u)?, &big)?.spectrum().clone())
            }
            McCodeKind::RandomPolyphase => {
                use rand::Rng;
                let mut rng = crate::derive_rng(rng_seed ^ 0x6d63, j as u64);
                let bins: Vec<Complex> = (0..m)
                    .map(|k| {
                        if big.is_available(k) {
                            Complex::from_polar(
                                1.0,
                                rng.random::<f64>() * 2.0 * std::f64::consts::PI,
                            )
                        } else {
                            Complex::new(0.0, 0.0)
                        }
                    })
                    .collect();
                ComplexSeq::new(bins)
            }
        })
        .collect()
}

/// Resolve every reference in a scenario spec into runnable form.
pub fn build_scenario(spec: &ScenarioSpec, base: &Path) -> Result<Scenario> {
    let channel = resolve_channel(&spec.channel, base)?;
    let mut cfg = LinkConfig::new(spec.users, spec.ebn0_db, channel);
    cfg.nf_db = spec.nf_db;
    cfg.cp_len = spec.cp_len;
    cfg.n_bits = spec.n_bits;
    cfg.rng_seed = spec.rng_seed;
    cfg.symbols_per_draw = spec.symbols_per_draw;
    cfg.noiseless = spec.noiseless;

    let rx_mask = match &spec.rx_mask {
        None => None,
        Some(RxMaskSpec::Explicit { mask }) => Some(mask.clone()),
        Some(RxMaskSpec::Target {
            eta_target,
            flip_seed,
        }) => Some(crate::simulate::mask_with_eta(&spec.mask, *eta_target, *flip_seed)?.0),
    };
    let eta = match &rx_mask {
        Some(rx) => crate::simulate::eta(&spec.mask, rx)?,
        None => 1.0,
    };

    let kind = match spec.system {
        SystemKind::CrCdma => {
            let spreading = spec.spreading.as_ref().ok_or_else(|| {
                Error::Schema("cr_cdma scenario needs a `spreading` section".into())
            })?;
            let tx = build_cr_codes(spreading, &spec.mask, base)?;
            let rx_code = match &rx_mask {
                Some(rx) => {
                    let rx_set = build_cr_codes(spreading, rx, base)?;
                    Some(rx_set.sequences()[0].clone())
                }
                None => None,
            };
            ScenarioKind::CrCdma {
                tx_codes: tx.sequences().to_vec(),
                rx_code,
            }
        }
        SystemKind::McCdma => {
            let kind = spec.mc_codes.as_ref().ok_or_else(|| {
                Error::Schema("mc_cdma scenario needs an `mc_codes` entry".into())
            })?;
            ScenarioKind::McCdma {
                freq_codes: mc_codes(kind, &spec.mask, spec.mc_expand, spec.users, spec.rng_seed)?,
            }
        }
        SystemKind::NcOfdm => ScenarioKind::NcOfdm {
            tx_mask: spec.mask.clone(),
            rx_mask: rx_mask.clone().unwrap_or_else(|| spec.mask.clone()),
        },
    };
    Ok(Scenario {
        id: spec.scenario_id.clone(),
        cfg,
        eta,
        kind,
    })
}

/// Run an assembled scenario to a BER measurement.
pub fn run_scenario(sc: &Scenario) -> Result<BERResult> {
    match &sc.kind {
        ScenarioKind::CrCdma { tx_codes, rx_code } => {
            crate::simulate::run_ber_mismatched(&sc.cfg, tx_codes, rx_code.as_ref())
        }
        ScenarioKind::McCdma { freq_codes } => {
            crate::simulate::mc_cdma_baseline(&sc.cfg, freq_codes)
        }
        ScenarioKind::NcOfdm { tx_mask, rx_mask } => {
            crate::simulate::ncofdm_baseline(&sc.cfg, tx_mask, rx_mask)
        }
    }
}

/// Result CSV header used by the simulation front ends.
pub const RESULT_CSV_HEADER: &str = "scenario_id,ebn0_db,nf_db,eta,ber,ci95,bits\n";

pub fn result_csv_row(id: &str, cfg: &LinkConfig, eta: f64, res: &BERResult) -> String {
    format!(
        "{},{},{},{},{},{},{}\n",
        id, cfg.ebn0_db, cfg.nf_db, eta, res.ber, res.ci95, res.bits
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeds::builtin_zcz;
    use crate::seqcore::papr_db;

    #[test]
    fn sequence_json_round_trip() {
        let seq = zadoff_chu(16, 3).unwrap();
        let text = seq_to_json(&seq);
        let back = seq_from_json(&text).unwrap();
        assert_eq!(seq, back);
    }

    #[test]
    fn sequence_json_rejects_bad_shapes() {
        assert!(seq_from_json("{\"n\": 3, \"re\": [1.0], \"im\": [0.0]}").is_err());
        assert!(seq_from_json("{\"n\": 0, \"re\": [], \"im\": []}").is_err());
        assert!(seq_from_json("{\"n\": 1, \"re\": [1e999], \"im\": [0.0]}").is_err());
        assert!(seq_from_json("not json").is_err());
    }

    #[test]
    fn sequence_csv_round_trip() {
        let seq = zadoff_chu(8, 1).unwrap();
        let text = seq_to_csv(&seq);
        assert!(text.starts_with("index,re,im\n"));
        let back = seq_from_csv(&text).unwrap();
        for (a, b) in seq.iter().zip(back.iter()) {
            assert!((a - b).norm() < 1e-15);
        }
        assert!(seq_from_csv("index,re,im\n0,nope,1\n").is_err());
        assert!(seq_from_csv("0,1\n").is_err());
    }

    #[test]
    fn mask_json_round_trip_and_validation() {
        let mask = SpectrumMask::with_holes(8, &[2, 5]).unwrap();
        let text = mask_to_json(&mask);
        assert!(text.contains("\"S\""));
        let back = mask_from_json(&text).unwrap();
        assert_eq!(mask, back);
        assert!(mask_from_json("{\"S\": [0, 2]}").is_err());
        assert!(mask_from_json("{\"S\": []}").is_err());
    }

    #[test]
    fn mag_phase_import_rows_and_flat() {
        let rows = r#"{"mag": [[1.0, 2.0], [3.0]], "phase": [[0.0, 1.5707963267948966], [3.141592653589793]]}"#;
        let seq = seq_from_mag_phase_json(rows).unwrap();
        assert_eq!(seq.len(), 3);
        assert!((seq[0] - Complex::new(1.0, 0.0)).norm() < 1e-12);
        assert!((seq[1] - Complex::new(0.0, 2.0)).norm() < 1e-9);
        assert!((seq[2] - Complex::new(-3.0, 0.0)).norm() < 1e-9);

        let flat = r#"{"mag": [1.0, 1.0], "phase": [0.0, 0.0]}"#;
        assert_eq!(seq_from_mag_phase_json(flat).unwrap().len(), 2);
        assert!(seq_from_mag_phase_json(r#"{"mag": [1.0], "phase": []}"#).is_err());
    }

    #[test]
    fn seed_set_json_round_trip() {
        let set = builtin_zcz("example2").unwrap();
        let text = seed_set_to_json(&set, Some("example2"));
        let (mut back, name) = seed_set_from_json(&text).unwrap();
        assert_eq!(name.as_deref(), Some("example2"));
        assert_eq!(back.set_size(), 4);
        assert_eq!(back.zone(), 3);
        assert!(back.verify().unwrap().passes);
        assert_eq!(seed_hash(&back), seed_hash(&set));
    }

    #[test]
    fn seed_set_rejects_inconsistent_declarations() {
        let set = builtin_zcz("example1").unwrap();
        let text = seed_set_to_json(&set, None);
        let broken = text.replace("\"K\": 2", "\"K\": 3");
        assert!(matches!(seed_set_from_json(&broken), Err(Error::Schema(_))));
    }

    #[test]
    fn quasi_set_round_trip_with_provenance() {
        let holes: Vec<usize> = (14..20).chain(40..48).collect();
        let mask = SpectrumMask::with_holes(64, &holes).unwrap();
        let seed = builtin_zcz("example2").unwrap();
        let params: Vec<WaveformParams> = [3u64, 5, 7, 9]
            .iter()
            .map(|&u| WaveformParams::ZadoffChu { u })
            .collect();
        let waveforms: Vec<_> = [3u64, 5, 7, 9]
            .iter()
            .map(|&u| masked_waveform(&zadoff_chu(64, u).unwrap(), &mask).unwrap())
            .collect();
        let set = synthesize(&seed, &waveforms).unwrap();
        let text = quasi_set_to_json(&set, Some("example2"), &params);
        let (back, back_params) = quasi_set_from_json(&text).unwrap();
        assert_eq!(back.set_size(), 4);
        assert_eq!(back.seq_len(), 1024);
        assert_eq!(back.zccz_width(), 128);
        assert_eq!(back_params, params);

        // corrupting the hash is caught
        let bad = text.replace("\"seed_hash\": \"", "\"seed_hash\": \"0");
        assert!(quasi_set_from_json(&bad).is_err());
    }

    #[test]
    fn lattice_csv_format() {
        let lattice = vec![vec![Complex::new(1.0, 2.0), Complex::new(-0.5, -0.25)]];
        let text = lattice_to_csv(&lattice);
        assert_eq!(text, "1+2j,-0.5-0.25j\n");
    }

    #[test]
    fn scenario_build_and_run_smoke() {
        let spec_text = r#"{
            "scenario_id": "smoke",
            "system": "cr_cdma",
            "users": 2,
            "ebn0_db": 8.0,
            "nf_db": 10.0,
            "cp_len": 96,
            "n_bits": 2000,
            "rng_seed": 7,
            "channel": {"name": "cost207ra6-approx"},
            "mask": {"S": [1,1,1,1,1,1,1,1,1,1,1,1,1,1,0,0,0,0,0,0,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,0,0,0,0,0,0,0,0,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1]},
            "spreading": {"seed_set": "example2", "zc_roots": [3,5,7,9]}
        }"#;
        let spec = scenario_from_json(spec_text).unwrap();
        let sc = build_scenario(&spec, Path::new(".")).unwrap();
        assert_eq!(sc.eta, 1.0);
        let res = run_scenario(&sc).unwrap();
        assert_eq!(res.bits, 2000);
        let row = result_csv_row(&sc.id, &sc.cfg, sc.eta, &res);
        assert!(row.starts_with("smoke,8,10,1,"));
    }

    #[test]
    fn scenario_missing_sections_are_schema_errors() {
        let text = r#"{
            "scenario_id": "x", "system": "cr_cdma", "users": 1,
            "ebn0_db": 5.0, "cp_len": 8, "n_bits": 100,
            "channel": {"name": "flat1"},
            "mask": {"S": [1,1,1,1]}
        }"#;
        let spec = scenario_from_json(text).unwrap();
        assert!(matches!(
            build_scenario(&spec, Path::new(".")),
            Err(Error::Schema(_))
        ));
    }

    #[test]
    fn optimizer_result_embeds_importable_waveform() {
        let mask = SpectrumMask::with_holes(16, &[3, 4]).unwrap();
        let cfg = OptimizerConfig::new(0.15).unwrap().with_seed(3);
        let res = crate::optimize::optimize_waveform(&mask, &cfg).unwrap();
        let text = opt_result_to_json(&res, &cfg);
        // the embedded spectrum round-trips through the waveform loader
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        let wave_json = serde_json::json!({
            "params": {"type": "optimized", "lambda": 0.15, "rng_seed": 3},
            "mask": v["mask"],
            "spectrum": v["spectrum"],
        });
        let (wave, params) = waveform_from_json(&wave_json.to_string()).unwrap();
        assert_eq!(
            params,
            WaveformParams::Optimized {
                lambda: 0.15,
                rng_seed: 3
            }
        );
        assert!((papr_db(wave.time_domain()).unwrap() - res.papr_db).abs() < 1e-9);
    }
}
