//! Command-line front end: construct spreading families, optimize masked
//! waveforms, analyze sequence files, and drive the link simulator.
//!
//! Every command is deterministic in its inputs and seed; reruns produce
//! byte-identical output files. `CRSEQ_THREADS` caps the worker pool.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crseq::construct::{synthesize, tf_lattice, verify_theorem1};
use crseq::error::Error;
use crseq::io;
use crseq::optimize::{optimize_waveform, pareto_sweep, OptimizerConfig};
use crseq::seeds::{builtin_zcz, masked_waveform, verify_zcz, zadoff_chu, FreqWaveform};
use crseq::seqcore::{dft, max_sidelobe, papr_db, CorrelationKind, ComplexSeq, SpectrumMask};

#[derive(Parser)]
#[command(name = "crseq", version, about = "spreading sequences for spectrum-constrained CDMA")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize a quasi-ZCZ family from a seed set and masked waveforms.
    Design(DesignArgs),
    /// Shape a single masked waveform (PAPR vs autocorrelation).
    Optimize(OptimizeArgs),
    /// Correlation / PAPR / leakage report for a sequence file.
    Analyze(AnalyzeArgs),
    /// Run one link-simulation scenario.
    Simulate(SimulateArgs),
    /// Sweep one scenario parameter and emit a row per point.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct DesignArgs {
    /// Spectrum mask JSON ({"S": [0/1, ...]}).
    #[arg(long)]
    mask: PathBuf,
    /// Built-in seed name (example1, example2) or a seed-set JSON file.
    #[arg(long)]
    seed: String,
    /// Comma-separated Zadoff-Chu roots for the per-user waveforms.
    #[arg(long, value_delimiter = ',')]
    zc_roots: Vec<u64>,
    /// Waveform JSON broadcast to every user (alternative to --zc-roots).
    #[arg(long)]
    waveforms: Option<PathBuf>,
    /// Output family JSON.
    #[arg(long)]
    out: PathBuf,
    /// Also write the time-frequency lattice of one sequence as CSV.
    #[arg(long)]
    lattice: Option<PathBuf>,
    /// Which sequence the lattice export refers to.
    #[arg(long, default_value_t = 0)]
    lattice_index: usize,
}

#[derive(Args)]
struct OptimizeArgs {
    #[arg(long)]
    mask: PathBuf,
    /// Single penalty factor in [0, 1].
    #[arg(long)]
    lambda: Option<f64>,
    /// Penalty grid start:end:step (inclusive end).
    #[arg(long)]
    lambda_grid: Option<String>,
    #[arg(long, default_value_t = 1)]
    restarts: usize,
    /// RNG seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output: result JSON for a single lambda, sweep CSV for a grid.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Sequence-set file: family JSON, seed-set JSON, waveform JSON,
    /// magnitude/phase JSON, sequence JSON, or index,re,im CSV.
    input: PathBuf,
    /// Write the summary CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also dump normalized correlation curves (series,shift,value CSV).
    #[arg(long)]
    curves: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    scenario: PathBuf,
    /// Results CSV (header + one row); stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    scenario: PathBuf,
    /// Axis spec: name=start:end:step with name one of nf, ebn0, users, eta.
    #[arg(long)]
    axis: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("CRSEQ_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Design(args) => design(args),
        Command::Optimize(args) => optimize(args),
        Command::Analyze(args) => analyze(args),
        Command::Simulate(args) => simulate(args),
        Command::Sweep(args) => sweep(args),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::Schema(_) | Error::Json(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Schema(format!("cannot read {}: {e}", path.display())))
}

fn write_out(path: &Path, text: &str) -> Result<(), Error> {
    std::fs::write(path, text)
        .map_err(|e| Error::Schema(format!("cannot write {}: {e}", path.display())))?;
    Ok(())
}

fn design(args: DesignArgs) -> Result<ExitCode, Error> {
    let mask = io::mask_from_json(&read(&args.mask)?)?;

    let (seed, seed_name) = if args.seed == "example1" || args.seed == "example2" {
        (builtin_zcz(&args.seed)?, Some(args.seed.clone()))
    } else {
        let (mut set, name) = io::seed_set_from_json(&read(Path::new(&args.seed))?)?;
        let report = set.verify()?;
        if !report.passes {
            return Err(Error::VerificationFailed(format!(
                "seed file zone {} not satisfied (max in-zone |PACF| {:.3e}, |PCCF| {:.3e} relative)",
                set.zone(),
                report.max_pacf / report.reference,
                report.max_pccf / report.reference
            )));
        }
        (set, name)
    };

    let (waveforms, params): (Vec<FreqWaveform>, Vec<io::WaveformParams>) =
        if let Some(wpath) = &args.waveforms {
            let (wave, p) = io::waveform_from_json(&read(wpath)?)?;
            if wave.mask() != &mask {
                return Err(Error::Schema(
                    "waveform file mask differs from --mask".into(),
                ));
            }
            (vec![wave], vec![p])
        } else {
            if args.zc_roots.is_empty() {
                return Err(Error::Schema(
                    "need --zc-roots or --waveforms to build the waveform set".into(),
                ));
            }
            let mut waves = Vec::new();
            let mut params = Vec::new();
            for i in 0..seed.set_size() {
                let u = args.zc_roots[i % args.zc_roots.len()];
                waves.push(masked_waveform(&zadoff_chu(mask.len(), u)?, &mask)?);
                params.push(io::WaveformParams::ZadoffChu { u });
            }
            (waves, params)
        };

    let set = synthesize(&seed, &waveforms)?;
    // a single waveform broadcasts across the seed; the provenance follows
    let params = if params.len() == 1 && set.set_size() > 1 {
        vec![params[0].clone(); set.set_size()]
    } else {
        params
    };
    let report = verify_theorem1(&set)?;
    println!(
        "family: K={} length={} zone={}",
        set.set_size(),
        set.seq_len(),
        set.zccz_width()
    );
    println!(
        "verification: cross={} auto={} leakage={} (max rel {:.3e} / {:.3e} / {:.3e})",
        report.cross_ok,
        report.auto_ok,
        report.leakage_ok,
        report.cross_max_rel,
        report.auto_inner_max_rel.max(report.auto_outer_max_rel),
        report.leakage_max_rel
    );
    write_out(&args.out, &io::quasi_set_to_json(&set, seed_name.as_deref(), &params))?;

    if let Some(lpath) = &args.lattice {
        let lattice = tf_lattice(&set, args.lattice_index)?;
        write_out(lpath, &io::lattice_to_csv(&lattice))?;
    }
    if report.passes() {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("error: constructed family failed verification");
        Ok(ExitCode::from(1))
    }
}

fn parse_grid(text: &str) -> Result<Vec<f64>, Error> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::Schema(format!(
            "grid `{text}` should be start:end:step"
        )));
    }
    let start: f64 = parts[0]
        .parse()
        .map_err(|_| Error::Schema("bad grid start".into()))?;
    let end: f64 = parts[1]
        .parse()
        .map_err(|_| Error::Schema("bad grid end".into()))?;
    let step: f64 = parts[2]
        .parse()
        .map_err(|_| Error::Schema("bad grid step".into()))?;
    if step <= 0.0 || end < start {
        return Err(Error::Schema("grid needs step > 0 and end >= start".into()));
    }
    let mut v = Vec::new();
    let mut i = 0u64;
    loop {
        let x = start + step * i as f64;
        if x > end + 1e-12 {
            break;
        }
        v.push(x);
        i += 1;
    }
    Ok(v)
}

fn optimize(args: OptimizeArgs) -> Result<ExitCode, Error> {
    let mask = io::mask_from_json(&read(&args.mask)?)?;
    match (args.lambda, &args.lambda_grid) {
        (Some(lambda), None) => {
            let cfg = OptimizerConfig::new(lambda)?
                .with_seed(args.seed)
                .with_restarts(args.restarts);
            let res = optimize_waveform(&mask, &cfg)?;
            println!(
                "lambda={lambda}: papr={:.4} dB max_aacf={:.4} iterations={} converged={}",
                res.papr_db, res.max_aacf, res.iterations, res.converged
            );
            if let Some(out) = &args.out {
                write_out(out, &io::opt_result_to_json(&res, &cfg))?;
            }
            Ok(ExitCode::SUCCESS)
        }
        (None, Some(grid)) => {
            let lambdas = parse_grid(grid)?;
            let cfg = OptimizerConfig::new(0.0)?
                .with_seed(args.seed)
                .with_restarts(args.restarts);
            let rows: Vec<_> = pareto_sweep(&mask, &lambdas, &cfg)?
                .into_iter()
                .map(|(row, _)| row)
                .collect();
            let csv = io::sweep_to_csv(&rows);
            match &args.out {
                Some(out) => write_out(out, &csv)?,
                None => print!("{csv}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        _ => Err(Error::Schema(
            "pass exactly one of --lambda or --lambda-grid".into(),
        )),
    }
}

enum AnalyzeInput {
    Quasi(crseq::construct::QuasiZCZSet),
    Seed(crseq::seeds::ZCZSeedSet),
    Waveform(FreqWaveform),
    Sequence(ComplexSeq),
}

fn load_analyze_input(path: &Path) -> Result<AnalyzeInput, Error> {
    let text = read(path)?;
    if let Ok((set, _)) = io::quasi_set_from_json(&text) {
        return Ok(AnalyzeInput::Quasi(set));
    }
    if let Ok((mut set, _)) = io::seed_set_from_json(&text) {
        let _ = set.verify();
        return Ok(AnalyzeInput::Seed(set));
    }
    if let Ok((wave, _)) = io::waveform_from_json(&text) {
        return Ok(AnalyzeInput::Waveform(wave));
    }
    if let Ok(seq) = io::seq_from_mag_phase_json(&text) {
        return Ok(AnalyzeInput::Sequence(seq));
    }
    if let Ok(seq) = io::seq_from_json(&text) {
        return Ok(AnalyzeInput::Sequence(seq));
    }
    if let Ok(seq) = io::seq_from_csv(&text) {
        return Ok(AnalyzeInput::Sequence(seq));
    }
    Err(Error::Schema(format!(
        "{} is not a recognized sequence file",
        path.display()
    )))
}

fn analyze(args: AnalyzeArgs) -> Result<ExitCode, Error> {
    let input = load_analyze_input(&args.input)?;
    let mut summary = String::from(
        "item,len,papr_db,max_aacf,max_pacf,leakage_max_rel,achieved_zcz,achieved_zccz\n",
    );
    let mut curves = String::from("series,shift,value\n");

    let leakage_of = |seq: &ComplexSeq, mask: &SpectrumMask| -> f64 {
        let spec = dft(seq);
        let scale = (seq.energy() / seq.len() as f64).sqrt().max(1e-300);
        mask.holes()
            .iter()
            .map(|&h| spec[h].norm() / scale)
            .fold(0.0, f64::max)
    };

    let push_seq = |label: &str,
                        seq: &ComplexSeq,
                        mask: Option<&SpectrumMask>,
                        summary: &mut String,
                        curves: &mut String|
     -> Result<(), Error> {
        let papr = papr_db(seq)?;
        let aacf = max_sidelobe(seq, CorrelationKind::Aperiodic)?;
        let pacf = max_sidelobe(seq, CorrelationKind::Periodic)?;
        let leak = mask
            .map(|m| format!("{}", leakage_of(seq, m)))
            .unwrap_or_default();
        summary.push_str(&format!("{label},{},{papr},{aacf},{pacf},{leak},,\n", seq.len()));

        let auto_p = crseq::seqcore::pccf_all(seq, seq)?;
        let auto_a = crseq::seqcore::accf_all(seq, seq)?;
        let r0 = auto_p[0].norm().max(1e-300);
        for (t, v) in auto_p.iter().enumerate() {
            curves.push_str(&format!("{label}.pacf,{t},{}\n", v.norm() / r0));
        }
        for (t, v) in auto_a.iter().enumerate() {
            curves.push_str(&format!("{label}.aacf,{t},{}\n", v.norm() / r0));
        }
        Ok(())
    };

    match &input {
        AnalyzeInput::Quasi(set) => {
            // hole leakage of a composite is block-wise, checked by the
            // family verifier; per-sequence rows report the correlations
            for (i, seq) in set.sequences().iter().enumerate() {
                push_seq(&format!("seq{i}"), seq, None, &mut summary, &mut curves)?;
            }
            let report = verify_zcz(set.sequences(), set.zccz_width().max(1))?;
            let leakage = verify_theorem1(set)?.leakage_max_rel;
            summary.push_str(&format!(
                "set,{},,,,{},{},{}\n",
                set.seq_len(),
                leakage,
                report.achieved_zcz,
                report.achieved_zccz
            ));
            let c0 = &set.sequences()[0];
            let clast = &set.sequences()[set.set_size() - 1];
            let cross = crseq::seqcore::pccf_all(c0, clast)?;
            let r0 = (c0.energy() * clast.energy()).sqrt();
            for (t, v) in cross.iter().enumerate() {
                curves.push_str(&format!("cross.first_last,{t},{}\n", v.norm() / r0));
            }
        }
        AnalyzeInput::Seed(set) => {
            for (i, seq) in set.sequences().iter().enumerate() {
                push_seq(&format!("seq{i}"), seq, None, &mut summary, &mut curves)?;
            }
            let report = verify_zcz(set.sequences(), set.zone())?;
            summary.push_str(&format!(
                "set,{},,,,,{},{}\n",
                set.seq_len(),
                report.achieved_zcz,
                report.achieved_zccz
            ));
        }
        AnalyzeInput::Waveform(wave) => {
            push_seq(
                "waveform",
                wave.time_domain(),
                Some(wave.mask()),
                &mut summary,
                &mut curves,
            )?;
        }
        AnalyzeInput::Sequence(seq) => {
            push_seq("seq0", seq, None, &mut summary, &mut curves)?;
        }
    }

    match &args.out {
        Some(out) => write_out(out, &summary)?,
        None => print!("{summary}"),
    }
    if let Some(cpath) = &args.curves {
        write_out(cpath, &curves)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn simulate(args: SimulateArgs) -> Result<ExitCode, Error> {
    let base = args
        .scenario
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));
    let spec = io::scenario_from_json(&read(&args.scenario)?)?;
    let scenario = io::build_scenario(&spec, &base)?;
    let result = io::run_scenario(&scenario)?;
    let mut csv = String::from(io::RESULT_CSV_HEADER);
    csv.push_str(&io::result_csv_row(
        &scenario.id,
        &scenario.cfg,
        scenario.eta,
        &result,
    ));
    match &args.out {
        Some(out) => write_out(out, &csv)?,
        None => print!("{csv}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn sweep(args: SweepArgs) -> Result<ExitCode, Error> {
    let base = args
        .scenario
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));
    let spec = io::scenario_from_json(&read(&args.scenario)?)?;

    let (axis, grid_text) = args
        .axis
        .split_once('=')
        .ok_or_else(|| Error::Schema("axis should be name=start:end:step".into()))?;
    let grid = parse_grid(grid_text)?;

    let mut csv = String::from(io::RESULT_CSV_HEADER);
    for value in grid {
        let mut point = spec.clone();
        point.scenario_id = format!("{}[{}={}]", spec.scenario_id, axis, value);
        match axis {
            "nf" => point.nf_db = value,
            "ebn0" => point.ebn0_db = value,
            "users" => {
                if value < 1.0 || value.fract() != 0.0 {
                    return Err(Error::Schema(format!("users axis value {value} not a positive integer")));
                }
                point.users = value as usize;
            }
            "eta" => {
                let flip_seed = match &spec.rx_mask {
                    Some(io::RxMaskSpec::Target { flip_seed, .. }) => *flip_seed,
                    _ => spec.rng_seed,
                };
                point.rx_mask = if value >= 1.0 {
                    None
                } else {
                    Some(io::RxMaskSpec::Target {
                        eta_target: value,
                        flip_seed,
                    })
                };
            }
            other => {
                return Err(Error::Schema(format!(
                    "unknown sweep axis `{other}` (nf, ebn0, users, eta)"
                )))
            }
        }
        let scenario = io::build_scenario(&point, &base)?;
        let result = io::run_scenario(&scenario)?;
        csv.push_str(&io::result_csv_row(
            &scenario.id,
            &scenario.cfg,
            scenario.eta,
            &result,
        ));
    }
    match &args.out {
        Some(out) => write_out(out, &csv)?,
        None => print!("{csv}"),
    }
    Ok(ExitCode::SUCCESS)
}
