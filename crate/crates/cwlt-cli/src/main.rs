//! `cwlt` command-line interface: synthesize signals, transform them,
//! extract ridges, separate components, evaluate error bounds and reproduce
//! the built-in experiments. Every run echoes its effective configuration as
//! JSON so results are reproducible byte for byte.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use cwlt_core::bounds::{bound_table, verify_theorems, BoundInputs};
use cwlt_core::engine::{default_grid, transform, DEFAULT_T_HALF};
use cwlt_core::error::CwltError;
use cwlt_core::experiment::{
    run_experiment, trimmed_rmse_rows, ExperimentConfig, ModelChoice, SigmaMode,
};
use cwlt_core::io;
use cwlt_core::recover::{recover_chirp, recover_sinusoidal};
use cwlt_core::ridge::{extract_ridges, two_pass_extract, RidgeModel};
use cwlt_core::signal::{add_noise, builtin, Builtin, SignalKind, SignalSpec};
use cwlt_core::sigma::{constant, sigma_chirp, sigma_sinusoidal, SigmaProfile};
use cwlt_core::window::WindowSpec;

#[derive(Parser)]
#[command(name = "cwlt", version, about = "Adaptive CWLT multicomponent signal separation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct WindowArgs {
    /// Essential-support threshold of the window transform.
    #[arg(long, default_value_t = 0.125)]
    tau0: f64,
    /// Modulation frequency of the analyzing window.
    #[arg(long, default_value_t = 1.0)]
    mu: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a built-in signal (optionally noisy) to CSV + JSON sidecar.
    Synth {
        /// Built-in signal name: two_chirp | three_mode.
        #[arg(long)]
        spec: String,
        /// Number of samples (defaults to the signal's native count).
        #[arg(long)]
        n: Option<usize>,
        /// real | complex.
        #[arg(long, default_value = "real")]
        kind: String,
        /// Signal-to-noise ratio in dB (omit for a clean signal).
        #[arg(long)]
        snr: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Transform a signal written by `synth` over a frequency grid.
    Transform {
        /// Signal path stem (reads `<in>.csv` and `<in>.json`).
        #[arg(long = "in")]
        input: PathBuf,
        /// Window width: `const:<v>` | sigma1 | sigma2 (the latter two need a
        /// built-in spec name in the sidecar).
        #[arg(long, default_value = "const:1")]
        sigma: String,
        #[arg(long, default_value_t = 256)]
        nfreq: usize,
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Extract ridges from a transform directory written by `transform`.
    Ridges {
        /// Directory containing tf_header.json and tf_values.bin.
        #[arg(long)]
        tf: PathBuf,
        /// Number of components.
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 0.2)]
        threshold: f64,
        /// sin | chirp (chirp runs the two-pass scheme).
        #[arg(long, default_value = "sin")]
        model: String,
        /// Odd moving-median length applied before differentiation.
        #[arg(long, default_value_t = 15)]
        smooth: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Full separation pipeline on a built-in signal or a signal file.
    Separate {
        /// Built-in spec name (alternative to --in).
        #[arg(long)]
        spec: Option<String>,
        /// Signal path stem (alternative to --spec).
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long, default_value = "sigma2")]
        sigma: String,
        #[arg(long, default_value = "chirp")]
        model: String,
        /// Number of components (defaults to the spec's count).
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 1024)]
        nfreq: usize,
        #[arg(long, default_value_t = 0.2)]
        threshold: f64,
        #[arg(long, default_value_t = 15)]
        smooth: usize,
        #[arg(long)]
        snr: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate the closed-form error bounds for one component of a built-in
    /// signal; optionally verify the bound inequalities empirically.
    Bounds {
        #[arg(long)]
        spec: String,
        /// Component index (1-based).
        #[arg(long, default_value_t = 1)]
        component: usize,
        #[arg(long, default_value = "sigma2")]
        sigma: String,
        /// Amplitude-variation bound (default: measured from the spec).
        #[arg(long)]
        eps1: Option<f64>,
        /// Chirp-rate bound (default: measured).
        #[arg(long)]
        eps2: Option<f64>,
        /// Jerk bound (default: measured).
        #[arg(long)]
        eps3: Option<f64>,
        /// Also transform + extract and report empirical pass rates.
        #[arg(long, default_value_t = false)]
        verify: bool,
        #[arg(long, default_value_t = 1024)]
        nfreq: usize,
        #[arg(long, default_value_t = 0.2)]
        threshold: f64,
        /// Discretization slack added to each inequality during --verify.
        #[arg(long, default_value_t = 1e-3)]
        slack: f64,
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Recompute trimmed RMSEs from the recovered_k*.csv files of a run.
    Eval {
        /// Run directory produced by `experiment` or `separate`.
        #[arg(long)]
        run: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reproduce a built-in experiment end to end.
    Experiment {
        /// two-chirp | three-mode.
        name: String,
        #[arg(long, default_value = "sigma2")]
        sigma: String,
        #[arg(long, default_value = "chirp")]
        model: String,
        #[arg(long)]
        snr: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Average RMSEs over this many consecutive noise seeds.
        #[arg(long, default_value_t = 1)]
        repeats: usize,
        /// Frequency bins (defaults to the experiment preset).
        #[arg(long)]
        nfreq: Option<usize>,
        #[arg(long, default_value_t = 0.2)]
        threshold: f64,
        /// Odd moving-median length applied to ridge frequencies before
        /// chirp-rate differentiation.
        #[arg(long)]
        smooth: Option<usize>,
        /// Also write per-component bound tables into the run directory.
        #[arg(long, default_value_t = false)]
        bounds: bool,
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_kind(s: &str) -> Result<SignalKind, CwltError> {
    match s {
        "real" => Ok(SignalKind::Real),
        "complex" => Ok(SignalKind::Complex),
        other => Err(CwltError::Usage(format!("kind must be real or complex, got '{other}'"))),
    }
}

fn sigma_for(
    mode: &SigmaMode,
    spec: Option<&SignalSpec>,
    window: &WindowSpec,
    times: &[f64],
) -> Result<SigmaProfile, CwltError> {
    match mode {
        SigmaMode::Constant(v) => constant(*v, times.len()),
        SigmaMode::Sigma1 => {
            let spec = spec.ok_or_else(|| {
                CwltError::Usage("sigma1 needs a built-in spec for ground truth".into())
            })?;
            sigma_sinusoidal(spec, window, times)
        }
        SigmaMode::Sigma2 => {
            let spec = spec.ok_or_else(|| {
                CwltError::Usage("sigma2 needs a built-in spec for ground truth".into())
            })?;
            sigma_chirp(spec, window, times, false)
        }
    }
}

fn run(cli: Cli) -> Result<(), CwltError> {
    match cli.command {
        Command::Synth {
            spec,
            n,
            kind,
            snr,
            seed,
            out,
        } => {
            let which: Builtin = spec.parse()?;
            let sp = builtin(which);
            let n = n.unwrap_or(match which {
                Builtin::TwoChirp => 256,
                Builtin::ThreeMode => 512,
            });
            let kind = parse_kind(&kind)?;
            let sig0 = sp.sample(n, kind)?;
            let sig = match snr {
                Some(db) => add_noise(&sig0, db, seed)?,
                None => sig0,
            };
            std::fs::create_dir_all(&out)?;
            io::write_signal(
                &out.join("signal"),
                &sig,
                &io::SignalSidecar {
                    n,
                    sample_rate: sig.sample_rate,
                    t_start: sig.t_start,
                    kind,
                    spec_name: sp.name().map(String::from),
                    snr_db: snr,
                    seed: Some(seed),
                },
            )?;
            println!("wrote {}", out.join("signal.csv").display());
        }
        Command::Transform {
            input,
            sigma,
            nfreq,
            window,
            out,
        } => {
            let (sig, sidecar) = io::read_signal(&input)?;
            let w = WindowSpec::new(window.mu, window.tau0)?;
            let mode: SigmaMode = sigma.parse()?;
            let spec = sidecar
                .spec_name
                .as_deref()
                .and_then(|s| s.parse::<Builtin>().ok())
                .map(builtin);
            let profile = sigma_for(&mode, spec.as_ref(), &w, &sig.times())?;
            let grid = default_grid(&sig, nfreq)?;
            let tf = transform(&sig, &grid, &profile, &w, DEFAULT_T_HALF)?;
            io::write_tf(&out, &tf)?;
            io::write_json(
                &out.join("config.json"),
                &serde_json::json!({
                    "input": input, "sigma": mode, "nfreq": nfreq,
                    "tau0": window.tau0, "mu": window.mu, "t_half": DEFAULT_T_HALF,
                }),
            )?;
            println!("wrote transform ({} x {}) to {}", tf.n_freq(), tf.n_time(), out.display());
        }
        Command::Ridges {
            tf,
            k,
            threshold,
            model,
            smooth,
            out,
        } => {
            let tfr = io::read_tf(&tf)?;
            let model: ModelChoice = model.parse()?;
            let ridge = match model {
                ModelChoice::Sin => {
                    extract_ridges(&tfr, k, threshold, RidgeModel::Sinusoidal, None)?
                }
                ModelChoice::Chirp => two_pass_extract(&tfr, k, threshold, smooth)?,
            };
            std::fs::create_dir_all(&out)?;
            io::write_ridges(&out.join("ridges.csv"), &ridge, &tfr.times())?;
            io::write_json(
                &out.join("config.json"),
                &serde_json::json!({
                    "tf": tf, "k": k, "threshold": threshold,
                    "model": model, "smooth": smooth,
                }),
            )?;
            println!("wrote {}", out.join("ridges.csv").display());
        }
        Command::Separate {
            spec,
            input,
            sigma,
            model,
            k,
            nfreq,
            threshold,
            smooth,
            snr,
            seed,
            window,
            out,
        } => {
            let w = WindowSpec::new(window.mu, window.tau0)?;
            let mode: SigmaMode = sigma.parse()?;
            let model: ModelChoice = model.parse()?;
            let (sig, spec_obj, sidecar) = match (&spec, &input) {
                (Some(name), None) => {
                    let which: Builtin = name.parse()?;
                    let sp = builtin(which);
                    let n = match which {
                        Builtin::TwoChirp => 256,
                        Builtin::ThreeMode => 512,
                    };
                    let clean = sp.sample(n, SignalKind::Real)?;
                    let sig = match snr {
                        Some(db) => add_noise(&clean, db, seed)?,
                        None => clean,
                    };
                    let sc = io::SignalSidecar {
                        n,
                        sample_rate: sig.sample_rate,
                        t_start: sig.t_start,
                        kind: sig.kind,
                        spec_name: sp.name().map(String::from),
                        snr_db: snr,
                        seed: Some(seed),
                    };
                    (sig, Some(sp), sc)
                }
                (None, Some(path)) => {
                    let (sig, sc) = io::read_signal(path)?;
                    let spec_obj = sc
                        .spec_name
                        .as_deref()
                        .and_then(|s| s.parse::<Builtin>().ok())
                        .map(builtin);
                    (sig, spec_obj, sc)
                }
                _ => {
                    return Err(CwltError::Usage(
                        "separate needs exactly one of --spec or --in".into(),
                    ))
                }
            };
            let kk = k
                .or_else(|| spec_obj.as_ref().map(|s| s.num_components()))
                .ok_or_else(|| CwltError::Usage("--k required without a known spec".into()))?;
            let times = sig.times();
            let profile = sigma_for(&mode, spec_obj.as_ref(), &w, &times)?;
            let grid = default_grid(&sig, nfreq)?;
            let tf = transform(&sig, &grid, &profile, &w, DEFAULT_T_HALF)?;
            let ridge = match model {
                ModelChoice::Sin => {
                    extract_ridges(&tf, kk, threshold, RidgeModel::Sinusoidal, None)?
                }
                ModelChoice::Chirp => two_pass_extract(&tf, kk, threshold, smooth)?,
            };
            std::fs::create_dir_all(&out)?;
            io::write_signal(&out.join("signal"), &sig, &sidecar)?;
            io::write_sigma(&out.join("sigma.csv"), &times, &profile)?;
            io::write_tf(&out, &tf)?;
            io::write_ridges(&out.join("ridges.csv"), &ridge, &times)?;
            let mut truth_rows: Option<Vec<Vec<f64>>> = None;
            if let Some(sp) = &spec_obj {
                if sp.num_components() == kk {
                    let mut rows = Vec::new();
                    for kc in 0..kk {
                        rows.push(
                            sp.sample_component(kc, sig.len(), sig.kind)?
                                .iter()
                                .map(|z| z.re)
                                .collect(),
                        );
                    }
                    truth_rows = Some(rows);
                }
            }
            let mut est_rows = Vec::new();
            for kc in 0..kk {
                let rec = match model {
                    ModelChoice::Sin => recover_sinusoidal(&tf, &ridge, kc, sig.kind)?,
                    ModelChoice::Chirp => recover_chirp(&tf, &ridge, kc, sig.kind)?,
                };
                let truth_col: Option<Vec<Complex64>> = truth_rows
                    .as_ref()
                    .map(|rows| rows[kc].iter().map(|&x| Complex64::new(x, 0.0)).collect());
                io::write_recovered(
                    &out.join(format!("recovered_k{}.csv", kc + 1)),
                    &rec,
                    truth_col.as_deref(),
                    &times,
                )?;
                est_rows.push(rec.values.iter().map(|z| z.re).collect::<Vec<f64>>());
            }
            io::write_json(
                &out.join("config.json"),
                &serde_json::json!({
                    "spec": spec, "in": input, "sigma": mode, "model": model,
                    "k": kk, "nfreq": nfreq, "threshold": threshold,
                    "smooth": smooth, "snr": snr, "seed": seed,
                    "tau0": window.tau0, "mu": window.mu,
                }),
            )?;
            if let Some(truth) = truth_rows {
                let rows = trimmed_rmse_rows(&truth, &est_rows)?;
                let mean = rows.iter().sum::<f64>() / rows.len() as f64;
                io::write_json(
                    &out.join("rmse.json"),
                    &serde_json::json!({"rmse_recovery": mean, "per_component": rows}),
                )?;
                println!("recovery rmse {mean:.6}");
            }
            println!("wrote separation run to {}", out.display());
        }
        Command::Bounds {
            spec,
            component,
            sigma,
            eps1,
            eps2,
            eps3,
            verify,
            nfreq,
            threshold,
            slack,
            window,
            out,
        } => {
            let which: Builtin = spec.parse()?;
            let sp = builtin(which);
            if component == 0 || component > sp.num_components() {
                return Err(CwltError::Usage(format!(
                    "component must lie in 1..={}",
                    sp.num_components()
                )));
            }
            let n = match which {
                Builtin::TwoChirp => 256,
                Builtin::ThreeMode => 512,
            };
            let w = WindowSpec::new(window.mu, window.tau0)?;
            let sig = sp.sample(n, SignalKind::Complex)?;
            let times = sig.times();
            let mode: SigmaMode = sigma.parse()?;
            let profile = sigma_for(&mode, Some(&sp), &w, &times)?;
            let defaults = cwlt_core::signal::estimate_model_constants(&sp, 512);
            let inputs = BoundInputs {
                spec: &sp,
                window: w,
                sigma: &profile,
                eps1: eps1.unwrap_or(defaults.0),
                eps2: eps2.unwrap_or(defaults.1),
                eps3: eps3.unwrap_or(defaults.2),
                component: component - 1,
                times: times.clone(),
            };
            std::fs::create_dir_all(&out)?;
            if verify {
                let grid = default_grid(&sig, nfreq)?;
                let tf = transform(&sig, &grid, &profile, &w, DEFAULT_T_HALF)?;
                let kk = sp.num_components();
                let ridge_sin =
                    extract_ridges(&tf, kk, threshold, RidgeModel::Sinusoidal, None)?;
                let mut gt = Vec::new();
                for kc in 0..kk {
                    for &t in &times {
                        gt.push(sp.component(kc).chirp_rate(t));
                    }
                }
                let ridge_chirp = extract_ridges(&tf, kk, threshold, RidgeModel::Chirp, Some(&gt))?
                    .with_chirp_rates(gt)?;
                let (header, rows) = bound_table(&inputs, Some(&ridge_chirp))?;
                io::write_table(
                    &out.join(format!("bounds_k{component}.csv")),
                    &header,
                    &rows,
                )?;
                let rep_sin =
                    verify_theorems(&inputs, &tf, &ridge_sin, RidgeModel::Sinusoidal, slack)?;
                let rep_chirp =
                    verify_theorems(&inputs, &tf, &ridge_chirp, RidgeModel::Chirp, slack)?;
                io::write_json(
                    &out.join("verify.json"),
                    &serde_json::json!({"sinusoidal": rep_sin, "chirp": rep_chirp}),
                )?;
                println!(
                    "pass rates (sin): if {:.3} rec {:.3} amp {:.3} ({}/{} samples satisfy the hypotheses)",
                    rep_sin.pass_if,
                    rep_sin.pass_recovery,
                    rep_sin.pass_amplitude,
                    rep_sin.n_flagged,
                    rep_sin.n_interior
                );
                println!(
                    "pass rates (chirp): if {:.3} rec {:.3} amp {:.3} ({}/{} samples satisfy the hypotheses)",
                    rep_chirp.pass_if,
                    rep_chirp.pass_recovery,
                    rep_chirp.pass_amplitude,
                    rep_chirp.n_flagged,
                    rep_chirp.n_interior
                );
            } else {
                let (header, rows) = bound_table(&inputs, None)?;
                io::write_table(
                    &out.join(format!("bounds_k{component}.csv")),
                    &header,
                    &rows,
                )?;
            }
            io::write_json(
                &out.join("config.json"),
                &serde_json::json!({
                    "spec": spec, "component": component, "sigma": mode,
                    "eps1": inputs.eps1, "eps2": inputs.eps2, "eps3": inputs.eps3,
                    "verify": verify, "nfreq": nfreq, "threshold": threshold,
                    "slack": slack, "tau0": window.tau0, "mu": window.mu,
                }),
            )?;
            println!("wrote bounds to {}", out.display());
        }
        Command::Eval { run, out } => {
            let mut truth_rows = Vec::new();
            let mut est_rows = Vec::new();
            let mut k = 1;
            loop {
                let path = run.join(format!("recovered_k{k}.csv"));
                if !path.exists() {
                    break;
                }
                let text = std::fs::read_to_string(&path)?;
                let mut lines = text.lines();
                let header: Vec<&str> = lines
                    .next()
                    .ok_or_else(|| CwltError::Io("empty recovered file".into()))?
                    .split(',')
                    .collect();
                let rec_idx = header
                    .iter()
                    .position(|&h| h == "recovered_re")
                    .ok_or_else(|| CwltError::Io("missing recovered_re column".into()))?;
                let truth_idx = header
                    .iter()
                    .position(|&h| h == "truth")
                    .ok_or_else(|| CwltError::Usage("run has no truth columns to evaluate".into()))?;
                let mut tr = Vec::new();
                let mut es = Vec::new();
                for line in lines {
                    let cells: Vec<&str> = line.split(',').collect();
                    es.push(cells[rec_idx].parse::<f64>().map_err(|e| {
                        CwltError::Io(format!("bad float in {}: {e}", path.display()))
                    })?);
                    tr.push(cells[truth_idx].parse::<f64>().map_err(|e| {
                        CwltError::Io(format!("bad float in {}: {e}", path.display()))
                    })?);
                }
                truth_rows.push(tr);
                est_rows.push(es);
                k += 1;
            }
            if truth_rows.is_empty() {
                return Err(CwltError::Usage(format!(
                    "no recovered_k*.csv files under {}",
                    run.display()
                )));
            }
            let rows = trimmed_rmse_rows(&truth_rows, &est_rows)?;
            let mean = rows.iter().sum::<f64>() / rows.len() as f64;
            let report = serde_json::json!({"rmse_recovery": mean, "per_component": rows});
            if let Some(path) = out {
                io::write_json(&path, &report)?;
            }
            println!("{report}");
        }
        Command::Experiment {
            name,
            sigma,
            model,
            snr,
            seed,
            repeats,
            nfreq,
            threshold,
            smooth,
            bounds,
            window,
            out,
        } => {
            let which: Builtin = name.parse()?;
            let mut cfg = ExperimentConfig::new(which, sigma.parse()?, model.parse()?);
            cfg.snr_db = snr;
            cfg.seed = seed;
            cfg.repeats = repeats;
            cfg.threshold = threshold;
            cfg.tau0 = window.tau0;
            cfg.mu = window.mu;
            cfg.write_bounds = bounds;
            if let Some(nf) = nfreq {
                cfg.n_freq = nf;
            }
            if let Some(sm) = smooth {
                cfg.smooth_len = sm;
            }
            let summary = run_experiment(&cfg, Some(&out))?;
            for (name, v) in &summary.rmse_recovery {
                println!("recovery rmse [{name}] = {v:.6}");
            }
            for (name, v) in &summary.rmse_if {
                println!("if rmse [{name}] = {v:.6}");
            }
            println!("wrote experiment to {}", out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ CwltError::Usage(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
