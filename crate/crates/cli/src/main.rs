use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use pressplit::config::{parse_config, SimConfig};
use pressplit::experiments::{
    convergence_study, divergence_decay, lid_driven_cavity, probe_neumann_to_dirichlet, stability_sweep,
    verify_stokes_estimate, SampleSpec,
};
use pressplit::io::{self, Outcome, OutputDir};
use pressplit::presets::{BoundaryPreset, InitialPreset};
use pressplit::timestep::Simulation;
use pressplit::Error;

const EXIT_ERROR: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_BLOW_UP: u8 = 3;

/// Default amplitude of the divergence mode when the config does not set one.
const DECAY_AMPLITUDE: f64 = 1e-3;

#[derive(Parser, Debug)]
#[command(name = "pressplit", version, about = "Navier-Stokes with an explicit Euler/Stokes pressure split")]
struct Cli {
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Time-step the configured problem, writing diagnostics and snapshots.
    Run { config: PathBuf },
    /// Repeat the run for each time step in the list.
    SweepStability {
        config: PathBuf,
        #[arg(long, value_delimiter = ',')]
        dts: Option<Vec<f64>>,
    },
    /// Sample fields and fit the Stokes-pressure estimate.
    VerifyStokes {
        config: PathBuf,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Fit the decay rate of the velocity divergence.
    Decay { config: PathBuf },
    /// Manufactured-solution convergence orders.
    Converge { config: PathBuf },
    /// Lid-driven cavity to steady state.
    Cavity { config: PathBuf },
    /// Neumann-to-Dirichlet ratio in a boundary strip.
    ProbeN2d {
        config: PathBuf,
        #[arg(long = "s")]
        s: Option<f64>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Run { .. } => "run",
            Command::SweepStability { .. } => "sweep-stability",
            Command::VerifyStokes { .. } => "verify-stokes",
            Command::Decay { .. } => "decay",
            Command::Converge { .. } => "converge",
            Command::Cavity { .. } => "cavity",
            Command::ProbeN2d { .. } => "probe-n2d",
        }
    }

    fn config_path(&self) -> &Path {
        match self {
            Command::Run { config }
            | Command::SweepStability { config, .. }
            | Command::VerifyStokes { config, .. }
            | Command::Decay { config }
            | Command::Converge { config }
            | Command::Cavity { config }
            | Command::ProbeN2d { config, .. } => config,
        }
    }
}

enum Failure {
    Config(Error),
    Run(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config { .. } | Error::UnknownKeys(_) | Error::InvalidParameter { .. } | Error::GridTooCoarse { .. } => {
                Failure::Config(e)
            }
            e => Failure::Run(e),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match parse_config(cli.command.config_path()) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let mut out = match OutputDir::create(&cli.out) {
        Ok(out) => out,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_ERROR);
        }
    };
    let result = execute(&cli.command, &cfg, &mut out);
    let (outcome, code) = match &result {
        Ok(Outcome::Completed) => (Outcome::Completed, 0),
        Ok(blew @ Outcome::BlewUp { .. }) => (blew.clone(), EXIT_BLOW_UP),
        Ok(Outcome::Error { message }) => (Outcome::Error { message: message.clone() }, EXIT_ERROR),
        Err(Failure::Config(e)) => (Outcome::Error { message: e.to_string() }, EXIT_CONFIG),
        Err(Failure::Run(Error::BlowUp { step, t })) => (Outcome::BlewUp { step: *step, t: *t }, EXIT_BLOW_UP),
        Err(Failure::Run(e)) => (Outcome::Error { message: e.to_string() }, EXIT_ERROR),
    };
    if let Outcome::Error { message } = &outcome {
        eprintln!("error: {message}");
    }
    if let Err(e) = out.finish(cli.command.name(), cfg.to_json(), args_json(&cli.command), outcome) {
        eprintln!("error: writing manifest: {e}");
        return ExitCode::from(EXIT_ERROR);
    }
    ExitCode::from(code)
}

fn args_json(command: &Command) -> Value {
    match command {
        Command::SweepStability { dts, .. } => json!({"dts": dts}),
        Command::VerifyStokes { samples, seed, .. } => json!({"samples": samples, "seed": seed}),
        Command::ProbeN2d { s, .. } => json!({"s": s}),
        _ => json!({}),
    }
}

fn execute(command: &Command, cfg: &SimConfig, out: &mut OutputDir) -> Result<Outcome, Failure> {
    match command {
        Command::Run { .. } => run(cfg, out),
        Command::SweepStability { dts, .. } => sweep(cfg, dts.as_deref(), out),
        Command::VerifyStokes { samples, seed, .. } => stokes(cfg, *samples, *seed, out),
        Command::Decay { .. } => decay(cfg, out),
        Command::Converge { .. } => converge(cfg, out),
        Command::Cavity { .. } => cavity(cfg, out),
        Command::ProbeN2d { s, .. } => probe(cfg, *s, out),
    }
}

fn run(cfg: &SimConfig, out: &mut OutputDir) -> Result<Outcome, Failure> {
    let sim = Simulation::new(cfg)?;
    let result = sim.run(|snap| out.write_snapshot(snap))?;
    out.write("diagnostics.csv", io::diagnostics_csv(&result.series).as_bytes())?;
    let summary = json!({
        "steps": result.series.len() - 1,
        "t": result.final_state.t,
        "final_energy": result.series.last().map(|d| d.energy),
        "incompatible_steps": result.incompatible_steps,
        "blow_up": result.blow_up,
    });
    out.write_json("summary.json", &summary)?;
    Ok(match result.blow_up {
        Some(b) => Outcome::BlewUp { step: b.step, t: b.t },
        None => Outcome::Completed,
    })
}

fn sweep(cfg: &SimConfig, dts: Option<&[f64]>, out: &mut OutputDir) -> Result<Outcome, Failure> {
    let dts = dts.unwrap_or(&cfg.study.dts);
    if dts.is_empty() || dts.iter().any(|&d| !(d > 0.0 && d.is_finite())) {
        return Err(Failure::Config(Error::InvalidParameter {
            name: "dts".into(),
            reason: "every time step must be finite and > 0".into(),
        }));
    }
    let table = stability_sweep(cfg, dts)?;
    out.write("stability.csv", io::stability_csv(&table).as_bytes())?;
    out.write_json(
        "stability.json",
        &json!({
            "nu": cfg.nu,
            "grid": [cfg.grid.nx(), cfg.grid.ny()],
            "t_end": cfg.t_end,
            "dts": dts,
            "spans_three_decades": table.spans_three_decades,
            "blow_ups": table.blow_ups(),
            "sup_spread": table.sup_spread(),
            "rows": table.rows,
        }),
    )?;
    if !table.spans_three_decades {
        eprintln!("note: time steps span less than three decades");
    }
    Ok(match table.rows.iter().find(|r| r.blew_up) {
        Some(r) => Outcome::BlewUp {
            step: r.blow_up_step.unwrap_or(0),
            t: r.blow_up_step.unwrap_or(0) as f64 * r.dt,
        },
        None => Outcome::Completed,
    })
}

fn stokes(cfg: &SimConfig, samples: Option<usize>, seed: Option<u64>, out: &mut OutputDir) -> Result<Outcome, Failure> {
    let st = &cfg.study;
    let spec = SampleSpec {
        family: st.family,
        modes: st.modes,
        amplitude_exponent: st.amplitude_exponent,
        seed: seed.unwrap_or(cfg.seed),
        divergence_free: st.divergence_free,
        count: samples.unwrap_or(st.samples),
    };
    if spec.count == 0 {
        return Err(Failure::Config(Error::InvalidParameter {
            name: "samples".into(),
            reason: "must be >= 1".into(),
        }));
    }
    let study = verify_stokes_estimate(&spec, cfg.grid)?;
    out.write("stokes.csv", io::stokes_csv(&study).as_bytes())?;
    let h = cfg.grid.hx().max(cfg.grid.hy());
    out.write_json(
        "stokes.json",
        &json!({
            "family": spec.family.name(),
            "modes": spec.modes,
            "amplitude_exponent": spec.amplitude_exponent,
            "seed": spec.seed,
            "divergence_free": spec.divergence_free,
            "fit": study.fit,
            "ratio_bound": 1.0 + 10.0 * h * h,
        }),
    )?;
    if !study.fit.reportable {
        eprintln!("note: fewer than {} samples; the fit is not reportable", pressplit::experiments::stokes::MIN_FIT_SAMPLES);
    }
    Ok(Outcome::Completed)
}

fn decay(cfg: &SimConfig, out: &mut OutputDir) -> Result<Outcome, Failure> {
    let amplitude = match cfg.initial {
        InitialPreset::DivergenceMode { amplitude } => amplitude,
        _ => DECAY_AMPLITUDE,
    };
    let result = divergence_decay(amplitude, cfg.grid, cfg.nu, cfg.dt, cfg.study.window)?;
    out.write("decay.csv", io::decay_csv(&result).as_bytes())?;
    let expected = cfg.nu * std::f64::consts::PI.powi(2);
    out.write_json(
        "decay.json",
        &json!({
            "amplitude": amplitude,
            "nu": cfg.nu,
            "dt": cfg.dt,
            "grid": [cfg.grid.nx(), cfg.grid.ny()],
            "window": result.window,
            "rate_hat": result.rate_hat,
            "expected_rate": expected,
            "relative_error": result.rate_hat.map(|r| r / expected - 1.0),
            "tolerance": 0.05,
        }),
    )?;
    Ok(Outcome::Completed)
}

fn converge(cfg: &SimConfig, out: &mut OutputDir) -> Result<Outcome, Failure> {
    let st = &cfg.study;
    let result = convergence_study(cfg.nu, &st.grids, st.spatial_dt, &st.temporal_dts, st.temporal_n, st.t_final)?;
    out.write("convergence.csv", io::convergence_csv(&result).as_bytes())?;
    out.write_json(
        "convergence.json",
        &json!({
            "nu": cfg.nu,
            "t_final": st.t_final,
            "spatial_order": result.spatial_order,
            "temporal_order": result.temporal_order,
            "target_spatial_order": 2.0,
            "target_temporal_order": 1.0,
            "tolerance": 0.3,
        }),
    )?;
    Ok(Outcome::Completed)
}

fn cavity(cfg: &SimConfig, out: &mut OutputDir) -> Result<Outcome, Failure> {
    let BoundaryPreset::Lid { speed } = cfg.bc else {
        return Err(Failure::Config(Error::Config {
            path: "bc.preset".into(),
            message: "the cavity study needs the lid preset".into(),
        }));
    };
    let result = lid_driven_cavity(speed, cfg.nu, cfg.grid, cfg.dt, cfg.t_end, cfg.study.steady_tol)?;
    out.write("cavity.csv", io::cavity_csv(&result).as_bytes())?;
    out.write("diagnostics.csv", io::diagnostics_csv(&result.series).as_bytes())?;
    out.write_vorticity(result.steps, &result.velocity)?;
    out.write_json(
        "cavity.json",
        &json!({
            "speed": speed,
            "nu": cfg.nu,
            "speed_over_nu": speed / cfg.nu,
            "grid": [cfg.grid.nx(), cfg.grid.ny()],
            "dt": cfg.dt,
            "steady": result.steady,
            "steady_tol": cfg.study.steady_tol,
            "steps": result.steps,
            "t": result.t,
            "change_rate": result.change_rate,
            "energy": result.energy,
            "max_div_interior": result.max_div_interior,
            "max_div_all": result.max_div_all,
        }),
    )?;
    if !result.steady {
        eprintln!("note: no steady state by t = {}", result.t);
    }
    Ok(Outcome::Completed)
}

fn probe(cfg: &SimConfig, s: Option<f64>, out: &mut OutputDir) -> Result<Outcome, Failure> {
    let st = &cfg.study;
    let s = s.unwrap_or(st.s);
    let result = probe_neumann_to_dirichlet(s, st.samples, cfg.grid, cfg.seed, st.modes)?;
    out.write("probe.csv", io::probe_csv(&result).as_bytes())?;
    out.write_json(
        "probe.json",
        &json!({
            "s": s,
            "samples": st.samples,
            "seed": cfg.seed,
            "modes": st.modes,
            "grid": [result.nx, result.ny],
            "max_ratio": result.max_ratio,
            "mean_ratio": result.mean_ratio,
        }),
    )?;
    Ok(Outcome::Completed)
}
