use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use spinsense::dephasing::DephasingModel;
use spinsense::dicke::{Vec3, C64};
use spinsense::metrology::{
    cat_readout_probability, frame_from_moments, noiseless_moments, optimize_chi,
};
use spinsense::protocol::{cat_fidelity, prepare_cat, readout_phase, PrepMode};
use spinsense::states::{StateKind, StateSpec};
use spinsense::sweep::{emit_csv, emit_plot, fit_rows, parse_csv, run_sweep, SweepSpec};
use spinsense::{Error, Result};

#[derive(Parser)]
#[command(name = "spinsense", version, about = "Field sensing with entangled spin ensembles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Moments, squeezing parameter and frame axes of a probe state.
    State(StateArgs),
    /// Evaluate a sweep over ensemble sizes and write CSV (and SVG).
    Sweep(SweepArgs),
    /// Log-log fit of two CSV columns.
    Fit(FitArgs),
    /// Simulate cat preparation and readout on the joint register.
    Protocol(ProtocolArgs),
}

#[derive(Args)]
struct StateArgs {
    #[arg(long)]
    kind: String,
    #[arg(long)]
    n: usize,
    /// Complex parameter as RE,IM.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    z: Option<C64>,
    #[arg(long, conflicts_with = "chi_opt")]
    chi: Option<f64>,
    #[arg(long)]
    chi_opt: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    plot: Option<PathBuf>,
    /// Worker count; defaults to the number of logical processors.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct FitArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value = "N")]
    x: String,
    #[arg(long, default_value = "delta_omega")]
    y: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Ideal,
    TimeDomain,
}

#[derive(Args)]
struct ProtocolArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    z: C64,
    #[arg(long, value_enum, default_value = "ideal")]
    mode: Mode,
    /// Rabi frequency over g1 in time-domain mode.
    #[arg(long, default_value_t = 0.05)]
    rabi_ratio: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    omega_t: f64,
    #[arg(long, default_value_t = 0.0)]
    gamma_t: f64,
}

fn parse_complex(s: &str) -> std::result::Result<C64, String> {
    let (re, im) = s.split_once(',').unwrap_or((s, "0"));
    let re: f64 = re.trim().parse().map_err(|_| format!("bad real part '{re}'"))?;
    let im: f64 = im.trim().parse().map_err(|_| format!("bad imaginary part '{im}'"))?;
    Ok(C64::new(re, im))
}

fn vec_json(v: &Vec3) -> Value {
    json!([v.x, v.y, v.z])
}

fn cmd_state(args: StateArgs) -> Result<Value> {
    let kind: StateKind = args.kind.parse()?;
    let z = args.z.unwrap_or(C64::new(1.0, 0.0));
    let chi = match (args.chi, args.chi_opt) {
        (_, true) => optimize_chi(kind, z, args.n)?.chi,
        (Some(c), false) => c,
        (None, false) if kind.uses_chi() => {
            return Err(Error::Config(format!(
                "{} states need --chi or --chi-opt",
                kind.as_str()
            )))
        }
        (None, false) => 0.0,
    };
    let spec = StateSpec {
        kind,
        z,
        chi,
        n_qubits: args.n,
    };
    let moments = noiseless_moments(&spec.build()?)?;
    let cov = moments.covariance();
    let mut out = json!({
        "kind": kind.as_str(),
        "n": args.n,
        "mean": vec_json(&moments.first),
        "covariance": (0..3).map(|i| json!([cov[(i, 0)], cov[(i, 1)], cov[(i, 2)]])).collect::<Vec<_>>(),
    });
    if kind.uses_z() {
        out["z"] = json!([z.re, z.im]);
    }
    if kind.uses_chi() {
        out["chi"] = json!(chi);
    }
    match frame_from_moments(&moments) {
        Ok(f) => {
            out["xi2"] = json!(f.xi2);
            out["mean_m"] = json!(f.mean_m);
            out["var_r"] = json!(f.var_r);
            out["var_n"] = json!(f.var_n);
            out["axes"] = json!({"m": vec_json(&f.m), "r": vec_json(&f.r), "n": vec_json(&f.n)});
        }
        Err(Error::NoMeanSpin(norm)) => {
            out["xi2"] = Value::Null;
            out["axes"] = Value::Null;
            out["note"] = json!(format!("no mean spin (|<J>| = {norm:e})"));
        }
        Err(e) => return Err(e),
    }
    Ok(out)
}

fn cmd_sweep(args: SweepArgs) -> Result<Value> {
    let spec = SweepSpec::from_path(&args.config)?;
    let out = args
        .out
        .or_else(|| spec.outputs.csv.clone())
        .ok_or_else(|| Error::Config("no CSV output path (--out)".into()))?;
    let plot = args.plot.or_else(|| spec.outputs.plot.clone());
    if args.jobs == Some(0) {
        return Err(Error::Config("--jobs must be at least 1".into()));
    }
    let rows = run_sweep(&spec, args.jobs.unwrap_or(0))?;
    emit_csv(&rows, &out)?;
    if let Some(p) = &plot {
        emit_plot(&rows, p)?;
    }
    let failed = rows.iter().filter(|r| !r.is_ok()).count();
    Ok(json!({
        "rows": rows.len(),
        "failed": failed,
        "csv": out.display().to_string(),
        "plot": plot.map(|p| p.display().to_string()),
    }))
}

fn cmd_fit(args: FitArgs) -> Result<Value> {
    let rows = parse_csv(&args.input)?;
    let fit = fit_rows(&rows, &args.x, &args.y)?;
    serde_json::to_value(fit).map_err(|e| Error::Numerical(e.to_string()))
}

fn cmd_protocol(args: ProtocolArgs) -> Result<Value> {
    let mode = match args.mode {
        Mode::Ideal => PrepMode::Ideal,
        Mode::TimeDomain => PrepMode::TimeDomain {
            rabi_ratio: args.rabi_ratio,
        },
    };
    let prep = prepare_cat(args.n, args.z, mode)?;
    let fidelity = cat_fidelity(&prep.state, args.z)?;
    // unit exposure time: omega_t and gamma_t enter as given
    let model = DephasingModel::gaussian(args.gamma_t, Vec3::z());
    let p_plus = readout_phase(&prep.state, args.omega_t, 1.0, &model, args.z)?;
    let p_ideal = cat_readout_probability(args.z, args.n, args.omega_t, 1.0, &model)?;
    if let Some(w) = &prep.warning {
        eprintln!("warning: {w}");
    }
    Ok(json!({
        "n": args.n,
        "z": [args.z.re, args.z.im],
        "mode": match args.mode { Mode::Ideal => "ideal", Mode::TimeDomain => "time-domain" },
        "prep_fidelity": fidelity,
        "p_plus": p_plus,
        "p_plus_ideal_cat": p_ideal,
        "warning": prep.warning,
    }))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::State(a) => cmd_state(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Fit(a) => cmd_fit(a),
        Command::Protocol(a) => cmd_protocol(a),
    };
    match result {
        Ok(v) => {
            println!("{}", serde_json::to_string_pretty(&v).unwrap_or_default());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
