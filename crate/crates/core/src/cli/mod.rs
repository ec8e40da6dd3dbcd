//! Command-line front end. Settings come from an optional `key = value` file
//! given by `--config`, then from flags, which take precedence.

mod run;
mod spec;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::Error;

pub use run::{
    default_t_max, fmt_num, run, run_sweep, write_double_csv, write_kernel_csv, write_single_csv,
    RunOutcome, SweepOutcome, DOUBLE_HEADER, KERNEL_HEADER, SINGLE_HEADER, SWEEP_HEADER,
};
pub use spec::{
    parse_points, parse_real, RunSpec, Scenario, SpecBuilder, SweepAxis, SweepPoint, SweepSpec,
    DEFAULT_STRIDE,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_SPEC: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "jcretard",
    version,
    about = "Two-atom entanglement in multimode cavities: collapse, revival and sudden death"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// One excitation per atom-cavity pair.
    Single(SingleArgs),
    /// Both atoms excited, with a ground-state admixture.
    Double(DoubleArgs),
    /// Mode-summed memory kernel K(τ).
    Kernel(Common),
    /// One run per value of a parameter, executed in parallel.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// Flat `key = value` file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Mixing angle; accepts multiples of pi such as `pi/6`.
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<String>,
    /// Modes per cavity (odd).
    #[arg(long)]
    modes: Option<String>,
    /// Cavity length in atomic wavelengths.
    #[arg(long)]
    length_ratio: Option<String>,
    /// Atomic frequency in units of the vacuum Rabi frequency.
    #[arg(long)]
    omega_a: Option<String>,
    #[arg(long, value_parser = ["uniform", "sqrtfreq"])]
    profile: Option<String>,
    /// End time; defaults to five retardation times (two Rabi periods for one mode).
    #[arg(long, allow_hyphen_values = true)]
    tmax: Option<String>,
    /// Integration step (kernel: sample spacing).
    #[arg(long, allow_hyphen_values = true)]
    dt: Option<String>,
    /// Steps between written samples.
    #[arg(long)]
    stride: Option<String>,
    /// Output CSV (sweep: output directory).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SingleArgs {
    #[command(flatten)]
    common: Common,
    /// Which pair starts entangled.
    #[arg(long, value_parser = ["atoms", "fields"])]
    initial: Option<String>,
}

#[derive(Debug, Args)]
struct DoubleArgs {
    #[command(flatten)]
    common: Common,
    /// Which of |e1e2> and |g1g2> carries sin(theta).
    #[arg(long, value_parser = ["printed", "swapped"])]
    angle_convention: Option<String>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_parser = ["theta", "n_modes", "length_ratio", "omega_a"])]
    axis: Option<String>,
    /// Comma-separated values; n_modes values may be written `n@length`.
    #[arg(long, allow_hyphen_values = true)]
    values: Option<String>,
    /// Run type at each value.
    #[arg(long, value_parser = ["single-atoms", "single-fields", "double"])]
    scenario: Option<String>,
    #[arg(long, value_parser = ["atoms", "fields"])]
    initial: Option<String>,
    #[arg(long, value_parser = ["printed", "swapped"])]
    angle_convention: Option<String>,
}

impl Common {
    fn settings(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        let mut push = |key, v: &Option<String>| {
            if let Some(v) = v {
                out.push((key, v.clone()));
            }
        };
        push("theta", &self.theta);
        push("n_modes", &self.modes);
        push("length_ratio", &self.length_ratio);
        push("omega_a", &self.omega_a);
        push("profile", &self.profile);
        push("t_max", &self.tmax);
        push("dt", &self.dt);
        push("stride", &self.stride);
        if let Some(p) = &self.out {
            out.push(("out", p.to_string_lossy().into_owned()));
        }
        out
    }
}

fn optional(pairs: &mut Vec<(&'static str, String)>, key: &'static str, v: &Option<String>) {
    if let Some(v) = v {
        pairs.push((key, v.clone()));
    }
}

impl Command {
    fn parts(&self) -> (Scenario, &Common, Vec<(&'static str, String)>) {
        match self {
            Command::Single(a) => {
                let mut s = a.common.settings();
                optional(&mut s, "initial", &a.initial);
                (Scenario::SingleAtoms, &a.common, s)
            }
            Command::Double(a) => {
                let mut s = a.common.settings();
                optional(&mut s, "angle_convention", &a.angle_convention);
                (Scenario::Double, &a.common, s)
            }
            Command::Kernel(c) => (Scenario::Kernel, c, c.settings()),
            Command::Sweep(a) => {
                let mut s = a.common.settings();
                optional(&mut s, "axis", &a.axis);
                optional(&mut s, "values", &a.values);
                optional(&mut s, "scenario", &a.scenario);
                optional(&mut s, "initial", &a.initial);
                optional(&mut s, "angle_convention", &a.angle_convention);
                (Scenario::Sweep, &a.common, s)
            }
        }
    }
}

/// Exit status for a failed run.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::NonFinite { .. } => EXIT_NUMERIC,
        _ => EXIT_SPEC,
    }
}

pub fn build_spec(cli: &Cli) -> Result<RunSpec, Error> {
    let (scenario, common, settings) = cli.command.parts();
    let mut builder = SpecBuilder::default();
    if let Some(path) = &common.config {
        builder.load_file(path)?;
    }
    for (key, value) in &settings {
        builder.set(key, value)?;
    }
    builder.build(scenario)
}

/// Parses `args`, runs, and reports to `out`/`err`. Returns the exit status.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    let result = build_spec(&cli).and_then(|spec| {
        if spec.scenario == Scenario::Sweep {
            run_sweep(&spec).map(|o| o.to_string())
        } else {
            run(&spec).map(|o| o.to_string())
        }
    });
    match result {
        Ok(text) => {
            let _ = writeln!(out, "{text}");
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec_of(args: &[&str]) -> Result<RunSpec, Error> {
        build_spec(&Cli::try_parse_from(args).unwrap())
    }

    #[test]
    fn subcommands_map_to_scenarios() {
        assert_eq!(
            spec_of(&["jcretard", "single"]).unwrap().scenario,
            Scenario::SingleAtoms
        );
        assert_eq!(
            spec_of(&["jcretard", "single", "--initial", "fields"])
                .unwrap()
                .scenario,
            Scenario::SingleFields
        );
        let double = spec_of(&[
            "jcretard",
            "double",
            "--angle-convention",
            "swapped",
            "--modes",
            "1",
        ])
        .unwrap();
        assert_eq!(double.angle_convention, crate::AngleConvention::Swapped);
        assert_eq!(double.system.n_modes, 1);
        let sweep = spec_of(&[
            "jcretard",
            "sweep",
            "--axis",
            "theta",
            "--values",
            "pi/4,pi/6",
            "--scenario",
            "double",
        ])
        .unwrap();
        let s = sweep.sweep.unwrap();
        assert_eq!(
            (s.base, s.axis, s.points.len()),
            (Scenario::Double, SweepAxis::Theta, 2)
        );
    }

    #[test]
    fn usage_errors_exit_with_two() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(
            run_cli(
                ["jcretard", "single", "--profile", "cubic"],
                &mut out,
                &mut err
            ),
            2
        );
        assert_eq!(run_cli(["jcretard", "teleport"], &mut out, &mut err), 2);
        err.clear();
        assert_eq!(
            run_cli(["jcretard", "single", "--modes", "4"], &mut out, &mut err),
            2
        );
        assert!(String::from_utf8(err).unwrap().contains("n_modes"));
    }

    #[test]
    fn numerical_failure_exits_with_three() {
        assert_eq!(exit_code(&Error::NonFinite { t: 1.0 }), 3);
        assert_eq!(exit_code(&Error::config("theta", "x")), 2);
    }
}
