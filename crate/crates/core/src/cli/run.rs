use std::f64::consts::TAU;
use std::fmt;
use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rayon::prelude::*;

use super::spec::{RunSpec, Scenario, SweepPoint};
use crate::double::DoubleExcSystem;
use crate::error::{Error, Result};
use crate::integrator::{default_step, integrate, run_step, StepPlan, Trajectory};
use crate::model::{build_mode_grid, retardation_time, SystemConfig};
use crate::records::{record_double, record_single, DoubleRecord, Record, SingleRecord};
use crate::retardation::{
    default_min_gap, detect_revivals, kernel_peaks, kernel_samples, RevivalReport, DEFAULT_FLOOR,
};
use crate::single::{init_atoms_entangled, init_fields_entangled, SingleExcSystem};

pub const SINGLE_HEADER: [&str; 11] = [
    "t",
    "c_ab",
    "pop1",
    "pop2",
    "pop_cav_a",
    "pop_cav_b",
    "norm",
    "re_c1",
    "im_c1",
    "re_c2",
    "im_c2",
];
pub const DOUBLE_HEADER: [&str; 8] = ["t", "c_ab", "p11", "p2", "p3", "p4", "p00", "norm"];
pub const KERNEL_HEADER: [&str; 4] = ["tau", "re_k", "im_k", "abs_k"];
pub const SWEEP_HEADER: [&str; 3] = ["value", "first_revival_peak", "first_dead_start"];

/// Five retardation times, or two vacuum Rabi periods for a single mode.
pub fn default_t_max(cfg: &SystemConfig) -> Result<f64> {
    if cfg.n_modes > 1 {
        Ok(5.0 * retardation_time(cfg)?)
    } else {
        cfg.validate()?;
        Ok(2.0 * TAU)
    }
}

/// Shortest round-trip decimal, switching to exponent form outside
/// `[1e-4, 1e15)` so tiny amplitudes stay compact.
pub fn fmt_num(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

fn write_rows<W: Write, const N: usize>(
    w: W,
    header: [&str; N],
    rows: impl Iterator<Item = [f64; N]>,
) -> Result<()> {
    let mut out = csv_writer(w);
    out.write_record(header).map_err(io::Error::from)?;
    for row in rows {
        out.write_record(row.map(fmt_num))
            .map_err(io::Error::from)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_single_csv<W: Write>(w: W, traj: &Trajectory<SingleRecord>) -> Result<()> {
    write_rows(
        w,
        SINGLE_HEADER,
        traj.iter().map(|(t, r)| {
            let o = &r.obs;
            [
                t,
                r.concurrence,
                o.pop1,
                o.pop2,
                o.pop_a,
                o.pop_b,
                o.norm,
                r.c1.re,
                r.c1.im,
                r.c2.re,
                r.c2.im,
            ]
        }),
    )
}

pub fn write_double_csv<W: Write>(w: W, traj: &Trajectory<DoubleRecord>) -> Result<()> {
    write_rows(
        w,
        DOUBLE_HEADER,
        traj.iter().map(|(t, r)| {
            let o = &r.obs;
            [t, r.concurrence, o.p11, o.p2, o.p3, o.p4, o.p00, o.norm]
        }),
    )
}

pub fn write_kernel_csv<W: Write>(w: W, samples: &[(f64, Complex64)]) -> Result<()> {
    write_rows(
        w,
        KERNEL_HEADER,
        samples.iter().map(|&(tau, k)| [tau, k.re, k.im, k.norm()]),
    )
}

fn create(path: &Path) -> Result<io::BufWriter<File>> {
    File::create(path)
        .map(io::BufWriter::new)
        .map_err(|e| Error::config("out", format!("cannot write {}: {e}", path.display())))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub scenario: Scenario,
    pub system: SystemConfig,
    pub path: PathBuf,
    pub t_max: f64,
    pub dt: f64,
    pub samples: usize,
    /// Absent for a single mode.
    pub retardation_time: Option<f64>,
    /// Initial and final concurrence; absent for kernel runs.
    pub concurrence: Option<(f64, f64)>,
    pub report: Option<RevivalReport>,
    pub kernel_peaks: Vec<(f64, f64)>,
}

/// Executes one non-sweep scenario and writes its CSV to `spec.out_path()`.
pub fn run(spec: &RunSpec) -> Result<RunOutcome> {
    spec.validate()?;
    if spec.scenario == Scenario::Sweep {
        return Err(Error::config("scenario", "use the sweep runner for sweeps"));
    }
    run_one(spec, spec.scenario, &spec.system, &spec.out_path())
}

fn run_one(
    spec: &RunSpec,
    scenario: Scenario,
    cfg: &SystemConfig,
    path: &Path,
) -> Result<RunOutcome> {
    let grid = build_mode_grid(cfg)?;
    let t_max = match spec.t_max {
        Some(t) => t,
        None => default_t_max(cfg)?,
    };
    let dt = match (spec.dt, scenario) {
        (Some(dt), _) => dt,
        (None, Scenario::Kernel) => default_step(&grid),
        (None, Scenario::Double) => run_step(&DoubleExcSystem::new(grid.clone())),
        (None, _) => run_step(&SingleExcSystem::new(grid.clone())),
    };
    let tr = (cfg.n_modes > 1)
        .then(|| retardation_time(cfg))
        .transpose()?;
    let plan = StepPlan::new(t_max, dt, spec.sample_stride);
    let mut outcome = RunOutcome {
        scenario,
        system: *cfg,
        path: path.to_path_buf(),
        t_max,
        dt,
        samples: 0,
        retardation_time: tr,
        concurrence: None,
        report: None,
        kernel_peaks: Vec::new(),
    };

    match scenario {
        Scenario::Kernel => {
            let samples = kernel_samples(&grid, t_max, dt)?;
            let mut file = create(path)?;
            write_kernel_csv(&mut file, &samples)?;
            outcome.samples = samples.len();
            outcome.kernel_peaks = kernel_peaks(&samples);
            return Ok(outcome);
        }
        Scenario::SingleAtoms | Scenario::SingleFields => {
            let init = if scenario == Scenario::SingleAtoms {
                init_atoms_entangled(cfg.theta, &grid)
            } else {
                init_fields_entangled(cfg.theta, &grid)
            };
            let sys = SingleExcSystem::new(grid);
            let (traj, _) = integrate(&sys, &init, &plan, |_, s| record_single(s))?;
            let mut file = create(path)?;
            write_single_csv(&mut file, &traj)?;
            summarise(&mut outcome, &traj)?;
        }
        Scenario::Double => {
            let init = spec.angle_convention.init(cfg.theta, &grid);
            let sys = DoubleExcSystem::new(grid);
            let (traj, _) = integrate(&sys, &init, &plan, |_, s| record_double(s))?;
            let mut file = create(path)?;
            write_double_csv(&mut file, &traj)?;
            summarise(&mut outcome, &traj)?;
        }
        Scenario::Sweep => unreachable!("sweeps are dispatched by run_sweep"),
    }
    Ok(outcome)
}

fn summarise<R: Record>(outcome: &mut RunOutcome, traj: &Trajectory<R>) -> Result<()> {
    let first = traj.records.first().ok_or(Error::EmptyTrajectory)?;
    let last = traj.records.last().ok_or(Error::EmptyTrajectory)?;
    let mut report = detect_revivals(traj, DEFAULT_FLOOR, default_min_gap(&outcome.system)?)?;
    if let Some(tr) = outcome.retardation_time {
        report = report.with_predicted_period(tr);
    }
    outcome.samples = traj.len();
    outcome.concurrence = Some((first.concurrence(), last.concurrence()));
    outcome.report = Some(report);
    Ok(())
}

impl fmt::Display for RunOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cfg = &self.system;
        writeln!(f, "scenario        {}", self.scenario)?;
        writeln!(
            f,
            "system          n_modes {}  omega_a {}  length_ratio {}  profile {}  theta {:.6}",
            cfg.n_modes, cfg.omega_a, cfg.length_ratio, cfg.coupling_profile, cfg.theta
        )?;
        match self.retardation_time {
            Some(tr) => writeln!(f, "retardation     t_r {tr:.6}")?,
            None => writeln!(f, "retardation     none (single mode)")?,
        }
        writeln!(
            f,
            "grid            t_max {:.6}  dt {}  samples {}",
            self.t_max,
            fmt_num(self.dt),
            self.samples
        )?;
        if let Some((c0, c1)) = self.concurrence {
            writeln!(f, "concurrence     initial {c0:.6}  final {c1:.6}")?;
        }
        if let Some(report) = &self.report {
            let later: Vec<_> = report.later_revivals().collect();
            if later.is_empty() {
                writeln!(f, "revivals        none")?;
            } else {
                writeln!(f, "revivals        onset      peak_time  peak")?;
                for r in later {
                    writeln!(
                        f,
                        "                {:<10.6} {:<10.6} {:.6}",
                        r.onset, r.peak_time, r.peak
                    )?;
                }
            }
            if report.dead_intervals.is_empty() {
                writeln!(f, "dead intervals  none")?;
            } else {
                writeln!(f, "dead intervals  start      end")?;
                for (s, e) in &report.dead_intervals {
                    writeln!(f, "                {s:<10.6} {e:.6}")?;
                }
            }
        }
        if self.scenario == Scenario::Kernel {
            if self.kernel_peaks.is_empty() {
                writeln!(f, "kernel peaks    none")?;
            } else {
                writeln!(f, "kernel peaks    tau        |K|")?;
                for (tau, k) in &self.kernel_peaks {
                    writeln!(f, "                {tau:<10.6} {k:.6}")?;
                }
            }
        }
        write!(f, "wrote           {}", self.path.display())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    pub summary_path: PathBuf,
    pub points: Vec<SweepPoint>,
    pub runs: Vec<RunOutcome>,
}

impl SweepOutcome {
    /// `(value, first revival peak, first dead-interval start)` per point.
    pub fn rows(&self) -> impl Iterator<Item = (SweepPoint, Option<f64>, Option<f64>)> + '_ {
        self.points.iter().zip(&self.runs).map(|(p, run)| {
            let report = run.report.as_ref();
            (
                *p,
                report.and_then(|r| r.first_revival()).map(|r| r.peak),
                report.and_then(|r| r.dead_intervals.first()).map(|d| d.0),
            )
        })
    }
}

/// Runs every sweep value in parallel. `spec.out_path()` is a directory that
/// receives one CSV per value and `summary.csv`.
pub fn run_sweep(spec: &RunSpec) -> Result<SweepOutcome> {
    spec.validate()?;
    let sweep = spec
        .sweep
        .as_ref()
        .ok_or_else(|| Error::config("axis", "not a sweep"))?;
    let dir = spec.out_path();
    std::fs::create_dir_all(&dir)
        .map_err(|e| Error::config("out", format!("cannot create {}: {e}", dir.display())))?;

    let runs = sweep
        .points
        .par_iter()
        .enumerate()
        .map(|(i, point)| {
            let cfg = sweep.axis.apply(&spec.system, point)?;
            let path = dir.join(format!("{}_{:03}.csv", sweep.axis, i));
            run_one(spec, sweep.base, &cfg, &path)
        })
        .collect::<Result<Vec<_>>>()?;

    let outcome = SweepOutcome {
        summary_path: dir.join("summary.csv"),
        points: sweep.points.clone(),
        runs,
    };
    let mut out = csv_writer(create(&outcome.summary_path)?);
    out.write_record(SWEEP_HEADER).map_err(io::Error::from)?;
    let opt = |x: Option<f64>| x.map(fmt_num).unwrap_or_default();
    for (point, peak, dead) in outcome.rows() {
        out.write_record([point.to_string(), opt(peak), opt(dead)])
            .map_err(io::Error::from)?;
    }
    out.flush()?;
    Ok(outcome)
}

impl fmt::Display for SweepOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "value                first_revival_peak  first_dead_start  initial_c  file"
        )?;
        let opt = |x: Option<f64>| x.map(|v| format!("{v:.6}")).unwrap_or_else(|| "-".into());
        for ((point, peak, dead), run) in self.rows().zip(&self.runs) {
            let c0 = run.concurrence.map(|c| c.0);
            writeln!(
                f,
                "{:<20} {:<19} {:<17} {:<10} {}",
                point.to_string(),
                opt(peak),
                opt(dead),
                opt(c0),
                run.path.display()
            )?;
        }
        write!(f, "wrote                {}", self.summary_path.display())
    }
}
