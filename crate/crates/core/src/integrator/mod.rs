//! Fixed-step classic Runge-Kutta integration of the linear amplitude
//! equations, with observables sampled into a [`Trajectory`].

mod expm;

pub use expm::{dense_generator, expm_oracle, DenseGenerator, ORACLE_DIM_CAP};

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::ModeGrid;
use crate::state::{Amplitudes, LinearSystem};

/// Largest `|λ|·dt` on the imaginary axis for which classic RK4 is stable.
pub const RK4_IMAG_STABILITY: f64 = 2.0 * std::f64::consts::SQRT_2;

/// Steps per fastest oscillation used by [`default_step`].
pub const STEPS_PER_PERIOD: f64 = 50.0;

/// Step with at least [`STEPS_PER_PERIOD`] steps per fastest oscillation.
/// The fastest secular scale is the larger of the band edge `max|Δ|` and the
/// collective coupling `sqrt(Σg²)`.
pub fn default_step(grid: &ModeGrid) -> f64 {
    let fastest = grid.max_detuning().max(grid.collective_coupling());
    TAU / fastest / STEPS_PER_PERIOD
}

/// Step used by scenario runs when none is given: half of [`default_step`],
/// reduced further in proportion to the sector's spectral bound relative to
/// the single-excitation one. RK4 norm loss per unit time scales as `dt⁵`,
/// and at the full default step the widest grids lose a few parts in 10⁶
/// over five retardation times.
pub fn run_step<L: LinearSystem>(system: &L) -> f64 {
    let grid = system.grid();
    let single_bound = grid.max_detuning() + grid.collective_coupling();
    default_step(grid) / 2.0 * (single_bound / system.spectral_bound()).min(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepPlan {
    pub t_max: f64,
    pub dt: f64,
    pub sample_stride: usize,
}

impl StepPlan {
    pub fn new(t_max: f64, dt: f64, sample_stride: usize) -> Self {
        StepPlan {
            t_max,
            dt,
            sample_stride,
        }
    }

    fn validate(&self, spectral_bound: f64) -> Result<()> {
        if !(self.t_max.is_finite() && self.t_max >= 0.0) {
            return Err(Error::config(
                "t_max",
                format!("must be finite and ≥ 0, got {}", self.t_max),
            ));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::config(
                "dt",
                format!("must be finite and positive, got {}", self.dt),
            ));
        }
        if self.sample_stride == 0 {
            return Err(Error::config("sample_stride", "must be at least 1"));
        }
        let bound = RK4_IMAG_STABILITY / spectral_bound;
        if self.dt > bound {
            return Err(Error::StepTooLarge { dt: self.dt, bound });
        }
        Ok(())
    }

    /// Number of full steps and the length of a trailing partial step that
    /// lands exactly on `t_max` (zero when `t_max` is a step multiple).
    fn schedule(&self) -> (usize, f64) {
        let ratio = self.t_max / self.dt;
        let full = (ratio + 1e-9).floor() as usize;
        let rem = self.t_max - full as f64 * self.dt;
        if rem > 1e-9 * self.dt {
            (full, rem)
        } else {
            (full, 0.0)
        }
    }
}

/// Observables sampled at strictly increasing times starting from zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<R> {
    pub times: Vec<f64>,
    pub records: Vec<R>,
}

impl<R> Trajectory<R> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &R)> {
        self.times.iter().copied().zip(&self.records)
    }

    pub fn map<Q>(&self, f: impl FnMut(&R) -> Q) -> Vec<Q> {
        self.records.iter().map(f).collect()
    }
}

/// Reusable RK4 stage buffers.
struct Rk4<S> {
    k: S,
    acc: S,
    probe: S,
}

impl<S: Amplitudes> Rk4<S> {
    fn new(zero: S) -> Self {
        Rk4 {
            k: zero.clone(),
            acc: zero.clone(),
            probe: zero,
        }
    }

    fn step<L>(&mut self, system: &L, x: &mut S, h: f64) -> Result<()>
    where
        L: LinearSystem<State = S>,
    {
        let half = 0.5 * h;
        let stages = [(half, 1.0), (half, 2.0), (h, 2.0), (0.0, 1.0)];
        self.probe.amps_mut().copy_from_slice(x.amps());
        self.acc
            .amps_mut()
            .iter_mut()
            .for_each(|a| *a = Complex64::new(0.0, 0.0));
        for (next, weight) in stages {
            system.deriv_into(&self.probe, &mut self.k)?;
            for ((a, k), (p, x0)) in self
                .acc
                .amps_mut()
                .iter_mut()
                .zip(self.k.amps())
                .zip(self.probe.amps_mut().iter_mut().zip(x.amps()))
            {
                *a += weight * k;
                *p = x0 + next * k;
            }
        }
        let sixth = h / 6.0;
        for (xi, a) in x.amps_mut().iter_mut().zip(self.acc.amps()) {
            *xi += sixth * a;
        }
        Ok(())
    }
}

/// Integrates `system` from `state0` to `plan.t_max`, calling `observe` at
/// `t = 0`, every `sample_stride` steps, and at `t_max`. Returns the sampled
/// trajectory and the final state.
pub fn integrate<L, R>(
    system: &L,
    state0: &L::State,
    plan: &StepPlan,
    mut observe: impl FnMut(f64, &L::State) -> R,
) -> Result<(Trajectory<R>, L::State)>
where
    L: LinearSystem,
{
    plan.validate(system.spectral_bound())?;
    if state0.amps().len() != system.zero_state().amps().len() {
        return Err(Error::DimensionMismatch {
            expected: system.zero_state().amps().len(),
            found: state0.amps().len(),
        });
    }
    if !state0.is_finite() {
        return Err(Error::NonFinite { t: 0.0 });
    }

    let (full, partial) = plan.schedule();
    let mut rk = Rk4::new(system.zero_state());
    let mut x = state0.clone();
    let mut traj = Trajectory {
        times: vec![0.0],
        records: vec![observe(0.0, &x)],
    };

    for step in 1..=full {
        rk.step(system, &mut x, plan.dt)?;
        let t = step as f64 * plan.dt;
        if !x.is_finite() {
            return Err(Error::NonFinite { t });
        }
        let last = step == full && partial == 0.0;
        if step % plan.sample_stride == 0 || last {
            traj.times.push(if last { plan.t_max } else { t });
            traj.records.push(observe(t, &x));
        }
    }
    if partial > 0.0 {
        rk.step(system, &mut x, partial)?;
        if !x.is_finite() {
            return Err(Error::NonFinite { t: plan.t_max });
        }
        traj.times.push(plan.t_max);
        traj.records.push(observe(plan.t_max, &x));
    }
    Ok((traj, x))
}

/// Endpoint only.
pub fn propagate<L: LinearSystem>(
    system: &L,
    state0: &L::State,
    t: f64,
    dt: f64,
) -> Result<L::State> {
    let plan = StepPlan::new(t, dt, usize::MAX);
    integrate(system, state0, &plan, |_, _| ()).map(|(_, x)| x)
}

/// The same equations run backwards in time (`ẋ = -M x`).
#[derive(Debug, Clone, Copy)]
pub struct Reversed<'a, L>(pub &'a L);

impl<L: LinearSystem> LinearSystem for Reversed<'_, L> {
    type State = L::State;

    fn grid(&self) -> &ModeGrid {
        self.0.grid()
    }

    fn deriv_into(&self, state: &L::State, out: &mut L::State) -> Result<()> {
        self.0.deriv_into(state, out)?;
        out.amps_mut().iter_mut().for_each(|c| *c = -*c);
        Ok(())
    }

    fn spectral_bound(&self) -> f64 {
        self.0.spectral_bound()
    }

    fn zero_state(&self) -> L::State {
        self.0.zero_state()
    }
}
