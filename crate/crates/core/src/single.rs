//! One excitation shared between two independent atom-cavity systems.
//!
//! Cavity `a` holds atom 1 and cavity `b` holds atom 2. The state is
//! `C₁|e₁g₂,0⟩ + C₂|g₁e₂,0⟩ + Σ_μ C_aμ|g₁g₂,1_μ⟩ + Σ_ν C_bν|g₁g₂,1_ν⟩`.

use num_complex::Complex64;

use crate::error::Result;
use crate::model::ModeGrid;
use crate::state::{Amplitudes, LinearSystem};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Amplitudes laid out as `[C₁, C₂, C_a(0..n), C_b(0..n)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleExcState {
    n: usize,
    amps: Vec<Complex64>,
}

impl SingleExcState {
    pub fn zeros(n_modes: usize) -> Self {
        SingleExcState {
            n: n_modes,
            amps: vec![ZERO; 2 + 2 * n_modes],
        }
    }

    pub fn from_parts(c1: Complex64, c2: Complex64, ca: &[Complex64], cb: &[Complex64]) -> Self {
        assert_eq!(ca.len(), cb.len(), "cavities must have equal mode counts");
        let mut amps = Vec::with_capacity(2 + 2 * ca.len());
        amps.push(c1);
        amps.push(c2);
        amps.extend_from_slice(ca);
        amps.extend_from_slice(cb);
        SingleExcState { n: ca.len(), amps }
    }

    pub fn n_modes(&self) -> usize {
        self.n
    }

    pub fn c1(&self) -> Complex64 {
        self.amps[0]
    }

    pub fn c2(&self) -> Complex64 {
        self.amps[1]
    }

    pub fn ca(&self) -> &[Complex64] {
        &self.amps[2..2 + self.n]
    }

    pub fn cb(&self) -> &[Complex64] {
        &self.amps[2 + self.n..]
    }

    pub fn set_c1(&mut self, v: Complex64) {
        self.amps[0] = v;
    }

    pub fn set_c2(&mut self, v: Complex64) {
        self.amps[1] = v;
    }

    pub fn ca_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps[2..2 + self.n]
    }

    pub fn cb_mut(&mut self) -> &mut [Complex64] {
        let n = self.n;
        &mut self.amps[2 + n..]
    }

    fn split_mut(
        &mut self,
    ) -> (
        &mut Complex64,
        &mut Complex64,
        &mut [Complex64],
        &mut [Complex64],
    ) {
        let (atoms, fields) = self.amps.split_at_mut(2);
        let (c1, c2) = atoms.split_at_mut(1);
        let (ca, cb) = fields.split_at_mut(self.n);
        (&mut c1[0], &mut c2[0], ca, cb)
    }
}

impl Amplitudes for SingleExcState {
    fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    fn amps_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }
}

/// Atoms share the excitation: `C₁ = cos θ`, `C₂ = sin θ`, fields in vacuum.
pub fn init_atoms_entangled(theta: f64, grid: &ModeGrid) -> SingleExcState {
    let mut s = SingleExcState::zeros(grid.len());
    s.set_c1(Complex64::new(theta.cos(), 0.0));
    s.set_c2(Complex64::new(theta.sin(), 0.0));
    s
}

/// Atoms in the ground state, one photon shared between the resonant modes
/// of the two cavities: `cos θ` in cavity a, `sin θ` in cavity b.
pub fn init_fields_entangled(theta: f64, grid: &ModeGrid) -> SingleExcState {
    let mut s = SingleExcState::zeros(grid.len());
    let k = grid.central();
    s.ca_mut()[k] = Complex64::new(theta.cos(), 0.0);
    s.cb_mut()[k] = Complex64::new(theta.sin(), 0.0);
    s
}

/// Time derivative of the single-excitation amplitudes.
pub fn deriv_single(state: &SingleExcState, grid: &ModeGrid) -> Result<SingleExcState> {
    let mut out = SingleExcState::zeros(state.n_modes());
    deriv_single_into(state, grid, &mut out)?;
    Ok(out)
}

/// Each atom only talks to its own cavity, so the two halves evolve
/// independently:
///
/// ```text
/// Ċ₁  = Σ_μ g_μ C_aμ          Ċ_aμ = -iΔ_μ C_aμ - g*_μ C₁
/// Ċ₂  = Σ_ν g_ν C_bν          Ċ_bν = -iΔ_ν C_bν - g*_ν C₂
/// ```
///
/// Couplings are real, so `g* = g`.
pub fn deriv_single_into(
    state: &SingleExcState,
    grid: &ModeGrid,
    out: &mut SingleExcState,
) -> Result<()> {
    grid.check_modes(state.n_modes())?;
    grid.check_modes(out.n_modes())?;
    let (d1, d2, dca, dcb) = out.split_mut();
    *d1 = cavity_deriv(state.c1(), state.ca(), grid, dca);
    *d2 = cavity_deriv(state.c2(), state.cb(), grid, dcb);
    Ok(())
}

fn cavity_deriv(
    atom: Complex64,
    field: &[Complex64],
    grid: &ModeGrid,
    dfield: &mut [Complex64],
) -> Complex64 {
    let mut datom = ZERO;
    for (((&c, &g), &delta), dc) in field
        .iter()
        .zip(&grid.couplings)
        .zip(&grid.detunings)
        .zip(dfield.iter_mut())
    {
        datom += g * c;
        *dc = Complex64::new(0.0, -delta) * c - g * atom;
    }
    datom
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SingleObservables {
    pub pop1: f64,
    pub pop2: f64,
    pub pop_a: f64,
    pub pop_b: f64,
    pub norm: f64,
}

pub fn observables_single(state: &SingleExcState) -> SingleObservables {
    let pop1 = state.c1().norm_sqr();
    let pop2 = state.c2().norm_sqr();
    let pop_a: f64 = state.ca().iter().map(|c| c.norm_sqr()).sum();
    let pop_b: f64 = state.cb().iter().map(|c| c.norm_sqr()).sum();
    SingleObservables {
        pop1,
        pop2,
        pop_a,
        pop_b,
        norm: pop1 + pop2 + pop_a + pop_b,
    }
}

/// The single-excitation equations on a fixed grid.
#[derive(Debug, Clone)]
pub struct SingleExcSystem {
    grid: ModeGrid,
}

impl SingleExcSystem {
    pub fn new(grid: ModeGrid) -> Self {
        SingleExcSystem { grid }
    }
}

impl LinearSystem for SingleExcSystem {
    type State = SingleExcState;

    fn grid(&self) -> &ModeGrid {
        &self.grid
    }

    fn deriv_into(&self, state: &SingleExcState, out: &mut SingleExcState) -> Result<()> {
        deriv_single_into(state, &self.grid, out)
    }

    /// The generator is a direct sum of two identical JC blocks whose norm is
    /// at most `max|Δ| + sqrt(Σg²)`.
    fn spectral_bound(&self) -> f64 {
        self.grid.max_detuning() + self.grid.collective_coupling()
    }

    fn zero_state(&self) -> SingleExcState {
        SingleExcState::zeros(self.grid.len())
    }
}
