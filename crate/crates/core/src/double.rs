//! Two excitations, one per atom-cavity system, plus the decoupled
//! zero-excitation auxiliary state that carries the initial coherence:
//!
//! ```text
//! D₁₁|e₁e₂,0,0⟩ + Σ_ν D₂ν|e₁g₂,0,1_ν⟩ + Σ_μ D₃μ|g₁e₂,1_μ,0⟩
//!     + D₀₀|g₁g₂,0,0⟩ + Σ_μν D₄μν|g₁g₂,1_μ,1_ν⟩
//! ```

use num_complex::Complex64;

use crate::error::Result;
use crate::model::ModeGrid;
use crate::state::{Amplitudes, LinearSystem};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Amplitudes laid out as `[D₀₀, D₁₁, D₂(0..n), D₃(0..n), D₄(μ·n + ν)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DoubleExcState {
    n: usize,
    amps: Vec<Complex64>,
}

impl DoubleExcState {
    pub fn zeros(n_modes: usize) -> Self {
        DoubleExcState {
            n: n_modes,
            amps: vec![ZERO; Self::dim(n_modes)],
        }
    }

    pub fn dim(n_modes: usize) -> usize {
        2 + 2 * n_modes + n_modes * n_modes
    }

    pub fn n_modes(&self) -> usize {
        self.n
    }

    pub fn d00(&self) -> Complex64 {
        self.amps[0]
    }

    pub fn d11(&self) -> Complex64 {
        self.amps[1]
    }

    /// Atom 1 excited, photon in cavity-b mode ν.
    pub fn d2(&self) -> &[Complex64] {
        &self.amps[2..2 + self.n]
    }

    /// Atom 2 excited, photon in cavity-a mode μ.
    pub fn d3(&self) -> &[Complex64] {
        &self.amps[2 + self.n..2 + 2 * self.n]
    }

    /// Row-major by μ (cavity a).
    pub fn d4(&self) -> &[Complex64] {
        &self.amps[2 + 2 * self.n..]
    }

    pub fn d4_at(&self, mu: usize, nu: usize) -> Complex64 {
        self.d4()[mu * self.n + nu]
    }

    pub fn set_d00(&mut self, v: Complex64) {
        self.amps[0] = v;
    }

    pub fn set_d11(&mut self, v: Complex64) {
        self.amps[1] = v;
    }

    pub fn d2_mut(&mut self) -> &mut [Complex64] {
        let n = self.n;
        &mut self.amps[2..2 + n]
    }

    pub fn d3_mut(&mut self) -> &mut [Complex64] {
        let n = self.n;
        &mut self.amps[2 + n..2 + 2 * n]
    }

    pub fn d4_mut(&mut self) -> &mut [Complex64] {
        let n = self.n;
        &mut self.amps[2 + 2 * n..]
    }

    #[allow(clippy::type_complexity)]
    fn split_mut(
        &mut self,
    ) -> (
        &mut Complex64,
        &mut Complex64,
        &mut [Complex64],
        &mut [Complex64],
        &mut [Complex64],
    ) {
        let n = self.n;
        let (head, rest) = self.amps.split_at_mut(2);
        let (d00, d11) = head.split_at_mut(1);
        let (d2, rest) = rest.split_at_mut(n);
        let (d3, d4) = rest.split_at_mut(n);
        (&mut d00[0], &mut d11[0], d2, d3, d4)
    }
}

impl Amplitudes for DoubleExcState {
    fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    fn amps_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }
}

/// `cos θ |g₁g₂,0,0⟩ + sin θ |e₁e₂,0,0⟩`.
pub fn init_double(theta: f64, grid: &ModeGrid) -> DoubleExcState {
    let mut s = DoubleExcState::zeros(grid.len());
    s.set_d00(Complex64::new(theta.cos(), 0.0));
    s.set_d11(Complex64::new(theta.sin(), 0.0));
    s
}

/// Which of the two components of the doubly excited initial state carries
/// `cos θ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AngleConvention {
    /// `cos θ` on the ground state, `sin θ` on `|e₁e₂⟩`.
    #[default]
    Printed,
    /// `sin θ` on the ground state, `cos θ` on `|e₁e₂⟩`.
    Swapped,
}

impl AngleConvention {
    pub fn init(self, theta: f64, grid: &ModeGrid) -> DoubleExcState {
        let mut s = init_double(theta, grid);
        if self == AngleConvention::Swapped {
            let (g, e) = (s.d00(), s.d11());
            s.set_d00(e);
            s.set_d11(g);
        }
        s
    }
}

impl std::str::FromStr for AngleConvention {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "printed" | "as-printed" => Ok(AngleConvention::Printed),
            "swapped" => Ok(AngleConvention::Swapped),
            other => Err(crate::error::Error::config(
                "angle_convention",
                format!("unknown angle convention `{other}` (expected printed|swapped)"),
            )),
        }
    }
}

impl std::fmt::Display for AngleConvention {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            AngleConvention::Printed => "printed",
            AngleConvention::Swapped => "swapped",
        })
    }
}

pub fn deriv_double(state: &DoubleExcState, grid: &ModeGrid) -> Result<DoubleExcState> {
    let mut out = DoubleExcState::zeros(state.n_modes());
    deriv_double_into(state, grid, &mut out)?;
    Ok(out)
}

/// ```text
/// Ḋ₀₀  = 0
/// Ḋ₁₁  = -Σ_ν g_ν D₂ν - Σ_μ g_μ D₃μ
/// Ḋ₂ν  = -iΔ_ν D₂ν + g_ν D₁₁ - Σ_μ g_μ D₄μν
/// Ḋ₃μ  = -iΔ_μ D₃μ + g_μ D₁₁ - Σ_ν g_ν D₄μν
/// Ḋ₄μν = -i(Δ_μ + Δ_ν) D₄μν + g_μ D₂ν + g_ν D₃μ
/// ```
///
/// All sums run in ascending mode order so results are bitwise reproducible.
pub fn deriv_double_into(
    state: &DoubleExcState,
    grid: &ModeGrid,
    out: &mut DoubleExcState,
) -> Result<()> {
    grid.check_modes(state.n_modes())?;
    grid.check_modes(out.n_modes())?;
    let n = grid.len();
    let g = &grid.couplings;
    let delta = &grid.detunings;
    let (d11, d2, d3, d4) = (state.d11(), state.d2(), state.d3(), state.d4());
    let (o00, o11, o2, o3, o4) = out.split_mut();

    *o00 = ZERO;
    let mut acc = ZERO;
    for nu in 0..n {
        acc -= g[nu] * d2[nu];
    }
    for mu in 0..n {
        acc -= g[mu] * d3[mu];
    }
    *o11 = acc;

    for nu in 0..n {
        let mut acc = Complex64::new(0.0, -delta[nu]) * d2[nu] + g[nu] * d11;
        for mu in 0..n {
            acc -= g[mu] * d4[mu * n + nu];
        }
        o2[nu] = acc;
    }

    for mu in 0..n {
        let row = &d4[mu * n..(mu + 1) * n];
        let mut acc = Complex64::new(0.0, -delta[mu]) * d3[mu] + g[mu] * d11;
        for nu in 0..n {
            acc -= g[nu] * row[nu];
        }
        o3[mu] = acc;

        let orow = &mut o4[mu * n..(mu + 1) * n];
        for nu in 0..n {
            orow[nu] = Complex64::new(0.0, -(delta[mu] + delta[nu])) * row[nu]
                + g[mu] * d2[nu]
                + g[nu] * d3[mu];
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DoubleObservables {
    pub p11: f64,
    pub p2: f64,
    pub p3: f64,
    pub p4: f64,
    pub p00: f64,
    pub norm: f64,
}

pub fn observables_double(state: &DoubleExcState) -> DoubleObservables {
    let sum = |xs: &[Complex64]| xs.iter().map(|c| c.norm_sqr()).sum::<f64>();
    let p00 = state.d00().norm_sqr();
    let p11 = state.d11().norm_sqr();
    let p2 = sum(state.d2());
    let p3 = sum(state.d3());
    let p4 = sum(state.d4());
    DoubleObservables {
        p11,
        p2,
        p3,
        p4,
        p00,
        norm: p00 + p11 + p2 + p3 + p4,
    }
}

#[derive(Debug, Clone)]
pub struct DoubleExcSystem {
    grid: ModeGrid,
}

impl DoubleExcSystem {
    pub fn new(grid: ModeGrid) -> Self {
        DoubleExcSystem { grid }
    }
}

impl LinearSystem for DoubleExcSystem {
    type State = DoubleExcState;

    fn grid(&self) -> &ModeGrid {
        &self.grid
    }

    fn deriv_into(&self, state: &DoubleExcState, out: &mut DoubleExcState) -> Result<()> {
        deriv_double_into(state, &self.grid, out)
    }

    /// Free part reaches `2·max|Δ|`; each cavity's JC coupling has norm at
    /// most `sqrt(Σg²)`.
    fn spectral_bound(&self) -> f64 {
        2.0 * (self.grid.max_detuning() + self.grid.collective_coupling())
    }

    fn zero_state(&self) -> DoubleExcState {
        DoubleExcState::zeros(self.grid.len())
    }
}
