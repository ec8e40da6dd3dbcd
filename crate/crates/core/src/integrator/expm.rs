//! Dense-matrix propagation `exp(M t)·x₀` for small systems.
//!
//! The generator is assembled entry by entry from the amplitude equations,
//! never by probing the RK4 derivative, so it can serve as an independent
//! check on the integrator. The exponential is applied by scaling and a
//! truncated Taylor series with an explicit remainder bound.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::double::{DoubleExcState, DoubleExcSystem};
use crate::error::{Error, Result};
use crate::model::ModeGrid;
use crate::single::SingleExcSystem;
use crate::state::{Amplitudes, LinearSystem};

pub const ORACLE_DIM_CAP: usize = 200;

/// Total truncation budget for one propagation, in the vector 1-norm.
const TRUNCATION_BUDGET: f64 = 1e-13;

pub trait DenseGenerator: LinearSystem {
    /// `M` with `ẋ = M x` in the state's flat amplitude ordering.
    fn generator(&self) -> Result<DMatrix<Complex64>>;
}

fn cap(dim: usize) -> Result<()> {
    if dim > ORACLE_DIM_CAP {
        return Err(Error::DimensionCap {
            dim,
            cap: ORACLE_DIM_CAP,
        });
    }
    Ok(())
}

fn free(delta: f64) -> Complex64 {
    Complex64::new(0.0, -delta)
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Single-excitation generator: ordering `[C₁, C₂, C_a.., C_b..]`.
pub fn single_generator(grid: &ModeGrid) -> Result<DMatrix<Complex64>> {
    let n = grid.len();
    let dim = 2 + 2 * n;
    cap(dim)?;
    let mut m = DMatrix::zeros(dim, dim);
    for (atom, field0) in [(0, 2), (1, 2 + n)] {
        for k in 0..n {
            let g = grid.couplings[k];
            let f = field0 + k;
            m[(atom, f)] = re(g);
            m[(f, atom)] = re(-g);
            m[(f, f)] = free(grid.detunings[k]);
        }
    }
    Ok(m)
}

/// Double-excitation generator: ordering `[D₀₀, D₁₁, D₂.., D₃.., D₄(μn+ν)]`.
pub fn double_generator(grid: &ModeGrid) -> Result<DMatrix<Complex64>> {
    let n = grid.len();
    let dim = DoubleExcState::dim(n);
    cap(dim)?;
    let (g, delta) = (&grid.couplings, &grid.detunings);
    let d11 = 1;
    let d2 = |nu: usize| 2 + nu;
    let d3 = |mu: usize| 2 + n + mu;
    let d4 = |mu: usize, nu: usize| 2 + 2 * n + mu * n + nu;
    let mut m = DMatrix::zeros(dim, dim);
    for k in 0..n {
        // D₁₁ ↔ one-photon sectors
        m[(d11, d2(k))] = re(-g[k]);
        m[(d11, d3(k))] = re(-g[k]);
        m[(d2(k), d11)] = re(g[k]);
        m[(d3(k), d11)] = re(g[k]);
        m[(d2(k), d2(k))] = free(delta[k]);
        m[(d3(k), d3(k))] = free(delta[k]);
    }
    for mu in 0..n {
        for nu in 0..n {
            let four = d4(mu, nu);
            m[(four, four)] = free(delta[mu] + delta[nu]);
            // cavity-a photon emitted by atom 1 out of D₂ν
            m[(four, d2(nu))] = re(g[mu]);
            m[(d2(nu), four)] = re(-g[mu]);
            // cavity-b photon emitted by atom 2 out of D₃μ
            m[(four, d3(mu))] = re(g[nu]);
            m[(d3(mu), four)] = re(-g[nu]);
        }
    }
    Ok(m)
}

impl DenseGenerator for SingleExcSystem {
    fn generator(&self) -> Result<DMatrix<Complex64>> {
        single_generator(self.grid())
    }
}

impl DenseGenerator for DoubleExcSystem {
    fn generator(&self) -> Result<DMatrix<Complex64>> {
        double_generator(self.grid())
    }
}

pub fn dense_generator<L: DenseGenerator>(system: &L) -> Result<DMatrix<Complex64>> {
    system.generator()
}

fn one_norm(m: &DMatrix<Complex64>) -> f64 {
    m.column_iter()
        .map(|col| col.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Smallest `K` with `2·a^(K+1)/(K+1)! ≤ tol`; for `a ≤ 1/2` this bounds
/// the Taylor remainder of `exp(A)` after the `A^K/K!` term.
fn taylor_order(a: f64, tol: f64) -> usize {
    let mut term = a; // a^(K+1)/(K+1)! at K = 0
    let mut k = 0;
    while 2.0 * term > tol && k < 60 {
        k += 1;
        term *= a / (k + 1) as f64;
    }
    k
}

/// `exp(M t)·state0`, with `M` from [`DenseGenerator`]. Truncation error is
/// bounded by 1e-13 in the 1-norm for unit-norm input.
pub fn expm_oracle<L: DenseGenerator>(system: &L, state0: &L::State, t: f64) -> Result<L::State> {
    let m = system.generator()?;
    let dim = m.nrows();
    if state0.amps().len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: state0.amps().len(),
        });
    }
    if t == 0.0 {
        return Ok(state0.clone());
    }
    let norm = one_norm(&m) * t.abs();
    let substeps = ((2.0 * norm).ceil() as usize).max(1);
    let a = m * Complex64::new(t / substeps as f64, 0.0);
    let a_norm = norm / substeps as f64;
    let order = taylor_order(a_norm, TRUNCATION_BUDGET / substeps as f64);

    let mut x = DVector::from_column_slice(state0.amps());
    for _ in 0..substeps {
        let mut term = x.clone();
        let mut sum = x.clone();
        for k in 1..=order {
            term = &a * term * Complex64::new(1.0 / k as f64, 0.0);
            sum += &term;
        }
        x = sum;
    }
    let mut out = state0.clone();
    out.amps_mut().copy_from_slice(x.as_slice());
    Ok(out)
}
