//! Two-atom reduced density matrices and their concurrence.
//!
//! The product basis is ordered `|e₁e₂⟩, |e₁g₂⟩, |g₁e₂⟩, |g₁g₂⟩`. Both
//! excitation sectors produce X-shaped matrices, for which the general
//! Wootters expression collapses to the closed forms below.

use nalgebra::{DMatrix, Matrix4, SymmetricEigen};
use num_complex::Complex64;

use crate::double::DoubleExcState;
use crate::error::{Error, Result};
use crate::single::SingleExcState;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const NEGATIVE_EIGEN_TOL: f64 = 1e-10;
/// Trace is the state norm carried through integration, so it is held to
/// the dynamics-level tolerance rather than the structural one.
pub const TRACE_TOL: f64 = 1e-6;

/// Cholesky pivots that shrink below this fraction of their original
/// diagonal entry are treated as exact zeros (the remainder is cancellation).
const PIVOT_CANCELLATION: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitDensity {
    pub rho: Matrix4<Complex64>,
}

impl TwoQubitDensity {
    pub fn new(rho: Matrix4<Complex64>) -> Self {
        TwoQubitDensity { rho }
    }

    pub fn from_rows(rows: [[Complex64; 4]; 4]) -> Self {
        TwoQubitDensity {
            rho: Matrix4::from_fn(|i, j| rows[i][j]),
        }
    }

    /// `|ψ⟩⟨ψ|` for a (not necessarily normalised) two-qubit vector.
    pub fn pure(psi: [Complex64; 4]) -> Self {
        let v = nalgebra::Vector4::from(psi);
        TwoQubitDensity {
            rho: v * v.adjoint(),
        }
    }

    pub fn trace(&self) -> f64 {
        self.rho.trace().re
    }

    pub fn check_physical(&self) -> Result<()> {
        let herm = (self.rho - self.rho.adjoint())
            .iter()
            .fold(0.0_f64, |m, z| m.max(z.norm()));
        if herm > HERMITIAN_TOL {
            return Err(Error::NonPhysical(format!(
                "not Hermitian (max |ρ - ρ†| = {herm:e})"
            )));
        }
        let tr = self.rho.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > HERMITIAN_TOL {
            return Err(Error::NonPhysical(format!("trace {tr} is not 1")));
        }
        let eig = SymmetricEigen::new(self.rho).eigenvalues;
        let min = eig.iter().copied().fold(f64::INFINITY, f64::min);
        if min < -NEGATIVE_EIGEN_TOL {
            return Err(Error::NonPhysical(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }
}

/// ρ₂₂ = |C₁|², ρ₃₃ = |C₂|², ρ₂₃ = C₁*C₂, ρ₄₄ = photon population.
pub fn rho_atoms_single(state: &SingleExcState) -> TwoQubitDensity {
    let photons: f64 = state
        .ca()
        .iter()
        .chain(state.cb())
        .map(|c| c.norm_sqr())
        .sum();
    single_x_state(state.c1(), state.c2(), photons)
}

pub(crate) fn single_x_state(c1: Complex64, c2: Complex64, photons: f64) -> TwoQubitDensity {
    let mut rho = Matrix4::from_element(ZERO);
    rho[(1, 1)] = Complex64::new(c1.norm_sqr(), 0.0);
    rho[(2, 2)] = Complex64::new(c2.norm_sqr(), 0.0);
    rho[(1, 2)] = c1.conj() * c2;
    rho[(2, 1)] = c1 * c2.conj();
    rho[(3, 3)] = Complex64::new(photons, 0.0);
    TwoQubitDensity { rho }
}

/// ρ₁₁ = |D₁₁|², ρ₂₂ = Σ|D₂|², ρ₃₃ = Σ|D₃|², ρ₄₄ = |D₀₀|² + Σ|D₄|²,
/// ρ₁₄ = D₁₁D₀₀*.
pub fn rho_atoms_double(state: &DoubleExcState) -> TwoQubitDensity {
    let sum = |xs: &[Complex64]| xs.iter().map(|c| c.norm_sqr()).sum::<f64>();
    double_x_state(
        state.d00(),
        state.d11(),
        sum(state.d2()),
        sum(state.d3()),
        sum(state.d4()),
    )
}

pub(crate) fn double_x_state(
    d00: Complex64,
    d11: Complex64,
    p2: f64,
    p3: f64,
    p4: f64,
) -> TwoQubitDensity {
    let mut rho = Matrix4::from_element(ZERO);
    rho[(0, 0)] = Complex64::new(d11.norm_sqr(), 0.0);
    rho[(1, 1)] = Complex64::new(p2, 0.0);
    rho[(2, 2)] = Complex64::new(p3, 0.0);
    rho[(3, 3)] = Complex64::new(d00.norm_sqr() + p4, 0.0);
    rho[(0, 3)] = d11 * d00.conj();
    rho[(3, 0)] = d11.conj() * d00;
    TwoQubitDensity { rho }
}

/// `σy ⊗ σy` in the product basis.
fn spin_flip() -> Matrix4<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    let mut y = Matrix4::from_element(ZERO);
    y[(0, 3)] = -one;
    y[(1, 2)] = one;
    y[(2, 1)] = one;
    y[(3, 0)] = -one;
    y
}

/// Factor `ρ = F F†` by diagonally pivoted Cholesky, returning the columns
/// of `F` (at most four).
fn square_root_factor(rho: &Matrix4<Complex64>) -> Result<Vec<[Complex64; 4]>> {
    let mut work = *rho;
    let original: [f64; 4] = std::array::from_fn(|i| rho[(i, i)].re);
    let mut used = [false; 4];
    let mut cols = Vec::with_capacity(4);
    loop {
        let pivot = (0..4)
            .filter(|&i| !used[i])
            .max_by(|&a, &b| work[(a, a)].re.total_cmp(&work[(b, b)].re));
        let Some(p) = pivot else { break };
        let d = work[(p, p)].re;
        if d < -NEGATIVE_EIGEN_TOL {
            return Err(Error::NonPhysical(format!("negative pivot {d:e}")));
        }
        used[p] = true;
        if d <= PIVOT_CANCELLATION * original[p] || d <= 0.0 {
            continue;
        }
        let s = d.sqrt();
        let col: [Complex64; 4] = std::array::from_fn(|i| {
            if used[i] && i != p {
                ZERO
            } else {
                work[(i, p)] / s
            }
        });
        for i in 0..4 {
            for j in 0..4 {
                work[(i, j)] -= col[i] * col[j].conj();
            }
        }
        cols.push(col);
    }
    Ok(cols)
}

/// Wootters concurrence `max{0, √λ₁ - √λ₂ - √λ₃ - √λ₄}` with `λᵢ` the
/// eigenvalues of `ρ (σy⊗σy) ρ* (σy⊗σy)`. The square roots are computed as
/// singular values of `F† (σy⊗σy) F*` for a factor `ρ = F F†`, which avoids a
/// non-Hermitian eigenproblem.
pub fn concurrence_wootters(rho: &TwoQubitDensity) -> Result<f64> {
    rho.check_physical()?;
    let cols = square_root_factor(&rho.rho)?;
    if cols.is_empty() {
        return Ok(0.0);
    }
    let r = cols.len();
    let f = DMatrix::from_fn(4, r, |i, j| cols[j][i]);
    let y = DMatrix::from_fn(4, 4, |i, j| spin_flip()[(i, j)]);
    let b = f.adjoint() * y * f.map(|z| z.conj());
    let mut s: Vec<f64> = b.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s.resize(4, 0.0);
    Ok((s[0] - s[1] - s[2] - s[3]).clamp(0.0, 1.0))
}

/// `2|C₁ C₂*|`.
pub fn concurrence_single_closed(state: &SingleExcState) -> f64 {
    2.0 * (state.c1() * state.c2().conj()).norm()
}

/// `2·max{0, |D₁₁||D₀₀| - sqrt(Σ|D₂|² · Σ|D₃|²)}`.
pub fn concurrence_double_closed(state: &DoubleExcState) -> f64 {
    let sum = |xs: &[Complex64]| xs.iter().map(|c| c.norm_sqr()).sum::<f64>();
    double_closed(state.d00(), state.d11(), sum(state.d2()), sum(state.d3()))
}

pub(crate) fn double_closed(d00: Complex64, d11: Complex64, p2: f64, p3: f64) -> f64 {
    2.0 * (d11.norm() * d00.norm() - (p2 * p3).sqrt()).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::double::init_double;
    use crate::model::{build_mode_grid, SystemConfig};
    use crate::single::init_atoms_entangled;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn grid(n: usize) -> crate::model::ModeGrid {
        build_mode_grid(&SystemConfig {
            n_modes: n,
            ..SystemConfig::default()
        })
        .unwrap()
    }

    #[test]
    fn single_density_entries() {
        let rho = rho_atoms_single(&init_atoms_entangled(FRAC_PI_4, &grid(3))).rho;
        for (i, j) in [(1, 1), (2, 2), (1, 2), (2, 1)] {
            assert!((rho[(i, j)] - c(0.5, 0.0)).norm() < 1e-15);
        }
        assert_eq!(rho[(3, 3)], ZERO);

        let mut s = SingleExcState::zeros(3);
        s.ca_mut()[1] = c(0.6, 0.0);
        s.cb_mut()[2] = c(0.0, 0.8);
        let rho = rho_atoms_single(&s).rho;
        assert!((rho[(3, 3)].re - 1.0).abs() < 1e-15);
        assert_eq!(rho.iter().filter(|z| **z != ZERO).count(), 1);

        let s = SingleExcState::from_parts(c(0.6, 0.0), c(0.0, 0.8), &[ZERO], &[ZERO]);
        let rho = rho_atoms_single(&s).rho;
        assert!((rho[(1, 2)] - c(0.0, 0.48)).norm() < 1e-15);
        assert!((rho[(2, 1)] - c(0.0, -0.48)).norm() < 1e-15);
    }

    #[test]
    fn double_density_entries() {
        let rho = rho_atoms_double(&init_double(FRAC_PI_4, &grid(1))).rho;
        for (i, j) in [(0, 0), (3, 3), (0, 3), (3, 0)] {
            assert!((rho[(i, j)] - c(0.5, 0.0)).norm() < 1e-15);
        }
        let rho = rho_atoms_double(&init_double(0.0, &grid(1))).rho;
        assert_eq!(rho[(3, 3)], c(1.0, 0.0));
        assert_eq!(rho.iter().filter(|z| **z != ZERO).count(), 1);
    }

    #[test]
    fn wootters_reference_states() {
        let h = c(FRAC_1_SQRT_2, 0.0);
        let bell = TwoQubitDensity::pure([ZERO, h, h, ZERO]);
        assert!((concurrence_wootters(&bell).unwrap() - 1.0).abs() < 1e-12);

        let product = TwoQubitDensity::pure([ZERO, c(1.0, 0.0), ZERO, ZERO]);
        assert!(concurrence_wootters(&product).unwrap().abs() < 1e-12);

        let mixed = TwoQubitDensity::new(Matrix4::identity() * c(0.25, 0.0));
        assert!(concurrence_wootters(&mixed).unwrap().abs() < 1e-12);

        let s = SingleExcState::from_parts(c(0.6, 0.0), c(0.0, 0.8), &[ZERO], &[ZERO]);
        let w = concurrence_wootters(&rho_atoms_single(&s)).unwrap();
        assert!((w - 0.96).abs() < 1e-12, "{w}");
        assert!((concurrence_single_closed(&s) - 0.96).abs() < 1e-15);
    }

    #[test]
    fn wootters_on_a_non_x_state() {
        // |ψ⟩ = a|00⟩ + b|11⟩ has concurrence 2|ab| regardless of basis labels
        let (a, b) = (0.8_f64, 0.6_f64);
        let psi = [c(a, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, b)];
        let w = concurrence_wootters(&TwoQubitDensity::pure(psi)).unwrap();
        assert!((w - 2.0 * a * b).abs() < 1e-12);

        // generic pure state: C = 2|αδ - βγ|
        let psi = [c(0.1, 0.2), c(0.3, -0.4), c(-0.5, 0.1), c(0.2, 0.3)];
        let n: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let psi = psi.map(|z| z / n);
        let expected = 2.0 * (psi[0] * psi[3] - psi[1] * psi[2]).norm();
        let w = concurrence_wootters(&TwoQubitDensity::pure(psi)).unwrap();
        assert!((w - expected).abs() < 1e-12, "{w} vs {expected}");
    }

    #[test]
    fn rejects_non_physical() {
        let mut rho = Matrix4::from_element(ZERO);
        rho[(0, 0)] = c(1.5, 0.0);
        rho[(1, 1)] = c(-0.5, 0.0);
        assert!(matches!(
            concurrence_wootters(&TwoQubitDensity::new(rho)),
            Err(Error::NonPhysical(_))
        ));
        let mut rho = Matrix4::identity() * c(0.25, 0.0);
        rho[(0, 1)] = c(0.1, 0.0);
        assert!(concurrence_wootters(&TwoQubitDensity::new(rho)).is_err());
        let rho = Matrix4::identity() * c(0.5, 0.0);
        assert!(concurrence_wootters(&TwoQubitDensity::new(rho)).is_err());
    }

    #[test]
    fn single_closed_form_values() {
        let g = grid(1);
        assert!(
            (concurrence_single_closed(&init_atoms_entangled(FRAC_PI_4, &g)) - 1.0).abs() < 1e-15
        );
        let s = init_atoms_entangled(PI / 12.0, &g);
        assert!((concurrence_single_closed(&s) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn double_closed_form_values() {
        let g = grid(1);
        assert!((concurrence_double_closed(&init_double(FRAC_PI_4, &g)) - 1.0).abs() < 1e-15);

        let mut s = DoubleExcState::zeros(1);
        s.set_d00(c(0.8, 0.0));
        s.d2_mut()[0] = c(0.3, 0.0);
        s.d3_mut()[0] = c(0.0, 0.5);
        assert_eq!(concurrence_double_closed(&s), 0.0);

        // product-oracle amplitudes at t = π/4, θ = π/4
        let (sin_t, cos_t) = (FRAC_PI_4.sin(), FRAC_PI_4.cos());
        let st = FRAC_PI_4.sin();
        let mut s = DoubleExcState::zeros(1);
        s.set_d00(c(FRAC_PI_4.cos(), 0.0));
        s.set_d11(c(st * cos_t * cos_t, 0.0));
        s.d2_mut()[0] = c(-st * cos_t * sin_t, 0.0);
        s.d3_mut()[0] = c(-st * cos_t * sin_t, 0.0);
        s.d4_mut()[0] = c(st * sin_t * sin_t, 0.0);
        assert!((concurrence_double_closed(&s) - 0.25).abs() < 1e-15);
        let rho = rho_atoms_double(&s).rho;
        assert!((rho[(1, 1)].re - 0.125).abs() < 1e-15);
        assert!((rho[(2, 2)].re - 0.125).abs() < 1e-15);
        assert!((concurrence_wootters(&rho_atoms_double(&s)).unwrap() - 0.25).abs() < 1e-12);
    }

    mod props {
        use super::*;
        use crate::state::Amplitudes;
        use proptest::collection::vec;
        use proptest::prelude::*;

        fn normalised(v: Vec<(f64, f64)>) -> Vec<Complex64> {
            let v: Vec<Complex64> = v.into_iter().map(|(re, im)| c(re, im)).collect();
            let n = v
                .iter()
                .map(|z| z.norm_sqr())
                .sum::<f64>()
                .sqrt()
                .max(1e-300);
            v.into_iter().map(|z| z / n).collect()
        }

        fn single_state() -> impl Strategy<Value = SingleExcState> {
            vec((-1.0f64..1.0, -1.0f64..1.0), 8)
                .prop_filter("non-zero", |v| {
                    v.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3)
                })
                .prop_map(|v| {
                    let a = normalised(v);
                    SingleExcState::from_parts(a[0], a[1], &a[2..5], &a[5..8])
                })
        }

        fn double_state() -> impl Strategy<Value = DoubleExcState> {
            vec((-1.0f64..1.0, -1.0f64..1.0), DoubleExcState::dim(2))
                .prop_filter("non-zero", |v| {
                    v.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3)
                })
                .prop_map(|v| {
                    let mut s = DoubleExcState::zeros(2);
                    s.amps_mut().copy_from_slice(&normalised(v));
                    s
                })
        }

        proptest! {
            #[test]
            fn single_closed_form_matches_wootters(s in single_state()) {
                let w = concurrence_wootters(&rho_atoms_single(&s)).unwrap();
                let closed = concurrence_single_closed(&s);
                prop_assert!((w - closed).abs() <= 1e-10, "{} vs {}", w, closed);
                prop_assert!((0.0..=1.0).contains(&closed));
            }

            #[test]
            fn double_closed_form_matches_wootters(s in double_state()) {
                let w = concurrence_wootters(&rho_atoms_double(&s)).unwrap();
                let closed = concurrence_double_closed(&s);
                prop_assert!((w - closed).abs() <= 1e-10, "{} vs {}", w, closed);
                prop_assert!((0.0..=1.0).contains(&closed));
            }

            #[test]
            fn phases_do_not_matter(s in single_state(), phi in 0.0f64..6.3, psi in 0.0f64..6.3) {
                let mut t = s.clone();
                t.set_c1(s.c1() * Complex64::from_polar(1.0, phi));
                t.set_c2(s.c2() * Complex64::from_polar(1.0, psi));
                prop_assert!((concurrence_single_closed(&s) - concurrence_single_closed(&t)).abs() < 1e-14);
            }

            #[test]
            fn double_phases_do_not_matter(s in double_state(), phi in 0.0f64..6.3) {
                let mut t = s.clone();
                t.set_d00(s.d00() * Complex64::from_polar(1.0, phi));
                t.set_d11(s.d11() * Complex64::from_polar(1.0, -2.0 * phi));
                let (a, b) = (concurrence_double_closed(&s), concurrence_double_closed(&t));
                prop_assert!((a - b).abs() < 1e-14);
            }

            #[test]
            fn one_empty_atom_means_no_entanglement(s in single_state()) {
                let mut t = s.clone();
                t.set_c2(ZERO);
                prop_assert_eq!(concurrence_single_closed(&t), 0.0);
            }
        }
    }
}
