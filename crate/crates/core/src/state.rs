use num_complex::Complex64;

use crate::error::Result;
use crate::model::ModeGrid;

/// A probability-amplitude vector stored as one flat complex buffer.
pub trait Amplitudes: Clone {
    fn amps(&self) -> &[Complex64];
    fn amps_mut(&mut self) -> &mut [Complex64];

    fn norm_sqr(&self) -> f64 {
        self.amps().iter().map(|c| c.norm_sqr()).sum()
    }

    fn is_finite(&self) -> bool {
        self.amps()
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// `Re⟨self, other⟩`.
    fn real_inner(&self, other: &Self) -> f64 {
        self.amps()
            .iter()
            .zip(other.amps())
            .map(|(a, b)| (a.conj() * b).re)
            .sum()
    }

    fn scale(&mut self, factor: Complex64) {
        self.amps_mut().iter_mut().for_each(|c| *c *= factor);
    }
}

/// Linear, time-independent equations of motion `ẋ = M x` with anti-Hermitian `M`.
pub trait LinearSystem: Sync {
    type State: Amplitudes + Send;

    fn grid(&self) -> &ModeGrid;

    /// Writes `M · state` into `out`.
    fn deriv_into(&self, state: &Self::State, out: &mut Self::State) -> Result<()>;

    /// Upper bound on the spectral radius of `M`.
    fn spectral_bound(&self) -> f64;

    fn zero_state(&self) -> Self::State;
}
