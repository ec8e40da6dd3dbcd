use num_complex::Complex64;

use crate::double::{observables_double, DoubleExcState, DoubleObservables};
use crate::entanglement::{
    concurrence_double_closed, concurrence_single_closed, double_x_state, single_x_state,
    TwoQubitDensity,
};
use crate::single::{observables_single, SingleExcState, SingleObservables};

/// What every sampled record exposes to the analysis code.
pub trait Record {
    fn concurrence(&self) -> f64;
    fn norm(&self) -> f64;
    /// Reduced two-atom density matrix rebuilt from the stored amplitudes.
    fn density(&self) -> TwoQubitDensity;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleRecord {
    pub concurrence: f64,
    pub obs: SingleObservables,
    pub c1: Complex64,
    pub c2: Complex64,
}

pub fn record_single(state: &SingleExcState) -> SingleRecord {
    SingleRecord {
        concurrence: concurrence_single_closed(state),
        obs: observables_single(state),
        c1: state.c1(),
        c2: state.c2(),
    }
}

impl Record for SingleRecord {
    fn concurrence(&self) -> f64 {
        self.concurrence
    }

    fn norm(&self) -> f64 {
        self.obs.norm
    }

    fn density(&self) -> TwoQubitDensity {
        single_x_state(self.c1, self.c2, self.obs.pop_a + self.obs.pop_b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleRecord {
    pub concurrence: f64,
    pub obs: DoubleObservables,
    pub d00: Complex64,
    pub d11: Complex64,
}

pub fn record_double(state: &DoubleExcState) -> DoubleRecord {
    DoubleRecord {
        concurrence: concurrence_double_closed(state),
        obs: observables_double(state),
        d00: state.d00(),
        d11: state.d11(),
    }
}

impl Record for DoubleRecord {
    fn concurrence(&self) -> f64 {
        self.concurrence
    }

    fn norm(&self) -> f64 {
        self.obs.norm
    }

    fn density(&self) -> TwoQubitDensity {
        double_x_state(self.d00, self.d11, self.obs.p2, self.obs.p3, self.obs.p4)
    }
}
