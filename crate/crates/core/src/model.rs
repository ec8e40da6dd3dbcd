//! Dimensionless unit system and the discrete mode grid of one cavity.
//!
//! Frequencies are measured in units of the central-mode vacuum Rabi
//! frequency, times in its inverse. A cavity of length `L` supports modes
//! spaced by `2πc/L`; with the atomic wavelength `λ_a = 2πc/ω_a` that spacing
//! is `ω_a · λ_a / L`, which is all the geometry the dynamics needs.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Frequency dependence of the atom-mode coupling across the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CouplingProfile {
    /// Every mode couples with the central-mode strength.
    Uniform,
    /// `g(ω) ∝ √ω`, normalised so the resonant mode has `g = 1`.
    #[default]
    SqrtFrequency,
}

impl FromStr for CouplingProfile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "uniform" => Ok(CouplingProfile::Uniform),
            "sqrtfreq" | "sqrt" | "sqrtfrequency" | "sqrt-frequency" => {
                Ok(CouplingProfile::SqrtFrequency)
            }
            other => Err(Error::config(
                "profile",
                format!("unknown coupling profile `{other}` (expected uniform|sqrtfreq)"),
            )),
        }
    }
}

impl fmt::Display for CouplingProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CouplingProfile::Uniform => "uniform",
            CouplingProfile::SqrtFrequency => "sqrtfreq",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemConfig {
    /// Atomic transition frequency.
    pub omega_a: f64,
    /// Cavity length in atomic wavelengths, `L / λ_a`.
    pub length_ratio: f64,
    /// Modes per cavity; odd so the grid is symmetric about resonance.
    pub n_modes: usize,
    /// Initial-state mixing angle in radians, within `[0, π/2]`.
    pub theta: f64,
    pub coupling_profile: CouplingProfile,
}

impl Default for SystemConfig {
    /// Left panel of the n = 19 configuration with a maximally entangled start.
    fn default() -> Self {
        SystemConfig {
            omega_a: 4.84e3,
            length_ratio: 670.0,
            n_modes: 19,
            theta: std::f64::consts::FRAC_PI_4,
            coupling_profile: CouplingProfile::SqrtFrequency,
        }
    }
}

impl SystemConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_modes == 0 || self.n_modes.is_multiple_of(2) {
            return Err(Error::config(
                "n_modes",
                format!("must be a positive odd integer, got {}", self.n_modes),
            ));
        }
        if !(self.omega_a.is_finite() && self.omega_a > 0.0) {
            return Err(Error::config(
                "omega_a",
                format!("must be finite and positive, got {}", self.omega_a),
            ));
        }
        if !(self.length_ratio.is_finite() && self.length_ratio > 0.0) {
            return Err(Error::config(
                "length_ratio",
                format!("must be finite and positive, got {}", self.length_ratio),
            ));
        }
        if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&self.theta) {
            return Err(Error::config(
                "theta",
                format!("must lie in [0, π/2], got {}", self.theta),
            ));
        }
        let spacing = self.mode_spacing();
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::config(
                "length_ratio",
                format!("mode spacing {spacing} is not positive"),
            ));
        }
        let lowest = self.omega_a - self.half_width() as f64 * spacing;
        if self.n_modes > 1 && lowest <= 0.0 {
            return Err(Error::config(
                "n_modes",
                format!(
                    "lowest mode frequency {lowest} is not positive \
                     ({} modes spaced by {spacing})",
                    self.n_modes
                ),
            ));
        }
        Ok(())
    }

    /// Free spectral range `Δω = ω_a / (L/λ_a)`.
    pub fn mode_spacing(&self) -> f64 {
        self.omega_a / self.length_ratio
    }

    pub(crate) fn half_width(&self) -> usize {
        (self.n_modes.max(1) - 1) / 2
    }
}

/// Detunings and couplings of one cavity, ordered from the lowest mode
/// (`k = -(n-1)/2`) to the highest.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeGrid {
    pub detunings: Vec<f64>,
    pub couplings: Vec<f64>,
    pub spacing: f64,
}

impl ModeGrid {
    pub fn len(&self) -> usize {
        self.detunings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.detunings.is_empty()
    }

    /// Index of the resonant mode.
    pub fn central(&self) -> usize {
        self.len() / 2
    }

    pub fn max_detuning(&self) -> f64 {
        self.detunings.iter().fold(0.0_f64, |m, d| m.max(d.abs()))
    }

    /// Collective coupling `sqrt(Σ g_k²)`.
    pub fn collective_coupling(&self) -> f64 {
        self.couplings.iter().map(|g| g * g).sum::<f64>().sqrt()
    }

    pub(crate) fn check_modes(&self, found: usize) -> Result<()> {
        if found != self.len() {
            return Err(Error::ModeMismatch {
                expected: self.len(),
                found,
            });
        }
        Ok(())
    }
}

pub fn build_mode_grid(config: &SystemConfig) -> Result<ModeGrid> {
    config.validate()?;
    let spacing = config.mode_spacing();
    let half = config.half_width() as i64;
    let detunings: Vec<f64> = (-half..=half).map(|k| k as f64 * spacing).collect();
    let couplings = detunings
        .iter()
        .map(|&delta| match config.coupling_profile {
            CouplingProfile::Uniform => 1.0,
            CouplingProfile::SqrtFrequency => ((config.omega_a + delta) / config.omega_a).sqrt(),
        })
        .collect();
    Ok(ModeGrid {
        detunings,
        couplings,
        spacing,
    })
}

/// Photon recurrence time `L/c = 2π/Δω`.
pub fn retardation_time(config: &SystemConfig) -> Result<f64> {
    config.validate()?;
    Ok(TAU / config.mode_spacing())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn fig4(n_modes: usize, length_ratio: f64, profile: CouplingProfile) -> SystemConfig {
        SystemConfig {
            omega_a: 4.84e3,
            length_ratio,
            n_modes,
            theta: std::f64::consts::FRAC_PI_4,
            coupling_profile: profile,
        }
    }

    #[test]
    fn single_mode_grid() {
        for omega_a in [1.0, 37.5, 4.84e3] {
            let cfg = SystemConfig {
                omega_a,
                n_modes: 1,
                ..SystemConfig::default()
            };
            let grid = build_mode_grid(&cfg).unwrap();
            assert_eq!(grid.detunings, vec![0.0]);
            assert_eq!(grid.couplings, vec![1.0]);
        }
    }

    #[test]
    fn n19_spacing_and_span() {
        let grid = build_mode_grid(&fig4(19, 670.0, CouplingProfile::Uniform)).unwrap();
        // 4840 / 670
        assert_relative_eq!(grid.spacing, 7.223_880_597_014_925, epsilon = 1e-12);
        assert_eq!(grid.len(), 19);
        assert_relative_eq!(grid.detunings[0], -9.0 * grid.spacing, epsilon = 1e-12);
        assert_relative_eq!(grid.detunings[18], 9.0 * grid.spacing, epsilon = 1e-12);
        assert_eq!(grid.detunings[grid.central()], 0.0);
        for w in grid.detunings.windows(2) {
            assert_relative_eq!(w[1] - w[0], grid.spacing, epsilon = 1e-12);
        }
    }

    #[test]
    fn n99_sqrt_profile_edge_coupling() {
        let grid = build_mode_grid(&fig4(99, 3480.0, CouplingProfile::SqrtFrequency)).unwrap();
        assert_eq!(grid.couplings[grid.central()], 1.0);
        let expected = ((4840.0 + 49.0 * 4840.0 / 3480.0) / 4840.0_f64).sqrt();
        assert_relative_eq!(grid.couplings[98], expected, epsilon = 1e-15);
        assert!((grid.couplings[98] - 1.00701).abs() < 1e-5);
    }

    #[test]
    fn retardation_times_from_captions() {
        let tr = retardation_time(&fig4(19, 670.0, CouplingProfile::Uniform)).unwrap();
        assert!((tr - 0.8698).abs() < 1e-4, "{tr}");
        let cfg = SystemConfig {
            omega_a: 1.11e4,
            length_ratio: 3480.0,
            n_modes: 99,
            ..SystemConfig::default()
        };
        let tr = retardation_time(&cfg).unwrap();
        assert!((tr - 1.9697).abs() < 2e-4, "{tr}");
        let single = SystemConfig {
            n_modes: 1,
            ..SystemConfig::default()
        };
        assert!(retardation_time(&single).unwrap().is_finite());
    }

    #[test]
    fn rejects_bad_configs() {
        let bad = [
            SystemConfig {
                n_modes: 4,
                ..SystemConfig::default()
            },
            SystemConfig {
                n_modes: 0,
                ..SystemConfig::default()
            },
            SystemConfig {
                omega_a: -1.0,
                ..SystemConfig::default()
            },
            SystemConfig {
                length_ratio: 0.0,
                ..SystemConfig::default()
            },
            SystemConfig {
                theta: 2.0,
                ..SystemConfig::default()
            },
            // 21 modes spaced by ω_a/5 would put the lowest mode at -ω_a.
            SystemConfig {
                omega_a: 10.0,
                length_ratio: 5.0,
                n_modes: 21,
                ..SystemConfig::default()
            },
        ];
        for cfg in bad {
            assert!(
                matches!(build_mode_grid(&cfg), Err(Error::InvalidConfig { .. })),
                "{cfg:?}"
            );
        }
    }

    #[test]
    fn profile_parsing() {
        assert_eq!(
            "uniform".parse::<CouplingProfile>().unwrap(),
            CouplingProfile::Uniform
        );
        assert_eq!(
            "sqrtfreq".parse::<CouplingProfile>().unwrap(),
            CouplingProfile::SqrtFrequency
        );
        assert!("lorentzian".parse::<CouplingProfile>().is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn any_config() -> impl Strategy<Value = SystemConfig> {
            (1.0f64..2e4, 1usize..60, 0.0f64..1.0, any::<bool>()).prop_filter_map(
                "lowest mode must stay positive",
                |(omega_a, half, frac, uniform)| {
                    let n_modes = 2 * half + 1;
                    // length_ratio > half guarantees a positive lowest mode
                    let length_ratio = (half as f64 + 1.0) * (1.0 + 10.0 * frac);
                    let cfg = SystemConfig {
                        omega_a,
                        length_ratio,
                        n_modes,
                        theta: 0.3,
                        coupling_profile: if uniform {
                            CouplingProfile::Uniform
                        } else {
                            CouplingProfile::SqrtFrequency
                        },
                    };
                    cfg.validate().ok().map(|_| cfg)
                },
            )
        }

        proptest! {
            #[test]
            fn recurrence_times_spacing_is_tau(cfg in any_config()) {
                let grid = build_mode_grid(&cfg).unwrap();
                let tr = retardation_time(&cfg).unwrap();
                prop_assert!((tr * grid.spacing - TAU).abs() <= 4.0 * f64::EPSILON * TAU);
            }

            #[test]
            fn grid_is_symmetric(cfg in any_config()) {
                let grid = build_mode_grid(&cfg).unwrap();
                let mirrored: Vec<f64> = grid.detunings.iter().rev().map(|d| -d).collect();
                prop_assert_eq!(&mirrored, &grid.detunings);
                if cfg.coupling_profile == CouplingProfile::Uniform {
                    prop_assert!(grid.couplings.iter().all(|&g| g == 1.0));
                }
                prop_assert_eq!(grid.couplings[grid.central()], 1.0);
            }
        }
    }
}
