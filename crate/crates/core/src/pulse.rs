//! Named envelope families for pump pulses and emitter-cavity interaction
//! shapes.

use std::fmt;

use crate::error::{Error, Result};
use crate::model::{Envelope, TimeGrid};

/// Parametric description of an envelope. `amplitude` is always the global
/// peak of the rendered envelope (for `Constant`, the value everywhere).
#[derive(Debug, Clone, PartialEq)]
pub enum PulseSpec {
    /// `A exp(-(t-c)^2 / 2w^2)`
    Gaussian {
        amplitude: f64,
        center: f64,
        width: f64,
    },
    /// `A sin^2(pi (t-c+w) / 2w)` on `[c-w, c+w]`, exactly zero outside.
    Sin2 {
        amplitude: f64,
        center: f64,
        width: f64,
    },
    /// Sum of two Gaussians, rescaled so the global peak equals `amplitude`.
    DoubleGaussian {
        amplitude: f64,
        centers: [f64; 2],
        widths: [f64; 2],
    },
    /// Smoothed rectangle `A/4 [1+tanh((t-c+w)/r)][1-tanh((t-c-w)/r)]` with
    /// edge ramp `r`, rescaled so the peak equals `amplitude`.
    Flattop {
        amplitude: f64,
        center: f64,
        width: f64,
        ramp: f64,
    },
    Constant {
        amplitude: f64,
    },
    /// `A (1 + m sin(2 pi t / P)) / (1 + m)`: peak `A`, mean `A/(1+m)`.
    Oscillating {
        amplitude: f64,
        depth: f64,
        period: f64,
    },
}

impl PulseSpec {
    pub fn amplitude(&self) -> f64 {
        match *self {
            PulseSpec::Gaussian { amplitude, .. }
            | PulseSpec::Sin2 { amplitude, .. }
            | PulseSpec::DoubleGaussian { amplitude, .. }
            | PulseSpec::Flattop { amplitude, .. }
            | PulseSpec::Constant { amplitude }
            | PulseSpec::Oscillating { amplitude, .. } => amplitude,
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            PulseSpec::Gaussian { .. } => "gaussian",
            PulseSpec::Sin2 { .. } => "sin2",
            PulseSpec::DoubleGaussian { .. } => "double_gaussian",
            PulseSpec::Flattop { .. } => "flattop",
            PulseSpec::Constant { .. } => "constant",
            PulseSpec::Oscillating { .. } => "oscillating",
        }
    }

    fn validate(&self, grid: &TimeGrid) -> Result<()> {
        let t_end = grid.t_end();
        let check_amplitude = |a: f64| -> Result<()> {
            if !a.is_finite() || a < 0.0 {
                return Err(Error::Parameter(format!(
                    "amplitude must be finite and >= 0, got {a}"
                )));
            }
            Ok(())
        };
        let check_center = |c: f64| -> Result<()> {
            if !(0.0..=t_end).contains(&c) {
                return Err(Error::Parameter(format!(
                    "center {c} outside the grid [0, {t_end}]"
                )));
            }
            Ok(())
        };
        let check_width = |w: f64| -> Result<()> {
            if w <= 0.0 || !w.is_finite() {
                return Err(Error::Parameter(format!("width must be > 0, got {w}")));
            }
            Ok(())
        };
        match *self {
            PulseSpec::Gaussian {
                amplitude,
                center,
                width,
            }
            | PulseSpec::Sin2 {
                amplitude,
                center,
                width,
            } => {
                check_amplitude(amplitude)?;
                check_center(center)?;
                check_width(width)
            }
            PulseSpec::DoubleGaussian {
                amplitude,
                centers,
                widths,
            } => {
                check_amplitude(amplitude)?;
                for c in centers {
                    check_center(c)?;
                }
                for w in widths {
                    check_width(w)?;
                }
                Ok(())
            }
            PulseSpec::Flattop {
                amplitude,
                center,
                width,
                ramp,
            } => {
                check_amplitude(amplitude)?;
                check_center(center)?;
                check_width(width)?;
                if ramp <= 0.0 || !ramp.is_finite() {
                    return Err(Error::Parameter(format!("ramp must be > 0, got {ramp}")));
                }
                Ok(())
            }
            PulseSpec::Constant { amplitude } => check_amplitude(amplitude),
            PulseSpec::Oscillating {
                amplitude,
                depth,
                period,
            } => {
                check_amplitude(amplitude)?;
                if !(0.0..1.0).contains(&depth) {
                    return Err(Error::Parameter(format!(
                        "modulation depth must lie in [0, 1), got {depth}"
                    )));
                }
                if period <= 0.0 || !period.is_finite() {
                    return Err(Error::Parameter(format!(
                        "modulation period must be > 0, got {period}"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Raw family formula before any peak rescaling.
    fn raw_value(&self, t: f64) -> f64 {
        match *self {
            PulseSpec::Gaussian {
                amplitude,
                center,
                width,
            } => amplitude * (-(t - center).powi(2) / (2.0 * width * width)).exp(),
            PulseSpec::Sin2 {
                amplitude,
                center,
                width,
            } => {
                // closed at zero on both edges so the support is exact
                if t <= center - width || t >= center + width {
                    0.0
                } else {
                    let arg = std::f64::consts::PI * (t - center + width) / (2.0 * width);
                    amplitude * arg.sin().powi(2)
                }
            }
            PulseSpec::DoubleGaussian {
                amplitude,
                centers,
                widths,
            } => {
                amplitude
                    * ((-(t - centers[0]).powi(2) / (2.0 * widths[0] * widths[0])).exp()
                        + (-(t - centers[1]).powi(2) / (2.0 * widths[1] * widths[1])).exp())
            }
            PulseSpec::Flattop {
                amplitude,
                center,
                width,
                ramp,
            } => {
                amplitude
                    * 0.25
                    * (1.0 + ((t - center + width) / ramp).tanh())
                    * (1.0 - ((t - center - width) / ramp).tanh())
            }
            PulseSpec::Constant { amplitude } => amplitude,
            PulseSpec::Oscillating {
                amplitude,
                depth,
                period,
            } => {
                amplitude * (1.0 + depth * (std::f64::consts::TAU * t / period).sin())
                    / (1.0 + depth)
            }
        }
    }

    /// Whether the rendered samples must be rescaled so that the global peak
    /// equals `amplitude`. Needed where the raw formula peaks below `A`:
    /// overlapping Gaussian pairs, and flattops with moderate `width/ramp`.
    fn rescales_to_peak(&self) -> bool {
        matches!(
            self,
            PulseSpec::DoubleGaussian { .. } | PulseSpec::Flattop { .. }
        )
    }
}

impl fmt::Display for PulseSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            PulseSpec::Gaussian {
                amplitude,
                center,
                width,
            } => write!(f, "gaussian(A={amplitude}, c={center}, w={width})"),
            PulseSpec::Sin2 {
                amplitude,
                center,
                width,
            } => write!(f, "sin2(A={amplitude}, c={center}, w={width})"),
            PulseSpec::DoubleGaussian {
                amplitude,
                centers,
                widths,
            } => write!(
                f,
                "double_gaussian(A={amplitude}, c={:?}, w={:?})",
                centers, widths
            ),
            PulseSpec::Flattop {
                amplitude,
                center,
                width,
                ramp,
            } => write!(f, "flattop(A={amplitude}, c={center}, w={width}, r={ramp})"),
            PulseSpec::Constant { amplitude } => write!(f, "constant(A={amplitude})"),
            PulseSpec::Oscillating {
                amplitude,
                depth,
                period,
            } => write!(f, "oscillating(A={amplitude}, m={depth}, P={period})"),
        }
    }
}

/// Samples the family formula on the grid.
pub fn render_pulse(spec: &PulseSpec, grid: &TimeGrid) -> Result<Envelope> {
    spec.validate(grid)?;
    let mut samples: Vec<f64> = grid.times().map(|t| spec.raw_value(t)).collect();
    if spec.rescales_to_peak() {
        let peak = samples.iter().cloned().fold(0.0, f64::max);
        if peak > 0.0 {
            let scale = spec.amplitude() / peak;
            for s in &mut samples {
                *s *= scale;
            }
        }
    }
    Envelope::new(*grid, samples, spec.to_string())
}
