//! Unit system, parameter set, time grid, and sampled envelopes.
//!
//! Everything downstream works in cavity-linewidth units: rates and
//! frequencies in units of the total cavity linewidth, times in its inverse,
//! and the propagation speed set to one. The linewidth itself is kept as an
//! explicit field so the convention stays testable.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest number of grid steps `TimeGrid::new` will accept.
pub const MAX_GRID_STEPS: f64 = 1e8;

/// Default refinement guard: solvers reject grids coarser than this unless
/// explicitly forced.
pub const COARSE_DT_LIMIT: f64 = 0.01;

/// Physics constants of the pumped three-level emitter in a lossy cavity,
/// in linewidth units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Vacuum Rabi frequency of the emitter-cavity coupling.
    pub rabi_r: f64,
    /// Cavity detuning from the emitter-cavity transition.
    pub delta_k: f64,
    /// Pump detuning from the pumped transition.
    pub delta_p: f64,
    /// Fraction of the cavity decay that is wanted radiative outcoupling,
    /// in `[0, 1]`. The remainder is absorption and other unwanted loss.
    pub gamma_rad_ratio: f64,
    /// Total cavity linewidth. Fixed to 1 by the unit convention.
    pub gamma_total: f64,
}

impl SystemParams {
    /// Convenience constructor with `gamma_total = 1`.
    pub fn new(rabi_r: f64, delta_k: f64, delta_p: f64, gamma_rad_ratio: f64) -> Self {
        Self {
            rabi_r,
            delta_k,
            delta_p,
            gamma_rad_ratio,
            gamma_total: 1.0,
        }
    }

    /// Validates every field range and returns the set unchanged.
    pub fn validated(self) -> Result<Self> {
        if !self.rabi_r.is_finite() || self.rabi_r < 0.0 {
            return Err(Error::Parameter(format!(
                "rabi_r must be finite and >= 0, got {}",
                self.rabi_r
            )));
        }
        if !self.delta_k.is_finite() {
            return Err(Error::Parameter("delta_k must be finite".into()));
        }
        if !self.delta_p.is_finite() {
            return Err(Error::Parameter("delta_p must be finite".into()));
        }
        if !(0.0..=1.0).contains(&self.gamma_rad_ratio) {
            return Err(Error::Parameter(format!(
                "gamma_rad_ratio must lie in [0, 1], got {}",
                self.gamma_rad_ratio
            )));
        }
        // Unit convention: the linewidth is the unit of rate.
        if self.gamma_total != 1.0 {
            return Err(Error::Parameter(format!(
                "gamma_total must equal 1 (linewidth units), got {}",
                self.gamma_total
            )));
        }
        Ok(self)
    }

    /// Builds the dimensionless set from rates expressed in physical units
    /// (any common unit, e.g. s^-1), dividing through by the total linewidth.
    pub fn from_physical(
        rabi_r: f64,
        delta_k: f64,
        delta_p: f64,
        gamma_rad: f64,
        gamma_total: f64,
    ) -> Result<Self> {
        if gamma_total <= 0.0 || !gamma_total.is_finite() {
            return Err(Error::Parameter(format!(
                "gamma_total must be > 0, got {gamma_total}"
            )));
        }
        Self {
            rabi_r: rabi_r / gamma_total,
            delta_k: delta_k / gamma_total,
            delta_p: delta_p / gamma_total,
            gamma_rad_ratio: gamma_rad / gamma_total,
            gamma_total: 1.0,
        }
        .validated()
    }

    /// Converts back to physical rates for a given linewidth; the inverse of
    /// [`SystemParams::from_physical`].
    pub fn to_physical(&self, gamma_total: f64) -> (f64, f64, f64, f64, f64) {
        (
            self.rabi_r * gamma_total,
            self.delta_k * gamma_total,
            self.delta_p * gamma_total,
            self.gamma_rad_ratio * gamma_total,
            self.gamma_total * gamma_total,
        )
    }

    /// Complex cavity pole in the rotating frame: detuning minus half the
    /// linewidth on the imaginary axis.
    pub fn cavity_pole(&self) -> Complex64 {
        Complex64::new(self.delta_k, -0.5 * self.gamma_total)
    }

    /// Wanted radiative part of the cavity decay rate.
    pub fn gamma_rad(&self) -> f64 {
        self.gamma_rad_ratio * self.gamma_total
    }
}

/// Uniform time grid on `[0, t_end]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t_end: f64,
    dt: f64,
    n: usize,
}

impl TimeGrid {
    /// Builds a grid with samples `t_j = j*dt`, `j = 0..n-1`, where
    /// `n = round(t_end/dt) + 1`. `t_end` must be a multiple of `dt` so the
    /// last sample lands on `t_end` to rounding accuracy.
    pub fn new(t_end: f64, dt: f64) -> Result<Self> {
        if t_end <= 0.0 || !t_end.is_finite() {
            return Err(Error::Parameter(format!("t_end must be > 0, got {t_end}")));
        }
        if dt <= 0.0 || !dt.is_finite() {
            return Err(Error::Parameter(format!("dt must be > 0, got {dt}")));
        }
        let steps = t_end / dt;
        if steps > MAX_GRID_STEPS {
            return Err(Error::Capacity(format!(
                "grid would need {steps:.3e} steps (limit {MAX_GRID_STEPS:.0e})"
            )));
        }
        let rounded = steps.round();
        if (steps - rounded).abs() > 1e-6 * rounded.max(1.0) {
            return Err(Error::Parameter(format!(
                "t_end = {t_end} is not a multiple of dt = {dt}"
            )));
        }
        Ok(Self {
            t_end,
            dt,
            n: rounded as usize + 1,
        })
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Number of samples, including both endpoints.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Time of sample `j`.
    pub fn time(&self, j: usize) -> f64 {
        j as f64 * self.dt
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|j| self.time(j))
    }

    /// Index of the sample nearest to `t`, if `t` lies on the grid within a
    /// relative tolerance of 1e-6 steps.
    pub fn index_of(&self, t: f64) -> Result<usize> {
        let x = t / self.dt;
        let j = x.round();
        if (x - j).abs() > 1e-6 {
            return Err(Error::Domain(format!("t = {t} is not a grid sample")));
        }
        if j < 0.0 || j as usize >= self.n {
            return Err(Error::Domain(format!(
                "t = {t} outside grid [0, {}]",
                self.t_end
            )));
        }
        Ok(j as usize)
    }
}

/// A sampled, non-negative time profile on a uniform grid: the pump Rabi
/// envelope or the emitter-cavity interaction shape.
#[derive(Debug, Clone, PartialEq)]
pub struct Envelope {
    grid: TimeGrid,
    samples: Vec<f64>,
    label: String,
}

impl Envelope {
    pub fn new(grid: TimeGrid, samples: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if samples.len() != grid.n() {
            return Err(Error::Parameter(format!(
                "envelope has {} samples but the grid has {}",
                samples.len(),
                grid.n()
            )));
        }
        if let Some(bad) = samples.iter().find(|s| !s.is_finite() || **s < 0.0) {
            return Err(Error::Parameter(format!(
                "envelope samples must be finite and >= 0, found {bad}"
            )));
        }
        Ok(Self {
            grid,
            samples,
            label: label.into(),
        })
    }

    /// Constant envelope of the given value.
    pub fn constant(grid: TimeGrid, value: f64) -> Result<Self> {
        Self::new(grid, vec![value; grid.n()], format!("constant({value})"))
    }

    /// Identically-zero envelope.
    pub fn zero(grid: TimeGrid) -> Self {
        Self {
            grid,
            samples: vec![0.0; grid.n()],
            label: "zero".into(),
        }
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn peak(&self) -> f64 {
        self.samples.iter().cloned().fold(0.0, f64::max)
    }

    /// Linear interpolation between the two bracketing samples, exact at
    /// grid points (points within 1e-6 steps of a node snap to it).
    pub fn eval(&self, t: f64) -> Result<f64> {
        let x = t / self.grid.dt();
        let last = (self.grid.n() - 1) as f64;
        if x < -1e-6 || x > last + 1e-6 {
            return Err(Error::Domain(format!(
                "t = {t} outside envelope domain [0, {}]",
                self.grid.t_end()
            )));
        }
        let nearest = x.round();
        if (x - nearest).abs() <= 1e-6 {
            return Ok(self.samples[nearest.clamp(0.0, last) as usize]);
        }
        let j = x.floor() as usize;
        let frac = x - j as f64;
        Ok(self.samples[j] * (1.0 - frac) + self.samples[j + 1] * frac)
    }
}
