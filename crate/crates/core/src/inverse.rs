//! Inverse pump design: given a desired outgoing wave-packet shape and a
//! requested efficiency, compute the pump envelope that produces it for a
//! given emitter-cavity interaction.
//!
//! The chain runs target shape -> required excited-state amplitude ->
//! required drive -> pump. The last step solves a Bernoulli-type equation;
//! the production path uses its closed form
//! `f = D / sqrt(1 + 2 Int C2 D)` and a direct RK4 integration of the
//! original equation ships alongside as the cross-check.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{Envelope, SystemParams, TimeGrid};
use crate::observables::{normalized_l2_distance, wavepacket, WavePacket};
use crate::pulse::{render_pulse, PulseSpec};
use crate::solver::solve_ode;

/// Couplings below this floor make the target-to-amplitude map singular.
pub const G_MIN: f64 = 1e-3;

/// Residual pump phase below this is considered a physically realizable
/// real envelope.
pub const PHASE_TOL: f64 = 1e-3;

/// Drive magnitudes below this are treated as zero when starting or holding
/// the reference integration of the pump equation.
const DRIVE_REG: f64 = 1e-8;

/// Regularization scale for the radicand. Requests at the loss ceiling send
/// the radicand to zero together with the drive as emission completes; the
/// Tikhonov form `f = D sqrt(r) / (r + eps)` reduces to `D / sqrt(r)` where
/// `r >> eps` and tapers the pump smoothly to zero through the collapse
/// instead of amplifying quadrature noise into a spurious spike.
const RADICAND_EPS: f64 = 1e-8;

/// Radicand more negative than this is a genuine infeasibility. Requests at
/// the loss ceiling drive the radicand to zero exactly where emission
/// completes, so discretization noise of order dt^2 must not trip the error.
const INFEASIBLE_TOL: f64 = 1e-5;

/// A prescribed outgoing shape (against retarded time) plus the requested
/// one-photon efficiency at the end of the emission window.
#[derive(Debug, Clone)]
pub struct DesignTarget {
    grid: TimeGrid,
    shape: Vec<Complex64>,
    eta_target: f64,
    t_snapshot: f64,
}

impl DesignTarget {
    /// Validates and wraps a complex shape sampled on `grid`.
    ///
    /// The shape must carry unit L2 norm and vanish (with its first
    /// difference) at the start of the window, where the excited amplitude
    /// is pinned to zero by the initial condition.
    pub fn new(grid: TimeGrid, shape: Vec<Complex64>, eta_target: f64) -> Result<Self> {
        if shape.len() != grid.n() {
            return Err(Error::Parameter(format!(
                "target shape has {} samples but the grid has {}",
                shape.len(),
                grid.n()
            )));
        }
        if !(eta_target > 0.0 && eta_target <= 1.0) {
            return Err(Error::Parameter(format!(
                "eta_target must lie in (0, 1], got {eta_target}"
            )));
        }
        let h = grid.dt();
        let norm_sq: f64 = shape
            .windows(2)
            .map(|w| 0.5 * h * (w[0].norm_sqr() + w[1].norm_sqr()))
            .sum();
        if (norm_sq - 1.0).abs() > 1e-6 {
            return Err(Error::Parameter(format!(
                "target shape must be L2-normalized, got |shape|^2 = {norm_sq}"
            )));
        }
        let d0 = (shape[1] - shape[0]).norm() / h;
        if shape[0].norm() > 1e-6 || d0 > 1e-6 {
            return Err(Error::Parameter(format!(
                "target shape must vanish smoothly at the start of the window \
                 (|shape(0)| = {:.3e}, |shape'(0)| = {:.3e})",
                shape[0].norm(),
                d0
            )));
        }
        Ok(Self {
            t_snapshot: grid.t_end(),
            grid,
            shape,
            eta_target,
        })
    }

    /// Builds a target from a real non-negative profile, normalizing it and
    /// applying the phase that zero-detuning forward runs imprint on emitted
    /// packets, so designed pumps come out real.
    pub fn from_profile(spec: &PulseSpec, grid: &TimeGrid, eta_target: f64) -> Result<Self> {
        let profile = render_pulse(spec, grid)?;
        let h = grid.dt();
        let sq: Vec<f64> = profile.samples().iter().map(|s| s * s).collect();
        let norm = crate::observables::trapezoid_uniform(&sq, h).sqrt();
        if norm <= 0.0 {
            return Err(Error::Parameter(
                "target profile is identically zero".into(),
            ));
        }
        let shape: Vec<Complex64> = profile
            .samples()
            .iter()
            .map(|s| Complex64::new(0.0, -s / norm))
            .collect();
        Self::new(*grid, shape, eta_target)
    }

    /// Builds a target from a computed wave packet, renormalizing it to unit
    /// L2 norm. Used to close the loop against the forward solver.
    pub fn from_wavepacket(wp: &WavePacket, eta_target: f64) -> Result<Self> {
        let grid = TimeGrid::new(wp.t_snapshot, wp.dtau())?;
        let h = grid.dt();
        let sq: Vec<f64> = wp.phi.iter().map(|z| z.norm_sqr()).collect();
        let norm = crate::observables::trapezoid_uniform(&sq, h).sqrt();
        let shape: Vec<Complex64> = wp.phi.iter().map(|z| z / norm).collect();
        Self::new(grid, shape, eta_target)
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn shape(&self) -> &[Complex64] {
        &self.shape
    }

    pub fn eta_target(&self) -> f64 {
        self.eta_target
    }

    pub fn t_snapshot(&self) -> f64 {
        self.t_snapshot
    }

    /// Same target at a different requested efficiency.
    pub fn with_eta(&self, eta_target: f64) -> Result<Self> {
        Self::new(self.grid, self.shape.clone(), eta_target)
    }
}

/// Result of a pump design.
#[derive(Debug, Clone)]
pub struct PumpDesign {
    /// Real pump envelope `2 |f(t)|`.
    pub pump: Envelope,
    /// Complex pump function before taking the modulus.
    pub f: Vec<Complex64>,
    /// Real part of the radicand `1 + 2 Int C2 D` along the window.
    pub radicand: Vec<f64>,
    /// Largest residual phase of the complex pump where it has support; a
    /// value above [`PHASE_TOL`] means the requested shape needs a complex
    /// (chirped) pump and is surfaced as a warning, never dropped silently.
    pub phase_max: f64,
}

impl PumpDesign {
    pub fn is_real_pump(&self) -> bool {
        self.phase_max <= PHASE_TOL
    }
}

/// Round-trip validation report: design a pump, run it forward, compare.
#[derive(Debug, Clone)]
pub struct RoundTripReport {
    pub pump: Envelope,
    pub phase_max: f64,
    pub achieved: WavePacket,
    pub achieved_eta: f64,
    pub eta_target: f64,
    /// L2 distance between the unit-normalized achieved and requested
    /// `|shape|` profiles.
    pub l2_error: f64,
}

fn sample_coupling(g: &Envelope, grid: &TimeGrid) -> Result<Vec<f64>> {
    (0..grid.n()).map(|j| g.eval(grid.time(j))).collect()
}

/// Centered differences with second-order one-sided stencils at the ends,
/// so the derivative array carries no first-order kink at the boundaries.
fn centered_derivative(v: &[Complex64], h: f64) -> Vec<Complex64> {
    let n = v.len();
    let mut d = Vec::with_capacity(n);
    for j in 0..n {
        d.push(if j == 0 {
            (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h)
        } else if j == n - 1 {
            (3.0 * v[j] - 4.0 * v[j - 1] + v[j - 2]) / (2.0 * h)
        } else {
            (v[j + 1] - v[j - 1]) / (2.0 * h)
        });
    }
    d
}

/// Excited-state amplitude required to emit the target shape: the inverse of
/// the emission-history integral,
/// `C2(t) = 2/(R g) sqrt(eta/ratio) conj(shape' - i conj(pole) shape)`,
/// with the derivative taken by centered differences.
pub fn c2_from_target(
    target: &DesignTarget,
    p: &SystemParams,
    g: &Envelope,
) -> Result<Vec<Complex64>> {
    let p = p.validated()?;
    if p.rabi_r <= 0.0 {
        return Err(Error::Parameter(
            "rabi_r must be positive for inverse design".into(),
        ));
    }
    if target.eta_target > p.gamma_rad_ratio {
        return Err(Error::Parameter(format!(
            "eta_target = {} exceeds the loss ceiling gamma_rad_ratio = {}",
            target.eta_target, p.gamma_rad_ratio
        )));
    }
    let grid = &target.grid;
    let g_samples = sample_coupling(g, grid)?;
    if let Some((j, bad)) = g_samples.iter().enumerate().find(|(_, v)| **v < G_MIN) {
        return Err(Error::SingularCoupling(format!(
            "coupling drops to {bad} at t = {} (floor {G_MIN})",
            grid.time(j)
        )));
    }
    let h = grid.dt();
    let dshape = centered_derivative(&target.shape, h);
    let pole_conj = Complex64::new(p.delta_k, 0.5 * p.gamma_total); // conj of the cavity pole
    let amp = (target.eta_target / p.gamma_rad_ratio).sqrt();
    let mut c2 = Vec::with_capacity(grid.n());
    for j in 0..grid.n() {
        let bracket = dshape[j] - Complex64::i() * pole_conj * target.shape[j];
        c2.push(2.0 / (p.rabi_r * g_samples[j]) * amp * bracket.conj());
    }
    let peak = c2.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if peak > 1.0 {
        return Err(Error::UnphysicalTarget(format!(
            "target needs |C2| up to {peak:.4}, above the probability-amplitude bound"
        )));
    }
    Ok(c2)
}

/// Drive the pump must supply: the excited-state derivative plus the
/// cavity-memory convolution, evaluated by the same exponential-state
/// trapezoid recursion the forward solver's local system corresponds to.
pub fn required_drive(
    c2: &[Complex64],
    p: &SystemParams,
    g: &Envelope,
    grid: &TimeGrid,
) -> Result<Vec<Complex64>> {
    if c2.len() != grid.n() {
        return Err(Error::Parameter(format!(
            "c2 has {} samples but the grid has {}",
            c2.len(),
            grid.n()
        )));
    }
    let g_samples = sample_coupling(g, grid)?;
    let h = grid.dt();
    let dc2 = centered_derivative(c2, h);
    let decay = (Complex64::new(-0.5 * p.gamma_total, -p.delta_k) * h).exp();
    let quarter_r2 = 0.25 * p.rabi_r * p.rabi_r;
    let mut out = Vec::with_capacity(grid.n());
    let mut conv = Complex64::ZERO; // Int g C2 e^{-(i dk + G/2)(t - t')} dt'
    for j in 0..grid.n() {
        if j > 0 {
            let y_prev = g_samples[j - 1] * c2[j - 1];
            let y_this = g_samples[j] * c2[j];
            conv = decay * conv + 0.5 * h * (decay * y_prev + y_this);
        }
        out.push(dc2[j] + quarter_r2 * g_samples[j] * conv);
    }
    Ok(out)
}

/// O(n^2) reference for [`required_drive`]: the convolution re-summed from
/// scratch at every output time by composite trapezoid.
pub fn required_drive_direct(
    c2: &[Complex64],
    p: &SystemParams,
    g: &Envelope,
    grid: &TimeGrid,
) -> Result<Vec<Complex64>> {
    if c2.len() != grid.n() {
        return Err(Error::Parameter(format!(
            "c2 has {} samples but the grid has {}",
            c2.len(),
            grid.n()
        )));
    }
    let g_samples = sample_coupling(g, grid)?;
    let h = grid.dt();
    let dc2 = centered_derivative(c2, h);
    let pole = Complex64::new(-0.5 * p.gamma_total, -p.delta_k); // -(i dk + G/2)
    let quarter_r2 = 0.25 * p.rabi_r * p.rabi_r;
    let mut out = Vec::with_capacity(grid.n());
    for j in 0..grid.n() {
        let t = grid.time(j);
        let mut sum = Complex64::ZERO;
        // empty interval at j = 0
        for i in 0..=j {
            let weight = if (i == 0 || i == j) && j > 0 {
                0.5
            } else {
                1.0
            };
            sum += weight * g_samples[i] * c2[i] * (pole * (t - grid.time(i))).exp();
        }
        let conv = if j == 0 { Complex64::ZERO } else { h * sum };
        out.push(dc2[j] + quarter_r2 * g_samples[j] * conv);
    }
    Ok(out)
}

/// Designs the pump envelope for a target: closed-form solution of the
/// pump equation via the substitution that linearizes it,
/// `f = D / sqrt(1 + 2 Int_0^t C2 D dt')`, then `Omega = 2 |f|`.
///
/// Errors if the radicand goes genuinely negative (the shape cannot be
/// emitted at the requested efficiency by any real pump). A radicand that
/// merely collapses to zero at the end of the window marks completed
/// emission; the pump is zero from there on.
pub fn pump_from_target(
    target: &DesignTarget,
    p: &SystemParams,
    g: &Envelope,
) -> Result<PumpDesign> {
    let c2 = c2_from_target(target, p, g)?;
    let d = required_drive(&c2, p, g, &target.grid)?;
    let grid = &target.grid;
    let h = grid.dt();
    let n = grid.n();

    // radicand r(t) = 1 + 2 Int C2 D, running trapezoid
    let mut radicand = Vec::with_capacity(n);
    let mut acc = Complex64::ZERO;
    let mut r_complex = Vec::with_capacity(n);
    for j in 0..n {
        if j > 0 {
            acc += 0.5 * h * (c2[j - 1] * d[j - 1] + c2[j] * d[j]);
        }
        let r = Complex64::new(1.0, 0.0) + 2.0 * acc;
        radicand.push(r.re);
        r_complex.push(r);
    }
    if let Some((j, bad)) = radicand
        .iter()
        .enumerate()
        .find(|(_, r)| **r < -INFEASIBLE_TOL)
    {
        return Err(Error::DesignInfeasible(format!(
            "pump radicand reaches {bad:.3e} at t = {}; the target cannot be emitted \
             at eta = {}",
            grid.time(j),
            target.eta_target
        )));
    }

    let mut f = Vec::with_capacity(n);
    for j in 0..n {
        let r_eff = Complex64::new(radicand[j].max(0.0), r_complex[j].im);
        f.push(d[j] * r_eff.sqrt() / (r_eff + RADICAND_EPS));
    }

    let f_peak = f.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut phase_max = 0.0f64;
    if f_peak > 0.0 {
        for (j, fj) in f.iter().enumerate() {
            if fj.norm() > 1e-6 * f_peak {
                let residual = -2.0
                    * Complex64::i()
                    * fj
                    * Complex64::from_polar(1.0, p.delta_p * grid.time(j));
                phase_max = phase_max.max(residual.arg().abs());
            }
        }
    }

    let samples: Vec<f64> = f.iter().map(|z| 2.0 * z.norm()).collect();
    let pump = Envelope::new(*grid, samples, "designed pump")?;
    Ok(PumpDesign {
        pump,
        f,
        radicand,
        phase_max,
    })
}

/// Direct RK4 integration of the pump equation
/// `D df/dt + C2 f^3 - dD/dt f = 0` with `f = D` before the drive has
/// support. Reference route for [`pump_from_target`]; the two must agree
/// wherever the radicand is healthy.
pub fn pump_ode_reference(
    target: &DesignTarget,
    p: &SystemParams,
    g: &Envelope,
) -> Result<Vec<Complex64>> {
    let c2 = c2_from_target(target, p, g)?;
    let grid = &target.grid;
    let d = required_drive(&c2, p, g, grid)?;
    let h = grid.dt();
    let n = grid.n();
    let dd = centered_derivative(&d, h);

    // radicand, for stopping once the closed-form scale has collapsed
    let mut radicand = Vec::with_capacity(n);
    let mut acc = Complex64::ZERO;
    for j in 0..n {
        if j > 0 {
            acc += 0.5 * h * (c2[j - 1] * d[j - 1] + c2[j] * d[j]);
        }
        radicand.push(1.0 + 2.0 * acc.re);
    }

    // Launch where the drive is resolved: above the absolute regularization
    // floor and above relative quadrature noise. Before that point the
    // closed form is f = D to machine accuracy, so handing over f = D there
    // loses nothing.
    let d_peak = d.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let launch_floor = DRIVE_REG.max(1e-5 * d_peak);
    let start = match d.iter().position(|z| z.norm() > launch_floor) {
        Some(j) => j,
        None => return Ok(d), // no drive anywhere: f = D throughout
    };

    let mut f = d.clone(); // f = D up to the regularized start
    let mid = |v: &[Complex64], j: usize| 0.5 * (v[j] + v[j + 1]);
    let rhs = |fj: Complex64, dj: Complex64, ddj: Complex64, c2j: Complex64| -> Complex64 {
        (ddj * fj - c2j * fj * fj * fj) / dj
    };
    let mut current = d[start];
    for j in start..n - 1 {
        // past the collapse of the radicand the equation degenerates; hold
        let degenerate = radicand[j + 1] < 0.05
            || d[j].norm() < DRIVE_REG
            || d[j + 1].norm() < DRIVE_REG
            || mid(&d, j).norm() < DRIVE_REG;
        if degenerate {
            f[j + 1] = current;
            continue;
        }
        let (d_m, dd_m, c2_m) = (mid(&d, j), mid(&dd, j), mid(&c2, j));
        let k1 = rhs(current, d[j], dd[j], c2[j]);
        let k2 = rhs(current + 0.5 * h * k1, d_m, dd_m, c2_m);
        let k3 = rhs(current + 0.5 * h * k2, d_m, dd_m, c2_m);
        let k4 = rhs(current + h * k3, d[j + 1], dd[j + 1], c2[j + 1]);
        current += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        f[j + 1] = current;
    }
    Ok(f)
}

/// Designs a pump, feeds it back through the forward solver, and reports the
/// shape and efficiency discrepancies.
pub fn round_trip(
    target: &DesignTarget,
    p: &SystemParams,
    g: &Envelope,
) -> Result<RoundTripReport> {
    let design = pump_from_target(target, p, g)?;
    let traj = solve_ode(p, &design.pump, g, &target.grid)?;
    let achieved = wavepacket(&traj, p, g, target.t_snapshot)?;
    let achieved_abs = achieved.abs_phi();
    let target_abs: Vec<f64> = target.shape.iter().map(|z| z.norm()).collect();
    let l2_error = normalized_l2_distance(&achieved_abs, &target_abs, target.grid.dt());
    Ok(RoundTripReport {
        pump: design.pump,
        phase_max: design.phase_max,
        achieved_eta: achieved.eta_t,
        achieved,
        eta_target: target.eta_target,
        l2_error,
    })
}
