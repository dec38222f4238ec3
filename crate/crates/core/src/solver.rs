//! Reduced emitter-cavity dynamics.
//!
//! The excited-state amplitude obeys an integro-differential equation of
//! Volterra type with a two-term exponential memory kernel. Two independent
//! solution routes are provided and must agree:
//!
//! * [`solve_volterra`] integrates the equation literally, re-summing the
//!   memory integral over the stored history by composite trapezoid at every
//!   Runge-Kutta stage. Cost O(n^2); it is the transparent reference path.
//! * [`solve_ode`] carries the memory in auxiliary local amplitudes (the
//!   kernel is separable), giving an equivalent three-state ODE system
//!   integrated by RK4 at O(n). This is the production path.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{Envelope, SystemParams, TimeGrid, COARSE_DT_LIMIT};

/// Default cost ceiling for the O(n^2) Volterra path, in units of inner
/// history operations (roughly `n^2`). Keeps the reference path to runs of a
/// few tens of linewidth times at the default step.
pub const DEFAULT_VOLTERRA_BUDGET: u64 = 10_000_000_000;

/// Knobs shared by both solvers.
#[derive(Debug, Clone, Copy, Default)]
pub struct SolveOptions {
    /// Accept grids coarser than the default refinement guard.
    pub allow_coarse: bool,
    /// Cost ceiling for [`solve_volterra`]; `None` uses the default.
    pub volterra_budget: Option<u64>,
}

/// Full dynamical record of one run: ground, excited, and effective cavity
/// amplitudes on the grid, plus the accumulated cavity decay.
#[derive(Debug, Clone)]
pub struct AmplitudeTrajectory {
    pub grid: TimeGrid,
    /// Ground-state amplitude.
    pub c1: Vec<Complex64>,
    /// Excited-state amplitude.
    pub c2: Vec<Complex64>,
    /// Effective cavity-mode amplitude carrying the kernel memory.
    pub c_cav: Vec<Complex64>,
    /// Accumulated decay: the linewidth times the running integral of
    /// `|c_cav|^2`. Non-decreasing.
    pub leaked: Vec<f64>,
}

impl AmplitudeTrajectory {
    /// Norm residual `|C1|^2 + |C2|^2 + |Cc|^2 + leaked - 1` at sample `j`.
    pub fn norm_residual(&self, j: usize) -> f64 {
        self.c1[j].norm_sqr() + self.c2[j].norm_sqr() + self.c_cav[j].norm_sqr() + self.leaked[j]
            - 1.0
    }

    /// Largest norm residual magnitude over the whole run.
    pub fn max_norm_residual(&self) -> f64 {
        (0..self.grid.n())
            .map(|j| self.norm_residual(j).abs())
            .fold(0.0, f64::max)
    }
}

/// Memory kernel `K(t, t')` of the excited-state equation:
/// a pump-mediated term and a cavity-mediated term, both exponential in
/// `t - t'`.
pub fn kernel(
    p: &SystemParams,
    pump: &Envelope,
    g: &Envelope,
    t: f64,
    t_prime: f64,
) -> Result<Complex64> {
    if t_prime > t {
        return Err(Error::Domain(format!(
            "kernel requires t' <= t, got t' = {t_prime}, t = {t}"
        )));
    }
    let tau = t - t_prime;
    let pump_term =
        -0.25 * pump.eval(t)? * pump.eval(t_prime)? * Complex64::from_polar(1.0, -p.delta_p * tau);
    // exp(-i (delta_k - i Gamma/2) tau) decays at half the linewidth
    let cavity_phase = Complex64::new(-0.5 * p.gamma_total * tau, -p.delta_k * tau).exp();
    let cavity_term = -0.25 * p.rabi_r * p.rabi_r * g.eval(t)? * g.eval(t_prime)? * cavity_phase;
    Ok(pump_term + cavity_term)
}

/// Node and midpoint samples of both envelopes, shared by the two solvers so
/// cross-validation isolates the memory-term treatment.
struct SampledDrive {
    pump_node: Vec<f64>,
    pump_mid: Vec<f64>,
    g_node: Vec<f64>,
    g_mid: Vec<f64>,
}

fn sample_drive(pump: &Envelope, g: &Envelope, grid: &TimeGrid) -> Result<SampledDrive> {
    let n = grid.n();
    let h = grid.dt();
    let mut pump_node = Vec::with_capacity(n);
    let mut g_node = Vec::with_capacity(n);
    let mut pump_mid = Vec::with_capacity(n - 1);
    let mut g_mid = Vec::with_capacity(n - 1);
    for j in 0..n {
        let t = grid.time(j);
        pump_node.push(pump.eval(t)?);
        g_node.push(g.eval(t)?);
        if j + 1 < n {
            pump_mid.push(pump.eval(t + 0.5 * h)?);
            g_mid.push(g.eval(t + 0.5 * h)?);
        }
    }
    Ok(SampledDrive {
        pump_node,
        pump_mid,
        g_node,
        g_mid,
    })
}

fn check_preconditions(
    p: &SystemParams,
    pump: &Envelope,
    g: &Envelope,
    grid: &TimeGrid,
    opts: &SolveOptions,
) -> Result<()> {
    p.validated()?;
    if grid.dt() > COARSE_DT_LIMIT && !opts.allow_coarse {
        return Err(Error::Refinement(format!(
            "grid dt = {} is coarser than {COARSE_DT_LIMIT}; force explicitly to proceed",
            grid.dt()
        )));
    }
    for (env, name) in [(pump, "pump"), (g, "coupling")] {
        if env.grid().t_end() + 1e-9 < grid.t_end() {
            return Err(Error::Parameter(format!(
                "{name} envelope covers [0, {}] but the solve grid ends at {}",
                env.grid().t_end(),
                grid.t_end()
            )));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// O(n) path: equivalent local system
// ---------------------------------------------------------------------------

/// Solves the dynamics as the equivalent local system
///
/// ```text
/// dC1/dt = (i/2) Omega(t) e^{+i dp t} C2
/// dC2/dt = (i/2) Omega(t) e^{-i dp t} C1 - (R/2) g(t) Cc
/// dCc/dt = (R/2) g(t) C2 - (i dk + G/2) Cc
/// ```
///
/// from `(1, 0, 0)`, by classic RK4. The accumulated decay rides along as a
/// fourth state variable so norm conservation holds to the integrator's
/// order.
pub fn solve_ode(
    p: &SystemParams,
    pump: &Envelope,
    g: &Envelope,
    grid: &TimeGrid,
) -> Result<AmplitudeTrajectory> {
    solve_ode_with(p, pump, g, grid, &SolveOptions::default())
}

pub fn solve_ode_with(
    p: &SystemParams,
    pump: &Envelope,
    g: &Envelope,
    grid: &TimeGrid,
    opts: &SolveOptions,
) -> Result<AmplitudeTrajectory> {
    check_preconditions(p, pump, g, grid, opts)?;
    let drive = sample_drive(pump, g, grid)?;
    let n = grid.n();
    let h = grid.dt();
    let half_r = 0.5 * p.rabi_r;
    let pole = Complex64::new(0.5 * p.gamma_total, p.delta_k); // decay + rotation of Cc
    let gamma = p.gamma_total;

    // state: (c1, c2, cc, leaked)
    type State = (Complex64, Complex64, Complex64, f64);
    let rhs = |t: f64, s: &State, omega: f64, gv: f64| -> State {
        let ph = Complex64::from_polar(1.0, -p.delta_p * t); // e^{-i dp t}
        let half_drive = Complex64::i() * (0.5 * omega);
        (
            half_drive * ph.conj() * s.1,
            half_drive * ph * s.0 - half_r * gv * s.2,
            half_r * gv * s.1 - pole * s.2,
            gamma * s.2.norm_sqr(),
        )
    };
    let add = |s: &State, k: &State, w: f64| -> State {
        (s.0 + w * k.0, s.1 + w * k.1, s.2 + w * k.2, s.3 + w * k.3)
    };

    let mut c1 = Vec::with_capacity(n);
    let mut c2 = Vec::with_capacity(n);
    let mut c_cav = Vec::with_capacity(n);
    let mut leaked = Vec::with_capacity(n);
    let mut s: State = (
        Complex64::new(1.0, 0.0),
        Complex64::ZERO,
        Complex64::ZERO,
        0.0,
    );
    c1.push(s.0);
    c2.push(s.1);
    c_cav.push(s.2);
    leaked.push(s.3);

    for j in 0..n - 1 {
        let t = grid.time(j);
        let tm = t + 0.5 * h;
        let t1 = t + h;
        let k1 = rhs(t, &s, drive.pump_node[j], drive.g_node[j]);
        let k2 = rhs(
            tm,
            &add(&s, &k1, 0.5 * h),
            drive.pump_mid[j],
            drive.g_mid[j],
        );
        let k3 = rhs(
            tm,
            &add(&s, &k2, 0.5 * h),
            drive.pump_mid[j],
            drive.g_mid[j],
        );
        let k4 = rhs(
            t1,
            &add(&s, &k3, h),
            drive.pump_node[j + 1],
            drive.g_node[j + 1],
        );
        s = (
            s.0 + (h / 6.0) * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
            s.1 + (h / 6.0) * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
            s.2 + (h / 6.0) * (k1.2 + 2.0 * k2.2 + 2.0 * k3.2 + k4.2),
            s.3 + (h / 6.0) * (k1.3 + 2.0 * k2.3 + 2.0 * k3.3 + k4.3),
        );
        c1.push(s.0);
        c2.push(s.1);
        c_cav.push(s.2);
        leaked.push(s.3);
    }

    Ok(AmplitudeTrajectory {
        grid: *grid,
        c1,
        c2,
        c_cav,
        leaked,
    })
}

// ---------------------------------------------------------------------------
// O(n^2) path: literal memory integral
// ---------------------------------------------------------------------------

/// Solves the integro-differential equation directly. At every RK4 stage the
/// memory integral is evaluated by composite trapezoid over the stored
/// history, with the current stage entering through its provisional value.
///
/// The kernel's two exponential factors are split into per-node weights and
/// a prefactor at the evaluation time, so the history sum is a plain dot
/// product; [`kernel`] values are recovered exactly as the products of these
/// factors. Ground, cavity, and leaked records are reconstructed afterwards
/// by trapezoid quadrature of their defining integrals.
pub fn solve_volterra(
    p: &SystemParams,
    pump: &Envelope,
    g: &Envelope,
    grid: &TimeGrid,
) -> Result<AmplitudeTrajectory> {
    solve_volterra_with(p, pump, g, grid, &SolveOptions::default())
}

pub fn solve_volterra_with(
    p: &SystemParams,
    pump: &Envelope,
    g: &Envelope,
    grid: &TimeGrid,
    opts: &SolveOptions,
) -> Result<AmplitudeTrajectory> {
    check_preconditions(p, pump, g, grid, opts)?;
    let n = grid.n();
    let cost = (n as u64).saturating_mul(n as u64);
    let budget = opts.volterra_budget.unwrap_or(DEFAULT_VOLTERRA_BUDGET);
    if cost > budget {
        return Err(Error::Capacity(format!(
            "volterra history cost {cost} exceeds budget {budget}; use solve_ode for long runs"
        )));
    }
    let drive = sample_drive(pump, g, grid)?;
    let h = grid.dt();
    let gamma = p.gamma_total;
    let r2_quarter = 0.25 * p.rabi_r * p.rabi_r;

    // Kernel split: K(t,t') = a_p(t) w_p(t') + a_c(t) w_c(t'), with
    //   a_p(t)  = -1/4 Omega(t) e^{-i dp t},    w_p(t') = Omega(t') e^{+i dp t'}
    //   a_c(t)  = -R^2/4 g(t) e^{-(i dk + G/2) t}, w_c(t') = g(t') e^{+(i dk + G/2) t'}
    let pole = Complex64::new(0.5 * gamma, p.delta_k);
    let w_p: Vec<Complex64> = (0..n)
        .map(|i| drive.pump_node[i] * Complex64::from_polar(1.0, p.delta_p * grid.time(i)))
        .collect();
    let w_c: Vec<Complex64> = (0..n)
        .map(|i| drive.g_node[i] * (pole * grid.time(i)).exp())
        .collect();
    let a_p = |omega: f64, t: f64| -0.25 * omega * Complex64::from_polar(1.0, -p.delta_p * t);
    let a_c = |gv: f64, t: f64| -r2_quarter * gv * (-pole * t).exp();
    let drive_term = |omega: f64, t: f64| {
        Complex64::i() * 0.5 * omega * Complex64::from_polar(1.0, -p.delta_p * t)
    };

    let mut c2 = vec![Complex64::ZERO; n];

    for j in 0..n - 1 {
        let t = grid.time(j);
        let tm = t + 0.5 * h;
        let t1 = t + h;
        let (om_j, g_j) = (drive.pump_node[j], drive.g_node[j]);
        let (om_m, g_m) = (drive.pump_mid[j], drive.g_mid[j]);
        let (om_1, g_1) = (drive.pump_node[j + 1], drive.g_node[j + 1]);

        // Composite trapezoid over the recorded history [0, t_j], re-summed
        // from scratch each step.
        let (mut sum_p, mut sum_c) = (Complex64::ZERO, Complex64::ZERO);
        for i in 0..=j {
            sum_p += w_p[i] * c2[i];
            sum_c += w_c[i] * c2[i];
        }
        let hist_p = h * (sum_p - 0.5 * (w_p[0] * c2[0] + w_p[j] * c2[j]));
        let hist_c = h * (sum_c - 0.5 * (w_c[0] * c2[0] + w_c[j] * c2[j]));

        let w_p_mid = om_m * Complex64::from_polar(1.0, p.delta_p * tm);
        let w_c_mid = g_m * (pole * tm).exp();

        // Stage 1 at t_j: the memory integral ends exactly at the last node.
        let k1 = drive_term(om_j, t) + a_p(om_j, t) * hist_p + a_c(g_j, t) * hist_c;

        // Stages 2 and 3 at the midpoint: history plus a trapezoid panel over
        // [t_j, t_j + h/2] closed by the provisional stage value.
        let mid_memory = |c2_prov: Complex64, om: f64, gv: f64| {
            let int_p = hist_p + 0.25 * h * (w_p[j] * c2[j] + w_p_mid * c2_prov);
            let int_c = hist_c + 0.25 * h * (w_c[j] * c2[j] + w_c_mid * c2_prov);
            a_p(om, tm) * int_p + a_c(gv, tm) * int_c
        };
        let prov1 = c2[j] + 0.5 * h * k1;
        let k2 = drive_term(om_m, tm) + mid_memory(prov1, om_m, g_m);
        let prov2 = c2[j] + 0.5 * h * k2;
        let k3 = drive_term(om_m, tm) + mid_memory(prov2, om_m, g_m);

        // Stage 4 at t_{j+1}.
        let prov3 = c2[j] + h * k3;
        let int_p = hist_p + 0.5 * h * (w_p[j] * c2[j] + w_p[j + 1] * prov3);
        let int_c = hist_c + 0.5 * h * (w_c[j] * c2[j] + w_c[j + 1] * prov3);
        let k4 = drive_term(om_1, t1) + a_p(om_1, t1) * int_p + a_c(g_1, t1) * int_c;

        c2[j + 1] = c2[j] + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }

    // Reconstructions: trapezoid quadrature of the defining integrals.
    let mut c1 = vec![Complex64::new(1.0, 0.0); n];
    let mut c_cav = vec![Complex64::ZERO; n];
    let mut leaked = vec![0.0; n];
    let half_i = Complex64::i() * 0.5;
    let mut acc_p = Complex64::ZERO;
    let mut acc_c = Complex64::ZERO;
    for j in 1..n {
        let y_prev_p = w_p[j - 1] * c2[j - 1];
        let y_this_p = w_p[j] * c2[j];
        acc_p += 0.5 * h * (y_prev_p + y_this_p);
        c1[j] = Complex64::new(1.0, 0.0) + half_i * acc_p;

        let y_prev_c = w_c[j - 1] * c2[j - 1];
        let y_this_c = w_c[j] * c2[j];
        acc_c += 0.5 * h * (y_prev_c + y_this_c);
        c_cav[j] = 0.5 * p.rabi_r * (-pole * grid.time(j)).exp() * acc_c;

        leaked[j] =
            leaked[j - 1] + 0.5 * h * gamma * (c_cav[j - 1].norm_sqr() + c_cav[j].norm_sqr());
    }

    Ok(AmplitudeTrajectory {
        grid: *grid,
        c1,
        c2,
        c_cav,
        leaked,
    })
}
