//! Simulation and inverse design of single-photon emission from a pumped
//! three-level emitter in a lossy cavity.
//!
//! The library solves the reduced emitter-cavity dynamics (a Volterra-type
//! integro-differential equation with exponential memory, plus an equivalent
//! local formulation), extracts the one-photon generation efficiency, the
//! outgoing wave-packet shape, its spectrum, and the single-mode Wigner
//! function, and inverts the chain: given a desired packet shape and
//! efficiency, it synthesizes the pump envelope that emits it.
//!
//! Everything is expressed in cavity-linewidth units; see [`model`].
//!
//! # Quick start
//!
//! ```
//! use photon_shaper_core::*;
//!
//! // a Gaussian pump pulse at constant emitter-cavity coupling
//! let grid = TimeGrid::new(30.0, 0.001)?;
//! let pump = render_pulse(
//!     &PulseSpec::Gaussian { amplitude: 1.0, center: 10.0, width: 3.0 },
//!     &grid,
//! )?;
//! let coupling = Envelope::constant(grid, 1.0)?;
//! let params = SystemParams::new(2.0, 0.0, 0.0, 0.9);
//!
//! let traj = solve_ode(&params, &pump, &coupling, &grid)?;
//! let eta = efficiency_curve(&traj, &params);
//! let packet = wavepacket(&traj, &params, &coupling, 30.0)?;
//! assert!(packet.eta_t > 0.0 && packet.eta_t <= params.gamma_rad_ratio);
//! assert_eq!(eta.len(), grid.n());
//! # Ok::<(), photon_shaper_core::Error>(())
//! ```

pub mod error;
pub mod inverse;
pub mod io;
pub mod model;
pub mod observables;
pub mod pulse;
pub mod solver;

pub use error::{Error, Result};
pub use inverse::{
    c2_from_target, pump_from_target, pump_ode_reference, required_drive, round_trip, DesignTarget,
    PumpDesign, RoundTripReport,
};
pub use model::{Envelope, SystemParams, TimeGrid};
pub use observables::{
    efficiency_by_double_integral, efficiency_curve, intensity, spectrum, wavepacket, wigner_mode1,
    SpectralDensity, WavePacket,
};
pub use pulse::{render_pulse, PulseSpec};
pub use solver::{
    kernel, solve_ode, solve_ode_with, solve_volterra, solve_volterra_with, AmplitudeTrajectory,
    SolveOptions,
};

/// Library version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
