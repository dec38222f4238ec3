//! CSV serialization of envelopes, trajectories, wave packets, and spectra.
//!
//! Floats are written in Rust's shortest round-trip decimal form, so
//! re-ingesting a file reproduces the original values bit for bit. All
//! writes go through a temporary file plus rename.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{Envelope, TimeGrid};
use crate::observables::{intensity, SpectralDensity, WavePacket};
use crate::solver::AmplitudeTrajectory;

/// Writes `content` to `path` atomically (temp file + rename).
pub fn write_atomic(path: &Path, content: &str) -> Result<()> {
    let tmp = path.with_extension(match path.extension() {
        Some(e) => format!("{}.tmp", e.to_string_lossy()),
        None => "tmp".to_string(),
    });
    {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(content.as_bytes())?;
        file.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Two-column envelope CSV with header `# t,value`.
pub fn write_envelope_csv(path: &Path, env: &Envelope) -> Result<()> {
    let mut out = String::from("# t,value\n");
    for (j, s) in env.samples().iter().enumerate() {
        out.push_str(&format!("{},{}\n", env.grid().time(j), s));
    }
    write_atomic(path, &out)
}

/// Reads a two-column envelope CSV produced by [`write_envelope_csv`] (or by
/// hand, provided the grid is uniform and starts at zero).
pub fn read_envelope_csv(path: &Path) -> Result<Envelope> {
    let text = fs::read_to_string(path)?;
    let mut times = Vec::new();
    let mut values = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split(',');
        let (t, v) = match (parts.next(), parts.next(), parts.next()) {
            (Some(t), Some(v), None) => (t.trim(), v.trim()),
            _ => {
                return Err(Error::Format(format!(
                    "{}:{}: expected two comma-separated columns",
                    path.display(),
                    lineno + 1
                )))
            }
        };
        let t: f64 = t.parse().map_err(|_| {
            Error::Format(format!("{}:{}: bad time '{t}'", path.display(), lineno + 1))
        })?;
        let v: f64 = v.parse().map_err(|_| {
            Error::Format(format!(
                "{}:{}: bad value '{v}'",
                path.display(),
                lineno + 1
            ))
        })?;
        times.push(t);
        values.push(v);
    }
    if times.len() < 2 {
        return Err(Error::Format(format!(
            "{}: an envelope needs at least two samples",
            path.display()
        )));
    }
    if times[0].abs() > 1e-12 {
        return Err(Error::Format(format!(
            "{}: envelope grid must start at t = 0, got {}",
            path.display(),
            times[0]
        )));
    }
    let dt = times[1] - times[0];
    let grid = TimeGrid::new(times[times.len() - 1], dt)?;
    if grid.n() != times.len() {
        return Err(Error::Format(format!(
            "{}: grid is not uniform ({} samples vs {} expected)",
            path.display(),
            times.len(),
            grid.n()
        )));
    }
    for (j, &t) in times.iter().enumerate() {
        if (t - grid.time(j)).abs() > 1e-9 * (1.0 + t.abs()) {
            return Err(Error::Format(format!(
                "{}: non-uniform step near t = {t}",
                path.display()
            )));
        }
    }
    Envelope::new(grid, values, format!("csv:{}", path.display()))
}

/// Trajectory CSV with columns t, Re/Im of each amplitude, and leakage.
pub fn write_trajectory_csv(path: &Path, traj: &AmplitudeTrajectory) -> Result<()> {
    let mut out = String::from("# t,re_c1,im_c1,re_c2,im_c2,re_cc,im_cc,leaked\n");
    for j in 0..traj.grid.n() {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            traj.grid.time(j),
            traj.c1[j].re,
            traj.c1[j].im,
            traj.c2[j].re,
            traj.c2[j].im,
            traj.c_cav[j].re,
            traj.c_cav[j].im,
            traj.leaked[j],
        ));
    }
    write_atomic(path, &out)
}

/// Wave-packet CSV against retarded time; also carries the distance column
/// `z/c = T - tau` and the intensity.
pub fn write_wavepacket_csv(path: &Path, wp: &WavePacket) -> Result<()> {
    let mut out = String::from("# tau,z_over_c,re_phi,im_phi,abs_phi,intensity\n");
    let intens = intensity(wp);
    for ((tau, phi), i) in wp.tau.iter().zip(&wp.phi).zip(&intens) {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            tau,
            wp.t_snapshot - tau,
            phi.re,
            phi.im,
            phi.norm(),
            i,
        ));
    }
    write_atomic(path, &out)
}

/// Spectral-density CSV.
pub fn write_spectrum_csv(path: &Path, sd: &SpectralDensity) -> Result<()> {
    let mut out = String::from("# delta,s\n");
    for (d, s) in sd.delta.iter().zip(&sd.s) {
        out.push_str(&format!("{d},{s}\n"));
    }
    write_atomic(path, &out)
}
