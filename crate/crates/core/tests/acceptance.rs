//! End-to-end acceptance suite. Each test covers one numbered criterion,
//! prints a single pass/fail line (visible with `--nocapture`), and fails
//! with the measured values of every violated clause.

use std::time::Instant;

use num_complex::Complex64;
use photon_shaper_core::observables::{normalized_l2_distance, trapezoid_uniform};
use photon_shaper_core::*;

struct Criterion {
    id: u32,
    name: &'static str,
    failures: Vec<String>,
}

impl Criterion {
    fn new(id: u32, name: &'static str) -> Self {
        Self {
            id,
            name,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, detail: String) {
        if !ok {
            self.failures.push(detail);
        }
    }

    fn finish(self) {
        if self.failures.is_empty() {
            println!("criterion {:02} {}: PASS", self.id, self.name);
        } else {
            println!(
                "criterion {:02} {}: FAIL [{}]",
                self.id,
                self.name,
                self.failures.join("; ")
            );
            panic!(
                "criterion {:02} {} failed: {}",
                self.id,
                self.name,
                self.failures.join("; ")
            );
        }
    }
}

fn eta_end(traj: &AmplitudeTrajectory, p: &SystemParams) -> f64 {
    p.gamma_rad_ratio * (traj.c_cav.last().unwrap().norm_sqr() + traj.leaked.last().unwrap())
}

fn sup_c2(a: &AmplitudeTrajectory, b: &AmplitudeTrajectory) -> f64 {
    a.c2.iter()
        .zip(&b.c2)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Pump shapes used for the high-efficiency adiabatic-transfer runs;
/// mirrors presets/fig2.ini.
fn vstirap_pumps() -> Vec<(&'static str, PulseSpec)> {
    vec![
        (
            "sin2",
            PulseSpec::Sin2 {
                amplitude: 5.0,
                center: 110.0,
                width: 30.0,
            },
        ),
        (
            "gaussian",
            PulseSpec::Gaussian {
                amplitude: 5.0,
                center: 110.0,
                width: 30.0,
            },
        ),
        (
            "flattop",
            PulseSpec::Flattop {
                amplitude: 5.0,
                center: 110.0,
                width: 30.0,
                ramp: 6.0,
            },
        ),
    ]
}

#[test]
fn criterion_01_vstirap_efficiency() {
    let mut c = Criterion::new(1, "vstirap-efficiency");
    let grid = TimeGrid::new(350.0, 0.001).unwrap();
    let p = SystemParams::new(5.0, 1.0, 1.0, 0.9);
    let g = render_pulse(
        &PulseSpec::Gaussian {
            amplitude: 1.0,
            center: 60.0,
            width: 25.0,
        },
        &grid,
    )
    .unwrap();
    for (name, spec) in vstirap_pumps() {
        let pump = render_pulse(&spec, &grid).unwrap();
        let started = Instant::now();
        let traj = solve_ode(&p, &pump, &g, &grid).unwrap();
        let elapsed = started.elapsed();
        let eta = eta_end(&traj, &p);
        c.check(
            (0.85..=0.90 + 1e-9).contains(&eta),
            format!("{name}: eta = {eta:.6} outside [0.85, 0.90]"),
        );
        c.check(
            elapsed.as_secs_f64() <= 10.0,
            format!("{name}: runtime {elapsed:?} above 10 s"),
        );
    }
    c.finish();
}

#[test]
fn criterion_02_weak_drive_efficiency() {
    let mut c = Criterion::new(2, "weak-drive-efficiency");
    let grid = TimeGrid::new(200.0, 0.001).unwrap();
    let p = SystemParams::new(2.0, 0.0, 0.0, 0.9);
    let g = Envelope::constant(grid, 1.0).unwrap();
    let pump_spec = |a: f64| PulseSpec::Gaussian {
        amplitude: a,
        center: 100.0,
        width: 21.3,
    };
    let run = |a: f64| {
        let pump = render_pulse(&pump_spec(a), &grid).unwrap();
        let traj = solve_ode(&p, &pump, &g, &grid).unwrap();
        (eta_end(&traj, &p), traj)
    };
    let (eta_1, traj_1) = run(0.1);
    let (eta_2, _) = run(0.2);
    let (eta_half, _) = run(0.05);

    c.check(
        (eta_1 - 0.081).abs() <= 0.03,
        format!("eta(0.1) = {eta_1:.4} outside 0.081 +/- 0.03"),
    );

    // Doubling the pump from the operating point leaves the linear-response
    // regime: ground-state depletion at eta ~ 0.08 caps the measured ratio
    // near 3.5 for any pulse long enough to reach that efficiency. The
    // half-amplitude ratio is reported alongside for context.
    let trend = eta_2 / eta_1;
    let trend_below = eta_1 / eta_half;
    c.check(
        (trend - 4.0).abs() <= 0.32,
        format!(
            "eta(0.2)/eta(0.1) = {trend:.4} outside 4 +/- 8% \
             (eta(0.1)/eta(0.05) = {trend_below:.4})"
        ),
    );

    let wp = wavepacket(&traj_1, &p, &g, 200.0).unwrap();
    let pump = render_pulse(&pump_spec(0.1), &grid).unwrap();
    let l2 = normalized_l2_distance(&wp.abs_phi(), pump.samples(), grid.dt());
    c.check(
        l2 <= 0.05,
        format!("packet-vs-pump shape distance {l2:.4} above 0.05"),
    );
    c.finish();
}

#[test]
fn criterion_03_efficiency_ordering() {
    let mut c = Criterion::new(3, "efficiency-ordering");
    let grid = TimeGrid::new(200.0, 0.001).unwrap();
    let g = Envelope::constant(grid, 1.0).unwrap();

    // rising pump amplitude at fixed coupling
    let p2 = SystemParams::new(2.0, 0.0, 0.0, 0.9);
    let mut etas = Vec::new();
    for a in [0.1, 0.4, 0.7, 1.0, 1.5] {
        let pump = render_pulse(
            &PulseSpec::Gaussian {
                amplitude: a,
                center: 100.0,
                width: 21.3,
            },
            &grid,
        )
        .unwrap();
        etas.push(eta_end(&solve_ode(&p2, &pump, &g, &grid).unwrap(), &p2));
    }
    c.check(
        etas.windows(2).all(|w| w[1] > w[0]),
        format!("eta not strictly increasing in pump amplitude: {etas:?}"),
    );

    // rising coupling at fixed single-peak pump
    let pump = render_pulse(
        &PulseSpec::Gaussian {
            amplitude: 0.7,
            center: 100.0,
            width: 21.3,
        },
        &grid,
    )
    .unwrap();
    let mut etas = Vec::new();
    for r in [1.0, 4.0, 7.0] {
        let p = SystemParams::new(r, 0.0, 0.0, 0.9);
        etas.push(eta_end(&solve_ode(&p, &pump, &g, &grid).unwrap(), &p));
    }
    c.check(
        etas.windows(2).all(|w| w[1] < w[0]),
        format!("eta not strictly decreasing in coupling (single peak): {etas:?}"),
    );

    // rising coupling at fixed double-peak pump
    let pump = render_pulse(
        &PulseSpec::DoubleGaussian {
            amplitude: 0.7,
            centers: [70.0, 120.0],
            widths: [14.0, 14.0],
        },
        &grid,
    )
    .unwrap();
    let mut etas = Vec::new();
    for r in [1.0, 4.0, 12.0] {
        let p = SystemParams::new(r, 0.0, 0.0, 0.9);
        etas.push(eta_end(&solve_ode(&p, &pump, &g, &grid).unwrap(), &p));
    }
    c.check(
        etas.windows(2).all(|w| w[1] < w[0]),
        format!("eta not strictly decreasing in coupling (double peak): {etas:?}"),
    );
    c.finish();
}

#[test]
fn criterion_04_efficiency_upper_bound() {
    let mut c = Criterion::new(4, "efficiency-upper-bound");
    let mut check_run = |label: String, traj: &AmplitudeTrajectory, p: &SystemParams| {
        let eta = efficiency_curve(traj, p);
        let worst = eta.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        c.check(
            worst <= p.gamma_rad_ratio + 1e-9,
            format!("{label}: eta reaches {worst:.12}"),
        );
    };

    // short-run matrix
    let grid = TimeGrid::new(20.0, 0.001).unwrap();
    let g = Envelope::constant(grid, 1.0).unwrap();
    for r in [0.0, 2.0, 8.0] {
        for d in [0.0, 1.0] {
            for (kind, spec) in [
                (
                    "gaussian",
                    PulseSpec::Gaussian {
                        amplitude: 1.0,
                        center: 10.0,
                        width: 3.0,
                    },
                ),
                (
                    "double",
                    PulseSpec::DoubleGaussian {
                        amplitude: 1.0,
                        centers: [7.0, 13.0],
                        widths: [2.0, 2.0],
                    },
                ),
            ] {
                let pump = render_pulse(&spec, &grid).unwrap();
                let p = SystemParams::new(r, d, d, 0.9);
                let traj = solve_ode(&p, &pump, &g, &grid).unwrap();
                check_run(format!("R={r} d={d} {kind}"), &traj, &p);
            }
        }
    }

    // adiabatic-transfer runs, where eta approaches the ceiling
    let grid = TimeGrid::new(350.0, 0.001).unwrap();
    let p = SystemParams::new(5.0, 1.0, 1.0, 0.9);
    let g = render_pulse(
        &PulseSpec::Gaussian {
            amplitude: 1.0,
            center: 60.0,
            width: 25.0,
        },
        &grid,
    )
    .unwrap();
    for (name, spec) in vstirap_pumps() {
        let pump = render_pulse(&spec, &grid).unwrap();
        let traj = solve_ode(&p, &pump, &g, &grid).unwrap();
        check_run(format!("vstirap {name}"), &traj, &p);
    }

    // strong long drive saturating the ceiling
    let grid = TimeGrid::new(200.0, 0.001).unwrap();
    let g = Envelope::constant(grid, 1.0).unwrap();
    let p = SystemParams::new(2.0, 0.0, 0.0, 0.9);
    let pump = render_pulse(
        &PulseSpec::Gaussian {
            amplitude: 1.5,
            center: 100.0,
            width: 21.3,
        },
        &grid,
    )
    .unwrap();
    let traj = solve_ode(&p, &pump, &g, &grid).unwrap();
    check_run("saturated".into(), &traj, &p);
    c.finish();
}

#[test]
fn criterion_05_solver_cross_equivalence() {
    let mut c = Criterion::new(5, "solver-cross-equivalence");
    let grid = TimeGrid::new(20.0, 0.001).unwrap();
    let g = Envelope::constant(grid, 1.0).unwrap();
    let started = Instant::now();
    for r in [0.0, 2.0, 8.0] {
        for d in [0.0, 1.0] {
            for (kind, spec) in [
                (
                    "gaussian",
                    PulseSpec::Gaussian {
                        amplitude: 1.0,
                        center: 10.0,
                        width: 3.0,
                    },
                ),
                (
                    "double",
                    PulseSpec::DoubleGaussian {
                        amplitude: 1.0,
                        centers: [7.0, 13.0],
                        widths: [2.0, 2.0],
                    },
                ),
            ] {
                let pump = render_pulse(&spec, &grid).unwrap();
                let p = SystemParams::new(r, d, d, 0.9);
                let local = solve_ode(&p, &pump, &g, &grid).unwrap();
                let volterra = solve_volterra(&p, &pump, &g, &grid).unwrap();
                let sup = sup_c2(&local, &volterra);
                c.check(
                    sup <= 1e-6,
                    format!("R={r} d={d} {kind}: solver disagreement {sup:.3e}"),
                );
            }
        }
    }
    let elapsed = started.elapsed();
    c.check(
        elapsed.as_secs_f64() <= 60.0,
        format!("matrix runtime {elapsed:?} above 60 s"),
    );
    c.finish();
}

#[test]
fn criterion_06_conservation_and_identities() {
    let mut c = Criterion::new(6, "conservation-and-identities");
    let grid = TimeGrid::new(50.0, 0.001).unwrap();
    let g = Envelope::constant(grid, 1.0).unwrap();
    for r in [2.0, 5.0, 8.0] {
        for d in [0.0, 1.0] {
            let pump = render_pulse(
                &PulseSpec::Gaussian {
                    amplitude: 1.5,
                    center: 8.0,
                    width: 2.5,
                },
                &grid,
            )
            .unwrap();
            let p = SystemParams::new(r, d, d, 0.9);
            let traj = solve_ode(&p, &pump, &g, &grid).unwrap();
            let label = format!("R={r} d={d}");

            let drift = traj.max_norm_residual();
            c.check(drift <= 1e-8, format!("{label}: norm drift {drift:.3e}"));

            // local efficiency identity vs the double-integral route,
            // mid-emission
            let eta = efficiency_curve(&traj, &p);
            let j20 = grid.index_of(20.0).unwrap();
            let direct = efficiency_by_double_integral(&traj, &p, &g, 20.0).unwrap();
            let eta_gap = (eta[j20] - direct).abs();
            c.check(
                eta_gap <= 1e-6,
                format!("{label}: efficiency identity gap {eta_gap:.3e}"),
            );

            // packet magnitude locked to the cavity amplitude
            let wp = wavepacket(&traj, &p, &g, 50.0).unwrap();
            let back = (wp.eta_t / p.gamma_rad_ratio).sqrt();
            let packet_gap = (0..wp.tau.len())
                .map(|k| (back * wp.phi[k].norm() - traj.c_cav[k].norm()).abs())
                .fold(0.0, f64::max);
            c.check(
                packet_gap <= 1e-6,
                format!("{label}: packet identity gap {packet_gap:.3e}"),
            );

            // emitted flux accounts for the efficiency
            let flux = trapezoid_uniform(&intensity(&wp), wp.dtau());
            let residual = p.gamma_rad_ratio * traj.c_cav.last().unwrap().norm_sqr();
            let flux_gap = (flux + residual - wp.eta_t).abs();
            c.check(
                flux_gap <= 1e-6,
                format!("{label}: flux identity gap {flux_gap:.3e}"),
            );

            // spectral integral equals the time-domain efficiency
            let m = 4001;
            let delta: Vec<f64> = (0..m)
                .map(|k| p.delta_k - 20.0 + 40.0 * k as f64 / (m - 1) as f64)
                .collect();
            let sd = spectrum(&traj, &p, &g, 50.0, &delta).unwrap();
            let parseval_gap = (sd.integral() - eta[grid.n() - 1]).abs();
            c.check(
                parseval_gap <= 1e-3,
                format!("{label}: spectral-vs-time efficiency gap {parseval_gap:.3e}"),
            );
        }
    }
    c.finish();
}

#[test]
fn criterion_07_rabi_oracle() {
    let mut c = Criterion::new(7, "rabi-oracle");
    let grid = TimeGrid::new(20.0, 0.001).unwrap();
    let pump = Envelope::constant(grid, 1.0).unwrap();
    let g = Envelope::zero(grid);
    let p = SystemParams::new(0.0, 0.0, 0.0, 0.9);
    for (name, traj) in [
        ("local", solve_ode(&p, &pump, &g, &grid).unwrap()),
        ("volterra", solve_volterra(&p, &pump, &g, &grid).unwrap()),
    ] {
        let sup = (0..grid.n())
            .map(|j| (traj.c2[j].norm() - (0.5 * grid.time(j)).sin().abs()).abs())
            .fold(0.0, f64::max);
        c.check(
            sup <= 1e-6,
            format!("{name}: distance to closed-form flopping {sup:.3e}"),
        );
    }
    c.finish();
}

#[test]
fn criterion_08_inverse_round_trip() {
    let mut c = Criterion::new(8, "inverse-round-trip");
    let grid = TimeGrid::new(200.0, 0.001).unwrap();
    let p = SystemParams::new(8.0, 0.0, 0.0, 0.9);
    let g = Envelope::constant(grid, 1.0).unwrap();
    let shapes = [
        (
            "double",
            PulseSpec::DoubleGaussian {
                amplitude: 1.0,
                centers: [70.0, 110.0],
                widths: [12.0, 12.0],
            },
        ),
        (
            "flattop",
            PulseSpec::Flattop {
                amplitude: 1.0,
                center: 100.0,
                width: 50.0,
                ramp: 8.0,
            },
        ),
    ];
    for (name, spec) in &shapes {
        for eta in [0.2, 0.9] {
            let label = format!("{name} eta={eta}");
            let started = Instant::now();
            let target = DesignTarget::from_profile(spec, &grid, eta).unwrap();
            let report = round_trip(&target, &p, &g).unwrap();
            let elapsed = started.elapsed();
            c.check(
                report.l2_error <= 0.01,
                format!("{label}: shape error {:.4}", report.l2_error),
            );
            c.check(
                (report.achieved_eta - eta).abs() <= 0.01,
                format!("{label}: achieved eta {:.4}", report.achieved_eta),
            );
            c.check(
                elapsed.as_secs_f64() <= 10.0,
                format!("{label}: runtime {elapsed:?} above 10 s"),
            );

            if *name == "double" && eta == 0.9 {
                // emptying the ground state through the second peak demands
                // a stronger drive there
                let mid = grid.index_of(90.0).unwrap();
                let first = report.pump.samples()[..mid]
                    .iter()
                    .cloned()
                    .fold(0.0, f64::max);
                let second = report.pump.samples()[mid..]
                    .iter()
                    .cloned()
                    .fold(0.0, f64::max);
                c.check(
                    second > first,
                    format!("{label}: second pump peak {second:.3} not above first {first:.3}"),
                );
            }

            // the two pump-equation routes must agree wherever the radicand
            // stays healthy over the whole window
            let design = pump_from_target(&target, &p, &g).unwrap();
            let min_rad = design
                .radicand
                .iter()
                .cloned()
                .fold(f64::INFINITY, f64::min);
            if min_rad >= 0.1 {
                let reference = pump_ode_reference(&target, &p, &g).unwrap();
                let sup = design
                    .f
                    .iter()
                    .zip(&reference)
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max);
                c.check(
                    sup <= 1e-6,
                    format!("{label}: pump-route disagreement {sup:.3e}"),
                );
            }
        }
    }
    c.finish();
}

#[test]
fn criterion_09_oscillating_coupling_design() {
    let mut c = Criterion::new(9, "oscillating-coupling-design");
    let grid = TimeGrid::new(200.0, 0.001).unwrap();
    let p = SystemParams::new(8.0, 0.0, 0.0, 0.9);
    let g = render_pulse(
        &PulseSpec::Oscillating {
            amplitude: 1.0,
            depth: 0.1,
            period: 20.0,
        },
        &grid,
    )
    .unwrap();
    let target = DesignTarget::from_profile(
        &PulseSpec::Flattop {
            amplitude: 1.0,
            center: 100.0,
            width: 50.0,
            ramp: 8.0,
        },
        &grid,
        0.2,
    )
    .unwrap();
    let report = round_trip(&target, &p, &g).unwrap();
    c.check(
        report.l2_error <= 0.02,
        format!("shape error {:.4} above 0.02", report.l2_error),
    );

    // Pearson correlation of the moving-average-detrended pump and coupling
    // over the plateau window.
    let (j0, j1) = (grid.index_of(70.0).unwrap(), grid.index_of(130.0).unwrap());
    let half = (20.0 / grid.dt() / 2.0) as usize; // one modulation period
    let detrend = |v: &[f64]| -> Vec<f64> {
        (j0..=j1)
            .map(|j| {
                let lo = j.saturating_sub(half);
                let hi = (j + half).min(v.len() - 1);
                let mean: f64 = v[lo..=hi].iter().sum::<f64>() / (hi - lo + 1) as f64;
                v[j] - mean
            })
            .collect()
    };
    let a = detrend(report.pump.samples());
    let b = detrend(g.samples());
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (ma, mb) = (mean(&a), mean(&b));
    let (mut cov, mut va, mut vb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(&b) {
        cov += (x - ma) * (y - mb);
        va += (x - ma).powi(2);
        vb += (y - mb).powi(2);
    }
    let pearson = cov / (va.sqrt() * vb.sqrt());
    // The cavity-memory term dominates the required drive at this coupling
    // strength, so the compensating pump tracks the coupling modulation
    // in phase; the measured correlation is strongly positive.
    c.check(
        pearson < 0.0,
        format!("pump-vs-coupling Pearson correlation {pearson:.4} not negative"),
    );
    c.finish();
}

#[test]
fn criterion_10_convergence_order() {
    let mut c = Criterion::new(10, "convergence-order");
    let p = SystemParams::new(2.0, 0.5, 0.5, 0.9);
    let run = |dt: f64| -> Complex64 {
        let grid = TimeGrid::new(10.0, dt).unwrap();
        let pump = Envelope::constant(grid, 1.0).unwrap();
        let g = Envelope::constant(grid, 1.0).unwrap();
        *solve_ode(&p, &pump, &g, &grid).unwrap().c2.last().unwrap()
    };
    let reference = run(1.25e-4);
    let errs: Vec<f64> = [4e-3, 2e-3, 1e-3]
        .iter()
        .map(|&dt| (run(dt) - reference).norm())
        .collect();
    for w in errs.windows(2) {
        let ratio = w[0] / w[1];
        c.check(
            (8.0..=32.0).contains(&ratio),
            format!("halving dt reduced the endpoint error by {ratio:.2}, not ~16"),
        );
    }
    c.finish();
}

#[test]
fn criterion_11_wigner_checks() {
    let mut c = Criterion::new(11, "wigner-checks");
    // 2D trapezoid over [-5, 5]^2; the integrand decays far below the
    // tolerance at the boundary
    let m = 1001usize;
    let h = 10.0 / (m - 1) as f64;
    for eta in [0.0, 0.3, 0.5, 0.9, 1.0] {
        let mut total = 0.0;
        for i in 0..m {
            let x = -5.0 + i as f64 * h;
            let wx = if i == 0 || i == m - 1 { 0.5 } else { 1.0 };
            let mut row = 0.0;
            for j in 0..m {
                let y = -5.0 + j as f64 * h;
                let wy = if j == 0 || j == m - 1 { 0.5 } else { 1.0 };
                row += wy * wigner_mode1(eta, x, y).unwrap();
            }
            total += wx * row;
        }
        total *= h * h;
        c.check(
            (total - 1.0).abs() <= 1e-6,
            format!("eta={eta}: phase-space integral {total:.9}"),
        );
    }
    for eta in [0.0, 0.5, 1.0] {
        let expected = (2.0 / std::f64::consts::PI) * (1.0 - 2.0 * eta);
        let got = wigner_mode1(eta, 0.0, 0.0).unwrap();
        c.check(
            (got - expected).abs() <= 1e-12,
            format!("eta={eta}: origin value {got:.15} vs {expected:.15}"),
        );
    }
    c.finish();
}
