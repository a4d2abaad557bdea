use anyhow::Result;
use helixwarp_core::diagnostics::{
    dominance_report, identity_report, lemma4_check, DominanceRow, IdentityEntry, SignConvention,
    VariantAgreement,
};
use helixwarp_core::flux::{find_flux_windows_guarded, FluxWindow};
use helixwarp_core::geometry::frenet_from_curve;
use helixwarp_core::streamline::{build_streamline_map, profile_report_from_maps, ProfileReport};
use helixwarp_core::trajectory::{integrate_time, reparam_arc_length, Seed};
use helixwarp_core::AxisymmetricField;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::RunConfig;
use crate::output::Output;

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_EMPTY_WINDOW: u8 = 3;
pub const EXIT_GATE_FAILED: u8 = 4;

fn scan_window(cfg: &RunConfig) -> Result<FluxWindow> {
    Ok(find_flux_windows_guarded(
        &cfg.flux,
        cfg.epsilon,
        cfg.window.resolution,
        cfg.guard(),
    )?)
}

pub fn flux_window(cfg: &RunConfig, out: &Output) -> Result<u8> {
    #[derive(Serialize)]
    struct Report<'a> {
        flux: &'a helixwarp_core::FluxProfile,
        window: &'a FluxWindow,
    }
    let window = scan_window(cfg)?;
    out.json(
        "windows.json",
        &Report {
            flux: &cfg.flux,
            window: &window,
        },
    )?;
    if window.is_empty() {
        eprintln!(
            "no flux window in [1 - {}, 1 - {}]",
            cfg.epsilon,
            cfg.guard()
        );
        return Ok(EXIT_EMPTY_WINDOW);
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct SeedRecord {
    index: usize,
    seed: Seed,
    file: Option<String>,
    termination: Option<&'static str>,
    t_stop: Option<f64>,
    min_radius: Option<f64>,
    steps: Option<usize>,
    error: Option<String>,
}

impl SeedRecord {
    fn failed(index: usize, seed: Seed, e: impl ToString) -> Self {
        Self {
            index,
            seed,
            file: None,
            termination: None,
            t_stop: None,
            min_radius: None,
            steps: None,
            error: Some(e.to_string()),
        }
    }
}

#[derive(Serialize)]
struct Manifest {
    command: &'static str,
    seeds: Vec<SeedRecord>,
}

pub fn trace(cfg: &RunConfig, field: &AxisymmetricField, out: &Output) -> Result<u8> {
    let opts = cfg.trajectory_options();
    let runs: Vec<_> = cfg
        .seeds
        .par_iter()
        .map(|s| integrate_time(field, *s, cfg.trace.t_end, &opts))
        .collect();
    let mut records = Vec::with_capacity(runs.len());
    for (index, (seed, run)) in cfg.seeds.iter().zip(runs).enumerate() {
        let traj = match run {
            Ok(t) => t,
            Err(e) => {
                records.push(SeedRecord::failed(index, *seed, e));
                continue;
            }
        };
        let name = format!("trajectory_{index:03}.csv");
        let mut w = out.csv(&name)?;
        w.write_record([
            "param", "t", "r", "theta", "z", "vr", "vtheta", "vz", "speed",
        ])?;
        for s in &traj.curve(cfg.trace.samples).samples {
            w.serialize((
                s.param, s.t, s.r, s.theta, s.z, s.v[0], s.v[1], s.v[2], s.speed,
            ))?;
        }
        w.flush()?;
        records.push(SeedRecord {
            index,
            seed: *seed,
            file: Some(name),
            termination: Some(traj.termination.as_str()),
            t_stop: Some(traj.t_end()),
            min_radius: Some(traj.min_radius()),
            steps: Some(traj.steps()),
            error: None,
        });
    }
    out.json(
        "manifest.json",
        &Manifest {
            command: "trace",
            seeds: records,
        },
    )?;
    Ok(EXIT_OK)
}

pub fn geometry(cfg: &RunConfig, field: &AxisymmetricField, out: &Output) -> Result<u8> {
    let opts = cfg.trajectory_options();
    let g = &cfg.geometry;
    let runs: Vec<_> = cfg
        .seeds
        .par_iter()
        .map(|s| -> helixwarp_core::Result<_> {
            let traj = integrate_time(field, *s, g.t_end, &opts)?;
            let curve = reparam_arc_length(&traj, g.samples)?;
            let frames = frenet_from_curve(&curve, g.stencil)?;
            Ok((traj, curve, frames))
        })
        .collect();
    let mut records = Vec::with_capacity(runs.len());
    for (index, (seed, run)) in cfg.seeds.iter().zip(runs).enumerate() {
        let (traj, curve, frames) = match run {
            Ok(v) => v,
            Err(e) => {
                records.push(SeedRecord::failed(index, *seed, e));
                continue;
            }
        };
        let name = format!("frames_{index:03}.csv");
        let mut w = out.csv(&name)?;
        w.write_record([
            "s",
            "t",
            "r",
            "theta",
            "z",
            "kappa",
            "torsion",
            "ds_kappa",
            "tau_x",
            "tau_y",
            "tau_z",
            "n_x",
            "n_y",
            "n_z",
            "b_x",
            "b_y",
            "b_z",
            "degenerate",
            "one_sided",
        ])?;
        for (s, f) in curve.samples.iter().zip(&frames) {
            w.write_record(
                [
                    s.param, s.t, s.r, s.theta, s.z, f.kappa, f.torsion, f.ds_kappa,
                ]
                .iter()
                .chain(f.tau.iter())
                .chain(f.n.iter())
                .chain(f.b.iter())
                .map(|v| v.to_string())
                .chain([f.degenerate.to_string(), f.one_sided.to_string()]),
            )?;
        }
        w.flush()?;
        records.push(SeedRecord {
            index,
            seed: *seed,
            file: Some(name),
            termination: Some(traj.termination.as_str()),
            t_stop: Some(traj.t_end()),
            min_radius: Some(traj.min_radius()),
            steps: Some(traj.steps()),
            error: None,
        });
    }
    out.json(
        "manifest.json",
        &Manifest {
            command: "geometry",
            seeds: records,
        },
    )?;
    Ok(EXIT_OK)
}

pub fn profile(cfg: &RunConfig, field: &AxisymmetricField, out: &Output) -> Result<u8> {
    #[derive(Serialize)]
    struct Failure {
        t: f64,
        error: String,
    }
    #[derive(Serialize)]
    struct Report<'a> {
        grids: helixwarp_core::streamline::MapGrids,
        thresholds: &'a helixwarp_core::streamline::ProfileThresholds,
        reports: Vec<ProfileReport>,
        failures: Vec<Failure>,
    }
    let grids = cfg.grids();
    let tol = cfg.tolerances.streamline;
    let built: Vec<_> = cfg
        .profile
        .t_list
        .par_iter()
        .map(|&t| (t, build_streamline_map(field, t, &grids, tol)))
        .collect();
    let mut maps = Vec::new();
    let mut failures = Vec::new();
    for (t, m) in built {
        match m {
            Ok(m) => maps.push(m),
            Err(e) => failures.push(Failure {
                t,
                error: e.to_string(),
            }),
        }
    }
    let reports = if maps.is_empty() {
        vec![]
    } else {
        profile_report_from_maps(&maps, &cfg.profile.thresholds)?
    };
    let failed = !failures.is_empty();
    for f in &failures {
        eprintln!("streamline map at t={} failed: {}", f.t, f.error);
    }
    out.json(
        "profile_report.json",
        &Report {
            grids,
            thresholds: &cfg.profile.thresholds,
            reports,
            failures,
        },
    )?;
    Ok(if failed { EXIT_FAILURE } else { EXIT_OK })
}

#[derive(Serialize)]
#[serde(rename_all = "snake_case")]
enum Gate {
    Pass,
    Fail,
    Skipped,
}

#[derive(Serialize)]
struct ProbeRecord {
    seed: usize,
    t: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    entry: Option<IdentityEntry>,
    pressure_gates: Gate,
    direct_gate: Gate,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Serialize, Default)]
struct AgreementTally {
    only_a: usize,
    only_b: usize,
    both: usize,
    neither: usize,
}

/// Probe times inside the window: `per` interior points in each of the
/// first `max` intervals.
fn window_probes(window: &FluxWindow, per: usize, max: usize) -> Vec<f64> {
    window
        .intervals
        .iter()
        .take(max)
        .flat_map(|&(a, b)| (1..=per).map(move |k| a + (b - a) * k as f64 / (per + 1) as f64))
        .collect()
}

pub fn identities(cfg: &RunConfig, field: &AxisymmetricField, out: &Output) -> Result<u8> {
    let id = &cfg.identities;
    let opts = cfg.trajectory_options();
    let fd = cfg.tolerances.fd;
    let pressure = field.exact_pressure();
    let window = scan_window(cfg)?;
    let mut notices = Vec::new();
    let probes = match &id.probe_times {
        Some(ts) => ts.clone(),
        None => window_probes(&window, id.probes_per_interval, id.max_intervals),
    };
    if probes.is_empty() {
        notices.push("no probe times: flux window is empty and none were configured".to_string());
    }
    if pressure.is_none() {
        notices.push("field has no closed-form pressure: pressure gates skipped".to_string());
    }

    let convention = match (
        id.sign_convention,
        pressure.as_ref(),
        cfg.seeds.first(),
        probes.first(),
    ) {
        (Some(c), ..) => c,
        (None, Some(p), Some(seed), Some(&t)) => match lemma4_check(field, Some(p), seed, t, &opts)
        {
            Ok(r) => r.preferred(),
            Err(_) => SignConvention::default(),
        },
        _ => SignConvention::default(),
    };

    let tasks: Vec<(usize, f64)> = (0..cfg.seeds.len())
        .flat_map(|k| probes.iter().map(move |&t| (k, t)))
        .collect();
    let results: Vec<_> = tasks
        .par_iter()
        .map(|&(k, t)| {
            identity_report(
                field,
                pressure.as_ref(),
                &cfg.seeds[k],
                &[t],
                &fd,
                convention,
                &opts,
            )
        })
        .collect();

    let mut records = Vec::with_capacity(tasks.len());
    let mut tally = AgreementTally::default();
    let mut all_pass = true;
    for (&(seed, t), res) in tasks.iter().zip(results) {
        let entry = match res {
            Ok(mut r) => r.entries.pop(),
            Err(e) => {
                all_pass = false;
                records.push(ProbeRecord {
                    seed,
                    t,
                    entry: None,
                    pressure_gates: Gate::Fail,
                    direct_gate: Gate::Fail,
                    error: Some(e.to_string()),
                });
                continue;
            }
        };
        let e = entry.expect("one entry per probe");
        let pressure_gates = match e.lemma4_residual {
            None => Gate::Skipped,
            Some(l4) => {
                let ok = l4 <= id.gate_tol
                    && e.grad_p_b.is_none_or(|v| v.abs() <= id.gate_tol)
                    && e.normal_balance.is_none_or(|v| v <= id.gate_tol);
                if ok {
                    Gate::Pass
                } else {
                    Gate::Fail
                }
            }
        };
        let direct_gate = if e.direct.abs() <= id.direct_tol {
            Gate::Pass
        } else {
            Gate::Fail
        };
        all_pass &= !matches!(pressure_gates, Gate::Fail) && !matches!(direct_gate, Gate::Fail);
        if !e.degenerate {
            match e.agreement {
                VariantAgreement::OnlyA => tally.only_a += 1,
                VariantAgreement::OnlyB => tally.only_b += 1,
                VariantAgreement::Both => tally.both += 1,
                VariantAgreement::Neither => tally.neither += 1,
            }
        }
        records.push(ProbeRecord {
            seed,
            t,
            entry: Some(e),
            pressure_gates,
            direct_gate,
            error: None,
        });
    }

    let mut w = out.csv("terms.csv")?;
    w.write_record([
        "seed",
        "t",
        "t1",
        "t2",
        "t3",
        "n_dot_etheta",
        "ds_kappa",
        "kappa_t_b_etheta",
        "final_residual_a",
        "final_residual_b",
        "direct",
        "decomposition",
        "degenerate",
    ])?;
    for r in &records {
        if let Some(e) = &r.entry {
            w.write_record(
                [r.seed.to_string(), r.t.to_string()]
                    .into_iter()
                    .chain(
                        [
                            e.t1,
                            e.t2,
                            e.t3,
                            e.n_dot_etheta,
                            e.ds_kappa,
                            e.kappa_t_b_etheta,
                            e.final_residual_a,
                            e.final_residual_b,
                            e.direct,
                            e.decomposition,
                        ]
                        .map(|v| v.to_string()),
                    )
                    .chain([e.degenerate.to_string()]),
            )?;
        }
    }
    w.flush()?;

    let mut dominance: Vec<(usize, Vec<DominanceRow>)> = Vec::new();
    if id.dominance {
        if window.is_empty() {
            notices.push("dominance report skipped: no flux window".to_string());
        } else if !field.has_swirl() {
            notices.push("dominance report skipped: field has no swirl".to_string());
        } else {
            let rows: Vec<_> = cfg
                .seeds
                .par_iter()
                .map(|s| dominance_report(field, s, &window, id.dominance_per_interval, &fd, &opts))
                .collect();
            for (k, r) in rows.into_iter().enumerate() {
                match r {
                    Ok(rows) => dominance.push((k, rows)),
                    Err(e) => notices.push(format!("dominance report for seed {k} failed: {e}")),
                }
            }
            let mut w = out.csv("dominance.csv")?;
            w.write_record([
                "seed",
                "t",
                "t1",
                "t2",
                "t3",
                "reference1",
                "reference2",
                "window_middle",
                "window_upper",
            ])?;
            for (k, rows) in &dominance {
                for d in rows {
                    w.write_record(
                        [k.to_string()].into_iter().chain(
                            [
                                d.t,
                                d.t1,
                                d.t2,
                                d.t3,
                                d.reference1,
                                d.reference2,
                                d.window_middle,
                                d.window_upper,
                            ]
                            .map(|v| v.to_string()),
                        ),
                    )?;
                }
            }
            w.flush()?;
        }
    }

    #[derive(Serialize)]
    struct Report<'a> {
        sign_convention: SignConvention,
        fd: helixwarp_core::diagnostics::FdSettings,
        stencil: &'static str,
        gate_tol: f64,
        direct_tol: f64,
        window_intervals: usize,
        probes: Vec<ProbeRecord>,
        variant_agreement: AgreementTally,
        gates_passed: bool,
        notices: &'a [String],
    }
    for n in &notices {
        eprintln!("{n}");
    }
    out.json(
        "identities.json",
        &Report {
            sign_convention: convention,
            fd,
            stencil: "central-2pt",
            gate_tol: id.gate_tol,
            direct_tol: id.direct_tol,
            window_intervals: window.intervals.len(),
            probes: records,
            variant_agreement: tally,
            gates_passed: all_pass,
            notices: &notices,
        },
    )?;
    Ok(if all_pass { EXIT_OK } else { EXIT_GATE_FAILED })
}
