//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero if any fails.

use std::time::{Duration, Instant};

use helixwarp_core::diagnostics::{
    final_residual, lemma4_check, lemma5_check, theta_scaling_check, window_grid, FdSettings,
    SignConvention, VariantAgreement,
};
use helixwarp_core::field::{euler_residual_exact, Amplitude, CylinderDomain, StreamBump};
use helixwarp_core::flux::{find_flux_windows, find_flux_windows_guarded, FluxWindow};
use helixwarp_core::geometry::{frenet_at, frenet_from_curve, moving_frame_chart, CHART_MARGIN};
use helixwarp_core::streamline::{
    build_streamline_map, inflow_propagation, reconstruct_velocity, MapGrids,
};
use helixwarp_core::trajectory::{
    deformation_2d, Curve, CurveSample, DeformationMode, Parameterization, Seed, TrajectoryOptions,
};
use helixwarp_core::{AxisymmetricField, FluxProfile, SwirlProfile};
use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: String) -> Self {
        Self { pass, detail }
    }
}

type Criterion = (&'static str, fn() -> Outcome);

const UNIFORM: FluxProfile = FluxProfile::Uniform { c: 2.0 };
const POWER: FluxProfile = FluxProfile::PowerLaw { beta: 1.0 };
const OSC: FluxProfile = FluxProfile::Oscillating {
    beta1: 1.0,
    beta2: 2.0,
};

/// Window fixture: scan from 1 - EPS to 1 - GUARD.
const EPS: f64 = 0.1;
const GUARD: f64 = 0.05;
const RESOLUTION: usize = 100_000;

fn domain() -> CylinderDomain {
    CylinderDomain {
        r_max: 1.0,
        z_min: -2.0,
        z_max: 6.0,
        t_max: 1.0,
    }
}

fn swirls() -> [SwirlProfile; 4] {
    [
        SwirlProfile::Rigid { omega: 1.0 },
        SwirlProfile::Polynomial { c: 1.5 },
        SwirlProfile::Gaussian { c: 1.0, width: 0.6 },
        SwirlProfile::None,
    ]
}

fn column(swirl: SwirlProfile, flux: FluxProfile) -> AxisymmetricField {
    AxisymmetricField::swirl_column(swirl, flux, domain()).unwrap()
}

fn window() -> FluxWindow {
    find_flux_windows_guarded(&OSC, EPS, RESOLUTION, GUARD).unwrap()
}

fn lin(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let (rs, zs, ts) = (lin(0.05, 1.0, 10), lin(-2.0, 6.0, 10), lin(0.0, 0.9, 10));
    for flux in [UNIFORM, POWER, OSC] {
        for swirl in swirls() {
            let f = column(swirl, flux);
            for &r in &rs {
                for &z in &zs {
                    for &t in &ts {
                        worst = worst.max(euler_residual_exact(&f, r, z, t).unwrap().max_abs());
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed();
    Outcome::new(
        worst <= 1e-10 && elapsed < Duration::from_secs(5),
        format!("max Euler residual {worst:.2e} (≤ 1e-10), {elapsed:.2?} (< 5 s)"),
    )
}

/// Helix of radius a, angular rate ω and pitch rate c, sampled by arc length.
fn helix_curve(h: f64, half: usize) -> Curve {
    let (a, om, c) = (0.5f64, 1.0f64, 2.0f64);
    let l = (a * a * om * om + c * c).sqrt();
    let samples = (0..=2 * half)
        .map(|i| {
            let s = (i as f64 - half as f64) * h;
            let q = om * s / l;
            let p = Vector3::new(a * q.cos(), a * q.sin(), c * s / l);
            CurveSample {
                param: s,
                t: s,
                r: a,
                theta: p.y.atan2(p.x),
                z: p.z,
                v: [0.0; 3],
                speed: 1.0,
            }
        })
        .collect();
    Curve {
        param: Parameterization::ArcLength,
        seed: Seed::new(a, 0.0, 0.0, 0.0),
        samples,
    }
}

fn criterion_2() -> Outcome {
    let (kappa, torsion) = (0.5 / 4.25, 2.0 / 4.25);
    let steps = [1e-2, 1e-3, 1e-4];
    let errs: Vec<f64> = steps
        .iter()
        .map(|&h| {
            frenet_from_curve(&helix_curve(h, 20), 7)
                .unwrap()
                .iter()
                .filter(|f| !f.one_sided)
                .map(|f| {
                    ((f.kappa - kappa) / kappa)
                        .abs()
                        .max(((f.torsion - torsion) / torsion).abs())
                })
                .fold(0.0, f64::max)
        })
        .collect();
    let orders: Vec<f64> = errs.windows(2).map(|e| (e[0] / e[1]).log10()).collect();
    let pass = errs[1] <= 1e-6 && orders.iter().all(|&p| p >= 2.0);
    Outcome::new(
        pass,
        format!(
            "rel err {:.2e}/{:.2e}/{:.2e} at h 1e-2/1e-3/1e-4 (≤ 1e-6 at 1e-3), orders {:.2}, {:.2} (≥ 2)",
            errs[0], errs[1], errs[2], orders[0], orders[1]
        ),
    )
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut worst, mut literal, mut n) = (0.0f64, 0.0f64, 0);
    while n < 10_000 {
        let (k, t, rb, zb) = (
            rng.gen_range(0.0..5.0),
            rng.gen_range(-5.0..5.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        if 1.0 - k * rb <= CHART_MARGIN {
            continue;
        }
        let c = moving_frame_chart(k, t, rb, zb).unwrap();
        worst = worst.max(c.product_residual());
        literal = literal.max(c.literal().product_residual);
        n += 1;
    }
    Outcome::new(
        worst <= 1e-12,
        format!(
            "max |M M_inv - I| {worst:.2e} over {n} points (≤ 1e-12); literal pair {literal:.2e}"
        ),
    )
}

fn stream_fixture(flux: FluxProfile, amplitude: Amplitude) -> AxisymmetricField {
    let psi = StreamBump {
        amplitude,
        z_center: 0.5,
        width: 0.5,
    };
    let d = CylinderDomain {
        r_max: 1.0,
        z_min: -2.0,
        z_max: 3.0,
        t_max: 1.0,
    };
    AxisymmetricField::stream_function(psi, SwirlProfile::Rigid { omega: 0.5 }, flux, d).unwrap()
}

fn criterion_4() -> Outcome {
    let opts = TrajectoryOptions::with_tol(1e-10);
    let fields = [
        stream_fixture(UNIFORM, Amplitude::Constant { a: 0.3 }),
        stream_fixture(OSC, Amplitude::FluxModulated { a: 0.3 }),
    ];
    let mut worst = 0.0f64;
    for f in &fields {
        for r0 in [0.2, 0.5, 0.8] {
            let rows = deformation_2d(
                f,
                Seed::new(r0, 0.0, -1.0, 0.0),
                0.9,
                50,
                DeformationMode::Variational,
                &opts,
            )
            .unwrap();
            worst = rows.iter().map(|d| d.identity_gap()).fold(worst, f64::max);
        }
    }
    Outcome::new(
        worst <= 1e-6,
        format!("max |det - exp(-∫v_r/R)| {worst:.2e} (≤ 1e-6)"),
    )
}

fn criterion_5() -> Outcome {
    let f = stream_fixture(UNIFORM, Amplitude::Constant { a: 0.3 });
    let probes: Vec<(f64, f64)> = [0.2, 0.35, 0.5, 0.65, 0.8]
        .iter()
        .flat_map(|&r| [0.0, 0.25, 0.5, 0.75, 1.0, 1.5].map(|z| (r, z)))
        .collect();
    let base = MapGrids::default_for(&f);
    let run = |g: &MapGrids| {
        let m = build_streamline_map(&f, 0.3, g, 1e-12).unwrap();
        let rho = inflow_propagation(&m).unwrap();
        reconstruct_velocity(&m, &rho, &f, &probes).unwrap()
    };
    let (a, b) = (run(&base), run(&base.refined()));
    let (qz, qr) = (a.max_vz / b.max_vz, a.max_vr / b.max_vr);
    Outcome::new(
        a.max_vz <= 1e-3 && a.max_vr <= 1e-3 && qz >= 4.0 && qr >= 4.0,
        format!(
            "baseline {}x{}: v_z {:.2e}, v_r {:.2e} (≤ 1e-3); refined: {:.2e}, {:.2e}; ratios {:.1}, {:.1} (≥ 4)",
            base.rbar0.n, base.z.n, a.max_vz, a.max_vr, b.max_vz, b.max_vr, qz, qr
        ),
    )
}

fn criterion_6() -> Outcome {
    let opts = TrajectoryOptions::default();
    let fd = FdSettings::default();
    let mut worst = [0.0f64; 3];
    for flux in [UNIFORM, POWER, OSC] {
        for swirl in &swirls()[..3] {
            let f = column(*swirl, flux);
            let p = f.exact_pressure();
            for r0 in [0.3, 0.5, 0.8] {
                let seed = Seed::new(r0, 0.4, -1.0, 0.0);
                for t in [0.0, 0.4, 0.8, 0.93] {
                    let l4 = lemma4_check(&f, p.as_ref(), &seed, t, &opts).unwrap();
                    let l5 = lemma5_check(
                        &f,
                        p.as_ref(),
                        &seed,
                        t,
                        &fd,
                        SignConvention::EulerConsistent,
                        &opts,
                    )
                    .unwrap();
                    worst[0] = worst[0].max(l4.euler_consistent);
                    worst[1] = worst[1].max(l5.grad_p_b.abs());
                    worst[2] = worst[2].max(l5.normal_balance);
                }
            }
        }
    }
    // rigid swirl at r₀ = 0.5: centripetal balance v_θ²/r = 0.5
    let f = column(SwirlProfile::Rigid { omega: 1.0 }, UNIFORM);
    let p = f.exact_pressure().unwrap();
    let fr = frenet_at(&f, 0.5, 0.0, 0.0, 0.0);
    let lhs = -p.gradient(0.5, 0.0, 0.0, 0.0).dot(&fr.n);
    let rhs = fr.kappa * (0.25 + 4.0);
    let closed = (lhs - 0.5).abs().max((rhs - 0.5).abs());
    Outcome::new(
        worst.iter().all(|&w| w <= 1e-8) && closed <= 1e-12,
        format!(
            "Lemma 4 {:.2e}, ∇p·b {:.2e}, normal balance {:.2e} (≤ 1e-8); helix probe -∇p·n = {lhs:.12}, κ|u|² = {rhs:.12}",
            worst[0], worst[1], worst[2]
        ),
    )
}

fn criterion_7() -> Outcome {
    let f = column(SwirlProfile::Rigid { omega: 1.0 }, OSC);
    let p = f.exact_pressure();
    let opts = TrajectoryOptions::default();
    let seed = Seed::new(0.5, 0.0, 0.0, 0.0);
    let w = window();
    let probes: Vec<f64> = w
        .intervals
        .iter()
        .take(3)
        .map(|&(a, b)| 0.5 * (a + b))
        .collect();
    let (mut min_order, mut worst_extrap) = (f64::INFINITY, 0.0f64);
    for &t in &probes {
        let res = |fd: FdSettings| {
            let r = lemma5_check(
                &f,
                p.as_ref(),
                &seed,
                t,
                &fd,
                SignConvention::EulerConsistent,
                &opts,
            )
            .unwrap();
            r.residual_r.max(r.residual_z)
        };
        let rs: Vec<f64> = [1e-3, 1e-4, 1e-5]
            .iter()
            .map(|&h| res(FdSettings::plain(h)))
            .collect();
        for pair in rs.windows(2) {
            min_order = min_order.min((pair[0] / pair[1]).log10());
        }
        worst_extrap = worst_extrap.max(res(FdSettings {
            h: 1e-4,
            richardson: true,
        }));
    }
    Outcome::new(
        min_order >= 2.0 && worst_extrap <= 1e-5,
        format!(
            "min observed order {min_order:.2} (≥ 2), extrapolated residual {worst_extrap:.2e} (≤ 1e-5) at {} window probes",
            probes.len()
        ),
    )
}

fn criterion_8() -> Outcome {
    let opts = TrajectoryOptions::default();
    let fd = FdSettings::default();
    let w = window();
    let times: Vec<f64> = [0.2, 0.6]
        .into_iter()
        .chain(w.intervals.iter().take(2).map(|&(a, b)| 0.5 * (a + b)))
        .collect();
    let mut fields = vec![AxisymmetricField::uniform_axial(OSC, domain()).unwrap()];
    fields.extend(swirls()[..3].iter().map(|&s| column(s, OSC)));
    fields.push(stream_fixture(OSC, Amplitude::FluxModulated { a: 0.3 }));
    let mut worst_direct = 0.0f64;
    let mut agreements = Vec::new();
    for (k, f) in fields.iter().enumerate() {
        let exact = f.exact_pressure().is_some();
        for &t in &times {
            let r = final_residual(f, &Seed::new(0.5, 0.3, -1.0, 0.0), t, &fd, &opts).unwrap();
            worst_direct = worst_direct.max(r.direct.abs());
            if exact && !r.degenerate {
                agreements.push((k, t, r.agreement, r.variant_a, r.variant_b));
            }
        }
    }
    let single = agreements
        .iter()
        .all(|a| matches!(a.2, VariantAgreement::OnlyA | VariantAgreement::OnlyB));
    let count = |v: VariantAgreement| agreements.iter().filter(|a| a.2 == v).count();
    let worst_ab = agreements
        .iter()
        .map(|a| a.3.abs().min(a.4.abs()))
        .fold(f64::INFINITY, f64::min);
    Outcome::new(
        worst_direct <= 1e-6 && single && !agreements.is_empty(),
        format!(
            "direct ∂_θ∂_t|u| max {worst_direct:.2e} (≤ 1e-6); variant agreement over {} exact probes: only A {}, only B {}, both {}, neither {}; smallest variant magnitude {worst_ab:.2e}",
            agreements.len(),
            count(VariantAgreement::OnlyA),
            count(VariantAgreement::OnlyB),
            count(VariantAgreement::Both),
            count(VariantAgreement::Neither)
        ),
    )
}

/// Window condition from hand-derived derivatives of g = 2 + s sin(s⁻²).
fn oscillating_condition_oracle(t: f64, eps: f64) -> bool {
    let s = 1.0 - t;
    let (sn, cs) = (s.powi(-2).sin(), s.powi(-2).cos());
    let g = 2.0 + s * sn;
    let g1 = -(sn - 2.0 * cs / (s * s));
    let g2 = 2.0 * cs / s.powi(3) - 4.0 * sn / s.powi(5);
    let mid = eps * g1 * g1 / g;
    1.0 < mid && mid < eps * eps * g2
}

fn criterion_9() -> Outcome {
    let u = find_flux_windows(&UNIFORM, EPS, RESOLUTION).unwrap();
    let p = find_flux_windows(&POWER, EPS, RESOLUTION).unwrap();
    let coarse = window();
    let fine = find_flux_windows_guarded(&OSC, EPS, 10 * RESOLUTION, GUARD).unwrap();
    let step = (EPS - GUARD) / (RESOLUTION - 1) as f64;
    let same_count = coarse.intervals.len() == fine.intervals.len();
    let drift = coarse
        .intervals
        .iter()
        .zip(&fine.intervals)
        .map(|(a, b)| (a.0 - b.0).abs().max((a.1 - b.1).abs()))
        .fold(0.0, f64::max);
    let mut violations = 0;
    for &(a, b) in &coarse.intervals {
        let n = ((b - a) / (0.1 * step)).floor() as usize;
        violations += (0..=n)
            .filter(|&k| !oscillating_condition_oracle(a + k as f64 * 0.1 * step, EPS))
            .count();
    }
    let pass = u.is_empty()
        && p.is_empty()
        && !coarse.is_empty()
        && same_count
        && drift <= step
        && violations == 0;
    let first = coarse.first().unwrap_or((f64::NAN, f64::NAN));
    Outcome::new(
        pass,
        format!(
            "Uniform {} and PowerLaw(1) {} intervals; Oscillating(1,2) ε={EPS} guard {GUARD}: {} intervals (10x: {}), first [{:.6}, {:.6}], endpoint drift {drift:.2e} (≤ {step:.2e}), interior violations {violations}",
            u.intervals.len(),
            p.intervals.len(),
            coarse.intervals.len(),
            fine.intervals.len(),
            first.0,
            first.1
        ),
    )
}

fn criterion_10(suite_start: Instant) -> Outcome {
    let opts = TrajectoryOptions::with_tol(1e-11);
    let w = window();
    let times = window_grid(&w, 3);
    let r0 = 0.5;
    let mut worst = 0.0f64;
    let mut rows = 0;
    for swirl in &swirls()[..3] {
        let f = column(*swirl, OSC);
        let expect = swirl.w(r0, 1.0)[0] / r0;
        for row in theta_scaling_check(&f, &Seed::new(r0, 0.0, 0.0, 0.0), &times, &opts).unwrap() {
            worst = worst.max((row.ratio2.unwrap() - expect).abs());
            rows += 1;
        }
    }
    let elapsed = suite_start.elapsed();
    Outcome::new(
        worst <= 1e-4 && rows == 3 * times.len() && elapsed < Duration::from_secs(120),
        format!(
            "max |θ''/(-g'/g³) - W(r₀)/r₀| {worst:.2e} over {rows} window samples (≤ 1e-4); suite {elapsed:.2?} (< 2 min)"
        ),
    )
}

fn main() {
    let start = Instant::now();
    let criteria: [Criterion; 9] = [
        ("exact-solution gate", criterion_1),
        ("Frenet helix oracle", criterion_2),
        ("moving-frame matrix identity", criterion_3),
        ("deformation determinant identity", criterion_4),
        ("streamline reconstruction", criterion_5),
        ("pressure identities on exact solutions", criterion_6),
        ("Lemma 5 convergence", criterion_7),
        ("rotation-invariance ground truth", criterion_8),
        ("flux windows", criterion_9),
    ];
    let mut failed = 0;
    let mut report = |i: usize, name: &str, o: Outcome| {
        println!(
            "criterion {i:>2} {}: {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        if !o.pass {
            failed += 1;
        }
    };
    for (i, (name, run)) in criteria.iter().enumerate() {
        report(i + 1, name, run());
    }
    report(10, "angle scaling ratio", criterion_10(start));
    println!("acceptance: {} of 10 criteria passed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
