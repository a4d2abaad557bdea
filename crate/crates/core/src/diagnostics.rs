//! Lagrangian estimates and pressure-curvature identities along trajectories.
//!
//! `F = ∂_t|u|` is the rate of change of speed following the particle, i.e.
//! the material derivative of `|u|`. At a given time it is a pointwise
//! function of position, so its derivatives in the normal directions `n`
//! (coordinate `r̄`) and `b` (coordinate `z̄`) are differences of `F` at
//! offset points.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{AxisymmetricField, PressureMap};
use crate::flux::{FluxCondition, FluxWindow};
use crate::geometry::{frenet_from_motion, theta_derivatives, FrenetFrame, KAPPA_FLOOR};
use crate::trajectory::{
    integrate_time, linspace, reparam_axis_length_on, Seed, Termination, Trajectory,
    TrajectoryOptions,
};

/// Which sign relates `∇p·τ` to `∂_t|u|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SignConvention {
    /// `∇p·τ = ∂_t|u|`.
    Literal,
    /// `-∇p·τ = ∂_t|u|`, as implied by `∂_t u + (u·∇)u = -∇p`.
    #[default]
    EulerConsistent,
}

impl SignConvention {
    fn sign(&self) -> f64 {
        match self {
            SignConvention::Literal => 1.0,
            SignConvention::EulerConsistent => -1.0,
        }
    }
}

/// Normal-offset finite differences.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FdSettings {
    pub h: f64,
    /// Combine steps `h` and `h/2` by Richardson extrapolation.
    pub richardson: bool,
}

impl Default for FdSettings {
    fn default() -> Self {
        Self {
            h: 1e-4,
            richardson: true,
        }
    }
}

impl FdSettings {
    pub fn plain(h: f64) -> Self {
        Self {
            h,
            richardson: false,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(Error::Config(format!(
                "finite-difference step must be positive, got {}",
                self.h
            )));
        }
        Ok(())
    }
}

fn cylindrical(x: &Vector3<f64>) -> (f64, f64, f64) {
    ((x.x * x.x + x.y * x.y).sqrt(), x.y.atan2(x.x), x.z)
}

fn e_theta(theta: f64) -> Vector3<f64> {
    Vector3::new(-theta.sin(), theta.cos(), 0.0)
}

/// Material rate of speed at a Cartesian point and time.
pub fn speed_rate_at(field: &AxisymmetricField, x: &Vector3<f64>, t: f64) -> Result<f64> {
    let (r, theta, z) = cylindrical(x);
    field.check_point(r, z, t)?;
    Ok(field.kinematics(r, theta, z, t).speed_rate)
}

/// Directional derivative of `F` at `x` along unit `dir`.
fn directional(
    field: &AxisymmetricField,
    x: &Vector3<f64>,
    dir: &Vector3<f64>,
    t: f64,
    fd: &FdSettings,
) -> Result<f64> {
    let central = |h: f64| -> Result<f64> {
        Ok(
            (speed_rate_at(field, &(x + dir * h), t)? - speed_rate_at(field, &(x - dir * h), t)?)
                / (2.0 * h),
        )
    };
    let d1 = central(fd.h)?;
    if !fd.richardson {
        return Ok(d1);
    }
    let d2 = central(0.5 * fd.h)?;
    Ok((4.0 * d2 - d1) / 3.0)
}

/// Particle position `(r, θ, z)` at `t` for a seed.
pub fn probe_point(
    field: &AxisymmetricField,
    seed: &Seed,
    t: f64,
    opts: &TrajectoryOptions,
) -> Result<(f64, f64, f64)> {
    if t == seed.t0 {
        field.check_point(seed.r0, seed.z0, t)?;
        return Ok((seed.r0, seed.theta0, seed.z0));
    }
    let traj = integrate_time(field, *seed, t, opts)?;
    traj.termination.into_result()?;
    let [r, theta, z, _, _] = traj.state(t);
    Ok((r, theta, z))
}

/// Time grid with `n` points in each interval of a window.
pub fn window_grid(window: &FluxWindow, n: usize) -> Vec<f64> {
    window
        .intervals
        .iter()
        .flat_map(|&(a, b)| linspace(a, b, n.max(2)))
        .collect()
}

/// One quantity of a scaling series with its flux reference.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingQuantity {
    pub name: &'static str,
    pub reference_name: &'static str,
    pub values: Vec<f64>,
    pub reference: Vec<f64>,
    /// `value / reference`, `None` where the reference vanishes.
    pub ratio: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingSeries {
    pub t: Vec<f64>,
    pub z: Vec<f64>,
    pub quantities: Vec<ScalingQuantity>,
    /// The trajectory stopped before the last requested time.
    pub truncated: bool,
    pub termination: Termination,
}

impl ScalingSeries {
    pub fn quantity(&self, name: &str) -> Option<&ScalingQuantity> {
        self.quantities.iter().find(|q| q.name == name)
    }
}

fn ratio(v: f64, r: f64) -> Option<f64> {
    (r != 0.0 && r.is_finite()).then(|| v / r)
}

fn trajectory_to(
    field: &AxisymmetricField,
    seed: &Seed,
    t_last: f64,
    opts: &TrajectoryOptions,
) -> Result<Trajectory> {
    if !(t_last > seed.t0) {
        return Err(Error::Config(format!(
            "sample times must follow the seed time {}",
            seed.t0
        )));
    }
    integrate_time(field, *seed, t_last, opts)
}

/// Axis-length quantities along the trajectory at the given times, each with
/// its flux scaling. z-derivatives are total derivatives along the
/// trajectory, `d/dz = D / v_z`.
pub fn scaling_series(
    field: &AxisymmetricField,
    seed: &Seed,
    times: &[f64],
    opts: &TrajectoryOptions,
) -> Result<ScalingSeries> {
    let t_last = times.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let traj = trajectory_to(field, seed, t_last, opts)?;
    let names: [(&str, &str); 9] = [
        ("dz_vz", "g'/g"),
        ("dzz_tinv", "-g'/g^3"),
        ("dzz_vz", "g''/g^2"),
        ("dz_vr", "g'/g"),
        ("dzz_vr", "g''/g^2"),
        ("vtheta", "1"),
        ("dz_vtheta", "1"),
        ("dzz_vtheta", "g'/g"),
        ("speed_rate", "g'"),
    ];
    let mut quantities: Vec<ScalingQuantity> = names
        .iter()
        .map(|&(name, reference_name)| ScalingQuantity {
            name,
            reference_name,
            values: vec![],
            reference: vec![],
            ratio: vec![],
        })
        .collect();
    let mut ts = Vec::new();
    let mut zs = Vec::new();
    let mut truncated = false;
    for &t in times {
        if t > traj.t_end() || t < traj.t_start() {
            truncated = true;
            continue;
        }
        let [r, theta, z, _, _] = traj.state(t);
        let jet = field.jet(r, z, t);
        let [_, vt, vz] = jet.components();
        if !(vz > 0.0) {
            return Err(Error::UnilateralViolation { r, z, t, vz });
        }
        let (dvr, dvt, dvz) = (
            jet.material(&jet.vr),
            jet.material(&jet.vtheta),
            jet.material(&jet.vz),
        );
        let (d2vr, d2vt, d2vz) = (
            jet.material2(&jet.vr),
            jet.material2(&jet.vtheta),
            jet.material2(&jet.vz),
        );
        let f = field.flux.eval(t)?;
        let (g, g1, g2) = (f.g, f.g1, f.g2);
        let second = |d2: f64, d1: f64| (d2 / vz - d1 * dvz / (vz * vz)) / vz;
        let values = [
            dvz / vz,
            -(dvz / vz) / (vz * vz),
            second(d2vz, dvz),
            dvr / vz,
            second(d2vr, dvr),
            vt,
            dvt / vz,
            second(d2vt, dvt),
            field.kinematics(r, theta, z, t).speed_rate,
        ];
        let refs = [
            g1 / g,
            -g1 / g.powi(3),
            g2 / (g * g),
            g1 / g,
            g2 / (g * g),
            1.0,
            1.0,
            g1 / g,
            g1,
        ];
        for (q, (v, rf)) in quantities.iter_mut().zip(values.into_iter().zip(refs)) {
            q.values.push(v);
            q.reference.push(rf);
            q.ratio.push(ratio(v, rf));
        }
        ts.push(t);
        zs.push(z);
    }
    if !field.has_swirl() {
        for q in quantities.iter_mut().filter(|q| q.name.contains("vtheta")) {
            q.ratio.iter_mut().for_each(|r| *r = None);
        }
    }
    Ok(ScalingSeries {
        t: ts,
        z: zs,
        quantities,
        truncated,
        termination: traj.termination,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThetaScaling {
    pub t: f64,
    pub z: f64,
    pub theta2: f64,
    pub theta3: f64,
    /// `-g'/g³` and `-g''/g⁴`.
    pub reference2: f64,
    pub reference3: f64,
    pub ratio2: Option<f64>,
    pub ratio3: Option<f64>,
    /// Leading-term values evaluated from the field.
    pub formula2: f64,
    pub formula3: f64,
    pub dz: f64,
}

/// Axial step resolving the flux variation near time t.
fn local_dz(field: &AxisymmetricField, t: f64, vz: f64) -> Result<f64> {
    let f = field.flux.eval(t)?;
    let scale = if f.g2 != 0.0 {
        (f.g1 / f.g2).abs()
    } else {
        f64::INFINITY
    };
    let scale = if f.g1 != 0.0 {
        scale.min((f.g / f.g1).abs())
    } else {
        scale
    };
    Ok((1e-2 * vz * scale).clamp(1e-7, 1e-3))
}

/// `θ''` and `θ'''` at each time from a seven-point stencil of axial stations
/// centred on the particle position, against the flux scalings.
pub fn theta_scaling_check(
    field: &AxisymmetricField,
    seed: &Seed,
    times: &[f64],
    opts: &TrajectoryOptions,
) -> Result<Vec<ThetaScaling>> {
    if !field.has_swirl() {
        return Err(Error::Precondition(
            "angle scaling needs a swirling field".into(),
        ));
    }
    let t_last = times.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let dz_max = 1e-3;
    let traj = trajectory_to(field, seed, t_last, opts)?;
    let z_end = traj.state(traj.t_end())[2];
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        if t > traj.t_end() {
            break;
        }
        let [r, _, z, _, _] = traj.state(t);
        let vz = field.velocity(r, z, t)[2];
        let dz = local_dz(field, t, vz)?.min(dz_max);
        // keep the stencil inside the integrated range
        let zc = z.min(z_end - 3.0 * dz);
        let zs: Vec<f64> = (-3..=3).map(|k| zc + k as f64 * dz).collect();
        let ax = reparam_axis_length_on(&traj, &zs)?;
        let row = theta_derivatives(&ax, field, 7)?[3];
        let f = field.flux.eval(row.t)?;
        let (reference2, reference3) = (-f.g1 / f.g.powi(3), -f.g2 / f.g.powi(4));
        out.push(ThetaScaling {
            t: row.t,
            z: row.z,
            theta2: row.theta2,
            theta3: row.theta3,
            reference2,
            reference3,
            ratio2: ratio(row.theta2, reference2),
            ratio3: ratio(row.theta3, reference3),
            formula2: row.theta2_formula,
            formula3: row.theta3_formula,
            dz,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lemma3Sample {
    pub t: f64,
    pub n_dot_etheta: f64,
    pub ds_kappa: f64,
    /// `|κ T (b·e_θ)|`.
    pub kappa_t_b_etheta: f64,
    /// `g''/g⁴`.
    pub reference: f64,
    /// `|κ T (b·e_θ)| / |∂_s κ|`.
    pub cancellation_ratio: Option<f64>,
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lemma3Series {
    /// False when the field carries no swirl.
    pub applicable: bool,
    pub samples: Vec<Lemma3Sample>,
}

pub fn lemma3_series(
    field: &AxisymmetricField,
    seed: &Seed,
    times: &[f64],
    opts: &TrajectoryOptions,
) -> Result<Lemma3Series> {
    if !field.has_swirl() {
        return Ok(Lemma3Series {
            applicable: false,
            samples: vec![],
        });
    }
    let t_last = times.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let traj = trajectory_to(field, seed, t_last, opts)?;
    let mut samples = Vec::with_capacity(times.len());
    for &t in times.iter().filter(|&&t| t <= traj.t_end()) {
        let [r, theta, z, _, _] = traj.state(t);
        let fr = frenet_from_motion(&field.kinematics(r, theta, z, t), KAPPA_FLOOR);
        let f = field.flux.eval(t)?;
        let et = e_theta(theta);
        let ktb = (fr.kappa * fr.torsion * fr.b.dot(&et)).abs();
        samples.push(Lemma3Sample {
            t,
            n_dot_etheta: fr.n.dot(&et),
            ds_kappa: fr.ds_kappa,
            kappa_t_b_etheta: ktb,
            reference: f.g2 / f.g.powi(4),
            cancellation_ratio: ratio(ktb, fr.ds_kappa.abs()),
            degenerate: fr.degenerate,
        });
    }
    Ok(Lemma3Series {
        applicable: true,
        samples,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lemma4Result {
    pub grad_p_tau: f64,
    pub speed_rate: f64,
    /// `|∇p·τ - ∂_t|u||`.
    pub literal: f64,
    /// `|-∇p·τ - ∂_t|u||`.
    pub euler_consistent: f64,
}

impl Lemma4Result {
    pub fn residual(&self, c: SignConvention) -> f64 {
        match c {
            SignConvention::Literal => self.literal,
            SignConvention::EulerConsistent => self.euler_consistent,
        }
    }

    /// Convention with the smaller residual.
    pub fn preferred(&self) -> SignConvention {
        if self.euler_consistent <= self.literal {
            SignConvention::EulerConsistent
        } else {
            SignConvention::Literal
        }
    }
}

fn require_pressure(p: Option<&PressureMap>) -> Result<&PressureMap> {
    p.ok_or_else(|| {
        Error::Precondition("identity needs an exact Euler field with known pressure".into())
    })
}

struct ProbeGeometry {
    x: Vector3<f64>,
    theta: f64,
    frame: FrenetFrame,
    speed: f64,
    speed_rate: f64,
    grad_p: Option<Vector3<f64>>,
}

fn probe_geometry(
    field: &AxisymmetricField,
    pressure: Option<&PressureMap>,
    seed: &Seed,
    t: f64,
    opts: &TrajectoryOptions,
) -> Result<ProbeGeometry> {
    let (r, theta, z) = probe_point(field, seed, t, opts)?;
    let k = field.kinematics(r, theta, z, t);
    Ok(ProbeGeometry {
        x: k.position,
        theta,
        frame: frenet_from_motion(&k, KAPPA_FLOOR),
        speed: k.velocity.norm(),
        speed_rate: k.speed_rate,
        grad_p: pressure.map(|p| p.gradient(r, theta, z, t)),
    })
}

pub fn lemma4_check(
    field: &AxisymmetricField,
    pressure: Option<&PressureMap>,
    seed: &Seed,
    t_probe: f64,
    opts: &TrajectoryOptions,
) -> Result<Lemma4Result> {
    require_pressure(pressure)?;
    let g = probe_geometry(field, pressure, seed, t_probe, opts)?;
    let gp = g.grad_p.unwrap().dot(&g.frame.tau);
    Ok(Lemma4Result {
        grad_p_tau: gp,
        speed_rate: g.speed_rate,
        literal: (gp - g.speed_rate).abs(),
        euler_consistent: (-gp - g.speed_rate).abs(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lemma5Result {
    /// `3κ ∂_t|u| + ∂_sκ |u|²`.
    pub lhs_r: f64,
    /// `∂_r̄ ∂_t|u|`.
    pub rhs_r: f64,
    /// `T κ |u|²`.
    pub lhs_z: f64,
    /// `∂_z̄ ∂_t|u|`.
    pub rhs_z: f64,
    pub convention: SignConvention,
    /// `|lhs - σ rhs|` with `σ = +1` (as stated) or `-1` (Euler consistent).
    pub residual_r: f64,
    pub residual_z: f64,
    /// `∇p·b`.
    pub grad_p_b: f64,
    /// `|-∇p·n - κ|u|²|`.
    pub normal_balance: f64,
    pub h: f64,
    pub richardson: bool,
}

pub fn lemma5_check(
    field: &AxisymmetricField,
    pressure: Option<&PressureMap>,
    seed: &Seed,
    t_probe: f64,
    fd: &FdSettings,
    convention: SignConvention,
    opts: &TrajectoryOptions,
) -> Result<Lemma5Result> {
    fd.validate()?;
    require_pressure(pressure)?;
    let g = probe_geometry(field, pressure, seed, t_probe, opts)?;
    let fr = g.frame;
    if fr.degenerate {
        return Err(Error::DegenerateFrame { kappa: fr.kappa });
    }
    let u2 = g.speed * g.speed;
    let lhs_r = 3.0 * fr.kappa * g.speed_rate + fr.ds_kappa * u2;
    let lhs_z = fr.torsion * fr.kappa * u2;
    let rhs_r = directional(field, &g.x, &fr.n, t_probe, fd)?;
    let rhs_z = directional(field, &g.x, &fr.b, t_probe, fd)?;
    let s = convention.sign();
    let gp = g.grad_p.unwrap();
    Ok(Lemma5Result {
        lhs_r,
        rhs_r,
        lhs_z,
        rhs_z,
        convention,
        residual_r: (lhs_r - s * rhs_r).abs(),
        residual_z: (lhs_z - s * rhs_z).abs(),
        grad_p_b: gp.dot(&fr.b),
        normal_balance: (-gp.dot(&fr.n) - fr.kappa * u2).abs(),
        h: fd.h,
        richardson: fd.richardson,
    })
}

/// Which bracket placement matches the direct angular derivative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VariantAgreement {
    OnlyA,
    OnlyB,
    Both,
    Neither,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FinalResidual {
    pub t: f64,
    /// `(e_θ·n) κ ∂_t|u|`.
    pub t1: f64,
    /// `(e_θ·n) ∂_sκ |u|²`.
    pub t2: f64,
    /// `(e_θ·b) T κ |u|²`.
    pub t3: f64,
    pub n_dot_etheta: f64,
    pub b_dot_etheta: f64,
    pub tau_dot_etheta: f64,
    /// `3 (e_θ·n)(κ∂_t|u| + ∂_sκ|u|²) + (e_θ·b) Tκ|u|²`.
    pub variant_a: f64,
    /// `(e_θ·n)(3κ∂_t|u| + ∂_sκ|u|²) + (e_θ·b) Tκ|u|²`.
    pub variant_b: f64,
    /// `∂_θ ∂_t|u|` by central differences over the seed angle.
    pub direct: f64,
    /// `(e_θ·τ)∂_τF + (e_θ·n)∂_r̄F + (e_θ·b)∂_z̄F`, the full frame
    /// decomposition of the angular derivative.
    pub decomposition: f64,
    pub agreement: VariantAgreement,
    pub degenerate: bool,
}

/// Tolerance for a bracket variant to count as matching the direct zero.
pub const VARIANT_TOLERANCE: f64 = 1e-4;

pub fn final_residual(
    field: &AxisymmetricField,
    seed: &Seed,
    t_probe: f64,
    fd: &FdSettings,
    opts: &TrajectoryOptions,
) -> Result<FinalResidual> {
    fd.validate()?;
    let g = probe_geometry(field, None, seed, t_probe, opts)?;
    let fr = g.frame;
    let et = e_theta(g.theta);

    // ground truth: rotate the seed and difference ∂_t|u| at the probe time
    let rate = |dtheta: f64| -> Result<f64> {
        let s = Seed {
            theta0: seed.theta0 + dtheta,
            ..*seed
        };
        let (r, th, z) = probe_point(field, &s, t_probe, opts)?;
        Ok(field.kinematics(r, th, z, t_probe).speed_rate)
    };
    let h = fd.h;
    let direct = (rate(h)? - rate(-h)?) / (2.0 * h);

    if fr.degenerate {
        return Ok(FinalResidual {
            t: t_probe,
            t1: 0.0,
            t2: 0.0,
            t3: 0.0,
            n_dot_etheta: 0.0,
            b_dot_etheta: 0.0,
            tau_dot_etheta: fr.tau.dot(&et),
            variant_a: 0.0,
            variant_b: 0.0,
            direct,
            decomposition: 0.0,
            agreement: VariantAgreement::Both,
            degenerate: true,
        });
    }
    let u2 = g.speed * g.speed;
    let (nd, bd, td) = (fr.n.dot(&et), fr.b.dot(&et), fr.tau.dot(&et));
    let t1 = nd * fr.kappa * g.speed_rate;
    let t2 = nd * fr.ds_kappa * u2;
    let t3 = bd * fr.torsion * fr.kappa * u2;
    let variant_a = 3.0 * t1 + 3.0 * t2 + t3;
    let variant_b = 3.0 * t1 + t2 + t3;
    let decomposition = td * directional(field, &g.x, &fr.tau, t_probe, fd)?
        + nd * directional(field, &g.x, &fr.n, t_probe, fd)?
        + bd * directional(field, &g.x, &fr.b, t_probe, fd)?;
    let a_ok = (variant_a - direct).abs() <= VARIANT_TOLERANCE;
    let b_ok = (variant_b - direct).abs() <= VARIANT_TOLERANCE;
    let agreement = match (a_ok, b_ok) {
        (true, true) => VariantAgreement::Both,
        (true, false) => VariantAgreement::OnlyA,
        (false, true) => VariantAgreement::OnlyB,
        (false, false) => VariantAgreement::Neither,
    };
    Ok(FinalResidual {
        t: t_probe,
        t1,
        t2,
        t3,
        n_dot_etheta: nd,
        b_dot_etheta: bd,
        tau_dot_etheta: td,
        variant_a,
        variant_b,
        direct,
        decomposition,
        agreement,
        degenerate: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DominanceRow {
    pub t: f64,
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
    /// `-g'²/g³`, the scaling claimed for `T1`.
    pub reference1: f64,
    /// `-g''/g²`, the scaling claimed for `T2`.
    pub reference2: f64,
    /// `ε g'²/g` and `ε² g''` of the window condition.
    pub window_middle: f64,
    pub window_upper: f64,
}

/// Final-display terms against their flux scalings at window times.
pub fn dominance_report(
    field: &AxisymmetricField,
    seed: &Seed,
    window: &FluxWindow,
    n_per_interval: usize,
    fd: &FdSettings,
    opts: &TrajectoryOptions,
) -> Result<Vec<DominanceRow>> {
    if window.is_empty() {
        return Err(Error::NoWindow(format!(
            "flux condition holds nowhere in [1 - {}, 1) for {:?}",
            window.epsilon, field.flux
        )));
    }
    let times = window_grid(window, n_per_interval);
    let t_last = times.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let traj = trajectory_to(field, seed, t_last, opts)?;
    let mut rows = Vec::with_capacity(times.len());
    for t in times.into_iter().filter(|&t| t <= traj.t_end()) {
        let [r, theta, z, _, _] = traj.state(t);
        let s = Seed::new(r, theta, z, t);
        let fr = final_residual(field, &s, t, fd, opts)?;
        let f = field.flux.eval(t)?;
        let c = FluxCondition::at(&field.flux, window.epsilon, t)?;
        rows.push(DominanceRow {
            t,
            t1: fr.t1,
            t2: fr.t2,
            t3: fr.t3,
            reference1: -f.g1 * f.g1 / f.g.powi(3),
            reference2: -f.g2 / (f.g * f.g),
            window_middle: c.middle,
            window_upper: c.upper,
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityEntry {
    pub t: f64,
    pub lemma4_residual: Option<f64>,
    pub lemma5_r_residual: Option<f64>,
    pub lemma5_z_residual: Option<f64>,
    pub grad_p_b: Option<f64>,
    pub normal_balance: Option<f64>,
    pub final_residual_a: f64,
    pub final_residual_b: f64,
    pub direct: f64,
    pub decomposition: f64,
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
    pub n_dot_etheta: f64,
    pub ds_kappa: f64,
    pub kappa_t_b_etheta: f64,
    pub agreement: VariantAgreement,
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub sign_convention: SignConvention,
    pub fd: FdSettings,
    /// Stencil used for the normal-offset differences (central, 2 points per
    /// step, optionally Richardson-combined over `h` and `h/2`).
    pub stencil: &'static str,
    pub entries: Vec<IdentityEntry>,
}

/// Lemma 4, Lemma 5 and final-display checks at each probe time along the
/// trajectory of `seed`. Pressure-based entries are `None` without a
/// pressure.
pub fn identity_report(
    field: &AxisymmetricField,
    pressure: Option<&PressureMap>,
    seed: &Seed,
    times: &[f64],
    fd: &FdSettings,
    convention: SignConvention,
    opts: &TrajectoryOptions,
) -> Result<IdentityReport> {
    let mut entries = Vec::with_capacity(times.len());
    for &t in times {
        // re-seed at the probe so that every check shares the same point
        let (r, theta, z) = probe_point(field, seed, t, opts)?;
        let s = Seed::new(r, theta, z, t);
        let fin = final_residual(field, &s, t, fd, opts)?;
        let k = field.kinematics(r, theta, z, t);
        let fr = frenet_from_motion(&k, KAPPA_FLOOR);
        let (l4, l5) = match pressure {
            Some(_) => {
                let l4 = lemma4_check(field, pressure, &s, t, opts)?;
                let l5 = if fr.degenerate {
                    None
                } else {
                    Some(lemma5_check(field, pressure, &s, t, fd, convention, opts)?)
                };
                (Some(l4), l5)
            }
            None => (None, None),
        };
        entries.push(IdentityEntry {
            t,
            lemma4_residual: l4.map(|x| x.residual(convention)),
            lemma5_r_residual: l5.map(|x| x.residual_r),
            lemma5_z_residual: l5.map(|x| x.residual_z),
            grad_p_b: l5.map(|x| x.grad_p_b),
            normal_balance: l5.map(|x| x.normal_balance),
            final_residual_a: (fin.variant_a - fin.direct).abs(),
            final_residual_b: (fin.variant_b - fin.direct).abs(),
            direct: fin.direct,
            decomposition: fin.decomposition,
            t1: fin.t1,
            t2: fin.t2,
            t3: fin.t3,
            n_dot_etheta: fin.n_dot_etheta,
            ds_kappa: fr.ds_kappa,
            kappa_t_b_etheta: (fr.kappa * fr.torsion * fr.b.dot(&e_theta(theta))).abs(),
            agreement: fin.agreement,
            degenerate: fin.degenerate,
        });
    }
    Ok(IdentityReport {
        sign_convention: convention,
        fd: *fd,
        stencil: "central-2pt",
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Amplitude, CylinderDomain, StreamBump, SwirlProfile};
    use crate::flux::{find_flux_windows_guarded, FluxProfile};

    fn domain() -> CylinderDomain {
        CylinderDomain {
            r_max: 1.0,
            z_min: -2.0,
            z_max: 8.0,
            t_max: 1.0,
        }
    }

    fn column(flux: FluxProfile) -> AxisymmetricField {
        AxisymmetricField::swirl_column(SwirlProfile::Rigid { omega: 1.0 }, flux, domain()).unwrap()
    }

    fn osc() -> FluxProfile {
        FluxProfile::Oscillating {
            beta1: 1.0,
            beta2: 2.0,
        }
    }

    fn opts() -> TrajectoryOptions {
        TrajectoryOptions::with_tol(1e-11)
    }

    fn seed() -> Seed {
        Seed::new(0.5, 0.0, 0.0, 0.0)
    }

    #[test]
    fn lemma4_on_oscillating_column() {
        let f = column(osc());
        let p = f.exact_pressure();
        for t in [0.3, 0.6, 0.9] {
            let r = lemma4_check(&f, p.as_ref(), &seed(), t, &opts()).unwrap();
            let fl = osc().eval(t).unwrap();
            let expect = fl.g * fl.g1 / (0.25 + fl.g * fl.g).sqrt();
            assert!((r.speed_rate - expect).abs() < 1e-12 * expect.abs().max(1.0));
            assert!(r.euler_consistent < 1e-10);
            assert_eq!(r.preferred(), SignConvention::EulerConsistent);
        }
    }

    #[test]
    fn lemma4_on_uniform_and_power_law() {
        let f =
            AxisymmetricField::uniform_axial(FluxProfile::Uniform { c: 2.0 }, domain()).unwrap();
        let r = lemma4_check(&f, Some(&PressureMap::Zero), &seed(), 0.2, &opts()).unwrap();
        assert_eq!((r.literal, r.euler_consistent), (0.0, 0.0));

        let flux = FluxProfile::PowerLaw { beta: 1.0 };
        let f = AxisymmetricField::uniform_axial(flux, domain()).unwrap();
        let r = lemma4_check(&f, f.exact_pressure().as_ref(), &seed(), 0.5, &opts()).unwrap();
        let g = flux.eval(0.5).unwrap();
        assert!(r.euler_consistent < 1e-12);
        assert!((r.literal - 2.0 * g.g1).abs() < 1e-10);
        assert!(lemma4_check(&f, None, &seed(), 0.5, &opts()).is_err());
    }

    #[test]
    fn pressure_frame_balances_on_helix() {
        let f = column(FluxProfile::Uniform { c: 2.0 });
        let r = lemma5_check(
            &f,
            f.exact_pressure().as_ref(),
            &seed(),
            0.4,
            &FdSettings::default(),
            SignConvention::EulerConsistent,
            &opts(),
        )
        .unwrap();
        assert!(r.grad_p_b.abs() < 1e-12);
        assert!(r.normal_balance < 1e-12);
    }

    #[test]
    fn uniform_axial_final_terms_vanish() {
        let f =
            AxisymmetricField::uniform_axial(FluxProfile::Uniform { c: 2.0 }, domain()).unwrap();
        let r = final_residual(&f, &seed(), 0.3, &FdSettings::default(), &opts()).unwrap();
        assert!(r.degenerate);
        assert_eq!((r.t1, r.t2, r.t3), (0.0, 0.0, 0.0));
        assert_eq!(r.direct, 0.0);
    }

    #[test]
    fn angular_derivative_vanishes_on_catalog_fields() {
        let psi = StreamBump {
            amplitude: Amplitude::FluxModulated { a: 0.3 },
            z_center: 0.5,
            width: 0.5,
        };
        let s = AxisymmetricField::stream_function(
            psi,
            SwirlProfile::Gaussian { c: 1.0, width: 0.6 },
            osc(),
            domain(),
        )
        .unwrap();
        for f in [column(osc()), s] {
            let r = final_residual(
                &f,
                &Seed::new(0.45, 0.2, -0.5, 0.0),
                0.7,
                &FdSettings::default(),
                &opts(),
            )
            .unwrap();
            assert!(r.direct.abs() < 1e-8);
            assert!(
                r.decomposition.abs() < 1e-6 * (r.t1.abs() + r.t2.abs() + 1.0),
                "{}",
                r.decomposition
            );
        }
    }

    #[test]
    fn scaling_series_on_column() {
        let f = column(osc());
        let times = linspace(0.5, 0.9, 9);
        let s = scaling_series(&f, &seed(), &times, &opts()).unwrap();
        assert!(!s.truncated);
        for r in &s.quantity("dz_vz").unwrap().ratio {
            assert!((r.unwrap() - 1.0).abs() < 1e-8);
        }
        for r in &s.quantity("dzz_tinv").unwrap().ratio {
            assert!((r.unwrap() - 1.0).abs() < 1e-8);
        }
        for v in &s.quantity("vtheta").unwrap().values {
            assert_eq!(*v, 0.5);
        }
        let u = AxisymmetricField::uniform_axial(osc(), domain()).unwrap();
        let s = scaling_series(&u, &seed(), &times, &opts()).unwrap();
        assert!(s
            .quantity("vtheta")
            .unwrap()
            .ratio
            .iter()
            .all(Option::is_none));
    }

    #[test]
    fn theta_scaling_ratio_is_swirl_rate() {
        let f = column(osc());
        let times = linspace(0.6, 0.9, 7);
        for row in theta_scaling_check(&f, &seed(), &times, &opts()).unwrap() {
            assert!((row.ratio2.unwrap() - 1.0).abs() < 1e-6, "{row:?}");
            assert!((row.formula2 - row.reference2).abs() < 1e-10 * row.reference2.abs().max(1.0));
        }
    }

    #[test]
    fn lemma3_series_flags() {
        let u =
            AxisymmetricField::uniform_axial(FluxProfile::Uniform { c: 2.0 }, domain()).unwrap();
        assert!(
            !lemma3_series(&u, &seed(), &[0.5], &opts())
                .unwrap()
                .applicable
        );
        let f = column(FluxProfile::Uniform { c: 2.0 });
        let s = lemma3_series(&f, &seed(), &[0.5], &opts()).unwrap();
        assert!(s.samples[0].n_dot_etheta.abs() < 1e-12);
        assert_eq!(s.samples[0].ds_kappa, 0.0);
    }

    #[test]
    fn dominance_refuses_empty_window() {
        let flux = FluxProfile::PowerLaw { beta: 1.0 };
        let f = column(flux);
        let w = find_flux_windows_guarded(&flux, 0.1, 10_000, 1e-3).unwrap();
        assert!(matches!(
            dominance_report(&f, &seed(), &w, 5, &FdSettings::default(), &opts()),
            Err(Error::NoWindow(_))
        ));
    }
}
