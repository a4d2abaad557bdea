//! Frenet-Serret frames, axial angle derivatives and moving-frame charts.
//!
//! Frames use a right-handed `b = τ × n` with signed torsion, so that
//! `∂_s τ = κ n`, `∂_s n = -κ τ + T b`, `∂_s b = -T n` hold along the curve.

use nalgebra::{Matrix3, Vector3};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fd::Differentiator;
use crate::field::{kinematics_from_jet, AxisymmetricField, FieldKind, Kinematics};
use crate::trajectory::{AxisLengthCurve, Curve, Seed, Trajectory};

/// Samples with curvature below this are flagged as straight.
pub const KAPPA_FLOOR: f64 = 1e-10;

/// Chart validity margin on `|1 - κ r̄|`.
pub const CHART_MARGIN: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrenetFrame {
    pub tau: Vector3<f64>,
    pub n: Vector3<f64>,
    pub b: Vector3<f64>,
    pub kappa: f64,
    pub torsion: f64,
    pub ds_kappa: f64,
    /// κ below the floor; `n`, `b` and the torsion are zero.
    pub degenerate: bool,
    /// Computed with a one-sided stencil.
    pub one_sided: bool,
}

impl FrenetFrame {
    /// Torsion with the sign folded into the binormal, so that `T >= 0`.
    pub fn positive_torsion_view(&self) -> (f64, Vector3<f64>) {
        if self.torsion < 0.0 {
            (-self.torsion, -self.b)
        } else {
            (self.torsion, self.b)
        }
    }

    /// Largest deviation from an orthonormal triple with `b = τ × n`.
    pub fn orthonormality_defect(&self) -> f64 {
        [
            (self.tau.norm() - 1.0).abs(),
            (self.n.norm() - 1.0).abs(),
            (self.b.norm() - 1.0).abs(),
            self.tau.dot(&self.n).abs(),
            self.tau.dot(&self.b).abs(),
            self.n.dot(&self.b).abs(),
            (self.tau.cross(&self.n) - self.b).norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Frame from the first three derivatives of a position along any regular
/// parameter. `dkappa` is `dκ/dp`, converted to `∂_s κ` here.
pub fn frenet_from_derivatives(
    d1: &Vector3<f64>,
    d2: &Vector3<f64>,
    d3: &Vector3<f64>,
    dkappa: f64,
    kappa_floor: f64,
) -> FrenetFrame {
    let speed = d1.norm();
    let tau = d1 / speed;
    let c = d1.cross(d2);
    let cn = c.norm();
    let kappa = cn / speed.powi(3);
    let ds_kappa = dkappa / speed;
    if kappa < kappa_floor {
        return FrenetFrame {
            tau,
            n: Vector3::zeros(),
            b: Vector3::zeros(),
            kappa,
            torsion: 0.0,
            ds_kappa,
            degenerate: true,
            one_sided: false,
        };
    }
    let b = c / cn;
    let n = b.cross(&tau);
    FrenetFrame {
        tau,
        n,
        b,
        kappa,
        torsion: c.dot(d3) / (cn * cn),
        ds_kappa,
        degenerate: false,
        one_sided: false,
    }
}

/// Exact frame from velocity, acceleration and jerk of a motion.
pub fn frenet_from_motion(k: &Kinematics, kappa_floor: f64) -> FrenetFrame {
    let (u, a, j) = (&k.velocity, &k.acceleration, &k.jerk);
    let speed = u.norm();
    let ua = u.cross(a);
    let uan = ua.norm();
    // d|u×a|/dt = (u×a)·(u×j)/|u×a|
    let dkappa_dt = if uan > 0.0 {
        ua.dot(&u.cross(j)) / uan / speed.powi(3) - 3.0 * uan * u.dot(a) / speed.powi(5)
    } else {
        0.0
    };
    frenet_from_derivatives(u, a, j, dkappa_dt, kappa_floor)
}

/// Frames along a uniformly sampled curve by finite differences of the
/// sample positions.
///
/// `stencil` (odd, `>= 5`) points are used for every derivative level; the
/// first and last `stencil/2` samples get shifted one-sided stencils and are
/// flagged. `∂_s κ` comes from differencing the κ series.
pub fn frenet_from_curve(curve: &Curve, stencil: usize) -> Result<Vec<FrenetFrame>> {
    frenet_from_curve_with_floor(curve, stencil, KAPPA_FLOOR)
}

pub fn frenet_from_curve_with_floor(
    curve: &Curve,
    stencil: usize,
    kappa_floor: f64,
) -> Result<Vec<FrenetFrame>> {
    if stencil < 5 || stencil.is_multiple_of(2) {
        return Err(Error::Config(format!(
            "stencil must be odd and at least 5, got {stencil}"
        )));
    }
    if curve.len() < stencil {
        return Err(Error::Config(format!(
            "curve has {} samples, stencil needs {stencil}",
            curve.len()
        )));
    }
    let h = curve
        .uniform_step()
        .ok_or_else(|| Error::Config("frame computation needs uniformly spaced samples".into()))?;
    let pos = curve.positions();
    let n = pos.len();
    let d1 = Differentiator::new(stencil, 1);
    let d2 = Differentiator::new(stencil, 2);
    let d3 = Differentiator::new(stencil, 3);
    let p1 = d1.apply(&pos, h);
    let p2 = d2.apply(&pos, h);
    let p3 = d3.apply(&pos, h);
    let kappa: Vec<f64> = (0..n)
        .map(|i| p1[i].cross(&p2[i]).norm() / p1[i].norm().powi(3))
        .collect();
    let dk = d1.apply(&kappa, h);
    Ok((0..n)
        .map(|i| {
            let mut f = frenet_from_derivatives(&p1[i], &p2[i], &p3[i], dk[i], kappa_floor);
            f.one_sided = d1.is_one_sided(i, n);
            f
        })
        .collect())
}

/// Exact frame of a particle at time `t` on a trajectory, from the field's
/// analytic jets at the trajectory position.
pub fn frenet_on_trajectory(traj: &Trajectory, t: f64) -> FrenetFrame {
    let [r, theta, z, _, _] = traj.state(t);
    frenet_from_motion(&traj.field.kinematics(r, theta, z, t), KAPPA_FLOOR)
}

/// Frame of the swirling-column particle seeded at `seed`, evaluated at
/// time `t` from the closed-form variable-pitch helix.
pub fn frenet_analytic_column(
    field: &AxisymmetricField,
    seed: &Seed,
    t: f64,
) -> Result<FrenetFrame> {
    let FieldKind::SwirlColumn { swirl } = field.kind else {
        return Err(Error::Config(
            "closed-form frames need a swirl column".into(),
        ));
    };
    let r = seed.r0;
    let [w, _, _] = swirl.w(r, field.domain.r_max);
    let f = field.flux.eval(t)?;
    // R = r0, Θ = θ0 + (W/r0)(t - t0), Z' = g
    let omega = w / r;
    let theta = seed.theta0 + omega * (t - seed.t0);
    let (s, c) = theta.sin_cos();
    let e_r = Vector3::new(c, s, 0.0);
    let e_t = Vector3::new(-s, c, 0.0);
    let e_z = Vector3::z();
    let k = Kinematics {
        position: Vector3::new(r * c, r * s, 0.0),
        velocity: e_t * w + e_z * f.g,
        acceleration: -e_r * (w * omega) + e_z * f.g1,
        jerk: -e_t * (w * omega * omega) + e_z * f.g2,
        speed_rate: f.g * f.g1 / (w * w + f.g * f.g).sqrt(),
    };
    Ok(frenet_from_motion(&k, KAPPA_FLOOR))
}

/// Frame computed from a velocity jet at a cylindrical point.
pub fn frenet_at(field: &AxisymmetricField, r: f64, theta: f64, z: f64, t: f64) -> FrenetFrame {
    let jet = field.jet(r, z, t);
    frenet_from_motion(&kinematics_from_jet(&jet, r, theta, z), KAPPA_FLOOR)
}

/// Angle and radius derivatives along an axis-length curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThetaSample {
    pub z: f64,
    pub t: f64,
    /// `θ' = v_θ / (r v_z)`.
    pub theta1: f64,
    /// Finite differences of `θ'` in z.
    pub theta2: f64,
    pub theta3: f64,
    /// Leading-term values `-(v_θ/r) v_z' / v_z²` and
    /// `-(v_θ/r) v_z'' / v_z² + 2 (v_θ/r) v_z'² / v_z³`, primes being total
    /// z-derivatives along the trajectory.
    pub theta2_formula: f64,
    pub theta3_formula: f64,
    /// Flux scalings `-g'/g³` and `-g''/g⁴`.
    pub theta2_reference: f64,
    pub theta3_reference: f64,
    /// `r' = v_r / v_z` and its z-derivative.
    pub r1: f64,
    pub r2: f64,
    pub one_sided: bool,
}

/// Angle derivatives on a uniformly spaced axis-length curve.
///
/// `θ'` is taken from the sample velocities; `θ''` and `θ'''` are
/// `stencil`-point differences of the `θ'` series.
pub fn theta_derivatives(
    ax: &AxisLengthCurve,
    field: &AxisymmetricField,
    stencil: usize,
) -> Result<Vec<ThetaSample>> {
    let curve = &ax.curve;
    if stencil < 3 || stencil.is_multiple_of(2) || curve.len() < stencil {
        return Err(Error::Config(format!(
            "need an odd stencil >= 3 and at least that many samples, got stencil {stencil} and {} samples",
            curve.len()
        )));
    }
    let h = curve
        .uniform_step()
        .ok_or_else(|| Error::Config("angle derivatives need uniformly spaced stations".into()))?;
    let mut theta1 = Vec::with_capacity(curve.len());
    let mut rows = Vec::with_capacity(curve.len());
    for s in &curve.samples {
        let [vr, vt, vz] = s.v;
        if !(vz > 0.0) {
            return Err(Error::UnilateralViolation {
                r: s.r,
                z: s.z,
                t: s.t,
                vz,
            });
        }
        let jet = field.jet(s.r, s.z, s.t);
        let dvr = jet.material(&jet.vr);
        let dvz = jet.material(&jet.vz);
        let d2vz = jet.material2(&jet.vz);
        // total z-derivatives along the trajectory: d/dz = D / v_z
        let vz1 = dvz / vz;
        let vz2 = (d2vz / vz - dvz * dvz / (vz * vz)) / vz;
        let w = vt / s.r;
        let f = field.flux.eval(s.t)?;
        theta1.push(w / vz);
        rows.push(ThetaSample {
            z: s.z,
            t: s.t,
            theta1: w / vz,
            theta2: 0.0,
            theta3: 0.0,
            theta2_formula: -w * vz1 / (vz * vz),
            theta3_formula: -w * vz2 / (vz * vz) + 2.0 * w * vz1 * vz1 / vz.powi(3),
            theta2_reference: -f.g1 / f.g.powi(3),
            theta3_reference: -f.g2 / f.g.powi(4),
            r1: vr / vz,
            r2: (dvr / vz - vr * dvz / (vz * vz)) / vz,
            one_sided: false,
        });
    }
    let d1 = Differentiator::new(stencil, 1);
    let d2 = Differentiator::new(stencil, 2);
    let n = rows.len();
    for (i, row) in rows.iter_mut().enumerate() {
        row.theta2 = d1.at(&theta1, h, i);
        row.theta3 = d2.at(&theta1, h, i);
        row.one_sided = d1.is_one_sided(i, n);
    }
    Ok(rows)
}

/// Normal coordinates `x = η*(θ̄) + r̄ n(θ̄) + z̄ b(θ̄)` around a curve.
///
/// Row `i` of `m` holds the `(τ, n, b)` components of `∂_θ̄ x`, `∂_r̄ x`,
/// `∂_z̄ x`; `m_inv` is its inverse, whose first row gives `τ` in terms of the
/// coordinate derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MovingFrameChart {
    pub kappa: f64,
    pub torsion: f64,
    pub rbar: f64,
    pub zbar: f64,
    pub m: Matrix3<f64>,
    pub m_inv: Matrix3<f64>,
}

impl MovingFrameChart {
    pub fn new(kappa: f64, torsion: f64, rbar: f64, zbar: f64) -> Result<Self> {
        let margin = 1.0 - kappa * rbar;
        if !(margin.abs() > CHART_MARGIN) {
            return Err(Error::ChartDomain { margin });
        }
        // ∂_θ̄ x = (1 - κ r̄) τ - z̄ T n + r̄ T b
        let m = Matrix3::new(
            margin,
            -zbar * torsion,
            rbar * torsion,
            0.0,
            1.0,
            0.0,
            0.0,
            0.0,
            1.0,
        );
        let m_inv = Matrix3::new(
            1.0 / margin,
            zbar * torsion / margin,
            -rbar * torsion / margin,
            0.0,
            1.0,
            0.0,
            0.0,
            0.0,
            1.0,
        );
        Ok(Self {
            kappa,
            torsion,
            rbar,
            zbar,
            m,
            m_inv,
        })
    }

    /// Coefficients of `τ` on `(∂_θ̄, ∂_r̄, ∂_z̄)`.
    pub fn tau_coefficients(&self) -> [f64; 3] {
        [self.m_inv[(0, 0)], self.m_inv[(0, 1)], self.m_inv[(0, 2)]]
    }

    /// Max-abs entry of `M M_inv - I`.
    pub fn product_residual(&self) -> f64 {
        (self.m * self.m_inv - Matrix3::identity()).abs().max()
    }

    /// The matrix pair with entries transcribed literally: first row
    /// `(1 - κ r̄, z̄ κ, r̄ T)` and inverse first row
    /// `((1 - κ r̄)^{-1}, -z̄ T (1 - κ r̄)^{-1}, -r̄ T (1 - κ r̄)^{-1})`.
    pub fn literal(&self) -> LiteralChart {
        let margin = 1.0 - self.kappa * self.rbar;
        let m = Matrix3::new(
            margin,
            self.zbar * self.kappa,
            self.rbar * self.torsion,
            0.0,
            1.0,
            0.0,
            0.0,
            0.0,
            1.0,
        );
        let m_inv = Matrix3::new(
            1.0 / margin,
            -self.zbar * self.torsion / margin,
            -self.rbar * self.torsion / margin,
            0.0,
            1.0,
            0.0,
            0.0,
            0.0,
            1.0,
        );
        LiteralChart {
            m,
            m_inv,
            product_residual: (m * m_inv - Matrix3::identity()).abs().max(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LiteralChart {
    pub m: Matrix3<f64>,
    pub m_inv: Matrix3<f64>,
    pub product_residual: f64,
}

pub fn moving_frame_chart(
    kappa: f64,
    torsion: f64,
    rbar: f64,
    zbar: f64,
) -> Result<MovingFrameChart> {
    MovingFrameChart::new(kappa, torsion, rbar, zbar)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{CylinderDomain, SwirlProfile};
    use crate::flux::FluxProfile;
    use crate::trajectory::{
        integrate_time, reparam_arc_length, reparam_axis_length_on, CurveSample, Parameterization,
        TrajectoryOptions,
    };

    fn curve_from(points: impl Fn(f64) -> Vector3<f64>, h: f64, n: usize) -> Curve {
        let samples = (0..n)
            .map(|i| {
                let s = i as f64 * h;
                let p = points(s);
                let r = (p.x * p.x + p.y * p.y).sqrt();
                CurveSample {
                    param: s,
                    t: s,
                    r,
                    theta: p.y.atan2(p.x),
                    z: p.z,
                    v: [0.0; 3],
                    speed: 1.0,
                }
            })
            .collect();
        Curve {
            param: Parameterization::ArcLength,
            seed: Seed::new(1.0, 0.0, 0.0, 0.0),
            samples,
        }
    }

    fn helix(a: f64, omega: f64, c: f64) -> impl Fn(f64) -> Vector3<f64> {
        let l = (a * a * omega * omega + c * c).sqrt();
        move |s| {
            let q = omega * s / l;
            Vector3::new(a * q.cos(), a * q.sin(), c * s / l)
        }
    }

    fn column(flux: FluxProfile) -> AxisymmetricField {
        AxisymmetricField::swirl_column(
            SwirlProfile::Rigid { omega: 1.0 },
            flux,
            CylinderDomain::default(),
        )
        .unwrap()
    }

    #[test]
    fn planar_circle_has_unit_curvature_and_no_torsion() {
        let c = curve_from(|s| Vector3::new(s.cos(), s.sin(), 0.0), 1e-3, 41);
        for f in frenet_from_curve(&c, 5)
            .unwrap()
            .iter()
            .filter(|f| !f.one_sided)
        {
            assert!((f.kappa - 1.0).abs() < 1e-8);
            assert!(f.torsion.abs() < 1e-8);
        }
    }

    #[test]
    fn sampled_helix_matches_closed_form() {
        let c = curve_from(helix(0.5, 1.0, 2.0), 1e-2, 41);
        for f in frenet_from_curve(&c, 5)
            .unwrap()
            .iter()
            .filter(|f| !f.one_sided)
        {
            assert!((f.kappa - 0.5 / 4.25).abs() < 1e-8);
            assert!((f.torsion - 2.0 / 4.25).abs() < 1e-5);
            assert!(f.ds_kappa.abs() < 1e-8);
            assert!(f.orthonormality_defect() < 1e-12);
        }
    }

    #[test]
    fn straight_line_is_degenerate() {
        let c = curve_from(|s| Vector3::new(0.3 + 0.1 * s, 0.2, s), 1e-2, 20);
        assert!(frenet_from_curve(&c, 5)
            .unwrap()
            .iter()
            .all(|f| f.degenerate));
    }

    #[test]
    fn stencil_is_validated() {
        let c = curve_from(helix(0.5, 1.0, 2.0), 1e-2, 4);
        assert!(frenet_from_curve(&c, 5).is_err());
        let c = curve_from(helix(0.5, 1.0, 2.0), 1e-2, 40);
        assert!(frenet_from_curve(&c, 4).is_err());
        assert!(frenet_from_curve(&c, 3).is_err());
    }

    #[test]
    fn analytic_column_frame_for_uniform_flux() {
        let f = column(FluxProfile::Uniform { c: 2.0 });
        let fr = frenet_analytic_column(&f, &Seed::new(0.5, 0.0, 0.0, 0.0), 0.3).unwrap();
        assert!((fr.kappa - 0.5 / 4.25).abs() < 1e-12);
        assert!((fr.torsion - 2.0 / 4.25).abs() < 1e-12);
        assert_eq!(fr.ds_kappa, 0.0);
        // the principal normal points at the axis
        let th = 0.3f64;
        assert!((fr.n - Vector3::new(-th.cos(), -th.sin(), 0.0)).norm() < 1e-12);
    }

    #[test]
    fn no_swirl_column_is_straight() {
        let f = AxisymmetricField::swirl_column(
            SwirlProfile::None,
            FluxProfile::Uniform { c: 2.0 },
            CylinderDomain::default(),
        )
        .unwrap();
        let fr = frenet_analytic_column(&f, &Seed::new(0.5, 0.0, 0.0, 0.0), 0.3).unwrap();
        assert_eq!(fr.kappa, 0.0);
        assert!(fr.degenerate);
    }

    #[test]
    fn analytic_ds_kappa_matches_difference_of_kappa() {
        let flux = FluxProfile::Oscillating {
            beta1: 1.0,
            beta2: 2.0,
        };
        let f = column(flux);
        let seed = Seed::new(0.5, 0.0, 0.0, 0.0);
        let t = 0.6;
        let dt = 1e-6;
        let kp = frenet_analytic_column(&f, &seed, t + dt).unwrap().kappa;
        let km = frenet_analytic_column(&f, &seed, t - dt).unwrap().kappa;
        let fr = frenet_analytic_column(&f, &seed, t).unwrap();
        let speed = (0.25f64 + flux.eval(t).unwrap().g.powi(2)).sqrt();
        let fd = (kp - km) / (2.0 * dt) / speed;
        assert!((fd - fr.ds_kappa).abs() < 1e-7 * fr.ds_kappa.abs().max(1.0));
    }

    #[test]
    fn trajectory_frames_agree_with_column_oracle() {
        let f = column(FluxProfile::Oscillating {
            beta1: 1.0,
            beta2: 2.0,
        });
        let seed = Seed::new(0.5, 0.3, 0.0, 0.0);
        let tr = integrate_time(&f, seed, 0.8, &TrajectoryOptions::with_tol(1e-12)).unwrap();
        for t in [0.2, 0.5, 0.79] {
            let a = frenet_on_trajectory(&tr, t);
            let b = frenet_analytic_column(&f, &seed, t).unwrap();
            assert!((a.kappa - b.kappa).abs() < 1e-12);
            assert!((a.torsion - b.torsion).abs() < 1e-12);
            assert!((a.ds_kappa - b.ds_kappa).abs() < 1e-10 * b.ds_kappa.abs().max(1.0));
            assert!((a.n - b.n).norm() < 1e-9);
        }
    }

    #[test]
    fn sampled_trajectory_frames_converge() {
        let f = column(FluxProfile::Oscillating {
            beta1: 1.0,
            beta2: 2.0,
        });
        let seed = Seed::new(0.5, 0.0, 0.0, 0.0);
        let tr = integrate_time(&f, seed, 0.5, &TrajectoryOptions::with_tol(1e-13)).unwrap();
        let errors = |n: usize| {
            let c = reparam_arc_length(&tr, n).unwrap();
            let frames = frenet_from_curve(&c, 5).unwrap();
            let mut e = (0.0f64, 0.0f64);
            for (s, fr) in c.samples.iter().zip(&frames).filter(|(_, f)| !f.one_sided) {
                let exact = frenet_analytic_column(&f, &seed, s.t).unwrap();
                e.0 = e.0.max((fr.kappa - exact.kappa).abs());
                e.1 = e.1.max((fr.torsion - exact.torsion).abs());
            }
            e
        };
        let (coarse, fine) = (errors(201), errors(401));
        assert!(coarse.0 < 1e-5 && fine.0 < 1e-5);
        assert!(coarse.1 / fine.1 > 3.0, "{coarse:?} {fine:?}");
    }

    #[test]
    fn theta_derivatives_on_uniform_column() {
        let f = column(FluxProfile::Uniform { c: 2.0 });
        let tr = integrate_time(
            &f,
            Seed::new(0.5, 0.0, 0.0, 0.0),
            0.9,
            &TrajectoryOptions::default(),
        )
        .unwrap();
        let zs: Vec<f64> = (0..21).map(|i| 0.1 + 0.05 * i as f64).collect();
        let ax = reparam_axis_length_on(&tr, &zs).unwrap();
        for row in theta_derivatives(&ax, &f, 5).unwrap() {
            assert!((row.theta1 - 0.5).abs() < 1e-15);
            assert!(row.theta2.abs() < 1e-10 && row.theta3.abs() < 1e-8);
            assert_eq!(row.theta2_formula, 0.0);
        }
    }

    #[test]
    fn theta_derivatives_on_power_law_column() {
        let flux = FluxProfile::PowerLaw { beta: 1.0 };
        let f = column(flux);
        let tr = integrate_time(
            &f,
            Seed::new(0.5, 0.0, 0.0, 0.0),
            0.9,
            &TrajectoryOptions::with_tol(1e-12),
        )
        .unwrap();
        let zs: Vec<f64> = (0..41).map(|i| 0.5 + 1e-3 * i as f64).collect();
        let ax = reparam_axis_length_on(&tr, &zs).unwrap();
        for row in theta_derivatives(&ax, &f, 5).unwrap() {
            // θ' = 1/g(t(z)); θ'' = -g'/g³ with W/r0 = 1
            assert!((row.theta2 - row.theta2_reference).abs() < 1e-8);
            assert!((row.theta2_formula - row.theta2_reference).abs() < 1e-12);
            let g = flux.eval(row.t).unwrap();
            let exact3 = -(g.g2 / g.g.powi(4) - 3.0 * g.g1 * g.g1 / g.g.powi(5));
            assert!((row.theta3_formula - exact3).abs() < 1e-12);
            assert!((row.theta3 - exact3).abs() < 1e-5);
        }
    }

    #[test]
    fn chart_examples() {
        let c = moving_frame_chart(0.0, 0.0, 0.3, 0.4).unwrap();
        assert_eq!(c.m, Matrix3::identity());
        assert_eq!(c.m_inv, Matrix3::identity());
        let c = moving_frame_chart(0.1, 0.2, 0.3, 0.4).unwrap();
        assert!((c.m[(0, 0)] - 0.97).abs() < 1e-15);
        assert!((c.m_inv[(0, 0)] - 1.0 / 0.97).abs() < 1e-15);
        assert!(c.product_residual() < 1e-15);
        assert!(c.literal().product_residual > 1e-3);
        let c = moving_frame_chart(0.3, 0.7, 0.0, 0.0).unwrap();
        assert_eq!(c.m, Matrix3::identity());
        assert_eq!(c.tau_coefficients(), [1.0, 0.0, 0.0]);
        assert!(matches!(
            moving_frame_chart(2.0, 0.0, 0.5, 0.0),
            Err(Error::ChartDomain { .. })
        ));
    }

    #[test]
    fn chart_matches_embedding_derivative() {
        // x(θ̄, r̄, z̄) = η*(θ̄) + r̄ n(θ̄) + z̄ b(θ̄) on a helix, differentiated in θ̄
        let (a, om, cc) = (0.5f64, 1.0f64, 2.0f64);
        let l2 = a * a * om * om + cc * cc;
        let l = l2.sqrt();
        let (kappa, torsion) = (a * om * om / l2, cc * om / l2);
        let frame = |s: f64| {
            let q = om * s / l;
            let p = Vector3::new(a * q.cos(), a * q.sin(), cc * s / l);
            let tau = Vector3::new(-a * om * q.sin() / l, a * om * q.cos() / l, cc / l);
            let n = Vector3::new(-q.cos(), -q.sin(), 0.0);
            (p, tau, n, tau.cross(&n))
        };
        let (rbar, zbar, s0, h) = (0.3, -0.2, 0.7, 1e-5);
        let x = |s: f64| {
            let (p, _, n, b) = frame(s);
            p + n * rbar + b * zbar
        };
        let dx = (x(s0 + h) - x(s0 - h)) / (2.0 * h);
        let (_, tau, n, b) = frame(s0);
        let chart = moving_frame_chart(kappa, torsion, rbar, zbar).unwrap();
        let row = [dx.dot(&tau), dx.dot(&n), dx.dot(&b)];
        for k in 0..3 {
            assert!(
                (row[k] - chart.m[(0, k)]).abs() < 1e-9,
                "{k}: {} vs {}",
                row[k],
                chart.m[(0, k)]
            );
        }
    }
}
