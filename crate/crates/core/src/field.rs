//! Axisymmetric velocity fields on a truncated cylinder.
//!
//! Every field in the catalog is closed form. Components and all first and
//! second partial derivatives in (r, z, t) come from [`Jet`] arithmetic on
//! separable factors, never from finite differences.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flux::FluxProfile;

/// Truncated cylinder `r <= r_max`, `z_min <= z <= z_max`, `0 <= t < t_max`.
/// The plane `z = z_min` is the inlet reference plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CylinderDomain {
    pub r_max: f64,
    pub z_min: f64,
    pub z_max: f64,
    pub t_max: f64,
}

impl Default for CylinderDomain {
    fn default() -> Self {
        Self {
            r_max: 1.0,
            z_min: -2.0,
            z_max: 6.0,
            t_max: 1.0,
        }
    }
}

impl CylinderDomain {
    pub fn validate(&self) -> Result<()> {
        if !(self.r_max > 0.0 && self.r_max.is_finite()) {
            return Err(Error::Config(format!(
                "r_max must be positive, got {}",
                self.r_max
            )));
        }
        if !(self.z_min < self.z_max) {
            return Err(Error::Config(format!(
                "need z_min < z_max, got [{}, {}]",
                self.z_min, self.z_max
            )));
        }
        if !(self.t_max > 0.0 && self.t_max <= 1.0) {
            return Err(Error::Config(format!(
                "t_max must lie in (0, 1], got {}",
                self.t_max
            )));
        }
        Ok(())
    }

    pub fn contains(&self, r: f64, z: f64, t: f64) -> bool {
        (0.0..=self.r_max).contains(&r)
            && (self.z_min..=self.z_max).contains(&z)
            && t >= 0.0
            && t < self.t_max
    }
}

/// Value and first/second partials of a scalar function of (r, z, t).
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Jet {
    pub v: f64,
    pub r: f64,
    pub z: f64,
    pub t: f64,
    pub rr: f64,
    pub rz: f64,
    pub rt: f64,
    pub zz: f64,
    pub zt: f64,
    pub tt: f64,
}

/// `[f, f', f'']` of a function of one variable.
pub type Univariate = [f64; 3];

impl Jet {
    pub fn constant(v: f64) -> Self {
        Self {
            v,
            ..Self::default()
        }
    }

    pub fn of_r(f: Univariate) -> Self {
        Self {
            v: f[0],
            r: f[1],
            rr: f[2],
            ..Self::default()
        }
    }

    pub fn of_z(f: Univariate) -> Self {
        Self {
            v: f[0],
            z: f[1],
            zz: f[2],
            ..Self::default()
        }
    }

    pub fn of_t(f: Univariate) -> Self {
        Self {
            v: f[0],
            t: f[1],
            tt: f[2],
            ..Self::default()
        }
    }

    /// Spatial gradient (∂_r, ∂_z).
    pub fn grad(&self) -> [f64; 2] {
        [self.r, self.z]
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        Jet {
            v: self.v + o.v,
            r: self.r + o.r,
            z: self.z + o.z,
            t: self.t + o.t,
            rr: self.rr + o.rr,
            rz: self.rz + o.rz,
            rt: self.rt + o.rt,
            zz: self.zz + o.zz,
            zt: self.zt + o.zt,
            tt: self.tt + o.tt,
        }
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self * -1.0
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        self + (-o)
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, c: f64) -> Jet {
        Jet {
            v: self.v * c,
            r: self.r * c,
            z: self.z * c,
            t: self.t * c,
            rr: self.rr * c,
            rz: self.rz * c,
            rt: self.rt * c,
            zz: self.zz * c,
            zt: self.zt * c,
            tt: self.tt * c,
        }
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        let (a, b) = (self, o);
        Jet {
            v: a.v * b.v,
            r: a.r * b.v + a.v * b.r,
            z: a.z * b.v + a.v * b.z,
            t: a.t * b.v + a.v * b.t,
            rr: a.rr * b.v + 2.0 * a.r * b.r + a.v * b.rr,
            rz: a.rz * b.v + a.r * b.z + a.z * b.r + a.v * b.rz,
            rt: a.rt * b.v + a.r * b.t + a.t * b.r + a.v * b.rt,
            zz: a.zz * b.v + 2.0 * a.z * b.z + a.v * b.zz,
            zt: a.zt * b.v + a.z * b.t + a.t * b.z + a.v * b.zt,
            tt: a.tt * b.v + 2.0 * a.t * b.t + a.v * b.tt,
        }
    }
}

/// Jets of the three cylindrical velocity components.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct VelocityJet {
    pub vr: Jet,
    pub vtheta: Jet,
    pub vz: Jet,
}

impl VelocityJet {
    pub fn components(&self) -> [f64; 3] {
        [self.vr.v, self.vtheta.v, self.vz.v]
    }

    pub fn speed(&self) -> f64 {
        let [a, b, c] = self.components();
        (a * a + b * b + c * c).sqrt()
    }

    /// Material derivative `D f = ∂_t f + v_r ∂_r f + v_z ∂_z f` of an
    /// axisymmetric scalar.
    pub fn material(&self, f: &Jet) -> f64 {
        f.t + self.vr.v * f.r + self.vz.v * f.z
    }

    /// Second material derivative `D² f`.
    pub fn material2(&self, f: &Jet) -> f64 {
        let (vr, vz) = (self.vr.v, self.vz.v);
        let dvr = self.material(&self.vr);
        let dvz = self.material(&self.vz);
        let d_ft = f.tt + vr * f.rt + vz * f.zt;
        let d_fr = f.rt + vr * f.rr + vz * f.rz;
        let d_fz = f.zt + vr * f.rz + vz * f.zz;
        d_ft + dvr * f.r + vr * d_fr + dvz * f.z + vz * d_fz
    }
}

/// Divergence `∂_r(r v_r)/r + ∂_z v_z`, using the axis limit
/// `2 ∂_r v_r + ∂_z v_z` at r = 0.
pub fn divergence_of(jet: &VelocityJet, r: f64) -> f64 {
    if r == 0.0 {
        2.0 * jet.vr.r + jet.vz.z
    } else {
        jet.vr.v / r + jet.vr.r + jet.vz.z
    }
}

/// Swirl W(r) catalog. All profiles vanish on the axis with finite W/r.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SwirlProfile {
    #[default]
    None,
    /// W = omega r (solid-body rotation).
    Rigid { omega: f64 },
    /// W = c r (r_max² - r²).
    Polynomial { c: f64 },
    /// W = c r exp(-r²/width²).
    Gaussian { c: f64, width: f64 },
}

impl SwirlProfile {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            SwirlProfile::None => true,
            SwirlProfile::Rigid { omega } => omega.is_finite(),
            SwirlProfile::Polynomial { c } => c.is_finite(),
            SwirlProfile::Gaussian { c, width } => c.is_finite() && width > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid swirl profile {self:?}")))
        }
    }

    pub fn is_zero(&self) -> bool {
        match *self {
            SwirlProfile::None => true,
            SwirlProfile::Rigid { omega } => omega == 0.0,
            SwirlProfile::Polynomial { c } | SwirlProfile::Gaussian { c, .. } => c == 0.0,
        }
    }

    /// `[W, W', W'']` at r.
    pub fn w(&self, r: f64, r_max: f64) -> Univariate {
        match *self {
            SwirlProfile::None => [0.0; 3],
            SwirlProfile::Rigid { omega } => [omega * r, omega, 0.0],
            SwirlProfile::Polynomial { c } => {
                let r2 = r_max * r_max;
                [c * r * (r2 - r * r), c * (r2 - 3.0 * r * r), -6.0 * c * r]
            }
            SwirlProfile::Gaussian { c, width } => {
                let a = 1.0 / (width * width);
                let e = (-a * r * r).exp();
                [
                    c * r * e,
                    c * e * (1.0 - 2.0 * a * r * r),
                    c * e * (-6.0 * a * r + 4.0 * a * a * r * r * r),
                ]
            }
        }
    }

    /// `[P, P', P'']` with `P' = W²/r`, the radial pressure balancing the swirl.
    pub fn pressure(&self, r: f64, r_max: f64) -> Univariate {
        match *self {
            SwirlProfile::None => [0.0; 3],
            SwirlProfile::Rigid { omega } => {
                let w2 = omega * omega;
                [0.5 * w2 * r * r, w2 * r, w2]
            }
            SwirlProfile::Polynomial { c } => {
                let d = r_max * r_max - r * r;
                let c2 = c * c;
                [
                    -c2 * d * d * d / 6.0,
                    c2 * r * d * d,
                    c2 * d * (r_max * r_max - 5.0 * r * r),
                ]
            }
            SwirlProfile::Gaussian { c, width } => {
                let a = 1.0 / (width * width);
                let e2 = (-2.0 * a * r * r).exp();
                let c2 = c * c;
                [
                    -0.25 * c2 * width * width * e2,
                    c2 * r * e2,
                    c2 * e2 * (1.0 - 4.0 * a * r * r),
                ]
            }
        }
    }
}

/// Time dependence of the stream-function bump amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Amplitude {
    /// A(t) = a.
    Constant { a: f64 },
    /// A(t) = a g(t) / (1 + g(t)), bounded by |a| for any positive flux.
    FluxModulated { a: f64 },
}

impl Amplitude {
    fn bound(&self) -> f64 {
        match *self {
            Amplitude::Constant { a } | Amplitude::FluxModulated { a } => a.abs(),
        }
    }

    fn eval(&self, flux: &FluxProfile, t: f64) -> Univariate {
        match *self {
            Amplitude::Constant { a } => [a, 0.0, 0.0],
            Amplitude::FluxModulated { a } => {
                let f = flux.eval_unchecked(t);
                let d = 1.0 + f.g;
                [
                    a * f.g / d,
                    a * f.g1 / (d * d),
                    a * (f.g2 / (d * d) - 2.0 * f.g1 * f.g1 / (d * d * d)),
                ]
            }
        }
    }
}

/// Stream function `ψ = g(t) [r²/2 + A(t) φ(r) χ(z)]` with
/// `φ = r² (r_max² - r²)²` and the Gaussian `χ = exp(-(z - z_center)²/width²)`.
///
/// `v_r = -∂_z ψ / r` vanishes on the axis and the wall; the inflow is
/// uniform, `v_z = g`, wherever χ is negligible.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StreamBump {
    pub amplitude: Amplitude,
    pub z_center: f64,
    pub width: f64,
}

impl StreamBump {
    fn chi(&self, z: f64) -> [f64; 4] {
        let a = 1.0 / (self.width * self.width);
        let d = z - self.z_center;
        let e = (-a * d * d).exp();
        [
            e,
            -2.0 * a * d * e,
            (4.0 * a * a * d * d - 2.0 * a) * e,
            (-8.0 * a * a * a * d * d * d + 12.0 * a * a * d) * e,
        ]
    }
}

// φ'(r)/r, φ(r)/r and φ(r) for the radial bump
fn bump_radial(r: f64, r_max: f64) -> (Univariate, Univariate, f64) {
    let r2 = r_max * r_max;
    let r4 = r2 * r2;
    let x = r * r;
    let phi1 = [
        2.0 * (r4 - 4.0 * r2 * x + 3.0 * x * x),
        2.0 * (-8.0 * r2 * r + 12.0 * x * r),
        2.0 * (-8.0 * r2 + 36.0 * x),
    ];
    let phi2 = [
        r4 * r - 2.0 * r2 * x * r + x * x * r,
        r4 - 6.0 * r2 * x + 5.0 * x * x,
        -12.0 * r2 * r + 20.0 * x * r,
    ];
    let d = r2 - x;
    (phi1, phi2, x * d * d)
}

/// Field catalog.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldKind {
    /// u = (0, 0, g(t)).
    UniformAxial,
    /// v_r = 0, v_θ = W(r), v_z = g(t); an exact Euler solution.
    SwirlColumn { swirl: SwirlProfile },
    /// Divergence-free stream-function field with time-independent swirl.
    StreamFunction {
        psi: StreamBump,
        swirl: SwirlProfile,
    },
}

/// A catalog field bound to a flux profile and a domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AxisymmetricField {
    pub kind: FieldKind,
    pub flux: FluxProfile,
    pub domain: CylinderDomain,
}

impl AxisymmetricField {
    pub fn new(kind: FieldKind, flux: FluxProfile, domain: CylinderDomain) -> Result<Self> {
        domain.validate()?;
        flux.validate()?;
        match &kind {
            FieldKind::UniformAxial => {}
            FieldKind::SwirlColumn { swirl } => swirl.validate()?,
            FieldKind::StreamFunction { psi, swirl } => {
                swirl.validate()?;
                if !(psi.width > 0.0) {
                    return Err(Error::Config("stream bump width must be positive".into()));
                }
                // v_z = g (1 + A φ'/r χ) with φ'/r ∈ [-2R⁴/3, 2R⁴]
                let r4 = domain.r_max.powi(4);
                if psi.amplitude.bound() * 2.0 * r4 >= 1.0 {
                    return Err(Error::Config(format!(
                        "stream bump amplitude {} breaks unilateral flow (need |a| < {})",
                        psi.amplitude.bound(),
                        0.5 / r4
                    )));
                }
            }
        }
        Ok(Self { kind, flux, domain })
    }

    pub fn uniform_axial(flux: FluxProfile, domain: CylinderDomain) -> Result<Self> {
        Self::new(FieldKind::UniformAxial, flux, domain)
    }

    pub fn swirl_column(
        swirl: SwirlProfile,
        flux: FluxProfile,
        domain: CylinderDomain,
    ) -> Result<Self> {
        Self::new(FieldKind::SwirlColumn { swirl }, flux, domain)
    }

    pub fn stream_function(
        psi: StreamBump,
        swirl: SwirlProfile,
        flux: FluxProfile,
        domain: CylinderDomain,
    ) -> Result<Self> {
        Self::new(FieldKind::StreamFunction { psi, swirl }, flux, domain)
    }

    pub fn swirl(&self) -> SwirlProfile {
        match self.kind {
            FieldKind::UniformAxial => SwirlProfile::None,
            FieldKind::SwirlColumn { swirl } | FieldKind::StreamFunction { swirl, .. } => swirl,
        }
    }

    pub fn has_swirl(&self) -> bool {
        !self.swirl().is_zero()
    }

    pub fn check_point(&self, r: f64, z: f64, t: f64) -> Result<()> {
        if self.domain.contains(r, z, t) {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "point (r={r}, z={z}, t={t}) is outside {:?}",
                self.domain
            )))
        }
    }

    /// Components and partial derivatives at a domain point.
    pub fn eval(&self, r: f64, z: f64, t: f64) -> Result<VelocityJet> {
        self.check_point(r, z, t)?;
        Ok(self.jet(r, z, t))
    }

    /// As [`eval`](Self::eval) without the domain check.
    pub fn jet(&self, r: f64, z: f64, t: f64) -> VelocityJet {
        let f = self.flux.eval_unchecked(t);
        let g = Jet::of_t([f.g, f.g1, f.g2]);
        let r_max = self.domain.r_max;
        match self.kind {
            FieldKind::UniformAxial => VelocityJet {
                vz: g,
                ..VelocityJet::default()
            },
            FieldKind::SwirlColumn { swirl } => VelocityJet {
                vr: Jet::default(),
                vtheta: Jet::of_r(swirl.w(r, r_max)),
                vz: g,
            },
            FieldKind::StreamFunction { psi, swirl } => {
                let amp = Jet::of_t(psi.amplitude.eval(&self.flux, t));
                let (phi1, phi2, _) = bump_radial(r, r_max);
                let chi = psi.chi(z);
                let ga = g * amp;
                VelocityJet {
                    vr: -(ga * Jet::of_r(phi2) * Jet::of_z([chi[1], chi[2], chi[3]])),
                    vtheta: Jet::of_r(swirl.w(r, r_max)),
                    vz: g + ga * Jet::of_r(phi1) * Jet::of_z([chi[0], chi[1], chi[2]]),
                }
            }
        }
    }

    /// `(v_r, v_θ, v_z)` without derivatives.
    pub fn velocity(&self, r: f64, z: f64, t: f64) -> [f64; 3] {
        let g = self.flux.eval_unchecked(t).g;
        let r_max = self.domain.r_max;
        match self.kind {
            FieldKind::UniformAxial => [0.0, 0.0, g],
            FieldKind::SwirlColumn { swirl } => [0.0, swirl.w(r, r_max)[0], g],
            FieldKind::StreamFunction { psi, swirl } => {
                let a = psi.amplitude.eval(&self.flux, t)[0];
                let (phi1, phi2, _) = bump_radial(r, r_max);
                let chi = psi.chi(z);
                [
                    -g * a * phi2[0] * chi[1],
                    swirl.w(r, r_max)[0],
                    g * (1.0 + a * phi1[0] * chi[0]),
                ]
            }
        }
    }

    /// Stream function value ψ(r, z, t); `None` for fields not built from one.
    pub fn stream_function_value(&self, r: f64, z: f64, t: f64) -> Option<f64> {
        match self.kind {
            FieldKind::StreamFunction { psi, .. } => {
                let g = self.flux.eval_unchecked(t).g;
                let a = psi.amplitude.eval(&self.flux, t)[0];
                let (_, _, phi) = bump_radial(r, self.domain.r_max);
                Some(g * (0.5 * r * r + a * phi * psi.chi(z)[0]))
            }
            _ => None,
        }
    }

    /// Closed-form pressure for the exact Euler solutions in the catalog.
    pub fn exact_pressure(&self) -> Option<PressureMap> {
        match self.kind {
            FieldKind::UniformAxial => Some(PressureMap::Column {
                swirl: SwirlProfile::None,
                flux: self.flux,
                r_max: self.domain.r_max,
            }),
            FieldKind::SwirlColumn { swirl } => Some(PressureMap::Column {
                swirl,
                flux: self.flux,
                r_max: self.domain.r_max,
            }),
            FieldKind::StreamFunction { .. } => None,
        }
    }

    /// Cartesian position, velocity, acceleration and jerk of the particle
    /// passing through cylindrical point (r, θ, z) at time t, plus the rate
    /// `∂_t|u| = u·a/|u|` along its trajectory.
    pub fn kinematics(&self, r: f64, theta: f64, z: f64, t: f64) -> Kinematics {
        let jet = self.jet(r, z, t);
        kinematics_from_jet(&jet, r, theta, z)
    }
}

/// Particle kinematics at one point, all in Cartesian components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kinematics {
    pub position: Vector3<f64>,
    pub velocity: Vector3<f64>,
    pub acceleration: Vector3<f64>,
    pub jerk: Vector3<f64>,
    /// ∂_t|u| along the trajectory (material derivative of the speed).
    pub speed_rate: f64,
}

pub fn kinematics_from_jet(jet: &VelocityJet, r: f64, theta: f64, z: f64) -> Kinematics {
    let (s, c) = theta.sin_cos();
    let e_r = Vector3::new(c, s, 0.0);
    let e_t = Vector3::new(-s, c, 0.0);
    let e_z = Vector3::z();
    let [vr, vt, vz] = jet.components();
    let dvr = jet.material(&jet.vr);
    let dvt = jet.material(&jet.vtheta);
    let dvz = jet.material(&jet.vz);
    let (ar, at) = if r > 0.0 {
        (dvr - vt * vt / r, dvt + vr * vt / r)
    } else {
        (dvr, dvt)
    };
    let az = dvz;
    let (jr, jt) = if r > 0.0 {
        let d2vr = jet.material2(&jet.vr);
        let d2vt = jet.material2(&jet.vtheta);
        let dar = d2vr - 2.0 * vt * dvt / r + vt * vt * vr / (r * r);
        let dat = d2vt + (dvr * vt + vr * dvt) / r - vr * vt * vr / (r * r);
        (dar - vt * at / r, dat + vt * ar / r)
    } else {
        (jet.material2(&jet.vr), jet.material2(&jet.vtheta))
    };
    let jz = jet.material2(&jet.vz);
    let speed = jet.speed();
    Kinematics {
        position: Vector3::new(r * c, r * s, z),
        velocity: e_r * vr + e_t * vt + e_z * vz,
        acceleration: e_r * ar + e_t * at + e_z * az,
        jerk: e_r * jr + e_t * jt + e_z * jz,
        speed_rate: (vr * dvr + vt * dvt + vz * dvz) / speed,
    }
}

/// Pressure field supplied to the momentum residuals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum PressureMap {
    Zero,
    /// p = P(r) - g'(t) z with P' = W²/r.
    Column {
        swirl: SwirlProfile,
        flux: FluxProfile,
        r_max: f64,
    },
}

impl PressureMap {
    /// `(p, ∂_r p, ∂_z p)`.
    pub fn eval(&self, r: f64, z: f64, t: f64) -> [f64; 3] {
        match *self {
            PressureMap::Zero => [0.0; 3],
            PressureMap::Column { swirl, flux, r_max } => {
                let p = swirl.pressure(r, r_max);
                let g1 = flux.eval_unchecked(t).g1;
                [p[0] - g1 * z, p[1], -g1]
            }
        }
    }

    /// Cartesian gradient at cylindrical point (r, θ, z).
    pub fn gradient(&self, r: f64, theta: f64, z: f64, t: f64) -> Vector3<f64> {
        let [_, pr, pz] = self.eval(r, z, t);
        let (s, c) = theta.sin_cos();
        Vector3::new(pr * c, pr * s, pz)
    }
}

/// Continuity and momentum residuals at one point.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct FieldResidual {
    pub divergence: f64,
    pub euler_r: f64,
    pub euler_theta: f64,
    pub euler_z: f64,
}

impl FieldResidual {
    pub fn max_abs(&self) -> f64 {
        [
            self.divergence,
            self.euler_r,
            self.euler_theta,
            self.euler_z,
        ]
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

pub fn divergence_residual(field: &AxisymmetricField, r: f64, z: f64, t: f64) -> Result<f64> {
    Ok(divergence_of(&field.eval(r, z, t)?, r))
}

/// Left-hand sides of the cylindrical Euler system with the given pressure.
pub fn euler_residual(
    field: &AxisymmetricField,
    pressure: &PressureMap,
    r: f64,
    z: f64,
    t: f64,
) -> Result<FieldResidual> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!(
            "momentum residuals need r > 0, got r={r}"
        )));
    }
    let jet = field.eval(r, z, t)?;
    let [vr, vt, _] = jet.components();
    let [_, pr, pz] = pressure.eval(r, z, t);
    Ok(FieldResidual {
        divergence: divergence_of(&jet, r),
        euler_r: jet.material(&jet.vr) - vt * vt / r + pr,
        euler_theta: jet.material(&jet.vtheta) + vr * vt / r,
        euler_z: jet.material(&jet.vz) + pz,
    })
}

/// Euler residual with the field's own closed-form pressure.
pub fn euler_residual_exact(
    field: &AxisymmetricField,
    r: f64,
    z: f64,
    t: f64,
) -> Result<FieldResidual> {
    let p = field
        .exact_pressure()
        .ok_or_else(|| Error::Config("field has no closed-form pressure".into()))?;
    euler_residual(field, &p, r, z, t)
}
