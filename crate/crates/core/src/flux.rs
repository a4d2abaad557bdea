//! Inflow-outflow profiles g(t) on t ∈ [0, 1) and the oscillation windows
//! where `1 < ε g'²/g < ε² g''` holds.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default distance kept from the singular time t = 1 when scanning.
pub const DEFAULT_GUARD: f64 = 1e-9;

/// The three supported flux families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FluxProfile {
    /// g(t) = c.
    Uniform { c: f64 },
    /// g(t) = (1 - t)^(-beta).
    PowerLaw { beta: f64 },
    /// g(t) = 2 + (1 - t)^beta1 sin((1 - t)^(-beta2)).
    Oscillating { beta1: f64, beta2: f64 },
}

/// g and its first two time derivatives at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FluxValue {
    pub g: f64,
    pub g1: f64,
    pub g2: f64,
}

impl FluxProfile {
    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| x.is_finite() && x > 0.0;
        let valid = match *self {
            FluxProfile::Uniform { c } => ok(c),
            FluxProfile::PowerLaw { beta } => ok(beta),
            FluxProfile::Oscillating { beta1, beta2 } => ok(beta1) && ok(beta2),
        };
        if valid {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "flux parameters must be positive and finite: {self:?}"
            )))
        }
    }

    /// Closed-form g, g', g'' at `t`.
    pub fn eval(&self, t: f64) -> Result<FluxValue> {
        if !t.is_finite() {
            return Err(Error::Domain(format!("flux evaluated at non-finite t={t}")));
        }
        if t >= 1.0 {
            return Err(Error::Domain(format!("flux singular at t=1 (t={t})")));
        }
        let v = self.eval_unchecked(t);
        if !(v.g > 0.0) {
            return Err(Error::Domain(format!(
                "flux g(t)={} is not positive at t={t}",
                v.g
            )));
        }
        Ok(v)
    }

    pub(crate) fn eval_unchecked(&self, t: f64) -> FluxValue {
        let s = 1.0 - t;
        match *self {
            FluxProfile::Uniform { c } => FluxValue {
                g: c,
                g1: 0.0,
                g2: 0.0,
            },
            FluxProfile::PowerLaw { beta } => {
                let g = s.powf(-beta);
                FluxValue {
                    g,
                    g1: beta * g / s,
                    g2: beta * (beta + 1.0) * g / (s * s),
                }
            }
            FluxProfile::Oscillating {
                beta1: b1,
                beta2: b2,
            } => {
                // u(s) = s^b1 sin(s^-b2); g = 2 + u, g' = -u'(s), g'' = u''(s)
                let phi = s.powf(-b2);
                let (sin, cos) = phi.sin_cos();
                let sb1 = s.powf(b1);
                let u = sb1 * sin;
                let du = b1 * sb1 / s * sin - b2 * sb1 * phi / s * cos;
                let d2u = b1 * (b1 - 1.0) * sb1 / (s * s) * sin
                    - b1 * b2 * sb1 * phi / (s * s) * cos
                    - b2 * (b1 - b2 - 1.0) * sb1 * phi / (s * s) * cos
                    - b2 * b2 * sb1 * phi * phi / (s * s) * sin;
                FluxValue {
                    g: 2.0 + u,
                    g1: -du,
                    g2: d2u,
                }
            }
        }
    }

    /// Antiderivative increment ∫_{t0}^{t1} g, where a closed form exists.
    pub fn integral(&self, t0: f64, t1: f64) -> Option<f64> {
        match *self {
            FluxProfile::Uniform { c } => Some(c * (t1 - t0)),
            FluxProfile::PowerLaw { beta } => {
                let (s0, s1) = (1.0 - t0, 1.0 - t1);
                if (beta - 1.0).abs() < 1e-14 {
                    Some((s0 / s1).ln())
                } else {
                    Some((s1.powf(1.0 - beta) - s0.powf(1.0 - beta)) / (beta - 1.0))
                }
            }
            FluxProfile::Oscillating { .. } => None,
        }
    }
}

/// Checks the analytic derivatives against second-order central differences.
///
/// Returns the largest of `|fd - analytic| / max(|analytic|, 1)` over all
/// samples for both g' and g''.
pub fn verify_flux_derivatives(profile: &FluxProfile, t_samples: &[f64], h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::Domain(format!(
            "finite-difference step must be positive, got {h}"
        )));
    }
    let mut worst: f64 = 0.0;
    for &t in t_samples {
        if !(t - h >= 0.0 && t + h < 1.0) {
            return Err(Error::Domain(format!(
                "sample t={t} with step {h} leaves [0, 1)"
            )));
        }
        let lo = profile.eval(t - h)?;
        let mid = profile.eval(t)?;
        let hi = profile.eval(t + h)?;
        let d1 = (hi.g - lo.g) / (2.0 * h);
        let d2 = (hi.g - 2.0 * mid.g + lo.g) / (h * h);
        worst = worst.max((d1 - mid.g1).abs() / mid.g1.abs().max(1.0));
        worst = worst.max((d2 - mid.g2).abs() / mid.g2.abs().max(1.0));
    }
    Ok(worst)
}

/// The two sides of the window condition at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FluxCondition {
    /// ε g'² / g
    pub middle: f64,
    /// ε² g''
    pub upper: f64,
}

impl FluxCondition {
    pub fn at(profile: &FluxProfile, epsilon: f64, t: f64) -> Result<Self> {
        let v = profile.eval(t)?;
        Ok(Self {
            middle: epsilon * v.g1 * v.g1 / v.g,
            upper: epsilon * epsilon * v.g2,
        })
    }

    pub fn holds(&self) -> bool {
        1.0 < self.middle && self.middle < self.upper
    }
}

/// Time intervals inside [1 - ε, 1) where the window condition holds on the
/// scan grid. Endpoints are grid points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FluxWindow {
    pub epsilon: f64,
    pub guard: f64,
    pub resolution: usize,
    pub samples_per_unit: u64,
    pub intervals: Vec<(f64, f64)>,
}

impl FluxWindow {
    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, t: f64) -> bool {
        self.intervals.iter().any(|&(lo, hi)| lo <= t && t <= hi)
    }

    /// The interval farthest from the singularity, which is the best resolved.
    pub fn first(&self) -> Option<(f64, f64)> {
        self.intervals.first().copied()
    }

    /// Longest interval, ties broken towards earlier times.
    pub fn widest(&self) -> Option<(f64, f64)> {
        self.intervals
            .iter()
            .copied()
            .fold(None, |best, iv| match best {
                Some(b) if b.1 - b.0 >= iv.1 - iv.0 => Some(b),
                _ => Some(iv),
            })
    }
}

/// Scans `[1 - ε, 1 - DEFAULT_GUARD]` with `resolution` uniform points.
pub fn find_flux_windows(
    profile: &FluxProfile,
    epsilon: f64,
    resolution: usize,
) -> Result<FluxWindow> {
    find_flux_windows_guarded(profile, epsilon, resolution, DEFAULT_GUARD)
}

/// As [`find_flux_windows`] with an explicit distance `guard` from t = 1.
pub fn find_flux_windows_guarded(
    profile: &FluxProfile,
    epsilon: f64,
    resolution: usize,
    guard: f64,
) -> Result<FluxWindow> {
    profile.validate()?;
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Config(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    if resolution < 1000 {
        return Err(Error::Config(format!(
            "scan resolution must be at least 1000, got {resolution}"
        )));
    }
    if !(guard > 0.0 && guard < epsilon) {
        return Err(Error::Config(format!(
            "guard must lie in (0, epsilon), got {guard}"
        )));
    }
    let t0 = 1.0 - epsilon;
    let t1 = 1.0 - guard;
    let dt = (t1 - t0) / (resolution - 1) as f64;

    let mut intervals = Vec::new();
    let mut open: Option<(f64, f64)> = None;
    for i in 0..resolution {
        let t = if i + 1 == resolution {
            t1
        } else {
            t0 + dt * i as f64
        };
        let holds = FluxCondition::at(profile, epsilon, t)?.holds();
        open = match (open, holds) {
            (None, true) => Some((t, t)),
            (Some((lo, _)), true) => Some((lo, t)),
            (Some(iv), false) => {
                intervals.push(iv);
                None
            }
            (None, false) => None,
        };
    }
    intervals.extend(open);

    Ok(FluxWindow {
        epsilon,
        guard,
        resolution,
        samples_per_unit: ((resolution - 1) as f64 / (t1 - t0)).round() as u64,
        intervals,
    })
}
