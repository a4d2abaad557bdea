//! Adaptive Dormand–Prince 5(4) integrator with continuous (dense) output
//! and predicate-based stopping events.

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// difference between the 5th and embedded 4th order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

// continuous extension
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Step-size control. Absolute and relative tolerances are both `tol`.
#[derive(Debug, Clone, Copy)]
pub struct StepControl {
    pub tol: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl StepControl {
    pub fn new(tol: f64) -> Self {
        Self {
            tol,
            h_max: f64::INFINITY,
            max_steps: 5_000_000,
        }
    }
}

#[derive(Debug, Clone)]
struct Segment<const N: usize> {
    t0: f64,
    h: f64,
    rcont: [[f64; N]; 5],
}

impl<const N: usize> Segment<N> {
    fn eval(&self, t: f64) -> [f64; N] {
        let theta = (t - self.t0) / self.h;
        let theta1 = 1.0 - theta;
        let r = &self.rcont;
        std::array::from_fn(|i| {
            r[0][i] + theta * (r[1][i] + theta1 * (r[2][i] + theta * (r[3][i] + theta1 * r[4][i])))
        })
    }

    fn t1(&self) -> f64 {
        self.t0 + self.h
    }
}

/// Why the integration stopped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Stop {
    Completed,
    /// Event `index` fired at time `t`.
    Event {
        index: usize,
        t: f64,
    },
}

/// Piecewise polynomial solution on `[t_start, t_end]`.
#[derive(Debug, Clone)]
pub struct DenseSolution<const N: usize> {
    t_start: f64,
    y_start: [f64; N],
    t_end: f64,
    y_end: [f64; N],
    segments: Vec<Segment<N>>,
    pub stop: Stop,
}

impl<const N: usize> DenseSolution<N> {
    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn y_end(&self) -> [f64; N] {
        self.y_end
    }

    pub fn steps(&self) -> usize {
        self.segments.len()
    }

    /// Step boundaries, including both ends.
    pub fn mesh(&self) -> Vec<f64> {
        let mut m: Vec<f64> = self.segments.iter().map(|s| s.t0).collect();
        m.push(self.t_end);
        if m.is_empty() {
            m.push(self.t_start);
        }
        m
    }

    /// State at `t`, clamped to the integrated range.
    pub fn eval(&self, t: f64) -> [f64; N] {
        if self.segments.is_empty() || t <= self.t_start {
            return self.y_start;
        }
        if t >= self.t_end {
            return self.y_end;
        }
        let k = self
            .segments
            .partition_point(|s| s.t1() <= t)
            .min(self.segments.len() - 1);
        self.segments[k].eval(t)
    }
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    std::array::from_fn(|i| y[i] + h * terms.iter().map(|(c, k)| c * k[i]).sum::<f64>())
}

fn rms_norm<const N: usize>(v: &[f64; N], y: &[f64; N], tol: f64) -> f64 {
    let s: f64 = (0..N)
        .map(|i| (v[i] / (tol + tol * y[i].abs())).powi(2))
        .sum();
    (s / N as f64).sqrt()
}

fn finite<const N: usize>(y: &[f64; N]) -> bool {
    y.iter().all(|v| v.is_finite())
}

/// Integrates `y' = rhs(t, y)` from `t0` to `t_end`.
///
/// `event` is checked at every accepted step end; it returns `Some(index)`
/// when the state violates a stopping condition. The first violation time is
/// then located by bisection on the dense output and the solution truncated.
pub fn integrate<const N: usize, F, E>(
    mut rhs: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    ctl: &StepControl,
    mut event: E,
) -> Result<DenseSolution<N>>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
    E: FnMut(f64, &[f64; N]) -> Option<usize>,
{
    if !(t_end > t0) {
        return Err(Error::Integrator(format!("empty interval [{t0}, {t_end}]")));
    }
    let mut sol = DenseSolution {
        t_start: t0,
        y_start: y0,
        t_end: t0,
        y_end: y0,
        segments: Vec::new(),
        stop: Stop::Completed,
    };
    if let Some(index) = event(t0, &y0) {
        sol.stop = Stop::Event { index, t: t0 };
        return Ok(sol);
    }

    let tol = ctl.tol;
    let span = t_end - t0;
    let mut k1 = rhs(t0, &y0);
    if !finite(&k1) {
        return Err(Error::Integrator(format!(
            "non-finite derivative at t={t0}"
        )));
    }

    // initial step guess
    let mut h = {
        let d0 = rms_norm(&y0, &y0, tol);
        let d1 = rms_norm(&k1, &y0, tol);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 {
            1e-6
        } else {
            0.01 * d0 / d1
        };
        let h0 = h0.min(span);
        let y1 = axpy(&y0, h0, &[(1.0, &k1)]);
        let f1 = rhs(t0 + h0, &y1);
        let diff: [f64; N] = std::array::from_fn(|i| f1[i] - k1[i]);
        let d2 = rms_norm(&diff, &y0, tol) / h0;
        let dmax = d1.max(d2);
        let h1 = if dmax <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / dmax).powf(0.2)
        };
        (100.0 * h0).min(h1).min(ctl.h_max).min(span)
    };

    let mut t = t0;
    let mut y = y0;
    let mut rejected_last = false;
    let mut steps = 0usize;
    let h_min = 1e-14 * span.max(t0.abs()).max(1.0);

    while t < t_end {
        steps += 1;
        if steps > ctl.max_steps {
            return Err(Error::Integrator(format!(
                "exceeded {} steps at t={t}",
                ctl.max_steps
            )));
        }
        let last = t + h >= t_end - 1e-15 * span;
        if last {
            h = t_end - t;
        }

        let k2 = rhs(t + C2 * h, &axpy(&y, h, &[(A21, &k1)]));
        let k3 = rhs(t + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = rhs(
            t + C4 * h,
            &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
        );
        let k5 = rhs(
            t + C5 * h,
            &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = rhs(
            t + h,
            &axpy(
                &y,
                h,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            ),
        );
        let y_new = axpy(
            &y,
            h,
            &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
        );
        let k7 = rhs(t + h, &y_new);

        let stages_ok = [&k2, &k3, &k4, &k5, &k6, &k7].iter().all(|k| finite(k)) && finite(&y_new);
        if !stages_ok {
            h *= 0.25;
            rejected_last = true;
            if h < h_min {
                return Err(Error::Integrator(format!("step size underflow at t={t}")));
            }
            continue;
        }

        let err_vec: [f64; N] = std::array::from_fn(|i| {
            h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i])
        });
        let err = {
            let s: f64 = (0..N)
                .map(|i| {
                    let sc = tol + tol * y[i].abs().max(y_new[i].abs());
                    (err_vec[i] / sc).powi(2)
                })
                .sum();
            (s / N as f64).sqrt()
        };

        if err <= 1.0 {
            let ydiff: [f64; N] = std::array::from_fn(|i| y_new[i] - y[i]);
            let bspl: [f64; N] = std::array::from_fn(|i| h * k1[i] - ydiff[i]);
            let seg = Segment {
                t0: t,
                h,
                rcont: [
                    y,
                    ydiff,
                    bspl,
                    std::array::from_fn(|i| ydiff[i] - h * k7[i] - bspl[i]),
                    std::array::from_fn(|i| {
                        h * (D1 * k1[i]
                            + D3 * k3[i]
                            + D4 * k4[i]
                            + D5 * k5[i]
                            + D6 * k6[i]
                            + D7 * k7[i])
                    }),
                ],
            };
            let t_new = if last { t_end } else { t + h };

            if let Some(index) = event(t_new, &y_new) {
                // earliest violation inside the step
                let (mut lo, mut hi) = (t, t_new);
                let mut which = index;
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    match event(mid, &seg.eval(mid)) {
                        Some(i) => {
                            hi = mid;
                            which = i;
                        }
                        None => lo = mid,
                    }
                }
                let y_hit = seg.eval(hi);
                // the polynomial keeps its full step; eval clamps at t_end
                sol.segments.push(seg);
                sol.t_end = hi;
                sol.y_end = y_hit;
                sol.stop = Stop::Event {
                    index: which,
                    t: hi,
                };
                return Ok(sol);
            }

            sol.segments.push(seg);
            t = t_new;
            y = y_new;
            k1 = k7;
            sol.t_end = t;
            sol.y_end = y;

            let mut fac = 0.9 * err.max(1e-10).powf(-0.2);
            fac = fac.clamp(0.2, 10.0);
            if rejected_last {
                fac = fac.min(1.0);
            }
            h = (h * fac).min(ctl.h_max);
            rejected_last = false;
        } else {
            let fac = (0.9 * err.powf(-0.2)).max(0.2);
            h *= fac;
            rejected_last = true;
            if h < h_min {
                return Err(Error::Integrator(format!("step size underflow at t={t}")));
            }
        }
    }
    Ok(sol)
}
