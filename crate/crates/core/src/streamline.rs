//! Axis-length streamlines at frozen time, the radial map `R̄(r̄₀, z)` with
//! its inverse, inflow propagation and the laminar-profile diagnostic.
//!
//! Streamlines start on the inlet plane `z = z_min`, so `R̄(r̄₀, z_min) = r̄₀`.
//! Derivatives of the tables are finite differences on uniform grids.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fd::{fornberg_weights, nonuniform_derivative, Differentiator};
use crate::field::AxisymmetricField;
use crate::ode::{integrate, StepControl, Stop};
use crate::trajectory::{linspace, AXIS_GUARD_FRACTION};

/// Table indexed `[i][j]` with `i` along the radial grid and `j` along z.
pub type Table = Vec<Vec<f64>>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UniformGrid {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl UniformGrid {
    pub fn new(lo: f64, hi: f64, n: usize) -> Self {
        Self { lo, hi, n }
    }

    pub fn points(&self) -> Vec<f64> {
        linspace(self.lo, self.hi, self.n)
    }

    pub fn step(&self) -> f64 {
        (self.hi - self.lo) / (self.n - 1) as f64
    }

    /// Halved spacing; every old node stays a node.
    pub fn refined(&self) -> Self {
        Self {
            n: 2 * (self.n - 1) + 1,
            ..*self
        }
    }

    fn validate(&self, name: &str) -> Result<()> {
        if self.n < 7 || !(self.hi > self.lo) {
            return Err(Error::Config(format!(
                "{name} grid needs n >= 7 and hi > lo, got {self:?}"
            )));
        }
        Ok(())
    }
}

/// Grids of a streamline map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapGrids {
    /// Inlet radii.
    pub rbar0: UniformGrid,
    /// Axial stations; `lo` must be the domain's inlet plane.
    pub z: UniformGrid,
    /// Radii on which the inverse map is tabulated.
    pub r_inv: UniformGrid,
}

impl MapGrids {
    pub fn default_for(field: &AxisymmetricField) -> Self {
        let d = field.domain;
        Self {
            rbar0: UniformGrid::new(0.05 * d.r_max, 0.95 * d.r_max, 37),
            z: UniformGrid::new(d.z_min, d.z_max, 81),
            r_inv: UniformGrid::new(0.15 * d.r_max, 0.85 * d.r_max, 15),
        }
    }

    pub fn refined(&self) -> Self {
        Self {
            rbar0: self.rbar0.refined(),
            z: self.z.refined(),
            r_inv: self.r_inv.refined(),
        }
    }

    pub fn validate(&self, field: &AxisymmetricField) -> Result<()> {
        self.rbar0.validate("rbar0")?;
        self.z.validate("z")?;
        self.r_inv.validate("r_inv")?;
        let d = field.domain;
        if self.rbar0.lo <= 0.0 || self.rbar0.hi >= d.r_max {
            return Err(Error::Config(
                "inlet radii must lie strictly inside (0, r_max)".into(),
            ));
        }
        if self.z.lo != d.z_min || self.z.hi > d.z_max {
            return Err(Error::Config(format!(
                "z grid must start at the inlet plane z_min={} and stay below z_max={}",
                d.z_min, d.z_max
            )));
        }
        Ok(())
    }
}

/// One axis-length streamline `γ(z)` at frozen time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Streamline {
    pub rbar0: f64,
    pub t: f64,
    pub z: Vec<f64>,
    pub r: Vec<f64>,
    pub theta: Vec<f64>,
    /// `∂_z R̄ = v_r / v_z` evaluated on the streamline.
    pub slope: Vec<f64>,
}

/// Integrates `dR̄/dz = v_r/v_z`, `R̄ dΘ̄/dz = v_θ/v_z` from `z_grid[0]`.
pub fn trace_streamline(
    field: &AxisymmetricField,
    rbar0: f64,
    t: f64,
    z_grid: &[f64],
    tol: f64,
) -> Result<Streamline> {
    if !(rbar0 > 0.0 && rbar0 < field.domain.r_max) {
        return Err(Error::Domain(format!(
            "rbar0={rbar0} must lie in (0, r_max)"
        )));
    }
    if z_grid.len() < 2 || z_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Config(
            "z grid must have at least two increasing stations".into(),
        ));
    }
    field.check_point(rbar0, z_grid[0], t)?;
    let guard = AXIS_GUARD_FRACTION * field.domain.r_max;
    let f = *field;
    let z0 = z_grid[0];
    let z1 = *z_grid.last().unwrap();
    // long steps through near-uniform inflow spoil the dense output
    let ctl = StepControl {
        h_max: (z1 - z0) / 100.0,
        ..StepControl::new(tol)
    };
    let sol = integrate(
        |z, y: &[f64; 2]| {
            let [vr, vt, vz] = f.velocity(y[0], z, t);
            [vr / vz, vt / (y[0] * vz)]
        },
        z0,
        [rbar0, 0.0],
        z1,
        &ctl,
        |z, y| {
            if y[0] < guard {
                Some(0)
            } else if !(f.velocity(y[0], z, t)[2] > 0.0) {
                Some(1)
            } else {
                None
            }
        },
    )?;
    match sol.stop {
        Stop::Completed => {}
        Stop::Event { index: 0, .. } => {
            return Err(Error::AxisTouch {
                t,
                r: sol.y_end()[0],
            });
        }
        Stop::Event { t: z, .. } => {
            let r = sol.y_end()[0];
            return Err(Error::UnilateralViolation {
                r,
                z,
                t,
                vz: f.velocity(r, z, t)[2],
            });
        }
    }
    let mut line = Streamline {
        rbar0,
        t,
        z: z_grid.to_vec(),
        r: Vec::with_capacity(z_grid.len()),
        theta: Vec::with_capacity(z_grid.len()),
        slope: Vec::with_capacity(z_grid.len()),
    };
    for &z in z_grid {
        let [r, th] = sol.eval(z);
        let v = f.velocity(r, z, t);
        line.r.push(r);
        line.theta.push(th);
        line.slope.push(v[0] / v[2]);
    }
    Ok(line)
}

/// Mixed partial derivative table `∂_x^{dx} ∂_z^{dz}` of a tabulated map.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivativeTable {
    pub dx: usize,
    pub dz: usize,
    pub values: Table,
}

fn stencil_for(order: usize) -> usize {
    if order <= 2 {
        5
    } else {
        7
    }
}

fn diff_x(table: &Table, h: f64, order: usize) -> Table {
    if order == 0 {
        return table.clone();
    }
    let d = Differentiator::new(stencil_for(order), order);
    let (nx, nz) = (table.len(), table[0].len());
    let mut out = vec![vec![0.0; nz]; nx];
    for j in 0..nz {
        let col: Vec<f64> = (0..nx).map(|i| table[i][j]).collect();
        for (i, v) in d.apply(&col, h).into_iter().enumerate() {
            out[i][j] = v;
        }
    }
    out
}

fn diff_z(table: &Table, h: f64, order: usize) -> Table {
    if order == 0 {
        return table.clone();
    }
    let d = Differentiator::new(stencil_for(order), order);
    table.iter().map(|row| d.apply(row, h)).collect()
}

/// All mixed derivatives of total order 1 to 3.
fn mixed_derivatives(table: &Table, hx: f64, hz: f64) -> Vec<DerivativeTable> {
    let mut out = Vec::new();
    for total in 1..=3 {
        for dx in (0..=total).rev() {
            let dz = total - dx;
            out.push(DerivativeTable {
                dx,
                dz,
                values: diff_z(&diff_x(table, hx, dx), hz, dz),
            });
        }
    }
    out
}

fn lookup(tables: &[DerivativeTable], dx: usize, dz: usize) -> &Table {
    &tables
        .iter()
        .find(|d| d.dx == dx && d.dz == dz)
        .unwrap_or_else(|| panic!("no derivative table for ({dx}, {dz})"))
        .values
}

fn max_abs(table: &Table) -> f64 {
    table.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
}

/// Local polynomial interpolation on a uniform grid: value and first
/// derivative at `x` from the `width` nearest nodes.
fn interpolate(xs: &[f64], ys: &[f64], x: f64, width: usize) -> (f64, f64) {
    let n = xs.len();
    let width = width.min(n);
    let h = xs[1] - xs[0];
    let k = ((x - xs[0]) / h).floor().max(0.0) as usize;
    let start = (k + 1).saturating_sub(width / 2).min(n - width);
    let w = fornberg_weights(x, &xs[start..start + width], 1);
    let ys = &ys[start..start + width];
    let v = w[0].iter().zip(ys).map(|(a, b)| a * b).sum();
    let d = w[1].iter().zip(ys).map(|(a, b)| a * b).sum();
    (v, d)
}

const INTERP_WIDTH: usize = 6;

/// Solves `R̄(x) = r` for x on one z-station by safeguarded Newton on the
/// interpolant.
fn invert_station(xs: &[f64], rs: &[f64], r: f64) -> Option<f64> {
    let n = xs.len();
    if r < rs[0] || r > rs[n - 1] {
        return None;
    }
    let k = rs.partition_point(|&v| v < r).clamp(1, n - 1);
    let (mut lo, mut hi) = (xs[k - 1], xs[k]);
    let mut x = lo + (hi - lo) * (r - rs[k - 1]) / (rs[k] - rs[k - 1]);
    for _ in 0..60 {
        let (v, d) = interpolate(xs, rs, x, INTERP_WIDTH);
        let f = v - r;
        if f > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let mut next = x - f / d;
        if !(next >= lo && next <= hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 1e-15 {
            return Some(next);
        }
        x = next;
    }
    Some(x)
}

/// Tabulated streamline map at frozen time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StreamlineMap {
    pub t: f64,
    pub rbar0: Vec<f64>,
    pub z: Vec<f64>,
    pub rbar: Table,
    pub theta: Table,
    /// `v_r/v_z` sampled on the streamlines.
    pub slope: Table,
    /// Mixed derivatives `∂_{r̄₀}^a ∂_z^b R̄`, `1 <= a + b <= 3`.
    pub derivatives: Vec<DerivativeTable>,
    pub r_inv: Vec<f64>,
    /// `R̄^{-1}(r, z)` on `r_inv × z`.
    pub rbar_inv: Table,
    /// Mixed derivatives `∂_r^a ∂_z^b R̄^{-1}`.
    pub inverse_derivatives: Vec<DerivativeTable>,
    /// Max deviation of the differenced `∂_z R̄` from the sampled `v_r/v_z`
    /// away from the table edges; a resolution self-check.
    pub slope_consistency: f64,
}

impl StreamlineMap {
    pub fn derivative(&self, dx: usize, dz: usize) -> &Table {
        lookup(&self.derivatives, dx, dz)
    }

    pub fn inverse_derivative(&self, dx: usize, dz: usize) -> &Table {
        lookup(&self.inverse_derivatives, dx, dz)
    }

    /// Index of the z-station equal to `z`.
    pub fn station(&self, z: f64) -> Option<usize> {
        let h = self.z[1] - self.z[0];
        let j = ((z - self.z[0]) / h).round();
        if j < 0.0 {
            return None;
        }
        let j = j as usize;
        (j < self.z.len() && (self.z[j] - z).abs() <= 1e-9 * h).then_some(j)
    }

    /// `R̄^{-1}(r, z_j)`.
    pub fn invert(&self, r: f64, j: usize) -> Option<f64> {
        let rs: Vec<f64> = self.rbar.iter().map(|row| row[j]).collect();
        invert_station(&self.rbar0, &rs, r)
    }

    /// Interpolates column `j` of a table defined on the `rbar0` grid.
    pub fn interpolate_rbar0(&self, table: &Table, x: f64, j: usize) -> f64 {
        let col: Vec<f64> = table.iter().map(|row| row[j]).collect();
        interpolate(&self.rbar0, &col, x, INTERP_WIDTH).0
    }
}

/// Traces streamlines from every inlet radius and tabulates `R̄`, its
/// derivatives and its inverse.
pub fn build_streamline_map(
    field: &AxisymmetricField,
    t: f64,
    grids: &MapGrids,
    tol: f64,
) -> Result<StreamlineMap> {
    grids.validate(field)?;
    let rbar0 = grids.rbar0.points();
    let z = grids.z.points();
    let (hx, hz) = (grids.rbar0.step(), grids.z.step());
    let mut rbar = Vec::with_capacity(rbar0.len());
    let mut theta = Vec::with_capacity(rbar0.len());
    let mut slope = Vec::with_capacity(rbar0.len());
    for &r0 in &rbar0 {
        let line = trace_streamline(field, r0, t, &z, tol)?;
        rbar.push(line.r);
        theta.push(line.theta);
        slope.push(line.slope);
    }
    let derivatives = mixed_derivatives(&rbar, hx, hz);
    let d_r0 = lookup(&derivatives, 1, 0);
    for (i, row) in d_r0.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if !(v > 0.0) {
                return Err(Error::Invertibility {
                    rbar0: rbar0[i],
                    z: z[j],
                    reason: format!("d(Rbar)/d(rbar0) = {v} is not positive"),
                });
            }
        }
    }
    let d_z = lookup(&derivatives, 0, 1);
    let mut slope_consistency = 0.0f64;
    for i in 3..rbar0.len().saturating_sub(3) {
        for j in 3..z.len().saturating_sub(3) {
            slope_consistency = slope_consistency.max((d_z[i][j] - slope[i][j]).abs());
        }
    }

    let r_inv = grids.r_inv.points();
    let mut rbar_inv = vec![vec![0.0; z.len()]; r_inv.len()];
    for j in 0..z.len() {
        let rs: Vec<f64> = rbar.iter().map(|row| row[j]).collect();
        for (i, &r) in r_inv.iter().enumerate() {
            rbar_inv[i][j] =
                invert_station(&rbar0, &rs, r).ok_or_else(|| Error::Invertibility {
                    rbar0: r,
                    z: z[j],
                    reason: format!(
                        "radius {r} is not reached by traced streamlines [{}, {}]",
                        rs[0],
                        rs[rs.len() - 1]
                    ),
                })?;
        }
    }
    let inverse_derivatives = mixed_derivatives(&rbar_inv, grids.r_inv.step(), hz);
    Ok(StreamlineMap {
        t,
        rbar0,
        z,
        rbar,
        theta,
        slope,
        derivatives,
        r_inv,
        rbar_inv,
        inverse_derivatives,
        slope_consistency,
    })
}

/// `ρ = r̄₀ / (R̄ ∂_{r̄₀} R̄) = 2 r̄₀ / ∂_{r̄₀}(R̄²)` and its derivatives.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InflowPropagation {
    pub rho: Table,
    pub dz_rho: Table,
    pub dzz_rho: Table,
    pub dr_rho: Table,
    pub drr_rho: Table,
}

pub fn inflow_propagation(map: &StreamlineMap) -> Result<InflowPropagation> {
    let d = map.derivative(1, 0);
    let mut rho = vec![vec![0.0; map.z.len()]; map.rbar0.len()];
    for (i, row) in rho.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            let den = map.rbar[i][j] * d[i][j];
            if !(den > 0.0) {
                return Err(Error::Invertibility {
                    rbar0: map.rbar0[i],
                    z: map.z[j],
                    reason: "degenerate stream annulus".into(),
                });
            }
            *v = map.rbar0[i] / den;
        }
    }
    let hx = map.rbar0[1] - map.rbar0[0];
    let hz = map.z[1] - map.z[0];
    Ok(InflowPropagation {
        dz_rho: diff_z(&rho, hz, 1),
        dzz_rho: diff_z(&rho, hz, 2),
        dr_rho: diff_x(&rho, hx, 1),
        drr_rho: diff_x(&rho, hx, 2),
        rho,
    })
}

/// Ratio of inlet to downstream stream-annulus areas for the annulus
/// `[r̄₀, r̄₀ + ε]` at every z-station, tracing one extra streamline.
pub fn annulus_ratio(
    field: &AxisymmetricField,
    map: &StreamlineMap,
    i: usize,
    eps: f64,
    tol: f64,
) -> Result<Vec<f64>> {
    let r0 = map.rbar0[i];
    let outer = trace_streamline(field, r0 + eps, map.t, &map.z, tol)?;
    let inlet = (r0 + eps).powi(2) - r0 * r0;
    map.z
        .iter()
        .enumerate()
        .map(|(j, &z)| {
            let area = outer.r[j].powi(2) - map.rbar[i][j].powi(2);
            if !(area > 0.0) {
                return Err(Error::Invertibility {
                    rbar0: r0,
                    z,
                    reason: "degenerate stream annulus".into(),
                });
            }
            Ok(inlet / area)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReconstructionProbe {
    pub r: f64,
    pub z: f64,
    pub rbar0: f64,
    pub vz_residual: f64,
    pub vr_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Reconstruction {
    pub probes: Vec<ReconstructionProbe>,
    pub max_vz: f64,
    pub max_vr: f64,
}

/// `|v_z - ρ(R̄^{-1}, z) g|` and `|v_r - ∂_z R̄(R̄^{-1}, z) v_z|` at probe
/// points `(r, z)` with z on the map's stations.
pub fn reconstruct_velocity(
    map: &StreamlineMap,
    rho: &InflowPropagation,
    field: &AxisymmetricField,
    probes: &[(f64, f64)],
) -> Result<Reconstruction> {
    let t = map.t;
    let g = field.flux.eval(t)?.g;
    let z_in = map.z[0];
    for &r in &map.rbar0 {
        let [vr, _, vz] = field.velocity(r, z_in, t);
        if (vz - g).abs() > 1e-10 * g || vr.abs() > 1e-10 * g {
            return Err(Error::Precondition(format!(
                "inlet flow at r={r} is (v_r, v_z) = ({vr}, {vz}), not uniform (0, {g})"
            )));
        }
    }
    let dz_rbar = map.derivative(0, 1);
    let mut out = Vec::with_capacity(probes.len());
    for &(r, z) in probes {
        let j = map
            .station(z)
            .ok_or_else(|| Error::Config(format!("probe z={z} is not a map station")))?;
        let x = map.invert(r, j).ok_or_else(|| Error::Invertibility {
            rbar0: r,
            z,
            reason: "probe radius outside the traced range".into(),
        })?;
        let [vr, _, vz] = field.velocity(r, z, t);
        let rho_x = map.interpolate_rbar0(&rho.rho, x, j);
        let slope = map.interpolate_rbar0(dz_rbar, x, j);
        out.push(ReconstructionProbe {
            r,
            z,
            rbar0: x,
            vz_residual: (vz - rho_x * g).abs(),
            vr_residual: (vr - slope * vz).abs(),
        });
    }
    let max_vz = out.iter().fold(0.0f64, |m, p| m.max(p.vz_residual));
    let max_vr = out.iter().fold(0.0f64, |m, p| m.max(p.vr_residual));
    Ok(Reconstruction {
        probes: out,
        max_vz,
        max_vr,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProfileThresholds {
    /// Admissible range of `∂_{r̄₀} R̄`.
    pub band: (f64, f64),
    /// Bound for every other norm.
    pub bound: f64,
}

impl Default for ProfileThresholds {
    fn default() -> Self {
        Self {
            band: (0.5, 2.0),
            bound: 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ProfileVerdict {
    UniformlySmoothWithin { band: (f64, f64), bound: f64 },
    BoundExceeded { which: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileReport {
    pub t: f64,
    /// `(min, max)` of `∂_{r̄₀} R̄` over the table.
    pub band: (f64, f64),
    /// `max |∂^ℓ R̄|` over all mixed (r̄₀, z) derivatives of order ℓ = 1, 2, 3.
    pub rbar_norms: [f64; 3],
    /// `max |∂̄^ℓ R̄^{-1}|` over all mixed (r, z) derivatives of order ℓ.
    pub rbar_inv_norms: [f64; 3],
    /// `max |∂_t R̄^{-1}|`, differenced across the time list.
    pub dt_rbar_inv: Option<f64>,
    /// `max |∂_t ∂_{r̄₀} R̄|`.
    pub dt_dr_rbar: Option<f64>,
    pub verdict: ProfileVerdict,
}

fn order_norm(tables: &[DerivativeTable], order: usize) -> f64 {
    tables
        .iter()
        .filter(|d| d.dx + d.dz == order)
        .map(|d| max_abs(&d.values))
        .fold(0.0, f64::max)
}

fn judge(r: &ProfileReport, th: &ProfileThresholds) -> ProfileVerdict {
    let mut which = Vec::new();
    if r.band.0 < th.band.0 || r.band.1 > th.band.1 {
        which.push(format!("d_rbar0 Rbar range [{}, {}]", r.band.0, r.band.1));
    }
    let mut check = |name: String, v: f64| {
        if !(v <= th.bound) {
            which.push(format!("{name} = {v}"));
        }
    };
    for l in 0..3 {
        check(format!("|d^{} Rbar|", l + 1), r.rbar_norms[l]);
        check(format!("|d^{} Rbar_inv|", l + 1), r.rbar_inv_norms[l]);
    }
    if let Some(v) = r.dt_rbar_inv {
        check("|d_t Rbar_inv|".into(), v);
    }
    if let Some(v) = r.dt_dr_rbar {
        check("|d_t d_rbar0 Rbar|".into(), v);
    }
    if which.is_empty() {
        ProfileVerdict::UniformlySmoothWithin {
            band: th.band,
            bound: th.bound,
        }
    } else {
        ProfileVerdict::BoundExceeded { which }
    }
}

/// Profile norms and verdict at each time of an increasing `t_list`.
pub fn profile_report(
    field: &AxisymmetricField,
    t_list: &[f64],
    grids: &MapGrids,
    thresholds: &ProfileThresholds,
    tol: f64,
) -> Result<Vec<ProfileReport>> {
    if t_list.is_empty() || t_list.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Config(
            "t_list must be non-empty and strictly increasing".into(),
        ));
    }
    let maps = t_list
        .iter()
        .map(|&t| build_streamline_map(field, t, grids, tol))
        .collect::<Result<Vec<_>>>()?;
    profile_report_from_maps(&maps, thresholds)
}

/// As [`profile_report`] on maps already built on a common grid.
pub fn profile_report_from_maps(
    maps: &[StreamlineMap],
    thresholds: &ProfileThresholds,
) -> Result<Vec<ProfileReport>> {
    let times: Vec<f64> = maps.iter().map(|m| m.t).collect();
    // time derivatives entry by entry across the list
    let dt_max = |get: &dyn Fn(&StreamlineMap) -> &Table| -> Vec<Option<f64>> {
        if maps.len() < 2 {
            return vec![None; maps.len()];
        }
        let first = get(&maps[0]);
        let mut out = vec![0.0f64; maps.len()];
        for i in 0..first.len() {
            for j in 0..first[0].len() {
                let series: Vec<f64> = maps.iter().map(|m| get(m)[i][j]).collect();
                for (k, d) in nonuniform_derivative(&times, &series, 1)
                    .into_iter()
                    .enumerate()
                {
                    out[k] = out[k].max(d.abs());
                }
            }
        }
        out.into_iter().map(Some).collect()
    };
    let dt_inv = dt_max(&|m| &m.rbar_inv);
    let dt_dr = dt_max(&|m| m.derivative(1, 0));
    Ok(maps
        .iter()
        .enumerate()
        .map(|(k, m)| {
            let d = m.derivative(1, 0);
            let band = d
                .iter()
                .flatten()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                    (lo.min(v), hi.max(v))
                });
            let mut report = ProfileReport {
                t: m.t,
                band,
                rbar_norms: [1, 2, 3].map(|l| order_norm(&m.derivatives, l)),
                rbar_inv_norms: [1, 2, 3].map(|l| order_norm(&m.inverse_derivatives, l)),
                dt_rbar_inv: dt_inv[k],
                dt_dr_rbar: dt_dr[k],
                verdict: ProfileVerdict::BoundExceeded { which: vec![] },
            };
            report.verdict = judge(&report, thresholds);
            report
        })
        .collect())
}
