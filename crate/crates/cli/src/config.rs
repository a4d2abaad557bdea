use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::Result;
use helixwarp_core::diagnostics::{FdSettings, SignConvention};
use helixwarp_core::streamline::{MapGrids, ProfileThresholds};
use helixwarp_core::trajectory::{Seed, TrajectoryOptions};
use helixwarp_core::{AxisymmetricField, CylinderDomain, FieldKind, FluxProfile};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Invalid or unreadable configuration. Maps to exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn invalid(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub domain: CylinderDomain,
    pub flux: FluxProfile,
    pub field: FieldKind,
    #[serde(default)]
    pub seeds: Vec<Seed>,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Output directory; `--out` takes precedence.
    #[serde(default)]
    pub outputs: Option<PathBuf>,
    #[serde(default)]
    pub window: WindowOptions,
    #[serde(default)]
    pub trace: TraceOptions,
    #[serde(default)]
    pub geometry: GeometryOptions,
    #[serde(default)]
    pub profile: ProfileOptions,
    #[serde(default)]
    pub identities: IdentityOptions,
}

fn default_epsilon() -> f64 {
    0.1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub integrator: f64,
    pub streamline: f64,
    pub fd: FdSettings,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            integrator: 1e-10,
            streamline: 1e-12,
            fd: FdSettings::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WindowOptions {
    pub resolution: usize,
    /// Distance of the scan end from t = 1; defaults to epsilon / 2.
    pub guard: Option<f64>,
}

impl Default for WindowOptions {
    fn default() -> Self {
        Self {
            resolution: 100_000,
            guard: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TraceOptions {
    pub t_end: f64,
    pub samples: usize,
}

impl Default for TraceOptions {
    fn default() -> Self {
        Self {
            t_end: 0.9,
            samples: 201,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeometryOptions {
    pub t_end: f64,
    pub samples: usize,
    pub stencil: usize,
}

impl Default for GeometryOptions {
    fn default() -> Self {
        Self {
            t_end: 0.9,
            samples: 401,
            stencil: 7,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProfileOptions {
    pub t_list: Vec<f64>,
    /// Defaults to grids derived from the domain.
    pub grids: Option<MapGrids>,
    pub thresholds: ProfileThresholds,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        Self {
            t_list: vec![0.0, 0.3, 0.6, 0.9],
            grids: None,
            thresholds: ProfileThresholds::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IdentityOptions {
    /// Explicit probe times; defaults to points inside the flux window.
    pub probe_times: Option<Vec<f64>>,
    pub probes_per_interval: usize,
    pub max_intervals: usize,
    pub dominance: bool,
    pub dominance_per_interval: usize,
    /// Chosen by the Lemma 4 outcome when absent.
    pub sign_convention: Option<SignConvention>,
    pub gate_tol: f64,
    pub direct_tol: f64,
}

impl Default for IdentityOptions {
    fn default() -> Self {
        Self {
            probe_times: None,
            probes_per_interval: 1,
            max_intervals: 3,
            dominance: true,
            dominance_per_interval: 5,
            sign_convention: None,
            gate_tol: 1e-8,
            direct_tol: 1e-6,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
        let cfg: RunConfig =
            serde_json::from_str(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
        cfg.resolved()
    }

    /// Validates and fills every defaulted value.
    pub fn resolved(mut self) -> Result<Self> {
        let field = self.build_field()?;
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(invalid(format!(
                "epsilon must lie in (0, 1), got {}",
                self.epsilon
            )));
        }
        let guard = self.window.guard.unwrap_or(0.5 * self.epsilon);
        if !(guard > 0.0 && guard < self.epsilon) {
            return Err(invalid(format!(
                "window guard must lie in (0, epsilon), got {guard}"
            )));
        }
        self.window.guard = Some(guard);
        if self.window.resolution < 1000 {
            return Err(invalid("window resolution must be at least 1000"));
        }
        if !(self.tolerances.integrator > 0.0
            && self.tolerances.streamline > 0.0
            && self.tolerances.fd.h > 0.0)
        {
            return Err(invalid(
                "tolerances and finite-difference steps must be positive",
            ));
        }
        for (k, s) in self.seeds.iter().enumerate() {
            field
                .check_point(s.r0, s.z0, s.t0)
                .map_err(|e| invalid(format!("seed {k}: {e}")))?;
        }
        for (name, t_end) in [
            ("trace", self.trace.t_end),
            ("geometry", self.geometry.t_end),
        ] {
            if !(t_end > 0.0 && t_end <= self.domain.t_max) {
                return Err(invalid(format!(
                    "{name}.t_end must lie in (0, t_max], got {t_end}"
                )));
            }
        }
        if self.trace.samples < 2 {
            return Err(invalid("trace.samples must be at least 2"));
        }
        let st = self.geometry.stencil;
        if st < 5 || st.is_multiple_of(2) || self.geometry.samples < st {
            return Err(invalid(format!(
                "geometry.stencil must be odd, at least 5 and at most samples, got {st}"
            )));
        }
        let p = &self.profile;
        if p.t_list.is_empty() || p.t_list.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid(
                "profile.t_list must be non-empty and strictly increasing",
            ));
        }
        if p.t_list
            .iter()
            .any(|&t| !(t >= 0.0 && t < self.domain.t_max))
        {
            return Err(invalid("profile.t_list entries must lie in [0, t_max)"));
        }
        let grids = p.grids.unwrap_or_else(|| MapGrids::default_for(&field));
        grids.validate(&field).map_err(|e| invalid(e.to_string()))?;
        self.profile.grids = Some(grids);
        let id = &self.identities;
        if id.probes_per_interval == 0 || id.dominance_per_interval < 2 || id.max_intervals == 0 {
            return Err(invalid(
                "identity probe counts must be positive (dominance_per_interval at least 2)",
            ));
        }
        if let Some(ts) = &id.probe_times {
            if ts.iter().any(|&t| !(t >= 0.0 && t < self.domain.t_max)) {
                return Err(invalid("identities.probe_times must lie in [0, t_max)"));
            }
        }
        Ok(self)
    }

    pub fn build_field(&self) -> Result<AxisymmetricField> {
        AxisymmetricField::new(self.field, self.flux, self.domain)
            .map_err(|e| invalid(e.to_string()))
    }

    pub fn trajectory_options(&self) -> TrajectoryOptions {
        TrajectoryOptions::with_tol(self.tolerances.integrator)
    }

    pub fn guard(&self) -> f64 {
        self.window.guard.unwrap_or(0.5 * self.epsilon)
    }

    pub fn grids(&self) -> MapGrids {
        self.profile.grids.expect("resolved config has grids")
    }

    /// SHA-256 of the canonical JSON of the resolved config.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(bytes))
    }
}
