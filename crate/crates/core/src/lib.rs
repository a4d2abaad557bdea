//! Numerical kernels for swirling axisymmetric flows: flux profiles, closed-form
//! velocity fields, particle trajectories, Frenet geometry, streamline maps and
//! the identity diagnostics built on top of them.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod error;
pub mod fd;
pub mod field;
pub mod flux;
pub mod geometry;
pub mod ode;
pub mod streamline;
pub mod trajectory;

pub use error::{Error, Result};
pub use field::{
    AxisymmetricField, CylinderDomain, FieldKind, Jet, PressureMap, StreamBump, SwirlProfile,
    VelocityJet,
};
pub use flux::{find_flux_windows, FluxProfile, FluxValue, FluxWindow};
