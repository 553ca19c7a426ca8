//! Simulation library for planar no-slip billiards.
//!
//! A no-slip billiard is a point particle carrying a rotational degree of
//! freedom: at each boundary collision the tangential and rotational velocity
//! components are partially exchanged through the unique energy-conserving,
//! reversible alternative to specular reflection. This crate provides
//!
//! * the collision laws and their matrix forms ([`collision`]),
//! * exact table geometry with segments, arcs, infinite lines and glued
//!   edges, plus builders for the standard tables ([`table`]),
//! * the billiard flow: free flight, collision events, termination and
//!   period detection ([`flow`]),
//! * closed-form results: the strip displacement bound, the wedge spectrum
//!   and escape regions, circle caustics, triangle periodicity ([`analysis`]),
//! * phase-portrait dataset generation and serialization ([`portrait`],
//!   [`trace`]),
//! * a self-check suite ([`verify`]) mirrored by the `acceptance`
//!   integration test target.
//!
//! Velocities live in energy-normalized coordinates `(v0, v1, v2)` where
//! `v0` is the rotational component and `(v1, v2)` the planar ones; orbit
//! initial conditions are normalized to unit speed.

pub mod analysis;
pub mod collision;
pub mod config;
pub mod flow;
pub mod math;
pub mod portrait;
pub mod table;
pub mod trace;
pub mod verify;

mod velocity;

pub use collision::CollisionLaw;
pub use math::{Mat3, Vec2};
pub use velocity::{UnitNormal, VelocityState};

/// Errors shared by every module of the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("normal vector has norm {0:.3e}, expected unit length")]
    NonUnitNormal(f64),
    #[error("velocity is not incoming: v·nu = {0:.3e} >= 0")]
    NotIncoming(f64),
    #[error("wedge angle {0} outside the open interval (0, pi)")]
    ThetaOutOfRange(f64),
    #[error("rotation angle {0} outside the half-open interval (0, pi]")]
    AlphaOutOfRange(f64),
    #[error("normal velocity component is zero")]
    ZeroNormalVelocity,
    #[error("zero vertical velocity: horizontal displacement is unbounded")]
    UnboundedDisplacement,
    #[error("{op}: {constraint} (got {value})")]
    BadParameter {
        op: &'static str,
        constraint: &'static str,
        value: f64,
    },
    #[error("invalid table: {0}")]
    InvalidTable(String),
    #[error("ray origin lies outside the table")]
    OriginOutsideTable,
    #[error("degenerate ray: no usable boundary intersection")]
    DegenerateRay,
    #[error("regular orbit construction needs n >= 2 (got {0})")]
    NgonTooSmall(usize),
    #[error("orbit is unsuitable for this query: {0}")]
    UnsuitableOrbit(String),
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
