//! Shock-fitting method-of-characteristics solver for 2-D steady
//! supersonic/hypersonic potential flow past a curved wedge.
//!
//! The crate is organised around the flow of a computation:
//!
//! * [`gas`] — polytropic-gas closures (Bernoulli law, sound speed, density,
//!   the mass-flux correspondence for the incoming flow),
//! * [`wedge`] — analytic wedge families, wall frames and arc length,
//! * [`polar`] — shock-polar algebra and root finding,
//! * [`charkern`] — characteristic angles, compatibility and decomposition
//!   residual evaluators,
//! * [`limitsol`] — the zero-mass-flux limit solution along the wall,
//! * [`moc`] — the marching solver (tip seeding, unit processes, net assembly),
//! * [`field`] — continuous flow-field views over computed nets,
//! * [`diag`] — post-run diagnostics and reports,
//! * [`gamma2`] — exact rational verification of the gamma = 2 polynomial
//!   identities plus floating-point sign scans,
//! * [`verify`] — the end-to-end verification suite used by tests and the CLI.

pub mod charkern;
pub mod diag;
pub mod field;
pub mod gamma2;
pub mod fmt;
pub mod gas;
pub mod interp;
pub mod limitsol;
pub mod moc;
pub mod polar;
pub mod verify;
pub mod wedge;

pub use charkern::{CharAngles, CharFamily};
pub use field::{FlowField, Point};
pub use gas::{FlowState, FreeStream, GasModel, StateQuantities};
pub use limitsol::LimitState;
pub use moc::{CharNet, DataLine, MarchResult, NetPoint, RunConfig, ShockFront, ShockNode};
pub use polar::PolarPoint;
pub use wedge::{CaseClass, WallPointFrame, WedgeFamily, WedgeProfile};
