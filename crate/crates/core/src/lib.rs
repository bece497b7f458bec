//! Construction and numerical certification of a bounded Hartogs-type domain in
//! `C^2` whose `w`-plane discs rotate with `ln|z|^2`, together with the two
//! families of auxiliary domains (rotating discs with an inflated radius
//! profile, and rotating half-planes with a small tilt) whose intersection
//! forms arbitrarily tight pseudoconvex neighborhoods of the closure.
//!
//! The crate is organized around four ingredients:
//!
//! * [`profiles`] — the concave `C^{1,1}` radius profile `S`, the smooth step
//!   used for mollification, and the smooth concave approximants `S_eta`;
//! * [`geometry`] — defining functions, membership predicates, and the
//!   Euclidean distance to the closed domain;
//! * [`levi`] — closed-form Levi forms of the half-plane and disc defining
//!   functions in the distinguished complex tangent direction, with a
//!   finite-difference cross-check;
//! * [`certify`] — grid and sampling certificates for every inequality and
//!   containment used by the construction, parameter searches for the
//!   existence-only constants, and the witness tables quantifying how fast
//!   tight pseudoconvex neighborhoods are forced to inflate.
//!
//! Everything is deterministic: sampling uses fixed-offset Halton sequences
//! and all parallel reductions combine associatively (exact `min`/`max` with
//! index tie-breaks), so repeated runs with the same seed produce bit-identical
//! reports.

pub mod certify;
pub mod cheb;
pub mod geometry;
pub mod levi;
pub mod profiles;
pub mod quad;
pub mod reduce;
pub mod report;
pub mod roots;
pub mod sampling;

pub use geometry::{PointCW, RotationParams};
pub use profiles::{ProfileS, SmoothedProfile};
pub use report::CertReport;
