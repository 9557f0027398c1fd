//! Robust Newton method for complex polynomials.
//!
//! The robust iterate moves along a descent direction of `|p(z)|^2` with a
//! step that guarantees a computable decrease at every point that is not a
//! root, critical points included. On top of it sit a variant that steps
//! past critical points, a hybrid with Newton's method gated by Smale's
//! alpha test, all-roots solving by deflation, and basin rendering.

pub mod error;
pub mod poly;
pub mod render;
pub mod rnm;
pub mod roots;
pub mod smale;
pub mod trace;
pub mod verify;

pub use error::{Error, Result};
pub use poly::{Complex, DerivativeTable, Polynomial};
pub use render::{
    encode_ppm, render_basins, write_image, BasinGrid, Palette, RenderMethod, Window,
};
pub use rnm::{
    run_modified_rnm, run_rnm, Branch, Mode, Orbit, StepInfo, StoppingCriteria, Termination,
    Transition,
};
pub use roots::{solve_all, RootMethod, RootSet, SolveOptions};
pub use smale::{hybrid_solve, AlphaReport, HybridOptions, HybridResult};
pub use verify::{run_verify, VerifyConfig, VerifyReport};
