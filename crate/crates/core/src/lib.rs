//! Global minimization of polynomials on basic semi-algebraic sets by
//! moment relaxations reduced modulo a border basis of the equality
//! constraints.
//!
//! The pipeline, one module per stage:
//!
//! * [`poly`]: sparse polynomials in a graded order.
//! * [`border`]: graded border bases and normal forms.
//! * [`relaxation`]: the moment SDP for a given order.
//! * [`sdp`]: a dense primal-dual interior-point solver and SDPA files.
//! * [`decompose`]: orthogonal bases for the optimal moments and the
//!   flat-extension test.
//! * [`minimizers`]: multiplication matrices and minimizer points.
//! * [`driver`]: the loop over orders.
//!
//! [`problem`], [`corpus`] and [`cli`] provide the file format, the bundled
//! examples and the command-line front end.

pub mod border;
pub mod cli;
pub mod corpus;
pub mod decompose;
pub mod driver;
pub mod linalg;
pub mod minimizers;
pub mod poly;
pub mod problem;
pub mod relaxation;
pub mod sdp;
