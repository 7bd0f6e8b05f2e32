//! Numerical solver and verification harness for the Helmholtz equation
//! `u_xx + u_zz + h^2 u = 0` on the quarter-plane `x >= 0, z >= 0` with Neumann
//! boundary data, solved through spectral transforms of the boundary data, a
//! jump density on the real line and the unit circle, a Cauchy-integral
//! sectional function, and a final oriented-contour representation of `u(x,z)`.
//!
//! Modules:
//! * [`model`] — spectral points, analyticity regions, oriented contours, problem config.
//! * [`quad`] — panel quadrature, decaying-ray integrals, Cauchy transforms, Plemelj values.
//! * [`bessel`] — complex-argument cylinder functions J0, Y0, J1, Y1, H0, H1.
//! * [`oracle`] — manufactured point-source solution, Lax-pair data, Volterra
//!   eigenfunctions, finite-difference residual checks.
//! * [`transforms`] — half-line spectral transforms U1, U2, F, combinations A/B,
//!   and trace transforms with analytic tail continuation.
//! * [`relation`] — global/symmetry relation residuals, jump-function assembly,
//!   radiation closure, jump densities, and the sign audit with its convention table.
//! * [`solver`] — the inverse path: density tables, sectional function, trace
//!   reconstruction, corner value, and field evaluation on the oriented contour.
//! * [`farfield`] — stationary-phase far-field estimates and their verification.

pub mod model;
pub mod quad;
pub mod bessel;
pub mod oracle;
pub mod transforms;
pub mod relation;
pub mod solver;
pub mod farfield;
mod smallalg;

pub use model::{C, Wavenumber};
