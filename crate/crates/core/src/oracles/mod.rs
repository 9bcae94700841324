//! Independent numerical machinery used to check the closed forms.
//!
//! Nothing here shares an evaluation path with the analytic modules: the
//! quadratures integrate raw integrands, the eigensolver discretizes the
//! radial equation directly, and the series oracles run in double-double
//! arithmetic.

mod deriv;
mod fd;
mod quad;
mod roots;
mod series;

pub use deriv::{derivative, Derivative, DerivativeOrder};
pub use fd::{fd_eigensolve, tridiagonal_eigenvalues, FdSpectrum, GridSpec};
pub use quad::{
    gauss_legendre_composite, gauss_legendre_rule, quad_adaptive, quad_adaptive_detailed,
    quad_semi_infinite, simpson_adaptive, QuadResult,
};
pub use roots::bisect;
pub use series::{erf_series_oracle, jacobi_sum_oracle, DoubleDouble};
