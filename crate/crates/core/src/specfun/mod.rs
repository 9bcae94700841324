//! Special functions used by the closed forms: log-gamma, Jacobi
//! polynomials, and real and complex error functions.

mod erf;
mod faddeeva;
mod gamma;
mod jacobi;

pub use erf::{erf_real, erfc_real};
pub use faddeeva::{erf_complex, erfc_complex, exp_scaled_erfc, faddeeva, FADDEEVA_MAX_MODULUS};
pub use gamma::ln_gamma;
pub use jacobi::jacobi;
