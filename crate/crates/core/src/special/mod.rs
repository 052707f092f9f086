//! Complex error function w(z), its high-order derivatives, and their
//! large-order asymptotics, with an independent contour-quadrature oracle.

mod asymptotic;
mod contour;
mod derivatives;
mod faddeeva;

pub use asymptotic::{
    fixed_z_relative_error, plancherel_rotach_w, pr_relative_error, w_fixed_z_asymptotic,
    zoukowski_phi, PlancherelRotachResult, PR_MU_WINDOW,
};
pub use contour::{oracle_relative_deviation, w_contour_oracle};
pub use derivatives::{w_derivative_table, DirectionHint, RecurrenceDirection, WDerivativeTable};
pub use faddeeva::{faddeeva_w, faddeeva_w_continued_fraction, faddeeva_w_prime};
