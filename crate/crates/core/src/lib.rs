//! Pseudo-spectral simulator for the one-phase Muskat problem with surface tension.

// `!(x > 0.0)` is used on purpose so that NaN is rejected together with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Column gathers over levels and modes read clearer as index loops.
#![allow(clippy::needless_range_loop)]

pub mod curvature;
pub mod diagnostics;
pub mod dn;
pub mod elliptic;
pub mod evolution;
pub mod io;
pub mod norms;
pub mod spectral;
