//! Burkholder-Davis-Gundy moment constants for stochastic integrals.
//!
//! * [`hermite`]: exact coefficients of the bivariate Hermite polynomials
//!   `H_{2n}(x, y)` and the martingale statistic `rho_{2n}`.
//! * [`poly`] and [`cert`]: rational polynomials, Sturm chains and certified
//!   dyadic root enclosures, including the two interval solvers the moment
//!   bounds reduce to.
//! * [`constants`]: per-order polynomial inequalities, the constants they
//!   prove, and the sharp constants from the extreme Hermite roots.
//! * [`sim`]: Monte Carlo simulation of `int b dM` and `int b^2 d<M>` with
//!   empirical checks of the bounds, the martingale identity and Hölder.
//! * [`cli`]: the `bdg-lab` command line.

pub mod cert;
pub mod cli;
pub mod constants;
pub mod error;
pub mod hermite;
pub mod poly;
pub mod sim;

pub use cert::{
    count_roots_in, isolate_real_roots, lemma2_interval, lemma3_bound, lemma3_bound_poly,
    smallest_and_largest_positive_roots, sturm_chain, CertifiedInterval, EvenClassPoly,
    IntervalStatus, OddClassPoly, RootCounts,
};
pub use constants::{proved_constants, sharp_constants, BoundsResult, Parity, DEFAULT_TOL};
pub use error::{Error, Result};
pub use hermite::{hermite_coeffs, HermiteCoeffs};
pub use poly::{ExactRational, RationalPoly};
pub use sim::{
    check_bdg, holder_check, martingale_identity_check, moment_estimates, simulate_batch,
    simulate_batch_with_threads, z_ratio, DriverSpec, IntegrandKind, IntegrandSpec, MomentEstimate,
    PathSample, SimConfig,
};
