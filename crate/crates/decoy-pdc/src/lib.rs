//! Key rates for decoy-state quantum key distribution with a heralded
//! parametric down-conversion source.
//!
//! The pipeline runs in five stages:
//!
//! 1. [`model`] holds the physical parameters, the thermal photon-number
//!    distribution of the source, and the heralding probability.
//! 2. [`forecast`] turns a parameter set and a fibre length into the
//!    observables an experiment would record: gains and error rates for
//!    the triggered and nontriggered detection streams at each intensity.
//! 3. [`bounds`] consumes those observables exactly as a real run would,
//!    producing the vacuum yield, a single-photon yield floor and an
//!    error-rate ceiling from the two-intensity decoy analysis.
//! 4. [`rate`] folds the bounds into secret-key rates for the supported
//!    schemes, including the triggered-only estimator used by the older
//!    fixed-intensity scheme.
//! 5. [`optimize`] searches the signal intensity at each distance and
//!    sweeps distance grids; [`verify`] re-derives the closed forms from
//!    truncated series and audits the estimators against the channel
//!    model they were fed from.
//!
//! Intensities are parameterised throughout by the per-mode mean photon
//! number `x`, with `mu` the decoy and `mu_prime` the signal setting.
//!
//! The `parallel` feature (on by default) runs distance sweeps over a
//! rayon thread pool; disabling it leaves a sequential implementation
//! with identical output.

pub mod bounds;
pub mod error;
pub mod forecast;
pub mod model;
pub mod optimize;
pub mod rate;
pub mod verify;

pub use bounds::{APolicy, DecoyEstimates, ErrorBoundAt};
pub use error::{Error, Result};
pub use forecast::{ObservableRow, ObservableSet, YieldConvention};
pub use model::{IntensitySet, SystemParams};
pub use optimize::{SearchSettings, SweepRow};
pub use rate::{KeyRateResult, MuPolicy, SchemeKind, SchemeSpec};
pub use verify::{CheckResult, CheckStatus};
