use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failures surfaced by parameter validation and the decoy estimators.
#[derive(Debug, Error)]
pub enum Error {
    /// A physical parameter is outside its admissible range.
    #[error("invalid parameter `{name}`: {reason}")]
    Param { name: &'static str, reason: String },

    /// An intensity pair the estimator cannot work with.
    #[error("invalid intensity pair (mu = {mu}, mu_prime = {mu_prime}): {reason}")]
    Intensities {
        mu: f64,
        mu_prime: f64,
        reason: &'static str,
    },

    /// The single-photon yield bound collapsed to zero, so no error bound
    /// can be extracted from it.
    #[error("single-photon yield lower bound is zero; error bound undefined")]
    VacuousBound,

    /// The key rate is non-positive over the entire requested domain.
    #[error("key rate is non-positive over the whole search domain")]
    NoPositiveRate,
}
