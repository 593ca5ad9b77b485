//! Source statistics and the numeric primitives everything else builds on.
//!
//! The source emits photon pairs with thermal statistics: intensity (mean
//! pair number) x gives P_n = x^n / (1+x)^(n+1). One photon of each pair
//! goes to Bob, the other to Alice's trigger detector, which splits the
//! pulses into a triggered and a nontriggered stream.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Detector and channel constants for one setup.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemParams {
    /// Dark-count probability of Alice's trigger detector, per pulse.
    #[serde(rename = "d_A")]
    pub d_a: f64,
    /// Efficiency of Alice's trigger detector.
    #[serde(rename = "eta_A")]
    pub eta_a: f64,
    /// Dark-count probability of Bob's detector, per pulse.
    #[serde(rename = "d_B")]
    pub d_b: f64,
    /// Efficiency of Bob's detection apparatus, fibre loss excluded.
    #[serde(rename = "eta_B")]
    pub eta_b: f64,
    /// Fibre attenuation in dB/km.
    pub alpha: f64,
    /// Probability that a transmitted photon lands in the wrong detector.
    pub e_d: f64,
    /// Error-correction inefficiency multiplying every H2(E) cost term.
    pub f_ec: f64,
}

impl SystemParams {
    /// Constants of the Gobby-Yuan-Shields 122 km fibre experiment, the
    /// standard benchmark set for key-rate comparisons.
    pub fn gys() -> Self {
        Self {
            d_a: 1e-6,
            eta_a: 0.5,
            d_b: 1.7e-6,
            eta_b: 0.045,
            alpha: 0.21,
            e_d: 0.033,
            f_ec: 1.22,
        }
    }

    /// Overall transmittance from Alice's output to a click at Bob's side.
    pub fn transmittance_at(&self, l_km: f64) -> f64 {
        transmittance(self.alpha, l_km, self.eta_b)
    }

    pub fn validate(&self) -> Result<()> {
        let check = |name: &'static str, ok: bool, reason: &str| -> Result<()> {
            if ok {
                Ok(())
            } else {
                Err(Error::Param {
                    name,
                    reason: reason.to_string(),
                })
            }
        };
        let all = [
            self.d_a, self.eta_a, self.d_b, self.eta_b, self.alpha, self.e_d, self.f_ec,
        ];
        check("params", all.iter().all(|v| v.is_finite()), "all parameters must be finite")?;
        check("d_A", (0.0..1.0).contains(&self.d_a), "dark-count probability must lie in [0, 1)")?;
        // The estimators divide by both eta_A and 1 - eta_A.
        check(
            "eta_A",
            self.eta_a > 0.0 && self.eta_a < 1.0,
            "trigger efficiency must lie strictly inside (0, 1)",
        )?;
        check("d_B", (0.0..1.0).contains(&self.d_b), "dark-count probability must lie in [0, 1)")?;
        check("eta_B", self.eta_b > 0.0 && self.eta_b <= 1.0, "detection efficiency must lie in (0, 1]")?;
        check("alpha", self.alpha >= 0.0, "attenuation cannot be negative")?;
        check("e_d", (0.0..=0.5).contains(&self.e_d), "alignment error must lie in [0, 0.5]")?;
        check("f_ec", self.f_ec >= 1.0, "error correction cannot beat the Shannon limit")?;
        Ok(())
    }
}

/// A decoy/signal intensity pair with `0 < mu < mu_prime`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntensitySet {
    pub mu: f64,
    pub mu_prime: f64,
}

impl IntensitySet {
    pub fn new(mu: f64, mu_prime: f64) -> Result<Self> {
        if !mu.is_finite() || !mu_prime.is_finite() || mu <= 0.0 {
            return Err(Error::Intensities {
                mu,
                mu_prime,
                reason: "intensities must be finite and positive",
            });
        }
        if mu >= mu_prime {
            return Err(Error::Intensities {
                mu,
                mu_prime,
                reason: "decoy intensity must be strictly below the signal intensity",
            });
        }
        Ok(Self { mu, mu_prime })
    }
}

/// Probability that a pulse of intensity `x` carries exactly `n` photon
/// pairs. Evaluated as (x/(1+x))^n / (1+x) so large `n` cannot overflow.
pub fn photon_prob(x: f64, n: u32) -> f64 {
    assert!(x.is_finite() && x >= 0.0, "intensity must be finite and non-negative");
    (x / (1.0 + x)).powi(n as i32) / (1.0 + x)
}

/// Probability that at least one of `n` independent events of probability
/// `p` occurs: 1 - (1-p)^n, evaluated through log1p/expm1 so small `p`
/// keeps full precision at any `n`. Both detector sides use this: the
/// trigger firing on an n-pair pulse and a photon surviving to Bob.
pub fn at_least_one(p: f64, n: u32) -> f64 {
    assert!((0.0..=1.0).contains(&p));
    match n {
        0 => 0.0,
        1 => p,
        _ if p == 1.0 => 1.0,
        _ => -((n as f64) * (-p).ln_1p()).exp_m1(),
    }
}

/// Probability that Alice's trigger detector fires on an `n`-pair pulse,
/// dark counts aside. Vacuum pulses carry no heralding photon, so `n = 0`
/// is rejected; its trigger behavior is governed by `d_a` alone.
pub fn trigger_prob(eta_a: f64, n: u32) -> f64 {
    assert!(n >= 1, "no heralding photon in a vacuum pulse");
    at_least_one(eta_a, n)
}

/// Binary Shannon entropy in bits, with H2(0) = H2(1) = 0.
pub fn binary_entropy(p: f64) -> f64 {
    assert!((0.0..=1.0).contains(&p), "entropy argument {p} outside [0, 1]");
    if p == 0.0 || p == 1.0 {
        return 0.0;
    }
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

/// Closed form of the gain series sum_{n>=1} r^n x^n / (1+x)^(n+1), the
/// workhorse behind every gain and QBER expression:
///
///   S(x, r) = r x / ((1+x) (1 + x (1-r)))
pub fn geometric_gain_sum(x: f64, r: f64) -> f64 {
    assert!(x.is_finite() && x >= 0.0);
    assert!((0.0..=1.0).contains(&r), "survival factor {r} outside [0, 1]");
    r * x / ((1.0 + x) * (1.0 + x * (1.0 - r)))
}

/// Photon transfer probability through `l_km` of fibre plus Bob's
/// apparatus: eta_B 10^(-alpha L / 10).
pub fn transmittance(alpha_db_per_km: f64, l_km: f64, eta_b: f64) -> f64 {
    assert!(alpha_db_per_km >= 0.0 && l_km >= 0.0);
    eta_b * 10f64.powf(-alpha_db_per_km * l_km / 10.0)
}
