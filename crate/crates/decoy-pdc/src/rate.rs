//! Secure key rates per scheme: triggered-only, triggered plus
//! nontriggered, their max as the final rate, and the ideal benchmark with
//! exactly known single-photon statistics.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bounds::{self, APolicy, DecoyEstimates};
use crate::forecast::{self, ObservableSet, YieldConvention};
use crate::model::{binary_entropy, IntensitySet, SystemParams};
use crate::{Error, Result};

/// The competing configurations the sweeps compare.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    /// Single-photon yield and error rate known exactly; the upper
    /// benchmark.
    Ideal,
    /// Decoy estimation with both streams observed, key from triggered
    /// pulses only.
    NewTriggered,
    /// Decoy estimation with both streams observed, key from both streams.
    NewBoth,
    /// Triggered-only setup at a fixed decoy intensity; the baseline
    /// proposal this method improves on.
    PreviousFixedMu,
}

impl SchemeKind {
    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::Ideal => "ideal",
            SchemeKind::NewTriggered => "new_triggered",
            SchemeKind::NewBoth => "new_both",
            SchemeKind::PreviousFixedMu => "previous_fixed_mu",
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// How the decoy intensity follows the signal intensity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MuPolicy {
    /// mu derived from mu' through the coupling rule.
    Coupled(APolicy),
    /// mu pinned to a constant.
    Fixed(f64),
}

impl MuPolicy {
    /// The decoy intensity for a given signal intensity.
    pub fn resolve(self, mu_prime: f64, eta_a: f64) -> Result<f64> {
        match self {
            MuPolicy::Coupled(policy) => Ok(bounds::mu_from_coupling(mu_prime, eta_a, policy)),
            MuPolicy::Fixed(mu) => {
                if mu >= mu_prime {
                    Err(Error::Intensities {
                        mu,
                        mu_prime,
                        reason: "fixed decoy intensity is not below the signal intensity",
                    })
                } else {
                    Ok(mu)
                }
            }
        }
    }

    /// Coupling policy when there is one.
    pub fn a_policy(self) -> Option<APolicy> {
        match self {
            MuPolicy::Coupled(policy) => Some(policy),
            MuPolicy::Fixed(_) => None,
        }
    }
}

/// One scheme with its intensity rule pinned down.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SchemeSpec {
    pub kind: SchemeKind,
    pub mu_policy: MuPolicy,
}

impl SchemeSpec {
    /// Default intensity rule for `kind`: the fixed mu = 0.1 baseline for
    /// the previous proposal, coupling under `policy` for everything else.
    pub fn for_kind(kind: SchemeKind, policy: APolicy) -> Self {
        let mu_policy = match kind {
            SchemeKind::PreviousFixedMu => MuPolicy::Fixed(0.1),
            _ => MuPolicy::Coupled(policy),
        };
        Self { kind, mu_policy }
    }
}

/// Key rates at one operating point. `r_t` and `r_both` keep their raw
/// (possibly negative) values so optimizers see the landscape; reports
/// clamp at zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KeyRateResult {
    pub scheme: SchemeKind,
    pub intensities: IntensitySet,
    pub r_t: f64,
    pub r_both: f64,
    /// max(r_t, r_both), unclamped.
    pub r_final: f64,
    /// Absent for the ideal scheme, which estimates nothing.
    pub estimates: Option<DecoyEstimates>,
}

impl KeyRateResult {
    fn new(
        scheme: SchemeKind,
        intensities: IntensitySet,
        r_t: f64,
        r_both: f64,
        estimates: Option<DecoyEstimates>,
    ) -> Self {
        Self {
            scheme,
            intensities,
            r_t,
            r_both,
            r_final: r_t.max(r_both),
            estimates,
        }
    }

    /// The reporting value: negative rates mean no key.
    pub fn r_final_clamped(&self) -> f64 {
        self.r_final.max(0.0)
    }
}

fn ec_cost(p: &SystemParams, e: f64) -> f64 {
    p.f_ec * binary_entropy(e)
}

/// Key rate from triggered signal pulses:
///
///   R_t = 1/2 { -Q_t f H2(E_t) + Q0_t + Q1_t [1 - H2(e1)] }
///
/// evaluated at the signal intensity, with Q0_t = Y0 d_A/(1+mu') the
/// vacuum part of the triggered signal pulses. The 1/2 is the basis
/// mismatch cost.
pub fn rate_triggered(obs: &ObservableSet, est: &DecoyEstimates, p: &SystemParams) -> f64 {
    let sig = &obs.signal;
    let q0_t = est.y0 * p.d_a / (1.0 + sig.x);
    0.5 * (-sig.q_t * ec_cost(p, sig.e_t) + q0_t + est.q1_t * (1.0 - binary_entropy(est.e1_upper)))
}

/// Key rate when the nontriggered stream distills key too: both streams
/// pay their own error-correction cost, and the vacuum and single-photon
/// credits combine across streams (Q0_t + Q0_ut = Y0/(1+mu')).
pub fn rate_both(obs: &ObservableSet, est: &DecoyEstimates, p: &SystemParams) -> f64 {
    let sig = &obs.signal;
    let q0 = est.y0 / (1.0 + sig.x);
    0.5 * (-sig.q_t * ec_cost(p, sig.e_t) - sig.q_ut * ec_cost(p, sig.e_ut)
        + q0
        + (est.q1_t + est.q1_ut) * (1.0 - binary_entropy(est.e1_upper)))
}

/// Estimates a decoy method can never beat: the true single-photon yield
/// and error rate taken straight from the channel model.
fn ideal_estimates(p: &SystemParams, eta: f64, mu_prime: f64) -> DecoyEstimates {
    let y1 = forecast::yield_n(eta, p.d_b, 1);
    let e1 = forecast::error_n(eta, p.d_b, p.e_d, 1);
    let (q1_t, q1_ut) = bounds::single_photon_gains(y1, p.eta_a, mu_prime);
    DecoyEstimates {
        y0: p.d_b,
        y1_lower: y1,
        q1_t,
        q1_ut,
        e1_upper: e1,
        e_a: None,
        e_b: None,
        a_used: None,
        policy: None,
    }
}

/// Benchmark rate with exactly known single-photon statistics: the same
/// rate formulas, final rule included, with nothing estimated.
pub fn rate_ideal(p: &SystemParams, l_km: f64, mu_prime: f64, convention: YieldConvention) -> f64 {
    // only the signal row is read; the decoy intensity is a placeholder
    let ints = IntensitySet {
        mu: 0.5 * mu_prime,
        mu_prime,
    };
    let obs = forecast::forecast_observables(p, l_km, ints, convention);
    let est = ideal_estimates(p, obs.eta, mu_prime);
    rate_triggered(&obs, &est, p).max(rate_both(&obs, &est, p))
}

/// Full evaluation of one scheme at one distance and signal intensity:
/// resolve mu, forecast observables, estimate (unless ideal), rate.
pub fn evaluate_scheme(
    spec: &SchemeSpec,
    p: &SystemParams,
    l_km: f64,
    mu_prime: f64,
    convention: YieldConvention,
) -> Result<KeyRateResult> {
    p.validate()?;
    let mu = spec.mu_policy.resolve(mu_prime, p.eta_a)?;
    let ints = IntensitySet::new(mu, mu_prime)?;
    let obs = forecast::forecast_observables(p, l_km, ints, convention);
    match spec.kind {
        SchemeKind::Ideal => {
            let est = ideal_estimates(p, obs.eta, mu_prime);
            let r_t = rate_triggered(&obs, &est, p);
            let r_both = rate_both(&obs, &est, p);
            Ok(KeyRateResult::new(spec.kind, ints, r_t, r_both, None))
        }
        SchemeKind::NewBoth => {
            let est = bounds::estimate(&obs, p, ints, spec.mu_policy.a_policy())?;
            let r_t = rate_triggered(&obs, &est, p);
            let r_both = rate_both(&obs, &est, p);
            Ok(KeyRateResult::new(spec.kind, ints, r_t, r_both, Some(est)))
        }
        SchemeKind::NewTriggered => {
            // same estimator, but the nontriggered stream never distills key
            let est = bounds::estimate(&obs, p, ints, spec.mu_policy.a_policy())?;
            let r_t = rate_triggered(&obs, &est, p);
            Ok(KeyRateResult::new(spec.kind, ints, r_t, r_t, Some(est)))
        }
        SchemeKind::PreviousFixedMu => {
            let est = bounds::estimate_triggered(&obs, p, ints)?;
            let r_t = rate_triggered(&obs, &est, p);
            Ok(KeyRateResult::new(spec.kind, ints, r_t, r_t, Some(est)))
        }
    }
}
