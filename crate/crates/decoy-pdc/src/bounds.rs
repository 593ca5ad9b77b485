//! Decoy-state bounds: the single-photon yield floor, the single-photon
//! error ceiling, and the intensity coupling that controls the sign of the
//! discarded multiphoton terms.
//!
//! The idea: combine the triggered gain at the decoy intensity with the
//! nontriggered gain at the signal intensity so that the two-pair terms
//! cancel exactly and every higher term enters with a nonpositive
//! coefficient, leaving an inequality for Y_1 alone. The cancellation is
//! unconditional; the sign of the n >= 3 coefficients is what the mu-mu'
//! coupling is for.

use serde::{Deserialize, Serialize};

use crate::forecast::ObservableSet;
use crate::model::{IntensitySet, SystemParams};
use crate::{Error, Result};

/// Rule that picks the coupling coefficient `a` from the trigger
/// efficiency.
///
/// `Strict` minimizes the per-n coefficient over n in [3, 200]; the
/// sequence is nondecreasing, so the minimum sits at n = 3 and is the
/// binding constraint. `Limit` uses the n -> infinity value 1 - eta_A,
/// which admits a somewhat stronger decoy pulse at the price of a positive
/// n = 3 coefficient (see [`coefficient_sign_check`]).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum APolicy {
    Strict,
    Limit,
}

/// Everything the decoy estimation produces for one operating point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecoyEstimates {
    /// Vacuum yield, read off the two vacuum observables.
    pub y0: f64,
    /// Lower bound on the single-photon yield, clamped to [0, 1].
    pub y1_lower: f64,
    /// Triggered single-photon gain at the signal intensity.
    pub q1_t: f64,
    /// Nontriggered single-photon gain at the signal intensity.
    pub q1_ut: f64,
    /// Upper bound on the single-photon error rate, clamped to [0, 1/2].
    pub e1_upper: f64,
    /// Triggered-stream error extraction; `None` when the yield bound is
    /// vacuous.
    pub e_a: Option<f64>,
    /// Nontriggered-stream error extraction.
    pub e_b: Option<f64>,
    /// Coupling coefficient actually applied; `None` for fixed intensity
    /// pairs.
    pub a_used: Option<f64>,
    /// Policy behind `a_used`.
    pub policy: Option<APolicy>,
}

/// Coupling coefficient for one term index,
/// a_n = (((1-eta_A)^(n-2) - (1-eta_A)^n) / (1 - (1-eta_A)^n))^(1/(n-2)).
pub fn a_coefficient(eta_a: f64, n: u32) -> f64 {
    assert!(n >= 3, "coefficients start at n = 3");
    assert!(eta_a > 0.0 && eta_a < 1.0);
    let u = 1.0 - eta_a;
    let k = (n - 2) as i32;
    ((u.powi(k) - u.powi(n as i32)) / (1.0 - u.powi(n as i32))).powf(1.0 / k as f64)
}

/// The coefficient a under the given policy.
pub fn a_policy_value(eta_a: f64, policy: APolicy) -> f64 {
    match policy {
        APolicy::Limit => 1.0 - eta_a,
        APolicy::Strict => (3..=200)
            .map(|n| a_coefficient(eta_a, n))
            .fold(f64::INFINITY, f64::min),
    }
}

/// Largest decoy intensity the coupling admits for a signal intensity,
/// from mu/(1+mu) = a mu'/(1+mu'). Always below `mu_prime` since a < 1.
pub fn mu_from_coupling(mu_prime: f64, eta_a: f64, policy: APolicy) -> f64 {
    assert!(mu_prime > 0.0);
    let a = a_policy_value(eta_a, policy);
    a * mu_prime / (1.0 + mu_prime - a * mu_prime)
}

/// True when the pair is looser than the strict coupling admits, i.e. the
/// n = 3 coefficient is positive and the yield bound loses its guarantee.
pub fn exceeds_strict_coupling(ints: IntensitySet, eta_a: f64) -> bool {
    ints.mu > mu_from_coupling(ints.mu_prime, eta_a, APolicy::Strict)
}

/// Outcome of scanning the n >= 3 combination coefficients for positivity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CoefficientCheck {
    pub all_nonpositive: bool,
    /// Smallest offending n, when any.
    pub first_violation: Option<u32>,
}

/// Scans the coefficients the yield bound discards,
///
///   c_n = (1-(1-eta_A)^n)/(1-(1-eta_A)^2) m^n m'^2
///       - (1-eta_A)^(n-2) m^2 m'^n,          m = mu/(1+mu), m' = mu'/(1+mu'),
///
/// for n in 3..=n_max. All must be <= 0 for the bound direction to hold.
/// At coupling equality c_3 vanishes identically; comparison against a
/// small relative epsilon keeps rounding from reading that zero as a
/// violation (genuine violations sit orders of magnitude above it).
pub fn coefficient_sign_check(ints: IntensitySet, eta_a: f64, n_max: u32) -> CoefficientCheck {
    assert!(eta_a > 0.0 && eta_a < 1.0);
    let u = 1.0 - eta_a;
    let m = ints.mu / (1.0 + ints.mu);
    let mp = ints.mu_prime / (1.0 + ints.mu_prime);
    let q2 = 1.0 - u * u;
    let mut first = None;
    for n in 3..=n_max {
        let q_n = 1.0 - u.powi(n as i32);
        let t1 = q_n / q2 * m.powi(n as i32) * mp * mp;
        let t2 = u.powi(n as i32 - 2) * m * m * mp.powi(n as i32);
        if t1 - t2 > 1e-12 * t1.max(t2) {
            first = Some(n);
            break;
        }
    }
    CoefficientCheck {
        all_nonpositive: first.is_none(),
        first_violation: first,
    }
}

/// Vacuum yield from the vacuum-intensity observables. The triggered and
/// nontriggered vacuum gains are Y_0 d_A and Y_0 (1 - d_A); their sum
/// recovers Y_0 without dividing by a small d_A.
pub fn y0_estimate(obs: &ObservableSet) -> f64 {
    obs.vacuum.q_t + obs.vacuum.q_ut
}

/// Lower bound on the single-photon yield from the triggered decoy gain
/// and the nontriggered signal gain, clamped to [0, 1].
///
/// Kept in its exact algebraic form: numerator and denominator are both
/// negative for coupled pairs (the Y_1 coefficient
/// eta_A m m'^2/(1-(1-eta_A)^2) - m^2 m'/(1-eta_A) is negative whenever
/// m/m' > (1-eta_A)/(2-eta_A), and every coupling policy lands above that
/// threshold), so neither sign may be assumed. With a negative denominator
/// the discarded n >= 4 terms raise the ratio slightly above the true
/// yield; [`crate::verify::run_checks`] measures the excess.
pub fn y1_lower_bound(obs: &ObservableSet, p: &SystemParams, ints: IntensitySet) -> Result<f64> {
    let u = 1.0 - p.eta_a;
    let q2 = 1.0 - u * u;
    let m = ints.mu / (1.0 + ints.mu);
    let mp = ints.mu_prime / (1.0 + ints.mu_prime);
    let y0 = y0_estimate(obs);
    let numer = (1.0 + ints.mu) * mp * mp * obs.decoy.q_t / q2
        - (1.0 + ints.mu_prime) * m * m * obs.signal.q_ut / (u * u)
        - y0 * (mp * mp * p.d_a / q2 - m * m * (1.0 - p.d_a) / (u * u));
    let denom = p.eta_a * m * mp * mp / q2 - m * m * mp / u;
    if denom == 0.0 {
        return Err(Error::Intensities {
            mu: ints.mu,
            mu_prime: ints.mu_prime,
            reason: "yield-bound denominator vanishes for this intensity pair",
        });
    }
    Ok((numer / denom).clamp(0.0, 1.0))
}

/// Yield bound variant using only triggered gains at the two intensities,
/// for setups that record no nontriggered statistics.
///
/// The two-pair cancellation happens the same way, but every discarded
/// coefficient is q_n m^2 m'^2 (m^(n-2) - m'^(n-2)) < 0 outright, so this
/// bound needs no intensity coupling and its denominator
/// eta_A m m' (m' - m) is positive for every valid pair.
pub fn y1_lower_bound_triggered(
    obs: &ObservableSet,
    p: &SystemParams,
    ints: IntensitySet,
) -> Result<f64> {
    let m = ints.mu / (1.0 + ints.mu);
    let mp = ints.mu_prime / (1.0 + ints.mu_prime);
    let numer = (1.0 + ints.mu) * mp * mp * obs.decoy.q_t
        - (1.0 + ints.mu_prime) * m * m * obs.signal.q_t
        - (mp * mp - m * m) * obs.vacuum.q_t;
    let denom = p.eta_a * m * mp * (mp - m);
    if denom == 0.0 {
        return Err(Error::Intensities {
            mu: ints.mu,
            mu_prime: ints.mu_prime,
            reason: "intensities too close, yield-bound denominator underflows",
        });
    }
    Ok((numer / denom).clamp(0.0, 1.0))
}

/// Triggered and nontriggered single-photon gains implied by a yield at
/// intensity `x`: the single-pair emission probability x/(1+x)^2 split by
/// the trigger efficiency.
pub fn single_photon_gains(y1: f64, eta_a: f64, x: f64) -> (f64, f64) {
    assert!((0.0..=1.0).contains(&y1) && x >= 0.0);
    let p1 = x / ((1.0 + x) * (1.0 + x));
    (y1 * eta_a * p1, y1 * (1.0 - eta_a) * p1)
}

/// Which intensity row the error bound is extracted from. The decoy row is
/// the default; the weaker pulse has the larger single-photon fraction and
/// gives the tighter estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorBoundAt {
    Decoy,
    Signal,
}

/// Upper bound on the single-photon error rate: the smaller of the
/// triggered and nontriggered extractions, clamped to [0, 1/2]. The
/// dark-count subtraction can overshoot, so negative pre-clamp values are
/// legitimate.
pub fn e1_upper_bound(
    obs: &ObservableSet,
    y1_lower: f64,
    y0: f64,
    p: &SystemParams,
    at: ErrorBoundAt,
) -> Result<f64> {
    if y1_lower <= 0.0 {
        return Err(Error::VacuousBound);
    }
    let row = match at {
        ErrorBoundAt::Decoy => &obs.decoy,
        ErrorBoundAt::Signal => &obs.signal,
    };
    let (e_a, e_b) = e1_components(row, y1_lower, y0, p);
    Ok(e_a.min(e_b).clamp(0.0, 0.5))
}

/// The two error extractions at one row:
///
///   e_a = ((1+x)^2 E_t Q_t - (1+x) Y_0 d_A / 2) / (Y_1 eta_A x)
///
/// and e_b likewise from the nontriggered stream with 1 - d_A, 1 - eta_A.
fn e1_components(
    row: &crate::forecast::ObservableRow,
    y1: f64,
    y0: f64,
    p: &SystemParams,
) -> (f64, f64) {
    let x = row.x;
    let scale = (1.0 + x) / (y1 * x);
    let e_a = ((1.0 + x) * row.e_t * row.q_t - 0.5 * y0 * p.d_a) * scale / p.eta_a;
    let e_b = ((1.0 + x) * row.e_ut * row.q_ut - 0.5 * y0 * (1.0 - p.d_a)) * scale / (1.0 - p.eta_a);
    (e_a, e_b)
}

/// Full decoy estimation: Y_0, the yield floor, the single-photon gains at
/// the signal intensity, and the error ceiling at the decoy intensity.
///
/// A vacuous yield floor (Y_1 = 0) does not fail the pipeline; the
/// estimate degrades to e_1 = 1/2 so downstream rates come out negative
/// and clamp to zero at reporting. `policy` is recorded along with the
/// coefficient it implies; pass `None` for pairs not produced by a
/// coupling rule.
pub fn estimate(
    obs: &ObservableSet,
    p: &SystemParams,
    ints: IntensitySet,
    policy: Option<APolicy>,
) -> Result<DecoyEstimates> {
    let y0 = y0_estimate(obs);
    let y1 = y1_lower_bound(obs, p, ints)?;
    let (q1_t, q1_ut) = single_photon_gains(y1, p.eta_a, ints.mu_prime);
    let (e1, e_a, e_b) = if y1 > 0.0 {
        let (a, b) = e1_components(&obs.decoy, y1, y0, p);
        (a.min(b).clamp(0.0, 0.5), Some(a), Some(b))
    } else {
        (0.5, None, None)
    };
    Ok(DecoyEstimates {
        y0,
        y1_lower: y1,
        q1_t,
        q1_ut,
        e1_upper: e1,
        e_a,
        e_b,
        a_used: policy.map(|pol| a_policy_value(p.eta_a, pol)),
        policy,
    })
}

/// Estimation for triggered-only setups: the yield floor comes from
/// [`y1_lower_bound_triggered`] and the error ceiling from the triggered
/// extraction alone.
pub fn estimate_triggered(
    obs: &ObservableSet,
    p: &SystemParams,
    ints: IntensitySet,
) -> Result<DecoyEstimates> {
    let y0 = y0_estimate(obs);
    let y1 = y1_lower_bound_triggered(obs, p, ints)?;
    let (q1_t, q1_ut) = single_photon_gains(y1, p.eta_a, ints.mu_prime);
    let (e1, e_a) = if y1 > 0.0 {
        let (a, _) = e1_components(&obs.decoy, y1, y0, p);
        (a.clamp(0.0, 0.5), Some(a))
    } else {
        (0.5, None)
    };
    Ok(DecoyEstimates {
        y0,
        y1_lower: y1,
        q1_t,
        q1_ut,
        e1_upper: e1,
        e_a,
        e_b: None,
        a_used: None,
        policy: None,
    })
}
