//! Expected channel statistics: per-photon-number yields and error rates,
//! and the closed-form gains and QBERs of the triggered and nontriggered
//! pulse streams at each intensity.
//!
//! Everything here describes an eavesdropper-free channel. These forecasts
//! stand in for measured data downstream: [`crate::bounds`] consumes them
//! as observables, and the self-check suite compares each closed form
//! against its truncated photon-number series.

use serde::{Deserialize, Serialize};

use crate::model::{at_least_one, geometric_gain_sum, transmittance, IntensitySet, SystemParams};

/// Bracket used for the n-photon yield inside the nontriggered gain.
///
/// `Consistent` applies the same d_B + 1 - (1-eta)^n yield as every other
/// observable. `Verbatim` keeps an alternative d_B + (1-eta)^n bracket that
/// appears in some treatments of the nontriggered stream; it violates the
/// partition identity Q_t + Q_ut = sum_n P_n Y_n by orders of magnitude at
/// fibre-scale losses (the self-check suite records the discrepancy), so it
/// is selectable for inspection but not the default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum YieldConvention {
    Verbatim,
    Consistent,
}

/// Closed-form observables at one pulse intensity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ObservableRow {
    /// Intensity the row was evaluated at.
    pub x: f64,
    /// Gain of the triggered stream.
    pub q_t: f64,
    /// Gain of the nontriggered stream.
    pub q_ut: f64,
    /// QBER of the triggered stream.
    pub e_t: f64,
    /// QBER of the nontriggered stream.
    pub e_ut: f64,
}

/// Observables at the vacuum, decoy and signal intensities for one channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ObservableSet {
    /// Overall transmittance the set was computed for.
    pub eta: f64,
    pub vacuum: ObservableRow,
    pub decoy: ObservableRow,
    pub signal: ObservableRow,
}

/// Yield of an n-pair pulse: a dark count or at least one surviving photon,
/// capped at certainty.
pub fn yield_n(eta: f64, d_b: f64, n: u32) -> f64 {
    assert!((0.0..=1.0).contains(&eta) && (0.0..=1.0).contains(&d_b));
    (d_b + at_least_one(eta, n)).min(1.0)
}

/// Error rate of an n-pair pulse. Dark counts flip a fair coin, surviving
/// photons err with the alignment probability.
pub fn error_n(eta: f64, d_b: f64, e_d: f64, n: u32) -> f64 {
    let signal = at_least_one(eta, n);
    let y = yield_n(eta, d_b, n);
    assert!(y > 0.0, "no detection events at n = {n}, eta = {eta}, d_B = {d_b}");
    (0.5 * d_b + e_d * signal) / y
}

/// Intensity-averaged trigger probability, sum_n P_n (1 - (1-eta_A)^n).
/// The geometric sums telescope to x eta_A / (1 + x eta_A).
fn trigger_sum(x: f64, eta_a: f64) -> f64 {
    x * eta_a / (1.0 + x * eta_a)
}

/// Probability that the trigger and Bob's detector both fire from real
/// photons of the same pulse, averaged over the intensity:
///
///   sum_n P_n (1 - (1-eta_A)^n) (1 - (1-eta)^n)
///     = x eta eta_A ((1+x)^2 - x^2 (1-eta)(1-eta_A))
///       / ((1 + x eta)(1 + x eta_A)(1 + x (eta + eta_A (1-eta))))
///
/// The expanded product of geometric sums would subtract four terms that
/// agree to several digits at fibre-scale eta; this single positive
/// fraction keeps the gains good to machine precision everywhere.
fn coincidence_sum(x: f64, eta: f64, eta_a: f64) -> f64 {
    let w = 1.0 - eta;
    let numer = x * eta * eta_a * ((1.0 + x) * (1.0 + x) - x * x * w * (1.0 - eta_a));
    let denom = (1.0 + x * eta) * (1.0 + x * eta_a) * (1.0 + x * (eta + eta_a * w));
    numer / denom
}

/// Probability that the trigger stays silent while a photon still reaches
/// Bob, averaged over the intensity:
///
///   sum_n P_n (1-eta_A)^n (1 - (1-eta)^n)
///     = x (1-eta_A) eta / ((1 + x eta_A)(1 + x (eta + eta_A (1-eta))))
///
/// Same story as [`coincidence_sum`]: the telescoped fraction keeps the
/// eta-sized value exact instead of extracting it from a subtraction.
fn silent_survival_sum(x: f64, eta: f64, eta_a: f64) -> f64 {
    let bracket = eta + eta_a * (1.0 - eta);
    x * (1.0 - eta_a) * eta / ((1.0 + x * eta_a) * (1.0 + x * bracket))
}

/// Gain of the triggered stream at intensity `x`, closed form.
///
/// Split by what fires: dark counts on both sides, Bob's dark counts under
/// a real trigger, and two-sided photon coincidences. Each part is a
/// telescoped geometric sum in its own right, so nothing here subtracts
/// nearly-equal quantities.
pub fn gain_triggered(p: &SystemParams, eta: f64, x: f64) -> f64 {
    p.d_a * p.d_b / (1.0 + x)
        + p.d_b * trigger_sum(x, p.eta_a)
        + coincidence_sum(x, eta, p.eta_a)
}

/// Gain of the nontriggered stream at intensity `x`, closed form, with the
/// yield bracket chosen by `convention`.
pub fn gain_nontriggered(p: &SystemParams, eta: f64, x: f64, convention: YieldConvention) -> f64 {
    let u = 1.0 - p.eta_a;
    let vacuum = (1.0 - p.d_a) * p.d_b / (1.0 + x);
    match convention {
        YieldConvention::Consistent => {
            vacuum + p.d_b * geometric_gain_sum(x, u) + silent_survival_sum(x, eta, p.eta_a)
        }
        YieldConvention::Verbatim => {
            vacuum + p.d_b * geometric_gain_sum(x, u) + geometric_gain_sum(x, (1.0 - eta) * u)
        }
    }
}

/// QBER of the triggered stream. A stream with zero gain has no events and
/// reads as a fair coin.
pub fn qber_triggered(p: &SystemParams, eta: f64, x: f64) -> f64 {
    let num = qber_triggered_numerator(p, eta, x);
    let q = gain_triggered(p, eta, x);
    if q == 0.0 {
        return 0.5;
    }
    num / q
}

/// QBER of the nontriggered stream. Numerator and denominator both use the
/// consistent yield bracket whatever the gain column reports; an error rate
/// over a mismatched denominator would not be a probability.
pub fn qber_nontriggered(p: &SystemParams, eta: f64, x: f64) -> f64 {
    let num = qber_nontriggered_numerator(p, eta, x);
    let q = gain_nontriggered(p, eta, x, YieldConvention::Consistent);
    if q == 0.0 {
        return 0.5;
    }
    num / q
}

/// Error-weighted gain sum_n P_n q_n e_n Y_n of the triggered stream; the
/// QBER numerator, exposed for the estimator which needs the product
/// E Q rather than the ratio. Same decomposition as [`gain_triggered`]
/// with the fair-coin weight on dark counts and the alignment error on
/// coincidences.
pub fn qber_triggered_numerator(p: &SystemParams, eta: f64, x: f64) -> f64 {
    0.5 * p.d_b * (p.d_a / (1.0 + x) + trigger_sum(x, p.eta_a))
        + p.e_d * coincidence_sum(x, eta, p.eta_a)
}

/// Nontriggered counterpart of [`qber_triggered_numerator`].
pub fn qber_nontriggered_numerator(p: &SystemParams, eta: f64, x: f64) -> f64 {
    let u = 1.0 - p.eta_a;
    0.5 * p.d_b * ((1.0 - p.d_a) / (1.0 + x) + geometric_gain_sum(x, u))
        + p.e_d * silent_survival_sum(x, eta, p.eta_a)
}

/// All twelve observables (three intensities, gain and QBER for each
/// stream) at one fibre length.
pub fn forecast_observables(
    p: &SystemParams,
    l_km: f64,
    ints: IntensitySet,
    convention: YieldConvention,
) -> ObservableSet {
    observables_at(p, transmittance(p.alpha, l_km, p.eta_b), ints, convention)
}

/// Same as [`forecast_observables`] with the transmittance given directly.
pub fn observables_at(
    p: &SystemParams,
    eta: f64,
    ints: IntensitySet,
    convention: YieldConvention,
) -> ObservableSet {
    let row = |x: f64| ObservableRow {
        x,
        q_t: gain_triggered(p, eta, x),
        q_ut: gain_nontriggered(p, eta, x, convention),
        e_t: qber_triggered(p, eta, x),
        e_ut: qber_nontriggered(p, eta, x),
    };
    ObservableSet {
        eta,
        vacuum: row(0.0),
        decoy: row(ints.mu),
        signal: row(ints.mu_prime),
    }
}
