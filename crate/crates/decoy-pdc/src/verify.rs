//! Numerical self-checks: closed forms against truncated series, the
//! partition identity, coefficient signs under the configured coupling,
//! and estimator soundness against the channel-model truth.
//!
//! The series evaluators here re-derive each observable from the
//! photon-number model term by term; the unit tests carry their own
//! independent copies, this module ships so deployments can re-run the
//! comparison on their own configurations.

use serde::Serialize;

use crate::bounds::{
    self, coefficient_sign_check, exceeds_strict_coupling, mu_from_coupling, APolicy,
};
use crate::forecast::{self, YieldConvention};
use crate::model::{at_least_one, photon_prob, trigger_prob, IntensitySet, SystemParams};
use crate::rate::{MuPolicy, SchemeSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CheckStatus {
    Pass,
    Fail,
    /// Advisory: nothing failed, but the configuration leans on something
    /// unguaranteed.
    Warn,
    /// A deviation this configuration is known to produce; reported, not
    /// failed.
    Expected,
}

impl CheckStatus {
    pub fn label(self) -> &'static str {
        match self {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Warn => "WARN",
            CheckStatus::Expected => "EXPECTED",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub status: CheckStatus,
    pub detail: String,
}

/// True when any check actually failed (warnings and expected deviations
/// do not count).
pub fn any_failed(results: &[CheckResult]) -> bool {
    results.iter().any(|r| r.status == CheckStatus::Fail)
}

const GRID_L: [f64; 7] = [0.0, 25.0, 50.0, 75.0, 100.0, 125.0, 150.0];

fn rel_dev(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Intensities visited on one grid column: vacuum, coupled decoy, signal.
/// Beyond x ~ 1 the closed forms shed a few digits to cancellation against
/// the nontriggered bracket, so the audit stays on the intensities the
/// estimators actually operate at.
fn grid_intensities(eta_a: f64, j: u32) -> [f64; 3] {
    let mu_prime = 0.05 * j as f64;
    let mu = mu_from_coupling(mu_prime, eta_a, APolicy::Strict);
    [0.0, mu, mu_prime]
}

fn series_gain_t(p: &SystemParams, eta: f64, x: f64) -> f64 {
    let mut acc = p.d_a * p.d_b * photon_prob(x, 0);
    for n in 1..=200 {
        let y = p.d_b + at_least_one(eta, n);
        acc += photon_prob(x, n) * trigger_prob(p.eta_a, n) * y;
    }
    acc
}

fn series_gain_ut(p: &SystemParams, eta: f64, x: f64, convention: YieldConvention) -> f64 {
    let mut acc = (1.0 - p.d_a) * p.d_b * photon_prob(x, 0);
    for n in 1..=200 {
        let bracket = match convention {
            YieldConvention::Consistent => p.d_b + at_least_one(eta, n),
            YieldConvention::Verbatim => p.d_b + (1.0 - eta).powi(n as i32),
        };
        acc += photon_prob(x, n) * (1.0 - trigger_prob(p.eta_a, n)) * bracket;
    }
    acc
}

fn series_err_numerator(p: &SystemParams, eta: f64, x: f64, triggered: bool) -> f64 {
    let vacuum_weight = if triggered { p.d_a } else { 1.0 - p.d_a };
    let mut acc = 0.5 * p.d_b * vacuum_weight * photon_prob(x, 0);
    for n in 1..=200 {
        let stream = if triggered {
            trigger_prob(p.eta_a, n)
        } else {
            1.0 - trigger_prob(p.eta_a, n)
        };
        acc += photon_prob(x, n) * stream * (0.5 * p.d_b + p.e_d * at_least_one(eta, n));
    }
    acc
}

fn check_series(p: &SystemParams) -> CheckResult {
    let mut worst = 0.0f64;
    let mut points = 0;
    for &l in &GRID_L {
        let eta = p.transmittance_at(l);
        for j in 1..=10 {
            for x in grid_intensities(p.eta_a, j) {
                let q_t = forecast::gain_triggered(p, eta, x);
                let q_t_series = series_gain_t(p, eta, x);
                let num_t = forecast::qber_triggered_numerator(p, eta, x);
                let num_t_series = series_err_numerator(p, eta, x, true);
                let q_ut_c = forecast::gain_nontriggered(p, eta, x, YieldConvention::Consistent);
                let q_ut_c_series = series_gain_ut(p, eta, x, YieldConvention::Consistent);
                let num_ut = forecast::qber_nontriggered_numerator(p, eta, x);
                let num_ut_series = series_err_numerator(p, eta, x, false);
                let pairs = [
                    (q_t, q_t_series),
                    (q_ut_c, q_ut_c_series),
                    (
                        forecast::gain_nontriggered(p, eta, x, YieldConvention::Verbatim),
                        series_gain_ut(p, eta, x, YieldConvention::Verbatim),
                    ),
                    // QBERs as the full ratio, matching what callers see
                    (forecast::qber_triggered(p, eta, x), num_t_series / q_t_series),
                    (
                        forecast::qber_nontriggered(p, eta, x),
                        num_ut_series / q_ut_c_series,
                    ),
                    (num_t, num_t_series),
                    (num_ut, num_ut_series),
                ];
                for (closed, series) in pairs {
                    worst = worst.max(rel_dev(closed, series));
                    points += 1;
                }
            }
        }
    }
    let status = if worst <= 1e-12 {
        CheckStatus::Pass
    } else {
        CheckStatus::Fail
    };
    CheckResult {
        name: "series_closed_form",
        status,
        detail: format!("worst relative deviation {worst:.3e} over {points} comparisons (tolerance 1e-12)"),
    }
}

fn check_partition(p: &SystemParams, convention: YieldConvention) -> CheckResult {
    let mut worst = 0.0f64;
    for &l in &GRID_L {
        let eta = p.transmittance_at(l);
        for j in 1..=10 {
            for x in grid_intensities(p.eta_a, j) {
                let total = forecast::gain_triggered(p, eta, x)
                    + forecast::gain_nontriggered(p, eta, x, convention);
                let averaged: f64 = photon_prob(x, 0) * p.d_b
                    + (1..=200)
                        .map(|n| photon_prob(x, n) * forecast::yield_n(eta, p.d_b, n))
                        .sum::<f64>();
                worst = worst.max(rel_dev(total, averaged));
            }
        }
    }
    match convention {
        YieldConvention::Consistent => CheckResult {
            name: "partition_identity",
            status: if worst <= 1e-12 {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            },
            detail: format!("Q_t + Q_ut vs averaged yield: worst relative deviation {worst:.3e}"),
        },
        YieldConvention::Verbatim => CheckResult {
            name: "partition_identity",
            status: CheckStatus::Expected,
            detail: format!(
                "verbatim bracket does not partition the yield; worst relative deviation {worst:.3e}"
            ),
        },
    }
}

fn check_coefficients(p: &SystemParams, policy: APolicy) -> CheckResult {
    let mut violations = 0;
    let mut first: Option<(f64, u32)> = None;
    for j in 1..=20 {
        let mu_prime = 0.05 * j as f64;
        let mu = mu_from_coupling(mu_prime, p.eta_a, policy);
        let ints = IntensitySet::new(mu, mu_prime).expect("coupling keeps mu below mu_prime");
        let check = coefficient_sign_check(ints, p.eta_a, 200);
        if let Some(n) = check.first_violation {
            violations += 1;
            first.get_or_insert((mu_prime, n));
        }
    }
    match policy {
        APolicy::Strict => CheckResult {
            name: "coefficient_condition",
            status: if violations == 0 {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            },
            detail: match first {
                None => "all discarded coefficients nonpositive for n <= 200 at the strict coupling".to_string(),
                Some((mp, n)) => {
                    format!("positive coefficient at n = {n}, mu' = {mp} under the strict coupling")
                }
            },
        },
        APolicy::Limit => CheckResult {
            name: "coefficient_condition",
            status: CheckStatus::Expected,
            detail: match first {
                Some((_, n)) => format!(
                    "limit coupling leaves a positive coefficient (first at n = {n}) at {violations}/20 grid points; inherent to the limit policy"
                ),
                None => "limit coupling produced no positive coefficient on this grid".to_string(),
            },
        },
    }
}

fn check_soundness(p: &SystemParams, convention: YieldConvention) -> (CheckResult, CheckResult) {
    let mut y_excess = 0.0f64;
    let mut y_at = (0.0, 0.0);
    let mut y_viol = 0;
    let mut e_short = 0.0f64;
    let mut e_viol = 0;
    let mut points = 0;
    for i in 0..=14 {
        let l = 10.0 * i as f64;
        for j in 1..=10 {
            let mu_prime = 0.05 * j as f64;
            let mu = mu_from_coupling(mu_prime, p.eta_a, APolicy::Strict);
            let ints = IntensitySet::new(mu, mu_prime).expect("coupling keeps mu below mu_prime");
            let obs = forecast::forecast_observables(p, l, ints, convention);
            let est = bounds::estimate(&obs, p, ints, Some(APolicy::Strict))
                .expect("strict pair is never degenerate");
            let y_true = forecast::yield_n(obs.eta, p.d_b, 1);
            let e_true = forecast::error_n(obs.eta, p.d_b, p.e_d, 1);
            points += 1;
            if est.y1_lower > y_true {
                y_viol += 1;
                let rel = est.y1_lower / y_true - 1.0;
                if rel > y_excess {
                    y_excess = rel;
                    y_at = (l, mu_prime);
                }
            }
            if est.e1_upper < e_true {
                e_viol += 1;
                e_short = e_short.max(e_true - est.e1_upper);
            }
        }
    }
    let y1 = if y_viol == 0 {
        CheckResult {
            name: "y1_soundness",
            status: CheckStatus::Pass,
            detail: format!("Y1 floor below the true yield at all {points} strict-coupling grid points"),
        }
    } else {
        CheckResult {
            name: "y1_soundness",
            status: CheckStatus::Fail,
            detail: format!(
                "Y1 estimate exceeds the true yield at {y_viol}/{points} strict-coupling grid points, worst relative excess {y_excess:.3e} at L = {} km, mu' = {}; the discarded terms enter over a negative denominator, see bounds::y1_lower_bound",
                y_at.0, y_at.1
            ),
        }
    };
    let e1 = if e_viol == 0 {
        CheckResult {
            name: "e1_soundness",
            status: CheckStatus::Pass,
            detail: format!("e1 ceiling above the true error rate at all {points} grid points"),
        }
    } else {
        CheckResult {
            name: "e1_soundness",
            status: CheckStatus::Fail,
            detail: format!("e1 ceiling undercuts the truth at {e_viol}/{points} grid points, worst shortfall {e_short:.3e}"),
        }
    };
    (y1, e1)
}

fn check_fixed_mu(p: &SystemParams, specs: &[SchemeSpec]) -> Option<CheckResult> {
    let fixed: Vec<(&SchemeSpec, f64)> = specs
        .iter()
        .filter_map(|s| match s.mu_policy {
            MuPolicy::Fixed(mu) => Some((s, mu)),
            MuPolicy::Coupled(_) => None,
        })
        .collect();
    if fixed.is_empty() {
        return None;
    }
    let mut notes = Vec::new();
    let mut exceeded = false;
    for (spec, mu) in fixed {
        // scan the signal intensities such a scheme actually visits
        let mut worst: Option<f64> = None;
        for j in 1..=20 {
            let mu_prime = 0.05 * j as f64;
            if mu_prime <= mu {
                continue;
            }
            let ints = IntensitySet::new(mu, mu_prime).expect("mu < mu_prime by the guard above");
            if exceeds_strict_coupling(ints, p.eta_a) {
                worst = Some(mu_prime);
            }
        }
        match worst {
            Some(mp) => {
                exceeded = true;
                notes.push(format!(
                    "{}: fixed mu = {mu} exceeds the strict coupling bound for mu' <= {mp}{}",
                    spec.kind,
                    if spec.kind == crate::rate::SchemeKind::PreviousFixedMu {
                        " (its triggered-only estimator does not rely on the coupling)"
                    } else {
                        " (the coupled yield bound loses its guarantee there)"
                    }
                ));
            }
            None => notes.push(format!("{}: fixed mu = {mu} stays within the strict coupling", spec.kind)),
        }
    }
    Some(CheckResult {
        name: "fixed_mu_coupling",
        status: if exceeded {
            CheckStatus::Warn
        } else {
            CheckStatus::Pass
        },
        detail: notes.join("; "),
    })
}

/// Runs every self-check for one configuration. Callers pass validated
/// parameters; soundness always evaluates at the strict coupling, the
/// coefficient scan follows `a_policy`, and the forecasts follow
/// `convention` so a verbatim configuration shows its own numbers.
pub fn run_checks(
    p: &SystemParams,
    specs: &[SchemeSpec],
    a_policy: APolicy,
    convention: YieldConvention,
) -> Vec<CheckResult> {
    let mut results = vec![
        check_series(p),
        check_partition(p, convention),
        check_coefficients(p, a_policy),
    ];
    let (y1, e1) = check_soundness(p, convention);
    results.push(y1);
    results.push(e1);
    if let Some(r) = check_fixed_mu(p, specs) {
        results.push(r);
    }
    results
}
