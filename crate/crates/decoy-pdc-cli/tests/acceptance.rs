//! Acceptance gate: one test per numbered criterion. Each test prints a
//! single line with the measured quantity and its target before asserting,
//! so a red run shows exactly which number moved and by how much.

use std::process::Command;

use approx::assert_relative_eq;

use decoy_pdc::bounds::{coefficient_sign_check, estimate, mu_from_coupling};
use decoy_pdc::forecast::{error_n, forecast_observables, yield_n, YieldConvention};
use decoy_pdc::model::{at_least_one, photon_prob, trigger_prob};
use decoy_pdc::optimize::{find_inflexion, optimize_signal_intensity, sweep_distance};
use decoy_pdc::rate::evaluate_scheme;
use decoy_pdc::{
    APolicy, IntensitySet, MuPolicy, SchemeKind, SchemeSpec, SearchSettings, SweepRow,
    SystemParams,
};

const CONS: YieldConvention = YieldConvention::Consistent;

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

#[test]
fn criterion_1_rate_ratio_at_50_km() {
    let p = SystemParams::gys();
    let new_both = SchemeSpec {
        kind: SchemeKind::NewBoth,
        mu_policy: MuPolicy::Coupled(APolicy::Limit),
    };
    let previous = SchemeSpec {
        kind: SchemeKind::PreviousFixedMu,
        mu_policy: MuPolicy::Fixed(0.113),
    };
    let r_new = evaluate_scheme(&new_both, &p, 50.0, 0.255, CONS).unwrap();
    let r_prev = evaluate_scheme(&previous, &p, 50.0, 0.143, CONS).unwrap();
    assert!((r_new.intensities.mu - 0.113).abs() < 1e-3);
    let ratio = r_new.r_final / r_prev.r_final;
    let ok = (ratio - 3.8).abs() <= 0.15 * 3.8;
    println!(
        "criterion 1: {} - R(new_both, limit, mu' = 0.255) / R(previous, mu = 0.113, mu' = 0.143) \
         at 50 km = {ratio:.4}, target 3.8 +- 15%",
        verdict(ok)
    );
    assert!(ok);
}

#[test]
fn criterion_2_coupling_value() {
    let mu = mu_from_coupling(0.255, 0.5, APolicy::Limit);
    let ok = (mu - 0.113).abs() <= 0.001;
    println!(
        "criterion 2: {} - limit coupling at mu' = 0.255, eta_A = 0.5 gives mu = {mu:.6}, \
         target 0.113 +- 0.001",
        verdict(ok)
    );
    assert!(ok);
}

#[test]
fn criterion_3_optimal_signal_intensity() {
    let p = SystemParams::gys();
    let spec = SchemeSpec::for_kind(SchemeKind::NewBoth, APolicy::Limit);
    let out = optimize_signal_intensity(&spec, &p, 50.0, &SearchSettings::default(), CONS).unwrap();
    let ok = out.positive && (out.mu_prime - 0.255).abs() <= 0.02;
    println!(
        "criterion 3: {} - optimizer at 50 km (new_both, limit) returns mu' = {:.4}, \
         target 0.255 +- 0.02",
        verdict(ok),
        out.mu_prime
    );
    assert!(ok);
}

#[test]
fn criterion_4_crossover_distance() {
    let p = SystemParams::gys();
    let spec = SchemeSpec::for_kind(SchemeKind::NewBoth, APolicy::Limit);
    let grid: Vec<f64> = (0..=160).map(f64::from).collect();
    let rows = sweep_distance(&[spec], &p, &grid, &SearchSettings::default(), CONS).unwrap();
    let crossover = find_inflexion(&rows).expect("nontriggered stream shuts off inside the grid");
    let ok = (crossover - 134.0).abs() <= 6.0;
    println!(
        "criterion 4: {} - nontriggered stream stops contributing at {crossover:.1} km, \
         target 134 +- 6 km",
        verdict(ok)
    );
    assert!(ok);
}

#[test]
fn criterion_5_bound_soundness_under_strict_coupling() {
    let p = SystemParams::gys();
    let mut y1_violations = 0u32;
    let mut e1_violations = 0u32;
    let mut worst = (0.0f64, 0.0f64, 0.0f64);
    let mut points = 0u32;
    for l in (0..=14).map(|i| 10.0 * f64::from(i)) {
        let eta = p.transmittance_at(l);
        let y1_true = yield_n(eta, p.d_b, 1);
        let e1_true = error_n(eta, p.d_b, p.e_d, 1);
        for j in 1..=10 {
            let mu_prime = 0.05 * f64::from(j);
            let mu = mu_from_coupling(mu_prime, p.eta_a, APolicy::Strict);
            let ints = IntensitySet::new(mu, mu_prime).unwrap();
            let obs = forecast_observables(&p, l, ints, CONS);
            let est = estimate(&obs, &p, ints, Some(APolicy::Strict)).unwrap();
            points += 1;
            if est.y1_lower > y1_true * (1.0 + 1e-12) {
                y1_violations += 1;
                let excess = est.y1_lower / y1_true - 1.0;
                if excess > worst.0 {
                    worst = (excess, l, mu_prime);
                }
            }
            if est.e1_upper < e1_true * (1.0 - 1e-12) {
                e1_violations += 1;
            }
        }
    }
    let ok = y1_violations == 0 && e1_violations == 0;
    println!(
        "criterion 5: {} - Y1 floor above the true yield at {y1_violations}/{points} strict grid \
         points (worst +{:.3e} relative at L = {} km, mu' = {}); e1 ceiling unsound at \
         {e1_violations}/{points}",
        verdict(ok),
        worst.0,
        worst.1,
        worst.2
    );
    assert_eq!(
        (y1_violations, e1_violations),
        (0, 0),
        "the Y1 combination divides by a negative denominator at every coupled pair, so dropping \
         the nonpositive n >= 3 terms raises the estimate above the true yield instead of \
         lowering it (see bounds::y1_lower_bound); no coupling policy can satisfy this criterion"
    );
}

#[test]
fn criterion_6_coefficient_condition() {
    let mut checked = 0u32;
    for eta_a in [0.3, 0.5, 0.7] {
        for j in 1..=20 {
            let mu_prime = 0.05 * f64::from(j);
            let mu = mu_from_coupling(mu_prime, eta_a, APolicy::Strict);
            let ints = IntensitySet::new(mu, mu_prime).unwrap();
            let check = coefficient_sign_check(ints, eta_a, 200);
            assert!(
                check.all_nonpositive,
                "strict coupling violated at mu' = {mu_prime}, eta_A = {eta_a}, n = {:?}",
                check.first_violation
            );
            checked += 1;
        }
    }
    let loose = coefficient_sign_check(IntensitySet::new(0.1131, 0.255).unwrap(), 0.5, 200);
    let ok = loose.first_violation == Some(3);
    println!(
        "criterion 6: {} - strict coupling nonpositive at all {checked} (mu', eta_A) pairs; \
         (mu = 0.1131, mu' = 0.255, eta_A = 0.5) violates at n = {:?}",
        verdict(ok),
        loose.first_violation
    );
    assert!(ok);
}

// Independent copy of the defining photon-number sums, kept stable with
// at_least_one. Yields stay uncapped; on this grid d_B < (1-eta)^200 so
// the library's cap never binds and the closed forms mean exactly this.
mod series {
    use super::*;

    pub fn gain_t(p: &SystemParams, eta: f64, x: f64) -> f64 {
        let mut acc = p.d_a * p.d_b * photon_prob(x, 0);
        for n in 1..=200 {
            let y = p.d_b + at_least_one(eta, n);
            acc += photon_prob(x, n) * trigger_prob(p.eta_a, n) * y;
        }
        acc
    }

    pub fn gain_ut(p: &SystemParams, eta: f64, x: f64) -> f64 {
        let mut acc = (1.0 - p.d_a) * p.d_b * photon_prob(x, 0);
        for n in 1..=200 {
            let y = p.d_b + at_least_one(eta, n);
            acc += photon_prob(x, n) * (1.0 - trigger_prob(p.eta_a, n)) * y;
        }
        acc
    }

    pub fn err_t(p: &SystemParams, eta: f64, x: f64) -> f64 {
        let mut acc = 0.5 * p.d_b * p.d_a * photon_prob(x, 0);
        for n in 1..=200 {
            let e = 0.5 * p.d_b + p.e_d * at_least_one(eta, n);
            acc += photon_prob(x, n) * trigger_prob(p.eta_a, n) * e;
        }
        acc
    }

    pub fn err_ut(p: &SystemParams, eta: f64, x: f64) -> f64 {
        let mut acc = 0.5 * p.d_b * (1.0 - p.d_a) * photon_prob(x, 0);
        for n in 1..=200 {
            let e = 0.5 * p.d_b + p.e_d * at_least_one(eta, n);
            acc += photon_prob(x, n) * (1.0 - trigger_prob(p.eta_a, n)) * e;
        }
        acc
    }
}

#[test]
fn criterion_7_closed_forms_match_series_oracle() {
    let p = SystemParams::gys();
    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
    let mut worst = 0.0f64;
    let mut compared = 0u32;
    for l in (0..=6).map(|i| 25.0 * f64::from(i)) {
        let eta = p.transmittance_at(l);
        for j in 1..=10 {
            let mu_prime = 0.05 * f64::from(j);
            let mu = mu_from_coupling(mu_prime, p.eta_a, APolicy::Strict);
            let ints = IntensitySet::new(mu, mu_prime).unwrap();
            let obs = forecast_observables(&p, l, ints, CONS);
            for row in [obs.vacuum, obs.decoy, obs.signal] {
                let q_t = series::gain_t(&p, eta, row.x);
                let q_ut = series::gain_ut(&p, eta, row.x);
                for dev in [
                    rel(row.q_t, q_t),
                    rel(row.q_ut, q_ut),
                    rel(row.e_t, series::err_t(&p, eta, row.x) / q_t),
                    rel(row.e_ut, series::err_ut(&p, eta, row.x) / q_ut),
                ] {
                    worst = worst.max(dev);
                    compared += 1;
                }
            }
        }
    }
    let ok = worst <= 1e-12;
    println!(
        "criterion 7: {} - closed forms vs 200-term series across {compared} observable values: \
         worst relative deviation {worst:.3e}, tolerance 1e-12",
        verdict(ok)
    );
    assert!(ok);
}

#[test]
fn criterion_8_scheme_ordering_and_recorded_curves() {
    let p = SystemParams::gys();
    let specs = [
        SchemeSpec::for_kind(SchemeKind::Ideal, APolicy::Strict),
        SchemeSpec::for_kind(SchemeKind::NewBoth, APolicy::Strict),
        SchemeSpec::for_kind(SchemeKind::NewTriggered, APolicy::Strict),
        SchemeSpec::for_kind(SchemeKind::PreviousFixedMu, APolicy::Strict),
    ];
    let grid: Vec<f64> = (0..=32).map(|i| 5.0 * f64::from(i)).collect();
    let rows = sweep_distance(&specs, &p, &grid, &SearchSettings::default(), CONS).unwrap();
    let per = |kind: SchemeKind| -> Vec<&SweepRow> {
        rows.iter().filter(|r| r.scheme == kind).collect()
    };
    let (ideal, both, trig, prev) = (
        per(SchemeKind::Ideal),
        per(SchemeKind::NewBoth),
        per(SchemeKind::NewTriggered),
        per(SchemeKind::PreviousFixedMu),
    );

    let mut ordered_points = 0u32;
    for i in 0..grid.len() {
        let all_positive =
            ideal[i].positive && both[i].positive && trig[i].positive && prev[i].positive;
        if !all_positive {
            continue;
        }
        let slack = 1.0 - 1e-9;
        assert!(ideal[i].r_final >= both[i].r_final * slack, "L = {}", grid[i]);
        assert!(both[i].r_final >= trig[i].r_final * slack, "L = {}", grid[i]);
        if both[i].nontriggered_active {
            assert!(both[i].r_final > trig[i].r_final, "L = {}", grid[i]);
        }
        assert!(both[i].r_final >= prev[i].r_final * slack, "L = {}", grid[i]);
        ordered_points += 1;
    }

    // curve-shape fixtures recorded from this implementation's own sweep;
    // they pin the optimizer trajectory, not externally given values
    let fixtures: [(SchemeKind, f64, f64, f64); 12] = [
        (SchemeKind::Ideal, 0.0, 0.303731, 1.456456175e-3),
        (SchemeKind::Ideal, 50.0, 0.296656, 1.260026019e-4),
        (SchemeKind::Ideal, 100.0, 0.288823, 9.409369189e-6),
        (SchemeKind::NewBoth, 0.0, 0.294846, 1.401904166e-3),
        (SchemeKind::NewBoth, 50.0, 0.287933, 1.211877432e-4),
        (SchemeKind::NewBoth, 100.0, 0.279675, 8.984973232e-6),
        (SchemeKind::NewTriggered, 0.0, 0.215805, 5.550306383e-4),
        (SchemeKind::NewTriggered, 50.0, 0.210364, 4.836041417e-5),
        (SchemeKind::NewTriggered, 100.0, 0.201579, 4.004546680e-6),
        (SchemeKind::PreviousFixedMu, 0.0, 0.148196, 3.646987451e-4),
        (SchemeKind::PreviousFixedMu, 50.0, 0.143243, 3.139005486e-5),
        (SchemeKind::PreviousFixedMu, 100.0, 0.136857, 2.573557349e-6),
    ];
    for (kind, l, mu_prime_opt, r_final) in fixtures {
        let row = rows
            .iter()
            .find(|r| r.scheme == kind && r.l_km == l)
            .unwrap();
        assert_relative_eq!(row.mu_prime_opt, mu_prime_opt, max_relative = 1e-4);
        assert_relative_eq!(row.r_final, r_final, max_relative = 1e-6);
    }

    println!(
        "criterion 8: PASS - ideal >= new_both >= new_triggered and new_both >= previous at all \
         {ordered_points} distances where every scheme is positive; 12 recorded curve points \
         reproduced"
    );
}

#[test]
fn criterion_9_sweep_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_decoy-pdc"))
            .args(["sweep", "--out"])
            .arg(&path)
            .status()
            .unwrap();
        assert!(status.success());
        std::fs::read(&path).unwrap()
    };
    let first = run("a.csv");
    let second = run("b.csv");
    let ok = first == second && !first.is_empty();
    println!(
        "criterion 9: {} - two default-config sweep runs wrote {} bytes each, byte-identical: {}",
        verdict(ok),
        first.len(),
        first == second
    );
    assert!(ok);
}
