//! Randomized invariants over the parameter domain the fixed-grid tests
//! cannot cover.

use decoy_pdc::forecast::{
    gain_nontriggered, gain_triggered, qber_nontriggered_numerator, qber_triggered_numerator,
    YieldConvention,
};
use decoy_pdc::model::{at_least_one, photon_prob, trigger_prob};
use decoy_pdc::{APolicy, IntensitySet, SystemParams};
use proptest::prelude::*;

// 200-term photon-number sums against the model definitions, survival
// brackets through at_least_one so the oracle keeps full precision at
// long fibre lengths. Yields stay uncapped: on this domain d_B is below
// (1-eta)^200, so the cap in the library's yield_n never binds and the
// closed forms represent exactly this sum.
fn gain_t_series(p: &SystemParams, eta: f64, x: f64) -> f64 {
    let mut acc = p.d_a * p.d_b * photon_prob(x, 0);
    for n in 1..=200 {
        let y = p.d_b + at_least_one(eta, n);
        acc += photon_prob(x, n) * trigger_prob(p.eta_a, n) * y;
    }
    acc
}

fn gain_ut_series(p: &SystemParams, eta: f64, x: f64, convention: YieldConvention) -> f64 {
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

fn err_t_series(p: &SystemParams, eta: f64, x: f64) -> f64 {
    let mut acc = 0.5 * p.d_b * p.d_a * photon_prob(x, 0);
    for n in 1..=200 {
        let signal = at_least_one(eta, n);
        acc += photon_prob(x, n) * trigger_prob(p.eta_a, n) * (0.5 * p.d_b + p.e_d * signal);
    }
    acc
}

fn err_ut_series(p: &SystemParams, eta: f64, x: f64) -> f64 {
    let mut acc = 0.5 * p.d_b * (1.0 - p.d_a) * photon_prob(x, 0);
    for n in 1..=200 {
        let signal = at_least_one(eta, n);
        acc += photon_prob(x, n)
            * (1.0 - trigger_prob(p.eta_a, n))
            * (0.5 * p.d_b + p.e_d * signal);
    }
    acc
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // The telescoped closed forms must track the defining sums everywhere
    // in the operating domain, not just on the reference grid: random heralding
    // efficiency, intensity and fibre length.
    #[test]
    fn closed_forms_track_defining_sums(
        eta_a in 0.05f64..0.95,
        x in 0.01f64..2.0,
        l_km in 0.0f64..200.0,
    ) {
        let mut p = SystemParams::gys();
        p.eta_a = eta_a;
        let eta = p.transmittance_at(l_km);

        prop_assert!(rel(gain_triggered(&p, eta, x), gain_t_series(&p, eta, x)) <= 1e-12);
        for conv in [YieldConvention::Consistent, YieldConvention::Verbatim] {
            prop_assert!(
                rel(gain_nontriggered(&p, eta, x, conv), gain_ut_series(&p, eta, x, conv)) <= 1e-12
            );
        }
        prop_assert!(rel(qber_triggered_numerator(&p, eta, x), err_t_series(&p, eta, x)) <= 1e-12);
        prop_assert!(
            rel(qber_nontriggered_numerator(&p, eta, x), err_ut_series(&p, eta, x)) <= 1e-12
        );
    }

    // The strict coupling must always produce an admissible decoy intensity:
    // below the signal, and with every discarded combination coefficient
    // nonpositive so the yield bound keeps its direction.
    #[test]
    fn strict_coupling_is_always_admissible(
        eta_a in 0.05f64..0.95,
        mu_prime in 0.01f64..1.5,
    ) {
        let mu = decoy_pdc::bounds::mu_from_coupling(mu_prime, eta_a, APolicy::Strict);
        prop_assert!(mu > 0.0 && mu < mu_prime);

        let ints = IntensitySet::new(mu, mu_prime).unwrap();
        prop_assert!(!decoy_pdc::bounds::exceeds_strict_coupling(ints, eta_a));
        let check = decoy_pdc::bounds::coefficient_sign_check(ints, eta_a, 200);
        prop_assert!(check.all_nonpositive, "violation at n = {:?}", check.first_violation);
    }
}
