//! Result rendering. CSV layouts are fixed contracts: '.' decimal, no
//! thousands separators, rates in scientific notation with 10 significant
//! digits, intensities with 6 decimals. Rows print in the order they were
//! computed, so identical configs yield byte-identical files.

use std::fmt::Write as _;

use serde::Serialize;

use decoy_pdc::{CheckResult, KeyRateResult, ObservableSet, SchemeKind, SweepRow};

/// Rate formatting: scientific, 10 significant digits, clamped at zero.
/// Negative internal values mean "no key" in every report.
pub fn fmt_rate(r: f64) -> String {
    format!("{:.9e}", r.max(0.0))
}

pub const SWEEP_HEADER: &str = "L_km,scheme,mu_prime_opt,mu,R_t,R_both,R_final,nontriggered_active";

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        writeln!(
            out,
            "{},{},{:.6},{:.6},{},{},{},{}",
            r.l_km,
            r.scheme,
            r.mu_prime_opt,
            r.mu,
            fmt_rate(r.r_t),
            fmt_rate(r.r_both),
            fmt_rate(r.r_final),
            r.nontriggered_active
        )
        .expect("writing to a String cannot fail");
    }
    out
}

/// Elementwise rate ratio between two sweeps over the same grid.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CompareRow {
    pub l_km: f64,
    pub r_final_a: f64,
    pub r_final_b: f64,
    /// `None` where either rate is zero; CSV prints the marker `undefined`.
    pub ratio: Option<f64>,
}

pub fn compare_rows(a: &[SweepRow], b: &[SweepRow]) -> Vec<CompareRow> {
    assert_eq!(a.len(), b.len(), "compared sweeps ran different grids");
    a.iter()
        .zip(b)
        .map(|(ra, rb)| {
            debug_assert_eq!(ra.l_km, rb.l_km);
            let fa = ra.r_final.max(0.0);
            let fb = rb.r_final.max(0.0);
            CompareRow {
                l_km: ra.l_km,
                r_final_a: fa,
                r_final_b: fb,
                ratio: (fa > 0.0 && fb > 0.0).then(|| fa / fb),
            }
        })
        .collect()
}

pub fn compare_csv(scheme_a: SchemeKind, scheme_b: SchemeKind, rows: &[CompareRow]) -> String {
    let mut out = String::from("L_km,scheme_a,scheme_b,R_final_a,R_final_b,ratio\n");
    for r in rows {
        let ratio = match r.ratio {
            Some(q) => format!("{q:.6}"),
            None => "undefined".to_string(),
        };
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.l_km,
            scheme_a,
            scheme_b,
            fmt_rate(r.r_final_a),
            fmt_rate(r.r_final_b),
            ratio
        )
        .expect("writing to a String cannot fail");
    }
    out
}

pub fn to_json<T: Serialize>(rows: &T) -> String {
    let mut text = serde_json::to_string_pretty(rows).expect("rows serialize");
    text.push('\n');
    text
}

/// Full pipeline dump at one operating point, one aligned name-value line
/// per quantity. The main debugging surface.
pub fn point_report(l_km: f64, obs: &ObservableSet, result: &KeyRateResult) -> String {
    let mut out = String::new();
    let mut line = |name: &str, value: String| {
        writeln!(out, "{name:<16}{value}").expect("writing to a String cannot fail");
    };
    line("scheme", result.scheme.to_string());
    line("L_km", format!("{l_km}"));
    line("mu", format!("{:.6}", result.intensities.mu));
    line("mu_prime", format!("{:.6}", result.intensities.mu_prime));
    line("eta", format!("{:.9e}", obs.eta));
    for (label, row) in [
        ("vacuum", &obs.vacuum),
        ("decoy", &obs.decoy),
        ("signal", &obs.signal),
    ] {
        line(&format!("Q_t[{label}]"), format!("{:.9e}", row.q_t));
        line(&format!("Q_ut[{label}]"), format!("{:.9e}", row.q_ut));
        line(&format!("E_t[{label}]"), format!("{:.6}", row.e_t));
        line(&format!("E_ut[{label}]"), format!("{:.6}", row.e_ut));
    }
    if let Some(est) = &result.estimates {
        let opt = |v: Option<f64>| match v {
            Some(v) => format!("{v:.6}"),
            None => "-".to_string(),
        };
        line("Y0", format!("{:.9e}", est.y0));
        line("Y1_lower", format!("{:.9e}", est.y1_lower));
        line("Q1_t", format!("{:.9e}", est.q1_t));
        line("Q1_ut", format!("{:.9e}", est.q1_ut));
        line("e1_upper", format!("{:.6}", est.e1_upper));
        line("e_a", opt(est.e_a));
        line("e_b", opt(est.e_b));
        line("a_used", opt(est.a_used));
    }
    line("R_t", fmt_rate(result.r_t));
    line("R_both", fmt_rate(result.r_both));
    line("R_final", fmt_rate(result.r_final));
    out
}

/// One line per check: name, status, detail.
pub fn verify_table(results: &[CheckResult]) -> String {
    let mut out = String::new();
    for r in results {
        writeln!(out, "{:<28}{:<10}{}", r.name, r.status.label(), r.detail)
            .expect("writing to a String cannot fail");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(l_km: f64, r_final: f64) -> SweepRow {
        SweepRow {
            l_km,
            scheme: SchemeKind::NewBoth,
            mu_prime_opt: 0.255,
            mu: 0.113082,
            r_t: 0.4 * r_final,
            r_both: r_final,
            r_final,
            nontriggered_active: r_final > 0.0,
            positive: r_final > 0.0,
        }
    }

    #[test]
    fn rates_print_ten_significant_digits_clamped() {
        assert_eq!(fmt_rate(1.1276637365331656e-4), "1.127663737e-4");
        assert_eq!(fmt_rate(-3.0e-7), "0.000000000e0");
        assert_eq!(fmt_rate(0.0), "0.000000000e0");
    }

    #[test]
    fn sweep_csv_layout_is_fixed() {
        let text = sweep_csv(&[row(50.0, 1.1276637365331656e-4)]);
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "L_km,scheme,mu_prime_opt,mu,R_t,R_both,R_final,nontriggered_active"
        );
        assert_eq!(
            lines.next().unwrap(),
            "50,new_both,0.255000,0.113082,4.510654946e-5,1.127663737e-4,1.127663737e-4,true"
        );
        assert_eq!(lines.next(), None);
    }

    #[test]
    fn compare_marks_dead_rows_undefined() {
        let a = [row(120.0, 2.0e-6), row(130.0, 1.0e-6)];
        let b = [row(120.0, 1.0e-6), row(130.0, -4.0e-8)];
        let rows = compare_rows(&a, &b);
        assert_eq!(rows[0].ratio, Some(2.0));
        assert_eq!(rows[1].ratio, None);
        let text = compare_csv(SchemeKind::NewBoth, SchemeKind::PreviousFixedMu, &rows);
        assert!(text.lines().nth(2).unwrap().ends_with(",undefined"));
    }
}
