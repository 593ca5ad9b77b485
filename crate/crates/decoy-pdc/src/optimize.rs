//! Signal-intensity optimization per distance, distance sweeps across
//! schemes, and the curve features read off the sweeps (inflexion point,
//! maximum reach).
//!
//! Everything here is deterministic: the coarse scan walks a fixed grid,
//! golden-section refinement uses a fixed contraction, and sweep rows are
//! evaluated independently and collected in input order. Two runs with the
//! same inputs produce bit-identical output, parallel or not.

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::forecast::YieldConvention;
use crate::model::SystemParams;
use crate::rate::{evaluate_scheme, MuPolicy, SchemeKind, SchemeSpec};
use crate::{Error, Result};

/// Search domain and stopping controls for the per-distance optimizer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SearchSettings {
    pub lo: f64,
    pub hi: f64,
    pub coarse_step: f64,
    pub tol: f64,
}

impl Default for SearchSettings {
    fn default() -> Self {
        Self {
            lo: 0.01,
            hi: 2.0,
            coarse_step: 0.01,
            tol: 1e-4,
        }
    }
}

impl SearchSettings {
    pub fn validate(&self) -> Result<()> {
        let ok = self.lo > 0.0
            && self.hi > self.lo
            && self.coarse_step > 0.0
            && self.tol > 0.0
            && [self.lo, self.hi, self.coarse_step, self.tol]
                .iter()
                .all(|v| v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(Error::Param {
                name: "search",
                reason: "need 0 < lo < hi and positive coarse_step and tol".to_string(),
            })
        }
    }
}

/// Result of one per-distance optimization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimizeOutcome {
    pub mu_prime: f64,
    /// Raw optimal rate; 0 when `positive` is false.
    pub r_final: f64,
    /// False when the rate is non-positive over the whole domain.
    pub positive: bool,
}

/// One optimized sweep entry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub l_km: f64,
    pub scheme: SchemeKind,
    pub mu_prime_opt: f64,
    pub mu: f64,
    pub r_t: f64,
    pub r_both: f64,
    pub r_final: f64,
    /// The nontriggered stream adds key here (r_both > r_t).
    pub nontriggered_active: bool,
    /// False when no positive rate exists at this distance.
    pub positive: bool,
}

/// Golden-section maximization on [a, b]. Ties contract toward the left,
/// so equal plateaus resolve to the smaller argument.
fn golden_max(
    f: &mut dyn FnMut(f64) -> Result<f64>,
    mut a: f64,
    mut b: f64,
    tol: f64,
) -> Result<(f64, f64)> {
    const INVPHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INVPHI * (b - a);
    let mut d = a + INVPHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INVPHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INVPHI * (b - a);
            fd = f(d)?;
        }
    }
    let x = 0.5 * (a + b);
    Ok((x, f(x)?))
}

/// Optimal signal intensity at one distance: a coarse scan over the whole
/// domain locates the basin (the rate is unimodal in mu', which the scan
/// audits for free), golden-section refinement narrows it to `tol`. Ties
/// break toward smaller mu'. When no grid point is positive the outcome
/// carries `positive: false` and the domain's low edge.
pub fn optimize_signal_intensity(
    spec: &SchemeSpec,
    p: &SystemParams,
    l_km: f64,
    search: &SearchSettings,
    convention: YieldConvention,
) -> Result<OptimizeOutcome> {
    search.validate()?;
    let mut lo = search.lo;
    let hi = search.hi;
    if let MuPolicy::Fixed(mu) = spec.mu_policy {
        // keep the search domain clear of the mu < mu' boundary
        lo = lo.max(mu + search.tol.max(1e-6));
        if lo >= hi {
            return Err(Error::Intensities {
                mu,
                mu_prime: hi,
                reason: "fixed decoy intensity leaves no room in the search domain",
            });
        }
    }
    let mut eval =
        |mu_prime: f64| -> Result<f64> { Ok(evaluate_scheme(spec, p, l_km, mu_prime, convention)?.r_final) };

    let steps = ((hi - lo) / search.coarse_step).ceil() as usize;
    let mut best_x = lo;
    let mut best_r = eval(lo)?;
    for i in 1..=steps {
        let x = (lo + i as f64 * search.coarse_step).min(hi);
        let r = eval(x)?;
        if r > best_r {
            best_r = r;
            best_x = x;
        }
    }

    let a = (best_x - search.coarse_step).max(lo);
    let b = (best_x + search.coarse_step).min(hi);
    let (x, r) = golden_max(&mut eval, a, b, search.tol)?;
    // refinement never loses to the coarse winner
    let (x, r) = if r >= best_r { (x, r) } else { (best_x, best_r) };

    if r > 0.0 {
        Ok(OptimizeOutcome {
            mu_prime: x,
            r_final: r,
            positive: true,
        })
    } else {
        Ok(OptimizeOutcome {
            mu_prime: lo,
            r_final: 0.0,
            positive: false,
        })
    }
}

fn sweep_row(
    spec: &SchemeSpec,
    p: &SystemParams,
    l_km: f64,
    search: &SearchSettings,
    convention: YieldConvention,
) -> Result<SweepRow> {
    let opt = optimize_signal_intensity(spec, p, l_km, search, convention)?;
    let kr = evaluate_scheme(spec, p, l_km, opt.mu_prime, convention)?;
    Ok(SweepRow {
        l_km,
        scheme: spec.kind,
        mu_prime_opt: opt.mu_prime,
        mu: kr.intensities.mu,
        r_t: kr.r_t,
        r_both: kr.r_both,
        r_final: kr.r_final,
        nontriggered_active: kr.r_both > kr.r_t,
        positive: opt.positive,
    })
}

/// One optimized row per (scheme, distance), schemes in input order and
/// distances ascending within each scheme. Rows are independent; with the
/// `parallel` feature they are evaluated across threads and collected in
/// input order, so output is identical to the serial path.
pub fn sweep_distance(
    specs: &[SchemeSpec],
    p: &SystemParams,
    grid: &[f64],
    search: &SearchSettings,
    convention: YieldConvention,
) -> Result<Vec<SweepRow>> {
    #[cfg(feature = "parallel")]
    {
        let mut rows = Vec::with_capacity(specs.len() * grid.len());
        for spec in specs {
            let per: Result<Vec<SweepRow>> = grid
                .par_iter()
                .map(|&l| sweep_row(spec, p, l, search, convention))
                .collect();
            rows.extend(per?);
        }
        Ok(rows)
    }
    #[cfg(not(feature = "parallel"))]
    {
        sweep_distance_serial(specs, p, grid, search, convention)
    }
}

/// Single-threaded sweep, always available; the baseline the bench suite
/// compares the parallel path against.
pub fn sweep_distance_serial(
    specs: &[SchemeSpec],
    p: &SystemParams,
    grid: &[f64],
    search: &SearchSettings,
    convention: YieldConvention,
) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::with_capacity(specs.len() * grid.len());
    for spec in specs {
        for &l in grid {
            rows.push(sweep_row(spec, p, l, search, convention)?);
        }
    }
    Ok(rows)
}

/// Distance where the nontriggered stream stops adding key, interpolated
/// on r_both - r_t between the last active row and the first inactive one.
/// `None` when the rows contain no such transition.
pub fn find_inflexion(rows: &[SweepRow]) -> Option<f64> {
    let both: Vec<&SweepRow> = rows
        .iter()
        .filter(|r| r.scheme == SchemeKind::NewBoth)
        .collect();
    for w in both.windows(2) {
        let (a, b) = (w[0], w[1]);
        if a.nontriggered_active && !b.nontriggered_active {
            let da = a.r_both - a.r_t;
            let db = b.r_both - b.r_t;
            if da - db > 0.0 {
                return Some(a.l_km + (b.l_km - a.l_km) * da / (da - db));
            }
            return Some(b.l_km);
        }
    }
    None
}

/// Largest distance with a positive optimized rate, bisected to
/// `precision_km`. Errors when the rate is non-positive already at zero
/// distance.
pub fn max_distance(
    spec: &SchemeSpec,
    p: &SystemParams,
    precision_km: f64,
    search: &SearchSettings,
    convention: YieldConvention,
) -> Result<f64> {
    assert!(precision_km > 0.0);
    let rate_at = |l: f64| -> Result<bool> {
        Ok(optimize_signal_intensity(spec, p, l, search, convention)?.positive)
    };
    if !rate_at(0.0)? {
        return Err(Error::NoPositiveRate);
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    while rate_at(hi)? {
        lo = hi;
        hi *= 2.0;
        if hi > 16384.0 {
            return Err(Error::Param {
                name: "max_distance",
                reason: "rate still positive beyond 16384 km; channel model unphysical".to_string(),
            });
        }
    }
    while hi - lo > precision_km {
        let mid = 0.5 * (lo + hi);
        if rate_at(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
