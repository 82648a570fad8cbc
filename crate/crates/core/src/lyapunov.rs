//! Numerical counterpart of the Lyapunov argument.
//!
//! `V = ½ ε² + (bm / 2φ) |D − D*|²` is evaluated along a logged run. `D*` is
//! not known in closed form, so it is obtained here by a least-squares fit of
//! the dead-zone residual onto the fuzzy basis over a dense grid. The fit
//! cannot be exact, which turns `V̇ = −κ ε²` into
//! `V̇ = −κ ε² + bm ε e ≤ (bm e)² / 4κ` with `e` the representation error;
//! that bound is the growth budget reported by [`OracleFit::growth_budget`].

use nalgebra::{DMatrix, DVector};

use crate::controller::ControllerGains;
use crate::deadzone::DeadZoneParams;
use crate::error::{invalid, Result};
use crate::fuzzy::FuzzyPartition;
use crate::sim::SimRecord;

/// Grid used when fitting `D*` unless the caller picks another.
pub const DEFAULT_GRID: (f64, f64, usize) = (-1.5, 1.5, 6001);

/// Least-squares rule outputs and their fit diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleFit {
    pub rule_outputs: Vec<f64>,
    /// RMS of `d̂*(û) − d(û)` over the grid.
    pub rms_fit_error: f64,
    /// Largest `|d̂*(û) − d(û)|` over the grid.
    pub max_fit_error: f64,
    /// Largest distance between `d̂*(û)` and the residual at the input that
    /// reproduces `υ = m û` exactly; the jump of that residual at `û = 0`
    /// is what the continuous fuzzy output cannot follow.
    pub compensation_mismatch: f64,
}

impl OracleFit {
    /// Upper bound on the growth of `V` over `window` seconds.
    pub fn growth_budget(&self, gains: &ControllerGains, window: f64) -> f64 {
        let bm = gains.bm();
        (bm * self.compensation_mismatch).powi(2) / (4.0 * gains.kappa) * window
    }
}

/// Residual at the control that makes the actuator output exactly `m û`.
fn compensating_residual(dz: &DeadZoneParams, uhat: f64) -> f64 {
    if uhat > 0.0 {
        dz.delta_r()
    } else if uhat < 0.0 {
        dz.delta_l()
    } else {
        0.0
    }
}

/// Fits `D*` so that `D*ᵀ Ψ(û) ≈ d(û)` on `count` points of `[lo, hi]`.
pub fn fit_rule_outputs(
    partition: &FuzzyPartition,
    dz: &DeadZoneParams,
    grid: (f64, f64, usize),
) -> Result<OracleFit> {
    let (lo, hi, count) = grid;
    if !(lo < hi) || count < partition.len() {
        return Err(invalid("grid", "need lo < hi and at least one point per rule"));
    }
    let n = partition.len();
    let points: Vec<f64> = (0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .collect();
    let mut a = DMatrix::<f64>::zeros(count, n);
    let mut y = DVector::<f64>::zeros(count);
    for (i, &u) in points.iter().enumerate() {
        for (j, p) in partition.basis(u)?.into_iter().enumerate() {
            a[(i, j)] = p;
        }
        y[i] = dz.residual(u)?;
    }
    let dstar = a
        .clone()
        .svd(true, true)
        .solve(&y, 1e-12)
        .map_err(|e| invalid("grid", e.to_string()))?;
    let fitted = &a * &dstar;

    let mut sq = 0.0;
    let mut max_fit: f64 = 0.0;
    let mut mismatch: f64 = 0.0;
    for (i, &u) in points.iter().enumerate() {
        let e = fitted[i] - y[i];
        sq += e * e;
        max_fit = max_fit.max(e.abs());
        mismatch = mismatch.max((fitted[i] - compensating_residual(dz, u)).abs());
    }
    Ok(OracleFit {
        rule_outputs: dstar.iter().copied().collect(),
        rms_fit_error: (sq / count as f64).sqrt(),
        max_fit_error: max_fit,
        compensation_mismatch: mismatch,
    })
}

/// `V = ½ ε² + (bm / 2φ) |D − D*|²`.
pub fn surrogate(epsilon: f64, rule_outputs: &[f64], dstar: &[f64], gains: &ControllerGains) -> Result<f64> {
    if !(gains.phi > 0.0) {
        return Err(invalid("phi", "the surrogate needs a positive adaptation rate"));
    }
    if rule_outputs.len() != dstar.len() {
        return Err(crate::Error::LengthMismatch {
            what: "rule outputs",
            expected: dstar.len(),
            got: rule_outputs.len(),
        });
    }
    let dist: f64 = rule_outputs
        .iter()
        .zip(dstar)
        .map(|(d, s)| (d - s) * (d - s))
        .sum();
    Ok(0.5 * epsilon * epsilon + gains.bm() / (2.0 * gains.phi) * dist)
}

/// `V` at every record. Records must carry rule-output snapshots.
pub fn surrogate_series(records: &[SimRecord], dstar: &[f64], gains: &ControllerGains) -> Result<Vec<f64>> {
    records
        .iter()
        .map(|r| {
            let d = r
                .rule_outputs
                .as_deref()
                .ok_or_else(|| invalid("log_dhat", "records carry no rule-output snapshots"))?;
            surrogate(r.epsilon, d, dstar, gains)
        })
        .collect()
}

/// Largest `v[i + lag] − v[i]` and the index `i` where it occurs.
pub fn max_net_increase(values: &[f64], lag: usize) -> Option<(f64, usize)> {
    if lag == 0 || values.len() <= lag {
        return None;
    }
    values
        .windows(lag + 1)
        .enumerate()
        .map(|(i, w)| (w[lag] - w[0], i))
        .fold(None, |best, cur| match best {
            Some((b, _)) if b >= cur.0 => best,
            _ => Some(cur),
        })
}

/// `κ ∫ ε² dt` by the rectangle rule at the sample period `dt`.
pub fn dissipation(records: &[SimRecord], kappa: f64, dt: f64) -> f64 {
    kappa * records.iter().map(|r| r.epsilon * r.epsilon).sum::<f64>() * dt
}
