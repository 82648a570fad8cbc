//! Summary statistics over closed-loop logs.

use crate::sim::SimRecord;

fn in_window(r: &SimRecord, t0: f64, t1: f64) -> bool {
    r.t >= t0 && r.t <= t1
}

/// RMS of the position error `x̃` over `t0 <= t <= t1`; NaN if the window is empty.
pub fn rms_tracking_error(records: &[SimRecord], t0: f64, t1: f64) -> f64 {
    let (sum, count) = records
        .iter()
        .filter(|r| in_window(r, t0, t1))
        .fold((0.0, 0usize), |(s, c), r| (s + r.xtilde[0] * r.xtilde[0], c + 1));
    if count == 0 {
        f64::NAN
    } else {
        (sum / count as f64).sqrt()
    }
}

/// Largest `|x̃|` over `t0 <= t <= t1`; NaN if the window is empty.
pub fn max_abs_tracking_error(records: &[SimRecord], t0: f64, t1: f64) -> f64 {
    max_abs(records.iter().filter(|r| in_window(r, t0, t1)).map(|r| r.xtilde[0]))
}

pub fn max_abs_epsilon(records: &[SimRecord]) -> f64 {
    max_abs(records.iter().map(|r| r.epsilon))
}

pub fn max_abs_control(records: &[SimRecord]) -> f64 {
    max_abs(records.iter().map(|r| r.u))
}

fn max_abs(values: impl Iterator<Item = f64>) -> f64 {
    values.map(f64::abs).fold(f64::NAN, f64::max)
}

/// Peak `|ε|` in the first and in the last quarter of the log.
pub fn epsilon_quarters(records: &[SimRecord]) -> (f64, f64) {
    let q = records.len() / 4;
    if q == 0 {
        return (f64::NAN, f64::NAN);
    }
    let first = max_abs(records[..q].iter().map(|r| r.epsilon));
    let last = max_abs(records[records.len() - q..].iter().map(|r| r.epsilon));
    (first, last)
}

/// Late `|ε|` below 10% of its early peak.
pub fn epsilon_converged(records: &[SimRecord]) -> bool {
    let (first, last) = epsilon_quarters(records);
    last < 0.1 * first
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(t: f64, e: f64, eps: f64) -> SimRecord {
        SimRecord {
            t,
            state: vec![0.0, 0.0],
            x_d: vec![0.0, 0.0],
            xtilde: vec![e, 0.0],
            epsilon: eps,
            uhat: 0.0,
            u: -2.0 * e,
            upsilon: 0.0,
            d_true: 0.0,
            dhat: 0.0,
            rule_outputs: None,
        }
    }

    #[test]
    fn windows() {
        let rs: Vec<_> = (0..8).map(|k| rec(k as f64, if k < 4 { 3.0 } else { -4.0 }, 1.0)).collect();
        assert_eq!(rms_tracking_error(&rs, 0.0, 3.0), 3.0);
        assert_eq!(rms_tracking_error(&rs, 4.0, 7.0), 4.0);
        assert!(rms_tracking_error(&rs, 20.0, 30.0).is_nan());
        assert_eq!(max_abs_tracking_error(&rs, 0.0, 7.0), 4.0);
        assert_eq!(max_abs_control(&rs), 8.0);
    }

    #[test]
    fn epsilon_convergence() {
        let mut rs: Vec<_> = (0..8).map(|k| rec(k as f64, 0.0, 1.0)).collect();
        assert!(!epsilon_converged(&rs));
        rs[6].epsilon = 0.05;
        rs[7].epsilon = -0.09;
        assert!(epsilon_converged(&rs));
        assert!(!epsilon_converged(&rs[..2]));
    }
}
