//! Non-symmetric dead-zone actuator with equal slopes on both sides.
//!
//! The actuator output is
//!
//! ```text
//!        ⎧ m (u − δl)   u ≤ δl
//!   υ =  ⎨ 0            δl < u < δr
//!        ⎩ m (u − δr)   u ≥ δr
//! ```
//!
//! which can be rewritten as `υ = m (u − d(u))` where the residual `d(u)` is
//! the clamp of `u` to the band `[δl, δr]`.

use crate::error::{finite, invalid, Result};

/// Slope and band edges of a dead-zone. Validated on construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeadZoneParams {
    m: f64,
    delta_l: f64,
    delta_r: f64,
}

impl DeadZoneParams {
    pub fn new(m: f64, delta_l: f64, delta_r: f64) -> Result<Self> {
        if !(m.is_finite() && m > 0.0) {
            return Err(invalid("m", format!("slope must be finite and > 0, got {m}")));
        }
        if !(delta_l.is_finite() && delta_l < 0.0) {
            return Err(invalid(
                "delta_l",
                format!("left band edge must be finite and < 0, got {delta_l}"),
            ));
        }
        if !(delta_r.is_finite() && delta_r > 0.0) {
            return Err(invalid(
                "delta_r",
                format!("right band edge must be finite and > 0, got {delta_r}"),
            ));
        }
        Ok(Self {
            m,
            delta_l,
            delta_r,
        })
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn delta_l(&self) -> f64 {
        self.delta_l
    }

    pub fn delta_r(&self) -> f64 {
        self.delta_r
    }

    /// Actuator output `υ` for controller output `u`.
    pub fn apply(&self, u: f64) -> Result<f64> {
        finite("u", u)?;
        Ok(if u <= self.delta_l {
            self.m * (u - self.delta_l)
        } else if u >= self.delta_r {
            self.m * (u - self.delta_r)
        } else {
            0.0
        })
    }

    /// Residual `d(u)`, i.e. `u` clamped to `[δl, δr]`.
    pub fn residual(&self, u: f64) -> Result<f64> {
        finite("u", u)?;
        Ok(if u <= self.delta_l {
            self.delta_l
        } else if u >= self.delta_r {
            self.delta_r
        } else {
            u
        })
    }

    /// Bound `δ = max(−δl, δr)` on `|d(u)|`.
    pub fn residual_bound(&self) -> f64 {
        (-self.delta_l).max(self.delta_r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use proptest::prelude::*;

    fn dz(m: f64) -> DeadZoneParams {
        DeadZoneParams::new(m, -0.4, 0.3).unwrap()
    }

    #[test]
    fn apply_examples() {
        assert_eq!(dz(1.0).apply(0.0).unwrap(), 0.0);
        assert_eq!(dz(1.0).apply(0.3).unwrap(), 0.0);
        assert!((dz(1.0).apply(1.0).unwrap() - 0.7).abs() < 1e-15);
        assert!((dz(2.0).apply(-1.0).unwrap() + 1.2).abs() < 1e-15);
    }

    #[test]
    fn residual_examples() {
        assert_eq!(dz(1.0).residual(0.0).unwrap(), 0.0);
        assert_eq!(dz(1.0).residual(0.5).unwrap(), 0.3);
        assert_eq!(dz(1.0).residual(-2.0).unwrap(), -0.4);
    }

    #[test]
    fn residual_bound_examples() {
        assert_eq!(dz(1.0).residual_bound(), 0.4);
        assert_eq!(
            DeadZoneParams::new(1.0, -0.1, 0.1).unwrap().residual_bound(),
            0.1
        );
        assert_eq!(
            DeadZoneParams::new(1.0, -0.05, 0.5).unwrap().residual_bound(),
            0.5
        );
    }

    #[test]
    fn rejects_bad_params() {
        assert!(matches!(
            DeadZoneParams::new(0.0, -0.1, 0.1),
            Err(Error::InvalidParameter { name: "m", .. })
        ));
        assert!(matches!(
            DeadZoneParams::new(1.0, 0.1, 0.2),
            Err(Error::InvalidParameter { name: "delta_l", .. })
        ));
        assert!(matches!(
            DeadZoneParams::new(1.0, -0.1, 0.0),
            Err(Error::InvalidParameter { name: "delta_r", .. })
        ));
        assert!(DeadZoneParams::new(f64::NAN, -0.1, 0.1).is_err());
    }

    #[test]
    fn non_finite_input() {
        assert_eq!(dz(1.0).apply(f64::NAN), Err(Error::NonFinite("u")));
        assert_eq!(dz(1.0).residual(f64::INFINITY), Err(Error::NonFinite("u")));
    }

    #[test]
    fn continuous_at_band_edges() {
        let p = dz(1.7);
        for edge in [p.delta_l(), p.delta_r()] {
            let below = p.apply(edge - 1e-12).unwrap();
            let above = p.apply(edge + 1e-12).unwrap();
            assert_eq!(p.apply(edge).unwrap(), 0.0);
            assert!(below.abs() < 1e-11 && above.abs() < 1e-11);
        }
    }

    proptest! {
        #[test]
        fn decomposition_identity(
            u in -100.0f64..100.0,
            m in 0.01f64..10.0,
            dl in -5.0f64..-1e-6,
            dr in 1e-6f64..5.0,
        ) {
            let p = DeadZoneParams::new(m, dl, dr).unwrap();
            let lhs = p.apply(u).unwrap();
            let rhs = m * (u - p.residual(u).unwrap());
            prop_assert_eq!(lhs.to_bits(), rhs.to_bits());
            prop_assert!(p.residual(u).unwrap().abs() <= p.residual_bound());
        }

        #[test]
        fn apply_is_monotone(a in -50.0f64..50.0, b in -50.0f64..50.0) {
            let p = dz(1.3);
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(p.apply(lo).unwrap() <= p.apply(hi).unwrap());
            let inside = p.delta_l() <= a && a <= p.delta_r();
            prop_assert_eq!(p.apply(a).unwrap() == 0.0, inside);
        }
    }
}
