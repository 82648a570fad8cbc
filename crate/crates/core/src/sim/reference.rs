/// Desired trajectory together with its derivatives.
pub trait Reference {
    /// Fills `xd` with `[x_d, x_d', …, x_d^(n−1)]` and returns `x_d⁽ⁿ⁾`.
    fn sample(&self, t: f64, xd: &mut [f64]) -> f64;
}

/// `x_d = A sin(ω t)` with analytic derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SineReference {
    pub amplitude: f64,
    pub omega: f64,
}

impl Default for SineReference {
    fn default() -> Self {
        Self {
            amplitude: 1.0,
            omega: 1.0,
        }
    }
}

impl SineReference {
    fn derivative(&self, t: f64, k: usize) -> f64 {
        let (s, c) = (self.omega * t).sin_cos();
        let base = match k % 4 {
            0 => s,
            1 => c,
            2 => -s,
            _ => -c,
        };
        self.amplitude * self.omega.powi(k as i32) * base
    }
}

impl Reference for SineReference {
    fn sample(&self, t: f64, xd: &mut [f64]) -> f64 {
        for (k, v) in xd.iter_mut().enumerate() {
            *v = self.derivative(t, k);
        }
        self.derivative(t, xd.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_sine_derivatives() {
        let r = SineReference::default();
        let t = 0.7_f64;
        let mut xd = [0.0; 2];
        let acc = r.sample(t, &mut xd);
        assert_eq!(xd, [t.sin(), t.cos()]);
        assert_eq!(acc, -t.sin());

        let mut xd4 = [0.0; 4];
        let x4 = r.sample(t, &mut xd4);
        assert_eq!(xd4[3], -t.cos());
        assert_eq!(x4, t.sin());
    }
}
