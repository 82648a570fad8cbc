/// Plants of the form `x⁽ⁿ⁾ = f(x, t) + b(x, t) υ` with state
/// `[x, x', …, x^(n−1)]`.
pub trait PlantModel {
    fn order(&self) -> usize;

    /// Drift `f(x, t)`.
    fn drift(&self, x: &[f64], t: f64) -> f64;

    /// Input gain `b(x, t)`.
    fn input_gain(&self, x: &[f64], t: f64) -> f64;

    /// Writes `ẋ` for actuator output `upsilon` into `dx`.
    fn derivative(&self, x: &[f64], upsilon: f64, t: f64, dx: &mut [f64]) {
        let n = self.order();
        dx[..n - 1].copy_from_slice(&x[1..n]);
        dx[n - 1] = self.drift(x, t) + self.input_gain(x, t) * upsilon;
    }
}

/// Forced Van der Pol oscillator `ẍ − μ(1 − x²)ẋ + x = b υ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VanDerPol {
    pub mu: f64,
    pub b: f64,
}

impl VanDerPol {
    pub fn new(mu: f64, b: f64) -> Self {
        Self { mu, b }
    }
}

/// Right-hand side `[x₂, μ(1 − x₁²)x₂ − x₁ + b υ]`.
pub fn vdp_rhs(state: [f64; 2], upsilon: f64, params: &VanDerPol) -> [f64; 2] {
    let [x1, x2] = state;
    [x2, params.mu * (1.0 - x1 * x1) * x2 - x1 + params.b * upsilon]
}

impl PlantModel for VanDerPol {
    fn order(&self) -> usize {
        2
    }

    fn drift(&self, x: &[f64], _t: f64) -> f64 {
        self.mu * (1.0 - x[0] * x[0]) * x[1] - x[0]
    }

    fn input_gain(&self, _x: &[f64], _t: f64) -> f64 {
        self.b
    }

    fn derivative(&self, x: &[f64], upsilon: f64, _t: f64, dx: &mut [f64]) {
        let d = vdp_rhs([x[0], x[1]], upsilon, self);
        dx[0] = d[0];
        dx[1] = d[1];
    }
}
