//! Tracking controller with adaptive fuzzy dead-zone compensation.
//!
//! With the combined error `ε = cᵀ x̃` and the equivalent control
//! `û = (bm)⁻¹ (−f + x_d⁽ⁿ⁾ − c̄ᵀ x̃)`, the applied control is
//!
//! ```text
//! u = û − κ ε / (bm) + d̂(û)
//! ```
//!
//! where `d̂(û) = Dᵀ Ψ(û)` estimates the dead-zone residual and the rule
//! outputs follow `Ḋ = −φ ε Ψ(û)`, integrated with one explicit Euler step
//! per control sample.

use crate::error::{finite, invalid, Error, Result};
use crate::fuzzy::{FuzzyPartition, RuleOutputs};

/// Row `n − 1` of Pascal's triangle: `C(n−1, i)` for `i = 0..n`.
pub fn binomial_coeffs(n: usize) -> Result<Vec<u64>> {
    if n < 1 {
        return Err(invalid("n", "system order must be at least 1"));
    }
    let k = (n - 1) as u64;
    let mut row = Vec::with_capacity(n);
    let mut c: u64 = 1;
    row.push(c);
    for i in 1..=k {
        c = c
            .checked_mul(k - i + 1)
            .map(|v| v / i)
            .ok_or_else(|| invalid("n", "binomial coefficients overflow u64"))?;
        row.push(c);
    }
    Ok(row)
}

/// Weights of the combined tracking error `ε = cᵀ x̃`.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorFilter {
    lambda: f64,
    // [c_{n-1} λ^{n-1}, …, c_1 λ, c_0], matched against [x̃, x̃', …, x̃^(n-1)]
    weights: Vec<f64>,
}

impl ErrorFilter {
    pub fn new(n: usize, lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(invalid("lambda", format!("bandwidth must be > 0, got {lambda}")));
        }
        let binom = binomial_coeffs(n)?;
        let weights = (0..n)
            .map(|k| {
                let power = n - 1 - k;
                binom[power] as f64 * lambda.powi(power as i32)
            })
            .collect();
        Ok(Self { lambda, weights })
    }

    pub fn order(&self) -> usize {
        self.weights.len()
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// The vector `c`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// The vector `c̄`: `c` with its last entry zeroed.
    pub fn weights_bar(&self) -> Vec<f64> {
        let mut bar = self.weights.clone();
        if let Some(last) = bar.last_mut() {
            *last = 0.0;
        }
        bar
    }

    fn check_dim(&self, xtilde: &[f64]) -> Result<()> {
        if xtilde.len() != self.order() {
            return Err(Error::LengthMismatch {
                what: "tracking error",
                expected: self.order(),
                got: xtilde.len(),
            });
        }
        Ok(())
    }

    /// `ε = cᵀ x̃`.
    pub fn combined_error(&self, xtilde: &[f64]) -> Result<f64> {
        self.check_dim(xtilde)?;
        Ok(self.weights.iter().zip(xtilde).map(|(c, e)| c * e).sum())
    }

    /// The `c̄ᵀ x̃` term of the control law: the part of `ε̇` that does not
    /// involve `x̃⁽ⁿ⁾`, i.e. `Σ_{k<n−1} c_k x̃^(k+1)`. For `n = 2` this is
    /// `λ x̃'`.
    pub fn rate_term(&self, xtilde: &[f64]) -> Result<f64> {
        self.check_dim(xtilde)?;
        Ok(self
            .weights
            .iter()
            .zip(xtilde.iter().skip(1))
            .map(|(c, e)| c * e)
            .sum())
    }
}

/// Constant gains of the control law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerGains {
    pub kappa: f64,
    /// Adaptation rate. Zero freezes the rule outputs.
    pub phi: f64,
    pub b: f64,
    pub m: f64,
}

impl ControllerGains {
    pub fn new(kappa: f64, phi: f64, b: f64, m: f64) -> Result<Self> {
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(invalid("kappa", format!("must be > 0, got {kappa}")));
        }
        if !(phi.is_finite() && phi >= 0.0) {
            return Err(invalid("phi", format!("must be >= 0, got {phi}")));
        }
        if !b.is_finite() {
            return Err(invalid("b", "must be finite"));
        }
        if !m.is_finite() {
            return Err(invalid("m", "must be finite"));
        }
        if b * m == 0.0 {
            return Err(invalid("b", "the product b·m must be nonzero"));
        }
        Ok(Self { kappa, phi, b, m })
    }

    pub fn bm(&self) -> f64 {
        self.b * self.m
    }
}

/// `û = (−f + x_d⁽ⁿ⁾ − c̄ᵀ x̃) / (bm)`.
pub fn equivalent_control(
    f: f64,
    xd_n: f64,
    xtilde: &[f64],
    gains: &ControllerGains,
    filter: &ErrorFilter,
) -> Result<f64> {
    let bm = gains.bm();
    if bm == 0.0 {
        return Err(invalid("b", "the product b·m must be nonzero"));
    }
    Ok((-f + xd_n - filter.rate_term(xtilde)?) / bm)
}

/// `u = û − κ ε / (bm) + d̂`.
pub fn control(uhat: f64, epsilon: f64, dhat: f64, gains: &ControllerGains) -> Result<f64> {
    finite("uhat", uhat)?;
    finite("epsilon", epsilon)?;
    finite("dhat", dhat)?;
    let bm = gains.bm();
    if bm == 0.0 {
        return Err(invalid("b", "the product b·m must be nonzero"));
    }
    Ok(uhat - gains.kappa * epsilon / bm + dhat)
}

/// One Euler step of `Ḋ = −φ ε Ψ`.
pub fn adapt(outputs: &mut RuleOutputs, epsilon: f64, psi: &[f64], phi: f64, dt: f64) -> Result<()> {
    finite("epsilon", epsilon)?;
    if !(dt > 0.0) {
        return Err(invalid("dt", format!("controller period must be > 0, got {dt}")));
    }
    if psi.len() != outputs.len() {
        return Err(Error::LengthMismatch {
            what: "basis",
            expected: outputs.len(),
            got: psi.len(),
        });
    }
    let step = phi * dt;
    for (d, p) in outputs.as_mut_slice().iter_mut().zip(psi) {
        *d -= step * epsilon * p;
    }
    Ok(())
}

/// Everything computed during one control sample.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlSample {
    pub xtilde: Vec<f64>,
    pub epsilon: f64,
    pub uhat: f64,
    pub dhat: f64,
    pub u: f64,
}

/// Controller state machine: owns the adapted rule outputs.
#[derive(Debug, Clone)]
pub struct AdaptiveController {
    filter: ErrorFilter,
    gains: ControllerGains,
    partition: FuzzyPartition,
    outputs: RuleOutputs,
    output_limit: Option<f64>,
    adaptation_sign: f64,
    last: Option<ControlSample>,
}

impl AdaptiveController {
    /// Rule outputs start at zero.
    pub fn new(filter: ErrorFilter, gains: ControllerGains, partition: FuzzyPartition) -> Self {
        let outputs = RuleOutputs::zeros(partition.len());
        Self {
            filter,
            gains,
            partition,
            outputs,
            output_limit: None,
            adaptation_sign: 1.0,
            last: None,
        }
    }

    /// Clamp every rule output to `±limit` after each update. Off by default.
    pub fn with_output_limit(mut self, limit: f64) -> Result<Self> {
        if !(limit.is_finite() && limit > 0.0) {
            return Err(invalid("output_limit", format!("must be > 0, got {limit}")));
        }
        self.output_limit = Some(limit);
        Ok(self)
    }

    pub fn with_rule_outputs(mut self, outputs: RuleOutputs) -> Result<Self> {
        if outputs.len() != self.partition.len() {
            return Err(Error::LengthMismatch {
                what: "rule outputs",
                expected: self.partition.len(),
                got: outputs.len(),
            });
        }
        self.outputs = outputs;
        Ok(self)
    }

    /// Mutation hook for the verification suite: runs the adaptation law
    /// with the wrong sign.
    #[doc(hidden)]
    pub fn with_inverted_adaptation(mut self) -> Self {
        self.adaptation_sign = -1.0;
        self
    }

    pub fn filter(&self) -> &ErrorFilter {
        &self.filter
    }

    pub fn gains(&self) -> &ControllerGains {
        &self.gains
    }

    pub fn partition(&self) -> &FuzzyPartition {
        &self.partition
    }

    pub fn rule_outputs(&self) -> &RuleOutputs {
        &self.outputs
    }

    pub fn last_sample(&self) -> Option<&ControlSample> {
        self.last.as_ref()
    }

    /// `d̂(û)` with the current rule outputs.
    pub fn estimate(&self, uhat: f64) -> Result<f64> {
        self.partition.estimate(&self.outputs, uhat)
    }

    /// Computes the control for one sample and then adapts the rule outputs.
    ///
    /// `x` and `xd` are `[x, x', …, x^(n−1)]`, `xd_n` is `x_d⁽ⁿ⁾` and `f` the
    /// plant drift at the current state.
    pub fn step(&mut self, x: &[f64], xd: &[f64], xd_n: f64, f: f64, dt: f64) -> Result<ControlSample> {
        if xd.len() != x.len() {
            return Err(Error::LengthMismatch {
                what: "reference",
                expected: x.len(),
                got: xd.len(),
            });
        }
        finite("f", f)?;
        finite("xd_n", xd_n)?;
        let xtilde: Vec<f64> = x.iter().zip(xd).map(|(a, b)| a - b).collect();
        let epsilon = finite("epsilon", self.filter.combined_error(&xtilde)?)?;
        let uhat = finite("uhat", equivalent_control(f, xd_n, &xtilde, &self.gains, &self.filter)?)?;
        let psi = self.partition.basis(uhat)?;
        let dhat = self.outputs.infer(&psi)?;
        let u = control(uhat, epsilon, dhat, &self.gains)?;

        adapt(
            &mut self.outputs,
            self.adaptation_sign * epsilon,
            &psi,
            self.gains.phi,
            dt,
        )?;
        if let Some(limit) = self.output_limit {
            for d in self.outputs.as_mut_slice() {
                *d = d.clamp(-limit, limit);
            }
        }

        let sample = ControlSample {
            xtilde,
            epsilon,
            uhat,
            dhat,
            u,
        };
        self.last = Some(sample.clone());
        Ok(sample)
    }
}
