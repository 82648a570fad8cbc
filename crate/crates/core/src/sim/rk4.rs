use crate::error::{Error, Result};

/// Classical four-stage Runge–Kutta integrator with reusable stage buffers.
#[derive(Debug, Clone)]
pub struct Rk4 {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    tmp: Vec<f64>,
}

impl Rk4 {
    pub fn new(dim: usize) -> Self {
        Self {
            k1: vec![0.0; dim],
            k2: vec![0.0; dim],
            k3: vec![0.0; dim],
            k4: vec![0.0; dim],
            tmp: vec![0.0; dim],
        }
    }

    /// Advances `y` in place from `t` to `t + h`. `rhs(t, y, dy)` writes the
    /// derivative; any input it uses is held constant over the step.
    pub fn step<F>(&mut self, mut rhs: F, y: &mut [f64], t: f64, h: f64) -> Result<()>
    where
        F: FnMut(f64, &[f64], &mut [f64]),
    {
        let n = y.len();
        debug_assert_eq!(n, self.k1.len());
        let half = 0.5 * h;

        rhs(t, y, &mut self.k1);
        check(&self.k1, t)?;
        for i in 0..n {
            self.tmp[i] = y[i] + half * self.k1[i];
        }
        rhs(t + half, &self.tmp, &mut self.k2);
        check(&self.k2, t)?;
        for i in 0..n {
            self.tmp[i] = y[i] + half * self.k2[i];
        }
        rhs(t + half, &self.tmp, &mut self.k3);
        check(&self.k3, t)?;
        for i in 0..n {
            self.tmp[i] = y[i] + h * self.k3[i];
        }
        rhs(t + h, &self.tmp, &mut self.k4);
        check(&self.k4, t)?;

        for i in 0..n {
            y[i] += h / 6.0 * (self.k1[i] + 2.0 * self.k2[i] + 2.0 * self.k3[i] + self.k4[i]);
        }
        check(y, t)
    }
}

fn check(v: &[f64], t: f64) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::Divergence { t })
    }
}

/// One RK4 step returning the new state.
pub fn rk4_step<F>(rhs: F, state: &[f64], t: f64, h: f64) -> Result<Vec<f64>>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    if !(h > 0.0) {
        return Err(crate::error::invalid("h", format!("step must be > 0, got {h}")));
    }
    let mut y = state.to_vec();
    Rk4::new(y.len()).step(rhs, &mut y, t, h)?;
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{PlantModel, VanDerPol};

    fn oscillator(_t: f64, y: &[f64], dy: &mut [f64]) {
        dy[0] = y[1];
        dy[1] = -y[0];
    }

    #[test]
    fn constant_velocity_is_exact() {
        let y = rk4_step(|_, _, dy| { dy[0] = 2.5; dy[1] = 0.0 }, &[1.0, 3.0], 0.0, 0.1).unwrap();
        assert_eq!(y, vec![1.25, 3.0]);
    }

    #[test]
    fn harmonic_oscillator_one_period() {
        let steps = (2.0 * std::f64::consts::PI / 0.01).ceil() as usize;
        let mut rk = Rk4::new(2);
        let mut y = [1.0, 0.0];
        for i in 0..steps {
            rk.step(oscillator, &mut y, i as f64 * 0.01, 0.01).unwrap();
        }
        let t = steps as f64 * 0.01;
        assert!((y[0] - t.cos()).abs() < 1e-8);
        assert!((y[1] + t.sin()).abs() < 1e-8);
        assert!(((y[0] * y[0] + y[1] * y[1]).sqrt() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn fourth_order_on_van_der_pol() {
        let plant = VanDerPol::new(1.0, 1.0);
        let horizon = 2.0;
        let run = |h: f64| {
            let steps = (horizon / h).round() as usize;
            let mut rk = Rk4::new(2);
            let mut y = [2.0, 0.0];
            for i in 0..steps {
                rk.step(|t, x, dx| plant.derivative(x, 0.0, t, dx), &mut y, i as f64 * h, h)
                    .unwrap();
            }
            y
        };
        let h = 0.1;
        let reference = run(h / 10.0);
        let err = |y: [f64; 2]| (y[0] - reference[0]).hypot(y[1] - reference[1]);
        let ratio = err(run(h)) / err(run(h / 2.0));
        assert!((12.0..=20.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn non_finite_stage_reports_divergence() {
        let r = rk4_step(|_, y, dy| dy[0] = 1.0 / (y[0] - 1.0), &[1.0], 3.5, 0.1);
        assert_eq!(r, Err(Error::Divergence { t: 3.5 }));
        assert!(rk4_step(oscillator, &[1.0, 0.0], 0.0, 0.0).is_err());
    }
}
