use super::plant::{PlantModel, VanDerPol};
use super::reference::{Reference, SineReference};
use super::rk4::Rk4;
use crate::controller::{AdaptiveController, ControllerGains, ErrorFilter};
use crate::deadzone::DeadZoneParams;
use crate::error::{invalid, Error, Result};
use crate::fuzzy::{FuzzyPartition, DEFAULT_CENTERS};

/// Any state component beyond this magnitude aborts the run.
pub const DIVERGENCE_LIMIT: f64 = 1e6;

/// Parameters of one closed-loop Van der Pol experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub t_end: f64,
    pub plant_rate: u32,
    pub control_rate: u32,
    pub x0: Vec<f64>,
    pub mu: f64,
    pub b: f64,
    pub m: f64,
    pub delta_l: f64,
    pub delta_r: f64,
    pub lambda: f64,
    pub kappa: f64,
    pub phi: f64,
    pub centers: Vec<f64>,
    pub log_dhat: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            t_end: 40.0,
            plant_rate: 1000,
            control_rate: 500,
            x0: vec![0.0, 0.0],
            mu: 1.0,
            b: 1.0,
            m: 1.0,
            delta_l: -0.4,
            delta_r: 0.3,
            lambda: 0.6,
            kappa: 10.0,
            phi: 3.0,
            centers: DEFAULT_CENTERS.to_vec(),
            log_dhat: false,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return Err(invalid("t_end", format!("must be finite and >= 0, got {}", self.t_end)));
        }
        if self.control_rate == 0 {
            return Err(invalid("control_rate", "must be > 0"));
        }
        if self.plant_rate == 0 || self.plant_rate % self.control_rate != 0 {
            return Err(invalid(
                "plant_rate",
                format!(
                    "must be a positive integer multiple of control_rate ({})",
                    self.control_rate
                ),
            ));
        }
        if self.x0.len() != 2 || self.x0.iter().any(|v| !v.is_finite()) {
            return Err(invalid("x0", "expected two finite values"));
        }
        if !self.mu.is_finite() {
            return Err(invalid("mu", "must be finite"));
        }
        self.dead_zone()?;
        self.filter()?;
        self.gains()?;
        self.partition()?;
        Ok(())
    }

    pub fn dead_zone(&self) -> Result<DeadZoneParams> {
        DeadZoneParams::new(self.m, self.delta_l, self.delta_r)
    }

    pub fn filter(&self) -> Result<ErrorFilter> {
        ErrorFilter::new(2, self.lambda)
    }

    pub fn gains(&self) -> Result<ControllerGains> {
        ControllerGains::new(self.kappa, self.phi, self.b, self.m)
    }

    pub fn partition(&self) -> Result<FuzzyPartition> {
        FuzzyPartition::from_centers(&self.centers)
    }

    pub fn plant(&self) -> VanDerPol {
        VanDerPol::new(self.mu, self.b)
    }

    pub fn controller(&self) -> Result<AdaptiveController> {
        Ok(AdaptiveController::new(self.filter()?, self.gains()?, self.partition()?))
    }

    pub fn control_samples(&self) -> usize {
        (self.t_end * self.control_rate as f64).round() as usize
    }
}

/// One control sample of the closed-loop log.
#[derive(Debug, Clone, PartialEq)]
pub struct SimRecord {
    pub t: f64,
    pub state: Vec<f64>,
    pub x_d: Vec<f64>,
    pub xtilde: Vec<f64>,
    pub epsilon: f64,
    pub uhat: f64,
    pub u: f64,
    pub upsilon: f64,
    /// True dead-zone residual `d(u)`, for comparison with `dhat`.
    pub d_true: f64,
    pub dhat: f64,
    /// Rule outputs used for this sample (before adaptation), if logged.
    pub rule_outputs: Option<Vec<f64>>,
}

/// Records of a finished run plus the controller in its final state.
#[derive(Debug, Clone)]
pub struct SimRun {
    pub records: Vec<SimRecord>,
    pub controller: AdaptiveController,
}

/// Plant, actuator, reference and controller wired together.
///
/// At every control sample the controller reads the state and the reference,
/// computes `u` and adapts; `u` is then held while the plant advances
/// `plant_rate / control_rate` RK4 steps through the dead-zone.
#[derive(Debug, Clone)]
pub struct ClosedLoop<P, R> {
    pub plant: P,
    pub reference: R,
    pub dead_zone: DeadZoneParams,
    pub controller: AdaptiveController,
    pub plant_rate: u32,
    pub control_rate: u32,
    pub record_rule_outputs: bool,
}

impl ClosedLoop<VanDerPol, SineReference> {
    pub fn from_config(cfg: &SimConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            plant: cfg.plant(),
            reference: SineReference::default(),
            dead_zone: cfg.dead_zone()?,
            controller: cfg.controller()?,
            plant_rate: cfg.plant_rate,
            control_rate: cfg.control_rate,
            record_rule_outputs: cfg.log_dhat,
        })
    }
}

impl<P: PlantModel, R: Reference> ClosedLoop<P, R> {
    pub fn run(self, x0: &[f64], t_end: f64) -> Result<SimRun> {
        let Self {
            plant,
            reference,
            dead_zone,
            mut controller,
            plant_rate,
            control_rate,
            record_rule_outputs,
        } = self;
        let n = plant.order();
        if x0.len() != n {
            return Err(Error::LengthMismatch {
                what: "initial state",
                expected: n,
                got: x0.len(),
            });
        }
        if control_rate == 0 || plant_rate % control_rate != 0 || plant_rate == 0 {
            return Err(invalid("plant_rate", "must be a positive multiple of control_rate"));
        }
        let substeps = (plant_rate / control_rate) as usize;
        let h = 1.0 / plant_rate as f64;
        let dt = 1.0 / control_rate as f64;
        let samples = (t_end * control_rate as f64).round() as usize;

        let mut x = x0.to_vec();
        let mut xd = vec![0.0; n];
        let mut rk = Rk4::new(n);
        let mut records = Vec::with_capacity(samples);

        for k in 0..samples {
            let t = k as f64 / control_rate as f64;
            let xd_n = reference.sample(t, &mut xd);
            let f = plant.drift(&x, t);
            let snapshot = record_rule_outputs.then(|| controller.rule_outputs().as_slice().to_vec());
            let s = controller.step(&x, &xd, xd_n, f, dt).map_err(|e| match e {
                Error::NonFinite(_) => Error::Divergence { t },
                other => other,
            })?;
            let upsilon = dead_zone.apply(s.u)?;
            let d_true = dead_zone.residual(s.u)?;
            records.push(SimRecord {
                t,
                state: x.clone(),
                x_d: xd.clone(),
                xtilde: s.xtilde,
                epsilon: s.epsilon,
                uhat: s.uhat,
                u: s.u,
                upsilon,
                d_true,
                dhat: s.dhat,
                rule_outputs: snapshot,
            });

            for j in 0..substeps {
                let tj = t + j as f64 * h;
                rk.step(|tt, y, dy| plant.derivative(y, upsilon, tt, dy), &mut x, tj, h)?;
                if x.iter().any(|v| v.abs() > DIVERGENCE_LIMIT) {
                    return Err(Error::Divergence { t: tj + h });
                }
            }
        }
        Ok(SimRun {
            records,
            controller,
        })
    }
}

/// Runs the Van der Pol tracking experiment described by `cfg`.
pub fn run_closed_loop(cfg: &SimConfig) -> Result<SimRun> {
    ClosedLoop::from_config(cfg)?.run(&cfg.x0, cfg.t_end)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid() {
        let cfg = SimConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.control_samples(), 20_000);
    }

    #[test]
    fn validation_names_the_key() {
        let key = |cfg: SimConfig| match cfg.validate() {
            Err(Error::InvalidParameter { name, .. }) => name,
            other => panic!("expected invalid parameter, got {other:?}"),
        };
        assert_eq!(key(SimConfig { plant_rate: 750, ..Default::default() }), "plant_rate");
        assert_eq!(key(SimConfig { control_rate: 0, ..Default::default() }), "control_rate");
        assert_eq!(key(SimConfig { t_end: -1.0, ..Default::default() }), "t_end");
        assert_eq!(key(SimConfig { delta_l: 0.2, ..Default::default() }), "delta_l");
        assert_eq!(key(SimConfig { kappa: 0.0, ..Default::default() }), "kappa");
        assert_eq!(key(SimConfig { lambda: -0.6, ..Default::default() }), "lambda");
        assert_eq!(key(SimConfig { x0: vec![1.0], ..Default::default() }), "x0");
        assert_eq!(key(SimConfig { centers: vec![0.0, 0.0], ..Default::default() }), "centers");
    }

    #[test]
    fn zero_duration_yields_no_records() {
        let run = run_closed_loop(&SimConfig { t_end: 0.0, ..Default::default() }).unwrap();
        assert!(run.records.is_empty());
    }

    #[test]
    fn one_record_per_control_sample() {
        let cfg = SimConfig { t_end: 1.0, log_dhat: true, ..Default::default() };
        let run = run_closed_loop(&cfg).unwrap();
        assert_eq!(run.records.len(), 500);
        for (k, r) in run.records.iter().enumerate() {
            assert_eq!(r.t, k as f64 / 500.0);
            assert_eq!(r.rule_outputs.as_ref().map(Vec::len), Some(7));
        }
        assert_eq!(run.records[0].rule_outputs.as_deref(), Some(&[0.0; 7][..]));
    }

    #[test]
    fn actuator_identity_holds_at_every_record() {
        let cfg = SimConfig { t_end: 5.0, ..Default::default() };
        let dz = cfg.dead_zone().unwrap();
        for r in run_closed_loop(&cfg).unwrap().records {
            assert_eq!(r.upsilon.to_bits(), (dz.m() * (r.u - r.d_true)).to_bits());
            assert_eq!(r.d_true, dz.residual(r.u).unwrap());
        }
    }

    #[test]
    fn divergence_is_reported_with_time() {
        // no control authority and a cubic drift: finite escape time
        struct Escaping;
        impl PlantModel for Escaping {
            fn order(&self) -> usize {
                2
            }
            fn drift(&self, x: &[f64], _t: f64) -> f64 {
                x[0] * x[0] * x[0]
            }
            fn input_gain(&self, _x: &[f64], _t: f64) -> f64 {
                0.0
            }
        }
        let cfg = SimConfig::default();
        let lp = ClosedLoop {
            plant: Escaping,
            reference: SineReference::default(),
            dead_zone: cfg.dead_zone().unwrap(),
            controller: cfg.controller().unwrap(),
            plant_rate: 1000,
            control_rate: 500,
            record_rule_outputs: false,
        };
        match lp.run(&[3.0, 0.0], 10.0) {
            Err(Error::Divergence { t }) => assert!(t > 0.0 && t < 2.0, "t = {t}"),
            other => panic!("expected divergence, got {:?}", other.map(|r| r.records.len())),
        }
    }
}
