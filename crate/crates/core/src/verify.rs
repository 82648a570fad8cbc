//! Property suite behind `dzfuzzy verify`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::controller::AdaptiveController;
use crate::deadzone::DeadZoneParams;
use crate::fuzzy::FuzzyPartition;
use crate::lyapunov::{self, DEFAULT_GRID};
use crate::metrics;
use crate::sim::{ClosedLoop, Rk4, SimConfig, SimRun};
use crate::Result;

const SEED: u64 = 0x5EED_D2F0;

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl PropertyResult {
    fn new(name: &'static str, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name,
            passed,
            detail: detail.into(),
        }
    }
}

impl std::fmt::Display for PropertyResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}: {}", self.name, self.detail)
    }
}

#[derive(Debug, Clone, Default)]
pub struct VerifyOptions {
    pub config: SimConfig,
    /// Runs the closed loop with the adaptation law's sign flipped.
    pub invert_adaptation: bool,
    /// Replaces the partition built from `config.centers`.
    pub partition: Option<FuzzyPartition>,
}

fn random_dead_zone(rng: &mut ChaCha8Rng) -> DeadZoneParams {
    let m = rng.gen_range(0.05..5.0);
    let dl = -rng.gen_range(1e-3..2.0);
    let dr = rng.gen_range(1e-3..2.0);
    DeadZoneParams::new(m, dl, dr).expect("sampled parameters are valid")
}

/// Units in the last place between two finite doubles.
pub fn ulp_distance(a: f64, b: f64) -> u64 {
    fn key(x: f64) -> i64 {
        let bits = x.to_bits() as i64;
        if bits < 0 {
            i64::MIN - bits
        } else {
            bits
        }
    }
    key(a).abs_diff(key(b))
}

/// `apply(u) = m (u − residual(u))` within one ulp.
pub fn check_decomposition(sets: usize, per_set: usize) -> PropertyResult {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = (0u64, 0.0, 0.0);
    for _ in 0..sets {
        let dz = random_dead_zone(&mut rng);
        for _ in 0..per_set {
            let u = rng.gen_range(-100.0..=100.0);
            let lhs = dz.apply(u).expect("finite");
            let rhs = dz.m() * (u - dz.residual(u).expect("finite"));
            let d = ulp_distance(lhs, rhs);
            if d > worst.0 {
                worst = (d, u, dz.m());
            }
        }
    }
    PropertyResult::new(
        "deadzone.decomposition",
        worst.0 <= 1,
        format!(
            "{} samples, worst {} ulp (u = {}, m = {})",
            sets * per_set,
            worst.0,
            worst.1,
            worst.2
        ),
    )
}

/// `|residual(u)| <= residual_bound()`.
pub fn check_residual_bound(sets: usize, per_set: usize) -> PropertyResult {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 1);
    let mut violations = 0usize;
    let mut witness = None;
    for _ in 0..sets {
        let dz = random_dead_zone(&mut rng);
        for _ in 0..per_set {
            let u = rng.gen_range(-100.0..=100.0);
            let d = dz.residual(u).expect("finite");
            if d.abs() > dz.residual_bound() {
                violations += 1;
                witness.get_or_insert((u, d, dz.residual_bound()));
            }
        }
    }
    let detail = match witness {
        None => format!("{} samples within bound", sets * per_set),
        Some((u, d, b)) => format!("{violations} violations, first at u = {u}: |{d}| > {b}"),
    };
    PropertyResult::new("deadzone.residual_bound", violations == 0, detail)
}

/// `Σ Ψ_r = 1` within 1e-12 on a uniform grid.
pub fn check_partition_of_unity(partition: &FuzzyPartition, lo: f64, hi: f64, samples: usize) -> PropertyResult {
    let name = "fuzzy.partition_of_unity";
    let mut worst = (0.0f64, lo);
    for i in 0..samples {
        let u = lo + (hi - lo) * i as f64 / (samples.max(2) - 1) as f64;
        match partition.basis(u) {
            Ok(psi) => {
                let dev = (psi.iter().sum::<f64>() - 1.0).abs();
                if dev > worst.0 {
                    worst = (dev, u);
                }
            }
            Err(e) => return PropertyResult::new(name, false, format!("{e}")),
        }
    }
    PropertyResult::new(
        name,
        worst.0 <= 1e-12,
        format!("{samples} samples on [{lo}, {hi}], max |ΣΨ − 1| = {:e} at {}", worst.0, worst.1),
    )
}

/// Global error of RK4 on `ẍ = −x` over one period.
pub fn rk4_period_error(h: f64) -> f64 {
    let period = 2.0 * std::f64::consts::PI;
    let steps = (period / h).ceil() as usize;
    let mut rk = Rk4::new(2);
    let mut y = [1.0, 0.0];
    for i in 0..steps {
        rk.step(
            |_, s, ds| {
                ds[0] = s[1];
                ds[1] = -s[0];
            },
            &mut y,
            i as f64 * h,
            h,
        )
        .expect("oscillator stays finite");
    }
    let t = steps as f64 * h;
    (y[0] - t.cos()).abs().max((y[1] + t.sin()).abs())
}

/// Halving the step from 2e-3 to 1e-3 shrinks the error by 12–20×.
pub fn check_rk4_order() -> PropertyResult {
    let coarse = rk4_period_error(2e-3);
    let fine = rk4_period_error(1e-3);
    let ratio = coarse / fine;
    PropertyResult::new(
        "sim.rk4_order",
        (12.0..=20.0).contains(&ratio),
        format!("error {coarse:e} -> {fine:e}, ratio {ratio:.3}"),
    )
}

/// Closed loop for the suite: always logs rule outputs.
pub fn closed_loop_run(opts: &VerifyOptions) -> Result<SimRun> {
    let cfg = &opts.config;
    cfg.validate()?;
    let partition = match &opts.partition {
        Some(p) => p.clone(),
        None => cfg.partition()?,
    };
    let mut controller = AdaptiveController::new(cfg.filter()?, cfg.gains()?, partition);
    if opts.invert_adaptation {
        controller = controller.with_inverted_adaptation();
    }
    let mut lp = ClosedLoop::from_config(cfg)?;
    lp.controller = controller;
    lp.record_rule_outputs = true;
    lp.run(&cfg.x0, cfg.t_end)
}

/// Outcome of the Lyapunov-surrogate check with its witnesses.
#[derive(Debug, Clone, PartialEq)]
pub struct SurrogateReport {
    pub v_initial: f64,
    pub v_final: f64,
    /// Largest `V(t + 1 s) − V(t)` and the `t` where it starts.
    pub max_increase: f64,
    pub max_increase_at: f64,
    pub budget: f64,
    pub dissipation: f64,
    pub fit: lyapunov::OracleFit,
}

impl SurrogateReport {
    pub fn passed(&self) -> bool {
        self.v_final < self.v_initial && self.max_increase <= self.budget
    }
}

pub fn surrogate_report(run: &SimRun, cfg: &SimConfig) -> Result<SurrogateReport> {
    let gains = cfg.gains()?;
    let dz = cfg.dead_zone()?;
    let fit = lyapunov::fit_rule_outputs(run.controller.partition(), &dz, DEFAULT_GRID)?;
    let series = lyapunov::surrogate_series(&run.records, &fit.rule_outputs, &gains)?;
    let lag = cfg.control_rate as usize;
    let (max_increase, at) = lyapunov::max_net_increase(&series, lag).unwrap_or((0.0, 0));
    let dt = 1.0 / cfg.control_rate as f64;
    Ok(SurrogateReport {
        v_initial: series.first().copied().unwrap_or(f64::NAN),
        v_final: series.last().copied().unwrap_or(f64::NAN),
        max_increase,
        max_increase_at: at as f64 * dt,
        budget: fit.growth_budget(&gains, 1.0),
        dissipation: lyapunov::dissipation(&run.records, gains.kappa, dt),
        fit,
    })
}

fn check_surrogate(run: &SimRun, cfg: &SimConfig) -> PropertyResult {
    let name = "controller.lyapunov_surrogate";
    match surrogate_report(run, cfg) {
        Ok(r) => PropertyResult::new(
            name,
            r.passed(),
            format!(
                "V(0) = {:.6e}, V(T) = {:.6e}, max 1 s increase {:.6e} at t = {:.3} s, budget {:.6e}; \
                 kappa*int(eps^2) = {:.6e} vs V(0) - V(T) = {:.6e}",
                r.v_initial,
                r.v_final,
                r.max_increase,
                r.max_increase_at,
                r.budget,
                r.dissipation,
                r.v_initial - r.v_final
            ),
        ),
        Err(e) => PropertyResult::new(name, false, e.to_string()),
    }
}

fn check_epsilon(run: &SimRun) -> PropertyResult {
    let (first, last) = metrics::epsilon_quarters(&run.records);
    PropertyResult::new(
        "controller.epsilon_convergence",
        metrics::epsilon_converged(&run.records),
        format!("max |eps| first quarter {first:.6e}, last quarter {last:.6e}"),
    )
}

fn check_actuator_identity(run: &SimRun, dz: &DeadZoneParams) -> PropertyResult {
    let bad = run
        .records
        .iter()
        .find(|r| r.upsilon.to_bits() != (dz.m() * (r.u - r.d_true)).to_bits());
    PropertyResult::new(
        "sim.actuator_identity",
        bad.is_none(),
        match bad {
            None => format!("{} records", run.records.len()),
            Some(r) => format!("t = {}: upsilon {} vs {}", r.t, r.upsilon, dz.m() * (r.u - r.d_true)),
        },
    )
}

/// Runs every property and returns the results in a fixed order.
pub fn run_suite(opts: &VerifyOptions) -> Vec<PropertyResult> {
    let mut out = vec![
        check_decomposition(100, 10_000),
        check_residual_bound(100, 10_000),
    ];
    let partition = opts
        .partition
        .clone()
        .map(Ok)
        .unwrap_or_else(|| opts.config.partition());
    out.push(match partition {
        Ok(p) => check_partition_of_unity(&p, -2.0, 2.0, 100_000),
        Err(e) => PropertyResult::new("fuzzy.partition_of_unity", false, e.to_string()),
    });
    out.push(check_rk4_order());

    let closed_loop = ["controller.lyapunov_surrogate", "controller.epsilon_convergence", "sim.actuator_identity"];
    match (closed_loop_run(opts), opts.config.dead_zone()) {
        (Ok(run), Ok(dz)) => {
            out.push(check_surrogate(&run, &opts.config));
            out.push(check_epsilon(&run));
            out.push(check_actuator_identity(&run, &dz));
        }
        (Err(e), _) | (_, Err(e)) => {
            out.extend(
                closed_loop
                    .iter()
                    .map(|name| PropertyResult::new(name, false, format!("closed loop failed: {e}"))),
            );
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ulp_distance_basics() {
        assert_eq!(ulp_distance(1.0, 1.0), 0);
        assert_eq!(ulp_distance(1.0, f64::from_bits(1.0f64.to_bits() + 1)), 1);
        assert_eq!(ulp_distance(0.0, -0.0), 0);
        assert_eq!(ulp_distance(f64::from_bits(1), -f64::from_bits(1)), 2);
    }

    #[test]
    fn cheap_properties_pass() {
        assert!(check_decomposition(10, 1000).passed);
        assert!(check_residual_bound(10, 1000).passed);
        assert!(check_partition_of_unity(&crate::default_partition(), -2.0, 2.0, 10_001).passed);
        assert!(check_rk4_order().passed);
    }
}
