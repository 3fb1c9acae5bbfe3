//! The figure-reproduction experiments, each producing one [`Table`].

use uplink_core::analytic::{ccdf_curve, rate_round_robin, rate_scheduled};
use uplink_core::mcsim::{
    ccdf_from_outcomes, rates_from_outcomes, sample_realization, user_count_from_outcomes, Scheduler, SimulationConfig,
    UserSampling,
};
use uplink_core::params::{make_params, SinrThreshold};
use uplink_core::usercount::{truncation_support, validity_g1, validity_g2, Regime, UserCountModel, DEFAULT_TAIL_MASS};
use uplink_core::{NetworkParams, RawParams};

use crate::driver::run_trials_parallel;
use crate::table::{Table, Value};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    /// SINR CCDF over a threshold grid.
    Ccdf,
    /// Mean rates and scheduling gain at one operating point.
    Rate,
    /// Scheduling gain over a sweep of user-to-BS density ratios.
    Gain,
    /// Validity probabilities of both user-count models over a BS-density grid.
    Validity,
    /// User-count PMFs.
    Pmf,
    /// Every BS and user of one sampled realization.
    DumpRealization,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Ccdf => "ccdf",
            Command::Rate => "rate",
            Command::Gain => "gain",
            Command::Validity => "validity",
            Command::Pmf => "pmf",
            Command::DumpRealization => "dump-realization",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, clap::ValueEnum)]
pub enum Engine {
    /// Analytic engine with the Voronoi-cell user count.
    #[value(name = "analytic-1")]
    Analytic1,
    /// Analytic engine with the achievable-range user count.
    #[value(name = "analytic-2")]
    Analytic2,
    /// Monte Carlo engine.
    Sim,
}

impl Engine {
    pub const ALL: [Engine; 3] = [Engine::Analytic1, Engine::Analytic2, Engine::Sim];

    pub fn name(self) -> &'static str {
        match self {
            Engine::Analytic1 => "analytic-1",
            Engine::Analytic2 => "analytic-2",
            Engine::Sim => "sim",
        }
    }

    fn model(self) -> Option<UserCountModel> {
        match self {
            Engine::Analytic1 => Some(UserCountModel::VoronoiCell),
            Engine::Analytic2 => Some(UserCountModel::AchievableRange),
            Engine::Sim => None,
        }
    }
}

/// A fully resolved experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub command: Command,
    pub params: RawParams,
    pub sim: SimulationConfig,
    /// SINR thresholds in dB.
    pub theta_db: Vec<f64>,
    /// BS densities per km² for the validity sweep.
    pub lambda_bs_grid: Vec<f64>,
    /// `λ_UE/λ_BS` values for the gain sweep.
    pub ratios: Vec<f64>,
    pub engines: Vec<Engine>,
    /// Worker threads for the Monte Carlo engine; `None` uses all cores.
    /// Never affects results.
    pub threads: Option<usize>,
    /// Trial whose realization `dump-realization` writes.
    pub trial_index: u64,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            command: Command::Ccdf,
            params: RawParams::default(),
            sim: SimulationConfig::default(),
            theta_db: crate::grid::linspace(-20.0, 30.0, 101),
            lambda_bs_grid: crate::grid::logspace(0.01, 100.0, 81),
            ratios: (1..=10).map(f64::from).collect(),
            engines: Engine::ALL.to_vec(),
            threads: None,
            trial_index: 0,
        }
    }
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.engines.is_empty() {
            return Err(CliError::Usage("at least one engine is required".into()));
        }
        let empty = match self.command {
            Command::Ccdf => self.theta_db.is_empty(),
            Command::Gain => self.ratios.is_empty(),
            Command::Validity => self.lambda_bs_grid.is_empty(),
            _ => false,
        };
        if empty {
            return Err(CliError::Usage("grid is empty".into()));
        }
        if self.ratios.iter().any(|r| !(*r >= 0.0)) {
            return Err(CliError::Usage("density ratios must be non-negative".into()));
        }
        if self.threads == Some(0) {
            return Err(CliError::Usage("thread count must be positive".into()));
        }
        Ok(())
    }

    pub fn has(&self, engine: Engine) -> bool {
        self.engines.contains(&engine)
    }

    fn engine_list(&self) -> String {
        let mut e = self.engines.clone();
        e.sort();
        e.dedup();
        e.iter().map(|e| e.name()).collect::<Vec<_>>().join(",")
    }
}

/// Runs the experiment selected by `spec.command`.
pub fn run(spec: &ExperimentSpec) -> Result<Table, CliError> {
    spec.validate()?;
    match spec.command {
        Command::Ccdf => run_ccdf(spec),
        Command::Rate => run_rate(spec),
        Command::Gain => run_gain(spec),
        Command::Validity => run_validity(spec),
        Command::Pmf => run_pmf(spec),
        Command::DumpRealization => run_dump(spec),
    }
}

fn manifest(t: &mut Table, spec: &ExperimentSpec, p: &NetworkParams, simulated: bool) -> Result<(), CliError> {
    t.meta("command", spec.command.name());
    t.meta("lambda_bs_per_m2", p.lambda_bs());
    t.meta("lambda_ue_per_m2", p.lambda_ue());
    t.meta("alpha", p.alpha());
    t.meta("noise_mw", p.noise_power());
    t.meta("p_max_mw", p.p_max());
    t.meta("rho_target_mw", p.rho_target());
    t.meta("achievable_radius_m", p.achievable_radius());
    t.meta("interference_limited", p.interference_limited());
    if simulated {
        t.meta("trials", spec.sim.trials);
        t.meta("seed", spec.sim.seed);
        t.meta("window_radius_m", spec.sim.resolved_window(p)?);
        t.meta("sampling", sampling_name(spec.sim.sampling));
    }
    t.meta("engines", spec.engine_list());
    t.meta("uplink_core_version", uplink_core::VERSION);
    t.meta("uplink_version", env!("CARGO_PKG_VERSION"));
    Ok(())
}

fn sampling_name(s: UserSampling) -> &'static str {
    match s {
        UserSampling::InvolvedDiscs => "involved-discs",
        UserSampling::FullWindow => "full-window",
    }
}

fn thresholds(theta_db: &[f64]) -> Result<Vec<f64>, CliError> {
    Ok(theta_db.iter().map(|&d| SinrThreshold::from_db(d).map(SinrThreshold::linear)).collect::<Result<_, _>>()?)
}

/// Columns `theta_db, analytic_fn1, analytic_fn2, sim_mean, sim_stderr`.
pub fn run_ccdf(spec: &ExperimentSpec) -> Result<Table, CliError> {
    let p = make_params(&spec.params)?;
    let thetas = thresholds(&spec.theta_db)?;
    let mut analytic = Vec::new();
    for engine in [Engine::Analytic1, Engine::Analytic2] {
        analytic.push(match (spec.has(engine), engine.model()) {
            (true, Some(m)) => Some(ccdf_curve(&thetas, &m, &p)?.probabilities().collect::<Vec<_>>()),
            _ => None,
        });
    }
    let sim = if spec.has(Engine::Sim) {
        let outcomes = run_trials_parallel(&p, &spec.sim, spec.threads)?;
        Some(ccdf_from_outcomes(&outcomes, &thetas, Scheduler::NormalizedSnr, &p)?)
    } else {
        None
    };

    let mut t = Table::new(&["theta_db", "analytic_fn1", "analytic_fn2", "sim_mean", "sim_stderr"]);
    manifest(&mut t, spec, &p, sim.is_some())?;
    for (i, &db) in spec.theta_db.iter().enumerate() {
        let cell = |c: &Option<Vec<f64>>| Value::from(c.as_ref().map(|v| v[i]));
        t.push(vec![
            db.into(),
            cell(&analytic[0]),
            cell(&analytic[1]),
            sim.as_ref().map(|c| c.points[i].1).into(),
            sim.as_ref().and_then(|c| c.stderr.as_ref()).map(|s| s[i]).into(),
        ]);
    }
    Ok(t)
}

fn analytic_rates(model: &UserCountModel, p: &NetworkParams) -> Result<(f64, f64, Option<f64>), CliError> {
    let scheduled = rate_scheduled(model, p)?;
    let round_robin = rate_round_robin(model, p)?;
    let gain = (round_robin > 0.0).then(|| scheduled / round_robin);
    Ok((scheduled, round_robin, gain))
}

/// One row per engine: `engine, rate_scheduled, rate_round_robin, gain, gain_stderr`.
/// Rates are in nats per channel use; an undefined gain is left empty.
pub fn run_rate(spec: &ExperimentSpec) -> Result<Table, CliError> {
    let p = make_params(&spec.params)?;
    let mut t = Table::new(&["engine", "rate_scheduled", "rate_round_robin", "gain", "gain_stderr"]);
    manifest(&mut t, spec, &p, spec.has(Engine::Sim))?;
    for engine in Engine::ALL.into_iter().filter(|e| spec.has(*e)) {
        let row = match engine.model() {
            Some(model) => {
                let (s, rr, g) = analytic_rates(&model, &p)?;
                vec![engine.name().into(), s.into(), rr.into(), g.into(), Value::Empty]
            }
            None => {
                let r = rates_from_outcomes(&run_trials_parallel(&p, &spec.sim, spec.threads)?)?;
                let se = r.gain.map(|_| r.gain_stderr);
                vec![engine.name().into(), r.scheduled.mean.into(), r.round_robin.mean.into(), r.gain.into(), se.into()]
            }
        };
        t.push(row);
    }
    Ok(t)
}

/// Model used for the analytic gain column: the requested analytic engine, or
/// with both requested, the one whose validity probability is larger.
fn gain_model(spec: &ExperimentSpec, p: &NetworkParams) -> Option<Regime> {
    match (spec.has(Engine::Analytic1), spec.has(Engine::Analytic2)) {
        (false, false) => None,
        (true, false) => Some(Regime::VoronoiCell),
        (false, true) => Some(Regime::AchievableRange),
        (true, true) if validity_g2(p) > validity_g1(p) => Some(Regime::AchievableRange),
        (true, true) => Some(Regime::VoronoiCell),
    }
}

fn regime_name(r: Regime) -> &'static str {
    match r {
        Regime::VoronoiCell => "voronoi-cell",
        Regime::AchievableRange => "achievable-range",
    }
}

/// Columns `ratio, gain_analytic, gain_sim, gain_sim_stderr`, sweeping the user
/// density at fixed BS density. Every ratio reuses the same seed.
pub fn run_gain(spec: &ExperimentSpec) -> Result<Table, CliError> {
    let p = make_params(&spec.params)?;
    let model = gain_model(spec, &p);
    let mut t = Table::new(&["ratio", "gain_analytic", "gain_sim", "gain_sim_stderr"]);
    manifest(&mut t, spec, &p, spec.has(Engine::Sim))?;
    t.meta("sweep", "lambda_ue = ratio * lambda_bs");
    if let Some(r) = model {
        t.meta("gain_model", regime_name(r));
    }
    for &ratio in &spec.ratios {
        let q = p.with_lambda_ue(ratio * p.lambda_bs())?;
        let analytic = match model {
            Some(r) => analytic_rates(&r.into(), &q)?.2,
            None => None,
        };
        let (sim, se) = if spec.has(Engine::Sim) {
            let r = rates_from_outcomes(&run_trials_parallel(&q, &spec.sim, spec.threads)?)?;
            (r.gain, r.gain.map(|_| r.gain_stderr))
        } else {
            (None, None)
        };
        t.push(vec![ratio.into(), analytic.into(), sim.into(), se.into()]);
    }
    Ok(t)
}

/// Columns `lambda_bs_per_km2, g1, g2`.
pub fn run_validity(spec: &ExperimentSpec) -> Result<Table, CliError> {
    let p = make_params(&spec.params)?;
    let mut t = Table::new(&["lambda_bs_per_km2", "g1", "g2"]);
    manifest(&mut t, spec, &p, false)?;
    t.meta("sweep", "lambda_bs_per_km2");
    for &l in &spec.lambda_bs_grid {
        let q = make_params(&RawParams { lambda_bs_per_km2: l, ..spec.params })?;
        t.push(vec![l.into(), validity_g1(&q).into(), validity_g2(&q).into()]);
    }
    Ok(t)
}

/// Columns `n, f_n1, f_n2, empirical`, from zero to the largest count any
/// requested engine needs to hold all but 1e-9 of its mass.
pub fn run_pmf(spec: &ExperimentSpec) -> Result<Table, CliError> {
    let p = make_params(&spec.params)?;
    let empirical = if spec.has(Engine::Sim) {
        Some(user_count_from_outcomes(&run_trials_parallel(&p, &spec.sim, spec.threads)?)?)
    } else {
        None
    };
    let mut max_n = empirical.as_ref().map_or(0, |e| e.max_count());
    for engine in [Engine::Analytic1, Engine::Analytic2] {
        if let (true, Some(m)) = (spec.has(engine), engine.model()) {
            max_n = max_n.max(truncation_support(&m, &p, DEFAULT_TAIL_MASS)?);
        }
    }
    let mut t = Table::new(&["n", "f_n1", "f_n2", "empirical"]);
    manifest(&mut t, spec, &p, empirical.is_some())?;
    for n in 0..=max_n {
        let mut row: Vec<Value> = vec![u64::from(n).into()];
        for engine in [Engine::Analytic1, Engine::Analytic2] {
            row.push(match (spec.has(engine), engine.model()) {
                (true, Some(m)) => m.pmf(n, &p)?.into(),
                _ => Value::Empty,
            });
        }
        row.push(empirical.as_ref().map(|e| e.pmf(n)).into());
        t.push(row);
    }
    Ok(t)
}

/// One realization with every user sampled. Columns
/// `kind, index, x_m, y_m, serving_bs, involved, scheduled, tx_power_mw`;
/// for a BS row `scheduled` holds the index of its scheduled user.
pub fn run_dump(spec: &ExperimentSpec) -> Result<Table, CliError> {
    let p = make_params(&spec.params)?;
    let cfg = SimulationConfig { sampling: UserSampling::FullWindow, ..spec.sim };
    cfg.validate(&p)?;
    let r = sample_realization(&p, &cfg, spec.trial_index)?;
    let mut t = Table::new(&["kind", "index", "x_m", "y_m", "serving_bs", "involved", "scheduled", "tx_power_mw"]);
    manifest(&mut t, &ExperimentSpec { sim: cfg, ..spec.clone() }, &p, true)?;
    t.meta("trial_index", spec.trial_index);
    if let Some(b) = r.measurement_bs {
        t.meta("measurement_bs", b);
    }
    let idx = |i: u32| Value::Int(u64::from(i));
    for (b, pt) in r.bs_points.iter().enumerate() {
        let sched = r.scheduled[b].map_or(Value::Empty, idx);
        t.push(vec![
            "bs".into(),
            (b as u64).into(),
            pt[0].into(),
            pt[1].into(),
            Value::Empty,
            Value::Empty,
            sched,
            Value::Empty,
        ]);
    }
    for (u, pt) in r.user_points.iter().enumerate() {
        let serving = r.serving[u].map_or(Value::Empty, idx);
        let scheduled = r.serving[u].map(|b| r.scheduled[b as usize] == Some(u as u32));
        let flag = |b: bool| Value::Int(u64::from(b));
        t.push(vec![
            "user".into(),
            (u as u64).into(),
            pt[0].into(),
            pt[1].into(),
            serving,
            flag(r.involved[u]),
            scheduled.map_or(Value::Empty, flag),
            r.tx_power(u, &p).into(),
        ]);
    }
    Ok(t)
}
