//! Seeded Monte Carlo runner: one independent random stream per
//! `(sweep point, realization)`, realizations fanned out across threads and
//! reduced in index order so results are bit-for-bit reproducible.

use rand::Rng;

use super::catalog::{Scenario, Scheme, SweepVar};
use super::output::ResultRow;
use super::spec::{ExperimentSpec, Unit};
use crate::attack::{attacker_best_response, game_value, solve_p1_closed_form_budget, solve_p2, solve_p3_gauss_seidel, P1Coefficients, GAME_MAX_ITER, GAME_TOL};
use crate::channel::{annulus_radius, estimate_channels, sample_topology, AttackVector, ChannelRealization, LargeScale};
use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::hybrid::{build_scenarios, solve_p6_saa, Restriction};
use crate::rates::{asymptotic_rates, exact_rates, secrecy_report, PowerAllocation, RateReport};
use crate::rng::{stream, stream_index, SimRng};
use crate::secrecy::{grid_points, solve_p4_bruteforce, solve_p5_chance, solve_p5_greedy, ChanceCoefficients, SecrecyCoefficients};
use crate::stats::{cdf_at, mean_stderr};

/// Per-user samples behind an empirical CDF.
#[derive(Debug, Clone, PartialEq)]
pub struct CdfSeries {
    pub sweep: f64,
    pub scheme: String,
    pub samples: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub rows: Vec<ResultRow>,
    pub cdfs: Vec<CdfSeries>,
}

/// Number of thresholds at which CDF scenarios are tabulated.
const CDF_POINTS: usize = 21;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Metric {
    SumRate,
    SumRateExact,
    Fairness,
    MaxSecrecy,
    SecrecyBound,
    Evpi,
    Exceedance,
    ZeroSecrecy,
}

impl Metric {
    fn name(self) -> &'static str {
        match self {
            Metric::SumRate => "sum_rate",
            Metric::SumRateExact => "sum_rate_exact",
            Metric::Fairness => "fairness",
            Metric::MaxSecrecy => "max_secrecy",
            Metric::SecrecyBound => "secrecy_bound",
            Metric::Evpi => "evpi",
            Metric::Exceedance => "exceedance",
            Metric::ZeroSecrecy => "zero_secrecy",
        }
    }

    fn is_rate(self) -> bool {
        !matches!(self, Metric::Fairness | Metric::Exceedance | Metric::ZeroSecrecy)
    }
}

/// Output of one realization: scalar metrics keyed by `(scheme, metric)` and
/// optional per-user samples keyed by scheme.
#[derive(Debug, Default)]
struct Sample {
    values: Vec<(Scheme, Metric, f64)>,
    users: Vec<(Scheme, Vec<f64>)>,
}

impl Sample {
    fn push(&mut self, scheme: Scheme, metric: Metric, v: f64) {
        self.values.push((scheme, metric, v));
    }

    fn rates(&mut self, scheme: Scheme, report: &RateReport) {
        self.push(scheme, Metric::SumRate, report.sum_rate);
        self.push(scheme, Metric::Fairness, report.fairness);
        self.users.push((scheme, report.rates.clone()));
    }
}

/// Quantities shared by all realizations of one sweep point.
struct PointContext {
    cfg: SystemConfig,
    pa: PowerAllocation,
    /// Distribution-only attack, when the scenario needs it.
    blind: Option<AttackVector>,
    /// Largest grid resolution allowed by the brute-force budget.
    p4_divisions: usize,
    /// Largest attacker antenna count of the sweep (scenario draws nest).
    max_antennas: usize,
    sweep: f64,
}

fn apply_sweep(cfg: &SystemConfig, var: SweepVar, v: f64) -> SystemConfig {
    let mut c = cfg.clone();
    match var {
        SweepVar::Antennas => c.antennas = v as usize,
        SweepVar::AttackerRadius => c.d_max_attacker = v,
        SweepVar::PilotLen => c.pilot_len = v as usize,
        SweepVar::JamAntennas | SweepVar::Epsilon => {}
    }
    c
}

/// Fixed attacker radius of scenarios that do not sweep it.
fn scenario_radius(scenario: Scenario) -> Option<f64> {
    match scenario {
        Scenario::Fig4d | Scenario::Fig4e => Some(250.0),
        Scenario::Fig4i => Some(325.0),
        _ => None,
    }
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentOutput> {
    spec.validate()?;
    let scenario = spec.scenario;
    let var = scenario.sweep_var();
    let sweep = spec.sweep_values();
    let mut base = spec.system();
    if let Some(r) = scenario_radius(scenario) {
        base.d_max_attacker = r;
    }
    let max_antennas = sweep.iter().fold(1.0f64, |m, v| m.max(*v)) as usize;

    let mut rows = Vec::new();
    let mut cdfs = Vec::new();
    for (si, &sv) in sweep.iter().enumerate() {
        let cfg = apply_sweep(&base, var, sv);
        cfg.validate()?;
        let pa = PowerAllocation::uniform(cfg.users, cfg.bs_power);
        let blind = match scenario {
            Scenario::Fig4b | Scenario::Fig4c | Scenario::Fig4d | Scenario::Fig4g => {
                Some(solve_p2(&cfg, &pa, spec.grid)?.alpha)
            }
            _ => None,
        };
        let p4_divisions = (1..)
            .take_while(|d| grid_points(cfg.users, *d) <= spec.p4_points as u128)
            .last()
            .unwrap_or(0);
        let ctx = PointContext {
            cfg,
            pa,
            blind,
            p4_divisions,
            max_antennas,
            sweep: sv,
        };
        let samples = run_realizations(spec, |r| {
            // hybrid draws nest across antenna counts, so they ignore the sweep index
            let idx = if scenario == Scenario::Fig4e { 0 } else { si };
            let mut rng = stream(spec.seed, stream_index(idx, r));
            realize(spec, &ctx, &mut rng)
        })?;
        aggregate(spec, &ctx, &samples, &mut rows, &mut cdfs);
    }
    Ok(ExperimentOutput { rows, cdfs })
}

fn run_realizations<F>(spec: &ExperimentSpec, f: F) -> Result<Vec<Sample>>
where
    F: Fn(usize) -> Result<Sample> + Sync + Send,
{
    let wrap = |r: usize| {
        f(r).map_err(|e| Error::Realization {
            realization: r,
            seed: spec.seed,
            source: Box::new(e),
        })
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..spec.realizations).into_par_iter().map(wrap).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..spec.realizations).map(wrap).collect()
    }
}

fn realize(spec: &ExperimentSpec, ctx: &PointContext, rng: &mut SimRng) -> Result<Sample> {
    let cfg = &ctx.cfg;
    let pa = &ctx.pa;
    let k = cfg.users;
    let mut out = Sample::default();
    match spec.scenario {
        Scenario::Fig4a => {
            let topo = sample_topology(rng, cfg);
            let ls = LargeScale::from_topology(&topo, cfg)?;
            let real = ChannelRealization::draw(rng, cfg);
            for (scheme, alpha) in [(Scheme::NoPc, AttackVector::zeros(k)), (Scheme::PcUnc, AttackVector::uniform(k))] {
                out.push(scheme, Metric::SumRate, asymptotic_rates(&ls, &alpha, pa, cfg).sum_rate);
                let est = estimate_channels(&real, &ls, &alpha, cfg)?;
                out.push(scheme, Metric::SumRateExact, exact_rates(&real, &ls, &est, pa).sum_rate);
            }
        }
        Scenario::Fig4b | Scenario::Fig4c | Scenario::Fig4d | Scenario::Fig4g => {
            let topo = sample_topology(rng, cfg);
            let ls = LargeScale::from_topology(&topo, cfg)?;
            let target = rng.random_range(0..k);
            let blind = ctx.blind.clone().expect("distribution-only attack is precomputed");
            let informed = attacker_best_response(&ls, pa, cfg)?;
            let no = asymptotic_rates(&ls, &AttackVector::zeros(k), pa, cfg);
            let unc = asymptotic_rates(&ls, &blind, pa, cfg);
            let pi = asymptotic_rates(&ls, &informed, pa, cfg);
            out.rates(Scheme::NoPc, &no);
            out.rates(Scheme::SingleUserPc, &asymptotic_rates(&ls, &AttackVector::single(k, target), pa, cfg));
            out.push(Scheme::PcUnc, Metric::Evpi, unc.sum_rate - pi.sum_rate);
            out.rates(Scheme::PcUnc, &unc);
            out.rates(Scheme::PcPi, &pi);
            let game = solve_p3_gauss_seidel(cfg, &topo, GAME_TOL, GAME_MAX_ITER)?;
            out.rates(Scheme::OptimalPcPi, &asymptotic_rates(&ls, &game.alpha, &game.power, cfg));
        }
        Scenario::Fig4e => {
            let topo = sample_topology(rng, cfg);
            let ls = LargeScale::from_topology(&topo, cfg)?;
            let all = build_scenarios(rng, ctx.max_antennas, k, spec.saa_scenarios)?;
            let set = all.with_antennas(ctx.sweep as usize)?;
            let pilot_budget = (cfg.t_pilot + cfg.t_data) / cfg.t_pilot;
            let pc = solve_p1_closed_form_budget(&P1Coefficients::from_gains(&ls, pa, cfg)?, pilot_budget)?;
            out.push(Scheme::PcPi, Metric::SumRate, game_value(&ls, &pc.alpha, pa, cfg));
            let tol = 1e-8;
            let hybrid = solve_p6_saa(cfg, &ls, pa, &set, Restriction::Full, tol, None)?;
            out.push(Scheme::Hybrid, Metric::SumRate, hybrid.objective);
            let data = solve_p6_saa(cfg, &ls, pa, &set, Restriction::DataOnly, tol, None)?;
            out.push(Scheme::DataJam, Metric::SumRate, data.objective);
        }
        Scenario::Fig4f | Scenario::Fig4h => {
            let topo = sample_topology(rng, cfg);
            let ls = LargeScale::from_topology(&topo, cfg)?;
            let none = secrecy_report(&ls, &AttackVector::zeros(k), pa, cfg);
            out.push(Scheme::NoPc, Metric::MaxSecrecy, none.max_secrecy);
            out.users.push((Scheme::NoPc, none.secrecy));
            let greedy = solve_p5_greedy(&SecrecyCoefficients::from_gains(&ls, pa, cfg)?, spec.delta)?;
            let sec = secrecy_report(&ls, &greedy.alpha, pa, cfg);
            out.push(Scheme::PcSecP5, Metric::MaxSecrecy, sec.max_secrecy);
            out.push(Scheme::PcSecP5, Metric::SecrecyBound, greedy.secrecy_bound());
            out.users.push((Scheme::PcSecP5, sec.secrecy));
            if spec.scenario == Scenario::Fig4f {
                let p4 = solve_p4_bruteforce(&ls, pa, cfg, ctx.p4_divisions, spec.p4_points as u128)?;
                out.push(Scheme::PcSecP4, Metric::MaxSecrecy, p4.nu);
            }
        }
        Scenario::Fig4i => {
            let eps = ctx.sweep;
            let attacker_dist = annulus_radius(rng.random(), cfg.d_min, cfg.d_max_attacker);
            for users in [10usize, 20] {
                let c = cfg.with_users(users);
                let pa = PowerAllocation::uniform(users, c.bs_power);
                let coef = ChanceCoefficients::new(&c, &pa, attacker_dist, eps)?;
                let sol = solve_p5_chance(&coef, spec.delta)?;
                let threshold = sol.secrecy_bound();
                let scheme = Scheme::Chance(users);
                out.push(scheme, Metric::MaxSecrecy, threshold);
                let dist = (0..users)
                    .map(|_| annulus_radius(rng.random(), c.d_min, c.d_max))
                    .collect();
                let ls = LargeScale::from_topology(&crate::channel::Topology::new(dist, attacker_dist), &c)?;
                let sec = secrecy_report(&ls, &sol.alpha, &pa, &c);
                let n = users as f64;
                out.push(scheme, Metric::Exceedance, sec.secrecy.iter().filter(|s| **s > threshold).count() as f64 / n);
                out.push(scheme, Metric::ZeroSecrecy, sec.secrecy.iter().filter(|s| **s <= 0.0).count() as f64 / n);
            }
        }
    }
    Ok(out)
}

fn metrics_for(scenario: Scenario) -> &'static [Metric] {
    match scenario {
        Scenario::Fig4a => &[Metric::SumRate, Metric::SumRateExact],
        Scenario::Fig4b => &[Metric::SumRate, Metric::Evpi],
        Scenario::Fig4c => &[Metric::Fairness],
        Scenario::Fig4d | Scenario::Fig4e => &[Metric::SumRate],
        Scenario::Fig4f => &[Metric::MaxSecrecy, Metric::SecrecyBound],
        Scenario::Fig4g | Scenario::Fig4h => &[],
        Scenario::Fig4i => &[Metric::MaxSecrecy, Metric::Exceedance, Metric::ZeroSecrecy],
    }
}

fn aggregate(spec: &ExperimentSpec, ctx: &PointContext, samples: &[Sample], rows: &mut Vec<ResultRow>, cdfs: &mut Vec<CdfSeries>) {
    let scale = |metric_is_rate: bool, v: f64| -> f64 {
        if metric_is_rate && spec.unit == Unit::Mbps {
            ctx.cfg.to_mbps(v)
        } else {
            v
        }
    };
    let wanted = metrics_for(spec.scenario);
    for scheme in spec.scenario.schemes() {
        for &metric in wanted {
            let xs: Vec<f64> = samples
                .iter()
                .flat_map(|s| s.values.iter())
                .filter(|(sc, m, _)| *sc == scheme && *m == metric)
                .map(|(_, _, v)| scale(metric.is_rate(), *v))
                .collect();
            if xs.is_empty() {
                continue;
            }
            let (mean, stderr) = mean_stderr(&xs);
            rows.push(ResultRow {
                sweep: ctx.sweep,
                scheme: scheme.label(),
                metric: metric.name().into(),
                mean,
                stderr,
                n: xs.len(),
            });
        }
    }
    if !spec.scenario.is_cdf() {
        return;
    }
    let series: Vec<(Scheme, Vec<f64>)> = spec
        .scenario
        .schemes()
        .into_iter()
        .map(|scheme| {
            let xs = samples
                .iter()
                .flat_map(|s| s.users.iter())
                .filter(|(sc, _)| *sc == scheme)
                .flat_map(|(_, v)| v.iter().map(|x| scale(true, *x)))
                .collect();
            (scheme, xs)
        })
        .collect();
    let hi = series
        .iter()
        .flat_map(|(_, xs)| xs.iter())
        .fold(0.0f64, |m, v| m.max(*v));
    for (scheme, xs) in series {
        if xs.is_empty() {
            continue;
        }
        let n = xs.len();
        for i in 0..CDF_POINTS {
            let x = hi * i as f64 / (CDF_POINTS - 1) as f64;
            let p = cdf_at(&xs, x);
            rows.push(ResultRow {
                sweep: x,
                scheme: scheme.label(),
                metric: "cdf_point".into(),
                mean: p,
                stderr: (p * (1.0 - p) / n as f64).sqrt(),
                n,
            });
        }
        cdfs.push(CdfSeries {
            sweep: ctx.sweep,
            scheme: scheme.label(),
            samples: xs,
        });
    }
}
