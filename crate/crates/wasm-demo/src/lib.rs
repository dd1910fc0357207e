//! Browser bindings for a few interactive views of the attack models.
//! Each entry point takes and returns JSON so the page stays framework-free.

use pcattack::attack::{attacker_best_response, solve_p2, water_filling, DEFAULT_GRID};
use pcattack::channel::sample_topology;
use pcattack::harness::{paper_config, Scale};
use pcattack::rates::asymptotic_rates;
use pcattack::rng::{seeded, stream};
use pcattack::secrecy::{solve_p5_chance, ChanceCoefficients, DEFAULT_DELTA};
use pcattack::{AttackVector, LargeScale, PowerAllocation, SystemConfig, Topology};
use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

fn config(antennas: usize, users: usize) -> SystemConfig {
    let mut cfg = paper_config(Scale::Desk).with_users(users);
    cfg.antennas = antennas;
    cfg
}

#[derive(Deserialize)]
pub struct CurveRequest {
    pub radii: Vec<f64>,
    pub antennas: usize,
    pub users: usize,
    pub realizations: usize,
    pub seed: u64,
}

#[derive(Serialize, Debug)]
pub struct CurvePoint {
    pub radius: f64,
    pub no_attack: f64,
    pub blind: f64,
    pub informed: f64,
}

/// Mean sum-rate (Mbps) against the attacker radius for no attack, the
/// distribution-only attack and the fully informed attack.
pub fn sum_rate_curve(req: &CurveRequest) -> Result<Vec<CurvePoint>, String> {
    if req.realizations == 0 || req.radii.is_empty() {
        return Err("need at least one radius and one realization".into());
    }
    let mut out = Vec::with_capacity(req.radii.len());
    for (i, &radius) in req.radii.iter().enumerate() {
        let mut cfg = config(req.antennas, req.users);
        cfg.d_max_attacker = radius;
        cfg.validate().map_err(|e| e.to_string())?;
        let pa = PowerAllocation::uniform(cfg.users, cfg.bs_power);
        let blind = solve_p2(&cfg, &pa, DEFAULT_GRID).map_err(|e| e.to_string())?.alpha;
        let mut rng = stream(req.seed, i as u64);
        let (mut a, mut b, mut c) = (0.0, 0.0, 0.0);
        for _ in 0..req.realizations {
            let ls = LargeScale::from_topology(&sample_topology(&mut rng, &cfg), &cfg).map_err(|e| e.to_string())?;
            let informed = attacker_best_response(&ls, &pa, &cfg).map_err(|e| e.to_string())?;
            a += asymptotic_rates(&ls, &AttackVector::zeros(cfg.users), &pa, &cfg).sum_rate;
            b += asymptotic_rates(&ls, &blind, &pa, &cfg).sum_rate;
            c += asymptotic_rates(&ls, &informed, &pa, &cfg).sum_rate;
        }
        let n = req.realizations as f64;
        out.push(CurvePoint {
            radius,
            no_attack: cfg.to_mbps(a / n),
            blind: cfg.to_mbps(b / n),
            informed: cfg.to_mbps(c / n),
        });
    }
    Ok(out)
}

#[derive(Deserialize)]
pub struct TopologyRequest {
    /// User distances in meters; drawn from `seed` when empty.
    #[serde(default)]
    pub users: Vec<f64>,
    pub attacker: f64,
    pub antennas: usize,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Serialize, Debug)]
pub struct TopologyView {
    pub distances: Vec<f64>,
    pub attack: Vec<f64>,
    /// Water-filling response of the BS to the attack, as power shares.
    pub power: Vec<f64>,
    pub clean_mbps: Vec<f64>,
    pub attacked_mbps: Vec<f64>,
    pub defended_mbps: Vec<f64>,
}

/// Optimal attack on one topology and the BS's water-filling response.
pub fn single_topology(req: &TopologyRequest) -> Result<TopologyView, String> {
    let users = if req.users.is_empty() { 10 } else { req.users.len() };
    let mut cfg = config(req.antennas, users);
    cfg.d_max_attacker = cfg.d_max_attacker.max(req.attacker);
    cfg.validate().map_err(|e| e.to_string())?;
    let distances = if req.users.is_empty() {
        sample_topology(&mut seeded(req.seed), &cfg).user_dist
    } else {
        req.users.clone()
    };
    let ls = LargeScale::from_topology(&Topology::new(distances.clone(), req.attacker), &cfg).map_err(|e| e.to_string())?;
    let pa = PowerAllocation::uniform(users, cfg.bs_power);
    let attack = attacker_best_response(&ls, &pa, &cfg).map_err(|e| e.to_string())?;
    let power = water_filling(&ls, &attack, &cfg);
    let mbps = |rates: Vec<f64>| rates.into_iter().map(|r| cfg.to_mbps(r)).collect();
    Ok(TopologyView {
        clean_mbps: mbps(asymptotic_rates(&ls, &AttackVector::zeros(users), &pa, &cfg).rates),
        attacked_mbps: mbps(asymptotic_rates(&ls, &attack, &pa, &cfg).rates),
        defended_mbps: mbps(asymptotic_rates(&ls, &attack, &power, &cfg).rates),
        power: power.as_slice().iter().map(|p| p / cfg.bs_power).collect(),
        attack: attack.into_inner(),
        distances,
    })
}

#[derive(Deserialize)]
pub struct ChanceRequest {
    pub epsilons: Vec<f64>,
    pub attacker: f64,
    pub users: usize,
}

#[derive(Serialize, Debug)]
pub struct ChancePoint {
    pub epsilon: f64,
    /// Secrecy level (Mbps) exceeded by at most an `epsilon` fraction of users.
    pub threshold_mbps: f64,
}

/// Chance-constrained secrecy threshold against the risk level.
pub fn chance_thresholds(req: &ChanceRequest) -> Result<Vec<ChancePoint>, String> {
    let cfg = config(paper_config(Scale::Desk).antennas, req.users);
    cfg.validate().map_err(|e| e.to_string())?;
    let pa = PowerAllocation::uniform(req.users, cfg.bs_power);
    req.epsilons
        .iter()
        .map(|&epsilon| {
            let coef = ChanceCoefficients::new(&cfg, &pa, req.attacker, epsilon).map_err(|e| e.to_string())?;
            let sol = solve_p5_chance(&coef, DEFAULT_DELTA).map_err(|e| e.to_string())?;
            Ok(ChancePoint {
                epsilon,
                threshold_mbps: cfg.to_mbps(sol.secrecy_bound()),
            })
        })
        .collect()
}

fn json_call<Req, Resp>(input: &str, f: impl FnOnce(&Req) -> Result<Resp, String>) -> Result<String, JsValue>
where
    Req: for<'de> Deserialize<'de>,
    Resp: Serialize,
{
    let req: Req = serde_json::from_str(input).map_err(|e| JsValue::from_str(&e.to_string()))?;
    let resp = f(&req).map_err(|e| JsValue::from_str(&e))?;
    serde_json::to_string(&resp).map_err(|e| JsValue::from_str(&e.to_string()))
}

#[wasm_bindgen(js_name = sumRateCurve)]
pub fn sum_rate_curve_js(request: &str) -> Result<String, JsValue> {
    json_call(request, sum_rate_curve)
}

#[wasm_bindgen(js_name = singleTopology)]
pub fn single_topology_js(request: &str) -> Result<String, JsValue> {
    json_call(request, single_topology)
}

#[wasm_bindgen(js_name = chanceThresholds)]
pub fn chance_thresholds_js(request: &str) -> Result<String, JsValue> {
    json_call(request, chance_thresholds)
}
