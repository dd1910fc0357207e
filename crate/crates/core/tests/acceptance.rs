//! End-to-end acceptance criteria. Every criterion is evaluated and reported
//! with one `PASS`/`FAIL` line; the test fails if any criterion fails.

use std::io::Write;
use std::time::Instant;

use pcattack::attack::{
    attacker_best_response, evpi, random_simplex_point, solve_p1_closed_form, solve_p1_numeric, solve_p2,
    solve_p3_gauss_seidel, unilateral_gains, P1Coefficients, PowerStrategy, DEFAULT_GRID, GAME_MAX_ITER, GAME_TOL,
};
use num_complex::Complex64;
use pcattack::channel::{annulus_radius, estimate_channels, sample_topology, ChannelRealization, Topology};
use pcattack::harness::{paper_config, run_experiment, write_cdf, write_csv, ExperimentSpec, Scale, Scenario, Unit};
use pcattack::hybrid::{build_scenarios, solve_p6_saa, Restriction};
use pcattack::rates::asymptotic_rates;
use pcattack::rng::seeded;
use pcattack::secrecy::{
    max_secrecy, solve_p4_bruteforce, solve_p5_chance, solve_p5_greedy, validate_chance, ChanceCoefficients,
    SecrecyCoefficients, DEFAULT_DELTA, DEFAULT_GRID_BUDGET,
};
use pcattack::{AttackVector, LargeScale, PowerAllocation, SystemConfig};
use rand::Rng;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn desk(d_max_attacker: f64) -> SystemConfig {
    let mut cfg = paper_config(Scale::Desk);
    cfg.d_max_attacker = d_max_attacker;
    cfg
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn strictly_decreasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] < w[0])
}

fn c1_closed_form_matches_numeric() -> Verdict {
    let start = Instant::now();
    let mut rng = seeded(1001);
    let (mut worst_obj, mut worst_alpha, mut bad) = (0.0f64, 0.0f64, 0);
    for _ in 0..500 {
        let users = rng.random_range(2..=10);
        let mut cfg = desk(rng.random_range(100.0..=750.0)).with_users(users);
        cfg.d_max_attacker = cfg.d_max_attacker.max(cfg.d_min);
        let ls = LargeScale::from_topology(&sample_topology(&mut rng, &cfg), &cfg).unwrap();
        let pa = PowerAllocation::new(random_simplex_point(&mut rng, users, cfg.bs_power), cfg.bs_power).unwrap();
        let coef = P1Coefficients::from_gains(&ls, &pa, &cfg).unwrap();
        let cf = solve_p1_closed_form(&coef).unwrap().alpha;
        let nm = solve_p1_numeric(&coef, users).unwrap();
        let dobj = rel(coef.objective(cf.as_slice()), coef.objective(nm.as_slice()));
        let dalpha = cf.as_slice().iter().zip(nm.as_slice()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        worst_obj = worst_obj.max(dobj);
        worst_alpha = worst_alpha.max(dalpha);
        if dobj > 1e-6 || dalpha > 1e-4 {
            bad += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        bad == 0 && secs < 30.0,
        format!("500 instances, {bad} mismatches, worst rel objective {worst_obj:.2e}, worst alpha {worst_alpha:.2e}, {secs:.1} s"),
    )
}

fn c2_asymptotic_validity() -> Verdict {
    let start = Instant::now();
    let mut spec = ExperimentSpec::new(Scenario::Fig4a, Scale::Desk);
    spec.realizations = 200;
    spec.sweep = Some(vec![64.0, 256.0, 1024.0]);
    let out = run_experiment(&spec).unwrap();
    let mean = |m: f64, scheme: &str, metric: &str| {
        out.rows
            .iter()
            .find(|r| r.sweep == m && r.scheme == scheme && r.metric == metric)
            .map(|r| r.mean)
            .unwrap()
    };
    let mut pass = true;
    let mut parts = Vec::new();
    for scheme in ["noPC", "PC-unc"] {
        let gaps: Vec<f64> = [64.0, 256.0, 1024.0]
            .iter()
            .map(|&m| (mean(m, scheme, "sum_rate") - mean(m, scheme, "sum_rate_exact")) / mean(m, scheme, "sum_rate"))
            .collect();
        let ok = gaps[1] > 0.0 && gaps[1] < 0.10 && strictly_decreasing(&gaps);
        pass &= ok;
        parts.push(format!(
            "{scheme}: relative gap {:.1}% / {:.1}% / {:.1}% at M = 64/256/1024",
            100.0 * gaps[0],
            100.0 * gaps[1],
            100.0 * gaps[2]
        ));
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(pass && secs < 300.0, format!("{}; {secs:.1} s", parts.join("; ")))
}

fn c3_attack_impact() -> Verdict {
    let cfg = desk(250.0);
    let pa = PowerAllocation::uniform(cfg.users, cfg.bs_power);
    let mut rng = seeded(1003);
    let (mut clean, mut attacked) = (0.0, 0.0);
    for _ in 0..500 {
        let ls = LargeScale::from_topology(&sample_topology(&mut rng, &cfg), &cfg).unwrap();
        clean += asymptotic_rates(&ls, &AttackVector::zeros(cfg.users), &pa, &cfg).sum_rate;
        let alpha = attacker_best_response(&ls, &pa, &cfg).unwrap();
        attacked += asymptotic_rates(&ls, &alpha, &pa, &cfg).sum_rate;
    }
    let reduction = 1.0 - attacked / clean;
    verdict(
        reduction > 0.40,
        format!("PC-pi cuts the mean sum-rate by {:.1}% (need > 50% +/- 10 pp)", 100.0 * reduction),
    )
}

fn c4_game_convergence() -> Verdict {
    let cfg = desk(750.0);
    let mut rng = seeded(1004);
    let (mut fast, mut saddle_ok) = (0, 0);
    let mut worst = 0.0f64;
    for i in 0..200 {
        let topo = sample_topology(&mut rng, &cfg);
        let ls = LargeScale::from_topology(&topo, &cfg).unwrap();
        if solve_p3_gauss_seidel(&cfg, &topo, GAME_TOL, 10).is_ok() {
            fast += 1;
        }
        let g = solve_p3_gauss_seidel(&cfg, &topo, GAME_TOL, GAME_MAX_ITER).unwrap();
        let (bs, att) = unilateral_gains(&ls, &cfg, &g, 100, &mut seeded(50_000 + i));
        let gain = bs.max(att) / g.value;
        worst = worst.max(gain);
        if gain <= GAME_TOL {
            saddle_ok += 1;
        }
    }
    verdict(
        fast >= 190 && saddle_ok == 200,
        format!("{fast}/200 converge within 10 iterations; saddle holds on {saddle_ok}/200 (worst relative deviation gain {worst:.1e})"),
    )
}

fn c5_evpi() -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for (i, r) in Scenario::Fig4b.default_sweep().into_iter().enumerate() {
        let cfg = desk(r);
        let e = evpi(&cfg, PowerStrategy::Uniform, 500, &mut seeded(1005 + i as u64), DEFAULT_GRID).unwrap();
        let (mbps, se) = (cfg.to_mbps(e.evpi), cfg.to_mbps(e.stderr));
        pass &= e.evpi >= -2.0 * e.stderr && (10.0..=35.0).contains(&mbps);
        parts.push(format!("{r:.0} m: {mbps:.1}+/-{se:.1}"));
    }
    verdict(pass, format!("EVPI (Mbps) by D_maxJ: {}", parts.join(", ")))
}

fn c6_symmetric_p2() -> Verdict {
    let cfg = desk(750.0);
    let pa = PowerAllocation::uniform(cfg.users, cfg.bs_power);
    let a = solve_p2(&cfg, &pa, DEFAULT_GRID).unwrap().alpha;
    let dev = a.as_slice().iter().map(|x| (x - 1.0 / cfg.users as f64).abs()).fold(0.0, f64::max);
    verdict(dev < 1e-4, format!("largest deviation from 1/K is {dev:.2e}"))
}

fn c7_secrecy_bounds() -> Verdict {
    let cfg3 = desk(325.0).with_users(3);
    let pa3 = PowerAllocation::uniform(3, cfg3.bs_power);
    let mut rng = seeded(1007);
    let (mut ordered, mut close, mut worst_gap) = (0, 0, 0.0f64);
    let instances = 20;
    for _ in 0..instances {
        let ls = LargeScale::from_topology(&sample_topology(&mut rng, &cfg3), &cfg3).unwrap();
        let p4 = solve_p4_bruteforce(&ls, &pa3, &cfg3, 100, DEFAULT_GRID_BUDGET).unwrap();
        let p5 = solve_p5_greedy(&SecrecyCoefficients::from_gains(&ls, &pa3, &cfg3).unwrap(), DEFAULT_DELTA).unwrap();
        let bound = p5.secrecy_bound();
        if p4.nu <= bound + 1e-9 {
            ordered += 1;
        }
        let gap = (bound - p4.nu) / p4.nu;
        worst_gap = worst_gap.max(gap);
        if gap < 0.10 {
            close += 1;
        }
    }
    let cfg = desk(325.0);
    let pa = PowerAllocation::uniform(cfg.users, cfg.bs_power);
    let (mut clean, mut attacked) = (0.0, 0.0);
    for _ in 0..500 {
        let ls = LargeScale::from_topology(&sample_topology(&mut rng, &cfg), &cfg).unwrap();
        clean += max_secrecy(&ls, &vec![0.0; cfg.users], &pa, &cfg);
        let p5 = solve_p5_greedy(&SecrecyCoefficients::from_gains(&ls, &pa, &cfg).unwrap(), DEFAULT_DELTA).unwrap();
        attacked += max_secrecy(&ls, p5.alpha.as_slice(), &pa, &cfg);
    }
    let ratio = attacked / clean;
    verdict(
        ordered == instances && close == instances && (0.45..=0.60).contains(&ratio),
        format!(
            "P4 <= P5 bound on {ordered}/{instances}; gap < 10% on {close}/{instances} (worst {:.1}%); PC-Sec keeps {:.1}% of the no-attack max secrecy ({:.0} -> {:.0} Mbps)",
            100.0 * worst_gap,
            100.0 * ratio,
            cfg.to_mbps(clean / 500.0),
            cfg.to_mbps(attacked / 500.0)
        ),
    )
}

fn c8_chance_coverage() -> Verdict {
    let cfg = desk(325.0);
    let pa = PowerAllocation::uniform(cfg.users, cfg.bs_power);
    let mut pass = true;
    let mut parts = Vec::new();
    for (i, eps) in [0.1, 0.3, 0.6].into_iter().enumerate() {
        let mut rng = seeded(1008 + i as u64);
        let (mut exceed, mut zero, mut n) = (0.0, 0.0, 0usize);
        for _ in 0..400 {
            let zj = annulus_radius(rng.random(), cfg.d_min, cfg.d_max_attacker);
            let sol = solve_p5_chance(&ChanceCoefficients::new(&cfg, &pa, zj, eps).unwrap(), DEFAULT_DELTA).unwrap();
            let v = validate_chance(&cfg, &pa, &sol.alpha, zj, sol.secrecy_bound(), eps, 25, &mut rng).unwrap();
            exceed += v.exceedance * v.samples as f64;
            zero += v.zero_fraction * v.samples as f64;
            n += v.samples;
        }
        let (exceed, zero) = (exceed / n as f64, zero / n as f64);
        let sigma = (eps * (1.0 - eps) / n as f64).sqrt();
        pass &= exceed <= eps + 3.0 * sigma;
        if eps == 0.6 {
            pass &= zero >= 0.4;
        }
        parts.push(format!("eps {eps}: exceedance {exceed:.3} (limit {:.3}), zero-secrecy {zero:.3}", eps + 3.0 * sigma));
    }
    verdict(pass, parts.join("; "))
}

fn c9_hybrid_dominance() -> Verdict {
    let cfg = desk(250.0);
    let pa = PowerAllocation::uniform(cfg.users, cfg.bs_power);
    let mut rng = seeded(1009);
    let instances = 10;
    let (mut dominated, mut nested) = (0, 0);
    let (mut pc_cut, mut data_cut) = (0.0, 0.0);
    for _ in 0..instances {
        let ls = LargeScale::from_topology(&sample_topology(&mut rng, &cfg), &cfg).unwrap();
        let set = build_scenarios(&mut rng, 4, cfg.users, 200).unwrap();
        let one = set.with_antennas(1).unwrap();
        let clean = asymptotic_rates(&ls, &AttackVector::zeros(cfg.users), &pa, &cfg).sum_rate;
        let pc = solve_p6_saa(&cfg, &ls, &pa, &one, Restriction::PilotOnly, 1e-8, None).unwrap();
        let h1 = solve_p6_saa(&cfg, &ls, &pa, &one, Restriction::Full, 1e-8, None).unwrap();
        let h4 = solve_p6_saa(&cfg, &ls, &pa, &set, Restriction::Full, 1e-8, Some(&h1)).unwrap();
        let data = solve_p6_saa(&cfg, &ls, &pa, &set, Restriction::DataOnly, 1e-8, None).unwrap();
        if h1.objective <= pc.objective + 1e-9 && h4.objective <= pc.objective + 1e-9 {
            dominated += 1;
        }
        if h4.objective <= h1.objective + 1e-9 {
            nested += 1;
        }
        pc_cut += clean - pc.objective;
        data_cut += clean - data.objective;
    }
    verdict(
        dominated == instances && nested == instances && data_cut < pc_cut,
        format!(
            "hybrid <= PC-only on {dominated}/{instances}; N=4 <= N=1 on {nested}/{instances}; mean reduction PC-only {:.1} Mbps vs data-only {:.1} Mbps",
            cfg.to_mbps(pc_cut / instances as f64),
            cfg.to_mbps(data_cut / instances as f64)
        ),
    )
}

fn c10_appendix_limits() -> Verdict {
    let base = desk(750.0).with_users(2);
    let topo = Topology::new(vec![300.0, 200.0], 300.0);
    let attack = AttackVector::new(vec![0.1, 0.0]).unwrap();
    let mut errs = [Vec::new(), Vec::new(), Vec::new()];
    for (i, m) in [64usize, 256, 1024].into_iter().enumerate() {
        let mut cfg = base.clone();
        cfg.antennas = m;
        let ls = LargeScale::from_topology(&topo, &cfg).unwrap();
        let (theta, theta_j) = (ls.user_gain[0], ls.attacker_gain);
        let noise = cfg.estimation_noise(0);
        let phi = theta + attack[0] * cfg.power_ratio(0) * theta_j + noise;
        let numerator_limit = theta * theta / (theta + noise);
        let leakage_limit = attack[0] * cfg.power_ratio(0) * theta_j * theta_j / phi;
        let mut rng = seeded(1010 + i as u64);
        let draws = 20_000;
        let (mut cross, mut numer, mut leak) = (0.0, 0.0, 0.0);
        for _ in 0..draws {
            let real = ChannelRealization::draw(&mut rng, &cfg);
            let h0: Vec<_> = real.users[0].iter().map(|g| g * theta.sqrt()).collect();
            let hj: Vec<_> = real.attacker.iter().map(|g| g * theta_j.sqrt()).collect();
            let clean = estimate_channels(&real, &ls, &AttackVector::zeros(2), &cfg).unwrap();
            let hit = estimate_channels(&real, &ls, &attack, &cfg).unwrap();
            cross += dot(&h0, &clean.precoders[1]).norm_sqr() / m as f64;
            numer += dot(&h0, &clean.precoders[0]).norm_sqr() / m as f64;
            leak += dot(&hj, &hit.precoders[0]).norm_sqr() / m as f64;
        }
        let n = draws as f64;
        errs[0].push(cross / n / theta);
        errs[1].push(rel(numer / n, numerator_limit));
        errs[2].push(rel(leak / n, leakage_limit));
    }
    let pass = errs.iter().all(|e| strictly_decreasing(e));
    let show = |e: &[f64]| e.iter().map(|x| format!("{x:.1e}")).collect::<Vec<_>>().join(" > ");
    verdict(
        pass,
        format!(
            "cross-user {} ; signal {} ; leakage {} (M = 64, 256, 1024)",
            show(&errs[0]),
            show(&errs[1]),
            show(&errs[2])
        ),
    )
}

fn c11_determinism() -> Verdict {
    let mut identical = 0;
    for scenario in Scenario::ALL {
        let mut spec = ExperimentSpec::new(scenario, Scale::Desk);
        spec.realizations = 2;
        spec.unit = Unit::Mbps;
        let render = |spec: &ExperimentSpec| {
            let out = run_experiment(spec).unwrap();
            let mut bytes = Vec::new();
            write_csv(&out.rows, &mut bytes).unwrap();
            for c in &out.cdfs {
                write_cdf(&c.samples, &mut bytes).unwrap();
            }
            bytes
        };
        if render(&spec) == render(&spec) {
            identical += 1;
        }
    }
    let total = Scenario::ALL.len();
    verdict(identical == total, format!("{identical}/{total} scenarios reproduce byte-identical output"))
}

#[test]
fn acceptance_criteria() {
    let criteria: [(&str, fn() -> Verdict); 11] = [
        ("closed-form attack matches numeric oracle", c1_closed_form_matches_numeric),
        ("asymptotic rates approximate finite-M Monte Carlo", c2_asymptotic_validity),
        ("informed attack halves the sum-rate", c3_attack_impact),
        ("power-control game converges to a saddle point", c4_game_convergence),
        ("EVPI sign and scale", c5_evpi),
        ("distribution-only attack is uniform for identical users", c6_symmetric_p2),
        ("secrecy bounds and secrecy reduction", c7_secrecy_bounds),
        ("chance-constrained attack coverage", c8_chance_coverage),
        ("hybrid attack dominance", c9_hybrid_dominance),
        ("large-M limits of beamforming gains", c10_appendix_limits),
        ("harness determinism", c11_determinism),
    ];
    let mut failed = Vec::new();
    let mut out = std::io::stdout().lock();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let v = run();
        let tag = if v.pass { "PASS" } else { "FAIL" };
        // written straight to stdout so the lines show up without --nocapture
        writeln!(out, "{tag} criterion {}: {name} -- {}", i + 1, v.detail).unwrap();
        out.flush().unwrap();
        if !v.pass {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
