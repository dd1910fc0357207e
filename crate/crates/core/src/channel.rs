//! Topologies, large-scale gains, Rayleigh small-scale fading and the
//! (possibly contaminated) pilot-phase channel estimates that drive MRT.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;

use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::rng::{complex_normal_vec, SimRng};

/// Distances from the BS to each user and to the attacker, plus the
/// attacker-to-user distances used by the data-phase jamming model.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    pub user_dist: Vec<f64>,
    pub attacker_dist: f64,
    pub attacker_user_dist: Vec<f64>,
}

impl Topology {
    /// Topology with the given radial distances. Attacker-user distances
    /// default to the user distances (attacker co-located with the BS).
    pub fn new(user_dist: Vec<f64>, attacker_dist: f64) -> Self {
        let attacker_user_dist = user_dist.clone();
        Self {
            user_dist,
            attacker_dist,
            attacker_user_dist,
        }
    }

    pub fn users(&self) -> usize {
        self.user_dist.len()
    }
}

/// Path gains `theta = A d^-gamma` for every link of a [`Topology`].
#[derive(Debug, Clone, PartialEq)]
pub struct LargeScale {
    pub user_gain: Vec<f64>,
    pub attacker_gain: f64,
    pub attacker_user_gain: Vec<f64>,
}

impl LargeScale {
    pub fn from_topology(topo: &Topology, cfg: &SystemConfig) -> Result<Self> {
        let user_gain = topo
            .user_dist
            .iter()
            .map(|&d| path_gain(d, cfg))
            .collect::<Result<Vec<_>>>()?;
        let attacker_user_gain = topo
            .attacker_user_dist
            .iter()
            .map(|&d| path_gain(d, cfg))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            user_gain,
            attacker_gain: path_gain(topo.attacker_dist, cfg)?,
            attacker_user_gain,
        })
    }

    pub fn users(&self) -> usize {
        self.user_gain.len()
    }
}

/// Pilot-power split of the attacker: `alpha_k` is the fraction of `P_J`
/// placed on user `k`'s pilot.
#[derive(Debug, Clone, PartialEq)]
pub struct AttackVector(Vec<f64>);

/// Slack allowed on the simplex budget when validating solver output.
pub const BUDGET_TOL: f64 = 1e-9;

impl AttackVector {
    pub fn new(alpha: Vec<f64>) -> Result<Self> {
        Self::with_budget(alpha, 1.0)
    }

    /// Attack vector constrained to `alpha >= 0, sum(alpha) <= budget`.
    pub fn with_budget(alpha: Vec<f64>, budget: f64) -> Result<Self> {
        if let Some(a) = alpha.iter().find(|a| !(a.is_finite() && **a >= 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "attack fractions must be finite and non-negative, got {a}"
            )));
        }
        let total: f64 = alpha.iter().sum();
        if total > budget * (1.0 + BUDGET_TOL) + BUDGET_TOL {
            return Err(Error::InvalidArgument(format!(
                "attack fractions sum to {total}, above the budget {budget}"
            )));
        }
        Ok(Self(alpha))
    }

    pub fn zeros(users: usize) -> Self {
        Self(vec![0.0; users])
    }

    pub fn uniform(users: usize) -> Self {
        Self(vec![1.0 / users as f64; users])
    }

    /// Entire budget on a single user's pilot.
    pub fn single(users: usize, target: usize) -> Self {
        let mut a = vec![0.0; users];
        a[target] = 1.0;
        Self(a)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }
}

impl std::ops::Index<usize> for AttackVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Small-scale fading draws for one network realization.
#[derive(Debug, Clone)]
pub struct ChannelRealization {
    /// `K x M` user gains `g_k`.
    pub users: Vec<Vec<Complex64>>,
    /// `1 x M` attacker-to-BS gains `g_J`.
    pub attacker: Vec<Complex64>,
    /// `K x M` projected pilot noise, entries `CN(0, 1/(P_k L))`.
    pub est_noise: Vec<Vec<Complex64>>,
    /// `N x K` attacker-antenna-to-user gains, present when drawn for the
    /// data-phase jamming model.
    pub attacker_users: Option<Vec<Vec<Complex64>>>,
}

impl ChannelRealization {
    pub fn draw(rng: &mut SimRng, cfg: &SystemConfig) -> Self {
        let m = cfg.antennas;
        let users = (0..cfg.users)
            .map(|_| complex_normal_vec(rng, m, 1.0))
            .collect();
        let attacker = complex_normal_vec(rng, m, 1.0);
        let est_noise = (0..cfg.users)
            .map(|k| complex_normal_vec(rng, m, cfg.estimation_noise(k)))
            .collect();
        Self {
            users,
            attacker,
            est_noise,
            attacker_users: None,
        }
    }

    pub fn draw_with_jammer(rng: &mut SimRng, cfg: &SystemConfig, jam_antennas: usize) -> Self {
        let mut real = Self::draw(rng, cfg);
        real.attacker_users = Some(
            (0..jam_antennas)
                .map(|_| complex_normal_vec(rng, cfg.users, 1.0))
                .collect(),
        );
        real
    }

    /// Realization with noiseless channel estimation.
    pub fn without_estimation_noise(mut self) -> Self {
        for row in &mut self.est_noise {
            row.iter_mut().for_each(|w| *w = Complex64::new(0.0, 0.0));
        }
        self
    }

    pub fn antennas(&self) -> usize {
        self.attacker.len()
    }
}

/// Channel estimates `h_hat_k` and their unit-norm MRT precoders
/// `v_k = conj(h_hat_k) / |h_hat_k|`.
#[derive(Debug, Clone)]
pub struct EstimatedChannels {
    pub estimates: Vec<Vec<Complex64>>,
    pub precoders: Vec<Vec<Complex64>>,
}

/// Radius at CDF level `u` of the uniform-in-annulus law
/// `Pr[Z <= x] = (x^2 - inner^2) / (outer^2 - inner^2)`.
pub fn annulus_radius(u: f64, inner: f64, outer: f64) -> f64 {
    (inner * inner + u * (outer * outer - inner * inner)).sqrt()
}

/// Draws users and attacker uniformly over their annuli with independent
/// uniform angles; attacker-user distances follow from the plane geometry,
/// floored at `d_min`.
pub fn sample_topology(rng: &mut SimRng, cfg: &SystemConfig) -> Topology {
    let mut user_dist = Vec::with_capacity(cfg.users);
    let mut user_angle = Vec::with_capacity(cfg.users);
    for _ in 0..cfg.users {
        user_dist.push(annulus_radius(rng.random(), cfg.d_min, cfg.d_max));
        user_angle.push(2.0 * PI * rng.random::<f64>());
    }
    let attacker_dist = annulus_radius(rng.random(), cfg.d_min, cfg.d_max_attacker);
    let attacker_angle = 2.0 * PI * rng.random::<f64>();
    let attacker_user_dist = user_dist
        .iter()
        .zip(&user_angle)
        .map(|(&z, &phi)| {
            let d2 = z * z + attacker_dist * attacker_dist
                - 2.0 * z * attacker_dist * (phi - attacker_angle).cos();
            d2.max(0.0).sqrt().max(cfg.d_min)
        })
        .collect();
    Topology {
        user_dist,
        attacker_dist,
        attacker_user_dist,
    }
}

/// Large-scale gain `A d^-gamma`.
pub fn path_gain(distance: f64, cfg: &SystemConfig) -> Result<f64> {
    if !(distance > 0.0) {
        return Err(Error::Domain(format!(
            "path gain needs a positive distance, got {distance}"
        )));
    }
    Ok(cfg.path_loss_const * distance.powf(-cfg.path_loss_exp))
}

pub(crate) fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Unconjugated inner product `a b^T`.
pub(crate) fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Forms `h_hat_k = sqrt(theta_k) g_k + sqrt(alpha_k u_k theta_J) g_J + w_k`
/// for every user and the matching MRT precoders.
pub fn estimate_channels(
    real: &ChannelRealization,
    ls: &LargeScale,
    attack: &AttackVector,
    cfg: &SystemConfig,
) -> Result<EstimatedChannels> {
    let k_users = real.users.len();
    if ls.users() != k_users || attack.len() != k_users || real.est_noise.len() != k_users {
        return Err(Error::InvalidArgument(format!(
            "dimension mismatch: {} channels, {} gains, {} attack entries",
            k_users,
            ls.users(),
            attack.len()
        )));
    }
    let mut estimates = Vec::with_capacity(k_users);
    let mut precoders = Vec::with_capacity(k_users);
    for k in 0..k_users {
        let a_user = ls.user_gain[k].sqrt();
        let a_att = (attack[k] * cfg.power_ratio(k) * ls.attacker_gain).sqrt();
        let est: Vec<Complex64> = real.users[k]
            .iter()
            .zip(&real.attacker)
            .zip(&real.est_noise[k])
            .map(|((g, gj), w)| g * a_user + gj * a_att + w)
            .collect();
        let n = norm(&est);
        if !(n > 0.0) {
            return Err(Error::DegenerateEstimate { user: k });
        }
        precoders.push(est.iter().map(|z| z.conj() / n).collect());
        estimates.push(est);
    }
    Ok(EstimatedChannels {
        estimates,
        precoders,
    })
}
