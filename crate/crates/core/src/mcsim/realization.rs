use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Poisson, StandardUniform};

use crate::params::NetworkParams;

use super::{SimError, SimulationConfig, UserSampling};

// Shadowed by inherent methods whenever std is in the build graph.
#[allow(unused_imports)]
use num_traits::Float;

pub type Point = [f64; 2];

/// One sampled snapshot of the network inside a disc window centred at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkRealization {
    pub window_radius: f64,
    pub bs_points: Vec<Point>,
    pub user_points: Vec<Point>,
    /// Nearest BS of each user, `None` only when there are no BSs.
    pub serving: Vec<Option<u32>>,
    pub serving_distance: Vec<f64>,
    /// Serving distance at most `R`.
    pub involved: Vec<bool>,
    /// Fade `h` of each user's link to its own BS.
    pub fading: Vec<f64>,
    /// Fade `g` of each user's link to the measurement BS.
    pub cross_fading: Vec<f64>,
    /// Normalized-SNR choice per BS.
    pub scheduled: Vec<Option<u32>>,
    /// Uniformly random involved user per BS.
    pub round_robin: Vec<Option<u32>>,
    /// BS whose cell is measured, chosen uniformly within half the window radius.
    pub measurement_bs: Option<u32>,
}

impl NetworkRealization {
    /// Transmit power `ρ_o d^α` of an involved user, in mW.
    pub fn tx_power(&self, user: usize, p: &NetworkParams) -> Option<f64> {
        self.involved[user].then(|| p.rho_target() * self.serving_distance[user].powf(p.alpha()))
    }

    /// Involved users of one BS, in user order.
    pub fn involved_users(&self, bs: u32) -> impl Iterator<Item = usize> + '_ {
        (0..self.user_points.len()).filter(move |&u| self.involved[u] && self.serving[u] == Some(bs))
    }

    pub fn is_empty(&self) -> bool {
        self.measurement_bs.is_none()
    }
}

/// Index of the largest fade, lowest index on ties; `None` for no candidates.
pub fn select_normalized_snr(fades: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &h) in fades.iter().enumerate() {
        match best {
            Some(b) if fades[b] >= h => {}
            _ => best = Some(i),
        }
    }
    best
}

/// Uniform grid over BS positions for nearest-neighbour queries.
pub(crate) struct BsGrid<'a> {
    points: &'a [Point],
    origin: f64,
    cell: f64,
    dim: usize,
    offsets: Vec<u32>,
    items: Vec<u32>,
}

impl<'a> BsGrid<'a> {
    pub(crate) fn new(points: &'a [Point], half_width: f64, cell: f64) -> Self {
        let dim = ((2.0 * half_width / cell).ceil() as usize).clamp(1, 1024);
        let cell = 2.0 * half_width / dim as f64;
        let mut grid =
            Self { points, origin: -half_width, cell, dim, offsets: vec![0; dim * dim + 1], items: Vec::new() };
        let slots: Vec<usize> = points.iter().map(|p| grid.slot(*p)).collect();
        for &s in &slots {
            grid.offsets[s + 1] += 1;
        }
        for i in 0..dim * dim {
            grid.offsets[i + 1] += grid.offsets[i];
        }
        let mut fill = grid.offsets.clone();
        grid.items = vec![0; points.len()];
        for (i, &s) in slots.iter().enumerate() {
            grid.items[fill[s] as usize] = i as u32;
            fill[s] += 1;
        }
        grid
    }

    fn coord(&self, x: f64) -> usize {
        (((x - self.origin) / self.cell).floor().max(0.0) as usize).min(self.dim - 1)
    }

    fn slot(&self, p: Point) -> usize {
        self.coord(p[1]) * self.dim + self.coord(p[0])
    }

    /// Nearest point and squared distance; lowest index on ties.
    pub(crate) fn nearest(&self, x: Point) -> Option<(u32, f64)> {
        if self.points.is_empty() {
            return None;
        }
        let cx = self.coord(x[0]) as isize;
        let cy = self.coord(x[1]) as isize;
        let dim = self.dim as isize;
        let mut best: Option<(u32, f64)> = None;
        for ring in 0..=dim {
            for gy in cy - ring..=cy + ring {
                if gy < 0 || gy >= dim {
                    continue;
                }
                let edge = gy == cy - ring || gy == cy + ring;
                let step = if edge || ring == 0 { 1 } else { 2 * ring };
                let mut gx = cx - ring;
                while gx <= cx + ring {
                    if gx >= 0 && gx < dim {
                        let s = (gy * dim + gx) as usize;
                        for &i in &self.items[self.offsets[s] as usize..self.offsets[s + 1] as usize] {
                            let q = self.points[i as usize];
                            let d2 = (q[0] - x[0]) * (q[0] - x[0]) + (q[1] - x[1]) * (q[1] - x[1]);
                            let better = match best {
                                None => true,
                                Some((bi, bd)) => d2 < bd || (d2 == bd && i < bi),
                            };
                            if better {
                                best = Some((i, d2));
                            }
                        }
                    }
                    gx += step;
                }
            }
            if let Some((_, bd)) = best {
                // Every cell of the next ring is at least `ring · cell` away,
                // and also cells outside the grid when x lies outside it.
                let reach = ring as f64 * self.cell;
                if bd < reach * reach {
                    break;
                }
            }
        }
        best
    }
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    StandardUniform.sample(rng)
}

fn poisson(rng: &mut ChaCha8Rng, mean: f64) -> Result<u64, SimError> {
    if mean <= 0.0 {
        return Ok(0);
    }
    let d = Poisson::new(mean).map_err(|_| SimError::PoissonMean(mean))?;
    Ok(d.sample(rng) as u64)
}

fn uniform_in_disc(rng: &mut ChaCha8Rng, center: Point, radius: f64) -> Point {
    let r = radius * uniform(rng).sqrt();
    let phi = 2.0 * PI * uniform(rng);
    [center[0] + r * phi.cos(), center[1] + r * phi.sin()]
}

fn norm2(p: Point) -> f64 {
    p[0] * p[0] + p[1] * p[1]
}

/// The random stream of one trial: ChaCha8 keyed by the seed, with the trial
/// index as stream number.
pub fn trial_rng(seed: u64, trial_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial_index);
    rng
}

/// Samples one snapshot. Deterministic in `(cfg.seed, trial_index)`.
///
/// Draw order: BS count and positions, measurement BS, users, then per user
/// `h` and `g`, then the round-robin choice of each BS in index order.
pub fn sample_realization(
    p: &NetworkParams,
    cfg: &SimulationConfig,
    trial_index: u64,
) -> Result<NetworkRealization, SimError> {
    let w = cfg.resolved_window(p)?;
    let radius = p.achievable_radius();
    let mut rng = trial_rng(cfg.seed, trial_index);

    let n_bs = poisson(&mut rng, p.lambda_bs() * PI * w * w)?;
    let bs_points: Vec<Point> = (0..n_bs).map(|_| uniform_in_disc(&mut rng, [0.0, 0.0], w)).collect();
    let inner: Vec<u32> =
        (0..bs_points.len() as u32).filter(|&i| norm2(bs_points[i as usize]) <= 0.25 * w * w).collect();
    let measurement_bs = if inner.is_empty() {
        None
    } else {
        let pick = ((uniform(&mut rng) * inner.len() as f64) as usize).min(inner.len() - 1);
        Some(inner[pick])
    };

    let cell = if p.lambda_bs() > 0.0 { 1.0 / p.lambda_bs().sqrt() } else { w };
    let grid = BsGrid::new(&bs_points, w, cell);
    let mut user_points = Vec::new();
    let mut serving = Vec::new();
    let mut serving_distance = Vec::new();
    let mut involved = Vec::new();
    match cfg.sampling {
        UserSampling::InvolvedDiscs => {
            let per_disc = p.users_in_range();
            for (j, &b) in bs_points.iter().enumerate() {
                let m = poisson(&mut rng, per_disc)?;
                for _ in 0..m {
                    let x = uniform_in_disc(&mut rng, b, radius);
                    if norm2(x) > w * w {
                        continue;
                    }
                    if let Some((nearest, d2)) = grid.nearest(x) {
                        if nearest as usize == j {
                            user_points.push(x);
                            serving.push(Some(nearest));
                            serving_distance.push(d2.sqrt());
                            involved.push(true);
                        }
                    }
                }
            }
        }
        UserSampling::FullWindow => {
            let n_ue = poisson(&mut rng, p.lambda_ue() * PI * w * w)?;
            for _ in 0..n_ue {
                let x = uniform_in_disc(&mut rng, [0.0, 0.0], w);
                user_points.push(x);
                match grid.nearest(x) {
                    Some((nearest, d2)) => {
                        let d = d2.sqrt();
                        serving.push(Some(nearest));
                        serving_distance.push(d);
                        involved.push(d <= radius);
                    }
                    None => {
                        serving.push(None);
                        serving_distance.push(f64::INFINITY);
                        involved.push(false);
                    }
                }
            }
        }
    }

    let mut fading = Vec::with_capacity(user_points.len());
    let mut cross_fading = Vec::with_capacity(user_points.len());
    for _ in 0..user_points.len() {
        fading.push(Exp1.sample(&mut rng));
        cross_fading.push(Exp1.sample(&mut rng));
    }

    // Involved users per BS in compressed-row layout.
    let mut offsets = vec![0usize; bs_points.len() + 1];
    for u in 0..user_points.len() {
        if let (true, Some(b)) = (involved[u], serving[u]) {
            offsets[b as usize + 1] += 1;
        }
    }
    for i in 0..bs_points.len() {
        offsets[i + 1] += offsets[i];
    }
    let mut fill = offsets.clone();
    let mut members = vec![0u32; offsets[bs_points.len()]];
    for u in 0..user_points.len() {
        if let (true, Some(b)) = (involved[u], serving[u]) {
            members[fill[b as usize]] = u as u32;
            fill[b as usize] += 1;
        }
    }

    let mut scheduled = Vec::with_capacity(bs_points.len());
    let mut round_robin = Vec::with_capacity(bs_points.len());
    let mut fades = Vec::new();
    for b in 0..bs_points.len() {
        let cell_users = &members[offsets[b]..offsets[b + 1]];
        fades.clear();
        fades.extend(cell_users.iter().map(|&u| fading[u as usize]));
        scheduled.push(select_normalized_snr(&fades).map(|i| cell_users[i]));
        if cell_users.is_empty() {
            round_robin.push(None);
        } else {
            let pick = ((uniform(&mut rng) * cell_users.len() as f64) as usize).min(cell_users.len() - 1);
            round_robin.push(Some(cell_users[pick]));
        }
    }

    Ok(NetworkRealization {
        window_radius: w,
        bs_points,
        user_points,
        serving,
        serving_distance,
        involved,
        fading,
        cross_fading,
        scheduled,
        round_robin,
        measurement_bs,
    })
}

/// What one trial contributes to the estimators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    /// A measurement BS existed.
    pub measured: bool,
    /// Involved users in the measured cell.
    pub involved: u32,
    /// SINR of the normalized-SNR choice, `None` for a cell without involved users.
    pub sinr_scheduled: Option<f64>,
    /// SINR of the round-robin choice.
    pub sinr_round_robin: Option<f64>,
    /// Interference at the measurement BS from the other cells' normalized-SNR
    /// choices, in mW.
    pub interference: f64,
    pub users: u64,
    pub users_involved: u64,
}

fn interference_at(r: &NetworkRealization, p: &NetworkParams, b0: u32, choices: &[Option<u32>]) -> f64 {
    let c = r.bs_points[b0 as usize];
    let mut total = 0.0;
    for (b, choice) in choices.iter().enumerate() {
        if b == b0 as usize {
            continue;
        }
        if let Some(u) = *choice {
            let u = u as usize;
            let x = r.user_points[u];
            let dist2 = (x[0] - c[0]) * (x[0] - c[0]) + (x[1] - c[1]) * (x[1] - c[1]);
            let ratio2 = r.serving_distance[u] * r.serving_distance[u] / dist2;
            total += r.cross_fading[u] * p.rho_target() * ratio2.powf(0.5 * p.alpha());
        }
    }
    total
}

/// SINRs at the measurement BS under both schedulers.
pub fn measure_sinr(r: &NetworkRealization, p: &NetworkParams) -> TrialOutcome {
    let users = r.user_points.len() as u64;
    let users_involved = r.involved.iter().filter(|&&i| i).count() as u64;
    let Some(b0) = r.measurement_bs else {
        return TrialOutcome {
            measured: false,
            involved: 0,
            sinr_scheduled: None,
            sinr_round_robin: None,
            interference: 0.0,
            users,
            users_involved,
        };
    };
    let noise = p.effective_noise();
    let involved = r.involved_users(b0).count() as u32;
    let i_sched = interference_at(r, p, b0, &r.scheduled);
    let i_rr = interference_at(r, p, b0, &r.round_robin);
    let sinr = |choice: Option<u32>, interference: f64| {
        choice.map(|u| r.fading[u as usize] * p.rho_target() / (noise + interference))
    };
    TrialOutcome {
        measured: true,
        involved,
        sinr_scheduled: sinr(r.scheduled[b0 as usize], i_sched),
        sinr_round_robin: sinr(r.round_robin[b0 as usize], i_rr),
        interference: i_sched,
        users,
        users_involved,
    }
}

/// Samples and measures one trial.
pub fn run_trial(p: &NetworkParams, cfg: &SimulationConfig, trial_index: u64) -> Result<TrialOutcome, SimError> {
    Ok(measure_sinr(&sample_realization(p, cfg, trial_index)?, p))
}
