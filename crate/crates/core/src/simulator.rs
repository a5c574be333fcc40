//! Monte Carlo realization of the network model.
//!
//! Every trial draws its randomness from per-component ChaCha streams keyed
//! by `(seed, component, trial)`, and per-trial outcomes are reduced in trial
//! order, so results do not depend on the number of worker threads. Point
//! fields are generated outward from the receiver, so enlarging the window
//! only appends far points to the same realization.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::analysis::{LaplaceKind, Variant};
use crate::channel::{
    aligned_gain, draw_fading, draw_los, exponent, interferer_gain_pmf, serving_gain_pmf, GainPmf, LinkKind, LosState,
    Receiver,
};
use crate::params::{NetworkParams, Sharing};
use crate::stochgeom::{gaussian_offset, q_function, sample_truncated_poisson, Point2, RadialPpp, Window};

const SERVING: u64 = 1;
const BS_FIELD: u64 = 2;
const CLUSTERS: u64 = 3;
const INTRA: u64 = 4;
const CROSS: u64 = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McSettings {
    pub trials: usize,
    pub seed: u64,
    /// `None` uses the window radius of the scenario.
    pub window: Option<Window>,
    /// Link and interferer distances below this are redrawn.
    pub min_distance: f64,
    /// Worker threads; 0 uses the global pool.
    pub workers: usize,
}

impl Default for McSettings {
    fn default() -> Self {
        Self {
            trials: 10_000,
            seed: 1,
            window: None,
            min_distance: 0.1,
            workers: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    /// Sample standard deviation over `sqrt(trials)`.
    pub std_err: f64,
    pub trials: usize,
    /// Redrawn sub-minimum distances over all trials.
    pub degenerate: u64,
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid simulation settings: {0}")]
    Settings(String),
    #[error("worker pool: {0}")]
    Pool(String),
}

impl McEstimate {
    /// Mean and standard error of per-trial values, summed in trial order.
    pub fn from_samples(samples: &[f64], degenerate: u64) -> McEstimate {
        let n = samples.len();
        let mean = neumaier(samples.iter().copied()) / n as f64;
        let var = if n > 1 {
            neumaier(samples.iter().map(|x| (x - mean) * (x - mean))) / (n - 1) as f64
        } else {
            0.0
        };
        McEstimate {
            mean,
            std_err: (var / n as f64).sqrt(),
            trials: n,
            degenerate,
        }
    }

    pub fn from_indicators(hits: usize, n: usize, degenerate: u64) -> McEstimate {
        let mean = hits as f64 / n as f64;
        let var = if n > 1 {
            mean * (1.0 - mean) * n as f64 / (n - 1) as f64
        } else {
            0.0
        };
        McEstimate {
            mean,
            std_err: (var / n as f64).sqrt(),
            trials: n,
            degenerate,
        }
    }
}

fn neumaier(xs: impl Iterator<Item = f64>) -> f64 {
    let mut s = 0.0;
    let mut c = 0.0;
    for x in xs {
        let t = s + x;
        if s.abs() >= x.abs() {
            c += (s - t) + x;
        } else {
            c += (x - t) + s;
        }
        s = t;
    }
    s + c
}

fn stream(seed: u64, component: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ component.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    rng.set_stream(trial as u64);
    rng
}

fn run_trials<T, F>(mc: &McSettings, f: F) -> Result<Vec<T>, SimError>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    if mc.trials == 0 {
        return Err(SimError::Settings("trials must be >= 1".into()));
    }
    if mc.min_distance.is_nan() || mc.min_distance <= 0.0 {
        return Err(SimError::Settings(format!("min_distance must be > 0, got {}", mc.min_distance)));
    }
    if mc.workers == 1 {
        return Ok((0..mc.trials).map(f).collect());
    }
    let run = || (0..mc.trials).into_par_iter().map(&f).collect();
    if mc.workers == 0 {
        Ok(run())
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(mc.workers)
            .build()
            .map_err(|e| SimError::Pool(e.to_string()))?;
        Ok(pool.install(run))
    }
}

/// Per-trial geometry helpers.
struct Trial<'a> {
    params: &'a NetworkParams,
    window: Window,
    eps: f64,
    degenerate: u64,
}

impl<'a> Trial<'a> {
    fn new(params: &'a NetworkParams, mc: &McSettings) -> Self {
        Self {
            params,
            window: mc.window.unwrap_or_else(|| Window::for_params(params)),
            eps: mc.min_distance,
            degenerate: 0,
        }
    }

    /// Distance `d`, redrawn from `redraw` while below the minimum.
    fn guard(&mut self, mut d: f64, mut redraw: impl FnMut() -> f64) -> f64 {
        while d < self.eps {
            self.degenerate += 1;
            d = redraw();
        }
        d
    }

    fn received(&self, power: f64, pmf: &GainPmf, d: f64, los: LosState, kind: LinkKind, rng: &mut ChaCha8Rng) -> f64 {
        let g = pmf.sample(rng);
        let h = draw_fading(rng);
        power * g * h * d.powf(-exponent(los, kind, self.params))
    }

    /// Interference at the origin from the BS-location field carrying
    /// cellular LOS marks, optionally thinned by the retention probability.
    fn cellular_field(&mut self, retain: bool, receiver: Receiver, rng: &mut ChaCha8Rng) -> f64 {
        let p = self.params;
        let pmf = interferer_gain_pmf(receiver, p);
        let ball = p.los_ball_c;
        let window = self.window;
        let mut total = 0.0;
        let mut walk = RadialPpp::new(p.lambda_b, window, rng);
        while let Some((t, _, rng)) = walk.next_point() {
            let t = self.guard(t, || window.sample_uniform(rng).norm());
            let los = draw_los(t, &ball, rng);
            let keep: f64 = rng.gen();
            if retain && keep >= q_function(t.powf(exponent(los, LinkKind::Cellular, p)), p) {
                continue;
            }
            total += self.received(p.p_c, &pmf, t, los, LinkKind::Cellular, rng);
        }
        total
    }

    /// Interference at the origin from the D2D transmitters of all clusters.
    fn cluster_field(&mut self, p_d2d: f64, receiver: Receiver, rng: &mut ChaCha8Rng) -> f64 {
        let p = self.params;
        let pmf = interferer_gain_pmf(receiver, p);
        let ball = p.los_ball_d;
        let sigma = p.sigma_d();
        let cap = p.n_total / 2;
        let mut total = 0.0;
        let mut walk = RadialPpp::new(p.lambda_c, self.window, rng);
        while let Some((_, center, rng)) = walk.next_point() {
            let k = sample_truncated_poisson(p.n_bar, cap, rng);
            for _ in 0..k {
                let offset = gaussian_offset(sigma, rng);
                let d2d = rng.gen::<f64>() < p_d2d;
                let los_u: f64 = rng.gen();
                let g = pmf.sample(rng);
                let h = draw_fading(rng);
                if !d2d {
                    continue;
                }
                let mut d = (center + offset).norm();
                d = self.guard(d, || (center + gaussian_offset(sigma, rng)).norm());
                let los = if d <= ball.radius && los_u < ball.p_los {
                    LosState::Los
                } else {
                    LosState::Nlos
                };
                total += p.p_d * g * h * d.powf(-exponent(los, LinkKind::D2d, p));
            }
        }
        total
    }

    /// Co-cluster D2D interference at the origin for a cluster centred at `x0`.
    fn intra_cluster(&mut self, x0: Point2, p_d2d: f64, rng: &mut ChaCha8Rng) -> f64 {
        let p = self.params;
        let mean = (p.n_bar * p_d2d - 1.0).max(0.0);
        let k = sample_truncated_poisson(mean, (p.n_total / 2).saturating_sub(1), rng);
        let pmf = interferer_gain_pmf(Receiver::Ue, p);
        let sigma = p.sigma_d();
        let mut total = 0.0;
        for _ in 0..k {
            let d = (x0 + gaussian_offset(sigma, rng)).norm();
            let d = self.guard(d, || (x0 + gaussian_offset(sigma, rng)).norm());
            let los = draw_los(d, &p.los_ball_d, rng);
            total += self.received(p.p_d, &pmf, d, los, LinkKind::D2d, rng);
        }
        total
    }

    /// Best cellular path gain at the origin over the BS-location field, and
    /// the LOS state and distance of the BS providing it.
    fn best_bs<R: Rng>(&mut self, rng: &mut R) -> Option<(f64, LosState, f64)> {
        let p = self.params;
        let ball = p.los_ball_c;
        let window = self.window;
        let mut best: Option<(f64, LosState, f64)> = None;
        let mut walk = RadialPpp::new(p.lambda_b, window, rng);
        while let Some((t, _, rng)) = walk.next_point() {
            let t = self.guard(t, || window.sample_uniform(rng).norm());
            let los = draw_los(t, &ball, rng);
            let gain = t.powf(-exponent(los, LinkKind::Cellular, p));
            if best.is_none_or(|b| gain > b.0) {
                best = Some((gain, los, t));
            }
        }
        best
    }

    /// Best path gain per BS type (0 when no BS of that type exists).
    fn best_bs_by_type<R: Rng>(&mut self, rng: &mut R) -> [f64; 2] {
        let p = self.params;
        let ball = p.los_ball_c;
        let window = self.window;
        let mut best = [0.0f64; 2];
        let mut walk = RadialPpp::new(p.lambda_b, window, rng);
        while let Some((t, _, rng)) = walk.next_point() {
            let t = self.guard(t, || window.sample_uniform(rng).norm());
            let los = draw_los(t, &ball, rng);
            let k = usize::from(los == LosState::Nlos);
            best[k] = best[k].max(t.powf(-exponent(los, LinkKind::Cellular, p)));
        }
        best
    }
}

/// D2D pair distance drawn as in the representative cluster: the receiver at
/// the origin, the transmitter at `x0 + y0` with Gaussian offsets.
fn d2d_pair(trial: &mut Trial, rng: &mut ChaCha8Rng) -> (Point2, f64) {
    let sigma = trial.params.sigma_d();
    let x0 = gaussian_offset(sigma, rng);
    let r = (x0 + gaussian_offset(sigma, rng)).norm();
    let r = trial.guard(r, || (x0 + gaussian_offset(sigma, rng)).norm());
    (x0, r)
}

/// Mode-selection frequency. With [`Variant::Printed`] each trial scores the
/// sum of the per-type indicators, mirroring the printed two-term formula.
pub fn simulate_p_d2d(params: &NetworkParams, variant: Variant, mc: &McSettings) -> Result<McEstimate, SimError> {
    let out = run_trials(mc, |i| {
        let mut trial = Trial::new(params, mc);
        let mut rng = stream(mc.seed, SERVING, i);
        let (_, r) = d2d_pair(&mut trial, &mut rng);
        let los = draw_los(r, &params.los_ball_d, &mut rng);
        let biased = params.t_d * r.powf(-exponent(los, LinkKind::D2d, params));
        let mut field = stream(mc.seed, BS_FIELD, i);
        let best = trial.best_bs_by_type(&mut field);
        let score = match variant {
            Variant::Partitioned => f64::from(params.t_d > 0.0 && biased >= best[0] && biased >= best[1]),
            Variant::Printed => f64::from(biased >= best[0]) + f64::from(biased >= best[1]),
        };
        (score, trial.degenerate)
    })?;
    let degenerate = out.iter().map(|o| o.1).sum();
    let samples: Vec<f64> = out.iter().map(|o| o.0).collect();
    Ok(McEstimate::from_samples(&samples, degenerate))
}

/// Fraction of receivers with at least one LOS BS.
pub fn simulate_los_coverage(params: &NetworkParams, mc: &McSettings) -> Result<McEstimate, SimError> {
    let out = run_trials(mc, |i| {
        let mut trial = Trial::new(params, mc);
        let mut rng = stream(mc.seed, BS_FIELD, i);
        let best = trial.best_bs_by_type(&mut rng);
        (best[0] > 0.0, trial.degenerate)
    })?;
    let hits = out.iter().filter(|o| o.0).count();
    Ok(McEstimate::from_indicators(hits, mc.trials, out.iter().map(|o| o.1).sum()))
}

fn serving_gain(mode: LinkKind, params: &NetworkParams, rng: &mut ChaCha8Rng) -> f64 {
    let receiver = Receiver::serving(mode);
    if params.sigma_be > 0.0 {
        serving_gain_pmf(receiver, params.sigma_be, params).sample(rng)
    } else {
        aligned_gain(receiver, params)
    }
}

/// SINR of one realization of a typical link.
fn sinr(mode: LinkKind, params: &NetworkParams, p_d2d: f64, mc: &McSettings, i: usize, trial: &mut Trial) -> f64 {
    let beta = params.beta();
    let mut rng = stream(mc.seed, SERVING, i);
    let g0 = serving_gain(mode, params, &mut rng);
    let h0 = draw_fading(&mut rng);
    match mode {
        LinkKind::Cellular => {
            let Some((gain, _, _)) = trial.best_bs(&mut rng) else {
                return 0.0;
            };
            let signal = params.p_c * g0 * h0 * gain;
            let mut i_total = trial.cellular_field(true, Receiver::Bs, &mut stream(mc.seed, BS_FIELD, i));
            if beta > 0.0 {
                i_total += beta * trial.cluster_field(p_d2d, Receiver::Bs, &mut stream(mc.seed, CLUSTERS, i));
            }
            signal / (params.noise + i_total)
        }
        LinkKind::D2d => {
            let (x0, r) = d2d_pair(trial, &mut rng);
            let los = draw_los(r, &params.los_ball_d, &mut rng);
            let signal = params.p_d * g0 * h0 * r.powf(-exponent(los, LinkKind::D2d, params));
            let mut i_total = trial.intra_cluster(x0, p_d2d, &mut stream(mc.seed, INTRA, i));
            i_total += trial.cluster_field(p_d2d, Receiver::Ue, &mut stream(mc.seed, CLUSTERS, i));
            if beta > 0.0 {
                i_total += beta * trial.cellular_field(params.cd_include_q, Receiver::Ue, &mut stream(mc.seed, CROSS, i));
            }
            signal / (params.noise + i_total)
        }
    }
}

/// Outage estimates at several thresholds from the same trials.
pub fn simulate_outage_multi(
    mode: LinkKind,
    gammas: &[f64],
    params: &NetworkParams,
    p_d2d: f64,
    mc: &McSettings,
) -> Result<Vec<McEstimate>, SimError> {
    let out = run_trials(mc, |i| {
        let mut trial = Trial::new(params, mc);
        let s = sinr(mode, params, p_d2d, mc, i, &mut trial);
        (s, trial.degenerate)
    })?;
    let degenerate = out.iter().map(|o| o.1).sum();
    Ok(gammas
        .iter()
        .map(|&g| {
            let hits = out.iter().filter(|o| o.0 < g).count();
            McEstimate::from_indicators(hits, mc.trials, degenerate)
        })
        .collect())
}

pub fn simulate_outage(
    mode: LinkKind,
    gamma: f64,
    params: &NetworkParams,
    p_d2d: f64,
    mc: &McSettings,
) -> Result<McEstimate, SimError> {
    Ok(simulate_outage_multi(mode, &[gamma], params, p_d2d, mc)?[0])
}

/// Empirical `E[exp(-v I)]` for one interference component. Cluster
/// components ignore the exact/approximate flag: the field is the same.
pub fn simulate_laplace(
    kind: LaplaceKind,
    v: f64,
    params: &NetworkParams,
    p_d2d: f64,
    w0: Option<f64>,
    mc: &McSettings,
) -> Result<McEstimate, SimError> {
    if kind == LaplaceKind::DdIntra && w0.is_none() {
        return Err(SimError::Settings("intra-cluster interference needs w0".into()));
    }
    let out = run_trials(mc, |i| {
        let mut trial = Trial::new(params, mc);
        let mut rng = stream(mc.seed, component_of(kind), i);
        let interference = match kind {
            LaplaceKind::Cc => trial.cellular_field(true, Receiver::Bs, &mut rng),
            LaplaceKind::Cd => trial.cellular_field(params.cd_include_q, Receiver::Ue, &mut rng),
            LaplaceKind::Dc(_) => trial.cluster_field(p_d2d, Receiver::Bs, &mut rng),
            LaplaceKind::DdInter(_) => trial.cluster_field(p_d2d, Receiver::Ue, &mut rng),
            LaplaceKind::DdIntra => trial.intra_cluster(Point2::new(w0.unwrap_or(0.0), 0.0), p_d2d, &mut rng),
        };
        ((-v * interference).exp(), trial.degenerate)
    })?;
    let degenerate = out.iter().map(|o| o.1).sum();
    let samples: Vec<f64> = out.iter().map(|o| o.0).collect();
    Ok(McEstimate::from_samples(&samples, degenerate))
}

fn component_of(kind: LaplaceKind) -> u64 {
    match kind {
        LaplaceKind::Cc => BS_FIELD,
        LaplaceKind::Cd => CROSS,
        LaplaceKind::Dc(_) | LaplaceKind::DdInter(_) => CLUSTERS,
        LaplaceKind::DdIntra => INTRA,
    }
}

/// Seed offset of the D2D-mode outage runs paired with cellular ones, so
/// the two estimates are independent.
const D2D_SEED_SALT: u64 = 0x5EED_D2D0;

/// Cellular and D2D outage estimates at several thresholds, from
/// independent trial sets.
pub fn simulate_outage_pair(
    gammas: &[f64],
    params: &NetworkParams,
    p_d2d: f64,
    mc: &McSettings,
) -> Result<(Vec<McEstimate>, Vec<McEstimate>), SimError> {
    let cellular = simulate_outage_multi(LinkKind::Cellular, gammas, params, p_d2d, mc)?;
    let d_mc = McSettings {
        seed: mc.seed ^ D2D_SEED_SALT,
        ..*mc
    };
    let d2d = simulate_outage_multi(LinkKind::D2d, gammas, params, p_d2d, &d_mc)?;
    Ok((cellular, d2d))
}

/// Area spectral efficiency from a pair of simulated outages; the
/// variances of the independent estimates add.
pub fn ase_from_estimates(
    gamma: f64,
    params: &NetworkParams,
    sharing: Sharing,
    delta: f64,
    p_d2d: f64,
    cellular: &McEstimate,
    d2d: &McEstimate,
) -> McEstimate {
    let bits = (1.0 + gamma).log2();
    let (wc, wd) = match sharing {
        Sharing::Underlay => (1.0, 1.0),
        Sharing::Overlay => (1.0 - delta, delta),
    };
    let a = wc * params.lambda_b * bits;
    let b = wd * params.n_bar * p_d2d * params.lambda_c * bits;
    McEstimate {
        mean: a * (1.0 - cellular.mean) + b * (1.0 - d2d.mean),
        std_err: ((a * cellular.std_err).powi(2) + (b * d2d.std_err).powi(2)).sqrt(),
        trials: cellular.trials,
        degenerate: cellular.degenerate + d2d.degenerate,
    }
}

/// Area spectral efficiency from simulated outages.
pub fn simulate_ase(
    gamma: f64,
    params: &NetworkParams,
    sharing: Sharing,
    delta: f64,
    p_d2d: f64,
    mc: &McSettings,
) -> Result<McEstimate, SimError> {
    let mut p = params.clone();
    p.sharing = sharing;
    let (oc, od) = simulate_outage_pair(&[gamma], &p, p_d2d, mc)?;
    Ok(ase_from_estimates(gamma, &p, sharing, delta, p_d2d, &oc[0], &od[0]))
}
