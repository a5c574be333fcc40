//! Per-link physics: blockage state, power-law path loss, sectored antenna
//! gains and Rayleigh fading.

use rand::Rng;
use rand_distr::Exp1;

use crate::params::{AntennaPattern, LosBall, NetworkParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LosState {
    Los,
    Nlos,
}

impl LosState {
    pub const BOTH: [LosState; 2] = [LosState::Los, LosState::Nlos];

    pub fn other(self) -> LosState {
        match self {
            LosState::Los => LosState::Nlos,
            LosState::Nlos => LosState::Los,
        }
    }
}

/// Link family. Selects the LOS ball and path-loss exponents, and doubles
/// as the transmission mode of a UE.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LinkKind {
    Cellular,
    D2d,
}

impl LinkKind {
    pub fn as_str(self) -> &'static str {
        match self {
            LinkKind::Cellular => "cellular",
            LinkKind::D2d => "d2d",
        }
    }
}

/// The node whose antenna pattern pairs with the UE pattern in the
/// effective gain of a link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Receiver {
    Bs,
    Ue,
}

impl Receiver {
    /// Receiver at the end of a serving link of the given kind.
    pub fn serving(kind: LinkKind) -> Receiver {
        match kind {
            LinkKind::Cellular => Receiver::Bs,
            LinkKind::D2d => Receiver::Ue,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    pub distance: f64,
    pub los: LosState,
    pub kind: LinkKind,
}

pub fn los_ball(kind: LinkKind, params: &NetworkParams) -> LosBall {
    match kind {
        LinkKind::Cellular => params.los_ball_c,
        LinkKind::D2d => params.los_ball_d,
    }
}

pub fn exponent(los: LosState, kind: LinkKind, params: &NetworkParams) -> f64 {
    let a = &params.alpha;
    match (los, kind) {
        (LosState::Los, LinkKind::Cellular) => a.los_cellular,
        (LosState::Nlos, LinkKind::Cellular) => a.nlos_cellular,
        (LosState::Los, LinkKind::D2d) => a.los_d2d,
        (LosState::Nlos, LinkKind::D2d) => a.nlos_d2d,
    }
}

/// `(p_L(r), p_N(r))`. A link of length exactly `R_B` is inside the ball.
pub fn los_probabilities(r: f64, kind: LinkKind, params: &NetworkParams) -> (f64, f64) {
    ball_probabilities(r, &los_ball(kind, params))
}

pub fn ball_probabilities(r: f64, ball: &LosBall) -> (f64, f64) {
    if r <= ball.radius {
        (ball.p_los, 1.0 - ball.p_los)
    } else {
        (0.0, 1.0)
    }
}

pub fn los_probability(state: LosState, r: f64, ball: &LosBall) -> f64 {
    let (l, n) = ball_probabilities(r, ball);
    match state {
        LosState::Los => l,
        LosState::Nlos => n,
    }
}

pub fn path_loss(geom: &LinkGeometry, params: &NetworkParams) -> f64 {
    geom.distance.powf(-exponent(geom.los, geom.kind, params))
}

/// Draw a LOS state for a link of length `r`.
pub fn draw_los<R: Rng + ?Sized>(r: f64, ball: &LosBall, rng: &mut R) -> LosState {
    let u: f64 = rng.gen();
    if r <= ball.radius && u < ball.p_los {
        LosState::Los
    } else {
        LosState::Nlos
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainAtom {
    pub gain: f64,
    pub prob: f64,
}

/// Four-atom distribution of the effective antenna gain of a link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainPmf {
    pub atoms: [GainAtom; 4],
}

impl GainPmf {
    /// Atoms for main/side lobe at the receiver-side node `l` and at the UE,
    /// given the probabilities of each side pointing its main lobe.
    fn from_lobes(l: &AntennaPattern, ue: &AntennaPattern, p_l: f64, p_ue: f64) -> GainPmf {
        let mut atoms = [
            GainAtom {
                gain: l.main_gain * ue.main_gain,
                prob: p_l * p_ue,
            },
            GainAtom {
                gain: l.main_gain * ue.side_gain,
                prob: p_l * (1.0 - p_ue),
            },
            GainAtom {
                gain: l.side_gain * ue.main_gain,
                prob: (1.0 - p_l) * p_ue,
            },
            GainAtom {
                gain: l.side_gain * ue.side_gain,
                prob: (1.0 - p_l) * (1.0 - p_ue),
            },
        ];
        atoms.sort_by(|a, b| b.gain.total_cmp(&a.gain));
        GainPmf { atoms }
    }

    pub fn total_prob(&self) -> f64 {
        self.atoms.iter().map(|a| a.prob).sum()
    }

    pub fn mean(&self) -> f64 {
        self.atoms.iter().map(|a| a.gain * a.prob).sum()
    }

    /// Atoms with non-zero probability.
    pub fn support(&self) -> impl Iterator<Item = &GainAtom> {
        self.atoms.iter().filter(|a| a.prob > 0.0)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.gen::<f64>() * self.total_prob();
        let mut acc = 0.0;
        for a in &self.atoms {
            acc += a.prob;
            if u < acc {
                return a.gain;
            }
        }
        self.support().last().map_or(self.atoms[3].gain, |a| a.gain)
    }
}

fn patterns(receiver: Receiver, params: &NetworkParams) -> (&AntennaPattern, &AntennaPattern) {
    match receiver {
        Receiver::Bs => (&params.antenna_bs, &params.antenna_ue),
        Receiver::Ue => (&params.antenna_ue, &params.antenna_ue),
    }
}

/// Gain of an interfering link with uniformly random beam orientations.
pub fn interferer_gain_pmf(receiver: Receiver, params: &NetworkParams) -> GainPmf {
    let (l, ue) = patterns(receiver, params);
    GainPmf::from_lobes(l, ue, l.main_lobe_fraction().min(1.0), ue.main_lobe_fraction().min(1.0))
}

/// Gain of the serving link under half-normal beamsteering error with
/// standard deviation `sigma_be` (radians) on both ends.
pub fn serving_gain_pmf(receiver: Receiver, sigma_be: f64, params: &NetworkParams) -> GainPmf {
    let (l, ue) = patterns(receiver, params);
    let aligned = |pattern: &AntennaPattern| {
        if sigma_be == 0.0 {
            1.0
        } else {
            libm::erf(pattern.beamwidth / 2.0 / (std::f64::consts::SQRT_2 * sigma_be))
        }
    };
    GainPmf::from_lobes(l, ue, aligned(l), aligned(ue))
}

/// Gain of a perfectly aligned serving link.
pub fn aligned_gain(receiver: Receiver, params: &NetworkParams) -> f64 {
    let (l, ue) = patterns(receiver, params);
    l.main_gain * ue.main_gain
}

/// Rayleigh fading power gain, Exp(1).
pub fn draw_fading<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(Exp1)
}
