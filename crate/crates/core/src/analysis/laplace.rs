use std::f64::consts::PI;

use crate::channel::{exponent, interferer_gain_pmf, los_ball, los_probability, GainPmf, LinkKind, LosState, Receiver};
use crate::params::{LosBall, NetworkParams};
use crate::quadrature::{integrate_breaks, integrate_to_infinity, ErrorSink, QuadSettings};
use crate::stochgeom::{q_function, rice_pdf, rice_support};

use super::{AnalysisError, AnalysisSettings, ClusterForm};

/// Interference component of the SINR.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LaplaceKind {
    /// Cellular UEs at the BS.
    Cc,
    /// D2D transmitters of all clusters at the BS.
    Dc(ClusterForm),
    /// Cellular UEs at a D2D receiver.
    Cd,
    /// Co-cluster D2D transmitters at a D2D receiver whose cluster centre is
    /// at distance `w0`.
    DdIntra,
    /// D2D transmitters of all other clusters at a D2D receiver.
    DdInter(ClusterForm),
}

impl LaplaceKind {
    pub fn name(self) -> &'static str {
        match self {
            LaplaceKind::Cc => "cc",
            LaplaceKind::Dc(_) => "dc",
            LaplaceKind::Cd => "cd",
            LaplaceKind::DdIntra => "dd_intra",
            LaplaceKind::DdInter(_) => "dd_inter",
        }
    }
}

/// Mean of `G h v P / (G h v P + u^α)`-type terms over gains and blockage:
/// `Σ_j p_j(u) Σ_i p_i x/(1+x)`, `x = v P G_i u^-α_j`, optionally weighted by
/// the retention probability of a cellular interferer.
pub(crate) struct Profile<'a> {
    params: &'a NetworkParams,
    ball: LosBall,
    alpha: [f64; 2],
    scale: f64,
    pmf: GainPmf,
    retain_q: bool,
}

impl<'a> Profile<'a> {
    pub(crate) fn new(
        params: &'a NetworkParams,
        kind: LinkKind,
        receiver: Receiver,
        power: f64,
        v: f64,
        retain_q: bool,
    ) -> Self {
        Self {
            params,
            ball: los_ball(kind, params),
            alpha: [
                exponent(LosState::Los, kind, params),
                exponent(LosState::Nlos, kind, params),
            ],
            scale: v * power,
            pmf: interferer_gain_pmf(receiver, params),
            retain_q,
        }
    }

    pub(crate) fn eval(&self, u: f64) -> f64 {
        let mut total = 0.0;
        for (k, state) in LosState::BOTH.iter().enumerate() {
            let p = los_probability(*state, u, &self.ball);
            if p == 0.0 {
                continue;
            }
            let ua = pow_exp(u, self.alpha[k]);
            let x = self.scale / ua;
            let mut s = 0.0;
            for atom in self.pmf.support() {
                let xg = x * atom.gain;
                s += atom.prob * if xg.is_infinite() { 1.0 } else { xg / (1.0 + xg) };
            }
            if self.retain_q {
                s *= q_function(ua, self.params);
            }
            total += p * s;
        }
        total
    }

    /// Kinks in `u`: the LOS-ball edge and, with retention, the radii where
    /// the retention probability changes its piecewise form.
    fn breaks(&self) -> Vec<f64> {
        let r = self.ball.radius;
        let mut out = vec![r];
        if self.retain_q {
            let a = &self.params.alpha;
            let rc = self.params.los_ball_c.radius;
            for alpha in self.alpha {
                out.push(rc.powf(a.los_cellular / alpha));
                out.push(rc.powf(a.nlos_cellular / alpha));
            }
        }
        out
    }

    /// Upper bound of the profile for `u` beyond every break: `c u^-α_N`.
    fn tail_coefficient(&self) -> f64 {
        self.scale * self.pmf.mean()
    }

    fn tail_exponent(&self) -> f64 {
        self.alpha[1]
    }

    /// `∫_0^∞ profile(u) u du`.
    fn radial_integral(&self, quad: &QuadSettings) -> Result<f64, AnalysisError> {
        if self.scale == 0.0 {
            return Ok(0.0);
        }
        let alpha = self.tail_exponent();
        if alpha <= 2.0 {
            return Ok(f64::INFINITY);
        }
        let mut pts = vec![0.0];
        pts.extend(self.breaks());
        let c = self.tail_coefficient();
        let last = pts.iter().copied().fold(0.0, f64::max);
        let est = integrate_to_infinity(
            |u| self.eval(u) * u,
            &pts,
            last.max(1.0),
            |t| c * t.powf(2.0 - alpha) / (alpha - 2.0),
            quad,
        )?;
        Ok(est.value)
    }

    /// `∫ profile(u) f(u | t) du` with `f` the Rician density of the distance
    /// to a point scattered around a centre at distance `t`.
    pub(crate) fn rician_average(&self, t: f64, quad: &QuadSettings) -> Result<f64, AnalysisError> {
        let sigma_sq = self.params.sigma_d_sq;
        let (lo, hi) = rice_support(t, sigma_sq.sqrt());
        let mut pts = vec![lo, hi, t.clamp(lo, hi)];
        pts.extend(self.breaks().into_iter().filter(|&b| b > lo && b < hi));
        let est = integrate_breaks(|u| self.eval(u) * rice_pdf(u, t, sigma_sq), &pts, quad)?;
        Ok(est.value)
    }

    /// `∫_0^∞ (1 - exp(-μ h(t))) t dt`, `h` the Rician average.
    ///
    /// Scattering preserves mass, `∫ h(t) t dt = ∫ profile(u) u du`, so the
    /// integral is `μ` times the radial integral minus
    /// `∫ (μh - 1 + exp(-μh)) t dt`, whose integrand decays like `h²`.
    fn cluster_integral(&self, mu: f64, quad: &QuadSettings) -> Result<f64, AnalysisError> {
        if self.scale == 0.0 || mu == 0.0 {
            return Ok(0.0);
        }
        let alpha = self.tail_exponent();
        if alpha <= 2.0 {
            return Ok(f64::INFINITY);
        }
        let first_order = mu * self.radial_integral(quad)?;
        let sigma = self.params.sigma_d();
        let reach = 13.0 * sigma;
        let inner = quad.inner();
        let sink = ErrorSink::new();
        let f = |t: f64| {
            let x = mu * sink.catch(self.rician_average(t, &inner));
            (x + (-x).exp_m1()) * t
        };
        let mut pts = vec![0.0, self.ball.radius];
        pts.extend(self.breaks());
        let last = pts.iter().copied().fold(0.0, f64::max) + reach;
        pts.push(last);
        // Beyond `reach` past every break, h(t) <= c (t - reach)^-α.
        let c = mu * self.tail_coefficient();
        let tail = |t: f64| {
            let tp = t - reach;
            if tp <= self.ball.radius {
                return f64::INFINITY;
            }
            let a2 = 2.0 * alpha;
            0.5 * c * c * (tp.powf(2.0 - a2) / (a2 - 2.0) + reach * tp.powf(1.0 - a2) / (a2 - 1.0))
        };
        let quad = QuadSettings {
            abs_tol: quad.abs_tol.max(quad.rel_tol * first_order),
            ..*quad
        };
        let est = integrate_to_infinity(f, &pts, last.max(1.0), tail, &quad)?;
        let correction = sink.finish(est.value)?;
        Ok((first_order - correction).max(0.0))
    }
}

/// `u^a` with the common integer exponents computed by multiplication.
fn pow_exp(u: f64, a: f64) -> f64 {
    if a == 2.0 {
        u * u
    } else if a == 4.0 {
        let s = u * u;
        s * s
    } else {
        u.powf(a)
    }
}

/// Mean number of co-cluster D2D interferers of a typical D2D receiver.
pub(crate) fn intra_cluster_mean(params: &NetworkParams, p_d2d: f64) -> f64 {
    (params.n_bar * p_d2d - 1.0).max(0.0)
}

/// `-ln L(v)` for the given interference component.
pub fn laplace_exponent(
    kind: LaplaceKind,
    v: f64,
    params: &NetworkParams,
    p_d2d: f64,
    w0: Option<f64>,
    settings: &AnalysisSettings,
) -> Result<f64, AnalysisError> {
    if v.is_nan() || v < 0.0 {
        return Err(AnalysisError::InvalidArgument(format!("Laplace argument must be >= 0, got {v}")));
    }
    if kind == LaplaceKind::DdIntra && w0.is_none() {
        return Err(AnalysisError::MissingW0);
    }
    if v == 0.0 {
        return Ok(0.0);
    }
    let quad = &settings.quad;
    let mu = params.n_bar * p_d2d;
    let cluster = |receiver: Receiver, form: ClusterForm| -> Result<f64, AnalysisError> {
        let prof = Profile::new(params, LinkKind::D2d, receiver, params.p_d, v, false);
        let x = match form {
            ClusterForm::Exact => prof.cluster_integral(mu, quad)?,
            ClusterForm::Approx => mu * prof.radial_integral(quad)?,
        };
        Ok(2.0 * PI * params.lambda_c * x)
    };
    match kind {
        LaplaceKind::Cc => {
            let prof = Profile::new(params, LinkKind::Cellular, Receiver::Bs, params.p_c, v, true);
            Ok(2.0 * PI * params.lambda_b * prof.radial_integral(quad)?)
        }
        LaplaceKind::Cd => {
            let prof = Profile::new(params, LinkKind::Cellular, Receiver::Ue, params.p_c, v, params.cd_include_q);
            Ok(2.0 * PI * params.lambda_b * prof.radial_integral(quad)?)
        }
        LaplaceKind::Dc(form) => cluster(Receiver::Bs, form),
        LaplaceKind::DdInter(form) => cluster(Receiver::Ue, form),
        LaplaceKind::DdIntra => {
            let m = intra_cluster_mean(params, p_d2d);
            if m == 0.0 {
                return Ok(0.0);
            }
            let prof = Profile::new(params, LinkKind::D2d, Receiver::Ue, params.p_d, v, false);
            Ok(m * prof.rician_average(w0.unwrap_or(0.0), quad)?)
        }
    }
}

/// `E[exp(-v I)]` for the given interference component.
pub fn laplace(
    kind: LaplaceKind,
    v: f64,
    params: &NetworkParams,
    p_d2d: f64,
    w0: Option<f64>,
    settings: &AnalysisSettings,
) -> Result<f64, AnalysisError> {
    laplace_exponent(kind, v, params, p_d2d, w0, settings).map(|x| (-x).exp())
}
