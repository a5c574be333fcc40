use std::f64::consts::PI;

use crate::channel::{aligned_gain, exponent, los_probability, serving_gain_pmf, LinkKind, LosState, Receiver};
use crate::params::NetworkParams;
use crate::quadrature::{integrate_breaks, integrate_to_infinity, ErrorSink};
use crate::stochgeom::{psi, rayleigh_pdf, rice_pdf, unconditioned_nearest_bs_density};

use super::laplace::{intra_cluster_mean, laplace_exponent, LaplaceKind, Profile};
use super::{AnalysisError, AnalysisSettings, Variant};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageResult {
    /// Outage probability clamped to `[0, 1]`.
    pub value: f64,
    /// `1 - coverage` before clamping.
    pub raw: f64,
    /// Coverage contributed by a LOS and an NLOS serving link.
    pub coverage_by_branch: [f64; 2],
}

impl OutageResult {
    fn from_coverage(branches: [f64; 2]) -> Self {
        let raw = 1.0 - (branches[0] + branches[1]);
        Self {
            value: raw.clamp(0.0, 1.0),
            raw,
            coverage_by_branch: branches,
        }
    }
}

fn check_gamma(gamma: f64) -> Result<(), AnalysisError> {
    if gamma > 0.0 {
        Ok(())
    } else {
        Err(AnalysisError::InvalidArgument(format!("SINR threshold must be > 0, got {gamma}")))
    }
}

fn cluster_kind(settings: &AnalysisSettings, receiver: Receiver) -> LaplaceKind {
    match receiver {
        Receiver::Bs => LaplaceKind::Dc(settings.cluster_form),
        Receiver::Ue => LaplaceKind::DdInter(settings.cluster_form),
    }
}

fn cellular_coverage(
    gamma: f64,
    g0: f64,
    params: &NetworkParams,
    p_d2d: f64,
    settings: &AnalysisSettings,
    with_dc: bool,
) -> Result<[f64; 2], AnalysisError> {
    let quad = &settings.quad;
    let inner = quad.inner();
    let inner_settings = AnalysisSettings { quad: inner, ..*settings };
    let lam = 2.0 * PI * params.lambda_b;
    let ball = params.los_ball_c;
    let r_b = ball.radius;
    let mut out = [0.0; 2];
    for (k, s) in LosState::BOTH.into_iter().enumerate() {
        let alpha = exponent(s, LinkKind::Cellular, params);
        let alpha_other = exponent(s.other(), LinkKind::Cellular, params);
        let sink = ErrorSink::new();
        let f = |r: f64| -> f64 {
            let dens = unconditioned_nearest_bs_density(r, s, params);
            if dens == 0.0 {
                return 0.0;
            }
            let assoc = match settings.variant {
                Variant::Partitioned => (-lam * psi(s.other(), r.powf(alpha / alpha_other), &ball)).exp(),
                Variant::Printed => 1.0,
            };
            if assoc == 0.0 {
                return 0.0;
            }
            let v = gamma * r.powf(alpha) / (params.p_c * g0);
            let mut x = v * params.noise;
            x += sink.catch(laplace_exponent(LaplaceKind::Cc, v, params, p_d2d, None, &inner_settings));
            if with_dc {
                x += sink.catch(laplace_exponent(
                    cluster_kind(settings, Receiver::Bs),
                    v,
                    params,
                    p_d2d,
                    None,
                    &inner_settings,
                ));
            }
            (-x).exp() * dens * assoc
        };
        let mut pts = vec![0.0, r_b, r_b.powf(alpha_other / alpha)];
        let est = match s {
            LosState::Los => {
                pts.retain(|&x| x <= r_b);
                integrate_breaks(f, &pts, quad)?
            }
            LosState::Nlos => integrate_to_infinity(
                f,
                &pts,
                r_b,
                |t| (-lam * psi(LosState::Nlos, t, &ball)).exp(),
                quad,
            )?,
        };
        out[k] = sink.finish(est.value)?;
    }
    Ok(out)
}

fn d2d_coverage(
    gamma: f64,
    g0: f64,
    params: &NetworkParams,
    p_d2d: f64,
    settings: &AnalysisSettings,
) -> Result<[f64; 2], AnalysisError> {
    let quad = &settings.quad;
    let inner = quad.inner();
    let inner_settings = AnalysisSettings { quad: inner, ..*settings };
    let sigma_sq = params.sigma_d_sq;
    let sigma = params.sigma_d();
    let ball = params.los_ball_d;
    let intra = intra_cluster_mean(params, p_d2d);
    let r_max = 20.0 * sigma;
    let w_max = 13.0 * sigma;
    let mut out = [0.0; 2];
    for (k, s) in LosState::BOTH.into_iter().enumerate() {
        let alpha = exponent(s, LinkKind::D2d, params);
        let sink = ErrorSink::new();
        let f = |r: f64| -> f64 {
            let p = los_probability(s, r, &ball);
            if p == 0.0 || r == 0.0 {
                return 0.0;
            }
            let v = gamma * r.powf(alpha) / (params.p_d * g0);
            let mut x = v * params.noise;
            x += sink.catch(laplace_exponent(
                cluster_kind(settings, Receiver::Ue),
                v,
                params,
                p_d2d,
                None,
                &inner_settings,
            ));
            if params.beta() > 0.0 {
                x += sink.catch(laplace_exponent(LaplaceKind::Cd, params.beta() * v, params, p_d2d, None, &inner_settings));
            }
            let outer = (-x).exp();
            if outer == 0.0 {
                return 0.0;
            }
            // Average the intra-cluster term over the distance of the
            // cluster centre.
            let joint = if intra == 0.0 {
                rayleigh_pdf(r, 2.0 * sigma_sq)
            } else {
                let prof = Profile::new(params, LinkKind::D2d, Receiver::Ue, params.p_d, v, false);
                let lo = (r - w_max).max(0.0);
                if lo >= w_max {
                    return 0.0;
                }
                let g = |w: f64| {
                    let h = sink.catch(prof.rician_average(w, &inner.inner()));
                    (-intra * h).exp() * rice_pdf(r, w, sigma_sq) * rayleigh_pdf(w, sigma_sq)
                };
                let pts = [lo, r.clamp(lo, w_max), sigma.clamp(lo, w_max), w_max];
                sink.catch(integrate_breaks(g, &pts, &inner).map(|e| e.value).map_err(AnalysisError::from))
            };
            p * outer * joint
        };
        let mut pts = vec![0.0, sigma.min(r_max), r_max];
        if ball.radius < r_max {
            pts.push(ball.radius);
        }
        let est = integrate_breaks(f, &pts, quad)?;
        out[k] = sink.finish(est.value)?;
    }
    Ok(out)
}

/// Outage probability of a typical link of the given mode whose serving
/// gain is `g0`.
pub fn outage_with_gain(
    mode: LinkKind,
    gamma: f64,
    g0: f64,
    params: &NetworkParams,
    p_d2d: f64,
    settings: &AnalysisSettings,
) -> Result<OutageResult, AnalysisError> {
    check_gamma(gamma)?;
    let cov = match mode {
        LinkKind::Cellular => cellular_coverage(gamma, g0, params, p_d2d, settings, params.beta() > 0.0)?,
        LinkKind::D2d => d2d_coverage(gamma, g0, params, p_d2d, settings)?,
    };
    Ok(OutageResult::from_coverage(cov))
}

/// Perfect-alignment outage of a typical link of the given mode.
pub fn outage(
    mode: LinkKind,
    gamma: f64,
    params: &NetworkParams,
    p_d2d: f64,
    settings: &AnalysisSettings,
) -> Result<OutageResult, AnalysisError> {
    outage_with_gain(mode, gamma, aligned_gain(Receiver::serving(mode), params), params, p_d2d, settings)
}

pub fn outage_cellular(
    gamma: f64,
    params: &NetworkParams,
    p_d2d: f64,
    settings: &AnalysisSettings,
) -> Result<OutageResult, AnalysisError> {
    outage(LinkKind::Cellular, gamma, params, p_d2d, settings)
}

pub fn outage_d2d(
    gamma: f64,
    params: &NetworkParams,
    p_d2d: f64,
    settings: &AnalysisSettings,
) -> Result<OutageResult, AnalysisError> {
    outage(LinkKind::D2d, gamma, params, p_d2d, settings)
}

/// Cellular outage with the D2D-to-BS interference factor pinned to 1,
/// whatever the sharing mode.
pub fn outage_cellular_dc_pinned(
    gamma: f64,
    params: &NetworkParams,
    p_d2d: f64,
    settings: &AnalysisSettings,
) -> Result<OutageResult, AnalysisError> {
    check_gamma(gamma)?;
    let g0 = aligned_gain(Receiver::Bs, params);
    Ok(OutageResult::from_coverage(cellular_coverage(gamma, g0, params, p_d2d, settings, false)?))
}

/// Outage averaged over the serving-gain distribution under beamsteering
/// error with the standard deviation in `params`.
pub fn outage_with_beam_error(
    gamma: f64,
    mode: LinkKind,
    params: &NetworkParams,
    p_d2d: f64,
    settings: &AnalysisSettings,
) -> Result<OutageResult, AnalysisError> {
    let pmf = serving_gain_pmf(Receiver::serving(mode), params.sigma_be, params);
    let mut value = 0.0;
    let mut raw = 0.0;
    let mut cov = [0.0; 2];
    for atom in pmf.support() {
        let r = outage_with_gain(mode, gamma, atom.gain, params, p_d2d, settings)?;
        value += atom.prob * r.value;
        raw += atom.prob * r.raw;
        cov[0] += atom.prob * r.coverage_by_branch[0];
        cov[1] += atom.prob * r.coverage_by_branch[1];
    }
    Ok(OutageResult {
        value,
        raw,
        coverage_by_branch: cov,
    })
}
