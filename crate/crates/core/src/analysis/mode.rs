use std::f64::consts::PI;

use crate::channel::{exponent, los_probability, LinkKind, LosState};
use crate::params::NetworkParams;
use crate::quadrature::{integrate_breaks, ErrorSink};
use crate::stochgeom::{psi, rayleigh_pdf, rice_pdf, rice_support};

use super::{AnalysisError, AnalysisSettings, Variant};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSelection {
    /// Probability clamped to `[0, 1]`.
    pub value: f64,
    /// Value before clamping.
    pub raw: f64,
    pub clamped: bool,
}

/// Probability that a potential D2D UE at D2D distance `r` (LOS state
/// `s'` with exponent `alpha_d`) selects D2D mode, given the selection rule
/// `T_d r^-alpha_d >= best cellular path gain`.
fn selection_given_distance(r: f64, alpha_d: f64, params: &NetworkParams, variant: Variant) -> f64 {
    let lam = 2.0 * PI * params.lambda_b;
    let ball = &params.los_ball_c;
    // Distance below which a type-s BS beats the biased D2D link.
    let reach = |s: LosState| -> f64 {
        if params.t_d == 0.0 {
            return f64::INFINITY;
        }
        let alpha_c = exponent(s, LinkKind::Cellular, params);
        (r.powf(alpha_d) / params.t_d).powf(1.0 / alpha_c)
    };
    let psi_l = psi(LosState::Los, reach(LosState::Los), ball);
    let psi_n = psi(LosState::Nlos, reach(LosState::Nlos), ball);
    match variant {
        Variant::Partitioned => (-lam * (psi_l + psi_n)).exp(),
        Variant::Printed => (-lam * psi_l).exp() + (-lam * psi_n).exp(),
    }
}

/// Probability that a potential D2D UE selects D2D mode.
pub fn p_d2d(params: &NetworkParams, variant: Variant, settings: &AnalysisSettings) -> Result<ModeSelection, AnalysisError> {
    let quad = &settings.quad;
    let inner = quad.inner();
    let sigma_sq = params.sigma_d_sq;
    let sigma = params.sigma_d();
    let ball_d = params.los_ball_d;
    let rc = params.los_ball_c.radius;

    // Kinks in the D2D distance: the D2D LOS-ball edge and the distances at
    // which a reach crosses the cellular LOS-ball edge.
    let mut kinks = vec![ball_d.radius];
    if params.t_d > 0.0 && params.t_d.is_finite() {
        for s in LosState::BOTH {
            let alpha_c = exponent(s, LinkKind::Cellular, params);
            for sd in LosState::BOTH {
                let alpha_d = exponent(sd, LinkKind::D2d, params);
                kinks.push((params.t_d * rc.powf(alpha_c)).powf(1.0 / alpha_d));
            }
        }
    }

    let given_r = |r: f64| -> f64 {
        LosState::BOTH
            .iter()
            .map(|&sd| {
                let p = los_probability(sd, r, &ball_d);
                if p == 0.0 {
                    0.0
                } else {
                    p * selection_given_distance(r, exponent(sd, LinkKind::D2d, params), params, variant)
                }
            })
            .sum()
    };

    let sink = ErrorSink::new();
    let outer = |w: f64| -> f64 {
        let (lo, hi) = rice_support(w, sigma);
        let mut pts = vec![lo, hi, w.clamp(lo, hi)];
        pts.extend(kinks.iter().copied().filter(|&k| k > lo && k < hi));
        let r = integrate_breaks(|r| given_r(r) * rice_pdf(r, w, sigma_sq), &pts, &inner)
            .map(|e| e.value)
            .map_err(AnalysisError::from);
        sink.catch(r) * rayleigh_pdf(w, sigma_sq)
    };
    let est = integrate_breaks(outer, &[0.0, sigma, 13.0 * sigma], quad)?;
    let raw = sink.finish(est.value)?;
    let value = raw.clamp(0.0, 1.0);
    Ok(ModeSelection {
        value,
        raw,
        clamped: raw > 1.0,
    })
}
