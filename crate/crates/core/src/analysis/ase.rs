use crate::channel::LinkKind;
use crate::params::{NetworkParams, Sharing};

use super::outage::outage_with_beam_error;
use super::{AnalysisError, AnalysisSettings};

/// Successfully transmitted bits/s/Hz/m² of each mode when it owns the
/// whole band, computed with cross-mode interference removed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateDensities {
    pub cellular: f64,
    pub d2d: f64,
}

fn with_sharing(params: &NetworkParams, sharing: Sharing) -> NetworkParams {
    let mut p = params.clone();
    p.sharing = sharing;
    p
}

/// Combine per-mode outage probabilities into the area spectral efficiency.
pub fn ase_from_outages(
    gamma: f64,
    params: &NetworkParams,
    sharing: Sharing,
    delta: f64,
    p_d2d: f64,
    outage_cellular: f64,
    outage_d2d: f64,
) -> f64 {
    let bits = (1.0 + gamma).log2();
    let cellular = params.lambda_b * (1.0 - outage_cellular);
    let d2d = params.n_bar * p_d2d * params.lambda_c * (1.0 - outage_d2d);
    match sharing {
        Sharing::Underlay => (cellular + d2d) * bits,
        Sharing::Overlay => ((1.0 - delta) * cellular + delta * d2d) * bits,
    }
}

/// Area spectral efficiency. Under overlay sharing the outages are computed
/// without cross-mode interference and `delta` splits the band; under
/// underlay sharing `delta` is ignored.
pub fn ase(
    gamma: f64,
    params: &NetworkParams,
    sharing: Sharing,
    delta: f64,
    p_d2d: f64,
    settings: &AnalysisSettings,
) -> Result<f64, AnalysisError> {
    if sharing == Sharing::Overlay && !(0.0..=1.0).contains(&delta) {
        return Err(AnalysisError::InvalidArgument(format!("delta must lie in [0, 1], got {delta}")));
    }
    let p = with_sharing(params, sharing);
    let skip_c = sharing == Sharing::Overlay && delta == 1.0;
    let skip_d = sharing == Sharing::Overlay && delta == 0.0;
    let oc = if skip_c {
        1.0
    } else {
        outage_with_beam_error(gamma, LinkKind::Cellular, &p, p_d2d, settings)?.value
    };
    let od = if skip_d {
        1.0
    } else {
        outage_with_beam_error(gamma, LinkKind::D2d, &p, p_d2d, settings)?.value
    };
    Ok(ase_from_outages(gamma, &p, sharing, delta, p_d2d, oc, od))
}

pub fn rate_densities(
    gamma: f64,
    params: &NetworkParams,
    p_d2d: f64,
    settings: &AnalysisSettings,
) -> Result<RateDensities, AnalysisError> {
    let p = with_sharing(params, Sharing::Overlay);
    let oc = outage_with_beam_error(gamma, LinkKind::Cellular, &p, p_d2d, settings)?.value;
    let od = outage_with_beam_error(gamma, LinkKind::D2d, &p, p_d2d, settings)?.value;
    Ok(RateDensities {
        cellular: ase_from_outages(gamma, &p, Sharing::Overlay, 0.0, p_d2d, oc, od),
        d2d: ase_from_outages(gamma, &p, Sharing::Overlay, 1.0, p_d2d, oc, od),
    })
}

/// Band split maximizing the overlay ASE: everything to the mode with the
/// larger rate density. Ties go to D2D.
pub fn optimal_partition_greedy(rates: &RateDensities) -> f64 {
    if rates.cellular > rates.d2d {
        0.0
    } else {
        1.0
    }
}

/// Weighted proportional-fair objective
/// `w_c ln((1-δ) R_c) + w_d ln(δ R_d)`.
pub fn proportional_fair_objective(delta: f64, w_d: f64, rates: &RateDensities) -> f64 {
    let w_c = 1.0 - w_d;
    let term = |w: f64, x: f64| if w == 0.0 { 0.0 } else { w * x.ln() };
    term(w_c, (1.0 - delta) * rates.cellular) + term(w_d, delta * rates.d2d)
}

/// Maximizer of [`proportional_fair_objective`], which is the D2D weight.
pub fn optimal_partition_proportional_fair(params: &NetworkParams, rates: &RateDensities) -> Result<f64, AnalysisError> {
    if !(rates.cellular > 0.0 && rates.d2d > 0.0) {
        return Err(AnalysisError::Degenerate(format!(
            "proportional-fair objective is -inf everywhere: rate densities cellular {} and D2D {}",
            rates.cellular, rates.d2d
        )));
    }
    Ok(params.w_d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::default_params;

    #[test]
    fn overlay_endpoints() {
        let p = default_params();
        let g = 10.0;
        let bits = 11f64.log2();
        let a0 = ase_from_outages(g, &p, Sharing::Overlay, 0.0, 0.9, 0.3, 0.6);
        assert!((a0 - p.lambda_b * 0.7 * bits).abs() < 1e-18);
        let a1 = ase_from_outages(g, &p, Sharing::Overlay, 1.0, 0.9, 0.3, 0.6);
        assert!((a1 - p.n_bar * 0.9 * p.lambda_c * 0.4 * bits).abs() < 1e-18);
        let u = ase_from_outages(g, &p, Sharing::Underlay, 0.0, 0.9, 0.3, 0.6);
        assert_eq!(u, ase_from_outages(g, &p, Sharing::Underlay, 0.7, 0.9, 0.3, 0.6));
    }

    #[test]
    fn greedy_rule() {
        assert_eq!(optimal_partition_greedy(&RateDensities { cellular: 2.0, d2d: 1.0 }), 0.0);
        assert_eq!(optimal_partition_greedy(&RateDensities { cellular: 1.0, d2d: 2.0 }), 1.0);
        assert_eq!(optimal_partition_greedy(&RateDensities { cellular: 1.0, d2d: 1.0 }), 1.0);
        assert_eq!(optimal_partition_greedy(&RateDensities { cellular: 1.0, d2d: 0.0 }), 0.0);
    }

    #[test]
    fn proportional_fair_grid_matches_weight() {
        let rates = RateDensities { cellular: 3e-6, d2d: 7e-4 };
        for w in [0.0, 0.25, 0.4, 1.0] {
            let mut p = default_params();
            p.w_d = w;
            p.w_c = 1.0 - w;
            assert_eq!(optimal_partition_proportional_fair(&p, &rates).unwrap(), w);
        }
        let best = (1..100)
            .map(|k| f64::from(k) / 100.0)
            .max_by(|a, b| {
                proportional_fair_objective(*a, 0.4, &rates).total_cmp(&proportional_fair_objective(*b, 0.4, &rates))
            })
            .unwrap();
        assert!((best - 0.4).abs() < 1e-12);
        let zero = RateDensities { cellular: 0.0, d2d: 1.0 };
        assert!(optimal_partition_proportional_fair(&default_params(), &zero).is_err());
    }
}
