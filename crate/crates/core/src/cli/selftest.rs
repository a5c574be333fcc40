//! Trivial-limit suite: closed-form boundary values every evaluation must
//! reproduce.

use crate::analysis::{
    laplace, outage, outage_cellular, outage_cellular_dc_pinned, outage_with_beam_error, p_d2d, AnalysisSettings,
    ClusterForm, LaplaceKind, Variant,
};
use crate::channel::{interferer_gain_pmf, serving_gain_pmf, LinkKind, Receiver};
use crate::params::{default_params, Sharing};

use super::Check;

fn within(name: &str, got: Result<f64, String>, want: f64, tol: f64) -> Check {
    match got {
        Ok(v) => Check::new(name, (v - want).abs() <= tol, format!("{v:e} (want {want} ± {tol:e})")),
        Err(e) => Check::new(name, false, e),
    }
}

pub fn run_selftest() -> Vec<Check> {
    let p = default_params();
    let s = AnalysisSettings::default();
    let mut checks = Vec::new();
    let pd = match p_d2d(&p, Variant::Partitioned, &s) {
        Ok(m) => m.value,
        Err(e) => {
            checks.push(Check::new("mode-selection probability at defaults", false, e.to_string()));
            return checks;
        }
    };

    let kinds = [
        LaplaceKind::Cc,
        LaplaceKind::Dc(ClusterForm::Exact),
        LaplaceKind::Dc(ClusterForm::Approx),
        LaplaceKind::Cd,
        LaplaceKind::DdIntra,
        LaplaceKind::DdInter(ClusterForm::Exact),
        LaplaceKind::DdInter(ClusterForm::Approx),
    ];
    for kind in kinds {
        let got = laplace(kind, 0.0, &p, pd, Some(p.sigma_d()), &s).map_err(|e| e.to_string());
        checks.push(within(&format!("laplace {kind:?} at v=0 is 1"), got, 1.0, 0.0));
    }

    for mode in [LinkKind::Cellular, LinkKind::D2d] {
        let lo = outage(mode, 1e-12, &p, pd, &s).map(|r| r.value).map_err(|e| e.to_string());
        checks.push(within(&format!("{} outage as threshold -> 0", mode.as_str()), lo, 0.0, 1e-6));
        let hi = outage(mode, 1e16, &p, pd, &s).map(|r| r.value).map_err(|e| e.to_string());
        checks.push(within(&format!("{} outage as threshold -> inf", mode.as_str()), hi, 1.0, 1e-6));
    }

    let mut off = p.clone();
    off.t_d = 0.0;
    let got = p_d2d(&off, Variant::Partitioned, &s).map(|m| m.value).map_err(|e| e.to_string());
    checks.push(within("p_d2d with zero bias is 0", got, 0.0, 0.0));

    let gamma = 10.0;
    for mode in [LinkKind::Cellular, LinkKind::D2d] {
        let plain = outage(mode, gamma, &p, pd, &s).map(|r| r.value);
        let mixed = outage_with_beam_error(gamma, mode, &p, pd, &s).map(|r| r.value);
        let got = match (plain, mixed) {
            (Ok(a), Ok(b)) => Ok(a - b),
            (Err(e), _) | (_, Err(e)) => Err(e.to_string()),
        };
        checks.push(within(
            &format!("{} outage with zero beam error equals aligned outage", mode.as_str()),
            got,
            0.0,
            1e-12,
        ));
    }

    let mut overlay = p.clone();
    overlay.sharing = Sharing::Overlay;
    let got = match (
        outage_cellular(gamma, &overlay, pd, &s),
        outage_cellular_dc_pinned(gamma, &p, pd, &s),
    ) {
        (Ok(a), Ok(b)) => Ok(a.value - b.value),
        (Err(e), _) | (_, Err(e)) => Err(e.to_string()),
    };
    checks.push(within("overlay cellular outage equals underlay with D2D factor pinned to 1", got, 0.0, 1e-12));

    for rx in [Receiver::Bs, Receiver::Ue] {
        let pmf = interferer_gain_pmf(rx, &p);
        checks.push(within(&format!("interferer gain pmf at {rx:?} sums to 1"), Ok(pmf.total_prob()), 1.0, 1e-12));
        let pmf = serving_gain_pmf(rx, 5f64.to_radians(), &p);
        checks.push(within(
            &format!("serving gain pmf at {rx:?} under beam error sums to 1"),
            Ok(pmf.total_prob()),
            1.0,
            1e-12,
        ));
    }
    checks
}
