use std::collections::HashMap;
use std::str::FromStr;
use std::sync::Mutex;
use std::time::Instant;

use rayon::prelude::*;

use crate::analysis::{
    laplace, outage_with_beam_error, p_d2d, proportional_fair_objective, AnalysisSettings, LaplaceKind, RateDensities,
    Variant,
};
use crate::channel::{aligned_gain, LinkKind, Receiver};
use crate::params::{db_to_linear, linear_to_db, NetworkParams, Sharing, KEYS};
use crate::simulator::{ase_from_estimates, simulate_laplace, simulate_outage_pair, simulate_p_d2d, McEstimate, McSettings};

use super::dataset::{fmt_num, Dataset, Row};
use super::CliError;

/// Link distance at which the Laplace grid is anchored: rows report
/// `L(v)` at `v = Γ r^α_L / (P G0)` with `r` this distance and a LOS link.
pub const LAPLACE_REFERENCE_DISTANCE: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Output {
    PD2d,
    OutageC,
    OutageD,
    Ase,
    PfObjective,
    Laplace(LaplaceKind),
}

impl Output {
    pub fn name(self) -> String {
        match self {
            Output::PD2d => "p_d2d".into(),
            Output::OutageC => "outage_c".into(),
            Output::OutageD => "outage_d".into(),
            Output::Ase => "ase".into(),
            Output::PfObjective => "pf_objective".into(),
            Output::Laplace(k) => format!("laplace_{}", k.name()),
        }
    }

    pub fn laplace_all(form: crate::analysis::ClusterForm) -> Vec<Output> {
        [
            LaplaceKind::Cc,
            LaplaceKind::Dc(form),
            LaplaceKind::Cd,
            LaplaceKind::DdIntra,
            LaplaceKind::DdInter(form),
        ]
        .into_iter()
        .map(Output::Laplace)
        .collect()
    }

    /// Parse a comma-separated list; `laplace` expands to all five
    /// interference components.
    pub fn parse_list(text: &str, form: crate::analysis::ClusterForm) -> Result<Vec<Output>, String> {
        let mut out = Vec::new();
        for name in text.split(',').map(str::trim) {
            let items = match name {
                "p_d2d" => vec![Output::PD2d],
                "outage_c" => vec![Output::OutageC],
                "outage_d" => vec![Output::OutageD],
                "ase" => vec![Output::Ase],
                "pf_objective" => vec![Output::PfObjective],
                "laplace" => Output::laplace_all(form),
                "laplace_cc" => vec![Output::Laplace(LaplaceKind::Cc)],
                "laplace_dc" => vec![Output::Laplace(LaplaceKind::Dc(form))],
                "laplace_cd" => vec![Output::Laplace(LaplaceKind::Cd)],
                "laplace_dd_intra" => vec![Output::Laplace(LaplaceKind::DdIntra)],
                "laplace_dd_inter" => vec![Output::Laplace(LaplaceKind::DdInter(form))],
                other => {
                    return Err(format!(
                        "unknown output `{other}` (expected p_d2d, outage_c, outage_d, ase, pf_objective, laplace or laplace_<cc|dc|cd|dd_intra|dd_inter>)"
                    ))
                }
            };
            for o in items {
                if !out.contains(&o) {
                    out.push(o);
                }
            }
        }
        if out.is_empty() {
            return Err("no outputs requested".into());
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    #[default]
    Analytic,
    Mc,
    Both,
}

impl Method {
    pub fn analytic(self) -> bool {
        self != Method::Mc
    }

    pub fn mc(self) -> bool {
        self != Method::Analytic
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "analytic" => Ok(Method::Analytic),
            "mc" => Ok(Method::Mc),
            "both" => Ok(Method::Both),
            other => Err(format!("unknown method `{other}` (expected analytic|mc|both)")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    /// Label written to the `curve` column.
    pub curve: String,
    pub base: NetworkParams,
    pub swept_key: String,
    pub grid: Vec<f64>,
    pub outputs: Vec<Output>,
    pub method: Method,
    /// Thresholds in dB; `None` takes the threshold of each grid point's
    /// parameters.
    pub gammas_db: Option<Vec<f64>>,
    pub mc: McSettings,
    pub analysis: AnalysisSettings,
    pub timing: bool,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.grid.is_empty() {
            return Err(CliError::Usage("sweep grid is empty".into()));
        }
        if self.grid.iter().any(|x| !x.is_finite()) {
            return Err(CliError::Usage("sweep grid values must be finite".into()));
        }
        if self.swept_key != "sigma_d" && !KEYS.contains(&self.swept_key.as_str()) {
            return Err(CliError::Usage(format!(
                "unknown swept key `{}` (expected sigma_d or one of: {})",
                self.swept_key,
                KEYS.join(", ")
            )));
        }
        if self.outputs.is_empty() {
            return Err(CliError::Usage("no outputs requested".into()));
        }
        if let Some(g) = &self.gammas_db {
            if g.is_empty() || g.iter().any(|x| !x.is_finite()) {
                return Err(CliError::Usage("threshold list must be non-empty and finite".into()));
            }
            if self.swept_key == "gamma_db" {
                return Err(CliError::Usage(
                    "the threshold is already the swept key; drop the explicit threshold list".into(),
                ));
            }
        }
        if self.method.mc() && self.mc.trials == 0 {
            return Err(CliError::Usage("trial count must be positive".into()));
        }
        Ok(())
    }

    pub fn metadata(&self) -> Vec<String> {
        let mut m = vec![
            format!("curve {}: swept {} over {}", display_curve(&self.curve), self.swept_key, list(&self.grid)),
            format!(
                "thresholds (dB): {}",
                match &self.gammas_db {
                    Some(g) => list(g),
                    None => "from each grid point's parameters".into(),
                }
            ),
        ];
        if self.method.mc() {
            m.push(format!(
                "simulation: {} trials, seed {}; simulated outage, ase and pf rows use the analytic p_d2d",
                self.mc.trials, self.mc.seed
            ));
        }
        if self.outputs.iter().any(|o| matches!(o, Output::Laplace(_))) {
            m.push(format!(
                "laplace rows: v = Γ r^α_L / (P G0) with r = {LAPLACE_REFERENCE_DISTANCE} m; intra-cluster w0 = σ_d"
            ));
        }
        m.push(format!("base parameters: {}", self.base.render().trim_end().replace('\n', "; ")));
        m
    }
}

fn display_curve(c: &str) -> &str {
    if c.is_empty() {
        "base"
    } else {
        c
    }
}

fn list(xs: &[f64]) -> String {
    xs.iter().map(|x| fmt_num(*x)).collect::<Vec<_>>().join(",")
}

/// Outage results shared by every sweep of a run. Outages do not depend on
/// the band split or the proportional-fair weights, so those are blanked
/// out of the key.
#[derive(Default)]
pub struct OutageCache {
    analytic: Mutex<HashMap<AnalyticKey, Result<f64, String>>>,
    mc: Mutex<HashMap<String, Result<McPair, String>>>,
    p_d2d: Mutex<HashMap<String, Result<f64, String>>>,
}

type McPair = (Vec<McEstimate>, Vec<McEstimate>);
/// Rendered parameters, link and threshold bits.
type AnalyticKey = (String, LinkKind, u64);

fn outage_key(params: &NetworkParams) -> String {
    let mut p = params.clone();
    p.delta = 0.0;
    p.w_d = 0.0;
    p.w_c = 1.0;
    p.gamma = 1.0;
    p.render()
}

impl OutageCache {
    fn p_d2d(&self, params: &NetworkParams, settings: &AnalysisSettings) -> Result<f64, String> {
        let key = outage_key(params);
        if let Some(v) = self.p_d2d.lock().expect("cache lock").get(&key) {
            return v.clone();
        }
        let v = p_d2d(params, Variant::Partitioned, settings)
            .map(|m| m.value)
            .map_err(|e| e.to_string());
        self.p_d2d.lock().expect("cache lock").insert(key, v.clone());
        v
    }

    fn outage(
        &self,
        mode: LinkKind,
        gamma: f64,
        params: &NetworkParams,
        pd: f64,
        settings: &AnalysisSettings,
    ) -> Result<f64, String> {
        let key = (outage_key(params), mode, gamma.to_bits());
        if let Some(v) = self.analytic.lock().expect("cache lock").get(&key) {
            return v.clone();
        }
        let v = outage_with_beam_error(gamma, mode, params, pd, settings)
            .map(|r| r.value)
            .map_err(|e| e.to_string());
        self.analytic.lock().expect("cache lock").insert(key, v.clone());
        v
    }

    fn mc_pair(&self, gammas: &[f64], params: &NetworkParams, pd: f64, mc: &McSettings) -> Result<McPair, String> {
        let key = format!("{}|{}|{}|{}", outage_key(params), list(gammas), mc.trials, mc.seed);
        if let Some(v) = self.mc.lock().expect("cache lock").get(&key) {
            return v.clone();
        }
        let v = simulate_outage_pair(gammas, params, pd, mc).map_err(|e| e.to_string());
        self.mc.lock().expect("cache lock").insert(key, v.clone());
        v
    }
}

/// Run one sweep with a fresh cache.
pub fn run_sweep(spec: &SweepSpec) -> Result<Dataset, CliError> {
    spec.validate()?;
    let cache = OutageCache::default();
    Ok(Dataset {
        metadata: spec.metadata(),
        rows: sweep_rows(spec, &cache)?,
    })
}

/// Rows of one sweep in (grid point, threshold, output, method) order.
pub fn sweep_rows(spec: &SweepSpec, cache: &OutageCache) -> Result<Vec<Row>, CliError> {
    spec.validate()?;
    let per_point: Vec<Vec<Row>> = spec
        .grid
        .par_iter()
        .map(|&x| point_rows(spec, x, cache))
        .collect();
    Ok(per_point.into_iter().flatten().collect())
}

struct Cell {
    value: Result<(f64, Option<f64>), String>,
    wall_ms: f64,
}

fn timed(f: impl FnOnce() -> Result<(f64, Option<f64>), String>) -> Cell {
    let t = Instant::now();
    let value = f();
    Cell {
        value,
        wall_ms: t.elapsed().as_secs_f64() * 1e3,
    }
}

fn point_rows(spec: &SweepSpec, x: f64, cache: &OutageCache) -> Vec<Row> {
    let params = spec.base.with_override(&spec.swept_key, x).map_err(|e| e.to_string());
    let gammas_db: Vec<f64> = match (&spec.gammas_db, &params) {
        (Some(g), _) => g.clone(),
        (None, Ok(p)) => vec![tidy_db(p.gamma)],
        (None, Err(_)) if spec.swept_key == "gamma_db" => vec![x],
        (None, Err(_)) => vec![tidy_db(spec.base.gamma)],
    };

    let mut methods = Vec::new();
    if spec.method.analytic() {
        methods.push("analytic");
    }
    if spec.method.mc() {
        methods.push("mc");
    }

    let mut cells: HashMap<(usize, usize, &str), Cell> = HashMap::new();
    match &params {
        Ok(p) => {
            for &m in &methods {
                let computed = if m == "analytic" {
                    analytic_cells(spec, p, &gammas_db, cache)
                } else {
                    mc_cells(spec, p, &gammas_db, cache)
                };
                for ((gi, oi), cell) in computed {
                    cells.insert((gi, oi, m), cell);
                }
            }
        }
        Err(e) => {
            for gi in 0..gammas_db.len() {
                for oi in 0..spec.outputs.len() {
                    for &m in &methods {
                        cells.insert(
                            (gi, oi, m),
                            Cell {
                                value: Err(format!("invalid parameters: {e}")),
                                wall_ms: 0.0,
                            },
                        );
                    }
                }
            }
        }
    }

    let mut rows = Vec::new();
    for (gi, &g_db) in gammas_db.iter().enumerate() {
        for (oi, output) in spec.outputs.iter().enumerate() {
            for &m in &methods {
                let cell = cells.remove(&(gi, oi, m)).expect("every cell computed");
                let (value, std_err, error) = match cell.value {
                    Ok((v, se)) => (Some(v), se, None),
                    Err(e) => (None, None, Some(e)),
                };
                rows.push(Row {
                    curve: spec.curve.clone(),
                    swept_key: spec.swept_key.clone(),
                    swept_value: x,
                    gamma_db: g_db,
                    output: output.name(),
                    method: m.to_string(),
                    value,
                    std_err,
                    wall_ms: spec.timing.then_some(cell.wall_ms),
                    error,
                });
            }
        }
    }
    rows
}

/// Threshold in dB with the round-off of the dB/linear conversions removed.
fn tidy_db(gamma: f64) -> f64 {
    let db = linear_to_db(gamma);
    let r = (db * 1e9).round() / 1e9;
    if (r - db).abs() < 1e-9 {
        r
    } else {
        db
    }
}

/// Laplace argument and conditioning distance for the grid row at
/// threshold `gamma`.
pub fn laplace_point(kind: LaplaceKind, gamma: f64, params: &NetworkParams) -> (f64, f64) {
    let (mode, power) = match kind {
        LaplaceKind::Cc | LaplaceKind::Dc(_) => (LinkKind::Cellular, params.p_c),
        LaplaceKind::Cd | LaplaceKind::DdIntra | LaplaceKind::DdInter(_) => (LinkKind::D2d, params.p_d),
    };
    let alpha = match mode {
        LinkKind::Cellular => params.alpha.los_cellular,
        LinkKind::D2d => params.alpha.los_d2d,
    };
    let g0 = aligned_gain(Receiver::serving(mode), params);
    let v = gamma * LAPLACE_REFERENCE_DISTANCE.powf(alpha) / (power * g0);
    (v, params.sigma_d())
}

fn analytic_cells(
    spec: &SweepSpec,
    params: &NetworkParams,
    gammas_db: &[f64],
    cache: &OutageCache,
) -> Vec<((usize, usize), Cell)> {
    let settings = &spec.analysis;
    let t = Instant::now();
    let pd = cache.p_d2d(params, settings);
    let pd_ms = t.elapsed().as_secs_f64() * 1e3;
    let mut out = Vec::new();
    for (gi, &g_db) in gammas_db.iter().enumerate() {
        let gamma = db_to_linear(g_db);
        for (oi, &output) in spec.outputs.iter().enumerate() {
            let cell = match &pd {
                Err(e) => Cell {
                    value: Err(format!("mode-selection probability: {e}")),
                    wall_ms: pd_ms,
                },
                Ok(pd) => {
                    let pd = *pd;
                    timed(|| analytic_value(output, gamma, params, pd, settings, cache).map(|v| (v, None)))
                }
            };
            out.push(((gi, oi), cell));
        }
    }
    out
}

fn analytic_value(
    output: Output,
    gamma: f64,
    params: &NetworkParams,
    pd: f64,
    settings: &AnalysisSettings,
    cache: &OutageCache,
) -> Result<f64, String> {
    match output {
        Output::PD2d => Ok(pd),
        Output::OutageC => cache.outage(LinkKind::Cellular, gamma, params, pd, settings),
        Output::OutageD => cache.outage(LinkKind::D2d, gamma, params, pd, settings),
        Output::Ase => {
            let overlay = params.sharing == Sharing::Overlay;
            let oc = if overlay && params.delta == 1.0 {
                1.0
            } else {
                cache.outage(LinkKind::Cellular, gamma, params, pd, settings)?
            };
            let od = if overlay && params.delta == 0.0 {
                1.0
            } else {
                cache.outage(LinkKind::D2d, gamma, params, pd, settings)?
            };
            Ok(crate::analysis::ase_from_outages(gamma, params, params.sharing, params.delta, pd, oc, od))
        }
        Output::PfObjective => {
            let mut p = params.clone();
            p.sharing = Sharing::Overlay;
            let oc = cache.outage(LinkKind::Cellular, gamma, &p, pd, settings)?;
            let od = cache.outage(LinkKind::D2d, gamma, &p, pd, settings)?;
            let rates = RateDensities {
                cellular: crate::analysis::ase_from_outages(gamma, &p, Sharing::Overlay, 0.0, pd, oc, od),
                d2d: crate::analysis::ase_from_outages(gamma, &p, Sharing::Overlay, 1.0, pd, oc, od),
            };
            Ok(proportional_fair_objective(params.delta, params.w_d, &rates))
        }
        Output::Laplace(kind) => {
            let kind = with_form(kind, settings);
            let (v, w0) = laplace_point(kind, gamma, params);
            laplace(kind, v, params, pd, Some(w0), settings).map_err(|e| e.to_string())
        }
    }
}

fn with_form(kind: LaplaceKind, settings: &AnalysisSettings) -> LaplaceKind {
    match kind {
        LaplaceKind::Dc(_) => LaplaceKind::Dc(settings.cluster_form),
        LaplaceKind::DdInter(_) => LaplaceKind::DdInter(settings.cluster_form),
        k => k,
    }
}

fn mc_cells(
    spec: &SweepSpec,
    params: &NetworkParams,
    gammas_db: &[f64],
    cache: &OutageCache,
) -> Vec<((usize, usize), Cell)> {
    let mc = &spec.mc;
    let gammas: Vec<f64> = gammas_db.iter().map(|g| db_to_linear(*g)).collect();
    let pd = cache.p_d2d(params, &spec.analysis);

    let needs = |f: fn(&Output) -> bool| spec.outputs.iter().any(f);
    let t = Instant::now();
    let own_pair = pd
        .clone()
        .and_then(|pd| {
            if needs(|o| matches!(o, Output::OutageC | Output::OutageD | Output::Ase)) {
                cache.mc_pair(&gammas, params, pd, mc).map(Some)
            } else {
                Ok(None)
            }
        });
    let own_ms = t.elapsed().as_secs_f64() * 1e3;
    let t = Instant::now();
    let overlay_pair = pd.clone().and_then(|pd| {
        if needs(|o| matches!(o, Output::PfObjective)) {
            let mut p = params.clone();
            p.sharing = Sharing::Overlay;
            cache.mc_pair(&gammas, &p, pd, mc).map(Some)
        } else {
            Ok(None)
        }
    });
    let overlay_ms = t.elapsed().as_secs_f64() * 1e3;
    let t = Instant::now();
    let mode = if needs(|o| matches!(o, Output::PD2d)) {
        Some(simulate_p_d2d(params, Variant::Partitioned, mc).map_err(|e| e.to_string()))
    } else {
        None
    };
    let mode_ms = t.elapsed().as_secs_f64() * 1e3;

    let mut out = Vec::new();
    for (gi, &gamma) in gammas.iter().enumerate() {
        for (oi, &output) in spec.outputs.iter().enumerate() {
            let pair_value = |pair: &Result<Option<McPair>, String>, f: &dyn Fn(&McPair) -> (f64, f64)| {
                match pair {
                    Ok(Some(p)) => Ok(f(p)),
                    Ok(None) => unreachable!("pair requested for this output"),
                    Err(e) => Err(e.clone()),
                }
            };
            let cell = match output {
                Output::PD2d => Cell {
                    value: mode
                        .clone()
                        .expect("mode selection simulated")
                        .map(|e| (e.mean, Some(e.std_err))),
                    wall_ms: mode_ms,
                },
                Output::OutageC | Output::OutageD | Output::Ase => {
                    let pd = pd.clone().unwrap_or(0.0);
                    let value = pair_value(&own_pair, &|(c, d)| match output {
                        Output::OutageC => (c[gi].mean, c[gi].std_err),
                        Output::OutageD => (d[gi].mean, d[gi].std_err),
                        _ => {
                            let e =
                                ase_from_estimates(gamma, params, params.sharing, params.delta, pd, &c[gi], &d[gi]);
                            (e.mean, e.std_err)
                        }
                    });
                    Cell {
                        value: value.map(|(v, se)| (v, Some(se))),
                        wall_ms: own_ms,
                    }
                }
                Output::PfObjective => {
                    let pd = pd.clone().unwrap_or(0.0);
                    let value = pair_value(&overlay_pair, &|(c, d)| {
                        pf_from_estimates(gamma, params, pd, &c[gi], &d[gi])
                    });
                    Cell {
                        value: value.map(|(v, se)| (v, Some(se))),
                        wall_ms: overlay_ms,
                    }
                }
                Output::Laplace(kind) => {
                    let kind = with_form(kind, &spec.analysis);
                    let (v, w0) = laplace_point(kind, gamma, params);
                    match &pd {
                        Err(e) => Cell {
                            value: Err(format!("mode-selection probability: {e}")),
                            wall_ms: 0.0,
                        },
                        Ok(pd) => timed(|| {
                            simulate_laplace(kind, v, params, *pd, Some(w0), mc)
                                .map(|e| (e.mean, Some(e.std_err)))
                                .map_err(|e| e.to_string())
                        }),
                    }
                }
            };
            out.push(((gi, oi), cell));
        }
    }
    out
}

/// Proportional-fair objective from simulated overlay outages, with the
/// standard error propagated to first order.
fn pf_from_estimates(gamma: f64, params: &NetworkParams, pd: f64, c: &McEstimate, d: &McEstimate) -> (f64, f64) {
    let rc = ase_from_estimates(gamma, params, Sharing::Overlay, 0.0, pd, c, d);
    let rd = ase_from_estimates(gamma, params, Sharing::Overlay, 1.0, pd, c, d);
    let rates = RateDensities {
        cellular: rc.mean,
        d2d: rd.mean,
    };
    let value = proportional_fair_objective(params.delta, params.w_d, &rates);
    let w_c = 1.0 - params.w_d;
    let rel = |e: &McEstimate| if e.mean > 0.0 { e.std_err / e.mean } else { f64::INFINITY };
    let se = ((w_c * rel(&rc)).powi(2) + (params.w_d * rel(&rd)).powi(2)).sqrt();
    (value, se)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::default_params;

    fn spec(outputs: Vec<Output>, method: Method) -> SweepSpec {
        SweepSpec {
            curve: String::new(),
            base: default_params(),
            swept_key: "n_bar".into(),
            grid: vec![3.0],
            outputs,
            method,
            gammas_db: Some(vec![0.0, 20.0]),
            mc: McSettings {
                trials: 300,
                ..McSettings::default()
            },
            analysis: AnalysisSettings::default(),
            timing: false,
        }
    }

    #[test]
    fn row_count_single_point() {
        let s = spec(vec![Output::PD2d, Output::Laplace(LaplaceKind::Cc)], Method::Analytic);
        let ds = run_sweep(&s).unwrap();
        assert_eq!(ds.rows.len(), 2 * 2);
        assert!(ds.rows.iter().all(|r| r.error.is_none() && r.std_err.is_none() && r.wall_ms.is_none()));
        assert_eq!(ds.rows[0].output, "p_d2d");
        assert_eq!(ds.rows[1].output, "laplace_cc");
        assert_eq!(ds.rows[2].gamma_db, 20.0);
    }

    #[test]
    fn invalid_point_reports_error_per_row() {
        let mut s = spec(vec![Output::PD2d], Method::Both);
        s.swept_key = "lambda_b".into();
        s.grid = vec![-1.0, 1e-5];
        let ds = run_sweep(&s).unwrap();
        assert_eq!(ds.rows.len(), 2 * 2 * 2);
        assert!(ds.rows[..4].iter().all(|r| r.value.is_none() && r.error.as_deref().unwrap().contains("lambda_b")));
        assert!(ds.rows[4..].iter().all(|r| r.value.is_some() && r.error.is_none()));
    }

    #[test]
    fn rejects_bad_specs() {
        let mut s = spec(vec![Output::PD2d], Method::Analytic);
        s.swept_key = "nonsense".into();
        assert!(run_sweep(&s).is_err());
        let mut s = spec(vec![Output::PD2d], Method::Analytic);
        s.grid.clear();
        assert!(run_sweep(&s).is_err());
        let mut s = spec(vec![Output::PD2d], Method::Analytic);
        s.swept_key = "gamma_db".into();
        assert!(run_sweep(&s).is_err());
    }

    #[test]
    fn threshold_from_params() {
        let mut s = spec(vec![Output::PD2d], Method::Analytic);
        s.gammas_db = None;
        s.swept_key = "gamma_db".into();
        s.grid = vec![-10.0, 40.0];
        let ds = run_sweep(&s).unwrap();
        assert_eq!(ds.rows.iter().map(|r| r.gamma_db).collect::<Vec<_>>(), vec![-10.0, 40.0]);
    }

    #[test]
    fn output_names_round_trip() {
        let form = crate::analysis::ClusterForm::Exact;
        let all = Output::parse_list("p_d2d,outage_c,outage_d,ase,pf_objective,laplace", form).unwrap();
        assert_eq!(all.len(), 10);
        let names: Vec<String> = all.iter().map(|o| o.name()).collect();
        assert_eq!(Output::parse_list(&names.join(","), form).unwrap(), all);
        assert!(Output::parse_list("bogus", form).is_err());
    }

    #[test]
    fn laplace_anchor() {
        let p = default_params();
        let (v, w0) = laplace_point(LaplaceKind::Cc, 1.0, &p);
        assert!((v - 2500.0 / (200.0 * 1e4)).abs() < 1e-15);
        assert_eq!(w0, 5.0);
    }
}
