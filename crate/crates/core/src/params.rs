//! Scenario definition: the full set of scalar model parameters, unit
//! conversion at the configuration boundary, and validation.
//!
//! Everything inside the crate works in linear units (mW, metres, linear
//! antenna gains, radians). Decibel quantities only appear in the config
//! document and on the command line.

use std::f64::consts::PI;
use std::fmt::{self, Write as _};

use thiserror::Error;

/// `10^(x/10)`.
pub fn db_to_linear(x: f64) -> f64 {
    10f64.powf(x / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Sectored (two-level) antenna pattern.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AntennaPattern {
    /// Main-lobe gain, linear.
    pub main_gain: f64,
    /// Side-lobe gain, linear.
    pub side_gain: f64,
    /// Main-lobe beamwidth in radians.
    pub beamwidth: f64,
}

impl AntennaPattern {
    /// Probability that a uniformly oriented beam covers a given direction.
    pub fn main_lobe_fraction(&self) -> f64 {
        self.beamwidth / (2.0 * PI)
    }
}

/// Modified LOS ball: links no longer than `radius` are LOS with
/// probability `p_los`, longer links are always NLOS.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LosBall {
    pub p_los: f64,
    pub radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathLossExponents {
    pub los_cellular: f64,
    pub nlos_cellular: f64,
    pub los_d2d: f64,
    pub nlos_d2d: f64,
}

/// Spectrum sharing between cellular and D2D transmitters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sharing {
    /// D2D reuses the cellular uplink channel (cross-mode interference).
    Underlay,
    /// Orthogonal partition of the band; no cross-mode interference.
    Overlay,
}

impl Sharing {
    /// The 0/1 spectrum-sharing indicator.
    pub fn beta(self) -> f64 {
        match self {
            Sharing::Underlay => 1.0,
            Sharing::Overlay => 0.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Sharing::Underlay => "underlay",
            Sharing::Overlay => "overlay",
        }
    }
}

impl std::str::FromStr for Sharing {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "underlay" => Ok(Sharing::Underlay),
            "overlay" => Ok(Sharing::Overlay),
            other => Err(format!("unknown sharing mode `{other}` (expected underlay|overlay)")),
        }
    }
}

/// One coherent network scenario. Immutable once validated.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkParams {
    /// BS density, 1/m².
    pub lambda_b: f64,
    /// Cluster-centre density, 1/m².
    pub lambda_c: f64,
    /// Cellular-UE density, 1/m². Only used for the saturation check.
    pub lambda_cu: f64,
    /// Variance of the Gaussian scattering around a cluster centre, m².
    pub sigma_d_sq: f64,
    /// Potential D2D UEs per cluster.
    pub n_total: u32,
    /// Mean number of simultaneously transmitting potential D2D UEs per cluster.
    pub n_bar: f64,
    /// Cellular transmit power, mW.
    pub p_c: f64,
    /// D2D transmit power, mW.
    pub p_d: f64,
    pub alpha: PathLossExponents,
    pub los_ball_c: LosBall,
    pub los_ball_d: LosBall,
    pub antenna_bs: AntennaPattern,
    pub antenna_ue: AntennaPattern,
    /// Mode-selection bias.
    pub t_d: f64,
    pub sharing: Sharing,
    /// Fraction of the band given to D2D under overlay sharing.
    pub delta: f64,
    /// SINR threshold, linear.
    pub gamma: f64,
    /// Noise power, mW.
    pub noise: f64,
    /// Beamsteering error standard deviation, radians.
    pub sigma_be: f64,
    pub w_c: f64,
    pub w_d: f64,
    /// Simulation window radius in metres; `None` means 10 x the largest LOS ball.
    pub window_radius: Option<f64>,
    /// Include the serving-path-loss retention factor in the cellular-to-D2D
    /// interference field.
    pub cd_include_q: bool,
}

impl Default for NetworkParams {
    fn default() -> Self {
        default_params()
    }
}

/// Table defaults used by every scenario unless overridden.
pub fn default_params() -> NetworkParams {
    let pattern = AntennaPattern {
        main_gain: db_to_linear(20.0),
        side_gain: db_to_linear(-10.0),
        beamwidth: 30f64.to_radians(),
    };
    NetworkParams {
        lambda_b: 1e-5,
        lambda_c: 1e-4,
        lambda_cu: 1e-3,
        sigma_d_sq: 25.0,
        n_total: 40,
        n_bar: 3.0,
        p_c: 200.0,
        p_d: 200.0,
        alpha: PathLossExponents {
            los_cellular: 2.0,
            nlos_cellular: 4.0,
            los_d2d: 2.0,
            nlos_d2d: 4.0,
        },
        los_ball_c: LosBall {
            p_los: 1.0,
            radius: 100.0,
        },
        los_ball_d: LosBall {
            p_los: 1.0,
            radius: 50.0,
        },
        antenna_bs: pattern,
        antenna_ue: pattern,
        t_d: 1.0,
        sharing: Sharing::Underlay,
        delta: 0.2,
        gamma: db_to_linear(0.0),
        noise: db_to_linear(-74.0),
        sigma_be: 0.0,
        w_c: 0.6,
        w_d: 0.4,
        window_radius: None,
        cd_include_q: false,
    }
}

impl NetworkParams {
    /// Scattering standard deviation, m.
    pub fn sigma_d(&self) -> f64 {
        self.sigma_d_sq.sqrt()
    }

    pub fn beta(&self) -> f64 {
        self.sharing.beta()
    }

    pub fn window_radius(&self) -> f64 {
        self.window_radius
            .unwrap_or_else(|| 10.0 * self.los_ball_c.radius.max(self.los_ball_d.radius))
    }

    /// Check every invariant. On success returns the (possibly empty) list of
    /// soft warnings; on failure lists every violated constraint.
    pub fn validate(&self) -> Result<Vec<String>, ParamError> {
        let mut bad = Vec::new();
        let mut positive = |key: &'static str, x: f64| {
            if !(x.is_finite() && x > 0.0) {
                bad.push(Violation::new(key, format!("must be finite and > 0, got {x}")));
            }
        };
        positive("lambda_b", self.lambda_b);
        positive("lambda_c", self.lambda_c);
        positive("lambda_cu", self.lambda_cu);
        positive("sigma_d_sq", self.sigma_d_sq);
        positive("p_c_mw", self.p_c);
        positive("p_d_mw", self.p_d);
        positive("r_b_c", self.los_ball_c.radius);
        positive("r_b_d", self.los_ball_d.radius);
        positive("noise_dbm", self.noise);
        positive("gamma_db", self.gamma);
        if let Some(r) = self.window_radius {
            positive("window_radius", r);
        }

        for (key, a) in [
            ("alpha_lc", self.alpha.los_cellular),
            ("alpha_nc", self.alpha.nlos_cellular),
            ("alpha_ld", self.alpha.los_d2d),
            ("alpha_nd", self.alpha.nlos_d2d),
        ] {
            if !(a.is_finite() && a >= 2.0) {
                bad.push(Violation::new(key, format!("path-loss exponent must be >= 2, got {a}")));
            }
        }
        for (key, p) in [("p_l_c", self.los_ball_c.p_los), ("p_l_d", self.los_ball_d.p_los)] {
            if !(0.0..=1.0).contains(&p) {
                bad.push(Violation::new(key, format!("must lie in [0, 1], got {p}")));
            }
        }
        for (prefix, pat) in [("bs", &self.antenna_bs), ("ue", &self.antenna_ue)] {
            if !(pat.side_gain.is_finite() && pat.side_gain > 0.0) {
                bad.push(Violation::new(
                    if prefix == "bs" { "s_bs_db" } else { "s_ue_db" },
                    format!("side-lobe gain must be > 0, got {}", pat.side_gain),
                ));
            }
            if !(pat.main_gain.is_finite() && pat.main_gain >= pat.side_gain) {
                bad.push(Violation::new(
                    if prefix == "bs" { "m_bs_db" } else { "m_ue_db" },
                    format!(
                        "main-lobe gain {} must be >= side-lobe gain {}",
                        pat.main_gain, pat.side_gain
                    ),
                ));
            }
            if !(pat.beamwidth > 0.0 && pat.beamwidth <= 2.0 * PI + 1e-12) {
                bad.push(Violation::new(
                    if prefix == "bs" { "theta_bs_deg" } else { "theta_ue_deg" },
                    format!("beamwidth must lie in (0, 360] degrees, got {}", pat.beamwidth.to_degrees()),
                ));
            }
        }
        if !(self.t_d.is_finite() || self.t_d == f64::INFINITY) || self.t_d < 0.0 || self.t_d.is_nan() {
            bad.push(Violation::new("t_d", format!("must lie in [0, inf), got {}", self.t_d)));
        }
        if !(0.0..=1.0).contains(&self.delta) {
            bad.push(Violation::new("delta", format!("must lie in [0, 1], got {}", self.delta)));
        }
        if !(0.0..=1.0).contains(&self.w_d) || !(0.0..=1.0).contains(&self.w_c) {
            bad.push(Violation::new("w_d", format!("weights must lie in [0, 1], got w_d = {}", self.w_d)));
        } else if (self.w_c + self.w_d - 1.0).abs() > 1e-12 {
            bad.push(Violation::new(
                "w_d",
                format!("w_c + w_d must equal 1, got {}", self.w_c + self.w_d),
            ));
        }
        if !(self.sigma_be.is_finite() && self.sigma_be >= 0.0) {
            bad.push(Violation::new("sigma_be_deg", format!("must be >= 0, got {}", self.sigma_be)));
        }
        if self.n_total < 2 {
            bad.push(Violation::new("n_total", format!("must be >= 2, got {}", self.n_total)));
        }
        if !(self.n_bar.is_finite() && self.n_bar >= 0.0) {
            bad.push(Violation::new("n_bar", format!("must be >= 0, got {}", self.n_bar)));
        } else if self.n_bar > f64::from(self.n_total) / 2.0 {
            bad.push(Violation::new(
                "n_bar",
                format!(
                    "must not exceed n_total/2 = {}, got {}",
                    f64::from(self.n_total) / 2.0,
                    self.n_bar
                ),
            ));
        }

        if !bad.is_empty() {
            return Err(ParamError::Invalid(bad));
        }

        let mut warnings = Vec::new();
        if self.n_bar > f64::from(self.n_total) / 4.0 {
            warnings.push(format!(
                "n_bar = {} exceeds n_total/4 = {}; the untruncated-Poisson approximation of the cluster interference degrades",
                self.n_bar,
                f64::from(self.n_total) / 4.0
            ));
        }
        let ball = self.los_ball_c.radius.max(self.los_ball_d.radius);
        if self.window_radius() < 5.0 * ball {
            warnings.push(format!(
                "window radius {} m is below 5 x the largest LOS ball radius ({} m)",
                self.window_radius(),
                5.0 * ball
            ));
        }
        if self.lambda_cu + self.lambda_c * self.n_bar < 10.0 * self.lambda_b {
            warnings.push(format!(
                "UE density {} per m² is not well above the BS density {}; the saturated-uplink assumption is doubtful",
                self.lambda_cu + self.lambda_c * self.n_bar,
                self.lambda_b
            ));
        }
        Ok(warnings)
    }

    /// Render as a config document accepted by [`load_params`].
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (key, value) in self.config_entries() {
            let _ = writeln!(out, "{key} = {value}");
        }
        out
    }

    /// Value of a config key in config units; booleans read as 0 or 1.
    /// `None` for unknown keys and for an unset `window_radius`.
    pub fn get(&self, key: &str) -> Option<f64> {
        if key == "sigma_d" {
            return Some(self.sigma_d());
        }
        let (_, value) = self.config_entries().into_iter().find(|(k, _)| *k == key)?;
        match value.as_str() {
            "true" => Some(1.0),
            "false" => Some(0.0),
            v => v.parse().ok(),
        }
    }

    /// A copy with one config key overridden (config-key units, e.g. dB).
    pub fn with_override(&self, key: &str, value: f64) -> Result<NetworkParams, ParamError> {
        self.with_overrides(&[(key.to_string(), value)])
    }

    pub fn with_overrides(&self, overrides: &[(String, f64)]) -> Result<NetworkParams, ParamError> {
        let mut table = self.to_table();
        for (key, value) in overrides {
            let (key, value) = match key.as_str() {
                // Convenience for sweeps over the scattering standard deviation.
                "sigma_d" => ("sigma_d_sq".to_string(), value * value),
                _ => (key.clone(), *value),
            };
            if !KEYS.contains(&key.as_str()) {
                return Err(ParamError::Parse(unknown_key_message(&key)));
            }
            let v = match key.as_str() {
                "n_total" | "beta" if value.fract() == 0.0 => toml::Value::Integer(value as i64),
                "cd_include_q" => toml::Value::Boolean(value != 0.0),
                _ => toml::Value::Float(value),
            };
            table.insert(key, v);
        }
        from_table(&table)
    }

    fn to_table(&self) -> toml::Table {
        let mut table = toml::Table::new();
        for (key, value) in self.config_entries() {
            let parsed: toml::Table = toml::from_str(&format!("{key} = {value}")).expect("rendered entry parses");
            table.extend(parsed);
        }
        table
    }

    fn config_entries(&self) -> Vec<(&'static str, String)> {
        let f = |x: f64| format!("{x:?}");
        // Unit conversions leave noise in the last digits (30° -> 29.999...).
        let g = |x: f64| f(format!("{x:.12e}").parse().expect("formatted float parses"));
        let mut e = vec![
            ("lambda_b", f(self.lambda_b)),
            ("lambda_c", f(self.lambda_c)),
            ("lambda_cu", f(self.lambda_cu)),
            ("sigma_d_sq", f(self.sigma_d_sq)),
            ("n_total", self.n_total.to_string()),
            ("n_bar", f(self.n_bar)),
            ("p_c_mw", f(self.p_c)),
            ("p_d_mw", f(self.p_d)),
            ("alpha_lc", f(self.alpha.los_cellular)),
            ("alpha_nc", f(self.alpha.nlos_cellular)),
            ("alpha_ld", f(self.alpha.los_d2d)),
            ("alpha_nd", f(self.alpha.nlos_d2d)),
            ("p_l_c", f(self.los_ball_c.p_los)),
            ("r_b_c", f(self.los_ball_c.radius)),
            ("p_l_d", f(self.los_ball_d.p_los)),
            ("r_b_d", f(self.los_ball_d.radius)),
            ("m_bs_db", g(linear_to_db(self.antenna_bs.main_gain))),
            ("s_bs_db", g(linear_to_db(self.antenna_bs.side_gain))),
            ("theta_bs_deg", g(self.antenna_bs.beamwidth.to_degrees())),
            ("m_ue_db", g(linear_to_db(self.antenna_ue.main_gain))),
            ("s_ue_db", g(linear_to_db(self.antenna_ue.side_gain))),
            ("theta_ue_deg", g(self.antenna_ue.beamwidth.to_degrees())),
            ("t_d", f(self.t_d)),
            (
                "beta",
                match self.sharing {
                    Sharing::Underlay => "1".to_string(),
                    Sharing::Overlay => "0".to_string(),
                },
            ),
            ("delta", f(self.delta)),
            ("gamma_db", g(linear_to_db(self.gamma))),
            ("noise_dbm", g(linear_to_db(self.noise))),
            ("sigma_be_deg", g(self.sigma_be.to_degrees())),
            ("w_d", f(self.w_d)),
        ];
        if let Some(r) = self.window_radius {
            e.push(("window_radius", f(r)));
        }
        e.push(("cd_include_q", self.cd_include_q.to_string()));
        e
    }
}

/// Accepted config keys, in canonical order.
pub const KEYS: &[&str] = &[
    "lambda_b",
    "lambda_c",
    "lambda_cu",
    "sigma_d_sq",
    "n_total",
    "n_bar",
    "p_c_mw",
    "p_d_mw",
    "alpha_lc",
    "alpha_nc",
    "alpha_ld",
    "alpha_nd",
    "p_l_c",
    "r_b_c",
    "p_l_d",
    "r_b_d",
    "m_bs_db",
    "s_bs_db",
    "theta_bs_deg",
    "m_ue_db",
    "s_ue_db",
    "theta_ue_deg",
    "t_d",
    "beta",
    "delta",
    "gamma_db",
    "noise_dbm",
    "sigma_be_deg",
    "w_d",
    "window_radius",
    "cd_include_q",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub key: &'static str,
    pub message: String,
}

impl Violation {
    fn new(key: &'static str, message: String) -> Self {
        Self { key, message }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.key, self.message)
    }
}

#[derive(Debug, Error)]
pub enum ParamError {
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("invalid parameters: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
}

impl ParamError {
    /// Keys named by a validation failure (empty for parse errors).
    pub fn keys(&self) -> Vec<&'static str> {
        match self {
            ParamError::Parse(_) => Vec::new(),
            ParamError::Invalid(v) => v.iter().map(|v| v.key).collect(),
        }
    }
}

fn unknown_key_message(key: &str) -> String {
    match key {
        "sigma_d" => "unknown key `sigma_d`: the scattering parameter is given as a variance, use `sigma_d_sq` (m²)"
            .to_string(),
        _ => format!("unknown key `{key}`"),
    }
}

/// Parse and validate a flat key-value config document. Missing keys take
/// their default values.
pub fn load_params(source: &str) -> Result<NetworkParams, ParamError> {
    let table: toml::Table = toml::from_str(source).map_err(|e| ParamError::Parse(e.to_string()))?;
    from_table(&table)
}

fn from_table(table: &toml::Table) -> Result<NetworkParams, ParamError> {
    for (key, value) in table {
        if !KEYS.contains(&key.as_str()) {
            return Err(ParamError::Parse(unknown_key_message(key)));
        }
        if value.is_table() || value.is_array() {
            return Err(ParamError::Parse(format!("key `{key}` must be a scalar")));
        }
    }

    let mut bad = Vec::new();
    let num = |key: &'static str, bad: &mut Vec<Violation>| -> Option<f64> {
        match table.get(key) {
            None => None,
            Some(toml::Value::Float(x)) => Some(*x),
            Some(toml::Value::Integer(i)) => Some(*i as f64),
            Some(other) => {
                bad.push(Violation::new(key, format!("expected a number, got `{other}`")));
                None
            }
        }
    };

    let mut p = default_params();
    macro_rules! set {
        ($key:literal, $target:expr) => {
            if let Some(x) = num($key, &mut bad) {
                $target = x;
            }
        };
        ($key:literal, $target:expr, $conv:expr) => {
            if let Some(x) = num($key, &mut bad) {
                $target = $conv(x);
            }
        };
    }
    set!("lambda_b", p.lambda_b);
    set!("lambda_c", p.lambda_c);
    set!("lambda_cu", p.lambda_cu);
    set!("sigma_d_sq", p.sigma_d_sq);
    set!("n_bar", p.n_bar);
    set!("p_c_mw", p.p_c);
    set!("p_d_mw", p.p_d);
    set!("alpha_lc", p.alpha.los_cellular);
    set!("alpha_nc", p.alpha.nlos_cellular);
    set!("alpha_ld", p.alpha.los_d2d);
    set!("alpha_nd", p.alpha.nlos_d2d);
    set!("p_l_c", p.los_ball_c.p_los);
    set!("r_b_c", p.los_ball_c.radius);
    set!("p_l_d", p.los_ball_d.p_los);
    set!("r_b_d", p.los_ball_d.radius);
    set!("m_bs_db", p.antenna_bs.main_gain, db_to_linear);
    set!("s_bs_db", p.antenna_bs.side_gain, db_to_linear);
    set!("theta_bs_deg", p.antenna_bs.beamwidth, f64::to_radians);
    set!("m_ue_db", p.antenna_ue.main_gain, db_to_linear);
    set!("s_ue_db", p.antenna_ue.side_gain, db_to_linear);
    set!("theta_ue_deg", p.antenna_ue.beamwidth, f64::to_radians);
    set!("t_d", p.t_d);
    set!("delta", p.delta);
    set!("gamma_db", p.gamma, db_to_linear);
    set!("noise_dbm", p.noise, db_to_linear);
    set!("sigma_be_deg", p.sigma_be, f64::to_radians);
    if let Some(w) = num("w_d", &mut bad) {
        p.w_d = w;
        p.w_c = 1.0 - w;
    }
    if let Some(r) = num("window_radius", &mut bad) {
        p.window_radius = Some(r);
    }

    match table.get("n_total") {
        None => {}
        Some(toml::Value::Integer(n)) if *n >= 0 && *n <= i64::from(u32::MAX) => p.n_total = *n as u32,
        Some(other) => bad.push(Violation::new(
            "n_total",
            format!("must be a non-negative integer, got `{other}`"),
        )),
    }
    match table.get("beta") {
        None => {}
        Some(toml::Value::Integer(1)) => p.sharing = Sharing::Underlay,
        Some(toml::Value::Integer(0)) => p.sharing = Sharing::Overlay,
        Some(other) => bad.push(Violation::new(
            "beta",
            format!("spectrum-sharing indicator must be 0 (overlay) or 1 (underlay), got `{other}`"),
        )),
    }
    match table.get("cd_include_q") {
        None => {}
        Some(toml::Value::Boolean(b)) => p.cd_include_q = *b,
        Some(other) => bad.push(Violation::new(
            "cd_include_q",
            format!("expected true or false, got `{other}`"),
        )),
    }

    match p.validate() {
        Ok(_) if bad.is_empty() => Ok(p),
        Ok(_) => Err(ParamError::Invalid(bad)),
        Err(ParamError::Invalid(mut more)) => {
            bad.append(&mut more);
            Err(ParamError::Invalid(bad))
        }
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn decibel_conversions() {
        assert_eq!(db_to_linear(0.0), 1.0);
        assert!((db_to_linear(20.0) - 100.0).abs() < 1e-12);
        let noise = db_to_linear(-74.0);
        assert!((noise - 3.981_071_705_534_97e-8).abs() < 1e-20);
    }

    #[test]
    fn table_defaults() {
        let p = default_params();
        assert_eq!(p.n_total, 40);
        assert_eq!(p.t_d, 1.0);
        assert_eq!(p.n_bar, 3.0);
        assert_eq!(p.sigma_d(), 5.0);
        assert_eq!(p.sharing, Sharing::Underlay);
        assert!((p.antenna_bs.main_gain - 100.0).abs() < 1e-12);
        assert!((p.antenna_ue.side_gain - 0.1).abs() < 1e-15);
        assert!((p.antenna_bs.main_lobe_fraction() - 1.0 / 12.0).abs() < 1e-15);
        assert_eq!(p.window_radius(), 1000.0);
        assert!(p.validate().unwrap().is_empty());
    }

    #[test]
    fn empty_document_gives_defaults() {
        assert_eq!(load_params("").unwrap(), default_params());
    }

    #[test]
    fn beta_out_of_range_is_named() {
        let err = load_params("beta = 2").unwrap_err();
        assert_eq!(err.keys(), vec!["beta"]);
        assert!(err.to_string().contains("beta"));
    }

    #[test]
    fn sigma_d_key_is_rejected_in_favour_of_variance() {
        let err = load_params("sigma_d = 25").unwrap_err();
        assert!(matches!(err, ParamError::Parse(_)));
        assert!(err.to_string().contains("sigma_d_sq"));
        let p = load_params("sigma_d_sq = 25").unwrap();
        assert_eq!(p.sigma_d(), 5.0);
    }

    #[test]
    fn every_violation_is_listed() {
        let err = load_params("lambda_b = -1\np_l_c = 1.5\nalpha_nd = 1.5\nn_bar = 30").unwrap_err();
        let keys = err.keys();
        for k in ["lambda_b", "p_l_c", "alpha_nd", "n_bar"] {
            assert!(keys.contains(&k), "{k} missing from {keys:?}");
        }
    }

    #[test]
    fn malformed_document_is_a_parse_error() {
        assert!(matches!(load_params("lambda_b = = 3"), Err(ParamError::Parse(_))));
        assert!(matches!(load_params("lambda_b = \"x\""), Err(ParamError::Invalid(_))));
    }

    #[test]
    fn n_bar_regimes() {
        assert!(load_params("n_bar = 21").is_err());
        let warnings = load_params("n_bar = 15").unwrap().validate().unwrap();
        assert_eq!(warnings.len(), 1);
        assert!(warnings[0].contains("n_total/4"));
    }

    #[test]
    fn overrides_use_config_units() {
        let p = default_params().with_override("gamma_db", 40.0).unwrap();
        assert!((p.gamma - 1e4).abs() < 1e-8);
        let p = p.with_override("sigma_d", 2.0).unwrap();
        assert_eq!(p.sigma_d_sq, 4.0);
        let p = p.with_override("beta", 0.0).unwrap();
        assert_eq!(p.sharing, Sharing::Overlay);
        assert!(p.with_override("bogus", 1.0).is_err());
    }

    #[test]
    fn get_reads_config_units() {
        let p = default_params().with_override("gamma_db", 40.0).unwrap();
        assert!((p.get("gamma_db").unwrap() - 40.0).abs() < 1e-12);
        assert_eq!(p.get("sigma_d"), Some(5.0));
        assert_eq!(p.get("beta"), Some(1.0));
        assert_eq!(p.get("cd_include_q"), Some(0.0));
        assert_eq!(p.get("bogus"), None);
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1e-300)
    }

    fn params_close(a: &NetworkParams, b: &NetworkParams) -> bool {
        let fa = a.render();
        let fb = b.render();
        fa.lines().zip(fb.lines()).all(|(x, y)| {
            let (kx, vx) = x.split_once(" = ").unwrap();
            let (ky, vy) = y.split_once(" = ").unwrap();
            kx == ky
                && match (vx.parse::<f64>(), vy.parse::<f64>()) {
                    (Ok(p), Ok(q)) => close(p, q),
                    _ => vx == vy,
                }
        }) && a.n_total == b.n_total
            && a.sharing == b.sharing
    }

    proptest! {
        #[test]
        fn db_round_trip(x in -100.0f64..100.0) {
            prop_assert!((linear_to_db(db_to_linear(x)) - x).abs() < 1e-12);
        }

        #[test]
        fn config_round_trip(
            lambda_b in 1e-7f64..1e-3,
            sigma_d_sq in 0.5f64..400.0,
            n_bar in 0.0f64..10.0,
            p_l_c in 0.0f64..=1.0,
            r_b_d in 1.0f64..200.0,
            m_db in 0.0f64..30.0,
            theta_deg in 1.0f64..360.0,
            underlay in any::<bool>(),
            w_d in 0.0f64..=1.0,
            gamma_db in -20.0f64..60.0,
        ) {
            let mut p = default_params();
            p.lambda_b = lambda_b;
            p.sigma_d_sq = sigma_d_sq;
            p.n_bar = n_bar;
            p.los_ball_c.p_los = p_l_c;
            p.los_ball_d.radius = r_b_d;
            p.antenna_ue.main_gain = db_to_linear(m_db);
            p.antenna_bs.beamwidth = theta_deg.to_radians();
            p.sharing = if underlay { Sharing::Underlay } else { Sharing::Overlay };
            p.w_d = w_d;
            p.w_c = 1.0 - w_d;
            p.gamma = db_to_linear(gamma_db);
            prop_assume!(p.validate().is_ok());
            let q = load_params(&p.render()).unwrap();
            prop_assert!(params_close(&p, &q), "{}\n---\n{}", p.render(), q.render());
        }
    }
}
