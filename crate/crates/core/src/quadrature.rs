//! Adaptive Gauss-Kronrod (G10/K21) quadrature with explicit breakpoints
//! and a doubling-panel scheme for semi-infinite ranges.

use std::cell::Cell;

use thiserror::Error;

// Kronrod abscissae on [-1, 1], positive half, descending. Odd indices are
// the 10-point Gauss nodes.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_525_452_290,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Tolerances for one integration call.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadSettings {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Maximum number of panels kept by the adaptive refinement.
    pub max_panels: usize,
}

impl Default for QuadSettings {
    fn default() -> Self {
        Self {
            rel_tol: 1e-6,
            abs_tol: 1e-10,
            max_panels: 400,
        }
    }
}

impl QuadSettings {
    /// Settings for an integral nested inside another one.
    pub fn inner(&self) -> Self {
        Self {
            rel_tol: self.rel_tol / 10.0,
            abs_tol: self.abs_tol / 10.0,
            max_panels: self.max_panels,
        }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub abs_err: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum QuadError {
    #[error("quadrature did not converge: value {value:e}, error estimate {abs_err:e} after {panels} panels")]
    NotConverged { value: f64, abs_err: f64, panels: usize },
    #[error("integrand is not finite at x = {at}")]
    NonFinite { at: f64 },
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

fn kronrod<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Result<Panel, QuadError> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    if !fc.is_finite() {
        return Err(QuadError::NonFinite { at: center });
    }
    let mut resk = fc * WGK[10];
    let mut resg = 0.0;
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let (x1, x2) = (center - dx, center + dx);
        let f1 = f(x1);
        let f2 = f(x2);
        if !f1.is_finite() {
            return Err(QuadError::NonFinite { at: x1 });
        }
        if !f2.is_finite() {
            return Err(QuadError::NonFinite { at: x2 });
        }
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let reskh = 0.5 * resk;
    let mut resasc = WGK[10] * (fc - reskh).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - reskh).abs() + (fv2[j] - reskh).abs());
    }
    let resasc = resasc * half.abs();
    let value = resk * half;
    let mut err = ((resk - resg) * half).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    Ok(Panel { a, b, value, err })
}

fn sum(panels: &[Panel]) -> (f64, f64) {
    // Neumaier summation keeps the total independent of panel count drift.
    let mut s = 0.0;
    let mut c = 0.0;
    let mut e = 0.0;
    for p in panels {
        let t = s + p.value;
        if s.abs() >= p.value.abs() {
            c += (s - t) + p.value;
        } else {
            c += (p.value - t) + s;
        }
        s = t;
        e += p.err;
    }
    (s + c, e)
}

/// Integrate over `[a, b]`.
pub fn integrate<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, settings: &QuadSettings) -> Result<Estimate, QuadError> {
    integrate_breaks(f, &[a, b], settings)
}

/// Integrate over `[points[0], points[last]]`, starting with one panel per
/// gap between consecutive breakpoints. Breakpoints are sorted and
/// deduplicated first.
pub fn integrate_breaks<F: FnMut(f64) -> f64>(
    mut f: F,
    points: &[f64],
    settings: &QuadSettings,
) -> Result<Estimate, QuadError> {
    let mut pts: Vec<f64> = points.iter().copied().filter(|x| x.is_finite()).collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut panels = Vec::with_capacity(pts.len() + 16);
    let mut evaluations = 0;
    for w in pts.windows(2) {
        panels.push(kronrod(&mut f, w[0], w[1])?);
        evaluations += 21;
    }
    if panels.is_empty() {
        return Ok(Estimate {
            value: 0.0,
            abs_err: 0.0,
            evaluations: 0,
        });
    }
    loop {
        let (value, err) = sum(&panels);
        if err <= settings.target(value) {
            return Ok(Estimate {
                value,
                abs_err: err,
                evaluations,
            });
        }
        // Bisect the panel with the largest error that can still be split.
        let worst = panels
            .iter()
            .enumerate()
            .filter(|(_, p)| {
                let mid = 0.5 * (p.a + p.b);
                mid > p.a && mid < p.b && (p.b - p.a) > 1e-13 * p.a.abs().max(p.b.abs())
            })
            .max_by(|x, y| x.1.err.total_cmp(&y.1.err))
            .map(|(i, _)| i);
        let Some(i) = worst else {
            return Err(QuadError::NotConverged {
                value,
                abs_err: err,
                panels: panels.len(),
            });
        };
        if panels.len() >= settings.max_panels {
            return Err(QuadError::NotConverged {
                value,
                abs_err: err,
                panels: panels.len(),
            });
        }
        let p = panels[i];
        let mid = 0.5 * (p.a + p.b);
        panels[i] = kronrod(&mut f, p.a, mid)?;
        panels.push(kronrod(&mut f, mid, p.b)?);
        evaluations += 42;
    }
}

/// Integrate over `[points[0], inf)`.
///
/// The range beyond the last breakpoint is covered by panels of doubling
/// width starting at `first_span`. `tail(t)` must bound `∫_t^inf |f|`; the
/// walk stops once that bound falls below the tolerance and the bound is
/// added to the reported error.
pub fn integrate_to_infinity<F, T>(
    mut f: F,
    points: &[f64],
    first_span: f64,
    tail: T,
    settings: &QuadSettings,
) -> Result<Estimate, QuadError>
where
    F: FnMut(f64) -> f64,
    T: Fn(f64) -> f64,
{
    let head = integrate_breaks(&mut f, points, settings)?;
    let mut value = head.value;
    let mut abs_err = head.abs_err;
    let mut evaluations = head.evaluations;
    let mut start = points.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut span = first_span;
    for _ in 0..200 {
        let bound = tail(start);
        if bound <= 0.25 * settings.target(value) || bound == 0.0 {
            return Ok(Estimate {
                value,
                abs_err: abs_err + bound,
                evaluations,
            });
        }
        let piece = integrate(&mut f, start, start + span, settings)?;
        value += piece.value;
        abs_err += piece.abs_err;
        evaluations += piece.evaluations;
        start += span;
        span *= 2.0;
    }
    Err(QuadError::NotConverged {
        value,
        abs_err: abs_err + tail(start),
        panels: 200,
    })
}

/// Collects the first failure raised inside an integrand closure, where
/// `?` cannot propagate it. Closures report through [`ErrorSink::catch`]
/// and yield 0; the caller checks [`ErrorSink::finish`] afterwards.
#[derive(Default)]
pub struct ErrorSink<E> {
    first: Cell<Option<E>>,
}

impl<E> ErrorSink<E> {
    pub fn new() -> Self {
        Self { first: Cell::new(None) }
    }

    pub fn catch(&self, r: Result<f64, E>) -> f64 {
        match r {
            Ok(x) => x,
            Err(e) => {
                let prev = self.first.take();
                self.first.set(Some(prev.unwrap_or(e)));
                0.0
            }
        }
    }

    pub fn failed(&self) -> bool {
        let prev = self.first.take();
        let failed = prev.is_some();
        self.first.set(prev);
        failed
    }

    pub fn finish<T>(self, value: T) -> Result<T, E> {
        match self.first.into_inner() {
            Some(e) => Err(e),
            None => Ok(value),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tight() -> QuadSettings {
        QuadSettings {
            rel_tol: 1e-12,
            abs_tol: 1e-15,
            max_panels: 1000,
        }
    }

    #[test]
    fn single_panel_exactness() {
        // K21 is exact through degree 31, G10 through degree 19.
        for n in 0..=31 {
            let p = kronrod(&mut |x: f64| x.powi(n), 0.0, 1.0).unwrap();
            let exact = 1.0 / f64::from(n + 1);
            assert!((p.value - exact).abs() < 1e-14, "degree {n}: {}", p.value);
        }
        let mut g = 0.0;
        for j in 0..5 {
            let x = XGK[2 * j + 1];
            g += WG[j] * (x.powi(18) + x.powi(18));
        }
        assert!((g - 2.0 / 19.0).abs() < 1e-14);
        let wsum: f64 = 2.0 * WGK[..10].iter().sum::<f64>() + WGK[10];
        assert!((wsum - 2.0).abs() < 1e-15);
    }

    #[test]
    fn smooth_integrals() {
        let r = integrate(f64::sin, 0.0, std::f64::consts::PI, &tight()).unwrap();
        assert!((r.value - 2.0).abs() < 1e-12);
        let r = integrate(|x: f64| (-x * x).exp(), -10.0, 10.0, &tight()).unwrap();
        assert!((r.value - std::f64::consts::PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn step_with_breakpoint() {
        let f = |x: f64| if x < 0.3 { 1.0 } else { 2.0 };
        let r = integrate_breaks(f, &[0.0, 0.3, 1.0], &tight()).unwrap();
        assert!((r.value - (0.3 + 1.4)).abs() < 1e-14);
        assert!(r.evaluations == 42);
        // Without the breakpoint it still converges by refinement.
        let r = integrate(f, 0.0, 1.0, &QuadSettings::default()).unwrap();
        assert!((r.value - 1.7).abs() < 1e-6);
    }

    #[test]
    fn integrable_endpoint_singularity() {
        let r = integrate(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, &QuadSettings::default()).unwrap();
        assert!((r.value - 2.0).abs() < 1e-5);
    }

    #[test]
    fn power_law_tail() {
        // ∫_1^inf x^-3 dx = 1/2 with bound ∫_t^inf x^-3 = t^-2/2.
        let r = integrate_to_infinity(
            |x: f64| x.powi(-3),
            &[1.0, 2.0],
            1.0,
            |t| 0.5 / (t * t),
            &tight(),
        )
        .unwrap();
        assert!((r.value - 0.5).abs() < 1e-10, "{}", r.value);
        assert!(r.abs_err < 1e-10);
    }

    #[test]
    fn exponential_tail() {
        let r = integrate_to_infinity(|x: f64| (-x).exp(), &[0.0, 1.0], 1.0, |t| (-t).exp(), &tight()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn non_finite_integrand_is_reported() {
        let e = integrate(|x: f64| 1.0 / (x - 0.5), 0.0, 1.0, &QuadSettings::default()).unwrap_err();
        assert!(matches!(e, QuadError::NonFinite { .. }));
    }

    #[test]
    fn panel_budget_is_enforced() {
        let s = QuadSettings {
            rel_tol: 1e-15,
            abs_tol: 0.0,
            max_panels: 4,
        };
        let e = integrate(|x: f64| (1.0 / (x + 1e-3)).sin(), 0.0, 1.0, &s).unwrap_err();
        assert!(matches!(e, QuadError::NotConverged { .. }));
    }

    #[test]
    fn error_sink_keeps_first_failure() {
        let sink = ErrorSink::new();
        assert_eq!(sink.catch(Ok(2.0)), 2.0);
        assert_eq!(sink.catch(Err("a")), 0.0);
        assert_eq!(sink.catch(Err("b")), 0.0);
        assert!(sink.failed());
        assert_eq!(sink.finish(1.0), Err("a"));
    }
}
