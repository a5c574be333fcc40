//! Point-process samplers and link-distance densities.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Exp1, Poisson, StandardNormal};

use crate::channel::{draw_los, los_ball, los_probability, LinkKind, LosState};
use crate::params::{LosBall, NetworkParams};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y
    }
}

impl std::ops::Add for Point2 {
    type Output = Point2;

    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

/// Circular simulation region centred on the typical receiver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub radius: f64,
}

impl Window {
    pub fn new(radius: f64) -> Option<Window> {
        (radius.is_finite() && radius > 0.0).then_some(Window { radius })
    }

    pub fn for_params(params: &NetworkParams) -> Window {
        Window {
            radius: params.window_radius(),
        }
    }

    pub fn area(&self) -> f64 {
        PI * self.radius * self.radius
    }

    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Point2 {
        let r = self.radius * rng.gen::<f64>().sqrt();
        polar(r, rng.gen::<f64>() * 2.0 * PI)
    }
}

fn polar(r: f64, phi: f64) -> Point2 {
    let (s, c) = phi.sin_cos();
    Point2::new(r * c, r * s)
}

/// Walks a homogeneous PPP outward from the origin: successive squared
/// radii are cumulative Exp(1) arrivals scaled by `1/(πλ)`. Points come out
/// sorted by distance, so realizations in nested windows are nested.
pub struct RadialPpp<'a, R: Rng + ?Sized> {
    rng: &'a mut R,
    scale: f64,
    acc: f64,
    max_r_sq: f64,
}

impl<'a, R: Rng + ?Sized> RadialPpp<'a, R> {
    pub fn new(density: f64, window: Window, rng: &'a mut R) -> Self {
        Self {
            rng,
            scale: 1.0 / (PI * density),
            acc: 0.0,
            max_r_sq: window.radius * window.radius,
        }
    }

    /// Next point as (distance, point), plus access to the generator for
    /// per-point marks drawn in sequence with the positions.
    pub fn next_point(&mut self) -> Option<(f64, Point2, &mut R)> {
        if !self.scale.is_finite() {
            return None;
        }
        let e: f64 = self.rng.sample(Exp1);
        self.acc += e * self.scale;
        if self.acc > self.max_r_sq {
            self.scale = f64::INFINITY;
            return None;
        }
        let r = self.acc.sqrt();
        let phi = self.rng.gen::<f64>() * 2.0 * PI;
        Some((r, polar(r, phi), &mut *self.rng))
    }
}

pub fn sample_ppp<R: Rng + ?Sized>(density: f64, window: Window, rng: &mut R) -> Vec<Point2> {
    let mut out = Vec::new();
    if density <= 0.0 {
        return out;
    }
    let mut walk = RadialPpp::new(density, window, rng);
    while let Some((_, p, _)) = walk.next_point() {
        out.push(p);
    }
    out
}

pub fn gaussian_offset<R: Rng + ?Sized>(sigma: f64, rng: &mut R) -> Point2 {
    let x: f64 = rng.sample(StandardNormal);
    let y: f64 = rng.sample(StandardNormal);
    Point2::new(sigma * x, sigma * y)
}

pub fn sample_thomas_cluster<R: Rng + ?Sized>(center: Point2, sigma_d: f64, count: usize, rng: &mut R) -> Vec<Point2> {
    (0..count).map(|_| center + gaussian_offset(sigma_d, rng)).collect()
}

/// Poisson(mean) conditioned on being strictly below `cap`, by rejection.
pub fn sample_truncated_poisson<R: Rng + ?Sized>(mean: f64, cap: u32, rng: &mut R) -> u32 {
    if mean <= 0.0 || cap <= 1 {
        return 0;
    }
    let dist = Poisson::new(mean).expect("positive mean");
    loop {
        let k: f64 = dist.sample(rng);
        if k < f64::from(cap) {
            return k as u32;
        }
    }
}

/// A point with its LOS state relative to the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarkedPoint {
    pub position: Point2,
    pub distance: f64,
    pub los: LosState,
}

/// Uplink cellular interferers seen by a receiver at the origin: BS
/// locations at density `λ_B`, each marked LOS/NLOS by the cellular ball and
/// retained with probability `Q(t^α)` of its mark. With `retain = false`
/// every marked point is kept.
pub fn sample_marked_bs_field<R: Rng + ?Sized>(
    params: &NetworkParams,
    window: Window,
    retain: bool,
    rng: &mut R,
) -> Vec<MarkedPoint> {
    let mut out = Vec::new();
    let ball = params.los_ball_c;
    let mut walk = RadialPpp::new(params.lambda_b, window, rng);
    while let Some((t, position, rng)) = walk.next_point() {
        let los = draw_los(t, &ball, rng);
        let keep: f64 = rng.gen();
        if retain {
            let alpha = crate::channel::exponent(los, LinkKind::Cellular, params);
            if keep >= q_function(t.powf(alpha), params) {
                continue;
            }
        }
        out.push(MarkedPoint {
            position,
            distance: t,
            los,
        });
    }
    out
}

pub fn sample_uplink_interferers<R: Rng + ?Sized>(params: &NetworkParams, window: Window, rng: &mut R) -> Vec<MarkedPoint> {
    sample_marked_bs_field(params, window, true, rng)
}

/// Active transmitters of one cluster. Offsets are relative to the centre.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterRealization {
    pub center: Point2,
    pub offsets: Vec<Point2>,
    pub modes: Vec<LinkKind>,
}

impl ClusterRealization {
    pub fn d2d_transmitters(&self) -> impl Iterator<Item = Point2> + '_ {
        self.offsets
            .iter()
            .zip(&self.modes)
            .filter(|(_, m)| **m == LinkKind::D2d)
            .map(move |(o, _)| self.center + *o)
    }
}

/// Transmitters of a cluster: count ~ Poisson(mean) below `cap`, each
/// independently in D2D mode with probability `p_d2d`.
pub fn sample_cluster<R: Rng + ?Sized>(
    center: Point2,
    mean: f64,
    cap: u32,
    sigma_d: f64,
    p_d2d: f64,
    rng: &mut R,
) -> ClusterRealization {
    let k = sample_truncated_poisson(mean, cap, rng) as usize;
    let mut offsets = Vec::with_capacity(k);
    let mut modes = Vec::with_capacity(k);
    for _ in 0..k {
        offsets.push(gaussian_offset(sigma_d, rng));
        modes.push(if rng.gen::<f64>() < p_d2d {
            LinkKind::D2d
        } else {
            LinkKind::Cellular
        });
    }
    ClusterRealization { center, offsets, modes }
}

pub fn sample_cluster_field<R: Rng + ?Sized>(
    params: &NetworkParams,
    window: Window,
    p_d2d: f64,
    rng: &mut R,
) -> Vec<ClusterRealization> {
    let mut out = Vec::new();
    let cap = params.n_total / 2;
    let sigma = params.sigma_d();
    let mut walk = RadialPpp::new(params.lambda_c, window, rng);
    while let Some((_, center, rng)) = walk.next_point() {
        out.push(sample_cluster(center, params.n_bar, cap, sigma, p_d2d, rng));
    }
    out
}

/// `e^{-x} I0(x)` for `x >= 0`.
pub fn bessel_i0_scaled(x: f64) -> f64 {
    let x = x.abs();
    if x <= 20.0 {
        // Power series; all terms positive, so no cancellation.
        let q = 0.25 * x * x;
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 1.0;
        while term > 1e-17 * sum {
            term *= q / (k * k);
            sum += term;
            k += 1.0;
        }
        sum * (-x).exp()
    } else {
        // Asymptotic expansion; at x > 20 the smallest term is far below
        // machine precision.
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 1.0;
        loop {
            let next = term * (2.0 * k - 1.0) * (2.0 * k - 1.0) / (8.0 * k * x);
            if next < 1e-17 * sum || next > term {
                break;
            }
            term = next;
            sum += term;
            k += 1.0;
        }
        sum / (2.0 * PI * x).sqrt()
    }
}

/// Density at `a` of the distance from the origin to a point displaced by an
/// isotropic Gaussian (per-axis variance `sigma_sq`) from a point at
/// distance `b`.
pub fn rice_pdf(a: f64, b: f64, sigma_sq: f64) -> f64 {
    if a <= 0.0 {
        return 0.0;
    }
    let d = a - b;
    a / sigma_sq * (-d * d / (2.0 * sigma_sq)).exp() * bessel_i0_scaled(a * b / sigma_sq)
}

/// Rayleigh density of the distance of a 2-D Gaussian point with per-axis
/// variance `sigma_sq`.
pub fn rayleigh_pdf(a: f64, sigma_sq: f64) -> f64 {
    if a <= 0.0 {
        return 0.0;
    }
    a / sigma_sq * (-a * a / (2.0 * sigma_sq)).exp()
}

/// Range outside of which [`rice_pdf`] in `a` is negligible.
pub fn rice_support(b: f64, sigma: f64) -> (f64, f64) {
    ((b - 13.0 * sigma).max(0.0), b + 13.0 * sigma)
}

/// `ψ_s(r) = ∫_0^r x p_s(x) dx` under the LOS ball.
pub fn psi(state: LosState, r: f64, ball: &LosBall) -> f64 {
    if r.is_infinite() {
        return match state {
            LosState::Los => 0.5 * ball.p_los * ball.radius * ball.radius,
            LosState::Nlos => f64::INFINITY,
        };
    }
    let inside = r.min(ball.radius);
    match state {
        LosState::Los => 0.5 * ball.p_los * inside * inside,
        LosState::Nlos => 0.5 * (1.0 - ball.p_los) * inside * inside + 0.5 * (r * r - ball.radius * ball.radius).max(0.0),
    }
}

/// Probability that the best cellular path gain seen by a UE is at least
/// `1/y`, i.e. that some BS has path loss `≤ y`.
pub fn q_function(y: f64, params: &NetworkParams) -> f64 {
    if y <= 0.0 {
        return 0.0;
    }
    let ball = &params.los_ball_c;
    let s = psi(LosState::Los, y.powf(1.0 / params.alpha.los_cellular), ball)
        + psi(LosState::Nlos, y.powf(1.0 / params.alpha.nlos_cellular), ball);
    -(-2.0 * PI * params.lambda_b * s).exp_m1()
}

/// Probability that at least one type-`s` BS exists.
pub fn coverage_mass(state: LosState, params: &NetworkParams) -> f64 {
    let ball = &params.los_ball_c;
    -(-2.0 * PI * params.lambda_b * psi(state, f64::INFINITY, ball)).exp_m1()
}

/// Density of the distance to the nearest type-`s` BS, conditioned on one
/// existing.
pub fn nearest_bs_pdf(r: f64, state: LosState, params: &NetworkParams) -> f64 {
    let mass = coverage_mass(state, params);
    if mass == 0.0 || r < 0.0 {
        return 0.0;
    }
    unconditioned_nearest_bs_density(r, state, params) / mass
}

/// `2πλ r p_s(r) exp(-2πλ ψ_s(r))`.
pub fn unconditioned_nearest_bs_density(r: f64, state: LosState, params: &NetworkParams) -> f64 {
    let ball = &params.los_ball_c;
    let lam = 2.0 * PI * params.lambda_b;
    lam * r * los_probability(state, r, ball) * (-lam * psi(state, r, ball)).exp()
}

/// Intensity at distance `t` of the uplink interferer field of type `s`.
pub fn uplink_intensity(t: f64, state: LosState, params: &NetworkParams) -> f64 {
    let ball = los_ball(LinkKind::Cellular, params);
    let alpha = crate::channel::exponent(state, LinkKind::Cellular, params);
    params.lambda_b * los_probability(state, t, &ball) * q_function(t.powf(alpha), params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::default_params;
    use crate::quadrature::{integrate_breaks, integrate_to_infinity, QuadSettings};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tight() -> QuadSettings {
        QuadSettings {
            rel_tol: 1e-11,
            abs_tol: 1e-14,
            max_panels: 2000,
        }
    }

    #[test]
    fn scaled_bessel_matches_reference_values() {
        // Reference values from an independent special-function library.
        let cases = [
            (0.0, 1.0),
            (0.5, 0.645_035_270_449_15),
            (3.75, 0.214_457_051_230_048_7),
            (10.0, 0.127_833_337_163_428_6),
            (19.9, 0.090_008_588_864_389_59),
            (20.1, 0.089_553_763_620_613_44),
            (50.0, 0.056_561_626_647_454_184),
            (1e4, 0.003_989_472_674_604_731_4),
        ];
        for (x, want) in cases {
            let got = bessel_i0_scaled(x);
            assert!((got - want).abs() < 1e-13 * want, "x={x}: {got} vs {want}");
        }
    }

    #[test]
    fn rice_reduces_to_rayleigh() {
        let v = rice_pdf(5.0, 0.0, 25.0);
        assert!((v - 0.2 * (-0.5f64).exp()).abs() < 1e-15);
        assert!((v - 0.121_306_131_942_526_68).abs() < 1e-12);
    }

    #[test]
    fn rice_large_arguments_stay_finite() {
        let v = rice_pdf(500.0, 500.0, 25.0);
        // Log-domain evaluation of the same density.
        let log = 500f64.ln() - 25f64.ln() + bessel_i0_scaled(1e4).ln();
        assert!(v.is_finite() && v > 0.0);
        assert!((v - log.exp()).abs() < 1e-14);
        assert!((v - 0.079_789_453_492_094_63).abs() < 1e-12);
        assert!((rice_pdf(7.0, 5.0, 25.0) - 0.099_011_155_501_875_8).abs() < 1e-12);
    }

    #[test]
    fn rice_normalisation() {
        for b in [0.0, 5.0, 50.0, 500.0] {
            let (lo, hi) = rice_support(b, 5.0);
            let pts = [lo, b.max(lo), hi];
            let r = integrate_breaks(|a| rice_pdf(a, b, 25.0), &pts, &tight()).unwrap();
            assert!((r.value - 1.0).abs() < 1e-8, "b={b}: {}", r.value);
        }
    }

    #[test]
    fn los_coverage_mass_closed_form() {
        let p = default_params();
        let b = coverage_mass(LosState::Los, &p);
        assert!((b - (1.0 - (-PI / 10.0).exp())).abs() < 1e-15);
        assert!((b - 0.269_597).abs() < 1e-6);
        assert_eq!(coverage_mass(LosState::Nlos, &p), 1.0);
    }

    #[test]
    fn nearest_bs_pdfs_are_normalised() {
        for p_l in [1.0, 0.5, 0.1] {
            let mut p = default_params();
            p.los_ball_c.p_los = p_l;
            let los = integrate_breaks(|r| nearest_bs_pdf(r, LosState::Los, &p), &[0.0, 100.0], &tight()).unwrap();
            assert!((los.value - 1.0).abs() < 1e-8);
            assert_eq!(nearest_bs_pdf(100.5, LosState::Los, &p), 0.0);
            let lam = 2.0 * PI * p.lambda_b;
            let nlos = integrate_to_infinity(
                |r| nearest_bs_pdf(r, LosState::Nlos, &p),
                &[0.0, 100.0],
                100.0,
                |t| (-lam * psi(LosState::Nlos, t, &p.los_ball_c)).exp(),
                &tight(),
            )
            .unwrap();
            assert!((nlos.value - 1.0).abs() < 1e-8, "{}", nlos.value);
        }
    }

    #[test]
    fn q_function_limits() {
        let p = default_params();
        assert_eq!(q_function(0.0, &p), 0.0);
        assert!(q_function(1e-30, &p) < 1e-20);
        assert!(q_function(1e40, &p) > 1.0 - 1e-12);
        let mut prev = 0.0;
        for k in 0..=60 {
            let y = 10f64.powf(-2.0 + 12.0 * f64::from(k) / 60.0);
            let q = q_function(y, &p);
            assert!(q >= prev);
            prev = q;
        }
    }

    #[test]
    fn ppp_counts_and_support() {
        let w = Window::new(1000.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        assert!(sample_ppp(0.0, w, &mut rng).is_empty());
        let n = 10_000;
        let mut total = 0usize;
        for _ in 0..n {
            let pts = sample_ppp(1e-5, w, &mut rng);
            assert!(pts.iter().all(|p| p.norm() <= 1000.0 + 1e-9));
            total += pts.len();
        }
        let mean = total as f64 / n as f64;
        let expect = 10.0 * PI;
        assert!((mean - expect).abs() < 3.0 * (expect / n as f64).sqrt(), "{mean}");
    }

    #[test]
    fn radial_walk_is_nested_across_windows() {
        let small = sample_ppp(1e-4, Window::new(300.0).unwrap(), &mut ChaCha8Rng::seed_from_u64(5));
        let large = sample_ppp(1e-4, Window::new(600.0).unwrap(), &mut ChaCha8Rng::seed_from_u64(5));
        assert!(large.len() >= small.len());
        assert_eq!(&large[..small.len()], &small[..]);
    }

    #[test]
    fn thomas_scatter() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let c = Point2::new(3.0, -4.0);
        let tight = sample_thomas_cluster(c, 1e-9, 100, &mut rng);
        assert!(tight.iter().all(|p| (p.x - c.x).hypot(p.y - c.y) < 1e-6));
        assert!(sample_thomas_cluster(c, 5.0, 0, &mut rng).is_empty());
        let pts = sample_thomas_cluster(c, 5.0, 100_000, &mut rng);
        let msd = pts.iter().map(|p| (p.x - c.x).powi(2) + (p.y - c.y).powi(2)).sum::<f64>() / pts.len() as f64;
        assert!((msd / 50.0 - 1.0).abs() < 0.02, "{msd}");
    }

    #[test]
    fn cluster_field_counts() {
        let mut p = default_params();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut d2d = 0usize;
        let mut clusters = 0usize;
        while clusters < 100_000 {
            let c = sample_cluster(Point2::ORIGIN, p.n_bar, p.n_total / 2, p.sigma_d(), 0.5, &mut rng);
            assert!(c.offsets.len() < 20);
            d2d += c.d2d_transmitters().count();
            clusters += 1;
        }
        let mean = d2d as f64 / clusters as f64;
        assert!((mean / 1.5 - 1.0).abs() < 0.02, "{mean}");

        p.n_bar = 0.0;
        let field = sample_cluster_field(&p, Window::new(500.0).unwrap(), 0.5, &mut rng);
        assert!(!field.is_empty());
        assert!(field.iter().all(|c| c.offsets.is_empty()));
    }

    #[test]
    fn truncated_poisson_never_reaches_cap() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10_000 {
            assert!(sample_truncated_poisson(15.0, 20, &mut rng) < 20);
        }
        assert_eq!(sample_truncated_poisson(0.0, 20, &mut rng), 0);
    }

    #[test]
    fn uplink_field_matches_intensity() {
        let p = default_params();
        let w = Window::new(500.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let edges: Vec<f64> = (0..=10).map(|k| 50.0 * f64::from(k)).collect();
        let mut counts = [[0u32; 2]; 10];
        let n = 10_000;
        for _ in 0..n {
            for pt in sample_uplink_interferers(&p, w, &mut rng) {
                if pt.los == LosState::Los {
                    assert!(pt.distance <= p.los_ball_c.radius);
                }
                let bin = ((pt.distance / 50.0) as usize).min(9);
                counts[bin][usize::from(pt.los == LosState::Nlos)] += 1;
            }
        }
        for (bin, c) in counts.iter().enumerate() {
            for (k, state) in LosState::BOTH.iter().enumerate() {
                let (a, b) = (edges[bin], edges[bin + 1]);
                let pts = if a < 100.0 && b > 100.0 { vec![a, 100.0, b] } else { vec![a, b] };
                let expect = n as f64
                    * integrate_breaks(|t| 2.0 * PI * t * uplink_intensity(t, *state, &p), &pts, &tight())
                        .unwrap()
                        .value;
                let got = f64::from(c[k]);
                assert!(
                    (got - expect).abs() <= 3.0 * expect.sqrt().max(1.0),
                    "bin {bin} {state:?}: {got} vs {expect}"
                );
            }
        }
    }

    proptest! {
        #[test]
        fn psi_is_monotone_and_continuous(r in 0.0f64..400.0, dr in 0.0f64..50.0, p_los in 0.0f64..=1.0) {
            let ball = LosBall { p_los, radius: 100.0 };
            for s in LosState::BOTH {
                prop_assert!(psi(s, r + dr, &ball) >= psi(s, r, &ball));
                prop_assert!((psi(s, r + 1e-9, &ball) - psi(s, r, &ball)).abs() < 1e-6);
            }
            if r >= 100.0 {
                prop_assert_eq!(psi(LosState::Los, r, &ball), psi(LosState::Los, 100.0, &ball));
            }
        }

        #[test]
        fn uplink_intensity_is_thinning(t in 0.0f64..2000.0) {
            let p = default_params();
            let total = uplink_intensity(t, LosState::Los, &p) + uplink_intensity(t, LosState::Nlos, &p);
            prop_assert!(total <= p.lambda_b * (1.0 + 1e-12));
        }

        #[test]
        fn rice_is_nonnegative(a in 0.0f64..1000.0, b in 0.0f64..1000.0, s in 0.1f64..400.0) {
            let v = rice_pdf(a, b, s);
            prop_assert!(v >= 0.0 && v.is_finite());
        }
    }
}
