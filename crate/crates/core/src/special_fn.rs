//! Hermite and Laguerre functions.
//!
//! Both families are evaluated by three-term recurrences on the normalised
//! functions, never on raw polynomials. The Gaussian factor is carried as a
//! separate logarithmic scale and the running values are renormalised
//! whenever they grow large, so `h_ℓ(u)` stays finite for `ℓ` in the tens of
//! thousands and `|u|` up to `10³`, and `𝓛_ℓ(v)` is accurate in the
//! oscillatory region even where `e^{-v/2}` alone would underflow.

use crate::{Error, Result, TAU};
use core::f64::consts::PI;
use num_complex::Complex64;
use serde::Serialize;

const RESCALE_ABOVE: f64 = 1e150;
const RESCALE_FACTOR: f64 = 1e-150;
const LN_RESCALE: f64 = 345.387_763_949_107; // 150 ln 10

/// `π^{-1/4}`, the value of `h₀(0)`.
pub const H0_AT_ZERO: f64 = 0.751_125_544_464_942_5;

/// Runs the normalised Hermite recurrence up to degree `ell_max`, handing
/// each `(ℓ, h_ℓ(u))` to `sink` in increasing order.
fn hermite_run(ell_max: usize, u: f64, mut sink: impl FnMut(usize, f64)) {
    let mut log_scale = -0.5 * u * u;
    let mut prev = 0.0;
    let mut cur = H0_AT_ZERO;
    sink(0, cur * log_scale.exp());
    for ell in 0..ell_max {
        let l = ell as f64;
        let next = u * (2.0 / (l + 1.0)).sqrt() * cur - (l / (l + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE_ABOVE {
            cur *= RESCALE_FACTOR;
            prev *= RESCALE_FACTOR;
            log_scale += LN_RESCALE;
        }
        sink(ell + 1, cur * log_scale.exp());
    }
}

/// The L²-normalised Hermite function `h_ℓ(u)`.
pub fn hermite_fn(ell: usize, u: f64) -> f64 {
    let mut out = 0.0;
    hermite_run(ell, u, |l, v| {
        if l == ell {
            out = v;
        }
    });
    out
}

/// `h_0(u), …, h_{ell_max}(u)`.
pub fn hermite_all(ell_max: usize, u: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(ell_max + 1);
    hermite_run(ell_max, u, |_, v| out.push(v));
    out
}

/// `(h_ℓ, h_ℓ′, h_ℓ″)` at `u`.
///
/// Derivatives come from the ladder relations
/// `h_ℓ′ = √(ℓ/2) h_{ℓ-1} − √((ℓ+1)/2) h_{ℓ+1}` applied once and twice, so the
/// second derivative does not presuppose the oscillator equation.
pub fn hermite_with_derivatives(ell: usize, u: f64) -> (f64, f64, f64) {
    let mut window = [0.0f64; 5];
    hermite_run(ell + 2, u, |l, v| {
        if l + 2 >= ell {
            window[l + 2 - ell] = v;
        }
    });
    let [hm2, hm1, h, hp1, hp2] = window;
    let l = ell as f64;
    let d1 = (l / 2.0).sqrt() * hm1 - ((l + 1.0) / 2.0).sqrt() * hp1;
    let d2 = 0.5 * (l * (l - 1.0)).max(0.0).sqrt() * hm2 - (l + 0.5) * h
        + 0.5 * ((l + 1.0) * (l + 2.0)).sqrt() * hp2;
    (h, d1, d2)
}

/// Rescaled Hermite function `h_{ℓ,λ}(u) = (2π|λ|)^{1/4} h_ℓ(√(2π|λ|) u)`,
/// an eigenfunction of `−d²/du² + (2πλu)²` with eigenvalue `2π|λ|(2ℓ+1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RescaledHermite {
    ell: usize,
    sqrt_scale: f64,
    amplitude: f64,
    cutoff: f64,
}

impl RescaledHermite {
    pub fn new(ell: usize, lambda: i64) -> Result<Self> {
        if lambda == 0 {
            return Err(Error::ZeroLambda);
        }
        let scale = TAU * lambda.unsigned_abs() as f64;
        Ok(Self {
            ell,
            sqrt_scale: scale.sqrt(),
            amplitude: scale.powf(0.25),
            cutoff: hermite_cutoff(ell),
        })
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    /// `√(2π|λ|)`, the factor mapping `u` to the Hermite argument.
    pub fn sqrt_scale(&self) -> f64 {
        self.sqrt_scale
    }

    pub fn value(&self, u: f64) -> f64 {
        let x = self.sqrt_scale * u;
        if x.abs() > self.cutoff {
            return 0.0;
        }
        self.amplitude * hermite_fn(self.ell, x)
    }

    /// Value with first and second `u`-derivatives.
    pub fn with_derivatives(&self, u: f64) -> (f64, f64, f64) {
        let x = self.sqrt_scale * u;
        if x.abs() > self.cutoff {
            return (0.0, 0.0, 0.0);
        }
        let (h, d1, d2) = hermite_with_derivatives(self.ell, x);
        let s = self.sqrt_scale;
        (self.amplitude * h, self.amplitude * s * d1, self.amplitude * s * s * d2)
    }

    /// Half-width in `u` outside of which `|h_{ℓ,λ}|` is below `tol`.
    pub fn support_radius(&self, tol: f64) -> f64 {
        hermite_support(self.ell, tol) / self.sqrt_scale
    }
}

/// Argument beyond which the rescaled functions are returned as exactly zero.
/// The value sits 40 units past the turning point `√(2ℓ+1)`.
fn hermite_cutoff(ell: usize) -> f64 {
    40.0 + ((2 * ell + 1) as f64).sqrt()
}

/// Half-width in the Hermite argument outside of which `|h_ℓ| < tol`.
///
/// Past the turning point the envelope decays at least like a Gaussian in the
/// distance to it, so the radius is the turning point plus the Gaussian
/// quantile of `tol`, with a fixed margin.
pub fn hermite_support(ell: usize, tol: f64) -> f64 {
    let tol = tol.clamp(1e-300, 0.5);
    let gaussian = (2.0 * (1.0 / tol).ln()).sqrt();
    ((2 * ell + 1) as f64).sqrt() + gaussian.max(6.0) + 2.0
}

/// `h_{ℓ,λ}(u)`; rejects `λ = 0`.
pub fn hermite_rescaled(ell: usize, lambda: i64, u: f64) -> Result<f64> {
    Ok(RescaledHermite::new(ell, lambda)?.value(u))
}

/// Runs the Laguerre-function recurrence up to degree `ell_max`.
fn laguerre_run(ell_max: usize, v: f64, mut sink: impl FnMut(usize, f64)) {
    let mut log_scale = -0.5 * v;
    let mut prev = 1.0;
    sink(0, prev * log_scale.exp());
    if ell_max == 0 {
        return;
    }
    let mut cur = 1.0 - v;
    sink(1, cur * log_scale.exp());
    for ell in 1..ell_max {
        let l = ell as f64;
        let next = ((2.0 * l + 1.0 - v) * cur - l * prev) / (l + 1.0);
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE_ABOVE {
            cur *= RESCALE_FACTOR;
            prev *= RESCALE_FACTOR;
            log_scale += LN_RESCALE;
        }
        sink(ell + 1, cur * log_scale.exp());
    }
}

fn check_laguerre_arg(v: f64) -> Result<()> {
    if v >= 0.0 {
        Ok(())
    } else {
        Err(Error::NegativeArgument(v))
    }
}

/// Laguerre function of type 0, `𝓛_ℓ(v) = L_ℓ(v) e^{-v/2}`, for `v ≥ 0`.
pub fn laguerre_fn(ell: usize, v: f64) -> Result<f64> {
    check_laguerre_arg(v)?;
    Ok(laguerre_unchecked(ell, v))
}

pub(crate) fn laguerre_unchecked(ell: usize, v: f64) -> f64 {
    let mut out = 0.0;
    laguerre_run(ell, v, |l, x| {
        if l == ell {
            out = x;
        }
    });
    out
}

/// `𝓛_0(v), …, 𝓛_{ell_max}(v)`.
pub fn laguerre_all(ell_max: usize, v: f64) -> Result<Vec<f64>> {
    check_laguerre_arg(v)?;
    let mut out = Vec::with_capacity(ell_max + 1);
    laguerre_run(ell_max, v, |_, x| out.push(x));
    Ok(out)
}

/// Modulus of
/// `𝓛_ℓ((x²+y²)/2) − ∫ e^{ixξ} h_ℓ(ξ+y/2) h_ℓ(ξ−y/2) dξ`,
/// with the integral taken by a uniform trapezoid rule with `quad_points`
/// nodes on `[−2(6+√(2ℓ+1)), 2(6+√(2ℓ+1))]`.
pub fn hermite_laguerre_residual(ell: usize, x: f64, y: f64, quad_points: usize) -> f64 {
    let half = 2.0 * (6.0 + ((2 * ell + 1) as f64).sqrt());
    let n = quad_points.max(2);
    let step = 2.0 * half / (n - 1) as f64;
    let mut integral = Complex64::new(0.0, 0.0);
    for i in 0..n {
        let xi = -half + step * i as f64;
        let weight = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
        let amp = hermite_fn(ell, xi + 0.5 * y) * hermite_fn(ell, xi - 0.5 * y);
        integral += Complex64::from_polar(weight * amp, x * xi);
    }
    integral *= step;
    let lhs = laguerre_unchecked(ell, 0.5 * (x * x + y * y));
    (Complex64::new(lhs, 0.0) - integral).norm()
}

/// Empirical constant in `|𝓛_ℓ(v)| ≤ C (2ℓ+1)/v`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LaguerreBoundFit {
    /// `max |𝓛_ℓ(v)| v / (2ℓ+1)` over the grid.
    pub constant: f64,
    pub argmax_ell: usize,
    pub argmax_v: f64,
    /// `max |𝓛_ℓ(v)|` over the grid, which must not exceed 1.
    pub sup_norm: f64,
}

/// Logarithmic grid of `points` values in `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    let denom = (points.max(2) - 1) as f64;
    (0..points.max(2))
        .map(|i| (a + (b - a) * i as f64 / denom).exp())
        .collect()
}

/// Fits the Laguerre decay constant over `ℓ ≤ ell_max` and the given `v`
/// grid (all entries must be positive).
pub fn laguerre_bound_constant(ell_max: usize, v_grid: &[f64]) -> Result<LaguerreBoundFit> {
    let mut fit = LaguerreBoundFit {
        constant: 0.0,
        argmax_ell: 0,
        argmax_v: 0.0,
        sup_norm: 0.0,
    };
    for &v in v_grid {
        if v <= 0.0 {
            return Err(Error::InvalidInput(format!("v grid entry {v} is not positive")));
        }
        for (ell, x) in laguerre_all(ell_max, v)?.into_iter().enumerate() {
            let c = x.abs() * v / (2 * ell + 1) as f64;
            fit.sup_norm = fit.sup_norm.max(x.abs());
            if c > fit.constant {
                fit.constant = c;
                fit.argmax_ell = ell;
                fit.argmax_v = v;
            }
        }
    }
    Ok(fit)
}

/// Maximum over `ℓ ≤ ell_max` and the grid of the relative oscillator residual
/// `|−h″ + u²h − (2ℓ+1)h| / (2ℓ+1)`.
pub fn oscillator_residual(ell_max: usize, grid: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for ell in 0..=ell_max {
        let e = (2 * ell + 1) as f64;
        for &u in grid {
            let (h, _, d2) = hermite_with_derivatives(ell, u);
            worst = worst.max((-d2 + u * u * h - e * h).abs() / e);
        }
    }
    worst
}

/// Gram matrix of `h_0, …, h_{ell_max}` by the trapezoid rule with `n` nodes
/// on `[−half_width, half_width]`.
pub fn hermite_gram(ell_max: usize, half_width: f64, n: usize) -> Vec<Vec<f64>> {
    let step = 2.0 * half_width / (n - 1) as f64;
    let mut gram = vec![vec![0.0; ell_max + 1]; ell_max + 1];
    for i in 0..n {
        let u = -half_width + step * i as f64;
        let w = if i == 0 || i == n - 1 { 0.5 * step } else { step };
        let h = hermite_all(ell_max, u);
        for j in 0..=ell_max {
            for k in 0..=j {
                gram[j][k] += w * h[j] * h[k];
            }
        }
    }
    for j in 0..=ell_max {
        for k in 0..j {
            gram[k][j] = gram[j][k];
        }
    }
    gram
}

/// Closed form of the ground state, `h₀(u) = π^{-1/4} e^{-u²/2}`.
pub fn hermite_ground(u: f64) -> f64 {
    PI.powf(-0.25) * (-0.5 * u * u).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Coefficients of the physicists' Hermite polynomial `H_n` built from
    /// `H_{n+1} = 2u H_n − H_n′` in exact integer arithmetic.
    fn hermite_poly(n: usize) -> Vec<i128> {
        let mut h = vec![1i128];
        for _ in 0..n {
            let mut next = vec![0i128; h.len() + 1];
            for (k, &c) in h.iter().enumerate() {
                next[k + 1] += 2 * c;
                if k > 0 {
                    next[k - 1] -= k as i128 * c;
                }
            }
            h = next;
        }
        h
    }

    fn hermite_oracle(n: usize, u: f64) -> f64 {
        let coeffs = hermite_poly(n);
        let poly: f64 = coeffs.iter().rev().fold(0.0, |acc, &c| acc * u + c as f64);
        let fact: f64 = (1..=n).map(|k| k as f64).product();
        let norm = (PI.sqrt() * 2f64.powi(n as i32) * fact).sqrt();
        poly * (-0.5 * u * u).exp() / norm
    }

    fn laguerre_oracle(n: usize, v: f64) -> f64 {
        laguerre_oracle_with_scale(n, v).0
    }

    /// Binomial sum and `e^{−v/2} Σ|terms|`, the scale of its rounding error.
    fn laguerre_oracle_with_scale(n: usize, v: f64) -> (f64, f64) {
        let mut sum = 0.0;
        let mut abs = 0.0;
        let mut binom = 1.0; // C(n, k)
        let mut fact = 1.0;
        for k in 0..=n {
            if k > 0 {
                binom *= (n - k + 1) as f64 / k as f64;
                fact *= k as f64;
            }
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let term = binom * v.powi(k as i32) / fact;
            sum += sign * term;
            abs += term;
        }
        let decay = (-0.5 * v).exp();
        (sum * decay, abs * decay)
    }

    #[test]
    fn rodrigues_polynomial_h5() {
        assert_eq!(hermite_poly(5), vec![0, 120, 0, -160, 0, 32]);
    }

    #[test]
    fn hermite_known_values() {
        assert!((hermite_fn(0, 0.0) - 0.751_125_544_4).abs() < 1e-10);
        assert_eq!(hermite_fn(1, 0.0), 0.0);
        let want = hermite_oracle(5, 1.3);
        assert!((hermite_fn(5, 1.3) - want).abs() < 1e-12 * want.abs().max(1.0));
        assert!((hermite_ground(0.7) - hermite_fn(0, 0.7)).abs() < 1e-15);
    }

    #[test]
    fn hermite_matches_polynomial_oracle() {
        for n in 0..=20 {
            for &u in &[-4.1, -2.2, -0.37, 0.0, 0.5, 1.3, 2.9, 5.5] {
                let want = hermite_oracle(n, u);
                let got = hermite_fn(n, u);
                assert!(
                    (got - want).abs() <= 1e-10 * want.abs().max(1e-3),
                    "n={n} u={u}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn hermite_finite_for_large_degree_and_argument() {
        for &ell in &[0usize, 100, 2_000, 10_000] {
            for &u in &[-1000.0, -141.0, -3.0, 0.0, 10.0, 140.0, 1000.0] {
                let v = hermite_fn(ell, u);
                assert!(v.is_finite(), "ell={ell} u={u}");
                assert!(v.abs() < 1.0);
            }
        }
        // Oscillatory region of a high degree still carries mass.
        let norm: f64 = (0..20_000)
            .map(|i| -150.0 + 300.0 * i as f64 / 20_000.0)
            .map(|u| hermite_fn(5000, u).powi(2) * 300.0 / 20_000.0)
            .sum();
        assert!((norm - 1.0).abs() < 1e-6, "norm {norm}");
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let eps = 1e-4;
        for &ell in &[0usize, 1, 4, 11] {
            for &u in &[-1.7, 0.3, 2.2] {
                let (_, d1, d2) = hermite_with_derivatives(ell, u);
                let fd1 = (hermite_fn(ell, u + eps) - hermite_fn(ell, u - eps)) / (2.0 * eps);
                let fd2 = (hermite_fn(ell, u + eps) - 2.0 * hermite_fn(ell, u)
                    + hermite_fn(ell, u - eps))
                    / (eps * eps);
                assert!((d1 - fd1).abs() < 1e-7, "ell={ell} u={u}");
                assert!((d2 - fd2).abs() < 1e-5, "ell={ell} u={u}");
            }
        }
    }

    #[test]
    fn oscillator_equation_holds() {
        let grid: Vec<f64> = (0..=400).map(|i| -20.0 + 0.1 * i as f64).collect();
        let worst = oscillator_residual(200, &grid);
        assert!(worst < 1e-6, "worst residual {worst}");
    }

    #[test]
    fn hermite_orthonormality() {
        let gram = hermite_gram(15, 15.0, 3001);
        for (j, row) in gram.iter().enumerate() {
            for (k, &g) in row.iter().enumerate() {
                let want = if j == k { 1.0 } else { 0.0 };
                assert!((g - want).abs() < 1e-8, "({j},{k}) = {g}");
            }
        }
    }

    #[test]
    fn rescaled_hermite() {
        assert!((hermite_rescaled(0, 1, 0.0).unwrap() - 2f64.powf(0.25)).abs() < 1e-14);
        let want = hermite_fn(3, (4.0 * PI).sqrt() * 0.25) * (4.0 * PI).powf(0.25);
        assert!((hermite_rescaled(3, 2, 0.25).unwrap() - want).abs() < 1e-14);
        assert_eq!(hermite_rescaled(0, 0, 1.0), Err(Error::ZeroLambda));
        // Negative lambda sees |lambda|.
        assert_eq!(
            hermite_rescaled(2, -3, 0.1).unwrap(),
            hermite_rescaled(2, 3, 0.1).unwrap()
        );
    }

    #[test]
    fn rescaled_hermite_unit_norm() {
        for &(ell, lambda) in &[(0usize, 1i64), (3, 2), (7, -5)] {
            let h = RescaledHermite::new(ell, lambda).unwrap();
            let r = h.support_radius(1e-16);
            let n = 4001;
            let step = 2.0 * r / (n - 1) as f64;
            let norm: f64 = (0..n).map(|i| h.value(-r + step * i as f64).powi(2) * step).sum();
            assert!((norm - 1.0).abs() < 1e-10, "ell={ell} lambda={lambda}: {norm}");
        }
    }

    #[test]
    fn laguerre_known_values() {
        for &v in &[0.0, 1.0, 4.0] {
            assert!((laguerre_fn(0, v).unwrap() - (-0.5 * v).exp()).abs() < 1e-15);
        }
        for ell in [0, 1, 7, 50, 500] {
            assert!((laguerre_fn(ell, 0.0).unwrap() - 1.0).abs() < 1e-12);
        }
        let want = laguerre_oracle(4, 2.5);
        assert!((laguerre_fn(4, 2.5).unwrap() - want).abs() < 1e-14);
        assert_eq!(laguerre_fn(2, -0.1), Err(Error::NegativeArgument(-0.1)));
    }

    #[test]
    fn laguerre_matches_binomial_sum() {
        for n in 0..=20 {
            for &v in &[0.01, 0.3, 1.0, 2.5, 7.0, 15.0, 30.0] {
                let (want, scale) = laguerre_oracle_with_scale(n, v);
                let got = laguerre_fn(n, v).unwrap();
                let tol = 1e-10f64.max(1e-14 * scale);
                assert!((got - want).abs() < tol, "n={n} v={v}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn laguerre_bounds_on_log_grid() {
        let grid = log_grid(1e-3, 1e4, 400);
        let fit = laguerre_bound_constant(500, &grid).unwrap();
        assert!(fit.sup_norm <= 1.0 + 1e-12, "sup {}", fit.sup_norm);
        assert!(fit.constant.is_finite() && fit.constant > 0.0);
        assert!(fit.constant < 10.0, "fitted constant {:?}", fit);
    }

    #[test]
    fn laguerre_scaled_recurrence_in_deep_oscillatory_region() {
        // e^{-v/2} underflows at v = 1500, yet 𝓛_500(1500) is O(10⁻²).
        let x = laguerre_fn(500, 1500.0).unwrap();
        assert!(x.is_finite() && x != 0.0);
        assert!(x.abs() <= 1.0);
    }

    #[test]
    fn hermite_laguerre_connection() {
        assert!(hermite_laguerre_residual(0, 0.0, 0.0, 400) < 1e-10);
        assert!(hermite_laguerre_residual(3, 1.0, 0.5, 400) < 1e-8);
        assert!(hermite_laguerre_residual(1, 0.0, 2.0, 400) < 1e-8);
        assert!(hermite_laguerre_residual(6, -2.3, 1.1, 800) < 1e-8);
    }
}
