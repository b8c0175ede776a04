//! The Heisenberg group `H₁ = ℝ³` with product
//! `(a,b,c)(a′,b′,c′) = (a+a′, b+b′, c+c′+ab′)`, its lattice `Γ = ℤ³`, and the
//! Schrödinger representations `π_λ(a,b,c)h(u) = e^{2πiλ(c+ub)} h(u+a)`.

use crate::special_fn::{laguerre_unchecked, RescaledHermite};
use crate::{Error, Result, TAU};
use core::f64::consts::PI;
use core::ops::Mul;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct GroupElement {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl GroupElement {
    pub const IDENTITY: GroupElement = GroupElement { a: 0.0, b: 0.0, c: 0.0 };

    pub const fn new(a: f64, b: f64, c: f64) -> Self {
        Self { a, b, c }
    }

    pub fn multiply(self, rhs: GroupElement) -> GroupElement {
        GroupElement {
            a: self.a + rhs.a,
            b: self.b + rhs.b,
            c: self.c + rhs.c + self.a * rhs.b,
        }
    }

    pub fn inverse(self) -> GroupElement {
        GroupElement {
            a: -self.a,
            b: -self.b,
            c: -self.c + self.a * self.b,
        }
    }

    /// Largest coordinate difference, for approximate comparisons.
    pub fn max_abs_diff(self, other: GroupElement) -> f64 {
        (self.a - other.a)
            .abs()
            .max((self.b - other.b).abs())
            .max((self.c - other.c).abs())
    }

    pub fn is_integral(self) -> bool {
        self.a.fract() == 0.0 && self.b.fract() == 0.0 && self.c.fract() == 0.0
    }
}

impl Mul for GroupElement {
    type Output = GroupElement;

    fn mul(self, rhs: GroupElement) -> GroupElement {
        self.multiply(rhs)
    }
}

pub fn multiply(x: GroupElement, y: GroupElement) -> GroupElement {
    x.multiply(y)
}

pub fn inverse(x: GroupElement) -> GroupElement {
    x.inverse()
}

/// `x = gamma · rep` with `gamma ∈ Γ` and `rep ∈ [0,1)³`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReducedPoint {
    pub rep: GroupElement,
    pub gamma: GroupElement,
}

impl ReducedPoint {
    pub fn reassemble(&self) -> GroupElement {
        self.gamma * self.rep
    }
}

/// Splits `t` into an integer part and a remainder in `[0, 1)`.
fn split_unit(t: f64) -> (f64, f64) {
    let mut n = t.floor();
    let mut r = t - n;
    if r >= 1.0 {
        n += 1.0;
        r -= 1.0;
    }
    (n, r)
}

/// Reduces `x` modulo left multiplication by `Γ`, choosing the integer `a`
/// part first, then `b`, then `c`.
///
/// Since `(m₁,m₂,m₃)(a′,b′,c′) = (m₁+a′, m₂+b′, m₃+c′+m₁b′)`, the central
/// remainder is taken from `c − m₁b′`.
pub fn reduce_mod_gamma(x: GroupElement) -> ReducedPoint {
    let (m1, a) = split_unit(x.a);
    let (m2, b) = split_unit(x.b);
    let (m3, c) = split_unit(x.c - m1 * b);
    ReducedPoint {
        rep: GroupElement::new(a, b, c),
        gamma: GroupElement::new(m1, m2, m3),
    }
}

/// Uniform grid `start + i·step`, `i < len`, on the real line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UniformGrid {
    pub start: f64,
    pub step: f64,
    pub len: usize,
}

impl UniformGrid {
    /// `len` points spanning `[lo, hi]` inclusive.
    pub fn spanning(lo: f64, hi: f64, len: usize) -> Self {
        assert!(len >= 2, "a grid needs at least two points");
        Self {
            start: lo,
            step: (hi - lo) / (len - 1) as f64,
            len,
        }
    }

    pub fn point(&self, i: usize) -> f64 {
        self.start + self.step * i as f64
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len).map(|i| self.point(i))
    }
}

/// A complex function sampled on a uniform grid of the line.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFn {
    pub grid: UniformGrid,
    pub values: Vec<Complex64>,
}

impl SampledFn {
    pub fn sample(grid: UniformGrid, f: impl Fn(f64) -> Complex64) -> Self {
        let values = grid.points().map(f).collect();
        Self { grid, values }
    }

    /// Trapezoid-rule `L²` norm.
    pub fn l2_norm(&self) -> f64 {
        trapezoid(self.grid.step, self.values.iter().map(|v| v.norm_sqr())).sqrt()
    }

    /// Trapezoid-rule inner product `∫ f ḡ`.
    pub fn inner(&self, other: &SampledFn) -> Complex64 {
        assert_eq!(self.grid, other.grid, "inner product needs a common grid");
        let n = self.values.len();
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, (f, g)) in self.values.iter().zip(&other.values).enumerate() {
            let w = if i == 0 || i + 1 == n { 0.5 } else { 1.0 };
            acc += f * g.conj() * w;
        }
        acc * self.grid.step
    }

    pub fn max_abs_diff(&self, other: &SampledFn) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    /// First derivative by centred differences of order four, with one-sided
    /// fourth-order stencils at the two points nearest each end.
    pub fn derivative(&self) -> SampledFn {
        let f = &self.values;
        let n = f.len();
        assert!(n >= 5, "fourth-order differences need at least five samples");
        let inv = 1.0 / (12.0 * self.grid.step);
        let mut d = vec![Complex64::new(0.0, 0.0); n];
        d[0] = (f[0] * -25.0 + f[1] * 48.0 - f[2] * 36.0 + f[3] * 16.0 - f[4] * 3.0) * inv;
        d[1] = (f[0] * -3.0 - f[1] * 10.0 + f[2] * 18.0 - f[3] * 6.0 + f[4]) * inv;
        for i in 2..n - 2 {
            d[i] = (f[i - 2] - f[i - 1] * 8.0 + f[i + 1] * 8.0 - f[i + 2]) * inv;
        }
        d[n - 2] = (f[n - 1] * 3.0 + f[n - 2] * 10.0 - f[n - 3] * 18.0 + f[n - 4] * 6.0
            - f[n - 5])
            * inv;
        d[n - 1] = (f[n - 1] * 25.0 - f[n - 2] * 48.0 + f[n - 3] * 36.0 - f[n - 4] * 16.0
            + f[n - 5] * 3.0)
            * inv;
        SampledFn {
            grid: self.grid,
            values: d,
        }
    }
}

fn trapezoid(step: f64, values: impl ExactSizeIterator<Item = f64>) -> f64 {
    let n = values.len();
    values
        .enumerate()
        .map(|(i, v)| if i == 0 || i + 1 == n { 0.5 * v } else { v })
        .sum::<f64>()
        * step
}

fn check_lambda(lambda: i64) -> Result<()> {
    if lambda == 0 {
        Err(Error::ZeroLambda)
    } else {
        Ok(())
    }
}

/// `(π_λ(g)h)(u)` for any `h`; no validation of `λ`.
pub fn schrodinger_at(
    lambda: i64,
    g: GroupElement,
    h: &dyn Fn(f64) -> Complex64,
    u: f64,
) -> Complex64 {
    let phase = TAU * lambda as f64 * (g.c + u * g.b);
    Complex64::from_polar(1.0, phase) * h(u + g.a)
}

/// Samples `π_λ(g)h` on `grid`.
pub fn schrodinger_apply(
    lambda: i64,
    g: GroupElement,
    h: &dyn Fn(f64) -> Complex64,
    grid: UniformGrid,
) -> Result<SampledFn> {
    check_lambda(lambda)?;
    Ok(SampledFn::sample(grid, |u| schrodinger_at(lambda, g, h, u)))
}

/// `(h_{ℓ,λ}, π_λ(g) h_{ℓ,λ})`, in closed form:
/// `e^{−2πiλc} e^{πiλab} 𝓛_ℓ(π|λ|(a²+b²))`.
pub fn matrix_coefficient(lambda: i64, ell: usize, g: GroupElement) -> Result<Complex64> {
    check_lambda(lambda)?;
    let l = lambda as f64;
    let phase = -TAU * l * g.c + PI * l * g.b * g.a;
    let radial = laguerre_unchecked(ell, PI * l.abs() * (g.a * g.a + g.b * g.b));
    Ok(Complex64::from_polar(radial, phase))
}

/// `(h, π_λ(g) h)` for a real window `h` by the trapezoid rule on `grid`.
pub fn matrix_coefficient_quadrature(
    lambda: i64,
    h: &dyn Fn(f64) -> f64,
    g: GroupElement,
    grid: UniformGrid,
) -> Result<Complex64> {
    check_lambda(lambda)?;
    let n = grid.len;
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, u) in grid.points().enumerate() {
        let w = if i == 0 || i + 1 == n { 0.5 } else { 1.0 };
        let phase = -TAU * lambda as f64 * (g.c + u * g.b);
        acc += Complex64::from_polar(w * h(u) * h(u + g.a), phase);
    }
    Ok(acc * grid.step)
}

/// Generators of the Lie algebra: `A = ∂_a`, `B = ∂_b + a∂_c`, `S = ∂_c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Generator {
    A,
    B,
    S,
}

/// `π_λ(X)h` for a sampled `h`: `h′` (finite differences), `2πiλu h`, or
/// `2πiλ h`.
pub fn infinitesimal_action(lambda: i64, which: Generator, h: &SampledFn) -> Result<SampledFn> {
    check_lambda(lambda)?;
    let i2pl = Complex64::new(0.0, TAU * lambda as f64);
    Ok(match which {
        Generator::A => h.derivative(),
        Generator::B => SampledFn {
            grid: h.grid,
            values: h
                .grid
                .points()
                .zip(&h.values)
                .map(|(u, v)| i2pl * u * v)
                .collect(),
        },
        Generator::S => SampledFn {
            grid: h.grid,
            values: h.values.iter().map(|v| i2pl * v).collect(),
        },
    })
}

/// `π_λ(X) h_{ℓ,λ}` with the derivative taken from the Hermite ladder
/// relations rather than finite differences.
pub fn infinitesimal_action_hermite(
    lambda: i64,
    which: Generator,
    ell: usize,
    grid: UniformGrid,
) -> Result<SampledFn> {
    let h = RescaledHermite::new(ell, lambda)?;
    let i2pl = Complex64::new(0.0, TAU * lambda as f64);
    Ok(SampledFn::sample(grid, |u| match which {
        Generator::A => Complex64::new(h.with_derivatives(u).1, 0.0),
        Generator::B => i2pl * u * h.value(u),
        Generator::S => i2pl * h.value(u),
    }))
}

/// `π_λ(L)h_{ℓ,λ}(u) = −h″ + (2πλu)² h`, derivatives from the ladder relations.
pub fn sublaplacian_on_hermite(lambda: i64, ell: usize, u: f64) -> Result<f64> {
    let h = RescaledHermite::new(ell, lambda)?;
    let (v, _, d2) = h.with_derivatives(u);
    let k = TAU * lambda as f64 * u;
    Ok(-d2 + k * k * v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_element(rng: &mut ChaCha8Rng, scale: f64) -> GroupElement {
        GroupElement::new(
            rng.random_range(-scale..scale),
            rng.random_range(-scale..scale),
            rng.random_range(-scale..scale),
        )
    }

    #[test]
    fn product_examples() {
        let x = GroupElement::new(1.0, 2.0, 3.0);
        let y = GroupElement::new(4.0, 5.0, 6.0);
        assert_eq!(x * y, GroupElement::new(5.0, 7.0, 14.0));
        assert_eq!(x * GroupElement::IDENTITY, x);
        let (a, b, c) = (0.3, -1.7, 2.2);
        let inv_formula = GroupElement::new(-a, -b, -c + a * b);
        assert!((GroupElement::new(a, b, c) * inv_formula).max_abs_diff(GroupElement::IDENTITY) < 1e-15);
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(inverse(GroupElement::IDENTITY), GroupElement::IDENTITY);
        assert_eq!(inverse(GroupElement::new(1.0, 1.0, 0.0)), GroupElement::new(-1.0, -1.0, 1.0));
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let x = random_element(&mut rng, 10.0);
            assert!((x.inverse() * x).max_abs_diff(GroupElement::IDENTITY) < 1e-12);
            assert!((x * x.inverse()).max_abs_diff(GroupElement::IDENTITY) < 1e-12);
        }
    }

    #[test]
    fn associativity_on_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let (x, y, z) = (
                random_element(&mut rng, 5.0),
                random_element(&mut rng, 5.0),
                random_element(&mut rng, 5.0),
            );
            assert!(((x * y) * z).max_abs_diff(x * (y * z)) < 1e-12);
        }
    }

    #[test]
    fn reduction_examples() {
        let r = reduce_mod_gamma(GroupElement::new(0.3, 0.7, 0.2));
        assert_eq!(r.gamma, GroupElement::IDENTITY);
        assert_eq!(r.rep, GroupElement::new(0.3, 0.7, 0.2));

        let r = reduce_mod_gamma(GroupElement::new(1.3, 0.7, 0.2));
        assert!(r.rep.max_abs_diff(GroupElement::new(0.3, 0.7, 0.5)) < 1e-12);
        // (1,0,-1)(0.3,0.7,0.5) = (1.3, 0.7, 0.2)
        assert_eq!(r.gamma, GroupElement::new(1.0, 0.0, -1.0));

        let r = reduce_mod_gamma(GroupElement::new(0.0, 0.0, 2.25));
        assert_eq!(r.gamma, GroupElement::new(0.0, 0.0, 2.0));
        assert_eq!(r.rep, GroupElement::new(0.0, 0.0, 0.25));
    }

    proptest! {
        #[test]
        fn reduction_reassembles(a in -50.0f64..50.0, b in -50.0f64..50.0, c in -50.0f64..50.0) {
            let x = GroupElement::new(a, b, c);
            let r = reduce_mod_gamma(x);
            prop_assert!(r.gamma.is_integral());
            for t in [r.rep.a, r.rep.b, r.rep.c] {
                prop_assert!((0.0..1.0).contains(&t));
            }
            prop_assert!(r.reassemble().max_abs_diff(x) < 1e-12 * (1.0 + a.abs() * b.abs()));
        }
    }

    fn gaussian(u: f64) -> Complex64 {
        Complex64::new((-0.5 * u * u).exp() * PI.powf(-0.25), 0.0)
    }

    fn wide_grid() -> UniformGrid {
        UniformGrid::spanning(-12.0, 12.0, 4801)
    }

    #[test]
    fn schrodinger_identity_and_centre() {
        let grid = wide_grid();
        let out = schrodinger_apply(3, GroupElement::IDENTITY, &gaussian, grid).unwrap();
        let orig = SampledFn::sample(grid, gaussian);
        assert_eq!(out, orig);

        let c = 0.137;
        let out = schrodinger_apply(3, GroupElement::new(0.0, 0.0, c), &gaussian, grid).unwrap();
        let phase = Complex64::from_polar(1.0, TAU * 3.0 * c);
        let want = SampledFn::sample(grid, |u| phase * gaussian(u));
        assert!(out.max_abs_diff(&want) < 1e-15);
        assert_eq!(
            schrodinger_apply(0, GroupElement::IDENTITY, &gaussian, grid),
            Err(Error::ZeroLambda)
        );
    }

    #[test]
    fn schrodinger_is_a_homomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let grid = UniformGrid::spanning(-4.0, 4.0, 161);
        for lambda in [1i64, -2, 5] {
            for _ in 0..20 {
                let x = random_element(&mut rng, 2.0);
                let y = random_element(&mut rng, 2.0);
                let inner = |u: f64| schrodinger_at(lambda, y, &gaussian, u);
                let two_step = schrodinger_apply(lambda, x, &inner, grid).unwrap();
                let one_step = schrodinger_apply(lambda, x * y, &gaussian, grid).unwrap();
                assert!(two_step.max_abs_diff(&one_step) < 1e-10);
            }
        }
    }

    #[test]
    fn schrodinger_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let grid = wide_grid();
        let h1 = |u: f64| Complex64::new(crate::special_fn::hermite_fn(3, u), 0.0);
        let norm = SampledFn::sample(grid, h1).l2_norm();
        for _ in 0..10 {
            let g = random_element(&mut rng, 3.0);
            let out = schrodinger_apply(2, g, &h1, grid).unwrap();
            assert!((out.l2_norm() - norm).abs() < 1e-8);
        }
    }

    #[test]
    fn matrix_coefficient_closed_form() {
        assert!((matrix_coefficient(4, 3, GroupElement::IDENTITY).unwrap() - 1.0).norm() < 1e-15);
        let a = 0.4;
        let m = matrix_coefficient(1, 0, GroupElement::new(a, 0.0, 0.0)).unwrap();
        assert!((m - (-PI * a * a / 2.0).exp()).norm() < 1e-15);
        assert_eq!(matrix_coefficient(0, 0, GroupElement::IDENTITY), Err(Error::ZeroLambda));
    }

    #[test]
    fn matrix_coefficient_matches_quadrature() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for &(lambda, ell) in &[(1i64, 0usize), (2, 3), (-3, 1), (5, 4)] {
            let h = RescaledHermite::new(ell, lambda).unwrap();
            let r = h.support_radius(1e-16) + 1.0;
            let grid = UniformGrid::spanning(-r - 1.0, r + 1.0, 6001);
            for _ in 0..5 {
                let g = random_element(&mut rng, 0.6);
                let closed = matrix_coefficient(lambda, ell, g).unwrap();
                let quad =
                    matrix_coefficient_quadrature(lambda, &|u| h.value(u), g, grid).unwrap();
                assert!(
                    (closed - quad).norm() < 1e-8 * closed.norm().max(1e-3),
                    "lambda={lambda} ell={ell} g={g:?}: {closed} vs {quad}"
                );
            }
        }
    }

    #[test]
    fn infinitesimal_generators() {
        let grid = UniformGrid::spanning(-8.0, 8.0, 16001);
        let h0 = SampledFn::sample(grid, gaussian);
        let s = infinitesimal_action(2, Generator::S, &h0).unwrap();
        for (x, y) in s.values.iter().zip(&h0.values) {
            assert!((x - Complex64::new(0.0, TAU * 2.0) * y).norm() < 1e-15);
        }
        let a = infinitesimal_action(2, Generator::A, &h0).unwrap();
        let want = SampledFn::sample(grid, |u| -u * gaussian(u));
        assert!(a.max_abs_diff(&want) < 1e-10);
        let exact = infinitesimal_action_hermite(2, Generator::A, 0, grid).unwrap();
        let fd = infinitesimal_action(
            2,
            Generator::A,
            &SampledFn::sample(grid, |u| Complex64::new(RescaledHermite::new(0, 2).unwrap().value(u), 0.0)),
        )
        .unwrap();
        assert!(exact.max_abs_diff(&fd) < 1e-8);
    }

    #[test]
    fn canonical_commutation_relation() {
        let grid = UniformGrid::spanning(-8.0, 8.0, 16001);
        for lambda in [1i64, -3] {
            let h = SampledFn::sample(grid, |u| gaussian(u) * Complex64::new(1.0, 0.3 * u));
            let ab = infinitesimal_action(
                lambda,
                Generator::A,
                &infinitesimal_action(lambda, Generator::B, &h).unwrap(),
            )
            .unwrap();
            let ba = infinitesimal_action(
                lambda,
                Generator::B,
                &infinitesimal_action(lambda, Generator::A, &h).unwrap(),
            )
            .unwrap();
            let s = infinitesimal_action(lambda, Generator::S, &h).unwrap();
            for i in 0..grid.len {
                let comm = ab.values[i] - ba.values[i];
                assert!((comm - s.values[i]).norm() < 1e-8, "i={i}");
            }
        }
    }

    #[test]
    fn rescaled_oscillator_eigen_equation() {
        for lambda in [-8i64, -3, 1, 2, 5, 8] {
            for ell in 0..=30usize {
                let h = RescaledHermite::new(ell, lambda).unwrap();
                let eig = TAU * lambda.unsigned_abs() as f64 * (2 * ell + 1) as f64;
                let r = h.support_radius(1e-12);
                let scale = (0..=200)
                    .map(|i| h.value(-r + 2.0 * r * i as f64 / 200.0).abs())
                    .fold(0.0, f64::max);
                for i in 0..=200 {
                    let u = -r + 2.0 * r * i as f64 / 200.0;
                    let lhs = sublaplacian_on_hermite(lambda, ell, u).unwrap();
                    let rel = (lhs - eig * h.value(u)).abs() / (eig * scale);
                    assert!(rel < 1e-6, "lambda={lambda} ell={ell} u={u}: {rel}");
                }
            }
        }
    }
}
