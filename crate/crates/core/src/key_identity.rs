//! Both sides of the exact `L⁴` identity for a single-sector packet
//! `f = Σ_q γ_q h_{λ,q,ℓ}`:
//!
//! `‖f‖₄⁴ = Σ_{a,b∈ℤ} |S(a,b) 𝓛_ℓ(π(a²+b²)/|λ|)|²`,
//! `S(a,b) = Σ_q γ_q γ̄_{q−b} e^{2πiqa/λ}`,
//!
//! and its general-window form where the Laguerre weight becomes the matrix
//! coefficient `(h, π_λ(a/λ, b/λ, 0) h)`.

use crate::basis::{CoeffVector, Window};
use crate::group::{matrix_coefficient_quadrature, GroupElement, UniformGrid};
use crate::lattice::{disk_rows_sum, radius_for, LatticeSumResult};
use crate::quadrature::{l4_norm_sector, pairwise_sum, Resolved};
use crate::special_fn::laguerre_unchecked;
use crate::{Error, Result, TAU};
use core::f64::consts::PI;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;
use std::sync::Arc;

/// Denominator floor of [`identity_residual`].
pub const EPSILON_FLOOR: f64 = 1e-30;

/// `V_γη(a,b)` for `a, b ∈ ℤ/λℤ`.
#[derive(Debug, Clone, PartialEq)]
pub struct StftMatrix {
    modulus: usize,
    table: Vec<Complex64>,
}

impl StftMatrix {
    pub fn modulus(&self) -> usize {
        self.modulus
    }

    /// Entry with both indices taken modulo `|λ|`.
    pub fn get(&self, a: i64, b: i64) -> Complex64 {
        let m = self.modulus as i64;
        self.table[(a.rem_euclid(m) * m + b.rem_euclid(m)) as usize]
    }

    /// `Σ_{a,b} |V(a,b)|²`.
    pub fn energy(&self) -> f64 {
        pairwise_sum(&self.table.iter().map(|v| v.norm_sqr()).collect::<Vec<_>>())
    }
}

/// `V_γη(a,b) = Σ_q η(q) γ̄(q−a) e^{−2πibq/λ}`, one forward DFT per shift `a`.
pub fn discrete_stft(gamma: &CoeffVector, eta: &CoeffVector) -> Result<StftMatrix> {
    let m = gamma.modulus();
    if eta.modulus() != m {
        return Err(Error::ModulusMismatch {
            left: m,
            right: eta.modulus(),
        });
    }
    let fft = FftPlanner::new().plan_fft_forward(m);
    let mut table = Vec::with_capacity(m * m);
    for a in 0..m as i64 {
        let mut row: Vec<Complex64> = (0..m as i64).map(|q| eta.at(q) * gamma.at(q - a).conj()).collect();
        fft.process(&mut row);
        table.extend(row);
    }
    Ok(StftMatrix { modulus: m, table })
}

/// `S(a,b)` by its defining sum.
pub fn inner_sum(gamma: &CoeffVector, a: i64, b: i64) -> Complex64 {
    let lambda = gamma.lambda();
    let m = gamma.modulus() as i64;
    (0..m)
        .map(|q| {
            let r = (q * a).rem_euclid(m) as f64;
            gamma.at(q) * gamma.at(q - b).conj() * Complex64::from_polar(1.0, TAU * lambda.signum() as f64 * r / m as f64)
        })
        .sum()
}

/// Row `a ↦ S(a, b)` for `a ∈ ℤ/λℤ` by one DFT. The kernel `e^{2πiqa/λ}` is
/// the inverse transform for `λ > 0` and the forward one for `λ < 0`.
pub struct InnerSumRows {
    gamma: CoeffVector,
    fft: Arc<dyn Fft<f64>>,
}

impl InnerSumRows {
    pub fn new(gamma: &CoeffVector) -> Self {
        let mut planner = FftPlanner::new();
        let m = gamma.modulus();
        let fft = if gamma.lambda() > 0 {
            planner.plan_fft_inverse(m)
        } else {
            planner.plan_fft_forward(m)
        };
        Self {
            gamma: gamma.clone(),
            fft,
        }
    }

    pub fn row(&self, b: i64) -> Vec<Complex64> {
        let m = self.gamma.modulus() as i64;
        let mut x: Vec<Complex64> = (0..m).map(|q| self.gamma.at(q) * self.gamma.at(q - b).conj()).collect();
        self.fft.process(&mut x);
        x
    }

    /// `|S(·, b)|²`.
    pub fn row_sqr(&self, b: i64) -> Vec<f64> {
        self.row(b).iter().map(|v| v.norm_sqr()).collect()
    }
}

/// `Σ_{a²+b² ≤ R²} |S(a,b)|² w(a,b)`.
///
/// `S` is `λ`-periodic in both arguments; when the disk is at least `λ`
/// rows tall every distinct row is computed once up front, otherwise each
/// row is computed where it is used.
pub fn weighted_lattice_sum<W>(gamma: &CoeffVector, radius: u64, weight: W) -> f64
where
    W: Fn(i64, i64) -> f64 + Sync,
{
    let rows = InnerSumRows::new(gamma);
    let m = gamma.modulus() as i64;
    let table: Option<Vec<Vec<f64>>> = (2 * radius as i64 + 1 >= m).then(|| (0..m).map(|b| rows.row_sqr(b)).collect());
    disk_rows_sum(radius, |b, w| {
        if w < 0 {
            return 0.0;
        }
        let computed;
        let row: &[f64] = match &table {
            Some(t) => &t[b.rem_euclid(m) as usize],
            None => {
                computed = rows.row_sqr(b);
                &computed
            }
        };
        let vals: Vec<f64> = (-w..=w)
            .map(|a| {
                let s = row[a.rem_euclid(m) as usize];
                if s == 0.0 {
                    0.0
                } else {
                    s * weight(a, b)
                }
            })
            .collect();
        pairwise_sum(&vals)
    })
}

/// `|𝓛_ℓ(π(a²+b²)/|λ|)|²`.
pub fn laguerre_weight(modulus: u64, ell: usize, a: i64, b: i64) -> f64 {
    let v = PI * (a * a + b * b) as f64 / modulus as f64;
    laguerre_unchecked(ell, v).powi(2)
}

/// The right-hand side of the identity, truncated to `a² + b² ≤ R²` with the
/// smallest `R` whose tail bound is below `tol·‖γ‖⁴` (the `(0,0)` term alone
/// is `‖γ‖⁴`, so the bound is also below `tol` times the value).
pub fn rhs_lattice_sum(gamma: &CoeffVector, ell: usize, tol: f64) -> Result<LatticeSumResult> {
    let modulus = gamma.modulus() as u64;
    let (radius, bound) = radius_for(modulus, ell, 1.0, tol)?;
    let value = weighted_lattice_sum(gamma, radius, |a, b| laguerre_weight(modulus, ell, a, b));
    Ok(LatticeSumResult {
        value,
        truncation_radius: radius,
        tail_bound: bound * gamma.norm_sqr().powi(2),
    })
}

/// Points of the trapezoid rule used for window matrix coefficients.
const MATRIX_COEFFICIENT_POINTS: usize = 4001;

/// `(h, π_λ(a/λ, b/λ, 0) h)` by quadrature for every `|a|, |b| ≤ R`.
pub fn window_matrix_coefficients(lambda: i64, window: &Window, radius: u64) -> Result<Vec<Complex64>> {
    let support = window.support_radius(1e-17);
    let grid = UniformGrid::spanning(-support, support, MATRIX_COEFFICIENT_POINTS);
    let r = radius as i64;
    let side = (2 * r + 1) as usize;
    let mut out = Vec::with_capacity(side * side);
    let h = |u: f64| window.value(u);
    for b in -r..=r {
        for a in -r..=r {
            let g = GroupElement::new(a as f64 / lambda as f64, b as f64 / lambda as f64, 0.0);
            out.push(matrix_coefficient_quadrature(lambda, &h, g, grid)?);
        }
    }
    Ok(out)
}

/// Right-hand side of the general-window identity.
///
/// The tail estimate treats `|(h, π h)|²` as dominated by
/// `‖c‖₁⁴ (1+v)^{2ℓ_max} e^{−v}` for `h = Σ cⱼ h_{ℓⱼ,λ}`; this is exact for a
/// single Hermite window and a heuristic for combinations.
pub fn rhs_general_window(gamma: &CoeffVector, window: &Window, tol: f64) -> Result<LatticeSumResult> {
    let modulus = gamma.modulus() as u64;
    let l1: f64 = match window {
        Window::Hermite(_) => 1.0,
        Window::Combination(parts) => parts.iter().map(|(w, _)| w.abs()).sum(),
    };
    let (radius, bound) = radius_for(modulus, window.max_degree(), l1.powi(4), tol)?;
    let coeffs = window_matrix_coefficients(gamma.lambda(), window, radius)?;
    let r = radius as i64;
    let side = 2 * r + 1;
    let value = weighted_lattice_sum(gamma, radius, |a, b| coeffs[((b + r) * side + a + r) as usize].norm_sqr());
    Ok(LatticeSumResult {
        value,
        truncation_radius: radius,
        tail_bound: bound * gamma.norm_sqr().powi(2),
    })
}

/// Both sides of the identity and their relative difference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub lhs: Resolved<f64>,
    pub rhs: LatticeSumResult,
    /// `|LHS − RHS| / max(RHS, ε_floor)`.
    pub residual: f64,
}

fn check(lhs: Resolved<f64>, rhs: LatticeSumResult) -> IdentityCheck {
    IdentityCheck {
        lhs,
        rhs,
        residual: (lhs.value - rhs.value).abs() / rhs.value.max(EPSILON_FLOOR),
    }
}

/// Series truncation used on the quadrature side.
const SERIES_TOL: f64 = 1e-15;

/// `‖Σ_q γ_q h_{λ,q,ℓ}‖₄⁴` by quadrature against the lattice sum.
pub fn identity_residual(gamma: &CoeffVector, ell: usize, tol: f64, grid: usize) -> Result<IdentityCheck> {
    let window = Window::hermite(ell, gamma.lambda())?;
    let lhs = l4_norm_sector(gamma, &window, grid, SERIES_TOL)?;
    let rhs = rhs_lattice_sum(gamma, ell, tol)?;
    Ok(check(lhs, rhs))
}

/// The general-window form, with the weight computed by quadrature.
pub fn identity_residual_general(gamma: &CoeffVector, window: &Window, tol: f64, grid: usize) -> Result<IdentityCheck> {
    let lhs = l4_norm_sector(gamma, window, grid, SERIES_TOL)?;
    let rhs = rhs_general_window(gamma, window, tol)?;
    Ok(check(lhs, rhs))
}

/// `(h₂,λ + h₅,λ)/√2`, the general window used by the checks.
pub fn standard_general_window(lambda: i64) -> Result<Window> {
    Window::normalized_combination(lambda, &[(2, 1.0), (5, 1.0)])
}
