//! Truncated sums over `ℤ²` weighted by squared Laguerre functions, with a
//! rigorous bound on the omitted tail.
//!
//! From `|L_ℓ(v)| ≤ Σ_j C(ℓ,j) v^j/j! ≤ (1+v)^ℓ` we get
//! `|𝓛_ℓ(v)|² ≤ (1+v)^{2ℓ} e^{−v}`, which decreases for `v ≥ 2ℓ`. Comparing
//! the lattice sum over `|x| > R` with the integral over unit cells and
//! substituting `v = π|x|²/|λ|` gives
//!
//! `Σ_{|x|>R} ≤ |λ| (1 + 1/(√2 s₀)) e^{−v₀} Σ_{k=0}^{2ℓ} (2ℓ)!/k! (1+v₀)^k`
//!
//! with `s₀ = R − √2`, `v₀ = π s₀²/|λ| ≥ 2ℓ`.

use crate::quadrature::pairwise_sum;
use crate::{Error, Result};
use core::f64::consts::{PI, SQRT_2};
use rayon::prelude::*;
use serde::Serialize;

/// Largest truncation radius the searches will consider.
pub const RADIUS_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LatticeSumResult {
    pub value: f64,
    pub truncation_radius: u64,
    /// Upper bound on the omitted part `Σ_{|x|>R}`.
    pub tail_bound: f64,
}

/// `Σ_{x ∈ ℤ², |x| > R} (1+v)^{2ℓ} e^{−v}` bound, `v = π|x|²/modulus`;
/// `+∞` when `R` is too small for the monotonicity argument.
pub fn laguerre_tail_bound(modulus: u64, ell: usize, radius: u64) -> f64 {
    let s0 = radius as f64 - SQRT_2;
    if s0 <= 0.0 {
        return f64::INFINITY;
    }
    let lam = modulus as f64;
    let v0 = PI * s0 * s0 / lam;
    let n = 2 * ell;
    if v0 < n as f64 {
        return f64::INFINITY;
    }
    // Σ_k n!/k! x^k = x^n Σ_j n!/(n−j)! x^{−j}, summed from the top term down.
    let x = 1.0 + v0;
    let mut term = 1.0;
    let mut acc = 1.0;
    for k in (1..=n).rev() {
        term *= k as f64 / x;
        acc += term;
    }
    let log = (n as f64) * x.ln() + acc.ln() - v0;
    lam * (1.0 + 1.0 / (SQRT_2 * s0)) * log.exp()
}

/// Smallest `R ≤ RADIUS_CAP` whose tail bound is at most `target`.
///
/// `scale` multiplies the bound (for windows whose squared weight is only
/// dominated by a multiple of `(1+v)^{2ℓ} e^{−v}`).
pub fn radius_for(modulus: u64, ell: usize, scale: f64, target: f64) -> Result<(u64, f64)> {
    if !(target > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {target}")));
    }
    let bound = |r: u64| scale * laguerre_tail_bound(modulus, ell, r);
    let lam = modulus as f64;
    let mut lo = ((2.0 * ell as f64 * lam / PI).sqrt() + SQRT_2).floor() as u64;
    let mut hi = lo.max(2);
    while bound(hi) > target {
        if hi >= RADIUS_CAP {
            return Err(Error::TruncationUnreachable { tol: target, cap: RADIUS_CAP });
        }
        lo = hi;
        hi = (2 * hi).min(RADIUS_CAP);
    }
    while lo + 1 < hi {
        let mid = lo + (hi - lo) / 2;
        if bound(mid) <= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((hi, bound(hi)))
}

/// `Σ_{a²+b² ≤ R²} term(a, b)`, reduced row by row in a fixed order.
pub fn disk_sum<F>(radius: u64, term: F) -> f64
where
    F: Fn(i64, i64) -> f64 + Sync,
{
    disk_rows_sum(radius, |b, w| {
        let vals: Vec<f64> = (-w..=w).map(|a| term(a, b)).collect();
        pairwise_sum(&vals)
    })
}

/// `Σ_{|b| ≤ R} row(b, w_b)` with `w_b = ⌊√(R² − b²)⌋`; rows run in
/// parallel and are combined in a fixed order.
pub fn disk_rows_sum<F>(radius: u64, row: F) -> f64
where
    F: Fn(i64, i64) -> f64 + Sync,
{
    let r = radius as i64;
    let rows: Vec<f64> = (-r..=r)
        .into_par_iter()
        .map(|b| row(b, half_width(radius, b)))
        .collect();
    pairwise_sum(&rows)
}

/// Like [`disk_sum`] for a term that only depends on `a² + b²`: sums one
/// quarter `a > 0, b ≥ 0` and uses the four-fold rotation symmetry.
pub fn radial_disk_sum<F>(radius: u64, term: F) -> f64
where
    F: Fn(u64) -> f64 + Sync,
{
    let r = radius as i64;
    let rows: Vec<f64> = (0..=r)
        .into_par_iter()
        .map(|b| {
            let w = half_width(radius, b);
            let vals: Vec<f64> = (1..=w).map(|a| term((a * a + b * b) as u64)).collect();
            pairwise_sum(&vals)
        })
        .collect();
    term(0) + 4.0 * pairwise_sum(&rows)
}

/// `⌊√(R² − b²)⌋`, exactly.
pub fn half_width(radius: u64, b: i64) -> i64 {
    let rest = (radius * radius) as i64 - b * b;
    if rest < 0 {
        return -1;
    }
    let mut w = (rest as f64).sqrt() as i64;
    while w * w > rest {
        w -= 1;
    }
    while (w + 1) * (w + 1) <= rest {
        w += 1;
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special_fn::laguerre_fn;

    fn brute_tail(modulus: u64, ell: usize, radius: u64, outer: i64) -> f64 {
        let mut s = 0.0;
        for a in -outer..=outer {
            for b in -outer..=outer {
                let r2 = (a * a + b * b) as u64;
                if r2 > radius * radius {
                    let v = PI * r2 as f64 / modulus as f64;
                    s += laguerre_fn(ell, v).unwrap().powi(2);
                }
            }
        }
        s
    }

    #[test]
    fn tail_bound_dominates_brute_force() {
        for &(modulus, ell) in &[(1u64, 0usize), (3, 1), (8, 4), (5, 2), (20, 0)] {
            let (r, bound) = radius_for(modulus, ell, 1.0, 1e-6).unwrap();
            let brute = brute_tail(modulus, ell, r, 3 * r as i64 + 10);
            assert!(brute <= bound, "({modulus},{ell}) R={r}: {brute} > {bound}");
            assert!(bound <= 1e-6);
        }
    }

    #[test]
    fn tail_bound_rejects_small_radius() {
        assert!(laguerre_tail_bound(10, 0, 1).is_infinite());
        assert!(laguerre_tail_bound(100, 5, 3).is_infinite());
        assert!(laguerre_tail_bound(10, 0, 40).is_finite());
    }

    #[test]
    fn radius_is_minimal() {
        let (r, _) = radius_for(7, 2, 1.0, 1e-9).unwrap();
        assert!(laguerre_tail_bound(7, 2, r - 1) > 1e-9);
    }

    #[test]
    fn unreachable_tolerance_is_reported() {
        let err = radius_for(1 << 40, 0, 1.0, 1e-300).unwrap_err();
        assert!(matches!(err, Error::TruncationUnreachable { .. }));
    }

    #[test]
    fn half_widths() {
        assert_eq!(half_width(5, 0), 5);
        assert_eq!(half_width(5, 3), 4);
        assert_eq!(half_width(5, 4), 3);
        assert_eq!(half_width(5, 5), 0);
        assert_eq!(half_width(5, 6), -1);
    }

    #[test]
    fn radial_sum_matches_full_disk() {
        let f = |r2: u64| (-(r2 as f64) / 7.0).exp();
        let a = radial_disk_sum(12, f);
        let b = disk_sum(12, |x, y| f((x * x + y * y) as u64));
        assert!((a - b).abs() < 1e-12 * a);
    }
}
