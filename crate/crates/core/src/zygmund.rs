//! The `L⁴` estimate for eigenfunctions of the flat torus `𝕋²` by exact
//! lattice arithmetic.
//!
//! For `f = Σ_{|ω|²=n} c_ω χ_ω` one has `|f|² = Σ_ρ Γ_ρ χ_ρ` with
//! `Γ_ρ = Σ_{ω₁−ω₂=ρ} c_{ω₁} c̄_{ω₂}`, hence `‖f‖₄⁴ = Σ_ρ |Γ_ρ|²`. Two points
//! of a circle determine their difference and at most two ordered pairs share
//! a nonzero difference, which gives `‖f‖₄⁴ ≤ 5‖c‖⁴`.

use crate::{seeded_rng, Error, Result};
use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;

/// Integer points on the circle `ω₁² + ω₂² = n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CirclePoints {
    pub n: u64,
    pub points: Vec<(i64, i64)>,
}

impl CirclePoints {
    /// `r₂(n)`.
    pub fn count(&self) -> usize {
        self.points.len()
    }
}

fn exact_sqrt(x: u64) -> Option<u64> {
    let mut r = (x as f64).sqrt() as u64;
    while r * r > x {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= x {
        r += 1;
    }
    (r * r == x).then_some(r)
}

/// Scans `ω₁ ∈ [−√n, √n]` and keeps the `ω₁` for which `n − ω₁²` is a square.
pub fn circle_lattice_points(n: u64) -> CirclePoints {
    let mut points = Vec::new();
    let top = exact_sqrt(n).unwrap_or_else(|| (n as f64).sqrt() as u64) as i64;
    for w1 in -top..=top {
        let rest = n as i64 - w1 * w1;
        if rest < 0 {
            continue;
        }
        if let Some(w2) = exact_sqrt(rest as u64) {
            points.push((w1, -(w2 as i64)));
            if w2 != 0 {
                points.push((w1, w2 as i64));
            }
        }
    }
    CirclePoints { n, points }
}

/// Sparse table of `Γ_ρ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationTable {
    pub entries: BTreeMap<(i64, i64), Complex64>,
}

impl CorrelationTable {
    pub fn get(&self, rho: (i64, i64)) -> Complex64 {
        self.entries.get(&rho).copied().unwrap_or_default()
    }

    /// `Γ₀ = Σ|c_ω|²`.
    pub fn gamma0(&self) -> f64 {
        self.get((0, 0)).re
    }

    /// `Σ_{ρ≠0} |Γ_ρ|²`.
    pub fn off_diagonal(&self) -> f64 {
        self.entries
            .iter()
            .filter(|(rho, _)| **rho != (0, 0))
            .map(|(_, g)| g.norm_sqr())
            .sum()
    }
}

/// `Γ_ρ` for every difference `ρ` of the given points.
pub fn correlation_table(points: &[(i64, i64)], c: &[Complex64]) -> Result<CorrelationTable> {
    if points.len() != c.len() {
        return Err(Error::CoefficientLength {
            expected: points.len(),
            got: c.len(),
        });
    }
    let mut entries = BTreeMap::new();
    for (p1, c1) in points.iter().zip(c) {
        for (p2, c2) in points.iter().zip(c) {
            let rho = (p1.0 - p2.0, p1.1 - p2.1);
            *entries.entry(rho).or_insert(Complex64::new(0.0, 0.0)) += c1 * c2.conj();
        }
    }
    Ok(CorrelationTable { entries })
}

/// `‖Σ c_ω χ_ω‖₄⁴ = Σ_ρ |Γ_ρ|²`.
pub fn l4_via_plancherel(table: &CorrelationTable) -> f64 {
    table.entries.values().map(|g| g.norm_sqr()).sum()
}

/// Number of real pairs `(ω₁, ω₂)` with `|ω₁| = |ω₂| = r′` and `ω₁ − ω₂ = ρ`.
///
/// Writing `ω₁ = m + t ρ^⊥/|ρ|`, `ω₂ = ω₁ − ρ` with `m = ρ/2` forces
/// `t² = r′² − |ρ|²/4`: two solutions, one (tangent) or none.
pub fn pair_solution_count(rho: (i64, i64), r_prime: f64) -> u8 {
    let rho2 = (rho.0 * rho.0 + rho.1 * rho.1) as f64;
    let disc = 4.0 * r_prime * r_prime - rho2;
    let scale = 4.0 * r_prime * r_prime + rho2;
    if disc.abs() <= 1e-12 * scale {
        1
    } else if disc > 0.0 {
        2
    } else {
        0
    }
}

/// Largest number of ordered pairs of points of the circle `n` sharing one
/// nonzero difference.
pub fn max_pairs_per_difference(n: u64) -> usize {
    let pts = circle_lattice_points(n).points;
    let mut counts: BTreeMap<(i64, i64), usize> = BTreeMap::new();
    for p in &pts {
        for q in &pts {
            if p != q {
                *counts.entry((p.0 - q.0, p.1 - q.1)).or_default() += 1;
            }
        }
    }
    counts.values().copied().max().unwrap_or(0)
}

/// One circle of the certificate run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZygmundRow {
    pub n: u64,
    pub r2: usize,
    /// Largest `Σ_ρ|Γ_ρ|² / ‖c‖⁴` over the trials.
    pub max_ratio4: f64,
    /// Largest `Σ_{ρ≠0}|Γ_ρ|² / ‖c‖⁴` over the trials.
    pub max_off_diagonal: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZygmundReport {
    pub seed: u64,
    pub trials: usize,
    pub rows: Vec<ZygmundRow>,
    pub max_ratio4: f64,
    /// Trials with ratio⁴ above 5 or off-diagonal part above 4.
    pub violations: usize,
}

pub const RATIO4_BOUND: f64 = 5.0;
pub const OFF_DIAGONAL_BOUND: f64 = 4.0;

/// Random complex coefficients on every circle `n ≤ n_max` with `r₂(n) > 0`;
/// the stream for circle `n` depends only on `(seed, n)`.
pub fn zygmund_certificate(n_max: u64, trials: usize, seed: u64) -> ZygmundReport {
    let rows: Vec<(ZygmundRow, usize)> = (1..=n_max)
        .into_par_iter()
        .filter_map(|n| {
            let circle = circle_lattice_points(n);
            if circle.points.is_empty() {
                return None;
            }
            let mut rng = seeded_rng(seed, n);
            let mut row = ZygmundRow {
                n,
                r2: circle.count(),
                max_ratio4: 0.0,
                max_off_diagonal: 0.0,
            };
            let mut bad = 0;
            for _ in 0..trials {
                let c: Vec<Complex64> = (0..circle.count())
                    .map(|_| {
                        let re: f64 = StandardNormal.sample(&mut rng);
                        let im: f64 = StandardNormal.sample(&mut rng);
                        Complex64::new(re, im)
                    })
                    .collect();
                let table = correlation_table(&circle.points, &c).expect("aligned");
                let norm4 = table.gamma0().powi(2);
                let ratio4 = l4_via_plancherel(&table) / norm4;
                let off = table.off_diagonal() / norm4;
                if ratio4 > RATIO4_BOUND || off > OFF_DIAGONAL_BOUND {
                    bad += 1;
                }
                row.max_ratio4 = row.max_ratio4.max(ratio4);
                row.max_off_diagonal = row.max_off_diagonal.max(off);
            }
            Some((row, bad))
        })
        .collect();
    let violations = rows.iter().map(|r| r.1).sum();
    let rows: Vec<ZygmundRow> = rows.into_iter().map(|r| r.0).collect();
    ZygmundReport {
        seed,
        trials,
        max_ratio4: rows.iter().map(|r| r.max_ratio4).fold(0.0, f64::max),
        rows,
        violations,
    }
}
