//! Midpoint (periodic trapezoid) quadrature on `M` and `𝕋²`.
//!
//! All sums are reduced in a fixed pairwise order, so results do not depend
//! on the thread count.

use crate::basis::{CoeffVector, SectorPacket, TorusIndex, Window};
use crate::group::GroupElement;
use crate::zygmund::{correlation_table, l4_via_plancherel};
use crate::{Error, Result, TAU};
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::Serialize;

/// Relative change under grid doubling above which a value is flagged.
pub const DOUBLING_TOLERANCE: f64 = 1e-8;

/// `(i + ½)/n` for `i < n`.
pub fn midpoints(n: usize) -> Vec<f64> {
    (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect()
}

/// Pairwise (cascade) summation with a fixed tree shape.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 16 {
        return xs.iter().sum();
    }
    let (l, r) = xs.split_at(xs.len() / 2);
    pairwise_sum(l) + pairwise_sum(r)
}

pub fn pairwise_sum_complex(xs: &[Complex64]) -> Complex64 {
    if xs.len() <= 16 {
        return xs.iter().sum();
    }
    let (l, r) = xs.split_at(xs.len() / 2);
    pairwise_sum_complex(l) + pairwise_sum_complex(r)
}

/// A quadrature value together with its grid-doubling check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Resolved<T> {
    pub value: T,
    /// `|coarse − fine|`, relative to `|fine|` when that exceeds one.
    pub doubling_change: f64,
    pub underresolved: bool,
}

fn resolved<T: Copy>(coarse: T, fine: T, dist: impl Fn(T, T) -> f64, size: impl Fn(T) -> f64) -> Resolved<T> {
    let change = dist(coarse, fine) / size(fine).max(1.0);
    Resolved {
        value: fine,
        doubling_change: change,
        underresolved: change > DOUBLING_TOLERANCE,
    }
}

/// Complex samples on the midpoint grid `((i+½)/n_a, (j+½)/n_b)`, row-major in `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid2 {
    pub n_a: usize,
    pub n_b: usize,
    pub values: Vec<Complex64>,
}

impl Grid2 {
    pub fn new(n_a: usize, n_b: usize, values: Vec<Complex64>) -> Result<Self> {
        if n_a == 0 || n_b == 0 || values.len() != n_a * n_b {
            return Err(Error::InvalidInput(format!(
                "grid {n_a}x{n_b} does not hold {} samples",
                values.len()
            )));
        }
        Ok(Self { n_a, n_b, values })
    }

    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.n_b + j]
    }

    /// Mean of `|f|^p` over the grid.
    pub fn mean_abs_pow(&self, p: i32) -> f64 {
        let rows: Vec<f64> = self
            .values
            .par_chunks(self.n_b)
            .map(|row| pairwise_sum(&row.iter().map(|v| v.norm_sqr().powi(p / 2)).collect::<Vec<_>>()))
            .collect();
        pairwise_sum(&rows) / self.values.len() as f64
    }
}

/// Samples `f(a,b) = Σ_q γ_q BWZ_{λ,q}(w)(a,b,0)` on the unit square.
///
/// Each row is a trigonometric polynomial in `b`, so it is synthesised with
/// one inverse FFT from the coefficients `Ĝ(k) w(k/λ + a)`. The sample
/// values are exact (up to the series tail) for any `n_b`.
#[derive(Debug, Clone)]
pub struct SectorFunction {
    pub lambda: i64,
    pub grid: Grid2,
    /// Largest `|k|` in the truncated series.
    pub bandwidth_k: u64,
    /// Largest number of `k` terms in one row.
    pub row_span: usize,
    packet: SectorPacket,
}

impl SectorFunction {
    pub fn sample(coeffs: &CoeffVector, window: Window, n_a: usize, n_b: usize, tol: f64) -> Result<Self> {
        let packet = SectorPacket::new(coeffs, window, tol)?;
        Self::from_packet(packet, n_a, n_b)
    }

    pub fn from_packet(packet: SectorPacket, n_a: usize, n_b: usize) -> Result<Self> {
        if n_a == 0 || n_b == 0 {
            return Err(Error::InvalidInput("grid sizes must be positive".into()));
        }
        let fft = FftPlanner::new().plan_fft_inverse(n_b);
        let rows: Vec<(Vec<Complex64>, usize)> = midpoints(n_a)
            .par_iter()
            .map(|&a| {
                let (k_lo, coeffs) = packet.row_coefficients(a);
                let mut bins = vec![Complex64::new(0.0, 0.0); n_b];
                for (offset, c) in coeffs.iter().enumerate() {
                    let k = k_lo + offset as i64;
                    // the half-step offset of the midpoint grid
                    let shift = Complex64::from_polar(1.0, TAU * 0.5 * k as f64 / n_b as f64);
                    bins[k.rem_euclid(n_b as i64) as usize] += c * shift;
                }
                fft.process(&mut bins);
                (bins, coeffs.len())
            })
            .collect();
        let row_span = rows.iter().map(|r| r.1).max().unwrap_or(0);
        let values = rows.into_iter().flat_map(|r| r.0).collect();
        Ok(Self {
            lambda: packet.lambda(),
            grid: Grid2::new(n_a, n_b, values)?,
            bandwidth_k: packet.bandwidth(),
            row_span,
            packet,
        })
    }

    /// Smallest power-of-two `n_b` that integrates `|f|⁴` exactly in `b`.
    pub fn required_n_b(packet: &SectorPacket) -> usize {
        (2 * packet.max_row_span() + 1).next_power_of_two()
    }

    /// Largest `||f(a₀+1,b)| − |f(a₀,b)||` over the first grid row.
    pub fn wraparound_defect(&self) -> f64 {
        let a0 = 0.5 / self.grid.n_a as f64;
        midpoints(self.grid.n_b)
            .iter()
            .enumerate()
            .map(|(j, &b)| (self.packet.value_ab(a0 + 1.0, b).norm() - self.grid.at(0, j).norm()).abs())
            .fold(0.0, f64::max)
    }
}

/// `‖f‖⁴_{L⁴(M)}` of a single-sector function by the `[0,1)²` reduction.
///
/// `n_b` is raised to the exactness threshold of [`SectorFunction::required_n_b`]
/// when `grid` is smaller; the whole grid is then doubled once as a check.
pub fn l4_norm_sector(coeffs: &CoeffVector, window: &Window, grid: usize, tol: f64) -> Result<Resolved<f64>> {
    let packet = SectorPacket::new(coeffs, window.clone(), tol)?;
    let n_b = grid.max(SectorFunction::required_n_b(&packet));
    let coarse = SectorFunction::from_packet(packet.clone(), grid, n_b)?.grid.mean_abs_pow(4);
    let fine = SectorFunction::from_packet(packet, 2 * grid, 2 * n_b)?.grid.mean_abs_pow(4);
    Ok(resolved(coarse, fine, |x, y| (x - y).abs(), f64::abs))
}

/// `∫_M f ḡ` by the tensor midpoint rule on `[0,1)³`.
///
/// `central_bandwidth` bounds the central frequencies of both integrands;
/// the `c` grid has more than twice that many points, which makes the `c`
/// integral exact.
pub fn l2_inner_m<F, G>(f: F, g: G, grid_n: usize, central_bandwidth: u64) -> Result<Resolved<Complex64>>
where
    F: Fn(GroupElement) -> Complex64 + Sync,
    G: Fn(GroupElement) -> Complex64 + Sync,
{
    if grid_n == 0 {
        return Err(Error::InvalidInput("grid size must be positive".into()));
    }
    let n_c = 2 * central_bandwidth as usize + 2;
    let at = |n: usize| -> Complex64 {
        let ab = midpoints(n);
        let cs = midpoints(n_c);
        let rows: Vec<Complex64> = ab
            .par_iter()
            .map(|&a| {
                let terms: Vec<Complex64> = ab
                    .iter()
                    .flat_map(|&b| cs.iter().map(move |&c| GroupElement::new(a, b, c)))
                    .map(|p| f(p) * g(p).conj())
                    .collect();
                pairwise_sum_complex(&terms)
            })
            .collect();
        pairwise_sum_complex(&rows) / (n * n * n_c) as f64
    };
    let coarse = at(grid_n);
    let fine = at(2 * grid_n);
    Ok(resolved(coarse, fine, |x, y| (x - y).norm(), |x| x.norm()))
}

/// How to evaluate a torus norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TorusRoute {
    Quadrature,
    /// `‖f‖₂² = Σ|c|²` and `‖f‖₄⁴ = Σ_ρ |Γ_ρ|²`.
    Plancherel,
}

/// `‖Σ c_ω χ_ω‖_{L^p(𝕋²)}` for `p ∈ {2, 4}`.
pub fn lp_norm_torus(
    coeffs: &[(TorusIndex, Complex64)],
    p: u32,
    grid_n: usize,
    route: TorusRoute,
) -> Result<Resolved<f64>> {
    if p != 2 && p != 4 {
        return Err(Error::InvalidInput(format!("only p = 2 and p = 4 are supported, got {p}")));
    }
    match route {
        TorusRoute::Plancherel => {
            let value = if p == 2 {
                coeffs.iter().map(|(_, c)| c.norm_sqr()).sum::<f64>().sqrt()
            } else {
                let pts: Vec<(i64, i64)> = coeffs.iter().map(|(w, _)| w.omega).collect();
                let cs: Vec<Complex64> = coeffs.iter().map(|(_, c)| *c).collect();
                l4_via_plancherel(&correlation_table(&pts, &cs)?).powf(0.25)
            };
            Ok(Resolved {
                value,
                doubling_change: 0.0,
                underresolved: false,
            })
        }
        TorusRoute::Quadrature => {
            let at = |n: usize| -> f64 {
                let xs = midpoints(n);
                let rows: Vec<f64> = xs
                    .par_iter()
                    .map(|&a| {
                        let vals: Vec<f64> = xs
                            .iter()
                            .map(|&b| {
                                let v: Complex64 = coeffs
                                    .iter()
                                    .map(|(w, c)| {
                                        c * Complex64::from_polar(1.0, TAU * (w.omega.0 as f64 * a + w.omega.1 as f64 * b))
                                    })
                                    .sum();
                                v.norm_sqr().powi(p as i32 / 2)
                            })
                            .collect();
                        pairwise_sum(&vals)
                    })
                    .collect();
                (pairwise_sum(&rows) / (n * n) as f64).powf(1.0 / p as f64)
            };
            let coarse = at(grid_n);
            let fine = at(2 * grid_n);
            Ok(resolved(coarse, fine, |x, y| (x - y).abs(), f64::abs))
        }
    }
}
