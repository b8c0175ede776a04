//! Operator-norm experiments: indicator windows and the `μ^{1/2}` scaling,
//! the Laguerre lattice constant, a multi-start search for extremizing
//! coefficient sequences, and the frozen linear (Bernstein) ceiling.
//!
//! For a unit coefficient vector the quantity of interest is
//! `ratio = Q(γ)^{1/4}` with `Q(γ) = Σ_{a,b∈ℤ} |S(a,b)|² |𝓛_ℓ(π(a²+b²)/|λ|)|²`,
//! the fourth power of `‖Σ_q γ_q h_{λ,q,ℓ}‖₄ / ‖γ‖₂`.

use crate::basis::CoeffVector;
use crate::key_identity::{laguerre_weight, rhs_lattice_sum, InnerSumRows};
use crate::lattice::{disk_sum, radial_disk_sum, radius_for, LatticeSumResult};
use crate::special_fn::laguerre_unchecked;
use crate::{seeded_rng, Error, Result, TAU};
use core::f64::consts::PI;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// `μ = √(2π|λ|(2ℓ+1))`.
pub fn sector_mu(lambda: i64, ell: usize) -> f64 {
    (TAU * lambda.unsigned_abs() as f64 * (2 * ell + 1) as f64).sqrt()
}

/// Indicator of `[−A, A]` in `ℤ/λℤ`, with `8A < λ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowSpec {
    pub lambda: u64,
    pub a: u64,
    pub gamma: CoeffVector,
}

impl WindowSpec {
    pub fn new(lambda: u64, a: u64) -> Result<Self> {
        if a == 0 || 8 * a >= lambda {
            return Err(Error::WindowTooWide { lambda, a });
        }
        let mut gamma = CoeffVector::zeros(lambda as i64)?;
        for q in -(a as i64)..=a as i64 {
            gamma.as_mut_slice()[q.rem_euclid(lambda as i64) as usize] = Complex64::new(1.0, 0.0);
        }
        Ok(Self { lambda, a, gamma })
    }

    /// `A = ⌊√λ⌋`.
    pub fn standard(lambda: u64) -> Result<Self> {
        Self::new(lambda, isqrt(lambda))
    }
}

fn isqrt(x: u64) -> u64 {
    let mut r = (x as f64).sqrt() as u64;
    while r * r > x {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= x {
        r += 1;
    }
    r
}

/// `e^{−πA²/λ} e^{−πλ/A²} (2A/π)² (λ + 2A + 1)`.
pub fn lemma_lower_bound(lambda: u64, a: u64) -> Result<f64> {
    if a == 0 || 8 * a >= lambda {
        return Err(Error::WindowTooWide { lambda, a });
    }
    let (l, a) = (lambda as f64, a as f64);
    Ok((-PI * a * a / l).exp() * (-PI * l / (a * a)).exp() * (2.0 * a / PI).powi(2) * (l + 2.0 * a + 1.0))
}

/// Ordinary least squares `y ≈ slope·x + intercept`.
pub fn fit_line(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    if points.len() < 2 {
        return Err(Error::InvalidInput("a line fit needs at least two points".into()));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidInput("a line fit needs distinct abscissae".into()));
    }
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// Slope of `log y` against `log x`.
pub fn fit_loglog_slope(points: &[(f64, f64)]) -> Result<f64> {
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    Ok(fit_line(&logs)?.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingRow {
    pub lambda: u64,
    pub a: u64,
    pub mu: f64,
    /// `RHS^{1/4}/‖γ‖₂`.
    pub ratio: f64,
    pub rhs: f64,
    pub tail_bound: f64,
    pub lemma_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingReport {
    pub rows: Vec<ScalingRow>,
    /// `λ` with no admissible `A = ⌊√λ⌋`.
    pub skipped: Vec<u64>,
    pub fitted_slope: f64,
    pub slope_window: (f64, f64),
    /// Smallest `λ` used by the fit.
    pub fit_lambda_min: u64,
}

pub const SLOPE_WINDOW: (f64, f64) = (0.45, 0.55);
/// Rows below this `λ` are pre-asymptotic and left out of the fit.
pub const FIT_LAMBDA_MIN: u64 = 128;

/// Exact ratios of the standard indicator windows (`ℓ = 0`).
pub fn sharpness_scan(lambdas: &[u64], tol: f64) -> Result<ScalingReport> {
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for &lambda in lambdas {
        let spec = match WindowSpec::standard(lambda) {
            Ok(s) => s,
            Err(Error::WindowTooWide { .. }) => {
                skipped.push(lambda);
                continue;
            }
            Err(e) => return Err(e),
        };
        let rhs = rhs_lattice_sum(&spec.gamma, 0, tol)?;
        rows.push(ScalingRow {
            lambda,
            a: spec.a,
            mu: sector_mu(lambda as i64, 0),
            ratio: rhs.value.powf(0.25) / spec.gamma.norm(),
            rhs: rhs.value,
            tail_bound: rhs.tail_bound,
            lemma_bound: lemma_lower_bound(lambda, spec.a)?,
        });
    }
    let fit: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.lambda >= FIT_LAMBDA_MIN)
        .map(|r| (r.mu, r.ratio))
        .collect();
    let fitted_slope = if fit.len() >= 2 { fit_loglog_slope(&fit)? } else { f64::NAN };
    Ok(ScalingReport {
        rows,
        skipped,
        fitted_slope,
        slope_window: SLOPE_WINDOW,
        fit_lambda_min: FIT_LAMBDA_MIN,
    })
}

/// `Σ_{a,b∈ℤ} |𝓛_ℓ(π(a²+b²)/λ)|²`, truncated with a tail bound below `tol`
/// (the sum is at least one).
pub fn upper_bound_constant(lambda: u64, ell: usize, tol: f64) -> Result<LatticeSumResult> {
    if lambda == 0 {
        return Err(Error::ZeroLambda);
    }
    let (radius, bound) = radius_for(lambda, ell, 1.0, tol)?;
    let value = radial_disk_sum(radius, |r2| laguerre_unchecked(ell, PI * r2 as f64 / lambda as f64).powi(2));
    Ok(LatticeSumResult {
        value,
        truncation_radius: radius,
        tail_bound: bound,
    })
}

/// `Q(γ) = Σ_{a,b mod λ} W_{ab} |S(a,b)|²` with the squared Laguerre weights
/// periodised over the truncation disk.
pub struct QuarticObjective {
    lambda: i64,
    modulus: usize,
    /// `W[b·m + a]`.
    weights: Vec<f64>,
    radius: u64,
    rows: Arc<dyn Fft<f64>>,
}

impl QuarticObjective {
    pub fn new(lambda: i64, ell: usize, tol: f64) -> Result<Self> {
        if lambda == 0 {
            return Err(Error::ZeroLambda);
        }
        let m = lambda.unsigned_abs() as usize;
        let (radius, _) = radius_for(m as u64, ell, 1.0, tol)?;
        let mut weights = vec![0.0; m * m];
        let r = radius as i64;
        // sequential on purpose: the accumulation order fixes the rounding
        for b in -r..=r {
            let w = crate::lattice::half_width(radius, b);
            for a in -w..=w {
                let idx = b.rem_euclid(m as i64) as usize * m + a.rem_euclid(m as i64) as usize;
                weights[idx] += laguerre_weight(m as u64, ell, a, b);
            }
        }
        let mut planner = FftPlanner::new();
        let rows = if lambda > 0 {
            planner.plan_fft_inverse(m)
        } else {
            planner.plan_fft_forward(m)
        };
        Ok(Self {
            lambda,
            modulus: m,
            weights,
            radius,
            rows,
        })
    }

    pub fn lambda(&self) -> i64 {
        self.lambda
    }

    pub fn truncation_radius(&self) -> u64 {
        self.radius
    }

    /// `S[b·m + a]`.
    fn s_table(&self, gamma: &[Complex64]) -> Vec<Complex64> {
        let m = self.modulus;
        let mut out = Vec::with_capacity(m * m);
        for b in 0..m {
            let mut row: Vec<Complex64> = (0..m).map(|q| gamma[q] * gamma[(q + m - b) % m].conj()).collect();
            self.rows.process(&mut row);
            out.extend(row);
        }
        out
    }

    pub fn value(&self, gamma: &[Complex64]) -> f64 {
        self.s_table(gamma)
            .iter()
            .zip(&self.weights)
            .map(|(s, w)| w * s.norm_sqr())
            .sum()
    }

    /// `(Q, ∇Q)` with `∇Q_j = ∂Q/∂x_j + i ∂Q/∂y_j = 2 ∂Q/∂γ̄_j` for
    /// `γ_j = x_j + i y_j`.
    ///
    /// `∂Q/∂γ̄_j = Σ_b [γ_{j+b} P_b(j+b) + γ_{j−b} P̄_b(j)]` with
    /// `P_b(q) = Σ_a W_{ab} S̄(a,b) e^{2πiqa/λ}`.
    pub fn value_and_gradient(&self, gamma: &[Complex64]) -> (f64, Vec<Complex64>) {
        let m = self.modulus;
        let s = self.s_table(gamma);
        let value = s.iter().zip(&self.weights).map(|(s, w)| w * s.norm_sqr()).sum();
        let mut grad = vec![Complex64::new(0.0, 0.0); m];
        for b in 0..m {
            let mut p: Vec<Complex64> = (0..m).map(|a| self.weights[b * m + a] * s[b * m + a].conj()).collect();
            self.rows.process(&mut p);
            for (j, g) in grad.iter_mut().enumerate() {
                let up = (j + b) % m;
                let down = (j + m - b) % m;
                *g += gamma[up] * p[up] + gamma[down] * p[j].conj();
            }
        }
        for g in &mut grad {
            *g *= 2.0;
        }
        (value, grad)
    }
}

fn real_dot(x: &[Complex64], y: &[Complex64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a.conj() * b).re).sum()
}

fn normalize(v: &mut [Complex64]) {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in v {
        *z /= n;
    }
}

/// Largest relative deviation between the analytic gradient and central
/// differences over all `2|λ|` real coordinates.
pub fn gradient_check(objective: &QuarticObjective, gamma: &[Complex64], step: f64) -> f64 {
    let (_, grad) = objective.value_and_gradient(gamma);
    let mut fd = vec![Complex64::new(0.0, 0.0); gamma.len()];
    for j in 0..gamma.len() {
        for (dir, slot) in [(Complex64::new(1.0, 0.0), 0), (Complex64::new(0.0, 1.0), 1)] {
            let mut plus = gamma.to_vec();
            let mut minus = gamma.to_vec();
            plus[j] += dir * step;
            minus[j] -= dir * step;
            let d = (objective.value(&plus) - objective.value(&minus)) / (2.0 * step);
            if slot == 0 {
                fd[j].re = d;
            } else {
                fd[j].im = d;
            }
        }
    }
    let diff: f64 = grad.iter().zip(&fd).map(|(g, f)| (g - f).norm_sqr()).sum::<f64>().sqrt();
    let norm: f64 = grad.iter().map(|g| g.norm_sqr()).sum::<f64>().sqrt();
    diff / norm.max(f64::MIN_POSITIVE)
}

/// Relative tangent-gradient size below which an ascent run counts as converged.
pub const GRADIENT_TOLERANCE: f64 = 1e-8;

/// How an ascent run was started.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RestartSeed {
    /// The standard indicator window, or the flat sequence when `λ ≤ 8`.
    Window,
    /// A unit vector at `q = 0`.
    Delta,
    RandomGaussian,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AscentRun {
    pub index: usize,
    pub seed: RestartSeed,
    pub initial_ratio: f64,
    pub ratio: f64,
    pub iterations: usize,
    pub converged: bool,
    /// `Q` after every accepted step, starting with the initial value.
    pub trajectory: Vec<f64>,
}

impl AscentRun {
    pub fn is_monotone(&self) -> bool {
        self.trajectory.windows(2).all(|w| w[1] >= w[0])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtremizerResult {
    pub lambda: i64,
    pub ell: usize,
    pub mu: f64,
    pub gamma_star: CoeffVector,
    pub ratio: f64,
    pub restarts_used: usize,
    pub best_restart: usize,
    pub converged: bool,
    pub runs: Vec<AscentRun>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AscentConfig {
    pub restarts: usize,
    pub max_iters: usize,
    pub seed: u64,
    pub tol: f64,
}

impl Default for AscentConfig {
    fn default() -> Self {
        Self {
            restarts: 6,
            max_iters: 2000,
            seed: 20240101,
            tol: 1e-10,
        }
    }
}

fn initial_point(lambda: i64, index: usize, seed: u64) -> Result<(RestartSeed, Vec<Complex64>)> {
    let m = lambda.unsigned_abs();
    Ok(match index {
        0 => {
            let gamma = match WindowSpec::standard(m) {
                Ok(spec) => spec.gamma,
                Err(_) => CoeffVector::new(lambda, vec![Complex64::new(1.0, 0.0); m as usize])?,
            };
            (RestartSeed::Window, gamma.as_slice().to_vec())
        }
        1 => (RestartSeed::Delta, CoeffVector::delta(lambda, 0)?.as_slice().to_vec()),
        _ => {
            let mut rng = seeded_rng(seed, index as u64);
            (RestartSeed::RandomGaussian, CoeffVector::random_gaussian(lambda, &mut rng)?.as_slice().to_vec())
        }
    })
}

fn tangent_part(gamma: &[Complex64], v: &[Complex64]) -> Vec<Complex64> {
    let radial = real_dot(gamma, v);
    v.iter().zip(gamma).map(|(g, x)| g - x * radial).collect()
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Ascent on the unit sphere along projected (Riemannian) gradients,
/// combined Polak–Ribière style with the previous direction and reset to the
/// plain gradient whenever that is not an ascent direction. The halving line
/// search only accepts points that increase `Q`, so the trajectory is
/// monotone.
pub fn ascend(objective: &QuarticObjective, start: &[Complex64], max_iters: usize) -> (Vec<Complex64>, bool, Vec<f64>) {
    let mut gamma = start.to_vec();
    normalize(&mut gamma);
    let (mut q, grad) = objective.value_and_gradient(&gamma);
    let mut tangent = tangent_part(&gamma, &grad);
    let mut direction = tangent.clone();
    let mut trajectory = vec![q];
    let mut step = 1.0 / q.max(1.0);
    let mut converged = false;
    for _ in 0..max_iters {
        let tnorm = norm(&tangent);
        if tnorm <= GRADIENT_TOLERANCE * q {
            converged = true;
            break;
        }
        if real_dot(&direction, &tangent) <= 0.0 {
            direction = tangent.clone();
        }
        let mut accepted = None;
        let mut t = step * 2.0;
        for _ in 0..80 {
            let mut trial: Vec<Complex64> = gamma.iter().zip(&direction).map(|(x, d)| x + d * t).collect();
            normalize(&mut trial);
            let (tq, tg) = objective.value_and_gradient(&trial);
            if tq > q {
                accepted = Some((trial, tq, tg));
                break;
            }
            t *= 0.5;
        }
        let Some((next, tq, tg)) = accepted else {
            if direction != tangent {
                // retry along the plain gradient before giving up
                direction = tangent.clone();
                continue;
            }
            // no increase at any step length: a numerical stationary point
            converged = tnorm <= 1e3 * GRADIENT_TOLERANCE * q;
            break;
        };
        let next_tangent = tangent_part(&next, &tg);
        let moved_old = tangent_part(&next, &tangent);
        let moved_dir = tangent_part(&next, &direction);
        let beta = (real_dot(&next_tangent, &next_tangent) - real_dot(&next_tangent, &moved_old)) / (tnorm * tnorm);
        let beta = beta.max(0.0);
        direction = next_tangent.iter().zip(&moved_dir).map(|(g, d)| g + d * beta).collect();
        gamma = next;
        q = tq;
        tangent = next_tangent;
        step = t;
        trajectory.push(q);
    }
    (gamma, converged, trajectory)
}

/// Multi-start ascent; restarts run in parallel and the best ratio wins,
/// ties going to the lower restart index.
pub fn maximize_ratio(lambda: i64, ell: usize, config: &AscentConfig) -> Result<ExtremizerResult> {
    if config.restarts == 0 {
        return Err(Error::InvalidInput("at least one restart is required".into()));
    }
    let objective = QuarticObjective::new(lambda, ell, config.tol)?;
    let outcomes: Vec<(AscentRun, Vec<Complex64>)> = (0..config.restarts)
        .into_par_iter()
        .map(|index| {
            let (seed, start) = initial_point(lambda, index, config.seed)?;
            let (gamma, converged, trajectory) = ascend(&objective, &start, config.max_iters);
            let run = AscentRun {
                index,
                seed,
                initial_ratio: trajectory[0].powf(0.25),
                ratio: trajectory.last().copied().unwrap_or(0.0).powf(0.25),
                iterations: trajectory.len() - 1,
                converged,
                trajectory,
            };
            Ok((run, gamma))
        })
        .collect::<Result<Vec<_>>>()?;
    let best = outcomes
        .iter()
        .enumerate()
        .fold(0, |best, (i, o)| if o.0.ratio > outcomes[best].0.ratio { i } else { best });
    let runs: Vec<AscentRun> = outcomes.iter().map(|o| o.0.clone()).collect();
    Ok(ExtremizerResult {
        lambda,
        ell,
        mu: sector_mu(lambda, ell),
        gamma_star: CoeffVector::new(lambda, outcomes[best].1.clone())?,
        ratio: runs[best].ratio,
        restarts_used: config.restarts,
        best_restart: best,
        converged: runs[best].converged,
        runs,
    })
}

/// `(Σ_{a,b}|S(a,b)|² w_{ab} / ‖γ‖⁴)^{1/4}` for an arbitrary coefficient vector.
pub fn packet_ratio(gamma: &CoeffVector, ell: usize, tol: f64) -> Result<f64> {
    Ok(rhs_lattice_sum(gamma, ell, tol)?.value.powf(0.25) / gamma.norm())
}

/// The frozen constants of the sandwich `c·μ^{1/2} ≤ ratio ≤ C·μ` and the
/// grid they were measured on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub version: u32,
    /// `C_fit`: largest `ratio/μ` on the grid, rounded up.
    pub c_upper: f64,
    /// `c_fit`: smallest `ratio/μ^{1/2}` on the grid, rounded down.
    pub c_lower: f64,
    pub extremizer_lambdas: Vec<i64>,
    pub extremizer_ells: Vec<usize>,
    pub sharpness_lambdas: Vec<u64>,
    pub ascent: AscentConfig,
}

const FROZEN_CALIBRATION: &str = include_str!("../calibration.toml");

impl Calibration {
    /// The calibration shipped with the crate.
    pub fn frozen() -> Self {
        toml::from_str(FROZEN_CALIBRATION).expect("shipped calibration parses")
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidInput(format!("calibration: {e}")))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("calibration serialises")
    }

    /// `C_fit·μ`.
    pub fn ceiling(&self, mu: f64) -> f64 {
        self.c_upper * mu
    }

    /// `c_fit·μ^{1/2}`.
    pub fn floor(&self, mu: f64) -> f64 {
        self.c_lower * mu.sqrt()
    }
}

/// `C_fit·μ` with the frozen `C_fit`.
pub fn bernstein_ceiling(mu: f64) -> f64 {
    Calibration::frozen().ceiling(mu)
}

/// One `(λ, ℓ, μ, ratio)` point of the calibration grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridPoint {
    pub source: &'static str,
    pub lambda: i64,
    pub ell: usize,
    pub mu: f64,
    pub ratio: f64,
    pub converged: bool,
    /// `Σ|𝓛_ℓ|²` to the fourth root, which no unit packet can exceed.
    pub upper_bound: f64,
}

/// Ratios over the calibration grid: extremizer results for every
/// `(λ, ℓ)` cell and the indicator windows of the sharpness family.
pub fn calibration_grid(cal: &Calibration) -> Result<Vec<GridPoint>> {
    let mut cells = Vec::new();
    for &lambda in &cal.extremizer_lambdas {
        for &ell in &cal.extremizer_ells {
            cells.push((lambda, ell));
        }
    }
    let mut points = cells
        .iter()
        .map(|&(lambda, ell)| {
            let r = maximize_ratio(lambda, ell, &cal.ascent)?;
            Ok(GridPoint {
                source: "extremizer",
                lambda,
                ell,
                mu: r.mu,
                ratio: r.ratio,
                converged: r.converged,
                upper_bound: upper_bound_constant(lambda.unsigned_abs(), ell, cal.ascent.tol)?.value.powf(0.25),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let scan = sharpness_scan(&cal.sharpness_lambdas, cal.ascent.tol)?;
    for row in scan.rows {
        points.push(GridPoint {
            source: "indicator",
            lambda: row.lambda as i64,
            ell: 0,
            mu: row.mu,
            ratio: row.ratio,
            converged: true,
            upper_bound: upper_bound_constant(row.lambda, 0, cal.ascent.tol)?.value.powf(0.25),
        });
    }
    Ok(points)
}

/// Recomputes `C_fit` and `c_fit` on the grid of `template`, rounding to
/// three significant decimals outward.
pub fn calibrate(template: &Calibration) -> Result<(Calibration, Vec<GridPoint>)> {
    let points = calibration_grid(template)?;
    let upper = points.iter().map(|p| p.ratio / p.mu).fold(0.0, f64::max);
    let lower = points.iter().map(|p| p.ratio / p.mu.sqrt()).fold(f64::INFINITY, f64::min);
    let mut cal = template.clone();
    cal.c_upper = (upper * 1000.0).ceil() / 1000.0;
    cal.c_lower = (lower * 1000.0).floor() / 1000.0;
    Ok((cal, points))
}

/// `λ(2ℓ+1)` values for the upper-bound growth fit: about `points`
/// log-spaced products up to `m_max`, each realised with `ℓ` cycling through
/// small degrees.
pub fn upper_bound_grid(m_max: u64, points: usize) -> Vec<(u64, usize)> {
    const ELLS: [usize; 6] = [0, 1, 2, 3, 5, 8];
    let mut out: Vec<(u64, usize)> = Vec::new();
    for i in 0..points {
        let target = (m_max as f64).powf(i as f64 / (points - 1) as f64);
        let ell = ELLS[i % ELLS.len()];
        let lambda = ((target / (2 * ell + 1) as f64).round() as u64).max(1);
        if lambda * (2 * ell as u64 + 1) <= m_max && !out.contains(&(lambda, ell)) {
            out.push((lambda, ell));
        }
    }
    out
}

/// `(μ, (Σ|𝓛_ℓ|²)^{1/4})` over [`upper_bound_grid`] and the fitted log–log slope.
pub fn upper_bound_growth(m_max: u64, points: usize, tol: f64) -> Result<(Vec<(u64, usize, f64, f64)>, f64)> {
    let rows = upper_bound_grid(m_max, points)
        .into_iter()
        .map(|(lambda, ell)| {
            let s = upper_bound_constant(lambda, ell, tol)?;
            Ok((lambda, ell, sector_mu(lambda as i64, ell), s.value.powf(0.25)))
        })
        .collect::<Result<Vec<_>>>()?;
    let slope = fit_loglog_slope(&rows.iter().map(|r| (r.2, r.3)).collect::<Vec<_>>())?;
    Ok((rows, slope))
}

/// `Σ_{a,b∈ℤ} e^{−π(a²+b²)}` as the square of the one-dimensional theta sum.
pub fn theta_square() -> f64 {
    let theta: f64 = (-30i64..=30).map(|a| (-PI * (a * a) as f64).exp()).sum();
    theta * theta
}

/// `Q` computed through the full lattice disk (no periodisation), for
/// cross-checking [`QuarticObjective`].
pub fn objective_by_disk(gamma: &CoeffVector, ell: usize, radius: u64) -> f64 {
    let rows = InnerSumRows::new(gamma);
    let m = gamma.modulus() as i64;
    let table: Vec<Vec<f64>> = (0..m).map(|b| rows.row_sqr(b)).collect();
    disk_sum(radius, |a, b| {
        table[b.rem_euclid(m) as usize][a.rem_euclid(m) as usize] * laguerre_weight(m as u64, ell, a, b)
    })
}
