//! The explicit orthonormal eigenbasis of the sub-Laplacian
//! `L_M = −(A_M² + B_M²)` on `M = Γ\H₁`.
//!
//! Two families:
//!
//! - torus characters `χ_ω(a,b,c) = e^{2πi ω·(a,b)}`, eigenvalue `4π²|ω|²`;
//! - BWZ images
//!   `h_{λ,q,ℓ}(a,b,c) = (√|λ|/λ) Σ_k e^{−2πiqk/λ} e^{2πi(λc+kb)} h_{ℓ,λ}(k/λ + a)`,
//!   eigenvalue `2π|λ|(2ℓ+1)`.
//!
//! Eigenvalues are compared through the exact integers `m = |λ|(2ℓ+1)` and
//! `n = |ω|²`, never through floating `μ`.

use crate::group::GroupElement;
use crate::quadrature::midpoints;
use crate::special_fn::RescaledHermite;
use crate::zygmund::circle_lattice_points;
use crate::{Error, Result, TAU};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;

/// Label `(λ, q, ℓ)` of `h_{λ,q,ℓ}`, with `q` stored in `[0, |λ|)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SectorIndex {
    lambda: i64,
    q: u64,
    ell: usize,
}

impl SectorIndex {
    /// Any integer `q` is accepted and reduced modulo `|λ|`.
    pub fn new(lambda: i64, q: i64, ell: usize) -> Result<Self> {
        if lambda == 0 {
            return Err(Error::ZeroLambda);
        }
        let modulus = lambda.unsigned_abs() as i64;
        Ok(Self {
            lambda,
            q: q.rem_euclid(modulus) as u64,
            ell,
        })
    }

    pub fn lambda(&self) -> i64 {
        self.lambda
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    /// `m = |λ|(2ℓ+1)`, so that the eigenvalue is `2πm`.
    pub fn m(&self) -> u64 {
        self.lambda.unsigned_abs() * (2 * self.ell as u64 + 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct TorusIndex {
    pub omega: (i64, i64),
}

impl TorusIndex {
    pub fn new(w1: i64, w2: i64) -> Self {
        Self { omega: (w1, w2) }
    }

    /// `n = |ω|²`, so that the eigenvalue is `4π²n`.
    pub fn n(&self) -> u64 {
        (self.omega.0 * self.omega.0 + self.omega.1 * self.omega.1) as u64
    }
}

/// Any element of the eigenbasis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum BasisIndex {
    Torus(TorusIndex),
    Sector(SectorIndex),
}

impl BasisIndex {
    /// Central frequency: `λ` for sector functions, `0` for characters.
    pub fn central_frequency(&self) -> i64 {
        match self {
            BasisIndex::Torus(_) => 0,
            BasisIndex::Sector(s) => s.lambda,
        }
    }

    pub fn eigenvalue_key(&self) -> Eigenvalue {
        match self {
            BasisIndex::Torus(t) => Eigenvalue::Torus { n: t.n() },
            BasisIndex::Sector(s) => Eigenvalue::Sector { m: s.m() },
        }
    }
}

impl From<SectorIndex> for BasisIndex {
    fn from(s: SectorIndex) -> Self {
        BasisIndex::Sector(s)
    }
}

impl From<TorusIndex> for BasisIndex {
    fn from(t: TorusIndex) -> Self {
        BasisIndex::Torus(t)
    }
}

/// An eigenvalue of `L_M`, keyed exactly: `2πm` or `4π²n`.
///
/// The two kinds never coincide for `μ > 0`, since `2πm = 4π²n` would make
/// `π` rational.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Eigenvalue {
    Sector { m: u64 },
    Torus { n: u64 },
}

impl Eigenvalue {
    /// The eigenvalue of `L_M`, that is `μ²`.
    pub fn mu_squared(&self) -> f64 {
        match *self {
            Eigenvalue::Sector { m } => TAU * m as f64,
            Eigenvalue::Torus { n } => TAU * TAU * n as f64,
        }
    }

    /// The eigenvalue `μ` of `√L_M`.
    pub fn mu(&self) -> f64 {
        self.mu_squared().sqrt()
    }

    /// Recognises `μ` as a point of the spectrum, to relative precision
    /// `1e-9` on `μ²`; `None` when `μ` is not an eigenvalue.
    pub fn from_mu(mu: f64) -> Option<Eigenvalue> {
        if !(mu >= 0.0) {
            return None;
        }
        let mu2 = mu * mu;
        let close = |x: f64| (x - mu2).abs() <= 1e-9 * mu2.max(1.0);
        let m = (mu2 / TAU).round();
        if m >= 1.0 && close(TAU * m) {
            return Some(Eigenvalue::Sector { m: m as u64 });
        }
        let n = (mu2 / (TAU * TAU)).round();
        if n >= 0.0 && close(TAU * TAU * n) && (n > 0.0 || mu == 0.0) {
            return Some(Eigenvalue::Torus { n: n as u64 });
        }
        None
    }
}

/// Packet coefficients `γ_q`, `q ∈ ℤ/λℤ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoeffVector {
    lambda: i64,
    gamma: Vec<Complex64>,
}

impl CoeffVector {
    pub fn new(lambda: i64, gamma: Vec<Complex64>) -> Result<Self> {
        if lambda == 0 {
            return Err(Error::ZeroLambda);
        }
        let expected = lambda.unsigned_abs() as usize;
        if gamma.len() != expected {
            return Err(Error::CoefficientLength {
                expected,
                got: gamma.len(),
            });
        }
        Ok(Self { lambda, gamma })
    }

    pub fn zeros(lambda: i64) -> Result<Self> {
        Self::new(lambda, vec![Complex64::new(0.0, 0.0); lambda.unsigned_abs() as usize])
    }

    /// Real and imaginary parts independent standard normals.
    pub fn random_gaussian(lambda: i64, rng: &mut impl Rng) -> Result<Self> {
        let n = lambda.unsigned_abs() as usize;
        let gamma = (0..n)
            .map(|_| {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                Complex64::new(re, im)
            })
            .collect();
        Self::new(lambda, gamma)
    }

    /// The unit vector at `q`.
    pub fn delta(lambda: i64, q: i64) -> Result<Self> {
        let mut v = Self::zeros(lambda)?;
        let m = v.modulus() as i64;
        v.gamma[q.rem_euclid(m) as usize] = Complex64::new(1.0, 0.0);
        Ok(v)
    }

    pub fn lambda(&self) -> i64 {
        self.lambda
    }

    /// `|λ|`, the length of the sequence.
    pub fn modulus(&self) -> usize {
        self.gamma.len()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.gamma
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.gamma
    }

    /// `γ_q` with `q` taken modulo `|λ|`.
    pub fn at(&self, q: i64) -> Complex64 {
        self.gamma[q.rem_euclid(self.gamma.len() as i64) as usize]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.gamma.iter().map(|g| g.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        Self {
            lambda: self.lambda,
            gamma: self.gamma.iter().map(|g| g * s).collect(),
        }
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        self.scaled(Complex64::new(1.0 / n, 0.0))
    }
}

/// Line function fed to the BWZ transform.
#[derive(Debug, Clone, PartialEq)]
pub enum Window {
    Hermite(RescaledHermite),
    /// `Σ cⱼ h_{ℓⱼ,λ}` with real weights.
    Combination(Vec<(f64, RescaledHermite)>),
}

impl Window {
    pub fn hermite(ell: usize, lambda: i64) -> Result<Self> {
        Ok(Window::Hermite(RescaledHermite::new(ell, lambda)?))
    }

    /// `Σ wⱼ h_{ℓⱼ,λ}` normalised to unit `L²` norm (the `h_{ℓ,λ}` are
    /// orthonormal, so the norm is that of the weight vector).
    pub fn normalized_combination(lambda: i64, terms: &[(usize, f64)]) -> Result<Self> {
        let norm = terms.iter().map(|(_, w)| w * w).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidInput("window combination has zero norm".into()));
        }
        let parts = terms
            .iter()
            .map(|&(ell, w)| Ok((w / norm, RescaledHermite::new(ell, lambda)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Window::Combination(parts))
    }

    pub fn value(&self, u: f64) -> f64 {
        match self {
            Window::Hermite(h) => h.value(u),
            Window::Combination(parts) => parts.iter().map(|(w, h)| w * h.value(u)).sum(),
        }
    }

    /// `(h, h′, h″)`.
    pub fn with_derivatives(&self, u: f64) -> (f64, f64, f64) {
        match self {
            Window::Hermite(h) => h.with_derivatives(u),
            Window::Combination(parts) => parts.iter().fold((0.0, 0.0, 0.0), |acc, (w, h)| {
                let (v, d1, d2) = h.with_derivatives(u);
                (acc.0 + w * v, acc.1 + w * d1, acc.2 + w * d2)
            }),
        }
    }

    pub fn support_radius(&self, tol: f64) -> f64 {
        match self {
            Window::Hermite(h) => h.support_radius(tol),
            Window::Combination(parts) => parts
                .iter()
                .map(|(_, h)| h.support_radius(tol))
                .fold(0.0, f64::max),
        }
    }

    /// Largest Hermite degree present.
    pub fn max_degree(&self) -> usize {
        match self {
            Window::Hermite(h) => h.ell(),
            Window::Combination(parts) => parts.iter().map(|(_, h)| h.ell()).max().unwrap_or(0),
        }
    }
}

/// `e^{−2πi·num/λ}` computed from `num mod |λ|` to keep the phase exact.
fn root_of_unity(num: i64, lambda: i64) -> Complex64 {
    let m = lambda.unsigned_abs() as i64;
    let r = (num as i128).rem_euclid(m as i128) as f64;
    Complex64::from_polar(1.0, -TAU * lambda.signum() as f64 * r / m as f64)
}

/// A finite sector packet `Σ_q γ_q BWZ_{λ,q}(w)` evaluated through its
/// series in `k`.
///
/// The `q`-sum collapses to a function of `k mod λ`:
/// `Ĝ(k) = (√|λ|/λ) Σ_q γ_q e^{−2πiqk/λ}`, so one evaluation costs one pass
/// over the `k` with `|k/λ + a|` inside the window support.
#[derive(Debug, Clone)]
pub struct SectorPacket {
    lambda: i64,
    window: Window,
    by_residue: Vec<Complex64>,
    radius: f64,
}

impl SectorPacket {
    pub fn new(coeffs: &CoeffVector, window: Window, tol: f64) -> Result<Self> {
        let lambda = coeffs.lambda();
        let m = coeffs.modulus();
        let prefactor = lambda.signum() as f64 / (m as f64).sqrt();
        let by_residue = (0..m as i64)
            .map(|r| {
                coeffs
                    .as_slice()
                    .iter()
                    .enumerate()
                    .map(|(q, g)| g * root_of_unity(q as i64 * r, lambda))
                    .sum::<Complex64>()
                    * prefactor
            })
            .collect();
        Ok(Self::from_residues(lambda, window, by_residue, tol))
    }

    fn from_residues(lambda: i64, window: Window, by_residue: Vec<Complex64>, tol: f64) -> Self {
        // Terms are spaced 1/|λ| apart; the tail sum is bounded by roughly
        // |λ| times the largest omitted term.
        let radius = window.support_radius(tol / (lambda.unsigned_abs() as f64 + 1.0));
        Self {
            lambda,
            window,
            by_residue,
            radius,
        }
    }

    /// The single eigenfunction `h_{λ,q,ℓ}`.
    pub fn basis_function(idx: SectorIndex, tol: f64) -> Result<Self> {
        Self::new(
            &CoeffVector::delta(idx.lambda, idx.q as i64)?,
            Window::hermite(idx.ell, idx.lambda)?,
            tol,
        )
    }

    /// The Deninger–Singhof function `g_{λ,r,ℓ}`: only `k ≡ r (mod λ)` terms,
    /// each with unit weight.
    pub fn deninger_singhof(lambda: i64, r: i64, ell: usize, tol: f64) -> Result<Self> {
        let window = Window::hermite(ell, lambda)?;
        let m = lambda.unsigned_abs() as i64;
        let mut by_residue = vec![Complex64::new(0.0, 0.0); m as usize];
        by_residue[r.rem_euclid(m) as usize] = Complex64::new(1.0, 0.0);
        Ok(Self::from_residues(lambda, window, by_residue, tol))
    }

    pub fn lambda(&self) -> i64 {
        self.lambda
    }

    /// Inclusive range of `k` with `|k/λ + a| ≤ radius`.
    pub fn k_range(&self, a: f64) -> (i64, i64) {
        let l = self.lambda as f64;
        let x = l * (-self.radius - a);
        let y = l * (self.radius - a);
        (x.min(y).ceil() as i64, x.max(y).floor() as i64)
    }

    /// Largest `|k|` used for any `a ∈ [0, 1]`: the `b`-bandwidth.
    pub fn bandwidth(&self) -> u64 {
        let (lo0, hi0) = self.k_range(0.0);
        let (lo1, hi1) = self.k_range(1.0);
        [lo0, hi0, lo1, hi1].iter().map(|k| k.unsigned_abs()).max().unwrap_or(0)
    }

    /// Upper bound on the number of `k` terms in any row.
    pub fn max_row_span(&self) -> usize {
        (2.0 * self.lambda.unsigned_abs() as f64 * self.radius).floor() as usize + 2
    }

    /// `(k_lo, [Ĝ(k) w(k/λ + a) for k = k_lo..=k_hi])`: the `b`-Fourier
    /// coefficients of the row at `a`.
    pub fn row_coefficients(&self, a: f64) -> (i64, Vec<Complex64>) {
        let (lo, hi) = self.k_range(a);
        let inv = 1.0 / self.lambda as f64;
        let coeffs = (lo..=hi)
            .map(|k| self.residue(k) * self.window.value(k as f64 * inv + a))
            .collect();
        (lo, coeffs)
    }

    fn residue(&self, k: i64) -> Complex64 {
        self.by_residue[k.rem_euclid(self.by_residue.len() as i64) as usize]
    }

    fn series(&self, a: f64, b: f64, mut term: impl FnMut(f64) -> f64) -> Complex64 {
        let (lo, hi) = self.k_range(a);
        let inv = 1.0 / self.lambda as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for k in lo..=hi {
            let coeff = self.residue(k);
            if coeff == Complex64::new(0.0, 0.0) {
                continue;
            }
            let w = term(k as f64 * inv + a);
            if w != 0.0 {
                acc += coeff * Complex64::from_polar(w, TAU * (k as f64) * b);
            }
        }
        acc
    }

    /// Value at `(a, b, 0)`.
    pub fn value_ab(&self, a: f64, b: f64) -> Complex64 {
        self.series(a, b, |u| self.window.value(u))
    }

    pub fn value(&self, p: GroupElement) -> Complex64 {
        self.value_ab(p.a, p.b) * self.central_phase(p.c)
    }

    fn central_phase(&self, c: f64) -> Complex64 {
        Complex64::from_polar(1.0, TAU * self.lambda as f64 * c)
    }

    /// `L_M` applied term by term: `A_M = ∂_a` hits the window, and
    /// `B_M = ∂_b + a∂_c` multiplies each term by `2πi(k + λa)`, so every
    /// term picks up `−w″(u) + (2πλu)² w(u)` at `u = k/λ + a`.
    pub fn sublaplacian(&self, p: GroupElement) -> Complex64 {
        let l = self.lambda as f64;
        self.series(p.a, p.b, |u| {
            let (v, _, d2) = self.window.with_derivatives(u);
            let k = TAU * l * u;
            -d2 + k * k * v
        }) * self.central_phase(p.c)
    }
}

pub fn eval_chi(omega: TorusIndex, p: GroupElement) -> Complex64 {
    let (w1, w2) = omega.omega;
    Complex64::from_polar(1.0, TAU * (w1 as f64 * p.a + w2 as f64 * p.b))
}

/// `L_M χ_ω` from the phase derivatives: `A_M² ↦ (2πiω₁)²`, `B_M² ↦ (2πiω₂)²`.
pub fn apply_sublaplacian_chi(omega: TorusIndex, p: GroupElement) -> Complex64 {
    let (w1, w2) = omega.omega;
    let da = Complex64::new(0.0, TAU * w1 as f64);
    let db = Complex64::new(0.0, TAU * w2 as f64);
    -(da * da + db * db) * eval_chi(omega, p)
}

/// `h_{λ,q,ℓ}(p)` with series tail below roughly `tol`.
pub fn eval_h(idx: SectorIndex, p: GroupElement, tol: f64) -> Result<Complex64> {
    Ok(SectorPacket::basis_function(idx, tol)?.value(p))
}

/// `g_{λ,r,ℓ}(p) = e^{2πi(λc+rb)} Σ_{k₁} e^{2πiλk₁b} h_{ℓ,λ}(a + r/λ + k₁)`.
pub fn eval_g_ds(lambda: i64, r: i64, ell: usize, p: GroupElement, tol: f64) -> Result<Complex64> {
    Ok(SectorPacket::deninger_singhof(lambda, r, ell, tol)?.value(p))
}

pub fn eval_basis(idx: BasisIndex, p: GroupElement, tol: f64) -> Result<Complex64> {
    match idx {
        BasisIndex::Torus(t) => Ok(eval_chi(t, p)),
        BasisIndex::Sector(s) => eval_h(s, p, tol),
    }
}

/// `2π|λ|(2ℓ+1)` or `4π²|ω|²`.
pub fn eigenvalue(idx: BasisIndex) -> f64 {
    idx.eigenvalue_key().mu_squared()
}

/// `(L_M h_{λ,q,ℓ})(p)` by term-wise differentiation of the series.
pub fn apply_sublaplacian(idx: SectorIndex, p: GroupElement, tol: f64) -> Result<Complex64> {
    Ok(SectorPacket::basis_function(idx, tol)?.sublaplacian(p))
}

/// Deviations in the two translation covariance identities of
/// `BWZ_{λ,q₀}`:
///
/// - right translation by `(q/λ, 0, 0)` multiplies by `e^{−2πiqb} e^{2πiq₀q/λ}`;
/// - right translation by `(0, q/λ, 0)` gives `e^{2πiqa} BWZ_{λ,q₀−q}`.
pub fn covariance_check(
    idx: SectorIndex,
    q_shift: i64,
    p: GroupElement,
    tol: f64,
) -> Result<(f64, f64)> {
    let lambda = idx.lambda;
    let shift = q_shift as f64 / lambda as f64;
    let base = eval_h(idx, p, tol)?;

    let moved_a = eval_h(idx, p * GroupElement::new(shift, 0.0, 0.0), tol)?;
    let phase_a = Complex64::from_polar(1.0, -TAU * q_shift as f64 * p.b)
        * root_of_unity(-(idx.q as i64) * q_shift, lambda);
    let first = (moved_a - phase_a * base).norm();

    let moved_b = eval_h(idx, p * GroupElement::new(0.0, shift, 0.0), tol)?;
    let other = SectorIndex::new(lambda, idx.q as i64 - q_shift, idx.ell)?;
    let phase_b = Complex64::from_polar(1.0, TAU * q_shift as f64 * p.a);
    let second = (moved_b - phase_b * eval_h(other, p, tol)?).norm();
    Ok((first, second))
}

/// Gram matrix of basis functions by tensor midpoint quadrature on `[0,1)³`.
#[derive(Debug, Clone, Serialize)]
pub struct GramResult {
    pub matrix: Vec<Vec<Complex64>>,
    /// Largest entry change when the `(a,b)` grid is doubled.
    pub doubling_change: f64,
    pub underresolved: bool,
}

impl GramResult {
    /// Largest deviation from the identity matrix.
    pub fn identity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, row) in self.matrix.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((v - want).norm());
            }
        }
        worst
    }
}

pub const GRID_DOUBLING_TOLERANCE: f64 = 1e-6;

/// Samples a basis function on the midpoint grid `n_ab × n_ab × n_c`.
///
/// The central variable enters the series only through the common factor
/// `e^{2πiλc}`, so each `(a,b)` column is summed once and then rotated.
pub fn sample_basis(idx: BasisIndex, n_ab: usize, n_c: usize, tol: f64) -> Result<Vec<Complex64>> {
    let ab = midpoints(n_ab);
    let cs = midpoints(n_c);
    let packet = match idx {
        BasisIndex::Sector(s) => Some(SectorPacket::basis_function(s, tol)?),
        BasisIndex::Torus(_) => None,
    };
    let lambda = idx.central_frequency();
    let rot: Vec<Complex64> = cs
        .iter()
        .map(|&c| Complex64::from_polar(1.0, TAU * lambda as f64 * c))
        .collect();
    let mut out = Vec::with_capacity(n_ab * n_ab * n_c);
    for &a in &ab {
        for &b in &ab {
            let base = match (&packet, idx) {
                (Some(p), _) => p.value_ab(a, b),
                (None, BasisIndex::Torus(t)) => eval_chi(t, GroupElement::new(a, b, 0.0)),
                (None, BasisIndex::Sector(_)) => unreachable!(),
            };
            out.extend(rot.iter().map(|r| base * r));
        }
    }
    Ok(out)
}

fn gram_at(indices: &[BasisIndex], n_ab: usize, n_c: usize, tol: f64) -> Result<Vec<Vec<Complex64>>> {
    let samples = indices
        .par_iter()
        .map(|&idx| sample_basis(idx, n_ab, n_c, tol))
        .collect::<Result<Vec<_>>>()?;
    let volume = (n_ab * n_ab * n_c) as f64;
    Ok(samples
        .par_iter()
        .map(|f| {
            samples
                .iter()
                .map(|g| {
                    crate::quadrature::pairwise_sum_complex(
                        &f.iter().zip(g).map(|(x, y)| x * y.conj()).collect::<Vec<_>>(),
                    ) / volume
                })
                .collect()
        })
        .collect())
}

/// `L²(M)` inner products `(e_i, e_j)` of the given basis functions.
///
/// The `c` grid has more points than twice the largest `|λ|`, which makes
/// the central integral exact for every pair; the `(a,b)` grid is run at
/// `grid_n` and `2·grid_n` and the larger result is returned.
pub fn gram_matrix(indices: &[BasisIndex], grid_n: usize, tol: f64) -> Result<GramResult> {
    let max_lambda = indices
        .iter()
        .map(|i| i.central_frequency().unsigned_abs())
        .max()
        .unwrap_or(0) as usize;
    let n_c = 2 * max_lambda + 2;
    let coarse = gram_at(indices, grid_n, n_c, tol)?;
    let fine = gram_at(indices, 2 * grid_n, n_c, tol)?;
    let mut change = 0.0f64;
    for (r0, r1) in coarse.iter().zip(&fine) {
        for (x, y) in r0.iter().zip(r1) {
            change = change.max((x - y).norm());
        }
    }
    Ok(GramResult {
        matrix: fine,
        doubling_change: change,
        underresolved: change > GRID_DOUBLING_TOLERANCE,
    })
}

/// All sector indices with `|λ| ≤ lambda_max`, `ℓ ≤ ell_max` and every `q`,
/// followed by all characters with `|ω| ≤ omega_radius`.
pub fn standard_index_set(lambda_max: i64, ell_max: usize, omega_radius: i64) -> Vec<BasisIndex> {
    let mut out = Vec::new();
    for lambda in -lambda_max..=lambda_max {
        if lambda == 0 {
            continue;
        }
        for q in 0..lambda.abs() {
            for ell in 0..=ell_max {
                out.push(SectorIndex::new(lambda, q, ell).expect("nonzero").into());
            }
        }
    }
    for w1 in -omega_radius..=omega_radius {
        for w2 in -omega_radius..=omega_radius {
            if w1 * w1 + w2 * w2 <= omega_radius * omega_radius {
                out.push(TorusIndex::new(w1, w2).into());
            }
        }
    }
    out
}

/// One eigenvalue `μ` of `√L_M` with its eigenspace decomposition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralLine {
    pub mu: f64,
    pub eigenvalue: Eigenvalue,
    /// `(λ, ℓ)` pairs with `2π|λ|(2ℓ+1) = μ²`; each carries `|λ|` functions.
    pub lambda_sectors: Vec<(i64, usize)>,
    /// `ω` with `4π²|ω|² = μ²`.
    pub torus_points: Vec<(i64, i64)>,
}

impl SpectralLine {
    pub fn multiplicity(&self) -> u64 {
        self.lambda_sectors
            .iter()
            .map(|(l, _)| l.unsigned_abs())
            .sum::<u64>()
            + self.torus_points.len() as u64
    }
}

/// `(λ, ℓ)` with `|λ|(2ℓ+1) = m`: `λ = ±d` for every divisor `d` with `m/d` odd.
pub fn sectors_for(m: u64) -> Vec<(i64, usize)> {
    let mut divisors = Vec::new();
    let mut d = 1u64;
    while d * d <= m {
        if m % d == 0 {
            divisors.push(d);
            divisors.push(m / d);
        }
        d += 1;
    }
    divisors.sort_unstable();
    divisors.dedup();
    let mut out: Vec<(i64, usize)> = divisors
        .into_iter()
        .filter(|d| (m / d) % 2 == 1)
        .flat_map(|d| {
            let ell = ((m / d - 1) / 2) as usize;
            [(-(d as i64), ell), (d as i64, ell)]
        })
        .collect();
    out.sort_unstable();
    out
}

/// All spectral lines with `0 < μ ≤ mu_max`, in increasing order.
pub fn enumerate_spectrum(mu_max: f64) -> Result<Vec<SpectralLine>> {
    if !(mu_max > 0.0) {
        return Err(Error::InvalidInput(format!("mu_max must be positive, got {mu_max}")));
    }
    let mu2 = mu_max * mu_max * (1.0 + 1e-12);
    let m_max = (mu2 / TAU).floor() as u64;
    let n_max = (mu2 / (TAU * TAU)).floor() as u64;
    let mut lines: Vec<SpectralLine> = (1..=m_max)
        .into_par_iter()
        .map(|m| {
            let key = Eigenvalue::Sector { m };
            SpectralLine {
                mu: key.mu(),
                eigenvalue: key,
                lambda_sectors: sectors_for(m),
                torus_points: Vec::new(),
            }
        })
        .collect();
    lines.extend((1..=n_max).filter_map(|n| {
        let pts = circle_lattice_points(n).points;
        (!pts.is_empty()).then(|| {
            let key = Eigenvalue::Torus { n };
            SpectralLine {
                mu: key.mu(),
                eigenvalue: key,
                lambda_sectors: Vec::new(),
                torus_points: pts,
            }
        })
    }));
    lines.sort_by(|x, y| x.mu.total_cmp(&y.mu));
    Ok(lines)
}

/// A finite expansion `Σ c_i e_i` in the eigenbasis.
pub type Expansion = BTreeMap<BasisIndex, Complex64>;

/// Coefficient-space `ℓ²` norm, equal to the `L²(M)` norm by orthonormality.
pub fn expansion_norm(f: &Expansion) -> f64 {
    f.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// `Pr_λ`: keeps the terms of central frequency `λ` (characters for `λ = 0`).
pub fn project_pr_lambda(f: &Expansion, lambda: i64) -> Expansion {
    f.iter()
        .filter(|(idx, _)| idx.central_frequency() == lambda)
        .map(|(i, c)| (*i, *c))
        .collect()
}

/// `Π_μ`: keeps the terms whose eigenvalue is exactly `eig`.
pub fn project_pi_mu(f: &Expansion, eig: Eigenvalue) -> Expansion {
    f.iter()
        .filter(|(idx, _)| idx.eigenvalue_key() == eig)
        .map(|(i, c)| (*i, *c))
        .collect()
}

/// `Π_μ` for a real `μ`; zero when `μ` is not in the spectrum.
pub fn project_pi_mu_real(f: &Expansion, mu: f64) -> Expansion {
    match Eigenvalue::from_mu(mu) {
        Some(eig) => project_pi_mu(f, eig),
        None => Expansion::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const TOL: f64 = 1e-13;

    fn random_point(rng: &mut ChaCha8Rng) -> GroupElement {
        GroupElement::new(
            rng.random_range(-1.5..1.5),
            rng.random_range(-1.5..1.5),
            rng.random_range(-1.5..1.5),
        )
    }

    #[test]
    fn index_canonicalisation() {
        let s = SectorIndex::new(-3, 7, 2).unwrap();
        assert_eq!(s.q(), 1);
        assert_eq!(SectorIndex::new(5, -1, 0).unwrap().q(), 4);
        assert_eq!(SectorIndex::new(0, 0, 0), Err(Error::ZeroLambda));
    }

    #[test]
    fn characters() {
        let p = GroupElement::new(0.25, 0.9, 0.1);
        assert_eq!(eval_chi(TorusIndex::new(0, 0), p), Complex64::new(1.0, 0.0));
        assert!((eval_chi(TorusIndex::new(1, 0), p) - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        let shifted = GroupElement::new(1.0, 1.0, 1.0) * p;
        let w = TorusIndex::new(3, -2);
        assert!((eval_chi(w, p) - eval_chi(w, shifted)).norm() < 1e-12);
        let lap = apply_sublaplacian_chi(w, p);
        assert!((lap - eigenvalue(w.into()) * eval_chi(w, p)).norm() < 1e-10);
    }

    #[test]
    fn eigenvalue_examples() {
        use core::f64::consts::PI;
        let e = |l, q, ell| eigenvalue(SectorIndex::new(l, q, ell).unwrap().into());
        assert!((e(1, 0, 0) - 2.0 * PI).abs() < 1e-14);
        assert!((eigenvalue(TorusIndex::new(1, 0).into()) - 4.0 * PI * PI).abs() < 1e-13);
        assert!((e(-3, 1, 2) - 30.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn gamma_invariance_of_sector_functions() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..300 {
            let lambda = *[-4i64, -3, -1, 1, 2, 3, 5].get(rng.random_range(0..7)).unwrap();
            let idx = SectorIndex::new(lambda, rng.random_range(0..10), rng.random_range(0..5)).unwrap();
            let p = random_point(&mut rng);
            let g0 = GroupElement::new(
                rng.random_range(-3..=3) as f64,
                rng.random_range(-3..=3) as f64,
                rng.random_range(-3..=3) as f64,
            );
            let v = eval_h(idx, p, TOL).unwrap();
            let w = eval_h(idx, g0 * p, TOL).unwrap();
            assert!((v - w).norm() < 1e-9, "{idx:?} {p:?} {g0:?}: {v} vs {w}");
        }
    }

    #[test]
    fn central_behaviour() {
        let idx = SectorIndex::new(3, 2, 1).unwrap();
        let (a, b, c) = (0.31, 0.77, 0.42);
        let full = eval_h(idx, GroupElement::new(a, b, c), TOL).unwrap();
        let flat = eval_h(idx, GroupElement::new(a, b, 0.0), TOL).unwrap();
        let phase = Complex64::from_polar(1.0, TAU * 3.0 * c);
        assert!((full - phase * flat).norm() < 1e-12);
    }

    #[test]
    fn deninger_singhof_change_of_basis() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for &lambda in &[1i64, 2, -3, 4] {
            let m = lambda.abs();
            for ell in [0usize, 2] {
                for q in 0..m {
                    let p = random_point(&mut rng);
                    let h = eval_h(SectorIndex::new(lambda, q, ell).unwrap(), p, TOL).unwrap();
                    let mut sum = Complex64::new(0.0, 0.0);
                    for r in 0..m {
                        sum += root_of_unity(q * r, lambda) * eval_g_ds(lambda, r, ell, p, TOL).unwrap();
                    }
                    sum *= lambda.signum() as f64 / (m as f64).sqrt();
                    assert!((h - sum).norm() < 1e-10, "lambda={lambda} q={q}");
                }
            }
        }
        // λ = 1: a single r, and g coincides with h.
        let p = GroupElement::new(0.2, 0.4, 0.6);
        let h = eval_h(SectorIndex::new(1, 0, 3).unwrap(), p, TOL).unwrap();
        assert!((h - eval_g_ds(1, 0, 3, p, TOL).unwrap()).norm() < 1e-12);
    }

    #[test]
    fn deninger_singhof_eigenfunctions() {
        let p = GroupElement::new(0.37, 0.12, 0.5);
        for &(lambda, r, ell) in &[(2i64, 1i64, 1usize), (-3, 2, 0), (4, 3, 3)] {
            let packet = SectorPacket::deninger_singhof(lambda, r, ell, TOL).unwrap();
            let eig = TAU * lambda.unsigned_abs() as f64 * (2 * ell + 1) as f64;
            let res = (packet.sublaplacian(p) - eig * packet.value(p)).norm();
            assert!(res < 1e-6 * eig, "residual {res}");
        }
    }

    #[test]
    fn sublaplacian_eigen_equation() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for lambda in [-4i64, -2, -1, 1, 2, 3, 4] {
            for ell in 0..=6 {
                let idx = SectorIndex::new(lambda, rng.random_range(0..4), ell).unwrap();
                let eig = eigenvalue(idx.into());
                for _ in 0..20 {
                    let p = random_point(&mut rng);
                    let lhs = apply_sublaplacian(idx, p, TOL).unwrap();
                    let rhs = eig * eval_h(idx, p, TOL).unwrap();
                    assert!((lhs - rhs).norm() < 1e-6 * eig, "{idx:?}");
                }
            }
        }
        let idx = SectorIndex::new(1, 0, 0).unwrap();
        let p = GroupElement::new(0.4, 0.3, 0.0);
        let lhs = apply_sublaplacian(idx, p, TOL).unwrap();
        assert!((lhs - eigenvalue(idx.into()) * eval_h(idx, p, TOL).unwrap()).norm() < 1e-8);
    }

    #[test]
    fn covariance_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let idx = SectorIndex::new(3, 1, 2).unwrap();
        let p = random_point(&mut rng);
        assert_eq!(covariance_check(idx, 0, p, TOL).unwrap(), (0.0, 0.0));
        let (first, _) = covariance_check(idx, 3, p, TOL).unwrap();
        assert!(first < 1e-11);
        for _ in 0..100 {
            let lambda = [-5i64, -2, 1, 3, 4][rng.random_range(0..5)];
            let idx = SectorIndex::new(lambda, rng.random_range(-6..6), rng.random_range(0..4)).unwrap();
            let (r1, r2) = covariance_check(idx, rng.random_range(-7..7), random_point(&mut rng), TOL).unwrap();
            assert!(r1 < 1e-10 && r2 < 1e-10, "{idx:?}: {r1} {r2}");
        }
    }

    #[test]
    fn gram_small_examples() {
        let s = |l, q, ell| BasisIndex::from(SectorIndex::new(l, q, ell).unwrap());
        let idx = vec![
            s(1, 0, 0),
            s(2, 0, 0),
            s(2, 1, 0),
            TorusIndex::new(1, 0).into(),
        ];
        let g = gram_matrix(&idx, 32, TOL).unwrap();
        assert!(!g.underresolved, "change {}", g.doubling_change);
        assert!(g.identity_defect() < 1e-8, "defect {}", g.identity_defect());
    }

    #[test]
    fn divisor_sectors() {
        assert_eq!(sectors_for(1), vec![(-1, 0), (1, 0)]);
        assert_eq!(sectors_for(3), vec![(-3, 0), (-1, 1), (1, 1), (3, 0)]);
        assert_eq!(sectors_for(4), vec![(-4, 0), (4, 0)]);
        assert_eq!(sectors_for(9), vec![(-9, 0), (-3, 1), (-1, 4), (1, 4), (3, 1), (9, 0)]);
    }

    /// Counts raw triples `(λ, q, ℓ)` and characters directly.
    fn brute_multiplicities(mu_max: f64) -> BTreeMap<Eigenvalue, u64> {
        let mut out = BTreeMap::new();
        let m_max = (mu_max * mu_max / TAU) as i64;
        for lambda in -m_max..=m_max {
            if lambda == 0 {
                continue;
            }
            for _q in 0..lambda.abs() {
                for ell in 0..=m_max as usize {
                    let m = lambda.unsigned_abs() * (2 * ell as u64 + 1);
                    if TAU * (m as f64) <= mu_max * mu_max {
                        *out.entry(Eigenvalue::Sector { m }).or_insert(0) += 1;
                    }
                }
            }
        }
        let w = (mu_max / TAU) as i64 + 1;
        for w1 in -w..=w {
            for w2 in -w..=w {
                let n = (w1 * w1 + w2 * w2) as u64;
                if n > 0 && TAU * TAU * n as f64 <= mu_max * mu_max {
                    *out.entry(Eigenvalue::Torus { n }).or_insert(0) += 1;
                }
            }
        }
        out
    }

    #[test]
    fn spectrum_matches_brute_force() {
        let mu_max = 30.0;
        let lines = enumerate_spectrum(mu_max).unwrap();
        let brute = brute_multiplicities(mu_max);
        assert_eq!(lines.len(), brute.len());
        for line in &lines {
            assert_eq!(Some(&line.multiplicity()), brute.get(&line.eigenvalue), "{line:?}");
            assert!(line.lambda_sectors.is_empty() || line.torus_points.is_empty());
            for &(l, ell) in &line.lambda_sectors {
                assert!((TAU * l.unsigned_abs() as f64 * (2 * ell + 1) as f64 - line.mu * line.mu).abs() < 1e-9);
            }
        }
        for w in lines.windows(2) {
            assert!(w[0].mu < w[1].mu);
        }
        assert!((lines[0].mu - TAU.sqrt()).abs() < 1e-14);
        assert_eq!(lines[0].multiplicity(), 2);
        let six_pi = lines.iter().find(|l| l.eigenvalue == Eigenvalue::Sector { m: 3 }).unwrap();
        assert_eq!(six_pi.multiplicity(), 8);
        assert!((six_pi.mu - (3.0 * TAU).sqrt()).abs() < 1e-13);
        let torus = lines.iter().find(|l| l.eigenvalue == Eigenvalue::Torus { n: 1 }).unwrap();
        assert_eq!(torus.multiplicity(), 4);
        assert!((torus.mu - TAU).abs() < 1e-14);
    }

    #[test]
    fn eigenvalue_recognition() {
        assert_eq!(Eigenvalue::from_mu((6.0 * core::f64::consts::PI).sqrt()), Some(Eigenvalue::Sector { m: 3 }));
        assert_eq!(Eigenvalue::from_mu(TAU * 5f64.sqrt()), Some(Eigenvalue::Torus { n: 5 }));
        assert_eq!(Eigenvalue::from_mu(3.0), None);
    }

    fn random_expansion(rng: &mut ChaCha8Rng) -> Expansion {
        let mut f = Expansion::new();
        for idx in standard_index_set(4, 4, 3) {
            if rng.random_bool(0.5) {
                f.insert(idx, Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
            }
        }
        f
    }

    #[test]
    fn projectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let f = random_expansion(&mut rng);
            let only2 = project_pr_lambda(&f, 2);
            assert_eq!(project_pr_lambda(&only2, 2), only2);
            let torus = project_pr_lambda(&f, 0);
            assert!(torus.keys().all(|k| matches!(k, BasisIndex::Torus(_))));
            for l in -4..=4 {
                assert!(expansion_norm(&project_pr_lambda(&f, l)) <= expansion_norm(&f) + 1e-15);
            }
            assert!(project_pi_mu_real(&f, 3.0).is_empty());
            let eig = Eigenvalue::Sector { m: 3 };
            let p = project_pi_mu(&f, eig);
            let want: f64 = f
                .iter()
                .filter(|(k, _)| eigenvalue(**k) == eig.mu_squared() && k.eigenvalue_key() == eig)
                .map(|(_, c)| c.norm_sqr())
                .sum();
            assert!((expansion_norm(&p).powi(2) - want).abs() < 1e-14);
            for l in -4..=4 {
                for e in [eig, Eigenvalue::Torus { n: 2 }, Eigenvalue::Sector { m: 9 }] {
                    assert_eq!(
                        project_pi_mu(&project_pr_lambda(&f, l), e),
                        project_pr_lambda(&project_pi_mu(&f, e), l)
                    );
                }
            }
        }
    }
}
