use crate::report::{num, Fields, Report};
use crate::Global;
use clap::Args;
use heisenlab::basis::{
    apply_sublaplacian, apply_sublaplacian_chi, covariance_check, eigenvalue, eval_basis, gram_matrix,
    standard_index_set, BasisIndex, CoeffVector, Eigenvalue,
};
use heisenlab::extremal::{
    maximize_ratio, sharpness_scan, upper_bound_constant, AscentConfig, Calibration, RestartSeed, GRADIENT_TOLERANCE,
};
use heisenlab::group::{GroupElement, UniformGrid};
use heisenlab::key_identity::{identity_residual, identity_residual_general, standard_general_window};
use heisenlab::special_fn::{
    hermite_gram, hermite_laguerre_residual, hermite_with_derivatives, laguerre_all, log_grid,
};
use heisenlab::zygmund::{max_pairs_per_difference, zygmund_certificate, OFF_DIAGONAL_BOUND, RATIO4_BOUND};
use heisenlab::{seeded_rng, Error, Result};
use rand::Rng;
use rayon::prelude::*;
use serde_json::Value;
use std::f64::consts::PI;
use std::path::PathBuf;

/// Relative target for truncated lattice tails; far below any judged tolerance.
const TAIL_TOL: f64 = 1e-12;
/// Truncation of the eigenfunction series.
const SERIES_TOL: f64 = 1e-14;
/// Slack for bounds that hold exactly up to rounding.
const ROUNDING: f64 = 1e-12;

fn nonzero_i64(s: &str) -> std::result::Result<i64, String> {
    let x: i64 = s.parse().map_err(|e| format!("{e}"))?;
    if x == 0 {
        Err("lambda must satisfy λ ≠ 0".into())
    } else {
        Ok(x)
    }
}

fn base_config(g: &Global) -> Fields {
    vec![("tol", num(g.tol)), ("grid", g.grid.into()), ("seed", g.seed.into())]
}

#[derive(Debug, Args)]
pub struct SpecialFnArgs {
    /// Largest Hermite/Laguerre degree.
    #[arg(long, default_value_t = 20)]
    pub ell_max: usize,
}

/// Per degree: `sup_v |𝓛_ℓ(v)|`, `max_v |𝓛_ℓ(v)| v/(2ℓ+1)` on a log grid of
/// `grid` points in `[10⁻³, 10⁴]`, and the relative oscillator residual of
/// `h_ℓ` on `grid` points.
pub fn special_fn(g: &Global, args: &SpecialFnArgs) -> Result<Report> {
    let ell_max = args.ell_max;
    let mut config = base_config(g);
    config.push(("ell_max", ell_max.into()));
    let mut report = Report::new(
        "special-fn",
        config,
        &["ell", "sup_norm", "decay_constant", "oscillator_residual", "tol", "pass"],
    );

    let vs = log_grid(1e-3, 1e4, g.grid);
    let per_v = vs
        .par_iter()
        .map(|&v| laguerre_all(ell_max, v).map(|ls| (v, ls)))
        .collect::<Result<Vec<_>>>()?;
    let mut sup = vec![0.0f64; ell_max + 1];
    let mut decay = vec![(0.0f64, 0.0f64); ell_max + 1];
    for (v, ls) in &per_v {
        for (ell, x) in ls.iter().enumerate() {
            sup[ell] = sup[ell].max(x.abs());
            let c = x.abs() * v / (2 * ell + 1) as f64;
            if c > decay[ell].0 {
                decay[ell] = (c, *v);
            }
        }
    }

    let half = ((2 * ell_max + 1) as f64).sqrt() + 10.0;
    let us = UniformGrid::spanning(-half, half, g.grid);
    let oscillator: Vec<f64> = (0..=ell_max)
        .into_par_iter()
        .map(|ell| {
            let e = (2 * ell + 1) as f64;
            us.points()
                .map(|u| {
                    let (h, _, d2) = hermite_with_derivatives(ell, u);
                    (-d2 + u * u * h - e * h).abs() / e
                })
                .fold(0.0, f64::max)
        })
        .collect();

    for ell in 0..=ell_max {
        let pass = sup[ell] <= 1.0 + ROUNDING && oscillator[ell] < g.tol;
        report.push(vec![
            ell.into(),
            num(sup[ell]),
            num(decay[ell].0),
            num(oscillator[ell]),
            num(g.tol),
            pass.into(),
        ]);
    }

    let (ell_star, &(constant, v_star)) = decay
        .iter()
        .enumerate()
        .max_by(|x, y| x.1 .0.total_cmp(&y.1 .0))
        .expect("at least one degree");
    report.note("decay_constant", num(constant));
    report.note("decay_argmax_ell", ell_star);
    report.note("decay_argmax_v", num(v_star));

    let gram_max = ell_max.min(30);
    let gram = hermite_gram(gram_max, ((2 * gram_max + 1) as f64).sqrt() + 12.0, 4 * g.grid);
    let mut gram_defect = 0.0f64;
    for (i, row) in gram.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            gram_defect = gram_defect.max((x - if i == j { 1.0 } else { 0.0 }).abs());
        }
    }
    report.note("hermite_gram_degrees", gram_max);
    report.note("hermite_gram_defect", num(gram_defect));
    report.note("hermite_gram_tol", num(1e-8));
    report.verdict("hermite_gram_pass", gram_defect < 1e-8);

    const POINTS: [(f64, f64); 4] = [(0.0, 0.0), (1.0, 0.5), (0.0, 2.0), (2.5, -1.0)];
    let transform_max = ell_max.min(10);
    let transform = (0..=transform_max)
        .flat_map(|ell| POINTS.iter().map(move |&(x, y)| hermite_laguerre_residual(ell, x, y, 4 * g.grid)))
        .fold(0.0, f64::max);
    report.note("hermite_laguerre_degrees", transform_max);
    report.note("hermite_laguerre_residual", num(transform));
    report.note("hermite_laguerre_tol", num(1e-8));
    report.verdict("hermite_laguerre_pass", transform < 1e-8);
    Ok(report)
}

#[derive(Debug, Args)]
pub struct KeyIdentityArgs {
    #[arg(long, default_value_t = 3, value_parser = nonzero_i64, allow_hyphen_values = true)]
    pub lambda: i64,
    #[arg(long, default_value_t = 1)]
    pub ell: usize,
    /// Random coefficient vectors to test.
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    /// Use the window (h₂ + h₅)/√2 with quadrature matrix coefficients.
    #[arg(long)]
    pub general_window: bool,
}

pub fn key_identity(g: &Global, args: &KeyIdentityArgs) -> Result<Report> {
    let window_label = if args.general_window { "(h2+h5)/sqrt2" } else { "hermite" };
    let mut config = base_config(g);
    config.extend([
        ("lambda", args.lambda.into()),
        ("ell", args.ell.into()),
        ("trials", args.trials.into()),
        ("window", window_label.into()),
        ("tail_tol", num(TAIL_TOL)),
    ]);
    let mut report = Report::new(
        "key-identity",
        config,
        &[
            "trial",
            "lambda",
            "ell",
            "lhs",
            "rhs",
            "residual",
            "truncation_radius",
            "tail_bound",
            "doubling_change",
            "tol",
            "pass",
        ],
    );
    let general = if args.general_window {
        Some(standard_general_window(args.lambda)?)
    } else {
        None
    };
    let mut worst = 0.0f64;
    for trial in 0..args.trials {
        let mut rng = seeded_rng(g.seed, trial as u64);
        let gamma = CoeffVector::random_gaussian(args.lambda, &mut rng)?;
        let check = match &general {
            Some(w) => identity_residual_general(&gamma, w, TAIL_TOL, g.grid)?,
            None => identity_residual(&gamma, args.ell, TAIL_TOL, g.grid)?,
        };
        worst = worst.max(check.residual);
        let ell = if general.is_some() { Value::Null } else { args.ell.into() };
        report.push(vec![
            trial.into(),
            args.lambda.into(),
            ell,
            num(check.lhs.value),
            num(check.rhs.value),
            num(check.residual),
            check.rhs.truncation_radius.into(),
            num(check.rhs.tail_bound),
            num(check.lhs.doubling_change),
            num(g.tol),
            (check.residual < g.tol).into(),
        ]);
    }
    report.note("max_residual", num(worst));
    Ok(report)
}

#[derive(Debug, Args)]
pub struct ZygmundArgs {
    #[arg(long, default_value_t = 100)]
    pub n_max: u64,
    /// Random coefficient vectors per circle.
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
}

pub fn zygmund(g: &Global, args: &ZygmundArgs) -> Result<Report> {
    let mut config = base_config(g);
    config.extend([("n_max", args.n_max.into()), ("trials", args.trials.into())]);
    let mut report = Report::new(
        "zygmund",
        config,
        &[
            "n",
            "r2",
            "max_ratio4",
            "ratio4_bound",
            "max_off_diagonal",
            "off_diagonal_bound",
            "max_pairs",
            "pairs_bound",
            "tol",
            "pass",
        ],
    );
    let cert = zygmund_certificate(args.n_max, args.trials, g.seed);
    let pairs: Vec<usize> = cert.rows.par_iter().map(|r| max_pairs_per_difference(r.n)).collect();
    for (row, &p) in cert.rows.iter().zip(&pairs) {
        let pass =
            row.max_ratio4 <= RATIO4_BOUND + ROUNDING && row.max_off_diagonal <= OFF_DIAGONAL_BOUND + ROUNDING && p <= 2;
        report.push(vec![
            row.n.into(),
            row.r2.into(),
            num(row.max_ratio4),
            num(RATIO4_BOUND),
            num(row.max_off_diagonal),
            num(OFF_DIAGONAL_BOUND),
            p.into(),
            2.into(),
            num(ROUNDING),
            pass.into(),
        ]);
    }
    report.note("circles", cert.rows.len());
    report.note("max_ratio4", num(cert.max_ratio4));
    report.note("violations", cert.violations);
    Ok(report)
}

#[derive(Debug, Args)]
pub struct SharpnessArgs {
    /// Smallest λ; the scan doubles λ up to `--lambda-max`.
    #[arg(long, default_value_t = 128)]
    pub lambda_min: u64,
    #[arg(long, default_value_t = 16384)]
    pub lambda_max: u64,
}

pub fn sharpness(g: &Global, args: &SharpnessArgs) -> Result<Report> {
    if args.lambda_min == 0 || args.lambda_min > args.lambda_max {
        return Err(Error::InvalidInput(format!(
            "need 0 < lambda-min <= lambda-max, got {} and {}",
            args.lambda_min, args.lambda_max
        )));
    }
    let cal = Calibration::frozen();
    let mut config = base_config(g);
    config.extend([
        ("lambda_min", args.lambda_min.into()),
        ("lambda_max", args.lambda_max.into()),
        ("tail_tol", num(TAIL_TOL)),
        ("c_upper", num(cal.c_upper)),
        ("c_lower", num(cal.c_lower)),
    ]);
    let mut report = Report::new(
        "sharpness",
        config,
        &["lambda", "a", "mu", "ratio", "rhs", "lemma_bound", "floor", "ceiling", "tail_bound", "tol", "pass"],
    );
    let lambdas: Vec<u64> = std::iter::successors(Some(args.lambda_min), |&l| l.checked_mul(2))
        .take_while(|&l| l <= args.lambda_max)
        .collect();
    let scan = sharpness_scan(&lambdas, TAIL_TOL)?;
    for row in &scan.rows {
        let (floor, ceiling) = (cal.floor(row.mu), cal.ceiling(row.mu));
        let pass = row.rhs >= row.lemma_bound
            && floor <= row.ratio
            && row.ratio <= ceiling
            && row.tail_bound <= g.tol * row.rhs;
        report.push(vec![
            row.lambda.into(),
            row.a.into(),
            num(row.mu),
            num(row.ratio),
            num(row.rhs),
            num(row.lemma_bound),
            num(floor),
            num(ceiling),
            num(row.tail_bound),
            num(g.tol),
            pass.into(),
        ]);
    }
    report.note("skipped", scan.skipped.clone());
    report.note("fit_lambda_min", scan.fit_lambda_min);
    report.note("slope", num(scan.fitted_slope));
    report.note("slope_min", num(scan.slope_window.0));
    report.note("slope_max", num(scan.slope_window.1));
    let in_window = scan.slope_window.0 <= scan.fitted_slope && scan.fitted_slope <= scan.slope_window.1;
    report.verdict("slope_pass", in_window);
    Ok(report)
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long, default_value_t = 30.0)]
    pub mu_max: f64,
}

/// `(μ, multiplicity)` for every eigenfunction family found by scanning
/// `(λ, ℓ)` and `ω` directly and comparing eigenvalues in floating point.
fn scanned_spectrum(mu_max: f64) -> Vec<(f64, u64)> {
    let mu2 = mu_max * mu_max * (1.0 + 1e-12);
    let mut out = Vec::new();
    let lam_max = (mu2 / (2.0 * PI)) as i64;
    for lambda in 1..=lam_max {
        for ell in 0.. {
            let e = 2.0 * PI * lambda as f64 * (2 * ell + 1) as f64;
            if e > mu2 {
                break;
            }
            out.push((e.sqrt(), 2 * lambda as u64));
        }
    }
    let w_max = (mu_max / (2.0 * PI)).ceil() as i64;
    for w1 in -w_max..=w_max {
        for w2 in -w_max..=w_max {
            let e = 4.0 * PI * PI * (w1 * w1 + w2 * w2) as f64;
            if e > 0.0 && e <= mu2 {
                out.push((e.sqrt(), 1));
            }
        }
    }
    out.sort_by(|x, y| x.0.total_cmp(&y.0));
    out
}

pub fn spectrum(g: &Global, args: &SpectrumArgs) -> Result<Report> {
    const MATCH: f64 = 1e-12;
    let mut config = base_config(g);
    config.push(("mu_max", num(args.mu_max)));
    let mut report = Report::new(
        "spectrum",
        config,
        &[
            "mu",
            "mu_squared",
            "kind",
            "key",
            "sectors",
            "torus_points",
            "multiplicity",
            "scanned_multiplicity",
            "tol",
            "pass",
        ],
    );
    let lines = heisenlab::basis::enumerate_spectrum(args.mu_max)?;
    let scanned = scanned_spectrum(args.mu_max);
    let mut accounted = 0u64;
    for line in &lines {
        let (kind, key) = match line.eigenvalue {
            Eigenvalue::Sector { m } => ("sector", m),
            Eigenvalue::Torus { n } => ("torus", n),
        };
        let lo = scanned.partition_point(|p| p.0 < line.mu * (1.0 - MATCH));
        let hi = scanned.partition_point(|p| p.0 <= line.mu * (1.0 + MATCH));
        let brute: u64 = scanned[lo..hi].iter().map(|p| p.1).sum();
        accounted += brute;
        let sectors = line
            .lambda_sectors
            .iter()
            .map(|(l, e)| format!("{l}:{e}"))
            .collect::<Vec<_>>()
            .join(" ");
        report.push(vec![
            num(line.mu),
            num(line.eigenvalue.mu_squared()),
            kind.into(),
            key.into(),
            sectors.into(),
            line.torus_points.len().into(),
            line.multiplicity().into(),
            brute.into(),
            num(MATCH),
            (brute == line.multiplicity()).into(),
        ]);
    }
    let total: u64 = scanned.iter().map(|p| p.1).sum();
    report.note("lines", lines.len());
    report.verdict("all_scanned_lines_listed", accounted == total);
    if let Some(first) = lines.first() {
        report.note("first_mu", num(first.mu));
        report.verdict("first_mu_is_sqrt_2pi", (first.mu - (2.0 * PI).sqrt()).abs() < MATCH);
    }
    Ok(report)
}

#[derive(Debug, Args)]
pub struct ExtremizeArgs {
    #[arg(long, default_value_t = 8, value_parser = nonzero_i64, allow_hyphen_values = true)]
    pub lambda: i64,
    #[arg(long, default_value_t = 0)]
    pub ell: usize,
    #[arg(long, default_value_t = 6)]
    pub restarts: usize,
    #[arg(long, default_value_t = 2000)]
    pub max_iters: usize,
}

pub fn extremize(g: &Global, args: &ExtremizeArgs) -> Result<Report> {
    let ascent = AscentConfig {
        restarts: args.restarts.max(1),
        max_iters: args.max_iters,
        seed: g.seed,
        tol: TAIL_TOL,
    };
    let cal = Calibration::frozen();
    let mut config = base_config(g);
    config.extend([
        ("lambda", args.lambda.into()),
        ("ell", args.ell.into()),
        ("restarts", ascent.restarts.into()),
        ("max_iters", ascent.max_iters.into()),
        ("tail_tol", num(TAIL_TOL)),
        ("gradient_tol", num(GRADIENT_TOLERANCE)),
    ]);
    let mut report = Report::new(
        "extremize",
        config,
        &["restart", "start", "initial_ratio", "ratio", "iterations", "converged", "monotone", "tol", "pass"],
    );
    let result = maximize_ratio(args.lambda, args.ell, &ascent)?;
    let bound = upper_bound_constant(args.lambda.unsigned_abs(), args.ell, TAIL_TOL)?.value.powf(0.25);
    for run in &result.runs {
        let start = match run.seed {
            RestartSeed::Window => "window",
            RestartSeed::Delta => "delta",
            RestartSeed::RandomGaussian => "gaussian",
        };
        let pass = run.is_monotone() && run.ratio <= bound * (1.0 + 1e-9);
        report.push(vec![
            run.index.into(),
            start.into(),
            num(run.initial_ratio),
            num(run.ratio),
            run.iterations.into(),
            run.converged.into(),
            run.is_monotone().into(),
            num(GRADIENT_TOLERANCE),
            pass.into(),
        ]);
    }
    let (floor, ceiling) = (cal.floor(result.mu), cal.ceiling(result.mu));
    report.note("mu", num(result.mu));
    report.note("ratio", num(result.ratio));
    report.note("best_restart", result.best_restart);
    report.note("upper_bound", num(bound));
    report.note("floor", num(floor));
    report.note("ceiling", num(ceiling));
    report.verdict("sandwich_pass", floor <= result.ratio && result.ratio <= ceiling);
    report.note("converged", result.converged);
    let gamma: Vec<Value> = result
        .gamma_star
        .as_slice()
        .iter()
        .map(|z| Value::Array(vec![num(z.re), num(z.im)]))
        .collect();
    report.note("gamma_star", gamma);
    if !result.converged {
        report.nonconvergence();
    }
    Ok(report)
}

#[derive(Debug, Args)]
pub struct BasisArgs {
    #[arg(long, default_value_t = 3)]
    pub lambda_max: i64,
    #[arg(long, default_value_t = 3)]
    pub ell_max: usize,
    #[arg(long, default_value_t = 2)]
    pub omega_radius: i64,
    /// Midpoint grid per (a, b) axis for the Gram matrix (doubled as a check).
    #[arg(long, default_value_t = 32, value_parser = crate::power_of_two)]
    pub ab_grid: usize,
    /// Random points per index for the eigen-equation and covariance checks.
    #[arg(long, default_value_t = 100)]
    pub points: usize,
}

const GRAM_TOL: f64 = 1e-8;
const EIGEN_TOL: f64 = 1e-6;
const COVARIANCE_TOL: f64 = 1e-5;

fn random_point(rng: &mut impl Rng) -> GroupElement {
    GroupElement::new(rng.random(), rng.random(), rng.random())
}

fn index_checks(idx: BasisIndex, points: usize, seed: u64, stream: u64) -> Result<(f64, f64)> {
    let mut rng = seeded_rng(seed, stream);
    let e = eigenvalue(idx);
    let mut residual = 0.0f64;
    let mut scale = 0.0f64;
    let mut covariance = 0.0f64;
    for _ in 0..points {
        let p = random_point(&mut rng);
        let value = eval_basis(idx, p, SERIES_TOL)?;
        let applied = match idx {
            BasisIndex::Sector(s) => apply_sublaplacian(s, p, SERIES_TOL)?,
            BasisIndex::Torus(t) => apply_sublaplacian_chi(t, p),
        };
        residual = residual.max((applied - value * e).norm());
        scale = scale.max(value.norm());
        if let BasisIndex::Sector(s) = idx {
            let shift = rng.random_range(1..=s.lambda().abs());
            let (x, y) = covariance_check(s, shift, p, SERIES_TOL)?;
            covariance = covariance.max(x).max(y);
        }
    }
    Ok((residual / (e.max(1.0) * scale.max(f64::MIN_POSITIVE)), covariance))
}

pub fn basis(g: &Global, args: &BasisArgs) -> Result<Report> {
    let mut config = base_config(g);
    config.extend([
        ("lambda_max", args.lambda_max.into()),
        ("ell_max", args.ell_max.into()),
        ("omega_radius", args.omega_radius.into()),
        ("ab_grid", args.ab_grid.into()),
        ("points", args.points.into()),
    ]);
    let mut report = Report::new(
        "basis",
        config,
        &[
            "lambda",
            "q",
            "ell",
            "omega1",
            "omega2",
            "eigenvalue",
            "gram_defect",
            "gram_tol",
            "eigen_residual",
            "eigen_tol",
            "covariance",
            "covariance_tol",
            "pass",
        ],
    );
    let indices = standard_index_set(args.lambda_max, args.ell_max, args.omega_radius);
    let gram = gram_matrix(&indices, args.ab_grid, SERIES_TOL)?;
    let checks = indices
        .par_iter()
        .enumerate()
        .map(|(i, &idx)| index_checks(idx, args.points, g.seed, i as u64))
        .collect::<Result<Vec<_>>>()?;
    for (i, (&idx, &(residual, covariance))) in indices.iter().zip(&checks).enumerate() {
        let defect = gram.matrix[i]
            .iter()
            .enumerate()
            .map(|(j, z)| (z - if i == j { 1.0 } else { 0.0 }).norm())
            .fold(0.0, f64::max);
        let (lambda, q, ell, w1, w2): (Value, Value, Value, Value, Value) = match idx {
            BasisIndex::Sector(s) => (s.lambda().into(), s.q().into(), s.ell().into(), Value::Null, Value::Null),
            BasisIndex::Torus(t) => (Value::Null, Value::Null, Value::Null, t.omega.0.into(), t.omega.1.into()),
        };
        let pass = defect < GRAM_TOL && residual < EIGEN_TOL && covariance < COVARIANCE_TOL;
        report.push(vec![
            lambda,
            q,
            ell,
            w1,
            w2,
            num(eigenvalue(idx)),
            num(defect),
            num(GRAM_TOL),
            num(residual),
            num(EIGEN_TOL),
            num(covariance),
            num(COVARIANCE_TOL),
            pass.into(),
        ]);
    }
    report.note("indices", indices.len());
    report.note("gram_defect", num(gram.identity_defect()));
    report.note("gram_doubling_change", num(gram.doubling_change));
    report.verdict("gram_resolved", !gram.underresolved);
    Ok(report)
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    /// Write the refitted calibration file here.
    #[arg(long)]
    pub write: Option<PathBuf>,
}

const CALIBRATION_HEADER: &str = "\
# Frozen constants of the sandwich c_lower * sqrt(mu) <= ratio <= c_upper * mu.
# Regenerate with `heisenlab calibrate --write crates/core/calibration.toml`.
";

pub fn calibrate(g: &Global, args: &CalibrateArgs) -> Result<Report> {
    let template = Calibration::frozen();
    let mut config = base_config(g);
    config.extend([
        ("extremizer_lambdas", template.extremizer_lambdas.clone().into()),
        ("extremizer_ells", template.extremizer_ells.clone().into()),
        ("sharpness_lambdas", template.sharpness_lambdas.clone().into()),
        ("ascent_seed", template.ascent.seed.into()),
        ("ascent_restarts", template.ascent.restarts.into()),
        ("ascent_max_iters", template.ascent.max_iters.into()),
    ]);
    let mut report = Report::new(
        "calibrate",
        config,
        &["source", "lambda", "ell", "mu", "ratio", "upper_bound", "ratio_over_mu", "ratio_over_sqrt_mu", "converged", "tol", "pass"],
    );
    let (cal, points) = heisenlab::extremal::calibrate(&template)?;
    let mut converged = true;
    for p in &points {
        converged &= p.converged;
        let pass = p.ratio <= p.upper_bound * (1.0 + 1e-9);
        report.push(vec![
            p.source.into(),
            p.lambda.into(),
            p.ell.into(),
            num(p.mu),
            num(p.ratio),
            num(p.upper_bound),
            num(p.ratio / p.mu),
            num(p.ratio / p.mu.sqrt()),
            p.converged.into(),
            num(1e-9),
            pass.into(),
        ]);
    }
    report.note("c_upper", num(cal.c_upper));
    report.note("c_lower", num(cal.c_lower));
    report.note("frozen_c_upper", num(template.c_upper));
    report.note("frozen_c_lower", num(template.c_lower));
    if let Some(path) = &args.write {
        std::fs::write(path, format!("{CALIBRATION_HEADER}{}", cal.to_toml()))
            .map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display())))?;
        report.note("written", path.display().to_string());
    }
    if !converged {
        report.nonconvergence();
    }
    Ok(report)
}
