//! ε-inflation curves r(ε) = ρ(M + ε·B_V), Hölder-at-zero fits, and the
//! increment inequality check.
//!
//! Lower bounds come from finite inner approximations of M + ε·B_V built
//! from structured and random unit elements of V. Upper bounds combine two
//! sound schemes: an expansion of products of (A + εB) into runs of
//! unperturbed products, and single-step scaled ∞/1-norms in flag
//! coordinates.

use serde::{Deserialize, Serialize};

use crate::bounds::{bracket_from_scan, lower_bound_with, scan_products, BoundsBracket};
use crate::error::{JsrError, Result};
use crate::matrix::{Matrix, C64};
use crate::random;
use crate::reducibility::{maximal_flag, DEFAULT_TOL};
use crate::set::{balanced_hull, Ball, Budget, MatrixSet};

pub const POINTS_PER_DECADE: usize = 12;
pub const DECADES: usize = 3;

/// Minimum resolvable points per fit window.
const MIN_FIT_POINTS: usize = 4;
/// A point is resolvable when its bracket width is at most this fraction of
/// its distance from r(0).
const RESOLUTION: f64 = 0.20;

/// Geometric grid of `count` points from `min` to `max` inclusive.
pub fn geometric_grid(min: f64, max: f64, count: usize) -> Result<Vec<f64>> {
    if !(min > 0.0 && max >= min && max.is_finite()) || count == 0 {
        return Err(JsrError::invalid("geometric grid needs 0 < min ≤ max and count ≥ 1"));
    }
    if count == 1 {
        return Ok(vec![min]);
    }
    let ratio = (max / min).ln() / (count - 1) as f64;
    Ok((0..count)
        .map(|i| {
            if i + 1 == count {
                max
            } else {
                min * (ratio * i as f64).exp()
            }
        })
        .collect())
}

/// 12 points per decade over [1e-4, 1e-1].
pub fn default_grid() -> Vec<f64> {
    geometric_grid(1e-4, 1e-1, POINTS_PER_DECADE * DECADES + 1).expect("valid constants")
}

/// Parses `geo:<min>:<max>:<count>` or a comma-separated list of values.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let bad = || JsrError::invalid(format!("cannot parse grid '{spec}'"));
    if let Some(rest) = spec.strip_prefix("geo:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let min: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let max: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
        return geometric_grid(min, max, count);
    }
    let values: Vec<f64> = spec
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| bad())?;
    validate_grid(&values)?;
    Ok(values)
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(JsrError::invalid("grid is empty"));
    }
    if grid.iter().any(|e| !(*e >= 0.0 && e.is_finite())) {
        return Err(JsrError::invalid("grid values must be finite and nonnegative"));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(JsrError::invalid("grid must be strictly increasing"));
    }
    Ok(())
}

/// Tuning knobs for [`inflation_curve_with`].
#[derive(Debug, Clone)]
pub struct InflationOptions {
    /// Budget for the unperturbed enumeration.
    pub budget: Budget,
    /// Budget for each inner-approximation enumeration; limits its depth.
    pub lower_budget: Budget,
    pub random_candidates: usize,
    pub seed: u64,
    /// Longest product length used by the expansion bound.
    pub horizon: usize,
}

impl Default for InflationOptions {
    fn default() -> Self {
        InflationOptions {
            budget: Budget::default(),
            lower_budget: Budget(500_000),
            random_candidates: 8,
            seed: 0x1ef1_a7e0,
            horizon: 256,
        }
    }
}

/// Brackets of r(ε) on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct InflationCurve {
    pub base: MatrixSet,
    pub ball: Ball,
    pub grid: Vec<f64>,
    /// One bracket per grid point. `depth_n` is the enumeration depth of the
    /// inner approximation, and the witness indexes that approximation.
    pub values: Vec<BoundsBracket>,
    pub depth_n: usize,
    /// Bracket of r(0) = ρ(M) at depth n.
    pub base_bracket: BoundsBracket,
}

impl InflationCurve {
    /// CSV with columns epsilon, lower, upper, depth_n.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| JsrError::Numerical(format!("csv: {e}"));
        w.write_record(["epsilon", "lower", "upper", "depth_n"]).map_err(io)?;
        for (e, b) in self.grid.iter().zip(&self.values) {
            w.write_record([e.to_string(), b.lower.to_string(), b.upper.to_string(), b.depth_n.to_string()])
                .map_err(io)?;
        }
        w.flush().map_err(|e| JsrError::Numerical(e.to_string()))?;
        let bytes = w.into_inner().map_err(|e| JsrError::Numerical(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }
}

pub fn inflation_curve(set: &MatrixSet, ball: &Ball, grid: &[f64], n: usize) -> Result<InflationCurve> {
    inflation_curve_with(set, ball, grid, n, &InflationOptions::default())
}

pub fn inflation_curve_with(
    set: &MatrixSet,
    ball: &Ball,
    grid: &[f64],
    n: usize,
    opts: &InflationOptions,
) -> Result<InflationCurve> {
    validate_grid(grid)?;
    if ball.dim() != set.dim() {
        return Err(JsrError::DimensionMismatch {
            expected: set.dim(),
            found: ball.dim(),
        });
    }
    if opts.horizon < n {
        return Err(JsrError::invalid("expansion horizon must be at least the depth"));
    }
    let scan = scan_products(set, n, opts.budget, false, &[])?;
    let base_bracket = bracket_from_scan(&scan, n, &[]);
    let growth = extend_submultiplicative(&scan.max_norm, opts.horizon);
    let flag = maximal_flag(set, DEFAULT_TOL)?;
    let rotated: Vec<Matrix> = set.members().iter().map(|a| a.conjugate_by(flag.w())).collect();
    let mut block_of = Vec::with_capacity(set.dim());
    for (b, &s) in flag.block_sizes().iter().enumerate() {
        block_of.extend(std::iter::repeat(b as i32).take(s));
    }
    let candidates = candidate_directions(set, ball, opts);

    let mut values = Vec::with_capacity(grid.len());
    for &eps in grid {
        if eps == 0.0 {
            values.push(base_bracket.clone());
            continue;
        }
        let inner = MatrixSet::new(
            set.members()
                .iter()
                .zip(&candidates)
                .flat_map(|(a, dirs)| dirs.iter().map(move |b| a.add_scaled(eps, b)))
                .collect(),
        )?;
        let depth = opts.lower_budget.max_depth(inner.len(), n).max(1);
        let (lower, witness) = lower_bound_with(&inner, depth, opts.lower_budget)?;
        let c = ball.spectral_bound();
        let (mut upper, mut tag) = (expansion_bound(&growth, eps * c), "inflation-expansion");
        let scaled = scaled_norm_bound(&rotated, &block_of, eps * c);
        if scaled < upper {
            upper = scaled;
            tag = "inflation-scaled";
        }
        values.push(BoundsBracket {
            lower,
            upper,
            depth_n: depth,
            witness,
            norm_tag: tag.into(),
        });
    }
    // r is nondecreasing, so any upper bound at a larger ε also holds here
    for i in (0..values.len().saturating_sub(1)).rev() {
        if values[i + 1].upper < values[i].upper {
            values[i].upper = values[i + 1].upper;
            values[i].norm_tag = format!("{} (monotone)", values[i + 1].norm_tag);
        }
    }
    Ok(InflationCurve {
        base: set.clone(),
        ball: ball.clone(),
        grid: grid.to_vec(),
        values,
        depth_n: n,
        base_bracket,
    })
}

/// Unit elements of V tried as perturbations of each member.
fn candidate_directions(set: &MatrixSet, ball: &Ball, opts: &InflationOptions) -> Vec<Vec<Matrix>> {
    let d = set.dim();
    let mut rng = random::seeded(opts.seed);
    let mut shared: Vec<Matrix> = Vec::new();
    shared.extend(ball.unit_element(&Matrix::identity(d)));
    for i in 0..d {
        for j in 0..d {
            shared.extend(ball.unit_element(&Matrix::unit(d, i, j)));
        }
    }
    let mut added = 0;
    let mut attempts = 0;
    while added < opts.random_candidates && attempts < 10 * opts.random_candidates + 10 {
        attempts += 1;
        let coeffs: Vec<C64> = (0..ball.subspace_dim())
            .map(|_| C64::new(random::gaussian(&mut rng), random::gaussian(&mut rng)))
            .collect();
        if let Some(b) = ball.unit_element(&ball.combine(&coeffs)) {
            shared.push(b);
            added += 1;
        }
    }
    set.members()
        .iter()
        .map(|a| {
            let mut dirs = shared.clone();
            dirs.extend(ball.unit_element(a));
            dirs.extend(adjoint_direction(a).and_then(|b| ball.unit_element(&b)));
            dirs
        })
        .collect()
}

/// Direction B maximizing the first-order growth of the dominant eigenvalue
/// modulus: B ∝ phase · y xᴴ with x, y right and left eigenvectors.
fn adjoint_direction(a: &Matrix) -> Option<Matrix> {
    let d = a.dim();
    let lambda = a
        .eigenvalues()
        .into_iter()
        .max_by(|p, q| p.norm().total_cmp(&q.norm()))?;
    let shifted = a.sub(&Matrix::identity(d).scale_c(lambda));
    let x = shifted.null_vector();
    let y = shifted.adjoint().null_vector();
    let yx: C64 = y.iter().zip(&x).map(|(yi, xi)| yi.conj() * xi).sum();
    if yx.norm() < 1e-12 {
        return None;
    }
    let rot = if lambda.norm() > 0.0 { lambda / lambda.norm() } else { C64::new(1.0, 0.0) };
    let phase = rot * yx / yx.norm();
    Some(Matrix::outer(&y, &x).scale_c(phase))
}

/// Extends max-norm data a_1..a_n to a_1..a_H by a_j ≤ min_i a_i·a_{j−i}.
fn extend_submultiplicative(max_norm: &[f64], horizon: usize) -> Vec<f64> {
    let mut a = Vec::with_capacity(horizon + 1);
    a.push(1.0);
    a.extend_from_slice(max_norm);
    for j in a.len()..=horizon {
        let best = (1..j).map(|i| a[i] * a[j - i]).fold(f64::INFINITY, f64::min);
        a.push(best);
    }
    a
}

/// Upper bound on ρ(M + ε·B_V) from expanding every product of length k
/// at its last perturbed factor: g_k = a_k + Σ_j a_j · ε · g_{k−1−j}.
fn expansion_bound(a: &[f64], eps: f64) -> f64 {
    let s = a[1] + eps;
    if s == 0.0 {
        return 0.0;
    }
    // normalize by s^k so nothing overflows
    let alpha: Vec<f64> = a.iter().enumerate().map(|(j, &x)| x / s.powi(j as i32)).collect();
    let e = eps / s;
    let mut g = vec![1.0f64];
    let mut best = f64::INFINITY;
    for k in 1..a.len() {
        let mut v = alpha[k];
        for j in 0..k {
            v += alpha[j] * e * g[k - 1 - j];
        }
        // each g_k^{1/k} bounds ρ on its own; stop before subnormals
        // destroy the relative accuracy
        if v < 1e-280 {
            break;
        }
        g.push(v);
        best = best.min(v.powf(1.0 / k as f64));
    }
    s * best
}

/// max over members of a row (or column) scaled norm of A + εB in flag
/// coordinates with block weights t_i = δ^{block(i)}, minimized over δ.
fn scaled_norm_bound(rotated: &[Matrix], block_of: &[i32], eps: f64) -> f64 {
    let d = block_of.len();
    let bound = |log_delta: f64, rows: bool| -> f64 {
        let t: Vec<f64> = block_of.iter().map(|&b| (b as f64 * log_delta).exp()).collect();
        (0..d)
            .map(|i| {
                let ratio = |j: usize| if rows { t[j] / t[i] } else { t[i] / t[j] };
                let entry = |a: &Matrix, j: usize| if rows { a.get(i, j) } else { a.get(j, i) };
                let base = rotated
                    .iter()
                    .map(|a| (0..d).map(|j| entry(a, j).norm() * ratio(j)).sum::<f64>())
                    .fold(0.0, f64::max);
                let pert = (0..d).map(|j| ratio(j).powi(2)).sum::<f64>().sqrt();
                base + eps * pert
            })
            .fold(0.0, f64::max)
    };
    let mut best = f64::INFINITY;
    for rows in [true, false] {
        // each bound is convex in log δ
        let (mut lo, mut hi) = (-40.0f64, 40.0f64);
        for _ in 0..200 {
            let m1 = lo + (hi - lo) / 3.0;
            let m2 = hi - (hi - lo) / 3.0;
            if bound(m1, rows) <= bound(m2, rows) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        best = best.min(bound(0.5 * (lo + hi), rows)).min(bound(0.0, rows));
    }
    best
}

/// Least-squares fit of log(r(ε) − r(0)) against log ε.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolderFit {
    pub alpha_hat: f64,
    pub c_hat: f64,
    pub fit_window: (f64, f64),
    /// RMS of the log-log residuals.
    pub residual: f64,
    pub points: usize,
}

/// Fits the Hölder exponent at ε = 0 on the first decade of ε that holds
/// at least four resolvable points.
pub fn fit_holder_at_zero(curve: &InflationCurve) -> Result<HolderFit> {
    let points: Vec<(f64, f64, f64)> = curve
        .grid
        .iter()
        .zip(&curve.values)
        .map(|(&e, b)| (e, b.lower, b.upper))
        .collect();
    fit_holder_points(&points, curve.base_bracket.midpoint())
}

/// Same fit from raw (ε, lower, upper) rows and r(0).
pub fn fit_holder_points(points: &[(f64, f64, f64)], r0: f64) -> Result<HolderFit> {
    let resolvable: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.0 > 0.0)
        .filter_map(|&(e, lo, hi)| {
            let rise = 0.5 * (lo + hi) - r0;
            (rise > 0.0 && hi - lo <= RESOLUTION * rise).then_some((e, rise))
        })
        .collect();
    for (start, &(e0, _)) in resolvable.iter().enumerate() {
        let window: Vec<(f64, f64)> = resolvable[start..]
            .iter()
            .copied()
            .take_while(|&(e, _)| e <= 10.0 * e0 * (1.0 + 1e-9))
            .collect();
        if window.len() < MIN_FIT_POINTS {
            continue;
        }
        let xs: Vec<f64> = window.iter().map(|p| p.0.ln()).collect();
        let ys: Vec<f64> = window.iter().map(|p| p.1.ln()).collect();
        let k = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / k;
        let my = ys.iter().sum::<f64>() / k;
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let alpha = sxy / sxx;
        let intercept = my - alpha * mx;
        let residual = (xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| (y - intercept - alpha * x).powi(2))
            .sum::<f64>()
            / k)
            .sqrt();
        if !(alpha > 0.0 && alpha <= 1.5) {
            return Err(JsrError::inconclusive(format!(
                "fitted exponent {alpha:.4} outside (0, 1.5]"
            )));
        }
        return Ok(HolderFit {
            alpha_hat: alpha,
            c_hat: intercept.exp(),
            fit_window: (window[0].0, window[window.len() - 1].0),
            residual,
            points: window.len(),
        });
    }
    Err(JsrError::inconclusive(format!(
        "no decade of ε holds {MIN_FIT_POINTS} points with bracket width ≤ {:.0}% of r(ε) − r(0)",
        RESOLUTION * 100.0
    )))
}

/// A grid pair where lower(ε+δ) − upper(ε) exceeds (δ/ε)·upper(η).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityViolation {
    pub eps: f64,
    pub delta: f64,
    pub increment: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub eta: f64,
    /// Whether the curve's base set equals its balanced hull, as the
    /// inequality assumes.
    pub balanced: bool,
    pub pairs_checked: usize,
    pub violations: Vec<InequalityViolation>,
}

/// Checks 0 ≤ r(ε+δ) − r(ε) ≤ (δ/ε)·r(η) on all grid pairs with
/// 0 < ε < ε+δ ≤ η, using lower(ε+δ) − upper(ε) for the increment and the
/// upper bound at the largest grid point ≤ η for r(η).
pub fn check_inflation_inequality(curve: &InflationCurve, eta: f64) -> Result<InequalityReport> {
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(JsrError::invalid("eta must be positive"));
    }
    let balanced = curve.base.same_members(&balanced_hull(&curve.base));
    let mut report = InequalityReport {
        eta,
        balanced,
        pairs_checked: 0,
        violations: Vec::new(),
    };
    let Some(top) = curve.grid.iter().rposition(|&e| e <= eta) else {
        return Ok(report);
    };
    let r_eta = curve.values[top].upper;
    for i in 0..=top {
        let eps = curve.grid[i];
        if eps <= 0.0 {
            continue;
        }
        for j in i + 1..=top {
            let delta = curve.grid[j] - eps;
            let increment = curve.values[j].lower - curve.values[i].upper;
            let bound = delta / eps * r_eta;
            report.pairs_checked += 1;
            if increment > bound + 1e-12 * r_eta.max(1.0) {
                report.violations.push(InequalityViolation {
                    eps,
                    delta,
                    increment,
                    bound,
                });
            }
        }
    }
    Ok(report)
}

/// Writes the curve CSV to any writer.
pub fn write_curve_csv(curve: &InflationCurve, out: &mut impl std::io::Write) -> Result<()> {
    out.write_all(curve.to_csv()?.as_bytes())
        .map_err(|e| JsrError::Numerical(format!("write failed: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::bracket;
    use crate::matrix::NormKind;
    use proptest::prelude::*;

    fn nilpotent() -> MatrixSet {
        MatrixSet::singleton(Matrix::real(&[&[0.0, 1.0], &[0.0, 0.0]]))
    }

    fn pair() -> MatrixSet {
        MatrixSet::new(vec![
            Matrix::real(&[&[0.0, 1.0], &[0.0, 0.0]]),
            Matrix::real(&[&[0.0, 0.0], &[1.0, 0.0]]),
        ])
        .unwrap()
    }

    fn full() -> Ball {
        Ball::full(2, NormKind::Spectral)
    }

    #[test]
    fn grids() {
        let g = default_grid();
        assert_eq!(g.len(), 37);
        assert_eq!(g[0], 1e-4);
        assert_eq!(g[36], 1e-1);
        assert!((g[12] / 1e-3 - 1.0).abs() < 1e-12);
        assert_eq!(parse_grid("geo:1e-4:1e-1:36").unwrap().len(), 36);
        assert_eq!(parse_grid("0, 0.5,1").unwrap(), vec![0.0, 0.5, 1.0]);
        assert!(parse_grid("geo:1:2").is_err());
        assert!(parse_grid("1,0.5").is_err());
        assert!(parse_grid("-1").is_err());
    }

    #[test]
    fn zero_entry_is_the_plain_bracket() {
        let c = inflation_curve(&pair(), &full(), &[0.0, 0.1], 4).unwrap();
        assert_eq!(c.values[0], bracket(&pair(), 4).unwrap());
    }

    #[test]
    fn nilpotent_candidate_example() {
        let c = inflation_curve(&nilpotent(), &full(), &[0.04], 6).unwrap();
        assert!(c.values[0].lower >= 0.2 - 1e-12, "{:?}", c.values[0]);
        assert!(c.values[0].lower <= c.values[0].upper);
    }

    #[test]
    fn identity_curve_is_one_plus_eps() {
        let id = MatrixSet::singleton(Matrix::identity(2));
        let grid = [0.0, 0.01, 0.1, 0.5, 1.0];
        let c = inflation_curve(&id, &full(), &grid, 4).unwrap();
        for (e, b) in grid.iter().zip(&c.values) {
            assert!(b.lower >= 1.0 + e - 1e-12, "{e}: {b:?}");
            assert!(b.upper <= 1.0 + e + 1e-12, "{e}: {b:?}");
        }
    }

    #[test]
    fn fits_match_known_exponents() {
        let grid = default_grid();
        let nil = fit_holder_at_zero(&inflation_curve(&nilpotent(), &full(), &grid, 6).unwrap()).unwrap();
        assert!((0.4..=0.6).contains(&nil.alpha_hat), "{nil:?}");
        let pr = fit_holder_at_zero(&inflation_curve(&pair(), &full(), &grid, 6).unwrap()).unwrap();
        assert!((0.8..=1.2).contains(&pr.alpha_hat), "{pr:?}");
        let id = MatrixSet::singleton(Matrix::identity(2));
        let fid = fit_holder_at_zero(&inflation_curve(&id, &full(), &grid, 6).unwrap()).unwrap();
        assert!((0.9..=1.1).contains(&fid.alpha_hat), "{fid:?}");
    }

    #[test]
    fn nilpotent_curve_brackets_sqrt_eps() {
        let c = inflation_curve(&nilpotent(), &full(), &default_grid(), 6).unwrap();
        for (e, b) in c.grid.iter().zip(&c.values) {
            assert!(b.lower <= b.upper, "{e}: {b:?}");
            assert!(b.lower >= e.sqrt() * (1.0 - 1e-12), "{e}: {b:?}");
            assert!(b.upper >= e.sqrt(), "{e}: {b:?}");
        }
    }

    #[test]
    fn fit_needs_resolvable_points() {
        let c = inflation_curve(&pair(), &full(), &[0.0, 0.1], 4).unwrap();
        assert!(matches!(fit_holder_at_zero(&c), Err(JsrError::Inconclusive { .. })));
    }

    #[test]
    fn inequality_examples() {
        let id = MatrixSet::singleton(Matrix::identity(2));
        let c = inflation_curve(&id, &full(), &[0.5, 1.0], 4).unwrap();
        let rep = check_inflation_inequality(&c, 1.0).unwrap();
        assert_eq!(rep.pairs_checked, 1);
        assert!(rep.violations.is_empty());
        assert!(!rep.balanced);

        let mut rng = random::seeded(11);
        let set = balanced_hull(&random::real_gaussian_set(&mut rng, 2, 2));
        let grid: Vec<f64> = (1..=10).map(|i| i as f64 / 10.0).collect();
        let c = inflation_curve(&set, &full(), &grid, 6).unwrap();
        let rep = check_inflation_inequality(&c, 1.0).unwrap();
        assert!(rep.balanced);
        assert_eq!(rep.pairs_checked, 45);
        assert!(rep.violations.is_empty(), "{:?}", rep.violations);
    }

    #[test]
    fn csv_export() {
        let c = inflation_curve(&pair(), &full(), &[0.0, 0.5], 3).unwrap();
        let csv = c.to_csv().unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("epsilon,lower,upper,depth_n"));
        assert_eq!(lines.next(), Some("0,1,1,3"));
        assert_eq!(csv.lines().count(), 3);
    }

    #[test]
    fn subspace_ball_restricts_candidates() {
        // perturbing only the (1,1) entry cannot make the nilpotent grow
        // beyond ε
        let ball = Ball::new(vec![Matrix::unit(2, 0, 0)], NormKind::Spectral).unwrap();
        let c = inflation_curve(&nilpotent(), &ball, &[0.1], 6).unwrap();
        assert!((c.values[0].lower - 0.1).abs() < 1e-12);
        assert!(c.values[0].upper >= 0.1);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(8))]

        #[test]
        fn curves_are_monotone_and_bracket_balanced_hulls(seed in 0u64..10_000) {
            let mut rng = random::seeded(seed);
            let set = random::real_gaussian_set(&mut rng, 2, 2);
            let grid = [0.0, 0.01, 0.05, 0.2];
            let a = inflation_curve(&set, &full(), &grid, 4).unwrap();
            let b = inflation_curve(&balanced_hull(&set), &full(), &grid, 4).unwrap();
            for i in 0..grid.len() {
                prop_assert!(a.values[i].lower <= a.values[i].upper + 1e-12);
                prop_assert!(a.values[i].lower <= b.values[i].upper + 1e-12);
                prop_assert!(b.values[i].lower <= a.values[i].upper + 1e-12);
                for j in i + 1..grid.len() {
                    prop_assert!(a.values[i].lower <= a.values[j].upper + 1e-12);
                }
            }
        }

        #[test]
        fn fitted_exponents_respect_the_index(seed in 0u64..10_000) {
            let mut rng = random::seeded(seed);
            let a = random::real_gaussian(&mut rng, 2);
            // random upper-triangular singleton: index 2
            let t = Matrix::real(&[&[a.get(0, 0).re, a.get(0, 1).re], &[0.0, a.get(1, 1).re]]);
            let set = MatrixSet::singleton(t);
            let curve = inflation_curve(&set, &full(), &default_grid(), 6).unwrap();
            if let Ok(fit) = fit_holder_at_zero(&curve) {
                prop_assert!(fit.alpha_hat >= 1.0 / 3.0 - 0.15, "{:?}", fit);
            }
        }
    }
}
