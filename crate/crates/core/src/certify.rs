//! Growth constants and pointwise lower-bound certificates.
//!
//! A [`HolderCertificate`] states: for n ≥ n₀ and any finite N with
//! d_H(M, N) ≤ τ·n^{−(d²+dr)}·ρ(M), one has ρ(N) ≥ ρ(M)(1 − Ω/n^r).
//! Θ is estimated from a finite window of products and Λ is either
//! supplied or estimated; both carry their provenance.

use serde::{Deserialize, Serialize};

use crate::bounds::{bracket_capped, bracket_with, lambda_empirical_with, scan_products, BoundsBracket, BracketOptions};
use crate::error::{JsrError, Result};
use crate::matrix::{Matrix, C64};
use crate::random;
use crate::set::{scale, Budget, MatrixSet};

/// Budget of the pruned scan that brackets ρ(M) for normalization.
const BRACKET_BUDGET: u64 = 1 << 20;
const MAX_BRACKET_DEPTH: usize = 64;
const DEEPENING_STEP: usize = 4;

/// Where a constant came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Provenance {
    Supplied,
    Empirical { detail: String },
}

/// How products are normalized when estimating Θ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ThetaNormalization {
    /// ‖S_k‖ ≤ Θ k^{d−1} ρ^k
    #[default]
    Standard,
    /// ‖S_k‖ ≤ Θ k^{d−1} ρ^{k−(d−1)} when ρ < 1, standard otherwise.
    ShiftedBelowOne,
}

#[derive(Debug, Clone)]
pub struct ThetaOptions {
    pub normalization: ThetaNormalization,
    /// Depth of the ρ bracket; chosen from a fixed budget when `None`.
    pub bracket_depth: Option<usize>,
    pub budget: Budget,
}

impl Default for ThetaOptions {
    fn default() -> Self {
        ThetaOptions {
            normalization: ThetaNormalization::Standard,
            bracket_depth: None,
            budget: Budget::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaEstimate {
    pub theta: f64,
    /// The bracket's lower end; a smaller ρ only inflates Θ.
    pub rho_used: f64,
    pub kmax: usize,
    pub normalization: ThetaNormalization,
    pub bracket: BoundsBracket,
    pub provenance: Provenance,
}

/// Default depth for a normalization bracket of `set`.
pub fn auto_bracket_depth(set: &MatrixSet) -> usize {
    Budget(BRACKET_BUDGET).max_depth(set.len(), MAX_BRACKET_DEPTH).max(1)
}

fn certified_bracket(set: &MatrixSet, depth: usize, budget: Budget, max_width: f64) -> Result<BoundsBracket> {
    let mut br = bracket_with(
        set,
        depth,
        &BracketOptions {
            budget,
            ..Default::default()
        },
    )?;
    // pruned scans often reach well past the worst-case depth within budget
    let mut n = depth;
    while br.relative_width() > max_width && br.lower > 0.0 && n < MAX_BRACKET_DEPTH {
        n = (n + DEEPENING_STEP).min(MAX_BRACKET_DEPTH);
        match bracket_capped(set, n, budget.0) {
            Ok(deeper) => br = deeper,
            Err(JsrError::BudgetExceeded { .. }) => break,
            Err(e) => return Err(e),
        }
    }
    if !(br.lower > 0.0) {
        return Err(JsrError::precondition(format!(
            "ρ bracket [{:e}, {:e}] does not exclude 0",
            br.lower, br.upper
        )));
    }
    if br.relative_width() > max_width {
        return Err(JsrError::inconclusive(format!(
            "ρ bracket [{:.6e}, {:.6e}] at depth {} is wider than {:.0}%",
            br.lower,
            br.upper,
            br.depth_n,
            max_width * 100.0
        )));
    }
    Ok(br)
}

pub fn theta_estimate(set: &MatrixSet, kmax: usize) -> Result<ThetaEstimate> {
    theta_estimate_with(set, kmax, &ThetaOptions::default())
}

/// Θ = max over k ≤ kmax of max_{S ∈ S_k} ‖S‖₂ / (k^{d−1} ρ^k), floored at 1.
pub fn theta_estimate_with(set: &MatrixSet, kmax: usize, opts: &ThetaOptions) -> Result<ThetaEstimate> {
    if kmax == 0 {
        return Err(JsrError::invalid("kmax must be at least 1"));
    }
    let depth = opts.bracket_depth.unwrap_or_else(|| auto_bracket_depth(set));
    let br = certified_bracket(set, depth, opts.budget, 0.10)?;
    let scan = scan_products(set, kmax, opts.budget, false, &[])?;
    let d = set.dim() as i32;
    let rho = br.lower;
    let mut theta = 1.0f64;
    for (i, &a) in scan.max_norm.iter().enumerate() {
        let k = (i + 1) as f64;
        let exponent = match opts.normalization {
            ThetaNormalization::ShiftedBelowOne if rho < 1.0 => k - (d - 1) as f64,
            _ => k,
        };
        theta = theta.max(a / (k.powi(d - 1) * rho.powf(exponent)));
    }
    if !theta.is_finite() {
        return Err(JsrError::Numerical("growth constant overflowed".into()));
    }
    Ok(ThetaEstimate {
        theta,
        rho_used: rho,
        kmax,
        normalization: opts.normalization,
        bracket: br,
        provenance: Provenance::Empirical {
            detail: format!("empirical up to kmax = {kmax}"),
        },
    })
}

/// Result of the search for n₀.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct N0Search {
    pub n0: usize,
    pub lambda: f64,
    pub r: u32,
    pub horizon: usize,
    /// n·b_n^{n−1} at the horizon, with b_n = 1 − 2Λ/n^r; the lemma needs
    /// its lower limit above 1.
    pub premise_at_horizon: f64,
    pub premise_holds: bool,
}

/// (1 − Λ/n^r)^k − (1 − 2Λ/n^r)^k ≥ Λ/n^r for every 1 ≤ k ≤ n.
///
/// With a − b = Λ/n^r the left side is (a − b)·h_k where
/// h_k = Σ a^{k−1−i} b^i, so the test is h_k ≥ 1, free of cancellation.
pub fn n0_condition_holds(lambda: f64, r: u32, n: usize) -> bool {
    let x = lambda / (n as f64).powi(r as i32);
    let (a, b) = (1.0 - x, 1.0 - 2.0 * x);
    let mut h = 1.0f64;
    let mut bk = 1.0f64;
    for _ in 1..n {
        bk *= b;
        h = a * h + bk;
        if h < 1.0 - 1e-12 {
            return false;
        }
    }
    true
}

/// Smallest n₀ ≤ horizon such that the condition holds for every
/// n ∈ [n₀, horizon].
pub fn n0_search(lambda: f64, r: u32, horizon: usize) -> Result<N0Search> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(JsrError::invalid("lambda must be positive"));
    }
    if r == 0 {
        return Err(JsrError::invalid("r must be at least 1"));
    }
    if horizon < 10 {
        return Err(JsrError::invalid("horizon must be at least 10"));
    }
    let mut n0 = 1;
    for n in (1..=horizon).rev() {
        if !n0_condition_holds(lambda, r, n) {
            if n == horizon {
                return Err(JsrError::inconclusive(format!(
                    "no valid n0 up to horizon {horizon}; largest violating n is {n}"
                )));
            }
            n0 = n + 1;
            break;
        }
    }
    let h = horizon as f64;
    let b = 1.0 - 2.0 * lambda / h.powi(r as i32);
    let premise = h * b.powf(h - 1.0);
    Ok(N0Search {
        n0,
        lambda,
        r,
        horizon,
        premise_at_horizon: premise,
        premise_holds: premise > 1.0,
    })
}

/// Δ, Ψ, τ, Ω from (d, Θ, Λ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertificateConstants {
    pub delta_c: f64,
    pub psi: f64,
    pub tau: f64,
    pub omega: f64,
}

pub fn certificate_constants(d: usize, theta: f64, lambda: f64) -> Result<CertificateConstants> {
    if d == 0 {
        return Err(JsrError::invalid("dimension must be positive"));
    }
    if !(theta > 0.0 && theta.is_finite() && lambda > 0.0 && lambda.is_finite()) {
        return Err(JsrError::invalid("theta and lambda must be positive"));
    }
    let df = d as f64;
    let delta_c = 2.0 * theta * theta;
    let psi = ((2.0 * theta + delta_c).powf((df - 1.0) / df) * delta_c.powf(1.0 / df))
        .max(theta.powf(1.0 / df) * lambda);
    let tau = (lambda / psi).powi(d as i32);
    Ok(CertificateConstants {
        delta_c,
        psi,
        tau,
        omega: 2.0 * lambda,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolderCertificate {
    pub d: usize,
    pub theta: f64,
    pub theta_provenance: Provenance,
    pub lambda: f64,
    pub lambda_provenance: Provenance,
    pub r: u32,
    pub delta_c: f64,
    pub psi: f64,
    pub tau: f64,
    pub omega: f64,
    pub n0: usize,
    pub horizon: usize,
    /// d² + d·r
    pub radius_exponent: u32,
    /// Midpoint of `rho_bracket`.
    pub rho_ref: f64,
    pub rho_bracket: BoundsBracket,
}

impl HolderCertificate {
    /// Assembles a certificate from explicit constants.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parameters(
        d: usize,
        theta: f64,
        theta_provenance: Provenance,
        lambda: f64,
        lambda_provenance: Provenance,
        r: u32,
        horizon: usize,
        rho_bracket: BoundsBracket,
    ) -> Result<Self> {
        let c = certificate_constants(d, theta, lambda)?;
        let search = n0_search(lambda, r, horizon)?;
        let du = d as u32;
        Ok(HolderCertificate {
            d,
            theta,
            theta_provenance,
            lambda,
            lambda_provenance,
            r,
            delta_c: c.delta_c,
            psi: c.psi,
            tau: c.tau,
            omega: c.omega,
            n0: search.n0,
            horizon,
            radius_exponent: du * du + du * r,
            rho_ref: rho_bracket.midpoint(),
            rho_bracket,
        })
    }

    /// Recomputes Δ, Ψ, τ, Ω and compares bit for bit.
    pub fn constants_consistent(&self) -> bool {
        certificate_constants(self.d, self.theta, self.lambda).is_ok_and(|c| {
            c.delta_c == self.delta_c && c.psi == self.psi && c.tau == self.tau && c.omega == self.omega
        })
    }

    /// Hausdorff radius τ·n^{−(d²+dr)}·ρ, using the bracket's lower end.
    pub fn radius(&self, n: usize) -> f64 {
        self.tau * (n as f64).powi(-(self.radius_exponent as i32)) * self.rho_bracket.lower
    }

    /// ρ_lower·(1 − Ω/n^r), the certified lower bound for ρ(N).
    pub fn guarantee(&self, n: usize) -> f64 {
        self.rho_bracket.lower * (1.0 - self.omega / (n as f64).powi(self.r as i32))
    }
}

/// Source of Λ for [`build_certificate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaInput {
    Supplied(f64),
    /// Estimate from brackets up to this depth.
    Empirical { depth: usize },
}

/// Θ from [`theta_estimate`], Λ as given, then the constants and n₀.
pub fn build_certificate(
    set: &MatrixSet,
    lambda: LambdaInput,
    r: u32,
    kmax: usize,
    horizon: usize,
) -> Result<HolderCertificate> {
    build_certificate_with(set, lambda, r, kmax, horizon, Budget::default())
}

pub fn build_certificate_with(
    set: &MatrixSet,
    lambda: LambdaInput,
    r: u32,
    kmax: usize,
    horizon: usize,
    budget: Budget,
) -> Result<HolderCertificate> {
    let est = theta_estimate_with(
        set,
        kmax,
        &ThetaOptions {
            budget,
            ..Default::default()
        },
    )?;
    let (lambda, lambda_provenance) = match lambda {
        LambdaInput::Supplied(l) => (l, Provenance::Supplied),
        LambdaInput::Empirical { depth } => {
            let l = lambda_empirical_with(set, depth, r, budget)?;
            if !(l > 0.0) {
                return Err(JsrError::inconclusive(
                    "empirical Λ is 0 (the lower bounds are already exact); supply Λ explicitly",
                ));
            }
            (
                l,
                Provenance::Empirical {
                    detail: format!("lambda_empirical at depth {depth}"),
                },
            )
        }
    };
    HolderCertificate::from_parameters(
        set.dim(),
        est.theta,
        est.provenance,
        lambda,
        lambda_provenance,
        r,
        horizon,
        est.bracket,
    )
}

/// (2^p·Ω·τ^{−p/q}, p/q): the Hölder constant and exponent obtained from
/// integer-indexed lower bounds.
pub fn holder_constant_from_integers(p: u32, q: u32, tau: f64, omega: f64) -> Result<(f64, f64)> {
    if p == 0 || q == 0 {
        return Err(JsrError::invalid("p and q must be at least 1"));
    }
    if !(tau > 0.0 && omega > 0.0) {
        return Err(JsrError::invalid("tau and omega must be positive"));
    }
    let e = p as f64 / q as f64;
    Ok((2f64.powi(p as i32) * omega * tau.powf(-e), e))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Inconclusive,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub eps_n: f64,
    pub lower: f64,
    pub upper: f64,
    pub guarantee: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub n_probe: usize,
    pub depth: usize,
    pub seed: u64,
    pub eps_n: f64,
    pub guarantee: f64,
    pub pass: usize,
    pub inconclusive: usize,
    pub fail: usize,
    pub trials: Vec<TrialRecord>,
}

impl VerificationReport {
    /// Per-trial CSV: trial, eps_n, lower, upper, guarantee, verdict.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let err = |e: csv::Error| JsrError::Numerical(format!("csv: {e}"));
        w.write_record(["trial", "eps_n", "lower", "upper", "guarantee", "verdict"])
            .map_err(err)?;
        for t in &self.trials {
            let v = match t.verdict {
                Verdict::Pass => "PASS",
                Verdict::Inconclusive => "INCONCLUSIVE",
                Verdict::Fail => "FAIL",
            };
            w.write_record([
                t.trial.to_string(),
                t.eps_n.to_string(),
                t.lower.to_string(),
                t.upper.to_string(),
                t.guarantee.to_string(),
                v.to_string(),
            ])
            .map_err(err)?;
        }
        let bytes = w.into_inner().map_err(|e| JsrError::Numerical(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }
}

/// Brackets ρ(N) for one perturbed set and compares with the guarantee.
pub fn judge_perturbed(
    cert: &HolderCertificate,
    perturbed: &MatrixSet,
    n_probe: usize,
    depth: usize,
    trial: usize,
) -> Result<TrialRecord> {
    judge_perturbed_with(cert, perturbed, n_probe, depth, trial, Budget::default())
}

pub fn judge_perturbed_with(
    cert: &HolderCertificate,
    perturbed: &MatrixSet,
    n_probe: usize,
    depth: usize,
    trial: usize,
    budget: Budget,
) -> Result<TrialRecord> {
    let br = bracket_with(
        perturbed,
        depth,
        &BracketOptions {
            budget,
            ..Default::default()
        },
    )?;
    let guarantee = cert.guarantee(n_probe);
    let verdict = if br.lower >= guarantee {
        Verdict::Pass
    } else if br.upper < guarantee {
        Verdict::Fail
    } else {
        Verdict::Inconclusive
    };
    Ok(TrialRecord {
        trial,
        eps_n: cert.radius(n_probe),
        lower: br.lower,
        upper: br.upper,
        guarantee,
        verdict,
    })
}

/// Samples N = {A_i + ε_n B_i} with ‖B_i‖₂ ≤ 1 and ε_n the certified
/// radius at n_probe, and brackets each ρ(N) against the guarantee.
pub fn verify_certificate(
    set: &MatrixSet,
    cert: &HolderCertificate,
    trials: usize,
    n_probe: usize,
    depth: usize,
    seed: u64,
) -> Result<VerificationReport> {
    verify_certificate_with(set, cert, trials, n_probe, depth, seed, Budget::default())
}

pub fn verify_certificate_with(
    set: &MatrixSet,
    cert: &HolderCertificate,
    trials: usize,
    n_probe: usize,
    depth: usize,
    seed: u64,
    budget: Budget,
) -> Result<VerificationReport> {
    if set.dim() != cert.d {
        return Err(JsrError::DimensionMismatch {
            expected: cert.d,
            found: set.dim(),
        });
    }
    if n_probe < cert.n0 {
        return Err(JsrError::invalid(format!(
            "n_probe = {n_probe} is below the certificate's n0 = {}",
            cert.n0
        )));
    }
    if !cert.constants_consistent() {
        return Err(JsrError::invalid("certificate constants are inconsistent"));
    }
    let eps_n = cert.radius(n_probe);
    let mut report = VerificationReport {
        n_probe,
        depth,
        seed,
        eps_n,
        guarantee: cert.guarantee(n_probe),
        pass: 0,
        inconclusive: 0,
        fail: 0,
        trials: Vec::with_capacity(trials),
    };
    for t in 0..trials {
        let mut rng = random::substream(seed, t as u64);
        let perturbed = set.map(|a| a.add_scaled(eps_n, &random::unit_ball_matrix(&mut rng, a.dim())))?;
        let rec = judge_perturbed_with(cert, &perturbed, n_probe, depth, t, budget)?;
        match rec.verdict {
            Verdict::Pass => report.pass += 1,
            Verdict::Inconclusive => report.inconclusive += 1,
            Verdict::Fail => report.fail += 1,
        }
        report.trials.push(rec);
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dim2Report {
    pub bracket: BoundsBracket,
    /// The set is divided by this (the bracket's upper end).
    pub normalizer: f64,
    /// max(1, max Frobenius norm of the normalized members)
    pub l: f64,
    pub kmax: usize,
    /// `max_norms[k-1]` = max over S ∈ S_k of ‖S‖₂ after normalization.
    pub max_norms: Vec<f64>,
    /// Values of k where max_norms exceeds 6Lk.
    pub violations: Vec<usize>,
}

impl Dim2Report {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn dim2_growth_check(set: &MatrixSet, kmax: usize) -> Result<Dim2Report> {
    dim2_growth_check_with(set, kmax, auto_bracket_depth(set), Budget::default())
}

/// Checks ‖A_k ⋯ A_1‖₂ ≤ 6Lk for k ≤ kmax on the set normalized by its
/// bracket's upper end.
pub fn dim2_growth_check_with(set: &MatrixSet, kmax: usize, depth: usize, budget: Budget) -> Result<Dim2Report> {
    if set.dim() != 2 {
        return Err(JsrError::DimensionMismatch {
            expected: 2,
            found: set.dim(),
        });
    }
    if kmax == 0 {
        return Err(JsrError::invalid("kmax must be at least 1"));
    }
    let br = certified_bracket(set, depth, budget, 0.05)?;
    let normalized = scale(set, 1.0 / br.upper)?;
    let l = normalized
        .members()
        .iter()
        .map(Matrix::frobenius_norm)
        .fold(1.0, f64::max);
    let scan = scan_products(&normalized, kmax, budget, false, &[])?;
    let violations = scan
        .max_norm
        .iter()
        .enumerate()
        .filter(|(i, &a)| a > 6.0 * l * (i + 1) as f64)
        .map(|(i, _)| i + 1)
        .collect();
    Ok(Dim2Report {
        normalizer: br.upper,
        bracket: br,
        l,
        kmax,
        max_norms: scan.max_norm,
        violations,
    })
}

/// Distance from the origin to the complex line through (r1, η) and
/// (ζ, r2)-type points used in the planar growth argument:
/// sqrt(r1²r2² / (|r1 − η|² + r2²)), which is at least r2/√5.
pub fn distance_subspace(r1: f64, r2: f64, eta: C64, zeta: C64) -> Result<f64> {
    if !(r2 > 0.0 && r1 >= r2 && r1.is_finite()) {
        return Err(JsrError::invalid("need r1 ≥ r2 > 0"));
    }
    if eta.norm() > r1 * (1.0 + 1e-12) {
        return Err(JsrError::invalid("need |eta| ≤ r1"));
    }
    if (zeta.norm() - r2).abs() > 1e-9 * r2.max(1.0) {
        return Err(JsrError::invalid("need |zeta| = r2"));
    }
    let dist = (r1 * r1 * r2 * r2 / ((eta - r1).norm_sqr() + r2 * r2)).sqrt();
    if dist < r2 / 5f64.sqrt() - 1e-12 {
        return Err(JsrError::Numerical(format!(
            "distance {dist:e} below r2/√5; inputs violate the lemma's hypotheses"
        )));
    }
    Ok(dist)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::Rng;

    fn pair() -> MatrixSet {
        MatrixSet::new(vec![
            Matrix::real(&[&[0.0, 1.0], &[0.0, 0.0]]),
            Matrix::real(&[&[0.0, 0.0], &[1.0, 0.0]]),
        ])
        .unwrap()
    }

    #[test]
    fn theta_examples() {
        let id = MatrixSet::singleton(Matrix::identity(2));
        assert_eq!(theta_estimate(&id, 10).unwrap().theta, 1.0);

        let shear = MatrixSet::singleton(Matrix::real(&[&[1.0, 1.0], &[0.0, 1.0]]));
        let t = theta_estimate(&shear, 20).unwrap();
        assert!((1.0..=2.5).contains(&t.theta), "{t:?}");
        // oracle: ‖A^k‖₂ / k by direct powers
        let a = &shear.members()[0];
        let mut p = Matrix::identity(2);
        let mut direct = 1.0f64;
        for k in 1..=20 {
            p = a.mul(&p);
            direct = direct.max(p.spectral_norm() / k as f64);
        }
        assert_relative_eq!(t.theta, direct, max_relative = 1e-12);

        let eps = 0.5;
        let m_eps = MatrixSet::singleton(Matrix::real(&[&[eps, 1.0], &[0.0, eps]]));
        let t = theta_estimate(&m_eps, 20).unwrap();
        assert!(t.theta.is_finite() && t.theta >= 1.0 / eps, "{t:?}");
    }

    #[test]
    fn theta_shifted_normalization() {
        let m = MatrixSet::singleton(Matrix::real(&[&[0.5, 1.0], &[0.0, 0.5]]));
        let std = theta_estimate(&m, 12).unwrap();
        let shifted = theta_estimate_with(
            &m,
            12,
            &ThetaOptions {
                normalization: ThetaNormalization::ShiftedBelowOne,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(shifted.theta <= std.theta);
        assert_eq!(shifted.normalization, ThetaNormalization::ShiftedBelowOne);
    }

    #[test]
    fn theta_rejects_zero_radius() {
        let nil = MatrixSet::singleton(Matrix::real(&[&[0.0, 1.0], &[0.0, 0.0]]));
        assert!(matches!(theta_estimate(&nil, 5), Err(JsrError::Precondition(_))));
    }

    /// Direct (uncancelled) form of the n₀ inequality.
    fn direct(lambda: f64, r: u32, n: usize, k: usize) -> bool {
        let x = lambda / (n as f64).powi(r as i32);
        (1.0 - x).powi(k as i32) - (1.0 - 2.0 * x).powi(k as i32) >= x * (1.0 - 1e-9)
    }

    #[test]
    fn n0_examples() {
        let s = n0_search(1.0, 1, 1000).unwrap();
        assert!(s.n0 <= 1000);
        for n in s.n0..=1000 {
            for k in 1..=n {
                assert!(direct(1.0, 1, n, k), "n={n} k={k}");
            }
        }
        if s.n0 > 1 {
            let n = s.n0 - 1;
            assert!((1..=n).any(|k| !direct(1.0, 1, n, k)));
        }
        assert!(s.premise_holds);

        let small = n0_search(0.1, 1, 1000).unwrap();
        assert!(small.n0 <= s.n0);

        // k = n term tends to e^{−Λ} − e^{−2Λ}
        let n = 1000f64;
        let term = (1.0 - 1.0 / n).powf(n) - (1.0 - 2.0 / n).powf(n);
        assert_relative_eq!(term, (-1f64).exp() - (-2f64).exp(), max_relative = 1e-2);

        assert!(n0_search(1.0, 1, 5).is_err());
        assert!(n0_search(0.0, 1, 100).is_err());
    }

    #[test]
    fn constants_example() {
        let c = certificate_constants(2, 1.0, 1.0).unwrap();
        assert_eq!(c.delta_c, 2.0);
        assert!((c.psi - 2.0 * 2f64.sqrt()).abs() <= 1e-12);
        assert!((c.tau - 0.125).abs() <= 1e-12);
        assert_eq!(c.omega, 2.0);
        let c2 = certificate_constants(2, 2.0, 1.0).unwrap();
        assert!(c2.tau < c.tau);
    }

    #[test]
    fn build_certificate_on_the_pair() {
        let cert = build_certificate(&pair(), LambdaInput::Supplied(1.0), 1, 12, 1000).unwrap();
        assert_eq!(cert.theta, 1.0);
        assert_eq!(cert.radius_exponent, 4 + 2);
        assert!(cert.constants_consistent());
        assert_eq!(cert.lambda_provenance, Provenance::Supplied);
        assert!(matches!(cert.theta_provenance, Provenance::Empirical { .. }));
        let json = serde_json::to_string(&cert).unwrap();
        let back: HolderCertificate = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cert);

        let mut bad = cert.clone();
        bad.tau = f64::from_bits(bad.tau.to_bits() + 1);
        assert!(!bad.constants_consistent());
    }

    #[test]
    fn empirical_lambda_certificate() {
        let cert = build_certificate(&pair(), LambdaInput::Empirical { depth: 6 }, 1, 8, 1000).unwrap();
        assert_eq!(cert.lambda, 1.0);
        assert!(matches!(cert.lambda_provenance, Provenance::Empirical { .. }));
        let id = MatrixSet::singleton(Matrix::identity(2));
        assert!(build_certificate(&id, LambdaInput::Empirical { depth: 6 }, 1, 8, 1000).is_err());
    }

    #[test]
    fn holder_constant_examples() {
        assert_eq!(holder_constant_from_integers(1, 1, 1.0, 1.0).unwrap(), (2.0, 1.0));
        let (c, e) = holder_constant_from_integers(1, 6, 0.125, 2.0).unwrap();
        assert_relative_eq!(c, 4.0 * 0.125f64.powf(-1.0 / 6.0), max_relative = 1e-15);
        assert_relative_eq!(c, 5.66, max_relative = 1e-3);
        assert_eq!(e, 1.0 / 6.0);
        let (c2, _) = holder_constant_from_integers(1, 6, 0.125, 4.0).unwrap();
        assert_eq!(c2, 2.0 * c);
        assert!(holder_constant_from_integers(0, 1, 1.0, 1.0).is_err());
    }

    #[test]
    fn verification_on_the_pair() {
        let cert = build_certificate(&pair(), LambdaInput::Supplied(1.0), 1, 12, 1000).unwrap();
        let same = judge_perturbed(&cert, &pair(), cert.n0, 8, 0).unwrap();
        assert_eq!(same.verdict, Verdict::Pass);

        let rep = verify_certificate(&pair(), &cert, 20, cert.n0, 8, 5).unwrap();
        assert_eq!(rep.fail, 0);
        assert_eq!(rep.trials.len(), 20);
        assert_eq!(rep.pass + rep.inconclusive, 20);
        let csv = rep.to_csv().unwrap();
        assert!(csv.starts_with("trial,eps_n,lower,upper,guarantee,verdict\n"));
        assert_eq!(csv.lines().count(), 21);
        if cert.n0 > 1 {
            assert!(verify_certificate(&pair(), &cert, 1, cert.n0 - 1, 8, 5).is_err());
        }
    }

    #[test]
    fn dim2_examples() {
        let id = MatrixSet::singleton(Matrix::identity(2));
        let rep = dim2_growth_check(&id, 10).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.l, 2f64.sqrt());

        let shear = MatrixSet::singleton(Matrix::real(&[&[1.0, 1.0], &[0.0, 1.0]]));
        let rep = dim2_growth_check_with(&shear, 30, 400, Budget::default()).unwrap();
        assert!(rep.passed());
        for (i, &a) in rep.max_norms.iter().enumerate() {
            assert!(a <= 6.0 * rep.l * (i + 1) as f64);
        }
        assert!(dim2_growth_check(&MatrixSet::singleton(Matrix::identity(3)), 5).is_err());
    }

    #[test]
    fn distance_examples() {
        let d = distance_subspace(1.0, 1.0, C64::new(0.0, 0.0), C64::new(1.0, 0.0)).unwrap();
        assert_relative_eq!(d, std::f64::consts::FRAC_1_SQRT_2, max_relative = 1e-15);
        let d = distance_subspace(2.0, 0.5, C64::new(2.0, 0.0), C64::new(0.0, 0.5)).unwrap();
        assert_relative_eq!(d, 2.0, max_relative = 1e-15);
        assert!(distance_subspace(0.5, 1.0, C64::new(0.0, 0.0), C64::new(1.0, 0.0)).is_err());
        assert!(distance_subspace(1.0, 1.0, C64::new(0.0, 0.0), C64::new(2.0, 0.0)).is_err());
    }

    #[test]
    fn distance_random_scan() {
        let mut rng = random::seeded(99);
        for _ in 0..100_000 {
            let r2 = 0.01 + rng.random::<f64>();
            let r1 = r2 * (1.0 + 10.0 * rng.random::<f64>());
            let eta = C64::from_polar(r1 * rng.random::<f64>().sqrt(), std::f64::consts::TAU * rng.random::<f64>());
            let zeta = C64::from_polar(r2, std::f64::consts::TAU * rng.random::<f64>());
            let d = distance_subspace(r1, r2, eta, zeta).unwrap();
            assert!(d >= r2 / 5f64.sqrt() - 1e-12);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn constants_are_bit_stable(theta in 1.0f64..50.0, lambda in 0.01f64..10.0, d in 1usize..6, r in 1u32..4) {
            let br = crate::bounds::bracket(&MatrixSet::singleton(Matrix::identity(d)), 1).unwrap();
            let cert = HolderCertificate::from_parameters(
                d, theta, Provenance::Supplied, lambda, Provenance::Supplied, r, 200, br,
            );
            if let Ok(cert) = cert {
                prop_assert!(cert.constants_consistent());
                let c = certificate_constants(d, theta, lambda).unwrap();
                prop_assert_eq!(c.delta_c.to_bits(), cert.delta_c.to_bits());
                prop_assert_eq!(c.psi.to_bits(), cert.psi.to_bits());
                prop_assert_eq!(c.tau.to_bits(), cert.tau.to_bits());
                prop_assert_eq!(cert.radius_exponent as usize, d * d + d * r as usize);
            }
        }

        #[test]
        fn tau_decreases_with_theta(t1 in 1.0f64..20.0, dt in 0.01f64..5.0, lambda in 0.1f64..3.0) {
            let a = certificate_constants(2, t1, lambda).unwrap();
            let b = certificate_constants(2, t1 + dt, lambda).unwrap();
            prop_assert!(b.tau <= a.tau);
        }

        #[test]
        fn n0_validity(lambda in 0.05f64..3.0, r in 1u32..3) {
            let s = n0_search(lambda, r, 200).unwrap();
            for n in s.n0..=200 {
                for k in 1..=n {
                    prop_assert!(direct(lambda, r, n, k), "n={} k={}", n, k);
                }
            }
        }
    }
}
