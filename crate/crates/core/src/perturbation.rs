//! Perturbation bounds for single matrices and finite products: Elsner's
//! inequality, a certified lower bound ρ(A + εB) ≥ ρ(A) − Γε from the
//! resolvent on a circle around the dominant eigenvalue, and the deviation
//! of perturbed products.

use serde::{Deserialize, Serialize};

use crate::error::{JsrError, Result};
use crate::matrix::{Matrix, C64};
use crate::random;
use crate::set::{MatrixSet, Word};

/// Default number of sample points on the circle.
pub const DEFAULT_CIRCLE_SAMPLES: usize = 720;
/// Eigenvalues within this distance of λ* are one cluster.
const CLUSTER_TOL: f64 = 1e-9;
/// Required separation margin between the disk and other eigenvalues.
const SEPARATION_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElsnerGap {
    /// |ρ(A) − ρ(B)|
    pub lhs: f64,
    /// (‖A‖₂ + ‖B‖₂)^{(d−1)/d} ‖A − B‖₂^{1/d}
    pub rhs: f64,
    pub violated: bool,
}

pub fn elsner_gap(a: &Matrix, b: &Matrix) -> Result<ElsnerGap> {
    if a.dim() != b.dim() {
        return Err(JsrError::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let d = a.dim() as f64;
    let lhs = (a.spectral_radius() - b.spectral_radius()).abs();
    let rhs = (a.spectral_norm() + b.spectral_norm()).powf((d - 1.0) / d) * a.sub(b).spectral_norm().powf(1.0 / d);
    Ok(ElsnerGap {
        lhs,
        rhs,
        violated: lhs > rhs + 1e-9,
    })
}

/// How δ was chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeltaSource {
    Supplied,
    /// Half the distance to the rest of the spectrum, capped at 0.9.
    HalfGap,
}

/// Constants (Γ, ε₀) with ρ(A + εB) ≥ ρ(A) − Γε for ‖B‖₂ ≤ 1, 0 ≤ ε < ε₀.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolventCertificate {
    pub lambda_star: C64,
    /// Number of eigenvalues (with multiplicity) in the cluster at λ*.
    pub cluster_size: usize,
    pub delta: f64,
    pub delta_source: DeltaSource,
    /// Certified lower bound on min over the circle of 1/‖(A − ξI)⁻¹‖₂.
    pub r0: f64,
    /// Smallest sampled value before the sampling margin.
    pub sampled_min: f64,
    /// Margin subtracted for the gaps between samples.
    pub sampling_margin: f64,
    pub gamma: f64,
    pub eps0: f64,
    pub samples: usize,
    /// r0 recomputed with twice as many samples.
    pub r0_doubled: f64,
    /// Set when doubling the samples moved r0 by 1% or more.
    pub low_confidence: bool,
}

/// Dominant eigenvalue (ties broken by largest real part, then imaginary
/// part) and the eigenvalues outside its cluster.
fn dominant(a: &Matrix) -> (C64, usize, Vec<C64>) {
    let eigs = a.eigenvalues();
    let top = eigs
        .iter()
        .copied()
        .max_by(|p, q| {
            p.norm()
                .total_cmp(&q.norm())
                .then(p.re.total_cmp(&q.re))
                .then(p.im.total_cmp(&q.im))
        })
        .expect("d ≥ 1");
    let scale = top.norm().max(1.0);
    let (cluster, rest): (Vec<C64>, Vec<C64>) = eigs
        .into_iter()
        .partition(|z| (z - top).norm() <= CLUSTER_TOL * scale);
    (top, cluster.len(), rest)
}

/// Half the distance from λ* to the other eigenvalues, capped at 0.9.
pub fn default_delta(a: &Matrix) -> f64 {
    let (top, _, rest) = dominant(a);
    let gap = rest.iter().map(|z| (z - top).norm()).fold(f64::INFINITY, f64::min);
    (0.5 * gap).min(0.9)
}

fn circle_min(a: &Matrix, center: C64, delta: f64, samples: usize) -> Result<(f64, f64)> {
    let d = a.dim();
    let mut smallest = f64::INFINITY;
    for k in 0..samples {
        let t = std::f64::consts::TAU * k as f64 / samples as f64;
        let xi = center + C64::from_polar(delta, t);
        let s = a.sub(&Matrix::identity(d).scale_c(xi)).min_singular_value();
        smallest = smallest.min(s);
    }
    // σ_min(A − ξI) is 1-Lipschitz in ξ; every circle point lies within
    // half a chord of a sample
    let margin = delta * (std::f64::consts::PI / samples as f64).sin();
    let r0 = smallest - margin;
    if !(r0 > 0.0) {
        return Err(JsrError::precondition(format!(
            "the circle of radius {delta} touches the spectrum (sampled σ_min {smallest:.3e}); choose a smaller δ"
        )));
    }
    Ok((r0, smallest))
}

/// Certificate with δ chosen by [`default_delta`].
pub fn resolvent_cert_default(a: &Matrix, samples: usize) -> Result<ResolventCertificate> {
    let mut cert = resolvent_cert(a, default_delta(a), samples)?;
    cert.delta_source = DeltaSource::HalfGap;
    Ok(cert)
}

/// Samples σ_min(A − ξI) on the circle |ξ − λ*| = δ and certifies
/// ε₀ = r₀/2, Γ = 2δ/r₀.
pub fn resolvent_cert(a: &Matrix, delta: f64, samples: usize) -> Result<ResolventCertificate> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(JsrError::invalid("delta must lie in (0, 1)"));
    }
    if samples < 3 {
        return Err(JsrError::invalid("at least 3 circle samples are needed"));
    }
    let (top, cluster_size, rest) = dominant(a);
    if let Some(z) = rest.iter().find(|z| (*z - top).norm() <= delta + SEPARATION_MARGIN) {
        return Err(JsrError::precondition(format!(
            "eigenvalue {z} lies within δ = {delta} of the dominant eigenvalue {top}; choose a smaller δ"
        )));
    }
    let (r0, sampled_min) = circle_min(a, top, delta, samples)?;
    let (r0_doubled, _) = circle_min(a, top, delta, 2 * samples)?;
    Ok(ResolventCertificate {
        lambda_star: top,
        cluster_size,
        delta,
        delta_source: DeltaSource::Supplied,
        r0,
        sampled_min,
        sampling_margin: sampled_min - r0,
        gamma: 2.0 * delta / r0,
        eps0: r0 / 2.0,
        samples,
        r0_doubled,
        low_confidence: (r0_doubled - r0).abs() >= 0.01 * r0,
    })
}

/// Outcome of randomized checks of a resolvent certificate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResolventTrials {
    pub trials: usize,
    pub violations: usize,
    /// min over trials of ρ(A + εB) − (ρ(A) − Γε).
    pub min_margin: f64,
}

/// Draws B from the spectral unit ball and ε uniformly in [0, ε₀) and checks
/// ρ(A + εB) ≥ ρ(A) − Γε − 1e-9.
pub fn check_resolvent_cert(a: &Matrix, cert: &ResolventCertificate, trials: usize, seed: u64) -> ResolventTrials {
    use rand::Rng;
    let mut rng = random::seeded(seed);
    let rho = a.spectral_radius();
    let mut out = ResolventTrials {
        trials,
        violations: 0,
        min_margin: f64::INFINITY,
    };
    for _ in 0..trials {
        let b = random::unit_ball_matrix(&mut rng, a.dim());
        let eps = cert.eps0 * rng.random::<f64>();
        let margin = a.add_scaled(eps, &b).spectral_radius() - (rho - cert.gamma * eps);
        out.min_margin = out.min_margin.min(margin);
        if margin < -1e-9 {
            out.violations += 1;
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProductGap {
    /// ‖∏(A_i + εB_i) − ∏A_i‖₂
    pub actual: f64,
    /// 2Θ²εk^{2d−1}
    pub bound: f64,
    pub violated: bool,
}

/// Deviation of a perturbed product from the unperturbed one. Requires
/// ‖B_i‖₂ ≤ 1 and ε < k^{−d}/Θ; the set is assumed normalized so that its
/// joint spectral radius is at most 1.
pub fn perturbed_product_gap(
    set: &MatrixSet,
    word: &Word,
    perturbations: &[Matrix],
    eps: f64,
    theta: f64,
) -> Result<ProductGap> {
    let k = word.len();
    let d = set.dim();
    if perturbations.len() != k {
        return Err(JsrError::invalid(format!(
            "{} perturbations given for a word of length {k}",
            perturbations.len()
        )));
    }
    if let Some(b) = perturbations.iter().find(|b| b.dim() != d) {
        return Err(JsrError::DimensionMismatch {
            expected: d,
            found: b.dim(),
        });
    }
    if perturbations.iter().any(|b| b.spectral_norm() > 1.0 + 1e-12) {
        return Err(JsrError::invalid("perturbations must satisfy ‖B‖₂ ≤ 1"));
    }
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(JsrError::invalid("theta must be positive"));
    }
    let limit = (k as f64).powi(-(d as i32)) / theta;
    if !(eps > 0.0 && eps < limit) {
        return Err(JsrError::precondition(format!(
            "eps = {eps:e} must lie in (0, k^(-d)/theta) = (0, {limit:e})"
        )));
    }
    let mut plain = Matrix::identity(d);
    let mut perturbed = Matrix::identity(d);
    for (&i, b) in word.indices().iter().zip(perturbations) {
        let a = set
            .members()
            .get(i)
            .ok_or_else(|| JsrError::invalid(format!("word index {i} out of range")))?;
        plain = a.mul(&plain);
        perturbed = a.add_scaled(eps, b).mul(&perturbed);
    }
    let actual = perturbed.sub(&plain).spectral_norm();
    let bound = 2.0 * theta * theta * eps * (k as f64).powi(2 * d as i32 - 1);
    Ok(ProductGap {
        actual,
        bound,
        violated: actual > bound * (1.0 + 1e-9),
    })
}

/// Counts grid points where (1 + x/k)^k > 1 + 2x for x ∈ [0, 1] in steps
/// of `step` and 1 ≤ k ≤ kmax.
pub fn exp_estimate_violations(step: f64, kmax: u32) -> usize {
    let points = (1.0 / step).round() as usize;
    let mut bad = 0;
    for i in 0..=points {
        let x = (i as f64 * step).min(1.0);
        for k in 1..=kmax {
            if (1.0 + x / k as f64).powi(k as i32) > 1.0 + 2.0 * x {
                bad += 1;
            }
        }
    }
    bad
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certify::theta_estimate;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::Rng;

    #[test]
    fn elsner_examples() {
        let a = Matrix::real(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let g = elsner_gap(&a, &a).unwrap();
        assert_eq!((g.lhs, g.rhs), (0.0, 0.0));

        let b = a.add(&Matrix::real(&[&[0.0, 0.0], &[0.01, 0.0]]));
        let g = elsner_gap(&a, &b).unwrap();
        assert_relative_eq!(g.lhs, 0.1, max_relative = 1e-12);
        // (1 + 1)^{1/2} · 0.01^{1/2}
        assert_relative_eq!(g.rhs, 2f64.sqrt() * 0.1, max_relative = 1e-12);
        assert!(!g.violated);
        assert!(elsner_gap(&a, &Matrix::identity(3)).is_err());
    }

    #[test]
    fn elsner_random_suite() {
        let mut rng = random::seeded(2024);
        for t in 0..1000 {
            let d = 2 + t % 3;
            let a = random::complex_gaussian(&mut rng, d);
            let s = 10f64.powf(-6.0 * rng.random::<f64>());
            let b = a.add_scaled(s, &random::complex_gaussian(&mut rng, d));
            assert!(!elsner_gap(&a, &b).unwrap().violated);
        }
    }

    #[test]
    fn resolvent_diagonal_example() {
        let a = Matrix::real(&[&[1.0, 0.0], &[0.0, 0.0]]);
        let c = resolvent_cert(&a, 0.25, DEFAULT_CIRCLE_SAMPLES).unwrap();
        assert_relative_eq!(c.r0, 0.25, max_relative = 0.01);
        assert!(c.r0 <= 0.25);
        assert_relative_eq!(c.gamma, 2.0, max_relative = 0.02);
        assert_relative_eq!(c.eps0, 0.125, max_relative = 0.01);
        assert_eq!(c.eps0, c.r0 / 2.0);
        assert_eq!(c.gamma, 2.0 * c.delta / c.r0);
        assert!(!c.low_confidence);
        let trials = check_resolvent_cert(&a, &c, 1000, 9);
        assert_eq!(trials.violations, 0);
    }

    #[test]
    fn resolvent_multiplicity_and_failures() {
        let c = resolvent_cert(&Matrix::identity(2), 0.5, 360).unwrap();
        assert_eq!(c.cluster_size, 2);
        assert_relative_eq!(c.sampled_min, 0.5, max_relative = 1e-12);

        let close = Matrix::real(&[&[1.0, 0.0], &[0.0, 0.8]]);
        assert!(matches!(resolvent_cert(&close, 0.25, 720), Err(JsrError::Precondition(_))));
        assert!(resolvent_cert(&close, 1.5, 720).is_err());
        assert_relative_eq!(default_delta(&close), 0.1, max_relative = 1e-12);
        let c = resolvent_cert_default(&close, 720).unwrap();
        assert_eq!(c.delta_source, DeltaSource::HalfGap);
        assert_eq!(default_delta(&Matrix::identity(2)), 0.9);
    }

    #[test]
    fn resolvent_serializes() {
        let a = Matrix::real(&[&[1.0, 0.0], &[0.0, 0.0]]);
        let c = resolvent_cert(&a, 0.25, 90).unwrap();
        let json = serde_json::to_string(&c).unwrap();
        assert!(json.contains("\"delta_source\":\"supplied\""));
        let back: ResolventCertificate = serde_json::from_str(&json).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn product_gap_examples() {
        let set = MatrixSet::singleton(Matrix::real(&[&[0.6, 0.3], &[0.0, 0.5]]));
        let w = Word::new(vec![0]).unwrap();
        let b = Matrix::real(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let g = perturbed_product_gap(&set, &w, &[b.clone()], 0.1, 1.0).unwrap();
        assert_relative_eq!(g.actual, 0.1, max_relative = 1e-12);
        assert!(g.actual <= 2.0 * 0.1);

        let w3 = Word::new(vec![0, 0, 0]).unwrap();
        let zeros = vec![Matrix::zeros(2); 3];
        let g = perturbed_product_gap(&set, &w3, &zeros, 0.01, 1.0).unwrap();
        assert_eq!(g.actual, 0.0);
        assert!(g.bound > 0.0);

        assert!(matches!(
            perturbed_product_gap(&set, &w3, &zeros, 0.5, 1.0),
            Err(JsrError::Precondition(_))
        ));
        assert!(perturbed_product_gap(&set, &w3, &zeros[..2], 0.01, 1.0).is_err());
    }

    #[test]
    fn product_gap_random_suite() {
        let mut rng = random::seeded(77);
        for _ in 0..200 {
            let raw = random::real_gaussian_set(&mut rng, 2, 2);
            let upper = crate::bounds::bracket(&raw, 8).unwrap().upper;
            let set = crate::set::scale(&raw, 1.0 / upper).unwrap();
            let theta = theta_estimate(&set, 10).unwrap().theta;
            let k = 1 + rng.random_range(0..10usize);
            let word = Word::new((0..k).map(|_| rng.random_range(0..set.len())).collect()).unwrap();
            let perts: Vec<Matrix> = (0..k).map(|_| random::unit_ball_matrix(&mut rng, 2)).collect();
            let eps = 0.999 * rng.random::<f64>() * (k as f64).powi(-2) / theta;
            if eps == 0.0 {
                continue;
            }
            let g = perturbed_product_gap(&set, &word, &perts, eps, theta).unwrap();
            assert!(!g.violated, "{g:?}");
        }
    }

    #[test]
    fn exp_estimate_scan() {
        assert_eq!(exp_estimate_violations(1e-3, 100), 0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn resolvent_certificates_are_sound(seed in 0u64..100_000) {
            let mut rng = random::seeded(seed);
            let a = random::complex_gaussian(&mut rng, 3);
            let delta = default_delta(&a);
            prop_assume!(delta > 1e-3);
            let cert = resolvent_cert(&a, delta, 360).unwrap();
            let t = check_resolvent_cert(&a, &cert, 50, seed);
            prop_assert_eq!(t.violations, 0, "{:?}", t);
        }
    }
}
