//! Continuous-time switching via its time-one evolution operators.
//!
//! The lift replaces ẋ = A(t)x, A(t) ∈ M, by the discrete set of products
//! of N factors exp(A_i/N). Sampled switching words give an inner
//! approximation, so only lower bounds on the Lyapunov exponent are sound.

use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::{bracket_with, BoundsBracket, BracketOptions};
use crate::error::{JsrError, Result};
use crate::matrix::Matrix;
use crate::random;
use crate::set::{Budget, MatrixSet, Word};

pub fn matrix_exponential(a: &Matrix) -> Result<Matrix> {
    if !a.is_finite() {
        return Err(JsrError::invalid("matrix has non-finite entries"));
    }
    let e = Matrix::from_nalgebra(&a.to_nalgebra().exp());
    if !e.is_finite() {
        return Err(JsrError::Numerical(format!(
            "matrix exponential overflowed (‖A‖₂ = {:.3e})",
            a.spectral_norm()
        )));
    }
    Ok(e)
}

#[derive(Debug, Clone)]
pub struct LiftedSet {
    pub base: MatrixSet,
    pub steps: usize,
    /// Number of random switching words requested.
    pub samples: usize,
    pub seed: u64,
    /// Distinct switching words, each of length `steps`.
    pub words: Vec<Word>,
    pub lifted: MatrixSet,
}

pub fn lift_continuous(set: &MatrixSet, steps: usize, samples: usize, seed: u64) -> Result<LiftedSet> {
    lift_continuous_with(set, steps, samples, seed, Budget::default())
}

/// Constant words for every generator plus `samples` random words. Word s
/// is drawn from its own substream, so raising `samples` only adds words.
pub fn lift_continuous_with(
    set: &MatrixSet,
    steps: usize,
    samples: usize,
    seed: u64,
    budget: Budget,
) -> Result<LiftedSet> {
    if steps == 0 {
        return Err(JsrError::invalid("steps must be at least 1"));
    }
    let factors = (set.len() as u128 + samples as u128) * steps as u128;
    if factors > budget.0 as u128 {
        return Err(JsrError::BudgetExceeded {
            requested: factors,
            members: set.len(),
            depth: steps,
            budget: budget.0,
        });
    }
    let step_maps = set
        .members()
        .iter()
        .map(|a| matrix_exponential(&a.scale(1.0 / steps as f64)))
        .collect::<Result<Vec<_>>>()?;

    let mut words = BTreeSet::new();
    for i in 0..set.len() {
        words.insert(vec![i; steps]);
    }
    for s in 0..samples {
        let mut rng = random::substream(seed, s as u64);
        words.insert((0..steps).map(|_| rng.random_range(0..set.len())).collect());
    }
    let words: Vec<Word> = words.into_iter().map(Word::new).collect::<Result<_>>()?;

    let products = words
        .iter()
        .map(|w| {
            let mut p = Matrix::identity(set.dim());
            for &i in w.indices() {
                p = step_maps[i].mul(&p);
            }
            p
        })
        .collect();
    let mut lifted = MatrixSet::new(products)?;
    if let Some(label) = set.label() {
        lifted = lifted.with_label(format!("{label} (lifted, N = {steps})"));
    }
    Ok(LiftedSet {
        base: set.clone(),
        steps,
        samples,
        seed,
        words,
        lifted,
    })
}

pub const LYAPUNOV_NOTE: &str =
    "lower is certified for the lifted set; upper_heuristic comes from a sampled inner approximation and is not a bound";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LyapunovEstimate {
    /// ln of the bracket's lower end.
    pub lower: f64,
    /// ln of the bracket's upper end for the sampled lift only.
    pub upper_heuristic: f64,
    pub depth: usize,
    pub bracket: BoundsBracket,
    pub note: String,
}

pub fn max_lyapunov_estimate(lift: &LiftedSet, depth: usize) -> Result<LyapunovEstimate> {
    max_lyapunov_estimate_with(lift, depth, Budget::default())
}

pub fn max_lyapunov_estimate_with(lift: &LiftedSet, depth: usize, budget: Budget) -> Result<LyapunovEstimate> {
    let br = bracket_with(
        &lift.lifted,
        depth,
        &BracketOptions {
            budget,
            ..Default::default()
        },
    )?;
    if !(br.lower > 0.0) {
        return Err(JsrError::Numerical(
            "lifted products have vanishing spectral radius".into(),
        ));
    }
    Ok(LyapunovEstimate {
        lower: br.lower.ln(),
        upper_heuristic: br.upper.ln(),
        depth,
        bracket: br,
        note: LYAPUNOV_NOTE.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::C64;
    use approx::assert_relative_eq;

    fn close(a: &Matrix, b: &Matrix, tol: f64) -> bool {
        a.sub(b).spectral_norm() <= tol * b.spectral_norm().max(1.0)
    }

    #[test]
    fn exponential_examples() {
        assert!(close(&matrix_exponential(&Matrix::zeros(3)).unwrap(), &Matrix::identity(3), 0.0));
        let d = Matrix::real(&[&[0.7, 0.0], &[0.0, -3.0]]);
        let e = Matrix::real(&[&[0.7f64.exp(), 0.0], &[0.0, (-3f64).exp()]]);
        assert!(close(&matrix_exponential(&d).unwrap(), &e, 1e-12));
        let n = Matrix::real(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let u = Matrix::real(&[&[1.0, 1.0], &[0.0, 1.0]]);
        assert!(close(&matrix_exponential(&n).unwrap(), &u, 1e-14));
        // rotation generator
        let t = 1.3;
        let j = Matrix::real(&[&[0.0, -t], &[t, 0.0]]);
        let r = Matrix::real(&[&[t.cos(), -t.sin()], &[t.sin(), t.cos()]]);
        assert!(close(&matrix_exponential(&j).unwrap(), &r, 1e-12));
        assert!(matrix_exponential(&Matrix::identity(2).scale(1e4)).is_err());
    }

    #[test]
    fn exponential_of_large_normal_matrices() {
        let mut rng = random::seeded(4);
        for _ in 0..20 {
            let u = random::random_unitary(&mut rng, 4);
            let eig: Vec<C64> = (0..4)
                .map(|_| C64::new(20.0 * (rng.random::<f64>() - 0.5), 20.0 * (rng.random::<f64>() - 0.5)))
                .collect();
            let a = Matrix::diag(&eig).conjugate_by(&u.adjoint());
            let expected = Matrix::diag(&eig.iter().map(|z| z.exp()).collect::<Vec<_>>()).conjugate_by(&u.adjoint());
            assert!(close(&matrix_exponential(&a).unwrap(), &expected, 1e-10));
        }
    }

    #[test]
    fn singleton_lift_is_the_exponential() {
        let a = Matrix::real(&[&[-0.3, 2.0], &[0.5, 0.1]]);
        let e = matrix_exponential(&a).unwrap();
        for steps in [1, 4, 33] {
            let l = lift_continuous(&MatrixSet::singleton(a.clone()), steps, 5, 1).unwrap();
            assert_eq!(l.lifted.len(), 1);
            assert!(close(&l.lifted.members()[0], &e, 1e-12));
        }
    }

    #[test]
    fn lyapunov_examples() {
        let diag = MatrixSet::singleton(Matrix::real(&[&[-1.0, 0.0], &[0.0, -2.0]]));
        let est = max_lyapunov_estimate(&lift_continuous(&diag, 16, 0, 0).unwrap(), 4).unwrap();
        assert!((est.lower + 1.0).abs() <= 1e-9, "{est:?}");
        assert!(est.note.contains("not a bound"));

        let zero = MatrixSet::singleton(Matrix::zeros(2));
        assert_eq!(max_lyapunov_estimate(&lift_continuous(&zero, 8, 0, 0).unwrap(), 3).unwrap().lower, 0.0);

        let nil = MatrixSet::singleton(Matrix::real(&[&[0.0, 1.0], &[0.0, 0.0]]));
        let est = max_lyapunov_estimate(&lift_continuous(&nil, 8, 0, 0).unwrap(), 3).unwrap();
        assert_eq!(est.lower, 0.0);
    }

    #[test]
    fn commuting_diagonal_pair() {
        let set = MatrixSet::new(vec![
            Matrix::real(&[&[0.3, 0.0], &[0.0, -1.0]]),
            Matrix::real(&[&[-0.5, 0.0], &[0.0, 0.2]]),
        ])
        .unwrap();
        let lift = lift_continuous(&set, 8, 30, 3).unwrap();
        let est = max_lyapunov_estimate(&lift, 3).unwrap();
        // every product is diagonal with exponent a convex mix of the entries
        assert_relative_eq!(est.lower, 0.3, max_relative = 1e-12);
        assert_relative_eq!(est.upper_heuristic, 0.3, max_relative = 1e-9);
    }

    #[test]
    fn normal_singletons_match_spectral_abscissa() {
        let mut rng = random::seeded(11);
        for _ in 0..50 {
            let a = random::normal_matrix(&mut rng, 3);
            let abscissa = a.eigenvalues().iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
            let est = max_lyapunov_estimate(&lift_continuous(&MatrixSet::singleton(a), 10, 0, 0).unwrap(), 3).unwrap();
            assert!((est.lower - abscissa).abs() <= 1e-8, "{} vs {abscissa}", est.lower);
        }
    }

    #[test]
    fn more_samples_never_lower_the_estimate() {
        let mut rng = random::seeded(21);
        let set = random::real_gaussian_set(&mut rng, 2, 2);
        let mut prev = f64::NEG_INFINITY;
        let mut prev_words = 0;
        for samples in [0, 4, 16, 64] {
            let lift = lift_continuous(&set, 6, samples, 9).unwrap();
            assert!(lift.words.len() >= prev_words);
            prev_words = lift.words.len();
            let est = max_lyapunov_estimate(&lift, 2).unwrap();
            assert!(est.lower >= prev, "{samples}: {} < {prev}", est.lower);
            prev = est.lower;
        }
    }

    #[test]
    fn lifted_members_are_invertible() {
        let mut rng = random::seeded(8);
        let set = random::real_gaussian_set(&mut rng, 3, 3);
        let lift = lift_continuous(&set, 5, 20, 2).unwrap();
        for w in &lift.words {
            assert_eq!(w.len(), 5);
        }
        for m in lift.lifted.members() {
            assert!(m.min_singular_value() > 0.0);
            assert!(m.spectral_radius() > 0.0);
        }
    }

    #[test]
    fn lift_errors() {
        let set = MatrixSet::singleton(Matrix::identity(2));
        assert!(lift_continuous(&set, 0, 1, 0).is_err());
        assert!(matches!(
            lift_continuous_with(&set, 100, 100, 0, Budget(1000)),
            Err(JsrError::BudgetExceeded { .. })
        ));
    }
}
