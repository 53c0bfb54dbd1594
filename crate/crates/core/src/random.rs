//! Seeded generators for random matrices and matrix sets.
//!
//! Every randomized routine in the crate takes an explicit seed and draws
//! from a ChaCha stream, so results do not depend on call order elsewhere.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::matrix::{Matrix, C64};
use crate::set::MatrixSet;

pub type JsrRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> JsrRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `index` derived from `seed`.
pub fn substream(seed: u64, index: u64) -> JsrRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn gaussian(rng: &mut impl Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Matrix with i.i.d. standard normal real entries.
pub fn real_gaussian(rng: &mut impl Rng, d: usize) -> Matrix {
    let data = (0..d * d).map(|_| C64::new(gaussian(rng), 0.0)).collect();
    Matrix::new(d, data).expect("finite")
}

/// Matrix with i.i.d. standard complex normal entries.
pub fn complex_gaussian(rng: &mut impl Rng, d: usize) -> Matrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let data = (0..d * d)
        .map(|_| C64::new(s * gaussian(rng), s * gaussian(rng)))
        .collect();
    Matrix::new(d, data).expect("finite")
}

/// Unit vector uniformly distributed on the complex sphere.
pub fn unit_vector(rng: &mut impl Rng, d: usize) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..d)
            .map(|_| C64::new(gaussian(rng), gaussian(rng)))
            .collect();
        let n = crate::matrix::vec_norm(&v);
        if n > 1e-12 {
            return v.into_iter().map(|z| z / n).collect();
        }
    }
}

/// Haar-distributed unitary (QR of a complex Gaussian with phase fix).
pub fn random_unitary(rng: &mut impl Rng, d: usize) -> Matrix {
    let g = complex_gaussian(rng, d).to_nalgebra();
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    Matrix::from_nalgebra(&q)
}

/// Matrix drawn from the spectral-norm unit ball: a random direction scaled
/// to norm `u^{1/2}` with `u` uniform, so both small and near-unit
/// perturbations occur.
pub fn unit_ball_matrix(rng: &mut impl Rng, d: usize) -> Matrix {
    let g = complex_gaussian(rng, d);
    let n = g.spectral_norm();
    let radius: f64 = rng.random::<f64>().sqrt();
    g.scale(radius / n.max(1e-300))
}

/// Matrix on the spectral-norm unit sphere.
pub fn unit_sphere_matrix(rng: &mut impl Rng, d: usize) -> Matrix {
    let g = complex_gaussian(rng, d);
    let n = g.spectral_norm();
    g.scale(1.0 / n.max(1e-300))
}

/// Random normal matrix U diag(λ) Uᴴ with complex Gaussian eigenvalues.
pub fn normal_matrix(rng: &mut impl Rng, d: usize) -> Matrix {
    let lambdas: Vec<C64> = (0..d)
        .map(|_| C64::new(gaussian(rng), gaussian(rng)))
        .collect();
    let u = random_unitary(rng, d);
    u.mul(&Matrix::diag(&lambdas)).mul(&u.adjoint())
}

/// Set of `count` real Gaussian d×d matrices.
pub fn real_gaussian_set(rng: &mut impl Rng, d: usize, count: usize) -> MatrixSet {
    let members = (0..count).map(|_| real_gaussian(rng, d)).collect();
    MatrixSet::new(members).expect("nonempty finite set")
}
