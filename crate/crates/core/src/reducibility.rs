//! Common invariant subspaces, maximal flags and block decompositions.
//!
//! A flag is stored as one unitary matrix `W` whose leading `dims[j]`
//! columns span F_{j+1}, so every member is block upper triangular in the
//! basis given by the columns of `W`. The detected index is a lower bound on
//! the true reducibility index: a subspace that no seed reaches is missed.

use std::collections::VecDeque;

use rand::Rng;

use crate::error::{JsrError, Result};
use crate::matrix::{vec_dot, vec_norm, Matrix, RectMatrix, C64};
use crate::random;
use crate::set::MatrixSet;

/// Default invariance tolerance, relative to ‖A‖₂.
pub const DEFAULT_TOL: f64 = 1e-8;

const RANDOM_COMBINATIONS: usize = 10;
const SEARCH_SEED: u64 = 0x0f1a_95ee_d000_0001;
/// Eigenvalues closer than this (relative to ‖A‖₂) are also tried as one
/// cluster, whose mean is far more accurate than the individual values of
/// a defective eigenvalue.
const CLUSTER_RADIUS: f64 = 1e-5;

/// A chain of common invariant subspaces {0} ⊊ F_1 ⊊ … ⊊ F_m = K^d.
#[derive(Debug, Clone, PartialEq)]
pub struct Flag {
    d: usize,
    w: Matrix,
    dims: Vec<usize>,
    tol: f64,
}

impl Flag {
    /// Flag spanned by leading columns of the unitary `w`.
    pub fn new(w: Matrix, dims: Vec<usize>, tol: f64) -> Result<Self> {
        let d = w.dim();
        if dims.is_empty() || dims.windows(2).any(|p| p[0] >= p[1]) || dims[0] == 0 {
            return Err(JsrError::invalid("flag dimensions must be strictly increasing and positive"));
        }
        if *dims.last().unwrap() != d {
            return Err(JsrError::invalid("last flag dimension must equal d"));
        }
        if !(tol >= 0.0) {
            return Err(JsrError::invalid("flag tolerance must be nonnegative"));
        }
        let gram = w.adjoint().mul(&w).sub(&Matrix::identity(d));
        if gram.max_abs() > 1e-10 {
            return Err(JsrError::invalid("flag basis is not orthonormal"));
        }
        Ok(Flag { d, w, dims, tol })
    }

    /// The flag span{e_1} ⊂ span{e_1, e_2} ⊂ … with the given dimensions.
    pub fn coordinate(d: usize, dims: Vec<usize>, tol: f64) -> Result<Self> {
        Flag::new(Matrix::identity(d), dims, tol)
    }

    /// The trivial flag {0} ⊊ K^d.
    pub fn trivial(d: usize) -> Self {
        Flag {
            d,
            w: Matrix::identity(d),
            dims: vec![d],
            tol: DEFAULT_TOL,
        }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// Detected reducibility index (number of nontrivial flag members).
    pub fn index_m(&self) -> usize {
        self.dims.len()
    }

    /// dim F_1 < dim F_2 < … < dim F_m = d.
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// dim X_i = dim F_i − dim F_{i−1}.
    pub fn block_sizes(&self) -> Vec<usize> {
        let mut prev = 0;
        self.dims
            .iter()
            .map(|&k| {
                let s = k - prev;
                prev = k;
                s
            })
            .collect()
    }

    /// Start column of each block X_i in `w`.
    pub fn offsets(&self) -> Vec<usize> {
        std::iter::once(0)
            .chain(self.dims[..self.dims.len() - 1].iter().copied())
            .collect()
    }

    /// Unitary whose columns are adapted to the flag.
    pub fn w(&self) -> &Matrix {
        &self.w
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Orthonormal basis of F_{j+1} as a d × dims[j] matrix.
    pub fn basis(&self, j: usize) -> RectMatrix {
        self.w.block_rect(0, self.d, 0, self.dims[j])
    }

    /// Orthonormal basis of X_{i+1} = F_i^⊥ ∩ F_{i+1}.
    pub fn block_basis(&self, i: usize) -> RectMatrix {
        let off = self.offsets()[i];
        self.w.block_rect(0, self.d, off, self.block_sizes()[i])
    }

    /// max over members A and j of ‖(I − U_jU_jᴴ) A U_j‖₂ / ‖A‖₂.
    pub fn residual(&self, set: &MatrixSet) -> Result<f64> {
        if set.dim() != self.d {
            return Err(JsrError::DimensionMismatch {
                expected: self.d,
                found: set.dim(),
            });
        }
        let mut worst = 0.0f64;
        for a in set.members() {
            let norm = a.spectral_norm();
            if norm == 0.0 {
                continue;
            }
            let b = a.conjugate_by(&self.w);
            for &k in &self.dims[..self.dims.len() - 1] {
                let lower = b.block_rect(k, self.d - k, 0, k);
                worst = worst.max(lower.spectral_norm() / norm);
            }
        }
        Ok(worst)
    }

    /// Fails unless the flag is invariant under every member at `tol`.
    pub fn certify(&self, set: &MatrixSet) -> Result<f64> {
        let r = self.residual(set)?;
        if r > self.tol {
            return Err(JsrError::precondition(format!(
                "flag is not invariant: residual {r:.3e} exceeds tolerance {:.3e}",
                self.tol
            )));
        }
        Ok(r)
    }
}

/// Orthonormal basis of the smallest subspace containing `v` and invariant
/// under every member. Rank decisions treat a component below
/// tol·‖A‖₂/√d as zero.
pub fn minimal_invariant_subspace(set: &MatrixSet, v: &[C64], tol: f64) -> Result<Vec<Vec<C64>>> {
    if v.len() != set.dim() {
        return Err(JsrError::DimensionMismatch {
            expected: set.dim(),
            found: v.len(),
        });
    }
    if vec_norm(v) == 0.0 || !v.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        return Err(JsrError::invalid("seed vector must be finite and nonzero"));
    }
    let members: Vec<(Matrix, f64)> = set
        .members()
        .iter()
        .map(|a| (a.clone(), a.spectral_norm()))
        .collect();
    Ok(orbit_closure(&members, v, tol))
}

fn orthogonalize(basis: &[Vec<C64>], x: &mut [C64]) {
    for _ in 0..2 {
        for q in basis {
            let c = vec_dot(q, x);
            for (xi, qi) in x.iter_mut().zip(q) {
                *xi -= c * qi;
            }
        }
    }
}

fn normalized(mut x: Vec<C64>) -> Vec<C64> {
    let n = vec_norm(&x);
    for z in &mut x {
        *z /= n;
    }
    x
}

/// `members` carry the norm of the original matrix they were restricted
/// from, so tolerances stay relative to the input set.
fn orbit_closure(members: &[(Matrix, f64)], v: &[C64], tol: f64) -> Vec<Vec<C64>> {
    let d = v.len();
    let per_vector = tol / (d as f64).sqrt();
    let mut basis = vec![normalized(v.to_vec())];
    let mut pending: VecDeque<usize> = VecDeque::from([0]);
    while let Some(i) = pending.pop_front() {
        if basis.len() == d {
            break;
        }
        for (a, scale) in members {
            if *scale == 0.0 {
                continue;
            }
            let mut x = a.mul_vec(&basis[i]);
            orthogonalize(&basis, &mut x);
            if vec_norm(&x) > per_vector * scale {
                basis.push(normalized(x));
                pending.push_back(basis.len() - 1);
                if basis.len() == d {
                    break;
                }
            }
        }
    }
    basis
}

/// Orthonormal completion of `basis` to all of K^d, greedily from
/// coordinate vectors.
fn complement(basis: &[Vec<C64>], d: usize) -> Vec<Vec<C64>> {
    let mut all = basis.to_vec();
    let mut out = Vec::new();
    while all.len() < d {
        let best = (0..d)
            .map(|i| {
                let mut e = vec![C64::new(0.0, 0.0); d];
                e[i] = C64::new(1.0, 0.0);
                orthogonalize(&all, &mut e);
                e
            })
            .max_by(|a, b| vec_norm(a).total_cmp(&vec_norm(b)))
            .expect("d > 0");
        let q = normalized(best);
        all.push(q.clone());
        out.push(q);
    }
    out
}

fn eigen_seeds(a: &Matrix) -> Vec<Vec<C64>> {
    let d = a.dim();
    let eigs = a.eigenvalues();
    let radius = CLUSTER_RADIUS * a.spectral_norm().max(f64::MIN_POSITIVE);
    let mut shifts: Vec<C64> = eigs.clone();
    for (i, &l) in eigs.iter().enumerate() {
        let cluster: Vec<C64> = eigs.iter().copied().filter(|&m| (m - l).norm() <= radius).collect();
        if cluster.len() > 1 && eigs[..i].iter().all(|&m| (m - l).norm() > radius) {
            shifts.push(cluster.iter().sum::<C64>() / cluster.len() as f64);
        }
    }
    shifts
        .into_iter()
        .map(|l| a.sub(&Matrix::identity(d).scale_c(l)).null_vector())
        .collect()
}

/// Smallest proper invariant subspace reachable from the seeds, if any.
fn find_split(members: &[(Matrix, f64)], tol: f64) -> Option<Vec<Vec<C64>>> {
    let k = members[0].0.dim();
    if k == 1 {
        return None;
    }
    let mut seeds: Vec<Vec<C64>> = (0..k)
        .map(|i| {
            let mut e = vec![C64::new(0.0, 0.0); k];
            e[i] = C64::new(1.0, 0.0);
            e
        })
        .collect();
    for (a, _) in members {
        seeds.extend(eigen_seeds(a));
    }
    if members.len() > 1 {
        let mut rng = random::seeded(SEARCH_SEED);
        for _ in 0..RANDOM_COMBINATIONS {
            let weights: Vec<f64> = members.iter().map(|_| rng.random::<f64>() + 1e-3).collect();
            let total: f64 = weights.iter().sum();
            let mut c = Matrix::zeros(k);
            for ((a, _), w) in members.iter().zip(&weights) {
                c = c.add_scaled(w / total, a);
            }
            seeds.extend(eigen_seeds(&c));
        }
    }
    let mut best: Option<Vec<Vec<C64>>> = None;
    for s in seeds {
        if vec_norm(&s) == 0.0 || !s.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            continue;
        }
        let sub = orbit_closure(members, &s, tol);
        if sub.len() < k && best.as_ref().map_or(true, |b| sub.len() < b.len()) {
            let done = sub.len() == 1;
            best = Some(sub);
            if done {
                break;
            }
        }
    }
    best
}

fn compress(members: &[(Matrix, f64)], basis: &[Vec<C64>]) -> Vec<(Matrix, f64)> {
    let p = basis.len();
    members
        .iter()
        .map(|(a, scale)| {
            let images: Vec<Vec<C64>> = basis.iter().map(|q| a.mul_vec(q)).collect();
            let mut data = Vec::with_capacity(p * p);
            for qi in basis {
                for img in &images {
                    data.push(vec_dot(qi, img));
                }
            }
            (Matrix::from_raw(p, data), *scale)
        })
        .collect()
}

/// Returns flag-adapted columns (in C^k) and flag dimensions.
fn split_recursively(members: &[(Matrix, f64)], tol: f64) -> (Vec<Vec<C64>>, Vec<usize>) {
    let k = members[0].0.dim();
    let identity_cols = || {
        (0..k)
            .map(|i| {
                let mut e = vec![C64::new(0.0, 0.0); k];
                e[i] = C64::new(1.0, 0.0);
                e
            })
            .collect::<Vec<_>>()
    };
    let Some(q) = find_split(members, tol) else {
        return (identity_cols(), vec![k]);
    };
    let p = q.len();
    let qc = complement(&q, k);
    let (w1, d1) = split_recursively(&compress(members, &q), tol);
    let (w2, d2) = split_recursively(&compress(members, &qc), tol);
    let lift = |outer: &[Vec<C64>], inner: Vec<Vec<C64>>| -> Vec<Vec<C64>> {
        inner
            .into_iter()
            .map(|c| {
                (0..k)
                    .map(|r| outer.iter().zip(&c).map(|(col, &ci)| col[r] * ci).sum())
                    .collect()
            })
            .collect()
    };
    let mut cols = lift(&q, w1);
    cols.extend(lift(&qc, w2));
    let mut dims = d1;
    dims.extend(d2.into_iter().map(|x| x + p));
    (cols, dims)
}

/// Rotates `x` so its first largest-modulus entry is real and positive.
fn fix_phase(x: &mut [C64]) {
    let mut big = 0;
    for (i, z) in x.iter().enumerate() {
        if z.norm() > x[big].norm() * (1.0 + 1e-12) {
            big = i;
        }
    }
    let n = x[big].norm();
    if n > 0.0 {
        let phase = x[big].conj() / n;
        for z in x.iter_mut() {
            *z *= phase;
        }
    }
}

/// A maximal flag found by recursively splitting off the smallest invariant
/// subspace reachable from coordinate, eigenvector and random-combination
/// seeds. `index_m` = 1 means no common invariant subspace was detected.
pub fn maximal_flag(set: &MatrixSet, tol: f64) -> Result<Flag> {
    if !(tol >= 0.0) || !tol.is_finite() {
        return Err(JsrError::invalid("tolerance must be finite and nonnegative"));
    }
    let d = set.dim();
    let members: Vec<(Matrix, f64)> = set
        .members()
        .iter()
        .map(|a| (a.clone(), a.spectral_norm()))
        .collect();
    let (mut cols, dims) = split_recursively(&members, tol);
    for c in &mut cols {
        fix_phase(c);
    }
    let mut data = vec![C64::new(0.0, 0.0); d * d];
    for (j, c) in cols.iter().enumerate() {
        for (i, &z) in c.iter().enumerate() {
            data[i * d + j] = z;
        }
    }
    Ok(Flag {
        d,
        w: Matrix::from_raw(d, data),
        dims,
        tol,
    })
}

/// The set written in flag-adapted coordinates: {Wᴴ A W}.
pub fn flag_coordinates(set: &MatrixSet, flag: &Flag) -> Result<MatrixSet> {
    if set.dim() != flag.dim() {
        return Err(JsrError::DimensionMismatch {
            expected: flag.dim(),
            found: set.dim(),
        });
    }
    set.map(|a| a.conjugate_by(flag.w()))
}

/// Blocks π_i A ι_j of every member relative to a flag.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockDecomposition {
    sizes: Vec<usize>,
    /// `blocks[i][j][a]` is block (i, j) of member a.
    blocks: Vec<Vec<Vec<RectMatrix>>>,
}

impl BlockDecomposition {
    pub fn index_m(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Block (i, j) of every member, in member order.
    pub fn block(&self, i: usize, j: usize) -> &[RectMatrix] {
        &self.blocks[i][j]
    }

    /// max over members of ‖π_i A ι_j‖₂.
    pub fn max_block_norm(&self, i: usize, j: usize) -> f64 {
        self.blocks[i][j]
            .iter()
            .map(RectMatrix::spectral_norm)
            .fold(0.0, f64::max)
    }

    /// The diagonal block set M_ii.
    pub fn diagonal_set(&self, i: usize) -> MatrixSet {
        let k = self.sizes[i];
        let members = self.blocks[i][i]
            .iter()
            .map(|b| Matrix::from_raw(k, b.data.clone()))
            .collect();
        MatrixSet::new(members).expect("blocks of a valid set are finite")
    }
}

/// Splits every member into flag blocks. Fails if the flag is not
/// invariant for `set` at its own tolerance.
pub fn block_decompose(set: &MatrixSet, flag: &Flag) -> Result<BlockDecomposition> {
    flag.certify(set)?;
    let sizes = flag.block_sizes();
    let offsets = flag.offsets();
    let m = sizes.len();
    let transformed: Vec<Matrix> = set.members().iter().map(|a| a.conjugate_by(flag.w())).collect();
    let blocks = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| {
                    transformed
                        .iter()
                        .map(|b| b.block_rect(offsets[i], sizes[i], offsets[j], sizes[j]))
                        .collect()
                })
                .collect()
        })
        .collect();
    Ok(BlockDecomposition { sizes, blocks })
}
