//! Flag-adapted block norms and the operator bounds built on them.
//!
//! A [`BlockNorm`] splits x into its components along the blocks X_i of a
//! flag and combines the per-block values as
//! v(x) = ‖(v_1(π_1 x), …, v_m(π_m x))‖₂.

use serde::{Deserialize, Serialize};

use crate::bounds::OperatorNormBound;
use crate::error::{JsrError, Result};
use crate::matrix::{vec_norm, Matrix, RectMatrix, C64};
use crate::random;
use crate::reducibility::{BlockDecomposition, Flag};
use crate::set::{Budget, MatrixSet};

/// Seed for sphere sampling when the caller does not pick one.
pub const DEFAULT_SAMPLE_SEED: u64 = 0x0ecc_5a4d;

/// Norm on a single block, in the block's orthonormal coordinates.
#[derive(Debug, Clone, PartialEq)]
pub enum BlockKind {
    /// scale·‖y‖₂
    Euclidean { scale: f64 },
    /// ‖diag(w) y‖₂
    WeightedEuclidean { weights: Vec<f64> },
    /// max_k w_k |y_k|
    WeightedMax { weights: Vec<f64> },
    /// Truncated orbit norm; only valid as the single block of a full-space norm.
    Extremal(ExtremalNorm),
}

impl BlockKind {
    fn validate(&self, size: usize) -> Result<()> {
        let positive = |w: &[f64]| w.iter().all(|&x| x > 0.0 && x.is_finite());
        match self {
            BlockKind::Euclidean { scale } if !(*scale > 0.0 && scale.is_finite()) => {
                Err(JsrError::invalid("block norm scale must be positive"))
            }
            BlockKind::WeightedEuclidean { weights } | BlockKind::WeightedMax { weights }
                if weights.len() != size || !positive(weights) =>
            {
                Err(JsrError::invalid(format!(
                    "block of size {size} needs {size} positive weights"
                )))
            }
            BlockKind::Extremal(e) if e.d != size => Err(JsrError::DimensionMismatch {
                expected: size,
                found: e.d,
            }),
            _ => Ok(()),
        }
    }

    pub fn eval(&self, y: &[C64]) -> f64 {
        match self {
            BlockKind::Euclidean { scale } => scale * vec_norm(y),
            BlockKind::WeightedEuclidean { weights } => weights
                .iter()
                .zip(y)
                .map(|(w, z)| w * w * z.norm_sqr())
                .sum::<f64>()
                .sqrt(),
            BlockKind::WeightedMax { weights } => weights
                .iter()
                .zip(y)
                .map(|(w, z)| w * z.norm())
                .fold(0.0, f64::max),
            BlockKind::Extremal(e) => e.eval(y),
        }
    }

    /// Bracket on c⁻ = min over the Euclidean unit sphere.
    fn c_minus(&self) -> (f64, f64) {
        match self {
            BlockKind::Euclidean { scale } => (*scale, *scale),
            BlockKind::WeightedEuclidean { weights } => {
                let m = weights.iter().copied().fold(f64::INFINITY, f64::min);
                (m, m)
            }
            BlockKind::WeightedMax { weights } => {
                // all w_k|y_k| equal at the minimizer
                let c = weights.iter().map(|w| w.powi(-2)).sum::<f64>().powf(-0.5);
                (c, c)
            }
            BlockKind::Extremal(_) => (1.0, f64::INFINITY),
        }
    }

    /// Bracket on c⁺ = max over the Euclidean unit sphere.
    fn c_plus(&self) -> (f64, f64) {
        match self {
            BlockKind::Euclidean { scale } => (*scale, *scale),
            BlockKind::WeightedEuclidean { weights } | BlockKind::WeightedMax { weights } => {
                let m = weights.iter().copied().fold(0.0, f64::max);
                (m, m)
            }
            BlockKind::Extremal(e) => (1.0, e.growth_cap()),
        }
    }

    /// Extra unit vectors worth sampling: extremizers of the weighted norms.
    fn corners(&self) -> Vec<Vec<C64>> {
        match self {
            BlockKind::WeightedMax { weights } => {
                let y: Vec<C64> = weights.iter().map(|w| C64::new(1.0 / w, 0.0)).collect();
                let n = vec_norm(&y);
                vec![y.into_iter().map(|z| z / n).collect()]
            }
            _ => Vec::new(),
        }
    }

    fn is_euclidean_type(&self) -> bool {
        matches!(
            self,
            BlockKind::Euclidean { .. } | BlockKind::WeightedEuclidean { .. }
        )
    }

    fn diag_weights(&self, size: usize) -> Vec<f64> {
        match self {
            BlockKind::Euclidean { scale } => vec![*scale; size],
            BlockKind::WeightedEuclidean { weights } | BlockKind::WeightedMax { weights } => {
                weights.clone()
            }
            BlockKind::Extremal(_) => vec![1.0; size],
        }
    }
}

/// Flag-adapted norm v(x) = ‖(v_1(π_1 x), …, v_m(π_m x))‖₂.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockNorm {
    d: usize,
    w: Matrix,
    sizes: Vec<usize>,
    offsets: Vec<usize>,
    kinds: Vec<BlockKind>,
}

impl BlockNorm {
    /// Blocks of `flag` with the given per-block norms.
    pub fn new(flag: &Flag, kinds: Vec<BlockKind>) -> Result<Self> {
        BlockNorm::from_parts(flag.w().clone(), flag.block_sizes(), kinds)
    }

    /// Blocks are consecutive runs of `sizes[i]` columns of the unitary `w`.
    pub fn from_parts(w: Matrix, sizes: Vec<usize>, kinds: Vec<BlockKind>) -> Result<Self> {
        let d = w.dim();
        if sizes.iter().sum::<usize>() != d || sizes.contains(&0) {
            return Err(JsrError::invalid("block sizes must be positive and sum to d"));
        }
        if kinds.len() != sizes.len() {
            return Err(JsrError::invalid(format!(
                "{} block norms given for {} blocks",
                kinds.len(),
                sizes.len()
            )));
        }
        if kinds.len() > 1 && kinds.iter().any(|k| matches!(k, BlockKind::Extremal(_))) {
            return Err(JsrError::invalid("extremal block norms are only supported with a single block"));
        }
        for (k, &s) in kinds.iter().zip(&sizes) {
            k.validate(s)?;
        }
        if w.adjoint().mul(&w).sub(&Matrix::identity(d)).max_abs() > 1e-10 {
            return Err(JsrError::invalid("block basis is not orthonormal"));
        }
        let mut offsets = vec![0];
        for s in &sizes[..sizes.len() - 1] {
            offsets.push(offsets.last().unwrap() + s);
        }
        Ok(BlockNorm {
            d,
            w,
            sizes,
            offsets,
            kinds,
        })
    }

    /// The Euclidean norm on K^d as a single block.
    pub fn euclidean(d: usize) -> Self {
        BlockNorm {
            d,
            w: Matrix::identity(d),
            sizes: vec![d],
            offsets: vec![0],
            kinds: vec![BlockKind::Euclidean { scale: 1.0 }],
        }
    }

    /// A truncated extremal norm as a single-block norm.
    pub fn extremal(norm: ExtremalNorm) -> Self {
        let d = norm.d;
        BlockNorm {
            d,
            w: Matrix::identity(d),
            sizes: vec![d],
            offsets: vec![0],
            kinds: vec![BlockKind::Extremal(norm)],
        }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn index_m(&self) -> usize {
        self.sizes.len()
    }

    pub fn kinds(&self) -> &[BlockKind] {
        &self.kinds
    }

    /// Block coordinates Wᴴx split per block.
    fn components(&self, x: &[C64]) -> Vec<Vec<C64>> {
        let y = self.w.adjoint().mul_vec(x);
        self.offsets
            .iter()
            .zip(&self.sizes)
            .map(|(&o, &s)| y[o..o + s].to_vec())
            .collect()
    }

    /// (v_1(π_1 x), …, v_m(π_m x))
    pub fn block_values(&self, x: &[C64]) -> Vec<f64> {
        self.components(x)
            .iter()
            .zip(&self.kinds)
            .map(|(y, k)| k.eval(y))
            .collect()
    }

    pub fn eval(&self, x: &[C64]) -> f64 {
        self.block_values(x).iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Upper bound on sup v_i(B y) / v_j(y) for a block B: X_j → X_i.
    fn induced(&self, i: usize, j: usize, b: &RectMatrix) -> f64 {
        let (to, from) = (&self.kinds[i], &self.kinds[j]);
        if b.data.iter().all(|z| *z == C64::new(0.0, 0.0)) {
            return 0.0;
        }
        if to.is_euclidean_type() && from.is_euclidean_type() {
            let left = to.diag_weights(self.sizes[i]);
            let right: Vec<f64> = from.diag_weights(self.sizes[j]).iter().map(|w| 1.0 / w).collect();
            return b.scale_rows_cols(&left, &right).spectral_norm();
        }
        if let (BlockKind::WeightedMax { weights: wi }, BlockKind::WeightedMax { weights: wj }) = (to, from) {
            return (0..b.rows)
                .map(|r| (0..b.cols).map(|c| wi[r] * b.get(r, c).norm() / wj[c]).sum::<f64>())
                .fold(0.0, f64::max);
        }
        if let (true, BlockKind::Extremal(e)) = (i == j, to) {
            return e.operator_bound(&Matrix::from_raw(b.rows, b.data.clone()));
        }
        to.c_plus().1 / from.c_minus().0 * b.spectral_norm()
    }
}

/// ‖(r_ij)‖₂ with r_ij an upper bound on the induced norm of π_i A ι_j;
/// an upper bound on the v-induced operator norm of A.
pub fn block_operator_bound(v: &BlockNorm, a: &Matrix) -> Result<f64> {
    if a.dim() != v.d {
        return Err(JsrError::DimensionMismatch {
            expected: v.d,
            found: a.dim(),
        });
    }
    Ok(block_bound_unchecked(v, a))
}

fn block_bound_unchecked(v: &BlockNorm, a: &Matrix) -> f64 {
    let m = v.index_m();
    let b = a.conjugate_by(&v.w);
    if m == 1 {
        return v.induced(0, 0, &b.block_rect(0, v.d, 0, v.d));
    }
    let mut r = Matrix::zeros(m);
    for i in 0..m {
        for j in 0..m {
            let blk = b.block_rect(v.offsets[i], v.sizes[i], v.offsets[j], v.sizes[j]);
            r.set(i, j, C64::new(v.induced(i, j, &blk), 0.0));
        }
    }
    r.spectral_norm()
}

impl OperatorNormBound for BlockNorm {
    fn tag(&self) -> String {
        match (&self.kinds[..], self.index_m()) {
            ([BlockKind::Extremal(e)], _) => e.tag(),
            (_, m) => format!("block-norm(m={m})"),
        }
    }

    fn bound(&self, a: &Matrix) -> f64 {
        block_bound_unchecked(self, a)
    }
}

/// Brackets on c⁻(v), c⁺(v) and ecc₂(v) = c⁺/c⁻.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EccentricityEstimate {
    pub c_minus_lower: f64,
    pub c_minus_upper: f64,
    pub c_plus_lower: f64,
    pub c_plus_upper: f64,
    pub ecc_lower: f64,
    pub ecc_upper: f64,
    pub samples: usize,
}

pub fn eccentricity(v: &BlockNorm, samples: usize) -> Result<EccentricityEstimate> {
    eccentricity_seeded(v, samples, DEFAULT_SAMPLE_SEED)
}

/// Combines exact per-block extrema (c⁻(v) = min_i c⁻(v_i) and
/// c⁺(v) = max_i c⁺(v_i), since the blocks are orthogonal) with sampled
/// sphere values for blocks whose extrema are not known in closed form.
pub fn eccentricity_seeded(v: &BlockNorm, samples: usize, seed: u64) -> Result<EccentricityEstimate> {
    if samples == 0 {
        return Err(JsrError::invalid("eccentricity needs at least one sample"));
    }
    let mut cm = (f64::INFINITY, f64::INFINITY);
    let mut cp = (0.0f64, 0.0f64);
    for k in &v.kinds {
        let (lo, hi) = k.c_minus();
        cm = (cm.0.min(lo), cm.1.min(hi));
        let (lo, hi) = k.c_plus();
        cp = (cp.0.max(lo), cp.1.max(hi));
    }

    let mut probes: Vec<Vec<C64>> = Vec::new();
    for i in 0..v.index_m() {
        let embed = |y: &[C64]| -> Vec<C64> {
            let mut full = vec![C64::new(0.0, 0.0); v.d];
            full[v.offsets[i]..v.offsets[i] + v.sizes[i]].copy_from_slice(y);
            v.w.mul_vec(&full)
        };
        for c in 0..v.sizes[i] {
            let mut y = vec![C64::new(0.0, 0.0); v.sizes[i]];
            y[c] = C64::new(1.0, 0.0);
            probes.push(embed(&y));
        }
        for y in v.kinds[i].corners() {
            probes.push(embed(&y));
        }
    }
    let mut rng = random::seeded(seed);
    for _ in 0..samples {
        probes.push(random::unit_vector(&mut rng, v.d));
    }
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for x in &probes {
        let val = v.eval(x);
        lo = lo.min(val);
        hi = hi.max(val);
    }
    // samples only refine brackets; rounding must not push past exact values
    let c_minus_upper = cm.1.min(lo).max(cm.0);
    let c_minus_lower = cm.0;
    let c_plus_lower = cp.0.max(hi).min(cp.1);
    let c_plus_upper = cp.1;
    Ok(EccentricityEstimate {
        c_minus_lower,
        c_minus_upper,
        c_plus_lower,
        c_plus_upper,
        ecc_lower: (c_plus_lower / c_minus_upper).max(1.0),
        ecc_upper: c_plus_upper / c_minus_lower,
        samples,
    })
}

/// v_K(x) = max over 0 ≤ k ≤ K and S ∈ S_k(M) of ‖Sx‖₂ / ρ̂^k.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtremalNorm {
    d: usize,
    rho_hat: f64,
    depth: usize,
    /// (S, 1/ρ̂^k, k) for every product, the identity first.
    terms: Vec<(Matrix, f64, usize)>,
}

/// How often the maximum defining v_K(Ax) is attained below depth K.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttainmentStats {
    pub probes: usize,
    /// Probes whose maximum sits at k < K, where v_K(Ax) ≤ ρ̂·v_K(x) holds.
    pub interior: usize,
    /// max over probes of v_K(Ax) / v_K(x).
    pub max_ratio: f64,
    /// max over interior probes of v_K(Ax) / (ρ̂·v_K(x)); at most 1.
    pub max_interior_ratio: f64,
}

impl ExtremalNorm {
    pub fn rho_hat(&self) -> f64 {
        self.rho_hat
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn tag(&self) -> String {
        format!("extremal(K={})", self.depth)
    }

    pub fn eval(&self, x: &[C64]) -> f64 {
        self.argmax(x).0
    }

    fn argmax(&self, x: &[C64]) -> (f64, usize) {
        let mut best = (0.0, 0);
        for (s, w, k) in &self.terms {
            let val = vec_norm(&s.mul_vec(x)) * w;
            if val > best.0 {
                best = (val, *k);
            }
        }
        best
    }

    /// max_k max_{S ∈ S_k} ‖S‖₂/ρ̂^k, an upper bound on c⁺.
    fn growth_cap(&self) -> f64 {
        self.terms
            .iter()
            .map(|(s, w, _)| s.spectral_norm() * w)
            .fold(1.0, f64::max)
    }

    /// v_K(A) ≤ max over terms of ‖SA‖₂/ρ̂^k, using ‖x‖₂ ≤ v_K(x).
    pub fn operator_bound(&self, a: &Matrix) -> f64 {
        self.terms
            .iter()
            .map(|(s, w, _)| s.mul(a).spectral_norm() * w)
            .fold(0.0, f64::max)
    }

    /// Samples x on the sphere and members A, recording where the maximum
    /// defining v_K(Ax) is attained.
    pub fn attainment(&self, set: &MatrixSet, probes: usize, seed: u64) -> AttainmentStats {
        let mut rng = random::seeded(seed);
        let mut stats = AttainmentStats {
            probes: 0,
            interior: 0,
            max_ratio: 0.0,
            max_interior_ratio: 0.0,
        };
        for _ in 0..probes {
            let x = random::unit_vector(&mut rng, self.d);
            let vx = self.eval(&x);
            for a in set.members() {
                let (vax, k) = self.argmax(&a.mul_vec(&x));
                stats.probes += 1;
                let ratio = vax / vx;
                stats.max_ratio = stats.max_ratio.max(ratio);
                if k < self.depth {
                    stats.interior += 1;
                    stats.max_interior_ratio = stats.max_interior_ratio.max(ratio / self.rho_hat);
                }
            }
        }
        stats
    }
}

impl OperatorNormBound for ExtremalNorm {
    fn tag(&self) -> String {
        ExtremalNorm::tag(self)
    }

    fn bound(&self, a: &Matrix) -> f64 {
        self.operator_bound(a)
    }
}

/// Truncated forward-orbit norm of depth K. Never claimed extremal; it is
/// only ever used through the operator-norm upper bound, which is valid
/// for any norm.
pub fn extremal_norm_approx(set: &MatrixSet, rho_hat: f64, depth: usize) -> Result<ExtremalNorm> {
    extremal_norm_approx_with(set, rho_hat, depth, Budget::default())
}

pub fn extremal_norm_approx_with(
    set: &MatrixSet,
    rho_hat: f64,
    depth: usize,
    budget: Budget,
) -> Result<ExtremalNorm> {
    if !(rho_hat > 0.0 && rho_hat.is_finite()) {
        return Err(JsrError::invalid("rho_hat must be positive"));
    }
    let d = set.dim();
    let mut terms = vec![(Matrix::identity(d), 1.0, 0)];
    if depth > 0 {
        budget.check(set.len(), depth)?;
    }
    let mut layer = vec![Matrix::identity(d)];
    for k in 1..=depth {
        let w = rho_hat.powi(-(k as i32));
        let mut next = Vec::with_capacity(layer.len() * set.len());
        for p in &layer {
            for a in set.members() {
                next.push(a.mul(p));
            }
        }
        if !w.is_finite() || next.iter().any(|m| !m.is_finite()) {
            return Err(JsrError::Numerical("orbit norm terms overflowed".into()));
        }
        terms.extend(next.iter().map(|m| (m.clone(), w, k)));
        layer = next;
    }
    Ok(ExtremalNorm {
        d,
        rho_hat,
        depth,
        terms,
    })
}

/// T_ε⁻¹ (Wᴴ A W) T_ε with T_ε = diag(I, δI, …, δ^{m−1}I), δ = ε^{1/m}:
/// block (i, j) is multiplied by δ^{j−i}. The result is in flag coordinates.
pub fn diagonal_rescale(set: &MatrixSet, flag: &Flag, eps: f64) -> Result<MatrixSet> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(JsrError::invalid("rescaling parameter eps must lie in (0, 1]"));
    }
    flag.certify(set)?;
    let m = flag.index_m();
    let delta = eps.powf(1.0 / m as f64);
    let offsets = flag.offsets();
    let block_of = |r: usize| offsets.iter().rposition(|&o| o <= r).unwrap();
    set.map(|a| {
        let mut b = a.conjugate_by(flag.w());
        for r in 0..b.dim() {
            for c in 0..b.dim() {
                let p = block_of(c) as i32 - block_of(r) as i32;
                if p != 0 {
                    b.set(r, c, b.get(r, c) * delta.powi(p));
                }
            }
        }
        b
    })
}

/// The comparison matrix Q(ε) bounding the flag-norm growth of an
/// ε-inflation, with the positive block scaling used to normalize the
/// strictly upper blocks to norm ≤ 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QMatrix {
    pub eps: f64,
    pub entries: Vec<Vec<f64>>,
    /// Block scaling s_i; block (i, j) is multiplied by s_j/s_i.
    pub scaling: Vec<f64>,
    pub norm: f64,
    pub norm_at_zero: f64,
}

impl QMatrix {
    /// ‖Q(ε)‖₂ − ‖Q(0)‖₂.
    pub fn increment_bound(&self) -> f64 {
        self.norm - self.norm_at_zero
    }
}

fn real_spectral_norm(entries: &[Vec<f64>]) -> f64 {
    let m = entries.len();
    let data = entries.iter().flatten().map(|&x| C64::new(x, 0.0)).collect();
    Matrix::from_raw(m, data).spectral_norm()
}

fn q_entries(m: usize, eps: f64, rho: &[f64], scaling: &[f64]) -> Vec<Vec<f64>> {
    let mf = m as f64;
    (0..m)
        .map(|i| {
            (0..m)
                .map(|j| {
                    if i == j {
                        rho[i] + eps
                    } else if i < j {
                        (1.0 + eps) * eps.powf((j - i) as f64 / mf)
                    } else {
                        eps.powf((mf - (i - j) as f64) / mf) * scaling[j] / scaling[i]
                    }
                })
                .collect()
        })
        .collect()
}

/// Q(ε) for a block decomposition. `rho_blocks[i]` must upper-bound
/// ρ(M_ii).
pub fn q_matrix(blocks: &BlockDecomposition, flag: &Flag, eps: f64, rho_blocks: &[f64]) -> Result<QMatrix> {
    let m = blocks.index_m();
    if flag.index_m() != m || flag.block_sizes() != blocks.sizes() {
        return Err(JsrError::invalid("block decomposition does not match the flag"));
    }
    if rho_blocks.len() != m || rho_blocks.iter().any(|r| !(*r >= 0.0 && r.is_finite())) {
        return Err(JsrError::invalid(format!(
            "need {m} finite nonnegative block spectral radius bounds"
        )));
    }
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(JsrError::invalid("eps must be finite and nonnegative"));
    }
    let mut scaling = vec![1.0f64; m];
    for j in 1..m {
        let mut s = scaling[j - 1];
        for i in 0..j {
            let c = blocks.max_block_norm(i, j);
            if c > 0.0 {
                s = s.min(scaling[i] / c);
            }
        }
        scaling[j] = s;
    }
    let entries = q_entries(m, eps, rho_blocks, &scaling);
    let norm = real_spectral_norm(&entries);
    let norm_at_zero = real_spectral_norm(&q_entries(m, 0.0, rho_blocks, &scaling));
    Ok(QMatrix {
        eps,
        entries,
        scaling,
        norm,
        norm_at_zero,
    })
}
