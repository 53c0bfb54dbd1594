//! Lower and upper joint-spectral-radius bounds from finite products.
//!
//! All bounds come from a single depth-first scan of the product tree in
//! lexicographic word order. Each node records ρ(S)^{1/k} (lower side) and
//! ‖S‖^{1/k} (upper side). A subtree is skipped once its prefix norm shows
//! that no extension can reach the current lower bound.

use serde::{Deserialize, Serialize};

use crate::error::{JsrError, Result};
use crate::matrix::Matrix;
use crate::set::{Budget, MatrixSet, Word};

/// Values within this relative distance of the running maximum count as
/// ties; the earlier (lexicographically smaller) word keeps the witness.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Pruning requires the prefix bound to clear the lower bound by this
/// relative margin, so pruned and unpruned scans select the same witness.
const PRUNE_MARGIN: f64 = 1e-9;

/// A certified upper bound on an operator norm, evaluated per matrix.
pub trait OperatorNormBound {
    /// Short tag used in reports.
    fn tag(&self) -> String;
    /// Upper bound on the operator norm of `a` induced by this norm.
    fn bound(&self, a: &Matrix) -> f64;
}

/// The spectral norm, exactly.
#[derive(Debug, Clone, Copy, Default)]
pub struct SpectralNorm;

impl OperatorNormBound for SpectralNorm {
    fn tag(&self) -> String {
        "spectral".into()
    }
    fn bound(&self, a: &Matrix) -> f64 {
        a.spectral_norm()
    }
}

/// Quadratic norm ‖x‖ = ‖T x‖₂; the induced operator norm is ‖T A T⁻¹‖₂.
#[derive(Debug, Clone)]
pub struct EllipsoidNorm {
    t: Matrix,
    t_inv: Matrix,
}

impl EllipsoidNorm {
    pub fn new(t: Matrix) -> Result<Self> {
        let t_inv = t
            .inverse()
            .ok_or_else(|| JsrError::Numerical("ellipsoid transform is singular".into()))?;
        Ok(EllipsoidNorm { t, t_inv })
    }

    /// Gram P = Σ_{k ≤ depth} Σ_{S ∈ S_k} SᴴS / γ^{2k}, with T the Cholesky
    /// factor of P. For γ above the JSR this approaches an extremal ellipsoid.
    pub fn fit(set: &MatrixSet, gamma: f64, depth: usize, budget: Budget) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(JsrError::invalid("ellipsoid scale must be positive"));
        }
        budget.check(set.len(), depth.max(1))?;
        let d = set.dim();
        let scaled = crate::set::scale(set, 1.0 / gamma)?;
        let mut gram = Matrix::identity(d);
        for k in 1..=depth {
            for (_, s) in crate::set::enumerate_products(&scaled, k, budget)? {
                gram = gram.add(&s.adjoint().mul(&s));
            }
        }
        // normalize so the factor stays well scaled
        let gram = gram.scale(1.0 / gram.max_abs());
        let chol = gram
            .to_nalgebra()
            .cholesky()
            .ok_or_else(|| JsrError::Numerical("ellipsoid Gram matrix is not positive definite".into()))?;
        EllipsoidNorm::new(Matrix::from_nalgebra(&chol.l().adjoint()))
    }

    pub fn transform(&self) -> &Matrix {
        &self.t
    }
}

impl OperatorNormBound for EllipsoidNorm {
    fn tag(&self) -> String {
        "ellipsoid".into()
    }
    fn bound(&self, a: &Matrix) -> f64 {
        self.t.mul(a).mul(&self.t_inv).spectral_norm()
    }
}

/// Certified lower and upper JSR bounds at enumeration depth n.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsBracket {
    pub lower: f64,
    pub upper: f64,
    pub depth_n: usize,
    /// Word whose product attains `lower`.
    pub witness: Word,
    /// Which bound produced `upper`.
    pub norm_tag: String,
}

impl BoundsBracket {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    /// (upper − lower) / upper, zero when both vanish.
    pub fn relative_width(&self) -> f64 {
        if self.upper > 0.0 {
            (self.upper - self.lower) / self.upper
        } else {
            0.0
        }
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }
}

/// Options for [`bracket_with`].
pub struct BracketOptions<'a> {
    pub budget: Budget,
    pub prune: bool,
    /// Additional norms whose k-product maxima are tried as upper bounds.
    pub extra_norms: Vec<&'a dyn OperatorNormBound>,
}

impl Default for BracketOptions<'_> {
    fn default() -> Self {
        BracketOptions {
            budget: Budget::default(),
            prune: true,
            extra_norms: Vec::new(),
        }
    }
}

/// Raw results of a product-tree scan.
#[derive(Debug, Clone)]
pub struct ScanResult {
    pub lower: f64,
    pub witness: Vec<usize>,
    /// `best_at_depth[k-1]` = max over visited words of length k of ρ(S)^{1/k}.
    pub best_at_depth: Vec<f64>,
    /// `max_norm[k-1]` = max over words of length k of ‖S‖₂.
    pub max_norm: Vec<f64>,
    /// Same, per extra norm.
    pub max_extra: Vec<Vec<f64>>,
    /// max over words w of length n of min_{j ≤ n} ‖w_{1..j}‖^{1/j}.
    pub prefix_minmax: f64,
    pub visited: u64,
    pub pruned: u64,
}

struct Scanner<'a> {
    members: &'a [Matrix],
    n: usize,
    prune: bool,
    extras: &'a [&'a dyn OperatorNormBound],
    max_visits: u64,
    member_norm: f64,
    member_extra: Vec<f64>,
    stack: Vec<Matrix>,
    extra_stack: Vec<Vec<f64>>,
    word: Vec<usize>,
    out: ScanResult,
}

impl Scanner<'_> {
    fn visit(&mut self, depth: usize, path_min: f64) -> Result<()> {
        let count = self.members.len();
        for i in 0..count {
            {
                let (done, rest) = self.stack.split_at_mut(depth);
                let slot = &mut rest[0];
                match done.last() {
                    Some(prev) => self.members[i].mul_into(prev, slot),
                    None => slot.clone_from(&self.members[i]),
                }
            }
            self.word.push(i);
            self.out.visited += 1;
            if self.out.visited > self.max_visits {
                return Err(JsrError::BudgetExceeded {
                    requested: self.out.visited as u128,
                    members: self.members.len(),
                    depth: self.n,
                    budget: self.max_visits,
                });
            }
            let k = depth + 1;
            let product = &self.stack[depth];
            let norm = product.spectral_norm();
            if !norm.is_finite() {
                return Err(JsrError::Numerical(format!(
                    "product of length {k} overflowed; rescale the set"
                )));
            }
            let inv_k = 1.0 / k as f64;
            let root = product.spectral_radius().powf(inv_k);

            let best = self.out.lower;
            let better = self.out.witness.is_empty() || root > best * (1.0 + TIE_TOLERANCE);
            if better {
                self.out.lower = root;
                self.out.witness.clone_from(&self.word);
            }
            let slot = &mut self.out.best_at_depth[depth];
            *slot = slot.max(root);
            let slot = &mut self.out.max_norm[depth];
            *slot = slot.max(norm);
            for (e, norm_fn) in self.extras.iter().enumerate() {
                let v = norm_fn.bound(product);
                self.extra_stack[e][depth] = v;
                let slot = &mut self.out.max_extra[e][depth];
                *slot = slot.max(v);
            }
            let path_min = path_min.min(norm.powf(inv_k));
            if k == self.n {
                self.out.prefix_minmax = self.out.prefix_minmax.max(path_min);
            } else if self.prune && self.can_prune(k, norm) {
                self.out.pruned += 1;
            } else {
                self.visit(k, path_min)?;
            }
            self.word.pop();
        }
        Ok(())
    }

    /// ‖P‖·μ^{t−j} < (L(1−margin))^t for every t in (j, n], for the spectral
    /// norm and every extra norm.
    fn can_prune(&self, j: usize, norm: f64) -> bool {
        let target = self.out.lower * (1.0 - PRUNE_MARGIN);
        if !(target > 0.0) {
            return false;
        }
        let below = |prefix: f64, mu: f64| {
            (j + 1..=self.n).all(|t| {
                // compare in logs to avoid under/overflow for long words
                let lhs = prefix.ln() + (t - j) as f64 * mu.ln();
                let rhs = t as f64 * target.ln();
                prefix == 0.0 || mu == 0.0 || lhs < rhs
            })
        };
        below(norm, self.member_norm)
            && self
                .member_extra
                .iter()
                .enumerate()
                .all(|(e, &mu)| below(self.extra_stack[e][j - 1], mu))
    }
}

/// Scans all words of length ≤ n.
pub fn scan_products(
    set: &MatrixSet,
    n: usize,
    budget: Budget,
    prune: bool,
    extras: &[&dyn OperatorNormBound],
) -> Result<ScanResult> {
    if n == 0 {
        return Err(JsrError::invalid("depth n must be at least 1"));
    }
    budget.check(set.len(), n)?;
    scan_capped(set, n, prune, extras, u64::MAX)
}

/// Scan without the up-front word count; fails once more than `max_visits`
/// nodes have been visited. Lets pruned scans go deeper than |M|^n allows.
fn scan_capped(
    set: &MatrixSet,
    n: usize,
    prune: bool,
    extras: &[&dyn OperatorNormBound],
    max_visits: u64,
) -> Result<ScanResult> {
    if n == 0 {
        return Err(JsrError::invalid("depth n must be at least 1"));
    }
    let members = set.members();
    let d = set.dim();
    let mut scanner = Scanner {
        members,
        n,
        prune,
        extras,
        max_visits,
        member_norm: set.max_norm(crate::matrix::NormKind::Spectral),
        member_extra: extras
            .iter()
            .map(|e| members.iter().map(|a| e.bound(a)).fold(0.0, f64::max))
            .collect(),
        stack: vec![Matrix::zeros(d); n],
        extra_stack: vec![vec![0.0; n]; extras.len()],
        word: Vec::with_capacity(n),
        out: ScanResult {
            lower: 0.0,
            witness: Vec::new(),
            best_at_depth: vec![0.0; n],
            max_norm: vec![0.0; n],
            max_extra: vec![vec![0.0; n]; extras.len()],
            prefix_minmax: 0.0,
            visited: 0,
            pruned: 0,
        },
    };
    scanner.visit(0, f64::INFINITY)?;
    Ok(scanner.out)
}

fn min_root(maxima: &[f64]) -> f64 {
    maxima
        .iter()
        .enumerate()
        .map(|(i, &a)| a.powf(1.0 / (i + 1) as f64))
        .fold(f64::INFINITY, f64::min)
}

/// max over 1 ≤ k ≤ n and S ∈ S_k(M) of ρ(S)^{1/k}, with the attaining word.
pub fn lower_bound(set: &MatrixSet, n: usize) -> Result<(f64, Word)> {
    lower_bound_with(set, n, Budget::default())
}

pub fn lower_bound_with(set: &MatrixSet, n: usize, budget: Budget) -> Result<(f64, Word)> {
    let scan = scan_products(set, n, budget, true, &[])?;
    Ok((scan.lower, Word::new(scan.witness)?))
}

/// min over 1 ≤ k ≤ n of (max_{S ∈ S_k(M)} ‖S‖)^{1/k} for the given norm.
pub fn upper_bound(set: &MatrixSet, n: usize, norm: &dyn OperatorNormBound) -> Result<f64> {
    upper_bound_with(set, n, norm, Budget::default())
}

pub fn upper_bound_with(
    set: &MatrixSet,
    n: usize,
    norm: &dyn OperatorNormBound,
    budget: Budget,
) -> Result<f64> {
    let scan = scan_products(set, n, budget, false, &[norm])?;
    Ok(min_root(&scan.max_extra[0]))
}

/// Lower bound together with the best available upper bound.
pub fn bracket(set: &MatrixSet, n: usize) -> Result<BoundsBracket> {
    bracket_with(set, n, &BracketOptions::default())
}

pub fn bracket_with(set: &MatrixSet, n: usize, opts: &BracketOptions<'_>) -> Result<BoundsBracket> {
    let scan = scan_products(set, n, opts.budget, opts.prune, &opts.extra_norms)?;
    Ok(bracket_from_scan(&scan, n, &opts.extra_norms))
}

/// Pruned bracket at depth n that visits at most `max_visits` nodes.
pub fn bracket_capped(set: &MatrixSet, n: usize, max_visits: u64) -> Result<BoundsBracket> {
    let scan = scan_capped(set, n, true, &[], max_visits)?;
    Ok(bracket_from_scan(&scan, n, &[]))
}

pub(crate) fn bracket_from_scan(
    scan: &ScanResult,
    n: usize,
    extras: &[&dyn OperatorNormBound],
) -> BoundsBracket {
    let mut upper = min_root(&scan.max_norm);
    let mut tag = "spectral".to_string();
    if scan.prefix_minmax < upper {
        upper = scan.prefix_minmax;
        tag = "spectral-prefix".to_string();
    }
    for (e, norm) in extras.iter().enumerate() {
        let u = min_root(&scan.max_extra[e]);
        if u < upper {
            upper = u;
            tag = norm.tag();
        }
    }
    // Pruned products satisfy ‖S‖^{1/t} < lower in every tracked norm, so
    // max(lower, ·) of the visited data is the bound over all products. The
    // same clamp makes pruned and unpruned scans agree exactly.
    if upper < scan.lower {
        upper = scan.lower;
        tag = format!("{tag}, clamped to lower");
    }
    BoundsBracket {
        lower: scan.lower,
        upper,
        depth_n: n,
        witness: Word::new(scan.witness.clone()).expect("scan visits at least one word"),
        norm_tag: tag,
    }
}

/// Smallest Λ̂ ≥ 0 with lower_bound(M, m) ≥ U·(1 − Λ̂/m^r) for 1 ≤ m ≤ n,
/// where U is the bracket's upper bound. An empirical stand-in for the
/// non-constructive constants of the convergence-rate theorems.
pub fn lambda_empirical(set: &MatrixSet, n: usize, r: u32) -> Result<f64> {
    lambda_empirical_with(set, n, r, Budget::default())
}

pub fn lambda_empirical_with(set: &MatrixSet, n: usize, r: u32, budget: Budget) -> Result<f64> {
    if r == 0 {
        return Err(JsrError::invalid("rate exponent r must be at least 1"));
    }
    let scan = scan_products(set, n, budget, false, &[])?;
    let br = bracket_from_scan(&scan, n, &[]);
    if br.relative_width() > 0.10 {
        return Err(JsrError::inconclusive(format!(
            "bracket [{:.6e}, {:.6e}] at depth {n} is wider than 10%",
            br.lower, br.upper
        )));
    }
    if br.upper == 0.0 {
        return Ok(0.0);
    }
    let mut running = 0.0f64;
    let mut lambda = 0.0f64;
    for (i, &best) in scan.best_at_depth.iter().enumerate() {
        running = running.max(best);
        let m = (i + 1) as f64;
        let gap = 1.0 - running / br.upper;
        lambda = lambda.max(gap * m.powi(r as i32));
    }
    Ok(lambda.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn pair() -> MatrixSet {
        MatrixSet::new(vec![
            Matrix::real(&[&[0.0, 1.0], &[0.0, 0.0]]),
            Matrix::real(&[&[0.0, 0.0], &[1.0, 0.0]]),
        ])
        .unwrap()
    }

    fn jordan() -> MatrixSet {
        MatrixSet::singleton(Matrix::real(&[&[0.5, 1.0], &[0.0, 0.5]]))
    }

    #[test]
    fn lower_bound_examples() {
        let (v, w) = lower_bound(&jordan(), 1).unwrap();
        assert_eq!(v, 0.5);
        assert_eq!(w.indices(), &[0]);

        let (v, w) = lower_bound(&pair(), 2).unwrap();
        assert_eq!(v, 1.0);
        assert!(w.indices() == [0, 1] || w.indices() == [1, 0]);
        // tie-break: lexicographically smallest
        assert_eq!(w.indices(), &[0, 1]);

        let id = MatrixSet::singleton(Matrix::identity(3));
        for n in 1..5 {
            assert_eq!(lower_bound(&id, n).unwrap().0, 1.0);
        }
    }

    #[test]
    fn upper_bound_examples() {
        let id = MatrixSet::singleton(Matrix::identity(2));
        assert_eq!(upper_bound(&id, 4, &SpectralNorm).unwrap(), 1.0);
        assert_eq!(upper_bound(&pair(), 2, &SpectralNorm).unwrap(), 1.0);
        assert_relative_eq!(
            upper_bound(&jordan(), 1, &SpectralNorm).unwrap(),
            1.2071067811865475,
            max_relative = 1e-12
        );
    }

    #[test]
    fn bracket_examples() {
        let id = MatrixSet::singleton(Matrix::identity(2));
        let b = bracket(&id, 3).unwrap();
        assert_eq!((b.lower, b.upper), (1.0, 1.0));
        let b = bracket(&pair(), 2).unwrap();
        assert_eq!((b.lower, b.upper), (1.0, 1.0));
        let b = bracket(&jordan(), 20).unwrap();
        assert_eq!(b.lower, 0.5);
        assert!(b.upper <= 0.62, "upper {}", b.upper);
        assert!(b.lower <= b.upper);
    }

    #[test]
    fn jordan_upper_matches_direct_powers() {
        // ‖A^k‖^{1/k} computed straight from repeated multiplication
        let set = jordan();
        let a = &set.members()[0];
        let mut p = a.clone();
        let mut best = p.spectral_norm();
        for k in 2..=20 {
            p = a.mul(&p);
            best = best.min(p.spectral_norm().powf(1.0 / k as f64));
        }
        let u = upper_bound(&jordan(), 20, &SpectralNorm).unwrap();
        assert_relative_eq!(u, best, max_relative = 1e-12);
        assert!(best <= 0.62);
    }

    #[test]
    fn budget_is_enforced() {
        let err = bracket_with(
            &pair(),
            12,
            &BracketOptions {
                budget: Budget(100),
                ..Default::default()
            },
        );
        assert!(matches!(err, Err(JsrError::BudgetExceeded { .. })));
    }

    #[test]
    fn lambda_empirical_examples() {
        let id = MatrixSet::singleton(Matrix::identity(2));
        assert_eq!(lambda_empirical(&id, 5, 1).unwrap(), 0.0);
        let diag = MatrixSet::singleton(Matrix::real(&[&[1.0, 0.0], &[0.0, 0.5]]));
        assert_eq!(lambda_empirical(&diag, 6, 1).unwrap(), 0.0);
        // m=1: lower 0, upper 1 → gap 1·1; m ≥ 2: lower 1
        let l = lambda_empirical(&pair(), 4, 1).unwrap();
        assert_eq!(l, 1.0);
    }

    #[test]
    fn lambda_empirical_rejects_wide_brackets() {
        let err = lambda_empirical(&jordan(), 2, 1).unwrap_err();
        assert!(matches!(err, JsrError::Inconclusive { .. }));
    }

    #[test]
    fn overflow_is_reported() {
        let big = MatrixSet::singleton(Matrix::real(&[&[1e160, 0.0], &[0.0, 1.0]]));
        assert!(matches!(bracket(&big, 3), Err(JsrError::Numerical(_))));
    }

    fn opts(prune: bool) -> BracketOptions<'static> {
        BracketOptions {
            prune,
            ..Default::default()
        }
    }

    #[test]
    fn sandwich_on_random_pairs() {
        let mut rng = crate::random::seeded(500);
        for t in 0..500 {
            let d = 2 + t % 2;
            let set = crate::random::real_gaussian_set(&mut rng, d, 2);
            for n in 1..=8 {
                let b = bracket(&set, n).unwrap();
                assert!(b.lower <= b.upper, "trial {t} n {n}: {b:?}");
            }
        }
    }

    /// ρ(S)^{1/k} over every word, by direct multiplication.
    fn brute_lower(set: &MatrixSet, n: usize) -> f64 {
        let mut best = 0.0f64;
        let mut level: Vec<Matrix> = vec![Matrix::identity(set.dim())];
        for k in 1..=n {
            level = level
                .iter()
                .flat_map(|p| set.members().iter().map(move |a| a.mul(p)))
                .collect();
            for p in &level {
                best = best.max(p.spectral_radius().powf(1.0 / k as f64));
            }
        }
        best
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(48))]

        #[test]
        fn monotone_in_depth(seed in 0u64..1_000_000, d in 2usize..4) {
            let set = crate::random::real_gaussian_set(&mut crate::random::seeded(seed), d, 2);
            let mut prev = bracket(&set, 1).unwrap();
            for n in 2..=7 {
                let b = bracket(&set, n).unwrap();
                proptest::prop_assert!(b.lower >= prev.lower);
                proptest::prop_assert!(b.upper <= prev.upper * (1.0 + 1e-12));
                prev = b;
            }
        }

        #[test]
        fn scaling_equivariance(seed in 0u64..1_000_000, c in 0.01f64..100.0) {
            let set = crate::random::real_gaussian_set(&mut crate::random::seeded(seed), 2, 3);
            let scaled = crate::set::scale(&set, c).unwrap();
            for n in [1, 3, 6] {
                let a = bracket(&set, n).unwrap();
                let b = bracket(&scaled, n).unwrap();
                proptest::prop_assert!((b.lower - c * a.lower).abs() <= 1e-10 * c * a.lower);
                proptest::prop_assert!((b.upper - c * a.upper).abs() <= 1e-10 * c * a.upper);
            }
        }

        #[test]
        fn pruning_does_not_change_the_bracket(seed in 0u64..1_000_000, d in 2usize..4, m in 2usize..4) {
            let set = crate::random::real_gaussian_set(&mut crate::random::seeded(seed), d, m);
            for n in [4, 8] {
                let a = bracket_with(&set, n, &opts(true)).unwrap();
                let b = bracket_with(&set, n, &opts(false)).unwrap();
                proptest::prop_assert_eq!(a.lower, b.lower);
                proptest::prop_assert_eq!(a.upper, b.upper);
                proptest::prop_assert_eq!(&a.witness, &b.witness);
            }
        }

        #[test]
        fn lower_matches_brute_force(seed in 0u64..1_000_000) {
            let set = crate::random::real_gaussian_set(&mut crate::random::seeded(seed), 2, 2);
            let b = bracket(&set, 6).unwrap();
            let direct = brute_lower(&set, 6);
            proptest::prop_assert!((b.lower - direct).abs() <= 1e-12 * direct);
        }
    }

    #[test]
    fn ellipsoid_norm_beats_the_spectral_norm_on_a_jordan_block() {
        let a = Matrix::real(&[&[0.5, 1.0], &[0.0, 0.5]]);
        let set = MatrixSet::singleton(a.clone());
        let e = EllipsoidNorm::fit(&set, 0.55, 40, Budget::default()).unwrap();
        let b = e.bound(&a);
        assert!((0.5..0.56).contains(&b), "{b}");
        assert!(a.spectral_norm() > 1.2);
        let br = bracket_with(
            &set,
            1,
            &BracketOptions {
                extra_norms: vec![&e],
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(br.norm_tag, "ellipsoid");
        assert_eq!(br.upper, b);
        assert!(EllipsoidNorm::new(Matrix::zeros(2)).is_err());
        assert!(EllipsoidNorm::fit(&set, 0.0, 3, Budget::default()).is_err());
    }

    #[test]
    fn capped_scan_matches_and_stops() {
        let set = crate::random::real_gaussian_set(&mut crate::random::seeded(4), 2, 2);
        assert_eq!(bracket_capped(&set, 10, u64::MAX).unwrap(), bracket(&set, 10).unwrap());
        assert!(matches!(
            bracket_capped(&set, 10, 5),
            Err(JsrError::BudgetExceeded { budget: 5, .. })
        ));
        // deeper than the word budget allows, when pruning keeps the tree small
        let s = MatrixSet::new(vec![
            Matrix::real(&[&[1.0, 0.0], &[0.0, 0.5]]),
            Matrix::identity(2).scale(0.1),
        ])
        .unwrap();
        let opts = BracketOptions {
            budget: Budget(1000),
            ..Default::default()
        };
        assert!(bracket_with(&s, 30, &opts).is_err());
        let deep = bracket_capped(&s, 30, 1000).unwrap();
        assert_eq!((deep.lower, deep.upper), (1.0, 1.0));
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(48))]

        #[test]
        fn ellipsoid_upper_is_sound(seed in 0u64..1_000_000) {
            let set = crate::random::real_gaussian_set(&mut crate::random::seeded(seed), 2, 2);
            let lower = bracket(&set, 10).unwrap().lower;
            let e = EllipsoidNorm::fit(&set, lower * 1.01, 6, Budget::default()).unwrap();
            proptest::prop_assert!(upper_bound(&set, 6, &e).unwrap() >= lower * (1.0 - 1e-12));
        }
    }
}
