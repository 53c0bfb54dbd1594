//! Finite matrix sets, words over them, and product enumeration.

use serde::{Deserialize, Serialize};

use crate::error::{JsrError, Result};
use crate::matrix::{Matrix, NormKind, C64};

/// Default cap on the number of products a single enumeration may visit.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Upper limit on |M|^k for one enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget(pub u64);

impl Default for Budget {
    fn default() -> Self {
        Budget(DEFAULT_BUDGET)
    }
}

impl Budget {
    /// Fails if |M|^k exceeds the budget.
    pub fn check(&self, members: usize, depth: usize) -> Result<()> {
        let requested = count_words(members, depth);
        if requested > self.0 as u128 {
            return Err(JsrError::BudgetExceeded {
                requested,
                members,
                depth,
                budget: self.0,
            });
        }
        Ok(())
    }

    /// Largest k ≤ `max_depth` with |M|^k within budget (at least 1).
    pub fn max_depth(&self, members: usize, max_depth: usize) -> usize {
        (1..=max_depth.max(1))
            .take_while(|&k| count_words(members, k) <= self.0 as u128)
            .last()
            .unwrap_or(1)
    }
}

/// |M|^k, saturating.
pub fn count_words(members: usize, depth: usize) -> u128 {
    let mut n: u128 = 1;
    for _ in 0..depth {
        n = n.saturating_mul(members as u128);
    }
    n
}

/// A word (i_1, …, i_k) over the members of a set. Its product is
/// A_{i_k} ⋯ A_{i_1}: the first index is applied first.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(Vec<usize>);

impl Word {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() {
            return Err(JsrError::invalid("words must have length at least 1"));
        }
        Ok(Word(indices))
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// A_{i_k} ⋯ A_{i_1}
    pub fn evaluate(&self, set: &MatrixSet) -> Result<Matrix> {
        let members = set.members();
        let mut iter = self.0.iter();
        let first = *iter.next().ok_or_else(|| JsrError::invalid("empty word"))?;
        let mut product = members
            .get(first)
            .ok_or_else(|| JsrError::invalid(format!("word index {first} out of range")))?
            .clone();
        for &i in iter {
            let a = members
                .get(i)
                .ok_or_else(|| JsrError::invalid(format!("word index {i} out of range")))?;
            product = a.mul(&product);
        }
        Ok(product)
    }
}

impl std::fmt::Display for Word {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// A nonempty finite set of d×d matrices.
///
/// Members keep insertion order; exact (bitwise) duplicates are dropped at
/// construction. Negative zeros are normalized to positive zeros first, so
/// `0` and `-0` compare equal.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixSet {
    d: usize,
    members: Vec<Matrix>,
    label: Option<String>,
}

impl MatrixSet {
    pub fn new(members: Vec<Matrix>) -> Result<Self> {
        let first = members
            .first()
            .ok_or_else(|| JsrError::invalid("matrix set must be nonempty"))?;
        let d = first.dim();
        let mut kept: Vec<Matrix> = Vec::with_capacity(members.len());
        for m in members {
            if m.dim() != d {
                return Err(JsrError::DimensionMismatch {
                    expected: d,
                    found: m.dim(),
                });
            }
            if !m.is_finite() {
                return Err(JsrError::invalid("matrix set member has non-finite entries"));
            }
            let m = normalize_zeros(m);
            if !kept.iter().any(|k| k.bitwise_eq(&m)) {
                kept.push(m);
            }
        }
        Ok(MatrixSet {
            d,
            members: kept,
            label: None,
        })
    }

    pub fn singleton(a: Matrix) -> Self {
        MatrixSet::new(vec![a]).expect("single finite matrix")
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[Matrix] {
        &self.members
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    /// Largest member norm.
    pub fn max_norm(&self, which: NormKind) -> f64 {
        self.members.iter().map(|m| m.norm(which)).fold(0.0, f64::max)
    }

    /// Applies `f` to every member.
    pub fn map(&self, f: impl FnMut(&Matrix) -> Matrix) -> Result<MatrixSet> {
        let mut out = MatrixSet::new(self.members.iter().map(f).collect())?;
        out.label = self.label.clone();
        Ok(out)
    }

    /// Set equality ignoring member order.
    pub fn same_members(&self, other: &MatrixSet) -> bool {
        self.len() == other.len()
            && self
                .members
                .iter()
                .all(|a| other.members.iter().any(|b| a.bitwise_eq(b)))
    }
}

fn normalize_zeros(m: Matrix) -> Matrix {
    let d = m.dim();
    let data = m
        .as_slice()
        .iter()
        .map(|z| C64::new(z.re + 0.0, z.im + 0.0))
        .collect();
    Matrix::from_raw(d, data)
}

/// Hausdorff distance between two sets, with spectral-norm point distances.
pub fn hausdorff_distance(m: &MatrixSet, n: &MatrixSet) -> Result<f64> {
    if m.dim() != n.dim() {
        return Err(JsrError::DimensionMismatch {
            expected: m.dim(),
            found: n.dim(),
        });
    }
    let directed = |from: &MatrixSet, to: &MatrixSet| {
        from.members()
            .iter()
            .map(|a| {
                to.members()
                    .iter()
                    .map(|b| a.sub(b).spectral_norm())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    Ok(directed(m, n).max(directed(n, m)))
}

/// M ∪ −M, deduplicated. Its balanced convex hull has the same joint
/// spectral radius as M, and these vertices suffice to represent it.
pub fn balanced_hull(m: &MatrixSet) -> MatrixSet {
    let mut members = m.members().to_vec();
    members.extend(m.members().iter().map(|a| a.scale(-1.0)));
    let mut out = MatrixSet::new(members).expect("nonempty, same dimension");
    out.label = m.label.clone();
    out
}

/// Multiplies every member by `c > 0`.
pub fn scale(m: &MatrixSet, c: f64) -> Result<MatrixSet> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(JsrError::invalid(format!("scale factor must be positive, got {c}")));
    }
    if c == 1.0 {
        return Ok(m.clone());
    }
    m.map(|a| a.scale(c))
}

/// Every word of length `k` in lexicographic order together with its product.
///
/// Prefix products are cached, so advancing to the next word costs one
/// multiplication per changed position.
pub fn enumerate_products(m: &MatrixSet, k: usize, budget: Budget) -> Result<Products<'_>> {
    if k == 0 {
        return Err(JsrError::invalid("product length must be at least 1"));
    }
    budget.check(m.len(), k)?;
    Ok(Products {
        set: m,
        indices: vec![0; k],
        prefix: Vec::with_capacity(k),
        done: false,
    })
}

/// Iterator returned by [`enumerate_products`].
pub struct Products<'a> {
    set: &'a MatrixSet,
    indices: Vec<usize>,
    /// prefix[j] = A_{i_{j+1}} ⋯ A_{i_1}
    prefix: Vec<Matrix>,
    done: bool,
}

impl Products<'_> {
    fn rebuild_from(&mut self, start: usize) {
        let members = self.set.members();
        self.prefix.truncate(start);
        for j in start..self.indices.len() {
            let a = &members[self.indices[j]];
            let next = match self.prefix.last() {
                Some(p) => a.mul(p),
                None => a.clone(),
            };
            self.prefix.push(next);
        }
    }
}

impl Iterator for Products<'_> {
    type Item = (Word, Matrix);

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        if self.prefix.is_empty() {
            self.rebuild_from(0);
        } else {
            // odometer step: last position is least significant
            let n = self.set.len();
            let mut pos = self.indices.len();
            loop {
                if pos == 0 {
                    self.done = true;
                    return None;
                }
                pos -= 1;
                self.indices[pos] += 1;
                if self.indices[pos] < n {
                    break;
                }
                self.indices[pos] = 0;
            }
            self.rebuild_from(pos);
        }
        let product = self.prefix.last().expect("k ≥ 1").clone();
        Some((Word(self.indices.clone()), product))
    }
}

/// Subspace V of matrix space with a norm; its unit ball B_V is the
/// perturbation body of an ε-inflation.
#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    d: usize,
    basis: Vec<Matrix>,
    /// Frobenius-orthonormalized copy of `basis`.
    orthonormal: Vec<Matrix>,
    norm: NormKind,
}

impl Ball {
    /// Ball in all of K^{d×d}.
    pub fn full(d: usize, norm: NormKind) -> Self {
        let basis: Vec<Matrix> = (0..d)
            .flat_map(|i| (0..d).map(move |j| Matrix::unit(d, i, j)))
            .collect();
        Ball {
            d,
            orthonormal: basis.clone(),
            basis,
            norm,
        }
    }

    /// Ball in span(basis). The basis must be linearly independent.
    pub fn new(basis: Vec<Matrix>, norm: NormKind) -> Result<Self> {
        let d = basis
            .first()
            .ok_or_else(|| JsrError::invalid("ball subspace basis must be nonempty"))?
            .dim();
        if let Some(bad) = basis.iter().find(|b| b.dim() != d) {
            return Err(JsrError::DimensionMismatch {
                expected: d,
                found: bad.dim(),
            });
        }
        let mut orthonormal: Vec<Matrix> = Vec::with_capacity(basis.len());
        for b in &basis {
            let scale = b.frobenius_norm();
            let mut r = b.clone();
            for _ in 0..2 {
                for q in &orthonormal {
                    let c = q.inner(&r);
                    r = r.sub(&q.scale_c(c));
                }
            }
            let n = r.frobenius_norm();
            if !(n > 1e-10 * scale.max(f64::MIN_POSITIVE)) {
                return Err(JsrError::invalid(
                    "ball subspace basis is not linearly independent",
                ));
            }
            orthonormal.push(r.scale(1.0 / n));
        }
        Ok(Ball {
            d,
            basis,
            orthonormal,
            norm,
        })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn basis(&self) -> &[Matrix] {
        &self.basis
    }

    pub fn norm_kind(&self) -> NormKind {
        self.norm
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() == self.d * self.d
    }

    /// Orthogonal (Frobenius) projection onto V.
    pub fn project(&self, a: &Matrix) -> Matrix {
        if self.is_full() {
            return a.clone();
        }
        let mut out = Matrix::zeros(self.d);
        for q in &self.orthonormal {
            out = out.add(&q.scale_c(q.inner(a)));
        }
        out
    }

    /// Projects onto V and rescales to unit ball norm; `None` if the
    /// projection vanishes.
    pub fn unit_element(&self, a: &Matrix) -> Option<Matrix> {
        let p = self.project(a);
        let n = p.norm(self.norm);
        (n > 1e-14 * a.frobenius_norm().max(f64::MIN_POSITIVE)).then(|| p.scale(1.0 / n))
    }

    /// Element of V with coefficients `coeffs` in the orthonormal basis.
    pub fn combine(&self, coeffs: &[C64]) -> Matrix {
        let mut out = Matrix::zeros(self.d);
        for (q, &c) in self.orthonormal.iter().zip(coeffs) {
            out = out.add(&q.scale_c(c));
        }
        out
    }

    pub fn subspace_dim(&self) -> usize {
        self.basis.len()
    }

    /// Upper bound on sup_{B ∈ B_V} ‖B‖₂. Both supported norms dominate
    /// the spectral norm, so 1 is valid.
    pub fn spectral_bound(&self) -> f64 {
        1.0
    }
}

/// The inflation M + ε·B_V, kept symbolic.
#[derive(Debug, Clone)]
pub struct InflatedSet {
    pub base: MatrixSet,
    pub epsilon: f64,
    pub ball: Ball,
}

impl InflatedSet {
    pub fn new(base: MatrixSet, epsilon: f64, ball: Ball) -> Result<Self> {
        if !(epsilon >= 0.0) || !epsilon.is_finite() {
            return Err(JsrError::invalid("inflation radius must be nonnegative"));
        }
        if ball.dim() != base.dim() {
            return Err(JsrError::DimensionMismatch {
                expected: base.dim(),
                found: ball.dim(),
            });
        }
        Ok(InflatedSet { base, epsilon, ball })
    }
}
