//! Finite-dimensional multi-seminormed spaces.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::Zero;

use crate::exact::linalg::rank_of;
use crate::seminorm::PolyhedralSeminorm;
use crate::{Error, Rational, Result, Vector};

/// Largest sequence length for which all kernel intersections are tabulated.
pub const MAX_INVARIANT_LENGTH: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiSpace {
    dim: usize,
    seminorms: Vec<PolyhedralSeminorm>,
    graded: bool,
}

impl MultiSpace {
    /// Validates dimensions and, when `graded` is set, the containment of each
    /// dual ball in the next one.
    pub fn new(dim: usize, seminorms: Vec<PolyhedralSeminorm>, graded: bool) -> Result<Self> {
        if seminorms.is_empty() {
            return Err(Error::EmptySequence);
        }
        for s in &seminorms {
            if s.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: s.dim() });
            }
        }
        let x = MultiSpace { dim, seminorms, graded };
        if graded {
            if let Some(n) = x.first_grading_failure() {
                return Err(Error::NotGraded(n, n + 1));
            }
        }
        Ok(x)
    }

    /// Convenience constructor from raw functional lists.
    pub fn from_functionals(dim: usize, levels: Vec<Vec<Vector>>, graded: bool) -> Result<Self> {
        let seminorms = levels
            .into_iter()
            .map(|fs| PolyhedralSeminorm::new(dim, fs))
            .collect::<Result<Vec<_>>>()?;
        Self::new(dim, seminorms, graded)
    }

    /// The space `{0}` with `length` zero seminorms.
    pub fn trivial(length: usize) -> Self {
        MultiSpace { dim: 0, seminorms: vec![PolyhedralSeminorm::zero(0); length.max(1)], graded: true }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn length(&self) -> usize {
        self.seminorms.len()
    }

    pub fn graded(&self) -> bool {
        self.graded
    }

    pub fn seminorms(&self) -> &[PolyhedralSeminorm] {
        &self.seminorms
    }

    pub fn seminorm(&self, n: usize) -> &PolyhedralSeminorm {
        &self.seminorms[n]
    }

    pub fn eval(&self, n: usize, x: &[Rational]) -> Result<Rational> {
        if n >= self.length() {
            return Err(Error::BadLevel { level: n, length: self.length() });
        }
        self.seminorms[n].eval(x)
    }

    fn first_grading_failure(&self) -> Option<usize> {
        (0..self.length().saturating_sub(1)).find(|&n| !self.seminorms[n].dominated_by(&self.seminorms[n + 1]))
    }

    /// Structural check that the sequence is pointwise non-decreasing.
    pub fn is_graded(&self) -> bool {
        self.first_grading_failure().is_none()
    }

    pub fn is_separated(&self) -> bool {
        let all: Vec<Vector> = self.seminorms.iter().flat_map(|s| s.functionals().iter().cloned()).collect();
        rank_of(self.dim, &all) == self.dim
    }

    pub fn into_arc(self) -> Arc<Self> {
        Arc::new(self)
    }

    /// Same seminorms, graded flag replaced by the structural check.
    pub fn with_graded_recomputed(mut self) -> Self {
        self.graded = self.is_graded();
        self
    }
}

/// `α_s = dim ⋂_{k∈s} ker ‖·‖_k`, indexed by bitmask over the levels.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KernelInvariant {
    length: usize,
    entries: Vec<usize>,
}

impl KernelInvariant {
    pub fn length(&self) -> usize {
        self.length
    }

    pub fn get(&self, mask: usize) -> usize {
        self.entries[mask]
    }

    pub fn get_set(&self, set: &[usize]) -> usize {
        self.entries[set.iter().fold(0, |m, &k| m | 1 << k)]
    }

    /// Keys are comma-separated sorted level lists; the empty set is `""`.
    pub fn to_map(&self) -> BTreeMap<String, usize> {
        (0..self.entries.len())
            .map(|mask| (mask_key(mask, self.length), self.entries[mask]))
            .collect()
    }

    pub fn entries(&self) -> &[usize] {
        &self.entries
    }
}

pub fn mask_key(mask: usize, length: usize) -> String {
    (0..length)
        .filter(|k| mask >> k & 1 == 1)
        .map(|k| k.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

pub fn invariant_alpha(x: &MultiSpace) -> Result<KernelInvariant> {
    let l = x.length();
    if l > MAX_INVARIANT_LENGTH {
        return Err(Error::BadLength { k: l, length: MAX_INVARIANT_LENGTH });
    }
    let entries = (0..1usize << l)
        .map(|mask| {
            let fs: Vec<Vector> = (0..l)
                .filter(|k| mask >> k & 1 == 1)
                .flat_map(|k| x.seminorm(k).functionals().iter().cloned())
                .collect();
            x.dim() - rank_of(x.dim(), &fs)
        })
        .collect();
    Ok(KernelInvariant { length: l, entries })
}

pub fn is_separated(x: &MultiSpace) -> bool {
    x.is_separated()
}

/// Appends the ℓ∞ coordinate norm, or its maximum with the last seminorm when
/// the space is graded.
pub fn extend_with_norm(x: &MultiSpace) -> MultiSpace {
    let linf = PolyhedralSeminorm::coordinate_max(x.dim());
    let last = if x.graded() { linf.max_with(x.seminorms.last().expect("nonempty")) } else { linf };
    let mut seminorms = x.seminorms.clone();
    seminorms.push(last);
    MultiSpace { dim: x.dim, seminorms, graded: x.graded }
}

pub fn truncate(x: &MultiSpace, k: usize) -> Result<MultiSpace> {
    if k == 0 || k > x.length() {
        return Err(Error::BadLength { k, length: x.length() });
    }
    let y = MultiSpace { dim: x.dim, seminorms: x.seminorms[..k].to_vec(), graded: false };
    Ok(y.with_graded_recomputed())
}

/// Level n of the output is `max_{i≤n} ‖·‖_i`.
pub fn graded_closure(x: &MultiSpace) -> MultiSpace {
    let mut seminorms: Vec<PolyhedralSeminorm> = Vec::with_capacity(x.length());
    for s in &x.seminorms {
        let next = match seminorms.last() {
            Some(prev) => prev.max_with(s),
            None => s.clone(),
        };
        seminorms.push(next);
    }
    MultiSpace { dim: x.dim, seminorms, graded: true }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProductMode {
    /// Level i reads only block i.
    Coordinate,
    /// Level i is the maximum over blocks `≤ i`.
    GradedMax,
}

/// Seminorm on a direct sum that applies `s` to the block at `offset`.
pub fn embed_block(s: &PolyhedralSeminorm, offset: usize, total: usize) -> Vec<Vector> {
    s.functionals()
        .iter()
        .map(|f| {
            let mut v = vec![Rational::zero(); total];
            for (j, a) in f.iter().enumerate() {
                v[offset + j] = a.clone();
            }
            v
        })
        .collect()
}

/// Direct sum of the factors; factor i contributes its level-0 seminorm as
/// the i-th output level.
pub fn product_space(factors: &[MultiSpace], mode: ProductMode) -> Result<MultiSpace> {
    if factors.is_empty() {
        return Err(Error::ArityMismatch("product of zero factors".into()));
    }
    if factors.len() == 1 {
        return Ok(factors[0].clone());
    }
    let total: usize = factors.iter().map(|f| f.dim()).sum();
    let mut offsets = Vec::with_capacity(factors.len());
    let mut o = 0;
    for f in factors {
        offsets.push(o);
        o += f.dim();
    }
    let mut levels: Vec<PolyhedralSeminorm> = Vec::with_capacity(factors.len());
    let mut acc: Vec<Vector> = Vec::new();
    for (i, f) in factors.iter().enumerate() {
        let block = embed_block(f.seminorm(0), offsets[i], total);
        let fs = match mode {
            ProductMode::Coordinate => block,
            ProductMode::GradedMax => {
                acc.extend(block);
                acc.clone()
            }
        };
        // Functionals supported on disjoint blocks are never redundant.
        levels.push(PolyhedralSeminorm::from_irredundant(total, fs));
    }
    let graded = mode == ProductMode::GradedMax;
    let w = MultiSpace { dim: total, seminorms: levels, graded };
    Ok(if graded { w } else { w.with_graded_recomputed() })
}
