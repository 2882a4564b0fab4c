//! Polyhedral seminorms `‖x‖ = max_φ |φ(x)|` and their duality calculus.

use std::sync::{Arc, OnceLock};

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::exact::linalg::{
    annihilator, complement_coordinates, dot, in_span, is_zero_vec, neg, scale, sign_canonical, span_basis,
};
use crate::exact::lp::{solve, Constraint, LinearProgram, LpError};
use crate::exact::polytope::{h_to_v, slab};
use crate::{Error, Matrix, Polytope, Rational, Result, Vector};

/// A seminorm given by a canonical, irredundant list of functionals, one per
/// `±` pair. The empty list is the zero seminorm.
pub struct PolyhedralSeminorm {
    dim: usize,
    functionals: Vec<Vector>,
    quotient: OnceLock<Arc<QuotientNorm>>,
    ball: OnceLock<Arc<Vec<Vector>>>,
}

impl Clone for PolyhedralSeminorm {
    fn clone(&self) -> Self {
        PolyhedralSeminorm {
            dim: self.dim,
            functionals: self.functionals.clone(),
            quotient: self.quotient.clone(),
            ball: self.ball.clone(),
        }
    }
}

impl PartialEq for PolyhedralSeminorm {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.functionals == other.functionals
    }
}

impl Eq for PolyhedralSeminorm {}

impl std::hash::Hash for PolyhedralSeminorm {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.dim.hash(state);
        self.functionals.hash(state);
    }
}

impl std::fmt::Debug for PolyhedralSeminorm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let fs: Vec<String> = self
            .functionals
            .iter()
            .map(|v| format!("({})", v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")))
            .collect();
        write!(f, "Seminorm[dim {}; {}]", self.dim, fs.join(" "))
    }
}

/// The normed quotient `X/ker‖·‖` realized on a coordinate complement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientNorm {
    /// Coordinates spanning the chosen complement of the kernel.
    pub coords: Vec<usize>,
    /// Maps `x` to its complement coordinates along the kernel.
    pub projection: Matrix,
    pub norm: PolyhedralSeminorm,
}

impl QuotientNorm {
    pub fn eval(&self, x: &[Rational]) -> Rational {
        self.norm.eval_unchecked(&self.projection.apply(x))
    }

    /// Inclusion of quotient coordinates back into the ambient space.
    pub fn lift(&self, u: &[Rational]) -> Vector {
        let mut x = vec![Rational::zero(); self.projection.cols()];
        for (k, &c) in self.coords.iter().enumerate() {
            x[c] = u[k].clone();
        }
        x
    }

    /// The lift as a matrix (ambient × quotient).
    pub fn lift_matrix(&self) -> Matrix {
        let mut m = Matrix::zeros(self.projection.cols(), self.coords.len());
        for (k, &c) in self.coords.iter().enumerate() {
            m.set(c, k, Rational::one());
        }
        m
    }
}

fn canonical_list(functionals: Vec<Vector>) -> Vec<Vector> {
    let mut fs: Vec<Vector> = functionals
        .into_iter()
        .filter(|f| !is_zero_vec(f))
        .map(sign_canonical)
        .collect();
    fs.sort();
    fs.dedup();
    fs
}

/// Quick exact certificate that `s` is a vertex of `conv(±S)`: the functional
/// `s` itself separates it strictly from every other point.
fn obviously_extreme(s: &[Rational], all: &[Vector]) -> bool {
    let ss = dot(s, s);
    all.iter().all(|t| t.as_slice() == s || dot(s, t).abs() < ss)
}

/// Gauge of `w` with respect to `conv(±points)`; `None` when `w` lies outside
/// the span (gauge `+∞`).
pub fn gauge(dim: usize, points: &[Vector], w: &[Rational]) -> Option<Rational> {
    if is_zero_vec(w) {
        return Some(Rational::zero());
    }
    if points.is_empty() {
        return None;
    }
    if dim == 1 {
        let m = points.iter().map(|p| p[0].abs()).max().expect("nonempty");
        return if m.is_zero() { None } else { Some(w[0].abs() / m) };
    }
    let rows: Vec<usize> = (0..dim)
        .filter(|&i| !w[i].is_zero() || points.iter().any(|p| !p[i].is_zero()))
        .collect();
    let k = points.len();
    let mut lp = LinearProgram::minimize(vec![Rational::one(); 2 * k]).all_nonneg();
    for &i in &rows {
        let mut c = Vec::with_capacity(2 * k);
        for p in points {
            c.push(p[i].clone());
        }
        for p in points {
            c.push(-p[i].clone());
        }
        lp.push(Constraint::eq(c, w[i].clone()));
    }
    match solve(&lp) {
        Ok(sol) => Some(sol.value),
        Err(LpError::Infeasible) => None,
        Err(LpError::Unbounded) => unreachable!("gauge program is bounded below"),
    }
}

impl PolyhedralSeminorm {
    pub fn zero(dim: usize) -> Self {
        Self::from_canonical(dim, Vec::new())
    }

    fn from_canonical(dim: usize, functionals: Vec<Vector>) -> Self {
        PolyhedralSeminorm { dim, functionals, quotient: OnceLock::new(), ball: OnceLock::new() }
    }

    /// Builds the seminorm `max |φ(x)|`, canonicalizing and reducing the list.
    pub fn new(dim: usize, functionals: Vec<Vector>) -> Result<Self> {
        for f in &functionals {
            if f.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: f.len() });
            }
        }
        Ok(Self::from_canonical(dim, reduce_list(dim, canonical_list(functionals))))
    }

    /// ℓ∞ coordinate norm.
    pub fn coordinate_max(dim: usize) -> Self {
        Self::from_canonical(dim, (0..dim).map(|i| crate::exact::linalg::unit(dim, i)).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn functionals(&self) -> &[Vector] {
        &self.functionals
    }

    pub fn is_zero(&self) -> bool {
        self.functionals.is_empty()
    }

    pub fn eval(&self, x: &[Rational]) -> Result<Rational> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: x.len() });
        }
        Ok(self.eval_unchecked(x))
    }

    pub fn eval_unchecked(&self, x: &[Rational]) -> Rational {
        self.functionals
            .iter()
            .map(|f| dot(f, x).abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }

    /// Canonical basis of `{x : ‖x‖ = 0}`.
    pub fn kernel(&self) -> Vec<Vector> {
        annihilator(self.dim, &self.functionals)
    }

    pub fn rank(&self) -> usize {
        span_basis(self.dim, &self.functionals).len()
    }

    pub fn quotient(&self) -> Arc<QuotientNorm> {
        self.quotient
            .get_or_init(|| {
                let kernel = self.kernel();
                let coords = complement_coordinates(self.dim, &kernel);
                let mut cols = kernel.clone();
                for &c in &coords {
                    cols.push(crate::exact::linalg::unit(self.dim, c));
                }
                let basis = Matrix::from_cols(self.dim, &cols).expect("square basis");
                let inv = basis.inverse().expect("kernel and complement span the space");
                let k = kernel.len();
                let rows: Vec<Vector> = (k..self.dim).map(|i| inv.row(i).to_vec()).collect();
                let projection = Matrix::from_rows(self.dim, rows).expect("projection rows");
                let restricted: Vec<Vector> = self
                    .functionals
                    .iter()
                    .map(|f| coords.iter().map(|&c| f[c].clone()).collect())
                    .collect();
                let norm = Self::from_canonical(coords.len(), canonical_list(restricted));
                Arc::new(QuotientNorm { coords, projection, norm })
            })
            .clone()
    }

    /// Vertices of the quotient unit ball, lifted into the ambient space
    /// through the complement coordinates.
    pub fn ball_vertices(&self) -> Arc<Vec<Vector>> {
        self.ball
            .get_or_init(|| {
                let q = self.quotient();
                let d = q.coords.len();
                if d == 0 {
                    return Arc::new(Vec::new());
                }
                let hs: Vec<_> = q
                    .norm
                    .functionals
                    .iter()
                    .flat_map(|f| slab(f.clone(), Rational::one()))
                    .collect();
                let verts = h_to_v(d, &hs).expect("quotient ball is bounded");
                Arc::new(verts.iter().map(|u| q.lift(u)).collect())
            })
            .clone()
    }

    /// `conv(±functionals)` as a V-representation, sorted.
    pub fn dual_ball(&self) -> Polytope {
        let mut v: Vec<Vector> = Vec::with_capacity(2 * self.functionals.len());
        for f in &self.functionals {
            v.push(f.clone());
            v.push(neg(f));
        }
        v.sort();
        if v.is_empty() {
            v.push(vec![Rational::zero(); self.dim]);
        }
        Polytope::from_v(self.dim, v)
    }

    /// Gauge of `w` in the dual ball; `None` is `+∞`.
    pub fn dual_gauge(&self, w: &[Rational]) -> Option<Rational> {
        if is_zero_vec(w) {
            return Some(Rational::zero());
        }
        // A positive multiple of a vertex has gauge equal to the multiple.
        for f in &self.functionals {
            if let Some(c) = proportional(w, f) {
                return Some(c.abs());
            }
        }
        if !in_span(self.dim, &self.functionals, w) {
            return None;
        }
        gauge(self.dim, &self.functionals, w)
    }

    /// True when `‖x‖_self ≤ ‖x‖_other` for all x.
    pub fn dominated_by(&self, other: &PolyhedralSeminorm) -> bool {
        self.functionals
            .par_iter()
            .all(|f| matches!(other.dual_gauge(f), Some(g) if g <= Rational::one()))
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.dim);
        }
        let c = c.abs();
        Self::from_canonical(self.dim, self.functionals.iter().map(|f| scale(&c, f)).collect())
    }

    /// `max(‖·‖_self, ‖·‖_other)`.
    pub fn max_with(&self, other: &PolyhedralSeminorm) -> Self {
        let mut all = self.functionals.clone();
        all.extend(other.functionals.iter().cloned());
        Self::from_canonical(self.dim, reduce_list(self.dim, canonical_list(all)))
    }

    /// The same seminorm with an irredundant canonical list (a no-op for
    /// values built through [`PolyhedralSeminorm::new`]).
    pub fn reduced(&self) -> Self {
        Self::from_canonical(self.dim, reduce_list(self.dim, canonical_list(self.functionals.clone())))
    }

    /// Builds from raw functionals without reduction; the caller guarantees
    /// irredundancy. The list is still sign-canonicalized and sorted.
    pub fn from_irredundant(dim: usize, functionals: Vec<Vector>) -> Self {
        Self::from_canonical(dim, canonical_list(functionals))
    }

    /// Pullback along a linear map `A`: `x ↦ ‖A x‖`.
    pub fn pullback(&self, a: &Matrix) -> Self {
        let fs: Vec<Vector> = self.functionals.iter().map(|f| a.pullback(f)).collect();
        Self::from_canonical(a.cols(), reduce_list(a.cols(), canonical_list(fs)))
    }
}

/// `Some(c)` when `w = c·f`.
fn proportional(w: &[Rational], f: &[Rational]) -> Option<Rational> {
    let j = f.iter().position(|x| !x.is_zero())?;
    let c = w[j].clone() / f[j].clone();
    if w.iter().zip(f).all(|(a, b)| *a == c.clone() * b.clone()) {
        Some(c)
    } else {
        None
    }
}

/// Drops every functional that is not a vertex of `conv(±list)`. The input
/// must be canonical (nonzero, sign-canonical, sorted, deduplicated).
fn reduce_list(dim: usize, list: Vec<Vector>) -> Vec<Vector> {
    if list.len() <= 1 {
        return list;
    }
    let keep: Vec<bool> = list
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            if obviously_extreme(s, &list) {
                return true;
            }
            let others: Vec<Vector> = list
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, t)| t.clone())
                .collect();
            match gauge(dim, &others, s) {
                Some(g) => g > Rational::one(),
                None => true,
            }
        })
        .collect();
    list.into_iter().zip(keep).filter(|(_, k)| *k).map(|(f, _)| f).collect()
}

/// Public form of the reduction.
pub fn reduce_functionals(s: &PolyhedralSeminorm) -> PolyhedralSeminorm {
    s.reduced()
}
