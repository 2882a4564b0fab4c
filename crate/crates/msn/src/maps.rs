//! Linear maps between multi-seminormed spaces: operator seminorms,
//! distortion, embedding certificates and the kernel-guided isomorphism.

use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::exact::linalg::{dot, intersect, span_basis};
use crate::exact::lp::{solve, Constraint, LinearProgram};
use crate::seminorm::{gauge, PolyhedralSeminorm};
use crate::space::{invariant_alpha, MultiSpace};
use crate::{Error, Matrix, Rational, Result, Vector, Witness};

/// Matrix between two spaces, column-vector convention.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinearMap {
    domain: Arc<MultiSpace>,
    codomain: Arc<MultiSpace>,
    matrix: Matrix,
}

/// An operator seminorm value.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Bound {
    Finite(Rational),
    Unbounded,
}

impl Bound {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Bound::Finite(v) => Some(v),
            Bound::Unbounded => None,
        }
    }

    pub fn le(&self, r: &Rational) -> bool {
        matches!(self, Bound::Finite(v) if v <= r)
    }
}

impl std::fmt::Display for Bound {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Bound::Finite(v) => write!(f, "{v}"),
            Bound::Unbounded => write!(f, "unbounded"),
        }
    }
}

/// Best constant `L` with `L‖x‖ ≤ ‖f(x)‖`; `Vacuous` when the domain
/// seminorm is zero and the inequality constrains nothing.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Lower {
    Constant(Rational),
    Vacuous,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelDistortion {
    pub upper: Bound,
    pub lower: Lower,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistortionReport {
    pub per_level: Vec<LevelDistortion>,
    /// `None` stands for an infinite minimal δ.
    pub minimal_delta: Option<Rational>,
    pub injective: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbeddingCheck {
    pub holds: bool,
    pub witness: Option<Witness>,
}

pub fn render(v: &[Rational]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

impl LinearMap {
    pub fn new(domain: Arc<MultiSpace>, codomain: Arc<MultiSpace>, matrix: Matrix) -> Result<Self> {
        if matrix.rows() != codomain.dim() || matrix.cols() != domain.dim() {
            return Err(Error::ShapeMismatch(format!(
                "matrix is {}x{}, spaces need {}x{}",
                matrix.rows(),
                matrix.cols(),
                codomain.dim(),
                domain.dim()
            )));
        }
        Ok(LinearMap { domain, codomain, matrix })
    }

    pub fn identity(x: Arc<MultiSpace>) -> Self {
        let m = Matrix::identity(x.dim());
        LinearMap { domain: x.clone(), codomain: x, matrix: m }
    }

    pub fn domain(&self) -> &Arc<MultiSpace> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<MultiSpace> {
        &self.codomain
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn apply(&self, x: &[Rational]) -> Vector {
        self.matrix.apply(x)
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &LinearMap) -> Result<LinearMap> {
        if first.codomain != self.domain {
            return Err(Error::ShapeMismatch("composition across different spaces".into()));
        }
        Ok(LinearMap {
            domain: first.domain.clone(),
            codomain: self.codomain.clone(),
            matrix: self.matrix.mul(&first.matrix),
        })
    }

    pub fn minus(&self, other: &LinearMap) -> Result<LinearMap> {
        if self.domain != other.domain || self.codomain != other.codomain {
            return Err(Error::ShapeMismatch("difference of maps between different spaces".into()));
        }
        Ok(LinearMap {
            domain: self.domain.clone(),
            codomain: self.codomain.clone(),
            matrix: self.matrix.sub(&other.matrix),
        })
    }

    pub fn scaled(&self, c: &Rational) -> LinearMap {
        LinearMap { domain: self.domain.clone(), codomain: self.codomain.clone(), matrix: self.matrix.scaled(c) }
    }

    pub fn with_domain(&self, domain: Arc<MultiSpace>) -> Result<LinearMap> {
        LinearMap::new(domain, self.codomain.clone(), self.matrix.clone())
    }

    pub fn with_codomain(&self, codomain: Arc<MultiSpace>) -> Result<LinearMap> {
        LinearMap::new(self.domain.clone(), codomain, self.matrix.clone())
    }

    pub fn is_injective(&self) -> bool {
        self.matrix.rank() == self.domain.dim()
    }

    fn check_level(&self, m: usize) -> Result<()> {
        let l = self.domain.length().min(self.codomain.length());
        if m >= l {
            return Err(Error::BadLevel { level: m, length: l });
        }
        Ok(())
    }

    fn pulled(&self, m: usize) -> Vec<Vector> {
        self.codomain.seminorm(m).functionals().iter().map(|psi| self.matrix.pullback(psi)).collect()
    }
}

/// `sup {‖f x‖_m : ‖x‖_m ≤ 1}`, with the `0/0` convention giving 0.
pub fn operator_seminorm(f: &LinearMap, m: usize) -> Result<Bound> {
    f.check_level(m)?;
    Ok(upper_with_index(f, m).0)
}

fn upper_with_index(f: &LinearMap, m: usize) -> (Bound, Option<usize>) {
    let x = f.domain.seminorm(m);
    let pulled = f.pulled(m);
    let gauges: Vec<Option<Rational>> = pulled.par_iter().map(|w| x.dual_gauge(w)).collect();
    let mut best: Option<(Rational, usize)> = None;
    for (j, g) in gauges.into_iter().enumerate() {
        match g {
            None => return (Bound::Unbounded, Some(j)),
            Some(g) => {
                if best.as_ref().map_or(true, |(b, _)| g > *b) {
                    best = Some((g, j));
                }
            }
        }
    }
    match best {
        Some((g, j)) => (Bound::Finite(g), Some(j)),
        None => (Bound::Finite(Rational::zero()), None),
    }
}

/// Lower constant through the dual description `1/max_i gauge_{f*B*}(φ_i)`.
fn lower_with_index(f: &LinearMap, m: usize, upper: &Bound) -> (Lower, Option<usize>) {
    let x = f.domain.seminorm(m);
    if x.is_zero() {
        return (Lower::Vacuous, None);
    }
    let mut pulled: Vec<Vector> = f
        .pulled(m)
        .into_iter()
        .filter(|w| !w.iter().all(|v| v.is_zero()))
        .map(crate::exact::linalg::sign_canonical)
        .collect();
    pulled.sort();
    pulled.dedup();
    let dim = f.domain.dim();
    let inv_upper = match upper {
        Bound::Finite(u) if !u.is_zero() => Some(Rational::one() / u.clone()),
        _ => None,
    };
    let gauges: Vec<Option<Rational>> = x
        .functionals()
        .par_iter()
        .map(|phi| {
            // conv(±f*Ψ) ⊆ U·B*, so the gauge is at least 1/U; a pulled-back
            // functional proportional to φ attaining that bound settles it.
            if let Some(lb) = &inv_upper {
                for p in &pulled {
                    if let Some(c) = proportional_to(phi, p) {
                        if c.abs() == *lb {
                            return Some(lb.clone());
                        }
                    }
                }
            }
            if pulled.is_empty() {
                return None;
            }
            gauge(dim, &pulled, phi)
        })
        .collect();
    let mut worst: Option<(Rational, usize)> = None;
    for (i, g) in gauges.into_iter().enumerate() {
        match g {
            None => return (Lower::Constant(Rational::zero()), Some(i)),
            Some(g) => {
                if worst.as_ref().map_or(true, |(w, _)| g > *w) {
                    worst = Some((g, i));
                }
            }
        }
    }
    let (g, i) = worst.expect("nonzero seminorm has functionals");
    (Lower::Constant(Rational::one() / g), Some(i))
}

fn proportional_to(w: &[Rational], f: &[Rational]) -> Option<Rational> {
    let j = f.iter().position(|x| !x.is_zero())?;
    let c = w[j].clone() / f[j].clone();
    if w.iter().zip(f).all(|(a, b)| *a == c.clone() * b.clone()) {
        Some(c)
    } else {
        None
    }
}

/// Maximizer of `ψ(f x)` over the domain's quotient unit ball at level m.
pub fn upper_witness(f: &LinearMap, m: usize, psi: &[Rational]) -> Option<Vector> {
    let x = f.domain.seminorm(m);
    let q = x.quotient();
    let d = q.coords.len();
    if d == 0 {
        return None;
    }
    let lift = q.lift_matrix();
    let obj = f.matrix.mul(&lift).pullback(psi);
    let mut lp = LinearProgram::maximize(obj);
    for phi in q.norm.functionals() {
        lp.push(Constraint::le(phi.clone(), Rational::one()));
        lp.push(Constraint::ge(phi.clone(), -Rational::one()));
    }
    solve(&lp).ok().map(|s| q.lift(&s.point))
}

/// The facet LP: minimize `‖f x‖_m` subject to `φ(x) = 1` and `‖x‖_m ≤ 1`.
/// Returns the minimum and a minimizer (`None` when `‖f x‖` is unbounded
/// below, which cannot happen, or the facet is empty).
pub fn facet_minimum(f: &LinearMap, m: usize, phi: &[Rational]) -> Option<(Rational, Vector)> {
    let x = f.domain.seminorm(m);
    let q = x.quotient();
    let d = q.coords.len();
    if d == 0 {
        return None;
    }
    let lift = q.lift_matrix();
    let fl = f.matrix.mul(&lift);
    let phi_q: Vector = q.coords.iter().map(|&c| phi[c].clone()).collect();
    let mut obj = vec![Rational::zero(); d + 1];
    obj[d] = Rational::one();
    let mut lp = LinearProgram::minimize(obj);
    let widen = |v: &[Rational], t: Rational| {
        let mut r = v.to_vec();
        r.push(t);
        r
    };
    lp.push(Constraint::eq(widen(&phi_q, Rational::zero()), Rational::one()));
    for g in q.norm.functionals() {
        lp.push(Constraint::le(widen(g, Rational::zero()), Rational::one()));
        lp.push(Constraint::ge(widen(g, Rational::zero()), -Rational::one()));
    }
    for psi in f.codomain.seminorm(m).functionals() {
        let row = fl.pullback(psi);
        lp.push(Constraint::le(widen(&row, -Rational::one()), Rational::zero()));
        lp.push(Constraint::ge(widen(&row, Rational::one()), Rational::zero()));
    }
    if f.codomain.seminorm(m).is_zero() {
        lp.push(Constraint::eq(widen(&vec![Rational::zero(); d], Rational::one()), Rational::zero()));
    }
    let sol = solve(&lp).ok()?;
    Some((sol.value, q.lift(&sol.point[..d])))
}

/// Lower constant as the minimum of the facet LPs over every facet of the
/// domain's quotient unit ball.
pub fn lower_constant_by_facets(f: &LinearMap, m: usize) -> Result<Lower> {
    f.check_level(m)?;
    let x = f.domain.seminorm(m);
    if x.is_zero() {
        return Ok(Lower::Vacuous);
    }
    let vals: Vec<Rational> = x
        .functionals()
        .par_iter()
        .flat_map(|phi| {
            let neg: Vector = phi.iter().map(|v| -v.clone()).collect();
            [facet_minimum(f, m, phi), facet_minimum(f, m, &neg)]
        })
        .flatten()
        .map(|(v, _)| v)
        .collect();
    Ok(Lower::Constant(vals.into_iter().min().expect("facets exist")))
}

pub fn distortion(f: &LinearMap) -> Result<DistortionReport> {
    if f.domain.length() > f.codomain.length() {
        return Err(Error::LengthMismatch(f.domain.length(), f.codomain.length()));
    }
    let injective = f.is_injective();
    let mut per_level = Vec::with_capacity(f.domain.length());
    let mut delta = Some(Rational::zero());
    for m in 0..f.domain.length() {
        let (upper, _) = upper_with_index(f, m);
        let (lower, _) = lower_with_index(f, m, &upper);
        delta = match (&delta, &upper, &lower) {
            (None, _, _) | (_, Bound::Unbounded, _) => None,
            (_, _, Lower::Constant(l)) if l.is_zero() => None,
            (Some(d), Bound::Finite(u), lower) => {
                let mut d = d.clone().max(u.clone() - Rational::one());
                if let Lower::Constant(l) = lower {
                    d = d.max(Rational::one() / l.clone() - Rational::one());
                }
                Some(d)
            }
        };
        per_level.push(LevelDistortion { upper, lower });
    }
    if !injective {
        delta = None;
    }
    Ok(DistortionReport { per_level, minimal_delta: delta, injective })
}

/// Checks injectivity and `1/(1+δ)‖x‖_m ≤ ‖f x‖_m ≤ (1+δ)‖x‖_m` for every
/// `m < λ_domain`; on failure the witness names a level and a vector.
pub fn is_embedding(f: &LinearMap, delta: &Rational) -> EmbeddingCheck {
    if f.domain.length() > f.codomain.length() {
        return EmbeddingCheck {
            holds: false,
            witness: Some(Witness { level: f.codomain.length(), vector: vec![], reason: "domain is longer than codomain".into() }),
        };
    }
    if !f.is_injective() {
        let k = f.matrix.kernel();
        return EmbeddingCheck {
            holds: false,
            witness: Some(Witness { level: 0, vector: render(&k[0]), reason: "not injective".into() }),
        };
    }
    let top = Rational::one() + delta.clone();
    let bottom = Rational::one() / top.clone();
    for m in 0..f.domain.length() {
        let (upper, j) = upper_with_index(f, m);
        if !upper.le(&top) {
            let psi = &f.codomain.seminorm(m).functionals()[j.expect("violation has an index")];
            let v = match upper {
                Bound::Unbounded => unbounded_witness(f, m, psi),
                Bound::Finite(_) => upper_witness(f, m, psi),
            };
            return EmbeddingCheck {
                holds: false,
                witness: Some(Witness {
                    level: m,
                    vector: render(&v.unwrap_or_default()),
                    reason: format!("upper bound {upper} exceeds {top}"),
                }),
            };
        }
        let (lower, i) = lower_with_index(f, m, &upper);
        if let Lower::Constant(l) = lower {
            if l < bottom {
                let phi = &f.domain.seminorm(m).functionals()[i.expect("violation has an index")];
                let v = facet_minimum(f, m, phi).map(|(_, x)| x).unwrap_or_default();
                return EmbeddingCheck {
                    holds: false,
                    witness: Some(Witness { level: m, vector: render(&v), reason: format!("lower bound {l} below {bottom}") }),
                };
            }
        }
    }
    EmbeddingCheck { holds: true, witness: None }
}

/// A kernel vector of the domain seminorm not mapped into the codomain kernel.
fn unbounded_witness(f: &LinearMap, m: usize, psi: &[Rational]) -> Option<Vector> {
    let w = f.matrix.pullback(psi);
    f.domain.seminorm(m).kernel().into_iter().find(|k| !dot(&w, k).is_zero())
}

pub fn map_distance(f: &LinearMap, g: &LinearMap, m: usize) -> Result<Bound> {
    let d = f.minus(g)?;
    operator_seminorm(&d, m)
}

/// `max_m ‖f − g‖_m` over `m < levels`; `None` if some level is unbounded.
pub fn max_distance(f: &LinearMap, g: &LinearMap, levels: usize) -> Result<Option<Rational>> {
    let d = f.minus(g)?;
    let mut best = Rational::zero();
    for m in 0..levels {
        match operator_seminorm(&d, m)? {
            Bound::Finite(v) => best = best.max(v),
            Bound::Unbounded => return Ok(None),
        }
    }
    Ok(Some(best))
}

/// `‖f‖_mb = max_m ‖f‖_m`; `None` if unbounded at some level.
pub fn multi_bounded_norm(f: &LinearMap) -> Result<Option<Rational>> {
    let mut best = Rational::zero();
    for m in 0..f.domain.length().min(f.codomain.length()) {
        match operator_seminorm(f, m)? {
            Bound::Finite(v) => best = best.max(v),
            Bound::Unbounded => return Ok(None),
        }
    }
    Ok(Some(best))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NoIsoReason {
    /// The kernel invariants differ.
    InvariantMismatch,
    /// The invariants agree but no linear bijection carries every kernel onto
    /// the corresponding kernel. `certified` is true when non-existence was
    /// proved exhaustively rather than by failed random search.
    KernelArrangement { certified: bool },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IsoOutcome {
    Iso(LinearMap),
    NoIso(NoIsoReason),
}

/// Checks `h(ker_X,m) = ker_Y,m` at every level, which for finite dimensions
/// is exactly multi-boundedness of `h` and `h⁻¹`.
fn kernels_match(x: &MultiSpace, y: &MultiSpace, h: &Matrix) -> bool {
    (0..x.length()).all(|m| {
        let kx = x.seminorm(m).kernel();
        let ky = y.seminorm(m).kernel();
        if kx.len() != ky.len() {
            return false;
        }
        kx.iter().all(|k| y.seminorm(m).eval_unchecked(&h.apply(k)).is_zero())
    })
}

/// The kernel-splitting recursion: pairs bases of `U ⊆ X` and `V ⊆ Y` level
/// by level. Returns `None` if the subspace dimensions stop matching.
fn split(
    x: &MultiSpace,
    y: &MultiSpace,
    u: Vec<Vector>,
    v: Vec<Vector>,
    levels: Vec<usize>,
) -> Option<Vec<(Vector, Vector)>> {
    if u.len() != v.len() {
        return None;
    }
    if u.is_empty() {
        return Some(Vec::new());
    }
    let dx = x.dim();
    let dy = y.dim();
    let pick = levels.iter().position(|&k| !intersect(dx, &x.seminorm(k).kernel(), &u).is_empty());
    let Some(pos) = pick else {
        return Some(u.into_iter().zip(v).collect());
    };
    let k0 = levels[pos];
    let u0 = intersect(dx, &x.seminorm(k0).kernel(), &u);
    let v0 = intersect(dy, &y.seminorm(k0).kernel(), &v);
    if u0.len() != v0.len() {
        return None;
    }
    let u1 = complement_within(dx, &u, &u0);
    let v1 = complement_within(dy, &v, &v0);
    let mut rest = levels.clone();
    rest.remove(pos);
    let mut out = split(x, y, u0, v0, rest)?;
    out.extend(split(x, y, u1, v1, levels)?);
    Some(out)
}

/// Basis vectors of `U` completing a basis of `U0 ⊆ U`.
fn complement_within(dim: usize, u: &[Vector], u0: &[Vector]) -> Vec<Vector> {
    let mut acc = u0.to_vec();
    let mut out = Vec::new();
    for w in u {
        let mut t = acc.clone();
        t.push(w.clone());
        if span_basis(dim, &t).len() > acc.len() {
            acc.push(w.clone());
            out.push(w.clone());
        }
    }
    out
}

fn map_from_pairs(dx: usize, dy: usize, pairs: &[(Vector, Vector)]) -> Option<Matrix> {
    let us: Vec<Vector> = pairs.iter().map(|p| p.0.clone()).collect();
    let vs: Vec<Vector> = pairs.iter().map(|p| p.1.clone()).collect();
    let umat = Matrix::from_cols(dx, &us).ok()?;
    let vmat = Matrix::from_cols(dy, &vs).ok()?;
    Some(vmat.mul(&umat.inverse()?))
}

/// Linear system for all `h` with `h(ker_X,m) ⊆ ker_Y,m`; returns a basis
/// of the solution space as matrices.
fn kernel_preserving_maps(x: &MultiSpace, y: &MultiSpace) -> Vec<Matrix> {
    let (dx, dy) = (x.dim(), y.dim());
    let n = dx * dy;
    let mut rows: Vec<Vector> = Vec::new();
    for m in 0..x.length() {
        for k in x.seminorm(m).kernel() {
            for psi in y.seminorm(m).functionals() {
                // ψ·h·k = Σ_{i,j} ψ_i h_ij k_j
                let mut row = vec![Rational::zero(); n];
                for i in 0..dy {
                    for j in 0..dx {
                        row[i * dx + j] = psi[i].clone() * k[j].clone();
                    }
                }
                rows.push(row);
            }
        }
    }
    let basis = if rows.is_empty() {
        (0..n).map(|i| crate::exact::linalg::unit(n, i)).collect()
    } else {
        Matrix::from_rows(n, rows).expect("rows").kernel()
    };
    basis
        .into_iter()
        .map(|b| Matrix::from_rows(dx, b.chunks(dx.max(1)).map(|c| c.to_vec()).collect()).expect("reshape"))
        .collect()
}

fn combine(basis: &[Matrix], coeffs: &[i64], dx: usize, dy: usize) -> Matrix {
    let mut h = Matrix::zeros(dy, dx);
    for (b, &c) in basis.iter().zip(coeffs) {
        if c == 0 {
            continue;
        }
        let cb = b.scaled(&Rational::from_integer(c.into()));
        h = Matrix::from_rows(dx, (0..dy).map(|i| crate::exact::linalg::add(h.row(i), cb.row(i))).collect())
            .expect("same shape");
    }
    h
}

/// Searches the space of kernel-preserving maps for an invertible one.
fn search_invertible(x: &MultiSpace, y: &MultiSpace) -> Result<Option<Matrix>, bool> {
    let (dx, dy) = (x.dim(), y.dim());
    let basis = kernel_preserving_maps(x, y);
    if basis.is_empty() {
        return Err(true);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x6d73_6e31);
    for _ in 0..24 {
        let coeffs: Vec<i64> = (0..basis.len()).map(|_| rng.gen_range(-1000..=1000)).collect();
        let h = combine(&basis, &coeffs, dx, dy);
        if !h.determinant().is_zero() {
            return Ok(Some(h));
        }
    }
    // det is a polynomial of degree ≤ d in the coefficients; vanishing on the
    // grid {0..d}^r proves it vanishes identically.
    let r = basis.len();
    let side = dx as u64 + 1;
    let total = side.checked_pow(r as u32).filter(|&t| t <= 1 << 20);
    let Some(total) = total else {
        return Err(false);
    };
    for idx in 0..total {
        let mut t = idx;
        let coeffs: Vec<i64> = (0..r)
            .map(|_| {
                let c = (t % side) as i64;
                t /= side;
                c
            })
            .collect();
        let h = combine(&basis, &coeffs, dx, dy);
        if !h.determinant().is_zero() {
            return Ok(Some(h));
        }
    }
    Err(true)
}

/// Builds a multi-isomorphism `X → Y` from matching kernel invariants by
/// recursing on a kernel and a complement. When the recursion's subspace
/// dimensions stop matching, the full linear system of kernel-preserving
/// maps is searched for an invertible element.
pub fn build_iso_from_invariant(x: &Arc<MultiSpace>, y: &Arc<MultiSpace>) -> Result<IsoOutcome> {
    if x.length() != y.length() {
        return Err(Error::LengthMismatch(x.length(), y.length()));
    }
    if invariant_alpha(x)? != invariant_alpha(y)? {
        return Ok(IsoOutcome::NoIso(NoIsoReason::InvariantMismatch));
    }
    let (dx, dy) = (x.dim(), y.dim());
    let u: Vec<Vector> = (0..dx).map(|i| crate::exact::linalg::unit(dx, i)).collect();
    let v: Vec<Vector> = (0..dy).map(|i| crate::exact::linalg::unit(dy, i)).collect();
    let levels: Vec<usize> = (0..x.length()).collect();
    if let Some(pairs) = split(x, y, u, v, levels) {
        if let Some(h) = map_from_pairs(dx, dy, &pairs) {
            if kernels_match(x, y, &h) {
                return Ok(IsoOutcome::Iso(LinearMap::new(x.clone(), y.clone(), h)?));
            }
        }
    }
    match search_invertible(x, y) {
        Ok(Some(h)) => Ok(IsoOutcome::Iso(LinearMap::new(x.clone(), y.clone(), h)?)),
        Ok(None) => unreachable!("search returns a map or an error"),
        Err(certified) => Ok(IsoOutcome::NoIso(NoIsoReason::KernelArrangement { certified })),
    }
}

/// Inverse of an invertible map as a map `Y → X`.
pub fn inverse(h: &LinearMap) -> Option<LinearMap> {
    let inv = h.matrix.inverse()?;
    LinearMap::new(h.codomain.clone(), h.domain.clone(), inv).ok()
}

/// `‖h‖_mb · ‖h⁻¹‖_mb` for the constructed isomorphism, at least 1;
/// `None` is infinite.
pub fn bm_upper_bound(x: &Arc<MultiSpace>, y: &Arc<MultiSpace>) -> Result<Option<Rational>> {
    let h = match build_iso_from_invariant(x, y)? {
        IsoOutcome::Iso(h) => h,
        IsoOutcome::NoIso(_) => return Ok(None),
    };
    let hinv = inverse(&h).expect("isomorphism is invertible");
    let (Some(a), Some(b)) = (multi_bounded_norm(&h)?, multi_bounded_norm(&hinv)?) else {
        return Ok(None);
    };
    Ok(Some((a * b).max(Rational::one())))
}

/// Seminorm-level rescaling `‖x‖' = ‖x‖/(1+δ)`.
pub fn rescale_seminorm(s: &PolyhedralSeminorm, delta: &Rational) -> PolyhedralSeminorm {
    s.scaled(&(Rational::one() / (Rational::one() + delta.clone())))
}
