//! Colourings of embedding sets: finite nets, oscillation, the
//! discrete/continuous transformers, product colourings, the quotient lift
//! and a finite monochromatic search.

use std::sync::Arc;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rayon::prelude::*;

use crate::exact::linalg::{rank_of, sub};
use crate::exact::polytope::h_to_v;
use crate::maps::{is_embedding, map_distance, max_distance, Bound, LinearMap};
use crate::seminorm::PolyhedralSeminorm;
use crate::space::{product_space, MultiSpace, ProductMode};
use crate::{Error, Halfspace, Matrix, Rational, Result, Vector};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbeddingNet {
    pub x: Arc<MultiSpace>,
    pub y: Arc<MultiSpace>,
    pub points: Vec<LinearMap>,
    /// Every embedding is within this distance of some point, when
    /// `certified`; otherwise the requested spacing, unchecked.
    pub resolution: Rational,
    pub certified: bool,
}

/// `max_{m<λ_X} ‖f − g‖_m`, infinite as `None`.
pub fn net_distance(f: &LinearMap, g: &LinearMap) -> Result<Option<Rational>> {
    max_distance(f, g, f.domain().length())
}

/// Faces of `{y : ‖y‖_{Y,m} = r_m, m < λ}`, as vertex lists.
fn sphere_faces(y: &MultiSpace, radii: &[Rational]) -> Result<Vec<Vec<Vector>>> {
    let d = y.dim();
    let levels = radii.len();
    let mut all: Vec<Vector> = Vec::new();
    for m in 0..levels {
        all.extend(y.seminorm(m).functionals().iter().cloned());
    }
    if rank_of(d, &all) < d {
        return Err(Error::UnboundedEmbeddingSet);
    }
    // (level, functional, sign) choices for each level with positive radius
    let mut choices: Vec<Vec<(usize, usize, bool)>> = vec![Vec::new()];
    for (m, r) in radii.iter().enumerate() {
        if r.is_zero() {
            continue;
        }
        let k = y.seminorm(m).functionals().len();
        let mut next = Vec::new();
        for c in &choices {
            for i in 0..k {
                for s in [true, false] {
                    let mut c = c.clone();
                    c.push((m, i, s));
                    next.push(c);
                }
            }
        }
        choices = next;
    }
    let faces: Vec<Option<Vec<Vector>>> = choices
        .par_iter()
        .map(|choice| -> Result<Option<Vec<Vector>>> {
            let mut eq_rows: Vec<Vector> = Vec::new();
            let mut eq_rhs: Vec<Rational> = Vec::new();
            for (m, r) in radii.iter().enumerate() {
                if r.is_zero() {
                    for f in y.seminorm(m).functionals() {
                        eq_rows.push(f.clone());
                        eq_rhs.push(Rational::zero());
                    }
                }
            }
            for &(m, i, s) in choice {
                eq_rows.push(y.seminorm(m).functionals()[i].clone());
                eq_rhs.push(if s { radii[m].clone() } else { -radii[m].clone() });
            }
            let (base, basis) = if eq_rows.is_empty() {
                (vec![Rational::zero(); d], (0..d).map(|i| crate::exact::linalg::unit(d, i)).collect::<Vec<_>>())
            } else {
                let a = Matrix::from_rows(d, eq_rows)?;
                let Some(p) = a.solve(&eq_rhs) else { return Ok(None) };
                (p, a.kernel())
            };
            let mut hs: Vec<Halfspace> = Vec::new();
            for (m, r) in radii.iter().enumerate() {
                for f in y.seminorm(m).functionals() {
                    let at = crate::exact::linalg::dot(f, &base);
                    let a: Vector = basis.iter().map(|b| crate::exact::linalg::dot(f, b)).collect();
                    let neg: Vector = a.iter().map(|v| -v.clone()).collect();
                    if a.iter().all(|v| v.is_zero()) {
                        if at.abs() > *r {
                            return Ok(None);
                        }
                        continue;
                    }
                    hs.push(Halfspace::new(a, r.clone() - at.clone()));
                    hs.push(Halfspace::new(neg, r.clone() + at));
                }
            }
            let verts: Vec<Vector> = if basis.is_empty() {
                vec![Vec::new()]
            } else {
                let v = h_to_v(basis.len(), &hs)?;
                if v.is_empty() {
                    return Ok(None);
                }
                v
            };
            let mut pts: Vec<Vector> = verts
                .iter()
                .map(|u| {
                    let mut p = base.clone();
                    for (c, b) in u.iter().zip(&basis) {
                        for (pi, bi) in p.iter_mut().zip(b) {
                            *pi += c.clone() * bi.clone();
                        }
                    }
                    p
                })
                .collect();
            pts.sort();
            pts.dedup();
            Ok(Some(pts))
        })
        .collect::<Result<_>>()?;
    let mut out: Vec<Vec<Vector>> = faces.into_iter().flatten().collect();
    out.sort();
    out.dedup();
    Ok(out)
}

fn column_map(x: &Arc<MultiSpace>, y: &Arc<MultiSpace>, v: &[Rational]) -> Result<LinearMap> {
    LinearMap::new(x.clone(), y.clone(), Matrix::from_rows(1, v.iter().map(|a| vec![a.clone()]).collect())?)
}

/// Lattice points `Σ (k_i/N) v_i` with `Σ k_i = N`.
fn lattice(verts: &[Vector], n: usize) -> Vec<Vector> {
    fn rec(verts: &[Vector], n: usize, left: usize, i: usize, acc: &mut Vec<usize>, out: &mut Vec<Vector>) {
        if i + 1 == verts.len() {
            acc.push(left);
            let dim = verts[0].len();
            let mut p = vec![Rational::zero(); dim];
            for (k, v) in acc.iter().zip(verts) {
                if *k == 0 {
                    continue;
                }
                let w = Rational::new((*k as i64).into(), (n as i64).into());
                for (pi, vi) in p.iter_mut().zip(v) {
                    *pi += w.clone() * vi.clone();
                }
            }
            out.push(p);
            acc.pop();
            return;
        }
        for k in 0..=left {
            acc.push(k);
            rec(verts, n, left - k, i + 1, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    rec(verts, n, n, 0, &mut Vec::new(), &mut out);
    out
}

struct Face {
    verts: Vec<Vector>,
    diameter: Rational,
}

fn faces_for(x: &Arc<MultiSpace>, y: &Arc<MultiSpace>) -> Result<Vec<Face>> {
    if x.length() > y.length() {
        return Err(Error::EmptyEmbeddingSet);
    }
    let radii: Vec<Rational> = (0..x.length()).map(|m| x.seminorm(m).eval_unchecked(&[Rational::one()])).collect();
    let faces = sphere_faces(y, &radii)?;
    if faces.is_empty() {
        return Err(Error::EmptyEmbeddingSet);
    }
    faces
        .into_iter()
        .map(|verts| {
            let mut diameter = Rational::zero();
            for a in &verts {
                for b in &verts {
                    let d = column_map(x, y, &sub(a, b))?;
                    let z = column_map(x, y, &vec![Rational::zero(); y.dim()])?;
                    match net_distance(&d, &z)? {
                        Some(v) if v > diameter => diameter = v,
                        None => return Err(Error::UnboundedEmbeddingSet),
                        _ => {}
                    }
                }
            }
            Ok(Face { verts, diameter })
        })
        .collect()
}

/// Covering radius guaranteed by `n` divisions of a face.
fn face_resolution(f: &Face, n: usize) -> Rational {
    let k = f.verts.len();
    if k <= 1 {
        return Rational::zero();
    }
    let n = Rational::from_integer((n as i64).into());
    if k == 2 {
        // nearest of the evenly spaced points on a segment
        return f.diameter.clone() / (Rational::from_integer(2.into()) * n);
    }
    Rational::from_integer(((k - 1) as i64).into()) * f.diameter.clone() / n
}

fn net_from_faces(x: &Arc<MultiSpace>, y: &Arc<MultiSpace>, faces: &[Face], divisions: &[usize]) -> Result<EmbeddingNet> {
    let mut pts: Vec<Vector> = Vec::new();
    let mut resolution = Rational::zero();
    for (f, &n) in faces.iter().zip(divisions) {
        pts.extend(lattice(&f.verts, n.max(1)));
        let r = face_resolution(f, n.max(1));
        if r > resolution {
            resolution = r;
        }
    }
    pts.sort();
    pts.dedup();
    let points = pts.iter().map(|p| column_map(x, y, p)).collect::<Result<Vec<_>>>()?;
    Ok(EmbeddingNet { x: x.clone(), y: y.clone(), points, resolution, certified: true })
}

/// Finite net of `Emb(X, Y)` with spacing at most `eps`. Exhaustive and
/// certified when `dim X = 1`; otherwise seeded samples.
pub fn build_net(x: &Arc<MultiSpace>, y: &Arc<MultiSpace>, eps: &Rational, seed: u64) -> Result<EmbeddingNet> {
    if !eps.is_positive() {
        return Err(Error::EpsNonPositive);
    }
    if x.dim() != 1 {
        return sampled_net(x, y, eps, seed);
    }
    let faces = faces_for(x, y)?;
    let divisions: Vec<usize> = faces
        .iter()
        .map(|f| {
            let k = f.verts.len();
            if k <= 1 {
                return 1;
            }
            // neighbouring grid points at most eps apart
            let need = if k == 2 {
                f.diameter.clone() / eps.clone()
            } else {
                Rational::from_integer(((k - 1) as i64).into()) * f.diameter.clone() / eps.clone()
            };
            let c = need.ceil().to_integer();
            usize::try_from(c).unwrap_or(usize::MAX).max(1)
        })
        .collect();
    net_from_faces(x, y, &faces, &divisions)
}

/// Exhaustive net with the same number of divisions on every face; the
/// resolution is whatever that spacing certifies.
pub fn build_net_divisions(x: &Arc<MultiSpace>, y: &Arc<MultiSpace>, divisions: usize) -> Result<EmbeddingNet> {
    if x.dim() != 1 {
        return Err(Error::ShapeMismatch("exhaustive nets need a one-dimensional domain".into()));
    }
    let faces = faces_for(x, y)?;
    net_from_faces(x, y, &faces, &vec![divisions; faces.len()])
}

fn sampled_net(x: &Arc<MultiSpace>, y: &Arc<MultiSpace>, eps: &Rational, seed: u64) -> Result<EmbeddingNet> {
    let mut rng = crate::rng::stream(seed, 0x6e6574);
    let mut points: Vec<LinearMap> = Vec::new();
    if x == y {
        let id = LinearMap::identity(x.clone());
        points.push(id.scaled(&-Rational::one()));
        points.push(id);
    }
    for _ in 0..256 {
        let rows: Vec<Vector> = (0..y.dim())
            .map(|_| (0..x.dim()).map(|_| Rational::from_integer(rng.gen_range(-1i64..=1).into())).collect())
            .collect();
        let f = LinearMap::new(x.clone(), y.clone(), Matrix::from_rows(x.dim(), rows)?)?;
        if !points.contains(&f) && is_embedding(&f, &Rational::zero()).holds {
            points.push(f);
        }
    }
    if points.is_empty() {
        return Err(Error::EmptyEmbeddingSet);
    }
    Ok(EmbeddingNet { x: x.clone(), y: y.clone(), points, resolution: eps.clone(), certified: false })
}

// ------------------------------------------------------------ colourings

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ColouringKind {
    Discrete { colours: usize },
    /// Continuous for the pseudometric `max_{m<level} ‖·‖_m`.
    Continuous { level: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    Constant(Rational),
    /// `min(1, max(0, coordinate k of φ(e_0)))`.
    CoordinateClamp { coordinate: usize },
    /// `min(1, min_ψ max_{m<levels} ‖φ − ψ‖_m)`; constant 1 for no points.
    DistanceToSet { points: Vec<LinearMap>, levels: usize },
    /// `⌊Σ entries⌋ mod colours`.
    ModularSum { colours: usize },
    /// Colour 0 when the first coordinate of `φ(e_0)` is nonnegative.
    SignOfFirst,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Evaluator {
    Table(Vec<(LinearMap, Rational)>),
    Family(Family),
    /// `⌊c/ε⌋` on a mesh-ε grid.
    Discretized { base: Box<Colouring>, eps: Rational },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Colouring {
    pub kind: ColouringKind,
    pub evaluator: Evaluator,
}

fn clamp01(v: Rational) -> Rational {
    if v.is_negative() {
        Rational::zero()
    } else if v > Rational::one() {
        Rational::one()
    } else {
        v
    }
}

impl Colouring {
    pub fn table(kind: ColouringKind, points: &[LinearMap], values: Vec<Rational>) -> Result<Self> {
        if points.len() != values.len() {
            return Err(Error::ShapeMismatch("one value per point".into()));
        }
        Ok(Colouring { kind, evaluator: Evaluator::Table(points.iter().cloned().zip(values).collect()) })
    }

    pub fn discrete_table(points: &[LinearMap], colours: usize, values: &[usize]) -> Result<Self> {
        if values.iter().any(|&v| v >= colours) {
            return Err(Error::ShapeMismatch("colour out of range".into()));
        }
        let vals = values.iter().map(|&v| Rational::from_integer((v as i64).into())).collect();
        Colouring::table(ColouringKind::Discrete { colours }, points, vals)
    }

    pub fn family(kind: ColouringKind, f: Family) -> Self {
        Colouring { kind, evaluator: Evaluator::Family(f) }
    }

    /// The value in `[0,1]` (continuous) or the colour index (discrete).
    pub fn value(&self, f: &LinearMap) -> Result<Rational> {
        match &self.evaluator {
            Evaluator::Table(rows) => {
                rows.iter().find(|(p, _)| p == f).map(|(_, v)| v.clone()).ok_or(Error::UndefinedPoint)
            }
            Evaluator::Family(fam) => family_value(fam, f),
            Evaluator::Discretized { base, eps } => {
                let v = base.value(f)?;
                Ok((v / eps.clone()).floor())
            }
        }
    }

    pub fn colour(&self, f: &LinearMap) -> Result<usize> {
        let v = self.value(f)?;
        v.to_integer().try_into().map_err(|_| Error::ShapeMismatch("colour is not an index".into()))
    }

    /// The grid value of a discretized colouring, the value otherwise.
    pub fn level_value(&self, f: &LinearMap) -> Result<Rational> {
        match &self.evaluator {
            Evaluator::Discretized { eps, .. } => Ok(clamp01(self.value(f)? * eps.clone())),
            _ => self.value(f),
        }
    }
}

fn family_value(fam: &Family, f: &LinearMap) -> Result<Rational> {
    match fam {
        Family::Constant(c) => Ok(c.clone()),
        Family::CoordinateClamp { coordinate } => {
            if f.domain().dim() == 0 || *coordinate >= f.codomain().dim() {
                return Err(Error::UndefinedPoint);
            }
            Ok(clamp01(f.matrix().get(*coordinate, 0).clone()))
        }
        Family::DistanceToSet { points, levels } => {
            let mut best = Rational::one();
            for p in points {
                let mut d = Rational::zero();
                for m in 0..*levels {
                    match map_distance(f, p, m)? {
                        Bound::Finite(v) if v > d => d = v,
                        Bound::Unbounded => {
                            d = Rational::one();
                            break;
                        }
                        _ => {}
                    }
                }
                if d < best {
                    best = d;
                }
            }
            Ok(best)
        }
        Family::ModularSum { colours } => {
            let mut s = Rational::zero();
            for r in f.matrix().row_vecs() {
                for v in r {
                    s += v;
                }
            }
            let k = s.floor().to_integer().mod_floor(&(*colours as i64).into());
            Ok(Rational::from_integer(k))
        }
        Family::SignOfFirst => {
            if f.domain().dim() == 0 || f.codomain().dim() == 0 {
                return Err(Error::UndefinedPoint);
            }
            Ok(if f.matrix().get(0, 0).is_negative() { Rational::one() } else { Rational::zero() })
        }
    }
}

/// Continuous: `max − min`. Discrete: 0 when one colour class `eps`-covers
/// the points, else 1.
pub fn oscillation(c: &Colouring, points: &[LinearMap], eps: &Rational) -> Result<Rational> {
    let values: Vec<Rational> = points.iter().map(|p| c.value(p)).collect::<Result<_>>()?;
    if values.is_empty() {
        return Ok(Rational::zero());
    }
    match c.kind {
        ColouringKind::Continuous { .. } => {
            let max = values.iter().max().unwrap().clone();
            let min = values.iter().min().unwrap().clone();
            Ok(max - min)
        }
        ColouringKind::Discrete { .. } => {
            let mut colours: Vec<&Rational> = values.iter().collect();
            colours.sort();
            colours.dedup();
            for col in colours {
                let class: Vec<&LinearMap> = points.iter().zip(&values).filter(|(_, v)| *v == col).map(|(p, _)| p).collect();
                let mut covers = true;
                for p in points {
                    let mut near = false;
                    for q in &class {
                        if net_distance(p, q)?.is_some_and(|d| d <= *eps) {
                            near = true;
                            break;
                        }
                    }
                    if !near {
                        covers = false;
                        break;
                    }
                }
                if covers {
                    return Ok(Rational::zero());
                }
            }
            Ok(Rational::one())
        }
    }
}

/// Pairs violating `|c(x) − c(y)| ≤ max_{m<n} ‖x − y‖_m`.
pub fn lipschitz_violations(c: &Colouring, points: &[LinearMap]) -> Result<Vec<(usize, usize)>> {
    let ColouringKind::Continuous { level } = c.kind else {
        return Err(Error::ShapeMismatch("Lipschitz audit needs a continuous colouring".into()));
    };
    let values: Vec<Rational> = points.iter().map(|p| c.value(p)).collect::<Result<_>>()?;
    let pairs: Vec<(usize, usize)> =
        (0..points.len()).flat_map(|i| (i + 1..points.len()).map(move |j| (i, j))).collect();
    let bad: Vec<Option<(usize, usize)>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let gap = (values[i].clone() - values[j].clone()).abs();
            let d = max_distance(&points[i], &points[j], level)?;
            Ok(match d {
                Some(d) if gap > d => Some((i, j)),
                _ => None,
            })
        })
        .collect::<Result<_>>()?;
    Ok(bad.into_iter().flatten().collect())
}

/// A colouring into the mesh-`eps` grid of `[0,1]`, within `eps` of `c`.
pub fn discretize(c: &Colouring, eps: &Rational) -> Result<Colouring> {
    if !eps.is_positive() {
        return Err(Error::EpsNonPositive);
    }
    if !matches!(c.kind, ColouringKind::Continuous { .. }) {
        return Err(Error::ShapeMismatch("discretize needs a continuous colouring".into()));
    }
    let colours = (Rational::one() / eps.clone()).floor().to_integer();
    let colours = usize::try_from(colours).unwrap_or(usize::MAX - 1) + 1;
    Ok(Colouring {
        kind: ColouringKind::Discrete { colours },
        evaluator: Evaluator::Discretized { base: Box::new(c.clone()), eps: eps.clone() },
    })
}

/// `c̃(φ) = min{1, min_{ψ ∈ net, c(ψ) = r} max_{m<λ_X} ‖φ − ψ‖_m}`, with `r`
/// the last colour.
pub fn bad_colouring_from_discrete(c: &Colouring, net: &EmbeddingNet) -> Result<Colouring> {
    let ColouringKind::Discrete { colours } = c.kind else {
        return Err(Error::ShapeMismatch("needs a discrete colouring".into()));
    };
    let r = colours.checked_sub(1).ok_or_else(|| Error::ShapeMismatch("no colours".into()))?;
    let mut points = Vec::new();
    for p in &net.points {
        if c.colour(p)? == r {
            points.push(p.clone());
        }
    }
    let levels = net.x.length();
    Ok(Colouring::family(ColouringKind::Continuous { level: levels }, Family::DistanceToSet { points, levels }))
}

// --------------------------------------------------------------- product

fn single_level(x: &MultiSpace, j: usize) -> Arc<MultiSpace> {
    Arc::new(MultiSpace::new(x.dim(), vec![x.seminorm(j).clone()], true).expect("one level"))
}

/// `c` on `Emb(X, Z)` with `Z` the coordinate product of one-level factors,
/// read as a colouring of tuples `(γ_j)_j`, `γ_j ∈ Emb((X,‖·‖_j), Z_j)`.
#[derive(Clone, Debug)]
pub struct ProductColouring {
    pub base: Colouring,
    pub factors: Vec<Arc<MultiSpace>>,
    pub z: Arc<MultiSpace>,
}

pub fn product_colouring(c: Colouring, factors: &[Arc<MultiSpace>]) -> Result<ProductColouring> {
    if factors.is_empty() || factors.iter().any(|f| f.length() != 1) {
        return Err(Error::ShapeMismatch("factors must be one-level spaces".into()));
    }
    let owned: Vec<MultiSpace> = factors.iter().map(|f| f.as_ref().clone()).collect();
    let z = Arc::new(product_space(&owned, ProductMode::Coordinate)?);
    Ok(ProductColouring { base: c, factors: factors.to_vec(), z })
}

impl ProductColouring {
    /// `F(γ⃗)(x) = (γ_1(x), …, γ_n(x))`, on the space whose levels are the
    /// domains of the `γ_j`.
    pub fn assemble(&self, gammas: &[LinearMap]) -> Result<LinearMap> {
        if gammas.len() != self.factors.len() {
            return Err(Error::ShapeMismatch("one map per factor".into()));
        }
        let d = gammas[0].domain().dim();
        let mut rows: Vec<Vector> = Vec::new();
        let mut levels: Vec<PolyhedralSeminorm> = Vec::new();
        for (g, f) in gammas.iter().zip(&self.factors) {
            if g.codomain() != f || g.domain().dim() != d || g.domain().length() != 1 {
                return Err(Error::ShapeMismatch("map does not match its factor".into()));
            }
            rows.extend(g.matrix().row_vecs());
            levels.push(g.domain().seminorm(0).clone());
        }
        let x = Arc::new(MultiSpace::new(d, levels, false)?);
        LinearMap::new(x, self.z.clone(), Matrix::from_rows(d, rows)?)
    }

    pub fn value(&self, gammas: &[LinearMap]) -> Result<Rational> {
        self.base.value(&self.assemble(gammas)?)
    }

    /// Both sides of `c(ρ∘η) = ĉ((ρ_j∘η)_j)` for `ρ = F(ρ⃗)`.
    pub fn identity(&self, rhos: &[LinearMap], eta: &LinearMap) -> Result<ProductIdentity> {
        let rho = self.assemble(rhos)?;
        let eta_full = eta.with_codomain(rho.domain().clone())?;
        let left_map = rho.after(&eta_full)?;
        let parts: Vec<LinearMap> = rhos
            .iter()
            .enumerate()
            .map(|(j, r)| {
                let e = LinearMap::new(single_level(eta.domain(), j), r.domain().clone(), eta.matrix().clone())?;
                r.after(&e)
            })
            .collect::<Result<_>>()?;
        let right_map = self.assemble(&parts)?;
        let left = self.base.value(&left_map)?;
        let right = self.value(&parts)?;
        Ok(ProductIdentity { maps_equal: left_map.matrix() == right_map.matrix(), left, right })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductIdentity {
    pub maps_equal: bool,
    pub left: Rational,
    pub right: Rational,
}

impl ProductIdentity {
    pub fn holds(&self) -> bool {
        self.maps_equal && self.left == self.right
    }
}

// -------------------------------------------------------- quotient lift

/// The one-level quotient setting: `π_X: X → X̃`, the padded `Z × Z` with
/// `‖(z₁, z₂)‖ = ‖z₁‖_Z`, and `c̃(γ) = c(γ∘π_X)`.
#[derive(Clone, Debug)]
pub struct QuotientLift {
    pub base: Colouring,
    pub quotient: Arc<MultiSpace>,
    pub pi: LinearMap,
    pub padded: Arc<MultiSpace>,
}

pub fn quotient_map(x: &Arc<MultiSpace>) -> Result<LinearMap> {
    if x.length() != 1 {
        return Err(Error::MultiLevelInput);
    }
    let q = x.seminorm(0).quotient();
    let xt = Arc::new(MultiSpace::new(q.norm.dim(), vec![q.norm.clone()], true)?);
    LinearMap::new(x.clone(), xt, q.projection.clone())
}

pub fn quotient_lift(c: Colouring, x: &Arc<MultiSpace>, z: &Arc<MultiSpace>) -> Result<QuotientLift> {
    if x.length() != 1 || z.length() != 1 {
        return Err(Error::MultiLevelInput);
    }
    let pi = quotient_map(x)?;
    let d = z.dim();
    let fs: Vec<Vector> = z
        .seminorm(0)
        .functionals()
        .iter()
        .map(|f| f.iter().cloned().chain(std::iter::repeat_n(Rational::zero(), d)).collect())
        .collect();
    let padded = Arc::new(MultiSpace::from_functionals(2 * d, vec![fs], true)?);
    Ok(QuotientLift { base: c, quotient: pi.codomain().clone(), pi, padded })
}

impl QuotientLift {
    pub fn value(&self, gamma: &LinearMap) -> Result<Rational> {
        self.base.value(&gamma.after(&self.pi)?)
    }

    /// `ρ̄(y) = (ρ(y), 0)`.
    pub fn pad(&self, rho: &LinearMap) -> Result<LinearMap> {
        let mut rows = rho.matrix().row_vecs();
        let cols = rho.domain().dim();
        rows.extend(std::iter::repeat_n(vec![Rational::zero(); cols], rho.codomain().dim()));
        LinearMap::new(rho.domain().clone(), self.padded.clone(), Matrix::from_rows(cols, rows)?)
    }
}

/// Both sides of `‖(ρ∘π_Y)∘η − θ∘π_X‖ ≤ ‖ρ∘φ − θ‖`, where `φ` is the map
/// `η` induces between the quotients.
pub fn distance_transfer(eta: &LinearMap, rho: &LinearMap, theta: &LinearMap) -> Result<(Bound, Bound)> {
    let pi_x = quotient_map(eta.domain())?;
    let pi_y = quotient_map(eta.codomain())?;
    let lift_x = eta.domain().seminorm(0).quotient().lift_matrix();
    let phi = LinearMap::new(pi_x.codomain().clone(), pi_y.codomain().clone(), pi_y.matrix().mul(eta.matrix()).mul(&lift_x))?;
    let left = rho.after(&pi_y)?.after(eta)?.minus(&theta.after(&pi_x)?)?;
    let right = rho.after(&phi)?.minus(theta)?;
    let zero_l = left.scaled(&Rational::zero());
    let zero_r = right.scaled(&Rational::zero());
    Ok((map_distance(&left, &zero_l, 0)?, map_distance(&right, &zero_r, 0)?))
}

// ---------------------------------------------------------------- search

/// For each candidate and each `η` of the `X→Y` net, the indices of the
/// `X→Z` net points within `eps` of `γ∘η`.
pub fn coverage(
    net_xz: &EmbeddingNet,
    net_xy: &EmbeddingNet,
    candidates: &[LinearMap],
    eps: &Rational,
) -> Result<Vec<Vec<Vec<usize>>>> {
    candidates
        .iter()
        .map(|g| {
            net_xy
                .points
                .par_iter()
                .map(|eta| {
                    let xi = g.after(eta)?;
                    let mut near = Vec::new();
                    for (k, p) in net_xz.points.iter().enumerate() {
                        if net_distance(&xi, p)?.is_some_and(|d| d <= *eps) {
                            near.push(k);
                        }
                    }
                    Ok(near)
                })
                .collect()
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Monochromatic {
    pub candidate: usize,
    pub colour: usize,
}

/// The first candidate and colour that `eps`-cover every `γ∘η`.
pub fn search_with_coverage(cover: &[Vec<Vec<usize>>], colours: &[usize], r: usize) -> Option<Monochromatic> {
    for (ci, per_eta) in cover.iter().enumerate() {
        for colour in 0..r {
            if per_eta.iter().all(|near| near.iter().any(|&k| colours[k] == colour)) {
                return Some(Monochromatic { candidate: ci, colour });
            }
        }
    }
    None
}

pub fn search_monochromatic(
    c: &Colouring,
    net_xz: &EmbeddingNet,
    net_xy: &EmbeddingNet,
    candidates: &[LinearMap],
    eps: &Rational,
) -> Result<Option<Monochromatic>> {
    let ColouringKind::Discrete { colours: r } = c.kind else {
        return Err(Error::ShapeMismatch("search needs a discrete colouring".into()));
    };
    let colours: Vec<usize> = net_xz.points.iter().map(|p| c.colour(p)).collect::<Result<_>>()?;
    let cover = coverage(net_xz, net_xy, candidates, eps)?;
    Ok(search_with_coverage(&cover, &colours, r))
}
