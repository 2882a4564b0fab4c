//! Amalgamation: the three-case pushout on `Y ⊕ Z`, its n-embedding variant,
//! the per-level product amalgam and the folded multi-amalgam.

use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::exact::linalg::{dot, is_zero_vec, rank_of};
use crate::exact::lp::{solve, Constraint, LinearProgram};
use crate::exact::polytope::h_to_v;
use crate::maps::{is_embedding, map_distance, Bound, LinearMap};
use crate::seminorm::PolyhedralSeminorm;
use crate::space::{extend_with_norm, product_space, MultiSpace, ProductMode};
use crate::{Error, Halfspace, Matrix, Rational, Result, Vector};

/// How levels below `λ_X` are materialized.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AmalgamMode {
    /// Every vertex of the dual polytope: the exact infimum seminorm.
    Full,
    /// One extension per functional of Y and of Z, plus points added until the
    /// result is separated. Dominated by the exact seminorm, legs still
    /// isometric, same bound; much smaller for large stages.
    Compact,
}

#[derive(Clone, Debug)]
pub struct PushoutOptions {
    pub delta: Rational,
    pub eps: Rational,
    pub graded: bool,
    pub separated: bool,
    pub mode: AmalgamMode,
    /// Re-verify that the inputs are δ-embeddings.
    pub check_inputs: bool,
}

impl PushoutOptions {
    pub fn new(delta: Rational, eps: Rational) -> Self {
        PushoutOptions { delta, eps, graded: false, separated: false, mode: AmalgamMode::Full, check_inputs: true }
    }

    pub fn graded(mut self, graded: bool) -> Self {
        self.graded = graded;
        self
    }

    pub fn separated(mut self, separated: bool) -> Self {
        self.separated = separated;
        self
    }

    pub fn mode(mut self, mode: AmalgamMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn trusted(mut self) -> Self {
        self.check_inputs = false;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AmalgamResult {
    pub w: Arc<MultiSpace>,
    pub leg_y: LinearMap,
    pub leg_z: LinearMap,
    /// `‖leg_y∘f − leg_z∘g‖_n` for every `n < λ_X`.
    pub certificate: Vec<Bound>,
    pub delta: Rational,
    pub eps: Rational,
    /// The guaranteed bound the certificate is checked against.
    pub bound: Rational,
}

impl AmalgamResult {
    pub fn within_bound(&self) -> bool {
        self.certificate.iter().all(|c| c.le(&self.bound))
    }
}

/// `2δ + δ²`, the expansive distortion after rescaling.
pub fn expansive_delta(delta: &Rational) -> Rational {
    Rational::from_integer(2.into()) * delta.clone() + delta.clone() * delta.clone()
}

/// Weight on `‖x‖_X` in the infimum once the rescaling is undone:
/// `(δ' + ε)/(1 + δ)`. Equals `ε` when `δ = 0`.
pub fn overlap_weight(delta: &Rational, eps: &Rational) -> Rational {
    (expansive_delta(delta) + eps.clone()) / (Rational::one() + delta.clone())
}

/// Every seminorm scaled by `1/(1+δ)`.
pub fn rescale_expansive(x: &MultiSpace, delta: &Rational) -> Result<MultiSpace> {
    if delta.is_negative() {
        return Err(Error::NegativeDelta);
    }
    if delta.is_zero() {
        return Ok(x.clone());
    }
    let c = Rational::one() / (Rational::one() + delta.clone());
    MultiSpace::new(x.dim(), x.seminorms().iter().map(|s| s.scaled(&c)).collect(), x.graded())
}

fn block_pair(phi: &[Rational], psi: &[Rational]) -> Vector {
    let mut v = phi.to_vec();
    v.extend(psi.iter().cloned());
    v
}

fn zeros(n: usize) -> Vector {
    vec![Rational::zero(); n]
}

/// The dual polytope `D = {(φ,ψ) : φ ∈ B*_Y, ψ ∈ B*_Z, f*φ − g*ψ ∈ c·B*_X}` at
/// one level, with membership expressed through convex-combination weights.
struct DualPolytope<'a> {
    phis: &'a [Vector],
    psis: &'a [Vector],
    chis: &'a [Vector],
    f_phis: Vec<Vector>,
    g_psis: Vec<Vector>,
    c: Rational,
    dx: usize,
    dy: usize,
    dz: usize,
}

impl<'a> DualPolytope<'a> {
    fn new(
        f: &LinearMap,
        g: &LinearMap,
        y: &'a PolyhedralSeminorm,
        z: &'a PolyhedralSeminorm,
        x: &'a PolyhedralSeminorm,
        c: Rational,
    ) -> Self {
        DualPolytope {
            phis: y.functionals(),
            psis: z.functionals(),
            chis: x.functionals(),
            f_phis: y.functionals().iter().map(|p| f.matrix().pullback(p)).collect(),
            g_psis: z.functionals().iter().map(|p| g.matrix().pullback(p)).collect(),
            c,
            dx: f.domain().dim(),
            dy: f.codomain().dim(),
            dz: g.codomain().dim(),
        }
    }

    /// Some `ψ ∈ B*_Z` with `(φ, ψ) ∈ D`, preferring a small overlap term.
    fn extend_phi(&self, phi: &[Rational], f: &LinearMap) -> Result<Vector> {
        let target = f.matrix().pullback(phi);
        let w = self.solve_side(&target, &self.g_psis)?;
        Ok(combine(self.psis, &w, self.dz))
    }

    /// Some `φ ∈ B*_Y` with `(φ, ψ) ∈ D`.
    fn extend_psi(&self, psi: &[Rational], g: &LinearMap) -> Result<Vector> {
        let target = g.matrix().pullback(psi);
        let w = self.solve_side(&target, &self.f_phis)?;
        Ok(combine(self.phis, &w, self.dy))
    }

    /// Weights `b` on `pulled` with `|b|₁ ≤ 1` and
    /// `sign·target − sign·Σ b·pulled ∈ c·B*_X`; minimizes the overlap mass.
    fn solve_side(&self, target: &[Rational], pulled: &[Vector]) -> Result<Vec<Rational>> {
        let kb = pulled.len();
        let kt = self.chis.len();
        let nv = 2 * kb + 2 * kt;
        let mut obj = zeros(nv);
        for o in obj.iter_mut().skip(2 * kb) {
            *o = Rational::one();
        }
        let mut lp = LinearProgram::minimize(obj).all_nonneg();
        // target = Σ b·pulled + Σ t·χ  (both orientations reduce to this form,
        // since D is symmetric under (φ,ψ) ↦ (−φ,−ψ) and B*_X is symmetric).
        for r in 0..self.dx {
            let mut row = Vec::with_capacity(nv);
            row.extend(pulled.iter().map(|p| p[r].clone()));
            row.extend(pulled.iter().map(|p| -p[r].clone()));
            row.extend(self.chis.iter().map(|x| x[r].clone()));
            row.extend(self.chis.iter().map(|x| -x[r].clone()));
            if row.iter().all(|v| v.is_zero()) && target[r].is_zero() {
                continue;
            }
            lp.push(Constraint::eq(row, target[r].clone()));
        }
        let mut mass_b = zeros(nv);
        for v in mass_b.iter_mut().take(2 * kb) {
            *v = Rational::one();
        }
        lp.push(Constraint::le(mass_b, Rational::one()));
        let mut mass_t = zeros(nv);
        for v in mass_t.iter_mut().skip(2 * kb) {
            *v = Rational::one();
        }
        lp.push(Constraint::le(mass_t, self.c.clone()));
        let sol = solve(&lp)?;
        Ok((0..kb).map(|j| sol.point[j].clone() - sol.point[kb + j].clone()).collect())
    }

    /// A point of D maximizing `⟨(φ,ψ), k⟩`, with its value.
    fn maximize(&self, k: &[Rational]) -> Result<(Rational, Vector)> {
        let (ka, kb, kt) = (self.phis.len(), self.psis.len(), self.chis.len());
        let nv = 2 * ka + 2 * kb + 2 * kt;
        let mut obj = zeros(nv);
        for (i, p) in self.phis.iter().enumerate() {
            let v = dot(p, &k[..self.dy]);
            obj[i] = v.clone();
            obj[ka + i] = -v;
        }
        for (j, p) in self.psis.iter().enumerate() {
            let v = dot(p, &k[self.dy..]);
            obj[2 * ka + j] = v.clone();
            obj[2 * ka + kb + j] = -v;
        }
        let mut lp = LinearProgram::maximize(obj).all_nonneg();
        for r in 0..self.dx {
            let mut row = Vec::with_capacity(nv);
            row.extend(self.f_phis.iter().map(|p| p[r].clone()));
            row.extend(self.f_phis.iter().map(|p| -p[r].clone()));
            row.extend(self.g_psis.iter().map(|p| -p[r].clone()));
            row.extend(self.g_psis.iter().map(|p| p[r].clone()));
            row.extend(self.chis.iter().map(|x| -x[r].clone()));
            row.extend(self.chis.iter().map(|x| x[r].clone()));
            if row.iter().all(|v| v.is_zero()) {
                continue;
            }
            lp.push(Constraint::eq(row, Rational::zero()));
        }
        let mut mass = |from: usize, len: usize, cap: Rational| {
            let mut m = zeros(nv);
            for v in m.iter_mut().skip(from).take(len) {
                *v = Rational::one();
            }
            lp.push(Constraint::le(m, cap));
        };
        mass(0, 2 * ka, Rational::one());
        mass(2 * ka, 2 * kb, Rational::one());
        mass(2 * ka + 2 * kb, 2 * kt, self.c.clone());
        let sol = solve(&lp)?;
        let a: Vec<Rational> = (0..ka).map(|i| sol.point[i].clone() - sol.point[ka + i].clone()).collect();
        let b: Vec<Rational> =
            (0..kb).map(|j| sol.point[2 * ka + j].clone() - sol.point[2 * ka + kb + j].clone()).collect();
        let phi = combine(self.phis, &a, self.dy);
        let psi = combine(self.psis, &b, self.dz);
        Ok((sol.value, block_pair(&phi, &psi)))
    }
}

fn combine(points: &[Vector], weights: &[Rational], dim: usize) -> Vector {
    let mut out = zeros(dim);
    for (p, w) in points.iter().zip(weights) {
        if w.is_zero() {
            continue;
        }
        for (o, v) in out.iter_mut().zip(p) {
            *o += w.clone() * v.clone();
        }
    }
    out
}

/// Halfspaces `⟨a, φ⟩ ≤ 1` and equalities `⟨k, φ⟩ = 0` describing `B*` of a
/// seminorm, as rows over a block of a larger coordinate vector.
fn dual_ball_rows(s: &PolyhedralSeminorm) -> (Vec<Vector>, Vec<Vector>) {
    (s.ball_vertices().as_ref().clone(), s.kernel())
}

/// Vertices of the dual polytope through double description.
fn full_level(
    f: &LinearMap,
    g: &LinearMap,
    xs: &PolyhedralSeminorm,
    ys: &PolyhedralSeminorm,
    zs: &PolyhedralSeminorm,
    c: &Rational,
) -> Result<PolyhedralSeminorm> {
    let (dy, dz) = (ys.dim(), zs.dim());
    let n = dy + dz;
    let mut eqs: Vec<Vector> = Vec::new();
    let mut ineqs: Vec<(Vector, Rational)> = Vec::new();
    let (yv, yk) = dual_ball_rows(ys);
    for k in yk {
        eqs.push(block_pair(&k, &zeros(dz)));
    }
    for v in yv {
        ineqs.push((block_pair(&v, &zeros(dz)), Rational::one()));
    }
    let (zv, zk) = dual_ball_rows(zs);
    for k in zk {
        eqs.push(block_pair(&zeros(dy), &k));
    }
    for v in zv {
        ineqs.push((block_pair(&zeros(dy), &v), Rational::one()));
    }
    // ⟨f*φ − g*ψ, x⟩ = ⟨φ, f x⟩ − ⟨ψ, g x⟩
    let (xv, xk) = dual_ball_rows(xs);
    let through = |x: &[Rational]| {
        let fx = f.apply(x);
        let gx: Vector = g.apply(x).into_iter().map(|v| -v).collect();
        block_pair(&fx, &gx)
    };
    for k in xk {
        let row = through(&k);
        if !is_zero_vec(&row) {
            eqs.push(row);
        }
    }
    for v in xv {
        ineqs.push((through(&v), c.clone()));
    }
    let basis: Vec<Vector> = if eqs.is_empty() {
        (0..n).map(|i| crate::exact::linalg::unit(n, i)).collect()
    } else {
        Matrix::from_rows(n, eqs)?.kernel()
    };
    if basis.is_empty() {
        return Ok(PolyhedralSeminorm::zero(n));
    }
    let r = basis.len();
    let nmat = Matrix::from_cols(n, &basis)?;
    let hs: Vec<Halfspace> = ineqs
        .into_iter()
        .map(|(a, b)| Halfspace::new(nmat.pullback(&a), b))
        .filter(|h| !is_zero_vec(&h.normal))
        .collect();
    let verts = h_to_v(r, &hs)?;
    let fs: Vec<Vector> = verts.iter().map(|u| nmat.apply(u)).collect();
    // Vertices of a symmetric polytope are exactly the extreme points of
    // conv(±vertices), so no reduction is needed.
    Ok(PolyhedralSeminorm::from_irredundant(n, fs))
}

fn compact_level(dp: &DualPolytope<'_>, f: &LinearMap, g: &LinearMap) -> Result<Vec<Vector>> {
    let from_y: Vec<Result<Vector>> = dp
        .phis
        .par_iter()
        .map(|phi| dp.extend_phi(phi, f).map(|psi| block_pair(phi, &psi)))
        .collect();
    let from_z: Vec<Result<Vector>> = dp
        .psis
        .par_iter()
        .map(|psi| {
            // (φ, ψ) ∈ D with φ found from −ψ by symmetry of D.
            let neg: Vector = psi.iter().map(|v| -v.clone()).collect();
            dp.extend_psi(&neg, g).map(|phi| {
                let phi: Vector = phi.into_iter().map(|v| -v).collect();
                block_pair(&phi, psi)
            })
        })
        .collect();
    from_y.into_iter().chain(from_z).collect()
}

fn block_functionals(ys: &PolyhedralSeminorm, zs: &PolyhedralSeminorm) -> Vec<Vector> {
    let (dy, dz) = (ys.dim(), zs.dim());
    ys.functionals()
        .iter()
        .map(|p| block_pair(p, &zeros(dz)))
        .chain(zs.functionals().iter().map(|p| block_pair(&zeros(dy), p)))
        .collect()
}

fn inclusion(y: Arc<MultiSpace>, w: Arc<MultiSpace>, offset: usize) -> Result<LinearMap> {
    let mut m = Matrix::zeros(w.dim(), y.dim());
    for i in 0..y.dim() {
        m.set(offset + i, i, Rational::one());
    }
    LinearMap::new(y, w, m)
}

fn check_embedding(f: &LinearMap, delta: &Rational) -> Result<()> {
    let c = is_embedding(f, delta);
    if c.holds {
        Ok(())
    } else {
        Err(Error::NotAnEmbedding { delta: delta.to_string(), witness: c.witness.expect("failure has witness") })
    }
}

fn certificate(leg_y: &LinearMap, f: &LinearMap, leg_z: &LinearMap, g: &LinearMap, levels: usize) -> Result<Vec<Bound>> {
    let a = leg_y.after(f)?;
    let b = leg_z.after(g)?;
    (0..levels).into_par_iter().map(|n| map_distance(&a, &b, n)).collect()
}

/// The pushout of `f: X → Y` and `g: X → Z` on `Y ⊕ Z`.
pub fn pushout_nap(f: &LinearMap, g: &LinearMap, opts: &PushoutOptions) -> Result<AmalgamResult> {
    if !opts.eps.is_positive() {
        return Err(Error::EpsNonPositive);
    }
    if opts.delta.is_negative() {
        return Err(Error::NegativeDelta);
    }
    if f.domain() != g.domain() {
        return Err(Error::ShapeMismatch("the two maps have different domains".into()));
    }
    if opts.check_inputs {
        check_embedding(f, &opts.delta)?;
        check_embedding(g, &opts.delta)?;
    }
    if f.codomain().length() > g.codomain().length() {
        let r = pushout_nap(g, f, &PushoutOptions { check_inputs: false, ..opts.clone() })?;
        return Ok(AmalgamResult { leg_y: r.leg_z, leg_z: r.leg_y, ..r });
    }
    let x = f.domain().clone();
    let (y, z) = (f.codomain().clone(), g.codomain().clone());
    let (lx, ly, lz) = (x.length(), y.length(), z.length());
    let c = overlap_weight(&opts.delta, &opts.eps);
    let n = y.dim() + z.dim();

    let mut levels: Vec<PolyhedralSeminorm> = match opts.mode {
        AmalgamMode::Full => (0..lx)
            .into_par_iter()
            .map(|k| full_level(f, g, x.seminorm(k), y.seminorm(k), z.seminorm(k), &c))
            .collect::<Result<_>>()?,
        AmalgamMode::Compact => {
            let raw: Vec<Vec<Vector>> = (0..lx)
                .map(|k| {
                    let dp = DualPolytope::new(f, g, y.seminorm(k), z.seminorm(k), x.seminorm(k), c.clone());
                    compact_level(&dp, f, g)
                })
                .collect::<Result<_>>()?;
            let mut raw = raw;
            separate(f, g, &x, &y, &z, &c, &mut raw)?;
            let mut out: Vec<PolyhedralSeminorm> = Vec::with_capacity(lx);
            for (k, fs) in raw.into_iter().enumerate() {
                let mut fs = fs;
                if opts.graded && k > 0 {
                    fs.extend(out[k - 1].functionals().iter().cloned());
                }
                out.push(PolyhedralSeminorm::new(n, fs)?);
            }
            out
        }
    };
    for k in lx..lz {
        let here = if k < ly {
            PolyhedralSeminorm::from_irredundant(n, block_functionals(y.seminorm(k), z.seminorm(k)))
        } else {
            PolyhedralSeminorm::from_irredundant(n, block_functionals(&PolyhedralSeminorm::zero(y.dim()), z.seminorm(k)))
        };
        let here = match (opts.graded, levels.last()) {
            (true, Some(prev)) => prev.max_with(&here),
            _ => here,
        };
        levels.push(here);
    }
    let graded = opts.graded && x.graded() && y.graded() && z.graded();
    let mut w = MultiSpace::new(n, levels, graded)?;
    if opts.separated && !w.is_separated() {
        w = extend_with_norm(&w);
    }
    let w = Arc::new(w);
    let leg_y = inclusion(y.clone(), w.clone(), 0)?;
    let leg_z = inclusion(z.clone(), w.clone(), y.dim())?;
    let cert = certificate(&leg_y, f, &leg_z, g, lx)?;
    let bound = Rational::from_integer(2.into()) * opts.delta.clone() + opts.eps.clone();
    Ok(AmalgamResult { w, leg_y, leg_z, certificate: cert, delta: opts.delta.clone(), eps: opts.eps.clone(), bound })
}

/// Adds points of the dual polytopes until the compact pushout is as
/// separated as `Y ⊕ Z` allows.
fn separate(
    f: &LinearMap,
    g: &LinearMap,
    x: &MultiSpace,
    y: &MultiSpace,
    z: &MultiSpace,
    c: &Rational,
    raw: &mut [Vec<Vector>],
) -> Result<()> {
    let n = y.dim() + z.dim();
    let (lx, lz) = (x.length(), z.length());
    let mut fixed: Vec<Vector> = Vec::new();
    for k in lx..lz {
        let ys = if k < y.length() { y.seminorm(k).clone() } else { PolyhedralSeminorm::zero(y.dim()) };
        fixed.extend(block_functionals(&ys, z.seminorm(k)));
    }
    let dps: Vec<DualPolytope<'_>> = (0..lx)
        .map(|k| DualPolytope::new(f, g, y.seminorm(k), z.seminorm(k), x.seminorm(k), c.clone()))
        .collect();
    loop {
        let all: Vec<Vector> = raw.iter().flatten().chain(fixed.iter()).cloned().collect();
        if rank_of(n, &all) == n {
            return Ok(());
        }
        let kernel = crate::exact::linalg::annihilator(n, &all);
        let mut progressed = false;
        'outer: for kv in &kernel {
            for (k, dp) in dps.iter().enumerate() {
                let (val, point) = dp.maximize(kv)?;
                if val.is_positive() {
                    raw[k].push(point);
                    progressed = true;
                    break 'outer;
                }
            }
        }
        if !progressed {
            return Ok(());
        }
    }
}

/// Direct LP evaluation of the infimum
/// `inf ‖u‖_{Y,n} + ‖v‖_{Z,n} + (δ'+ε)‖x‖'_{X,n}` over `y = u + f x`,
/// `z = v − g x`, with `‖·‖'` the rescaled seminorm and `δ' = 2δ+δ²`.
pub fn primal_pushout_value(
    f: &LinearMap,
    g: &LinearMap,
    delta: &Rational,
    eps: &Rational,
    n: usize,
    y: &[Rational],
    z: &[Rational],
) -> Result<Rational> {
    let xr = rescale_expansive(f.domain(), delta)?;
    let weight = expansive_delta(delta) + eps.clone();
    let dx = f.domain().dim();
    // variables: x (dx, free), s1, s2, s3
    let nv = dx + 3;
    let mut obj = zeros(nv);
    obj[dx] = Rational::one();
    obj[dx + 1] = Rational::one();
    obj[dx + 2] = weight;
    let mut lp = LinearProgram::minimize(obj);
    for i in dx..nv {
        let mut r = zeros(nv);
        r[i] = Rational::one();
        lp.push(Constraint::ge(r, Rational::zero()));
    }
    // ±φ(y − f x) ≤ s1
    for phi in f.codomain().seminorm(n).functionals() {
        let pf = f.matrix().pullback(phi);
        let py = dot(phi, y);
        for sign in [Rational::one(), -Rational::one()] {
            let mut r: Vector = pf.iter().map(|v| -sign.clone() * v.clone()).collect();
            r.extend([-Rational::one(), Rational::zero(), Rational::zero()]);
            lp.push(Constraint::le(r, -sign.clone() * py.clone()));
        }
    }
    // ±ψ(z + g x) ≤ s2
    for psi in g.codomain().seminorm(n).functionals() {
        let pg = g.matrix().pullback(psi);
        let pz = dot(psi, z);
        for sign in [Rational::one(), -Rational::one()] {
            let mut r: Vector = pg.iter().map(|v| sign.clone() * v.clone()).collect();
            r.extend([Rational::zero(), -Rational::one(), Rational::zero()]);
            lp.push(Constraint::le(r, -sign.clone() * pz.clone()));
        }
    }
    // ±χ'(x) ≤ s3
    for chi in xr.seminorm(n).functionals() {
        for sign in [Rational::one(), -Rational::one()] {
            let mut r: Vector = chi.iter().map(|v| sign.clone() * v.clone()).collect();
            r.extend([Rational::zero(), Rational::zero(), -Rational::one()]);
            lp.push(Constraint::le(r, Rational::zero()));
        }
    }
    Ok(solve(&lp)?.value)
}

/// Pushout of two maps preserving the first `n` seminorms, on spaces of one
/// common length: infimum with weight `ε` below `n`, `‖y‖ + ‖z‖` from `n` on.
pub fn pushout_n_embedding(f: &LinearMap, g: &LinearMap, n: usize, eps: &Rational) -> Result<AmalgamResult> {
    if !eps.is_positive() {
        return Err(Error::EpsNonPositive);
    }
    let (x, y, z) = (f.domain().clone(), f.codomain().clone(), g.codomain().clone());
    if g.domain() != f.domain() {
        return Err(Error::ShapeMismatch("the two maps have different domains".into()));
    }
    if x.length() != y.length() || y.length() != z.length() {
        return Err(Error::LengthMismatch(x.length(), if x.length() != y.length() { y.length() } else { z.length() }));
    }
    if n > x.length() {
        return Err(Error::BadLevel { level: n, length: x.length() });
    }
    for h in [f, g] {
        if !h.is_injective() {
            let k = h.matrix().kernel();
            return Err(Error::NotAnNEmbedding {
                n,
                witness: crate::Witness { level: 0, vector: crate::maps::render(&k[0]), reason: "not injective".into() },
            });
        }
        if n > 0 {
            let t = LinearMap::new(
                Arc::new(crate::space::truncate(&x, n)?),
                Arc::new(crate::space::truncate(h.codomain(), n)?),
                h.matrix().clone(),
            )?;
            let c = is_embedding(&t, &Rational::zero());
            if !c.holds {
                return Err(Error::NotAnNEmbedding { n, witness: c.witness.expect("failure has witness") });
            }
        }
    }
    let dim = y.dim() + z.dim();
    let mut levels: Vec<PolyhedralSeminorm> = (0..n)
        .into_par_iter()
        .map(|k| full_level(f, g, x.seminorm(k), y.seminorm(k), z.seminorm(k), eps))
        .collect::<Result<_>>()?;
    for k in n..x.length() {
        let (ys, zs) = (y.seminorm(k), z.seminorm(k));
        let mut fs: Vec<Vector> = Vec::new();
        match (ys.is_zero(), zs.is_zero()) {
            (true, _) | (_, true) => fs = block_functionals(ys, zs),
            _ => {
                for p in ys.functionals() {
                    for q in zs.functionals() {
                        fs.push(block_pair(p, q));
                        fs.push(block_pair(p, &q.iter().map(|v| -v.clone()).collect::<Vec<_>>()));
                    }
                }
            }
        }
        levels.push(PolyhedralSeminorm::from_irredundant(dim, fs));
    }
    let graded = x.graded() && y.graded() && z.graded();
    let w = Arc::new(MultiSpace::new(dim, levels, graded)?);
    let leg_y = inclusion(y.clone(), w.clone(), 0)?;
    let leg_z = inclusion(z.clone(), w.clone(), y.dim())?;
    let cert = certificate(&leg_y, f, &leg_z, g, n)?;
    Ok(AmalgamResult { w, leg_y, leg_z, certificate: cert, delta: Rational::zero(), eps: eps.clone(), bound: eps.clone() })
}

/// A normed amalgamator used level by level in [`product_amalgam`].
pub type Amalgamator<'a> = dyn Fn(&LinearMap, &LinearMap, &Rational, &Rational) -> Result<AmalgamResult> + Sync + 'a;

/// The default amalgamator: the single-level pushout.
pub fn normed_pushout(f: &LinearMap, g: &LinearMap, delta: &Rational, eps: &Rational) -> Result<AmalgamResult> {
    pushout_nap(f, g, &PushoutOptions::new(delta.clone(), eps.clone()))
}

fn single_level(s: &PolyhedralSeminorm) -> Arc<MultiSpace> {
    Arc::new(MultiSpace::new(s.dim(), vec![s.clone()], true).expect("single level"))
}

/// Quotient `X_{‖·‖_i}` as a one-level normed space.
fn quotient_space(x: &MultiSpace, i: usize) -> (Arc<MultiSpace>, Matrix, Matrix) {
    let q = x.seminorm(i).quotient();
    (single_level(&q.norm), q.projection.clone(), q.lift_matrix())
}

/// Per-level amalgam: each level's quotient normed spaces are amalgamated
/// separately and the results placed in coordinate blocks.
pub fn product_amalgam(
    f: &LinearMap,
    g: &LinearMap,
    delta: &Rational,
    eps: &Rational,
    amalgamator: &Amalgamator<'_>,
) -> Result<AmalgamResult> {
    if !eps.is_positive() {
        return Err(Error::EpsNonPositive);
    }
    if f.domain() != g.domain() {
        return Err(Error::ShapeMismatch("the two maps have different domains".into()));
    }
    for s in [f.domain(), f.codomain(), g.codomain()] {
        if !s.is_separated() {
            return Err(Error::NotSeparated);
        }
    }
    check_embedding(f, delta)?;
    check_embedding(g, delta)?;
    if f.codomain().length() > g.codomain().length() {
        let r = product_amalgam(g, f, delta, eps, amalgamator)?;
        return Ok(AmalgamResult { leg_y: r.leg_z, leg_z: r.leg_y, ..r });
    }
    let (x, y, z) = (f.domain().clone(), f.codomain().clone(), g.codomain().clone());
    let (lx, ly, lz) = (x.length(), y.length(), z.length());
    struct Level {
        w: Arc<MultiSpace>,
        /// Block rows of the two legs, already composed with the projections.
        a: Matrix,
        b: Matrix,
    }
    let levels: Vec<Level> = (0..lz)
        .into_par_iter()
        .map(|i| -> Result<Level> {
            let (zi, pz, _) = quotient_space(&z, i);
            if i >= ly {
                let id = Matrix::identity(zi.dim());
                return Ok(Level { a: Matrix::zeros(zi.dim(), y.dim()), b: id.mul(&pz), w: zi });
            }
            let (yi, py, _) = quotient_space(&y, i);
            let r = if i < lx {
                let (xi, _, lift) = quotient_space(&x, i);
                let fi = LinearMap::new(xi.clone(), yi.clone(), py.mul(f.matrix()).mul(&lift))?;
                let gi = LinearMap::new(xi, zi.clone(), pz.mul(g.matrix()).mul(&lift))?;
                amalgamator(&fi, &gi, delta, eps)?
            } else {
                let trivial = Arc::new(MultiSpace::trivial(1));
                let fi = LinearMap::new(trivial.clone(), yi.clone(), Matrix::zeros(yi.dim(), 0))?;
                let gi = LinearMap::new(trivial, zi.clone(), Matrix::zeros(zi.dim(), 0))?;
                amalgamator(&fi, &gi, &Rational::zero(), eps)?
            };
            Ok(Level { a: r.leg_y.matrix().mul(&py), b: r.leg_z.matrix().mul(&pz), w: r.w })
        })
        .collect::<Result<_>>()?;
    let factors: Vec<MultiSpace> = levels.iter().map(|l| l.w.as_ref().clone()).collect();
    let w = Arc::new(product_space(&factors, ProductMode::Coordinate)?);
    let stack = |pick: &dyn Fn(&Level) -> &Matrix, cols: usize| -> Result<Matrix> {
        let rows: Vec<Vector> = levels.iter().flat_map(|l| pick(l).row_vecs()).collect();
        Matrix::from_rows(cols, rows)
    };
    let leg_y = LinearMap::new(y.clone(), w.clone(), stack(&|l| &l.a, y.dim())?)?;
    let leg_z = LinearMap::new(z.clone(), w.clone(), stack(&|l| &l.b, z.dim())?)?;
    let cert = certificate(&leg_y, f, &leg_z, g, lx)?;
    let bound = Rational::from_integer(2.into()) * delta.clone() + eps.clone();
    Ok(AmalgamResult { w, leg_y, leg_z, certificate: cert, delta: delta.clone(), eps: eps.clone(), bound })
}

/// One `(γ, η)` pair of δ-embeddings `X → Y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbeddingPair {
    pub gamma: LinearMap,
    pub eta: LinearMap,
    pub delta: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiAmalgam {
    pub z: Arc<MultiSpace>,
    /// `I: Y → Z`.
    pub i_map: LinearMap,
    /// `J_p: Y → Z` for each pair.
    pub js: Vec<LinearMap>,
    /// `‖I∘γ_p − J_p∘η_p‖_l` for `l < λ_X`, per pair.
    pub certificates: Vec<Vec<Bound>>,
    pub bounds: Vec<Rational>,
}

/// Folds the pushout over the pairs in list order: at each step the current
/// space is amalgamated with itself along its copies of γ and η.
pub fn multi_amalgam_ap(
    y: &Arc<MultiSpace>,
    pairs: &[EmbeddingPair],
    eps: &Rational,
    mode: AmalgamMode,
    check_inputs: bool,
) -> Result<MultiAmalgam> {
    if !eps.is_positive() {
        return Err(Error::EpsNonPositive);
    }
    let mut z = y.clone();
    let mut i_map = LinearMap::identity(y.clone());
    let mut js: Vec<LinearMap> = Vec::with_capacity(pairs.len());
    for p in pairs {
        if p.gamma.codomain() != y || p.eta.codomain() != y {
            return Err(Error::ShapeMismatch("pair does not land in the base space".into()));
        }
        if check_inputs {
            check_embedding(&p.gamma, &p.delta)?;
            check_embedding(&p.eta, &p.delta)?;
        }
        if p.gamma == p.eta {
            // Identical maps need no amalgamation: J = I.
            js.push(i_map.clone());
            continue;
        }
        let g1 = i_map.after(&p.gamma)?;
        let e1 = i_map.after(&p.eta)?;
        let opts = PushoutOptions::new(p.delta.clone(), eps.clone()).mode(mode).trusted();
        let r = pushout_nap(&g1, &e1, &opts)?;
        let a = r.leg_y;
        let b = r.leg_z;
        js = js.iter().map(|j| a.after(j)).collect::<Result<_>>()?;
        js.push(b.after(&i_map)?);
        i_map = a.after(&i_map)?;
        z = r.w;
    }
    let certificates: Vec<Vec<Bound>> = pairs
        .iter()
        .zip(&js)
        .map(|(p, j)| {
            let left = i_map.after(&p.gamma)?;
            let right = j.after(&p.eta)?;
            (0..p.gamma.domain().length()).into_par_iter().map(|l| map_distance(&left, &right, l)).collect()
        })
        .collect::<Result<_>>()?;
    let bounds = pairs
        .iter()
        .map(|p| Rational::from_integer(2.into()) * p.delta.clone() + eps.clone())
        .collect();
    Ok(MultiAmalgam { z, i_map, js, certificates, bounds })
}
