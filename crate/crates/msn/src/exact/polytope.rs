//! Polytopes in H- and V-representation and the double description method
//! converting between them.

use super::linalg::{dot, is_zero_vec, neg, normalize_direction, scale, sign_canonical, sub, unit};
use super::scalar::Scalar;
use crate::error::{Error, Result};

/// The closed halfspace `⟨normal, x⟩ ≤ bound`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Halfspace<T> {
    pub normal: Vec<T>,
    pub bound: T,
}

impl<T: Scalar> Halfspace<T> {
    pub fn new(normal: Vec<T>, bound: T) -> Self {
        Halfspace { normal, bound }
    }

    pub fn contains(&self, x: &[T]) -> bool {
        dot(&self.normal, x) <= self.bound
    }

    pub fn is_tight(&self, x: &[T]) -> bool {
        dot(&self.normal, x) == self.bound
    }

    /// Positive rescaling to `|bound| = 1`, or to a unit leading coefficient
    /// when the bound is zero.
    pub fn canonical(self) -> Self {
        if self.bound.is_zero() {
            Halfspace { normal: normalize_direction(self.normal), bound: self.bound }
        } else {
            let c = T::one() / self.bound.abs();
            Halfspace { normal: scale(&c, &self.normal), bound: self.bound * c }
        }
    }
}

/// Both `|⟨a, x⟩| ≤ b` halfspaces.
pub fn slab<T: Scalar>(a: Vec<T>, b: T) -> [Halfspace<T>; 2] {
    [Halfspace::new(neg(&a), b.clone()), Halfspace::new(a, b)]
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polytope<T> {
    pub dim: usize,
    pub h_rep: Option<Vec<Halfspace<T>>>,
    pub v_rep: Option<Vec<Vec<T>>>,
}

impl<T: Scalar> Polytope<T> {
    pub fn from_h(dim: usize, h: Vec<Halfspace<T>>) -> Self {
        Polytope { dim, h_rep: Some(h), v_rep: None }
    }

    pub fn from_v(dim: usize, v: Vec<Vec<T>>) -> Self {
        Polytope { dim, h_rep: None, v_rep: Some(v) }
    }

    pub fn contains(&self, x: &[T]) -> bool {
        match &self.h_rep {
            Some(h) => h.iter().all(|s| s.contains(x)),
            None => panic!("containment needs an H-representation; run dd_convert first"),
        }
    }

    /// Maximum of `⟨v, x⟩` over the vertices.
    pub fn support(&self, x: &[T]) -> Option<T> {
        self.v_rep.as_ref()?.iter().map(|v| dot(v, x)).max()
    }

    pub fn is_centrally_symmetric(&self) -> bool {
        match &self.v_rep {
            Some(v) => v.iter().all(|p| v.contains(&neg(p))),
            None => false,
        }
    }

    /// One sign-canonical representative per `±` pair of vertices.
    pub fn representatives(&self) -> Vec<Vec<T>> {
        let mut out: Vec<Vec<T>> = self
            .v_rep
            .iter()
            .flatten()
            .map(|v| sign_canonical(v.clone()))
            .collect();
        out.sort();
        out.dedup();
        out
    }
}

fn bit_set(bits: &mut [u64], i: usize) {
    bits[i / 64] |= 1 << (i % 64);
}

fn bits_subset(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

struct Ray<T> {
    v: Vec<T>,
    zeros: Vec<u64>,
}

/// Generators of the cone `{y : ⟨a, y⟩ ≤ 0 for every a}` as a lineality basis
/// and a list of extreme rays (modulo lineality).
pub fn cone_generators<T: Scalar>(dim: usize, constraints: &[Vec<T>]) -> (Vec<Vec<T>>, Vec<Vec<T>>) {
    let words = constraints.len().div_ceil(64).max(1);
    let mut lin: Vec<Vec<T>> = (0..dim).map(|i| unit(dim, i)).collect();
    let mut rays: Vec<Ray<T>> = Vec::new();
    let mut processed: Vec<usize> = Vec::new();
    for (k, a) in constraints.iter().enumerate() {
        if is_zero_vec(a) {
            processed.push(k);
            continue;
        }
        if let Some(pos) = lin.iter().position(|l| !dot(a, l).is_zero()) {
            let mut l0 = lin.remove(pos);
            let mut al0 = dot(a, &l0);
            if al0.is_positive() {
                l0 = neg(&l0);
                al0 = -al0;
            }
            for l in lin.iter_mut() {
                let c = dot(a, l);
                if !c.is_zero() {
                    *l = sub(l, &scale(&(c / al0.clone()), &l0));
                }
            }
            for r in rays.iter_mut() {
                let c = dot(a, &r.v);
                if !c.is_zero() {
                    r.v = normalize_direction(sub(&r.v, &scale(&(c / al0.clone()), &l0)));
                }
                bit_set(&mut r.zeros, k);
            }
            let mut zeros = vec![0u64; words];
            for &p in &processed {
                bit_set(&mut zeros, p);
            }
            rays.push(Ray { v: normalize_direction(l0), zeros });
            processed.push(k);
            continue;
        }
        let vals: Vec<T> = rays.iter().map(|r| dot(a, &r.v)).collect();
        let plus: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_positive()).collect();
        let minus: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_negative()).collect();
        let mut next: Vec<Ray<T>> = Vec::new();
        for &p in &plus {
            for &n in &minus {
                let z: Vec<u64> = rays[p].zeros.iter().zip(&rays[n].zeros).map(|(x, y)| x & y).collect();
                let adjacent = (0..rays.len())
                    .filter(|&r| r != p && r != n)
                    .all(|r| !bits_subset(&z, &rays[r].zeros));
                if !adjacent {
                    continue;
                }
                let v = sub(&scale(&vals[p], &rays[n].v), &scale(&vals[n], &rays[p].v));
                let mut zeros = z;
                bit_set(&mut zeros, k);
                next.push(Ray { v: normalize_direction(v), zeros });
            }
        }
        let mut kept: Vec<Ray<T>> = Vec::with_capacity(rays.len() + next.len());
        for (i, mut r) in rays.into_iter().enumerate() {
            if vals[i].is_positive() {
                continue;
            }
            if vals[i].is_zero() {
                bit_set(&mut r.zeros, k);
            }
            kept.push(r);
        }
        kept.extend(next);
        rays = kept;
        processed.push(k);
    }
    let mut out: Vec<Vec<T>> = rays.into_iter().map(|r| r.v).collect();
    out.sort();
    out.dedup();
    (lin, out)
}

/// Vertices of the bounded polyhedron `{x : ⟨a_i, x⟩ ≤ b_i}`, sorted.
/// An empty polyhedron yields no vertices.
pub fn h_to_v<T: Scalar>(dim: usize, halfspaces: &[Halfspace<T>]) -> Result<Vec<Vec<T>>> {
    let mut cons: Vec<Vec<T>> = Vec::with_capacity(halfspaces.len() + 1);
    let mut t = vec![T::zero(); dim + 1];
    t[dim] = -T::one();
    cons.push(t);
    for h in halfspaces {
        if h.normal.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: h.normal.len() });
        }
        let mut row = h.normal.clone();
        row.push(-h.bound.clone());
        cons.push(row);
    }
    let (lin, rays) = cone_generators(dim + 1, &cons);
    let mut verts: Vec<Vec<T>> = Vec::new();
    let mut recession = !lin.is_empty();
    for r in rays {
        let t = r[dim].clone();
        if t.is_zero() {
            recession = true;
        } else {
            let inv = T::one() / t;
            verts.push(r[..dim].iter().map(|x| x.clone() * inv.clone()).collect());
        }
    }
    if verts.is_empty() {
        return Ok(verts);
    }
    if recession {
        return Err(Error::UnboundedPolyhedron);
    }
    verts.sort();
    verts.dedup();
    Ok(verts)
}

/// Irredundant canonical H-representation of `conv(points)`. Affine hull
/// equations appear as pairs of opposite halfspaces.
pub fn v_to_h<T: Scalar>(dim: usize, points: &[Vec<T>]) -> Result<Vec<Halfspace<T>>> {
    if points.is_empty() {
        let mut z = vec![T::zero(); dim];
        z.truncate(dim);
        return Ok(vec![Halfspace::new(z, -T::one())]);
    }
    let mut cons = Vec::with_capacity(points.len());
    for p in points {
        if p.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: p.len() });
        }
        let mut row = p.clone();
        row.push(T::one());
        cons.push(row);
    }
    let (lin, rays) = cone_generators(dim + 1, &cons);
    let mut out: Vec<Halfspace<T>> = Vec::new();
    let to_half = |r: &[T]| Halfspace::new(r[..dim].to_vec(), -r[dim].clone()).canonical();
    for r in &rays {
        if is_zero_vec(&r[..dim]) {
            continue;
        }
        out.push(to_half(r));
    }
    for l in &lin {
        out.push(to_half(l));
        out.push(to_half(&neg(l)));
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Completes both representations in canonical form: vertices sorted
/// lexicographically, facets normalized and sorted. Applying it twice gives
/// the same result as applying it once.
pub fn dd_convert<T: Scalar>(p: &Polytope<T>) -> Result<Polytope<T>> {
    let verts = match (&p.h_rep, &p.v_rep) {
        (Some(h), _) => h_to_v(p.dim, h)?,
        (None, Some(v)) => {
            let h = v_to_h(p.dim, v)?;
            h_to_v(p.dim, &h)?
        }
        (None, None) => return Err(Error::EmptyRepresentation),
    };
    let h = v_to_h(p.dim, &verts)?;
    Ok(Polytope { dim: p.dim, h_rep: Some(h), v_rep: Some(verts) })
}
