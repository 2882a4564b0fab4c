//! Finite stages of a Fraïssé tower: seeded amalgamation of embedding pairs
//! stage by stage, certificate audit, persistence, and the back-and-forth
//! intertwining between two towers.

use std::path::Path;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::amalgam::{multi_amalgam_ap, pushout_nap, AmalgamMode, EmbeddingPair, PushoutOptions};
use crate::exact::scalar::pow2_neg;
use crate::format::{self, rational, rational_str, vector_strs, MapFile, FORMAT};
use crate::maps::{is_embedding, map_distance, max_distance, Bound, LinearMap};
use crate::space::{extend_with_norm, MultiSpace};
use crate::{Error, Matrix, Rational, Result};

/// Cap on the number of stored embeddings per catalog member and stage.
const POOL_CAP: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RequestedPair {
    pub stage: usize,
    pub source: usize,
    pub delta_index: usize,
    pub gamma: Matrix,
    pub eta: Matrix,
}

#[derive(Clone, Debug)]
pub struct TowerConfig {
    pub deltas: Vec<Rational>,
    pub stages: usize,
    pub seed: u64,
    pub omega: bool,
    pub pairs_per_stage: usize,
    pub requested: Vec<RequestedPair>,
}

impl TowerConfig {
    pub fn new(stages: usize, seed: u64) -> Self {
        TowerConfig { deltas: vec![Rational::zero()], stages, seed, omega: false, pairs_per_stage: 1, requested: Vec::new() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairCertificate {
    pub stage: usize,
    pub source: usize,
    pub delta_index: usize,
    pub gamma: LinearMap,
    pub eta: LinearMap,
    /// `J: X_n → X_{n+1}`.
    pub j_map: LinearMap,
    /// `‖I_n∘γ − J∘η‖_l` per level of the source.
    pub distances: Vec<Rational>,
    pub bound: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tower {
    pub catalog: Vec<Arc<MultiSpace>>,
    pub deltas: Vec<Rational>,
    pub seed: u64,
    pub omega: bool,
    pub stages: Vec<Arc<MultiSpace>>,
    pub links: Vec<LinearMap>,
    /// `ι_j: Z_j → X_0`.
    pub catalog_embeddings: Vec<LinearMap>,
    pub certificates: Vec<PairCertificate>,
}

/// `2δ + 2^{-n}`.
pub fn stage_bound(delta: &Rational, n: usize) -> Rational {
    Rational::from_integer(2.into()) * delta.clone() + pow2_neg::<Rational>(n as u32)
}

fn finite(b: Bound) -> Result<Rational> {
    match b {
        Bound::Finite(r) => Ok(r),
        Bound::Unbounded => Err(Error::ShapeMismatch("certificate distance is unbounded".into())),
    }
}

fn neg_map(f: &LinearMap) -> LinearMap {
    f.scaled(&-Rational::one())
}

/// Joint embedding of every catalog member: successive pushouts over `{0}`.
fn joint_embedding(catalog: &[Arc<MultiSpace>]) -> Result<(Arc<MultiSpace>, Vec<LinearMap>)> {
    let mut w = catalog[0].clone();
    let mut embeds = vec![LinearMap::identity(w.clone())];
    let zero = Arc::new(MultiSpace::trivial(1));
    for z in &catalog[1..] {
        let f = LinearMap::new(zero.clone(), w.clone(), Matrix::zeros(w.dim(), 0))?;
        let g = LinearMap::new(zero.clone(), z.clone(), Matrix::zeros(z.dim(), 0))?;
        let r = pushout_nap(&f, &g, &PushoutOptions::new(Rational::zero(), Rational::one()).trusted())?;
        embeds = embeds.iter().map(|e| r.leg_y.after(e)).collect::<Result<_>>()?;
        embeds.push(r.leg_z);
        w = r.w;
    }
    Ok((w, embeds))
}

/// An isometric embedding of a one-dimensional, one-level space into `x`,
/// from a random direction.
fn sphere_point(z: &Arc<MultiSpace>, x: &Arc<MultiSpace>, rng: &mut impl Rng) -> Option<LinearMap> {
    if z.dim() != 1 || z.length() != 1 {
        return None;
    }
    let r = z.seminorm(0).eval_unchecked(&[Rational::one()]);
    for _ in 0..8 {
        let v: Vec<Rational> = (0..x.dim()).map(|_| Rational::from_integer(rng.gen_range(-2i64..=2).into())).collect();
        let nv = x.seminorm(0).eval_unchecked(&v);
        if nv.is_positive() {
            let c = r.clone() / nv;
            let col: Vec<Vec<Rational>> = v.into_iter().map(|a| vec![a * c.clone()]).collect();
            return LinearMap::new(z.clone(), x.clone(), Matrix::from_rows(1, col).ok()?).ok();
        }
    }
    None
}

fn push_unique(pool: &mut Vec<LinearMap>, f: LinearMap) {
    if pool.len() < POOL_CAP && !pool.contains(&f) {
        pool.push(f);
    }
}

pub fn build_tower(catalog: &[Arc<MultiSpace>], config: &TowerConfig) -> Result<Tower> {
    if catalog.is_empty() {
        return Err(Error::EmptyCatalog);
    }
    if let Some(j) = catalog.iter().position(|z| !z.is_separated()) {
        return Err(Error::CatalogNotSeparated(j));
    }
    if config.stages == 0 {
        return Err(Error::ShapeMismatch("stage budget must be at least 1".into()));
    }
    let deltas = if config.deltas.is_empty() { vec![Rational::zero()] } else { config.deltas.clone() };
    if deltas.iter().any(|d| d.is_negative()) {
        return Err(Error::NegativeDelta);
    }
    let (x0, embeds) = joint_embedding(catalog)?;
    let mut stages = vec![x0.clone()];
    let mut links: Vec<LinearMap> = Vec::new();
    let mut certificates: Vec<PairCertificate> = Vec::new();
    let mut pools: Vec<Vec<LinearMap>> = embeds.iter().map(|e| vec![e.clone()]).collect();

    for n in 0..config.stages - 1 {
        let xn = stages[n].clone();
        let mut rng = crate::rng::stream(config.seed, n as u64);
        let mut chosen: Vec<(usize, usize, LinearMap, LinearMap)> = Vec::new();
        for _ in 0..config.pairs_per_stage {
            let j = rng.gen_range(0..catalog.len());
            let k = rng.gen_range(0..=n.min(deltas.len() - 1));
            let mut cands: Vec<LinearMap> = Vec::new();
            for p in &pools[j] {
                cands.push(p.clone());
                cands.push(neg_map(p));
            }
            for _ in 0..2 {
                if let Some(s) = sphere_point(&catalog[j], &xn, &mut rng) {
                    cands.push(s);
                }
            }
            let mut unique: Vec<LinearMap> = Vec::with_capacity(cands.len());
            for c in cands {
                if !unique.contains(&c) {
                    unique.push(c);
                }
            }
            let cands = unique;
            let a = rng.gen_range(0..cands.len());
            let mut b = rng.gen_range(0..cands.len());
            if cands.len() > 1 && a == b {
                b = (b + 1 + rng.gen_range(0..cands.len() - 1)) % cands.len();
            }
            let (mut g, mut e) = (cands[a].clone(), cands[b].clone());
            if deltas[k].is_positive() {
                let d = deltas[k].clone().min(Rational::one());
                let quarter = Rational::new(1.into(), 4.into());
                let factor = |rng: &mut rand_chacha::ChaCha8Rng| {
                    Rational::one() + d.clone() * quarter.clone() * Rational::from_integer(rng.gen_range(-2i64..=2).into())
                };
                g = g.scaled(&factor(&mut rng));
                e = e.scaled(&factor(&mut rng));
            }
            chosen.push((j, k, g, e));
        }
        for r in config.requested.iter().filter(|r| r.stage == n) {
            let z = catalog.get(r.source).ok_or_else(|| Error::ShapeMismatch("requested source out of range".into()))?;
            let delta = deltas.get(r.delta_index).ok_or_else(|| Error::ShapeMismatch("requested delta out of range".into()))?;
            let g = LinearMap::new(z.clone(), xn.clone(), r.gamma.clone())?;
            let e = LinearMap::new(z.clone(), xn.clone(), r.eta.clone())?;
            for h in [&g, &e] {
                let c = is_embedding(h, delta);
                if !c.holds {
                    return Err(Error::NotAnEmbedding { delta: delta.to_string(), witness: c.witness.expect("witness") });
                }
            }
            chosen.push((r.source, r.delta_index, g, e));
        }
        let pairs: Vec<EmbeddingPair> = chosen
            .iter()
            .map(|(_, k, g, e)| EmbeddingPair { gamma: g.clone(), eta: e.clone(), delta: deltas[*k].clone() })
            .collect();
        let eps = pow2_neg::<Rational>(n as u32);
        let m = multi_amalgam_ap(&xn, &pairs, &eps, AmalgamMode::Compact, false)?;
        let mut next = m.z.clone();
        let mut link = m.i_map;
        let mut js = m.js;
        if config.omega && next.length() < n + 1 {
            next = Arc::new(extend_with_norm(&next));
            link = link.with_codomain(next.clone())?;
            js = js.into_iter().map(|j| j.with_codomain(next.clone())).collect::<Result<_>>()?;
        }
        let mut images: Vec<(usize, LinearMap)> = Vec::new();
        for (((j, k, g, e), jm), dist) in chosen.into_iter().zip(js).zip(m.certificates) {
            let distances = dist.into_iter().map(finite).collect::<Result<Vec<_>>>()?;
            let bound = stage_bound(&deltas[k], n);
            if deltas[k].is_zero() {
                images.push((j, jm.after(&e)?));
            }
            certificates.push(PairCertificate { stage: n, source: j, delta_index: k, gamma: g, eta: e, j_map: jm, distances, bound });
        }
        for pool in pools.iter_mut() {
            *pool = pool.iter().map(|p| link.after(p)).collect::<Result<_>>()?;
        }
        for (j, f) in images {
            push_unique(&mut pools[j], f);
        }
        links.push(link);
        stages.push(next);
    }
    Ok(Tower { catalog: catalog.to_vec(), deltas, seed: config.seed, omega: config.omega, stages, links, catalog_embeddings: embeds, certificates })
}

impl Tower {
    pub fn len(&self) -> usize {
        self.stages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }

    /// `I_{m,n}`, with `I_{m,m} = id`.
    pub fn composite(&self, m: usize, n: usize) -> Result<LinearMap> {
        if m > n || n >= self.stages.len() {
            return Err(Error::BadLevel { level: n, length: self.stages.len() });
        }
        let mut f = LinearMap::identity(self.stages[m].clone());
        for link in &self.links[m..n] {
            f = link.after(&f)?;
        }
        Ok(f)
    }

    /// `Z_j → X_n` through stage 0.
    pub fn catalog_embedding(&self, j: usize, n: usize) -> Result<LinearMap> {
        self.composite(0, n)?.after(&self.catalog_embeddings[j])
    }

    fn stage_of(&self, x: &Arc<MultiSpace>) -> Option<usize> {
        self.stages.iter().position(|s| s == x)
    }
}

/// The one-step `J` for a pair discharged while building, with its bound.
pub fn discharge(tower: &Tower, gamma: &LinearMap, eta: &LinearMap, delta: &Rational) -> Result<(LinearMap, Rational)> {
    let n = tower.stage_of(gamma.codomain()).ok_or(Error::PairNotInCertificates)?;
    if n + 1 >= tower.stages.len() {
        return Err(Error::PairNotInCertificates);
    }
    if gamma == eta {
        return Ok((tower.links[n].clone(), Rational::zero()));
    }
    tower
        .certificates
        .iter()
        .find(|c| c.stage == n && &c.gamma == gamma && &c.eta == eta && &tower.deltas[c.delta_index] == delta)
        .map(|c| (c.j_map.clone(), c.bound.clone()))
        .ok_or(Error::PairNotInCertificates)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerReport {
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl TowerReport {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

fn check(name: String, passed: bool, witness: Option<String>) -> Check {
    Check { name, passed, witness: if passed { None } else { witness } }
}

fn embedding_check(name: String, f: &LinearMap, delta: &Rational) -> Check {
    let c = is_embedding(f, delta);
    check(name, c.holds, c.witness.map(|w| w.to_string()))
}

/// Re-derives every claim a tower makes about itself.
pub fn verify_tower(tower: &Tower) -> TowerReport {
    let mut checks: Vec<Check> = Vec::new();
    for (j, z) in tower.catalog.iter().enumerate() {
        checks.push(check(format!("catalog {j} separated"), z.is_separated(), None));
    }
    checks.push(check(
        "first delta is zero".into(),
        tower.deltas.first().is_some_and(|d| d.is_zero()),
        tower.deltas.first().map(|d| d.to_string()),
    ));
    for (n, x) in tower.stages.iter().enumerate() {
        checks.push(check(format!("stage {n} separated"), x.is_separated(), None));
        if n > 0 {
            let (a, b) = (tower.stages[n - 1].length(), x.length());
            checks.push(check(format!("stage {n} length non-decreasing"), a <= b, Some(format!("{a} > {b}"))));
        }
        if tower.omega {
            checks.push(check(format!("stage {n} length at least {n}"), x.length() >= n, Some(x.length().to_string())));
        }
    }
    let shape_ok = tower.links.len() + 1 == tower.stages.len()
        && tower.links.iter().enumerate().all(|(n, l)| l.domain() == &tower.stages[n] && l.codomain() == &tower.stages[n + 1]);
    checks.push(check("links connect consecutive stages".into(), shape_ok, None));
    if !shape_ok {
        return TowerReport { passed: false, checks };
    }
    let zero = Rational::zero();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for n in 1..tower.stages.len() {
        for m in 0..n {
            pairs.push((m, n));
        }
    }
    let links: Vec<Check> = pairs
        .par_iter()
        .map(|&(m, n)| match tower.composite(m, n) {
            Ok(f) => {
                let name = if n == m + 1 { format!("link {m} isometric") } else { format!("composite {m}->{n} isometric") };
                embedding_check(name, &f, &zero)
            }
            Err(e) => check(format!("composite {m}->{n}"), false, Some(e.to_string())),
        })
        .collect();
    checks.extend(links);
    let embeds: Vec<(usize, usize)> =
        (0..tower.catalog.len()).flat_map(|j| (0..tower.stages.len()).map(move |n| (j, n))).collect();
    let cond_c: Vec<Check> = embeds
        .par_iter()
        .map(|&(j, n)| match tower.catalog_embedding(j, n) {
            Ok(f) => embedding_check(format!("catalog {j} embeds in stage {n}"), &f, &zero),
            Err(e) => check(format!("catalog {j} embeds in stage {n}"), false, Some(e.to_string())),
        })
        .collect();
    checks.extend(cond_c);
    let certs: Vec<Vec<Check>> = tower
        .certificates
        .par_iter()
        .enumerate()
        .map(|(i, c)| certificate_checks(tower, i, c))
        .collect();
    checks.extend(certs.into_iter().flatten());
    let passed = checks.iter().all(|c| c.passed);
    TowerReport { passed, checks }
}

fn certificate_checks(tower: &Tower, i: usize, c: &PairCertificate) -> Vec<Check> {
    let mut out = Vec::new();
    let n = c.stage;
    let name = |s: &str| format!("certificate {i} (stage {n}): {s}");
    let Some(delta) = tower.deltas.get(c.delta_index) else {
        return vec![check(name("delta index"), false, Some(c.delta_index.to_string()))];
    };
    let placed = n + 1 < tower.stages.len()
        && c.gamma.codomain() == &tower.stages[n]
        && c.eta.codomain() == &tower.stages[n]
        && c.j_map.domain() == &tower.stages[n]
        && c.j_map.codomain() == &tower.stages[n + 1]
        && tower.catalog.get(c.source) == Some(c.gamma.domain());
    out.push(check(name("maps placed at their stage"), placed, None));
    if !placed {
        return out;
    }
    out.push(embedding_check(name("gamma"), &c.gamma, delta));
    out.push(embedding_check(name("eta"), &c.eta, delta));
    out.push(embedding_check(name("J isometric"), &c.j_map, &Rational::zero()));
    let formula = stage_bound(delta, n);
    out.push(check(name("bound within 2δ + 2^-n"), c.bound <= formula, Some(format!("{} > {}", c.bound, formula))));
    let left = tower.links[n].after(&c.gamma);
    let right = c.j_map.after(&c.eta);
    match (left, right) {
        (Ok(a), Ok(b)) => {
            for l in 0..c.gamma.domain().length() {
                let recorded = c.distances.get(l);
                match map_distance(&a, &b, l) {
                    Ok(Bound::Finite(d)) => {
                        out.push(check(
                            name(&format!("level {l} distance matches record")),
                            recorded == Some(&d),
                            Some(format!("recomputed {d}, recorded {:?}", recorded.map(|r| r.to_string()))),
                        ));
                        out.push(check(
                            name(&format!("level {l} distance within bound")),
                            d <= c.bound,
                            Some(format!("{d} > {}", c.bound)),
                        ));
                    }
                    other => out.push(check(name(&format!("level {l} distance")), false, Some(format!("{other:?}")))),
                }
            }
        }
        (Err(e), _) | (_, Err(e)) => out.push(check(name("composition"), false, Some(e.to_string()))),
    }
    out
}

// ---------------------------------------------------------------- files

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct Manifest {
    format: String,
    kind: String,
    seed: u64,
    omega: bool,
    deltas: Vec<String>,
    catalog: Vec<String>,
    stages: Vec<String>,
    links: Vec<String>,
    #[serde(rename = "catalogEmbeddings")]
    catalog_embeddings: Vec<String>,
    certificates: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct CertificateEntry {
    stage: usize,
    source: usize,
    #[serde(rename = "deltaIndex")]
    delta_index: usize,
    gamma: Vec<Vec<String>>,
    eta: Vec<Vec<String>>,
    j: Vec<Vec<String>>,
    distances: Vec<String>,
    bound: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct CertificateFile {
    format: String,
    certificates: Vec<CertificateEntry>,
}

pub fn save_tower(dir: &Path, tower: &Tower) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let names = |p: &str, k: usize| (0..k).map(|i| format!("{p}_{i}.json")).collect::<Vec<_>>();
    let manifest = Manifest {
        format: FORMAT.into(),
        kind: "tower".into(),
        seed: tower.seed,
        omega: tower.omega,
        deltas: tower.deltas.iter().map(rational_str).collect(),
        catalog: names("catalog", tower.catalog.len()),
        stages: names("stage", tower.stages.len()),
        links: names("link", tower.links.len()),
        catalog_embeddings: names("embed", tower.catalog_embeddings.len()),
        certificates: "certificates.json".into(),
    };
    for (name, z) in manifest.catalog.iter().zip(&tower.catalog) {
        format::save_space(&dir.join(name), z)?;
    }
    for (name, x) in manifest.stages.iter().zip(&tower.stages) {
        format::save_space(&dir.join(name), x)?;
    }
    for (n, (name, l)) in manifest.links.iter().zip(&tower.links).enumerate() {
        format::write_json(&dir.join(name), &MapFile::with_refs(l, &manifest.stages[n], &manifest.stages[n + 1]))?;
    }
    for (j, (name, e)) in manifest.catalog_embeddings.iter().zip(&tower.catalog_embeddings).enumerate() {
        format::write_json(&dir.join(name), &MapFile::with_refs(e, &manifest.catalog[j], &manifest.stages[0]))?;
    }
    let certs = CertificateFile {
        format: FORMAT.into(),
        certificates: tower
            .certificates
            .iter()
            .map(|c| CertificateEntry {
                stage: c.stage,
                source: c.source,
                delta_index: c.delta_index,
                gamma: format::matrix_strs(c.gamma.matrix()),
                eta: format::matrix_strs(c.eta.matrix()),
                j: format::matrix_strs(c.j_map.matrix()),
                distances: vector_strs(&c.distances),
                bound: rational_str(&c.bound),
            })
            .collect(),
    };
    format::write_json(&dir.join(&manifest.certificates), &certs)?;
    format::write_json(&dir.join("manifest.json"), &manifest)
}

pub fn load_tower(dir: &Path) -> Result<Tower> {
    let m: Manifest = format::read_json(&dir.join("manifest.json"))?;
    if m.format != FORMAT || m.kind != "tower" {
        return Err(Error::Format(format!("not a {FORMAT} tower manifest")));
    }
    let spaces = |names: &[String]| -> Result<Vec<Arc<MultiSpace>>> {
        names.par_iter().map(|n| format::load_space(&dir.join(n)).map(Arc::new)).collect()
    };
    let catalog = spaces(&m.catalog)?;
    let stages = spaces(&m.stages)?;
    if stages.is_empty() || m.links.len() + 1 != stages.len() || m.catalog_embeddings.len() != catalog.len() {
        return Err(Error::Format("manifest lists inconsistent counts".into()));
    }
    let links = m
        .links
        .iter()
        .enumerate()
        .map(|(n, name)| {
            format::read_json::<MapFile>(&dir.join(name))?.to_map_between(stages[n].clone(), stages[n + 1].clone())
        })
        .collect::<Result<Vec<_>>>()?;
    let catalog_embeddings = m
        .catalog_embeddings
        .iter()
        .enumerate()
        .map(|(j, name)| format::read_json::<MapFile>(&dir.join(name))?.to_map_between(catalog[j].clone(), stages[0].clone()))
        .collect::<Result<Vec<_>>>()?;
    let file: CertificateFile = format::read_json(&dir.join(&m.certificates))?;
    if file.format != FORMAT {
        return Err(Error::Format("certificate file format".into()));
    }
    let deltas = m.deltas.iter().map(|d| rational(d)).collect::<Result<Vec<_>>>()?;
    let certificates = file
        .certificates
        .into_iter()
        .map(|e| {
            let bad = || Error::Format("certificate refers to a missing stage or source".into());
            let z = catalog.get(e.source).ok_or_else(bad)?.clone();
            let x = stages.get(e.stage).ok_or_else(bad)?.clone();
            let x1 = stages.get(e.stage + 1).ok_or_else(bad)?.clone();
            let mk = |rows: &[Vec<String>], a: &Arc<MultiSpace>, b: &Arc<MultiSpace>| {
                LinearMap::new(a.clone(), b.clone(), format::matrix_from_strs(rows, a.dim())?)
            };
            Ok(PairCertificate {
                stage: e.stage,
                source: e.source,
                delta_index: e.delta_index,
                gamma: mk(&e.gamma, &z, &x)?,
                eta: mk(&e.eta, &z, &x)?,
                j_map: mk(&e.j, &x, &x1)?,
                distances: format::vector(&e.distances)?,
                bound: rational(&e.bound)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Tower { catalog, deltas, seed: m.seed, omega: m.omega, stages, links, catalog_embeddings, certificates })
}

// ------------------------------------------------------- back and forth

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Measured {
    pub s: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<usize>,
    /// `None` when the quantity is unbounded.
    pub value: Option<String>,
    pub bound: String,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BackForthRecord {
    pub n: usize,
    /// `C_0 = X_0, C_1, …`.
    pub chain: Vec<Arc<MultiSpace>>,
    /// `C_i → C_{i+1}`.
    pub links: Vec<LinearMap>,
    /// `J_s: C_{2s} → C_{2s+1}`.
    pub js: Vec<LinearMap>,
    /// `L_s: C_{2s+1} → C_{2s+2}`.
    pub ls: Vec<LinearMap>,
    /// `‖J_0∘η̃ − I∘γ̃‖` against `2^{-n}`.
    pub initial: Measured,
    /// `‖J_{s+1}∘L_s − id‖` against `2^{-(n+2s)}`.
    pub forth: Vec<Measured>,
    /// `‖L_s∘J_s − id‖` against `2^{-(n+2s+1)}`.
    pub back: Vec<Measured>,
    /// `J_{s+1} − J_s` on generators of `C_{2s}`, against `3·2^{-(n+2s+1)}`.
    pub gaps: Vec<Measured>,
    /// `J_{s+t} − J_s` on generators, against `3/2^{n+2s}` and `2^{-(n-2)}`.
    pub tails: Vec<Measured>,
}

impl BackForthRecord {
    pub fn holds(&self) -> bool {
        std::iter::once(&self.initial)
            .chain(&self.forth)
            .chain(&self.back)
            .chain(&self.gaps)
            .chain(&self.tails)
            .all(|m| m.holds)
    }
}

pub fn gap_bound(n: usize, s: usize) -> Rational {
    Rational::from_integer(3.into()) * pow2_neg::<Rational>((n + 2 * s + 1) as u32)
}

pub fn tail_bound(n: usize, s: usize) -> Rational {
    Rational::from_integer(3.into()) * pow2_neg::<Rational>((n + 2 * s) as u32)
}

/// `2^{-(n-2)}`, i.e. `4·2^{-n}`.
pub fn cauchy_bound(n: usize) -> Rational {
    Rational::from_integer(4.into()) * pow2_neg::<Rational>(n as u32)
}

fn measured(s: usize, t: Option<usize>, value: Option<Rational>, bound: Rational) -> Measured {
    let holds = value.as_ref().is_some_and(|v| *v <= bound);
    Measured { s, t, value: value.as_ref().map(rational_str), bound: rational_str(&bound), holds }
}

fn chain_map(links: &[LinearMap], from: usize, to: usize, chain: &[Arc<MultiSpace>]) -> Result<LinearMap> {
    let mut f = LinearMap::identity(chain[from].clone());
    for l in &links[from..to] {
        f = l.after(&f)?;
    }
    Ok(f)
}

/// Largest ratio `‖(a−b)e_i‖_l / ‖e_i‖_l` over generators and levels;
/// `None` if some generator of seminorm zero has a nonzero difference.
fn generator_ratio(a: &LinearMap, b: &LinearMap) -> Option<Rational> {
    let x = a.domain();
    let y = a.codomain();
    let mut best = Rational::zero();
    for i in 0..x.dim() {
        let e = crate::exact::linalg::unit(x.dim(), i);
        let d: Vec<Rational> = a.apply(&e).into_iter().zip(b.apply(&e)).map(|(p, q)| p - q).collect();
        for l in 0..x.length() {
            let num = y.seminorm(l).eval_unchecked(&d);
            let den = x.seminorm(l).eval_unchecked(&e);
            if den.is_zero() {
                if !num.is_zero() {
                    return None;
                }
            } else if num.clone() / den.clone() > best {
                best = num / den;
            }
        }
    }
    Some(best)
}

/// One amalgamation step of the chain: returns (new space, link, other leg).
fn chain_step(f: &LinearMap, g: &LinearMap, eps: Rational) -> Result<(Arc<MultiSpace>, LinearMap, LinearMap)> {
    if f == g {
        let y = f.codomain().clone();
        return Ok((y.clone(), LinearMap::identity(y.clone()), LinearMap::identity(y)));
    }
    let r = pushout_nap(f, g, &PushoutOptions::new(Rational::zero(), eps).mode(AmalgamMode::Compact).trusted())?;
    Ok((r.w, r.leg_y, r.leg_z))
}

/// Builds `J_0, L_0, J_1, …, J_steps` starting from a stage-0 embedding of
/// one catalog member seeded in each tower.
pub fn back_and_forth(a: &Tower, b: &Tower, n: usize, steps: usize) -> Result<BackForthRecord> {
    if a.catalog != b.catalog {
        return Err(Error::TowersIncompatible("catalogs differ".into()));
    }
    if a.stages.first() != b.stages.first() {
        return Err(Error::TowersIncompatible("first stages differ".into()));
    }
    let c0 = a.stages[0].clone();
    let first = |t: &Tower, j: Option<usize>| {
        t.certificates
            .iter()
            .find(|c| c.stage == 0 && a.deltas[c.delta_index].is_zero() && j.is_none_or(|j| c.source == j))
            .map(|c| (c.source, c.eta.clone()))
    };
    let (j, gamma) = first(a, None).unwrap_or((0, a.catalog_embeddings[0].clone()));
    let eta = first(b, Some(j)).map(|(_, e)| e).unwrap_or_else(|| b.catalog_embeddings[j].clone());

    let mut chain = vec![c0];
    let mut links: Vec<LinearMap> = Vec::new();
    let mut js: Vec<LinearMap> = Vec::new();
    let mut ls: Vec<LinearMap> = Vec::new();
    let eps_at = |i: usize| pow2_neg::<Rational>((n + i) as u32);

    let (c1, link, j0) = chain_step(&gamma, &eta, eps_at(0))?;
    let initial = measured(0, None, max_distance(&j0.after(&eta)?, &link.after(&gamma)?, gamma.domain().length())?, eps_at(0));
    chain.push(c1);
    links.push(link);
    js.push(j0);
    for s in 0..steps {
        // L_s against (link, J_s) over C_{2s}
        let i = 2 * s;
        let (c, link, l) = chain_step(&links[i], &js[s], eps_at(i + 1))?;
        chain.push(c);
        links.push(link);
        ls.push(l);
        // J_{s+1} against (link, L_s) over C_{2s+1}
        let (c, link, j) = chain_step(&links[i + 1], &ls[s], eps_at(i + 2))?;
        chain.push(c);
        links.push(link);
        js.push(j);
    }
    let forth: Vec<Measured> = (0..steps)
        .into_par_iter()
        .map(|s| {
            let f = js[s + 1].after(&ls[s])?;
            let id = chain_map(&links, 2 * s + 1, 2 * s + 3, &chain)?;
            let v = max_distance(&f, &id, chain[2 * s + 1].length())?;
            Ok(measured(s, None, v, pow2_neg((n + 2 * s) as u32)))
        })
        .collect::<Result<_>>()?;
    let back: Vec<Measured> = (0..steps)
        .into_par_iter()
        .map(|s| {
            let f = ls[s].after(&js[s])?;
            let id = chain_map(&links, 2 * s, 2 * s + 2, &chain)?;
            let v = max_distance(&f, &id, chain[2 * s].length())?;
            Ok(measured(s, None, v, pow2_neg((n + 2 * s + 1) as u32)))
        })
        .collect::<Result<_>>()?;
    // J_s pushed to C_{2(s+t)+1}, compared with J_{s+t} after the links.
    let against = |s: usize, t: usize| -> Result<Option<Rational>> {
        let late = js[s + t].after(&chain_map(&links, 2 * s, 2 * (s + t), &chain)?)?;
        let early = chain_map(&links, 2 * s + 1, 2 * (s + t) + 1, &chain)?.after(&js[s])?;
        Ok(generator_ratio(&late, &early))
    };
    let gaps: Vec<Measured> =
        (0..steps).map(|s| Ok(measured(s, Some(1), against(s, 1)?, gap_bound(n, s)))).collect::<Result<_>>()?;
    let mut tails: Vec<Measured> = Vec::new();
    for s in 0..steps {
        for t in 1..=steps - s {
            let v = against(s, t)?;
            tails.push(measured(s, Some(t), v.clone(), tail_bound(n, s)));
            if n >= 2 {
                tails.push(measured(s, Some(t), v, cauchy_bound(n + 2 * s)));
            }
        }
    }
    Ok(BackForthRecord { n, chain, links, js, ls, initial, forth, back, gaps, tails })
}
