//! `msn`: command-line front end. Artifacts are `msn/1` JSON files under
//! `--out`; a summary goes to stdout and diagnostics to stderr as JSON.
//! Exit codes: 0 success, 1 input or I/O error, 2 mathematical failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use msn::amalgam::{self, AmalgamMode, AmalgamResult, EmbeddingPair, PushoutOptions};
use msn::format::{self, ColouringFile, MapFile, NetFile, SpaceFile};
use msn::maps::{self, Bound, IsoOutcome, LinearMap, Lower, NoIsoReason};
use msn::ramsey::{self, ColouringKind};
use msn::space::{self, MultiSpace};
use msn::tower::{self, TowerConfig};
use msn::{Error, Rational};

#[derive(Parser)]
#[command(name = "msn", version, about = "Exact workbench for multi-seminormed spaces")]
struct Cli {
    /// Directory for JSON artifacts.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads; affects speed only.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    #[command(subcommand)]
    /// Inspect and transform spaces.
    Space(SpaceCmd),
    #[command(subcommand)]
    /// Distortion and operator seminorms of maps.
    Map(MapCmd),
    #[command(subcommand)]
    /// Isomorphisms from kernel invariants.
    Iso(IsoCmd),
    #[command(subcommand)]
    /// Pushouts and multi-amalgams.
    Amalgam(AmalgamCmd),
    #[command(subcommand)]
    /// Finite Fraïssé tower stages.
    Tower(TowerCmd),
    #[command(subcommand)]
    /// Nets, colourings and witness search.
    Ramsey(RamseyCmd),
}

#[derive(Subcommand)]
enum SpaceCmd {
    /// Dimension, length, separation and gradedness.
    Inspect { space: PathBuf },
    /// Kernel-dimension invariant.
    Invariant { space: PathBuf },
    /// Quotient normed space of one level, with its projection.
    Quotient {
        space: PathBuf,
        #[arg(long, default_value_t = 0)]
        level: usize,
    },
    /// Graded closure.
    Graded { space: PathBuf },
    /// Append a level carrying a norm.
    Extend { space: PathBuf },
    /// Keep the first k levels.
    Truncate {
        space: PathBuf,
        #[arg(long)]
        k: usize,
    },
}

#[derive(Subcommand)]
enum MapCmd {
    /// Is the map a multi-δ-isometric embedding.
    Check {
        map: PathBuf,
        #[arg(long, default_value = "0")]
        delta: String,
    },
    /// Per-level distance between two maps.
    Distance { f: PathBuf, g: PathBuf },
    /// Operator seminorm at every level.
    Opnorm { map: PathBuf },
}

#[derive(Subcommand)]
enum IsoCmd {
    /// Multi-isomorphism or an obstruction.
    Build { x: PathBuf, y: PathBuf },
    /// Upper bound on the Banach-Mazur distance.
    Bm { x: PathBuf, y: PathBuf },
}

#[derive(Args)]
struct PushArgs {
    #[arg(long)]
    x: Option<PathBuf>,
    #[arg(long)]
    y: Option<PathBuf>,
    #[arg(long)]
    z: Option<PathBuf>,
    #[arg(long)]
    f: PathBuf,
    #[arg(long)]
    g: PathBuf,
    #[arg(long, default_value = "0")]
    delta: String,
    #[arg(long)]
    eps: String,
}

#[derive(Subcommand)]
enum AmalgamCmd {
    /// Pushout of two embeddings of X.
    Push {
        #[command(flatten)]
        args: PushArgs,
        #[arg(long)]
        graded: bool,
        #[arg(long)]
        separated: bool,
        /// One extension LP per functional instead of the full dual polytope.
        #[arg(long)]
        compact: bool,
    },
    /// Product of spaces.
    Product {
        #[command(flatten)]
        args: PushArgs,
    },
    /// Amalgam of several embedding pairs.
    Multi {
        #[arg(long)]
        y: PathBuf,
        #[arg(long = "gamma", required = true)]
        gammas: Vec<PathBuf>,
        #[arg(long = "eta", required = true)]
        etas: Vec<PathBuf>,
        /// One value for all pairs or one per pair.
        #[arg(long = "delta")]
        deltas: Vec<String>,
        #[arg(long)]
        eps: String,
        #[arg(long)]
        compact: bool,
    },
}

#[derive(Subcommand)]
enum TowerCmd {
    /// Build stages and save them to --out.
    Build {
        #[arg(long = "catalog", required = true)]
        catalog: Vec<PathBuf>,
        #[arg(long)]
        stages: usize,
        #[arg(long = "delta")]
        deltas: Vec<String>,
        #[arg(long)]
        omega: bool,
        #[arg(long, default_value_t = 1)]
        pairs: usize,
    },
    /// Recheck a saved tower.
    Verify { dir: PathBuf },
    /// Back-and-forth between two towers.
    Backforth {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        steps: usize,
    },
}

#[derive(Subcommand)]
enum RamseyCmd {
    /// Net of embeddings X → Y.
    Net {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
        #[arg(long)]
        eps: Option<String>,
        /// Fixed number of divisions per face instead of a target spacing.
        #[arg(long)]
        divisions: Option<usize>,
    },
    /// Oscillation and Lipschitz audit of a colouring.
    Oscillate {
        #[arg(long)]
        net: PathBuf,
        #[arg(long)]
        colouring: PathBuf,
        #[arg(long, default_value = "0")]
        eps: String,
    },
    /// Monochromatic witness search.
    Search {
        #[arg(long)]
        net_xz: PathBuf,
        #[arg(long)]
        net_xy: PathBuf,
        #[arg(long)]
        colouring: PathBuf,
        #[arg(long = "candidate", required = true)]
        candidates: Vec<PathBuf>,
        #[arg(long)]
        eps: String,
    },
    /// Product colouring identity.
    Product {
        #[arg(long)]
        colouring: PathBuf,
        #[arg(long = "factor", required = true)]
        factors: Vec<PathBuf>,
        #[arg(long = "rho", required = true)]
        rhos: Vec<PathBuf>,
        #[arg(long = "eta", required = true)]
        etas: Vec<PathBuf>,
    },
}

enum Failure {
    Input(String, String),
    Math(String, String, Value),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::Io(_) => Failure::Input("io".into(), msg),
            Error::Format(_)
            | Error::DimensionMismatch { .. }
            | Error::ShapeMismatch(_)
            | Error::ArityMismatch(_)
            | Error::LengthMismatch(..)
            | Error::BadLevel { .. }
            | Error::BadLength { .. }
            | Error::NotGraded(..)
            | Error::EmptySequence
            | Error::EmptyCatalog
            | Error::EpsNonPositive
            | Error::NegativeDelta => Failure::Input("input".into(), msg),
            Error::NotAnEmbedding { witness, .. } | Error::NotAnNEmbedding { witness, .. } => {
                Failure::Math("notAnEmbedding".into(), msg, json!(witness))
            }
            other => Failure::Math(kind_name(&other), msg, Value::Null),
        }
    }
}

fn kind_name(e: &Error) -> String {
    let s = format!("{e:?}");
    let head: String = s.chars().take_while(|c| c.is_alphanumeric()).collect();
    let mut c = head.chars();
    match c.next() {
        Some(f) => f.to_lowercase().chain(c).collect(),
        None => "error".into(),
    }
}

type Outcome = Result<Value, Failure>;

struct Ctx {
    out: Option<PathBuf>,
    seed: u64,
}

impl Ctx {
    fn write<T: serde::Serialize>(&self, name: &str, v: &T) -> Result<(), Failure> {
        if let Some(dir) = &self.out {
            format::write_json(&dir.join(name), v)?;
        }
        Ok(())
    }

    fn out_dir(&self) -> Result<&Path, Failure> {
        self.out.as_deref().ok_or_else(|| Failure::Input("usage".into(), "--out is required".into()))
    }
}

fn q(s: &str) -> Result<Rational, Failure> {
    Ok(format::rational(s)?)
}

fn load_space(p: &Path) -> Result<Arc<MultiSpace>, Failure> {
    Ok(Arc::new(format::load_space(p)?))
}

fn load_map(p: &Path) -> Result<LinearMap, Failure> {
    Ok(format::load_map(p)?)
}

fn load_map_between(p: &Path, x: &Arc<MultiSpace>, y: &Arc<MultiSpace>) -> Result<LinearMap, Failure> {
    let f: MapFile = format::read_json(p)?;
    Ok(f.to_map_between(x.clone(), y.clone())?)
}

fn bound_json(b: &Bound) -> Value {
    match b {
        Bound::Finite(v) => json!(format::rational_str(v)),
        Bound::Unbounded => Value::Null,
    }
}

fn space_summary(x: &MultiSpace) -> Value {
    json!({
        "dim": x.dim(),
        "length": x.length(),
        "graded": x.is_graded(),
        "separated": x.is_separated(),
        "functionals": x.seminorms().iter().map(|s| s.functionals().len()).collect::<Vec<_>>(),
        "kernelDims": x.seminorms().iter().map(|s| s.kernel().len()).collect::<Vec<_>>(),
    })
}

fn space_out(ctx: &Ctx, x: &MultiSpace) -> Outcome {
    ctx.write("space.json", &SpaceFile::from_space(x))?;
    Ok(json!(SpaceFile::from_space(x)))
}

fn run_space(ctx: &Ctx, cmd: SpaceCmd) -> Outcome {
    match cmd {
        SpaceCmd::Inspect { space } => Ok(space_summary(&*load_space(&space)?)),
        SpaceCmd::Invariant { space } => {
            let a = space::invariant_alpha(&*load_space(&space)?)?;
            let v = json!({ "alpha": a.to_map() });
            ctx.write("invariant.json", &v)?;
            Ok(v)
        }
        SpaceCmd::Quotient { space, level } => {
            let x = load_space(&space)?;
            if level >= x.length() {
                return Err(Error::BadLevel { level, length: x.length() }.into());
            }
            let qn = x.seminorm(level).quotient();
            let xt = Arc::new(MultiSpace::new(qn.norm.dim(), vec![qn.norm.clone()], true)?);
            let pi = LinearMap::new(x.clone(), xt.clone(), qn.projection.clone())?;
            ctx.write("quotient.json", &SpaceFile::from_space(&xt))?;
            ctx.write("projection.json", &MapFile::inline(&pi))?;
            Ok(json!({ "quotient": SpaceFile::from_space(&xt), "projection": format::matrix_strs(pi.matrix()) }))
        }
        SpaceCmd::Graded { space } => space_out(ctx, &space::graded_closure(&*load_space(&space)?)),
        SpaceCmd::Extend { space } => space_out(ctx, &space::extend_with_norm(&*load_space(&space)?)),
        SpaceCmd::Truncate { space, k } => space_out(ctx, &space::truncate(&*load_space(&space)?, k)?),
    }
}

fn run_map(ctx: &Ctx, cmd: MapCmd) -> Outcome {
    match cmd {
        MapCmd::Check { map, delta } => {
            let f = load_map(&map)?;
            let delta = q(&delta)?;
            let check = maps::is_embedding(&f, &delta);
            let d = maps::distortion(&f)?;
            let report = json!({
                "delta": format::rational_str(&delta),
                "holds": check.holds,
                "injective": d.injective,
                "minimalDelta": d.minimal_delta.as_ref().map(format::rational_str),
                "levels": d.per_level.iter().map(|l| json!({
                    "upper": bound_json(&l.upper),
                    "lower": match &l.lower { Lower::Constant(c) => json!(format::rational_str(c)), Lower::Vacuous => json!("vacuous") },
                })).collect::<Vec<_>>(),
            });
            ctx.write("check.json", &report)?;
            if !check.holds {
                return Err(Failure::Math("notAnEmbedding".into(), format!("map is not a multi-{delta}-isometric embedding"), json!({ "witness": check.witness, "report": report })));
            }
            Ok(report)
        }
        MapCmd::Distance { f, g } => {
            let f = load_map(&f)?;
            let g = load_map(&g)?;
            let levels = f.domain().length().min(f.codomain().length());
            let ds = (0..levels).map(|m| maps::map_distance(&f, &g, m).map(|b| bound_json(&b))).collect::<Result<Vec<_>, _>>()?;
            let v = json!({ "distances": ds });
            ctx.write("distance.json", &v)?;
            Ok(v)
        }
        MapCmd::Opnorm { map } => {
            let f = load_map(&map)?;
            let levels = f.domain().length().min(f.codomain().length());
            let ns = (0..levels).map(|m| maps::operator_seminorm(&f, m).map(|b| bound_json(&b))).collect::<Result<Vec<_>, _>>()?;
            let v = json!({ "opnorms": ns });
            ctx.write("opnorm.json", &v)?;
            Ok(v)
        }
    }
}

fn run_iso(ctx: &Ctx, cmd: IsoCmd) -> Outcome {
    match cmd {
        IsoCmd::Build { x, y } => {
            let (x, y) = (load_space(&x)?, load_space(&y)?);
            match maps::build_iso_from_invariant(&x, &y)? {
                IsoOutcome::Iso(h) => {
                    ctx.write("iso.json", &MapFile::inline(&h))?;
                    Ok(json!({ "iso": format::matrix_strs(h.matrix()) }))
                }
                IsoOutcome::NoIso(reason) => {
                    let w = match reason {
                        NoIsoReason::InvariantMismatch => json!({
                            "reason": "invariantMismatch",
                            "alphaX": space::invariant_alpha(&x)?.to_map(),
                            "alphaY": space::invariant_alpha(&y)?.to_map(),
                        }),
                        NoIsoReason::KernelArrangement { certified } => json!({ "reason": "kernelArrangement", "certified": certified }),
                    };
                    Err(Failure::Math("noIsomorphism".into(), "no multi-isomorphism".into(), w))
                }
            }
        }
        IsoCmd::Bm { x, y } => {
            let b = maps::bm_upper_bound(&load_space(&x)?, &load_space(&y)?)?;
            let v = json!({ "productUpperBound": b.as_ref().map(format::rational_str) });
            ctx.write("bm.json", &v)?;
            Ok(v)
        }
    }
}

fn load_pair(a: &PushArgs) -> Result<(LinearMap, LinearMap, Rational, Rational), Failure> {
    let (mut f, mut g) = (load_map(&a.f)?, load_map(&a.g)?);
    let x = match &a.x {
        Some(p) => Some(load_space(p)?),
        None => None,
    };
    if let Some(x) = &x {
        f = f.with_domain(x.clone())?;
        g = g.with_domain(x.clone())?;
    }
    if let Some(p) = &a.y {
        f = f.with_codomain(load_space(p)?)?;
    }
    if let Some(p) = &a.z {
        g = g.with_codomain(load_space(p)?)?;
    }
    Ok((f, g, q(&a.delta)?, q(&a.eps)?))
}

fn amalgam_out(ctx: &Ctx, r: &AmalgamResult) -> Outcome {
    let cert = json!({
        "format": format::FORMAT,
        "delta": format::rational_str(&r.delta),
        "eps": format::rational_str(&r.eps),
        "bound": format::rational_str(&r.bound),
        "levels": r.certificate.iter().enumerate().map(|(l, b)| json!({ "level": l, "distance": bound_json(b) })).collect::<Vec<_>>(),
        "withinBound": r.within_bound(),
    });
    ctx.write("w.json", &SpaceFile::from_space(&r.w))?;
    ctx.write("legY.json", &MapFile::inline(&r.leg_y))?;
    ctx.write("legZ.json", &MapFile::inline(&r.leg_z))?;
    ctx.write("certificate.json", &cert)?;
    if !r.within_bound() {
        return Err(Failure::Math("boundExceeded".into(), "certificate exceeds its bound".into(), cert));
    }
    Ok(json!({ "w": space_summary(&r.w), "certificate": cert }))
}

fn run_amalgam(ctx: &Ctx, cmd: AmalgamCmd) -> Outcome {
    match cmd {
        AmalgamCmd::Push { args, graded, separated, compact } => {
            let (f, g, delta, eps) = load_pair(&args)?;
            let mode = if compact { AmalgamMode::Compact } else { AmalgamMode::Full };
            let opts = PushoutOptions::new(delta, eps).graded(graded).separated(separated).mode(mode);
            amalgam_out(ctx, &amalgam::pushout_nap(&f, &g, &opts)?)
        }
        AmalgamCmd::Product { args } => {
            let (f, g, delta, eps) = load_pair(&args)?;
            amalgam_out(ctx, &amalgam::product_amalgam(&f, &g, &delta, &eps, &amalgam::normed_pushout)?)
        }
        AmalgamCmd::Multi { y, gammas, etas, deltas, eps, compact } => {
            if gammas.len() != etas.len() || !(deltas.len() <= 1 || deltas.len() == gammas.len()) {
                return Err(Failure::Input("usage".into(), "give one --eta per --gamma and one --delta or one per pair".into()));
            }
            let y = load_space(&y)?;
            let mut pairs = Vec::new();
            for (i, (gp, ep)) in gammas.iter().zip(&etas).enumerate() {
                let gamma = load_map(gp)?;
                let gamma = gamma.with_codomain(y.clone())?;
                let eta = load_map(ep)?;
                let delta = match deltas.len() {
                    0 => Rational::from_integer(0.into()),
                    1 => q(&deltas[0])?,
                    _ => q(&deltas[i])?,
                };
                pairs.push(EmbeddingPair { gamma, eta, delta });
            }
            let mode = if compact { AmalgamMode::Compact } else { AmalgamMode::Full };
            let m = amalgam::multi_amalgam_ap(&y, &pairs, &q(&eps)?, mode, true)?;
            ctx.write("z.json", &SpaceFile::from_space(&m.z))?;
            ctx.write("i.json", &MapFile::inline(&m.i_map))?;
            for (k, j) in m.js.iter().enumerate() {
                ctx.write(&format!("j_{k}.json"), &MapFile::inline(j))?;
            }
            let certs: Vec<Value> = m
                .certificates
                .iter()
                .zip(&m.bounds)
                .map(|(c, b)| json!({ "bound": format::rational_str(b), "distances": c.iter().map(bound_json).collect::<Vec<_>>(), "withinBound": c.iter().all(|d| d.le(b)) }))
                .collect();
            let v = json!({ "format": format::FORMAT, "pairs": certs });
            ctx.write("certificate.json", &v)?;
            if m.certificates.iter().zip(&m.bounds).any(|(c, b)| !c.iter().all(|d| d.le(b))) {
                return Err(Failure::Math("boundExceeded".into(), "a pair certificate exceeds its bound".into(), v));
            }
            Ok(json!({ "z": space_summary(&m.z), "certificate": v }))
        }
    }
}

fn run_tower(ctx: &Ctx, cmd: TowerCmd) -> Outcome {
    match cmd {
        TowerCmd::Build { catalog, stages, deltas, omega, pairs } => {
            let dir = ctx.out_dir()?;
            let catalog = catalog.iter().map(|p| load_space(p)).collect::<Result<Vec<_>, _>>()?;
            let mut config = TowerConfig::new(stages, ctx.seed);
            if !deltas.is_empty() {
                config.deltas = deltas.iter().map(|d| q(d)).collect::<Result<_, _>>()?;
            }
            config.omega = omega;
            config.pairs_per_stage = pairs;
            let t = tower::build_tower(&catalog, &config)?;
            tower::save_tower(dir, &t)?;
            Ok(json!({
                "stages": t.len(),
                "dims": t.stages.iter().map(|s| s.dim()).collect::<Vec<_>>(),
                "certificates": t.certificates.len(),
            }))
        }
        TowerCmd::Verify { dir } => {
            let t = tower::load_tower(&dir)?;
            let report = tower::verify_tower(&t);
            ctx.write("report.json", &report)?;
            if !report.passed {
                let failures: Vec<_> = report.failures().cloned().collect();
                return Err(Failure::Math("towerCheckFailed".into(), format!("{} checks failed", failures.len()), json!(failures)));
            }
            Ok(json!({ "passed": true, "checks": report.checks.len() }))
        }
        TowerCmd::Backforth { a, b, n, steps } => {
            let (a, b) = (tower::load_tower(&a)?, tower::load_tower(&b)?);
            let r = tower::back_and_forth(&a, &b, n, steps)?;
            let v = json!({
                "format": format::FORMAT,
                "n": r.n,
                "chainDims": r.chain.iter().map(|c| c.dim()).collect::<Vec<_>>(),
                "initial": r.initial,
                "forth": r.forth,
                "back": r.back,
                "gaps": r.gaps,
                "tails": r.tails,
                "holds": r.holds(),
            });
            ctx.write("backforth.json", &v)?;
            if !r.holds() {
                return Err(Failure::Math("boundExceeded".into(), "a back-and-forth estimate fails".into(), v));
            }
            Ok(v)
        }
    }
}

fn load_net(p: &Path) -> Result<ramsey::EmbeddingNet, Failure> {
    let f: NetFile = format::read_json(p)?;
    Ok(f.to_net()?)
}

fn load_colouring(p: &Path, net: Option<&ramsey::EmbeddingNet>) -> Result<ramsey::Colouring, Failure> {
    let f: ColouringFile = format::read_json(p)?;
    Ok(f.to_colouring(net)?)
}

fn run_ramsey(ctx: &Ctx, cmd: RamseyCmd) -> Outcome {
    match cmd {
        RamseyCmd::Net { x, y, eps, divisions } => {
            let (x, y) = (load_space(&x)?, load_space(&y)?);
            let net = match (eps, divisions) {
                (Some(e), None) => ramsey::build_net(&x, &y, &q(&e)?, ctx.seed)?,
                (None, Some(n)) => ramsey::build_net_divisions(&x, &y, n)?,
                _ => return Err(Failure::Input("usage".into(), "give exactly one of --eps and --divisions".into())),
            };
            let file = NetFile::from_net(&net);
            ctx.write("net.json", &file)?;
            Ok(json!({ "points": net.points.len(), "resolution": file.resolution, "certified": net.certified }))
        }
        RamseyCmd::Oscillate { net, colouring, eps } => {
            let net = load_net(&net)?;
            let c = load_colouring(&colouring, Some(&net))?;
            let osc = ramsey::oscillation(&c, &net.points, &q(&eps)?)?;
            let mut v = json!({ "oscillation": format::rational_str(&osc) });
            if matches!(c.kind, ColouringKind::Continuous { .. }) {
                let bad = ramsey::lipschitz_violations(&c, &net.points)?;
                v["lipschitzViolations"] = json!(bad);
                if !bad.is_empty() {
                    return Err(Failure::Math("notLipschitz".into(), "continuous colouring breaks its Lipschitz bound".into(), v));
                }
            }
            ctx.write("oscillation.json", &v)?;
            Ok(v)
        }
        RamseyCmd::Search { net_xz, net_xy, colouring, candidates, eps } => {
            let net_xz = load_net(&net_xz)?;
            let net_xy = load_net(&net_xy)?;
            let c = load_colouring(&colouring, Some(&net_xz))?;
            let cands = candidates.iter().map(|p| load_map_between(p, &net_xy.y, &net_xz.y)).collect::<Result<Vec<_>, _>>()?;
            match ramsey::search_monochromatic(&c, &net_xz, &net_xy, &cands, &q(&eps)?)? {
                Some(m) => {
                    let v = json!({ "found": true, "candidate": m.candidate, "colour": m.colour });
                    ctx.write("search.json", &v)?;
                    Ok(v)
                }
                None => Err(Failure::Math("notFound".into(), "no candidate stabilizes the colouring".into(), json!({ "found": false, "candidates": cands.len() }))),
            }
        }
        RamseyCmd::Product { colouring, factors, rhos, etas } => {
            let c = load_colouring(&colouring, None)?;
            let factors = factors.iter().map(|p| load_space(p)).collect::<Result<Vec<_>, _>>()?;
            let pc = ramsey::product_colouring(c, &factors)?;
            let rhos = rhos
                .iter()
                .zip(&factors)
                .map(|(p, z)| Ok(load_map(p)?.with_codomain(z.clone())?))
                .collect::<Result<Vec<_>, Failure>>()?;
            let mut rows = Vec::new();
            let mut ok = true;
            for e in &etas {
                let id = pc.identity(&rhos, &load_map(e)?)?;
                ok &= id.holds();
                rows.push(json!({ "left": format::rational_str(&id.left), "right": format::rational_str(&id.right), "holds": id.holds() }));
            }
            let v = json!({ "identities": rows, "holds": ok });
            ctx.write("product.json", &v)?;
            if !ok {
                return Err(Failure::Math("identityFails".into(), "product identity fails".into(), v));
            }
            Ok(v)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("{}", json!({ "error": "threads", "message": e.to_string() }));
            return ExitCode::from(1);
        }
    }
    let ctx = Ctx { out: cli.out, seed: cli.seed };
    let result = match cli.command {
        Command::Space(c) => run_space(&ctx, c),
        Command::Map(c) => run_map(&ctx, c),
        Command::Iso(c) => run_iso(&ctx, c),
        Command::Amalgam(c) => run_amalgam(&ctx, c),
        Command::Tower(c) => run_tower(&ctx, c),
        Command::Ramsey(c) => run_ramsey(&ctx, c),
    };
    match result {
        Ok(v) => {
            print!("{}", format::to_json(&v));
            ExitCode::SUCCESS
        }
        Err(Failure::Input(kind, message)) => {
            eprintln!("{}", json!({ "error": kind, "message": message }));
            ExitCode::from(1)
        }
        Err(Failure::Math(kind, message, witness)) => {
            eprintln!("{}", json!({ "error": kind, "message": message, "witness": witness }));
            ExitCode::from(2)
        }
    }
}
