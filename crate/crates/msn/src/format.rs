//! JSON interchange. Rationals are strings in lowest terms ("3/4", "-2");
//! every file carries `"format": "msn/1"`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use num_traits::Signed;

use crate::maps::LinearMap;
use crate::ramsey::{Colouring, ColouringKind, EmbeddingNet, Family};
use crate::space::MultiSpace;
use crate::{Error, Matrix, Rational, Result, Vector};

pub const FORMAT: &str = "msn/1";

pub fn rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let bad = || Error::Format(format!("not a rational: {s:?}"));
    if t.is_empty() || t.contains(char::is_whitespace) {
        return Err(bad());
    }
    let r: Rational = t.parse().map_err(|_| bad())?;
    Ok(r)
}

pub fn rational_str(r: &Rational) -> String {
    r.to_string()
}

pub fn vector(v: &[String]) -> Result<Vector> {
    v.iter().map(|s| rational(s)).collect()
}

pub fn vector_strs(v: &[Rational]) -> Vec<String> {
    v.iter().map(rational_str).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeminormEntry {
    pub functionals: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceFile {
    pub format: String,
    pub dim: usize,
    pub graded: bool,
    pub seminorms: Vec<SeminormEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpaceRef {
    Path(String),
    Inline(SpaceFile),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapFile {
    pub format: String,
    #[serde(rename = "domainRef")]
    pub domain: SpaceRef,
    #[serde(rename = "codomainRef")]
    pub codomain: SpaceRef,
    pub matrix: Vec<Vec<String>>,
}

fn check_format(f: &str) -> Result<()> {
    if f == FORMAT {
        Ok(())
    } else {
        Err(Error::Format(format!("unsupported format {f:?}")))
    }
}

impl SpaceFile {
    pub fn from_space(x: &MultiSpace) -> Self {
        SpaceFile {
            format: FORMAT.into(),
            dim: x.dim(),
            graded: x.graded(),
            seminorms: x
                .seminorms()
                .iter()
                .map(|s| SeminormEntry { functionals: s.functionals().iter().map(|f| vector_strs(f)).collect() })
                .collect(),
        }
    }

    pub fn to_space(&self) -> Result<MultiSpace> {
        check_format(&self.format)?;
        let levels = self
            .seminorms
            .iter()
            .map(|s| s.functionals.iter().map(|f| vector(f)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        for f in levels.iter().flatten() {
            if f.len() != self.dim {
                return Err(Error::Format(format!("functional of length {} in a space of dimension {}", f.len(), self.dim)));
            }
        }
        MultiSpace::from_functionals(self.dim, levels, self.graded)
    }
}

pub fn matrix_strs(m: &Matrix) -> Vec<Vec<String>> {
    m.row_vecs().iter().map(|r| vector_strs(r)).collect()
}

pub fn matrix_from_strs(rows: &[Vec<String>], cols: usize) -> Result<Matrix> {
    let rows = rows.iter().map(|r| vector(r)).collect::<Result<Vec<_>>>()?;
    Matrix::from_rows(cols, rows)
}

impl MapFile {
    pub fn inline(f: &LinearMap) -> Self {
        MapFile {
            format: FORMAT.into(),
            domain: SpaceRef::Inline(SpaceFile::from_space(f.domain())),
            codomain: SpaceRef::Inline(SpaceFile::from_space(f.codomain())),
            matrix: matrix_strs(f.matrix()),
        }
    }

    pub fn with_refs(f: &LinearMap, domain: &str, codomain: &str) -> Self {
        MapFile {
            format: FORMAT.into(),
            domain: SpaceRef::Path(domain.into()),
            codomain: SpaceRef::Path(codomain.into()),
            matrix: matrix_strs(f.matrix()),
        }
    }

    /// Resolves path references relative to `base`.
    pub fn to_map(&self, base: &Path) -> Result<LinearMap> {
        check_format(&self.format)?;
        let x = resolve(&self.domain, base)?;
        let y = resolve(&self.codomain, base)?;
        self.to_map_between(x, y)
    }

    pub fn to_map_between(&self, x: Arc<MultiSpace>, y: Arc<MultiSpace>) -> Result<LinearMap> {
        if self.matrix.len() != y.dim() {
            return Err(Error::Format(format!("matrix has {} rows, codomain dimension is {}", self.matrix.len(), y.dim())));
        }
        let m = matrix_from_strs(&self.matrix, x.dim())?;
        LinearMap::new(x, y, m)
    }
}

fn resolve(r: &SpaceRef, base: &Path) -> Result<Arc<MultiSpace>> {
    match r {
        SpaceRef::Inline(s) => Ok(Arc::new(s.to_space()?)),
        SpaceRef::Path(p) => Ok(Arc::new(load_space(&base.join(p))?)),
    }
}

pub fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, v: &T) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    std::fs::write(path, to_json(v)).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn load_space(path: &Path) -> Result<MultiSpace> {
    read_json::<SpaceFile>(path)?.to_space()
}

pub fn save_space(path: &Path, x: &MultiSpace) -> Result<()> {
    write_json(path, &SpaceFile::from_space(x))
}

pub fn load_map(path: &Path) -> Result<LinearMap> {
    let base: PathBuf = path.parent().map(Path::to_path_buf).unwrap_or_default();
    read_json::<MapFile>(path)?.to_map(&base)
}

pub fn save_map(path: &Path, f: &LinearMap) -> Result<()> {
    write_json(path, &MapFile::inline(f))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetFile {
    pub format: String,
    pub x: SpaceFile,
    pub y: SpaceFile,
    pub resolution: String,
    pub certified: bool,
    /// Matrices of the net points, in canonical order.
    pub points: Vec<Vec<Vec<String>>>,
}

impl NetFile {
    pub fn from_net(net: &EmbeddingNet) -> Self {
        NetFile {
            format: FORMAT.into(),
            x: SpaceFile::from_space(&net.x),
            y: SpaceFile::from_space(&net.y),
            resolution: rational_str(&net.resolution),
            certified: net.certified,
            points: net.points.iter().map(|p| matrix_strs(p.matrix())).collect(),
        }
    }

    pub fn to_net(&self) -> Result<EmbeddingNet> {
        check_format(&self.format)?;
        let x = Arc::new(self.x.to_space()?);
        let y = Arc::new(self.y.to_space()?);
        let points = self
            .points
            .iter()
            .map(|m| LinearMap::new(x.clone(), y.clone(), matrix_from_strs(m, x.dim())?))
            .collect::<Result<Vec<_>>>()?;
        Ok(EmbeddingNet { x, y, points, resolution: rational(&self.resolution)?, certified: self.certified })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "camelCase")]
pub enum FamilyFile {
    Constant { value: String },
    CoordinateClamp { coordinate: usize },
    ModularSum { colours: usize },
    SignOfFirst,
}

/// A colouring: either a table keyed by net-point index or a built-in family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColouringFile {
    pub format: String,
    /// `"discrete"` or `"continuous"`.
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub colours: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<BTreeMap<usize, String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilyFile>,
}

impl ColouringFile {
    pub fn discrete_table(colours: usize, values: &[usize]) -> Self {
        ColouringFile {
            format: FORMAT.into(),
            kind: "discrete".into(),
            colours: Some(colours),
            level: None,
            table: Some(values.iter().enumerate().map(|(i, v)| (i, v.to_string())).collect()),
            family: None,
        }
    }

    fn kind(&self) -> Result<ColouringKind> {
        match (self.kind.as_str(), self.colours, self.level) {
            ("discrete", Some(colours), None) => Ok(ColouringKind::Discrete { colours }),
            ("continuous", None, Some(level)) => Ok(ColouringKind::Continuous { level }),
            _ => Err(Error::Format("colouring needs kind discrete with colours, or continuous with level".into())),
        }
    }

    /// Table colourings are resolved against `net`.
    pub fn to_colouring(&self, net: Option<&EmbeddingNet>) -> Result<Colouring> {
        check_format(&self.format)?;
        let kind = self.kind()?;
        match (&self.table, &self.family) {
            (Some(table), None) => {
                let net = net.ok_or_else(|| Error::Format("table colouring needs a net".into()))?;
                if table.len() != net.points.len() || table.keys().enumerate().any(|(i, k)| i != *k) {
                    return Err(Error::Format("table must list every net point index once".into()));
                }
                let values = table.values().map(|s| rational(s)).collect::<Result<Vec<_>>>()?;
                if let ColouringKind::Discrete { colours } = kind {
                    let ok = values.iter().all(|v| v.is_integer() && !v.is_negative() && *v < Rational::from_integer((colours as i64).into()));
                    if !ok {
                        return Err(Error::Format("discrete colours must be integers below the colour count".into()));
                    }
                }
                Colouring::table(kind, &net.points, values)
            }
            (None, Some(f)) => {
                let family = match f {
                    FamilyFile::Constant { value } => Family::Constant(rational(value)?),
                    FamilyFile::CoordinateClamp { coordinate } => Family::CoordinateClamp { coordinate: *coordinate },
                    FamilyFile::ModularSum { colours } => Family::ModularSum { colours: *colours },
                    FamilyFile::SignOfFirst => Family::SignOfFirst,
                };
                Ok(Colouring::family(kind, family))
            }
            _ => Err(Error::Format("colouring needs exactly one of table and family".into())),
        }
    }
}
