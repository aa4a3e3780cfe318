//! Input documents: varieties, channels and quadratic algebras.

use std::path::Path;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Deserialize;
use zetageo::algebra::{QuadraticAlgebra, Q};
use zetageo::entropy::IntegralVariety;
use zetageo::ffield::FieldCtx;
use zetageo::poly::Poly;
use zetageo::variety::{Potential, VarietySpec};

use crate::CliError;

/// `{p, e, kind, ambient_dim, equations, potential}`; `p` and `e` may also
/// come from the command line.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VarietyDoc {
    pub p: Option<u32>,
    pub e: Option<usize>,
    pub kind: String,
    #[serde(default)]
    pub ambient_dim: usize,
    #[serde(default)]
    pub equations: Vec<String>,
    pub potential: Option<String>,
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::input("input", format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::input("input", format!("{}: {e}", path.display())))
}

/// `spec`/`point`, `A<n>` or `P<n>`, case-insensitive.
pub fn builtin_doc(name: &str) -> Result<VarietyDoc, CliError> {
    let lower = name.to_ascii_lowercase();
    let (kind, n) = match lower.as_str() {
        "spec" | "point" => ("point", 0),
        _ => {
            let (head, tail) = lower.split_at(1);
            let n: usize = tail
                .parse()
                .map_err(|_| CliError::input("builtin", format!("unknown builtin `{name}`; expected spec, A<n> or P<n>")))?;
            match head {
                "a" => ("affine-space", n),
                "p" => ("projective-space", n),
                _ => return Err(CliError::input("builtin", format!("unknown builtin `{name}`; expected spec, A<n> or P<n>"))),
            }
        }
    };
    Ok(VarietyDoc {
        kind: kind.into(),
        ambient_dim: n,
        ..Default::default()
    })
}

fn parse_equations(doc: &VarietyDoc) -> Result<Vec<Poly>, CliError> {
    doc.equations.iter().map(|s| Poly::parse(s).map_err(CliError::from)).collect()
}

impl VarietyDoc {
    pub fn load(builtin: Option<&str>, spec: Option<&Path>) -> Result<Self, CliError> {
        match (builtin, spec) {
            (Some(b), None) => builtin_doc(b),
            (None, Some(path)) => read_json(path),
            (Some(_), Some(_)) => Err(CliError::input("spec", "give either --builtin or --spec, not both")),
            (None, None) => Err(CliError::input("spec", "a variety is required: pass --builtin or --spec")),
        }
    }

    pub fn field(&self, p: Option<u32>, e: Option<usize>) -> Result<FieldCtx, CliError> {
        let p = p.or(self.p).ok_or_else(|| CliError::input("p", "the characteristic is required (--p or `p` in the spec)"))?;
        let e = e.or(self.e).unwrap_or(1);
        Ok(FieldCtx::new(p, e)?)
    }

    pub fn variety(&self, ctx: &FieldCtx) -> Result<VarietySpec, CliError> {
        let n = self.ambient_dim;
        Ok(match self.kind.as_str() {
            "point" => VarietySpec::point(ctx),
            "affine-space" => VarietySpec::affine_space(ctx, n),
            "projective-space" => VarietySpec::projective_space(ctx, n),
            "affine" => VarietySpec::affine(ctx, n, parse_equations(self)?)?,
            "projective" => VarietySpec::projective(ctx, n, parse_equations(self)?)?,
            other => {
                return Err(CliError::input(
                    "kind",
                    format!("unknown kind `{other}`; expected point, affine-space, projective-space, affine or projective"),
                ))
            }
        })
    }

    pub fn integral(&self) -> Result<IntegralVariety, CliError> {
        let n = self.ambient_dim;
        Ok(match self.kind.as_str() {
            "point" => IntegralVariety::Spec,
            "affine-space" => IntegralVariety::AffineSpace(n),
            "projective-space" => IntegralVariety::ProjectiveSpace(n),
            "affine" => IntegralVariety::Affine { n, eqs: parse_equations(self)? },
            "projective" => IntegralVariety::Projective { n, eqs: parse_equations(self)? },
            other => return Err(CliError::input("kind", format!("unknown kind `{other}`"))),
        })
    }

    /// The command-line potential wins over the one in the document.
    pub fn potential(&self, flag: Option<&str>) -> Result<Potential, CliError> {
        match flag.or(self.potential.as_deref()) {
            Some(src) => Ok(Potential::parse(src)?),
            None => Ok(Potential::zero()),
        }
    }

    pub fn describe(&self) -> String {
        let mut s = format!("{}({})", self.kind, self.ambient_dim);
        if !self.equations.is_empty() {
            s.push_str(&format!("[{}]", self.equations.join(" ; ")));
        }
        s
    }
}

/// A dense complex matrix as rows of `[re, im]` pairs.
pub type PairGrid = Vec<Vec<[f64; 2]>>;

pub fn grid_to_matrix(field: &'static str, grid: &PairGrid) -> Result<DMatrix<Complex64>, CliError> {
    let rows = grid.len();
    let cols = grid.first().map_or(0, Vec::len);
    if rows == 0 || grid.iter().any(|r| r.len() != cols) {
        return Err(CliError::input(field, "matrix rows must be nonempty and of equal length"));
    }
    Ok(DMatrix::from_fn(rows, cols, |i, j| Complex64::new(grid[i][j][0], grid[i][j][1])))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelDoc {
    pub d_in: usize,
    pub d_out: usize,
    /// Rows `(i, j)` and columns `(a, b)`, both row-major.
    pub matrix: PairGrid,
    pub state: Option<PairGrid>,
}

/// A rational entry: an integer or a string such as `"-3/4"`.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum RatEntry {
    Int(i64),
    Text(String),
}

impl RatEntry {
    fn to_q(&self) -> Result<Q, CliError> {
        match self {
            RatEntry::Int(n) => Ok(Q::from_integer((*n).into())),
            RatEntry::Text(s) => Q::from_str(s.trim()).map_err(|_| CliError::input("relations", format!("`{s}` is not a rational number"))),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadDoc {
    pub generators: usize,
    #[serde(default)]
    pub relations: Vec<Vec<RatEntry>>,
}

impl QuadDoc {
    pub fn algebra(&self) -> Result<QuadraticAlgebra, CliError> {
        let rows = self
            .relations
            .iter()
            .map(|r| r.iter().map(RatEntry::to_q).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(QuadraticAlgebra::new(self.generators, rows)?)
    }
}

/// `k` for `k[t]`, `one` for `k[τ]/τ²`, or a path to a [`QuadDoc`].
pub fn quad_operand(src: &str) -> Result<QuadraticAlgebra, CliError> {
    match src {
        "k" | "K" => Ok(QuadraticAlgebra::polynomial()),
        "one" | "1" => Ok(QuadraticAlgebra::one()),
        path => read_json::<QuadDoc>(Path::new(path))?.algebra(),
    }
}
