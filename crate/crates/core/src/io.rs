//! Function specs and JSON forms of samples and coefficients.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{heat_kernel, FourierCoefficients, Harmonics, SampledFunction};
use crate::group::GroupDescriptor;
use crate::norms::{lp_function_norm, lp_oplus_norm, NormReport};
use crate::quadrature::{haar_quadrature, QuadratureRule};
use crate::repr::{character, irrep_matrix, IrrepLabel};

/// Version stamped into every JSON document this crate writes.
pub const SCHEMA_VERSION: u32 = 1;

/// A function named by the small spec language:
///
/// * `const:c`
/// * `char:<label>` (plain integers on tori and cyclic groups)
/// * `entry:<label>:i:j` (1-based)
/// * `heat:t`
/// * `file:path`
#[derive(Clone, Debug, PartialEq)]
pub enum FunctionSpec {
    Constant(f64),
    Character(IrrepLabel),
    Entry { label: IrrepLabel, i: usize, j: usize },
    Heat(f64),
    File(PathBuf),
}

fn parse_label_or_frequency(group: &GroupDescriptor, s: &str) -> Result<IrrepLabel> {
    if let Ok(l) = IrrepLabel::parse(group, s) {
        return Ok(l);
    }
    let ints = || {
        s.split(',')
            .map(|x| x.trim().parse::<i64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| Error::Parse(format!("`{s}` is not a label of {group}")))
    };
    match group {
        GroupDescriptor::Torus(n) => {
            let k = ints()?;
            if k.len() != *n as usize {
                return Err(Error::Parse(format!("`{s}` needs {n} frequencies")));
            }
            Ok(IrrepLabel::Torus(k))
        }
        GroupDescriptor::Cyclic(_) => IrrepLabel::parse(group, &format!("chi:{s}")),
        _ => Err(Error::Parse(format!("`{s}` is not a label of {group}"))),
    }
}

impl FunctionSpec {
    pub fn parse(group: &GroupDescriptor, s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("function spec `{s}` has no `kind:` prefix")))?;
        let num = |x: &str| {
            x.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Parse(format!("`{x}` is not a number")))
        };
        match head {
            "const" => Ok(FunctionSpec::Constant(num(rest)?)),
            "heat" => Ok(FunctionSpec::Heat(num(rest)?)),
            "char" => Ok(FunctionSpec::Character(parse_label_or_frequency(group, rest)?)),
            "file" => Ok(FunctionSpec::File(PathBuf::from(rest))),
            "entry" => {
                let mut parts = rest.rsplitn(3, ':');
                let j = parts.next();
                let i = parts.next();
                let label = parts.next();
                match (label, i, j) {
                    (Some(l), Some(i), Some(j)) => {
                        let idx = |x: &str| {
                            x.parse::<usize>()
                                .map_err(|_| Error::Parse(format!("`{x}` is not a matrix index")))
                        };
                        Ok(FunctionSpec::Entry {
                            label: parse_label_or_frequency(group, l)?,
                            i: idx(i)?,
                            j: idx(j)?,
                        })
                    }
                    _ => Err(Error::Parse(format!("`{s}` should read entry:<label>:i:j"))),
                }
            }
            other => Err(Error::Parse(format!("unknown function kind `{other}`"))),
        }
    }

    /// Samples the function on `h`'s rule; heat kernels use `h`'s labels.
    pub fn sample(&self, h: &Harmonics) -> Result<SampledFunction> {
        let rule = h.rule();
        match self {
            FunctionSpec::Constant(c) => Ok(SampledFunction::constant(rule, Complex64::new(*c, 0.0))),
            FunctionSpec::Character(l) => SampledFunction::new(
                rule.clone(),
                rule.nodes()
                    .iter()
                    .map(|g| character(l, g))
                    .collect::<Result<Vec<_>>>()?,
            ),
            FunctionSpec::Entry { label, i, j } => {
                let d = label.dim();
                if *i == 0 || *j == 0 || *i > d || *j > d {
                    return Err(Error::IndexOutOfRange { i: *i, j: *j, dim: d });
                }
                SampledFunction::new(
                    rule.clone(),
                    rule.nodes()
                        .iter()
                        .map(|g| irrep_matrix(label, g).map(|m| m[(i - 1, j - 1)]))
                        .collect::<Result<Vec<_>>>()?,
                )
            }
            FunctionSpec::Heat(t) => heat_kernel(h, *t),
            FunctionSpec::File(p) => {
                let f = read_sampled(p)?;
                f.same_rule(&SampledFunction::constant(rule, 0.0.into()))?;
                SampledFunction::new(rule.clone(), f.values().to_vec())
            }
        }
    }

    /// Largest shell the function occupies, when it is known in closed form.
    pub fn shell(&self) -> Option<u32> {
        match self {
            FunctionSpec::Constant(_) => Some(0),
            FunctionSpec::Character(l) | FunctionSpec::Entry { label: l, .. } => Some(l.shell()),
            _ => None,
        }
    }
}

impl std::fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FunctionSpec::Constant(c) => write!(f, "const:{c}"),
            FunctionSpec::Character(l) => write!(f, "char:{l}"),
            FunctionSpec::Entry { label, i, j } => write!(f, "entry:{label}:{i}:{j}"),
            FunctionSpec::Heat(t) => write!(f, "heat:{t}"),
            FunctionSpec::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

/// On-disk form of a [`SampledFunction`]; values are `[re, im]` pairs in
/// node order of `haar_quadrature(group, resolution)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampledFile {
    pub schema_version: u32,
    pub group: GroupDescriptor,
    pub resolution: u32,
    pub values: Vec<[f64; 2]>,
}

impl SampledFile {
    pub fn from_function(f: &SampledFunction) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            group: f.group().clone(),
            resolution: f.rule().resolution(),
            values: f.values().iter().map(|v| [v.re, v.im]).collect(),
        }
    }

    pub fn into_function(self) -> Result<SampledFunction> {
        let rule = Arc::new(haar_quadrature(&self.group, self.resolution)?);
        SampledFunction::new(rule, self.values.iter().map(|[a, b]| Complex64::new(*a, *b)).collect())
    }
}

pub fn read_sampled(path: &Path) -> Result<SampledFunction> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str::<SampledFile>(&text)?.into_function()
}

pub fn sampled_on(rule: &Arc<QuadratureRule>, values: Vec<[f64; 2]>) -> Result<SampledFunction> {
    SampledFunction::new(
        rule.clone(),
        values.into_iter().map(|[a, b]| Complex64::new(a, b)).collect(),
    )
}

#[derive(Clone, Debug, Serialize)]
pub struct BlockRecord {
    pub label: IrrepLabel,
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

/// JSON form of [`FourierCoefficients`].
#[derive(Clone, Debug, Serialize)]
pub struct CoefficientsRecord {
    pub group: GroupDescriptor,
    pub cutoff: u32,
    pub blocks: Vec<BlockRecord>,
}

/// Rounds away `-0.0` and values below `1e-15` so that printed spectra stay
/// readable; the stored numbers are otherwise untouched.
pub(crate) fn tidy(x: f64) -> f64 {
    if x.abs() < 1e-15 {
        0.0
    } else {
        x
    }
}

impl CoefficientsRecord {
    pub fn new(c: &FourierCoefficients) -> Self {
        Self {
            group: c.group().clone(),
            cutoff: c.cutoff(),
            blocks: c
                .iter()
                .map(|(l, b)| BlockRecord {
                    label: l.clone(),
                    dim: l.dim(),
                    re: (0..b.nrows())
                        .map(|i| (0..b.ncols()).map(|j| tidy(b[(i, j)].re)).collect())
                        .collect(),
                    im: (0..b.nrows())
                        .map(|i| (0..b.ncols()).map(|j| tidy(b[(i, j)].im)).collect())
                        .collect(),
                })
                .collect(),
        }
    }
}

/// Norms printed next to a transform.
#[derive(Clone, Debug, Serialize)]
pub struct NormSummary {
    pub l2_function: f64,
    pub l1_function: f64,
    pub linf_function: f64,
    pub l2_oplus: NormReport,
    pub l1_oplus: NormReport,
    pub linf_oplus: NormReport,
}

impl NormSummary {
    pub fn new(f: &SampledFunction, c: &FourierCoefficients) -> Result<Self> {
        Ok(Self {
            l2_function: lp_function_norm(f, 2.0)?,
            l1_function: lp_function_norm(f, 1.0)?,
            linf_function: lp_function_norm(f, f64::INFINITY)?,
            l2_oplus: lp_oplus_norm(c, 2.0, None)?,
            l1_oplus: lp_oplus_norm(c, 1.0, None)?,
            linf_oplus: lp_oplus_norm(c, f64::INFINITY, None)?,
        })
    }
}
