//! Finite samples of function families, built-in and from JSON files.

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{heat_kernel, FourierCoefficients, Harmonics, SampledFunction};
use crate::group::GroupDescriptor;
use crate::io::{FunctionSpec, SCHEMA_VERSION};
use crate::norms::lp_function_norm;
use crate::quadrature::{haar_quadrature, QuadratureRule};
use crate::repr::{max_shell, CMatrix};

/// Parameters of the built-in family constructors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilyKind {
    /// `{(r / n) chi_G : n = 1..count}`
    ScaledConstants { r: f64, count: usize },
    /// `{n chi_G : n = 1..count}`
    IntegerConstants { count: usize },
    /// Random combinations of matrix entries with shell at most `max_shell`
    /// and `L2` norm at most `bound`.
    MatrixEntrySpan { max_shell: u32, bound: f64, count: usize },
    /// `{e^{i n theta_1} : n = 1..count}` on a torus.
    CharacterLadder { count: usize },
    /// Heat kernels at `count` times spaced evenly in `[t_min, t_max]`.
    HeatKernel { t_min: f64, t_max: f64, count: usize },
    /// Random functions with shell at most `band` and `L2` norm at most `radius`.
    RandomBall { radius: f64, band: u32, count: usize },
    /// Members given as function specs such as `char:3`.
    Explicit { members: Vec<String> },
}

impl FamilyKind {
    pub fn name(&self) -> &'static str {
        match self {
            FamilyKind::ScaledConstants { .. } => "scaled_constants",
            FamilyKind::IntegerConstants { .. } => "integer_constants",
            FamilyKind::MatrixEntrySpan { .. } => "matrix_entry_span",
            FamilyKind::CharacterLadder { .. } => "character_ladder",
            FamilyKind::HeatKernel { .. } => "heat_kernel",
            FamilyKind::RandomBall { .. } => "random_ball",
            FamilyKind::Explicit { .. } => "explicit",
        }
    }

    fn is_generator(&self) -> bool {
        !matches!(self, FamilyKind::Explicit { .. })
    }
}

/// A family definition file, or the resolved form written back to reports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyDefinition {
    #[serde(default = "default_schema")]
    pub schema_version: u32,
    pub name: String,
    pub group: GroupDescriptor,
    #[serde(flatten)]
    pub kind: FamilyKind,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<u32>,
    /// Largest shell of the dual filtration.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<u32>,
}

fn default_schema() -> u32 {
    SCHEMA_VERSION
}

impl FamilyDefinition {
    pub fn new(name: impl Into<String>, group: GroupDescriptor, kind: FamilyKind) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            name: name.into(),
            group,
            kind,
            seed: 0,
            resolution: None,
            cutoff: None,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_resolution(mut self, r: u32) -> Self {
        self.resolution = Some(r);
        self
    }

    pub fn with_cutoff(mut self, c: u32) -> Self {
        self.cutoff = Some(c);
        self
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let d: FamilyDefinition = serde_json::from_str(text)?;
        if d.schema_version != SCHEMA_VERSION {
            return Err(Error::Parse(format!("unsupported schema_version {}", d.schema_version)));
        }
        d.group.validate()?;
        Ok(d)
    }

    pub fn build(&self) -> Result<FamilySpec> {
        builtin_family(self)
    }
}

/// Default band of a rule for continuous groups, kept small enough that
/// full-band harmonics stay cheap.
pub fn default_band(group: &GroupDescriptor) -> u32 {
    match group {
        GroupDescriptor::Cyclic(_) | GroupDescriptor::Dihedral(_) => 0,
        GroupDescriptor::Torus(1) => 16,
        GroupDescriptor::Torus(2) => 8,
        GroupDescriptor::Torus(_) => 3,
        GroupDescriptor::Su2 => 6,
        GroupDescriptor::Product(fs) => fs.iter().map(default_band).max().unwrap_or(0).min(4),
    }
}

/// A finite sample of a family, with every member's full-band spectrum.
#[derive(Debug)]
pub struct FamilySpec {
    pub definition: FamilyDefinition,
    harmonics: Arc<Harmonics>,
    cutoff: u32,
    members: Vec<SampledFunction>,
    member_names: Vec<String>,
    spectra: Vec<FourierCoefficients>,
    declared_bound: Option<f64>,
}

impl FamilySpec {
    /// Assembles a family from members on one rule; `cutoff` bounds the dual
    /// filtration and must not exceed the rule's band.
    pub fn from_members(
        definition: FamilyDefinition,
        harmonics: Arc<Harmonics>,
        cutoff: u32,
        members: Vec<SampledFunction>,
        member_names: Vec<String>,
        declared_bound: Option<f64>,
    ) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidParameter(format!(
                "family `{}` has no members",
                definition.name
            )));
        }
        if cutoff > harmonics.cutoff() {
            return Err(Error::ResolutionTooSmall {
                resolution: harmonics.rule().resolution(),
                reason: format!(
                    "filtration cutoff {cutoff} exceeds the rule's band {}",
                    harmonics.cutoff()
                ),
            });
        }
        let spectra = members
            .iter()
            .map(|f| harmonics.forward(f))
            .collect::<Result<Vec<_>>>()?;
        let mut definition = definition;
        definition.resolution = Some(harmonics.rule().resolution());
        definition.cutoff = Some(cutoff);
        Ok(Self {
            definition,
            harmonics,
            cutoff,
            members,
            member_names,
            spectra,
            declared_bound,
        })
    }

    pub fn name(&self) -> &str {
        &self.definition.name
    }

    pub fn group(&self) -> &GroupDescriptor {
        self.harmonics.group()
    }

    pub fn rule(&self) -> &Arc<QuadratureRule> {
        self.harmonics.rule()
    }

    /// Harmonics at the rule's full band.
    pub fn harmonics(&self) -> &Arc<Harmonics> {
        &self.harmonics
    }

    /// Largest shell available to dual filtrations.
    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn members(&self) -> &[SampledFunction] {
        &self.members
    }

    pub fn member_names(&self) -> &[String] {
        &self.member_names
    }

    pub fn spectra(&self) -> &[FourierCoefficients] {
        &self.spectra
    }

    pub fn declared_bound(&self) -> Option<f64> {
        self.declared_bound
    }

    /// Generated families are finite samples of infinite ones.
    pub fn is_sampled(&self) -> bool {
        self.definition.kind.is_generator()
    }

    /// Replaces every member by `R_g f`.
    pub fn translated(&self, g: &crate::group::GroupPoint) -> Result<FamilySpec> {
        let members = self
            .members
            .iter()
            .map(|f| crate::fourier::translate_using(&self.harmonics, f, g))
            .collect::<Result<Vec<_>>>()?;
        FamilySpec::from_members(
            self.definition.clone(),
            self.harmonics.clone(),
            self.cutoff,
            members,
            self.member_names.clone(),
            self.declared_bound,
        )
    }
}

fn rule_for(def: &FamilyDefinition, min_band: u32) -> Result<Arc<QuadratureRule>> {
    let rule = match def.resolution {
        Some(r) => haar_quadrature(&def.group, r)?,
        None => QuadratureRule::for_band(&def.group, default_band(&def.group).max(min_band))?,
    };
    rule.require(min_band)?;
    Ok(Arc::new(rule))
}

fn random_unit_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

/// Random members `sum_{shell(pi) <= band} d_pi tr(c_pi pi(x))` with
/// `||f||_2 = radius * u`, `u` uniform on `(0, 1]`.
fn random_span(h: &Harmonics, band: u32, radius: f64, count: usize, seed: u64) -> Result<Vec<SampledFunction>> {
    let labels: Vec<_> = h.labels().iter().filter(|l| l.shell() <= band).cloned().collect();
    let dim: usize = labels.iter().map(|l| l.dim() * l.dim()).sum();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let v = random_unit_vector(&mut rng, dim);
            let scale = radius * (1.0 - rng.random::<f64>());
            let mut at = 0;
            let blocks: Vec<CMatrix> = labels
                .iter()
                .map(|l| {
                    let d = l.dim();
                    // ||f||_2^2 = sum d ||c||^2, so c = v / sqrt(d) keeps the unit norm
                    let b = CMatrix::from_fn(d, d, |i, j| v[at + i * d + j] * scale / (d as f64).sqrt());
                    at += d * d;
                    b
                })
                .collect();
            let c = FourierCoefficients::from_parts(h.group().clone(), band, labels.clone(), blocks, None)?;
            h.synthesize(&c)
        })
        .collect()
}

fn require_count(count: usize) -> Result<()> {
    if count == 0 {
        Err(Error::InvalidParameter("family count must be >= 1".into()))
    } else {
        Ok(())
    }
}

/// Builds the members of a family definition.
pub fn builtin_family(def: &FamilyDefinition) -> Result<FamilySpec> {
    def.group.validate()?;
    let finite_top = max_shell(&def.group);
    let clip = |c: u32| finite_top.map_or(c, |m| c.min(m));
    match &def.kind {
        FamilyKind::ScaledConstants { r, count } => {
            require_count(*count)?;
            if !r.is_finite() {
                return Err(Error::InvalidParameter(format!("r = {r}")));
            }
            let rule = rule_for(def, 0)?;
            let h = Arc::new(Harmonics::full(rule.clone())?);
            let members = (1..=*count)
                .map(|n| SampledFunction::constant(&rule, Complex64::new(r / n as f64, 0.0)))
                .collect();
            let names = (1..=*count).map(|n| format!("n={n}")).collect();
            let cutoff = def.cutoff.unwrap_or(h.cutoff());
            FamilySpec::from_members(def.clone(), h, clip(cutoff), members, names, Some(r.abs()))
        }
        FamilyKind::IntegerConstants { count } => {
            require_count(*count)?;
            let rule = rule_for(def, 0)?;
            let h = Arc::new(Harmonics::full(rule.clone())?);
            let members = (1..=*count)
                .map(|n| SampledFunction::constant(&rule, Complex64::new(n as f64, 0.0)))
                .collect();
            let names = (1..=*count).map(|n| format!("n={n}")).collect();
            let cutoff = def.cutoff.unwrap_or(h.cutoff());
            FamilySpec::from_members(def.clone(), h, clip(cutoff), members, names, None)
        }
        FamilyKind::MatrixEntrySpan {
            max_shell,
            bound,
            count,
        } => {
            require_count(*count)?;
            if !(*bound > 0.0) || !bound.is_finite() {
                return Err(Error::InvalidParameter(format!("bound = {bound}")));
            }
            let shell = clip(*max_shell);
            let rule = rule_for(def, shell)?;
            let h = Arc::new(Harmonics::full(rule)?);
            let members = random_span(&h, shell, *bound, *count, def.seed)?;
            let names = (0..*count).map(|i| format!("#{i}")).collect();
            let cutoff = def.cutoff.unwrap_or(h.cutoff());
            FamilySpec::from_members(def.clone(), h, clip(cutoff), members, names, Some(*bound))
        }
        FamilyKind::RandomBall { radius, band, count } => {
            require_count(*count)?;
            if !(*radius > 0.0) || !radius.is_finite() {
                return Err(Error::InvalidParameter(format!("radius = {radius}")));
            }
            let band = clip(*band);
            let rule = rule_for(def, band)?;
            let h = Arc::new(Harmonics::full(rule)?);
            let members = random_span(&h, band, *radius, *count, def.seed)?;
            let names = (0..*count).map(|i| format!("#{i}")).collect();
            let cutoff = def.cutoff.unwrap_or(h.cutoff());
            FamilySpec::from_members(def.clone(), h, clip(cutoff), members, names, Some(*radius))
        }
        FamilyKind::CharacterLadder { count } => {
            require_count(*count)?;
            let GroupDescriptor::Torus(n) = def.group else {
                return Err(Error::InvalidGroup(format!(
                    "character_ladder needs a torus, not {}",
                    def.group
                )));
            };
            let top = *count as u32;
            let rule = match def.resolution {
                Some(r) => Arc::new(haar_quadrature(&def.group, r)?),
                None => Arc::new(QuadratureRule::for_band(&def.group, top)?),
            };
            rule.require(top)?;
            let h = Arc::new(Harmonics::full(rule.clone())?);
            let members = (1..=top)
                .map(|k| {
                    let mut freq = vec![0i64; n as usize];
                    freq[0] = k as i64;
                    FunctionSpec::Character(crate::repr::IrrepLabel::Torus(freq)).sample(&h)
                })
                .collect::<Result<Vec<_>>>()?;
            let names = (1..=top).map(|k| format!("n={k}")).collect();
            let cutoff = def.cutoff.unwrap_or(top / 2);
            FamilySpec::from_members(def.clone(), h, cutoff, members, names, None)
        }
        FamilyKind::HeatKernel { t_min, t_max, count } => {
            require_count(*count)?;
            if !(*t_min > 0.0) || !(t_max >= t_min) || !t_max.is_finite() {
                return Err(Error::InvalidParameter(format!("heat times [{t_min}, {t_max}]")));
            }
            let rule = rule_for(def, 0)?;
            let h = Arc::new(Harmonics::full(rule)?);
            let times: Vec<f64> = (0..*count)
                .map(|i| {
                    if *count == 1 {
                        *t_min
                    } else {
                        t_min + (t_max - t_min) * i as f64 / (*count - 1) as f64
                    }
                })
                .collect();
            let members = times.iter().map(|t| heat_kernel(&h, *t)).collect::<Result<Vec<_>>>()?;
            let names = times.iter().map(|t| format!("t={t}")).collect();
            let cutoff = def.cutoff.unwrap_or(h.cutoff());
            FamilySpec::from_members(def.clone(), h, clip(cutoff), members, names, None)
        }
        FamilyKind::Explicit { members } => {
            if members.is_empty() {
                return Err(Error::InvalidParameter("explicit family has no members".into()));
            }
            let specs = members
                .iter()
                .map(|s| FunctionSpec::parse(&def.group, s))
                .collect::<Result<Vec<_>>>()?;
            let need = specs.iter().filter_map(FunctionSpec::shell).max().unwrap_or(0);
            let rule = rule_for(def, clip(need))?;
            let h = Arc::new(Harmonics::full(rule)?);
            let sampled = specs.iter().map(|s| s.sample(&h)).collect::<Result<Vec<_>>>()?;
            let cutoff = def.cutoff.unwrap_or(h.cutoff());
            FamilySpec::from_members(def.clone(), h, clip(cutoff), sampled, members.clone(), None)
        }
    }
}

/// `sup ||f||_2` over the sample and whether the family looks bounded.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Boundedness {
    pub sup_norm: f64,
    pub flag: bool,
    /// `declared_bound` or `growth_trend`.
    pub method: &'static str,
    pub members_sampled: usize,
    /// Prefix suprema at a quarter, half and all of the sample.
    pub prefix_sups: Vec<f64>,
}

/// Growth factor per doubling of the sample that signals an unbounded trend.
pub const GROWTH_TREND: f64 = 1.5;

/// With a declared bound the flag checks it; otherwise the family is flagged
/// unbounded when the running supremum grows by [`GROWTH_TREND`] at each of
/// the last two doublings of the sample.
pub fn boundedness(k: &FamilySpec) -> Result<Boundedness> {
    let norms = k
        .members()
        .iter()
        .map(|f| lp_function_norm(f, 2.0))
        .collect::<Result<Vec<_>>>()?;
    let n = norms.len();
    let prefix = |m: usize| norms[..m.max(1)].iter().copied().fold(0.0, f64::max);
    let prefix_sups = vec![prefix(n / 4), prefix(n / 2), prefix(n)];
    let sup_norm = prefix_sups[2];
    let (flag, method) = match k.declared_bound() {
        Some(b) => (sup_norm <= b * (1.0 + 1e-12) + 1e-12, "declared_bound"),
        None => {
            let growing = n >= 4
                && prefix_sups[1] >= GROWTH_TREND * prefix_sups[0]
                && prefix_sups[2] >= GROWTH_TREND * prefix_sups[1];
            (!growing, "growth_trend")
        }
    };
    Ok(Boundedness {
        sup_norm,
        flag,
        method,
        members_sampled: n,
        prefix_sups,
    })
}
