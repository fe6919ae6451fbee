//! Operator-valued Fourier transform on sampled functions.
//!
//! Conventions:
//!
//! * `f^(pi) = int f(t) pi(t)^* dm(t)`
//! * `f(x) = sum_pi d_pi tr(f^(pi) pi(x))`
//! * `(f * g)(x) = int f(x y^-1) g(y) dm(y)` and `(f * g)^ = g^ f^`
//! * `(R_y f)(x) = f(x y)` and `(R_y f)^(pi) = pi(y) f^(pi)`

use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::group::{GroupDescriptor, GroupPoint, NeighborhoodSpec};
use crate::quadrature::{Exactness, QuadratureRule};
use crate::repr::{enumerate_dual, irrep_matrix, max_shell, CMatrix, Frame, IrrepLabel};

/// Complex samples of a function at the nodes of a quadrature rule.
#[derive(Clone, Debug)]
pub struct SampledFunction {
    rule: Arc<QuadratureRule>,
    values: Vec<Complex64>,
}

impl PartialEq for SampledFunction {
    fn eq(&self, other: &Self) -> bool {
        *self.rule == *other.rule && self.values == other.values
    }
}

impl SampledFunction {
    pub fn new(rule: Arc<QuadratureRule>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != rule.len() {
            return Err(Error::SampleCount {
                expected: rule.len(),
                found: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { rule, values })
    }

    pub fn from_fn(rule: &Arc<QuadratureRule>, f: impl Fn(&GroupPoint) -> Complex64) -> Result<Self> {
        let values = rule.nodes().iter().map(f).collect();
        Self::new(rule.clone(), values)
    }

    /// `c * chi_G`.
    pub fn constant(rule: &Arc<QuadratureRule>, c: Complex64) -> Self {
        Self {
            rule: rule.clone(),
            values: vec![c; rule.len()],
        }
    }

    pub fn rule(&self) -> &Arc<QuadratureRule> {
        &self.rule
    }

    pub fn group(&self) -> &GroupDescriptor {
        self.rule.group()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn same_rule(&self, other: &SampledFunction) -> Result<()> {
        if Arc::ptr_eq(&self.rule, &other.rule) || *self.rule == *other.rule {
            Ok(())
        } else {
            Err(Error::RuleMismatch)
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            rule: self.rule.clone(),
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: Complex64, other: &SampledFunction, b: Complex64) -> Result<Self> {
        self.same_rule(other)?;
        Ok(Self {
            rule: self.rule.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        })
    }

    pub fn sub(&self, other: &SampledFunction) -> Result<Self> {
        self.combine(1.0.into(), other, (-1.0).into())
    }

    /// `int f dm`.
    pub fn mean(&self) -> Complex64 {
        self.rule.integrate(self.values.iter().copied())
    }
}

/// `f^` on the labels of a dual cutoff, one dense block per label.
#[derive(Clone, Debug)]
pub struct FourierCoefficients {
    group: GroupDescriptor,
    cutoff: u32,
    labels: Vec<IrrepLabel>,
    blocks: Vec<CMatrix>,
    l2_mass: Option<f64>,
}

impl FourierCoefficients {
    /// Assembles coefficients; blocks must be square of the label's dimension.
    pub fn from_parts(
        group: GroupDescriptor,
        cutoff: u32,
        labels: Vec<IrrepLabel>,
        blocks: Vec<CMatrix>,
        l2_mass: Option<f64>,
    ) -> Result<Self> {
        if labels.len() != blocks.len() {
            return Err(Error::InvalidParameter("labels and blocks differ in length".into()));
        }
        for (l, b) in labels.iter().zip(&blocks) {
            if l.group() != group {
                return Err(Error::GroupMismatch {
                    expected: group.to_string(),
                    found: l.group().to_string(),
                });
            }
            if l.shell() > cutoff {
                return Err(Error::OutsideCutoff(l.to_string()));
            }
            if b.nrows() != l.dim() || b.ncols() != l.dim() {
                return Err(Error::InvalidParameter(format!(
                    "block for {l} is {}x{}, expected {d}x{d}",
                    b.nrows(),
                    b.ncols(),
                    d = l.dim()
                )));
            }
        }
        Ok(Self {
            group,
            cutoff,
            labels,
            blocks,
            l2_mass,
        })
    }

    pub fn group(&self) -> &GroupDescriptor {
        &self.group
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn labels(&self) -> &[IrrepLabel] {
        &self.labels
    }

    pub fn blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    /// `||f||_2^2` of the transformed function, when known.
    pub fn l2_mass(&self) -> Option<f64> {
        self.l2_mass
    }

    pub fn get(&self, label: &IrrepLabel) -> Option<&CMatrix> {
        self.labels.iter().position(|l| l == label).map(|i| &self.blocks[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&IrrepLabel, &CMatrix)> {
        self.labels.iter().zip(&self.blocks)
    }

    /// Applies `f` to every block, keeping labels.
    pub fn map_blocks(&self, mut f: impl FnMut(&IrrepLabel, &CMatrix) -> CMatrix) -> Self {
        Self {
            group: self.group.clone(),
            cutoff: self.cutoff,
            labels: self.labels.clone(),
            blocks: self.iter().map(|(l, b)| f(l, b)).collect(),
            l2_mass: None,
        }
    }
}

/// Irrep matrices of a dual cutoff cached at the nodes of a rule.
///
/// All transforms with a fixed rule, cutoff and basis frame should go
/// through one `Harmonics` value.
#[derive(Debug)]
pub struct Harmonics {
    rule: Arc<QuadratureRule>,
    cutoff: u32,
    labels: Vec<IrrepLabel>,
    index: HashMap<IrrepLabel, usize>,
    frame: Frame,
    node_reps: Vec<Vec<CMatrix>>,
}

impl Harmonics {
    /// Dual of shell at most `cutoff`, which the rule must cover.
    pub fn new(rule: Arc<QuadratureRule>, cutoff: u32) -> Result<Self> {
        Self::with_frame(rule, cutoff, Frame::canonical())
    }

    /// The largest cutoff the rule supports.
    pub fn full(rule: Arc<QuadratureRule>) -> Result<Self> {
        let cutoff = natural_cutoff(&rule);
        Self::new(rule, cutoff)
    }

    pub fn with_frame(rule: Arc<QuadratureRule>, cutoff: u32, frame: Frame) -> Result<Self> {
        let cutoff = match max_shell(rule.group()) {
            Some(m) => cutoff.min(m),
            None => cutoff,
        };
        rule.require(cutoff)?;
        let labels = enumerate_dual(rule.group(), cutoff);
        let node_reps = labels
            .iter()
            .map(|l| {
                rule.nodes()
                    .iter()
                    .map(|g| frame.irrep_matrix(l, g))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let index = labels.iter().cloned().enumerate().map(|(i, l)| (l, i)).collect();
        Ok(Self {
            rule,
            cutoff,
            labels,
            index,
            frame,
            node_reps,
        })
    }

    /// Same rule and cutoff in another basis frame.
    pub fn reframed(&self, frame: Frame) -> Result<Self> {
        Self::with_frame(self.rule.clone(), self.cutoff, frame)
    }

    pub fn rule(&self) -> &Arc<QuadratureRule> {
        &self.rule
    }

    pub fn group(&self) -> &GroupDescriptor {
        self.rule.group()
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn labels(&self) -> &[IrrepLabel] {
        &self.labels
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn label_index(&self, label: &IrrepLabel) -> Option<usize> {
        self.index.get(label).copied()
    }

    /// `pi(g)` in this frame.
    pub fn rep(&self, label: &IrrepLabel, g: &GroupPoint) -> Result<CMatrix> {
        self.frame.irrep_matrix(label, g)
    }

    /// `pi(node)` for a cached node.
    pub fn node_rep(&self, label_index: usize, node: usize) -> &CMatrix {
        &self.node_reps[label_index][node]
    }

    fn check_rule(&self, f: &SampledFunction) -> Result<()> {
        if Arc::ptr_eq(&self.rule, f.rule()) || *self.rule == **f.rule() {
            Ok(())
        } else {
            Err(Error::RuleMismatch)
        }
    }

    fn check_coeffs(&self, c: &FourierCoefficients) -> Result<()> {
        if c.group() != self.group() {
            return Err(Error::GroupMismatch {
                expected: self.group().to_string(),
                found: c.group().to_string(),
            });
        }
        match c.labels().iter().find(|l| !self.index.contains_key(*l)) {
            Some(l) => Err(Error::OutsideCutoff(l.to_string())),
            None => Ok(()),
        }
    }

    /// `f^(pi) = sum_t w_t f(t) pi(t)^*` for every label of the cutoff.
    pub fn forward(&self, f: &SampledFunction) -> Result<FourierCoefficients> {
        self.check_rule(f)?;
        let weights = self.rule.weights();
        let blocks = self
            .labels
            .iter()
            .enumerate()
            .map(|(li, l)| {
                let d = l.dim();
                let mut acc = CMatrix::zeros(d, d);
                for (t, (v, w)) in f.values().iter().zip(weights).enumerate() {
                    let c = v * *w;
                    if c == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    let p = &self.node_reps[li][t];
                    for i in 0..d {
                        for j in 0..d {
                            acc[(i, j)] += c * p[(j, i)].conj();
                        }
                    }
                }
                acc
            })
            .collect();
        let mass = f.rule().integrate(f.values().iter().map(|v| v.norm_sqr()));
        Ok(FourierCoefficients {
            group: self.group().clone(),
            cutoff: self.cutoff,
            labels: self.labels.clone(),
            blocks,
            l2_mass: Some(mass),
        })
    }

    /// `sum_pi d_pi tr(f^(pi) pi(x))` at arbitrary points.
    pub fn evaluate(&self, c: &FourierCoefficients, points: &[GroupPoint]) -> Result<Vec<Complex64>> {
        self.check_coeffs(c)?;
        points
            .iter()
            .map(|x| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (l, b) in c.iter() {
                    acc += trace_product(b, &self.rep(l, x)?) * l.dim() as f64;
                }
                Ok(acc)
            })
            .collect()
    }

    /// Inverse transform sampled at the rule's own nodes.
    pub fn synthesize(&self, c: &FourierCoefficients) -> Result<SampledFunction> {
        self.check_coeffs(c)?;
        let idx: Vec<usize> = c.labels().iter().map(|l| self.index[l]).collect();
        let values = (0..self.rule.len())
            .map(|t| {
                c.iter()
                    .zip(&idx)
                    .map(|((l, b), li)| trace_product(b, &self.node_reps[*li][t]) * l.dim() as f64)
                    .sum()
            })
            .collect();
        SampledFunction::new(self.rule.clone(), values)
    }

    /// `pi(y) f^(pi)` for every block.
    pub fn translate_spectral(&self, c: &FourierCoefficients, y: &GroupPoint) -> Result<FourierCoefficients> {
        self.group().check(y)?;
        let mut out = Vec::with_capacity(c.blocks().len());
        for (l, b) in c.iter() {
            out.push(self.rep(l, y)? * b);
        }
        Ok(FourierCoefficients {
            group: c.group.clone(),
            cutoff: c.cutoff,
            labels: c.labels.clone(),
            blocks: out,
            l2_mass: c.l2_mass,
        })
    }

    /// `R_y f` at the nodes, computed spectrally; exact for `f` within the cutoff.
    pub fn translate(&self, f: &SampledFunction, y: &GroupPoint) -> Result<SampledFunction> {
        let c = self.forward(f)?;
        self.synthesize(&self.translate_spectral(&c, y)?)
    }
}

/// Largest cutoff a rule can transform exactly.
pub fn natural_cutoff(rule: &QuadratureRule) -> u32 {
    match rule.exactness() {
        Exactness::Complete => max_shell(rule.group()).unwrap_or(0),
        Exactness::Band(b) => b,
    }
}

/// `tr(a b)`.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let d = a.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// Forward transform onto an explicit list of labels.
pub fn forward(f: &SampledFunction, dual: &[IrrepLabel]) -> Result<FourierCoefficients> {
    let group = f.group().clone();
    let cutoff = dual.iter().map(|l| l.shell()).max().unwrap_or(0);
    f.rule().require(cutoff)?;
    let mut blocks = Vec::with_capacity(dual.len());
    for l in dual {
        if l.group() != group {
            return Err(Error::GroupMismatch {
                expected: group.to_string(),
                found: l.group().to_string(),
            });
        }
        let d = l.dim();
        let mut acc = CMatrix::zeros(d, d);
        for ((t, v), w) in f.rule().nodes().iter().zip(f.values()).zip(f.rule().weights()) {
            acc += irrep_matrix(l, t)?.adjoint() * (v * *w);
        }
        blocks.push(acc);
    }
    let mass = f.rule().integrate(f.values().iter().map(|v| v.norm_sqr()));
    FourierCoefficients::from_parts(group, cutoff, dual.to_vec(), blocks, Some(mass))
}

/// Peter-Weyl synthesis at arbitrary points.
pub fn inverse(c: &FourierCoefficients, points: &[GroupPoint]) -> Result<Vec<Complex64>> {
    points
        .iter()
        .map(|x| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (l, b) in c.iter() {
                acc += trace_product(b, &irrep_matrix(l, x)?) * l.dim() as f64;
            }
            Ok(acc)
        })
        .collect()
}

/// `pi(y) f^(pi)` in the canonical basis.
pub fn translate_spectral(c: &FourierCoefficients, y: &GroupPoint) -> Result<FourierCoefficients> {
    c.group().check(y)?;
    let mut blocks = Vec::with_capacity(c.blocks().len());
    for (l, b) in c.iter() {
        blocks.push(irrep_matrix(l, y)? * b);
    }
    Ok(FourierCoefficients {
        group: c.group.clone(),
        cutoff: c.cutoff,
        labels: c.labels.clone(),
        blocks,
        l2_mass: c.l2_mass,
    })
}

/// Node permutation `t -> index(op(t))`, when every image is a node.
fn node_map(rule: &QuadratureRule, op: impl Fn(&GroupPoint) -> Result<GroupPoint>) -> Result<Option<Vec<usize>>> {
    if !rule.is_translation_closed() {
        return Ok(None);
    }
    let mut out = Vec::with_capacity(rule.len());
    for t in rule.nodes() {
        match rule.node_index(&op(t)?) {
            Some(i) => out.push(i),
            None => return Ok(None),
        }
    }
    Ok(Some(out))
}

/// `R_y f`: exact re-indexing when `y` maps nodes to nodes (finite groups,
/// torus grid shifts), otherwise spectral evaluation at the rule's full band.
pub fn translate(f: &SampledFunction, y: &GroupPoint) -> Result<SampledFunction> {
    let rule = f.rule();
    rule.group().check(y)?;
    if let Some(map) = node_map(rule, |x| x.compose(y))? {
        let values = map.iter().map(|i| f.values()[*i]).collect();
        return SampledFunction::new(rule.clone(), values);
    }
    Harmonics::full(rule.clone())?.translate(f, y)
}

/// `(f * g)(x) = sum_y w_y f(x y^-1) g(y)` at every node.
///
/// Node-closed rules re-index `f`; otherwise `f(x y^-1)` is evaluated from
/// its full-band spectrum, which is exact for band-limited `f`.
pub fn convolve(f: &SampledFunction, g: &SampledFunction) -> Result<SampledFunction> {
    f.same_rule(g)?;
    let rule = f.rule();
    let n = rule.len();
    let w = rule.weights();
    let nodes = rule.nodes();
    if rule.is_translation_closed() {
        let mut values = vec![Complex64::new(0.0, 0.0); n];
        let inv: Vec<GroupPoint> = nodes.iter().map(|y| y.inverse()).collect();
        for (xi, x) in nodes.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (yi, yinv) in inv.iter().enumerate() {
                let k = rule
                    .node_index(&x.compose(yinv)?)
                    .ok_or_else(|| Error::InvalidParameter("node set is not translation closed".into()))?;
                acc += f.values()[k] * g.values()[yi] * w[yi];
            }
            values[xi] = acc;
        }
        return SampledFunction::new(rule.clone(), values);
    }
    let h = Harmonics::full(rule.clone())?;
    let fc = h.forward(f)?;
    // f(x y^-1) = sum_pi d tr(f^ pi(x) pi(y)^*) = sum_pi d <f^ pi(x), pi(y)>_F
    let shifted: Vec<Vec<CMatrix>> = (0..n)
        .map(|x| {
            fc.blocks()
                .iter()
                .enumerate()
                .map(|(li, b)| b * h.node_rep(li, x) * Complex64::new(fc.labels()[li].dim() as f64, 0.0))
                .collect()
        })
        .collect();
    let mut values = vec![Complex64::new(0.0, 0.0); n];
    for (x, blocks) in shifted.iter().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for y in 0..n {
            let c = g.values()[y] * w[y];
            if c == Complex64::new(0.0, 0.0) {
                continue;
            }
            let mut fxy = Complex64::new(0.0, 0.0);
            for (li, a) in blocks.iter().enumerate() {
                let p = h.node_rep(li, y);
                fxy += a.iter().zip(p.iter()).map(|(u, v)| u * v.conj()).sum::<Complex64>();
            }
            acc += fxy * c;
        }
        values[x] = acc;
    }
    SampledFunction::new(rule.clone(), values)
}

/// FFT route for `cyclic:N` and one-dimensional torus grids; agrees with
/// [`convolve`] to roundoff.
pub fn convolve_fft(f: &SampledFunction, g: &SampledFunction) -> Result<SampledFunction> {
    f.same_rule(g)?;
    match f.group() {
        GroupDescriptor::Cyclic(_) | GroupDescriptor::Torus(1) => {}
        other => {
            return Err(Error::InvalidParameter(format!(
                "FFT convolution needs cyclic:N or torus:1, not {other}"
            )))
        }
    }
    let n = f.values().len();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let mut a = f.values().to_vec();
    let mut b = g.values().to_vec();
    fwd.process(&mut a);
    fwd.process(&mut b);
    let mut c: Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
    inv.process(&mut c);
    let scale = 1.0 / (n as f64 * n as f64);
    SampledFunction::new(f.rule().clone(), c.into_iter().map(|v| v * scale).collect())
}

/// Normalized indicator of the nodes within `spec.radius` of the identity.
///
/// Normalizing by the quadrature mass of the ball makes `int e_U dm = 1`
/// hold exactly at the discrete level.
pub fn dirac_net_element(rule: &Arc<QuadratureRule>, spec: &NeighborhoodSpec) -> Result<SampledFunction> {
    let e = rule.group().identity();
    let inside: Vec<bool> = rule
        .nodes()
        .iter()
        .map(|t| e.distance(t).map(|d| d <= spec.radius))
        .collect::<Result<_>>()?;
    let mass: f64 = inside
        .iter()
        .zip(rule.weights())
        .filter(|(i, _)| **i)
        .map(|(_, w)| w)
        .sum();
    if mass <= 0.0 {
        return Err(Error::EmptyBall(spec.radius));
    }
    let values = inside
        .iter()
        .map(|i| Complex64::new(if *i { 1.0 / mass } else { 0.0 }, 0.0))
        .collect();
    SampledFunction::new(rule.clone(), values)
}

/// Random function whose spectrum fills every label of `h`, with unit
/// expected `L2` norm.
pub fn random_band_limited<R: Rng + ?Sized>(h: &Harmonics, rng: &mut R) -> Result<SampledFunction> {
    let total: usize = h.labels().iter().map(|l| l.dim().pow(3)).sum();
    let scale = 1.0 / (2.0 * total as f64).sqrt();
    let blocks: Vec<CMatrix> = h
        .labels()
        .iter()
        .map(|l| {
            CMatrix::from_fn(l.dim(), l.dim(), |_, _| {
                Complex64::new(
                    rng.sample::<f64, _>(StandardNormal),
                    rng.sample::<f64, _>(StandardNormal),
                ) * scale
            })
        })
        .collect();
    let c = FourierCoefficients::from_parts(h.group().clone(), h.cutoff(), h.labels().to_vec(), blocks, None)?;
    h.synthesize(&c)
}

/// `y -> R_y f` for many `y`: re-indexing on node-closed rules, otherwise
/// synthesis from one cached spectrum.
pub struct Translator<'a> {
    h: &'a Harmonics,
    f: &'a SampledFunction,
    spectrum: Option<FourierCoefficients>,
}

impl<'a> Translator<'a> {
    pub fn new(h: &'a Harmonics, f: &'a SampledFunction) -> Result<Self> {
        let spectrum = if f.rule().is_translation_closed() {
            None
        } else {
            Some(h.forward(f)?)
        };
        Ok(Self { h, f, spectrum })
    }

    pub fn apply(&self, y: &GroupPoint) -> Result<SampledFunction> {
        match &self.spectrum {
            Some(c) => self.h.synthesize(&self.h.translate_spectral(c, y)?),
            None => translate_using(self.h, self.f, y),
        }
    }
}

/// `sum_pi d_pi e^{-lambda_pi t} chi_pi` over the labels of `h`.
pub fn heat_kernel(h: &Harmonics, t: f64) -> Result<SampledFunction> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("heat time {t} must be positive")));
    }
    let blocks = h
        .labels()
        .iter()
        .map(|l| CMatrix::identity(l.dim(), l.dim()) * Complex64::new((-l.laplace_eigenvalue() * t).exp(), 0.0))
        .collect();
    let c = FourierCoefficients::from_parts(h.group().clone(), h.cutoff(), h.labels().to_vec(), blocks, None)?;
    h.synthesize(&c)
}

/// `R_y f` through `h` when the nodes are not closed under translation.
pub fn translate_using(h: &Harmonics, f: &SampledFunction, y: &GroupPoint) -> Result<SampledFunction> {
    let rule = f.rule();
    rule.group().check(y)?;
    if let Some(map) = node_map(rule, |x| x.compose(y))? {
        let values = map.iter().map(|i| f.values()[*i]).collect();
        return SampledFunction::new(rule.clone(), values);
    }
    h.translate(f, y)
}
