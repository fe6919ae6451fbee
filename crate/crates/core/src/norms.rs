//! Schatten norms, `L^p` norms of samples and `l^p`-direct-sum norms of
//! Fourier coefficients.

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::fourier::{FourierCoefficients, Harmonics, SampledFunction};
use crate::repr::{max_shell, CMatrix, DualSubset, IrrepLabel};

/// Relative size below which the mass beyond a cutoff is treated as roundoff.
pub const BEYOND_CUTOFF_FLOOR: f64 = 1e-12;

/// Clamps larger than this are reported.
pub const CLAMP_REPORT: f64 = 1e-12;

/// Additive slack of the Hausdorff-Young checks.
pub const HY_SLACK: f64 = 1e-10;

fn check_exponent(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        Err(Error::InvalidExponent(p))
    } else {
        Ok(())
    }
}

/// Singular values, largest first.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 1 && m.ncols() == 1 {
        return vec![m[(0, 0)].norm()];
    }
    let mut s: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// `(tr |M|^p)^(1/p)`; `p = inf` is the operator norm.
pub fn schatten_norm(m: &CMatrix, p: f64) -> Result<f64> {
    check_exponent(p)?;
    if p == 2.0 {
        return Ok(m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt());
    }
    let s = singular_values(m);
    if p.is_infinite() {
        return Ok(s.first().copied().unwrap_or(0.0));
    }
    if p == 1.0 {
        return Ok(s.iter().sum());
    }
    let top = s.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return Ok(0.0);
    }
    Ok(top * s.iter().map(|x| (x / top).powf(p)).sum::<f64>().powf(1.0 / p))
}

/// Operator norm.
pub fn operator_norm(m: &CMatrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Serializes `f64::INFINITY` as `"inf"`.
pub fn serialize_exponent<S: Serializer>(p: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if p.is_infinite() {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*p)
    }
}

/// `p` in `[1, 2]` with its conjugate `p' = p / (p - 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExponentPair {
    pub p: f64,
    #[serde(rename = "p_conj", serialize_with = "serialize_exponent")]
    pub conj: f64,
}

impl ExponentPair {
    pub fn new(p: f64) -> Result<Self> {
        if !(1.0..=2.0).contains(&p) {
            return Err(Error::InvalidExponent(p));
        }
        let conj = if p == 1.0 { f64::INFINITY } else { p / (p - 1.0) };
        Ok(Self { p, conj })
    }
}

/// Which labels a norm was taken over.
#[derive(Clone, Debug, PartialEq)]
pub enum NormSubset {
    All,
    Labels(Vec<String>),
}

impl Serialize for NormSubset {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            NormSubset::All => s.serialize_str("all"),
            NormSubset::Labels(l) => l.serialize(s),
        }
    }
}

/// A norm value with what it was computed over.
///
/// `truncated` marks values that only see labels inside the coefficients'
/// cutoff while the dual extends beyond it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormReport {
    #[serde(serialize_with = "serialize_exponent")]
    pub p: f64,
    pub subset: NormSubset,
    pub value: f64,
    pub truncated: bool,
}

/// True when the cutoff leaves part of the dual out.
pub fn is_cutoff_truncated(c: &FourierCoefficients) -> bool {
    match max_shell(c.group()) {
        Some(m) => c.cutoff() < m,
        None => true,
    }
}

fn oplus(terms: impl Iterator<Item = (usize, f64)>, p: f64) -> f64 {
    if p.is_infinite() {
        return terms.map(|(_, n)| n).fold(0.0, f64::max);
    }
    let terms: Vec<(usize, f64)> = terms.collect();
    let top = terms.iter().map(|t| t.1).fold(0.0, f64::max);
    if top == 0.0 {
        return 0.0;
    }
    top * terms
        .iter()
        .map(|(d, n)| *d as f64 * (n / top).powf(p))
        .sum::<f64>()
        .powf(1.0 / p)
}

/// `(sum_{pi in subset} d_pi ||f^(pi)||_{B_p}^p)^(1/p)`; `None` means every
/// computed label, and `p = inf` gives the sup of operator norms.
pub fn lp_oplus_norm(c: &FourierCoefficients, p: f64, subset: Option<&DualSubset>) -> Result<NormReport> {
    check_exponent(p)?;
    let (labels, subset_report): (Vec<&IrrepLabel>, NormSubset) = match subset {
        None => (c.labels().iter().collect(), NormSubset::All),
        Some(s) => {
            if let Some(l) = s.iter().find(|l| c.get(l).is_none()) {
                return Err(Error::OutsideCutoff(l.to_string()));
            }
            (s.iter().collect(), NormSubset::Labels(s.names()))
        }
    };
    let norms = labels
        .iter()
        .map(|l| Ok((l.dim(), schatten_norm(c.get(l).expect("checked"), p)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(NormReport {
        p,
        subset: subset_report,
        value: oplus(norms.into_iter(), p),
        truncated: subset.is_none() && is_cutoff_truncated(c),
    })
}

/// `l^p` norm of the blocks whose labels satisfy `keep`.
pub fn lp_oplus_where(c: &FourierCoefficients, p: f64, keep: impl Fn(&IrrepLabel) -> bool) -> Result<f64> {
    check_exponent(p)?;
    let norms = c
        .iter()
        .filter(|(l, _)| keep(l))
        .map(|(l, b)| Ok((l.dim(), schatten_norm(b, p)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(oplus(norms.into_iter(), p))
}

/// `(sum_t w_t |f(t)|^p)^(1/p)`; `p = inf` is the max over nodes.
pub fn lp_function_norm(f: &SampledFunction, p: f64) -> Result<f64> {
    check_exponent(p)?;
    let abs = f.values().iter().map(|v| v.norm());
    if p.is_infinite() {
        return Ok(abs.fold(0.0, f64::max));
    }
    if p == 2.0 {
        return Ok(f.rule().integrate(f.values().iter().map(|v| v.norm_sqr())).sqrt());
    }
    let top = f.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
    if top == 0.0 {
        return Ok(0.0);
    }
    Ok(top * f.rule().integrate(abs.map(|a| (a / top).powf(p))).powf(1.0 / p))
}

/// `l^2` tail over the complement of `A`, with its roundoff bookkeeping.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Residual {
    pub value: f64,
    /// Squared mass the Plancherel identity attributes to labels beyond the cutoff.
    pub beyond_cutoff: f64,
    /// Magnitude of a negative roundoff value clamped to zero, when above [`CLAMP_REPORT`].
    pub clamped: Option<f64>,
}

/// `sqrt(||f||_2^2 - sum_{pi in A} d_pi ||f^(pi)||_2^2)`.
///
/// Labels of the cutoff outside `A` are summed directly; the part beyond the
/// cutoff comes from Plancherel and is dropped when smaller than
/// [`BEYOND_CUTOFF_FLOOR`] relative to `||f||_2^2`.
pub fn plancherel_residual_detail(f: &SampledFunction, c: &FourierCoefficients, a: &DualSubset) -> Result<Residual> {
    if let Some(l) = a.iter().find(|l| c.get(l).is_none()) {
        return Err(Error::OutsideCutoff(l.to_string()));
    }
    let total = f.rule().integrate(f.values().iter().map(|v| v.norm_sqr()));
    let hs = |l: &IrrepLabel, b: &CMatrix| l.dim() as f64 * b.iter().map(|z| z.norm_sqr()).sum::<f64>();
    let mut inside = 0.0;
    let mut outside = 0.0;
    for (l, b) in c.iter() {
        if a.contains(l) {
            inside += hs(l, b);
        } else {
            outside += hs(l, b);
        }
    }
    let mut beyond = total - inside - outside;
    let mut clamped = None;
    if beyond.abs() <= BEYOND_CUTOFF_FLOOR * total.max(f64::MIN_POSITIVE) || !is_cutoff_truncated(c) {
        beyond = 0.0;
    } else if beyond < 0.0 {
        if -beyond > CLAMP_REPORT {
            clamped = Some(-beyond);
        }
        beyond = 0.0;
    }
    Ok(Residual {
        value: (outside + beyond).max(0.0).sqrt(),
        beyond_cutoff: beyond,
        clamped,
    })
}

pub fn plancherel_residual(f: &SampledFunction, c: &FourierCoefficients, a: &DualSubset) -> Result<f64> {
    plancherel_residual_detail(f, c, a).map(|r| r.value)
}

/// One side-by-side inequality `lhs <= rhs + slack`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Inequality {
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
}

impl Inequality {
    pub fn new(lhs: f64, rhs: f64, slack: f64) -> Self {
        Self {
            lhs,
            rhs,
            satisfied: lhs <= rhs + slack,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HausdorffYoung {
    pub pair: ExponentPair,
    /// `||f^||_{l^p'} <= ||f||_p`
    pub forward: Inequality,
    /// `||f||_p' <= ||f^||_{l^p}`
    pub reverse: Inequality,
}

impl HausdorffYoung {
    pub fn satisfied(&self) -> bool {
        self.forward.satisfied && self.reverse.satisfied
    }
}

/// Both Hausdorff-Young directions over the rule's full band.
pub fn hausdorff_young_check(f: &SampledFunction, pair: ExponentPair) -> Result<HausdorffYoung> {
    let h = Harmonics::full(f.rule().clone())?;
    hausdorff_young_with(&h, f, pair)
}

/// Both Hausdorff-Young directions using the labels of `h`.
pub fn hausdorff_young_with(h: &Harmonics, f: &SampledFunction, pair: ExponentPair) -> Result<HausdorffYoung> {
    let c = h.forward(f)?;
    let fwd = Inequality::new(
        lp_oplus_norm(&c, pair.conj, None)?.value,
        lp_function_norm(f, pair.p)?,
        HY_SLACK,
    );
    let rev = Inequality::new(
        lp_function_norm(f, pair.conj)?,
        lp_oplus_norm(&c, pair.p, None)?.value,
        HY_SLACK,
    );
    Ok(HausdorffYoung {
        pair,
        forward: fwd,
        reverse: rev,
    })
}
