//! The unitary dual up to a cutoff and matrix-valued irreducible
//! representations.
//!
//! Labels are ordered by *shell* and then by a per-family tie-break; this
//! canonical order drives every filtration and tail sum.
//!
//! | group      | label              | dim    | shell                       |
//! |------------|--------------------|--------|-----------------------------|
//! | `cyclic:N` | `chi:k`            | 1      | `min(k, N - k)`             |
//! | `torus:n`  | `torus:[k1,..]`    | 1      | `max |k_i|`                 |
//! | `dihedral` | `dihedral:<name>`  | 1 or 2 | 0 triv, 1 other 1-dim, `1 + j` for `rho<j>` |
//! | `su2`      | `wigner:2l`        | 2l + 1 | `2l`                        |
//! | product    | `(a,b,..)`         | product| max over factors            |
//!
//! The trivial representation of every non-product group prints as `triv`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::fourier::SampledFunction;
use crate::group::{split_top_level, GroupDescriptor, GroupPoint, Quaternion};
use crate::quadrature::QuadratureRule;

pub type CMatrix = DMatrix<Complex64>;

/// One-dimensional and planar irreps of the dihedral group `D_N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DihedralIrrep {
    Trivial,
    /// `s -> -1`, `r -> 1`.
    Sign,
    /// `r -> -1`, `s -> 1`; only for even `N`.
    Alternating,
    /// `r -> -1`, `s -> -1`; only for even `N`.
    AlternatingSign,
    /// `r -> diag(w^j, w^-j)`, `s -> [[0, 1], [1, 0]]`, `w = exp(2 pi i / N)`.
    Planar(u32),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum IrrepLabel {
    Cyclic {
        order: u32,
        k: u32,
    },
    Dihedral {
        order: u32,
        kind: DihedralIrrep,
    },
    Torus(Vec<i64>),
    /// Spin `l = two_l / 2`.
    Su2 {
        two_l: u32,
    },
    Product(Vec<IrrepLabel>),
}

impl IrrepLabel {
    pub fn trivial(group: &GroupDescriptor) -> IrrepLabel {
        match group {
            GroupDescriptor::Cyclic(n) => IrrepLabel::Cyclic { order: *n, k: 0 },
            GroupDescriptor::Dihedral(n) => IrrepLabel::Dihedral {
                order: *n,
                kind: DihedralIrrep::Trivial,
            },
            GroupDescriptor::Torus(n) => IrrepLabel::Torus(vec![0; *n as usize]),
            GroupDescriptor::Su2 => IrrepLabel::Su2 { two_l: 0 },
            GroupDescriptor::Product(fs) => IrrepLabel::Product(fs.iter().map(IrrepLabel::trivial).collect()),
        }
    }

    pub fn group(&self) -> GroupDescriptor {
        match self {
            IrrepLabel::Cyclic { order, .. } => GroupDescriptor::Cyclic(*order),
            IrrepLabel::Dihedral { order, .. } => GroupDescriptor::Dihedral(*order),
            IrrepLabel::Torus(k) => GroupDescriptor::Torus(k.len() as u32),
            IrrepLabel::Su2 { .. } => GroupDescriptor::Su2,
            IrrepLabel::Product(ls) => GroupDescriptor::Product(ls.iter().map(|l| l.group()).collect()),
        }
    }

    /// `d_pi`.
    pub fn dim(&self) -> usize {
        match self {
            IrrepLabel::Cyclic { .. } | IrrepLabel::Torus(_) => 1,
            IrrepLabel::Dihedral { kind, .. } => match kind {
                DihedralIrrep::Planar(_) => 2,
                _ => 1,
            },
            IrrepLabel::Su2 { two_l } => *two_l as usize + 1,
            IrrepLabel::Product(ls) => ls.iter().map(|l| l.dim()).product(),
        }
    }

    pub fn shell(&self) -> u32 {
        match self {
            IrrepLabel::Cyclic { order, k } => (*k).min(order - k),
            IrrepLabel::Torus(k) => k.iter().map(|x| x.unsigned_abs() as u32).max().unwrap_or(0),
            IrrepLabel::Dihedral { kind, .. } => match kind {
                DihedralIrrep::Trivial => 0,
                DihedralIrrep::Planar(j) => 1 + j,
                _ => 1,
            },
            IrrepLabel::Su2 { two_l } => *two_l,
            IrrepLabel::Product(ls) => ls.iter().map(|l| l.shell()).max().unwrap_or(0),
        }
    }

    pub fn is_trivial(&self) -> bool {
        *self == IrrepLabel::trivial(&self.group())
    }

    /// Heat-kernel rate: `|k|^2` on tori, `l(l+1)` on SU(2), `shell^2` on
    /// finite groups, summed over product factors.
    pub fn laplace_eigenvalue(&self) -> f64 {
        match self {
            IrrepLabel::Torus(k) => k.iter().map(|x| (x * x) as f64).sum(),
            IrrepLabel::Su2 { two_l } => {
                let l = *two_l as f64 / 2.0;
                l * (l + 1.0)
            }
            IrrepLabel::Product(ls) => ls.iter().map(|l| l.laplace_eigenvalue()).sum(),
            _ => (self.shell() as f64).powi(2),
        }
    }

    fn tie_break(&self, out: &mut Vec<i64>) {
        match self {
            IrrepLabel::Cyclic { order, k } => out.push(if 2 * k <= *order { 0 } else { 1 }),
            IrrepLabel::Torus(k) => out.extend(k.iter().copied()),
            IrrepLabel::Dihedral { kind, .. } => out.push(match kind {
                DihedralIrrep::Trivial => 0,
                DihedralIrrep::Sign => 1,
                DihedralIrrep::Alternating => 2,
                DihedralIrrep::AlternatingSign => 3,
                DihedralIrrep::Planar(j) => 4 + *j as i64,
            }),
            IrrepLabel::Su2 { .. } => {}
            IrrepLabel::Product(ls) => {
                for l in ls {
                    out.push(l.shell() as i64);
                    l.tie_break(out);
                }
            }
        }
    }

    fn sort_key(&self) -> (u32, Vec<i64>) {
        let mut v = Vec::new();
        self.tie_break(&mut v);
        (self.shell(), v)
    }

    /// Parses a label string in the context of `group`.
    ///
    /// Besides the canonical forms, `chi:k` is accepted on `torus:1`,
    /// `wigner:2l` on SU(2), and `2dim` names the first planar dihedral irrep.
    pub fn parse(group: &GroupDescriptor, s: &str) -> Result<IrrepLabel> {
        let s = s.trim();
        let bad = || Error::Parse(format!("`{s}` is not an irrep label of {group}"));
        if s == "triv" {
            return Ok(IrrepLabel::trivial(group));
        }
        let label = match group {
            GroupDescriptor::Cyclic(n) => {
                let k: i64 = s.strip_prefix("chi:").ok_or_else(bad)?.parse().map_err(|_| bad())?;
                IrrepLabel::Cyclic {
                    order: *n,
                    k: k.rem_euclid(*n as i64) as u32,
                }
            }
            GroupDescriptor::Torus(n) => {
                if let Some(rest) = s.strip_prefix("chi:") {
                    if *n != 1 {
                        return Err(bad());
                    }
                    IrrepLabel::Torus(vec![rest.parse().map_err(|_| bad())?])
                } else {
                    let inner = s
                        .strip_prefix("torus:[")
                        .and_then(|r| r.strip_suffix(']'))
                        .ok_or_else(bad)?;
                    let ks = inner
                        .split(',')
                        .map(|x| x.trim().parse::<i64>().map_err(|_| bad()))
                        .collect::<Result<Vec<_>>>()?;
                    if ks.len() != *n as usize {
                        return Err(bad());
                    }
                    IrrepLabel::Torus(ks)
                }
            }
            GroupDescriptor::Su2 => {
                let two_l = s.strip_prefix("wigner:").ok_or_else(bad)?.parse().map_err(|_| bad())?;
                IrrepLabel::Su2 { two_l }
            }
            GroupDescriptor::Dihedral(n) => {
                let name = s.strip_prefix("dihedral:").unwrap_or(s);
                let kind = match name {
                    "triv" => DihedralIrrep::Trivial,
                    "sign" => DihedralIrrep::Sign,
                    "alt" => DihedralIrrep::Alternating,
                    "altsign" => DihedralIrrep::AlternatingSign,
                    "2dim" => DihedralIrrep::Planar(1),
                    other => {
                        DihedralIrrep::Planar(other.strip_prefix("rho").ok_or_else(bad)?.parse().map_err(|_| bad())?)
                    }
                };
                let label = IrrepLabel::Dihedral { order: *n, kind };
                if !dihedral_dual(*n).contains(&label) {
                    return Err(bad());
                }
                label
            }
            GroupDescriptor::Product(fs) => {
                let inner = s.strip_prefix('(').and_then(|r| r.strip_suffix(')')).ok_or_else(bad)?;
                let parts = split_top_level(inner);
                if parts.len() != fs.len() {
                    return Err(bad());
                }
                IrrepLabel::Product(
                    fs.iter()
                        .zip(parts)
                        .map(|(f, p)| IrrepLabel::parse(f, p))
                        .collect::<Result<_>>()?,
                )
            }
        };
        Ok(label)
    }
}

impl Ord for IrrepLabel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key()
            .cmp(&other.sort_key())
            .then_with(|| self.to_string().cmp(&other.to_string()))
    }
}

impl PartialOrd for IrrepLabel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for IrrepLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !matches!(self, IrrepLabel::Product(_)) && self.is_trivial() {
            return write!(f, "triv");
        }
        match self {
            IrrepLabel::Cyclic { order, k } => {
                let signed = if 2 * k <= *order {
                    *k as i64
                } else {
                    *k as i64 - *order as i64
                };
                write!(f, "chi:{signed}")
            }
            IrrepLabel::Torus(ks) => {
                let body: Vec<String> = ks.iter().map(|k| k.to_string()).collect();
                write!(f, "torus:[{}]", body.join(","))
            }
            IrrepLabel::Su2 { two_l } => write!(f, "wigner:{two_l}"),
            IrrepLabel::Dihedral { kind, .. } => match kind {
                DihedralIrrep::Trivial => write!(f, "triv"),
                DihedralIrrep::Sign => write!(f, "dihedral:sign"),
                DihedralIrrep::Alternating => write!(f, "dihedral:alt"),
                DihedralIrrep::AlternatingSign => write!(f, "dihedral:altsign"),
                DihedralIrrep::Planar(j) => write!(f, "dihedral:rho{j}"),
            },
            IrrepLabel::Product(ls) => {
                let body: Vec<String> = ls.iter().map(|l| l.to_string()).collect();
                write!(f, "({})", body.join(","))
            }
        }
    }
}

impl Serialize for IrrepLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// A finite set of labels of one group (the witness sets `A`).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DualSubset {
    labels: BTreeSet<IrrepLabel>,
}

impl DualSubset {
    pub fn new(labels: impl IntoIterator<Item = IrrepLabel>) -> Result<Self> {
        let mut set = BTreeSet::new();
        let mut group: Option<GroupDescriptor> = None;
        for l in labels {
            let g = l.group();
            match &group {
                Some(h) if *h != g => {
                    return Err(Error::GroupMismatch {
                        expected: h.to_string(),
                        found: g.to_string(),
                    })
                }
                None => group = Some(g),
                _ => {}
            }
            if !set.insert(l.clone()) {
                return Err(Error::InvalidParameter(format!("duplicate label {l}")));
            }
        }
        Ok(Self { labels: set })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// All labels of shell at most `shell`.
    pub fn shells(group: &GroupDescriptor, shell: u32) -> Self {
        Self {
            labels: enumerate_dual(group, shell).into_iter().collect(),
        }
    }

    pub fn contains(&self, l: &IrrepLabel) -> bool {
        self.labels.contains(l)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &IrrepLabel> {
        self.labels.iter()
    }

    pub fn is_subset(&self, other: &DualSubset) -> bool {
        self.labels.is_subset(&other.labels)
    }

    pub fn names(&self) -> Vec<String> {
        self.labels.iter().map(|l| l.to_string()).collect()
    }
}

impl Serialize for DualSubset {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.names().serialize(s)
    }
}

fn dihedral_dual(n: u32) -> Vec<IrrepLabel> {
    let mut kinds = vec![DihedralIrrep::Trivial, DihedralIrrep::Sign];
    if n.is_multiple_of(2) {
        kinds.push(DihedralIrrep::Alternating);
        kinds.push(DihedralIrrep::AlternatingSign);
    }
    let planar = if n.is_multiple_of(2) {
        (n / 2).saturating_sub(1)
    } else {
        (n - 1) / 2
    };
    kinds.extend((1..=planar).map(DihedralIrrep::Planar));
    kinds
        .into_iter()
        .map(|kind| IrrepLabel::Dihedral { order: n, kind })
        .collect()
}

/// Largest shell of a finite group's dual; `None` for infinite groups.
pub fn max_shell(group: &GroupDescriptor) -> Option<u32> {
    match group {
        GroupDescriptor::Cyclic(n) => Some(n / 2),
        GroupDescriptor::Dihedral(n) => dihedral_dual(*n).iter().map(|l| l.shell()).max(),
        GroupDescriptor::Torus(_) | GroupDescriptor::Su2 => None,
        GroupDescriptor::Product(fs) => fs
            .iter()
            .map(max_shell)
            .collect::<Option<Vec<_>>>()
            .map(|v| v.into_iter().max().unwrap_or(0)),
    }
}

/// Labels with shell at most `cutoff`, in canonical order, trivial first.
///
/// For finite groups a cutoff at or above [`max_shell`] returns the whole
/// dual, and `sum d_pi^2 = |G|`.
pub fn enumerate_dual(group: &GroupDescriptor, cutoff: u32) -> Vec<IrrepLabel> {
    let mut labels: Vec<IrrepLabel> = match group {
        GroupDescriptor::Cyclic(n) => (0..*n).map(|k| IrrepLabel::Cyclic { order: *n, k }).collect(),
        GroupDescriptor::Dihedral(n) => dihedral_dual(*n),
        GroupDescriptor::Torus(dims) => {
            let c = cutoff as i64;
            let mut out = vec![Vec::new()];
            for _ in 0..*dims {
                out = out
                    .into_iter()
                    .flat_map(|prefix: Vec<i64>| {
                        (-c..=c).map(move |k| {
                            let mut v = prefix.clone();
                            v.push(k);
                            v
                        })
                    })
                    .collect();
            }
            out.into_iter().map(IrrepLabel::Torus).collect()
        }
        GroupDescriptor::Su2 => (0..=cutoff).map(|two_l| IrrepLabel::Su2 { two_l }).collect(),
        GroupDescriptor::Product(fs) => {
            let factor_duals: Vec<Vec<IrrepLabel>> = fs.iter().map(|f| enumerate_dual(f, cutoff)).collect();
            let mut out: Vec<Vec<IrrepLabel>> = vec![Vec::new()];
            for d in &factor_duals {
                out = out
                    .into_iter()
                    .flat_map(|prefix| {
                        d.iter().map(move |l| {
                            let mut v = prefix.clone();
                            v.push(l.clone());
                            v
                        })
                    })
                    .collect();
            }
            out.into_iter().map(IrrepLabel::Product).collect()
        }
    };
    labels.retain(|l| l.shell() <= cutoff);
    labels.sort();
    labels
}

/// The complete dual of a finite group.
pub fn full_dual(group: &GroupDescriptor) -> Option<Vec<IrrepLabel>> {
    max_shell(group).map(|s| enumerate_dual(group, s))
}

/// Wigner matrix of spin `two_l / 2` at the SU(2) element `q`.
///
/// Built on the orthonormal monomial basis `x^p y^(2l-p) / sqrt(p! (2l-p)!)`,
/// ordered `m = l, l-1, ..., -l`, by raising the degree one step at a time:
/// each step combines the previous matrix with the entries of the 2x2 matrix
/// using coefficients in `[0, 1]`, so no factorials are formed and the
/// recursion stays accurate for large `l`. Spin 1/2 reproduces the quaternion
/// matrix itself.
pub fn wigner_matrix(two_l: u32, q: &Quaternion) -> CMatrix {
    let u = q.to_matrix();
    let (u11, u12, u21, u22) = (u[(0, 0)], u[(0, 1)], u[(1, 0)], u[(1, 1)]);
    // prev[(q, p)] in monomial-degree indexing
    let mut prev = CMatrix::from_element(1, 1, Complex64::new(1.0, 0.0));
    for n in 0..two_l as usize {
        let m = n + 1;
        let mut next = CMatrix::zeros(m + 1, m + 1);
        let get = |mat: &CMatrix, r: isize, c: usize| -> Complex64 {
            if r < 0 || r as usize > n {
                Complex64::new(0.0, 0.0)
            } else {
                mat[(r as usize, c)]
            }
        };
        let mf = m as f64;
        for qi in 0..=m {
            let qf = qi as f64;
            next[(qi, 0)] = (qf / mf).sqrt() * u12 * get(&prev, qi as isize - 1, 0)
                + ((mf - qf) / mf).sqrt() * u22 * get(&prev, qi as isize, 0);
            for p in 1..=m {
                let pf = p as f64;
                next[(qi, p)] = (qf / pf).sqrt() * u11 * get(&prev, qi as isize - 1, p - 1)
                    + ((mf - qf) / pf).sqrt() * u21 * get(&prev, qi as isize, p - 1);
            }
        }
        prev = next;
    }
    let n = two_l as usize;
    CMatrix::from_fn(n + 1, n + 1, |i, j| prev[(n - i, n - j)])
}

fn scalar(z: Complex64) -> CMatrix {
    CMatrix::from_element(1, 1, z)
}

fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// `pi(g)` in the canonical basis.
pub fn irrep_matrix(label: &IrrepLabel, g: &GroupPoint) -> Result<CMatrix> {
    let mismatch = || Error::GroupMismatch {
        expected: label.group().to_string(),
        found: g.group().to_string(),
    };
    match (label, g) {
        (IrrepLabel::Cyclic { order, k }, GroupPoint::Cyclic { order: n, k: x }) if order == n => {
            let phase = TAU * ((*k as u64 * *x as u64) % *n as u64) as f64 / *n as f64;
            Ok(scalar(Complex64::from_polar(1.0, phase)))
        }
        (
            IrrepLabel::Dihedral { order, kind },
            GroupPoint::Dihedral {
                order: n,
                rotation,
                reflection,
            },
        ) if order == n => {
            let sign = |b: bool| if b { -1.0 } else { 1.0 };
            let r_odd = rotation % 2 == 1;
            Ok(match kind {
                DihedralIrrep::Trivial => scalar(1.0.into()),
                DihedralIrrep::Sign => scalar(sign(*reflection).into()),
                DihedralIrrep::Alternating => scalar(sign(r_odd).into()),
                DihedralIrrep::AlternatingSign => scalar(sign(r_odd ^ reflection).into()),
                DihedralIrrep::Planar(j) => {
                    let phase = TAU * ((*j as u64 * *rotation as u64) % *n as u64) as f64 / *n as f64;
                    let w = Complex64::from_polar(1.0, phase);
                    let zero = Complex64::new(0.0, 0.0);
                    if *reflection {
                        CMatrix::from_row_slice(2, 2, &[zero, w, w.conj(), zero])
                    } else {
                        CMatrix::from_row_slice(2, 2, &[w, zero, zero, w.conj()])
                    }
                }
            })
        }
        (IrrepLabel::Torus(ks), GroupPoint::Torus(angles)) if ks.len() == angles.len() => {
            let phase: f64 = ks.iter().zip(angles).map(|(k, t)| *k as f64 * t).sum();
            Ok(scalar(Complex64::from_polar(1.0, phase)))
        }
        (IrrepLabel::Su2 { two_l }, GroupPoint::Su2(q)) => Ok(wigner_matrix(*two_l, q)),
        (IrrepLabel::Product(ls), GroupPoint::Product(ps)) if ls.len() == ps.len() => {
            let mut acc = scalar(1.0.into());
            for (l, p) in ls.iter().zip(ps) {
                acc = kron(&acc, &irrep_matrix(l, p)?);
            }
            Ok(acc)
        }
        _ => Err(mismatch()),
    }
}

/// `tr pi(g)`.
pub fn character(label: &IrrepLabel, g: &GroupPoint) -> Result<Complex64> {
    Ok(irrep_matrix(label, g)?.trace())
}

/// Per-irrep unitary change of basis `pi -> V pi V*`.
///
/// The dual is only defined up to unitary equivalence; every norm and bound
/// computed by this crate must be invariant under a frame change.
#[derive(Clone, Debug, Default)]
pub struct Frame {
    conjugators: BTreeMap<IrrepLabel, CMatrix>,
}

impl Frame {
    pub fn canonical() -> Self {
        Self::default()
    }

    /// Seeded Haar-random unitary conjugation of every label in `labels`.
    pub fn random(labels: &[IrrepLabel], seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let conjugators = labels
            .iter()
            .map(|l| (l.clone(), random_unitary(l.dim(), &mut rng)))
            .collect();
        Self { conjugators }
    }

    pub fn is_canonical(&self) -> bool {
        self.conjugators.is_empty()
    }

    pub fn apply(&self, label: &IrrepLabel, m: CMatrix) -> CMatrix {
        match self.conjugators.get(label) {
            Some(v) => v * m * v.adjoint(),
            None => m,
        }
    }

    pub fn irrep_matrix(&self, label: &IrrepLabel, g: &GroupPoint) -> Result<CMatrix> {
        Ok(self.apply(label, irrep_matrix(label, g)?))
    }
}

/// Haar-random unitary from the QR factorization of a complex Gaussian matrix.
pub fn random_unitary<R: rand::Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let z = CMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
    });
    let qr = z.qr();
    let (q, r) = (qr.q(), qr.r());
    let phases = CMatrix::from_diagonal(&nalgebra::DVector::from_fn(dim, |i, _| {
        let d = r[(i, i)];
        if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        }
    }));
    q * phases
}

/// Samples `g -> pi(g)_{ij}` (1-based indices) on `rule`.
pub fn matrix_entry_function(
    rule: &Arc<QuadratureRule>,
    label: &IrrepLabel,
    i: usize,
    j: usize,
) -> Result<SampledFunction> {
    let d = label.dim();
    if i == 0 || j == 0 || i > d || j > d {
        return Err(Error::IndexOutOfRange { i, j, dim: d });
    }
    if label.group() != *rule.group() {
        return Err(Error::GroupMismatch {
            expected: rule.group().to_string(),
            found: label.group().to_string(),
        });
    }
    let values = rule
        .nodes()
        .iter()
        .map(|g| irrep_matrix(label, g).map(|m| m[(i - 1, j - 1)]))
        .collect::<Result<Vec<_>>>()?;
    SampledFunction::new(rule.clone(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::haar_quadrature;

    fn op_norm(m: &CMatrix) -> f64 {
        m.clone().singular_values().max()
    }

    fn groups() -> Vec<GroupDescriptor> {
        [
            "cyclic:8",
            "dihedral:3",
            "dihedral:6",
            "torus:2",
            "su2",
            "product(dihedral:3,torus:1)",
        ]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect()
    }

    #[test]
    fn dual_enumeration() {
        let c4 = enumerate_dual(&GroupDescriptor::Cyclic(4), 2);
        assert_eq!(c4.len(), 4);
        assert!(c4[0].is_trivial());
        assert!(c4.iter().all(|l| l.dim() == 1));

        let su2 = enumerate_dual(&GroupDescriptor::Su2, 2);
        let dims: Vec<usize> = su2.iter().map(|l| l.dim()).collect();
        assert_eq!(dims, vec![1, 2, 3]);

        for g in [
            "cyclic:1",
            "cyclic:7",
            "cyclic:8",
            "dihedral:1",
            "dihedral:2",
            "dihedral:3",
            "dihedral:6",
            "dihedral:7",
            "product(dihedral:3,cyclic:4)",
        ] {
            let g: GroupDescriptor = g.parse().unwrap();
            let dual = full_dual(&g).unwrap();
            let total: usize = dual.iter().map(|l| l.dim().pow(2)).sum();
            assert_eq!(total, g.order().unwrap(), "{g}");
            assert!(dual[0].is_trivial());
            let unique: BTreeSet<_> = dual.iter().collect();
            assert_eq!(unique.len(), dual.len());
        }

        let d3 = full_dual(&GroupDescriptor::Dihedral(3)).unwrap();
        let dims: Vec<usize> = d3.iter().map(|l| l.dim()).collect();
        assert_eq!(dims, vec![1, 1, 2]);
    }

    #[test]
    fn dihedral_characters_are_orthonormal() {
        // brute-force character orthogonality on D_3
        let g = GroupDescriptor::Dihedral(3);
        let els = g.elements().unwrap();
        let dual = full_dual(&g).unwrap();
        for a in &dual {
            for b in &dual {
                let ip: Complex64 = els
                    .iter()
                    .map(|x| character(a, x).unwrap() * character(b, x).unwrap().conj())
                    .sum::<Complex64>()
                    / els.len() as f64;
                let expected = if a == b { 1.0 } else { 0.0 };
                assert!((ip - expected).norm() < 1e-14, "{a} {b}");
            }
        }
        let rho = IrrepLabel::parse(&g, "2dim").unwrap();
        let r = GroupPoint::Dihedral {
            order: 3,
            rotation: 1,
            reflection: false,
        };
        assert!((character(&rho, &r).unwrap() - Complex64::new(-1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn trivial_and_identity_values() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for g in groups() {
            let e = g.identity();
            for l in enumerate_dual(&g, 3) {
                let m = irrep_matrix(&l, &e).unwrap();
                assert!((m.clone() - CMatrix::identity(l.dim(), l.dim())).norm() < 1e-14);
                assert!((character(&l, &e).unwrap() - l.dim() as f64).norm() < 1e-14);
            }
            let triv = IrrepLabel::trivial(&g);
            let x = g.random_point(&mut rng);
            assert!((character(&triv, &x).unwrap() - 1.0).norm() < 1e-14);
        }
        let su2_half = IrrepLabel::Su2 { two_l: 1 };
        assert_eq!(
            character(&su2_half, &GroupDescriptor::Su2.identity()).unwrap(),
            Complex64::new(2.0, 0.0)
        );
    }

    #[test]
    fn torus_character_formula() {
        let l = IrrepLabel::Torus(vec![3]);
        let m = irrep_matrix(&l, &GroupPoint::torus(vec![0.7])).unwrap();
        assert!((m[(0, 0)] - Complex64::from_polar(1.0, 2.1)).norm() < 1e-15);
    }

    #[test]
    fn spin_half_is_the_quaternion_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let q = Quaternion::random(&mut rng);
            let w = wigner_matrix(1, &q);
            assert!((w - q.to_matrix()).norm() < 1e-15);
        }
    }

    #[test]
    fn unitary_and_homomorphic() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for g in groups() {
            let labels = enumerate_dual(&g, if g == GroupDescriptor::Su2 { 12 } else { 3 });
            for _ in 0..100 {
                let a = g.random_point(&mut rng);
                let b = g.random_point(&mut rng);
                let ab = a.compose(&b).unwrap();
                for l in &labels {
                    let pa = irrep_matrix(l, &a).unwrap();
                    let pb = irrep_matrix(l, &b).unwrap();
                    let pab = irrep_matrix(l, &ab).unwrap();
                    let d = l.dim();
                    assert!(
                        op_norm(&(&pa * pa.adjoint() - CMatrix::identity(d, d))) < 1e-10,
                        "{g} {l}"
                    );
                    assert!(op_norm(&(pab - &pa * &pb)) < 1e-10, "{g} {l}");
                }
            }
        }
    }

    #[test]
    fn wigner_recursion_stays_unitary_at_high_spin() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..5 {
            let q = Quaternion::random(&mut rng);
            let m = wigner_matrix(40, &q);
            assert!(op_norm(&(&m * m.adjoint() - CMatrix::identity(41, 41))) < 1e-10);
        }
    }

    #[test]
    fn labels_round_trip_through_strings() {
        for g in groups() {
            for l in enumerate_dual(&g, 2) {
                let s = l.to_string();
                assert_eq!(IrrepLabel::parse(&g, &s).unwrap(), l, "{s}");
            }
        }
        let t1 = GroupDescriptor::Torus(1);
        assert_eq!(IrrepLabel::parse(&t1, "chi:-3").unwrap(), IrrepLabel::Torus(vec![-3]));
        assert!(IrrepLabel::parse(&GroupDescriptor::Dihedral(3), "dihedral:alt").is_err());
        assert!(IrrepLabel::parse(&GroupDescriptor::Su2, "chi:1").is_err());
    }

    #[test]
    fn entry_function_index_errors() {
        let rule = Arc::new(haar_quadrature(&GroupDescriptor::Su2, 2).unwrap());
        let l = IrrepLabel::Su2 { two_l: 1 };
        assert!(matches!(
            matrix_entry_function(&rule, &l, 3, 1),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(matrix_entry_function(&rule, &l, 0, 1).is_err());
        let triv = matrix_entry_function(&rule, &IrrepLabel::trivial(rule.group()), 1, 1).unwrap();
        assert!(triv.values().iter().all(|v| (*v - 1.0).norm() < 1e-15));
    }

    #[test]
    fn dual_subsets_reject_duplicates_and_mixed_groups() {
        let a = IrrepLabel::Su2 { two_l: 1 };
        assert!(DualSubset::new([a.clone(), a.clone()]).is_err());
        assert!(DualSubset::new([a, IrrepLabel::Torus(vec![1])]).is_err());
        assert!(DualSubset::shells(&GroupDescriptor::Torus(1), 2).len() == 5);
    }

    #[test]
    fn random_frames_are_unitary() {
        let labels = enumerate_dual(&GroupDescriptor::Su2, 6);
        let frame = Frame::random(&labels, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = GroupDescriptor::Su2.random_point(&mut rng);
        for l in &labels {
            let m = frame.irrep_matrix(l, &g).unwrap();
            let d = l.dim();
            assert!(op_norm(&(&m * m.adjoint() - CMatrix::identity(d, d))) < 1e-12);
            let c = frame.irrep_matrix(l, &g).unwrap().trace();
            assert!((c - character(l, &g).unwrap()).norm() < 1e-12);
        }
    }
}
