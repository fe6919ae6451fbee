//! Concrete compact groups: element arithmetic, a bi-invariant metric and
//! sampled identity neighbourhoods.
//!
//! Every group here is metrizable with an explicit bi-invariant metric:
//!
//! * finite groups (`cyclic:N`, `dihedral:N`) carry the discrete metric,
//! * the torus carries the flat geodesic metric on `[0, 2pi)^n`,
//! * SU(2) carries `d(a, b) = 4 atan2(|a - b|, |a + b|)` on unit quaternions,
//!   i.e. the rotation angle of `a^{-1} b` in `[0, 2pi]`,
//! * products carry the Euclidean combination of the factor metrics.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A compact group from the supported families.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GroupDescriptor {
    Cyclic(u32),
    Dihedral(u32),
    Torus(u32),
    Su2,
    Product(Vec<GroupDescriptor>),
}

impl GroupDescriptor {
    pub fn cyclic(order: u32) -> Result<Self> {
        Self::Cyclic(order).validated()
    }

    pub fn dihedral(n: u32) -> Result<Self> {
        Self::Dihedral(n).validated()
    }

    pub fn torus(n: u32) -> Result<Self> {
        Self::Torus(n).validated()
    }

    pub fn product(factors: Vec<GroupDescriptor>) -> Result<Self> {
        Self::Product(factors).validated()
    }

    fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Cyclic(0) | Self::Dihedral(0) | Self::Torus(0) => Err(Error::InvalidGroup(self.to_string())),
            Self::Product(factors) if factors.is_empty() => Err(Error::InvalidGroup("product()".into())),
            Self::Product(factors) => factors.iter().try_for_each(|f| f.validate()),
            _ => Ok(()),
        }
    }

    /// Human-readable name; identical to the configuration string.
    pub fn name(&self) -> String {
        self.to_string()
    }

    /// Number of elements for finite groups.
    pub fn order(&self) -> Option<usize> {
        match self {
            Self::Cyclic(n) => Some(*n as usize),
            Self::Dihedral(n) => Some(2 * *n as usize),
            Self::Torus(_) | Self::Su2 => None,
            Self::Product(fs) => fs.iter().map(|f| f.order()).product(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.order().is_some()
    }

    /// True when `x y = y x` for all elements.
    pub fn is_abelian(&self) -> bool {
        match self {
            Self::Cyclic(_) | Self::Torus(_) => true,
            Self::Dihedral(n) => *n <= 2,
            Self::Su2 => false,
            Self::Product(fs) => fs.iter().all(|f| f.is_abelian()),
        }
    }

    /// Diameter of the group under [`distance`].
    pub fn diameter(&self) -> f64 {
        match self {
            Self::Cyclic(n) => {
                if *n > 1 {
                    1.0
                } else {
                    0.0
                }
            }
            Self::Dihedral(_) => 1.0,
            Self::Torus(n) => PI * (*n as f64).sqrt(),
            Self::Su2 => TAU,
            Self::Product(fs) => fs.iter().map(|f| f.diameter().powi(2)).sum::<f64>().sqrt(),
        }
    }

    pub fn identity(&self) -> GroupPoint {
        match self {
            Self::Cyclic(n) => GroupPoint::Cyclic { order: *n, k: 0 },
            Self::Dihedral(n) => GroupPoint::Dihedral {
                order: *n,
                rotation: 0,
                reflection: false,
            },
            Self::Torus(n) => GroupPoint::Torus(vec![0.0; *n as usize]),
            Self::Su2 => GroupPoint::Su2(Quaternion::IDENTITY),
            Self::Product(fs) => GroupPoint::Product(fs.iter().map(|f| f.identity()).collect()),
        }
    }

    /// All elements of a finite group, identity first.
    pub fn elements(&self) -> Option<Vec<GroupPoint>> {
        match self {
            Self::Cyclic(n) => Some((0..*n).map(|k| GroupPoint::Cyclic { order: *n, k }).collect()),
            Self::Dihedral(n) => Some(
                [false, true]
                    .into_iter()
                    .flat_map(|s| {
                        (0..*n).map(move |r| GroupPoint::Dihedral {
                            order: *n,
                            rotation: r,
                            reflection: s,
                        })
                    })
                    .collect(),
            ),
            Self::Torus(_) | Self::Su2 => None,
            Self::Product(fs) => {
                let factors: Option<Vec<_>> = fs.iter().map(|f| f.elements()).collect();
                Some(cartesian(&factors?).into_iter().map(GroupPoint::Product).collect())
            }
        }
    }

    /// Whether `point` is an element of this group.
    pub fn contains(&self, point: &GroupPoint) -> bool {
        match (self, point) {
            (Self::Cyclic(n), GroupPoint::Cyclic { order, k }) => n == order && k < n,
            (Self::Dihedral(n), GroupPoint::Dihedral { order, rotation, .. }) => n == order && rotation < n,
            (Self::Torus(n), GroupPoint::Torus(a)) => a.len() == *n as usize,
            (Self::Su2, GroupPoint::Su2(_)) => true,
            (Self::Product(fs), GroupPoint::Product(ps)) => {
                fs.len() == ps.len() && fs.iter().zip(ps).all(|(f, p)| f.contains(p))
            }
            _ => false,
        }
    }

    pub fn check(&self, point: &GroupPoint) -> Result<()> {
        if self.contains(point) {
            Ok(())
        } else {
            Err(Error::GroupMismatch {
                expected: self.to_string(),
                found: point.group().to_string(),
            })
        }
    }

    /// A seeded uniformly (Haar) distributed random element.
    pub fn random_point<R: Rng + ?Sized>(&self, rng: &mut R) -> GroupPoint {
        match self {
            Self::Cyclic(n) => GroupPoint::Cyclic {
                order: *n,
                k: rng.random_range(0..*n),
            },
            Self::Dihedral(n) => GroupPoint::Dihedral {
                order: *n,
                rotation: rng.random_range(0..*n),
                reflection: rng.random_bool(0.5),
            },
            Self::Torus(n) => GroupPoint::torus((0..*n).map(|_| rng.random_range(0.0..TAU)).collect()),
            Self::Su2 => GroupPoint::Su2(Quaternion::random(rng)),
            Self::Product(fs) => GroupPoint::Product(fs.iter().map(|f| f.random_point(rng)).collect()),
        }
    }
}

fn cartesian(factors: &[Vec<GroupPoint>]) -> Vec<Vec<GroupPoint>> {
    factors.iter().fold(vec![Vec::new()], |acc, items| {
        acc.iter()
            .flat_map(|prefix| {
                items.iter().map(move |it| {
                    let mut v = prefix.clone();
                    v.push(it.clone());
                    v
                })
            })
            .collect()
    })
}

impl fmt::Display for GroupDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Cyclic(n) => write!(f, "cyclic:{n}"),
            Self::Dihedral(n) => write!(f, "dihedral:{n}"),
            Self::Torus(n) => write!(f, "torus:{n}"),
            Self::Su2 => write!(f, "su2"),
            Self::Product(fs) => {
                write!(f, "product(")?;
                for (i, g) in fs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{g}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Splits `s` on commas that are not nested inside brackets.
pub(crate) fn split_top_level(s: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(s[start..].trim());
    parts
}

impl FromStr for GroupDescriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidGroup(s.to_string());
        if s.eq_ignore_ascii_case("su2") {
            return Ok(Self::Su2);
        }
        if let Some(inner) = s.strip_prefix("product(").and_then(|r| r.strip_suffix(')')) {
            let factors = split_top_level(inner)
                .into_iter()
                .map(str::parse)
                .collect::<Result<Vec<_>>>()?;
            return Self::product(factors);
        }
        let (kind, arg) = s.split_once(':').ok_or_else(bad)?;
        let n: u32 = arg.trim().parse().map_err(|_| bad())?;
        match kind.trim() {
            "cyclic" => Self::cyclic(n),
            "dihedral" => Self::dihedral(n),
            "torus" => Self::torus(n),
            _ => Err(bad()),
        }
    }
}

impl Serialize for GroupDescriptor {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for GroupDescriptor {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Unit quaternion `w + x i + y j + z k`, identified with the SU(2) matrix
/// `[[w + i x, y + i z], [-y + i z, w - i x]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const IDENTITY: Quaternion = Quaternion {
        w: 1.0,
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self { w, x, y, z }
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn dot(&self, o: &Quaternion) -> f64 {
        self.w * o.w + self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        Self::new(self.w / n, self.x / n, self.y / n, self.z / n)
    }

    pub fn conj(&self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    /// Hamilton product.
    pub fn mul(&self, o: &Quaternion) -> Self {
        Self::new(
            self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        )
    }

    /// `exp(angle/2 * axis)`: rotation by `angle` about the unit `axis`.
    pub fn from_axis_angle(axis: [f64; 3], angle: f64) -> Self {
        let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        let (s, c) = (angle / 2.0).sin_cos();
        Self::new(c, s * axis[0] / n, s * axis[1] / n, s * axis[2] / n)
    }

    /// The element `exp(-i a sigma_z / 2) exp(-i b sigma_y / 2) exp(-i g sigma_z / 2)`.
    pub fn from_euler_zyz(alpha: f64, beta: f64, gamma: f64) -> Self {
        let rz = |t: f64| Self::new((t / 2.0).cos(), -(t / 2.0).sin(), 0.0, 0.0);
        let ry = Self::new((beta / 2.0).cos(), 0.0, -(beta / 2.0).sin(), 0.0);
        rz(alpha).mul(&ry).mul(&rz(gamma))
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let q = Self::new(
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
            );
            if q.norm() > 1e-6 {
                return q.normalized();
            }
        }
    }

    pub fn to_matrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(self.w, self.x),
                Complex64::new(self.y, self.z),
                Complex64::new(-self.y, self.z),
                Complex64::new(self.w, -self.x),
            ],
        )
    }

    fn sub_norm(&self, o: &Quaternion) -> f64 {
        Self::new(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z).norm()
    }

    fn add_norm(&self, o: &Quaternion) -> f64 {
        Self::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z).norm()
    }
}

/// An element of one of the supported groups.
#[derive(Clone, Debug, PartialEq)]
pub enum GroupPoint {
    /// Residue `k` modulo `order`.
    Cyclic {
        order: u32,
        k: u32,
    },
    /// `r^rotation s^reflection` in the dihedral group of the `order`-gon.
    Dihedral {
        order: u32,
        rotation: u32,
        reflection: bool,
    },
    /// Angles reduced to `[0, 2pi)`.
    Torus(Vec<f64>),
    Su2(Quaternion),
    Product(Vec<GroupPoint>),
}

pub(crate) fn reduce_angle(t: f64) -> f64 {
    let r = t.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

fn circular_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

impl GroupPoint {
    pub fn torus(angles: Vec<f64>) -> Self {
        Self::Torus(angles.into_iter().map(reduce_angle).collect())
    }

    pub fn su2(q: Quaternion) -> Self {
        Self::Su2(q.normalized())
    }

    /// The group this point belongs to.
    pub fn group(&self) -> GroupDescriptor {
        match self {
            Self::Cyclic { order, .. } => GroupDescriptor::Cyclic(*order),
            Self::Dihedral { order, .. } => GroupDescriptor::Dihedral(*order),
            Self::Torus(a) => GroupDescriptor::Torus(a.len() as u32),
            Self::Su2(_) => GroupDescriptor::Su2,
            Self::Product(ps) => GroupDescriptor::Product(ps.iter().map(|p| p.group()).collect()),
        }
    }

    fn mismatch(&self, other: &GroupPoint) -> Error {
        Error::GroupMismatch {
            expected: self.group().to_string(),
            found: other.group().to_string(),
        }
    }

    /// Group product `self * other`.
    pub fn compose(&self, other: &GroupPoint) -> Result<GroupPoint> {
        match (self, other) {
            (Self::Cyclic { order: n, k: a }, Self::Cyclic { order: m, k: b }) if n == m => Ok(Self::Cyclic {
                order: *n,
                k: ((*a as u64 + *b as u64) % *n as u64) as u32,
            }),
            (
                Self::Dihedral {
                    order: n,
                    rotation: r1,
                    reflection: s1,
                },
                Self::Dihedral {
                    order: m,
                    rotation: r2,
                    reflection: s2,
                },
            ) if n == m => {
                // r^a s^b r^c s^d = r^(a + (-1)^b c) s^(b + d)
                let n64 = *n as i64;
                let twist = if *s1 { -(*r2 as i64) } else { *r2 as i64 };
                Ok(Self::Dihedral {
                    order: *n,
                    rotation: (*r1 as i64 + twist).rem_euclid(n64) as u32,
                    reflection: s1 ^ s2,
                })
            }
            (Self::Torus(a), Self::Torus(b)) if a.len() == b.len() => {
                Ok(Self::Torus(a.iter().zip(b).map(|(x, y)| reduce_angle(x + y)).collect()))
            }
            (Self::Su2(a), Self::Su2(b)) => Ok(Self::Su2(a.mul(b))),
            (Self::Product(a), Self::Product(b)) if a.len() == b.len() => Ok(Self::Product(
                a.iter().zip(b).map(|(x, y)| x.compose(y)).collect::<Result<_>>()?,
            )),
            _ => Err(self.mismatch(other)),
        }
    }

    pub fn inverse(&self) -> GroupPoint {
        match self {
            Self::Cyclic { order, k } => Self::Cyclic {
                order: *order,
                k: (*order - *k) % *order,
            },
            Self::Dihedral {
                order,
                rotation,
                reflection,
            } => {
                if *reflection {
                    self.clone()
                } else {
                    Self::Dihedral {
                        order: *order,
                        rotation: (*order - *rotation) % *order,
                        reflection: false,
                    }
                }
            }
            Self::Torus(a) => Self::Torus(a.iter().map(|t| reduce_angle(-t)).collect()),
            Self::Su2(q) => Self::Su2(q.conj()),
            Self::Product(ps) => Self::Product(ps.iter().map(|p| p.inverse()).collect()),
        }
    }

    /// Bi-invariant distance; see the module docs for the metric per family.
    pub fn distance(&self, other: &GroupPoint) -> Result<f64> {
        match (self, other) {
            (Self::Cyclic { order: n, k: a }, Self::Cyclic { order: m, k: b }) if n == m => {
                Ok(if a == b { 0.0 } else { 1.0 })
            }
            (Self::Dihedral { order: n, .. }, Self::Dihedral { order: m, .. }) if n == m => {
                Ok(if self == other { 0.0 } else { 1.0 })
            }
            (Self::Torus(a), Self::Torus(b)) if a.len() == b.len() => Ok(a
                .iter()
                .zip(b)
                .map(|(x, y)| circular_gap(*x, *y).powi(2))
                .sum::<f64>()
                .sqrt()),
            (Self::Su2(a), Self::Su2(b)) => Ok(4.0 * a.sub_norm(b).atan2(a.add_norm(b))),
            (Self::Product(a), Self::Product(b)) if a.len() == b.len() => {
                let mut acc = 0.0;
                for (x, y) in a.iter().zip(b) {
                    acc += x.distance(y)?.powi(2);
                }
                Ok(acc.sqrt())
            }
            _ => Err(self.mismatch(other)),
        }
    }

    /// Flat coordinate list used for CSV/JSON output.
    pub fn coordinates(&self) -> Vec<f64> {
        match self {
            Self::Cyclic { k, .. } => vec![*k as f64],
            Self::Dihedral {
                rotation, reflection, ..
            } => vec![*rotation as f64, if *reflection { 1.0 } else { 0.0 }],
            Self::Torus(a) => a.clone(),
            Self::Su2(q) => vec![q.w, q.x, q.y, q.z],
            Self::Product(ps) => ps.iter().flat_map(|p| p.coordinates()).collect(),
        }
    }
}

/// Identity element `e`.
pub fn identity(group: &GroupDescriptor) -> GroupPoint {
    group.identity()
}

pub fn multiply(a: &GroupPoint, b: &GroupPoint) -> Result<GroupPoint> {
    a.compose(b)
}

pub fn inverse(a: &GroupPoint) -> GroupPoint {
    a.inverse()
}

pub fn distance(a: &GroupPoint, b: &GroupPoint) -> Result<f64> {
    a.distance(b)
}

/// A metric ball `{y : d(e, y) <= radius}` and how densely to sample it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NeighborhoodSpec {
    pub radius: f64,
    pub sample_count: usize,
    #[serde(default)]
    pub seed: u64,
}

impl NeighborhoodSpec {
    pub fn new(radius: f64, sample_count: usize, seed: u64) -> Result<Self> {
        if !(radius >= 0.0) || !radius.is_finite() {
            return Err(Error::InvalidParameter(format!("ball radius {radius}")));
        }
        if sample_count == 0 {
            return Err(Error::InvalidParameter("ball sample_count must be >= 1".into()));
        }
        Ok(Self {
            radius,
            sample_count,
            seed,
        })
    }
}

/// Points `y` with `d(e, y) <= radius`, identity first.
///
/// Finite groups are enumerated exhaustively. On the circle the samples are
/// equispaced on `[-radius, radius]`, so both boundary points are included.
/// Elsewhere the identity, boundary points and seeded interior points are
/// mixed. The result is deterministic in `spec.seed`.
pub fn sample_ball(group: &GroupDescriptor, spec: &NeighborhoodSpec) -> Vec<GroupPoint> {
    let e = group.identity();
    let delta = spec.radius;
    if delta == 0.0 {
        return vec![e];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let count = spec.sample_count.max(1);
    let mut out = vec![e.clone()];
    match group {
        GroupDescriptor::Cyclic(_) | GroupDescriptor::Dihedral(_) => {
            if let Some(all) = group.elements() {
                out.extend(
                    all.into_iter()
                        .skip(1)
                        .filter(|y| e.distance(y).is_ok_and(|d| d <= delta)),
                );
            }
        }
        GroupDescriptor::Torus(1) => {
            if count >= 2 {
                out.clear();
                for i in 0..count {
                    let t = -delta + 2.0 * delta * i as f64 / (count - 1) as f64;
                    out.push(GroupPoint::torus(vec![t]));
                }
                if !out.iter().any(|p| p == &e) {
                    out.insert(0, e.clone());
                } else {
                    let pos = out.iter().position(|p| p == &e).unwrap();
                    let id = out.remove(pos);
                    out.insert(0, id);
                }
            }
        }
        GroupDescriptor::Torus(n) => {
            let n = *n as usize;
            for axis in 0..n {
                for sign in [1.0, -1.0] {
                    let mut v = vec![0.0; n];
                    v[axis] = sign * delta;
                    out.push(GroupPoint::torus(v));
                }
            }
            while out.len() < count {
                let dir: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
                let norm = dir.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
                let r = if out.len() % 2 == 0 {
                    delta
                } else {
                    delta * rng.random::<f64>()
                };
                out.push(GroupPoint::torus(dir.iter().map(|x| x / norm * r).collect()));
            }
        }
        GroupDescriptor::Su2 => {
            let delta = delta.min(TAU);
            for axis in [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]] {
                out.push(GroupPoint::Su2(Quaternion::from_axis_angle(axis, delta)));
            }
            while out.len() < count {
                let axis = [
                    rng.sample(StandardNormal),
                    rng.sample(StandardNormal),
                    rng.sample(StandardNormal),
                ];
                let angle = if out.len() % 2 == 0 {
                    delta
                } else {
                    delta * rng.random::<f64>()
                };
                out.push(GroupPoint::Su2(Quaternion::from_axis_angle(axis, angle)));
            }
        }
        GroupDescriptor::Product(fs) => {
            let k = fs.len();
            let per = NeighborhoodSpec {
                radius: delta,
                sample_count: count,
                seed: spec.seed,
            };
            for (i, f) in fs.iter().enumerate() {
                for y in sample_ball(f, &per).into_iter().skip(1) {
                    let mut parts: Vec<GroupPoint> = fs.iter().map(|g| g.identity()).collect();
                    parts[i] = y;
                    out.push(GroupPoint::Product(parts));
                }
            }
            // mixed points with every factor at radius delta / sqrt(k)
            let shrunk = NeighborhoodSpec {
                radius: delta / (k as f64).sqrt(),
                sample_count: count,
                seed: spec.seed.wrapping_add(1),
            };
            let factor_samples: Vec<Vec<GroupPoint>> = fs.iter().map(|f| sample_ball(f, &shrunk)).collect();
            while out.len() < count {
                let parts = factor_samples
                    .iter()
                    .map(|s| s[rng.random_range(0..s.len())].clone())
                    .collect();
                out.push(GroupPoint::Product(parts));
            }
        }
    }
    out.retain(|y| e.distance(y).is_ok_and(|d| d <= delta + 1e-12));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &GroupPoint, b: &GroupPoint) -> bool {
        a.distance(b).unwrap() < 1e-12
    }

    #[test]
    fn identities() {
        assert_eq!(
            GroupDescriptor::Cyclic(5).identity(),
            GroupPoint::Cyclic { order: 5, k: 0 }
        );
        assert_eq!(GroupDescriptor::Torus(2).identity(), GroupPoint::Torus(vec![0.0, 0.0]));
        assert_eq!(GroupDescriptor::Su2.identity(), GroupPoint::Su2(Quaternion::IDENTITY));
    }

    #[test]
    fn cyclic_arithmetic() {
        let p = |k| GroupPoint::Cyclic { order: 5, k };
        assert_eq!(p(3).compose(&p(4)).unwrap(), p(2));
        assert_eq!(p(3).inverse(), p(2));
        assert_eq!(p(0).inverse(), p(0));
    }

    #[test]
    fn dihedral_is_noncommutative() {
        // brute-force Cayley table of D_3 against the action on triangle
        // vertices: r^a s^b maps v to a + (-1)^b v (mod 3)
        let g = GroupDescriptor::Dihedral(3);
        let els = g.elements().unwrap();
        let act = |p: &GroupPoint, v: i64| -> i64 {
            let GroupPoint::Dihedral {
                rotation, reflection, ..
            } = p
            else {
                unreachable!()
            };
            let v = if *reflection { -v } else { v };
            (v + *rotation as i64).rem_euclid(3)
        };
        for a in &els {
            for b in &els {
                let ab = a.compose(b).unwrap();
                for v in 0..3 {
                    assert_eq!(act(&ab, v), act(a, act(b, v)), "{a:?} {b:?}");
                }
            }
        }
        let r = GroupPoint::Dihedral {
            order: 3,
            rotation: 1,
            reflection: false,
        };
        let s = GroupPoint::Dihedral {
            order: 3,
            rotation: 0,
            reflection: true,
        };
        assert_ne!(r.compose(&s).unwrap(), s.compose(&r).unwrap());
    }

    #[test]
    fn torus_inverse_and_distance() {
        let t = GroupPoint::torus(vec![1.0]);
        assert!(
            (match t.inverse() {
                GroupPoint::Torus(a) => a[0],
                _ => unreachable!(),
            } - (TAU - 1.0))
                .abs()
                < 1e-15
        );
        let d = GroupPoint::torus(vec![0.0])
            .distance(&GroupPoint::torus(vec![PI]))
            .unwrap();
        assert!((d - PI).abs() < 1e-15);
        let wrap = GroupPoint::torus(vec![0.1])
            .distance(&GroupPoint::torus(vec![TAU - 0.1]))
            .unwrap();
        assert!((wrap - 0.2).abs() < 1e-12);
    }

    #[test]
    fn su2_inverse_law_and_metric() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let e = GroupDescriptor::Su2.identity();
        for _ in 0..100 {
            let a = GroupDescriptor::Su2.random_point(&mut rng);
            let b = GroupDescriptor::Su2.random_point(&mut rng);
            let g = GroupDescriptor::Su2.random_point(&mut rng);
            assert!(close(&a.compose(&a.inverse()).unwrap(), &e));
            let d = a.distance(&b).unwrap();
            let dl = g.compose(&a).unwrap().distance(&g.compose(&b).unwrap()).unwrap();
            let dr = a.compose(&g).unwrap().distance(&b.compose(&g).unwrap()).unwrap();
            assert!((d - dl).abs() < 1e-12 && (d - dr).abs() < 1e-12);
        }
        let q = GroupPoint::Su2(Quaternion::from_axis_angle([0.0, 0.0, 1.0], 0.3));
        assert!((e.distance(&q).unwrap() - 0.3).abs() < 1e-14);
        // -I is far from I: the metric separates the two lifts of a rotation
        let minus = GroupPoint::Su2(Quaternion::new(-1.0, 0.0, 0.0, 0.0));
        assert!((e.distance(&minus).unwrap() - TAU).abs() < 1e-14);
    }

    #[test]
    fn associativity_on_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let groups: Vec<GroupDescriptor> = ["cyclic:7", "dihedral:5", "torus:3", "su2", "product(dihedral:3,su2)"]
            .iter()
            .map(|s| s.parse().unwrap())
            .collect();
        for g in &groups {
            for _ in 0..50 {
                let (a, b, c) = (
                    g.random_point(&mut rng),
                    g.random_point(&mut rng),
                    g.random_point(&mut rng),
                );
                let l = a.compose(&b).unwrap().compose(&c).unwrap();
                let r = a.compose(&b.compose(&c).unwrap()).unwrap();
                assert!(close(&l, &r), "{g}");
                assert!(close(&a.compose(&g.identity()).unwrap(), &a));
            }
        }
    }

    #[test]
    fn mismatch_is_an_error() {
        let a = GroupDescriptor::Cyclic(5).identity();
        let b = GroupDescriptor::Cyclic(6).identity();
        assert!(matches!(a.compose(&b), Err(Error::GroupMismatch { .. })));
        assert!(a.distance(&GroupDescriptor::Su2.identity()).is_err());
    }

    #[test]
    fn descriptor_strings_round_trip() {
        for s in [
            "cyclic:8",
            "dihedral:3",
            "torus:2",
            "su2",
            "product(cyclic:2,product(torus:1,su2))",
        ] {
            let g: GroupDescriptor = s.parse().unwrap();
            assert_eq!(g.to_string(), s);
        }
        assert!("cyclic:0".parse::<GroupDescriptor>().is_err());
        assert!("torus:x".parse::<GroupDescriptor>().is_err());
        assert!("product()".parse::<GroupDescriptor>().is_err());
    }

    #[test]
    fn ball_sampling() {
        let spec = |r, c| NeighborhoodSpec::new(r, c, 1).unwrap();
        let c6 = GroupDescriptor::Cyclic(6);
        assert_eq!(sample_ball(&c6, &spec(0.5, 10)), vec![c6.identity()]);
        assert_eq!(sample_ball(&c6, &spec(1.0, 10)).len(), 6);
        assert_eq!(
            sample_ball(&GroupDescriptor::Su2, &spec(0.0, 10)),
            vec![GroupDescriptor::Su2.identity()]
        );

        let t1 = GroupDescriptor::Torus(1);
        let pts = sample_ball(&t1, &spec(0.1, 5));
        assert_eq!(pts.len(), 5);
        assert_eq!(pts[0], t1.identity());
        for p in &pts {
            assert!(t1.identity().distance(p).unwrap() <= 0.1 + 1e-15);
        }

        for g in ["torus:3", "su2", "product(cyclic:3,torus:1)"] {
            let g: GroupDescriptor = g.parse().unwrap();
            let a = sample_ball(&g, &spec(0.4, 20));
            let b = sample_ball(&g, &spec(0.4, 20));
            assert_eq!(a, b);
            assert_eq!(a[0], g.identity());
            assert!(a.len() >= 4);
            assert!(a.iter().all(|y| g.identity().distance(y).unwrap() <= 0.4 + 1e-12));
        }
    }
}
