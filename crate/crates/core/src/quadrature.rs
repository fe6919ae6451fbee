//! Normalized Haar quadrature.
//!
//! A rule's `exactness` is a *pair band*: every product
//! `pi_ij(x) * conj(sigma_kl(x))` with `shell(pi), shell(sigma) <= band` is
//! integrated exactly. Forward transforms of functions of shell at most
//! `band` against duals of shell at most `band` are therefore exact, and so
//! are Plancherel sums and Schur orthogonality within that band.
//!
//! Per family, `resolution` means:
//!
//! | group      | resolution                         | pair band               |
//! |------------|------------------------------------|-------------------------|
//! | finite     | ignored (all elements, `1/|G|`)    | complete                |
//! | `torus:n`  | trapezoid nodes `m` per axis       | `(m - 1) / 2`           |
//! | `su2`      | pair band `r` in units of `2l`     | `r`                     |
//! | product    | passed to every factor             | min over factors        |
//!
//! The SU(2) rule uses Euler angles `(alpha, beta, gamma)` with `r + 1`
//! trapezoid nodes in `alpha`, `2r + 1` in `gamma / 2` and
//! `ceil((r + 1) / 2)` Gauss-Legendre nodes in `cos(beta)`.

use std::f64::consts::{PI, TAU};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{GroupDescriptor, GroupPoint, Quaternion};

/// Pair band up to which a rule integrates matrix-entry products exactly.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Exactness {
    /// Finite groups: the rule is the normalized counting measure.
    Complete,
    Band(u32),
}

impl Exactness {
    pub fn covers(&self, shell: u32) -> bool {
        match self {
            Exactness::Complete => true,
            Exactness::Band(b) => shell <= *b,
        }
    }

    fn min(self, other: Exactness) -> Exactness {
        match (self, other) {
            (Exactness::Complete, x) | (x, Exactness::Complete) => x,
            (Exactness::Band(a), Exactness::Band(b)) => Exactness::Band(a.min(b)),
        }
    }

    /// Largest covered shell, `None` when complete.
    pub fn band(&self) -> Option<u32> {
        match self {
            Exactness::Complete => None,
            Exactness::Band(b) => Some(*b),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Layout {
    Finite { order: usize },
    TorusGrid { dims: usize, per_axis: usize },
    Su2Euler,
    Product { parts: Vec<Layout>, sizes: Vec<usize> },
}

/// Nodes and weights realizing the normalized Haar integral.
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    group: GroupDescriptor,
    resolution: u32,
    nodes: Vec<GroupPoint>,
    weights: Vec<f64>,
    exactness: Exactness,
    layout: Layout,
}

impl PartialEq for QuadratureRule {
    fn eq(&self, other: &Self) -> bool {
        self.group == other.group && self.resolution == other.resolution
    }
}

impl QuadratureRule {
    pub fn group(&self) -> &GroupDescriptor {
        &self.group
    }

    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    pub fn nodes(&self) -> &[GroupPoint] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn exactness(&self) -> Exactness {
        self.exactness
    }

    /// Integrates sampled values against the rule.
    pub fn integrate<T>(&self, values: impl IntoIterator<Item = T>) -> T
    where
        T: std::ops::Mul<f64, Output = T> + std::iter::Sum<T>,
    {
        values.into_iter().zip(&self.weights).map(|(v, w)| v * *w).sum()
    }

    /// Index of the node equal to `point`, when the node set contains it.
    ///
    /// Finite groups always resolve; torus grids resolve points on the grid
    /// (within 1e-9 of a grid angle); SU(2) never does.
    pub fn node_index(&self, point: &GroupPoint) -> Option<usize> {
        locate(&self.layout, point)
    }

    /// True when the node set is a subgroup, so products of nodes are nodes.
    pub fn is_translation_closed(&self) -> bool {
        fn closed(l: &Layout) -> bool {
            match l {
                Layout::Finite { .. } | Layout::TorusGrid { .. } => true,
                Layout::Su2Euler => false,
                Layout::Product { parts, .. } => parts.iter().all(closed),
            }
        }
        closed(&self.layout)
    }

    /// Smallest positive distance from the identity to a node.
    pub fn min_identity_distance(&self) -> f64 {
        let e = self.group.identity();
        self.nodes
            .iter()
            .filter_map(|n| e.distance(n).ok())
            .filter(|d| *d > 0.0)
            .fold(f64::INFINITY, f64::min)
    }

    /// Errors unless every shell up to `shell` is covered.
    pub fn require(&self, shell: u32) -> Result<()> {
        if self.exactness.covers(shell) {
            Ok(())
        } else {
            Err(Error::ResolutionTooSmall {
                resolution: self.resolution,
                reason: format!(
                    "{} rule is exact up to shell {}, shell {shell} requested",
                    self.group,
                    self.exactness.band().unwrap_or(0)
                ),
            })
        }
    }

    /// The coarsest rule whose pair band covers `band`.
    pub fn for_band(group: &GroupDescriptor, band: u32) -> Result<QuadratureRule> {
        haar_quadrature(group, minimal_resolution(group, band))
    }
}

fn minimal_resolution(group: &GroupDescriptor, band: u32) -> u32 {
    match group {
        GroupDescriptor::Cyclic(_) | GroupDescriptor::Dihedral(_) => 1,
        GroupDescriptor::Torus(_) => 2 * band + 1,
        GroupDescriptor::Su2 => band.max(1),
        GroupDescriptor::Product(fs) => fs.iter().map(|f| minimal_resolution(f, band)).max().unwrap_or(1),
    }
}

fn locate(layout: &Layout, point: &GroupPoint) -> Option<usize> {
    match (layout, point) {
        (Layout::Finite { .. }, GroupPoint::Cyclic { k, .. }) => Some(*k as usize),
        (
            Layout::Finite { order },
            GroupPoint::Dihedral {
                rotation, reflection, ..
            },
        ) => Some(*rotation as usize + if *reflection { order / 2 } else { 0 }),
        (Layout::TorusGrid { dims, per_axis }, GroupPoint::Torus(angles)) if angles.len() == *dims => {
            let step = TAU / *per_axis as f64;
            let mut idx = 0usize;
            for t in angles {
                let j = t / step;
                let r = j.round();
                if (j - r).abs() > 1e-9 {
                    return None;
                }
                idx = idx * per_axis + (r as usize % per_axis);
            }
            Some(idx)
        }
        (Layout::Product { parts, sizes }, GroupPoint::Product(ps)) if ps.len() == parts.len() => {
            let mut idx = 0usize;
            for ((l, p), s) in parts.iter().zip(ps).zip(sizes) {
                idx = idx * s + locate(l, p)?;
            }
            Some(idx)
        }
        _ => None,
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        dp = if d != 0.0 { d } else { dp };
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Builds the normalized Haar rule for `group` at `resolution`.
pub fn haar_quadrature(group: &GroupDescriptor, resolution: u32) -> Result<QuadratureRule> {
    group.validate()?;
    if resolution == 0 {
        return Err(Error::ResolutionTooSmall {
            resolution,
            reason: "resolution must be at least 1".into(),
        });
    }
    let rule = match group {
        GroupDescriptor::Cyclic(_) | GroupDescriptor::Dihedral(_) => {
            let nodes = group.elements().expect("finite group");
            let n = nodes.len();
            QuadratureRule {
                group: group.clone(),
                resolution,
                weights: vec![1.0 / n as f64; n],
                nodes,
                exactness: Exactness::Complete,
                layout: Layout::Finite { order: n },
            }
        }
        GroupDescriptor::Torus(dims) => {
            let m = resolution as usize;
            let dims = *dims as usize;
            let total = m.pow(dims as u32);
            let mut nodes = Vec::with_capacity(total);
            for flat in 0..total {
                let mut rem = flat;
                let mut angles = vec![0.0; dims];
                for a in (0..dims).rev() {
                    angles[a] = TAU * (rem % m) as f64 / m as f64;
                    rem /= m;
                }
                nodes.push(GroupPoint::Torus(angles));
            }
            QuadratureRule {
                group: group.clone(),
                resolution,
                weights: vec![1.0 / total as f64; total],
                nodes,
                exactness: Exactness::Band((resolution - 1) / 2),
                layout: Layout::TorusGrid { dims, per_axis: m },
            }
        }
        GroupDescriptor::Su2 => {
            let r = resolution as usize;
            let n_alpha = r + 1;
            let n_gamma = 2 * r + 1;
            let n_beta = (r + 2) / 2;
            let (xs, ws) = gauss_legendre(n_beta);
            let mut nodes = Vec::with_capacity(n_alpha * n_beta * n_gamma);
            let mut weights = Vec::with_capacity(nodes.capacity());
            for a in 0..n_alpha {
                let alpha = TAU * a as f64 / n_alpha as f64;
                for (x, wb) in xs.iter().zip(&ws) {
                    let beta = x.clamp(-1.0, 1.0).acos();
                    for c in 0..n_gamma {
                        let gamma = 2.0 * TAU * c as f64 / n_gamma as f64;
                        nodes.push(GroupPoint::Su2(Quaternion::from_euler_zyz(alpha, beta, gamma)));
                        weights.push(wb / 2.0 / (n_alpha * n_gamma) as f64);
                    }
                }
            }
            QuadratureRule {
                group: group.clone(),
                resolution,
                nodes,
                weights,
                exactness: Exactness::Band(resolution),
                layout: Layout::Su2Euler,
            }
        }
        GroupDescriptor::Product(fs) => {
            let parts = fs
                .iter()
                .map(|f| haar_quadrature(f, resolution))
                .collect::<Result<Vec<_>>>()?;
            let mut nodes: Vec<Vec<GroupPoint>> = vec![Vec::new()];
            let mut weights = vec![1.0];
            for part in &parts {
                let mut next_nodes = Vec::with_capacity(nodes.len() * part.len());
                let mut next_weights = Vec::with_capacity(nodes.len() * part.len());
                for (prefix, w) in nodes.iter().zip(&weights) {
                    for (n, v) in part.nodes.iter().zip(&part.weights) {
                        let mut p = prefix.clone();
                        p.push(n.clone());
                        next_nodes.push(p);
                        next_weights.push(w * v);
                    }
                }
                nodes = next_nodes;
                weights = next_weights;
            }
            QuadratureRule {
                group: group.clone(),
                resolution,
                nodes: nodes.into_iter().map(GroupPoint::Product).collect(),
                weights,
                exactness: parts
                    .iter()
                    .map(|p| p.exactness)
                    .fold(Exactness::Complete, Exactness::min),
                layout: Layout::Product {
                    sizes: parts.iter().map(|p| p.len()).collect(),
                    parts: parts.into_iter().map(|p| p.layout).collect(),
                },
            }
        }
    };
    Ok(rule)
}
