//! Uniform tail-decay and equicontinuity profiles of a sampled family.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fourier::translate_using;
use crate::group::{sample_ball, GroupDescriptor, GroupPoint, NeighborhoodSpec};
use crate::norms::{lp_function_norm, plancherel_residual_detail, serialize_exponent};
use crate::pego::family::FamilySpec;
use crate::repr::{enumerate_dual, DualSubset, IrrepLabel};

/// `A_0 = {triv} < A_1 < ... < A_m`, one set per occupied shell.
#[derive(Clone, Debug, PartialEq)]
pub struct DualFiltration {
    shells: Vec<u32>,
    sets: Vec<DualSubset>,
}

impl DualFiltration {
    /// `A_k = {pi : shell(pi) <= s_k}` over the shells present up to `max_shell`.
    pub fn shells(group: &GroupDescriptor, max_shell: u32) -> Self {
        let labels = enumerate_dual(group, max_shell);
        let mut shells: Vec<u32> = labels.iter().map(IrrepLabel::shell).collect();
        shells.dedup();
        let sets = shells.iter().map(|s| DualSubset::shells(group, *s)).collect();
        Self { shells, sets }
    }

    pub fn for_family(k: &FamilySpec) -> Self {
        Self::shells(k.group(), k.cutoff())
    }

    /// A custom chain; it must start at `{triv}` and grow strictly.
    pub fn new(sets: Vec<DualSubset>) -> Result<Self> {
        let first = sets
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty dual filtration".into()))?;
        if first.len() != 1 || !first.iter().all(IrrepLabel::is_trivial) {
            return Err(Error::InvalidParameter("a dual filtration starts at {triv}".into()));
        }
        for w in sets.windows(2) {
            if !w[0].is_subset(&w[1]) || w[0].len() == w[1].len() {
                return Err(Error::InvalidParameter("dual filtration must grow strictly".into()));
            }
        }
        let shells = sets
            .iter()
            .map(|s| s.iter().map(IrrepLabel::shell).max().unwrap_or(0))
            .collect();
        Ok(Self { shells, sets })
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn sets(&self) -> &[DualSubset] {
        &self.sets
    }

    pub fn shell(&self, k: usize) -> u32 {
        self.shells[k]
    }

    pub fn last(&self) -> &DualSubset {
        self.sets.last().expect("nonempty")
    }

    pub fn max_shell(&self) -> u32 {
        *self.shells.last().expect("nonempty")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayStep {
    pub step: usize,
    pub shell: u32,
    pub labels: usize,
    pub tails: Vec<f64>,
    pub sup_tail: f64,
    /// First member attaining the supremum.
    pub argmax: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayWitness {
    pub eps: f64,
    pub step: Option<usize>,
    pub shell: Option<u32>,
    pub labels: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayProfile {
    pub steps: Vec<DecayStep>,
    pub witnesses: Vec<DecayWitness>,
}

impl DecayProfile {
    pub fn witness(&self, eps: f64) -> Option<&DecayWitness> {
        self.witnesses.iter().find(|w| w.eps == eps)
    }

    /// Smallest step whose sup-tail is below `eps`.
    pub fn first_below(&self, eps: f64) -> Option<usize> {
        self.steps.iter().position(|s| s.sup_tail < eps)
    }
}

/// `l2` tails of every member over the complement of each `A_k`.
///
/// The tail at the last step is the Plancherel residual; earlier tails add
/// the masses of the intervening labels as suffix sums, so each member's
/// tails are nonincreasing in `k` by construction.
pub fn tail_decay_profile(k: &FamilySpec, filtration: &DualFiltration, eps: &[f64]) -> Result<DecayProfile> {
    let h = k.harmonics();
    if let Some(l) = filtration.last().iter().find(|l| h.label_index(l).is_none()) {
        return Err(Error::OutsideCutoff(l.to_string()));
    }
    let m = filtration.len();
    let mut tails = vec![vec![0.0; k.members().len()]; m];
    for (i, (f, c)) in k.members().iter().zip(k.spectra()).enumerate() {
        let last = plancherel_residual_detail(f, c, filtration.last())?.value;
        // mass entering at step j
        let mut inc = vec![0.0; m];
        for (l, b) in c.iter() {
            if let Some(j) = filtration.sets().iter().position(|s| s.contains(l)) {
                inc[j] += l.dim() as f64 * b.iter().map(|z| z.norm_sqr()).sum::<f64>();
            }
        }
        let mut acc = last * last;
        for j in (0..m).rev() {
            tails[j][i] = acc.sqrt();
            acc += inc[j];
        }
    }
    let steps: Vec<DecayStep> = tails
        .into_iter()
        .enumerate()
        .map(|(j, t)| {
            let (argmax, sup) =
                t.iter().enumerate().fold(
                    (0, f64::NEG_INFINITY),
                    |(bi, bv), (i, v)| if *v > bv { (i, *v) } else { (bi, bv) },
                );
            DecayStep {
                step: j,
                shell: filtration.shell(j),
                labels: filtration.sets()[j].len(),
                tails: t,
                sup_tail: sup,
                argmax,
            }
        })
        .collect();
    let witnesses = eps
        .iter()
        .map(|e| {
            let step = steps.iter().position(|s| s.sup_tail < *e);
            DecayWitness {
                eps: *e,
                step,
                shell: step.map(|j| filtration.shell(j)),
                labels: step.map(|j| filtration.sets()[j].names()),
            }
        })
        .collect();
    Ok(DecayProfile { steps, witnesses })
}

/// How `||R_y f - f||_p` is computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModulusPath {
    /// `sum_pi d_pi ||(pi(y) - I) f^(pi)||_2^2` over the rule's band, plus
    /// four times the mass beyond it (`p = 2` only).
    Spectral,
    /// Translate the samples and take the quadrature `L^p` norm.
    Direct,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContinuityOptions {
    pub ball_samples: usize,
    pub p: f64,
    pub seed: u64,
    pub path: Option<ModulusPath>,
}

impl Default for ContinuityOptions {
    fn default() -> Self {
        Self {
            ball_samples: 16,
            p: 2.0,
            seed: 0,
            path: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContinuityWitness {
    pub eps: f64,
    /// Smallest `delta` the filtration cap can resolve: `eps / max(cap, 1)`.
    pub resolution_floor: f64,
    pub delta: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContinuityProfile {
    #[serde(serialize_with = "serialize_exponent")]
    pub p: f64,
    pub path: ModulusPath,
    /// Decreasing.
    pub mesh: Vec<f64>,
    pub omega: Vec<f64>,
    pub points_sampled: usize,
    pub witnesses: Vec<ContinuityWitness>,
}

impl ContinuityProfile {
    pub fn witness(&self, eps: f64) -> Option<&ContinuityWitness> {
        self.witnesses.iter().find(|w| w.eps == eps)
    }
}

/// `eps / max(cap, 1)`.
pub fn resolution_floor(eps: f64, cap: u32) -> f64 {
    eps / cap.max(1) as f64
}

/// Geometric mesh from the group's diameter down past the smallest
/// resolution floor, with every floor included.
pub fn default_mesh(group: &GroupDescriptor, eps: &[f64], cap: u32) -> Vec<f64> {
    let floors: Vec<f64> = eps.iter().map(|e| resolution_floor(*e, cap)).collect();
    let bottom = floors.iter().copied().fold(group.diameter(), f64::min) * 0.5;
    let mut mesh = Vec::new();
    let mut d = group.diameter();
    while d >= bottom {
        mesh.push(d);
        d *= std::f64::consts::FRAC_1_SQRT_2;
    }
    mesh.extend(floors);
    mesh.sort_by(|a, b| b.total_cmp(a));
    mesh.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs());
    mesh
}

fn check_mesh(mesh: &[f64]) -> Result<()> {
    if mesh.is_empty() {
        return Err(Error::InvalidParameter("empty delta mesh".into()));
    }
    if mesh.iter().any(|d| !(*d > 0.0) || !d.is_finite()) {
        return Err(Error::InvalidParameter("delta mesh must be positive".into()));
    }
    if mesh.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParameter("delta mesh must be strictly decreasing".into()));
    }
    Ok(())
}

/// `sup_f ||R_y f - f||_p` at sampled points, by the chosen path.
struct Modulus<'a> {
    k: &'a FamilySpec,
    p: f64,
    path: ModulusPath,
    /// Per member: `||f^(pi)||_2^2` per label and the mass beyond the band.
    masses: Vec<(Vec<f64>, f64)>,
}

impl<'a> Modulus<'a> {
    fn new(k: &'a FamilySpec, p: f64, path: ModulusPath) -> Result<Self> {
        let all = DualSubset::new(k.harmonics().labels().iter().cloned())?;
        let masses = k
            .members()
            .iter()
            .zip(k.spectra())
            .map(|(f, c)| {
                let per = c
                    .blocks()
                    .iter()
                    .map(|b| b.iter().map(|z| z.norm_sqr()).sum())
                    .collect();
                Ok((per, plancherel_residual_detail(f, c, &all)?.beyond_cutoff))
            })
            .collect::<Result<_>>()?;
        Ok(Self { k, p, path, masses })
    }

    fn at(&self, y: &GroupPoint) -> Result<f64> {
        let k = self.k;
        let h = k.harmonics();
        let mut best: f64 = 0.0;
        match self.path {
            ModulusPath::Spectral => {
                let reps: Vec<_> = h.labels().iter().map(|l| h.rep(l, y)).collect::<Result<_>>()?;
                for (c, (per, beyond)) in k.spectra().iter().zip(&self.masses) {
                    // ||(R - I) B||^2 = 2 ||B||^2 - 2 Re tr(B^* R B) for unitary R
                    let mut s = 0.0;
                    for (((l, b), r), m) in c.iter().zip(&reps).zip(per) {
                        if *m == 0.0 {
                            continue;
                        }
                        let d = l.dim();
                        let mut cross = 0.0;
                        for i in 0..d {
                            for j in 0..d {
                                let mut rb = num_complex::Complex64::new(0.0, 0.0);
                                for q in 0..d {
                                    rb += r[(i, q)] * b[(q, j)];
                                }
                                cross += (b[(i, j)].conj() * rb).re;
                            }
                        }
                        s += d as f64 * 2.0 * (m - cross);
                    }
                    best = best.max((s.max(0.0) + 4.0 * beyond).sqrt());
                }
            }
            ModulusPath::Direct => {
                for f in k.members() {
                    let d = translate_using(h, f, y)?.sub(f)?;
                    best = best.max(lp_function_norm(&d, self.p)?);
                }
            }
        }
        Ok(best)
    }
}

/// `sup_f ||R_y f - f||_p` at one point, by the chosen path.
pub fn family_modulus_at(k: &FamilySpec, y: &GroupPoint, p: f64, path: ModulusPath) -> Result<f64> {
    Modulus::new(k, p, path)?.at(y)
}

/// `omega(delta) = max_f max_{y sampled, d(e, y) <= delta} ||R_y f - f||_p`.
///
/// Points are pooled over all mesh levels and the rule's nodes, so `omega`
/// is nonincreasing along the mesh by construction. The `eps` witness is the
/// largest mesh `delta` at or above the resolution floor with `omega < eps`.
pub fn equicontinuity_profile(
    k: &FamilySpec,
    mesh: &[f64],
    opts: &ContinuityOptions,
    eps: &[f64],
) -> Result<ContinuityProfile> {
    check_mesh(mesh)?;
    if opts.ball_samples == 0 {
        return Err(Error::InvalidParameter("ball sample count must be >= 1".into()));
    }
    if opts.p.is_nan() || opts.p < 1.0 {
        return Err(Error::InvalidExponent(opts.p));
    }
    let path = match opts.path {
        Some(ModulusPath::Spectral) if opts.p != 2.0 => {
            return Err(Error::InvalidParameter("the spectral modulus path needs p = 2".into()))
        }
        Some(p) => p,
        None if opts.p == 2.0 => ModulusPath::Spectral,
        None => ModulusPath::Direct,
    };
    let group = k.group();
    let e = group.identity();
    let mut points: Vec<GroupPoint> = Vec::new();
    for d in mesh {
        points.extend(sample_ball(
            group,
            &NeighborhoodSpec::new(*d, opts.ball_samples, opts.seed)?,
        ));
    }
    for t in k.rule().nodes() {
        if e.distance(t)? <= mesh[0] {
            points.push(t.clone());
        }
    }
    let modulus = Modulus::new(k, opts.p, path)?;
    let mut scored = Vec::with_capacity(points.len());
    for y in &points {
        let d = e.distance(y)?;
        let m = if d == 0.0 { 0.0 } else { modulus.at(y)? };
        scored.push((d, m));
    }
    let omega: Vec<f64> = mesh
        .iter()
        .map(|delta| {
            scored
                .iter()
                .filter(|(d, _)| *d <= delta + 1e-12)
                .map(|(_, m)| *m)
                .fold(0.0, f64::max)
        })
        .collect();
    let cap = k.cutoff();
    let witnesses = eps
        .iter()
        .map(|e| {
            let floor = resolution_floor(*e, cap);
            let delta = mesh
                .iter()
                .zip(&omega)
                .find(|(d, w)| **d >= floor * (1.0 - 1e-12) && **w < *e)
                .map(|(d, _)| *d);
            ContinuityWitness {
                eps: *e,
                resolution_floor: floor,
                delta,
            }
        })
        .collect();
    Ok(ContinuityProfile {
        p: opts.p,
        path,
        mesh: mesh.to_vec(),
        omega,
        points_sampled: scored.len(),
        witnesses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pego::family::{FamilyDefinition, FamilyKind};

    fn family(group: &str, kind: FamilyKind) -> FamilySpec {
        FamilyDefinition::new("t", group.parse().unwrap(), kind)
            .build()
            .unwrap()
    }

    #[test]
    fn filtration_shapes() {
        let f = DualFiltration::shells(&"dihedral:5".parse().unwrap(), 10);
        assert_eq!(f.sets().iter().map(|s| s.len()).collect::<Vec<_>>(), vec![1, 2, 3, 4]);
        let t = DualFiltration::shells(&"torus:1".parse().unwrap(), 3);
        assert_eq!(t.sets().iter().map(|s| s.len()).collect::<Vec<_>>(), vec![1, 3, 5, 7]);
        assert!(DualFiltration::new(vec![]).is_err());
        assert!(DualFiltration::new(vec![t.sets()[1].clone()]).is_err());
        assert!(DualFiltration::new(vec![t.sets()[0].clone(), t.sets()[0].clone()]).is_err());
    }

    #[test]
    fn constants_have_no_tail() {
        let k = family("su2", FamilyKind::ScaledConstants { r: 2.0, count: 6 });
        let p = tail_decay_profile(&k, &DualFiltration::for_family(&k), &[0.1]).unwrap();
        assert!(p.steps[0].sup_tail < 1e-12);
        assert_eq!(p.witness(0.1).unwrap().step, Some(0));
    }

    #[test]
    fn ladder_tails_are_one_below_the_top() {
        let k = family("torus:1", FamilyKind::CharacterLadder { count: 12 });
        let p = tail_decay_profile(&k, &DualFiltration::for_family(&k), &[0.5]).unwrap();
        for s in &p.steps {
            assert!((s.sup_tail - 1.0).abs() < 1e-12, "shell {}", s.shell);
        }
        assert_eq!(p.witness(0.5).unwrap().step, None);
        let full = DualFiltration::shells(k.group(), 12);
        let q = tail_decay_profile(&k, &full, &[0.5]).unwrap();
        assert!(q.steps.last().unwrap().sup_tail < 1e-12);
        assert!(tail_decay_profile(&k, &DualFiltration::shells(k.group(), 13), &[]).is_err());
    }

    #[test]
    fn single_character_modulus() {
        let k = family(
            "torus:1",
            FamilyKind::Explicit {
                members: vec!["char:1".into()],
            },
        );
        let mesh = [1.0, 0.5, 0.25, 0.1];
        let prof = equicontinuity_profile(&k, &mesh, &ContinuityOptions::default(), &[]).unwrap();
        for (d, w) in mesh.iter().zip(&prof.omega) {
            assert!((w - 2.0 * (d / 2.0).sin()).abs() < 1e-12, "delta {d}");
        }
        assert!(equicontinuity_profile(&k, &[0.1, 0.5], &ContinuityOptions::default(), &[]).is_err());
        assert!(equicontinuity_profile(&k, &[0.0], &ContinuityOptions::default(), &[]).is_err());
    }

    #[test]
    fn mesh_contains_floors() {
        let g: GroupDescriptor = "torus:1".parse().unwrap();
        let m = default_mesh(&g, &[0.5, 0.01], 16);
        assert!(m.contains(&(0.01 / 16.0)) && m.contains(&(0.5 / 16.0)));
        assert!(m.windows(2).all(|w| w[0] > w[1]));
        assert!((m[0] - std::f64::consts::PI).abs() < 1e-15);
    }
}
