use serde::Serialize;

use crate::error::Result;
use crate::norms::lp_function_norm;
use crate::pego::family::{boundedness, Boundedness, FamilySpec};
use crate::pego::profile::{
    default_mesh, equicontinuity_profile, tail_decay_profile, ContinuityOptions, ContinuityProfile, DecayProfile,
    DualFiltration,
};

/// Relative closeness of a member's tail to its norm that makes the member a
/// certificate: its spectrum lies entirely outside the largest `A`.
pub const CERTIFICATE_FRACTION: f64 = 1.0 - 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Conclusion {
    Precompact,
    NotPrecompactUnbounded,
    NotPrecompactNoDecay,
    InconclusiveAtResolution,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquicontinuityFlag {
    pub flag: bool,
    pub witness_delta: Option<f64>,
    pub resolution_floor: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayFlag {
    pub flag: bool,
    pub witness_step: Option<usize>,
    pub witness_shell: Option<u32>,
    pub witness_labels: Option<Vec<String>>,
}

/// A member whose whole spectrum sits outside the largest filtration set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub member: usize,
    pub name: String,
    pub tail: f64,
    pub norm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PegoVerdict {
    pub family: String,
    pub eps: f64,
    /// The members are a finite sample of a generated family.
    pub sampled_evidence: bool,
    pub bounded: Boundedness,
    pub equicontinuous: EquicontinuityFlag,
    pub uniform_decay: DecayFlag,
    pub conclusion: Conclusion,
    pub certificate: Option<Certificate>,
    pub diagnostic: Option<String>,
}

/// Applies the implication table to precomputed profiles.
///
/// Unbounded samples are never precompact. For bounded ones, decay and
/// equicontinuity must agree: both true gives `precompact`, disagreement is
/// reported as a diagnostic and `inconclusive_at_resolution`, and both false
/// gives `not_precompact_no_decay` only with a certificate member.
pub fn verdict_from_profiles(
    k: &FamilySpec,
    eps: f64,
    bounded: &Boundedness,
    decay: &DecayProfile,
    continuity: &ContinuityProfile,
) -> Result<PegoVerdict> {
    let first = decay.first_below(eps);
    let decay_flag = DecayFlag {
        flag: first.is_some(),
        witness_step: first,
        witness_shell: first.map(|j| decay.steps[j].shell),
        witness_labels: decay.witness(eps).and_then(|w| w.labels.clone()),
    };
    let floor = crate::pego::profile::resolution_floor(eps, k.cutoff());
    let delta = continuity
        .mesh
        .iter()
        .zip(&continuity.omega)
        .find(|(d, w)| **d >= floor * (1.0 - 1e-12) && **w < eps)
        .map(|(d, _)| *d);
    let equi = EquicontinuityFlag {
        flag: delta.is_some(),
        witness_delta: delta,
        resolution_floor: floor,
    };

    let last = decay.steps.last().expect("nonempty filtration");
    let mut certificate = None;
    for (i, (f, tail)) in k.members().iter().zip(&last.tails).enumerate() {
        let norm = lp_function_norm(f, 2.0)?;
        if *tail >= eps && *tail >= CERTIFICATE_FRACTION * norm {
            certificate = Some(Certificate {
                member: i,
                name: k.member_names()[i].clone(),
                tail: *tail,
                norm,
            });
        }
    }

    let mut diagnostic = None;
    let conclusion = if !bounded.flag {
        Conclusion::NotPrecompactUnbounded
    } else if decay_flag.flag && equi.flag {
        Conclusion::Precompact
    } else if decay_flag.flag != equi.flag {
        diagnostic = Some(format!(
            "decay ({}) and equicontinuity ({}) disagree at eps = {eps}; refine the resolution",
            decay_flag.flag, equi.flag
        ));
        Conclusion::InconclusiveAtResolution
    } else if certificate.is_some() {
        Conclusion::NotPrecompactNoDecay
    } else {
        Conclusion::InconclusiveAtResolution
    };
    if conclusion != Conclusion::NotPrecompactNoDecay {
        certificate = None;
    }
    Ok(PegoVerdict {
        family: k.name().to_string(),
        eps,
        sampled_evidence: k.is_sampled(),
        bounded: bounded.clone(),
        equicontinuous: equi,
        uniform_decay: decay_flag,
        conclusion,
        certificate,
        diagnostic,
    })
}

/// Profiles and verdicts for several tolerances at once.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Diagnosis {
    pub bounded: Boundedness,
    pub decay: DecayProfile,
    pub continuity: ContinuityProfile,
    pub verdicts: Vec<PegoVerdict>,
}

pub fn diagnose_family(
    k: &FamilySpec,
    eps: &[f64],
    filtration: &DualFiltration,
    mesh: &[f64],
    opts: &ContinuityOptions,
) -> Result<Diagnosis> {
    let bounded = boundedness(k)?;
    let decay = tail_decay_profile(k, filtration, eps)?;
    let continuity = equicontinuity_profile(k, mesh, opts, eps)?;
    let verdicts = eps
        .iter()
        .map(|e| verdict_from_profiles(k, *e, &bounded, &decay, &continuity))
        .collect::<Result<_>>()?;
    Ok(Diagnosis {
        bounded,
        decay,
        continuity,
        verdicts,
    })
}

/// Runs all three tests at one tolerance.
pub fn pego_verdict(k: &FamilySpec, eps: f64, filtration: &DualFiltration, mesh: &[f64]) -> Result<PegoVerdict> {
    let d = diagnose_family(k, &[eps], filtration, mesh, &ContinuityOptions::default())?;
    Ok(d.verdicts.into_iter().next().expect("one tolerance"))
}

/// [`pego_verdict`] with the family's own filtration and the default mesh.
pub fn pego_verdict_default(k: &FamilySpec, eps: f64) -> Result<PegoVerdict> {
    let filtration = DualFiltration::for_family(k);
    let mesh = default_mesh(k.group(), &[eps], k.cutoff());
    pego_verdict(k, eps, &filtration, &mesh)
}
