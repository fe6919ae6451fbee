//! Precompactness diagnostics for families in `L^2(G)`: bounded samples,
//! uniform spectral tail decay and uniform equicontinuity.

pub mod family;
pub mod lemmas;
pub mod net;
pub mod profile;
pub mod verdict;

pub use family::{boundedness, builtin_family, Boundedness, FamilyDefinition, FamilyKind, FamilySpec};
pub use lemmas::{lemma31_bound_check, lemma31_with, lemma32_bound_check, lemma32_with, Lemma31, Lemma32};
pub use net::{epsilon_net, EpsilonNet};
pub use profile::{
    default_mesh, equicontinuity_profile, tail_decay_profile, ContinuityOptions, ContinuityProfile, DecayProfile,
    DualFiltration, ModulusPath,
};
pub use verdict::{diagnose_family, pego_verdict, pego_verdict_default, Conclusion, Diagnosis, PegoVerdict};
