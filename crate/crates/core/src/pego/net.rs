use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fourier::{FourierCoefficients, SampledFunction};
use crate::norms::lp_function_norm;
use crate::pego::family::FamilySpec;
use crate::pego::profile::{default_mesh, ContinuityOptions, DualFiltration};
use crate::pego::verdict::{diagnose_family, Conclusion};
use crate::repr::{CMatrix, DualSubset};

#[derive(Clone, Debug, Serialize)]
pub struct EpsilonNet {
    pub eps: f64,
    pub a_used: Vec<String>,
    pub grid_spacing: f64,
    #[serde(skip)]
    pub centers: Vec<FourierCoefficients>,
    pub center_count: usize,
    /// Largest member-to-nearest-center `L2` distance.
    pub max_distance: f64,
    pub cover_verified: bool,
}

/// A finite `eps`-net for a family certified precompact at `eps / 2`.
///
/// With `A` the decay witness at `eps / 2`, each member is projected to
/// `v = (sqrt(d_pi) f^(pi))_{pi in A}`, whose Euclidean norm is the `L2`
/// norm of the projection. Snapping the `2D` real coordinates
/// (`D = sum_A d_pi^2`) to a grid of spacing `eps / sqrt(2D)` moves the
/// projection by at most `eps / 2`, and the tail outside `A` is below
/// `eps / 2`, so the snapped centers cover. Every member is then checked
/// against every center by quadrature.
pub fn epsilon_net(k: &FamilySpec, eps: f64, opts: &ContinuityOptions) -> Result<EpsilonNet> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::InvalidParameter(format!("eps = {eps}")));
    }
    let half = eps / 2.0;
    let filtration = DualFiltration::for_family(k);
    let mesh = default_mesh(k.group(), &[half], k.cutoff());
    let diag = diagnose_family(k, &[half], &filtration, &mesh, opts)?;
    let v = &diag.verdicts[0];
    if v.conclusion != Conclusion::Precompact {
        let reason = match &v.certificate {
            Some(c) => format!(
                "verdict {:?} at eps/2; certificate member {} ({}) has tail {} outside the largest A",
                v.conclusion, c.member, c.name, c.tail
            ),
            None => format!("verdict {:?} at eps/2", v.conclusion),
        };
        return Err(Error::NotPrecompact {
            name: k.name().to_string(),
            eps,
            reason,
        });
    }
    let step = v
        .uniform_decay
        .witness_step
        .expect("precompact implies a decay witness");
    let a: &DualSubset = &filtration.sets()[step];
    let labels: Vec<_> = a.iter().cloned().collect();
    let dim: usize = labels.iter().map(|l| l.dim() * l.dim()).sum();
    let h_spacing = eps / ((2 * dim) as f64).sqrt();

    let mut keys: BTreeMap<Vec<i64>, usize> = BTreeMap::new();
    let mut centers = Vec::new();
    for c in k.spectra() {
        let mut key = Vec::with_capacity(2 * dim);
        for l in &labels {
            let s = (l.dim() as f64).sqrt();
            for z in c.get(l).expect("A lies inside the band").iter() {
                key.push((z.re * s / h_spacing).round() as i64);
                key.push((z.im * s / h_spacing).round() as i64);
            }
        }
        if keys.contains_key(&key) {
            continue;
        }
        let mut at = 0;
        let blocks: Vec<CMatrix> = labels
            .iter()
            .map(|l| {
                let d = l.dim();
                let s = (d as f64).sqrt();
                // column-major, matching the iteration order above
                let b = CMatrix::from_fn(d, d, |i, j| {
                    let idx = at + 2 * (j * d + i);
                    Complex64::new(key[idx] as f64, key[idx + 1] as f64) * (h_spacing / s)
                });
                at += 2 * d * d;
                b
            })
            .collect();
        let shell = labels.iter().map(|l| l.shell()).max().unwrap_or(0);
        keys.insert(key, centers.len());
        centers.push(FourierCoefficients::from_parts(
            k.group().clone(),
            shell,
            labels.clone(),
            blocks,
            None,
        )?);
    }

    let h = k.harmonics();
    let center_fns: Vec<SampledFunction> = centers.iter().map(|c| h.synthesize(c)).collect::<Result<_>>()?;
    let mut max_distance: f64 = 0.0;
    for f in k.members() {
        let mut best = f64::INFINITY;
        for c in &center_fns {
            best = best.min(lp_function_norm(&f.sub(c)?, 2.0)?);
        }
        max_distance = max_distance.max(best);
    }
    Ok(EpsilonNet {
        eps,
        a_used: a.names(),
        grid_spacing: h_spacing,
        center_count: centers.len(),
        centers,
        max_distance,
        cover_verified: max_distance < eps,
    })
}
