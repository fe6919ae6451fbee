//! The two spectral/continuity bounds behind the precompactness theorem.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fourier::{dirac_net_element, translate_using, Harmonics, SampledFunction, Translator};
use crate::group::{sample_ball, GroupPoint, NeighborhoodSpec};
use crate::norms::{lp_function_norm, lp_oplus_where, operator_norm, plancherel_residual, ExponentPair};
use crate::repr::{CMatrix, DualSubset};

/// Additive slack of both inequality checks.
pub const LEMMA_SLACK: f64 = 1e-8;

/// Threshold on `||e_U^(pi)||_op` that defines `A`.
pub const NET_THRESHOLD: f64 = 0.5;

/// `l^q` norm of `f^` over the labels of `h` outside `a`; `q = 2` uses the
/// Plancherel residual.
fn tail_outside(h: &Harmonics, f: &SampledFunction, a: &DualSubset, q: f64) -> Result<f64> {
    let c = h.forward(f)?;
    if q == 2.0 {
        plancherel_residual(f, &c, a)
    } else {
        lp_oplus_where(&c, q, |l| !a.contains(l))
    }
}

fn truncated(h: &Harmonics, q: f64) -> bool {
    q != 2.0 && !h.group().is_finite()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Lemma31 {
    pub radius: f64,
    /// `{pi : ||e_U^(pi)||_op > 1/2}`.
    pub a: Vec<String>,
    pub tail: f64,
    pub rhs: f64,
    pub satisfied: bool,
    /// The tail only sees labels inside the rule's band.
    pub tail_truncated: bool,
    pub support_nodes: usize,
    pub points_sampled: usize,
}

/// `||f^||_{l^p'} over (dual \ A) <= 2 sup_{y in U} ||f - f(. y^-1)||_p`.
pub fn lemma31_bound_check(f: &SampledFunction, u: &NeighborhoodSpec, pair: ExponentPair) -> Result<Lemma31> {
    let h = Harmonics::full(f.rule().clone())?;
    lemma31_with(&h, f, u, pair)
}

/// [`lemma31_bound_check`] with the labels and basis frame of `h`.
pub fn lemma31_with(h: &Harmonics, f: &SampledFunction, u: &NeighborhoodSpec, pair: ExponentPair) -> Result<Lemma31> {
    let rule = f.rule();
    let e_u = dirac_net_element(rule, u)?;
    let ec = h.forward(&e_u)?;
    let a = DualSubset::new(
        ec.iter()
            .filter(|(_, b)| operator_norm(b) > NET_THRESHOLD)
            .map(|(l, _)| l.clone()),
    )?;
    let tail = tail_outside(h, f, &a, pair.conj)?;
    let mut points: Vec<GroupPoint> = rule
        .nodes()
        .iter()
        .zip(e_u.values())
        .filter(|(_, v)| v.re > 0.0)
        .map(|(t, _)| t.clone())
        .collect();
    let support_nodes = points.len();
    points.extend(sample_ball(rule.group(), u));
    let shift = Translator::new(h, f)?;
    let mut sup: f64 = 0.0;
    for y in &points {
        let shifted = shift.apply(&y.inverse())?;
        sup = sup.max(lp_function_norm(&f.sub(&shifted)?, pair.p)?);
    }
    let rhs = 2.0 * sup;
    Ok(Lemma31 {
        radius: u.radius,
        a: a.names(),
        tail,
        rhs,
        satisfied: tail <= rhs + LEMMA_SLACK,
        tail_truncated: truncated(h, pair.conj),
        support_nodes,
        points_sampled: points.len(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Lemma32 {
    pub lhs: f64,
    /// `sup_{pi in A} ||pi(y) - I||_op`.
    pub shift: f64,
    pub head_term: f64,
    pub tail_term: f64,
    pub satisfied: bool,
    pub tail_truncated: bool,
}

/// `||R_y f - f||_p' <= sup_A ||pi(y) - I|| (sum_A d ||f^||_p^p)^(1/p) + 2 ||f^||_{l^p} over (dual \ A)`.
pub fn lemma32_bound_check(f: &SampledFunction, y: &GroupPoint, a: &DualSubset, pair: ExponentPair) -> Result<Lemma32> {
    let h = Harmonics::full(f.rule().clone())?;
    lemma32_with(&h, f, y, a, pair)
}

/// [`lemma32_bound_check`] with the labels and basis frame of `h`.
pub fn lemma32_with(
    h: &Harmonics,
    f: &SampledFunction,
    y: &GroupPoint,
    a: &DualSubset,
    pair: ExponentPair,
) -> Result<Lemma32> {
    if let Some(l) = a.iter().find(|l| h.label_index(l).is_none()) {
        return Err(Error::OutsideCutoff(l.to_string()));
    }
    let lhs = lp_function_norm(&translate_using(h, f, y)?.sub(f)?, pair.conj)?;
    let mut shift: f64 = 0.0;
    for l in a.iter() {
        let d = l.dim();
        shift = shift.max(operator_norm(&(h.rep(l, y)? - CMatrix::identity(d, d))));
    }
    let c = h.forward(f)?;
    let head = shift * lp_oplus_where(&c, pair.p, |l| a.contains(l))?;
    let tail = 2.0 * tail_outside(h, f, a, pair.p)?;
    Ok(Lemma32 {
        lhs,
        shift,
        head_term: head,
        tail_term: tail,
        satisfied: lhs <= head + tail + LEMMA_SLACK,
        tail_truncated: truncated(h, pair.p),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::FunctionSpec;
    use crate::quadrature::haar_quadrature;
    use std::sync::Arc;

    fn setup(group: &str, r: u32, spec: &str) -> (Harmonics, SampledFunction) {
        let rule = Arc::new(haar_quadrature(&group.parse().unwrap(), r).unwrap());
        let h = Harmonics::full(rule).unwrap();
        let f = FunctionSpec::parse(h.group(), spec).unwrap().sample(&h).unwrap();
        (h, f)
    }

    #[test]
    fn constant_function_is_trivial() {
        let (h, f) = setup("su2", 4, "const:1");
        let u = NeighborhoodSpec::new(1.0, 8, 1).unwrap();
        let r = lemma31_with(&h, &f, &u, ExponentPair::new(2.0).unwrap()).unwrap();
        assert!(r.tail < 1e-12 && r.rhs < 1e-12 && r.satisfied);
        let y = h
            .group()
            .random_point(&mut <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(2));
        let triv = DualSubset::shells(h.group(), 0);
        let r = lemma32_with(&h, &f, &y, &triv, ExponentPair::new(1.0).unwrap()).unwrap();
        assert!(r.lhs < 1e-12 && r.head_term < 1e-12 && r.tail_term < 1e-12 && r.satisfied);
    }

    #[test]
    fn character_closed_forms() {
        let (h, f) = setup("torus:1", 65, "char:5");
        let u = NeighborhoodSpec::new(0.2, 21, 0).unwrap();
        let r = lemma31_with(&h, &f, &u, ExponentPair::new(2.0).unwrap()).unwrap();
        let expected_rhs = 2.0 * 2.0 * (5.0 * 0.2 / 2.0f64).sin();
        assert!((r.rhs - expected_rhs).abs() < 1e-9, "{} vs {expected_rhs}", r.rhs);
        assert!(r.tail < 1e-12 || (r.tail - 1.0).abs() < 1e-12, "{}", r.tail);
        assert!(r.satisfied);

        let (h, f) = setup("torus:1", 33, "char:2");
        let phi = 0.7;
        let y = GroupPoint::torus(vec![phi]);
        let a = DualSubset::shells(h.group(), 2);
        for p in [1.0, 2.0] {
            let r = lemma32_with(&h, &f, &y, &a, ExponentPair::new(p).unwrap()).unwrap();
            let exact = (Complex::from_polar(1.0, 2.0 * phi) - 1.0).norm();
            assert!((r.lhs - exact).abs() < 1e-12);
            assert!((r.head_term - exact).abs() < 1e-12);
            assert!(r.tail_term < 1e-12 && r.satisfied);
        }
    }

    type Complex = num_complex::Complex64;

    #[test]
    fn a_outside_cutoff() {
        let (h, f) = setup("torus:1", 9, "char:1");
        let a = DualSubset::shells(h.group(), 6);
        assert!(matches!(
            lemma32_with(
                &h,
                &f,
                &GroupPoint::torus(vec![0.1]),
                &a,
                ExponentPair::new(2.0).unwrap()
            ),
            Err(Error::OutsideCutoff(_))
        ));
    }
}
