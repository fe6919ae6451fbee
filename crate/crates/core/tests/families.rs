use compact_fourier::pego::{
    boundedness, default_mesh, diagnose_family, epsilon_net, tail_decay_profile, Conclusion, ContinuityOptions,
    DualFiltration, FamilyDefinition, FamilyKind, FamilySpec,
};
use compact_fourier::GroupDescriptor;

const EPS: [f64; 3] = [0.5, 0.1, 0.01];

fn build(group: &str, kind: FamilyKind, seed: u64) -> FamilySpec {
    FamilyDefinition::new(kind.name(), group.parse::<GroupDescriptor>().unwrap(), kind)
        .with_seed(seed)
        .build()
        .unwrap()
}

fn diagnose(k: &FamilySpec) -> compact_fourier::pego::Diagnosis {
    let f = DualFiltration::for_family(k);
    let mesh = default_mesh(k.group(), &EPS, k.cutoff());
    diagnose_family(k, &EPS, &f, &mesh, &ContinuityOptions::default()).unwrap()
}

fn audited() -> Vec<FamilySpec> {
    vec![
        build("su2", FamilyKind::ScaledConstants { r: 2.0, count: 32 }, 0),
        build("torus:1", FamilyKind::ScaledConstants { r: -1.5, count: 32 }, 0),
        build(
            "dihedral:3",
            FamilyKind::MatrixEntrySpan {
                max_shell: 2,
                bound: 1.0,
                count: 40,
            },
            11,
        ),
        build(
            "torus:1",
            FamilyKind::MatrixEntrySpan {
                max_shell: 3,
                bound: 2.0,
                count: 40,
            },
            12,
        ),
        build(
            "torus:1",
            FamilyKind::HeatKernel {
                t_min: 0.05,
                t_max: 1.0,
                count: 12,
            },
            0,
        ),
        build(
            "su2",
            FamilyKind::HeatKernel {
                t_min: 0.2,
                t_max: 2.0,
                count: 8,
            },
            0,
        ),
        build("torus:1", FamilyKind::CharacterLadder { count: 64 }, 0),
    ]
}

#[test]
fn decay_and_equicontinuity_agree() {
    for k in audited() {
        let d = diagnose(&k);
        for v in &d.verdicts {
            assert_eq!(
                v.uniform_decay.flag,
                v.equicontinuous.flag,
                "{} on {} at eps {}: {:?} / {:?}",
                k.name(),
                k.group(),
                v.eps,
                v.uniform_decay,
                v.equicontinuous
            );
            assert!(v.diagnostic.is_none());
        }
        let ladder = matches!(k.definition.kind, FamilyKind::CharacterLadder { .. });
        for v in &d.verdicts {
            assert_eq!(v.uniform_decay.flag, !ladder, "{} at {}", k.name(), v.eps);
        }
    }
}

#[test]
fn verdicts_on_the_classical_examples() {
    let k = build("torus:1", FamilyKind::ScaledConstants { r: 3.0, count: 50 }, 0);
    for v in diagnose(&k).verdicts {
        assert_eq!(v.conclusion, Conclusion::Precompact);
    }
    let k = build("su2", FamilyKind::IntegerConstants { count: 50 }, 0);
    for v in diagnose(&k).verdicts {
        assert_eq!(v.conclusion, Conclusion::NotPrecompactUnbounded);
        assert!(v.uniform_decay.flag && v.equicontinuous.flag);
    }
    let k = build("torus:1", FamilyKind::CharacterLadder { count: 64 }, 0);
    let v = &diagnose(&k).verdicts[0];
    assert_eq!(v.conclusion, Conclusion::NotPrecompactNoDecay);
    let cert = v.certificate.as_ref().unwrap();
    assert_eq!(cert.name, "n=64");
    assert!((cert.tail - 1.0).abs() < 1e-12);
}

#[test]
fn matrix_entry_span_has_no_tail_outside_its_labels() {
    let k = build(
        "dihedral:3",
        FamilyKind::MatrixEntrySpan {
            max_shell: 1,
            bound: 1.0,
            count: 30,
        },
        4,
    );
    let f = DualFiltration::for_family(&k);
    let p = tail_decay_profile(&k, &f, &[0.1]).unwrap();
    let at_one = p.steps.iter().find(|s| s.shell == 1).unwrap();
    assert!(at_one.sup_tail < 1e-12, "{}", at_one.sup_tail);
    assert!(p.steps[0].sup_tail > 0.1);
    assert!(boundedness(&k).unwrap().flag);
    for v in diagnose(&k).verdicts {
        assert_eq!(v.conclusion, Conclusion::Precompact);
    }
}

#[test]
fn nets_cover_precompact_families() {
    let opts = ContinuityOptions::default();
    let k = build("torus:1", FamilyKind::ScaledConstants { r: 2.0, count: 40 }, 0);
    for eps in [0.5, 0.1] {
        let net = epsilon_net(&k, eps, &opts).unwrap();
        assert!(net.cover_verified);
        assert!(net.center_count as f64 <= (2.0 * 2.0 / eps).ceil() + 1.0);
    }
    let k = build(
        "dihedral:3",
        FamilyKind::MatrixEntrySpan {
            max_shell: 2,
            bound: 1.0,
            count: 40,
        },
        3,
    );
    let net = epsilon_net(&k, 0.5, &opts).unwrap();
    assert!(net.cover_verified && net.max_distance < 0.5);
    let k = build(
        "cyclic:5",
        FamilyKind::Explicit {
            members: vec!["const:1".into()],
        },
        0,
    );
    assert_eq!(epsilon_net(&k, 0.1, &opts).unwrap().center_count, 1);
    let ladder = build("torus:1", FamilyKind::CharacterLadder { count: 16 }, 0);
    let err = epsilon_net(&ladder, 0.5, &opts).unwrap_err().to_string();
    assert!(err.contains("n=16"), "{err}");
}

#[test]
fn translated_families_have_the_same_profiles() {
    for k in audited() {
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(9);
        let g = k.group().random_point(&mut rng);
        let moved = k.translated(&g).unwrap();
        let (a, b) = (diagnose(&k), diagnose(&moved));
        for (x, y) in a.decay.steps.iter().zip(&b.decay.steps) {
            assert!((x.sup_tail - y.sup_tail).abs() < 1e-10, "{}", k.name());
        }
        for (x, y) in a.continuity.omega.iter().zip(&b.continuity.omega) {
            assert!((x - y).abs() < 1e-10, "{}: {x} vs {y}", k.name());
        }
    }
}
