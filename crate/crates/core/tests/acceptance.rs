//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use compact_fourier::audit::{run_suite, AuditConfig, Suite, SuiteReport};
use compact_fourier::fourier::{inverse, random_band_limited};
use compact_fourier::norms::ExponentPair;
use compact_fourier::pego::{
    default_mesh, diagnose_family, epsilon_net, lemma32_with, tail_decay_profile, Conclusion, ContinuityOptions,
    Diagnosis, DualFiltration, FamilyDefinition, FamilyKind, FamilySpec,
};
use compact_fourier::{haar_quadrature, DualSubset, GroupDescriptor, GroupPoint, Harmonics};
use nalgebra::Matrix2;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GROUPS: [&str; 4] = ["cyclic:8", "dihedral:3", "torus:1", "su2"];
const PLANCHEREL_REL: f64 = 1e-10;
const FRAME_AGREEMENT: f64 = 1e-9;
const EQUALITY_TOL: f64 = 1e-9;
const ZERO_TAIL: f64 = 1e-12;
const EPS: [f64; 3] = [0.5, 0.1, 0.01];
const FRAME_SEED: u64 = 77;

fn group(s: &str) -> GroupDescriptor {
    s.parse().unwrap()
}

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn suite(s: Suite, g: &str, samples: usize, seed: u64, frame: Option<u64>) -> Result<SuiteReport, String> {
    let mut cfg = AuditConfig::new(group(g), samples, seed);
    cfg.frame_seed = frame;
    run_suite(s, &cfg).map_err(|e| format!("{s} on {g}: {e}"))
}

fn passed(r: &SuiteReport) -> Result<(), String> {
    match r.checks.iter().find(|c| !c.passed) {
        None => Ok(()),
        Some(c) => Err(format!(
            "{}/{} on {} {}: {:e} {} {:e}",
            r.suite, c.property, r.group, c.case, c.lhs, c.relation, c.rhs
        )),
    }
}

/// Spectral mass computed without the crate's representations: a direct
/// DFT on the abelian groups, hand-built irreps of D_3, and on SU(2) the
/// norm re-integrated on a finer, disjoint rule.
fn oracle_mass_and_norm(f: &compact_fourier::SampledFunction, h: &Harmonics) -> (f64, f64) {
    let rule = f.rule();
    let w = rule.weights();
    let norm2: f64 = rule.integrate(f.values().iter().map(|z| z.norm_sqr()));
    match rule.group() {
        GroupDescriptor::Cyclic(n) => {
            let n = *n as i64;
            let mass = (0..n)
                .map(|k| {
                    rule.nodes()
                        .iter()
                        .zip(f.values())
                        .zip(w)
                        .map(|((t, v), wt)| match t {
                            GroupPoint::Cyclic { k: j, .. } => {
                                v * Complex64::from_polar(*wt, -2.0 * PI * (k * *j as i64) as f64 / n as f64)
                            }
                            _ => unreachable!(),
                        })
                        .sum::<Complex64>()
                        .norm_sqr()
                })
                .sum();
            (mass, norm2)
        }
        GroupDescriptor::Torus(1) => {
            let band = h.cutoff() as i64;
            let mass = (-band..=band)
                .map(|k| {
                    rule.nodes()
                        .iter()
                        .zip(f.values())
                        .zip(w)
                        .map(|((t, v), wt)| match t {
                            GroupPoint::Torus(x) => v * Complex64::from_polar(*wt, -(k as f64) * x[0]),
                            _ => unreachable!(),
                        })
                        .sum::<Complex64>()
                        .norm_sqr()
                })
                .sum();
            (mass, norm2)
        }
        GroupDescriptor::Dihedral(3) => {
            let c = Complex64::new((2.0 * PI / 3.0).cos(), 0.0);
            let s = Complex64::new((2.0 * PI / 3.0).sin(), 0.0);
            let rot = Matrix2::new(c, -s, s, c);
            let refl = Matrix2::new(
                Complex64::new(1.0, 0.0),
                0.0.into(),
                0.0.into(),
                Complex64::new(-1.0, 0.0),
            );
            let (mut triv, mut sign, mut planar) = (Complex64::default(), Complex64::default(), Matrix2::zeros());
            for ((t, v), wt) in rule.nodes().iter().zip(f.values()).zip(w) {
                let GroupPoint::Dihedral {
                    rotation, reflection, ..
                } = t
                else {
                    unreachable!()
                };
                let mut m = rot.pow(*rotation);
                if *reflection {
                    m *= refl;
                }
                let sg = if *reflection { -1.0 } else { 1.0 };
                triv += v * *wt;
                sign += v * *wt * sg;
                planar += m.adjoint() * (v * *wt);
            }
            let mass = triv.norm_sqr() + sign.norm_sqr() + 2.0 * planar.iter().map(|z| z.norm_sqr()).sum::<f64>();
            (mass, norm2)
        }
        GroupDescriptor::Su2 => {
            let c = h.forward(f).unwrap();
            let mass = c
                .iter()
                .map(|(l, b)| l.dim() as f64 * b.iter().map(|z| z.norm_sqr()).sum::<f64>())
                .sum();
            let fine = haar_quadrature(rule.group(), 2 * h.cutoff() + 3).unwrap();
            let values = inverse(&c, fine.nodes()).unwrap();
            let fine_norm2 = fine.integrate(values.iter().map(|z| z.norm_sqr()));
            (mass, fine_norm2)
        }
        other => panic!("no oracle for {other}"),
    }
}

fn criterion1() -> Outcome {
    let mut worst: f64 = 0.0;
    for g in GROUPS {
        let cfg = AuditConfig::new(group(g), 200, 1);
        let h = Harmonics::full(cfg.rule().map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        for i in 0..200 {
            let f = random_band_limited(&h, &mut rng).map_err(|e| e.to_string())?;
            let (mass, norm2) = oracle_mass_and_norm(&f, &h);
            let crate_mass: f64 = h
                .forward(&f)
                .map_err(|e| e.to_string())?
                .iter()
                .map(|(l, b)| l.dim() as f64 * b.iter().map(|z| z.norm_sqr()).sum::<f64>())
                .sum();
            let rel = ((mass - norm2).abs()).max((crate_mass - mass).abs()) / norm2;
            worst = worst.max(rel);
            ensure(rel <= PLANCHEREL_REL, || {
                format!("{g} #{i}: relative Plancherel gap {rel:e}")
            })?;
        }
        passed(&suite(Suite::HausdorffYoung, g, 200, 1, None)?)?;
    }
    Ok(format!(
        "800 functions, worst relative Plancherel gap {worst:.2e}; HY p in {{1, 4/3, 2}} all hold"
    ))
}

fn criterion2() -> Outcome {
    let mut noncommutative = Vec::new();
    for g in GROUPS {
        let r = suite(Suite::Identities, g, 100, 2, None)?;
        passed(&r)?;
        if let Some(c) = r.checks.iter().find(|c| c.property == "order_matters") {
            noncommutative.push(format!("{g} {:.2}", c.lhs));
        }
    }
    ensure(!noncommutative.is_empty(), || {
        "no noncommutative group exercised".into()
    })?;
    Ok(format!(
        "100 triples per group; max ||g^f^ - f^g^||: {}",
        noncommutative.join(", ")
    ))
}

fn criterion3() -> Outcome {
    let mut n = 0;
    for (g, res) in [("dihedral:3", None), ("su2", Some(4)), ("su2", Some(9))] {
        let mut cfg = AuditConfig::new(group(g), 1, 0);
        cfg.band = Some(if g == "su2" { 4 } else { 0 });
        cfg.resolution = res;
        let r = run_suite(Suite::Schur, &cfg).map_err(|e| e.to_string())?;
        passed(&r)?;
        n += r.checks.len() - 1;
    }
    Ok(format!(
        "Gram = delta/d and entry transforms = E_ji/d on D_3 and SU(2) bands 4 and 9 ({n} entries)"
    ))
}

fn criterion4() -> Outcome {
    for g in GROUPS {
        passed(&suite(Suite::Lemma31, g, 50, 4, None)?)?;
    }
    Ok("50 (f, delta) pairs per group, p in {1, 2}".into())
}

fn criterion5() -> Outcome {
    for g in GROUPS {
        passed(&suite(Suite::Lemma32, g, 50, 5, None)?)?;
    }
    let rule = Arc::new(haar_quadrature(&group("torus:1"), 33).unwrap());
    let h = Harmonics::full(rule.clone()).unwrap();
    let f = compact_fourier::SampledFunction::from_fn(&rule, |t| match t {
        GroupPoint::Torus(x) => Complex64::from_polar(1.0, 2.0 * x[0]),
        _ => unreachable!(),
    })
    .unwrap();
    let a = DualSubset::shells(h.group(), 2);
    let mut worst: f64 = 0.0;
    for phi in [0.3, 1.0, PI / 2.0, 1.4] {
        let exact = (Complex64::from_polar(1.0, 2.0 * phi) - 1.0).norm();
        for p in [1.0, 2.0] {
            let r = lemma32_with(&h, &f, &GroupPoint::torus(vec![phi]), &a, ExponentPair::new(p).unwrap())
                .map_err(|e| e.to_string())?;
            let gap = (r.lhs - r.head_term).abs().max((r.lhs - exact).abs());
            worst = worst.max(gap);
            ensure(gap <= EQUALITY_TOL && r.tail_term <= EQUALITY_TOL, || {
                format!(
                    "phi={phi} p={p}: lhs {} head {} tail {}",
                    r.lhs, r.head_term, r.tail_term
                )
            })?;
        }
    }
    Ok(format!(
        "50 triples per group; single character equality gap {worst:.1e}"
    ))
}

fn build(g: &str, kind: FamilyKind, seed: u64) -> FamilySpec {
    FamilyDefinition::new(kind.name(), group(g), kind)
        .with_seed(seed)
        .build()
        .unwrap()
}

fn diagnose(k: &FamilySpec, eps: &[f64]) -> Diagnosis {
    let f = DualFiltration::for_family(k);
    let mesh = default_mesh(k.group(), eps, k.cutoff());
    diagnose_family(k, eps, &f, &mesh, &ContinuityOptions::default()).unwrap()
}

fn audited() -> Vec<FamilySpec> {
    vec![
        build("torus:1", FamilyKind::ScaledConstants { r: -1.5, count: 32 }, 0),
        build("su2", FamilyKind::ScaledConstants { r: 2.0, count: 32 }, 0),
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

fn criterion6() -> Outcome {
    let mut lines = Vec::new();
    for k in audited() {
        let ladder = matches!(k.definition.kind, FamilyKind::CharacterLadder { .. });
        for v in diagnose(&k, &EPS).verdicts {
            ensure(v.uniform_decay.flag == v.equicontinuous.flag, || {
                format!(
                    "{} on {} at {}: decay {} vs equicontinuity {}",
                    k.name(),
                    k.group(),
                    v.eps,
                    v.uniform_decay.flag,
                    v.equicontinuous.flag
                )
            })?;
            ensure(v.uniform_decay.flag != ladder, || {
                format!("{} at {}: flag {}", k.name(), v.eps, v.uniform_decay.flag)
            })?;
        }
        lines.push(format!("{}@{}", k.name(), k.group()));
    }
    Ok(format!("flags agree at eps 0.5/0.1/0.01 for {}", lines.join(" ")))
}

fn criterion7() -> Outcome {
    for g in ["torus:1", "su2"] {
        let k = build(g, FamilyKind::ScaledConstants { r: 3.0, count: 50 }, 0);
        for v in diagnose(&k, &EPS).verdicts {
            ensure(v.conclusion == Conclusion::Precompact, || {
                format!("scaled constants on {g}: {:?}", v.conclusion)
            })?;
        }
    }
    let k = build("su2", FamilyKind::IntegerConstants { count: 50 }, 0);
    for v in diagnose(&k, &EPS).verdicts {
        ensure(
            v.conclusion == Conclusion::NotPrecompactUnbounded && v.uniform_decay.flag && v.equicontinuous.flag,
            || {
                format!(
                    "n chi_G: {:?} decay {} eq {}",
                    v.conclusion, v.uniform_decay.flag, v.equicontinuous.flag
                )
            },
        )?;
    }
    let k = build(
        "dihedral:3",
        FamilyKind::MatrixEntrySpan {
            max_shell: 1,
            bound: 1.0,
            count: 30,
        },
        4,
    );
    let profile = tail_decay_profile(&k, &DualFiltration::for_family(&k), &[0.1]).unwrap();
    let tail = profile.steps.iter().find(|s| s.shell == 1).unwrap().sup_tail;
    ensure(tail < ZERO_TAIL, || {
        format!("matrix-entry span tail outside A: {tail:e}")
    })?;
    for v in diagnose(&k, &EPS).verdicts {
        ensure(v.conclusion == Conclusion::Precompact, || {
            format!("matrix-entry span: {:?}", v.conclusion)
        })?;
    }
    Ok(format!(
        "constants precompact; n chi_G unbounded with both flags true; span tail {tail:.1e}"
    ))
}

fn criterion8() -> Outcome {
    let opts = ContinuityOptions::default();
    let mut nets = 0;
    let mut refused = String::new();
    for k in audited() {
        for eps in EPS {
            let v = &diagnose(&k, &[eps / 2.0]).verdicts[0];
            match v.conclusion {
                Conclusion::Precompact => {
                    let net = epsilon_net(&k, eps, &opts).map_err(|e| format!("{} at {eps}: {e}", k.name()))?;
                    ensure(net.cover_verified && net.max_distance < eps, || {
                        format!("{} at {eps}: max distance {}", k.name(), net.max_distance)
                    })?;
                    nets += 1;
                }
                Conclusion::NotPrecompactNoDecay => {
                    let cert = v.certificate.as_ref().ok_or("no certificate")?;
                    let err = epsilon_net(&k, eps, &opts)
                        .err()
                        .ok_or("net built for a non-precompact family")?;
                    ensure(err.to_string().contains(&cert.name), || {
                        format!("refusal lacks certificate: {err}")
                    })?;
                    refused = cert.name.clone();
                }
                other => return Err(format!("{} at {}: unexpected {other:?}", k.name(), eps / 2.0)),
            }
        }
    }
    ensure(!refused.is_empty(), || "ladder never refused".into())?;
    Ok(format!(
        "{nets} nets verified by exhaustive distance check; ladder refused with certificate {refused}"
    ))
}

fn criterion9() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut runs = Vec::new();
    for g in GROUPS {
        runs.push((Suite::HausdorffYoung, g, 200, 1));
        runs.push((Suite::Identities, g, 100, 2));
        runs.push((Suite::Lemma31, g, 50, 4));
        runs.push((Suite::Lemma32, g, 50, 5));
    }
    runs.push((Suite::Schur, "dihedral:3", 1, 0));
    runs.push((Suite::Schur, "su2", 1, 0));
    for (s, g, n, seed) in runs {
        let plain = suite(s, g, n, seed, None)?;
        let framed = suite(s, g, n, seed, Some(FRAME_SEED))?;
        passed(&framed)?;
        for (a, b) in plain.checks.iter().zip(&framed.checks) {
            if a.property == "order_matters" {
                continue;
            }
            let d = (a.lhs - b.lhs).abs().max((a.rhs - b.rhs).abs());
            worst = worst.max(d);
            ensure(d <= FRAME_AGREEMENT, || {
                format!("{s} on {g} {}/{}: {a:?} vs {b:?}", a.property, a.case)
            })?;
        }
    }
    Ok(format!("random unitary frame moves no value by more than {worst:.1e}"))
}

fn run_bin(dir: &Path, args: &[&str]) -> Result<Vec<u8>, String> {
    let o = Command::new(env!("CARGO_BIN_EXE_compact-fourier"))
        .args(args)
        .current_dir(dir)
        .env_remove("COMPACT_FOURIER_OUT")
        .output()
        .map_err(|e| e.to_string())?;
    ensure(o.status.success(), || {
        format!("{args:?}: {}", String::from_utf8_lossy(&o.stderr))
    })?;
    Ok(o.stdout)
}

fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap())
        .map(|e| {
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

fn criterion10() -> Outcome {
    let family =
        r#"{"name":"heat","group":"su2","kind":"heat_kernel","params":{"t_min":0.2,"t_max":2.0,"count":6},"seed":3}"#;
    let ladder = r#"{"name":"ladder","group":"torus:1","kind":"character_ladder","params":{"count":16}}"#;
    let mut outputs = Vec::new();
    for _ in 0..2 {
        let d = tempfile::tempdir().map_err(|e| e.to_string())?;
        std::fs::write(d.path().join("heat.json"), family).unwrap();
        std::fs::write(d.path().join("ladder.json"), ladder).unwrap();
        let mut stdout = Vec::new();
        for args in [
            &[
                "--out",
                "o",
                "verify",
                "--group",
                "su2",
                "--suite",
                "lemma31",
                "--samples",
                "5",
                "--seed",
                "9",
            ][..],
            &[
                "--out",
                "o",
                "verify",
                "--group",
                "dihedral:3",
                "--suite",
                "identities",
                "--format",
                "csv",
            ][..],
            &["--out", "o", "diagnose", "heat.json", "--nets"][..],
            &["--out", "o", "diagnose", "ladder.json", "--nets"][..],
        ] {
            stdout.push(run_bin(d.path(), args)?);
        }
        outputs.push((stdout, snapshot(&d.path().join("o"))));
    }
    ensure(outputs[0] == outputs[1], || {
        "outputs differ between identical runs".into()
    })?;
    Ok(format!(
        "{} output files and stdout byte-identical across two runs",
        outputs[0].1.len()
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("Plancherel and Hausdorff-Young", criterion1),
        ("convolution and translation identities", criterion2),
        ("Schur orthogonality", criterion3),
        ("neighborhood tail bound", criterion4),
        ("translation modulus bound", criterion5),
        ("decay/equicontinuity coherence", criterion6),
        ("precompactness verdicts", criterion7),
        ("epsilon-net soundness", criterion8),
        ("basis independence", criterion9),
        ("determinism", criterion10),
    ];
    let mut failures = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS {name} ({secs:.1}s): {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {:>2} FAIL {name} ({secs:.1}s): {detail}", i + 1);
            }
        }
    }
    if failures > 0 {
        std::process::exit(1);
    }
}
