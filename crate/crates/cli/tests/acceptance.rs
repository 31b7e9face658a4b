//! Acceptance criteria, one line each. Runs without the libtest harness so
//! the lines are always printed; exits nonzero if any criterion fails.

use std::io::Write;
use std::panic::{self, AssertUnwindSafe};
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use gsg_core::bilinear::BilinearMap;
use gsg_core::complements::{
    abelian_complement_report, alpha_f, count_abelian_complements_exhaustive, escaping_beta,
    is_bf_abelian, middle_nucleus, phi_alpha_matrix, symmetric_isotope_search, AdditiveMap,
    SymmetricIsotope,
};
use gsg_core::embed::{embed_class_two, pad, verify_embedding, Class2Data};
use gsg_core::isotopy::{
    check_isotopism, extract_maps, group_isomorphism_from_anti_isotopism,
    group_isomorphism_from_isotopism, transport, verify_homomorphism, ExtractionBasis, Isotopism,
    IsotopyKind, VerifyMode,
};
use gsg_core::linalg::enumerate_vectors;
use gsg_core::oracle::{cross_validate, AxiomMode};
use gsg_core::{Budget, FieldParams, FpMatrix, FpVector, GroupElement, GroupSpec};

fn fp(p: u64) -> FieldParams {
    FieldParams::new(p).unwrap()
}

fn pow(p: u64, e: usize) -> u128 {
    (p as u128).pow(e as u32)
}

/// The first `count` nonsingular maps from seeds 0, 1, ….
fn seeded_nonsingular(f: FieldParams, n: usize, m: usize, count: usize) -> Vec<BilinearMap> {
    let mut out = Vec::new();
    let mut seed = 0;
    while out.len() < count {
        if let Some(a) = BilinearMap::random_nonsingular(f, n, m, seed, 200).unwrap() {
            out.push(a);
        }
        seed += 1;
        assert!(
            seed < 1000,
            "no nonsingular maps at p={} n={n} m={m}",
            f.p()
        );
    }
    out
}

fn gsg(args: &[&str], stdin: &str) -> (String, i32) {
    let mut child = Command::new(env!("CARGO_BIN_EXE_gsg"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("gsg runs");
    child
        .stdin
        .take()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    let out = child.wait_with_output().unwrap();
    (
        String::from_utf8(out.stdout).unwrap(),
        out.status.code().unwrap_or(-1),
    )
}

fn coset_count_reproduction() {
    let (map, code) = gsg(&["gen-field", "--p", "3", "--n", "3", "--m", "3"], "");
    assert_eq!(code, 0);
    let (out, code) = gsg(&["cosets", "--alpha", "-", "--limit", "0"], &map);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines, ["cosets=27", "image_dim=6", "alt_dim=9"]);
}

fn extraspecial_complement_count() {
    for p in [2, 3, 5] {
        let f = fp(p);
        for n in 1..=4 {
            let mut alphas = vec![BilinearMap::field_quotient_map(f, n, 1).unwrap()];
            alphas.extend(seeded_nonsingular(f, n, 1, 5));
            for a in &alphas {
                let phi = phi_alpha_matrix(a);
                assert_eq!(phi.kernel_dim, n * (n + 1) / 2, "p={p} n={n}");
                assert_eq!(phi.image_dim, phi.alt_dim, "p={p} n={n}");
            }
        }
    }
}

fn middle_nucleus_of_field_map() {
    for p in [2, 3, 5] {
        for n in 1..=3 {
            let a = BilinearMap::field_quotient_map(fp(p), n, n).unwrap();
            assert_eq!(middle_nucleus(&a, Budget::default()).unwrap(), pow(p, n));
            assert_eq!(phi_alpha_matrix(&a).kernel_dim, n, "p={p} n={n}");
        }
    }
}

fn brute_force_equivalence() {
    let mut checked = 0;
    for p in [2u64, 3, 5, 7] {
        let f = fp(p);
        for n in 1.. {
            if pow(p, n * n) > 1 << 16 {
                break;
            }
            for m in 1..=n {
                let mut alphas = vec![BilinearMap::field_quotient_map(f, n, m).unwrap()];
                alphas.extend(BilinearMap::random_nonsingular(f, n, m, 11, 300).unwrap());
                for a in &alphas {
                    let mut betas = vec![
                        BilinearMap::zero(f, n, m),
                        BilinearMap::random_biadditive(f, n, m, 5),
                    ];
                    betas.extend(escaping_beta(a));
                    for b in &betas {
                        let report = abelian_complement_report(a, b).unwrap();
                        let brute =
                            count_abelian_complements_exhaustive(a, b, Budget(1 << 16)).unwrap();
                        assert_eq!(brute, report.count, "p={p} n={n} m={m}");
                        let predicted = if report.has_abelian_complement {
                            pow(p, report.kernel_dim)
                        } else {
                            0
                        };
                        assert_eq!(brute, predicted);
                        checked += 1;
                    }
                }
            }
        }
    }
    assert!(checked > 40);
}

fn no_abelian_complement_witness() {
    for p in [3, 2] {
        let f = fp(p);
        let a = BilinearMap::field_quotient_map(f, 3, 3).unwrap();
        let phi = phi_alpha_matrix(&a);
        assert!(phi.coset_count().unwrap() > 1);
        let beta = escaping_beta(&a).expect("image is proper");
        let bar = beta.bar().alt_coords().unwrap();
        assert!(!bar.is_zero() && !phi.in_image(&bar));
        let report = abelian_complement_report(&a, &beta).unwrap();
        assert!(!report.has_abelian_complement);
        assert_eq!(report.count, 0);
        let rhs = beta.bar().neg().alt_coords().unwrap().as_vector();
        assert_eq!(phi.matrix.solve(&rhs, f).unwrap(), None);
        assert_eq!(
            count_abelian_complements_exhaustive(&a, &beta, Budget(1 << 16)).unwrap(),
            0
        );
    }
}

fn oracle_fixtures() -> Vec<GroupSpec> {
    let mut specs = Vec::new();
    for (p, n, m) in [(2, 1, 1), (2, 2, 1), (2, 2, 2), (3, 1, 1), (3, 2, 1)] {
        let f = fp(p);
        let mut alphas = vec![BilinearMap::field_quotient_map(f, n, m).unwrap()];
        alphas.extend(BilinearMap::random_nonsingular(f, n, m, 2, 300).unwrap());
        for a in alphas {
            for b in [
                BilinearMap::zero(f, n, m),
                BilinearMap::random_biadditive(f, n, m, 9),
            ] {
                specs.push(GroupSpec::new(a.clone(), b, Budget::default()).unwrap());
            }
        }
    }
    specs
}

fn group_structure_oracle() {
    let specs = oracle_fixtures();
    assert!(specs.len() >= 10);
    for spec in &specs {
        let tag = format!("p={} n={} m={}", spec.fp().p(), spec.n(), spec.m());
        let r = cross_validate(spec, AxiomMode::Exhaustive).unwrap();
        assert!(r.order <= 512);
        assert!(r.latin && r.axioms.holds, "{tag}");
        assert!(r.center_matches && r.derived_equals_center, "{tag}");
        assert!(r.formulas_agree, "{tag}");
        assert_eq!(
            r.extraspecial.hyperplanes as u128,
            (pow(spec.fp().p() as u64, spec.m()) - 1) / (spec.fp().p() as u128 - 1)
        );
        assert!(r.extraspecial.all_extraspecial, "{tag}");
        if spec.fp().p() == 3 {
            assert_eq!(r.exponent, 3, "{tag}");
        } else {
            assert_eq!(4 % r.exponent, 0, "{tag}");
        }
    }
}

fn random_witness(f: FieldParams, n: usize, m: usize, seed: u64, kind: IsotopyKind) -> Isotopism {
    let r = ExtractionBasis::random(f, n, m, seed);
    Isotopism::new(r.d, r.s, r.t, kind, f).unwrap()
}

fn constructive_isomorphisms() {
    let f = fp(3);
    for (n, m) in [(1, 1), (2, 1)] {
        let alpha = BilinearMap::field_quotient_map(f, n, m).unwrap();
        let beta = BilinearMap::random_biadditive(f, n, m, 1);
        let g = GroupSpec::new(alpha.clone(), beta.clone(), Budget::default()).unwrap();
        for seed in 0..3 {
            // isotopism map: β₂ transported by (b, b, c)
            let iso = random_witness(f, n, m, seed, IsotopyKind::Isotopism);
            let alpha2 = transport(&alpha, &iso).unwrap();
            let b_inv = iso.b().inverse(f).unwrap();
            let beta2 = beta.compose(&b_inv, &b_inv, iso.c()).unwrap();
            let h = GroupSpec::new(alpha2, beta2, Budget::default()).unwrap();
            assert_eq!(h.order(), Some(pow(3, 2 * n + m)));
            let map = group_isomorphism_from_isotopism(&iso, &g, &h).unwrap();
            assert!(verify_homomorphism(&g, &h, &map, VerifyMode::Exhaustive).unwrap());

            // anti-isotopism map, beta = 0
            let g0 = GroupSpec::heisenberg_like(alpha.clone(), Budget::default()).unwrap();
            let anti = random_witness(f, n, m, seed + 100, IsotopyKind::AntiIsotopism);
            let h0 =
                GroupSpec::heisenberg_like(transport(&alpha, &anti).unwrap(), Budget::default())
                    .unwrap();
            let map = group_isomorphism_from_anti_isotopism(&anti, &g0, &h0).unwrap();
            assert!(verify_homomorphism(&g0, &h0, &map, VerifyMode::Exhaustive).unwrap());
        }
        let g0 = GroupSpec::heisenberg_like(alpha.clone(), Budget::default()).unwrap();
        let op = GroupSpec::heisenberg_like(alpha.opposite(), Budget::default()).unwrap();
        let id = Isotopism::identity(n, m, IsotopyKind::AntiIsotopism);
        let map = group_isomorphism_from_anti_isotopism(&id, &g0, &op).unwrap();
        assert!(verify_homomorphism(&g0, &op, &map, VerifyMode::Exhaustive).unwrap());
    }
}

fn extraction_round_trip() {
    for p in [3, 5] {
        let f = fp(p);
        let half = f.inv(2).unwrap();
        for n in [1, 2] {
            let alpha = BilinearMap::field_quotient_map(f, n, n).unwrap();
            let beta = BilinearMap::random_biadditive(f, n, n, 3);
            let spec = GroupSpec::new(alpha.clone(), beta, Budget::default()).unwrap();
            let phi = phi_alpha_matrix(&alpha);
            for seed in 0..20 {
                let basis = ExtractionBasis::random(f, n, n, seed);
                let ex = extract_maps(&spec, &basis).unwrap();
                assert!(check_isotopism(&ex.alpha, &alpha, &ex.witness).unwrap());
                let expected_beta = spec
                    .beta_bar()
                    .compose(&basis.s, &basis.s, &basis.t)
                    .unwrap()
                    .scale(half);
                assert_eq!(ex.beta, expected_beta);
                let phi2 = phi_alpha_matrix(&ex.alpha);
                assert_eq!(
                    (phi.kernel_dim, phi.image_dim, phi.coset_count()),
                    (phi2.kernel_dim, phi2.image_dim, phi2.coset_count())
                );
            }
        }
    }
}

fn embedding() {
    let cases = [
        (3, 2, 1),
        (3, 3, 3),
        (3, 1, 2),
        (3, 3, 1),
        (3, 3, 2),
        (5, 2, 1),
        (5, 2, 2),
        (5, 1, 2),
        (5, 2, 2),
        (5, 3, 3),
    ];
    for (seed, &(p, n0, m0)) in cases.iter().enumerate() {
        let f = fp(p);
        let data =
            Class2Data::new(BilinearMap::random_alternating(f, n0, m0, seed as u64)).unwrap();
        let padded = pad(&data);
        assert!(padded.n0() <= 3);
        let spec = embed_class_two(&padded, None).unwrap();
        assert!(spec.is_ultraspecial());
        assert_eq!(spec.exponent(Budget::default()).unwrap(), p);
        assert!(verify_embedding(&spec, &data));
        assert_eq!(spec.beta_bar(), padded.gamma());
    }
}

fn symmetric_isotope_machinery() {
    for p in [2, 3, 5] {
        let f = fp(p);
        for n in 1..=3 {
            let alpha = BilinearMap::field_quotient_map(f, n, n).unwrap();
            assert!(alpha.is_symmetric());
            let phi = phi_alpha_matrix(&alpha);
            assert!(phi.apply(&AdditiveMap::identity(n)).is_zero());

            let spec = GroupSpec::heisenberg_like(alpha.clone(), Budget::default()).unwrap();
            let beta = spec.beta().clone();
            let (f0, f1) = (AdditiveMap::zero(n), AdditiveMap::identity(n));
            assert!(is_bf_abelian(&alpha, &beta, &f0).unwrap());
            assert!(is_bf_abelian(&alpha, &beta, &f1).unwrap());
            let zn = FpVector::zeros(n);
            let zm = FpVector::zeros(n);
            let gen = |fm: &AdditiveMap, i: usize| {
                let e = FpVector::unit(n, i);
                GroupElement::new(fm.apply(&e, f), e, zm.clone())
            };
            for fm in [&f0, &f1] {
                for i in 0..n {
                    for j in 0..n {
                        let c = spec.commutator_by_products(&gen(fm, i), &gen(fm, j));
                        assert_eq!(c, spec.identity());
                    }
                }
            }
            // B₀ ∩ B₁ is the set of (0, v, c) with v = f₁(v) − f₀(v) = 0
            let shared: Vec<FpVector> = enumerate_vectors(n, f, Budget::default())
                .unwrap()
                .filter(|v| f0.apply(v, f) == f1.apply(v, f))
                .collect();
            assert_eq!(shared, vec![zn]);

            match symmetric_isotope_search(&alpha, 1 << 20, 0).unwrap() {
                SymmetricIsotope::Found { f: fm, .. } => {
                    assert!(fm.matrix().is_invertible(f).unwrap());
                    let af = alpha_f(&alpha, &fm).unwrap();
                    assert!(af.is_symmetric());
                    let w = Isotopism::new(
                        fm.matrix().clone(),
                        FpMatrix::identity(n),
                        FpMatrix::identity(n),
                        IsotopyKind::Isotopism,
                        f,
                    )
                    .unwrap();
                    assert!(check_isotopism(&af, &alpha, &w).unwrap());
                }
                other => panic!("p={p} n={n}: {other:?}"),
            }
        }
    }
}

type Criterion = (&'static str, Duration, fn());

fn main() {
    let criteria: [Criterion; 10] = [
        (
            "coset count reproduction",
            Duration::from_secs(1),
            coset_count_reproduction,
        ),
        (
            "extraspecial complement count",
            Duration::from_secs(10),
            extraspecial_complement_count,
        ),
        (
            "middle nucleus of the field map",
            Duration::from_secs(30),
            middle_nucleus_of_field_map,
        ),
        (
            "brute-force complement equivalence",
            Duration::from_secs(60),
            brute_force_equivalence,
        ),
        (
            "no-abelian-complement witness",
            Duration::from_secs(10),
            no_abelian_complement_witness,
        ),
        (
            "group-structure oracle",
            Duration::from_secs(120),
            group_structure_oracle,
        ),
        (
            "constructive isomorphisms",
            Duration::from_secs(60),
            constructive_isomorphisms,
        ),
        (
            "extraction round-trip",
            Duration::from_secs(60),
            extraction_round_trip,
        ),
        ("class-two embedding", Duration::from_secs(60), embedding),
        (
            "symmetric-isotope machinery",
            Duration::from_secs(30),
            symmetric_isotope_machinery,
        ),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failures = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(run));
        let elapsed = start.elapsed();
        let (ok, detail) = match result {
            Ok(()) if elapsed <= *limit => (true, String::new()),
            Ok(()) => (false, format!(" over the {limit:?} limit")),
            Err(_) => (false, " assertion failed".into()),
        };
        if !ok {
            failures += 1;
        }
        println!(
            "criterion {:>2} {}: {} ({} ms){}",
            i + 1,
            name,
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_millis(),
            detail
        );
    }
    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
}
