//! Acceptance suite. Every check is exact (tolerance 0). Prints one line per
//! criterion and exits nonzero if any criterion fails.

use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use kstab_core::exactmath::{
    linear_power, poly_add, poly_derivative, poly_eval, poly_integrate_definite, poly_mul, rat,
    ratio, Polynomial, Rational,
};
use kstab_core::intersection::{restriction_polynomial, NormalBundleData};
use kstab_core::invariants::{
    donaldson_futaki, eta, eta_closed_form, eta_via_volume, verdict, StabilityVerdict,
};
use kstab_core::models::{
    del_pezzo5_c2, from_config, preset_del_pezzo5, validate_sequence, SequenceConfig,
};
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn pow(base: i64, exp: u32) -> Rational {
    rat(base).pow(exp as i32)
}

fn criterion_1_eta_values() -> Outcome {
    let expected = [
        (4, ratio(-324, 5), StabilityVerdict::KUnstable),
        (5, ratio(-1024, 3), StabilityVerdict::KUnstable),
        (6, rat(0), StabilityVerdict::NotKStable),
    ];
    for (n, want, want_verdict) in expected {
        let seq = preset_del_pezzo5(n).map_err(|e| e.to_string())?;
        let got = eta(&seq).map_err(|e| e.to_string())?;
        ensure(got == want, || format!("n={n}: eta {got} != {want}"))?;
        ensure(verdict(&got) == want_verdict, || {
            format!("n={n}: verdict {}", verdict(&got))
        })?;
    }
    Ok("eta = -324/5, -1024/3, 0; verdicts KUnstable, KUnstable, NotKStable".into())
}

fn criterion_2_component_integrals() -> Outcome {
    for n in 4..=6u32 {
        let ni = n as i64;
        let c2 = del_pezzo5_c2(n).unwrap();
        let seq = preset_del_pezzo5(n).map_err(|e| e.to_string())?;
        let weight = Polynomial::from_coeffs(vec![rat(ni - 2), rat(-1)]);
        let first = poly_integrate_definite(
            &poly_mul(&weight, &seq.pieces[0].q_poly),
            &rat(0),
            &rat(ni - 1),
        );
        let first_want = pow(ni - 1, n) * rat(2 * c2 + (ni - 4) * (9 - ni)) / rat(ni * (ni + 1));
        ensure(first == first_want, || {
            format!("n={n}: first integral {first} != {first_want}")
        })?;
        let q2 = linear_power(&rat(2 * ni - 2), &rat(-1), n - 1);
        let second =
            poly_integrate_definite(&poly_mul(&weight, &q2), &rat(ni - 1), &rat(2 * ni - 2));
        let second_want = rat(-2) * pow(ni - 1, n) / rat(ni + 1);
        ensure(second == second_want, || {
            format!("n={n}: second integral {second} != {second_want}")
        })?;
        ensure(seq.pieces[1].q_poly == q2, || {
            format!("n={n}: preset Q2 differs")
        })?;
    }
    Ok("both component integrals match for n = 4, 5, 6".into())
}

fn criterion_3_expansion_coefficients() -> Outcome {
    let mut count = 0;
    for n in 4..=6u32 {
        let ni = n as i64;
        for c2 in 0..=6 {
            let q = restriction_polynomial(&NormalBundleData::plane(n, c2))
                .map_err(|e| e.to_string())?;
            let k = n as usize;
            let want = [
                (k - 1, rat(-c2 + (ni - 4) * (ni - 4))),
                (k - 2, -pow(ni - 1, 2) * rat(ni - 4)),
                (k - 3, ratio(1, 2) * pow(ni - 1, 3) * rat(ni - 2)),
            ];
            for (exp, c) in want {
                ensure(q.coeff(exp) == c, || {
                    format!("n={n} c2={c2}: x^{exp} coefficient {} != {c}", q.coeff(exp))
                })?;
            }
            ensure(q.degree().is_some_and(|d| d < k), || {
                format!("n={n} c2={c2}: degree")
            })?;
            for exp in 0..k - 3 {
                ensure(q.coeff(exp).is_zero(), || {
                    format!("n={n} c2={c2}: stray x^{exp}")
                })?;
            }
            count += 1;
        }
    }
    Ok(format!(
        "{count} (n, c2) pairs match the three-term expansion"
    ))
}

fn three_routes(seq: &kstab_core::AmpleModelSequence, n: u32, c2: i64) -> Result<(), String> {
    let a = eta(seq).map_err(|e| e.to_string())?;
    let b = eta_via_volume(seq).map_err(|e| e.to_string())?;
    let c = eta_closed_form(n, c2);
    ensure(a == b && b == c, || {
        format!("n={n} c2={c2}: {a} / {b} / {c}")
    })
}

fn criterion_4_oracle_equivalence(rng: &mut ChaCha8Rng) -> Outcome {
    for n in 4..=6u32 {
        three_routes(
            &preset_del_pezzo5(n).map_err(|e| e.to_string())?,
            n,
            del_pezzo5_c2(n).unwrap(),
        )?;
    }
    for _ in 0..20 {
        let n = rng.gen_range(4..=6u32);
        let c2 = rng.gen_range(0..=6i64);
        let cfg = SequenceConfig::from_json(&format!(r#"{{"n": {n}, "c2": {c2}}}"#))
            .map_err(|e| e.to_string())?;
        let seq = from_config(&cfg).map_err(|e| format!("n={n} c2={c2}: {e}"))?;
        ensure(validate_sequence(&seq).is_ok(), || {
            format!("n={n} c2={c2}: invalid")
        })?;
        three_routes(&seq, n, c2)?;
    }
    Ok("restriction route = volume route = closed form on 3 presets + 20 random configs".into())
}

fn criterion_5_derivative_link() -> Outcome {
    for n in 4..=6u32 {
        let ni = n as i64;
        let seq = preset_del_pezzo5(n).map_err(|e| e.to_string())?;
        for (i, piece) in seq.pieces.iter().enumerate() {
            ensure(
                poly_derivative(&piece.v_poly) == piece.q_poly.scale(&rat(-ni)),
                || format!("n={n} piece {i}: V' != -nQ"),
            )?;
        }
        let tau1 = rat(ni - 1);
        let top = pow(ni - 1, n);
        ensure(poly_eval(&seq.pieces[0].v_poly, &tau1) == top, || {
            format!("n={n}: V1(tau1)")
        })?;
        ensure(poly_eval(&seq.pieces[1].v_poly, &tau1) == top, || {
            format!("n={n}: V2(tau1)")
        })?;
        ensure(
            poly_eval(&seq.pieces[1].v_poly, &rat(2 * ni - 2)).is_zero(),
            || format!("n={n}: V2(tau(S)) != 0"),
        )?;
    }
    Ok("V' = -nQ on every piece; V continuous at tau1 with value (n-1)^n; V(tau(S)) = 0".into())
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    ratio(rng.gen_range(-30..=30), rng.gen_range(1..=7))
}

fn random_poly(rng: &mut ChaCha8Rng) -> Polynomial {
    let len = rng.gen_range(0..=6);
    Polynomial::from_coeffs((0..len).map(|_| random_rational(rng)).collect())
}

fn criterion_6_property_suites(rng: &mut ChaCha8Rng) -> Outcome {
    const INSTANCES: usize = 120;
    for i in 0..INSTANCES {
        let (p, q, r) = (random_poly(rng), random_poly(rng), random_poly(rng));
        ensure(poly_add(&p, &q) == poly_add(&q, &p), || {
            format!("instance {i}: add not commutative")
        })?;
        ensure(
            poly_mul(&p, &poly_add(&q, &r)) == poly_add(&poly_mul(&p, &q), &poly_mul(&p, &r)),
            || format!("instance {i}: mul does not distribute"),
        )?;
        ensure(poly_mul(&p, &q) == poly_mul(&q, &p), || {
            format!("instance {i}: mul not commutative")
        })?;
    }
    for i in 0..INSTANCES {
        let p = random_poly(rng);
        let (a, b) = (random_rational(rng), random_rational(rng));
        ensure(
            poly_integrate_definite(&poly_derivative(&p), &a, &b)
                == poly_eval(&p, &b) - poly_eval(&p, &a),
            || format!("instance {i}: fundamental theorem fails for {p}"),
        )?;
    }
    for i in 0..INSTANCES {
        let n = rng.gen_range(4..=6u32);
        let ni = n as i64;
        let e = random_rational(rng);
        let deg = rat(5) * pow(ni - 1, n);
        let tau = rat(2 * ni - 2);
        let r = rng.gen_range(1..=5i64);
        let df1 = donaldson_futaki(&e, n, &deg, r, &tau).map_err(|e| e.to_string())?;
        let df2 = donaldson_futaki(&e, n, &deg, 2 * r, &tau).map_err(|e| e.to_string())?;
        ensure(df2 == &df1 * rat(2).pow(2 * n as i32), || {
            format!("instance {i}: DF(2r) != 2^(2n) DF(r)")
        })?;
        ensure(verdict(&df1) == verdict(&e), || {
            format!("instance {i}: sign of DF differs from eta")
        })?;
    }
    for i in 0..INSTANCES {
        let n = rng.gen_range(4..=6u32);
        let c2 = rng.gen_range(0..=6i64);
        let cfg = SequenceConfig::from_json(&format!(r#"{{"n": {n}, "c2": {c2}}}"#))
            .map_err(|e| e.to_string())?;
        let seq = from_config(&cfg).map_err(|e| e.to_string())?;
        let e = eta(&seq).map_err(|e| e.to_string())?;
        let r = rng.gen_range(1..=4i64);
        let df = donaldson_futaki(&e, n, &seq.anticanonical_volume(), r, &seq.tau_s())
            .map_err(|e| e.to_string())?;
        let coherent = match verdict(&e) {
            StabilityVerdict::KUnstable => df.is_negative(),
            StabilityVerdict::NotKStable => df.is_zero(),
            StabilityVerdict::Inconclusive => df.is_positive(),
        };
        ensure(coherent, || {
            format!("instance {i}: verdict/sign mismatch at n={n} c2={c2}")
        })?;
    }
    Ok(format!(
        "algebraic laws, FTC, DF homogeneity, verdict/sign coherence: {INSTANCES} instances each"
    ))
}

fn kstab(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_kstab"))
        .args(args)
        .env_remove("KSTAB_FORMAT")
        .output()
        .expect("run kstab")
}

fn criterion_7_cli_contract() -> Outcome {
    let golden = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    for (format, file) in [
        ("json", "table.json"),
        ("csv", "table.csv"),
        ("markdown", "table.md"),
    ] {
        let out = kstab(&["table", "--no-meta", "--format", format]);
        ensure(out.status.code() == Some(0), || {
            format!("table --format {format} failed")
        })?;
        let want = std::fs::read(golden.join(file)).map_err(|e| e.to_string())?;
        ensure(out.stdout == want, || {
            format!("table --format {format} differs from golden {file}")
        })?;
        let again = kstab(&["table", "--no-meta", "--format", format]);
        ensure(again.stdout == out.stdout, || {
            format!("table --format {format} not deterministic")
        })?;
    }
    let verify = kstab(&["verify"]);
    ensure(verify.status.code() == Some(0), || {
        format!(
            "verify exited {:?}: {}",
            verify.status.code(),
            String::from_utf8_lossy(&verify.stdout)
        )
    })?;
    let mutated = kstab(&["verify", "--mutate", "flip-segre-sign"]);
    ensure(mutated.status.code() == Some(1), || {
        format!("mutated verify exited {:?}", mutated.status.code())
    })?;
    let text = String::from_utf8_lossy(&mutated.stdout);
    ensure(text.contains("FAIL n=4 derivative link piece 0"), || {
        "derivative-link failure not reported".into()
    })?;
    Ok("table goldens byte-stable (json, csv, markdown); verify exits 0; flipped Segre sign exits 1".into())
}

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x006b_7374_6162);
    let start = Instant::now();
    let library: Vec<(&str, Outcome)> = vec![
        ("AC1 eta values and verdicts", criterion_1_eta_values()),
        ("AC2 component integrals", criterion_2_component_integrals()),
        (
            "AC3 expansion coefficients",
            criterion_3_expansion_coefficients(),
        ),
        (
            "AC4 three-route oracle equivalence",
            criterion_4_oracle_equivalence(&mut rng),
        ),
        (
            "AC5 derivative link and continuity",
            criterion_5_derivative_link(),
        ),
        ("AC6 property suites", criterion_6_property_suites(&mut rng)),
    ];
    let library_time = start.elapsed();
    let cli = ("AC7 CLI contract", criterion_7_cli_contract());

    let mut failed = 0;
    for (name, outcome) in library.iter().chain(std::iter::once(&cli)) {
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    println!(
        "library criteria computed in {:.3}s",
        library_time.as_secs_f64()
    );
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all 7 acceptance criteria passed");
}
