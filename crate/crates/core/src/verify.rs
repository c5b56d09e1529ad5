//! Self-check suite over the del Pezzo presets: expansion coefficients,
//! derivative link, volume continuity and the three routes to `η`.

use std::fmt;

use num_traits::Zero;

use crate::exactmath::{format_rational, rat, Polynomial, Rational};
use crate::intersection::{self, NormalBundleData};
use crate::invariants::{self, StabilityVerdict};
use crate::models::{del_pezzo5_c2, AmpleModelSequence, ModelPiece, DEL_PEZZO_DEGREE};

pub const PRESET_DIMENSIONS: [u32; 3] = [4, 5, 6];

/// A deliberate defect injected into the suite's inputs, used to confirm the
/// suite detects it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mutation {
    #[default]
    None,
    /// Build the exceptional-divisor restriction polynomial with `s_1, s_2`
    /// negated while the blowup volume keeps the correct signs.
    FlipSegreSign,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}", self.name)?;
        if !self.detail.is_empty() {
            write!(f, ": {}", self.detail)?;
        }
        Ok(())
    }
}

fn check_eq(name: String, expected: &Rational, got: &Rational) -> Check {
    let passed = expected == got;
    Check {
        name,
        passed,
        detail: if passed {
            format_rational(got)
        } else {
            format!(
                "expected {}, got {}",
                format_rational(expected),
                format_rational(got)
            )
        },
    }
}

fn check_poly(name: String, expected: &Polynomial, got: &Polynomial) -> Check {
    let passed = expected == got;
    Check {
        name,
        passed,
        detail: if passed {
            String::new()
        } else {
            format!("expected {expected}, got {got}")
        },
    }
}

/// The preset sequence for `n`, built without validation so that a mutated
/// build can still be inspected.
pub fn mutated_preset(n: u32, mutation: Mutation) -> Option<AmpleModelSequence> {
    let c2 = del_pezzo5_c2(n)?;
    let bundle = NormalBundleData::plane(n, c2);
    let degree = rat(DEL_PEZZO_DEGREE);
    let segre = intersection::segre_classes(&bundle).ok()?;
    let restriction_segre = match mutation {
        Mutation::None => segre.clone(),
        Mutation::FlipSegreSign => segre.flipped(),
    };
    let tau1 = rat(n as i64 - 1);
    let tau2 = rat(2 * n as i64 - 2);
    Some(AmpleModelSequence {
        n,
        d: bundle.rank,
        degree: degree.clone(),
        pieces: vec![
            ModelPiece {
                tau_lo: Rational::zero(),
                tau_hi: tau1.clone(),
                q_poly: intersection::restriction_polynomial_with(&bundle, &restriction_segre),
                v_poly: intersection::blowup_volume_polynomial_with(&bundle, &segre, &degree),
                label: "X~".to_string(),
            },
            ModelPiece {
                tau_lo: tau1,
                tau_hi: tau2.clone(),
                q_poly: Polynomial::linear_power(&tau2, &rat(-1), n - 1),
                v_poly: Polynomial::linear_power(&tau2, &rat(-1), n),
                label: "P^n".to_string(),
            },
        ],
        bundle,
    })
}

/// `(-c_2 + (n-4)^2) x^{n-1} - (n-1)^2 (n-4) x^{n-2} + (1/2)(n-1)^3 (n-2) x^{n-3}`.
pub fn expected_restriction(n: u32, c2: i64) -> Polynomial {
    let n_i = n as i64;
    let m = n_i - 1;
    let k = n as usize;
    let mut coeffs = vec![Rational::zero(); k];
    coeffs[k - 1] = rat(-c2 + (n_i - 4) * (n_i - 4));
    coeffs[k - 2] = rat(-m * m * (n_i - 4));
    coeffs[k - 3] = rat(m * m * m * (n_i - 2)) / rat(2);
    Polynomial::from_coeffs(coeffs)
}

fn expected_verdict(n: u32) -> StabilityVerdict {
    if n == 6 {
        StabilityVerdict::NotKStable
    } else {
        StabilityVerdict::KUnstable
    }
}

pub fn run_suite(dimensions: &[u32], mutation: Mutation) -> Vec<Check> {
    let mut checks = Vec::new();
    for &n in dimensions {
        let Some(seq) = mutated_preset(n, mutation) else {
            checks.push(Check {
                name: format!("n={n} preset"),
                passed: false,
                detail: "no preset for this dimension".to_string(),
            });
            continue;
        };
        let c2 = seq.bundle.c2;
        let n_i = n as i64;
        let tau1 = rat(n_i - 1);
        let tau2 = rat(2 * n_i - 2);
        let top = tau1.pow(n as i32);

        checks.push(check_poly(
            format!("n={n} restriction expansion"),
            &expected_restriction(n, c2),
            &seq.pieces[0].q_poly,
        ));
        for (i, piece) in seq.pieces.iter().enumerate() {
            checks.push(check_poly(
                format!("n={n} derivative link piece {i}"),
                &piece.q_poly.scale(&rat(-n_i)),
                &piece.v_poly.derivative(),
            ));
        }
        checks.push(check_eq(
            format!("n={n} volume V1(tau1)"),
            &top,
            &seq.pieces[0].v_poly.eval(&tau1),
        ));
        checks.push(check_eq(
            format!("n={n} volume V2(tau1)"),
            &top,
            &seq.pieces[1].v_poly.eval(&tau1),
        ));
        checks.push(check_eq(
            format!("n={n} volume V2(tau(S))"),
            &Rational::zero(),
            &seq.pieces[1].v_poly.eval(&tau2),
        ));

        let contributions = invariants::piece_contributions(&seq);
        let first_expected = &top * rat(2 * c2 + (n_i - 4) * (9 - n_i)) / rat(n_i * (n_i + 1));
        checks.push(check_eq(
            format!("n={n} first-piece integral"),
            &first_expected,
            &contributions[0].integral,
        ));
        checks.push(check_eq(
            format!("n={n} second-piece integral"),
            &(rat(-2) * &top / rat(n_i + 1)),
            &contributions[1].integral,
        ));

        let closed = invariants::eta_closed_form(n, c2);
        let by_restriction = invariants::eta_unchecked(&seq);
        checks.push(check_eq(
            format!("n={n} eta restriction route vs closed form"),
            &closed,
            &by_restriction,
        ));
        match invariants::eta_via_volume_unchecked(&seq) {
            Ok(by_volume) => checks.push(check_eq(
                format!("n={n} eta volume route vs closed form"),
                &closed,
                &by_volume,
            )),
            Err(e) => checks.push(Check {
                name: format!("n={n} eta volume route vs closed form"),
                passed: false,
                detail: e.to_string(),
            }),
        }
        let got = invariants::verdict(&by_restriction);
        let want = expected_verdict(n);
        checks.push(Check {
            name: format!("n={n} verdict"),
            passed: got == want,
            detail: if got == want {
                got.to_string()
            } else {
                format!("expected {want}, got {got}")
            },
        });
    }
    checks
}
