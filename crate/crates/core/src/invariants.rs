//! The invariant `η(S)`, its cross-checks, the Donaldson-Futaki value and the
//! resulting verdict.
//!
//! `η(S) = n Σ_i ∫_{τ_{i-1}}^{τ_i} (d - x) Q_i(x) dx`, and the
//! Donaldson-Futaki invariant of the associated semi test configuration is
//! `r^{2n} ((-K_X)^n) / (2 (n!)^2) · η(S)`. K-stability forces `η > 0` and
//! K-semistability forces `η >= 0`; the converse directions do not hold.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactmath::{format_rational, rat, Polynomial, Rational};
use crate::models::{validate_sequence, AmpleModelSequence, ValidationReport};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InvariantError {
    #[error("invalid sequence: {0}")]
    InvalidSequence(ValidationReport),
    #[error(
        "volume at τ(S) is {} rather than 0; the volume formula for η carries an \
         extra boundary term there and is not applied",
        format_rational(.0)
    )]
    BoundaryVolumeNonzero(Rational),
    #[error("r must be at least 1 (got {0})")]
    NonPositiveR(i64),
    #[error("r·τ(S) must be an integer: r = {r}, τ(S) = {}", format_rational(.tau))]
    NonIntegralRTau { r: i64, tau: Rational },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StabilityVerdict {
    /// `η < 0`: not K-semistable.
    KUnstable,
    /// `η = 0`: not K-stable; semistability is not decided.
    NotKStable,
    /// `η > 0`: this test configuration does not destabilize.
    Inconclusive,
}

impl StabilityVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            StabilityVerdict::KUnstable => "KUnstable",
            StabilityVerdict::NotKStable => "NotKStable",
            StabilityVerdict::Inconclusive => "Inconclusive",
        }
    }
}

impl fmt::Display for StabilityVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Contribution of one model piece to `η`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PieceContribution {
    pub label: String,
    pub tau_lo: Rational,
    pub tau_hi: Rational,
    /// `∫ (d - x) Q_i(x) dx` over the piece.
    pub integral: Rational,
    /// `n` times `integral`.
    pub contribution: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EtaReport {
    pub n: u32,
    pub c2: i64,
    pub eta: Rational,
    /// `None` when the volume route is not applicable (nonzero volume at `τ(S)`).
    pub eta_volume_check: Option<Rational>,
    pub df_at_r: Option<(i64, Rational)>,
    pub verdict: StabilityVerdict,
    pub pieces_summary: Vec<PieceContribution>,
}

fn ensure_valid(seq: &AmpleModelSequence) -> Result<(), InvariantError> {
    let report = validate_sequence(seq);
    if report.is_ok() {
        Ok(())
    } else {
        Err(InvariantError::InvalidSequence(report))
    }
}

/// Per-piece integrals of `(d - x) Q_i`, without validating the sequence.
pub fn piece_contributions(seq: &AmpleModelSequence) -> Vec<PieceContribution> {
    let weight = Polynomial::from_coeffs(vec![rat(seq.d as i64), rat(-1)]);
    let n = rat(seq.n as i64);
    seq.pieces
        .iter()
        .map(|piece| {
            let integral = (&weight * &piece.q_poly).integrate(&piece.tau_lo, &piece.tau_hi);
            PieceContribution {
                label: piece.label.clone(),
                tau_lo: piece.tau_lo.clone(),
                tau_hi: piece.tau_hi.clone(),
                contribution: &n * &integral,
                integral,
            }
        })
        .collect()
}

pub(crate) fn eta_unchecked(seq: &AmpleModelSequence) -> Rational {
    piece_contributions(seq)
        .into_iter()
        .fold(Rational::zero(), |acc, c| acc + c.contribution)
}

pub fn eta(seq: &AmpleModelSequence) -> Result<Rational, InvariantError> {
    ensure_valid(seq)?;
    Ok(eta_unchecked(seq))
}

/// `(n-1)^n / (n+1) · (2 c_2 + (n-4)(9-n) - 2n)` for the degree-five del
/// Pezzo two-piece shape.
pub fn eta_closed_form(n: u32, c2: i64) -> Rational {
    let n_i = n as i64;
    let bracket = 2 * c2 + (n_i - 4) * (9 - n_i) - 2 * n_i;
    rat(n_i - 1).pow(n as i32) / rat(n_i + 1) * rat(bracket)
}

pub(crate) fn eta_via_volume_unchecked(
    seq: &AmpleModelSequence,
) -> Result<Rational, InvariantError> {
    let (Some(first), Some(last)) = (seq.pieces.first(), seq.pieces.last()) else {
        return Ok(Rational::zero());
    };
    let boundary = last.v_poly.eval(&last.tau_hi);
    if !boundary.is_zero() {
        return Err(InvariantError::BoundaryVolumeNonzero(boundary));
    }
    let volume_at_zero = first.v_poly.eval(&Rational::zero());
    let integrated: Rational = seq
        .pieces
        .iter()
        .map(|p| p.v_poly.integrate(&p.tau_lo, &p.tau_hi))
        .fold(Rational::zero(), |acc, v| acc + v);
    Ok(rat(seq.d as i64) * volume_at_zero - integrated)
}

/// `η = d · vol(-K_X) - ∫_0^{τ(S)} vol(σ^*(-K_X) - xE) dx`, valid when the
/// volume vanishes at `τ(S)`.
pub fn eta_via_volume(seq: &AmpleModelSequence) -> Result<Rational, InvariantError> {
    ensure_valid(seq)?;
    eta_via_volume_unchecked(seq)
}

/// `r^{2n} ((-K_X)^n) / (2 (n!)^2) · η`. Requires `r >= 1` and `r τ(S) ∈ Z`.
pub fn donaldson_futaki(
    eta_value: &Rational,
    n: u32,
    degree_anticanonical: &Rational,
    r: i64,
    tau_s: &Rational,
) -> Result<Rational, InvariantError> {
    if r < 1 {
        return Err(InvariantError::NonPositiveR(r));
    }
    if !(rat(r) * tau_s).is_integer() {
        return Err(InvariantError::NonIntegralRTau {
            r,
            tau: tau_s.clone(),
        });
    }
    let factorial = (1..=n as i64).fold(Rational::one(), |acc, k| acc * rat(k));
    let scale =
        rat(r).pow(2 * n as i32) * degree_anticanonical / (rat(2) * &factorial * &factorial);
    Ok(scale * eta_value)
}

pub fn verdict(eta_value: &Rational) -> StabilityVerdict {
    if eta_value.is_negative() {
        StabilityVerdict::KUnstable
    } else if eta_value.is_zero() {
        StabilityVerdict::NotKStable
    } else {
        StabilityVerdict::Inconclusive
    }
}

/// Full report for a sequence; `r` requests the Donaldson-Futaki value.
pub fn eta_report(seq: &AmpleModelSequence, r: Option<i64>) -> Result<EtaReport, InvariantError> {
    ensure_valid(seq)?;
    let eta_value = eta_unchecked(seq);
    let eta_volume_check = match eta_via_volume_unchecked(seq) {
        Ok(v) => Some(v),
        Err(InvariantError::BoundaryVolumeNonzero(_)) => None,
        Err(e) => return Err(e),
    };
    let df_at_r = match r {
        Some(r) => Some((
            r,
            donaldson_futaki(
                &eta_value,
                seq.n,
                &seq.anticanonical_volume(),
                r,
                &seq.tau_s(),
            )?,
        )),
        None => None,
    };
    Ok(EtaReport {
        n: seq.n,
        c2: seq.bundle.c2,
        verdict: verdict(&eta_value),
        eta: eta_value,
        eta_volume_check,
        df_at_r,
        pieces_summary: piece_contributions(seq),
    })
}
