//! Ample model sequences: the decomposition `0 = τ_0 < τ_1 < ... < τ_m = τ(S)`
//! with, on each segment, the restriction polynomial
//! `Q_i(x) = ((-K_{X_i} + (d-1-x)E_i)^{n-1} · E_i)` and the volume polynomial
//! `V_i(x) = ((-K_{X_i} + (d-1-x)E_i)^n)`.
//!
//! Both polynomials are stored so that `V_i' = -n Q_i` is a cross-check rather
//! than a definition.

use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::exactmath::{format_rational, parse_rational, rat, Polynomial, Rational};
use crate::intersection::{self, IntersectionError, NormalBundleData};

/// Degree `(L^n)` of a del Pezzo manifold of degree five.
pub const DEL_PEZZO_DEGREE: i64 = 5;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelPiece {
    pub tau_lo: Rational,
    pub tau_hi: Rational,
    pub q_poly: Polynomial,
    pub v_poly: Polynomial,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmpleModelSequence {
    /// Dimension of `X`.
    pub n: u32,
    /// Codimension of `S`.
    pub d: u32,
    /// `(L^n)` where `-K_X = (n-1)L`.
    pub degree: Rational,
    pub pieces: Vec<ModelPiece>,
    pub bundle: NormalBundleData,
}

impl AmpleModelSequence {
    /// The pseudoeffective threshold `τ(S)`, i.e. the last breakpoint.
    pub fn tau_s(&self) -> Rational {
        self.pieces
            .last()
            .map(|p| p.tau_hi.clone())
            .unwrap_or_else(Rational::zero)
    }

    /// `τ_0, τ_1, ..., τ_m`.
    pub fn breakpoints(&self) -> Vec<Rational> {
        let mut out: Vec<Rational> = self.pieces.iter().map(|p| p.tau_lo.clone()).collect();
        if let Some(last) = self.pieces.last() {
            out.push(last.tau_hi.clone());
        }
        out
    }

    /// `((-K_X)^n) = (n-1)^n (L^n)`.
    pub fn anticanonical_volume(&self) -> Rational {
        &self.degree * rat(self.n as i64 - 1).pow(self.n as i32)
    }

    pub fn to_config(&self) -> SequenceConfig {
        SequenceConfig {
            comment: None,
            n: self.n,
            d: Some(self.d),
            degree: Some(RationalLit(self.degree.clone())),
            c2: self.bundle.c2,
            c1_multiple: Some(self.bundle.c1_multiple),
            pieces: Some(
                self.pieces
                    .iter()
                    .map(|p| PieceConfig {
                        tau_lo: RationalLit(p.tau_lo.clone()),
                        tau_hi: RationalLit(p.tau_hi.clone()),
                        q_coeffs: p.q_poly.coeffs().iter().cloned().map(RationalLit).collect(),
                        v_coeffs: p.v_poly.coeffs().iter().cloned().map(RationalLit).collect(),
                        label: p.label.clone(),
                    })
                    .collect(),
            ),
        }
    }
}

/// A rational in configuration files: an integer or a `"p/q"` string.
/// Always written back as a string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalLit(pub Rational);

impl Serialize for RationalLit {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&format_rational(&self.0))
    }
}

impl<'de> Deserialize<'de> for RationalLit {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Int(v) => Ok(RationalLit(rat(v))),
            Raw::Text(s) => parse_rational(&s)
                .map(RationalLit)
                .map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceConfig {
    pub tau_lo: RationalLit,
    pub tau_hi: RationalLit,
    /// Ascending coefficients of `Q_i`.
    pub q_coeffs: Vec<RationalLit>,
    /// Ascending coefficients of `V_i`.
    pub v_coeffs: Vec<RationalLit>,
    #[serde(default)]
    pub label: String,
}

/// JSON input describing a sequence, either by bundle parameters (the
/// two-piece shape of a degree-five del Pezzo manifold is then built) or by
/// an explicit list of pieces.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceConfig {
    #[serde(rename = "_comment", default, skip_serializing)]
    pub comment: Option<serde_json::Value>,
    pub n: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<u32>,
    /// `(L^n)`. When omitted for a parametric config, the value making the
    /// volume continuous at `τ_1` is used.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<RationalLit>,
    pub c2: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c1_multiple: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pieces: Option<Vec<PieceConfig>>,
}

impl SequenceConfig {
    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        serde_json::from_str(text).map_err(|e| ModelError::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NoPieces,
    TauZero { found: Rational },
    EmptyInterval { index: usize },
    NotContiguous { index: usize },
    DerivativeLink { index: usize },
    VolumeContinuity { index: usize },
    AnticanonicalVolume { expected: Rational, found: Rational },
    NonPositiveDegree,
    Codimension { d: u32, n: u32 },
    Bundle(IntersectionError),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoPieces => write!(f, "sequence has no pieces"),
            Violation::TauZero { found } => {
                write!(f, "τ₀ must be 0 (found {})", format_rational(found))
            }
            Violation::EmptyInterval { index } => {
                write!(f, "tau_lo < tau_hi violated on piece {index}")
            }
            Violation::NotContiguous { index } => {
                write!(f, "pieces not contiguous at index {index}")
            }
            Violation::DerivativeLink { index } => {
                write!(f, "derivative link violated on piece {index}")
            }
            Violation::VolumeContinuity { index } => {
                write!(f, "volume continuity violated at index {index}")
            }
            Violation::AnticanonicalVolume { expected, found } => write!(
                f,
                "volume at 0 is {} but (-K_X)^n = {}",
                format_rational(found),
                format_rational(expected)
            ),
            Violation::NonPositiveDegree => write!(f, "degree (L^n) must be positive"),
            Violation::Codimension { d, n } => {
                write!(
                    f,
                    "codimension d = {d} must equal n - 2 = {}",
                    n.saturating_sub(2)
                )
            }
            Violation::Bundle(e) => write!(f, "{e}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "pass");
        }
        let parts: Vec<String> = self.violations.iter().map(ToString::to_string).collect();
        write!(f, "{}", parts.join("; "))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error(
        "no preset for n = {0}: degree-five del Pezzo manifolds have n <= 6, \
         and a plane blowup with two ample models needs n >= 4 (supported: 4, 5, 6)"
    )]
    UnsupportedPreset(u32),
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("config with explicit pieces must give the degree (L^n)")]
    MissingDegree,
    #[error("invalid sequence: {0}")]
    Invalid(ValidationReport),
}

/// Preset `deg c_2(N_{S/X})` for the plane in a degree-five del Pezzo manifold.
pub fn del_pezzo5_c2(n: u32) -> Option<i64> {
    match n {
        4 | 5 => Some(2),
        6 => Some(3),
        _ => None,
    }
}

/// Two pieces: the blowup on `[0, n-1]`, then `P^n` with `E` a hyperplane on
/// `[n-1, 2n-2]`. No validation is done.
pub fn del_pezzo_shape(
    bundle: &NormalBundleData,
    degree: &Rational,
) -> Result<AmpleModelSequence, IntersectionError> {
    let n = bundle.ambient_dim;
    let tau1 = rat(n as i64 - 1);
    let tau2 = rat(2 * n as i64 - 2);
    let first = ModelPiece {
        tau_lo: Rational::zero(),
        tau_hi: tau1.clone(),
        q_poly: intersection::restriction_polynomial(bundle)?,
        v_poly: intersection::blowup_volume_polynomial(bundle, degree)?,
        label: "X~".to_string(),
    };
    let second = ModelPiece {
        tau_lo: tau1,
        tau_hi: tau2.clone(),
        q_poly: Polynomial::linear_power(&tau2, &rat(-1), n - 1),
        v_poly: Polynomial::linear_power(&tau2, &rat(-1), n),
        label: "P^n".to_string(),
    };
    Ok(AmpleModelSequence {
        n,
        d: bundle.rank,
        degree: degree.clone(),
        pieces: vec![first, second],
        bundle: bundle.clone(),
    })
}

/// The degree `(L^n)` for which the two-piece shape has a continuous volume
/// at `τ_1 = n-1`. Equals 5 at the del Pezzo presets.
pub fn continuity_degree(bundle: &NormalBundleData) -> Result<Rational, IntersectionError> {
    let n = bundle.ambient_dim;
    let tau1 = rat(n as i64 - 1);
    let scale = tau1.pow(n as i32);
    let without_constant = intersection::blowup_volume_polynomial(bundle, &Rational::zero())?;
    // V_2(τ_1) = (n-1)^n, and the degree only enters V_1 as degree·(n-1)^n.
    Ok((&scale - without_constant.eval(&tau1)) / scale)
}

pub fn preset_del_pezzo5(n: u32) -> Result<AmpleModelSequence, ModelError> {
    let c2 = del_pezzo5_c2(n).ok_or(ModelError::UnsupportedPreset(n))?;
    let bundle = NormalBundleData::plane(n, c2);
    let seq = del_pezzo_shape(&bundle, &rat(DEL_PEZZO_DEGREE)).map_err(|e| {
        ModelError::Invalid(ValidationReport {
            violations: vec![Violation::Bundle(e)],
        })
    })?;
    let report = validate_sequence(&seq);
    if !report.is_ok() {
        return Err(ModelError::Invalid(report));
    }
    Ok(seq)
}

pub fn from_config(cfg: &SequenceConfig) -> Result<AmpleModelSequence, ModelError> {
    let n = cfg.n;
    let invalid = |v: Violation| {
        ModelError::Invalid(ValidationReport {
            violations: vec![v],
        })
    };
    let d = cfg.d.unwrap_or_else(|| n.saturating_sub(2));
    if d + 2 != n {
        return Err(invalid(Violation::Codimension { d, n }));
    }
    let bundle = NormalBundleData {
        ambient_dim: n,
        rank: d,
        c1_multiple: cfg.c1_multiple.unwrap_or(n as i64 - 4),
        c2: cfg.c2,
    };
    bundle.check().map_err(|e| invalid(Violation::Bundle(e)))?;

    let seq = match &cfg.pieces {
        Some(pieces) => {
            let degree = cfg.degree.clone().ok_or(ModelError::MissingDegree)?.0;
            AmpleModelSequence {
                n,
                d,
                degree,
                bundle,
                pieces: pieces
                    .iter()
                    .map(|p| ModelPiece {
                        tau_lo: p.tau_lo.0.clone(),
                        tau_hi: p.tau_hi.0.clone(),
                        q_poly: Polynomial::from_coeffs(
                            p.q_coeffs.iter().map(|c| c.0.clone()).collect(),
                        ),
                        v_poly: Polynomial::from_coeffs(
                            p.v_coeffs.iter().map(|c| c.0.clone()).collect(),
                        ),
                        label: p.label.clone(),
                    })
                    .collect(),
            }
        }
        None => {
            let degree = match &cfg.degree {
                Some(lit) => lit.0.clone(),
                None => continuity_degree(&bundle).map_err(|e| invalid(Violation::Bundle(e)))?,
            };
            del_pezzo_shape(&bundle, &degree).map_err(|e| invalid(Violation::Bundle(e)))?
        }
    };

    let report = validate_sequence(&seq);
    if report.is_ok() {
        Ok(seq)
    } else {
        Err(ModelError::Invalid(report))
    }
}

pub fn validate_sequence(seq: &AmpleModelSequence) -> ValidationReport {
    let mut violations = Vec::new();
    if let Err(e) = seq.bundle.check() {
        violations.push(Violation::Bundle(e));
    }
    if seq.d + 2 != seq.n {
        violations.push(Violation::Codimension { d: seq.d, n: seq.n });
    }
    if !seq.degree.is_positive() {
        violations.push(Violation::NonPositiveDegree);
    }
    let Some(first) = seq.pieces.first() else {
        violations.push(Violation::NoPieces);
        return ValidationReport { violations };
    };
    if !first.tau_lo.is_zero() {
        violations.push(Violation::TauZero {
            found: first.tau_lo.clone(),
        });
    }
    let expected_volume = seq.anticanonical_volume();
    let found_volume = first.v_poly.eval(&Rational::zero());
    if found_volume != expected_volume {
        violations.push(Violation::AnticanonicalVolume {
            expected: expected_volume,
            found: found_volume,
        });
    }
    let minus_n = rat(-(seq.n as i64));
    for (index, piece) in seq.pieces.iter().enumerate() {
        if piece.tau_lo >= piece.tau_hi {
            violations.push(Violation::EmptyInterval { index });
        }
        if piece.v_poly.derivative() != piece.q_poly.scale(&minus_n) {
            violations.push(Violation::DerivativeLink { index });
        }
    }
    for (index, pair) in seq.pieces.windows(2).enumerate() {
        let (left, right) = (&pair[0], &pair[1]);
        if left.tau_hi != right.tau_lo {
            violations.push(Violation::NotContiguous { index: index + 1 });
        } else if left.v_poly.eval(&left.tau_hi) != right.v_poly.eval(&right.tau_lo) {
            violations.push(Violation::VolumeContinuity { index: index + 1 });
        }
    }
    ValidationReport { violations }
}

/// `samples` evenly spaced exact points `(x, V(x))` on each piece, endpoints
/// included.
pub fn volume_samples(seq: &AmpleModelSequence, samples: usize) -> Vec<Vec<(Rational, Rational)>> {
    seq.pieces
        .iter()
        .map(|piece| {
            sample_points(&piece.tau_lo, &piece.tau_hi, samples)
                .into_iter()
                .map(|x| {
                    let v = piece.v_poly.eval(&x);
                    (x, v)
                })
                .collect()
        })
        .collect()
}

/// `count` evenly spaced points of `[lo, hi]`, both ends included when `count >= 2`.
pub fn sample_points(lo: &Rational, hi: &Rational, count: usize) -> Vec<Rational> {
    match count {
        0 => Vec::new(),
        1 => vec![lo.clone()],
        _ => {
            let step = (hi - lo) / rat(count as i64 - 1);
            (0..count).map(|j| lo + &step * rat(j as i64)).collect()
        }
    }
}
