//! Intersection numbers on the blowup of a plane `S ≅ P^2` in an
//! `n`-dimensional Fano manifold.
//!
//! The exceptional divisor is the projective bundle `E = P_S(N^∨)` of
//! rank `r = n - 2` over `S`. Write `ξ` for its tautological class and `L`
//! for the pullback of the hyperplane class `H` of `S`. The convention used
//! throughout:
//!
//! - `O_E(E) = O_E(-ξ)`, i.e. `E|_E = -ξ`;
//! - `π_*(ξ^{r-1+k}) = s_k(N)`, with `s(N) = c(N)^{-1}`, so
//!   `s_1 = -c_1` and `s_2 = c_1^2 - c_2`.
//!
//! Only `s_0, s_1, s_2` are ever needed since the base is a surface
//! (`H^3 = 0`).

use num_traits::{One, Zero};
use thiserror::Error;

use crate::exactmath::{rat, Polynomial, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IntersectionError {
    #[error("normal bundle rank {rank} is below 2; a surface center needs codimension at least 2")]
    RankTooSmall { rank: u32 },
    #[error("normal bundle rank {rank} does not match codimension {expected} of a plane in dimension {ambient_dim}")]
    RankMismatch {
        rank: u32,
        expected: u32,
        ambient_dim: u32,
    },
    #[error("intersection index k = {k} is outside 0..={ambient_dim}")]
    IndexOutOfRange { k: u32, ambient_dim: u32 },
}

/// Chern data of the normal bundle `N_{S/X}` of a plane, in units of `H`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NormalBundleData {
    /// `n = dim X`.
    pub ambient_dim: u32,
    /// `r = n - 2`.
    pub rank: u32,
    /// `c_1(N) = c1_multiple · H`.
    pub c1_multiple: i64,
    /// `deg c_2(N)`.
    pub c2: i64,
}

impl NormalBundleData {
    /// Normal bundle of a linearly embedded plane with `-K_X|_S = (n-1)H`.
    /// Adjunction with `K_S = -3H` forces `c_1(N) = (n-4)H`.
    pub fn plane(ambient_dim: u32, c2: i64) -> Self {
        Self {
            ambient_dim,
            rank: ambient_dim.saturating_sub(2),
            c1_multiple: ambient_dim as i64 - 4,
            c2,
        }
    }

    pub fn check(&self) -> Result<(), IntersectionError> {
        if self.rank < 2 {
            return Err(IntersectionError::RankTooSmall { rank: self.rank });
        }
        if self.rank + 2 != self.ambient_dim {
            return Err(IntersectionError::RankMismatch {
                rank: self.rank,
                expected: self.ambient_dim.saturating_sub(2),
                ambient_dim: self.ambient_dim,
            });
        }
        Ok(())
    }
}

/// Degrees of `s_0, s_1, s_2` of `N_{S/X}` paired against `H^2, H, 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SegreData {
    pub s0: Rational,
    pub s1: Rational,
    pub s2: Rational,
}

impl SegreData {
    /// `s_k`, zero beyond `k = 2`.
    pub fn get(&self, k: u32) -> Rational {
        match k {
            0 => self.s0.clone(),
            1 => self.s1.clone(),
            2 => self.s2.clone(),
            _ => Rational::zero(),
        }
    }

    /// The same data with the signs of `s_1` and `s_2` flipped.
    pub fn flipped(&self) -> Self {
        Self {
            s0: self.s0.clone(),
            s1: -self.s1.clone(),
            s2: -self.s2.clone(),
        }
    }
}

pub fn segre_classes(bundle: &NormalBundleData) -> Result<SegreData, IntersectionError> {
    if bundle.rank < 2 {
        return Err(IntersectionError::RankTooSmall { rank: bundle.rank });
    }
    let c1 = rat(bundle.c1_multiple);
    let c2 = rat(bundle.c2);
    Ok(SegreData {
        s0: Rational::one(),
        s1: -c1.clone(),
        s2: &c1 * &c1 - c2,
    })
}

/// `∫_E ξ^j L^{n-1-j}`.
fn exceptional_number(segre: &SegreData, rank: u32, j: u32) -> Rational {
    // L^{n-1-j} vanishes once n-1-j > 2, i.e. j < r-1.
    if j + 1 < rank {
        return Rational::zero();
    }
    // ξ^j = ξ^{r-1+k} pushes forward to s_k, which pairs with H^{2-k}.
    segre.get(j + 1 - rank)
}

/// `Q_1(x) = ((xξ + (n-1)L)^{n-1})` on `E`, which is also
/// `((σ^*(-K_X) - xE)^{n-1} · E)` on the blowup.
pub fn restriction_polynomial(bundle: &NormalBundleData) -> Result<Polynomial, IntersectionError> {
    bundle.check()?;
    let segre = segre_classes(bundle)?;
    Ok(restriction_polynomial_with(bundle, &segre))
}

/// [`restriction_polynomial`] with caller-supplied Segre numbers.
pub fn restriction_polynomial_with(bundle: &NormalBundleData, segre: &SegreData) -> Polynomial {
    let n = bundle.ambient_dim;
    let top = n - 1;
    let anti = rat(n as i64 - 1);
    let mut binom = Rational::one();
    let mut coeffs = Vec::with_capacity(n as usize);
    for j in 0..=top {
        let number = exceptional_number(segre, bundle.rank, j);
        coeffs.push(&binom * num_traits::pow(anti.clone(), (top - j) as usize) * number);
        binom = binom * rat((top - j) as i64) / rat(j as i64 + 1);
    }
    Polynomial::from_coeffs(coeffs)
}

/// `((σ^*L)^{n-k} · E^k)` on the blowup, where `(L^n) = degree`.
pub fn pushforward_intersection(
    bundle: &NormalBundleData,
    degree: &Rational,
    k: u32,
) -> Result<Rational, IntersectionError> {
    bundle.check()?;
    let n = bundle.ambient_dim;
    if k > n {
        return Err(IntersectionError::IndexOutOfRange { k, ambient_dim: n });
    }
    let segre = segre_classes(bundle)?;
    Ok(pushforward_with(&segre, bundle.rank, degree, k))
}

fn pushforward_with(segre: &SegreData, codim: u32, degree: &Rational, k: u32) -> Rational {
    if k == 0 {
        return degree.clone();
    }
    if k < codim {
        return Rational::zero();
    }
    // E^k · σ^*L^{n-k} = (E|_E)^{k-1} · L^{n-k} = (-1)^{k-1} ξ^{k-1} L^{n-k} on E.
    let value = segre.get(k - codim);
    if (k - 1) % 2 == 1 {
        -value
    } else {
        value
    }
}

/// `V_1(x) = ((σ^*(-K_X) - xE)^n)`, valid on the first model piece.
pub fn blowup_volume_polynomial(
    bundle: &NormalBundleData,
    degree: &Rational,
) -> Result<Polynomial, IntersectionError> {
    bundle.check()?;
    let segre = segre_classes(bundle)?;
    Ok(blowup_volume_polynomial_with(bundle, &segre, degree))
}

/// [`blowup_volume_polynomial`] with caller-supplied Segre numbers.
pub fn blowup_volume_polynomial_with(
    bundle: &NormalBundleData,
    segre: &SegreData,
    degree: &Rational,
) -> Polynomial {
    let n = bundle.ambient_dim;
    let anti = rat(n as i64 - 1);
    let mut binom = Rational::one();
    let mut coeffs = Vec::with_capacity(n as usize + 1);
    for k in 0..=n {
        let sign = if k % 2 == 0 { rat(1) } else { rat(-1) };
        let number = pushforward_with(segre, bundle.rank, degree, k);
        coeffs.push(&binom * num_traits::pow(anti.clone(), (n - k) as usize) * sign * number);
        binom = binom * rat((n - k) as i64) / rat(k as i64 + 1);
    }
    Polynomial::from_coeffs(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::ratio;
    use std::collections::BTreeMap;

    fn bundle(n: u32, c1: i64, c2: i64) -> NormalBundleData {
        NormalBundleData {
            ambient_dim: n,
            rank: n - 2,
            c1_multiple: c1,
            c2,
        }
    }

    fn segre_tuple(s: &SegreData) -> (Rational, Rational, Rational) {
        (s.s0.clone(), s.s1.clone(), s.s2.clone())
    }

    #[test]
    fn segre_examples() {
        assert_eq!(
            segre_tuple(&segre_classes(&bundle(4, 0, 2)).unwrap()),
            (rat(1), rat(0), rat(-2))
        );
        assert_eq!(
            segre_tuple(&segre_classes(&bundle(6, 2, 3)).unwrap()),
            (rat(1), rat(-2), rat(1))
        );
        assert_eq!(
            segre_tuple(&segre_classes(&bundle(5, 1, 0)).unwrap()),
            (rat(1), rat(-1), rat(1))
        );
    }

    #[test]
    fn rank_below_two_rejected() {
        let thin = NormalBundleData {
            ambient_dim: 3,
            rank: 1,
            c1_multiple: -1,
            c2: 0,
        };
        assert_eq!(
            segre_classes(&thin),
            Err(IntersectionError::RankTooSmall { rank: 1 })
        );
        let mismatched = NormalBundleData {
            rank: 3,
            ..bundle(4, 0, 2)
        };
        assert!(matches!(
            restriction_polynomial(&mismatched),
            Err(IntersectionError::RankMismatch { .. })
        ));
    }

    #[test]
    fn restriction_examples() {
        let p = |c: &[i64]| Polynomial::from_i64s(c);
        assert_eq!(
            restriction_polynomial(&NormalBundleData::plane(4, 2)).unwrap(),
            p(&[0, 27, 0, -2])
        );
        assert_eq!(
            restriction_polynomial(&NormalBundleData::plane(5, 2)).unwrap(),
            p(&[0, 0, 96, -16, -1])
        );
        assert_eq!(
            restriction_polynomial(&NormalBundleData::plane(6, 3)).unwrap(),
            p(&[0, 0, 0, 250, -50, 1])
        );
    }

    #[test]
    fn pushforward_examples() {
        let b = NormalBundleData::plane(4, 2);
        let five = rat(5);
        assert_eq!(pushforward_intersection(&b, &five, 2).unwrap(), rat(-1));
        assert_eq!(pushforward_intersection(&b, &five, 1).unwrap(), rat(0));
        assert_eq!(pushforward_intersection(&b, &five, 4).unwrap(), rat(2));
        assert_eq!(pushforward_intersection(&b, &five, 0).unwrap(), rat(5));
        assert_eq!(
            pushforward_intersection(&b, &five, 5),
            Err(IntersectionError::IndexOutOfRange {
                k: 5,
                ambient_dim: 4
            })
        );
    }

    #[test]
    fn pushforward_vanishes_below_codimension() {
        for n in 4..=8u32 {
            for c2 in -3..=6 {
                let b = NormalBundleData::plane(n, c2);
                for k in 1..n - 2 {
                    assert!(pushforward_intersection(&b, &ratio(7, 3), k)
                        .unwrap()
                        .is_zero());
                }
            }
        }
    }

    #[test]
    fn volume_examples() {
        let p = |c: &[i64]| Polynomial::from_i64s(c);
        let five = rat(5);
        assert_eq!(
            blowup_volume_polynomial(&NormalBundleData::plane(4, 2), &five).unwrap(),
            p(&[405, 0, -54, 0, 2])
        );
        assert_eq!(
            blowup_volume_polynomial(&NormalBundleData::plane(6, 3), &five).unwrap(),
            p(&[78125, 0, 0, 0, -375, 60, -1])
        );
        assert_eq!(
            blowup_volume_polynomial(&NormalBundleData::plane(5, 2), &five).unwrap(),
            p(&[5120, 0, 0, -160, 20, 1])
        );
    }

    #[test]
    fn volume_derivative_is_minus_n_times_restriction() {
        for n in 4..=6u32 {
            for c1 in -3..=3 {
                for c2 in -2..=6 {
                    let b = bundle(n, c1, c2);
                    let q = restriction_polynomial(&b).unwrap();
                    let v = blowup_volume_polynomial(&b, &rat(5)).unwrap();
                    assert_eq!(
                        v.derivative(),
                        q.scale(&rat(-(n as i64))),
                        "n={n} c1={c1} c2={c2}"
                    );
                    assert_eq!(v.eval(&rat(0)), rat(5) * rat(n as i64 - 1).pow(n as i32));
                }
            }
        }
    }

    #[test]
    fn restriction_has_three_monomials() {
        for n in 4..=6u32 {
            for c2 in 0..=6 {
                let q = restriction_polynomial(&NormalBundleData::plane(n, c2)).unwrap();
                let n = n as usize;
                for k in 0..n - 3 {
                    assert!(q.coeff(k).is_zero());
                }
                let m = rat(n as i64 - 1);
                assert_eq!(q.coeff(n - 3), ratio(1, 2) * m.pow(3) * rat(n as i64 - 2));
            }
        }
    }

    /// Chow ring of `P(N)` over `P^2` by direct reduction: monomials
    /// `ξ^a H^b` with `H^3 = 0`, the rank-`r` relation
    /// `ξ^r = -c_1 ξ^{r-1} H - c_2 ξ^{r-2} H^2`, and `∫ ξ^{r-1} H^2 = 1`.
    fn oracle_exceptional_number(rank: u32, c1: i64, c2: i64, j: u32, base: u32) -> Rational {
        let mut terms: BTreeMap<(u32, u32), Rational> = BTreeMap::new();
        terms.insert((j, base), rat(1));
        let mut total = rat(0);
        while let Some(((a, b), coeff)) = terms.pop_last() {
            if coeff.is_zero() || b > 2 {
                continue;
            }
            if a >= rank {
                *terms.entry((a - 1, b + 1)).or_insert_with(|| rat(0)) += &coeff * rat(-c1);
                if a >= 2 {
                    *terms.entry((a - 2, b + 2)).or_insert_with(|| rat(0)) += &coeff * rat(-c2);
                }
            } else if a == rank - 1 && b == 2 {
                total += coeff;
            }
        }
        total
    }

    #[test]
    fn restriction_matches_chow_ring_reduction() {
        for n in 4..=6u32 {
            for c1 in -2..=3 {
                for c2 in -1..=6 {
                    let b = bundle(n, c1, c2);
                    let q = restriction_polynomial(&b).unwrap();
                    let top = n - 1;
                    let mut coeffs = Vec::new();
                    let mut binom = rat(1);
                    for j in 0..=top {
                        let number = oracle_exceptional_number(n - 2, c1, c2, j, top - j);
                        coeffs.push(&binom * rat(n as i64 - 1).pow((top - j) as i32) * number);
                        binom = binom * rat((top - j) as i64) / rat(j as i64 + 1);
                    }
                    assert_eq!(q, Polynomial::from_coeffs(coeffs), "n={n} c1={c1} c2={c2}");
                }
            }
        }
    }

    #[test]
    fn chow_ring_oracle_on_p1_bundle() {
        // n = 4, c1 = 0, c2 = 2: ∫ξH^2 = 1, ∫ξ^2H = 0, ∫ξ^3 = -2
        assert_eq!(oracle_exceptional_number(2, 0, 2, 1, 2), rat(1));
        assert_eq!(oracle_exceptional_number(2, 0, 2, 2, 1), rat(0));
        assert_eq!(oracle_exceptional_number(2, 0, 2, 3, 0), rat(-2));
    }
}
