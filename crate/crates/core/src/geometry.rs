//! Cube roots of unity and the ray/sector layout of the λ-plane.

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub const SQRT3: f64 = 1.732_050_807_568_877_2;

/// ζ₀, ζ₁, ζ₂ as constants.
pub const ZETA: [Complex64; 3] = [
    Complex64::new(1.0, 0.0),
    Complex64::new(-0.5, 0.5 * SQRT3),
    Complex64::new(-0.5, -0.5 * SQRT3),
];

/// Angular tolerance (radians) used to snap arguments onto rays.
pub const ANGLE_TOL: f64 = 1e-12;

/// The root ζ_k = e^{2πik/3}.
pub fn zeta(k: usize) -> Result<Complex64> {
    ZETA.get(k).copied().ok_or(Error::IndexOutOfRange(k))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnityRoot {
    pub k: usize,
    pub value: Complex64,
}

impl UnityRoot {
    pub fn new(k: usize) -> Result<Self> {
        Ok(Self { k, value: zeta(k)? })
    }
}

/// One of the twelve rays through the origin at multiples of 30°.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Ray {
    /// l_ζk: outgoing ray in direction ζ_k (argument 120°k).
    L(usize),
    /// l̂_ζk: incoming ray, argument 120°k + 180°.
    LHat(usize),
    /// i·l_ζk: argument 90° + 120°k, the bisector of Ω_k.
    IL(usize),
    /// i·l̂_ζk: argument 270° + 120°k, the bisector of Ω_k⁻.
    ILHat(usize),
}

impl Ray {
    /// Argument of the ray in degrees, in [0, 360).
    pub fn angle_deg(self) -> f64 {
        let a = match self {
            Ray::L(k) => 120.0 * k as f64,
            Ray::LHat(k) => 120.0 * k as f64 + 180.0,
            Ray::IL(k) => 90.0 + 120.0 * k as f64,
            Ray::ILHat(k) => 270.0 + 120.0 * k as f64,
        };
        a.rem_euclid(360.0)
    }

    /// Unit direction vector.
    pub fn direction(self) -> Complex64 {
        Complex64::from_polar(1.0, self.angle_deg().to_radians())
    }

    fn from_index(j: usize) -> Ray {
        // j indexes multiples of 30°.
        match j % 12 {
            0 => Ray::L(0),
            4 => Ray::L(1),
            8 => Ray::L(2),
            6 => Ray::LHat(0),
            10 => Ray::LHat(1),
            2 => Ray::LHat(2),
            3 => Ray::IL(0),
            7 => Ray::IL(1),
            11 => Ray::IL(2),
            9 => Ray::ILHat(0),
            1 => Ray::ILHat(1),
            5 => Ray::ILHat(2),
            _ => unreachable!(),
        }
    }
}

/// Finest region of the fixed sector layout containing a point.
///
/// Open points lie in a 30° wedge which is the intersection of one sector
/// `S_p` (between consecutive lines L_ζk) and one rotated sector `S_q(i)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SectorId {
    Origin,
    Ray(Ray),
    Open { s: u8, s_i: u8 },
}

impl SectorId {
    /// Central reflection λ ↦ −λ.
    pub fn reflect(self) -> SectorId {
        match self {
            SectorId::Origin => SectorId::Origin,
            SectorId::Ray(r) => {
                let j = (r.angle_deg() / 30.0).round() as usize;
                SectorId::Ray(Ray::from_index(j + 6))
            }
            SectorId::Open { s, s_i } => SectorId::Open {
                s: (s + 3) % 6,
                s_i: (s_i + 3) % 6,
            },
        }
    }

    /// The Ω sector containing this region: `(k, minus)` for Ω_k or Ω_k⁻.
    /// Bounding rays (l_ζk, l̂_ζk) and the origin belong to none.
    pub fn omega(self) -> Option<(usize, bool)> {
        let deg = match self {
            SectorId::Origin => return None,
            SectorId::Ray(Ray::L(_)) | SectorId::Ray(Ray::LHat(_)) => return None,
            SectorId::Ray(r) => r.angle_deg(),
            SectorId::Open { s, s_i } => {
                let w = if s_i == (s + 5) % 6 { 2 * s + 1 } else { 2 * s };
                30.0 * w as f64 + 15.0
            }
        };
        omega_of_angle(deg)
    }
}

fn omega_of_angle(deg: f64) -> Option<(usize, bool)> {
    let d = deg.rem_euclid(360.0);
    // Ω₀ spans (30°, 150°); Ω_k is Ω₀ rotated by −120°k.
    for k in 0..3 {
        let c = (90.0 - 120.0 * k as f64).rem_euclid(360.0);
        let diff = (d - c + 540.0).rem_euclid(360.0) - 180.0;
        if diff.abs() < 60.0 {
            return Some((k, false));
        }
        if diff.abs() > 120.0 {
            return Some((k, true));
        }
    }
    None
}

/// Classify λ into the finest containing region.
pub fn classify(lambda: Complex64) -> SectorId {
    if lambda.norm() == 0.0 {
        return SectorId::Origin;
    }
    let mut a = lambda.arg();
    if a < 0.0 {
        a += 2.0 * PI;
    }
    let step = PI / 6.0;
    let j = (a / step).round();
    if (a - j * step).abs() <= ANGLE_TOL {
        return SectorId::Ray(Ray::from_index(j as usize));
    }
    let s = ((a / (PI / 3.0)).floor() as i64).rem_euclid(6) as u8;
    let rot = (a - PI / 2.0).rem_euclid(2.0 * PI);
    let s_i = ((rot / (PI / 3.0)).floor() as i64).rem_euclid(6) as u8;
    SectorId::Open { s, s_i }
}

/// Membership in Ω_k (or Ω_k⁻ when `minus`): |Re(λζ_k)| < √3·Im(λζ_k).
///
/// The bisecting ray is inside, the bounding rays are outside (up to
/// [`ANGLE_TOL`]).
pub fn in_omega(lambda: Complex64, k: usize, minus: bool) -> Result<bool> {
    let z = zeta(k)?;
    let w = if minus { -lambda * z } else { lambda * z };
    if w.norm() == 0.0 {
        return Ok(false);
    }
    let ang = w.arg();
    let lo = PI / 6.0 + ANGLE_TOL;
    let hi = 5.0 * PI / 6.0 - ANGLE_TOL;
    Ok(ang > lo && ang < hi && w.re.abs() < SQRT3 * w.im + 1e-300)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots() {
        assert_eq!(zeta(0).unwrap(), Complex64::new(1.0, 0.0));
        let z1 = zeta(1).unwrap();
        assert!((z1 - Complex64::new(-0.5, 0.866_025_403_784_438_6)).norm() < 1e-15);
        assert!((z1 * zeta(2).unwrap() - 1.0).norm() < 1e-15);
        assert!(zeta(3).is_err());
    }

    #[test]
    fn classify_examples() {
        let i = Complex64::i();
        assert_eq!(classify(2.0 * i), SectorId::Ray(Ray::IL(0)));
        assert_eq!(classify(-2.0 * i), SectorId::Ray(Ray::ILHat(0)));
        assert_eq!(classify(Complex64::new(0.0, 0.0)), SectorId::Origin);
        assert_eq!(classify(2.0 * i).omega(), Some((0, false)));
        assert_eq!(classify(-2.0 * i).omega(), Some((0, true)));
        assert!(!in_omega(Complex64::new(1.0, 0.1), 0, false).unwrap());
        assert_eq!(classify(Complex64::new(1.0, 0.1)).omega(), Some((1, false)));
    }

    #[test]
    fn omega_examples() {
        let i = Complex64::i();
        assert!(in_omega(i, 0, false).unwrap());
        assert!(in_omega(i * ZETA[2], 1, false).unwrap());
        assert!(!in_omega(-i, 0, false).unwrap());
        assert!(in_omega(-i, 0, true).unwrap());
        // bounding ray at 30° is excluded
        assert!(!in_omega(Complex64::from_polar(1.0, PI / 6.0), 0, false).unwrap());
    }

    #[test]
    fn open_wedges_match_inequality() {
        for j in 0..360 {
            let a = (j as f64 + 0.5).to_radians();
            let l = Complex64::from_polar(1.7, a);
            let id = classify(l);
            let expect = (0..3)
                .flat_map(|k| [(k, false), (k, true)])
                .find(|&(k, m)| in_omega(l, k, m).unwrap());
            assert_eq!(id.omega(), expect, "angle {}", j);
        }
    }
}
