//! Element arithmetic for the discrete Heisenberg group and its index-2
//! extension by the involution `t`.
//!
//! A Heisenberg element `(x, y, z)` stands for the normal-form word
//! `[a,b]^z b^y a^x` with `[a,b] = a b a^-1 b^-1`. Multiplying normal forms
//! gives
//!
//! ```text
//! (x1, y1, z1) * (x2, y2, z2) = (x1 + x2, y1 + y2, z1 + z2 + x1 * y2)
//! ```
//!
//! which is exactly the product of the unitriangular matrices returned by
//! [`to_matrix`]. Elements of the extension are pairs `(h, t)` standing for
//! `h t^t`; conjugation by `t` swaps `a` and `b` and acts on coordinates by
//! [`HeisPoint::sigma`].
//!
//! All arithmetic is checked. Overflow surfaces as [`GroupError::Overflow`].

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("letter `{letter}` is not in the {alphabet} alphabet")]
    MixedAlphabet {
        letter: char,
        alphabet: &'static str,
    },
    #[error("cannot parse word token `{0}`")]
    Parse(String),
}

pub type Result<T, E = GroupError> = std::result::Result<T, E>;

#[inline]
fn add(a: i64, b: i64, op: &'static str) -> Result<i64> {
    a.checked_add(b).ok_or(GroupError::Overflow(op))
}

#[inline]
fn mul(a: i64, b: i64, op: &'static str) -> Result<i64> {
    a.checked_mul(b).ok_or(GroupError::Overflow(op))
}

#[inline]
fn neg(a: i64, op: &'static str) -> Result<i64> {
    a.checked_neg().ok_or(GroupError::Overflow(op))
}

/// An element of the Heisenberg group in normal-form coordinates.
#[derive(
    Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
pub struct HeisPoint {
    pub x: i64,
    pub y: i64,
    pub z: i64,
}

impl HeisPoint {
    pub const IDENTITY: HeisPoint = HeisPoint { x: 0, y: 0, z: 0 };
    pub const A: HeisPoint = HeisPoint { x: 1, y: 0, z: 0 };
    pub const B: HeisPoint = HeisPoint { x: 0, y: 1, z: 0 };

    pub const fn new(x: i64, y: i64, z: i64) -> Self {
        HeisPoint { x, y, z }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::IDENTITY
    }

    pub fn checked_mul(&self, q: &HeisPoint) -> Result<HeisPoint> {
        const OP: &str = "heisenberg product";
        let cross = mul(self.x, q.y, OP)?;
        Ok(HeisPoint {
            x: add(self.x, q.x, OP)?,
            y: add(self.y, q.y, OP)?,
            z: add(add(self.z, q.z, OP)?, cross, OP)?,
        })
    }

    pub fn inverse(&self) -> Result<HeisPoint> {
        const OP: &str = "heisenberg inverse";
        let xy = mul(self.x, self.y, OP)?;
        Ok(HeisPoint {
            x: neg(self.x, OP)?,
            y: neg(self.y, OP)?,
            z: xy.checked_sub(self.z).ok_or(GroupError::Overflow(OP))?,
        })
    }

    /// Conjugation by `t`: the automorphism swapping `a` and `b`.
    /// `(x, y, z) -> (y, x, xy - z)`; an involution.
    pub fn sigma(&self) -> Result<HeisPoint> {
        const OP: &str = "sigma";
        let xy = mul(self.x, self.y, OP)?;
        Ok(HeisPoint {
            x: self.y,
            y: self.x,
            z: xy.checked_sub(self.z).ok_or(GroupError::Overflow(OP))?,
        })
    }

    /// `a^k` as an element.
    pub const fn a_pow(k: i64) -> HeisPoint {
        HeisPoint { x: k, y: 0, z: 0 }
    }

    /// `b^k` as an element.
    pub const fn b_pow(k: i64) -> HeisPoint {
        HeisPoint { x: 0, y: k, z: 0 }
    }

    /// `[a,b]^k`, the central generator raised to `k`.
    pub const fn center(k: i64) -> HeisPoint {
        HeisPoint { x: 0, y: 0, z: k }
    }
}

impl fmt::Display for HeisPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

/// Panics on overflow; use [`HeisPoint::checked_mul`] where inputs are not
/// known to be small.
impl std::ops::Mul for HeisPoint {
    type Output = HeisPoint;

    fn mul(self, rhs: HeisPoint) -> HeisPoint {
        self.checked_mul(&rhs)
            .expect("heisenberg product overflowed")
    }
}

/// An element `h t^t` of the index-2 extension.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VHPoint {
    pub h: HeisPoint,
    pub t: bool,
}

impl VHPoint {
    pub const IDENTITY: VHPoint = VHPoint {
        h: HeisPoint::IDENTITY,
        t: false,
    };
    pub const A: VHPoint = VHPoint {
        h: HeisPoint::A,
        t: false,
    };
    pub const T: VHPoint = VHPoint {
        h: HeisPoint::IDENTITY,
        t: true,
    };

    pub const fn new(h: HeisPoint, t: bool) -> Self {
        VHPoint { h, t }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::IDENTITY
    }

    /// `(h1, t1)(h2, t2) = (h1 * sigma^t1(h2), t1 xor t2)`.
    pub fn checked_mul(&self, q: &VHPoint) -> Result<VHPoint> {
        let rhs = if self.t { q.h.sigma()? } else { q.h };
        Ok(VHPoint {
            h: self.h.checked_mul(&rhs)?,
            t: self.t ^ q.t,
        })
    }

    pub fn inverse(&self) -> Result<VHPoint> {
        let hi = self.h.inverse()?;
        Ok(if self.t {
            VHPoint {
                h: hi.sigma()?,
                t: true,
            }
        } else {
            VHPoint { h: hi, t: false }
        })
    }
}

impl From<HeisPoint> for VHPoint {
    fn from(h: HeisPoint) -> Self {
        VHPoint { h, t: false }
    }
}

impl fmt::Display for VHPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {}, {}; t={})",
            self.h.x, self.h.y, self.h.z, self.t as u8
        )
    }
}

impl std::ops::Mul for VHPoint {
    type Output = VHPoint;

    fn mul(self, rhs: VHPoint) -> VHPoint {
        self.checked_mul(&rhs).expect("vH product overflowed")
    }
}

#[derive(Serialize, Deserialize)]
struct VHPointRepr {
    x: i64,
    y: i64,
    z: i64,
    t: u8,
}

impl Serialize for VHPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        VHPointRepr {
            x: self.h.x,
            y: self.h.y,
            z: self.h.z,
            t: self.t as u8,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for VHPoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = VHPointRepr::deserialize(d)?;
        let t = match r.t {
            0 => false,
            1 => true,
            other => {
                return Err(serde::de::Error::custom(format!(
                    "t must be 0 or 1, got {other}"
                )))
            }
        };
        Ok(VHPoint {
            h: HeisPoint::new(r.x, r.y, r.z),
            t,
        })
    }
}

pub type Matrix3 = [[i64; 3]; 3];

/// Faithful representation `(x, y, z) -> [[1, x, z], [0, 1, y], [0, 0, 1]]`.
pub fn to_matrix(p: &HeisPoint) -> Matrix3 {
    [[1, p.x, p.z], [0, 1, p.y], [0, 0, 1]]
}

/// Reads coordinates back off an upper-unitriangular matrix.
pub fn from_matrix(m: &Matrix3) -> Option<HeisPoint> {
    let unitriangular = m[0][0] == 1
        && m[1][1] == 1
        && m[2][2] == 1
        && m[1][0] == 0
        && m[2][0] == 0
        && m[2][1] == 0;
    unitriangular.then(|| HeisPoint::new(m[0][1], m[1][2], m[0][2]))
}

pub fn matrix_mul(p: &Matrix3, q: &Matrix3) -> Result<Matrix3> {
    const OP: &str = "matrix product";
    let mut out = [[0i64; 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            let mut acc = 0i64;
            for k in 0..3 {
                acc = add(acc, mul(p[i][k], q[k][j], OP)?, OP)?;
            }
            *cell = acc;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const A_MAT: Matrix3 = [[1, 1, 0], [0, 1, 0], [0, 0, 1]];
    const B_MAT: Matrix3 = [[1, 0, 0], [0, 1, 1], [0, 0, 1]];

    #[test]
    fn product_examples() {
        let p = HeisPoint::new(5, -3, 7);
        assert_eq!(HeisPoint::IDENTITY * p, p);
        // a*b and b*a through the matrix images of the generators
        let ab = from_matrix(&matrix_mul(&A_MAT, &B_MAT).unwrap()).unwrap();
        let ba = from_matrix(&matrix_mul(&B_MAT, &A_MAT).unwrap()).unwrap();
        assert_eq!(ab, HeisPoint::new(1, 1, 1));
        assert_eq!(ba, HeisPoint::new(1, 1, 0));
        assert_eq!(HeisPoint::A * HeisPoint::B, ab);
        assert_eq!(HeisPoint::B * HeisPoint::A, ba);
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(HeisPoint::IDENTITY.inverse().unwrap(), HeisPoint::IDENTITY);
        for (p, expected) in [
            (HeisPoint::new(1, 1, 1), HeisPoint::new(-1, -1, 0)),
            (HeisPoint::new(2, -1, 3), HeisPoint::new(-2, 1, -5)),
        ] {
            let inv = p.inverse().unwrap();
            assert_eq!(inv, expected);
            assert!((p * inv).is_identity());
            assert!((inv * p).is_identity());
        }
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(HeisPoint::A.sigma().unwrap(), HeisPoint::B);
        assert_eq!(HeisPoint::center(1).sigma().unwrap(), HeisPoint::center(-1));
        let p = HeisPoint::new(7, -2, 4);
        assert_eq!(p.sigma().unwrap().sigma().unwrap(), p);
    }

    #[test]
    fn vh_examples() {
        let t = VHPoint::T;
        assert_eq!(t * t, VHPoint::IDENTITY);
        let at = VHPoint::new(HeisPoint::A, true);
        assert_eq!(t * at, VHPoint::new(HeisPoint::B, false));
        assert_eq!(VHPoint::A * t, VHPoint::new(HeisPoint::A, true));

        assert_eq!(t.inverse().unwrap(), t);
        assert_eq!(
            VHPoint::A.inverse().unwrap(),
            VHPoint::new(HeisPoint::a_pow(-1), false)
        );
        let inv = at.inverse().unwrap();
        assert_eq!(inv, VHPoint::new(HeisPoint::b_pow(-1), true));
        assert!((at * inv).is_identity());
    }

    #[test]
    fn overflow_is_reported() {
        let big = HeisPoint::new(i64::MAX, 2, 0);
        assert!(matches!(
            big.checked_mul(&HeisPoint::A),
            Err(GroupError::Overflow(_))
        ));
        assert!(matches!(
            big.checked_mul(&big),
            Err(GroupError::Overflow(_))
        ));
        assert!(HeisPoint::new(i64::MIN, 0, 0).inverse().is_err());
        assert!(big.sigma().is_err());
    }

    #[test]
    fn matrix_identity_and_example() {
        assert_eq!(
            to_matrix(&HeisPoint::IDENTITY),
            [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
        );
        assert_eq!(
            to_matrix(&HeisPoint::new(1, 1, 1)),
            matrix_mul(&A_MAT, &B_MAT).unwrap()
        );
        assert_eq!(from_matrix(&[[2, 0, 0], [0, 1, 0], [0, 0, 1]]), None);
    }

    #[test]
    fn vh_json_shape() {
        let p = VHPoint::new(HeisPoint::new(1, -2, 3), true);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"x":1,"y":-2,"z":3,"t":1}"#);
        assert_eq!(serde_json::from_str::<VHPoint>(&s).unwrap(), p);
        assert!(serde_json::from_str::<VHPoint>(r#"{"x":0,"y":0,"z":0,"t":2}"#).is_err());
        let h = serde_json::to_string(&HeisPoint::new(0, 0, 5)).unwrap();
        assert_eq!(h, r#"{"x":0,"y":0,"z":5}"#);
    }
}
