//! Small fixed-size linear algebra and `libm` shims.

use core::ops::{Add, AddAssign, Index, Mul, Neg, Sub};

pub(crate) use libm::{acos, atan, atan2, cos, fabs as abs, sin, sqrt, tan};

macro_rules! vec3 {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Copy, Debug, Default, PartialEq)]
        pub struct $name(pub [f64; 3]);

        impl $name {
            pub const ZERO: Self = Self([0.0; 3]);

            pub const fn new(a: f64, b: f64, c: f64) -> Self {
                Self([a, b, c])
            }

            /// Euclidean dot product of the components.
            pub fn dot(&self, other: &Self) -> f64 {
                self.0[0] * other.0[0] + self.0[1] * other.0[1] + self.0[2] * other.0[2]
            }

            pub fn norm(&self) -> f64 {
                sqrt(self.dot(self))
            }

            pub fn max_abs(&self) -> f64 {
                self.0.iter().fold(0.0, |m, c| f64::max(m, abs(*c)))
            }
        }

        impl Add for $name {
            type Output = Self;
            fn add(self, rhs: Self) -> Self {
                Self([self.0[0] + rhs.0[0], self.0[1] + rhs.0[1], self.0[2] + rhs.0[2]])
            }
        }

        impl AddAssign for $name {
            fn add_assign(&mut self, rhs: Self) {
                *self = *self + rhs;
            }
        }

        impl Sub for $name {
            type Output = Self;
            fn sub(self, rhs: Self) -> Self {
                Self([self.0[0] - rhs.0[0], self.0[1] - rhs.0[1], self.0[2] - rhs.0[2]])
            }
        }

        impl Neg for $name {
            type Output = Self;
            fn neg(self) -> Self {
                Self([-self.0[0], -self.0[1], -self.0[2]])
            }
        }

        impl Mul<f64> for $name {
            type Output = Self;
            fn mul(self, s: f64) -> Self {
                Self([self.0[0] * s, self.0[1] * s, self.0[2] * s])
            }
        }

        impl Mul<$name> for f64 {
            type Output = $name;
            fn mul(self, v: $name) -> $name {
                v * self
            }
        }

        impl Index<usize> for $name {
            type Output = f64;
            fn index(&self, i: usize) -> &f64 {
                &self.0[i]
            }
        }

        impl crate::diff::Linear for $name {
            fn zero() -> Self {
                Self::ZERO
            }
            fn axpy(self, a: f64, x: Self) -> Self {
                self + x * a
            }
        }
    };
}

vec3!(
    /// Components with respect to the orthonormal frame `{e1, e2, e3}`.
    ///
    /// The frame is orthonormal, so the ambient inner product is the
    /// Euclidean dot product of the components.
    TangentVector
);

vec3!(
    /// Components with respect to the coordinate basis `{d/dx, d/dy, d/dz}`.
    CoordVector
);

impl TangentVector {
    /// Cross product in the positively oriented frame `{e1, e2, e3}`.
    pub fn cross(&self, o: &Self) -> Self {
        let a = &self.0;
        let b = &o.0;
        Self([
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ])
    }
}

pub type Mat2 = [[f64; 2]; 2];
pub type Mat3 = [[f64; 3]; 3];

pub fn det2(m: &Mat2) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

/// Solves `m x = rhs` for a 2x2 system; `None` when `m` is singular.
pub fn solve2(m: &Mat2, rhs: [f64; 2]) -> Option<[f64; 2]> {
    let d = det2(m);
    if d == 0.0 || !d.is_finite() {
        return None;
    }
    Some([
        (rhs[0] * m[1][1] - m[0][1] * rhs[1]) / d,
        (m[0][0] * rhs[1] - rhs[0] * m[1][0]) / d,
    ])
}

pub fn det3(m: &Mat3) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

pub fn inverse3(m: &Mat3) -> Option<Mat3> {
    let d = det3(m);
    if d == 0.0 || !d.is_finite() {
        return None;
    }
    let mut inv = [[0.0; 3]; 3];
    for (i, row) in inv.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            let (r0, r1) = ((j + 1) % 3, (j + 2) % 3);
            let (c0, c1) = ((i + 1) % 3, (i + 2) % 3);
            *entry = (m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0]) / d;
        }
    }
    Some(inv)
}

pub fn mat3_vec(m: &Mat3, v: [f64; 3]) -> [f64; 3] {
    [
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    ]
}

/// Distance from `x` to the nearest pole `pi/2 + k pi` of `tan`.
pub fn tan_pole_distance(x: f64) -> f64 {
    let r = libm::remainder(x - core::f64::consts::FRAC_PI_2, core::f64::consts::PI);
    abs(r)
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_angle(x: f64) -> f64 {
    let r = libm::remainder(x, 2.0 * core::f64::consts::PI);
    if r <= -core::f64::consts::PI {
        r + 2.0 * core::f64::consts::PI
    } else {
        r
    }
}
