//! Small fixed-size vectors for plane and space geometry.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use crate::scalar::Scalar;

/// A point or vector in the plane.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vec2<S> {
    pub x: S,
    pub y: S,
}

/// A point or vector in space.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vec3<S> {
    pub x: S,
    pub y: S,
    pub z: S,
}

impl<S: Scalar> Vec2<S> {
    pub fn new(x: S, y: S) -> Self {
        Self { x, y }
    }

    pub fn zero() -> Self {
        Self { x: S::zero(), y: S::zero() }
    }

    pub fn dot(self, other: Self) -> S {
        self.x * other.x + self.y * other.y
    }

    /// 2D cross product `self.x * other.y - self.y * other.x`.
    pub fn cross(self, other: Self) -> S {
        self.x * other.y - self.y * other.x
    }

    /// Rotation by +90 degrees: `(x, y) -> (-y, x)`.
    pub fn perp(self) -> Self {
        Self { x: -self.y, y: self.x }
    }

    pub fn norm_sq(self) -> S {
        self.dot(self)
    }

    pub fn norm(self) -> S {
        self.norm_sq().sqrt()
    }

    pub fn component(self, axis: usize) -> S {
        match axis {
            0 => self.x,
            1 => self.y,
            _ => panic!("Vec2 axis out of range: {axis}"),
        }
    }
}

impl<S: Scalar> Vec3<S> {
    pub fn new(x: S, y: S, z: S) -> Self {
        Self { x, y, z }
    }

    pub fn zero() -> Self {
        Self { x: S::zero(), y: S::zero(), z: S::zero() }
    }

    pub fn dot(self, other: Self) -> S {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(self, other: Self) -> Self {
        Self {
            x: self.y * other.z - self.z * other.y,
            y: self.z * other.x - self.x * other.z,
            z: self.x * other.y - self.y * other.x,
        }
    }

    pub fn norm_sq(self) -> S {
        self.dot(self)
    }

    pub fn norm(self) -> S {
        self.norm_sq().sqrt()
    }

    pub fn component(self, axis: usize) -> S {
        match axis {
            0 => self.x,
            1 => self.y,
            2 => self.z,
            _ => panic!("Vec3 axis out of range: {axis}"),
        }
    }
}

macro_rules! impl_vec_ops {
    ($t:ident { $($f:ident),+ }) => {
        impl<S: Scalar> Add for $t<S> {
            type Output = Self;
            fn add(self, rhs: Self) -> Self {
                Self { $($f: self.$f + rhs.$f),+ }
            }
        }
        impl<S: Scalar> Sub for $t<S> {
            type Output = Self;
            fn sub(self, rhs: Self) -> Self {
                Self { $($f: self.$f - rhs.$f),+ }
            }
        }
        impl<S: Scalar> Neg for $t<S> {
            type Output = Self;
            fn neg(self) -> Self {
                Self { $($f: -self.$f),+ }
            }
        }
        impl<S: Scalar> Mul<S> for $t<S> {
            type Output = Self;
            fn mul(self, s: S) -> Self {
                Self { $($f: self.$f * s),+ }
            }
        }
        impl<S: Scalar> Div<S> for $t<S> {
            type Output = Self;
            fn div(self, s: S) -> Self {
                Self { $($f: self.$f / s),+ }
            }
        }
        impl<S: Scalar> AddAssign for $t<S> {
            fn add_assign(&mut self, rhs: Self) {
                $(self.$f += rhs.$f;)+
            }
        }
        impl<S: Scalar> SubAssign for $t<S> {
            fn sub_assign(&mut self, rhs: Self) {
                $(self.$f -= rhs.$f;)+
            }
        }
    };
}

impl_vec_ops!(Vec2 { x, y });
impl_vec_ops!(Vec3 { x, y, z });

/// Value type that can live in a nodal or per-element field: a scalar or a
/// small vector. Gives field operations (lumped products, arc derivatives)
/// one generic implementation.
pub trait FieldValue<S: Scalar>: Copy + Add<Output = Self> + Sub<Output = Self> {
    fn dot(self, other: Self) -> S;
    fn scale(self, s: S) -> Self;
    fn zero() -> Self;
}

impl<S: Scalar> FieldValue<S> for S {
    fn dot(self, other: Self) -> S {
        self * other
    }
    fn scale(self, s: S) -> Self {
        self * s
    }
    fn zero() -> Self {
        S::zero()
    }
}

impl<S: Scalar> FieldValue<S> for Vec2<S> {
    fn dot(self, other: Self) -> S {
        Vec2::dot(self, other)
    }
    fn scale(self, s: S) -> Self {
        self * s
    }
    fn zero() -> Self {
        Vec2::zero()
    }
}

impl<S: Scalar> FieldValue<S> for Vec3<S> {
    fn dot(self, other: Self) -> S {
        Vec3::dot(self, other)
    }
    fn scale(self, s: S) -> Self {
        self * s
    }
    fn zero() -> Self {
        Vec3::zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perp_rotates_by_quarter_turn() {
        let v = Vec2::new(3.0_f64, -2.0);
        let p = v.perp();
        assert_eq!(p, Vec2::new(2.0, 3.0));
        assert_eq!(v.dot(p), 0.0);
        assert_eq!(v.cross(p), v.norm_sq());
    }

    #[test]
    fn cross_is_right_handed() {
        let x = Vec3::new(1.0_f64, 0.0, 0.0);
        let y = Vec3::new(0.0, 1.0, 0.0);
        assert_eq!(x.cross(y), Vec3::new(0.0, 0.0, 1.0));
    }
}
