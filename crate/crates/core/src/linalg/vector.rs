use std::ops::{Add, Deref, DerefMut, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::Scalar;

/// Dense real vector; the state space of every solver in the crate.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point<T>(Vec<T>);

impl<T: Scalar> Point<T> {
    pub fn zeros(dim: usize) -> Self {
        Point(vec![T::zero(); dim])
    }

    /// Unit coordinate vector `e_i`.
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut p = Self::zeros(dim);
        p.0[i] = T::one();
        p
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize) -> T) -> Self {
        Point((0..dim).map(f).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn dot(&self, other: &Self) -> T {
        debug_assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).map(|(&a, &b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> T {
        self.dot(self)
    }

    /// Euclidean norm, computed with scaling so tiny and huge entries do not under/overflow.
    pub fn norm(&self) -> T {
        let scale = self.max_abs();
        if scale == T::zero() || !scale.is_finite() {
            return scale;
        }
        let s: T = self.0.iter().map(|&a| (a / scale) * (a / scale)).sum();
        scale * s.sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.0.iter().fold(T::zero(), |m, &a| m.max(a.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|a| a.is_finite())
    }

    pub fn dist(&self, other: &Self) -> T {
        (self - other).norm()
    }

    /// `self += alpha * x`
    pub fn axpy(&mut self, alpha: T, x: &Self) {
        debug_assert_eq!(self.dim(), x.dim());
        for (a, &b) in self.0.iter_mut().zip(&x.0) {
            *a += alpha * b;
        }
    }

    pub fn scaled(&self, alpha: T) -> Self {
        Point(self.0.iter().map(|&a| alpha * a).collect())
    }

    pub fn map(&self, f: impl FnMut(T) -> T) -> Self {
        Point(self.0.iter().copied().map(f).collect())
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<T> {
        self.0
    }
}

impl<T> From<Vec<T>> for Point<T> {
    fn from(v: Vec<T>) -> Self {
        Point(v)
    }
}

impl<T: Copy> From<&[T]> for Point<T> {
    fn from(v: &[T]) -> Self {
        Point(v.to_vec())
    }
}

impl<T> Deref for Point<T> {
    type Target = [T];
    fn deref(&self) -> &[T] {
        &self.0
    }
}

impl<T> DerefMut for Point<T> {
    fn deref_mut(&mut self) -> &mut [T] {
        &mut self.0
    }
}

impl<T: Scalar> Add for &Point<T> {
    type Output = Point<T>;
    fn add(self, rhs: Self) -> Point<T> {
        debug_assert_eq!(self.dim(), rhs.dim());
        Point(self.0.iter().zip(&rhs.0).map(|(&a, &b)| a + b).collect())
    }
}

impl<T: Scalar> Sub for &Point<T> {
    type Output = Point<T>;
    fn sub(self, rhs: Self) -> Point<T> {
        debug_assert_eq!(self.dim(), rhs.dim());
        Point(self.0.iter().zip(&rhs.0).map(|(&a, &b)| a - b).collect())
    }
}

impl<T: Scalar> Neg for &Point<T> {
    type Output = Point<T>;
    fn neg(self) -> Point<T> {
        self.map(|a| -a)
    }
}

impl<T: Scalar> Mul<T> for &Point<T> {
    type Output = Point<T>;
    fn mul(self, rhs: T) -> Point<T> {
        self.scaled(rhs)
    }
}
