//! Periodic Jacobi matrices `[Ju]_n = a_{n-1} u_{n-1} + b_n u_n + a_n u_{n+1}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// A `p`-periodic Jacobi matrix given by one period of its coefficients.
///
/// The period is listed as `(a_1, ..., a_p)` and `(b_1, ..., b_p)`; the
/// coefficient with integer index `n` is `a[(n - 1) mod p]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct PeriodicJacobi<T> {
    a: Vec<T>,
    b: Vec<T>,
}

impl<T: Real> PeriodicJacobi<T> {
    pub fn new(a: Vec<T>, b: Vec<T>) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::Domain("period must be at least 1".into()));
        }
        if a.len() != b.len() {
            return Err(Error::Domain(format!(
                "off-diagonal has {} entries but diagonal has {}",
                a.len(),
                b.len()
            )));
        }
        if let Some((i, x)) = a
            .iter()
            .enumerate()
            .find(|(_, x)| !(x.is_finite() && **x > T::zero()))
        {
            return Err(Error::Domain(format!(
                "off-diagonal entry a_{} = {} is not a positive finite number",
                i + 1,
                x
            )));
        }
        if let Some((i, x)) = b.iter().enumerate().find(|(_, x)| !x.is_finite()) {
            return Err(Error::Domain(format!(
                "diagonal entry b_{} = {} is not finite",
                i + 1,
                x
            )));
        }
        Ok(Self { a, b })
    }

    /// Off-diagonal Jacobi matrix `J_a = J_{a,0}`.
    pub fn off_diagonal(a: Vec<T>) -> Result<Self> {
        let b = vec![T::zero(); a.len()];
        Self::new(a, b)
    }

    /// Constant off-diagonal `a_0` with zero diagonal, viewed with period `p`.
    pub fn constant(a0: T, p: usize) -> Result<Self> {
        Self::off_diagonal(vec![a0; p])
    }

    pub fn period(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self) -> &[T] {
        &self.a
    }

    pub fn b(&self) -> &[T] {
        &self.b
    }

    /// `a_n` for any integer `n`.
    #[inline]
    pub fn a_at(&self, n: i64) -> T {
        self.a[wrap(n, self.a.len())]
    }

    /// `b_n` for any integer `n`.
    #[inline]
    pub fn b_at(&self, n: i64) -> T {
        self.b[wrap(n, self.b.len())]
    }

    pub fn is_off_diagonal(&self) -> bool {
        self.b.iter().all(|x| *x == T::zero())
    }

    /// `<J> = max(|a|_inf, |1/a|_inf, |b|_inf)`.
    pub fn norm(&self) -> T {
        let mut m = T::zero();
        for &x in &self.a {
            m = m.max(x).max(x.recip());
        }
        for &x in &self.b {
            m = m.max(x.abs());
        }
        m
    }

    pub fn sup_a(&self) -> T {
        self.a.iter().fold(T::zero(), |m, &x| m.max(x))
    }

    pub fn is_constant_a(&self) -> bool {
        self.a.iter().all(|&x| x == self.a[0])
    }

    /// The same operator viewed as `N p`-periodic.
    pub fn repeated(&self, n: usize) -> Self {
        assert!(n >= 1, "repetition count must be positive");
        Self {
            a: self.a.repeat(n),
            b: self.b.repeat(n),
        }
    }

    /// Sup-distance of the coefficient sequences, compared over the least
    /// common multiple of the two periods.
    pub fn sup_distance(&self, other: &Self) -> T {
        let l = lcm(self.period(), other.period());
        (1..=l as i64)
            .map(|n| {
                (self.a_at(n) - other.a_at(n))
                    .abs()
                    .max((self.b_at(n) - other.b_at(n)).abs())
            })
            .fold(T::zero(), T::max)
    }

    /// `J_{lambda a, lambda b} = lambda J`.
    pub fn scaled(&self, lambda: T) -> Result<Self> {
        if !(lambda > T::zero()) {
            return Err(Error::Domain(format!(
                "scale factor must be positive, got {lambda}"
            )));
        }
        Self::new(
            self.a.iter().map(|&x| x * lambda).collect(),
            self.b.iter().map(|&x| x * lambda).collect(),
        )
    }

    /// `J_{a, b + t}`.
    pub fn shifted(&self, t: T) -> Self {
        Self {
            a: self.a.clone(),
            b: self.b.iter().map(|&x| x + t).collect(),
        }
    }
}

#[inline]
pub(crate) fn wrap(n: i64, p: usize) -> usize {
    (n - 1).rem_euclid(p as i64) as usize
}

pub(crate) fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(crate) fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}
