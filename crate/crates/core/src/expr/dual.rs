//! Forward-mode dual numbers, nestable for second derivatives.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Arithmetic needed to evaluate a boundary expression.
pub trait Scalar:
    Clone + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self> + Neg<Output = Self>
{
    fn cst(c: f64) -> Self;
    /// Innermost real part.
    fn real(&self) -> f64;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn tan(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn sqrt(&self) -> Self;
    /// `self^c` for a constant exponent.
    fn powc(&self, c: f64) -> Self;
}

impl Scalar for f64 {
    fn cst(c: f64) -> Self {
        c
    }
    fn real(&self) -> f64 {
        *self
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn tan(&self) -> Self {
        f64::tan(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn powc(&self, c: f64) -> Self {
        if c.fract() == 0.0 && c.abs() < i32::MAX as f64 {
            self.powi(c as i32)
        } else {
            self.powf(c)
        }
    }
}

/// `re + eps * du` with `du^2 = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual<T> {
    pub re: T,
    pub du: T,
}

impl<T: Scalar> Dual<T> {
    pub fn new(re: T, du: T) -> Self {
        Self { re, du }
    }

    fn chain(&self, value: T, slope: T) -> Self {
        Self {
            re: value,
            du: slope * self.du.clone(),
        }
    }
}

impl<T: Scalar> Add for Dual<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.re + o.re, self.du + o.du)
    }
}

impl<T: Scalar> Sub for Dual<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.re - o.re, self.du - o.du)
    }
}

impl<T: Scalar> Mul for Dual<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let du = self.re.clone() * o.du + self.du * o.re.clone();
        Self::new(self.re * o.re, du)
    }
}

impl<T: Scalar> Div for Dual<T> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let q = self.re / o.re.clone();
        let du = (self.du - q.clone() * o.du) / o.re;
        Self::new(q, du)
    }
}

impl<T: Scalar> Neg for Dual<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.re, -self.du)
    }
}

impl<T: Scalar> Scalar for Dual<T> {
    fn cst(c: f64) -> Self {
        Self::new(T::cst(c), T::cst(0.0))
    }
    fn real(&self) -> f64 {
        self.re.real()
    }
    fn sin(&self) -> Self {
        self.chain(self.re.sin(), self.re.cos())
    }
    fn cos(&self) -> Self {
        self.chain(self.re.cos(), -self.re.sin())
    }
    fn tan(&self) -> Self {
        let t = self.re.tan();
        self.chain(t.clone(), T::cst(1.0) + t.clone() * t)
    }
    fn exp(&self) -> Self {
        let e = self.re.exp();
        self.chain(e.clone(), e)
    }
    fn ln(&self) -> Self {
        self.chain(self.re.ln(), T::cst(1.0) / self.re.clone())
    }
    fn sqrt(&self) -> Self {
        let s = self.re.sqrt();
        self.chain(s.clone(), T::cst(0.5) / s)
    }
    fn powc(&self, c: f64) -> Self {
        let slope = T::cst(c) * self.re.powc(c - 1.0);
        self.chain(self.re.powc(c), slope)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_derivatives() {
        let x = Dual::new(0.7, 1.0);
        assert!(((x * x).du - 1.4).abs() < 1e-15);
        assert!((x.sin().du - 0.7f64.cos()).abs() < 1e-15);
        assert!((x.ln().du - 1.0 / 0.7).abs() < 1e-15);
        assert!(((Dual::cst(1.0) / x).du + 1.0 / 0.49).abs() < 1e-14);
        assert!((x.powc(3.0).du - 3.0 * 0.49).abs() < 1e-14);
    }

    #[test]
    fn nested_second_derivative() {
        // d^2/dx^2 sin(x) x^2 at x = 0.3
        let x = Dual::new(Dual::new(0.3, 1.0), Dual::new(1.0, 0.0));
        let f = x.sin() * x * x;
        let v = 0.3f64;
        let want = -v.sin() * v * v + 4.0 * v * v.cos() + 2.0 * v.sin();
        assert!((f.du.du - want).abs() < 1e-14);
    }
}
