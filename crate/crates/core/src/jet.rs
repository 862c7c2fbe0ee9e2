use std::array::from_fn;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::{GeomError, Result};

/// Number of chart coordinates. Everything in this crate is four-dimensional.
pub const DIM: usize = 4;

/// Scalar value carrying its gradient and Hessian with respect to the four
/// chart coordinates. The AD currency of the crate: metric, frame, and
/// embedding components are evaluated as `Jet2`s, and the connection and
/// curvature are assembled from the derivative data they carry.
///
/// The Hessian is symmetric by construction: every operation fills
/// `hess[i][j]` and `hess[j][i]` from the same expression.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet2 {
    pub value: f64,
    pub grad: [f64; DIM],
    pub hess: [[f64; DIM]; DIM],
}

impl Jet2 {
    pub const ZERO: Jet2 = Jet2 {
        value: 0.0,
        grad: [0.0; DIM],
        hess: [[0.0; DIM]; DIM],
    };

    #[inline]
    pub fn constant(value: f64) -> Jet2 {
        Jet2 {
            value,
            grad: [0.0; DIM],
            hess: [[0.0; DIM]; DIM],
        }
    }

    /// The k-th coordinate variable at `value`: unit gradient, zero Hessian.
    #[inline]
    pub fn variable(value: f64, k: usize) -> Jet2 {
        let mut grad = [0.0; DIM];
        grad[k] = 1.0;
        Jet2 {
            value,
            grad,
            hess: [[0.0; DIM]; DIM],
        }
    }

    /// All four coordinate variables at the point `coords`.
    #[inline]
    pub fn seed(coords: [f64; DIM]) -> [Jet2; DIM] {
        from_fn(|k| Jet2::variable(coords[k], k))
    }

    /// Univariate chain rule: composes `self` with a function whose value and
    /// first two derivatives at `self.value` are `(f, fp, fpp)`.
    #[inline]
    pub fn chain(self, f: f64, fp: f64, fpp: f64) -> Jet2 {
        Jet2 {
            value: f,
            grad: from_fn(|i| fp * self.grad[i]),
            hess: from_fn(|i| {
                from_fn(|j| fp * self.hess[i][j] + fpp * self.grad[i] * self.grad[j])
            }),
        }
    }

    #[inline]
    pub fn sin(self) -> Jet2 {
        let (s, c) = self.value.sin_cos();
        self.chain(s, c, -s)
    }

    #[inline]
    pub fn cos(self) -> Jet2 {
        let (s, c) = self.value.sin_cos();
        self.chain(c, -s, -c)
    }

    #[inline]
    pub fn sinh(self) -> Jet2 {
        let (s, c) = (self.value.sinh(), self.value.cosh());
        self.chain(s, c, s)
    }

    #[inline]
    pub fn cosh(self) -> Jet2 {
        let (s, c) = (self.value.sinh(), self.value.cosh());
        self.chain(c, s, c)
    }

    #[inline]
    pub fn exp(self) -> Jet2 {
        let e = self.value.exp();
        self.chain(e, e, e)
    }

    #[inline]
    pub fn tanh(self) -> Jet2 {
        let t = self.value.tanh();
        let sech2 = 1.0 - t * t;
        self.chain(t, sech2, -2.0 * t * sech2)
    }

    /// cosh/sinh with a domain guard; the pole at 0 surfaces as an error
    /// rather than an infinity.
    pub fn coth(self) -> Result<Jet2> {
        if self.value == 0.0 {
            return Err(GeomError::DomainError {
                func: "coth",
                requirement: "a nonzero argument",
                value: self.value,
            });
        }
        self.cosh().checked_div(self.sinh())
    }

    pub fn sqrt(self) -> Result<Jet2> {
        if self.value <= 0.0 {
            return Err(GeomError::DomainError {
                func: "sqrt",
                requirement: "a positive argument",
                value: self.value,
            });
        }
        let r = self.value.sqrt();
        Ok(self.chain(r, 0.5 / r, -0.25 / (r * self.value)))
    }

    /// Division that reports a zero denominator instead of producing IEEE
    /// infinities; the expression evaluator routes through this.
    #[inline]
    pub fn checked_div(self, rhs: Jet2) -> Result<Jet2> {
        if rhs.value == 0.0 {
            return Err(GeomError::DivisionByZero);
        }
        Ok(self / rhs)
    }

    /// 1/self via the chain rule. Raw IEEE at a zero value.
    #[inline]
    pub fn recip(self) -> Jet2 {
        let v = self.value;
        self.chain(1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v))
    }

    /// Integer power by repeated multiplication; negative exponents go
    /// through `recip`.
    pub fn powi(self, n: i32) -> Jet2 {
        if n < 0 {
            return self.powi(-n).recip();
        }
        let mut acc = Jet2::constant(1.0);
        for _ in 0..n {
            acc = acc * self;
        }
        acc
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    #[inline]
    fn add(self, rhs: Jet2) -> Jet2 {
        Jet2 {
            value: self.value + rhs.value,
            grad: from_fn(|i| self.grad[i] + rhs.grad[i]),
            hess: from_fn(|i| from_fn(|j| self.hess[i][j] + rhs.hess[i][j])),
        }
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    #[inline]
    fn sub(self, rhs: Jet2) -> Jet2 {
        Jet2 {
            value: self.value - rhs.value,
            grad: from_fn(|i| self.grad[i] - rhs.grad[i]),
            hess: from_fn(|i| from_fn(|j| self.hess[i][j] - rhs.hess[i][j])),
        }
    }
}

// Product and quotient rules mix operators by construction.
#[allow(clippy::suspicious_arithmetic_impl)]
impl Mul for Jet2 {
    type Output = Jet2;
    #[inline]
    fn mul(self, rhs: Jet2) -> Jet2 {
        Jet2 {
            value: self.value * rhs.value,
            grad: from_fn(|i| self.grad[i] * rhs.value + self.value * rhs.grad[i]),
            hess: from_fn(|i| {
                from_fn(|j| {
                    self.hess[i][j] * rhs.value
                        + self.grad[i] * rhs.grad[j]
                        + self.grad[j] * rhs.grad[i]
                        + self.value * rhs.hess[i][j]
                })
            }),
        }
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl Div for Jet2 {
    type Output = Jet2;
    #[inline]
    fn div(self, rhs: Jet2) -> Jet2 {
        self * rhs.recip()
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    #[inline]
    fn neg(self) -> Jet2 {
        Jet2 {
            value: -self.value,
            grad: from_fn(|i| -self.grad[i]),
            hess: from_fn(|i| from_fn(|j| -self.hess[i][j])),
        }
    }
}

impl Add<f64> for Jet2 {
    type Output = Jet2;
    #[inline]
    fn add(self, rhs: f64) -> Jet2 {
        let mut out = self;
        out.value += rhs;
        out
    }
}

impl Sub<f64> for Jet2 {
    type Output = Jet2;
    #[inline]
    fn sub(self, rhs: f64) -> Jet2 {
        let mut out = self;
        out.value -= rhs;
        out
    }
}

impl Mul<f64> for Jet2 {
    type Output = Jet2;
    #[inline]
    fn mul(self, rhs: f64) -> Jet2 {
        Jet2 {
            value: self.value * rhs,
            grad: from_fn(|i| self.grad[i] * rhs),
            hess: from_fn(|i| from_fn(|j| self.hess[i][j] * rhs)),
        }
    }
}

impl Mul<Jet2> for f64 {
    type Output = Jet2;
    #[inline]
    fn mul(self, rhs: Jet2) -> Jet2 {
        rhs * self
    }
}
