//! Truncated Taylor (jet) arithmetic up to third order.
//!
//! Chart metrics and structure 1-forms of the catalogue models are closed-form
//! rational/algebraic expressions. Evaluating them on `Jet` values instead of
//! `f64` propagates exact partial derivatives up to order three through the
//! same source expression, which is how the models provide their exact
//! derivative callbacks without hand-differentiated formulas.
//!
//! Storage is dense and unsymmetrized: `d2[i*dim + j]` holds ∂ᵢ∂ⱼ and
//! `d3[(i*dim + j)*dim + k]` holds ∂ᵢ∂ⱼ∂ₖ. Symmetry is maintained by the
//! arithmetic itself.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub dim: usize,
    pub v: f64,
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
    pub d3: Vec<f64>,
}

impl Jet {
    pub fn constant(dim: usize, v: f64) -> Self {
        Jet {
            dim,
            v,
            d1: vec![0.0; dim],
            d2: vec![0.0; dim * dim],
            d3: vec![0.0; dim * dim * dim],
        }
    }

    /// The coordinate function `x_i` seeded at value `v`.
    pub fn var(dim: usize, i: usize, v: f64) -> Self {
        let mut j = Jet::constant(dim, v);
        j.d1[i] = 1.0;
        j
    }

    pub fn d2_at(&self, i: usize, j: usize) -> f64 {
        self.d2[i * self.dim + j]
    }

    pub fn d3_at(&self, i: usize, j: usize, k: usize) -> f64 {
        self.d3[(i * self.dim + j) * self.dim + k]
    }

    pub fn scale(&self, c: f64) -> Self {
        Jet {
            dim: self.dim,
            v: self.v * c,
            d1: self.d1.iter().map(|x| x * c).collect(),
            d2: self.d2.iter().map(|x| x * c).collect(),
            d3: self.d3.iter().map(|x| x * c).collect(),
        }
    }

    pub fn recip(&self) -> Self {
        let d = self.dim;
        let r = 1.0 / self.v;
        let r2 = r * r;
        let r3 = r2 * r;
        let r4 = r3 * r;
        let mut out = Jet::constant(d, r);
        for i in 0..d {
            out.d1[i] = -self.d1[i] * r2;
        }
        for i in 0..d {
            for j in 0..d {
                out.d2[i * d + j] =
                    -self.d2_at(i, j) * r2 + 2.0 * self.d1[i] * self.d1[j] * r3;
            }
        }
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    out.d3[(i * d + j) * d + k] = -self.d3_at(i, j, k) * r2
                        + 2.0
                            * (self.d2_at(i, j) * self.d1[k]
                                + self.d2_at(i, k) * self.d1[j]
                                + self.d2_at(j, k) * self.d1[i])
                            * r3
                        - 6.0 * self.d1[i] * self.d1[j] * self.d1[k] * r4;
                }
            }
        }
        out
    }

    pub fn sqrt(&self) -> Self {
        let d = self.dim;
        let s = self.v.sqrt();
        let inv2s = 0.5 / s;
        let mut out = Jet::constant(d, s);
        for i in 0..d {
            out.d1[i] = self.d1[i] * inv2s;
        }
        for i in 0..d {
            for j in 0..d {
                out.d2[i * d + j] = (self.d2_at(i, j) - 2.0 * out.d1[i] * out.d1[j]) * inv2s;
            }
        }
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    out.d3[(i * d + j) * d + k] = (self.d3_at(i, j, k)
                        - 2.0
                            * (out.d2[i * d + k] * out.d1[j]
                                + out.d1[i] * out.d2[j * d + k]
                                + out.d1[k] * out.d2[i * d + j]))
                        * inv2s;
                }
            }
        }
        out
    }

    pub fn exp(&self) -> Self {
        let d = self.dim;
        let e = self.v.exp();
        let mut out = Jet::constant(d, e);
        for i in 0..d {
            out.d1[i] = self.d1[i] * e;
        }
        for i in 0..d {
            for j in 0..d {
                out.d2[i * d + j] = (self.d2_at(i, j) + self.d1[i] * self.d1[j]) * e;
            }
        }
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    out.d3[(i * d + j) * d + k] = (self.d3_at(i, j, k)
                        + self.d2_at(i, k) * self.d1[j]
                        + self.d1[i] * self.d2_at(j, k)
                        + self.d2_at(i, j) * self.d1[k]
                        + self.d1[i] * self.d1[j] * self.d1[k])
                        * e;
                }
            }
        }
        out
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        debug_assert_eq!(self.dim, rhs.dim);
        Jet {
            dim: self.dim,
            v: self.v + rhs.v,
            d1: zip(&self.d1, &rhs.d1, |a, b| a + b),
            d2: zip(&self.d2, &rhs.d2, |a, b| a + b),
            d3: zip(&self.d3, &rhs.d3, |a, b| a + b),
        }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        debug_assert_eq!(self.dim, rhs.dim);
        Jet {
            dim: self.dim,
            v: self.v - rhs.v,
            d1: zip(&self.d1, &rhs.d1, |a, b| a - b),
            d2: zip(&self.d2, &rhs.d2, |a, b| a - b),
            d3: zip(&self.d3, &rhs.d3, |a, b| a - b),
        }
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        debug_assert_eq!(self.dim, rhs.dim);
        let d = self.dim;
        let (a, b) = (&self, &rhs);
        let mut out = Jet::constant(d, a.v * b.v);
        for i in 0..d {
            out.d1[i] = a.d1[i] * b.v + a.v * b.d1[i];
        }
        for i in 0..d {
            for j in 0..d {
                out.d2[i * d + j] = a.d2_at(i, j) * b.v
                    + a.d1[i] * b.d1[j]
                    + a.d1[j] * b.d1[i]
                    + a.v * b.d2_at(i, j);
            }
        }
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    out.d3[(i * d + j) * d + k] = a.d3_at(i, j, k) * b.v
                        + a.d2_at(i, j) * b.d1[k]
                        + a.d2_at(i, k) * b.d1[j]
                        + a.d2_at(j, k) * b.d1[i]
                        + a.d1[i] * b.d2_at(j, k)
                        + a.d1[j] * b.d2_at(i, k)
                        + a.d1[k] * b.d2_at(i, j)
                        + a.v * b.d3_at(i, j, k);
                }
            }
        }
        out
    }
}

impl Div for Jet {
    type Output = Jet;
    #[allow(clippy::suspicious_arithmetic_impl)] // division via reciprocal jet
    fn div(self, rhs: Jet) -> Jet {
        let r = rhs.recip();
        self * r
    }
}

fn zip(a: &[f64], b: &[f64], f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    a.iter().zip(b.iter()).map(|(x, y)| f(*x, *y)).collect()
}

/// Arithmetic abstraction letting the model component functions be written
/// once and evaluated either on plain `f64` (fast path) or on `Jet`
/// (exact-derivative path).
pub trait Scalar:
    Clone
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// A constant with the same jet shape as `self`.
    fn lift(&self, c: f64) -> Self;
    fn scale_s(&self, c: f64) -> Self;
    fn sqrt_s(&self) -> Self;
    fn exp_s(&self) -> Self;
}

impl Scalar for f64 {
    fn lift(&self, c: f64) -> Self {
        c
    }
    fn scale_s(&self, c: f64) -> Self {
        self * c
    }
    fn sqrt_s(&self) -> Self {
        (*self).sqrt()
    }
    fn exp_s(&self) -> Self {
        (*self).exp()
    }
}

impl Scalar for Jet {
    fn lift(&self, c: f64) -> Self {
        Jet::constant(self.dim, c)
    }
    fn scale_s(&self, c: f64) -> Self {
        self.scale(c)
    }
    fn sqrt_s(&self) -> Self {
        self.sqrt()
    }
    fn exp_s(&self) -> Self {
        self.exp()
    }
}

/// Seed jet variables at a chart point.
pub fn jet_vars(point: &[f64]) -> Vec<Jet> {
    let d = point.len();
    point
        .iter()
        .enumerate()
        .map(|(i, &v)| Jet::var(d, i, v))
        .collect()
}
