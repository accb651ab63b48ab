//! Affine self-maps `w ↦ a·w + b` of the open right half-plane.
//!
//! All parameters are taken verbatim as binary floating point values and
//! every classification boundary (`a = 1`, `Re b = 0`, `b = 0`) is an exact
//! comparison. Users reach a boundary class by typing the exact value.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// `φ(w) = a·w + b` with `a > 0` and `Re b ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineSymbol {
    a: f64,
    b: Complex64,
}

/// The seven symbol classes. Every verdict in [`crate::verdicts`] is a
/// function of this class alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SymbolClass {
    Identity,
    ParabolicAutomorphism,
    ParabolicNonAutomorphism,
    HyperbolicAutomorphismTypeI,
    HyperbolicAutomorphismTypeII,
    HyperbolicNonAutomorphismTypeI,
    HyperbolicNonAutomorphismTypeII,
}

impl SymbolClass {
    pub const ALL: [SymbolClass; 7] = [
        SymbolClass::Identity,
        SymbolClass::ParabolicAutomorphism,
        SymbolClass::ParabolicNonAutomorphism,
        SymbolClass::HyperbolicAutomorphismTypeI,
        SymbolClass::HyperbolicAutomorphismTypeII,
        SymbolClass::HyperbolicNonAutomorphismTypeI,
        SymbolClass::HyperbolicNonAutomorphismTypeII,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SymbolClass::Identity => "Identity",
            SymbolClass::ParabolicAutomorphism => "ParabolicAutomorphism",
            SymbolClass::ParabolicNonAutomorphism => "ParabolicNonAutomorphism",
            SymbolClass::HyperbolicAutomorphismTypeI => "HyperbolicAutomorphismTypeI",
            SymbolClass::HyperbolicAutomorphismTypeII => "HyperbolicAutomorphismTypeII",
            SymbolClass::HyperbolicNonAutomorphismTypeI => "HyperbolicNonAutomorphismTypeI",
            SymbolClass::HyperbolicNonAutomorphismTypeII => "HyperbolicNonAutomorphismTypeII",
        }
    }

    pub fn is_automorphism(self) -> bool {
        matches!(
            self,
            SymbolClass::Identity
                | SymbolClass::ParabolicAutomorphism
                | SymbolClass::HyperbolicAutomorphismTypeI
                | SymbolClass::HyperbolicAutomorphismTypeII
        )
    }

    pub fn is_hyperbolic(self) -> bool {
        matches!(
            self,
            SymbolClass::HyperbolicAutomorphismTypeI
                | SymbolClass::HyperbolicAutomorphismTypeII
                | SymbolClass::HyperbolicNonAutomorphismTypeI
                | SymbolClass::HyperbolicNonAutomorphismTypeII
        )
    }

    /// `a ∈ (0, 1)`.
    pub fn is_type_one(self) -> bool {
        matches!(
            self,
            SymbolClass::HyperbolicAutomorphismTypeI | SymbolClass::HyperbolicNonAutomorphismTypeI
        )
    }

    /// `a ∈ (1, ∞)`.
    pub fn is_type_two(self) -> bool {
        matches!(
            self,
            SymbolClass::HyperbolicAutomorphismTypeII
                | SymbolClass::HyperbolicNonAutomorphismTypeII
        )
    }
}

impl fmt::Display for SymbolClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Fixed points of an affine symbol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FixedPoints {
    /// The identity fixes every point.
    Everywhere,
    /// `a ≠ 1`: the unique fixed point `b / (1 − a)`; `interior` when it lies
    /// in the open half-plane.
    Unique { point: Complex64, interior: bool },
    /// Pure translations have no fixed point.
    Absent,
}

// -0.0 and 0.0 compare equal but print differently; keep outputs canonical.
#[inline]
pub(crate) fn canon(x: f64) -> f64 {
    x + 0.0
}

#[inline]
pub(crate) fn canon_c(z: Complex64) -> Complex64 {
    Complex64::new(canon(z.re), canon(z.im))
}

impl AffineSymbol {
    pub fn new(a: f64, b: Complex64) -> Result<Self> {
        if !a.is_finite() || !(a > 0.0) {
            return Err(invalid(format!("dilation a must be finite and > 0, got {a}")));
        }
        if !b.re.is_finite() || !b.im.is_finite() {
            return Err(invalid(format!("translation b must be finite, got {b}")));
        }
        if b.re < 0.0 {
            return Err(invalid(format!("translation must satisfy Re(b) >= 0, got {}", b.re)));
        }
        Ok(Self { a, b: canon_c(b) })
    }

    pub fn from_parts(a: f64, b_re: f64, b_im: f64) -> Result<Self> {
        Self::new(a, Complex64::new(b_re, b_im))
    }

    pub fn identity() -> Self {
        Self { a: 1.0, b: Complex64::new(0.0, 0.0) }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> Complex64 {
        self.b
    }

    pub fn eval(&self, w: Complex64) -> Complex64 {
        w * self.a + self.b
    }

    pub fn classify(&self) -> SymbolClass {
        let automorphism = self.b.re == 0.0;
        if self.a == 1.0 {
            if self.b.re == 0.0 && self.b.im == 0.0 {
                SymbolClass::Identity
            } else if automorphism {
                SymbolClass::ParabolicAutomorphism
            } else {
                SymbolClass::ParabolicNonAutomorphism
            }
        } else if self.a < 1.0 {
            if automorphism {
                SymbolClass::HyperbolicAutomorphismTypeI
            } else {
                SymbolClass::HyperbolicNonAutomorphismTypeI
            }
        } else if automorphism {
            SymbolClass::HyperbolicAutomorphismTypeII
        } else {
            SymbolClass::HyperbolicNonAutomorphismTypeII
        }
    }

    /// `φ^[n]` by the closed form; never by repeated composition.
    pub fn iterate(&self, n: u32) -> Self {
        if n == 0 {
            return Self::identity();
        }
        if self.a == 1.0 {
            return Self { a: 1.0, b: canon_c(self.b * n as f64) };
        }
        let an = pow_u32(self.a, n);
        let factor = (1.0 - an) / (1.0 - self.a);
        Self { a: an, b: canon_c(self.b * factor) }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            a: self.a * other.a,
            b: canon_c(other.b * self.a + self.b),
        }
    }

    /// The inverse map, which is again a self-map of the half-plane exactly
    /// when `Re b = 0`.
    pub fn inverse(&self) -> Option<Self> {
        if self.b.re != 0.0 {
            return None;
        }
        if self.a == 1.0 {
            return Some(Self { a: 1.0, b: canon_c(-self.b) });
        }
        Some(Self {
            a: 1.0 / self.a,
            b: canon_c(-self.b / self.a),
        })
    }

    /// `C_φ* = scale · C_ψ` with `ψ(w) = (w + conj b) / a` and `scale = 1/a`.
    pub fn adjoint_symbol(&self) -> (f64, Self) {
        let psi = if self.a == 1.0 {
            Self { a: 1.0, b: canon_c(self.b.conj()) }
        } else {
            Self {
                a: 1.0 / self.a,
                b: canon_c(self.b.conj() / self.a),
            }
        };
        (1.0 / self.a, psi)
    }

    pub fn fixed_point(&self) -> FixedPoints {
        if self.a == 1.0 {
            if self.b.re == 0.0 && self.b.im == 0.0 {
                FixedPoints::Everywhere
            } else {
                FixedPoints::Absent
            }
        } else {
            let point = canon_c(self.b / (1.0 - self.a));
            FixedPoints::Unique { point, interior: point.re > 0.0 }
        }
    }

    /// Angular derivative at infinity, `lim w / φ(w) = 1/a`.
    pub fn derivative_at_infinity(&self) -> f64 {
        1.0 / self.a
    }

    /// `‖C_φ‖ = a^{-1/2}`.
    pub fn operator_norm(&self) -> f64 {
        self.derivative_at_infinity().sqrt()
    }
}

impl fmt::Display for AffineSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "w -> {}*w + ({}{:+}i)", self.a, self.b.re, self.b.im)
    }
}

/// Binary exponentiation. `powi` takes an `i32` and is allowed to be less
/// accurate; this keeps `a^(m+n) = a^m · a^n` bit-exact for dyadic `a`.
pub(crate) fn pow_u32(mut base: f64, mut exp: u32) -> f64 {
    let mut acc = 1.0;
    while exp > 0 {
        if exp & 1 == 1 {
            acc *= base;
        }
        base *= base;
        exp >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sym(a: f64, re: f64, im: f64) -> AffineSymbol {
        AffineSymbol::from_parts(a, re, im).unwrap()
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(AffineSymbol::from_parts(0.0, 1.0, 0.0).is_err());
        assert!(AffineSymbol::from_parts(-1.0, 1.0, 0.0).is_err());
        assert!(AffineSymbol::from_parts(f64::NAN, 1.0, 0.0).is_err());
        assert!(AffineSymbol::from_parts(1.0, -1e-300, 0.0).is_err());
        assert!(AffineSymbol::from_parts(1.0, 0.0, f64::INFINITY).is_err());
        assert!(AffineSymbol::from_parts(1.0, -0.0, 0.0).is_ok());
    }

    #[test]
    fn classify_examples() {
        assert_eq!(sym(1.0, 0.0, 1.0).classify(), SymbolClass::ParabolicAutomorphism);
        assert_eq!(sym(1.0, 0.0, 0.0).classify(), SymbolClass::Identity);
        assert_eq!(sym(0.5, 1.0, 0.0).classify(), SymbolClass::HyperbolicNonAutomorphismTypeI);
        assert_eq!(sym(1.0, 2.0, 0.0).classify(), SymbolClass::ParabolicNonAutomorphism);
        assert_eq!(sym(0.5, 0.0, 0.0).classify(), SymbolClass::HyperbolicAutomorphismTypeI);
        assert_eq!(sym(3.0, 0.0, -2.0).classify(), SymbolClass::HyperbolicAutomorphismTypeII);
        assert_eq!(sym(3.0, 1e-300, 0.0).classify(), SymbolClass::HyperbolicNonAutomorphismTypeII);
        // no tolerance at the boundary
        assert_eq!(
            sym(1.0 + f64::EPSILON, 0.0, 0.0).classify(),
            SymbolClass::HyperbolicAutomorphismTypeII
        );
    }

    #[test]
    fn iterate_examples() {
        assert_eq!(sym(1.0, 0.0, 1.0).iterate(3), sym(1.0, 0.0, 3.0));
        assert_eq!(sym(0.7, 2.0, -1.0).iterate(0), AffineSymbol::identity());
        let two = sym(0.5, 1.0, 0.0).iterate(2);
        assert_eq!(two, sym(0.25, 1.5, 0.0));
        // oracle: substitute twice
        let phi = sym(0.5, 1.0, 0.0);
        for w in [c(1.0, 0.0), c(0.3, -2.0), c(5.0, 7.0)] {
            assert_eq!(two.eval(w), phi.eval(phi.eval(w)));
        }
    }

    #[test]
    fn compose_examples() {
        let phi = sym(2.0, 1.0, 0.0);
        assert_eq!(phi.compose(&AffineSymbol::identity()), phi);
        assert_eq!(AffineSymbol::identity().compose(&phi), phi);
        let lhs = sym(2.0, 1.0, 0.0).compose(&sym(3.0, 0.0, 1.0));
        assert_eq!(lhs, sym(6.0, 1.0, 2.0));
        for w in [c(1.0, 0.0), c(0.25, 3.0), c(4.0, -1.5)] {
            let direct = sym(2.0, 1.0, 0.0).eval(sym(3.0, 0.0, 1.0).eval(w));
            assert!((lhs.eval(w) - direct).norm() <= 1e-15 * direct.norm());
        }
        let phi = sym(0.5, 1.0, 0.0);
        assert_eq!(phi.iterate(2).compose(&phi), phi.iterate(3));
    }

    #[test]
    fn inverse_examples() {
        let phi = sym(2.0, 0.0, 1.0);
        let inv = phi.inverse().unwrap();
        assert_eq!(inv, sym(0.5, 0.0, -0.5));
        assert_eq!(phi.compose(&inv), AffineSymbol::identity());
        assert_eq!(inv.compose(&phi), AffineSymbol::identity());
        assert_eq!(AffineSymbol::identity().inverse(), Some(AffineSymbol::identity()));
        assert_eq!(sym(1.0, 1.0, 0.0).inverse(), None);
        assert_eq!(sym(0.5, 0.25, 3.0).inverse(), None);
    }

    #[test]
    fn adjoint_symbol_examples() {
        assert_eq!(sym(1.0, 0.0, 1.0).adjoint_symbol(), (1.0, sym(1.0, 0.0, -1.0)));
        assert_eq!(AffineSymbol::identity().adjoint_symbol(), (1.0, AffineSymbol::identity()));
        assert_eq!(sym(2.0, 1.0, 1.0).adjoint_symbol(), (0.5, sym(0.5, 0.5, -0.5)));
    }

    #[test]
    fn fixed_point_examples() {
        let phi = sym(0.5, 1.0, 0.0);
        match phi.fixed_point() {
            FixedPoints::Unique { point, interior } => {
                assert_eq!(point, c(2.0, 0.0));
                assert!(interior);
                assert_eq!(phi.eval(point), point);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(sym(1.0, 1.0, 0.0).fixed_point(), FixedPoints::Absent);
        assert_eq!(AffineSymbol::identity().fixed_point(), FixedPoints::Everywhere);
        let phi = sym(2.0, 1.0, 0.0);
        match phi.fixed_point() {
            FixedPoints::Unique { point, interior } => {
                assert_eq!(point, c(-1.0, 0.0));
                assert!(!interior);
                assert_eq!(phi.eval(point), point);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn derivative_at_infinity_examples() {
        assert_eq!(sym(1.0, 0.0, 5.0).derivative_at_infinity(), 1.0);
        for (a, b, expected) in [(4.0, c(0.0, 0.0), 0.25), (0.25, c(1.0, 0.0), 4.0)] {
            let phi = AffineSymbol::new(a, b).unwrap();
            assert_eq!(phi.derivative_at_infinity(), expected);
            // oracle: w / φ(w) at a large real w
            let w = c(1e9, 0.0);
            let limit = (w / phi.eval(w)).re;
            assert!((limit - expected).abs() < 1e-5);
        }
        assert_eq!(sym(4.0, 0.0, 1.0).operator_norm(), 0.5);
    }
}
