//! Verdict table for `C_φ` on `H²(C₊)`.
//!
//! Every verdict is decided by [`SymbolClass`] alone; the numerical routines
//! in [`crate::kernel`], [`crate::witness`] and [`crate::laguerre`] only
//! corroborate. Provenance tags name the result each verdict rests on.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::kernel::{apply, apply_adjoint, two_term_distance, KernelElement};
use crate::symbol::{AffineSymbol, SymbolClass};

/// Expansivity threshold in the definitions of (positive) expansivity.
pub const EXPANSIVITY_THRESHOLD: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictValue {
    Yes,
    No,
    /// Two-sided notions are only defined for invertible operators.
    NotApplicable,
}

impl fmt::Display for VerdictValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VerdictValue::Yes => "yes",
            VerdictValue::No => "no",
            VerdictValue::NotApplicable => "not_applicable",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub value: VerdictValue,
    pub provenance: String,
    pub note: String,
}

impl Verdict {
    fn new(value: VerdictValue, provenance: &str, note: &str) -> Self {
        Self { value, provenance: provenance.to_owned(), note: note.to_owned() }
    }

    fn yes(provenance: &str, note: &str) -> Self {
        Self::new(VerdictValue::Yes, provenance, note)
    }

    fn no(provenance: &str, note: &str) -> Self {
        Self::new(VerdictValue::No, provenance, note)
    }

    fn not_applicable() -> Self {
        Self::new(
            VerdictValue::NotApplicable,
            "Def 2.1",
            "defined only for invertible operators; C_phi is invertible iff Re(b) = 0",
        )
    }
}

/// Shape of `σ(C_φ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant")]
pub enum SpectrumDescriptor {
    /// `{1}`.
    Singleton1,
    /// The unit circle.
    UnitCircle,
    /// `{e^{−bt} : t ≥ 0} ∪ {0}`.
    DecayingSpiralWithZero { b_re: f64, b_im: f64 },
    /// `{|λ| = radius}`.
    Circle { radius: f64 },
    /// `{|λ| ≤ radius}`.
    ClosedDisc { radius: f64 },
    /// No closed form is available (`φ(w) = aw`, `a ≠ 1`).
    TruncationOnly,
}

impl SpectrumDescriptor {
    pub fn name(&self) -> &'static str {
        match self {
            SpectrumDescriptor::Singleton1 => "Singleton1",
            SpectrumDescriptor::UnitCircle => "UnitCircle",
            SpectrumDescriptor::DecayingSpiralWithZero { .. } => "DecayingSpiralWithZero",
            SpectrumDescriptor::Circle { .. } => "Circle",
            SpectrumDescriptor::ClosedDisc { .. } => "ClosedDisc",
            SpectrumDescriptor::TruncationOnly => "TruncationOnly",
        }
    }

    pub fn radius(&self) -> Option<f64> {
        match self {
            SpectrumDescriptor::Circle { radius } | SpectrumDescriptor::ClosedDisc { radius } => {
                Some(*radius)
            }
            _ => None,
        }
    }
}

impl fmt::Display for SpectrumDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpectrumDescriptor::DecayingSpiralWithZero { b_re, b_im } => {
                write!(f, "DecayingSpiralWithZero(b={b_re:.16e}{b_im:+.16e}i)")
            }
            SpectrumDescriptor::Circle { radius } => write!(f, "Circle(radius={radius:.16e})"),
            SpectrumDescriptor::ClosedDisc { radius } => {
                write!(f, "ClosedDisc(radius={radius:.16e})")
            }
            other => f.write_str(other.name()),
        }
    }
}

/// The complete dynamical profile of `C_φ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicsReport {
    pub class: SymbolClass,
    pub operator_norm: f64,
    pub invertible: bool,
    pub normal: bool,
    pub self_adjoint: bool,
    pub unitary: bool,
    pub positively_expansive: Verdict,
    pub uniformly_positively_expansive: Verdict,
    pub expansive: Verdict,
    pub uniformly_expansive: Verdict,
    pub positive_shadowing: Verdict,
    pub li_yorke: Verdict,
    pub spectrum: SpectrumDescriptor,
}

pub fn spectrum_descriptor(phi: &AffineSymbol) -> SpectrumDescriptor {
    let radius = phi.operator_norm();
    let b = phi.b();
    match phi.classify() {
        SymbolClass::Identity => SpectrumDescriptor::Singleton1,
        SymbolClass::ParabolicAutomorphism => SpectrumDescriptor::UnitCircle,
        SymbolClass::ParabolicNonAutomorphism => {
            SpectrumDescriptor::DecayingSpiralWithZero { b_re: b.re, b_im: b.im }
        }
        SymbolClass::HyperbolicAutomorphismTypeI | SymbolClass::HyperbolicAutomorphismTypeII => {
            if b.im == 0.0 {
                SpectrumDescriptor::TruncationOnly
            } else {
                SpectrumDescriptor::Circle { radius }
            }
        }
        SymbolClass::HyperbolicNonAutomorphismTypeI
        | SymbolClass::HyperbolicNonAutomorphismTypeII => SpectrumDescriptor::ClosedDisc { radius },
    }
}

fn li_yorke_verdict(class: SymbolClass) -> Verdict {
    let note = match class {
        SymbolClass::HyperbolicNonAutomorphismTypeII => {
            "norm a^(-1/2) < 1: every orbit tends to zero, no semi-irregular vector"
        }
        SymbolClass::HyperbolicNonAutomorphismTypeI => {
            "every nonzero orbit eventually exceeds norm 2, so liminf >= 2"
        }
        _ => "C_phi is normal, and normal operators are never Li-Yorke chaotic",
    };
    Verdict::no("Thm 5.1", note)
}

/// Decides every verdict from the symbol class.
pub fn report(phi: &AffineSymbol) -> DynamicsReport {
    use SymbolClass::*;
    let class = phi.classify();
    let b = phi.b();
    let invertible = b.re == 0.0;
    let normal = phi.a() == 1.0 || b.re == 0.0;
    let self_adjoint = phi.a() == 1.0 && b.im == 0.0;
    let unitary = phi.a() == 1.0 && b.re == 0.0;

    let (pos, upos) = if class.is_type_one() {
        (
            Verdict::yes("Thm 3.4", "hyperbolic of type I: orbit lower bound grows like a^(-n/2)"),
            Verdict::yes("Thm 3.4", "hyperbolic of type I: the growth time is uniform on the sphere"),
        )
    } else if class.is_type_two() {
        let note = "hyperbolic of type II: ||C_phi^n|| = a^(-n/2) < 1";
        (Verdict::no("Prop 3.3", note), Verdict::no("Prop 3.3", note))
    } else {
        let note = "parabolic type: kernel orbits stay bounded by 1/sqrt(2 Re w)";
        (Verdict::no("Prop 3.3", note), Verdict::no("Prop 3.3", note))
    };

    let (exp, uexp) = if !invertible {
        (Verdict::not_applicable(), Verdict::not_applicable())
    } else if class.is_hyperbolic() {
        (
            Verdict::yes("Thm 3.5", "invertible with a != 1: sigma_p(C*C) = {1/a} misses the circle"),
            Verdict::yes("Thm 3.5", "invertible with a != 1: spectrum misses the unit circle"),
        )
    } else {
        let note = "a = 1: unit kernels at 1/2 + ni keep norm 1 forwards and backwards";
        (Verdict::no("Thm 3.5", note), Verdict::no("Thm 3.5", note))
    };

    let shadowing = match class {
        HyperbolicAutomorphismTypeI => {
            Verdict::yes("S.1 via Cor 2.6", "invertible hyperbolic operator (spectrum on |z| = a^(-1/2) > 1)")
        }
        HyperbolicAutomorphismTypeII | HyperbolicNonAutomorphismTypeII => {
            Verdict::yes("S.1", "||C_phi^n|| = a^(-n/2): pseudo-orbit errors sum geometrically")
        }
        HyperbolicNonAutomorphismTypeI => {
            Verdict::no("S.2", "interior fixed point b/(1-a) yields a non-shadowable pseudotrajectory")
        }
        Identity => Verdict::no("S.2", "every point is fixed; unitary and not hyperbolic"),
        ParabolicAutomorphism => Verdict::no("S.2", "unitary with spectrum the unit circle"),
        ParabolicNonAutomorphism => {
            Verdict::no("S.2", "normal contraction whose spectrum meets the unit circle")
        }
    };

    DynamicsReport {
        class,
        operator_norm: phi.operator_norm(),
        invertible,
        normal,
        self_adjoint,
        unitary,
        positively_expansive: pos,
        uniformly_positively_expansive: upos,
        expansive: exp,
        uniformly_expansive: uexp,
        positive_shadowing: shadowing,
        li_yorke: li_yorke_verdict(class),
        spectrum: spectrum_descriptor(phi),
    }
}

/// `‖C_φ* C_φ k_w − (1/a) k_w‖` for an automorphic symbol.
pub fn eigen_check(phi: &AffineSymbol, w: Complex64) -> Result<f64> {
    if phi.b().re != 0.0 {
        return Err(invalid(format!(
            "eigenrelation needs Re(b) = 0, got Re(b) = {}",
            phi.b().re
        )));
    }
    let k = KernelElement::kernel(w)?;
    let image = apply_adjoint(phi, &apply(phi, &k)?)?;
    let expected = Complex64::new(1.0 / phi.a(), 0.0);
    let k_term = k.terms()[0];
    match image.terms() {
        [] => Ok(expected.norm() * k.norm()?),
        [t] => Ok(two_term_distance(t.coeff, t.pole, expected, k_term.pole)),
        _ => image.sub(&k.scale(expected))?.norm(),
    }
}

/// `(n, ‖C_φⁿ k_{wₙ}‖)` for the unit kernels `wₙ = 1/2 + n·i`, `n = 0..=N`.
pub fn uniform_expansivity_counterexample(
    phi: &AffineSymbol,
    n_max: usize,
) -> Result<Vec<(usize, f64)>> {
    if phi.a() != 1.0 {
        return Err(invalid(format!("counterexample needs a = 1, got a = {}", phi.a())));
    }
    let mut out = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let mut element = KernelElement::kernel(Complex64::new(0.5, n as f64))?;
        for _ in 0..n {
            element = apply(phi, &element)?;
        }
        out.push((n, element.norm()?));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use VerdictValue::*;

    fn sym(a: f64, re: f64, im: f64) -> AffineSymbol {
        AffineSymbol::from_parts(a, re, im).unwrap()
    }

    #[test]
    fn report_examples() {
        let r = report(&sym(0.5, 1.0, 1.0));
        assert_eq!(r.positively_expansive.value, Yes);
        assert_eq!(r.positive_shadowing.value, No);
        assert_eq!(r.li_yorke.value, No);
        assert_eq!(r.expansive.value, NotApplicable);

        let r = report(&sym(2.0, 1.0, 0.0));
        assert_eq!(r.positively_expansive.value, No);
        assert_eq!(r.positive_shadowing.value, Yes);

        let r = report(&sym(1.0, 0.0, 1.0));
        assert!(r.unitary && r.normal && r.invertible && !r.self_adjoint);
        assert_eq!(r.expansive.value, No);
        assert_eq!(r.positive_shadowing.value, No);
        assert_eq!(r.spectrum, SpectrumDescriptor::UnitCircle);
    }

    #[test]
    fn full_table() {
        let cases = [
            (sym(1.0, 0.0, 0.0), [No, No, No, No, No], SpectrumDescriptor::Singleton1),
            (sym(1.0, 0.0, 2.0), [No, No, No, No, No], SpectrumDescriptor::UnitCircle),
            (
                sym(1.0, 1.0, 0.0),
                [No, No, NotApplicable, NotApplicable, No],
                SpectrumDescriptor::DecayingSpiralWithZero { b_re: 1.0, b_im: 0.0 },
            ),
            (
                sym(0.25, 0.0, 1.0),
                [Yes, Yes, Yes, Yes, Yes],
                SpectrumDescriptor::Circle { radius: 2.0 },
            ),
            (sym(0.25, 0.0, 0.0), [Yes, Yes, Yes, Yes, Yes], SpectrumDescriptor::TruncationOnly),
            (
                sym(4.0, 0.0, -1.0),
                [No, No, Yes, Yes, Yes],
                SpectrumDescriptor::Circle { radius: 0.5 },
            ),
            (
                sym(0.25, 1.0, 0.0),
                [Yes, Yes, NotApplicable, NotApplicable, No],
                SpectrumDescriptor::ClosedDisc { radius: 2.0 },
            ),
            (
                sym(4.0, 1.0, 1.0),
                [No, No, NotApplicable, NotApplicable, Yes],
                SpectrumDescriptor::ClosedDisc { radius: 0.5 },
            ),
        ];
        for (phi, values, spectrum) in cases {
            let r = report(&phi);
            let got = [
                r.positively_expansive.value,
                r.uniformly_positively_expansive.value,
                r.expansive.value,
                r.uniformly_expansive.value,
                r.positive_shadowing.value,
            ];
            assert_eq!(got, values, "{phi}");
            assert_eq!(r.spectrum, spectrum, "{phi}");
            assert_eq!(r.li_yorke.value, No);
            assert_eq!(r.operator_norm, phi.operator_norm());
        }
    }

    #[test]
    fn normality_trio() {
        let r = report(&sym(1.0, 2.0, 0.0));
        assert!(r.normal && r.self_adjoint && !r.unitary && !r.invertible);
        let r = report(&sym(1.0, 2.0, 1.0));
        assert!(r.normal && !r.self_adjoint);
        let r = report(&sym(3.0, 0.0, 1.0));
        assert!(r.normal && r.invertible && !r.unitary && !r.self_adjoint);
        let r = report(&sym(3.0, 0.5, 0.0));
        assert!(!r.normal && !r.invertible);
    }

    #[test]
    fn eigen_check_examples() {
        let c = |re, im| Complex64::new(re, im);
        assert!(eigen_check(&sym(2.0, 0.0, 1.0), c(1.0, 0.0)).unwrap() <= 1e-13);
        assert_eq!(eigen_check(&AffineSymbol::identity(), c(1.0, 2.0)).unwrap(), 0.0);
        assert!(eigen_check(&sym(0.5, 0.0, 3.0), c(0.5, 0.0)).unwrap() <= 1e-13);
        assert!(eigen_check(&sym(0.7, 0.0, 0.3), c(0.123, 4.56)).unwrap() <= 1e-13);
        assert!(eigen_check(&sym(2.0, 1.0, 0.0), c(1.0, 0.0)).is_err());
    }

    #[test]
    fn counterexample_examples() {
        let v = uniform_expansivity_counterexample(&sym(1.0, 0.0, 1.0), 10).unwrap();
        assert!(v.iter().all(|(_, x)| (x - 1.0).abs() < 1e-12));
        let v = uniform_expansivity_counterexample(&sym(1.0, 1.0, 0.0), 12).unwrap();
        assert!((v[12].1 - 0.2).abs() < 1e-12);
        let v = uniform_expansivity_counterexample(&AffineSymbol::identity(), 5).unwrap();
        assert!(v.iter().all(|(_, x)| *x == 1.0));
        assert!(uniform_expansivity_counterexample(&sym(2.0, 0.0, 1.0), 5).is_err());
    }

    #[test]
    fn descriptor_display() {
        assert_eq!(SpectrumDescriptor::UnitCircle.to_string(), "UnitCircle");
        let d = spectrum_descriptor(&sym(2.0, 0.0, 1.0));
        assert_eq!(d.to_string(), "Circle(radius=7.0710678118654757e-1)");
        assert_eq!(d.radius(), Some(0.5f64.sqrt()));
    }
}
