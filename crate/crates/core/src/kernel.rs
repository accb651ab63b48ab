//! Exact arithmetic in the linear span of reproducing kernels of `H²(C₊)`.
//!
//! `k_β(w) = 1 / (w + conj β)` with `‖k_β‖² = 1 / (2 Re β)`. The span is
//! invariant under `C_φ` and `C_φ*` for affine `φ`:
//!
//! ```text
//! C_φ  k_α = (1/a) · k_{(α + conj b)/a}
//! C_φ* k_β = k_{aβ + b}
//! ```
//!
//! so every orbit of a kernel combination stays a finite combination and all
//! norms and inner products are closed-form sums over the Gram matrix.

use std::collections::hash_map::Entry;

use num_complex::Complex64;
use rustc_hash::FxHashMap;

use crate::error::{invalid, Error, Result};
use crate::symbol::{canon, canon_c, pow_u32, AffineSymbol};

/// Maximum number of terms in one element; bounds the O(k²) Gram cost.
pub const MAX_TERMS: usize = 512;

/// Default cap on orbit lengths.
pub const DEFAULT_ORBIT_CAP: usize = 10_000;

/// Negative `⟨f, f⟩` tolerated as rounding, relative to the absolute Gram mass.
pub const GRAM_NEGATIVE_TOLERANCE: f64 = 1e-14;

/// One term `c · k_β`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelTerm {
    pub coeff: Complex64,
    pub pole: Complex64,
}

/// A finite combination `Σ cᵢ k_{βᵢ}`, normalized so that poles are pairwise
/// bitwise distinct and no coefficient is zero.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct KernelElement {
    terms: Vec<KernelTerm>,
}

fn pole_key(z: Complex64) -> (u64, u64) {
    (canon(z.re).to_bits(), canon(z.im).to_bits())
}

fn check_pole(beta: Complex64) -> Result<()> {
    if !beta.re.is_finite() || !beta.im.is_finite() {
        return Err(invalid(format!("pole must be finite, got {beta}")));
    }
    if !(beta.re > 0.0) {
        return Err(invalid(format!("pole must satisfy Re > 0, got {beta}")));
    }
    Ok(())
}

/// Neumaier-compensated complex accumulator.
#[derive(Debug, Default, Clone, Copy)]
struct CompensatedSum {
    re: f64,
    re_c: f64,
    im: f64,
    im_c: f64,
}

// Knuth's branch-free two-sum; same error term as Neumaier's update.
#[inline]
fn neumaier(sum: &mut f64, comp: &mut f64, x: f64) {
    let t = *sum + x;
    let bp = t - *sum;
    *comp += (*sum - (t - bp)) + (x - bp);
    *sum = t;
}

impl CompensatedSum {
    #[inline]
    fn add(&mut self, z: Complex64) {
        neumaier(&mut self.re, &mut self.re_c, z.re);
        neumaier(&mut self.im, &mut self.im_c, z.im);
    }

    #[inline]
    fn add_re(&mut self, x: f64) {
        neumaier(&mut self.re, &mut self.re_c, x);
    }

    fn value(&self) -> Complex64 {
        Complex64::new(self.re + self.re_c, self.im + self.im_c)
    }
}

/// `⟨k_α, k_β⟩ = k_α(β) = 1 / (β + conj α)`.
#[inline]
pub fn kernel_inner(alpha: Complex64, beta: Complex64) -> Complex64 {
    (beta + alpha.conj()).inv()
}

/// `‖c₁ k_α − c₂ k_β‖` without the cancellation a Gram evaluation suffers
/// when `α ≈ β`.
///
/// Splits `c₁k_α − c₂k_β = c₁(k_α − k_β) + (c₁ − c₂)k_β` and uses
/// `‖k_α − k_β‖² = (Re α + Re β)|α − β|² / (2 Re α Re β |α + conj β|²)`.
pub fn two_term_distance(c1: Complex64, alpha: Complex64, c2: Complex64, beta: Complex64) -> f64 {
    let (x, y) = (alpha.re, beta.re);
    let d = alpha - beta;
    let s = alpha + beta.conj();
    let diff_sq = (x + y) * d.norm_sqr() / (2.0 * x * y * s.norm_sqr());
    let dc = c1 - c2;
    // ⟨k_α − k_β, k_β⟩ = (conj β − conj α) / ((β + conj α) · 2 Re β)
    let cross = (beta.conj() - alpha.conj()) / ((beta + alpha.conj()) * (2.0 * y));
    let total = c1.norm_sqr() * diff_sq
        + dc.norm_sqr() / (2.0 * y)
        + 2.0 * (c1 * dc.conj() * cross).re;
    total.max(0.0).sqrt()
}

impl KernelElement {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    /// `k_β` for `Re β > 0`.
    pub fn kernel(beta: Complex64) -> Result<Self> {
        check_pole(beta)?;
        Ok(Self {
            terms: vec![KernelTerm { coeff: Complex64::new(1.0, 0.0), pole: canon_c(beta) }],
        })
    }

    /// Builds a normalized element: equal poles are merged, zero
    /// coefficients dropped. First-occurrence order is kept.
    pub fn from_terms<I>(terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Complex64, Complex64)>,
    {
        let terms = terms.into_iter();
        let mut out: Vec<KernelTerm> = Vec::with_capacity(terms.size_hint().0);
        let mut index: FxHashMap<(u64, u64), usize> =
            FxHashMap::with_capacity_and_hasher(out.capacity(), Default::default());
        for (coeff, pole) in terms {
            check_pole(pole)?;
            if !coeff.re.is_finite() || !coeff.im.is_finite() {
                return Err(Error::Numerical(format!("non-finite coefficient {coeff}")));
            }
            let pole = canon_c(pole);
            match index.entry(pole_key(pole)) {
                Entry::Occupied(slot) => out[*slot.get()].coeff += coeff,
                Entry::Vacant(slot) => {
                    slot.insert(out.len());
                    out.push(KernelTerm { coeff, pole });
                }
            }
        }
        out.retain(|t| t.coeff.re != 0.0 || t.coeff.im != 0.0);
        if out.len() > MAX_TERMS {
            return Err(Error::TooManyTerms { len: out.len(), cap: MAX_TERMS });
        }
        Ok(Self { terms: out })
    }

    pub fn terms(&self) -> &[KernelTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        if s.re == 0.0 && s.im == 0.0 {
            return Self::zero();
        }
        let terms = self
            .terms
            .iter()
            .map(|t| KernelTerm { coeff: t.coeff * s, pole: t.pole })
            .filter(|t| t.coeff.re != 0.0 || t.coeff.im != 0.0)
            .collect();
        Self { terms }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Self::from_terms(
            self.terms
                .iter()
                .chain(other.terms.iter())
                .map(|t| (t.coeff, t.pole)),
        )
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Self::from_terms(
            self.terms
                .iter()
                .map(|t| (t.coeff, t.pole))
                .chain(other.terms.iter().map(|t| (-t.coeff, t.pole))),
        )
    }

    /// `f(w) = Σ cᵢ / (w + conj βᵢ)`.
    pub fn evaluate(&self, w: Complex64) -> Result<Complex64> {
        if !(w.re > 0.0) || !w.im.is_finite() || !w.re.is_finite() {
            return Err(invalid(format!("evaluation point must satisfy Re > 0, got {w}")));
        }
        let mut acc = CompensatedSum::default();
        for t in &self.terms {
            acc.add(t.coeff / (w + t.pole.conj()));
        }
        Ok(acc.value())
    }

    /// `⟨f, g⟩ = Σᵢⱼ cᵢ conj(dⱼ) / (βⱼ + conj αᵢ)`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        let mut acc = CompensatedSum::default();
        for f in &self.terms {
            for g in &other.terms {
                acc.add(f.coeff * g.coeff.conj() * kernel_inner(f.pole, g.pole));
            }
        }
        acc.value()
    }

    /// `⟨f, f⟩` as a real number, using Hermitian symmetry of the Gram
    /// matrix.
    fn gram_quadratic_form(&self) -> f64 {
        let mut acc = CompensatedSum::default();
        for (i, f) in self.terms.iter().enumerate() {
            acc.add_re(f.coeff.norm_sqr() / (2.0 * f.pole.re));
            for g in &self.terms[i + 1..] {
                // Re(p / s) with p = c_f conj(c_g), s = β_g + conj β_f
                let p = f.coeff * g.coeff.conj();
                let s = g.pole + f.pole.conj();
                acc.add_re(2.0 * (p.re * s.re + p.im * s.im) / s.norm_sqr());
            }
        }
        acc.value().re
    }

    /// `Σᵢⱼ |cᵢ dⱼ ⟨k_{βᵢ}, k_{βⱼ}⟩|`, the scale of rounding in the form.
    fn gram_mass(&self) -> f64 {
        let mut mass = 0.0;
        for (i, f) in self.terms.iter().enumerate() {
            mass += f.coeff.norm_sqr() / (2.0 * f.pole.re);
            for g in &self.terms[i + 1..] {
                mass += 2.0 * (f.coeff * g.coeff.conj() * kernel_inner(f.pole, g.pole)).norm();
            }
        }
        mass
    }

    pub fn norm_sqr(&self) -> Result<f64> {
        let value = self.gram_quadratic_form();
        if !value.is_finite() {
            return Err(Error::Numerical(format!("non-finite squared norm ({value})")));
        }
        if value < 0.0 {
            let mass = self.gram_mass();
            if value < -GRAM_NEGATIVE_TOLERANCE * mass.max(1.0) {
                return Err(Error::Numerical(format!(
                    "Gram form is indefinite: <f,f> = {value:e} (mass {mass:e})"
                )));
            }
            return Ok(0.0);
        }
        Ok(value)
    }

    pub fn norm(&self) -> Result<f64> {
        self.norm_sqr().map(f64::sqrt)
    }
}

/// `C_φ f`, term by term `(c, α) ↦ (c/a, (α + conj b)/a)`.
pub fn apply(phi: &AffineSymbol, f: &KernelElement) -> Result<KernelElement> {
    let a = phi.a();
    let shift = phi.b().conj();
    let terms = f.terms().iter().map(|t| {
        if a == 1.0 {
            (t.coeff, t.pole + shift)
        } else {
            (t.coeff / a, (t.pole + shift) / a)
        }
    });
    KernelElement::from_terms(terms)
}

/// `C_φ* f`, term by term `(c, β) ↦ (c, aβ + b)`.
pub fn apply_adjoint(phi: &AffineSymbol, f: &KernelElement) -> Result<KernelElement> {
    KernelElement::from_terms(f.terms().iter().map(|t| (t.coeff, phi.eval(t.pole))))
}

/// `[‖f‖, ‖C_φ f‖, …, ‖C_φᴺ f‖]` with the default cap.
pub fn orbit_norms(phi: &AffineSymbol, f: &KernelElement, n: usize) -> Result<Vec<f64>> {
    orbit_norms_capped(phi, f, n, DEFAULT_ORBIT_CAP)
}

pub fn orbit_norms_capped(
    phi: &AffineSymbol,
    f: &KernelElement,
    n: usize,
    cap: usize,
) -> Result<Vec<f64>> {
    if n > cap {
        return Err(invalid(format!("orbit length {n} exceeds cap {cap}")));
    }
    let mut out = Vec::with_capacity(n + 1);
    let mut current = f.clone();
    out.push(current.norm()?);
    for _ in 0..n {
        current = apply(phi, &current)?;
        out.push(current.norm()?);
    }
    Ok(out)
}

/// Closed form of `‖C_φⁿ k_w‖`.
///
/// `a = 1`: `1/√(2 Re w + 2n Re b)`. Otherwise `C_φⁿ k_w = a⁻ⁿ k_{ψⁿ(w)}`
/// where `ψ` is the adjoint symbol, so the norm is `a⁻ⁿ / √(2 Re ψⁿ(w))`.
pub fn orbit_norm_kernel_closed(phi: &AffineSymbol, w: Complex64, n: u32) -> Result<f64> {
    check_pole(w)?;
    if phi.a() == 1.0 {
        return Ok(1.0 / (2.0 * w.re + 2.0 * n as f64 * phi.b().re).sqrt());
    }
    let (_, psi) = phi.adjoint_symbol();
    let pole = psi.iterate(n).eval(w);
    let scale = pow_u32(phi.a(), n).recip();
    Ok(scale / (2.0 * pole.re).sqrt())
}

/// `‖C_φⁿ f‖ ≥ √(2x) · a^{−n/2} · |f(x + (1 − aⁿ)/(1 − a) · b)|` for any
/// `x > 0` and `a ∈ (0, 1)`, from Cauchy–Schwarz against `k_{x·a⁻ⁿ}`.
pub fn expansivity_lower_bound_at(
    phi: &AffineSymbol,
    f: &KernelElement,
    n: u32,
    x: f64,
) -> Result<f64> {
    let a = phi.a();
    if !(a < 1.0) {
        return Err(invalid(format!("orbit lower bound needs 0 < a < 1, got a = {a}")));
    }
    if !(x > 0.0) {
        return Err(invalid(format!("base point must be positive, got {x}")));
    }
    let an = pow_u32(a, n);
    let point = Complex64::new(x, 0.0) + phi.b() * ((1.0 - an) / (1.0 - a));
    let value = f.evaluate(point)?.norm();
    Ok((2.0 * x).sqrt() * an.sqrt().recip() * value)
}

/// `√2 · a^{−n/2} · |f(1 + (1 − aⁿ)/(1 − a) · b)| ≤ ‖C_φⁿ f‖`.
pub fn expansivity_lower_bound(phi: &AffineSymbol, f: &KernelElement, n: u32) -> Result<f64> {
    expansivity_lower_bound_at(phi, f, n, 1.0)
}

/// `|f(w)| ≤ ‖f‖ / √(2 Re w)` up to `1e-12`.
pub fn pointwise_bound_check(f: &KernelElement, w: Complex64) -> Result<bool> {
    let value = f.evaluate(w)?.norm();
    let bound = f.norm()? / (2.0 * w.re).sqrt();
    Ok(value <= bound + 1e-12)
}
