//! Pseudo-orbits and the constructions around them: the non-shadowable
//! pseudotrajectory at an interior fixed point, seeded random
//! pseudo-orbits, the geometric shadowing bound for `a > 1`, and orbit
//! envelopes that rule out Li-Yorke chaos.

use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::kernel::{
    apply, expansivity_lower_bound_at, orbit_norms, KernelElement, DEFAULT_ORBIT_CAP,
};
use crate::symbol::{AffineSymbol, FixedPoints};

/// Relative slack on `δ` when validating a pseudo-orbit.
pub const DELTA_SLACK: f64 = 1e-10;

/// Box the random perturbation poles are drawn from.
const POLE_RE: (f64, f64) = (0.25, 4.0);
const POLE_IM: (f64, f64) = (-4.0, 4.0);

fn check_delta(delta: f64) -> Result<()> {
    if !delta.is_finite() || delta < 0.0 {
        return Err(invalid(format!("delta must be finite and >= 0, got {delta}")));
    }
    Ok(())
}

fn check_length(n: usize) -> Result<()> {
    if n > DEFAULT_ORBIT_CAP {
        return Err(invalid(format!("orbit length {n} exceeds cap {DEFAULT_ORBIT_CAP}")));
    }
    Ok(())
}

/// `x_0, …, x_N` with `‖C_φ x_n − x_{n+1}‖ ≤ δ`.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoOrbit {
    pub delta: f64,
    pub elements: Vec<KernelElement>,
}

impl PseudoOrbit {
    /// `‖C_φ x_n − x_{n+1}‖` for `n = 0..N−1`.
    pub fn deviations(&self, phi: &AffineSymbol) -> Result<Vec<f64>> {
        self.elements
            .windows(2)
            .map(|pair| apply(phi, &pair[0])?.sub(&pair[1])?.norm())
            .collect()
    }

    /// Whether every step stays within `δ·(1 + 1e-10)`.
    pub fn validate(&self, phi: &AffineSymbol) -> Result<bool> {
        let limit = self.delta * (1.0 + DELTA_SLACK);
        Ok(self.deviations(phi)?.iter().all(|d| *d <= limit))
    }

    /// `‖C_φⁿ g − x_n‖` for `n = 0..=N`.
    pub fn distances_to_orbit(&self, phi: &AffineSymbol, g: &KernelElement) -> Result<Vec<f64>> {
        let mut current = g.clone();
        let mut out = Vec::with_capacity(self.elements.len());
        for (n, x) in self.elements.iter().enumerate() {
            if n > 0 {
                current = apply(phi, &current)?;
            }
            out.push(current.sub(x)?.norm()?);
        }
        Ok(out)
    }

    pub fn max_distance_to_orbit(&self, phi: &AffineSymbol, g: &KernelElement) -> Result<f64> {
        Ok(self.distances_to_orbit(phi, g)?.into_iter().fold(0.0, f64::max))
    }
}

/// The pseudotrajectory `f_n = (δ/‖C_φ f‖) Σ_{k=1}^{n} C_φᵏ f` pinned at an
/// interior fixed point `η`.
#[derive(Debug, Clone, PartialEq)]
pub struct NonShadowingWitness {
    pub orbit: PseudoOrbit,
    pub fixed_point: Complex64,
    pub seed: KernelElement,
    /// `‖C_φ f‖`.
    pub step_norm: f64,
    /// `δ f(η) / ‖C_φ f‖`, the growth of `f_n(η)` per step.
    pub slope: Complex64,
}

impl NonShadowingWitness {
    /// `f_n(η)` for `n = 0..=N`.
    pub fn fixed_point_values(&self) -> Result<Vec<Complex64>> {
        self.orbit.elements.iter().map(|f| f.evaluate(self.fixed_point)).collect()
    }

    /// `√(2 Re η)·|n·|slope| − |g(η)||`, a lower bound for
    /// `‖C_φⁿ g − f_n‖`: evaluation at `η` has norm `1/√(2 Re η)` and
    /// `(C_φⁿ g)(η) = g(η)`.
    pub fn divergence_floor(&self, g: &KernelElement, n: usize) -> Result<f64> {
        let g_eta = g.evaluate(self.fixed_point)?.norm();
        let gap = (n as f64 * self.slope.norm() - g_eta).abs();
        Ok(gap * (2.0 * self.fixed_point.re).sqrt())
    }
}

/// Point used in place of a fixed point for the identity symbol.
pub const IDENTITY_ANCHOR: Complex64 = Complex64::new(1.0, 0.0);

fn interior_fixed_point(phi: &AffineSymbol) -> Result<Complex64> {
    match phi.fixed_point() {
        FixedPoints::Everywhere => Ok(IDENTITY_ANCHOR),
        FixedPoints::Unique { point, interior: true } => Ok(point),
        FixedPoints::Unique { point, .. } => Err(Error::Precondition {
            citation: "Prop 4.1",
            detail: format!("fixed point {point} of {phi} is not inside the half-plane"),
        }),
        FixedPoints::Absent => Err(Error::Precondition {
            citation: "Prop 4.1",
            detail: format!("{phi} has no fixed point"),
        }),
    }
}

/// Non-shadowable `δ`-pseudotrajectory of length `N + 1`. `f` defaults to
/// `k_η`.
pub fn non_shadowing_witness(
    phi: &AffineSymbol,
    f: Option<&KernelElement>,
    delta: f64,
    n: usize,
) -> Result<NonShadowingWitness> {
    check_delta(delta)?;
    check_length(n)?;
    let eta = interior_fixed_point(phi)?;
    let seed = match f {
        Some(f) => f.clone(),
        None => KernelElement::kernel(eta)?,
    };
    let f_eta = seed.evaluate(eta)?;
    if f_eta.norm() == 0.0 {
        return Err(invalid(format!("seed vanishes at the fixed point {eta}")));
    }
    let step = apply(phi, &seed)?;
    let step_norm = step.norm()?;
    let scale = delta / step_norm;
    let kick = step.scale(Complex64::new(scale, 0.0));

    let mut elements = Vec::with_capacity(n + 1);
    elements.push(KernelElement::zero());
    for k in 0..n {
        let next = apply(phi, &elements[k])?.add(&kick)?;
        elements.push(next);
    }
    Ok(NonShadowingWitness {
        orbit: PseudoOrbit { delta, elements },
        fixed_point: eta,
        seed,
        step_norm,
        slope: f_eta * scale,
    })
}

/// `x_{n+1} = C_φ x_n + g_{n+1}` with each `g` a single scaled kernel: pole
/// uniform in `[0.25, 4] × [−4, 4]`, random phase, norm uniform in `[0, δ]`.
pub fn random_pseudo_orbit(
    phi: &AffineSymbol,
    f0: &KernelElement,
    delta: f64,
    n: usize,
    seed: u64,
) -> Result<PseudoOrbit> {
    check_delta(delta)?;
    check_length(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut elements = Vec::with_capacity(n + 1);
    elements.push(f0.clone());
    for k in 0..n {
        let pole = Complex64::new(rng.gen_range(POLE_RE.0..=POLE_RE.1), rng.gen_range(POLE_IM.0..=POLE_IM.1));
        let size = delta * rng.gen::<f64>();
        let phase = Complex64::from_polar(1.0, TAU * rng.gen::<f64>());
        // ‖k_β‖ = 1/√(2 Re β)
        let coeff = phase * (size * (2.0 * pole.re).sqrt());
        let kick = KernelElement::from_terms([(coeff, pole)])?;
        let next = apply(phi, &elements[k])?.add(&kick)?;
        elements.push(next);
    }
    Ok(PseudoOrbit { delta, elements })
}

/// Shadowing seed and a-priori error bound.
#[derive(Debug, Clone, PartialEq)]
pub struct ShadowConstruction {
    /// `x_0`: its true orbit stays within `bound` of the pseudo-orbit.
    pub seed: KernelElement,
    /// `δ / (1 − a^{−1/2})`.
    pub bound: f64,
    /// `(1 − a^{−1/2}) ε / 2`.
    pub max_delta: f64,
}

/// For `a > 1`, `‖C_φⁿ‖ = a^{−n/2}` so the errors `Σ C_φ^{n−i} g_i` sum
/// geometrically: `‖C_φⁿ x_0 − x_n‖ ≤ δ/(1 − p)` with `p = a^{−1/2}`.
pub fn shadow_construct(
    phi: &AffineSymbol,
    orbit: &PseudoOrbit,
    epsilon: f64,
) -> Result<ShadowConstruction> {
    let a = phi.a();
    if !(a > 1.0) {
        return Err(invalid(format!("shadowing bound needs a > 1, got a = {a}")));
    }
    if !epsilon.is_finite() || !(epsilon > 0.0) {
        return Err(invalid(format!("epsilon must be finite and > 0, got {epsilon}")));
    }
    let seed = orbit
        .elements
        .first()
        .cloned()
        .ok_or_else(|| invalid("pseudo-orbit is empty"))?;
    let p = a.sqrt().recip();
    let max_delta = (1.0 - p) * epsilon / 2.0;
    if orbit.delta > max_delta {
        return Err(invalid(format!(
            "delta {} exceeds the admissible maximum {max_delta:e} for epsilon {epsilon}",
            orbit.delta
        )));
    }
    Ok(ShadowConstruction { seed, bound: orbit.delta / (1.0 - p), max_delta })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LiYorkeReason {
    /// `a = 1` or `Re b = 0`.
    Normal,
    /// `a > 1`, `Re b > 0`: every orbit decays like `a^{−n/2}`.
    NormBelowOne,
    /// `a < 1`, `Re b > 0`: every nonzero orbit eventually exceeds 2.
    OrbitFloor,
}

impl fmt::Display for LiYorkeReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LiYorkeReason::Normal => "normal operator: no semi-irregular vectors",
            LiYorkeReason::NormBelowOne => "norm below one: every orbit tends to zero",
            LiYorkeReason::OrbitFloor => "orbit floor: every nonzero orbit eventually exceeds 2",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LiYorkeCertificate {
    /// `min ‖C_φⁿ f‖` over `n ∈ [N/2, N]`.
    pub liminf_est: f64,
    /// `max ‖C_φⁿ f‖` over `n ∈ [N/2, N]`.
    pub limsup_est: f64,
    pub reason: LiYorkeReason,
    /// First `n ≤ N` whose orbit lower bound exceeds 2 (orbit-floor case).
    pub floor_time: Option<usize>,
    /// Base point `x` of the lower bound used for `floor_time`.
    pub floor_base: Option<f64>,
}

/// Orbit envelope over the second half of `0..=N`.
pub fn li_yorke_certificate(
    phi: &AffineSymbol,
    f: &KernelElement,
    n: usize,
) -> Result<LiYorkeCertificate> {
    if f.is_empty() {
        return Err(invalid("li-yorke certificate needs a nonzero element"));
    }
    let norms = orbit_norms(phi, f, n)?;
    let window = &norms[n / 2..];
    let liminf_est = window.iter().copied().fold(f64::INFINITY, f64::min);
    let limsup_est = window.iter().copied().fold(0.0, f64::max);
    let (a, b) = (phi.a(), phi.b());
    let reason = if a == 1.0 || b.re == 0.0 {
        LiYorkeReason::Normal
    } else if a > 1.0 {
        LiYorkeReason::NormBelowOne
    } else {
        LiYorkeReason::OrbitFloor
    };
    let (mut floor_time, mut floor_base) = (None, None);
    if reason == LiYorkeReason::OrbitFloor {
        let x = floor_base_point(phi, f)?;
        floor_base = Some(x);
        for k in 0..=n {
            let kk = u32::try_from(k).map_err(|_| invalid("orbit length too large"))?;
            if expansivity_lower_bound_at(phi, f, kk, x)? > 2.0 {
                floor_time = Some(k);
                break;
            }
        }
    }
    Ok(LiYorkeCertificate { liminf_est, limsup_est, reason, floor_time, floor_base })
}

/// `x = 1`, or `1 + 2^{−k}` if `f` vanishes at `x + b/(1 − a)`.
fn floor_base_point(phi: &AffineSymbol, f: &KernelElement) -> Result<f64> {
    let limit = phi.b() / (1.0 - phi.a());
    let mut x = 1.0;
    for k in 1..=52 {
        if f.evaluate(limit + x)?.norm() != 0.0 {
            return Ok(x);
        }
        x = 1.0 + 0.5f64.powi(k);
    }
    Err(Error::Numerical("element vanishes at every fallback base point".into()))
}
