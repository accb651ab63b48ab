//! Matrix truncations of `C_φ` in a Laguerre basis.
//!
//! The Laplace transform `f(w) = ∫₀^∞ F(t) e^{−wt} dt` is a unitary map from
//! `L²(0, ∞)` onto `H²(C₊)` (with `‖k_β‖² = 1/(2 Re β)`), under which
//! `k_β ↔ e^{−conj(β) t}` and `C_φ` becomes
//!
//! ```text
//! (T F)(s) = (1/a) · e^{−b s / a} · F(s / a).
//! ```
//!
//! The orthonormal system `ℓ_n(t) = √(2c) e^{−ct} L_n(2ct)` turns `T` into
//! an infinite matrix; [`build_matrix`] computes its leading `N×N` block by
//! composite Gauss–Legendre quadrature.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::eigen::{eigenvalues, singular_values, SquareMatrix};
use crate::error::{invalid, Error, Result};
use crate::quadrature::GaussLegendre;
use crate::symbol::AffineSymbol;

pub const DEFAULT_BASIS_SIZE: usize = 64;
pub const MAX_BASIS_SIZE: usize = 256;
pub const DEFAULT_SCALE: f64 = 1.0;

/// Largest accepted entry change between successive node doublings.
pub const QUADRATURE_TOLERANCE: f64 = 1e-10;

const NODES_PER_PANEL: usize = 16;
const PHASE_PER_PANEL: f64 = 4.0;
const MIN_PANELS: usize = 8;
const NODES_PER_CHUNK: usize = 1024;
/// `ln` of the largest Laguerre-function magnitude treated as zero.
const LOG_TAIL: f64 = -46.0;

const POWER_TOLERANCE: f64 = 1e-10;
const POWER_MAX_ITERATIONS: usize = 10_000;

/// `{ℓ_0, …, ℓ_{N−1}}` with exponential scale `c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaguerreBasis {
    scale: f64,
    size: usize,
}

impl LaguerreBasis {
    pub fn new(scale: f64, size: usize) -> Result<Self> {
        if !scale.is_finite() || !(scale > 0.0) {
            return Err(invalid(format!("Laguerre scale must be finite and > 0, got {scale}")));
        }
        if size == 0 || size > MAX_BASIS_SIZE {
            return Err(invalid(format!(
                "basis size must be in 1..={MAX_BASIS_SIZE}, got {size}"
            )));
        }
        Ok(Self { scale, size })
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// `[ℓ_0(t), …, ℓ_{N−1}(t)]`.
    pub fn evaluate(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.size];
        self.evaluate_into(t, &mut out);
        out
    }

    fn evaluate_into(&self, t: f64, out: &mut [f64]) {
        let x = 2.0 * self.scale * t;
        laguerre_functions(x, out);
        let norm = (2.0 * self.scale).sqrt();
        for v in out.iter_mut() {
            *v *= norm;
        }
    }
}

/// `e^{−x/2} L_n(x)` for `n < out.len()`.
///
/// The three-term recurrence runs on `e^{−x/4} L_n(x)` and the remaining
/// factor is applied at the end, so neither the seed nor the intermediate
/// polynomial values leave the normal range for `x` up to ~2800.
fn laguerre_functions(x: f64, out: &mut [f64]) {
    let n = out.len();
    if n == 0 {
        return;
    }
    let quarter = (-0.25 * x).exp();
    out[0] = quarter;
    if n > 1 {
        out[1] = (1.0 - x) * quarter;
    }
    for k in 1..n.saturating_sub(1) {
        let kf = k as f64;
        out[k + 1] = ((2.0 * kf + 1.0 - x) * out[k] - kf * out[k - 1]) / (kf + 1.0);
    }
    for v in out.iter_mut() {
        *v *= quarter;
    }
}

/// Smallest `x ≥ 4d + 2` past which `|e^{−x/2} L_d(x)|`, and all lower
/// degrees, stay below `e^{LOG_TAIL}`.
fn laguerre_cutoff(degree: usize) -> f64 {
    let d = degree;
    let mut ln_fact = vec![0.0; d + 1];
    for k in 1..=d {
        ln_fact[k] = ln_fact[k - 1] + (k as f64).ln();
    }
    // |L_d(x)| ≤ Σ_k C(d,k) x^k / k!
    let log_bound = |x: f64| -> f64 {
        let lx = x.ln();
        let mut best = f64::NEG_INFINITY;
        for k in 0..=d {
            let term = ln_fact[d] - ln_fact[k] - ln_fact[d - k] + k as f64 * lx - ln_fact[k];
            best = best.max(term);
        }
        best + ((d + 1) as f64).ln() - 0.5 * x
    };
    let mut x = 4.0 * d as f64 + 2.0;
    let step = 1.0 + 0.01 * x;
    while log_bound(x) > LOG_TAIL {
        x += step;
    }
    x
}

/// Coefficients of `e^{−conj(β) t}` (the time-domain `k_β`) in the basis:
/// `√(2c) · (conj β − c)ⁿ / (conj β + c)^{n+1}`.
pub fn kernel_time_coeffs(beta: Complex64, basis: &LaguerreBasis) -> Result<Vec<Complex64>> {
    if !(beta.re > 0.0) || !beta.im.is_finite() || !beta.re.is_finite() {
        return Err(invalid(format!("pole must satisfy Re > 0, got {beta}")));
    }
    let c = basis.scale();
    let s = beta.conj();
    let ratio = (s - c) / (s + c);
    let mut current = Complex64::new((2.0 * c).sqrt(), 0.0) / (s + c);
    let mut out = Vec::with_capacity(basis.size());
    for _ in 0..basis.size() {
        out.push(current);
        current *= ratio;
    }
    Ok(out)
}

/// How a matrix was integrated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureReport {
    /// Upper integration limit in `s`.
    pub cutoff: f64,
    pub panels: usize,
    pub nodes: usize,
    /// Largest entry change at the last doubling.
    pub max_change: f64,
}

/// Leading `N×N` block of `C_φ` in the Laguerre basis,
/// `entries[m][n] = ⟨T ℓ_n, ℓ_m⟩`.
#[derive(Debug, Clone)]
pub struct TruncatedOperator {
    entries: Vec<Complex64>,
    basis: LaguerreBasis,
    symbol: AffineSymbol,
    quadrature: QuadratureReport,
}

impl TruncatedOperator {
    pub fn dim(&self) -> usize {
        self.basis.size()
    }

    pub fn basis(&self) -> &LaguerreBasis {
        &self.basis
    }

    pub fn symbol(&self) -> &AffineSymbol {
        &self.symbol
    }

    pub fn quadrature(&self) -> &QuadratureReport {
        &self.quadrature
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim() + col]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        assert_eq!(v.len(), n);
        (0..n)
            .map(|i| {
                self.entries[i * n..(i + 1) * n]
                    .iter()
                    .zip(v)
                    .map(|(m, x)| m * x)
                    .sum()
            })
            .collect()
    }

    pub fn apply_adjoint(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        assert_eq!(v.len(), n);
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (i, vi) in v.iter().enumerate() {
            for (j, o) in out.iter_mut().enumerate() {
                *o += self.entries[i * n + j].conj() * vi;
            }
        }
        out
    }

    /// `max |M[i][j] − conj M[j][i]|`.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.entry(i, j) - self.entry(j, i).conj()).norm());
            }
        }
        worst
    }
}

struct PanelGrid {
    sqrt_cutoff: f64,
    panels: usize,
}

impl PanelGrid {
    fn node_count(&self) -> usize {
        self.panels * NODES_PER_PANEL
    }
}

/// `rows × cols` block of the time-domain operator, row-major.
fn assemble(
    phi: &AffineSymbol,
    rows: &LaguerreBasis,
    cols: &LaguerreBasis,
    rule: &GaussLegendre,
    grid: &PanelGrid,
) -> Vec<Complex64> {
    let (nr, nc) = (rows.size(), cols.size());
    let a = phi.a();
    let b = phi.b();
    let width = grid.sqrt_cutoff / grid.panels as f64;
    let total = grid.node_count();
    let chunks = total.div_ceil(NODES_PER_CHUNK);
    // Partial sums are reduced in chunk order so results are reproducible
    // regardless of thread scheduling.
    let partials: Vec<Vec<Complex64>> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let start = chunk * NODES_PER_CHUNK;
            let end = (start + NODES_PER_CHUNK).min(total);
            let mut acc = vec![Complex64::new(0.0, 0.0); nr * nc];
            let mut row_vals = vec![0.0; nr];
            let mut col_vals = vec![0.0; nc];
            let mut col_weighted = vec![Complex64::new(0.0, 0.0); nc];
            for idx in start..end {
                let panel = idx / NODES_PER_PANEL;
                let k = idx % NODES_PER_PANEL;
                let lo = panel as f64 * width;
                let tau = lo + 0.5 * width * (rule.nodes[k] + 1.0);
                let weight = 0.5 * width * rule.weights[k];
                // s = τ², ds = 2τ dτ
                let s = tau * tau;
                let factor = (-b * (s / a)).exp() * (2.0 * tau * weight / a);
                rows.evaluate_into(s, &mut row_vals);
                cols.evaluate_into(s / a, &mut col_vals);
                for (cw, cv) in col_weighted.iter_mut().zip(&col_vals) {
                    *cw = factor * *cv;
                }
                for (m, rv) in row_vals.iter().enumerate() {
                    if *rv == 0.0 {
                        continue;
                    }
                    let row = &mut acc[m * nc..(m + 1) * nc];
                    for (dst, cw) in row.iter_mut().zip(&col_weighted) {
                        *dst += cw * *rv;
                    }
                }
            }
            acc
        })
        .collect();
    let mut total_sum = vec![Complex64::new(0.0, 0.0); nr * nc];
    for part in partials {
        for (dst, v) in total_sum.iter_mut().zip(part) {
            *dst += v;
        }
    }
    total_sum
}

fn max_change(x: &[Complex64], y: &[Complex64]) -> f64 {
    x.iter().zip(y).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max)
}

fn integrate_block(
    phi: &AffineSymbol,
    rows: &LaguerreBasis,
    cols: &LaguerreBasis,
) -> Result<(Vec<Complex64>, QuadratureReport)> {
    let c = rows.scale();
    let a = phi.a();
    // the integrand is negligible once either factor is
    let row_cut = laguerre_cutoff(rows.size() - 1) / (2.0 * c);
    let col_cut = a * laguerre_cutoff(cols.size() - 1) / (2.0 * c);
    let cutoff = row_cut.min(col_cut);
    let sqrt_cutoff = cutoff.sqrt();
    let laguerre_phase = 2.0 * (2.0 * c * rows.size() as f64 * cutoff).sqrt()
        + 2.0 * (2.0 * c * cols.size() as f64 * cutoff / a).sqrt();
    let drift_phase = phi.b().im.abs() * cutoff / a;
    let panels = ((laguerre_phase + drift_phase) / PHASE_PER_PANEL).ceil() as usize + MIN_PANELS;

    let rule = GaussLegendre::new(NODES_PER_PANEL);
    let mut grid = PanelGrid { sqrt_cutoff, panels };
    let mut previous = assemble(phi, rows, cols, &rule, &grid);
    let mut change = f64::INFINITY;
    for _ in 0..2 {
        grid.panels *= 2;
        let next = assemble(phi, rows, cols, &rule, &grid);
        change = max_change(&previous, &next);
        previous = next;
        if change <= QUADRATURE_TOLERANCE {
            break;
        }
    }
    if !(change <= QUADRATURE_TOLERANCE) {
        return Err(Error::Numerical(format!(
            "quadrature did not settle: entry change {change:e} after two doublings ({} panels)",
            grid.panels
        )));
    }
    let report = QuadratureReport {
        cutoff,
        panels: grid.panels,
        nodes: grid.node_count(),
        max_change: change,
    };
    Ok((previous, report))
}

/// Quadrature matrix of `C_φ`.
///
/// The half-line is cut where every `ℓ_m(s)` or every `ℓ_n(s/a)` has
/// decayed below `e^{-46}` and integrated in `τ = √s`, which makes the
/// Laguerre oscillations uniform. Panels are sized to the accumulated phase
/// and doubled until no entry moves by more than [`QUADRATURE_TOLERANCE`];
/// if two doublings do not get there the build fails.
pub fn build_matrix(phi: &AffineSymbol, basis: &LaguerreBasis) -> Result<TruncatedOperator> {
    let (entries, quadrature) = integrate_block(phi, basis, basis)?;
    Ok(TruncatedOperator { entries, basis: *basis, symbol: *phi, quadrature })
}

/// How [`norm_estimate`] arrived at its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormMethod {
    /// Largest eigenvalue of the Hermitian matrix `T*T`.
    Dense,
    /// Power iteration on `T*T`.
    Power,
}

/// Largest singular value of a truncation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormEstimate {
    pub value: f64,
    pub method: NormMethod,
    /// Power iterations used (zero for [`NormMethod::Dense`]).
    pub iterations: usize,
    pub converged: bool,
}

fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `T*T`, row-major.
fn gram_matrix(op: &TruncatedOperator) -> Vec<Complex64> {
    let n = op.dim();
    let mut g = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in i..n {
            let mut s = Complex64::new(0.0, 0.0);
            for k in 0..n {
                s += op.entry(k, i).conj() * op.entry(k, j);
            }
            g[i * n + j] = s;
            g[j * n + i] = s.conj();
        }
    }
    for i in 0..n {
        g[i * n + i].im = 0.0;
    }
    g
}

/// `‖T‖₂`.
///
/// Singular values of these truncations cluster near the top, where power
/// iteration stalls around 1e-6 short of the limit, so the value comes from
/// the dense eigenvalues of `T*T`. [`power_norm_estimate`] is the fallback if
/// the eigenvalue sweep fails.
pub fn norm_estimate(op: &TruncatedOperator) -> NormEstimate {
    let n = op.dim();
    let gram = SquareMatrix::from_row_major(n, gram_matrix(op));
    match eigenvalues(&gram) {
        Ok(ev) => {
            let top = ev.iter().map(|z| z.re).fold(0.0, f64::max);
            NormEstimate { value: top.sqrt(), method: NormMethod::Dense, iterations: 0, converged: true }
        }
        Err(_) => power_norm_estimate(op),
    }
}

/// Power iteration on `T*T` from the all-ones vector. Stops once successive
/// estimates agree to `1e-10`; after 10⁴ iterations the last estimate is
/// returned with `converged = false`.
pub fn power_norm_estimate(op: &TruncatedOperator) -> NormEstimate {
    let n = op.dim();
    let start = 1.0 / (n as f64).sqrt();
    let mut v = vec![Complex64::new(start, 0.0); n];
    let mut estimate = 0.0;
    let done = |value, iterations, converged| NormEstimate {
        value,
        method: NormMethod::Power,
        iterations,
        converged,
    };
    for iteration in 1..=POWER_MAX_ITERATIONS {
        let tv = op.apply(&v);
        let next = vec_norm(&tv);
        if next == 0.0 {
            return done(0.0, iteration, true);
        }
        if (next - estimate).abs() < POWER_TOLERANCE && iteration > 2 {
            return done(next, iteration, true);
        }
        estimate = next;
        let w = op.apply_adjoint(&tv);
        let wn = vec_norm(&w);
        if wn == 0.0 {
            return done(estimate, iteration, true);
        }
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / wn;
        }
    }
    done(estimate, POWER_MAX_ITERATIONS, false)
}

/// Eigenvalues of the truncation ("truncation eigenvalues"), sorted by
/// decreasing modulus, then real part, then imaginary part.
///
/// For `φ(w) = w + b` with `b > 0` the truncation is the Gram matrix `B*B`
/// of `B = S P`, `S` the time-domain operator of `w + b/2`; its eigenvalues
/// are taken as squared singular values of `B`, which keeps them
/// nonnegative where most of them sit below double-precision resolution.
pub fn spectrum_estimate(op: &TruncatedOperator) -> Result<Vec<Complex64>> {
    if op.dim() > MAX_BASIS_SIZE {
        return Err(invalid(format!("basis size {} exceeds {MAX_BASIS_SIZE}", op.dim())));
    }
    let b = op.symbol.b();
    let mut ev = if op.symbol.a() == 1.0 && b.im == 0.0 && b.re > 0.0 {
        gram_factor_spectrum(op)?
    } else {
        let m = SquareMatrix::from_row_major(op.dim(), op.entries.clone());
        eigenvalues(&m)?
    };
    ev.sort_by(|x, y| {
        y.norm()
            .total_cmp(&x.norm())
            .then(x.re.total_cmp(&y.re))
            .then(x.im.total_cmp(&y.im))
    });
    Ok(ev)
}

/// Rows of `B` beyond which the factor must carry no mass.
const FACTOR_TAIL_ROWS: usize = 16;
const FACTOR_MAX_ROWS: usize = 1024;

fn gram_factor_spectrum(op: &TruncatedOperator) -> Result<Vec<Complex64>> {
    let n = op.dim();
    let half = AffineSymbol::new(1.0, op.symbol.b() * 0.5)?;
    let cols = op.basis;
    let mut rows = 2 * n + 32;
    loop {
        let row_basis = LaguerreBasis { scale: cols.scale, size: rows };
        let (factor, _) = integrate_block(&half, &row_basis, &cols)?;
        let total: f64 = factor.iter().map(|z| z.norm_sqr()).sum();
        let tail: f64 = factor[(rows - FACTOR_TAIL_ROWS) * n..].iter().map(|z| z.norm_sqr()).sum();
        if tail <= 1e-28 * total.max(1.0) {
            let real: Vec<f64> = factor.iter().map(|z| z.re).collect();
            let sv = singular_values(rows, n, real)?;
            return Ok(sv.into_iter().map(|s| Complex64::new(s * s, 0.0)).collect());
        }
        if rows >= FACTOR_MAX_ROWS {
            return Err(Error::Numerical(format!(
                "Gram factor still carries mass {tail:e} in its last rows at {rows} rows"
            )));
        }
        rows = (rows * 2).min(FACTOR_MAX_ROWS);
    }
}
