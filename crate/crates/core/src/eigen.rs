//! Eigenvalues of dense complex matrices.
//!
//! Householder reduction to upper Hessenberg form followed by single-shift
//! QR sweeps (Wilkinson shift, Givens rotations) with small-subdiagonal
//! deflation. Only eigenvalues are produced, so rotations are applied to the
//! active window only.

use num_complex::Complex64;

use crate::error::{Error, Result};

const MAX_SWEEPS_PER_EIGENVALUE: usize = 200;

/// Dense row-major square matrix view.
#[derive(Debug, Clone)]
pub struct SquareMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl SquareMatrix {
    pub fn from_row_major(n: usize, data: Vec<Complex64>) -> Self {
        assert_eq!(data.len(), n * n, "data length must be n*n");
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    #[inline]
    fn at_mut(&mut self, i: usize, j: usize) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }

    fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// In-place unitary similarity to upper Hessenberg form.
    fn reduce_to_hessenberg(&mut self) {
        let n = self.n;
        if n < 3 {
            return;
        }
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        for k in 0..n - 2 {
            let len = n - k - 1;
            let mut xnorm = 0.0;
            for i in 0..len {
                v[i] = self.at(k + 1 + i, k);
                xnorm += v[i].norm_sqr();
            }
            let xnorm = xnorm.sqrt();
            if xnorm == 0.0 {
                continue;
            }
            let x0 = v[0];
            let phase = if x0.norm() == 0.0 {
                Complex64::new(1.0, 0.0)
            } else {
                x0 / x0.norm()
            };
            let alpha = -phase * xnorm;
            v[0] -= alpha;
            let vnorm = v[..len].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if vnorm == 0.0 {
                continue;
            }
            for z in &mut v[..len] {
                *z /= vnorm;
            }
            // left: H ← (I − 2vv*) H on rows k+1.., all columns from k
            for j in k..n {
                let mut s = Complex64::new(0.0, 0.0);
                for i in 0..len {
                    s += v[i].conj() * self.at(k + 1 + i, j);
                }
                for i in 0..len {
                    let upd = v[i] * s * 2.0;
                    *self.at_mut(k + 1 + i, j) -= upd;
                }
            }
            // right: H ← H (I − 2vv*) on columns k+1..
            for i in 0..n {
                let mut s = Complex64::new(0.0, 0.0);
                for j in 0..len {
                    s += self.at(i, k + 1 + j) * v[j];
                }
                for j in 0..len {
                    let upd = s * v[j].conj() * 2.0;
                    *self.at_mut(i, k + 1 + j) -= upd;
                }
            }
            *self.at_mut(k + 1, k) = alpha;
            for i in k + 2..n {
                *self.at_mut(i, k) = Complex64::new(0.0, 0.0);
            }
        }
    }
}

fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half_tr = (a + d) * 0.5;
    let disc = ((a - d) * 0.5).powu(2) + b * c;
    let root = disc.sqrt();
    let l1 = half_tr + root;
    let l2 = half_tr - root;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// All eigenvalues of `m`, in the order they deflate.
pub fn eigenvalues(m: &SquareMatrix) -> Result<Vec<Complex64>> {
    let n = m.dim();
    let mut h = m.clone();
    if n == 0 {
        return Ok(Vec::new());
    }
    if h.data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Numerical("matrix has non-finite entries".into()));
    }
    h.reduce_to_hessenberg();
    let eps = f64::EPSILON;
    let scale_floor = h.frobenius() * eps;
    let tiny = f64::MIN_POSITIVE;
    let mut out = Vec::with_capacity(n);
    let mut rotations: Vec<(Complex64, Complex64)> = Vec::with_capacity(n);
    let mut hi = n - 1;
    let mut sweeps = 0usize;
    loop {
        // locate the start of the unreduced block ending at hi
        let mut lo = hi;
        while lo > 0 {
            let sub = h.at(lo, lo - 1).norm();
            let local = h.at(lo, lo).norm() + h.at(lo - 1, lo - 1).norm();
            let threshold = if local > 0.0 { eps * local } else { scale_floor };
            if sub <= threshold.max(tiny) {
                *h.at_mut(lo, lo - 1) = Complex64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            out.push(h.at(hi, hi));
            sweeps = 0;
            if hi == 0 {
                break;
            }
            hi -= 1;
            continue;
        }
        sweeps += 1;
        if sweeps > MAX_SWEEPS_PER_EIGENVALUE {
            return Err(Error::Numerical(format!(
                "QR iteration did not converge ({} eigenvalues still coupled)",
                hi + 1
            )));
        }
        let mu = if sweeps.is_multiple_of(11) {
            // exceptional shift to break cycles
            h.at(hi, hi) + Complex64::new(0.75 * h.at(hi, hi - 1).norm(), 0.0)
        } else {
            wilkinson_shift(
                h.at(hi - 1, hi - 1),
                h.at(hi - 1, hi),
                h.at(hi, hi - 1),
                h.at(hi, hi),
            )
        };
        for i in lo..=hi {
            *h.at_mut(i, i) -= mu;
        }
        rotations.clear();
        for k in lo..hi {
            let x = h.at(k, k);
            let y = h.at(k + 1, k);
            let r = x.norm().hypot(y.norm());
            let (c, s) = if r == 0.0 {
                (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
            } else {
                (x / r, y / r)
            };
            rotations.push((c, s));
            for j in k..=hi {
                let top = h.at(k, j);
                let bot = h.at(k + 1, j);
                *h.at_mut(k, j) = c.conj() * top + s.conj() * bot;
                *h.at_mut(k + 1, j) = -s * top + c * bot;
            }
            *h.at_mut(k + 1, k) = Complex64::new(0.0, 0.0);
        }
        for (offset, &(c, s)) in rotations.iter().enumerate() {
            let k = lo + offset;
            let last = (k + 2).min(hi);
            for i in lo..=last {
                let left = h.at(i, k);
                let right = h.at(i, k + 1);
                *h.at_mut(i, k) = left * c + right * s;
                *h.at_mut(i, k + 1) = -left * s.conj() + right * c.conj();
            }
        }
        for i in lo..=hi {
            *h.at_mut(i, i) += mu;
        }
    }
    Ok(out)
}

const MAX_JACOBI_SWEEPS: usize = 60;

/// Singular values of a real `rows × cols` matrix (row-major), descending.
///
/// One-sided Jacobi: column pairs are rotated until mutually orthogonal to
/// working precision, then the column norms are the singular values. Every
/// value is a norm, so none comes out negative.
pub fn singular_values(rows: usize, cols: usize, data: Vec<f64>) -> Result<Vec<f64>> {
    assert_eq!(data.len(), rows * cols, "data length must be rows*cols");
    if data.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numerical("matrix has non-finite entries".into()));
    }
    // column-major copy so rotations touch contiguous memory
    let mut u: Vec<Vec<f64>> = (0..cols)
        .map(|j| (0..rows).map(|i| data[i * cols + j]).collect())
        .collect();
    let eps = f64::EPSILON;
    let mut converged = false;
    for _ in 0..MAX_JACOBI_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let (left, right) = u.split_at_mut(q);
                let (x, y) = (&mut left[p], &mut right[0]);
                let alpha: f64 = x.iter().map(|v| v * v).sum();
                let beta: f64 = y.iter().map(|v| v * v).sum();
                let gamma: f64 = x.iter().zip(y.iter()).map(|(a, b)| a * b).sum();
                if gamma == 0.0 || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for (a, b) in x.iter_mut().zip(y.iter_mut()) {
                    let (xa, yb) = (*a, *b);
                    *a = c * xa - s * yb;
                    *b = s * xa + c * yb;
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Numerical(format!(
            "Jacobi SVD did not converge in {MAX_JACOBI_SWEEPS} sweeps"
        )));
    }
    let mut sv: Vec<f64> = u.iter().map(|col| col.iter().map(|v| v * v).sum::<f64>().sqrt()).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}
