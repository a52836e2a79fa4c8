//! Minimal dense complex linear algebra used by the statevector kernels:
//! a column-major matrix type, Householder QR (for Haar sampling) and a
//! Hermitian eigensolver (Householder tridiagonalization + implicit-shift QL).

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
#[allow(unused_imports)] // float math in no_std graphs; std builds shadow it with inherent methods
use num_traits::Float;

use crate::{Error, Result};

pub const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const C_ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const C_I: Complex64 = Complex64::new(0.0, 1.0);

/// Dense complex matrix, column-major storage.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix { rows, cols, data: vec![C_ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = C_ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = CMatrix::zeros(rows, cols);
        for c in 0..cols {
            for r in 0..rows {
                m.data[c * rows + r] = f(r, c);
            }
        }
        m
    }

    /// Build from a row-major slice (test and fixture convenience).
    pub fn from_row_major(rows: usize, cols: usize, entries: &[Complex64]) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count mismatch");
        CMatrix::from_fn(rows, cols, |r, c| entries[r * cols + c])
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> Complex64 {
        debug_assert!(r < self.rows && c < self.cols);
        self.data[c * self.rows + r]
    }

    #[inline]
    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut Complex64 {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[c * self.rows + r]
    }

    #[inline]
    pub fn col(&self, c: usize) -> &[Complex64] {
        &self.data[c * self.rows..(c + 1) * self.rows]
    }

    #[inline]
    pub fn col_mut(&mut self, c: usize) -> &mut [Complex64] {
        &mut self.data[c * self.rows..(c + 1) * self.rows]
    }

    pub fn scale(&mut self, s: Complex64) {
        for v in &mut self.data {
            *v *= s;
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self.at(i, i)).sum()
    }

    pub fn adjoint(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |r, c| self.at(c, r).conj())
    }

    pub fn mul(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for j in 0..rhs.cols {
            let out_col = &mut out.data[j * self.rows..(j + 1) * self.rows];
            for k in 0..self.cols {
                let b = rhs.at(k, j);
                if b == C_ZERO {
                    continue;
                }
                let a_col = self.col(k);
                for (o, a) in out_col.iter_mut().zip(a_col) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// `self * v`.
    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len(), "matvec shape mismatch");
        let mut out = vec![C_ZERO; self.rows];
        for (k, &b) in v.iter().enumerate() {
            if b == C_ZERO {
                continue;
            }
            for (o, a) in out.iter_mut().zip(self.col(k)) {
                *o += a * b;
            }
        }
        out
    }

    /// `self^dagger * v` without materializing the adjoint.
    pub fn adjoint_matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.rows, v.len(), "matvec shape mismatch");
        (0..self.cols)
            .map(|j| self.col(j).iter().zip(v).map(|(a, b)| a.conj() * b).sum())
            .collect()
    }

    pub fn kron(&self, rhs: &CMatrix) -> CMatrix {
        CMatrix::from_fn(self.rows * rhs.rows, self.cols * rhs.cols, |r, c| {
            self.at(r / rhs.rows, c / rhs.cols) * rhs.at(r % rhs.rows, c % rhs.cols)
        })
    }

    pub fn sub(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut out = self.clone();
        for (o, r) in out.data.iter_mut().zip(&rhs.data) {
            *o -= r;
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum()
    }

    /// Largest entry of `|A - A^dagger|`.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut dev: f64 = 0.0;
        for c in 0..self.cols {
            for r in 0..=c {
                dev = dev.max((self.at(r, c) - self.at(c, r).conj()).norm());
            }
        }
        dev
    }

    /// Largest entry of `|A^dagger A - I|`.
    pub fn unitary_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut dev: f64 = 0.0;
        for i in 0..self.cols {
            for j in i..self.cols {
                let dot: Complex64 =
                    self.col(i).iter().zip(self.col(j)).map(|(a, b)| a.conj() * b).sum();
                let target = if i == j { C_ONE } else { C_ZERO };
                dev = dev.max((dot - target).norm());
            }
        }
        dev
    }
}

fn col_tail_norm(m: &CMatrix, col: usize, from_row: usize) -> f64 {
    m.col(col)[from_row..].iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

#[allow(clippy::needless_range_loop)] // index-coupled column updates
/// Q factor of the Householder QR of `a`, with the phase of each diagonal
/// entry of R folded into the matching column of Q. Applied to a Ginibre
/// matrix this samples the Haar measure exactly.
pub(crate) fn qr_unitary_phase_fixed(mut a: CMatrix) -> CMatrix {
    assert!(a.is_square());
    let d = a.rows;
    let mut betas = vec![0.0_f64; d];
    let mut phases = vec![C_ONE; d];

    for k in 0..d {
        let xnorm = col_tail_norm(&a, k, k);
        if xnorm == 0.0 {
            continue;
        }
        let x0 = a.at(k, k);
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { C_ONE };
        let alpha = -phase * xnorm;
        *a.at_mut(k, k) = x0 - alpha;
        let vnorm_sq: f64 = a.col(k)[k..].iter().map(|v| v.norm_sqr()).sum();
        if vnorm_sq == 0.0 {
            continue;
        }
        let beta = 2.0 / vnorm_sq;
        betas[k] = beta;
        phases[k] = alpha / alpha.norm();

        // reflector v now lives in column k, rows k..; apply to trailing columns
        for j in k + 1..d {
            let (head, tail) = a.data.split_at_mut((k + 1) * d);
            let v = &head[k * d + k..(k + 1) * d];
            let col_j = &mut tail[(j - k - 1) * d + k..(j - k) * d];
            let s: Complex64 = v.iter().zip(col_j.iter()).map(|(vi, aj)| vi.conj() * aj).sum();
            let s = s * beta;
            for (aj, vi) in col_j.iter_mut().zip(v) {
                *aj -= s * vi;
            }
        }
    }

    // accumulate Q = H_0 H_1 ... H_{d-1}; columns < k are untouched by H_k
    let mut q = CMatrix::identity(d);
    for k in (0..d).rev() {
        let beta = betas[k];
        if beta == 0.0 {
            continue;
        }
        let v = &a.col(k)[k..];
        for j in k..d {
            let col_j = &mut q.col_mut(j)[k..];
            let s: Complex64 =
                v.iter().zip(col_j.iter()).map(|(vi, qj)| vi.conj() * qj).sum::<Complex64>() * beta;
            for (qj, vi) in col_j.iter_mut().zip(v) {
                *qj -= s * vi;
            }
        }
    }

    for j in 0..d {
        let p = phases[j];
        for qv in q.col_mut(j) {
            *qv *= p;
        }
    }
    q
}

/// Eigenvalues (ascending) and eigenvectors (matching columns) of a
/// Hermitian matrix.
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

const HERMITIAN_INPUT_TOL: f64 = 1e-8;

pub fn hermitian_eigen(m: &CMatrix) -> Result<HermitianEigen> {
    let (values, vectors) = eigen_impl(m, true)?;
    Ok(HermitianEigen { values, vectors: vectors.expect("vectors requested") })
}

pub fn hermitian_eigenvalues(m: &CMatrix) -> Result<Vec<f64>> {
    Ok(eigen_impl(m, false)?.0)
}

fn eigen_impl(m: &CMatrix, want_vectors: bool) -> Result<(Vec<f64>, Option<CMatrix>)> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch { expected: m.rows(), got: m.cols() });
    }
    let dev = m.hermitian_deviation();
    if dev > HERMITIAN_INPUT_TOL {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let d = m.rows();
    if d == 0 {
        return Ok((Vec::new(), want_vectors.then(|| CMatrix::zeros(0, 0))));
    }
    let mut a = m.clone();
    let mut q = want_vectors.then(|| CMatrix::identity(d));
    let (mut diag, mut sub) = tridiagonalize(&mut a, q.as_mut());
    ql_implicit(&mut diag, &mut sub, q.as_mut())?;

    // sort ascending
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).expect("finite eigenvalues"));
    let values: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let vectors = q.map(|q| {
        let mut sorted = CMatrix::zeros(d, d);
        for (new_c, &old_c) in order.iter().enumerate() {
            sorted.col_mut(new_c).copy_from_slice(q.col(old_c));
        }
        sorted
    });
    Ok((values, vectors))
}

#[allow(clippy::needless_range_loop)] // index-coupled column updates
/// Reduce a Hermitian matrix to a real symmetric tridiagonal one by a unitary
/// similarity (Householder reflectors plus a diagonal phase pass), folding the
/// transform into `q` when present. Returns (diagonal, subdiagonal).
fn tridiagonalize(a: &mut CMatrix, mut q: Option<&mut CMatrix>) -> (Vec<f64>, Vec<f64>) {
    let d = a.rows();
    let mut v = vec![C_ZERO; d];
    let mut p = vec![C_ZERO; d];

    for k in 0..d.saturating_sub(2) {
        let m = d - k - 1; // active block size
        let xnorm = col_tail_norm(a, k, k + 1);
        if xnorm == 0.0 {
            continue;
        }
        let x0 = a.at(k + 1, k);
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { C_ONE };
        let alpha = -phase * xnorm;

        v[..m].copy_from_slice(&a.col(k)[k + 1..]);
        v[0] = x0 - alpha;
        let vnorm_sq: f64 = v[..m].iter().map(|z| z.norm_sqr()).sum();
        if vnorm_sq == 0.0 {
            continue;
        }
        let beta = 2.0 / vnorm_sq;

        // p = beta * B v on the trailing block B = A[k+1.., k+1..]
        for x in p[..m].iter_mut() {
            *x = C_ZERO;
        }
        for j in 0..m {
            let b_col = &a.col(k + 1 + j)[k + 1..];
            let vj = v[j];
            if vj != C_ZERO {
                for (pi, bi) in p[..m].iter_mut().zip(b_col) {
                    *pi += bi * vj;
                }
            }
        }
        for x in p[..m].iter_mut() {
            *x *= beta;
        }
        let kappa: Complex64 = v[..m].iter().zip(&p[..m]).map(|(vi, pi)| vi.conj() * pi).sum();
        let kappa = 0.5 * beta * kappa.re; // v^dag B v is real
        // w = p - kappa v, then B -= v w^dag + w v^dag
        for (pi, vi) in p[..m].iter_mut().zip(&v[..m]) {
            *pi -= kappa * vi;
        }
        for j in 0..m {
            let wj = p[j];
            let vj = v[j];
            let b_col = &mut a.col_mut(k + 1 + j)[k + 1..];
            for ((bi, vi), wi) in b_col.iter_mut().zip(&v[..m]).zip(&p[..m]) {
                *bi -= vi * wj.conj() + wi * vj.conj();
            }
        }
        // write the reduced column/row
        *a.at_mut(k + 1, k) = alpha;
        for i in k + 2..d {
            *a.at_mut(i, k) = C_ZERO;
        }
        *a.at_mut(k, k + 1) = alpha.conj();
        for i in k + 2..d {
            *a.at_mut(k, i) = C_ZERO;
        }
        // Q <- Q P  (columns k+1.. of Q)
        if let Some(q) = q.as_deref_mut() {
            let mut u = vec![C_ZERO; d];
            for j in 0..m {
                let vj = v[j];
                if vj != C_ZERO {
                    for (ui, qi) in u.iter_mut().zip(q.col(k + 1 + j)) {
                        *ui += qi * vj;
                    }
                }
            }
            for j in 0..m {
                let s = beta * v[j].conj();
                let q_col = q.col_mut(k + 1 + j);
                for (qi, ui) in q_col.iter_mut().zip(&u) {
                    *qi -= s * ui;
                }
            }
        }
    }

    // phase pass: rotate the (still complex) subdiagonal onto the real axis
    let mut diag = vec![0.0; d];
    let mut sub = vec![0.0; d.saturating_sub(1)];
    for i in 0..d {
        diag[i] = a.at(i, i).re;
    }
    let mut delta = C_ONE;
    for k in 0..d.saturating_sub(1) {
        let s = a.at(k + 1, k);
        sub[k] = s.norm();
        let next_delta = if sub[k] > 0.0 { delta * (s / sub[k]) } else { delta };
        if let Some(q) = q.as_deref_mut() {
            if next_delta != C_ONE {
                for qv in q.col_mut(k + 1) {
                    *qv *= next_delta;
                }
            }
        }
        delta = next_delta;
    }
    (diag, sub)
}

/// Implicit-shift QL iteration on a real symmetric tridiagonal matrix, with
/// the (real) plane rotations applied to the complex eigenvector columns.
fn ql_implicit(d: &mut [f64], sub: &mut [f64], mut z: Option<&mut CMatrix>) -> Result<()> {
    let n = d.len();
    if n <= 1 {
        return Ok(());
    }
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(sub);

    // norm-scaled absolute floor keeps the local test from stalling on
    // blocks of (near-)zero eigenvalues, e.g. rank-one densities
    let scale = d
        .iter()
        .chain(e.iter())
        .fold(0.0_f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return Ok(());
    }

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * (dd + scale) {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::NoConvergence);
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            let sign_r = if g >= 0.0 { r.abs() } else { -r.abs() };
            g = d[m] - d[l] + e[l] / (g + sign_r);
            let (mut s, mut c) = (1.0_f64, 1.0_f64);
            let mut p = 0.0_f64;
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = z.as_deref_mut() {
                    // real plane rotation applied to the complex columns i, i+1
                    let rows = z.rows;
                    let (lo, hi) = z.data.split_at_mut((i + 1) * rows);
                    let col_i = &mut lo[i * rows..];
                    let col_i1 = &mut hi[..rows];
                    for (zi, zi1) in col_i.iter_mut().zip(col_i1.iter_mut()) {
                        let t = *zi1;
                        *zi1 = *zi * s + t * c;
                        *zi = *zi * c - t * s;
                    }
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    sub.copy_from_slice(&e[..n - 1]);
    Ok(())
}
