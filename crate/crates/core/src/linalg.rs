//! Small dense complex linear algebra.
//!
//! Problem dimensions here are tiny (n is the system size, typically 1..=8),
//! so everything is hand-rolled: row-major storage, pivoted LU, cofactor
//! adjugates, a cyclic Jacobi eigensolver for Hermitian matrices and an SVD
//! built on it.  The one large-scale kernel (leading singular values of a
//! discretized resolvent) lives in [`crate::resolvent`] on top of the
//! tridiagonal Sturm solver defined at the bottom of this file.

use num_complex::Complex64;

pub type C64 = Complex64;

/// Shorthand complex constructor.
#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub const ONE: C64 = C64::new(1.0, 0.0);
pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

// ───────────────────────────── scaled complex ─────────────────────────────

/// A complex number stored as `mantissa * exp(ln_scale)`.
///
/// The characteristic determinant is an entire function of exponential type;
/// far from the real axis its values overflow f64.  Scans and argument
/// principle quadrature therefore carry values in this form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledC64 {
    pub mantissa: C64,
    pub ln_scale: f64,
}

impl ScaledC64 {
    pub fn new(mantissa: C64, ln_scale: f64) -> Self {
        Self { mantissa, ln_scale }.normalized()
    }

    pub fn from_c64(z: C64) -> Self {
        Self::new(z, 0.0)
    }

    pub fn zero() -> Self {
        Self { mantissa: ZERO, ln_scale: 0.0 }
    }

    fn normalized(self) -> Self {
        let a = self.mantissa.norm();
        if a == 0.0 || !a.is_finite() {
            return Self { mantissa: self.mantissa, ln_scale: 0.0 };
        }
        let ln = a.ln();
        Self { mantissa: self.mantissa / a, ln_scale: self.ln_scale + ln }
    }

    /// Collapse to a plain complex number; may over/underflow.
    pub fn to_c64(self) -> C64 {
        self.mantissa * self.ln_scale.exp()
    }

    /// Natural log of the absolute value (-inf for zero).
    pub fn ln_abs(self) -> f64 {
        if self.mantissa == ZERO { f64::NEG_INFINITY } else { self.ln_scale + self.mantissa.norm().ln() }
    }

    pub fn is_zero(self) -> bool {
        self.mantissa == ZERO
    }

    pub fn mul(self, other: Self) -> Self {
        Self::new(self.mantissa * other.mantissa, self.ln_scale + other.ln_scale)
    }

    pub fn mul_c64(self, z: C64) -> Self {
        Self::new(self.mantissa * z, self.ln_scale)
    }

    /// Multiply by `exp(w)` for complex `w` without forming `exp(w)`.
    pub fn mul_exp(self, w: C64) -> Self {
        let rot = C64::from_polar(1.0, w.im);
        Self::new(self.mantissa * rot, self.ln_scale + w.re)
    }

    pub fn div(self, other: Self) -> Self {
        Self::new(self.mantissa / other.mantissa, self.ln_scale - other.ln_scale)
    }

    pub fn add(self, other: Self) -> Self {
        if self.is_zero() {
            return other;
        }
        if other.is_zero() {
            return self;
        }
        // Rebase onto the larger scale so the shift never overflows.
        let (big, small) = if self.ln_scale >= other.ln_scale { (self, other) } else { (other, self) };
        let shift = (small.ln_scale - big.ln_scale).exp();
        Self::new(big.mantissa + small.mantissa * shift, big.ln_scale)
    }

    pub fn sub(self, other: Self) -> Self {
        self.add(other.mul_c64(-ONE))
    }
}

// ─────────────────────────────── dense matrix ──────────────────────────────

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<C64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn diag(entries: &[C64]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = entries[i];
        }
        m
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let r = rows.len();
        let c = if r > 0 { rows[0].len() } else { 0 };
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Self { rows: r, cols: c, data }
    }

    /// Real matrix helper for tests and fixtures.
    pub fn from_rows_re(rows: &[Vec<f64>]) -> Self {
        let v: Vec<Vec<C64>> = rows.iter().map(|r| r.iter().map(|&x| c64(x, 0.0)).collect()).collect();
        Self::from_rows(&v)
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn col(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_col(&mut self, j: usize, v: &[C64]) {
        assert_eq!(v.len(), self.rows);
        for i in 0..self.rows {
            self[(i, j)] = v[i];
        }
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].conj();
            }
        }
        t
    }

    pub fn conj(&self) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch in mul");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                let lhs = k * other.cols;
                let dst = i * other.cols;
                for j in 0..other.cols {
                    out.data[dst + j] += a * other.data[lhs + j];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len());
        let mut out = vec![ZERO; self.rows];
        for i in 0..self.rows {
            let mut s = ZERO;
            let base = i * self.cols;
            for j in 0..self.cols {
                s += self.data[base + j] * v[j];
            }
            out[i] = s;
        }
        out
    }

    pub fn fro_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.max_norm() <= tol
    }

    /// Hermitian part (A + A*)/2.
    pub fn hermitian_part(&self) -> Self {
        self.add(&self.adjoint()).scale(c64(0.5, 0.0))
    }

    /// Anti-Hermitian part mapped to a Hermitian matrix: (A - A*)/(2i).
    pub fn imag_part(&self) -> Self {
        self.sub(&self.adjoint()).scale(c64(0.0, -0.5))
    }

    pub fn trace(&self) -> C64 {
        assert!(self.is_square());
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    /// Determinant via pivoted LU, in scaled form.
    pub fn det_scaled(&self) -> ScaledC64 {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.data.clone();
        let mut det = ScaledC64::from_c64(ONE);
        for k in 0..n {
            // partial pivot
            let mut p = k;
            let mut best = a[k * n + k].norm();
            for i in k + 1..n {
                let v = a[i * n + k].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 {
                return ScaledC64::zero();
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                det = det.mul_c64(-ONE);
            }
            let piv = a[k * n + k];
            det = det.mul(ScaledC64::from_c64(piv));
            for i in k + 1..n {
                let f = a[i * n + k] / piv;
                if f == ZERO {
                    continue;
                }
                a[i * n + k] = ZERO;
                for j in k + 1..n {
                    let t = f * a[k * n + j];
                    a[i * n + j] -= t;
                }
            }
        }
        det
    }

    pub fn det(&self) -> C64 {
        self.det_scaled().to_c64()
    }

    /// Solve A X = B via pivoted LU. Errors on an exactly singular pivot.
    pub fn solve(&self, rhs: &CMat) -> Result<CMat, crate::Error> {
        assert!(self.is_square());
        assert_eq!(self.rows, rhs.rows);
        let n = self.rows;
        let m = rhs.cols;
        let mut a = self.data.clone();
        let mut b = rhs.data.clone();
        for k in 0..n {
            let mut p = k;
            let mut best = a[k * n + k].norm();
            for i in k + 1..n {
                let v = a[i * n + k].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 {
                return Err(crate::Error::Singular(format!("zero pivot at column {k}")));
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                for j in 0..m {
                    b.swap(k * m + j, p * m + j);
                }
            }
            let piv = a[k * n + k];
            for i in k + 1..n {
                let f = a[i * n + k] / piv;
                if f == ZERO {
                    continue;
                }
                for j in k + 1..n {
                    let t = f * a[k * n + j];
                    a[i * n + j] -= t;
                }
                for j in 0..m {
                    let t = f * b[k * m + j];
                    b[i * m + j] -= t;
                }
            }
        }
        for k in (0..n).rev() {
            let piv = a[k * n + k];
            for j in 0..m {
                let mut s = b[k * m + j];
                for l in k + 1..n {
                    s -= a[k * n + l] * b[l * m + j];
                }
                b[k * m + j] = s / piv;
            }
        }
        Ok(CMat { rows: n, cols: m, data: b })
    }

    pub fn solve_vec(&self, rhs: &[C64]) -> Result<Vec<C64>, crate::Error> {
        let b = CMat { rows: rhs.len(), cols: 1, data: rhs.to_vec() };
        Ok(self.solve(&b)?.data)
    }

    pub fn inverse(&self) -> Result<CMat, crate::Error> {
        self.solve(&CMat::identity(self.rows))
    }

    /// Classical adjugate via cofactors: `A adj(A) = det(A) I`.
    ///
    /// Cofactor expansion is O(n^5) but exact in structure, which matters
    /// because the adjugate is evaluated near points where A is singular.
    pub fn adjugate(&self) -> CMat {
        assert!(self.is_square());
        let n = self.rows;
        if n == 1 {
            return CMat::identity(1);
        }
        let mut adj = CMat::zeros(n, n);
        let mut minor = CMat::zeros(n - 1, n - 1);
        for i in 0..n {
            for j in 0..n {
                let mut mi = 0;
                for r in 0..n {
                    if r == i {
                        continue;
                    }
                    let mut mj = 0;
                    for c in 0..n {
                        if c == j {
                            continue;
                        }
                        minor[(mi, mj)] = self[(r, c)];
                        mj += 1;
                    }
                    mi += 1;
                }
                let sign = if (i + j) % 2 == 0 { ONE } else { -ONE };
                // adj = C^T where C is the cofactor matrix
                adj[(j, i)] = sign * minor.det();
            }
        }
        adj
    }

    /// Rough condition estimate ||A||_F ||A^{-1}||_F.
    pub fn cond_estimate(&self) -> f64 {
        match self.inverse() {
            Ok(inv) => self.fro_norm() * inv.fro_norm(),
            Err(_) => f64::INFINITY,
        }
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

// ─────────────────────────── Hermitian eigensolver ─────────────────────────

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in descending order with the unitary matrix of
/// eigenvectors as columns: `A = V diag(w) V*`.
pub fn hermitian_eigen(a: &CMat) -> (Vec<f64>, CMat) {
    assert!(a.is_square());
    let n = a.rows;
    let mut m = a.clone();
    // enforce exact Hermiticity of the working copy
    for i in 0..n {
        m[(i, i)] = c64(m[(i, i)].re, 0.0);
        for j in i + 1..n {
            let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
    }
    let mut v = CMat::identity(n);
    let tol = 1e-15 * m.fro_norm().max(f64::MIN_POSITIVE);
    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                off = off.max(m[(i, j)].norm());
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq.norm() <= tol * 1e-2 {
                    continue;
                }
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                // Unitary rotation zeroing the (p,q) entry:
                // work with the phase of apq so the core rotation is real.
                let phase = apq / apq.norm();
                let tau = (aqq - app) / (2.0 * apq.norm());
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // G acts on columns p,q: col_p' = c col_p - s conj(phase) col_q
                //                        col_q' = s phase col_p + c col_q
                let (cp, sp) = (c64(c, 0.0), phase.conj() * s);
                let (sq, cq) = (phase * s, c64(c, 0.0));
                for i in 0..n {
                    let aip = m[(i, p)];
                    let aiq = m[(i, q)];
                    m[(i, p)] = aip * cp - aiq * sp;
                    m[(i, q)] = aip * sq + aiq * cq;
                }
                for j in 0..n {
                    let apj = m[(p, j)];
                    let aqj = m[(q, j)];
                    m[(p, j)] = cp.conj() * apj - sp.conj() * aqj;
                    m[(q, j)] = sq.conj() * apj + cq.conj() * aqj;
                }
                for i in 0..n {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = vip * cp - viq * sp;
                    v[(i, q)] = vip * sq + viq * cq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let w: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    order.sort_by(|&i, &j| w[j].partial_cmp(&w[i]).unwrap());
    let ws: Vec<f64> = order.iter().map(|&i| w[i]).collect();
    let mut vs = CMat::zeros(n, n);
    for (newj, &oldj) in order.iter().enumerate() {
        for i in 0..n {
            vs[(i, newj)] = v[(i, oldj)];
        }
    }
    (ws, vs)
}

/// Singular value decomposition of a (small) complex matrix.
///
/// Returns `(u, s, v)` with `a = u diag(s) v*`, singular values descending.
/// `u` is rows x k and `v` is cols x k with k = min(rows, cols).
pub fn svd(a: &CMat) -> (CMat, Vec<f64>, CMat) {
    let (m, n) = (a.rows, a.cols);
    if m >= n {
        let h = a.adjoint().mul(a); // n x n
        let (w, v) = hermitian_eigen(&h);
        let s: Vec<f64> = w.iter().map(|&x| x.max(0.0).sqrt()).collect();
        let av = a.mul(&v);
        let mut u = CMat::zeros(m, n);
        for j in 0..n {
            if s[j] > 1e-300 {
                for i in 0..m {
                    u[(i, j)] = av[(i, j)] / s[j];
                }
            }
        }
        (u, s, v)
    } else {
        let (v, s, u) = svd(&a.adjoint());
        (u, s, v)
    }
}

/// The Gram route resolves singular values only down to sqrt(eps) relative;
/// rank thresholds are floored here.
const GRAM_SIGMA_FLOOR: f64 = 1e-7;

/// Orthonormal basis of the null space of `a` relative to `rel_tol * s_max`.
///
/// Works on the full Gram matrix `A* A`, so wide matrices report their entire
/// null space (the economy SVD would not).
pub fn null_space(a: &CMat, rel_tol: f64) -> CMat {
    let h = a.adjoint().mul(a); // cols x cols
    let (w, v) = hermitian_eigen(&h);
    let wmax = w.first().copied().unwrap_or(0.0).max(0.0);
    let thresh_w = wmax.max(f64::MIN_POSITIVE) * rel_tol.max(GRAM_SIGMA_FLOOR).powi(2);
    let keep: Vec<usize> = (0..w.len()).filter(|&j| w[j] <= thresh_w).collect();
    let mut out = CMat::zeros(a.cols, keep.len());
    for (newj, &j) in keep.iter().enumerate() {
        for i in 0..a.cols {
            out[(i, newj)] = v[(i, j)];
        }
    }
    out
}

/// Numerical rank relative to the largest singular value.
pub fn rank(a: &CMat, rel_tol: f64) -> usize {
    let g = if a.rows >= a.cols { a.adjoint().mul(a) } else { a.mul(&a.adjoint()) };
    let (w, _) = hermitian_eigen(&g);
    let wmax = w.first().copied().unwrap_or(0.0).max(0.0);
    let thresh_w = wmax.max(f64::MIN_POSITIVE) * rel_tol.max(GRAM_SIGMA_FLOOR).powi(2);
    w.iter().filter(|&&x| x > thresh_w).count()
}

// ────────────────────────────── matrix exponential ─────────────────────────

/// exp(A) by scaling-and-squaring with a Taylor core.
///
/// Diagonal matrices take the exact entrywise path, which keeps zero-potential
/// propagation at machine precision.
pub fn expm(a: &CMat) -> CMat {
    assert!(a.is_square());
    let n = a.rows;
    let mut diagonal = true;
    'outer: for i in 0..n {
        for j in 0..n {
            if i != j && a[(i, j)] != ZERO {
                diagonal = false;
                break 'outer;
            }
        }
    }
    if diagonal {
        let mut e = CMat::zeros(n, n);
        for i in 0..n {
            e[(i, i)] = a[(i, i)].exp();
        }
        return e;
    }
    let norm = a.max_norm() * n as f64;
    let s = if norm > 0.25 { (norm / 0.25).log2().ceil() as i32 } else { 0 };
    let t = a.scale(c64(0.5f64.powi(s), 0.0));
    // Taylor to order 20; with ||T|| <= 0.25 the tail is below eps.
    let mut result = CMat::identity(n);
    let mut term = CMat::identity(n);
    for k in 1..=20 {
        term = term.mul(&t).scale(c64(1.0 / k as f64, 0.0));
        result = result.add(&term);
        if term.max_norm() < 1e-18 * result.max_norm() {
            break;
        }
    }
    for _ in 0..s {
        result = result.mul(&result);
    }
    result
}

// ──────────────────────── tridiagonal eigenvalues (Sturm) ───────────────────

/// Count eigenvalues of a symmetric tridiagonal matrix strictly less than x
/// via the Sturm sequence of the LDL^T pivots.
pub fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let n = diag.len();
    let mut count = 0usize;
    let mut q = 1.0f64;
    for i in 0..n {
        let offsq = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] };
        q = diag[i] - x - if i == 0 { 0.0 } else { offsq / q };
        if q == 0.0 {
            q = -1e-300;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// All eigenvalues of a symmetric tridiagonal matrix, descending, by bisection.
pub fn tridiag_eigenvalues(diag: &[f64], off: &[f64]) -> Vec<f64> {
    let n = diag.len();
    if n == 0 {
        return vec![];
    }
    // Gershgorin interval
    let mut lo = f64::MAX;
    let mut hi = f64::MIN;
    for i in 0..n {
        let r = (if i > 0 { off[i - 1].abs() } else { 0.0 }) + (if i + 1 < n { off[i].abs() } else { 0.0 });
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    let span = (hi - lo).max(1e-300);
    let (lo, hi) = (lo - 1e-12 * span, hi + 1e-12 * span);
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        // k-th largest: exactly n-k-1 eigenvalues strictly above it
        let target = n - k; // want count of eigenvalues < x to reach target at upper side
        let (mut a, mut b) = (lo, hi);
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if sturm_count(diag, off, mid) >= target {
                b = mid;
            } else {
                a = mid;
            }
            if b - a <= 1e-15 * span.max(a.abs().max(b.abs())) {
                break;
            }
        }
        out.push(0.5 * (a + b));
    }
    out
}
