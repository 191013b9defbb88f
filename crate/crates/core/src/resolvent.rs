//! Green's function evaluation, resolvent application, the resolvent-difference
//! trace formula, and singular-value profiles of the discretized resolvent.
//!
//! The kernel is semiseparable: `G(x, t) = Phi(x) M^{-1} C Phi^{-1}(t) iB` for
//! `t <= x` and `-Phi(x) M^{-1} D Phi(1) Phi^{-1}(t) iB` above the diagonal,
//! with `M = C + D Phi(1)`.  The Nystrom matvec therefore runs on prefix sums
//! in O(N n^2), which keeps Golub-Kahan iterations cheap even at N = 2048.

use crate::linalg::{c64, tridiag_eigenvalues, C64, CMat, I, ZERO};
use crate::propagator::{fundamental_matrix, StepControl};
use crate::rootfns::GridFn;
use crate::system::DiracBVP;
use crate::{Error, Result};

/// Condition-number cutoff for `C + D Phi(1, lambda)`.
const NEAR_SPECTRUM_COND: f64 = 1e12;
/// Relative determinant cutoff (against column norms) for the same matrix.
const NEAR_SPECTRUM_DET: f64 = 1e-8;

/// Pointwise kernel values at requested (x, t) pairs.
#[derive(Debug, Clone)]
pub struct GreenEvaluation {
    pub lambda: C64,
    pub pairs: Vec<(f64, f64)>,
    pub kernels: Vec<CMat>,
    /// Condition estimate of `C + D Phi(1, lambda)`.
    pub condition: f64,
}

struct KernelFactors {
    /// Phi at each requested abscissa.
    phi: Vec<CMat>,
    phi_inv: Vec<CMat>,
    /// M^{-1} C.
    mc: CMat,
    /// M^{-1} D Phi(1).
    md: CMat,
    ib: CMat,
    condition: f64,
}

fn kernel_factors(bvp: &DiracBVP, lambda: C64, xs: &[f64], ctrl: &StepControl) -> Result<KernelFactors> {
    let mut abscissae: Vec<f64> = xs.to_vec();
    abscissae.push(1.0);
    abscissae.sort_by(|a, b| a.partial_cmp(b).unwrap());
    abscissae.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    let prop = fundamental_matrix(bvp, lambda, &abscissae, ctrl)?;
    let phi1 = prop.at(1.0).ok_or_else(|| Error::Integration("endpoint missing".into()))?.clone();
    let m = bvp.boundary.c.add(&bvp.boundary.d.mul(&phi1));
    let condition = m.cond_estimate();
    // reference scale from the separate summands, so cancellation shows up
    let dphi = bvp.boundary.d.mul(&phi1);
    let col_scale: f64 = (0..m.cols)
        .map(|k| {
            let cn: f64 = (0..m.rows).map(|i| bvp.boundary.c[(i, k)].norm_sqr()).sum::<f64>().sqrt();
            let dn: f64 = (0..m.rows).map(|i| dphi[(i, k)].norm_sqr()).sum::<f64>().sqrt();
            cn.max(dn).max(1e-300)
        })
        .product();
    let det_rel = m.det().norm() / col_scale;
    if !condition.is_finite() || condition > NEAR_SPECTRUM_COND || det_rel < NEAR_SPECTRUM_DET {
        return Err(Error::NearSpectrum(format!(
            "cond(C + D Phi(1)) = {condition:.3e}, relative det = {det_rel:.3e} at lambda = {lambda}"
        )));
    }
    let m_inv = m.inverse()?;
    let mc = m_inv.mul(&bvp.boundary.c);
    let md = m_inv.mul(&bvp.boundary.d).mul(&phi1);
    let ib = bvp.weight.as_matrix().scale(I);
    let mut phi = Vec::with_capacity(xs.len());
    let mut phi_inv = Vec::with_capacity(xs.len());
    for &x in xs {
        let p = prop.at(x).ok_or_else(|| Error::Integration("abscissa missing".into()))?.clone();
        phi_inv.push(p.inverse()?);
        phi.push(p);
    }
    Ok(KernelFactors { phi, phi_inv, mc, md, ib, condition })
}

impl KernelFactors {
    /// Lower branch (t <= x) with indexes into the stored abscissae.
    fn lower(&self, xi: usize, ti: usize) -> CMat {
        self.phi[xi].mul(&self.mc).mul(&self.phi_inv[ti]).mul(&self.ib)
    }

    /// Upper branch (t > x).
    fn upper(&self, xi: usize, ti: usize) -> CMat {
        self.phi[xi].mul(&self.md).mul(&self.phi_inv[ti]).mul(&self.ib).scale(c64(-1.0, 0.0))
    }
}

/// Evaluate the Green kernel at the requested (x, t) pairs; `lambda` must be
/// off the spectrum.  At t = x the lower branch (left limit) is returned.
pub fn green_function(
    bvp: &DiracBVP,
    lambda: C64,
    pairs: &[(f64, f64)],
    ctrl: &StepControl,
) -> Result<GreenEvaluation> {
    let mut xs: Vec<f64> = pairs.iter().flat_map(|&(x, t)| [x, t]).collect();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    let factors = kernel_factors(bvp, lambda, &xs, ctrl)?;
    let index = |v: f64| xs.iter().position(|&w| (w - v).abs() < 1e-15).unwrap();
    let kernels = pairs
        .iter()
        .map(|&(x, t)| {
            if t <= x {
                factors.lower(index(x), index(t))
            } else {
                factors.upper(index(x), index(t))
            }
        })
        .collect();
    Ok(GreenEvaluation { lambda, pairs: pairs.to_vec(), kernels, condition: factors.condition })
}

/// The diagonal jump `G(x, x-0) - G(x, x+0)`, identically `iB`.
pub fn green_jump(bvp: &DiracBVP, lambda: C64, x: f64, ctrl: &StepControl) -> Result<CMat> {
    let factors = kernel_factors(bvp, lambda, &[x], ctrl)?;
    Ok(factors.lower(0, 0).sub(&factors.upper(0, 0)))
}

/// Apply the resolvent by quadrature of the Green kernel against `f` on its
/// own grid: `y(x) = int_0^1 G(x, t) f(t) dt` via trapezoid split at t = x.
pub fn apply_resolvent(bvp: &DiracBVP, lambda: C64, f: &GridFn, ctrl: &StepControl) -> Result<GridFn> {
    let xs = &f.xs;
    let npts = xs.len();
    if npts < 2 {
        return Err(Error::Invalid("resolvent quadrature needs at least 2 nodes".into()));
    }
    let n = bvp.n();
    let factors = kernel_factors(bvp, lambda, xs, ctrl)?;
    // r_j = Phi^{-1}(t_j) iB f_j
    let r: Vec<Vec<C64>> = (0..npts)
        .map(|j| factors.phi_inv[j].mul(&factors.ib).mul_vec(&f.values[j]))
        .collect();
    let mut values = Vec::with_capacity(npts);
    for i in 0..npts {
        // trapezoid on [0, x_i] with the lower branch
        let mut low = vec![ZERO; n];
        for j in 0..=i {
            let w = trapezoid_weight(xs, 0, i, j);
            for comp in 0..n {
                low[comp] += r[j][comp] * w;
            }
        }
        // trapezoid on [x_i, 1] with the upper branch
        let mut up = vec![ZERO; n];
        for j in i..npts {
            let w = trapezoid_weight(xs, i, npts - 1, j);
            for comp in 0..n {
                up[comp] += r[j][comp] * w;
            }
        }
        let yl = factors.phi[i].mul(&factors.mc).mul_vec(&low);
        let yu = factors.phi[i].mul(&factors.md).mul_vec(&up);
        values.push((0..n).map(|comp| yl[comp] - yu[comp]).collect());
    }
    Ok(GridFn { xs: xs.clone(), values })
}

/// Trapezoid weight of node j on the subinterval [x_a, x_b].
fn trapezoid_weight(xs: &[f64], a: usize, b: usize, j: usize) -> f64 {
    if a == b || j < a || j > b {
        return 0.0;
    }
    let left = if j > a { xs[j] - xs[j - 1] } else { 0.0 };
    let right = if j < b { xs[j + 1] - xs[j] } else { 0.0 };
    0.5 * (left + right)
}

/// Trace of the resolvent difference of two problems with the same dimension:
/// `tr int_0^1 [Phi_1 M_1^{-1} C_1 Phi_1^{-1} - Phi_2 M_2^{-1} C_2 Phi_2^{-1}] iB dx`
/// by composite Simpson.
pub fn trace_formula_diff(
    bvp1: &DiracBVP,
    bvp2: &DiracBVP,
    lambda: C64,
    ctrl: &StepControl,
) -> Result<C64> {
    if bvp1.n() != bvp2.n() {
        return Err(Error::Invalid("trace difference needs equal dimensions".into()));
    }
    let m = 512usize; // Simpson nodes (even count of cells)
    let xs: Vec<f64> = (0..=m).map(|i| i as f64 / m as f64).collect();
    let f1 = kernel_factors(bvp1, lambda, &xs, ctrl)?;
    let f2 = kernel_factors(bvp2, lambda, &xs, ctrl)?;
    let h = 1.0 / m as f64;
    let mut total = ZERO;
    for i in 0..=m {
        let w = if i == 0 || i == m {
            h / 3.0
        } else if i % 2 == 1 {
            4.0 * h / 3.0
        } else {
            2.0 * h / 3.0
        };
        let g1 = f1.lower(i, i);
        let g2 = f2.lower(i, i);
        total += (g1.trace() - g2.trace()) * w;
    }
    Ok(total)
}

// ─────────────────────── discretized resolvent s-values ─────────────────────

/// Nystrom discretization of the resolvent kernel with trapezoid weights and
/// the averaged diagonal.  Returns the dense (N n) x (N n) matrix.
pub fn nystrom_matrix(bvp: &DiracBVP, lambda: C64, n_points: usize, ctrl: &StepControl) -> Result<CMat> {
    let nys = NystromOperator::new(bvp, lambda, n_points, ctrl)?;
    let dim = nys.dim();
    let mut k = CMat::zeros(dim, dim);
    for j in 0..dim {
        let mut e = vec![ZERO; dim];
        e[j] = c64(1.0, 0.0);
        let col = nys.apply(&e);
        for i in 0..dim {
            k[(i, j)] = col[i];
        }
    }
    Ok(k)
}

/// Matrix-free Nystrom operator with O(N n^2) matvecs.
pub struct NystromOperator {
    n: usize,
    npts: usize,
    weights: Vec<f64>,
    phi: Vec<CMat>,
    phi_adj: Vec<CMat>,
    r: Vec<CMat>,     // Phi^{-1}(t_j) iB
    r_adj: Vec<CMat>, // adjoints of r
    mc: CMat,
    md: CMat,
    diag_corr: Vec<CMat>, // -w_i iB / 2 at node i
}

impl NystromOperator {
    pub fn new(bvp: &DiracBVP, lambda: C64, n_points: usize, ctrl: &StepControl) -> Result<Self> {
        if n_points < 2 {
            return Err(Error::Invalid("need at least 2 quadrature points".into()));
        }
        let xs: Vec<f64> = (0..n_points).map(|i| i as f64 / (n_points - 1) as f64).collect();
        let factors = kernel_factors(bvp, lambda, &xs, ctrl)?;
        let h = 1.0 / (n_points - 1) as f64;
        let weights: Vec<f64> =
            (0..n_points).map(|i| if i == 0 || i == n_points - 1 { 0.5 * h } else { h }).collect();
        let n = bvp.n();
        let r: Vec<CMat> = (0..n_points).map(|j| factors.phi_inv[j].mul(&factors.ib)).collect();
        let r_adj = r.iter().map(|m| m.adjoint()).collect();
        let phi_adj = factors.phi.iter().map(|m| m.adjoint()).collect();
        let diag_corr = (0..n_points)
            .map(|i| factors.ib.scale(c64(-0.5 * weights[i], 0.0)))
            .collect();
        Ok(Self {
            n,
            npts: n_points,
            weights,
            phi: factors.phi,
            phi_adj,
            r,
            r_adj,
            mc: factors.mc,
            md: factors.md,
            diag_corr,
        })
    }

    pub fn dim(&self) -> usize {
        self.n * self.npts
    }

    /// K v with the averaged-diagonal convention.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let n = self.n;
        let g: Vec<Vec<C64>> = (0..self.npts)
            .map(|j| {
                let vj = &v[j * n..(j + 1) * n];
                let mut w = self.r[j].mul_vec(vj);
                for comp in w.iter_mut() {
                    *comp *= self.weights[j];
                }
                w
            })
            .collect();
        let mut total = vec![ZERO; n];
        for gj in &g {
            for comp in 0..n {
                total[comp] += gj[comp];
            }
        }
        let mut out = vec![ZERO; self.dim()];
        let mut prefix = vec![ZERO; n];
        for i in 0..self.npts {
            for comp in 0..n {
                prefix[comp] += g[i][comp];
            }
            let suffix: Vec<C64> = (0..n).map(|comp| total[comp] - prefix[comp]).collect();
            let low = self.mc.mul_vec(&prefix);
            let up = self.md.mul_vec(&suffix);
            let combined: Vec<C64> = (0..n).map(|comp| low[comp] - up[comp]).collect();
            let yi = self.phi[i].mul_vec(&combined);
            let corr = self.diag_corr[i].mul_vec(&v[i * n..(i + 1) * n]);
            for comp in 0..n {
                out[i * n + comp] = yi[comp] + corr[comp];
            }
        }
        out
    }

    /// K* u.
    pub fn apply_adjoint(&self, u: &[C64]) -> Vec<C64> {
        let n = self.n;
        let p: Vec<Vec<C64>> =
            (0..self.npts).map(|i| self.phi_adj[i].mul_vec(&u[i * n..(i + 1) * n])).collect();
        let mut suffix_all = vec![ZERO; n];
        for pi in &p {
            for comp in 0..n {
                suffix_all[comp] += pi[comp];
            }
        }
        let mc_adj = self.mc.adjoint();
        let md_adj = self.md.adjoint();
        let mut out = vec![ZERO; self.dim()];
        let mut prefix = vec![ZERO; n]; // sum over i < j
        for j in 0..self.npts {
            // i >= j part of the sum
            let suffix: Vec<C64> = (0..n).map(|comp| suffix_all[comp] - prefix[comp]).collect();
            let low = mc_adj.mul_vec(&suffix);
            let up = md_adj.mul_vec(&prefix);
            let combined: Vec<C64> = (0..n).map(|comp| low[comp] - up[comp]).collect();
            let mut yj = self.r_adj[j].mul_vec(&combined);
            for comp in yj.iter_mut() {
                *comp *= self.weights[j];
            }
            let corr = self.diag_corr[j].adjoint().mul_vec(&u[j * n..(j + 1) * n]);
            for comp in 0..n {
                out[j * n + comp] = yj[comp] + corr[comp];
            }
            for comp in 0..n {
                prefix[comp] += p[j][comp];
            }
        }
        out
    }
}

/// Singular values and the per-weight series decomposition.
#[derive(Debug, Clone)]
pub struct SValueProfile {
    pub lambda: C64,
    pub n_points: usize,
    /// Leading singular values, descending.
    pub svalues: Vec<f64>,
    /// One series per weight entry: `series[j][k-1]` is s_{j,k}.
    pub series: Vec<Vec<f64>>,
    /// `s_{j,k} * pi k / |b_j|`, per series.
    pub fit_ratios: Vec<Vec<f64>>,
    /// |b_j| per series.
    pub weights_abs: Vec<f64>,
    /// Per global value: (series index, 1-based position within the series).
    pub assignments: Vec<(usize, usize)>,
}

/// Leading singular values of the discretized resolvent by Golub-Kahan
/// bidiagonalization with full reorthogonalization, partitioned round-robin
/// into n interleaved series by best multiplicative fit to `|b_j| / (pi k)`.
pub fn svalue_profile(
    bvp: &DiracBVP,
    lambda: C64,
    n_points: usize,
    count: usize,
    ctrl: &StepControl,
) -> Result<SValueProfile> {
    if n_points < 256 {
        return Err(Error::Invalid("svalue profile needs N >= 256".into()));
    }
    let op = NystromOperator::new(bvp, lambda, n_points, ctrl)?;
    let dim = op.dim();
    let count = count.min(dim);
    let iters = (6 * count + 40).min(dim);
    let svalues = golub_kahan_svalues(&op, iters, count)?;
    // greedy series assignment
    let weights_abs: Vec<f64> = bvp.weight.entries().iter().map(|b| b.norm()).collect();
    let n_series = weights_abs.len();
    let mut series: Vec<Vec<f64>> = vec![Vec::new(); n_series];
    let mut assignments: Vec<(usize, usize)> = Vec::with_capacity(svalues.len());
    for &s in &svalues {
        let mut best = 0usize;
        let mut best_err = f64::INFINITY;
        for j in 0..n_series {
            let k = series[j].len() + 1;
            let predicted = weights_abs[j] / (std::f64::consts::PI * k as f64);
            let err = (s / predicted).ln().abs();
            if err < best_err {
                best_err = err;
                best = j;
            }
        }
        series[best].push(s);
        assignments.push((best, series[best].len()));
    }
    let fit_ratios: Vec<Vec<f64>> = series
        .iter()
        .enumerate()
        .map(|(j, sj)| {
            sj.iter()
                .enumerate()
                .map(|(i, &s)| s * std::f64::consts::PI * (i + 1) as f64 / weights_abs[j])
                .collect()
        })
        .collect();
    Ok(SValueProfile { lambda, n_points, svalues, series, fit_ratios, weights_abs, assignments })
}

/// Golub-Kahan-Lanczos bidiagonalization with full reorthogonalization;
/// returns the leading `count` singular values.
fn golub_kahan_svalues(op: &NystromOperator, iters: usize, count: usize) -> Result<Vec<f64>> {
    let dim = op.dim();
    let mut v_basis: Vec<Vec<C64>> = Vec::with_capacity(iters);
    let mut u_basis: Vec<Vec<C64>> = Vec::with_capacity(iters);
    let mut alphas: Vec<f64> = Vec::with_capacity(iters);
    let mut betas: Vec<f64> = Vec::with_capacity(iters);
    // deterministic start vector
    let mut state = 0x243F6A8885A308D3u64;
    let mut next = move || {
        state ^= state >> 12;
        state ^= state << 25;
        state ^= state >> 27;
        (state.wrapping_mul(0x2545F4914F6CDD1D) >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    let mut v: Vec<C64> = (0..dim).map(|_| c64(next(), next())).collect();
    normalize(&mut v);
    let reorth = |vec: &mut Vec<C64>, basis: &[Vec<C64>]| {
        for b in basis {
            let proj: C64 = b.iter().zip(vec.iter()).map(|(x, y)| y * x.conj()).sum();
            for (vi, bi) in vec.iter_mut().zip(b) {
                *vi -= proj * bi;
            }
        }
    };
    let mut beta_prev = 0.0f64;
    let mut u_prev: Vec<C64> = vec![ZERO; dim];
    for _ in 0..iters {
        // u = K v - beta_prev * u_prev
        let mut u = op.apply(&v);
        for (ui, pi) in u.iter_mut().zip(&u_prev) {
            *ui -= c64(beta_prev, 0.0) * pi;
        }
        reorth(&mut u, &u_basis);
        reorth(&mut u, &u_basis); // second pass for safety
        let alpha = norm(&u);
        if alpha < 1e-300 {
            break;
        }
        for ui in u.iter_mut() {
            *ui = *ui / alpha;
        }
        v_basis.push(v.clone());
        u_basis.push(u.clone());
        alphas.push(alpha);
        // w = K* u - alpha v
        let mut w = op.apply_adjoint(&u);
        for (wi, vi) in w.iter_mut().zip(&v) {
            *wi -= c64(alpha, 0.0) * vi;
        }
        reorth(&mut w, &v_basis);
        reorth(&mut w, &v_basis);
        let beta = norm(&w);
        if beta < 1e-300 {
            break;
        }
        for wi in w.iter_mut() {
            *wi = *wi / beta;
        }
        betas.push(beta);
        beta_prev = beta;
        u_prev = u;
        v = w;
    }
    let k = alphas.len();
    if k == 0 {
        return Ok(vec![]);
    }
    // A V = U B with B upper bidiagonal (diag alpha_i, superdiag beta_i);
    // T = B^T B is symmetric tridiagonal with diag_i = alpha_i^2 +
    // beta_{i-1}^2 and off_i = alpha_i beta_i
    let mut diag = vec![0.0; k];
    let mut off = vec![0.0; k.saturating_sub(1)];
    for i in 0..k {
        let b_prev = if i == 0 { 0.0 } else { betas[i - 1] };
        diag[i] = alphas[i] * alphas[i] + b_prev * b_prev;
        if i + 1 < k && i < betas.len() {
            off[i] = alphas[i] * betas[i];
        }
    }
    let eigs = tridiag_eigenvalues(&diag, &off);
    Ok(eigs.iter().take(count).map(|&x| x.max(0.0).sqrt()).collect())
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn normalize(v: &mut [C64]) {
    let n = norm(v);
    if n > 0.0 {
        for z in v.iter_mut() {
            *z = *z / n;
        }
    }
}
