//! Fundamental matrix propagation and the characteristic determinant.
//!
//! The system is `Phi' = i B (lambda I - Q(x)) Phi`, `Phi(0) = I`.  Zero,
//! constant, and stepwise potentials propagate by exact matrix exponentials;
//! linearly interpolated grid potentials use a classical fourth-order
//! one-step method with step counts that keep the phase per step bounded.
//!
//! Far from the real axis the raw columns of `Phi` all align with the
//! fastest-growing mode and `det(C + D Phi(1))` dies of cancellation, so the
//! state is carried in continuously orthonormalized form `Phi = Q diag(e^s)
//! R` and the determinant is assembled column-scaled and returned as a
//! [`ScaledC64`] by the scan-safe entry point.

use crate::asymptotics::SectorModel;
use crate::linalg::{c64, expm, C64, CMat, ScaledC64, ONE, ZERO};
use crate::sectors::Sector;
use crate::system::{BoundaryPair, DiracBVP, Interp, PotentialField, PotentialKind, WeightMatrix};
use crate::{Error, Result};

use std::f64::consts::PI;

/// Dimension cap for the exact per-cell exponential of step potentials.
const EXPM_MAX_N: usize = 8;
/// Log-spread of the growth rates per exponential piece.  One exponential
/// mixing modes e^{+g} and e^{-g} computes the decaying ones with absolute
/// error eps * e^{+g}; keeping the per-piece spread small and renormalizing
/// columns between pieces keeps every column accurate in the relative sense.
const PIECE_LN_CAP: f64 = 16.0;
/// One-step matrices folded into the QR frame per refactorization.
const RESCALE_EVERY: usize = 16;

/// Step-count policy for the one-step integrator.
#[derive(Debug, Clone, Copy)]
pub struct StepControl {
    /// Steps per unit interval at lambda = 0; grows with `|lambda| max|b_j|`.
    pub base_steps: usize,
    /// Hard cap on total steps for one propagation.
    pub max_steps: usize,
    /// Compute a Richardson error estimate alongside (doubles the work).
    pub estimate_error: bool,
}

impl Default for StepControl {
    fn default() -> Self {
        Self { base_steps: 512, max_steps: 4_000_000, estimate_error: false }
    }
}

impl StepControl {
    /// Total steps over [0, 1]: `base * ceil(1 + |lambda| max|b_j| / pi)`,
    /// keeping the phase advance per step below roughly `pi / base`.
    pub fn steps_for(&self, lambda: C64, b: &WeightMatrix) -> usize {
        let phase = lambda.norm() * b.max_abs() / PI;
        self.base_steps.max(16) * (1.0 + phase).ceil() as usize
    }
}

/// Integration statistics attached to a propagation.
#[derive(Debug, Clone, Copy, Default)]
pub struct StepStats {
    pub steps: usize,
    /// Richardson estimate of the relative error at the final point, when
    /// requested; NaN otherwise.
    pub error_estimate: f64,
}

/// Householder QR of a square complex matrix: `a = q r` with unitary q and
/// upper-triangular r.
fn qr_decompose(a: &CMat) -> (CMat, CMat) {
    let n = a.rows;
    let mut r = a.clone();
    let mut q = CMat::identity(n);
    for k in 0..n {
        // Householder vector for column k below the diagonal
        let mut norm_sq = 0.0f64;
        for i in k..n {
            norm_sq += r[(i, k)].norm_sqr();
        }
        let norm = norm_sq.sqrt();
        if norm < 1e-300 {
            continue;
        }
        let pivot = r[(k, k)];
        let alpha = if pivot == ZERO { c64(-norm, 0.0) } else { -(pivot / pivot.norm()) * norm };
        let mut v: Vec<C64> = (k..n).map(|i| r[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm_sq: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm_sq < 1e-300 {
            continue;
        }
        // apply H = I - 2 v v* / (v* v) to r (left) and accumulate into q
        for col in k..n {
            let mut dot = ZERO;
            for (i, vi) in v.iter().enumerate() {
                dot += vi.conj() * r[(k + i, col)];
            }
            let f = dot * (2.0 / vnorm_sq);
            for (i, vi) in v.iter().enumerate() {
                let t = f * vi;
                r[(k + i, col)] -= t;
            }
        }
        for col in 0..n {
            let mut dot = ZERO;
            for (i, vi) in v.iter().enumerate() {
                dot += vi.conj() * q[(col, k + i)].conj();
            }
            // q <- q H (H Hermitian): row-wise update of q's columns k..n
            let f = dot.conj() * (2.0 / vnorm_sq);
            for (i, vi) in v.iter().enumerate() {
                let t = f * vi.conj();
                q[(col, k + i)] -= t;
            }
        }
        r[(k, k)] = alpha;
        for i in k + 1..n {
            r[(i, k)] = ZERO;
        }
    }
    (q, r)
}

/// Fundamental-matrix state in continuously orthonormalized form:
/// `Phi = q diag(e^sigma) r` with unitary q and a row-normalized
/// upper-triangular r.  Orthonormalization keeps the subdominant solution
/// directions resolvable far from the real axis, where every raw column of
/// Phi collapses onto the fastest-growing mode.
#[derive(Debug, Clone)]
struct QrState {
    q: CMat,
    sigma: Vec<f64>,
    r: CMat,
}

impl QrState {
    fn identity(n: usize) -> Self {
        Self { q: CMat::identity(n), sigma: vec![0.0; n], r: CMat::identity(n) }
    }

    /// Left-multiply the state by a (nonsingular) step matrix and refold.
    fn apply_left(&mut self, s: &CMat) {
        let n = self.q.rows;
        let a = s.mul(&self.q);
        let (q_new, r_step) = qr_decompose(&a);
        // b = r_step diag(e^sigma), row-rescaled in the log domain
        let mut sigma_new = vec![f64::NEG_INFINITY; n];
        for i in 0..n {
            for k in i..n {
                let v = r_step[(i, k)].norm();
                if v > 0.0 {
                    sigma_new[i] = sigma_new[i].max(v.ln() + self.sigma[k]);
                }
            }
        }
        let mut b_hat = CMat::zeros(n, n);
        for i in 0..n {
            if sigma_new[i] == f64::NEG_INFINITY {
                sigma_new[i] = 0.0;
                continue;
            }
            for k in i..n {
                let v = r_step[(i, k)];
                if v != ZERO {
                    b_hat[(i, k)] = v * (v.norm().ln() + self.sigma[k] - sigma_new[i]).exp() / v.norm();
                }
            }
        }
        let mut r_new = b_hat.mul(&self.r);
        // renormalize rows of the accumulated triangular factor
        for i in 0..n {
            let mx = (0..n).map(|k| r_new[(i, k)].norm()).fold(0.0f64, f64::max);
            if mx > 0.0 && mx.is_finite() && mx.ln().abs() > 1.0 {
                for k in 0..n {
                    r_new[(i, k)] = r_new[(i, k)] / mx;
                }
                sigma_new[i] += mx.ln();
            }
        }
        self.q = q_new;
        self.sigma = sigma_new;
        self.r = r_new;
    }

    /// Collapse to a plain matrix (may overflow for extreme scales).
    fn collapse(&self) -> CMat {
        let n = self.q.rows;
        let mut scaled_r = self.r.clone();
        for i in 0..n {
            let f = self.sigma[i].exp();
            for k in 0..n {
                scaled_r[(i, k)] = scaled_r[(i, k)] * f;
            }
        }
        self.q.mul(&scaled_r)
    }
}

/// `A(x) = i B (lambda I - Q(x))`.
fn system_matrix(b: &WeightMatrix, lambda: C64, q: &CMat) -> CMat {
    let n = b.n();
    let mut a = CMat::zeros(n, n);
    for j in 0..n {
        let ib = c64(0.0, 1.0) * b.entry(j);
        for k in 0..n {
            let lam = if j == k { lambda } else { ZERO };
            a[(j, k)] = ib * (lam - q[(j, k)]);
        }
    }
    a
}

/// Advance the state by exp(len * A), subdividing so no piece spreads more
/// than `PIECE_LN_CAP` in log and refolding the QR frame between pieces.
fn apply_expm_piece(state: &mut QrState, a: &CMat, len: f64, growth_ln: f64) {
    let pieces = (growth_ln / PIECE_LN_CAP).ceil().max(1.0) as usize;
    let e = expm(&a.scale(c64(len / pieces as f64, 0.0)));
    for _ in 0..pieces {
        state.apply_left(&e);
    }
}

/// Spread of the modal growth rates of `i B (lambda - Q)` over a segment.
fn growth_spread(b: &WeightMatrix, lambda: C64, q_norm: f64, len: f64) -> f64 {
    let mut hi = f64::NEG_INFINITY;
    let mut lo = f64::INFINITY;
    for &bj in b.entries() {
        let g = (c64(0.0, 1.0) * bj * lambda).re;
        hi = hi.max(g);
        lo = lo.min(g);
    }
    ((hi - lo) + 2.0 * b.max_abs() * q_norm) * len
}

/// The linear map of one RK4 step of `Phi' = A(x) Phi`: the update applied
/// to an arbitrary state is `S Phi` with S built on the identity.
fn rk4_step_matrix(b: &WeightMatrix, lambda: C64, q: &PotentialField, x: f64, h: f64) -> CMat {
    let n = b.n();
    let a1 = system_matrix(b, lambda, &q.eval(x));
    let a2 = system_matrix(b, lambda, &q.eval(x + 0.5 * h));
    let a4 = system_matrix(b, lambda, &q.eval(x + h));
    let eye = CMat::identity(n);
    let k1 = a1;
    let k2 = a2.mul(&eye.add(&k1.scale(c64(0.5 * h, 0.0))));
    let k3 = a2.mul(&eye.add(&k2.scale(c64(0.5 * h, 0.0))));
    let k4 = a4.mul(&eye.add(&k3.scale(c64(h, 0.0))));
    eye.add(
        &k1.add(&k2.scale(c64(2.0, 0.0)))
            .add(&k3.scale(c64(2.0, 0.0)))
            .add(&k4)
            .scale(c64(h / 6.0, 0.0)),
    )
}

/// Propagate the column-scaled fundamental matrix, recording the state at
/// each requested abscissa (which must be sorted ascending within [0, 1]).
fn propagate(
    bvp: &DiracBVP,
    lambda: C64,
    x_points: &[f64],
    ctrl: &StepControl,
) -> Result<(Vec<QrState>, usize)> {
    let n = bvp.n();
    let b = &bvp.weight;
    let q = &bvp.potential;
    for w in x_points.windows(2) {
        if w[1] < w[0] {
            return Err(Error::Invalid("x_points must be ascending".into()));
        }
    }
    if x_points.iter().any(|&x| !(0.0..=1.0).contains(&x)) {
        return Err(Error::Invalid("x_points must lie in [0, 1]".into()));
    }

    let exact_cells: Option<Vec<(f64, f64)>> = match &q.kind {
        PotentialKind::Zero | PotentialKind::Constant(_) => Some(vec![(0.0, 1.0)]),
        PotentialKind::Grid { samples, interp: Interp::Step } if n <= EXPM_MAX_N => {
            let m = samples.len() - 1;
            Some((0..m).map(|i| (i as f64 / m as f64, (i + 1) as f64 / m as f64)).collect())
        }
        _ => None,
    };

    let mut out: Vec<QrState> = Vec::with_capacity(x_points.len());
    let mut state = QrState::identity(n);
    let mut steps_taken = 0usize;

    if let Some(cells) = exact_cells {
        // Piecewise-constant coefficient: per-cell matrix exponentials.
        let mut targets = x_points.iter().copied().peekable();
        while let Some(&t) = targets.peek() {
            if t <= 0.0 {
                out.push(state.clone());
                targets.next();
            } else {
                break;
            }
        }
        for &(x0, x1) in &cells {
            let qc = q.eval(0.5 * (x0 + x1));
            let a = system_matrix(b, lambda, &qc);
            let qnorm = qc.max_norm() * n as f64;
            // stop inside the cell at every requested point
            let mut from = x0;
            while let Some(&t) = targets.peek() {
                if t > x1 + 1e-15 {
                    break;
                }
                let len = (t - from).max(0.0);
                if len > 0.0 {
                    let g = growth_spread(b, lambda, qnorm, len);
                    apply_expm_piece(&mut state, &a, len, g);
                }
                out.push(state.clone());
                from = t;
                targets.next();
            }
            if x1 - from > 1e-15 {
                let len = x1 - from;
                let g = growth_spread(b, lambda, qnorm, len);
                apply_expm_piece(&mut state, &a, len, g);
            }
            steps_taken += 1;
            if targets.peek().is_none() {
                break;
            }
        }
        return Ok((out, steps_taken));
    }

    // One-step integration on segments split at potential breakpoints and at
    // the requested abscissae, so discontinuities never sit inside a step.
    let cells = q.cells();
    let mut breaks: Vec<f64> = (0..=cells).map(|i| i as f64 / cells as f64).collect();
    breaks.extend_from_slice(x_points);
    breaks.push(0.0);
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    let x_max = x_points.last().copied().unwrap_or(1.0);

    let total = ctrl.steps_for(lambda, b);
    if total > ctrl.max_steps {
        return Err(Error::Integration(format!(
            "needs {total} steps for |lambda| = {:.3e}, cap is {}",
            lambda.norm(),
            ctrl.max_steps
        )));
    }
    let mut targets = x_points.iter().copied().peekable();
    while let Some(&t) = targets.peek() {
        if t <= 0.0 {
            out.push(state.clone());
            targets.next();
        } else {
            break;
        }
    }
    // fold RK4 step matrices into the QR state every few steps: one QR per
    // RESCALE_EVERY steps keeps the cost down while the product stays tame
    let mut pending = CMat::identity(n);
    let mut pending_steps = 0usize;
    for w in breaks.windows(2) {
        let (x0, x1) = (w[0], w[1]);
        if x0 >= x_max || x1 <= x0 {
            continue;
        }
        let x1 = x1.min(x_max);
        let len = x1 - x0;
        let sub = ((total as f64) * len).ceil().max(1.0) as usize;
        let h = len / sub as f64;
        for s in 0..sub {
            pending = rk4_step_matrix(b, lambda, q, x0 + s as f64 * h, h).mul(&pending);
            steps_taken += 1;
            pending_steps += 1;
            if pending_steps >= RESCALE_EVERY {
                state.apply_left(&pending);
                pending = CMat::identity(n);
                pending_steps = 0;
            }
        }
        if pending_steps > 0 {
            state.apply_left(&pending);
            pending = CMat::identity(n);
            pending_steps = 0;
        }
        while let Some(&t) = targets.peek() {
            if (t - x1).abs() < 1e-14 {
                out.push(state.clone());
                targets.next();
            } else {
                break;
            }
        }
    }
    Ok((out, steps_taken))
}

/// Fundamental matrix values at the requested abscissae.
#[derive(Debug, Clone)]
pub struct Propagation {
    pub lambda: C64,
    pub x_points: Vec<f64>,
    pub matrices: Vec<CMat>,
    pub stats: StepStats,
}

impl Propagation {
    /// Matrix at an abscissa recorded in `x_points`.
    pub fn at(&self, x: f64) -> Option<&CMat> {
        self.x_points.iter().position(|&t| (t - x).abs() < 1e-14).map(|i| &self.matrices[i])
    }
}

/// Solve `Phi' = i B (lambda - Q(x)) Phi`, `Phi(0) = I`, recording `Phi` at
/// each point of `x_points` (ascending, within [0, 1]).
pub fn fundamental_matrix(
    bvp: &DiracBVP,
    lambda: C64,
    x_points: &[f64],
    ctrl: &StepControl,
) -> Result<Propagation> {
    let (states, steps) = propagate(bvp, lambda, x_points, ctrl)?;
    let matrices: Vec<CMat> = states.iter().map(|s| s.collapse()).collect();
    let mut stats = StepStats { steps, error_estimate: f64::NAN };
    if ctrl.estimate_error && !x_points.is_empty() {
        let coarse = StepControl { base_steps: (ctrl.base_steps / 2).max(16), ..*ctrl };
        if let Ok((cstates, _)) = propagate(bvp, lambda, &[*x_points.last().unwrap()], &coarse) {
            if let (Some(fine), Some(c)) = (matrices.last(), cstates.last()) {
                let diff = fine.sub(&c.collapse()).max_norm();
                stats.error_estimate = diff / 15.0 / fine.max_norm().max(1e-300);
            }
        }
    }
    Ok(Propagation { lambda, x_points: x_points.to_vec(), matrices, stats })
}

/// Assemble `det(C + D Phi(1))` from the orthonormalized state:
/// with `Phi = Q diag(e^sigma) R`,
/// `Delta = det(C R^{-1} diag(e^{-sigma}) + D Q) * prod e^{sigma} * det(R)`,
/// evaluated with per-column log scaling so nothing overflows and the
/// subdominant directions never cancel against the dominant ones.
fn det_from_scaled(pair: &BoundaryPair, phi1: &QrState) -> ScaledC64 {
    let n = pair.n();
    let r_inv = match phi1.r.inverse() {
        Ok(inv) => inv,
        Err(_) => return ScaledC64::zero(),
    };
    let w = pair.c.mul(&r_inv);
    let dq = pair.d.mul(&phi1.q);
    let mut m = CMat::zeros(n, n);
    let mut ln_total = 0.0f64;
    for k in 0..n {
        let wnorm: f64 = (0..n).map(|i| w[(i, k)].norm()).fold(0.0, f64::max);
        let dnorm: f64 = (0..n).map(|i| dq[(i, k)].norm()).fold(0.0, f64::max);
        let ln_w = if wnorm > 0.0 { wnorm.ln() - phi1.sigma[k] } else { f64::NEG_INFINITY };
        let ln_d = if dnorm > 0.0 { dnorm.ln() } else { f64::NEG_INFINITY };
        let ln_s = ln_w.max(ln_d);
        if ln_s == f64::NEG_INFINITY {
            return ScaledC64::zero(); // entire column is zero
        }
        ln_total += ln_s + phi1.sigma[k];
        let fw = (-phi1.sigma[k] - ln_s).exp(); // may underflow, harmlessly
        let fd = (-ln_s).exp();
        for i in 0..n {
            m[(i, k)] = w[(i, k)] * fw + dq[(i, k)] * fd;
        }
    }
    let det = m.det_scaled();
    let det_r = phi1.r.det_scaled();
    let combined = det.mul(det_r);
    ScaledC64::new(combined.mantissa, combined.ln_scale + ln_total)
}

/// Characteristic determinant in scaled form, safe arbitrarily far from the
/// real axis.
pub fn char_determinant_scaled(bvp: &DiracBVP, lambda: C64, ctrl: &StepControl) -> Result<ScaledC64> {
    let (states, _) = propagate(bvp, lambda, &[1.0], ctrl)?;
    Ok(det_from_scaled(&bvp.boundary, &states[0]))
}

/// `Delta(lambda) = det(C + D Phi(1, lambda))`.
pub fn char_determinant(bvp: &DiracBVP, lambda: C64, ctrl: &StepControl) -> Result<C64> {
    Ok(char_determinant_scaled(bvp, lambda, ctrl)?.to_c64())
}

/// Sector-scaled determinant `Delta(lambda) e^{-i tau_p lambda} / gamma_p`,
/// bounded along rays inside the sector; `lambda` must lie in the sector.
pub fn scaled_determinant(
    bvp: &DiracBVP,
    lambda: C64,
    sector: &Sector,
    model: &SectorModel,
    ctrl: &StepControl,
) -> Result<C64> {
    if !sector.contains(lambda) {
        return Err(Error::SectorMismatch(format!(
            "lambda = {lambda} is not strictly inside sector {}",
            sector.index
        )));
    }
    let delta = char_determinant_scaled(bvp, lambda, ctrl)?;
    let expo = -c64(0.0, 1.0) * model.tau * lambda;
    let gamma_inv = ScaledC64::from_c64(ONE).div(ScaledC64::from_c64(model.gamma));
    Ok(delta.mul_exp(expo).mul(gamma_inv).to_c64())
}

/// The gauge transform data: `W` on a grid and its endpoint value `W(1)`.
#[derive(Debug, Clone)]
pub struct GaugeRecord {
    pub grid: Vec<f64>,
    pub w_nodes: Vec<CMat>,
    pub w1: CMat,
}

/// Sampling resolution for the transformed potential.
const GAUGE_GRID: usize = 8192;

/// Remove the diagonal blocks of Q by the gauge `y -> W(x) y` with
/// `i B^{-1} W' = Q_1(x) W`, `W(0) = I`: the result has `Q'_{jj} = 0` on the
/// equal-weight blocks, `D' = D W(1)`, and the same characteristic
/// determinant.  Requires B already in canonical block order.
pub fn gauge_normalize(bvp: &DiracBVP, _ctrl: &StepControl) -> Result<(DiracBVP, GaugeRecord)> {
    let n = bvp.n();
    if !bvp.weight.is_blocked() {
        return Err(Error::Invalid(
            "gauge_normalize requires canonical block order (equal weights contiguous)".into(),
        ));
    }
    let groups = bvp.weight.groups();
    let block_of = {
        let mut map = vec![0usize; n];
        for (gi, (_, idxs)) in groups.iter().enumerate() {
            for &j in idxs {
                map[j] = gi;
            }
        }
        map
    };
    let q1_of = |q: &CMat| -> CMat {
        let mut q1 = CMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                if block_of[i] == block_of[j] {
                    q1[(i, j)] = q[(i, j)];
                }
            }
        }
        q1
    };
    // trivial when the diagonal blocks already vanish
    let q1_zero = match &bvp.potential.kind {
        PotentialKind::Zero => true,
        PotentialKind::Constant(m) => q1_of(m).is_zero(0.0),
        PotentialKind::Grid { samples, .. } => samples.iter().all(|s| q1_of(s).is_zero(0.0)),
    };
    if q1_zero {
        let record = GaugeRecord {
            grid: vec![0.0, 1.0],
            w_nodes: vec![CMat::identity(n), CMat::identity(n)],
            w1: CMat::identity(n),
        };
        return Ok((bvp.clone(), record));
    }

    // W' = -i B Q_1(x) W, W(0) = I, integrated on a fine fixed grid.
    let m = GAUGE_GRID;
    let bmat = bvp.weight.as_matrix();
    let coeff = |x: f64| -> CMat {
        let q1 = q1_of(&bvp.potential.eval(x));
        bmat.mul(&q1).scale(c64(0.0, -1.0))
    };
    let h = 1.0 / m as f64;
    let mut w = CMat::identity(n);
    let mut w_nodes: Vec<CMat> = Vec::with_capacity(m + 1);
    let mut grid: Vec<f64> = Vec::with_capacity(m + 1);
    w_nodes.push(w.clone());
    grid.push(0.0);
    for s in 0..m {
        let x = s as f64 * h;
        let a1 = coeff(x);
        let a2 = coeff(x + 0.5 * h);
        let a4 = coeff(x + h);
        let k1 = a1.mul(&w);
        let k2 = a2.mul(&w.add(&k1.scale(c64(0.5 * h, 0.0))));
        let k3 = a2.mul(&w.add(&k2.scale(c64(0.5 * h, 0.0))));
        let k4 = a4.mul(&w.add(&k3.scale(c64(h, 0.0))));
        w = w.add(
            &k1.add(&k2.scale(c64(2.0, 0.0))).add(&k3.scale(c64(2.0, 0.0))).add(&k4).scale(c64(h / 6.0, 0.0)),
        );
        grid.push((s + 1) as f64 * h);
        w_nodes.push(w.clone());
    }
    let w1 = w.clone();

    // Q'(x) = W^{-1} (Q - Q_1) W sampled on the same grid, linear interpolation.
    let mut samples: Vec<CMat> = Vec::with_capacity(m + 1);
    for (idx, x) in grid.iter().enumerate() {
        let q = bvp.potential.eval(*x);
        let off = q.sub(&q1_of(&q));
        let wi = w_nodes[idx].inverse().map_err(|_| {
            Error::Integration("gauge factor W became singular during integration".into())
        })?;
        samples.push(wi.mul(&off).mul(&w_nodes[idx]));
    }
    // continuity of q'_{jk} at the ends holds when every entry of Q feeding
    // the (block(j), block(k)) product is continuous there
    let flags_in = bvp.potential.continuity_flags();
    let mut flags = vec![vec![false; n]; n];
    for j in 0..n {
        for k in 0..n {
            let mut ok = true;
            for l in 0..n {
                for mcol in 0..n {
                    if block_of[l] == block_of[j] && block_of[mcol] == block_of[k] && !flags_in[l][mcol] {
                        ok = false;
                    }
                }
            }
            flags[j][k] = ok;
        }
    }
    let potential = PotentialField::grid(samples, Interp::Linear).with_continuity(flags);
    let boundary = BoundaryPair::new(bvp.boundary.c.clone(), bvp.boundary.d.mul(&w1));
    let gauged = DiracBVP::new(bvp.weight.clone(), potential, boundary);
    Ok((gauged, GaugeRecord { grid, w_nodes, w1 }))
}
