//! Eigenvalue localization: argument-principle counts on rectangles,
//! quadrisection, moment-based cluster resolution, multiplicities, and
//! grouping of eigenvalues into Riesz blocks by epsilon-closeness.

use crate::linalg::{c64, C64, ScaledC64};
use crate::propagator::{char_determinant_scaled, StepControl};
use crate::system::DiracBVP;
use crate::{Error, Result};

use std::f64::consts::PI;

/// Axis-aligned rectangle in the complex plane.
#[derive(Debug, Clone, Copy)]
pub struct Region {
    pub re0: f64,
    pub re1: f64,
    pub im0: f64,
    pub im1: f64,
}

impl Region {
    pub fn new(re0: f64, re1: f64, im0: f64, im1: f64) -> Self {
        Self { re0, re1, im0, im1 }
    }

    pub fn center(&self) -> C64 {
        c64(0.5 * (self.re0 + self.re1), 0.5 * (self.im0 + self.im1))
    }

    pub fn width(&self) -> f64 {
        self.re1 - self.re0
    }

    pub fn height(&self) -> f64 {
        self.im1 - self.im0
    }

    pub fn diameter(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn contains(&self, z: C64) -> bool {
        z.re > self.re0 && z.re < self.re1 && z.im > self.im0 && z.im < self.im1
    }

    fn dilated(&self, amount: f64) -> Self {
        let d = amount * self.diameter().max(1.0);
        Self::new(self.re0 - d, self.re1 + d, self.im0 - d, self.im1 + d)
    }

    /// Quadrisect at a deterministically jittered interior point so zeros
    /// rarely land on subdivision lines.
    fn quadrants(&self, depth: usize) -> [Region; 4] {
        let f = if depth % 2 == 0 { 0.513 } else { 0.487 };
        let xm = self.re0 + f * self.width();
        let ym = self.im0 + (1.0 - f) * self.height();
        [
            Region::new(self.re0, xm, self.im0, ym),
            Region::new(xm, self.re1, self.im0, ym),
            Region::new(self.re0, xm, ym, self.im1),
            Region::new(xm, self.re1, ym, self.im1),
        ]
    }

    fn corners(&self) -> [C64; 4] {
        [
            c64(self.re0, self.im0),
            c64(self.re1, self.im0),
            c64(self.re1, self.im1),
            c64(self.re0, self.im1),
        ]
    }
}

/// One located eigenvalue.
#[derive(Debug, Clone, Copy)]
pub struct Eigenvalue {
    pub value: C64,
    pub multiplicity: usize,
}

/// Eigenvalues with multiplicities inside a rectangle.
#[derive(Debug, Clone)]
pub struct SpectrumSlice {
    pub region: Region,
    pub eigenvalues: Vec<Eigenvalue>,
    pub total_count: usize,
    /// max |Delta| over the refined roots, relative to the contour scale.
    pub residual: f64,
    /// Cells that could not be resolved, with their zero counts.
    pub unresolved: Vec<(Region, usize)>,
}

const FD_STEP: f64 = 1e-5;
const BOUNDARY_REL_TOL: f64 = 1e-12;
const MAX_DILATIONS: usize = 5;

fn delta_scaled(bvp: &DiracBVP, lambda: C64, ctrl: &StepControl) -> Result<ScaledC64> {
    char_determinant_scaled(bvp, lambda, ctrl)
}

/// log-derivative Delta'/Delta by central complex differences, scale-safe.
fn log_derivative(bvp: &DiracBVP, lambda: C64, ctrl: &StepControl) -> Result<C64> {
    let h = FD_STEP * (1.0 + lambda.norm());
    let fp = delta_scaled(bvp, lambda + c64(h, 0.0), ctrl)?;
    let fm = delta_scaled(bvp, lambda - c64(h, 0.0), ctrl)?;
    let f0 = delta_scaled(bvp, lambda, ctrl)?;
    if f0.is_zero() {
        return Err(Error::Contour(format!("Delta vanishes at contour node {lambda}")));
    }
    let num = fp.sub(fm);
    Ok(num.div(f0).to_c64() / c64(2.0 * h, 0.0))
}

/// How a winding evaluation failed; `OnContour` aborts refinement and goes
/// straight to dilation.
enum WindingFailure {
    TooCoarse,
    OnContour,
}

/// Winding number of Delta along a closed polyline, by trapezoid quadrature
/// of Delta'/Delta with a phase-unwrapping consistency check.
///
/// `nodes` must trace the contour once, counterclockwise, without repeating
/// the initial point.  Zero detection is local: |Delta| legitimately spans
/// many orders of magnitude along one contour when B has complex entries, so
/// only a sharp dip against the neighboring nodes (or an exact zero) counts.
fn winding_closed(
    bvp: &DiracBVP,
    nodes: &[C64],
    ctrl: &StepControl,
) -> Result<std::result::Result<(i64, f64), WindingFailure>> {
    let k = nodes.len();
    let mut values: Vec<ScaledC64> = Vec::with_capacity(k);
    for &z in nodes {
        values.push(delta_scaled(bvp, z, ctrl)?);
    }
    for i in 0..k {
        if values[i].is_zero() {
            return Ok(Err(WindingFailure::OnContour));
        }
        let here = values[i].ln_abs();
        let prev = values[(i + k - 1) % k].ln_abs();
        let next = values[(i + 1) % k].ln_abs();
        if here < prev.min(next) + BOUNDARY_REL_TOL.ln() {
            return Ok(Err(WindingFailure::OnContour));
        }
    }
    // phase unwrap: total argument change / 2 pi
    let mut total_phase = 0.0f64;
    for i in 0..k {
        let a = values[i].mantissa;
        let b = values[(i + 1) % k].mantissa;
        let step = (b / a).arg();
        if step.abs() > 0.98 * PI {
            return Ok(Err(WindingFailure::OnContour));
        }
        if step.abs() > 0.5 * PI {
            return Ok(Err(WindingFailure::TooCoarse));
        }
        total_phase += step;
    }
    let unwrap_winding = (total_phase / (2.0 * PI)).round() as i64;
    // trapezoid of Delta'/Delta
    let mut integral = C64::new(0.0, 0.0);
    let mut derivs: Vec<C64> = Vec::with_capacity(k);
    for &z in nodes {
        derivs.push(log_derivative(bvp, z, ctrl)?);
    }
    for i in 0..k {
        let z0 = nodes[i];
        let z1 = nodes[(i + 1) % k];
        integral += (derivs[i] + derivs[(i + 1) % k]) * (z1 - z0) * 0.5;
    }
    let quad = integral / c64(0.0, 2.0 * PI);
    let est = quad.re;
    let err = (est - est.round()).abs().max(quad.im.abs());
    if err > 0.25 || (est.round() as i64) != unwrap_winding {
        return Ok(Err(WindingFailure::TooCoarse));
    }
    Ok(Ok((unwrap_winding, err)))
}

fn rect_nodes(region: &Region, per_edge: usize) -> Vec<C64> {
    let corners = region.corners();
    let mut nodes = Vec::with_capacity(4 * per_edge);
    for e in 0..4 {
        let a = corners[e];
        let b = corners[(e + 1) % 4];
        for i in 0..per_edge {
            let t = i as f64 / per_edge as f64;
            nodes.push(a + (b - a) * t);
        }
    }
    nodes
}

/// Winding with node doubling until the quadrature stabilizes.  A zero found
/// on (or numerically on) the contour aborts immediately so the caller can
/// dilate; otherwise doubling continues up to the cap.
fn winding_rect(bvp: &DiracBVP, region: &Region, ctrl: &StepControl) -> Result<(i64, f64)> {
    let mut per_edge = 24usize;
    while per_edge <= 3072 {
        match winding_closed(bvp, &rect_nodes(region, per_edge), ctrl)? {
            Ok(res) => return Ok(res),
            Err(WindingFailure::OnContour) => {
                return Err(Error::Contour("Delta vanishes on or near the contour".into()))
            }
            Err(WindingFailure::TooCoarse) => {}
        }
        per_edge *= 2;
    }
    Err(Error::Contour("winding did not stabilize at the node cap".into()))
}

/// Count zeros of Delta inside the region by the argument principle.  A zero
/// on the boundary triggers dilation by 1e-3 (up to 5 times) and a retry.
pub fn count_zeros(bvp: &DiracBVP, region: &Region, ctrl: &StepControl) -> Result<usize> {
    let (count, _region) = count_zeros_with_region(bvp, region, ctrl)?;
    Ok(count)
}

/// As `count_zeros`, also returning the (possibly dilated) contour actually
/// used.
pub fn count_zeros_with_region(
    bvp: &DiracBVP,
    region: &Region,
    ctrl: &StepControl,
) -> Result<(usize, Region)> {
    let mut r = *region;
    let mut last = None;
    for _ in 0..=MAX_DILATIONS {
        match winding_rect(bvp, &r, ctrl) {
            Ok((w, _err)) => {
                if w < 0 {
                    return Err(Error::Contour(format!("negative winding {w} for an entire function")));
                }
                return Ok((w as usize, r));
            }
            Err(e) => {
                last = Some(e);
                r = r.dilated(1e-3);
            }
        }
    }
    Err(last.unwrap())
}

/// Power sums `s_p = (1/2 pi i) oint lambda^p Delta'/Delta dlambda` on a
/// circle, with the winding number (= s_0).  Spectral differentiation of the
/// circle samples supplies Delta' without extra evaluations.
fn circle_moments(
    bvp: &DiracBVP,
    center: C64,
    radius: f64,
    pmax: usize,
    ctrl: &StepControl,
) -> Result<(i64, Vec<C64>)> {
    let mut k = 64usize;
    let mut prev: Option<(i64, Vec<C64>)> = None;
    while k <= 1024 {
        let nodes: Vec<C64> =
            (0..k).map(|m| center + C64::from_polar(radius, 2.0 * PI * m as f64 / k as f64)).collect();
        let mut vals: Vec<ScaledC64> = Vec::with_capacity(k);
        for &z in &nodes {
            vals.push(delta_scaled(bvp, z, ctrl)?);
        }
        if vals.iter().any(|v| v.is_zero()) {
            return Err(Error::Contour("Delta vanishes on moment circle".into()));
        }
        // rebase to a common scale for the DFT
        let max_ln = vals.iter().map(|v| v.ln_abs()).fold(f64::NEG_INFINITY, f64::max);
        let g: Vec<C64> = vals.iter().map(|v| v.mantissa * (v.ln_scale - max_ln).exp()).collect();
        let min_abs = g.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
        if min_abs < 1e-13 {
            return Err(Error::Contour("moment circle passes too close to a zero".into()));
        }
        // phase unwrap for the winding
        let mut total_phase = 0.0;
        let mut coarse = false;
        for i in 0..k {
            let step = (g[(i + 1) % k] / g[i]).arg();
            if step.abs() > 0.5 * PI {
                coarse = true;
                break;
            }
            total_phase += step;
        }
        if coarse {
            k *= 2;
            continue;
        }
        let winding = (total_phase / (2.0 * PI)).round() as i64;
        // g'(theta) by naive DFT differentiation
        let kf = k as f64;
        let mut ghat = vec![C64::new(0.0, 0.0); k];
        for (f, item) in ghat.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for (m, &gm) in g.iter().enumerate() {
                let ang = -2.0 * PI * (f as f64) * (m as f64) / kf;
                acc += gm * C64::from_polar(1.0, ang);
            }
            *item = acc / kf;
        }
        let freq = |f: usize| -> f64 {
            if f <= k / 2 { f as f64 } else { f as f64 - kf }
        };
        let mut moments = vec![C64::new(0.0, 0.0); pmax];
        for (m, &gm) in g.iter().enumerate() {
            let theta = 2.0 * PI * m as f64 / kf;
            let mut gp = C64::new(0.0, 0.0);
            for f in 0..k {
                let fr = freq(f);
                gp += ghat[f] * c64(0.0, fr) * C64::from_polar(1.0, fr * theta);
            }
            let ratio = gp / gm;
            let lam = center + C64::from_polar(radius, theta);
            let mut pow = lam;
            for p in 0..pmax {
                moments[p] += pow * ratio;
                pow *= lam;
            }
        }
        // trapezoid with dtheta = 2 pi / K, then division by 2 pi i: sum / (i K)
        for m in moments.iter_mut() {
            *m = *m / c64(0.0, kf);
        }
        let result = (winding, moments);
        if let Some((w_prev, m_prev)) = &prev {
            let stable = *w_prev == result.0
                && m_prev
                    .iter()
                    .zip(&result.1)
                    .all(|(a, b)| (a - b).norm() <= 1e-12 * (1.0 + b.norm()));
            if stable {
                return Ok(result);
            }
        }
        prev = Some(result);
        k *= 2;
    }
    prev.ok_or_else(|| Error::Contour("moment circle did not converge".into()))
}

/// Durand-Kerner root finder for a monic polynomial given its coefficients
/// `[a_{m-1}, ..., a_0]` of `z^m + a_{m-1} z^{m-1} + ... + a_0`.
fn monic_roots(coeffs: &[C64]) -> Vec<C64> {
    let m = coeffs.len();
    if m == 0 {
        return vec![];
    }
    let eval = |z: C64| -> C64 {
        let mut v = C64::new(1.0, 0.0);
        for &a in coeffs {
            v = v * z + a;
        }
        v
    };
    let radius = 1.0 + coeffs.iter().map(|a| a.norm()).fold(0.0, f64::max);
    let mut roots: Vec<C64> =
        (0..m).map(|j| C64::from_polar(radius * 0.7, 2.0 * PI * j as f64 / m as f64 + 0.4)).collect();
    for _ in 0..200 {
        let mut moved = 0.0f64;
        for j in 0..m {
            let mut denom = C64::new(1.0, 0.0);
            for l in 0..m {
                if l != j {
                    denom *= roots[j] - roots[l];
                }
            }
            if denom.norm() < 1e-280 {
                continue;
            }
            let step = eval(roots[j]) / denom;
            roots[j] -= step;
            moved = moved.max(step.norm());
        }
        if moved < 1e-14 * radius.max(1.0) {
            break;
        }
    }
    roots
}

/// Elementary symmetric functions from power sums, Newton's identities.
fn power_sums_to_poly(s: &[C64]) -> Vec<C64> {
    let m = s.len();
    let mut e = vec![C64::new(0.0, 0.0); m + 1];
    e[0] = C64::new(1.0, 0.0);
    for k in 1..=m {
        let mut acc = C64::new(0.0, 0.0);
        for j in 1..=k {
            let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
            acc += e[k - j] * s[j - 1] * sign;
        }
        e[k] = acc / (k as f64);
    }
    // monic coefficients: z^m - e1 z^{m-1} + e2 z^{m-2} - ...
    (1..=m).map(|k| e[k] * if k % 2 == 1 { -1.0 } else { 1.0 }).collect()
}

/// Newton refinement of a simple root using numeric derivatives.
fn polish_simple_root(bvp: &DiracBVP, start: C64, tol: f64, ctrl: &StepControl) -> Result<C64> {
    let mut z = start;
    for _ in 0..60 {
        let h = 1e-7 * (1.0 + z.norm());
        let fp = delta_scaled(bvp, z + c64(h, 0.0), ctrl)?;
        let fm = delta_scaled(bvp, z - c64(h, 0.0), ctrl)?;
        let f0 = delta_scaled(bvp, z, ctrl)?;
        if f0.is_zero() {
            return Ok(z);
        }
        let dlog = fp.sub(fm).div(f0).to_c64() / c64(2.0 * h, 0.0);
        if dlog.norm() < 1e-280 {
            break;
        }
        let step = C64::new(1.0, 0.0) / dlog;
        z -= step;
        if step.norm() < tol * (1.0 + z.norm()) {
            return Ok(z);
        }
    }
    Ok(z)
}

/// Minimum cell diameter; below this a cluster is reported as one root with
/// summed multiplicity.
const CLUSTER_FLOOR: f64 = 1e-8;
/// Cells at most this large (relative to the start region) go to the moment
/// solver instead of further subdivision.
const RESOLVE_SIZE: f64 = 5e-3;

/// Localize all eigenvalues (zeros of Delta with orders) in the region.
pub fn locate_eigenvalues(
    bvp: &DiracBVP,
    region: &Region,
    tol: f64,
    ctrl: &StepControl,
) -> Result<SpectrumSlice> {
    let (total, outer) = count_zeros_with_region(bvp, region, ctrl)?;
    let mut found: Vec<Eigenvalue> = Vec::new();
    let mut unresolved: Vec<(Region, usize)> = Vec::new();
    let resolve_size = (RESOLVE_SIZE * outer.diameter()).max(50.0 * tol).max(1e-6);
    let mut queue: Vec<(Region, usize, usize)> = vec![(outer, total, 0)];
    while let Some((cell, count, depth)) = queue.pop() {
        if count == 0 {
            continue;
        }
        if cell.diameter() <= resolve_size || depth > 60 {
            match resolve_cell(bvp, &cell, count, tol, ctrl) {
                Ok(mut roots) => found.append(&mut roots),
                Err(_) => unresolved.push((cell, count)),
            }
            continue;
        }
        let mut assigned = 0usize;
        let mut children: Vec<(Region, usize)> = Vec::new();
        let mut failed = false;
        for q in cell.quadrants(depth) {
            match count_zeros_with_region(bvp, &q, ctrl) {
                Ok((c, qr)) => {
                    assigned += c;
                    children.push((qr, c));
                }
                Err(_) => {
                    failed = true;
                    break;
                }
            }
        }
        if failed || assigned != count {
            // dilated children may double-count a root near a shared edge;
            // fall back to resolving the parent cell directly
            match resolve_cell(bvp, &cell, count, tol, ctrl) {
                Ok(mut roots) => found.append(&mut roots),
                Err(_) => unresolved.push((cell, count)),
            }
            continue;
        }
        for (q, c) in children {
            if c > 0 {
                queue.push((q, c, depth + 1));
            }
        }
    }
    // merge duplicates from adjacent cells
    found.sort_by(|a, b| (a.value.re, a.value.im).partial_cmp(&(b.value.re, b.value.im)).unwrap());
    let mut merged: Vec<Eigenvalue> = Vec::new();
    for ev in found {
        if let Some(last) = merged.last_mut() {
            if (last.value - ev.value).norm() < CLUSTER_FLOOR.max(10.0 * tol) {
                last.multiplicity += ev.multiplicity;
                continue;
            }
        }
        merged.push(ev);
    }
    // keep only roots inside the requested contour
    merged.retain(|ev| outer.contains(ev.value));
    let found_total: usize = merged.iter().map(|e| e.multiplicity).sum();
    let residual = {
        let mut worst = 0.0f64;
        let scale = delta_scaled(bvp, outer.corners()[0], ctrl)?.ln_abs();
        for ev in &merged {
            let v = delta_scaled(bvp, ev.value, ctrl)?;
            worst = worst.max((v.ln_abs() - scale).exp());
        }
        worst
    };
    if found_total != total && unresolved.is_empty() {
        return Err(Error::Contour(format!(
            "located multiplicities sum to {found_total}, contour count is {total}"
        )));
    }
    Ok(SpectrumSlice { region: *region, eigenvalues: merged, total_count: total, residual, unresolved })
}

/// Resolve all zeros inside a small cell through circle moments.
fn resolve_cell(
    bvp: &DiracBVP,
    cell: &Region,
    count: usize,
    tol: f64,
    ctrl: &StepControl,
) -> Result<Vec<Eigenvalue>> {
    let center = cell.center();
    let radius = 0.75 * cell.diameter();
    let (w, moments) = circle_moments(bvp, center, radius, count.max(1), ctrl)?;
    if w < 0 || (w as usize) < count {
        return Err(Error::Contour(format!("moment circle winding {w} below cell count {count}")));
    }
    let m = w as usize;
    if m == 0 {
        return Ok(vec![]);
    }
    if m == 1 {
        let root = polish_simple_root(bvp, moments[0], tol, ctrl)?;
        return Ok(vec![Eigenvalue { value: root, multiplicity: 1 }]);
    }
    if cell.diameter() < CLUSTER_FLOOR || m > 6 {
        // unresolvable cluster: single reported root with summed multiplicity
        let centroid = moments[0] / (m as f64);
        return Ok(vec![Eigenvalue { value: centroid, multiplicity: m }]);
    }
    let coeffs = power_sums_to_poly(&moments[..m]);
    let roots = monic_roots(&coeffs);
    // group roots within the cluster floor
    let mut groups: Vec<(C64, usize)> = Vec::new();
    'outer: for r in roots {
        for g in groups.iter_mut() {
            if (g.0 - r).norm() < (CLUSTER_FLOOR.max(10.0 * tol)).max(1e-6 * (1.0 + r.norm())) {
                g.0 = (g.0 * (g.1 as f64) + r) / ((g.1 + 1) as f64);
                g.1 += 1;
                continue 'outer;
            }
        }
        groups.push((r, 1));
    }
    let mut out = Vec::new();
    for (val, mult) in groups {
        let refined = if mult == 1 {
            polish_simple_root(bvp, val, tol, ctrl)?
        } else {
            // re-centered moment pass: on a tight circle the centroid
            // s_1 / m recovers an m-fold root to near machine precision
            let radius = (100.0 * tol).max(1e-5 * (1.0 + val.norm()));
            match circle_moments(bvp, val, radius, 1, ctrl) {
                Ok((w, m1)) if w == mult as i64 => m1[0] / (mult as f64),
                _ => val,
            }
        };
        out.push(Eigenvalue { value: refined, multiplicity: mult });
    }
    Ok(out)
}

/// Multiplicity verification: winding of a small circle around a refined
/// root.  The radius defaults to `10 * tol` but stays above the noise floor
/// and below half the distance to `nearest`.
pub fn multiplicity_at(
    bvp: &DiracBVP,
    root: C64,
    tol: f64,
    nearest: Option<f64>,
    ctrl: &StepControl,
) -> Result<usize> {
    let mut radius = (10.0 * tol).max(1e-7 * (1.0 + root.norm()));
    if let Some(d) = nearest {
        radius = radius.min(0.4 * d);
    }
    let (w, _) = circle_moments(bvp, root, radius, 1, ctrl)?;
    if w < 0 {
        return Err(Error::Contour("negative winding around root".into()));
    }
    Ok(w as usize)
}

// ───────────────────────────── Riesz blocks ────────────────────────────────

/// Partition of eigenvalue indices into epsilon-close chains along rays.
#[derive(Debug, Clone)]
pub struct RieszBlocks {
    pub angles: Vec<f64>,
    pub epsilon: f64,
    /// Blocks of indices into the input eigenvalue list.
    pub blocks: Vec<Vec<usize>>,
}

fn angle_distance(a: f64, b: f64) -> f64 {
    let mut d = (a - b).rem_euclid(2.0 * PI);
    if d > PI {
        d = 2.0 * PI - d;
    }
    d
}

fn near_ray(z: C64, phi: f64, eps: f64) -> bool {
    if z.norm() == 0.0 {
        return true; // the origin sits at the tip of every ray
    }
    angle_distance(z.arg(), phi) < eps
}

/// Two eigenvalues are epsilon-close w.r.t. the rays if some ray contains both
/// within angle epsilon and their projections on it differ by less than
/// epsilon; blocks are the transitive closure of that relation.
pub fn group_blocks(eigs: &[C64], angles: &[f64], epsilon: f64) -> RieszBlocks {
    let n = eigs.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut Vec<usize>, i: usize) -> usize {
        let mut i = i;
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            let close = angles.iter().any(|&phi| {
                near_ray(eigs[i], phi, epsilon)
                    && near_ray(eigs[j], phi, epsilon)
                    && ((C64::from_polar(1.0, -phi) * (eigs[i] - eigs[j])).re.abs() < epsilon)
            });
            if close {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let mut map: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let r = find(&mut parent, i);
        map.entry(r).or_default().push(i);
    }
    let mut blocks: Vec<Vec<usize>> = map.into_values().collect();
    // order blocks by projection onto their best-fit ray, then by angle
    let block_key = |block: &Vec<usize>| -> (usize, f64) {
        let rep = eigs[block[0]];
        let ray = angles
            .iter()
            .enumerate()
            .min_by(|(_, &a), (_, &b)| {
                angle_distance(rep.arg(), a).partial_cmp(&angle_distance(rep.arg(), b)).unwrap()
            })
            .map(|(k, _)| k)
            .unwrap_or(0);
        let phi = angles.get(ray).copied().unwrap_or(0.0);
        let proj = block.iter().map(|&i| (C64::from_polar(1.0, -phi) * eigs[i]).re).fold(f64::INFINITY, f64::min);
        (ray, proj)
    };
    blocks.sort_by(|a, b| {
        let (ra, pa) = block_key(a);
        let (rb, pb) = block_key(b);
        (ra, pa).partial_cmp(&(rb, pb)).unwrap()
    });
    for b in blocks.iter_mut() {
        b.sort_by(|&i, &j| (eigs[i].re, eigs[i].im).partial_cmp(&(eigs[j].re, eigs[j].im)).unwrap());
    }
    RieszBlocks { angles: angles.to_vec(), epsilon, blocks }
}

// ──────────────────────── reference (normal model) spectra ──────────────────

/// Shape of the unperturbed normal model whose spectrum is an explicit
/// lattice.
#[derive(Debug, Clone)]
pub enum ReferenceShape {
    /// Paired-block shape: per pair `(b_j1, b_j2)` the lattice `2 pi k / (b_j1 - b_j2)`.
    PairedBlocks { pairs: Vec<(C64, C64)> },
    /// Block-diagonal shape: per block value `b_j` the lattice `2 pi k / b_j`.
    DiagonalBlocks { values: Vec<C64> },
}

/// Reference lattice for a problem that matches one of the normal-model
/// shapes; errors when the pattern match fails.
pub fn reference_spectrum_for(bvp: &DiracBVP, k_max: i64) -> Result<Vec<C64>> {
    match crate::classify::riesz_verdict(bvp)? {
        crate::classify::RieszVerdict::BasisWithParentheses { shape, .. } => {
            Ok(reference_spectrum(&shape, k_max))
        }
        other => Err(Error::PatternMismatch(format!(
            "no normal-model shape matched (verdict {other:?})"
        ))),
    }
}

/// The reference eigenvalue lattice for `|k| <= k_max`.
pub fn reference_spectrum(shape: &ReferenceShape, k_max: i64) -> Vec<C64> {
    let mut out = Vec::new();
    let gens: Vec<C64> = match shape {
        ReferenceShape::PairedBlocks { pairs } => pairs.iter().map(|&(a, b)| a - b).collect(),
        ReferenceShape::DiagonalBlocks { values } => values.clone(),
    };
    for g in gens {
        for k in -k_max..=k_max {
            out.push(c64(2.0 * PI * k as f64, 0.0) / g);
        }
    }
    out.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    out.dedup_by(|a, b| (*a - *b).norm() < 1e-12);
    out
}
