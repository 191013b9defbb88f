//! Problem objects: diagonal weight, potential, boundary pair, and the
//! assembled boundary value problem with its structural validation.

use crate::linalg::{c64, C64, CMat, svd, ZERO};

/// Diagonal weight `B = diag(b_1, ..., b_n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    entries: Vec<C64>,
}

impl WeightMatrix {
    pub fn new(entries: Vec<C64>) -> Self {
        Self { entries }
    }

    pub fn from_re(entries: &[f64]) -> Self {
        Self { entries: entries.iter().map(|&x| c64(x, 0.0)).collect() }
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, j: usize) -> C64 {
        self.entries[j]
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn as_matrix(&self) -> CMat {
        CMat::diag(&self.entries)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|b| b.norm()).fold(0.0, f64::max)
    }

    /// All distinct values among the entries, in order of first appearance.
    ///
    /// Grouping uses exact complex equality of the stored entries; nearly
    /// equal values are reported by [`close_distinct_values`] instead of
    /// being merged.
    pub fn distinct_values(&self) -> Vec<C64> {
        let mut vals: Vec<C64> = Vec::new();
        for &b in &self.entries {
            if !vals.contains(&b) {
                vals.push(b);
            }
        }
        vals
    }

    /// Indices grouped by distinct value, first-appearance order.
    pub fn groups(&self) -> Vec<(C64, Vec<usize>)> {
        let mut out: Vec<(C64, Vec<usize>)> = Vec::new();
        for (j, &b) in self.entries.iter().enumerate() {
            if let Some(slot) = out.iter_mut().find(|(v, _)| *v == b) {
                slot.1.push(j);
            } else {
                out.push((b, vec![j]));
            }
        }
        out
    }

    /// Pairs of distinct values closer than `tol`; a diagnostic, not a merge.
    pub fn close_distinct_values(&self, tol: f64) -> Vec<(C64, C64)> {
        let vals = self.distinct_values();
        let mut out = Vec::new();
        for i in 0..vals.len() {
            for j in i + 1..vals.len() {
                if (vals[i] - vals[j]).norm() < tol {
                    out.push((vals[i], vals[j]));
                }
            }
        }
        out
    }

    /// Entries contiguous by value, i.e. already in block form
    /// `diag(beta_1 I_{n_1}, ..., beta_r I_{n_r})`.
    pub fn is_blocked(&self) -> bool {
        let mut seen: Vec<C64> = Vec::new();
        for &b in &self.entries {
            match seen.last() {
                Some(&last) if last == b => {}
                _ => {
                    if seen.contains(&b) {
                        return false;
                    }
                    seen.push(b);
                }
            }
        }
        true
    }
}

/// Tolerance below which an imaginary part counts as zero in `is_dirac_type`.
pub const IM_TOL: f64 = 1e-12;

/// Dirac type means `B = B*`: all weights real.
pub fn is_dirac_type(b: &WeightMatrix) -> bool {
    b.entries().iter().all(|z| z.im.abs() <= IM_TOL * z.norm().max(1.0))
}

/// Interpolation order for grid potentials.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interp {
    /// Piecewise constant on cells, left sample per cell.
    Step = 0,
    /// Piecewise linear between samples.
    Linear = 1,
}

/// Potential matrix `Q(x)` on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub enum PotentialKind {
    Zero,
    Constant(CMat),
    Grid { samples: Vec<CMat>, interp: Interp },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PotentialField {
    pub n: usize,
    pub kind: PotentialKind,
    /// `flag[j][k]` asserts `q_{jk}` is continuous at both endpoints.
    /// Zero and constant kinds are continuous by construction.
    endpoint_continuity: Option<Vec<Vec<bool>>>,
}

impl PotentialField {
    pub fn zero(n: usize) -> Self {
        Self { n, kind: PotentialKind::Zero, endpoint_continuity: None }
    }

    pub fn constant(m: CMat) -> Self {
        let n = m.rows;
        Self { n, kind: PotentialKind::Constant(m), endpoint_continuity: None }
    }

    pub fn grid(samples: Vec<CMat>, interp: Interp) -> Self {
        let n = samples.first().map(|m| m.rows).unwrap_or(0);
        Self { n, kind: PotentialKind::Grid { samples, interp }, endpoint_continuity: None }
    }

    pub fn with_continuity(mut self, flags: Vec<Vec<bool>>) -> Self {
        self.endpoint_continuity = Some(flags);
        self
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.kind, PotentialKind::Zero)
    }

    /// Entry `q_{jk}` continuous at the endpoints 0 and 1?
    pub fn continuous_at_ends(&self, j: usize, k: usize) -> bool {
        match &self.kind {
            PotentialKind::Zero | PotentialKind::Constant(_) => true,
            PotentialKind::Grid { .. } => {
                self.endpoint_continuity.as_ref().map(|f| f[j][k]).unwrap_or(false)
            }
        }
    }

    pub fn continuity_flags(&self) -> Vec<Vec<bool>> {
        match &self.kind {
            PotentialKind::Zero | PotentialKind::Constant(_) => vec![vec![true; self.n]; self.n],
            PotentialKind::Grid { .. } => self
                .endpoint_continuity
                .clone()
                .unwrap_or_else(|| vec![vec![false; self.n]; self.n]),
        }
    }

    /// Number of grid cells (1 for zero/constant).
    pub fn cells(&self) -> usize {
        match &self.kind {
            PotentialKind::Grid { samples, .. } => samples.len().saturating_sub(1).max(1),
            _ => 1,
        }
    }

    /// Evaluate `Q(x)`; exact stored samples are returned at grid abscissae.
    pub fn eval(&self, x: f64) -> CMat {
        match &self.kind {
            PotentialKind::Zero => CMat::zeros(self.n, self.n),
            PotentialKind::Constant(m) => m.clone(),
            PotentialKind::Grid { samples, interp } => {
                let m = samples.len() - 1;
                let t = x * m as f64;
                let nearest = t.round();
                if (t - nearest).abs() < 1e-12 && (0.0..=m as f64).contains(&nearest) {
                    return samples[nearest as usize].clone();
                }
                let cell = (t.floor() as usize).min(m - 1);
                match interp {
                    Interp::Step => samples[cell].clone(),
                    Interp::Linear => {
                        let w = t - cell as f64;
                        samples[cell].scale(c64(1.0 - w, 0.0)).add(&samples[cell + 1].scale(c64(w, 0.0)))
                    }
                }
            }
        }
    }

    pub fn q0(&self) -> CMat {
        self.eval(0.0)
    }

    pub fn q1(&self) -> CMat {
        self.eval(1.0)
    }

    /// Exact integral of entry (j, k) over [0, 1] for the stored representation:
    /// left Riemann sum for step cells, trapezoid (exact) for linear cells.
    pub fn integral_entry(&self, j: usize, k: usize) -> C64 {
        match &self.kind {
            PotentialKind::Zero => ZERO,
            PotentialKind::Constant(m) => m[(j, k)],
            PotentialKind::Grid { samples, interp } => {
                let m = samples.len() - 1;
                let h = 1.0 / m as f64;
                match interp {
                    Interp::Step => samples[..m].iter().map(|s| s[(j, k)]).sum::<C64>() * h,
                    Interp::Linear => {
                        let mut acc = ZERO;
                        for c in 0..m {
                            acc += (samples[c][(j, k)] + samples[c + 1][(j, k)]) * (0.5 * h);
                        }
                        acc
                    }
                }
            }
        }
    }

    /// Integral of the full matrix over [0, 1].
    pub fn integral(&self) -> CMat {
        let mut out = CMat::zeros(self.n, self.n);
        for j in 0..self.n {
            for k in 0..self.n {
                out[(j, k)] = self.integral_entry(j, k);
            }
        }
        out
    }
}

/// Boundary matrices `(C, D)` of `C y(0) + D y(1) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryPair {
    pub c: CMat,
    pub d: CMat,
}

/// Relative tolerance for the maximality rank test.
pub const RANK_TOL: f64 = 1e-10;

impl BoundaryPair {
    pub fn new(c: CMat, d: CMat) -> Self {
        Self { c, d }
    }

    pub fn n(&self) -> usize {
        self.c.rows
    }

    /// The n x 2n compound (C D).
    pub fn compound(&self) -> CMat {
        let n = self.n();
        let mut j = CMat::zeros(n, 2 * n);
        for r in 0..n {
            for cidx in 0..n {
                j[(r, cidx)] = self.c[(r, cidx)];
                j[(r, n + cidx)] = self.d[(r, cidx)];
            }
        }
        j
    }

    /// Maximality: rank (C D) = n, tested as smallest singular value of the
    /// compound being above `RANK_TOL` relative to the largest.
    pub fn is_maximal(&self) -> bool {
        let (_, s, _) = svd(&self.compound());
        match (s.first(), s.last()) {
            (Some(&smax), Some(&smin)) => smin > RANK_TOL * smax,
            _ => false,
        }
    }
}

/// The assembled two-point boundary value problem.
#[derive(Debug, Clone, PartialEq)]
pub struct DiracBVP {
    pub weight: WeightMatrix,
    pub potential: PotentialField,
    pub boundary: BoundaryPair,
}

impl DiracBVP {
    pub fn new(weight: WeightMatrix, potential: PotentialField, boundary: BoundaryPair) -> Self {
        Self { weight, potential, boundary }
    }

    pub fn n(&self) -> usize {
        self.weight.n()
    }
}

/// Outcome of `validate_bvp`: an empty violation list means valid.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub violations: Vec<String>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check every structural invariant; report style, never an error.
pub fn validate_bvp(bvp: &DiracBVP) -> ValidationReport {
    let mut report = ValidationReport::default();
    let n = bvp.weight.n();
    if n == 0 {
        report.violations.push("dimension n must be positive".into());
        return report;
    }
    for (j, b) in bvp.weight.entries().iter().enumerate() {
        if b.norm() == 0.0 {
            report.violations.push(format!("weight entry b_{} is zero (B must be nonsingular)", j + 1));
        }
        if !b.re.is_finite() || !b.im.is_finite() {
            report.violations.push(format!("weight entry b_{} is not finite", j + 1));
        }
    }
    for (a, b) in bvp.weight.close_distinct_values(1e-8) {
        report.warnings.push(format!(
            "distinct weight values {a} and {b} differ by less than 1e-8; they are not merged"
        ));
    }
    if bvp.potential.n != n {
        report.violations.push(format!(
            "potential dimension {} does not match system dimension {}",
            bvp.potential.n, n
        ));
    }
    match &bvp.potential.kind {
        PotentialKind::Zero => {}
        PotentialKind::Constant(m) => {
            if m.rows != n || m.cols != n {
                report.violations.push("constant potential matrix is not n x n".into());
            }
            if m.data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                report.violations.push("constant potential has non-finite entries".into());
            }
        }
        PotentialKind::Grid { samples, .. } => {
            if samples.len() < 2 {
                report.violations.push("grid potential needs at least 2 samples".into());
            }
            for (i, s) in samples.iter().enumerate() {
                if s.rows != n || s.cols != n {
                    report.violations.push(format!("grid sample {i} is not n x n"));
                    break;
                }
                if s.data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                    report.violations.push(format!("grid sample {i} has non-finite entries"));
                    break;
                }
            }
        }
    }
    if bvp.boundary.c.rows != n || bvp.boundary.c.cols != n || bvp.boundary.d.rows != n || bvp.boundary.d.cols != n {
        report.violations.push("boundary matrices must be n x n".into());
    } else if !bvp.boundary.is_maximal() {
        report.violations.push("rank (C D) < n: boundary conditions are not maximal (ker(CC*+DD*) is nontrivial)".into());
    }
    report
}

/// Renumber the unknowns so equal weight entries become contiguous,
/// `B' = diag(beta_1 I_{n_1}, ..., beta_r I_{n_r})`, grouping by first
/// appearance.  The same permutation is applied to rows/columns of Q and to
/// the columns of C and D; one boundary row is negated when the permutation
/// is odd so the characteristic determinant is preserved exactly, not just
/// up to sign.
pub fn canonical_block_order(bvp: &DiracBVP) -> (DiracBVP, Vec<usize>) {
    let n = bvp.n();
    let mut perm: Vec<usize> = Vec::with_capacity(n);
    for (_, idxs) in bvp.weight.groups() {
        perm.extend(idxs);
    }
    if perm.iter().enumerate().all(|(i, &p)| i == p) {
        return (bvp.clone(), perm);
    }
    let permute_mat = |m: &CMat| {
        let mut out = CMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = m[(perm[i], perm[j])];
            }
        }
        out
    };
    let permute_cols = |m: &CMat| {
        let mut out = CMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = m[(i, perm[j])];
            }
        }
        out
    };
    let weight = WeightMatrix::new(perm.iter().map(|&p| bvp.weight.entry(p)).collect());
    let kind = match &bvp.potential.kind {
        PotentialKind::Zero => PotentialKind::Zero,
        PotentialKind::Constant(m) => PotentialKind::Constant(permute_mat(m)),
        PotentialKind::Grid { samples, interp } => {
            PotentialKind::Grid { samples: samples.iter().map(permute_mat).collect(), interp: *interp }
        }
    };
    let flags = bvp.potential.endpoint_continuity.as_ref().map(|f| {
        (0..n).map(|i| (0..n).map(|j| f[perm[i]][perm[j]]).collect()).collect()
    });
    let potential = PotentialField { n, kind, endpoint_continuity: flags };
    let mut c = permute_cols(&bvp.boundary.c);
    let mut d = permute_cols(&bvp.boundary.d);
    if permutation_sign(&perm) < 0 {
        for j in 0..n {
            c[(0, j)] = -c[(0, j)];
            d[(0, j)] = -d[(0, j)];
        }
    }
    (DiracBVP::new(weight, potential, BoundaryPair::new(c, d)), perm)
}

fn permutation_sign(perm: &[usize]) -> i32 {
    let mut seen = vec![false; perm.len()];
    let mut sign = 1;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = perm[i];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}
