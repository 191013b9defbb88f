//! Separating lines and the sector fan of the complex plane induced by the
//! weight B, admissible/feasible point tests, and the column-mixing matrices
//! `T_{izB}(C, D)` whose determinants govern regularity.

use crate::linalg::{c64, C64, CMat};
use crate::system::{DiracBVP, WeightMatrix};
use crate::{Error, Result};

use std::f64::consts::PI;

/// Dedup tolerance for line angles, in radians.
const ANGLE_TOL: f64 = 1e-12;
/// A representative whose |Re(i b_j z)| falls below this (relative to |b_j |)
/// sits too close to a line; the fan is rebuilt with a nudge.
const REP_MARGIN: f64 = 1e-14;

/// One open angular sector `phi_start < arg z < phi_end`.
#[derive(Debug, Clone)]
pub struct Sector {
    pub index: usize,
    pub phi_start: f64,
    pub phi_end: f64,
    /// A feasible unit point strictly inside the sector.
    pub representative: C64,
    /// Per-entry signs of `Re(i b_j z)` at the representative (+1 or -1).
    pub signs: Vec<i8>,
}

impl Sector {
    /// Strict interior containment of the direction of z.
    pub fn contains(&self, z: C64) -> bool {
        if z.norm() == 0.0 {
            return false;
        }
        let mut a = z.arg();
        // map into [phi_start, phi_start + 2 pi)
        while a < self.phi_start {
            a += 2.0 * PI;
        }
        while a >= self.phi_start + 2.0 * PI {
            a -= 2.0 * PI;
        }
        a > self.phi_start && a < self.phi_end
    }

    pub fn bisector(&self) -> C64 {
        C64::from_polar(1.0, 0.5 * (self.phi_start + self.phi_end))
    }
}

/// Lines and open sectors of the fan cut by `l_j` and `l_{jk}`.
#[derive(Debug, Clone)]
pub struct SectorFan {
    /// Direction angles of all separating lines, in [0, pi), sorted.
    pub lines: Vec<f64>,
    pub sectors: Vec<Sector>,
}

impl SectorFan {
    /// The sector strictly containing z, if any.
    pub fn sector_of(&self, z: C64) -> Option<&Sector> {
        self.sectors.iter().find(|s| s.contains(z))
    }
}

/// Compute all line angles mod pi for the lines
/// `Re(i beta_j lambda) = 0` and `Re(i beta_j lambda) = Re(i beta_k lambda)`.
fn line_angles(b: &WeightMatrix) -> Vec<f64> {
    let betas = b.distinct_values();
    let mut angles: Vec<f64> = Vec::new();
    let mut push = |w: C64| {
        // Re(i w lambda) = 0 along arg(lambda) = -arg(w) (mod pi)
        let mut a = (-w.arg()).rem_euclid(PI) + 0.0; // normalize -0.0
        if a >= PI - ANGLE_TOL {
            a = 0.0;
        }
        if !angles.iter().any(|&x| (x - a).abs() < ANGLE_TOL) {
            angles.push(a);
        }
    };
    for &beta in &betas {
        push(beta);
    }
    for j in 0..betas.len() {
        for k in j + 1..betas.len() {
            push(betas[j] - betas[k]);
        }
    }
    angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
    angles
}

/// Build the sector fan of B: rays at the line angles (and their antipodes)
/// split the plane into `nu <= r^2 + r` open sectors; each sector carries a
/// feasible representative and the constant sign pattern of `Re(i b_j z)`.
pub fn compute_fan(b: &WeightMatrix) -> Result<SectorFan> {
    if b.n() == 0 {
        return Err(Error::Invalid("empty weight".into()));
    }
    if b.entries().iter().any(|z| z.norm() == 0.0) {
        return Err(Error::Invalid("weight has a zero entry".into()));
    }
    let lines = line_angles(b);
    let mut rays: Vec<f64> = lines.iter().flat_map(|&a| [a, a + PI]).collect();
    rays.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let nu = rays.len();
    let r = b.distinct_values().len();
    debug_assert!(nu <= r * r + r, "sector count bound");
    let mut sectors = Vec::with_capacity(nu);
    for p in 0..nu {
        let phi_start = rays[p];
        let phi_end = if p + 1 < nu { rays[p + 1] } else { rays[0] + 2.0 * PI };
        let mut mid = 0.5 * (phi_start + phi_end);
        let mut rep = C64::from_polar(1.0, mid);
        // Representative too close to a line is an internal inconsistency;
        // nudge toward the interior and re-check once.
        for attempt in 0..2 {
            let bad = b
                .entries()
                .iter()
                .any(|&bj| (c64(0.0, 1.0) * bj * rep).re.abs() < REP_MARGIN * bj.norm());
            if !bad {
                break;
            }
            if attempt == 1 {
                return Err(Error::Invalid(format!(
                    "sector representative at angle {mid} is numerically on a separating line"
                )));
            }
            mid = phi_start + 0.37 * (phi_end - phi_start);
            rep = C64::from_polar(1.0, mid);
        }
        let signs: Vec<i8> = b
            .entries()
            .iter()
            .map(|&bj| if (c64(0.0, 1.0) * bj * rep).re > 0.0 { 1 } else { -1 })
            .collect();
        // sign pattern is constant across the sector: sample 3 interior points
        for frac in [0.25, 0.5, 0.75] {
            let z = C64::from_polar(1.0, phi_start + frac * (phi_end - phi_start));
            for (j, &bj) in b.entries().iter().enumerate() {
                let s = if (c64(0.0, 1.0) * bj * z).re > 0.0 { 1 } else { -1 };
                debug_assert_eq!(s, signs[j], "sign pattern not constant in sector {p}");
            }
        }
        sectors.push(Sector { index: p, phi_start, phi_end, representative: rep, signs });
    }
    Ok(SectorFan { lines, sectors })
}

/// z is admissible when `Re(i b_j z) != 0` for every j.  z = 0 is rejected.
pub fn is_admissible(z: C64, b: &WeightMatrix) -> Result<bool> {
    if z.norm() == 0.0 {
        return Err(Error::NotAdmissible("z = 0".into()));
    }
    Ok(b.entries()
        .iter()
        .all(|&bj| (c64(0.0, 1.0) * bj * z).re.abs() > REP_MARGIN * bj.norm() * z.norm()))
}

/// z is feasible when it avoids the pair lines `l_{jk}` as well, i.e. lies
/// strictly inside one sector of the fan.
pub fn is_feasible(z: C64, b: &WeightMatrix) -> Result<bool> {
    if !is_admissible(z, b)? {
        return Ok(false);
    }
    let betas = b.distinct_values();
    for j in 0..betas.len() {
        for k in j + 1..betas.len() {
            let w = betas[j] - betas[k];
            if (c64(0.0, 1.0) * w * z).re.abs() <= REP_MARGIN * w.norm() * z.norm() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The matrix `T_{izB}(C, D)` with its defining point.
#[derive(Debug, Clone)]
pub struct TMatrix {
    pub z: C64,
    pub matrix: CMat,
    /// Column sources: true when column k was taken from D.
    pub from_d: Vec<bool>,
}

impl TMatrix {
    pub fn det(&self) -> C64 {
        self.matrix.det()
    }
}

/// Column rule: column k comes from C when `Re(i b_k z) < 0`, from D when
/// `Re(i b_k z) > 0`.
pub fn build_t(z: C64, c: &CMat, d: &CMat, b: &WeightMatrix) -> Result<TMatrix> {
    if !is_admissible(z, b)? {
        return Err(Error::NotAdmissible(format!("z = {z} lies on a line Re(i b_j z) = 0")));
    }
    let n = b.n();
    let mut m = CMat::zeros(n, n);
    let mut from_d = vec![false; n];
    for k in 0..n {
        let positive = (c64(0.0, 1.0) * b.entry(k) * z).re > 0.0;
        from_d[k] = positive;
        let src = if positive { d } else { c };
        for i in 0..n {
            m[(i, k)] = src[(i, k)];
        }
    }
    Ok(TMatrix { z, matrix: m, from_d })
}

/// Which column swap to apply to `T_{izB}(C, D)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Swap {
    /// Replace column j (a C column of T) by the k-th column of C.
    CColumn { j: usize, k: usize },
    /// Replace column k (a D column of T) by the j-th column of D.
    DColumn { k: usize, j: usize },
}

/// The single-column replacements `T^{c_j -> c_k}` and `T^{d_k -> d_j}`
/// entering the first-order determinant coefficient.
pub fn build_t_swapped(z: C64, c: &CMat, d: &CMat, b: &WeightMatrix, swap: Swap) -> Result<TMatrix> {
    let mut t = build_t(z, c, d, b)?;
    match swap {
        Swap::CColumn { j, k } => {
            if t.from_d[j] {
                return Err(Error::Invalid(format!(
                    "column {j} of T is a D column; c_j -> c_k swap needs Re(i b_j z) < 0"
                )));
            }
            if !t.from_d[k] {
                return Err(Error::Invalid(format!(
                    "swap target index {k} must be a D column (Re(i b_k z) > 0)"
                )));
            }
            t.matrix.set_col(j, &c.col(k));
        }
        Swap::DColumn { k, j } => {
            if !t.from_d[k] {
                return Err(Error::Invalid(format!(
                    "column {k} of T is a C column; d_k -> d_j swap needs Re(i b_k z) > 0"
                )));
            }
            if t.from_d[j] {
                return Err(Error::Invalid(format!(
                    "swap source index {j} must be a C column (Re(i b_j z) < 0)"
                )));
            }
            t.matrix.set_col(k, &d.col(j));
        }
    }
    Ok(t)
}

/// det T at each sector representative of the fan.
pub fn sector_dets(bvp: &DiracBVP, fan: &SectorFan) -> Result<Vec<C64>> {
    fan.sectors
        .iter()
        .map(|s| Ok(build_t(s.representative, &bvp.boundary.c, &bvp.boundary.d, &bvp.weight)?.det()))
        .collect()
}
