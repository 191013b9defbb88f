//! Per-sector asymptotic data of the characteristic determinant.
//!
//! Deep inside a sector `Delta(lambda) = gamma_p (omega_0 (1 + o(1)) +
//! (omega_1 + o(1))/lambda) e^{i tau_p lambda}`; this module computes the four
//! coefficients and evaluates the order-0/order-1 models.

use crate::linalg::{c64, C64, CMat, ZERO};
use crate::sectors::{build_t, build_t_swapped, is_admissible, Sector, Swap};
use crate::system::DiracBVP;
use crate::{Error, Result};

/// Sector-constant coefficients of the determinant expansion.
#[derive(Debug, Clone)]
pub struct SectorModel {
    pub sector_index: usize,
    /// `gamma_p = exp(sum_{Re(i b_j z_p) > 0} i b_j int_0^1 q_jj)`.
    pub gamma: C64,
    /// `tau_p = sum_{Re(i b_j z_p) > 0} b_j`.
    pub tau: C64,
    /// `omega_0 = det T_{i z_p B}(C, D)`.
    pub omega0: C64,
    /// First-order coefficient; `None` when a required endpoint-continuity
    /// flag is missing.
    pub omega1: Option<C64>,
}

/// `(gamma_p, tau_p)` at a sector's representative.
///
/// `gamma_p = prod det W_jj(1)` over the contributing blocks of the gauge
/// factor `W' = -i B Q_1 W`, i.e. `exp(-sum i b_j int q_jj)`.  (The sign in
/// the exponent follows from the Liouville identity for W; the periodic
/// scalar fixture with constant q pins it: `Delta = 1 - e^{-i q} e^{i
/// lambda}`, so the lower-sector coefficient is `e^{-i q}`.)
pub fn gamma_tau(bvp: &DiracBVP, sector: &Sector) -> (C64, C64) {
    let mut tau = ZERO;
    let mut expo = ZERO;
    for (j, &bj) in bvp.weight.entries().iter().enumerate() {
        if sector.signs[j] > 0 {
            tau += bj;
            expo -= c64(0.0, 1.0) * bj * bvp.potential.integral_entry(j, j);
        }
    }
    (expo.exp(), tau)
}

/// `omega_0(z) = det T_{izB}(C, D)` at an admissible point.
pub fn omega0(z: C64, c: &CMat, d: &CMat, b: &crate::system::WeightMatrix) -> Result<C64> {
    Ok(build_t(z, c, d, b)?.det())
}

/// `omega_1(z)`: the first-order coefficient
///
/// ```text
/// sum_{Re(i b_j z) < 0 < Re(i b_k z)}
///     [det T^{c_j -> c_k} b_k q_{kj}(0) - det T^{d_k -> d_j} b_j q_{jk}(1)] / (b_k - b_j)
/// ```
///
/// Every pair entering the sum needs `q_{kj}` continuous at 0 and `q_{jk}`
/// continuous at 1; a missing flag makes the value undefined rather than
/// silently zero.
pub fn omega1(z: C64, bvp: &DiracBVP) -> Result<C64> {
    let b = &bvp.weight;
    if !is_admissible(z, b)? {
        return Err(Error::NotAdmissible(format!("z = {z}")));
    }
    let n = b.n();
    let (c, d) = (&bvp.boundary.c, &bvp.boundary.d);
    let q0 = bvp.potential.q0();
    let q1 = bvp.potential.q1();
    let mut total = ZERO;
    for j in 0..n {
        if (c64(0.0, 1.0) * b.entry(j) * z).re >= 0.0 {
            continue;
        }
        for k in 0..n {
            if (c64(0.0, 1.0) * b.entry(k) * z).re <= 0.0 {
                continue;
            }
            // opposite strict signs guarantee b_j != b_k
            if !bvp.potential.continuous_at_ends(k, j) || !bvp.potential.continuous_at_ends(j, k) {
                return Err(Error::Omega1Undefined(format!(
                    "pair (j, k) = ({}, {}) needs q_{{{k}{j}}} continuous at 0 and q_{{{j}{k}}} continuous at 1",
                    j + 1,
                    k + 1,
                )));
            }
            let tc = build_t_swapped(z, c, d, b, Swap::CColumn { j, k })?.det();
            let td = build_t_swapped(z, c, d, b, Swap::DColumn { k, j })?.det();
            let num = tc * b.entry(k) * q0[(k, j)] - td * b.entry(j) * q1[(j, k)];
            total += num / (b.entry(k) - b.entry(j));
        }
    }
    Ok(total)
}

/// Assemble the full per-sector model.
pub fn sector_model(bvp: &DiracBVP, sector: &Sector) -> Result<SectorModel> {
    let (gamma, tau) = gamma_tau(bvp, sector);
    let w0 = omega0(sector.representative, &bvp.boundary.c, &bvp.boundary.d, &bvp.weight)?;
    let w1 = match omega1(sector.representative, bvp) {
        Ok(v) => Some(v),
        Err(Error::Omega1Undefined(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(SectorModel { sector_index: sector.index, gamma, tau, omega0: w0, omega1: w1 })
}

/// Evaluate the order-0 or order-1 determinant model at `lambda`, which must
/// lie strictly inside the model's sector.
pub fn delta_model(lambda: C64, sector: &Sector, model: &SectorModel, order: u8) -> Result<C64> {
    if !sector.contains(lambda) {
        return Err(Error::SectorMismatch(format!(
            "lambda = {lambda} not inside sector {}",
            sector.index
        )));
    }
    let envelope = model.gamma * (c64(0.0, 1.0) * model.tau * lambda).exp();
    match order {
        0 => Ok(model.omega0 * envelope),
        1 => {
            if lambda.norm() < 1.0 {
                return Err(Error::Invalid("order-1 model needs |lambda| >= 1".into()));
            }
            let w1 = model.omega1.ok_or_else(|| {
                Error::Omega1Undefined("order-1 model requested but omega1 is undefined".into())
            })?;
            Ok((model.omega0 + w1 / lambda) * envelope)
        }
        _ => Err(Error::Invalid(format!("unsupported model order {order}"))),
    }
}
