//! Closed-form expressions for the driven three-level ladder system.
//!
//! These are the analytic counterparts of the numerical steady state: the
//! exact excited-state population, the light shift of the weak resonance
//! induced by the strong dressing laser, the corrected resonance position,
//! the maximum population and the optimal drive ratio, and the limit and
//! effective linewidths of the two-step fluorescence profile.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Error;
use crate::model::{build_generator, AtomSpec, LaserDrive, Scheme};
use crate::steady_state::steady_state;
use crate::Result;

/// Exact steady-state excited population.
///
/// `pe = omega_st^2 omega_w^2 / D` with the full denominator
///
/// ```text
/// D = beta_eg * ( 4 dw (dw+dst) (4 dw (dw+dst) + 2 ow^2 - 2 ost^2)
///                 + 4 dw^2 gamma^2 + ost^4 )
///   + (beta_eg - 1) * 2 ow^2 (2 dw^2 + 4 dw dst - ost^2)
///   + 2 ow^2 (4 (dw+dst)^2 + gamma^2 + ow^2)
/// ```
///
/// No approximation is involved; this matches the 9x9 linear solve to
/// rounding. A vanishing denominator (possible only with `omega_w = 0`)
/// signals the same degeneracy that makes the linear solve singular.
pub fn pe_exact(atom: &AtomSpec, drive: &LaserDrive) -> Result<f64> {
    let g2 = atom.gamma * atom.gamma;
    let b = atom.beta_eg;
    let ow2 = drive.omega_w * drive.omega_w;
    let ost2 = drive.omega_st * drive.omega_st;
    let dw = drive.delta_w;
    let dtot = drive.delta_w + drive.delta_st;

    let two_photon = 4.0 * dw * dtot;
    let denom = b
        * (two_photon * (two_photon + 2.0 * ow2 - 2.0 * ost2) + 4.0 * dw * dw * g2 + ost2 * ost2)
        + (b - 1.0) * 2.0 * ow2 * (2.0 * dw * dw + 4.0 * dw * drive.delta_st - ost2)
        + 2.0 * ow2 * (4.0 * dtot * dtot + g2 + ow2);

    if denom == 0.0 {
        return Err(Error::DivisionByZero(
            "denominator vanishes (omega_w = 0 with degenerate detunings)".into(),
        ));
    }
    Ok(ost2 * ow2 / denom)
}

/// Light shift of the weak resonance from dressing by the strong laser:
/// `delta_ls = -(sqrt(omega_st^2 + delta_st^2) + delta_st) / 2`.
///
/// For red detuning the difference is evaluated in rationalized form to
/// avoid cancellation at weak dressing.
pub fn light_shift(drive: &LaserDrive) -> f64 {
    let s = drive.omega_st * drive.omega_st + drive.delta_st * drive.delta_st;
    let root = s.sqrt();
    if drive.delta_st < 0.0 {
        // -(root + dst)/2 = -ost^2 / (2 (root - dst)), exactly
        -(drive.omega_st * drive.omega_st) / (2.0 * (root - drive.delta_st))
    } else {
        -(root + drive.delta_st) / 2.0
    }
}

/// Far-detuned approximation of the light shift,
/// `delta_ls ~ omega_st^2 / (4 delta_st)`, valid for `delta_st^2 >> omega_st^2`.
pub fn light_shift_far_detuned(drive: &LaserDrive) -> f64 {
    drive.omega_st * drive.omega_st / (4.0 * drive.delta_st)
}

/// Position of the excited-population maximum versus `delta_w`, to first
/// order in `gamma^2 / (omega_st^2 + delta_st^2)`:
/// `delta_w = delta_ls (1 - gamma^2 / (4 (omega_st^2 + delta_st^2)))`.
///
/// Reduces to the bare light shift for `gamma -> 0`. Accurate when
/// `omega_w^2 << gamma^2 |delta_w / delta_st|`.
pub fn corrected_resonance(atom: &AtomSpec, drive: &LaserDrive) -> f64 {
    let s = drive.omega_st * drive.omega_st + drive.delta_st * drive.delta_st;
    light_shift(drive) * (1.0 - atom.gamma * atom.gamma / (4.0 * s))
}

/// Maximum excited population over `delta_w` (the peak height of the
/// two-step resonance), valid for `omega_w^2 << omega_st^2`:
///
/// ```text
/// pe_max = 1 / ( 4 + 2 dst/d_ls + beta_eg 4 d_ls^2 g^2 / (ost^2 ow^2)
///                + (beta_eg - 1) 4 d_ls (d_ls + 2 dst) / ost^2
///                + 2 g^2 / ost^2 )
/// ```
pub fn pe_max(atom: &AtomSpec, drive: &LaserDrive) -> f64 {
    if drive.omega_st == 0.0 {
        return 0.0; // no dressing, no two-step excitation pathway
    }
    let d_ls = light_shift(drive);
    let g2 = atom.gamma * atom.gamma;
    let ost2 = drive.omega_st * drive.omega_st;
    let ow2 = drive.omega_w * drive.omega_w;
    let b = atom.beta_eg;
    1.0 / (4.0
        + 2.0 * drive.delta_st / d_ls
        + b * 4.0 * d_ls * d_ls * g2 / (ost2 * ow2)
        + (b - 1.0) * 4.0 * d_ls * (d_ls + 2.0 * drive.delta_st) / ost2
        + 2.0 * g2 / ost2)
}

/// Drive-optimization report: the ratio `(omega_st / delta_st)^2` that
/// maximizes the peak population at fixed `omega_w`, the strong Rabi
/// frequency it implies, the population reached there, and flags for the
/// approximations behind the closed-form optimum. Flags gate each inequality
/// at a factor of ten on the frequency (a factor of 100 on its square).
#[derive(Debug, Clone, Serialize)]
pub struct OptimumReport {
    /// Optimal `(omega_st / delta_st)^2`.
    pub ratio_sq: f64,
    /// `sqrt(ratio_sq) * |delta_st|`, rad/s.
    pub omega_st_opt: f64,
    /// Peak population at the optimum.
    pub pe_max_opt: f64,
    /// `omega_w^2 << omega_st^2`.
    pub weak_drive_ok: bool,
    /// `omega_st^2 << delta_st^2`.
    pub far_detuned_ok: bool,
    /// `gamma^2 << omega_st^2 + delta_st^2`.
    pub strong_dressing_ok: bool,
}

/// Optimal drive ratio at fixed `omega_w`:
/// `(omega_st / delta_st)^2_opt = 4 (omega_w / gamma) sqrt(2 / beta_eg)`.
///
/// With `omega_st` supplied the optimum population uses the full form
/// `1 / (4 + 2 (beta_eg - 1) + 2 sqrt(2 beta_eg) gamma / omega_w
///        + 2 gamma^2 / omega_st^2)`;
/// otherwise the simplified `omega_w / (2 sqrt(2 beta_eg) gamma)`.
pub fn optimal_ratio(
    atom: &AtomSpec,
    omega_w: f64,
    delta_st: f64,
    omega_st: Option<f64>,
) -> OptimumReport {
    let b = atom.beta_eg;
    let g = atom.gamma;
    let ratio_sq = 4.0 * (omega_w / g) * (2.0 / b).sqrt();
    let omega_st_opt = ratio_sq.sqrt() * delta_st.abs();
    let pe_max_opt = match omega_st {
        Some(ost) => {
            1.0 / (4.0
                + 2.0 * (b - 1.0)
                + 2.0 * (2.0 * b).sqrt() * g / omega_w
                + 2.0 * g * g / (ost * ost))
        }
        None => omega_w / (2.0 * (2.0 * b).sqrt() * g),
    };
    let ost_for_flags = omega_st.unwrap_or(omega_st_opt);
    OptimumReport {
        ratio_sq,
        omega_st_opt,
        pe_max_opt,
        weak_drive_ok: omega_w * omega_w * 100.0 <= ost_for_flags * ost_for_flags,
        far_detuned_ok: ost_for_flags * ost_for_flags * 100.0 <= delta_st * delta_st,
        strong_dressing_ok: g * g * 100.0 <= ost_for_flags * ost_for_flags + delta_st * delta_st,
    }
}

/// Limit linewidth of the two-step resonance in the vanishing-`omega_w`
/// limit (FWHM):
///
/// ```text
/// Gamma_0 = |2 delta_ls| sqrt(2 + 4 S / gamma^2) / (1 + 4 S / gamma^2),
/// S = omega_st^2 + delta_st^2
/// ```
///
/// It saturates at `gamma / 2` for `omega_st^2 / delta_st^2 >> 1` and falls
/// to zero at weak dressing.
pub fn gamma_limit(atom: &AtomSpec, drive: &LaserDrive) -> f64 {
    let s = drive.omega_st * drive.omega_st + drive.delta_st * drive.delta_st;
    let g2 = atom.gamma * atom.gamma;
    let x = 4.0 * s / g2;
    (2.0 * light_shift(drive)).abs() * (2.0 + x).sqrt() / (1.0 + x)
}

/// Simplified limit linewidth for `gamma^2 << omega_st^2 + delta_st^2`:
/// `Gamma_0 ~ (gamma / 2) (1 - 1 / sqrt(1 + omega_st^2 / delta_st^2))`.
pub fn gamma_limit_simplified(atom: &AtomSpec, drive: &LaserDrive) -> f64 {
    if drive.omega_st == 0.0 {
        return 0.0;
    }
    let r2 = (drive.omega_st / drive.delta_st) * (drive.omega_st / drive.delta_st);
    atom.gamma / 2.0 * (1.0 - 1.0 / (1.0 + r2).sqrt())
}

/// Effective linewidth of the fluorescence resonance, including power
/// broadening by the weak coupling: `Gamma_eff = sqrt(Gamma_0^2 + 2 omega_w^2)`.
pub fn gamma_eff(atom: &AtomSpec, drive: &LaserDrive) -> f64 {
    let g0 = gamma_limit(atom, drive);
    (g0 * g0 + 2.0 * drive.omega_w * drive.omega_w).sqrt()
}

/// Grid half-span (in units of gamma) of the detuning window scanned by
/// [`lambda_pe_max`].
pub const LAMBDA_SCAN_SPAN: f64 = 5.0;

/// Points per detuning axis in [`lambda_pe_max`].
pub const LAMBDA_SCAN_POINTS: usize = 101;

/// Maximum excited population of the Lambda configuration over both
/// detunings, at the drive's Rabi frequencies.
///
/// Scans a 101x101 grid over `[-5 gamma, 5 gamma]` for both detunings, then
/// refines the maximum by a local quadratic fit along each axis (skipped on
/// the window edge, where the grid value stands).
pub fn lambda_pe_max(atom: &AtomSpec, drive: &LaserDrive) -> Result<f64> {
    let g = atom.gamma;
    let n = LAMBDA_SCAN_POINTS;
    let span = LAMBDA_SCAN_SPAN * g;
    let step = 2.0 * span / (n - 1) as f64;
    let grid: Vec<f64> = (0..n).map(|i| -span + i as f64 * step).collect();

    let pe_at = |dw: f64, dst: f64| -> Result<f64> {
        let d = LaserDrive {
            delta_w: dw,
            delta_st: dst,
            ..*drive
        };
        let gen = build_generator(atom, &d, Scheme::Lambda)?;
        Ok(steady_state(&gen)?.pop_e())
    };

    let rows: Vec<Vec<f64>> = grid
        .par_iter()
        .map(|&dw| {
            grid.iter()
                .map(|&dst| pe_at(dw, dst))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let (mut bi, mut bj, mut best) = (0usize, 0usize, f64::NEG_INFINITY);
    for (i, row) in rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if v > best {
                best = v;
                bi = i;
                bj = j;
            }
        }
    }

    // Per-axis parabolic refinement around the discrete maximum.
    let mut dw = grid[bi];
    let mut dst = grid[bj];
    if bi > 0 && bi < n - 1 {
        dw += parabola_offset(rows[bi - 1][bj], rows[bi][bj], rows[bi + 1][bj]) * step;
    }
    if bj > 0 && bj < n - 1 {
        dst += parabola_offset(rows[bi][bj - 1], rows[bi][bj], rows[bi][bj + 1]) * step;
    }
    let refined = pe_at(dw, dst)?;
    Ok(best.max(refined))
}

/// Vertex offset (in units of the grid step, within [-0.5, 0.5]) of the
/// parabola through three equally spaced samples.
pub(crate) fn parabola_offset(left: f64, mid: f64, right: f64) -> f64 {
    let denom = left - 2.0 * mid + right;
    if denom == 0.0 {
        0.0
    } else {
        (0.5 * (left - right) / denom).clamp(-0.5, 0.5)
    }
}
