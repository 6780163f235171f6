//! Doppler-cooling observables: radiative force, damping coefficient,
//! momentum diffusion, limit temperature, capture-range curve and drive
//! optimization.
//!
//! Geometry is one-dimensional with both beams along one axis; the positive
//! direction is that of the weak beam. The net photon momentum per cycle is
//! `hbar k_eff` with `k_eff = k_w + k_st` and `k_st` signed by the relative
//! propagation direction.

use rayon::prelude::*;
use serde::Serialize;

use crate::analytics;
use crate::consts::{HBAR, KB};
use crate::error::Error;
use crate::model::{
    build_generator, doppler_shift, effective_wavevector, AtomSpec, LaserDrive, Scheme,
};
use crate::optimize::golden_section_max;
use crate::scan::{Column, ScanResult};
use crate::steady_state::steady_state;
use crate::Result;

/// Relative agreement demanded between the population and coherence forms of
/// the radiative force on every evaluation.
pub const FORCE_IDENTITY_TOL: f64 = 1e-8;

/// Both equivalent expressions for the radiative force, evaluated from the
/// same steady state: `(population form, coherence form)`, in newtons.
///
/// The population form counts scattered momentum,
/// `hbar (k_w beta_eg + k_st b_st) gamma pe` with `b_st = 1` for the ladder
/// and `1 - beta_eg` for the Lambda scheme. The coherence form is the
/// gradient of the interaction energy,
/// `hbar k_w omega_w Im(rho_low) + hbar k_st omega_st Im(rho_up)`. The
/// stationary master equation makes them identical.
pub fn force_forms(
    atom: &AtomSpec,
    drive: &LaserDrive,
    scheme: Scheme,
    v: f64,
) -> Result<(f64, f64)> {
    if !v.is_finite() {
        return Err(Error::NonFinite("velocity".into()));
    }
    let shifted = doppler_shift(drive, atom, v);
    let gen = build_generator(atom, &shifted, scheme)?;
    let rho = steady_state(&gen)?;

    let k_w = atom.k_w();
    let k_st = effective_wavevector(atom, drive.st_copropagates) - k_w;
    let pe = rho.pop_e();

    let population_form = match scheme {
        Scheme::Ladder => HBAR * (k_w * atom.beta_eg + k_st) * atom.gamma * pe,
        Scheme::Lambda => HBAR * (k_w * atom.beta_eg + k_st * atom.beta_em()) * atom.gamma * pe,
    };
    let coherence_form = match scheme {
        Scheme::Ladder => {
            HBAR * k_w * shifted.omega_w * rho.coherence(0, 1).im
                + HBAR * k_st * shifted.omega_st * rho.coherence(1, 2).im
        }
        Scheme::Lambda => {
            HBAR * k_w * shifted.omega_w * rho.coherence(0, 2).im
                + HBAR * k_st * shifted.omega_st * rho.coherence(1, 2).im
        }
    };
    Ok((population_form, coherence_form))
}

/// Radiative force on an atom moving with velocity `v`, in newtons.
///
/// Agreement of the two force forms to [`FORCE_IDENTITY_TOL`] is asserted on
/// every call; disagreement would mean the stationarity relations are broken
/// and is reported as an error.
pub fn force(atom: &AtomSpec, drive: &LaserDrive, scheme: Scheme, v: f64) -> Result<f64> {
    let (population_form, coherence_form) = force_forms(atom, drive, scheme, v)?;
    let scale = population_form.abs().max(coherence_form.abs());
    if (population_form - coherence_form).abs() > FORCE_IDENTITY_TOL * scale + f64::MIN_POSITIVE {
        return Err(Error::Numerical(format!(
            "force forms disagree: population {population_form:.12e} vs coherence {coherence_form:.12e}"
        )));
    }
    Ok(population_form)
}

/// Damping coefficient and its closed-form cross-check.
#[derive(Debug, Clone, Serialize)]
pub struct DampingReport {
    /// Numeric `-dF/dv` at `v = 0`, kg/s. The authoritative value.
    pub beta: f64,
    /// Closed-form slope estimate, kg/s.
    pub beta_analytic: f64,
    /// Whether the closed form's premise holds (the weak Rabi frequency is
    /// the smallest parameter, by a factor of ten).
    pub analytic_valid: bool,
    /// Whether halving the differentiation step moved the Richardson value
    /// by less than 0.1%.
    pub step_converged: bool,
}

/// Damping coefficient `beta = -dF/dv` at `v = 0`.
///
/// The derivative is a central difference with step `0.01 Gamma_eff / k_eff`
/// and one Richardson refinement; a second refinement at half step flags
/// non-convergence. The closed-form slope is reported alongside for
/// comparison; the numeric value is the one consumers should use.
pub fn damping(atom: &AtomSpec, drive: &LaserDrive, scheme: Scheme) -> Result<DampingReport> {
    let k_eff = effective_wavevector(atom, drive.st_copropagates);
    if k_eff == 0.0 {
        return Err(Error::InvalidDrive(
            "effective wavevector vanishes; no velocity dependence to differentiate".into(),
        ));
    }
    let h = 0.01 * analytics::gamma_eff(atom, drive) / k_eff.abs();

    let central = |step: f64| -> Result<f64> {
        Ok((force(atom, drive, scheme, step)? - force(atom, drive, scheme, -step)?) / (2.0 * step))
    };
    let d1 = central(h)?;
    let d2 = central(h / 2.0)?;
    let d3 = central(h / 4.0)?;
    let rich1 = (4.0 * d2 - d1) / 3.0;
    let rich2 = (4.0 * d3 - d2) / 3.0;
    let beta = -rich1;
    let step_converged = (rich2 - rich1).abs() <= 1e-3 * rich2.abs().max(f64::MIN_POSITIVE);

    Ok(DampingReport {
        beta,
        beta_analytic: damping_analytic(atom, drive),
        analytic_valid: weak_drive_is_smallest(atom, drive),
        step_converged,
    })
}

/// Closed-form slope of the force with velocity at `v = 0` (copropagating or
/// counterpropagating per the drive), valid when the weak Rabi frequency is
/// the smallest parameter:
///
/// ```text
/// beta ~ -hbar (k_w + k_st)^2 gamma pe(0)^2
///        * [ 8 g^2 dw k_w
///            + 8 (4 dw (dst + dw) - ost^2) (dw (k_st + k_w) + (dst + dw) k_w) ]
///        / (ost^2 ow^2 (k_w + k_st))
/// ```
pub fn damping_analytic(atom: &AtomSpec, drive: &LaserDrive) -> f64 {
    let k_w = atom.k_w();
    let k_st = effective_wavevector(atom, drive.st_copropagates) - k_w;
    let k_sum = k_w + k_st;
    let g = atom.gamma;
    let dw = drive.delta_w;
    let dst = drive.delta_st;
    let ost2 = drive.omega_st * drive.omega_st;
    let ow2 = drive.omega_w * drive.omega_w;
    let pe0 = match analytics::pe_exact(atom, drive) {
        Ok(p) => p,
        Err(_) => return 0.0,
    };
    let bracket = 8.0 * g * g * dw * k_w
        + 8.0 * (4.0 * dw * (dst + dw) - ost2) * (dw * (k_st + k_w) + (dst + dw) * k_w);
    -HBAR * k_sum * k_sum * g * pe0 * pe0 * bracket / (ost2 * ow2 * k_sum)
}

fn weak_drive_is_smallest(atom: &AtomSpec, drive: &LaserDrive) -> bool {
    let ow2 = drive.omega_w * drive.omega_w;
    let others = [
        drive.omega_st * drive.omega_st,
        drive.delta_st * drive.delta_st,
        atom.gamma * atom.gamma,
        drive.delta_w * drive.delta_w,
    ];
    others.iter().all(|&o| ow2 * 100.0 <= o)
}

/// Momentum-diffusion coefficient from spontaneous scattering,
/// `D = 1/2 hbar^2 k_eff^2 gamma pe(0)`, kg^2 m^2 / s^3.
pub fn diffusion(atom: &AtomSpec, drive: &LaserDrive, scheme: Scheme) -> Result<f64> {
    let gen = build_generator(atom, drive, scheme)?;
    let pe0 = steady_state(&gen)?.pop_e();
    let k_eff = effective_wavevector(atom, drive.st_copropagates);
    Ok(0.5 * HBAR * HBAR * k_eff * k_eff * atom.gamma * pe0)
}

/// Cooling summary for one drive point.
#[derive(Debug, Clone, Serialize)]
pub struct CoolingReport {
    /// Force on an atom at rest, N. Shifts the trap equilibrium; does not
    /// enter the temperature.
    pub force_zero: f64,
    /// Damping coefficient, kg/s.
    pub beta_damp: f64,
    /// Momentum diffusion, kg^2 m^2 / s^3.
    pub diffusion: f64,
    /// Doppler limit temperature `D / (kB beta)`, K.
    pub temperature: f64,
    /// `kB T / (hbar gamma)`, for mass-free comparisons.
    pub temperature_dimensionless: f64,
    /// Effective linewidth used for the derivative step and the validity
    /// flags, rad/s.
    pub gamma_eff_used: f64,
    /// Effective wavevector actually used (signed), rad/m.
    pub k_eff: f64,
    /// `trap frequency < Gamma_eff` (sidebands unresolved); present only
    /// when a trap frequency was supplied.
    pub sidebands_unresolved: Option<bool>,
    /// Recoil frequency `hbar k_eff^2 / (2 m)` below the effective linewidth.
    pub recoil_below_linewidth: bool,
    /// Derivative step-halving convergence flag from the damping fit.
    pub derivative_converged: bool,
}

/// Doppler limit temperature `kB T = D / beta` with validity flags.
///
/// `trap_omega` (rad/s), when given, feeds the unresolved-sideband flag.
/// Fails with [`Error::NotCooling`] when the damping coefficient is not
/// positive (e.g. blue relative detuning).
pub fn doppler_temperature(
    atom: &AtomSpec,
    drive: &LaserDrive,
    scheme: Scheme,
    trap_omega: Option<f64>,
) -> Result<CoolingReport> {
    let damp = damping(atom, drive, scheme)?;
    if damp.beta <= 0.0 {
        return Err(Error::NotCooling { beta: damp.beta });
    }
    let d = diffusion(atom, drive, scheme)?;
    let temperature = d / (KB * damp.beta);
    let g_eff = analytics::gamma_eff(atom, drive);
    let k_eff = effective_wavevector(atom, drive.st_copropagates);
    let recoil = HBAR * k_eff * k_eff / (2.0 * atom.mass);
    Ok(CoolingReport {
        force_zero: force(atom, drive, scheme, 0.0)?,
        beta_damp: damp.beta,
        diffusion: d,
        temperature,
        temperature_dimensionless: KB * temperature / (HBAR * atom.gamma),
        gamma_eff_used: g_eff,
        k_eff,
        sidebands_unresolved: trap_omega.map(|w| w < g_eff),
        recoil_below_linewidth: recoil < g_eff,
        derivative_converged: damp.step_converged,
    })
}

/// Two-level Doppler limit `hbar gamma / (2 kB)`, K. Reference scale for the
/// dipole-line cooling the two-step scheme is compared against.
pub fn two_level_doppler_limit(gamma: f64) -> f64 {
    HBAR * gamma / (2.0 * KB)
}

/// Weak-laser detuning that minimizes the Doppler temperature:
/// `delta_w = delta_ls - Gamma_eff / 2`.
pub fn cooling_detuning(atom: &AtomSpec, drive: &LaserDrive) -> f64 {
    analytics::light_shift(drive) - analytics::gamma_eff(atom, drive) / 2.0
}

/// Doppler limit temperature versus the drive ratio `|omega_st / delta_st|`.
///
/// For each ratio the strong Rabi frequency is `ratio * |delta_st|` and the
/// weak detuning sits at the minimum-temperature condition. Columns:
/// `t_kelvin` and `t_dimensionless`.
pub fn min_temperature_curve(
    atom: &AtomSpec,
    omega_w: f64,
    delta_st: f64,
    ratio_grid: &[f64],
) -> Result<ScanResult> {
    crate::scan::validate_grid(ratio_grid)?;
    if ratio_grid.iter().any(|&r| r <= 0.0) {
        return Err(Error::InvalidGrid("ratios must be positive".into()));
    }
    let rows: Vec<(f64, f64)> = ratio_grid
        .par_iter()
        .map(|&ratio| {
            let mut d = LaserDrive {
                omega_w,
                omega_st: ratio * delta_st.abs(),
                delta_w: 0.0,
                delta_st,
                st_copropagates: true,
            };
            d.delta_w = cooling_detuning(atom, &d);
            let rep = doppler_temperature(atom, &d, Scheme::Ladder, None)
                .map_err(|e| e.at_grid_point("ratio", ratio))?;
            Ok((rep.temperature, rep.temperature_dimensionless))
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(ScanResult {
        abscissa_name: "ratio_omega_st_over_delta_st".into(),
        abscissa: ratio_grid.to_vec(),
        columns: vec![
            Column {
                name: "t_kelvin".into(),
                values: rows.iter().map(|r| r.0).collect(),
            },
            Column {
                name: "t_dimensionless".into(),
                values: rows.iter().map(|r| r.1).collect(),
            },
        ],
        fixed: vec![
            ("atom".into(), atom.name.clone()),
            (
                "gamma_mhz".into(),
                format!("{}", crate::consts::to_mhz(atom.gamma)),
            ),
            ("beta_eg".into(), format!("{}", atom.beta_eg)),
            (
                "omega_w_mhz".into(),
                format!("{}", crate::consts::to_mhz(omega_w)),
            ),
            (
                "delta_st_mhz".into(),
                format!("{}", crate::consts::to_mhz(delta_st)),
            ),
            ("delta_w".into(), "light_shift - gamma_eff/2".into()),
        ],
    })
}

/// Effective cooling force `F(v_rms) - F(-v_rms)` over a velocity grid.
///
/// The abscissa is emitted as `k_eff v_rms / (gamma / 2)` and the force
/// column in units of `hbar k_eff gamma`, both dimensionless.
pub fn effective_force_curve(
    atom: &AtomSpec,
    drive: &LaserDrive,
    scheme: Scheme,
    vrms_grid: &[f64],
) -> Result<ScanResult> {
    crate::scan::validate_grid(vrms_grid)?;
    if vrms_grid.iter().any(|&v| v < 0.0) {
        return Err(Error::InvalidGrid("v_rms must be non-negative".into()));
    }
    let k_eff = effective_wavevector(atom, drive.st_copropagates);
    let unit = HBAR * k_eff * atom.gamma;
    let values: Vec<f64> = vrms_grid
        .par_iter()
        .map(|&v| Ok((force(atom, drive, scheme, v)? - force(atom, drive, scheme, -v)?) / unit))
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanResult {
        abscissa_name: "k_eff_vrms_over_half_gamma".into(),
        abscissa: vrms_grid
            .iter()
            .map(|&v| k_eff * v / (atom.gamma / 2.0))
            .collect(),
        columns: vec![Column {
            name: "force_hbar_k_gamma".into(),
            values,
        }],
        fixed: vec![
            ("atom".into(), atom.name.clone()),
            (
                "gamma_mhz".into(),
                format!("{}", crate::consts::to_mhz(atom.gamma)),
            ),
            ("beta_eg".into(), format!("{}", atom.beta_eg)),
            ("scheme".into(), scheme.to_string()),
            (
                "omega_w_mhz".into(),
                format!("{}", crate::consts::to_mhz(drive.omega_w)),
            ),
            (
                "omega_st_mhz".into(),
                format!("{}", crate::consts::to_mhz(drive.omega_st)),
            ),
            (
                "delta_w_mhz".into(),
                format!("{}", crate::consts::to_mhz(drive.delta_w)),
            ),
            (
                "delta_st_mhz".into(),
                format!("{}", crate::consts::to_mhz(drive.delta_st)),
            ),
        ],
    })
}

/// Search interval for [`optimize_drive`], as fractions of `|delta_st|`.
pub const OPTIMIZE_OMEGA_ST_RANGE: (f64, f64) = (1e-3, 1.0);

/// Relative tolerance of the golden-section search in [`optimize_drive`].
pub const OPTIMIZE_REL_TOL: f64 = 1e-4;

/// Numerically maximize the peak population over the strong Rabi frequency
/// at fixed `delta_st`, then set the weak detuning to the cooling optimum.
///
/// The maximized objective is the peak population `pe_max` (the resonance
/// height with the weak detuning tracking the shifted resonance). The search
/// runs over `omega_st` in `[1e-3, 1] |delta_st|` by golden section to a
/// relative tolerance of 1e-4; an optimum on the interval edge is an error.
pub fn optimize_drive(atom: &AtomSpec, omega_w: f64, delta_st: f64) -> Result<LaserDrive> {
    if omega_w.is_nan() || omega_w <= 0.0 || !omega_w.is_finite() {
        return Err(Error::InvalidDrive(format!(
            "omega_w must be positive, got {omega_w}"
        )));
    }
    if delta_st.is_nan() || delta_st >= 0.0 || !delta_st.is_finite() {
        return Err(Error::InvalidDrive(format!(
            "delta_st must be negative, got {delta_st}"
        )));
    }
    let lo = OPTIMIZE_OMEGA_ST_RANGE.0 * delta_st.abs();
    let hi = OPTIMIZE_OMEGA_ST_RANGE.1 * delta_st.abs();
    let objective = |omega_st: f64| {
        analytics::pe_max(
            atom,
            &LaserDrive {
                omega_w,
                omega_st,
                delta_w: 0.0,
                delta_st,
                st_copropagates: true,
            },
        )
    };
    let (omega_st, _) = golden_section_max(objective, lo, hi, OPTIMIZE_REL_TOL);
    let margin = 2.0 * OPTIMIZE_REL_TOL * (hi - lo);
    if omega_st - lo < margin || hi - omega_st < margin {
        return Err(Error::OptimumAtBoundary { omega_st });
    }
    let mut drive = LaserDrive {
        omega_w,
        omega_st,
        delta_w: 0.0,
        delta_st,
        st_copropagates: true,
    };
    drive.delta_w = cooling_detuning(atom, &drive);
    Ok(drive)
}
