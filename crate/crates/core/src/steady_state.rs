//! Steady state of the master equation and a time-evolution oracle.
//!
//! The steady state solves `L vec(rho) = 0` with unit trace. One redundant
//! population row of `L` (they sum to zero) is replaced by the trace
//! constraint and the resulting 9x9 system is solved by LU with partial
//! pivoting. A reciprocal-condition estimate from the U diagonal guards
//! against a kernel of dimension larger than one.
//!
//! `evolve` is a deliberately simple fixed-step classical RK4 integrator used
//! as an independent consistency oracle for the linear solve.

use nalgebra::linalg::LU;
use num_complex::Complex64 as C64;

use crate::error::Error;
use crate::model::{DensityMatrix3, Generator, Matrix9c, Vector9c};
use crate::Result;

/// Reciprocal-condition estimate below which the trace-constrained system is
/// treated as rank deficient (non-unique steady state).
pub const DEGENERACY_RCOND: f64 = 1e-12;

/// Residual bound of the returned steady state: `|L vec(rho)|_inf` must not
/// exceed this factor times `|L|_inf`.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// Exact numerical steady state of the generator.
///
/// Fails with [`Error::DegenerateSteadyState`] when the null space is not
/// one-dimensional to within [`DEGENERACY_RCOND`], e.g. with both lasers off,
/// where any population distribution over the dark levels is stationary.
pub fn steady_state(gen: &Generator) -> Result<DensityMatrix3> {
    let mut a: Matrix9c = *gen.matrix();
    // Replace the d(rho_gg)/dt row by the trace constraint.
    for c in 0..9 {
        a[(0, c)] = C64::ZERO;
    }
    a[(0, 0)] = C64::new(1.0, 0.0);
    a[(0, 4)] = C64::new(1.0, 0.0);
    a[(0, 8)] = C64::new(1.0, 0.0);

    let mut b = Vector9c::zeros();
    b[0] = C64::new(1.0, 0.0);

    let lu = LU::new(a);
    let rcond = rcond_estimate(&lu);
    if rcond < DEGENERACY_RCOND {
        return Err(Error::DegenerateSteadyState {
            rcond,
            detail: "kernel of the trace-constrained generator is not one-dimensional".into(),
        });
    }
    let x = lu.solve(&b).ok_or(Error::DegenerateSteadyState {
        rcond,
        detail: "LU back-substitution failed".into(),
    })?;

    // Residual against the *original* generator.
    let r = gen.matrix() * x;
    let residual = r.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let bound = RESIDUAL_TOL * gen.norm_inf();
    if residual > bound {
        return Err(Error::Numerical(format!(
            "steady-state residual {residual:.3e} exceeds {bound:.3e}"
        )));
    }

    DensityMatrix3::try_new_hermitized(DensityMatrix3::from_vector(&x))
}

/// Cheap reciprocal-condition estimate `min |u_ii| / max |u_ii|` from the LU
/// factors. Adequate for detecting rank deficiency of a 9x9 system.
fn rcond_estimate(lu: &LU<C64, nalgebra::Const<9>, nalgebra::Const<9>>) -> f64 {
    let u = lu.u();
    let mut min = f64::INFINITY;
    let mut max = 0.0f64;
    for i in 0..9 {
        let d = u[(i, i)].norm();
        min = min.min(d);
        max = max.max(d);
    }
    if max == 0.0 {
        0.0
    } else {
        min / max
    }
}

/// Classical fixed-step RK4 propagation of the master equation.
///
/// The state is re-symmetrized (`(rho + rho^dag)/2`) after every step. The
/// step should satisfy `dt <= 0.05 / w_max` with `w_max` the largest of
/// `gamma`, the Rabi frequencies and the detuning magnitudes; larger steps
/// lose trace and abort with [`Error::StepTooLarge`] once the drift passes
/// 1e-6.
pub fn evolve(
    gen: &Generator,
    rho0: &DensityMatrix3,
    t_final: f64,
    dt: f64,
) -> Result<DensityMatrix3> {
    if dt.is_nan() || dt <= 0.0 || !dt.is_finite() {
        return Err(Error::InvalidGrid(format!("dt must be positive, got {dt}")));
    }
    if t_final.is_nan() || t_final < 0.0 || !t_final.is_finite() {
        return Err(Error::InvalidGrid(format!(
            "t_final must be non-negative, got {t_final}"
        )));
    }
    if t_final == 0.0 {
        return Ok(rho0.clone());
    }

    let l = gen.matrix();
    let steps = (t_final / dt).ceil() as usize;
    let h = t_final / steps as f64;
    let h_c = C64::new(h, 0.0);
    let half = C64::new(0.5, 0.0);
    let sixth = C64::new(1.0 / 6.0, 0.0);
    let two = C64::new(2.0, 0.0);

    let mut v = rho0.to_vector();
    for _ in 0..steps {
        let k1 = l * v;
        let k2 = l * (v + k1 * (h_c * half));
        let k3 = l * (v + k2 * (h_c * half));
        let k4 = l * (v + k3 * h_c);
        v += (k1 + k2 * two + k3 * two + k4) * (h_c * sixth);

        // Re-symmetrize in place: rho <- (rho + rho^dag)/2.
        for i in 0..3 {
            for j in (i + 1)..3 {
                let avg = (v[3 * i + j] + v[3 * j + i].conj()) * half;
                v[3 * i + j] = avg;
                v[3 * j + i] = avg.conj();
            }
            v[3 * i + i] = C64::new(v[3 * i + i].re, 0.0);
        }

        let drift = (v[0].re + v[4].re + v[8].re - 1.0).abs();
        if drift > 1e-6 {
            return Err(Error::StepTooLarge { trace_drift: drift });
        }
    }

    DensityMatrix3::try_new_hermitized(DensityMatrix3::from_vector(&v))
}

/// Recommended stable step for [`evolve`]: `0.05 / w_max` with `w_max` the
/// largest angular frequency in the generator's parameters.
pub fn stable_step(gamma: f64, drive: &crate::model::LaserDrive) -> f64 {
    let w_max = gamma
        .max(drive.omega_w)
        .max(drive.omega_st)
        .max(drive.delta_w.abs())
        .max(drive.delta_st.abs());
    0.05 / w_max
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytics;
    use crate::consts::mhz;
    use crate::model::{build_generator, LaserDrive, Scheme};
    use crate::presets;
    use approx::assert_relative_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn drive(omega_w: f64, omega_st: f64, delta_w: f64, delta_st: f64) -> LaserDrive {
        LaserDrive {
            omega_w: mhz(omega_w),
            omega_st: mhz(omega_st),
            delta_w: mhz(delta_w),
            delta_st: mhz(delta_st),
            st_copropagates: true,
        }
    }

    #[test]
    fn matches_closed_form_at_reference_point() {
        // gamma/2pi = 20 MHz, Omega_st/2pi = 100 MHz, Omega_w/2pi = 1 MHz,
        // Delta_st/2pi = -100 MHz, Delta_w at the light shift.
        let atom = presets::calcium();
        for delta_st in [-100.0, -200.0] {
            let mut d = drive(1.0, 100.0, 0.0, delta_st);
            d.delta_w = analytics::light_shift(&d);
            let gen = build_generator(&atom, &d, Scheme::Ladder).unwrap();
            let rho = steady_state(&gen).unwrap();
            let pe = analytics::pe_exact(&atom, &d).unwrap();
            assert_relative_eq!(rho.pop_e(), pe, max_relative = 1e-10);
        }
    }

    #[test]
    fn degenerate_when_all_lasers_off() {
        let atom = presets::calcium();
        let gen = build_generator(&atom, &drive(0.0, 0.0, 1.0, -5.0), Scheme::Ladder).unwrap();
        match steady_state(&gen) {
            Err(Error::DegenerateSteadyState { .. }) => {}
            other => panic!("expected degeneracy, got {other:?}"),
        }
    }

    #[test]
    fn lambda_without_repumper_is_degenerate() {
        // In the Lambda scheme with omega_st = 0 and beta_eg = 1 the
        // metastable state is fully decoupled: any population parked there is
        // stationary, so the kernel is two-dimensional.
        let atom = presets::calcium();
        let gen = build_generator(&atom, &drive(2.0, 0.0, 0.0, 0.0), Scheme::Lambda).unwrap();
        assert!(matches!(
            steady_state(&gen),
            Err(Error::DegenerateSteadyState { .. })
        ));
    }

    #[test]
    fn weak_laser_off_pumps_to_ground() {
        // With only the strong laser on, everything ends up in |g>: the
        // steady state is unique.
        let atom = presets::calcium();
        let gen = build_generator(&atom, &drive(0.0, 100.0, 0.0, -100.0), Scheme::Ladder).unwrap();
        let rho = steady_state(&gen).unwrap();
        assert_relative_eq!(rho.pop_g(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn decay_from_excited_matches_exponential() {
        // Lasers off, rho0 = |e><e|, t = 1/gamma.
        let atom = presets::barium_beta075();
        let gen = build_generator(&atom, &drive(0.0, 0.0, 0.3, -0.7), Scheme::Ladder).unwrap();
        let dt = 0.05 / atom.gamma;
        let rho = evolve(&gen, &DensityMatrix3::excited(), 1.0 / atom.gamma, dt).unwrap();
        let e1 = (-1.0f64).exp();
        assert!((rho.pop_e() - e1).abs() < 1e-6);
        assert!((rho.pop_g() - atom.beta_eg * (1.0 - e1)).abs() < 1e-6);
        assert!((rho.pop_m() - atom.beta_em() * (1.0 - e1)).abs() < 1e-6);
    }

    #[test]
    fn zero_time_returns_input() {
        let atom = presets::calcium();
        let gen = build_generator(&atom, &drive(1.0, 100.0, 0.0, -100.0), Scheme::Ladder).unwrap();
        let rho0 = DensityMatrix3::ground();
        let rho = evolve(&gen, &rho0, 0.0, 1e-9).unwrap();
        assert_eq!(rho, rho0);
    }

    #[test]
    fn oversized_step_is_rejected() {
        let atom = presets::calcium();
        let d = drive(1.0, 100.0, 0.0, -100.0);
        let gen = build_generator(&atom, &d, Scheme::Ladder).unwrap();
        let dt = 40.0 / mhz(100.0); // far beyond the stability bound
        assert!(matches!(
            evolve(&gen, &DensityMatrix3::ground(), 3e-6, dt),
            Err(Error::StepTooLarge { .. })
        ));
    }

    #[test]
    fn evolve_agrees_with_steady_state() {
        // Fast-relaxing parameters so 200/gamma reaches the fixed point well
        // below the comparison tolerance.
        let atom = presets::calcium();
        let mut d = drive(4.0, 80.0, 0.0, -60.0);
        d.delta_w = analytics::light_shift(&d);
        let gen = build_generator(&atom, &d, Scheme::Ladder).unwrap();
        let ss = steady_state(&gen).unwrap();
        let dt = stable_step(atom.gamma, &d);
        let evolved = evolve(&gen, &DensityMatrix3::ground(), 200.0 / atom.gamma, dt).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let diff = (evolved.matrix()[(i, j)] - ss.matrix()[(i, j)]).norm();
                assert!(diff < 1e-8, "element ({i},{j}) differs by {diff:.2e}");
            }
        }
    }

    #[test]
    fn steady_state_is_a_fixed_point_of_evolve() {
        let atom = presets::calcium();
        let mut d = drive(1.0, 100.0, 0.0, -100.0);
        d.delta_w = analytics::light_shift(&d);
        let gen = build_generator(&atom, &d, Scheme::Ladder).unwrap();
        let ss = steady_state(&gen).unwrap();
        let dt = stable_step(atom.gamma, &d);
        let again = evolve(&gen, &ss, 10.0 / atom.gamma, dt).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((again.matrix()[(i, j)] - ss.matrix()[(i, j)]).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn closed_form_equivalence_random_draws() {
        // Exact-solution cross-check over the full parameter ranges of
        // interest; the acceptance suite runs the larger version.
        let atom0 = presets::calcium();
        let g = atom0.gamma;
        let mut rng = ChaCha8Rng::seed_from_u64(0x5EED);
        for _ in 0..200 {
            let mut atom = atom0.clone();
            atom.beta_eg = if rng.random::<bool>() { 1.0 } else { 0.75 };
            let d = LaserDrive {
                omega_w: g * 10f64.powf(rng.random_range(-3.0..0.0)),
                omega_st: g * 10f64.powf(rng.random_range(-1.0..1.0)),
                delta_w: g * rng.random_range(-20.0..20.0),
                delta_st: g * rng.random_range(-20.0..20.0),
                st_copropagates: true,
            };
            let gen = build_generator(&atom, &d, Scheme::Ladder).unwrap();
            let pe_num = steady_state(&gen).unwrap().pop_e();
            let pe_formula = analytics::pe_exact(&atom, &d).unwrap();
            let rel = (pe_num - pe_formula).abs() / pe_formula;
            assert!(rel < 1e-9, "rel dev {rel:.2e} at {d:?}");
        }
    }
}
