//! Domain types and construction of the master-equation generator.
//!
//! Basis ordering is `{|g>, |m>, |e>}`. Density matrices are vectorized
//! row-major: element `rho[i][j]` sits at index `3*i + j`, so populations
//! occupy indices 0 (`gg`), 4 (`mm`) and 8 (`ee`).

use nalgebra::{SMatrix, SVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::consts::TAU;
use crate::error::Error;
use crate::Result;

pub type Matrix3c = SMatrix<C64, 3, 3>;
pub type Matrix9c = SMatrix<C64, 9, 9>;
pub type Vector9c = SVector<C64, 9>;

/// Atomic constants of the three-level system.
///
/// `gamma` is the total radiative decay rate of the short-lived upper state;
/// `beta_eg` the probability that a decay lands in the ground state (the rest
/// goes to the metastable state, which itself does not decay on the
/// timescales modelled here). The two wavelengths fix the laser wavevectors
/// through `k = 2 pi / lambda`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomSpec {
    /// Upper-state decay rate, rad/s. Strictly positive.
    pub gamma: f64,
    /// Branching ratio of decay into the ground state, in (0, 1].
    pub beta_eg: f64,
    /// Weak-transition wavelength, m. Strictly positive.
    pub lambda_w: f64,
    /// Strong-transition wavelength, m. Strictly positive.
    pub lambda_st: f64,
    /// Ion mass, kg. Strictly positive.
    pub mass: f64,
    /// Display label.
    pub name: String,
}

impl AtomSpec {
    pub fn validate(&self) -> Result<()> {
        for (v, n) in [
            (self.gamma, "gamma"),
            (self.lambda_w, "lambda_w"),
            (self.lambda_st, "lambda_st"),
            (self.mass, "mass"),
        ] {
            if !v.is_finite() {
                return Err(Error::NonFinite(format!("atom {n}")));
            }
            if v <= 0.0 {
                return Err(Error::InvalidAtom(format!("{n} must be > 0, got {v}")));
            }
        }
        if !self.beta_eg.is_finite() || self.beta_eg <= 0.0 || self.beta_eg > 1.0 {
            return Err(Error::InvalidAtom(format!(
                "beta_eg must lie in (0, 1], got {}",
                self.beta_eg
            )));
        }
        Ok(())
    }

    /// Branching ratio into the metastable state, `1 - beta_eg`.
    pub fn beta_em(&self) -> f64 {
        1.0 - self.beta_eg
    }

    /// Weak-beam wavevector, rad/m. Always positive; it defines the positive
    /// axis direction.
    pub fn k_w(&self) -> f64 {
        TAU / self.lambda_w
    }

    /// Magnitude of the strong-beam wavevector, rad/m.
    pub fn k_st_abs(&self) -> f64 {
        TAU / self.lambda_st
    }
}

/// The four laser parameters plus the relative propagation direction.
///
/// For the ladder scheme `omega_w`/`delta_w` drive `g -> m` and
/// `omega_st`/`delta_st` drive `m -> e`. For the Lambda scheme the same
/// fields are reused with `delta_w` the `g -> e` detuning and `delta_st`
/// the `m -> e` detuning.
///
/// `st_copropagates = true` means the strong beam propagates along the weak
/// beam, so its wavevector projection on the common axis is `+2 pi /
/// lambda_st`; `false` flips the sign.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaserDrive {
    /// Weak-transition Rabi frequency, rad/s, >= 0.
    pub omega_w: f64,
    /// Strong-transition Rabi frequency, rad/s, >= 0.
    pub omega_st: f64,
    /// Weak-transition detuning, rad/s.
    pub delta_w: f64,
    /// Strong-transition detuning, rad/s.
    pub delta_st: f64,
    /// Propagation sign of the strong beam relative to the weak beam.
    pub st_copropagates: bool,
}

impl LaserDrive {
    pub fn validate(&self) -> Result<()> {
        for (v, n) in [
            (self.omega_w, "omega_w"),
            (self.omega_st, "omega_st"),
            (self.delta_w, "delta_w"),
            (self.delta_st, "delta_st"),
        ] {
            if !v.is_finite() {
                return Err(Error::NonFinite(format!("drive {n}")));
            }
        }
        if self.omega_w < 0.0 || self.omega_st < 0.0 {
            return Err(Error::InvalidDrive(format!(
                "Rabi frequencies must be non-negative, got omega_w = {}, omega_st = {}",
                self.omega_w, self.omega_st
            )));
        }
        Ok(())
    }
}

/// Level-coupling topology.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    /// `g -> m` (weak) and `m -> e` (strong); cascade excitation.
    Ladder,
    /// `g -> e` and `m -> e`; both lasers share the upper state.
    Lambda,
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Scheme::Ladder => write!(f, "ladder"),
            Scheme::Lambda => write!(f, "lambda"),
        }
    }
}

/// A validated 3x3 density matrix over `{g, m, e}`.
///
/// Validation enforces Hermiticity to 1e-12 elementwise, unit trace to 1e-10
/// and real diagonal entries within `[-1e-9, 1 + 1e-9]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix3 {
    m: Matrix3c,
}

impl DensityMatrix3 {
    pub const HERMITICITY_TOL: f64 = 1e-12;
    pub const TRACE_TOL: f64 = 1e-10;
    pub const POPULATION_TOL: f64 = 1e-9;

    /// Validate and wrap a raw matrix.
    pub fn try_new(m: Matrix3c) -> Result<Self> {
        for i in 0..3 {
            for j in 0..3 {
                let d = m[(i, j)] - m[(j, i)].conj();
                if d.norm() > Self::HERMITICITY_TOL {
                    return Err(Error::InvalidDensityMatrix(format!(
                        "not Hermitian at ({i},{j}): asymmetry {:.3e}",
                        d.norm()
                    )));
                }
            }
        }
        let trace = (m[(0, 0)] + m[(1, 1)] + m[(2, 2)]).re;
        if (trace - 1.0).abs() > Self::TRACE_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "trace {trace} deviates from 1 by more than {:.0e}",
                Self::TRACE_TOL
            )));
        }
        for (i, label) in ["gg", "mm", "ee"].iter().enumerate() {
            let p = m[(i, i)].re;
            if !(-Self::POPULATION_TOL..=1.0 + Self::POPULATION_TOL).contains(&p) {
                return Err(Error::InvalidDensityMatrix(format!(
                    "population {label} = {p} outside [0, 1]"
                )));
            }
        }
        Ok(Self { m })
    }

    /// Symmetrize `(m + m^dagger) / 2` before validating. Used by the solvers,
    /// whose raw output carries rounding-level asymmetry.
    pub fn try_new_hermitized(m: Matrix3c) -> Result<Self> {
        Self::try_new((m + m.adjoint()) * C64::new(0.5, 0.0))
    }

    /// Pure state `|g><g|`.
    pub fn ground() -> Self {
        let mut m = Matrix3c::zeros();
        m[(0, 0)] = C64::new(1.0, 0.0);
        Self { m }
    }

    /// Pure state `|e><e|`.
    pub fn excited() -> Self {
        let mut m = Matrix3c::zeros();
        m[(2, 2)] = C64::new(1.0, 0.0);
        Self { m }
    }

    pub fn matrix(&self) -> &Matrix3c {
        &self.m
    }

    pub fn pop_g(&self) -> f64 {
        self.m[(0, 0)].re
    }

    pub fn pop_m(&self) -> f64 {
        self.m[(1, 1)].re
    }

    pub fn pop_e(&self) -> f64 {
        self.m[(2, 2)].re
    }

    /// Off-diagonal element `<i|rho|j>` with `0 = g, 1 = m, 2 = e`.
    pub fn coherence(&self, i: usize, j: usize) -> C64 {
        self.m[(i, j)]
    }

    /// Row-major vectorization, index `3*i + j`.
    pub fn to_vector(&self) -> Vector9c {
        let mut v = Vector9c::zeros();
        for i in 0..3 {
            for j in 0..3 {
                v[3 * i + j] = self.m[(i, j)];
            }
        }
        v
    }

    pub fn from_vector(v: &Vector9c) -> Matrix3c {
        let mut m = Matrix3c::zeros();
        for i in 0..3 {
            for j in 0..3 {
                m[(i, j)] = v[3 * i + j];
            }
        }
        m
    }
}

/// The 9x9 generator `L` of the master equation, acting on the row-major
/// vectorization of the density matrix: `d vec(rho) / dt = L vec(rho)`.
///
/// Trace preservation means the rows for `gg`, `mm` and `ee` (indices 0, 4, 8)
/// sum to the zero row; `population_row_defect` measures the violation
/// relative to the largest entry of `L`.
#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    l: Matrix9c,
}

impl Generator {
    pub fn matrix(&self) -> &Matrix9c {
        &self.l
    }

    /// Apply the generator to a density matrix: `d rho / dt`.
    pub fn derivative(&self, rho: &Matrix3c) -> Matrix3c {
        let mut v = Vector9c::zeros();
        for i in 0..3 {
            for j in 0..3 {
                v[3 * i + j] = rho[(i, j)];
            }
        }
        DensityMatrix3::from_vector(&(self.l * v))
    }

    /// Largest entry magnitude; the natural scale for relative defects.
    pub fn max_abs_entry(&self) -> f64 {
        self.l.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Infinity norm (max absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        (0..9)
            .map(|r| (0..9).map(|c| self.l[(r, c)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Max magnitude over columns of the sum of the three population rows,
    /// normalized by the largest entry of `L`. Zero (to rounding) for a
    /// trace-preserving generator.
    pub fn population_row_defect(&self) -> f64 {
        let scale = self.max_abs_entry().max(f64::MIN_POSITIVE);
        (0..9)
            .map(|c| (self.l[(0, c)] + self.l[(4, c)] + self.l[(8, c)]).norm())
            .fold(0.0, f64::max)
            / scale
    }

    /// Max Hermiticity defect of `L rho` over the given Hermitian `rho`,
    /// normalized by the scale `|L| * |rho|`. Zero (to rounding) because the
    /// generator maps Hermitian matrices to Hermitian matrices.
    pub fn hermiticity_defect(&self, rho: &Matrix3c) -> f64 {
        let d = self.derivative(rho);
        let scale = self.max_abs_entry().max(f64::MIN_POSITIVE)
            * rho.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                worst = worst.max((d[(i, j)] - d[(j, i)].conj()).norm());
            }
        }
        worst / scale
    }
}

/// Accumulate `coeff * (A rho B)` into the vectorized generator:
/// `L[3i+j, 3k+l] += coeff * A[i,k] * B[l,j]`.
fn add_sandwich(l: &mut Matrix9c, a: &Matrix3c, b: &Matrix3c, coeff: C64) {
    for i in 0..3 {
        for k in 0..3 {
            let aik = a[(i, k)];
            if aik == C64::ZERO {
                continue;
            }
            for j in 0..3 {
                for lcol in 0..3 {
                    let blj = b[(lcol, j)];
                    if blj == C64::ZERO {
                        continue;
                    }
                    l[(3 * i + j, 3 * k + lcol)] += coeff * aik * blj;
                }
            }
        }
    }
}

fn matrix_unit(i: usize, j: usize) -> Matrix3c {
    let mut m = Matrix3c::zeros();
    m[(i, j)] = C64::new(1.0, 0.0);
    m
}

/// Rotating-frame Hamiltonian divided by hbar.
///
/// Position phase factors of the couplings are dropped (atom at the origin);
/// populations and coherence magnitudes do not depend on them.
fn hamiltonian(drive: &LaserDrive, scheme: Scheme) -> Matrix3c {
    let mut h = Matrix3c::zeros();
    let half_w = C64::new(drive.omega_w / 2.0, 0.0);
    let half_st = C64::new(drive.omega_st / 2.0, 0.0);
    match scheme {
        Scheme::Ladder => {
            h[(1, 1)] = C64::new(-drive.delta_w, 0.0);
            h[(2, 2)] = C64::new(-(drive.delta_w + drive.delta_st), 0.0);
            h[(1, 0)] = half_w;
            h[(0, 1)] = half_w;
            h[(2, 1)] = half_st;
            h[(1, 2)] = half_st;
        }
        Scheme::Lambda => {
            // Frame rotating with both lasers: |e> at -delta_w, |m> at
            // -(delta_w - delta_st), so both couplings are static.
            h[(1, 1)] = C64::new(-(drive.delta_w - drive.delta_st), 0.0);
            h[(2, 2)] = C64::new(-drive.delta_w, 0.0);
            h[(2, 0)] = half_w;
            h[(0, 2)] = half_w;
            h[(2, 1)] = half_st;
            h[(1, 2)] = half_st;
        }
    }
    h
}

/// Build the master-equation generator for the given atom, drive and scheme.
///
/// The coherent part is `-i [H, rho]` with the rotating-frame Hamiltonian
/// above. Radiative decay of the upper state enters through the two jump
/// channels `e -> g` (rate `beta_eg * gamma`) and `e -> m` (rate
/// `(1 - beta_eg) * gamma`); the metastable state does not decay.
pub fn build_generator(atom: &AtomSpec, drive: &LaserDrive, scheme: Scheme) -> Result<Generator> {
    atom.validate()?;
    drive.validate()?;

    let mut l = Matrix9c::zeros();
    let h = hamiltonian(drive, scheme);
    let eye = Matrix3c::identity();

    // -i (H rho - rho H)
    add_sandwich(&mut l, &h, &eye, C64::new(0.0, -1.0));
    add_sandwich(&mut l, &eye, &h, C64::new(0.0, 1.0));

    // Jump channels: rate * (J rho J^dag - 1/2 {J^dag J, rho}).
    let channels = [
        (matrix_unit(0, 2), atom.beta_eg * atom.gamma),
        (matrix_unit(1, 2), atom.beta_em() * atom.gamma),
    ];
    let projector_e = matrix_unit(2, 2); // J^dag J for both channels
    for (jump, rate) in channels {
        if rate == 0.0 {
            continue;
        }
        let r = C64::new(rate, 0.0);
        let half_r = C64::new(-rate / 2.0, 0.0);
        add_sandwich(&mut l, &jump, &jump.adjoint(), r);
        add_sandwich(&mut l, &projector_e, &eye, half_r);
        add_sandwich(&mut l, &eye, &projector_e, half_r);
    }

    Ok(Generator { l })
}

/// Replace the detunings by their Doppler-shifted values for an atom moving
/// with velocity `v` along the beam axis: `delta -> delta - k v`, with the
/// strong-beam wavevector signed by the propagation direction.
pub fn doppler_shift(drive: &LaserDrive, atom: &AtomSpec, v: f64) -> LaserDrive {
    let k_st = if drive.st_copropagates {
        atom.k_st_abs()
    } else {
        -atom.k_st_abs()
    };
    LaserDrive {
        delta_w: drive.delta_w - atom.k_w() * v,
        delta_st: drive.delta_st - k_st * v,
        ..*drive
    }
}

/// Net wavevector `k_w + k_st` transferred per absorption cycle, rad/m,
/// with `k_st` signed by the propagation direction.
pub fn effective_wavevector(atom: &AtomSpec, st_copropagates: bool) -> f64 {
    let k_st = if st_copropagates {
        atom.k_st_abs()
    } else {
        -atom.k_st_abs()
    };
    atom.k_w() + k_st
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::consts::mhz;
    use crate::presets;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

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
    fn lasers_off_is_pure_decay() {
        let atom = presets::barium_beta075();
        let gen = build_generator(&atom, &drive(0.0, 0.0, 3.0, -7.0), Scheme::Ladder).unwrap();
        // d pe/dt = -gamma pe, d pg/dt = +beta gamma pe, d pm/dt = +(1-beta) gamma pe
        let d = gen.derivative(DensityMatrix3::excited().matrix());
        assert_relative_eq!(d[(2, 2)].re, -atom.gamma, max_relative = 1e-14);
        assert_relative_eq!(
            d[(0, 0)].re,
            atom.beta_eg * atom.gamma,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            d[(1, 1)].re,
            atom.beta_em() * atom.gamma,
            max_relative = 1e-14
        );
        // nothing happens to a ground-state atom
        let dg = gen.derivative(DensityMatrix3::ground().matrix());
        assert!(dg.iter().all(|z| z.norm() < 1e-20));
    }

    #[test]
    fn generator_rejects_non_finite() {
        let atom = presets::calcium();
        let bad = LaserDrive {
            delta_w: f64::NAN,
            ..drive(1.0, 100.0, 0.0, -100.0)
        };
        assert!(matches!(
            build_generator(&atom, &bad, Scheme::Ladder),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn rejects_negative_rabi_and_bad_atom() {
        let atom = presets::calcium();
        let bad = LaserDrive {
            omega_w: -1.0,
            ..drive(1.0, 100.0, 0.0, -100.0)
        };
        assert!(build_generator(&atom, &bad, Scheme::Ladder).is_err());
        let mut bad_atom = presets::calcium();
        bad_atom.beta_eg = 0.0;
        assert!(bad_atom.validate().is_err());
        bad_atom.beta_eg = 1.5;
        assert!(bad_atom.validate().is_err());
    }

    #[test]
    fn doppler_shift_matches_wavevectors() {
        let atom = presets::calcium();
        let d0 = drive(1.0, 100.0, 0.0, -100.0);
        // v = 0 leaves the drive untouched
        assert_eq!(doppler_shift(&d0, &atom, 0.0), d0);
        // 1 m/s shifts by k = 2 pi / lambda
        let d1 = doppler_shift(&d0, &atom, 1.0);
        assert_relative_eq!(
            d0.delta_w - d1.delta_w,
            8.583586485218013e6,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            d0.delta_st - d1.delta_st,
            7.255410285426773e6,
            max_relative = 1e-12
        );
        // counterpropagating flips only the strong-beam shift
        let mut counter = d0;
        counter.st_copropagates = false;
        let d2 = doppler_shift(&counter, &atom, 1.0);
        assert_eq!(d2.delta_w, d1.delta_w);
        assert_relative_eq!(
            d0.delta_st - d2.delta_st,
            -7.255410285426773e6,
            max_relative = 1e-12
        );
        // Rabi frequencies untouched
        assert_eq!(d1.omega_w, d0.omega_w);
        assert_eq!(d1.omega_st, d0.omega_st);
    }

    #[test]
    fn effective_wavevector_ratios_match_presets() {
        for (atom, expect) in [
            (presets::calcium(), 11.9),
            (presets::strontium(), 4.4),
            (presets::barium(), 1.9),
        ] {
            let sum = effective_wavevector(&atom, true);
            let diff = effective_wavevector(&atom, false);
            let ratio = (sum / diff).abs();
            assert!(
                (ratio - expect).abs() <= 0.1,
                "{}: |sum/diff| = {ratio}, expected {expect} +- 0.1",
                atom.name
            );
        }
    }

    #[test]
    fn equal_wavelengths_counterpropagating_cancel() {
        let mut atom = presets::calcium();
        atom.lambda_st = atom.lambda_w;
        assert_eq!(effective_wavevector(&atom, false), 0.0);
    }

    #[test]
    fn density_matrix_validation() {
        // valid: pure ground state
        assert!(DensityMatrix3::try_new(*DensityMatrix3::ground().matrix()).is_ok());
        // non-Hermitian rejected
        let mut m = *DensityMatrix3::ground().matrix();
        m[(0, 1)] = C64::new(0.1, 0.0);
        assert!(matches!(
            DensityMatrix3::try_new(m),
            Err(Error::InvalidDensityMatrix(_))
        ));
        // trace off by more than 1e-10 rejected
        let mut m = *DensityMatrix3::ground().matrix();
        m[(0, 0)] = C64::new(1.0 + 1e-8, 0.0);
        assert!(DensityMatrix3::try_new(m).is_err());
        // negative population rejected
        let mut m = Matrix3c::zeros();
        m[(0, 0)] = C64::new(1.01, 0.0);
        m[(1, 1)] = C64::new(-0.01, 0.0);
        assert!(DensityMatrix3::try_new(m).is_err());
        // hermitization repairs rounding-level asymmetry
        let mut m = *DensityMatrix3::ground().matrix();
        m[(0, 1)] = C64::new(1e-14, 1e-14);
        assert!(DensityMatrix3::try_new_hermitized(m).is_ok());
    }

    #[test]
    fn lambda_and_ladder_share_decay_part() {
        let atom = presets::barium_beta075();
        let off = drive(0.0, 0.0, 1.3, -0.4);
        let ladder = build_generator(&atom, &off, Scheme::Ladder).unwrap();
        let lambda = build_generator(&atom, &off, Scheme::Lambda).unwrap();
        // With the lasers off only H_0 and the decay remain; the decay parts
        // coincide, the H_0 parts differ only on coherences. Populations see
        // identical dynamics:
        for rho in [DensityMatrix3::ground(), DensityMatrix3::excited()] {
            let a = ladder.derivative(rho.matrix());
            let b = lambda.derivative(rho.matrix());
            for i in 0..3 {
                assert_relative_eq!(a[(i, i)].re, b[(i, i)].re, max_relative = 1e-14);
            }
        }
    }

    proptest! {
        #[test]
        fn generator_invariants_hold(
            omega_w in 0.0f64..10.0,
            omega_st in 0.0f64..400.0,
            delta_w in -400.0f64..400.0,
            delta_st in -400.0f64..400.0,
            beta_eg in 0.05f64..1.0,
            lambda_scheme in proptest::bool::ANY,
        ) {
            let mut atom = presets::calcium();
            atom.beta_eg = beta_eg;
            let d = drive(omega_w, omega_st, delta_w, delta_st);
            let scheme = if lambda_scheme { Scheme::Lambda } else { Scheme::Ladder };
            let gen = build_generator(&atom, &d, scheme).unwrap();

            // trace preservation: population rows sum to zero
            prop_assert!(gen.population_row_defect() < 1e-12);

            // Hermitian rho maps to Hermitian (and traceless) derivative
            let mut rho = Matrix3c::zeros();
            rho[(0, 0)] = C64::new(0.5, 0.0);
            rho[(1, 1)] = C64::new(0.3, 0.0);
            rho[(2, 2)] = C64::new(0.2, 0.0);
            rho[(0, 1)] = C64::new(0.1, 0.07); rho[(1, 0)] = rho[(0, 1)].conj();
            rho[(1, 2)] = C64::new(-0.05, 0.02); rho[(2, 1)] = rho[(1, 2)].conj();
            rho[(0, 2)] = C64::new(0.03, -0.04); rho[(2, 0)] = rho[(0, 2)].conj();
            prop_assert!(gen.hermiticity_defect(&rho) < 1e-12);
            let der = gen.derivative(&rho);
            let trace = (der[(0, 0)] + der[(1, 1)] + der[(2, 2)]).norm();
            prop_assert!(trace < 1e-12 * gen.max_abs_entry().max(1.0));
        }

        #[test]
        fn doppler_shift_composes_additively(
            v1 in -50.0f64..50.0,
            v2 in -50.0f64..50.0,
            copropagates in proptest::bool::ANY,
        ) {
            let atom = presets::strontium();
            let mut d0 = drive(1.0, 80.0, -3.0, -120.0);
            d0.st_copropagates = copropagates;
            let once = doppler_shift(&d0, &atom, v1 + v2);
            let twice = doppler_shift(&doppler_shift(&d0, &atom, v1), &atom, v2);
            prop_assert!((once.delta_w - twice.delta_w).abs() <= 1e-9 * once.delta_w.abs().max(1.0));
            prop_assert!((once.delta_st - twice.delta_st).abs() <= 1e-9 * once.delta_st.abs().max(1.0));
        }
    }
}
