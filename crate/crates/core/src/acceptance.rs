//! Self-contained validation suite.
//!
//! Each criterion pins one quantitative claim of the model implementation
//! (closed form versus solver, oracle consistency, figure-level physics,
//! geometry) with its tolerance fixed in code. The CLI `verify` command and
//! the `acceptance` integration test both run [`run_all`].

use std::time::{Duration, Instant};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analytics;
use crate::consts::{mhz, to_mhz};
use crate::cooling;
use crate::model::{build_generator, effective_wavevector, DensityMatrix3, LaserDrive, Scheme};
use crate::optimize::golden_section_max;
use crate::presets;
use crate::scan::linspace;
use crate::steady_state::{evolve, stable_step, steady_state};

/// Outcome of one criterion.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CriterionOutcome {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub details: Vec<String>,
    pub runtime_ms: u128,
}

impl CriterionOutcome {
    fn new(id: usize, name: &'static str) -> Self {
        Self {
            id,
            name,
            passed: true,
            details: Vec::new(),
            runtime_ms: 0,
        }
    }

    fn check(&mut self, ok: bool, line: String) {
        self.passed &= ok;
        self.details
            .push(format!("[{}] {line}", if ok { "ok" } else { "FAIL" }));
    }

    /// One-line report.
    pub fn summary_line(&self) -> String {
        format!(
            "{} criterion {}: {} ({} ms)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.runtime_ms
        )
    }
}

/// Suite options.
#[derive(Debug, Clone, Default)]
pub struct Options {
    /// Inject a 1e-6 multiplicative error into the closed-form population
    /// before comparing against the solver. Sensitivity handle: criterion 1
    /// must fail when this is set.
    pub inject_formula_error: bool,
}

/// Run every criterion in order.
pub fn run_all(opts: &Options) -> Vec<CriterionOutcome> {
    vec![
        closed_form_equivalence(opts),
        oracle_consistency(),
        fluorescence_peak(),
        optimal_drive(),
        linewidth(),
        lambda_ceiling(),
        cooling_criteria(),
        wavevector_ratios(),
        force_identity(),
    ]
}

fn timed(outcome: &mut CriterionOutcome, start: Instant) {
    outcome.runtime_ms = start.elapsed().as_millis();
}

/// Criterion 1: Closed form versus solver: 1000 random draws across the full parameter
/// ranges agree to 1e-9 relative, in under 5 s.
pub fn closed_form_equivalence(opts: &Options) -> CriterionOutcome {
    let mut out = CriterionOutcome::new(1, "closed-form vs solver equivalence");
    let start = Instant::now();
    let atom0 = presets::calcium();
    let g = atom0.gamma;

    let mut rng = ChaCha8Rng::seed_from_u64(0x0C00_1001);
    let draws: Vec<(f64, f64, f64, f64, f64)> = (0..1000)
        .map(|_| {
            (
                g * 10f64.powf(rng.random_range(-3.0..0.0)),
                g * 10f64.powf(rng.random_range(-1.0..1.0)),
                g * rng.random_range(-20.0..20.0),
                g * rng.random_range(-20.0..20.0),
                if rng.random::<bool>() { 1.0 } else { 0.75 },
            )
        })
        .collect();

    let inject = if opts.inject_formula_error { 1e-6 } else { 0.0 };
    let worst = draws
        .par_iter()
        .map(|&(omega_w, omega_st, delta_w, delta_st, beta)| {
            let mut atom = atom0.clone();
            atom.beta_eg = beta;
            let d = LaserDrive {
                omega_w,
                omega_st,
                delta_w,
                delta_st,
                st_copropagates: true,
            };
            let gen = build_generator(&atom, &d, Scheme::Ladder).expect("valid drive");
            let pe_num = steady_state(&gen).expect("unique steady state").pop_e();
            let pe_formula =
                analytics::pe_exact(&atom, &d).expect("nonzero denominator") * (1.0 + inject);
            (pe_num - pe_formula).abs() / pe_formula
        })
        .reduce(|| 0.0, f64::max);

    let elapsed = start.elapsed();
    out.check(
        worst < 1e-9,
        format!("max relative deviation {worst:.3e} over 1000 draws (bound 1e-9)"),
    );
    out.check(
        elapsed < Duration::from_secs(5),
        format!("runtime {:.2} s (budget 5 s)", elapsed.as_secs_f64()),
    );
    timed(&mut out, start);
    out
}

/// Criterion 2: Oracle consistency: the linear-solve steady state and RK4 evolution to
/// `t = 500/gamma` agree elementwise below 1e-8 on 50 draws, in under 30 s.
///
/// Draws are taken from a saturated-dressing region
/// (`omega_st / |delta_st| >= 0.8`) where the slowest relaxation mode is
/// faster than 0.05 gamma, so the evolution has fully converged at 500/gamma.
pub fn oracle_consistency() -> CriterionOutcome {
    let mut out = CriterionOutcome::new(2, "steady state vs RK4 evolution");
    let start = Instant::now();
    let atom0 = presets::calcium();
    let g = atom0.gamma;

    let mut rng = ChaCha8Rng::seed_from_u64(0x0C00_1002);
    let draws: Vec<(f64, f64, f64, f64, f64)> = (0..50)
        .map(|_| {
            let omega_w = g * 10f64.powf(rng.random_range(-0.602..-0.301)); // 0.25..0.5 gamma
            let delta_st = g * rng.random_range(-2.5..-1.0);
            let omega_st = rng.random_range(0.8..2.0) * delta_st.abs();
            let u = rng.random_range(-1.0..1.0);
            let beta = if rng.random::<bool>() { 1.0 } else { 0.75 };
            (omega_w, omega_st, delta_st, u, beta)
        })
        .collect();

    let worst = draws
        .par_iter()
        .map(|&(omega_w, omega_st, delta_st, u, beta)| {
            let mut atom = atom0.clone();
            atom.beta_eg = beta;
            let mut d = LaserDrive {
                omega_w,
                omega_st,
                delta_w: 0.0,
                delta_st,
                st_copropagates: true,
            };
            d.delta_w = analytics::light_shift(&d) + u * analytics::gamma_eff(&atom, &d) / 2.0;
            let gen = build_generator(&atom, &d, Scheme::Ladder).expect("valid drive");
            let ss = steady_state(&gen).expect("unique steady state");
            let dt = stable_step(atom.gamma, &d);
            let rho = evolve(&gen, &DensityMatrix3::ground(), 500.0 / atom.gamma, dt)
                .expect("stable integration");
            let mut dev: f64 = 0.0;
            for i in 0..3 {
                for j in 0..3 {
                    dev = dev.max((rho.matrix()[(i, j)] - ss.matrix()[(i, j)]).norm());
                }
            }
            dev
        })
        .reduce(|| 0.0, f64::max);

    let elapsed = start.elapsed();
    out.check(
        worst < 1e-8,
        format!("max elementwise deviation {worst:.3e} over 50 draws (bound 1e-8)"),
    );
    out.check(
        elapsed < Duration::from_secs(30),
        format!("runtime {:.2} s (budget 30 s)", elapsed.as_secs_f64()),
    );
    timed(&mut out, start);
    out
}

/// Criterion 3: Fluorescence peak at omega_w/2pi = 1 MHz, omega_st/2pi = 100 MHz,
/// beta_eg = 1: the peak population over the strong-laser detuning (weak
/// detuning tracking the light shift) is about 0.02 and within 3% of
/// `omega_w / (2 sqrt(2) gamma)`.
pub fn fluorescence_peak() -> CriterionOutcome {
    let mut out = CriterionOutcome::new(3, "fluorescence peak height");
    let start = Instant::now();
    let atom = presets::calcium();

    let pe_at = |delta_st: f64| {
        let mut d = LaserDrive {
            omega_w: mhz(1.0),
            omega_st: mhz(100.0),
            delta_w: 0.0,
            delta_st,
            st_copropagates: true,
        };
        d.delta_w = analytics::light_shift(&d);
        analytics::pe_exact(&atom, &d).expect("valid drive")
    };
    let (delta_st_opt, peak) = golden_section_max(pe_at, mhz(-3000.0), mhz(-40.0), 1e-10);

    let reference = mhz(1.0) / (2.0 * 2f64.sqrt() * atom.gamma);
    let rel = (peak - reference).abs() / reference;
    out.check(
        (0.015..=0.025).contains(&peak),
        format!(
            "peak population {peak:.6} at delta_st = {:.1} MHz (about 0.02)",
            to_mhz(delta_st_opt)
        ),
    );
    out.check(
        rel <= 0.03,
        format!(
            "peak within {:.2}% of omega_w/(2 sqrt2 gamma) = {reference:.6} (bound 3%)",
            rel * 100.0
        ),
    );
    timed(&mut out, start);
    out
}

/// Criterion 4: Optimal drive at delta_st/2pi = -200 MHz: the numeric optimizer lands
/// on 34 / 106 MHz (+- 5%) for omega_w/2pi = 0.1 / 1 MHz, and the closed-form
/// optimum agrees with the numeric optimum to better than 7%.
pub fn optimal_drive() -> CriterionOutcome {
    let mut out = CriterionOutcome::new(4, "optimal strong drive");
    let start = Instant::now();
    let atom = presets::calcium();

    for (omega_w_mhz, expect_mhz) in [(0.1, 34.0), (1.0, 106.0)] {
        let numeric = cooling::optimize_drive(&atom, mhz(omega_w_mhz), mhz(-200.0))
            .expect("interior optimum");
        let numeric_mhz = to_mhz(numeric.omega_st);
        let closed = analytics::optimal_ratio(&atom, mhz(omega_w_mhz), mhz(-200.0), None);
        let closed_mhz = to_mhz(closed.omega_st_opt);

        let dev_caption = (numeric_mhz - expect_mhz).abs() / expect_mhz;
        out.check(
            dev_caption <= 0.05,
            format!(
                "omega_w = {omega_w_mhz} MHz: numeric optimum {numeric_mhz:.2} MHz vs {expect_mhz} MHz ({:.2}%, bound 5%; closed form gives {closed_mhz:.2} MHz, off by {:.2}%)",
                dev_caption * 100.0,
                (closed_mhz - expect_mhz).abs() / expect_mhz * 100.0
            ),
        );
        let dev_formula = (closed_mhz - numeric_mhz).abs() / numeric_mhz;
        out.check(
            dev_formula <= 0.07,
            format!(
                "omega_w = {omega_w_mhz} MHz: closed-form optimum {closed_mhz:.2} MHz within {:.2}% of numeric (bound 7%)",
                dev_formula * 100.0
            ),
        );
    }
    timed(&mut out, start);
    out
}

/// Criterion 5: Linewidth: for omega_w <= 1 MHz and ratios <= 1 the measured FWHM of
/// the resonance matches the effective-linewidth formula within 5%; at
/// omega_w/2pi = 5 MHz with ratios >= 1 the formula strictly overestimates.
pub fn linewidth() -> CriterionOutcome {
    let mut out = CriterionOutcome::new(5, "resonance linewidth vs formula");
    let start = Instant::now();
    let atom = presets::calcium();
    let delta_st = mhz(-200.0);

    for omega_w_mhz in [0.1, 0.5, 1.0] {
        let worst = [0.1, 0.2, 0.35, 0.5, 0.75, 1.0]
            .par_iter()
            .map(|&ratio| {
                let d = LaserDrive {
                    omega_w: mhz(omega_w_mhz),
                    omega_st: ratio * delta_st.abs(),
                    delta_w: 0.0,
                    delta_st,
                    st_copropagates: true,
                };
                let summary =
                    crate::scan::fwhm_of_pe(&atom, &d, Scheme::Ladder).expect("bracketed peak");
                let formula = analytics::gamma_eff(&atom, &d);
                (summary.fwhm - formula).abs() / summary.fwhm
            })
            .reduce(|| 0.0, f64::max);
        out.check(
            worst <= 0.05,
            format!(
                "omega_w = {omega_w_mhz} MHz: worst formula deviation {:.2}% over ratios <= 1 (bound 5%)",
                worst * 100.0
            ),
        );
    }

    let strict = [1.0, 2.0, 5.0, 10.0]
        .par_iter()
        .map(|&ratio| {
            let d = LaserDrive {
                omega_w: mhz(5.0),
                omega_st: ratio * delta_st.abs(),
                delta_w: 0.0,
                delta_st,
                st_copropagates: true,
            };
            let summary =
                crate::scan::fwhm_of_pe(&atom, &d, Scheme::Ladder).expect("bracketed peak");
            analytics::gamma_eff(&atom, &d) > summary.fwhm
        })
        .reduce(|| true, |a, b| a && b);
    out.check(
        strict,
        "omega_w = 5 MHz, ratios >= 1: formula strictly overestimates the measured width".into(),
    );
    timed(&mut out, start);
    out
}

/// Criterion 6: Conventional-scheme ceiling: the Lambda configuration at deeply
/// saturating symmetric drive (omega = 20 gamma) peaks at 0.20 +- 0.02 over
/// the detuning window, and the ladder at omega_w/2pi = 7 MHz reaches at
/// least 0.08.
pub fn lambda_ceiling() -> CriterionOutcome {
    let mut out = CriterionOutcome::new(6, "Lambda ceiling and ladder comparison point");
    let start = Instant::now();
    let atom = presets::calcium();
    let g = atom.gamma;

    let deep = LaserDrive {
        omega_w: 20.0 * g,
        omega_st: 20.0 * g,
        delta_w: 0.0,
        delta_st: 0.0,
        st_copropagates: true,
    };
    let ceiling = analytics::lambda_pe_max(&atom, &deep).expect("lambda scan");
    out.check(
        (ceiling - 0.20).abs() <= 0.02,
        format!("Lambda ceiling {ceiling:.4} at omega = 20 gamma (expect 0.20 +- 0.02)"),
    );

    // Ladder comparison point: best peak population over a coarse
    // (delta_st, omega_st) sweep at omega_w/2pi = 7 MHz.
    let omega_w = mhz(7.0);
    let best = linspace(mhz(-260.0), mhz(-60.0), 21)
        .par_iter()
        .map(|&delta_st| {
            let (_, v) = golden_section_max(
                |omega_st| {
                    let d = LaserDrive {
                        omega_w,
                        omega_st,
                        delta_w: 0.0,
                        delta_st,
                        st_copropagates: true,
                    };
                    let d_ls = analytics::light_shift(&d);
                    let ge = analytics::gamma_eff(&atom, &d);
                    golden_section_max(
                        |dw| {
                            analytics::pe_exact(&atom, &LaserDrive { delta_w: dw, ..d })
                                .expect("valid drive")
                        },
                        d_ls - 2.0 * ge,
                        d_ls + 2.0 * ge,
                        1e-6,
                    )
                    .1
                },
                0.5 * delta_st.abs(),
                4.0 * delta_st.abs(),
                1e-5,
            );
            v
        })
        .reduce(|| 0.0, f64::max);
    out.check(
        best >= 0.08,
        format!("ladder peak population {best:.4} at omega_w = 7 MHz (expect >= 0.08)"),
    );
    timed(&mut out, start);
    out
}

/// Criterion 7: Cooling: positive damping for red relative detuning; the temperature
/// minimum sits at `delta_w - delta_ls = -Gamma_eff / 2` within a grid step;
/// Ca+ reaches below 100 uK at small drive ratio with omega_w/2pi = 0.1 MHz;
/// the two-level dipole-line reference gives 0.55 mK +- 10%; and the
/// temperature-versus-ratio curve is invariant (2%) under changing delta_st
/// at fixed ratio.
pub fn cooling_criteria() -> CriterionOutcome {
    let mut out = CriterionOutcome::new(7, "Doppler cooling observables");
    let start = Instant::now();
    let atom = presets::calcium();

    let mut base = LaserDrive {
        omega_w: mhz(0.1),
        omega_st: mhz(34.0),
        delta_w: 0.0,
        delta_st: mhz(-200.0),
        st_copropagates: true,
    };
    base.delta_w = cooling::cooling_detuning(&atom, &base);
    let damp = cooling::damping(&atom, &base, Scheme::Ladder).expect("solver");
    out.check(
        damp.beta > 0.0,
        format!(
            "damping beta = {:.3e} kg/s > 0 at red relative detuning",
            damp.beta
        ),
    );

    // Temperature minimum versus the relative detuning offset.
    let d_ls = analytics::light_shift(&base);
    let g_eff = analytics::gamma_eff(&atom, &base);
    let offsets = linspace(-1.5, -0.1, 57);
    let step = offsets[1] - offsets[0];
    let temps: Vec<f64> = offsets
        .par_iter()
        .map(|&off| {
            let d = LaserDrive {
                delta_w: d_ls + off * g_eff,
                ..base
            };
            cooling::doppler_temperature(&atom, &d, Scheme::Ladder, None)
                .expect("cooling")
                .temperature
        })
        .collect();
    let (imin, _) = temps
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");
    out.check(
        (offsets[imin] + 0.5).abs() <= step,
        format!(
            "temperature minimum at offset {:.3} Gamma_eff (expect -0.5 within one step of {:.3})",
            offsets[imin], step
        ),
    );

    // Sub-100-uK regime at small ratio.
    let ratios = [0.05, 0.1, 0.2, 0.5, 1.0];
    let curve_10 = cooling::min_temperature_curve(&atom, mhz(0.1), -10.0 * atom.gamma, &ratios)
        .expect("curve");
    let t_small = curve_10.column("t_kelvin").expect("column")[0];
    out.check(
        t_small < 100e-6,
        format!(
            "T_D = {:.2} uK at ratio 0.05 with omega_w = 0.1 MHz (expect < 100 uK)",
            t_small * 1e6
        ),
    );

    // Two-level dipole-line reference.
    let t2 = cooling::two_level_doppler_limit(presets::CA_DIPOLE_LINE_GAMMA);
    out.check(
        (t2 - 0.55e-3).abs() / 0.55e-3 <= 0.10,
        format!(
            "two-level reference {:.3} mK (expect 0.55 mK +- 10%)",
            t2 * 1e3
        ),
    );

    // Ratio invariance between delta_st = -10 gamma and -20 gamma.
    let curve_20 = cooling::min_temperature_curve(&atom, mhz(0.1), -20.0 * atom.gamma, &ratios)
        .expect("curve");
    let ta = curve_10.column("t_kelvin").expect("column");
    let tb = curve_20.column("t_kelvin").expect("column");
    let worst = ta
        .iter()
        .zip(tb)
        .map(|(a, b)| (a - b).abs() / a)
        .fold(0.0f64, f64::max);
    out.check(
        worst <= 0.02,
        format!(
            "T_D(ratio) curves for delta_st = -10 gamma vs -20 gamma agree to {:.2}% (bound 2%)",
            worst * 100.0
        ),
    );
    timed(&mut out, start);
    out
}

/// Criterion 8: Geometry: the wavevector sum/difference ratios of the three presets.
pub fn wavevector_ratios() -> CriterionOutcome {
    let mut out = CriterionOutcome::new(8, "effective-wavevector ratios");
    let start = Instant::now();
    for (atom, expect) in [
        (presets::calcium(), 11.9),
        (presets::strontium(), 4.4),
        (presets::barium(), 1.9),
    ] {
        let ratio = (effective_wavevector(&atom, true) / effective_wavevector(&atom, false)).abs();
        out.check(
            (ratio - expect).abs() <= 0.1,
            format!(
                "{}: |k_sum / k_diff| = {ratio:.3} (expect {expect} +- 0.1)",
                atom.name
            ),
        );
    }
    timed(&mut out, start);
    out
}

/// Criterion 9: Force identity: the population and coherence forms of the radiative
/// force agree to 1e-8 relative on every evaluation (measured here over a
/// random sweep; the force routine additionally asserts it on every call).
pub fn force_identity() -> CriterionOutcome {
    // (omega_w, omega_st, delta_w, delta_st [MHz], beta, copropagating,
    //  lambda scheme, velocity [m/s])
    type ForceDraw = (f64, f64, f64, f64, f64, bool, bool, f64);
    let mut out = CriterionOutcome::new(9, "force population/coherence identity");
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x0C00_1009);
    let draws: Vec<ForceDraw> = (0..200)
        .map(|_| {
            (
                10f64.powf(rng.random_range(-1.5..0.5)),
                10f64.powf(rng.random_range(0.5..2.5)),
                rng.random_range(-100.0..100.0),
                rng.random_range(-400.0..-10.0),
                if rng.random::<bool>() { 1.0 } else { 0.75 },
                rng.random::<bool>(),
                rng.random::<bool>(),
                rng.random_range(-20.0..20.0),
            )
        })
        .collect();
    let worst = draws
        .par_iter()
        .map(|&(ow, ost, dw, dst, beta, copro, lambda, v)| {
            let mut atom = presets::calcium();
            atom.beta_eg = beta;
            let d = LaserDrive {
                omega_w: mhz(ow),
                omega_st: mhz(ost),
                delta_w: mhz(dw),
                delta_st: mhz(dst),
                st_copropagates: copro,
            };
            let scheme = if lambda {
                Scheme::Lambda
            } else {
                Scheme::Ladder
            };
            let (pop, coh) = cooling::force_forms(&atom, &d, scheme, v).expect("solver");
            (pop - coh).abs() / pop.abs().max(coh.abs()).max(f64::MIN_POSITIVE)
        })
        .reduce(|| 0.0, f64::max);
    out.check(
        worst <= 1e-8,
        format!("max relative split {worst:.3e} over 200 drives (bound 1e-8)"),
    );
    timed(&mut out, start);
    out
}
