//! Ion presets.
//!
//! Wavelengths are the quadrupole (weak) and repumper-range (strong)
//! transitions of the alkali-like ions with a metastable d orbital. The
//! default decay rate is gamma / 2 pi = 20 MHz with all decay into the
//! ground state; `barium_beta075` carries the realistic Ba+ branching.

use crate::consts::{mhz, AMU, TAU};
use crate::model::AtomSpec;

/// Ca+: 732 nm (S -> D3/2), 866 nm (D3/2 -> P1/2), mass 40 u.
pub fn calcium() -> AtomSpec {
    AtomSpec {
        gamma: mhz(20.0),
        beta_eg: 1.0,
        lambda_w: 732e-9,
        lambda_st: 866e-9,
        mass: 40.0 * AMU,
        name: "Ca+".into(),
    }
}

/// Sr+: 687 nm, 1092 nm, mass 88 u.
pub fn strontium() -> AtomSpec {
    AtomSpec {
        gamma: mhz(20.0),
        beta_eg: 1.0,
        lambda_w: 687e-9,
        lambda_st: 1092e-9,
        mass: 88.0 * AMU,
        name: "Sr+".into(),
    }
}

/// Ba+: 2051 nm, 650 nm, mass 138 u.
pub fn barium() -> AtomSpec {
    AtomSpec {
        gamma: mhz(20.0),
        beta_eg: 1.0,
        lambda_w: 2051e-9,
        lambda_st: 650e-9,
        mass: 138.0 * AMU,
        name: "Ba+".into(),
    }
}

/// Ba+ with the realistic branching ratio beta_eg = 0.75.
pub fn barium_beta075() -> AtomSpec {
    AtomSpec {
        beta_eg: 0.75,
        name: "Ba+ (beta_eg = 0.75)".into(),
        ..barium()
    }
}

/// Total decay rate of the Ca+ 4p P1/2 level (tau ~ 6.9 ns), rad/s. This is
/// the dipole line used for conventional single-photon Doppler cooling; its
/// two-level Doppler limit is about 0.55 mK.
pub const CA_DIPOLE_LINE_GAMMA: f64 = TAU * 23.06e6;

/// Look up a preset by CLI name.
pub fn by_name(name: &str) -> Option<AtomSpec> {
    match name.to_ascii_lowercase().as_str() {
        "ca" | "ca+" | "calcium" => Some(calcium()),
        "sr" | "sr+" | "strontium" => Some(strontium()),
        "ba" | "ba+" | "barium" => Some(barium()),
        "ba-075" | "ba075" | "barium-075" => Some(barium_beta075()),
        _ => None,
    }
}

/// Names accepted by [`by_name`], for help text.
pub const PRESET_NAMES: &[&str] = &["ca", "sr", "ba", "ba-075"];
