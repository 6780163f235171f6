//! Physical constants (SI) and frequency-unit helpers.

/// Reduced Planck constant, J s.
pub const HBAR: f64 = 1.054571817e-34;

/// Boltzmann constant, J/K.
pub const KB: f64 = 1.380649e-23;

/// Atomic mass unit, kg.
pub const AMU: f64 = 1.66053906660e-27;

/// 2 pi.
pub const TAU: f64 = std::f64::consts::TAU;

/// Convert a frequency quoted in MHz (the `omega / 2 pi` convention) to an
/// angular frequency in rad/s.
pub fn mhz(value: f64) -> f64 {
    TAU * value * 1e6
}

/// Convert an angular frequency in rad/s back to MHz (`omega / 2 pi`).
pub fn to_mhz(omega: f64) -> f64 {
    omega / (TAU * 1e6)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mhz_round_trip() {
        assert!((to_mhz(mhz(20.0)) - 20.0).abs() < 1e-12);
        assert!((mhz(20.0) - 1.2566370614359172e8).abs() < 1.0);
    }
}
