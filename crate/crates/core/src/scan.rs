//! Sampled parameter-scan curves, their serialization, and peak / linewidth
//! extraction from scanned spectra.

use rayon::prelude::*;

use crate::analytics;
use crate::error::Error;
use crate::model::{build_generator, AtomSpec, LaserDrive, Scheme};
use crate::steady_state::steady_state;
use crate::Result;

/// One named observable column of a scan.
#[derive(Debug, Clone, serde::Serialize)]
pub struct Column {
    pub name: String,
    pub values: Vec<f64>,
}

/// A sampled curve: abscissa grid, observable columns and a snapshot of every
/// fixed parameter that produced it.
#[derive(Debug, Clone)]
pub struct ScanResult {
    /// Abscissa label including the unit, e.g. `delta_w_mhz`.
    pub abscissa_name: String,
    pub abscissa: Vec<f64>,
    pub columns: Vec<Column>,
    /// Resolved fixed parameters, in insertion order.
    pub fixed: Vec<(String, String)>,
}

impl ScanResult {
    pub fn column(&self, name: &str) -> Result<&[f64]> {
        self.columns
            .iter()
            .find(|c| c.name == name)
            .map(|c| c.values.as_slice())
            .ok_or_else(|| Error::NoSuchColumn(name.into()))
    }

    /// CSV with `#`-prefixed metadata lines, a header row, and 12 significant
    /// digits per value.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.fixed {
            out.push_str(&format!("# {k} = {v}\n"));
        }
        out.push_str(&self.abscissa_name);
        for c in &self.columns {
            out.push(',');
            out.push_str(&c.name);
        }
        out.push('\n');
        for (i, x) in self.abscissa.iter().enumerate() {
            out.push_str(&format!("{x:.11e}"));
            for c in &self.columns {
                out.push_str(&format!(",{:.11e}", c.values[i]));
            }
            out.push('\n');
        }
        out
    }

    /// JSON object with `meta` (fixed parameters) and `data` (abscissa and
    /// columns) keys.
    pub fn to_json(&self) -> serde_json::Value {
        let mut meta = serde_json::Map::new();
        for (k, v) in &self.fixed {
            meta.insert(k.clone(), serde_json::Value::String(v.clone()));
        }
        let mut cols = serde_json::Map::new();
        cols.insert(self.abscissa_name.clone(), serde_json::json!(self.abscissa));
        for c in &self.columns {
            cols.insert(c.name.clone(), serde_json::json!(c.values));
        }
        serde_json::json!({ "meta": meta, "data": cols })
    }

    /// Check the scan invariants: strictly monotone finite abscissa, equal
    /// column lengths, and (when all three populations are present) rows
    /// summing to one.
    pub fn validate(&self) -> Result<()> {
        validate_grid(&self.abscissa)?;
        for c in &self.columns {
            if c.values.len() != self.abscissa.len() {
                return Err(Error::InvalidGrid(format!(
                    "column {} has {} values for {} abscissa points",
                    c.name,
                    c.values.len(),
                    self.abscissa.len()
                )));
            }
        }
        let pops: Vec<&Column> = self
            .columns
            .iter()
            .filter(|c| matches!(c.name.as_str(), "pop_g" | "pop_m" | "pop_e"))
            .collect();
        if pops.len() == 3 {
            for i in 0..self.abscissa.len() {
                let sum: f64 = pops.iter().map(|c| c.values[i]).sum();
                if (sum - 1.0).abs() > 1e-8 {
                    return Err(Error::Numerical(format!(
                        "populations sum to {sum} at row {i}"
                    )));
                }
                for c in &pops {
                    if !(-1e-9..=1.0 + 1e-9).contains(&c.values[i]) {
                        return Err(Error::Numerical(format!(
                            "{} = {} outside [0, 1] at row {i}",
                            c.name, c.values[i]
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

pub(crate) fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidGrid("empty grid".into()));
    }
    if grid.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidGrid("non-finite grid point".into()));
    }
    if grid.len() > 1 {
        let up = grid.windows(2).all(|w| w[1] > w[0]);
        let down = grid.windows(2).all(|w| w[1] < w[0]);
        if !up && !down {
            return Err(Error::InvalidGrid("grid is not strictly monotone".into()));
        }
    }
    Ok(())
}

/// Peak characterization of a scanned resonance.
#[derive(Debug, Clone, serde::Serialize)]
pub struct PeakSummary {
    pub peak_abscissa: f64,
    pub peak_value: f64,
    pub fwhm: f64,
    pub left_half_crossing: f64,
    pub right_half_crossing: f64,
}

/// Steady-state populations versus `delta_w` on the supplied grid (rad/s).
///
/// Column names are `pop_g`, `pop_m`, `pop_e`; the abscissa is emitted in
/// MHz. Grid points are independent and evaluated in parallel.
pub fn scan_delta_w(
    atom: &AtomSpec,
    drive: &LaserDrive,
    scheme: Scheme,
    grid: &[f64],
) -> Result<ScanResult> {
    validate_grid(grid)?;
    let pops: Vec<[f64; 3]> = grid
        .par_iter()
        .map(|&delta_w| {
            let d = LaserDrive { delta_w, ..*drive };
            let gen = build_generator(atom, &d, scheme)?;
            let rho =
                steady_state(&gen).map_err(|e| e.at_grid_point("delta_w (rad/s)", delta_w))?;
            Ok([rho.pop_g(), rho.pop_m(), rho.pop_e()])
        })
        .collect::<Result<Vec<_>>>()?;

    let result = ScanResult {
        abscissa_name: "delta_w_mhz".into(),
        abscissa: grid.iter().map(|&x| crate::consts::to_mhz(x)).collect(),
        columns: ["pop_g", "pop_m", "pop_e"]
            .iter()
            .enumerate()
            .map(|(k, name)| Column {
                name: (*name).into(),
                values: pops.iter().map(|p| p[k]).collect(),
            })
            .collect(),
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
                "delta_st_mhz".into(),
                format!("{}", crate::consts::to_mhz(drive.delta_st)),
            ),
        ],
    };
    result.validate()?;
    Ok(result)
}

/// Number of points of the default `delta_w` scan grid.
pub const DEFAULT_SCAN_POINTS: usize = 801;

/// Default `delta_w` grid for resonance scans: 801 points spanning ten
/// effective linewidths on either side of the light shift. Guarantees the
/// half-maximum crossings are bracketed in the regimes of interest.
pub fn default_delta_w_grid(atom: &AtomSpec, drive: &LaserDrive) -> Vec<f64> {
    let center = analytics::light_shift(drive);
    let half_span = 10.0 * analytics::gamma_eff(atom, drive);
    linspace(center - half_span, center + half_span, DEFAULT_SCAN_POINTS)
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2);
    let step = (b - a) / (n - 1) as f64;
    (0..n).map(|i| a + i as f64 * step).collect()
}

/// Locate the peak of `column` in a scan and measure its full width at half
/// maximum.
///
/// The peak is refined by a quadratic fit through the three samples around
/// the discrete maximum. The half-maximum crossings are then located by
/// bisection on fresh evaluations of `eval` (the underlying model, not an
/// interpolation of the scan) to an abscissa tolerance of `1e-4` times the
/// grid-estimated width.
pub fn peak_and_fwhm(
    scan: &ScanResult,
    column: &str,
    eval: impl Fn(f64) -> Result<f64>,
) -> Result<PeakSummary> {
    let values = scan.column(column)?;
    let xs = &scan.abscissa;
    let n = xs.len();
    if n < 3 {
        return Err(Error::InvalidGrid("need at least 3 points".into()));
    }

    let (imax, _) = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");
    if imax == 0 || imax == n - 1 {
        return Err(Error::PeakNotBracketed(format!(
            "maximum of {column} sits on the grid edge (index {imax})"
        )));
    }

    // Quadratic refinement through the three points around the maximum.
    let step = xs[imax + 1] - xs[imax];
    let (l, m, r) = (values[imax - 1], values[imax], values[imax + 1]);
    let offset = analytics::parabola_offset(l, m, r);
    let peak_abscissa = xs[imax] + offset * step;
    let denom = l - 2.0 * m + r;
    let peak_value = if denom == 0.0 {
        m
    } else {
        m - 0.125 * (l - r) * (l - r) / denom
    };
    let half = peak_value / 2.0;

    // Bracket the half crossings on the grid.
    let left_idx = (0..imax)
        .rev()
        .find(|&i| values[i] <= half)
        .ok_or_else(|| {
            Error::HalfMaxNotBracketed(format!("left half-maximum of {column} beyond the grid"))
        })?;
    let right_idx = ((imax + 1)..n)
        .find(|&i| values[i] <= half)
        .ok_or_else(|| {
            Error::HalfMaxNotBracketed(format!("right half-maximum of {column} beyond the grid"))
        })?;

    let width_estimate = xs[right_idx] - xs[left_idx + 1] + step.abs();
    let tol = 1e-4 * width_estimate.abs();

    let left = bisect_crossing(&eval, xs[left_idx], xs[left_idx + 1], half, tol)?;
    let right = bisect_crossing(&eval, xs[right_idx], xs[right_idx - 1], half, tol)?;
    let (left, right) = if left <= right {
        (left, right)
    } else {
        (right, left)
    };

    let summary = PeakSummary {
        peak_abscissa,
        peak_value,
        fwhm: right - left,
        left_half_crossing: left,
        right_half_crossing: right,
    };
    if !(summary.left_half_crossing < summary.peak_abscissa
        && summary.peak_abscissa < summary.right_half_crossing
        && summary.fwhm > 0.0)
    {
        return Err(Error::Numerical(format!(
            "inconsistent peak summary: {summary:?}"
        )));
    }
    Ok(summary)
}

/// Bisection for `eval(x) = target` between `below` (value <= target) and
/// `above` (value > target).
fn bisect_crossing(
    eval: &impl Fn(f64) -> Result<f64>,
    mut below: f64,
    mut above: f64,
    target: f64,
    tol: f64,
) -> Result<f64> {
    for _ in 0..200 {
        if (above - below).abs() <= tol {
            break;
        }
        let mid = 0.5 * (below + above);
        if eval(mid)? <= target {
            below = mid;
        } else {
            above = mid;
        }
    }
    Ok(0.5 * (below + above))
}

/// Measure the excited-population resonance versus `delta_w` at the given
/// drive, on the default grid, with solver-backed half-maximum refinement.
/// The returned abscissas are in rad/s.
pub fn fwhm_of_pe(atom: &AtomSpec, drive: &LaserDrive, scheme: Scheme) -> Result<PeakSummary> {
    let grid = default_delta_w_grid(atom, drive);
    let scan = scan_delta_w(atom, drive, scheme, &grid)?;
    // peak_and_fwhm works on the emitted MHz abscissa; convert back at the end.
    let summary = peak_and_fwhm(&scan, "pop_e", |delta_w_mhz| {
        let d = LaserDrive {
            delta_w: crate::consts::mhz(delta_w_mhz),
            ..*drive
        };
        let gen = build_generator(atom, &d, scheme)?;
        Ok(steady_state(&gen)?.pop_e())
    })?;
    Ok(PeakSummary {
        peak_abscissa: crate::consts::mhz(summary.peak_abscissa),
        peak_value: summary.peak_value,
        fwhm: crate::consts::mhz(summary.fwhm),
        left_half_crossing: crate::consts::mhz(summary.left_half_crossing),
        right_half_crossing: crate::consts::mhz(summary.right_half_crossing),
    })
}
