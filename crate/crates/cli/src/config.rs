//! Flat `key = value` run configuration with command-line overrides.
//!
//! Frequencies are entered in MHz (the `omega / 2 pi` convention used by
//! every parameter table in this field) and converted to angular frequencies
//! at the boundary. Unknown keys are rejected.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use ioncool::consts::mhz;
use ioncool::presets;
use ioncool::{AtomSpec, LaserDrive, Scheme};

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

/// Scan axis of a run. Exactly one per configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanAxis {
    /// Weak-transition detuning, MHz.
    DeltaW,
    /// Strong-transition detuning, MHz (spectrum command; weak detuning may
    /// be slaved to the light shift).
    DeltaSt,
    /// Drive ratio `|omega_st / delta_st|`, dimensionless.
    Ratio,
    /// Relative detuning `delta_w - delta_ls` in units of `gamma_eff`.
    DeltaWRel,
    /// Scaled velocity `k_eff v_rms / (gamma / 2)`, dimensionless.
    Vrms,
}

impl ScanAxis {
    fn parse(s: &str) -> Result<Self, ConfigError> {
        match s {
            "delta_w" => Ok(Self::DeltaW),
            "delta_st" => Ok(Self::DeltaSt),
            "ratio" => Ok(Self::Ratio),
            "delta_w_rel" => Ok(Self::DeltaWRel),
            "vrms" => Ok(Self::Vrms),
            other => err(format!(
                "unknown scan axis `{other}` (expected delta_w, delta_st, ratio, delta_w_rel or vrms)"
            )),
        }
    }
}

/// How the weak detuning is set when it is not the scan axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DeltaWRule {
    /// Fixed value, rad/s.
    Fixed(f64),
    /// Track the light shift (fluorescence maximum).
    LightShift,
    /// Track `delta_ls - gamma_eff / 2` (temperature minimum).
    Cooling,
}

/// How the strong Rabi frequency is set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OmegaStRule {
    /// Fixed value, rad/s.
    Fixed(f64),
    /// Closed-form optimum for the configured `omega_w` and `delta_st`.
    Optimal,
}

/// Fully resolved run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub atom: AtomSpec,
    pub scheme: Scheme,
    pub omega_w: f64,
    pub omega_st: OmegaStRule,
    pub delta_w: DeltaWRule,
    pub delta_st: f64,
    pub st_copropagates: bool,
    pub scan: ScanAxis,
    pub scan_min: f64,
    pub scan_max: f64,
    pub scan_points: usize,
    pub log_spacing: bool,
    pub curve: Option<String>,
    pub out: Option<String>,
    pub json: bool,
}

impl RunConfig {
    /// Parse a config file (may be absent) plus `key=value` overrides.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self, ConfigError> {
        let mut map: BTreeMap<String, String> = BTreeMap::new();
        if let Some(p) = path {
            let text = std::fs::read_to_string(p)
                .map_err(|e| ConfigError(format!("cannot read {}: {e}", p.display())))?;
            parse_key_values(&text, &mut map)?;
        }
        for ov in overrides {
            let Some((k, v)) = ov.split_once('=') else {
                return err(format!("override `{ov}` is not of the form key=value"));
            };
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
        Self::from_map(map)
    }

    fn from_map(mut map: BTreeMap<String, String>) -> Result<Self, ConfigError> {
        let atom = match map.remove("ion").as_deref() {
            Some("custom") => {
                let gamma = mhz(parse_f64(&mut map, "gamma_mhz")?);
                let beta_eg = parse_f64(&mut map, "beta_eg")?;
                let lambda_w = parse_f64(&mut map, "lambda_w_nm")? * 1e-9;
                let lambda_st = parse_f64(&mut map, "lambda_st_nm")? * 1e-9;
                let mass = parse_f64(&mut map, "mass_u")? * ioncool::consts::AMU;
                AtomSpec {
                    gamma,
                    beta_eg,
                    lambda_w,
                    lambda_st,
                    mass,
                    name: "custom".into(),
                }
            }
            Some(name) => {
                let mut atom = presets::by_name(name).ok_or_else(|| {
                    ConfigError(format!(
                        "unknown ion `{name}` (presets: {}, or `custom`)",
                        presets::PRESET_NAMES.join(", ")
                    ))
                })?;
                // optional overrides on top of a preset
                if let Some(g) = map.remove("gamma_mhz") {
                    atom.gamma = mhz(parse_value("gamma_mhz", &g)?);
                }
                if let Some(b) = map.remove("beta_eg") {
                    atom.beta_eg = parse_value("beta_eg", &b)?;
                }
                atom
            }
            None => return err("missing required key `ion`"),
        };
        atom.validate()
            .map_err(|e| ConfigError(format!("invalid atom: {e}")))?;

        let scheme = match map.remove("scheme").as_deref() {
            None | Some("ladder") => Scheme::Ladder,
            Some("lambda") => Scheme::Lambda,
            Some(other) => return err(format!("unknown scheme `{other}`")),
        };

        let omega_w = mhz(parse_f64(&mut map, "omega_w_mhz")?);
        let omega_st = match map.remove("omega_st_mhz").as_deref() {
            Some("opt") => OmegaStRule::Optimal,
            Some(v) => OmegaStRule::Fixed(mhz(parse_value("omega_st_mhz", v)?)),
            None => return err("missing required key `omega_st_mhz` (number or `opt`)"),
        };
        let delta_st = mhz(parse_f64(&mut map, "delta_st_mhz")?);
        let delta_w = match map.remove("delta_w_mhz").as_deref() {
            Some("light-shift") => DeltaWRule::LightShift,
            Some("cooling") => DeltaWRule::Cooling,
            Some(v) => DeltaWRule::Fixed(mhz(parse_value("delta_w_mhz", v)?)),
            None => DeltaWRule::LightShift,
        };
        let st_copropagates = match map.remove("st_copropagates").as_deref() {
            None | Some("true") => true,
            Some("false") => false,
            Some(other) => {
                return err(format!("st_copropagates must be true/false, got `{other}`"))
            }
        };

        let scan = match map.remove("scan") {
            Some(s) => ScanAxis::parse(&s)?,
            None => return err("missing required key `scan`"),
        };
        let scan_min = parse_f64(&mut map, "scan_min")?;
        let scan_max = parse_f64(&mut map, "scan_max")?;
        if !scan_min.is_finite() || !scan_max.is_finite() || scan_min >= scan_max {
            return err(format!(
                "scan range [{scan_min}, {scan_max}] must be finite with scan_min < scan_max"
            ));
        }
        let scan_points = match map.remove("scan_points") {
            Some(v) => v
                .parse::<usize>()
                .map_err(|_| ConfigError(format!("scan_points must be an integer, got `{v}`")))?,
            None => 201,
        };
        if scan_points < 1 {
            return err("scan_points must be >= 1");
        }
        let log_spacing = match map.remove("scan_spacing").as_deref() {
            None | Some("linear") => false,
            Some("log") => true,
            Some(other) => return err(format!("scan_spacing must be linear/log, got `{other}`")),
        };
        if log_spacing && scan_min <= 0.0 {
            return err("log spacing requires a positive scan_min");
        }

        let curve = map.remove("curve");
        let out = map.remove("out");
        let json = match map.remove("format").as_deref() {
            None | Some("csv") => false,
            Some("json") => true,
            Some(other) => return err(format!("format must be csv/json, got `{other}`")),
        };

        if let Some(stray) = map.keys().next() {
            return err(format!("unknown key `{stray}`"));
        }

        Ok(Self {
            atom,
            scheme,
            omega_w,
            omega_st,
            delta_w,
            delta_st,
            st_copropagates,
            scan,
            scan_min,
            scan_max,
            scan_points,
            log_spacing,
            curve,
            out,
            json,
        })
    }

    /// Resolve the strong Rabi frequency (applying the closed-form optimum
    /// when requested) and build the base drive.
    pub fn base_drive(&self) -> LaserDrive {
        let omega_st = match self.omega_st {
            OmegaStRule::Fixed(v) => v,
            OmegaStRule::Optimal => {
                ioncool::analytics::optimal_ratio(&self.atom, self.omega_w, self.delta_st, None)
                    .omega_st_opt
            }
        };
        let mut d = LaserDrive {
            omega_w: self.omega_w,
            omega_st,
            delta_w: 0.0,
            delta_st: self.delta_st,
            st_copropagates: self.st_copropagates,
        };
        d.delta_w = match self.delta_w {
            DeltaWRule::Fixed(v) => v,
            DeltaWRule::LightShift => ioncool::analytics::light_shift(&d),
            DeltaWRule::Cooling => ioncool::cooling::cooling_detuning(&self.atom, &d),
        };
        d
    }

    /// The scan grid in the axis's native unit.
    pub fn grid(&self) -> Vec<f64> {
        if self.scan_points == 1 {
            return vec![self.scan_min];
        }
        if self.log_spacing {
            let (la, lb) = (self.scan_min.ln(), self.scan_max.ln());
            let step = (lb - la) / (self.scan_points - 1) as f64;
            (0..self.scan_points)
                .map(|i| (la + i as f64 * step).exp())
                .collect()
        } else {
            ioncool::scan::linspace(self.scan_min, self.scan_max, self.scan_points)
        }
    }
}

fn parse_value(key: &str, v: &str) -> Result<f64, ConfigError> {
    v.parse::<f64>()
        .map_err(|_| ConfigError(format!("key `{key}`: `{v}` is not a number")))
}

fn parse_f64(map: &mut BTreeMap<String, String>, key: &str) -> Result<f64, ConfigError> {
    match map.remove(key) {
        Some(v) => parse_value(key, &v),
        None => err(format!("missing required key `{key}`")),
    }
}

fn parse_key_values(text: &str, map: &mut BTreeMap<String, String>) -> Result<(), ConfigError> {
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return err(format!("line {}: expected key = value", lineno + 1));
        };
        let key = k.trim().to_string();
        if map.contains_key(&key) {
            return err(format!("line {}: duplicate key `{key}`", lineno + 1));
        }
        map.insert(key, v.trim().to_string());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_text() -> String {
        "ion = ca\nomega_w_mhz = 1\nomega_st_mhz = 100\ndelta_st_mhz = -100\n\
         scan = delta_w\nscan_min = -60\nscan_max = 20\nscan_points = 5\n"
            .to_string()
    }

    fn load_text(text: &str) -> Result<RunConfig, ConfigError> {
        let mut map = BTreeMap::new();
        parse_key_values(text, &mut map)?;
        RunConfig::from_map(map)
    }

    #[test]
    fn parses_a_minimal_config() {
        let cfg = load_text(&base_text()).unwrap();
        assert_eq!(cfg.atom.name, "Ca+");
        assert_eq!(cfg.scan, ScanAxis::DeltaW);
        assert_eq!(cfg.scan_points, 5);
        assert!(!cfg.json);
        let d = cfg.base_drive();
        assert_eq!(d.omega_w, mhz(1.0));
        // delta_w defaults to the light shift
        assert!((d.delta_w - ioncool::analytics::light_shift(&d)).abs() < 1e-9);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_ranges() {
        let mut t = base_text();
        t.push_str("typo_key = 3\n");
        assert!(load_text(&t).is_err());

        let t = base_text().replace("scan_min = -60", "scan_min = 60");
        assert!(load_text(&t).is_err());

        let t = base_text().replace("ion = ca", "ion = unobtainium");
        assert!(load_text(&t).is_err());
    }

    #[test]
    fn optimal_strong_drive_rule() {
        let t = base_text().replace("omega_st_mhz = 100", "omega_st_mhz = opt");
        let t = t.replace("delta_st_mhz = -100", "delta_st_mhz = -200");
        let cfg = load_text(&t).unwrap();
        let d = cfg.base_drive();
        // omega_w = 1 MHz, delta_st = -200 MHz: closed-form optimum ~106 MHz
        assert!((ioncool::consts::to_mhz(d.omega_st) - 106.4).abs() < 0.5);
    }

    #[test]
    fn log_grid_and_single_point() {
        let mut t = base_text().replace("scan_min = -60", "scan_min = 0.1");
        t = t.replace("scan_max = 20", "scan_max = 10");
        t.push_str("scan_spacing = log\n");
        let cfg = load_text(&t).unwrap();
        let grid = cfg.grid();
        assert_eq!(grid.len(), 5);
        assert!((grid[0] - 0.1).abs() < 1e-12 && (grid[4] - 10.0).abs() < 1e-12);
        // log-spaced: constant ratio
        let r = grid[1] / grid[0];
        assert!((grid[2] / grid[1] - r).abs() < 1e-9);
    }

    #[test]
    fn custom_ion() {
        let t = "ion = custom\ngamma_mhz = 20\nbeta_eg = 0.9\nlambda_w_nm = 700\n\
                 lambda_st_nm = 900\nmass_u = 40\nomega_w_mhz = 1\nomega_st_mhz = 50\n\
                 delta_st_mhz = -100\nscan = delta_w\nscan_min = -30\nscan_max = 0\n";
        let cfg = load_text(t).unwrap();
        assert_eq!(cfg.atom.beta_eg, 0.9);
        assert!((cfg.atom.lambda_w - 700e-9).abs() < 1e-15);
    }
}
