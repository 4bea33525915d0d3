//! Flat key/value run configuration.
//!
//! The config file holds one `key = value` pair per line with `#` comments;
//! keys mirror the physical symbol names (`omega_rabi`, `delta_drive`,
//! `gamma0`, `lambda`, `delta_spec`, ...). Every key can also be supplied
//! as a same-named command-line flag, which takes precedence over the file.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use qsync_core::{
    Axis, CouplingSweepMode, DensityMatrix, DriveParams, Observable, SimConfig, SpectrumParams,
    SweepParam, SweepSpec,
};

/// A configuration problem; rendered with the offending line/field and
/// mapped to exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Solver {
    ClosedForm,
    Ode,
    Volterra,
    Pseudomode,
}

impl fmt::Display for Solver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Solver::ClosedForm => "closed_form",
            Solver::Ode => "ode",
            Solver::Volterra => "volterra",
            Solver::Pseudomode => "pseudomode",
        };
        f.write_str(name)
    }
}

impl FromStr for Solver {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        match s {
            "closed_form" => Ok(Solver::ClosedForm),
            "ode" => Ok(Solver::Ode),
            "volterra" => Ok(Solver::Volterra),
            "pseudomode" => Ok(Solver::Pseudomode),
            other => Err(ConfigError(format!(
                "solver: unknown value '{other}' (expected closed_form | ode | volterra | pseudomode)"
            ))),
        }
    }
}

/// All run settings with their defaults; the resolved union of defaults,
/// config file and command-line overrides.
#[derive(Debug, Clone)]
pub struct Settings {
    pub omega_rabi: f64,
    pub delta_drive: f64,
    pub gamma0: f64,
    pub lambda: f64,
    pub delta_spec: f64,
    pub t_final: f64,
    pub n_steps: usize,
    pub rho_gg: f64,
    pub re_rho_ge: f64,
    pub im_rho_ge: f64,
    pub phi: f64,
    pub solver: Solver,
    pub workers: usize,
    pub threshold: f64,
    pub coupling_sweep_mode: CouplingSweepMode,
    pub cross_check: bool,
    pub snapshot_times: Vec<f64>,
    pub n_theta: usize,
    pub n_phi: usize,
    pub x_param: SweepParam,
    pub x_min: f64,
    pub x_max: f64,
    pub x_n: usize,
    pub y_param: SweepParam,
    pub y_min: f64,
    pub y_max: f64,
    pub y_n: usize,
    pub t_eval: f64,
    pub observable: String,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            omega_rabi: 1.0,
            delta_drive: 0.0,
            gamma0: 1.0,
            lambda: 0.1,
            delta_spec: 0.0,
            t_final: 100.0,
            n_steps: 2000,
            rho_gg: 0.5,
            re_rho_ge: 0.5,
            im_rho_ge: 0.0,
            phi: 0.0,
            solver: Solver::ClosedForm,
            workers: 0,
            threshold: 1e-3,
            coupling_sweep_mode: CouplingSweepMode::Absolute,
            cross_check: false,
            snapshot_times: vec![0.0, 10.0, 100.0],
            n_theta: 181,
            n_phi: 361,
            x_param: SweepParam::DeltaSpec,
            x_min: -6.0,
            x_max: 2.0,
            x_n: 161,
            y_param: SweepParam::Gamma0,
            y_min: 0.1,
            y_max: 2.0,
            y_n: 96,
            t_eval: 100.0,
            observable: "max_s".into(),
        }
    }
}

fn parse_snapshot_times(value: &str, ctx: &str) -> Result<Vec<f64>, ConfigError> {
    let times: Result<Vec<f64>, _> = value
        .split(',')
        .map(|part| {
            part.trim()
                .parse::<f64>()
                .map_err(|_| ConfigError(format!("{ctx}: '{part}' is not a number")))
        })
        .collect();
    let times = times?;
    if times.is_empty() || times.iter().any(|&t| !t.is_finite() || t < 0.0) {
        return Err(ConfigError(format!(
            "{ctx}: snapshot times must be finite and >= 0"
        )));
    }
    Ok(times)
}

impl Settings {
    /// Applies one key from the config file (or a flag of the same name).
    fn set(&mut self, key: &str, value: &str, ctx: &str) -> Result<(), ConfigError> {
        let float = |v: &str| {
            v.parse::<f64>()
                .map_err(|_| ConfigError(format!("{ctx}: '{v}' is not a number")))
        };
        let integer = |v: &str| {
            v.parse::<usize>()
                .map_err(|_| ConfigError(format!("{ctx}: '{v}' is not a nonnegative integer")))
        };
        let boolean = |v: &str| match v {
            "true" | "1" | "yes" => Ok(true),
            "false" | "0" | "no" => Ok(false),
            _ => Err(ConfigError(format!("{ctx}: '{v}' is not a boolean"))),
        };
        let sweep_param =
            |v: &str| SweepParam::from_str(v).map_err(|e| ConfigError(format!("{ctx}: {e}")));
        match key {
            "omega_rabi" => self.omega_rabi = float(value)?,
            "delta_drive" => self.delta_drive = float(value)?,
            "gamma0" => self.gamma0 = float(value)?,
            "lambda" => self.lambda = float(value)?,
            "delta_spec" => self.delta_spec = float(value)?,
            "t_final" => self.t_final = float(value)?,
            "n_steps" => self.n_steps = integer(value)?,
            "rho_gg" => self.rho_gg = float(value)?,
            "re_rho_ge" => self.re_rho_ge = float(value)?,
            "im_rho_ge" => self.im_rho_ge = float(value)?,
            "phi" => self.phi = float(value)?,
            "solver" => self.solver = value.parse()?,
            "workers" => self.workers = integer(value)?,
            "threshold" => self.threshold = float(value)?,
            "coupling_sweep_mode" => {
                self.coupling_sweep_mode = CouplingSweepMode::from_str(value)
                    .map_err(|e| ConfigError(format!("{ctx}: {e}")))?
            }
            "cross_check" => self.cross_check = boolean(value)?,
            "snapshot_times" => self.snapshot_times = parse_snapshot_times(value, ctx)?,
            "n_theta" => self.n_theta = integer(value)?,
            "n_phi" => self.n_phi = integer(value)?,
            "x_param" => self.x_param = sweep_param(value)?,
            "x_min" => self.x_min = float(value)?,
            "x_max" => self.x_max = float(value)?,
            "x_n" => self.x_n = integer(value)?,
            "y_param" => self.y_param = sweep_param(value)?,
            "y_min" => self.y_min = float(value)?,
            "y_max" => self.y_max = float(value)?,
            "y_n" => self.y_n = integer(value)?,
            "t_eval" => self.t_eval = float(value)?,
            "observable" => match value {
                "max_s" | "s_at_phi" | "phi_star" => self.observable = value.into(),
                other => {
                    return Err(ConfigError(format!(
                        "{ctx}: unknown observable '{other}' (expected max_s | s_at_phi | phi_star)"
                    )))
                }
            },
            other => return Err(ConfigError(format!("{ctx}: unknown key '{other}'"))),
        }
        Ok(())
    }

    /// Reads a config file and layers it on top of the defaults.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read config file {}: {e}", path.display())))?;
        let mut settings = Settings::default();
        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw_line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError(format!(
                    "line {line_no}: expected 'key = value', got '{raw_line}'"
                )));
            };
            let key = key.trim();
            let ctx = format!("line {line_no}: {key}");
            settings.set(key, value.trim(), &ctx)?;
        }
        Ok(settings)
    }

    /// Applies `key = value` pairs collected from the command line; these
    /// win over the config file.
    pub fn apply_overrides(
        &mut self,
        overrides: &HashMap<String, String>,
    ) -> Result<(), ConfigError> {
        let mut keys: Vec<&String> = overrides.keys().collect();
        keys.sort();
        for key in keys {
            let ctx = format!("flag --{key}");
            self.set(key, &overrides[key], &ctx)?;
        }
        Ok(())
    }

    pub fn drive(&self) -> Result<DriveParams, ConfigError> {
        DriveParams::new(self.omega_rabi, self.delta_drive).map_err(|e| ConfigError(e.to_string()))
    }

    pub fn spectrum(&self) -> Result<SpectrumParams, ConfigError> {
        SpectrumParams::new(self.gamma0, self.lambda, self.delta_spec)
            .map_err(|e| ConfigError(e.to_string()))
    }

    pub fn initial_state(&self) -> Result<DensityMatrix, ConfigError> {
        DensityMatrix::new(self.rho_gg, Complex64::new(self.re_rho_ge, self.im_rho_ge))
            .map_err(|e| ConfigError(format!("initial state: {e}")))
    }

    pub fn observable(&self) -> Observable {
        match self.observable.as_str() {
            "s_at_phi" => Observable::SAtPhi(self.phi),
            "phi_star" => Observable::PhiStar,
            _ => Observable::MaxS,
        }
    }

    pub fn sweep_spec(&self) -> Result<SweepSpec, ConfigError> {
        let spec = SweepSpec {
            x: Axis {
                param: self.x_param,
                min: self.x_min,
                max: self.x_max,
                n: self.x_n,
            },
            y: Axis {
                param: self.y_param,
                min: self.y_min,
                max: self.y_max,
                n: self.y_n,
            },
            drive: self.drive()?,
            spectrum: self.spectrum()?,
            t_eval: self.t_eval,
            initial_state: self.initial_state()?,
            observable: self.observable(),
            coupling_mode: self.coupling_sweep_mode,
        };
        spec.validate().map_err(|e| ConfigError(e.to_string()))?;
        Ok(spec)
    }

    pub fn sim_config(&self) -> Result<SimConfig, ConfigError> {
        SimConfig::new(
            self.drive()?,
            self.spectrum()?,
            self.t_final,
            self.n_steps,
            self.initial_state()?,
        )
        .map_err(|e| ConfigError(e.to_string()))
    }

    /// Uniform output time grid for trajectory runs; a single sample at
    /// t = 0 when t_final is zero.
    pub fn time_grid(&self) -> Result<Vec<f64>, ConfigError> {
        let sim = self.sim_config()?;
        if sim.t_final == 0.0 {
            return Ok(vec![0.0]);
        }
        Ok(sim.time_grid())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_config(text: &str) -> tempfile::NamedTempFile {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        file.write_all(text.as_bytes()).unwrap();
        file
    }

    #[test]
    fn parses_keys_and_comments() {
        let file = write_config(
            "# run for the non-Markovian panel\n\
             omega_rabi = 2.0\n\
             lambda = 10 # wide spectrum\n\
             \n\
             solver = volterra\n\
             snapshot_times = 0, 5, 20\n",
        );
        let settings = Settings::load(file.path()).unwrap();
        assert_eq!(settings.omega_rabi, 2.0);
        assert_eq!(settings.lambda, 10.0);
        assert_eq!(settings.solver, Solver::Volterra);
        assert_eq!(settings.snapshot_times, vec![0.0, 5.0, 20.0]);
        // untouched keys keep their defaults
        assert_eq!(settings.delta_drive, 0.0);
        assert_eq!(settings.n_steps, 2000);
    }

    #[test]
    fn reports_line_and_field() {
        let file = write_config("omega_rabi = 1.0\nlambda = fast\n");
        let err = Settings::load(file.path()).unwrap_err();
        assert!(err.0.contains("line 2"), "{err}");
        assert!(err.0.contains("lambda"), "{err}");
    }

    #[test]
    fn rejects_unknown_keys() {
        let file = write_config("omega = 1.0\n");
        let err = Settings::load(file.path()).unwrap_err();
        assert!(err.0.contains("unknown key"), "{err}");
    }

    #[test]
    fn rejects_missing_equals() {
        let file = write_config("omega_rabi 1.0\n");
        let err = Settings::load(file.path()).unwrap_err();
        assert!(err.0.contains("line 1"), "{err}");
    }

    #[test]
    fn overrides_win_over_file() {
        let file = write_config("omega_rabi = 1.0\n");
        let mut settings = Settings::load(file.path()).unwrap();
        let mut overrides = HashMap::new();
        overrides.insert("omega_rabi".to_string(), "3.5".to_string());
        settings.apply_overrides(&overrides).unwrap();
        assert_eq!(settings.omega_rabi, 3.5);
    }

    #[test]
    fn invalid_initial_state_is_flagged() {
        let file = write_config("rho_gg = 0.9\nre_rho_ge = 0.5\n");
        let settings = Settings::load(file.path()).unwrap();
        assert!(settings.initial_state().is_err());
    }
}
