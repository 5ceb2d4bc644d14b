use std::path::PathBuf;

use clap::Args;
use murmur_core::characters::Parity;
use murmur_core::real_family::{TruncationPolicy, Variant, WeightFunction};

use crate::error::{CliError, Result};
use crate::registry::{Experiment, Mode, WindowParam};

/// Environment variable consulted when `--threads` is absent.
pub const THREADS_ENV: &str = "MURMUR_THREADS";

/// Largest y grid accepted.
const MAX_ROWS: usize = 10_000_000;

/// Command-line overrides; anything left unset takes the experiment default.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// Lower end of the conductor (or discriminant) range.
    #[arg(long = "x")]
    pub x: Option<u64>,
    /// Geometric window ratio: conductors in [X, cX].
    #[arg(long, conflicts_with = "delta")]
    pub c: Option<f64>,
    /// Short window exponent: conductors or primes in [X, X + X^δ].
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub y_min: Option<f64>,
    #[arg(long)]
    pub y_max: Option<f64>,
    #[arg(long)]
    pub y_step: Option<f64>,
    /// + (even) or - (odd); use `--parity=-` for odd.
    #[arg(long, allow_hyphen_values = true)]
    pub parity: Option<String>,
    /// eight_d or dagger.
    #[arg(long)]
    pub variant: Option<String>,
    /// bump:a,b or indicator:a,b.
    #[arg(long, allow_hyphen_values = true)]
    pub weight: Option<String>,
    /// brute, closed, analytic or empirical.
    #[arg(long)]
    pub mode: Option<String>,
    /// Largest a in the primal density sum.
    #[arg(long)]
    pub a_max: Option<u64>,
    /// Largest n in the dual density sum.
    #[arg(long)]
    pub n_max: Option<u64>,
    /// Worker threads (default: the MURMUR_THREADS variable, else all cores).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YGrid {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl YGrid {
    pub fn new(min: f64, max: f64, step: f64) -> Result<Self> {
        if !(min.is_finite() && max.is_finite() && step.is_finite()) {
            return Err(CliError::Config("y grid bounds must be finite".into()));
        }
        if !(step > 0.0) {
            return Err(CliError::Config(format!("y step must be positive, got {step}")));
        }
        if min > max {
            return Err(CliError::Config(format!("y min {min} exceeds y max {max}")));
        }
        let g = Self { min, max, step };
        if g.len_unchecked() > MAX_ROWS as f64 {
            return Err(CliError::Config(format!(
                "y grid has more than {MAX_ROWS} points"
            )));
        }
        Ok(g)
    }

    fn len_unchecked(&self) -> f64 {
        ((self.max - self.min) / self.step * (1.0 + 1e-12)).floor() + 1.0
    }

    pub fn len(&self) -> usize {
        self.len_unchecked() as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// min + k·step, never accumulated.
    pub fn points(&self) -> Vec<f64> {
        (0..self.len())
            .map(|k| self.min + k as f64 * self.step)
            .collect()
    }
}

/// The quadratic-family part of a configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RealSetup {
    pub variant: Variant,
    pub weight: WeightFunction,
    pub policy: TruncationPolicy,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub x: u64,
    pub window: WindowParam,
    pub y_grid: Option<YGrid>,
    pub parity: Parity,
    pub real: Option<RealSetup>,
    pub mode: Mode,
    /// 0 means one thread per core.
    pub threads: usize,
    pub out: Option<PathBuf>,
}

fn parsed<T: std::str::FromStr<Err = murmur_core::Error>>(s: &str) -> Result<T> {
    s.parse::<T>().map_err(|e| CliError::Config(e.to_string()))
}

fn reject(name: &str, value: bool, e: Experiment, why: &str) -> Result<()> {
    if value {
        return Err(CliError::Config(format!("--{name} does not apply to {e}: {why}")));
    }
    Ok(())
}

/// Primal sums for sharp weights converge slowly in a, so their overlay uses a
/// shorter a-range than the default policy.
const SHARP_A_MAX: u64 = 101;

impl ExperimentConfig {
    /// Fills unset fields from the registry defaults and validates the result.
    pub fn resolve(experiment: Experiment, o: &Overrides) -> Result<Self> {
        let d = experiment.defaults();
        let x = o.x.unwrap_or(d.x);
        if x < 1 {
            return Err(CliError::Config("--x must be at least 1".into()));
        }

        let window = match d.window {
            WindowParam::C(c0) => {
                reject("delta", o.delta.is_some(), experiment, "it uses a geometric window")?;
                let c = o.c.unwrap_or(c0);
                if !(c.is_finite() && c > 1.0) {
                    return Err(CliError::Config(format!("--c must exceed 1, got {c}")));
                }
                WindowParam::C(c)
            }
            WindowParam::Delta(d0) => {
                reject("c", o.c.is_some(), experiment, "it uses a short window")?;
                let delta = o.delta.unwrap_or(d0);
                if !(delta > 0.0 && delta < 1.0) {
                    return Err(CliError::Config(format!(
                        "--delta must lie in (0, 1), got {delta}"
                    )));
                }
                WindowParam::Delta(delta)
            }
            WindowParam::Dyadic => {
                let why = "it uses the dyadic window [X, 2X)";
                reject("c", o.c.is_some(), experiment, why)?;
                reject("delta", o.delta.is_some(), experiment, why)?;
                WindowParam::Dyadic
            }
        };

        let y_grid = match d.y_grid {
            Some((lo, hi, step)) => Some(YGrid::new(
                o.y_min.unwrap_or(lo),
                o.y_max.unwrap_or(hi),
                o.y_step.unwrap_or(step),
            )?),
            None => {
                let any = o.y_min.is_some() || o.y_max.is_some() || o.y_step.is_some();
                reject("y-*", any, experiment, "it sweeps primes, not y")?;
                None
            }
        };

        let parity = match &o.parity {
            Some(s) => parsed::<Parity>(s)?,
            None => Parity::Even,
        };

        let mode = match &o.mode {
            Some(s) => s.parse::<Mode>()?,
            None => d.modes[0],
        };
        if !d.modes.contains(&mode) {
            let allowed: Vec<&str> = d.modes.iter().map(|m| m.name()).collect();
            return Err(CliError::Config(format!(
                "mode {mode} is not available for {experiment}; use {}",
                allowed.join(" or ")
            )));
        }

        let real = match d.variant {
            Some(v0) => {
                let variant = match &o.variant {
                    Some(s) => parsed::<Variant>(s)?,
                    None => v0,
                };
                let weight = match &o.weight {
                    Some(s) => parsed::<WeightFunction>(s)?,
                    None => default_weight(parity, d.sharp),
                };
                let mut policy = TruncationPolicy::default();
                if !weight.is_smooth() {
                    policy.a_max = SHARP_A_MAX;
                }
                if let Some(a) = o.a_max {
                    policy.a_max = a;
                }
                if let Some(n) = o.n_max {
                    policy.n_max = n;
                }
                policy.validate().map_err(|e| CliError::Config(e.to_string()))?;
                if let Some(g) = &y_grid {
                    if mode == Mode::Empirical && !(g.min * x as f64 > 2.0) {
                        return Err(CliError::Config(format!(
                            "the prime window needs y·X > 2; raise --y-min above {}",
                            2.0 / x as f64
                        )));
                    }
                    if !(g.min > 0.0) {
                        return Err(CliError::Config("the density needs y > 0".into()));
                    }
                }
                Some(RealSetup {
                    variant,
                    weight,
                    policy,
                })
            }
            None => {
                let why = "it has no quadratic-family weight";
                reject("variant", o.variant.is_some(), experiment, why)?;
                reject("weight", o.weight.is_some(), experiment, why)?;
                reject("a-max", o.a_max.is_some(), experiment, why)?;
                reject("n-max", o.n_max.is_some(), experiment, why)?;
                None
            }
        };

        let threads = match o.threads {
            Some(t) => t,
            None => match std::env::var(THREADS_ENV) {
                Ok(s) => s.trim().parse::<usize>().map_err(|_| {
                    CliError::Config(format!("{THREADS_ENV}={s:?} is not a thread count"))
                })?,
                Err(_) => 0,
            },
        };
        if o.threads == Some(0) {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }

        Ok(Self {
            experiment,
            x,
            window,
            y_grid,
            parity,
            real,
            mode,
            threads,
            out: o.out.clone(),
        })
    }

    /// Whether the CSV carries overlay columns.
    pub fn has_overlay(&self) -> bool {
        !matches!(self.window, WindowParam::Dyadic) && self.mode != Mode::Analytic
    }

    /// Every configuration field that affects the output, in a fixed order.
    pub fn metadata(&self) -> Vec<(String, String)> {
        let mut m: Vec<(String, String)> = Vec::new();
        let mut put = |k: &str, v: String| m.push((k.to_string(), v));
        put("experiment", self.experiment.name().into());
        put("figure", self.experiment.figure().into());
        put("x", self.x.to_string());
        match self.window {
            WindowParam::C(c) => put("c", c.to_string()),
            WindowParam::Delta(d) => put("delta", d.to_string()),
            WindowParam::Dyadic => put("window", "dyadic".into()),
        }
        match &self.y_grid {
            Some(g) => {
                put("y_min", g.min.to_string());
                put("y_max", g.max.to_string());
                put("y_step", g.step.to_string());
            }
            None => put("p_max", self.p_max().to_string()),
        }
        put("parity", self.parity.symbol().into());
        if let Some(r) = &self.real {
            put("variant", r.variant.name().into());
            put("weight", r.weight.to_string());
            put("a_max", r.policy.a_max.to_string());
            put("n_max", r.policy.n_max.to_string());
            put("quad_tol", r.policy.quad_tol.to_string());
            put("m_cutoff_tol", r.policy.m_cutoff_tol.to_string());
        }
        put("mode", self.mode.name().into());
        put("overlay", self.overlay_name().into());
        put("code_version", env!("CARGO_PKG_VERSION").into());
        m
    }

    /// Largest prime examined by the dyadic experiments.
    pub fn p_max(&self) -> u64 {
        match self.experiment {
            Experiment::Fig4 => 4 * self.x - 1,
            _ => 10 * self.x,
        }
    }

    fn overlay_name(&self) -> &'static str {
        if !self.has_overlay() {
            return "none";
        }
        match &self.real {
            Some(r) if r.weight.is_smooth() => "dual_density",
            Some(_) => "primal_density",
            None => "limit",
        }
    }
}

fn default_weight(parity: Parity, sharp: bool) -> WeightFunction {
    let (a, b) = match parity {
        Parity::Even => (1.0, 2.0),
        Parity::Odd => (-2.0, -1.0),
    };
    let w = if sharp {
        WeightFunction::indicator(a, b)
    } else {
        WeightFunction::bump(a, b)
    };
    w.expect("default weights have valid supports")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn resolve(e: Experiment, o: Overrides) -> Result<ExperimentConfig> {
        ExperimentConfig::resolve(e, &Overrides { threads: Some(1), ..o })
    }

    #[test]
    fn defaults_resolve() {
        for e in Experiment::ALL {
            let c = resolve(e, Overrides::default()).unwrap();
            assert_eq!(c.metadata()[0], ("experiment".into(), e.name().into()));
        }
        let c = resolve(Experiment::Fig1Top, Overrides::default()).unwrap();
        assert_eq!(c.y_grid.unwrap().len(), 501);
        let c = resolve(Experiment::Fig3Sharp, Overrides::default()).unwrap();
        assert_eq!(c.real.unwrap().policy.a_max, SHARP_A_MAX);
    }

    #[test]
    fn parity_picks_default_weight() {
        let o = Overrides {
            parity: Some("-".into()),
            ..Default::default()
        };
        let c = resolve(Experiment::Fig2, o).unwrap();
        assert_eq!(c.real.unwrap().weight, WeightFunction::bump(-2.0, -1.0).unwrap());
    }

    #[test]
    fn bad_configs_are_config_errors() {
        let cases = [
            (Experiment::Fig1Top, Overrides { y_step: Some(0.0), ..Default::default() }),
            (Experiment::Fig1Top, Overrides { y_min: Some(3.0), y_max: Some(1.0), ..Default::default() }),
            (Experiment::Fig1Top, Overrides { delta: Some(0.5), ..Default::default() }),
            (Experiment::Fig1Top, Overrides { c: Some(1.0), ..Default::default() }),
            (Experiment::Fig1Top, Overrides { weight: Some("bump:1,2".into()), ..Default::default() }),
            (Experiment::Fig1Top, Overrides { mode: Some("empirical".into()), ..Default::default() }),
            (Experiment::Fig2, Overrides { y_min: Some(0.0), ..Default::default() }),
            (Experiment::Fig2, Overrides { weight: Some("gauss:1,2".into()), ..Default::default() }),
            (Experiment::Fig2, Overrides { variant: Some("eight".into()), ..Default::default() }),
            (Experiment::Fig4, Overrides { y_max: Some(1.0), ..Default::default() }),
            (Experiment::Fig1Top, Overrides { parity: Some("*".into()), ..Default::default() }),
            (Experiment::Fig7, Overrides { delta: Some(1.0), ..Default::default() }),
        ];
        for (e, o) in cases {
            let err = resolve(e, o.clone()).unwrap_err();
            assert_eq!(err.exit_code(), 2, "{e} {o:?}: {err}");
        }
        let zero = ExperimentConfig::resolve(
            Experiment::Fig1Top,
            &Overrides { threads: Some(0), ..Default::default() },
        );
        assert!(zero.is_err());
    }

    #[test]
    fn grid_points_are_not_accumulated() {
        let g = YGrid::new(0.0, 10.0, 0.1).unwrap();
        let p = g.points();
        assert_eq!(p.len(), 101);
        assert_eq!(p[30], 30.0 * 0.1);
        assert_eq!(YGrid::new(1.0, 1.0, 0.5).unwrap().len(), 1);
    }

    #[test]
    fn overlay_schema() {
        let with = |e, mode: Option<&str>| {
            let o = Overrides { mode: mode.map(String::from), ..Default::default() };
            resolve(e, o).unwrap().has_overlay()
        };
        assert!(with(Experiment::Fig1Top, None));
        assert!(with(Experiment::Fig2, None));
        assert!(!with(Experiment::Fig2, Some("analytic")));
        assert!(!with(Experiment::Fig4, None));
        assert!(!with(Experiment::Fig5, None));
    }
}
