use std::fmt;
use std::str::FromStr;

use murmur_core::real_family::Variant;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Experiment {
    Fig1Top,
    Fig1Bottom,
    Fig2,
    Fig3Sharp,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
}

/// How an experiment's X-window is shaped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WindowParam {
    /// Geometric window [X, cX].
    C(f64),
    /// Short window [X, X + X^δ].
    Delta(f64),
    /// Dyadic window [X, 2X) swept over primes rather than y.
    Dyadic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Brute,
    Closed,
    Analytic,
    Empirical,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Brute => "brute",
            Mode::Closed => "closed",
            Mode::Analytic => "analytic",
            Mode::Empirical => "empirical",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "brute" => Ok(Mode::Brute),
            "closed" => Ok(Mode::Closed),
            "analytic" => Ok(Mode::Analytic),
            "empirical" => Ok(Mode::Empirical),
            _ => Err(CliError::Config(format!(
                "unknown mode {s:?}; expected brute, closed, analytic or empirical"
            ))),
        }
    }
}

/// Default parameters of one registry entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Defaults {
    pub x: u64,
    pub window: WindowParam,
    /// (min, max, step), absent for prime sweeps.
    pub y_grid: Option<(f64, f64, f64)>,
    /// The first entry is the default.
    pub modes: &'static [Mode],
    /// Set for the quadratic-family experiments.
    pub variant: Option<Variant>,
    pub sharp: bool,
}

const COMPLEX_MODES: &[Mode] = &[Mode::Closed, Mode::Brute, Mode::Analytic];
const REAL_MODES: &[Mode] = &[Mode::Empirical, Mode::Analytic];
const DYADIC_MODES: &[Mode] = &[Mode::Closed];

impl Experiment {
    pub const ALL: [Experiment; 9] = [
        Experiment::Fig1Top,
        Experiment::Fig1Bottom,
        Experiment::Fig2,
        Experiment::Fig3Sharp,
        Experiment::Fig4,
        Experiment::Fig5,
        Experiment::Fig6,
        Experiment::Fig7,
        Experiment::Fig8,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Fig1Top => "fig1_top",
            Experiment::Fig1Bottom => "fig1_bottom",
            Experiment::Fig2 => "fig2",
            Experiment::Fig3Sharp => "fig3_sharp",
            Experiment::Fig4 => "fig4",
            Experiment::Fig5 => "fig5",
            Experiment::Fig6 => "fig6",
            Experiment::Fig7 => "fig7",
            Experiment::Fig8 => "fig8",
        }
    }

    pub fn figure(self) -> &'static str {
        match self {
            Experiment::Fig1Top => "Figure 1 (top)",
            Experiment::Fig1Bottom => "Figure 1 (bottom)",
            Experiment::Fig2 => "Figure 2",
            Experiment::Fig3Sharp => "Figure 3",
            Experiment::Fig4 => "Figure 4",
            Experiment::Fig5 => "Figure 5",
            Experiment::Fig6 => "Figure 6",
            Experiment::Fig7 => "Figure 7",
            Experiment::Fig8 => "Figure 8",
        }
    }

    pub fn about(self) -> &'static str {
        match self {
            Experiment::Fig1Top => {
                "P±(y, X, c) over prime conductors in [X, cX], with the limit curve"
            }
            Experiment::Fig1Bottom => {
                "P̃±(y, X, δ) over prime conductors in [X, X + X^δ], with the limit curve"
            }
            Experiment::Fig2 => "M_Φ(y, X, δ) for bump weights, with the analytic density",
            Experiment::Fig3Sharp => {
                "M_Φ(y, X, δ) for indicator weights, with the analytic density"
            }
            Experiment::Fig4 => "raw sum of χ(p)/τ(χ) over real primitive χ with conductor in [X, 2X)",
            Experiment::Fig5 => "(1/X) Σ χ(p)/τ(χ) over primitive χ with conductor in [X, 2X)",
            Experiment::Fig6 => "T±(y, X, c) over conductors N ≢ 2 (mod 4), with (5/π²) times the limit",
            Experiment::Fig7 => "T̃±(y, X, δ) over conductors N ≢ 2 (mod 4), with (5/π²) times the limit",
            Experiment::Fig8 => "M†_Φ(y, X, δ) for bump weights, with the analytic density",
        }
    }

    pub fn defaults(self) -> Defaults {
        let complex = |x, window, y_max: f64, step| Defaults {
            x,
            window,
            y_grid: Some((0.0, y_max, step)),
            modes: COMPLEX_MODES,
            variant: None,
            sharp: false,
        };
        // yX > 2 is needed for the prime window, so these sweeps start one step above 0.
        let real = |variant, sharp| Defaults {
            x: 1 << 19,
            window: WindowParam::Delta(2.0 / 3.0),
            y_grid: Some((0.02, 2.0, 0.02)),
            modes: REAL_MODES,
            variant: Some(variant),
            sharp,
        };
        let dyadic = |x| Defaults {
            x,
            window: WindowParam::Dyadic,
            y_grid: None,
            modes: DYADIC_MODES,
            variant: None,
            sharp: false,
        };
        match self {
            Experiment::Fig1Top => complex(1 << 10, WindowParam::C(2.0), 10.0, 0.02),
            Experiment::Fig1Bottom => complex(2002, WindowParam::Delta(0.51), 2.0, 0.004),
            Experiment::Fig6 => complex(1024, WindowParam::C(2.0), 10.0, 0.02),
            Experiment::Fig7 => complex(2002, WindowParam::Delta(0.51), 2.0, 0.004),
            Experiment::Fig2 => real(Variant::EightD, false),
            Experiment::Fig3Sharp => real(Variant::EightD, true),
            Experiment::Fig8 => real(Variant::Dagger, false),
            Experiment::Fig4 => dyadic(1 << 17),
            Experiment::Fig5 => dyadic(1 << 10),
        }
    }

    /// `name  figure: description`, one line per experiment plus the validation suite.
    pub fn listing() -> String {
        let mut s = String::new();
        for e in Self::ALL {
            s.push_str(&format!("{:<13}{}: {}\n", e.name(), e.figure(), e.about()));
        }
        s.push_str(&format!(
            "{:<13}acceptance checks 1-15 (same as `validate`)\n",
            "validate_all"
        ));
        s
    }

    pub fn known_names() -> String {
        let mut names: Vec<&str> = Self::ALL.iter().map(|e| e.name()).collect();
        names.push("validate_all");
        names.join(", ")
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Self::ALL.into_iter().find(|e| e.name() == s).ok_or_else(|| {
            CliError::Config(format!(
                "unknown experiment {s:?}; known experiments: {}",
                Self::known_names()
            ))
        })
    }
}
