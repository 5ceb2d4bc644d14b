use num_complex::Complex64;
use rayon::prelude::*;

use murmur_core::complex_family::{
    dyadic_raw_sum, limit_p, limit_p_short, limit_t, CompositeConductorSum, ComputeMode,
    DyadicFamily, LimitWindow, Normalization, PrimeConductorSum, WindowSpec,
};
use murmur_core::real_family::{AnalyticDensity, SquarefreeWeights};

use crate::config::{ExperimentConfig, RealSetup};
use crate::error::{CliError, Result};
use crate::output::{ExperimentResult, Row};
use crate::registry::{Experiment, Mode, WindowParam};

/// Runs `f` on a pool with the configured thread count.
pub fn with_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start {threads} threads: {e}")))?;
    Ok(pool.install(f))
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    let rows = with_pool(cfg.threads, || compute_rows(cfg))??;
    let result = ExperimentResult {
        metadata: cfg.metadata(),
        has_overlay: cfg.has_overlay(),
        rows,
    };
    check_finite(&result)?;
    Ok(result)
}

fn check_finite(r: &ExperimentResult) -> Result<()> {
    for row in &r.rows {
        let mut parts = vec![("value", row.value)];
        parts.extend(row.overlay.map(|o| ("overlay", o)));
        for (what, v) in parts {
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(CliError::NonFinite {
                    at: format!("x={}", row.x),
                    what,
                    value: v.to_string(),
                });
            }
        }
    }
    Ok(())
}

fn compute_mode(mode: Mode) -> ComputeMode {
    match mode {
        Mode::Brute => ComputeMode::Brute,
        _ => ComputeMode::Closed,
    }
}

fn window_spec(cfg: &ExperimentConfig) -> Result<(WindowSpec, LimitWindow)> {
    Ok(match cfg.window {
        WindowParam::C(c) => (WindowSpec::geometric(cfg.x, c)?, LimitWindow::Geometric(c)),
        WindowParam::Delta(d) => (WindowSpec::short(cfg.x, d)?, LimitWindow::Short),
        WindowParam::Dyadic => unreachable!("dyadic experiments have no y window"),
    })
}

/// Evaluates (value, overlay) at every y in parallel, keeping grid order.
fn sweep<F>(cfg: &ExperimentConfig, f: F) -> Result<Vec<Row>>
where
    F: Fn(f64) -> Result<(Complex64, Option<Complex64>)> + Sync,
{
    let grid = cfg.y_grid.expect("y experiments carry a grid");
    grid.points()
        .into_par_iter()
        .map(|y| {
            let (value, overlay) = f(y)?;
            Ok(Row { x: y, value, overlay })
        })
        .collect()
}

fn compute_rows(cfg: &ExperimentConfig) -> Result<Vec<Row>> {
    match cfg.experiment {
        Experiment::Fig1Top | Experiment::Fig1Bottom => prime_conductor_rows(cfg),
        Experiment::Fig6 | Experiment::Fig7 => composite_rows(cfg),
        Experiment::Fig2 | Experiment::Fig3Sharp | Experiment::Fig8 => quadratic_rows(cfg),
        Experiment::Fig4 => dyadic_rows(cfg, DyadicFamily::Quadratic, Normalization::None),
        Experiment::Fig5 => dyadic_rows(cfg, DyadicFamily::Primitive, Normalization::InverseX),
    }
}

fn prime_conductor_rows(cfg: &ExperimentConfig) -> Result<Vec<Row>> {
    let (spec, lw) = window_spec(cfg)?;
    let parity = cfg.parity;
    let limit = move |y| match lw {
        LimitWindow::Geometric(c) => limit_p(y, c, parity),
        LimitWindow::Short => limit_p_short(y, parity),
    };
    if cfg.mode == Mode::Analytic {
        return sweep(cfg, |y| Ok((limit(y), None)));
    }
    let sum = PrimeConductorSum::new(spec, parity, compute_mode(cfg.mode))?;
    sweep(cfg, |y| Ok((sum.eval(y)?, Some(limit(y)))))
}

fn composite_rows(cfg: &ExperimentConfig) -> Result<Vec<Row>> {
    let (spec, lw) = window_spec(cfg)?;
    let parity = cfg.parity;
    if cfg.mode == Mode::Analytic {
        return sweep(cfg, |y| Ok((limit_t(y, lw, parity), None)));
    }
    let sum = CompositeConductorSum::new(spec, parity, compute_mode(cfg.mode))?;
    sweep(cfg, |y| Ok((sum.eval(y)?.t, Some(limit_t(y, lw, parity)))))
}

fn quadratic_rows(cfg: &ExperimentConfig) -> Result<Vec<Row>> {
    let RealSetup {
        variant,
        weight,
        policy,
    } = cfg.real.as_ref().expect("quadratic experiments carry a weight");
    let delta = match cfg.window {
        WindowParam::Delta(d) => d,
        _ => unreachable!("quadratic experiments use a short prime window"),
    };
    let density = AnalyticDensity::new(weight, policy)?;
    let analytic = |y: f64| -> Result<Complex64> {
        let v = if weight.is_smooth() {
            density.dual(y, *variant)?.value
        } else {
            density.primal(y, *variant)?.value
        };
        Ok(Complex64::new(v, 0.0))
    };
    if cfg.mode == Mode::Analytic {
        return sweep(cfg, |y| Ok((analytic(y)?, None)));
    }
    let weights = SquarefreeWeights::new(cfg.x, weight)?;
    sweep(cfg, |y| {
        let m = weights.murmuration(y, delta, *variant)?;
        Ok((Complex64::new(m, 0.0), Some(analytic(y)?)))
    })
}

fn dyadic_rows(
    cfg: &ExperimentConfig,
    family: DyadicFamily,
    norm: Normalization,
) -> Result<Vec<Row>> {
    let values = dyadic_raw_sum(cfg.x, cfg.parity, family, cfg.p_max(), norm)?;
    Ok(values
        .into_iter()
        .map(|(p, v)| Row {
            x: p as f64,
            value: v,
            overlay: None,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Overrides;

    fn small(e: Experiment, extra: Overrides) -> ExperimentConfig {
        ExperimentConfig::resolve(e, &Overrides { threads: Some(2), ..extra }).unwrap()
    }

    #[test]
    fn fig1_top_defaults_have_501_rows() {
        let r = run_experiment(&small(Experiment::Fig1Top, Overrides::default())).unwrap();
        assert_eq!(r.rows.len(), 501);
        assert!(r.has_overlay);
        assert_eq!(r.meta("experiment"), Some("fig1_top"));
        // At y = 0 the limit is the window length c − 1.
        assert!((r.rows[0].overlay.unwrap().re - 1.0).abs() < 1e-9);
    }

    #[test]
    fn brute_and_closed_agree_on_a_small_window() {
        let o = |mode: &str| Overrides {
            x: Some(64),
            y_max: Some(2.0),
            y_step: Some(0.25),
            mode: Some(mode.into()),
            ..Default::default()
        };
        for e in [Experiment::Fig1Top, Experiment::Fig6] {
            let a = run_experiment(&small(e, o("brute"))).unwrap();
            let b = run_experiment(&small(e, o("closed"))).unwrap();
            for (ra, rb) in a.rows.iter().zip(&b.rows) {
                assert!((ra.value - rb.value).norm() < 1e-9, "{e} y={}", ra.x);
            }
        }
    }

    #[test]
    fn analytic_mode_has_no_overlay() {
        let o = Overrides {
            mode: Some("analytic".into()),
            y_max: Some(1.0),
            ..Default::default()
        };
        let r = run_experiment(&small(Experiment::Fig2, o)).unwrap();
        assert!(!r.has_overlay && r.rows.iter().all(|row| row.overlay.is_none()));
        assert_eq!(r.rows.len(), 50);
    }

    #[test]
    fn dyadic_rows_are_primes() {
        let o = Overrides {
            x: Some(32),
            ..Default::default()
        };
        let r = run_experiment(&small(Experiment::Fig5, o)).unwrap();
        assert_eq!(r.rows.first().unwrap().x, 2.0);
        assert_eq!(r.rows.last().unwrap().x, 317.0);
        assert_eq!(r.meta("p_max"), Some("320"));
    }

    #[test]
    fn non_finite_rows_are_reported() {
        let r = ExperimentResult {
            metadata: vec![],
            has_overlay: true,
            rows: vec![Row {
                x: 0.5,
                value: Complex64::new(1.0, 0.0),
                overlay: Some(Complex64::new(f64::NAN, 0.0)),
            }],
        };
        let err = check_finite(&r).unwrap_err();
        assert_eq!(err.exit_code(), 1);
        assert!(err.to_string().contains("overlay at x=0.5"));
    }
}
