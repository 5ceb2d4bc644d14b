//! Emitted bytes must not depend on the number of worker threads.

use murmur_lab::{run_experiment, to_csv_string, Experiment, ExperimentConfig, Overrides};

fn reduced(e: Experiment) -> Overrides {
    let mut o = Overrides::default();
    match e {
        Experiment::Fig1Top | Experiment::Fig6 => {
            o.x = Some(128);
            o.y_step = Some(0.1);
        }
        Experiment::Fig1Bottom | Experiment::Fig7 => o.y_step = Some(0.01),
        Experiment::Fig2 | Experiment::Fig3Sharp | Experiment::Fig8 => {
            o.x = Some(1 << 12);
            o.y_max = Some(1.5);
            o.y_step = Some(0.1);
        }
        Experiment::Fig4 => o.x = Some(256),
        Experiment::Fig5 => o.x = Some(64),
    }
    o
}

fn csv_with_threads(e: Experiment, threads: usize) -> String {
    let o = Overrides {
        threads: Some(threads),
        ..reduced(e)
    };
    let cfg = ExperimentConfig::resolve(e, &o).unwrap();
    to_csv_string(&run_experiment(&cfg).unwrap())
}

#[test]
fn one_and_eight_threads_give_identical_bytes() {
    for e in Experiment::ALL {
        let one = csv_with_threads(e, 1);
        let eight = csv_with_threads(e, 8);
        assert!(one.lines().count() > 10, "{e}");
        assert_eq!(one, eight, "{e}");
    }
}

#[test]
fn odd_parity_is_also_deterministic() {
    for e in [Experiment::Fig1Top, Experiment::Fig2, Experiment::Fig5] {
        let run = |t| {
            let o = Overrides {
                threads: Some(t),
                parity: Some("-".into()),
                ..reduced(e)
            };
            let cfg = ExperimentConfig::resolve(e, &o).unwrap();
            to_csv_string(&run_experiment(&cfg).unwrap())
        };
        assert_eq!(run(1), run(8), "{e}");
    }
}
