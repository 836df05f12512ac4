use kaczmarz::problems::gaussian_system;
use kaczmarz::randsrc::RngStream;
use kaczmarz_bench::config::{Aggregation, ExperimentConfig, ProblemSpec, SolverKind, SolverSpec, StartPoint};
use kaczmarz_bench::emit::{csv_string, emit_json, read_json, CSV_HEADER};
use kaczmarz_bench::experiment::{run_experiment, run_experiment_in_order, Environment, ExperimentResult, SCHEMA_VERSION};
use kaczmarz_bench::instance::InstanceFile;

fn small_config() -> ExperimentConfig {
    let mut c = ExperimentConfig::new(
        "small",
        ProblemSpec::Gaussian { m: 40, n: 10 },
        vec![
            SolverSpec::new(SolverKind::Weighted),
            SolverSpec::new(SolverKind::Cyclic),
            SolverSpec::with_budget(SolverKind::Cgls { submatrix: Some(25) }, 200),
        ],
    );
    c.trials = 6;
    c.seed = 42;
    c.epsilon = 1e-8;
    c
}

#[test]
fn checkpoint_zero_holds_mean_initial_error() {
    let result = run_experiment(&small_config()).unwrap();
    let initial: Vec<f64> = result.trials.iter().map(|t| t.initial_error_sq.unwrap()).collect();
    let want = initial.iter().sum::<f64>() / initial.len() as f64;
    for series in &result.solvers {
        let first = &series.checkpoints[0];
        assert_eq!((first.flops, first.checkpoint_k), (0, 0));
        assert!((first.mean_sq_error - want).abs() <= 1e-12 * want, "{}", series.solver);
        assert_eq!(first.aggregate, first.mean_sq_error);
        assert_eq!(first.trials_contributing, 6);
    }
}

#[test]
fn solvers_share_the_flop_axis() {
    let result = run_experiment(&small_config()).unwrap();
    let axes: Vec<Vec<u64>> = result.solvers.iter().map(|s| s.checkpoints.iter().map(|c| c.flops).collect()).collect();
    assert!(axes.windows(2).all(|w| w[0] == w[1]));
    assert!(axes[0].windows(2).all(|w| w[0] < w[1]));
    for s in &result.solvers {
        assert!(s.checkpoints.windows(2).all(|w| w[0].checkpoint_k <= w[1].checkpoint_k));
        assert!(s.checkpoints.windows(2).all(|w| w[0].trials_active >= w[1].trials_active));
        assert_eq!(s.summary.trials_reached, 6, "{}", s.solver);
        // Error is held after termination: the last row matches the final errors.
        let finals: Vec<f64> = result.trials.iter().map(|t| t.solvers.iter().find(|x| x.solver == s.solver).unwrap().final_error).collect();
        let last = s.checkpoints.last().unwrap();
        assert!((last.mean_error - finals.iter().sum::<f64>() / 6.0).abs() < 1e-15);
        assert_eq!(last.trials_active, 0);
    }
}

#[test]
fn trial_order_does_not_matter() {
    let config = small_config();
    let parallel = run_experiment(&config).unwrap();
    let reversed = run_experiment_in_order(&config, &[5, 4, 3, 2, 1, 0]).unwrap();
    let shuffled = run_experiment_in_order(&config, &[2, 0, 5, 1, 4, 3]).unwrap();
    assert_eq!(parallel, reversed);
    assert_eq!(csv_string(&parallel), csv_string(&shuffled));
    assert!(run_experiment_in_order(&config, &[0, 1, 2]).is_err());
}

#[test]
fn seeds_change_results() {
    let a = run_experiment(&small_config()).unwrap();
    let mut other = small_config();
    other.seed = 43;
    assert_ne!(csv_string(&a), csv_string(&run_experiment(&other).unwrap()));
}

#[test]
fn json_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = small_config();
    config.aggregation = Aggregation::MedianError;
    let result = run_experiment(&config).unwrap();
    assert_eq!(result.schema_version, SCHEMA_VERSION);
    let path = dir.path().join("r.json");
    emit_json(&result, &path).unwrap();
    assert_eq!(read_json(&path).unwrap(), result);
    let c = &result.solvers[0].checkpoints[3];
    assert_eq!(c.aggregate, c.median_error);
}

#[test]
fn empty_result_gives_header_only_csv() {
    let result = ExperimentResult {
        schema_version: SCHEMA_VERSION,
        environment: Environment {
            name: "empty".into(),
            family: "gaussian".into(),
            m: 0,
            n: 0,
            trials: 0,
            seed: 0,
            epsilon: 1e-10,
            aggregation: Aggregation::MeanSqError,
            resample: true,
            start: StartPoint::Zero,
            error_metric: "error".into(),
            representative_k: None,
            representative_kappa: None,
            failures: 0,
            version: "0".into(),
        },
        solvers: vec![],
        trials: vec![],
    };
    assert_eq!(csv_string(&result), format!("{CSV_HEADER}\n"));
}

#[test]
fn csv_numbers_round_trip() {
    let result = run_experiment(&small_config()).unwrap();
    let csv = csv_string(&result);
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    let total: usize = result.solvers.iter().map(|s| s.checkpoints.len()).sum();
    assert_eq!(rows.len(), total);
    let first = &result.solvers[0].checkpoints[5];
    let fields: Vec<&str> = rows[5].split(',').collect();
    assert_eq!(fields[0], "weighted");
    assert_eq!(fields[3].parse::<f64>().unwrap(), first.mean_error);
    assert_eq!(fields[4].parse::<f64>().unwrap(), first.median_error);
}

#[test]
fn tightness_family_from_e1() {
    let mut c = ExperimentConfig::new(
        "tight",
        ProblemSpec::Tightness { n: 2, m: 4, kappa: 2.0 },
        vec![SolverSpec::with_budget(SolverKind::Weighted, 50)],
    );
    c.start = StartPoint::E1;
    c.trials = 20;
    c.epsilon = 1e-12;
    let r = run_experiment(&c).unwrap();
    assert_eq!(r.environment.representative_kappa.map(|k| (k - 2.0).abs() < 1e-12), Some(true));
    // One projection onto e_1 solves the system; the others leave x unchanged.
    for t in &r.trials {
        assert!(t.solvers[0].reached);
        assert_eq!(t.initial_error_sq, Some(1.0));
    }
}

#[test]
fn file_family_with_unknown_solution_uses_residual() {
    let dir = tempfile::tempdir().unwrap();
    let sys = gaussian_system(30, 8, &mut RngStream::new(3)).unwrap();
    let mut file = InstanceFile::from_system(&sys);
    file.x = None;
    file.write(&dir.path().join("inst.txt")).unwrap();
    let text = "name = f\nproblem = file\npath = inst.txt\ntrials = 3\nepsilon = 1e-9\nsolver = weighted\nsolver = cgls\n";
    std::fs::write(dir.path().join("f.cfg"), text).unwrap();
    let config = ExperimentConfig::from_file(&dir.path().join("f.cfg")).unwrap();
    let r = run_experiment(&config).unwrap();
    assert_eq!(r.environment.error_metric, "residual");
    assert_eq!((r.environment.m, r.environment.n), (30, 8));
    let b_norm = kaczmarz::matcore::norm(&sys.b);
    for s in &r.solvers {
        assert_eq!(s.summary.trials_reached, 3);
        assert!(s.checkpoints.last().unwrap().mean_error <= 1e-9 * b_norm);
    }
}

#[test]
fn adversarial_start_has_unit_error() {
    let mut c = small_config();
    c.start = StartPoint::Adversarial;
    c.trials = 2;
    let r = run_experiment(&c).unwrap();
    for t in &r.trials {
        assert!((t.initial_error_sq.unwrap() - 1.0).abs() < 1e-12);
    }
}
