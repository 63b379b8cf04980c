use dnls_core::harness::{
    output, run_convergence, run_evolve, run_kernel_study, run_norms, ExperimentConfig, InitialDatum,
};

fn small(alpha: f64, lambda: f64) -> ExperimentConfig {
    let mut c = ExperimentConfig::standard(alpha, lambda);
    c.grid_sizes = vec![64, 128, 256, 512];
    c.dt_check = false;
    c
}

#[test]
fn envelope_grows_in_time_and_refinement_is_monotone() {
    let text = r#"
        dimension = 1
        alpha = 1.0
        lambda = 1.0
        box_length = 64.0
        grid_sizes = [128, 256, 512, 1024, 2048]
        dt = 1e-3
        horizon = 2.0
        snapshot_times = [0.5, 1.0, 1.5, 2.0]
        dt_check = false
        [initial_datum]
        kind = "gaussian"
        width = 1.0
    "#;
    let report = run_convergence(&ExperimentConfig::from_toml_str(text).unwrap()).unwrap();
    let env = report.envelope.unwrap();
    assert!(env.b >= 0.0, "B = {}", env.b);
    let k1 = report.times.iter().position(|&t| t == 1.0).unwrap();
    let k2 = report.times.iter().position(|&t| t == 2.0).unwrap();
    for level in &report.levels {
        assert!(level.errors[k2] > level.errors[k1], "M = {}", level.points_per_axis);
    }
    assert!(report.inversions.is_empty(), "{:?}", report.inversions);
    for w in report.levels.windows(2) {
        assert!(w[1].errors.iter().zip(&w[0].errors).all(|(f, c)| f < c));
    }
}

#[test]
fn zero_datum_is_flagged_degenerate() {
    let mut c = small(1.0, 1.0);
    c.initial_datum = InitialDatum::Zero;
    let report = run_convergence(&c).unwrap();
    assert!(report.degenerate);
    assert!(report.levels.iter().all(|l| l.errors.iter().all(|&e| e == 0.0)));
    assert!(report.fits.iter().all(|f| f.rate.is_none()));
    assert!(report.envelope.is_none());
}

#[test]
fn reports_are_deterministic_across_worker_counts() {
    let mut a = small(0.75, 1.0);
    a.workers = 1;
    let mut b = a.clone();
    b.workers = 3;
    b.output_dir = "elsewhere".into();
    assert_eq!(a.hash(), b.hash());
    let ra = serde_json::to_string(&run_convergence(&a).unwrap()).unwrap();
    let rb = serde_json::to_string(&run_convergence(&b).unwrap()).unwrap();
    assert_eq!(ra, rb);
}

#[test]
fn dt_refinement_check_bounds_splitting_error() {
    let mut c = small(1.0, 1.0);
    c.dt_check = true;
    let check = run_convergence(&c).unwrap().dt_check.unwrap();
    assert!(check.passed, "ratio {}", check.ratio);
}

#[test]
fn artifacts_are_written_with_expected_columns() {
    let dir = tempfile::tempdir().unwrap();
    let c = small(1.0, 1.0);
    let report = run_convergence(&c).unwrap();
    output::write_convergence(&report, dir.path()).unwrap();
    let errors = std::fs::read_to_string(dir.path().join("errors.csv")).unwrap();
    assert!(errors.starts_with("h,t,l2_error\n"));
    assert_eq!(errors.lines().count(), 1 + 4 * 2);
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(json["config_hash"], c.hash());

    let mut e = small(0.75, 1.0);
    e.conservation_samples = 8;
    e.write_snapshots = true;
    let evolved = run_evolve(&e).unwrap();
    output::write_evolve(&evolved, dir.path(), &e.short_hash()).unwrap();
    let cons = std::fs::read_to_string(dir.path().join("conservation.csv")).unwrap();
    assert!(cons.starts_with("t,mass,energy,linf_norm,h_alpha_norm\n"));
    assert_eq!(cons.lines().count(), 1 + 9);
    assert!(evolved.runs.iter().all(|r| r.max_mass_drift <= 1e-11));
    assert!(dir.path().join(format!("snapshot_{}_M512_0008.bin", e.short_hash())).exists());
}

#[test]
fn kernel_and_norm_studies() {
    let mut c = small(1.0, 0.0);
    c.kernel_alphas = vec![];
    let empty = run_kernel_study(&c).unwrap();
    assert!(empty.fits.is_empty() && empty.samples.is_empty());

    c.kernel_alphas = vec![0.3];
    c.kernel_points = 256;
    c.kernel_samples = 8;
    let report = run_kernel_study(&c).unwrap();
    assert_eq!(report.fits.len(), 1);
    assert_eq!(report.samples.len(), 8);
    assert!(!report.fits[0].resonant_band);

    c.kernel_alphas = vec![0.5];
    assert!(matches!(run_kernel_study(&c), Err(dnls_core::Error::Config(_))));

    let norms = run_norms(&small(0.75, 0.0)).unwrap();
    assert_eq!(norms.rows.len(), 4);
    assert!(norms.rows.iter().all(|r| r.difference_ratio.is_some()));
}
