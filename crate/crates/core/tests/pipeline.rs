//! End-to-end checks through the public API: configs, estimators and CSV
//! output.

use rsobf::harness::{
    build_homogeneous_scenario, write_curve_csv, FadingModel, HomogeneousParams, SimulationConfig,
    CSV_HEADER,
};
use rsobf::scheduler::estimate_sum_rate;

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(f)
}

#[test]
fn estimates_do_not_depend_on_the_thread_count() {
    let params = HomogeneousParams::default()
        .users(32)
        .elements(3)
        .fading(FadingModel::Rician {
            kappa: 4.0,
            kappa_b: 2.0,
        });
    let scenario = build_homogeneous_scenario(&params).unwrap();
    let one = in_pool(1, || estimate_sum_rate(&scenario, 3000, 9).unwrap());
    let four = in_pool(4, || estimate_sum_rate(&scenario, 3000, 9).unwrap());
    assert_eq!(one, four);
}

#[test]
fn adding_users_never_lowers_the_rate_for_a_fixed_seed() {
    let mut previous = 0.0;
    for users in [1, 2, 3, 5, 8, 13, 21] {
        let params = HomogeneousParams::default().users(users).elements(2);
        let est =
            estimate_sum_rate(&build_homogeneous_scenario(&params).unwrap(), 2000, 4).unwrap();
        assert!(
            est.mean >= previous,
            "K = {users}: {} < {previous}",
            est.mean
        );
        previous = est.mean;
    }
}

#[test]
fn config_runs_to_a_csv_file() {
    let config = SimulationConfig::from_toml(
        "label = \"OFDMA, RS N=2\"\n[scenario]\nusers = 6\nelements = 2\nsubcarriers = 3\n",
    )
    .unwrap();
    let curve = config.run(1000, 2).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    write_curve_csv(&path, &curve).unwrap();

    let mut reader = csv::Reader::from_path(&path).unwrap();
    assert_eq!(reader.headers().unwrap(), CSV_HEADER.as_slice());
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 1);
    assert_eq!(&rows[0][0], "6.00000000");
    assert_eq!(&rows[0][3], "OFDMA, RS N=2");
    assert_eq!(&rows[0][4], "sim");
    let rate: f64 = rows[0][1].parse().unwrap();
    assert!((rate - curve.points[0].value).abs() <= 1e-8 * rate);
}

#[test]
fn shipped_configs_parse_and_build() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let config = SimulationConfig::load(&path).unwrap();
            config
                .build(1)
                .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            seen += 1;
        }
    }
    assert!(seen >= 4);
}
