use halfmap_lab::{run_suite, ExperimentConfig, Suite};

fn run(suite: Suite, text: &str) -> halfmap_lab::SuiteResult {
    let cfg = ExperimentConfig::parse(suite, text).unwrap();
    run_suite(&cfg).unwrap()
}

fn assert_passes(r: &halfmap_lab::SuiteResult) {
    for v in &r.verdicts {
        assert!(v.passed, "{:?}: {} ({})", r.suite, v.name, v.detail);
    }
}

#[test]
fn small_identities() {
    let r = run(Suite::Identities, "n = 128\ntrials = 4\n");
    assert_passes(&r);
    assert_eq!(r.table("errors").unwrap().rows.len(), 4);
}

#[test]
fn verdicts_recheck_from_csv() {
    let r = run(Suite::Identities, "n = 64\ntrials = 3\n");
    let t = r.table("errors").unwrap();
    let bytes = halfmap_lab::output::csv_bytes(t);
    let mut reader = csv::Reader::from_reader(bytes.as_slice());
    let headers = reader.headers().unwrap().clone();
    let col = headers.iter().position(|h| h == "plancherel").unwrap();
    let worst = reader
        .records()
        .map(|rec| rec.unwrap()[col].parse::<f64>().unwrap())
        .fold(0.0f64, f64::max);
    assert_eq!(worst, t.max("plancherel"));
}

#[test]
fn small_commutators() {
    let r = run(
        Suite::Commutators,
        "n = 128\nrefine = 2\ntrials = 4\nunit_maps = 3\nceiling = 12\n",
    );
    assert_passes(&r);
    assert_eq!(r.table("sweep").unwrap().rows.len(), 8);
}

#[test]
fn small_localization() {
    let r = run(Suite::Localization, "n = 512\ntrials = 4\n");
    assert_passes(&r);
}

#[test]
fn cancellation_defaults() {
    let r = run(Suite::Cancellation, "");
    assert_passes(&r);
    let lone = r.table("ladder").unwrap().floats("r_lone");
    assert!(lone.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn seq_defaults() {
    let r = run(Suite::Seq, "trials = 10\n");
    assert_passes(&r);
}

#[test]
fn morrey_on_a_coarse_grid() {
    let r = run(Suite::Morrey, "n = 256\ncenters = 0\n");
    assert_passes(&r);
    assert_eq!(r.table("fits").unwrap().rows.len(), 2);
}

#[test]
fn shipped_configs_parse() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        let name = text
            .lines()
            .find_map(|l| l.trim().strip_prefix("suite"))
            .and_then(|rest| rest.trim().strip_prefix('='))
            .map(str::trim)
            .unwrap_or_else(|| panic!("{} names no suite", path.display()));
        let suite = Suite::parse(name).unwrap();
        ExperimentConfig::parse(suite, &text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        seen += 1;
    }
    assert!(seen >= 3);
}
