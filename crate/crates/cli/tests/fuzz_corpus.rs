//! Replays the checked-in fuzz corpus through every parser entry point.

use std::fs;
use std::path::Path;

use spin_ibr::metrology::ProbDist;
use spin_ibr::noise::parse_nqcrb_csv;
use spin_ibr::optimizer::{parse_cert_csv, parse_trace_csv};
use spin_ibr::prep::PrepScheme;
use spin_ibr::readout::parse_sweep_csv;
use spin_ibr_cli::config::RunConfig;
use spin_ibr_cli::grid::parse_grid;

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<(String, String)> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let path = e.unwrap().path();
            (path.file_name().unwrap().to_string_lossy().into_owned(), fs::read_to_string(&path).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "{target} has no seeds");
    out
}

fn outcomes(target: &str, parse: impl Fn(&str) -> bool) -> Vec<(String, bool)> {
    seeds(target).into_iter().map(|(name, text)| (name.clone(), parse(&text))).collect()
}

fn expect(target: &str, parse: impl Fn(&str) -> bool, rejected: &[&str]) {
    for (name, ok) in outcomes(target, parse) {
        assert_eq!(ok, !rejected.contains(&name.as_str()), "{target}/{name}");
    }
}

#[test]
fn corpus_seeds_parse_as_expected() {
    expect("scheme_json", |t| PrepScheme::from_json(t).is_ok(), &["negative"]);
    expect("run_config_json", |t| RunConfig::from_json(t).and_then(|c| c.resolve()).is_ok(), &["bad_stride"]);
    expect("grid_spec", |t| parse_grid(t).is_ok(), &["bad_log"]);
    expect("dist_csv", |t| ProbDist::from_csv(t).is_ok(), &["bad_norm"]);
    expect("sweep_csv", |t| parse_sweep_csv(t).is_ok(), &[]);
    expect("nqcrb_csv", |t| parse_nqcrb_csv(t).is_ok(), &["short_row"]);
    expect("trace_csv", |t| parse_trace_csv(t).is_ok(), &[]);
    expect("cert_csv", |t| parse_cert_csv(t).is_ok(), &["edge"]);
}
