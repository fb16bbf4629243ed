//! Executes a resolved configuration: writes the CSV data files and the JSON
//! sidecar `<command>.json` into the output directory.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use spin_ibr::csv::{write_rows, write_table, fmt_num};
use spin_ibr::metrology::ProbDist;
use spin_ibr::noise::{nqcrb_curve, nqcrb_numeric, write_nqcrb_csv};
use spin_ibr::optimizer::{certify_bound, hill_climb, start_pair, start_uniform, write_cert_csv, write_trace_csv};
use spin_ibr::prep::prepare_state;
use spin_ibr::readout::{cfi_sweep, snapshot, write_sweep_csv, Experiment, ReadoutKind};
use spin_ibr::spin::{husimi_q, SpinOps};

use crate::config::{Params, Resolved};
use crate::CliError;

/// Header of a prob-snapshot panel file.
pub const SNAPSHOT_HEADER: [&str; 3] = ["m", "p_phi", "p_phi_dphi"];
/// Header of the state-report population file.
pub const POPULATION_HEADER: [&str; 2] = ["m", "p"];

/// What a run wrote, echoed into the sidecar.
#[derive(Debug, Clone, Serialize)]
pub struct Sidecar {
    pub library: &'static str,
    pub version: &'static str,
    pub config: Resolved,
    pub files: Vec<String>,
    pub results: Value,
}

struct Outputs<'a> {
    dir: &'a Path,
    files: Vec<String>,
}

impl Outputs<'_> {
    fn write(&mut self, name: &str, f: impl FnOnce(&mut BufWriter<File>) -> spin_ibr::Result<()>) -> Result<(), CliError> {
        let path = self.dir.join(name);
        let mut w = BufWriter::new(File::create(&path)?);
        f(&mut w)?;
        w.flush()?;
        self.files.push(name.to_string());
        Ok(())
    }
}

/// Runs `cfg` and returns the sidecar it wrote.
pub fn run(cfg: &Resolved) -> Result<Sidecar, CliError> {
    fs::create_dir_all(&cfg.out)?;
    let mut out = Outputs {
        dir: &cfg.out,
        files: Vec::new(),
    };
    let results = match &cfg.params {
        Params::NqcrbCurve { n_values, sigma_over_n } => nqcrb_files(&mut out, n_values, sigma_over_n)?,
        Params::CfiSweep { scheme, readouts, sigmas, phis } => {
            let exp = Experiment::new(scheme)?;
            let per_readout: Vec<_> = readouts
                .iter()
                .map(|&r| cfi_sweep(&exp, r, sigmas, phis.as_deref()))
                .collect::<spin_ibr::Result<_>>()?;
            let records: Vec<_> = per_readout.into_iter().flatten().collect();
            out.write("sweep.csv", |w| write_sweep_csv(w, &records))?;
            let grids: Vec<Value> = readouts
                .iter()
                .map(|&r| {
                    let g = phis.clone().unwrap_or_else(|| exp.default_phi_grid(r));
                    json!({"readout": r, "count": g.len(), "first": g[0], "last": g[g.len() - 1]})
                })
                .collect();
            json!({"f_q": exp.f_q(), "phi0": exp.phi0(), "axis": exp.axis().direction(), "phi_grids": grids, "rows": records.len()})
        }
        Params::ProbSnapshot { scheme, sigma, dphi } => {
            let exp = Experiment::new(scheme)?;
            let phi0 = exp.phi0();
            let layout = [
                (ReadoutKind::Echo, phi0),
                (ReadoutKind::Optimal, phi0),
                (ReadoutKind::Echo, 0.0),
                (ReadoutKind::FlipEcho, 0.0),
            ];
            let mut panels = Vec::new();
            for (row, noise) in [0.0, *sigma].into_iter().enumerate() {
                for (col, (readout, phi)) in layout.into_iter().enumerate() {
                    let label = (b'a' + (4 * row + col) as u8) as char;
                    let snap = snapshot(&exp, readout, phi, *dphi, noise)?;
                    let name = format!("snapshot_{label}.csv");
                    out.write(&name, |w| write_snapshot(w, &snap.before, &snap.after))?;
                    panels.push(json!({
                        "panel": label.to_string(), "readout": readout, "phi": phi, "sigma": noise,
                        "hellinger": snap.hellinger, "file": name,
                    }));
                }
            }
            json!({"phi0": phi0, "f_q": exp.f_q(), "panels": panels})
        }
        Params::OptVerify { n, sigma, f0, iterations, max_angle, trace_stride } => {
            let bound = nqcrb_numeric(*n, *f0, *sigma)?;
            let half = n / 2;
            let spread = (n / 5).max(1);
            let starts = [
                ("uniform", start_uniform(*n, *f0)?),
                ("adjacent", start_pair(*n, *f0, half, half + 1)?),
                ("spread", start_pair(*n, *f0, half - spread, half + spread)?),
            ];
            let runs: Vec<_> = starts
                .par_iter()
                .enumerate()
                .map(|(k, (_, start))| hill_climb(start, *sigma, *iterations, *max_angle, cfg.seed + k as u64))
                .collect::<spin_ibr::Result<_>>()?;
            let mut summary = Vec::new();
            for (k, ((label, _), (_, trace))) in starts.iter().zip(&runs).enumerate() {
                let name = format!("trace_{label}.csv");
                out.write(&name, |w| write_trace_csv(w, trace, *trace_stride))?;
                let last = trace.last().expect("trace holds the start");
                let drift = trace.iter().map(|t| (t.f_zero - f0).abs()).fold(0.0, f64::max);
                summary.push(json!({
                    "start": label, "seed": cfg.seed + k as u64, "final_f_sigma": last.f_sigma,
                    "final_d_h": last.d_h, "f_zero_drift": drift,
                    "accepted": trace.iter().filter(|t| t.accepted).count(), "file": name,
                }));
            }
            json!({"bound": bound, "starts": summary})
        }
        Params::BoundCert { n, sigma, f0, samples } => {
            let rows = certify_bound(*n, *f0, *sigma, cfg.seed, *samples)?;
            out.write("cert.csv", |w| write_cert_csv(w, &rows))?;
            let violations = rows.iter().filter(|r| r.violates(1e-9)).count();
            let max = rows.iter().map(|r| r.f_sigma).fold(0.0, f64::max);
            json!({"bound": rows[0].bound, "max_f_sigma": max, "violations": violations})
        }
        Params::Husimi { scheme, theta_points, phi_points } => {
            let ops = SpinOps::new(scheme.n)?;
            let state = prepare_state(scheme, &ops)?;
            let field = husimi_q(&state, &ops, *theta_points, *phi_points)?;
            out.write("husimi.csv", |w| field.write_csv(w))?;
            json!({"integral": field.integral(), "max": field.max()})
        }
        Params::StateReport { scheme } => {
            let exp = Experiment::new(scheme)?;
            let ops = exp.ops();
            let state = exp.state();
            let pops = state.populations();
            let rows: Vec<[f64; 2]> = ops.m_values().iter().zip(&pops).map(|(&m, &p)| [m, p]).collect();
            out.write("populations.csv", |w| write_table(w, &POPULATION_HEADER, rows))?;
            let mean = [ops.jx(), ops.jy(), ops.jz()].map(|j| state.expectation(j).re);
            json!({
                "f_q": exp.f_q(), "f_q_over_n": exp.f_q() / scheme.n as f64, "axis": exp.axis().direction(),
                "phi0": exp.phi0(), "purity": state.density().purity(), "mean_j": mean,
            })
        }
    };
    let sidecar = Sidecar {
        library: "spin-ibr",
        version: spin_ibr::VERSION,
        config: cfg.clone(),
        files: out.files,
        results,
    };
    let path = cfg.out.join(format!("{}.json", cfg.command()));
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, &sidecar).map_err(|e| CliError::Io(e.into()))?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(sidecar)
}

fn nqcrb_files(out: &mut Outputs<'_>, n_values: &[usize], sigma_over_n: &[f64]) -> Result<Value, CliError> {
    let curves: Vec<_> = n_values
        .par_iter()
        .map(|&n| nqcrb_curve(n, (n * n) as f64, sigma_over_n))
        .collect::<spin_ibr::Result<_>>()?;
    let mut summary = Vec::new();
    for (&n, rows) in n_values.iter().zip(&curves) {
        let name = format!("nqcrb_n{n}.csv");
        out.write(&name, |w| write_nqcrb_csv(w, rows))?;
        let gap = rows.iter().map(|r| (r.f_numeric - r.f_analytic) / r.f_q).fold(0.0, f64::max);
        summary.push(json!({"n": n, "f_q": (n * n) as f64, "max_normalised_gap": gap, "file": name}));
    }
    Ok(json!({"curves": summary}))
}

fn write_snapshot<W: Write>(w: W, before: &ProbDist, after: &ProbDist) -> spin_ibr::Result<()> {
    let rows = before
        .m_values()
        .into_iter()
        .zip(before.p().iter().zip(after.p()))
        .map(|(m, (a, b))| vec![fmt_num(m), fmt_num(*a), fmt_num(*b)]);
    write_rows(w, &SNAPSHOT_HEADER, rows)
}
