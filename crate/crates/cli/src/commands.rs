use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::Serialize;
use serde_json::json;

use qss_core::graph::{build_graph_state, canonical_graph, canonical_resource, stabilizer_generators, GraphSpec};
use qss_core::info::{fidelity_bases, fidelity_from_terms, fidelity_terms, fidelity_via_pauli_terms, witness_value, WitnessSpec};
use qss_core::noise::{
    apply_noise, bitstring, expectation_from_records, expectations_from_counts, monte_carlo_error, read_counts_csv,
    sample_counts, seeded, tomography_reconstruct, tomography_settings, write_counts_csv, CountRecord, NoiseSpec,
};
use qss_core::{DensityMatrix, PauliString};
use qss_protocols::cq::{classify_access, CqConfig};
use qss_protocols::hybrid::HybridConfig;
use qss_protocols::qq::{
    channel_tomography, default_references, pair_reduced_state, plane_sweep, single_player_output,
    teleport_retrieval_output, IdealChannel, QqConfig,
};
use qss_protocols::session::{run_report, Report, SessionConfig, Transcript};
use qss_protocols::sqq::{AbortPolicy, SqqConfig};
use qss_protocols::{pair_class, PlayerSet};

use crate::output::{emit, fmt, write_csv};
use crate::{Cli, Command, Common, SessionArgs};

pub enum Status {
    Done,
    Aborted,
}

/// Poisson resamples behind every sampled error bar.
const RESAMPLES: usize = 200;

pub fn run(cli: &Cli) -> Result<Status> {
    let c = &cli.common;
    match &cli.command {
        Command::BuildState { graph } => build_state(c, graph.as_deref()),
        Command::Witness { noise, shots } => witness(c, noise.noise.as_ref(), *shots),
        Command::Fidelity { noise, shots } => fidelity(c, noise.noise.as_ref(), *shots),
        Command::Access { ideal: _, noise, tol } => access(c, noise.noise.as_ref(), *tol),
        Command::Cq { session } => run_protocol(
            c,
            session,
            SessionConfig::Cq(CqConfig {
                rounds: session.rounds,
                triplet: session.triplet,
                noise: session.noise.noise.clone(),
                record_rounds: session.record_rounds,
            }),
        ),
        Command::Qq { session, secret } => run_protocol(
            c,
            session,
            SessionConfig::Qq(QqConfig {
                rounds: session.rounds,
                triplet: session.triplet,
                secret: *secret,
                noise: session.noise.noise.clone(),
                record_rounds: session.record_rounds,
            }),
        ),
        Command::Hybrid { session, secret } => run_protocol(
            c,
            session,
            SessionConfig::Hybrid(HybridConfig {
                rounds: session.rounds,
                triplet: session.triplet,
                secret: *secret,
                noise: session.noise.noise.clone(),
                record_rounds: session.record_rounds,
            }),
        ),
        Command::Sqq { session, secret, s, keep_going, tamper } => run_protocol(
            c,
            session,
            SessionConfig::Sqq(SqqConfig {
                rounds: session.rounds,
                s: *s,
                triplet: session.triplet,
                secret: *secret,
                noise: session.noise.noise.clone(),
                policy: if *keep_going { AbortPolicy::Continue } else { AbortPolicy::AbortOnFail },
                tamper: tamper.clone(),
                record_rounds: session.record_rounds,
            }),
        ),
        Command::Sweep { pair, plane, steps } => {
            let (a, b) = as_pair(pair)?;
            let class = pair_class(a, b)?;
            let refs = default_references(class, *plane)?;
            let states: Vec<DensityMatrix> = refs.iter().map(|(_, r)| r.clone()).collect();
            let rows = plane_sweep((a, b), *plane, *steps, &states)?;
            let names: Vec<String> = refs.into_iter().map(|(n, _)| n).collect();
            if let Some(path) = &c.csv {
                let mut header = vec!["angle_radians".to_string()];
                header.extend(names.iter().cloned());
                let body: Vec<Vec<String>> = rows
                    .iter()
                    .map(|r| std::iter::once(r.angle).chain(r.fidelities.iter().copied()).map(|v| v.to_string()).collect())
                    .collect();
                write_csv(path, &header, &body)?;
            }
            let mut summary = vec![
                ("pair".into(), pair.to_string()),
                ("class".into(), format!("{class:?}").to_lowercase()),
                ("plane".into(), plane.to_string()),
            ];
            for (i, name) in names.iter().enumerate() {
                let vals: Vec<f64> = rows.iter().map(|r| r.fidelities[i]).collect();
                let (lo, hi) = vals.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(*v), h.max(*v)));
                summary.push((format!("overlap {name}"), format!("{} .. {}", fmt(lo), fmt(hi))));
            }
            let report = json!({
                "pair": pair,
                "class": format!("{class:?}").to_lowercase(),
                "plane": plane,
                "references": names,
                "rows": rows,
            });
            emit(c, &report, &summary)?;
            Ok(Status::Done)
        }
        Command::Tomo { player, triplet, pair, counts, secret, noise, shots } => {
            if let Some(k) = player {
                let rep = channel_tomography(|s| single_player_output(*k, s), IdealChannel::MaximallyMixed)?;
                return channel_report(c, &format!("dealer -> player {k}"), &rep);
            }
            if let Some(t) = triplet {
                let rho = noisy_resource(noise.noise.as_ref())?;
                let rep = channel_tomography(|s| teleport_retrieval_output(&rho, s, *t), IdealChannel::Identity)?;
                return channel_report(c, &format!("secret -> designated player of {t}"), &rep);
            }
            if let Some(p) = pair {
                let exact = pair_reduced_state(as_pair(p)?, secret)?;
                let exact = match noise.noise.as_ref() {
                    Some(n) => apply_noise(&exact, n)?,
                    None => exact,
                };
                let mut rng = seeded(c.seed);
                let records = tomography_settings(2)
                    .iter()
                    .map(|s| sample_counts(&exact, s, *shots, &mut rng))
                    .collect::<qss_core::Result<Vec<_>>>()?;
                if let Some(path) = &c.csv {
                    write_counts(path, &records)?;
                }
                let rho = tomography_reconstruct(&expectations_from_counts(&records, 2), 2)?;
                let distance = rho.trace_distance(&exact)?;
                let report = json!({
                    "pair": p,
                    "secret": secret,
                    "shots": shots,
                    "density": density_json(&rho),
                    "trace_distance": distance,
                });
                let summary = vec![
                    ("pair".into(), p.to_string()),
                    ("purity".into(), fmt(rho.purity())),
                    ("trace distance".into(), fmt(distance)),
                ];
                emit(c, &report, &summary)?;
                return Ok(Status::Done);
            }
            if let Some(path) = counts {
                let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
                let records = read_counts_csv(file)?;
                let n = records.first().ok_or_else(|| anyhow!("no count records in {}", path.display()))?.setting.n();
                let rho = tomography_reconstruct(&expectations_from_counts(&records, n), n)?;
                let report = json!({ "n": n, "density": density_json(&rho), "purity": rho.purity() });
                let summary = vec![("qubits".into(), n.to_string()), ("purity".into(), fmt(rho.purity()))];
                emit(c, &report, &summary)?;
                return Ok(Status::Done);
            }
            bail!("tomo needs one of --player, --triplet, --pair or --counts")
        }
    }
}

fn as_pair(set: &PlayerSet) -> Result<(usize, usize)> {
    match set.players() {
        [a, b] => Ok((*a, *b)),
        _ => bail!("--pair takes exactly two players, got {set}"),
    }
}

fn noisy_resource(noise: Option<&NoiseSpec>) -> Result<DensityMatrix> {
    let ideal = canonical_resource::<f64>().1.density();
    Ok(match noise {
        Some(n) => apply_noise(&ideal, n)?,
        None => ideal,
    })
}

fn density_json(rho: &DensityMatrix) -> serde_json::Value {
    let d = rho.dim();
    let part = |f: fn(qss_core::Complex) -> f64| -> Vec<Vec<f64>> {
        (0..d).map(|i| (0..d).map(|j| f(rho.entry(i, j))).collect()).collect()
    };
    json!({ "real": part(|z| z.re), "imag": part(|z| z.im), "eigenvalues": rho.eigenvalues() })
}

fn write_counts(path: &Path, records: &[CountRecord]) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    write_counts_csv(records, file)?;
    Ok(())
}

fn channel_report(c: &Common, label: &str, rep: &qss_protocols::qq::ChannelReport) -> Result<Status> {
    let summary = vec![
        ("channel".into(), label.to_string()),
        ("matrix norm".into(), fmt(rep.channel.matrix_norm())),
        ("translation norm".into(), fmt(rep.channel.translation_norm())),
        ("process fidelity".into(), fmt(rep.process_fidelity)),
        ("average fidelity".into(), fmt(rep.average_fidelity)),
    ];
    emit(c, rep, &summary)?;
    Ok(Status::Done)
}

fn build_state(c: &Common, graph: Option<&Path>) -> Result<Status> {
    let g: GraphSpec = match graph {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing graph file {}", p.display()))?
        }
        None => canonical_graph(),
    };
    let psi = build_graph_state::<f64>(&g);
    let stabilizers: Vec<(String, f64)> = stabilizer_generators(&g)
        .iter()
        .map(|k| Ok((k.to_string(), psi.expectation(k)?)))
        .collect::<qss_core::Result<_>>()?;
    if let Some(path) = &c.csv {
        let rows: Vec<Vec<String>> = psi
            .amplitudes()
            .iter()
            .enumerate()
            .map(|(i, a)| vec![i.to_string(), bitstring(i, g.n()), a.re.to_string(), a.im.to_string()])
            .collect();
        let header = ["index", "bitstring", "re", "im"].map(String::from);
        write_csv(path, &header, &rows)?;
    }
    let canonical = g == canonical_graph();
    let report = json!({
        "graph": g,
        "canonical_resource": canonical,
        "stabilizers": stabilizers.iter().map(|(k, e)| json!({ "generator": k, "expectation": e })).collect::<Vec<_>>(),
        "amplitudes": c.verbose.then(|| psi.amplitudes().iter().map(|a| [a.re, a.im]).collect::<Vec<_>>()),
    });
    let mut summary = vec![
        ("qubits".into(), g.n().to_string()),
        ("edges".into(), g.edges().map(|(u, v)| format!("{u}-{v}")).collect::<Vec<_>>().join(" ")),
        ("canonical resource".into(), canonical.to_string()),
    ];
    for (k, e) in &stabilizers {
        summary.push((format!("<{k}>"), fmt(*e)));
    }
    emit(c, &report, &summary)?;
    Ok(Status::Done)
}

fn sampled(rho: &DensityMatrix, settings: &[PauliString], shots: u64, seed: u64) -> Result<Vec<CountRecord>> {
    let mut rng = seeded(seed);
    Ok(settings
        .iter()
        .map(|s| sample_counts(rho, s, shots, &mut rng))
        .collect::<qss_core::Result<Vec<_>>>()?)
}

#[derive(Serialize)]
struct Estimate {
    value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    exact_value: Option<f64>,
    ideal_value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    shots: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    noise: Option<String>,
}

impl Estimate {
    fn summary(&self, name: &str) -> Vec<(String, String)> {
        let mut s = vec![(name.to_string(), fmt(self.value))];
        if let Some(e) = self.error {
            s.push(("error".into(), fmt(e)));
        }
        if let Some(x) = self.exact_value {
            s.push(("exact".into(), fmt(x)));
        }
        s.push(("ideal".into(), fmt(self.ideal_value)));
        s
    }
}

fn witness(c: &Common, noise: Option<&NoiseSpec>, shots: Option<u64>) -> Result<Status> {
    let rho = noisy_resource(noise)?;
    let exact = witness_value(&rho)?;
    let ideal_value = witness_value(&noisy_resource(None)?)?;
    let spec = WitnessSpec::<f64>::resource();
    let mut est = Estimate { value: exact, error: None, exact_value: None, ideal_value, shots, noise: noise.map(|n| n.to_string()) };
    if let Some(shots) = shots {
        let records = sampled(&rho, &spec.bases(), shots, c.seed)?;
        let stat = |r: &[CountRecord]| spec.evaluate_from(|p| expectation_from_records(r, p));
        est.value = stat(&records).ok_or_else(|| anyhow!("witness term not covered by the sampled settings"))?;
        est.error = Some(monte_carlo_error(&records, stat, RESAMPLES, c.seed)?.std);
        est.exact_value = Some(exact);
        if let Some(path) = &c.csv {
            write_counts(path, &records)?;
        }
    } else if c.csv.is_some() {
        bail!("--csv writes sampled counts and needs --shots");
    }
    emit(c, &est, &est.summary("witness"))?;
    Ok(Status::Done)
}

fn fidelity(c: &Common, noise: Option<&NoiseSpec>, shots: Option<u64>) -> Result<Status> {
    let rho = noisy_resource(noise)?;
    let exact = fidelity_via_pauli_terms(&rho)?.fidelity;
    let mut est = Estimate { value: exact, error: None, exact_value: None, ideal_value: 1.0, shots, noise: noise.map(|n| n.to_string()) };
    if let Some(shots) = shots {
        let records = sampled(&rho, &fidelity_bases(), shots, c.seed)?;
        let terms = fidelity_terms();
        let stat = |r: &[CountRecord]| {
            let values: Option<Vec<f64>> = terms.iter().map(|t| expectation_from_records(r, t)).collect();
            values.map(|v| fidelity_from_terms(v.into_iter()))
        };
        est.value = stat(&records).ok_or_else(|| anyhow!("fidelity term not covered by the sampled settings"))?;
        est.error = Some(monte_carlo_error(&records, stat, RESAMPLES, c.seed)?.std);
        est.exact_value = Some(exact);
        if let Some(path) = &c.csv {
            write_counts(path, &records)?;
        }
    } else if c.csv.is_some() {
        bail!("--csv writes sampled counts and needs --shots");
    }
    emit(c, &est, &est.summary("fidelity"))?;
    Ok(Status::Done)
}

fn access(c: &Common, noise: Option<&NoiseSpec>, tol: Option<f64>) -> Result<Status> {
    let tol = tol.unwrap_or(if noise.is_some() { 0.05 } else { 1e-6 });
    let rows = classify_access(&noisy_resource(noise)?, tol)?;
    let label = |a: qss_protocols::cq::Access| format!("{a:?}").to_lowercase();
    if let Some(path) = &c.csv {
        let header = ["subset", "chi_z", "chi_y", "classification"].map(String::from);
        let body: Vec<Vec<String>> = rows
            .iter()
            .map(|r| vec![r.subset.to_string(), r.chi_z.to_string(), r.chi_y.to_string(), label(r.classification)])
            .collect();
        write_csv(path, &header, &body)?;
    }
    let summary = rows
        .iter()
        .map(|r| {
            (
                r.subset.to_string(),
                format!("chi_z {}  chi_y {}  {}", fmt(r.chi_z), fmt(r.chi_y), label(r.classification)),
            )
        })
        .collect::<Vec<_>>();
    let report = json!({
        "noise": noise.map(|n| n.to_string()),
        "tolerance": tol,
        "rows": rows.iter().map(|r| json!({
            "subset": r.subset.to_string(),
            "chi_z": r.chi_z,
            "chi_y": r.chi_y,
            "classification": label(r.classification),
        })).collect::<Vec<_>>(),
    });
    emit(c, &report, &summary)?;
    Ok(Status::Done)
}

fn round_csv(path: &Path, t: &Transcript) -> Result<()> {
    let keys: BTreeSet<&String> = t.rounds.iter().flat_map(|r| r.values.keys()).collect();
    let mut header: Vec<String> = ["round", "state_id", "label"].map(String::from).to_vec();
    header.extend(keys.iter().map(|k| k.to_string()));
    let rows: Vec<Vec<String>> = t
        .rounds
        .iter()
        .map(|r| {
            let mut row = vec![r.round.to_string(), r.state_id.to_string(), r.label.clone()];
            row.extend(keys.iter().map(|k| r.values.get(*k).map_or(String::new(), |v| v.to_string())));
            row
        })
        .collect();
    write_csv(path, &header, &rows)
}

fn run_protocol(c: &Common, _args: &SessionArgs, config: SessionConfig) -> Result<Status> {
    let mut report: Report = run_report(&config, c.seed, true)?;
    let transcript = report.transcript.take().expect("transcript kept");
    if let Some(path) = &c.csv {
        round_csv(path, &transcript)?;
    }
    if c.verbose {
        report.transcript = Some(transcript);
    }
    let metrics: &BTreeMap<String, f64> = &report.metrics;
    let mut summary = vec![("protocol".to_string(), report.protocol.to_string()), ("seed".into(), c.seed.to_string())];
    summary.extend(metrics.iter().map(|(k, v)| (k.clone(), fmt(*v))));
    emit(c, &report, &summary)?;
    Ok(if report.aborted() { Status::Aborted } else { Status::Done })
}
