//! Protocol dispatch: one config in, summary plus per-round rows out.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use qverify::detect::{
    run_hamiltonian_protocol, run_lcs_protocol, run_singlet_protocol, DetectionRun, LocalHamiltonian,
    SettingPolicy, Threshold, LOCAL_SEPARABLE_BOUND,
};
use qverify::mub::{MubFamily, QuditState};
use qverify::parallel::{derive_seed, round_rng};
use qverify::shadow::{
    shadows_collect, shadows_estimate, sqst_collect, sqst_estimate_element, sqst_estimate_observable,
    sqst_sample_size_many, MeasurementRecord, ShadowEnsemble, SnapshotSetting, SqstMode,
};
use qverify::simcore::{stabilizer_group, Basis, NoisyStateSource, ObservableMatrix, PauliString};
use qverify::stats::union_split;
use qverify::witness::{
    cluster6_color_classes, copies_needed, generic_stabilizer_table, qsv_build_strategy, qsv_run,
    run_witness_protocol, w1_table, w2_table, QsvVerdict,
};
use qverify::simcore::NamedState;

use crate::config::*;
use crate::states::{Shot, StateSpec};
use crate::witness_file::load_witness;
use crate::CliError;

/// One line of the per-round CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundRow {
    pub round: u64,
    pub setting: String,
    pub outcome: String,
    pub running_s: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    /// `p_s` used for confidence curves, if the protocol has one.
    pub reference_bound: Option<f64>,
    /// Bernoulli trials contributed by each CSV row.
    pub checks_per_round: u64,
    pub summary: Value,
    pub rows: Vec<RoundRow>,
    /// Additional artifacts as `(file name, contents)`.
    pub files: Vec<(String, String)>,
}

fn state(spec: &str) -> Result<StateSpec, CliError> {
    spec.parse().map_err(|e| CliError::Config(format!("bad state `{spec}`: {e}")))
}

fn source(cfg: &ExperimentConfig, target: Shot) -> Result<NoisyStateSource<Shot>, CliError> {
    use qverify::simcore::LocalSampler;
    let Some(noise) = &cfg.noise else {
        return Ok(NoisyStateSource::ideal(target));
    };
    let n = target.n_qubits();
    let spec = state(noise.state.as_deref().unwrap_or(&format!("zero({n})")))?;
    let backend = if matches!(target, Shot::Stabilizer(_)) && matches!(spec, StateSpec::Zero(_)) {
        Backend::Stabilizer
    } else {
        Backend::Auto
    };
    Ok(NoisyStateSource::new(target, spec.shot(backend)?, noise.lambda)?)
}

pub fn execute(cfg: &ExperimentConfig, base_dir: &Path) -> Result<RunOutput, CliError> {
    let seed = cfg.seed;
    match &cfg.experiment {
        Experiment::Singlet(c) => {
            let spec = state(c.state.as_deref().unwrap_or(&format!("singlet_product({})", c.n_pairs)))?;
            let src = source(cfg, spec.shot(c.backend)?)?;
            let policy = match &c.settings {
                None => SettingPolicy::Randomized,
                Some(s) => SettingPolicy::Fixed(
                    s.chars()
                        .map(|ch| Basis::from_char(ch).ok_or_else(|| CliError::Config(format!("bad basis `{ch}` in settings"))))
                        .collect::<Result<_, _>>()?,
                ),
            };
            let threshold = c.epsilon.map_or(Threshold::PostHoc, Threshold::Fixed);
            detection_output(run_singlet_protocol(&src, c.n_pairs, c.repetitions, &policy, threshold, seed)?, 2 * c.n_pairs)
        }
        Experiment::Lcs(c) => {
            if c.n % 3 != 0 {
                return Err(CliError::Config(format!("lcs needs n divisible by 3, got {}", c.n)));
            }
            let spec = state(c.state.as_deref().unwrap_or(&format!("linear_cluster({},periodic)", c.n)))?;
            let src = source(cfg, spec.shot(c.backend)?)?;
            let threshold = c.epsilon.map_or(Threshold::PostHoc, Threshold::Fixed);
            detection_output(run_lcs_protocol(&src, c.n, c.n / 3, c.repetitions, threshold, seed)?, c.n)
        }
        Experiment::Hamiltonian(c) => hamiltonian(cfg, c),
        Experiment::Witness(c) => witness(cfg, c, base_dir),
        Experiment::Qsv(c) => qsv(cfg, c),
        Experiment::Sqst(c) => sqst(cfg, c),
        Experiment::Shadows(c) => shadows(cfg, c),
    }
}

fn running_rows<'a>(items: impl Iterator<Item = (String, u64)> + 'a, checks: u64) -> Vec<RoundRow> {
    let mut total = 0u64;
    items
        .enumerate()
        .map(|(i, (setting, outcome))| {
            total += outcome;
            let round = i as u64 + 1;
            RoundRow { round, setting, outcome: outcome.to_string(), running_s: Some(total as f64 / (round * checks) as f64) }
        })
        .collect()
}

fn detection_output(run: DetectionRun, n_qubits: usize) -> Result<RunOutput, CliError> {
    let checks = run.local_checks as u64;
    let rows = running_rows(run.rounds.iter().map(|r| (r.setting.clone(), r.local_successes as u64)), checks);
    let threshold = match run.threshold {
        Threshold::PostHoc => json!("post_hoc"),
        Threshold::Fixed(e) => json!(e),
    };
    let summary = json!({
        "n_qubits": n_qubits,
        "local_checks": run.local_checks,
        "repetitions": run.repetitions,
        "threshold": threshold,
        "epsilon": run.epsilon,
        "observed_rate": run.observed_rate,
        "passes": run.passes(),
        "pass_rate": run.pass_rate(),
        "s_overall": run.s_overall(),
        "reference_bound": LOCAL_SEPARABLE_BOUND,
        "c_min": run.confidence_lower_bound(),
    });
    Ok(RunOutput { reference_bound: Some(LOCAL_SEPARABLE_BOUND), checks_per_round: checks, summary, rows, files: vec![] })
}

fn hamiltonian(cfg: &ExperimentConfig, c: &HamiltonianConfig) -> Result<RunOutput, CliError> {
    let h = match c.eps_0 {
        Some(e) => LocalHamiltonian::heisenberg_ring_with_ground_energy(c.n, e)?,
        None => LocalHamiltonian::heisenberg_ring(c.n)?,
    };
    let spec = state(c.state.as_deref().unwrap_or(&format!("heisenberg_ground({})", c.n)))?;
    let src = source(cfg, spec.shot(c.backend)?)?;
    let run = run_hamiltonian_protocol(&h, &src, c.delta, c.repetitions, cfg.seed)?;
    let rows = running_rows(run.rounds.iter().map(|r| (r.setting.clone(), r.passed as u64)), 1);
    let energies: Vec<f64> = run.rounds.iter().filter_map(|r| r.value).collect();
    let summary = json!({
        "n_sites": c.n,
        "delta": c.delta,
        "eps_sep": h.eps_sep(),
        "eps_0": h.eps_0(),
        "gap": h.gap(),
        "energy_threshold": c.n as f64 * (h.eps_sep() - c.delta),
        "repetitions": run.repetitions,
        "passes": run.passes(),
        "pass_rate": run.pass_rate(),
        "mean_single_shot_energy": energies.iter().sum::<f64>() / energies.len().max(1) as f64,
    });
    Ok(RunOutput { reference_bound: None, checks_per_round: 1, summary, rows, files: vec![] })
}

fn generators(spec: &StateSpec) -> Result<Vec<PauliString>, CliError> {
    spec.stabilizer_generators()
        .ok_or_else(|| CliError::Config(format!("state {spec:?} has no stabilizer description")))
}

fn witness(cfg: &ExperimentConfig, c: &WitnessConfig, base_dir: &Path) -> Result<RunOutput, CliError> {
    let spec = state(c.state.as_deref().unwrap_or("cluster6_h"))?;
    let table = match c.witness.as_str() {
        "w1" => w1_table(&generators(&spec)?)?,
        "w2" => {
            if spec != StateSpec::Named(NamedState::Cluster6H) {
                return Err(CliError::Config("the built-in w2 witness is defined for cluster6_h only".into()));
            }
            let (a, b) = cluster6_color_classes();
            w2_table(&a, &b)?
        }
        "generic" => generic_stabilizer_table(&generators(&spec)?)?,
        path => {
            let p = base_dir.join(path);
            let text = std::fs::read_to_string(&p)
                .map_err(|e| CliError::Config(format!("cannot read witness file {}: {e}", p.display())))?;
            load_witness(&text)?
        }
    };
    let target = spec.shot(c.backend)?;
    let table = match target.as_dense() {
        Some(s) => table.with_target(s)?,
        None if table.n_qubits <= 16 => table.with_target(&spec.dense()?)?,
        None => table,
    };
    let src = source(cfg, target)?;
    let report = run_witness_protocol(&table, &src, c.repetitions, cfg.seed)?;
    let rows = running_rows(report.rounds.iter().map(|r| (r.setting.clone(), r.outcome as u64)), 1);
    let copies = match table.p_e {
        Some(p_e) if p_e.min(1.0) > table.p_s => Some(copies_needed(p_e.min(1.0), table.p_s, c.delta)?),
        _ => None,
    };
    let summary = json!({
        "n_qubits": table.n_qubits,
        "entries": table.entries.len(),
        "tau": table.tau,
        "p_s": table.p_s,
        "p_e": table.p_e,
        "repetitions": report.rounds.len(),
        "successes": report.successes,
        "success_rate": report.success_rate,
        "epsilon": report.epsilon,
        "c_min": report.confidence.c_min,
        "copies_needed": copies,
        "copies_delta": c.delta,
    });
    Ok(RunOutput { reference_bound: Some(table.p_s), checks_per_round: 1, summary, rows, files: vec![] })
}

/// Largest width for which the full stabilizer-group strategy is built.
const QSV_GROUP_MAX_QUBITS: usize = 6;

fn qsv(cfg: &ExperimentConfig, c: &QsvConfig) -> Result<RunOutput, CliError> {
    let spec = state(c.state.as_deref().unwrap_or("singlet_product(1)"))?;
    let dense = spec.dense()?;
    let settings = match c.strategy.as_str() {
        "stabilizer_group" => {
            let n = dense.n_qubits();
            if n > QSV_GROUP_MAX_QUBITS {
                return Err(qverify::Error::CapacityExceeded { requested: n, limit: QSV_GROUP_MAX_QUBITS }.into());
            }
            let group: Vec<PauliString> = stabilizer_group(&generators(&spec)?)?
                .into_iter()
                .filter(|g| !g.is_identity())
                .collect();
            let w = 1.0 / group.len() as f64;
            let id = ObservableMatrix::identity(dense.dim());
            group
                .iter()
                .map(|g| Ok((w, id.add(&ObservableMatrix::from_pauli(g))?.scale(0.5))))
                .collect::<qverify::Result<Vec<_>>>()?
        }
        "projector" => vec![(1.0, ObservableMatrix::projector_onto(&dense))],
        other => return Err(CliError::Config(format!("unknown qsv strategy `{other}`"))),
    };
    let strategy = qsv_build_strategy(settings)?;
    let src = source(cfg, Shot::Dense(dense))?;
    let mut verdicts = Vec::with_capacity(c.trials as usize);
    for t in 0..c.trials {
        let s = derive_seed(&mut round_rng(cfg.seed, t));
        verdicts.push(qsv_run(&strategy, &src, c.epsilon, c.delta, s)?);
    }
    let rows = running_rows(
        verdicts.iter().map(|v| match v {
            QsvVerdict::Accepted { rounds } => (format!("accepted after {rounds}"), 1),
            QsvVerdict::Rejected { round } => (format!("rejected at {round}"), 0),
        }),
        1,
    );
    let accepted = verdicts.iter().filter(|v| matches!(v, QsvVerdict::Accepted { .. })).count();
    let summary = json!({
        "nu": strategy.nu,
        "lambda2": strategy.lambda2,
        "epsilon": c.epsilon,
        "delta": c.delta,
        "rounds_per_trial": qverify::witness::qsv_rounds(strategy.nu, c.epsilon, c.delta)?,
        "trials": c.trials,
        "accepted": accepted,
        "acceptance_rate": accepted as f64 / c.trials.max(1) as f64,
    });
    Ok(RunOutput { reference_bound: None, checks_per_round: 1, summary, rows, files: vec![] })
}

fn sqst(cfg: &ExperimentConfig, c: &SqstConfig) -> Result<RunOutput, CliError> {
    let spec = state(&c.state)?;
    let target = spec.qudit(derive_seed(&mut round_rng(cfg.seed, u64::MAX)))?;
    let d = target.dim();
    let fam = MubFamily::new(d)?;
    let queries = (c.elements.len() + c.observables.len()) as u64;
    if queries == 0 {
        return Err(CliError::Config("sqst needs at least one element or observable".into()));
    }
    let src = match &cfg.noise {
        None => NoisyStateSource::ideal(target),
        Some(n) => {
            let noise = match &n.state {
                Some(s) => state(s)?.qudit(0)?,
                None => QuditState::basis(d, 0),
            };
            NoisyStateSource::new(target, noise, n.lambda)?
        }
    };
    let copies = match c.copies {
        Some(n) => n,
        None => sqst_sample_size_many(c.epsilon, c.delta, queries)?,
    };
    let off = sqst_collect(&src, &fam, copies, SqstMode::OffdiagMub, cfg.seed)?.with_label(c.state.clone())?;
    let diag = sqst_collect(&src, &fam, copies, SqstMode::DiagComputational, derive_seed(&mut round_rng(cfg.seed, 1)))?
        .with_label(c.state.clone())?;
    let each = union_split(c.delta, queries)?;
    let records = [&off, &diag];
    let elements = c
        .elements
        .iter()
        .map(|&[i, j]| {
            let e = sqst_estimate_element(&fam, &records, i, j, each)?;
            Ok(json!({"i": i, "j": j, "re": e.value.re, "im": e.value.im, "epsilon": e.epsilon, "delta": e.delta, "n_used": e.n_used}))
        })
        .collect::<qverify::Result<Vec<_>>>()?;
    let observables = c
        .observables
        .iter()
        .map(|s| {
            let p: PauliString = s.parse()?;
            let e = sqst_estimate_observable(&fam, &records, &ObservableMatrix::from_pauli(&p), each)?;
            Ok(json!({"observable": s, "value": e.re(), "epsilon": e.epsilon, "delta": e.delta, "n_used": e.n_used}))
        })
        .collect::<qverify::Result<Vec<_>>>()?;
    let rows = record_rows(&off).chain(record_rows(&diag)).enumerate().map(|(i, mut r)| {
        r.round = i as u64 + 1;
        r
    });
    let summary = json!({
        "d": d,
        "copies_per_record": copies,
        "delta_total": c.delta,
        "elements": elements,
        "observables": observables,
        "records": ["sqst_offdiag.txt", "sqst_diag.txt"],
    });
    Ok(RunOutput {
        reference_bound: None,
        checks_per_round: 1,
        summary,
        rows: rows.collect(),
        files: vec![("sqst_offdiag.txt".into(), off.to_text()), ("sqst_diag.txt".into(), diag.to_text())],
    })
}

fn record_rows(r: &MeasurementRecord) -> impl Iterator<Item = RoundRow> + '_ {
    r.outcomes.iter().map(|&(k, m)| RoundRow { round: 0, setting: format!("m={m}"), outcome: k.to_string(), running_s: None })
}

fn shadows(cfg: &ExperimentConfig, c: &ShadowsConfig) -> Result<RunOutput, CliError> {
    let spec = state(&c.state)?;
    let ensemble: ShadowEnsemble = c.ensemble.parse()?;
    let target = spec.shot(c.backend)?;
    let n = spec.n_qubits().expect("qubit state");
    let observables = c
        .observables
        .iter()
        .map(|s| match s.as_str() {
            "fidelity" => Ok(ObservableMatrix::projector_onto(&spec.dense()?)),
            p => Ok(ObservableMatrix::from_pauli(&p.parse()?)),
        })
        .collect::<qverify::Result<Vec<_>>>()?;
    let src = source(cfg, target)?;
    let set = shadows_collect(&src, n, c.snapshots, ensemble, cfg.seed)?.with_label(c.state.clone())?;
    let est = shadows_estimate(&set, &observables, c.k_groups)?;
    let estimates: Vec<Value> = c
        .observables
        .iter()
        .zip(&est)
        .map(|(name, e)| json!({"observable": name, "value": e.re(), "epsilon": e.epsilon, "delta": e.delta, "n_used": e.n_used}))
        .collect();
    let rows = set
        .snapshots
        .iter()
        .enumerate()
        .map(|(i, s)| RoundRow {
            round: i as u64 + 1,
            setting: match &s.setting {
                SnapshotSetting::Pauli(b) => b.iter().map(|b| b.as_char()).collect(),
                SnapshotSetting::Clifford(t) => t.to_string(),
            },
            outcome: s.bits.iter().map(|b| char::from(b'0' + b)).collect(),
            running_s: None,
        })
        .collect();
    let summary = json!({
        "n_qubits": n,
        "ensemble": ensemble.name(),
        "snapshots": c.snapshots,
        "k_groups": c.k_groups,
        "estimates": estimates,
        "snapshot_file": "shadows.txt",
    });
    Ok(RunOutput { reference_bound: None, checks_per_round: 1, summary, rows, files: vec![("shadows.txt".into(), set.to_text())] })
}
