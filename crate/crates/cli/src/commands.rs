use std::fmt::Write as _;

use qleak::channel::{depolarizing_global, dp_epsilon_bound_depolarizing, verify_dp_on_ensemble};
use qleak::divergence::{petz_renyi, sandwiched_renyi};
use qleak::leakage::{barycentric_leakage, inequality_chain_report, max_leakage, pairwise_leakage};
use qleak::vqml::tradeoff_curve;
use qleak::{
    ChainOptions, DensityOperator, DpParams, Encoder, Ensemble, LeakageCertificate, LeakageWitness,
    ModelInput, Povm, ProbVector, RenyiOrder, SolveStatus, TradeoffRow, VariationalModel,
};
use rayon::prelude::*;

use crate::error::{CliError, CliResult};
use crate::format::{bits, fixed};
use crate::spec::{DpCheckDoc, EnsembleDoc, ModelJob};

pub const TRADEOFF_HEADER: &str =
    "p,gamma_actual,gamma_bound,leakage_B_bits,leakage_R_bits,leakage_bound_bits";
pub const DEFAULT_P_GRID: [f64; 20] = [
    0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5, 0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85,
    0.9, 0.95, 1.0,
];
/// Layers of the built-in model used when `tradeoff` gets no model file.
pub const DEFAULT_MODEL_LAYERS: usize = 2;

fn require_optimal(c: &LeakageCertificate, what: &str) -> CliResult<()> {
    match c.status {
        SolveStatus::Optimal => Ok(()),
        other => Err(CliError::NonConvergence(format!(
            "{what} ended with status {other:?}, gap {:e} bits",
            c.gap
        ))),
    }
}

fn witness_text(w: &LeakageWitness) -> String {
    match w {
        LeakageWitness::Weights(pi) => {
            let parts: Vec<String> = pi.iter().map(|v| fixed(*v)).collect();
            format!("weights [{}]", parts.join(" "))
        }
        LeakageWitness::DominatingOperator(y) => {
            format!("dominating operator with trace {}", fixed(y.trace()))
        }
        LeakageWitness::Pair { from, to } => format!("pair {from} -> {to}"),
    }
}

/// Certificate table for every leakage quantity of the ensemble, followed by the
/// checked inequalities.
pub fn leakage(e: &Ensemble, options: &ChainOptions) -> CliResult<String> {
    let report = inequality_chain_report(e, options)?;
    require_optimal(&report.barycentric, "barycentric program")?;
    require_optimal(&report.maximal, "dominating-operator program")?;
    let mut out = String::new();
    writeln!(out, "quantity,value_bits,gap_bits,status,witness").unwrap();
    let plain = [
        ("accessible_info_lower", report.accessible_lower),
        ("holevo", report.holevo),
        ("srm_povm_leakage", report.srm_leakage),
    ];
    for (name, v) in plain {
        writeln!(out, "{name},{},,,", bits(v)).unwrap();
    }
    let certified = [
        ("sandwiched_inf_mi", &report.sandwiched_inf_mi),
        ("maximal_leakage_Q", &report.maximal),
        ("barycentric_leakage_B", &report.barycentric),
        ("pairwise_leakage_R", &report.pairwise),
    ];
    for (name, c) in certified {
        writeln!(
            out,
            "{name},{},{},{:?},{}",
            bits(c.value),
            bits(c.gap),
            c.status,
            witness_text(&c.witness)
        )
        .unwrap();
    }
    writeln!(out).unwrap();
    writeln!(out, "check,lhs_bits,rhs_bits,slack_bits,holds").unwrap();
    for c in &report.checks {
        writeln!(
            out,
            "{} <= {},{},{},{},{}",
            c.lhs,
            c.rhs,
            bits(c.lhs_value),
            bits(c.rhs_value),
            bits(c.slack),
            c.holds
        )
        .unwrap();
    }
    Ok(out)
}

pub fn dp_check(doc: &DpCheckDoc) -> CliResult<String> {
    let ch = doc.channel.to_channel()?;
    let e = doc.ensemble.to_ensemble()?;
    let eps = doc.epsilon_for(&ch)?;
    let params = DpParams::new(eps, doc.delta, doc.neighbouring.to_core())?;
    let report = verify_dp_on_ensemble(&ch, &e, &params)?;
    let mut out = String::new();
    writeln!(
        out,
        "epsilon = {} nats ({} bits), delta = {}",
        fixed(report.epsilon_nats),
        bits(report.threshold_bits),
        fixed(doc.delta)
    )
    .unwrap();
    writeln!(out, "from,to,divergence_bits,passes").unwrap();
    for p in &report.pairs {
        writeln!(
            out,
            "{},{},{},{}",
            p.from,
            p.to,
            bits(p.divergence_bits),
            p.passes
        )
        .unwrap();
    }
    writeln!(
        out,
        "max_divergence_bits = {}",
        bits(report.max_divergence_bits)
    )
    .unwrap();
    writeln!(
        out,
        "result = {}",
        if report.passes { "PASS" } else { "FAIL" }
    )
    .unwrap();
    writeln!(out, "note: {}", report.note).unwrap();
    Ok(out)
}

/// Built-in model for `tradeoff` without a model file: basis encoding of every
/// index, seeded random layers, computational-basis classes.
pub fn default_model_job(d: usize, seed: u64) -> CliResult<ModelJob> {
    if !d.is_power_of_two() || !(2..=1 << qleak::vqml::MAX_QUBITS).contains(&d) {
        return Err(CliError::validation(
            "d",
            format!("must be a power of two in 2..=64, got {d}"),
        ));
    }
    let qubits = d.trailing_zeros() as usize;
    let model = VariationalModel::with_random_layers(
        qubits,
        Encoder::Basis,
        DEFAULT_MODEL_LAYERS,
        Povm::computational_basis(d),
        seed,
    )?;
    Ok(ModelJob {
        model,
        inputs: (0..d).map(ModelInput::Index).collect(),
        prior: ProbVector::uniform(d)?,
    })
}

pub fn check_p_grid(grid: &[f64]) -> CliResult<()> {
    if grid.is_empty() {
        return Err(CliError::validation("p-grid", "must not be empty"));
    }
    if let Some(p) = grid.iter().find(|&&p| !(p > 0.0 && p <= 1.0)) {
        return Err(CliError::validation(
            "p-grid",
            format!("every p must lie in (0, 1], got {p}"),
        ));
    }
    Ok(())
}

pub fn tradeoff_rows(job: &ModelJob, grid: &[f64], gap_tol: f64) -> CliResult<Vec<TradeoffRow>> {
    check_p_grid(grid)?;
    let rows: Vec<CliResult<TradeoffRow>> = grid
        .par_iter()
        .map(|&p| {
            let mut row = tradeoff_curve(&job.model, &job.inputs, &job.prior, &[p], gap_tol)?;
            Ok(row.remove(0))
        })
        .collect();
    rows.into_iter().collect()
}

pub fn tradeoff_csv(rows: &[TradeoffRow]) -> String {
    let mut out = String::from(TRADEOFF_HEADER);
    out.push('\n');
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            fixed(r.p),
            fixed(r.gamma_actual),
            fixed(r.gamma_bound),
            bits(r.leakage_b),
            bits(r.leakage_r),
            bits(r.leakage_bound)
        )
        .unwrap();
    }
    out
}

pub fn tradeoff(job: &ModelJob, grid: &[f64], gap_tol: f64) -> CliResult<String> {
    Ok(tradeoff_csv(&tradeoff_rows(job, grid, gap_tol)?))
}

pub const SWEEP_P_HEADER: &str =
    "p,leakage_B_bits,leakage_B_gap_bits,leakage_R_bits,leakage_bound_bits";
pub const SWEEP_ALPHA_HEADER: &str = "alpha,sandwiched_bits,petz_bits";

/// Leakage of the ensemble after global depolarizing noise of each strength.
pub fn sweep_p(e: &Ensemble, grid: &[f64], gap_tol: f64) -> CliResult<String> {
    check_p_grid(grid)?;
    let d = e.dim();
    let rows: Vec<CliResult<String>> = grid
        .par_iter()
        .map(|&p| {
            let out = depolarizing_global(p, d)?.apply_to_ensemble(e)?;
            let b = barycentric_leakage(&out, gap_tol)?;
            require_optimal(&b, "barycentric program")?;
            let r = pairwise_leakage(&out)?;
            let bound = dp_epsilon_bound_depolarizing(p, d)? / std::f64::consts::LN_2;
            Ok(format!(
                "{},{},{},{},{}",
                fixed(p),
                bits(b.value),
                bits(b.gap),
                bits(r.value),
                bits(bound)
            ))
        })
        .collect();
    let mut out = String::from(SWEEP_P_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row?);
        out.push('\n');
    }
    Ok(out)
}

/// Both quantum Renyi divergences between the first two states, across orders.
pub fn sweep_alpha(e: &Ensemble, grid: &[f64]) -> CliResult<String> {
    if e.len() < 2 {
        return Err(CliError::validation(
            "states",
            "the alpha sweep needs at least two states",
        ));
    }
    if grid.is_empty() {
        return Err(CliError::validation("grid", "must not be empty"));
    }
    let (rho, sigma) = (&e.states()[0], e.states()[1].operator());
    let mut out = String::from(SWEEP_ALPHA_HEADER);
    out.push('\n');
    for &a in grid {
        let order =
            RenyiOrder::new(a).map_err(|err| CliError::validation("grid", err.to_string()))?;
        let s = sandwiched_renyi(rho, sigma, order)?;
        let p = petz_renyi(rho, sigma, order)?;
        writeln!(out, "{},{},{}", fixed(a), bits(s), bits(p)).unwrap();
    }
    Ok(out)
}

pub fn basis_ensemble(n: usize) -> CliResult<Ensemble> {
    let d = 1usize << n;
    let states = (0..d)
        .map(|x| DensityOperator::basis_state(d, x))
        .collect::<qleak::Result<Vec<_>>>()?;
    Ok(Ensemble::uniform(states)?)
}

pub fn diagonal_pair() -> CliResult<Ensemble> {
    Ok(Ensemble::uniform(vec![
        DensityOperator::from_diagonal(&[0.75, 0.25])?,
        DensityOperator::from_diagonal(&[0.25, 0.75])?,
    ])?)
}

/// Built-in instances: basis encodings of 1 to 3 qubits and the diagonal pair.
pub fn demo(gap_tol: f64) -> CliResult<String> {
    let mut out = String::new();
    for n in 1..=3 {
        let e = basis_ensemble(n)?;
        let b = barycentric_leakage(&e, gap_tol)?;
        let q = max_leakage(&e, gap_tol)?;
        require_optimal(&b, "barycentric program")?;
        require_optimal(&q, "dominating-operator program")?;
        let r = pairwise_leakage(&e)?;
        writeln!(
            out,
            "basis encoding n = {n}: B = {} bits, Q = {} bits, R = {}",
            bits(b.value),
            bits(q.value),
            bits(r.value)
        )
        .unwrap();
    }
    let e = diagonal_pair()?;
    let b = barycentric_leakage(&e, gap_tol)?;
    let q = max_leakage(&e, gap_tol)?;
    let r = pairwise_leakage(&e)?;
    writeln!(
        out,
        "diagonal pair: B = {} bits, Q = {} bits, R = {} bits",
        bits(b.value),
        bits(q.value),
        bits(r.value)
    )
    .unwrap();
    Ok(out)
}

/// Ensemble documents for the demo instances, keyed by file stem.
pub fn demo_documents() -> CliResult<Vec<(String, EnsembleDoc)>> {
    let mut docs = Vec::new();
    for n in 1..=3 {
        docs.push((
            format!("basis_n{n}"),
            EnsembleDoc::from_ensemble(&basis_ensemble(n)?),
        ));
    }
    docs.push((
        "diag_pair".into(),
        EnsembleDoc::from_ensemble(&diagonal_pair()?),
    ));
    Ok(docs)
}
