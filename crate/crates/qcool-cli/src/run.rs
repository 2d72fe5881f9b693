//! Grid evaluation for `sweep` and `compare`.
//!
//! Grid points run concurrently but the row order is a pure function of the
//! spec: k/h values in the order given, the beta grid inside each, methods
//! innermost for compare. Per-point optimizer seeds derive from the base
//! seed and the flat grid index, never from scheduling, so output bytes are
//! reproducible run to run.

use crate::rows::SweepRow;
use crate::spec::{Format, PovmMode, PpaInit, Protocol, Style, SweepSpec};
use crate::svg::{self, Series};
use crate::{rows, Failure};
use qcool::model::{
    ancilla_hamiltonian, gibbs_state, ground_state_2q, hamiltonian_2q, hamiltonian_chain3,
    AncillaModel, ChainModel3, TwoQubitModel,
};
use qcool::optimize::{decode_povm, optimize_qet2_gibbs, optimize_qet2a, OptimizerConfig};
use qcool::protocols::{
    compress_with_correlations, expected_energy, hotta_bob_rotation, ppa_thermal_config,
    rethermalize_pair, run_ppa, run_qet2, run_qet2a, srg2_fixed_point, BobRotation,
    CouplingMatrix, PovmX, PpaConfig, PpaInitial,
};
use qcool::qcore::DensityMatrix;
use rayon::prelude::*;
use serde_json::json;
use std::f64::consts::FRAC_PI_4;

/// Evaluation budget per restart and the spread tolerance; the restart
/// count is the user's knob.
const MAX_EVALS: usize = 400;
const FTOL: f64 = 1e-10;

fn point_seed(base: u64, flat_index: u64) -> u64 {
    base ^ flat_index.wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn optimizer(spec: &SweepSpec, flat_index: u64) -> Result<OptimizerConfig, Failure> {
    OptimizerConfig::new(spec.restarts, MAX_EVALS, FTOL, point_seed(spec.seed, flat_index))
        .map_err(|e| Failure::Spec(e.to_string()))
}

fn invariant(protocol: &str, k: f64, beta: f64, e: impl std::fmt::Display) -> Failure {
    Failure::Invariant(format!("{protocol} at k/h={k}, beta={beta}: {e}"))
}

/// The measurement whose two operators each sit exactly `min_frobenius`
/// from their projective counterparts: hold the branch split at 1/2 and
/// move the amplitude angles by tau with cos(tau) = 1 - d^2/2 (a chord of
/// the unit circle the operators live on). The hair above 1 keeps the
/// decoded point on the feasible side of the constraint at distance d.
fn boundary_povm(min_frobenius: f64) -> PovmX {
    let d = min_frobenius * (1.0 + 1e-9);
    let tau = (1.0 - d * d / 2.0).clamp(-1.0, 1.0).acos();
    decode_povm(&[FRAC_PI_4, FRAC_PI_4 - tau, tau - FRAC_PI_4])
}

struct Metrics {
    purity: f64,
    polarization: f64,
}

fn qubit_metrics(dm: &DensityMatrix, qubit: usize) -> Result<Metrics, qcool::Error> {
    let marginal = dm.partial_trace(&[qubit])?;
    Ok(Metrics { purity: marginal.purity(), polarization: -marginal.polarization()? })
}

#[allow(clippy::too_many_arguments)]
fn row(
    protocol: &str,
    k: f64,
    beta: f64,
    initial: Metrics,
    final_: Metrics,
    energy_injected: f64,
    energy_extracted: f64,
    optimizer_evals: usize,
    params_json: String,
) -> SweepRow {
    SweepRow {
        method: None,
        protocol: protocol.into(),
        k_over_h: k,
        beta,
        purity_initial: initial.purity,
        purity_final: final_.purity,
        polarization_initial: initial.polarization,
        polarization_final: final_.polarization,
        energy_injected,
        energy_extracted,
        optimizer_evals,
        params_json,
    }
}

pub fn cmd_sweep(protocol: Protocol, spec: &SweepSpec) -> Result<(), Failure> {
    let betas = spec.betas();
    let grid: Vec<(u64, f64, f64)> = spec
        .k_over_h
        .iter()
        .flat_map(|&k| betas.iter().map(move |&b| (k, b)))
        .enumerate()
        .map(|(i, (k, b))| (i as u64, k, b))
        .collect();

    let computed: Result<Vec<SweepRow>, Failure> = grid
        .par_iter()
        .map(|&(idx, k, beta)| sweep_row(protocol, spec, idx, k, beta))
        .collect();
    let rows = computed?;

    for r in &rows {
        r.validate().map_err(Failure::Invariant)?;
    }

    let series = sweep_series(spec, &rows);
    let title = format!("{} final purity vs beta", protocol.name());
    emit(spec, &rows, false, &series, &title)
}

fn sweep_row(
    protocol: Protocol,
    spec: &SweepSpec,
    idx: u64,
    k: f64,
    beta: f64,
) -> Result<SweepRow, Failure> {
    match protocol {
        Protocol::Qet2Ground => ground_row(spec, k, beta),
        Protocol::Qet2Gibbs => gibbs_row(spec, idx, k, beta),
        Protocol::Qet2a => qet2a_row(spec, idx, k, beta),
        Protocol::Ppa => ppa_row(spec, k, beta),
        Protocol::Srg2 => srg2_row(spec, k, beta),
        Protocol::Compress => compress_row(spec, k, beta),
    }
}

/// Yield-optimal feedback on the exact ground state — closed-form angles,
/// no search.
fn ground_row(spec: &SweepSpec, k: f64, beta: f64) -> Result<SweepRow, Failure> {
    let name = Protocol::Qet2Ground.name();
    let fail = |e: qcool::Error| invariant(name, k, beta, e);
    let model = TwoQubitModel::new(spec.h, k * spec.h).map_err(fail)?;
    let rho0 = ground_state_2q(&model);
    let povm = match spec.povm_mode {
        PovmMode::Projective => PovmX::projective_x(),
        PovmMode::Nonprojective => boundary_povm(spec.min_frobenius),
    };
    let b = hotta_bob_rotation(&model, &povm).map_err(fail)?;
    let out = run_qet2(&rho0, &model, &povm, &b).map_err(fail)?;
    let initial = qubit_metrics(&rho0, 1).map_err(fail)?;
    let final_ = Metrics { purity: out.purity_b, polarization: -out.polarization_b };
    let params = json!({
        "m": povm.m(),
        "l": povm.l(),
        "omega_plus": b.omega_plus,
        "omega_minus": b.omega_minus,
    });
    Ok(row(
        name,
        k,
        beta,
        initial,
        final_,
        out.energy_injected_a,
        out.energy_extracted_b,
        0,
        params.to_string(),
    ))
}

fn decode_best(params: &[f64], projective: bool) -> (PovmX, BobRotation) {
    if projective {
        (
            PovmX::projective_x(),
            BobRotation { omega_plus: params[0], omega_minus: params[1] },
        )
    } else {
        (
            decode_povm(&[params[0], params[1], params[2]]),
            BobRotation { omega_plus: params[3], omega_minus: params[4] },
        )
    }
}

/// Optimized measurement+feedback on the thermal pair.
fn gibbs_row(spec: &SweepSpec, idx: u64, k: f64, beta: f64) -> Result<SweepRow, Failure> {
    let name = Protocol::Qet2Gibbs.name();
    let fail = |e: qcool::Error| invariant(name, k, beta, e);
    let model = TwoQubitModel::new(spec.h, k * spec.h).map_err(fail)?;
    let projective = spec.povm_mode == PovmMode::Projective;
    let cfg = optimizer(spec, idx)?;
    let report = optimize_qet2_gibbs(&model, beta, projective, spec.min_frobenius, &cfg)
        .map_err(fail)?;
    if !report.best_value.is_finite() {
        return Err(invariant(
            name,
            k,
            beta,
            format!("no feasible measurement at min-frobenius {}", spec.min_frobenius),
        ));
    }

    let rho0 = gibbs_state(&hamiltonian_2q(&model), beta).map_err(fail)?;
    let (povm, b) = decode_best(&report.best_params, projective);
    let out = run_qet2(&rho0, &model, &povm, &b).map_err(fail)?;
    if (out.purity_b - report.best_value).abs() > 1e-9 {
        return Err(invariant(
            name,
            k,
            beta,
            format!(
                "replayed optimum {} disagrees with search value {}",
                out.purity_b, report.best_value
            ),
        ));
    }

    let initial = qubit_metrics(&rho0, 1).map_err(fail)?;
    let final_ = Metrics { purity: out.purity_b, polarization: -out.polarization_b };
    Ok(row(
        name,
        k,
        beta,
        initial,
        final_,
        out.energy_injected_a,
        out.energy_extracted_b,
        report.evals_used,
        report.params_json,
    ))
}

/// Optimized coupling matrices against the thermal pair + ancilla.
fn qet2a_row(spec: &SweepSpec, idx: u64, k: f64, beta: f64) -> Result<SweepRow, Failure> {
    let name = Protocol::Qet2a.name();
    let fail = |e: qcool::Error| invariant(name, k, beta, e);
    let model = TwoQubitModel::new(spec.h, k * spec.h).map_err(fail)?;
    let anc = AncillaModel::new(spec.h_an).map_err(fail)?;
    let cfg = optimizer(spec, idx)?;
    let report = optimize_qet2a(&model, &anc, beta, &cfg).map_err(fail)?;
    if !report.best_value.is_finite() {
        return Err(invariant(name, k, beta, "coupling search found no finite value"));
    }

    let j = CouplingMatrix::from_flat(&report.best_params[0..9]).map_err(fail)?;
    let kc = CouplingMatrix::from_flat(&report.best_params[9..18]).map_err(fail)?;
    let out = run_qet2a(&model, &anc, beta, &j, &kc).map_err(fail)?;
    if (out.purity_b - report.best_value).abs() > 1e-9 {
        return Err(invariant(
            name,
            k,
            beta,
            format!(
                "replayed optimum {} disagrees with search value {}",
                out.purity_b, report.best_value
            ),
        ));
    }

    let rho_pair = gibbs_state(&hamiltonian_2q(&model), beta).map_err(fail)?;
    let initial = qubit_metrics(&rho_pair, 1).map_err(fail)?;
    let final_ = Metrics { purity: out.purity_b, polarization: -out.polarization_b };
    Ok(row(
        name,
        k,
        beta,
        initial,
        final_,
        out.energy_injected_a,
        out.energy_extracted_b,
        report.evals_used,
        report.params_json,
    ))
}

/// Sort/reset rounds to the fixed point. `mixed` starts from the textbook
/// maximally mixed register (beta plays no role), `gibbs` from the thermal
/// marginals of the interacting pair.
fn ppa_row(spec: &SweepSpec, k: f64, beta: f64) -> Result<SweepRow, Failure> {
    let name = Protocol::Ppa.name();
    let fail = |e: qcool::Error| invariant(name, k, beta, e);
    let (config, init_name) = match spec.ppa_init {
        PpaInit::Mixed => (PpaConfig::benchmark(spec.n, spec.epsilon_b), "mixed"),
        PpaInit::Gibbs => {
            let model = TwoQubitModel::new(spec.h, k * spec.h).map_err(fail)?;
            let anc = AncillaModel::new(spec.h_an).map_err(fail)?;
            let anc_ref = (spec.n == 3).then_some(&anc);
            (
                ppa_thermal_config(&model, anc_ref, beta, spec.n, 200, 1e-12).map_err(fail)?,
                "gibbs",
            )
        }
    };
    let initial_state = match &config.initial {
        PpaInitial::MaximallyMixed => DensityMatrix::maximally_mixed(config.n_qubits),
        PpaInitial::State(s) => s.clone(),
    };
    let trace = run_ppa(&config).map_err(fail)?;
    let initial = qubit_metrics(&initial_state, config.target).map_err(fail)?;
    let final_ = qubit_metrics(&trace.final_state, config.target).map_err(fail)?;
    let params = json!({
        "n": config.n_qubits,
        "init": init_name,
        "epsilon_b": config.epsilon_b,
        "target": config.target,
        "rounds": trace.rounds.len(),
        "converged": trace.converged,
    });
    Ok(row(
        name,
        k,
        beta,
        initial,
        final_,
        trace.energy_injected,
        trace.energy_extracted,
        0,
        params.to_string(),
    ))
}

/// Flip/reset rounds iterated to B's stationary marginal.
fn srg2_row(spec: &SweepSpec, k: f64, beta: f64) -> Result<SweepRow, Failure> {
    let name = Protocol::Srg2.name();
    let fail = |e: qcool::Error| invariant(name, k, beta, e);
    let model = TwoQubitModel::new(spec.h, k * spec.h).map_err(fail)?;
    let h2 = hamiltonian_2q(&model);
    let rho0 = gibbs_state(&h2, beta).map_err(fail)?;
    let fixed = srg2_fixed_point(&rho0, beta, &h2, 500, 1e-12).map_err(fail)?;
    let initial = qubit_metrics(&rho0, 1).map_err(fail)?;
    let final_dm = fixed.b_marginal().map_err(fail)?;
    let final_ = Metrics {
        purity: final_dm.purity(),
        polarization: -final_dm.polarization().map_err(fail)?,
    };
    let params = json!({ "rounds": fixed.rounds, "converged": fixed.converged });
    Ok(row(
        name,
        k,
        beta,
        initial,
        final_,
        fixed.energy_injected,
        fixed.energy_extracted,
        0,
        params.to_string(),
    ))
}

/// Eigenbasis compression of the thermal three-qubit chain onto its end
/// qubit. Unitary, so the energy change is pure work input.
fn compress_row(spec: &SweepSpec, k: f64, beta: f64) -> Result<SweepRow, Failure> {
    let name = Protocol::Compress.name();
    let fail = |e: qcool::Error| invariant(name, k, beta, e);
    let chain = ChainModel3::new(spec.h, k * spec.h).map_err(fail)?;
    let hc = hamiltonian_chain3(&chain);
    let rho0 = gibbs_state(&hc, beta).map_err(fail)?;
    let (_, rho1) = compress_with_correlations(&rho0, 0).map_err(fail)?;
    let initial = qubit_metrics(&rho0, 0).map_err(fail)?;
    let final_ = qubit_metrics(&rho1, 0).map_err(fail)?;
    let e0 = expected_energy(&rho0, &hc).map_err(fail)?;
    let e1 = expected_energy(&rho1, &hc).map_err(fail)?;
    let params = json!({ "target": 0, "n": 3 });
    Ok(row(name, k, beta, initial, final_, e1 - e0, 0.0, 0, params.to_string()))
}

const PAIR_METHODS: [&str; 5] =
    ["initial", "qet2-projective", "qet2-nonprojective", "srg2", "retherm"];
const ANCILLA_METHODS: [&str; 4] = ["initial-b", "initial-ancilla", "qet2a", "ppa-3"];

pub fn cmd_compare(style: Style, spec: &SweepSpec) -> Result<(), Failure> {
    let methods: &[&str] = match style {
        Style::Pair => &PAIR_METHODS,
        Style::Ancilla => &ANCILLA_METHODS,
    };
    let betas = spec.betas();
    let grid: Vec<(u64, f64, f64, &str)> = spec
        .k_over_h
        .iter()
        .flat_map(|&k| betas.iter().map(move |&b| (k, b)))
        .flat_map(|(k, b)| methods.iter().map(move |&m| (k, b, m)))
        .enumerate()
        .map(|(i, (k, b, m))| (i as u64, k, b, m))
        .collect();

    let computed: Result<Vec<SweepRow>, Failure> = grid
        .par_iter()
        .map(|&(idx, k, beta, method)| compare_row(spec, idx, k, beta, method))
        .collect();
    let rows = computed?;

    for r in &rows {
        r.validate().map_err(Failure::Invariant)?;
    }

    let series = compare_series(spec, methods, &rows);
    let title = format!("method comparison ({})", style.name());
    emit(spec, &rows, true, &series, &title)
}

fn compare_row(
    spec: &SweepSpec,
    idx: u64,
    k: f64,
    beta: f64,
    method: &str,
) -> Result<SweepRow, Failure> {
    let fail = |e: qcool::Error| invariant(method, k, beta, e);
    let mut r = match method {
        "initial" | "initial-b" => {
            let model = TwoQubitModel::new(spec.h, k * spec.h).map_err(fail)?;
            let rho0 = gibbs_state(&hamiltonian_2q(&model), beta).map_err(fail)?;
            let m0 = qubit_metrics(&rho0, 1).map_err(fail)?;
            let m1 = qubit_metrics(&rho0, 1).map_err(fail)?;
            row("initial", k, beta, m0, m1, 0.0, 0.0, 0, "{}".into())
        }
        "initial-ancilla" => {
            let anc = AncillaModel::new(spec.h_an).map_err(fail)?;
            let sigma = gibbs_state(&ancilla_hamiltonian(&anc), beta).map_err(fail)?;
            let m = Metrics {
                purity: sigma.purity(),
                polarization: -sigma.polarization().map_err(fail)?,
            };
            let m1 = Metrics { purity: m.purity, polarization: m.polarization };
            row("initial", k, beta, m, m1, 0.0, 0.0, 0, "{}".into())
        }
        "qet2-projective" => {
            let mut forced = spec.clone();
            forced.povm_mode = PovmMode::Projective;
            gibbs_row(&forced, idx, k, beta)?
        }
        "qet2-nonprojective" => {
            let mut forced = spec.clone();
            forced.povm_mode = PovmMode::Nonprojective;
            gibbs_row(&forced, idx, k, beta)?
        }
        "srg2" => srg2_row(spec, k, beta)?,
        "retherm" => {
            let model = TwoQubitModel::new(spec.h, k * spec.h).map_err(fail)?;
            let h2 = hamiltonian_2q(&model);
            let rho0 = gibbs_state(&h2, beta).map_err(fail)?;
            let rho1 = rethermalize_pair(&model, beta).map_err(fail)?;
            let initial = qubit_metrics(&rho0, 1).map_err(fail)?;
            let final_ = qubit_metrics(&rho1, 1).map_err(fail)?;
            let e0 = expected_energy(&rho0, &h2).map_err(fail)?;
            let e1 = expected_energy(&rho1, &h2).map_err(fail)?;
            row("retherm", k, beta, initial, final_, 0.0, e0 - e1, 0, "{}".into())
        }
        "qet2a" => qet2a_row(spec, idx, k, beta)?,
        "ppa-3" => {
            let mut forced = spec.clone();
            forced.n = 3;
            forced.ppa_init = PpaInit::Gibbs;
            ppa_row(&forced, k, beta)?
        }
        other => return Err(Failure::Spec(format!("unknown compare method `{other}`"))),
    };
    r.method = Some(method.into());
    Ok(r)
}

fn short_k(k: f64) -> String {
    format!("{k}")
}

/// Sweep chart: per k/h value, a solid final-purity line and a dashed
/// initial-purity baseline.
fn sweep_series(spec: &SweepSpec, rows: &[SweepRow]) -> Vec<Series> {
    let mut series = Vec::new();
    for &k in &spec.k_over_h {
        let of_k: Vec<&SweepRow> = rows.iter().filter(|r| r.k_over_h == k).collect();
        series.push(Series {
            label: format!("k/h={} final", short_k(k)),
            dashed: false,
            points: of_k.iter().map(|r| (r.beta, r.purity_final)).collect(),
        });
        series.push(Series {
            label: format!("k/h={} initial", short_k(k)),
            dashed: true,
            points: of_k.iter().map(|r| (r.beta, r.purity_initial)).collect(),
        });
    }
    series
}

/// Compare chart: one line per (method, k/h); initial baselines dashed.
fn compare_series(spec: &SweepSpec, methods: &[&str], rows: &[SweepRow]) -> Vec<Series> {
    let mut series = Vec::new();
    for &k in &spec.k_over_h {
        for &method in methods {
            let points: Vec<(f64, f64)> = rows
                .iter()
                .filter(|r| r.k_over_h == k && r.method.as_deref() == Some(method))
                .map(|r| (r.beta, r.purity_final))
                .collect();
            let label = if spec.k_over_h.len() == 1 {
                method.to_string()
            } else {
                format!("{method} k/h={}", short_k(k))
            };
            series.push(Series { label, dashed: method.starts_with("initial"), points });
        }
    }
    series
}

fn emit(
    spec: &SweepSpec,
    rows: &[SweepRow],
    with_method: bool,
    series: &[Series],
    title: &str,
) -> Result<(), Failure> {
    for &format in &spec.formats {
        let path = spec.path_for(format);
        let content = match format {
            Format::Csv => rows::to_csv(rows, with_method),
            Format::Json => rows::to_json(rows),
            Format::Svg => svg::render_chart(title, "beta", "purity", series),
        };
        std::fs::write(&path, content)
            .map_err(|e| Failure::Io(format!("writing {}: {e}", path.display())))?;
        println!("wrote {} ({} rows)", path.display(), rows.len());
    }
    Ok(())
}
