//! `verify`: the cross-module invariant battery, run as a self-test.
//!
//! Hard checks print `ok`/`FAIL` and drive the exit code; the sorting
//! comparison and the transcription check of the published coupling-protocol
//! purity formula are reported (`warn`/`info`) without failing the run,
//! since both compare against claims the simulation is allowed to beat.
//!
//! `corrupt_pauli` flips the sign of the sigma_z terms fed to the
//! ground-energy check — a negative control proving the battery can fail.

use crate::Failure;
use qcool::model::{
    ancilla_hamiltonian, gibbs_state, ground_state_2q, hamiltonian_2q, hamiltonian_chain3,
    initial_metrics_b, AncillaModel, ChainModel3, TwoQubitModel,
};
use qcool::optimize::{decode_povm, verify_sort_optimality, OptimizerConfig};
use qcool::protocols::{
    compress_with_correlations, compress_without_correlations, expected_energy,
    qet2_closed_forms, qet2a_reference_purity, run_ppa, run_qet2, run_qet2a, srg2_fixed_point,
    srg2_round, BobRotation, CouplingMatrix, PovmX, PpaConfig,
};
use qcool::qcore::{embed, frobenius_distance, hermitian_eig, pauli_z, DensityMatrix, Operator};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const K_GRID: [f64; 6] = [0.0, 0.5, 1.0, 2.0, 5.0, 10.0];

pub fn cmd_verify(corrupt_pauli: bool) -> Result<(), Failure> {
    let mut failed = 0usize;
    let mut warned = 0usize;
    let mut total = 0usize;

    let mut report = |name: &str, result: Result<String, String>| {
        total += 1;
        match result {
            Ok(detail) => println!("ok   {name} — {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name} — {detail}");
            }
        }
    };

    report("ground-energy", ground_energy(corrupt_pauli));
    report("initial-metrics", initial_metrics());
    report("gibbs-energy-monotone", gibbs_energy_monotone());
    report("marginal-consistency", marginal_consistency());
    report("measurement-identities", measurement_identities());
    report("ground-closed-forms", ground_closed_forms());
    report("energy-ledger", energy_ledger());
    report("ppa-fixed-points", ppa_fixed_points());
    report("srg2-stationarity", srg2_stationarity());
    report("compression-ordering", compression_ordering());

    // reported, never failed: the printed closed-form purity for the fixed
    // coupling protocol does not track the matrix pipeline away from
    // special points, so only its deviation magnitude is shown
    for (k, beta) in [(1.0, 1.0), (5.0, 2.0)] {
        match qet2a_formula_deviation(k, beta) {
            Ok((sim, formula)) => println!(
                "info qet2a-closed-form — k/h={k} beta={beta}: simulation {sim:.12}, \
printed formula {formula:.12}, deviation {:.3e}",
                (sim - formula).abs()
            ),
            Err(e) => {
                failed += 1;
                total += 1;
                println!("FAIL qet2a-closed-form — {e}");
            }
        }
    }

    // reported as a warning on discrepancy, per the sorting claim's status
    total += 1;
    match sort_optimality() {
        Ok((sort, search)) if search <= sort + 1e-6 => println!(
            "ok   sort-optimality — unitary search {search:.12} did not beat sorting {sort:.12}"
        ),
        Ok((sort, search)) => {
            warned += 1;
            println!(
                "warn sort-optimality — unitary search {search:.12} beat sorting {sort:.12} \
by {:.3e}; claim holds only as a report",
                search - sort
            );
        }
        Err(e) => {
            failed += 1;
            println!("FAIL sort-optimality — {e}");
        }
    }

    println!("verify: {total} checks, {failed} failed, {warned} warnings");
    if failed > 0 {
        Err(Failure::Invariant(format!("{failed} verify checks failed")))
    } else {
        Ok(())
    }
}

fn lib_err(e: qcool::Error) -> String {
    format!("library call failed: {e}")
}

/// The shifted pair Hamiltonian annihilates its ground state at every
/// coupling. With `corrupt` the sigma_z sign convention is flipped first.
fn ground_energy(corrupt: bool) -> Result<String, String> {
    for k in K_GRID {
        let model = TwoQubitModel::with_unit_h(k).map_err(lib_err)?;
        let mut h = hamiltonian_2q(&model);
        if corrupt {
            let za = embed(&pauli_z(), 0, 2).map_err(lib_err)?;
            let zb = embed(&pauli_z(), 1, 2).map_err(lib_err)?;
            h = &h - &(&(&za + &zb) * (2.0 * model.h()));
        }
        let eig = hermitian_eig(&h).map_err(lib_err)?;
        let lambda0 = eig.eigenvalues[0];
        let g = ground_state_2q(&model);
        let energy = expected_energy(&g, &h).map_err(lib_err)?;
        if lambda0.abs() > 1e-10 || energy.abs() > 1e-10 {
            return Err(format!(
                "k/h={k}: lambda0={lambda0:.3e}, <g|H|g>={energy:.3e} (tolerance 1e-10)"
            ));
        }
    }
    Ok("lambda0 and <g|H|g> vanish across the k/h grid".into())
}

/// Closed-form initial purity/polarization of B vs the brute-force ground
/// marginal.
fn initial_metrics() -> Result<String, String> {
    for k in K_GRID {
        let model = TwoQubitModel::with_unit_h(k).map_err(lib_err)?;
        let (p_formula, eps_formula) = initial_metrics_b(&model);
        let marginal = ground_state_2q(&model).partial_trace(&[1]).map_err(lib_err)?;
        let p = marginal.purity();
        let eps = -marginal.polarization().map_err(lib_err)?;
        if (p - p_formula).abs() > 1e-12 || (eps - eps_formula).abs() > 1e-12 {
            return Err(format!(
                "k/h={k}: purity {p} vs {p_formula}, polarization {eps} vs {eps_formula}"
            ));
        }
    }
    Ok("ground-state B marginal matches the closed forms to 1e-12".into())
}

/// Colder Gibbs states never carry more energy.
fn gibbs_energy_monotone() -> Result<String, String> {
    let model = TwoQubitModel::with_unit_h(3.0).map_err(lib_err)?;
    let h = hamiltonian_2q(&model);
    let mut prev = f64::INFINITY;
    for i in 0..=8 {
        let beta = 0.25 * i as f64;
        let rho = gibbs_state(&h, beta).map_err(lib_err)?;
        let e = expected_energy(&rho, &h).map_err(lib_err)?;
        if e > prev + 1e-9 {
            return Err(format!("energy rose from {prev} to {e} at beta={beta}"));
        }
        prev = e;
    }
    Ok("thermal energy non-increasing over beta in [0, 2]".into())
}

fn random_density(rng: &mut ChaCha8Rng, n_qubits: usize) -> Result<DensityMatrix, String> {
    let dim = 1 << n_qubits;
    let mut g = Operator::zeros(n_qubits);
    for r in 0..dim {
        for c in 0..dim {
            g.set(r, c, num_complex::Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        }
    }
    let mut m = &g * &g.adjoint();
    m = &m + &(&Operator::identity(n_qubits) * 1e-6);
    let tr = m.trace().re;
    DensityMatrix::new(&m * (1.0 / tr)).map_err(lib_err)
}

/// Random two-qubit states: both marginals keep unit trace and a purity in
/// [1/2, 1].
fn marginal_consistency() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for draw in 0..50 {
        let rho = random_density(&mut rng, 2)?;
        for qubit in 0..2 {
            let marginal = rho.partial_trace(&[qubit]).map_err(lib_err)?;
            let trace = marginal.op().trace().re;
            let purity = marginal.purity();
            if (trace - 1.0).abs() > 1e-12 || !(0.5 - 1e-12..=1.0 + 1e-12).contains(&purity) {
                return Err(format!(
                    "draw {draw}, qubit {qubit}: trace {trace}, purity {purity}"
                ));
            }
        }
    }
    Ok("50 random states kept consistent marginals".into())
}

/// The feasible-measurement generator used by the random checks below:
/// branch weights in (0.05, 0.95), zero relative phases, cross terms
/// balanced by construction.
fn random_feasible_povm(rng: &mut ChaCha8Rng) -> Option<PovmX> {
    let p1: f64 = rng.gen_range(0.05..0.95);
    let p0 = 1.0 - p1;
    let t: f64 = rng.gen_range(0.0..std::f64::consts::PI);
    let m1 = p1.sqrt() * t.cos();
    let l1 = p1.sqrt() * t.sin();
    let two_c = -2.0 * m1 * l1;
    if two_c.abs() > p0 {
        return None;
    }
    let m0 = ((p0 + two_c).sqrt() + (p0 - two_c).sqrt()) / 2.0;
    let l0 = ((p0 + two_c).sqrt() - (p0 - two_c).sqrt()) / 2.0;
    PovmX::new([m0, m1], [l0, l1], [0.0; 2], [0.0; 2]).ok()
}

/// Projected measurement parameters always satisfy completeness and the
/// cross-term balance.
fn measurement_identities() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for draw in 0..200 {
        let x = [
            rng.gen_range(-4.0..4.0),
            rng.gen_range(-4.0..4.0),
            rng.gen_range(-4.0..4.0),
        ];
        let p = decode_povm(&x);
        let (m, l, alpha) = (p.m(), p.l(), p.alpha());
        let norm: f64 = (0..2).map(|i| m[i] * m[i] + l[i] * l[i]).sum();
        let cross: f64 = (0..2).map(|i| m[i] * l[i] * alpha[i].cos()).sum();
        if (norm - 1.0).abs() > 1e-10 || cross.abs() > 1e-10 {
            return Err(format!(
                "draw {draw} at {x:?}: norm residual {:.3e}, cross {:.3e}",
                norm - 1.0,
                cross
            ));
        }
    }
    Ok("200 decoded parameter triples satisfied both identities".into())
}

/// Measurement+feedback on the exact ground state agrees with the
/// closed-form purity and polarization.
fn ground_closed_forms() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for k in [1.0, 5.0] {
        let model = TwoQubitModel::with_unit_h(k).map_err(lib_err)?;
        let ground = ground_state_2q(&model);
        let mut done = 0;
        while done < 25 {
            let Some(p) = random_feasible_povm(&mut rng) else { continue };
            let b = BobRotation {
                omega_plus: rng.gen_range(-1.5..1.5),
                omega_minus: rng.gen_range(-1.5..1.5),
            };
            let (purity_cf, polarization_cf) = qet2_closed_forms(&model, &p, &b);
            let out = run_qet2(&ground, &model, &p, &b).map_err(lib_err)?;
            if (out.purity_b - purity_cf).abs() > 1e-10
                || (out.polarization_b - polarization_cf).abs() > 1e-10
            {
                return Err(format!(
                    "k/h={k}: purity {} vs closed form {purity_cf}, polarization {} vs {polarization_cf}",
                    out.purity_b, out.polarization_b
                ));
            }
            done += 1;
        }
    }
    Ok("50 random measurements matched the closed forms to 1e-10".into())
}

/// E(initial) + injected - extracted = E(final) on random thermal runs of
/// both protocols.
fn energy_ledger() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let mut worst: f64 = 0.0;
    for draw in 0..60 {
        let k: f64 = rng.gen_range(0.0..8.0);
        let beta: f64 = rng.gen_range(0.0..3.0);
        let model = TwoQubitModel::with_unit_h(k).map_err(lib_err)?;
        let h = hamiltonian_2q(&model);
        let rho0 = gibbs_state(&h, beta).map_err(lib_err)?;
        let Some(p) = random_feasible_povm(&mut rng) else { continue };
        let b = BobRotation {
            omega_plus: rng.gen_range(-1.5..1.5),
            omega_minus: rng.gen_range(-1.5..1.5),
        };
        let out = run_qet2(&rho0, &model, &p, &b).map_err(lib_err)?;
        let e0 = expected_energy(&rho0, &h).map_err(lib_err)?;
        let e1 = expected_energy(&out.rho_final, &h).map_err(lib_err)?;
        let gap = (e0 + out.energy_injected_a - out.energy_extracted_b - e1).abs();
        worst = worst.max(gap);
        if gap > 1e-10 {
            return Err(format!("measurement run {draw}: ledger open by {gap:.3e}"));
        }
    }
    for draw in 0..40 {
        let k: f64 = rng.gen_range(0.0..8.0);
        let beta: f64 = rng.gen_range(0.0..3.0);
        let h_an: f64 = rng.gen_range(0.2..2.0);
        let model = TwoQubitModel::with_unit_h(k).map_err(lib_err)?;
        let anc = AncillaModel::new(h_an).map_err(lib_err)?;
        let mut flat = [0.0; 9];
        let mut flat2 = [0.0; 9];
        for v in flat.iter_mut().chain(flat2.iter_mut()) {
            *v = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
        }
        let j = CouplingMatrix::from_flat(&flat).map_err(lib_err)?;
        let kc = CouplingMatrix::from_flat(&flat2).map_err(lib_err)?;
        let out = run_qet2a(&model, &anc, beta, &j, &kc).map_err(lib_err)?;
        let h3 = qcool::model::hamiltonian_with_ancilla(&model, &anc);
        let pair = gibbs_state(&hamiltonian_2q(&model), beta).map_err(lib_err)?;
        let sigma = gibbs_state(&ancilla_hamiltonian(&anc), beta).map_err(lib_err)?;
        let e0 = expected_energy(&pair.product(&sigma), &h3).map_err(lib_err)?;
        let e1 = expected_energy(&out.rho_final, &h3).map_err(lib_err)?;
        let gap = (e0 + out.energy_injected_a - out.energy_extracted_b - e1).abs();
        worst = worst.max(gap);
        if gap > 1e-10 {
            return Err(format!("coupling run {draw}: ledger open by {gap:.3e}"));
        }
    }
    Ok(format!("100 random runs closed their ledgers (worst gap {worst:.3e})"))
}

/// Two-qubit rounds hand B's polarization to the target in <= 2 rounds;
/// three-qubit rounds approach the doubled-polarization asymptote
/// monotonically.
fn ppa_fixed_points() -> Result<String, String> {
    let trace2 = run_ppa(&PpaConfig::benchmark(2, 0.3)).map_err(lib_err)?;
    let hit = trace2
        .rounds
        .iter()
        .take(2)
        .any(|r| (r.target_polarization - 0.3).abs() < 1e-10);
    if !hit || (trace2.final_polarization() - 0.3).abs() > 1e-10 {
        return Err(format!(
            "2-qubit: polarization {} after {} rounds, expected 0.3 within 2",
            trace2.final_polarization(),
            trace2.rounds.len()
        ));
    }

    let trace3 = run_ppa(&PpaConfig::benchmark(3, 0.01)).map_err(lib_err)?;
    let asymptote = 0.02;
    if (trace3.final_polarization() - asymptote).abs() > 5e-6 {
        return Err(format!(
            "3-qubit: polarization {} vs asymptote {asymptote}",
            trace3.final_polarization()
        ));
    }
    let mut prev = 0.0;
    for r in &trace3.rounds {
        if r.target_polarization < prev - 1e-12 {
            return Err(format!("3-qubit: polarization fell at round {}", r.round));
        }
        prev = r.target_polarization;
    }
    Ok(format!(
        "2-qubit hits 0.3 in <=2 rounds; 3-qubit reaches 0.02 monotonically in {} rounds",
        trace3.rounds.len()
    ))
}

/// The flip/reset iteration really is at a fixed point of B's marginal.
fn srg2_stationarity() -> Result<String, String> {
    let model = TwoQubitModel::with_unit_h(5.0).map_err(lib_err)?;
    let h = hamiltonian_2q(&model);
    let rho0 = gibbs_state(&h, 2.0).map_err(lib_err)?;
    let fixed = srg2_fixed_point(&rho0, 2.0, &h, 500, 1e-12).map_err(lib_err)?;
    if !fixed.converged {
        return Err(format!("no convergence within {} rounds", fixed.rounds));
    }
    let b_now = fixed.b_marginal().map_err(lib_err)?;
    let next = srg2_round(&fixed.state, 2.0, &h).map_err(lib_err)?;
    let b_next = next.partial_trace(&[1]).map_err(lib_err)?;
    let moved = frobenius_distance(b_now.op(), b_next.op());
    if moved > 1e-9 {
        return Err(format!("one more round moved B's marginal by {moved:.3e}"));
    }
    Ok(format!(
        "B marginal stationary to {moved:.3e} after {} rounds (purity {:.6})",
        fixed.rounds,
        b_now.purity()
    ))
}

/// Eigenbasis compression never does worse than the correlation-blind sort
/// on thermal chains, and never lowers the target purity.
fn compression_ordering() -> Result<String, String> {
    for (k, beta) in [(1.0, 1.0), (3.0, 1.0), (3.0, 2.0)] {
        let chain = ChainModel3::new(1.0, k).map_err(lib_err)?;
        let rho = gibbs_state(&hamiltonian_chain3(&chain), beta).map_err(lib_err)?;
        let initial = rho.partial_trace(&[0]).map_err(lib_err)?.purity();
        let (_, with) = compress_with_correlations(&rho, 0).map_err(lib_err)?;
        let (_, without) = compress_without_correlations(&rho, 0).map_err(lib_err)?;
        let p_with = with.partial_trace(&[0]).map_err(lib_err)?.purity();
        let p_without = without.partial_trace(&[0]).map_err(lib_err)?.purity();
        if p_with < p_without - 1e-9 || p_with < initial - 1e-9 {
            return Err(format!(
                "k/h={k}, beta={beta}: eigenbasis {p_with} vs sort {p_without}, initial {initial}"
            ));
        }
    }
    Ok("eigenbasis route dominated the correlation-blind sort at every point".into())
}

fn qet2a_formula_deviation(k: f64, beta: f64) -> Result<(f64, f64), String> {
    let model = TwoQubitModel::with_unit_h(k).map_err(lib_err)?;
    let anc = AncillaModel::new(1.0).map_err(lib_err)?;
    let j = CouplingMatrix::single(1, 1, 1.0).map_err(lib_err)?;
    let kc = CouplingMatrix::single(0, 2, 1.0).map_err(lib_err)?;
    let out = run_qet2a(&model, &anc, beta, &j, &kc).map_err(lib_err)?;
    Ok((out.purity_b, qet2a_reference_purity(&model, &anc, beta)))
}

fn sort_optimality() -> Result<(f64, f64), String> {
    let chain = ChainModel3::new(1.0, 3.0).map_err(lib_err)?;
    let rho = gibbs_state(&hamiltonian_chain3(&chain), 1.0).map_err(lib_err)?;
    let cfg = OptimizerConfig::new(2, 900, 1e-10, 11).map_err(lib_err)?;
    verify_sort_optimality(&rho, 0, &cfg).map_err(lib_err)
}
