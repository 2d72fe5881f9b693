//! Heat-bath algorithmic cooling baselines: PPA-style sort-and-reset rounds
//! and the SRΓ₂ flip-and-state-reset round, the comparison points for the
//! measurement-assisted protocols.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{
    ancilla_hamiltonian, gibbs_state, hamiltonian_2q, hamiltonian_with_ancilla, AncillaModel,
    TwoQubitModel,
};
use crate::qcore::{embed, frobenius_distance, inject, pauli_x, DensityMatrix, Operator};

use super::compress::compress_without_correlations;
use super::outcome::expected_energy;

/// Fresh bath qubit with ground polarization `epsilon`: diag((1−ε)/2, (1+ε)/2)
/// in the (excited, ground) component order used everywhere, so Tr(σ_z ρ) = −ε.
pub fn bath_qubit(epsilon: f64) -> Result<DensityMatrix> {
    if !epsilon.is_finite() || epsilon.abs() > 1.0 {
        return Err(Error::InvalidArgument(format!(
            "bath polarization must satisfy |ε| ≤ 1, got {epsilon}"
        )));
    }
    let mut op = Operator::zeros(1);
    op.set(0, 0, Complex64::new((1.0 - epsilon) / 2.0, 0.0));
    op.set(1, 1, Complex64::new((1.0 + epsilon) / 2.0, 0.0));
    DensityMatrix::new(op)
}

/// Trace out `reset_qubits` and tensor fresh [`bath_qubit`] states back into
/// their positions, severing every correlation (classical and quantum) between
/// the reset qubits and the rest.
///
/// `reset_qubits` must be non-empty, strictly increasing, and in range.
pub fn ppa_reset(
    rho: &DensityMatrix,
    reset_qubits: &[usize],
    epsilon_b: f64,
) -> Result<DensityMatrix> {
    let n = rho.n_qubits();
    if reset_qubits.is_empty() {
        return Err(Error::BadIndex("reset set must be non-empty".into()));
    }
    if reset_qubits.iter().any(|&q| q >= n) || reset_qubits.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::BadIndex(format!(
            "reset qubits must be strictly increasing and < {n}, got {reset_qubits:?}"
        )));
    }
    let bath = bath_qubit(epsilon_b)?;
    let p_excited = bath.get(0, 0).re;
    let p_ground = bath.get(1, 1).re;
    let m = reset_qubits.len();
    // The bath is diagonal, so only diagonal sub-indices of the reset register
    // survive; weight of sub-index b is the product of its per-qubit entries.
    let weight = |sub: usize| -> f64 {
        (0..m)
            .map(|j| if (sub >> (m - 1 - j)) & 1 == 0 { p_excited } else { p_ground })
            .product()
    };
    let kept: Vec<usize> = (0..n).filter(|q| !reset_qubits.contains(q)).collect();
    let mut out = Operator::zeros(n);
    if kept.is_empty() {
        for sub in 0..1usize << m {
            out.set(sub, sub, Complex64::new(weight(sub), 0.0));
        }
    } else {
        let reduced = rho.partial_trace(&kept)?;
        for kr in 0..reduced.dim() {
            let row = inject(kr, &kept, n);
            for kc in 0..reduced.dim() {
                let col = inject(kc, &kept, n);
                let v = reduced.get(kr, kc);
                for sub in 0..1usize << m {
                    let offset = inject(sub, reset_qubits, n);
                    out.set(row | offset, col | offset, v * weight(sub));
                }
            }
        }
    }
    DensityMatrix::new(out)
}

/// Correlation-blind compression step of a PPA round: permute
/// computational-basis populations into descending order across the target's
/// ground-block-first slot ordering. Off-diagonals ride along under the
/// permutation.
pub fn ppa_compression_sort(
    rho: &DensityMatrix,
    target: usize,
) -> Result<(Operator, DensityMatrix)> {
    compress_without_correlations(rho, target)
}

/// Starting state for a PPA run.
#[derive(Clone, Debug)]
pub enum PpaInitial {
    /// 𝟙/2ⁿ — the standard asymptotic-limit benchmark.
    MaximallyMixed,
    /// Explicit starting state, e.g. a product of thermal marginals.
    State(DensityMatrix),
}

/// Roles and budget for [`run_ppa`].
#[derive(Clone, Debug)]
pub struct PpaConfig {
    /// 2 or 3.
    pub n_qubits: usize,
    /// Ground polarization handed to every reset qubit. 0 is allowed (a
    /// maximally mixed bath does nothing); 1 is not — a pure bath never
    /// arises at finite temperature.
    pub epsilon_b: f64,
    pub max_rounds: usize,
    /// Convergence is declared when consecutive post-round states agree
    /// within this Frobenius distance. The target polarization alone can
    /// plateau for two rounds while populations are still moving, so the
    /// state metric is what gets tested.
    pub convergence_tol: f64,
    /// Qubit whose ground population the sort favours.
    pub target: usize,
    /// Qubits rethermalized after each sort; strictly increasing, must not
    /// contain the target.
    pub reset: Vec<usize>,
    pub initial: PpaInitial,
    /// When present, per-round energies are accumulated against this
    /// operator.
    pub hamiltonian: Option<Operator>,
}

impl PpaConfig {
    /// Textbook benchmark: cool qubit 0, reset the last qubit, start from the
    /// maximally mixed state. 200 rounds at 1e-12 state tolerance is enough
    /// for the 3-qubit asymptote, which halves its remaining gap every other
    /// round.
    pub fn benchmark(n_qubits: usize, epsilon_b: f64) -> Self {
        PpaConfig {
            n_qubits,
            epsilon_b,
            max_rounds: 200,
            convergence_tol: 1e-12,
            target: 0,
            reset: vec![n_qubits.saturating_sub(1)],
            initial: PpaInitial::MaximallyMixed,
            hamiltonian: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_qubits != 2 && self.n_qubits != 3 {
            return Err(Error::InvalidArgument(format!(
                "PPA runs on 2 or 3 qubits, got {}",
                self.n_qubits
            )));
        }
        if !self.epsilon_b.is_finite() || !(0.0..1.0).contains(&self.epsilon_b) {
            return Err(Error::InvalidArgument(format!(
                "bath polarization must lie in [0, 1), got {}",
                self.epsilon_b
            )));
        }
        if self.max_rounds == 0 {
            return Err(Error::InvalidArgument("max_rounds must be ≥ 1".into()));
        }
        if !self.convergence_tol.is_finite() || self.convergence_tol <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "convergence tolerance must be positive, got {}",
                self.convergence_tol
            )));
        }
        if self.target >= self.n_qubits {
            return Err(Error::BadIndex(format!(
                "target {} out of range for {} qubits",
                self.target, self.n_qubits
            )));
        }
        if self.reset.is_empty() {
            return Err(Error::BadIndex("reset set must be non-empty".into()));
        }
        if self.reset.iter().any(|&q| q >= self.n_qubits)
            || self.reset.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(Error::BadIndex(format!(
                "reset qubits must be strictly increasing and < {}, got {:?}",
                self.n_qubits, self.reset
            )));
        }
        if self.reset.contains(&self.target) {
            return Err(Error::InvalidArgument(format!(
                "target {} cannot be a reset qubit",
                self.target
            )));
        }
        if let PpaInitial::State(s) = &self.initial {
            if s.n_qubits() != self.n_qubits {
                return Err(Error::DimensionMismatch(format!(
                    "initial state has {} qubits, config says {}",
                    s.n_qubits(),
                    self.n_qubits
                )));
            }
        }
        if let Some(h) = &self.hamiltonian {
            if h.n_qubits() != self.n_qubits {
                return Err(Error::DimensionMismatch(format!(
                    "hamiltonian has {} qubits, config says {}",
                    h.n_qubits(),
                    self.n_qubits
                )));
            }
        }
        Ok(())
    }
}

/// One completed sort+reset round.
#[derive(Clone, Copy, Debug)]
pub struct PpaRound {
    /// 1-based round index.
    pub round: usize,
    /// Ground polarization −Tr(σ_z ρ_target) after the reset.
    pub target_polarization: f64,
    /// Frobenius distance to the previous post-round state.
    pub state_delta: f64,
}

/// Full PPA trajectory. `converged` is false when the round budget ran out
/// first; the trace is returned either way.
#[derive(Clone, Debug)]
pub struct PpaTrace {
    pub rounds: Vec<PpaRound>,
    pub final_state: DensityMatrix,
    pub converged: bool,
    pub energy_injected: f64,
    pub energy_extracted: f64,
}

impl PpaTrace {
    /// Target polarization after the last executed round.
    pub fn final_polarization(&self) -> f64 {
        self.rounds.last().map_or(0.0, |r| r.target_polarization)
    }
}

/// Iterate sort → reset from the configured initial state until consecutive
/// states agree within `convergence_tol` or the round budget is spent.
///
/// Energy bookkeeping (only meaningful when a Hamiltonian is supplied): the
/// sort is the work step, so `energy_injected` accumulates
/// E(sorted) − E(before); the reset dumps to the bath, so `energy_extracted`
/// accumulates E(sorted) − E(after reset). The ledger telescopes:
/// E(initial) + injected − extracted = E(final).
pub fn run_ppa(config: &PpaConfig) -> Result<PpaTrace> {
    config.validate()?;
    let mut state = match &config.initial {
        PpaInitial::MaximallyMixed => DensityMatrix::maximally_mixed(config.n_qubits),
        PpaInitial::State(s) => s.clone(),
    };
    let energy = |rho: &DensityMatrix| -> Result<f64> {
        match &config.hamiltonian {
            Some(h) => expected_energy(rho, h),
            None => Ok(0.0),
        }
    };
    let mut rounds = Vec::new();
    let mut converged = false;
    let mut injected = 0.0;
    let mut extracted = 0.0;
    for round in 1..=config.max_rounds {
        let e_before = energy(&state)?;
        let (_, sorted) = ppa_compression_sort(&state, config.target)?;
        let e_sorted = energy(&sorted)?;
        let after = ppa_reset(&sorted, &config.reset, config.epsilon_b)?;
        injected += e_sorted - e_before;
        extracted += e_sorted - energy(&after)?;
        let state_delta = frobenius_distance(after.op(), state.op());
        rounds.push(PpaRound {
            round,
            target_polarization: ground_polarization(&after, config.target)?,
            state_delta,
        });
        state = after;
        if state_delta < config.convergence_tol {
            converged = true;
            break;
        }
    }
    Ok(PpaTrace {
        rounds,
        final_state: state,
        converged,
        energy_injected: injected,
        energy_extracted: extracted,
    })
}

/// PPA configured to play against the measurement-assisted protocols on their
/// own thermal footing: every qubit starts in its own Gibbs marginal, B
/// (qubit 1) is the cooling target, and A (qubit 0) is the bath contact with
/// ε_b equal to A's thermal ground polarization. With `n_qubits = 3` the
/// ancilla rides along as a third sort qubit (never reset); `anc` is required
/// there and rejected for the pair case.
pub fn ppa_thermal_config(
    model: &TwoQubitModel,
    anc: Option<&AncillaModel>,
    beta: f64,
    n_qubits: usize,
    max_rounds: usize,
    convergence_tol: f64,
) -> Result<PpaConfig> {
    let pair = gibbs_state(&hamiltonian_2q(model), beta)?;
    let sigma_a = pair.partial_trace(&[0])?;
    let sigma_b = pair.partial_trace(&[1])?;
    let epsilon_b = -sigma_a.polarization()?;
    let (initial, hamiltonian) = match (n_qubits, anc) {
        (2, None) => (sigma_a.product(&sigma_b), hamiltonian_2q(model)),
        (3, Some(anc)) => {
            let sigma_anc = gibbs_state(&ancilla_hamiltonian(anc), beta)?;
            (
                sigma_a.product(&sigma_b).product(&sigma_anc),
                hamiltonian_with_ancilla(model, anc),
            )
        }
        (2, Some(_)) => {
            return Err(Error::InvalidArgument(
                "ancilla model given for a 2-qubit PPA".into(),
            ));
        }
        (3, None) => {
            return Err(Error::InvalidArgument(
                "3-qubit thermal PPA needs an ancilla model".into(),
            ));
        }
        _ => {
            return Err(Error::InvalidArgument(format!(
                "PPA runs on 2 or 3 qubits, got {n_qubits}"
            )));
        }
    };
    Ok(PpaConfig {
        n_qubits,
        epsilon_b,
        max_rounds,
        convergence_tol,
        target: 1,
        reset: vec![0],
        initial: PpaInitial::State(initial),
        hamiltonian: Some(hamiltonian),
    })
}

/// Replace the pair state by the product of its two Gibbs marginals — what
/// plain bath contact achieves, and the do-nothing baseline every cooling
/// protocol has to beat.
pub fn rethermalize_pair(model: &TwoQubitModel, beta: f64) -> Result<DensityMatrix> {
    let gibbs = gibbs_state(&hamiltonian_2q(model), beta)?;
    let a = gibbs.partial_trace(&[0])?;
    let b = gibbs.partial_trace(&[1])?;
    Ok(a.product(&b))
}

/// −Tr(σ_z ρ_q): positive when qubit `q` leans toward its ground state.
fn ground_polarization(rho: &DensityMatrix, qubit: usize) -> Result<f64> {
    Ok(-rho.partial_trace(&[qubit])?.polarization()?)
}

/// One SRΓ₂ round: σ_x on A, then a state reset of the {|00⟩, |11⟩} sector.
/// The two sector populations are pooled and redistributed with the bath's
/// Gibbs weights for those two levels — the diagonal entries of
/// `gibbs_state(h, beta_bath)` at |00⟩ and |11⟩, so an interacting `h` gives
/// interaction-aware weights — and the sector's internal coherence is erased.
///
/// Coherences between the sector and its {|01⟩, |10⟩} complement are erased
/// as well. Leaving them in place would not be a completely positive map: a
/// pure (|00⟩ + |01⟩)/√2 input would come out with a negative eigenvalue.
/// States the protocol actually reaches never carry such cross terms (thermal
/// states hold coherence only inside the two sectors and the flip maps sector
/// to sector), so on-protocol trajectories are unaffected.
pub fn srg2_round(rho: &DensityMatrix, beta_bath: f64, h: &Operator) -> Result<DensityMatrix> {
    srg2_reset(&srg2_flip(rho)?, beta_bath, h)
}

fn srg2_flip(rho: &DensityMatrix) -> Result<DensityMatrix> {
    if rho.n_qubits() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "SRΓ₂ acts on 2 qubits, state has {}",
            rho.n_qubits()
        )));
    }
    rho.evolve(&embed(&pauli_x(), 0, 2)?)
}

fn srg2_reset(rho: &DensityMatrix, beta_bath: f64, h: &Operator) -> Result<DensityMatrix> {
    if rho.n_qubits() != 2 || h.n_qubits() != 2 {
        return Err(Error::DimensionMismatch(
            "SRΓ₂ reset needs a 2-qubit state and Hamiltonian".into(),
        ));
    }
    let gibbs = gibbs_state(h, beta_bath)?;
    // Component 0 is |11⟩ and component 3 is |00⟩.
    let w11 = gibbs.get(0, 0).re;
    let w00 = gibbs.get(3, 3).re;
    let pool = rho.get(0, 0).re + rho.get(3, 3).re;
    let erased = [
        (0, 3),
        (3, 0),
        (0, 1),
        (1, 0),
        (0, 2),
        (2, 0),
        (1, 3),
        (3, 1),
        (2, 3),
        (3, 2),
    ];
    let mut out = rho.op().clone();
    for (r, c) in erased {
        out.set(r, c, Complex64::new(0.0, 0.0));
    }
    out.set(0, 0, Complex64::new(pool * w11 / (w00 + w11), 0.0));
    out.set(3, 3, Complex64::new(pool * w00 / (w00 + w11), 0.0));
    DensityMatrix::new(out)
}

/// Outcome of iterating [`srg2_round`] to the unmeasured qubit's fixed point.
#[derive(Clone, Debug)]
pub struct Srg2Fixed {
    /// State after the last executed round. The global state generically keeps
    /// two-cycling (the flip exchanges the two sector masses each round); only
    /// B's marginal settles.
    pub state: DensityMatrix,
    pub rounds: usize,
    pub converged: bool,
    pub energy_injected: f64,
    pub energy_extracted: f64,
}

impl Srg2Fixed {
    /// Marginal of qubit B, the quantity the iteration drives to a fixed
    /// point.
    pub fn b_marginal(&self) -> Result<DensityMatrix> {
        self.state.partial_trace(&[1])
    }
}

/// Iterate flip+reset rounds until B's marginal stops moving.
///
/// Convergence is defined on the B marginal deliberately: the full state
/// two-cycles forever from generic starts, while B's reduced state is exactly
/// stationary from the second round on.
///
/// The flip is the work step (`energy_injected` accumulates its cost against
/// `h`); the sector reset exchanges the rest with the bath
/// (`energy_extracted`, positive when energy leaves the pair), so
/// E(initial) + injected − extracted = E(final).
pub fn srg2_fixed_point(
    rho0: &DensityMatrix,
    beta_bath: f64,
    h: &Operator,
    max_rounds: usize,
    tol: f64,
) -> Result<Srg2Fixed> {
    if max_rounds == 0 {
        return Err(Error::InvalidArgument("max_rounds must be ≥ 1".into()));
    }
    if !tol.is_finite() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let mut state = rho0.clone();
    let mut prev_b = state.partial_trace(&[1])?;
    let mut injected = 0.0;
    let mut extracted = 0.0;
    let mut rounds = 0;
    let mut converged = false;
    while rounds < max_rounds {
        let e_before = expected_energy(&state, h)?;
        let flipped = srg2_flip(&state)?;
        let e_flipped = expected_energy(&flipped, h)?;
        state = srg2_reset(&flipped, beta_bath, h)?;
        injected += e_flipped - e_before;
        extracted += e_flipped - expected_energy(&state, h)?;
        rounds += 1;
        let b = state.partial_trace(&[1])?;
        let delta = frobenius_distance(b.op(), prev_b.op());
        prev_b = b;
        if delta < tol {
            converged = true;
            break;
        }
    }
    Ok(Srg2Fixed {
        state,
        rounds,
        converged,
        energy_injected: injected,
        energy_extracted: extracted,
    })
}
