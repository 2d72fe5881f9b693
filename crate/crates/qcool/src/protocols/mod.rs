//! Cooling protocols on two- and three-qubit registers.
//!
//! Four families live here, all computed by exact density-matrix algebra:
//!
//! * measurement feedback — a two-outcome measurement on qubit A followed by
//!   an outcome-conditioned rotation on qubit B ([`run_qet2`]), with the
//!   matching closed-form predictions ([`qet2_closed_forms`]);
//! * the fully unitary variant where an ancilla qubit replaces the
//!   measurement and the classical signal ([`run_qet2a`]);
//! * heat-bath algorithmic cooling: the partner-pairing algorithm
//!   ([`run_ppa`]) and the state-reset variant ([`srg2_round`]);
//! * entropy compression with and without access to the eigenbasis
//!   ([`compress_with_correlations`], [`compress_without_correlations`]).
//!
//! Every protocol is a pure function from states to states plus an energy
//! ledger; nothing holds internal state between calls.

mod compress;
mod hbac;
mod outcome;
mod povm;
mod qet2;
mod qet2a;

pub use compress::{
    compress_with_correlations, compress_without_correlations, population_sort_permutation,
};
pub use hbac::{
    bath_qubit, ppa_compression_sort, ppa_reset, ppa_thermal_config, rethermalize_pair, run_ppa,
    srg2_fixed_point, srg2_round, PpaConfig, PpaInitial, PpaRound, PpaTrace, Srg2Fixed,
};
pub use outcome::{expected_energy, Branch, ProtocolOutcome};
pub use povm::{bob_unitary, hotta_bob_rotation, povm_operators, BobRotation, PovmX};
pub use qet2::{qet2_closed_forms, run_qet2};
pub use qet2a::{coupling_unitary, qet2a_reference_purity, run_qet2a, CouplingMatrix};

/// Measurement branches with probability below this cutoff still contribute
/// their unnormalized state to the averaged output, but are omitted from the
/// per-branch list: normalizing them would divide ~0 by ~0.
pub const BRANCH_PROB_CUTOFF: f64 = 1e-14;
