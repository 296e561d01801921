//! Truncated Fock-basis oracle.
//!
//! Builds the hypothesis states as explicit density operators, recomputes
//! receiver moments from them, and evaluates `Q_s = Tr[ρ₀ˢ ρ₁¹⁻ˢ]` and the
//! quantum Chernoff bound.

pub mod channel;
pub mod operator;
pub mod qcb;
pub mod states;
pub mod truncation;
pub mod unitary;

pub use channel::{
    channel_output_fock, coherent_output_fock, conjugate_idler_fock, fock_moments, pc_moment_check, ChannelDims,
    FockMoments, PcMomentCheck, PcMoments,
};
pub use operator::{Block, FockOperator, Ladder};
pub use qcb::{qcb, qs_overlap, scenario_qcb, QcbLevel, QcbResult, QsWorkspace, ScenarioQcb, Transmitter};
pub use states::{thermal_fock, tmsv_fock};
pub use truncation::TruncationSpec;
pub use unitary::{beamsplitter_fock, displacement_fock, two_mode_squeezer_fock};
