//! Round-by-round simulation of two-party protocols on purified classical
//! inputs, and the cost measures read off the resulting states.

mod compose;
mod protocol;
mod run;
mod search;

pub use compose::{
    convex_mix, map_outputs, marginals, parallel, parallel_many, repeat_disjointness, repeat_n,
    Split,
};
pub use protocol::{Party, ProtocolSpec, Roles, Round, RoundView, Schedule, R1, R2};
pub use run::{
    avg_error, embed_input, embed_input_into, output_table, qcc, qic, report, round_term, run,
    worst_case_error, OutputTable, QicReport, RoundTerm, Snapshot, TaskSpec, Transcript,
};
pub use search::{qic_sup_over_prior, simplex_grid, GRID_LIMIT};
