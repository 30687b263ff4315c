//! Replicator dynamics for candidate positioning in plurality elections.
//!
//! Each generation runs many independent elections; candidates in the next
//! generation copy the positions of this generation's winners. The crate
//! provides the election mechanics, the Monte Carlo engine with its variants
//! (uniform noise, perturbation, memory, top-h copying, mixed candidate
//! counts), closed-form bounds and iterated maps for the same dynamics, an
//! equilibrium checker for the one-shot positioning game, and the file
//! formats used by the `replicator` command-line tool.

pub mod distributions;
pub mod election;
pub mod equilibria;
pub mod error;
pub mod engine;
pub mod io;
pub mod rng;
pub mod theory;

pub use distributions::{
    histogram, histogram_modes, folded_mode, pool_sample, Atom, EmpiricalStats,
    InitialDistribution, VoterModel, WinnerPool,
};
pub use election::{
    plurality_winner, top_h_by_share, vote_shares, Ballot, Position, ShareVector, Slate,
    TieBreakRule, SHARE_TIE_TOL,
};
pub use equilibria::{
    atom_seeded_convergence, is_psne, is_two_spike_smsne, left_right_catalog, paired_profile,
    payoff, AtomSeed, Deviation, Payoff, Profile, PsneVerdict, SmsneVerdict,
};
pub use error::{Error, Result};
pub use io::{
    bounds_command, bounds_table, emit_trajectory, heatmap_cell, heatmap_command, map_report,
    parse_config, parse_config_str, BoundKind, BoundRow, ConfigOverrides, EcdfTable, HeatmapRow,
    HeatmapSpec, MapReport, RunManifest,
};
pub use rng::CounterRng;
pub use engine::{
    aggregate, run_experiment, run_trial, AggregateSummary, GenerationRecord, GenerationSummary,
    KShare, Simulation, SimulationConfig, Trajectory,
};
pub use theory::{
    cdf_bound, density_ratio, fixed_points, iterate_map, k4_noisy_beta, limited_support_threshold,
    Bound, FixedPoint, IteratedMap, Stability,
};
