//! Games of infinite duration on graphs with finitely or infinitely many
//! priorities.
//!
//! The crate evaluates winning conditions on ultimately periodic plays,
//! solves finite parity games with two independent algorithms, classifies
//! Muller conditions by their closure properties and Zielonka-path shape,
//! reduces path-shaped Muller conditions to parity, extracts positional
//! strategies from finite-memory winning strategies via signature-minimal
//! occurrences, and generates the counterexample families showing where
//! finite memory fails.
//!
//! Start with the runnable examples: each major capability has one under
//! `examples/`.

pub mod arena;
pub mod cli;
pub mod conditions;
pub mod counterexamples;
pub mod io;
pub mod positionalize;
pub mod random;
pub mod solvers;
pub mod strategy;
pub mod zielonka;

pub use arena::{
    Arena, ArenaError, ChainDescriptor, Family, FlowerVariant, GeneratedArena, Player, Priority,
    VertexId,
};
pub use conditions::{
    member, member_descriptor, winner_of_lasso, winner_of_scheduled, ConditionError, ConditionSpec,
    ExplicitMuller, ScheduledPlay, SetDescriptor, SingletonLimit, ZielonkaPathSpec,
};
pub use positionalize::{
    compute_alpha, compute_beta, positionalize, signatures, PositionalizeError, SignatureOrder,
    Stage, StageKind, StageTable,
};
pub use solvers::{
    attractor, lar_reduce, solve_muller, solve_parity_recursive, solve_parity_spm,
    verify_positional, MullerSolution, MullerStrategies, ProgressMeasure, SolveError, SolveResult,
    VerifyOutcome,
};
pub use strategy::{
    induced_lasso, product_with_memory, Lasso, MemoryStrategy, PositionalStrategy, Strategy,
    StrategyProduct,
};
pub use zielonka::{
    build_tree, check_chains, check_p0, classify, is_path_of_cofinite, reduce_to_parity,
    validate_chain_witness, verify_reduction, AlphaKind, ChainVerdict, ChainWitness,
    ClassificationReport, Reduction, SplitVerdict, TailRule, ZielonkaError, ZielonkaTree,
};
