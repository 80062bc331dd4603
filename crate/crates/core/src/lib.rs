//! Potential games on bounded-degree graphs and unimodular ensembles.

pub mod ensemble;
pub mod error;
pub mod game;
pub mod graph;
pub mod reduction;
pub mod solvers;
pub mod thermo;

pub use ensemble::{check_mtp, generate_ball, uniform_root_ensemble, LimitKind, MtpReport, RootedEnsemble};
pub use error::{Error, Result};
pub use game::{BoxConstraint, CostModel, EdgeView, LQModel, LocalGame, Source, WModel};
pub use graph::{ball, canonical_code, load_graph, local_distance, rooted_isomorphic, Ball, Code, Graph};
pub use reduction::{
    lift_class_vector, materialize_profile, partition_classes, ActionRule, ClassPartition, ClassRadius, Profile,
};
pub use solvers::{NashReport, SolveOptions};
pub use thermo::{limit_of, make_graph, thermo_run, write_thermo_csv, FamilyKind, FamilySpec, ThermoRow};
