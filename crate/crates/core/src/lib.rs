//! Simulator for self-modifying agents.
//!
//! Agents act with a world action and a modification target naming their
//! next policy (policy mode) or next utility function (utility mode). The
//! crate computes hedonistic, ignorant and realistic values, enumerates the
//! history measures these agents induce, and checks the safety results about
//! them on small environments by exact expectimax.
//!
//! Every numeric routine is generic over [`Scalar`]: use [`Exact`]
//! (`BigRational`) when equalities must hold exactly, or `f64`/`f32`.

pub mod catalog;
pub mod environment;
pub mod error;
pub mod history;
pub mod namespace;
pub mod pattern;
pub mod policy;
pub mod rollout;
pub mod scalar;
pub mod theorem_lab;
pub mod utility;
pub mod value;

pub use catalog::{builtin_environment, builtin_utility, Catalog};
pub use environment::{percept_distribution, Distribution, Environment, Rule};
pub use error::{LabError, Result};
pub use history::{
    world_projection, Action, Alphabet, History, NameId, Percept, Step, Vocabulary, WorldAction,
    WorldHistory, WorldStep,
};
pub use namespace::{extend_namespace, Binding, ModMode, NameSpace};
pub use pattern::SuffixPattern;
pub use policy::{PolicyTable, WorldPolicyTable};
pub use rollout::{
    associated_world_policy, enumerate_ignorant, enumerate_realistic, performance, world_marginals,
    WeightedHistory, DEFAULT_CAP,
};
pub use scalar::{parse_rational, Scalar};
pub use theorem_lab::{verify, Certificate, Claim, Experiment, Verdict, Witness};
pub use utility::{
    constant_one_utility, discounted_return, policy_indicator_utility, truncation_bound,
    DiscountConfig, UtilityFunction,
};
pub use value::{
    build_optimal_policy, optimal_action, q_hedonistic, q_ignorant, q_iterative, q_realistic,
    v_value, ActingPolicies, IterativeQuery, Planner, TieBreak, ValueKind, ValueReport,
};

/// Exact rational scalar.
pub type Exact = num_rational::BigRational;
pub type ExactEnvironment = Environment<Exact>;
pub type ExactUtility = UtilityFunction<Exact>;
pub type ExactNameSpace = NameSpace<Exact>;
pub type ExactConfig = DiscountConfig<Exact>;

pub type FloatEnvironment = Environment<f64>;
pub type FloatUtility = UtilityFunction<f64>;
pub type FloatNameSpace = NameSpace<f64>;
pub type FloatConfig = DiscountConfig<f64>;
