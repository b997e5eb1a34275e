//! A frozen monotone machine, its chronological variant, and budget-bounded
//! program enumeration.

pub mod cache;
pub mod enumerate;
pub mod machine;

pub use cache::{joint_cached, EnumCache, CACHE_ENV};
pub use enumerate::{enumerate_chron, enumerate_joint, BudgetedJoint, ChronEnumEnv, EnumApprox, EnumParams};
pub use machine::{examples, machine_hash, run_program, MachineKind, Op, RunOutput, Stop};
