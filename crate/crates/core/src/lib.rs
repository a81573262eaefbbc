//! Learning taxonomic decision-list policies for relational stochastic
//! planning domains.

mod bitset;
pub mod domains;
pub mod harness;
pub mod learner;
pub mod policy;
pub mod pstrips;
pub mod seed;
pub mod sexpr;
pub mod solver;
pub mod taxonomy;
pub mod trainset;

pub use bitset::{ObjSet, Relation};
