//! Query-pack execution for large sets of similar conjunctive queries.
//!
//! A query pack is a tree of conjunctions in which every root-to-leaf path
//! is one query. Evaluating the pack against an example shares the work of
//! common prefixes and prunes each branch as soon as all queries below it
//! have succeeded once.
//!
//! - [`datastore`]: terms, unification and the example database.
//! - [`packtree`]: building, labelling and (de)serializing packs.
//! - [`engine`]: separate, disjoint and packed evaluation with work counters.
//! - [`costmodel`]: predicted speedups and bound checks against counters.
//! - [`miner`]: refinement brooms and level-wise frequent-query mining.
//! - [`bongard`], [`synth`], [`bench`], [`cli`]: workloads and tooling.

pub mod datastore;
pub mod packtree;
pub mod engine;
pub mod costmodel;
pub mod synth;
pub mod miner;
pub mod bongard;
pub mod bench;
pub mod cli;
