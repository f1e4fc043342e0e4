//! Seedable simulator and analytics engine for general-purpose social honeypots.
//!
//! A honeypot is a topic, a content-generation strategy mix and an engagement
//! plan. [`sim`] runs a population of agents against a set of honeypots for a
//! nine-week horizon, [`stats`] reproduces the evaluation pipeline on the
//! resulting records, and [`experiment`] ties both to files on disk.

pub mod classify;
pub mod content;
pub mod domain;
pub mod experiment;
pub mod fixtures;
pub mod par;
pub mod plans;
pub mod rng;
pub mod sim;
pub mod stats;
pub mod time;

pub use domain::{
    classify_coverage, AgeBucket, Agent, AgentCategory, AgentId, Comment, CoverageClass,
    EngagementEvent, Entity, EventKind, Gender, Honeypot, HoneypotRef, Post, PostId, Topic,
};
pub use rng::{seeded_rng, split, SimRng};
pub use time::SimTime;
