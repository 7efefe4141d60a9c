//! Household energy management simulator with heterogeneous battery
//! degradation, stochastic EV use, rule-based controllers and a Lagrangian
//! soft actor-critic agent.

pub mod data;
pub mod household;
pub mod storage;
pub mod degradation;
pub mod ev;
pub mod env;
pub mod agent;
pub mod baselines;
pub mod config;
pub mod report;
pub mod experiment;
