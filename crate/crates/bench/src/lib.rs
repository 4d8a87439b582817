//! Benchmark harness for the shmr framework: dataset generators, sequential
//! oracles, result files and reports.

pub mod cli;
pub mod commands;
pub mod datagen;
pub mod oracle;
pub mod output;
pub mod report;
pub mod runner;
