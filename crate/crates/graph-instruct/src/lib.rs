//! File-level pipeline around `graph-instruct-core`: TOML configuration,
//! JSONL graph ingestion, Chain-of-Thought generators, the pipeline commands
//! and their on-disk outputs.

pub mod config;
pub mod error;
pub mod jsonl;
pub mod llm;
pub mod load;
pub mod pipeline;

pub use config::PipelineConfig;
pub use error::Error;
pub use graph_instruct_core as core;
