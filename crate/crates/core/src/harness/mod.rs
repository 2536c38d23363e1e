//! Instance generators, end-to-end pipelines and their reports.

mod config;
mod generate;
mod pipeline;
mod report;

pub use config::{desk_decode, AmplifyConfig, Config, GadgetConfig, HypergraphConfig, InstanceConfig, Pipeline};
pub use generate::{gen_planted, planted_biclique, random_hypergraph, random_regular, PlantedSseSpec};
pub use pipeline::run_pipeline;
pub use report::{Relation, Report, Row};
