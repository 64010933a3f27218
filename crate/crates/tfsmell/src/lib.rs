//! Terraform sustainability smell scanner: corpus scanning, report
//! formats, the repository harvester and the `tfsmell` command line.

pub mod cli;
pub mod harvest;
pub mod load;
pub mod pattern;
pub mod render;
pub mod scan;
