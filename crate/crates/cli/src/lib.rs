//! Front end of `tunnelsplit`: argument handling, report assembly and output formats.

pub mod config;
pub mod render;
pub mod report;
