pub mod analyze;
pub mod encode;
pub mod eval;
pub mod fixtures;
pub mod gen;
pub mod report;
