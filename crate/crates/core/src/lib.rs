pub mod algebra;
pub mod bar;
pub mod cli;
pub mod dilie;
pub mod endo;
pub mod error;
pub mod exact;
pub mod frob;
pub mod graph;
pub mod obstruct;
