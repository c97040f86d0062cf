pub mod common;
pub mod compare;
pub mod embed;
pub mod estimate;
pub mod exclude;
pub mod exhaustion;
pub mod generate;
pub mod replay;
pub mod report_cmd;
pub mod simulate;
pub mod strategies;
