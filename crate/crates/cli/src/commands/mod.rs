//! Subcommand implementations.

pub mod evaluate;
pub mod extract;
pub mod predict;
pub mod train;

pub use evaluate::cmd_eval;
pub use extract::cmd_extract;
pub use predict::cmd_predict;
pub use train::cmd_train;
