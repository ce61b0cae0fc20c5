//! One module per subcommand. Each takes a resolved config plus an output
//! directory and returns the process exit code.

pub mod capacity;
pub mod esn;
pub mod mackey_glass;
pub mod narma;
pub mod timer;
pub mod validate;
