//! The random-bit chain `X^h_{(k+1)h} = X^h_{kh} + a_h(X^h_{kh}) ξ_{k+1}`
//! and its linear interpolation.

mod batch;
mod bits;
mod cache;
mod io;
mod natural;
mod path;

pub use batch::{simulate_batch_with, simulate_paths, simulate_terminal_batch, Evaluation, PathFunctional};
pub use bits::{BitSource, BitStream, RandomSigns, ScriptedBits};
pub use io::{write_paths_csv, write_values_csv};
pub use natural::{sde_to_natural_scale, NaturalScale};
pub use path::{apply_reflection, interpolate_nodes, simulate_chain, step_count, ChainPath};
