//! Summaries of the builtin patches.

use floquet_kitaev::cli::geometry_summary;
use floquet_kitaev::lattice::{Lattice, BUILTINS};

fn main() {
    for (name, _) in BUILTINS {
        let lat = Lattice::builtin(name).expect("builtin geometry");
        println!("{}", geometry_summary(&lat));
    }
}
