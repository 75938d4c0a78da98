//! Entanglement entropy of the transmutation state across the ring family.

use floquet_kitaev::experiments::transmutation_entropy;
use floquet_kitaev::lattice::Lattice;

fn main() {
    for name in ["ring3", "ring4", "ring5", "ring6", "ring7", "ring8"] {
        let lat = Lattice::builtin(name).unwrap();
        let s = transmutation_entropy(&lat).unwrap();
        let nq = lat.n_sites() as f64;
        println!("{name}: N_Q = {nq}, S = {s} log 2, S / sqrt(N_Q) = {:.3}", s as f64 / nq.sqrt());
    }
}
