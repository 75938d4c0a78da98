//! Hadamard-test interferometry of an edge Majorana braided around ring1.

use floquet_kitaev::experiments::{run, Experiment, ExperimentPlan};

fn main() {
    let plan = ExperimentPlan::new(Experiment::Braiding, "ring1+ancilla", 1.0);
    let table = run(&plan).expect("braiding run");
    for obs in table.observables() {
        for (n, z) in table.mean_series(&obs, None).iter().enumerate() {
            if z.norm() > 1e-9 {
                println!("{obs} N = {n:>2}: r = {:.3}, phase = {:+.3} pi", z.norm(), z.arg() / std::f64::consts::PI);
            }
        }
    }
}
