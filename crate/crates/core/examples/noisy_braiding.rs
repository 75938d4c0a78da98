//! Two-plaquette braiding with trajectory noise and flux post-selection on
//! the dense engine.

use floquet_kitaev::dense::NoiseModel;
use floquet_kitaev::experiments::{run, EngineChoice, Experiment, ExperimentPlan};

fn main() {
    let mut plan = ExperimentPlan::new(Experiment::Braiding, "hex2+ancilla", 1.0);
    plan.cycles = 9;
    plan.engine = EngineChoice::Dense;
    plan.noise = NoiseModel::qualitative();
    plan.trajectories = 200;
    plan.postselect = vec![0, 1];
    plan.seed = 7;
    let table = run(&plan).expect("noisy braiding run");
    for obs in table.observables() {
        for (n, z) in table.mean_series(&obs, None).iter().enumerate().filter(|(n, _)| n % 3 == 0) {
            println!("{obs} N = {n}: r = {:.3}, arg = {:+.3} rad", z.norm(), z.arg());
        }
    }
    for r in table.retention.iter().filter(|r| r.cycle % 3 == 0) {
        println!("retention at N = {}: {:.3}", r.cycle, r.rate);
    }
}
