//! e-m transmutation on ring3: the normalized loop series eta(N) and the
//! phase indicator |eta(pi)| - |eta(0)|.

use floquet_kitaev::analysis::phase_indicator;
use floquet_kitaev::experiments::{eta_from_table, run, Experiment, ExperimentPlan};

fn main() {
    for jt in [1.0, 0.9, 0.5] {
        let mut plan = ExperimentPlan::new(Experiment::Transmutation, "ring3", jt);
        plan.cycles = 12;
        let table = run(&plan).expect("transmutation run");
        let eta: Vec<f64> = eta_from_table(&table).expect("eta").iter().map(|e| e.mean).collect();
        let ind = phase_indicator(&eta).expect("indicator");
        println!("JT = {jt}: eta = {eta:+.2?}");
        println!("         indicator {ind:+.3} ({})", if ind > 0.0 { "Floquet topological order" } else { "Kitaev" });
    }
}
