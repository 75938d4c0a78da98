//! Flux and fermion-density imaging on ring1 at the fixed point and away
//! from it.

use floquet_kitaev::experiments::{run, Experiment, ExperimentPlan};

fn main() {
    for jt in [1.0, 0.8] {
        let plan = ExperimentPlan::new(Experiment::Imaging, "ring1", jt);
        let table = run(&plan).expect("imaging run");
        println!("JT = {jt} ({} engine)", table.provenance.engine);
        let w: Vec<f64> = table.mean_series("W", Some("0")).iter().map(|z| z.re).collect();
        println!("  W_0(N)     {w:.3?}");
        for obs in ["n_track0", "n_follow0"] {
            let n: Vec<f64> = table.mean_series(obs, None).iter().map(|z| z.re).collect();
            println!("  {obs:<10} {n:.3?}");
        }
    }
}
