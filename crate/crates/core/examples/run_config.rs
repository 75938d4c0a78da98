//! The `fkh run` / `fkh analyze` path driven from code: a TOML config with
//! overrides, a result directory and the eta table derived from it.

use floquet_kitaev::cli::{cmd_analyze, cmd_run, load_config, AnalyzeMode, OUTPUT_ROOT_VAR};

const CONFIG: &str = r#"
experiment = "transmutation"
geometry = "ring3"
jt = 0.9
cycles = 10
"#;

fn main() {
    let dir = std::env::temp_dir().join("fkh-example");
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("run.toml");
    std::fs::write(&file, CONFIG).unwrap();
    std::env::set_var(OUTPUT_ROOT_VAR, &dir);
    let cfg = load_config(Some(&file), &["--jt=0.8".to_string()]).expect("config");
    let out = cmd_run(&cfg).expect("run");
    println!("results in {}", out.display());
    let (csv, summary) = cmd_analyze(&out, AnalyzeMode::Eta, None).expect("analyze");
    println!("{summary}");
    print!("{}", std::fs::read_to_string(csv).unwrap());
}
