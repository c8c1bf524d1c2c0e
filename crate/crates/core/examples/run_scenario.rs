//! Load a scenario config, run it, and write the result bundle.
//!
//! cargo run --release --example run_scenario -- configs/sech_figure1.toml out/

use fastosc::scenario::{emit, run, ScenarioConfig};

fn main() -> fastosc::Result<()> {
    let mut args = std::env::args().skip(1);
    let config = args.next().unwrap_or_else(|| "configs/square_cos_figure3.toml".into());
    let out = args.next().unwrap_or_else(|| "results/example".into());

    let cfg = ScenarioConfig::load(&config)?;
    let bundle = run(&cfg)?;
    for (name, value) in &bundle.metrics {
        println!("{name} = {value}");
    }
    for path in emit(&bundle, &out)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}
