// Building engines from the TOML files under `data/engines`.
//
// `cargo run -p charpilot-core --example engine_from_config`

use std::error::Error;
use std::path::PathBuf;

use charpilot_core::EngineConfig;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/engines");
    for name in ["unigram.toml", "char5.toml", "word3.toml", "subword.toml"] {
        let cfg = EngineConfig::load(&dir.join(name))?;
        let engine = cfg.build()?;
        let ranking = engine.predict("i would like a cup of t")?;
        let top: String = ranking.iter().take(5).map(|r| r.ch).collect();
        println!(
            "{:<18} {:<12} top five {top:?}",
            cfg.display_label(),
            engine.kind().as_str()
        );
        assert_eq!(ranking.len(), 27);
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
