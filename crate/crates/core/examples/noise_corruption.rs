// Seeded letter substitutions, as used for the noisy evaluation runs.
//
// `cargo run -p charpilot-core --example noise_corruption`

use std::error::Error;

use charpilot_core::noise::corrupt_with;
use charpilot_core::{corrupt, NoiseSpec};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let text = "could you please open the window";
    for rate in [0.0, 0.1, 0.3] {
        let spec = NoiseSpec::new(rate, 7)?;
        println!("{rate:.1}  {}", corrupt(text, &spec));
    }

    // one stream per (item, repeat), so runs are reproducible in any order
    let spec = NoiseSpec::new(0.1, 7)?;
    let a = corrupt_with(text, spec.rate, &mut spec.rng_for(3, 1));
    let b = corrupt_with(text, spec.rate, &mut spec.rng_for(3, 1));
    assert_eq!(a, b);
    assert_eq!(corrupt(text, &NoiseSpec::new(0.0, 1)?), text);
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
