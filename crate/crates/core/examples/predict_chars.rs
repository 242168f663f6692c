// Next-character ranking straight from a character trigram model.
//
// `cargo run -p charpilot-core --example predict_chars`

use std::error::Error;
use std::sync::Arc;

use charpilot_core::backend::NgramModel;
use charpilot_core::{Alphabet, Engine, Phrase};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let alphabet = Alphabet::default();
    let corpus = [
        "i want to go home",
        "i want some water",
        "go to bed",
        "what time is it",
    ]
    .iter()
    .map(|t| Phrase::new(*t, "demo", &alphabet))
    .collect::<Result<Vec<_>, _>>()?;
    let model = NgramModel::train_chars(&corpus, &alphabet, 3, 0.01)?;
    let engine = Engine::new(Arc::new(model), alphabet);

    for history in ["i wa", "go h", "what t"] {
        let ranking = engine.predict(history)?;
        let top: Vec<String> = ranking
            .iter()
            .take(3)
            .map(|r| format!("{:?} {:.3}", r.ch, r.prob))
            .collect();
        println!("{history:>8} -> {}", top.join(", "));
    }
    assert_eq!(engine.predict("go h")?[0].ch, 'o');
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
