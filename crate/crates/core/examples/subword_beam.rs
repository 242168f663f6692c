// Beam search over a subword vocabulary: hypotheses must extend the
// partial token, and their first new character is marginalized.
//
// `cargo run -p charpilot-core --example subword_beam`

use std::error::Error;
use std::sync::Arc;

use charpilot_core::backend::NgramModel;
use charpilot_core::predictor::{beam_search, predict_beam};
use charpilot_core::{Alphabet, BeamConfig, Phrase, Vocabulary};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let alphabet = Alphabet::default();
    let vocab = Vocabulary::subwords(
        [
            ("pe", false),
            ("anut", false),
            ("butter", true),
            ("and", true),
            ("j", true),
            ("el", false),
            ("ela", false),
            ("ly", false),
            ("p", false),
            ("a", false),
        ],
        &alphabet,
    )?;
    let corpus = [
        "peanut butter and jelly",
        "peanut butter and jelly",
        "peanut and butter",
    ]
    .iter()
    .map(|t| Phrase::new(*t, "demo", &alphabet))
    .collect::<Result<Vec<_>, _>>()?;
    let model = NgramModel::train_tokens(&corpus, Arc::new(vocab), 3, 0.01)?;
    let cfg = BeamConfig::new(20, 2)?;

    let history = "peanut butter and jel";
    let mut outcome = beam_search(&model, &alphabet, history, &cfg)?;
    outcome
        .hypotheses
        .sort_by(|a, b| b.logprob.total_cmp(&a.logprob));
    println!("partial {:?}", outcome.pending);
    for h in outcome.hypotheses.iter().take(5) {
        println!(
            "    {:<12} logprob {:.3}",
            format!("{:?}", h.surface),
            h.logprob
        );
    }
    let dist = predict_beam(&model, &alphabet, history, &cfg)?;
    let best = dist.ranked(&alphabet)[0];
    println!("next character {:?} ({:.3})", best.ch, best.prob);
    assert_eq!(best.ch, 'l');
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
