// Word bigram model over a closed vocabulary: the next character is the
// probability mass of the words that continue the partial word.
//
// `cargo run -p charpilot-core --example closed_vocab_words`

use std::error::Error;

use charpilot_core::backend::NgramModel;
use charpilot_core::predictor::predict_closed_vocab;
use charpilot_core::{Alphabet, Phrase};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let alphabet = Alphabet::default();
    let corpus = [
        "please bring my medicine",
        "please bring my mail",
        "please bring my glasses",
        "bring me water",
    ]
    .iter()
    .map(|t| Phrase::new(*t, "demo", &alphabet))
    .collect::<Result<Vec<_>, _>>()?;
    let model = NgramModel::train_words(&corpus, &alphabet, 2, 0.01)?;

    for history in ["please bring my m", "please bring my me", "bring me "] {
        let dist = predict_closed_vocab(&model, &alphabet, history)?;
        let ranked = dist.ranked(&alphabet);
        println!("{history:?}");
        for r in ranked.iter().take(3) {
            println!("    {:?} {:.3}", r.ch, r.prob);
        }
    }
    // "medicine" and "mail" continue "m" with 'e' and 'a'
    let dist = predict_closed_vocab(&model, &alphabet, "please bring my m")?;
    let top: Vec<char> = dist
        .ranked(&alphabet)
        .iter()
        .take(2)
        .map(|r| r.ch)
        .collect();
    assert!(top.contains(&'e') && top.contains(&'a'));
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
