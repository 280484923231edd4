//! Phonemic cover of the bundled reference sentences, and a Mann-Whitney U
//! comparison of the covers of two subsets.

use cowerage::fixtures::TIMIT_EXAMPLES;
use cowerage::mwu::mann_whitney_u;
use cowerage::phoneme::PhonemeTranscript;

fn main() -> cowerage::Result<()> {
    let mut low = Vec::new();
    let mut high = Vec::new();
    for (i, ex) in TIMIT_EXAMPLES.iter().enumerate() {
        let t = PhonemeTranscript::parse(format!("s{i}"), ex.phonemes);
        println!(
            "{:>2} cover {:>2}  WER {:.2}  {}",
            i,
            t.cover(),
            ex.wer,
            ex.text
        );
        if ex.wer < 0.1 {
            low.push(t.cover() as f64);
        } else {
            high.push(t.cover() as f64);
        }
    }

    let r = mann_whitney_u(&low, &high)?;
    println!(
        "\nlow-WER covers vs the rest: U={} p={:.4} ({:?}, n={}/{})",
        r.u, r.p_value, r.method, r.n_a, r.n_b
    );
    Ok(())
}
