//! Word error rate of a few hypotheses against one reference, with the
//! substitution / insertion / deletion split of a minimal alignment.

use cowerage::wer::{word_error_rate, NormalizationPolicy};

fn main() -> cowerage::Result<()> {
    let reference = "Twelve o'clock level.";
    let hypotheses = [
        "twelve o'clock level",
        "twelve o clock level",
        "twelve o'clock label",
        "twelve",
        "it is twelve o'clock level now",
    ];
    println!("reference: {reference}");
    for hyp in hypotheses {
        let w = word_error_rate(reference, hyp, NormalizationPolicy::default())?;
        println!(
            "{:<32} S={} I={} D={} WER={} ({:.3})",
            hyp,
            w.substitutions,
            w.insertions,
            w.deletions,
            w.rate(),
            w.rate().to_f64()
        );
    }

    // without normalization, case and the trailing period count as errors
    let strict = word_error_rate(
        reference,
        "twelve o'clock level",
        NormalizationPolicy::VERBATIM,
    )?;
    println!("verbatim comparison: WER={}", strict.rate());
    Ok(())
}
