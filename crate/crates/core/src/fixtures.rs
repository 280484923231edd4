//! Reference data used by the documentation, examples and acceptance tests.
//!
//! These are published numbers from full-scale fine-tuning runs. The toolkit
//! does not reproduce them (that needs the training runs); they are here so
//! the examples can show the analysis on realistic inputs.

/// Pruning fractions of [`TIMIT_TEST_WER`], with `0.0` meaning no pruning.
pub const PRUNING_FRACTIONS: [f64; 6] = [0.0, 0.1, 0.3, 0.5, 0.7, 0.9];

/// Test WER of wav2vec2-base on TIMIT after training on subsets chosen by
/// each strategy (selection epoch 8, mean of three runs).
pub const TIMIT_TEST_WER: [(&str, [f64; 6]); 4] = [
    ("random", [0.315, 0.325, 0.341, 0.357, 0.394, 0.557]),
    ("top-k", [0.315, 0.322, 0.334, 0.392, 0.472, 0.678]),
    ("bottom-k", [0.315, 0.336, 0.360, 0.411, 0.521, 0.887]),
    ("cowerage", [0.315, 0.320, 0.333, 0.339, 0.369, 0.455]),
];

/// A TIMIT training utterance with its averaged training WER and the
/// phonemic cover reported alongside it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimitExample {
    pub wer: f64,
    pub text: &'static str,
    pub phonemes: &'static str,
    pub phonemic_cover: usize,
}

/// Ten high-WER and nine low-WER TIMIT utterances.
pub const TIMIT_EXAMPLES: [TimitExample; 19] = [
    TimitExample {
        wer: 0.63,
        text: "Twelve o'clock level.",
        phonemes: "t-w-eh-l-v-ax-kcl-k-l-aa-kcl-k-l-eh-v-el",
        phonemic_cover: 10,
    },
    TimitExample {
        wer: 0.63,
        text: "That's your headache.",
        phonemes: "dh-ae-tcl-t-s-y-er-hv-eh-dx-ey-kcl-k",
        phonemic_cover: 13,
    },
    TimitExample {
        wer: 0.6,
        text: "Run-down, iron-poor.",
        phonemes: "r-ah-n-dcl-d-aw-n-q-ay-er-n-pcl-p-ao-r",
        phonemic_cover: 12,
    },
    TimitExample {
        wer: 0.49,
        text: "Y'all wanna walk -- walk, he said.",
        phonemes: "y-ao-l-w-ao-n-ax-w-ao-kcl-pau-w-ao-kcl-k-iy-s-eh-dcl",
        phonemic_cover: 13,
    },
    TimitExample {
        wer: 0.46,
        text: "Pansies are gluttons.",
        phonemes: "p-ae-n-z-iy-z-er-gcl-g-l-ah-tcl-en-d-z",
        phonemic_cover: 13,
    },
    TimitExample {
        wer: 0.43,
        text: "She seemed irritated.",
        phonemes: "sh-iy-s-ey-m-dcl-d-ih-er-tcl-t-ey-dx-ix-dcl",
        phonemic_cover: 13,
    },
    TimitExample {
        wer: 0.42,
        text: "Where're you takin' me?",
        phonemes: "w-er-y-ux-tcl-t-ey-kcl-k-ix-n-m-iy",
        phonemic_cover: 13,
    },
    TimitExample {
        wer: 0.41,
        text: "They're doin' it now.",
        phonemes: "dh-eh-r-dcl-d-uw-ih-nx-ih-tcl-n-aw",
        phonemic_cover: 11,
    },
    TimitExample {
        wer: 0.40,
        text: "Yes, ma'am, it sure was.",
        phonemes: "y-eh-s-epi-m-ae-m-ih-tcl-t-sh-er-w-ah-s",
        phonemic_cover: 13,
    },
    TimitExample {
        wer: 0.40,
        text: "Twenty-two or twenty-three.",
        phonemes: "t-w-eh-n-tcl-t-iy-tcl-t-ux-ao-r-tcl-t-w-eh-n-tcl-t-iy-th-r-iy",
        phonemic_cover: 10,
    },
    TimitExample {
        wer: 0.07,
        text: "Boys and men go along the riverbank or to the alcoves in the top arcade.",
        phonemes: "b-oy-z-ix-n-m-eh-n-gcl-g-ow-ax-l-ao-ng-n-ix-r-ih-v-er-bcl-b-ae-ng-kcl-k-q-ao-r-tcl-t-ux-dcl-d-iy-q-ae-l-kcl-k-ow-v-z-q-ix-n-dh-ix-tcl-t-aa-pcl-p-aa-r-kcl-k-ey-dcl-d",
        phonemic_cover: 34,
    },
    TimitExample {
        wer: 0.07,
        text: "But if she wasn't interested, she'd just go back to the same life she'd left.",
        phonemes: "b-uh-dx-ih-f-sh-iy-w-ah-z-ix-n-ih-n-tcl-t-axr-s-tcl-t-ih-dcl-d-pau-sh-iy-dcl-jh-uh-s-gcl-g-ow-bcl-b-ae-kcl-t-ix-dh-ix-s-ey-m-l-ay-f-sh-iy-dcl-l-eh-f-tcl-t",
        phonemic_cover: 32,
    },
    TimitExample {
        wer: 0.07,
        text: "Why the hell didn't you come out when you saw them gang up on me?",
        phonemes: "w-ay-dh-eh-hv-eh-l-dcl-d-ih-dcl-en-tcl-ch-ux-kcl-k-ah-m-aw-q-w-ix-n-y-ux-s-ao-dh-ix-m-gcl-g-ae-ng-ah-pcl-p-ao-n-m-iy",
        phonemic_cover: 31,
    },
    TimitExample {
        wer: 0.06,
        text: "You think somebody is going to stand up in the audience and make guilty faces?",
        phonemes: "y-ux-th-ih-ng-kcl-k-s-ah-m-bcl-b-aa-dx-iy-ix-z-gcl-g-oy-ng-dcl-d-ix-s-tcl-t-ae-n-dcl-d-ah-pcl-p-ix-n-ah-q-aa-dx-iy-eh-n-tcl-s-eh-m-ey-kcl-g-ih-l-tcl-t-ix-f-ey-s-eh-z",
        phonemic_cover: 33,
    },
    TimitExample {
        wer: 0.06,
        text: "How much and how many profits could a majority take out of the losses of a few?",
        phonemes: "hh-aw-m-ah-tcl-ch-ix-n-hv-aw-m-ax-nx-iy-pcl-p-r-aa-f-ax-tcl-s-kcl-k-uh-dx-ax-m-ax-dcl-jh-ao-axr-dx-iy-tcl-t-ey-kcl-k-ae-dx-ah-dh-ax-l-ao-s-ix-z-ax-v-ax-f-y-ux",
        phonemic_cover: 35,
    },
    TimitExample {
        wer: 0.06,
        text: "He may not rise to the heights, but he can get by, and eventually be retired.",
        phonemes: "hh-iy-m-ey-n-aa-q-r-ay-z-tcl-t-ix-dh-ax-hv-ay-tcl-s-pau-b-ah-dx-iy-kcl-k-ix-ng-gcl-g-eh-q-bcl-b-ay-pau-q-ix-nx-iy-v-eh-n-ch-ix-l-iy-pau-b-iy-r-iy-tcl-t-ay-axr-dcl-d",
        phonemic_cover: 35,
    },
    TimitExample {
        wer: 0.06,
        text: "My sincere wish is that he continues to add to this record he sets here today.",
        phonemes: "m-ay-s-en-s-ih-r-w-ih-sh-ix-z-dh-eh-tcl-hv-iy-kcl-k-ax-h-tcl-t-ih-n-y-ux-z-tcl-t-ax-h-q-ae-dcl-d-pau-t-ux-dh-ih-sh-r-eh-kcl-k-axr-dx-iy-s-eh-tcl-s-hh-ix-r-tcl-t-ax-h-dx-ey",
        phonemic_cover: 31,
    },
    TimitExample {
        wer: 0.05,
        text: "Then he fled, not waiting to see if she minded him or took notice of his cry.",
        phonemes: "dh-ih-n-iy-f-l-eh-dcl-d-pau-n-aa-q-w-ey-dx-ih-ng-dcl-d-ix-s-iy-ih-f-sh-iy-m-ay-n-ix-dcl-d-hv-ih-m-pau-q-axr-tcl-t-uh-kcl-n-ow-dx-ih-s-ix-v-ix-z-kcl-k-r-ay",
        phonemic_cover: 32,
    },
    TimitExample {
        wer: 0.01,
        text: "We apply auditory modeling to computer speech recognition.",
        phonemes: "w-iy-ax-pcl-p-l-ay-q-ao-dx-ix-tcl-t-ao-r-ix-m-aa-dx-el-ix-ng-tcl-t-uw-kcl-k-ax-m-pcl-p-y-ux-dx-er-s-pcl-p-iy-tcl-ch-epi-r-eh-kcl-k-ix-gcl-n-ih-sh-ix-n",
        phonemic_cover: 35,
    },
];

/// Plain-text rendering of [`TIMIT_TEST_WER`] and [`TIMIT_EXAMPLES`], the
/// latter with the cover recomputed from the phoneme string.
pub fn reference_report() -> String {
    use std::fmt::Write;

    let mut out = String::from("TIMIT test WER (wav2vec2-base, selection epoch 8)\n");
    let _ = write!(out, "{:<10}", "fraction");
    for p in PRUNING_FRACTIONS {
        let _ = write!(out, "{p:>7.1}");
    }
    out.push('\n');
    for (strategy, row) in TIMIT_TEST_WER {
        let _ = write!(out, "{strategy:<10}");
        for v in row {
            let _ = write!(out, "{v:>7.3}");
        }
        out.push('\n');
    }
    out.push_str("\nTraining WER and phonemic cover (listed / recomputed)\n");
    for ex in TIMIT_EXAMPLES {
        let cover = crate::phoneme::PhonemeTranscript::parse("", ex.phonemes).cover();
        let flag = if cover == ex.phonemic_cover {
            ""
        } else {
            "  *"
        };
        let _ = writeln!(
            out,
            "{:>5.2}  {:>3} / {:<3} {}{flag}",
            ex.wer, ex.phonemic_cover, cover, ex.text
        );
    }
    out
}
