//! Template-generated complementary pairs for tests, demos and sanity runs.
//!
//! Each pair shares a subject and filler words; the two statements differ only
//! in a single cue word drawn from disjoint "sensible" and "absurd" vocabularies,
//! so a linear classifier over token features separates them perfectly.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::{Domain, PairedDataset, Scenario, StatementPair};

const SUBJECTS: &[&str] = &[
    "kettle", "river", "teacher", "candle", "bicycle", "garden", "winter", "doctor", "bakery",
    "glacier", "violin", "student", "lantern", "harbor", "pillow", "desert", "farmer", "library",
    "thunder", "orchard", "market", "rooftop", "sailor", "meadow", "painter", "tunnel", "quarry",
    "festival", "blanket", "compass", "village", "chimney",
];

const SENSIBLE: &[&str] = &[
    "useful", "familiar", "ordinary", "expected", "plausible", "reasonable", "common", "normal",
    "likely", "typical", "sensible", "natural", "routine", "regular", "customary", "realistic",
    "possible", "safe", "practical", "credible", "logical", "believable", "usual", "standard",
];

const ABSURD: &[&str] = &[
    "impossible", "bizarre", "magical", "absurd", "ridiculous", "nonsensical", "unthinkable",
    "outlandish", "preposterous", "fantastical", "surreal", "ludicrous", "illogical", "mythical",
    "miraculous", "inconceivable", "laughable", "farcical", "incredible", "unnatural",
    "paradoxical", "contradictory", "irrational", "unreal",
];

const FILLERS: &[&str] = &[
    "today", "often", "in", "the", "morning", "near", "town", "at", "night", "during", "summer",
    "for", "most", "people", "around", "here", "every", "week", "by", "evening",
];

/// Number of cue-word pairs available to [`SyntheticSpec::cues`].
pub const N_CUES: usize = 24;

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub n_pairs: usize,
    pub seed: u64,
    pub id_prefix: String,
    /// Half-open range of cue indices to draw from, within `0..N_CUES`.
    pub cues: std::ops::Range<usize>,
    /// Filler words appended to both statements, sampled uniformly from this range.
    pub fillers: std::ops::RangeInclusive<usize>,
}

impl SyntheticSpec {
    pub fn new(n_pairs: usize, seed: u64, id_prefix: impl Into<String>) -> Self {
        SyntheticSpec {
            n_pairs,
            seed,
            id_prefix: id_prefix.into(),
            cues: 0..N_CUES,
            fillers: 0..=3,
        }
    }

    pub fn with_cues(mut self, cues: std::ops::Range<usize>) -> Self {
        assert!(cues.start < cues.end && cues.end <= N_CUES, "cue range out of bounds");
        self.cues = cues;
        self
    }

    pub fn generate(&self) -> PairedDataset {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let domains = [Domain::Physical, Domain::Social, Domain::Temporal];
        let scenarios = [Scenario::Comparative, Scenario::Causal];
        let pairs = (0..self.n_pairs)
            .map(|i| {
                let subject = SUBJECTS.choose(&mut rng).unwrap();
                let cue = rng.gen_range(self.cues.clone());
                let n_fill = rng.gen_range(self.fillers.clone());
                let tail: Vec<&str> = (0..n_fill).map(|_| *FILLERS.choose(&mut rng).unwrap()).collect();
                let tail = if tail.is_empty() {
                    String::new()
                } else {
                    format!(" {}", tail.join(" "))
                };
                let sensible = format!("The {subject} is {}{tail}.", SENSIBLE[cue]);
                let absurd = format!("The {subject} is {}{tail}.", ABSURD[cue]);
                let sensible_first = rng.gen_bool(0.5);
                let (s1, s2) = if sensible_first {
                    (sensible, absurd)
                } else {
                    (absurd, sensible)
                };
                StatementPair::new(format!("{}{i}", self.id_prefix), s1, s2, sensible_first).with_dimensions(
                    *domains.choose(&mut rng).unwrap(),
                    *scenarios.choose(&mut rng).unwrap(),
                    rng.gen_bool(0.3),
                )
            })
            .collect();
        PairedDataset::new(self.id_prefix.trim_end_matches(['-', '_']), pairs)
            .expect("generated pairs are valid")
    }
}
