//! Seeded generators of annotated requirements that instantiate the two
//! reference templates, and of training sets derived from them.
//!
//! Each template draws from its own lexicon, so every token identifies the
//! template it came from and each (phrase, role) pair always carries the
//! same tag.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{AnnotatedRequirement, Span, SrlTag, TagSequence};
use crate::recommender::{reverse_engineer_training_set, TrainingInstance};
use crate::templates::VariableTemplate;

struct Lexicon {
    conditions: &'static [&'static str],
    subjects: &'static [&'static str],
    /// Verb forms; template 2 inserts `be` before them.
    verbs: &'static [&'static str],
    objects: &'static [&'static str],
    purposes: &'static [&'static str],
    times: &'static [&'static str],
    locations: &'static [&'static str],
    beneficiaries: &'static [&'static str],
    arg2: &'static [&'static str],
}

impl Lexicon {
    fn adjuncts(&self, tag: &SrlTag) -> &'static [&'static str] {
        match tag {
            SrlTag::ArgmPrp => self.purposes,
            SrlTag::ArgmTmp => self.times,
            SrlTag::ArgmLoc => self.locations,
            SrlTag::ArgmBnf => self.beneficiaries,
            _ => self.arg2,
        }
    }
}

const ACTIVE: Lexicon = Lexicon {
    conditions: &[
        "When the door is open",
        "If the sensor fails",
        "After a login attempt",
        "While the engine runs",
        "Once the mission starts",
        "If the battery is low",
    ],
    subjects: &[
        "The system",
        "The controller",
        "Flight plan",
        "The ground station",
        "The autopilot",
        "The operator console",
        "The navigation module",
        "The payload manager",
    ],
    verbs: &["display", "record", "transmit", "validate", "encrypt", "compute", "upload", "monitor"],
    objects: &[
        "the alarm status",
        "the flight route",
        "the telemetry data",
        "a smart card reader",
        "the waypoint list",
        "the mission log",
        "a PIN",
        "the altitude limit",
    ],
    purposes: &["to protect the crew", "to prevent collisions", "to support auditing", "to conserve energy"],
    times: &["within 2 seconds", "after each update", "during takeoff", "before landing"],
    locations: &["on the main display", "at the control tower", "in the cockpit"],
    beneficiaries: &["UAV", "for the pilot", "for the maintenance crew", "for the mission planner"],
    arg2: &["to the remote server", "from the onboard sensors", "with the backup key"],
};

const PASSIVE: Lexicon = Lexicon {
    conditions: &[
        "If a breach is detected",
        "When the shift ends",
        "Whenever a user logs out",
        "If the archive is full",
    ],
    subjects: &[
        "The audit log",
        "All session data",
        "The user password",
        "Each invoice",
        "The backup image",
        "Customer records",
        "The access token",
        "The report archive",
    ],
    verbs: &["archived", "encrypted", "retained", "deleted", "rotated", "exported", "verified", "compressed"],
    objects: &[],
    purposes: &["to meet retention rules", "to free storage space", "to satisfy the auditors"],
    times: &["within 24 hours", "every night", "after 90 days", "at midnight"],
    locations: &["in the secure vault", "on the backup server", "inside the data center"],
    beneficiaries: &["for the compliance team", "for each tenant", "on behalf of the customer"],
    arg2: &["to the cold storage tier", "by the retention service", "with the master key"],
};

/// Modal verbs drawn for generated requirements.
pub const GENERATED_MODALS: [&str; 4] = ["must", "will", "should", "shall"];

const VARIABLE_TAGS: [SrlTag; 5] = [SrlTag::Arg2, SrlTag::ArgmPrp, SrlTag::ArgmTmp, SrlTag::ArgmLoc, SrlTag::ArgmBnf];

/// A generated requirement with the template it instantiates.
#[derive(Debug, Clone)]
pub struct LabeledRequirement {
    pub requirement: AnnotatedRequirement,
    pub template_id: u32,
    pub sequence: TagSequence,
}

struct Builder {
    tokens: Vec<String>,
    spans: Vec<Span>,
    tags: Vec<SrlTag>,
}

impl Builder {
    fn words(&mut self, phrase: &str) -> (usize, usize) {
        let start = self.tokens.len();
        self.tokens.extend(crate::corpus::tokenize(phrase));
        (start, self.tokens.len())
    }

    fn span(&mut self, phrase: &str, tag: SrlTag) {
        let (start, end) = self.words(phrase);
        self.spans.push(Span::new(start, end, tag.clone()));
        self.tags.push(tag);
    }

    fn punct(&mut self, p: &str) {
        self.tokens.push(p.to_string());
    }

    fn text(&self) -> String {
        let mut text = String::new();
        for token in &self.tokens {
            if !text.is_empty() && !matches!(token.as_str(), "," | ".") {
                text.push(' ');
            }
            text.push_str(token);
        }
        text
    }
}

fn lower_first(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if s.split_whitespace().next().is_some_and(|w| w.len() > 1 && w.chars().skip(1).all(char::is_lowercase)) => {
            c.to_lowercase().chain(chars).collect()
        }
        _ => s.to_string(),
    }
}

fn pick<'a>(rng: &mut ChaCha8Rng, items: &'a [&'a str]) -> &'a str {
    items.choose(rng).expect("non-empty lexicon")
}

fn one(rng: &mut ChaCha8Rng, index: usize) -> LabeledRequirement {
    let template_id = if rng.gen_bool(0.5) { 1 } else { 2 };
    let lexicon = if template_id == 1 { &ACTIVE } else { &PASSIVE };
    let modal = *GENERATED_MODALS.choose(rng).unwrap();
    let mut b = Builder { tokens: Vec::new(), spans: Vec::new(), tags: Vec::new() };

    let prefixed = rng.gen_bool(0.4);
    if prefixed {
        b.span(pick(rng, lexicon.conditions), SrlTag::Arg2);
        b.punct(",");
    }
    let subject = pick(rng, lexicon.subjects);
    let subject = if prefixed { lower_first(subject) } else { subject.to_string() };
    b.span(&subject, if template_id == 1 { SrlTag::Arg0 } else { SrlTag::Arg1 });
    let with_mod_span = index % 2 == 0;
    let (ms, me) = b.words(modal);
    if with_mod_span {
        b.spans.push(Span::new(ms, me, SrlTag::parse("ARGM-MOD")));
    }
    if template_id == 2 {
        b.words("be");
    }
    b.span(pick(rng, lexicon.verbs), SrlTag::Rel);
    if template_id == 1 {
        let count = rng.gen_range(1..=3);
        let objects: Vec<&str> = lexicon.objects.choose_multiple(rng, count).copied().collect();
        for (i, object) in objects.iter().enumerate() {
            if i > 0 {
                if i + 1 == objects.len() {
                    b.words("and");
                } else {
                    b.punct(",");
                }
            }
            b.span(object, SrlTag::Arg1);
        }
    }
    let count = rng.gen_range(0..=3);
    let variable: Vec<SrlTag> = VARIABLE_TAGS.choose_multiple(rng, count).cloned().collect();
    for tag in variable {
        b.span(pick(rng, lexicon.adjuncts(&tag)), tag);
    }
    b.punct(".");

    let text = b.text();
    let predicate = b.spans.iter().find(|s| s.tag == SrlTag::Rel).map(|s| s.start);
    let requirement = AnnotatedRequirement::new(format!("gen-{index:05}"), text, b.tokens, predicate, b.spans)
        .expect("generated spans are valid");
    LabeledRequirement { requirement, template_id, sequence: TagSequence::new(b.tags, Some(modal)) }
}

/// `n` requirements, each instantiating template 1 or 2 with an optional
/// leading condition, a modal from [`GENERATED_MODALS`], 1-3 coordinated
/// objects under template 1 and 0-3 distinct variable-part adjuncts.
pub fn reference_corpus(n: usize, seed: u64) -> Vec<LabeledRequirement> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|i| one(&mut rng, i)).collect()
}

/// Training instances reverse-engineered from [`reference_corpus`].
pub fn separable_training_set(n: usize, seed: u64) -> Vec<TrainingInstance> {
    let corpus: Vec<AnnotatedRequirement> = reference_corpus(n, seed).into_iter().map(|l| l.requirement).collect();
    reverse_engineer_training_set(&corpus, &VariableTemplate::reference_pair(), seed).instances
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{extract_tag_sequence, tokenize};
    use crate::templates::{matches, normalize_modals, TagInventory};

    #[test]
    fn generated_requirements_are_consistent() {
        let [t1, t2] = VariableTemplate::reference_pair();
        let inventory = TagInventory::default();
        for labeled in reference_corpus(300, 1) {
            let req = &labeled.requirement;
            assert_eq!(tokenize(&req.text), req.tokens, "{}", req.text);
            let seq = extract_tag_sequence(req).unwrap();
            assert_eq!(seq, labeled.sequence, "{}", req.text);
            let normalized = normalize_modals(&seq);
            let (expected, other) = if labeled.template_id == 1 { (&t1, &t2) } else { (&t2, &t1) };
            assert!(matches(expected, &normalized, &inventory).is_some(), "{}", req.text);
            assert!(matches(other, &normalized, &inventory).is_none(), "{}", req.text);
        }
    }

    #[test]
    fn deterministic_and_varied() {
        let a: Vec<String> = reference_corpus(50, 3).into_iter().map(|l| l.requirement.text).collect();
        let b: Vec<String> = reference_corpus(50, 3).into_iter().map(|l| l.requirement.text).collect();
        assert_eq!(a, b);
        let modals: std::collections::BTreeSet<_> =
            reference_corpus(100, 3).into_iter().filter_map(|l| l.sequence.modal).collect();
        assert_eq!(modals.len(), 4);
    }

    #[test]
    fn training_set_instances_are_valid() {
        let set = separable_training_set(200, 8);
        assert_eq!(set.len(), 200);
        assert!(set.iter().all(|i| (2..=5).contains(&i.tokens.len())));
        assert!(set.iter().any(|i| i.template_id == 2));
    }

    #[test]
    fn lowercasing_keeps_acronyms() {
        assert_eq!(lower_first("The system"), "the system");
        assert_eq!(lower_first("UAV link"), "UAV link");
        assert_eq!(lower_first("Flight plan"), "flight plan");
    }
}
