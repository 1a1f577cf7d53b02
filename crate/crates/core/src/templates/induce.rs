//! Automated template induction over tag sequences.
//!
//! The procedure applies the three merge categories in order:
//!
//! 1. modal verbs are normalized to `shall`;
//! 2. sequences whose fixed head (the sequence minus its trailing run of
//!    inventory tags) is identical share one backbone, the differing tails
//!    becoming the variable part;
//! 3. a head that is a proper prefix of another absorbs it, the extension
//!    joining the variable part.
//!
//! Heads live in a frequency-weighted prefix trie. A head is a backbone
//! candidate when its trie node has support of at least `min_support`, and
//! every head is grouped under the shortest candidate on its path. A leading
//! `Arg2` is set aside before grouping and becomes an optional prefix when
//! only some members of a group carry it.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::{matches, normalize_modals, repeatable, BackboneSlot, TagInventory, TemplateError, VariableTemplate};
use crate::corpus::{SrlTag, TagSequence};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MergeRule {
    ModalNormalization,
    VariablePart,
    ProperPrefix,
}

impl MergeRule {
    pub fn category(self) -> u8 {
        match self {
            MergeRule::ModalNormalization => 1,
            MergeRule::VariablePart => 2,
            MergeRule::ProperPrefix => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct MergeEvent {
    pub category: u8,
    pub rule: MergeRule,
    pub inputs: Vec<String>,
    pub output: String,
}

impl MergeEvent {
    fn new(rule: MergeRule, inputs: Vec<String>, output: String) -> Self {
        MergeEvent { category: rule.category(), rule, inputs, output }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UncoveredSequence {
    pub sequence: TagSequence,
    pub rendered: String,
    pub frequency: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InductionReport {
    pub templates: Vec<VariableTemplate>,
    /// Base inventory plus every tag that ended up inside a variable part.
    pub inventory: TagInventory,
    pub min_support: usize,
    pub total: usize,
    pub covered: usize,
    pub uncovered: Vec<UncoveredSequence>,
    pub merge_log: Vec<MergeEvent>,
}

impl InductionReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report always serializes")
    }
}

/// Induces templates with the default five-tag inventory.
pub fn induce_templates(seqs: &[TagSequence], min_support: usize) -> Result<InductionReport, TemplateError> {
    induce_templates_with(seqs, min_support, &TagInventory::default())
}

struct Member {
    head: Vec<SrlTag>,
    tail: Vec<SrlTag>,
    has_prefix: bool,
    frequency: usize,
}

pub fn induce_templates_with(
    seqs: &[TagSequence],
    min_support: usize,
    base_inventory: &TagInventory,
) -> Result<InductionReport, TemplateError> {
    if min_support < 1 {
        return Err(TemplateError::InvalidArgument("min_support must be at least 1".into()));
    }
    if seqs.is_empty() {
        return Err(TemplateError::InvalidArgument("no tag sequences to induce from".into()));
    }

    let mut merge_log = modal_events(seqs);

    let mut frequencies: BTreeMap<TagSequence, usize> = BTreeMap::new();
    for seq in seqs {
        *frequencies.entry(normalize_modals(seq)).or_default() += 1;
    }

    // Decompose eligible sequences into (prefix flag, head, tail).
    let mut decomposed: BTreeMap<(Vec<SrlTag>, Vec<SrlTag>, bool), usize> = BTreeMap::new();
    for (seq, &freq) in &frequencies {
        if let Some((has_prefix, head, tail)) = decompose(seq, base_inventory) {
            *decomposed.entry((head, tail, has_prefix)).or_default() += freq;
        }
    }

    let mut support: BTreeMap<&[SrlTag], usize> = BTreeMap::new();
    let mut heads: BTreeSet<&[SrlTag]> = BTreeSet::new();
    for ((head, _, _), &freq) in &decomposed {
        heads.insert(head);
        for end in 1..=head.len() {
            *support.entry(&head[..end]).or_default() += freq;
        }
    }
    let candidate = |h: &[SrlTag]| heads.contains(h) && support.get(h).copied().unwrap_or(0) >= min_support;

    let mut groups: BTreeMap<Vec<SrlTag>, Vec<Member>> = BTreeMap::new();
    for ((head, tail, has_prefix), &freq) in &decomposed {
        let root = (1..=head.len()).map(|end| &head[..end]).find(|p| candidate(p));
        if let Some(root) = root {
            groups.entry(root.to_vec()).or_default().push(Member {
                head: head.clone(),
                tail: tail.clone(),
                has_prefix: *has_prefix,
                frequency: freq,
            });
        }
    }

    let mut inventory = base_inventory.clone();
    let mut built: Vec<(Vec<BackboneSlot>, Vec<MergeEvent>)> = Vec::new();
    for (root, members) in &groups {
        let with_prefix: usize = members.iter().filter(|m| m.has_prefix).map(|m| m.frequency).sum();
        let group_total: usize = members.iter().map(|m| m.frequency).sum();
        let residues: Vec<Vec<SrlTag>> = members
            .iter()
            .map(|m| m.head[root.len()..].iter().chain(&m.tail).cloned().collect())
            .collect();

        let mut backbone = Vec::new();
        if with_prefix == group_total {
            backbone.push(BackboneSlot::Fixed(SrlTag::Arg2));
        } else if with_prefix > 0 {
            backbone.push(BackboneSlot::OptPrefix(SrlTag::Arg2));
        }
        for tag in root {
            if *tag == SrlTag::Rel {
                backbone.push(BackboneSlot::Modal);
            }
            backbone.push(BackboneSlot::Fixed(tag.clone()));
        }
        if residues.iter().any(|r| !r.is_empty()) {
            backbone.push(BackboneSlot::VariablePart);
            for tag in residues.iter().flatten() {
                inventory.insert(tag.clone());
            }
        }

        let pattern: String = backbone.iter().map(ToString::to_string).collect();
        let mut events = Vec::new();
        let distinct_heads: BTreeSet<&Vec<SrlTag>> = members.iter().map(|m| &m.head).collect();
        if distinct_heads.len() > 1 {
            let inputs = distinct_heads.iter().map(|h| render_normalized(h)).collect();
            events.push(MergeEvent::new(MergeRule::ProperPrefix, inputs, pattern.clone()));
        }
        for head in &distinct_heads {
            let tails: BTreeSet<&Vec<SrlTag>> =
                members.iter().filter(|m| &m.head == *head).map(|m| &m.tail).collect();
            if tails.len() > 1 {
                let inputs = tails
                    .iter()
                    .map(|t| render_normalized(&head.iter().chain(t.iter()).cloned().collect::<Vec<_>>()))
                    .collect();
                events.push(MergeEvent::new(MergeRule::VariablePart, inputs, pattern.clone()));
            }
        }
        built.push((backbone, events));
    }

    // Ids follow the backbone order of the fixed head so that they do not
    // depend on input order.
    built.sort_by(|a, b| head_key(&a.0).cmp(&head_key(&b.0)).then_with(|| a.0.cmp(&b.0)));
    let mut templates = Vec::with_capacity(built.len());
    for (i, (backbone, events)) in built.into_iter().enumerate() {
        let id = i as u32 + 1;
        templates.push(VariableTemplate::new(id, backbone)?);
        for mut e in events {
            e.output = format!("{id}: {}", e.output);
            merge_log.push(e);
        }
    }
    merge_log.sort();

    let mut covered = 0;
    let mut uncovered = Vec::new();
    for (seq, &freq) in &frequencies {
        if templates.iter().any(|t| matches(t, seq, &inventory).is_some()) {
            covered += freq;
        } else {
            uncovered.push(UncoveredSequence { rendered: seq.to_string(), sequence: seq.clone(), frequency: freq });
        }
    }
    uncovered.sort_by(|a, b| b.frequency.cmp(&a.frequency).then_with(|| a.sequence.cmp(&b.sequence)));

    Ok(InductionReport {
        templates,
        inventory,
        min_support,
        total: seqs.len(),
        covered,
        uncovered,
        merge_log,
    })
}

/// Splits a normalized sequence into (leading Arg2 flag, fixed head, tail).
/// Returns `None` for sequences that cannot form a backbone: those carrying
/// unmapped tags or not exactly one predicate.
fn decompose(seq: &TagSequence, inventory: &TagInventory) -> Option<(bool, Vec<SrlTag>, Vec<SrlTag>)> {
    if seq.has_other() || seq.tags.iter().filter(|t| **t == SrlTag::Rel).count() != 1 {
        return None;
    }
    let has_prefix = seq.tags.len() > 1 && seq.tags[0] == SrlTag::Arg2;
    let body = &seq.tags[usize::from(has_prefix)..];

    let mut collapsed: Vec<SrlTag> = Vec::with_capacity(body.len());
    for tag in body {
        if repeatable(tag) && collapsed.last() == Some(tag) {
            continue;
        }
        collapsed.push(tag.clone());
    }
    let head_len = collapsed.iter().rposition(|t| !inventory.contains(t)).map_or(0, |p| p + 1);
    let tail = collapsed.split_off(head_len);
    Some((has_prefix, collapsed, tail))
}

fn head_key(backbone: &[BackboneSlot]) -> Vec<SrlTag> {
    backbone
        .iter()
        .filter_map(|s| match s {
            BackboneSlot::Fixed(t) => Some(t.clone()),
            _ => None,
        })
        .collect()
}

fn render_normalized(tags: &[SrlTag]) -> String {
    TagSequence::new(tags.to_vec(), Some("shall")).to_string()
}

fn modal_events(seqs: &[TagSequence]) -> Vec<MergeEvent> {
    let mut by_tags: BTreeMap<&[SrlTag], BTreeSet<&str>> = BTreeMap::new();
    for seq in seqs {
        if let Some(m) = seq.modal.as_deref() {
            by_tags.entry(&seq.tags).or_default().insert(m);
        }
    }
    by_tags
        .into_iter()
        .filter(|(_, modals)| modals.iter().any(|m| *m != "shall"))
        .map(|(tags, modals)| {
            let inputs = modals
                .iter()
                .map(|m| TagSequence::new(tags.to_vec(), Some(m)).to_string())
                .collect();
            MergeEvent::new(MergeRule::ModalNormalization, inputs, render_normalized(tags))
        })
        .collect()
}
