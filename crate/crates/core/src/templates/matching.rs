use std::ops::Range;

use serde::Serialize;

use super::{BackboneSlot, TagInventory, VariableTemplate};
use crate::corpus::{SrlTag, TagSequence};

/// Which sequence positions each backbone slot consumed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Binding {
    /// One range per backbone slot, in backbone order. The modal slot, an
    /// absent prefix and an empty variable part have empty ranges.
    pub slot_ranges: Vec<Range<usize>>,
    pub prefix_bound: bool,
    pub variable_part: Vec<SrlTag>,
}

/// Fixed tags that may repeat in place (coordinated arguments).
pub fn repeatable(tag: &SrlTag) -> bool {
    *tag == SrlTag::Arg1
}

/// Tests whether `seq` is an expansion of `template`.
///
/// The optional prefix may be present or absent, fixed `Arg1` slots absorb
/// runs of repeated `Arg1`, and the variable part takes any number of
/// trailing inventory tags. Preference order when several bindings exist:
/// prefix bound, longest `Arg1` runs.
pub fn matches(template: &VariableTemplate, seq: &TagSequence, inventory: &TagInventory) -> Option<Binding> {
    let slots = template.backbone();
    let mut ranges = Vec::with_capacity(slots.len());
    if bind(slots, &seq.tags, inventory, 0, 0, &mut ranges) {
        let prefix_bound = template.opt_prefix().is_some() && !ranges[0].is_empty();
        let variable_part = if template.has_variable_part() {
            seq.tags[ranges.last().unwrap().clone()].to_vec()
        } else {
            Vec::new()
        };
        Some(Binding { slot_ranges: ranges, prefix_bound, variable_part })
    } else {
        None
    }
}

fn bind(
    slots: &[BackboneSlot],
    tags: &[SrlTag],
    inventory: &TagInventory,
    si: usize,
    ti: usize,
    ranges: &mut Vec<Range<usize>>,
) -> bool {
    let Some(slot) = slots.get(si) else {
        return ti == tags.len();
    };
    let attempt = |len: usize, ranges: &mut Vec<Range<usize>>| {
        ranges.push(ti..ti + len);
        if bind(slots, tags, inventory, si + 1, ti + len, ranges) {
            return true;
        }
        ranges.pop();
        false
    };
    match slot {
        BackboneSlot::Modal => attempt(0, ranges),
        BackboneSlot::OptPrefix(tag) => {
            (tags.get(ti) == Some(tag) && attempt(1, ranges)) || attempt(0, ranges)
        }
        BackboneSlot::Fixed(tag) => {
            let run = tags[ti..].iter().take_while(|t| *t == tag).count();
            let longest = if repeatable(tag) { run } else { run.min(1) };
            (1..=longest).rev().any(|len| attempt(len, ranges))
        }
        BackboneSlot::VariablePart => {
            tags[ti..].iter().all(|t| inventory.contains(t)) && attempt(tags.len() - ti, ranges)
        }
    }
}
