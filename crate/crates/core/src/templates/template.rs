use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::TemplateError;
use crate::corpus::SrlTag;

/// One position of a template backbone.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BackboneSlot {
    /// A tag that every instance carries.
    Fixed(SrlTag),
    /// The normalized modal verb, always rendered `shall`.
    Modal,
    /// Optional leading tag, `[Arg2]*` in the bracket syntax.
    OptPrefix(SrlTag),
    /// The optional trailing part that holds any inventory tags.
    VariablePart,
}

impl fmt::Display for BackboneSlot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BackboneSlot::Fixed(tag) => write!(f, "[{tag}]"),
            BackboneSlot::Modal => f.write_str("[shall]"),
            BackboneSlot::OptPrefix(tag) => write!(f, "[{tag}]*"),
            BackboneSlot::VariablePart => f.write_str("[variable part]*"),
        }
    }
}

/// A variable SRL template: a fixed backbone with an optional leading tag and
/// an optional trailing variable part.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VariableTemplate {
    pub id: u32,
    backbone: Vec<BackboneSlot>,
}

impl VariableTemplate {
    /// Builds a template after checking the backbone shape: one modal that
    /// directly precedes the only predicate, an optional prefix only at the
    /// front and an optional variable part only at the end.
    pub fn new(id: u32, backbone: Vec<BackboneSlot>) -> Result<Self, TemplateError> {
        let invalid = |reason: &str| TemplateError::InvalidTemplate { id, reason: reason.to_string() };
        let modals: Vec<usize> = positions(&backbone, |s| *s == BackboneSlot::Modal);
        let rels = positions(&backbone, |s| *s == BackboneSlot::Fixed(SrlTag::Rel));
        if modals.len() != 1 {
            return Err(invalid("expected exactly one modal slot"));
        }
        if rels.len() != 1 {
            return Err(invalid("expected exactly one [V] slot"));
        }
        if rels[0] != modals[0] + 1 {
            return Err(invalid("the modal slot must directly precede [V]"));
        }
        let prefixes = positions(&backbone, |s| matches!(s, BackboneSlot::OptPrefix(_)));
        if prefixes.len() > 1 || prefixes.first().is_some_and(|&p| p != 0) {
            return Err(invalid("an optional prefix may only appear once, at the front"));
        }
        let variables = positions(&backbone, |s| *s == BackboneSlot::VariablePart);
        if variables.len() > 1 || variables.first().is_some_and(|&p| p + 1 != backbone.len()) {
            return Err(invalid("a variable part may only appear once, at the end"));
        }
        Ok(VariableTemplate { id, backbone })
    }

    /// The two templates induced from the reference requirement collection.
    pub fn reference_pair() -> [VariableTemplate; 2] {
        use BackboneSlot::*;
        [
            VariableTemplate {
                id: 1,
                backbone: vec![
                    OptPrefix(SrlTag::Arg2),
                    Fixed(SrlTag::Arg0),
                    Modal,
                    Fixed(SrlTag::Rel),
                    Fixed(SrlTag::Arg1),
                    VariablePart,
                ],
            },
            VariableTemplate {
                id: 2,
                backbone: vec![
                    OptPrefix(SrlTag::Arg2),
                    Fixed(SrlTag::Arg1),
                    Modal,
                    Fixed(SrlTag::Rel),
                    VariablePart,
                ],
            },
        ]
    }

    pub fn backbone(&self) -> &[BackboneSlot] {
        &self.backbone
    }

    pub fn opt_prefix(&self) -> Option<&SrlTag> {
        match self.backbone.first() {
            Some(BackboneSlot::OptPrefix(tag)) => Some(tag),
            _ => None,
        }
    }

    pub fn has_variable_part(&self) -> bool {
        self.backbone.last() == Some(&BackboneSlot::VariablePart)
    }

    /// Tags of the fixed slots in order.
    pub fn fixed_tags(&self) -> impl Iterator<Item = &SrlTag> {
        self.backbone.iter().filter_map(|s| match s {
            BackboneSlot::Fixed(tag) => Some(tag),
            _ => None,
        })
    }

    /// Bracket pattern without the id, e.g. `[Arg1][shall][V][variable part]*`.
    pub fn pattern(&self) -> String {
        self.backbone.iter().map(ToString::to_string).collect()
    }
}

fn positions(slots: &[BackboneSlot], pred: impl Fn(&BackboneSlot) -> bool) -> Vec<usize> {
    slots.iter().enumerate().filter(|(_, s)| pred(s)).map(|(i, _)| i).collect()
}

impl fmt::Display for VariableTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.id, self.pattern())
    }
}

#[derive(Serialize, Deserialize)]
struct TemplateRecord {
    id: u32,
    pattern: String,
}

impl Serialize for VariableTemplate {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        TemplateRecord { id: self.id, pattern: self.pattern() }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for VariableTemplate {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let rec = TemplateRecord::deserialize(deserializer)?;
        parse_template_line(&format!("{}: {}", rec.id, rec.pattern)).map_err(serde::de::Error::custom)
    }
}

/// Parses one `id: [..][..]` line.
pub fn parse_template_line(line: &str) -> Result<VariableTemplate, TemplateError> {
    let syntax = |reason: String| TemplateError::Syntax { line: line.to_string(), reason };
    let (id, pattern) = line
        .split_once(':')
        .ok_or_else(|| syntax("missing `id:` prefix".into()))?;
    let id: u32 = id
        .trim()
        .parse()
        .map_err(|_| syntax(format!("template id `{}` is not an integer", id.trim())))?;

    let mut slots = Vec::new();
    let mut rest = pattern.trim();
    while !rest.is_empty() {
        let body = rest
            .strip_prefix('[')
            .ok_or_else(|| syntax(format!("expected `[` at `{rest}`")))?;
        let close = body.find(']').ok_or_else(|| syntax("unclosed `[`".into()))?;
        let name = body[..close].trim();
        rest = &body[close + 1..];
        let starred = rest.starts_with('*');
        if starred {
            rest = &rest[1..];
        }
        let slot = if name.eq_ignore_ascii_case("shall") {
            if starred {
                return Err(syntax("the modal slot cannot be optional".into()));
            }
            BackboneSlot::Modal
        } else if name.eq_ignore_ascii_case("variable part") {
            BackboneSlot::VariablePart
        } else if name.is_empty() {
            return Err(syntax("empty slot name".into()));
        } else if starred {
            BackboneSlot::OptPrefix(SrlTag::parse(name))
        } else {
            BackboneSlot::Fixed(SrlTag::parse(name))
        };
        slots.push(slot);
    }
    VariableTemplate::new(id, slots)
}

/// Parses a template file: one template per line, blank lines and `#`
/// comments ignored, ids unique.
pub fn parse_templates(text: &str) -> Result<Vec<VariableTemplate>, TemplateError> {
    let mut seen = HashSet::new();
    let mut templates = Vec::new();
    for line in text.lines().map(str::trim) {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let t = parse_template_line(line)?;
        if !seen.insert(t.id) {
            return Err(TemplateError::DuplicateId(t.id));
        }
        templates.push(t);
    }
    Ok(templates)
}

pub fn render_templates(templates: &[VariableTemplate]) -> String {
    templates.iter().map(|t| format!("{t}\n")).collect()
}

/// Tags allowed inside a variable part.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TagInventory {
    tags: BTreeSet<SrlTag>,
}

impl Default for TagInventory {
    fn default() -> Self {
        TagInventory::new([
            SrlTag::Arg2,
            SrlTag::ArgmPrp,
            SrlTag::ArgmTmp,
            SrlTag::ArgmLoc,
            SrlTag::ArgmBnf,
        ])
    }
}

impl TagInventory {
    pub fn new(tags: impl IntoIterator<Item = SrlTag>) -> Self {
        TagInventory { tags: tags.into_iter().collect() }
    }

    pub fn empty() -> Self {
        TagInventory { tags: BTreeSet::new() }
    }

    pub fn contains(&self, tag: &SrlTag) -> bool {
        self.tags.contains(tag)
    }

    pub fn insert(&mut self, tag: SrlTag) -> bool {
        self.tags.insert(tag)
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }

    /// Tags in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = &SrlTag> {
        self.tags.iter()
    }
}
