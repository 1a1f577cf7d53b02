use serde::Serialize;

use super::{FeatureToken, RecommenderError};
use crate::corpus::SrlTag;
use crate::templates::{repeatable, BackboneSlot, TagInventory, VariableTemplate};

/// What a variant slot stands for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VariantSlotKind {
    /// A slot copied from the template backbone.
    Backbone(BackboneSlot),
    /// A tag instantiated inside the variable part.
    Variable(SrlTag),
}

/// Backbone slots serialize in bracket syntax (`[Arg0]`, `[Arg2]*`);
/// variable tags as `[variable part]:[ArgM-BNF]`.
impl Serialize for VariantSlotKind {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            VariantSlotKind::Backbone(slot) => serializer.collect_str(slot),
            VariantSlotKind::Variable(tag) => serializer.collect_str(&format_args!("[variable part]:[{tag}]")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VariantSlot {
    pub kind: VariantSlotKind,
    pub token: Option<FeatureToken>,
}

impl VariantSlot {
    fn render(&self, out: &mut String) {
        match (&self.kind, &self.token) {
            (VariantSlotKind::Backbone(BackboneSlot::Modal), _) => out.push_str("[shall]"),
            (VariantSlotKind::Backbone(BackboneSlot::VariablePart), _) => out.push_str("[variable part]"),
            (VariantSlotKind::Backbone(BackboneSlot::Fixed(tag) | BackboneSlot::OptPrefix(tag)), token)
            | (VariantSlotKind::Variable(tag), token) => {
                let name = tag.bracket_name();
                out.push('[');
                out.push_str(name);
                out.push(']');
                if let Some(token) = token {
                    out.push_str(&token.text);
                    out.push('[');
                    out.push_str(name);
                    out.push(']');
                }
            }
        }
    }

    /// Tag of a fixed, prefix or variable slot.
    pub fn tag(&self) -> Option<&SrlTag> {
        match &self.kind {
            VariantSlotKind::Backbone(BackboneSlot::Fixed(t) | BackboneSlot::OptPrefix(t)) => Some(t),
            VariantSlotKind::Variable(t) => Some(t),
            _ => None,
        }
    }
}

/// A template with feature tokens bound into its slots.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TemplateVariant {
    pub template_id: u32,
    pub slots: Vec<VariantSlot>,
    pub rendered: String,
}

impl TemplateVariant {
    fn from_slots(template_id: u32, slots: Vec<VariantSlot>) -> Self {
        let mut rendered = String::new();
        for slot in &slots {
            slot.render(&mut rendered);
        }
        TemplateVariant { template_id, slots, rendered }
    }
}

#[derive(Debug, Clone)]
pub struct VariantOptions {
    /// Tags accepted in the variable part.
    pub inventory: TagInventory,
    /// Drop an unbound optional prefix and an empty variable-part marker.
    pub prune_empty_slots: bool,
}

impl Default for VariantOptions {
    fn default() -> Self {
        VariantOptions { inventory: TagInventory::default(), prune_empty_slots: false }
    }
}

/// Binds tokens into `template`.
///
/// Tokens are placed in order: into the first unbound fixed or prefix slot
/// with the same tag, else next to an already bound repeatable slot
/// (coordination), else into the variable part when the tag is in the
/// inventory. The empty variable-part marker is kept only when no variable
/// tag was added.
pub fn construct_variant(
    template: &VariableTemplate,
    tokens: &[FeatureToken],
    tags: &[SrlTag],
    options: &VariantOptions,
) -> Result<TemplateVariant, RecommenderError> {
    if tokens.len() != tags.len() {
        return Err(RecommenderError::InvalidArgument(format!(
            "{} token(s) but {} tag(s)",
            tokens.len(),
            tags.len()
        )));
    }
    let backbone = template.backbone();
    let mut bound: Vec<Vec<&FeatureToken>> = vec![Vec::new(); backbone.len()];
    let mut variable: Vec<(&SrlTag, &FeatureToken)> = Vec::new();

    for (token, tag) in tokens.iter().zip(tags) {
        let slot_tag = |slot: &BackboneSlot| match slot {
            BackboneSlot::Fixed(t) | BackboneSlot::OptPrefix(t) => Some(t.clone()),
            _ => None,
        };
        if let Some(i) = (0..backbone.len()).find(|&i| bound[i].is_empty() && slot_tag(&backbone[i]).as_ref() == Some(tag)) {
            bound[i].push(token);
        } else if let Some(i) = (0..backbone.len()).find(|&i| {
            repeatable(tag) && matches!(&backbone[i], BackboneSlot::Fixed(t) if t == tag) && !bound[i].is_empty()
        }) {
            bound[i].push(token);
        } else if template.has_variable_part() && options.inventory.contains(tag) {
            variable.push((tag, token));
        } else {
            return Err(RecommenderError::UnplaceableToken {
                token: token.text.clone(),
                tag: tag.bracket_name().to_string(),
                template_id: template.id,
            });
        }
    }

    let mut slots = Vec::new();
    for (slot, tokens) in backbone.iter().zip(bound) {
        match slot {
            BackboneSlot::VariablePart if !variable.is_empty() => {
                slots.extend(variable.iter().map(|(tag, token)| VariantSlot {
                    kind: VariantSlotKind::Variable((*tag).clone()),
                    token: Some((*token).clone()),
                }));
            }
            BackboneSlot::VariablePart | BackboneSlot::OptPrefix(_)
                if tokens.is_empty() && options.prune_empty_slots => {}
            _ if tokens.is_empty() => {
                slots.push(VariantSlot { kind: VariantSlotKind::Backbone(slot.clone()), token: None })
            }
            _ => slots.extend(tokens.into_iter().map(|token| VariantSlot {
                kind: VariantSlotKind::Backbone(slot.clone()),
                token: Some(token.clone()),
            })),
        }
    }
    Ok(TemplateVariant::from_slots(template.id, slots))
}
