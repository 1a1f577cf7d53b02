use super::{Draft, GenerationError, GenerationMode, Provenance};
use crate::corpus::sentence_count;
use crate::recommender::{TemplateVariant, VariantSlot, VariantSlotKind};
use crate::templates::BackboneSlot;

/// Placeholder for a mandatory slot left unbound in permissive mode.
pub const PLACEHOLDER: &str = "<TBD>";

fn join_coordinated(items: &[&str]) -> String {
    match items {
        [] => String::new(),
        [one] => one.to_string(),
        [init @ .., last] => format!("{} and {last}", init.join(", ")),
    }
}

/// Renders a variant as an English sentence.
///
/// Bound tokens are written in slot order with `shall` at the modal
/// position; consecutive tokens of one coordinated slot are joined with
/// commas and `and`. An unbound optional prefix and an empty variable part
/// are skipped. Unbound fixed slots are an error, or `<TBD>` when
/// `permissive` is set.
pub fn realize(variant: &TemplateVariant, permissive: bool) -> Result<Draft, GenerationError> {
    let mut words: Vec<String> = Vec::new();
    let mut missing = Vec::new();
    let mut i = 0;
    let slots = &variant.slots;
    while i < slots.len() {
        let slot = &slots[i];
        match (&slot.kind, &slot.token) {
            (VariantSlotKind::Backbone(BackboneSlot::Modal), _) => words.push("shall".into()),
            (VariantSlotKind::Backbone(BackboneSlot::Fixed(tag)), None) => {
                if permissive {
                    words.push(PLACEHOLDER.into());
                } else {
                    missing.push(tag.bracket_name().to_string());
                }
            }
            (VariantSlotKind::Backbone(BackboneSlot::Fixed(_)), Some(_)) => {
                let run: Vec<&VariantSlot> =
                    slots[i..].iter().take_while(|s| s.kind == slot.kind && s.token.is_some()).collect();
                let texts: Vec<&str> = run.iter().map(|s| s.token.as_ref().unwrap().text.as_str()).collect();
                words.push(join_coordinated(&texts));
                i += run.len();
                continue;
            }
            (VariantSlotKind::Backbone(BackboneSlot::OptPrefix(_)) | VariantSlotKind::Variable(_), Some(t)) => {
                words.push(t.text.clone())
            }
            _ => {}
        }
        i += 1;
    }
    if !missing.is_empty() {
        return Err(GenerationError::UnboundSlots(missing));
    }
    let mut text = words.join(" ");
    while text.ends_with(['.', '!', '?', ',', ';', ':', ' ']) {
        text.pop();
    }
    if text.is_empty() {
        return Err(GenerationError::Empty);
    }
    text.push('.');
    if sentence_count(&text) != 1 {
        return Err(GenerationError::MultiSentence(text));
    }
    Ok(Draft {
        text,
        provenance: Provenance::realizer(),
        variant_ref: variant.rendered.clone(),
    })
}

impl Provenance {
    pub fn realizer() -> Self {
        Provenance { mode: GenerationMode::Realizer, deterministic: true, attempts: 0, endpoint: None, model: None }
    }
}
