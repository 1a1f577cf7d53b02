use super::{TagInventory, TemplateError, VariableTemplate};

/// Number of distinct variants the templates can express when every
/// inventory tag appears at most once in a variable part.
///
/// Per template: (2 if it has an optional prefix, else 1) times the number of
/// ordered arrangements of 0..=n distinct inventory tags (1 without a
/// variable part). Templates are summed.
pub fn count_variants(
    templates: &[VariableTemplate],
    inventory: &TagInventory,
    max_occurrence: usize,
) -> Result<u64, TemplateError> {
    if max_occurrence != 1 {
        return Err(TemplateError::Unsupported(format!(
            "variant counting with max_occurrence = {max_occurrence}; only 1 is implemented"
        )));
    }
    let arrangements = arrangement_count(inventory.len() as u64);
    let total = templates
        .iter()
        .map(|t| {
            let prefix_choices = if t.opt_prefix().is_some() { 2 } else { 1 };
            let tails = if t.has_variable_part() { arrangements } else { 1 };
            prefix_choices * tails
        })
        .sum();
    Ok(total)
}

/// `1 + sum_{k=1..n} n!/(n-k)!`.
fn arrangement_count(n: u64) -> u64 {
    let mut total = 1;
    let mut falling = 1;
    for k in 0..n {
        falling *= n - k;
        total += falling;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::SrlTag;
    use crate::templates::BackboneSlot;

    #[test]
    fn reference_templates_give_1304() {
        let templates = VariableTemplate::reference_pair();
        assert_eq!(count_variants(&templates, &TagInventory::default(), 1).unwrap(), 1304);
    }

    #[test]
    fn bare_template_counts_once() {
        let t = VariableTemplate::new(
            1,
            vec![BackboneSlot::Fixed(SrlTag::Arg0), BackboneSlot::Modal, BackboneSlot::Fixed(SrlTag::Rel), BackboneSlot::VariablePart],
        )
        .unwrap();
        assert_eq!(count_variants(&[t], &TagInventory::empty(), 1).unwrap(), 1);
    }

    #[test]
    fn prefix_with_two_tags_gives_ten() {
        let [t1, _] = VariableTemplate::reference_pair();
        let inv = TagInventory::new([SrlTag::ArgmTmp, SrlTag::ArgmLoc]);
        assert_eq!(count_variants(&[t1], &inv, 1).unwrap(), 10);
    }

    #[test]
    fn repeated_occurrence_is_unsupported() {
        let templates = VariableTemplate::reference_pair();
        assert!(matches!(
            count_variants(&templates, &TagInventory::default(), 2),
            Err(TemplateError::Unsupported(_))
        ));
    }

    #[test]
    fn arrangement_counts() {
        assert_eq!(arrangement_count(0), 1);
        assert_eq!(arrangement_count(2), 5);
        assert_eq!(arrangement_count(5), 326);
    }
}
