use crate::recommender::{FeatureToken, TemplateVariant};

const ROLE_LEGEND: &str = "0 = condition, 1 = subject, 2 = action, 3 = object, 4 = constraint";

/// Template-injected prompt: the role-numbered token list, the rendered
/// variant, then the output instruction.
pub fn build_prompt(tokens: &[FeatureToken], variant: &TemplateVariant) -> String {
    let token_list = tokens
        .iter()
        .map(|t| format!("{}, {}", t.text, t.role.code()))
        .collect::<Vec<_>>()
        .join(", ");
    format!(
        "Feature tokens with ISO 29148 syntactic roles ({ROLE_LEGEND}):\n\
         {token_list}\n\
         \n\
         SRL template variant:\n\
         {}\n\
         \n\
         Write exactly one functional requirement sentence that follows the template variant \
         and uses every token above in its stated role. Output only that sentence.\n",
        variant.rendered
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{IsoRole, SrlTag};
    use crate::recommender::{construct_variant, VariantOptions};
    use crate::templates::VariableTemplate;

    #[test]
    fn prompt_carries_roles_and_variant() {
        let tokens = FeatureToken::list([("Flight plan", IsoRole::Subject), ("UAV", IsoRole::Constraint)]).unwrap();
        let variant = construct_variant(
            &VariableTemplate::reference_pair()[0],
            &tokens,
            &[SrlTag::Arg0, SrlTag::ArgmBnf],
            &VariantOptions::default(),
        )
        .unwrap();
        let prompt = build_prompt(&tokens, &variant);
        assert!(prompt.contains("Flight plan, 1"));
        assert!(prompt.contains("UAV, 4"));
        assert!(prompt.contains(&variant.rendered));
        assert!(prompt.contains("exactly one functional requirement sentence"));
        assert_eq!(prompt, build_prompt(&tokens, &variant));
    }
}
