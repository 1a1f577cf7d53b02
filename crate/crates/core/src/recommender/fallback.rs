//! Rule-based recommendation and the SRL-to-ISO role mapping.

use super::FeatureToken;
use crate::corpus::{IsoRole, SrlTag};

const TEMPORAL: [&str; 6] = ["within", "after", "before", "when", "while", "during"];
const LOCATIVE: [&str; 3] = ["on", "at", "in"];

/// Adjunct tag for a constraint phrase, chosen by its leading word.
pub fn constraint_tag(text: &str) -> SrlTag {
    let first = text.split_whitespace().next().unwrap_or("").to_lowercase();
    if first == "to" {
        SrlTag::ArgmPrp
    } else if TEMPORAL.contains(&first.as_str()) {
        SrlTag::ArgmTmp
    } else if LOCATIVE.contains(&first.as_str()) {
        SrlTag::ArgmLoc
    } else {
        SrlTag::ArgmBnf
    }
}

/// Tags the rule table assigns under `template_id`. Subjects become `Arg1`
/// under template 2, `Arg0` otherwise.
pub fn fallback_tags(tokens: &[FeatureToken], template_id: u32) -> Vec<SrlTag> {
    tokens
        .iter()
        .map(|t| match t.role {
            IsoRole::Subject if template_id == 2 => SrlTag::Arg1,
            IsoRole::Subject => SrlTag::Arg0,
            IsoRole::Action => SrlTag::Rel,
            IsoRole::Object => SrlTag::Arg1,
            IsoRole::Condition => SrlTag::Arg2,
            IsoRole::Constraint => constraint_tag(&t.text),
        })
        .collect()
}

/// Template 2 when the feature has a subject but neither action nor object,
/// template 1 otherwise.
pub fn fallback_recommend(tokens: &[FeatureToken]) -> (u32, Vec<SrlTag>) {
    let has = |role| tokens.iter().any(|t| t.role == role);
    let template_id = if !has(IsoRole::Action) && !has(IsoRole::Object) && has(IsoRole::Subject) { 2 } else { 1 };
    (template_id, fallback_tags(tokens, template_id))
}

/// ISO role of a span tagged `tag`. `leading` marks the first span of the
/// frame, `before_predicate` a span left of the predicate.
///
/// An `Arg1` left of the predicate is the grammatical subject of a passive
/// frame and maps to SUBJECT.
pub fn iso_role_for(tag: &SrlTag, leading: bool, before_predicate: bool) -> IsoRole {
    match tag {
        SrlTag::Arg0 => IsoRole::Subject,
        SrlTag::Rel => IsoRole::Action,
        SrlTag::Arg1 if before_predicate => IsoRole::Subject,
        SrlTag::Arg1 => IsoRole::Object,
        SrlTag::Arg2 if leading => IsoRole::Condition,
        _ => IsoRole::Constraint,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(pairs: &[(&str, IsoRole)]) -> Vec<FeatureToken> {
        FeatureToken::list(pairs.iter().copied()).unwrap()
    }

    #[test]
    fn fallback_example() {
        let tokens = toks(&[
            ("The system", IsoRole::Subject),
            ("display", IsoRole::Action),
            ("alarm status", IsoRole::Object),
        ]);
        assert_eq!(fallback_recommend(&tokens), (1, vec![SrlTag::Arg0, SrlTag::Rel, SrlTag::Arg1]));
    }

    #[test]
    fn constraint_heuristics() {
        assert_eq!(constraint_tag("UAV"), SrlTag::ArgmBnf);
        assert_eq!(constraint_tag("within 2 seconds"), SrlTag::ArgmTmp);
        assert_eq!(constraint_tag("To digitally sign"), SrlTag::ArgmPrp);
        assert_eq!(constraint_tag("on the dashboard"), SrlTag::ArgmLoc);
    }

    #[test]
    fn action_maps_to_rel() {
        assert_eq!(fallback_recommend(&toks(&[("x", IsoRole::Action)])).1, [SrlTag::Rel]);
    }

    #[test]
    fn subject_only_selects_template_two() {
        let (id, tags) = fallback_recommend(&toks(&[("The log", IsoRole::Subject), ("daily", IsoRole::Constraint)]));
        assert_eq!(id, 2);
        assert_eq!(tags, [SrlTag::Arg1, SrlTag::ArgmBnf]);
        assert_eq!(fallback_recommend(&toks(&[("UAV", IsoRole::Constraint)])).0, 1);
    }

    #[test]
    fn inverse_mapping() {
        assert_eq!(iso_role_for(&SrlTag::Arg2, true, true), IsoRole::Condition);
        assert_eq!(iso_role_for(&SrlTag::Arg2, false, false), IsoRole::Constraint);
        assert_eq!(iso_role_for(&SrlTag::Arg1, false, true), IsoRole::Subject);
        assert_eq!(iso_role_for(&SrlTag::Arg1, false, false), IsoRole::Object);
        assert_eq!(iso_role_for(&SrlTag::ArgmTmp, false, false), IsoRole::Constraint);
        assert_eq!(iso_role_for(&SrlTag::parse("ARGM-MNR"), false, false), IsoRole::Constraint);
    }
}
