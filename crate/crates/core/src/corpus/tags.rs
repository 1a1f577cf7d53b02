use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A PropBank-derived semantic role.
///
/// The eight named variants are the high-frequency roles used by the
/// templates; declaration order is the canonical tie-break order. Any other
/// label is carried verbatim in [`SrlTag::Other`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SrlTag {
    Rel,
    Arg0,
    Arg1,
    Arg2,
    ArgmPrp,
    ArgmTmp,
    ArgmLoc,
    ArgmBnf,
    /// Unmapped label. Construct through [`SrlTag::parse`] so that a label
    /// naming one of the variants above is never stored here.
    Other(String),
}

impl SrlTag {
    /// The eight named tags in canonical order.
    pub const NAMED: [SrlTag; 8] = [
        SrlTag::Rel,
        SrlTag::Arg0,
        SrlTag::Arg1,
        SrlTag::Arg2,
        SrlTag::ArgmPrp,
        SrlTag::ArgmTmp,
        SrlTag::ArgmLoc,
        SrlTag::ArgmBnf,
    ];

    /// Parses a tag from PropBank surface form (`V`, `ARG0`, `ARGM-PRP`),
    /// bracket form (`Arg0`, `ArgM-PRP`) or identifier form (`ARGM_PRP`).
    /// Matching is case-insensitive; unknown labels become `Other` verbatim.
    pub fn parse(label: &str) -> SrlTag {
        let key = label.trim().to_ascii_uppercase().replace('_', "-");
        match key.as_str() {
            "V" | "REL" => SrlTag::Rel,
            "ARG0" => SrlTag::Arg0,
            "ARG1" => SrlTag::Arg1,
            "ARG2" => SrlTag::Arg2,
            "ARGM-PRP" => SrlTag::ArgmPrp,
            "ARGM-TMP" => SrlTag::ArgmTmp,
            "ARGM-LOC" => SrlTag::ArgmLoc,
            "ARGM-BNF" => SrlTag::ArgmBnf,
            _ => SrlTag::Other(label.to_string()),
        }
    }

    /// Position in the canonical order, `None` for `Other`.
    pub fn index(&self) -> Option<usize> {
        SrlTag::NAMED.iter().position(|t| t == self)
    }

    pub fn from_index(index: usize) -> Option<SrlTag> {
        SrlTag::NAMED.get(index).cloned()
    }

    pub fn is_other(&self) -> bool {
        matches!(self, SrlTag::Other(_))
    }

    /// Surface form used in annotation files.
    pub fn propbank(&self) -> &str {
        match self {
            SrlTag::Rel => "V",
            SrlTag::Arg0 => "ARG0",
            SrlTag::Arg1 => "ARG1",
            SrlTag::Arg2 => "ARG2",
            SrlTag::ArgmPrp => "ARGM-PRP",
            SrlTag::ArgmTmp => "ARGM-TMP",
            SrlTag::ArgmLoc => "ARGM-LOC",
            SrlTag::ArgmBnf => "ARGM-BNF",
            SrlTag::Other(label) => label,
        }
    }

    /// Name used inside template brackets, e.g. `Arg0` or `ArgM-BNF`.
    pub fn bracket_name(&self) -> &str {
        match self {
            SrlTag::Rel => "V",
            SrlTag::Arg0 => "Arg0",
            SrlTag::Arg1 => "Arg1",
            SrlTag::Arg2 => "Arg2",
            SrlTag::ArgmPrp => "ArgM-PRP",
            SrlTag::ArgmTmp => "ArgM-TMP",
            SrlTag::ArgmLoc => "ArgM-LOC",
            SrlTag::ArgmBnf => "ArgM-BNF",
            SrlTag::Other(label) => label,
        }
    }
}

impl fmt::Display for SrlTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.bracket_name())
    }
}

impl FromStr for SrlTag {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(SrlTag::parse(s))
    }
}

impl Serialize for SrlTag {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.propbank())
    }
}

impl<'de> Deserialize<'de> for SrlTag {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let label = String::deserialize(deserializer)?;
        Ok(SrlTag::parse(&label))
    }
}

/// ISO 29148 syntactic role of a feature token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IsoRole {
    Condition,
    Subject,
    Action,
    Object,
    Constraint,
}

impl IsoRole {
    pub const ALL: [IsoRole; 5] = [
        IsoRole::Condition,
        IsoRole::Subject,
        IsoRole::Action,
        IsoRole::Object,
        IsoRole::Constraint,
    ];

    /// Stable numeric encoding used in instance files and prompts.
    pub fn code(self) -> u8 {
        match self {
            IsoRole::Condition => 0,
            IsoRole::Subject => 1,
            IsoRole::Action => 2,
            IsoRole::Object => 3,
            IsoRole::Constraint => 4,
        }
    }

    pub fn from_code(code: u8) -> Option<IsoRole> {
        IsoRole::ALL.get(code as usize).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            IsoRole::Condition => "condition",
            IsoRole::Subject => "subject",
            IsoRole::Action => "action",
            IsoRole::Object => "object",
            IsoRole::Constraint => "constraint",
        }
    }
}

impl fmt::Display for IsoRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for IsoRole {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_u8(self.code())
    }
}

impl<'de> Deserialize<'de> for IsoRole {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let code = u8::deserialize(deserializer)?;
        IsoRole::from_code(code).ok_or_else(|| {
            serde::de::Error::custom(format!("unknown ISO role numeral {code} (expected 0-4)"))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn named_tags_follow_canonical_order() {
        let names: Vec<_> = SrlTag::NAMED.iter().map(|t| t.bracket_name()).collect();
        assert_eq!(
            names,
            ["V", "Arg0", "Arg1", "Arg2", "ArgM-PRP", "ArgM-TMP", "ArgM-LOC", "ArgM-BNF"]
        );
        for (i, tag) in SrlTag::NAMED.iter().enumerate() {
            assert_eq!(tag.index(), Some(i));
        }
    }

    #[test]
    fn propbank_surface_forms_map() {
        assert_eq!(SrlTag::parse("V"), SrlTag::Rel);
        assert_eq!(SrlTag::parse("REL"), SrlTag::Rel);
        assert_eq!(SrlTag::parse("ARGM-PRP"), SrlTag::ArgmPrp);
        assert_eq!(SrlTag::parse("ArgM-BNF"), SrlTag::ArgmBnf);
        assert_eq!(SrlTag::parse("ARGM_TMP"), SrlTag::ArgmTmp);
        assert_eq!(SrlTag::parse("ARGM-MNR"), SrlTag::Other("ARGM-MNR".into()));
    }

    #[test]
    fn iso_role_codes_are_stable() {
        let codes: Vec<u8> = IsoRole::ALL.iter().map(|r| r.code()).collect();
        assert_eq!(codes, [0, 1, 2, 3, 4]);
        assert_eq!(IsoRole::from_code(4), Some(IsoRole::Constraint));
        assert_eq!(IsoRole::from_code(5), None);
    }

    fn any_tag() -> impl Strategy<Value = SrlTag> {
        prop_oneof![
            (0usize..8).prop_map(|i| SrlTag::from_index(i).unwrap()),
            "[A-Z][A-Z0-9-]{0,8}".prop_map(|s| SrlTag::parse(&s)),
        ]
    }

    proptest! {
        #[test]
        fn render_parse_round_trip(tag in any_tag()) {
            prop_assert_eq!(SrlTag::parse(&tag.to_string()), tag.clone());
            prop_assert_eq!(SrlTag::parse(tag.propbank()), tag);
        }
    }
}
