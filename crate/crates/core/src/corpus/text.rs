//! Word tokenization and sentence splitting shared by the filter, the
//! generator's first-sentence trimming and the metrics.

/// Words that end in a period without ending a sentence.
pub const ABBREVIATIONS: [&str; 6] = ["e.g.", "i.e.", "etc.", "vs.", "no.", "fig."];

const TERMINATORS: [char; 3] = ['.', '!', '?'];

fn is_abbreviation(word: &str) -> bool {
    let lower = word.to_lowercase();
    ABBREVIATIONS.contains(&lower.as_str())
}

/// Splits on whitespace and peels leading and trailing punctuation off each
/// chunk into separate one-character tokens. Abbreviations stay whole.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    for chunk in text.split_whitespace() {
        if is_abbreviation(chunk) {
            tokens.push(chunk.to_string());
            continue;
        }
        let chars: Vec<char> = chunk.chars().collect();
        let start = chars.iter().position(|c| c.is_alphanumeric());
        let Some(start) = start else {
            tokens.extend(chars.iter().map(|c| c.to_string()));
            continue;
        };
        let end = chars.iter().rposition(|c| c.is_alphanumeric()).unwrap() + 1;
        tokens.extend(chars[..start].iter().map(|c| c.to_string()));
        tokens.push(chars[start..end].iter().collect());
        tokens.extend(chars[end..].iter().map(|c| c.to_string()));
    }
    tokens
}

/// Number of tokens containing at least one alphanumeric character.
pub fn word_count(tokens: &[String]) -> usize {
    tokens
        .iter()
        .filter(|t| t.chars().any(char::is_alphanumeric))
        .count()
}

/// Splits text into sentences at `.`, `!` or `?` followed by whitespace and
/// an uppercase letter, unless the word carrying the terminator is a known
/// abbreviation. Returned sentences are trimmed and non-empty.
pub fn split_sentences(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut sentences = Vec::new();
    let mut start = 0;
    let mut i = 0;
    while i < chars.len() {
        if TERMINATORS.contains(&chars[i]) {
            let mut j = i + 1;
            while j < chars.len() && chars[j].is_whitespace() {
                j += 1;
            }
            let has_gap = j > i + 1;
            if has_gap && j < chars.len() && chars[j].is_uppercase() {
                let word_start = chars[..=i]
                    .iter()
                    .rposition(|c| c.is_whitespace())
                    .map_or(0, |p| p + 1);
                let word: String = chars[word_start..=i].iter().collect();
                if !is_abbreviation(&word) {
                    push_trimmed(&mut sentences, &chars[start..=i]);
                    start = j;
                    i = j;
                    continue;
                }
            }
        }
        i += 1;
    }
    push_trimmed(&mut sentences, &chars[start.min(chars.len())..]);
    sentences
}

fn push_trimmed(out: &mut Vec<String>, chars: &[char]) {
    let s: String = chars.iter().collect();
    let s = s.trim();
    if !s.is_empty() {
        out.push(s.to_string());
    }
}

pub fn sentence_count(text: &str) -> usize {
    split_sentences(text).len()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokenize_peels_punctuation() {
        assert_eq!(
            tokenize("a smart card reader, smart card, and a PIN."),
            ["a", "smart", "card", "reader", ",", "smart", "card", ",", "and", "a", "PIN", "."]
        );
        assert_eq!(tokenize("(see e.g. fig. 3)"), ["(", "see", "e.g.", "fig.", "3", ")"]);
        assert_eq!(tokenize("the 'signal x received' bit"), ["the", "'", "signal", "x", "received", "'", "bit"]);
        assert_eq!(tokenize(" -- "), ["-", "-"]);
    }

    #[test]
    fn word_count_skips_punctuation() {
        assert_eq!(word_count(&tokenize("Create test results.")), 3);
    }

    #[test]
    fn splits_two_sentences() {
        assert_eq!(split_sentences("A. B."), ["A.", "B."]);
        assert_eq!(sentence_count("The system shall log. It shall warn! Why? Because."), 4);
    }

    #[test]
    fn abbreviations_do_not_split() {
        let text = "The system shall accept inputs, e.g. Badge scans, etc. Within limits. Then stop.";
        assert_eq!(sentence_count(text), 2);
        assert_eq!(sentence_count("See Fig. Three for no. Seven."), 1);
    }

    #[test]
    fn lowercase_continuation_does_not_split() {
        assert_eq!(sentence_count("Version 2.0 is used. then continue"), 1);
        assert_eq!(sentence_count("Retry in 2.5 seconds."), 1);
    }

    #[test]
    fn empty_text_has_no_sentences() {
        assert!(split_sentences("   ").is_empty());
    }
}
