//! Parser for "Name: description" idea lists as models emit them: numbered
//! paragraphs, one idea each, name split from body at the first colon.

use super::GenError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseMode {
    /// Paragraphs without a colon are recorded as warnings and skipped.
    Lenient,
    /// Paragraphs without a colon fail the whole parse.
    Strict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParseWarning {
    pub paragraph_index: usize,
    pub text: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParsedIdeas {
    /// (name, description) pairs in output order.
    pub ideas: Vec<(String, String)>,
    pub warnings: Vec<ParseWarning>,
}

/// Splits `text` into idea paragraphs, strips leading enumeration markers
/// ("1.", "12)", "#3"), and splits each paragraph at the first colon.
///
/// Blocks of single-spaced lines that each carry their own enumeration
/// marker are treated as one idea per line; models frequently emit numbered
/// lists without blank separators.
pub fn parse_idea_list(text: &str, mode: ParseMode) -> Result<ParsedIdeas, GenError> {
    if text.trim().is_empty() {
        return Err(GenError::Input("cannot parse an empty idea list".to_string()));
    }

    let mut paragraphs: Vec<String> = Vec::new();
    for block in split_blocks(text) {
        let lines: Vec<&str> = block.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
        let enumerated = lines.iter().filter(|l| strip_enumeration(l).1).count();
        if lines.len() > 1 && enumerated == lines.len() {
            paragraphs.extend(lines.iter().map(|l| l.to_string()));
        } else {
            paragraphs.push(lines.join(" "));
        }
    }

    let mut parsed = ParsedIdeas::default();
    for (index, paragraph) in paragraphs.iter().enumerate() {
        let (body, _) = strip_enumeration(paragraph);
        // Headers like "Step 1:" or "Our selections:" split at a colon but
        // carry no description; they are not ideas.
        let reason = match body.split_once(':') {
            Some((name, description)) if !name.trim().is_empty() && !description.trim().is_empty() => {
                parsed
                    .ideas
                    .push((name.trim().to_string(), description.trim().to_string()));
                continue;
            }
            Some((name, _)) if name.trim().is_empty() => "empty name before colon",
            Some(_) => "empty description after colon",
            None => "no colon separator",
        };
        if mode == ParseMode::Strict {
            return Err(GenError::Parse(format!("paragraph {index}: {reason}")));
        }
        parsed.warnings.push(ParseWarning {
            paragraph_index: index,
            text: paragraph.clone(),
            reason: reason.to_string(),
        });
    }
    Ok(parsed)
}

fn split_blocks(text: &str) -> Vec<&str> {
    let mut blocks = Vec::new();
    let mut start = None;
    let mut last_blank = true;
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let blank = line.trim().is_empty();
        if !blank && last_blank {
            start = Some(offset);
        }
        if blank {
            if let Some(s) = start.take() {
                blocks.push(&text[s..offset]);
            }
        }
        last_blank = blank;
        offset += line.len();
    }
    if let Some(s) = start {
        blocks.push(&text[s..]);
    }
    blocks
}

/// Removes a leading "1.", "12)" or "#3" style marker. Returns the rest
/// and whether a marker was found. Bare digits are left alone so names
/// like "3D Printer Pen" survive.
fn strip_enumeration(paragraph: &str) -> (&str, bool) {
    let trimmed = paragraph.trim_start();
    let (hash, after_hash) = match trimmed.strip_prefix('#') {
        Some(rest) => (true, rest),
        None => (false, trimmed),
    };
    let digits = after_hash.chars().take_while(char::is_ascii_digit).count();
    if digits == 0 {
        return (paragraph.trim(), false);
    }
    let after_digits = &after_hash[digits..];
    if hash {
        return (after_digits.trim_start_matches(['.', ')']).trim(), true);
    }
    match after_digits.strip_prefix(['.', ')']) {
        Some(rest) => (rest.trim(), true),
        None => (paragraph.trim(), false),
    }
}

/// Heuristic check for a distinct revision pass in a staged transcript:
/// looks for at least two substantial runs of enumerated title-only lines
/// (no colon) and reports whether the second run differs from the first.
pub fn detect_revision_pass(text: &str) -> bool {
    const MIN_RUN: usize = 5;
    let mut runs: Vec<Vec<String>> = Vec::new();
    let mut current: Vec<String> = Vec::new();
    for line in text.lines() {
        let trimmed = line.trim();
        let (body, numbered) = strip_enumeration(trimmed);
        if numbered && !body.contains(':') && !body.is_empty() {
            current.push(body.to_string());
        } else if !trimmed.is_empty() {
            if current.len() >= MIN_RUN {
                runs.push(std::mem::take(&mut current));
            } else {
                current.clear();
            }
        }
    }
    if current.len() >= MIN_RUN {
        runs.push(current);
    }
    match runs.as_slice() {
        [first, second, ..] => {
            let a: std::collections::BTreeSet<_> = first.iter().collect();
            let b: std::collections::BTreeSet<_> = second.iter().collect();
            a != b
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_numbered_paragraph() {
        let text = "1. QuickHeat Mug: An insulated, battery-powered coffee mug that can heat beverages within minutes and maintain the temperature.";
        let parsed = parse_idea_list(text, ParseMode::Lenient).unwrap();
        assert_eq!(parsed.ideas.len(), 1);
        assert_eq!(parsed.ideas[0].0, "QuickHeat Mug");
        assert!(parsed.ideas[0].1.starts_with("An insulated, battery-powered"));
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(matches!(parse_idea_list("", ParseMode::Lenient), Err(GenError::Input(_))));
        assert!(matches!(parse_idea_list("  \n \n", ParseMode::Lenient), Err(GenError::Input(_))));
    }

    #[test]
    fn parses_unnumbered_paragraph() {
        let text = "SunCharge Pro: This versatile portable solar charger isn't just for powering your devices; it also features a built-in flashlight for emergencies.";
        let parsed = parse_idea_list(text, ParseMode::Lenient).unwrap();
        assert_eq!(parsed.ideas[0].0, "SunCharge Pro");
    }

    #[test]
    fn preserves_order_across_paragraphs() {
        let text = "1. Alpha Widget: first.\n\n2. Beta Widget: second.\n\n3. Gamma Widget: third.";
        let parsed = parse_idea_list(text, ParseMode::Lenient).unwrap();
        let names: Vec<&str> = parsed.ideas.iter().map(|(n, _)| n.as_str()).collect();
        assert_eq!(names, vec!["Alpha Widget", "Beta Widget", "Gamma Widget"]);
    }

    #[test]
    fn splits_single_spaced_numbered_lines() {
        let text = "1. Alpha: one.\n2. Beta: two.\n3. Gamma: three.";
        let parsed = parse_idea_list(text, ParseMode::Lenient).unwrap();
        assert_eq!(parsed.ideas.len(), 3);
    }

    #[test]
    fn joins_wrapped_paragraph_lines() {
        let text = "4) Quad Charger: A four-port charger\nthat powers every device at once.";
        let parsed = parse_idea_list(text, ParseMode::Lenient).unwrap();
        assert_eq!(parsed.ideas.len(), 1);
        assert!(parsed.ideas[0].1.ends_with("at once."));
    }

    #[test]
    fn strips_hash_and_paren_markers() {
        for text in ["#3 Tri Widget: body.", "12) Tri Widget: body.", "12. Tri Widget: body."] {
            let parsed = parse_idea_list(text, ParseMode::Lenient).unwrap();
            assert_eq!(parsed.ideas[0].0, "Tri Widget", "failed on {text:?}");
        }
    }

    #[test]
    fn keeps_digit_leading_names() {
        let parsed = parse_idea_list("3D Printer Pen: draws in plastic.", ParseMode::Lenient).unwrap();
        assert_eq!(parsed.ideas[0].0, "3D Printer Pen");
    }

    #[test]
    fn lenient_skips_and_warns_on_missing_colon() {
        let text = "First Gadget: works.\n\njust a stray sentence\n\nSecond Gadget: also works.";
        let parsed = parse_idea_list(text, ParseMode::Lenient).unwrap();
        assert_eq!(parsed.ideas.len(), 2);
        assert_eq!(parsed.warnings.len(), 1);
        assert_eq!(parsed.warnings[0].paragraph_index, 1);
    }

    #[test]
    fn strict_fails_on_missing_colon() {
        let text = "First Gadget: works.\n\nno separator here";
        assert!(matches!(
            parse_idea_list(text, ParseMode::Strict),
            Err(GenError::Parse(_))
        ));
    }

    #[test]
    fn never_panics_on_arbitrary_text() {
        for text in ["::", ":", "1.", "#", "###", "a:b:c", "\u{0}weird: bytes", "1. :empty name"] {
            let _ = parse_idea_list(text, ParseMode::Lenient);
        }
    }

    #[test]
    fn detects_distinct_revision_pass() {
        let mut text = String::new();
        for i in 1..=10 {
            text.push_str(&format!("{i}. Original Title {i}\n"));
        }
        text.push_str("\nRevised list:\n");
        for i in 1..=10 {
            text.push_str(&format!("{i}. Bolder Title {i}\n"));
        }
        assert!(detect_revision_pass(&text));
    }

    #[test]
    fn identical_title_lists_are_not_a_revision() {
        let mut text = String::new();
        for pass in 0..2 {
            for i in 1..=10 {
                text.push_str(&format!("{i}. Same Title {i}\n"));
            }
            if pass == 0 {
                text.push_str("\nChecking the list again:\n");
            }
        }
        assert!(!detect_revision_pass(&text));
    }

    #[test]
    fn single_title_list_is_not_a_revision() {
        let mut text = String::new();
        for i in 1..=10 {
            text.push_str(&format!("{i}. Only Title {i}\n"));
        }
        assert!(!detect_revision_pass(&text));
    }
}
