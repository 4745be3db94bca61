use std::sync::OnceLock;

use regex::Regex;

use super::PreprocessConfig;

fn url_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?i)\b(?:https?://|www\.)\S*").unwrap())
}

fn emoji_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(
            r"[\p{Extended_Pictographic}\p{Emoji_Modifier}\p{Regional_Indicator}\u{FE0F}\u{200D}\u{20E3}]",
        )
        .unwrap()
    })
}

fn emoticon_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    // Whole whitespace-delimited tokens only. Every emoticon starts with a
    // punctuation mark, so cleaned text can never contain one.
    RE.get_or_init(|| {
        Regex::new(r"(?:^|\s)(?:[:;=][\-o\*'^]?[\)\]\(\[dpo/\\|3\*]+|<3+|\^_*\^)(?:\s|$)").unwrap()
    })
}

fn tag_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"[@#][\p{L}\p{N}_]+").unwrap())
}

/// Apply the ordered cleaning rules: URLs, lowercase, emoji and emoticons,
/// mentions and hashtags, slang expansion, then digits and punctuation.
/// Whitespace is collapsed in the result.
pub fn normalize_text(text: &str, config: &PreprocessConfig) -> String {
    let text = url_re().replace_all(text, " ");
    let text = text.to_lowercase();
    let text = emoji_re().replace_all(&text, " ");
    let text = strip_emoticons(&text);
    let text = tag_re().replace_all(&text, " ");
    let text = expand_slang(&text, config);
    let mut out = String::with_capacity(text.len());
    let mut pending_space = false;
    for ch in text.chars() {
        if ch.is_alphabetic() {
            if pending_space && !out.is_empty() {
                out.push(' ');
            }
            pending_space = false;
            out.push(ch);
        } else {
            pending_space = true;
        }
    }
    out
}

fn strip_emoticons(text: &str) -> String {
    // Adjacent emoticons share the separating whitespace, so one pass can
    // miss every second one.
    let mut current = text.to_string();
    loop {
        let next = emoticon_re().replace_all(&current, " ").into_owned();
        if next == current {
            return current;
        }
        current = next;
    }
}

/// Replace every maximal alphabetic run that is a slang key.
fn expand_slang(text: &str, config: &PreprocessConfig) -> String {
    if config.slang_map.is_empty() {
        return text.to_string();
    }
    let mut out = String::with_capacity(text.len());
    let mut word = String::new();
    let flush = |word: &mut String, out: &mut String| {
        if !word.is_empty() {
            match config.slang_map.get(word.as_str()) {
                Some(replacement) => out.push_str(replacement),
                None => out.push_str(word),
            }
            word.clear();
        }
    };
    for ch in text.chars() {
        if ch.is_alphabetic() {
            word.push(ch);
        } else {
            flush(&mut word, &mut out);
            out.push(ch);
        }
    }
    flush(&mut word, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn config() -> PreprocessConfig {
        PreprocessConfig::default()
    }

    #[test]
    fn ordered_rules_hand_trace() {
        let got = normalize_text("@WHO says WASH your hands!! https://t.co/x 😷", &config());
        assert_eq!(got, "says wash your hands");
    }

    #[test]
    fn empty_input() {
        assert_eq!(normalize_text("", &config()), "");
    }

    #[test]
    fn slang_substitution() {
        let mut cfg = config();
        cfg.slang_map.clear();
        cfg.slang_map
            .insert("lol".into(), "laughing out loud".into());
        assert_eq!(normalize_text("lol", &cfg), "laughing out loud");
        assert_eq!(normalize_text("LOL!!", &cfg), "laughing out loud");
        assert_eq!(normalize_text("lollipop", &cfg), "lollipop");
    }

    #[test]
    fn urls_removed_before_tags() {
        let got = normalize_text("see www.who.int/#advice and http://x.co/@a now", &config());
        assert_eq!(got, "see and now");
    }

    #[test]
    fn hashtags_and_digits() {
        let got = normalize_text("#COVID19 cases rose 25% in 2020", &config());
        assert_eq!(got, "cases rose in");
    }

    #[test]
    fn emoticons_removed() {
        let got = normalize_text("stay home :) :D ;-) <3 ok", &config());
        assert_eq!(got, "stay home ok");
    }

    proptest! {
        #[test]
        fn idempotent(text in "[a-zA-Z0-9 @#:;()!?.,'/_\\-éü😷🙏]{0,60}") {
            let cfg = config();
            let once = normalize_text(&text, &cfg);
            prop_assert_eq!(normalize_text(&once, &cfg), once.clone());
        }

        #[test]
        fn only_letters_and_single_spaces(text in "\\PC{0,60}") {
            let out = normalize_text(&text, &config());
            prop_assert!(!out.starts_with(' ') && !out.ends_with(' '));
            prop_assert!(!out.contains("  "));
            prop_assert!(out.chars().all(|c| c == ' ' || c.is_alphabetic()));
        }
    }
}
