//! Named configurations shipped with the binary.

/// `(name, document)` pairs, sorted by name.
pub const PRESETS: &[(&str, &str)] = &[
    ("cesaro-c0", include_str!("../presets/cesaro-c0.json")),
    ("classical-singleton", include_str!("../presets/classical-singleton.json")),
    ("constant-row-c", include_str!("../presets/constant-row-c.json")),
    ("constant-row-c0", include_str!("../presets/constant-row-c0.json")),
    ("cs0-telescoping", include_str!("../presets/cs0-telescoping.json")),
    ("finite-rank", include_str!("../presets/finite-rank.json")),
    ("identity-assoc", include_str!("../presets/identity-assoc.json")),
    ("lambda-prime", include_str!("../presets/lambda-prime.json")),
    ("linf-source", include_str!("../presets/linf-source.json")),
    ("power-orlicz", include_str!("../presets/power-orlicz.json")),
    ("summation-bs", include_str!("../presets/summation-bs.json")),
];

/// Used when neither `--config` nor `--preset` is given.
pub const DEFAULT_PRESET: &str = "identity-assoc";

pub fn get(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, doc)| *doc)
}

pub fn names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(n, _)| *n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_parses_and_resolves() {
        for (name, doc) in PRESETS {
            let config = crate::config::parse(doc).unwrap_or_else(|e| panic!("{name}: {e}"));
            config.resolve().unwrap_or_else(|e| panic!("{name}: {e}"));
        }
        assert!(get(DEFAULT_PRESET).is_some());
        let mut sorted: Vec<_> = names().collect();
        sorted.sort();
        assert_eq!(sorted, names().collect::<Vec<_>>());
    }
}
