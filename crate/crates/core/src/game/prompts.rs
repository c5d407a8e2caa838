use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// How the adversary picks the prompt `p_t` at each step.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum PromptStrategy {
    #[default]
    None,
    Constant(String),
    Cycle(Vec<String>),
    /// Always `b`: the single-letter prompt of the parity construction.
    AdaptiveB,
}

impl PromptStrategy {
    pub fn prompt(&self, t: usize) -> Option<&str> {
        match self {
            PromptStrategy::None => None,
            PromptStrategy::Constant(p) => Some(p),
            PromptStrategy::Cycle(ps) => Some(&ps[(t - 1) % ps.len()]),
            PromptStrategy::AdaptiveB => Some("b"),
        }
    }

    pub fn is_none(&self) -> bool {
        matches!(self, PromptStrategy::None)
    }

    /// Every prompt the strategy can produce.
    pub fn prompts(&self) -> Vec<&str> {
        match self {
            PromptStrategy::None => Vec::new(),
            PromptStrategy::Constant(p) => vec![p],
            PromptStrategy::Cycle(ps) => ps.iter().map(String::as_str).collect(),
            PromptStrategy::AdaptiveB => vec!["b"],
        }
    }
}

fn unword(s: &str) -> String {
    if s == "ε" {
        String::new()
    } else {
        s.to_string()
    }
}

impl FromStr for PromptStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        if s == "none" {
            return Ok(PromptStrategy::None);
        }
        if s == "adaptive-b" {
            return Ok(PromptStrategy::AdaptiveB);
        }
        if let Some(p) = s.strip_prefix("constant:") {
            return Ok(PromptStrategy::Constant(unword(p)));
        }
        if let Some(list) = s.strip_prefix("cycle:") {
            let inner = list
                .strip_prefix('[')
                .and_then(|l| l.strip_suffix(']'))
                .ok_or_else(|| {
                    Error::Scenario(format!(
                        "cycle prompts must be written [p1,p2,...], got {list:?}"
                    ))
                })?;
            let ps: Vec<String> = inner.split(',').map(|p| unword(p.trim())).collect();
            return Ok(PromptStrategy::Cycle(ps));
        }
        Err(Error::Scenario(format!("unknown prompt strategy {s:?}")))
    }
}

impl TryFrom<String> for PromptStrategy {
    type Error = Error;

    fn try_from(s: String) -> Result<Self, Error> {
        s.parse()
    }
}

impl From<PromptStrategy> for String {
    fn from(p: PromptStrategy) -> String {
        p.to_string()
    }
}

fn word(p: &str) -> &str {
    if p.is_empty() {
        "ε"
    } else {
        p
    }
}

impl fmt::Display for PromptStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PromptStrategy::None => f.write_str("none"),
            PromptStrategy::Constant(p) => write!(f, "constant:{}", word(p)),
            PromptStrategy::Cycle(ps) => {
                let parts: Vec<&str> = ps.iter().map(|p| word(p)).collect();
                write!(f, "cycle:[{}]", parts.join(","))
            }
            PromptStrategy::AdaptiveB => f.write_str("adaptive-b"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        for text in [
            "none",
            "constant:ab",
            "cycle:[ε,a,b]",
            "adaptive-b",
            "constant:ε",
        ] {
            let p: PromptStrategy = text.parse().unwrap();
            assert_eq!(p.to_string(), text);
        }
        let c: PromptStrategy = "cycle:[a, ab ,b]".parse().unwrap();
        assert_eq!(c.prompt(1), Some("a"));
        assert_eq!(c.prompt(2), Some("ab"));
        assert_eq!(c.prompt(4), Some("a"));
        assert_eq!(
            "constant:ε".parse::<PromptStrategy>().unwrap().prompt(3),
            Some("")
        );
        assert!("cycle:a,b".parse::<PromptStrategy>().is_err());
        assert!("sometimes".parse::<PromptStrategy>().is_err());
    }
}
