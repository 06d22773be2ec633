//! Domain description files.
//!
//! ```toml
//! label = "ellipse"
//! c = 1.0
//! c0 = [0.0, 0.0]
//! tail = [[0.5, 0.0]]     # c_1, c_2, ... as [re, im]
//! weight = "constant:1"   # or "exp_cos:<amplitude>"
//! ```
//!
//! Only `c` is required. `c0` defaults to the origin, `tail` to empty,
//! `weight` to `constant:1` and `label` to `"domain"`.

use std::path::Path;

use num_complex::Complex64;
use toml::{Table, Value};

use super::{DomainSpec, WeightSpec};
use crate::error::{Error, Result};

const KEYS: [&str; 5] = ["label", "c", "c0", "tail", "weight"];

#[derive(Debug, Clone, PartialEq)]
pub struct DomainFile {
    pub domain: DomainSpec,
    pub weight: WeightSpec,
}

fn bad(key: &str, message: impl Into<String>) -> Error {
    Error::DomainFile {
        key: key.to_string(),
        message: message.into(),
    }
}

fn number(v: &Value, key: &str) -> Result<f64> {
    match v {
        Value::Float(x) => Ok(*x),
        Value::Integer(i) => Ok(*i as f64),
        other => Err(bad(
            key,
            format!("expected a number, found {}", other.type_str()),
        )),
    }
}

fn pair(v: &Value, key: &str) -> Result<Complex64> {
    match v.as_array().map(Vec::as_slice) {
        Some([re, im]) => Ok(Complex64::new(number(re, key)?, number(im, key)?)),
        _ => Err(bad(key, "expected a pair [re, im]")),
    }
}

pub fn parse_domain_file(text: &str) -> Result<DomainFile> {
    let table: Table = text
        .parse()
        .map_err(|e: toml::de::Error| bad("<document>", e.message().to_string()))?;
    if let Some(unknown) = table.keys().find(|k| !KEYS.contains(&k.as_str())) {
        return Err(bad(unknown, "unknown key"));
    }
    let c = number(
        table
            .get("c")
            .ok_or_else(|| bad("c", "missing required key"))?,
        "c",
    )?;
    let c0 = match table.get("c0") {
        Some(v) => pair(v, "c0")?,
        None => Complex64::new(0.0, 0.0),
    };
    let tail = match table.get("tail") {
        None => Vec::new(),
        Some(Value::Array(items)) => items
            .iter()
            .enumerate()
            .map(|(k, v)| pair(v, &format!("tail[{k}]")))
            .collect::<Result<_>>()?,
        Some(_) => return Err(bad("tail", "expected a list of [re, im] pairs")),
    };
    let label = match table.get("label") {
        None => "domain".to_string(),
        Some(Value::String(s)) => s.clone(),
        Some(_) => return Err(bad("label", "expected a string")),
    };
    let weight = match table.get("weight") {
        None => WeightSpec::constant(1.0),
        Some(Value::String(s)) => s.parse().map_err(|e: Error| bad("weight", e.to_string()))?,
        Some(_) => return Err(bad("weight", "expected a string such as \"constant:1\"")),
    };
    let domain = DomainSpec::new(c, c0, tail, label).map_err(|e| match e {
        Error::DegenerateBoundary(msg) => bad("c/tail", msg),
        other => other,
    })?;
    Ok(DomainFile { domain, weight })
}

pub fn read_domain_file(path: &Path) -> Result<DomainFile> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| bad("<file>", format!("{}: {e}", path.display())))?;
    parse_domain_file(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_ellipse() {
        let f = parse_domain_file(
            "label = \"e\"\nc = 1\nc0 = [0, 0]\ntail = [[0.5, 0.0]]\nweight = \"exp_cos:0.2\"\n",
        )
        .unwrap();
        assert_eq!(
            f.domain,
            DomainSpec::ellipse(1.0, 0.5).unwrap().with_label("e")
        );
        assert_eq!(f.weight, WeightSpec::exp_cos(0.2));
    }

    #[test]
    fn defaults() {
        let f = parse_domain_file("c = 2.0").unwrap();
        assert!(f.domain.is_disk());
        assert_eq!(f.weight, WeightSpec::constant(1.0));
    }

    fn key_of(text: &str) -> String {
        match parse_domain_file(text).unwrap_err() {
            Error::DomainFile { key, .. } => key,
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn errors_name_the_key() {
        assert_eq!(key_of("c0 = [0, 0]"), "c");
        assert_eq!(key_of("c = \"one\""), "c");
        assert_eq!(key_of("c = 1\nc0 = [1]"), "c0");
        assert_eq!(key_of("c = 1\ntail = [[0.1, 0], [1]]"), "tail[1]");
        assert_eq!(key_of("c = 1\nweight = \"gauss:2\""), "weight");
        assert_eq!(key_of("c = 1\nradius = 2"), "radius");
        assert_eq!(key_of("c = 1\ntail = [[2.0, 0.0]]"), "c/tail");
    }
}
