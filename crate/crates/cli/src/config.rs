//! Run configuration: the instance, delta policy, seed and size caps.
//! Stored as TOML; command-line flags override file values.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use expcong::census::{DeltaPolicy, EquationInstance};
use expcong::ff::{Field, FieldElement};
use expcong::{Error, Limits};
use serde::{Deserialize, Serialize};

/// `a:g` pairs separated by commas, integers being element encodings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct TermList(pub Vec<(u64, u64)>);

impl FromStr for TermList {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = |token: &str, reason: &str| Error::Parse { token: token.to_string(), reason: reason.to_string() };
        let pairs = s
            .split(',')
            .map(|tok| {
                let tok = tok.trim();
                let (a, g) = tok.split_once(':').ok_or_else(|| bad(tok, "expected a:g"))?;
                let a = a.trim().parse().map_err(|_| bad(tok, "coefficient is not an integer"))?;
                let g = g.trim().parse().map_err(|_| bad(tok, "base is not an integer"))?;
                Ok((a, g))
            })
            .collect::<Result<Vec<_>, Error>>()?;
        Ok(TermList(pairs))
    }
}

impl fmt::Display for TermList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(a, g)| format!("{a}:{g}")).collect();
        f.write_str(&parts.join(","))
    }
}

impl From<TermList> for String {
    fn from(t: TermList) -> String {
        t.to_string()
    }
}

impl TryFrom<String> for TermList {
    type Error = Error;

    fn try_from(s: String) -> Result<Self, Error> {
        s.parse()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LimitsConfig {
    /// Largest q for all-target counting.
    pub counting_q: u64,
    /// Largest brute-force enumeration and solver grid.
    pub brute_tuples: u64,
    /// Largest simulated quantum search grid.
    pub scan_grid: u64,
}

impl Default for LimitsConfig {
    fn default() -> Self {
        LimitsConfig::from(Limits::default())
    }
}

impl From<Limits> for LimitsConfig {
    fn from(l: Limits) -> Self {
        LimitsConfig {
            counting_q: l.counting_q,
            brute_tuples: l.brute_tuples.min(u64::MAX as u128) as u64,
            scan_grid: l.quantum_grid,
        }
    }
}

impl From<LimitsConfig> for Limits {
    fn from(l: LimitsConfig) -> Self {
        Limits { counting_q: l.counting_q, brute_tuples: l.brute_tuples as u128, quantum_grid: l.scan_grid }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// `p`, `p^nu` or `p^nu/c0,...,cnu`.
    pub field: String,
    pub terms: TermList,
    #[serde(default)]
    pub b: u64,
    #[serde(default)]
    pub delta: DeltaPolicy,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub limits: LimitsConfig,
}

#[derive(Debug)]
pub enum ConfigError {
    Io(PathBuf, std::io::Error),
    Toml(String),
    Lib(Error),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Io(p, e) => write!(f, "{}: {e}", p.display()),
            ConfigError::Toml(e) => write!(f, "config: {e}"),
            ConfigError::Lib(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for ConfigError {
    fn from(e: Error) -> Self {
        ConfigError::Lib(e)
    }
}

impl RunConfig {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Toml(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io(path.to_path_buf(), e))?;
        Self::from_toml(&text)
    }

    pub fn field(&self) -> Result<Arc<Field>, Error> {
        Field::from_spec(&self.field).map(Arc::new)
    }

    pub fn limits(&self) -> Limits {
        self.limits.into()
    }

    pub fn delta_value(&self, q: u64) -> f64 {
        self.delta.value(q)
    }

    /// The instance, with every encoding checked against the field.
    pub fn instance(&self) -> Result<EquationInstance, Error> {
        let field = self.field()?;
        let q = field.q();
        let elem = |v: u64, token: String| {
            if v < q {
                Ok(FieldElement::new(v))
            } else {
                Err(Error::Parse { token, reason: format!("not an element of a field of size {q}") })
            }
        };
        let pairs = self
            .terms
            .0
            .iter()
            .map(|&(a, g)| Ok((elem(a, format!("{a}:{g}"))?, elem(g, format!("{a}:{g}"))?)))
            .collect::<Result<Vec<_>, Error>>()?;
        let b = elem(self.b, self.b.to_string())?;
        EquationInstance::new(field, &pairs, b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn term_list_syntax() {
        let t: TermList = "1:3, 2:5".parse().unwrap();
        assert_eq!(t.0, vec![(1, 3), (2, 5)]);
        assert_eq!(t.to_string(), "1:3,2:5");
        match "1:3,x:5".parse::<TermList>() {
            Err(Error::Parse { token, .. }) => assert_eq!(token, "x:5"),
            other => panic!("{other:?}"),
        }
        assert!("1-3".parse::<TermList>().is_err());
    }

    #[test]
    fn out_of_range_element_names_token() {
        let cfg = RunConfig {
            field: "7".into(),
            terms: "1:3,1:9".parse().unwrap(),
            b: 0,
            delta: DeltaPolicy::SqrtLog,
            seed: 0,
            out: None,
            limits: LimitsConfig::default(),
        };
        match cfg.instance() {
            Err(Error::Parse { token, .. }) => assert_eq!(token, "1:9"),
            other => panic!("{other:?}"),
        }
    }
}
