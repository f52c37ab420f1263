use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

use super::Field;

/// Textual field description: `p`, `p^nu`, or `p^nu/c0,c1,...,cnu`
/// (modulus coefficients low to high, leading 1 included).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldSpec {
    pub p: u64,
    pub nu: u32,
    pub modulus: Option<Vec<u64>>,
}

impl FieldSpec {
    pub fn of(field: &Field) -> FieldSpec {
        FieldSpec {
            p: field.p(),
            nu: field.nu(),
            modulus: (field.nu() > 1).then(|| field.modulus().to_vec()),
        }
    }

    pub fn build(&self) -> Result<Field> {
        Field::new(self.p, self.nu, self.modulus.clone())
    }
}

fn parse_int<T: FromStr>(token: &str, what: &str) -> Result<T> {
    token
        .trim()
        .parse::<T>()
        .map_err(|_| Error::parse(token, format!("expected {what}")))
}

impl FromStr for FieldSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, modulus) = match s.split_once('/') {
            Some((h, m)) => {
                let coeffs = m
                    .split(',')
                    .map(|c| parse_int::<u64>(c, "a modulus coefficient"))
                    .collect::<Result<Vec<_>>>()?;
                (h, Some(coeffs))
            }
            None => (s, None),
        };
        let (p, nu) = match head.split_once('^') {
            Some((p, nu)) => (parse_int(p, "a prime")?, parse_int(nu, "an exponent")?),
            None => (parse_int(head, "a prime")?, 1),
        };
        Ok(FieldSpec { p, nu, modulus })
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.modulus, self.nu) {
            (None, 1) => write!(f, "{}", self.p),
            (None, nu) => write!(f, "{}^{}", self.p, nu),
            (Some(m), nu) => {
                let coeffs: Vec<String> = m.iter().map(u64::to_string).collect();
                write!(f, "{}^{}/{}", self.p, nu, coeffs.join(","))
            }
        }
    }
}
