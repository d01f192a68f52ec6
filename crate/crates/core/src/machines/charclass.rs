use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Number of Unicode scalar values (code points minus surrogates).
pub const SCALAR_VALUE_COUNT: u64 = 0x11_0000 - 0x800;
/// Number of scalar values in general category Cc.
pub const CONTROL_CHAR_COUNT: u64 = 65;

/// A set of characters a transition may emit. Emission within a class is
/// uniform, so a transition of probability `p` emits each member with
/// probability `p / size`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CharClass {
    Digit,
    /// `+`, `-` and U+2212 MINUS SIGN.
    Sign,
    /// `e` or `E`.
    Exponent,
    /// Any scalar value that is not a control character.
    Printable,
    /// Any scalar value.
    Any,
    Literal(char),
}

const SIGNS: [char; 3] = ['+', '-', '\u{2212}'];

impl CharClass {
    pub fn contains(self, c: char) -> bool {
        match self {
            CharClass::Digit => c.is_ascii_digit(),
            CharClass::Sign => SIGNS.contains(&c),
            CharClass::Exponent => c == 'e' || c == 'E',
            CharClass::Printable => !c.is_control(),
            CharClass::Any => true,
            CharClass::Literal(l) => l == c,
        }
    }

    pub fn size(self) -> u64 {
        match self {
            CharClass::Digit => 10,
            CharClass::Sign => SIGNS.len() as u64,
            CharClass::Exponent => 2,
            CharClass::Printable => SCALAR_VALUE_COUNT - CONTROL_CHAR_COUNT,
            CharClass::Any => SCALAR_VALUE_COUNT,
            CharClass::Literal(_) => 1,
        }
    }

    /// Draws a member uniformly at random.
    pub fn sample<R: Rng + ?Sized>(self, rng: &mut R) -> char {
        match self {
            CharClass::Digit => char::from(b'0' + rng.random_range(0..10u8)),
            CharClass::Sign => SIGNS[rng.random_range(0..SIGNS.len())],
            CharClass::Exponent => {
                if rng.random_bool(0.5) {
                    'e'
                } else {
                    'E'
                }
            }
            CharClass::Literal(c) => c,
            CharClass::Printable | CharClass::Any => loop {
                if let Some(c) = char::from_u32(rng.random_range(0..0x11_0000)) {
                    if self.contains(c) {
                        break c;
                    }
                }
            },
        }
    }
}

impl fmt::Display for CharClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CharClass::Digit => f.write_str("digit"),
            CharClass::Sign => f.write_str("sign"),
            CharClass::Exponent => f.write_str("exponent"),
            CharClass::Printable => f.write_str("printable"),
            CharClass::Any => f.write_str("any"),
            CharClass::Literal(c) => write!(f, "'{c}'"),
        }
    }
}

impl FromStr for CharClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "digit" => Ok(CharClass::Digit),
            "sign" => Ok(CharClass::Sign),
            "exponent" => Ok(CharClass::Exponent),
            "printable" => Ok(CharClass::Printable),
            "any" => Ok(CharClass::Any),
            _ => {
                let inner = s
                    .strip_prefix('\'')
                    .and_then(|r| r.strip_suffix('\''))
                    .ok_or_else(|| format!("unknown character class `{s}`"))?;
                let mut chars = inner.chars();
                match (chars.next(), chars.next()) {
                    (Some(c), None) => Ok(CharClass::Literal(c)),
                    _ => Err(format!("literal class must hold one character: `{s}`")),
                }
            }
        }
    }
}

impl Serialize for CharClass {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CharClass {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
