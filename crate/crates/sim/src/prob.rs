use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// An exact probability in `[0, 1]`, written `"num/den"` (or `"0"`, `"1"`)
/// in scenario files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Probability(Ratio<u64>);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProbabilityError {
    #[error("expected a fraction like \"3/8\": {0}")]
    Syntax(String),
    #[error("probability {0} is greater than 1")]
    AboveOne(String),
}

impl Probability {
    pub const ZERO: Probability = Probability(Ratio::new_raw(0, 1));
    pub const ONE: Probability = Probability(Ratio::new_raw(1, 1));

    pub fn new(num: u64, den: u64) -> Result<Self, ProbabilityError> {
        if den == 0 {
            return Err(ProbabilityError::Syntax(format!("{num}/0")));
        }
        let r = Ratio::new(num, den);
        if r > Ratio::from_integer(1) {
            return Err(ProbabilityError::AboveOne(r.to_string()));
        }
        Ok(Self(r))
    }

    /// Numerator and denominator in lowest terms.
    pub fn parts(self) -> (u64, u64) {
        (*self.0.numer(), *self.0.denom())
    }

    pub fn ratio(self) -> Ratio<u64> {
        self.0
    }
}

impl FromStr for Probability {
    type Err = ProbabilityError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let r: Ratio<u64> = s.trim().parse().map_err(|e| ProbabilityError::Syntax(format!("{s:?}: {e}")))?;
        Self::new(*r.numer(), *r.denom())
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (n, d) = self.parts();
        if d == 1 {
            write!(f, "{n}")
        } else {
            write!(f, "{n}/{d}")
        }
    }
}

impl Serialize for Probability {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Probability {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_reduces() {
        let p: Probability = "6/16".parse().unwrap();
        assert_eq!(p.parts(), (3, 8));
        assert_eq!(p.to_string(), "3/8");
        assert_eq!("1".parse::<Probability>().unwrap(), Probability::ONE);
        assert_eq!("0/5".parse::<Probability>().unwrap(), Probability::ZERO);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!("5/4".parse::<Probability>(), Err(ProbabilityError::AboveOne(_))));
        assert!(matches!("1/0".parse::<Probability>(), Err(ProbabilityError::Syntax(_))));
        assert!(matches!("0.5".parse::<Probability>(), Err(ProbabilityError::Syntax(_))));
        assert!(matches!("-1/2".parse::<Probability>(), Err(ProbabilityError::Syntax(_))));
    }
}
