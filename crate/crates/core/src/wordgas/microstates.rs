use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Statistics {
    /// Distinguishable entities.
    #[serde(rename = "MB")]
    MaxwellBoltzmann,
    /// Indistinguishable, any number per state.
    #[serde(rename = "BE")]
    BoseEinstein,
    /// Indistinguishable, at most one per state.
    #[serde(rename = "FD")]
    FermiDirac,
}

impl Statistics {
    pub const ALL: [Statistics; 3] = [
        Statistics::MaxwellBoltzmann,
        Statistics::BoseEinstein,
        Statistics::FermiDirac,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            Statistics::MaxwellBoltzmann => "MB",
            Statistics::BoseEinstein => "BE",
            Statistics::FermiDirac => "FD",
        }
    }
}

fn overflow() -> Error {
    Error::InvalidInput("microstate count exceeds 128 bits".into())
}

fn binomial(m: u64, r: u64) -> Result<u128> {
    let r = r.min(m - r);
    let mut acc: u128 = 1;
    for i in 1..=r as u128 {
        // acc·(m − r + i) is divisible by i: it is i·C(m − r + i, i)
        acc = acc.checked_mul(m as u128 - r as u128 + i).ok_or_else(overflow)? / i;
    }
    Ok(acc)
}

/// Ways to place `n` entities into `k` single-entity states.
pub fn count_microstates(n: u64, k: u64, statistics: Statistics) -> Result<u128> {
    if n == 0 || k == 0 {
        return Err(Error::InvalidInput(format!("n and k must be positive (n={n}, k={k})")));
    }
    match statistics {
        Statistics::MaxwellBoltzmann => {
            let exp = u32::try_from(n).map_err(|_| overflow())?;
            (k as u128).checked_pow(exp).ok_or_else(overflow)
        }
        Statistics::BoseEinstein => binomial(n.checked_add(k - 1).ok_or_else(overflow)?, n),
        Statistics::FermiDirac => {
            if n > k {
                return Err(Error::ExclusionViolated { n, k });
            }
            binomial(k, n)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_entities_two_states() {
        assert_eq!(count_microstates(2, 2, Statistics::MaxwellBoltzmann).unwrap(), 4);
        assert_eq!(count_microstates(2, 2, Statistics::BoseEinstein).unwrap(), 3);
        assert_eq!(count_microstates(2, 2, Statistics::FermiDirac).unwrap(), 1);
    }

    #[test]
    fn one_entity() {
        for k in 1..20 {
            for s in Statistics::ALL {
                assert_eq!(count_microstates(1, k, s).unwrap(), k as u128);
            }
        }
    }

    #[test]
    fn exclusion() {
        assert!(matches!(
            count_microstates(3, 2, Statistics::FermiDirac),
            Err(Error::ExclusionViolated { n: 3, k: 2 })
        ));
    }

    #[test]
    fn larger_values() {
        assert_eq!(count_microstates(3, 4, Statistics::BoseEinstein).unwrap(), 20);
        assert_eq!(count_microstates(3, 5, Statistics::FermiDirac).unwrap(), 10);
        assert_eq!(count_microstates(10, 3, Statistics::MaxwellBoltzmann).unwrap(), 59049);
        assert!(count_microstates(200, 10, Statistics::MaxwellBoltzmann).is_err());
    }

    #[test]
    fn rejects_zero() {
        assert!(count_microstates(0, 2, Statistics::BoseEinstein).is_err());
    }
}
