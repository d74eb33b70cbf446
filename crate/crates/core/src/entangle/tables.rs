use std::fmt;
use std::io::Read;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{check_unit, pauli, Direction};
use crate::blochcore::OperatorState;
use crate::{Error, Result, C64};

/// One of the four joint measurement settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Setting {
    #[serde(rename = "AB")]
    AB,
    #[serde(rename = "AB'")]
    ABPrime,
    #[serde(rename = "A'B")]
    APrimeB,
    #[serde(rename = "A'B'")]
    APrimeBPrime,
}

impl Setting {
    pub const ALL: [Setting; 4] = [Setting::AB, Setting::ABPrime, Setting::APrimeB, Setting::APrimeBPrime];

    pub fn as_str(&self) -> &'static str {
        match self {
            Setting::AB => "AB",
            Setting::ABPrime => "AB'",
            Setting::APrimeB => "A'B",
            Setting::APrimeBPrime => "A'B'",
        }
    }
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Setting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Setting::ALL
            .into_iter()
            .find(|x| x.as_str() == s.trim())
            .ok_or_else(|| Error::InvalidInput(format!("unknown setting {s:?}")))
    }
}

/// Joint outcome probabilities; index 0 is the `+` outcome, 1 is `−`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct JointProbabilityTable {
    pub setting_pair: Setting,
    pub probs: [[f64; 2]; 2],
}

impl JointProbabilityTable {
    pub fn new(setting_pair: Setting, probs: [[f64; 2]; 2]) -> Result<Self> {
        let flat = probs.iter().flatten();
        if flat.clone().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::OutOfRange(format!("negative entry in table {setting_pair}")));
        }
        let sum: f64 = flat.sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!("table {setting_pair} sums to {sum}")));
        }
        Ok(Self { setting_pair, probs })
    }

    pub fn marginal_a(&self) -> [f64; 2] {
        [self.probs[0][0] + self.probs[0][1], self.probs[1][0] + self.probs[1][1]]
    }

    pub fn marginal_b(&self) -> [f64; 2] {
        [self.probs[0][0] + self.probs[1][0], self.probs[0][1] + self.probs[1][1]]
    }

    /// `Σ s·t·P(s,t)` with `s, t ∈ {+1, −1}`.
    pub fn correlation(&self) -> f64 {
        self.probs[0][0] - self.probs[0][1] - self.probs[1][0] + self.probs[1][1]
    }
}

fn spin_projector(u: &Direction, sign: f64) -> DMatrix<C64> {
    let [x, y, z] = pauli();
    let n = x * C64::from(u[0]) + y * C64::from(u[1]) + z * C64::from(u[2]);
    (DMatrix::identity(2, 2) + n * C64::from(sign)) * C64::from(0.5)
}

/// `P(s,t) = tr(ρ P_s(u)⊗P_t(v))` for projective spin measurements.
pub fn table_from_state(
    rho: &OperatorState,
    setting_pair: Setting,
    u: &Direction,
    v: &Direction,
) -> Result<JointProbabilityTable> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: rho.dim(),
        });
    }
    check_unit(u)?;
    check_unit(v)?;
    let signs = [1.0, -1.0];
    let mut probs = [[0.0; 2]; 2];
    for (s, &ss) in signs.iter().enumerate() {
        for (t, &ts) in signs.iter().enumerate() {
            let op = spin_projector(u, ss).kronecker(&spin_projector(v, ts));
            probs[s][t] = rho.expectation(&op).re;
        }
    }
    JointProbabilityTable::new(setting_pair, probs)
}

/// Largest difference between one party's marginal under the other party's
/// two settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginalComparison {
    pub party: String,
    pub setting: String,
    pub deviation: f64,
}

pub type Violation = MarginalComparison;

fn lookup<T: Copy>(items: &[T], key: impl Fn(&T) -> Setting, s: Setting) -> Result<T> {
    items
        .iter()
        .find(|t| key(t) == s)
        .copied()
        .ok_or_else(|| Error::MissingTable(s.to_string()))
}

fn max_diff(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).abs().max((a[1] - b[1]).abs())
}

/// The four comparisons: A across (AB, AB'), A' across (A'B, A'B'),
/// B across (AB, A'B), B' across (AB', A'B').
const COMPARISONS: [(&str, &str, Setting, Setting); 4] = [
    ("A", "A", Setting::AB, Setting::ABPrime),
    ("A", "A'", Setting::APrimeB, Setting::APrimeBPrime),
    ("B", "B", Setting::AB, Setting::APrimeB),
    ("B", "B'", Setting::ABPrime, Setting::APrimeBPrime),
];

pub fn marginal_deviations(tables: &[JointProbabilityTable]) -> Result<Vec<MarginalComparison>> {
    COMPARISONS
        .iter()
        .map(|&(party, setting, s1, s2)| {
            let t1 = lookup(tables, |t| t.setting_pair, s1)?;
            let t2 = lookup(tables, |t| t.setting_pair, s2)?;
            let deviation = if party == "A" {
                max_diff(t1.marginal_a(), t2.marginal_a())
            } else {
                max_diff(t1.marginal_b(), t2.marginal_b())
            };
            Ok(MarginalComparison {
                party: party.to_string(),
                setting: setting.to_string(),
                deviation,
            })
        })
        .collect()
}

/// Comparisons whose deviation exceeds `threshold`.
pub fn no_signaling_check(tables: &[JointProbabilityTable], threshold: f64) -> Result<Vec<Violation>> {
    Ok(marginal_deviations(tables)?
        .into_iter()
        .filter(|c| c.deviation > threshold)
        .collect())
}

/// Raw joint-outcome counts for one setting pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct JointCounts {
    pub setting_pair: Setting,
    pub counts: [[u64; 2]; 2],
}

impl JointCounts {
    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn to_table(&self) -> Result<JointProbabilityTable> {
        let n = self.total();
        if n == 0 {
            return Err(Error::InvalidInput(format!(
                "no counts for setting {}",
                self.setting_pair
            )));
        }
        let p = |c: u64| c as f64 / n as f64;
        JointProbabilityTable::new(
            self.setting_pair,
            [
                [p(self.counts[0][0]), p(self.counts[0][1])],
                [p(self.counts[1][0]), p(self.counts[1][1])],
            ],
        )
    }
}

fn parse_outcome(s: &str) -> Result<usize> {
    match s.trim() {
        "+" | "+1" => Ok(0),
        "-" | "-1" => Ok(1),
        other => Err(Error::InvalidInput(format!(
            "outcome {other:?} is not one of +, -, +1, -1"
        ))),
    }
}

/// Reads `setting,outcome_a,outcome_b,count` rows with a header line.
/// Repeated rows for the same cell are summed.
pub fn load_counts_csv<R: Read>(reader: R) -> Result<Vec<JointCounts>> {
    #[derive(Deserialize)]
    struct Row {
        setting: String,
        outcome_a: String,
        outcome_b: String,
        count: u64,
    }

    let mut out: Vec<JointCounts> = Vec::new();
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    for row in rdr.deserialize() {
        let row: Row = row?;
        let setting: Setting = row.setting.parse()?;
        let (a, b) = (parse_outcome(&row.outcome_a)?, parse_outcome(&row.outcome_b)?);
        let entry = match out.iter_mut().position(|c| c.setting_pair == setting) {
            Some(i) => &mut out[i],
            None => {
                out.push(JointCounts {
                    setting_pair: setting,
                    counts: [[0; 2]; 2],
                });
                out.last_mut().expect("just pushed")
            }
        };
        entry.counts[a][b] += row.count;
    }
    out.sort_by_key(|c| c.setting_pair);
    Ok(out)
}

/// A marginal comparison on empirical counts with its own threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountViolation {
    pub party: String,
    pub setting: String,
    pub deviation: f64,
    pub threshold: f64,
}

/// Marginal-law check on counts. Each comparison uses the threshold
/// `sigmas · √(p̂₁(1−p̂₁)/n₁ + p̂₂(1−p̂₂)/n₂)`, the binomial standard error of
/// the difference of the two `+` marginals.
pub fn no_signaling_check_counts(counts: &[JointCounts], sigmas: f64) -> Result<Vec<CountViolation>> {
    let mut out = Vec::new();
    for &(party, setting, s1, s2) in &COMPARISONS {
        let c1 = lookup(counts, |c| c.setting_pair, s1)?;
        let c2 = lookup(counts, |c| c.setting_pair, s2)?;
        let (t1, t2) = (c1.to_table()?, c2.to_table()?);
        let (m1, m2) = if party == "A" {
            (t1.marginal_a(), t2.marginal_a())
        } else {
            (t1.marginal_b(), t2.marginal_b())
        };
        let var = |p: f64, n: u64| p * (1.0 - p) / n as f64;
        let se = (var(m1[0], c1.total()) + var(m2[0], c2.total())).sqrt();
        let threshold = sigmas * se;
        let deviation = max_diff(m1, m2);
        if deviation > threshold {
            out.push(CountViolation {
                party: party.to_string(),
                setting: setting.to_string(),
                deviation,
                threshold,
            });
        }
    }
    Ok(out)
}
