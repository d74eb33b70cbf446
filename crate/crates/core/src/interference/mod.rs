//! Disjunction interference for concept-combination data.
//!
//! For an exemplar with membership probabilities `p1` (first concept),
//! `p2` (second concept) and `p12` (their disjunction), the superposition
//! `(ψ₁ + ψ₂)/√2` gives `p12 = (p1 + p2)/2 + √(p1·p2)·cos θ`. The term
//! `I = p12 − (p1 + p2)/2` measures over- or underextension.

mod screen;

pub use screen::{default_layout, render_screen, ExemplarPosition, GridSpec, ScreenRaster};

use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::{Error, Result, Tolerances};

/// Slack allowed on `|I| ≤ √(p1·p2)` before a record is unrepresentable.
const REPRESENTABLE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exemplar {
    pub label: String,
    pub p1: f64,
    pub p2: f64,
    pub p12: f64,
}

impl Exemplar {
    pub fn new(label: impl Into<String>, p1: f64, p2: f64, p12: f64) -> Self {
        Self {
            label: label.into(),
            p1,
            p2,
            p12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct InterferenceRecord {
    pub exemplar: String,
    pub p1: f64,
    pub p2: f64,
    pub p12: f64,
    #[serde(rename = "I")]
    pub interference: f64,
    /// `None` when `√(p1·p2) = 0` or `|I| > √(p1·p2)`.
    pub cos_theta: Option<f64>,
}

impl InterferenceRecord {
    pub fn is_representable(&self) -> bool {
        self.cos_theta.is_some()
    }

    /// `(p1 + p2)/2 + √(p1·p2)·cos θ`
    pub fn reconstruct_p12(&self) -> Option<f64> {
        self.cos_theta
            .map(|c| (self.p1 + self.p2) / 2.0 + (self.p1 * self.p2).sqrt() * c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Extension {
    Overextended,
    Underextended,
    Classical,
}

fn check_probability(label: &str, name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange(format!("{label}: {name} = {p} is not in [0, 1]")));
    }
    Ok(())
}

pub fn interference_record(x: &Exemplar) -> Result<InterferenceRecord> {
    check_probability(&x.label, "p1", x.p1)?;
    check_probability(&x.label, "p2", x.p2)?;
    check_probability(&x.label, "p12", x.p12)?;
    let interference = x.p12 - (x.p1 + x.p2) / 2.0;
    let amplitude = (x.p1 * x.p2).sqrt();
    let cos_theta = if amplitude > 0.0 && interference.abs() <= amplitude + REPRESENTABLE_SLACK {
        Some((interference / amplitude).clamp(-1.0, 1.0))
    } else {
        None
    };
    Ok(InterferenceRecord {
        exemplar: x.label.clone(),
        p1: x.p1,
        p2: x.p2,
        p12: x.p12,
        interference,
        cos_theta,
    })
}

pub fn interference_terms(dataset: &[Exemplar]) -> Result<Vec<InterferenceRecord>> {
    dataset.iter().map(interference_record).collect()
}

pub fn classify(record: &InterferenceRecord) -> Extension {
    let tol = Tolerances::DEFAULT.neutral;
    if record.interference > tol {
        Extension::Overextended
    } else if record.interference < -tol {
        Extension::Underextended
    } else {
        Extension::Classical
    }
}

/// `Σ I = Σ p12 − (Σ p1 + Σ p2)/2`; zero when all three columns are
/// normalized distributions.
pub fn normalization_residual(dataset: &[Exemplar]) -> f64 {
    dataset.iter().map(|x| x.p12 - (x.p1 + x.p2) / 2.0).sum()
}

/// Reads `label,p1,p2,p12` rows with a header line.
pub fn load_dataset_csv<R: Read>(reader: R) -> Result<Vec<Exemplar>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let rows = rdr.deserialize().collect::<std::result::Result<Vec<Exemplar>, _>>()?;
    for x in &rows {
        check_probability(&x.label, "p1", x.p1)?;
        check_probability(&x.label, "p2", x.p2)?;
        check_probability(&x.label, "p12", x.p12)?;
    }
    Ok(rows)
}

/// The 24 fruit and vegetable exemplar names of the disjunction study.
pub const EXEMPLAR_NAMES: [&str; 24] = [
    "Almond",
    "Acorn",
    "Peanut",
    "Olive",
    "Coconut",
    "Raisin",
    "Elderberry",
    "Apple",
    "Mustard",
    "Wheat",
    "Ginger root",
    "Chili pepper",
    "Garlic",
    "Mushroom",
    "Watercress",
    "Lentils",
    "Green pepper",
    "Yam",
    "Tomato",
    "Pumpkin",
    "Broccoli",
    "Rice",
    "Parsley",
    "Black pepper",
];

/// SYNTHETIC demonstration data over the 24 exemplar names. These are not
/// measured probabilities: `p1` and `p2` are fixed normalized profiles, and
/// `p12` is built from cosines chosen so the `p12` column is normalized too.
pub fn synthetic_dataset() -> Vec<Exemplar> {
    let raw1: Vec<f64> = (0..24).map(|k| 1.0 + ((k * 5) % 7) as f64).collect();
    let raw2: Vec<f64> = (0..24).map(|k| 1.0 + ((k * 3 + 2) % 8) as f64).collect();
    let (s1, s2): (f64, f64) = (raw1.iter().sum(), raw2.iter().sum());
    let p1: Vec<f64> = raw1.iter().map(|x| x / s1).collect();
    let p2: Vec<f64> = raw2.iter().map(|x| x / s2).collect();
    let amp: Vec<f64> = p1.iter().zip(&p2).map(|(a, b)| (a * b).sqrt()).collect();
    let base: Vec<f64> = (0..24).map(|k| 0.6 * (1.3 * k as f64).sin()).collect();
    // shift cosines so that Σ √(p1 p2) cos θ = 0
    let shift = amp.iter().zip(&base).map(|(a, c)| a * c).sum::<f64>() / amp.iter().sum::<f64>();
    EXEMPLAR_NAMES
        .iter()
        .enumerate()
        .map(|(k, name)| {
            let cos = base[k] - shift;
            let p12 = (p1[k] + p2[k]) / 2.0 + amp[k] * cos;
            Exemplar::new(*name, p1[k], p2[k], p12)
        })
        .collect()
}
