//! Word-frequency spectra as occupation numbers of a gas of word tokens.

mod corpus;
mod fit;
mod microstates;
mod zipf;

pub use corpus::{connective_ratio, ingest, tokenize, ConnectiveCount, RankedSpectrum, Ratio, TokenizerConfig};
pub use fit::{
    fit_gas, fit_occupations, fit_power_ladder, fit_power_ladder_occupations, plot_rows, totals, EnergyLadder,
    FitOptions, GasFit, GasModel, GasParams, PlotRow, PowerLadderOptions,
};
pub use microstates::{count_microstates, Statistics};
pub use zipf::{zipf_fit, zipf_report, ZipfReport};

/// Public-domain sample: the 1861 and 1862 annual messages to Congress of
/// Abraham Lincoln (about 15,000 tokens).
pub const SAMPLE_CORPUS: &str = include_str!("../../data/lincoln_annual_messages_1861_1862.txt");
