//! Bose-Einstein and Maxwell-Boltzmann occupation fits.
//!
//! Level `i` (rank `i`, starting at 0) holds `Nᵢ` tokens at energy `Eᵢ`. The
//! two free parameters of each model are pinned by the totals
//! `N = Σ Nᵢ` and `E = Σ Nᵢ Eᵢ`:
//!
//! - BE: `N(E) = 1 / (A·e^{E/B} − 1)`
//! - MB: `N(E) = 1 / (C·e^{E/D})`
//!
//! For a fixed temperature-like parameter (`B` or `D`) the number constraint
//! has a unique solution for the prefactor (bisection for BE, closed form
//! for MB). The energy constraint is then monotone in the temperature and is
//! solved by bracket expansion followed by bisection in log space.

use serde::{Deserialize, Serialize};

use super::corpus::RankedSpectrum;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum EnergyLadder {
    /// `Eᵢ = i`
    Linear,
    /// `Eᵢ = i^p·ΔE + E₀`
    Power {
        p: f64,
        #[serde(rename = "deltaE")]
        delta_e: f64,
        e0: f64,
    },
}

impl EnergyLadder {
    pub fn power(p: f64, delta_e: f64, e0: f64) -> Result<Self> {
        if !(p > 0.0 && p.is_finite()) || !(delta_e > 0.0 && delta_e.is_finite()) || !(e0 >= 0.0 && e0.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "power ladder needs p > 0, deltaE > 0, e0 >= 0 (got p={p}, deltaE={delta_e}, e0={e0})"
            )));
        }
        Ok(EnergyLadder::Power { p, delta_e, e0 })
    }

    pub fn energy(&self, level: usize) -> f64 {
        match *self {
            EnergyLadder::Linear => level as f64,
            EnergyLadder::Power { p, delta_e, e0 } => (level as f64).powf(p) * delta_e + e0,
        }
    }

    pub fn energies(&self, levels: usize) -> Vec<f64> {
        (0..levels).map(|i| self.energy(i)).collect()
    }

    pub fn exponent(&self) -> f64 {
        match *self {
            EnergyLadder::Linear => 1.0,
            EnergyLadder::Power { p, .. } => p,
        }
    }
}

/// `(N, E)` of a spectrum on a ladder.
pub fn totals(spectrum: &RankedSpectrum, ladder: &EnergyLadder) -> (u64, f64) {
    let energy = spectrum
        .entries()
        .iter()
        .enumerate()
        .map(|(i, (_, c))| *c as f64 * ladder.energy(i))
        .sum();
    (spectrum.total(), energy)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GasModel {
    #[serde(rename = "BE")]
    BoseEinstein,
    #[serde(rename = "MB")]
    MaxwellBoltzmann,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GasParams {
    BoseEinstein {
        #[serde(rename = "A")]
        a: f64,
        #[serde(rename = "B")]
        b: f64,
    },
    MaxwellBoltzmann {
        #[serde(rename = "C")]
        c: f64,
        #[serde(rename = "D")]
        d: f64,
    },
}

impl GasParams {
    /// Model occupation at energy `e`.
    pub fn occupation(&self, e: f64) -> f64 {
        match *self {
            GasParams::BoseEinstein { a, b } => 1.0 / (a * (e / b).exp() - 1.0),
            GasParams::MaxwellBoltzmann { c, d } => (-e / d).exp() / c,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GasFit {
    pub model: GasModel,
    pub params: GasParams,
    pub residual_n: f64,
    pub residual_e: f64,
    /// Root-mean-square of `ln Nᵢ − ln N_model(Eᵢ)` over occupied levels.
    pub fit_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "camelCase")]
pub struct FitOptions {
    /// Iteration cap for each bracket expansion and each bisection.
    pub max_iter: usize,
    /// Relative bracket width at which a bisection stops.
    pub rel_tol: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            max_iter: 200,
            rel_tol: 1e-12,
        }
    }
}

/// Finds `x > 0` with `f(x) = 0` for `f` increasing in `x`, bisecting on
/// `ln x` after expanding a bracket around `start`.
fn solve_increasing(f: &mut dyn FnMut(f64) -> Result<f64>, start: f64, opts: &FitOptions, what: &str) -> Result<f64> {
    let mut lo = start;
    let mut hi = start;
    let mut f_lo = f(lo)?;
    let mut f_hi = f_lo;
    let mut steps = 0;
    while f_lo > 0.0 {
        hi = lo;
        lo /= 2.0;
        f_lo = f(lo)?;
        steps += 1;
        if steps > opts.max_iter || lo == 0.0 {
            return Err(Error::NonConvergence(format!("{what}: no lower bracket below {hi:e}")));
        }
    }
    if lo != start {
        f_hi = f(hi)?;
    }
    steps = 0;
    while f_hi < 0.0 {
        lo = hi;
        hi *= 2.0;
        f_hi = f(hi)?;
        steps += 1;
        if steps > opts.max_iter || !hi.is_finite() {
            return Err(Error::NonConvergence(format!("{what}: no upper bracket above {lo:e}")));
        }
    }
    if f_lo == 0.0 {
        return Ok(lo);
    }
    for _ in 0..opts.max_iter {
        if hi - lo <= opts.rel_tol * hi {
            return Ok(0.5 * (lo + hi));
        }
        let mid = (lo * hi).sqrt();
        let mid = if mid > lo && mid < hi { mid } else { 0.5 * (lo + hi) };
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if hi - lo <= opts.rel_tol * hi {
        Ok(0.5 * (lo + hi))
    } else {
        Err(Error::NonConvergence(format!(
            "{what}: bracket [{lo:e}, {hi:e}] after {} bisections",
            opts.max_iter
        )))
    }
}

/// BE occupations for ground-level gap `u = A·e^{E₀/B} − 1` and scaled
/// excitations `xᵢ = (Eᵢ − E₀)/B`. `u·e^x + expm1(x)` avoids cancellation.
fn be_occupation(u: f64, x: f64) -> f64 {
    1.0 / (u * x.exp() + x.exp_m1())
}

struct Problem<'a> {
    occupations: &'a [f64],
    energies: Vec<f64>,
    n_total: f64,
    e_total: f64,
}

impl<'a> Problem<'a> {
    fn new(occupations: &'a [f64], ladder: &EnergyLadder) -> Result<Self> {
        if occupations.len() < 2 {
            return Err(Error::Underdetermined);
        }
        if let Some(x) = occupations.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
            return Err(Error::InvalidInput(format!(
                "occupation {x} is not a nonnegative number"
            )));
        }
        let energies = ladder.energies(occupations.len());
        if energies.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput("energies must be strictly increasing".into()));
        }
        let n_total: f64 = occupations.iter().sum();
        let e_total: f64 = occupations.iter().zip(&energies).map(|(n, e)| n * e).sum();
        let e0 = energies[0];
        let mean_e = energies.iter().sum::<f64>() / energies.len() as f64;
        // attainable mean energies lie strictly between E₀ (all in the ground
        // level) and the level average (infinite temperature)
        let mean = e_total / n_total;
        if !(n_total > 0.0) || mean <= e0 || mean >= mean_e {
            return Err(Error::Infeasible(format!(
                "mean energy {mean} outside the open interval ({e0}, {mean_e})"
            )));
        }
        Ok(Self {
            occupations,
            energies,
            n_total,
            e_total,
        })
    }

    fn scaled(&self, t: f64) -> impl Iterator<Item = f64> + '_ {
        let e0 = self.energies[0];
        self.energies.iter().map(move |e| (e - e0) / t)
    }

    /// Ground gap `u` solving the BE number constraint at temperature `b`.
    fn be_gap(&self, b: f64, opts: &FitOptions) -> Result<f64> {
        let xs: Vec<f64> = self.scaled(b).collect();
        let mut f = |u: f64| -> Result<f64> {
            let n: f64 = xs.iter().map(|&x| be_occupation(u, x)).sum();
            Ok(self.n_total - n)
        };
        solve_increasing(&mut f, 1.0 / self.n_total, opts, "BE number constraint")
    }

    fn be_energy(&self, b: f64, u: f64) -> f64 {
        self.scaled(b)
            .zip(&self.energies)
            .map(|(x, e)| be_occupation(u, x) * e)
            .sum()
    }

    fn mb_weights(&self, d: f64) -> Vec<f64> {
        self.scaled(d).map(|x| (-x).exp()).collect()
    }

    fn temperature_scale(&self) -> f64 {
        let span = self.energies[self.energies.len() - 1] - self.energies[0];
        span.max(1e-300)
    }

    fn fit_error(&self, params: &GasParams) -> f64 {
        let (sum, count) = self
            .occupations
            .iter()
            .zip(&self.energies)
            .filter(|(n, _)| **n > 0.0)
            .map(|(n, e)| (n.ln() - params.occupation(*e).ln()).powi(2))
            .fold((0.0, 0usize), |(s, c), d| (s + d, c + 1));
        (sum / count as f64).sqrt()
    }

    fn finish(&self, model: GasModel, params: GasParams) -> Result<GasFit> {
        let (n, e) = self
            .energies
            .iter()
            .map(|&e| {
                let occ = params.occupation(e);
                (occ, occ * e)
            })
            .fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
        let residual_n = n - self.n_total;
        let residual_e = e - self.e_total;
        if !(residual_n.abs() < 1e-6 * self.n_total) || !(residual_e.abs() < 1e-6 * self.e_total.max(1.0)) {
            return Err(Error::NonConvergence(format!(
                "constraint residuals too large: N {residual_n:e}, E {residual_e:e}"
            )));
        }
        Ok(GasFit {
            model,
            params,
            residual_n,
            residual_e,
            fit_error: self.fit_error(&params),
        })
    }

    fn fit_be(&self, opts: &FitOptions) -> Result<GasFit> {
        let mut g = |b: f64| -> Result<f64> {
            let u = self.be_gap(b, opts)?;
            Ok(self.be_energy(b, u) - self.e_total)
        };
        let b = solve_increasing(&mut g, self.temperature_scale(), opts, "BE energy constraint")?;
        let u = self.be_gap(b, opts)?;
        let a = (1.0 + u) * (-self.energies[0] / b).exp();
        if !(a * (self.energies[0] / b).exp() > 1.0) {
            return Err(Error::Infeasible(format!("A = {a}, B = {b} violates A·e^(E0/B) > 1")));
        }
        self.finish(GasModel::BoseEinstein, GasParams::BoseEinstein { a, b })
    }

    fn fit_mb(&self, opts: &FitOptions) -> Result<GasFit> {
        let target = self.e_total / self.n_total;
        let mut g = |d: f64| -> Result<f64> {
            let w = self.mb_weights(d);
            let z: f64 = w.iter().sum();
            let mean = w.iter().zip(&self.energies).map(|(w, e)| w * e).sum::<f64>() / z;
            Ok(mean - target)
        };
        let d = solve_increasing(&mut g, self.temperature_scale(), opts, "MB energy constraint")?;
        let z: f64 = self.mb_weights(d).iter().sum();
        let c = (-self.energies[0] / d).exp() * z / self.n_total;
        if !(c > 0.0) {
            return Err(Error::Infeasible(format!("C = {c} is not positive")));
        }
        self.finish(GasModel::MaxwellBoltzmann, GasParams::MaxwellBoltzmann { c, d })
    }
}

/// Fits `model` to raw occupation numbers ordered by level.
pub fn fit_occupations(
    occupations: &[f64],
    ladder: &EnergyLadder,
    model: GasModel,
    opts: &FitOptions,
) -> Result<GasFit> {
    let problem = Problem::new(occupations, ladder)?;
    match model {
        GasModel::BoseEinstein => problem.fit_be(opts),
        GasModel::MaxwellBoltzmann => problem.fit_mb(opts),
    }
}

pub fn fit_gas(spectrum: &RankedSpectrum, ladder: &EnergyLadder, model: GasModel, opts: &FitOptions) -> Result<GasFit> {
    fit_occupations(&spectrum.occupations(), ladder, model, opts)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "camelCase")]
pub struct PowerLadderOptions {
    pub delta_e: f64,
    pub e0: f64,
    pub fit: FitOptions,
}

impl Default for PowerLadderOptions {
    fn default() -> Self {
        Self {
            delta_e: 1.0,
            e0: 0.0,
            fit: FitOptions::default(),
        }
    }
}

/// BE fits over a grid of exponents; returns the ladder with the smallest
/// fit error, ties going to the smaller exponent. Grid points whose fit
/// fails are skipped; if all fail, the first failure is returned.
pub fn fit_power_ladder_occupations(
    occupations: &[f64],
    p_grid: &[f64],
    opts: &PowerLadderOptions,
) -> Result<(EnergyLadder, GasFit)> {
    if p_grid.is_empty() {
        return Err(Error::InvalidInput("exponent grid is empty".into()));
    }
    let mut best: Option<(EnergyLadder, GasFit)> = None;
    let mut first_err = None;
    for &p in p_grid {
        let ladder = EnergyLadder::power(p, opts.delta_e, opts.e0)?;
        match fit_occupations(occupations, &ladder, GasModel::BoseEinstein, &opts.fit) {
            Ok(fit) => {
                let better = match &best {
                    None => true,
                    Some((l, f)) => fit.fit_error < f.fit_error || (fit.fit_error == f.fit_error && p < l.exponent()),
                };
                if better {
                    best = Some((ladder, fit));
                }
            }
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    best.ok_or_else(|| first_err.expect("nonempty grid"))
}

pub fn fit_power_ladder(
    spectrum: &RankedSpectrum,
    p_grid: &[f64],
    opts: &PowerLadderOptions,
) -> Result<(EnergyLadder, GasFit)> {
    fit_power_ladder_occupations(&spectrum.occupations(), p_grid, opts)
}

/// One plot-ready row: natural logs of energy, data and both model curves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlotRow {
    pub log_energy: f64,
    pub log_count_data: f64,
    pub log_count_be: f64,
    pub log_count_mb: f64,
}

/// Rows for every level with positive energy (`ln 0` is undefined).
pub fn plot_rows(occupations: &[f64], ladder: &EnergyLadder, be: &GasFit, mb: &GasFit) -> Vec<PlotRow> {
    occupations
        .iter()
        .enumerate()
        .map(|(i, n)| (ladder.energy(i), n))
        .filter(|(e, _)| *e > 0.0)
        .map(|(e, n)| PlotRow {
            log_energy: e.ln(),
            log_count_data: n.ln(),
            log_count_be: be.params.occupation(e).ln(),
            log_count_mb: mb.params.occupation(e).ln(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spectrum(counts: &[u64]) -> RankedSpectrum {
        RankedSpectrum::from_counts(counts.iter().enumerate().map(|(i, c)| (format!("w{i:04}"), *c))).unwrap()
    }

    #[test]
    fn totals_examples() {
        let s = spectrum(&[2, 1]);
        assert_eq!(totals(&s, &EnergyLadder::Linear), (3, 1.0));
        assert_eq!(totals(&spectrum(&[7]), &EnergyLadder::Linear), (7, 0.0));
        let p2 = EnergyLadder::power(2.0, 1.0, 0.0).unwrap();
        assert_eq!(totals(&s, &p2), (3, 1.0));
    }

    #[test]
    fn ladder_validation() {
        assert!(EnergyLadder::power(0.0, 1.0, 0.0).is_err());
        assert!(EnergyLadder::power(1.0, -1.0, 0.0).is_err());
        assert!(EnergyLadder::power(1.0, 1.0, -0.5).is_err());
        let l = EnergyLadder::power(1.5, 2.0, 0.5).unwrap();
        assert_eq!(l.energy(0), 0.5);
        assert!((l.energy(4) - 16.5).abs() < 1e-12);
    }

    #[test]
    fn two_level_closed_forms() {
        let s = spectrum(&[2, 1]);
        let opts = FitOptions::default();
        let be = fit_gas(&s, &EnergyLadder::Linear, GasModel::BoseEinstein, &opts).unwrap();
        let GasParams::BoseEinstein { a, b } = be.params else {
            panic!()
        };
        assert!((a - 1.5).abs() < 1e-9, "{a}");
        assert!((b - 1.0 / (4.0f64 / 3.0).ln()).abs() < 1e-9, "{b}");

        let mb = fit_gas(&s, &EnergyLadder::Linear, GasModel::MaxwellBoltzmann, &opts).unwrap();
        let GasParams::MaxwellBoltzmann { c, d } = mb.params else {
            panic!()
        };
        assert!((c - 0.5).abs() < 1e-9);
        assert!((d - 1.0 / 2f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn single_level_is_underdetermined() {
        let err = fit_gas(
            &spectrum(&[5]),
            &EnergyLadder::Linear,
            GasModel::BoseEinstein,
            &FitOptions::default(),
        );
        assert!(matches!(err, Err(Error::Underdetermined)));
    }

    #[test]
    fn flat_spectrum_is_infeasible() {
        let err = fit_gas(
            &spectrum(&[3, 3, 3]),
            &EnergyLadder::Linear,
            GasModel::MaxwellBoltzmann,
            &FitOptions::default(),
        );
        assert!(matches!(err, Err(Error::Infeasible(_))));
    }

    #[test]
    fn empty_grid() {
        let r = fit_power_ladder(&spectrum(&[4, 2, 1]), &[], &PowerLadderOptions::default());
        assert!(matches!(r, Err(Error::InvalidInput(_))));
    }

    #[test]
    fn plot_skips_zero_energy() {
        let s = spectrum(&[6, 3, 2, 1]);
        let opts = FitOptions::default();
        let be = fit_gas(&s, &EnergyLadder::Linear, GasModel::BoseEinstein, &opts).unwrap();
        let mb = fit_gas(&s, &EnergyLadder::Linear, GasModel::MaxwellBoltzmann, &opts).unwrap();
        let rows = plot_rows(&s.occupations(), &EnergyLadder::Linear, &be, &mb);
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0].log_energy, 0.0);
        assert!((rows[0].log_count_data - 3f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn fit_serializes() {
        let s = spectrum(&[2, 1]);
        let be = fit_gas(
            &s,
            &EnergyLadder::Linear,
            GasModel::BoseEinstein,
            &FitOptions::default(),
        )
        .unwrap();
        let v = serde_json::to_value(be).unwrap();
        assert_eq!(v["model"], "BE");
        assert!(v["params"]["A"].is_number() && v["fitError"].is_number());
    }
}
