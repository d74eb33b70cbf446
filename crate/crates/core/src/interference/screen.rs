use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{interference_record, Exemplar};
use crate::{Error, Result, C64};

/// Centre and width of one exemplar's Gaussian bump on the screen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExemplarPosition {
    pub x: f64,
    pub y: f64,
    pub width: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GridSpec {
    pub width: usize,
    pub height: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl GridSpec {
    fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.width as f64
    }

    fn dy(&self) -> f64 {
        (self.y_max - self.y_min) / self.height as f64
    }

    pub fn cell_center(&self, ix: usize, iy: usize) -> (f64, f64) {
        (
            self.x_min + (ix as f64 + 0.5) * self.dx(),
            self.y_min + (iy as f64 + 0.5) * self.dy(),
        )
    }

    /// Cell containing `(x, y)`, clamped to the grid.
    pub fn cell_of(&self, x: f64, y: f64) -> (usize, usize) {
        let ix = ((x - self.x_min) / self.dx())
            .floor()
            .clamp(0.0, (self.width - 1) as f64);
        let iy = ((y - self.y_min) / self.dy())
            .floor()
            .clamp(0.0, (self.height - 1) as f64);
        (ix as usize, iy as usize)
    }
}

/// Sampled screen intensity, row-major with `y` as the row index.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ScreenRaster {
    pub spec: GridSpec,
    pub cell_area: f64,
    pub grid: Vec<f64>,
}

impl ScreenRaster {
    pub fn value(&self, ix: usize, iy: usize) -> f64 {
        self.grid[iy * self.spec.width + ix]
    }

    pub fn total_mass(&self) -> f64 {
        self.grid.iter().sum::<f64>() * self.cell_area
    }

    /// Cell of the largest intensity; first in row-major order on ties.
    pub fn argmax(&self) -> (usize, usize) {
        let mut best = 0;
        for (i, v) in self.grid.iter().enumerate() {
            if *v > self.grid[best] {
                best = i;
            }
        }
        (best % self.spec.width, best / self.spec.width)
    }

    /// Plot-ready rows `x,y,intensity` at cell centres.
    pub fn write_csv<W: Write>(&self, out: W, fmt: impl Fn(f64) -> String) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["x", "y", "intensity"])?;
        for iy in 0..self.spec.height {
            for ix in 0..self.spec.width {
                let (x, y) = self.spec.cell_center(ix, iy);
                w.write_record([fmt(x), fmt(y), fmt(self.value(ix, iy))])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Binary 8-bit PGM scaled to the maximum intensity, top row = largest `y`.
    pub fn write_pgm<W: Write>(&self, mut out: W) -> Result<()> {
        let max = self.grid.iter().copied().fold(0.0, f64::max);
        write!(out, "P5\n{} {}\n255\n", self.spec.width, self.spec.height)?;
        let mut bytes = Vec::with_capacity(self.grid.len());
        for iy in (0..self.spec.height).rev() {
            for ix in 0..self.spec.width {
                let v = if max > 0.0 { self.value(ix, iy) / max } else { 0.0 };
                bytes.push((v * 255.0).round().clamp(0.0, 255.0) as u8);
            }
        }
        out.write_all(&bytes)?;
        Ok(())
    }
}

/// `n` positions on a 6-column grid of unit pitch, in data order, with width
/// half the pitch, plus bounds leaving a margin of three widths.
pub fn default_layout(n: usize, width: usize, height: usize) -> (Vec<ExemplarPosition>, GridSpec) {
    const COLUMNS: usize = 6;
    let rows = n.div_ceil(COLUMNS).max(1);
    let w = 0.5;
    let layout = (0..n)
        .map(|k| ExemplarPosition {
            x: (k % COLUMNS) as f64,
            y: (k / COLUMNS) as f64,
            width: w,
        })
        .collect();
    let margin = 3.0 * w;
    let spec = GridSpec {
        width,
        height,
        x_min: -margin,
        x_max: (COLUMNS - 1) as f64 + margin,
        y_min: -margin,
        y_max: (rows - 1) as f64 + margin,
    };
    (layout, spec)
}

fn validate(dataset: &[Exemplar], layout: &[ExemplarPosition], spec: &GridSpec) -> Result<()> {
    if layout.len() != dataset.len() {
        return Err(Error::DimensionMismatch {
            expected: dataset.len(),
            found: layout.len(),
        });
    }
    if spec.width == 0 || spec.height == 0 || !(spec.x_max > spec.x_min) || !(spec.y_max > spec.y_min) {
        return Err(Error::InvalidInput(
            "grid must have positive size and increasing bounds".into(),
        ));
    }
    for (x, pos) in dataset.iter().zip(layout) {
        if !(pos.width > 0.0 && pos.width.is_finite()) {
            return Err(Error::InvalidInput(format!("{}: width must be positive", x.label)));
        }
        let margin = 3.0 * pos.width;
        if pos.x - margin < spec.x_min
            || pos.x + margin > spec.x_max
            || pos.y - margin < spec.y_min
            || pos.y + margin > spec.y_max
        {
            return Err(Error::InvalidInput(format!(
                "{}: bounds must enclose the point by three widths",
                x.label
            )));
        }
    }
    for i in 0..layout.len() {
        for j in i + 1..layout.len() {
            if layout[i].x == layout[j].x && layout[i].y == layout[j].y {
                return Err(Error::LayoutOverlap(dataset[i].label.clone(), dataset[j].label.clone()));
            }
        }
    }
    Ok(())
}

struct Bump {
    x: f64,
    y: f64,
    inv_two_w2: f64,
    norm: f64,
    amp1: f64,
    amp2: C64,
}

/// `|ψ₁ + ψ₂|²/2` on the grid, normalized to unit mass.
///
/// `ψ₁ = Σ √p1ₖ gₖ` and `ψ₂ = Σ √p2ₖ e^{iθₖ} gₖ` with `gₖ` a unit-mass
/// Gaussian amplitude of width `wₖ`. Unrepresentable exemplars use the
/// nearest admissible phase (`cos θ = ±1`).
pub fn render_screen(dataset: &[Exemplar], layout: &[ExemplarPosition], spec: &GridSpec) -> Result<ScreenRaster> {
    validate(dataset, layout, spec)?;
    let bumps = dataset
        .iter()
        .zip(layout)
        .map(|(x, pos)| {
            let r = interference_record(x)?;
            let cos = r.cos_theta.unwrap_or(if r.interference >= 0.0 { 1.0 } else { -1.0 });
            let theta = cos.acos();
            Ok(Bump {
                x: pos.x,
                y: pos.y,
                inv_two_w2: 1.0 / (2.0 * pos.width * pos.width),
                norm: 1.0 / (std::f64::consts::PI.sqrt() * pos.width),
                amp1: x.p1.sqrt(),
                amp2: C64::from_polar(x.p2.sqrt(), theta),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut grid = vec![0.0; spec.width * spec.height];
    grid.par_chunks_mut(spec.width).enumerate().for_each(|(iy, row)| {
        for (ix, cell) in row.iter_mut().enumerate() {
            let (x, y) = spec.cell_center(ix, iy);
            let mut psi = C64::new(0.0, 0.0);
            for b in &bumps {
                let g = b.norm * (-((x - b.x).powi(2) + (y - b.y).powi(2)) * b.inv_two_w2).exp();
                psi += (b.amp2 + b.amp1) * g;
            }
            *cell = psi.norm_sqr() / 2.0;
        }
    });

    let cell_area = spec.dx() * spec.dy();
    let mass = grid.iter().sum::<f64>() * cell_area;
    if !(mass > 0.0) {
        return Err(Error::InvalidInput("screen has zero total intensity".into()));
    }
    grid.iter_mut().for_each(|v| *v /= mass);
    Ok(ScreenRaster {
        spec: *spec,
        cell_area,
        grid,
    })
}
