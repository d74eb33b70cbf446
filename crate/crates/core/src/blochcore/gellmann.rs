//! Generalized Gell-Mann generators of `su(N)`.
//!
//! Fixed order: all symmetric generators for `j < k` in lexicographic order,
//! then the antisymmetric ones in the same order, then the diagonal ones for
//! `l = 1..N`. Every generator `G` is Hermitian, traceless and satisfies
//! `tr(G_a G_b) = 2 δ_ab`. For `N = 2` the order is `σx, σy, σz`.

use nalgebra::DMatrix;

use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    /// `|j⟩⟨k| + |k⟩⟨j|`
    Symmetric(usize, usize),
    /// `−i|j⟩⟨k| + i|k⟩⟨j|`
    Antisymmetric(usize, usize),
    /// `√(2/(l(l+1))) (Σ_{m<l} |m⟩⟨m| − l|l⟩⟨l|)`
    Diagonal(usize),
}

pub fn generators(n: usize) -> Vec<Generator> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|j| (j + 1..n).map(move |k| (j, k))).collect();
    let mut out = Vec::with_capacity(n * n - 1);
    out.extend(pairs.iter().map(|&(j, k)| Generator::Symmetric(j, k)));
    out.extend(pairs.iter().map(|&(j, k)| Generator::Antisymmetric(j, k)));
    out.extend((1..n).map(Generator::Diagonal));
    out
}

fn diagonal_scale(l: usize) -> f64 {
    (2.0 / (l * (l + 1)) as f64).sqrt()
}

impl Generator {
    pub fn matrix(&self, n: usize) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(n, n);
        match *self {
            Generator::Symmetric(j, k) => {
                m[(j, k)] = C64::new(1.0, 0.0);
                m[(k, j)] = C64::new(1.0, 0.0);
            }
            Generator::Antisymmetric(j, k) => {
                m[(j, k)] = C64::new(0.0, -1.0);
                m[(k, j)] = C64::new(0.0, 1.0);
            }
            Generator::Diagonal(l) => {
                let s = diagonal_scale(l);
                for i in 0..l {
                    m[(i, i)] = C64::new(s, 0.0);
                }
                m[(l, l)] = C64::new(-s * l as f64, 0.0);
            }
        }
        m
    }

    /// `tr(ρ·G)` read directly off the entries of the Hermitian matrix `rho`.
    pub fn expectation(&self, rho: &DMatrix<C64>) -> f64 {
        match *self {
            Generator::Symmetric(j, k) => 2.0 * rho[(j, k)].re,
            Generator::Antisymmetric(j, k) => -2.0 * rho[(j, k)].im,
            Generator::Diagonal(l) => {
                let head: f64 = (0..l).map(|m| rho[(m, m)].re).sum();
                diagonal_scale(l) * (head - l as f64 * rho[(l, l)].re)
            }
        }
    }

    /// Adds `coeff · G` into `target`.
    pub fn accumulate(&self, coeff: f64, target: &mut DMatrix<C64>) {
        match *self {
            Generator::Symmetric(j, k) => {
                target[(j, k)] += C64::new(coeff, 0.0);
                target[(k, j)] += C64::new(coeff, 0.0);
            }
            Generator::Antisymmetric(j, k) => {
                target[(j, k)] += C64::new(0.0, -coeff);
                target[(k, j)] += C64::new(0.0, coeff);
            }
            Generator::Diagonal(l) => {
                let s = coeff * diagonal_scale(l);
                for m in 0..l {
                    target[(m, m)] += C64::new(s, 0.0);
                }
                target[(l, l)] += C64::new(-s * l as f64, 0.0);
            }
        }
    }
}
