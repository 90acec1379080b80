use serde::{Deserialize, Serialize};

use super::Spectrum;
use crate::error::{Error, Result};

/// Relative tolerance under which two gaps count as tied.
const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionMode {
    Auto,
    User,
}

/// Consecutive real-part differences of an ordered spectrum.
///
/// Indices are 1-based throughout: `gaps[i - 1]` is the gap between
/// eigenvalues `i` and `i + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigengapAnalysis {
    pub gaps: Vec<f64>,
    /// `Re(λ_i) > 0`
    pub admissible: Vec<bool>,
    pub selected_k: Option<usize>,
    pub selection_mode: Option<SelectionMode>,
    /// All gaps as (index, gap), largest first, ties by ascending index.
    pub prominent: Vec<(usize, f64)>,
    /// Number of eigenvalues the gaps were computed from.
    pub search_bound: usize,
}

impl EigengapAnalysis {
    pub fn top(&self, count: usize) -> &[(usize, f64)] {
        &self.prominent[..count.min(self.prominent.len())]
    }
}

pub fn eigengaps(s: &Spectrum) -> Result<EigengapAnalysis> {
    let m = s.len();
    if m < 2 {
        return Err(Error::input(format!(
            "eigengap analysis needs at least 2 eigenvalues, got {m}"
        )));
    }
    let re = s.real_parts();
    let gaps: Vec<f64> = re.windows(2).map(|w| w[0] - w[1]).collect();
    let admissible = re[..m - 1].iter().map(|&r| r > 0.0).collect();
    let mut prominent: Vec<(usize, f64)> = gaps.iter().enumerate().map(|(i, &g)| (i + 1, g)).collect();
    prominent.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    Ok(EigengapAnalysis {
        gaps,
        admissible,
        selected_k: None,
        selection_mode: None,
        prominent,
        search_bound: m,
    })
}

/// Smallest admissible index attaining the largest admissible gap.
pub fn select_k(e: &EigengapAnalysis) -> Result<usize> {
    let best = e
        .gaps
        .iter()
        .zip(&e.admissible)
        .filter(|(_, &ok)| ok)
        .map(|(&g, _)| g)
        .fold(f64::NEG_INFINITY, f64::max);
    if best == f64::NEG_INFINITY {
        return Err(Error::DegenerateSpectrum {
            reason: "no eigenvalue has a positive real part, so no admissible eigengap exists"
                .into(),
            zero_vector: None,
        });
    }
    let threshold = best - TIE_TOL * best.abs();
    let k = e
        .gaps
        .iter()
        .zip(&e.admissible)
        .position(|(&g, &ok)| ok && g >= threshold)
        .expect("maximum is attained");
    Ok(k + 1)
}
