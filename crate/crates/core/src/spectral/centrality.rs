use serde::{Deserialize, Serialize};

use super::gaps::{eigengaps, select_k, EigengapAnalysis, SelectionMode};
use super::{decompose, ColumnKind, DecomposeOptions, Spectrum};
use crate::error::{Error, Result};
use crate::graph::{MatrixMode, SquareMatrix};

/// Minimum norm of the real or imaginary part of a complex eigenvector.
const PART_NORM_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    LocalEigenvector,
    Eigenvector,
    CommunityEigenvector,
    Pagerank,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "p")]
pub enum Normalization {
    UnitTwoNorm,
    UnitSum,
    Raw,
    HadamardPower(f64),
}

/// Per-node nonnegative centrality scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentralityVector {
    pub values: Vec<f64>,
    pub method: Method,
    pub matrix_mode: MatrixMode,
    pub k_used: Option<usize>,
    pub normalization: Normalization,
}

impl CentralityVector {
    pub fn zeros(n: usize, method: Method, matrix_mode: MatrixMode) -> Self {
        CentralityVector {
            values: vec![0.0; n],
            method,
            matrix_mode,
            k_used: None,
            normalization: Normalization::Raw,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KSelection {
    Auto,
    Fixed(usize),
}

/// Real n×k matrix assembled from the leading spectrum columns.
#[derive(Debug, Clone, PartialEq)]
pub struct VMatrix {
    /// Column vectors.
    pub columns: Vec<Vec<f64>>,
    /// 0-based indices of columns set to the zero vector.
    pub zero_columns: Vec<usize>,
    pub k_requested: usize,
}

impl VMatrix {
    pub fn k(&self) -> usize {
        self.columns.len()
    }

    pub fn extended(&self) -> bool {
        self.columns.len() != self.k_requested
    }

    pub fn nonzero_columns(&self) -> usize {
        self.columns.len() - self.zero_columns.len()
    }

    /// Euclidean norm of each row.
    pub fn row_norms(&self) -> Vec<f64> {
        let n = self.columns.first().map_or(0, Vec::len);
        (0..n)
            .map(|i| {
                self.columns
                    .iter()
                    .map(|c| c[i] * c[i])
                    .sum::<f64>()
                    .sqrt()
            })
            .collect()
    }
}

/// Build V from the first `k` spectrum columns.
///
/// Real nonzero eigenvalues contribute their unit eigenvector, a conjugate
/// pair contributes the normalized real and imaginary parts of the +Im
/// eigenvector, and zero eigenvalues contribute the zero vector. A `k` that
/// would split a conjugate pair is extended by one.
pub fn build_v(s: &Spectrum, k: usize) -> Result<VMatrix> {
    if k == 0 || k > s.len() {
        return Err(Error::input(format!(
            "k = {k} outside 1..={} available eigenpairs",
            s.len()
        )));
    }
    let effective = if s.kinds[k - 1] == ColumnKind::PairFirst {
        k + 1
    } else {
        k
    };
    let n = s.n;
    let mut columns = Vec::with_capacity(effective);
    let mut zero_columns = Vec::new();
    for j in 0..effective {
        let column = match s.kinds[j] {
            ColumnKind::Zero => {
                zero_columns.push(j);
                vec![0.0; n]
            }
            ColumnKind::Real => s.eigenvectors[j].iter().map(|z| z.re).collect(),
            ColumnKind::PairFirst => {
                unit_part(s.eigenvectors[j].iter().map(|z| z.re).collect(), j)?
            }
            ColumnKind::PairSecond => {
                unit_part(s.eigenvectors[j - 1].iter().map(|z| z.im).collect(), j)?
            }
        };
        columns.push(column);
    }
    Ok(VMatrix {
        columns,
        zero_columns,
        k_requested: k,
    })
}

fn unit_part(mut v: Vec<f64>, column: usize) -> Result<Vec<f64>> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm < PART_NORM_FLOOR {
        return Err(Error::numerical(
            format!(
                "column {} is marked complex but its eigenvector part has norm {norm:e}",
                column + 1
            ),
            Some(column),
        ));
    }
    v.iter_mut().for_each(|x| *x /= norm);
    Ok(v)
}

/// Conditions worth surfacing next to a centrality result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Warning {
    /// k landed on the first member of a conjugate pair.
    PairBoundaryExtension { requested: usize, used: usize },
    /// User-chosen k whose eigenvalue does not have a positive real part.
    NonPositiveEigenvalue { k: usize, re: f64 },
    EigenspaceDeficiency {
        index: usize,
        re: f64,
        im: f64,
        algebraic: usize,
        geometric: usize,
    },
    /// Only the leading eigenpairs were computed.
    PartialSpectrum { computed: usize, n: usize },
}

/// Local eigenvector centrality together with how it was obtained.
#[derive(Debug, Clone)]
pub struct LocalCentrality {
    pub centrality: CentralityVector,
    pub k_requested: usize,
    pub selection_mode: SelectionMode,
    pub v: VMatrix,
    pub warnings: Vec<Warning>,
}

/// Local eigenvector centrality from an existing decomposition. With
/// [`KSelection::Auto`] a spectrum without admissible gap yields
/// [`Error::DegenerateSpectrum`] carrying the all-zero vector.
pub fn centrality_from_spectrum(
    s: &Spectrum,
    gaps: &EigengapAnalysis,
    k: KSelection,
) -> Result<LocalCentrality> {
    let (k_requested, selection_mode) = match k {
        KSelection::Auto => match select_k(gaps) {
            Ok(k) => (k, SelectionMode::Auto),
            Err(Error::DegenerateSpectrum { reason, .. }) => {
                let mut zero = CentralityVector::zeros(s.n, Method::LocalEigenvector, s.mode);
                zero.normalization = Normalization::Raw;
                return Err(Error::DegenerateSpectrum {
                    reason,
                    zero_vector: Some(Box::new(zero)),
                });
            }
            Err(e) => return Err(e),
        },
        KSelection::Fixed(k) => (k, SelectionMode::User),
    };

    let v = build_v(s, k_requested)?;
    let mut warnings = Vec::new();
    if v.extended() {
        warnings.push(Warning::PairBoundaryExtension {
            requested: k_requested,
            used: v.k(),
        });
    }
    if selection_mode == SelectionMode::User && s.eigenvalues[k_requested - 1].re <= 0.0 {
        warnings.push(Warning::NonPositiveEigenvalue {
            k: k_requested,
            re: s.eigenvalues[k_requested - 1].re,
        });
    }
    for d in &s.deficiencies {
        if d.first_index <= v.k() {
            warnings.push(Warning::EigenspaceDeficiency {
                index: d.first_index,
                re: d.re,
                im: d.im,
                algebraic: d.algebraic,
                geometric: d.geometric,
            });
        }
    }
    if !s.complete {
        warnings.push(Warning::PartialSpectrum {
            computed: s.len(),
            n: s.n,
        });
    }

    let centrality = CentralityVector {
        values: v.row_norms(),
        method: Method::LocalEigenvector,
        matrix_mode: s.mode,
        k_used: Some(v.k()),
        normalization: Normalization::Raw,
    };
    Ok(LocalCentrality {
        centrality,
        k_requested,
        selection_mode,
        v,
        warnings,
    })
}

/// Local eigenvector centrality of `m`: row norms of the V matrix built
/// from the first `k` eigenpairs.
pub fn local_centrality(m: &SquareMatrix, k: KSelection) -> Result<CentralityVector> {
    let s = decompose(m, &DecomposeOptions::default())?;
    let gaps = match eigengaps(&s) {
        Ok(g) => g,
        // a 1×1 matrix has no gaps; only an explicit k = 1 makes sense
        Err(e) if s.len() == 1 => match k {
            KSelection::Fixed(_) => EigengapAnalysis {
                gaps: vec![],
                admissible: vec![],
                selected_k: None,
                selection_mode: None,
                prominent: vec![],
                search_bound: 1,
            },
            KSelection::Auto => return Err(e),
        },
        Err(e) => return Err(e),
    };
    centrality_from_spectrum(&s, &gaps, k).map(|lc| lc.centrality)
}

/// Absolute value of the unit-norm principal eigenvector.
///
/// A principal eigenvalue that snaps to zero (nilpotent matrix) gives the
/// zero vector.
pub fn eigenvector_centrality(m: &SquareMatrix) -> Result<CentralityVector> {
    if m.mode() != MatrixMode::Adjacency {
        return Err(Error::Mode {
            expected: MatrixMode::Adjacency,
            found: m.mode(),
        });
    }
    let s = decompose(m, &DecomposeOptions::default())?;
    Ok(principal_centrality(&s))
}

pub(crate) fn principal_centrality(s: &Spectrum) -> CentralityVector {
    let values = match s.kinds[0] {
        ColumnKind::Zero => vec![0.0; s.n],
        ColumnKind::Real => {
            let v = &s.eigenvectors[0];
            let sum: f64 = v.iter().map(|z| z.re).sum();
            let sign = if sum < 0.0 { -1.0 } else { 1.0 };
            v.iter().map(|z| (sign * z.re).abs()).collect()
        }
        ColumnKind::PairFirst | ColumnKind::PairSecond => {
            s.eigenvectors[0].iter().map(|z| z.norm()).collect()
        }
    };
    CentralityVector {
        values,
        method: Method::Eigenvector,
        matrix_mode: s.mode,
        k_used: Some(1),
        normalization: Normalization::UnitTwoNorm,
    }
}
