//! Side-by-side comparison of two spectra of the same problem.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectrum::{Spectrum, SpectrumMethod};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairedEigenvalue {
    pub index: usize,
    pub reference: f64,
    pub other: f64,
    pub relative_diff: f64,
    pub within_tolerance: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountSample {
    pub lambda: f64,
    pub n_reference: u64,
    pub n_other: u64,
    /// `n_other − n_reference`.
    pub diff: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumComparison {
    pub reference_method: SpectrumMethod,
    pub other_method: SpectrumMethod,
    /// Both spectra are cut at the smaller of their two `lambda_max`.
    pub lambda_cap: f64,
    pub tolerance: f64,
    pub pairs: Vec<PairedEigenvalue>,
    pub max_relative_diff: f64,
    pub unpaired_reference: Vec<f64>,
    pub unpaired_other: Vec<f64>,
    pub pairs_within_tolerance: bool,
    pub counts: Vec<CountSample>,
    /// Sample points where the two counting functions disagree.
    pub divergent_at: Vec<f64>,
    pub counts_agree: bool,
}

fn count_below(sorted: &[f64], x: f64) -> u64 {
    sorted.partition_point(|&v| v < x) as u64
}

/// Pairs eigenvalues by rank (with multiplicity) below the common cap and
/// compares `N(Λ)` at `samples` equally spaced points in `(0, cap]`.
pub fn compare_spectra(
    reference: &Spectrum,
    other: &Spectrum,
    tolerance: f64,
    samples: usize,
) -> Result<SpectrumComparison> {
    if reference.domain != other.domain || reference.bc != other.bc || reference.params != other.params {
        return Err(Error::Input("spectra describe different problems".into()));
    }
    if !(tolerance > 0.0) || samples == 0 {
        return Err(Error::Input("tolerance must be positive and samples nonzero".into()));
    }
    let cap = reference.lambda_max.min(other.lambda_max);
    let a: Vec<f64> = reference.expanded().into_iter().filter(|&v| v <= cap).collect();
    let b: Vec<f64> = other.expanded().into_iter().filter(|&v| v <= cap).collect();
    let m = a.len().min(b.len());
    let pairs: Vec<PairedEigenvalue> = (0..m)
        .map(|i| {
            let scale = a[i].abs().max(1e-12 * cap);
            let relative_diff = (b[i] - a[i]).abs() / scale;
            PairedEigenvalue {
                index: i,
                reference: a[i],
                other: b[i],
                relative_diff,
                within_tolerance: relative_diff <= tolerance,
            }
        })
        .collect();
    let max_relative_diff = pairs.iter().map(|p| p.relative_diff).fold(0.0, f64::max);
    let counts: Vec<CountSample> = (1..=samples)
        .map(|j| {
            let lambda = cap * j as f64 / samples as f64;
            let (na, nb) = (count_below(&a, lambda), count_below(&b, lambda));
            CountSample {
                lambda,
                n_reference: na,
                n_other: nb,
                diff: nb as i64 - na as i64,
            }
        })
        .collect();
    let divergent_at: Vec<f64> = counts.iter().filter(|c| c.diff != 0).map(|c| c.lambda).collect();
    Ok(SpectrumComparison {
        reference_method: reference.method,
        other_method: other.method,
        lambda_cap: cap,
        tolerance,
        pairs_within_tolerance: a.len() == b.len() && pairs.iter().all(|p| p.within_tolerance),
        max_relative_diff,
        unpaired_reference: a[m..].to_vec(),
        unpaired_other: b[m..].to_vec(),
        pairs,
        counts_agree: divergent_at.is_empty(),
        divergent_at,
        counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elastic::{BoundaryCondition, Domain, LameParams};
    use crate::spectrum::SpectrumEntry;

    fn spec(values: &[f64], method: SpectrumMethod, cap: f64) -> Spectrum {
        let entries = values
            .iter()
            .map(|&value| SpectrumEntry {
                value,
                multiplicity: 1,
                tag: "x".into(),
            })
            .collect();
        Spectrum::new(
            Domain::UnitDisk,
            BoundaryCondition::Dirichlet,
            LameParams::new(1.0, 1.0).unwrap(),
            cap,
            method,
            entries,
        )
        .unwrap()
    }

    #[test]
    fn identical_spectra_agree() {
        let s = spec(&[1.0, 2.0, 3.5], SpectrumMethod::Potential, 4.0);
        let c = compare_spectra(&s, &s, 1e-12, 16).unwrap();
        assert!(c.pairs_within_tolerance && c.counts_agree);
        assert_eq!(c.max_relative_diff, 0.0);
    }

    #[test]
    fn divergence_is_located() {
        let a = spec(&[1.0, 2.0, 3.0], SpectrumMethod::Potential, 4.0);
        let b = spec(&[1.0, 2.2, 3.0], SpectrumMethod::Fem, 4.0);
        let c = compare_spectra(&a, &b, 0.05, 4).unwrap();
        assert!(!c.pairs_within_tolerance);
        assert!((c.max_relative_diff - 0.1).abs() < 1e-12);
        assert!(c.counts_agree);
        let c = compare_spectra(&a, &b, 0.05, 40).unwrap();
        assert!(!c.divergent_at.is_empty());
        assert!(c.divergent_at.iter().all(|&x| x > 2.0 && x < 2.21));
    }

    #[test]
    fn unequal_caps_use_the_smaller() {
        let a = spec(&[1.0, 2.0, 3.0], SpectrumMethod::Potential, 4.0);
        let b = spec(&[1.0, 2.0], SpectrumMethod::Fem, 2.5);
        let c = compare_spectra(&a, &b, 1e-9, 5).unwrap();
        assert_eq!(c.lambda_cap, 2.5);
        assert!(c.unpaired_reference.is_empty() && c.pairs_within_tolerance);
    }
}
