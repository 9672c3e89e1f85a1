//! Uniformly sampled real time series.

use crate::error::SfwError;
use crate::Result;

/// A real series sampled every `dt` seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub dt: f64,
    pub samples: Vec<f64>,
}

impl TimeSeries {
    pub fn new(dt: f64, samples: Vec<f64>) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(SfwError::InvalidArgument(format!(
                "sample period must be positive, got {dt}"
            )));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(SfwError::InvalidArgument(
                "time series contains non-finite samples".into(),
            ));
        }
        Ok(Self { dt, samples })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn sample_rate(&self) -> f64 {
        1.0 / self.dt
    }

    pub fn duration(&self) -> f64 {
        self.dt * self.samples.len() as f64
    }

    pub fn mean(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }

    /// Population variance around the mean.
    pub fn variance(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        let m = self.mean();
        self.samples.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / self.samples.len() as f64
    }

    /// Elementwise difference (`self - other`); requires matching rates and
    /// lengths.
    pub fn sub(&self, other: &TimeSeries) -> Result<TimeSeries> {
        if (self.dt - other.dt).abs() > 1e-12 * self.dt {
            return Err(SfwError::RateMismatch {
                expected: self.dt,
                actual: other.dt,
            });
        }
        if self.len() != other.len() {
            return Err(SfwError::SeriesMismatch(format!(
                "lengths {} vs {}",
                self.len(),
                other.len()
            )));
        }
        TimeSeries::new(
            self.dt,
            self.samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn basic_stats() {
        let ts = TimeSeries::new(0.5, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(ts.len(), 4);
        assert_relative_eq!(ts.duration(), 2.0);
        assert_relative_eq!(ts.mean(), 2.5);
        assert_relative_eq!(ts.variance(), 1.25);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(TimeSeries::new(0.0, vec![1.0]).is_err());
        assert!(TimeSeries::new(1.0, vec![f64::NAN]).is_err());
    }

    #[test]
    fn sub_checks_rates() {
        let a = TimeSeries::new(1.0, vec![1.0, 2.0]).unwrap();
        let b = TimeSeries::new(0.5, vec![1.0, 2.0]).unwrap();
        assert!(matches!(a.sub(&b), Err(SfwError::RateMismatch { .. })));
    }
}
