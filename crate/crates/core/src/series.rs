use crate::{Error, Result};

/// Ordered observations `y_0, y_1, ..., y_T`, optionally labelled.
///
/// The first observation plays the role of the initial value: GLS demeaning
/// subtracts it and the sample size `T` counts the remaining observations.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
    labels: Option<Vec<String>>,
}

impl TimeSeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        if values.len() < 2 {
            return Err(Error::TooShort { needed: 2, got: values.len() });
        }
        Ok(Self { values, labels: None })
    }

    pub fn with_labels(values: Vec<f64>, labels: Vec<String>) -> Result<Self> {
        if labels.len() != values.len() {
            return Err(Error::InvalidSpec(format!(
                "{} labels for {} observations",
                labels.len(),
                values.len()
            )));
        }
        let mut series = Self::new(values)?;
        series.labels = Some(labels);
        Ok(series)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Label of observation `index`, falling back to the index itself.
    pub fn label(&self, index: usize) -> String {
        match &self.labels {
            Some(labels) => labels[index].clone(),
            None => index.to_string(),
        }
    }

    /// Number of observations including the initial value.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Effective sample size `T` (observations after the initial value).
    pub fn sample_size(&self) -> usize {
        self.values.len() - 1
    }

    pub fn initial(&self) -> f64 {
        self.values[0]
    }

    /// `y_t - y_0` for `t = 0..=T`.
    pub fn gls_demeaned(&self) -> Vec<f64> {
        let y0 = self.values[0];
        self.values.iter().map(|v| v - y0).collect()
    }

    /// First differences `Δy_t` for `t = 1..=T`.
    pub fn differences(&self) -> Vec<f64> {
        self.values.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * factor).collect(),
            labels: self.labels.clone(),
        }
    }

    pub fn ln(&self) -> Result<Self> {
        if let Some(i) = self.values.iter().position(|v| *v <= 0.0) {
            return Err(Error::InvalidSpec(format!(
                "log transform needs positive values; observation {i} is {}",
                self.values[i]
            )));
        }
        Ok(Self {
            values: self.values.iter().map(|v| v.ln()).collect(),
            labels: self.labels.clone(),
        })
    }

    pub(crate) fn require_sample_size(&self, needed: usize) -> Result<()> {
        if self.sample_size() < needed {
            return Err(Error::TooShort { needed: needed + 1, got: self.len() });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite() {
        assert!(matches!(TimeSeries::new(vec![1.0, f64::NAN]), Err(Error::NonFinite(1))));
    }

    #[test]
    fn demeaning_and_differences() {
        let s = TimeSeries::new(vec![2.0, 3.0, 5.0]).unwrap();
        assert_eq!(s.gls_demeaned(), vec![0.0, 1.0, 3.0]);
        assert_eq!(s.differences(), vec![1.0, 2.0]);
        assert_eq!(s.sample_size(), 2);
        assert_eq!(s.label(1), "1");
    }
}
