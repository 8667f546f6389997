use crate::error::{Error, Result};

/// One bandit arm: an early-exit confidence threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdArm {
    pub index: usize,
    pub theta: f64,
}

/// An ordered set of threshold arms, strictly increasing in theta.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmSet {
    arms: Vec<ThresholdArm>,
}

impl ArmSet {
    pub fn new(thresholds: &[f64]) -> Result<Self> {
        if thresholds.is_empty() {
            return Err(Error::Config(
                "arm set must contain at least one threshold".into(),
            ));
        }
        for (i, &theta) in thresholds.iter().enumerate() {
            if !(0.0..=1.0).contains(&theta) {
                return Err(Error::Config(format!(
                    "threshold {theta} at position {i} is outside [0, 1]"
                )));
            }
            if i > 0 && theta <= thresholds[i - 1] {
                return Err(Error::Config(format!(
                    "thresholds must be strictly increasing ({} then {theta})",
                    thresholds[i - 1]
                )));
            }
        }
        let arms = thresholds
            .iter()
            .enumerate()
            .map(|(index, &theta)| ThresholdArm { index, theta })
            .collect();
        Ok(Self { arms })
    }

    pub fn len(&self) -> usize {
        self.arms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arms.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<&ThresholdArm> {
        self.arms.get(index)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ThresholdArm> {
        self.arms.iter()
    }

    pub fn thetas(&self) -> Vec<f64> {
        self.arms.iter().map(|a| a.theta).collect()
    }
}

impl<'a> IntoIterator for &'a ArmSet {
    type Item = &'a ThresholdArm;
    type IntoIter = std::slice::Iter<'a, ThresholdArm>;

    fn into_iter(self) -> Self::IntoIter {
        self.arms.iter()
    }
}
