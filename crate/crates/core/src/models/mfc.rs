use crate::error::{Error, Result};

/// Predicts the training majority class for every input.
#[derive(Clone, Debug, PartialEq)]
pub struct BaselineModel {
    pub majority: u8,
    /// fraction of positive training labels
    pub prior: f64,
}

/// Majority label of `y`; a tie goes to label 0.
pub fn train_mfc(y: &[u8]) -> Result<BaselineModel> {
    if y.is_empty() {
        return Err(Error::Data("cannot fit a baseline on zero labels".into()));
    }
    let pos = y.iter().filter(|&&l| l == 1).count();
    let neg = y.len() - pos;
    Ok(BaselineModel {
        majority: (pos > neg) as u8,
        prior: pos as f64 / y.len() as f64,
    })
}

impl BaselineModel {
    /// Constant score: 1 for a positive majority, else 0.
    pub fn score(&self) -> f64 {
        self.majority as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn majority_rules() {
        let mut y = vec![1u8; 1232];
        y.extend(vec![0u8; 739]);
        assert_eq!(train_mfc(&y).unwrap().majority, 1);
        assert_eq!(train_mfc(&[0, 0, 1]).unwrap().majority, 0);
        assert_eq!(train_mfc(&[1, 0]).unwrap().majority, 0);
        assert!(train_mfc(&[]).is_err());
    }
}
