use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

/// Two-tailed p-value of a t statistic with `df` degrees of freedom.
pub fn t_two_tailed(t: f64, df: f64) -> Result<f64> {
    if df <= 0.0 {
        return Err(Error::Undefined(format!("t-test with {df} degrees of freedom")));
    }
    if t.is_infinite() {
        return Ok(0.0);
    }
    let dist = StudentsT::new(0.0, 1.0, df).map_err(|e| Error::Undefined(e.to_string()))?;
    Ok((2.0 * dist.cdf(-t.abs())).clamp(0.0, 1.0))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairedTest {
    pub mean_diff: f64,
    pub t: f64,
    pub df: usize,
    pub p: f64,
}

/// Paired t-test on per-fold scores `a` and `b` (mean of a − b).
pub fn paired_t_test(a: &[f64], b: &[f64]) -> Result<PairedTest> {
    if a.len() != b.len() {
        return Err(Error::Contract("paired samples differ in length".into()));
    }
    let n = a.len();
    if n < 2 {
        return Err(Error::Undefined("paired t-test needs at least 2 pairs".into()));
    }
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let mean = d.iter().sum::<f64>() / n as f64;
    let var = d.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    if var == 0.0 {
        return Err(Error::Undefined("paired differences have zero variance".into()));
    }
    let t = mean / (var / n as f64).sqrt();
    Ok(PairedTest {
        mean_diff: mean,
        t,
        df: n - 1,
        p: t_two_tailed(t, (n - 1) as f64)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_quantiles() {
        // t_{0.975, 9} = 2.262157
        assert!((t_two_tailed(2.262157, 9.0).unwrap() - 0.05).abs() < 1e-6);
        assert!((t_two_tailed(0.0, 5.0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn paired() {
        let a = [0.8, 0.82, 0.79, 0.85];
        let b = [0.78, 0.8, 0.78, 0.81];
        let r = paired_t_test(&a, &b).unwrap();
        assert!(r.mean_diff > 0.0 && r.p < 0.2);
        assert!(paired_t_test(&a, &a).is_err());
    }
}
