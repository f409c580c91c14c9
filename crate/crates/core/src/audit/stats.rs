use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CiMethod {
    /// `p +/- z * sqrt(p (1 - p) / n)`, clamped to `[0, 1]`.
    #[default]
    Normal,
    Wilson,
}

/// Two-sided standard-normal quantile for `level`, tabulated to six
/// decimals (1.959964 at 0.95).
pub fn z_for_level(level: f64) -> Result<f64> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "confidence level {level} must be in (0, 1)"
        )));
    }
    let z = Normal::standard().inverse_cdf(0.5 + level / 2.0);
    Ok((z * 1e6).round() / 1e6)
}

pub fn confidence_interval(p_hat: f64, n: usize, level: f64, method: CiMethod) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::InvalidParameter("confidence interval needs n >= 1".into()));
    }
    if !(0.0..=1.0).contains(&p_hat) {
        return Err(Error::InvalidParameter(format!("proportion {p_hat} outside [0, 1]")));
    }
    let z = z_for_level(level)?;
    let n = n as f64;
    let (lo, hi) = match method {
        CiMethod::Normal => {
            let hw = z * (p_hat * (1.0 - p_hat) / n).sqrt();
            (p_hat - hw, p_hat + hw)
        }
        CiMethod::Wilson => {
            let z2 = z * z;
            let denom = 1.0 + z2 / n;
            let center = (p_hat + z2 / (2.0 * n)) / denom;
            let hw = z * (p_hat * (1.0 - p_hat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
            (center - hw, center + hw)
        }
    };
    Ok((lo.max(0.0), hi.min(1.0)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParityVerdict {
    /// `min(p, 1 - p) / max(p, 1 - p)`; 1 is parity.
    pub parity_ratio: f64,
    /// Ratio at or below `1 - epsilon`, in either direction.
    pub disparate_impact: bool,
}

/// Demographic-parity check for a pairwise design where group A is favoured
/// with probability `p` and group B with `1 - p`. Taking the smaller rate
/// over the larger covers both orderings of the pair.
pub fn demographic_parity_verdict(p_favored: f64, epsilon: f64) -> Result<ParityVerdict> {
    if !(0.0..=1.0).contains(&p_favored) {
        return Err(Error::InvalidParameter(format!("proportion {p_favored} outside [0, 1]")));
    }
    if !(0.0..1.0).contains(&epsilon) {
        return Err(Error::InvalidParameter(format!("epsilon {epsilon} outside [0, 1)")));
    }
    let (lo, hi) = if p_favored <= 0.5 {
        (p_favored, 1.0 - p_favored)
    } else {
        (1.0 - p_favored, p_favored)
    };
    let parity_ratio = lo / hi;
    Ok(ParityVerdict {
        parity_ratio,
        disparate_impact: parity_ratio <= 1.0 - epsilon,
    })
}

/// Empirical CDF over a finite sample.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ecdf {
    sorted: Vec<f64>,
}

impl Ecdf {
    /// NaNs are dropped.
    pub fn new(values: &[f64]) -> Self {
        let mut sorted: Vec<f64> = values.iter().copied().filter(|v| !v.is_nan()).collect();
        sorted.sort_by(f64::total_cmp);
        Ecdf { sorted }
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    /// Fraction of the sample `<= x`.
    pub fn eval(&self, x: f64) -> f64 {
        if self.sorted.is_empty() {
            return 0.0;
        }
        self.sorted.partition_point(|&v| v <= x) as f64 / self.sorted.len() as f64
    }

    /// One `(value, F(value))` pair per distinct value, ascending.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let n = self.sorted.len() as f64;
        let mut out: Vec<(f64, f64)> = Vec::new();
        for (k, &v) in self.sorted.iter().enumerate() {
            let f = (k + 1) as f64 / n;
            match out.last_mut() {
                Some(last) if last.0 == v => last.1 = f,
                _ => out.push((v, f)),
            }
        }
        out
    }

    /// `value,ecdf` rows, one per distinct value, with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("value,ecdf\n");
        for (v, f) in self.points() {
            out.push_str(&format!("{v},{f}\n"));
        }
        out
    }

    /// Largest vertical gap between two ECDFs (two-sample KS statistic).
    pub fn max_gap(&self, other: &Ecdf) -> f64 {
        let (a, b) = (&self.sorted, &other.sorted);
        if a.is_empty() || b.is_empty() {
            return if a.is_empty() && b.is_empty() { 0.0 } else { 1.0 };
        }
        let (mut i, mut j) = (0, 0);
        let mut gap: f64 = 0.0;
        while i < a.len() && j < b.len() {
            let x = if a[i] <= b[j] { a[i] } else { b[j] };
            while i < a.len() && a[i] <= x {
                i += 1;
            }
            while j < b.len() && b[j] <= x {
                j += 1;
            }
            gap = gap.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
        }
        gap
    }
}
