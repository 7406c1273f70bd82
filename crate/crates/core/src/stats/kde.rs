use serde::{Deserialize, Serialize};

use super::ttest::mean_var;
use super::StatsError;

pub const DEFAULT_GRID_SIZE: usize = 512;

/// Gaussian kernel density evaluated on an even grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KdeSeries {
    pub grid: Vec<f64>,
    pub density: Vec<f64>,
    pub bandwidth: f64,
}

impl KdeSeries {
    /// Trapezoidal integral of the density over the grid.
    pub fn integral(&self) -> f64 {
        self.grid
            .windows(2)
            .zip(self.density.windows(2))
            .map(|(x, y)| (x[1] - x[0]) * (y[0] + y[1]) / 2.0)
            .sum()
    }
}

/// Linear-interpolation quantile of sorted data (the common "type 7").
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Silverman's rule: `0.9 · min(σ, IQR/1.34) · n^(−1/5)`. When the minimum is
/// zero the other spread measure is used, then `|x₀|`, then 1.
pub fn silverman_bandwidth(values: &[f64]) -> Result<f64, StatsError> {
    if values.len() < 2 {
        return Err(StatsError::TooFewValues { needed: 2, got: values.len() });
    }
    let (_, var) = mean_var(values);
    let sd = var.sqrt();
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let iqr = quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25);
    let mut spread = sd.min(iqr / 1.34);
    if spread <= 0.0 {
        spread = sd.max(iqr / 1.34);
    }
    if spread <= 0.0 {
        spread = values[0].abs();
    }
    if spread <= 0.0 {
        spread = 1.0;
    }
    Ok(0.9 * spread * (values.len() as f64).powf(-0.2))
}

/// Density on `grid_size` evenly spaced points spanning `[min − 4h, max + 4h]`.
pub fn kde(values: &[f64], bandwidth: Option<f64>, grid_size: usize) -> Result<KdeSeries, StatsError> {
    if values.len() < 2 {
        return Err(StatsError::TooFewValues { needed: 2, got: values.len() });
    }
    if grid_size < 2 {
        return Err(StatsError::Domain(format!("grid size must be at least 2, got {grid_size}")));
    }
    let h = match bandwidth {
        Some(h) if h > 0.0 && h.is_finite() => h,
        Some(h) => return Err(StatsError::Domain(format!("bandwidth must be positive, got {h}"))),
        None => silverman_bandwidth(values)?,
    };
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = (min - 4.0 * h, max + 4.0 * h);
    let step = (hi - lo) / (grid_size - 1) as f64;
    let grid: Vec<f64> = (0..grid_size).map(|i| if i + 1 == grid_size { hi } else { lo + step * i as f64 }).collect();
    let norm = 1.0 / (values.len() as f64 * h * (2.0 * std::f64::consts::PI).sqrt());
    let density = grid
        .iter()
        .map(|&x| {
            let s: f64 = values.iter().map(|&v| {
                let u = (x - v) / h;
                (-0.5 * u * u).exp()
            }).sum();
            s * norm
        })
        .collect();
    Ok(KdeSeries { grid, density, bandwidth: h })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_pair() {
        let s = kde(&[-1.0, 1.0], None, 101).unwrap();
        for i in 0..s.grid.len() {
            let j = s.grid.len() - 1 - i;
            assert!((s.grid[i] + s.grid[j]).abs() < 1e-12);
            assert!((s.density[i] - s.density[j]).abs() < 1e-12);
        }
        assert!((s.integral() - 1.0).abs() < 0.01);
    }

    #[test]
    fn bandwidth_fallbacks() {
        // IQR = 0 but σ > 0: falls back to σ.
        let v = [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 10.0];
        let (_, var) = mean_var(&v);
        let want = 0.9 * var.sqrt() * 7f64.powf(-0.2);
        assert!((silverman_bandwidth(&v).unwrap() - want).abs() < 1e-12);
        // Constant data: falls back to |x0|, then 1.
        assert!((silverman_bandwidth(&[5.0, 5.0]).unwrap() - 0.9 * 5.0 * 2f64.powf(-0.2)).abs() < 1e-12);
        assert!((silverman_bandwidth(&[0.0, 0.0]).unwrap() - 0.9 * 2f64.powf(-0.2)).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        assert!(kde(&[1.0], None, 10).is_err());
        assert!(kde(&[1.0, 2.0], Some(0.0), 10).is_err());
        assert!(kde(&[1.0, 2.0], None, 1).is_err());
    }

    #[test]
    fn explicit_bandwidth_grid_bounds() {
        let s = kde(&[0.0, 2.0, 3.0], Some(0.5), 9).unwrap();
        assert_eq!(s.grid[0], -2.0);
        assert_eq!(s.grid[8], 5.0);
        assert_eq!(s.bandwidth, 0.5);
        assert!(s.density.iter().all(|d| *d >= 0.0));
    }
}
