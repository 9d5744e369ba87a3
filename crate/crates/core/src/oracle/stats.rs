use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::sampler::Histogram;

/// Minimum expected count for a bin to stand alone.
pub const MIN_EXPECTED: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareResult {
    pub chi2: f64,
    pub dof: usize,
    pub p_value: f64,
    /// ½ Σ |empirical − expected| over the pooled bins.
    pub tv: f64,
}

fn chi2_sf(chi2: f64, dof: usize) -> f64 {
    if dof == 0 {
        return 1.0;
    }
    ChiSquared::new(dof as f64).map(|d| d.sf(chi2)).unwrap_or(f64::NAN)
}

/// Goodness of fit of `hist` to `probs[v]` = P(value = v) on the histogram
/// range, with the remaining mass as the tail bin. Bins with expected count
/// below [`MIN_EXPECTED`] are pooled together with the tail; the statistic
/// and the total variation distance are both taken over the pooled bins.
pub fn chi_square_gof(hist: &Histogram, probs: &[f64]) -> ChiSquareResult {
    let n = hist.total() as f64;
    let len = hist.counts.len();
    let p: Vec<f64> = (0..len).map(|v| probs.get(v).copied().unwrap_or(0.0).max(0.0)).collect();
    let p_tail = (1.0 - p.iter().sum::<f64>()).max(0.0);
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let (mut pooled_obs, mut pooled_exp) = (hist.tail as f64, n * p_tail);
    for v in 0..len {
        let e = n * p[v];
        if e >= MIN_EXPECTED {
            bins.push((hist.counts[v] as f64, e));
        } else {
            pooled_obs += hist.counts[v] as f64;
            pooled_exp += e;
        }
    }
    if pooled_exp >= MIN_EXPECTED || bins.is_empty() {
        bins.push((pooled_obs, pooled_exp));
    } else if let Some(last) = bins.last_mut() {
        last.0 += pooled_obs;
        last.1 += pooled_exp;
    }
    let chi2: f64 = bins.iter().filter(|b| b.1 > 0.0).map(|(o, e)| (o - e).powi(2) / e).sum();
    let tv = 0.5 * bins.iter().map(|(o, e)| (o - e).abs()).sum::<f64>() / n;
    let dof = bins.len().saturating_sub(1);
    ChiSquareResult { chi2, dof, p_value: chi2_sf(chi2, dof), tv }
}

/// Two-sample chi-square homogeneity test between histograms of equal shape.
pub fn chi_square_homogeneity(a: &Histogram, b: &Histogram) -> ChiSquareResult {
    let (na, nb) = (a.total() as f64, b.total() as f64);
    let mut cells: Vec<(f64, f64)> = a.counts.iter().zip(&b.counts).map(|(&x, &y)| (x as f64, y as f64)).collect();
    cells.push((a.tail as f64, b.tail as f64));
    let tv = 0.5 * cells.iter().map(|(x, y)| (x / na - y / nb).abs()).sum::<f64>();
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let mut pooled = (0.0, 0.0);
    for (x, y) in cells {
        if x + y >= 2.0 * MIN_EXPECTED {
            bins.push((x, y));
        } else {
            pooled.0 += x;
            pooled.1 += y;
        }
    }
    if pooled.0 + pooled.1 > 0.0 {
        bins.push(pooled);
    }
    let total = na + nb;
    let mut chi2 = 0.0;
    for &(x, y) in &bins {
        let col = x + y;
        for (obs, row) in [(x, na), (y, nb)] {
            let e = row * col / total;
            if e > 0.0 {
                chi2 += (obs - e).powi(2) / e;
            }
        }
    }
    let dof = bins.len().saturating_sub(1);
    ChiSquareResult { chi2, dof, p_value: chi2_sf(chi2, dof), tv }
}

/// Kolmogorov survival function Q(λ) = 2 Σ (−1)^{k−1} e^{−2k²λ²}.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut s = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let t = (-2.0 * kf * kf * lambda * lambda).exp();
        s += if k % 2 == 1 { t } else { -t };
        if t < 1e-17 {
            break;
        }
    }
    (2.0 * s).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub d: f64,
    pub p_value: f64,
}

/// One-sample Kolmogorov–Smirnov test against a continuous CDF.
pub fn ks_one_sample(samples: &[f64], cdf: impl Fn(f64) -> f64) -> KsResult {
    let mut x = samples.to_vec();
    x.sort_by(f64::total_cmp);
    let n = x.len() as f64;
    let mut d = 0.0f64;
    for (i, &v) in x.iter().enumerate() {
        let f = cdf(v);
        d = d.max((f - i as f64 / n).abs()).max(((i + 1) as f64 / n - f).abs());
    }
    let sn = n.sqrt();
    KsResult { d, p_value: kolmogorov_sf((sn + 0.12 + 0.11 / sn) * d) }
}

/// Two-sample Kolmogorov–Smirnov test.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> KsResult {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (n, m) = (x.len(), y.len());
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < n && j < m {
        let v = x[i].min(y[j]);
        while i < n && x[i] <= v {
            i += 1;
        }
        while j < m && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let ne = (n * m) as f64 / (n + m) as f64;
    let sn = ne.sqrt();
    KsResult { d, p_value: kolmogorov_sf((sn + 0.12 + 0.11 / sn) * d) }
}
