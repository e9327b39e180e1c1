//! Small numeric helpers shared by the profiler, the demand generator and the
//! fitness terms.

/// Quantile by linear interpolation between order statistics (the "type 7"
/// definition: position `p·(n−1)` in the sorted sample).
///
/// `sorted` must be non-empty and ascending.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty sample");
    let pos = p.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

pub fn sorted_copy(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Convenience wrapper that sorts first.
pub fn quantile(values: &[f64], p: f64) -> f64 {
    quantile_sorted(&sorted_copy(values), p)
}

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample standard deviation (n − 1 denominator); 0 for a single value.
pub fn sample_std(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let m = mean(values);
    let ss: f64 = values.iter().map(|v| (v - m) * (v - m)).sum();
    (ss / (n - 1) as f64).sqrt()
}

/// Pearson correlation. Returns 0 when either side has zero variance.
pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let ma = mean(a);
    let mb = mean(b);
    let mut sab = 0.0;
    let mut saa = 0.0;
    let mut sbb = 0.0;
    for (x, y) in a.iter().zip(b) {
        let dx = x - ma;
        let dy = y - mb;
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa <= 0.0 || sbb <= 0.0 {
        return 0.0;
    }
    sab / (saa * sbb).sqrt()
}

/// Sample autocorrelation at `lag` with the usual biased estimator
/// (lagged cross-products divided by the full-length sum of squares).
pub fn autocorrelation(series: &[f64], lag: usize) -> f64 {
    let n = series.len();
    if lag >= n {
        return 0.0;
    }
    let m = mean(series);
    let denom: f64 = series.iter().map(|v| (v - m) * (v - m)).sum();
    if denom <= 0.0 {
        return 0.0;
    }
    let num: f64 = (0..n - lag)
        .map(|t| (series[t] - m) * (series[t + lag] - m))
        .sum();
    num / denom
}

/// Rescale to span exactly [0, 1]. A constant series maps to 0.5 everywhere.
pub fn min_max_normalize(series: &mut [f64]) {
    let (lo, hi) = series
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    if series.is_empty() {
        return;
    }
    let span = hi - lo;
    if span <= 0.0 || !span.is_finite() {
        series.iter_mut().for_each(|v| *v = 0.5);
        return;
    }
    for v in series.iter_mut() {
        *v = ((*v - lo) / span).clamp(0.0, 1.0);
    }
    // Pin the extremes: (hi - lo) / span can round below 1.
    if let Some(max) = series.iter_mut().max_by(|a, b| a.total_cmp(b)) {
        *max = 1.0;
    }
    if let Some(min) = series.iter_mut().min_by(|a, b| a.total_cmp(b)) {
        *min = 0.0;
    }
}

/// Mean of the off-diagonal entries of a square matrix given as rows.
pub fn off_diagonal_mean(matrix: &[Vec<f64>]) -> f64 {
    let n = matrix.len();
    if n < 2 {
        return f64::NAN;
    }
    let mut total = 0.0;
    for (i, row) in matrix.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if i != j {
                total += v;
            }
        }
    }
    total / (n * (n - 1)) as f64
}

/// Pairwise Pearson correlation matrix of the given series.
pub fn correlation_matrix(series: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = series.len();
    let mut out = vec![vec![1.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let r = pearson(&series[i], &series[j]);
            out[i][j] = r;
            out[j][i] = r;
        }
    }
    out
}
