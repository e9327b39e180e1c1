use nalgebra::DMatrix;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SavGolError {
    #[error("window must be odd and larger than the order (window {window}, order {order})")]
    BadWindow { window: usize, order: usize },
    #[error("series of length {len} is shorter than the window {window}")]
    TooShort { len: usize, window: usize },
}

/// Weight rows for a least-squares polynomial of degree `order` fitted on
/// `window` equally spaced points. Row `k` evaluates the fit at point `k`.
fn weights(window: usize, order: usize) -> Vec<Vec<f64>> {
    let half = (window / 2) as f64;
    let design = DMatrix::from_fn(window, order + 1, |i, j| (i as f64 - half).powi(j as i32));
    let pinv = design
        .clone()
        .pseudo_inverse(1e-12)
        .expect("Vandermonde on distinct points has full column rank");
    let eval = &design * pinv;
    (0..window)
        .map(|k| eval.row(k).iter().copied().collect())
        .collect()
}

/// Savitzky-Golay smoothing. Interior points use the centred window; the
/// first and last `window / 2` points are read off the polynomial fitted to
/// the first and last full window, so the output keeps the input length.
pub fn smooth_savgol(series: &[f64], window: usize, order: usize) -> Result<Vec<f64>, SavGolError> {
    if window.is_multiple_of(2) || order >= window {
        return Err(SavGolError::BadWindow { window, order });
    }
    let n = series.len();
    if n < window {
        return Err(SavGolError::TooShort { len: n, window });
    }
    let w = weights(window, order);
    let half = window / 2;
    let dot = |row: &[f64], start: usize| -> f64 {
        row.iter().zip(&series[start..start + window]).map(|(a, b)| a * b).sum()
    };
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let v = if i < half {
            dot(&w[i], 0)
        } else if i + half >= n {
            dot(&w[window - (n - i)], n - window)
        } else {
            dot(&w[half], i - half)
        };
        out.push(v);
    }
    Ok(out)
}
