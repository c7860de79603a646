/// Sample mean and standard error (sample standard deviation over √n).
///
/// Returns `(mean, std_error)`; the standard error is 0 for fewer than two
/// samples.
pub fn mean_se(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, 0.0);
    }
    // shifting by the first value keeps constant samples exact
    let base = values[0];
    let mean = base + values.iter().map(|v| v - base).sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Standard error of a Bernoulli frequency.
pub fn binomial_se(freq: f64, n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        (freq * (1.0 - freq) / n as f64).sqrt()
    }
}
