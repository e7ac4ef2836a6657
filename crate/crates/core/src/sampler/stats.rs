/// Integrated autocorrelation time `1 + 2 sum rho(k)` with Sokal's automatic
/// window (stop at the first lag `W >= 5 tau(W)`). Returns 1 for constant or
/// very short traces.
pub fn integrated_autocorrelation_time(trace: &[f64]) -> f64 {
    let n = trace.len();
    if n < 4 {
        return 1.0;
    }
    let mean = trace.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = trace.iter().map(|x| x - mean).collect();
    let var = centered.iter().map(|x| x * x).sum::<f64>() / n as f64;
    if var <= 0.0 {
        return 1.0;
    }
    let max_lag = (n / 2).min(100_000);
    let mut tau = 1.0;
    for lag in 1..max_lag {
        let c: f64 = centered[..n - lag]
            .iter()
            .zip(&centered[lag..])
            .map(|(a, b)| a * b)
            .sum::<f64>()
            / n as f64;
        tau += 2.0 * c / var;
        if lag as f64 >= 5.0 * tau {
            break;
        }
    }
    tau.max(1.0)
}

/// Sample mean and its standard error.
pub fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
