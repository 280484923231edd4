//! Small numerical helpers with order-independent rounding behaviour.

/// Neumaier-compensated sum.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut carry = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    sum + carry
}

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    compensated_sum(values.iter().copied()) / values.len() as f64
}

/// Variance with divisor `n`.
pub fn population_variance(values: &[f64]) -> f64 {
    let m = mean(values);
    compensated_sum(values.iter().map(|v| (v - m) * (v - m))) / values.len() as f64
}

/// Variance with divisor `n - 1`.
pub fn sample_variance(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return f64::NAN;
    }
    let m = mean(values);
    compensated_sum(values.iter().map(|v| (v - m) * (v - m))) / (values.len() - 1) as f64
}

/// Delete-a-block jackknife standard error of `statistic` over `blocks`
/// contiguous blocks of `values`.
pub fn jackknife_se(values: &[f64], blocks: usize, statistic: impl Fn(&[f64]) -> f64) -> f64 {
    let blocks = blocks.min(values.len());
    if blocks < 2 {
        return f64::NAN;
    }
    let bounds: Vec<usize> = (0..=blocks).map(|b| b * values.len() / blocks).collect();
    let estimates: Vec<f64> = (0..blocks)
        .map(|b| {
            let rest: Vec<f64> = values[..bounds[b]]
                .iter()
                .chain(&values[bounds[b + 1]..])
                .copied()
                .collect();
            statistic(&rest)
        })
        .collect();
    let g = blocks as f64;
    ((g - 1.0) / g * population_variance(&estimates) * g).sqrt()
}
