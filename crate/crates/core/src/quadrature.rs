//! Composite quadrature on sampled data.

/// Composite Simpson rule for samples at uniform spacing `h`. An even number
/// of samples is handled by closing the last interval with the 3/8 rule.
pub fn simpson_uniform(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    match n {
        0 | 1 => 0.0,
        2 => 0.5 * h * (values[0] + values[1]),
        3 => h / 3.0 * (values[0] + 4.0 * values[1] + values[2]),
        _ => {
            let (simpson_end, tail) = if n % 2 == 1 { (n, 0.0) } else { (n - 3, three_eighths(&values[n - 4..], h)) };
            let mut sum = values[0] + values[simpson_end - 1];
            for (i, v) in values.iter().enumerate().take(simpson_end - 1).skip(1) {
                sum += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
            }
            sum * h / 3.0 + tail
        }
    }
}

fn three_eighths(v: &[f64], h: f64) -> f64 {
    3.0 * h / 8.0 * (v[0] + 3.0 * v[1] + 3.0 * v[2] + v[3])
}

/// Trapezoid rule on arbitrary abscissae.
pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len(), "abscissae and ordinates differ in length");
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xs, ys)| 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1]))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn simpson_is_exact_for_cubics() {
        for n in [5usize, 6, 11, 12] {
            let h = 2.0 / (n - 1) as f64;
            let v: Vec<f64> = (0..n).map(|i| (i as f64 * h).powi(3) - i as f64 * h).collect();
            assert_relative_eq!(simpson_uniform(&v, h), 4.0 - 2.0, max_relative = 1e-13);
        }
    }

    #[test]
    fn trapezoid_linear() {
        let x = [0.0, 0.5, 2.0];
        let y = [1.0, 2.0, 5.0];
        assert_relative_eq!(trapezoid(&x, &y), 6.0);
    }
}
