//! Numerov propagation of `y'' = f(t) y` on a uniform grid in `t = ln ρ`.
//!
//! With `t = ln ρ` the radial equation for `R(ρ)` loses its first-derivative
//! term, `d²R/dt² = [m² + ρ²(W(ρ) − α)/λ_e²] R`, so Numerov applies directly
//! on a geometric ρ-grid.

const RESCALE_ABOVE: f64 = 1e150;

/// Numerov recurrence in summed form. With `w = (1 − h²f/12) y` the scheme
/// reads `Δw_i = Δw_{i−1} + h² f_i y_i`; carrying the difference `Δw`
/// separately keeps the slope information when `y` is nearly constant,
/// which the three-term form loses to cancellation over many steps.
struct Summed {
    h2: f64,
    w: f64,
    dw: f64,
}

impl Summed {
    fn new(h: f64, f0: f64, f1: f64, y0: f64, y1: f64) -> Self {
        let h2 = h * h;
        let w0 = (1.0 - h2 * f0 / 12.0) * y0;
        let w1 = (1.0 - h2 * f1 / 12.0) * y1;
        Self { h2, w: w1, dw: w1 - w0 }
    }

    /// Advances one step given `y` and `f` at the current point and `f` at
    /// the next; returns `y` at the next point.
    #[inline]
    fn advance(&mut self, f_cur: f64, y_cur: f64, f_next: f64) -> f64 {
        self.dw += self.h2 * f_cur * y_cur;
        self.w += self.dw;
        self.w / (1.0 - self.h2 * f_next / 12.0)
    }

    fn rescale(&mut self, by: f64) {
        self.w /= by;
        self.dw /= by;
    }
}

/// Outward sweep over the whole grid that only tracks sign changes.
/// The returned count equals the number of eigenvalues below α of the
/// problem with a node at the last grid point.
pub(crate) fn count_sign_changes_outward(f: &[f64], h: f64, y0: f64, y1: f64) -> u32 {
    let mut state = Summed::new(h, f[0], f[1], y0, y1);
    let (mut y_prev, mut y_cur) = (y0, y1);
    let mut nodes = u32::from(y0 * y1 < 0.0);
    for i in 1..f.len() - 1 {
        let mut y_next = state.advance(f[i], y_cur, f[i + 1]);
        if y_next.abs() > RESCALE_ABOVE {
            state.rescale(RESCALE_ABOVE);
            y_next /= RESCALE_ABOVE;
            y_cur /= RESCALE_ABOVE;
        }
        if y_next * y_cur < 0.0 || (y_cur == 0.0 && y_next * y_prev < 0.0) {
            nodes += 1;
        }
        y_prev = y_cur;
        y_cur = y_next;
    }
    nodes
}

/// Outward solution on indices `0..=last`.
pub(crate) fn outward(f: &[f64], h: f64, y0: f64, y1: f64, last: usize) -> Vec<f64> {
    let mut state = Summed::new(h, f[0], f[1], y0, y1);
    let mut y = Vec::with_capacity(last + 1);
    y.push(y0);
    y.push(y1);
    for i in 1..last {
        let next = state.advance(f[i], y[i], f[i + 1]);
        y.push(next);
        if next.abs() > RESCALE_ABOVE {
            state.rescale(RESCALE_ABOVE);
            y.iter_mut().for_each(|v| *v /= RESCALE_ABOVE);
        }
    }
    y
}

/// Inward solution on indices `first..len`, seeded at the two outermost
/// points. Returned vector is indexed from `first`.
pub(crate) fn inward(f: &[f64], h: f64, y_last: f64, y_second_last: f64, first: usize) -> Vec<f64> {
    let n = f.len();
    let mut state = Summed::new(h, f[n - 1], f[n - 2], y_last, y_second_last);
    let mut rev = Vec::with_capacity(n - first);
    rev.push(y_last);
    rev.push(y_second_last);
    // rev[k] holds y at index n-1-k.
    for k in 1..(n - 1 - first) {
        let i = n - 1 - k;
        let next = state.advance(f[i], rev[k], f[i - 1]);
        rev.push(next);
        if next.abs() > RESCALE_ABOVE {
            state.rescale(RESCALE_ABOVE);
            rev.iter_mut().for_each(|v| *v /= RESCALE_ABOVE);
        }
    }
    rev.reverse();
    rev
}

/// Strict sign changes of a sampled function, ignoring samples whose
/// magnitude is below `1e-10 · max|u|`.
pub fn count_nodes(u: &[f64]) -> u32 {
    let peak = u.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    if peak == 0.0 {
        return 0;
    }
    let floor = 1e-10 * peak;
    let mut last_sign = 0.0_f64;
    let mut nodes = 0;
    for &v in u {
        if v.abs() < floor {
            continue;
        }
        let s = v.signum();
        if last_sign != 0.0 && s != last_sign {
            nodes += 1;
        }
        last_sign = s;
    }
    nodes
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn nodes_of_simple_profiles() {
        let x: Vec<f64> = (0..2000).map(|i| i as f64 * 0.005).collect();
        let gauss: Vec<f64> = x.iter().map(|v| (-(v - 3.0) * (v - 3.0)).exp()).collect();
        assert_eq!(count_nodes(&gauss), 0);
        let one: Vec<f64> = x.iter().map(|v| (v - 3.0) * (-(v - 3.0) * (v - 3.0)).exp()).collect();
        assert_eq!(count_nodes(&one), 1);
        assert_eq!(count_nodes(&[0.0; 10]), 0);
    }

    #[test]
    fn ignores_round_off_wiggles() {
        let mut u: Vec<f64> = (0..100).map(|i| (-(i as f64) * 0.1).exp()).collect();
        u.extend([1e-14, -1e-14, 1e-14, -1e-14]);
        assert_eq!(count_nodes(&u), 0);
    }

    #[test]
    fn numerov_reproduces_exponential() {
        // y'' = y, y = e^t.
        let h = 1e-3;
        let n = 2001;
        let f = vec![1.0; n];
        let y = outward(&f, h, 1.0, h.exp(), n - 1);
        assert_relative_eq!(y[n - 1], (h * (n - 1) as f64).exp(), max_relative = 1e-9);
        let back = inward(&f, h, 1.0, h.exp(), 0);
        assert_relative_eq!(back[0], (h * (n - 1) as f64).exp(), max_relative = 1e-9);
    }

    #[test]
    fn oscillator_sign_changes() {
        // y'' = −k² y on [0, L] has floor(kL/π) interior sign changes for y = sin(kt).
        let h = 1e-3;
        let n = 10_001;
        let k = 7.3;
        let f = vec![-k * k; n];
        let nodes = count_sign_changes_outward(&f, h, 0.0, (k * h).sin());
        assert_eq!(nodes, ((k * h * (n - 1) as f64) / std::f64::consts::PI).floor() as u32);
    }
}
