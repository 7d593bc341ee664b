//! Fitting the low-dimensional similarity curve `1 / (1 + a d^(2b))`.

/// Curve parameters for `min_dist = 0.1`, `spread = 1`.
pub const DEFAULT_A: f64 = 1.577;
pub const DEFAULT_B: f64 = 0.895;

const SAMPLES: usize = 300;

/// Least-squares fit of `(a, b)` so that `1 / (1 + a x^(2b))` approximates
/// `1` for `x < min_dist` and `exp(-(x - min_dist) / spread)` beyond, over
/// `x` in `(0, 3 * spread]`. Uses Levenberg-Marquardt from `(1, 1)`.
pub fn fit_ab(min_dist: f64, spread: f64) -> (f64, f64) {
    let xs: Vec<f64> = (1..=SAMPLES).map(|i| 3.0 * spread * i as f64 / SAMPLES as f64).collect();
    let ys: Vec<f64> =
        xs.iter().map(|&x| if x < min_dist { 1.0 } else { (-(x - min_dist) / spread).exp() }).collect();
    let residuals = |a: f64, b: f64| -> f64 {
        xs.iter().zip(&ys).map(|(&x, &y)| (1.0 / (1.0 + a * x.powf(2.0 * b)) - y).powi(2)).sum()
    };
    let (mut a, mut b) = (1.0f64, 1.0f64);
    let mut lambda = 1e-3;
    let mut cost = residuals(a, b);
    for _ in 0..500 {
        // Jacobian of the model with respect to (a, b)
        let (mut jtj, mut jtr) = ([[0.0f64; 2]; 2], [0.0f64; 2]);
        for (&x, &y) in xs.iter().zip(&ys) {
            let p = x.powf(2.0 * b);
            let denom = 1.0 + a * p;
            let f = 1.0 / denom;
            let da = -p / (denom * denom);
            let db = -a * p * 2.0 * x.ln() / (denom * denom);
            let r = f - y;
            jtj[0][0] += da * da;
            jtj[0][1] += da * db;
            jtj[1][1] += db * db;
            jtr[0] += da * r;
            jtr[1] += db * r;
        }
        jtj[1][0] = jtj[0][1];
        let m00 = jtj[0][0] * (1.0 + lambda);
        let m11 = jtj[1][1] * (1.0 + lambda);
        let det = m00 * m11 - jtj[0][1] * jtj[1][0];
        if det.abs() < 1e-300 {
            break;
        }
        let step_a = -(m11 * jtr[0] - jtj[0][1] * jtr[1]) / det;
        let step_b = -(m00 * jtr[1] - jtj[1][0] * jtr[0]) / det;
        let (na, nb) = (a + step_a, b + step_b);
        if na > 0.0 && nb > 0.0 {
            let new_cost = residuals(na, nb);
            if new_cost < cost {
                let done = (cost - new_cost) < 1e-15 * cost.max(1e-300);
                a = na;
                b = nb;
                cost = new_cost;
                lambda = (lambda / 10.0).max(1e-12);
                if done {
                    break;
                }
                continue;
            }
        }
        lambda *= 10.0;
        if lambda > 1e12 {
            break;
        }
    }
    (a, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_min_dist_reproduces_reference_curve() {
        let (a, b) = fit_ab(0.1, 1.0);
        assert!((a - DEFAULT_A).abs() < 2e-3, "a = {a}");
        assert!((b - DEFAULT_B).abs() < 2e-3, "b = {b}");
    }

    #[test]
    fn larger_min_dist_flattens_the_curve() {
        let (a1, _) = fit_ab(0.1, 1.0);
        let (a2, _) = fit_ab(0.5, 1.0);
        assert!(a2 < a1);
    }
}
