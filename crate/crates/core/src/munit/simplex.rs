//! Nelder–Mead minimization over `ℝⁿ`.

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimplexOptions {
    pub max_iter: usize,
    /// Edge length of the initial axis-aligned simplex.
    pub initial_step: f64,
    /// Stop as soon as the best value drops below this.
    pub f_target: f64,
    /// Stop when every vertex lies within this distance of the best one.
    pub x_tol: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions { max_iter: 4000, initial_step: 0.5, f_target: 0.0, x_tol: 1e-14 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    /// True when a stopping rule other than `max_iter` fired.
    pub converged: bool,
}

fn combine(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    // a + t (b − a)
    a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
}

/// Standard coefficients: reflection 1, expansion 2, contraction ½, shrink ½.
/// Non-finite objective values are treated as `+∞`.
pub fn nelder_mead(mut f: impl FnMut(&[f64]) -> f64, x0: &[f64], opts: &SimplexOptions) -> SimplexResult {
    let n = x0.len();
    let mut eval = |x: &[f64]| {
        let v = f(x);
        if v.is_finite() { v } else { f64::INFINITY }
    };
    let mut pts: Vec<Vec<f64>> = vec![x0.to_vec()];
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += opts.initial_step;
        pts.push(p);
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| eval(p)).collect();
    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iter {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        pts = order.iter().map(|&i| pts[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();
        if vals[0] <= opts.f_target {
            converged = true;
            break;
        }
        let spread = pts[1..]
            .iter()
            .map(|p| p.iter().zip(&pts[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if spread < opts.x_tol {
            converged = true;
            break;
        }
        iterations += 1;

        let mut centroid = vec![0.0; n];
        for p in &pts[..n] {
            for (c, x) in centroid.iter_mut().zip(p) {
                *c += x / n as f64;
            }
        }
        let worst = pts[n].clone();
        let reflected = combine(&centroid, &worst, -1.0);
        let fr = eval(&reflected);
        if fr < vals[0] {
            let expanded = combine(&centroid, &worst, -2.0);
            let fe = eval(&expanded);
            if fe < fr {
                pts[n] = expanded;
                vals[n] = fe;
            } else {
                pts[n] = reflected;
                vals[n] = fr;
            }
            continue;
        }
        if fr < vals[n - 1] {
            pts[n] = reflected;
            vals[n] = fr;
            continue;
        }
        let (contracted, fc) = if fr < vals[n] {
            let p = combine(&centroid, &worst, -0.5);
            let v = eval(&p);
            (p, v)
        } else {
            let p = combine(&centroid, &worst, 0.5);
            let v = eval(&p);
            (p, v)
        };
        if fc < vals[n].min(fr) {
            pts[n] = contracted;
            vals[n] = fc;
            continue;
        }
        for i in 1..=n {
            pts[i] = combine(&pts[0], &pts[i], 0.5);
            vals[i] = eval(&pts[i]);
        }
    }
    let best = (0..=n).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).expect("non-empty simplex");
    SimplexResult { x: pts[best].clone(), value: vals[best], iterations, converged }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimizes_a_shifted_quadratic() {
        let f = |x: &[f64]| (x[0] - 1.5).powi(2) + 10.0 * (x[1] + 0.25).powi(2) + (x[2] - x[0]).powi(2);
        let r = nelder_mead(f, &[0.0, 0.0, 0.0], &SimplexOptions { f_target: 1e-24, ..Default::default() });
        assert!(r.value < 1e-20, "{r:?}");
        assert!((r.x[0] - 1.5).abs() < 1e-9 && (r.x[1] + 0.25).abs() < 1e-9 && (r.x[2] - 1.5).abs() < 1e-9);
    }

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let r = nelder_mead(f, &[-1.2, 1.0], &SimplexOptions { max_iter: 10_000, f_target: 1e-20, ..Default::default() });
        assert!((r.x[0] - 1.0).abs() < 1e-6 && (r.x[1] - 1.0).abs() < 1e-6, "{r:?}");
    }

    #[test]
    fn non_finite_values_are_avoided() {
        let f = |x: &[f64]| if x[0] < 0.0 { f64::NAN } else { (x[0] - 2.0).powi(2) };
        let r = nelder_mead(f, &[0.1], &SimplexOptions { f_target: 1e-20, ..Default::default() });
        assert!((r.x[0] - 2.0).abs() < 1e-8);
    }

    #[test]
    fn zero_target_at_start_stops_immediately() {
        let r = nelder_mead(|x: &[f64]| x[0].abs(), &[0.0], &SimplexOptions::default());
        assert_eq!(r.iterations, 0);
        assert!(r.converged);
    }
}
