//! Derivative-free simplex minimizer with dimension-adaptive coefficients
//! (reflection 1, expansion 1 + 2/n, contraction 0.75 - 1/2n, shrink 1 - 1/n).

use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadOptions {
    /// Edge length of the initial axis-aligned simplex.
    pub initial_step: f64,
    pub max_iterations: usize,
    /// Stop once the objective spread across the simplex is at most this
    /// and every vertex lies within `point_tolerance` of the best one.
    pub tolerance: f64,
    pub point_tolerance: f64,
    /// Fresh simplices rebuilt around the incumbent after convergence; each
    /// halves the step. Stops early when a rebuild brings no improvement.
    pub rebuilds: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self { initial_step: 0.2, max_iterations: 4000, tolerance: 1e-12, point_tolerance: 1e-8, rebuilds: 4 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub point: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
}

pub fn minimize(mut f: impl FnMut(&[f64]) -> f64, start: &[f64], options: &NelderMeadOptions) -> Minimum {
    let mut evaluations = 0usize;
    let mut eval = |x: &[f64]| {
        evaluations += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut best_point = start.to_vec();
    let mut best_value = eval(&best_point);
    let mut iterations = 0usize;
    let mut step = options.initial_step;
    for _ in 0..=options.rebuilds {
        if iterations >= options.max_iterations {
            break;
        }
        let budget = options.max_iterations - iterations;
        let (point, value, used) = run_simplex(&mut eval, &best_point, best_value, step, budget, options);
        iterations += used;
        let improved = value < best_value - options.tolerance;
        if value < best_value {
            best_point = point;
            best_value = value;
        }
        if !improved {
            break;
        }
        step *= 0.5;
    }
    Minimum { point: best_point, value: best_value, iterations, evaluations }
}

fn run_simplex(
    eval: &mut impl FnMut(&[f64]) -> f64,
    start: &[f64],
    start_value: f64,
    step: f64,
    budget: usize,
    options: &NelderMeadOptions,
) -> (Vec<f64>, f64, usize) {
    let n = start.len();
    if n == 0 {
        return (Vec::new(), start_value, 0);
    }
    let nf = n as f64;
    let (alpha, gamma, rho, sigma) = (1.0, 1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf);

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    let mut values: Vec<f64> = Vec::with_capacity(n + 1);
    simplex.push(start.to_vec());
    values.push(start_value);
    for i in 0..n {
        let mut v = start.to_vec();
        v[i] += step;
        values.push(eval(&v));
        simplex.push(v);
    }

    let mut centroid = vec![0.0; n];
    let mut trial = vec![0.0; n];
    let mut iterations = 0;
    while iterations < budget {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();
        if values[n] - values[0] <= options.tolerance {
            let spread = simplex[1..]
                .iter()
                .flat_map(|v| v.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()))
                .fold(0.0, f64::max);
            if spread <= options.point_tolerance {
                break;
            }
        }
        iterations += 1;

        centroid.iter_mut().for_each(|c| *c = 0.0);
        for v in &simplex[..n] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / nf;
            }
        }
        let along = |coef: f64, out: &mut Vec<f64>, worst: &[f64], centroid: &[f64]| {
            for ((o, c), w) in out.iter_mut().zip(centroid).zip(worst) {
                *o = c + coef * (c - w);
            }
        };

        along(alpha, &mut trial, &simplex[n], &centroid);
        let reflected = eval(&trial);
        if reflected < values[0] {
            let reflected_point = trial.clone();
            along(alpha * gamma, &mut trial, &simplex[n], &centroid);
            let expanded = eval(&trial);
            if expanded < reflected {
                simplex[n] = trial.clone();
                values[n] = expanded;
            } else {
                simplex[n] = reflected_point;
                values[n] = reflected;
            }
            continue;
        }
        if reflected < values[n - 1] {
            simplex[n] = trial.clone();
            values[n] = reflected;
            continue;
        }
        let outside = reflected < values[n];
        let coef = if outside { alpha * rho } else { -rho };
        along(coef, &mut trial, &simplex[n], &centroid);
        let contracted = eval(&trial);
        if contracted < values[n].min(reflected) {
            simplex[n] = trial.clone();
            values[n] = contracted;
            continue;
        }
        let best = simplex[0].clone();
        for i in 1..=n {
            for (x, b) in simplex[i].iter_mut().zip(&best) {
                *x = b + sigma * (*x - b);
            }
            values[i] = eval(&simplex[i]);
        }
    }
    let arg = (0..=n).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap_or(0);
    (simplex[arg].clone(), values[arg], iterations)
}
