//! Derivative-free local minimisation (Nelder-Mead) with box projection.

pub(crate) struct NelderMead {
    pub max_iter: usize,
    pub f_tol: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self {
            max_iter: 1500,
            f_tol: 1e-14,
        }
    }
}

impl NelderMead {
    /// Minimises `f` from `start`, with initial simplex offsets `steps`.
    /// `project` maps any trial point back into the feasible region.
    pub fn minimize<F, P>(&self, f: F, project: P, start: &[f64], steps: &[f64]) -> (Vec<f64>, f64)
    where
        F: Fn(&[f64]) -> f64,
        P: Fn(&mut [f64]),
    {
        let dim = start.len();
        let eval = |x: &mut Vec<f64>| -> f64 {
            project(x);
            let v = f(x);
            if v.is_finite() {
                v
            } else {
                f64::INFINITY
            }
        };

        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
        let mut x0 = start.to_vec();
        let f0 = eval(&mut x0);
        simplex.push((x0.clone(), f0));
        for i in 0..dim {
            let mut x = x0.clone();
            x[i] += steps[i];
            let mut fx = eval(&mut x);
            if x == x0 {
                // projection swallowed the step; go the other way
                x[i] -= 2.0 * steps[i];
                fx = eval(&mut x);
            }
            simplex.push((x, fx));
        }

        for _ in 0..self.max_iter {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let best = simplex[0].1;
            let worst = simplex[dim].1;
            if (worst - best).abs() <= self.f_tol * (1.0 + best.abs()) {
                break;
            }

            let mut centroid = vec![0.0; dim];
            for (x, _) in &simplex[..dim] {
                for (c, v) in centroid.iter_mut().zip(x) {
                    *c += v / dim as f64;
                }
            }
            let along = |t: f64| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(&simplex[dim].0)
                    .map(|(c, w)| c + t * (c - w))
                    .collect()
            };

            let mut xr = along(1.0);
            let fr = eval(&mut xr);
            if fr < simplex[0].1 {
                let mut xe = along(2.0);
                let fe = eval(&mut xe);
                simplex[dim] = if fe < fr { (xe, fe) } else { (xr, fr) };
                continue;
            }
            if fr < simplex[dim - 1].1 {
                simplex[dim] = (xr, fr);
                continue;
            }
            let (xc, fc) = if fr < worst {
                let mut x = along(0.5);
                let v = eval(&mut x);
                (x, v)
            } else {
                let mut x = along(-0.5);
                let v = eval(&mut x);
                (x, v)
            };
            if fc < worst.min(fr) {
                simplex[dim] = (xc, fc);
                continue;
            }
            // shrink towards the best vertex
            let best_x = simplex[0].0.clone();
            for (x, fx) in simplex.iter_mut().skip(1) {
                for (v, b) in x.iter_mut().zip(&best_x) {
                    *v = b + 0.5 * (*v - b);
                }
                *fx = eval(x);
            }
        }
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        simplex.swap_remove(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimises_rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let nm = NelderMead {
            max_iter: 5000,
            f_tol: 1e-20,
        };
        let (x, v) = nm.minimize(f, |_| {}, &[-1.2, 1.0], &[0.1, 0.1]);
        assert!(v < 1e-10, "{v}");
        assert!((x[0] - 1.0).abs() < 1e-4);
    }

    #[test]
    fn respects_projection() {
        let f = |x: &[f64]| (x[0] - 5.0).powi(2);
        let (x, _) = NelderMead::default().minimize(f, |x| x[0] = x[0].min(2.0), &[0.0], &[0.5]);
        assert!((x[0] - 2.0).abs() < 1e-6);
    }
}
