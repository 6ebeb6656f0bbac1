//! Nelder–Mead simplex descent with dimension-adapted coefficients and
//! restarts around the incumbent.

#[derive(Debug, Clone, Copy)]
pub struct NelderMead {
    /// Objective evaluations allowed in total, restarts included.
    pub max_evals: usize,
    /// Spread of objective values across the simplex at which a run stops.
    pub ftol: f64,
    /// Edge length of the initial simplex.
    pub step: f64,
    /// Restarts stop once a full run improves the incumbent by less than this.
    pub restart_gain: f64,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub x: Vec<f64>,
    pub f: f64,
    pub evals: usize,
    pub converged: bool,
}

impl NelderMead {
    pub fn minimize<F: FnMut(&[f64]) -> f64>(&self, mut f: F, x0: &[f64]) -> Outcome {
        let n = x0.len();
        assert!(n >= 1, "empty parameter vector");
        let mut evals = 0usize;
        let mut eval = |x: &[f64], evals: &mut usize| {
            *evals += 1;
            let v = f(x);
            if v.is_nan() {
                f64::INFINITY
            } else {
                v
            }
        };

        let mut best_x = x0.to_vec();
        let mut best_f = eval(&best_x, &mut evals);
        let mut step = self.step;
        let mut converged = false;

        while evals < self.max_evals {
            let start_f = best_f;
            let (x, fx, run_converged) = self.run(&mut eval, &best_x, best_f, step, &mut evals);
            if fx <= best_f {
                best_x = x;
                best_f = fx;
            }
            if run_converged && start_f - best_f < self.restart_gain {
                converged = true;
                break;
            }
            step = (step * 0.5).max(1e-4);
        }
        Outcome { x: best_x, f: best_f, evals, converged }
    }

    fn run<E: FnMut(&[f64], &mut usize) -> f64>(
        &self,
        eval: &mut E,
        x0: &[f64],
        f0: f64,
        step: f64,
        evals: &mut usize,
    ) -> (Vec<f64>, f64, bool) {
        let n = x0.len();
        let nf = n as f64;
        let (alpha, gamma, rho, sigma) = (1.0, 1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf);

        let mut pts: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
        let mut vals: Vec<f64> = Vec::with_capacity(n + 1);
        pts.push(x0.to_vec());
        vals.push(f0);
        for i in 0..n {
            let mut p = x0.to_vec();
            p[i] += step;
            vals.push(eval(&p, evals));
            pts.push(p);
        }

        let mut centroid = vec![0.0; n];
        let mut trial = vec![0.0; n];
        let mut trial2 = vec![0.0; n];
        loop {
            // sort ascending by value; ties keep earlier points first
            let mut order: Vec<usize> = (0..=n).collect();
            order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
            pts = order.iter().map(|&i| std::mem::take(&mut pts[i])).collect();
            vals = order.iter().map(|&i| vals[i]).collect();

            if (vals[n] - vals[0]).abs() <= self.ftol {
                return (pts[0].clone(), vals[0], true);
            }
            if *evals >= self.max_evals {
                return (pts[0].clone(), vals[0], false);
            }

            centroid.iter_mut().for_each(|c| *c = 0.0);
            for p in &pts[..n] {
                for (c, v) in centroid.iter_mut().zip(p) {
                    *c += v / nf;
                }
            }
            let worst = &pts[n];
            for j in 0..n {
                trial[j] = centroid[j] + alpha * (centroid[j] - worst[j]);
            }
            let fr = eval(&trial, evals);

            if fr < vals[0] {
                for j in 0..n {
                    trial2[j] = centroid[j] + gamma * (trial[j] - centroid[j]);
                }
                let fe = eval(&trial2, evals);
                if fe < fr {
                    pts[n].copy_from_slice(&trial2);
                    vals[n] = fe;
                } else {
                    pts[n].copy_from_slice(&trial);
                    vals[n] = fr;
                }
                continue;
            }
            if fr < vals[n - 1] {
                pts[n].copy_from_slice(&trial);
                vals[n] = fr;
                continue;
            }
            let outside = fr < vals[n];
            for j in 0..n {
                trial2[j] = if outside {
                    centroid[j] + rho * (trial[j] - centroid[j])
                } else {
                    centroid[j] + rho * (pts[n][j] - centroid[j])
                };
            }
            let fc = eval(&trial2, evals);
            if (outside && fc <= fr) || (!outside && fc < vals[n]) {
                pts[n].copy_from_slice(&trial2);
                vals[n] = fc;
                continue;
            }
            // shrink toward the best vertex
            let best = pts[0].clone();
            for i in 1..=n {
                for j in 0..n {
                    pts[i][j] = best[j] + sigma * (pts[i][j] - best[j]);
                }
                vals[i] = eval(&pts[i], evals);
            }
        }
    }
}
