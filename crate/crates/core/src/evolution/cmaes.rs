//! CMA-ES with rank-one and rank-mu covariance updates and cumulative
//! step-size adaptation, in the maximization convention.
//!
//! Strategy constants follow Hansen's defaults for the given dimension and
//! population size, using positive recombination weights on the best half.

use log::warn;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest eigenvalue kept when repairing the covariance.
pub const MIN_EIGENVALUE: f64 = 1e-20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CmaParams {
    pub dim: usize,
    pub lambda: usize,
    pub mu: usize,
    pub weights: Vec<f64>,
    pub mu_eff: f64,
    pub c_sigma: f64,
    pub d_sigma: f64,
    pub c_c: f64,
    pub c_1: f64,
    pub c_mu: f64,
    pub chi_n: f64,
}

impl CmaParams {
    pub fn new(dim: usize, lambda: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Config("CMA-ES dimension must be positive".into()));
        }
        if lambda < 4 {
            return Err(Error::Config(format!(
                "population must be at least 4, got {lambda}"
            )));
        }
        let n = dim as f64;
        let mu = lambda / 2;
        let raw: Vec<f64> = (1..=mu)
            .map(|i| ((lambda as f64 + 1.0) / 2.0).ln() - (i as f64).ln())
            .collect();
        let total: f64 = raw.iter().sum();
        let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
        let mu_eff = 1.0 / weights.iter().map(|w| w * w).sum::<f64>();

        let c_sigma = (mu_eff + 2.0) / (n + mu_eff + 5.0);
        let d_sigma = 1.0 + 2.0 * (((mu_eff - 1.0) / (n + 1.0)).sqrt() - 1.0).max(0.0) + c_sigma;
        let c_c = (4.0 + mu_eff / n) / (n + 4.0 + 2.0 * mu_eff / n);
        let c_1 = 2.0 / ((n + 1.3).powi(2) + mu_eff);
        let c_mu =
            (1.0 - c_1).min(2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) / ((n + 2.0).powi(2) + mu_eff));
        let chi_n = n.sqrt() * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));
        Ok(Self {
            dim,
            lambda,
            mu,
            weights,
            mu_eff,
            c_sigma,
            d_sigma,
            c_c,
            c_1,
            c_mu,
            chi_n,
        })
    }
}

/// Full optimizer state. Matrices are stored row-major so the state serializes as plain JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CmaState {
    pub params: CmaParams,
    pub generation: u64,
    pub mean: Vec<f64>,
    pub sigma: f64,
    pub p_sigma: Vec<f64>,
    pub p_c: Vec<f64>,
    pub cov: Vec<f64>,
    /// Eigenvectors of `cov` (columns), row-major.
    pub basis: Vec<f64>,
    /// Square roots of the eigenvalues of `cov`.
    pub scales: Vec<f64>,
    pub eigen_generation: u64,
}

/// One sampled generation: `z ~ N(0, I)`, `y = B D z`, `x = mean + sigma * y`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub x: Vec<Vec<f64>>,
    y: Vec<Vec<f64>>,
}

impl CmaState {
    pub fn new(mean: Vec<f64>, sigma: f64, lambda: usize) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::Config(format!(
                "sigma0 must be positive, got {sigma}"
            )));
        }
        let n = mean.len();
        let params = CmaParams::new(n, lambda)?;
        let identity = DMatrix::<f64>::identity(n, n);
        Ok(Self {
            params,
            generation: 0,
            mean,
            sigma,
            p_sigma: vec![0.0; n],
            p_c: vec![0.0; n],
            cov: row_major(&identity),
            basis: row_major(&identity),
            scales: vec![1.0; n],
            eigen_generation: 0,
        })
    }

    pub fn dim(&self) -> usize {
        self.params.dim
    }

    pub fn lambda(&self) -> usize {
        self.params.lambda
    }

    pub fn covariance(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.dim(), self.dim(), &self.cov)
    }

    fn basis_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.dim(), self.dim(), &self.basis)
    }

    /// Draws `lambda` candidates from `N(mean, sigma^2 C)`.
    pub fn ask<R: Rng + ?Sized>(&self, rng: &mut R) -> Sample {
        let n = self.dim();
        let b = self.basis_matrix();
        let mut x = Vec::with_capacity(self.lambda());
        let mut y = Vec::with_capacity(self.lambda());
        for _ in 0..self.lambda() {
            let dz = DVector::from_iterator(
                n,
                self.scales
                    .iter()
                    .map(|d| d * rng.sample::<f64, _>(StandardNormal)),
            );
            let yk = &b * dz;
            x.push(
                self.mean
                    .iter()
                    .zip(yk.iter())
                    .map(|(m, yi)| m + self.sigma * yi)
                    .collect(),
            );
            y.push(yk.as_slice().to_vec());
        }
        Sample { x, y }
    }

    /// Updates the distribution from fitness values (higher is better).
    pub fn tell(&mut self, sample: &Sample, fitness: &[f64]) -> Result<()> {
        let lambda = self.lambda();
        if sample.x.len() != lambda || fitness.len() != lambda {
            return Err(Error::Length {
                what: "fitness",
                expected: lambda,
                actual: fitness.len().min(sample.x.len()),
            });
        }
        let n = self.dim();
        let p = self.params.clone();

        let bad = fitness.iter().filter(|f| !f.is_finite()).count();
        if bad > 0 {
            warn!("{bad} non-finite fitness values ranked last");
        }
        let key = |f: f64| if f.is_finite() { f } else { f64::NEG_INFINITY };
        let mut order: Vec<usize> = (0..lambda).collect();
        // stable sort keeps ties in candidate order
        order.sort_by(|&a, &b| key(fitness[b]).total_cmp(&key(fitness[a])));

        let mut y_w = DVector::<f64>::zeros(n);
        for (w, &k) in p.weights.iter().zip(&order) {
            y_w += DVector::from_column_slice(&sample.y[k]) * *w;
        }
        for (m, yi) in self.mean.iter_mut().zip(y_w.iter()) {
            *m += self.sigma * yi;
        }

        // C^(-1/2) y_w = B D^-1 B^T y_w
        let b = self.basis_matrix();
        let mut bt_y = b.transpose() * &y_w;
        for (v, d) in bt_y.iter_mut().zip(&self.scales) {
            *v /= d;
        }
        let c_inv_sqrt_y = &b * bt_y;

        let cs = p.c_sigma;
        let ps_coeff = (cs * (2.0 - cs) * p.mu_eff).sqrt();
        for (ps, v) in self.p_sigma.iter_mut().zip(c_inv_sqrt_y.iter()) {
            *ps = (1.0 - cs) * *ps + ps_coeff * v;
        }
        let ps_norm = self.p_sigma.iter().map(|v| v * v).sum::<f64>().sqrt();
        self.generation += 1;
        let decay = 1.0 - (1.0 - cs).powi(2 * self.generation.min(i32::MAX as u64 / 2) as i32);
        let h_sigma = ps_norm / decay.sqrt() / p.chi_n < 1.4 + 2.0 / (n as f64 + 1.0);
        let h = if h_sigma { 1.0 } else { 0.0 };

        let cc = p.c_c;
        let pc_coeff = (cc * (2.0 - cc) * p.mu_eff).sqrt();
        for (pc, yi) in self.p_c.iter_mut().zip(y_w.iter()) {
            *pc = (1.0 - cc) * *pc + h * pc_coeff * yi;
        }

        let delta_h = (1.0 - h) * cc * (2.0 - cc);
        let old_scale = 1.0 - p.c_1 - p.c_mu + p.c_1 * delta_h;
        let selected: Vec<&Vec<f64>> = order.iter().take(p.mu).map(|&k| &sample.y[k]).collect();
        for i in 0..n {
            for j in i..n {
                let mut rank_mu = 0.0;
                for (w, yk) in p.weights.iter().zip(&selected) {
                    rank_mu += w * yk[i] * yk[j];
                }
                let v = old_scale * self.cov[i * n + j]
                    + p.c_1 * self.p_c[i] * self.p_c[j]
                    + p.c_mu * rank_mu;
                self.cov[i * n + j] = v;
                self.cov[j * n + i] = v;
            }
        }

        self.sigma *= ((cs / p.d_sigma) * (ps_norm / p.chi_n - 1.0)).exp();

        let gap = (lambda as f64 / (p.c_1 + p.c_mu) / n as f64 / 10.0).max(1.0);
        if (self.generation - self.eigen_generation) as f64 >= gap {
            self.decompose();
        }
        Ok(())
    }

    /// Recomputes the eigenbasis, clamping eigenvalues at [`MIN_EIGENVALUE`] and
    /// rebuilding the covariance from the repaired spectrum when clamping occurs.
    pub fn decompose(&mut self) {
        let n = self.dim();
        let eig = SymmetricEigen::new(self.covariance());
        let mut clamped = false;
        let values: Vec<f64> = eig
            .eigenvalues
            .iter()
            .map(|&v| {
                if v.is_finite() && v >= MIN_EIGENVALUE {
                    v
                } else {
                    clamped = true;
                    MIN_EIGENVALUE
                }
            })
            .collect();
        if clamped {
            warn!("covariance repaired by eigenvalue clamping");
            let d = DMatrix::from_diagonal(&DVector::from_vec(values.clone()));
            let c = &eig.eigenvectors * d * eig.eigenvectors.transpose();
            for i in 0..n {
                for j in i..n {
                    let v = c[(i, j)];
                    self.cov[i * n + j] = v;
                    self.cov[j * n + i] = v;
                }
            }
        }
        self.scales = values.iter().map(|v| v.sqrt()).collect();
        self.basis = row_major(&eig.eigenvectors);
        self.eigen_generation = self.generation;
    }

    /// True when the stored covariance is exactly symmetric and has positive eigenvalues.
    pub fn covariance_is_spd(&self) -> bool {
        let n = self.dim();
        for i in 0..n {
            for j in 0..i {
                if self.cov[i * n + j].to_bits() != self.cov[j * n + i].to_bits() {
                    return false;
                }
            }
        }
        let eig = SymmetricEigen::new(self.covariance());
        eig.eigenvalues.iter().all(|&v| v > 0.0)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("CMA state serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::format("CMA state", e))
    }
}

fn row_major(m: &DMatrix<f64>) -> Vec<f64> {
    m.transpose().as_slice().to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed;

    #[test]
    fn default_constants_for_table_size() {
        let p = CmaParams::new(567, 128).unwrap();
        assert_eq!(p.mu, 64);
        assert!((p.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(p.weights.windows(2).all(|w| w[0] > w[1]));
        assert!(p.mu_eff > 30.0 && p.mu_eff < 40.0);
        assert!(p.c_1 + p.c_mu <= 1.0);
        assert!(CmaParams::new(5, 3).is_err());
    }

    #[test]
    fn tiny_sigma_samples_collapse_to_mean() {
        let state = CmaState::new(vec![1.0, -2.0, 3.0], 1e-300, 8).unwrap();
        let s = state.ask(&mut seed::rng(1));
        for x in &s.x {
            for (a, b) in x.iter().zip(&state.mean) {
                assert!((a - b).abs() < 1e-250);
            }
        }
    }

    #[test]
    fn sample_moments_match_distribution() {
        let n = 3;
        let state = CmaState::new(vec![0.5, -1.0, 2.0], 0.3, 100).unwrap();
        let mut rng = seed::rng(2);
        let mut sum = vec![0.0; n];
        let mut sq = vec![0.0; n];
        let draws = 1000;
        for _ in 0..draws {
            for x in state.ask(&mut rng).x {
                for i in 0..n {
                    sum[i] += x[i];
                    sq[i] += x[i] * x[i];
                }
            }
        }
        let total = (draws * 100) as f64;
        for i in 0..n {
            let mean = sum[i] / total;
            let var = sq[i] / total - mean * mean;
            let se = 0.3 / total.sqrt();
            assert!(
                (mean - state.mean[i]).abs() < 3.0 * se,
                "coordinate {i}: {mean}"
            );
            assert!((var / 0.09 - 1.0).abs() < 0.02, "coordinate {i}: {var}");
        }
    }

    #[test]
    fn flat_fitness_keeps_mean_close() {
        let mut state = CmaState::new(vec![0.0; 6], 0.5, 64).unwrap();
        let mut rng = seed::rng(3);
        for _ in 0..5 {
            let before = state.mean.clone();
            let s = state.ask(&mut rng);
            state.tell(&s, &vec![1.0; 64]).unwrap();
            let shift: f64 = state
                .mean
                .iter()
                .zip(&before)
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt();
            assert!(shift < state.sigma * 2.0, "shift {shift}");
            assert!(state.covariance_is_spd());
        }
    }

    #[test]
    fn non_finite_fitness_ranks_last() {
        let mut state = CmaState::new(vec![0.0; 2], 1.0, 4).unwrap();
        let s = state.ask(&mut seed::rng(4));
        let mut good = state.clone();
        state
            .tell(&s, &[f64::NAN, 1.0, f64::INFINITY, 0.5])
            .unwrap();
        good.tell(&s, &[-10.0, 1.0, -20.0, 0.5]).unwrap();
        assert_eq!(state.mean, good.mean);
    }

    #[test]
    fn rejects_wrong_lengths() {
        let mut state = CmaState::new(vec![0.0; 2], 1.0, 4).unwrap();
        let s = state.ask(&mut seed::rng(5));
        assert!(state.tell(&s, &[1.0; 3]).is_err());
        assert!(CmaState::new(vec![0.0], 0.0, 4).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let mut state = CmaState::new(vec![0.1; 4], 0.2, 8).unwrap();
        let mut rng = seed::rng(6);
        for g in 0..20 {
            let s = state.ask(&mut rng);
            let f: Vec<f64> =
                s.x.iter()
                    .map(|x| -x.iter().map(|v| v * v).sum::<f64>() + g as f64)
                    .collect();
            state.tell(&s, &f).unwrap();
        }
        let back = CmaState::from_json(&state.to_json()).unwrap();
        assert_eq!(back, state);
    }
}
