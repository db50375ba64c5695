use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The constant hierarchy used by the asymptotic statements, instantiated
/// numerically. Construction validates the ordering chain
///
///   1/n < 1/K < 1/k < eps < gamma < beta <= d < lambda' < lambda < eta < alpha < 1.
///
/// Desk-scale pipelines use coarser per-stage knobs (see `PartitionParams`);
/// those deliberately do not thread through this chain, because honest chain
/// instantiation forces cluster counts far beyond what hosts of a few thousand
/// vertices support.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ParamHierarchy {
    pub n: usize,
    pub big_k: usize,
    pub k: usize,
    pub eps: f64,
    pub gamma: f64,
    pub beta: f64,
    pub d: f64,
    pub lambda_prime: f64,
    pub lambda: f64,
    pub eta: f64,
    pub alpha: f64,
}

impl ParamHierarchy {
    pub fn new(
        n: usize,
        big_k: usize,
        k: usize,
        eps: f64,
        gamma: f64,
        beta: f64,
        d: f64,
        lambda_prime: f64,
        lambda: f64,
        eta: f64,
        alpha: f64,
    ) -> Result<Self> {
        let p = ParamHierarchy { n, big_k, k, eps, gamma, beta, d, lambda_prime, lambda, eta, alpha };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        let mut chain: Vec<(&str, f64)> = vec![
            ("1/n", 1.0 / self.n as f64),
            ("1/K", 1.0 / self.big_k as f64),
            ("1/k", 1.0 / self.k as f64),
            ("eps", self.eps),
            ("gamma", self.gamma),
            ("beta", self.beta),
        ];
        // beta <= d is the one non-strict link.
        if self.beta > self.d {
            return Err(Error::invalid(format!("beta={} must be <= d={}", self.beta, self.d)));
        }
        for (name, v) in &chain {
            if !v.is_finite() || *v <= 0.0 {
                return Err(Error::invalid(format!("{name}={v} must be positive and finite")));
            }
        }
        for w in chain.windows(2) {
            if w[0].1 >= w[1].1 {
                return Err(Error::invalid(format!(
                    "hierarchy violated: {}={} must be < {}={}",
                    w[0].0, w[0].1, w[1].0, w[1].1
                )));
            }
        }
        chain = vec![
            ("d", self.d),
            ("lambda'", self.lambda_prime),
            ("lambda", self.lambda),
            ("eta", self.eta),
            ("alpha", self.alpha),
            ("1", 1.0),
        ];
        for w in chain.windows(2) {
            if w[0].1 >= w[1].1 {
                return Err(Error::invalid(format!(
                    "hierarchy violated: {}={} must be < {}={}",
                    w[0].0, w[0].1, w[1].0, w[1].1
                )));
            }
        }
        Ok(())
    }

    /// One consistent assignment for a given alpha, scaling the rest of the
    /// chain downward by fixed ratios:
    ///   eta = 3a/4, lambda = 4eta/5, lambda' = 3lambda/4, d = beta = 4lambda'/5,
    ///   gamma = beta/2, eps = gamma/2, k = ceil(2/eps), K = 2k.
    pub fn default_for(n: usize, alpha: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&alpha) || alpha <= 0.0 {
            return Err(Error::invalid(format!("alpha={alpha} must lie in (0,1)")));
        }
        let eta = 0.75 * alpha;
        let lambda = 0.8 * eta;
        let lambda_prime = 0.75 * lambda;
        let d = 0.8 * lambda_prime;
        let beta = d;
        let gamma = beta / 2.0;
        let eps = gamma / 2.0;
        let k = (2.0 / eps).ceil() as usize;
        let big_k = 2 * k;
        ParamHierarchy::new(n, big_k, k, eps, gamma, beta, d, lambda_prime, lambda, eta, alpha)
    }

    /// Maximum-degree budget for allocated trees: ceil(n^(1/sqrt(K ln n))).
    /// At desk scale the asymptotic bound rounds up to the next integer.
    pub fn degree_budget(&self) -> usize {
        degree_budget(self.n, self.big_k)
    }
}

pub fn degree_budget(n: usize, big_k: usize) -> usize {
    if n < 3 {
        return 2;
    }
    let ln_n = (n as f64).ln();
    let exponent = 1.0 / (big_k as f64 * ln_n).sqrt();
    (n as f64).powf(exponent).ceil() as usize
}

/// Per-stage knobs for the cluster-partition pipeline. These are desk-scale
/// settings: k clusters, regularity tolerance eps at density threshold d,
/// link threshold eta, host surplus alpha.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct PartitionParams {
    pub k: usize,
    pub eps: f64,
    pub d: f64,
    pub eta: f64,
    pub alpha: f64,
    /// Subset-pair samples per regularity check.
    pub trials: usize,
    /// Re-randomization attempts before giving up.
    pub attempts: usize,
}

impl Default for PartitionParams {
    fn default() -> Self {
        PartitionParams { k: 8, eps: 0.1, d: 0.3, eta: 0.15, alpha: 0.2, trials: 800, attempts: 10 }
    }
}

impl PartitionParams {
    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::invalid("k must be at least 2"));
        }
        for (name, v) in [
            ("eps", self.eps),
            ("d", self.d),
            ("eta", self.eta),
            ("alpha", self.alpha),
        ] {
            if !(0.0..=1.0).contains(&v) || v <= 0.0 {
                return Err(Error::invalid(format!("{name}={v} must lie in (0,1]")));
            }
        }
        if self.trials == 0 || self.attempts == 0 {
            return Err(Error::invalid("trials and attempts must be positive"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_chain_is_consistent() {
        let p = ParamHierarchy::default_for(2000, 0.2).unwrap();
        assert!(p.eps > 1.0 / p.k as f64);
        assert!(p.k < p.big_k && p.big_k < p.n);
        assert!(p.beta <= p.d && p.d < p.lambda_prime);
    }

    #[test]
    fn chain_violations_rejected() {
        // eps below 1/k
        assert!(ParamHierarchy::new(1000, 64, 32, 0.01, 0.05, 0.1, 0.1, 0.2, 0.3, 0.4, 0.5).is_err());
        // beta > d
        assert!(ParamHierarchy::new(1000, 64, 8, 0.2, 0.25, 0.35, 0.3, 0.4, 0.5, 0.6, 0.7).is_err());
        // alpha >= 1
        assert!(ParamHierarchy::new(1000, 64, 8, 0.2, 0.25, 0.3, 0.3, 0.4, 0.5, 0.6, 1.0).is_err());
    }

    #[test]
    fn degree_budget_scales() {
        // larger K tightens the budget
        assert!(degree_budget(100_000, 4) >= degree_budget(100_000, 64));
        // never below 2
        assert!(degree_budget(10, 1000) >= 2);
        // frozen spots: ceil(exp(sqrt(ln n / K) )) at (n, K)
        assert_eq!(degree_budget(2000, 4), 4); // exp(1.3785) = 3.97
        assert_eq!(degree_budget(100_000, 64), 2); // exp(0.4242) = 1.53
        assert_eq!(degree_budget(50_000, 16), 3); // exp(0.8223) = 2.28
        assert_eq!(degree_budget(100_000, 4), 6); // exp(1.6965) = 5.46
    }
}
