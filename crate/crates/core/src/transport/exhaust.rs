//! Interleaved subexhaustions of per-chart exhaustions, from the index
//! oracles of the chart transitions.

use std::collections::BTreeMap;

use super::TransportError;

/// Monotone `μ: ℕ → ℕ` (from 1): a finite prefix followed by the linear
/// tail `slope · n + offset`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexOracle {
    pub prefix: Vec<u64>,
    pub slope: u64,
    pub offset: i64,
}

impl IndexOracle {
    pub fn linear(slope: u64, offset: i64) -> Self {
        IndexOracle { prefix: Vec::new(), slope, offset }
    }

    pub fn eval(&self, n: u64) -> Result<u64, TransportError> {
        if n == 0 {
            return Err(TransportError::Exhaustion("oracles are indexed from 1".into()));
        }
        if let Some(&v) = self.prefix.get(n as usize - 1) {
            return Ok(v);
        }
        let v = self
            .slope
            .checked_mul(n)
            .and_then(|x| i64::try_from(x).ok())
            .and_then(|x| x.checked_add(self.offset))
            .ok_or_else(|| TransportError::Exhaustion(format!("oracle overflows at {n}")))?;
        Ok(v.max(1) as u64)
    }

    /// Values from 1 are at least 1 and nondecreasing.
    pub fn check(&self) -> Result<(), String> {
        let n = self.prefix.len() as u64 + 1;
        let mut prev = 1;
        for k in 1..=n {
            let v = self.eval(k).map_err(|e| e.to_string())?;
            if v < prev {
                return Err(format!("decreases at {k}"));
            }
            prev = v;
        }
        if self.offset + (self.slope as i64) * (n as i64) < 1 {
            return Err("linear tail starts below 1".into());
        }
        Ok(())
    }
}

/// Charts, and for each overlapping pair `(j, i)` the oracle `μ_{ji}`: the
/// least `k` with `ψ_{ji}(K_i ∩ K_j × X_{i,n}) ⊂ int X_{j,k}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExhaustionProblem {
    pub charts: Vec<String>,
    pub oracles: BTreeMap<(usize, usize), IndexOracle>,
}

impl ExhaustionProblem {
    pub fn new(charts: Vec<String>) -> Self {
        ExhaustionProblem { charts, oracles: BTreeMap::new() }
    }

    /// Sets `μ_{ji}`.
    pub fn with_oracle(mut self, j: usize, i: usize, mu: IndexOracle) -> Self {
        self.oracles.insert((j, i), mu);
        self
    }

    fn neighbours(&self, i: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.oracles.keys().filter(|k| k.1 == i).map(|k| k.0).collect();
        out.dedup();
        out
    }

    fn mu(&self, j: usize, i: usize, n: u64) -> Result<u64, TransportError> {
        self.oracles[&(j, i)].eval(n)
    }

    pub fn check(&self) -> Result<(), TransportError> {
        let n = self.charts.len();
        for (&(j, i), mu) in &self.oracles {
            if i >= n || j >= n || i == j {
                return Err(TransportError::Exhaustion(format!("oracle ({}, {}) names no overlap", j + 1, i + 1)));
            }
            if !self.oracles.contains_key(&(i, j)) {
                return Err(TransportError::Exhaustion(format!(
                    "overlap of {} and {} needs oracles in both directions",
                    self.charts[i], self.charts[j]
                )));
            }
            mu.check().map_err(|e| {
                TransportError::Exhaustion(format!("oracle from {} to {} {e}", self.charts[i], self.charts[j]))
            })?;
        }
        Ok(())
    }
}

/// `alpha[i][n - 1] = α_i(n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subexhaustion {
    pub alpha: Vec<Vec<u64>>,
}

/// One failed interleaving inequality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub lower: usize,
    pub upper: usize,
    pub n: u64,
    pub what: String,
}

/// First `steps` values of strictly increasing `α_i` such that, for every
/// overlap `i < j` and every `n`,
/// `μ_{ji}(α_i(n)) ≤ α_j(n)` and `μ_{ij}(α_j(n - 1)) ≤ α_i(n)`.
///
/// Each round visits the charts in increasing order, taking the least index
/// above the previous one that satisfies the constraints from the charts
/// already visited in this round and the rest from the previous round.
/// With two charts this is the alternating recursion started at
/// `α_1(1) = 1`.
pub fn subexhaust(ep: &ExhaustionProblem, steps: usize) -> Result<Subexhaustion, TransportError> {
    ep.check()?;
    let n = ep.charts.len();
    let neighbours: Vec<Vec<usize>> = (0..n).map(|i| ep.neighbours(i)).collect();
    let mut alpha: Vec<Vec<u64>> = vec![Vec::with_capacity(steps); n];
    for step in 0..steps {
        for i in 0..n {
            let mut k = alpha[i].last().map_or(1, |&a| a + 1);
            for &j in &neighbours[i] {
                if j < i {
                    k = k.max(ep.mu(i, j, alpha[j][step])?);
                } else if step > 0 {
                    k = k.max(ep.mu(i, j, alpha[j][step - 1])?);
                }
            }
            alpha[i].push(k);
        }
    }
    Ok(Subexhaustion { alpha })
}

/// Re-queries every oracle along `s`.
pub fn verify_subexhaustion(ep: &ExhaustionProblem, s: &Subexhaustion) -> Result<Vec<Violation>, TransportError> {
    let mut out = Vec::new();
    for (i, a) in s.alpha.iter().enumerate() {
        for w in a.windows(2) {
            if w[1] <= w[0] {
                out.push(Violation { lower: i, upper: i, n: 0, what: format!("{} is not increasing", ep.charts[i]) });
            }
        }
    }
    for &(j, i) in ep.oracles.keys() {
        if i >= j {
            continue;
        }
        for (idx, (&ai, &aj)) in s.alpha[i].iter().zip(&s.alpha[j]).enumerate() {
            let n = idx as u64 + 1;
            let need = ep.mu(j, i, ai)?;
            if need > aj {
                out.push(Violation { lower: i, upper: j, n, what: format!("mu({ai}) = {need} > {aj}") });
            }
            if idx > 0 {
                let prev = s.alpha[j][idx - 1];
                let need = ep.mu(i, j, prev)?;
                if need > ai {
                    out.push(Violation { lower: j, upper: i, n, what: format!("mu({prev}) = {need} > {ai}") });
                }
            }
        }
    }
    Ok(out)
}
