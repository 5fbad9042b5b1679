//! Integer coordinate weights and the grading they induce on monomials.

/// Non-negative integer weight per coordinate. The weight of a monomial is
/// the dot product with its exponent vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeightAssignment {
    weights: Vec<u32>,
}

impl WeightAssignment {
    pub fn new(weights: Vec<u32>) -> Self {
        WeightAssignment { weights }
    }

    /// All coordinates of weight zero.
    pub fn trivial(n_vars: usize) -> Self {
        WeightAssignment { weights: vec![0; n_vars] }
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn n_vars(&self) -> usize {
        self.weights.len()
    }

    pub fn weight_of(&self, exponents: &[u32]) -> u64 {
        self.weights
            .iter()
            .zip(exponents)
            .map(|(&w, &e)| u64::from(w) * u64::from(e))
            .sum()
    }

    /// Coordinates of weight zero: the directions along the transversal.
    pub fn zero_weight_coords(&self) -> Vec<usize> {
        (0..self.weights.len()).filter(|&i| self.weights[i] == 0).collect()
    }

    /// Coordinates of positive weight: the normal directions.
    pub fn positive_weight_coords(&self) -> Vec<usize> {
        (0..self.weights.len()).filter(|&i| self.weights[i] > 0).collect()
    }
}
