//! Exact arithmetic and order for the model.
//!
//! An element is a finite sum `sum c_e * t^e` with exponents `e` in `Q^d`
//! (lexicographic, `d` is 1 or 2), all exponents `>= 0`, an integer constant
//! coefficient, and a positive leading coefficient whenever some exponent is
//! positive. These are the nonnegative members of the integer part of the
//! field of finite generalized power series: a discretely ordered semiring
//! with division by standard integers, and for `d = 1` full Euclidean
//! division.

mod element;
mod exponent;
mod signed;

pub use element::Element;
pub use exponent::Exponent;
pub use signed::{Series, Term};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("subtraction underflow: subtrahend exceeds minuend")]
    Underflow,
    #[error("quotient expansion exceeded the division budget of {budget} terms")]
    NonTerminatingQuotient { budget: usize },
    #[error("no rational-coefficient {root}-th root floor exists (leading coefficient {coeff})")]
    CoefficientNotRepresentable { root: u64, coeff: String },
    #[error("division by zero")]
    DivisionByZero,
    #[error("not an element of the model: {0}")]
    InvariantViolation(String),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("invalid model configuration: {0}")]
    InvalidConfig(String),
}

/// Global knobs shared by the deciders, builders and samplers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelConfig {
    pub dim: usize,
    /// Maximum number of positive-exponent quotient terms for `d = 2` division.
    pub div_budget: usize,
    pub search_n_max: u64,
    pub seed: u64,
}

impl ModelConfig {
    pub fn new(dim: usize) -> Result<Self, ModelError> {
        let cfg = ModelConfig { dim, div_budget: 64, search_n_max: 64, seed: 0 };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_div_budget(mut self, budget: usize) -> Self {
        self.div_budget = budget;
        self
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !(1..=2).contains(&self.dim) {
            return Err(ModelError::InvalidConfig(format!("dim must be 1 or 2, got {}", self.dim)));
        }
        if self.div_budget < 1 {
            return Err(ModelError::InvalidConfig("div_budget must be >= 1".into()));
        }
        if self.search_n_max < 1 {
            return Err(ModelError::InvalidConfig("search_n_max must be >= 1".into()));
        }
        Ok(())
    }
}
