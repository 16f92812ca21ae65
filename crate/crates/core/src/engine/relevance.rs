use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Serialize};

use super::config::RelevanceConfig;
use crate::numeric::{decimal_vec, display};

/// A strength as a tier vector, highest tier first. Archimedean strengths
/// have a single tier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Strength(#[serde(with = "decimal_vec")] pub Vec<f64>);

impl Strength {
    pub fn zero(tiers: usize) -> Self {
        Strength(vec![0.0; tiers])
    }

    pub fn scalar(x: f64) -> Self {
        Strength(vec![x])
    }

    pub fn tiers(&self) -> usize {
        self.0.len()
    }

    /// Appends a lower tier.
    pub fn then(mut self, x: f64) -> Self {
        self.0.push(x);
        self
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|x| *x == 0.0)
    }

    /// Lexicographic comparison where tiers within `tol` count as equal.
    pub fn compare(&self, other: &Strength, tol: f64) -> Ordering {
        for (a, b) in self.0.iter().zip(&other.0) {
            if (a - b).abs() > tol {
                return a.partial_cmp(b).unwrap_or(Ordering::Equal);
            }
        }
        Ordering::Equal
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Strength(self.0.iter().map(|x| f(*x)).collect())
    }
}

impl Add<&Strength> for Strength {
    type Output = Strength;

    fn add(mut self, rhs: &Strength) -> Strength {
        if self.0.len() < rhs.0.len() {
            self.0.resize(rhs.0.len(), 0.0);
        }
        for (a, b) in self.0.iter_mut().zip(&rhs.0) {
            *a += b;
        }
        self
    }
}

impl fmt::Display for Strength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0.as_slice() {
            [x] => write!(f, "{}", display(*x)),
            xs => {
                let parts: Vec<String> = xs.iter().map(|x| display(*x)).collect();
                write!(f, "({})", parts.join(", "))
            }
        }
    }
}

/// Indices of the maximal strengths, found by narrowing the candidates tier
/// by tier. Each tier keeps the entries within `tol` of that tier's maximum.
pub fn argmax_strengths(values: &[Strength], tol: f64) -> Vec<usize> {
    let mut keep: Vec<usize> = (0..values.len()).collect();
    let tiers = values.iter().map(Strength::tiers).max().unwrap_or(0);
    for t in 0..tiers {
        let at = |i: usize| values[i].0.get(t).copied().unwrap_or(0.0);
        let best = keep.iter().map(|&i| at(i)).fold(f64::NEG_INFINITY, f64::max);
        keep.retain(|&i| best - at(i) <= tol);
    }
    keep
}

/// `relevance: P → strengths`, monotone in the principle ranking.
#[derive(Debug, Clone, PartialEq)]
pub enum RelevanceFunction {
    /// `weights[rank - 1]`, strictly decreasing.
    Archimedean { weights: Vec<f64> },
    /// A unit vector at the rank's tier, over `classes` tiers.
    Lexicographic { classes: usize },
}

impl RelevanceFunction {
    pub fn new(config: &RelevanceConfig, classes: usize) -> Self {
        match config {
            RelevanceConfig::Archimedean { weights: Some(w), .. } => {
                RelevanceFunction::Archimedean { weights: w.clone() }
            }
            RelevanceConfig::Archimedean { base, weights: None } => RelevanceFunction::Archimedean {
                weights: (1..=classes)
                    .map(|rank| base.powi((classes - rank) as i32))
                    .collect(),
            },
            RelevanceConfig::Lexicographic => RelevanceFunction::Lexicographic { classes },
        }
    }

    /// Number of tiers of a force.
    pub fn force_tiers(&self) -> usize {
        match self {
            RelevanceFunction::Archimedean { .. } => 1,
            RelevanceFunction::Lexicographic { classes } => *classes,
        }
    }

    /// `relevance(ψ)` for a principle of class `rank` (1 is highest).
    pub fn relevance(&self, rank: usize) -> Strength {
        self.scaled(rank, 1.0)
    }

    /// `p · relevance(ψ)`.
    pub fn scaled(&self, rank: usize, p: f64) -> Strength {
        match self {
            RelevanceFunction::Archimedean { weights } => Strength::scalar(p * weights[rank - 1]),
            RelevanceFunction::Lexicographic { classes } => {
                let mut v = vec![0.0; *classes];
                v[rank - 1] = p;
                Strength(v)
            }
        }
    }
}
