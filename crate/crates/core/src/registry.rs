//! Interchangeable algorithms behind common traits, looked up by name.
//!
//! Each family has two built-in strategies that answer the same question by
//! different routes, so one can be used to cross-check the other.

use std::collections::BTreeMap;
use std::fmt;

use exactlp::Rational;
use num_traits::Zero;

use crate::choquet::{precedence_gap, precedes, Precedence};
use crate::deleeuw::DeLeeuwMeasure;
use crate::error::{Error, Result};
use crate::extremality::{classify_molecule, vertex_oracle};
use crate::free::{free_norm, lipschitz_dual_value, FreeElement, Space};

pub trait Strategy: Send + Sync {
    fn name(&self) -> &'static str;
    fn summary(&self) -> &'static str;
}

/// Decides whether the molecule `m_{xy}` is an extreme point of the ball.
pub trait ExtremalityClassifier: Strategy {
    fn is_extreme(&self, space: &Space, x: usize, y: usize) -> Result<bool>;
}

/// Decides the Choquet order `μ ≼ ν` between positive measures.
pub trait PrecedenceDecider: Strategy {
    fn precedes(&self, mu: &DeLeeuwMeasure, nu: &DeLeeuwMeasure) -> Result<bool>;
}

/// Computes the free-space norm.
pub trait NormSolver: Strategy {
    fn norm(&self, m: &FreeElement) -> Result<Rational>;
}

pub struct Betweenness;
pub struct VertexOracle;
pub struct TriangleMoves;
pub struct BoundedDualLp;
pub struct Transport;
pub struct LipschitzDual;

impl Strategy for Betweenness {
    fn name(&self) -> &'static str {
        "betweenness"
    }
    fn summary(&self) -> &'static str {
        "extreme iff no third point is metrically between x and y"
    }
}

impl ExtremalityClassifier for Betweenness {
    fn is_extreme(&self, space: &Space, x: usize, y: usize) -> Result<bool> {
        Ok(classify_molecule(space, x, y)?.is_extreme())
    }
}

impl Strategy for VertexOracle {
    fn name(&self) -> &'static str {
        "vertex-oracle"
    }
    fn summary(&self) -> &'static str {
        "hull-membership LP against all other molecules"
    }
}

impl ExtremalityClassifier for VertexOracle {
    fn is_extreme(&self, space: &Space, x: usize, y: usize) -> Result<bool> {
        vertex_oracle(space, x, y)
    }
}

impl Strategy for TriangleMoves {
    fn name(&self) -> &'static str {
        "triangle-moves"
    }
    fn summary(&self) -> &'static str {
        "nu - mu as a nonnegative combination of triangle moves"
    }
}

impl PrecedenceDecider for TriangleMoves {
    fn precedes(&self, mu: &DeLeeuwMeasure, nu: &DeLeeuwMeasure) -> Result<bool> {
        Ok(matches!(precedes(mu, nu)?, Precedence::Precedes(_)))
    }
}

impl Strategy for BoundedDualLp {
    fn name(&self) -> &'static str {
        "bounded-dual-lp"
    }
    fn summary(&self) -> &'static str {
        "minimise <g, nu - mu> over the box-truncated cone G"
    }
}

impl PrecedenceDecider for BoundedDualLp {
    fn precedes(&self, mu: &DeLeeuwMeasure, nu: &DeLeeuwMeasure) -> Result<bool> {
        Ok(precedence_gap(mu, nu)?.0.is_zero())
    }
}

impl Strategy for Transport {
    fn name(&self) -> &'static str {
        "transport"
    }
    fn summary(&self) -> &'static str {
        "minimum-cost flow LP over ordered pairs"
    }
}

impl NormSolver for Transport {
    fn norm(&self, m: &FreeElement) -> Result<Rational> {
        Ok(free_norm(m)?.value)
    }
}

impl Strategy for LipschitzDual {
    fn name(&self) -> &'static str {
        "lipschitz-dual"
    }
    fn summary(&self) -> &'static str {
        "maximise <f, m> over 1-Lipschitz f vanishing at the base"
    }
}

impl NormSolver for LipschitzDual {
    fn norm(&self, m: &FreeElement) -> Result<Rational> {
        Ok(lipschitz_dual_value(m)?.0)
    }
}

/// Name-keyed collection of strategies of one family.
pub struct Registry<T: ?Sized> {
    entries: BTreeMap<&'static str, Box<T>>,
}

impl<T: ?Sized> fmt::Debug for Registry<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.entries.keys()).finish()
    }
}

impl<T: ?Sized> Default for Registry<T> {
    fn default() -> Self {
        Self {
            entries: BTreeMap::new(),
        }
    }
}

impl<T: Strategy + ?Sized> Registry<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, strategy: Box<T>) -> Result<()> {
        let name = strategy.name();
        if self.entries.contains_key(name) {
            return Err(Error::DuplicateStrategy(name.to_string()));
        }
        self.entries.insert(name, strategy);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Result<&T> {
        self.entries
            .get(name)
            .map(|b| b.as_ref())
            .ok_or_else(|| Error::UnknownStrategy(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.entries.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> + '_ {
        self.entries.values().map(|b| b.as_ref())
    }
}

pub fn extremality_classifiers() -> Registry<dyn ExtremalityClassifier> {
    let mut r = Registry::new();
    r.register(Box::new(Betweenness) as Box<dyn ExtremalityClassifier>).unwrap();
    r.register(Box::new(VertexOracle)).unwrap();
    r
}

pub fn precedence_deciders() -> Registry<dyn PrecedenceDecider> {
    let mut r = Registry::new();
    r.register(Box::new(TriangleMoves) as Box<dyn PrecedenceDecider>).unwrap();
    r.register(Box::new(BoundedDualLp)).unwrap();
    r
}

pub fn norm_solvers() -> Registry<dyn NormSolver> {
    let mut r = Registry::new();
    r.register(Box::new(Transport) as Box<dyn NormSolver>).unwrap();
    r.register(Box::new(LipschitzDual)).unwrap();
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::FiniteMetricSpace;
    use exactlp::int;
    use std::sync::Arc;

    fn line3() -> Space {
        Arc::new(FiniteMetricSpace::on_line(&[int(0), int(1), int(2)]).unwrap())
    }

    #[test]
    fn lookup_and_duplicates() {
        let mut r = extremality_classifiers();
        assert_eq!(r.names().collect::<Vec<_>>(), ["betweenness", "vertex-oracle"]);
        assert!(matches!(r.get("nope"), Err(Error::UnknownStrategy(_))));
        assert!(matches!(
            r.register(Box::new(Betweenness)),
            Err(Error::DuplicateStrategy(_))
        ));
    }

    #[test]
    fn classifiers_agree_on_line() {
        let s = line3();
        let r = extremality_classifiers();
        for (x, y) in s.pairs() {
            let answers: Vec<bool> = r.iter().map(|c| c.is_extreme(&s, x, y).unwrap()).collect();
            assert_eq!(answers[0], answers[1], "pair ({x}, {y})");
        }
    }

    #[test]
    fn norm_solvers_agree() {
        let s = line3();
        let m = FreeElement::from_coeffs(s, vec![int(0), int(2), int(-1)]).unwrap();
        let values: Vec<Rational> = norm_solvers().iter().map(|n| n.norm(&m).unwrap()).collect();
        assert_eq!(values, vec![int(2), int(2)]);
    }
}
