//! Exact kernel for free Z-graded commutative algebras over a coefficient
//! field: polynomial even generators tensor Grassmann odd generators, with
//! Koszul-sign multiplication, derivations, and Leibniz-extended brackets.

mod bracket;
mod derivation;
mod element;

pub use bracket::{BracketStructure, Symmetry};
pub use derivation::Derivation;
pub use element::{Degree, GcaElement, Monomial};

use crate::error::{Error, Result};
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

/// Parity of a generator or a homogeneous element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of_degree(d: i64) -> Parity {
        if d.rem_euclid(2) == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn is_odd(self) -> bool {
        self == Parity::Odd
    }
}

/// A generator of a free graded commutative algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub degree: i64,
}

impl Generator {
    pub fn new(name: impl Into<String>, degree: i64) -> Self {
        Generator {
            name: name.into(),
            degree,
        }
    }

    /// Validates an explicitly declared parity against the degree.
    pub fn checked(name: impl Into<String>, degree: i64, parity: Parity) -> Result<Self> {
        let name = name.into();
        if Parity::of_degree(degree) != parity {
            return Err(Error::ParityMismatch { name, degree });
        }
        Ok(Generator { name, degree })
    }

    pub fn parity(&self) -> Parity {
        Parity::of_degree(self.degree)
    }
}

/// Index of a generator in a context's canonical order.
pub type GenId = u32;

#[derive(Debug)]
struct ContextData {
    name: String,
    gens: Vec<Generator>,
    by_name: HashMap<String, GenId>,
}

/// An immutable generator context. Generators are stored in canonical order:
/// even generators first, then odd ones, each group in declaration order.
/// Monomial normal forms sort factors by this order.
#[derive(Debug, Clone)]
pub struct Context(Arc<ContextData>);

impl Context {
    pub fn new(name: impl Into<String>, declared: Vec<Generator>) -> Result<Self> {
        let mut gens: Vec<Generator> = Vec::with_capacity(declared.len());
        for g in declared.iter().filter(|g| !g.parity().is_odd()) {
            gens.push(g.clone());
        }
        for g in declared.iter().filter(|g| g.parity().is_odd()) {
            gens.push(g.clone());
        }
        let mut by_name = HashMap::new();
        for (i, g) in gens.iter().enumerate() {
            if by_name.insert(g.name.clone(), i as GenId).is_some() {
                return Err(Error::DuplicateGenerator(g.name.clone()));
            }
        }
        Ok(Context(Arc::new(ContextData {
            name: name.into(),
            gens,
            by_name,
        })))
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn len(&self) -> usize {
        self.0.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.gens.is_empty()
    }

    pub fn generator(&self, id: GenId) -> &Generator {
        &self.0.gens[id as usize]
    }

    pub fn degree_of(&self, id: GenId) -> i64 {
        self.0.gens[id as usize].degree
    }

    pub fn parity_of(&self, id: GenId) -> Parity {
        self.0.gens[id as usize].parity()
    }

    pub fn lookup(&self, name: &str) -> Result<GenId> {
        self.0
            .by_name
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    pub fn ids(&self) -> impl Iterator<Item = GenId> {
        0..self.len() as GenId
    }

    pub fn same_as(&self, other: &Context) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.name == other.0.name && self.0.gens == other.0.gens)
    }

    pub fn check_same(&self, other: &Context) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(Error::ContextMismatch {
                expected: self.0.name.clone(),
                found: other.0.name.clone(),
            })
        }
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.name)
    }
}
