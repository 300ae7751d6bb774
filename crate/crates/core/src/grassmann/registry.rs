use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use super::GrassmannError;

/// How a generator behaves under complex conjugation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Conjugation {
    /// `g* = -g`
    Imaginary,
    /// `g* = h` for the generator with the given index. Pairing a generator
    /// with itself makes it real.
    Paired(usize),
}

/// Ordered set of odd generators. The order is the canonical monomial order.
#[derive(Clone, PartialEq, Eq)]
pub struct GeneratorRegistry {
    names: Vec<String>,
    rules: Vec<Conjugation>,
    lookup: HashMap<String, usize>,
}

impl GeneratorRegistry {
    pub const MAX_GENERATORS: usize = 64;

    /// Builds a registry, checking name uniqueness and that conjugation is
    /// an involution.
    pub fn new<I, S>(generators: I) -> Result<Arc<Self>, GrassmannError>
    where
        I: IntoIterator<Item = (S, Conjugation)>,
        S: Into<String>,
    {
        let mut names = Vec::new();
        let mut rules = Vec::new();
        let mut lookup = HashMap::new();
        for (name, rule) in generators {
            let name = name.into();
            if lookup.insert(name.clone(), names.len()).is_some() {
                return Err(GrassmannError::DuplicateGenerator(name));
            }
            names.push(name);
            rules.push(rule);
        }
        if names.len() > Self::MAX_GENERATORS {
            return Err(GrassmannError::TooManyGenerators(names.len()));
        }
        for (i, rule) in rules.iter().enumerate() {
            if let Conjugation::Paired(j) = *rule {
                if j >= names.len() || rules[j] != Conjugation::Paired(i) {
                    return Err(GrassmannError::BadConjugation(names[i].clone()));
                }
            }
        }
        Ok(Arc::new(GeneratorRegistry { names, rules, lookup }))
    }

    /// Registry where every generator is real (`g* = g`).
    pub fn real<I, S>(names: I) -> Result<Arc<Self>, GrassmannError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self::new(
            names
                .into_iter()
                .enumerate()
                .map(|(i, n)| (n, Conjugation::Paired(i))),
        )
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, index: usize) -> &str {
        &self.names[index]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.lookup.get(name).copied()
    }

    pub fn require(&self, name: &str) -> Result<usize, GrassmannError> {
        self.index(name)
            .ok_or_else(|| GrassmannError::UnknownGenerator(name.to_string()))
    }

    pub fn rule(&self, index: usize) -> Conjugation {
        self.rules[index]
    }

    /// Same generators in the same order with the same rules.
    pub fn same_as(self: &Arc<Self>, other: &Arc<Self>) -> bool {
        Arc::ptr_eq(self, other) || **self == **other
    }
}

impl fmt::Debug for GeneratorRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.names.iter()).finish()
    }
}
