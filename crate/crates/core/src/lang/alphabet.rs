use std::collections::HashMap;
use std::fmt;

use super::LangError;

/// Index of a symbol within its alphabet.
pub type Sym = u32;

/// A finite, ordered set of symbol names.
#[derive(Clone)]
pub struct Alphabet {
    names: Vec<String>,
    index: HashMap<String, Sym>,
}

impl Alphabet {
    /// Builds an alphabet, rejecting duplicate names.
    pub fn new<I, S>(names: I) -> Result<Self, LangError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut out = Alphabet {
            names: Vec::new(),
            index: HashMap::new(),
        };
        for n in names {
            let n = n.into();
            if out.index.contains_key(&n) {
                return Err(LangError::DuplicateSymbol(n));
            }
            out.index.insert(n.clone(), out.names.len() as Sym);
            out.names.push(n);
        }
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Name of symbol `s`.
    pub fn name(&self, s: Sym) -> &str {
        &self.names[s as usize]
    }

    /// Looks a symbol up by name.
    pub fn index(&self, name: &str) -> Option<Sym> {
        self.index.get(name).copied()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// All symbols in declaration order.
    pub fn symbols(&self) -> impl Iterator<Item = Sym> {
        0..self.names.len() as Sym
    }

    /// Renders a word as space-separated names, or `eps` when empty.
    pub fn word(&self, w: &[Sym]) -> String {
        if w.is_empty() {
            "eps".to_string()
        } else {
            w.iter()
                .map(|&s| self.name(s))
                .collect::<Vec<_>>()
                .join(" ")
        }
    }
}

impl PartialEq for Alphabet {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names
    }
}

impl Eq for Alphabet {}

impl std::hash::Hash for Alphabet {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.names.hash(state)
    }
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.names).finish()
    }
}
