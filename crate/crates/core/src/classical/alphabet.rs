use super::ClassicalError;
use std::collections::HashMap;

/// An ordered symbol table with its inverse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<char>,
    codes: HashMap<char, usize>,
}

impl Alphabet {
    pub fn new(symbols: &str) -> Result<Self, ClassicalError> {
        let symbols: Vec<char> = symbols.chars().collect();
        let mut codes = HashMap::with_capacity(symbols.len());
        for (i, &c) in symbols.iter().enumerate() {
            if codes.insert(c, i).is_some() {
                return Err(ClassicalError::BadAlphabet(format!("duplicate symbol {c:?}")));
            }
        }
        if symbols.is_empty() {
            return Err(ClassicalError::BadAlphabet("empty".into()));
        }
        Ok(Self { symbols, codes })
    }

    /// `A..Z`, `0..9`, space: 37 symbols.
    pub fn latin37() -> Self {
        Self::new("ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789 ").expect("static alphabet")
    }

    /// `A..Z`, `0`, `1`, `,`, `!`: 30 symbols.
    pub fn latin30() -> Self {
        Self::new("ABCDEFGHIJKLMNOPQRSTUVWXYZ01,!").expect("static alphabet")
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn code(&self, c: char) -> Result<usize, ClassicalError> {
        self.codes.get(&c).copied().ok_or(ClassicalError::InvalidSymbol(c))
    }

    pub fn symbol(&self, code: usize) -> char {
        self.symbols[code]
    }

    pub fn encode(&self, text: &str) -> Result<Vec<usize>, ClassicalError> {
        text.chars().map(|c| self.code(c)).collect()
    }

    pub fn decode(&self, codes: &[usize]) -> String {
        codes.iter().map(|&c| self.symbols[c]).collect()
    }
}
