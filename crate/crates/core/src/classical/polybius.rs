use super::ClassicalError;

/// Which letter to emit for the shared I/J cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IjPreference {
    #[default]
    I,
    J,
}

/// 5×5 letter grid with I and J sharing one cell. Row and column
/// coordinates are 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolybiusGrid {
    rows: [[char; 5]; 5],
}

impl Default for PolybiusGrid {
    fn default() -> Self {
        Self::new("ABCDEFGHIKLMNOPQRSTUVWXYZ").expect("static grid")
    }
}

impl PolybiusGrid {
    /// Builds a grid from 25 letters in row-major order; `I` stands for the
    /// merged I/J cell and `J` must not appear.
    pub fn new(letters: &str) -> Result<Self, ClassicalError> {
        let letters: Vec<char> = letters.chars().collect();
        if letters.len() != 25 {
            return Err(ClassicalError::BadAlphabet(format!(
                "grid needs 25 letters, got {}",
                letters.len()
            )));
        }
        let mut seen = [false; 26];
        for &c in &letters {
            if !c.is_ascii_uppercase() || c == 'J' {
                return Err(ClassicalError::BadAlphabet(format!("bad grid letter {c:?}")));
            }
            let idx = (c as u8 - b'A') as usize;
            if seen[idx] {
                return Err(ClassicalError::BadAlphabet(format!("duplicate grid letter {c:?}")));
            }
            seen[idx] = true;
        }
        let mut rows = [[' '; 5]; 5];
        for (i, c) in letters.into_iter().enumerate() {
            rows[i / 5][i % 5] = c;
        }
        Ok(Self { rows })
    }

    pub fn letter(&self, row: usize, col: usize, pref: IjPreference) -> char {
        match (self.rows[row - 1][col - 1], pref) {
            ('I', IjPreference::J) => 'J',
            (c, _) => c,
        }
    }

    /// 1-based coordinates of a letter; `J` maps to the I cell.
    pub fn coordinates(&self, letter: char) -> Option<(usize, usize)> {
        let letter = if letter == 'J' { 'I' } else { letter };
        (0..25)
            .find(|&i| self.rows[i / 5][i % 5] == letter)
            .map(|i| (i / 5 + 1, i % 5 + 1))
    }
}

fn grid_digit(c: char) -> Result<usize, ClassicalError> {
    match c.to_digit(10) {
        Some(d @ 1..=5) => Ok(d as usize),
        Some(_) => Err(ClassicalError::OutOfGrid(c)),
        None => Err(ClassicalError::MalformedCiphertext(format!(
            "expected digit, found {c:?}"
        ))),
    }
}

/// Decodes a "digit digit dot" stream such as `21.42.24.15.33.14.`.
/// Whitespace is ignored.
pub fn polybius_decode(cipher: &str, grid: &PolybiusGrid, pref: IjPreference) -> Result<String, ClassicalError> {
    let chars: Vec<char> = cipher.chars().filter(|c| !c.is_whitespace()).collect();
    if chars.len() % 3 != 0 {
        return Err(ClassicalError::MalformedCiphertext(format!(
            "length {} is not a multiple of three",
            chars.len()
        )));
    }
    chars
        .chunks(3)
        .map(|g| {
            if g[2] != '.' {
                return Err(ClassicalError::MalformedCiphertext(format!(
                    "group {:?} does not end with a dot",
                    g.iter().collect::<String>()
                )));
            }
            Ok(grid.letter(grid_digit(g[0])?, grid_digit(g[1])?, pref))
        })
        .collect()
}

pub fn polybius_encode(plain: &str, grid: &PolybiusGrid) -> Result<String, ClassicalError> {
    let mut out = String::with_capacity(plain.len() * 3);
    for c in plain.chars() {
        let (r, col) = grid.coordinates(c).ok_or(ClassicalError::InvalidSymbol(c))?;
        out.push_str(&format!("{r}{col}."));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decode_examples() {
        let g = PolybiusGrid::default();
        assert_eq!(
            polybius_decode("21.42.24.15.33.14.", &g, IjPreference::I).unwrap(),
            "FRIEND"
        );
        assert_eq!(
            polybius_decode("21 . 42 . 24 . 15 . 33 . 14 .", &g, IjPreference::I).unwrap(),
            "FRIEND"
        );
        assert_eq!(
            polybius_decode("21.42.24.15.33.14.", &g, IjPreference::J).unwrap(),
            "FRJEND"
        );
        assert_eq!(polybius_decode("11.", &g, IjPreference::I).unwrap(), "A");
        assert_eq!(polybius_decode("55.51.", &g, IjPreference::I).unwrap(), "ZV");
        assert_eq!(polybius_decode("", &g, IjPreference::I).unwrap(), "");
    }

    #[test]
    fn decode_errors() {
        let g = PolybiusGrid::default();
        assert_eq!(
            polybius_decode("16.", &g, IjPreference::I),
            Err(ClassicalError::OutOfGrid('6'))
        );
        assert_eq!(
            polybius_decode("01.", &g, IjPreference::I),
            Err(ClassicalError::OutOfGrid('0'))
        );
        assert!(matches!(
            polybius_decode("11,", &g, IjPreference::I),
            Err(ClassicalError::MalformedCiphertext(_))
        ));
        assert!(matches!(
            polybius_decode("11.2", &g, IjPreference::I),
            Err(ClassicalError::MalformedCiphertext(_))
        ));
        assert!(matches!(
            polybius_decode("1a.", &g, IjPreference::I),
            Err(ClassicalError::MalformedCiphertext(_))
        ));
    }

    #[test]
    fn decode_inverts_encode_for_every_letter() {
        let g = PolybiusGrid::default();
        for c in 'A'..='Z' {
            let enc = polybius_encode(&c.to_string(), &g).unwrap();
            let pref = if c == 'J' { IjPreference::J } else { IjPreference::I };
            assert_eq!(polybius_decode(&enc, &g, pref).unwrap(), c.to_string());
        }
    }
}
