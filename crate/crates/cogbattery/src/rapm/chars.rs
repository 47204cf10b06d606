//! Character alphabet and the character-type taxonomy used by matrix rules.

use serde::{Deserialize, Serialize};

pub const LOWERCASE: &str = "abcdefghijklmnopqrstuvwxyz";
pub const UPPERCASE: &str = "ABCDEFGHIJKLMNOPQRSTUVWXYZ";
pub const DIGITS: &str = "0123456789";
pub const SYMBOLS: &str = "!@#$%&*?]";
const VOWELS_LOWER: &str = "aeiou";
const VOWELS_UPPER: &str = "AEIOU";

/// Every character a generated cell string may contain.
pub fn full_alphabet() -> impl Iterator<Item = char> {
    LOWERCASE
        .chars()
        .chain(UPPERCASE.chars())
        .chain(DIGITS.chars())
        .chain(SYMBOLS.chars())
}

/// One of the three coarse character sets a rule can restrict a string to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Charset {
    Letters,
    Digits,
    Symbols,
}

impl Charset {
    pub const ALL: [Charset; 3] = [Charset::Letters, Charset::Digits, Charset::Symbols];

    pub fn contains(self, c: char) -> bool {
        match self {
            Charset::Letters => c.is_ascii_alphabetic(),
            Charset::Digits => c.is_ascii_digit(),
            Charset::Symbols => SYMBOLS.contains(c),
        }
    }

    pub fn chars(self) -> Vec<char> {
        full_alphabet().filter(|&c| self.contains(c)).collect()
    }
}

/// Character classes that counting, positional and parity rules range over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CharType {
    LowercaseLetter,
    UppercaseLetter,
    Digit,
    Symbol,
    LowercaseVowel,
    UppercaseVowel,
    LowercaseConsonant,
    UppercaseConsonant,
    Vowel,
    Consonant,
    Uppercase,
    Lowercase,
}

impl CharType {
    pub const ALL: [CharType; 12] = [
        CharType::LowercaseLetter,
        CharType::UppercaseLetter,
        CharType::Digit,
        CharType::Symbol,
        CharType::LowercaseVowel,
        CharType::UppercaseVowel,
        CharType::LowercaseConsonant,
        CharType::UppercaseConsonant,
        CharType::Vowel,
        CharType::Consonant,
        CharType::Uppercase,
        CharType::Lowercase,
    ];

    pub fn matches(self, c: char) -> bool {
        match self {
            CharType::LowercaseLetter | CharType::Lowercase => c.is_ascii_lowercase(),
            CharType::UppercaseLetter | CharType::Uppercase => c.is_ascii_uppercase(),
            CharType::Digit => c.is_ascii_digit(),
            CharType::Symbol => SYMBOLS.contains(c),
            CharType::LowercaseVowel => VOWELS_LOWER.contains(c),
            CharType::UppercaseVowel => VOWELS_UPPER.contains(c),
            CharType::LowercaseConsonant => c.is_ascii_lowercase() && !VOWELS_LOWER.contains(c),
            CharType::UppercaseConsonant => c.is_ascii_uppercase() && !VOWELS_UPPER.contains(c),
            CharType::Vowel => VOWELS_LOWER.contains(c) || VOWELS_UPPER.contains(c),
            CharType::Consonant => {
                c.is_ascii_alphabetic() && !VOWELS_LOWER.contains(c) && !VOWELS_UPPER.contains(c)
            }
        }
    }

    pub fn members(self) -> Vec<char> {
        full_alphabet().filter(|&c| self.matches(c)).collect()
    }

    /// Number of characters of this type inside `s`.
    pub fn count_in(self, s: &str) -> usize {
        s.chars().filter(|&c| self.matches(c)).count()
    }

    /// Whether the two types share at least one character.
    pub fn overlaps(self, other: CharType) -> bool {
        full_alphabet().any(|c| self.matches(c) && other.matches(c))
    }

    /// Whether any character of this type belongs to `charset`.
    pub fn intersects_charset(self, charset: Charset) -> bool {
        full_alphabet().any(|c| self.matches(c) && charset.contains(c))
    }

    /// Whether every character of `charset` has this type.
    pub fn covers_charset(self, charset: Charset) -> bool {
        charset.chars().iter().all(|&c| self.matches(c))
    }
}
