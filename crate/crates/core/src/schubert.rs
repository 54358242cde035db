//! Schubert normal forms of two-bridge knots and the words in the free group
//! on `g1`, `g2` derived from them.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SchubertError {
    #[error("invalid Schubert form ({p},{q}): {reason}")]
    InvalidForm { p: i64, q: i64, reason: String },
    #[error("no odd k with kq = ±1 mod 2p for ({p},{q})")]
    NotFound { p: i64, q: i64 },
    #[error("malformed word `{0}`")]
    MalformedWord(String),
}

/// Validated Schubert normal form `(p, q)`: both odd, coprime, `-p < q < p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SchubertForm {
    p: i64,
    q: i64,
}

impl SchubertForm {
    pub fn new(p: i64, q: i64) -> Result<Self, SchubertError> {
        validate(p, q)
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    /// `q = ±1`: the `(2, p)` torus knots. Every other form is hyperbolic.
    pub fn is_torus(&self) -> bool {
        self.q.abs() == 1
    }

    /// `ε_i = (-1)^floor(iq/p)` for `i = 1..p-1`, floor toward −∞.
    pub fn epsilon_sequence(&self) -> Vec<i32> {
        (1..self.p)
            .map(|i| {
                if Integer::div_floor(&(i * self.q), &self.p).is_even() {
                    1
                } else {
                    -1
                }
            })
            .collect()
    }

    /// `ε_i` with 1-based index.
    pub fn epsilon(&self, i: i64) -> i32 {
        if Integer::div_floor(&(i * self.q), &self.p).is_even() {
            1
        } else {
            -1
        }
    }

    /// The unique odd `0 < k < p` with `kq ≡ ±1 (mod 2p)`, with `ε_k`.
    ///
    /// Scans every `k` in range; returns `NotFound` if no odd solution or more
    /// than one exists, or if an even solution shows up.
    pub fn find_k(&self) -> Result<(i64, i32), SchubertError> {
        let modulus = 2 * self.p;
        let hits: Vec<i64> = (1..self.p)
            .filter(|k| {
                let r = (k * self.q).rem_euclid(modulus);
                r == 1 || r == modulus - 1
            })
            .collect();
        match hits.as_slice() {
            [k] if k % 2 == 1 => Ok((*k, self.epsilon(*k))),
            _ => Err(SchubertError::NotFound { p: self.p, q: self.q }),
        }
    }

    pub fn words(&self) -> Result<KnotWords, SchubertError> {
        build_words(self)
    }
}

impl fmt::Display for SchubertForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.p, self.q)
    }
}

pub fn validate(p: i64, q: i64) -> Result<SchubertForm, SchubertError> {
    let fail = |reason: &str| {
        Err(SchubertError::InvalidForm {
            p,
            q,
            reason: reason.to_string(),
        })
    };
    if p <= 0 {
        return fail("p must be positive");
    }
    if p % 2 == 0 {
        return fail("p must be odd");
    }
    if q % 2 == 0 {
        return fail("q must be odd");
    }
    if q <= -p || q >= p {
        return fail("q must satisfy -p < q < p");
    }
    if p.gcd(&q) != 1 {
        return fail("p and q must be coprime");
    }
    Ok(SchubertForm { p, q })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Generator {
    G1,
    G2,
}

impl Generator {
    pub fn swapped(self) -> Generator {
        match self {
            Generator::G1 => Generator::G2,
            Generator::G2 => Generator::G1,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Generator::G1 => 1,
            Generator::G2 => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Syllable {
    pub generator: Generator,
    /// `+1` or `-1`.
    pub exponent: i32,
}

impl Syllable {
    pub fn new(generator: Generator, exponent: i32) -> Self {
        debug_assert!(exponent == 1 || exponent == -1);
        Syllable { generator, exponent }
    }

    pub fn inverse(self) -> Self {
        Syllable {
            exponent: -self.exponent,
            ..self
        }
    }
}

/// Word in the free group on `g1`, `g2`, kept exactly as built (unreduced).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word {
    syllables: Vec<Syllable>,
}

impl Word {
    pub fn empty() -> Self {
        Word::default()
    }

    pub fn from_syllables(syllables: Vec<Syllable>) -> Self {
        Word { syllables }
    }

    pub fn generator(g: Generator, exponent: i32) -> Self {
        Word {
            syllables: vec![Syllable::new(g, exponent)],
        }
    }

    /// `g1^{f1} g2^{f2} g1^{f3} ...` starting with `first`.
    pub fn alternating(first: Generator, exponents: &[i32]) -> Self {
        let mut g = first;
        let mut syllables = Vec::with_capacity(exponents.len());
        for &e in exponents {
            syllables.push(Syllable::new(g, e));
            g = g.swapped();
        }
        Word { syllables }
    }

    pub fn syllables(&self) -> &[Syllable] {
        &self.syllables
    }

    pub fn len(&self) -> usize {
        self.syllables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word {
            syllables: self.syllables.iter().rev().map(|s| s.inverse()).collect(),
        }
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut syllables = self.syllables.clone();
        syllables.extend_from_slice(&other.syllables);
        Word { syllables }
    }

    pub fn prefix(&self, len: usize) -> Word {
        Word {
            syllables: self.syllables[..len].to_vec(),
        }
    }

    pub fn suffix_from(&self, start: usize) -> Word {
        Word {
            syllables: self.syllables[start..].to_vec(),
        }
    }

    /// Exchanges `g1` and `g2`.
    pub fn swap_generators(&self) -> Word {
        Word {
            syllables: self
                .syllables
                .iter()
                .map(|s| Syllable::new(s.generator.swapped(), s.exponent))
                .collect(),
        }
    }

    /// Cancels adjacent `x x^-1` pairs.
    pub fn free_reduce(&self) -> Word {
        let mut out: Vec<Syllable> = Vec::with_capacity(self.syllables.len());
        for s in &self.syllables {
            match out.last() {
                Some(last) if last.generator == s.generator && last.exponent == -s.exponent => {
                    out.pop();
                }
                _ => out.push(*s),
            }
        }
        Word { syllables: out }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.syllables.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self
            .syllables
            .iter()
            .map(|s| {
                let g = s.generator.index();
                if s.exponent == 1 {
                    format!("g{g}")
                } else {
                    format!("g{g}^-1")
                }
            })
            .collect();
        f.write_str(&parts.join(" "))
    }
}

impl FromStr for Word {
    type Err = SchubertError;

    /// Parses the text form produced by `Display`, e.g. `g1 g2^-1`; `1` or the
    /// empty string is the empty word.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let trimmed = s.trim();
        if trimmed.is_empty() || trimmed == "1" {
            return Ok(Word::empty());
        }
        let mut syllables = Vec::new();
        for tok in trimmed.split_whitespace() {
            let (gen, exp) = match tok.split_once('^') {
                Some((g, e)) => (g, e),
                None => (tok, "1"),
            };
            let generator = match gen {
                "g1" => Generator::G1,
                "g2" => Generator::G2,
                _ => return Err(SchubertError::MalformedWord(s.to_string())),
            };
            let exponent = match exp {
                "1" => 1,
                "-1" => -1,
                _ => return Err(SchubertError::MalformedWord(s.to_string())),
            };
            syllables.push(Syllable::new(generator, exponent));
        }
        Ok(Word { syllables })
    }
}

impl Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// All words attached to a Schubert form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnotWords {
    /// `g1^{ε1} g2^{ε2} ... g2^{ε_{p-1}}`.
    pub w: Word,
    /// First `k - 1` syllables of `w`.
    pub v: Word,
    /// Base-point change word: `v` if `ε_k = 1`, else `g2 v g1^{ε_k}`.
    pub v_prime: Word,
    /// Remaining syllables of `w`, so that `v y = w`.
    pub y: Word,
    /// `w` with `g1` and `g2` exchanged.
    pub w_dagger: Word,
    /// Relator `w g1 w^-1 g2^-1`.
    pub relator: Word,
}

pub fn build_words(form: &SchubertForm) -> Result<KnotWords, SchubertError> {
    let eps = form.epsilon_sequence();
    let (k, eps_k) = form.find_k()?;
    let split = (k - 1) as usize;

    let w = Word::alternating(Generator::G1, &eps);
    let v = w.prefix(split);
    let y = w.suffix_from(split);
    let v_prime = if eps_k == 1 {
        v.clone()
    } else {
        Word::generator(Generator::G2, 1)
            .concat(&v)
            .concat(&Word::generator(Generator::G1, eps_k))
    };
    let w_dagger = w.swap_generators();
    let relator = w
        .concat(&Word::generator(Generator::G1, 1))
        .concat(&w.inverse())
        .concat(&Word::generator(Generator::G2, -1));

    Ok(KnotWords {
        w,
        v,
        v_prime,
        y,
        w_dagger,
        relator,
    })
}

/// Every valid Schubert form with `p <= max_p`, in `(p, q)` order.
pub fn all_forms(max_p: i64) -> Vec<SchubertForm> {
    (1..=max_p)
        .step_by(2)
        .flat_map(|p| (-p + 1..p).filter_map(move |q| validate(p, q).ok()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn validation() {
        assert!(validate(5, 3).is_ok());
        assert!(validate(3, -1).is_ok());
        for (p, q) in [(4, 1), (9, 3), (5, 5), (5, -5), (-3, 1), (5, 2), (1, 1)] {
            assert!(
                matches!(validate(p, q), Err(SchubertError::InvalidForm { .. })),
                "({p},{q}) accepted"
            );
        }
    }

    #[test]
    fn epsilon_sequences() {
        assert_eq!(validate(3, 1).unwrap().epsilon_sequence(), vec![1, 1]);
        assert_eq!(validate(5, 3).unwrap().epsilon_sequence(), vec![1, -1, -1, 1]);
        assert_eq!(validate(7, 3).unwrap().epsilon_sequence(), vec![1, 1, -1, -1, 1, 1]);
        // floor toward -inf: floor(-1/5) = -1
        assert_eq!(validate(5, -1).unwrap().epsilon_sequence(), vec![-1; 4]);
    }

    #[test]
    fn special_index() {
        assert_eq!(validate(9, 1).unwrap().find_k().unwrap(), (1, 1));
        assert_eq!(validate(5, 3).unwrap().find_k().unwrap(), (3, -1));
        assert_eq!(validate(7, 3).unwrap().find_k().unwrap(), (5, 1));
        assert_eq!(validate(5, -1).unwrap().find_k().unwrap(), (1, -1));
    }

    #[test]
    fn trefoil_words() {
        let words = validate(3, 1).unwrap().words().unwrap();
        assert_eq!(words.w, w("g1 g2"));
        assert!(words.v.is_empty());
        assert_eq!(words.y, words.w);
        assert_eq!(words.v_prime, words.v);
        assert_eq!(words.relator, w("g1 g2 g1 g2^-1 g1^-1 g2^-1"));
    }

    #[test]
    fn figure_eight_words() {
        let words = validate(5, 3).unwrap().words().unwrap();
        assert_eq!(words.w, w("g1 g2^-1 g1^-1 g2"));
        assert_eq!(words.v, w("g1 g2^-1"));
        assert_eq!(words.v_prime, w("g2 g1 g2^-1 g1^-1"));
        assert_eq!(words.y, w("g1^-1 g2"));
        assert_eq!(words.w_dagger, w("g2 g1^-1 g2^-1 g1"));
        assert_eq!(words.w.to_string(), "g1 g2^-1 g1^-1 g2");
    }

    #[test]
    fn word_text_roundtrip_and_reduction() {
        let x = w("g1 g2^-1 g2 g1^-1 g2");
        assert_eq!(x.free_reduce(), w("g2"));
        assert_eq!(Word::empty().to_string(), "1");
        assert_eq!(w("1"), Word::empty());
        assert!("g3".parse::<Word>().is_err());
        assert!("g1^2".parse::<Word>().is_err());
        assert!(x.concat(&x.inverse()).free_reduce().is_empty());
    }

    #[test]
    fn v_times_y_is_w_up_to_99() {
        for form in all_forms(99) {
            let words = form.words().unwrap();
            assert_eq!(words.v.concat(&words.y), words.w, "{form}");
            assert_eq!(words.w.len() as i64, form.p() - 1);
        }
    }

    #[test]
    fn k_unique_and_odd_up_to_99() {
        for form in all_forms(99) {
            let (k, eps_k) = form.find_k().expect("k exists");
            assert_eq!(k % 2, 1);
            assert!(0 < k && k < form.p());
            assert_eq!(eps_k, form.epsilon(k));
            if form.is_torus() {
                assert_eq!(k, 1, "{form}");
            }
            // No even k solves the congruence.
            for even in (2..form.p()).step_by(2) {
                let r = (even * form.q()).rem_euclid(2 * form.p());
                assert!(r != 1 && r != 2 * form.p() - 1);
            }
        }
    }

    #[test]
    fn hyperbolic_sign_patterns_are_admissible() {
        let forbidden = [(1, 1, 1), (-1, -1, -1), (1, -1, 1), (-1, 1, -1)];
        for form in all_forms(99).into_iter().filter(|f| !f.is_torus()) {
            let (k, _) = form.find_k().unwrap();
            assert!(3 <= k && k <= form.p() - 2, "{form}: k={k}");
            let pattern = (form.epsilon(k - 1), form.epsilon(k), form.epsilon(k + 1));
            assert!(!forbidden.contains(&pattern), "{form}: {pattern:?}");
        }
    }
}
