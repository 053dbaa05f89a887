//! Coxeter, Artin and one-relator presentations, their symmetrized relator
//! sets and the hypothesis thresholds of the minimization theorems.

use serde::Serialize;
use thiserror::Error;

use crate::words::{Alphabet, Letter, Mode, Word, WordError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PresentationError {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("exponent matrix must be {0}×{0}")]
    MatrixShape(usize),
    #[error("exponent matrix is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("exponent m({0}, {1}) = {2} is below 2")]
    ExponentTooSmall(usize, usize, u32),
    #[error("presentation is not of extra-large type (some m_ij < 4)")]
    NotExtraLarge,
    #[error("relator must be nonempty")]
    EmptyRelator,
    #[error("relator is not cyclically reduced")]
    RelatorNotCyclicallyReduced,
    #[error("relator is a proper power ({0}-th power)")]
    RelatorProperPower(usize),
    #[error("relator exponent must be at least 2")]
    RelatorExponent,
    #[error("generators must be distinct")]
    SelfPair,
    #[error("wrong generator mode for this presentation")]
    WrongMode,
}

/// `None` is `∞`.
pub type Exponent = Option<u32>;

/// Symmetric exponent table with absent entries for `∞`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExponentMatrix {
    n: usize,
    entries: Vec<Exponent>,
}

impl ExponentMatrix {
    pub fn infinite(n: usize) -> ExponentMatrix {
        ExponentMatrix { n, entries: vec![None; n * n] }
    }

    pub fn uniform(n: usize, m: u32) -> ExponentMatrix {
        let mut e = ExponentMatrix::infinite(n);
        for i in 0..n {
            for j in i + 1..n {
                e.set(i, j, Some(m));
            }
        }
        e
    }

    pub fn from_rows(rows: &[Vec<Exponent>]) -> Result<ExponentMatrix, PresentationError> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(PresentationError::MatrixShape(n));
        }
        let mut e = ExponentMatrix::infinite(n);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    if rows[i][j] != rows[j][i] {
                        return Err(PresentationError::NotSymmetric(i, j));
                    }
                    e.entries[i * n + j] = rows[i][j];
                }
            }
        }
        Ok(e)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn set(&mut self, i: usize, j: usize, m: Exponent) {
        assert!(i != j);
        self.entries[i * self.n + j] = m;
        self.entries[j * self.n + i] = m;
    }

    pub fn get(&self, i: usize, j: usize) -> Exponent {
        if i == j {
            None
        } else {
            self.entries[i * self.n + j]
        }
    }

    /// Pairs `i < j` with a finite exponent.
    pub fn finite_pairs(&self) -> Vec<(usize, usize, u32)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in i + 1..self.n {
                if let Some(m) = self.get(i, j) {
                    out.push((i, j, m));
                }
            }
        }
        out
    }

    pub fn min_finite(&self) -> Option<u32> {
        self.finite_pairs().iter().map(|p| p.2).min()
    }

    pub fn is_extra_large(&self) -> bool {
        self.finite_pairs().iter().all(|p| p.2 >= 4)
    }

    fn validate(&self) -> Result<(), PresentationError> {
        for (i, j, m) in self.finite_pairs() {
            if m < 2 {
                return Err(PresentationError::ExponentTooSmall(i, j, m));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoxeterPresentation {
    pub alphabet: Alphabet,
    pub m: ExponentMatrix,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArtinPresentation {
    pub alphabet: Alphabet,
    pub m: ExponentMatrix,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OneRelatorPresentation {
    pub alphabet: Alphabet,
    pub relator: Word,
    pub exponent: u32,
}

impl CoxeterPresentation {
    pub fn new(alphabet: Alphabet, m: ExponentMatrix) -> Result<Self, PresentationError> {
        if alphabet.mode != Mode::Involutive {
            return Err(PresentationError::WrongMode);
        }
        if m.size() != alphabet.len() {
            return Err(PresentationError::MatrixShape(alphabet.len()));
        }
        m.validate()?;
        Ok(CoxeterPresentation { alphabet, m })
    }

    /// `n` generators `a1 … an` with every pair at exponent `m`.
    pub fn uniform(n: usize, m: u32) -> Self {
        Self::new(Alphabet::numbered(n, Mode::Involutive), ExponentMatrix::uniform(n, m))
            .expect("valid uniform presentation")
    }

    pub fn mode(&self) -> Mode {
        Mode::Involutive
    }

    pub fn is_extra_large(&self) -> bool {
        self.m.is_extra_large()
    }

    /// The relator orbits `(a_i a_j)^{m_ij}`, one per finite pair.
    pub fn relator_orbits(&self) -> Result<Vec<RelatorOrbit>, PresentationError> {
        if !self.is_extra_large() {
            return Err(PresentationError::NotExtraLarge);
        }
        Ok(self
            .m
            .finite_pairs()
            .into_iter()
            .map(|(i, j, m)| {
                let base = alternating(i, j, 2 * m as usize);
                let rotations = base.cyclic_permutations(Mode::Involutive).expect("alternating");
                RelatorOrbit { i, j, m, rotations }
            })
            .collect())
    }

    /// Distinct words of the symmetrized relator set.
    pub fn symmetrized_relators(&self) -> Result<Vec<Word>, PresentationError> {
        let mut out: Vec<Word> = Vec::new();
        for orbit in self.relator_orbits()? {
            for r in orbit.rotations {
                if !out.contains(&r) {
                    out.push(r);
                }
            }
        }
        Ok(out)
    }

    pub fn separability_condition(&self) -> SeparabilityReport {
        let mut violations = Vec::new();
        for (i, j, m) in self.m.finite_pairs() {
            if m < 4 {
                violations.push(format!("m({},{}) = {m} < 4", i + 1, j + 1));
            }
            if m % 2 != 0 {
                violations.push(format!("m({},{}) = {m} is odd", i + 1, j + 1));
            }
        }
        let n = self.m.size();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let (Some(a), Some(b), Some(c)) =
                        (self.m.get(i, j), self.m.get(i, k), self.m.get(j, k))
                    else {
                        continue;
                    };
                    for (x, y, e) in [(i, j, a), (i, k, b), (j, k, c)] {
                        if e % 3 != 0 {
                            violations.push(format!(
                                "triangle {{{},{},{}}}: m({},{}) = {e} not divisible by 3",
                                i + 1,
                                j + 1,
                                k + 1,
                                x + 1,
                                y + 1
                            ));
                        }
                    }
                }
            }
        }
        SeparabilityReport { holds: violations.is_empty(), violations }
    }

    pub fn all_finite_even(&self) -> bool {
        self.m.finite_pairs().iter().all(|p| p.2 % 2 == 0)
    }
}

impl ArtinPresentation {
    pub fn new(alphabet: Alphabet, m: ExponentMatrix) -> Result<Self, PresentationError> {
        if alphabet.mode != Mode::FreeInverse {
            return Err(PresentationError::WrongMode);
        }
        if m.size() != alphabet.len() {
            return Err(PresentationError::MatrixShape(alphabet.len()));
        }
        m.validate()?;
        Ok(ArtinPresentation { alphabet, m })
    }

    pub fn uniform(n: usize, m: u32) -> Self {
        Self::new(Alphabet::numbered(n, Mode::FreeInverse), ExponentMatrix::uniform(n, m))
            .expect("valid uniform presentation")
    }

    pub fn mode(&self) -> Mode {
        Mode::FreeInverse
    }

    pub fn is_extra_large(&self) -> bool {
        self.m.is_extra_large()
    }

    /// Defining relator `u_ij · u_ji⁻¹`.
    pub fn defining_relator(&self, i: usize, j: usize) -> Option<Word> {
        let m = self.m.get(i, j)? as usize;
        Some(artin_relator(i, j, m))
    }
}

impl OneRelatorPresentation {
    pub fn new(alphabet: Alphabet, relator: Word, exponent: u32) -> Result<Self, PresentationError> {
        if alphabet.mode != Mode::FreeInverse {
            return Err(PresentationError::WrongMode);
        }
        relator.check_alphabet(&alphabet)?;
        if relator.is_empty() {
            return Err(PresentationError::EmptyRelator);
        }
        if !relator.is_cyclically_reduced(Mode::FreeInverse) {
            return Err(PresentationError::RelatorNotCyclicallyReduced);
        }
        if let Some((_, e)) = relator.is_proper_power() {
            return Err(PresentationError::RelatorProperPower(e));
        }
        if exponent < 2 {
            return Err(PresentationError::RelatorExponent);
        }
        Ok(OneRelatorPresentation { alphabet, relator, exponent })
    }

    pub fn mode(&self) -> Mode {
        Mode::FreeInverse
    }

    pub fn letter_bound(&self) -> usize {
        self.relator.letter_bound()
    }
}

/// All positional rotations of one Coxeter relator `(a_i a_j)^m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelatorOrbit {
    pub i: usize,
    pub j: usize,
    pub m: u32,
    pub rotations: Vec<Word>,
}

impl RelatorOrbit {
    pub fn distinct(&self) -> Vec<Word> {
        let mut out: Vec<Word> = Vec::new();
        for r in &self.rotations {
            if !out.contains(r) {
                out.push(r.clone());
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeparabilityReport {
    pub holds: bool,
    pub violations: Vec<String>,
}

/// `x y x y …` of the given length over generators `x`, `y` (positive letters).
pub fn alternating(x: usize, y: usize, len: usize) -> Word {
    (0..len).map(|t| Letter::pos(if t % 2 == 0 { x } else { y })).collect()
}

/// `u_ij`: the alternating positive word of `length` letters starting with `a_i`.
pub fn artin_side(i: usize, j: usize, length: usize) -> Result<Word, PresentationError> {
    if i == j {
        return Err(PresentationError::SelfPair);
    }
    if length == 0 {
        return Err(PresentationError::ExponentTooSmall(i, j, 0));
    }
    Ok(alternating(i, j, length))
}

/// `u_ij · u_ji⁻¹`, the Artin defining relator as one cyclic word.
pub fn artin_relator(i: usize, j: usize, m: usize) -> Word {
    let u = alternating(i, j, m);
    let v = alternating(j, i, m).invert(Mode::FreeInverse);
    u.concat(&v).free_reduce(Mode::FreeInverse)
}

/// Piece-length diagnostics of a finite symmetrized relator list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SmallCancellationReport {
    pub max_piece_length: usize,
    pub min_relator_length: usize,
    /// Largest `p` with `C(p)`; `None` when there are no nonempty pieces.
    pub c_condition: Option<usize>,
    /// `max_piece_length / min_relator_length`; `C'(λ)` holds iff this is `< λ`.
    pub piece_ratio: (usize, usize),
}

impl SmallCancellationReport {
    pub fn satisfies_c(&self, p: usize) -> bool {
        self.c_condition.map_or(true, |c| c >= p)
    }

    /// `C'(num/den)`.
    pub fn satisfies_c_prime(&self, num: usize, den: usize) -> bool {
        let (a, b) = self.piece_ratio;
        if b == 0 {
            return true;
        }
        a * den < num * b
    }
}

/// Longest common prefix over all pairs of distinct symmetrized relators.
pub fn compute_pieces(relators: &[Word]) -> SmallCancellationReport {
    let mut max_piece = 0;
    for (a, r1) in relators.iter().enumerate() {
        for r2 in &relators[a + 1..] {
            if r1 == r2 {
                continue;
            }
            let lcp = r1.iter().zip(r2.iter()).take_while(|(x, y)| x == y).count();
            max_piece = max_piece.max(lcp);
        }
    }
    let min_len = relators.iter().map(|r| r.len()).min().unwrap_or(0);
    let c_condition = (max_piece > 0).then(|| min_len.div_ceil(max_piece));
    SmallCancellationReport {
        max_piece_length: max_piece,
        min_relator_length: min_len,
        c_condition,
        piece_ratio: (max_piece, min_len),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Theorem {
    /// Coxeter, torsion-free or conjugate-free subgroups: `m ≥ 3k + 1`.
    A,
    /// Coxeter separability: `m ≥ 3k + 7` plus the Separability Condition.
    B,
    /// Artin: `m ≥ 5k`.
    C,
    /// One relator with torsion: `m ≥ b(6k − 2) + 2`.
    D,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ThresholdCheck {
    pub theorem: Theorem,
    pub required: u64,
    /// The smallest relevant exponent, `None` if every exponent is infinite.
    pub limiting: Option<u64>,
    pub limiting_pair: Option<(usize, usize)>,
    pub met: bool,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HypothesisReport {
    pub k: usize,
    pub checks: Vec<ThresholdCheck>,
}

impl HypothesisReport {
    pub fn check(&self, t: Theorem) -> Option<&ThresholdCheck> {
        self.checks.iter().find(|c| c.theorem == t)
    }

    pub fn met(&self, t: Theorem) -> bool {
        self.check(t).is_some_and(|c| c.met)
    }
}

fn matrix_check(m: &ExponentMatrix, theorem: Theorem, required: u64) -> ThresholdCheck {
    let limiting = m.finite_pairs().into_iter().min_by_key(|p| (p.2, p.0, p.1));
    ThresholdCheck {
        theorem,
        required,
        limiting: limiting.map(|p| p.2 as u64),
        limiting_pair: limiting.map(|p| (p.0, p.1)),
        met: limiting.map_or(true, |p| p.2 as u64 >= required),
        note: None,
    }
}

/// A presentation of any of the three families.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Presentation {
    Coxeter(CoxeterPresentation),
    Artin(ArtinPresentation),
    OneRelator(OneRelatorPresentation),
}

impl Presentation {
    pub fn alphabet(&self) -> &Alphabet {
        match self {
            Presentation::Coxeter(p) => &p.alphabet,
            Presentation::Artin(p) => &p.alphabet,
            Presentation::OneRelator(p) => &p.alphabet,
        }
    }

    pub fn mode(&self) -> Mode {
        self.alphabet().mode
    }

    pub fn family(&self) -> &'static str {
        match self {
            Presentation::Coxeter(_) => "coxeter",
            Presentation::Artin(_) => "artin",
            Presentation::OneRelator(_) => "one-relator",
        }
    }

    /// Per-theorem threshold report for rank `k`.
    pub fn hypothesis_thresholds(&self, k: usize) -> HypothesisReport {
        let k64 = k as u64;
        let mut checks = Vec::new();
        match self {
            Presentation::Coxeter(p) => {
                checks.push(matrix_check(&p.m, Theorem::A, 3 * k64 + 1));
                let mut b = matrix_check(&p.m, Theorem::B, 3 * k64 + 7);
                let sep = p.separability_condition();
                if !sep.holds {
                    b.met = false;
                    b.note = Some(format!("separability condition fails: {}", sep.violations.join("; ")));
                }
                checks.push(b);
            }
            Presentation::Artin(p) => checks.push(matrix_check(&p.m, Theorem::C, 5 * k64)),
            Presentation::OneRelator(p) => {
                let b = p.letter_bound() as u64;
                let required = b * (6 * k64).saturating_sub(2) + 2;
                let mut check = ThresholdCheck {
                    theorem: Theorem::D,
                    required,
                    limiting: Some(p.exponent as u64),
                    limiting_pair: None,
                    met: p.exponent as u64 >= required,
                    note: None,
                };
                if p.relator.len() == 1 {
                    check.met = false;
                    check.note = Some("relator of length one: the group is virtually free".into());
                }
                checks.push(check);
            }
        }
        if k < 2 {
            for c in &mut checks {
                c.note.get_or_insert_with(|| "k < 2: cyclic case, below the stated range".into());
            }
        }
        HypothesisReport { k, checks }
    }
}
