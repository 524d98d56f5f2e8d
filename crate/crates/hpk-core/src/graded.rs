//! Graded vector spaces over exact rationals: basis-indexed spaces, the
//! Koszul sign of a permutation, canonical symmetric words, sparse vectors,
//! and graded multilinear maps stored on canonical words.
//!
//! Signs are never hand-coded per term. Every reordering routes through
//! [`koszul_sign`], evaluated against the degree shift declared by the map
//! being applied.

use crate::scalar::Scalar;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::fmt;

/// Library-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("argument error: {0}")]
    Argument(String),
    #[error("arity {0} out of range (cap {1})")]
    ArityOutOfRange(usize, usize),
    #[error("structural error: {0}")]
    Structural(String),
    #[error("series failed to terminate within bound at weight {0}")]
    NonTermination(usize),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// One named basis element with an integer degree and an optional weight
/// (used by weight-graded algebras to bound formal series).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisElement {
    pub name: String,
    pub degree: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<i64>,
}

/// A finite ordered list of named basis elements. The construction order is
/// the canonical sort order for words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedBasisSpace {
    elements: Vec<BasisElement>,
    by_name: HashMap<String, usize>,
}

impl GradedBasisSpace {
    pub fn new(elements: Vec<BasisElement>) -> Result<Self> {
        let mut by_name = HashMap::new();
        for (i, e) in elements.iter().enumerate() {
            if by_name.insert(e.name.clone(), i).is_some() {
                return Err(Error::Argument(format!("duplicate basis name {:?}", e.name)));
            }
        }
        Ok(GradedBasisSpace { elements, by_name })
    }

    pub fn from_pairs(pairs: &[(&str, i64)]) -> Self {
        Self::new(
            pairs
                .iter()
                .map(|(n, d)| BasisElement {
                    name: n.to_string(),
                    degree: *d,
                    weight: None,
                })
                .collect(),
        )
        .expect("distinct names")
    }

    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    pub fn degree(&self, idx: usize) -> i64 {
        self.elements[idx].degree
    }

    pub fn weight(&self, idx: usize) -> i64 {
        self.elements[idx].weight.unwrap_or(1)
    }

    pub fn name(&self, idx: usize) -> &str {
        &self.elements[idx].name
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.by_name
            .get(name)
            .copied()
            .ok_or_else(|| Error::Argument(format!("unknown basis element {name:?}")))
    }

    pub fn elements(&self) -> &[BasisElement] {
        &self.elements
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> {
        0..self.elements.len()
    }

    pub fn degrees_of(&self, word: &[usize]) -> Vec<i64> {
        word.iter().map(|&i| self.degree(i)).collect()
    }
}

/// The Koszul sign of a permutation: the sign `eps` with
/// `v_{perm(1)} ⊙ … ⊙ v_{perm(n)} = eps · v_1 ⊙ … ⊙ v_n`
/// for elements of the given degrees. `perm` is 0-indexed: position `p` of
/// the permuted word holds the original element `perm[p]`.
pub fn koszul_sign(perm: &[usize], degrees: &[i64]) -> Result<i64> {
    if perm.len() != degrees.len() {
        return Err(Error::Argument(format!(
            "permutation length {} != degrees length {}",
            perm.len(),
            degrees.len()
        )));
    }
    let n = perm.len();
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::Argument("not a permutation".into()));
        }
        seen[p] = true;
    }
    // Count crossings of odd pairs: sorting the permuted word back to the
    // identity by adjacent transpositions, each swap of originals (i, j)
    // contributes (-1)^{|v_i||v_j|}.
    let mut sign = 1i64;
    let mut w: Vec<usize> = perm.to_vec();
    for i in 0..n {
        // Selection sort; each adjacent move is one Koszul transposition.
        let pos = (i..n).find(|&p| w[p] == i).unwrap();
        for p in (i..pos).rev() {
            if degrees[w[p]] % 2 != 0 && degrees[w[p + 1]] % 2 != 0 {
                sign = -sign;
            }
            w.swap(p, p + 1);
        }
    }
    Ok(sign)
}

/// The ordinary signature of a permutation (0-indexed).
pub fn perm_sign(perm: &[usize]) -> i64 {
    let n = perm.len();
    let mut w = perm.to_vec();
    let mut sign = 1i64;
    for i in 0..n {
        let pos = (i..n).find(|&p| w[p] == i).unwrap();
        for p in (i..pos).rev() {
            w.swap(p, p + 1);
            sign = -sign;
        }
    }
    sign
}

/// A canonical-form monomial in a graded symmetric algebra: sorted factors,
/// the Koszul sign produced by sorting, and a zero flag set when an
/// odd-degree factor repeats.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymWord {
    pub factors: Vec<usize>,
    pub sign: i64,
    pub zero: bool,
}

/// Sorts `word` into canonical (ascending basis) order, computing the Koszul
/// sign of the sorting permutation for the given degrees. Symmetric
/// convention: a repeated index of odd degree makes the word zero.
pub fn canonicalize_word(word: &[usize], space: &GradedBasisSpace) -> Result<SymWord> {
    for &i in word {
        if i >= space.dim() {
            return Err(Error::Argument(format!("basis index {i} out of range")));
        }
    }
    let degrees = space.degrees_of(word);
    Ok(canonicalize_with_degrees(word, &degrees, 0, false))
}

/// Canonicalization workhorse. `shift` is added to every degree before
/// parities are read off; `antisymmetric` selects the antisymmetric
/// convention (extra signature factor, zero on repeated even-shifted
/// factors, rather than repeated odd-shifted ones).
pub fn canonicalize_with_degrees(
    word: &[usize],
    degrees: &[i64],
    shift: i64,
    antisymmetric: bool,
) -> SymWord {
    let n = word.len();
    let shifted: Vec<i64> = degrees.iter().map(|d| d + shift).collect();
    // Stable insertion sort by basis index, tracking the Koszul sign of the
    // shifted degrees, and the signature when antisymmetric.
    let mut idx: Vec<usize> = (0..n).collect();
    let mut sign = 1i64;
    for i in 1..n {
        let mut j = i;
        while j > 0 && word[idx[j - 1]] > word[idx[j]] {
            if shifted[idx[j - 1]] % 2 != 0 && shifted[idx[j]] % 2 != 0 {
                sign = -sign;
            }
            if antisymmetric {
                sign = -sign;
            }
            idx.swap(j - 1, j);
            j -= 1;
        }
    }
    let factors: Vec<usize> = idx.iter().map(|&p| word[p]).collect();
    let mut zero = false;
    for k in 1..n {
        if factors[k] == factors[k - 1] {
            let parity = shifted[idx[k]].rem_euclid(2);
            // Repeated odd factors square to zero in the symmetric
            // convention; repeated even factors do in the antisymmetric one.
            if (!antisymmetric && parity == 1) || (antisymmetric && parity == 0) {
                zero = true;
            }
        }
    }
    SymWord { factors, sign, zero }
}

/// A sparse linear combination with exact coefficients, indexed by any
/// ordered key (basis indices, words, monomials). Zero coefficients are
/// never stored.
#[derive(Clone, PartialEq, Eq)]
pub struct Vector<K: Ord + Clone> {
    terms: BTreeMap<K, Scalar>,
}

pub type Vec1 = Vector<usize>;
pub type WordVector = Vector<Vec<usize>>;

impl<K: Ord + Clone> Default for Vector<K> {
    fn default() -> Self {
        Vector { terms: BTreeMap::new() }
    }
}

impl<K: Ord + Clone> Vector<K> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn single(key: K, coeff: Scalar) -> Self {
        let mut v = Self::zero();
        v.add_term(key, coeff);
        v
    }

    pub fn basis(key: K) -> Self {
        Self::single(key, Scalar::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, key: &K) -> Scalar {
        self.terms.get(key).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn add_term(&mut self, key: K, coeff: Scalar) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += &coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (k, c) in &other.terms {
            self.add_term(k.clone(), c.clone());
        }
    }

    pub fn sub_assign(&mut self, other: &Self) {
        for (k, c) in &other.terms {
            self.add_term(k.clone(), -c);
        }
    }

    pub fn scaled(&self, s: &Scalar) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        Vector {
            terms: self.terms.iter().map(|(k, c)| (k.clone(), c * s)).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scaled(&-Scalar::one())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &Scalar)> {
        self.terms.iter()
    }

    pub fn into_iter_terms(self) -> impl Iterator<Item = (K, Scalar)> {
        self.terms.into_iter()
    }

    pub fn map_keys<K2: Ord + Clone>(&self, f: impl Fn(&K) -> K2) -> Vector<K2> {
        let mut out = Vector::zero();
        for (k, c) in &self.terms {
            out.add_term(f(k), c.clone());
        }
        out
    }

    pub fn sum(items: impl IntoIterator<Item = Self>) -> Self {
        let mut out = Self::zero();
        for v in items {
            out.add_assign(&v);
        }
        out
    }
}

impl<K: Ord + Clone + fmt::Debug> fmt::Debug for Vector<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}·{k:?}")?;
        }
        Ok(())
    }
}

/// Symmetry convention of a multilinear map: Koszul signs are evaluated at
/// `degree + degree_shift`, antisymmetric maps pick up an extra signature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Symmetry {
    /// Graded symmetric after shifting degrees by `degree_shift`.
    Symmetric { degree_shift: i64 },
    /// Graded antisymmetric after shifting degrees by `degree_shift`.
    Antisymmetric { degree_shift: i64 },
}

impl Symmetry {
    pub fn shift(&self) -> i64 {
        match self {
            Symmetry::Symmetric { degree_shift } | Symmetry::Antisymmetric { degree_shift } => {
                *degree_shift
            }
        }
    }

    pub fn is_antisymmetric(&self) -> bool {
        matches!(self, Symmetry::Antisymmetric { .. })
    }

    pub fn canonicalize(&self, word: &[usize], space: &GradedBasisSpace) -> SymWord {
        let degrees = space.degrees_of(word);
        canonicalize_with_degrees(word, &degrees, self.shift(), self.is_antisymmetric())
    }
}

/// A graded multilinear map of fixed arity and degree, stored sparsely on
/// canonical input words. Evaluation on an arbitrary ordering routes through
/// the Koszul sign of the canonicalizing permutation.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiMap {
    pub arity: usize,
    pub degree: i64,
    pub symmetry: Symmetry,
    entries: BTreeMap<Vec<usize>, Vec1>,
}

impl MultiMap {
    pub fn new(arity: usize, degree: i64, symmetry: Symmetry) -> Self {
        assert!(arity >= 1, "arity must be at least 1");
        MultiMap {
            arity,
            degree,
            symmetry,
            entries: BTreeMap::new(),
        }
    }

    /// Inserts (accumulates) a value on the canonical form of `word`.
    pub fn add_entry(&mut self, word: &[usize], value: Vec1, space: &GradedBasisSpace) {
        assert_eq!(word.len(), self.arity, "wrong arity");
        let canon = self.symmetry.canonicalize(word, space);
        if canon.zero {
            return;
        }
        let scaled = value.scaled(&Scalar::from_int(canon.sign));
        match self.entries.entry(canon.factors) {
            std::collections::btree_map::Entry::Vacant(e) => {
                if !scaled.is_zero() {
                    e.insert(scaled);
                }
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                e.get_mut().add_assign(&scaled);
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// Koszul-signed lookup; zero for words with the zero flag set.
    pub fn eval(&self, word: &[usize], space: &GradedBasisSpace) -> Vec1 {
        assert_eq!(word.len(), self.arity, "wrong arity");
        let canon = self.symmetry.canonicalize(word, space);
        if canon.zero {
            return Vec1::zero();
        }
        match self.entries.get(&canon.factors) {
            None => Vec1::zero(),
            Some(v) => v.scaled(&Scalar::from_int(canon.sign)),
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<usize>, &Vec1)> {
        self.entries.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Checks the degree bookkeeping `|output| = sum |inputs| + degree` on
    /// every stored entry; returns offenders.
    pub fn degree_violations(&self, space: &GradedBasisSpace, out_space: &GradedBasisSpace) -> Vec<Vec<usize>> {
        let mut bad = Vec::new();
        for (word, value) in &self.entries {
            let want: i64 = word.iter().map(|&i| space.degree(i)).sum::<i64>() + self.degree;
            for (k, _) in value.iter() {
                if out_space.degree(*k) != want {
                    bad.push(word.clone());
                    break;
                }
            }
        }
        bad
    }
}

/// The décalage sign `eps = sum_{i=1}^n (n-i)(alpha_i + k)` relating the
/// antisymmetric bracket `lambda_n` on `A[-k]` to the symmetric Taylor
/// coefficient `q_n` on `A[1-k]`: `q_n = (-1)^eps lambda_n` entrywise.
pub fn decalage_sign(degrees: &[i64], k: i64) -> i64 {
    let n = degrees.len() as i64;
    let mut eps = 0i64;
    for (i, &a) in degrees.iter().enumerate() {
        eps += (n - 1 - i as i64) * (a + k);
    }
    eps
}

/// Converts an antisymmetric bracket `lambda_n` (declared antisymmetric
/// after shift `k`) into the symmetric Taylor coefficient `q_n` (symmetric
/// after shift `k-1`), entrywise via the décalage sign.
pub fn decalage(map: &MultiMap, k: i64, space: &GradedBasisSpace) -> Result<MultiMap> {
    match map.symmetry {
        Symmetry::Antisymmetric { degree_shift } if degree_shift == k => {}
        _ => {
            return Err(Error::Argument(format!(
                "décalage expects a map antisymmetric after shift {k}, got {:?}",
                map.symmetry
            )))
        }
    }
    let mut out = MultiMap::new(map.arity, map.degree, Symmetry::Symmetric { degree_shift: k - 1 });
    for (word, value) in map.entries() {
        let degrees = space.degrees_of(word);
        let eps = decalage_sign(&degrees, k);
        out.add_entry(word, value.scaled(&Scalar::sign_pow(eps)), space);
    }
    Ok(out)
}

/// Inverse of [`decalage`]: recovers `lambda_n` from `q_n` exactly (the sign
/// squares to one).
pub fn inverse_decalage(map: &MultiMap, k: i64, space: &GradedBasisSpace) -> Result<MultiMap> {
    match map.symmetry {
        Symmetry::Symmetric { degree_shift } if degree_shift == k - 1 => {}
        _ => {
            return Err(Error::Argument(format!(
                "inverse décalage expects a map symmetric after shift {}, got {:?}",
                k - 1,
                map.symmetry
            )))
        }
    }
    let mut out = MultiMap::new(map.arity, map.degree, Symmetry::Antisymmetric { degree_shift: k });
    for (word, value) in map.entries() {
        let degrees = space.degrees_of(word);
        let eps = decalage_sign(&degrees, k);
        out.add_entry(word, value.scaled(&Scalar::sign_pow(eps)), space);
    }
    Ok(out)
}

/// All `(r, s)`-shuffles of `{0, …, r+s-1}`: permutations increasing on the
/// first `r` and the last `s` positions. Returned as 0-indexed permutation
/// arrays (position -> original index).
pub fn shuffles(r: usize, s: usize) -> Vec<Vec<usize>> {
    let n = r + s;
    let mut out = Vec::new();
    // Choose which positions of the original word land in the first block.
    let mut choice: Vec<usize> = (0..r).collect();
    loop {
        let mut perm = Vec::with_capacity(n);
        perm.extend_from_slice(&choice);
        let in_first: Vec<bool> = {
            let mut v = vec![false; n];
            for &c in &choice {
                v[c] = true;
            }
            v
        };
        perm.extend((0..n).filter(|&i| !in_first[i]));
        out.push(perm);
        // Next combination.
        if r == 0 {
            break;
        }
        let mut i = r;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if choice[i] < n - (r - i) {
                choice[i] += 1;
                for j in i + 1..r {
                    choice[j] = choice[j - 1] + 1;
                }
                break;
            }
        }
    }
    out
}

/// Multi-shuffles `Sh(i_1, …, i_p)`: permutations of `{0, …, n-1}` that are
/// increasing within each consecutive block of the given sizes.
pub fn multi_shuffles(block_sizes: &[usize]) -> Vec<Vec<usize>> {
    let n: usize = block_sizes.iter().sum();
    let mut out = Vec::new();
    let mut current: Vec<Vec<usize>> = vec![Vec::new(); block_sizes.len()];
    fn rec(
        pos: usize,
        n: usize,
        sizes: &[usize],
        current: &mut Vec<Vec<usize>>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if pos == n {
            let mut perm = Vec::with_capacity(n);
            for b in current.iter() {
                perm.extend_from_slice(b);
            }
            out.push(perm);
            return;
        }
        for b in 0..sizes.len() {
            if current[b].len() < sizes[b] {
                current[b].push(pos);
                rec(pos + 1, n, sizes, current, out);
                current[b].pop();
                // Identical adjacent block sizes still yield distinct
                // shuffles; no dedup here, Sh counts ordered blocks.
            }
        }
    }
    rec(0, n, block_sizes, &mut current, &mut out);
    out
}

/// All compositions `(i_1, …, i_p)` of `n` with `i_1..i_{p-1} >= 1` and
/// `i_p >= 0`, for a fixed number of parts `p`.
pub fn compositions_last_may_vanish(n: usize, p: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; p];
    fn rec(n_left: usize, part: usize, p: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if part == p - 1 {
            cur[part] = n_left;
            out.push(cur.clone());
            return;
        }
        for v in 1..=n_left.saturating_sub(p - 2 - part) {
            cur[part] = v;
            rec(n_left - v, part + 1, p, cur, out);
        }
    }
    if p == 0 {
        return out;
    }
    if p == 1 {
        return vec![vec![n]];
    }
    rec(n, 0, p, &mut cur, &mut out);
    out
}

/// All ways to split the index set `{0,…,n-1}` into `m` unordered nonempty
/// blocks, returned with blocks sorted internally and ordered by their
/// minimal element (a canonical ordered representative of each unordered
/// partition).
pub fn set_partitions(n: usize, m: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    fn rec(i: usize, n: usize, m: usize, blocks: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if i == n {
            if blocks.len() == m {
                out.push(blocks.clone());
            }
            return;
        }
        // Element i joins an existing block or opens a new one. Blocks stay
        // ordered by minimal element because new blocks open in order.
        for b in 0..blocks.len() {
            blocks[b].push(i);
            rec(i + 1, n, m, blocks, out);
            blocks[b].pop();
        }
        if blocks.len() < m {
            blocks.push(vec![i]);
            rec(i + 1, n, m, blocks, out);
            blocks.pop();
        }
    }
    rec(0, n, m, &mut blocks, &mut out);
    out
}

/// Koszul sign (at the given degree shift) of the unshuffle sending the word
/// `0..n` to the concatenation of `blocks` (each block increasing).
pub fn block_koszul_sign(blocks: &[Vec<usize>], degrees: &[i64], shift: i64) -> i64 {
    let perm: Vec<usize> = blocks.iter().flatten().copied().collect();
    let shifted: Vec<i64> = degrees.iter().map(|d| d + shift).collect();
    koszul_sign(&perm, &shifted).expect("valid block permutation")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn space_odd3() -> GradedBasisSpace {
        GradedBasisSpace::from_pairs(&[("a", 1), ("b", 2), ("c", 1)])
    }

    #[test]
    fn koszul_identity() {
        assert_eq!(koszul_sign(&[0, 1, 2], &[1, 5, -3]).unwrap(), 1);
    }

    #[test]
    fn koszul_odd_swap() {
        assert_eq!(koszul_sign(&[1, 0], &[1, 1]).unwrap(), -1);
        assert_eq!(koszul_sign(&[1, 0], &[1, 2]).unwrap(), 1);
        assert_eq!(koszul_sign(&[1, 0], &[2, 4]).unwrap(), 1);
    }

    #[test]
    fn koszul_three_cycle() {
        // v3 v1 v2 with degrees (1,2,1): moving v3 left past v2 (odd·even)
        // then v1 (odd·odd) gives -1. Frozen from the adjacent-transposition
        // oracle below.
        assert_eq!(koszul_sign(&[2, 0, 1], &[1, 2, 1]).unwrap(), -1);
    }

    /// Brute-force oracle: multiply adjacent-transposition signs directly.
    fn koszul_oracle(perm: &[usize], degrees: &[i64]) -> i64 {
        let mut w: Vec<usize> = perm.to_vec();
        let mut sign = 1i64;
        loop {
            let mut swapped = false;
            for i in 0..w.len().saturating_sub(1) {
                if w[i] > w[i + 1] {
                    if degrees[w[i]] % 2 != 0 && degrees[w[i + 1]] % 2 != 0 {
                        sign = -sign;
                    }
                    w.swap(i, i + 1);
                    swapped = true;
                }
            }
            if !swapped {
                return sign;
            }
        }
    }

    #[test]
    fn koszul_matches_oracle_exhaustive_n4() {
        // Group-homomorphism style consistency, exhaustively for n <= 4.
        fn perms(n: usize) -> Vec<Vec<usize>> {
            if n == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for p in perms(n - 1) {
                for pos in 0..=p.len() {
                    let mut q = p.clone();
                    q.insert(pos, n - 1);
                    out.push(q);
                }
            }
            out
        }
        let degree_sets: Vec<Vec<i64>> = vec![
            vec![1, 1, 1, 1],
            vec![0, 1, 2, 3],
            vec![-1, 1, -2, 5],
            vec![2, 2, 2, 2],
        ];
        for n in 1..=4 {
            for perm in perms(n) {
                for ds in &degree_sets {
                    let degs = &ds[..n];
                    assert_eq!(
                        koszul_sign(&perm, degs).unwrap(),
                        koszul_oracle(&perm, degs),
                        "perm {perm:?} degs {degs:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn koszul_composition_law() {
        // sign(sigma tau) = sign(sigma on permuted degrees)·sign(tau),
        // checked exhaustively for n <= 4 over a fixed degree list.
        fn perms(n: usize) -> Vec<Vec<usize>> {
            let mut out = vec![vec![]];
            for k in 0..n {
                let mut next = Vec::new();
                for p in out {
                    for pos in 0..=p.len() {
                        let mut q = p.clone();
                        q.insert(pos, k);
                        next.push(q);
                    }
                }
                out = next;
            }
            out
        }
        let degs = [1i64, 2, 1, 1];
        for n in 1..=4usize {
            let ps = perms(n);
            for s in &ps {
                for t in &ps {
                    // Composite: first permute by t, then by s.
                    let st: Vec<usize> = s.iter().map(|&i| t[i]).collect();
                    let degs_t: Vec<i64> = t.iter().map(|&i| degs[i]).collect();
                    let lhs = koszul_sign(&st, &degs[..n]).unwrap();
                    let rhs = koszul_sign(s, &degs_t).unwrap() * koszul_sign(t, &degs[..n]).unwrap();
                    assert_eq!(lhs, rhs, "s={s:?} t={t:?}");
                }
            }
        }
    }

    #[test]
    fn canonicalize_examples() {
        let sp = GradedBasisSpace::from_pairs(&[("a", 2), ("b", 4)]);
        let w = canonicalize_word(&[1, 0], &sp).unwrap();
        assert_eq!((w.factors.as_slice(), w.sign, w.zero), (&[0usize, 1][..], 1, false));

        let sp_odd = GradedBasisSpace::from_pairs(&[("a", 1), ("b", 3)]);
        let w = canonicalize_word(&[1, 0], &sp_odd).unwrap();
        assert_eq!((w.factors.as_slice(), w.sign, w.zero), (&[0usize, 1][..], -1, false));

        let w = canonicalize_word(&[0, 0], &sp_odd).unwrap();
        assert!(w.zero);
    }

    #[test]
    fn canonicalize_is_idempotent() {
        let sp = space_odd3();
        let w = canonicalize_word(&[2, 1, 0, 2], &sp).unwrap();
        let again = canonicalize_word(&w.factors, &sp).unwrap();
        assert_eq!(again.sign, 1);
        assert_eq!(again.factors, w.factors);
    }

    #[test]
    fn multimap_koszul_consistency() {
        let sp = space_odd3();
        let mut m = MultiMap::new(2, 0, Symmetry::Symmetric { degree_shift: 0 });
        m.add_entry(&[0, 2], Vec1::basis(1), &sp);
        // Evaluating on the swapped word picks up (-1)^{1·1}.
        let v1 = m.eval(&[0, 2], &sp);
        let v2 = m.eval(&[2, 0], &sp);
        assert_eq!(v1, v2.neg());
    }

    #[test]
    fn decalage_unary_is_identity() {
        let sp = space_odd3();
        let mut l1 = MultiMap::new(1, 1, Symmetry::Antisymmetric { degree_shift: 1 });
        l1.add_entry(&[0], Vec1::basis(1), &sp);
        let q1 = decalage(&l1, 1, &sp).unwrap();
        assert_eq!(q1.eval(&[0], &sp), Vec1::basis(1));
    }

    #[test]
    fn decalage_binary_sign() {
        // n = 2, k = 1, degrees (0,0): eps = (2-1)(0+1) = 1, so q2 = -l2.
        let sp = GradedBasisSpace::from_pairs(&[("x", 0), ("y", 0), ("z", 0)]);
        let mut l2 = MultiMap::new(2, 1, Symmetry::Antisymmetric { degree_shift: 1 });
        l2.add_entry(&[0, 1], Vec1::basis(2), &sp);
        let q2 = decalage(&l2, 1, &sp).unwrap();
        assert_eq!(q2.eval(&[0, 1], &sp), Vec1::basis(2).neg());
    }

    #[test]
    fn shuffle_counts() {
        assert_eq!(shuffles(2, 1).len(), 3);
        assert_eq!(shuffles(0, 3).len(), 1);
        assert_eq!(shuffles(3, 2).len(), 10);
        // sum over i of C(n, i) terms at arity n+1
        let n = 4;
        let total: usize = (0..=n).map(|i| shuffles(i, n - i).len()).sum();
        assert_eq!(total, 16);
        assert_eq!(multi_shuffles(&[2, 1]).len(), 3);
        assert_eq!(multi_shuffles(&[1, 1, 1]).len(), 6);
        assert_eq!(multi_shuffles(&[2, 2, 0]).len(), 6);
    }

    #[test]
    fn compositions() {
        // i_1 >= 1, i_2 >= 0 summing to 3: (1,2),(2,1),(3,0)
        assert_eq!(compositions_last_may_vanish(3, 2).len(), 3);
        // p=3, n=3: (1,1,1),(1,2,0),(2,1,0)
        let c = compositions_last_may_vanish(3, 3);
        assert!(c.contains(&vec![1, 1, 1]));
        assert!(c.contains(&vec![1, 2, 0]));
        assert!(c.contains(&vec![2, 1, 0]));
        assert_eq!(c.len(), 3);
    }

    #[test]
    fn set_partition_counts() {
        assert_eq!(set_partitions(4, 2).len(), 7);
        assert_eq!(set_partitions(4, 1).len(), 1);
        assert_eq!(set_partitions(4, 4).len(), 1);
        let total: usize = (1..=4).map(|m| set_partitions(4, m).len()).sum();
        assert_eq!(total, 15); // Bell(4)
    }

    proptest! {
        #[test]
        fn decalage_roundtrip(degs in proptest::collection::vec(-2i64..3, 3), k in -1i64..2) {
            let sp = GradedBasisSpace::new(
                degs.iter().enumerate().map(|(i, d)| BasisElement {
                    name: format!("g{i}"), degree: *d, weight: None,
                }).collect()).unwrap();
            let mut l = MultiMap::new(2, 0, Symmetry::Antisymmetric { degree_shift: k });
            l.add_entry(&[0, 1], Vec1::basis(2), &sp);
            l.add_entry(&[1, 2], Vec1::basis(0), &sp);
            let q = decalage(&l, k, &sp).unwrap();
            let back = inverse_decalage(&q, k, &sp).unwrap();
            for w in [[0usize,1],[1,2],[0,2]] {
                prop_assert_eq!(l.eval(&w, &sp), back.eval(&w, &sp));
            }
        }

        #[test]
        fn multimap_eval_canonical_agrees(seed in 0u64..1000) {
            let sp = space_odd3();
            let mut m = MultiMap::new(3, 0, Symmetry::Symmetric { degree_shift: 0 });
            m.add_entry(&[0, 1, 2], Vec1::basis((seed % 3) as usize), &sp);
            let word = [2usize, 0, 1];
            let canon = canonicalize_word(&word, &sp).unwrap();
            let direct = m.eval(&word, &sp);
            let via_canon = m.eval(&canon.factors, &sp).scaled(&Scalar::from_int(canon.sign));
            prop_assert_eq!(direct, via_canon);
        }
    }
}
