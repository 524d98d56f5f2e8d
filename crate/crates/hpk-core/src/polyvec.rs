//! Shifted polyvector fields on a graded vector space.
//!
//! An `n`-shifted `m`-polyvector field is an `m`-fold multiderivation of the
//! function algebra, graded symmetric at degree shift `n+1`. The shifted
//! Schouten bracket is the graded commutator of insertion composition, the
//! Maurer–Cartan equation characterizes shifted derived Poisson structures,
//! and homological vector fields on `L[1]` correspond to L-infinity
//! algebroid structures through derived brackets.
//!
//! Every convention-carrying sign (`star`, `flat`, `sharp`, `dagger`) lives
//! in one place, `signs`, and is validated through the equivalence of the
//! Maurer–Cartan and generalized-Jacobi checkers rather than trusted.

use crate::algebra::FreeGCA;
use crate::graded::{
    canonicalize_with_degrees, shuffles, BasisElement, Error, GradedBasisSpace, MultiMap, Result,
    Symmetry, Vec1,
};
use crate::linf::{Bracket, DerivedPoissonStructure, LInfStructure};
use crate::scalar::Scalar;
use std::collections::HashMap;
use std::sync::{Arc, RwLock};

/// Sign conventions for the conversions between bracket and polyvector
/// presentations.
pub mod signs {
    /// `pi_l(f_1,…,f_l) = (-1)^star lambda_l(f_1,…,f_l)` with
    /// `star = (l-1)|f_1|^{[k]} + (l-2)|f_2|^{[k]} + … + |f_{l-1}|^{[k]}`.
    pub fn star(shifted_degrees: &[i64]) -> i64 {
        let l = shifted_degrees.len() as i64;
        shifted_degrees
            .iter()
            .enumerate()
            .map(|(i, d)| (l - 1 - i as i64) * d)
            .sum()
    }

    /// Anchor extraction sign: `flat = l|a_1| + (l-1)|a_2| + … + |a_l|`.
    pub fn flat(degrees: &[i64]) -> i64 {
        let l = degrees.len() as i64;
        degrees
            .iter()
            .enumerate()
            .map(|(i, d)| (l - i as i64) * d)
            .sum()
    }

    /// Bracket extraction sign: `sharp = (l-1)|a_1| + … + |a_{l-1}|`.
    pub fn sharp(degrees: &[i64]) -> i64 {
        let l = degrees.len() as i64;
        degrees
            .iter()
            .enumerate()
            .map(|(i, d)| (l - 1 - i as i64) * d)
            .sum()
    }

    /// Coefficient sign in the assembly of the homological vector field:
    /// `dagger = (l+1)|s_0| + l|s_1| + … + |s_l|` over the shifted frame.
    pub fn dagger(frame_degrees: &[i64]) -> i64 {
        let l1 = frame_degrees.len() as i64;
        frame_degrees
            .iter()
            .enumerate()
            .map(|(i, d)| (l1 - i as i64) * d)
            .sum()
    }
}

/// An `n`-shifted `m`-polyvector field, stored as a multiderivation table on
/// generator tuples of the function algebra and extended by the Leibniz rule
/// at evaluation. Equality of polyvector fields is decided on generator
/// tuples.
#[derive(Clone)]
pub struct PolyField {
    pub shift: i64,
    pub weight: usize,
    pub algebra: Arc<FreeGCA>,
    /// Values on generator tuples; keys are canonical words of generator
    /// indices at degree shift `n+1`, values are algebra elements.
    table: std::collections::BTreeMap<Vec<usize>, Vec1>,
    /// Pure degree `|Pi|` (the degree as an `m`-ary operation).
    pub pure_degree: i64,
}

impl std::fmt::Debug for PolyField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "PolyField(shift {}, weight {}, degree {}, {} entries)",
            self.shift,
            self.weight,
            self.pure_degree,
            self.table.len()
        )
    }
}

impl PolyField {
    pub fn zero(algebra: Arc<FreeGCA>, shift: i64, weight: usize, pure_degree: i64) -> Self {
        PolyField {
            shift,
            weight,
            algebra,
            table: Default::default(),
            pure_degree,
        }
    }

    /// Total degree `‖Pi‖_n = |Pi| - m(n+1)`.
    pub fn total_degree(&self) -> i64 {
        self.pure_degree - self.weight as i64 * (self.shift + 1)
    }

    fn canonical_gens(&self, word: &[usize]) -> Option<(i64, Vec<usize>)> {
        let degrees: Vec<i64> = word
            .iter()
            .map(|&g| self.algebra.generators.degree(g))
            .collect();
        let c = canonicalize_with_degrees(word, &degrees, self.shift + 1, false);
        if c.zero {
            None
        } else {
            Some((c.sign, c.factors))
        }
    }

    /// Sets the value on a generator tuple (accumulating).
    pub fn add_entry(&mut self, gens: &[usize], value: Vec1) {
        assert_eq!(gens.len(), self.weight);
        let Some((sign, canon)) = self.canonical_gens(gens) else {
            return;
        };
        let scaled = value.scaled(&Scalar::from_int(sign));
        let entry = self.table.entry(canon).or_default();
        entry.add_assign(&scaled);
        if entry.is_zero() {
            let key: Vec<Vec<usize>> = self
                .table
                .iter()
                .filter(|(_, v)| v.is_zero())
                .map(|(k, _)| k.clone())
                .collect();
            for k in key {
                self.table.remove(&k);
            }
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<usize>, &Vec1)> {
        self.table.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.table.values().all(|v| v.is_zero())
    }

    /// Evaluates on generator indices.
    pub fn eval_gens(&self, gens: &[usize]) -> Vec1 {
        let Some((sign, canon)) = self.canonical_gens(gens) else {
            return Vec1::zero();
        };
        match self.table.get(&canon) {
            None => Vec1::zero(),
            Some(v) => v.scaled(&Scalar::from_int(sign)),
        }
    }

    /// Evaluates on monomials of the function algebra, extending as a
    /// multiderivation: `Pi(…, x·y) = Pi(…, x)·y + (-1)^{|x||y|} Pi(…, y)·x`
    /// and symmetric rotation at shift `n+1`.
    pub fn eval_monomials(&self, monos: &[usize]) -> Vec1 {
        assert_eq!(monos.len(), self.weight);
        let alg = &self.algebra;
        let space = alg.basis_space();
        let degrees: Vec<i64> = monos.iter().map(|&m| space.degree(m)).collect();
        let c = canonicalize_with_degrees(monos, &degrees, self.shift + 1, false);
        if c.zero {
            return Vec1::zero();
        }
        let canon = c.factors;
        let unit = alg.unit_index();
        if canon.iter().any(|&m| m == unit) {
            return Vec1::zero();
        }
        let composite = canon.iter().position(|&m| alg.monomial(m).len() >= 2);
        let value = match composite {
            None => {
                let gens: Vec<usize> = canon.iter().map(|&m| alg.monomial(m)[0]).collect();
                self.eval_gens(&gens)
            }
            Some(pos) => {
                let n = canon.len();
                let mut rotated = canon.clone();
                let letter = rotated.remove(pos);
                rotated.push(letter);
                let mut rot_sign = 0i64;
                let d_letter = space.degree(letter) + self.shift + 1;
                for &after in &canon[pos + 1..] {
                    rot_sign += d_letter * (space.degree(after) + self.shift + 1);
                }
                let (g, rest) = alg.split_first_generator(letter).expect("composite");
                let g_mono = alg.generator_monomial(g);
                let g_deg = alg.generators.degree(g);
                let rest_deg = alg.degree(rest);
                let prefix = &rotated[..n - 1];
                let mut word_a: Vec<usize> = prefix.to_vec();
                word_a.push(g_mono);
                let mut out = alg.mul(&self.eval_monomials(&word_a), &Vec1::basis(rest));
                let mut word_b: Vec<usize> = prefix.to_vec();
                word_b.push(rest);
                out.add_assign(
                    &alg.mul(&self.eval_monomials(&word_b), &Vec1::basis(g_mono))
                        .scaled(&Scalar::sign_pow(g_deg * rest_deg)),
                );
                out.scaled(&Scalar::sign_pow(rot_sign))
            }
        };
        value.scaled(&Scalar::from_int(c.sign))
    }

    /// Evaluates with arbitrary algebra elements as arguments.
    pub fn eval_vecs(&self, args: &[Vec1]) -> Vec1 {
        assert_eq!(args.len(), self.weight);
        let mut partial: Vec<(Vec<usize>, Scalar)> = vec![(Vec::new(), Scalar::one())];
        for v in args {
            let mut next = Vec::new();
            for (w, c) in &partial {
                for (m, cm) in v.iter() {
                    let mut w2 = w.clone();
                    w2.push(*m);
                    next.push((w2, c * cm));
                }
            }
            partial = next;
        }
        let mut out = Vec1::zero();
        for (w, c) in partial {
            out.add_assign(&self.eval_monomials(&w).scaled(&c));
        }
        out
    }

    /// Checks that every stored entry respects `|output| = |Pi| + sum |gens|`.
    pub fn degree_bookkeeping_ok(&self) -> bool {
        let space = self.algebra.basis_space();
        for (word, value) in &self.table {
            let want: i64 = word
                .iter()
                .map(|&g| self.algebra.generators.degree(g))
                .sum::<i64>()
                + self.pure_degree;
            for (m, _) in value.iter() {
                if space.degree(*m) != want {
                    return false;
                }
            }
        }
        true
    }
}

/// Insertion composition `Pi ∘ Lam` as an operation on functions:
/// the shuffle sum over `Sh(q, p-1)` with Koszul signs at shift `n+1`, the
/// inner field filling the first slot of the outer.
fn insertion_eval(outer: &PolyField, inner: &PolyField, monos: &[usize]) -> Vec1 {
    let p = outer.weight;
    let q = inner.weight;
    assert_eq!(monos.len(), p + q - 1);
    let space = outer.algebra.basis_space();
    let shifted: Vec<i64> = monos
        .iter()
        .map(|&m| space.degree(m) + outer.shift + 1)
        .collect();
    let mut out = Vec1::zero();
    for sh in shuffles(q, p - 1) {
        let sign = crate::graded::koszul_sign(&sh, &shifted).expect("shuffle");
        let inner_word: Vec<usize> = sh[..q].iter().map(|&i| monos[i]).collect();
        let rest: Vec<usize> = sh[q..].iter().map(|&i| monos[i]).collect();
        let iv = inner.eval_monomials(&inner_word);
        if iv.is_zero() {
            continue;
        }
        let mut args: Vec<Vec1> = Vec::with_capacity(p);
        args.push(iv);
        args.extend(rest.iter().map(|&m| Vec1::basis(m)));
        out.add_assign(&outer.eval_vecs(&args).scaled(&Scalar::from_int(sign)));
    }
    out
}

/// The shifted Schouten bracket: the graded commutator of insertion
/// compositions,
/// `[Pi, Lam] = Pi∘Lam - (-1)^{(‖Pi‖+n+1)(‖Lam‖+n+1)} Lam∘Pi`,
/// returned as a polyvector field (tabulated on generator tuples).
pub fn schouten_bracket(pi: &PolyField, lam: &PolyField) -> Result<PolyField> {
    if pi.shift != lam.shift {
        return Err(Error::Argument(format!(
            "shift mismatch: {} vs {}",
            pi.shift, lam.shift
        )));
    }
    let n = pi.shift;
    let weight = pi.weight + lam.weight - 1;
    let mut out = PolyField::zero(
        pi.algebra.clone(),
        n,
        weight,
        pi.pure_degree + lam.pure_degree,
    );
    let comm_sign = Scalar::sign_pow((pi.total_degree() + n + 1) * (lam.total_degree() + n + 1));
    let gens = &pi.algebra.generators;
    let cost = |_: usize| 1usize;
    let words = crate::linf::spanning_words(gens, n + 1, weight, usize::MAX, &cost);
    for w in &words {
        let monos: Vec<usize> = w.iter().map(|&g| pi.algebra.generator_monomial(g)).collect();
        let mut v = insertion_eval(pi, lam, &monos);
        v.sub_assign(&insertion_eval(lam, pi, &monos).scaled(&comm_sign));
        if !v.is_zero() {
            out.add_entry(w, v);
        }
    }
    Ok(out)
}

/// The graded-symmetric product of polyvector fields (the algebra structure
/// of the shifted Schouten–Nijenhuis algebra): the shuffle sum
/// `(Pi ⊙ Lam)(f_1,…,f_{p+q}) = Σ_σ ε^{[n+1]}(σ) (-1)^{|Lam|·(|f_σ(1)|+…+|f_σ(p)|)}
///  Pi(f_σ(1..p)) · Lam(f_σ(p+1..p+q))`.
pub fn polyfield_product(pi: &PolyField, lam: &PolyField) -> Result<PolyField> {
    if pi.shift != lam.shift {
        return Err(Error::Argument("shift mismatch in product".into()));
    }
    let n = pi.shift;
    let p = pi.weight;
    let q = lam.weight;
    let weight = p + q;
    let mut out = PolyField::zero(
        pi.algebra.clone(),
        n,
        weight,
        pi.pure_degree + lam.pure_degree,
    );
    let gens = &pi.algebra.generators;
    let cost = |_: usize| 1usize;
    let words = crate::linf::spanning_words(gens, n + 1, weight, usize::MAX, &cost);
    let alg = &pi.algebra;
    for w in &words {
        let monos: Vec<usize> = w.iter().map(|&g| alg.generator_monomial(g)).collect();
        let space = alg.basis_space();
        let shifted: Vec<i64> = monos.iter().map(|&m| space.degree(m) + n + 1).collect();
        let mut v = Vec1::zero();
        for sh in shuffles(p, q) {
            let eps = crate::graded::koszul_sign(&sh, &shifted).expect("shuffle");
            let first: Vec<usize> = sh[..p].iter().map(|&i| monos[i]).collect();
            let second: Vec<usize> = sh[p..].iter().map(|&i| monos[i]).collect();
            let plain_first: i64 = first.iter().map(|&m| space.degree(m)).sum();
            let lam_sign = Scalar::sign_pow(lam.pure_degree * plain_first);
            let a = pi.eval_monomials(&first);
            if a.is_zero() {
                continue;
            }
            let b = lam.eval_monomials(&second);
            if b.is_zero() {
                continue;
            }
            v.add_assign(&alg.mul(&a, &b).scaled(&(Scalar::from_int(eps) * lam_sign)));
        }
        if !v.is_zero() {
            out.add_entry(w, v);
        }
    }
    Ok(out)
}

/// A Maurer–Cartan element: a homological vector field `Q` (weight 1) and
/// higher polyvector components `pi_l`, `l >= 2`, all of total degree `+1`
/// in the `[k-1]`-shifted convention.
#[derive(Debug)]
pub struct MCElement {
    pub q_field: PolyField,
    pub pi: Vec<PolyField>,
}

impl MCElement {
    fn component(&self, l: usize) -> Option<&PolyField> {
        if l == 1 {
            Some(&self.q_field)
        } else {
            self.pi.iter().find(|p| p.weight == l)
        }
    }

    pub fn max_weight(&self) -> usize {
        self.pi.iter().map(|p| p.weight).max().unwrap_or(1)
    }
}

/// Weight components of the Maurer–Cartan defect `[Q,pi] + ½[pi,pi]`:
/// `Pi_p = sum_{m+n-1=p} pi_m ∘ pi_n` evaluated on generator tuples. The
/// element defines a shifted derived Poisson structure iff all components
/// vanish. Requires `Q² = 0`.
pub fn mc_defect(mc: &MCElement) -> Result<Vec<PolyField>> {
    // Q squared must vanish first.
    let q2 = schouten_bracket(&mc.q_field, &mc.q_field)?;
    if !q2.is_zero() {
        return Err(Error::Structural(
            "homological vector field does not square to zero".into(),
        ));
    }
    let shift = mc.q_field.shift;
    let alg = mc.q_field.algebra.clone();
    let wmax = mc.max_weight();
    let mut out = Vec::new();
    let cost = |_: usize| 1usize;
    for p in 2..=(2 * wmax - 1) {
        let mut comp = PolyField::zero(alg.clone(), shift, p, 2 - (shift + 2));
        // Pure degree of each pi_l is chosen so the total degree is +1 in
        // the shifted convention; the defect tracks the sum.
        let words = crate::linf::spanning_words(&alg.generators, shift + 1, p, usize::MAX, &cost);
        for w in &words {
            let monos: Vec<usize> = w.iter().map(|&g| alg.generator_monomial(g)).collect();
            let mut v = Vec1::zero();
            for m in 1..=wmax {
                let n = p + 1 - m;
                if n < 1 || n > wmax {
                    continue;
                }
                let (Some(outer), Some(inner)) = (mc.component(m), mc.component(n)) else {
                    continue;
                };
                v.add_assign(&insertion_eval(outer, inner, &monos));
            }
            if !v.is_zero() {
                comp.add_entry(w, v);
            }
        }
        out.push(comp);
    }
    Ok(out)
}

/// Converts the brackets of a derived Poisson structure on a function
/// algebra into shifted polyvector fields via the `star` sign:
/// `pi_l = (-1)^star lambda_l`, producing a Maurer–Cartan element for the
/// `(k-2)`-shift.
pub fn mc_from_structure(dps: &DerivedPoissonStructure) -> Result<MCElement> {
    let k = dps.k();
    let shift = k - 2;
    let alg = dps.algebra.clone();
    let gens = &alg.generators;
    let cost = |_: usize| 1usize;
    let lambda = |l: usize, monos: &[usize]| -> Result<Vec1> {
        // lambda_l from q_l by inverse décalage.
        let degs: Vec<i64> = monos.iter().map(|&m| alg.degree(m)).collect();
        let eps = crate::graded::decalage_sign(&degs, k);
        Ok(dps.linf.q(l, monos)?.scaled(&Scalar::sign_pow(eps)))
    };
    let build = |l: usize| -> Result<PolyField> {
        let mut pf = PolyField::zero(
            alg.clone(),
            shift,
            l,
            k * (l as i64 - 1) + 2 - l as i64,
        );
        let words = crate::linf::spanning_words(gens, shift + 1, l, usize::MAX, &cost);
        for w in &words {
            let monos: Vec<usize> = w.iter().map(|&g| alg.generator_monomial(g)).collect();
            let shifted: Vec<i64> = monos.iter().map(|&m| alg.degree(m) + k).collect();
            let star = signs::star(&shifted);
            let v = lambda(l, &monos)?.scaled(&Scalar::sign_pow(star));
            if !v.is_zero() {
                pf.add_entry(w, v);
            }
        }
        Ok(pf)
    };
    let q_field = build(1)?;
    let mut pi = Vec::new();
    for l in 2..=dps.linf.max_stored_arity() {
        let pf = build(l)?;
        if !pf.is_zero() {
            pi.push(pf);
        }
    }
    Ok(MCElement { q_field, pi })
}

/// L-infinity algebroid data over a free function algebra: a fiber basis
/// with multibrackets (base-function coefficients allowed), and
/// multianchors valued in derivations of the base.
#[derive(Debug, Clone)]
pub struct AlgebroidData {
    /// Base function algebra generators (the base graded space's duals).
    pub base: GradedBasisSpace,
    /// Fiber basis with degrees.
    pub fiber: GradedBasisSpace,
    /// `brackets[l-1]`: the `l`-ary multibracket.
    pub brackets: Vec<FiberBracketTable>,
    /// Values of the arity-0 anchor on base generators.
    pub anchor0: Vec<Vec1>,
    /// Higher anchors by arity.
    pub anchors: Vec<AnchorTable>,
    /// Weight cap for the base algebra materialization.
    pub weight_cap: i64,
}

/// An antisymmetric multibracket on fiber words, valued in the free base
/// algebra tensored with the fiber: each entry lists, per fiber coordinate,
/// a base-algebra coefficient.
#[derive(Debug, Clone, Default)]
pub struct FiberBracketTable {
    pub arity: usize,
    /// Map from canonical fiber word (antisymmetric, shift 0) to the
    /// per-fiber-coordinate base coefficients.
    pub entries: std::collections::BTreeMap<Vec<usize>, Vec<Vec1>>,
}

impl FiberBracketTable {
    pub fn new(arity: usize) -> Self {
        FiberBracketTable {
            arity,
            entries: Default::default(),
        }
    }

    /// Inserts a constant-coefficient value (fiber combination), folding in
    /// the antisymmetric canonicalization sign. `unit` is the base unit.
    pub fn add_constant(
        &mut self,
        word: &[usize],
        fiber_value: &Vec1,
        fiber: &GradedBasisSpace,
        n_fiber: usize,
        base_unit: usize,
    ) {
        let degrees: Vec<i64> = word.iter().map(|&i| fiber.degree(i)).collect();
        let c = canonicalize_with_degrees(word, &degrees, 0, true);
        if c.zero {
            return;
        }
        let entry = self
            .entries
            .entry(c.factors)
            .or_insert_with(|| vec![Vec1::zero(); n_fiber]);
        for (j, coeff) in fiber_value.iter() {
            entry[*j].add_term(base_unit, coeff * &Scalar::from_int(c.sign));
        }
    }

    /// Looks up the value on a fiber word with the canonicalization sign,
    /// as per-coordinate base coefficients.
    pub fn eval(&self, word: &[usize], fiber: &GradedBasisSpace, n_fiber: usize) -> Option<(i64, &Vec<Vec1>)> {
        let degrees: Vec<i64> = word.iter().map(|&i| fiber.degree(i)).collect();
        let c = canonicalize_with_degrees(word, &degrees, 0, true);
        if c.zero {
            return None;
        }
        let _ = n_fiber;
        self.entries.get(&c.factors).map(|v| (c.sign, v))
    }
}

/// Anchor values: for a fiber word, the images of each base generator in
/// the base algebra.
#[derive(Debug, Clone)]
pub struct AnchorTable {
    pub arity: usize,
    /// Map from canonical fiber word (antisymmetric, shift 0) to the list of
    /// base-generator images.
    pub entries: std::collections::BTreeMap<Vec<usize>, Vec<Vec1>>,
}

impl AlgebroidData {
    pub fn base_algebra(&self) -> Arc<FreeGCA> {
        FreeGCA::new(self.base.clone(), self.weight_cap)
    }
}

/// The Lie–Poisson extension: a degree `k` derived Poisson structure on the
/// (truncated) symmetric algebra of the shifted fiber over the base, with
/// brackets generated by the algebroid data:
/// `lambda_l(a_1,…,a_{l-1}, f) = rho_{l-1}(a_1,…,a_{l-1}) f` and
/// `lambda_l(f, g, …) = 0` on two functions, extended by the Leibniz rule.
/// The `l`-th bracket has weight `1 - l`.
pub fn lie_poisson_extend(data: &AlgebroidData, k: i64) -> Result<DerivedPoissonStructure> {
    // Combined generator space: fiber shifted by k (weight 1), then base
    // generators (weight 0).
    let mut gens: Vec<BasisElement> = Vec::new();
    for i in data.fiber.indices() {
        gens.push(BasisElement {
            name: data.fiber.name(i).to_string(),
            degree: data.fiber.degree(i) - k,
            weight: Some(1),
        });
    }
    for i in data.base.indices() {
        gens.push(BasisElement {
            name: data.base.name(i).to_string(),
            degree: data.base.degree(i),
            weight: Some(0),
        });
    }
    let nf = data.fiber.dim();
    let gen_space = GradedBasisSpace::new(gens)?;
    let algebra = FreeGCA::new(gen_space.clone(), data.weight_cap);
    // Base monomial -> combined monomial translation.
    let base_alg = data.base_algebra();
    let lift_base = |v: &Vec1| -> Vec1 {
        let mut out = Vec1::zero();
        for (m, c) in v.iter() {
            let word: Vec<usize> = base_alg.monomial(*m).iter().map(|&g| g + nf).collect();
            if let Some((sign, idx)) = algebra.normalize_generator_word(&word) {
                out.add_term(idx, c * &Scalar::from_int(sign));
            }
        }
        out
    };
    let lift_fiber = |v: &Vec1| -> Vec1 {
        let mut out = Vec1::zero();
        for (i, c) in v.iter() {
            out.add_term(algebra.generator_monomial(*i), c.clone());
        }
        out
    };

    let max_arity = data
        .brackets
        .iter()
        .map(|b| b.arity)
        .chain(data.anchors.iter().map(|a| a.arity + 1))
        .chain(std::iter::once(if data.anchor0.iter().any(|v| !v.is_zero()) { 1 } else { 0 }))
        .max()
        .unwrap_or(1)
        .max(1);

    // Anchor compatibility: lambda_l(a_1,…,a_{l-1}, f a_l) must match the
    // anchored Leibniz rule; this is enforced structurally by generating
    // from the tables, but the data itself must satisfy the constraint that
    // bracket values use base coefficients consistently. Desk-scale data
    // uses constant structure tables, for which the check is the Jacobi
    // suite run downstream.

    let mut linf = LInfStructure::new(algebra.basis_space().clone(), k, max_arity.max(2) + 1);
    for l in 1..=max_arity {
        let mut gen_table = MultiMap::new(l, 1, Symmetry::Symmetric { degree_shift: k - 1 });
        // Fiber-only words: the multibracket, with base coefficients lifted
        // into the combined algebra.
        if let Some(br) = data.brackets.get(l - 1) {
            for (w, images) in &br.entries {
                let mut v = Vec1::zero();
                for (j, coeff) in images.iter().enumerate() {
                    if coeff.is_zero() {
                        continue;
                    }
                    v.add_assign(&algebra.mul(&lift_base(coeff), &lift_fiber(&Vec1::basis(j))));
                }
                if v.is_zero() {
                    continue;
                }
                let degs: Vec<i64> = w.iter().map(|&i| data.fiber.degree(i) - k).collect();
                let eps = crate::graded::decalage_sign(&degs, k);
                gen_table.add_entry(w, v.scaled(&Scalar::sign_pow(eps)), &gen_space);
            }
        }
        // Words with exactly one base generator in the last slot: anchors.
        let anchor = if l == 1 {
            None
        } else {
            data.anchors.iter().find(|a| a.arity == l - 1)
        };
        if l == 1 {
            for (g, img) in data.anchor0.iter().enumerate() {
                if !img.is_zero() {
                    // lambda_1(f) = rho_0(f): value on base generator g.
                    gen_table.add_entry(&[nf + g], lift_base(img), &gen_space);
                }
            }
        } else if let Some(anchor) = anchor {
            for (fiber_word, images) in &anchor.entries {
                let degs: Vec<i64> = fiber_word
                    .iter()
                    .map(|&i| data.fiber.degree(i) - k)
                    .collect();
                for (g, img) in images.iter().enumerate() {
                    if img.is_zero() {
                        continue;
                    }
                    let mut word: Vec<usize> = fiber_word.clone();
                    word.push(nf + g);
                    let mut degs_full = degs.clone();
                    degs_full.push(data.base.degree(g));
                    let eps = crate::graded::decalage_sign(&degs_full, k);
                    gen_table.add_entry(
                        &word,
                        lift_base(img).scaled(&Scalar::sign_pow(eps)),
                        &gen_space,
                    );
                }
            }
        }
        // Two base generators: zero (nothing to add).
        if !gen_table.is_zero() {
            linf.set_bracket(
                l,
                Bracket::Extended {
                    gen_table,
                    algebra: algebra.clone(),
                    memo: RwLock::new(HashMap::new()),
                    use_memo: true,
                },
            );
        }
    }
    Ok(DerivedPoissonStructure { algebra, linf })
}

/// Verifies that the `l`-th bracket of a Lie–Poisson extension has weight
/// exactly `1 - l` on stored generator evaluations.
pub fn check_weights(dps: &DerivedPoissonStructure, max_arity: usize) -> Result<bool> {
    let alg = &dps.algebra;
    let cost = |_: usize| 1usize;
    for l in 1..=max_arity.min(dps.linf.arity_cap) {
        let words = crate::linf::spanning_words(
            alg.basis_space(),
            dps.linf.word_shift(),
            l,
            l + 1,
            &monocost(alg, &cost),
        );
        for w in &words {
            let v = dps.linf.q(l, w)?;
            let win: i64 = w.iter().map(|&m| alg.weight(m)).sum();
            for (m, _) in v.iter() {
                if alg.weight(*m) != win + 1 - l as i64 {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

fn monocost<'a>(alg: &'a FreeGCA, _base: &'a dyn Fn(usize) -> usize) -> impl Fn(usize) -> usize + 'a {
    |i| alg.monomial(i).len().max(1)
}

/// A homological vector field on `L[1]` presented as a derivation of the
/// function algebra on base generators plus fiber duals.
#[derive(Debug)]
pub struct HomologicalField {
    /// Functions on `L[1]`: base generators then fiber-dual generators.
    pub algebra: Arc<FreeGCA>,
    /// Number of base generators (fiber duals follow).
    pub n_base: usize,
    /// The derivation's value on each generator.
    pub values: Vec<Vec1>,
}

impl HomologicalField {
    pub fn apply(&self, v: &Vec1) -> Vec1 {
        let values = self.values.clone();
        self.algebra
            .derivation(&move |g| values[g].clone(), 1, v)
    }

    /// Squares to zero?
    pub fn is_homological(&self) -> bool {
        for g in 0..self.algebra.generators.dim() {
            let qg = self.values[g].clone();
            let qqg = self.apply(&qg);
            if !qqg.is_zero() {
                return false;
            }
        }
        true
    }

    /// The component of the derivation by fiber-dual weight: the part
    /// sending weight-w monomials in the duals to weight-(w+l) ones.
    pub fn weight_component(&self, l: i64) -> Vec<Vec1> {
        let mut out = Vec::new();
        for g in 0..self.algebra.generators.dim() {
            let gw = self.dual_weight_of_gen(g);
            let mut v = Vec1::zero();
            for (m, c) in self.values[g].iter() {
                if self.dual_weight_of_mono(*m) == gw + l {
                    v.add_term(*m, c.clone());
                }
            }
            out.push(v);
        }
        out
    }

    fn dual_weight_of_gen(&self, g: usize) -> i64 {
        if g >= self.n_base {
            1
        } else {
            0
        }
    }

    fn dual_weight_of_mono(&self, m: usize) -> i64 {
        self.algebra
            .monomial(m)
            .iter()
            .map(|&g| self.dual_weight_of_gen(g))
            .sum()
    }
}

/// Assembles the homological vector field on `L[1]` from algebroid data:
/// fiber duals `xi^j` of degree `1 - |s_j|`, with
/// `Q = Σ_l D_l`, the anchor part carrying `(-1)^⋄ ρ_l(s…)(x)` and the
/// bracket part `(-1)^† ⟨λ_{l+1}(s…), ξ⟩`, both divided by the tuple
/// factorials (free summation over index tuples).
pub fn linf_to_homological_field(data: &AlgebroidData) -> Result<HomologicalField> {
    let n_base = data.base.dim();
    let nf = data.fiber.dim();
    let mut gens: Vec<BasisElement> = Vec::new();
    for i in data.base.indices() {
        gens.push(BasisElement {
            name: data.base.name(i).to_string(),
            degree: data.base.degree(i),
            weight: Some(0),
        });
    }
    for j in data.fiber.indices() {
        gens.push(BasisElement {
            name: format!("{}~", data.fiber.name(j)),
            degree: 1 - data.fiber.degree(j),
            weight: Some(1),
        });
    }
    let gen_space = GradedBasisSpace::new(gens)?;
    let algebra = FreeGCA::new(gen_space, data.weight_cap);
    let base_alg = data.base_algebra();
    let lift_base = |v: &Vec1| -> Vec1 {
        let mut out = Vec1::zero();
        for (m, c) in v.iter() {
            let word: Vec<usize> = base_alg.monomial(*m).to_vec();
            if let Some((sign, idx)) = algebra.normalize_generator_word(&word) {
                out.add_term(idx, c * &Scalar::from_int(sign));
            }
        }
        out
    };
    // Shifted frame degrees |s_j| = |fiber_j| - 1.
    let frame_deg = |j: usize| data.fiber.degree(j) - 1;
    let xi = |j: usize| n_base + j;

    let mut values = vec![Vec1::zero(); n_base + nf];

    // Anchor parts: coefficient of ∂/∂x^g from ρ_l, assembled as
    // (1/l!) ξ^{i_l}…ξ^{i_1} (-1)^⋄ ρ_l(s_{i_1},…,s_{i_l}) x_g.
    // Anchor 0: ρ_0(x_g) directly.
    for g in 0..n_base {
        if let Some(v) = data.anchor0.get(g) {
            values[g].add_assign(&lift_base(v));
        }
    }
    for anchor in &data.anchors {
        let l = anchor.arity;
        let norm = Scalar::inv_factorial(l);
        for (fiber_word, images) in &anchor.entries {
            // Free summation over tuples realizing this canonical word.
            for tuple in tuples_over(fiber_word, l) {
                // Value on the tuple by antisymmetric reordering.
                let degs: Vec<i64> = tuple.iter().map(|&j| data.fiber.degree(j)).collect();
                let c = canonicalize_with_degrees(&tuple, &degs, 0, true);
                if c.zero || &c.factors != fiber_word {
                    continue;
                }
                let shifted_frame: Vec<i64> = tuple.iter().map(|&j| frame_deg(j)).collect();
                let diamond = {
                    // ⋄ = (l-1)|s_1| + (l-2)|s_2| + … + |s_{l-1}|
                    signs::sharp(&shifted_frame)
                };
                // ξ^{i_l} … ξ^{i_1} in reversed tuple order.
                let mut word: Vec<usize> = tuple.iter().rev().map(|&j| xi(j)).collect();
                for (g, img) in images.iter().enumerate() {
                    if img.is_zero() {
                        continue;
                    }
                    let coeff = img.scaled(&Scalar::from_int(c.sign));
                    // Multiply ξ-word by the lifted base element and add to
                    // the ∂/∂x^g column.
                    let lifted = lift_base(&coeff);
                    for (m, cm) in lifted.iter() {
                        word.extend(algebra.monomial(*m).iter());
                        if let Some((s, idx)) = algebra.normalize_generator_word(&word) {
                            values[g].add_term(
                                idx,
                                cm * &Scalar::from_int(s)
                                    * &Scalar::sign_pow(diamond)
                                    * &norm,
                            );
                        }
                        word.truncate(l);
                    }
                }
            }
        }
    }
    // Bracket parts: coefficient of ∂/∂ξ^m from λ_{l+1}:
    // (1/(l+1)!) ξ^{i_l}…ξ^{i_0} (-1)^† ⟨λ_{l+1}(s_{i_0},…,s_{i_l}), ξ^m⟩.
    for br in &data.brackets {
        let l1 = br.arity;
        let norm = Scalar::inv_factorial(l1);
        for (fiber_word, images) in &br.entries {
            for tuple in tuples_over(fiber_word, l1) {
                let degs: Vec<i64> = tuple.iter().map(|&j| data.fiber.degree(j)).collect();
                let c = canonicalize_with_degrees(&tuple, &degs, 0, true);
                if c.zero || &c.factors != fiber_word {
                    continue;
                }
                let shifted_frame: Vec<i64> = tuple.iter().map(|&j| frame_deg(j)).collect();
                let dagger = signs::dagger(&shifted_frame);
                let word: Vec<usize> = tuple.iter().rev().map(|&j| xi(j)).collect();
                for (m, coeff) in images.iter().enumerate() {
                    if coeff.is_zero() {
                        continue;
                    }
                    let lifted = lift_base(coeff);
                    for (bm, cm) in lifted.iter() {
                        let mut w2 = word.clone();
                        w2.extend(algebra.monomial(*bm).iter());
                        if let Some((s, idx)) = algebra.normalize_generator_word(&w2) {
                            values[xi(m)].add_term(
                                idx,
                                cm * &Scalar::from_int(s * c.sign)
                                    * &Scalar::sign_pow(dagger)
                                    * &norm,
                            );
                        }
                    }
                }
            }
        }
    }
    Ok(HomologicalField {
        algebra,
        n_base,
        values,
    })
}

/// All tuples of the given length whose sorted content matches the word's
/// multiset (i.e. the orbit of the canonical word under permutations).
fn tuples_over(word: &[usize], len: usize) -> Vec<Vec<usize>> {
    assert_eq!(word.len(), len);
    let mut out = Vec::new();
    let mut used = vec![false; len];
    let mut cur = Vec::with_capacity(len);
    fn rec(word: &[usize], used: &mut Vec<bool>, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == word.len() {
            out.push(cur.clone());
            return;
        }
        let mut seen = std::collections::HashSet::new();
        for i in 0..word.len() {
            if used[i] || seen.contains(&word[i]) {
                continue;
            }
            seen.insert(word[i]);
            used[i] = true;
            cur.push(word[i]);
            rec(word, used, cur, out);
            cur.pop();
            used[i] = false;
        }
    }
    rec(word, &mut used, &mut cur, &mut out);
    out
}

/// Extracts multibrackets and multianchors back from a homological vector
/// field via iterated derived brackets:
/// `ρ_l(a…) f = (-1)^♭ 0^*([[…[Q, ι_{a_1}]…], ι_{a_l}] (π^* f))` and
/// `⟨λ_l(a…), ξ⟩ = (-1)^♯ 0^*([[…[Q, ι_{a_1}]…], ι_{a_l}] (ξ))`.
pub fn extract_algebroid(
    q: &HomologicalField,
    data_shape: &AlgebroidData,
) -> Result<(Vec<FiberBracketTable>, Vec<AnchorTable>, Vec<Vec1>)> {
    let alg = &q.algebra;
    let n_base = q.n_base;
    let nf = data_shape.fiber.dim();
    let base_alg = data_shape.base_algebra();

    // 0^*: kill monomials containing any fiber dual; result in base algebra.
    let zero_star = |v: &Vec1| -> Vec1 {
        let mut out = Vec1::zero();
        for (m, c) in v.iter() {
            let mono = alg.monomial(*m);
            if mono.iter().any(|&g| g >= n_base) {
                continue;
            }
            if let Some(idx) = base_alg.monomial_index(mono) {
                out.add_term(idx, c.clone());
            }
        }
        out
    };

    // Derivations as generator-value tables; commutator of derivations.
    type Deriv = Vec<Vec1>;
    let apply = |d: &Deriv, deg: i64, v: &Vec1| -> Vec1 {
        let d = d.clone();
        alg.derivation(&move |g| d[g].clone(), deg, v)
    };
    let commutator = |a: &Deriv, adeg: i64, b: &Deriv, bdeg: i64| -> Deriv {
        let mut out = Vec::with_capacity(alg.generators.dim());
        for g in 0..alg.generators.dim() {
            let mut v = apply(a, adeg, &b[g]);
            v.sub_assign(&apply(b, bdeg, &a[g]).scaled(&Scalar::sign_pow(adeg * bdeg)));
            out.push(v);
        }
        out
    };
    // ι_{s_j}: the contraction by a frame section, i.e. ∂/∂ξ^j with the
    // generator-value presentation.
    let iota = |j: usize| -> Deriv {
        let mut out = vec![Vec1::zero(); alg.generators.dim()];
        out[n_base + j] = alg.unit();
        out
    };
    let iota_deg = |j: usize| -(1 - data_shape.fiber.degree(j));

    let max_arity = data_shape
        .brackets
        .iter()
        .map(|b| b.arity)
        .chain(data_shape.anchors.iter().map(|a| a.arity))
        .max()
        .unwrap_or(1);

    let mut brackets_out: Vec<FiberBracketTable> = Vec::new();
    let mut anchors_out: Vec<AnchorTable> = Vec::new();
    let anchor0_out: Vec<Vec1> = (0..n_base)
        .map(|g| zero_star(&q.values[g]))
        .collect();

    for l in 1..=max_arity {
        let mut br = FiberBracketTable::new(l);
        let mut anchor = AnchorTable {
            arity: l,
            entries: Default::default(),
        };
        let cost = |_: usize| 1usize;
        // Words in the antisymmetric convention over the fiber.
        let words = antisym_words(&data_shape.fiber, l, &cost);
        for w in &words {
            // Iterated commutator [[Q, ι_{w_1}], …, ι_{w_l}].
            let mut cur: Deriv = q.values.clone();
            let mut cur_deg = 1i64;
            for &j in w {
                cur = commutator(&cur, cur_deg, &iota(j), iota_deg(j));
                cur_deg += iota_deg(j);
            }
            let degrees: Vec<i64> = w.iter().map(|&j| data_shape.fiber.degree(j)).collect();
            let flat = signs::flat(&degrees);
            let sharp = signs::sharp(&degrees);
            // Anchor: images of base generators.
            let mut images = Vec::with_capacity(n_base);
            let mut any = false;
            for g in 0..n_base {
                let img = zero_star(&cur[g]).scaled(&Scalar::sign_pow(flat));
                if !img.is_zero() {
                    any = true;
                }
                images.push(img);
            }
            if any {
                anchor.entries.insert(w.clone(), images);
            }
            // Bracket: ⟨λ_l(w), ξ^m⟩ from the ξ-columns, with base
            // coefficients retained.
            let mut images = vec![Vec1::zero(); nf];
            let mut any_bracket = false;
            for m in 0..nf {
                let img = zero_star(&cur[n_base + m]).scaled(&Scalar::sign_pow(sharp));
                if !img.is_zero() {
                    any_bracket = true;
                }
                images[m] = img;
            }
            if any_bracket {
                br.entries.insert(w.clone(), images);
            }
        }
        brackets_out.push(br);
        anchors_out.push(anchor);
    }
    Ok((brackets_out, anchors_out, anchor0_out))
}

fn antisym_words(space: &GradedBasisSpace, len: usize, _cost: &dyn Fn(usize) -> usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(space: &GradedBasisSpace, len: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for i in start..space.dim() {
            // In the antisymmetric convention, repeats of even elements die.
            if cur.last() == Some(&i) && space.degree(i).rem_euclid(2) == 0 {
                continue;
            }
            cur.push(i);
            rec(space, len, i, cur, out);
            cur.pop();
        }
    }
    rec(space, len, 0, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liepair::sl2;

    fn poly3(weight_cap: i64) -> Arc<FreeGCA> {
        // Three generators with mixed parity.
        let gens = GradedBasisSpace::new(vec![
            BasisElement { name: "x".into(), degree: 0, weight: Some(1) },
            BasisElement { name: "y".into(), degree: 1, weight: Some(1) },
            BasisElement { name: "z".into(), degree: -1, weight: Some(1) },
        ])
        .unwrap();
        FreeGCA::new(gens, weight_cap)
    }

    #[test]
    fn vector_fields_commutator() {
        // Weight-1 fields: [X, Y] is the ordinary commutator of derivations.
        let alg = poly3(4);
        // X = x ∂x? Take X(x) = x, Y(x) = 1 (even generator only): [X,Y](x)
        // = X(Y x) - Y(X x) = X(1) - Y(x) = -1.
        let mut x_field = PolyField::zero(alg.clone(), 0, 1, 0);
        x_field.add_entry(&[0], alg.generator_vec(0));
        let mut y_field = PolyField::zero(alg.clone(), 0, 1, 0);
        y_field.add_entry(&[0], alg.unit());
        let br = schouten_bracket(&x_field, &y_field).unwrap();
        assert_eq!(br.eval_gens(&[0]), alg.unit().neg());
        assert!(br.eval_gens(&[1]).is_zero());
    }

    #[test]
    fn bracket_with_product_is_leibniz() {
        // [Pi, -] is a derivation slotwise: check Pi(…, fg) expansion for a
        // weight-2 field.
        let alg = poly3(4);
        // Pi(x, y) = 1 with appropriate degree bookkeeping: |Pi| = -1.
        let mut pi = PolyField::zero(alg.clone(), 0, 2, -1);
        pi.add_entry(&[0, 1], alg.unit());
        assert!(pi.degree_bookkeeping_ok());
        // Pi(x·x, y) = Pi(x,y)·x + x·Pi(x,y) = 2x.
        let xx = alg.monomial_index(&vec![0, 0]).unwrap();
        let y = alg.generator_monomial(1);
        let v = pi.eval_monomials(&[xx, y]);
        assert_eq!(v, alg.generator_vec(0).scaled(&Scalar::from_int(2)));
    }

    #[test]
    fn schouten_graded_jacobi_randomized() {
        // Graded Jacobi for the shifted Schouten bracket on small fields at
        // shifts -1, 0, 1: [[A,B],C] = [A,[B,C]] - ±[B,[A,C]] in the
        // appropriate convention; verified via the cyclic form
        // (-1)^{..}[[A,B],C] + cyclic = 0 using the commutator symmetry.
        for shift in [-1i64, 0, 1] {
            let alg = poly3(4);
            let mut a = PolyField::zero(alg.clone(), shift, 1, 1);
            a.add_entry(&[2], alg.generator_vec(0)); // A(z) = x
            let mut b = PolyField::zero(alg.clone(), shift, 2, 0);
            b.add_entry(&[0, 2], alg.generator_vec(2)); // B(x,z) = z
            let mut c = PolyField::zero(alg.clone(), shift, 1, -1);
            c.add_entry(&[1], alg.unit()); // C(y) = 1
            let n1 = shift + 1;
            let ta = a.total_degree() + n1;
            let tb = b.total_degree() + n1;
            let tc = c.total_degree() + n1;
            // Graded Jacobi in Lie form on the (n+1)-shifted degrees:
            // [A,[B,C]] = [[A,B],C] + (-1)^{ta tb} [B,[A,C]]
            let lhs = schouten_bracket(&a, &schouten_bracket(&b, &c).unwrap()).unwrap();
            let r1 = schouten_bracket(&schouten_bracket(&a, &b).unwrap(), &c).unwrap();
            let r2 = schouten_bracket(&b, &schouten_bracket(&a, &c).unwrap()).unwrap();
            let cost = |_: usize| 1usize;
            let words = crate::linf::spanning_words(&alg.generators, n1, lhs.weight, usize::MAX, &cost);
            for w in &words {
                let mut defect = lhs.eval_gens(w);
                defect.sub_assign(&r1.eval_gens(w));
                defect.sub_assign(&r2.eval_gens(w).scaled(&Scalar::sign_pow(ta * tb)));
                assert!(defect.is_zero(), "shift {shift} word {w:?}");
            }
            let _ = tc;
        }
    }

    #[test]
    fn mc_zero_pi_has_zero_defect() {
        let alg = poly3(4);
        // Q = 0 field.
        let q = PolyField::zero(alg.clone(), -1, 1, 1);
        let mc = MCElement { q_field: q, pi: vec![] };
        let defects = mc_defect(&mc).unwrap();
        assert!(defects.iter().all(|d| d.is_zero()));
    }

    #[test]
    fn lie_poisson_sl2_k0_is_classical() {
        // S(g) with the Lie-Poisson bracket: {a, b} extends [a,b].
        let g = sl2();
        let base = GradedBasisSpace::new(vec![]).unwrap();
        let base_alg = FreeGCA::new(base.clone(), 3);
        let mut br = FiberBracketTable::new(2);
        for i in 0..3 {
            for j in (i + 1)..3 {
                let v = g.bracket(i, j).clone();
                if !v.is_zero() {
                    br.add_constant(&[i, j], &v, &g.space, 3, base_alg.unit_index());
                }
            }
        }
        let data = AlgebroidData {
            base,
            fiber: g.space.clone(),
            brackets: vec![FiberBracketTable::new(1), br],
            anchor0: vec![],
            anchors: vec![],
            weight_cap: 3,
        };
        let dps = lie_poisson_extend(&data, 0).unwrap();
        // Bracket weights are 1 - l.
        assert!(check_weights(&dps, 2).unwrap());
        // {h, e} = 2e in the extension.
        let alg = &dps.algebra;
        let h = alg.generator_monomial(0);
        let e = alg.generator_monomial(1);
        let q2 = dps.linf.q(2, &[h, e]).unwrap();
        // k = 0: décalage sign on (0,0) degrees is (2-1)(0+0) = 0.
        assert_eq!(q2, Vec1::single(e, Scalar::from_int(2)));
        // Leibniz: {h, e·f} = {h,e}f + e{h,f}.
        let cfg = crate::linf::CheckConfig { word_budget: 4, arity_cap: 3 };
        assert!(crate::linf::check_leibniz(&dps, &cfg).unwrap().passed());
        let cost = crate::linf::monomial_cost(alg);
        assert!(crate::linf::check_jacobi(&dps.linf, &cfg, &cost).unwrap().passed());
    }

    #[test]
    fn lie_poisson_sl2_k_minus1_is_schouten() {
        // Λg with the Schouten bracket: generators get degree +1.
        let g = sl2();
        let base = GradedBasisSpace::new(vec![]).unwrap();
        let base_alg = FreeGCA::new(base.clone(), 3);
        let mut br = FiberBracketTable::new(2);
        for i in 0..3 {
            for j in (i + 1)..3 {
                let v = g.bracket(i, j).clone();
                if !v.is_zero() {
                    br.add_constant(&[i, j], &v, &g.space, 3, base_alg.unit_index());
                }
            }
        }
        let data = AlgebroidData {
            base,
            fiber: g.space.clone(),
            brackets: vec![FiberBracketTable::new(1), br],
            anchor0: vec![],
            anchors: vec![],
            weight_cap: 3,
        };
        let dps = lie_poisson_extend(&data, -1).unwrap();
        assert_eq!(dps.k(), -1);
        let alg = &dps.algebra;
        assert_eq!(alg.degree(alg.generator_monomial(0)), 1);
        assert!(check_weights(&dps, 2).unwrap());
        // λ_2 on two functions is zero: no base, so check on products:
        // λ(1-part) trivial; instead verify Jacobi/Leibniz.
        let cfg = crate::linf::CheckConfig { word_budget: 4, arity_cap: 3 };
        assert!(crate::linf::check_leibniz(&dps, &cfg).unwrap().passed());
        let cost = crate::linf::monomial_cost(alg);
        assert!(crate::linf::check_jacobi(&dps.linf, &cfg, &cost).unwrap().passed());
        // Classical Schouten value: [e∧f, h] = [e,h]∧f + e∧[f,h] = 0 for sl2.
        let e = alg.generator_monomial(1);
        let f = alg.generator_monomial(2);
        let h = alg.generator_monomial(0);
        let ef = alg.mul(&Vec1::basis(e), &Vec1::basis(f));
        let (ef_idx, ef_c) = ef.iter().next().unwrap();
        let v = dps.linf.q(2, &[*ef_idx, h]).unwrap().scaled(ef_c);
        assert!(v.is_zero());
    }

    #[test]
    fn mc_agrees_with_jacobi_on_lie_poisson() {
        let g = sl2();
        let base = GradedBasisSpace::new(vec![]).unwrap();
        let base_alg = FreeGCA::new(base.clone(), 3);
        let mut br = FiberBracketTable::new(2);
        for i in 0..3 {
            for j in (i + 1)..3 {
                let v = g.bracket(i, j).clone();
                if !v.is_zero() {
                    br.add_constant(&[i, j], &v, &g.space, 3, base_alg.unit_index());
                }
            }
        }
        let data = AlgebroidData {
            base,
            fiber: g.space.clone(),
            brackets: vec![FiberBracketTable::new(1), br],
            anchor0: vec![],
            anchors: vec![],
            weight_cap: 3,
        };
        let dps = lie_poisson_extend(&data, 0).unwrap();
        let mc = mc_from_structure(&dps).unwrap();
        let defects = mc_defect(&mc).unwrap();
        assert!(defects.iter().all(|d| d.is_zero()));
    }
}
