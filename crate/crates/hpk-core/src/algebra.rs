//! Free graded-commutative algebras on finite generator sets, materialized
//! on a monomial basis with an optional weight truncation.
//!
//! Odd generators square to zero, so the exterior part is finite; even
//! generators of positive weight are truncated at `weight_cap`, which makes
//! every completed symmetric algebra in the library an explicit
//! finite-dimensional quotient.

use crate::graded::{
    canonicalize_with_degrees, Error, GradedBasisSpace, MultiMap, Result, SymWord, Symmetry, Vec1,
};
use crate::scalar::Scalar;
use std::collections::HashMap;
use std::sync::Arc;

/// A monomial: a sorted multiset of generator indices.
pub type Monomial = Vec<usize>;

/// A free graded-commutative algebra on `generators`, truncated so that
/// monomials of weight exceeding `weight_cap` vanish. The monomial basis is
/// materialized and doubles as a [`GradedBasisSpace`] so that words over the
/// algebra reuse the same canonical-word machinery.
#[derive(Debug)]
pub struct FreeGCA {
    pub generators: GradedBasisSpace,
    pub weight_cap: i64,
    monomials: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
    /// Monomial basis viewed as a graded space (degrees and weights summed).
    basis_space: GradedBasisSpace,
}

impl FreeGCA {
    /// Enumerates the monomial basis. Only generator multisets that are
    /// nonzero (no repeated odd generator) and within the weight cap appear.
    pub fn new(generators: GradedBasisSpace, weight_cap: i64) -> Arc<Self> {
        let mut monomials: Vec<Monomial> = vec![vec![]];
        let n = generators.dim();
        let mut frontier: Vec<Monomial> = vec![vec![]];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for m in &frontier {
                let start = m.last().map(|&g| g).unwrap_or(0);
                for g in start..n {
                    if generators.degree(g) % 2 != 0 && m.last() == Some(&g) {
                        continue; // odd square
                    }
                    let w: i64 =
                        m.iter().map(|&i| generators.weight(i)).sum::<i64>() + generators.weight(g);
                    if w > weight_cap {
                        continue;
                    }
                    let mut m2 = m.clone();
                    m2.push(g);
                    next.push(m2);
                }
            }
            monomials.extend(next.iter().cloned());
            frontier = next;
        }
        monomials.sort();
        monomials.dedup();
        let index: HashMap<Monomial, usize> =
            monomials.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let basis_space = GradedBasisSpace::new(
            monomials
                .iter()
                .map(|m| crate::graded::BasisElement {
                    name: Self::monomial_name(m, &generators),
                    degree: m.iter().map(|&i| generators.degree(i)).sum(),
                    weight: Some(m.iter().map(|&i| generators.weight(i)).sum()),
                })
                .collect(),
        )
        .expect("monomial names unique");
        Arc::new(FreeGCA {
            generators,
            weight_cap,
            monomials,
            index,
            basis_space,
        })
    }

    fn monomial_name(m: &Monomial, gens: &GradedBasisSpace) -> String {
        if m.is_empty() {
            "1".to_string()
        } else {
            m.iter().map(|&i| gens.name(i)).collect::<Vec<_>>().join("*")
        }
    }

    pub fn dim(&self) -> usize {
        self.monomials.len()
    }

    /// The monomial basis as a graded space; words over the algebra are
    /// canonical words over this space.
    pub fn basis_space(&self) -> &GradedBasisSpace {
        &self.basis_space
    }

    pub fn monomial(&self, idx: usize) -> &Monomial {
        &self.monomials[idx]
    }

    pub fn monomials(&self) -> impl Iterator<Item = (usize, &Monomial)> {
        self.monomials.iter().enumerate()
    }

    pub fn monomial_index(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).copied()
    }

    pub fn unit(&self) -> Vec1 {
        Vec1::basis(self.index[&vec![]])
    }

    pub fn unit_index(&self) -> usize {
        self.index[&vec![]]
    }

    pub fn degree(&self, idx: usize) -> i64 {
        self.basis_space.degree(idx)
    }

    pub fn weight(&self, idx: usize) -> i64 {
        self.basis_space.weight(idx)
    }

    /// Index of the length-one monomial on generator `g`.
    pub fn generator_monomial(&self, g: usize) -> usize {
        self.index[&vec![g]]
    }

    pub fn generator_vec(&self, g: usize) -> Vec1 {
        Vec1::basis(self.generator_monomial(g))
    }

    /// Canonicalizes a raw generator word into (sign, monomial index);
    /// `None` when the monomial vanishes (odd square or weight overflow).
    pub fn normalize_generator_word(&self, word: &[usize]) -> Option<(i64, usize)> {
        let degrees: Vec<i64> = word.iter().map(|&g| self.generators.degree(g)).collect();
        let canon: SymWord = canonicalize_with_degrees(word, &degrees, 0, false);
        if canon.zero {
            return None;
        }
        self.index.get(&canon.factors).map(|&i| (canon.sign, i))
    }

    /// Product of two basis monomials, with Koszul sign and truncation.
    pub fn mul_monomials(&self, a: usize, b: usize) -> Vec1 {
        let mut word = self.monomials[a].clone();
        word.extend_from_slice(&self.monomials[b]);
        match self.normalize_generator_word(&word) {
            None => Vec1::zero(),
            Some((sign, idx)) => Vec1::single(idx, Scalar::from_int(sign)),
        }
    }

    /// Product of sparse elements.
    pub fn mul(&self, x: &Vec1, y: &Vec1) -> Vec1 {
        let mut out = Vec1::zero();
        for (a, ca) in x.iter() {
            for (b, cb) in y.iter() {
                let p = self.mul_monomials(*a, *b);
                out.add_assign(&p.scaled(&(ca * cb)));
            }
        }
        out
    }

    /// Splits a monomial into its first generator and the rest:
    /// `m = g · rest` with no sign (factors stay in canonical order).
    pub fn split_first_generator(&self, idx: usize) -> Option<(usize, usize)> {
        let m = &self.monomials[idx];
        if m.is_empty() {
            return None;
        }
        let g = m[0];
        let rest = m[1..].to_vec();
        Some((g, self.index[&rest]))
    }

    /// The graded partial derivative ∂/∂g, an odd or even derivation
    /// depending on the generator parity. Acting on a monomial it removes
    /// one occurrence of `g`, with the Koszul sign of moving the derivative
    /// past the preceding factors, times the multiplicity for even
    /// generators.
    pub fn partial_derivative(&self, idx: usize, g: usize) -> Vec1 {
        let m = &self.monomials[idx];
        let mut out = Vec1::zero();
        let gdeg = self.generators.degree(g);
        let mut sign_exp = 0i64;
        let mut k = 0;
        while k < m.len() {
            if m[k] == g {
                let mut rest = m.clone();
                rest.remove(k);
                let s = Scalar::sign_pow(sign_exp);
                out.add_term(self.index[&rest], s);
                // For even generators each occurrence contributes; for odd
                // generators there is at most one occurrence.
            }
            sign_exp += gdeg * self.generators.degree(m[k]);
            k += 1;
        }
        out
    }

    /// Evaluates an element-valued linear map given on generators as a
    /// graded derivation of the stated degree, on a basis monomial.
    pub fn derivation_on_monomial(&self, gen_values: &dyn Fn(usize) -> Vec1, deg: i64, idx: usize) -> Vec1 {
        let m = &self.monomials[idx];
        let mut out = Vec1::zero();
        let mut sign_exp = 0i64;
        for k in 0..m.len() {
            // d(g1…gn) = sum_k ± g1…g_{k-1} d(g_k) g_{k+1}…gn, the sign from
            // moving a degree-`deg` operator past the first k-1 factors.
            let prefix = &m[..k];
            let suffix = &m[k + 1..];
            let dval = gen_values(m[k]);
            for (mono, c) in dval.iter() {
                let mut word: Vec<usize> = prefix.to_vec();
                word.extend_from_slice(self.monomials[*mono].as_slice());
                word.extend_from_slice(suffix);
                if let Some((s, widx)) = self.normalize_generator_word(&word) {
                    out.add_term(widx, c * &Scalar::from_int(s) * &Scalar::sign_pow(sign_exp));
                }
            }
            sign_exp += deg * self.generators.degree(m[k]);
        }
        out
    }

    pub fn derivation(&self, gen_values: &dyn Fn(usize) -> Vec1, deg: i64, x: &Vec1) -> Vec1 {
        let mut out = Vec1::zero();
        for (idx, c) in x.iter() {
            out.add_assign(&self.derivation_on_monomial(gen_values, deg, *idx).scaled(c));
        }
        out
    }

    /// Describes an element for reports.
    pub fn display(&self, x: &Vec1) -> String {
        if x.is_zero() {
            return "0".to_string();
        }
        x.iter()
            .map(|(i, c)| format!("{}·{}", c, self.basis_space.name(*i)))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// A graded commutative algebra presented on an explicit basis, with the
/// product as an arity-2 degree-0 multilinear map.
#[derive(Debug, Clone)]
pub struct GradedAlgebra {
    pub space: GradedBasisSpace,
    pub product: MultiMap,
    pub unit: Option<Vec1>,
}

impl GradedAlgebra {
    /// Materializes the product table of a [`FreeGCA`].
    pub fn from_free(alg: &FreeGCA) -> Self {
        let space = alg.basis_space().clone();
        let mut product = MultiMap::new(2, 0, Symmetry::Symmetric { degree_shift: 0 });
        for a in 0..alg.dim() {
            for b in a..alg.dim() {
                let v = alg.mul_monomials(a, b);
                if !v.is_zero() {
                    product.add_entry(&[a, b], v, &space);
                }
            }
        }
        GradedAlgebra {
            space,
            product,
            unit: Some(alg.unit()),
        }
    }

    pub fn mul(&self, x: &Vec1, y: &Vec1) -> Vec1 {
        let mut out = Vec1::zero();
        for (a, ca) in x.iter() {
            for (b, cb) in y.iter() {
                let p = self.product.eval(&[*a, *b], &self.space);
                out.add_assign(&p.scaled(&(ca * cb)));
            }
        }
        out
    }

    /// Checks graded commutativity on all basis pairs.
    pub fn check_commutative(&self) -> Result<()> {
        for a in self.space.indices() {
            for b in self.space.indices() {
                let ab = self.product.eval(&[a, b], &self.space);
                let ba = self.product.eval(&[b, a], &self.space);
                let sign = Scalar::sign_pow(self.space.degree(a) * self.space.degree(b));
                let mut diff = ab.clone();
                diff.sub_assign(&ba.scaled(&sign));
                if !diff.is_zero() {
                    return Err(Error::Structural(format!(
                        "product not graded-commutative on ({}, {})",
                        self.space.name(a),
                        self.space.name(b)
                    )));
                }
            }
        }
        Ok(())
    }

    /// Checks associativity on all basis triples.
    pub fn check_associative(&self) -> Result<()> {
        for a in self.space.indices() {
            let va = Vec1::basis(a);
            for b in self.space.indices() {
                let vb = Vec1::basis(b);
                let ab = self.mul(&va, &vb);
                for c in self.space.indices() {
                    let vc = Vec1::basis(c);
                    let left = self.mul(&ab, &vc);
                    let right = self.mul(&va, &self.mul(&vb, &vc));
                    let mut diff = left;
                    diff.sub_assign(&right);
                    if !diff.is_zero() {
                        return Err(Error::Structural(format!(
                            "product not associative on ({}, {}, {})",
                            self.space.name(a),
                            self.space.name(b),
                            self.space.name(c)
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::BasisElement;

    fn exterior2() -> Arc<FreeGCA> {
        FreeGCA::new(GradedBasisSpace::from_pairs(&[("x", 1), ("y", 1)]), 8)
    }

    #[test]
    fn exterior_algebra_basis() {
        let a = exterior2();
        // 1, x, y, xy
        assert_eq!(a.dim(), 4);
        let x = a.generator_vec(0);
        let y = a.generator_vec(1);
        let xy = a.mul(&x, &y);
        let yx = a.mul(&y, &x);
        assert_eq!(xy, yx.neg());
        assert!(a.mul(&x, &x).is_zero());
    }

    #[test]
    fn weight_truncation() {
        let gens = GradedBasisSpace::new(vec![
            BasisElement { name: "t".into(), degree: 0, weight: Some(1) },
        ])
        .unwrap();
        let a = FreeGCA::new(gens, 3);
        // 1, t, t^2, t^3
        assert_eq!(a.dim(), 4);
        let t = a.generator_vec(0);
        let t2 = a.mul(&t, &t);
        let t3 = a.mul(&t2, &t);
        assert!(!t3.is_zero());
        assert!(a.mul(&t3, &t).is_zero()); // truncated
    }

    #[test]
    fn zero_weight_generators_do_not_truncate() {
        let gens = GradedBasisSpace::new(vec![
            BasisElement { name: "a".into(), degree: 1, weight: Some(0) },
            BasisElement { name: "t".into(), degree: 0, weight: Some(1) },
        ])
        .unwrap();
        let alg = FreeGCA::new(gens, 2);
        // 1, a, t, at, t2, at2
        assert_eq!(alg.dim(), 6);
    }

    #[test]
    fn derivation_leibniz() {
        let a = exterior2();
        // d with d(x) = xy? degree must be |xy| - |x| = 1. d(y) = 0.
        let xy = {
            let x = a.generator_vec(0);
            let y = a.generator_vec(1);
            a.mul(&x, &y)
        };
        let gen_vals = move |g: usize| if g == 0 { xy.clone() } else { Vec1::zero() };
        // d(xy) = d(x)y - x d(y) = (xy)y = 0
        let idx_xy = a.monomial_index(&vec![0, 1]).unwrap();
        let v = a.derivation_on_monomial(&gen_vals, 1, idx_xy);
        assert!(v.is_zero());
    }

    #[test]
    fn partial_derivative_signs() {
        let a = exterior2();
        let idx_xy = a.monomial_index(&vec![0, 1]).unwrap();
        // ∂/∂y (xy) = -x for odd x,y (derivative moves past x).
        let d = a.partial_derivative(idx_xy, 1);
        let x_idx = a.monomial_index(&vec![0]).unwrap();
        assert_eq!(d, Vec1::single(x_idx, -Scalar::one()));
        // ∂/∂x (xy) = y.
        let d = a.partial_derivative(idx_xy, 0);
        let y_idx = a.monomial_index(&vec![1]).unwrap();
        assert_eq!(d, Vec1::single(y_idx, Scalar::one()));
    }

    #[test]
    fn graded_algebra_axioms() {
        let a = exterior2();
        let ga = GradedAlgebra::from_free(&a);
        ga.check_commutative().unwrap();
        ga.check_associative().unwrap();
    }

    #[test]
    fn even_partial_derivative_multiplicity() {
        let gens = GradedBasisSpace::new(vec![
            BasisElement { name: "t".into(), degree: 0, weight: Some(1) },
        ])
        .unwrap();
        let a = FreeGCA::new(gens, 4);
        let t3 = a.monomial_index(&vec![0, 0, 0]).unwrap();
        let t2 = a.monomial_index(&vec![0, 0]).unwrap();
        assert_eq!(a.partial_derivative(t3, 0), Vec1::single(t2, Scalar::from_int(3)));
    }
}
