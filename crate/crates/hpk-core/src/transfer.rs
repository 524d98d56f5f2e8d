//! Contractions, the homological perturbation lemma, semifull-contraction
//! verification, and homotopy transfer of derived Poisson structures via the
//! shuffle-sum recursions (leading homotopy for the quasi-isomorphism,
//! leading projection for the transferred brackets).

use crate::algebra::FreeGCA;
use crate::graded::{
    compositions_last_may_vanish, multi_shuffles, Error, GradedBasisSpace, MultiMap, Result,
    Symmetry, Vec1,
};
use crate::linf::{
    defect_terms, word_names, Bracket, CheckConfig, DerivedPoissonStructure, LInfStructure,
    MorphismData, Report, Violation,
};
use crate::scalar::Scalar;
use std::collections::BTreeMap;
use std::sync::Arc;

/// A degree-homogeneous linear map between basis spaces, stored column-wise.
#[derive(Debug, Clone, PartialEq)]
pub struct LinMap {
    pub degree: i64,
    cols: BTreeMap<usize, Vec1>,
}

impl LinMap {
    pub fn zero(degree: i64) -> Self {
        LinMap {
            degree,
            cols: BTreeMap::new(),
        }
    }

    pub fn identity(space: &GradedBasisSpace) -> Self {
        let mut cols = BTreeMap::new();
        for i in space.indices() {
            cols.insert(i, Vec1::basis(i));
        }
        LinMap { degree: 0, cols }
    }

    pub fn set_column(&mut self, i: usize, v: Vec1) {
        if v.is_zero() {
            self.cols.remove(&i);
        } else {
            self.cols.insert(i, v);
        }
    }

    pub fn column(&self, i: usize) -> Vec1 {
        self.cols.get(&i).cloned().unwrap_or_else(Vec1::zero)
    }

    pub fn apply(&self, v: &Vec1) -> Vec1 {
        let mut out = Vec1::zero();
        for (i, c) in v.iter() {
            if let Some(col) = self.cols.get(i) {
                out.add_assign(&col.scaled(c));
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.cols.values().all(|v| v.is_zero())
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LinMap) -> LinMap {
        let mut cols = BTreeMap::new();
        for (i, v) in &other.cols {
            let img = self.apply(v);
            if !img.is_zero() {
                cols.insert(*i, img);
            }
        }
        LinMap {
            degree: self.degree + other.degree,
            cols,
        }
    }

    pub fn add_assign(&mut self, other: &LinMap) {
        for (i, v) in &other.cols {
            let mut cur = self.column(*i);
            cur.add_assign(v);
            self.set_column(*i, cur);
        }
    }

    pub fn sub(&self, other: &LinMap) -> LinMap {
        let mut out = self.clone();
        for (i, v) in &other.cols {
            let mut cur = out.column(*i);
            cur.sub_assign(v);
            out.set_column(*i, cur);
        }
        out
    }

    pub fn scaled(&self, s: &Scalar) -> LinMap {
        LinMap {
            degree: self.degree,
            cols: self.cols.iter().map(|(i, v)| (*i, v.scaled(s))).collect(),
        }
    }

    /// Builds a map from a graded derivation's generator values.
    pub fn from_derivation(algebra: &FreeGCA, gen_values: &dyn Fn(usize) -> Vec1, degree: i64) -> Self {
        let mut cols = BTreeMap::new();
        for idx in 0..algebra.dim() {
            let img = algebra.derivation_on_monomial(gen_values, degree, idx);
            if !img.is_zero() {
                cols.insert(idx, img);
            }
        }
        LinMap { degree, cols }
    }
}

/// One side of a contraction: a free graded-commutative algebra with a
/// differential.
#[derive(Debug, Clone)]
pub struct ComplexSide {
    pub algebra: Arc<FreeGCA>,
    pub d: LinMap,
}

impl ComplexSide {
    pub fn space(&self) -> &GradedBasisSpace {
        self.algebra.basis_space()
    }
}

/// Contraction data `(σ, τ, h)` of the big side onto the small side:
/// `στ = id`, `hd + dh = τσ - id`, `σh = 0`, `hτ = 0`, `h² = 0`.
#[derive(Debug, Clone)]
pub struct Contraction {
    pub big: ComplexSide,
    pub small: ComplexSide,
    pub sigma: LinMap,
    pub tau: LinMap,
    pub h: LinMap,
}

/// A perturbation `δ` of the big differential; `(d + δ)² = 0` is checked,
/// and all perturbation series must terminate within `series_bound`
/// applications of `hδ` (guaranteed when `hδ` raises a weight).
///
/// On a weight-truncated algebra the square-zero condition is checked up to
/// the declared truncation weight: inputs and output components above it
/// belong to the workspace band reserved by the truncation.
#[derive(Debug, Clone)]
pub struct Perturbation {
    pub delta: LinMap,
    pub series_bound: usize,
    /// When set, the square-zero precondition is verified on inputs and
    /// output components of weight at most this bound.
    pub truncation_weight: Option<i64>,
}

fn push_violation(report: &mut Report, check: &str, space: &GradedBasisSpace, idx: usize, defect: &Vec1) {
    report.push(Violation {
        check: check.into(),
        arity: 1,
        word: vec![space.name(idx).to_string()],
        defect: defect_terms(space, defect),
    });
}

/// Verifies the five contraction side conditions exactly on every basis
/// element within the weight budget; with `semifull`, additionally the
/// multiplicative identities (A1)–(A5) on spanning pairs within the budget.
/// Weight-truncated algebras reserve their top weights as workspace, so
/// identities are quantified below the budget only.
pub fn validate_contraction(c: &Contraction, semifull: bool, weight_budget: i64) -> Report {
    let mut report = Report::default();
    let big_space = c.big.space();
    let small_space = c.small.space();
    let in_budget = |i: usize| big_space.weight(i) <= weight_budget;
    // Defect components above the budget belong to the truncation workspace.
    let clip = |v: &Vec1| -> Vec1 {
        let mut out = Vec1::zero();
        for (m, c) in v.iter() {
            if big_space.weight(*m) <= weight_budget {
                out.add_term(*m, c.clone());
            }
        }
        out
    };

    // στ = id
    for x in small_space.indices() {
        let mut v = c.sigma.apply(&c.tau.column(x));
        v.sub_assign(&Vec1::basis(x));
        if !v.is_zero() {
            push_violation(&mut report, "sigma-tau-identity", small_space, x, &v);
        }
    }
    // hd + dh = τσ - id
    for a in big_space.indices().filter(|&a| in_budget(a)) {
        let va = Vec1::basis(a);
        let mut lhs = c.h.apply(&c.big.d.apply(&va));
        lhs.add_assign(&c.big.d.apply(&c.h.apply(&va)));
        let mut rhs = c.tau.apply(&c.sigma.apply(&va));
        rhs.sub_assign(&va);
        lhs.sub_assign(&rhs);
        let lhs = clip(&lhs);
        if !lhs.is_zero() {
            push_violation(&mut report, "homotopy-identity", big_space, a, &lhs);
        }
    }
    // σ, τ chain maps
    for x in small_space.indices() {
        let mut v = c.big.d.apply(&c.tau.column(x));
        v.sub_assign(&c.tau.apply(&c.small.d.column(x)));
        let v = clip(&v);
        if !v.is_zero() {
            push_violation(&mut report, "tau-chain-map", small_space, x, &v);
        }
    }
    for a in big_space.indices().filter(|&a| in_budget(a)) {
        let mut v = c.small.d.apply(&c.sigma.column(a));
        v.sub_assign(&c.sigma.apply(&c.big.d.column(a)));
        if !v.is_zero() {
            push_violation(&mut report, "sigma-chain-map", big_space, a, &v);
        }
    }
    // Side conditions σh = 0, hτ = 0, h² = 0
    for a in big_space.indices().filter(|&a| in_budget(a)) {
        let ha = c.h.column(a);
        let sh = c.sigma.apply(&ha);
        if !sh.is_zero() {
            push_violation(&mut report, "sigma-h-zero", big_space, a, &sh);
        }
        let hh = clip(&c.h.apply(&ha));
        if !hh.is_zero() {
            push_violation(&mut report, "h-squared-zero", big_space, a, &hh);
        }
    }
    for x in small_space.indices() {
        let ht = c.h.apply(&c.tau.column(x));
        if !ht.is_zero() {
            push_violation(&mut report, "h-tau-zero", small_space, x, &ht);
        }
    }

    if semifull {
        let balg = &c.big.algebra;
        let salg = &c.small.algebra;
        let pair_ok = |i: usize, j: usize| {
            big_space.weight(i) + big_space.weight(j) <= weight_budget
        };
        for a in big_space.indices().filter(|&a| in_budget(a)) {
            for b in big_space.indices() {
                if !pair_ok(a, b) {
                    continue;
                }
                let va = Vec1::basis(a);
                let vb = Vec1::basis(b);
                let ha = c.h.apply(&va);
                let hb = c.h.apply(&vb);
                // arg = (-1)^{|a|+1} h(a)·b + a·h(b)
                let sign = Scalar::sign_pow(big_space.degree(a) + 1);
                let mut arg = balg.mul(&ha, &vb).scaled(&sign);
                arg.add_assign(&balg.mul(&va, &hb));
                // (A1) h(arg) = h(a)h(b)
                let mut lhs = c.h.apply(&arg);
                lhs.sub_assign(&balg.mul(&ha, &hb));
                let lhs = clip(&lhs);
                if !lhs.is_zero() {
                    report.push(Violation {
                        check: "semifull-A1".into(),
                        arity: 2,
                        word: word_names(big_space, &[a, b]),
                        defect: defect_terms(big_space, &lhs),
                    });
                }
                // (A3) σ(arg) = 0
                let s = c.sigma.apply(&arg);
                if !s.is_zero() {
                    report.push(Violation {
                        check: "semifull-A3".into(),
                        arity: 2,
                        word: word_names(big_space, &[a, b]),
                        defect: defect_terms(small_space, &s),
                    });
                }
            }
            for x in small_space.indices() {
                let va = Vec1::basis(a);
                let tx = c.tau.column(x);
                if big_space.weight(a) > weight_budget {
                    continue;
                }
                let prod = balg.mul(&va, &tx);
                // (A2) h(a·τx) = h(a)·τx
                let mut lhs = c.h.apply(&prod);
                lhs.sub_assign(&balg.mul(&c.h.apply(&va), &tx));
                let lhs = clip(&lhs);
                if !lhs.is_zero() {
                    report.push(Violation {
                        check: "semifull-A2".into(),
                        arity: 2,
                        word: vec![
                            big_space.name(a).to_string(),
                            format!("τ({})", small_space.name(x)),
                        ],
                        defect: defect_terms(big_space, &lhs),
                    });
                }
                // (A4) σ(a·τx) = σ(a)·x
                let mut lhs = c.sigma.apply(&prod);
                lhs.sub_assign(&salg.mul(&c.sigma.apply(&va), &Vec1::basis(x)));
                if !lhs.is_zero() {
                    report.push(Violation {
                        check: "semifull-A4".into(),
                        arity: 2,
                        word: vec![
                            big_space.name(a).to_string(),
                            format!("τ({})", small_space.name(x)),
                        ],
                        defect: defect_terms(small_space, &lhs),
                    });
                }
            }
        }
        // (A5) τ(xy) = τ(x)τ(y)
        for x in small_space.indices() {
            for y in small_space.indices() {
                let prod = salg.mul_monomials(x, y);
                let mut lhs = c.tau.apply(&prod);
                lhs.sub_assign(&c.big.algebra.mul(&c.tau.column(x), &c.tau.column(y)));
                let lhs = clip(&lhs);
                if !lhs.is_zero() {
                    report.push(Violation {
                        check: "semifull-A5".into(),
                        arity: 2,
                        word: word_names(small_space, &[x, y]),
                        defect: defect_terms(big_space, &lhs),
                    });
                }
            }
        }
    }
    report.sort();
    report
}

/// The homological perturbation lemma: given a contraction and a
/// perturbation `δ` of the big differential, produces the perturbed
/// contraction `(σ̆, τ̆, h̆)` of `(A, d+δ)` onto `(B, d_B + δ_B)` with
/// `δ_B = Σ σδ(hδ)^i τ`. All series must terminate within the declared
/// bound.
pub fn perturb_contraction(c: &Contraction, p: &Perturbation) -> Result<Contraction> {
    // (d + δ)² = 0, checked on the basis up to the truncation weight.
    let d_pert = {
        let mut d = c.big.d.clone();
        d.add_assign(&p.delta);
        d
    };
    let space = c.big.space();
    for a in space.indices() {
        if let Some(w) = p.truncation_weight {
            if space.weight(a) > w {
                continue;
            }
        }
        let sq = d_pert.apply(&d_pert.column(a));
        let bad = match p.truncation_weight {
            None => !sq.is_zero(),
            Some(w) => sq.iter().any(|(m, _)| space.weight(*m) <= w),
        };
        if bad {
            return Err(Error::Structural(format!(
                "perturbed differential does not square to zero on {}",
                space.name(a)
            )));
        }
    }

    let h_delta = c.h.compose(&p.delta);
    let delta_h = p.delta.compose(&c.h);

    // τ̆ = Σ (hδ)^i τ
    let mut tau_breve = LinMap::zero(0);
    let mut term = c.tau.clone();
    let mut i = 0usize;
    while !term.is_zero() {
        tau_breve.add_assign(&term);
        term = h_delta.compose(&term);
        i += 1;
        if i > p.series_bound {
            return Err(Error::NonTermination(i));
        }
    }
    // σ̆ = Σ σ(δh)^i
    let mut sigma_breve = LinMap::zero(0);
    let mut term = c.sigma.clone();
    let mut i = 0usize;
    while !term.is_zero() {
        sigma_breve.add_assign(&term);
        term = term.compose(&delta_h);
        i += 1;
        if i > p.series_bound {
            return Err(Error::NonTermination(i));
        }
    }
    // h̆ = Σ h(δh)^i
    let mut h_breve = LinMap::zero(-1);
    let mut term = c.h.clone();
    let mut i = 0usize;
    while !term.is_zero() {
        h_breve.add_assign(&term);
        term = term.compose(&delta_h);
        i += 1;
        if i > p.series_bound {
            return Err(Error::NonTermination(i));
        }
    }
    // δ_B = Σ σδ(hδ)^i τ = σ δ τ̆
    let delta_b = c.sigma.compose(&p.delta).compose(&tau_breve);
    let mut small_d = c.small.d.clone();
    small_d.add_assign(&delta_b);

    Ok(Contraction {
        big: ComplexSide {
            algebra: c.big.algebra.clone(),
            d: d_pert,
        },
        small: ComplexSide {
            algebra: c.small.algebra.clone(),
            d: small_d,
        },
        sigma: sigma_breve,
        tau: tau_breve,
        h: h_breve,
    })
}

/// Homotopy transfer of a derived Poisson structure along a semifull
/// contraction. Returns the transferred structure on the small side and the
/// quasi-isomorphism Taylor coefficients `τ_∞` (leading-homotopy recursion).
///
/// The recursion, at arity `n+1` with distinguished last argument `y`:
/// sum over `p ≥ 2`, compositions `(i_1,…,i_p)` of `n` with
/// `i_1,…,i_{p-1} ≥ 1`, `i_p ≥ 0`, and multi-shuffles, of
/// `1/(p-1)! · h q_p(τ_{i_1}(…), …, τ_{i_p+1}(…, y))`
/// for `τ_{n+1}`, and the same with leading `σ` for `ℓ_{n+1}`.
pub fn transfer_structure(
    c: &Contraction,
    src: &DerivedPoissonStructure,
    arity_cap: usize,
    validation_weight_budget: i64,
) -> Result<(DerivedPoissonStructure, MorphismData)> {
    transfer_structure_budgeted(c, src, arity_cap, validation_weight_budget, usize::MAX)
}

/// As [`transfer_structure`], restricted to small-side words of total
/// generator length within `word_budget` (sub-words of admissible words are
/// admissible, so the recursion stays closed).
pub fn transfer_structure_budgeted(
    c: &Contraction,
    src: &DerivedPoissonStructure,
    arity_cap: usize,
    validation_weight_budget: i64,
    word_budget: usize,
) -> Result<(DerivedPoissonStructure, MorphismData)> {
    let k = src.k();
    let big_space = c.big.space();
    let small_space = c.small.space();

    // src q_1 must be the big differential.
    for a in big_space.indices() {
        let mut diff = src.linf.q(1, &[a])?;
        diff.sub_assign(&c.big.d.column(a));
        if !diff.is_zero() {
            return Err(Error::Argument(format!(
                "source q_1 differs from the contraction differential on {}",
                big_space.name(a)
            )));
        }
    }
    let validation = validate_contraction(c, true, validation_weight_budget);
    if !validation.passed() {
        return Err(Error::Structural(format!(
            "contraction failed semifull validation: first violation {:?}",
            validation.violations.first()
        )));
    }

    let shift = k - 1;
    let mut taus: Vec<MultiMap> = Vec::new();
    let mut ells: Vec<MultiMap> = Vec::new();

    // τ_1 = τ, ℓ_1 = d_B.
    let mut tau1 = MultiMap::new(1, 0, Symmetry::Symmetric { degree_shift: shift });
    let mut ell1 = MultiMap::new(1, 1, Symmetry::Symmetric { degree_shift: shift });
    for x in small_space.indices() {
        let t = c.tau.column(x);
        if !t.is_zero() {
            tau1.add_entry(&[x], t, small_space);
        }
        let d = c.small.d.column(x);
        if !d.is_zero() {
            ell1.add_entry(&[x], d, small_space);
        }
    }
    taus.push(tau1);
    ells.push(ell1);

    let cost = crate::linf::monomial_cost(&c.small.algebra);
    for arity in 2..=arity_cap {
        let n = arity - 1;
        let mut tau_n = MultiMap::new(arity, (k - 1) * (arity as i64 - 1) - 1, Symmetry::Symmetric { degree_shift: shift });
        let mut ell_n = MultiMap::new(arity, k * (arity as i64 - 1) + 2 - arity as i64, Symmetry::Symmetric { degree_shift: shift });
        let words = crate::linf::spanning_words(small_space, shift, arity, word_budget, &cost);
        for w in &words {
            let xs = &w[..n];
            let y = w[n];
            let xs_shifted: Vec<i64> = xs.iter().map(|&i| small_space.degree(i) + shift).collect();
            let mut tau_val = Vec1::zero();
            let mut ell_val = Vec1::zero();
            for p in 2..=(n + 1).min(src.linf.arity_cap) {
                if src.linf.bracket(p).is_none() {
                    continue;
                }
                let norm = Scalar::inv_factorial(p - 1);
                for comp in compositions_last_may_vanish(n, p) {
                    for sh in multi_shuffles(&comp) {
                        let sign = crate::graded::koszul_sign(&sh, &xs_shifted).expect("shuffle");
                        // Assemble block arguments.
                        let mut args: Vec<Vec1> = Vec::with_capacity(p);
                        let mut pos = 0usize;
                        let mut vanished = false;
                        for (j, &size) in comp.iter().enumerate() {
                            let mut block: Vec<usize> =
                                sh[pos..pos + size].iter().map(|&i| xs[i]).collect();
                            pos += size;
                            let t = if j + 1 == p {
                                block.push(y);
                                taus[size].eval(&block, small_space)
                            } else {
                                taus[size - 1].eval(&block, small_space)
                            };
                            if t.is_zero() {
                                vanished = true;
                                break;
                            }
                            args.push(t);
                        }
                        if vanished {
                            continue;
                        }
                        let inner = src.linf.q_vecs(p, &args)?;
                        if inner.is_zero() {
                            continue;
                        }
                        let scaled = inner.scaled(&(Scalar::from_int(sign) * norm.clone()));
                        tau_val.add_assign(&c.h.apply(&scaled));
                        ell_val.add_assign(&c.sigma.apply(&scaled));
                    }
                }
            }
            if !tau_val.is_zero() {
                tau_n.add_entry(w, tau_val, small_space);
            }
            if !ell_val.is_zero() {
                ell_n.add_entry(w, ell_val, small_space);
            }
        }
        taus.push(tau_n);
        ells.push(ell_n);
    }

    let mut linf = LInfStructure::new(small_space.clone(), k, arity_cap);
    for (i, ell) in ells.into_iter().enumerate() {
        if !ell.is_zero() {
            linf.set_bracket(i + 1, Bracket::Table(ell));
        }
    }
    let dst = DerivedPoissonStructure {
        algebra: c.small.algebra.clone(),
        linf,
    };
    let tau_infinity = MorphismData {
        k,
        src_space: small_space.clone(),
        dst_space: big_space.clone(),
        taylor: taus,
    };
    Ok((dst, tau_infinity))
}

/// Convenience: the identity contraction of a complex onto itself.
pub fn identity_contraction(side: &ComplexSide) -> Contraction {
    Contraction {
        big: side.clone(),
        small: side.clone(),
        sigma: LinMap::identity(side.space()),
        tau: LinMap::identity(side.space()),
        h: LinMap::zero(-1),
    }
}

/// Full transfer invariant suite used by tests and the CLI: the transferred
/// structure passes Leibniz and Jacobi, and `τ_∞` is a morphism of derived
/// Poisson algebras from the transferred structure to the source.
pub fn verify_transfer(
    dst: &DerivedPoissonStructure,
    tau_infinity: &MorphismData,
    src: &DerivedPoissonStructure,
    cfg: &CheckConfig,
) -> Result<Report> {
    let mut report = crate::linf::check_leibniz(dst, cfg)?;
    let cost = crate::linf::monomial_cost(&dst.algebra);
    report.merge(crate::linf::check_jacobi(&dst.linf, cfg, &cost)?);
    report.merge(crate::linf::check_morphism(tau_infinity, dst, src, cfg)?);
    report.sort();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::BasisElement;

    /// A contraction of an exterior algebra on (x, dx) onto its unit line:
    /// d(x) = y with h the inverse; classic two-term acyclic complex
    /// tensored with nothing. Built on generators x (deg 0, weight 1),
    /// y (deg 1, weight 1), truncation keeps x, y, xy out to weight 2.
    fn acyclic_side() -> ComplexSide {
        let gens = GradedBasisSpace::new(vec![
            BasisElement { name: "x".into(), degree: 0, weight: Some(1) },
            BasisElement { name: "y".into(), degree: 1, weight: Some(1) },
        ])
        .unwrap();
        let algebra = FreeGCA::new(gens, 2);
        let d = {
            let alg = algebra.clone();
            let y = alg.generator_vec(1);
            LinMap::from_derivation(&algebra, &move |g| if g == 0 { y.clone() } else { Vec1::zero() }, 1)
        };
        ComplexSide { algebra, d }
    }

    fn point_side() -> ComplexSide {
        let gens = GradedBasisSpace::new(vec![]).unwrap();
        let algebra = FreeGCA::new(gens, 0);
        ComplexSide {
            algebra: algebra.clone(),
            d: LinMap::zero(1),
        }
    }

    /// The standard contraction of the Koszul complex K(x, dx) onto the
    /// ground field.
    fn koszul_contraction() -> Contraction {
        let big = acyclic_side();
        let small = point_side();
        let alg = big.algebra.clone();
        let salg = small.algebra.clone();
        let unit_small = salg.unit_index();
        let unit_big = alg.unit_index();

        let mut sigma = LinMap::zero(0);
        sigma.set_column(unit_big, Vec1::basis(unit_small));
        let mut tau = LinMap::zero(0);
        tau.set_column(unit_small, Vec1::basis(unit_big));
        // h: x^a y -> -x^{a+1}/(a+1); normalized so hd + dh = τσ - id.
        let mut h = LinMap::zero(-1);
        for (idx, m) in alg.monomials() {
            let ycount = m.iter().filter(|&&g| g == 1).count();
            if ycount == 1 {
                let xcount = m.iter().filter(|&&g| g == 0).count();
                let m2: Vec<usize> = vec![0; xcount + 1];
                if let Some(t) = alg.monomial_index(&m2) {
                    h.set_column(idx, Vec1::single(t, Scalar::ratio(-1, xcount as i64 + 1)));
                }
            }
        }
        Contraction {
            big,
            small,
            sigma,
            tau,
            h,
        }
    }

    #[test]
    fn identity_contraction_validates() {
        let side = acyclic_side();
        // The identity contraction is not valid here because d ≠ 0 breaks
        // hd + dh = τσ - id = 0 ... actually with h = 0 and τσ = id it holds.
        let c = identity_contraction(&side);
        let r = validate_contraction(&c, true, 10);
        assert!(r.passed(), "{:?}", r.violations);
    }

    #[test]
    fn koszul_contraction_validates() {
        let c = koszul_contraction();
        let r = validate_contraction(&c, false, 10);
        assert!(r.passed(), "{:?}", r.violations);
    }

    #[test]
    fn broken_homotopy_fails_validation() {
        // Replace h by h + τσh-like junk: here simply add τσ to h's column
        // on y, breaking h² = 0 / degree structure.
        let mut c = koszul_contraction();
        let alg = c.big.algebra.clone();
        let y = alg.generator_monomial(1);
        let x = alg.generator_monomial(0);
        let mut col = c.h.column(y);
        col.add_assign(&Vec1::basis(x).scaled(&Scalar::from_int(1)));
        // Keep same map twice: h(h(y)) picks up x-terms ≠ 0 indirectly via
        // the homotopy identity.
        c.h.set_column(y, col);
        let r = validate_contraction(&c, false, 10);
        assert!(!r.passed());
    }

    #[test]
    fn perturb_by_zero_is_identity() {
        let c = koszul_contraction();
        let p = Perturbation {
            delta: LinMap::zero(1),
            series_bound: 8,
            truncation_weight: None,
        };
        let c2 = perturb_contraction(&c, &p).unwrap();
        assert_eq!(c2.sigma, c.sigma);
        assert_eq!(c2.tau, c.tau);
        assert_eq!(c2.h, c.h);
        assert_eq!(c2.big.d, c.big.d);
        assert_eq!(c2.small.d, c.small.d);
    }

    #[test]
    fn perturbed_contraction_satisfies_side_conditions() {
        // Perturb the acyclic contraction by δ = x·d (weight-raising):
        // δ(x^a y…) moves along the algebra; use δ = multiplication-by-x
        // composed with d, a degree +1 weight-raising perturbation.
        let c = koszul_contraction();
        let alg = c.big.algebra.clone();
        let mut delta = LinMap::zero(1);
        for (idx, _m) in alg.monomials() {
            let dv = c.big.d.column(idx);
            let x = alg.generator_vec(0);
            let img = alg.mul(&x, &dv);
            delta.set_column(idx, img);
        }
        // (d + δ)² = d x d ... check: δδ = xdxd = x (dx) d - xx dd; exactness
        // not guaranteed, so only run if the square vanishes.
        let p = Perturbation { delta, series_bound: 16, truncation_weight: None };
        match perturb_contraction(&c, &p) {
            Ok(c2) => {
                let r = validate_contraction(&c2, false, 10);
                assert!(r.passed(), "{:?}", r.violations);
            }
            Err(Error::Structural(_)) => {
                // Square nonzero: acceptable for this synthetic δ.
            }
            Err(e) => panic!("unexpected error {e}"),
        }
    }

    #[test]
    fn transfer_along_identity_is_identity() {
        use crate::linf::Bracket;
        let side = acyclic_side();
        let space = side.space().clone();
        let mut linf = LInfStructure::new(space.clone(), 1, 4);
        // q_1 = d as a table.
        let mut q1 = MultiMap::new(1, 1, Symmetry::Symmetric { degree_shift: 0 });
        for i in space.indices() {
            let col = side.d.column(i);
            if !col.is_zero() {
                q1.add_entry(&[i], col, &space);
            }
        }
        linf.set_bracket(1, Bracket::Table(q1));
        let src = DerivedPoissonStructure {
            algebra: side.algebra.clone(),
            linf,
        };
        let c = identity_contraction(&side);
        let (dst, tau) = transfer_structure(&c, &src, 3, 10).unwrap();
        for i in space.indices() {
            assert_eq!(dst.linf.q(1, &[i]).unwrap(), src.linf.q(1, &[i]).unwrap());
        }
        for n in 2..=3 {
            let words = crate::linf::spanning_words(&space, 0, n, usize::MAX, &|_| 1);
            for w in words {
                assert!(dst.linf.q(n, &w).unwrap().is_zero());
            }
        }
        assert!(tau.first_coefficient_is_identity());
    }
}
