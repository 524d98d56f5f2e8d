//! Weight-truncated Fedosov-type construction for a Lie pair over a point.
//!
//! The big algebra is `Λh^∨ ⊗ ΛB^∨ ⊗ S_{≤cap}B^∨ ⊗ ΛB` realized as a free
//! graded-commutative algebra on generators `θ` (degree 1), `η` (degree 1),
//! `χ` (degree 0, weight 1), and polyvector directions `ζ` (degree -1). The
//! Koszul differential `-δ` contracts onto `Λh^∨ ⊗ ΛB`; a torsion-free
//! connection produces the covariant derivative `d^∇`, the unique
//! normalization-compatible correction `X^∇` is solved weight by weight
//! from `Q² = 0` and `h̃X^∇ = 0`, and homotopy transfer of the Schouten
//! dgla along the perturbed contraction reproduces the direct Lie-pair
//! brackets.
//!
//! The internal truncation keeps two spare weights above the requested `N`
//! so that every identity reported at weight ≤ N is computed without
//! truncation artifacts (at most two weight-lowering factors appear in any
//! verified composite).

use crate::algebra::FreeGCA;
use crate::graded::{BasisElement, Error, GradedBasisSpace, MultiMap, Result, Symmetry, Vec1};
use crate::liepair::{build_lie_pair_algebra, CEAlgebra, LiePairData};
use crate::linf::{Bracket, DerivedPoissonStructure, LInfStructure, MorphismData, Report, Violation};
use crate::scalar::Scalar;
use crate::transfer::{
    perturb_contraction, validate_contraction, ComplexSide, Contraction, LinMap, Perturbation,
};
use std::collections::HashMap;
use std::sync::{Arc, RwLock};

/// A torsion-free extension of the Bott connection: the `B`-direction part
/// `Δ^B` with `Δ^B_{b_i} b_j - Δ^B_{b_j} b_i = [b_i, b_j]_B`.
#[derive(Debug, Clone)]
pub struct ConnectionData {
    /// `gamma[i][j]` = coordinates of `Δ^B_{b_i} b_j` over the `B` basis.
    pub gamma: Vec<Vec<Vec<Scalar>>>,
}

impl ConnectionData {
    /// The canonical torsion-free choice `Δ^B_{b_i} b_j = ½ [b_i, b_j]_B`.
    pub fn antisymmetric_half(pair: &LiePairData) -> Self {
        let nb = pair.dim_b();
        let mut gamma = vec![vec![vec![Scalar::zero(); nb]; nb]; nb];
        for i in 0..nb {
            for j in 0..nb {
                let br = pair.g.bracket_vec(&pair.j_of_b(i), &pair.j_of_b(j));
                for (k, c) in pair.pr_b(&br).into_iter().enumerate() {
                    gamma[i][j][k] = c * Scalar::ratio(1, 2);
                }
            }
        }
        ConnectionData { gamma }
    }

    /// Adds a symmetric bilinear modification (admissible: preserves the
    /// torsion-free constraint).
    pub fn with_symmetric_part(mut self, s: &[(usize, usize, usize, Scalar)]) -> Self {
        for (i, j, k, c) in s {
            self.gamma[*i][*j][*k] += c;
            self.gamma[*j][*i][*k] += c;
        }
        self
    }
}

/// The Fedosov ambient algebra for a Lie pair, with generator bookkeeping.
pub struct FedosovSetup {
    pub pair: LiePairData,
    /// Requested truncation weight.
    pub n: i64,
    /// Internal cap (`n + 3`).
    pub cap: i64,
    pub algebra: Arc<FreeGCA>,
    /// Small side `Λh^∨ ⊗ ΛB`, generator-compatible with the Lie-pair
    /// algebra of [`build_lie_pair_algebra`].
    pub small: Arc<FreeGCA>,
    nh: usize,
    nb: usize,
}

impl FedosovSetup {
    pub fn theta(&self, a: usize) -> usize {
        a
    }
    pub fn eta(&self, i: usize) -> usize {
        self.nh + i
    }
    pub fn chi(&self, i: usize) -> usize {
        self.nh + self.nb + i
    }
    pub fn zeta(&self, i: usize) -> usize {
        self.nh + 2 * self.nb + i
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.nh, self.nb)
    }

    /// The `(p, q, r, s)` signature of a big-algebra monomial.
    pub fn signature(&self, mono_idx: usize) -> (usize, usize, usize, usize) {
        let m = self.algebra.monomial(mono_idx);
        let mut sig = (0usize, 0usize, 0usize, 0usize);
        for &g in m {
            if g < self.nh {
                sig.0 += 1;
            } else if g < self.nh + self.nb {
                sig.1 += 1;
            } else if g < self.nh + 2 * self.nb {
                sig.2 += 1;
            } else {
                sig.3 += 1;
            }
        }
        sig
    }
}

fn dual_name(name: &str) -> String {
    format!("{name}^")
}

/// Builds the ambient algebra with internal cap `N + 2`.
pub fn fedosov_setup(pair: &LiePairData, n: i64) -> Result<FedosovSetup> {
    if n < 2 {
        return Err(Error::Argument("truncation weight must be at least 2".into()));
    }
    let nh = pair.dim_h();
    let nb = pair.dim_b();
    let cap = n + 3;
    let mut gens = Vec::new();
    for &hi in &pair.h_indices {
        gens.push(BasisElement {
            name: dual_name(pair.g.space.name(hi)),
            degree: 1,
            weight: Some(0),
        });
    }
    for &bi in &pair.b_indices {
        gens.push(BasisElement {
            name: format!("{}~", pair.g.space.name(bi)),
            degree: 1,
            weight: Some(0),
        });
    }
    for &bi in &pair.b_indices {
        gens.push(BasisElement {
            name: format!("{}.", pair.g.space.name(bi)),
            degree: 0,
            weight: Some(1),
        });
    }
    for &bi in &pair.b_indices {
        gens.push(BasisElement {
            name: pair.g.space.name(bi).to_string(),
            degree: -1,
            weight: Some(0),
        });
    }
    let algebra = FreeGCA::new(GradedBasisSpace::new(gens)?, cap);

    let mut small_gens = Vec::new();
    for &hi in &pair.h_indices {
        small_gens.push(BasisElement {
            name: dual_name(pair.g.space.name(hi)),
            degree: 1,
            weight: Some(0),
        });
    }
    for &bi in &pair.b_indices {
        small_gens.push(BasisElement {
            name: pair.g.space.name(bi).to_string(),
            degree: -1,
            weight: Some(0),
        });
    }
    let small = FreeGCA::new(GradedBasisSpace::new(small_gens)?, 0);

    Ok(FedosovSetup {
        pair: pair.clone(),
        n,
        cap,
        algebra,
        small,
        nh,
        nb,
    })
}

/// The Koszul-type contraction: `δ` moves a symmetric generator to a wedge
/// generator, `h` is the normalized inverse move (`1/(q+r)` on bidegree
/// `(q, r)`), `σ` projects onto `q = r = 0`, `τ` includes. The contraction
/// differential is `-δ` (extended to the polyvector factor as a Lie
/// derivative, under which the `ζ` directions are invariant).
pub fn build_koszul_contraction(setup: &FedosovSetup) -> Contraction {
    let alg = &setup.algebra;
    let (nh, nb) = setup.dims();
    let _ = nh;

    // -δ as a derivation: χ^i -> -η^i.
    let minus_delta_vals: Vec<Vec1> = (0..alg.generators.dim())
        .map(|g| {
            if (0..nb).any(|i| g == setup.chi(i)) {
                let i = g - setup.chi(0);
                Vec1::basis(alg.generator_monomial(setup.eta(i))).neg()
            } else {
                Vec1::zero()
            }
        })
        .collect();
    let big_d = LinMap::from_derivation(alg, &move |g| minus_delta_vals[g].clone(), 1);

    // σ: kill q > 0 or r > 0; identify θ/ζ monomials with the small basis.
    let mut sigma = LinMap::zero(0);
    let mut tau = LinMap::zero(0);
    for (idx, m) in alg.monomials() {
        let (_, q, r, _) = setup.signature(idx);
        if q == 0 && r == 0 {
            // Translate generator indices: θ_a -> a, ζ_i -> nh + i.
            let word: Vec<usize> = m
                .iter()
                .map(|&g| {
                    if g < setup.nh {
                        g
                    } else {
                        setup.nh + (g - setup.zeta(0))
                    }
                })
                .collect();
            let (s, sm) = setup
                .small
                .normalize_generator_word(&word)
                .expect("small monomial exists");
            sigma.set_column(idx, Vec1::single(sm, Scalar::from_int(s)));
            tau.set_column(sm, Vec1::single(idx, Scalar::from_int(s)));
        }
    }

    // h: (1/(q+r)) Σ_i χ^i ∂/∂η^i on bidegree (q, r) with q + r > 0.
    let mut h = LinMap::zero(-1);
    for (idx, _м) in alg.monomials() {
        let (_, q, r, _) = setup.signature(idx);
        if q == 0 {
            continue;
        }
        let norm = Scalar::ratio(1, (q + r) as i64);
        let mut out = Vec1::zero();
        for i in 0..nb {
            let d = alg.partial_derivative(idx, setup.eta(i));
            if d.is_zero() {
                continue;
            }
            let chi = Vec1::basis(alg.generator_monomial(setup.chi(i)));
            for (m2, c) in d.iter() {
                out.add_assign(&alg.mul(&chi, &Vec1::basis(*m2)).scaled(&(c * &norm)));
            }
        }
        h.set_column(idx, out);
    }

    Contraction {
        big: ComplexSide {
            algebra: alg.clone(),
            d: big_d,
        },
        small: ComplexSide {
            algebra: setup.small.clone(),
            d: LinMap::zero(1),
        },
        sigma,
        tau,
        h,
    }
}

/// The Fedosov data: generator values of `Q = -δ + d^∇ + X^∇` on the
/// function generators `θ, η, χ`, with the solved correction split out.
pub struct FedosovQ {
    /// `d^∇` values on every generator (zero on `ζ`).
    pub dnabla: Vec<Vec1>,
    /// `X^∇` values on the `χ` generators (zero elsewhere), by weight.
    pub xnabla: Vec<Vec<Vec1>>,
    /// Total `Q` values on function generators (`ζ` columns excluded).
    pub q_values: Vec<Vec1>,
}

/// Anticommutator of two odd derivations, as generator values.
fn anticommute(alg: &FreeGCA, a: &[Vec1], b: &[Vec1]) -> Vec<Vec1> {
    let av = a.to_vec();
    let bv = b.to_vec();
    let mut out = Vec::with_capacity(alg.generators.dim());
    for g in 0..alg.generators.dim() {
        let mut v = alg.derivation(&{
            let av = av.clone();
            move |x| av[x].clone()
        }, 1, &bv[g]);
        v.add_assign(&alg.derivation(&{
            let bv = bv.clone();
            move |x| bv[x].clone()
        }, 1, &av[g]));
        out.push(v);
    }
    out
}

/// Builds `d^∇` from the pair and connection, then solves for the unique
/// `X^∇` with `h̃ X^∇ = 0` making `Q² = 0` hold up to weight `N - 1`:
/// at each symmetric weight `w ≥ 2` the equation is linear in the new
/// component with an invertible Koszul-differential leading term. A
/// singular or inconsistent system is a structural error.
pub fn solve_x_nabla(setup: &FedosovSetup, conn: &ConnectionData) -> Result<FedosovQ> {
    let alg = &setup.algebra;
    let (nh, nb) = setup.dims();
    let pair = &setup.pair;
    let ngen = alg.generators.dim();

    // Structure constants in the splitting decomposition g ≅ h ⊕ B.
    // Combined index α: 0..nh are h, nh..nh+nb are B via the splitting.
    let l_vec = |alpha: usize| -> Vec1 {
        if alpha < nh {
            Vec1::basis(pair.h_indices[alpha])
        } else {
            pair.j_of_b(alpha - nh)
        }
    };
    let ell_gen = |alpha: usize| -> usize {
        if alpha < nh {
            setup.theta(alpha)
        } else {
            setup.eta(alpha - nh)
        }
    };
    let nl = nh + nb;
    // f[alpha][beta][gamma]
    let mut f = vec![vec![vec![Scalar::zero(); nl]; nl]; nl];
    for a in 0..nl {
        for b in 0..nl {
            let br = pair.g.bracket_vec(&l_vec(a), &l_vec(b));
            let hpart = pair.pr_h(&br);
            let bpart = pair.pr_b(&br);
            for (c, v) in hpart.into_iter().enumerate() {
                f[a][b][c] = v;
            }
            for (c, v) in bpart.into_iter().enumerate() {
                f[a][b][nh + c] = v;
            }
        }
    }
    // Connection matrices: nabla_{h_a} b_j (Bott) and Δ^B.
    let mut conn_matrix = vec![vec![vec![Scalar::zero(); nb]; nb]; nl];
    for a in 0..nh {
        for j in 0..nb {
            let br = pair.g.bracket_vec(&Vec1::basis(pair.h_indices[a]), &pair.j_of_b(j));
            for (k, v) in pair.pr_b(&br).into_iter().enumerate() {
                conn_matrix[a][j][k] = v;
            }
        }
    }
    for i in 0..nb {
        for j in 0..nb {
            for k in 0..nb {
                conn_matrix[nh + i][j][k] = conn.gamma[i][j][k].clone();
            }
        }
    }

    // d^∇ generator values.
    let mut dnabla = vec![Vec1::zero(); ngen];
    for gamma in 0..nl {
        let mut v = Vec1::zero();
        for a in 0..nl {
            for b in 0..nl {
                let c = &f[a][b][gamma];
                if c.is_zero() {
                    continue;
                }
                if let Some((s, idx)) =
                    alg.normalize_generator_word(&[ell_gen(a), ell_gen(b)])
                {
                    v.add_term(idx, c * &Scalar::ratio(-1, 2) * Scalar::from_int(s));
                }
            }
        }
        dnabla[ell_gen(gamma)] = v;
    }
    for k in 0..nb {
        let mut v = Vec1::zero();
        for alpha in 0..nl {
            for j in 0..nb {
                let c = &conn_matrix[alpha][j][k];
                if c.is_zero() {
                    continue;
                }
                if let Some((s, idx)) =
                    alg.normalize_generator_word(&[ell_gen(alpha), setup.chi(j)])
                {
                    v.add_term(idx, -c * &Scalar::from_int(s));
                }
            }
        }
        dnabla[setup.chi(k)] = v;
    }

    // Torsion-free check: [δ, d^∇] must vanish (δ = minus the contraction
    // differential). On θ/η generators this is automatic; on χ it encodes
    // the torsion of Δ^B.
    let delta_vals: Vec<Vec1> = (0..ngen)
        .map(|g| {
            if (0..nb).any(|i| g == setup.chi(i)) {
                Vec1::basis(alg.generator_monomial(setup.eta(g - setup.chi(0))))
            } else {
                Vec1::zero()
            }
        })
        .collect();
    let comm = anticommute(alg, &delta_vals, &dnabla);
    for (g, v) in comm.iter().enumerate() {
        if !v.is_zero() {
            return Err(Error::Structural(format!(
                "connection is not torsion-free: [δ, d^∇] ≠ 0 on {}",
                alg.generators.name(g)
            )));
        }
    }

    // (d^∇)² must vanish on θ, η (Jacobi); on χ it is the curvature feeding
    // the weight-2 correction.
    let dd = anticommute(alg, &dnabla, &dnabla);
    // anticommute(d, d) = 2 d², so halve.
    let dd: Vec<Vec1> = dd.iter().map(|v| v.scaled(&Scalar::ratio(1, 2))).collect();
    for a in 0..nl {
        if !dd[ell_gen(a)].is_zero() {
            return Err(Error::Structural(
                "covariant differential fails to square to zero on the exterior part".into(),
            ));
        }
    }

    // χ-monomial enumeration by weight (pure χ words).
    let chi_monos_of_weight = |w: usize| -> Vec<Vec<usize>> {
        fn rec(nb: usize, w: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if cur.len() == w {
                out.push(cur.clone());
                return;
            }
            for i in start..nb {
                cur.push(i);
                rec(nb, w, i, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(nb, w, 0, &mut Vec::new(), &mut out);
        out
    };

    // h̃ on a function element (no ζ): (1/(q+r)) Σ χ^i ∂_{η^i}.
    let h_tilde = |v: &Vec1| -> Vec1 {
        let mut out = Vec1::zero();
        for (idx, c) in v.iter() {
            let (_, q, r, _) = setup.signature(*idx);
            if q == 0 {
                continue;
            }
            let norm = Scalar::ratio(1, (q + r) as i64);
            for i in 0..nb {
                let d = alg.partial_derivative(*idx, setup.eta(i));
                if d.is_zero() {
                    continue;
                }
                let chi = Vec1::basis(alg.generator_monomial(setup.chi(i)));
                for (m2, c2) in d.iter() {
                    out.add_assign(&alg.mul(&chi, &Vec1::basis(*m2)).scaled(&(c * c2 * norm.clone())));
                }
            }
        }
        out
    };

    // Solve weights 2..=N+1, so Q² is clean on all components of weight ≤ N.
    let mut xnabla: Vec<Vec<Vec1>> = Vec::new(); // per weight, per χ-generator k
    let mut x_total = vec![Vec1::zero(); ngen];
    for w in 2..=(setup.n as usize + 1) {
        // Unknown basis: (alpha, chi-mono M, output k).
        let monos = chi_monos_of_weight(w);
        let mut unknown_monoms: Vec<(usize, usize)> = Vec::new(); // (monomial idx of ℓ^α·χ^M, ...)
        let mut unknown_keys: Vec<usize> = Vec::new();
        for alpha in 0..nl {
            for m in &monos {
                let mut word = vec![ell_gen(alpha)];
                word.extend(m.iter().map(|&i| setup.chi(i)));
                if let Some((s, idx)) = alg.normalize_generator_word(&word) {
                    debug_assert_eq!(s, 1);
                    unknown_keys.push(idx);
                    unknown_monoms.push((idx, alpha));
                }
            }
        }
        let nu = unknown_keys.len();
        // Known right-hand side: the derivation at shift w-2 on χ^k gives
        // [δ, X_w](χ^k) = δ(X_w(χ^k)) = known terms.
        // known = (d^∇)² (w=2) + [d^∇, X_{w-1}] + ½ Σ [X_a, X_b].
        let mut known = vec![Vec1::zero(); nb];
        if w == 2 {
            for k in 0..nb {
                known[k] = dd[setup.chi(k)].clone();
            }
        }
        if w >= 3 {
            let xw1 = {
                let mut v = vec![Vec1::zero(); ngen];
                for k in 0..nb {
                    v[setup.chi(k)] = xnabla[w - 3][k].clone();
                }
                v
            };
            let c = anticommute(alg, &dnabla, &xw1);
            for k in 0..nb {
                known[k].add_assign(&c[setup.chi(k)]);
            }
        }
        for w1 in 2..=(w - 2).max(0) {
            let w2 = w - w1;
            if w2 < 2 || w2 > w1 {
                continue;
            }
            let xa = {
                let mut v = vec![Vec1::zero(); ngen];
                for k in 0..nb {
                    v[setup.chi(k)] = xnabla[w1 - 2][k].clone();
                }
                v
            };
            let xb = {
                let mut v = vec![Vec1::zero(); ngen];
                for k in 0..nb {
                    v[setup.chi(k)] = xnabla[w2 - 2][k].clone();
                }
                v
            };
            let c = anticommute(alg, &xa, &xb);
            let factor = if w1 == w2 {
                Scalar::ratio(1, 2)
            } else {
                Scalar::one()
            };
            for k in 0..nb {
                known[k].add_assign(&c[setup.chi(k)].scaled(&factor));
            }
        }

        // Build the linear system: for each output k, the equation
        //   δ(X_w(χ^k)) + known_k = 0
        // plus the normalization h̃(X_w(χ^k)) = 0.
        // Unknowns: coefficients u_{t,k} of X_w(χ^k) = Σ_t u_{t,k} mono_t.
        // The systems decouple over k.
        let mut solved = vec![Vec1::zero(); nb];
        for k in 0..nb {
            // Rows indexed by ambient monomials appearing in δ(mono_t) and
            // h̃(mono_t) images.
            let mut row_index: HashMap<usize, usize> = HashMap::new();
            let mut rows: Vec<Vec<Scalar>> = Vec::new();
            let mut rhs: Vec<Scalar> = Vec::new();
            let touch = |row_index: &mut HashMap<usize, usize>,
                             rows: &mut Vec<Vec<Scalar>>,
                             rhs: &mut Vec<Scalar>,
                             m: usize,
                             nu: usize|
             -> usize {
                *row_index.entry(m).or_insert_with(|| {
                    rows.push(vec![Scalar::zero(); nu]);
                    rhs.push(Scalar::zero());
                    rows.len() - 1
                })
            };
            // δ columns of each unknown monomial.
            let delta_map = {
                let dv = delta_vals.clone();
                let alg2 = alg.clone();
                move |idx: usize| alg2.derivation_on_monomial(&{
                    let dv = dv.clone();
                    move |g| dv[g].clone()
                }, 1, idx)
            };
            for (t, &mono) in unknown_keys.iter().enumerate() {
                let img = delta_map(mono);
                for (m, c) in img.iter() {
                    let r = touch(&mut row_index, &mut rows, &mut rhs, *m, nu);
                    rows[r][t] = c.clone();
                }
                let hm = h_tilde(&Vec1::basis(mono));
                for (m, c) in hm.iter() {
                    // Normalization rows live in a disjoint index space:
                    // offset by a tag via negation-free trick — use a
                    // separate pass below instead.
                    let r = touch(&mut row_index, &mut rows, &mut rhs, usize::MAX - *m, nu);
                    rows[r][t] = c.clone();
                }
            }
            for (m, c) in known[k].iter() {
                let r = touch(&mut row_index, &mut rows, &mut rhs, *m, nu);
                rhs[r] = c.clone();
            }
            let mut mat = crate::linalg::Matrix::zero(rows.len(), nu);
            for (ri, row) in rows.iter().enumerate() {
                for (ci, v) in row.iter().enumerate() {
                    if !v.is_zero() {
                        mat.set(ri, ci, v.clone());
                    }
                }
            }
            let Some(sol) = mat.solve(&rhs) else {
                return Err(Error::Structural(format!(
                    "Fedosov correction system inconsistent at weight {w}"
                )));
            };
            if !mat.kernel_basis().is_empty() {
                return Err(Error::Structural(format!(
                    "Fedosov correction not unique at weight {w}"
                )));
            }
            let mut v = Vec1::zero();
            for (t, &mono) in unknown_keys.iter().enumerate() {
                v.add_term(mono, sol[t].clone());
            }
            solved[k] = v;
        }
        for k in 0..nb {
            x_total[setup.chi(k)].add_assign(&solved[k]);
        }
        xnabla.push(solved);
    }

    // Q on function generators.
    let mut q_values = vec![Vec1::zero(); ngen];
    for g in 0..ngen {
        let mut v = Vec1::zero();
        if (0..nb).any(|i| g == setup.chi(i)) {
            let i = g - setup.chi(0);
            v.add_term(alg.generator_monomial(setup.eta(i)), -Scalar::one());
        }
        v.add_assign(&dnabla[g]);
        v.add_assign(&x_total[g]);
        q_values[g] = v;
    }

    // Independent re-check: Q² vanishes on generators on all components of
    // weight at most N.
    let qq = anticommute(alg, &q_values, &q_values);
    for (g, v) in qq.iter().enumerate() {
        for (m, c) in v.iter() {
            let (_, _, r, _) = setup.signature(*m);
            if (r as i64) <= setup.n && !c.is_zero() {
                return Err(Error::Structural(format!(
                    "Q² ≠ 0 on {} below the truncation bound",
                    alg.generators.name(g)
                )));
            }
        }
    }

    Ok(FedosovQ {
        dnabla,
        xnabla,
        q_values,
    })
}

/// Extends generator values of a vector field on functions to the
/// polyvector directions: `L_V(ζ_i) = -Σ_j ∂_{χ^i}(V(χ^j)) ζ_j`.
fn lie_derivative_values(setup: &FedosovSetup, func_values: &[Vec1]) -> Vec<Vec1> {
    let alg = &setup.algebra;
    let (_, nb) = setup.dims();
    let mut out = func_values.to_vec();
    for i in 0..nb {
        let mut v = Vec1::zero();
        for j in 0..nb {
            let qchij = &func_values[setup.chi(j)];
            let mut dcoef = Vec1::zero();
            for (m, c) in qchij.iter() {
                dcoef.add_assign(&alg.partial_derivative(*m, setup.chi(i)).scaled(c));
            }
            if dcoef.is_zero() {
                continue;
            }
            let zeta_j = Vec1::basis(alg.generator_monomial(setup.zeta(j)));
            v.add_assign(&alg.mul(&dcoef, &zeta_j).neg());
        }
        out[setup.zeta(i)] = v;
    }
    out
}

/// The Schouten dgla on the ambient polyvector algebra: `q_1 = L_Q`
/// (a derivation), `q_2` the Schouten bracket generated by
/// `[ζ_i, χ^j] = δ_ij` and extended by the Leibniz rule, higher brackets
/// zero. A strict degree (+1) derived Poisson algebra.
pub fn schouten_dgla(setup: &FedosovSetup, q: &FedosovQ) -> DerivedPoissonStructure {
    let alg = setup.algebra.clone();
    let (_, nb) = setup.dims();
    let full_values = lie_derivative_values(setup, &q.q_values);
    let lq = LinMap::from_derivation(&alg, &{
        let fv = full_values.clone();
        move |g| fv[g].clone()
    }, 1);

    let space = alg.basis_space().clone();
    let mut linf = LInfStructure::new(space.clone(), 1, 5);
    let mut q1 = MultiMap::new(1, 1, Symmetry::Symmetric { degree_shift: 0 });
    for idx in 0..alg.dim() {
        let col = lq.column(idx);
        if !col.is_zero() {
            q1.add_entry(&[idx], col, &space);
        }
    }
    linf.set_bracket(1, Bracket::Table(q1));

    let mut l2 = MultiMap::new(2, 1, Symmetry::Antisymmetric { degree_shift: 1 });
    for i in 0..nb {
        l2.add_entry(
            &[setup.zeta(i), setup.chi(i)],
            alg.unit(),
            &alg.generators,
        );
    }
    let q2 = crate::graded::decalage(&l2, 1, &alg.generators).expect("convention match");
    linf.set_bracket(
        2,
        Bracket::Extended {
            gen_table: q2,
            algebra: alg.clone(),
            memo: RwLock::new(HashMap::new()),
            use_memo: true,
        },
    );
    DerivedPoissonStructure { algebra: alg, linf }
}

/// Result of the three-construction comparison.
pub struct FedosovCompare {
    /// Mismatches between the transferred brackets and the direct Lie-pair
    /// brackets (empty means full agreement).
    pub report: Report,
    /// The transferred structure on the small side.
    pub transferred: DerivedPoissonStructure,
    /// The quasi-isomorphism Taylor coefficients.
    pub tau_infinity: MorphismData,
    /// The direct construction.
    pub direct: CEAlgebra,
}

/// Builds the perturbed semifull contraction with `ϱ = d^∇ + X^∇`, runs
/// homotopy transfer of the Schouten dgla, and compares the transferred
/// `ℓ_1, ℓ_2, ℓ_3` against the direct Lie-pair brackets on generator words,
/// together with the vanishing of `ℓ_4`. Stabilization is certified by
/// recomputing at `N + 1`; the first unstable coefficient is an error.
pub fn fedosov_transfer_compare(
    pair: &LiePairData,
    conn: &ConnectionData,
    n: i64,
    arity_cap: usize,
    certify_stability: bool,
) -> Result<FedosovCompare> {
    let (transferred, tau_infinity) = transfer_at(pair, conn, n, arity_cap)?;
    if certify_stability {
        let (again, _) = transfer_at(pair, conn, n + 1, arity_cap)?;
        // Both small spaces are generator-identical.
        let space = transferred.space().clone();
        let cost = crate::linf::monomial_cost(&again.algebra);
        for arity in 1..=arity_cap {
            for w in crate::linf::spanning_words(&space, 0, arity, 6, &cost) {
                let a = transferred.linf.q(arity, &w)?;
                let b = again.linf.q(arity, &w)?;
                if a != b {
                    return Err(Error::Structural(format!(
                        "transfer unstable at N = {n}: arity {arity} word {:?} changed on recomputation at N + 1",
                        crate::linf::word_names(&space, &w)
                    )));
                }
            }
        }
    }

    let direct = build_lie_pair_algebra(pair)?;
    let mut report = Report::default();
    let space = transferred.space().clone();
    debug_assert_eq!(&space, direct.dps.space());
    let direct_alg = direct.dps.algebra.clone();
    let cost = move |i: usize| direct_alg.monomial(i).len().max(1);
    for arity in 1..=arity_cap {
        for w in crate::linf::spanning_words(&space, 0, arity, 6, &cost) {
            let got = transferred.linf.q(arity, &w)?;
            let want = if arity <= direct.dps.linf.arity_cap {
                direct.dps.linf.q(arity, &w)?
            } else {
                Vec1::zero()
            };
            let mut diff = got.clone();
            diff.sub_assign(&want);
            if !diff.is_zero() {
                report.push(Violation {
                    check: format!("fedosov-l{arity}-mismatch"),
                    arity,
                    word: crate::linf::word_names(&space, &w),
                    defect: crate::linf::defect_terms(&space, &diff),
                });
            }
        }
    }
    report.sort();
    Ok(FedosovCompare {
        report,
        transferred,
        tau_infinity,
        direct,
    })
}

fn transfer_at(
    pair: &LiePairData,
    conn: &ConnectionData,
    n: i64,
    arity_cap: usize,
) -> Result<(DerivedPoissonStructure, MorphismData)> {
    let setup = fedosov_setup(pair, n)?;
    let koszul = build_koszul_contraction(&setup);
    let q = solve_x_nabla(&setup, conn)?;

    // ϱ = d^∇ + X^∇ extended to polyvectors.
    let mut rho_func = q.dnabla.clone();
    for (w, per_k) in q.xnabla.iter().enumerate() {
        let _ = w;
        for (k, v) in per_k.iter().enumerate() {
            rho_func[setup.chi(k)].add_assign(v);
        }
    }
    let rho_full = lie_derivative_values(&setup, &rho_func);
    let l_rho = LinMap::from_derivation(&setup.algebra, &{
        let rv = rho_full.clone();
        move |g| rv[g].clone()
    }, 1);
    let perturbed = perturb_contraction(
        &koszul,
        &Perturbation {
            delta: l_rho,
            series_bound: (setup.cap + 3) as usize,
            truncation_weight: Some(setup.n),
        },
    )?;

    // The perturbed small differential must be the Bott differential; this
    // is re-derived rather than assumed, and the transferred ℓ_1 is then
    // compared against the direct construction downstream.
    let big = schouten_dgla(&setup, &q);
    crate::transfer::transfer_structure_budgeted(&perturbed, &big, arity_cap, setup.n, 6)
}

/// Validation entry point: the unperturbed contraction passes the side
/// conditions and the semifull identities within the weight budget.
pub fn validate_koszul(setup: &FedosovSetup, semifull: bool) -> Report {
    let c = build_koszul_contraction(setup);
    validate_contraction(&c, semifull, setup.n)
}

/// Validation of the perturbed contraction at truncation (criterion for the
/// perturbation lemma instance).
pub fn validate_perturbed(pair: &LiePairData, conn: &ConnectionData, n: i64) -> Result<Report> {
    let setup = fedosov_setup(pair, n)?;
    let koszul = build_koszul_contraction(&setup);
    let q = solve_x_nabla(&setup, conn)?;
    let mut rho_func = q.dnabla.clone();
    for per_k in q.xnabla.iter() {
        for (k, v) in per_k.iter().enumerate() {
            rho_func[setup.chi(k)].add_assign(v);
        }
    }
    let rho_full = lie_derivative_values(&setup, &rho_func);
    let l_rho = LinMap::from_derivation(&setup.algebra, &{
        let rv = rho_full.clone();
        move |g| rv[g].clone()
    }, 1);
    let perturbed = perturb_contraction(
        &koszul,
        &Perturbation {
            delta: l_rho,
            series_bound: (setup.cap + 3) as usize,
            truncation_weight: Some(setup.n),
        },
    )?;
    Ok(validate_contraction(&perturbed, true, setup.n))
}

/// Operator signature containments from the tri-grading: every generated
/// term of `L_ϱ` must land in the three allowed summands.
pub fn check_operator_signatures(setup: &FedosovSetup, q: &FedosovQ) -> Report {
    let alg = &setup.algebra;
    let mut report = Report::default();
    let mut rho_func = q.dnabla.clone();
    for per_k in q.xnabla.iter() {
        for (k, v) in per_k.iter().enumerate() {
            rho_func[setup.chi(k)].add_assign(v);
        }
    }
    let rho_full = lie_derivative_values(setup, &rho_func);
    let l_rho = LinMap::from_derivation(alg, &{
        let rv = rho_full.clone();
        move |g| rv[g].clone()
    }, 1);
    for idx in 0..alg.dim() {
        let (p, qq, r, s) = setup.signature(idx);
        let img = l_rho.column(idx);
        for (m, _) in img.iter() {
            let (p2, q2, r2, s2) = setup.signature(*m);
            let ok = s2 == s
                && r2 >= r
                && ((p2 == p + 1 && q2 == qq)
                    || (p2 == p && q2 == qq + 1)
                    || (p + 1 == p2 + 2 && q2 == qq + 2));
            // The third summand is (p-1, q+2): p2 = p - 1.
            let ok = ok || (s2 == s && r2 >= r && p2 + 1 == p && q2 == qq + 2);
            if !ok {
                report.push(Violation {
                    check: "operator-signature".into(),
                    arity: 1,
                    word: vec![alg.basis_space().name(idx).to_string()],
                    defect: vec![(alg.basis_space().name(*m).to_string(), Scalar::one())],
                });
            }
        }
    }
    report.sort();
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liepair::{sl2, LiePairData};

    fn sl2_pair() -> LiePairData {
        LiePairData::new(sl2(), &["h"]).unwrap()
    }

    #[test]
    fn koszul_contraction_sl2() {
        let setup = fedosov_setup(&sl2_pair(), 3).unwrap();
        let report = validate_koszul(&setup, true);
        assert!(report.passed(), "{:?}", report.violations.first());
    }

    #[test]
    fn x_nabla_solves_and_is_normalized() {
        let pair = sl2_pair();
        let setup = fedosov_setup(&pair, 4).unwrap();
        let conn = ConnectionData::antisymmetric_half(&pair);
        let q = solve_x_nabla(&setup, &conn).unwrap();
        // h̃ X^∇ = 0 termwise: every X value has zero h̃-image.
        let alg = &setup.algebra;
        for per_k in &q.xnabla {
            for v in per_k {
                // Recompute h̃ on the value.
                let mut image = Vec1::zero();
                for (idx, c) in v.iter() {
                    let (_, qq, r, _) = setup.signature(*idx);
                    if qq == 0 {
                        continue;
                    }
                    let norm = Scalar::ratio(1, (qq + r) as i64);
                    for i in 0..setup.dims().1 {
                        let d = alg.partial_derivative(*idx, setup.eta(i));
                        for (m2, c2) in d.iter() {
                            let chi = Vec1::basis(alg.generator_monomial(setup.chi(i)));
                            image.add_assign(
                                &alg.mul(&chi, &Vec1::basis(*m2)).scaled(&(c * c2 * norm.clone())),
                            );
                        }
                    }
                }
                assert!(image.is_zero());
            }
        }
    }

    #[test]
    fn abelian_flat_case_has_zero_correction() {
        let g = crate::liepair::abelian(3);
        let pair = LiePairData::new(g, &["a0"]).unwrap();
        let setup = fedosov_setup(&pair, 3).unwrap();
        let conn = ConnectionData::antisymmetric_half(&pair);
        let q = solve_x_nabla(&setup, &conn).unwrap();
        assert!(q.xnabla.iter().all(|per_k| per_k.iter().all(|v| v.is_zero())));
        assert!(q.dnabla.iter().all(|v| v.is_zero()));
    }

    #[test]
    fn operator_signatures_hold() {
        let pair = sl2_pair();
        let setup = fedosov_setup(&pair, 3).unwrap();
        let conn = ConnectionData::antisymmetric_half(&pair);
        let q = solve_x_nabla(&setup, &conn).unwrap();
        let report = check_operator_signatures(&setup, &q);
        assert!(report.passed(), "{:?}", report.violations.first());
    }

    #[test]
    fn perturbed_contraction_validates_sl2() {
        let pair = sl2_pair();
        let conn = ConnectionData::antisymmetric_half(&pair);
        let report = validate_perturbed(&pair, &conn, 3).unwrap();
        assert!(report.passed(), "{:?}", report.violations.first());
    }

    #[test]
    fn transfer_matches_direct_sl2() {
        let pair = sl2_pair();
        let conn = ConnectionData::antisymmetric_half(&pair);
        let cmp = fedosov_transfer_compare(&pair, &conn, 3, 4, false).unwrap();
        assert!(cmp.report.passed(), "{:?}", cmp.report.violations.first());
    }
}
