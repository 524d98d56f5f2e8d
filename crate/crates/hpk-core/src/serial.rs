//! JSON serialization of the structure-constant file formats.
//!
//! Rationals serialize as `"p/q"` strings (integers as `"n"`). Sparse
//! tables are keyed by basis or monomial names; bracket tables are keyed by
//! canonical words.

use crate::algebra::FreeGCA;
use crate::graded::{BasisElement, Error, GradedBasisSpace, MultiMap, Result, Symmetry, Vec1};
use crate::liepair::{LieAlgebraData, LiePairData, MatchedPairData, SplittingChange};
use crate::linf::{Bracket, DerivedPoissonStructure, LInfStructure};
use crate::polyvec::{AlgebroidData, AnchorTable};
use crate::scalar::Scalar;
use crate::transfer::{ComplexSide, Contraction, LinMap};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::RwLock;

/// A linear combination as name/coefficient pairs.
pub type JsonCombo = Vec<(String, Scalar)>;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JsonSpace {
    pub elements: Vec<BasisElement>,
}

impl JsonSpace {
    pub fn to_space(&self) -> Result<GradedBasisSpace> {
        GradedBasisSpace::new(self.elements.clone())
    }

    pub fn from_space(s: &GradedBasisSpace) -> Self {
        JsonSpace {
            elements: s.elements().to_vec(),
        }
    }
}

/// Basis entries of a Lie algebra file: names (degree zero implied) or full
/// elements.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum JsonBasisEntry {
    Name(String),
    Full(BasisElement),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JsonBracketEntry {
    pub i: String,
    pub j: String,
    pub value: JsonCombo,
}

/// `{"basis":[...], "brackets":[{"i":"h","j":"e","value":[["e","2"]]},...]}`
/// plus, for a Lie pair, `"subalgebra":["h"]` and optional `"splitting_phi"`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JsonLiePair {
    pub basis: Vec<JsonBasisEntry>,
    pub brackets: Vec<JsonBracketEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subalgebra: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub splitting_phi: Option<Vec<JsonPhiEntry>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JsonPhiEntry {
    pub u: String,
    pub value: JsonCombo,
}

fn combo_to_vec(combo: &JsonCombo, space: &GradedBasisSpace) -> Result<Vec1> {
    let mut v = Vec1::zero();
    for (name, c) in combo {
        v.add_term(space.index_of(name)?, c.clone());
    }
    Ok(v)
}

fn vec_to_combo(v: &Vec1, space: &GradedBasisSpace) -> JsonCombo {
    v.iter()
        .map(|(i, c)| (space.name(*i).to_string(), c.clone()))
        .collect()
}

impl JsonLiePair {
    pub fn to_lie_algebra(&self) -> Result<LieAlgebraData> {
        let elements: Vec<BasisElement> = self
            .basis
            .iter()
            .map(|e| match e {
                JsonBasisEntry::Name(n) => BasisElement {
                    name: n.clone(),
                    degree: 0,
                    weight: None,
                },
                JsonBasisEntry::Full(b) => b.clone(),
            })
            .collect();
        let space = GradedBasisSpace::new(elements)?;
        let n = space.dim();
        let mut table = vec![vec![Vec1::zero(); n]; n];
        for entry in &self.brackets {
            let i = space.index_of(&entry.i)?;
            let j = space.index_of(&entry.j)?;
            let v = combo_to_vec(&entry.value, &space)?;
            table[i][j] = v.clone();
            table[j][i] = v.neg();
        }
        LieAlgebraData::new(space, table)
    }

    pub fn to_lie_pair(&self) -> Result<LiePairData> {
        let g = self.to_lie_algebra()?;
        let sub = self.subalgebra.as_ref().ok_or_else(|| {
            Error::Parse("file does not declare a \"subalgebra\"".into())
        })?;
        let names: Vec<&str> = sub.iter().map(|s| s.as_str()).collect();
        let mut pair = LiePairData::new(g, &names)?;
        if let Some(phi_entries) = &self.splitting_phi {
            let mut phi = vec![vec![Scalar::zero(); pair.h_indices.len()]; pair.b_indices.len()];
            for e in phi_entries {
                let u = pair.g.space.index_of(&e.u)?;
                let upos = pair
                    .b_indices
                    .iter()
                    .position(|&b| b == u)
                    .ok_or_else(|| Error::Parse(format!("{} is not a complement element", e.u)))?;
                for (name, c) in &e.value {
                    let h = pair.g.space.index_of(name)?;
                    let hpos = pair
                        .h_indices
                        .iter()
                        .position(|&x| x == h)
                        .ok_or_else(|| Error::Parse(format!("{name} is not in the subalgebra")))?;
                    phi[upos][hpos] = c.clone();
                }
            }
            pair = pair.with_phi(phi)?;
        }
        Ok(pair)
    }

    pub fn from_lie_algebra(g: &LieAlgebraData) -> Self {
        let mut brackets = Vec::new();
        for i in 0..g.dim() {
            for j in (i + 1)..g.dim() {
                let v = g.bracket(i, j);
                if !v.is_zero() {
                    brackets.push(JsonBracketEntry {
                        i: g.space.name(i).to_string(),
                        j: g.space.name(j).to_string(),
                        value: vec_to_combo(v, &g.space),
                    });
                }
            }
        }
        JsonLiePair {
            basis: g
                .space
                .elements()
                .iter()
                .map(|e| JsonBasisEntry::Name(e.name.clone()))
                .collect(),
            brackets,
            subalgebra: None,
            splitting_phi: None,
        }
    }

    pub fn from_lie_pair(p: &LiePairData) -> Self {
        let mut out = Self::from_lie_algebra(&p.g);
        out.subalgebra = Some(
            p.h_indices
                .iter()
                .map(|&i| p.g.space.name(i).to_string())
                .collect(),
        );
        let phi_entries: Vec<JsonPhiEntry> = p
            .b_indices
            .iter()
            .zip(p.phi.iter())
            .filter(|(_, row)| row.iter().any(|c| !c.is_zero()))
            .map(|(&b, row)| JsonPhiEntry {
                u: p.g.space.name(b).to_string(),
                value: row
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(hpos, c)| (p.g.space.name(p.h_indices[hpos]).to_string(), c.clone()))
                    .collect(),
            })
            .collect();
        if !phi_entries.is_empty() {
            out.splitting_phi = Some(phi_entries);
        }
        out
    }
}

/// A change of splitting file: entries of `phi` keyed by complement names.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JsonPhi {
    pub phi: Vec<JsonPhiEntry>,
}

impl JsonPhi {
    pub fn to_change(&self, pair: &LiePairData) -> Result<SplittingChange> {
        let mut phi = vec![vec![Scalar::zero(); pair.h_indices.len()]; pair.b_indices.len()];
        for e in &self.phi {
            let u = pair.g.space.index_of(&e.u)?;
            let upos = pair
                .b_indices
                .iter()
                .position(|&b| b == u)
                .ok_or_else(|| Error::Parse(format!("{} is not a complement element", e.u)))?;
            for (name, c) in &e.value {
                let h = pair.g.space.index_of(name)?;
                let hpos = pair
                    .h_indices
                    .iter()
                    .position(|&x| x == h)
                    .ok_or_else(|| Error::Parse(format!("{name} is not in the subalgebra")))?;
                phi[upos][hpos] = c.clone();
            }
        }
        Ok(SplittingChange { phi })
    }
}

/// Matched-pair file: two Lie algebras and the mutual action tables.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JsonMatchedPair {
    pub a: JsonLiePair,
    pub b: JsonLiePair,
    /// `nabla` entries: action of `a`-element `x` on `b`-element `y`.
    pub nabla: Vec<JsonActionEntry>,
    /// `delta` entries: action of `b`-element `y` on `a`-element `x`.
    pub delta: Vec<JsonActionEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JsonActionEntry {
    pub actor: String,
    pub on: String,
    pub value: JsonCombo,
}

impl JsonMatchedPair {
    pub fn to_matched_pair(&self) -> Result<MatchedPairData> {
        let a = self.a.to_lie_algebra()?;
        let b = self.b.to_lie_algebra()?;
        let mut nabla = vec![vec![Vec1::zero(); b.dim()]; a.dim()];
        for e in &self.nabla {
            let x = a.space.index_of(&e.actor)?;
            let y = b.space.index_of(&e.on)?;
            nabla[x][y] = combo_to_vec(&e.value, &b.space)?;
        }
        let mut delta = vec![vec![Vec1::zero(); a.dim()]; b.dim()];
        for e in &self.delta {
            let y = b.space.index_of(&e.actor)?;
            let x = a.space.index_of(&e.on)?;
            delta[y][x] = combo_to_vec(&e.value, &a.space)?;
        }
        Ok(MatchedPairData { a, b, nabla, delta })
    }

    pub fn from_matched_pair(d: &MatchedPairData) -> Self {
        let mut nabla = Vec::new();
        for x in 0..d.a.dim() {
            for y in 0..d.b.dim() {
                if !d.nabla[x][y].is_zero() {
                    nabla.push(JsonActionEntry {
                        actor: d.a.space.name(x).to_string(),
                        on: d.b.space.name(y).to_string(),
                        value: vec_to_combo(&d.nabla[x][y], &d.b.space),
                    });
                }
            }
        }
        let mut delta = Vec::new();
        for y in 0..d.b.dim() {
            for x in 0..d.a.dim() {
                if !d.delta[y][x].is_zero() {
                    delta.push(JsonActionEntry {
                        actor: d.b.space.name(y).to_string(),
                        on: d.a.space.name(x).to_string(),
                        value: vec_to_combo(&d.delta[y][x], &d.a.space),
                    });
                }
            }
        }
        JsonMatchedPair {
            a: JsonLiePair::from_lie_algebra(&d.a),
            b: JsonLiePair::from_lie_algebra(&d.b),
            nabla,
            delta,
        }
    }
}

/// Sparse bracket table keyed by canonical words of basis names.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JsonBracketTable {
    pub arity: usize,
    pub degree: i64,
    pub symmetry: Symmetry,
    pub entries: Vec<JsonWordEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JsonWordEntry {
    pub word: Vec<String>,
    pub value: JsonCombo,
}

/// A derived Poisson structure file: the generator space of a free
/// graded-commutative algebra, the shift, and sparse bracket tables on
/// generator words (extended by the Leibniz rule on parsing).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JsonStructure {
    pub generators: JsonSpace,
    pub k: i64,
    #[serde(default = "default_arity_cap")]
    pub arity_cap: usize,
    #[serde(default = "default_weight_cap")]
    pub weight_cap: i64,
    pub brackets: Vec<JsonBracketTable>,
}

fn default_arity_cap() -> usize {
    5
}

fn default_weight_cap() -> i64 {
    6
}

impl JsonStructure {
    pub fn to_structure(&self) -> Result<DerivedPoissonStructure> {
        let gens = self.generators.to_space()?;
        let algebra = FreeGCA::new(gens.clone(), self.weight_cap);
        let mut linf = LInfStructure::new(algebra.basis_space().clone(), self.k, self.arity_cap);
        for table in &self.brackets {
            if table.arity > self.arity_cap {
                return Err(Error::Parse(format!(
                    "bracket arity {} exceeds the arity cap {}",
                    table.arity, self.arity_cap
                )));
            }
            let mut mm = MultiMap::new(table.arity, table.degree, table.symmetry);
            for e in &table.entries {
                let word: Vec<usize> = e
                    .word
                    .iter()
                    .map(|n| gens.index_of(n))
                    .collect::<Result<_>>()?;
                // Values are combinations of algebra monomials by name.
                let mut v = Vec1::zero();
                for (name, c) in &e.value {
                    let idx = algebra
                        .basis_space()
                        .index_of(name)
                        .map_err(|_| Error::Parse(format!("unknown monomial {name:?}")))?;
                    v.add_term(idx, c.clone());
                }
                mm.add_entry(&word, v, &gens);
            }
            let symmetric_shift = self.k - 1;
            let gen_table = match table.symmetry {
                Symmetry::Symmetric { degree_shift } if degree_shift == symmetric_shift => mm,
                Symmetry::Antisymmetric { degree_shift } if degree_shift == self.k => {
                    crate::graded::decalage(&mm, self.k, &gens)?
                }
                other => {
                    return Err(Error::Parse(format!(
                        "bracket symmetry {:?} does not match shift k = {}",
                        other, self.k
                    )))
                }
            };
            linf.set_bracket(
                table.arity,
                Bracket::Extended {
                    gen_table,
                    algebra: algebra.clone(),
                    memo: RwLock::new(HashMap::new()),
                    use_memo: true,
                },
            );
        }
        Ok(DerivedPoissonStructure { algebra, linf })
    }
}

/// A linear map file: columns keyed by monomial names.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JsonLinMap {
    pub degree: i64,
    pub columns: Vec<JsonColumn>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JsonColumn {
    pub i: String,
    pub value: JsonCombo,
}

fn linmap_from_json(
    j: &JsonLinMap,
    src: &GradedBasisSpace,
    dst: &GradedBasisSpace,
) -> Result<LinMap> {
    let mut m = LinMap::zero(j.degree);
    for col in &j.columns {
        let i = src.index_of(&col.i)?;
        let mut v = Vec1::zero();
        for (name, c) in &col.value {
            v.add_term(dst.index_of(name)?, c.clone());
        }
        m.set_column(i, v);
    }
    Ok(m)
}

/// One side of a contraction file: a free algebra plus a differential.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JsonComplexSide {
    pub generators: JsonSpace,
    #[serde(default = "default_weight_cap")]
    pub weight_cap: i64,
    pub d: JsonLinMap,
}

/// Contraction file with sparse map tables.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JsonContraction {
    pub big: JsonComplexSide,
    pub small: JsonComplexSide,
    pub sigma: JsonLinMap,
    pub tau: JsonLinMap,
    pub h: JsonLinMap,
}

impl JsonContraction {
    pub fn to_contraction(&self) -> Result<Contraction> {
        let big_alg = FreeGCA::new(self.big.generators.to_space()?, self.big.weight_cap);
        let small_alg = FreeGCA::new(self.small.generators.to_space()?, self.small.weight_cap);
        let bspace = big_alg.basis_space().clone();
        let sspace = small_alg.basis_space().clone();
        Ok(Contraction {
            big: ComplexSide {
                d: linmap_from_json(&self.big.d, &bspace, &bspace)?,
                algebra: big_alg,
            },
            small: ComplexSide {
                d: linmap_from_json(&self.small.d, &sspace, &sspace)?,
                algebra: small_alg,
            },
            sigma: linmap_from_json(&self.sigma, &bspace, &sspace)?,
            tau: linmap_from_json(&self.tau, &sspace, &bspace)?,
            h: linmap_from_json(&self.h, &bspace, &bspace)?,
        })
    }
}

/// Algebroid data file: generator spaces, bracket tables, anchor tables.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JsonAlgebroid {
    pub base: JsonSpace,
    pub fiber: JsonSpace,
    #[serde(default)]
    pub brackets: Vec<JsonBracketTable>,
    #[serde(default)]
    pub anchors: Vec<JsonAnchorTable>,
    /// Values of the arity-0 anchor on base generators.
    #[serde(default)]
    pub anchor0: Vec<JsonColumn>,
    #[serde(default = "default_weight_cap")]
    pub weight_cap: i64,
    #[serde(default)]
    pub k: i64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JsonAnchorTable {
    pub arity: usize,
    pub entries: Vec<JsonAnchorEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JsonAnchorEntry {
    pub word: Vec<String>,
    pub images: Vec<JsonColumn>,
}

impl JsonAlgebroid {
    pub fn to_algebroid(&self) -> Result<(AlgebroidData, i64)> {
        let base = self.base.to_space()?;
        let fiber = self.fiber.to_space()?;
        let base_alg = FreeGCA::new(base.clone(), self.weight_cap);
        let mut brackets = Vec::new();
        let max_arity = self.brackets.iter().map(|b| b.arity).max().unwrap_or(1);
        for arity in 1..=max_arity {
            let mut table_out = crate::polyvec::FiberBracketTable::new(arity);
            if let Some(table) = self.brackets.iter().find(|b| b.arity == arity) {
                for e in &table.entries {
                    let word: Vec<usize> = e
                        .word
                        .iter()
                        .map(|n| fiber.index_of(n))
                        .collect::<Result<_>>()?;
                    let v = combo_to_vec(&e.value, &fiber)?;
                    table_out.add_constant(
                        &word,
                        &v,
                        &fiber,
                        fiber.dim(),
                        base_alg.unit_index(),
                    );
                }
            }
            brackets.push(table_out);
        }
        let mut anchors = Vec::new();
        for table in &self.anchors {
            let mut entries = std::collections::BTreeMap::new();
            for e in &table.entries {
                let word: Vec<usize> = e
                    .word
                    .iter()
                    .map(|n| fiber.index_of(n))
                    .collect::<Result<_>>()?;
                let mut images = vec![Vec1::zero(); base.dim()];
                for col in &e.images {
                    let g = base.index_of(&col.i)?;
                    let mut v = Vec1::zero();
                    for (name, c) in &col.value {
                        let idx = base_alg
                            .basis_space()
                            .index_of(name)
                            .map_err(|_| Error::Parse(format!("unknown base monomial {name:?}")))?;
                        v.add_term(idx, c.clone());
                    }
                    images[g] = v;
                }
                entries.insert(word, images);
            }
            anchors.push(AnchorTable {
                arity: table.arity,
                entries,
            });
        }
        let mut anchor0 = vec![Vec1::zero(); base.dim()];
        for col in &self.anchor0 {
            let g = base.index_of(&col.i)?;
            let mut v = Vec1::zero();
            for (name, c) in &col.value {
                let idx = base_alg
                    .basis_space()
                    .index_of(name)
                    .map_err(|_| Error::Parse(format!("unknown base monomial {name:?}")))?;
                v.add_term(idx, c.clone());
            }
            anchor0[g] = v;
        }
        Ok((
            AlgebroidData {
                base,
                fiber,
                brackets,
                anchor0,
                anchors,
                weight_cap: self.weight_cap,
            },
            self.k,
        ))
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &std::path::Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| {
        Error::Parse(format!(
            "{}:{}:{}: {e}",
            path.display(),
            e.line(),
            e.column()
        ))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liepair::{sl2, sl2_matched_pair, LiePairData};

    #[test]
    fn lie_pair_roundtrip() {
        let pair = LiePairData::new(sl2(), &["h"]).unwrap();
        let j = JsonLiePair::from_lie_pair(&pair);
        let text = serde_json::to_string_pretty(&j).unwrap();
        let back: JsonLiePair = serde_json::from_str(&text).unwrap();
        let pair2 = back.to_lie_pair().unwrap();
        assert_eq!(pair2.h_indices, pair.h_indices);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(pair2.g.bracket(i, j), pair.g.bracket(i, j));
            }
        }
        // Serialize -> parse -> serialize is idempotent.
        let again = serde_json::to_string_pretty(&JsonLiePair::from_lie_pair(&pair2)).unwrap();
        assert_eq!(text, again);
    }

    #[test]
    fn spec_example_shape_parses() {
        let text = r#"{
            "basis": ["h", "e", "f"],
            "brackets": [
                {"i": "h", "j": "e", "value": [["e", "2"]]},
                {"i": "h", "j": "f", "value": [["f", "-2"]]},
                {"i": "e", "j": "f", "value": [["h", "1"]]}
            ],
            "subalgebra": ["h"]
        }"#;
        let j: JsonLiePair = serde_json::from_str(text).unwrap();
        let pair = j.to_lie_pair().unwrap();
        assert_eq!(pair.dim_h(), 1);
        assert_eq!(pair.dim_b(), 2);
    }

    #[test]
    fn matched_pair_roundtrip() {
        let data = sl2_matched_pair();
        let j = JsonMatchedPair::from_matched_pair(&data);
        let text = serde_json::to_string(&j).unwrap();
        let back: JsonMatchedPair = serde_json::from_str(&text).unwrap();
        let data2 = back.to_matched_pair().unwrap();
        assert!(data2.check_compatibility().passed());
    }

    #[test]
    fn structure_file_parses_and_checks() {
        let text = r#"{
            "generators": {"elements": [
                {"name": "x", "degree": 1},
                {"name": "y", "degree": 1}
            ]},
            "k": 1,
            "brackets": []
        }"#;
        let j: JsonStructure = serde_json::from_str(text).unwrap();
        let dps = j.to_structure().unwrap();
        let cfg = crate::linf::CheckConfig::default();
        assert!(crate::linf::check_leibniz(&dps, &cfg).unwrap().passed());
    }

    #[test]
    fn bad_subalgebra_is_structural_error() {
        let text = r#"{
            "basis": ["h", "e", "f"],
            "brackets": [
                {"i": "h", "j": "e", "value": [["e", "2"]]},
                {"i": "h", "j": "f", "value": [["f", "-2"]]},
                {"i": "e", "j": "f", "value": [["h", "1"]]}
            ],
            "subalgebra": ["e", "f"]
        }"#;
        let j: JsonLiePair = serde_json::from_str(text).unwrap();
        match j.to_lie_pair() {
            Err(Error::Structural(msg)) => assert!(msg.contains("subalgebra")),
            other => panic!("expected structural error, got {other:?}"),
        }
    }
}
