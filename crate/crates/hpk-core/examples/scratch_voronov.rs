// Scratch: inspect linf_to_homological_field output for sl2 over a point.
use hpk_core::graded::GradedBasisSpace;
use hpk_core::polyvec::*;
use hpk_core::liepair::sl2;
use hpk_core::algebra::FreeGCA;

fn main() {
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
        weight_cap: 4,
    };
    let q = linf_to_homological_field(&data).unwrap();
    println!("is_homological: {}", q.is_homological());
    for gn in 0..q.algebra.generators.dim() {
        println!("Q({}) = {}", q.algebra.generators.name(gn), q.algebra.display(&q.values[gn]));
    }
    // Roundtrip.
    let (brackets, _anchors, _a0) = extract_algebroid(&q, &data).unwrap();
    for (w, images) in &brackets[1].entries {
        for (m, c) in images.iter().enumerate() {
            if !c.is_zero() {
                println!("extracted lambda_2({:?}) -> fiber {} coeff {}", w, g.space.name(m), q.algebra.display(c));
            }
        }
    }
}
