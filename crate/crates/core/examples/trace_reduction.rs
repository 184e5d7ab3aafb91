use ppkit::criteria::{eval_reduced_h, reduce_trace_composed, t319_subfield_h};
use ppkit::families::{FamilySpec, TheoremId};
use ppkit::gf::{build_field, Embedding};
use ppkit::oracle::{field_bijection, tower_bijection};
use ppkit::tower::build_tower;

fn main() -> ppkit::Result<()> {
    let (f3, f9) = (build_field(3, 1)?, build_field(3, 2)?);
    let emb = Embedding::new(&f3, &f9)?;
    let g = vec![f9.decode(4)?, f9.decode(2)?];
    let h = reduce_trace_composed(&emb, &g);
    let spec = FamilySpec::TraceComposed { n: 2, coeffs: g };
    let f_pp = field_bijection(&f9, spec.flat_evaluator(&f9)?)?.is_permutation;
    let h_pp = field_bijection(&f3, |x| eval_reduced_h(&f3, &h, x))?.is_permutation;
    let show: Vec<String> = h.iter().map(|c| c.to_string()).collect();
    println!("h = x + x * poly{show:?}; f PP {f_pp}, h PP {h_pp}");

    let t = build_tower(&build_field(2, 2)?)?;
    let (delta, gamma) = (t.alpha(), t.one());
    let h = t319_subfield_h(&t, delta, gamma)?;
    let spec = FamilySpec::for_theorem(TheoremId::T3_19, &t, delta, gamma, None)?;
    let pp = tower_bijection(&t, spec.tower_evaluator(&t)?)?.is_permutation;
    let show: Vec<String> = h.iter().map(|c| c.to_string()).collect();
    println!("3.19 q=4 delta=alpha: h coefficients {show:?}, f PP {pp}");
    Ok(())
}
