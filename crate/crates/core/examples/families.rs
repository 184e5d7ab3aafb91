use ppkit::families::{Exponent, FamilySpec, TheoremId};
use ppkit::gf::build_field;
use ppkit::oracle::tower_bijection;
use ppkit::tower::build_tower;

fn main() -> ppkit::Result<()> {
    let t = build_tower(&build_field(7, 1)?)?;
    let e: Exponent = "2q+1".parse()?;
    println!("{e} at q = 7 is {}", e.instantiate(7, 7)?);

    for id in [TheoremId::T3_1, TheoremId::T3_8, TheoremId::T3_14] {
        let spec = FamilySpec::for_theorem(id, &t, t.decode(9)?, t.one(), None)?;
        let terms: Vec<String> = id.terms(None)?.iter().map(|e| e.to_string()).collect();
        let pp = tower_bijection(&t, spec.tower_evaluator(&t)?)?.is_permutation;
        println!("{id}: terms {terms:?}, f(alpha) = {}, PP = {pp}", spec.eval_tower(&t, t.alpha())?);
    }
    Ok(())
}
