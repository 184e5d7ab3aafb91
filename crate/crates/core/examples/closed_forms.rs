use ppkit::decompose::lemma31_extract;
use ppkit::families::{closed_form_components, FamilySpec, TheoremId};
use ppkit::gf::build_field;
use ppkit::tower::build_tower;

fn main() -> ppkit::Result<()> {
    let t = build_tower(&build_field(7, 1)?)?;
    let f = t.base();
    let (delta, gamma) = (t.decode(1)?, t.one());
    for id in [TheoremId::T3_4, TheoremId::T3_10, TheoremId::T3_18] {
        let spec = FamilySpec::for_theorem(id, &t, delta, gamma, None)?;
        let ex = lemma31_extract(&spec, &t)?;
        let closed = closed_form_components(id, &t, delta, gamma, None)?;
        let c = ex.coefficients()?;
        println!("{id}: g1 = {}, g2 = {}", c.g1, c.g2);
        println!("     display g2 = {}, equal: {}", closed.g2, ex.matches(f, &closed));
    }
    Ok(())
}
