use ppkit::gf::build_field;
use ppkit::tower::build_tower;

fn main() -> ppkit::Result<()> {
    let t = build_tower(&build_field(5, 1)?)?;
    let f = t.base();
    println!("F_{} with alpha^2 = {}", t.order(), t.u());

    let delta = t.elem(f.from_int(3), f.from_int(1));
    println!("delta = {delta}, Tr = {}, N = {}", t.trace(delta), t.norm(delta));
    println!("delta^q = {}", t.frobenius(delta));

    // x^q - x + delta lands on a + z*alpha
    let (y, z) = (f.from_int(2), f.from_int(4));
    let x = t.proof_substitution(delta, y, z);
    println!("x = {x}, x^q - x + delta = {}", t.core_term(x, delta));

    let even = build_tower(&build_field(2, 2)?)?;
    println!("F_{} with alpha^2 = alpha + {}", even.order(), even.u());
    Ok(())
}
