use ppkit::gf::{build_field, Embedding};

fn main() -> ppkit::Result<()> {
    let f9 = build_field(3, 2)?;
    println!("F_{}: modulus {:?}", f9.q(), f9.modulus());

    let t = f9.decode(3)?;
    let x = f9.add(t, f9.one());
    println!("(t + 1)^-1 = {}", f9.inv(x)?);
    println!("Tr_3(t + 1) = {}, N_3(t + 1) = {}", f9.trace(x, 3)?, f9.norm(x, 3)?);
    println!("t + 1 is a square: {}", f9.is_square(x));

    let f81 = build_field(3, 4)?;
    let emb = Embedding::new(&f9, &f81)?;
    let y = emb.embed(x);
    println!("t + 1 in F_81 = {y}, back = {:?}", emb.restrict(y).map(|e| e.to_string()));
    Ok(())
}
