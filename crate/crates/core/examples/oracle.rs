use ppkit::gf::build_field;
use ppkit::oracle::{additive_kernel, field_bijection};

fn main() -> ppkit::Result<()> {
    let f = build_field(2, 4)?;
    for k in [2u64, 3, 7, 11] {
        let r = field_bijection(&f, |x| f.pow(x, k))?;
        println!("x^{k} on F_16: permutation = {}, collision = {:?}", r.is_permutation, r.witness);
    }
    // x^4 + x is F_2-linear with kernel F_4
    let kernel = additive_kernel(&f, |x| f.add(f.pow(x, 4), x))?;
    println!("|ker(x^4 + x)| = {kernel}");
    Ok(())
}
