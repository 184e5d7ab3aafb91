use ppkit::directions::{check_complementarity, direction_set, field_table};
use ppkit::gf::build_field;

fn main() -> ppkit::Result<()> {
    let f = build_field(5, 1)?;
    for k in [1u64, 2, 3] {
        let table = field_table(&f, |x| f.pow(x, k));
        let r = check_complementarity(&f, &table)?;
        println!(
            "x^{k} on F_5: D = {:?}, P = {:?}, complementary {}",
            r.directions, r.permuting_gammas, r.complementary
        );
    }
    let f8 = build_field(2, 3)?;
    let d = direction_set(&f8, &field_table(&f8, |x| f8.pow(x, 3)))?;
    println!("x^3 on F_8: |D| = {}", d.len());
    Ok(())
}
