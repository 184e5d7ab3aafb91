use ppkit::criteria::{cubic_norm_pp, quintic_norm_pp};
use ppkit::gf::build_field;

fn main() -> ppkit::Result<()> {
    for q in [5u64, 7, 13] {
        let f = build_field(q, 1)?;
        let cubic: Vec<u64> = f
            .elements()
            .filter(|&c| cubic_norm_pp(&f, c).unwrap())
            .map(|c| c.encode())
            .collect();
        let mut quintic = 0;
        for a in f.elements() {
            for b in f.elements() {
                quintic += quintic_norm_pp(&f, a, b)? as u32;
            }
        }
        println!("q={q}: z^3 - cz permutes for c in {cubic:?}; {quintic} PP quintics z^5 + Az^3 + Bz");
    }
    Ok(())
}
