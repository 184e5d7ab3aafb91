use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ppkit::decompose::{component_map, verify_equivalence, DecompositionConfig};
use ppkit::gf::{build_field, Embedding};

fn main() -> ppkit::Result<()> {
    let emb = Embedding::new(&build_field(3, 1)?, &build_field(3, 2)?)?;
    let big = emb.big();
    let small = emb.small();

    let cfg = DecompositionConfig::standard(&emb);
    let map = component_map(|x| big.pow(x, 3), &emb, &cfg)?;
    let mut out = vec![small.zero(); 2];
    map.apply(&[small.one(), small.one()], &mut out);
    println!("x^3 at (1, 1) -> ({}, {})", out[0], out[1]);

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for k in [3u64, 5, 2] {
        let cfg = DecompositionConfig::random(&emb, &mut rng);
        let r = verify_equivalence(|x| big.pow(x, k), &emb, &cfg)?;
        println!("x^{k}: f PP {}, components permute {}", r.f_is_pp, r.components_permute);
    }
    Ok(())
}
