use ppkit::sweep::{check_point, plan_tower};
use ppkit::families::TheoremId;

fn main() -> ppkit::Result<()> {
    let t = plan_tower(13, 1, None)?;
    // Tr(delta) = 2a, so a = 0 here
    let (v, rec) = check_point(TheoremId::T3_6, &t, t.zero(), t.decode(6)?, None)?;
    println!("3.6 q=13 a=0 gamma=6: predicted {} via {}, oracle {}", v.predicted, v.matched_case, rec.oracle);

    let t9 = plan_tower(3, 2, None)?;
    for i in [None, Some(1)] {
        let id = if i.is_some() { TheoremId::T3_13 } else { TheoremId::T3_12 };
        let (_, rec) = check_point(id, &t9, t9.decode(1)?, t9.one(), i)?;
        println!("{}", serde_json::to_string(&rec).unwrap());
    }
    Ok(())
}
