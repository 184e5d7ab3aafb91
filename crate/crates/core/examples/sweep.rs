use ppkit::families::TheoremId;
use ppkit::sweep::{run_sweep, write_records, RecordFormat, SweepPlan, SweepSummary};

fn main() -> ppkit::Result<()> {
    let mut plan = SweepPlan::new(TheoremId::T3_2, 5, 1);
    plan.workers = 4;
    let records = run_sweep(&plan)?;
    println!("{:?}", SweepSummary::of(&records));

    let pp: Vec<_> = records.iter().filter(|r| r.oracle).take(3).cloned().collect();
    write_records(std::io::stdout(), &pp, RecordFormat::Csv)?;

    // 3.9 at q = 7 has disagreements
    let s = SweepSummary::of(&run_sweep(&SweepPlan::new(TheoremId::T3_9, 7, 1))?);
    println!("3.9 q=7: {} of {} disagree", s.disagreements, s.total);
    Ok(())
}
