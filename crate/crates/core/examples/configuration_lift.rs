//! Weighted lifts: the single-circle family `g_P` lifts once its moving
//! strand is given weight zero, while `h_C` admits no lift at all.

use homsel::constructions::{sample_g_p, Wedge};
use homsel::multifunction::{build_strand_system, lift_to_configuration, GridMultifunction, LiftOutcome};

fn report(name: &str, f: &GridMultifunction) -> homsel::Result<()> {
    let tol = f.modulus().max(f.step()) * (1.0 + 1e-9);
    let s = build_strand_system(f, tol)?;
    println!("{name}: {} strand components, {} merges", s.component_count, s.merges.len());
    match lift_to_configuration(f, &s, 3)? {
        LiftOutcome::Lifted(l) => println!("  lifted, weights {:?}", l.weights),
        LiftOutcome::SubLift(l) => {
            println!("  lifted after zeroing components {:?}; verified: {}", l.forced_zero, l.verify(f, &s))
        }
        LiftOutcome::Obstructed(c) => println!("  obstructed: {}", c.reason),
        LiftOutcome::Undecided { reason } => println!("  undecided: {reason}"),
    }
    Ok(())
}

fn main() -> homsel::Result<()> {
    report("g_P", &sample_g_p(32, 1)?)?;
    report("h_C", &Wedge::default().sample_h_c(32)?)?;
    Ok(())
}
