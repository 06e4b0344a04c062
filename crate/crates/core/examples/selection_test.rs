//! Homological selection verdicts for a disk map, a double cover, and the
//! three-petal wedge map `h_C`.

use homsel::constructions::{root_cover, Wedge};
use homsel::selection::{homological_selection_test, selection_report, DEFAULT_EPS_STEPS};

fn main() -> homsel::Result<()> {
    let identity = root_cover(16, 1, false)?;
    let rep = selection_report(&identity, &DEFAULT_EPS_STEPS)?;
    for r in &rep.rungs {
        println!("identity, eps {:.4}: {:?}, induced {:?}", r.eps, r.verdict, r.induced);
    }

    let double = root_cover(16, 2, false)?;
    let r = homological_selection_test(&double, 2.0 / 16.0)?;
    println!("square roots: {:?}, induced {:?}", r.verdict, r.induced);

    let hc = Wedge::default().sample_h_c(32)?;
    let r = homological_selection_test(&hc, 2.0 / 32.0)?;
    println!(
        "h_C: {:?}, induced {:?}, boundary class order {:?}, {} critical cells",
        r.verdict, r.induced, r.boundary_class_order, r.critical_cells
    );
    Ok(())
}
