//! Cell structure of the graph of `h_C` and its first homology.

use homsel::constructions::gr_hc_report;

fn main() -> homsel::Result<()> {
    let rep = gr_hc_report()?;
    for (q, cells) in rep.complex.cells.iter().enumerate() {
        println!("{q}-cells: {}", cells.join(" "));
    }
    for (q, h) in rep.homology.iter().enumerate() {
        println!("H_{q} = {h}");
    }
    println!("α generates H_1: {}", rep.alpha_generates);
    println!("loops through each petal homologous to α: {:?}", rep.loops_homologous);
    Ok(())
}
