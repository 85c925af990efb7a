//! Reflectance of a finite array and transmission through a central hole.
//!
//! `cargo run --release -p rydmirror --example mirror -- 21`

use rydmirror::dispersion::resonance_shift;
use rydmirror::geometry::{ArrayGeometry, DipoleAxis};
use rydmirror::green::coupling_matrices;
use rydmirror::linear::{aperture_analytics, ArrayResponse};

fn main() -> rydmirror::Result<()> {
    let n: usize = std::env::args().nth(1).map_or(21, |a| a.parse().expect("array side"));
    let d = 0.5;
    let g = ArrayGeometry::square(n, d, DipoleAxis::X)?;
    let c = coupling_matrices(&g);
    let resp = ArrayResponse::new(&g, &c, resonance_shift(d, DipoleAxis::X)?)?;

    println!("w/d      R        T        K");
    for wd in [1.0, 2.0, 3.0, 4.0] {
        let r = resp.scanner(wd * d)?.intact();
        println!("{wd:<4} {:8.5} {:8.5} {:8.5}", r.reflectance, r.transmittance, r.loss);
    }

    let w2 = 0.25 * n as f64 * d;
    let sc = resp.scanner(w2)?;
    println!("\nR_b/d    T       aperture");
    for rbd in [1.0, 2.0, 3.0, 4.0] {
        let t = sc.with_removed(&g.disk(g.central_index(), rbd * d))?.transmittance;
        println!("{rbd:<4} {t:8.4} {:8.4}", aperture_analytics(rbd * d, w2).t_bar);
    }
    Ok(())
}
