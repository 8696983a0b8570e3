//! Logical Z bias of the full gadget against the CNOT bias, from one
//! order-2 enumeration.

use magicbias::gadget::{Gadget, NoisyFlags};
use magicbias::noise::Preset;
use magicbias::tomography::{analyse, Mode};

fn main() -> magicbias::Result<()> {
    let gadget = Gadget::new(NoisyFlags::ALL)?;
    let counts = gadget.enumerate(2, &[Preset::Z.set()], 0)?;
    println!("{:>8} {:>12} {:>12}", "eta", "r_proc", "eta_ZL");
    for eta in [0.25, 1.0, 10.0, 100.0, 1000.0, f64::INFINITY] {
        let m = analyse(&gadget.tallies(&counts, 0, eta, 5e-3)?, Mode::Adaptive)?.metrics;
        println!("{eta:>8} {:>12.4e} {:>12.4}", m.r_proc, m.eta_zl);
    }
    Ok(())
}
