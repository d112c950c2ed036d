#![no_main]

use libfuzzer_sys::fuzz_target;
use weyl_core::induced::{CovariantOperatorField, OmegaGrid};
use weyl_core::lattice::LatticeSpec;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let spec = LatticeSpec::from_integers(2, 1).unwrap();
    let grid = OmegaGrid::new(spec, 2).unwrap();
    if let Ok(f) = CovariantOperatorField::from_csv(s, grid) {
        let again = CovariantOperatorField::from_csv(&f.to_csv(), grid).expect("own output parses");
        assert_eq!(again, f);
    }
});
