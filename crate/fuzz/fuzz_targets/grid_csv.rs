#![no_main]

use libfuzzer_sys::fuzz_target;
use weyl_core::schrodinger::GridFunction2D;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(g) = GridFunction2D::from_csv(s) {
        let again = GridFunction2D::from_csv(&g.to_csv()).expect("own output parses");
        assert_eq!(again.samples(), g.samples());
    }
});
