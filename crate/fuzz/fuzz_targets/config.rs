#![no_main]

use libfuzzer_sys::fuzz_target;
use weyl_core::config::RunConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = RunConfig::from_config_str(s) {
        // validation must report, never panic
        let _ = cfg.validate();
    }
});
