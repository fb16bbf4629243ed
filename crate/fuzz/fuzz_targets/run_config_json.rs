#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = spin_ibr_cli::config::RunConfig::from_json(text) {
        let _ = cfg.resolve();
    }
});
