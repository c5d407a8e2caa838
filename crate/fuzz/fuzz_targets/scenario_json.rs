#![no_main]
use libfuzzer_sys::fuzz_target;
use limitgen::scenario::Scenario;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(s) = Scenario::from_json(text) {
        let _ = s.build(None);
    }
});
