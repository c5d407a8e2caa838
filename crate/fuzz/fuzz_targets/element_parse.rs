#![no_main]
use libfuzzer_sys::fuzz_target;
use limitgen::Universe;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    for u in [
        Universe::Integers,
        Universe::strings("ab").unwrap(),
        Universe::strings("01x").unwrap(),
    ] {
        if let Ok(id) = u.parse_id(text) {
            let back = u.element_at(id);
            assert_eq!(u.index_of(&back).unwrap(), id);
        }
    }
});
