#![no_main]
use libfuzzer_sys::fuzz_target;
use limitgen::collection::Dfa;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(d) = Dfa::parse(text) {
        // printing and reparsing must give the same automaton
        let again = Dfa::parse(&d.to_text()).expect("printed automaton parses");
        assert_eq!(again, d);
        let _ = d.is_infinite();
        let _ = d.shortlex_least();
    }
});
