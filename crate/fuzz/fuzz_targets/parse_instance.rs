#![no_main]

use libfuzzer_sys::fuzz_target;

// parse_instance must never panic on arbitrary bytes, and anything it
// accepts must survive a serialize/parse round trip unchanged.
fuzz_target!(|data: &[u8]| {
    if let Ok((instance, labels)) = vaov::io::parse_instance(data) {
        let json = vaov::io::instance_to_json(&instance, &labels);
        let (back, _) = vaov::io::parse_instance(json.as_bytes()).expect("round trip parses");
        assert_eq!(back, instance);
    }
});
