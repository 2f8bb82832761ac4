#![no_main]

use libfuzzer_sys::fuzz_target;
use srcseek::experiments::Config;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(config) = Config::from_toml_str(text) else {
        return;
    };
    // Anything accepted must survive validation and a round trip.
    if config.validate().is_ok() {
        let again = Config::from_toml_str(&config.to_toml().expect("serializable")).expect("round trip");
        assert_eq!(config, again);
        let _ = config.scenario();
    }
});
