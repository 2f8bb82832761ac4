#![no_main]

use libfuzzer_sys::fuzz_target;
use srcseek::ode::{read_csv, write_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(traj) = read_csv(data) else {
        return;
    };
    let mut buf = Vec::new();
    write_csv(&traj, &mut buf).expect("writable");
    let back = read_csv(buf.as_slice()).expect("re-readable");
    assert_eq!(traj.times.len(), back.times.len());
    for (a, b) in traj.states.iter().flatten().zip(back.states.iter().flatten()) {
        assert!(a.to_bits() == b.to_bits() || (a.is_nan() && b.is_nan()));
    }
});
