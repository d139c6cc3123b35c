#![no_main]

use libfuzzer_sys::fuzz_target;
use ndyn::builder::{instantiate, parse_scheme, SchemeContext};
use ndyn::poly::Complex;

// first byte picks d, the rest is scheme text; every parameter is bound to 0.5+0.25i
fuzz_target!(|data: &[u8]| {
    let Some((&head, rest)) = data.split_first() else { return };
    let Ok(text) = std::str::from_utf8(rest) else { return };
    let Ok(scheme) = parse_scheme(text) else { return };
    let d = 2 + (head % 3) as usize;
    let ctx = scheme
        .params()
        .iter()
        .fold(SchemeContext::new(d, Complex::new(1.0, 0.3)).unwrap(), |ctx, name| {
            ctx.bind(name, Complex::new(0.5, 0.25))
        });
    let _ = instantiate(&scheme, &ctx);
});
