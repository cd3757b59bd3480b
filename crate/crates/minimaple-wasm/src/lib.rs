use wasm_bindgen::prelude::*;

#[wasm_bindgen]
pub fn ping() -> String { "ok".to_string() }
