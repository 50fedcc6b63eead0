//! Keeps the book honest: each chapter of `book/` is included here as module
//! documentation, so its fenced Rust blocks run under `cargo test --doc`.
