pub mod bench;
pub mod detect;
pub mod eval;
pub mod prepare;
pub mod synth;
pub mod train;
