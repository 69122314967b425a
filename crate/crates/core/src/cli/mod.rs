pub mod commands;
pub mod export;
pub mod manifest;
pub mod pgm;
