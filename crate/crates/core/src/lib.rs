pub mod analysis;
pub mod builder;
pub mod conjugate;
pub mod planes;
pub mod poly;
pub mod stability;
pub mod verify;
