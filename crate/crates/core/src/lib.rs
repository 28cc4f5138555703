pub mod evolve;
pub mod photonics;
pub mod pipeline;
pub mod qed;
pub mod surrogate;
