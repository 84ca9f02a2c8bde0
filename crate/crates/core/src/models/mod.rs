//! Physical scenarios with closed-form predictions wired through the generic
//! propagators.

pub mod cat;
pub mod free_particle;
pub mod oscillator;
pub mod two_level;

pub use cat::{cat_density, CatScenario};
pub use free_particle::free_particle_spread;
pub use oscillator::{coherent_amplitude, fock_matrix_decoherence, milburn_frozen_compare, OscillatorScenario};
pub use two_level::{
    rabi_damping_vs_n, rabi_population_difference, two_level_coherence, TwoLevelKind, TwoLevelScenario,
};
