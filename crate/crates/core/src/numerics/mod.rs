//! Shared numerical machinery used by the model and bootstrap layers.

mod empirical;
mod optim;
mod poly;
mod rng;

pub use empirical::{make_empirical, sample_empirical, EmpiricalDist, Innovations};
pub use optim::{nelder_mead, FitOptions, NelderMead, OptimResult};
pub use poly::{min_root_modulus, poly_roots, Polynomial};
pub use rng::{draw_normal, draw_student_t, RngSeed};
