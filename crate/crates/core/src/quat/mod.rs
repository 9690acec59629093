//! Quaternion scalars, quaternionic and complex matrices, and the dense
//! kernels built on them.

mod det;
pub mod linalg;
mod matrix;
mod quaternion;
mod sample;

pub use det::{dieudonne_det, dieudonne_det2};
pub use matrix::{CMatrix, Entry, Matrix, QuatMatrix, RMatrix};
pub use quaternion::Quaternion;
pub use sample::{
    gaussian, random_quaternion, random_quaternion_matrix, random_symplectic,
    random_unit_quaternion, random_unit_vector,
};
