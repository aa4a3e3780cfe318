//! Exact algebra: Frobenius and Clifford algebras, paracomplex numbers,
//! module tensors and quadratic algebras with their black/white products.

pub mod clifford;
pub mod exact;
pub mod frobenius;
pub mod para;
pub mod quadratic;

pub use clifford::{clifford_check, clifford_mul, CliffordAlgebra, Multivector};
pub use exact::{QMatrix, Q};
pub use frobenius::{frobenius_check, frobenius_form, module_tensors, FrobeniusAlgebra, ModuleTensors};
pub use para::{para_conj, para_mul, para_split, para_split_check, ParaSplit, Paracomplex};
pub use quadratic::{quad_black, quad_dual, quad_duality_check, quad_white, QuadraticAlgebra};
