pub mod derived;
pub mod error;
pub mod field;
pub mod linalg;
pub mod model;
pub mod obj;
pub mod filtration;
pub mod fixtures;
pub mod groth;
pub mod smith;
pub mod strat;
pub mod table;

pub use error::{Error, Result};
pub use field::{FiniteField, Field, Fp};
pub use model::{CategoryModel, Extriangle};
pub use obj::{IndecId, Obj};

pub type F2 = Fp<2>;
pub type F3 = Fp<3>;
