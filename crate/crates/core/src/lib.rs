pub mod conformal;
pub mod elastic;
pub mod frame;
pub mod np;
pub mod numerics;
pub mod providers;
pub mod state;
pub mod tensor;
