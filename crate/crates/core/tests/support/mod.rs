pub mod compare;
pub mod dense;
