pub mod dense;
pub mod gradcheck;
