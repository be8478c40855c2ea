pub mod linalg;
pub mod poly;
pub mod algebra;
pub mod module;
pub mod homology;
pub mod registry;
pub mod igusa;
pub mod ideal;
pub mod expr;
pub mod io;
pub mod suite;
pub mod fuzz;
pub mod report;
