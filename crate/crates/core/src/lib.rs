pub mod estimate;
pub mod operator;
pub mod quadrature;
pub mod specfun;
pub mod inequalities;
pub mod testfuncs;
pub mod cli;
