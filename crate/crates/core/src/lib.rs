pub mod exactlin;
pub mod groups;
pub mod quiver;
pub mod voltage;
pub mod coalgebra;
pub mod covering;
pub mod comodule;
pub mod dsl;
pub mod fixtures;
pub mod cli;
