pub mod complexity;
pub mod corpus;
pub mod fgraph;
pub mod input;
pub mod minimizer;
pub mod moves;
pub mod oracles;
pub mod presentations;
pub mod words;
