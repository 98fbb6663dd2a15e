pub mod azumaya;
pub mod cli;
pub mod cohomology;
pub mod elliptic;
pub mod gln;
pub mod group_ring;
pub mod linalg;
pub mod torus;
pub mod verdict;
