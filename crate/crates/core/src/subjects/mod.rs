//! The four subject programs with their seeded faults and relations.

pub mod binsearch;
pub mod kth;
pub mod linear_solver;
pub mod shortest_path;
