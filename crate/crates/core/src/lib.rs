//! Lifetime-overlap social networks of historical persons from Wikipedia
//! dumps, leader rankings, gender composition over time, and Wikinews
//! topic networks.

pub mod chronology;
pub mod export;
pub mod gender;
pub mod ingest;
pub mod pipeline;
pub mod ranking;
pub mod text;
pub mod title;
pub mod wikinews;
