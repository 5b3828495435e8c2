pub mod cogmap;
pub mod floorplan;
pub mod geometry;
pub mod render;
pub mod sim;
pub mod wayfinding;
