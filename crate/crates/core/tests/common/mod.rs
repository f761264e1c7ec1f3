pub mod contour;
pub mod properties;
