pub mod avg_se;
pub mod cdf;
pub mod contour;
pub mod figure;
