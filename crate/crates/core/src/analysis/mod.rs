//! Recovery of voxel locations from multiview images: thresholded
//! convolution with the reference patterns and the multiview CWT.

mod correlate;
mod cwt;
mod detect;

pub use correlate::{correlate_separable, correlate_separable_with, Rect, ResponseMap};
pub use cwt::{cwt_argmax, cwt_plane, cwt_plane_with, Argmax};
pub use detect::{
    detect_all, detect_all_with, detect_plane, detect_plane_with, exact_decimal, paper_units,
    score_against, threshold_value, DepthLegend, DepthMap, Detection, DetectionFraction,
    SceneAnalysis, Score,
};
