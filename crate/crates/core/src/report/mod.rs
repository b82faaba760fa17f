//! Plots and tables for one to three trials.

mod svg;
mod table;

pub use svg::{
    render_curve_svg, Annotation, AnnotationKind, Layout, PlotCurve, PlotSpec, MAX_CURVES,
    PALETTE, X_LABEL, Y_LABEL,
};
pub use table::{parse_json_table, render_table, TableFormat};
