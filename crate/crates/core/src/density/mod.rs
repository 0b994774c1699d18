//! Følner sequences and Banach density statistics on finite windows.

mod banach;
mod folner;
mod window;

pub use banach::{
    advantage_window, advantage_window_report, check_bdc, density_over, density_window,
    is_separated, maximal_separated, maximal_separated_in, piece_core_defect, syndeticity_gap,
    BdcVerdict, DensityReport, PeriodicSet, PointSet,
};
pub use folner::{
    check_tempered, folner_boxes, tempered_report, FolnerFlags, FolnerSequence, TemperedReport,
};
pub use window::{zd_bounds, Window};
