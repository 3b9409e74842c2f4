//! Futures and factor panels: ingestion, validation, transforms, alignment,
//! descriptive statistics and synthetic generation.

mod csv_io;
mod panel;
mod simulate;
mod stats;

pub use csv_io::{
    load_factors, load_panel, read_factors, read_panel, save_factors, save_panel, write_factors,
    write_panel, MissingPolicy, PanelSchema,
};
pub use panel::{
    align_panels, canonical_tenors, FactorPanel, FuturesPanel, ScaleMarker, Tenor, FACTOR_COLUMNS,
};
pub use simulate::{
    level_slope_spec, load_kl_spec, parse_kl_spec, simulate_factors, simulate_panel,
    weekday_dates, KlComponent, KlSpec, ScoreProcess, ORTHONORMAL_TOL,
};
pub use stats::{column_stats, descriptive_stats, factor_stats, write_stats, ColumnStats};
