pub mod figures;
pub mod montecarlo;
pub mod optimize;
pub mod se_sweep;
