//! Finite-scale experiments along the convergent denominators of θ.

pub mod approx;
pub mod boxexp;
pub mod density;
pub mod growth;
pub mod resume;
pub mod schedule;

pub use schedule::{b_density_gap, m_range, select_qn, tail_measure, tail_measure_at, GapReport, QnSchedule, ScheduledLevel, TailEstimate};
pub use approx::{approx_ratio, best_m, derivative_check, find_mn, DerivativeCheck, MnChoice};
pub use resume::{grid_modulus, phase_check, resume_at_level, resume_witness, Check, LevelAttempt, ResumeConfig, ResumeWitness};
pub use boxexp::{box_experiment, box_sample, BoxReport, DEFAULT_J};
pub use density::{density_probe, CellHit, DensityReport};
pub use growth::{growth_report, GrowthReport, GrowthRow};
