//! Exact and certified computation of the Minkowski diagonal continued
//! fraction quantities `m_n(α)`, their limsup/liminf, and the Hall-type
//! Cantor set machinery used to realize every value of `(1/4, ω₀]` as a
//! liminf.

pub mod cf;
pub mod construct;
pub mod dcf;
pub mod error;
pub mod exact;
pub mod float_interval;
pub mod hall;
pub mod interval;
pub mod legendre;
pub mod mobius;
pub mod rational;

pub use cf::{cf_format, cf_parse, CfExpansion, ConvergentTable, Digit};
pub use construct::{construct, hall_solve, select_pair, Construction, ConstructionReport, HallSolution};
pub use dcf::{kernel_f, kernel_g, liminf_estimate, limsup_estimate, mn_value, mn_values, MnValue, MuFunction};
pub use error::{Error, Result};
pub use exact::ExactNumber;
pub use interval::CertifiedInterval;
pub use legendre::{classify_pairs, legendre_sequence, legendre_test, vahlen_violations, LegendreSequence, PairClass};
