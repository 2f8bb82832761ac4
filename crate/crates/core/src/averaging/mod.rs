//! Second-order Lie bracket averaging for systems
//!
//! ```text
//! ẋ = f₀(x) + Σᵢ fᵢ(x) ω^{pᵢ} uᵢ(kᵢ ω t).
//! ```
//!
//! The averaged field is
//!
//! ```text
//! f₀ + Σ_{i<j} γ_ij [fᵢ, fⱼ] + Σ_{i<j} Σ_m γ_ijm [[fᵢ, fⱼ], fₘ]
//! ```
//!
//! with each `γ` replaced by its limit as `ω → ∞`, estimated from quadrature
//! on a geometric frequency grid. Brackets are taken by central differences.

mod bracket;
mod engine;
mod input;
mod limit;
mod quadrature;
mod report;
mod system;
mod systems;

pub use bracket::{jacobian, lie_bracket, nested_bracket, FdStep};
pub use engine::{
    averaged_vector_field, check_assumptions, gamma_label, gamma_pair, gamma_table, gamma_triple, AssumptionReport,
    AveragingEngine, ClauseResult, ClauseStatus, GammaEntry, GammaTable,
};
pub use input::{common_period, period_multiple, FrequencyRatio, OscillatoryInput, Waveform};
pub use limit::{classify_limit, default_omega_grid, Classification, LimitClass};
pub use quadrature::{cumulative_simpson, gamma_pair_inputs, gamma_triple_inputs, simpson};
pub use report::{averaging_report, gamma_report};
pub use system::{vector_field, Channel, ControlAffineSystem, VectorField};
pub use systems::{gradient_system, newton_system};
