//! Curves in projective space given by their fundamental linear ODE.

pub mod invariants;
pub mod ode;
pub mod symplectic;

pub use invariants::{canonical_parametrization, self_dual_test, to_projective, wilczynski, CanonicalParam, SelfDuality, WilczynskiSet};
pub use ode::{apply_operator, default_order, fundamental_matrix, gauge, projective_normalize, reparametrize, semi_canonicalize, CurveODE, ParamTag};
pub use symplectic::{
    curve_from_curvatures, gram, invariant_symplectic_form, strongly_canonical_scale, symplectic_curvatures, CurvatureTuple, StrongScale, SympForm,
};
