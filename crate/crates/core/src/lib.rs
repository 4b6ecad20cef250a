//! Exact computations around higher-order tangencies of plane algebraic curves.
//!
//! The crate covers five layers:
//!
//! * [`field`] and [`poly`]: exact scalars over ℚ or 𝔽_p and sparse polynomials.
//! * [`curve`]: square-free plane curves, smooth points, singular points and
//!   point enumeration.
//! * [`lift`]: the implicit-differentiation system `f, P_1, …, P_k` whose zero
//!   set contains the jet lift of a curve, plus jets at smooth points.
//! * [`tangency`]: tangency orders and the arrangement count `Σ_p m_k(p)`.
//! * [`extremal`] and [`fit`]: the 𝔽_p family with many tangencies and the
//!   minimal-degree vanishing-polynomial machinery.
//!
//! Tangency to order `≥ k` always means that the `k`-jets agree: same point,
//! same first `k` derivatives of the local graph `y = h(x)`.

pub mod curve;
pub mod error;
pub mod extremal;
pub mod field;
pub mod fit;
pub mod io;
pub mod lift;
pub mod linalg;
pub mod poly;
pub mod series;
pub mod tangency;

pub use curve::{PlaneCurve, PlanePoint};
pub use error::{Error, ErrorClass, Result};
pub use extremal::SharpFamilySpec;
pub use field::{FieldSpec, Scalar};
pub use fit::FitResult;
pub use lift::{Jet, LiftSystem};
pub use poly::{parse_poly, MultiPoly, UniPoly};
pub use tangency::{Arrangement, CountReport, TangencyOrder, TangencyRecord};
