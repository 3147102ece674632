//! Exact arithmetic building blocks: polynomials, resultants, finite fields,
//! interval arithmetic and real roots.

pub mod ffield;
pub mod interval;
pub mod linalg;
pub mod poly;
pub mod resultant;
pub mod roots;

pub use ffield::{count_points_legendre, factor_mod_p, FiniteField, FpPoly, Fq};
pub use interval::{Dyadic, RealInterval};
pub use poly::{BiPoly, IntPoly, RatPoly};
pub use resultant::{resultant, resultant_in_x};
pub use roots::{isolate_real_roots, RealRoot};
