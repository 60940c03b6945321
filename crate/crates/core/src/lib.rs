//! Thue-Morse trace polynomials under the pair dynamic
//! `Phi(x, y) = (y^2 (x - 2) + 2, x)`.
//!
//! The crate evaluates trace polynomials in ball arithmetic, certifies
//! `(delta, beta)`-regular germs by coefficient majorants, checks the
//! renormalized convergence of iterates toward `2 cos x`, isolates zeros by
//! sign-certified bisection, and builds the nested-interval Cantor subset of
//! the spectrum together with its dimension bounds.

pub mod ball;
pub mod cantor;
pub mod constants;
pub mod convergence;
pub mod dynamics;
pub mod error;
pub mod germ;
pub mod grid;
pub mod roots;
pub mod series;
pub mod verdict;

pub use ball::Ball;
pub use cantor::{CantorNode, CantorTree, DimensionReport};
pub use constants::ConstantsTable;
pub use dynamics::{BasePair, Germ, SeriesPair, TracePair};
pub use error::{Error, Result};
pub use germ::GermCertificate;
pub use roots::ZeroBracket;
pub use series::{GeometricMajorant, LocalSeries};
pub use verdict::Verdict;
