//! Geometric many-to-many matching between points and ranges.
//!
//! The incidence graph of points and ranges is never built explicitly. A
//! biclique cover ([`cover`]) stands in for it, max-flow runs on the small
//! network the cover induces ([`flow`], [`implicit_dinitz`]), and bottleneck
//! problems bisect over flow decisions ([`bottleneck`]).
//!
//! All algorithms are generic over [`Scalar`]: `f32`, `f64` and exact
//! [`Rational`]. The aliases below fix the scalar for the common cases.

pub mod bottleneck;
pub mod cover;
pub mod error;
pub mod flow;
pub mod geometry;
pub mod implicit_dinitz;
pub mod oracle;
pub mod rblct;
pub mod scalar;

pub use bottleneck::{
    bottleneck_search, bottleneck_search_many, decide, pd_bottleneck, BottleneckResult, PersistenceDiagram,
};
pub use cover::{box_cover, trivial_cover, validate_cover, BicliqueCover, Part};
pub use error::{Error, Result};
pub use flow::{max_matching_explicit, Matching, SupplyDemand, Triple};
pub use geometry::{Metric, Point, Range};
pub use implicit_dinitz::{max_matching_implicit, max_matching_implicit_traced};
pub use rblct::{Color, RbForest};
pub use scalar::{Rational, Scalar};

pub type PointQ = Point<Rational>;
pub type PointF = Point<f64>;
pub type RangeQ = Range<Rational>;
pub type RangeF = Range<f64>;
pub type MatchingQ = Matching<Rational>;
pub type MatchingF = Matching<f64>;
pub type SupplyDemandQ = SupplyDemand<Rational>;
pub type SupplyDemandF = SupplyDemand<f64>;
pub type DiagramQ = PersistenceDiagram<Rational>;
pub type DiagramF = PersistenceDiagram<f64>;
pub type RbForestQ = RbForest<Rational>;
pub type RbForestF = RbForest<f64>;
