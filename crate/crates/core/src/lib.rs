//! Pentagram map on twisted polygons.
//!
//! A twisted n-gon is a bi-infinite sequence of points in the projective
//! plane, periodic modulo a fixed projective transformation (the
//! monodromy). The pentagram map sends a polygon to the polygon of
//! intersections of its short diagonals. This crate implements the map in
//! several coordinate charts, its full algebra of conserved quantities,
//! the invariant Poisson structure, and the continuous (Boussinesq) limit.
//!
//! Everything geometric and algebraic is generic over a [`Scalar`]:
//! arbitrary-precision rationals for exact identity checking, `f64` for
//! long orbits and PDE runs.

pub mod boussinesq;
pub mod error;
pub mod invariants;
pub mod pentagram;
pub mod poisson;
pub mod polyalg;
pub mod polygon;
pub mod projgeo;
pub mod sampling;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::{Rat, Scalar, DEFAULT_TOL};

/// Twisted polygon over exact rationals.
pub type RatPolygon = polygon::TwistedPolygon<Rat>;
/// Twisted polygon over floats.
pub type FloatPolygon = polygon::TwistedPolygon<f64>;

pub type RatPoint = projgeo::ProjPoint<Rat>;
pub type FloatPoint = projgeo::ProjPoint<f64>;
pub type RatMap = projgeo::ProjMap<Rat>;
pub type FloatMap = projgeo::ProjMap<f64>;
