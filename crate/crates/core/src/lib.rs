pub mod cobordism;
pub mod complex;
pub mod diagrams;
pub mod error;
pub mod foamrel;
pub mod frobenius;
pub mod homology;
pub mod pipeline;
pub mod ring;
pub mod skein;
pub mod tangle;

pub use error::{FoamError, Result};
pub use ring::{
    Coefficient, DotlessElem, DyadicGaussian, FieldScalar, GaussianInt, GaussianRational, Monomial, Poly,
    RingElem, Specialization,
};
pub use frobenius::{AlgebraElement, FactorMap, FrobeniusAlgebra, TensorElement};
pub use tangle::{parse_braid, parse_pd, BoundaryPoint, CrossingResolutions, Dir, EdgeLabel, LoopKind, Matching, PDCode, Resolution};
pub use cobordism::{evaluate_closed, Component, CycleStructure, MorphismSum};
pub use skein::{p2, LaurentPoly};
pub use complex::{assemble, naive_cube, DebugLevel, FormalComplex, GradedObject, SimplifyStats, StepRecord};
pub use homology::{apply_tqft, cohomology, cohomology_at, direct_cube, AlgebraicComplex, BigradedTable, PoincarePolynomial};
pub use foamrel::{check_deloop_maps, check_relation, cross_validate, eval_dotless, eval_dotted, Relation, Slice, SliceWord};
pub use pipeline::{compute_homology, run, Input, Mode, OrderPolicy, OutputFormat, Report, RunConfig};
