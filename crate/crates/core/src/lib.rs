//! Persistent homology of the relaxed p-Vietoris-Rips and p-Cech metric
//! thickenings of finite metric spaces.
//!
//! A measure on a finite metric space has a p-diameter (the p-th moment of
//! the distance under the product of the measure with itself) and a
//! p-radius (the smallest p-th distance moment to a fixed center). The
//! sublevel sets of these functionals over the probability simplex relax
//! the classical Vietoris-Rips and Cech constructions; at p = infinity
//! they recover them exactly. For a finite space the sublevel filtration
//! is homotopy equivalent to a filtration of simplicial complexes whose
//! per-simplex values are exact optima of small linear or quadratic
//! programs over faces of the probability simplex, which is what this
//! crate computes:
//!
//! * [`metric`] - validated distance matrices, samplers, nets,
//!   Gromov-Hausdorff upper bounds, metric spread;
//! * [`measure`] - finitely supported measures and the functionals
//!   (Frechet, p-diameter, p-radius, mixed invariants, sphere closed
//!   forms);
//! * [`transport`] - exact Wasserstein distances via an in-repo network
//!   simplex, the infinity-Wasserstein threshold search, and net
//!   projection;
//! * [`filtration`] - per-simplex values (LP for Cech, exact quadratic
//!   maximization for Vietoris-Rips, classical formulas at p = infinity)
//!   and complex assembly;
//! * [`persistence`] - boundary-matrix reduction over Z/2 and the exact
//!   bottleneck distance;
//! * [`oracles`] - independent ground truth: closed-form diagrams,
//!   single-linkage degree zero, grid maximization, transportation-vertex
//!   enumeration;
//! * [`io`] - the CSV/JSON/SVG formats spoken by the command-line tool.

pub mod filtration;
pub mod io;
pub mod measure;
pub mod metric;
pub mod oracles;
pub mod persistence;
pub mod solver;
pub mod transport;

pub use filtration::{
    ambient_cech_value, build_classical_complex, build_complex, cech_value, classical_value,
    vr_value, BuildKind,
    ClassicalKind, Fidelity, FilteredComplex, FiltrationError, Simplex,
};
pub use measure::{
    diam_p, euclidean_mean, frechet, i_qp, mix, mix_measures, rad_p, rad_p_ambient,
    sphere_diam2_closed_form, sphere_rad2_closed_form, Measure, MeasureError, PValue,
};
pub use metric::{
    distortion, epsilon_net, euclidean_metric, geodesic_circle_metric, gh_upper_bound,
    hausdorff_subset,
    metric_spread, sample_sphere, Correspondence, Embedding, FiniteMetricSpace, MetricError,
    PointCloud, SampleMode, Spread,
};
pub use oracles::{
    edge_death_scale, enumerate_transport_vertices, grid_maximize, single_linkage_h0, zn_diagram,
    ClosedFormDiagram, GridFunctional, OracleError,
};
pub use persistence::{
    bottleneck, compute_diagram, Interval, Matching, PersistenceDiagram, PersistenceError,
};
pub use transport::{project_to_net, wasserstein, wasserstein_inf, TransportError, TransportPlan};
