pub mod composition;
pub mod distance;
pub mod formulas;
pub mod graph;
pub mod io;
pub mod linalg;
pub mod scalar;
pub mod undirected;
pub mod verify;

pub use composition::{
    compose_bags, graph_bag, graph_cof, graph_det, graph_inverse, graph_lambda, CompositionError,
    CompositionInput,
};
pub use distance::{
    block_distance_matrix, block_distance_matrix_input_order, block_shortest_path_oracle,
    floyd_warshall, graph_distance_matrix, shortest_path_oracle, DistanceError, DistanceMatrix,
};
pub use formulas::{
    block_alpha, block_beta, block_cof, block_det, block_inverse, block_lambda,
    block_laplacian_like, make_block_bag, verify_left_lapexp, verify_right_lapexp, Bag,
    CheckFailure, ConditionCheck, FormulaError, LapExpReport, Side,
};
pub use graph::{
    assemble_graph, canonicalize_block, pair_sum, pair_sums, rotated_pair_sum, BlockShape,
    BlockWeights, Branch, CactoidGraph, CycleSummary, Direction, GluedBlock, GraphError,
    LocalVertex, WeightedBlock,
};
pub use linalg::{
    cofactor_sum, det, inverse, rank, rank_one, schur_det, schur_det_trailing, LinalgError, Matrix,
};
pub use scalar::{parse_rational, ParseRationalError, Scalar};
pub use undirected::{
    classify_det, classify_with_oracle, det_oracle, odd_cycle_distance_matrix, odd_cycle_inverse,
    shapes_up_to, sweep, undirected_distance_matrix, Comparison, Dependence, DetVerdict, Rule,
    UndirectedError, UndirectedShape, Verdict,
};
pub use verify::{fuzz, verify_graph, FuzzBounds, FuzzConfig, VerificationReport};

/// Exact scalar used for every weight, distance and determinant.
pub type Rational = num_rational::BigRational;
pub type RationalMatrix = Matrix<Rational>;
pub type RationalBlock = WeightedBlock<Rational>;
pub type RationalGraph = CactoidGraph<Rational>;
pub type RationalBag = Bag<Rational>;
