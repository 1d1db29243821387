//! Truncated bivariate series, graph expressions and surface charts.

mod chart;
mod expr;
mod taylor;

pub use chart::{
    check_immersion, jet2_eval, numeric_first_step, numeric_second_step, reparametrize_as_graph, substitute, Evaluator,
    ExactSurface, Jet2, NormalOrientation, PositionFn, Rect, SurfaceChart,
};
pub use expr::{parse_graph_expr, BinOp, Constant, Expr, Func, GraphExpr, Var};
pub use taylor::{cross3, Taylor, MAX_ORDER};
