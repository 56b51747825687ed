//! Polynomials, vector fields, differential forms and polynomial maps on
//! affine charts, with the expression parser and printer.

mod chart;
mod forms;
mod map;
mod parse;
mod poly;

pub use chart::Chart;
pub use forms::{KForm, VField};
pub use map::{ChartMap, EmbeddingShape};
pub use parse::{
    parse_expr, parse_form, parse_poly, parse_vfield, print_expr, print_form, print_poly,
    print_vfield, Expr,
};
pub use poly::{max_degree, set_max_degree, with_degree_guard, DegreeCapExceeded, Mono, Poly};
