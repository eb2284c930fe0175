//! Model 1 (team-level ratios, least squares) and Model 2 (potential
//! assists, L2-penalized logistic regression) with cross-validation.

pub mod cv;
pub mod design;
pub mod fit;
pub mod linear;
pub mod logistic;

pub use cv::{
    cross_validate, cross_validate_design, default_grid, fold_assignment, lambda_scores, log_grid,
    parse_grid, select_lambda, CvMetrics, LambdaScore, ModelSpec,
};
pub use design::{
    build_contextual_design, build_team_design, build_team_design_with_teams, groups, DesignMatrix,
};
pub use fit::{Coefficients, Diagnostics, FitKind, ModelFit};
pub use linear::fit_team_model;
pub use logistic::{fit_contextual_model, fit_contextual_model_with, sigmoid, SolverOptions};
