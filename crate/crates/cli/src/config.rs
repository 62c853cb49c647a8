//! Scenario configuration: JSON schema, validation, and construction of
//! the core objects (structure, domain, weight) a scenario describes.

use acgeom::exhaustion::DomainSpec;
use acgeom::field::StructureField;
use acgeom::poly::{PolyField, ValueKind};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A validation failure always names the offending field so the message
/// is actionable without opening this file.
#[derive(Debug)]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config field `{}`: {}", self.field, self.message)
    }
}

impl std::error::Error for ConfigError {}

fn bad(field: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError {
        field: field.into(),
        message: message.into(),
    }
}

/// One monomial c·z^a z̄^b of a polynomial given in the config.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub z: Vec<u32>,
    pub zbar: Vec<u32>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StructureSpec {
    /// Q ≡ 0: the integrable standard structure.
    Standard,
    /// Random polynomial Q with the given sup-norm bound.
    Seeded { seed: u64, sup_norm: f64 },
    /// A single nonzero entry Q_{row,col}.
    SingleEntry {
        row: usize,
        col: usize,
        terms: Vec<TermSpec>,
        #[serde(default = "default_radius")]
        radius: f64,
    },
}

fn default_radius() -> f64 {
    2.0
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainConfig {
    /// Unit ball |z|² < 1.
    Ball,
    /// |z₁|² + … + |z_{n−1}|² + |z_n|^{2m} < 1, weakly pseudoconvex for m ≥ 2.
    Egg { power: u32 },
    /// Non-pseudoconvex negative control |z₁|² − |z₂|² < 1/4.
    HartogsFigure,
    /// Arbitrary polynomial defining function r < 0.
    Polynomial {
        terms: Vec<TermSpec>,
        chart_radius: f64,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PsiSpec {
    /// |z|², strictly plurisubharmonic for every small structure.
    AbsSq,
    Polynomial { terms: Vec<TermSpec> },
}

/// Fixed (A, η) pair for a single Diederich–Fornaess check instead of
/// the ladder search.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedPair {
    #[serde(rename = "A")]
    pub a: f64,
    pub eta: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TaskSpec {
    /// Solve one pseudoholomorphic disc through (center, direction).
    Disc {
        name: String,
        center: Vec<[f64; 2]>,
        direction: Vec<[f64; 2]>,
        #[serde(default = "default_disc_tol")]
        tol: f64,
    },
    /// Compare the two Levi form evaluations on seeded samples.
    LeviScan {
        name: String,
        n_points: usize,
        dirs_per_point: usize,
        #[serde(default = "default_scan_radius")]
        radius: f64,
        #[serde(default = "default_gap_tol")]
        gap_tol: f64,
    },
    /// Ladder search for a bounded strictly psh exhaustion certificate,
    /// or a single fixed-(A, η) check when `fixed` is given.
    DfSearch {
        name: String,
        #[serde(default)]
        fixed: Option<FixedPair>,
        #[serde(default = "default_collar_points")]
        n_collar_points: usize,
        #[serde(default = "default_dirs")]
        dirs_per_point: usize,
        /// a task expected to fail its preconditions (negative control)
        #[serde(default)]
        expect_precondition_failure: bool,
        #[serde(default = "default_true")]
        recheck: bool,
    },
    /// Tameness and closedness of ω = −d(J*dρ) for the certified ρ.
    Symplectic {
        name: String,
        n_points: usize,
        #[serde(default = "default_dirs")]
        n_dirs: usize,
    },
    /// Contact approximation of the boundary confoliation on the ladder
    /// of level sets Γ_j = {φ = −δ_j^{1/η}}.
    ContactApprox {
        name: String,
        deltas: Vec<f64>,
        #[serde(default = "default_contact_boundary")]
        n_boundary: usize,
    },
    /// Sweep a segment family of discs and record containment verdicts.
    HartogsSweep {
        name: String,
        center_start: Vec<[f64; 2]>,
        center_end: Vec<[f64; 2]>,
        direction: Vec<[f64; 2]>,
        n_params: usize,
        #[serde(default = "default_margin")]
        margin: f64,
    },
}

fn default_disc_tol() -> f64 {
    1e-8
}
fn default_scan_radius() -> f64 {
    0.5
}
fn default_gap_tol() -> f64 {
    1e-4
}
fn default_collar_points() -> usize {
    200
}
fn default_dirs() -> usize {
    4
}
fn default_contact_boundary() -> usize {
    16
}
fn default_margin() -> f64 {
    1e-3
}
fn default_true() -> bool {
    true
}

impl TaskSpec {
    pub fn name(&self) -> &str {
        match self {
            TaskSpec::Disc { name, .. }
            | TaskSpec::LeviScan { name, .. }
            | TaskSpec::DfSearch { name, .. }
            | TaskSpec::Symplectic { name, .. }
            | TaskSpec::ContactApprox { name, .. }
            | TaskSpec::HartogsSweep { name, .. } => name,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            TaskSpec::Disc { .. } => "disc",
            TaskSpec::LeviScan { .. } => "levi_scan",
            TaskSpec::DfSearch { .. } => "df_search",
            TaskSpec::Symplectic { .. } => "symplectic",
            TaskSpec::ContactApprox { .. } => "contact_approx",
            TaskSpec::HartogsSweep { .. } => "hartogs_sweep",
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub dimension: usize,
    pub seed: u64,
    pub structure: StructureSpec,
    pub domain: DomainConfig,
    #[serde(default)]
    pub psi: Option<PsiSpec>,
    pub tasks: Vec<TaskSpec>,
}

fn check_terms(terms: &[TermSpec], dim: usize, field: &str) -> Result<(), ConfigError> {
    if terms.is_empty() {
        return Err(bad(field, "term list is empty"));
    }
    for (i, t) in terms.iter().enumerate() {
        if t.z.len() != dim || t.zbar.len() != dim {
            return Err(bad(
                format!("{field}[{i}]"),
                format!(
                    "exponent vectors must have length {dim} (got z: {}, zbar: {})",
                    t.z.len(),
                    t.zbar.len()
                ),
            ));
        }
        if !t.re.is_finite() || !t.im.is_finite() {
            return Err(bad(format!("{field}[{i}]"), "coefficient is not finite"));
        }
    }
    Ok(())
}

impl Scenario {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.name.is_empty() {
            return Err(bad("name", "must be non-empty"));
        }
        let dim = self.dimension;
        if !(1..=3).contains(&dim) {
            return Err(bad("dimension", "must be 1, 2, or 3"));
        }
        match &self.structure {
            StructureSpec::Standard => {}
            StructureSpec::Seeded { sup_norm, .. } => {
                if !(*sup_norm > 0.0 && *sup_norm < 1.0) {
                    return Err(bad(
                        "structure.sup_norm",
                        format!("must lie in (0, 1), got {sup_norm}"),
                    ));
                }
            }
            StructureSpec::SingleEntry {
                row,
                col,
                terms,
                radius,
            } => {
                if *row >= dim || *col >= dim {
                    return Err(bad(
                        "structure.row/col",
                        format!("indices must be < dimension {dim}"),
                    ));
                }
                if !(*radius > 0.0) {
                    return Err(bad("structure.radius", "must be positive"));
                }
                check_terms(terms, dim, "structure.terms")?;
            }
        }
        match &self.domain {
            DomainConfig::Ball => {}
            DomainConfig::Egg { power } => {
                if *power < 1 {
                    return Err(bad("domain.power", "must be at least 1"));
                }
            }
            DomainConfig::HartogsFigure => {
                if dim < 2 {
                    return Err(bad("domain.kind", "hartogs_figure needs dimension ≥ 2"));
                }
            }
            DomainConfig::Polynomial {
                terms,
                chart_radius,
            } => {
                if !(*chart_radius > 0.0) {
                    return Err(bad("domain.chart_radius", "must be positive"));
                }
                check_terms(terms, dim, "domain.terms")?;
            }
        }
        if let Some(PsiSpec::Polynomial { terms }) = &self.psi {
            check_terms(terms, dim, "psi.terms")?;
        }
        if self.tasks.is_empty() {
            return Err(bad("tasks", "must list at least one task"));
        }
        let mut seen = std::collections::BTreeSet::new();
        let mut have_certificate = false;
        for (i, task) in self.tasks.iter().enumerate() {
            let at = |f: &str| format!("tasks[{i}].{f}");
            if task.name().is_empty() {
                return Err(bad(at("name"), "must be non-empty"));
            }
            if !seen.insert(task.name().to_string()) {
                return Err(bad(at("name"), "duplicate task name"));
            }
            match task {
                TaskSpec::Disc {
                    center,
                    direction,
                    tol,
                    ..
                } => {
                    if center.len() != dim || direction.len() != dim {
                        return Err(bad(
                            at("center/direction"),
                            format!("must have {dim} complex components"),
                        ));
                    }
                    if !(*tol > 0.0) {
                        return Err(bad(at("tol"), "must be positive"));
                    }
                }
                TaskSpec::LeviScan {
                    n_points,
                    dirs_per_point,
                    radius,
                    gap_tol,
                    ..
                } => {
                    if *n_points == 0 || *dirs_per_point == 0 {
                        return Err(bad(
                            at("n_points/dirs_per_point"),
                            "must be positive",
                        ));
                    }
                    if !(*radius > 0.0) {
                        return Err(bad(at("radius"), "must be positive"));
                    }
                    if !(*gap_tol > 0.0) {
                        return Err(bad(at("gap_tol"), "must be positive"));
                    }
                }
                TaskSpec::DfSearch {
                    fixed,
                    n_collar_points,
                    dirs_per_point,
                    expect_precondition_failure,
                    ..
                } => {
                    if let Some(pair) = fixed {
                        if !(pair.eta > 0.0 && pair.eta < 1.0) {
                            return Err(bad(
                                at("fixed.eta"),
                                format!("must lie in (0, 1), got {}", pair.eta),
                            ));
                        }
                        if !(pair.a > 0.0) {
                            return Err(bad(
                                at("fixed.A"),
                                format!("must be positive, got {}", pair.a),
                            ));
                        }
                    }
                    if *n_collar_points == 0 || *dirs_per_point == 0 {
                        return Err(bad(
                            at("n_collar_points/dirs_per_point"),
                            "must be positive",
                        ));
                    }
                    if !expect_precondition_failure {
                        have_certificate = true;
                    }
                }
                TaskSpec::Symplectic { n_points, n_dirs, .. } => {
                    if *n_points == 0 || *n_dirs == 0 {
                        return Err(bad(at("n_points/n_dirs"), "must be positive"));
                    }
                    if !have_certificate {
                        return Err(bad(
                            at("kind"),
                            "symplectic needs a df_search task earlier in the list",
                        ));
                    }
                }
                TaskSpec::ContactApprox { deltas, n_boundary, .. } => {
                    if deltas.is_empty() {
                        return Err(bad(at("deltas"), "must be non-empty"));
                    }
                    for (j, d) in deltas.iter().enumerate() {
                        if !(*d > 0.0 && *d < 1.0) {
                            return Err(bad(
                                at(&format!("deltas[{j}]")),
                                format!("must lie in (0, 1), got {d}"),
                            ));
                        }
                    }
                    if *n_boundary == 0 {
                        return Err(bad(at("n_boundary"), "must be positive"));
                    }
                    if !have_certificate {
                        return Err(bad(
                            at("kind"),
                            "contact_approx needs a df_search task earlier in the list",
                        ));
                    }
                }
                TaskSpec::HartogsSweep {
                    center_start,
                    center_end,
                    direction,
                    n_params,
                    margin,
                    ..
                } => {
                    if center_start.len() != dim
                        || center_end.len() != dim
                        || direction.len() != dim
                    {
                        return Err(bad(
                            at("center_start/center_end/direction"),
                            format!("must have {dim} complex components"),
                        ));
                    }
                    if *n_params < 2 {
                        return Err(bad(at("n_params"), "must be at least 2"));
                    }
                    if !(*margin > 0.0) {
                        return Err(bad(at("margin"), "must be positive"));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn build_structure(&self) -> Result<StructureField<f64>, ConfigError> {
        let dim = self.dimension;
        match &self.structure {
            StructureSpec::Standard => Ok(StructureField::standard(dim)),
            StructureSpec::Seeded { seed, sup_norm } => {
                // revalidate on a chart covering the domain ball plus the
                // finite-difference stencils that straddle its boundary
                StructureField::seeded_random(dim, *seed, *sup_norm)
                    .and_then(|s| s.with_chart_radius(1.5))
                    .map_err(|e| bad("structure", e.to_string()))
            }
            StructureSpec::SingleEntry {
                row,
                col,
                terms,
                radius,
            } => {
                let f = poly_from_terms(dim, terms, ValueKind::Complex)
                    .map_err(|e| bad("structure.terms", e.to_string()))?;
                StructureField::single_entry(dim, *row, *col, f, *radius)
                    .map_err(|e| bad("structure", e.to_string()))
            }
        }
    }

    pub fn build_domain(&self) -> Result<DomainSpec<f64>, ConfigError> {
        let dim = self.dimension;
        match &self.domain {
            DomainConfig::Ball => Ok(DomainSpec::ball(dim, self.seed)),
            DomainConfig::Egg { power } => Ok(DomainSpec::egg(dim, *power, self.seed)),
            DomainConfig::HartogsFigure => {
                let mut e1 = vec![0u32; dim];
                e1[0] = 1;
                let mut e2 = vec![0u32; dim];
                e2[1] = 1;
                let r = PolyField::monomial(dim, &e1, &e1, Complex64::new(1.0, 0.0))
                    .add(&PolyField::monomial(dim, &e2, &e2, Complex64::new(-1.0, 0.0)))
                    .add(&PolyField::constant(dim, Complex64::new(-0.25, 0.0)));
                DomainSpec::new(r, 1.2, None, self.seed, 64)
                    .map_err(|e| bad("domain", e.to_string()))
            }
            DomainConfig::Polynomial {
                terms,
                chart_radius,
            } => {
                let r = poly_from_terms(dim, terms, ValueKind::Real)
                    .map_err(|e| bad("domain.terms", e.to_string()))?;
                DomainSpec::new(r, *chart_radius, None, self.seed, 64)
                    .map_err(|e| bad("domain", e.to_string()))
            }
        }
    }

    pub fn build_psi(&self) -> Result<PolyField<f64>, ConfigError> {
        match &self.psi {
            None | Some(PsiSpec::AbsSq) => Ok(PolyField::abs_sq(self.dimension)),
            Some(PsiSpec::Polynomial { terms }) => {
                poly_from_terms(self.dimension, terms, ValueKind::Real)
                    .map_err(|e| bad("psi.terms", e.to_string()))
            }
        }
    }
}

fn poly_from_terms(
    dim: usize,
    terms: &[TermSpec],
    kind: ValueKind,
) -> acgeom::Result<PolyField<f64>> {
    let list: Vec<(Vec<u32>, Vec<u32>, Complex64)> = terms
        .iter()
        .map(|t| (t.z.clone(), t.zbar.clone(), Complex64::new(t.re, t.im)))
        .collect();
    PolyField::new(dim, list, kind)
}

pub fn load_scenario(path: &std::path::Path) -> Result<Scenario, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| bad("(file)", format!("cannot read {}: {e}", path.display())))?;
    let scenario: Scenario = serde_json::from_str(&text)
        .map_err(|e| bad("(json)", format!("parse error: {e}")))?;
    scenario.validate()?;
    Ok(scenario)
}
