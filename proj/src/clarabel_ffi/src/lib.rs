//! C entry point to the Clarabel interior-point solver for problems
//!
//!   minimize q'x  subject to  b - A x in K,
//!
//! where K is a nonnegative orthant followed by one PSD cone in scaled
//! upper-triangular (column-major) form.

use std::slice;

use clarabel::algebra::CscMatrix;
use clarabel::solver::{
    DefaultSettings, DefaultSolver, IPSolver, SolverStatus, SupportedConeT,
};

pub const DDR_SOLVED: i32 = 0;
pub const DDR_PRIMAL_INFEASIBLE: i32 = 1;
pub const DDR_DUAL_INFEASIBLE: i32 = 2;
pub const DDR_INACCURATE: i32 = 3;
pub const DDR_LIMIT: i32 = 4;
pub const DDR_FAILED: i32 = 5;

#[repr(C)]
pub struct DdrClarabelProblem {
    pub n: usize,
    pub m: usize,
    pub q: *const f64,
    pub a_colptr: *const usize,
    pub a_rowval: *const usize,
    pub a_nzval: *const f64,
    pub b: *const f64,
    pub nonnegative: usize,
    pub psd_dim: usize,
}

#[repr(C)]
pub struct DdrClarabelSettings {
    pub tolerance: f64,
    pub max_iterations: u32,
    pub time_limit: f64,
    pub verbose: i32,
}

#[repr(C)]
pub struct DdrClarabelResult {
    pub x: *mut f64,
    pub objective: f64,
    pub iterations: u32,
    pub status_text: [u8; 32],
}

fn status_code(status: SolverStatus) -> i32 {
    match status {
        SolverStatus::Solved => DDR_SOLVED,
        SolverStatus::PrimalInfeasible => DDR_PRIMAL_INFEASIBLE,
        SolverStatus::DualInfeasible => DDR_DUAL_INFEASIBLE,
        SolverStatus::AlmostSolved
        | SolverStatus::AlmostPrimalInfeasible
        | SolverStatus::AlmostDualInfeasible => DDR_INACCURATE,
        SolverStatus::MaxIterations | SolverStatus::MaxTime => DDR_LIMIT,
        _ => DDR_FAILED,
    }
}

/// # Safety
/// All pointers must be valid for the sizes given in `problem`; `result.x`
/// must hold `problem.n` values.
#[no_mangle]
pub unsafe extern "C" fn ddr_clarabel_solve(
    problem: *const DdrClarabelProblem,
    settings: *const DdrClarabelSettings,
    result: *mut DdrClarabelResult,
) -> i32 {
    let p = &*problem;
    let s = &*settings;
    let out = &mut *result;
    let nnz = *p.a_colptr.add(p.n);

    let q = slice::from_raw_parts(p.q, p.n).to_vec();
    let b = slice::from_raw_parts(p.b, p.m).to_vec();
    let a = CscMatrix::new(
        p.m,
        p.n,
        slice::from_raw_parts(p.a_colptr, p.n + 1).to_vec(),
        slice::from_raw_parts(p.a_rowval, nnz).to_vec(),
        slice::from_raw_parts(p.a_nzval, nnz).to_vec(),
    );
    let hessian = CscMatrix::zeros((p.n, p.n));

    let mut cones = Vec::new();
    if p.nonnegative > 0 {
        cones.push(SupportedConeT::NonnegativeConeT(p.nonnegative));
    }
    if p.psd_dim > 0 {
        cones.push(SupportedConeT::PSDTriangleConeT(p.psd_dim));
    }

    let mut config = DefaultSettings::<f64>::default();
    config.verbose = s.verbose != 0;
    config.max_iter = s.max_iterations;
    config.tol_gap_abs = s.tolerance;
    config.tol_gap_rel = s.tolerance;
    config.tol_feas = s.tolerance;
    if s.time_limit > 0.0 {
        config.time_limit = s.time_limit;
    }

    let mut solver = match DefaultSolver::new(&hessian, &q, &a, &b, &cones, config) {
        Ok(solver) => solver,
        Err(_) => {
            write_text(out, "invalid problem data");
            return DDR_FAILED;
        }
    };
    solver.solve();

    let x = slice::from_raw_parts_mut(out.x, p.n);
    x.copy_from_slice(&solver.solution.x);
    out.objective = solver.solution.obj_val;
    out.iterations = solver.solution.iterations;
    write_text(out, &format!("{:?}", solver.solution.status));
    status_code(solver.solution.status)
}

fn write_text(out: &mut DdrClarabelResult, text: &str) {
    out.status_text = [0; 32];
    let bytes = text.as_bytes();
    let len = bytes.len().min(out.status_text.len() - 1);
    out.status_text[..len].copy_from_slice(&bytes[..len]);
}
