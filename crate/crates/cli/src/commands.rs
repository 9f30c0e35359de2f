use rayon::prelude::*;
use serde_json::json;
use susyphoton::dynamics::{loop_report_mcs, loop_report_susy};
use susyphoton::LoopReport;
use susyphoton::phase_space::{wigner_scalar_mcs, wigner_susy, GridSpec};
use susyphoton::scalar_mcs::{build_mcs, hur, mandel_q, reassemble, scs_decomposition, sigmas};
use susyphoton::susy::{mandel_q_susy, sigmas_susy};
use susyphoton::{Complex64, Error, McsSpec, SusySpec, TruncationPolicy};

use crate::config::{Range, RunConfig, DEFAULT_K2_RANGE};
use crate::error::CliError;
use crate::output::{json_array, meta, num, render, Cell, Document, Table};

/// Bisection stops once the bracket is narrower than this.
pub const ROOT_TOL: f64 = 1e-9;

pub fn policy(cfg: &RunConfig) -> TruncationPolicy {
    TruncationPolicy::new(cfg.trunc, 1e-12)
}

fn susy_spec(cfg: &RunConfig, z: Complex64, k2: f64) -> Result<SusySpec, Error> {
    Ok(SusySpec::new(cfg.m, cfg.j, z, k2, cfg.amp_a(), cfg.amp_c())?.with_omega(cfg.omega))
}

fn status(e: &Error) -> String {
    format!("error: {e}")
}

fn fmt_tag(x: f64) -> String {
    format!("{x}")
}

pub fn cmd_hur(cfg: &RunConfig) -> Result<Vec<Document>, CliError> {
    let zs = cfg.z_points();
    let columns = ["re_z", "im_z", "sigma_q", "sigma_p", "product"];
    let sweep = |k2: Option<f64>| -> Result<Table, CliError> {
        let rows: Vec<Vec<Cell>> = zs
            .par_iter()
            .map(|&z| {
                let s = match k2 {
                    Some(k2) => susy_spec(cfg, z, k2).and_then(|s| sigmas_susy(&s)),
                    None => McsSpec::new(cfg.m, cfg.j, z).map(sigmas),
                };
                let (q, p) = s.unwrap_or((f64::NAN, f64::NAN));
                vec![Cell::Num(z.re), Cell::Num(z.im), Cell::Num(q), Cell::Num(p), Cell::Num(q * p)]
            })
            .collect();
        Ok(Table { columns: columns.to_vec(), rows })
    };
    if !cfg.susy {
        let m = meta("hur", cfg, json!({"mode": "scalar"}));
        return Ok(vec![Document { suffix: None, text: render(&m, &sweep(None)?, cfg.format) }]);
    }
    cfg.k2_points()
        .into_iter()
        .map(|k2| {
            let m = meta("hur", cfg, json!({"mode": "susy", "k2": k2}));
            Ok(Document { suffix: Some(format!("k2_{}", fmt_tag(k2))), text: render(&m, &sweep(Some(k2))?, cfg.format) })
        })
        .collect()
}

/// Roots of `f` on `range`: sign changes on the scan lattice refined by bisection.
pub fn find_roots(f: impl Fn(f64) -> f64, range: Range, tol: f64) -> Vec<f64> {
    let xs = range.points();
    let fs: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let mut roots = Vec::new();
    for i in 0..xs.len() {
        if fs[i] == 0.0 {
            roots.push(xs[i]);
            continue;
        }
        if i + 1 == xs.len() || !(fs[i] * fs[i + 1] < 0.0) {
            continue;
        }
        let (mut lo, mut hi, mut flo) = (xs[i], xs[i + 1], fs[i]);
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            let fm = f(mid);
            if fm == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if (fm < 0.0) == (flo < 0.0) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        roots.push(0.5 * (lo + hi));
    }
    roots
}

/// Poissonian crossings `Q(k2) = 0` of the supercoherent state at fixed `z`.
pub fn mandel_roots(cfg: &RunConfig, z: Complex64, range: Range) -> Vec<f64> {
    find_roots(|k2| susy_spec(cfg, z, k2).and_then(|s| mandel_q_susy(&s)).unwrap_or(f64::NAN), range, ROOT_TOL)
}

pub fn cmd_mandel(cfg: &RunConfig) -> Result<Vec<Document>, CliError> {
    if cfg.find_root {
        if !cfg.susy {
            return Err(CliError::Usage("--find-root needs --susy (roots are taken in k2)".into()));
        }
        let range = cfg.k2_range.unwrap_or(DEFAULT_K2_RANGE);
        let mut t = Table::new(&["re_z", "im_z", "root"]);
        for z in cfg.z_line() {
            let roots = mandel_roots(cfg, z, range);
            if roots.is_empty() {
                return Err(CliError::Numeric(format!(
                    "no Poissonian crossing in range [{}, {}] for z = {}{:+}i",
                    range.lo, range.hi, z.re, z.im
                )));
            }
            t.rows.extend(roots.into_iter().map(|r| vec![Cell::Num(z.re), Cell::Num(z.im), Cell::Num(r)]));
        }
        let m = meta("mandel", cfg, json!({"mode": "root", "bracket": range, "tolerance": ROOT_TOL}));
        return Ok(vec![Document { suffix: None, text: render(&m, &t, cfg.format) }]);
    }
    if !cfg.susy {
        let zs = cfg.z_line();
        let rows = zs
            .par_iter()
            .map(|&z| {
                let q = McsSpec::new(cfg.m, cfg.j, z).and_then(mandel_q).unwrap_or(f64::NAN);
                vec![Cell::Num(z.norm()), Cell::Num(q)]
            })
            .collect();
        let t = Table { columns: vec!["abs_z", "Q"], rows };
        let m = meta("mandel", cfg, json!({"mode": "scalar"}));
        return Ok(vec![Document { suffix: None, text: render(&m, &t, cfg.format) }]);
    }
    let k2s = if cfg.k2_range.is_none() && cfg.k2.is_empty() { DEFAULT_K2_RANGE.points() } else { cfg.k2_points() };
    cfg.z_line()
        .into_iter()
        .map(|z| {
            let rows = k2s
                .par_iter()
                .map(|&k2| {
                    let q = susy_spec(cfg, z, k2).and_then(|s| mandel_q_susy(&s)).unwrap_or(f64::NAN);
                    vec![Cell::Num(k2), Cell::Num(q)]
                })
                .collect();
            let t = Table { columns: vec!["k2", "Q"], rows };
            let m = meta("mandel", cfg, json!({"mode": "susy", "z": [z.re, z.im]}));
            Ok(Document { suffix: Some(format!("z_{}_{}", fmt_tag(z.re), fmt_tag(z.im))), text: render(&m, &t, cfg.format) })
        })
        .collect()
}

pub fn cmd_wigner(cfg: &RunConfig) -> Result<Vec<Document>, CliError> {
    let z = cfg.single_z();
    let grid = GridSpec::square(cfg.grid_half, cfg.grid_n);
    let result = if cfg.susy {
        let k2 = cfg.k2_points().first().copied().unwrap_or(0.0);
        wigner_susy(&susy_spec(cfg, z, k2)?, grid)
    } else {
        wigner_scalar_mcs(McsSpec::new(cfg.m, cfg.j, z)?, grid)
    };
    let g = match result {
        Ok(g) => g,
        Err(Error::GridTooSmall { residual, limit }) => {
            return Err(CliError::Numeric(format!(
                "normalization residual {residual:.3e} exceeds {limit:.0e}; enlarge the window (e.g. --grid-half {}) or refine it (e.g. --grid-n {})",
                (2.0 * cfg.grid_half).max(z.norm() * 2.0 + 8.0),
                2 * cfg.grid_n + 1
            )))
        }
        Err(e) => return Err(e.into()),
    };
    let m = meta(
        "wigner",
        cfg,
        json!({
            "normalization_residual": num(g.normalization_residual()),
            "min_value": num(g.min_value()),
            "max_value": num(g.max_value()),
            "imag_residue": num(g.imag_residue),
            "layout": "grid[i][k] = W(q_i, p_k)",
        }),
    );
    let np = g.spec.np;
    let rows: Vec<String> = g.values.chunks(np).map(json_array).collect();
    let text = format!(
        "{{\"meta\":{m},\"axes\":{{\"q\":{},\"p\":{}}},\"grid\":[{}]}}\n",
        json_array(&g.spec.qs()),
        json_array(&g.spec.ps()),
        rows.join(",")
    );
    Ok(vec![Document { suffix: None, text }])
}

fn phase_cells(z: Complex64, k2: f64, r: &Result<LoopReport, Error>) -> Vec<Cell> {
    let mut row = vec![Cell::Num(z.re), Cell::Num(z.im), Cell::Num(k2)];
    match r {
        Ok(rep) => row.extend([
            Cell::Num(rep.phase),
            Cell::Num(rep.geometric_phase),
            Cell::Num(rep.fidelity),
            Cell::Text("ok".into()),
        ]),
        Err(e) => row.extend([Cell::Num(f64::NAN), Cell::Num(f64::NAN), Cell::Num(f64::NAN), Cell::Text(status(e))]),
    }
    row
}

pub fn cmd_phase(cfg: &RunConfig) -> Result<Vec<Document>, CliError> {
    let pol = policy(cfg);
    let zs = cfg.z_points();
    let columns = vec!["re_z", "im_z", "k2", "phi", "beta", "fidelity", "status"];
    let rows: Vec<Vec<Cell>> = if cfg.susy {
        let pts: Vec<(Complex64, f64)> = zs.iter().flat_map(|&z| cfg.k2_points().into_iter().map(move |k| (z, k))).collect();
        pts.par_iter()
            .map(|&(z, k2)| phase_cells(z, k2, &susy_spec(cfg, z, k2).and_then(|s| loop_report_susy(&s, &pol))))
            .collect()
    } else {
        zs.par_iter()
            .map(|&z| phase_cells(z, f64::NAN, &McsSpec::new(cfg.m, cfg.j, z).and_then(|s| loop_report_mcs(s, &pol))))
            .collect()
    };
    let m = meta("phase", cfg, json!({"mode": if cfg.susy { "susy" } else { "scalar" }}));
    Ok(vec![Document { suffix: None, text: render(&m, &Table { columns, rows }, cfg.format) }])
}

pub fn cmd_decompose(cfg: &RunConfig) -> Result<Vec<Document>, CliError> {
    let spec = McsSpec::new(cfg.m, cfg.j, cfg.single_z())?;
    let parts = scs_decomposition(spec)?;
    let st = build_mcs(spec, &policy(cfg))?;
    let residual = reassemble(&parts, st.vector.dim()).max_abs_diff(&st.vector);
    let mut t = Table::new(&["n", "re_label", "im_label", "re_weight", "im_weight"]);
    for (n, p) in parts.iter().enumerate() {
        t.rows.push(vec![Cell::Int(n), Cell::Num(p.label.re), Cell::Num(p.label.im), Cell::Num(p.weight.re), Cell::Num(p.weight.im)]);
    }
    let m = meta(
        "decompose",
        cfg,
        json!({"norm_const": num(st.norm_const), "reassembly_residual": num(residual), "hur": num(hur(spec)), "dim": st.vector.dim()}),
    );
    Ok(vec![Document { suffix: None, text: render(&m, &t, cfg.format) }])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_of_simple_functions() {
        let r = find_roots(|x| x * x - 2.0, Range { lo: -5.0, hi: 5.0, step: 0.05 }, 1e-12);
        assert_eq!(r.len(), 2);
        assert!((r[1] - 2f64.sqrt()).abs() < 1e-11 && (r[0] + 2f64.sqrt()).abs() < 1e-11);
        assert!(find_roots(|x| x * x + 1.0, Range { lo: -1.0, hi: 1.0, step: 0.1 }, 1e-9).is_empty());
        let r = find_roots(|x| x, Range { lo: -1.0, hi: 1.0, step: 0.5 }, 1e-9);
        assert_eq!(r, vec![0.0]);
    }
}
