//! The five subcommands. Each returns a [`Report`] for [`crate::output::render`].

use gravab_core::budget::{build_budget, render_budget, BudgetFormat};
use gravab_core::geomopt::optimize_geometry;
use gravab_core::gravfield::{field_sample, Sphere};
use gravab_core::phases::lattice_metric_shift;
use gravab_core::sequence::{differential_protocol, phase_vs_t_scan, total_phase, MassMode, MassSchedule, SequenceTemplate};
use gravab_core::stationary::{find_arm_positions, find_axial_stationary_points};
use gravab_core::{Error, Result, SourceConfiguration, Vector3};
use serde_json::{json, Value};

use crate::config::{GeometryMode, RunConfig};
use crate::output::{num, Body, Report, Table};

/// Source configuration described by the run (source masses only).
pub fn source_configuration(run: &RunConfig) -> Result<SourceConfiguration> {
    let p = &run.params;
    match run.geometry {
        GeometryMode::Pair | GeometryMode::Optimize => {
            SourceConfiguration::symmetric_pair(p.separation, p.radius, p.density, p.constants)
        }
        GeometryMode::Single => {
            SourceConfiguration::single(Sphere::new(Vector3::zero(), p.radius, p.density)?, p.constants)
        }
    }
}

fn summary_table() -> Table {
    Table::new("summary", &["quantity", "value", "unit"])
}

fn summary_row(t: &mut Table, json: &mut Value, key: &'static str, value: f64, unit: &str) {
    t.push(vec![key.to_string(), num(value), unit.to_string()]);
    json[key] = json!(value);
}

#[derive(Debug, Clone, Default)]
pub struct FieldArgs {
    /// [m]
    pub x_min: Option<f64>,
    /// [m]
    pub x_max: Option<f64>,
    pub samples: usize,
    pub include_earth: bool,
}

/// Potential and its axial derivatives along the x axis.
pub fn cmd_field(run: &RunConfig, args: &FieldArgs) -> Result<Report> {
    let mut config = source_configuration(run)?;
    if args.include_earth {
        config = config.with_earth(Vector3::unit_x())?;
    }
    let p = &run.params;
    let half_span = match run.geometry {
        GeometryMode::Single => 3.0 * p.radius,
        _ => 0.5 * p.separation + 2.0 * p.radius,
    };
    let (lo, hi) = (args.x_min.unwrap_or(-half_span), args.x_max.unwrap_or(half_span));
    if args.samples < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 samples, got {}", args.samples)));
    }
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidInput(format!("bad axis range [{lo}, {hi}]")));
    }
    let rate = p.species.mass / p.constants.hbar;
    let mut table = Table::new("field", &["x_m", "U_m2_s2", "dU_dx_m_s2", "d2U_dx2_s2", "phase_rate_rad_s"]);
    let mut rows = Vec::with_capacity(args.samples);
    let n = args.samples - 1;
    for i in 0..=n {
        let x = if i == n { hi } else { lo + (hi - lo) * i as f64 / n as f64 };
        let s = field_sample(&Vector3::on_axis(x), &config);
        let (u, du, d2u) = (s.potential, s.gradient.x, s.hessian.get(0, 0));
        table.push(vec![num(x), num(u), num(du), num(d2u), num(rate * u)]);
        rows.push(json!({"x_m": x, "U_m2_s2": u, "dU_dx_m_s2": du, "d2U_dx2_s2": d2u, "phase_rate_rad_s": rate * u}));
    }
    Ok(Report {
        command: "field",
        formulas: vec!["field_sample", "ab_phase (per second)"],
        body: Body::Tables(vec![table]),
        json: json!({ "species": p.species.name, "samples": rows }),
    })
}

/// Axial stationary points, the arm positions and the potential difference.
pub fn cmd_saddles(run: &RunConfig) -> Result<Report> {
    let config = source_configuration(run)?;
    let p = &run.params;
    let points = find_axial_stationary_points(&config)?;
    let arms = find_arm_positions(&config)?;
    let mut table = Table::new("points", &["x_m", "kind", "U_m2_s2", "eig1_s2", "eig2_s2", "eig3_s2"]);
    let mut list = Vec::new();
    for sp in &points {
        let e = sp.hessian_eigenvalues;
        table.push(vec![num(sp.position.x), sp.kind.to_string(), num(sp.potential), num(e[0]), num(e[1]), num(e[2])]);
        list.push(json!({"x_m": sp.position.x, "kind": sp.kind, "U_m2_s2": sp.potential, "eigenvalues_s2": e}));
    }
    let mut summary = summary_table();
    let mut js = json!({ "points": list });
    summary_row(&mut summary, &mut js, "separation_L", p.separation, "m");
    summary_row(&mut summary, &mut js, "radius_R", p.radius, "m");
    summary_row(&mut summary, &mut js, "arm_separation_s", arms.separation, "m");
    summary_row(&mut summary, &mut js, "delta_U", arms.potential_difference, "m2/s2");
    summary_row(&mut summary, &mut js, "delta_U_over_c2", lattice_metric_shift(arms.potential_difference, &p.constants), "1");
    summary_row(&mut summary, &mut js, "phase_rate", p.species.mass * arms.potential_difference / p.constants.hbar, "rad/s");
    Ok(Report {
        command: "saddles",
        formulas: vec!["find_axial_stationary_points", "find_arm_positions", "lattice_metric_shift", "ab_phase (per second)"],
        body: Body::Tables(vec![table, summary]),
        json: js,
    })
}

/// Sphere geometry that maximises ΔU for the configured s and ρ.
pub fn cmd_optimize(run: &RunConfig) -> Result<Report> {
    let p = &run.params;
    let g = optimize_geometry(p.s, p.density, p.constants)?;
    let mut summary = summary_table();
    let mut js = json!({});
    summary_row(&mut summary, &mut js, "L_over_R", g.l_over_r, "1");
    summary_row(&mut summary, &mut js, "s_over_R", g.s_over_r, "1");
    summary_row(&mut summary, &mut js, "coefficient", g.coefficient, "1");
    summary_row(&mut summary, &mut js, "separation_L", g.separation, "m");
    summary_row(&mut summary, &mut js, "radius_R", g.radius, "m");
    summary_row(&mut summary, &mut js, "arm_separation_s", g.s, "m");
    summary_row(&mut summary, &mut js, "density", g.density, "kg/m3");
    summary_row(&mut summary, &mut js, "delta_U", g.potential_difference, "m2/s2");
    summary_row(&mut summary, &mut js, "phase_rate", p.species.mass * g.potential_difference / p.constants.hbar, "rad/s");
    Ok(Report {
        command: "optimize",
        formulas: vec!["optimize_geometry", "coefficient_for_ratio"],
        body: Body::Tables(vec![summary]),
        json: js,
    })
}

pub fn cmd_budget(run: &RunConfig) -> Result<Report> {
    let report = build_budget(&run.params)?;
    let json_text = render_budget(&report, BudgetFormat::Json)?;
    let json: Value = serde_json::from_str(&json_text).map_err(|e| Error::Serialization(e.to_string()))?;
    Ok(Report {
        command: "budget",
        formulas: report.entries.iter().map(|e| e.formula).collect(),
        body: Body::Text { table: render_budget(&report, BudgetFormat::Table)?, csv: render_budget(&report, BudgetFormat::Csv)? },
        json,
    })
}

#[derive(Debug, Clone, Default)]
pub struct SequenceArgs {
    pub shake: bool,
    pub type_ii: bool,
    /// [s]
    pub mass_ramp: f64,
    /// Hold times for an optional scan [s].
    pub scan: Vec<f64>,
}

/// Full timeline with Earth's field along x, the with/without-masses
/// comparison and an optional scan over the hold time.
pub fn cmd_sequence(run: &RunConfig, args: &SequenceArgs) -> Result<Report> {
    let p = &run.params;
    let masses_only = source_configuration(run)?;
    let config = masses_only.clone().with_earth(Vector3::unit_x())?;
    let arms = find_arm_positions(&masses_only)?;
    let mut template = SequenceTemplate::new(arms.center.position, arms.inner.position, run.transport);
    template.mode = if args.type_ii { MassMode::TypeII } else { MassMode::TypeI };
    template.mass_ramp = args.mass_ramp;
    if args.shake {
        template.shake_b = Some((run.shake.amplitude, run.shake.angular_frequency));
    }
    let t = p.hold_time;
    let with = template.build(t)?;
    let without = with.with_masses(MassSchedule::Absent)?;
    let result = total_phase(&with, &config, &p.species, &[])?;
    let phi_g = differential_protocol(&with, &without, &config, &p.species, &[])?;

    let mut summary = summary_table();
    let mut js = json!({ "mode": template.mode });
    summary_row(&mut summary, &mut js, "hold_time_T", t, "s");
    summary_row(&mut summary, &mut js, "transport", run.transport, "s");
    summary_row(&mut summary, &mut js, "phi_G_differential", phi_g, "rad");
    summary_row(&mut summary, &mut js, "phi_G", result.phi_g, "rad");
    summary_row(&mut summary, &mut js, "phi_earth", result.phi_earth, "rad");
    summary_row(&mut summary, &mut js, "phi_kinetic", result.phi_kinetic, "rad");
    summary_row(&mut summary, &mut js, "delta_phi_total", result.delta_phi_total, "rad");
    summary_row(&mut summary, &mut js, "population_total", result.population, "1");
    summary_row(&mut summary, &mut js, "population_signal_only", (0.5 * phi_g).cos().powi(2), "1");
    summary_row(&mut summary, &mut js, "dtau_mass", result.proper_time.mass, "s");
    summary_row(&mut summary, &mut js, "dtau_earth", result.proper_time.earth, "s");
    summary_row(&mut summary, &mut js, "dtau_kinetic", result.proper_time.kinetic, "s");
    summary_row(&mut summary, &mut js, "dtau_total", result.proper_time.total, "s");
    if args.shake && t > 0.0 {
        summary_row(&mut summary, &mut js, "kinetic_phase_rate", result.phi_kinetic / t, "rad/s");
    }
    let mut tables = vec![summary];
    let mut formulas = vec!["proper_time_difference", "total_phase", "differential_protocol"];
    if !args.scan.is_empty() {
        let scan = phase_vs_t_scan(&template, &masses_only, &p.species, &args.scan)?;
        let mut st = Table::new("scan", &["T_s", "phi_G_rad"]);
        for (ti, phi) in &scan.samples {
            st.push(vec![num(*ti), num(*phi)]);
        }
        summary_row(&mut tables[0], &mut js, "scan_slope", scan.slope, "rad/s");
        summary_row(&mut tables[0], &mut js, "scan_intercept", scan.intercept, "rad");
        summary_row(&mut tables[0], &mut js, "scan_max_residual", scan.max_residual, "rad");
        js["scan"] = json!(scan.samples.iter().map(|(a, b)| json!({"T_s": a, "phi_G_rad": b})).collect::<Vec<_>>());
        tables.push(st);
        formulas.push("phase_vs_t_scan");
    }
    Ok(Report { command: "sequence", formulas, body: Body::Tables(tables), json: js })
}
