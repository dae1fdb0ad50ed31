use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use sqrtlap::calculus::{ClosedForm, CountScale, RadicalSpectrum};
use sqrtlap::discretize::{assemble_laplacian, check_green_identities};
use sqrtlap::eigensolve::{eigendecompose, SpectralDecomposition};
use sqrtlap::evolution::{heat_solve, wave_energy, wave_solve, ModalState, WaveParams};
use sqrtlap::geometry::{
    christoffel, christoffel_with, divergence, divergence_via_christoffel, Field, MetricDerivative,
    VecField,
};
use sqrtlap::nodal::{courant_check, nodal_tone_check, pleijel_ratio};
use sqrtlap::variational::{
    dirichlet_bracket, neumann_bracket, rayleigh_quotient, Cut, Interface, Partition,
};

use crate::expr::Expr;
use crate::report::{fmt_num, Report};
use crate::{Ctx, InterfaceArg, ScaleArg};

type Out = Result<Report, String>;

fn err(e: sqrtlap::Error) -> String {
    e.to_string()
}

fn decompose(ctx: &Ctx, default: Option<usize>) -> Result<SpectralDecomposition<f64>, String> {
    let op = assemble_laplacian(&ctx.domain).map_err(err)?;
    let n = ctx.domain.len();
    let count = ctx.modes.or(default).unwrap_or(n);
    eigendecompose(&op, count).map_err(err)
}

fn lengths(ctx: &Ctx) -> Vec<f64> {
    ctx.domain.axes().iter().map(|a| a.length()).collect()
}

pub fn spectrum(ctx: &Ctx) -> Out {
    let d = decompose(ctx, Some(10))?;
    let mut r = Report::new(
        ctx.config(json!({})),
        &["k", "lambda", "radical", "residual"],
    );
    for k in 0..d.len() {
        r.row(vec![
            (k + 1).into(),
            d.lambdas()[k].into(),
            d.radicals()[k].into(),
            d.residuals()[k].into(),
        ]);
    }
    r.note("operator_norm", d.operator_norm());
    if let Some(tag) = ClosedForm::detect(&*ctx.domain) {
        let exact = RadicalSpectrum::closed_form(tag, &lengths(ctx), d.len()).map_err(err)?;
        let dev = d
            .lambdas()
            .iter()
            .zip(exact.lambdas())
            .map(|(a, b)| {
                if *b == 0.0 {
                    a.abs()
                } else {
                    (a - b).abs() / b
                }
            })
            .fold(0.0, f64::max);
        r.note("closed_form", format!("{tag:?}"));
        r.note("max_rel_dev_closed_form", dev);
    }
    let worst = d.residuals().iter().cloned().fold(0.0, f64::max);
    let bound = 1e-8 * d.operator_norm().max(1.0);
    r.check(
        "residuals",
        worst <= bound,
        format!("max {} <= {}", fmt_num(worst), fmt_num(bound)),
    );
    Ok(r)
}

pub fn weyl(
    ctx: &Ctx,
    lambda_min: Option<f64>,
    lambda_max: Option<f64>,
    analytic: bool,
    levels: &[f64],
    scale: ScaleArg,
    expect_rel: Option<f64>,
) -> Out {
    let cfg = ctx.config(json!({
        "lambda_min": lambda_min,
        "lambda_max": lambda_max,
        "analytic": analytic,
        "level": levels,
        "scale": match scale { ScaleArg::Lambda => "lambda", ScaleArg::Radical => "radical" },
        "expect_rel": expect_rel,
    }));
    let spec = if analytic {
        let tag = ClosedForm::detect(&*ctx.domain)
            .ok_or("--analytic needs a domain with a closed-form spectrum")?;
        let top = lambda_max.ok_or("--analytic needs --lambda-max")?;
        RadicalSpectrum::closed_form_up_to(tag, &lengths(ctx), top).map_err(err)?
    } else {
        RadicalSpectrum::from_decomposition(&decompose(ctx, None)?)
    };
    let window = spec.index_window(
        lambda_min.unwrap_or(f64::MIN_POSITIVE),
        lambda_max.unwrap_or(f64::INFINITY),
    );
    let fit = spec.weyl_fit(window).map_err(err)?;
    let mut r = Report::new(cfg, &["k", "lambda", "radical", "count"]);
    for (k, (&l, &s)) in spec.lambdas().iter().zip(spec.radicals()).enumerate() {
        r.row(vec![
            (k + 1).into(),
            l.into(),
            s.into(),
            spec.weyl_count(l, CountScale::Lambda).into(),
        ]);
    }
    let count_scale = match scale {
        ScaleArg::Lambda => CountScale::Lambda,
        ScaleArg::Radical => CountScale::Radical,
    };
    for &lv in levels {
        r.note(format!("count_at_{lv}"), spec.weyl_count(lv, count_scale));
    }
    r.note("exponent", fit.exponent);
    r.note("constant", fit.constant);
    r.note("free_constant", fit.free_constant);
    r.note("predicted_constant", fit.predicted_constant);
    r.note("relative_error", fit.relative_error());
    r.note("points", fit.points);
    if let Some(tol) = expect_rel {
        let rel = fit.relative_error();
        r.check(
            "weyl_constant",
            rel.abs() <= tol,
            format!("|{}| <= {}", fmt_num(rel), fmt_num(tol)),
        );
    }
    Ok(r)
}

fn times_sorted(times: &[f64]) -> Result<Vec<f64>, String> {
    if times.is_empty() {
        return Err("--times needs at least one value".into());
    }
    if let Some(t) = times.iter().find(|t| !t.is_finite() || **t < 0.0) {
        return Err(format!("times must be finite and nonnegative, got {t}"));
    }
    let mut t = times.to_vec();
    t.sort_by(f64::total_cmp);
    Ok(t)
}

fn push_field(r: &mut Report, t: f64, u: &Field<f64>) {
    let dom = u.domain();
    for (i, &v) in u.values().iter().enumerate() {
        let [x, y] = dom.point(i);
        r.row(vec![t.into(), i.into(), x.into(), y.into(), v.into()]);
    }
}

fn l2_norm(u: &Field<f64>) -> f64 {
    let w = u.domain().weights();
    u.values()
        .iter()
        .zip(w)
        .map(|(v, w)| w * v * v)
        .sum::<f64>()
        .sqrt()
}

pub fn heat(ctx: &Ctx, times: &[f64], initial: &str) -> Out {
    let times = times_sorted(times)?;
    let d = decompose(ctx, None)?;
    let f = Expr::parse(initial)?.sample(&ctx.domain)?;
    let mut r = Report::new(
        ctx.config(json!({ "times": times, "initial": initial })),
        &["t", "node", "x", "y", "value"],
    );
    let mut norms = Vec::with_capacity(times.len());
    for &t in &times {
        let u = heat_solve(&d, &f, t).map_err(err)?;
        norms.push(l2_norm(&u));
        r.note(format!("norm_at_{t}"), *norms.last().unwrap());
        push_field(&mut r, t, &u);
    }
    let ok = norms
        .windows(2)
        .all(|w| w[1] <= w[0] * (1.0 + 1e-12) + 1e-300);
    r.check(
        "norm_nonincreasing",
        ok,
        "weighted L2 norm along increasing t",
    );
    Ok(r)
}

pub fn wave(ctx: &Ctx, times: &[f64], initial: &str, rho: f64, tau: f64) -> Out {
    let times = times_sorted(times)?;
    let p = WaveParams::new(rho, tau).map_err(err)?;
    let d = decompose(ctx, None)?;
    let f = Expr::parse(initial)?.sample(&ctx.domain)?;
    let state = ModalState::from_field(&d, &f).map_err(err)?;
    let mut r = Report::new(
        ctx.config(json!({ "times": times, "initial": initial, "rho": rho, "tau": tau })),
        &["t", "node", "x", "y", "value"],
    );
    let e0 = wave_energy(&d, &state, 0.0, p).map_err(err)?;
    let mut drift = 0.0f64;
    for &t in &times {
        let u = wave_solve(&d, &f, t, p).map_err(err)?;
        let e = wave_energy(&d, &state, t, p).map_err(err)?;
        drift = drift.max((e - e0).abs());
        r.note(format!("energy_at_{t}"), e);
        push_field(&mut r, t, &u);
    }
    let bound = 1e-10 * e0.abs().max(f64::MIN_POSITIVE);
    r.check(
        "energy_conserved",
        drift <= bound,
        format!(
            "max |E(t) - E(0)| = {} <= {}",
            fmt_num(drift),
            fmt_num(bound)
        ),
    );
    Ok(r)
}

pub fn rayleigh(ctx: &Ctx, field: &str) -> Out {
    let op = assemble_laplacian(&ctx.domain).map_err(err)?;
    let f = Expr::parse(field)?.sample(&ctx.domain)?;
    let q = rayleigh_quotient(&f, &op).map_err(err)?;
    let d = eigendecompose(&op, 1).map_err(err)?;
    let l1 = d.lambdas()[0];
    let mut r = Report::new(
        ctx.config(json!({ "field": field })),
        &["quotient", "lambda1"],
    );
    r.row(vec![q.into(), l1.into()]);
    let slack = 1e-12 * op.norm();
    r.check(
        "quotient_ge_lambda1",
        q >= l1 - slack,
        format!("{} >= {}", fmt_num(q), fmt_num(l1)),
    );
    Ok(r)
}

pub fn bracket(ctx: &Ctx, cuts: &[f64], axis: usize, iface: InterfaceArg) -> Out {
    let interface = match iface {
        InterfaceArg::Dirichlet => Interface::Dirichlet,
        InterfaceArg::Neumann => Interface::Neumann,
    };
    let cut_list: Vec<Cut<f64>> = cuts
        .iter()
        .map(|&position| Cut { axis, position })
        .collect();
    let part = Partition::new(&ctx.domain, &cut_list, interface).map_err(err)?;
    let kmax = ctx.modes.unwrap_or(10);
    let table = match interface {
        Interface::Dirichlet => dirichlet_bracket(&part, kmax),
        Interface::Neumann => neumann_bracket(&part, kmax),
    }
    .map_err(err)?;
    let mut r = Report::new(
        ctx.config(json!({
            "cut": cuts,
            "cut_axis": axis,
            "interface": match iface { InterfaceArg::Dirichlet => "dirichlet", InterfaceArg::Neumann => "neumann" },
        })),
        &["k", "lambda", "pieces", "holds"],
    );
    for k in 0..table.lambda.len() {
        r.row(vec![
            (k + 1).into(),
            table.lambda[k].into(),
            table.pieces[k].into(),
            table.holds[k].into(),
        ]);
    }
    r.note("piece_count", part.pieces().len());
    let relation = match interface {
        Interface::Dirichlet => "lambda_k <= pieces_k",
        Interface::Neumann => "pieces_k <= lambda_k",
    };
    r.check("bracket", table.all_hold(), relation);
    Ok(r)
}

pub fn nodal(ctx: &Ctx, tone_mode: Option<usize>, window_min: Option<usize>) -> Out {
    let d = decompose(ctx, Some(50))?;
    let m = d.len();
    let rows = courant_check(&d, m).map_err(err)?;
    let lo = window_min.unwrap_or(1).max(1);
    let pl = pleijel_ratio(&d, lo..=m).map_err(err)?;
    let mut r = Report::new(
        ctx.config(json!({ "tone_mode": tone_mode, "window_min": window_min })),
        &["k", "lambda", "count", "ratio", "ok"],
    );
    for row in &rows {
        let ratio = row.count as f64 / row.k as f64;
        r.row(vec![
            row.k.into(),
            d.lambdas()[row.k - 1].into(),
            row.count.into(),
            ratio.into(),
            row.ok.into(),
        ]);
    }
    r.note("pleijel_window", format!("{lo}..={m}"));
    r.note("pleijel_max_ratio", pl.max_ratio);
    r.note("pleijel_hypothesis", pl.hypothesis_holds);
    let k = tone_mode.unwrap_or(2);
    if k >= 1 && k <= m {
        match nodal_tone_check(&d, k) {
            Ok(t) => {
                r.note("tone_mode", t.k);
                r.note("tone", t.tone);
                r.note("tone_lambda", t.lambda);
                r.note("tone_rel_err", t.rel_err);
            }
            Err(e) => r.note("tone_error", e.to_string()),
        }
    }
    let bad: Vec<String> = rows
        .iter()
        .filter(|c| !c.ok)
        .map(|c| c.k.to_string())
        .collect();
    let detail = if bad.is_empty() {
        "count_k <= k".to_string()
    } else {
        format!("count_k > k at k = {}", bad.join(" "))
    };
    r.check("courant", bad.is_empty(), detail);
    Ok(r)
}

pub fn green(ctx: &Ctx, pairs: usize, tol: f64) -> Out {
    let d = decompose(ctx, None)?;
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let n = ctx.domain.len();
    let mut r = Report::new(
        ctx.config(json!({ "pairs": pairs, "tol": tol })),
        &["pair", "r1", "r2", "r3", "r4", "ok"],
    );
    let mut all = true;
    for p in 0..pairs {
        let mut draw = || {
            (0..n)
                .map(|_| rng.gen_range(-1.0..1.0))
                .collect::<Vec<f64>>()
        };
        let f = Field::new(ctx.domain.clone(), draw()).map_err(err)?;
        let h = Field::new(ctx.domain.clone(), draw()).map_err(err)?;
        let rep = check_green_identities(&f, &h, &d).map_err(err)?;
        let ok = rep.passes(tol);
        all &= ok;
        r.row(vec![
            (p + 1).into(),
            rep.r1.into(),
            rep.r2.into(),
            rep.r3.into(),
            rep.r4.into(),
            ok.into(),
        ]);
    }
    r.check(
        "green_identities",
        all,
        format!("every residual <= {} x scale", fmt_num(tol)),
    );
    Ok(r)
}

pub fn diffgeo(ctx: &Ctx, field: &str, tol: f64) -> Out {
    let dom = &ctx.domain;
    if dom.dim() != 1 {
        return Err("diffgeo works on one-dimensional domains".into());
    }
    let eta = Expr::parse(field)?.sample(dom)?.into_values();
    let p = VecField::new(dom.clone(), vec![eta]).map_err(err)?;
    let div_c = divergence(&p);
    let div_g = divergence_via_christoffel(&p);
    let mut r = Report::new(
        ctx.config(json!({ "field": field, "tol": tol })),
        &[
            "node",
            "x",
            "g",
            "gamma",
            "gamma_fd",
            "div_conservative",
            "div_christoffel",
        ],
    );
    let mut gamma_gap = 0.0f64;
    for i in 0..dom.len() {
        let gamma = christoffel(dom, i).get(0, 0, 0);
        let gamma_fd = christoffel_with(dom, i, MetricDerivative::FiniteDifference).get(0, 0, 0);
        gamma_gap = gamma_gap.max((gamma - gamma_fd).abs());
        r.row(vec![
            i.into(),
            dom.coord(i, 0).into(),
            dom.g(i).into(),
            gamma.into(),
            gamma_fd.into(),
            div_c.values()[i].into(),
            div_g.values()[i].into(),
        ]);
    }
    // Stencils at the ends reach a zero Dirichlet ghost.
    let div_gap = dom
        .deep_interior(1)
        .iter()
        .map(|&i| (div_c.values()[i] - div_g.values()[i]).abs())
        .fold(0.0, f64::max);
    r.note("max_gamma_gap", gamma_gap);
    r.note("max_divergence_gap", div_gap);
    r.note("max_divergence_gap_all_nodes", div_c.max_diff(&div_g).map_err(err)?);
    r.check(
        "divergence_agreement",
        div_gap <= tol,
        format!("interior max-norm gap {} <= {}", fmt_num(div_gap), fmt_num(tol)),
    );
    Ok(r)
}
