//! Coefficient-wise verifications of the twisted Jacobi identity, the iterate
//! limit, the commutator formula and the Virasoro axioms.

use std::collections::HashMap;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use super::{FieldEngine, IterateLimit, MwaOptions, VoaVector};
use crate::arith::rational::{binomial, factorial, int, pow, rat, to_fraction_string};
use crate::arith::{Coefficient, Cyclotomic, Rational};
use crate::fock::{apply_operator, correction, quad_operator, FockVector, Monomial, TwistSetup, Variant};
use crate::report::{CheckRecord, Report};

/// A weight `<= 1` source: the vacuum (`None`) or `beta_{k,a}(-1) 1`.
pub type Source = Option<(u32, u32)>;

fn source_json(s: Source) -> Value {
    match s {
        None => json!("1"),
        Some((k, a)) => json!(format!("beta[{k},{a}](-1)")),
    }
}

fn source_weight(s: Source) -> i64 {
    i64::from(s.is_some())
}

fn source_class(engine: &FieldEngine, s: Source) -> i64 {
    s.map_or(0, |(k, _)| (-(k as i64)).rem_euclid(engine.p()))
}

fn as_linear(s: Source) -> Option<(u32, u32, i64)> {
    s.map(|(k, a)| (k, a, 1))
}

fn setup_params(rec: CheckRecord, setup: &TwistSetup) -> CheckRecord {
    rec.param("p", setup.p()).param("dims", setup.dims())
}

/// Numerators `e` in `[-window p, window p]` with `e = class (mod p)`.
fn window_numerators(p: i64, window: i64, class: i64) -> impl Iterator<Item = i64> {
    let lo = -window * p;
    let start = lo + (class - lo).rem_euclid(p);
    (start..=window * p).step_by(p as usize)
}

fn sign(e: i64) -> Rational {
    if e.rem_euclid(2) == 0 {
        Rational::one()
    } else {
        -Rational::one()
    }
}

fn cyc(q: Rational) -> Cyclotomic {
    Cyclotomic::rational(q)
}

fn mismatch(engine: &FieldEngine, w: &Monomial, at: Value, lhs: &FockVector, rhs: &FockVector) -> Value {
    let sp = engine.space();
    json!({
        "vector": sp.monomial_json(w),
        "at": at,
        "lhs": sp.vector_json(lhs),
        "rhs": sp.vector_json(rhs),
    })
}

/// Every window coefficient of the twisted Jacobi identity applied to `w`,
/// with the iterates on the right supplied by the limit construction.
pub fn jacobi_check(engine: &FieldEngine, u: Source, v: Source, w: &Monomial, window: i64) -> CheckRecord {
    let p = engine.p();
    let k = (source_weight(u) + source_weight(v)) as u32;
    let rec = setup_params(CheckRecord::new("jacobi", "twisted_jacobi"), engine.setup())
        .param("u", source_json(u))
        .param("v", source_json(v))
        .param("w", engine.space().monomial_json(w))
        .param("window", window);
    let uv = IterateLimit::general(engine, u, as_linear(v), MwaOptions { s: 0, k });
    let vu = IterateLimit::general(engine, v, as_linear(u), MwaOptions { s: 0, k });
    let iterates: Vec<IterateLimit> =
        (0..p).map(|r| IterateLimit::general(engine, u, as_linear(v), MwaOptions { s: -r, k })).collect();
    let mut a_memo: HashMap<(i64, i64), FockVector> = HashMap::new();
    let mut b_memo: HashMap<(i64, i64), FockVector> = HashMap::new();
    let mut i_memo: HashMap<(i64, i64, i64), FockVector> = HashMap::new();
    let f_lo_a = uv.f_lower(w);
    let e_lo_b = vu.f_lower(w);
    let (mut count, mut nonzero) = (0usize, 0usize);
    for big_n in -window..=window {
        let n = -big_n - 1;
        for e in window_numerators(p, window, source_class(engine, u)) {
            for f in window_numerators(p, window, source_class(engine, v)) {
                let mut lhs = FockVector::zero();
                // x0^{-1} delta((x1-x2)/x0) Y(u,x1) Y(v,x2)
                let l_max = if n >= 0 { n.min((f - f_lo_a).div_euclid(p)) } else { (f - f_lo_a).div_euclid(p) };
                for l in 0..=l_max {
                    let c = binomial(&int(n), l as u64) * sign(l);
                    let key = (e - (n - l) * p, f - l * p);
                    let t = a_memo.entry(key).or_insert_with(|| uv.product(key.0, key.1, w));
                    lhs.add_scaled(t, &cyc(c));
                }
                // - x0^{-1} delta((x2-x1)/(-x0)) Y(v,x2) Y(u,x1)
                let l_max = if n >= 0 { n.min((e - e_lo_b).div_euclid(p)) } else { (e - e_lo_b).div_euclid(p) };
                for l in 0..=l_max {
                    let c = binomial(&int(n), l as u64) * sign(l) * sign(n);
                    let key = (f - (n - l) * p, e - l * p);
                    let t = b_memo.entry(key).or_insert_with(|| vu.product(key.0, key.1, w));
                    lhs.add_scaled(t, &cyc(-c));
                }
                // (1/p) x2^{-1} sum_r delta(w^r ((x1-x0)/x2)^{1/p}) Y(Y(nu^r u, x0) v, x2)
                let mut rhs = FockVector::zero();
                let mut i = 0;
                while k as i64 - 1 - (i + n) >= 0 {
                    let m = e + i * p;
                    let c = binomial(&rat(m, p), i as u64) * sign(i) / int(p);
                    let g = f + p + m;
                    let x0 = k as i64 - 1 - (i + n);
                    if !Zero::is_zero(&c) {
                        for (r, it) in iterates.iter().enumerate() {
                            let key = (r as i64, x0, g);
                            let t = i_memo.entry(key).or_insert_with(|| it.coefficient(x0, g, w));
                            let phase = Cyclotomic::root_power(p as u32, r as i64 * m).scale(&c);
                            rhs.add_scaled(t, &phase);
                        }
                    }
                    i += 1;
                }
                count += 1;
                if lhs != rhs {
                    let at = json!({ "x0": big_n, "x1": to_fraction_string(&rat(e, p)), "x2": to_fraction_string(&rat(f, p)) });
                    return rec.fail_with(mismatch(engine, w, at, &lhs, &rhs));
                }
                if !lhs.terms().is_empty() {
                    nonzero += 1;
                }
            }
        }
    }
    let summary = format!("{count} coefficients, {nonzero} nonzero");
    rec.values(&summary, &summary).outcome(true)
}

/// Checks of the limit itself: `x0`-divisibility when the prefactor exponent
/// is raised by one, the truncation bound, `s`-periodicity, the `s`-shift and
/// the two vacuum cases.
pub fn mwa_check(engine: &FieldEngine, u: Source, v: Source, s: i64, w: &Monomial, window: i64) -> Vec<CheckRecord> {
    let p = engine.p();
    let k = (source_weight(u) + source_weight(v)) as u32;
    let class = (source_class(engine, u) + source_class(engine, v)).rem_euclid(p);
    let lim = |s: i64, k: u32| IterateLimit::general(engine, u, as_linear(v), MwaOptions { s, k });
    let base = |name: &str| {
        setup_params(CheckRecord::new("mwa", name), engine.setup())
            .param("u", source_json(u))
            .param("v", source_json(v))
            .param("s", s)
            .param("w", engine.space().monomial_json(w))
            .param("window", window)
    };
    let (l_k, l_k1, l_sp, l_0) = (lim(s, k), lim(s, k + 1), lim(s + p, k), lim(0, k));
    let shift = Cyclotomic::root_power(p as u32, -s * u.map_or(0, |(k, _)| k as i64));
    let x0_max = k as i64 + window;
    let mut failures: HashMap<&str, Value> = HashMap::new();
    let mut note = |name: &'static str, at: Value, lhs: &FockVector, rhs: &FockVector| {
        if lhs != rhs {
            failures.entry(name).or_insert_with(|| mismatch(engine, w, at, lhs, rhs));
        }
    };
    for g in window_numerators(p, window, class) {
        let at = |i: i64| json!({ "x0": i, "x2": to_fraction_string(&rat(g, p)) });
        note("divisibility", at(0), &l_k1.coefficient(0, g, w), &FockVector::zero());
        for i in 0..=x0_max {
            let c = l_k.coefficient(i, g, w);
            note("divisibility", at(i + 1), &l_k1.coefficient(i + 1, g, w), &c);
            note("s_periodicity", at(i), &l_sp.coefficient(i, g, w), &c);
            let mut shifted = FockVector::zero();
            shifted.add_scaled(&l_0.coefficient(i, g, w), &shift);
            note("s_shift", at(i), &c, &shifted);
            if let Some((e, f)) = l_k.truncation_leak(i, g, w) {
                let leak = l_k.prefactored(e, f, w);
                note(
                    "truncation",
                    json!({ "x1": to_fraction_string(&rat(e, p)), "x2": to_fraction_string(&rat(f, p)) }),
                    &leak,
                    &FockVector::zero(),
                );
            }
            match (u, v) {
                (None, _) => {
                    // Y(Y(1, x0) v, x2) = Y(v, x2)
                    let expect = if i == k as i64 { lim(0, 0).product(0, g, w) } else { FockVector::zero() };
                    note("vacuum_u", at(i), &c, &expect);
                }
                (Some((ku, au)), None) if i >= 1 => {
                    // Y(Y(u, x0) 1, x2) = Y(u, x2 + x0)
                    let j = i - 1;
                    let direct = engine.linear_coeff(ku, au, 1, g + j * p, &FockVector::basis(w.clone()));
                    let mut expect = FockVector::zero();
                    expect.add_scaled(&direct, &shift.scale(&binomial(&(rat(g, p) + int(j)), j as u64)));
                    note("vacuum_v", at(i), &c, &expect);
                }
                _ => {}
            }
        }
    }
    let mut names = vec!["divisibility", "truncation", "s_periodicity", "s_shift"];
    if u.is_none() {
        names.push("vacuum_u");
    } else if v.is_none() {
        names.push("vacuum_v");
    }
    names
        .into_iter()
        .map(|name| match failures.remove(name) {
            Some(wit) => base(name).fail_with(wit),
            None => base(name).outcome(true),
        })
        .collect()
}

/// All pairs of weight `<= 1` sources: the vacuum and every eigenbasis `beta(-1)1`.
pub fn weight_one_pairs(setup: &TwistSetup) -> Vec<(Source, Source)> {
    let mut sources: Vec<Source> = vec![None];
    sources.extend(setup.labels().into_iter().map(Some));
    let mut out = Vec::new();
    for u in &sources {
        for v in &sources {
            out.push((*u, *v));
        }
    }
    out
}

/// Jacobi and limit checks for all source pairs, all `s in 0..p` and every
/// basis vector of degree `<= max_degree`.
pub fn jacobi_sweep(setup: &TwistSetup, window: i64, max_degree: &Rational) -> Report {
    jacobi_sweep_with(setup, window, max_degree, true, true)
}

/// [`jacobi_sweep`] restricted to the Jacobi records, the limit records, or both.
pub fn jacobi_sweep_with(setup: &TwistSetup, window: i64, max_degree: &Rational, jacobi: bool, limits: bool) -> Report {
    let engine = FieldEngine::new(setup);
    let basis = engine.space().basis_up_to(max_degree);
    let p = setup.p() as i64;
    let mut cells = Vec::new();
    for (u, v) in weight_one_pairs(setup) {
        for w in &basis {
            cells.push((u, v, w.clone()));
        }
    }
    let records: Vec<CheckRecord> = cells
        .par_iter()
        .flat_map_iter(|(u, v, w)| {
            let mut out = Vec::new();
            if jacobi {
                out.push(jacobi_check(&engine, *u, *v, w, window));
            }
            for s in (0..p).filter(|_| limits) {
                out.extend(mwa_check(&engine, *u, *v, s, w, window));
            }
            out
        })
        .collect();
    Report::new(records)
}

/// `[X(u,x1), X(v,x2)] = Res_y (1/p) sum_r delta(w^{-r} (e^y x2/x1)^{1/p}) X(Y[nu^r u, y] v, x2)`
/// on `w`, for all `X`-modes with `|exponent| <= window`.
pub fn homogeneous_commutator_check(
    engine: &FieldEngine,
    u: &VoaVector,
    v: &VoaVector,
    w: &Monomial,
    window: i64,
) -> CheckRecord {
    let p = engine.p();
    let voa = engine.voa();
    let sp = engine.space();
    let rec = setup_params(CheckRecord::new("commutator", "homogeneous"), engine.setup())
        .param("u", voa.space().vector_json(u))
        .param("v", voa.space().vector_json(v))
        .param("w", sp.monomial_json(w))
        .param("window", window);
    let pole = |x: &VoaVector| x.terms().keys().map(|m| voa.weight(m)).max().unwrap_or(0);
    let lowest = -(pole(u) + pole(v));
    let mut brackets: Vec<Vec<(i64, VoaVector)>> = Vec::new();
    for r in 0..p {
        let ur = voa.nu_power(u, r);
        let mut row = Vec::new();
        for j in lowest..=-1 {
            match voa.square_bracket_coeff(&ur, v, j) {
                Ok(c) => row.push((j, c)),
                Err(e) => return rec.fail_with(json!({ "reason": e.to_string() })),
            }
        }
        brackets.push(row);
    }
    let wv = FockVector::basis(w.clone());
    let (mut count, mut nonzero) = (0usize, 0usize);
    for m1 in -window * p..=window * p {
        for m2 in -window * p..=window * p {
            let mut lhs = engine.x_mode(u, m1, &engine.x_mode(v, m2, &wv));
            lhs.add_scaled(&engine.x_mode(v, m2, &engine.x_mode(u, m1, &wv)), &cyc(-Rational::one()));
            let mut rhs = FockVector::zero();
            for (r, row) in brackets.iter().enumerate() {
                let phase = Cyclotomic::root_power(p as u32, -(r as i64) * m1);
                for (j, c) in row {
                    let a = (-1 - j) as u32;
                    let weight = pow(&rat(m1, p), a) / Rational::from_integer(factorial(a as u64)) / int(p);
                    if Zero::is_zero(&weight) || Coefficient::is_zero(c) {
                        continue;
                    }
                    rhs.add_scaled(&engine.x_mode(c, m1 + m2, &wv), &phase.scale(&weight));
                }
            }
            count += 1;
            if lhs != rhs {
                let at = json!({ "m1": to_fraction_string(&rat(m1, p)), "m2": to_fraction_string(&rat(m2, p)) });
                return rec.fail_with(mismatch(engine, w, at, &lhs, &rhs));
            }
            if !lhs.terms().is_empty() {
                nonzero += 1;
            }
        }
    }
    let summary = format!("{count} mode pairs, {nonzero} nonzero");
    rec.values(&summary, &summary).outcome(true)
}

/// Commutator checks for weight-one pairs, for `omega` against itself and for
/// `omega` against every `beta(-1)1`.
pub fn commutator_sweep(setup: &TwistSetup, window: i64, max_degree: &Rational) -> Report {
    let engine = FieldEngine::new(setup);
    let voa = engine.voa();
    let basis = engine.space().basis_up_to(max_degree);
    let mut pairs: Vec<(VoaVector, VoaVector)> = Vec::new();
    let linear: Vec<VoaVector> = setup.labels().into_iter().map(|(k, a)| voa.linear(k, a, 1)).collect();
    for x in &linear {
        for y in &linear {
            pairs.push((x.clone(), y.clone()));
        }
        pairs.push((voa.omega(), x.clone()));
    }
    pairs.push((voa.omega(), voa.omega()));
    let cells: Vec<_> = pairs.iter().flat_map(|pr| basis.iter().map(move |w| (pr, w))).collect();
    let records = cells.par_iter().map(|((u, v), w)| homogeneous_commutator_check(&engine, u, v, w, window)).collect();
    Report::new(records)
}

/// Virasoro relations with `c = d`, the `L(0)` spectrum and the `L(-1)`
/// derivative property, all with `L_M(n)` taken from the field of `omega`.
pub fn virasoro_axiom_check(setup: &TwistSetup, window: i64, max_degree: &Rational) -> Report {
    let engine = FieldEngine::new(setup);
    let p = engine.p();
    let voa = engine.voa();
    let sp = engine.space();
    let basis = sp.basis_up_to(max_degree);
    let d = int(setup.d() as i64);
    let shift = correction(setup, 0, Variant::Plain);
    let mut records = Vec::new();

    for m in -window..=window {
        for n in -window..=window {
            let rec = setup_params(CheckRecord::new("virasoro", "bracket"), setup).param("m", m).param("n", n);
            let mut bad = None;
            for w in &basis {
                let wv = FockVector::basis(w.clone());
                let mut lhs = engine.virasoro_mode(m, &engine.virasoro_mode(n, &wv));
                lhs.add_scaled(&engine.virasoro_mode(n, &engine.virasoro_mode(m, &wv)), &cyc(-Rational::one()));
                let mut rhs = engine.virasoro_mode(m + n, &wv).scale_rational(&int(m - n));
                if m + n == 0 {
                    let central = &d * int(m * m * m - m) / int(12);
                    rhs.add_scaled(&wv, &cyc(central));
                }
                if lhs != rhs {
                    bad = Some(mismatch(&engine, w, json!({ "m": m, "n": n }), &lhs, &rhs));
                    break;
                }
            }
            records.push(match bad {
                Some(wit) => rec.fail_with(wit),
                None => {
                    rec.values(format!("{} basis vectors", basis.len()), format!("{} basis vectors", basis.len())).outcome(true)
                }
            });
        }
    }

    let mut spectrum = Vec::new();
    let mut bad = None;
    for w in &basis {
        let wv = FockVector::basis(w.clone());
        let expect = sp.degree(w) + &shift;
        let got = engine.virasoro_mode(0, &wv);
        if got != wv.scale_rational(&expect) {
            bad.get_or_insert_with(|| mismatch(&engine, w, json!({ "n": 0 }), &got, &wv.scale_rational(&expect)));
        }
        let deg = to_fraction_string(&sp.degree(w));
        let ev = to_fraction_string(&expect);
        if !spectrum.iter().any(|(a, _): &(String, String)| *a == deg) {
            spectrum.push((deg, ev));
        }
    }
    let rec = setup_params(CheckRecord::new("virasoro", "l0_spectrum"), setup).param("vacuum_shift", to_fraction_string(&shift));
    records.push(match bad {
        Some(wit) => rec.fail_with(wit),
        None => {
            let table: Vec<Value> = spectrum.iter().map(|(a, b)| json!({ "degree": a, "eigenvalue": b })).collect();
            rec.values(&table, &table).outcome(true)
        }
    });

    // Y(L(-1) z, x) = d/dx Y(z, x), with L(-1) z = omega_0 z
    let mut sources: Vec<(String, VoaVector)> =
        setup.labels().into_iter().map(|(k, a)| (format!("beta[{k},{a}](-1)"), voa.linear(k, a, 1))).collect();
    sources.push(("omega".into(), voa.omega()));
    for (name, z) in sources {
        let rec = setup_params(CheckRecord::new("virasoro", "derivative"), setup).param("source", &name);
        let lz = match voa.untwisted_product(&voa.omega(), 0, &z) {
            Ok(x) => x,
            Err(e) => {
                records.push(rec.fail_with(json!({ "reason": e.to_string() })));
                continue;
            }
        };
        let mut bad = None;
        'outer: for w in &basis {
            let wv = FockVector::basis(w.clone());
            for g in -window * p..=window * p {
                let lhs = engine.y_coeff(&lz, g, &wv);
                let rhs = engine.y_coeff(&z, g + p, &wv).scale_rational(&rat(g + p, p));
                if lhs != rhs {
                    bad = Some(mismatch(&engine, w, json!({ "x": to_fraction_string(&rat(g, p)) }), &lhs, &rhs));
                    break 'outer;
                }
            }
        }
        records.push(match bad {
            Some(wit) => rec.fail_with(wit),
            None => rec.outcome(true),
        });
    }
    Report::new(records)
}

/// The field of `omega` against the quadratic operators `L^(0)(n)`.
pub fn assemble_consistency_check(setup: &TwistSetup, n_max: i64, max_degree: &Rational) -> Report {
    let engine = FieldEngine::new(setup);
    let basis = engine.space().basis_up_to(max_degree);
    let records = (-n_max..=n_max)
        .map(|n| {
            let op = quad_operator(setup, 0, 0, n, Variant::Plain);
            let rec = setup_params(CheckRecord::new("assemble", "omega_modes"), setup)
                .param("n", n)
                .param("max_degree", to_fraction_string(max_degree));
            for w in &basis {
                let wv = FockVector::basis(w.clone());
                let lhs = engine.virasoro_mode(n, &wv);
                let rhs = apply_operator(&op, &wv);
                if lhs != rhs {
                    return rec.fail_with(mismatch(&engine, w, json!({ "n": n }), &lhs, &rhs));
                }
            }
            rec.values(format!("{} basis vectors", basis.len()), format!("{} basis vectors", basis.len())).outcome(true)
        })
        .collect();
    Report::new(records)
}
