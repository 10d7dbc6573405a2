//! The commutator of two iterates `X_M(Y[u_i, y_i] v_i, x_i)` against its
//! four-term expression through `Res_y`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use super::checks::Source;
use super::{FieldEngine, VoaVector};
use crate::arith::rational::{binomial, factorial, int, pow, rat, to_fraction_string};
use crate::arith::{Coefficient, Cyclotomic, Rational};
use crate::error::Result;
use crate::fock::{FockVector, Monomial, TwistSetup};
use crate::report::{CheckRecord, Report};

fn fact(n: i64) -> Rational {
    Rational::from_integer(factorial(n as u64))
}

fn source_vector(engine: &FieldEngine, s: Source) -> VoaVector {
    match s {
        None => FockVector::vacuum(),
        Some((k, a)) => engine.voa().linear(k, a, 1),
    }
}

fn source_json(s: Source) -> Value {
    match s {
        None => json!("1"),
        Some((k, a)) => json!(format!("beta[{k},{a}](-1)")),
    }
}

fn max_weight(engine: &FieldEngine, v: &VoaVector) -> i64 {
    v.terms().keys().map(|m| engine.voa().weight(m)).max().unwrap_or(0)
}

/// `[y^j] Y[u, y] v` for `j` from the leading pole up to `j_max`.
fn bracket_series(engine: &FieldEngine, u: &VoaVector, v: &VoaVector, j_max: i64) -> Result<BTreeMap<i64, VoaVector>> {
    let lo = -(max_weight(engine, u) + max_weight(engine, v));
    let mut out = BTreeMap::new();
    for j in lo..=j_max {
        let c = engine.voa().square_bracket_coeff(u, v, j)?;
        if !Coefficient::is_zero(&c) {
            out.insert(j, c);
        }
    }
    Ok(out)
}

/// Pole part of `Y[u, y] v`.
fn pole_part(engine: &FieldEngine, u: &VoaVector, v: &VoaVector) -> Result<BTreeMap<i64, VoaVector>> {
    bracket_series(engine, u, v, -1)
}

/// Polynomial in `q2 = m2/p` and `qm = (m1+m2)/p` with vertex algebra
/// coefficients, keyed by the exponent pair.
type Expansion = BTreeMap<(u32, u32), VoaVector>;

fn push(e: &mut Expansion, key: (u32, u32), s: Rational, v: &VoaVector) {
    if !Zero::is_zero(&s) {
        e.entry(key).or_insert_with(FockVector::zero).add_scaled(v, &Cyclotomic::rational(s));
    }
}

fn evaluate(e: &Expansion, q2: &Rational, qm: &Rational) -> VoaVector {
    let mut out = FockVector::zero();
    for ((a, b), v) in e {
        let s = pow(q2, *a) * pow(qm, *b);
        if !Zero::is_zero(&s) {
            out.add_scaled(v, &Cyclotomic::rational(s));
        }
    }
    out
}

/// One residue term at `y1^i1 y2^i2`, as the vector whose `X`-mode `m1+m2`
/// gives the coefficient of `x1^{-m1/p} x2^{-m2/p}`.
///
/// Outer shape (`outer_first = true`):
/// `delta(w^r (e^{-c y2 - y} x1/x2)^{1/p}) X(Y[u1, y1+y] Y[a, sigma y2] Y[v1, y] b, e^{-y} x1)`;
/// otherwise
/// `delta(w^r (e^{y1 - c y2 - y} x1/x2)^{1/p}) X(Y[Y[a, sigma y2] Y[u1, y] b, y1-y] v1, x1)`.
fn residue_term(
    engine: &FieldEngine,
    outer_first: bool,
    (u1, v1, a, b): (&VoaVector, &VoaVector, &VoaVector, &VoaVector),
    sigma: i64,
    c: i64,
    (i1, i2): (i64, i64),
    out: &mut Expansion,
) -> Result<()> {
    let voa = engine.voa();
    let poles = if outer_first { pole_part(engine, v1, b)? } else { pole_part(engine, u1, b)? };
    for (j, pj) in &poles {
        let lo2 = -(max_weight(engine, a) + max_weight(engine, pj));
        for j2 in lo2..=i2 {
            let cp = i2 - j2;
            if c == 0 && cp != 0 {
                continue;
            }
            let q = voa.square_bracket_coeff(a, pj, j2)?;
            if Coefficient::is_zero(&q) {
                continue;
            }
            // sigma^{j2} y2^{j2} and e^{-c y2 m2/p}
            let s2 = pow(&int(sigma), j2.rem_euclid(2) as u32) * pow(&int(-c), cp as u32) / fact(cp);
            let need = -1 - j;
            if outer_first {
                // y-power: j + l + ea + eb = -1 with e^{y m/p} and e^{-y m2/p}
                for l in 0..=need {
                    let j1 = i1 + l;
                    let r = voa.square_bracket_coeff(u1, &q, j1)?;
                    if Coefficient::is_zero(&r) {
                        continue;
                    }
                    let bl = binomial(&int(j1), l as u64) * &s2;
                    for ea in 0..=(need - l) {
                        let eb = need - l - ea;
                        let s = &bl * pow(&int(-1), eb as u32) / (fact(ea) * fact(eb));
                        push(out, ((cp + eb) as u32, ea as u32), s, &r);
                    }
                }
            } else {
                // y-power: j + l + eb = -1 with e^{-y m2/p}; y1-power: j1 - l + d = i1
                let lo1 = -(max_weight(engine, &q) + max_weight(engine, v1));
                for l in 0..=need {
                    let eb = need - l;
                    let sb = pow(&int(-1), (eb + l) as u32) / fact(eb) * &s2;
                    let mut d = 0;
                    while i1 + l - d >= lo1 {
                        let j1 = i1 + l - d;
                        let s = binomial(&int(j1), l as u64) / fact(d) * &sb;
                        if !Zero::is_zero(&s) {
                            let r = voa.square_bracket_coeff(&q, v1, j1)?;
                            push(out, ((cp + eb + d) as u32, 0), s, &r);
                        }
                        d += 1;
                    }
                }
            }
        }
    }
    Ok(())
}

type Sources = (Source, Source, Source, Source);

/// The four residue terms at every `(y1^i1, y2^i2)`, one expansion per `r`.
struct RhsData {
    a_series: BTreeMap<i64, VoaVector>,
    b_series: BTreeMap<i64, VoaVector>,
    rhs: BTreeMap<(i64, i64), Vec<Expansion>>,
}

fn rhs_data(engine: &FieldEngine, sources: Sources, y_order: i64) -> Result<RhsData> {
    let p = engine.p();
    let voa = engine.voa();
    let (u1, v1, u2, v2) = (
        source_vector(engine, sources.0),
        source_vector(engine, sources.1),
        source_vector(engine, sources.2),
        source_vector(engine, sources.3),
    );
    let a_series = bracket_series(engine, &u1, &v1, y_order)?;
    let b_series = bracket_series(engine, &u2, &v2, y_order)?;
    let lo1 = -(max_weight(engine, &u1) + max_weight(engine, &v1));
    let lo2 = -(max_weight(engine, &u2) + max_weight(engine, &v2));
    let mut rhs = BTreeMap::new();
    for i1 in lo1..=y_order {
        for i2 in lo2..=y_order {
            let mut per_r = Vec::new();
            for r in 0..p {
                let (u2r, v2r) = (voa.nu_power(&u2, -r), voa.nu_power(&v2, -r));
                let mut e = Expansion::new();
                residue_term(engine, true, (&u1, &v1, &v2r, &u2r), -1, 1, (i1, i2), &mut e)?;
                residue_term(engine, true, (&u1, &v1, &u2r, &v2r), 1, 0, (i1, i2), &mut e)?;
                residue_term(engine, false, (&u1, &v1, &v2r, &u2r), -1, 1, (i1, i2), &mut e)?;
                residue_term(engine, false, (&u1, &v1, &u2r, &v2r), 1, 0, (i1, i2), &mut e)?;
                per_r.push(e);
            }
            rhs.insert((i1, i2), per_r);
        }
    }
    Ok(RhsData { a_series, b_series, rhs })
}

fn check_with(
    engine: &FieldEngine,
    data: &Result<RhsData>,
    sources: Sources,
    y_order: i64,
    window: i64,
    w: &Monomial,
) -> CheckRecord {
    let p = engine.p();
    let rec = CheckRecord::new("iterate_commutator", "commutator")
        .param("p", engine.setup().p())
        .param("dims", engine.setup().dims())
        .param("sources", [source_json(sources.0), source_json(sources.1), source_json(sources.2), source_json(sources.3)])
        .param("y_order", y_order)
        .param("window", window)
        .param("w", engine.space().monomial_json(w));
    let data = match data {
        Ok(d) => d,
        Err(e) => return rec.fail_with(json!({ "reason": e.to_string() })),
    };
    let wv = FockVector::basis(w.clone());
    let zero = FockVector::zero();
    let (mut count, mut nonzero) = (0usize, 0usize);
    for (&(i1, i2), per_r) in &data.rhs {
        let a = data.a_series.get(&i1).unwrap_or(&zero);
        let b = data.b_series.get(&i2).unwrap_or(&zero);
        for m1 in -window * p..=window * p {
            for m2 in -window * p..=window * p {
                let mut lhs = engine.x_mode(a, m1, &engine.x_mode(b, m2, &wv));
                lhs.add_scaled(&engine.x_mode(b, m2, &engine.x_mode(a, m1, &wv)), &Cyclotomic::rational(-Rational::one()));
                let (q2, qm) = (rat(m2, p), rat(m1 + m2, p));
                let mut rhs = FockVector::zero();
                for (r, e) in per_r.iter().enumerate() {
                    let z = evaluate(e, &q2, &qm);
                    let phase = Cyclotomic::root_power(p as u32, r as i64 * m2).scale(&rat(1, p));
                    rhs.add_scaled(&engine.x_mode(&z, m1 + m2, &wv), &phase);
                }
                count += 1;
                if lhs != rhs {
                    let sp = engine.space();
                    return rec.fail_with(json!({
                        "vector": sp.monomial_json(w),
                        "at": { "y1": i1, "y2": i2, "x1": to_fraction_string(&rat(-m1, p)), "x2": to_fraction_string(&rat(-m2, p)) },
                        "lhs": sp.vector_json(&lhs),
                        "rhs": sp.vector_json(&rhs),
                    }));
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

/// Both sides of the iterate commutator formula on `w`, for `y1`, `y2` orders
/// up to `y_order` and `X`-modes `|m| <= window`.
pub fn iterate_commutator_check(engine: &FieldEngine, sources: Sources, y_order: i64, window: i64, w: &Monomial) -> CheckRecord {
    let data = rhs_data(engine, sources, y_order);
    check_with(engine, &data, sources, y_order, window, w)
}

/// All quadruples of eigenbasis `beta(-1)1` sources on every basis vector of
/// degree `<= max_degree`.
pub fn iterate_commutator_sweep(setup: &TwistSetup, y_order: i64, window: i64, max_degree: &Rational) -> Report {
    let engine = FieldEngine::new(setup);
    let basis = engine.space().basis_up_to(max_degree);
    let labels: Vec<Source> = setup.labels().into_iter().map(Some).collect();
    let mut quads = Vec::new();
    for &a in &labels {
        for &b in &labels {
            for &c in &labels {
                for &d in &labels {
                    quads.push((a, b, c, d));
                }
            }
        }
    }
    let cells: Vec<(Sources, Monomial)> = quads.iter().flat_map(|q| basis.iter().map(move |w| (*q, w.clone()))).collect();
    let data: BTreeMap<Sources, Result<RhsData>> = quads.par_iter().map(|q| (*q, rhs_data(&engine, *q, y_order))).collect();
    let records = cells.par_iter().map(|(q, w)| check_with(&engine, &data[q], *q, y_order, window, w)).collect();
    Report::new(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn untwisted_and_half() {
        for (p, dims) in [(1, vec![1]), (2, vec![0, 1])] {
            let s = TwistSetup::new(p, dims).unwrap();
            let r = iterate_commutator_sweep(&s, 0, 1, &int(1));
            assert!(r.ok(), "{}", serde_json::to_string(&r.first_failure()).unwrap());
        }
    }

    #[test]
    fn vacuum_sources_reduce_to_commutator() {
        let s = TwistSetup::new(2, vec![0, 1]).unwrap();
        let e = FieldEngine::new(&s);
        let b = Some((1, 1));
        let rec = iterate_commutator_check(&e, (b, None, b, None), 0, 1, &vec![]);
        assert!(rec.passed(), "{:?}", rec.witness);
    }
}
