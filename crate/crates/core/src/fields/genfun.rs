//! The generating functions `L^{nu;y1,y2}<x>`, `Lbar^{nu;y1,y2}<x>` and the
//! identities built on them.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use super::{square_kernel, FieldEngine, VoaVector};
use crate::arith::rational::{binomial, binomial_int, factorial, int, pow, rat, to_fraction_string};
use crate::arith::series::TruncatedSeries;
use crate::arith::{Cyclotomic, Rational};
use crate::error::{Error, Result};
use crate::fock::{apply_operator, quad_operator, FockVector, ModeLabel, Monomial, TwistSetup, Variant};
use crate::report::{CheckRecord, Report};

fn fact(n: i64) -> Rational {
    Rational::from_integer(factorial(n as u64))
}

fn cyc(q: Rational) -> Cyclotomic {
    Cyclotomic::rational(q)
}

fn setup_params(rec: CheckRecord, setup: &TwistSetup) -> CheckRecord {
    rec.param("p", setup.p()).param("dims", setup.dims())
}

fn mismatch(engine: &FieldEngine, w: &Monomial, at: Value, lhs: &FockVector, rhs: &FockVector) -> Value {
    let sp = engine.space();
    json!({ "vector": sp.monomial_json(w), "at": at, "lhs": sp.vector_json(lhs), "rhs": sp.vector_json(rhs) })
}

/// `L^{nu;y1,y2}<x>` (plain) or `Lbar^{nu;y1,y2}<x>` (bar): the normal-ordered
/// product of two `alpha<e^{y_i} x>` plus `-(1/2) d/dy1` of the correction
/// series, kept as its Laurent expansion in `t = y2 - y1`.
pub struct GeneratingL<'a> {
    engine: &'a FieldEngine,
    variant: Variant,
    laurent: BTreeMap<i64, Rational>,
    order: i64,
}

impl<'a> GeneratingL<'a> {
    /// Certified for `r1 + r2 <= order`.
    pub fn new(engine: &'a FieldEngine, variant: Variant, order: u32) -> Self {
        type S = TruncatedSeries<Rational>;
        let setup = engine.setup();
        let p = setup.p() as i64;
        let top = order as i64 + 2;
        let mut num = S::univariate("t", 0, top, []);
        for k in 0..setup.p() {
            let mut term = S::exp("t", &rat(k as i64, p), top);
            if variant == Variant::Plain {
                term = term.sub(&S::constant(term.vars().to_vec(), 1, Rational::one())).expect("same variable");
            }
            num = num.add(&term.scale(&int(setup.dim(k) as i64))).expect("same variable");
        }
        // 1/(1 - e^t) = -(e^t - 1)^{-1}
        let inv = S::exp_minus_one_pow("t", -1, top).expect("unit series");
        let corr = num.mul(&inv).expect("same variable").scale(&int(-1));
        let h = corr.derivative(0).scale(&rat(1, 2));
        let laurent = (-2..=order as i64).map(|j| (j, h.coeff(&[j]).expect("certified"))).collect();
        GeneratingL { engine, variant, laurent, order: order as i64 }
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    /// Coefficients of `(y1-y2)^{-2}` and `(y1-y2)^{-1}`.
    pub fn singular(&self) -> [Rational; 2] {
        [self.laurent[&-2].clone(), -self.laurent[&-1].clone()]
    }

    /// The regular correction at `y1^r1 y2^r2 / (r1! r2!)`.
    pub fn scalar(&self, r1: u32, r2: u32) -> Rational {
        let j = (r1 + r2) as i64;
        assert!(j <= self.order, "order {j} beyond the certified {}", self.order);
        let sign = if r1.is_multiple_of(2) { int(1) } else { int(-1) };
        &self.laurent[&j] * Rational::from_integer(binomial_int(j as u64, r1 as u64)) * sign * fact(r1 as i64) * fact(r2 as i64)
    }

    /// `(1/2) sum_{(k,a)} sum_j (-j)^r1 (-(n-j))^r2 :beta(j) beta*(n-j): w`, with
    /// the modes read off the fields of `beta(-1)1`.
    pub fn normal_ordered(&self, r1: u32, r2: u32, n: i64, w: &Monomial) -> FockVector {
        let e = self.engine;
        let p = e.p();
        let setup = e.setup();
        let voa = e.voa();
        let deg = e.degree_num(w);
        let n_num = n * p;
        let wv = FockVector::basis(w.clone());
        let mut out = FockVector::zero();
        for (k, a) in setup.labels() {
            let kd = setup.dual(k);
            let (b1, b2) = (voa.linear(k, a, 1), voa.linear(kd, a, 1));
            for jn in (n_num - deg)..=deg {
                if !e.space().is_valid(&ModeLabel::new(k, a, jn)) {
                    continue;
                }
                let j = rat(jn, p);
                let c = pow(&-&j, r1) * pow(&(&j - int(n)), r2) / int(2);
                if c.is_zero() {
                    continue;
                }
                let ln = n_num - jn;
                let v = if jn >= ln {
                    e.x_mode(&b2, ln, &e.x_mode(&b1, jn, &wv))
                } else {
                    e.x_mode(&b1, jn, &e.x_mode(&b2, ln, &wv))
                };
                out.add_scaled(&v, &cyc(c));
            }
        }
        out
    }

    /// `L^(r1,r2)(n) w`.
    pub fn coefficient(&self, r1: u32, r2: u32, n: i64, w: &FockVector) -> FockVector {
        let mut out = FockVector::zero();
        for (m, c) in w.terms() {
            out.add_scaled(&self.normal_ordered(r1, r2, n, m), c);
        }
        if n == 0 {
            out.add_scaled(w, &cyc(self.scalar(r1, r2)));
        }
        out
    }
}

/// Diagonal coefficients against the quadratic operators and the singular parts.
pub fn generating_l_check(setup: &TwistSetup, r_max: u32, n_max: i64, max_degree: &Rational) -> Report {
    let engine = FieldEngine::new(setup);
    let basis = engine.space().basis_up_to(max_degree);
    let d = int(setup.d() as i64);
    let mut records = Vec::new();
    for variant in [Variant::Plain, Variant::Bar] {
        let gl = GeneratingL::new(&engine, variant, 2 * r_max);
        for r in 0..=r_max {
            for n in -n_max..=n_max {
                let op = quad_operator(setup, r, r, n, variant);
                let rec = setup_params(CheckRecord::new("genfun", "diagonal_coefficient"), setup)
                    .param("variant", variant)
                    .param("r", r)
                    .param("n", n);
                let bad = basis.iter().find_map(|w| {
                    let wv = FockVector::basis(w.clone());
                    let (l, q) = (gl.coefficient(r, r, n, &wv), apply_operator(&op, &wv));
                    (l != q).then(|| mismatch(&engine, w, json!({ "r": r, "n": n }), &l, &q))
                });
                records.push(match bad {
                    Some(wit) => rec.fail_with(wit),
                    None => rec
                        .values(format!("{} basis vectors", basis.len()), format!("{} basis vectors", basis.len()))
                        .outcome(true),
                });
            }
        }
        let sing = gl.singular();
        let expect = match variant {
            Variant::Plain => [Rational::zero(), Rational::zero()],
            Variant::Bar => [&d / int(2), Rational::zero()],
        };
        let show = |x: &[Rational; 2]| [to_fraction_string(&x[0]), to_fraction_string(&x[1])];
        records.push(
            setup_params(CheckRecord::new("genfun", "singular_part"), setup)
                .param("variant", variant)
                .values(show(&sing), show(&expect))
                .outcome(sing == expect),
        );
        if variant == Variant::Plain && setup.p() == 1 {
            let all_zero = gl.laurent.values().all(Zero::is_zero);
            records.push(
                setup_params(CheckRecord::new("genfun", "untwisted_plain_correction_vanishes"), setup)
                    .values(all_zero, true)
                    .outcome(all_zero),
            );
        }
    }
    Report::new(records)
}

/// `(1/2) sum_{(k,a)} [y^j] Y[beta(-1)1, y] beta*(-1)1`.
fn bar_source(engine: &FieldEngine, j: i64) -> Result<VoaVector> {
    let voa = engine.voa();
    let setup = engine.setup();
    let mut out = FockVector::zero();
    for (k, a) in setup.labels() {
        let c = voa.square_bracket_coeff(&voa.linear(k, a, 1), &voa.linear(setup.dual(k), a, 1), j)?;
        out.add_scaled(&c, &cyc(rat(1, 2)));
    }
    Ok(out)
}

/// `(1/2) lim_{X1 -> e^y X2} (X1/X2 - 1)^k sum alpha<X1> alpha*<X2>`, divided by
/// `(e^y - 1)^k`, at `X2^{-n}` and `y^j` for `-k <= j <= j_max`, on `w`.
/// Also returns a nonzero prefactored coefficient below the assumed `X1`
/// truncation, if any.
fn prefactor_limit(engine: &FieldEngine, k: u32, n: i64, j_max: i64, w: &Monomial) -> (BTreeMap<i64, FockVector>, Option<i64>) {
    let p = engine.p();
    let setup = engine.setup();
    let voa = engine.voa();
    let deg = engine.degree_num(w);
    let wv = FockVector::basis(w.clone());
    let kk = k as i64;
    let total = -n * p;
    let pairs: Vec<(VoaVector, VoaVector)> =
        setup.labels().into_iter().map(|(kl, a)| (voa.linear(kl, a, 1), voa.linear(setup.dual(kl), a, 1))).collect();
    // [X1^{e/p} X2^{f/p}] (X1/X2 - 1)^k sum alpha<X1> alpha*<X2> w
    let q = |e: i64, f: i64| {
        let mut out = FockVector::zero();
        for l in 0..=kk {
            let c = Rational::from_integer(binomial_int(k as u64, l as u64)) * if (kk - l) % 2 == 0 { int(1) } else { int(-1) };
            for (b1, b2) in &pairs {
                let inner = engine.x_mode(b2, -(f + l * p), &wv);
                if inner.terms().is_empty() {
                    continue;
                }
                out.add_scaled(&engine.x_mode(b1, -(e - l * p), &inner), &cyc(c.clone()));
            }
        }
        out
    };
    let e_lo = -deg - 2 * p;
    let f_lo = -deg - kk * p;
    let leak = ((e_lo - (kk + 2) * p)..e_lo).find(|&e| !q(e, total - e).terms().is_empty());
    let a_max = j_max + kk;
    let mut lim: Vec<FockVector> = vec![FockVector::zero(); a_max as usize + 1];
    for e in e_lo..=(total - f_lo) {
        let qe = q(e, total - e);
        if qe.terms().is_empty() {
            continue;
        }
        let x = rat(e, p);
        for (a, slot) in lim.iter_mut().enumerate() {
            slot.add_scaled(&qe, &cyc(pow(&x, a as u32) / fact(a as i64)));
        }
    }
    let mut out = BTreeMap::new();
    for j in -kk..=j_max {
        let mut c = FockVector::zero();
        for a in 0..=(j + kk) {
            let s = square_kernel(0, -kk, j - a);
            if !s.is_zero() {
                c.add_scaled(&lim[a as usize], &cyc(s / int(2)));
            }
        }
        out.insert(j, c);
    }
    (out, leak)
}

/// The `k`-prefactor limit for `k` and `k+1`, the iterate of
/// `(1/2) sum Y[beta(-1)1, y1-y2] beta*(-1)1` at `e^{y2} x`, and the bar
/// generating function, compared coefficient-wise up to `y1^o1 y2^o2`.
pub fn iterate_identity_check(setup: &TwistSetup, k: u32, orders: (u32, u32), n_max: i64, max_degree: &Rational) -> Report {
    let engine = FieldEngine::new(setup);
    let basis = engine.space().basis_up_to(max_degree);
    let (o1, o2) = (orders.0 as i64, orders.1 as i64);
    let j_max = o1 + o2;
    let gl = GeneratingL::new(&engine, Variant::Bar, (o1 + o2) as u32);
    let sources: Result<BTreeMap<i64, VoaVector>> = (-2..=j_max).map(|j| bar_source(&engine, j).map(|v| (j, v))).collect();
    let base = |name: &str, n: i64| {
        setup_params(CheckRecord::new("iterate_identity", name), setup)
            .param("k", k)
            .param("orders", [o1, o2])
            .param("n", n)
            .param("max_degree", to_fraction_string(max_degree))
    };
    let sources = match sources {
        Ok(s) => s,
        Err(e) => return Report::new(vec![base("iterate_source", 0).fail_with(json!({ "reason": e.to_string() }))]),
    };
    let p = engine.p();
    let records: Vec<CheckRecord> = (-n_max..=n_max)
        .into_par_iter()
        .flat_map_iter(|n| {
            let mut fails: BTreeMap<&str, Value> = BTreeMap::new();
            for w in &basis {
                let wv = FockVector::basis(w.clone());
                let iter: BTreeMap<i64, FockVector> = sources.iter().map(|(j, v)| (*j, engine.x_mode(v, n * p, &wv))).collect();
                let (lk, leak_k) = prefactor_limit(&engine, k, n, j_max, w);
                let (lk1, leak_k1) = prefactor_limit(&engine, k + 1, n, j_max, w);
                if let Some(e) = leak_k.or(leak_k1) {
                    fails.entry("truncation").or_insert_with(
                        || json!({ "vector": engine.space().monomial_json(w), "x1": to_fraction_string(&rat(e, p)) }),
                    );
                }
                let zero = FockVector::zero();
                for j in -(k as i64 + 1)..=j_max {
                    let a = lk.get(&j).unwrap_or(&zero);
                    let b = lk1.get(&j).unwrap_or(&zero);
                    if a != b {
                        fails.entry("k_independence").or_insert_with(|| mismatch(&engine, w, json!({ "y": j }), a, b));
                    }
                    let c = iter.get(&j).unwrap_or(&zero);
                    if a != c {
                        fails.entry("limit_vs_iterate").or_insert_with(|| mismatch(&engine, w, json!({ "y": j }), a, c));
                    }
                }
                // singular part (1/2) d / (y1-y2)^2
                let sing = gl.singular();
                let expect2 = if n == 0 { wv.scale_rational(&sing[0]) } else { FockVector::zero() };
                if iter[&-2] != expect2 || iter[&-1] != wv.scale_rational(&sing[1]) {
                    fails
                        .entry("singular_part")
                        .or_insert_with(|| mismatch(&engine, w, json!({ "y": -2 }), &iter[&-2], &expect2));
                }
                // regular part: sum_j (y1-y2)^j C_j e^{-n y2} against Lbar^(r1,r2)(n) / (r1! r2!)
                for r1 in 0..=o1 {
                    for r2 in 0..=o2 {
                        let mut rhs = FockVector::zero();
                        for j in r1..=(r1 + r2) {
                            let l = j - r1;
                            let c = r2 - l;
                            let s = binomial(&int(j), l as u64) * pow(&int(-1), l as u32) * pow(&int(-n), c as u32) / fact(c);
                            rhs.add_scaled(&iter[&j], &cyc(s));
                        }
                        let lhs = gl.coefficient(r1 as u32, r2 as u32, n, &wv).scale_rational(&(fact(r1) * fact(r2)).recip());
                        if lhs != rhs {
                            fails
                                .entry("generating_vs_iterate")
                                .or_insert_with(|| mismatch(&engine, w, json!({ "r1": r1, "r2": r2 }), &lhs, &rhs));
                        }
                    }
                }
            }
            ["truncation", "k_independence", "limit_vs_iterate", "singular_part", "generating_vs_iterate"]
                .into_iter()
                .map(|name| match fails.remove(name) {
                    Some(wit) => base(name, n).fail_with(wit),
                    None => base(name, n).outcome(true),
                })
                .collect::<Vec<_>>()
        })
        .collect();
    Report::new(records)
}

/// Polynomials in `y1..y4` truncated by total degree.
#[derive(Clone, Debug, Default)]
struct Poly4(BTreeMap<[u32; 4], Rational>);

impl Poly4 {
    fn one() -> Self {
        Poly4(BTreeMap::from([([0; 4], Rational::one())]))
    }

    fn linear(c: [i64; 4]) -> Self {
        let mut out = BTreeMap::new();
        for (i, ci) in c.iter().enumerate() {
            if *ci != 0 {
                let mut e = [0; 4];
                e[i] = 1;
                out.insert(e, int(*ci));
            }
        }
        Poly4(out)
    }

    fn add_scaled(&mut self, o: &Poly4, s: &Rational) {
        for (e, c) in &o.0 {
            let slot = self.0.entry(*e).or_insert_with(Rational::zero);
            *slot += c * s;
        }
        self.0.retain(|_, c| !c.is_zero());
    }

    fn mul(&self, o: &Poly4, deg: u32) -> Poly4 {
        let mut out: BTreeMap<[u32; 4], Rational> = BTreeMap::new();
        for (e1, c1) in &self.0 {
            for (e2, c2) in &o.0 {
                let e = [e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2], e1[3] + e2[3]];
                if e.iter().sum::<u32>() <= deg {
                    *out.entry(e).or_insert_with(Rational::zero) += c1 * c2;
                }
            }
        }
        out.retain(|_, c| !c.is_zero());
        Poly4(out)
    }

    fn pow(&self, n: u32, deg: u32) -> Poly4 {
        (0..n).fold(Poly4::one(), |acc, _| acc.mul(self, deg))
    }

    /// `e^{lin}` up to total degree `deg`.
    fn exp(lin: &Poly4, deg: u32) -> Poly4 {
        let mut out = Poly4::default();
        for i in 0..=deg {
            out.add_scaled(&lin.pow(i, deg), &fact(i as i64).recip());
        }
        out
    }

    fn derivative(&self, var: usize) -> Poly4 {
        let mut out = BTreeMap::new();
        for (e, c) in &self.0 {
            if e[var] > 0 {
                let mut e2 = *e;
                e2[var] -= 1;
                out.insert(e2, c * int(e[var] as i64));
            }
        }
        Poly4(out)
    }
}

type Form = [i64; 4];

/// `[Lbar^{y1,y2}<x1>, Lbar^{y3,y4}<x2>]` against the four-term right side, for
/// every `y`-monomial of total degree `<= order` and modes `|m1|, |m2| <= m_max`.
pub fn lbar_bracket_check(setup: &TwistSetup, order: u32, m_max: i64, max_degree: &Rational) -> Report {
    let engine = FieldEngine::new(setup);
    let basis = engine.space().basis_up_to(max_degree);
    let gl = GeneratingL::new(&engine, Variant::Bar, order + 1);
    let d = int(setup.d() as i64);
    let top = order + 1;
    // (first argument, second argument, exponent form over -m1, derivative variable)
    let terms: [(Form, Form, Form, usize); 4] = [
        ([-1, 1, 1, 0], [0, 0, 0, 1], [1, 0, -1, 0], 0),
        ([-1, 1, 0, 1], [0, 0, 1, 0], [1, 0, 0, -1], 0),
        ([1, -1, 1, 0], [0, 0, 0, 1], [0, 1, -1, 0], 1),
        ([1, -1, 0, 1], [0, 0, 1, 0], [0, 1, 0, -1], 1),
    ];
    let mut cells = Vec::new();
    for m1 in -m_max..=m_max {
        for m2 in -m_max..=m_max {
            cells.push((m1, m2));
        }
    }
    let records = cells
        .par_iter()
        .map(|&(m1, m2)| {
            let rec = setup_params(CheckRecord::new("lbar_bracket", "bracket"), setup)
                .param("order", order)
                .param("m1", m1)
                .param("m2", m2)
                .param("max_degree", to_fraction_string(max_degree));
            // scalar weights of each Lbar^(r1,r2)(m1+m2) on the right
            let mut weights: BTreeMap<(u32, u32), Poly4> = BTreeMap::new();
            for (first, second, form, var) in &terms {
                let ex = Poly4::exp(&Poly4::linear(form.map(|c| -m1 * c)), top);
                for r1 in 0..=top {
                    for r2 in 0..=(top - r1) {
                        let base =
                            Poly4::linear(*first).pow(r1, top).mul(&Poly4::linear(*second).pow(r2, top), top).mul(&ex, top);
                        let dp = base.derivative(*var);
                        let scale = -rat(1, 2) / (fact(r1 as i64) * fact(r2 as i64));
                        weights.entry((r1, r2)).or_default().add_scaled(&dp, &scale);
                    }
                }
            }
            // the singular parts combine into a power series when m1 + m2 = 0
            let mut central = Poly4::default();
            if m1 + m2 == 0 {
                let n = m2;
                for (arg, shift) in [([1, -1, -1, 1], [0, 1, 0, -1]), ([1, -1, 1, -1], [0, 1, -1, 0])] {
                    let ex = Poly4::exp(&Poly4::linear(shift.map(|c| n * c)), order);
                    for j in 0..=order {
                        let kappa = pow(&int(n), j + 3) * (rat(1, 2) / fact(j as i64 + 2) - fact(j as i64 + 3).recip());
                        let t = Poly4::linear(arg).pow(j, order).mul(&ex, order);
                        central.add_scaled(&t, &(-&d / int(2) * kappa));
                    }
                }
            }
            for w in &basis {
                let wv = FockVector::basis(w.clone());
                let ops: BTreeMap<(u32, u32), FockVector> =
                    weights.keys().map(|&(r1, r2)| ((r1, r2), gl.coefficient(r1, r2, m1 + m2, &wv))).collect();
                let mut rhs: BTreeMap<[u32; 4], FockVector> = BTreeMap::new();
                for (key, poly) in &weights {
                    for (e, c) in &poly.0 {
                        if e.iter().sum::<u32>() <= order {
                            rhs.entry(*e).or_default().add_scaled(&ops[key], &cyc(c.clone()));
                        }
                    }
                }
                for (e, c) in &central.0 {
                    rhs.entry(*e).or_default().add_scaled(&wv, &cyc(c.clone()));
                }
                for a1 in 0..=order {
                    for a2 in 0..=(order - a1) {
                        for a3 in 0..=(order - a1 - a2) {
                            for a4 in 0..=(order - a1 - a2 - a3) {
                                let mut lhs = gl.coefficient(a1, a2, m1, &gl.coefficient(a3, a4, m2, &wv));
                                lhs.add_scaled(&gl.coefficient(a3, a4, m2, &gl.coefficient(a1, a2, m1, &wv)), &cyc(int(-1)));
                                let denom = fact(a1 as i64) * fact(a2 as i64) * fact(a3 as i64) * fact(a4 as i64);
                                let lhs = lhs.scale_rational(&denom.recip());
                                let r = rhs.remove(&[a1, a2, a3, a4]).unwrap_or_default();
                                if lhs != r {
                                    return rec.fail_with(mismatch(&engine, w, json!({ "y": [a1, a2, a3, a4] }), &lhs, &r));
                                }
                            }
                        }
                    }
                }
            }
            rec.values(format!("{} basis vectors", basis.len()), format!("{} basis vectors", basis.len())).outcome(true)
        })
        .collect();
    Report::new(records)
}

/// Exact rational solution of `sum_i c_i cols[i] = target`, if one exists.
pub fn solve_combination(cols: &[Vec<Rational>], target: &[Rational]) -> Option<Vec<Rational>> {
    let n = cols.len();
    let rows = target.len();
    let mut m: Vec<Vec<Rational>> = (0..rows)
        .map(|r| {
            let mut row: Vec<Rational> = cols.iter().map(|c| c[r].clone()).collect();
            row.push(target[r].clone());
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(pr) = (row..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, pr);
        let inv = m[row][col].recip();
        for x in m[row].iter_mut() {
            *x *= &inv;
        }
        for r in 0..rows {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                let pivot_row = m[row].clone();
                for (x, y) in m[r].iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    if m[row..].iter().any(|r| !r[n].is_zero()) {
        return None;
    }
    let mut out = vec![Rational::zero(); n];
    for (i, col) in pivots.iter().enumerate() {
        out[*col] = m[i][n].clone();
    }
    Some(out)
}

/// Operators restricted to the basis, flattened to rational coordinates.
fn flatten(images: &[Vec<FockVector>], p: u32) -> Vec<Vec<Rational>> {
    let mut keys: BTreeMap<(usize, Monomial, usize), usize> = BTreeMap::new();
    let width = crate::arith::cyclotomic::euler_phi(p).max(1);
    for op in images {
        for (wi, v) in op.iter().enumerate() {
            for m in v.terms().keys() {
                for c in 0..width {
                    let len = keys.len();
                    keys.entry((wi, m.clone(), c)).or_insert(len);
                }
            }
        }
    }
    images
        .iter()
        .map(|op| {
            let mut col = vec![Rational::zero(); keys.len()];
            for (wi, v) in op.iter().enumerate() {
                for (m, c) in v.terms() {
                    for (ci, q) in c.coeffs().iter().enumerate() {
                        col[keys[&(wi, m.clone(), ci)]] = q.clone();
                    }
                }
            }
            col
        })
        .collect()
}

fn combination_json(names: &[String], c: &[Rational]) -> Value {
    let map: serde_json::Map<String, Value> =
        names.iter().zip(c).filter(|(_, q)| !q.is_zero()).map(|(n, q)| (n.clone(), json!(to_fraction_string(q)))).collect();
    Value::Object(map)
}

/// Solves `target` against `candidates` on the basis and re-applies the solution.
fn express(names: &[String], candidates: &[Vec<FockVector>], target: &[FockVector], p: u32) -> Result<Vec<Rational>> {
    let mut all = candidates.to_vec();
    all.push(target.to_vec());
    let flat = flatten(&all, p);
    let (cols, tgt) = flat.split_at(candidates.len());
    let c =
        solve_combination(cols, &tgt[0]).ok_or_else(|| Error::SolveFailure(format!("no combination of {}", names.join(", "))))?;
    for (wi, t) in target.iter().enumerate() {
        let mut sum = FockVector::zero();
        for (ci, cand) in candidates.iter().enumerate() {
            sum.add_scaled(&cand[wi], &cyc(c[ci].clone()));
        }
        if sum != *t {
            return Err(Error::SolveFailure("solution does not reproduce the target".into()));
        }
    }
    Ok(c)
}

/// The fields of `sum beta(-m-1) beta*(-m-1) 1` against the operators
/// `L^(r)(n)` (plus the identity at `n = 0`), in both directions.
pub fn generators_corollary_check(setup: &TwistSetup, m: u32, n_max: i64, max_degree: &Rational) -> Report {
    let engine = FieldEngine::new(setup);
    let p = engine.p();
    let basis = engine.space().basis_up_to(max_degree);
    let vecs: Vec<FockVector> = basis.iter().map(|w| FockVector::basis(w.clone())).collect();
    let generator_images = |mm: u32, n: i64| -> Vec<FockVector> {
        let src = engine.voa().square_sum(mm as i64 + 1);
        vecs.iter().map(|w| engine.x_mode(&src, n * p, w)).collect()
    };
    let l_images = |r: u32, n: i64| -> Vec<FockVector> {
        let op = quad_operator(setup, r, r, n, Variant::Plain);
        vecs.iter().map(|w| apply_operator(&op, w)).collect()
    };
    let base = |name: &str, n: i64| {
        setup_params(CheckRecord::new("generators", name), setup)
            .param("m", m)
            .param("n", n)
            .param("max_degree", to_fraction_string(max_degree))
    };
    let mut records = Vec::new();
    for n in -n_max..=n_max {
        let identity = (n == 0).then(|| vecs.clone());
        // forward: each generator mode in the span of L^(r)(n), r <= m' + 1
        for mm in 0..=m {
            let mut names: Vec<String> = (0..=mm + 1).map(|r| format!("L({r})")).collect();
            let mut cands: Vec<Vec<FockVector>> = (0..=mm + 1).map(|r| l_images(r, n)).collect();
            if let Some(id) = &identity {
                names.push("id".into());
                cands.push(id.clone());
            }
            let rec = base("forward", n).param("generator", mm);
            records.push(match express(&names, &cands, &generator_images(mm, n), p as u32) {
                Ok(c) => {
                    let comb = combination_json(&names, &c);
                    rec.values(&comb, &comb).outcome(true)
                }
                Err(e) => rec.fail_with(json!({ "reason": e.to_string() })),
            });
        }
        // converse: L^(r)(n), r <= m, in the span of the generator modes
        for r in 0..=m {
            let mut names: Vec<String> = (0..=m).map(|mm| format!("G({mm})")).collect();
            let mut cands: Vec<Vec<FockVector>> = (0..=m).map(|mm| generator_images(mm, n)).collect();
            if let Some(id) = &identity {
                names.push("id".into());
                cands.push(id.clone());
            }
            let rec = base("converse", n).param("r", r);
            records.push(match express(&names, &cands, &l_images(r, n), p as u32) {
                Ok(c) => {
                    let comb = combination_json(&names, &c);
                    rec.values(&comb, &comb).outcome(true)
                }
                Err(e) => rec.fail_with(json!({ "reason": e.to_string() })),
            });
        }
    }
    Report::new(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(p: u32, dims: &[u32]) -> TwistSetup {
        TwistSetup::new(p, dims.to_vec()).unwrap()
    }

    #[test]
    fn generating_l_small() {
        for s in [setup(1, &[1]), setup(2, &[0, 1])] {
            let r = generating_l_check(&s, 1, 1, &int(1));
            assert!(r.ok(), "{:?}", r.first_failure());
        }
    }

    #[test]
    fn iterate_identity_small() {
        for s in [setup(1, &[1]), setup(2, &[0, 1])] {
            let r = iterate_identity_check(&s, 2, (1, 1), 1, &int(1));
            assert!(r.ok(), "{:?}", r.first_failure());
        }
    }

    #[test]
    fn lbar_bracket_small() {
        for s in [setup(1, &[1]), setup(2, &[0, 1])] {
            let r = lbar_bracket_check(&s, 1, 1, &int(1));
            assert!(r.ok(), "{:?}", r.first_failure());
        }
    }

    #[test]
    fn generators_small() {
        let r = generators_corollary_check(&setup(1, &[1]), 1, 1, &int(2));
        assert!(r.ok(), "{:?}", r.first_failure());
    }

    #[test]
    fn solver_examples() {
        let cols = vec![vec![int(1), int(0), int(1)], vec![int(0), int(1), int(1)]];
        assert_eq!(solve_combination(&cols, &[int(2), int(3), int(5)]), Some(vec![int(2), int(3)]));
        assert_eq!(solve_combination(&cols, &[int(2), int(3), int(4)]), None);
    }
}
