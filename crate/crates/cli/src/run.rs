use std::cell::RefCell;
use std::collections::BTreeSet;

use multinorm::abelian::FiniteAbelianGroup;
use multinorm::hnp::{self, HnpError, Outcome};
use multinorm::kummer::{self, KummerError};
use multinorm::lee::{self, InvariantProvider, LeeError, ProviderContext, ReferenceProvider, SummandOrigin};
use multinorm::localnorm::{self, LocalNormError};
use multinorm::ono::{self, OnoError};
use multinorm::units::{self, UnitsError};
use multinorm::Error as CoreError;
use num_bigint::BigUint;
use num_rational::BigRational;
use toml::Value;

use crate::error::CliError;
use crate::instance::{kummer_key, InstanceFile, Mode, UnitsQuery};

/// Result of one instance: a headline, supporting lines, the derivation
/// trace, flat machine-readable results and the instance itself.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub mode: Mode,
    pub headline: String,
    pub details: Vec<String>,
    pub trace: Vec<String>,
    /// `(key, value)` pairs, rendered as `result.<key>`.
    pub results: Vec<(String, Value)>,
    pub instance: InstanceFile,
}

impl Report {
    fn new(instance: &InstanceFile, headline: impl Into<String>) -> Self {
        Self {
            mode: instance.mode,
            headline: headline.into(),
            details: Vec::new(),
            trace: Vec::new(),
            results: Vec::new(),
            instance: instance.clone(),
        }
    }

    fn put(&mut self, key: &str, value: impl Into<Value>) {
        self.results.push((key.to_string(), value.into()));
    }
}

pub fn big(x: &BigUint) -> Value {
    match i64::try_from(x) {
        Ok(v) => Value::Integer(v),
        Err(_) => Value::String(x.to_string()),
    }
}

pub fn rational(q: &BigRational) -> Value {
    Value::String(q.to_string())
}

pub fn group_value(g: &FiniteAbelianGroup) -> Value {
    Value::Array(g.invariant_factors().iter().map(big).collect())
}

fn ints<T: Copy + Into<i64>>(xs: &[T]) -> Value {
    Value::Array(xs.iter().map(|&x| Value::Integer(x.into())).collect())
}

fn usizes(xs: &[usize]) -> Value {
    Value::Array(xs.iter().map(|&x| Value::Integer(x as i64)).collect())
}

fn kummer_err(e: KummerError) -> CliError {
    CliError::module(Some(kummer_key(&e)), e)
}

fn lee_err(e: LeeError) -> CliError {
    match e {
        LeeError::Kummer(k) => kummer_err(k),
        LeeError::MissingOverride(_) | LeeError::ProviderContractViolation(_) => {
            CliError::module(Some("provider_overrides".into()), e)
        }
        other => CliError::module(None, other),
    }
}

fn ono_err(key: &str, e: OnoError) -> CliError {
    CliError::module(Some(key.to_string()), e)
}

fn place_err(places: &[localnorm::LocalPlaceData], e: LocalNormError) -> CliError {
    let id = match &e {
        LocalNormError::NoPlacesAbove(id)
        | LocalNormError::BadRealDegree(id, _)
        | LocalNormError::CountMismatch(id)
        | LocalNormError::NotFinite(id)
        | LocalNormError::ArchimedeanRamified(id)
        | LocalNormError::AmbientMismatch { place: id, .. } => Some(id.clone()),
        LocalNormError::Abelian(_) => None,
    };
    let key = id
        .and_then(|id| places.iter().position(|p| p.place_id == id))
        .map_or_else(|| "places".to_string(), |i| format!("places[{i}]"));
    CliError::module(Some(key), e)
}

/// Wraps a provider and records which keys were asked for.
struct Recording<'a> {
    inner: &'a dyn InvariantProvider,
    patching: RefCell<BTreeSet<u32>>,
    freedom: RefCell<BTreeSet<(u32, u32, usize)>>,
}

impl InvariantProvider for Recording<'_> {
    fn name(&self) -> String {
        self.inner.name()
    }

    fn patching_degree(&self, ctx: ProviderContext<'_>, r: u32) -> Result<u32, LeeError> {
        self.patching.borrow_mut().insert(r);
        self.inner.patching_degree(ctx, r)
    }

    fn degree_of_freedom(&self, ctx: ProviderContext<'_>, r: u32, l: u32, class: &[usize]) -> Result<u32, LeeError> {
        self.freedom.borrow_mut().insert((r, l, class[0]));
        self.inner.degree_of_freedom(ctx, r, l, class)
    }
}

/// Evaluates one parsed instance.
pub fn run(inst: &InstanceFile) -> Result<Report, CliError> {
    inst.check()?;
    match inst.mode {
        Mode::Sha => run_sha(inst),
        Mode::Hnp => run_hnp(inst),
        Mode::ClassNumber => run_class_number(inst),
        Mode::LocalIndex => run_local_index(inst),
        Mode::Pell => run_pell(inst),
        Mode::UnitIndex => run_unit_index(inst),
        Mode::Validate => run_validate(inst),
    }
}

fn family_of(inst: &InstanceFile) -> Result<kummer::KummerFamily, CliError> {
    inst.family.as_ref().expect("checked").build()
}

fn structure_lines(st: &kummer::EquivalenceStructure, perm: &[usize]) -> Vec<String> {
    let mut out = vec![
        format!("normalized order (input indices): {perm:?}; indices below are normalized"),
        format!("epsilon: {:?}", st.epsilon),
    ];
    out.push("e matrix:".into());
    for row in &st.e_matrix {
        out.push(format!("  {row:?}"));
    }
    for (r, u) in &st.u_partition {
        if !u.is_empty() {
            out.push(format!("U_{r} = {u:?}"));
        }
    }
    out.push(format!("R = {:?}", st.r_set));
    for (r, layers) in &st.layers {
        for layer in layers {
            let classes: Vec<String> = layer
                .classes
                .iter()
                .map(|c| format!("{:?}(L={}, n_(l+1)={})", c.members, c.level, c.refinement_count))
                .collect();
            out.push(format!("r={r} l={}: {}", layer.l, classes.join(" ")));
        }
    }
    if !st.non_transitive.is_empty() {
        out.push(format!("non-transitive thresholds (r, l): {:?}", st.non_transitive));
    }
    out
}

fn run_sha(inst: &InstanceFile) -> Result<Report, CliError> {
    let fam = family_of(inst)?;
    let normalized = kummer::validate_and_normalize(&fam).map_err(kummer_err)?;
    let perm = normalized.permutation.clone();
    let mut inverse = vec![0; perm.len()];
    for (k, &i) in perm.iter().enumerate() {
        inverse[i] = k;
    }

    let reference = ReferenceProvider::default();
    let overrides = match &inst.provider_overrides {
        Some(o) => Some(o.provider(&inverse)?),
        None => None,
    };
    let inner: &dyn InvariantProvider = match &overrides {
        Some(o) => o,
        None => &reference,
    };
    let rec = Recording { inner, patching: RefCell::default(), freedom: RefCell::default() };
    let res = lee::assemble_sha(&fam, &rec).map_err(lee_err)?;

    let mut rep = Report::new(inst, format!("Sha(L/k) = {}", res.group));
    rep.details.push(if res.group.is_trivial() {
        "the Hasse norm principle holds for L/k".into()
    } else {
        "the Hasse norm principle fails for L/k".into()
    });
    rep.details.push(format!("provider: {}", res.provider));
    let lab = ono::lab_index_kummer(&fam);
    rep.details.push(format!("[L_ab : k] = {lab}"));

    let mut unused = Vec::new();
    if let Some(o) = &inst.provider_overrides {
        let asked_r = rec.patching.borrow();
        let asked_f = rec.freedom.borrow();
        for e in &o.patching {
            if !asked_r.contains(&e.r) {
                unused.push(format!("patching r={}", e.r));
            }
        }
        for e in &o.freedom {
            if !asked_f.contains(&(e.r, e.l, inverse[e.field])) {
                unused.push(format!("freedom r={} l={} field={}", e.r, e.l, e.field));
            }
        }
    }
    for u in &unused {
        rep.details.push(format!("warning: override {u} matched no term"));
    }

    let report = lee::sha_with_trace_report(&res);
    rep.trace.extend(report.lines().skip(1).filter(|l| !l.starts_with("provider:")).map(str::to_string));
    let st = kummer::equivalence_structure(&normalized.family).map_err(kummer_err)?;
    rep.trace.extend(structure_lines(&st, &perm));

    rep.put("group", group_value(&res.group));
    rep.put("order", big(res.group.order()));
    rep.put("hnp_holds", res.group.is_trivial());
    rep.put("provider", res.provider.clone());
    rep.put("lab_index", big(&lab));
    rep.put("normalized_order", usizes(&perm));
    rep.put("epsilon", ints(&st.epsilon));
    rep.put("r_set", ints(&st.r_set));
    let summands: Vec<Value> = res
        .summand_trace
        .iter()
        .map(|s| {
            let mut t = toml::Table::new();
            match &s.origin {
                SummandOrigin::Patching { r } => {
                    t.insert("origin".into(), "patching".into());
                    t.insert("r".into(), i64::from(*r).into());
                }
                SummandOrigin::Class { r, l, representative, size } => {
                    t.insert("origin".into(), "class".into());
                    t.insert("r".into(), i64::from(*r).into());
                    t.insert("l".into(), i64::from(*l).into());
                    t.insert("field".into(), (perm[*representative] as i64).into());
                    t.insert("size".into(), (*size as i64).into());
                }
            }
            t.insert("order".into(), big(&lee::summand_order(res.p, s.exponent)));
            t.insert("multiplicity".into(), (s.multiplicity as i64).into());
            Value::Table(t)
        })
        .collect();
    rep.put("summands", Value::Array(summands));
    rep.put("unused_overrides", Value::Array(unused.into_iter().map(Value::String).collect()));
    Ok(rep)
}

fn hnp_err(e: HnpError, from_family: bool) -> CliError {
    let key = match &e {
        HnpError::Kummer(k) => return kummer_err(k.clone()),
        HnpError::InconsistentProfile { index, .. } if !from_family => format!("hnp.fields[{}]", index - 1),
        HnpError::WitnessOutOfRange { .. } => "hnp.split".into(),
        _ if from_family => "family".into(),
        _ => "hnp".into(),
    };
    CliError::module(Some(key), e)
}

fn run_hnp(inst: &InstanceFile) -> Result<Report, CliError> {
    let from_family = inst.hnp.is_none();
    let (profiles, facts) = match &inst.hnp {
        Some(h) => h.build()?,
        None => hnp::kummer_facts(&family_of(inst)?).map_err(|e| hnp_err(e, true))?,
    };
    let verdict = hnp::decide_hnp(&profiles, &facts).map_err(|e| hnp_err(e, from_family))?;
    let headline = match verdict.outcome {
        Outcome::Holds(rule) => format!("HNP holds (rule {rule})"),
        Outcome::Inconclusive => "HNP inconclusive".to_string(),
    };
    let mut rep = Report::new(inst, headline);
    rep.details.push(verdict.explanation.clone());
    let check = hnp::validate_verdict(&profiles, &facts, &verdict);
    rep.details.push(match &check {
        Ok(()) => "independent re-check: agrees".into(),
        Err(m) => format!("independent re-check: DISAGREES ({m})"),
    });
    let note = hnp::morishita_note(&profiles, &facts);
    if let Some(n) = &note {
        rep.details.push(format!("note: {n}"));
    }
    for (i, p) in profiles.iter().enumerate() {
        rep.trace.push(format!(
            "K_{}: degree {}, galois={}, abelian={}, cyclic={}, closure {}",
            i + 1,
            p.degree,
            p.is_galois,
            p.is_abelian,
            p.is_cyclic,
            p.closure_group
        ));
    }
    rep.trace.push(format!("facts: {facts:?}"));
    rep.trace.extend(hnp::explain_rules(None));

    rep.put("outcome", if verdict.holds() { "holds" } else { "inconclusive" });
    rep.put("rule", verdict.rule().map_or_else(String::new, |r| r.label().to_string()));
    rep.put("explanation", verdict.explanation.clone());
    rep.put("recheck_agrees", check.is_ok());
    rep.put("field_degrees", Value::Array(profiles.iter().map(|p| big(&BigUint::from(p.degree))).collect()));
    rep.put("facts_from_family", from_family);
    if let Some(n) = note {
        rep.put("morishita_note", n);
    }
    Ok(rep)
}

fn run_class_number(inst: &InstanceFile) -> Result<Report, CliError> {
    let block = inst.context.as_ref().expect("checked");
    let ctx = block.build()?;
    let es = ono::eval_es(&ctx).map_err(|e| ono_err("context", e))?;
    let torus = ono::eval_torus_class_number(&ctx).map_err(|e| ono_err("context", e))?;

    let mut rep = Report::new(inst, format!("E_S(L/k) = {}", es.value));
    rep.details.push(format!("h_S(T) = {}", es.implied_class_number));
    rep.details.push(format!("h(T) = {}", torus.class_number));
    rep.details.push(format!("tau(T) = {}", torus.tamagawa));
    rep.trace.push(format!(
        "E_S = |Sha| [U : N U] / ([L_ab:k] [O^x : N O^x]) = {} * {} / ({} * {})",
        ctx.sha_order, ctx.adelic_unit_index, ctx.lab_index, ctx.unit_index
    ));
    rep.trace.push(format!("h_S(T) = hS_L / (hS_k E_S) = {} / ({} * {})", ctx.hs_l, ctx.hs_k, es.value));
    rep.trace.push(format!(
        "h(T) = h_L/h_k * tau * [O^x : N O^x] / [U : N U] = {}/{} * {} * {} / {}",
        ctx.hs_l, ctx.hs_k, torus.tamagawa, ctx.unit_index, ctx.adelic_unit_index
    ));
    rep.put("es", rational(&es.value));
    rep.put("hs_torus", big(&es.implied_class_number));
    rep.put("h_torus", big(&torus.class_number));
    rep.put("tamagawa", rational(&torus.tamagawa));

    if ctx.narrow.is_some() {
        let plus = ono::eval_es_plus(&ctx).map_err(|e| ono_err("context.narrow", e))?;
        rep.details.push(format!("E_S^+(L/k) = {}, h_S^+(T) = {}", plus.value, plus.implied_class_number));
        rep.put("es_plus", rational(&plus.value));
        rep.put("hs_plus_torus", big(&plus.implied_class_number));
    }
    if let Some(z) = &block.degree_zero {
        let e0 = ono::eval_e0(&ctx).map_err(|e| ono_err("context.degree_zero", e))?;
        rep.details.push(format!("E^0(L/k) = {}, h^0(T) = {}", e0.value, e0.implied_class_number));
        rep.put("e0", rational(&e0.value));
        rep.put("h0_torus", big(&e0.implied_class_number));
        if let Some(r) = &z.residue {
            ono::check_residue_norm_index(&ctx, r.q, &r.sizes, &r.degrees)
                .map_err(|e| ono_err("context.degree_zero.residue_norm_index", e))?;
            rep.details.push("residue norm index agrees with the residue field data".into());
            rep.put("residue_check", true);
        }
    }
    if let Some(i) = &block.ideal {
        let h = ono::eval_hs_ideal_form(&block.ideal_context(i)?).map_err(|e| ono_err("context.ideal", e))?;
        let agrees = h == es.implied_class_number;
        rep.details.push(format!(
            "h_S(T) from ideal data = {h} ({})",
            if agrees { "agrees" } else { "differs from the E_S value" }
        ));
        rep.put("hs_torus_ideal", big(&h));
        rep.put("ideal_agrees", agrees);
    }
    if let Some(c) = &block.cm {
        let cm = ono::eval_cm_case(&c.h_k.into(), &c.h_k_plus.into(), &c.q_unit_index.into(), c.t)
            .map_err(|e| ono_err("context.cm", e))?;
        rep.details.push(format!(
            "CM quotient h_K / (h_K+ Q 2^(t-1)) = {}{}",
            cm.value,
            if cm.integral { "" } else { " (not an integer: CM data inconsistent)" }
        ));
        rep.put("cm_value", rational(&cm.value));
        rep.put("cm_integral", cm.integral);
    }
    if let Some(pb) = &inst.places {
        let places: Vec<_> = pb.iter().enumerate().map(|(i, p)| p.build(i)).collect::<Result<_, _>>()?;
        let local = localnorm::global_local_factor(&places).map_err(|e| place_err(&places, e))?;
        let refined = ono::eval_refined_es(&ctx.sha_order, &ctx.lab_index, &places, &ctx.unit_index)
            .map_err(|e| ono_err("places", e))?;
        let agrees = refined == es.value;
        rep.details.push(format!(
            "E_S from local data = {refined} (local factor {local}, {})",
            if agrees { "agrees" } else { "differs from adelic_unit_index" }
        ));
        rep.put("local_factor", big(&local));
        rep.put("es_refined", rational(&refined));
        rep.put("refined_agrees", agrees);
    }
    Ok(rep)
}

fn run_local_index(inst: &InstanceFile) -> Result<Report, CliError> {
    let pb = inst.places.as_ref().expect("checked");
    let places: Vec<_> = pb.iter().enumerate().map(|(i, p)| p.build(i)).collect::<Result<_, _>>()?;
    let factor = localnorm::global_local_factor(&places).map_err(|e| place_err(&places, e))?;
    let mut rep = Report::new(inst, format!("local factor = {factor}"));
    let mut rows = Vec::new();
    for p in &places {
        let norm = localnorm::local_norm_index(p).map_err(|e| place_err(&places, e))?;
        let unit = match &p.kind {
            localnorm::PlaceKind::Finite(_) => {
                Some(localnorm::local_unit_norm_index(p).map_err(|e| place_err(&places, e))?)
            }
            _ => None,
        };
        let unit_text = unit.as_ref().map_or_else(|| "n/a".to_string(), |u| u.to_string());
        rep.details.push(format!("place {}: norm index {norm}, unit norm index {unit_text}", p.place_id));
        let mut t = toml::Table::new();
        t.insert("id".into(), p.place_id.clone().into());
        t.insert("norm_index".into(), big(&norm));
        if let Some(u) = &unit {
            t.insert("unit_norm_index".into(), big(u));
        }
        t.insert("in_s".into(), p.in_s.into());
        t.insert("ramified".into(), p.ramified.into());
        rows.push(Value::Table(t));
        let role = if p.in_s {
            "in S: contributes the norm index"
        } else if p.ramified {
            "ramified outside S: contributes the unit norm index"
        } else {
            "unramified outside S: contributes 1"
        };
        rep.trace.push(format!("{}: {role}", p.place_id));
    }
    rep.put("local_factor", big(&factor));
    rep.put("places", Value::Array(rows));
    Ok(rep)
}

/// `x=2 y=1 norm=+1`.
pub fn pell_line(sol: &units::PellSolution) -> String {
    format!("x={} y={} norm={}", sol.x, sol.y, if sol.norm_sign > 0 { "+1" } else { "-1" })
}

fn run_pell(inst: &InstanceFile) -> Result<Report, CliError> {
    let d = inst.pell.as_ref().expect("checked").d;
    let sol = units::pell_fundamental(d).map_err(|e| CliError::module(Some("pell.d".into()), e))?;
    let mut rep = Report::new(inst, pell_line(&sol));
    rep.details.push(format!("continued fraction period of sqrt({d}): {}", sol.period));
    rep.details.push(format!(
        "check x^2 - {d} y^2 = {}: {}",
        sol.norm_sign,
        if sol.verify() { "ok" } else { "FAILED" }
    ));
    rep.put("d", big(&BigUint::from(d)));
    rep.put("x", big(&sol.x));
    rep.put("y", big(&sol.y));
    rep.put("norm", i64::from(sol.norm_sign));
    rep.put("period", sol.period as i64);
    Ok(rep)
}

fn units_err(key: &str, e: UnitsError) -> CliError {
    CliError::module(Some(key.to_string()), e)
}

fn run_unit_index(inst: &InstanceFile) -> Result<Report, CliError> {
    let block = inst.units.as_ref().expect("checked");
    match block.query()? {
        UnitsQuery::OverQ(fields) => {
            let mut data = Vec::with_capacity(fields.len());
            let mut trace = Vec::new();
            for (i, f) in fields.iter().enumerate() {
                let sign = match f.pell_d {
                    Some(d) => {
                        let (_, s) = units::quadratic_field_evidence(d)
                            .map_err(|e| units_err(&format!("units.fields[{i}].pell_d"), e))?;
                        let sol = units::pell_fundamental(d).map_err(|e| units_err("units", e))?;
                        trace.push(format!("K_{i} = Q(sqrt({d})): fundamental solution {}", pell_line(&sol)));
                        s
                    }
                    None => f.sign,
                };
                data.push((f.degree, sign));
            }
            let idx = units::unit_norm_index_over_q(&data).map_err(|e| units_err("units.fields", e))?;
            let mut rep = Report::new(inst, format!("[Z^x : N(O_L^x)] = {idx}"));
            rep.details.push(if idx == 1 {
                "-1 is the norm of a unit of L".into()
            } else {
                "-1 is not the norm of a unit of L".into()
            });
            rep.trace = trace;
            rep.put("unit_index", i64::from(idx));
            rep.put(
                "signs",
                Value::Array(
                    data.iter()
                        .map(|(_, s)| s.map_or_else(|| Value::String("unknown".into()), |s| Value::Integer(s.into())))
                        .collect(),
                ),
            );
            Ok(rep)
        }
        UnitsQuery::General(input) => {
            let idx = units::unit_norm_index_from_data(&input).map_err(|e| units_err("units", e))?;
            let d = units::gcd_degree(&input.degrees).map_err(|e| units_err("units.degrees", e))?;
            let mut rep = Report::new(inst, format!("[O_k,S^x : N(O_L,S^x)] = {idx}"));
            rep.details.push(format!("torsion index {}, d = gcd of degrees = {d}", input.torsion_index));
            rep.put("unit_index", big(&idx));
            rep.put("gcd_degree", d as i64);
            if let Some(fp) = &input.free_part_data {
                let q = units::free_quotient_from_data(&input.degrees, fp).map_err(|e| units_err("units", e))?;
                rep.details.push(format!("free quotient F_k / N(F_L) = {q}"));
                rep.put("free_quotient", group_value(&q));
            }
            Ok(rep)
        }
    }
}

fn run_validate(inst: &InstanceFile) -> Result<Report, CliError> {
    let fam = family_of(inst)?;
    let normalized = kummer::validate_and_normalize(&fam).map_err(kummer_err)?;
    let st = kummer::equivalence_structure(&normalized.family).map_err(kummer_err)?;
    let mut rep =
        Report::new(inst, format!("valid: {} fields over {}, p = {}, n = {}", fam.len(), fam.base_label, fam.p, fam.n));
    let degrees: Vec<String> = st.epsilon.iter().map(|&e| format!("{}", BigUint::from(fam.p).pow(e))).collect();
    rep.details.push(format!("field degrees (normalized order): {}", degrees.join(", ")));
    if !fam.independence_acknowledged {
        rep.details.push("note: independence of the generating primes is assumed, not checked".into());
    }
    rep.details.extend(structure_lines(&st, &normalized.permutation));
    rep.put("fields", fam.len() as i64);
    rep.put("normalized_order", usizes(&normalized.permutation));
    rep.put("epsilon", ints(&st.epsilon));
    rep.put("e_matrix", Value::Array(st.e_matrix.iter().map(|r| ints(r)).collect()));
    rep.put("r_set", ints(&st.r_set));
    Ok(rep)
}

impl From<CoreError> for CliError {
    fn from(error: CoreError) -> Self {
        CliError::Module { key: None, error: Box::new(error) }
    }
}
