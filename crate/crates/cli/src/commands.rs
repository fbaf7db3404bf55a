use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use num_bigint::BigInt;
use qtorb::blowup::{
    blow_up, crepant_candidates, make_blowup_spec, resolve, verify_mckay, BlowupError, BlowupSpec,
    Verdict,
};
use qtorb::cohomology::{cr_betti, euler_cr, CRBettiTable};
use qtorb::io::{load_model, write_model, IoError, ModelFile};
use qtorb::model::ModelError;
use qtorb::ring::{sector_product, sector_product_table, SectorProduct, TableEntry};
use qtorb::{BoxElement, CharacteristicModel, Face, TwistedSector};
use serde_json::{json, Value};

use crate::render::{
    int, join, point, point_str, rat, rats, rats_str, table, yes_no, Failure, Report,
};
use crate::Command;

struct Done {
    result: Value,
    human: String,
}

type Outcome = Result<Done, Failure>;

pub fn run(cmd: Command) -> Report {
    let (command, input) = describe(&cmd);
    let outcome = match &cmd {
        Command::Validate { model } => validate(model),
        Command::Info { model } => load(model).and_then(|m| info(&m)),
        Command::Sectors { model } => load(model).and_then(|m| sectors(&m)),
        Command::Betti { model } => load(model).and_then(|m| betti(&m)),
        Command::Euler { model } => load(model).and_then(|m| euler(&m)),
        Command::QuasiSl { model } => load(model).and_then(|m| quasi_sl(&m)),
        Command::Blowup {
            model,
            face,
            lambda0,
            out,
        } => load(model).and_then(|m| blowup(&m, face, lambda0, out.as_deref())),
        Command::CrepantCandidates { model, face } => {
            load(model).and_then(|m| candidates(&m, face))
        }
        Command::Mckay {
            model,
            face,
            lambda0,
        } => load(model).and_then(|m| mckay(&m, face, lambda0)),
        Command::Resolve { model, out } => load(model).and_then(|m| resolution(&m, out.as_deref())),
        Command::Product { model, s1, s2 } => load(model).and_then(|m| product(&m, s1, s2)),
        Command::ProductTable { model } => load(model).and_then(|m| product_table(&m)),
    };
    match outcome {
        Ok(Done { result, human }) => Report {
            command,
            input,
            result,
            human,
            diagnostics: Vec::new(),
            code: 0,
        },
        Err(Failure { code, diagnostics }) => Report {
            command,
            input,
            result: Value::Null,
            human: String::new(),
            diagnostics,
            code,
        },
    }
}

fn describe(cmd: &Command) -> (&'static str, Value) {
    let path = |p: &Path| Value::String(p.display().to_string());
    match cmd {
        Command::Validate { model } => ("validate", json!({ "model": path(model) })),
        Command::Info { model } => ("info", json!({ "model": path(model) })),
        Command::Sectors { model } => ("sectors", json!({ "model": path(model) })),
        Command::Betti { model } => ("betti", json!({ "model": path(model) })),
        Command::Euler { model } => ("euler", json!({ "model": path(model) })),
        Command::QuasiSl { model } => ("quasi-sl", json!({ "model": path(model) })),
        Command::Blowup {
            model,
            face,
            lambda0,
            out,
        } => (
            "blowup",
            json!({
                "model": path(model),
                "face": face,
                "lambda0": lambda0,
                "out": out.as_deref().map(path),
            }),
        ),
        Command::CrepantCandidates { model, face } => (
            "crepant-candidates",
            json!({ "model": path(model), "face": face }),
        ),
        Command::Mckay {
            model,
            face,
            lambda0,
        } => (
            "mckay",
            json!({ "model": path(model), "face": face, "lambda0": lambda0 }),
        ),
        Command::Resolve { model, out } => (
            "resolve",
            json!({ "model": path(model), "out": out.as_deref().map(path) }),
        ),
        Command::Product { model, s1, s2 } => (
            "product",
            json!({ "model": path(model), "s1": s1, "s2": s2 }),
        ),
        Command::ProductTable { model } => ("product-table", json!({ "model": path(model) })),
    }
}

fn load(path: &Path) -> Result<CharacteristicModel, Failure> {
    load_model(path).map_err(|e| match e {
        IoError::Read { .. } => Failure::usage(e.to_string()),
        IoError::Model(ModelError::Invalid(diags)) => {
            Failure::validation(diags.iter().map(ToString::to_string).collect())
        }
        other => Failure::validation(vec![other.to_string()]),
    })
}

fn blowup_failure(e: BlowupError) -> Failure {
    match e {
        BlowupError::Cohomology(_) | BlowupError::NoTermination(_) => {
            Failure::internal(e.to_string())
        }
        other => Failure::validation(vec![other.to_string()]),
    }
}

fn parse_face(model: &CharacteristicModel, spec: &str) -> Result<Face, Failure> {
    let p = model.polytope();
    let spec = spec.trim();
    if spec == "P" || spec.is_empty() {
        return Ok(p.whole());
    }
    let mut idx = Vec::new();
    for name in spec.split(',') {
        let name = name.trim();
        idx.push(
            p.facet_index(name)
                .ok_or_else(|| Failure::usage(format!("unknown facet {name:?}")))?,
        );
    }
    p.face(&idx)
        .map_err(|_| Failure::usage(format!("{spec} is not a face of the polytope")))
}

fn parse_ints(spec: &str) -> Result<Vec<BigInt>, Failure> {
    spec.split(',')
        .map(|s| {
            BigInt::from_str(s.trim()).map_err(|_| Failure::usage(format!("{s:?} is not an integer")))
        })
        .collect()
}

fn parse_sector(model: &CharacteristicModel, spec: &str) -> Result<TwistedSector, Failure> {
    let (face_part, point_part) = match spec.split_once(':') {
        Some((f, p)) => (f, Some(p)),
        None => (spec, None),
    };
    let face = parse_face(model, face_part)?;
    let pt = match point_part {
        Some(p) if !(face.is_whole() && p.trim() == "0") => parse_ints(p)?,
        _ if face.is_whole() => vec![BigInt::from(0); model.dim()],
        _ => return Err(Failure::usage(format!("sector {spec:?} needs a lattice point"))),
    };
    let element = model
        .element_at(&face, &pt)
        .filter(|e| face.is_whole() || e.is_interior())
        .ok_or_else(|| {
            Failure::usage(format!(
                "{} is not an interior box element over {}",
                point_str(&pt),
                model.polytope().face_label(&face)
            ))
        })?;
    Ok(TwistedSector { face, element })
}

fn face_names(model: &CharacteristicModel, face: &Face) -> Value {
    Value::Array(
        face.facets
            .iter()
            .map(|&i| Value::String(model.polytope().facet_name(i).to_string()))
            .collect(),
    )
}

fn label(model: &CharacteristicModel, face: &Face) -> String {
    model.polytope().face_label(face)
}

fn element_json(e: &BoxElement) -> Value {
    json!({
        "lattice_point": point(&e.lattice_point),
        "coefficients": rats(&e.coeffs),
        "age": rat(&e.age),
    })
}

fn sector_label(model: &CharacteristicModel, s: &TwistedSector) -> String {
    if s.is_untwisted() {
        "P:1".to_string()
    } else {
        format!("{}:{}", label(model, &s.face), point_str(&s.element.lattice_point))
    }
}

fn validate(path: &Path) -> Outcome {
    let m = load(path)?;
    let p = m.polytope();
    Ok(Done {
        result: json!({
            "valid": true,
            "dimension": m.dim(),
            "facets": p.num_facets(),
            "vertices": p.num_vertices(),
            "normals": m.normals().is_some(),
        }),
        human: format!(
            "valid: dimension {}, {} facets, {} vertices{}\n",
            m.dim(),
            p.num_facets(),
            p.num_vertices(),
            if m.normals().is_some() { ", with normals" } else { "" }
        ),
    })
}

fn info(m: &CharacteristicModel) -> Outcome {
    let p = m.polytope();
    let signs = m.vertex_signs().ok();
    let mut vrows = Vec::new();
    let mut vjson = Vec::new();
    for vi in 0..p.num_vertices() {
        let face = p.vertex_face(vi);
        let order = m.local_group_order(&face);
        let sign = signs.as_ref().map(|s| s[vi]);
        vrows.push(vec![
            label(m, &face),
            order.to_string(),
            sign.map_or("n/a".to_string(), |s| format!("{s:+}")),
        ]);
        vjson.push(json!({
            "facets": face_names(m, &face),
            "order": int(&order),
            "sign": sign,
        }));
    }
    let mut frows = Vec::new();
    let mut fjson = Vec::new();
    for face in p.enumerate_faces() {
        let order = m.local_group_order(&face);
        if order <= BigInt::from(1) {
            continue;
        }
        let divisors = m.elementary_divisors(&face);
        frows.push(vec![
            label(m, &face),
            face.dim.to_string(),
            order.to_string(),
            join(divisors.iter().map(ToString::to_string), ","),
        ]);
        fjson.push(json!({
            "face": face_names(m, &face),
            "dim": face.dim,
            "order": int(&order),
            "elementary_divisors": divisors.iter().map(int).collect::<Vec<_>>(),
        }));
    }
    let manifold = m.is_manifold();
    let quasi_sl = m.is_quasi_sl();
    let positive = signs.as_ref().map(|s| s.iter().all(|&x| x == 1));

    let mut human = String::new();
    let _ = writeln!(
        human,
        "dimension {} (real dimension {}), {} facets, {} vertices",
        m.dim(),
        2 * m.dim(),
        p.num_facets(),
        p.num_vertices()
    );
    let _ = writeln!(human, "manifold: {}", yes_no(manifold));
    let _ = writeln!(human, "quasi-SL: {}", yes_no(quasi_sl));
    let _ = writeln!(
        human,
        "positively omnioriented: {}",
        positive.map_or("unknown (no normals)", yes_no)
    );
    human.push('\n');
    human.push_str(&table(&["vertex", "order", "sign"], &vrows));
    if !frows.is_empty() {
        human.push('\n');
        human.push_str(&table(&["singular face", "dim", "order", "divisors"], &frows));
    }
    Ok(Done {
        result: json!({
            "dimension": m.dim(),
            "real_dimension": 2 * m.dim(),
            "facets": p.num_facets(),
            "vertices": vjson,
            "manifold": manifold,
            "quasi_sl": quasi_sl,
            "positively_omnioriented": positive,
            "singular_faces": fjson,
        }),
        human,
    })
}

fn sectors(m: &CharacteristicModel) -> Outcome {
    let tw = m.twisted_sectors();
    let rows: Vec<Vec<String>> = tw
        .iter()
        .map(|s| {
            vec![
                label(m, &s.face),
                point_str(&s.element.lattice_point),
                rats_str(&s.element.coeffs),
                s.age().to_string(),
            ]
        })
        .collect();
    let mut human = table(&["face", "lattice point", "coefficients", "age"], &rows);
    let _ = writeln!(human, "{} twisted sector(s)", tw.len());
    let list: Vec<Value> = tw
        .iter()
        .map(|s| {
            let mut e = element_json(&s.element);
            e["face"] = face_names(m, &s.face);
            e["degree_shift"] = rat(&s.degree_shift());
            e
        })
        .collect();
    Ok(Done {
        result: json!({ "count": tw.len(), "sectors": list }),
        human,
    })
}

fn betti_json(t: &CRBettiTable) -> Value {
    json!({
        "table": t.entries.iter().map(|(d, r)| json!({ "degree": rat(d), "rank": r })).collect::<Vec<_>>(),
        "total": int(&t.euler),
        "quasi_sl": t.quasi_sl,
        "palindromic": t.is_palindromic(),
    })
}

fn betti(m: &CharacteristicModel) -> Outcome {
    let t = cr_betti(m);
    let rows: Vec<Vec<String>> = t
        .entries
        .iter()
        .map(|(d, r)| vec![d.to_string(), r.to_string()])
        .collect();
    let mut human = table(&["degree", "rank"], &rows);
    let _ = writeln!(human, "total rank {}", t.euler);
    if !t.quasi_sl {
        let _ = writeln!(human, "model is not quasi-SL: degrees are rational");
    }
    Ok(Done {
        result: betti_json(&t),
        human,
    })
}

fn euler(m: &CharacteristicModel) -> Outcome {
    let e = euler_cr(m).map_err(|e| Failure::internal(e.to_string()))?;
    let mut human = String::new();
    let _ = writeln!(human, "from sectors:        {}", e.by_sectors);
    let _ = writeln!(human, "from vertex orders:  {}", e.by_vertices);
    if e.is_cr_euler {
        let _ = writeln!(human, "chi_CR = {}", e.value());
    } else {
        let _ = writeln!(
            human,
            "sector-count invariant = {} (model is not quasi-SL)",
            e.value()
        );
    }
    Ok(Done {
        result: json!({
            "by_sectors": int(&e.by_sectors),
            "by_vertices": int(&e.by_vertices),
            "value": int(e.value()),
            "is_cr_euler": e.is_cr_euler,
        }),
        human,
    })
}

fn quasi_sl(m: &CharacteristicModel) -> Outcome {
    let r = m.quasi_sl();
    let mut human = format!("quasi-SL: {}\n", yes_no(r.quasi_sl));
    if !r.offenders.is_empty() {
        let rows: Vec<Vec<String>> = r
            .offenders
            .iter()
            .map(|s| {
                vec![
                    label(m, &s.face),
                    point_str(&s.element.lattice_point),
                    s.age().to_string(),
                ]
            })
            .collect();
        human.push_str(&table(&["face", "lattice point", "age"], &rows));
    }
    Ok(Done {
        result: json!({
            "quasi_sl": r.quasi_sl,
            "offenders": r.offenders.iter().map(|s| {
                let mut e = element_json(&s.element);
                e["face"] = face_names(m, &s.face);
                e
            }).collect::<Vec<_>>(),
        }),
        human,
    })
}

fn spec_json(m: &CharacteristicModel, s: &BlowupSpec) -> Value {
    json!({
        "face": face_names(m, &s.face),
        "lambda0": point(&s.lambda0),
        "b": rats(&s.b),
        "b_sum": rat(&s.b_sum()),
        "crepant": s.crepant,
        "resolution_step": s.resolution_step,
    })
}

fn spec_line(m: &CharacteristicModel, s: &BlowupSpec) -> String {
    format!(
        "face {}  lambda0 {}  b = {}  crepant: {}  resolution step: {}",
        label(m, &s.face),
        point_str(&s.lambda0),
        rats_str(&s.b),
        yes_no(s.crepant),
        yes_no(s.resolution_step)
    )
}

fn write_out(model: &CharacteristicModel, out: Option<&Path>) -> Result<(), Failure> {
    if let Some(path) = out {
        std::fs::write(path, write_model(model))
            .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

fn blowup(m: &CharacteristicModel, face: &str, lambda0: &str, out: Option<&Path>) -> Outcome {
    let face = parse_face(m, face)?;
    let lambda0 = parse_ints(lambda0)?;
    let spec = make_blowup_spec(m, &face, &lambda0).map_err(blowup_failure)?;
    let y = blow_up(m, &spec).map_err(blowup_failure)?;
    write_out(&y, out)?;
    let new_facet = y.polytope().facet_name(y.polytope().num_facets() - 1).to_string();
    let mut human = format!("{}\nnew facet {new_facet}\n", spec_line(m, &spec));
    match out {
        Some(path) => {
            let _ = writeln!(human, "wrote {}", path.display());
        }
        None => human.push_str(&write_model(&y)),
    }
    Ok(Done {
        result: json!({
            "spec": spec_json(m, &spec),
            "new_facet": new_facet,
            "model": serde_json::to_value(ModelFile::from_model(&y)).expect("model serializes"),
        }),
        human,
    })
}

fn candidates(m: &CharacteristicModel, face: &str) -> Outcome {
    let face = parse_face(m, face)?;
    let r = crepant_candidates(m, &face).map_err(blowup_failure)?;
    let p = m.polytope();
    let mut human = String::new();
    let drows: Vec<Vec<String>> = r
        .dual_vectors
        .iter()
        .map(|(w, v)| vec![label(m, &p.vertex_face(*w)), rats_str(v)])
        .collect();
    human.push_str(&table(&["vertex", "dual vector"], &drows));
    human.push('\n');
    let crows: Vec<Vec<String>> = r
        .candidates
        .iter()
        .map(|e| vec![point_str(&e.lattice_point), rats_str(&e.coeffs)])
        .collect();
    human.push_str(&table(&["candidate lambda0", "coefficients"], &crows));
    let _ = writeln!(human, "{} crepant candidate(s) over {}", r.candidates.len(), label(m, &r.face));
    Ok(Done {
        result: json!({
            "face": face_names(m, &r.face),
            "dual_vectors": r.dual_vectors.iter().map(|(w, v)| json!({
                "vertex": face_names(m, &p.vertex_face(*w)),
                "vector": rats(v),
            })).collect::<Vec<_>>(),
            "candidates": r.candidates.iter().map(element_json).collect::<Vec<_>>(),
        }),
        human,
    })
}

fn verdict_json(v: &Verdict) -> Value {
    match v {
        Verdict::Holds => json!({ "verdict": "holds", "observed": true }),
        Verdict::Fails => json!({ "verdict": "fails", "observed": false }),
        Verdict::OutOfScope { observed } => {
            json!({ "verdict": "out-of-scope", "observed": observed })
        }
    }
}

fn verdict_str(v: &Verdict) -> String {
    match v {
        Verdict::OutOfScope { observed } => {
            format!("out of theorem scope (observed: {})", if *observed { "true" } else { "false" })
        }
        other => other.label().to_string(),
    }
}

fn mckay(m: &CharacteristicModel, face: &str, lambda0: &str) -> Outcome {
    let face = parse_face(m, face)?;
    let lambda0 = parse_ints(lambda0)?;
    let spec = make_blowup_spec(m, &face, &lambda0).map_err(blowup_failure)?;
    let r = verify_mckay(m, &spec).map_err(blowup_failure)?;

    let mut degrees: Vec<_> = r
        .betti_before
        .entries
        .keys()
        .chain(r.betti_after.entries.keys())
        .cloned()
        .collect();
    degrees.sort();
    degrees.dedup();
    let mut rows: Vec<Vec<String>> = degrees
        .iter()
        .map(|d| {
            vec![
                d.to_string(),
                r.betti_before.rank(d).to_string(),
                r.betti_after.rank(d).to_string(),
            ]
        })
        .collect();
    rows.push(vec!["euler".into(), r.euler_before.to_string(), r.euler_after.to_string()]);

    let mut human = format!("{}\n", spec_line(m, &r.spec));
    let _ = writeln!(
        human,
        "real dimension {}  X quasi-SL: {}  Y quasi-SL: {}\n",
        r.real_dim,
        yes_no(r.x_quasi_sl),
        yes_no(r.y_quasi_sl)
    );
    human.push_str(&table(&["degree", "X", "Y"], &rows));
    human.push('\n');
    let verdicts = [
        ("euler_conserved", &r.euler_conserved),
        ("betti_conserved", &r.betti_conserved),
        ("h2_monotone", &r.h2_monotone),
        ("quasi_sl_preserved", &r.quasi_sl_preserved),
    ];
    let vrows: Vec<Vec<String>> = verdicts
        .iter()
        .map(|(k, v)| vec![k.to_string(), verdict_str(v)])
        .collect();
    human.push_str(&table(&["check", "verdict"], &vrows));

    if r.any_failure() {
        return Err(Failure::internal(format!(
            "a theorem check failed inside its hypotheses:\n{human}"
        )));
    }
    let mut vjson = serde_json::Map::new();
    for (k, v) in verdicts {
        vjson.insert(k.to_string(), verdict_json(v));
    }
    Ok(Done {
        result: json!({
            "spec": spec_json(m, &r.spec),
            "real_dimension": r.real_dim,
            "x_quasi_sl": r.x_quasi_sl,
            "y_quasi_sl": r.y_quasi_sl,
            "euler_before": int(&r.euler_before),
            "euler_after": int(&r.euler_after),
            "betti_before": betti_json(&r.betti_before),
            "betti_after": betti_json(&r.betti_after),
            "h2_before": r.betti_before.h2(),
            "h2_after": r.betti_after.h2(),
            "verdicts": Value::Object(vjson),
        }),
        human,
    })
}

fn resolution(m: &CharacteristicModel, out: Option<&Path>) -> Outcome {
    let r = resolve(m).map_err(blowup_failure)?;
    write_out(&r.model, out)?;
    let mut human = String::new();
    for (i, s) in r.steps.iter().enumerate() {
        let _ = writeln!(human, "step {}: {}", i + 1, spec_line(&r.model, s));
    }
    let _ = writeln!(
        human,
        "{} step(s); result is a manifold: {}",
        r.steps.len(),
        yes_no(r.model.is_manifold())
    );
    match out {
        Some(path) => {
            let _ = writeln!(human, "wrote {}", path.display());
        }
        None => human.push_str(&write_model(&r.model)),
    }
    Ok(Done {
        result: json!({
            "steps": r.steps.iter().map(|s| spec_json(&r.model, s)).collect::<Vec<_>>(),
            "manifold": r.model.is_manifold(),
            "model": serde_json::to_value(ModelFile::from_model(&r.model)).expect("model serializes"),
        }),
        human,
    })
}

fn product(m: &CharacteristicModel, s1: &str, s2: &str) -> Outcome {
    let a = parse_sector(m, s1)?;
    let b = parse_sector(m, s2)?;
    let prod = sector_product(m, &a, &b).map_err(|e| Failure::internal(e.to_string()))?;
    let names = |fs: &[usize]| -> Vec<String> {
        fs.iter().map(|&i| m.polytope().facet_name(i).to_string()).collect()
    };
    let p = match prod {
        SectorProduct::Zero => {
            return Ok(Done {
                result: json!({ "zero": true }),
                human: format!(
                    "{} * {} = 0 (faces do not meet)\n",
                    sector_label(m, &a),
                    sector_label(m, &b)
                ),
            })
        }
        SectorProduct::Product(p) => p,
    };
    let left = a.age() + b.age();
    let mut human = format!(
        "{} * {} = {}\n",
        sector_label(m, &a),
        sector_label(m, &b),
        sector_label(m, &p.target_sector())
    );
    let _ = writeln!(human, "meet: {}", label(m, &p.meet));
    let _ = writeln!(human, "theta facets: {}", join(names(&p.theta_facets), ","));
    let crows: Vec<Vec<String>> = p
        .case_tags
        .iter()
        .map(|(&i, c)| vec![m.polytope().facet_name(i).to_string(), c.label().to_string()])
        .collect();
    human.push_str(&table(&["facet", "case"], &crows));
    let _ = writeln!(
        human,
        "ages: {} + {} = {} + {}",
        a.age(),
        b.age(),
        p.product_element.age,
        p.theta_facets.len()
    );
    let mut cases = serde_json::Map::new();
    for (&i, c) in &p.case_tags {
        cases.insert(m.polytope().facet_name(i).to_string(), Value::String(c.label().into()));
    }
    Ok(Done {
        result: json!({
            "zero": false,
            "meet": face_names(m, &p.meet),
            "target_face": face_names(m, &p.target_face),
            "product_element": element_json(&p.product_element),
            "theta_facets": names(&p.theta_facets),
            "cases": Value::Object(cases),
            "degree_check": { "left": rat(&left), "right": rat(&(&p.product_element.age + qtorb::Rational::from_integer(p.theta_facets.len().into()))) },
        }),
        human,
    })
}

fn product_table(m: &CharacteristicModel) -> Outcome {
    let t = sector_product_table(m).map_err(|e| Failure::internal(e.to_string()))?;
    if !t.is_consistent() {
        return Err(Failure::internal(format!(
            "product table inconsistent: {} associativity and {} commutativity violations",
            t.associativity_violations.len(),
            t.commutativity_violations.len()
        )));
    }
    let labels: Vec<String> = t.sectors.iter().map(|s| sector_label(m, s)).collect();
    let mut human = String::new();
    for (i, l) in labels.iter().enumerate() {
        let _ = writeln!(human, "s{i} = {l}");
    }
    human.push('\n');
    let mut header: Vec<String> = vec!["*".into()];
    header.extend((0..labels.len()).map(|i| format!("s{i}")));
    let rows: Vec<Vec<String>> = t
        .entries
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut cells = vec![format!("s{i}")];
            cells.extend(row.iter().map(|e| match e {
                TableEntry::Zero => "0".into(),
                TableEntry::Sector { index, theta_facets } if theta_facets.is_empty() => {
                    format!("s{index}")
                }
                TableEntry::Sector { index, theta_facets } => format!(
                    "s{index}[{}]",
                    join(theta_facets.iter().map(|&f| m.polytope().facet_name(f).to_string()), ",")
                ),
            }));
            cells
        })
        .collect();
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    human.push_str(&table(&header_refs, &rows));
    Ok(Done {
        result: json!({
            "sectors": labels,
            "entries": t.entries.iter().map(|row| row.iter().map(|e| match e {
                TableEntry::Zero => Value::Null,
                TableEntry::Sector { index, theta_facets } => json!({
                    "target": index,
                    "theta_facets": theta_facets.iter().map(|&f| m.polytope().facet_name(f)).collect::<Vec<_>>(),
                }),
            }).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "associativity_checked": true,
        }),
        human,
    })
}
