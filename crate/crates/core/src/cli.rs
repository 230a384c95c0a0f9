//! Command dispatch for the `covol` binary. Every command returns a JSON
//! report with `schema: 1`, a DOT rendering and whether all properties the
//! command asserts hold. Reports only use sorted maps, so they are
//! byte-identical across runs.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use thiserror::Error;

use crate::coalgebra::{
    check_axioms, compose, is_homogeneous, is_homogeneous_by_blocks, is_identity_on, minimal_partition, theta_gamma,
    verify_coalgebra_map, Coalgebra, CoalgebraError, CsmIso, EIso, SmashCoalgebra, SubcoalgebraBasis,
};
use crate::comodule::{gradability_probe, GradedComodule, ProbeResult};
use crate::covering::{extract_relators, relators_vanish, theorem_cov_crosscheck, universal_grading_group, CoalgebraCovering};
use crate::dsl::{emit, emit_element, parse_element, GroupSpec, ParseError, Workspace, WorkspaceError};
use crate::groups::{GroupDescriptor, GroupElement};
use crate::quiver::{spanning_tree_and_pi1, Quiver, QuiverError};
use crate::voltage::{ArrowWeighting, SmashQuiver, VertexWeighting, VoltageError};

pub const COMMANDS: [&str; 11] = [
    "smash",
    "check-cover",
    "homog",
    "minimal",
    "relators",
    "universal",
    "cov-crosscheck",
    "csm-iso",
    "twist",
    "gradable",
    "export",
];

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Workspace(#[from] WorkspaceError),
    #[error(transparent)]
    Coalgebra(#[from] CoalgebraError),
    #[error(transparent)]
    Voltage(#[from] VoltageError),
    #[error(transparent)]
    Quiver(#[from] QuiverError),
    #[error("{0}")]
    Precondition(String),
    #[error("unknown command `{0}`")]
    UnknownCommand(String),
}

#[derive(Clone, Debug)]
pub struct Options {
    pub window: usize,
    pub weighting: Option<String>,
    pub subcoalgebra: Option<String>,
    pub comodule: Option<String>,
    /// Vertex weighting for `twist`, as `x=g, y=h`.
    pub gamma: Option<String>,
    pub seed: u64,
}

impl Default for Options {
    fn default() -> Self {
        Options { window: 3, weighting: None, subcoalgebra: None, comodule: None, gamma: None, seed: 0 }
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: Value,
    pub dot: String,
    pub ok: bool,
}

/// Names resolved against the workspace.
struct Context<'a> {
    ws: &'a Workspace,
    opts: &'a Options,
}

impl<'a> Context<'a> {
    fn subcoalgebra_name(&self) -> Result<String, CliError> {
        match &self.opts.subcoalgebra {
            Some(n) => Ok(n.clone()),
            None => self
                .ws
                .subcoalgebras
                .first()
                .map(|b| b.name.clone())
                .ok_or_else(|| CliError::Precondition("workspace declares no subcoalgebra".into())),
        }
    }

    fn subcoalgebra(&self) -> Result<SubcoalgebraBasis, CliError> {
        Ok(self.ws.subcoalgebra(&self.subcoalgebra_name()?)?)
    }

    /// The selected weighting, or the first one on the subcoalgebra's quiver.
    fn weighting_name(&self) -> Result<String, CliError> {
        if let Some(n) = &self.opts.weighting {
            return Ok(n.clone());
        }
        let quiver = match self.subcoalgebra_name() {
            Ok(b) => self.ws.subcoalgebras.iter().find(|d| d.name == b).map(|d| d.quiver.clone()),
            Err(_) => None,
        };
        self.ws
            .weightings
            .iter()
            .find(|w| quiver.as_ref().is_none_or(|q| *q == w.quiver))
            .map(|w| w.name.clone())
            .ok_or_else(|| CliError::Precondition("workspace declares no weighting".into()))
    }

    fn weighting(&self) -> Result<(Quiver, ArrowWeighting, GroupSpec), CliError> {
        let name = self.weighting_name()?;
        let (q, w) = self.ws.weighting(&name)?;
        let spec = self.ws.group_spec_of_weighting(&name).expect("resolved").clone();
        Ok((q, w, spec))
    }

    fn window(&self, g: &GroupDescriptor) -> Result<Vec<GroupElement>, CliError> {
        g.ball(self.opts.window).map_err(|e| CliError::Precondition(e.to_string()))
    }

    /// The subcoalgebra when it lives on the weighting's quiver, else the
    /// full path coalgebra truncated at 2.
    fn coalgebra_for(&self, q: &Quiver) -> Result<SubcoalgebraBasis, CliError> {
        match self.subcoalgebra() {
            Ok(b) if b.quiver == *q => Ok(b),
            Ok(_) | Err(CliError::Precondition(_)) => Ok(SubcoalgebraBasis::full(q, 2)),
            Err(e) => Err(e),
        }
    }
}

fn base_dot(ws: &Workspace, opts: &Options) -> String {
    let cx = Context { ws, opts };
    let name = cx
        .subcoalgebra_name()
        .ok()
        .and_then(|b| ws.subcoalgebras.iter().find(|d| d.name == b).map(|d| d.quiver.clone()))
        .or_else(|| ws.quivers.first().map(|q| q.name.clone()));
    match name {
        Some(n) => ws.quiver(&n).map(|q| q.to_dot(&n)).unwrap_or_default(),
        None => "digraph empty {\n}\n".to_string(),
    }
}

fn arrow_names(q: &Quiver, arrows: &[usize]) -> Vec<String> {
    arrows.iter().map(|&a| q.arrows[a].name.clone()).collect()
}

pub fn run(command: &str, ws: &Workspace, opts: &Options) -> Result<Outcome, CliError> {
    let cx = Context { ws, opts };
    let (mut report, dot, ok) = match command {
        "smash" => smash(&cx)?,
        "check-cover" => check_cover(&cx)?,
        "homog" => homog(&cx)?,
        "minimal" => minimal(&cx)?,
        "relators" => relators(&cx)?,
        "universal" => universal(&cx)?,
        "cov-crosscheck" => crosscheck(&cx)?,
        "csm-iso" => csm_iso(&cx)?,
        "twist" => twist(&cx)?,
        "gradable" => gradable(&cx)?,
        "export" => export(&cx)?,
        other => return Err(CliError::UnknownCommand(other.to_string())),
    };
    let obj = report.as_object_mut().expect("reports are objects");
    obj.insert("schema".into(), json!(1));
    obj.insert("command".into(), json!(command));
    obj.insert("ok".into(), json!(ok));
    Ok(Outcome { report, dot: dot.unwrap_or_else(|| base_dot(ws, opts)), ok })
}

type Produced = (Value, Option<String>, bool);

fn smash(cx: &Context) -> Result<Produced, CliError> {
    let (q, d, _) = cx.weighting()?;
    let mut b = cx.coalgebra_for(&q)?;
    // The smash coproduct needs a homogeneous subcoalgebra.
    let homogeneous = is_homogeneous(&b, &d)?.homogeneous;
    if !homogeneous {
        b = SubcoalgebraBasis::full(&q, b.truncation());
    }
    let window = cx.window(&d.group)?;
    let sq = SmashQuiver::new(&q, &d, window.clone())?;
    let sc = SmashCoalgebra::new(&b, &d, window.clone())?;
    let axioms = check_axioms(&sc);
    let e = EIso::new(&q, &d, window, b.truncation())?;
    let bijection = e.is_basis_bijection();
    let intertwines = verify_coalgebra_map(&e.map, &e.smash, &e.target);
    let summary = sq.summary();
    let ok = summary.covering_on_interior && axioms.ok() && bijection && intertwines.ok();
    let report = json!({
        "window": cx.opts.window,
        "smashQuiver": summary,
        "smashCoalgebra": {"dimension": sc.dim(), "axioms": axioms, "ofSubcoalgebra": homogeneous},
        "pathIsomorphism": {"basisBijection": bijection, "intertwinesDelta": intertwines},
    });
    Ok((report, Some(sq.to_dot("smash")), ok))
}

fn check_cover(cx: &Context) -> Result<Produced, CliError> {
    let (q, d, _) = cx.weighting()?;
    let b = cx.coalgebra_for(&q)?;
    let window = cx.window(&d.group)?;
    let sq = SmashQuiver::new(&q, &d, window.clone())?;
    let summary = sq.summary();
    let galois = if d.group.order().is_some() {
        Some(sq.morphism.is_covering().ok && sq.morphism.is_galois_on_fiber(0)?)
    } else {
        None
    };
    let h = is_homogeneous(&b, &d)?;
    let mut ok = summary.covering_on_interior && galois != Some(false);
    let coalgebra = if h.homogeneous {
        let cov = CoalgebraCovering::build(&b, &d, window)?;
        let projection = cov.verify_projection();
        let covering = cov.is_coalgebra_covering();
        ok &= projection.ok() && covering.ok;
        json!({"liftedDimension": cov.lifted.dim(), "projection": projection, "covering": covering})
    } else {
        json!(null)
    };
    let report = json!({
        "window": cx.opts.window,
        "smashQuiver": summary,
        "galois": galois,
        "homogeneous": h.homogeneous,
        "coalgebraCovering": coalgebra,
    });
    Ok((report, Some(sq.to_dot("smash")), ok))
}

fn homog(cx: &Context) -> Result<Produced, CliError> {
    let b = cx.subcoalgebra()?;
    let (_, d, _) = cx.weighting()?;
    let h = is_homogeneous(&b, &d)?;
    let by_blocks = is_homogeneous_by_blocks(&b, &d);
    let report = json!({
        "homogeneous": h.homogeneous,
        "dimension": h.dimension,
        "gradedDimension": h.graded_dimension,
        "witness": h.witness.as_ref().map(|w| b.format_element(w)),
        "blocksAgree": by_blocks == h.homogeneous,
    });
    Ok((report, None, by_blocks == h.homogeneous))
}

fn minimal(cx: &Context) -> Result<Produced, CliError> {
    let b = cx.subcoalgebra()?;
    let q = &b.quiver;
    let blocks = minimal_partition(&b);
    let support: Vec<usize> = b.space.support().into_iter().collect();
    let mut covered: Vec<usize> = blocks.iter().flat_map(|blk| blk.paths.iter().copied()).collect();
    covered.sort();
    let ok = covered == support;
    let list: Vec<Value> = blocks
        .iter()
        .map(|blk| {
            json!({
                "source": q.vertices[blk.source],
                "target": q.vertices[blk.target],
                "paths": blk.paths.iter().map(|&p| b.index.label(q, p)).collect::<Vec<_>>(),
                "minimalElement": blk.representative.as_ref().map(|r| b.index.format_vector(q, r)),
            })
        })
        .collect();
    let nontrivial = blocks.iter().filter(|blk| blk.paths.len() >= 2).count();
    Ok((json!({"dimension": b.dim(), "blocks": list, "nontrivialBlocks": nontrivial}), None, ok))
}

fn relators(cx: &Context) -> Result<Produced, CliError> {
    let b = cx.subcoalgebra()?;
    let q = &b.quiver;
    let pres = spanning_tree_and_pi1(q, 0)?;
    let rs = extract_relators(&b, &pres);
    let names = arrow_names(q, &pres.generators);
    let list: Vec<Value> = rs
        .relators
        .iter()
        .map(|r| {
            json!({
                "paths": [b.index.label(q, r.first), b.index.label(q, r.other)],
                "walk": r.walk.describe(q),
                "word": r.word.format_with(&names),
            })
        })
        .collect();
    let mut ok = true;
    let vanish = match cx.weighting() {
        Ok((wq, d, _)) if wq == *q => {
            let v = relators_vanish(&rs, &d);
            if is_homogeneous(&b, &d)?.homogeneous {
                ok &= v;
            }
            Some(v)
        }
        _ => None,
    };
    let report = json!({
        "pi1Rank": pres.rank(),
        "generators": names,
        "relators": list,
        "vanishUnderWeighting": vanish,
    });
    Ok((report, None, ok))
}

fn universal(cx: &Context) -> Result<Produced, CliError> {
    let b = cx.subcoalgebra()?;
    let q = &b.quiver;
    let pres = spanning_tree_and_pi1(q, 0)?;
    let u = universal_grading_group(&b, &pres);
    let rs = extract_relators(&b, &pres);
    let homogeneous = is_homogeneous(&b, &u.weighting)?.homogeneous;
    let connected = u.weighting.is_connected(q, &pres)?;
    let vanish = relators_vanish(&rs, &u.weighting);
    let report = json!({
        "group": u.label(),
        "rank": u.rank(),
        "pi1Rank": pres.rank(),
        "relators": u.relators.len(),
        "exact": u.exact,
        "weighting": u.weighting.describe(q),
        "homogeneous": homogeneous,
        "connected": connected,
    });
    Ok((report, None, homogeneous && connected && vanish))
}

fn crosscheck(cx: &Context) -> Result<Produced, CliError> {
    let b = cx.subcoalgebra()?;
    let (q, d, _) = cx.weighting()?;
    if q != b.quiver {
        return Err(CliError::Precondition("weighting and subcoalgebra live on different quivers".into()));
    }
    let pres = spanning_tree_and_pi1(&q, 0)?;
    let c = theorem_cov_crosscheck(&b, &d, &pres, cx.window(&d.group)?)?;
    let ok = c.consistent();
    let mut report = serde_json::to_value(&c).expect("serialisable");
    report["consistent"] = json!(ok);
    report["witness"] = json!(c.witness);
    Ok((report, None, ok))
}

fn random_gamma(rng: &mut ChaCha8Rng, g: &GroupDescriptor, vertices: usize) -> Result<VertexWeighting, CliError> {
    let pool = g.ball(1).map_err(|e| CliError::Precondition(e.to_string()))?;
    let values = (0..vertices).map(|_| pool[rng.gen_range(0..pool.len())].clone()).collect();
    Ok(VertexWeighting::new(g.clone(), values)?)
}

fn describe_gamma(q: &Quiver, spec: &GroupSpec, gamma: &VertexWeighting) -> BTreeMap<String, String> {
    q.vertices.iter().cloned().zip(gamma.values.iter().map(|g| emit_element(spec, g))).collect()
}

fn csm_iso(cx: &Context) -> Result<Produced, CliError> {
    let (q, d, spec) = cx.weighting()?;
    let truncation = cx.coalgebra_for(&q)?.truncation();
    let sq = SmashQuiver::new(&q, &d, cx.window(&d.group)?)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cx.opts.seed);
    let mut gammas = vec![VertexWeighting::trivial(d.group.clone(), q.vertex_count())];
    for _ in 0..5 {
        gammas.push(random_gamma(&mut rng, &d.group, q.vertex_count())?);
    }
    let mut ok = true;
    let mut list = Vec::new();
    for gamma in &gammas {
        let lifting = sq.lifting_of(gamma)?;
        let iso = CsmIso::new(&sq, &lifting, truncation, sq.window.clone())?;
        let phi = verify_coalgebra_map(&iso.phi, &iso.smash, &iso.cover);
        let psi = verify_coalgebra_map(&iso.psi, &iso.cover, &iso.smash);
        let interior: Vec<usize> = iso.smash.interior_symbols().into_iter().filter(|&s| iso.phi[s].is_some()).collect();
        let inverse = is_identity_on(&compose(&iso.psi, &iso.phi), &interior);
        let projection = iso.projection_commutes();
        ok &= phi.ok() && psi.ok() && inverse && projection && phi.checked > 0;
        list.push(json!({
            "lifting": describe_gamma(&q, &spec, gamma),
            "grading": iso.grading.describe(&q),
            "phi": phi,
            "psi": psi,
            "inverseOnInterior": inverse,
            "projectionCommutes": projection,
        }));
    }
    Ok((json!({"window": cx.opts.window, "truncation": truncation, "liftings": list}), Some(sq.to_dot("smash")), ok))
}

/// Splits `x=g, y=h` at top-level commas.
fn parse_gamma(q: &Quiver, spec: &GroupSpec, group: &GroupDescriptor, text: &str) -> Result<VertexWeighting, CliError> {
    let mut values = vec![group.identity(); q.vertex_count()];
    let mut depth = 0;
    let mut parts = vec![String::new()];
    for c in text.chars() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        if c == ',' && depth == 0 {
            parts.push(String::new());
        } else {
            parts.last_mut().expect("nonempty").push(c);
        }
    }
    for part in parts.iter().filter(|p| !p.trim().is_empty()) {
        let (v, g) = part.split_once('=').ok_or_else(|| CliError::Precondition(format!("expected vertex=element, got `{part}`")))?;
        let x = q.vertex_index(v.trim()).ok_or_else(|| CliError::Precondition(format!("unknown vertex `{}`", v.trim())))?;
        values[x] = parse_element(spec, g)?;
    }
    Ok(VertexWeighting::new(group.clone(), values)?)
}

fn twist(cx: &Context) -> Result<Produced, CliError> {
    let (q, d, spec) = cx.weighting()?;
    let text = cx.opts.gamma.as_deref().ok_or_else(|| CliError::Precondition("twist needs --gamma".into()))?;
    let gamma = parse_gamma(&q, &spec, &d.group, text)?;
    let b = cx.coalgebra_for(&q)?;
    let twisted = d.twist(&q, &gamma)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cx.opts.seed);
    let other = random_gamma(&mut rng, &d.group, q.vertex_count())?;
    let composition = twisted.twist(&q, &other)? == d.twist(&q, &gamma.product(&other)?)?;
    let window = cx.window(&d.group)?;
    let of_subcoalgebra = is_homogeneous(&b, &d)?.homogeneous;
    let sb = if of_subcoalgebra { b.clone() } else { SubcoalgebraBasis::full(&q, b.truncation()) };
    let s0 = SmashCoalgebra::new(&sb, &d, window.clone())?;
    let s1 = SmashCoalgebra::new(&sb, &twisted, window.clone())?;
    let s2 = SmashCoalgebra::new(&sb, &twisted.twist(&q, &other)?, window)?;
    let theta = theta_gamma(&s0, &s1, &gamma);
    let map = verify_coalgebra_map(&theta, &s0, &s1);
    let chained = compose(&theta_gamma(&s1, &s2, &other), &theta);
    let direct = theta_gamma(&s0, &s2, &gamma.product(&other)?);
    let theta_law = chained.iter().zip(&direct).all(|(a, c)| a.is_none() || c.is_none() || a == c);
    let pres = spanning_tree_and_pi1(&q, 0)?;
    let h0 = is_homogeneous(&b, &d)?.homogeneous;
    let h1 = is_homogeneous(&b, &twisted)?.homogeneous;
    let c0 = d.is_connected(&q, &pres)?;
    let c1 = twisted.is_connected(&q, &pres)?;
    let ok = composition && map.ok() && theta_law && h0 == h1 && c0 == c1;
    let report = json!({
        "gamma": describe_gamma(&q, &spec, &gamma),
        "twisted": twisted.describe(&q),
        "compositionLaw": composition,
        "theta": map,
        "ofSubcoalgebra": of_subcoalgebra,
        "thetaCompositionLaw": theta_law,
        "homogeneous": [h0, h1],
        "connected": [c0, c1],
    });
    Ok((report, None, ok))
}

fn gradable(cx: &Context) -> Result<Produced, CliError> {
    let names: Vec<String> = match &cx.opts.comodule {
        Some(n) => vec![n.clone()],
        None => cx.ws.comodules.iter().map(|m| m.name.clone()).collect(),
    };
    let mut ok = true;
    let mut list = Vec::new();
    for name in names {
        let (b, m) = cx.ws.comodule(&name)?;
        let axioms = m.verify(&b);
        ok &= axioms.ok();
        let wname = cx
            .opts
            .weighting
            .clone()
            .or_else(|| {
                let over = &cx.ws.comodules.iter().find(|c| c.name == name)?.over;
                let qn = &cx.ws.subcoalgebras.iter().find(|s| s.name == *over)?.quiver;
                cx.ws.weightings.iter().find(|w| w.quiver == *qn).map(|w| w.name.clone())
            })
            .ok_or_else(|| CliError::Precondition(format!("no weighting for comodule {name}")))?;
        let (_, d) = cx.ws.weighting(&wname)?;
        let spec = cx.ws.group_spec_of_weighting(&wname).expect("resolved").clone();
        let radius = cx.opts.window.max(m.dim());
        let mut entry = json!({"name": name, "dimension": m.dim(), "axioms": axioms});
        match gradability_probe(&m, &b, &d, radius) {
            Ok(ProbeResult::Gradable(g)) => {
                let compatible = g.incompatibility(&b, &d).is_none();
                let smash = SmashCoalgebra::with_radius(&b, &d, radius)?;
                let round_trip = g
                    .to_smash(&smash)
                    .ok()
                    .filter(|n| n.verify(&smash).ok())
                    .and_then(|n| GradedComodule::from_smash(&n, &smash).ok())
                    .is_some_and(|back| back == g);
                ok &= compatible && round_trip;
                entry["probe"] = json!("gradable");
                entry["degrees"] = json!(g.degrees.iter().map(|x| emit_element(&spec, x)).collect::<Vec<_>>());
                entry["basis"] = json!(g.comodule.labels);
                entry["compatible"] = json!(compatible);
                entry["smashRoundTrip"] = json!(round_trip);
            }
            Ok(ProbeResult::Ungradable(cert)) => {
                entry["probe"] = json!("ungradable");
                entry["exhausted"] = json!(cert.len());
                entry["certificate"] = json!(cert);
            }
            Ok(ProbeResult::Unknown(reason)) => {
                entry["probe"] = json!("unknown");
                entry["reason"] = json!(reason);
            }
            Err(e) => {
                entry["probe"] = json!("not applicable");
                entry["reason"] = json!(e.to_string());
            }
        }
        list.push(entry);
    }
    Ok((json!({"comodules": list}), None, ok))
}

fn export(cx: &Context) -> Result<Produced, CliError> {
    let ws = cx.ws;
    let mut quivers = serde_json::Map::new();
    for d in &ws.quivers {
        let q = ws.quiver(&d.name)?;
        let arrows: Vec<Value> = q
            .arrows
            .iter()
            .map(|a| json!({"name": a.name, "source": q.vertices[a.source], "target": q.vertices[a.target]}))
            .collect();
        quivers.insert(d.name.clone(), json!({"vertices": q.vertices, "arrows": arrows}));
    }
    let groups: BTreeMap<String, String> = ws.groups.iter().map(|g| (g.name.clone(), g.spec.to_string())).collect();
    let mut weightings = serde_json::Map::new();
    for w in &ws.weightings {
        let (q, d) = ws.weighting(&w.name)?;
        weightings.insert(w.name.clone(), json!({"quiver": w.quiver, "group": w.group, "values": d.describe(&q)}));
    }
    let mut subs = serde_json::Map::new();
    for s in &ws.subcoalgebras {
        subs.insert(s.name.clone(), ws.subcoalgebra(&s.name)?.to_json());
    }
    let mut comodules = serde_json::Map::new();
    for m in &ws.comodules {
        let (b, c) = ws.comodule(&m.name)?;
        comodules.insert(m.name.clone(), c.to_json(&b));
    }
    let report = json!({
        "quivers": quivers,
        "groups": groups,
        "weightings": weightings,
        "subcoalgebras": subs,
        "comodules": comodules,
        "source": emit(ws),
    });
    Ok((report, None, true))
}

/// Parses and runs in one step.
pub fn run_text(command: &str, text: &str, opts: &Options) -> Result<Outcome, CliError> {
    let ws = crate::dsl::parse(text)?;
    run(command, &ws, opts)
}
