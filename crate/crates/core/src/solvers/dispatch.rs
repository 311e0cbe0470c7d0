//! Route a grid to a polynomial-time evaluator by its set verdict.

use super::eo::{eo_geneq_eval, EoInstance};
use super::fkt::{fkt_count_pm, WeightedPlanarGraph};
use super::{affine_eval, chain_eval, closed_symmetric, product_eval, r2_eval, vanishing_eval, SolveError};
use crate::algebra::AlgebraicNumber as An;
use crate::classify::{case7_sigma, dichotomy_plholant_set, in_vanishing, Outcome, SetVerdict};
use crate::grid::{holant_bruteforce_capped, holographic_transform_bipartite, two_stretch, GridError, PlanarGrid};
use crate::sigcalc::{named, SymmetricSignature, Transform2x2};
use serde::Serialize;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Auto,
    Brute,
    Product,
    Affine,
    Eo,
    Fkt,
}

impl FromStr for Method {
    type Err = SolveError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "auto" => Method::Auto,
            "brute" => Method::Brute,
            "product" => Method::Product,
            "affine" => Method::Affine,
            "eo" => Method::Eo,
            "fkt" => Method::Fkt,
            _ => return Err(SolveError::Parse(format!("unknown method {s:?}"))),
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Evaluation {
    pub value: An,
    pub route: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<SetVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

fn done(value: An, route: &str, verdict: Option<SetVerdict>) -> Evaluation {
    Evaluation { value, route: route.into(), verdict, note: None }
}

/// Exact Holant value.  `Auto` picks a polynomial route when the set verdict
/// offers one and otherwise falls back to brute force within `cap` edges.
pub fn evaluate(grid: &PlanarGrid, method: Method, cap: usize) -> Result<Evaluation, SolveError> {
    grid.validate()?;
    if !grid.dangling.is_empty() {
        return Err(GridError::Structure("grid has dangling edges; evaluate its gate signature instead".into()).into());
    }
    match method {
        Method::Brute => return Ok(done(holant_bruteforce_capped(grid, cap)?, "brute", None)),
        Method::Product => return Ok(done(product_eval(grid)?, "product", None)),
        Method::Affine => return Ok(done(affine_eval(grid)?, "affine", None)),
        Method::Eo => {
            let sigs = closed_symmetric(grid)?;
            let inst = match case7_sigma(&sigs) {
                Some((plus, _)) => EoInstance::from_z_grid(grid, plus)?,
                None => EoInstance::from_grid(grid)?,
            };
            return Ok(done(eo_geneq_eval(&inst)?, "eo", None));
        }
        Method::Fkt => {
            let v = matching_eval(grid)?.ok_or_else(|| SolveError::Class("signatures are not all ExactOne or all AllButOne".into()))?;
            return Ok(done(v, "fkt", None));
        }
        Method::Auto => {}
    }
    let brute_fallback = |note: String, verdict: Option<SetVerdict>| match holant_bruteforce_capped(grid, cap) {
        Ok(v) => Ok(Evaluation { value: v, route: "brute".into(), verdict, note: Some(note) }),
        Err(GridError::TooLarge { edges, cap }) => Err(SolveError::Unroutable { edges, cap, note }),
        Err(e) => Err(e.into()),
    };
    if grid.vertices.is_empty() {
        return Ok(done(grid.scalar.clone(), "empty", None));
    }
    if !grid.validate()?.genus_ok {
        return brute_fallback("grid is not planar".into(), None);
    }
    let sigs = match closed_symmetric(grid) {
        Ok(s) => s,
        Err(SolveError::Class(m)) => return brute_fallback(m, None),
        Err(e) => return Err(e),
    };
    if sigs.iter().any(|f| f.is_zero()) || grid.scalar.is_zero() {
        return Ok(done(An::zero(), "zero", None));
    }
    let set = grid.symmetric_signature_set()?;
    let verdict = dichotomy_plholant_set(&set);
    let cases = match &verdict.outcome {
        Outcome::Tractable { all_cases, .. } => all_cases.clone(),
        Outcome::PHard { obstruction } => return brute_fallback(format!("PHard: {obstruction}"), Some(verdict.clone())),
    };
    let mut notes = Vec::new();
    for case in &cases {
        let attempt = route(grid, &sigs, case, &verdict);
        match attempt {
            Ok(Some((v, r))) => return Ok(done(v, r, Some(verdict))),
            Ok(None) => {}
            Err(e) => notes.push(format!("case {case}: {e}")),
        }
    }
    let note = if notes.is_empty() { "no polynomial route for this set".to_string() } else { notes.join("; ") };
    brute_fallback(note, Some(verdict))
}

fn route(
    grid: &PlanarGrid,
    sigs: &[SymmetricSignature],
    case: &str,
    verdict: &SetVerdict,
) -> Result<Option<(An, &'static str)>, SolveError> {
    Ok(match case {
        "1" => Some((chain_eval(grid)?, "chain")),
        "4+" | "4-" | "5+" | "5-" => {
            let plus = case.ends_with('+');
            let all_vanishing = sigs.iter().all(|f| {
                let v = in_vanishing(f);
                if plus {
                    v.0
                } else {
                    v.1
                }
            });
            if all_vanishing {
                Some((vanishing_eval(grid)?, "vanishing"))
            } else {
                Some((r2_eval(grid, plus)?, "r2"))
            }
        }
        "7" => match case7_sigma(sigs) {
            Some((plus, _)) => Some((eo_geneq_eval(&EoInstance::from_z_grid(grid, plus)?)?, "eo")),
            None => None,
        },
        "2" | "3" => {
            let Some(t) = witness_transform(verdict, case)? else { return Ok(None) };
            let eval: fn(&PlanarGrid) -> Result<An, SolveError> = if case == "2" { affine_eval } else { product_eval };
            let name = if case == "2" { "affine" } else { "product" };
            if t == Transform2x2::identity() {
                return Ok(Some((eval(grid)?, name)));
            }
            let stretched = two_stretch(grid);
            let ti = t.inverse().map_err(|_| GridError::Singular)?;
            let mut last = None;
            for m in [ti.transpose(), t.transpose()] {
                let g = holographic_transform_bipartite(&stretched, &m)?;
                match eval(&g) {
                    Ok(v) => return Ok(Some((v, name))),
                    Err(e) => last = Some(e),
                }
            }
            return Err(last.expect("tried a transform"));
        }
        "6" => matching_eval(grid)?.map(|v| (v, "fkt")),
        _ => None,
    })
}

fn witness_transform(verdict: &SetVerdict, case: &str) -> Result<Option<Transform2x2>, SolveError> {
    let Outcome::Tractable { case: first, witness, .. } = &verdict.outcome else { return Ok(None) };
    // the verdict carries the witness of its first case only; otherwise try
    // the untransformed grid
    if first != case {
        return Ok(Some(Transform2x2::identity()));
    }
    let Some(tr) = witness.as_ref().and_then(|w| w.transform.as_ref()) else {
        return Ok(Some(Transform2x2::identity()));
    };
    let p = |s: &String| An::parse(s).map_err(|e| SolveError::Parse(e.to_string()));
    Ok(Some(Transform2x2::new(p(&tr[0])?, p(&tr[1])?, p(&tr[2])?, p(&tr[3])?)))
}

/// Perfect matchings when every signature is a multiple of ExactOne (or every
/// one a multiple of AllButOne, which is the same count after flipping every
/// edge).
fn matching_eval(grid: &PlanarGrid) -> Result<Option<An>, SolveError> {
    let sigs = closed_symmetric(grid)?;
    let mut out = None;
    for all_but_one in [false, true] {
        let mut scalar = grid.scalar.clone();
        let mut ok = true;
        for f in &sigs {
            let n = f.arity();
            if n == 0 {
                scalar = &scalar * &f.entries[0];
                continue;
            }
            let base = if all_but_one { named::all_but_one(n) } else { named::exact_one(n) };
            let k = if all_but_one { n - 1 } else { 1 };
            let c = &f.entries[k];
            if c.is_zero() || f.entries.iter().zip(&base.entries).any(|(x, b)| *x != c * b) {
                ok = false;
                break;
            }
            scalar = &scalar * c;
        }
        if ok {
            let g = WeightedPlanarGraph::from_grid_structure(grid)?;
            out = Some(&scalar * &fkt_count_pm(&g)?);
            break;
        }
    }
    Ok(out)
}
