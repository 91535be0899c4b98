//! JSON shapes for everything that crosses the command line. Nodes and
//! priorities are 1-based; automaton states are 0-based.

use std::collections::BTreeMap;

use anyhow::{bail, ensure, Context, Result};
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use seplab_core::comm::{Box as CoverBox, CoverCertificate, DisjPrimeInstance};
use seplab_core::extremal::SetFamily;
use seplab_core::fooling::{DisjointTuple, FoolingCertificate, FoolingPair};
use seplab_core::separation::{Counterexample, FailureReason, ParityArena, Player};
use seplab_core::{GameGraph, Letter, SafetyAutomaton, Subset, Word};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDto {
    pub n: usize,
    pub d: u32,
    pub edges: Vec<[u32; 3]>,
}

impl From<&GameGraph> for GraphDto {
    fn from(g: &GameGraph) -> Self {
        GraphDto { n: g.n(), d: g.d(), edges: g.edges().map(|(u, v, p)| [u, v, p]).collect() }
    }
}

impl GraphDto {
    pub fn to_graph(&self) -> Result<GameGraph> {
        Ok(GameGraph::new(self.n, self.d, self.edges.iter().map(|e| (e[0], e[1], e[2])))?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AutomatonDto {
    pub n: u32,
    pub d: u32,
    pub states: u32,
    pub start: u32,
    pub accept: u32,
    /// `[state, node, priority, target]`; rows of the accepting state may be
    /// omitted and default to the accepting state.
    pub delta: Vec<[u32; 4]>,
}

impl From<&SafetyAutomaton> for AutomatonDto {
    fn from(a: &SafetyAutomaton) -> Self {
        AutomatonDto {
            n: a.n(),
            d: a.d(),
            states: a.states(),
            start: a.start(),
            accept: a.accept(),
            delta: a.transitions().map(|(q, v, p, r)| [q, v, p, r]).collect(),
        }
    }
}

impl AutomatonDto {
    pub fn to_automaton(&self) -> Result<SafetyAutomaton> {
        let mut table = BTreeMap::new();
        for &[q, v, p, r] in &self.delta {
            ensure!(table.insert((q, v, p), r).is_none(), "transition ({q}, ({v},{p})) listed twice");
        }
        let mut missing = None;
        let a = SafetyAutomaton::from_fn(self.n, self.d, self.states, self.start, self.accept, |q, l| {
            match table.remove(&(q, l.node, l.priority)) {
                Some(r) => r,
                None if q == self.accept => q,
                None => {
                    missing.get_or_insert((q, l));
                    q
                }
            }
        })?;
        if let Some((q, l)) = missing {
            bail!("no transition for state {q} on {l:?}");
        }
        if let Some(((q, v, p), _)) = table.into_iter().next() {
            bail!("transition ({q}, ({v},{p})) is outside the automaton");
        }
        ensure!(a.is_absorbing(), "the accepting state {} is not absorbing", self.accept);
        Ok(a)
    }
}

pub fn word_dto(w: &Word) -> Vec<[u32; 2]> {
    w.iter().map(|l| [l.node, l.priority]).collect()
}

pub fn word_from(letters: &[[u32; 2]]) -> Word {
    letters.iter().map(|l| Letter::new(l[0], l[1])).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CounterexampleDto {
    pub reason: String,
    pub graph: GraphDto,
    pub word: Vec<[u32; 2]>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub loop_start: Option<usize>,
}

impl From<&Counterexample> for CounterexampleDto {
    fn from(c: &Counterexample) -> Self {
        CounterexampleDto {
            reason: c.reason.as_str().to_string(),
            graph: (&c.graph).into(),
            word: word_dto(&c.word),
            loop_start: c.loop_start,
        }
    }
}

impl CounterexampleDto {
    pub fn to_counterexample(&self) -> Result<Counterexample> {
        let reason = [FailureReason::OddAccepted, FailureReason::EvenNotAcceptedByT, FailureReason::EvenNeverAccepted]
            .into_iter()
            .find(|r| r.as_str() == self.reason)
            .with_context(|| format!("unknown failure reason {:?}", self.reason))?;
        Ok(Counterexample { graph: self.graph.to_graph()?, word: word_from(&self.word), reason, loop_start: self.loop_start })
    }
}

/// Owners are `0` (Even) and `1` (Odd).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArenaDto {
    pub n: usize,
    pub d: u32,
    pub edges: Vec<[u32; 3]>,
    pub owner: Vec<u8>,
    pub initial: u32,
}

impl ArenaDto {
    pub fn to_arena(&self) -> Result<ParityArena> {
        let graph = GraphDto { n: self.n, d: self.d, edges: self.edges.clone() }.to_graph()?;
        let owner = self
            .owner
            .iter()
            .map(|&o| match o {
                0 => Ok(Player::Even),
                1 => Ok(Player::Odd),
                _ => bail!("owner {o} is neither 0 nor 1"),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ParityArena::new(graph, owner, self.initial)?)
    }
}

pub fn player_name(p: Player) -> &'static str {
    match p {
        Player::Even => "even",
        Player::Odd => "odd",
    }
}

pub fn subset_dto(x: Subset) -> Vec<u32> {
    x.iter().collect()
}

pub fn subset_from(xs: &[u32]) -> Result<Subset> {
    Ok(Subset::from_elements(xs.iter().copied())?)
}

/// Sorted list of sorted lists.
pub fn family_dto(f: &SetFamily) -> Vec<Vec<u32>> {
    f.iter().map(subset_dto).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyDto {
    pub n: u32,
    pub a: u32,
    pub members: Vec<Vec<u32>>,
}

impl From<&SetFamily> for FamilyDto {
    fn from(f: &SetFamily) -> Self {
        FamilyDto { n: f.n(), a: f.a(), members: family_dto(f) }
    }
}

impl FamilyDto {
    pub fn to_family(&self) -> Result<SetFamily> {
        let members = self.members.iter().map(|m| subset_from(m)).collect::<Result<Vec<_>>>()?;
        Ok(SetFamily::new(self.n, self.a, members)?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoolingCertificateDto {
    pub n: u64,
    pub t: u64,
    pub xbar: Vec<Vec<u32>>,
    pub fs: Vec<Vec<[u32; 2]>>,
    pub gs: Vec<Vec<[u32; 2]>>,
}

impl From<&FoolingCertificate> for FoolingCertificateDto {
    fn from(c: &FoolingCertificate) -> Self {
        FoolingCertificateDto {
            n: c.n,
            t: c.t,
            xbar: c.xbar.sets().iter().map(|&s| subset_dto(s)).collect(),
            fs: c.fs.iter().map(word_dto).collect(),
            gs: c.gs.iter().map(word_dto).collect(),
        }
    }
}

impl FoolingCertificateDto {
    pub fn to_certificate(&self) -> Result<FoolingCertificate> {
        let sets = self.xbar.iter().map(|s| subset_from(s)).collect::<Result<Vec<_>>>()?;
        Ok(FoolingCertificate {
            n: self.n,
            t: self.t,
            xbar: DisjointTuple::new(sets)?,
            fs: self.fs.iter().map(|w| word_from(w)).collect(),
            gs: self.gs.iter().map(|w| word_from(w)).collect(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoolingPairDto {
    pub t: u32,
    pub f: Vec<[u32; 2]>,
    pub g: Vec<[u32; 2]>,
    pub state: u32,
    pub odd_graph: GraphDto,
    pub even_graph: GraphDto,
}

impl FoolingPairDto {
    pub fn new(p: &FoolingPair, t: u32) -> Self {
        FoolingPairDto {
            t,
            f: word_dto(&p.f),
            g: word_dto(&p.g),
            state: p.state,
            odd_graph: (&p.odd_graph).into(),
            even_graph: (&p.even_graph).into(),
        }
    }

    pub fn to_pair(&self) -> Result<FoolingPair> {
        Ok(FoolingPair {
            f: word_from(&self.f),
            g: word_from(&self.g),
            state: self.state,
            odd_graph: self.odd_graph.to_graph()?,
            even_graph: self.even_graph.to_graph()?,
        })
    }
}

/// Either kind of fooling evidence, told apart by its fields.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FoolingDto {
    Structured(FoolingCertificateDto),
    Pair(FoolingPairDto),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverDto {
    pub n: u32,
    pub k: u32,
    /// `"p/q"`.
    pub gamma: String,
    /// Each box is a list of `k` families, each a list of sets.
    pub boxes: Vec<Vec<Vec<Vec<u32>>>>,
}

pub fn parse_gamma(s: &str) -> Result<Ratio<u64>> {
    s.trim().parse::<Ratio<u64>>().map_err(|e| anyhow::anyhow!("cannot read gamma {s:?}: {e}"))
}

impl From<&CoverCertificate> for CoverDto {
    fn from(c: &CoverCertificate) -> Self {
        CoverDto {
            n: c.instance.n,
            k: c.instance.k,
            gamma: c.instance.gamma.to_string(),
            boxes: c.boxes.iter().map(|b| b.factors.iter().map(family_dto).collect()).collect(),
        }
    }
}

impl CoverDto {
    pub fn to_certificate(&self) -> Result<CoverCertificate> {
        let instance = DisjPrimeInstance::new(self.n, self.k, parse_gamma(&self.gamma)?)?;
        let a = instance.a();
        let boxes = self
            .boxes
            .iter()
            .map(|b| {
                let factors = b
                    .iter()
                    .map(|f| FamilyDto { n: self.n, a, members: f.clone() }.to_family())
                    .collect::<Result<Vec<_>>>()?;
                Ok(CoverBox { factors })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CoverCertificate { instance, boxes })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use seplab_core::automaton::counter_separator;

    #[test]
    fn automaton_round_trip() {
        let a = counter_separator(2).unwrap();
        let dto = AutomatonDto::from(&a);
        let text = serde_json::to_string(&dto).unwrap();
        let back: AutomatonDto = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_automaton().unwrap(), a);
    }

    #[test]
    fn accept_rows_may_be_omitted_but_not_broken() {
        let mut dto = AutomatonDto::from(&counter_separator(1).unwrap());
        dto.delta.retain(|r| r[0] != dto.accept);
        assert!(dto.to_automaton().is_ok());
        dto.delta.push([dto.accept, 1, 1, 0]);
        assert!(dto.to_automaton().is_err());
        dto.delta.pop();
        dto.delta.remove(0);
        assert!(dto.to_automaton().is_err());
    }

    #[test]
    fn gamma_parses_as_ratio() {
        assert_eq!(parse_gamma("1/2").unwrap(), Ratio::new(1, 2));
        assert!(parse_gamma("half").is_err());
    }
}
