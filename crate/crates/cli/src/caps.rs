//! Cap overrides from `SEPLAB_CAPS` and `--cap`, both as `name=value` lists.

use anyhow::{bail, Context, Result};
use seplab_core::Caps;

pub const ENV: &str = "SEPLAB_CAPS";

pub const NAMES: [&str; 10] = [
    "graph_nodes",
    "priorities",
    "automaton_states",
    "alphabet",
    "family_members",
    "a_members",
    "tuple_space",
    "cover_tuples",
    "strategies",
    "scan_steps",
];

pub fn apply(caps: &mut Caps, list: &str) -> Result<()> {
    for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (name, value) = item.split_once('=').with_context(|| format!("cap {item:?} is not name=value"))?;
        let value: u128 = value.trim().parse().with_context(|| format!("cap {name} needs an integer"))?;
        let small = || usize::try_from(value).with_context(|| format!("cap {name} is too large"));
        match name.trim() {
            "graph_nodes" => caps.graph_nodes = small()?,
            "priorities" => caps.priorities = u32::try_from(value).context("cap priorities is too large")?,
            "automaton_states" => caps.automaton_states = small()?,
            "alphabet" => caps.alphabet = small()?,
            "family_members" => caps.family_members = small()?,
            "a_members" => caps.a_members = small()?,
            "tuple_space" => caps.tuple_space = value,
            "cover_tuples" => caps.cover_tuples = small()?,
            "strategies" => caps.strategies = value,
            "scan_steps" => caps.scan_steps = value,
            other => bail!("unknown cap {other:?}; known caps: {}", NAMES.join(", ")),
        }
    }
    Ok(())
}

/// Defaults, then the environment, then each flag in order.
pub fn resolve(env: Option<&str>, flags: &[String]) -> Result<Caps> {
    let mut caps = Caps::default();
    if let Some(list) = env {
        apply(&mut caps, list).with_context(|| format!("in {ENV}"))?;
    }
    for f in flags {
        apply(&mut caps, f)?;
    }
    Ok(caps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_environment() {
        let caps = resolve(Some("graph_nodes=5, priorities=3"), &["graph_nodes=6".into()]).unwrap();
        assert_eq!((caps.graph_nodes, caps.priorities), (6, 3));
        assert!(resolve(Some("nodes=5"), &[]).is_err());
        assert!(resolve(None, &["scan_steps".into()]).is_err());
    }
}
