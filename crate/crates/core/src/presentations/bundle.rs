//! On-disk bundles: `manifest.json` plus one JSON file per automaton.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::Presentation;
use crate::automata::{Alphabet, Dfa, Symbol};
use crate::error::{Error, Result};
use crate::relations::RelationAutomaton;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Manifest {
    pub name: String,
    #[serde(default)]
    pub p: Option<u32>,
    pub base_alphabet: usize,
    #[serde(default)]
    pub labels: Vec<String>,
    /// Symbol codes of the neutral element's word.
    pub neutral_word: Vec<Symbol>,
    pub neutral_text: String,
    pub domain: String,
    pub relations: BTreeMap<String, String>,
    #[serde(default)]
    pub equality: Option<String>,
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, format!("{text}\n"))?;
    Ok(())
}

pub fn save_bundle(pres: &Presentation, dir: &Path) -> Result<Manifest> {
    fs::create_dir_all(dir)?;
    let mut relations = BTreeMap::new();
    for (name, rel) in pres.relations() {
        let file = format!("rel_{name}.json");
        write(&dir.join(&file), &rel.to_json())?;
        relations.insert(name.clone(), file);
    }
    write(&dir.join("domain.json"), &pres.domain().to_json())?;
    let equality = match pres.equality() {
        Some(eq) => {
            write(&dir.join("equality.json"), &eq.to_json())?;
            Some("equality.json".to_string())
        }
        None => None,
    };
    let manifest = Manifest {
        name: pres.name().to_string(),
        p: pres.p(),
        base_alphabet: pres.base().size(),
        labels: pres.base().labels().map(|l| l.to_vec()).unwrap_or_default(),
        neutral_word: pres.neutral().to_vec(),
        neutral_text: pres.format_word(pres.neutral()),
        domain: "domain.json".into(),
        relations,
        equality,
        metadata: pres.metadata().clone(),
    };
    write(&dir.join("manifest.json"), &serde_json::to_string_pretty(&manifest)?)?;
    Ok(manifest)
}

pub fn load_bundle(dir: &Path) -> Result<Presentation> {
    let manifest: Manifest = serde_json::from_str(&fs::read_to_string(dir.join("manifest.json"))?)?;
    let base = if manifest.labels.is_empty() {
        Alphabet::new(manifest.base_alphabet)?
    } else {
        Alphabet::with_labels(manifest.labels.clone())?
    };
    if base.size() != manifest.base_alphabet {
        return Err(Error::Io("label count differs from baseAlphabet".into()));
    }
    let domain = Dfa::from_json(&fs::read_to_string(dir.join(&manifest.domain))?)?;
    if domain.alphabet().size() != base.size() {
        return Err(Error::AlphabetMismatch { left: domain.alphabet().size(), right: base.size() });
    }
    let mut pres = Presentation::new(&manifest.name, base.clone(), domain, manifest.neutral_word.clone())?;
    if let Some(p) = manifest.p {
        pres = pres.with_p(p);
    }
    for (k, v) in &manifest.metadata {
        pres = pres.with_metadata(k, v);
    }
    for (name, file) in &manifest.relations {
        let rel = RelationAutomaton::from_json(&fs::read_to_string(dir.join(file))?, &base)?;
        pres.insert_relation(name, rel)?;
    }
    if let Some(file) = &manifest.equality {
        pres = pres.with_equality(RelationAutomaton::from_json(&fs::read_to_string(dir.join(file))?, &base)?)?;
    }
    Ok(pres)
}
