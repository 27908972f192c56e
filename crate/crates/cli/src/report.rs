//! Serializable summaries of engine results and their text/CSV renderings.

use std::fmt::Write as _;

use hds_core::assembly::{ClassificationReport, ComponentMethod, VerifyMode};
use hds_core::extended::ExtendedReport;
use hds_core::search::ClassCatalog;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentSummary {
    pub classes: Vec<String>,
    pub size: usize,
    pub method: String,
    pub certified: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssembledSummary {
    pub components: Vec<ComponentSummary>,
    pub added: usize,
    pub total: u64,
    pub verified: bool,
    pub certified: bool,
    pub verify_mode: VerifyMode,
    pub pairs_checked: u128,
    pub sampled: bool,
    /// Pairs per squared distance, keyed by the distance.
    pub distances: Vec<(u64, u128)>,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifySummary {
    pub n: u32,
    pub m: u32,
    pub d: u32,
    pub hamming: u64,
    pub maximal: bool,
    pub classes: Vec<String>,
    pub cliques: Vec<Vec<String>>,
    pub assembled: Vec<AssembledSummary>,
    pub largest_total: u64,
}

fn method_name(m: &ComponentMethod) -> String {
    match m {
        ComponentMethod::Subset { certificate } => format!("{certificate:?}"),
        ComponentMethod::UnionClique { vertices, optimal } => {
            format!("union clique over {vertices} points{}", if *optimal { "" } else { " (not proven optimal)" })
        }
    }
}

impl From<&ClassificationReport> for ClassifySummary {
    fn from(r: &ClassificationReport) -> Self {
        let names = |v: &[hds_core::CandidateClass]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        Self {
            n: r.n,
            m: r.m,
            d: r.d,
            hamming: r.hamming,
            maximal: r.maximal,
            classes: names(&r.classes),
            cliques: r.cliques.iter().map(|c| names(c)).collect(),
            assembled: r
                .assembled
                .iter()
                .map(|a| AssembledSummary {
                    components: a
                        .components
                        .iter()
                        .map(|c| ComponentSummary {
                            classes: names(&c.classes),
                            size: c.size,
                            method: method_name(&c.method),
                            certified: c.is_certified(),
                        })
                        .collect(),
                    added: a.added,
                    total: a.total,
                    verified: a.verified,
                    certified: a.certified,
                    verify_mode: a.certificate.mode,
                    pairs_checked: a.certificate.pairs_checked,
                    sampled: a.certificate.sampled,
                    distances: a.certificate.distances.iter().map(|(&k, &v)| (k, v)).collect(),
                    witness: a.certificate.witness.as_ref().map(|w| w.to_string()),
                })
                .collect(),
            largest_total: r.largest_total,
        }
    }
}

impl ClassifySummary {
    pub fn all_verified(&self) -> bool {
        self.assembled.iter().all(|a| a.verified)
    }

    pub fn text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "H̃({},{}): d = {}, {} points", self.n, self.m, self.d, self.hamming);
        if self.maximal {
            let _ = writeln!(s, "H̃({},{}) is maximal", self.n, self.m);
            return s;
        }
        let _ = writeln!(s, "addable classes: {}", self.classes.len());
        for (clique, a) in self.cliques.iter().zip(&self.assembled) {
            let _ = writeln!(s, "clique {}", clique.join(" "));
            for c in &a.components {
                let _ = writeln!(s, "  {} -> {} points [{}]", c.classes.join(" ∪ "), c.size, c.method);
            }
            let _ = writeln!(
                s,
                "  total {} = {} + {}, {} ({:?}, {} pairs{})",
                a.total,
                self.hamming,
                a.added,
                if a.verified { "verified" } else { "VERIFICATION FAILED" },
                a.verify_mode,
                a.pairs_checked,
                if a.sampled { ", sampled" } else { "" }
            );
            if let Some(w) = &a.witness {
                let _ = writeln!(s, "  witness: {w}");
            }
        }
        let _ = writeln!(s, "largest total {}", self.largest_total);
        s
    }

    pub fn csv_row(&self) -> String {
        format!("{},{},{}", self.n, self.d, self.largest_total)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EnumerateSummary {
    pub n: u32,
    pub m: u32,
    pub maximal: bool,
    pub reduced: Vec<String>,
    /// Reduced classes up to block permutation, with orbit sizes.
    pub reduced_orbits: Vec<(String, usize)>,
    pub expandable: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expanded: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expanded_orbits: Option<Vec<(String, usize)>>,
}

impl EnumerateSummary {
    pub fn new(n: u32, m: u32, cat: &ClassCatalog, expanded: bool) -> Self {
        let names = |v: &[hds_core::CandidateClass]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        Self {
            n,
            m,
            maximal: cat.is_empty(),
            reduced: names(&cat.reduced),
            reduced_orbits: orbits(&cat.reduced),
            expandable: names(&cat.expandable()),
            expanded: expanded.then(|| names(&cat.expanded)),
            expanded_orbits: expanded.then(|| orbits(&cat.expanded)),
        }
    }

    pub fn text(&self) -> String {
        if self.maximal {
            return format!("H̃({},{}) is maximal\n", self.n, self.m);
        }
        let mut s = format!(
            "H̃({},{}): {} reduced addable classes up to block permutation ({} in all)\n",
            self.n,
            self.m,
            self.reduced_orbits.len(),
            self.reduced.len()
        );
        for (x, size) in &self.reduced_orbits {
            let mark = if self.expandable.contains(x) { "  (M < 2m)" } else { "" };
            let _ = writeln!(s, "  {x}  ×{size}{mark}");
        }
        if let Some(e) = &self.expanded_orbits {
            let _ = writeln!(s, "expanded classes: {} up to block permutation", e.len());
            for (x, size) in e {
                let _ = writeln!(s, "  {x}  ×{size}");
            }
        }
        s
    }

    pub fn csv(&self) -> String {
        let mut s = String::new();
        for x in &self.reduced {
            let _ = writeln!(s, "{},{},reduced,\"{x}\"", self.n, self.m);
        }
        for x in self.expanded.iter().flatten() {
            let _ = writeln!(s, "{},{},expanded,\"{x}\"", self.n, self.m);
        }
        s
    }
}

fn orbits(v: &[hds_core::CandidateClass]) -> Vec<(String, usize)> {
    let mut counts = std::collections::BTreeMap::new();
    for x in v {
        *counts.entry(x.orbit_key()).or_insert(0) += 1;
    }
    counts.into_iter().map(|(k, c)| (k.to_string(), c)).collect()
}

pub fn extended_text(r: &ExtendedReport) -> String {
    let mut s = format!("n = {}: {} admissible families, {} candidate points\n", r.n, r.candidates.len(), r.universe);
    for c in &r.candidates {
        let _ = writeln!(s, "  {c}: {} points", c.members.len());
    }
    let _ = writeln!(s, "maximal sets:");
    for set in &r.sets {
        let times = if set.count > 1 { format!(" ×{}", set.count) } else { String::new() };
        let _ = writeln!(s, "  {} [{} points]{times}", set.name, set.size);
    }
    s
}

pub fn extended_csv(r: &ExtendedReport) -> String {
    let mut s = String::from("n,set,size,count\n");
    for set in &r.sets {
        let _ = writeln!(s, "{},\"{}\",{},{}", r.n, set.name, set.size, set.count);
    }
    s
}
