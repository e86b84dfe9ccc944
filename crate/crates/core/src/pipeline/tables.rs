//! Tables of embeddings, induced chambers and walls, as JSON and aligned CSV.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::bundle::ClassBundle;
use crate::chamber::chamber_isomorphic;
use crate::error::Result;
use crate::genus::ClassList;
use crate::serial;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table1Row {
    pub label: String,
    pub rt: String,
    pub m4: u64,
    pub og: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table2Row {
    pub label: String,
    pub walls: usize,
    #[serde(rename = "gD")]
    pub gd: u64,
    /// Orbit sizes, descending.
    pub orb: Vec<usize>,
    /// Labels of the other classes with isomorphic chambers.
    pub isom: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table3Row {
    pub label: String,
    pub d_w: u64,
    pub n_w: String,
    pub a_r: String,
    #[serde(rename = "Sigma")]
    pub sigma: String,
    pub numb: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tables {
    pub table1: Vec<Table1Row>,
    pub table2: Vec<Table2Row>,
    pub table3: Vec<Table3Row>,
}

/// Builds the three tables. `labels[i]` is the label of class `i`; bundles carry their labels.
pub fn build_tables(list: &ClassList, labels: &[String], bundles: &[ClassBundle]) -> Result<Tables> {
    let mut order: Vec<usize> = (0..list.classes.len()).collect();
    order.sort_by(|&a, &b| label_key(&labels[a]).cmp(&label_key(&labels[b])));
    let table1 = order
        .iter()
        .map(|&i| {
            let c = &list.classes[i];
            Table1Row { label: labels[i].clone(), rt: rt_string(&c.fingerprint.root_type.to_string()), m4: c.fingerprint.m4(), og: c.aut_order.to_string() }
        })
        .collect();
    let mut sorted: Vec<&ClassBundle> = bundles.iter().collect();
    sorted.sort_by(|a, b| label_key(&a.label).cmp(&label_key(&b.label)));
    let mut table2 = Vec::new();
    for b in &sorted {
        let mut isom = Vec::new();
        for o in &sorted {
            if o.label == b.label || o.chamber.walls.len() != b.chamber.walls.len() || o.group.order != b.group.order {
                continue;
            }
            if chamber_isomorphic(&b.chamber, &o.chamber)?.is_some() {
                isom.push(o.label.clone());
            }
        }
        table2.push(Table2Row { label: b.label.clone(), walls: b.chamber.walls.len(), gd: b.group.order, orb: b.group.orbit_sizes(), isom });
    }
    let mut table3 = Vec::new();
    for b in &sorted {
        let mut orbits: Vec<&Vec<usize>> = b.group.orbits.iter().collect();
        orbits.sort_by_key(|o| std::cmp::Reverse(o.len()));
        for o in orbits {
            let rec = &b.walls[o[0]];
            table3.push(Table3Row {
                label: b.label.clone(),
                d_w: rec.d_w,
                n_w: serial::format_rat(&rec.n_w),
                a_r: serial::format_rat(&rec.a_r),
                sigma: rt_string(&rec.sigma_type),
                numb: o.len(),
            });
        }
    }
    Ok(Tables { table1, table2, table3 })
}

fn rt_string(s: &str) -> String {
    if s.is_empty() {
        "0".into()
    } else {
        s.to_string()
    }
}

/// Sort key: wall count, then letter; `infty` last.
pub fn label_key(label: &str) -> (u64, String) {
    let digits: String = label.chars().take_while(|c| c.is_ascii_digit()).collect();
    match digits.parse() {
        Ok(n) => (n, label[digits.len()..].to_string()),
        Err(_) => (u64::MAX, label.to_string()),
    }
}

fn aligned_csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut width: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, c) in width.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: Vec<String>| -> String {
        let n = cells.len();
        let mut s = String::new();
        for (i, (c, w)) in cells.into_iter().zip(&width).enumerate() {
            if i + 1 < n {
                s.push_str(&format!("{:<w$}, ", c, w = *w));
            } else {
                s.push_str(&c);
            }
        }
        s.push('\n');
        s
    };
    let mut out = line(header.iter().map(|h| h.to_string()).collect());
    for r in rows {
        out.push_str(&line(r.clone()));
    }
    out
}

impl Tables {
    pub fn table1_csv(&self) -> String {
        let rows: Vec<Vec<String>> = self.table1.iter().map(|r| vec![r.label.clone(), r.rt.clone(), r.m4.to_string(), r.og.clone()]).collect();
        aligned_csv(&["label", "rt", "m4", "og"], &rows)
    }

    pub fn table2_csv(&self) -> String {
        let rows: Vec<Vec<String>> = self
            .table2
            .iter()
            .map(|r| {
                let orb: Vec<String> = r.orb.iter().map(|x| x.to_string()).collect();
                vec![r.label.clone(), r.walls.to_string(), r.gd.to_string(), orb.join("+"), r.isom.join(" ")]
            })
            .collect();
        aligned_csv(&["label", "walls", "gD", "orb", "isom"], &rows)
    }

    pub fn table3_csv(&self) -> String {
        let rows: Vec<Vec<String>> = self
            .table3
            .iter()
            .map(|r| vec![r.label.clone(), r.d_w.to_string(), r.n_w.clone(), r.a_r.clone(), r.sigma.clone(), r.numb.to_string()])
            .collect();
        aligned_csv(&["label", "d_w", "n_w", "a_r", "Sigma", "numb"], &rows)
    }

    /// Writes `table{1,2,3}.{json,csv}` and returns the paths.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let files = [
            ("table1.json", serde_json::to_string_pretty(&self.table1)?),
            ("table2.json", serde_json::to_string_pretty(&self.table2)?),
            ("table3.json", serde_json::to_string_pretty(&self.table3)?),
            ("table1.csv", self.table1_csv()),
            ("table2.csv", self.table2_csv()),
            ("table3.csv", self.table3_csv()),
        ];
        let mut out = Vec::new();
        for (name, body) in files {
            let p = dir.join(name);
            fs::write(&p, body)?;
            out.push(p);
        }
        Ok(out)
    }

    pub fn read(dir: &Path) -> Result<Self> {
        Ok(Tables {
            table1: serde_json::from_slice(&fs::read(dir.join("table1.json"))?)?,
            table2: serde_json::from_slice(&fs::read(dir.join("table2.json"))?)?,
            table3: serde_json::from_slice(&fs::read(dir.join("table3.json"))?)?,
        })
    }
}
