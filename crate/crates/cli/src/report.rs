//! Report structures. Each subcommand builds one of these and the chosen
//! output format renders it, so JSON and text always describe the same data.

use std::fmt::Write as _;

use lauricella::cartier::CartierManinMatrix;
use lauricella::curve::{CaseTag, CurveSpec, LocalData, PointIndex};
use lauricella::differentials::BasisReport;
use serde_json::{json, Value};

pub trait Report {
    fn to_json(&self) -> Value;
    fn to_text(&self) -> String;
}

fn case_name(c: CaseTag) -> &'static str {
    match c {
        CaseTag::Case1 => "Case1",
        CaseTag::Case2 => "Case2",
        CaseTag::Case3 => "Case3",
    }
}

fn curve_json(spec: &CurveSpec) -> Value {
    json!({
        "p": spec.p(),
        "N": spec.n(),
        "exponents": spec.exponents(),
        "lambdas": spec.lambdas().iter().map(|l| l.to_string()).collect::<Vec<_>>(),
        "equation": spec.equation(),
    })
}

pub struct InfoReport {
    pub spec: CurveSpec,
    pub local: Vec<LocalData>,
}

impl InfoReport {
    pub fn new(spec: CurveSpec) -> Self {
        let mut idx: Vec<PointIndex> = (0..=spec.r()).map(PointIndex::Finite).collect();
        idx.push(PointIndex::Infinity);
        let local = idx
            .into_iter()
            .filter_map(|i| spec.local_data(i).ok())
            .collect();
        InfoReport { spec, local }
    }
}

impl Report for InfoReport {
    fn to_json(&self) -> Value {
        let cd = self.spec.classify();
        let hgm = self.spec.hgm_params().ok().map(|h| {
            json!({
                "a": h.a.to_string(),
                "b": h.b.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                "c": h.c.to_string(),
            })
        });
        json!({
            "curve": curve_json(&self.spec),
            "irreducible": true,
            "case": case_name(cd.case),
            "A_inf": cd.a_inf,
            "singular_points": self.spec.singular_points().iter().map(|i| i.to_json()).collect::<Vec<_>>(),
            "local_data": self.local.iter().map(|d| json!({
                "index": d.index.to_json(),
                "g": d.g,
                "N_j": d.n_j,
                "A_prime": d.a_prime,
                "m": d.m,
                "n": d.n_bezout,
            })).collect::<Vec<_>>(),
            "genus": self.spec.genus(),
            "hgm_params": hgm,
        })
    }

    fn to_text(&self) -> String {
        let cd = self.spec.classify();
        let mut out = String::new();
        let _ = writeln!(
            out,
            "curve      {}  (p = {})",
            self.spec.equation(),
            self.spec.p()
        );
        let _ = writeln!(
            out,
            "case       {}, A_inf = {}",
            case_name(cd.case),
            cd.a_inf
        );
        let sing: Vec<String> = self
            .spec
            .singular_points()
            .iter()
            .map(|i| i.to_string())
            .collect();
        let _ = writeln!(out, "singular   {{{}}}", sing.join(", "));
        let _ = writeln!(out, "genus      {}", self.spec.genus());
        if let Ok(h) = self.spec.hgm_params() {
            let b: Vec<String> = h.b.iter().map(|x| x.to_string()).collect();
            let _ = writeln!(
                out,
                "hgm        a = {}, b = ({}), c = {}",
                h.a,
                b.join(", "),
                h.c
            );
        }
        let _ = writeln!(out, "local data");
        let _ = writeln!(
            out,
            "  {:>5} {:>4} {:>4} {:>4} {:>4} {:>4}",
            "j", "g", "N_j", "A'", "m", "n"
        );
        for d in &self.local {
            let _ = writeln!(
                out,
                "  {:>5} {:>4} {:>4} {:>4} {:>4} {:>4}",
                d.index.to_string(),
                d.g,
                d.n_j,
                d.a_prime,
                d.m,
                d.n_bezout
            );
        }
        out
    }
}

pub struct BasisOutput(pub BasisReport);

impl Report for BasisOutput {
    fn to_json(&self) -> Value {
        let mut v = self.0.to_json();
        for (block, json_block) in self.0.blocks.iter().zip(v["per_s"].as_array_mut().unwrap()) {
            for (form, jf) in block
                .forms
                .iter()
                .zip(json_block["forms"].as_array_mut().unwrap())
            {
                jf["text"] = json!(form.to_string());
            }
        }
        v
    }

    fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "model {}  total {}", self.0.model, self.0.total());
        for b in &self.0.blocks {
            let forms: Vec<String> = b.forms.iter().map(|f| f.to_string()).collect();
            let _ = write!(out, "s = {}  dim {}", b.s, b.dim());
            if let Some(x) = &b.x_data {
                let _ = write!(out, "  d = {}  e = {:?}", x.d, x.e);
            }
            let _ = writeln!(out);
            for f in forms {
                let _ = writeln!(out, "  {f}");
            }
        }
        out
    }
}

pub struct CartierOutput(pub CartierManinMatrix);

impl Report for CartierOutput {
    fn to_json(&self) -> Value {
        self.0.to_json()
    }

    fn to_text(&self) -> String {
        let m = &self.0;
        let mut out = String::new();
        let labels: Vec<String> = m
            .basis_labels
            .iter()
            .map(|(s, j)| format!("({s},{j})"))
            .collect();
        let _ = writeln!(
            out,
            "model {}  p = {}  basis {}",
            m.model,
            m.p,
            labels.join(" ")
        );
        let map: Vec<String> = m
            .character_map
            .iter()
            .map(|(s, t)| format!("{s}->{t}"))
            .collect();
        let _ = writeln!(out, "characters {}", map.join(", "));
        out.push_str(&m.to_string());
        let _ = writeln!(out, "note: {}", m.convention_note);
        out
    }
}

pub struct VerifyRow {
    pub s: u64,
    pub l: u64,
    pub j: u64,
    pub e: u64,
    pub direct: String,
    pub hgm: Result<String, String>,
}

impl VerifyRow {
    pub fn pass(&self) -> bool {
        matches!(&self.hgm, Ok(h) if *h == self.direct)
    }
}

pub struct VerifyReport {
    pub spec: CurveSpec,
    pub rows: Vec<VerifyRow>,
}

impl VerifyReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass())
    }
}

impl Report for VerifyReport {
    fn to_json(&self) -> Value {
        let passed = self.rows.iter().filter(|r| r.pass()).count();
        json!({
            "curve": curve_json(&self.spec),
            "results": self.rows.iter().map(|r| json!({
                "s": r.s, "l": r.l, "j": r.j, "e": r.e,
                "direct": r.direct,
                "hgm": match &r.hgm { Ok(h) => json!(h), Err(_) => Value::Null },
                "error": match &r.hgm { Err(e) => json!(e), Ok(_) => Value::Null },
                "status": if r.pass() { "PASS" } else { "FAIL" },
            })).collect::<Vec<_>>(),
            "passed": passed,
            "failed": self.rows.len() - passed,
            "all_pass": self.all_pass(),
        })
    }

    fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.rows {
            let hgm = match &r.hgm {
                Ok(h) => h.clone(),
                Err(e) => format!("error: {e}"),
            };
            let _ = writeln!(
                out,
                "{} s={} l={} j={} gamma_{{{},{}}}: direct = {} | hgm = {}",
                if r.pass() { "PASS" } else { "FAIL" },
                r.s,
                r.l,
                r.j,
                r.s,
                r.e,
                r.direct,
                hgm
            );
        }
        let passed = self.rows.iter().filter(|r| r.pass()).count();
        let _ = writeln!(out, "{passed}/{} passed", self.rows.len());
        out
    }
}

pub struct ScanPoint {
    pub values: Vec<(String, u64)>,
    pub rank: usize,
    pub is_zero: bool,
}

pub struct ScanReport {
    pub spec: CurveSpec,
    pub model: String,
    pub size: usize,
    pub points: Vec<ScanPoint>,
}

impl Report for ScanReport {
    fn to_json(&self) -> Value {
        let values = |p: &ScanPoint| {
            p.values
                .iter()
                .map(|(k, v)| (k.clone(), json!(v)))
                .collect::<serde_json::Map<_, _>>()
        };
        json!({
            "curve": curve_json(&self.spec),
            "model": self.model,
            "matrix_size": self.size,
            "points": self.points.iter().map(|p| json!({
                "values": values(p),
                "rank": p.rank,
                "zero": p.is_zero,
            })).collect::<Vec<_>>(),
            "zero_rank_locus": self.points.iter().filter(|p| p.rank == 0).map(values).collect::<Vec<_>>(),
            "count": self.points.len(),
        })
    }

    fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "model {}  matrix size {}  points {}",
            self.model,
            self.size,
            self.points.len()
        );
        for p in &self.points {
            let vals: Vec<String> = p.values.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let _ = writeln!(
                out,
                "{:<20} rank {}{}",
                vals.join(" "),
                p.rank,
                if p.rank == 0 { "  (zero)" } else { "" }
            );
        }
        out
    }
}
