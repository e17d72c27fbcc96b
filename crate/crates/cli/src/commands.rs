use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use pro2eq_core::cayley_oracle::{ball, ball_dot, estimate_ends, realize, sweep_tsv, OracleError};
use pro2eq_core::classifier::explain_steps;
use pro2eq_core::free_group::SubgroupGraph;
use pro2eq_core::group_expr::ExprError;
use pro2eq_core::towers::{
    mittag_leffler, pro_iso_telescopic, pro_trivial, telescopic_type, MlVerdict,
    ProTrivialVerdict, ProTrivialWitness, TowerError,
};
use pro2eq_core::{explain, normalize, parse_with, Annotations, Classifier, Engine, GroupExpr, Tower};

use crate::cache::Cache;
use crate::config::Config;
use crate::{CliError, Output};

/// Largest ball written as DOT.
const DOT_LIMIT: usize = 5_000;

pub struct Context {
    pub config: Config,
    pub annotations: Annotations,
    annotations_hash: String,
    pub classifier: Classifier,
    pub cache: Option<Cache>,
    pub explain: bool,
    pub json: bool,
}

impl Context {
    pub fn new(config: Config, explain: bool, json: bool) -> Result<Self, CliError> {
        config.validate()?;
        let annotations = match &config.annotations {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::io(format!("{}: {e}", p.display())))?;
                Annotations::parse(&text).map_err(CliError::input)?
            }
            None => Annotations::default(),
        };
        let annotations_hash = hex::encode(Sha256::digest(annotations.to_text().as_bytes()));
        let classifier = Classifier::new(Engine::new(annotations.clone(), config.strict_paper));
        let cache = config.cache.as_deref().map(Cache::new);
        Ok(Context {
            config,
            annotations,
            annotations_hash,
            classifier,
            cache,
            explain,
            json,
        })
    }

    fn engine(&self) -> &Engine {
        self.classifier.engine()
    }

    pub fn parse(&self, text: &str) -> Result<GroupExpr, CliError> {
        let e = parse_with(text, &self.annotations).map_err(CliError::input)?;
        self.engine()
            .validate(&e)
            .map_err(|err| CliError::input(ExprError::Semantic(err.to_string())))?;
        Ok(normalize(&e))
    }

    fn render(&self, value: &impl Serialize) -> String {
        let mut s = if self.json {
            serde_json::to_string(value)
        } else {
            serde_json::to_string_pretty(value)
        }
        .expect("results serialize");
        s.push('\n');
        s
    }

    /// Human text is dropped in `--json` mode.
    fn human(&self, text: String) -> String {
        if self.json {
            String::new()
        } else {
            text
        }
    }

    /// Runs `f` unless an entry for `parts` is cached.
    fn cached(
        &self,
        parts: &[&str],
        f: impl FnOnce() -> Result<Output, CliError>,
    ) -> Result<Output, CliError> {
        let Some(cache) = &self.cache else {
            return f();
        };
        let strict = self.config.strict_paper.to_string();
        let explain = self.explain.to_string();
        let json = self.json.to_string();
        let mut all = vec![strict.as_str(), explain.as_str(), json.as_str(), self.annotations_hash.as_str()];
        all.extend_from_slice(parts);
        let key = Cache::key(&all);
        if let Some(hit) = cache.get(&key) {
            return Ok(hit);
        }
        let out = f()?;
        cache.put(&key, &out)?;
        Ok(out)
    }

    pub fn classify(&self, text: &str) -> Result<Output, CliError> {
        let e = self.parse(text)?;
        self.cached(&["classify", &e.to_string()], || {
            let c = self.classifier.classify(&e);
            let mut human = format!("{}\n", c.label);
            for r in &c.reasons {
                writeln!(human, "  blocked: {r}").unwrap();
            }
            if self.explain {
                human.push_str(&explain_steps(&c.derivation));
            }
            Ok(Output {
                stdout: self.render(&*c),
                stderr: self.human(human),
                code: if c.label.is_determined() { 0 } else { 2 },
            })
        })
    }

    pub fn compare(&self, a: &str, b: &str) -> Result<Output, CliError> {
        let (a, b) = (self.parse(a)?, self.parse(b)?);
        self.cached(&["compare", &a.to_string(), &b.to_string()], || {
            let v = self.classifier.compare(&a, &b);
            let human = if self.explain {
                explain(&v)
            } else {
                explain(&v).lines().next().unwrap_or_default().to_string() + "\n"
            };
            Ok(Output {
                stdout: self.render(&v),
                stderr: self.human(human),
                code: v.verdict.exit_code(),
            })
        })
    }

    pub fn invariants(&self, text: &str) -> Result<Output, CliError> {
        let e = self.parse(text)?;
        self.cached(&["invariants", &e.to_string()], || {
            let r = self.engine().report(&e);
            let mut human = format!(
                "ends {}, semistable {}, proType {}, pNumber {}, h2rank {}\n",
                r.ends, r.semistable, r.pro_type, r.p_number, r.h2rank
            );
            if self.explain {
                for t in &r.trace {
                    writeln!(human, "  [{}] {}", t.rule, t.fact).unwrap();
                }
            }
            Ok(Output {
                stdout: self.render(&*r),
                stderr: self.human(human),
                code: 0,
            })
        })
    }

    pub fn ends(
        &self,
        text: &str,
        k: usize,
        radius: usize,
        tsv: Option<&Path>,
        dot: Option<&Path>,
    ) -> Result<Output, CliError> {
        let e = self.parse(text)?;
        let g = realize(&e, &self.annotations).map_err(CliError::oracle)?;
        let (budget, margin) = (self.config.budget, self.config.margin);
        let est = estimate_ends(&g, k, radius, budget, margin).map_err(CliError::oracle)?;
        let table = sweep_tsv(&est);
        if let Some(p) = tsv {
            write_file(p, &table)?;
        }
        if let Some(p) = dot {
            let b = ball(&g, radius, budget.min(DOT_LIMIT)).map_err(|err| match err {
                OracleError::BudgetExceeded { .. } => CliError::config(format!(
                    "DOT export is limited to {DOT_LIMIT} elements; lower --R"
                )),
                other => CliError::oracle(other),
            })?;
            write_file(p, &ball_dot(&b))?;
        }
        let value = json!({
            "expr": e.to_string(),
            "k": k,
            "verdict": est.verdict,
            "engine": self.engine().ends(&e),
            "radius": est.radius,
            "ball_size": est.ball_size,
            "sweep": est.sweep,
        });
        Ok(Output {
            stdout: self.render(&value),
            stderr: self.human(format!("{}\n{table}", est.verdict)),
            code: 0,
        })
    }

    pub fn tower_ml(&self, path: &Path) -> Result<Output, CliError> {
        let t = read_tower(path)?;
        let v = mittag_leffler(&t, self.config.depth).map_err(CliError::tower)?;
        let (value, human, code) = match &v {
            MlVerdict::HoldsStable {
                stable_from,
                stable_ranks,
            } => (
                json!({"verdict": v.label(), "stable_from": stable_from, "stable_ranks": stable_ranks}),
                format!("{} (stable ranks {stable_ranks:?})", v.label()),
                0,
            ),
            MlVerdict::Fails { stage, chain } => (
                json!({"verdict": v.label(), "stage": stage, "chain": chain.iter().map(basis).collect::<Vec<_>>()}),
                format!("{}(stage {stage})", v.label()),
                0,
            ),
            MlVerdict::Inconclusive { stages } => (
                json!({"verdict": v.label(), "stages": stages}),
                format!("{} at stages {stages:?}", v.label()),
                2,
            ),
        };
        Ok(Output {
            stdout: self.render(&value),
            stderr: self.human(human + "\n"),
            code,
        })
    }

    pub fn tower_protrivial(&self, path: &Path) -> Result<Output, CliError> {
        let t = read_tower(path)?;
        let v = pro_trivial(&t, self.config.depth).map_err(CliError::tower)?;
        let (value, code) = match &v {
            ProTrivialVerdict::Yes { lags } => (json!({"verdict": v.label(), "lags": lags}), 0),
            ProTrivialVerdict::No { stage, witness } => {
                let witness = match witness {
                    ProTrivialWitness::StableElement(w) => json!({"stable_element": w.to_string()}),
                    ProTrivialWitness::DescendingChain(c) => {
                        json!({"descending_chain": c.iter().map(basis).collect::<Vec<_>>()})
                    }
                };
                (json!({"verdict": v.label(), "stage": stage, "witness": witness}), 0)
            }
            ProTrivialVerdict::Inconclusive { stages } => {
                (json!({"verdict": v.label(), "stages": stages}), 2)
            }
        };
        Ok(Output {
            stdout: self.render(&value),
            stderr: self.human(format!("{}\n", v.label())),
            code,
        })
    }

    pub fn tower_type(&self, path: &Path) -> Result<Output, CliError> {
        let t = read_tower(path)?;
        let ty = telescopic_type(&t).map_err(CliError::tower)?;
        Ok(Output {
            stdout: self.render(&json!({ "proType": ty })),
            stderr: self.human(format!("{ty}\n")),
            code: 0,
        })
    }

    pub fn tower_proiso(&self, a: &Path, b: &Path) -> Result<Output, CliError> {
        let (ta, tb) = (read_tower(a)?, read_tower(b)?);
        let iso = pro_iso_telescopic(&ta, &tb).map_err(CliError::tower)?;
        let label = if iso { "PRO_ISOMORPHIC" } else { "NOT_PRO_ISOMORPHIC" };
        Ok(Output {
            stdout: self.render(&json!({ "proIso": iso })),
            stderr: self.human(format!("{label}\n")),
            code: if iso { 0 } else { 1 },
        })
    }

    /// Runs `f` on every non-empty, non-comment line of `path` in parallel.
    /// Output is a JSON array in input order; the exit code is the largest
    /// per-entry code.
    pub fn batch(
        &self,
        path: &Path,
        f: impl Fn(&Context, &str) -> Result<Output, CliError> + Sync,
    ) -> Result<Output, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
        let lines: Vec<(usize, &str)> = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
            .collect();
        let results: Vec<Result<Output, CliError>> =
            lines.par_iter().map(|(_, l)| f(self, l)).collect();
        let mut values = Vec::new();
        let (mut stderr, mut code) = (String::new(), 0);
        for ((line, _), r) in lines.iter().zip(results) {
            let out = r.map_err(|e| CliError {
                code: e.code,
                message: format!("{}:{line}: {}", path.display(), e.message),
            })?;
            values.push(serde_json::from_str::<Value>(&out.stdout).expect("entries render JSON"));
            stderr.push_str(&out.stderr);
            code = code.max(out.code);
        }
        Ok(Output {
            stdout: self.render(&values),
            stderr,
            code,
        })
    }
}

fn basis(g: &SubgroupGraph) -> Vec<String> {
    g.basis().iter().map(ToString::to_string).collect()
}

fn read_tower(path: &Path) -> Result<Tower, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
    Tower::parse(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::io(format!("{}: {e}", path.display())))
}

/// Splits a batch line `A | B` for `compare`.
pub fn split_pair(line: &str) -> Result<(&str, &str), CliError> {
    line.split_once('|')
        .map(|(a, b)| (a.trim(), b.trim()))
        .ok_or_else(|| CliError::input("expected `A | B`"))
}

impl CliError {
    fn tower(e: TowerError) -> Self {
        match e {
            TowerError::WindowExhausted { .. } => CliError::limit(e),
            other => CliError::input(other),
        }
    }

    fn oracle(e: OracleError) -> Self {
        match e {
            OracleError::BudgetExceeded { .. } => CliError::limit(e),
            other => CliError::input(other),
        }
    }
}
