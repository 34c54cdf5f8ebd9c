//! Semantic checks run between parsing and execution.

use std::collections::{BTreeMap, HashMap, HashSet};

use super::ast::*;
use super::diagnostic::Diagnostic;
use crate::sim::Gate;
use crate::transforms::TransformKind;

/// Names with a fixed meaning that definitions may not reuse.
const BUILTINS: [&str; 5] = ["measure", "expval", "probs", "state", "pi"];

/// Names bound in every scope.
pub const CONSTANTS: [(&str, f64); 1] = [("pi", std::f64::consts::PI)];

/// Runs every semantic rule over `ast`. An empty result (or warnings only)
/// means the program is executable.
pub fn check(ast: &Ast) -> Vec<Diagnostic> {
    let mut checker = Checker::new(ast);
    checker.run(ast);
    let mut diags = checker.diags;
    diags.sort_by_key(|d| (d.line, d.col));
    diags
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum DefKind {
    Qnode,
    Fn,
}

struct Def {
    kind: DefKind,
    params: usize,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Context {
    Qnode,
    Fn,
}

struct Checker {
    defs: HashMap<String, Def>,
    /// caller → [(callee, call-site position)], subroutine calls only
    calls: BTreeMap<String, Vec<(String, Pos)>>,
    diags: Vec<Diagnostic>,
    scopes: Vec<HashSet<String>>,
}

impl Checker {
    fn new(ast: &Ast) -> Self {
        let mut diags = Vec::new();
        let mut defs = HashMap::new();
        for item in &ast.items {
            let (kind, name, params) = match item {
                Item::Qnode(q) => (DefKind::Qnode, &q.name, &q.params),
                Item::Fn(f) => (DefKind::Fn, &f.name, &f.params),
                Item::Call(_) => continue,
            };
            if Gate::from_name(&name.name).is_some() {
                diags.push(Diagnostic::semantic(
                    name.span.start,
                    format!("'{}' is a gate and cannot be redefined", name.name),
                ));
            } else if BUILTINS.contains(&name.name.as_str()) {
                diags.push(Diagnostic::semantic(
                    name.span.start,
                    format!("'{}' is a built-in name and cannot be redefined", name.name),
                ));
            }
            for (i, p) in params.iter().enumerate() {
                if params[..i].iter().any(|q| q.name == p.name) {
                    diags.push(Diagnostic::semantic(
                        p.span.start,
                        format!("duplicate parameter '{}'", p.name),
                    ));
                }
            }
            if defs.contains_key(&name.name) {
                diags.push(Diagnostic::semantic(
                    name.span.start,
                    format!("duplicate definition of '{}'", name.name),
                ));
                continue;
            }
            defs.insert(
                name.name.clone(),
                Def {
                    kind,
                    params: params.len(),
                },
            );
        }
        Checker {
            defs,
            calls: BTreeMap::new(),
            diags,
            scopes: Vec::new(),
        }
    }

    fn error(&mut self, at: Pos, msg: impl Into<String>) {
        self.diags.push(Diagnostic::semantic(at, msg));
    }

    fn run(&mut self, ast: &Ast) {
        for item in &ast.items {
            match item {
                Item::Qnode(q) => self.qnode(q),
                Item::Fn(f) => self.function(f),
                Item::Call(c) => self.top_level_call(c),
            }
        }
        self.recursion();
    }

    fn qnode(&mut self, q: &QnodeDef) {
        for d in &q.decorators {
            if TransformKind::from_name(&d.transform.name).is_none() {
                let names = TransformKind::ALL.map(TransformKind::name).join(", ");
                self.error(
                    d.transform.span.start,
                    format!("unknown transform '{}' (expected one of: {names})", d.transform.name),
                );
            }
        }
        if q.wires == 0 {
            self.error(q.name.span.start, "a device needs at least one wire");
        }
        let stmts = &q.body.stmts;
        match stmts.last() {
            Some(Stmt::Return { .. }) => {}
            _ => self.diags.push(Diagnostic::warning(
                q.name.span.start,
                format!("qnode '{}' returns no measurements", q.name.name),
            )),
        }
        self.scopes = vec![q.params.iter().map(|p| p.name.clone()).collect()];
        for (i, stmt) in stmts.iter().enumerate() {
            self.stmt(stmt, &q.name.name, Context::Qnode, i + 1 == stmts.len());
        }
    }

    fn function(&mut self, f: &FnDef) {
        self.calls.entry(f.name.name.clone()).or_default();
        self.scopes = vec![f.params.iter().map(|p| p.name.clone()).collect()];
        for stmt in f.body.stmts.iter() {
            self.stmt(stmt, &f.name.name, Context::Fn, false);
        }
    }

    fn block(&mut self, block: &Block, owner: &str, ctx: Context) {
        self.scopes.push(HashSet::new());
        for stmt in block.stmts.iter() {
            self.stmt(stmt, owner, ctx, false);
        }
        self.scopes.pop();
    }

    fn stmt(&mut self, stmt: &Stmt, owner: &str, ctx: Context, final_in_qnode: bool) {
        match stmt {
            Stmt::Gate {
                gate,
                gate_span,
                args,
                ..
            } => {
                if args.len() != gate.arity() {
                    let shape = match (gate.num_params(), gate.num_wires()) {
                        (1, _) => "angle, wire".to_string(),
                        (_, 1) => "wire".to_string(),
                        (_, n) => vec!["wire"; n].join(", "),
                    };
                    self.error(
                        gate_span.start,
                        format!(
                            "gate '{}' takes {} argument(s) ({shape}), got {}",
                            gate,
                            gate.arity(),
                            args.len()
                        ),
                    );
                }
                args.iter().for_each(|a| self.expr(a, true));
            }
            Stmt::Call(call) => self.sub_call(call, owner),
            Stmt::For {
                var,
                start,
                end,
                body,
                ..
            } => {
                self.expr(start, true);
                self.expr(end, true);
                self.scopes.push(HashSet::from([var.name.clone()]));
                self.block(body, owner, ctx);
                self.scopes.pop();
            }
            Stmt::If {
                cond,
                then_block,
                else_block,
                ..
            } => {
                self.expr(cond, true);
                self.block(then_block, owner, ctx);
                if let Some(b) = else_block {
                    self.block(b, owner, ctx);
                }
            }
            Stmt::Let { name, value, .. } => {
                self.expr(value, true);
                if let Some(scope) = self.scopes.last_mut() {
                    scope.insert(name.name.clone());
                }
            }
            Stmt::Return { measurements, span } => {
                if ctx == Context::Fn {
                    self.error(
                        span.start,
                        format!("'return' is not allowed in subroutine '{owner}'; subroutines return nothing"),
                    );
                } else if !final_in_qnode {
                    self.error(span.start, "'return' must be the final statement of a qnode body");
                }
                for m in measurements {
                    match m {
                        Measurement::Expval { factors, .. } => {
                            factors.iter().for_each(|f| self.expr(&f.wire, true))
                        }
                        Measurement::Probs { wires, .. } => wires.iter().for_each(|w| self.expr(w, true)),
                        Measurement::State { .. } => {}
                    }
                }
            }
        }
    }

    fn sub_call(&mut self, call: &CallStmt, owner: &str) {
        let name = &call.callee.name;
        let at = call.callee.span.start;
        call.args.iter().for_each(|a| self.expr(a, true));
        match self.defs.get(name) {
            Some(Def { kind: DefKind::Fn, params }) => {
                if *params != call.args.len() {
                    let msg = format!(
                        "subroutine '{name}' takes {params} argument(s), got {}",
                        call.args.len()
                    );
                    self.error(at, msg);
                }
                self.calls
                    .entry(owner.to_string())
                    .or_default()
                    .push((name.clone(), at));
            }
            Some(Def { kind: DefKind::Qnode, .. }) => {
                self.error(at, format!("qnode '{name}' cannot be called from a quantum function"))
            }
            None if name == "measure" => self.error(
                at,
                "measure(...) yields a value; bind it, e.g. 'let m = measure(0);'",
            ),
            None => {
                let msg = self.unknown_callee(name);
                self.error(at, msg);
            }
        }
    }

    fn unknown_callee(&self, name: &str) -> String {
        let gate_hint = Gate::ALL
            .iter()
            .map(|g| g.name())
            .filter(|g| edit_distance(g, name) <= 1)
            .min_by_key(|g| edit_distance(g, name));
        let fn_hint = self
            .defs
            .iter()
            .filter(|(_, d)| d.kind == DefKind::Fn)
            .map(|(n, _)| n.as_str())
            .filter(|n| edit_distance(n, name) <= 2)
            .min_by_key(|n| (edit_distance(n, name), n.to_string()));
        match (fn_hint, gate_hint) {
            (Some(f), _) => format!("call to undefined subroutine '{name}' (did you mean '{f}'?)"),
            (None, Some(g)) => format!("unknown gate '{name}' (did you mean '{g}'?)"),
            (None, None) => format!("unknown gate or undefined subroutine '{name}'"),
        }
    }

    fn top_level_call(&mut self, call: &CallStmt) {
        let name = &call.callee.name;
        let at = call.callee.span.start;
        self.scopes.clear();
        call.args.iter().for_each(|a| self.expr(a, false));
        match self.defs.get(name) {
            Some(Def { kind: DefKind::Qnode, params }) => {
                if *params != call.args.len() {
                    let msg = format!("qnode '{name}' takes {params} argument(s), got {}", call.args.len());
                    self.error(at, msg);
                }
            }
            Some(Def { kind: DefKind::Fn, .. }) => self.error(
                at,
                format!("top-level call to '{name}', which is not a qnode; only qnodes can be executed"),
            ),
            None if Gate::from_name(name).is_some() => self.error(
                at,
                format!("gate '{name}' applied outside a quantum function"),
            ),
            None => self.error(at, format!("call to undefined qnode '{name}'")),
        }
    }

    fn expr(&mut self, expr: &Expr, quantum: bool) {
        match expr {
            Expr::Num { .. } => {}
            Expr::Var(id) => {
                let bound = self.scopes.iter().any(|s| s.contains(&id.name))
                    || CONSTANTS.iter().any(|(n, _)| *n == id.name);
                if !bound {
                    self.error(id.span.start, format!("undefined variable '{}'", id.name));
                }
            }
            Expr::Measure { wire, span } => {
                if !quantum {
                    self.error(span.start, "measure(...) used outside a quantum function");
                }
                self.expr(wire, quantum);
            }
            Expr::Unary { operand, .. } => self.expr(operand, quantum),
            Expr::Binary { lhs, rhs, .. } => {
                self.expr(lhs, quantum);
                self.expr(rhs, quantum);
            }
        }
    }

    /// Reports each elementary cycle in the subroutine call graph once, at
    /// the call site that enters the cycle from its alphabetically first member.
    fn recursion(&mut self) {
        let mut reported: HashSet<Vec<String>> = HashSet::new();
        let names: Vec<String> = self.calls.keys().cloned().collect();
        for root in &names {
            let mut path = vec![(root.clone(), None::<Pos>)];
            self.find_cycles(root, &mut path, &mut reported);
        }
    }

    fn find_cycles(
        &mut self,
        root: &str,
        path: &mut Vec<(String, Option<Pos>)>,
        reported: &mut HashSet<Vec<String>>,
    ) {
        let current = path.last().map(|(n, _)| n.clone()).unwrap_or_default();
        let edges = self.calls.get(&current).cloned().unwrap_or_default();
        for (callee, at) in edges {
            if callee == root {
                let members: Vec<String> = path.iter().map(|(n, _)| n.clone()).collect();
                let mut key = members.clone();
                key.sort();
                // only report from the smallest member so each cycle appears once
                if members.iter().min() == Some(&root.to_string()) && reported.insert(key) {
                    let first_site = path.get(1).and_then(|(_, p)| *p).unwrap_or(at);
                    let chain = members
                        .iter()
                        .chain(std::iter::once(&root.to_string()))
                        .cloned()
                        .collect::<Vec<_>>()
                        .join(" → ");
                    self.error(first_site, format!("recursion cycle {chain}"));
                }
            } else if callee.as_str() > root && !path.iter().any(|(n, _)| *n == callee) {
                path.push((callee, Some(at)));
                self.find_cycles(root, path, reported);
                path.pop();
            }
        }
    }
}

fn edit_distance(a: &str, b: &str) -> usize {
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    for (i, ca) in a.chars().enumerate() {
        let mut cur = vec![i + 1; b.len() + 1];
        for (j, cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != *cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        prev = cur;
    }
    prev[b.len()]
}
