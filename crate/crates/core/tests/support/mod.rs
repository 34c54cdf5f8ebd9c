//! Test-side oracles and corpora, independent of the library's simulator.
#![allow(dead_code)]

pub mod props;

use std::f64::consts::FRAC_1_SQRT_2;
use std::path::{Path, PathBuf};

use num_complex::Complex64 as C;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qdbg_core::trace::{EventPayload, MeasurementResult, Snapshot};

// ---------------------------------------------------------------------------
// brute-force simulator: gates act on computational basis states directly

fn bit(b: usize, n: usize, w: usize) -> usize {
    (b >> (n - 1 - w)) & 1
}

fn flip(b: usize, n: usize, w: usize) -> usize {
    b ^ (1 << (n - 1 - w))
}

/// Image of basis state `b` under a gate, as (amplitude, basis) terms.
pub fn basis_image(n: usize, name: &str, wires: &[usize], params: &[f64], b: usize) -> Vec<(C, usize)> {
    let i = C::new(0.0, 1.0);
    let one = C::new(1.0, 0.0);
    let w = wires[0];
    let v = bit(b, n, w);
    match name {
        "x" => vec![(one, flip(b, n, w))],
        "y" => vec![(if v == 0 { i } else { -i }, flip(b, n, w))],
        "z" => vec![(if v == 0 { one } else { -one }, b)],
        "s" => vec![(if v == 0 { one } else { i }, b)],
        "t" => vec![(if v == 0 { one } else { C::from_polar(1.0, std::f64::consts::FRAC_PI_4) }, b)],
        "h" => {
            let sign = if v == 0 { 1.0 } else { -1.0 };
            let b0 = b & !(1 << (n - 1 - w));
            vec![(C::new(FRAC_1_SQRT_2, 0.0), b0), (C::new(sign * FRAC_1_SQRT_2, 0.0), b0 | (1 << (n - 1 - w)))]
        }
        "rx" => {
            let (s, c) = (params[0] / 2.0).sin_cos();
            vec![(C::new(c, 0.0), b), (C::new(0.0, -s), flip(b, n, w))]
        }
        "ry" => {
            let (s, c) = (params[0] / 2.0).sin_cos();
            let other = if v == 0 { s } else { -s };
            vec![(C::new(c, 0.0), b), (C::new(other, 0.0), flip(b, n, w))]
        }
        "rz" => {
            let half = params[0] / 2.0;
            vec![(C::from_polar(1.0, if v == 0 { -half } else { half }), b)]
        }
        "cnot" => vec![(one, if v == 1 { flip(b, n, wires[1]) } else { b })],
        "cz" => vec![(if v == 1 && bit(b, n, wires[1]) == 1 { -one } else { one }, b)],
        "swap" => {
            let u = bit(b, n, wires[1]);
            let out = if u != v { flip(flip(b, n, w), n, wires[1]) } else { b };
            vec![(one, out)]
        }
        "toffoli" => {
            let both = v == 1 && bit(b, n, wires[1]) == 1;
            vec![(one, if both { flip(b, n, wires[2]) } else { b })]
        }
        other => panic!("oracle has no gate {other}"),
    }
}

pub fn apply(state: &[C], n: usize, name: &str, wires: &[usize], params: &[f64]) -> Vec<C> {
    let mut out = vec![C::new(0.0, 0.0); state.len()];
    for (b, amp) in state.iter().enumerate() {
        if amp.norm_sqr() == 0.0 {
            continue;
        }
        for (a, to) in basis_image(n, name, wires, params, b) {
            out[to] += a * amp;
        }
    }
    out
}

pub fn zero_state(n: usize) -> Vec<C> {
    let mut s = vec![C::new(0.0, 0.0); 1 << n];
    s[0] = C::new(1.0, 0.0);
    s
}

pub type Op = (String, Vec<usize>, Vec<f64>);

/// Dense unitary, column `b` holding the image of basis state `b`.
pub fn unitary(n: usize, ops: &[Op]) -> Vec<Vec<C>> {
    (0..1usize << n)
        .map(|b| {
            let mut s = vec![C::new(0.0, 0.0); 1 << n];
            s[b] = C::new(1.0, 0.0);
            for (name, wires, params) in ops {
                s = apply(&s, n, name, wires, params);
            }
            s
        })
        .collect()
}

/// Max entry deviation between two unitaries after aligning global phase.
pub fn phase_distance(a: &[Vec<C>], b: &[Vec<C>]) -> f64 {
    let mut best = (0.0, C::new(1.0, 0.0));
    for (ca, cb) in a.iter().zip(b) {
        for (x, y) in ca.iter().zip(cb) {
            if x.norm() > best.0 && y.norm() > 1e-12 {
                best = (x.norm(), x / y);
            }
        }
    }
    let phase = best.1 / best.1.norm();
    a.iter()
        .zip(b)
        .flat_map(|(ca, cb)| ca.iter().zip(cb).map(move |(x, y)| (x - y * phase).norm()))
        .fold(0.0, f64::max)
}

pub fn probs(state: &[C], n: usize, wires: &[usize]) -> Vec<f64> {
    let mut out = vec![0.0; 1 << wires.len()];
    for (b, a) in state.iter().enumerate() {
        let idx = wires.iter().fold(0, |acc, &w| (acc << 1) | bit(b, n, w));
        out[idx] += a.norm_sqr();
    }
    out
}

pub fn expval(state: &[C], n: usize, factors: &[(char, usize)]) -> f64 {
    let mut s = state.to_vec();
    for &(p, w) in factors {
        let name = match p {
            'X' => "x",
            'Y' => "y",
            _ => "z",
        };
        s = apply(&s, n, name, &[w], &[]);
    }
    state.iter().zip(&s).map(|(a, b)| (a.conj() * b).re).sum()
}

/// Replays a finished snapshot's qnode frames through the oracle and checks
/// each qnode's returned (pre-transform) values. Returns the largest
/// deviation seen.
pub fn replay_deviation(snapshot: &Snapshot, wires_of: impl Fn(&str) -> usize) -> f64 {
    let mut worst: f64 = 0.0;
    for root in snapshot.roots() {
        let n = wires_of(&root.name);
        let mut state = zero_state(n);
        let mut returned = None;
        for e in snapshot.subtree_events(root.id) {
            match &e.payload {
                EventPayload::Gate(op) => {
                    state = apply(&state, n, op.name.name(), &op.wires, &op.params);
                }
                EventPayload::Midmeasure { wire, bit: m } => {
                    let keep: f64 = state
                        .iter()
                        .enumerate()
                        .filter(|(b, _)| bit(*b, n, *wire) == *m as usize)
                        .map(|(_, a)| a.norm_sqr())
                        .sum();
                    assert!(keep > 1e-15, "recorded bit {m} has probability {keep}");
                    for (b, a) in state.iter_mut().enumerate() {
                        if bit(b, n, *wire) != *m as usize {
                            *a = C::new(0.0, 0.0);
                        } else {
                            *a /= keep.sqrt();
                        }
                    }
                }
                EventPayload::Returned { values } if e.frame == root.id => returned = Some(values.clone()),
                EventPayload::Returned { .. } => {}
            }
        }
        for r in returned.unwrap_or_default() {
            let d = match &r {
                MeasurementResult::Expval { observable, value, .. } => {
                    let f: Vec<(char, usize)> = observable
                        .iter()
                        .map(|(p, w)| (p.to_string().chars().next().unwrap(), *w))
                        .collect();
                    (expval(&state, n, &f) - value).abs()
                }
                MeasurementResult::Probs { wires, values } => probs(&state, n, wires)
                    .iter()
                    .zip(values)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max),
                MeasurementResult::State { amplitudes, .. } => state
                    .iter()
                    .zip(amplitudes)
                    .map(|(a, [re, im])| (a - C::new(*re, *im)).norm())
                    .fold(0.0, f64::max),
            };
            worst = worst.max(d);
        }
    }
    worst
}

// ---------------------------------------------------------------------------
// random circuits and programs

pub struct Gen(ChaCha8Rng);

impl Gen {
    pub fn new(seed: u64) -> Self {
        Gen(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.0.next_u64() % n as u64) as usize
    }

    pub fn chance(&mut self, percent: usize) -> bool {
        self.below(100) < percent
    }

    pub fn angle(&mut self) -> f64 {
        let raw = (self.0.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        ((raw * 4.0 - 2.0) * std::f64::consts::PI * 1000.0).round() / 1000.0
    }

    pub fn pick<'a, T>(&mut self, xs: &'a [T]) -> &'a T {
        &xs[self.below(xs.len())]
    }

    pub fn distinct_wires(&mut self, n: usize, k: usize) -> Vec<usize> {
        let mut pool: Vec<usize> = (0..n).collect();
        (0..k).map(|_| pool.remove(self.below(pool.len()))).collect()
    }
}

pub const GATES: [(&str, usize, usize); 13] = [
    ("h", 1, 0),
    ("x", 1, 0),
    ("y", 1, 0),
    ("z", 1, 0),
    ("s", 1, 0),
    ("t", 1, 0),
    ("rx", 1, 1),
    ("ry", 1, 1),
    ("rz", 1, 1),
    ("cnot", 2, 0),
    ("cz", 2, 0),
    ("swap", 2, 0),
    ("toffoli", 3, 0),
];

/// Random gate list biased toward cancellable and mergeable neighbours.
pub fn random_ops(g: &mut Gen, n: usize, len: usize) -> Vec<Op> {
    let mut ops: Vec<Op> = Vec::new();
    while ops.len() < len {
        if !ops.is_empty() && g.chance(30) {
            let prev = ops[g.below(ops.len())].clone();
            let (name, wires, mut params) = prev;
            if !params.is_empty() && g.chance(50) {
                params[0] = g.angle();
            }
            ops.push((name, wires, params));
            continue;
        }
        let (name, k, p) = loop {
            let c = *g.pick(&GATES);
            if c.1 <= n {
                break c;
            }
        };
        let wires = g.distinct_wires(n, k);
        let params = (0..p).map(|_| g.angle()).collect();
        ops.push((name.to_string(), wires, params));
    }
    ops
}

/// A random, checker-clean QDL program, one statement per line.
pub fn random_program(seed: u64) -> String {
    let mut g = Gen::new(seed);
    let n = 1 + g.below(4);
    let mut out = String::new();
    let fns = g.below(3);
    for k in 0..fns {
        out.push_str(&format!("fn f{k}(a) {{\n"));
        for _ in 0..1 + g.below(3) {
            if k > 0 && g.chance(30) {
                out.push_str(&format!("    f{}(a * 2);\n", g.below(k)));
            } else {
                out.push_str(&format!("    {}\n", gate_stmt(&mut g, n, Some("a"), None)));
            }
        }
        out.push_str("}\n\n");
    }
    let qnodes = 1 + g.below(2);
    for q in 0..qnodes {
        let deco = g.below(3);
        for _ in 0..deco {
            out.push_str(&format!("@transform({})\n", g.pick(&["cancel_inverses", "merge_rotations"])));
        }
        out.push_str(&format!("qnode q{q}(t) on device(wires={n}) {{\n"));
        let mut lets = 0;
        for _ in 0..1 + g.below(7) {
            stmt(&mut g, n, fns, deco == 0, 1, &mut lets, &mut out);
        }
        let meas = 1 + g.below(2);
        let ms: Vec<String> = (0..meas).map(|_| measurement(&mut g, n)).collect();
        out.push_str(&format!("    return {};\n}}\n\n", ms.join(", ")));
    }
    for _ in 0..1 + g.below(2) {
        out.push_str(&format!("q{}({});\n", g.below(qnodes), g.angle()));
    }
    out
}

fn gate_stmt(g: &mut Gen, n: usize, angle_var: Option<&str>, loop_var: Option<(&str, usize)>) -> String {
    let (name, k, p) = loop {
        let c = *g.pick(&GATES);
        if c.1 <= n {
            break c;
        }
    };
    let wires = g.distinct_wires(n, k);
    let mut args: Vec<String> = Vec::new();
    if p == 1 {
        args.push(match angle_var {
            Some(v) if g.chance(60) => format!("{v} * {}", g.angle()),
            _ => g.angle().to_string(),
        });
    }
    for (i, w) in wires.iter().enumerate() {
        match loop_var {
            Some((v, m)) if k == 1 && i == 0 && m <= n && g.chance(60) => args.push(v.to_string()),
            _ => args.push(w.to_string()),
        }
    }
    format!("{name}({});", args.join(", "))
}

fn stmt(g: &mut Gen, n: usize, fns: usize, allow_measure: bool, depth: usize, lets: &mut usize, out: &mut String) {
    let pad = "    ".repeat(depth);
    let choice = g.below(10);
    match choice {
        0..=4 => out.push_str(&format!("{pad}{}\n", gate_stmt(g, n, Some("t"), None))),
        5 if fns > 0 => out.push_str(&format!("{pad}f{}({});\n", g.below(fns), g.angle())),
        6 if depth < 3 => {
            let m = g.below(n + 1);
            out.push_str(&format!("{pad}for i{depth} in 0..{m} {{\n"));
            let var = format!("i{depth}");
            for _ in 0..1 + g.below(2) {
                out.push_str(&format!("{pad}    {}\n", gate_stmt(g, n, Some("t"), Some((&var, m)))));
            }
            out.push_str(&format!("{pad}}}\n"));
        }
        7 if depth < 3 => {
            let cond = if allow_measure && g.chance(60) {
                format!("measure({}) == 1", g.below(n))
            } else {
                format!("t > {}", g.angle())
            };
            out.push_str(&format!("{pad}if {cond} {{\n"));
            stmt(g, n, fns, allow_measure, depth + 1, lets, out);
            if g.chance(50) {
                out.push_str(&format!("{pad}}} else {{\n"));
                stmt(g, n, fns, allow_measure, depth + 1, lets, out);
            }
            out.push_str(&format!("{pad}}}\n"));
        }
        8 if depth == 1 => {
            let name = format!("v{lets}");
            *lets += 1;
            out.push_str(&format!("{pad}let {name} = t * {} + {};\n", g.angle(), g.angle()));
            out.push_str(&format!("{pad}rz({name}, {});\n", g.below(n)));
        }
        _ => out.push_str(&format!("{pad}{}\n", gate_stmt(g, n, None, None))),
    }
}

fn measurement(g: &mut Gen, n: usize) -> String {
    match g.below(3) {
        0 => {
            let k = 1 + g.below(n);
            let ws = g.distinct_wires(n, k);
            let fs: Vec<String> = ws.iter().map(|w| format!("{}({w})", g.pick(&["X", "Y", "Z"]))).collect();
            format!("expval({})", fs.join(" @ "))
        }
        1 => {
            let k = 1 + g.below(n);
            let ws: Vec<String> = g.distinct_wires(n, k).iter().map(|w| w.to_string()).collect();
            format!("probs({})", ws.join(", "))
        }
        _ => "state()".to_string(),
    }
}

// ---------------------------------------------------------------------------
// on-disk corpora

pub fn corpus_dir() -> PathBuf {
    // also compiled into the server's acceptance gate
    let here = Path::new(env!("CARGO_MANIFEST_DIR"));
    let local = here.join("tests/corpus");
    if local.is_dir() {
        local
    } else {
        here.join("../core/tests/corpus")
    }
}

fn read_dir(sub: &str) -> Vec<(String, String)> {
    let mut files: Vec<_> = std::fs::read_dir(corpus_dir().join(sub))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "qdl"))
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|p| {
            let name = p.file_stem().unwrap().to_string_lossy().into_owned();
            (name, std::fs::read_to_string(p).unwrap())
        })
        .collect()
}

/// Hand-written valid programs plus the bundled Grover search.
pub fn valid_corpus() -> Vec<(String, String)> {
    let mut v = read_dir("valid");
    v.push(("grover".into(), qdbg_core::GROVER_QDL.to_string()));
    v
}

/// Invalid programs with the line and message fragment their first line
/// (`# expect: LINE fragment`) promises.
pub fn negative_corpus() -> Vec<(String, String, usize, String)> {
    read_dir("invalid")
        .into_iter()
        .map(|(name, text)| {
            let header = text.lines().next().unwrap().trim_start_matches("# expect:").trim().to_string();
            let (line, frag) = header.split_once(' ').unwrap();
            (name, text.clone(), line.parse().unwrap(), frag.to_string())
        })
        .collect()
}

/// Device width of each qnode, read from the source.
pub fn wire_counts(src: &str) -> impl Fn(&str) -> usize {
    let ast = qdbg_core::frontend::parse(src).unwrap();
    let table: Vec<(String, usize)> = ast
        .items
        .iter()
        .filter_map(|i| match i {
            qdbg_core::frontend::ast::Item::Qnode(q) => Some((q.name.name.clone(), q.wires)),
            _ => None,
        })
        .collect();
    move |name: &str| table.iter().find(|(n, _)| n == name).map(|(_, w)| *w).unwrap()
}
