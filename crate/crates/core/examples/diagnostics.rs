//! Prints the diagnostics for a few broken programs.

use qdbg_core::frontend::{compile, SourceProgram};

fn main() {
    let programs = [
        ("syntax", "qnode m( {"),
        ("unknown gate", "qnode m() on device(wires=1) {\n    hadamard(0);\n    return probs(0);\n}\nm();\n"),
        ("arity", "qnode m() on device(wires=2) {\n    cnot(0);\n    return probs(0);\n}\nm();\n"),
        ("recursion", "fn f() {\n    g();\n}\nfn g() {\n    f();\n}\n"),
        ("misplaced return", "fn f() {\n    return probs(0);\n}\n"),
        ("transform", "@transform(cancel_inverse)\nqnode m() on device(wires=1) {\n    return probs(0);\n}\n"),
        ("warning only", "qnode m() on device(wires=1) {\n    h(0);\n}\nm();\n"),
    ];
    for (name, text) in programs {
        println!("== {name}");
        match SourceProgram::new(name, text).compile() {
            Ok((_, warnings)) => warnings.iter().for_each(|w| println!("{w}")),
            Err(diags) => diags.iter().for_each(|d| println!("{d}")),
        }
    }
    // the same diagnostics serialize for clients
    let diags = compile("qnode m( {").unwrap_err();
    println!("{}", serde_json::to_string(&diags).unwrap());
}
