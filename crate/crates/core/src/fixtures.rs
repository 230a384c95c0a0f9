//! The shipped workspace files and builders for their parameterised
//! families. Every shipped file is in canonical form: `emit(parse(f)) == f`.

pub const LOOP: &str = include_str!("../fixtures/loop.cov");
pub const DBL: &str = include_str!("../fixtures/dbl.cov");
pub const KRON: &str = include_str!("../fixtures/kron.cov");
pub const TRI_AC: &str = include_str!("../fixtures/tri_ac.cov");
pub const TRI_ACBC: &str = include_str!("../fixtures/tri_acbc.cov");
pub const SL2: &str = include_str!("../fixtures/sl2.cov");

/// `(file stem, source)` for every shipped fixture.
pub fn shipped() -> Vec<(&'static str, &'static str)> {
    vec![("loop", LOOP), ("dbl", DBL), ("kron", KRON), ("tri_ac", TRI_AC), ("tri_acbc", TRI_ACBC), ("sl2", SL2)]
}

/// One loop `a` weighted by a generator of the given group (`Z` or `Z/n`),
/// with the full coalgebra truncated at `truncation >= 2`.
pub fn loop_source(group: &str, truncation: usize) -> String {
    let top = vec!["a"; truncation].join(".");
    format!(
        "quiver LOOP {{\n  vertices x;\n  arrows a: x -> x;\n}}\ngroup G = {group};\n\
         weighting d on LOOP into G {{\n  a = 1;\n}}\nsubcoalgebra B of LOOP {{\n  truncate {truncation};\n  generators: {top};\n}}\n"
    )
}

/// The subcoalgebra generated by `d_0 = b_0 a_0` and
/// `d_{i+1} = a_i b_i + b_{i+1} a_{i+1}` on the double of the linear
/// quiver with `m` vertices, graded by `a_i -> 0`, `b_i -> -1`, with the
/// comodule generated by `a_1` when `m >= 3`.
pub fn sl2_source(m: usize) -> String {
    assert!(m >= 2);
    let vertices: Vec<String> = (0..m).map(|i| format!("x{i}")).collect();
    let mut arrows: Vec<String> = (0..m - 1).map(|i| format!("a{i}: x{i} -> x{}", i + 1)).collect();
    arrows.extend((0..m - 1).map(|i| format!("b{i}: x{} -> x{i}", i + 1)));
    let mut s = format!("quiver SL2 {{\n  vertices {};\n  arrows {};\n}}\ngroup Z = Z;\n", vertices.join(", "), arrows.join(", "));
    s.push_str("weighting d on SL2 into Z {\n");
    for i in 0..m - 1 {
        s.push_str(&format!("  a{i} = 0;\n"));
    }
    for i in 0..m - 1 {
        s.push_str(&format!("  b{i} = -1;\n"));
    }
    s.push_str("}\n");
    let mut gens = vec!["b0.a0".to_string()];
    gens.extend((0..m - 2).map(|i| format!("a{i}.b{i} + b{}.a{}", i + 1, i + 1)));
    s.push_str(&format!("subcoalgebra B of SL2 {{\n  truncate 2;\n  generators: {};\n}}\n", gens.join(", ")));
    if m >= 3 {
        s.push_str("comodule WEYL over B {\n  basis m0, m1;\n  coaction {\n    m0: m0 [x2];\n    m1: m0 [a1] + m1 [x1];\n  }\n}\n");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{emit, parse};

    #[test]
    fn canonical() {
        for (name, src) in shipped() {
            assert_eq!(emit(&parse(src).unwrap()), src, "{name}");
        }
        assert_eq!(SL2, sl2_source(5));
        for g in ["Z", "Z/4"] {
            let s = loop_source(g, 3);
            assert_eq!(emit(&parse(&s).unwrap()), s);
        }
    }

    #[test]
    fn sl2_dimension() {
        let ws = parse(SL2).unwrap();
        assert_eq!(ws.subcoalgebra("B").unwrap().space.dim(), 17);
    }
}
