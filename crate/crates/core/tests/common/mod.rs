//! Independent oracles shared by the integration tests. None of these call
//! into the library's linear algebra.
#![allow(dead_code)]

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn seed() -> u64 {
    std::env::var("COVOL_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(0)
}

pub fn rng(salt: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed() ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// Rank by plain Gaussian elimination on dense rational rows.
pub fn rank(rows: &[Vec<BigRational>]) -> usize {
    let mut m: Vec<Vec<BigRational>> = rows.to_vec();
    let cols = m.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let pivot = m[r][c].clone();
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone() / pivot.clone();
                for k in c..cols {
                    let t = m[r][k].clone() * f.clone();
                    m[i][k] -= t;
                }
            }
        }
        r += 1;
    }
    r
}

/// Rows restricted to a set of columns.
pub fn restrict(rows: &[Vec<BigRational>], cols: &[usize]) -> Vec<Vec<BigRational>> {
    rows.iter().map(|r| cols.iter().map(|&c| r[c].clone()).collect()).collect()
}

/// Finest partition of the support such that the row space is the direct
/// sum of its intersections with the coordinate blocks, by checking every
/// subset `S`: it splits iff `dim(V cap S) + dim(V cap S^c) = dim V`,
/// where `dim(V cap S) = dim V - rank(V restricted to S^c)`.
pub fn brute_force_partition(rows: &[Vec<BigRational>]) -> BTreeSet<BTreeSet<usize>> {
    let n = rows.first().map_or(0, |r| r.len());
    let support: Vec<usize> = (0..n).filter(|&c| rows.iter().any(|r| !r[c].is_zero())).collect();
    let d = rank(rows);
    let k = support.len();
    assert!(k <= 16, "brute force over 2^{k} subsets");
    let mut splitting: Vec<u32> = Vec::new();
    for mask in 0u32..(1 << k) {
        let s: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| support[i]).collect();
        let c: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 0).map(|i| support[i]).collect();
        let in_s = d - rank(&restrict(rows, &c));
        let in_c = d - rank(&restrict(rows, &s));
        if in_s + in_c == d {
            splitting.push(mask);
        }
    }
    // i and j share a block iff no splitting set separates them.
    let mut blocks: Vec<BTreeSet<usize>> = Vec::new();
    let mut assigned = vec![false; k];
    for i in 0..k {
        if assigned[i] {
            continue;
        }
        let mut blk = BTreeSet::new();
        for j in i..k {
            if splitting.iter().all(|m| (m >> i & 1) == (m >> j & 1)) {
                blk.insert(support[j]);
                assigned[j] = true;
            }
        }
        blocks.push(blk);
    }
    blocks.into_iter().collect()
}

/// Integer determinant by cofactor expansion (small matrices only).
pub fn det(m: &[Vec<i64>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut total = BigInt::zero();
    for c in 0..n {
        if m[0][c] == 0 {
            continue;
        }
        let minor: Vec<Vec<i64>> = m[1..].iter().map(|r| r.iter().enumerate().filter(|(k, _)| *k != c).map(|(_, x)| *x).collect()).collect();
        let term = BigInt::from(m[0][c]) * det(&minor);
        if c % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// `(free rank, torsion coefficients > 1)` of `Z^cols / rowspace`, from
/// determinantal divisors `d_k = gcd of k x k minors`.
pub fn abelian_invariants(rows: &[Vec<i64>], cols: usize) -> (usize, Vec<BigInt>) {
    use num_integer::Integer;
    let mut divisors = vec![BigInt::one()];
    for k in 1..=rows.len().min(cols) {
        let mut g = BigInt::zero();
        for rs in subsets(rows.len(), k) {
            for cs in subsets(cols, k) {
                let minor: Vec<Vec<i64>> = rs.iter().map(|&r| cs.iter().map(|&c| rows[r][c]).collect()).collect();
                g = g.gcd(&det(&minor));
            }
        }
        if g.is_zero() {
            break;
        }
        divisors.push(g);
    }
    let r = divisors.len() - 1;
    let torsion = (1..=r).map(|k| &divisors[k] / &divisors[k - 1]).filter(|t| !t.is_one()).collect();
    (cols - r, torsion)
}

/// Structural check of the DOT subset the library emits: a single
/// `digraph` with node, edge and `{ rank=same; ... }` statements, balanced
/// braces and closed quotes. Returns `(nodes, edges)`.
pub fn check_dot(text: &str) -> Result<(BTreeSet<String>, Vec<(String, String)>), String> {
    let toks = dot_tokens(text)?;
    let mut i = 0;
    let expect = |i: &mut usize, t: &str| -> Result<(), String> {
        if toks.get(*i).map(|s| s.as_str()) == Some(t) {
            *i += 1;
            Ok(())
        } else {
            Err(format!("expected {t} at token {i}, got {:?}", toks.get(*i)))
        }
    };
    expect(&mut i, "digraph")?;
    let is_id = |s: &str| s.starts_with('"') || s.chars().all(|c| c.is_alphanumeric() || c == '_');
    if !toks.get(i).is_some_and(|s| is_id(s)) {
        return Err("graph name".into());
    }
    i += 1;
    expect(&mut i, "{")?;
    let mut nodes = BTreeSet::new();
    let mut edges = Vec::new();
    loop {
        let Some(t) = toks.get(i) else { return Err("unterminated graph".into()) };
        match t.as_str() {
            "}" => {
                i += 1;
                break;
            }
            "{" => {
                i += 1;
                while toks.get(i).map(|s| s.as_str()) != Some("}") {
                    if i >= toks.len() {
                        return Err("unterminated subgraph".into());
                    }
                    i += 1;
                }
                i += 1;
            }
            _ if is_id(t) => {
                let a = t.clone();
                i += 1;
                if toks.get(i).map(|s| s.as_str()) == Some("=") {
                    i += 2;
                } else if toks.get(i).map(|s| s.as_str()) == Some("->") {
                    let b = toks.get(i + 1).ok_or("dangling edge")?.clone();
                    if !is_id(&b) {
                        return Err(format!("bad edge target {b}"));
                    }
                    edges.push((a, b));
                    i += 2;
                } else {
                    nodes.insert(a);
                }
                if toks.get(i).map(|s| s.as_str()) == Some("[") {
                    while toks.get(i).map(|s| s.as_str()) != Some("]") {
                        if i >= toks.len() {
                            return Err("unterminated attributes".into());
                        }
                        i += 1;
                    }
                    i += 1;
                }
                expect(&mut i, ";")?;
            }
            other => return Err(format!("unexpected token {other}")),
        }
    }
    if i != toks.len() {
        return Err("trailing tokens".into());
    }
    for (a, b) in &edges {
        if !nodes.contains(a) || !nodes.contains(b) {
            return Err(format!("edge {a} -> {b} uses an undeclared node"));
        }
    }
    Ok((nodes, edges))
}

fn dot_tokens(text: &str) -> Result<Vec<String>, String> {
    let mut out = Vec::new();
    let cs: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == '"' {
            let mut s = String::from('"');
            i += 1;
            loop {
                match cs.get(i) {
                    None => return Err("unterminated string".into()),
                    Some('\\') => {
                        s.push('\\');
                        s.push(*cs.get(i + 1).ok_or("bad escape")?);
                        i += 2;
                    }
                    Some('"') => {
                        s.push('"');
                        i += 1;
                        break;
                    }
                    Some(ch) => {
                        s.push(*ch);
                        i += 1;
                    }
                }
            }
            out.push(s);
        } else if c == '-' && cs.get(i + 1) == Some(&'>') {
            out.push("->".into());
            i += 2;
        } else if "{}[];=,".contains(c) {
            out.push(c.to_string());
            i += 1;
        } else if c.is_alphanumeric() || c == '_' {
            let start = i;
            while i < cs.len() && (cs[i].is_alphanumeric() || cs[i] == '_') {
                i += 1;
            }
            out.push(cs[start..i].iter().collect());
        } else {
            return Err(format!("unexpected character {c}"));
        }
    }
    Ok(out)
}

/// A random connected quiver on `n` vertices: a spine of arrows between
/// consecutive vertices plus `extra` random arrows.
pub fn random_quiver(rng: &mut ChaCha8Rng, n: usize, extra: usize) -> (Vec<String>, Vec<(String, usize, usize)>) {
    let vertices: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let mut arrows = Vec::new();
    for i in 1..n {
        let (s, t) = if rng.gen_bool(0.5) { (i - 1, i) } else { (i, i - 1) };
        arrows.push((format!("e{}", arrows.len()), s, t));
    }
    for _ in 0..extra {
        let s = rng.gen_range(0..n);
        let t = rng.gen_range(0..n);
        arrows.push((format!("e{}", arrows.len()), s, t));
    }
    (vertices, arrows)
}

/// Dense rational row from small integers.
pub fn qrow(v: &[i64]) -> Vec<BigRational> {
    v.iter().map(|&x| BigRational::from_integer(x.into())).collect()
}

/// All splittings `p = p2 p1` of a path given as an arrow list in
/// traversal order: `(p2, p1)` with `p1` the first `k` arrows.
pub fn splittings(p: &[usize]) -> Vec<(Vec<usize>, Vec<usize>)> {
    (0..=p.len()).map(|k| (p[k..].to_vec(), p[..k].to_vec())).collect()
}
