//! Variable roles and the sidecar map file.

use std::fmt::{self, Write as _};

use super::{EncodeError, Encoding, ModelVariant};
use crate::model::TaxonSet;
use crate::pb::{Lit, Var};

pub type Pair = (usize, usize);

/// What a PB variable stands for. Taxa and topology indices are 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    /// Unary selection bit: `M(i,j) = value`.
    Select { pair: Pair, value: u32 },
    /// Binary digit of `M(i,j)` with weight `2^bit`.
    Bit { pair: Pair, bit: u32 },
    /// Sequential-counter register of a pair.
    Counter { pair: Pair, reg: u32 },
    /// Prefix-OR auxiliary of a pair.
    Prefix { pair: Pair },
    /// Upper-bound circuit of a pair.
    Bound { pair: Pair },
    /// Equality comparator between two pairs.
    Equal { a: Pair, b: Pair },
    /// Strict comparator `M(a) > M(b)`.
    Greater { a: Pair, b: Pair },
    /// Triple condition `c1`, `c2` or `c3`.
    Coverage {
        triple: (usize, usize, usize),
        case: u8,
    },
    /// Topology conjunct `d1` or `d2`.
    Consistency { topology: usize, case: u8 },
    /// `q_t`.
    Quartet { topology: usize },
}

/// Roles of all variables of an encoding plus the handles needed to decode.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarMap {
    pub(super) variant: ModelVariant,
    pub(super) taxa: TaxonSet,
    /// Largest admissible matrix entry.
    pub(super) upper: u32,
    /// Selection or bit literals per pair, pairs in lexicographic order.
    pub(super) pairs: Vec<Vec<Lit>>,
    pub(super) quartets: Vec<Lit>,
    pub(super) roles: Vec<Role>,
    pub(super) fixed: Vec<Pair>,
}

impl VarMap {
    pub fn variant(&self) -> ModelVariant {
        self.variant
    }

    pub fn taxa(&self) -> &TaxonSet {
        &self.taxa
    }

    pub fn n(&self) -> usize {
        self.taxa.len()
    }

    pub fn upper_limit(&self) -> u32 {
        self.upper
    }

    pub fn num_vars(&self) -> u32 {
        self.roles.len() as u32
    }

    pub fn role(&self, v: Var) -> Role {
        self.roles[v.slot()]
    }

    pub fn roles(&self) -> &[Role] {
        &self.roles
    }

    /// Selection (unary) or bit (binary) literals of `M(i,j)`.
    pub fn pair_lits(&self, i: usize, j: usize) -> Option<&[Lit]> {
        let (i, j) = (i.min(j), i.max(j));
        if i == j || j >= self.n() {
            return None;
        }
        Some(&self.pairs[pair_index(self.n(), i, j)])
    }

    pub fn quartet_lits(&self) -> &[Lit] {
        &self.quartets
    }

    /// Sibling pairs whose entries were fixed to 1.
    pub fn fixed_pairs(&self) -> &[Pair] {
        &self.fixed
    }

    /// Serializes the map. Taxa and topologies are written 1-based.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "qmqc-map 1");
        let _ = writeln!(out, "variant {}", self.variant.encoding.name());
        let _ = writeln!(out, "siblings {}", u8::from(self.variant.siblings));
        let _ = writeln!(out, "n {}", self.n());
        let _ = writeln!(out, "upper {}", self.upper);
        let _ = writeln!(out, "taxa {}", self.taxa.names().join(" "));
        out.push_str("fixed");
        for &(i, j) in &self.fixed {
            let _ = write!(out, " {}-{}", i + 1, j + 1);
        }
        out.push('\n');
        let _ = writeln!(out, "vars {}", self.roles.len());
        for (slot, role) in self.roles.iter().enumerate() {
            let _ = writeln!(out, "{} {}", RoleText(*role), slot + 1);
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, EncodeError> {
        let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l.trim()));
        let mut header = |key: &str| -> Result<(usize, String), EncodeError> {
            let (line, l) = lines
                .next()
                .ok_or_else(|| map_err(0, format!("missing `{key}` line")))?;
            let rest = l
                .strip_prefix(key)
                .filter(|r| r.is_empty() || r.starts_with(' '))
                .ok_or_else(|| map_err(line, format!("expected `{key}`")))?;
            Ok((line, rest.trim().to_string()))
        };
        let (line, magic) = header("qmqc-map")?;
        if magic != "1" {
            return Err(map_err(line, format!("unsupported map version {magic}")));
        }
        let (line, enc) = header("variant")?;
        let encoding: Encoding = enc
            .parse()
            .map_err(|e: EncodeError| map_err(line, e.to_string()))?;
        let (line, sib) = header("siblings")?;
        let siblings = match sib.as_str() {
            "0" => false,
            "1" => true,
            _ => return Err(map_err(line, "siblings must be 0 or 1".into())),
        };
        let (line, n) = header("n")?;
        let n: usize = num(line, &n)?;
        let (line, upper) = header("upper")?;
        let upper: u32 = num(line, &upper)?;
        let (line, names) = header("taxa")?;
        let taxa =
            TaxonSet::new(names.split_whitespace()).map_err(|e| map_err(line, e.to_string()))?;
        if taxa.len() != n {
            return Err(map_err(line, format!("{} taxa for n = {n}", taxa.len())));
        }
        let (line, fixed_text) = header("fixed")?;
        let mut fixed = Vec::new();
        for tok in fixed_text.split_whitespace() {
            let (a, b) = tok
                .split_once('-')
                .ok_or_else(|| map_err(line, format!("bad pair `{tok}`")))?;
            fixed.push((taxon(line, a, n)?, taxon(line, b, n)?));
        }
        let (line, vars) = header("vars")?;
        let vars: usize = num(line, &vars)?;

        let mut roles = Vec::with_capacity(vars);
        for (line, l) in lines {
            if l.is_empty() {
                continue;
            }
            let toks: Vec<&str> = l.split_whitespace().collect();
            let (var_tok, fields) = toks
                .split_last()
                .ok_or_else(|| map_err(line, "empty".into()))?;
            let var: usize = num(line, var_tok)?;
            if var != roles.len() + 1 {
                return Err(map_err(
                    line,
                    format!("expected variable {}", roles.len() + 1),
                ));
            }
            roles.push(parse_role(line, fields, n, encoding)?);
        }
        if roles.len() != vars {
            return Err(map_err(
                0,
                format!("{} role lines for {vars} variables", roles.len()),
            ));
        }

        let npairs = n * n.saturating_sub(1) / 2;
        let mut pairs = vec![Vec::new(); npairs];
        let mut quartets: Vec<(usize, Lit)> = Vec::new();
        for (slot, role) in roles.iter().enumerate() {
            let lit = Var::new(slot as u32 + 1).pos();
            match *role {
                Role::Select { pair, .. } | Role::Bit { pair, .. } => {
                    pairs[pair_index(n, pair.0, pair.1)].push(lit)
                }
                Role::Quartet { topology } => quartets.push((topology, lit)),
                _ => {}
            }
        }
        quartets.sort();
        if quartets.iter().enumerate().any(|(k, &(t, _))| t != k) {
            return Err(map_err(0, "quartet indices are not dense".into()));
        }
        Ok(Self {
            variant: ModelVariant { encoding, siblings },
            taxa,
            upper,
            pairs,
            quartets: quartets.into_iter().map(|(_, l)| l).collect(),
            roles,
            fixed,
        })
    }
}

/// Lexicographic index of pair `i < j` among all pairs of `0..n`.
pub(super) fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

fn map_err(line: usize, message: String) -> EncodeError {
    EncodeError::MapSyntax { line, message }
}

fn num<T: std::str::FromStr>(line: usize, s: &str) -> Result<T, EncodeError> {
    s.parse()
        .map_err(|_| map_err(line, format!("expected a number, found `{s}`")))
}

fn taxon(line: usize, s: &str, n: usize) -> Result<usize, EncodeError> {
    let v: usize = num(line, s)?;
    if v == 0 || v > n {
        return Err(map_err(line, format!("taxon {v} out of range 1..={n}")));
    }
    Ok(v - 1)
}

fn parse_role(line: usize, f: &[&str], n: usize, enc: Encoding) -> Result<Role, EncodeError> {
    let want = |k: usize| -> Result<(), EncodeError> {
        if f.len() == k + 1 {
            Ok(())
        } else {
            Err(map_err(line, format!("`{}` takes {k} fields", f[0])))
        }
    };
    let pair = |a: &str, b: &str| -> Result<Pair, EncodeError> {
        let (i, j) = (taxon(line, a, n)?, taxon(line, b, n)?);
        if i >= j {
            return Err(map_err(line, format!("pair {a} {b} not increasing")));
        }
        Ok((i, j))
    };
    let tag = *f
        .first()
        .ok_or_else(|| map_err(line, "missing role".into()))?;
    Ok(match tag {
        "M" => {
            want(3)?;
            let p = pair(f[1], f[2])?;
            let k: u32 = num(line, f[3])?;
            match enc {
                Encoding::Scd => Role::Bit { pair: p, bit: k },
                _ => Role::Select { pair: p, value: k },
            }
        }
        "s" => {
            want(3)?;
            Role::Counter {
                pair: pair(f[1], f[2])?,
                reg: num(line, f[3])?,
            }
        }
        "p" => {
            want(2)?;
            Role::Prefix {
                pair: pair(f[1], f[2])?,
            }
        }
        "b" => {
            want(2)?;
            Role::Bound {
                pair: pair(f[1], f[2])?,
            }
        }
        "e" | "g" => {
            want(4)?;
            let (a, b) = (pair(f[1], f[2])?, pair(f[3], f[4])?);
            if tag == "e" {
                Role::Equal { a, b }
            } else {
                Role::Greater { a, b }
            }
        }
        "c" => {
            want(4)?;
            let case: u8 = num(line, f[1])?;
            let (i, j, l) = (
                taxon(line, f[2], n)?,
                taxon(line, f[3], n)?,
                taxon(line, f[4], n)?,
            );
            Role::Coverage {
                triple: (i, j, l),
                case,
            }
        }
        "d" => {
            want(2)?;
            let t: usize = num(line, f[2])?;
            if t == 0 {
                return Err(map_err(line, "topology indices are 1-based".into()));
            }
            Role::Consistency {
                topology: t - 1,
                case: num(line, f[1])?,
            }
        }
        "q" => {
            want(1)?;
            let t: usize = num(line, f[1])?;
            if t == 0 {
                return Err(map_err(line, "topology indices are 1-based".into()));
            }
            Role::Quartet { topology: t - 1 }
        }
        other => return Err(map_err(line, format!("unknown role `{other}`"))),
    })
}

struct RoleText(Role);

impl fmt::Display for RoleText {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = |(i, j): Pair| format!("{} {}", i + 1, j + 1);
        match self.0 {
            Role::Select { pair, value } => write!(f, "M {} {value}", p(pair)),
            Role::Bit { pair, bit } => write!(f, "M {} {bit}", p(pair)),
            Role::Counter { pair, reg } => write!(f, "s {} {reg}", p(pair)),
            Role::Prefix { pair } => write!(f, "p {}", p(pair)),
            Role::Bound { pair } => write!(f, "b {}", p(pair)),
            Role::Equal { a, b } => write!(f, "e {} {}", p(a), p(b)),
            Role::Greater { a, b } => write!(f, "g {} {}", p(a), p(b)),
            Role::Coverage {
                triple: (i, j, l),
                case,
            } => {
                write!(f, "c {case} {} {} {}", i + 1, j + 1, l + 1)
            }
            Role::Consistency { topology, case } => write!(f, "d {case} {}", topology + 1),
            Role::Quartet { topology } => write!(f, "q {}", topology + 1),
        }
    }
}
