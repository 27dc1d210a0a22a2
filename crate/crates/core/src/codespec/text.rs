use super::{CodeSpec, Constraint};
use crate::{Error, Result};

const MAGIC: &str = "POLARSPEC 1";

pub(super) fn save(spec: &CodeSpec) -> String {
    let mut out = format!("{MAGIC}\nM {}\nK {}\nFROZEN", spec.m(), spec.k());
    for f in spec.frozen() {
        out.push_str(&format!(" {f}"));
    }
    out.push('\n');
    for c in spec.dynamic_constraints() {
        out.push_str(&format!("DFC {}:", c.target));
        for j in &c.support {
            out.push_str(&format!(" {j}"));
        }
        out.push('\n');
    }
    out
}

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn numbers(line: usize, s: &str) -> Result<Vec<usize>> {
    s.split_whitespace()
        .map(|t| t.parse().map_err(|_| err(line, format!("bad integer {t:?}"))))
        .collect()
}

pub(super) fn load(text: &str) -> Result<CodeSpec> {
    let mut magic = false;
    let mut m = None;
    let mut k = None;
    let mut frozen: Option<Vec<usize>> = None;
    let mut constraints = Vec::new();
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        if !magic {
            if body.split_whitespace().collect::<Vec<_>>() != ["POLARSPEC", "1"] {
                return Err(err(line, format!("expected {MAGIC:?}")));
            }
            magic = true;
            continue;
        }
        let (key, rest) = body.split_once(char::is_whitespace).unwrap_or((body, ""));
        match key {
            "M" | "K" => {
                let v = numbers(line, rest)?;
                if v.len() != 1 {
                    return Err(err(line, format!("{key} takes one value")));
                }
                let slot = if key == "M" { &mut m } else { &mut k };
                if slot.replace(v[0]).is_some() {
                    return Err(err(line, format!("duplicate {key}")));
                }
            }
            "FROZEN" => {
                if frozen.replace(numbers(line, rest)?).is_some() {
                    return Err(err(line, "duplicate FROZEN"));
                }
            }
            "DFC" => {
                let (t, s) = rest
                    .split_once(':')
                    .ok_or_else(|| err(line, "DFC needs \"<target>: <support>\""))?;
                let target = numbers(line, t)?;
                if target.len() != 1 {
                    return Err(err(line, "DFC needs exactly one target"));
                }
                let target = target[0];
                let support = numbers(line, s)?;
                if support.iter().any(|&j| j >= target) {
                    return Err(err(line, format!("support of {target} must precede it")));
                }
                if constraints.iter().any(|c: &(usize, Constraint)| c.1.target == target) {
                    return Err(err(line, format!("duplicate constraint target {target}")));
                }
                constraints.push((line, Constraint { target, support }));
            }
            other => return Err(err(line, format!("unknown keyword {other:?}"))),
        }
    }
    let missing = |what: &str| err(last_line, format!("missing {what}"));
    if !magic {
        return Err(missing(MAGIC));
    }
    let m = m.ok_or_else(|| missing("M"))?;
    let k = k.ok_or_else(|| missing("K"))?;
    let frozen = frozen.unwrap_or_default();
    for (line, c) in &constraints {
        if !frozen.contains(&c.target) {
            return Err(err(*line, format!("constraint target {} is not frozen", c.target)));
        }
    }
    CodeSpec::new(m, k, frozen, constraints.into_iter().map(|(_, c)| c).collect())
        .map_err(|e| err(last_line, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let spec = CodeSpec::new(
            4,
            10,
            vec![0, 4, 8, 9, 10, 12],
            vec![Constraint { target: 9, support: vec![3, 5] }],
        )
        .unwrap();
        let text = save(&spec);
        assert_eq!(load(&text).unwrap(), spec);
        let plain = CodeSpec::polar(4, vec![0, 4, 8, 9, 10, 12]).unwrap();
        assert_eq!(load(&save(&plain)).unwrap(), plain);
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# a code\n\nPOLARSPEC 1\nM 2  # length 4\nK 3\nFROZEN 0\n";
        let spec = load(text).unwrap();
        assert_eq!(spec.frozen(), &[0]);
    }

    #[test]
    fn rejects_bad_files() {
        let dup = "POLARSPEC 1\nM 2\nK 2\nFROZEN 2 3\nDFC 3: 1\nDFC 3: 0\n";
        assert!(matches!(load(dup), Err(Error::Parse { line: 6, .. })));
        let late = "POLARSPEC 1\nM 2\nK 3\nFROZEN 2\nDFC 2: 2\n";
        assert!(matches!(load(late), Err(Error::Parse { line: 5, .. })));
        assert!(matches!(load("POLARSPEC 2\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(load("POLARSPEC 1\nM x\n"), Err(Error::Parse { line: 2, .. })));
        assert!(load("POLARSPEC 1\nM 2\nK 3\n").is_err());
    }
}
