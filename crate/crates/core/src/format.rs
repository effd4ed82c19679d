//! Line-oriented task files.
//!
//! ```text
//! task v1
//! vars 3
//! names x1 x2 y
//! frame 0 1
//! goal 000
//! goal 01*
//! ```
//!
//! `#` starts a comment. Goal patterns may leave variables as `*`; they are
//! expanded to every completion when the task is built.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::state::{PartialState, Task, VariableSpace};

const HEADER: &str = "task v1";

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

pub fn read_task(text: &str) -> Result<Task> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    match lines.next() {
        Some((_, HEADER)) => {}
        Some((no, other)) => return Err(parse_err(no, format!("expected {HEADER:?}, found {other:?}"))),
        None => return Err(parse_err(1, "empty task file")),
    }
    let n = match lines.next() {
        Some((no, line)) => match line.split_whitespace().collect::<Vec<_>>().as_slice() {
            ["vars", count] => count
                .parse::<usize>()
                .map_err(|_| parse_err(no, format!("bad variable count {count:?}")))?,
            _ => return Err(parse_err(no, "expected `vars <n>`")),
        },
        None => return Err(parse_err(1, "missing `vars` line")),
    };
    let mut space = VariableSpace::new(n).map_err(|e| parse_err(2, e.to_string()))?;

    let mut frames = Vec::new();
    let mut goals = Vec::new();
    let mut seen_names = false;
    for (no, line) in lines {
        let mut words = line.split_whitespace();
        let keyword = words.next().unwrap_or_default();
        match keyword {
            "names" => {
                if seen_names || !frames.is_empty() || !goals.is_empty() {
                    return Err(parse_err(no, "`names` must appear once, right after `vars`"));
                }
                seen_names = true;
                let names = words.map(str::to_string).collect();
                space = VariableSpace::with_names(n, names).map_err(|e| parse_err(no, e.to_string()))?;
            }
            "frame" => {
                let frame = words
                    .map(|w| w.parse::<usize>().map_err(|_| parse_err(no, format!("bad index {w:?}"))))
                    .collect::<Result<Vec<_>>>()?;
                if let Some(&index) = frame.iter().find(|&&i| i >= n) {
                    return Err(parse_err(no, format!("frame index {index} out of range")));
                }
                frames.push(frame);
            }
            "goal" => {
                let pattern = match (words.next(), words.next()) {
                    (Some(p), None) => p,
                    _ => return Err(parse_err(no, "expected `goal <pattern>`")),
                };
                let state: PartialState =
                    pattern.parse().map_err(|_| parse_err(no, format!("bad pattern {pattern:?}")))?;
                if state.len() != n {
                    return Err(Error::SpaceMismatch { left: n, right: state.len() });
                }
                goals.push(state);
            }
            other => return Err(parse_err(no, format!("unknown directive {other:?}"))),
        }
    }
    if frames.is_empty() {
        return Err(parse_err(0, "no `frame` line"));
    }
    if goals.is_empty() {
        return Err(parse_err(0, "no `goal` line"));
    }
    Task::build(space, &goals, &frames)
}

/// Canonical text: header, names, sorted frames, sorted complete goals.
pub fn write_task(task: &Task) -> String {
    let mut out = String::new();
    writeln!(out, "{HEADER}").unwrap();
    writeln!(out, "vars {}", task.n()).unwrap();
    if let Some(names) = task.space().names() {
        writeln!(out, "names {}", names.join(" ")).unwrap();
    }
    for frame in task.frames() {
        out.push_str("frame");
        for i in frame {
            write!(out, " {i}").unwrap();
        }
        out.push('\n');
    }
    for g in task.goals() {
        writeln!(out, "goal {g}").unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file() {
        let t = read_task("task v1\nvars 2\nframe 0 1\ngoal 11\n").unwrap();
        assert_eq!(t.goals().len(), 1);
        assert_eq!(write_task(&t), "task v1\nvars 2\nframe 0 1\ngoal 11\n");
    }

    #[test]
    fn patterns_expand() {
        let t = read_task("# comment\ntask v1\nvars 2 # two\nframe 0\ngoal 1*\n").unwrap();
        assert_eq!(t.goals().len(), 2);
        assert_eq!(write_task(&t), "task v1\nvars 2\nframe 0\ngoal 10\ngoal 11\n");
    }

    #[test]
    fn empty_frame_round_trips() {
        let t = read_task("task v1\nvars 2\nframe\ngoal 01\n").unwrap();
        assert_eq!(t.frames(), &[Vec::<usize>::new()]);
        assert_eq!(read_task(&write_task(&t)).unwrap(), t);
    }

    #[test]
    fn errors_carry_lines() {
        assert_eq!(
            read_task("task v2\n"),
            Err(Error::Parse { line: 1, message: "expected \"task v1\", found \"task v2\"".into() })
        );
        assert!(matches!(read_task("task v1\nvars x\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(
            read_task("task v1\nvars 2\nframe 0\ngoal 1x\n"),
            Err(Error::Parse { line: 4, .. })
        ));
        assert!(matches!(
            read_task("task v1\nvars 2\nframe 5\ngoal 11\n"),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(matches!(
            read_task("task v1\nvars 2\nframe 0\nbogus\n"),
            Err(Error::Parse { line: 4, .. })
        ));
        assert_eq!(
            read_task("task v1\nvars 2\nframe 0\ngoal 111\n"),
            Err(Error::SpaceMismatch { left: 2, right: 3 })
        );
        assert!(matches!(read_task("task v1\nvars 2\nframe 0\n"), Err(Error::Parse { .. })));
    }

    #[test]
    fn names_are_kept() {
        let text = "task v1\nvars 2\nnames a b\nframe 0\ngoal 10\n";
        let t = read_task(text).unwrap();
        assert_eq!(t.space().names().unwrap(), ["a", "b"]);
        assert_eq!(write_task(&t), text);
    }
}
