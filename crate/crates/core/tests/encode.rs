//! Encoders against a direct simulation of deterministic programs.

mod common;

use hornsolve::encode::{
    encode_nested, encode_path, encode_search_tree, encode_state_transition, encode_transition,
    encode_unfolding, invariance_clauses, invariance_expansion, parse_program, parse_search_tree,
    parse_transition_system, QuantifierMode, TransitionSystem,
};
use hornsolve::frontend::{parse_system, render_system, SourceFormat};
use hornsolve::{solve, ClauseSystem, Error, Options, Verdict};
use proptest::prelude::*;

/// `x' = a·x + b·y + c`
#[derive(Clone, Debug)]
struct Affine([i64; 3]);

impl Affine {
    fn apply(&self, x: i128, y: i128) -> i128 {
        self.0[0] as i128 * x + self.0[1] as i128 * y + self.0[2] as i128
    }

    fn text(&self) -> String {
        let mut s = String::from("0");
        for (c, v) in self.0.iter().zip(["*x", "*y", ""]) {
            s += &format!(" {} {}{}", if *c < 0 { '-' } else { '+' }, c.abs(), v);
        }
        s
    }
}

#[derive(Clone, Debug)]
struct Step {
    guard: Option<i64>,
    x: Affine,
    y: Affine,
}

#[derive(Clone, Debug)]
struct Program {
    init: (i64, i64),
    steps: Vec<Step>,
    /// `x + e·y =< k`
    safe: (i64, i64),
    path: Vec<usize>,
}

impl Program {
    fn file(&self) -> String {
        let mut s = format!("VARS x, y\nINIT x = {}, y = {}\n", self.init.0, self.init.1);
        for (i, st) in self.steps.iter().enumerate() {
            s += &format!("TRANS t{} ", i);
            if let Some(g) = st.guard {
                s += &format!("x >= {}, ", g);
            }
            s += &format!("x' = {}, y' = {}\n", st.x.text(), st.y.text());
        }
        s += &format!("SAFE x + {}*y =< {}\n", self.safe.0, self.safe.1);
        s
    }

    fn labels(&self) -> Vec<String> {
        self.path.iter().map(|i| format!("t{}", i)).collect()
    }

    /// Whether every run along the path ends in a safe state.
    fn safe_along_path(&self) -> bool {
        let (mut x, mut y) = (self.init.0 as i128, self.init.1 as i128);
        for &i in &self.path {
            let st = &self.steps[i];
            if st.guard.is_some_and(|g| x < g as i128) {
                return true;
            }
            (x, y) = (st.x.apply(x, y), st.y.apply(x, y));
        }
        x + self.safe.0 as i128 * y <= self.safe.1 as i128
    }
}

fn affine() -> impl Strategy<Value = Affine> {
    [-2i64..=2, -2i64..=2, -5i64..=5].prop_map(Affine)
}

fn program() -> impl Strategy<Value = Program> {
    let step = (prop::option::of(-5i64..=5), affine(), affine()).prop_map(|(guard, x, y)| Step { guard, x, y });
    (
        (-5i64..=5, -5i64..=5),
        prop::collection::vec(step, 1..=3),
        (-3i64..=3, -20i64..=20),
        prop::collection::vec(0usize..3, 0..=5),
    )
        .prop_map(|(init, steps, safe, path)| {
            let n = steps.len();
            Program {
                init,
                steps,
                safe,
                path: path.into_iter().map(|i| i % n).collect(),
            }
        })
}

fn verdict(s: &ClauseSystem) -> Verdict {
    solve(s, &Options::default()).unwrap()
}

fn assert_matches(s: &ClauseSystem, safe: bool) -> Result<(), TestCaseError> {
    match verdict(s) {
        Verdict::Solvable(_) => prop_assert!(safe),
        Verdict::Unsolvable(cex) => {
            prop_assert!(!safe);
            prop_assert!(cex.is_witnessed().unwrap());
        }
        Verdict::Unknown(r) => prop_assert!(false, "unknown: {}", r),
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn path_encodings_match_simulation(p in program()) {
        let ts = parse_transition_system(&p.file()).unwrap();
        let labels = p.labels();
        let safe = p.safe_along_path();
        let path = encode_path(&ts, &labels).unwrap();
        prop_assert_eq!(path.predicates().len(), labels.len() + 1);
        prop_assert_eq!(path.clauses().len(), labels.len() + 2);
        assert_matches(&path, safe)?;
        assert_matches(&encode_transition(&ts, &labels).unwrap(), safe)?;
        let unfolded = encode_unfolding(&invariance_clauses(&ts).unwrap(), &invariance_expansion(&ts, &labels).unwrap()).unwrap();
        assert_matches(&unfolded, safe)?;
    }

    #[test]
    fn encodings_survive_rendering(p in program()) {
        let ts = parse_transition_system(&p.file()).unwrap();
        let path = encode_path(&ts, &p.labels()).unwrap();
        for fmt in [SourceFormat::Native, SourceFormat::Smtlib2] {
            let back = parse_system(&render_system(&path, fmt), fmt).unwrap();
            assert_matches(&back, p.safe_along_path())?;
        }
    }
}

fn ts(text: &str) -> TransitionSystem {
    parse_transition_system(text).unwrap()
}

fn labels(ls: &[&str]) -> Vec<String> {
    ls.iter().map(|s| s.to_string()).collect()
}

#[test]
fn state_transition_summaries() {
    // the summary describes the last step from the states the guard reaches
    let counter = "VARS x\nGUARD x >= 0\nTRANS inc x' = x + 1\nSUMMARY x' = x + 1, x' >= 2\n";
    let s = encode_state_transition(&ts(counter), &labels(&["inc", "inc"])).unwrap();
    assert_eq!((s.predicates().len(), s.clauses().len()), (4, 5));
    assert!(matches!(verdict(&s), Verdict::Solvable(_)));
    let s = encode_state_transition(&ts(counter), &labels(&["inc"])).unwrap();
    assert!(matches!(verdict(&s), Verdict::Unsolvable(_)));
    assert!(matches!(encode_state_transition(&ts(counter), &[]), Err(Error::Encode(_))));
}

#[test]
fn search_tree_modes() {
    // from x >= 0 the second child may step to x - 1, which leaves x' >= 0 at x = 0
    let tree = "VARS x\nROOT x >= 0\nCHILD x' = x + 1 | x >= 0\nCHILD x' >= x - 1, x' =< x + 1 | x >= 0\n";
    let node = parse_search_tree(tree).unwrap();
    let exists = encode_search_tree(&node, QuantifierMode::Existential).unwrap();
    assert_eq!((exists.predicates().len(), exists.clauses().len()), (2, 4));
    assert!(matches!(verdict(&exists), Verdict::Solvable(_)));
    let forall = encode_search_tree(&node, QuantifierMode::Universal).unwrap();
    assert!(matches!(verdict(&forall), Verdict::Unsolvable(_)));
}

const PROGRAM: &str = "\
GLOBALS g
PROC main
LOCALS x
INIT g = 0, x = 5
SAFE g =< 2, x = 5
CALL c -> inc y' = x
PROC inc
LOCALS y
INST a g' = g + 1, y' = y
RET r g' = g
";

#[test]
fn nested_calls_keep_caller_locals() {
    let prog = parse_program(PROGRAM).unwrap();
    let twice = labels(&["c", "a", "r", "c", "a", "r"]);
    let s = encode_nested(&prog, &twice).unwrap();
    assert_eq!((s.predicates().len(), s.clauses().len()), (7, 8));
    assert!(matches!(verdict(&s), Verdict::Solvable(_)));
    let thrice = labels(&["c", "a", "r", "c", "a", "r", "c", "a", "r"]);
    assert!(matches!(verdict(&encode_nested(&prog, &thrice).unwrap()), Verdict::Unsolvable(_)));
    let Err(Error::Encode(msg)) = encode_nested(&prog, &labels(&["c", "a", "a", "r", "r"])) else { panic!() };
    assert!(msg.contains("belongs to inc but control is in main"), "{}", msg);
}
