//! A synthetic stand-in for LUBM: university-shaped unary and binary facts,
//! an ontology of plain rules, and seeded rules with existential heads.
//!
//! Every existential rule writes predicates no other rule writes and the
//! database never mentions, so whether such a rule is already satisfied
//! for a frontier tuple does not depend on firing order. The existential
//! rules are arranged in levels, each reading only the ontology and lower
//! levels, so the chase always terminates.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashSet;

use super::GenError;
use crate::model::Constant;
use crate::parser::parse_rules;
use crate::rules::{Atom, RuleSet, RuleTerm};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LubmConfig {
    /// Exact number of distinct database facts.
    pub facts: usize,
    pub existential_rules: usize,
    pub seed: u64,
}

impl Default for LubmConfig {
    fn default() -> Self {
        LubmConfig {
            facts: 10_000,
            existential_rules: 100,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LubmDataset {
    pub facts: Vec<Atom>,
    pub rules: RuleSet,
}

const ONTOLOGY: &str = "
GraduateStudent(?x) -> Student(?x) .
UndergraduateStudent(?x) -> Student(?x) .
FullProfessor(?x) -> Professor(?x) .
AssociateProfessor(?x) -> Professor(?x) .
AssistantProfessor(?x) -> Professor(?x) .
Professor(?x) -> Faculty(?x) .
Lecturer(?x) -> Faculty(?x) .
Faculty(?x) -> Employee(?x) .
Employee(?x) -> Person(?x) .
Student(?x) -> Person(?x) .
GraduateCourse(?x) -> Course(?x) .
Department(?x) -> Organization(?x) .
University(?x) -> Organization(?x) .
ResearchGroup(?x) -> Organization(?x) .
headOf(?x, ?y) -> worksFor(?x, ?y) .
worksFor(?x, ?y) -> memberOf(?x, ?y) .
memberOf(?x, ?y) -> member(?y, ?x) .
undergraduateDegreeFrom(?x, ?y) -> degreeFrom(?x, ?y) .
degreeFrom(?x, ?y) -> hasAlumnus(?y, ?x) .
subOrganizationOf(?x, ?y), subOrganizationOf(?y, ?z) -> subOrganizationOf(?x, ?z) .
teacherOf(?x, ?y) -> Faculty(?x) .
teacherOf(?x, ?y) -> Course(?y) .
takesCourse(?x, ?y) -> Student(?x) .
advisor(?x, ?y) -> Professor(?y) .
publicationAuthor(?x, ?y) -> Publication(?x) .
publicationAuthor(?x, ?y) -> Person(?y) .
headOf(?x, ?y), Department(?y) -> Chair(?x) .
worksFor(?x, ?y), Organization(?y) -> Employee(?x) .
takesCourse(?x, ?c), teacherOf(?p, ?c) -> studentOf(?x, ?p) .
GraduateStudent(?x), takesCourse(?x, ?c), GraduateCourse(?c) -> AdvancedStudent(?x) .
memberOf(?x, ?y), subOrganizationOf(?y, ?z) -> affiliatedWith(?x, ?z) .
";

const CLASSES: &[&str] = &[
    "Student",
    "GraduateStudent",
    "UndergraduateStudent",
    "Professor",
    "FullProfessor",
    "AssociateProfessor",
    "AssistantProfessor",
    "Lecturer",
    "Faculty",
    "Employee",
    "Person",
    "Course",
    "GraduateCourse",
    "Department",
    "University",
    "ResearchGroup",
    "Organization",
    "Publication",
    "Chair",
    "AdvancedStudent",
];

const PROPERTIES: &[&str] = &[
    "memberOf",
    "worksFor",
    "takesCourse",
    "teacherOf",
    "advisor",
    "publicationAuthor",
    "degreeFrom",
    "subOrganizationOf",
    "studentOf",
    "headOf",
    "affiliatedWith",
];

const LEVELS: usize = 3;

/// What a generated existential rule offers to higher levels.
struct Output {
    level: usize,
    /// Binary predicate from the frontier term to the fresh null.
    link: String,
    /// Unary predicate on the fresh null, when the head has one.
    tag: Option<String>,
}

fn existential_rules(count: usize, rng: &mut ChaCha8Rng) -> String {
    let mut out: Vec<Output> = Vec::new();
    let mut text = String::new();
    for i in 0..count {
        let level = i * LEVELS / count;
        let class = CLASSES[rng.random_range(0..CLASSES.len())];
        let prop = PROPERTIES[rng.random_range(0..PROPERTIES.len())];
        let lower: Vec<&Output> = out.iter().filter(|o| o.level < level).collect();
        let body = if lower.is_empty() {
            match rng.random_range(0..3) {
                0 => format!("{class}(?x)"),
                1 => format!("{prop}(?x, ?z)"),
                _ => format!("{prop}(?z, ?x), {class}(?z)"),
            }
        } else {
            let src = lower[rng.random_range(0..lower.len())];
            match (&src.tag, rng.random_range(0..3)) {
                (Some(tag), 0) => format!("{tag}(?x)"),
                (_, 1) => format!("{}(?x, ?z), {class}(?x)", src.link),
                _ => format!("{}(?z, ?x)", src.link),
            }
        };
        let has_z = body.contains("?z");
        let link = format!("ex{i}");
        let (head, tag) = match rng.random_range(0..3) {
            0 => (format!("{link}(?x, !y), tag{i}(!y)"), Some(format!("tag{i}"))),
            1 if has_z => (format!("{link}(?x, !y), rel{i}(!y, ?z)"), None),
            _ => (format!("{link}(?x, !y), rel{i}(!y, !w)"), None),
        };
        text.push_str(&format!("{body} -> {head} .\n"));
        out.push(Output { level, link, tag });
    }
    text
}

struct FactWriter {
    target: usize,
    seen: FxHashSet<Atom>,
    facts: Vec<Atom>,
}

impl FactWriter {
    fn full(&self) -> bool {
        self.facts.len() >= self.target
    }

    fn add(&mut self, predicate: &str, args: &[&str]) {
        if self.full() {
            return;
        }
        let atom = Atom::new(
            predicate,
            args.iter().map(|a| RuleTerm::Constant(Constant::example(a))).collect(),
        );
        if self.seen.insert(atom.clone()) {
            self.facts.push(atom);
        }
    }
}

fn facts(target: usize, rng: &mut ChaCha8Rng) -> Vec<Atom> {
    let mut w = FactWriter {
        target,
        seen: FxHashSet::default(),
        facts: Vec::with_capacity(target),
    };
    let (mut dept, mut fac, mut stu, mut course, mut publ, mut group) = (0usize, 0, 0, 0, 0, 0);
    let mut univ = 0usize;
    while !w.full() {
        let u = format!("u{univ}");
        univ += 1;
        w.add("University", &[&u]);
        let any_univ = |rng: &mut ChaCha8Rng| format!("u{}", rng.random_range(0..univ + 5));
        for _ in 0..rng.random_range(3..6) {
            let d = format!("d{dept}");
            dept += 1;
            w.add("Department", &[&d]);
            w.add("subOrganizationOf", &[&d, &u]);
            for _ in 0..rng.random_range(2..4) {
                let g = format!("g{group}");
                group += 1;
                w.add("ResearchGroup", &[&g]);
                w.add("subOrganizationOf", &[&g, &d]);
            }
            let mut faculty = Vec::new();
            let mut ug_courses = Vec::new();
            let mut gr_courses = Vec::new();
            for k in 0..rng.random_range(8..14) {
                let f = format!("f{fac}");
                fac += 1;
                let kind =
                    ["FullProfessor", "AssociateProfessor", "AssistantProfessor", "Lecturer"][rng.random_range(0..4)];
                w.add(kind, &[&f]);
                w.add("worksFor", &[&f, &d]);
                if k == 0 {
                    w.add("headOf", &[&f, &d]);
                }
                w.add("undergraduateDegreeFrom", &[&f, &any_univ(rng)]);
                for _ in 0..rng.random_range(1..3) {
                    let c = format!("c{course}");
                    course += 1;
                    if rng.random_bool(0.4) {
                        w.add("GraduateCourse", &[&c]);
                        gr_courses.push(c.clone());
                    } else {
                        w.add("Course", &[&c]);
                        ug_courses.push(c.clone());
                    }
                    w.add("teacherOf", &[&f, &c]);
                }
                for _ in 0..rng.random_range(0..4) {
                    let p = format!("p{publ}");
                    publ += 1;
                    w.add("Publication", &[&p]);
                    w.add("publicationAuthor", &[&p, &f]);
                }
                if kind != "Lecturer" {
                    faculty.push(f);
                }
            }
            let pick = |v: &Vec<String>, rng: &mut ChaCha8Rng| v[rng.random_range(0..v.len())].clone();
            for _ in 0..rng.random_range(20..40) {
                let s = format!("s{stu}");
                stu += 1;
                let grad = rng.random_bool(0.25);
                w.add(
                    if grad {
                        "GraduateStudent"
                    } else {
                        "UndergraduateStudent"
                    },
                    &[&s],
                );
                w.add("memberOf", &[&s, &d]);
                let pool = if grad && !gr_courses.is_empty() {
                    &gr_courses
                } else {
                    &ug_courses
                };
                if !pool.is_empty() {
                    for _ in 0..rng.random_range(1..4) {
                        w.add("takesCourse", &[&s, &pick(pool, rng)]);
                    }
                }
                if !faculty.is_empty() && (grad || rng.random_bool(0.2)) {
                    w.add("advisor", &[&s, &pick(&faculty, rng)]);
                }
                if grad {
                    w.add("undergraduateDegreeFrom", &[&s, &any_univ(rng)]);
                }
            }
        }
    }
    w.facts
}

/// A deterministic dataset with exactly `cfg.facts` distinct facts.
pub fn synthetic_lubm(cfg: &LubmConfig) -> Result<LubmDataset, GenError> {
    if cfg.existential_rules == 0 {
        return Err(GenError::NoExistentialRules);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let text = format!("{ONTOLOGY}{}", existential_rules(cfg.existential_rules, &mut rng));
    let rules = parse_rules(&text).expect("generated rules are valid");
    Ok(LubmDataset {
        facts: facts(cfg.facts, &mut rng),
        rules,
    })
}
