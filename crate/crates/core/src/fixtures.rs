//! Worked examples used by tests, benches and the CLI.

use crate::spaces::{build_set_hgos, SetHgos};
use crate::subset::{Subset, Universe};
use crate::tables::{successor_neighborhoods, BinaryRelationSpace, InformationTable};

/// The relation on `{a,b,c,e,f}` seeding the five-element example.
pub fn five_element_relation() -> BinaryRelationSpace {
    let u = Universe::parse_list("a,b,c,e,f").expect("static universe");
    let pairs = [
        ("a", "a"),
        ("b", "b"),
        ("c", "c"),
        ("a", "b"),
        ("c", "e"),
        ("e", "f"),
        ("e", "c"),
        ("f", "e"),
        ("e", "b"),
    ];
    BinaryRelationSpace::from_pairs(u, &pairs).expect("static relation")
}

/// Set HGOS over the neighborhoods of [`five_element_relation`].
pub fn five_element_space() -> SetHgos {
    let rel = five_element_relation();
    let family = successor_neighborhoods(&rel).family();
    build_set_hgos(rel.universe.clone(), family).expect("static space")
}

/// Tabulated neighborhoods in universe order.
pub const REFERENCE_NEIGHBORHOODS: [&str; 5] = ["a", "abe", "ce", "cf", "e"];

/// Tabulated approximation rows `(members, lower, upper)`, as reference.
///
/// Sets are written as letter strings; `""` is the empty set and `"S"` the
/// universe.
pub const REFERENCE_APPROXIMATIONS: [(&[&str], &str, &str); 18] = [
    (&["a", "b", "ab"], "a", "abe"),
    (&["ae", "abe"], "a", "abce"),
    (&["e", "be"], "e", "abce"),
    (&["c"], "", "cef"),
    (&["f"], "", "cf"),
    (&["cf"], "cf", "cef"),
    (&["bc", "bf"], "", "S"),
    (&["ac", "af", "abc", "abf"], "a", "S"),
    (&["aef"], "ae", "S"),
    (&["ef", "bef"], "e", "S"),
    (&["ec", "bce"], "ec", "S"),
    (&["bcf"], "fc", "S"),
    (&["abef"], "abe", "S"),
    (&["ace"], "ace", "S"),
    (&["acf"], "acf", "S"),
    (&["ecf", "bcef"], "cef", "S"),
    (&["abcf"], "abcf", "S"),
    (&["abce"], "abcf", "S"),
];

/// Parses the letter-string notation of [`REFERENCE_APPROXIMATIONS`].
pub fn letters(u: &Universe, s: &str) -> Subset {
    if s == "S" {
        return u.full();
    }
    let labels: Vec<String> = s.chars().map(|c| c.to_string()).collect();
    u.subset(&labels).expect("letters over the universe")
}

/// Reflexive completion of `{(a,c),(b,c),(a,e),(b,e)}` on `{a,b,c,e,f}`.
pub fn doctors_parthood() -> BinaryRelationSpace {
    let u = Universe::parse_list("a,b,c,e,f").expect("static universe");
    let pairs = [
        ("a", "a"),
        ("b", "b"),
        ("c", "c"),
        ("e", "e"),
        ("f", "f"),
        ("a", "c"),
        ("b", "c"),
        ("a", "e"),
        ("b", "e"),
    ];
    BinaryRelationSpace::from_pairs(u, &pairs).expect("static relation")
}

/// Doctors and diagnoses: nine single-letter attributes plus the remark.
pub fn doctors_table() -> InformationTable {
    let rows = [
        ("X", "smm", "www", "nnw", "General"),
        ("W", "mww", "swm", "nnn", "General"),
        ("Z", "smm", "mwm", "wmw", "Specialist"),
        ("E", "msw", "swm", "mms", "Specialist"),
        ("F", "mss", "mwm", "mws", "Specialist"),
    ];
    let mut csv = String::from("team");
    for k in 1..=9 {
        csv.push_str(&format!(",att{k}"));
    }
    csv.push_str(",remark\n");
    for (id, a, b, c, remark) in rows {
        csv.push_str(id);
        for ch in a.chars().chain(b.chars()).chain(c.chars()) {
            csv.push(',');
            csv.push(ch);
        }
        csv.push(',');
        csv.push_str(remark);
        csv.push('\n');
    }
    InformationTable::from_csv_str(&csv).expect("static table")
}
