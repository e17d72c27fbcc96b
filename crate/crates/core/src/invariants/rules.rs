//! Rule table shared by the invariant engine and the classifier.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rule {
    pub id: &'static str,
    pub cite: &'static str,
    /// Assumed rather than proved; disabled in strict mode.
    pub quarantined: bool,
}

const fn r(id: &'static str, cite: &'static str) -> Rule {
    Rule {
        id,
        cite,
        quarantined: false,
    }
}

const fn q(id: &'static str, cite: &'static str) -> Rule {
    Rule {
        id,
        cite,
        quarantined: true,
    }
}

pub const RULES: &[Rule] = &[
    r("ANN", "asserted by annotation"),
    r("ANN-ONE-RELATOR", "one-relator groups are semistable and of telescopic type at each end"),
    r("E-ORDER", "order read off the constructor"),
    r("E-FIN", "finite groups have 0 ends"),
    r("E-INT", "the integers have 2 ends"),
    r("E-FREE", "free groups of rank at least 2 have infinitely many ends"),
    r("E-SURF", "closed aspherical surfaces have the plane as universal cover, which has 1 end"),
    r(
        "E-PROD",
        "a direct product of two infinite finitely presented groups is 1-ended; finite factors leave the ends unchanged",
    ),
    r(
        "E-EXT",
        "an extension of an infinite group by an infinite group is 1-ended; a finite side leaves the ends unchanged",
    ),
    r(
        "E-FREEPROD",
        "the free product of two groups of order 2 is infinite dihedral, hence 2-ended; any other free product of at least two nontrivial factors has infinitely many ends",
    ),
    r(
        "E-AMAL",
        "an amalgam over a finite group is 2-ended when both indices are 2 and infinitely ended otherwise",
    ),
    r(
        "E-HNN",
        "an HNN extension over a finite group is 2-ended exactly when the edge group is the whole finite base",
    ),
    r(
        "E-GRAPH",
        "edges whose group is a whole finite vertex group collapse; a finite graph of finite groups is virtually free with Euler characteristic sum 1/|Gv| - sum 1/|Ge|; a reduced splitting over finite groups with an infinite vertex group has infinitely many ends",
    ),
    r("S-FIN", "finite and 2-ended groups are semistable at infinity"),
    r("S-FREE", "free groups are semistable at each end"),
    r("S-SURF", "surface groups are semistable: the universal cover is the plane"),
    r(
        "S-PROD",
        "products and extensions of infinite finitely presented groups are 1-ended and semistable at infinity",
    ),
    r(
        "S-VIRT",
        "semistability is shared by commensurable groups and survives quotients by finite normal subgroups",
    ),
    r("S-PRO", "a pro-epimorphic fundamental pro-group means semistability at infinity"),
    q(
        "AXIOM-SS-GRAPH",
        "graphs of groups with finite edge groups and semistable vertex groups are semistable at each end",
    ),
    r(
        "P-SURF",
        "virtually surface groups have fundamental pro-group pro-isomorphic to the constant tower Z",
    ),
    r("P-Z2", "Z x Z: the universal cover of the torus has constant pro-group Z"),
    r(
        "P-Z3",
        "Z x Z x Z: the universal cover of the 2-skeleton of the 3-torus is simply connected at infinity",
    ),
    q(
        "R-SCI-STACK",
        "a product of Z with a 1-ended group that is simply connected at infinity or of constant Z type is simply connected at infinity",
    ),
    r(
        "P-F2xZ",
        "F2 x Z: the pro-group of (S1 v S1) x S1 is telescopic with strictly growing bases",
    ),
    r(
        "P-ONE-OF-THREE",
        "a short exact sequence of infinite finitely presented groups has middle group proper 2-equivalent to Z^3, Z^2 or F2 x Z",
    ),
    r(
        "PN-TYPE",
        "the boundary number is 0, 2 or infinite for the trivial, constant Z and growing telescopic types; the value 1 cannot occur",
    ),
    r("R-VNP", "the boundary number is invariant under passage to finite index"),
    r("H2-PN", "rank H^2(G; ZG) + 1 equals the boundary number when the latter is nonzero"),
    r("P3R-TEL", "groups of telescopic type at infinity are properly 3-realizable"),
    r("R-FIN", "any two finite groups are proper 2-equivalent"),
    r("R-2E", "all 2-ended groups are proper 2-equivalent to the group of integers"),
    r("R-QI1", "a group and its finite index subgroups are proper 2-equivalent"),
    r(
        "R-QI2",
        "a group and its quotient by a finite normal subgroup are proper 2-equivalent",
    ),
    r(
        "R-PRO",
        "1-ended semistable groups are proper 2-equivalent iff their fundamental pro-groups are pro-isomorphic",
    ),
    r("R-PROD", "the class of a direct product depends only on the classes of its factors"),
    r(
        "R-EXT",
        "an extension of infinite finitely presented groups is proper 2-equivalent to the product of kernel and quotient",
    ),
    r("R-POW", "a free power G * ... * G is proper 2-equivalent to G * G"),
    r("R-FREE", "replacing a free factor by a proper 2-equivalent group preserves the class"),
    r(
        "R-AMAL",
        "an infinitely ended amalgam over a finite group is proper 2-equivalent to the free product of its sides",
    ),
    r(
        "R-HNN",
        "an infinitely ended HNN extension over a finite group is proper 2-equivalent to the base free product Z",
    ),
    r(
        "R-GRAPH",
        "infinitely ended groups splitting over finite groups with the same set of vertex classes, without multiplicities, are proper 2-equivalent",
    ),
    r(
        "R-MERGE",
        "finite, 2-ended and simply connected at infinity vertex classes merge away inside an infinitely ended group",
    ),
    r(
        "R-SEP",
        "number of ends, semistability, pro-group type and rank of H^2(G; ZG) are invariants of proper 2-equivalence",
    ),
];

/// Looks up a rule by id.
pub fn rule(id: &str) -> &'static Rule {
    RULES
        .iter()
        .find(|r| r.id == id)
        .unwrap_or_else(|| panic!("unknown rule id {id}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_unique() {
        let mut ids: Vec<&str> = RULES.iter().map(|r| r.id).collect();
        ids.sort();
        let n = ids.len();
        ids.dedup();
        assert_eq!(ids.len(), n);
    }

    #[test]
    fn quarantine_flags() {
        let q: Vec<&str> = RULES.iter().filter(|r| r.quarantined).map(|r| r.id).collect();
        assert_eq!(q, vec!["AXIOM-SS-GRAPH", "R-SCI-STACK"]);
    }
}
