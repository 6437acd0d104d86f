mod common;

#[test]
fn metric_axioms() {
    common::metric_axioms().unwrap();
}

#[test]
fn diameter_cigar_is_inside_length_cigar() {
    common::cigar_inclusion().unwrap();
}

#[test]
fn inner_diameter_bracket() {
    common::rho_bracket().unwrap();
}

#[test]
fn rerouted_curves_avoid_the_complement() {
    common::avoid_boundary_containment().unwrap();
}

#[test]
fn circle_domains_are_disjoint() {
    common::circle_domain_disjointness().unwrap();
}
