//! Prints the default BRIEF pattern in fixture format.
fn main() {
    print!("{}", featbench_core::orb::BriefPattern::default_for(31).to_fixture());
}
