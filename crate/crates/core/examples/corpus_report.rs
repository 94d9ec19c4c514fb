//! Prints the dual-path corpus comparison.
fn main() {
    let c = pcontest::algebra::derive_corpus().unwrap();
    let r = pcontest::algebra::compare_with_transcription(&c, 50, 1).unwrap();
    for x in r {
        println!("{:14} match={} bad={}/{} ratio={:?} diff={}", x.name, x.exact_match, x.disagreeing_points, x.points, x.ratio, x.difference.chars().take(150).collect::<String>());
    }
}
