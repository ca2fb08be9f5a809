use weyl_lab::acceptance::{run, total_time};

fn main() {
    let seed = std::env::var("WEYL_LAB_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(7);
    let only: Vec<String> = std::env::args().skip(1).filter(|a| a.starts_with(['E', 'e'])).collect();
    println!("acceptance suite, seed {seed}");
    let results = run(seed, &only, |c| println!("{}", c.line()));
    let failed = results.iter().filter(|c| !c.passed).count();
    println!("{} passed, {failed} failed, {:.1} s", results.len() - failed, total_time(&results).as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
