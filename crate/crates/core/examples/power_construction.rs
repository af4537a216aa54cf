use cwlab::scaling::is_scalable;
use cwlab::search::generate_power_solution;
use cwlab::verify::verify_fc;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for n in 1..=4 {
        let t = generate_power_solution(n)?;
        println!(
            "3^{n} = {} coins in {} weighings: valid={} scalable={}",
            t.n_coins,
            t.depth(),
            verify_fc(&t)?.valid,
            is_scalable(&t)?.scalable
        );
    }
    Ok(())
}
